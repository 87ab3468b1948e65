//! Exit-code contract.

use std::fmt;
use std::path::Path;

use exchangeable_car::Error;

pub const SUCCESS: i32 = 0;
/// Malformed input, domain violation or a failed check.
pub const PARSE: i32 = 1;
pub const NOT_SYMMETRIC: i32 = 2;
pub const INFEASIBLE: i32 = 3;
pub const CAPACITY: i32 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn parse(message: impl Into<String>) -> Self {
        Self {
            code: PARSE,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, e: impl fmt::Display) -> Self {
        Self::parse(format!("{}: {e}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Capacity { .. } => CAPACITY,
            Error::NotSymmetric { .. } => NOT_SYMMETRIC,
            Error::InfeasibleMoments { .. } => INFEASIBLE,
            _ => PARSE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
