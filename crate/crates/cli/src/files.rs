//! State files (JSON) and measure files (CSV).

use std::fs;
use std::path::Path;

use exchangeable_car::definetti::{Atom, MixingMeasure};
use exchangeable_car::{ModeCount, State};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exit::Failure;

/// `{"n_modes": n, "density": [[[re, im], ...], ...]}`, row-major.
#[derive(Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub n_modes: usize,
    pub density: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_state(phi: &State) -> Self {
        let d = phi.density();
        Self {
            n_modes: phi.modes().get(),
            density: (0..d.nrows())
                .map(|r| {
                    (0..d.ncols())
                        .map(|c| [d[(r, c)].re, d[(r, c)].im])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn into_state(self) -> Result<State, Failure> {
        let n = ModeCount::new(self.n_modes)?;
        let dim = n.dim();
        if self.density.len() != dim || self.density.iter().any(|row| row.len() != dim) {
            return Err(Failure::parse(format!(
                "density must be {dim} x {dim} for n_modes = {}",
                self.n_modes
            )));
        }
        let m = DMatrix::from_fn(dim, dim, |r, c| {
            let [re, im] = self.density[r][c];
            Complex64::new(re, im)
        });
        Ok(State::from_density(n, m)?)
    }
}

pub fn read_state(path: &Path) -> Result<State, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let file: StateFile = serde_json::from_str(&text)
        .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    file.into_state()
}

pub fn write_state(path: &Path, phi: &State) -> Result<(), Failure> {
    let text = serde_json::to_string(&StateFile::from_state(phi)).expect("state serializes");
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

/// Fixed-point decimal with 15 significant digits.
pub fn decimal(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.1}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (14 - magnitude).max(1) as usize;
    format!("{x:.decimals$}")
}

#[derive(Debug, Serialize, Deserialize)]
struct MeasureRow {
    mu: f64,
    weight: f64,
}

pub fn write_measure(path: &Path, measure: &MixingMeasure) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Failure::parse(e.to_string()))?;
    w.write_record(["mu", "weight"])
        .map_err(|e| Failure::parse(e.to_string()))?;
    for a in measure.atoms() {
        w.write_record([decimal(a.mu), decimal(a.weight)])
            .map_err(|e| Failure::parse(e.to_string()))?;
    }
    w.flush().map_err(|e| Failure::io(path, e))
}

pub fn read_measure(path: &Path) -> Result<MixingMeasure, Failure> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let headers = r
        .headers()
        .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    if headers.iter().collect::<Vec<_>>() != ["mu", "weight"] {
        return Err(Failure::parse(format!(
            "{}: header must be mu,weight",
            path.display()
        )));
    }
    let atoms = r
        .deserialize::<MeasureRow>()
        .map(|row| {
            row.map(|row| Atom {
                mu: row.mu,
                weight: row.weight,
            })
            .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MixingMeasure::new(atoms)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_keeps_fifteen_digits() {
        assert_eq!(decimal(0.3), "0.300000000000000");
        assert_eq!(decimal(1.0), "1.00000000000000");
        assert_eq!(decimal(2.5e-9), "0.00000000250000000000000");
        assert_eq!(decimal(0.0), "0.0");
        assert!(!decimal(1e-12).contains('e'));
    }

    #[test]
    fn state_file_round_trip() {
        let phi = exchangeable_car::states::product_state(0.3, ModeCount::new(2).unwrap()).unwrap();
        let back = StateFile::from_state(&phi).into_state().unwrap();
        assert!(back.distance(&phi) < 1e-15);
    }

    #[test]
    fn wrong_shape_is_a_parse_error() {
        let file = StateFile {
            n_modes: 2,
            density: vec![vec![[1.0, 0.0]]],
        };
        assert_eq!(file.into_state().unwrap_err().code, crate::exit::PARSE);
    }
}
