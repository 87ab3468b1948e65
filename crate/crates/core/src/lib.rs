//! Finite-mode CAR algebras and exchangeable fermionic states.
//!
//! The crate builds the CAR algebra on `n` modes as concrete `2^n × 2^n`
//! matrices (Jordan–Wigner form), the parity grading, the Jordan–Klein–Wigner
//! matrix units and the tensor-product isomorphism they induce. On top of
//! that it provides the permutation action on modes, product states
//! `φ_μ`, a finite-dimensional GNS construction with covariant unitaries,
//! and the inverse problem of recovering the mixing measure of a symmetric
//! state from its occupation moments.
//!
//! ```
//! use exchangeable_car::{car::CarContext, states::{product_state, evaluate}};
//!
//! let ctx = CarContext::build(3).unwrap();
//! let phi = product_state(0.3, ctx.modes()).unwrap();
//! let e11 = ctx.matrix_unit(1, 1, 1).unwrap();
//! assert!((evaluate(&phi, &e11).unwrap().re - 0.3).abs() < 1e-15);
//! ```

pub mod car;
pub mod commutant;
pub mod definetti;
pub mod error;
pub mod gns;
pub mod linalg;
pub mod monomial;
pub mod nnls;
pub mod operator;
pub mod perms;
pub mod random;
pub mod states;

pub use car::CarContext;
pub use error::{Error, Result};
pub use operator::{ModeCount, Operator};
pub use perms::{FockUnitary, Permutation};
pub use states::State;
