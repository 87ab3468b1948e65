//! Seeded random operators, states and unitaries for tests and reports.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::SplitMix64;

use crate::operator::{ModeCount, Operator};

/// The generator used everywhere a seed is accepted.
pub type SeededRng = SplitMix64;

pub fn rng(seed: u64) -> SeededRng {
    SplitMix64::seed_from_u64(seed)
}

fn gaussian_matrix<R: Rng>(rng: &mut R, d: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Entries uniform in the unit square of ℂ.
pub fn random_operator<R: Rng>(rng: &mut R, n: ModeCount) -> Operator {
    let d = n.dim();
    let m = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    Operator::from_matrix(n, m).expect("shape matches")
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: ModeCount) -> Operator {
    let a = random_operator(rng, n);
    (&a + &a.adjoint()).scale_real(0.5)
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: ModeCount) -> Operator {
    let d = n.dim();
    let qr = gaussian_matrix(rng, d).qr();
    let (q, r) = qr.unpack();
    // fix the phases so the distribution is Haar
    let phases = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            let x = r[(i, i)];
            if x.norm() > 0.0 {
                x / x.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Operator::from_matrix(n, q * phases).expect("shape matches")
}

/// Random full-rank density matrix `G G* / tr(G G*)`.
pub fn random_density<R: Rng>(rng: &mut R, n: ModeCount) -> DMatrix<Complex64> {
    let g = gaussian_matrix(rng, n.dim());
    let rho = &g * g.adjoint();
    let t = rho.trace();
    rho / t
}
