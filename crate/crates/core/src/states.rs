//! States on the finite CAR algebra as density matrices, `φ(A) = tr(D A)`.
//!
//! The adjusted density with respect to the normalized trace `τ` is
//! `2^n · D`; everything here works with the unit-trace `D`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::car::CarContext;
use crate::commutant::SymmetricProjector;
use crate::error::{Error, Result};
use crate::linalg::min_eigenvalue;
use crate::operator::{ModeCount, Operator};
use crate::perms::{alpha, group_average, mixing_permutation, second_quantize, Permutation};

/// Default tolerances for accepting a matrix as a density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityTolerance {
    pub hermitian: f64,
    pub trace: f64,
    /// smallest eigenvalue allowed is `−positivity`
    pub positivity: f64,
}

impl Default for DensityTolerance {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            trace: 1e-12,
            positivity: 1e-10,
        }
    }
}

/// A state on `CAR(n)` given by its unit-trace density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    n: ModeCount,
    density: DMatrix<Complex64>,
}

impl State {
    pub fn from_density(n: ModeCount, density: DMatrix<Complex64>) -> Result<Self> {
        Self::from_density_with(n, density, DensityTolerance::default())
    }

    pub fn from_density_with(
        n: ModeCount,
        density: DMatrix<Complex64>,
        tol: DensityTolerance,
    ) -> Result<Self> {
        let d = n.dim();
        if density.nrows() != d || density.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: density.nrows().max(density.ncols()),
            });
        }
        let herm = (&density - density.adjoint()).norm();
        if herm > tol.hermitian {
            return Err(Error::InvalidState(format!(
                "density is not Hermitian (‖D − D*‖ = {herm:.3e})"
            )));
        }
        let tr = density.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > tol.trace {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = min_eigenvalue(&density);
        if min < -tol.positivity {
            return Err(Error::InvalidState(format!(
                "density is not positive (min eigenvalue {min:.3e})"
            )));
        }
        Ok(Self { n, density })
    }

    /// Skips validation; callers guarantee a density.
    pub(crate) fn trusted(n: ModeCount, density: DMatrix<Complex64>) -> Self {
        Self { n, density }
    }

    /// Vector state `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn from_vector(n: ModeCount, psi: &[Complex64]) -> Result<Self> {
        if psi.len() != n.dim() {
            return Err(Error::DimensionMismatch {
                expected: n.dim(),
                got: psi.len(),
            });
        }
        let v = DVector::from_column_slice(psi);
        let norm2 = v.norm_squared();
        if norm2 == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let density = &v * v.adjoint() / Complex64::new(norm2, 0.0);
        Ok(Self { n, density })
    }

    /// Convex combination `Σ w_i φ_i`; weights must be nonnegative and sum to 1.
    pub fn mixture(parts: &[(f64, &State)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let n = first.1.n;
        let total: f64 = parts.iter().map(|p| p.0).sum();
        if parts.iter().any(|p| p.0 < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "mixture weights must be nonnegative and sum to 1 (sum {total})"
            )));
        }
        let mut density = DMatrix::zeros(n.dim(), n.dim());
        for (w, s) in parts {
            if s.n != n {
                return Err(Error::DimensionMismatch {
                    expected: n.dim(),
                    got: s.n.dim(),
                });
            }
            density += &s.density * Complex64::new(*w, 0.0);
        }
        Ok(Self { n, density })
    }

    pub fn modes(&self) -> ModeCount {
        self.n
    }

    pub fn density(&self) -> &DMatrix<Complex64> {
        &self.density
    }

    /// Adjusted density `T = 2^n D`, so that `φ = τ(T ·)`.
    pub fn adjusted_density(&self) -> Operator {
        Operator::from_matrix(
            self.n,
            &self.density * Complex64::new(self.n.dim() as f64, 0.0),
        )
        .expect("shape matches")
    }

    /// Frobenius distance between densities.
    pub fn distance(&self, other: &State) -> f64 {
        (&self.density - &other.density).norm()
    }
}

/// `tr(D A) = Σ_{r,c} D[r,c] A[c,r]`
fn pairing(d: &DMatrix<Complex64>, a: &DMatrix<Complex64>) -> Complex64 {
    let dim = d.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..dim {
        for c in 0..dim {
            acc += d[(r, c)] * a[(c, r)];
        }
    }
    acc
}

/// `tr(D X Y)`, walking the nonzeros of `Y` when it is sparse.
fn pairing3(d: &DMatrix<Complex64>, x: &DMatrix<Complex64>, y: &DMatrix<Complex64>) -> Complex64 {
    let dim = d.nrows();
    let nnz = y.iter().filter(|v| v.norm() != 0.0).count();
    if nnz > dim * dim / 8 {
        return pairing(&(d * x), y);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for c in 0..dim {
        for k in 0..dim {
            let yck = y[(c, k)];
            if yck.norm() == 0.0 {
                continue;
            }
            // (D X)[k, c]
            let mut dx = Complex64::new(0.0, 0.0);
            for r in 0..dim {
                dx += d[(k, r)] * x[(r, c)];
            }
            acc += dx * yck;
        }
    }
    acc
}

/// `φ(A) = tr(D A)`.
pub fn evaluate(phi: &State, a: &Operator) -> Result<Complex64> {
    a.check_modes(phi.n)?;
    Ok(pairing(&phi.density, a.matrix()))
}

/// Single-mode even state `ρ_μ(diag(a, d)) = μa + (1 − μ)d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvenQubitState {
    mu: f64,
}

impl EvenQubitState {
    pub fn new(mu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::Domain(format!("μ = {mu} not in [0, 1]")));
        }
        Ok(Self { mu })
    }

    pub fn mu(self) -> f64 {
        self.mu
    }

    /// `diag(μ, 1 − μ)` in the basis (empty, occupied).
    pub fn density(self) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(self.mu, 0.0),
            Complex64::new(1.0 - self.mu, 0.0),
        ]))
    }
}

/// Product state `φ_μ` of `n` copies of `ρ_μ`.
pub fn product_state(mu: f64, n: ModeCount) -> Result<State> {
    let rho = EvenQubitState::new(mu)?;
    let nn = n.get();
    let diag: Vec<Complex64> = (0..n.dim())
        .map(|b| {
            let occ = b.count_ones() as i32;
            let p = rho.mu.powi(nn as i32 - occ) * (1.0 - rho.mu).powi(occ);
            Complex64::new(p, 0.0)
        })
        .collect();
    Ok(State::trusted(
        n,
        DMatrix::from_diagonal(&DVector::from_vec(diag)),
    ))
}

/// `A ↦ (1/n!) Σ_g φ(α_g(A))` by full enumeration (`n ≤ 8`).
pub fn symmetrize_state(phi: &State) -> Result<State> {
    let d = Operator::from_matrix(phi.n, phi.density.clone())?;
    let avg = group_average(&d, phi.n.get())?;
    Ok(State::trusted(phi.n, avg.into_matrix()))
}

/// Same map as [`symmetrize_state`], computed by orthogonal projection onto
/// the permutation commutant; usable for every `n` a context supports.
pub fn project_symmetric(phi: &State, projector: &SymmetricProjector) -> Result<State> {
    if projector.modes() != phi.n {
        return Err(Error::DimensionMismatch {
            expected: phi.n.dim(),
            got: projector.modes().dim(),
        });
    }
    Ok(State::trusted(
        phi.n,
        projector.project_matrix(&phi.density),
    ))
}

/// Largest `‖Γ(t) D Γ(t)* − D‖_F` over adjacent transpositions `t`.
pub fn symmetry_defect(phi: &State) -> f64 {
    let n = phi.n.get();
    (1..n)
        .map(|i| {
            let t = Permutation::transposition(n, i, i + 1).expect("adjacent modes");
            let moved = second_quantize(&t).conjugate_matrix(&phi.density);
            (moved - &phi.density).norm()
        })
        .fold(0.0, f64::max)
}

/// Invariance under every adjacent transposition, which generate `S_n`.
pub fn is_symmetric(phi: &State, tol: f64) -> bool {
    symmetry_defect(phi) <= tol
}

/// `‖P D P − D‖_F`.
pub fn evenness_defect(phi: &State) -> f64 {
    let d = phi.n.dim();
    let mut acc = 0.0;
    for r in 0..d {
        for c in 0..d {
            if (r.count_ones() + c.count_ones()) % 2 == 1 {
                // P D P flips the sign of odd-parity entries
                acc += 4.0 * phi.density[(r, c)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

pub fn is_even(phi: &State, tol: f64) -> bool {
    evenness_defect(phi) <= tol
}

/// For each `n`, the exact group average `(1/n!) Σ_g φ({A, α_g(A*)})` for an
/// odd `A`; it equals `φ({A, S(A*)})` with `S` the symmetrization.
pub fn oddness_decay<FA, FS>(
    n_list: &[usize],
    a_builder: FA,
    state_builder: FS,
) -> Result<Vec<(usize, Complex64)>>
where
    FA: Fn(&CarContext) -> Result<Operator>,
    FS: Fn(&CarContext) -> Result<State>,
{
    n_list
        .iter()
        .map(|&n| {
            let ctx = CarContext::build(n)?;
            let a = a_builder(&ctx)?;
            ensure_odd(&ctx, &a)?;
            let phi = state_builder(&ctx)?;
            let sym = crate::perms::symmetrize_operator(&a.adjoint())?;
            Ok((n, evaluate(&phi, &a.anticommutator(&sym))?))
        })
        .collect()
}

pub(crate) fn ensure_odd(ctx: &CarContext, a: &Operator) -> Result<()> {
    let (even, _) = ctx.even_odd_split(a)?;
    let even_norm = even.frobenius_norm();
    if even_norm > 1e-12 * a.frobenius_norm().max(1.0) {
        return Err(Error::NotOdd { even_norm });
    }
    Ok(())
}

/// Restriction to `CAR({1..k})`: partial trace over modes `k+1..n`.
pub fn restrict(phi: &State, k: usize) -> Result<State> {
    let n = phi.n.get();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange(format!(
            "restriction to {k} of {n} modes"
        )));
    }
    let head = 1usize << k;
    let tail = 1usize << (n - k);
    let reduced = DMatrix::from_fn(head, head, |x, y| {
        (0..tail)
            .map(|z| phi.density[(x * tail + z, y * tail + z)])
            .sum()
    });
    Ok(State::trusted(ModeCount::new(k)?, reduced))
}

/// Occupation moments `m_k = φ(e_11(1) ⋯ e_11(k))`, `k = 0..=K`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentVector(pub Vec<f64>);

impl MomentVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Moments of the occupation projectors. For a symmetric `φ` they are the
/// power moments of its de Finetti measure; for other states the numbers
/// are still returned but no longer have that meaning.
pub fn occupation_moments(phi: &State, max_order: usize) -> Result<MomentVector> {
    let n = phi.n.get();
    if max_order > n {
        return Err(Error::Domain(format!(
            "moment order {max_order} exceeds the {n} available modes"
        )));
    }
    let d = phi.n.dim();
    let moments = (0..=max_order)
        .map(|k| {
            // e_11(1)⋯e_11(k) projects onto modes 1..k empty
            let mask = ((1usize << k) - 1) << (n - k);
            (0..d)
                .filter(|b| b & mask == 0)
                .map(|b| phi.density[(b, b)].re)
                .sum()
        })
        .collect();
    Ok(MomentVector(moments))
}

/// `(1/n!) Σ_g φ(α_g(A) B)`, computed as `φ(S(A) B)` with the orbit
/// projection `S`.
pub fn weak_clustering_average(
    phi: &State,
    projector: &SymmetricProjector,
    a: &Operator,
    b: &Operator,
) -> Result<Complex64> {
    a.check_modes(phi.n)?;
    b.check_modes(phi.n)?;
    let sym = projector.project(a)?;
    Ok(pairing3(&phi.density, sym.matrix(), b.matrix()))
}

/// `φ(α_{g_m}(A) B) − φ(A)φ(B)` for `A, B` localized in `1..=2^{m−1}`.
pub fn strong_clustering_check(
    phi: &State,
    a: &Operator,
    b: &Operator,
    m: usize,
) -> Result<Complex64> {
    a.check_modes(phi.n)?;
    b.check_modes(phi.n)?;
    let g = mixing_permutation(m, phi.n.get())?;
    let half = 1usize << (m - 1);
    let extent = a.support_extent(1e-14).max(b.support_extent(1e-14));
    if extent > half {
        return Err(Error::Domain(format!(
            "operators act on modes 1..={extent}, stage {m} only separates 1..={half}"
        )));
    }
    let shifted = alpha(&g, a)?;
    let joint = pairing3(&phi.density, shifted.matrix(), b.matrix());
    Ok(joint - evaluate(phi, a)? * evaluate(phi, b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, rng};

    fn close(a: Complex64, b: f64, tol: f64) -> bool {
        (a - Complex64::new(b, 0.0)).norm() <= tol
    }

    #[test]
    fn evaluate_examples() {
        let ctx = CarContext::build(3).unwrap();
        let phi = product_state(0.3, ctx.modes()).unwrap();
        assert!(close(evaluate(&phi, &ctx.identity()).unwrap(), 1.0, 1e-15));
        assert!(close(
            evaluate(&phi, &ctx.matrix_unit(1, 1, 1).unwrap()).unwrap(),
            0.3,
            1e-15
        ));
        assert!(close(
            evaluate(&phi, &ctx.annihilator(1).unwrap()).unwrap(),
            0.0,
            0.0
        ));
        let other = CarContext::build(2).unwrap();
        assert!(evaluate(&phi, &other.identity()).is_err());
    }

    #[test]
    fn product_state_spectrum_and_trace_case() {
        let n = ModeCount::new(2).unwrap();
        let phi = product_state(0.3, n).unwrap();
        let mut eig: Vec<f64> = phi.density().diagonal().iter().map(|z| z.re).collect();
        eig.sort_by(f64::total_cmp);
        for (got, want) in eig.iter().zip([0.09, 0.21, 0.21, 0.49]) {
            assert!((got - want).abs() < 1e-15);
        }
        let tau = product_state(0.5, ModeCount::new(4).unwrap()).unwrap();
        let eye = DMatrix::<Complex64>::identity(16, 16) / Complex64::new(16.0, 0.0);
        assert!((tau.density() - eye).norm() < 1e-15);
        assert!(product_state(1.2, n).is_err());
    }

    #[test]
    fn product_state_on_occupation_word() {
        let ctx = CarContext::build(2).unwrap();
        let phi = product_state(0.3, ctx.modes()).unwrap();
        let w = ctx.gamma_iso(&[(1, 1, 1), (2, 1, 1)]).unwrap();
        assert!(close(evaluate(&phi, &w).unwrap(), 0.09, 1e-15));
    }

    #[test]
    fn symmetrize_state_examples() {
        let n = ModeCount::new(2).unwrap();
        let phi = product_state(0.3, n).unwrap();
        assert!(symmetrize_state(&phi).unwrap().distance(&phi) < 1e-15);

        // a†_1|vac⟩ = |10⟩ → ½(|10⟩⟨10| + |01⟩⟨01|)
        let mut psi = vec![Complex64::new(0.0, 0.0); 4];
        psi[2] = Complex64::new(1.0, 0.0);
        let s = symmetrize_state(&State::from_vector(n, &psi).unwrap()).unwrap();
        let mut expected = DMatrix::zeros(4, 4);
        expected[(1, 1)] = Complex64::new(0.5, 0.0);
        expected[(2, 2)] = Complex64::new(0.5, 0.0);
        assert!((s.density() - expected).norm() < 1e-15);
        assert!(symmetrize_state(&s).unwrap().distance(&s) < 1e-15);
    }

    #[test]
    fn symmetry_and_evenness_checks() {
        let n = ModeCount::new(3).unwrap();
        assert!(is_symmetric(&product_state(0.2, n).unwrap(), 1e-10));
        assert!(is_even(&product_state(0.2, n).unwrap(), 1e-10));

        let mut r = rng(5);
        let raw = State::from_density(n, random_density(&mut r, n)).unwrap();
        assert!(!is_symmetric(&raw, 1e-6));
        let sym = symmetrize_state(&raw).unwrap();
        assert!(is_symmetric(&sym, 1e-12));

        // (|0⟩ + |1⟩)/√2 on mode 1 mixes parities
        let mut psi = vec![Complex64::new(0.0, 0.0); 8];
        psi[0] = Complex64::new(1.0, 0.0);
        psi[4] = Complex64::new(1.0, 0.0);
        assert!(!is_even(&State::from_vector(n, &psi).unwrap(), 1e-6));
    }

    #[test]
    fn oddness_decay_is_one_over_n() {
        let rows = oddness_decay(
            &[2, 3, 5],
            |ctx| ctx.annihilator(1),
            |ctx| product_state(0.3, ctx.modes()),
        )
        .unwrap();
        for (n, v) in rows {
            assert!(close(v, 1.0 / n as f64, 1e-14), "n = {n}: {v}");
        }
        let err = oddness_decay(
            &[3],
            |ctx| ctx.number(1),
            |ctx| product_state(0.3, ctx.modes()),
        );
        assert!(matches!(err, Err(Error::NotOdd { .. })));
    }

    #[test]
    fn restriction_examples() {
        let n = ModeCount::new(3).unwrap();
        let phi = product_state(0.3, n).unwrap();
        let r1 = restrict(&phi, 1).unwrap();
        assert!((r1.density() - EvenQubitState::new(0.3).unwrap().density()).norm() < 1e-15);
        assert!(restrict(&phi, 3).unwrap().distance(&phi) == 0.0);
        assert!(restrict(&phi, 0).is_err());
        assert!(restrict(&phi, 4).is_err());

        let mut r = rng(8);
        let raw = State::from_density(n, random_density(&mut r, n)).unwrap();
        let sym = symmetrize_state(&raw).unwrap();
        assert!(is_symmetric(&restrict(&sym, 2).unwrap(), 1e-12));
    }

    #[test]
    fn moment_examples() {
        let n = ModeCount::new(4).unwrap();
        let m = occupation_moments(&product_state(0.3, n).unwrap(), 3).unwrap();
        for (got, want) in m.as_slice().iter().zip([1.0, 0.3, 0.09, 0.027]) {
            assert!((got - want).abs() < 1e-15);
        }
        let mix = State::mixture(&[
            (0.5, &product_state(0.2, n).unwrap()),
            (0.5, &product_state(0.8, n).unwrap()),
        ])
        .unwrap();
        let m = occupation_moments(&mix, 2).unwrap();
        for (got, want) in m.as_slice().iter().zip([1.0, 0.5, 0.34]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!(occupation_moments(&mix, 5).is_err());
    }

    #[test]
    fn weak_clustering_example() {
        let ctx = CarContext::build(10).unwrap();
        let proj = SymmetricProjector::new(ctx.modes());
        let phi = product_state(0.5, ctx.modes()).unwrap();
        let e = ctx.matrix_unit(1, 1, 1).unwrap();
        let v = weak_clustering_average(&phi, &proj, &e, &e).unwrap();
        assert!(close(v, 0.275, 1e-13), "{v}");
        let b = ctx.matrix_unit(2, 2, 2).unwrap();
        let v = weak_clustering_average(&phi, &proj, &ctx.identity(), &b).unwrap();
        assert!(close(v, 0.5, 1e-13));
    }

    #[test]
    fn strong_clustering_examples() {
        let ctx = CarContext::build(4).unwrap();
        let n = ctx.modes();
        let phi = product_state(0.3, n).unwrap();
        let e = ctx.matrix_unit(1, 1, 1).unwrap();
        assert!(strong_clustering_check(&phi, &e, &e, 1).unwrap().norm() < 1e-15);
        let a = ctx.annihilator(1).unwrap();
        let ad = ctx.creator(1).unwrap();
        assert!(strong_clustering_check(&phi, &a, &ad, 2).unwrap().norm() < 1e-15);

        let mix = State::mixture(&[
            (0.5, &product_state(0.2, n).unwrap()),
            (0.5, &product_state(0.8, n).unwrap()),
        ])
        .unwrap();
        let gap = strong_clustering_check(&mix, &e, &e, 1).unwrap();
        assert!(close(gap, 0.09, 1e-14), "{gap}");

        let e2 = ctx.matrix_unit(2, 1, 1).unwrap();
        assert!(matches!(
            strong_clustering_check(&phi, &e2, &e, 1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            strong_clustering_check(&phi, &e, &e, 3),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn density_validation() {
        let n = ModeCount::new(1).unwrap();
        let c = |x: f64| Complex64::new(x, 0.0);
        let bad_trace = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5), c(0.6)]));
        assert!(State::from_density(n, bad_trace).is_err());
        let negative = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.5), c(-0.5)]));
        assert!(State::from_density(n, negative).is_err());
        let nonherm = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.0), c(0.5)]);
        assert!(State::from_density(n, nonherm).is_err());
    }
}
