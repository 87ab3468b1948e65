//! Mixing measures of symmetric states.
//!
//! A symmetric even state is, up to finite-size effects, a mixture
//! `∫ φ_μ dν(μ)` of product states, and its occupation moments are the power
//! moments of `ν`. Recovery discretizes `[0, 1]` and solves the truncated
//! Hausdorff problem as a nonnegative least-squares fit whose first row is
//! the normalization `Σ w = 1`. At finite truncation the representing
//! measure is generally not unique; the solver returns the NNLS solution and
//! its residual.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::car::CarContext;
use crate::commutant::SymmetricProjector;
use crate::error::{Error, Result};
use crate::linalg::min_eigenvalue;
use crate::nnls::{nnls, NnlsOptions};
use crate::operator::ModeCount;
use crate::random::{random_hermitian, rng};
use crate::states::{occupation_moments, product_state, symmetry_defect, MomentVector, State};

/// Weight below which atoms are dropped.
pub const PRUNE_WEIGHT: f64 = 1e-9;
pub const DEFAULT_GRID: usize = 1001;
/// Relative weight of the normalization row in the least-squares system.
const NORMALIZATION_ROW_WEIGHT: f64 = 10.0;
const POLISH_ITERATIONS: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub mu: f64,
    pub weight: f64,
}

/// Finitely supported probability measure on `[0, 1]`, atoms sorted by `μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixingMeasure {
    atoms: Vec<Atom>,
}

impl MixingMeasure {
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        for a in &atoms {
            if !(0.0..=1.0).contains(&a.mu) {
                return Err(Error::InvalidMeasure(format!(
                    "atom at μ = {} outside [0, 1]",
                    a.mu
                )));
            }
            if a.weight.is_nan() || a.weight < 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "negative weight {}",
                    a.weight
                )));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        atoms.sort_by(|a, b| a.mu.total_cmp(&b.mu));
        Ok(Self { atoms })
    }

    pub fn dirac(mu: f64) -> Result<Self> {
        Self::new(vec![Atom { mu, weight: 1.0 }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// `∫ μ^k dν` for `k = 0..=max_order`.
    pub fn moments(&self, max_order: usize) -> MomentVector {
        MomentVector(
            (0..=max_order)
                .map(|k| {
                    self.atoms
                        .iter()
                        .map(|a| a.weight * a.mu.powi(k as i32))
                        .sum()
                })
                .collect(),
        )
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.mu <= x)
            .map(|a| a.weight)
            .sum()
    }

    /// Lévy distance between the two distribution functions, evaluated by
    /// bisection on `ε` over the union of atom locations.
    pub fn levy_distance(&self, other: &MixingMeasure) -> f64 {
        let points: Vec<f64> = self
            .atoms
            .iter()
            .chain(&other.atoms)
            .map(|a| a.mu)
            .collect();
        let ok = |eps: f64| {
            let check = |f: &MixingMeasure, g: &MixingMeasure, x: f64| {
                f.cdf(x - eps) - eps <= g.cdf(x) + 1e-15 && g.cdf(x) <= f.cdf(x + eps) + eps + 1e-15
            };
            // both CDFs are step functions; probing at and just below the
            // jump points covers every extremal x
            points.iter().all(|&p| {
                [
                    p,
                    p - 1e-12,
                    p + eps,
                    p - eps,
                    p + eps - 1e-12,
                    p - eps - 1e-12,
                ]
                .iter()
                .all(|&x| check(self, other, x) && check(other, self, x))
            })
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

impl std::str::FromStr for MixingMeasure {
    type Err = Error;

    /// `mu:weight,mu:weight,...`
    fn from_str(s: &str) -> Result<Self> {
        let atoms = s
            .split(',')
            .map(|item| {
                let (mu, weight) = item.split_once(':').ok_or_else(|| {
                    Error::InvalidMeasure(format!("atom {item:?} is not mu:weight"))
                })?;
                let parse = |x: &str| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::InvalidMeasure(format!("atom {item:?}: {e}")))
                };
                Ok(Atom {
                    mu: parse(mu)?,
                    weight: parse(weight)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms)
    }
}

/// One positivity condition of the truncated Hausdorff moment problem.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HankelCondition {
    pub name: String,
    pub min_eigenvalue: f64,
}

fn hankel(m: &[f64], size: usize, entry: impl Fn(&[f64], usize) -> f64) -> DMatrix<Complex64> {
    DMatrix::from_fn(size, size, |i, j| Complex64::new(entry(m, i + j), 0.0))
}

/// Positivity of `[m_{i+j}]`, `[m_{i+j+1} − m_{i+j+2}]` (even order) or
/// `[m_{i+j+1}]`, `[m_{i+j} − m_{i+j+1}]` (odd order). These characterize
/// moment sequences of measures on `[0, 1]`.
pub fn hausdorff_conditions(moments: &[f64]) -> Vec<HankelCondition> {
    let order = moments.len().saturating_sub(1);
    let mut out = Vec::new();
    let mut push = |name: String, mat: DMatrix<Complex64>| {
        if mat.nrows() > 0 {
            out.push(HankelCondition {
                name,
                min_eigenvalue: min_eigenvalue(&mat),
            });
        }
    };
    if order.is_multiple_of(2) {
        let s = order / 2 + 1;
        push(
            format!("H[m_(i+j)] {s}x{s}"),
            hankel(moments, s, |m, k| m[k]),
        );
        let s = order / 2;
        push(
            format!("H[m_(i+j+1) - m_(i+j+2)] {s}x{s}"),
            hankel(moments, s, |m, k| m[k + 1] - m[k + 2]),
        );
    } else {
        let s = order.div_ceil(2);
        push(
            format!("H[m_(i+j+1)] {s}x{s}"),
            hankel(moments, s, |m, k| m[k + 1]),
        );
        push(
            format!("H[m_(i+j) - m_(i+j+1)] {s}x{s}"),
            hankel(moments, s, |m, k| m[k] - m[k + 1]),
        );
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct RecoveryOptions {
    pub grid_size: usize,
    /// Largest acceptable moment residual and Hankel violation.
    pub tol: f64,
    /// Optional ridge penalty on the grid weights.
    pub ridge: f64,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        Self {
            grid_size: DEFAULT_GRID,
            tol: 1e-8,
            ridge: 0.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MeasureRecovery {
    pub measure: MixingMeasure,
    /// `‖moments(measure) − input‖₂` after pruning and merging.
    pub residual: f64,
    /// Residual of the raw grid solution.
    pub grid_residual: f64,
    pub conditions: Vec<HankelCondition>,
}

pub fn recover_measure(
    moments: &MomentVector,
    grid_size: usize,
    tol: f64,
) -> Result<MeasureRecovery> {
    recover_measure_with(
        moments,
        RecoveryOptions {
            grid_size,
            tol,
            ..RecoveryOptions::default()
        },
    )
}

pub fn recover_measure_with(
    moments: &MomentVector,
    opts: RecoveryOptions,
) -> Result<MeasureRecovery> {
    let m = moments.as_slice();
    if m.is_empty() {
        return Err(Error::Domain("empty moment vector".into()));
    }
    if (m[0] - 1.0).abs() > opts.tol.max(1e-12) {
        return Err(Error::Domain(format!("m_0 = {} but must be 1", m[0])));
    }
    if opts.grid_size < 2 {
        return Err(Error::Domain("grid needs at least two points".into()));
    }
    let g = opts.grid_size;
    let rows = m.len();
    let step = 1.0 / (g - 1) as f64;
    let grid: Vec<f64> = (0..g).map(|j| j as f64 * step).collect();

    let ridge_rows = if opts.ridge > 0.0 { g } else { 0 };
    let mut a = DMatrix::zeros(rows + ridge_rows, g);
    let mut b = DVector::zeros(rows + ridge_rows);
    // Rows use the shifted Chebyshev basis T_k(2μ − 1) instead of μ^k: the
    // same linear system, far better conditioned on nearby grid columns.
    let coeffs = shifted_chebyshev(rows);
    for (j, &mu) in grid.iter().enumerate() {
        let x = 2.0 * mu - 1.0;
        let (mut prev, mut cur) = (1.0, x);
        for k in 0..rows {
            a[(k, j)] = match k {
                0 => 1.0,
                1 => x,
                _ => {
                    let next = 2.0 * x * cur - prev;
                    (prev, cur) = (cur, next);
                    next
                }
            };
        }
        a[(0, j)] *= NORMALIZATION_ROW_WEIGHT;
        if ridge_rows > 0 {
            a[(rows + j, j)] = opts.ridge.sqrt();
        }
    }
    for k in 0..rows {
        b[k] = coeffs[k].iter().zip(m).map(|(c, mk)| c * mk).sum();
    }
    b[0] *= NORMALIZATION_ROW_WEIGHT;

    let sol = nnls(
        &a,
        &b,
        NnlsOptions {
            tolerance: Some(1e-15),
            max_iterations: 0,
        },
    );
    let total: f64 = sol.x.iter().sum();
    if total <= 0.0 {
        return Err(infeasible(m, f64::INFINITY));
    }
    let weights: Vec<f64> = sol.x.iter().map(|w| w / total).collect();
    let grid_residual = moment_residual(&grid, &weights, m);

    // Nearly collinear grid columns let NNLS stop with an atom split across
    // nearby points, so the merged grid solution is refined continuously.
    // Merging can also fuse two genuine neighbouring atoms; the unmerged
    // solution stays a candidate. Preference: residual within `tol`, then
    // fewest atoms, then smallest residual.
    let merged = merge_atoms(&grid, &weights)?;
    let raw: Vec<Atom> = grid
        .iter()
        .zip(&weights)
        .filter(|(_, &w)| w >= PRUNE_WEIGHT)
        .map(|(&mu, &weight)| Atom { mu, weight })
        .collect();
    let refined_merged = polish(merge_close(polish(merged.atoms.clone(), m), step), m);
    let refined_raw = polish(raw.clone(), m);
    let (measure, residual) = [merged.atoms.clone(), refined_merged, raw, refined_raw]
        .into_iter()
        .filter_map(|atoms| MixingMeasure::new(atoms).ok())
        .map(|candidate| {
            let r = measure_residual(&candidate, m);
            (candidate, r)
        })
        .min_by(|(a, ra), (b, rb)| {
            let key = |atoms: usize, r: f64| (r > opts.tol, if r > opts.tol { 0 } else { atoms });
            key(a.atoms.len(), *ra)
                .cmp(&key(b.atoms.len(), *rb))
                .then(ra.total_cmp(rb))
        })
        .ok_or_else(|| infeasible(m, grid_residual))?;

    let conditions = hausdorff_conditions(m);
    let violated = conditions.iter().any(|c| c.min_eigenvalue < -opts.tol);
    if residual > opts.tol || violated {
        return Err(infeasible(m, residual));
    }
    Ok(MeasureRecovery {
        measure,
        residual,
        grid_residual,
        conditions,
    })
}

/// Monomial coefficients of `T_k(2x − 1)` for `k < rows`.
fn shifted_chebyshev(rows: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(rows);
    for k in 0..rows {
        let mut c = vec![0.0; rows];
        match k {
            0 => c[0] = 1.0,
            1 => {
                c[0] = -1.0;
                c[1] = 2.0;
            }
            _ => {
                // T_{k} = 2(2x − 1) T_{k−1} − T_{k−2}
                for i in 0..rows {
                    let shifted = if i > 0 { 4.0 * out[k - 1][i - 1] } else { 0.0 };
                    c[i] = shifted - 2.0 * out[k - 1][i] - out[k - 2][i];
                }
            }
        }
        out.push(c);
    }
    out
}

fn infeasible(m: &[f64], residual: f64) -> Error {
    let worst = hausdorff_conditions(m)
        .into_iter()
        .min_by(|a, b| a.min_eigenvalue.total_cmp(&b.min_eigenvalue));
    match worst {
        Some(c) => Error::InfeasibleMoments {
            residual,
            condition: c.name,
            min_eigenvalue: c.min_eigenvalue,
        },
        None => Error::InfeasibleMoments {
            residual,
            condition: "none".into(),
            min_eigenvalue: 0.0,
        },
    }
}

fn measure_residual(measure: &MixingMeasure, m: &[f64]) -> f64 {
    let fitted = measure.moments(m.len() - 1);
    fitted
        .as_slice()
        .iter()
        .zip(m)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn weighted_misfit(atoms: &[Atom], m: &[f64]) -> DVector<f64> {
    DVector::from_fn(m.len(), |k, _| {
        let fit: f64 = atoms.iter().map(|a| a.weight * a.mu.powi(k as i32)).sum();
        let scale = if k == 0 {
            NORMALIZATION_ROW_WEIGHT
        } else {
            1.0
        };
        scale * (fit - m[k])
    })
}

/// Levenberg–Marquardt on atom positions and weights, kept inside
/// `[0, 1] × [0, ∞)`, weights renormalized to sum 1 on exit.
fn polish(mut atoms: Vec<Atom>, m: &[f64]) -> Vec<Atom> {
    let p = atoms.len();
    if p == 0 {
        return atoms;
    }
    let mut lambda = 1e-6;
    let mut cost = weighted_misfit(&atoms, m).norm_squared();
    for _ in 0..POLISH_ITERATIONS {
        if cost < 1e-32 {
            break;
        }
        let r = weighted_misfit(&atoms, m);
        // columns: ∂/∂w_i then ∂/∂μ_i
        let jac = DMatrix::from_fn(m.len(), 2 * p, |k, c| {
            let scale = if k == 0 {
                NORMALIZATION_ROW_WEIGHT
            } else {
                1.0
            };
            let a = atoms[c % p];
            let v = if c < p {
                a.mu.powi(k as i32)
            } else if k == 0 {
                0.0
            } else {
                a.weight * k as f64 * a.mu.powi(k as i32 - 1)
            };
            scale * v
        });
        let jt = jac.transpose();
        let normal = &jt * &jac;
        let grad = &jt * &r;
        let mut improved = false;
        for _ in 0..30 {
            let mut damped = normal.clone();
            for i in 0..2 * p {
                damped[(i, i)] += lambda * (1.0 + normal[(i, i)]);
            }
            let Some(delta) = damped.lu().solve(&(-&grad)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<Atom> = atoms
                .iter()
                .enumerate()
                .map(|(i, a)| Atom {
                    weight: (a.weight + delta[i]).max(0.0),
                    mu: (a.mu + delta[p + i]).clamp(0.0, 1.0),
                })
                .collect();
            let trial_cost = weighted_misfit(&trial, m).norm_squared();
            if trial_cost < cost {
                atoms = trial;
                cost = trial_cost;
                lambda = (lambda * 0.3).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    atoms.retain(|a| a.weight >= PRUNE_WEIGHT);
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    for a in &mut atoms {
        a.weight /= total;
    }
    atoms
}

/// Merges atoms (sorted by `μ`) closer than `gap` at their weighted mean.
fn merge_close(mut atoms: Vec<Atom>, gap: f64) -> Vec<Atom> {
    atoms.sort_by(|a, b| a.mu.total_cmp(&b.mu));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some(last) if a.mu - last.mu < gap => {
                let total = last.weight + a.weight;
                last.mu = (last.mu * last.weight + a.mu * a.weight) / total;
                last.weight = total;
            }
            _ => out.push(a),
        }
    }
    out
}

fn moment_residual(grid: &[f64], weights: &[f64], m: &[f64]) -> f64 {
    m.iter()
        .enumerate()
        .map(|(k, &mk)| {
            let fit: f64 = grid
                .iter()
                .zip(weights)
                .map(|(mu, w)| w * mu.powi(k as i32))
                .sum();
            (fit - mk).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// Prunes tiny weights and merges runs of adjacent grid points into one atom
/// at their weighted mean.
fn merge_atoms(grid: &[f64], weights: &[f64]) -> Result<MixingMeasure> {
    let mut atoms: Vec<Atom> = Vec::new();
    let mut last_index: Option<usize> = None;
    for (j, (&mu, &w)) in grid.iter().zip(weights).enumerate() {
        if w < PRUNE_WEIGHT {
            continue;
        }
        match (last_index, atoms.last_mut()) {
            (Some(prev), Some(atom)) if j == prev + 1 => {
                let total = atom.weight + w;
                atom.mu = (atom.mu * atom.weight + mu * w) / total;
                atom.weight = total;
            }
            _ => atoms.push(Atom { mu, weight: w }),
        }
        last_index = Some(j);
    }
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    for a in &mut atoms {
        a.weight /= total;
    }
    MixingMeasure::new(atoms)
}

/// `Σ_j w_j φ_{μ_j}` on `n` modes.
pub fn reconstruct_state(measure: &MixingMeasure, n: ModeCount) -> Result<State> {
    let parts: Vec<(f64, State)> = measure
        .atoms
        .iter()
        .map(|a| Ok((a.weight, product_state(a.mu, n)?)))
        .collect::<Result<_>>()?;
    let total: f64 = parts.iter().map(|p| p.0).sum();
    let refs: Vec<(f64, &State)> = parts.iter().map(|(w, s)| (w / total, s)).collect();
    State::mixture(&refs)
}

#[derive(Clone, Copy, Debug)]
pub struct DecomposeOptions {
    pub recovery: RecoveryOptions,
    /// Largest tolerated symmetry defect of the input.
    pub symmetry_tol: f64,
    /// Number of random symmetrized even observables in the battery.
    pub observables: usize,
    pub seed: u64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            recovery: RecoveryOptions::default(),
            symmetry_tol: 1e-9,
            observables: 50,
            seed: 42,
        }
    }
}

/// Largest `|φ(X) − ψ(X)|` over each family of test observables.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatteryReport {
    pub occupation_products: f64,
    pub two_site_words: f64,
    pub symmetrized_observables: f64,
    pub max: f64,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub measure: MixingMeasure,
    pub residual: f64,
    pub moments: MomentVector,
    pub battery: BatteryReport,
    pub symmetry_defect: f64,
}

/// Moments → measure → reconstruction, with a battery comparing the
/// reconstruction against the input.
pub fn decompose_state(phi: &State, opts: DecomposeOptions) -> Result<Decomposition> {
    let deviation = symmetry_defect(phi);
    if deviation > opts.symmetry_tol {
        return Err(Error::NotSymmetric { deviation });
    }
    let n = phi.modes();
    let moments = occupation_moments(phi, n.get())?;
    let recovery = recover_measure_with(&moments, opts.recovery)?;
    let psi = reconstruct_state(&recovery.measure, n)?;
    let battery = battery(phi, &psi, opts.observables, opts.seed)?;
    Ok(Decomposition {
        measure: recovery.measure,
        residual: recovery.residual,
        moments,
        battery,
        symmetry_defect: deviation,
    })
}

/// Compares two states on occupation products, two-site matrix-unit words
/// and random symmetrized even observables of unit Frobenius norm.
pub fn battery(phi: &State, psi: &State, observables: usize, seed: u64) -> Result<BatteryReport> {
    let n = phi.modes();
    if psi.modes() != n {
        return Err(Error::DimensionMismatch {
            expected: n.dim(),
            got: psi.modes().dim(),
        });
    }
    let nn = n.get();
    let d = n.dim();
    let delta = phi.density() - psi.density();

    let mut occupation_products: f64 = 0.0;
    for subset in 0..d {
        // e_11 on every mode in `subset`: basis states empty there
        let v: Complex64 = (0..d)
            .filter(|b| b & subset == 0)
            .map(|b| delta[(b, b)])
            .sum();
        occupation_products = occupation_products.max(v.norm());
    }

    let ctx = CarContext::new(n);
    let mut two_site_words: f64 = 0.0;
    for i in 1..=nn {
        for j in (i + 1)..=nn {
            for k in 1..=2 {
                for l in 1..=2 {
                    for p in 1..=2 {
                        for q in 1..=2 {
                            let x = ctx.elementary_tensor(&[(i, k, l), (j, p, q)])?;
                            let mut v = Complex64::new(0.0, 0.0);
                            for c in 0..d {
                                if let Some((r, s)) = x.column(c) {
                                    v += delta[(c, r)] * s as f64;
                                }
                            }
                            two_site_words = two_site_words.max(v.norm());
                        }
                    }
                }
            }
        }
    }

    let projector = SymmetricProjector::new(n);
    let mut r = rng(seed);
    let mut symmetrized_observables: f64 = 0.0;
    for _ in 0..observables {
        let h = random_hermitian(&mut r, n);
        let (even, _) = ctx.even_odd_split(&h)?;
        let x = projector.project(&even)?;
        let norm = x.frobenius_norm();
        if norm == 0.0 {
            continue;
        }
        let mut v = Complex64::new(0.0, 0.0);
        for a in 0..d {
            for b in 0..d {
                v += delta[(a, b)] * x.matrix()[(b, a)];
            }
        }
        symmetrized_observables = symmetrized_observables.max(v.norm() / norm);
    }

    let max = occupation_products
        .max(two_site_words)
        .max(symmetrized_observables);
    Ok(BatteryReport {
        occupation_products,
        two_site_words,
        symmetrized_observables,
        max,
    })
}

/// Factor type of the GNS representation of a product state `φ_μ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FactorType {
    IInfinity,
    II1,
    IIILambda { lambda: f64 },
}

impl FactorType {
    pub fn tag(&self) -> &'static str {
        match self {
            FactorType::IInfinity => "I_infinity",
            FactorType::II1 => "II_1",
            FactorType::IIILambda { .. } => "III_lambda",
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        match self {
            FactorType::IIILambda { lambda } => Some(*lambda),
            _ => None,
        }
    }
}

impl fmt::Display for FactorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorType::IIILambda { lambda } => write!(f, "III_lambda lambda={lambda:.12}"),
            other => f.write_str(other.tag()),
        }
    }
}

pub fn classify_type(mu: f64) -> Result<FactorType> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Domain(format!("μ = {mu} not in [0, 1]")));
    }
    Ok(if mu == 0.0 || mu == 1.0 {
        FactorType::IInfinity
    } else if (mu - 0.5).abs() <= 1e-12 {
        FactorType::II1
    } else if mu < 0.5 {
        FactorType::IIILambda {
            lambda: mu / (1.0 - mu),
        }
    } else {
        FactorType::IIILambda {
            lambda: (1.0 - mu) / mu,
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioSpectrum {
    /// distinct eigenvalues of the product density, ascending
    pub eigenvalues: Vec<f64>,
    /// `eigenvalues[i] / eigenvalues[i + 1]`
    pub ratios: Vec<f64>,
}

/// Distinct eigenvalues `μ^k (1−μ)^{n−k}` of `φ_μ`'s density and their
/// consecutive ratios, all equal to the `III_λ` parameter.
pub fn eigenvalue_ratio_spectrum(mu: f64, n: ModeCount) -> Result<RatioSpectrum> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Domain(format!("μ = {mu} not in [0, 1]")));
    }
    if mu == 0.0 || mu == 1.0 {
        return Err(Error::Degenerate(format!(
            "μ = {mu} gives a pure product state with a single nonzero eigenvalue"
        )));
    }
    let phi = product_state(mu, n)?;
    let mut values: Vec<f64> = phi.density().diagonal().iter().map(|z| z.re).collect();
    values.sort_by(f64::total_cmp);
    let mut eigenvalues: Vec<f64> = Vec::new();
    for v in values {
        match eigenvalues.last() {
            Some(&last) if (v - last).abs() <= 1e-12 * v.abs().max(last.abs()) => {}
            _ => eigenvalues.push(v),
        }
    }
    let ratios = eigenvalues.windows(2).map(|w| w[0] / w[1]).collect();
    Ok(RatioSpectrum {
        eigenvalues,
        ratios,
    })
}
