//! Finite-dimensional GNS representations with covariant permutation
//! unitaries.
//!
//! With `D = V P V*` the support decomposition of the density (`V` is
//! `2^n × r`), the map `x ↦ x V P^{1/2}` identifies the GNS space with
//! `2^n × r` matrices under the Hilbert–Schmidt inner product. A vector is
//! stored flat, entry `(b, i)` at index `b·r + i`. In these coordinates
//!
//! * `π(A) X = A X`, i.e. `π(A) = A ⊗ 1_r`,
//! * `Ω = V P^{1/2}`,
//! * `U(g) X = W X M_g` with `W = Γ(g⁻¹)` and `M_g = V* W* V`, which is
//!   unitary exactly when `V` spans a `W*`-invariant subspace.
//!
//! Every `U(g)` commutes with the particle number of the row index, so the
//! projections built here are block diagonal in it.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::car::CarContext;
use crate::commutant::SymmetricProjector;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, min_eigenvalue, orthonormal_span, spectral_norm};
use crate::operator::{ModeCount, Operator};
use crate::perms::{
    all_permutations, alpha, second_quantize, FockUnitary, Permutation, EXHAUSTIVE_CAP,
};
use crate::states::{symmetry_defect, State};

/// Largest GNS dimension for which dense GNS-space matrices are formed.
pub const DENSE_CAP: usize = 1024;
/// Null directions of the density: eigenvalue below this times the largest.
pub const NULL_CUTOFF: f64 = 1e-12;
/// Largest symmetry defect accepted when covariant unitaries are requested.
pub const COVARIANCE_TOL: f64 = 1e-9;
/// Eigenvalue threshold for the null space of `Σ_t (U_t − 1)*(U_t − 1)`.
const FIXED_NULL_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct GnsRep {
    n: ModeCount,
    /// support eigenvalues, renormalized to sum 1
    probs: Vec<f64>,
    /// `2^n × r`, orthonormal columns
    support: DMatrix<Complex64>,
    /// `V P^{1/2}`
    omega: DMatrix<Complex64>,
    parity: Vec<i8>,
    covariant: bool,
}

/// `U(g)` in structured form.
#[derive(Clone, Debug)]
pub struct CovariantUnitary {
    w: FockUnitary,
    /// `r × r`
    m: DMatrix<Complex64>,
}

impl CovariantUnitary {
    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let r = self.m.nrows();
        let d = self.w.target().len();
        let mut x = DMatrix::zeros(d, r);
        for b in 0..d {
            let t = self.w.target()[b] as usize;
            let s = self.w.signs()[b] as f64;
            for i in 0..r {
                x[(t, i)] = v[b * r + i] * s;
            }
        }
        flatten(&(x * &self.m))
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let r = self.m.nrows();
        let d = self.w.target().len();
        let mut u = DMatrix::zeros(d * r, d * r);
        self.accumulate(&mut u, 1.0);
        u
    }

    fn accumulate(&self, acc: &mut DMatrix<Complex64>, scale: f64) {
        let r = self.m.nrows();
        for (b, (&t, &s)) in self.w.target().iter().zip(self.w.signs()).enumerate() {
            let t = t as usize;
            let s = s as f64 * scale;
            for i in 0..r {
                for ip in 0..r {
                    acc[(t * r + ip, b * r + i)] += self.m[(i, ip)] * s;
                }
            }
        }
    }
}

fn gather(m: &DMatrix<Complex64>, idx: &[usize]) -> DMatrix<Complex64> {
    DMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
}

fn scatter(m: &mut DMatrix<Complex64>, idx: &[usize], part: &DMatrix<Complex64>) {
    for (a, &ia) in idx.iter().enumerate() {
        for (b, &ib) in idx.iter().enumerate() {
            m[(ia, ib)] = part[(a, b)];
        }
    }
}

fn flatten(x: &DMatrix<Complex64>) -> DVector<Complex64> {
    let (d, r) = x.shape();
    DVector::from_fn(d * r, |k, _| x[(k / r, k % r)])
}

fn unflatten(v: &DVector<Complex64>, r: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(v.len() / r, r, |b, i| v[b * r + i])
}

/// GNS data of `phi`; with `covariant` the state must be symmetric and
/// `U(g)` is available.
pub fn build_gns(ctx: &CarContext, phi: &State, covariant: bool) -> Result<GnsRep> {
    let n = ctx.modes();
    if phi.modes() != n {
        return Err(Error::DimensionMismatch {
            expected: n.dim(),
            got: phi.modes().dim(),
        });
    }
    if covariant {
        let deviation = symmetry_defect(phi);
        if deviation > COVARIANCE_TOL {
            return Err(Error::NotSymmetric { deviation });
        }
    }
    let eig = hermitian_eigen(phi.density());
    let top = eig.values.last().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..eig.values.len())
        .rev()
        .filter(|&i| eig.values[i] > NULL_CUTOFF * top)
        .collect();
    let total: f64 = keep.iter().map(|&i| eig.values[i]).sum();
    let probs: Vec<f64> = keep.iter().map(|&i| eig.values[i] / total).collect();
    let support = DMatrix::from_fn(n.dim(), keep.len(), |b, k| eig.vectors[(b, keep[k])]);
    let omega = DMatrix::from_fn(n.dim(), keep.len(), |b, k| {
        support[(b, k)] * probs[k].sqrt()
    });
    Ok(GnsRep {
        n,
        probs,
        support,
        omega,
        parity: ctx.parity_signs().to_vec(),
        covariant,
    })
}

/// Outcome of comparing the chain `E_1 ≥ ⋯ ≥ E_n` with the fixed-space
/// projection obtained from a null space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErgodicReport {
    pub n: usize,
    pub dim: usize,
    /// smallest eigenvalue over all `E_k − E_{k+1}`
    pub loewner_min_eigenvalue: f64,
    /// largest entry of `E_k² − E_k` or `E_k − E_k*`
    pub projection_defect: f64,
    /// largest entry of `E_k E_j − E_{max(k, j)}`
    pub nesting_defect: f64,
    /// largest entry of `E_n − P_fixed`
    pub fixed_space_deviation: f64,
    /// `‖E_n Ω − Ω‖`
    pub cyclic_defect: f64,
    pub fixed_space_dim: usize,
    pub max_deviation: f64,
}

impl GnsRep {
    pub fn modes(&self) -> ModeCount {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.probs.len()
    }

    pub fn dim(&self) -> usize {
        self.n.dim() * self.rank()
    }

    pub fn is_covariant(&self) -> bool {
        self.covariant
    }

    pub fn support_probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn cyclic_vector(&self) -> DVector<Complex64> {
        flatten(&self.omega)
    }

    fn check_dense(&self, what: &'static str) -> Result<()> {
        if self.dim() > DENSE_CAP {
            return Err(Error::Capacity {
                what,
                limit: DENSE_CAP,
                got: self.dim(),
                hint: "; use the structured apply_rep / CovariantUnitary::apply",
            });
        }
        Ok(())
    }

    fn check_covariant(&self) -> Result<()> {
        if !self.covariant {
            return Err(Error::Domain(
                "representation was built without covariant unitaries".into(),
            ));
        }
        Ok(())
    }

    /// `π(A) = A ⊗ 1_r` as a dense matrix.
    pub fn rep(&self, a: &Operator) -> Result<DMatrix<Complex64>> {
        a.check_modes(self.n)?;
        self.check_dense("dense GNS representation")?;
        let r = self.rank();
        Ok(a.matrix().kronecker(&DMatrix::identity(r, r)))
    }

    pub fn apply_rep(&self, a: &Operator, v: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        a.check_modes(self.n)?;
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(flatten(&(a.matrix() * unflatten(v, self.rank()))))
    }

    /// `⟨π(A) Ω, Ω⟩`.
    pub fn vector_state(&self, a: &Operator) -> Result<Complex64> {
        a.check_modes(self.n)?;
        let ax = a.matrix() * &self.omega;
        Ok(self.omega.zip_map(&ax, |o, v| o.conj() * v).sum())
    }

    pub fn covariant_unitary(&self, g: &Permutation) -> Result<CovariantUnitary> {
        self.check_covariant()?;
        if g.len() != self.n.get() {
            return Err(Error::DimensionMismatch {
                expected: self.n.get(),
                got: g.len(),
            });
        }
        let w = second_quantize(&g.inverse());
        let w_adj = w.adjoint();
        let r = self.rank();
        let mut wv = DMatrix::zeros(self.n.dim(), r);
        for i in 0..r {
            let col: Vec<Complex64> = self.support.column(i).iter().copied().collect();
            let moved = w_adj.apply_vector(&col);
            wv.set_column(i, &DVector::from_vec(moved));
        }
        let m = self.support.adjoint() * wv;
        let defect = (m.adjoint() * &m - DMatrix::identity(r, r)).camax();
        if defect > 1e-8 {
            return Err(Error::NotSymmetric { deviation: defect });
        }
        Ok(CovariantUnitary { w, m })
    }

    /// `E_k = (1/k!) Σ_{g ∈ S_k} U(g)`, with `S_k` permuting modes `1..=k`.
    pub fn invariant_projection(&self, k: usize) -> Result<DMatrix<Complex64>> {
        self.check_covariant()?;
        let n = self.n.get();
        if k == 0 || k > n {
            return Err(Error::IndexOutOfRange(format!("subgroup S_{k} of S_{n}")));
        }
        if k > EXHAUSTIVE_CAP {
            return Err(Error::capacity(
                "invariant projection subgroup size",
                EXHAUSTIVE_CAP,
                k,
            ));
        }
        self.check_dense("dense invariant projection")?;
        let dim = self.dim();
        let mut e = DMatrix::zeros(dim, dim);
        let mut count = 0usize;
        for g in all_permutations(k) {
            self.covariant_unitary(&g.embed(n))?.accumulate(&mut e, 1.0);
            count += 1;
        }
        Ok(e / Complex64::new(count as f64, 0.0))
    }

    /// Index sets of the particle-number blocks.
    fn blocks(&self) -> Vec<Vec<usize>> {
        let n = self.n.get();
        let r = self.rank();
        let mut out = vec![Vec::new(); n + 1];
        for b in 0..self.n.dim() {
            let k = b.count_ones() as usize;
            out[k].extend((0..r).map(|i| b * r + i));
        }
        out
    }

    /// Projection onto `{ξ : U(t)ξ = ξ}` for all adjacent transpositions
    /// `t`, from the null space of `Σ_t (U(t) − 1)*(U(t) − 1)`.
    pub fn fixed_space_projection_nullspace(&self) -> Result<DMatrix<Complex64>> {
        let blocks = self.blocks();
        let parts = self.fixed_projection_blocks(&blocks)?;
        let dim = self.dim();
        let mut p = DMatrix::zeros(dim, dim);
        for (block, part) in blocks.iter().zip(&parts) {
            scatter(&mut p, block, part);
        }
        Ok(p)
    }

    fn fixed_projection_blocks(&self, blocks: &[Vec<usize>]) -> Result<Vec<DMatrix<Complex64>>> {
        self.check_covariant()?;
        self.check_dense("dense fixed-space projection")?;
        let n = self.n.get();
        let mut k: Vec<DMatrix<Complex64>> = blocks
            .iter()
            .map(|b| DMatrix::zeros(b.len(), b.len()))
            .collect();
        for j in 1..n {
            let u = self
                .covariant_unitary(&Permutation::transposition(n, j, j + 1)?)?
                .to_dense();
            for (block, acc) in blocks.iter().zip(&mut k) {
                let mut sub = gather(&u, block);
                for i in 0..block.len() {
                    sub[(i, i)] -= Complex64::new(1.0, 0.0);
                }
                *acc += sub.adjoint() * sub;
            }
        }
        Ok(k.iter()
            .map(|kb| {
                let eig = hermitian_eigen(kb);
                let mut p = DMatrix::zeros(kb.nrows(), kb.ncols());
                for (col, &val) in eig.values.iter().enumerate() {
                    if val <= FIXED_NULL_TOL {
                        let v = eig.vectors.column(col);
                        p += v * v.adjoint();
                    }
                }
                p
            })
            .collect())
    }

    /// Checks the chain blockwise in the particle number of the row index;
    /// entries outside the blocks count towards `projection_defect`.
    pub fn nested_ergodic_check(&self) -> Result<ErgodicReport> {
        self.check_covariant()?;
        let n = self.n.get();
        let blocks = self.blocks();
        let mut leakage: f64 = 0.0;
        let chain: Vec<Vec<DMatrix<Complex64>>> = (1..=n)
            .map(|k| {
                let e = self.invariant_projection(k)?;
                let parts: Vec<_> = blocks.iter().map(|b| gather(&e, b)).collect();
                let mut rest = e;
                for b in &blocks {
                    scatter(&mut rest, b, &DMatrix::zeros(b.len(), b.len()));
                }
                leakage = leakage.max(rest.camax());
                Ok(parts)
            })
            .collect::<Result<_>>()?;

        let mut loewner_min_eigenvalue: f64 = 0.0;
        for pair in chain.windows(2) {
            for (e, f) in pair[0].iter().zip(&pair[1]) {
                loewner_min_eigenvalue = loewner_min_eigenvalue.min(min_eigenvalue(&(e - f)));
            }
        }

        let mut projection_defect = leakage;
        let mut nesting_defect: f64 = 0.0;
        for (i, e) in chain.iter().enumerate() {
            for eb in e {
                projection_defect = projection_defect
                    .max((eb * eb - eb).camax())
                    .max((eb - eb.adjoint()).camax());
            }
            for f in chain.iter().skip(i + 1) {
                for (eb, fb) in e.iter().zip(f) {
                    nesting_defect = nesting_defect
                        .max((eb * fb - fb).camax())
                        .max((fb * eb - fb).camax());
                }
            }
        }

        let e_n = chain.last().expect("n ≥ 1");
        let fixed = self.fixed_projection_blocks(&blocks)?;
        let mut fixed_space_deviation: f64 = 0.0;
        let mut fixed_trace = 0.0;
        let mut cyclic_sq = 0.0;
        let omega = self.cyclic_vector();
        for ((block, eb), pb) in blocks.iter().zip(e_n).zip(&fixed) {
            fixed_space_deviation = fixed_space_deviation.max((eb - pb).camax());
            fixed_trace += pb.trace().re;
            let w = DVector::from_fn(block.len(), |i, _| omega[block[i]]);
            cyclic_sq += (eb * &w - &w).norm_squared();
        }
        let cyclic_defect = cyclic_sq.sqrt();

        let max_deviation = (-loewner_min_eigenvalue)
            .max(projection_defect)
            .max(nesting_defect)
            .max(fixed_space_deviation)
            .max(cyclic_defect);
        Ok(ErgodicReport {
            n,
            dim: self.dim(),
            loewner_min_eigenvalue,
            projection_defect,
            nesting_defect,
            fixed_space_deviation,
            cyclic_defect,
            fixed_space_dim: fixed_trace.round() as usize,
            max_deviation,
        })
    }

    /// `(1/n!) Σ_g U(g) π(A) U(g)⁻¹`, evaluated as `π` of the orbit
    /// projection of `A`.
    pub fn cesaro_conjugation_average(&self, a: &Operator) -> Result<DMatrix<Complex64>> {
        self.check_covariant()?;
        let projector = SymmetricProjector::new(self.n);
        self.rep(&projector.project(a)?)
    }

    /// The same average by enumerating `S_n` and conjugating dense
    /// matrices.
    pub fn cesaro_conjugation_average_literal(&self, a: &Operator) -> Result<DMatrix<Complex64>> {
        self.check_covariant()?;
        let n = self.n.get();
        if n > EXHAUSTIVE_CAP {
            return Err(Error::capacity(
                "exhaustive Cesàro average",
                EXHAUSTIVE_CAP,
                n,
            ));
        }
        let rep = self.rep(a)?;
        let dim = self.dim();
        let mut acc = DMatrix::zeros(dim, dim);
        let mut count = 0usize;
        for g in all_permutations(n) {
            let u = self.covariant_unitary(&g)?.to_dense();
            acc += &u * &rep * u.adjoint();
            count += 1;
        }
        Ok(acc / Complex64::new(count as f64, 0.0))
    }

    /// Orthonormal basis (columns) of the `S_n`-fixed vectors, spanned by
    /// `π(S_o) Ω` over the live orbit sums `S_o`. Works without dense
    /// GNS-space matrices.
    pub fn fixed_space_basis(&self) -> Result<DMatrix<Complex64>> {
        self.check_covariant()?;
        let projector = SymmetricProjector::new(self.n);
        let orbits = projector.orbit_entries();
        let r = self.rank();
        let dim = self.dim();
        let mut spanning = DMatrix::zeros(dim, orbits.len());
        for (col, (_, entries)) in orbits.iter().enumerate() {
            for &(row, c, s) in entries {
                for i in 0..r {
                    spanning[(row * r + i, col)] += self.omega[(c, i)] * s as f64;
                }
            }
        }
        Ok(orthonormal_span(&spanning, 1e-12))
    }

    pub fn fixed_space_dimension(&self) -> Result<usize> {
        Ok(self.fixed_space_basis()?.ncols())
    }

    /// `B* π(A) B` for the orthonormal fixed basis `B`.
    pub fn fixed_compression(&self, a: &Operator) -> Result<DMatrix<Complex64>> {
        a.check_modes(self.n)?;
        let basis = self.fixed_space_basis()?;
        let r = self.rank();
        let mut image = DMatrix::zeros(basis.nrows(), basis.ncols());
        for c in 0..basis.ncols() {
            let x = unflatten(&basis.column(c).into_owned(), r);
            image.set_column(c, &flatten(&(a.matrix() * x)));
        }
        Ok(basis.adjoint() * image)
    }

    /// `‖E π(A) E‖` for odd `A`, which vanishes as `n → ∞`.
    pub fn ep_odd_compression(&self, a: &Operator) -> Result<f64> {
        a.check_modes(self.n)?;
        let d = self.n.dim();
        let mut even_sq = 0.0;
        for c in 0..d {
            for r in 0..d {
                if self.parity[r] == self.parity[c] {
                    even_sq += a.matrix()[(r, c)].norm_sqr();
                }
            }
        }
        let even_norm = even_sq.sqrt();
        if even_norm > 1e-12 * a.frobenius_norm().max(1.0) {
            return Err(Error::NotOdd { even_norm });
        }
        Ok(spectral_norm(&self.fixed_compression(a)?))
    }

    /// `‖(C − φ(A)) Ω‖` with `C` the Cesàro average of `π(A)`. For product
    /// states and one-site `A` its square is the variance `Var(A)/n`.
    pub fn cesaro_scalar_deviation(&self, a: &Operator) -> Result<f64> {
        self.check_covariant()?;
        let projector = SymmetricProjector::new(self.n);
        let sym = projector.project(a)?;
        let value = self.vector_state(a)?;
        let moved = sym.matrix() * &self.omega - &self.omega * value;
        Ok(moved.norm())
    }

    /// `|⟨U(g_m) π(A) U(g_m)⁻¹ π(B) Ω, π(C) Ω⟩ − φ(A) φ(C* B)|`, the matrix
    /// element of the stage-`m` conjugation against its scalar limit.
    pub fn stage_conjugation_defect(
        &self,
        a: &Operator,
        b: &Operator,
        c: &Operator,
        m: usize,
    ) -> Result<f64> {
        let g = crate::perms::mixing_permutation(m, self.n.get())?;
        let u = self.covariant_unitary(&g)?;
        let u_inv = self.covariant_unitary(&g.inverse())?;
        let omega = self.cyclic_vector();
        let bo = self.apply_rep(b, &omega)?;
        let co = self.apply_rep(c, &omega)?;
        let lhs_vec = u.apply(&self.apply_rep(a, &u_inv.apply(&bo))?);
        let lhs = co.dotc(&lhs_vec);
        let rhs = self.vector_state(a)? * self.vector_state(&(&c.adjoint() * b))?;
        Ok((lhs - rhs).norm())
    }
}

/// `α_g` realized on the GNS space: `U(g) π(A) U(g)⁻¹ − π(α_g(A))`, largest
/// entry.
pub fn covariance_defect(gns: &GnsRep, g: &Permutation, a: &Operator) -> Result<f64> {
    let u = gns.covariant_unitary(g)?.to_dense();
    let lhs = &u * gns.rep(a)? * u.adjoint();
    let rhs = gns.rep(&alpha(g, a)?)?;
    Ok((lhs - rhs).camax())
}
