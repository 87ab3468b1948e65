//! The CAR algebra on finitely many modes as concrete matrices.
//!
//! Basis vectors are bitstrings `s ∈ {0,1}^n` ordered lexicographically with
//! mode 1 as the most significant bit, and `|s⟩ = a†_{j_1}⋯a†_{j_k}|vac⟩` with
//! `j_1 < ⋯ < j_k`. The annihilators carry a Jordan–Wigner string of
//! `diag(1, −1)` factors on the modes preceding them, so with this ordering
//! the creation sign is always +1 and the Fock basis coincides with the
//! computational basis of `(ℂ²)^{⊗n}`.
//!
//! Matrix units follow the Jordan–Klein–Wigner recipe
//!
//! ```text
//! U_j = a_j a†_j − a†_j a_j,      V_j = U_1 ⋯ U_j,   V_0 = 1
//! e_11(j) = a_j a†_j,   e_12(j) = V_{j−1} a_j,
//! e_21(j) = V_{j−1} a†_j,   e_22(j) = a†_j a_j
//! ```
//!
//! which makes `e_kl(j)` the elementary matrix `ε_kl` placed at tensor site
//! `j` (index 1 ↔ empty, index 2 ↔ occupied).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::monomial::{IntMatrix, SignedMonomial};
use crate::operator::{mode_bit, occupied, ModeCount, Operator};

/// One letter `(site, k, l)` of a matrix-unit word, all 1-based.
pub type UnitLetter = (usize, usize, usize);

/// Generators, parity and matrix units for `n` modes, built once.
#[derive(Clone, Debug)]
pub struct CarContext {
    n: ModeCount,
    annihilators: Vec<SignedMonomial>,
    parity_signs: Vec<i8>,
    units: Vec<[SignedMonomial; 4]>,
}

impl CarContext {
    pub fn new(n: ModeCount) -> Self {
        let nn = n.get();
        let d = n.dim();
        let annihilators: Vec<SignedMonomial> = (1..=nn)
            .map(|j| {
                let bit = mode_bit(nn, j);
                let cols = (0..d)
                    .map(|b| {
                        if b & bit == 0 {
                            return None;
                        }
                        let before = (1..j).filter(|&i| occupied(nn, b, i)).count();
                        let sign = if before % 2 == 0 { 1 } else { -1 };
                        Some(((b ^ bit) as u32, sign))
                    })
                    .collect();
                SignedMonomial::from_columns(cols)
            })
            .collect();

        let parity_signs = (0..d)
            .map(|b| if b.count_ones() % 2 == 0 { 1 } else { -1 })
            .collect();

        let mut units = Vec::with_capacity(nn);
        let mut string = SignedMonomial::identity(d); // V_{j−1}
        for a in &annihilators {
            let ad = a.adjoint();
            let e11 = a.mul(&ad);
            let e22 = ad.mul(a);
            let e12 = string.mul(a);
            let e21 = string.mul(&ad);
            let u = e11
                .disjoint_sum(&e22.neg())
                .expect("a a† and a† a have disjoint supports");
            string = string.mul(&u);
            units.push([e11, e12, e21, e22]);
        }

        Self {
            n,
            annihilators,
            parity_signs,
            units,
        }
    }

    /// Builds the context for `n` modes, rejecting `n` outside `1..=MAX_MODES`.
    pub fn build(n: usize) -> Result<Self> {
        Ok(Self::new(ModeCount::new(n)?))
    }

    pub fn modes(&self) -> ModeCount {
        self.n
    }

    pub fn n(&self) -> usize {
        self.n.get()
    }

    pub fn dim(&self) -> usize {
        self.n.dim()
    }

    fn check_mode(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.n() {
            return Err(Error::IndexOutOfRange(format!(
                "mode {j} not in 1..={}",
                self.n()
            )));
        }
        Ok(())
    }

    pub fn annihilator_monomial(&self, j: usize) -> Result<&SignedMonomial> {
        self.check_mode(j)?;
        Ok(&self.annihilators[j - 1])
    }

    /// `a_j` as a dense operator.
    pub fn annihilator(&self, j: usize) -> Result<Operator> {
        Ok(Operator::from_monomial(
            self.n,
            self.annihilator_monomial(j)?,
        ))
    }

    /// `a†_j` as a dense operator.
    pub fn creator(&self, j: usize) -> Result<Operator> {
        Ok(Operator::from_monomial(
            self.n,
            &self.annihilator_monomial(j)?.adjoint(),
        ))
    }

    /// `a†_j a_j`.
    pub fn number(&self, j: usize) -> Result<Operator> {
        let a = self.annihilator_monomial(j)?;
        Ok(Operator::from_monomial(self.n, &a.adjoint().mul(a)))
    }

    pub fn identity(&self) -> Operator {
        Operator::identity(self.n)
    }

    /// Diagonal of the parity unitary `P = (−1)^N`.
    pub fn parity_signs(&self) -> &[i8] {
        &self.parity_signs
    }

    pub fn parity_unitary(&self) -> Operator {
        Operator::from_monomial(self.n, &SignedMonomial::diagonal(&self.parity_signs))
    }

    /// Grading automorphism `Θ(A) = P A P`.
    pub fn parity(&self, a: &Operator) -> Result<Operator> {
        a.check_modes(self.n)?;
        let p = &self.parity_signs;
        let d = self.dim();
        let mat = DMatrix::from_fn(d, d, |r, c| {
            let v = a.matrix()[(r, c)];
            if p[r] == p[c] {
                v
            } else {
                -v
            }
        });
        Operator::from_matrix(self.n, mat)
    }

    /// `(A_+, A_−)` with `A_± = (A ± Θ(A)) / 2`.
    pub fn even_odd_split(&self, a: &Operator) -> Result<(Operator, Operator)> {
        a.check_modes(self.n)?;
        let p = &self.parity_signs;
        let d = self.dim();
        let zero = Complex64::new(0.0, 0.0);
        let even = DMatrix::from_fn(d, d, |r, c| {
            if p[r] == p[c] {
                a.matrix()[(r, c)]
            } else {
                zero
            }
        });
        let odd = DMatrix::from_fn(d, d, |r, c| {
            if p[r] != p[c] {
                a.matrix()[(r, c)]
            } else {
                zero
            }
        });
        Ok((
            Operator::from_matrix(self.n, even)?,
            Operator::from_matrix(self.n, odd)?,
        ))
    }

    fn check_unit(&self, j: usize, k: usize, l: usize) -> Result<usize> {
        self.check_mode(j)?;
        if !(1..=2).contains(&k) || !(1..=2).contains(&l) {
            return Err(Error::IndexOutOfRange(format!(
                "matrix unit indices ({k},{l}) must lie in {{1,2}}"
            )));
        }
        Ok(2 * (k - 1) + (l - 1))
    }

    pub fn matrix_unit_monomial(&self, j: usize, k: usize, l: usize) -> Result<&SignedMonomial> {
        let slot = self.check_unit(j, k, l)?;
        Ok(&self.units[j - 1][slot])
    }

    /// Jordan–Klein–Wigner matrix unit `e_kl(j)`.
    pub fn matrix_unit(&self, j: usize, k: usize, l: usize) -> Result<Operator> {
        Ok(Operator::from_monomial(
            self.n,
            self.matrix_unit_monomial(j, k, l)?,
        ))
    }

    fn check_word(&self, word: &[UnitLetter]) -> Result<()> {
        let mut seen = vec![false; self.n() + 1];
        for &(j, k, l) in word {
            self.check_unit(j, k, l)?;
            if seen[j] {
                return Err(Error::RepeatedSite(j));
            }
            seen[j] = true;
        }
        Ok(())
    }

    /// Product `e_{k_1 l_1}(j_1) ⋯ e_{k_r l_r}(j_r)` of matrix units.
    pub fn unit_word(&self, word: &[UnitLetter]) -> Result<SignedMonomial> {
        self.check_word(word)?;
        let mut acc = SignedMonomial::identity(self.dim());
        for &(j, k, l) in word {
            acc = acc.mul(self.matrix_unit_monomial(j, k, l)?);
        }
        Ok(acc)
    }

    /// Pure tensor `ε_{k_1 l_1} ⊗ ⋯` with identities on the unlisted sites.
    pub fn elementary_tensor(&self, word: &[UnitLetter]) -> Result<SignedMonomial> {
        self.check_word(word)?;
        let mut factors: Vec<SignedMonomial> = vec![SignedMonomial::identity(2); self.n()];
        for &(j, k, l) in word {
            let mut cols = vec![None, None];
            cols[l - 1] = Some(((k - 1) as u32, 1));
            factors[j - 1] = SignedMonomial::from_columns(cols);
        }
        Ok(factors
            .iter()
            .skip(1)
            .fold(factors[0].clone(), |acc, f| acc.kron(f)))
    }

    /// Realizes the isomorphism onto `⊗ M_2(ℂ)` on a word of matrix units:
    /// returns the product of the units after checking, in exact integer
    /// arithmetic, that it equals the corresponding pure tensor.
    pub fn gamma_iso(&self, word: &[UnitLetter]) -> Result<Operator> {
        let lhs = self.unit_word(word)?;
        let rhs = self.elementary_tensor(word)?;
        if lhs != rhs {
            let dev = lhs.to_integer().max_abs_diff(&rhs.to_integer());
            return Err(Error::IdentityViolation(format!(
                "matrix-unit word {word:?} differs from its tensor image (max entry deviation {dev})"
            )));
        }
        Ok(Operator::from_monomial(self.n, &lhs))
    }

    /// Unique tracial state `τ(A) = tr(A) / 2^n`.
    pub fn normalized_trace(&self, a: &Operator) -> Result<Complex64> {
        a.check_modes(self.n)?;
        Ok(a.trace() / self.dim() as f64)
    }

    /// Exact check of `{a†_j, a_k} = δ_jk 1` and `{a_j, a_k} = 0` for all
    /// pairs. Returns the largest integer deviation found (0 when exact).
    pub fn car_relation_defect(&self) -> i32 {
        let d = self.dim();
        let mut worst = 0;
        for (j, aj) in self.annihilators.iter().enumerate() {
            let ajd = aj.adjoint();
            for (k, ak) in self.annihilators.iter().enumerate() {
                let mut mixed = IntMatrix::zeros(d);
                mixed.add_monomial(&ajd.mul(ak), 1);
                mixed.add_monomial(&ak.mul(&ajd), 1);
                let target = IntMatrix::scaled_identity(d, i32::from(j == k));
                worst = worst.max(mixed.max_abs_diff(&target));

                let mut pure = IntMatrix::zeros(d);
                pure.add_monomial(&aj.mul(ak), 1);
                pure.add_monomial(&ak.mul(aj), 1);
                worst = worst.max(pure.max_abs_diff(&IntMatrix::zeros(d)));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn single_mode_annihilator() {
        let ctx = CarContext::build(1).unwrap();
        let a = ctx.annihilator(1).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert_eq!(a.matrix(), &expected);
        let p = &a * &ctx.creator(1).unwrap();
        let diag = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert_eq!(p.matrix(), &diag);
    }

    #[test]
    fn two_modes_anticommute_exactly() {
        let ctx = CarContext::build(2).unwrap();
        let a1 = ctx.annihilator(1).unwrap();
        let a2 = ctx.annihilator(2).unwrap();
        let a1d = ctx.creator(1).unwrap();
        let zero = Operator::zeros(ctx.modes());
        assert_eq!(a1.anticommutator(&a2), zero);
        assert_eq!(a1d.anticommutator(&a2), zero);
    }

    #[test]
    fn three_modes_number_anticommutator_is_identity() {
        let ctx = CarContext::build(3).unwrap();
        let a2 = ctx.annihilator(2).unwrap();
        let a2d = ctx.creator(2).unwrap();
        assert_eq!(a2d.anticommutator(&a2), ctx.identity());
    }

    #[test]
    fn car_defect_zero_small_n() {
        for n in 1..=5 {
            assert_eq!(CarContext::build(n).unwrap().car_relation_defect(), 0);
        }
    }

    #[test]
    fn creation_sign_is_positive_in_ordered_basis() {
        // a†_1 a†_3 |vac⟩ = |101⟩ with sign +1
        let ctx = CarContext::build(3).unwrap();
        let v = ctx
            .annihilator_monomial(1)
            .unwrap()
            .adjoint()
            .mul(&ctx.annihilator_monomial(3).unwrap().adjoint());
        assert_eq!(v.column(0), Some((0b101, 1)));
    }

    #[test]
    fn parity_flips_generators() {
        let ctx = CarContext::build(3).unwrap();
        let a1 = ctx.annihilator(1).unwrap();
        assert_eq!(ctx.parity(&a1).unwrap(), -&a1);
        let n1 = ctx.number(1).unwrap();
        assert_eq!(ctx.parity(&n1).unwrap(), n1);
        let p = ctx.parity_unitary();
        assert_eq!(&p * &p, ctx.identity());
        assert_eq!(&(&p * &a1) * &p, -&a1);
    }

    #[test]
    fn even_odd_split_examples() {
        let ctx = CarContext::build(2).unwrap();
        let a1 = ctx.annihilator(1).unwrap();
        let zero = Operator::zeros(ctx.modes());
        assert_eq!(ctx.even_odd_split(&a1).unwrap(), (zero.clone(), a1.clone()));

        let hop = &ctx.creator(1).unwrap() * &ctx.annihilator(2).unwrap();
        assert_eq!(ctx.even_odd_split(&hop).unwrap(), (hop.clone(), zero));

        let n1 = ctx.number(1).unwrap();
        let sum = &a1 + &n1;
        assert_eq!(ctx.even_odd_split(&sum).unwrap(), (n1, a1));
    }

    #[test]
    fn e11_is_a_a_dagger_and_site_local() {
        let ctx = CarContext::build(3).unwrap();
        for j in 1..=3 {
            let e11 = ctx.matrix_unit(j, 1, 1).unwrap();
            let aad = &ctx.annihilator(j).unwrap() * &ctx.creator(j).unwrap();
            assert_eq!(e11, aad);
            let tensor = ctx.elementary_tensor(&[(j, 1, 1)]).unwrap();
            assert_eq!(ctx.matrix_unit_monomial(j, 1, 1).unwrap(), &tensor);
        }
    }

    #[test]
    fn e12_at_site_two_cancels_the_string() {
        let ctx = CarContext::build(2).unwrap();
        let e12 = ctx.matrix_unit(2, 1, 2).unwrap();
        // 1 ⊗ |0⟩⟨1|
        let lowering = SignedMonomial::from_columns(vec![None, Some((0, 1))]);
        let expected = SignedMonomial::identity(2).kron(&lowering);
        assert_eq!(e12, Operator::from_monomial(ctx.modes(), &expected));
        // a_2 itself carries a sign on |1 1⟩
        assert_ne!(ctx.annihilator(2).unwrap(), e12);
    }

    #[test]
    fn unit_adjoint_relation() {
        let ctx = CarContext::build(4).unwrap();
        for j in 1..=4 {
            let e12 = ctx.matrix_unit(j, 1, 2).unwrap();
            assert_eq!(e12.adjoint(), ctx.matrix_unit(j, 2, 1).unwrap());
        }
    }

    #[test]
    fn first_site_e12_is_the_annihilator() {
        let ctx = CarContext::build(3).unwrap();
        assert_eq!(
            ctx.matrix_unit(1, 1, 2).unwrap(),
            ctx.annihilator(1).unwrap()
        );
    }

    #[test]
    fn gamma_iso_examples() {
        let ctx = CarContext::build(2).unwrap();
        let g = ctx.gamma_iso(&[(1, 1, 1), (2, 2, 2)]).unwrap();
        let diag: Vec<Complex64> = [0.0, 1.0, 0.0, 0.0].iter().map(|&x| c(x)).collect();
        assert_eq!(
            g.matrix(),
            &DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))
        );
        assert_eq!(ctx.gamma_iso(&[]).unwrap(), ctx.identity());
    }

    #[test]
    fn gamma_iso_errors() {
        let ctx = CarContext::build(2).unwrap();
        assert_eq!(
            ctx.gamma_iso(&[(1, 1, 1), (1, 2, 2)]),
            Err(Error::RepeatedSite(1))
        );
        assert!(matches!(
            ctx.gamma_iso(&[(3, 1, 1)]),
            Err(Error::IndexOutOfRange(_))
        ));
        assert!(matches!(
            ctx.matrix_unit(1, 3, 1),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn trace_examples() {
        let ctx = CarContext::build(3).unwrap();
        assert_eq!(ctx.normalized_trace(&ctx.identity()).unwrap(), c(1.0));
        assert_eq!(
            ctx.normalized_trace(&ctx.number(1).unwrap()).unwrap(),
            c(0.5)
        );
        assert_eq!(
            ctx.normalized_trace(&ctx.annihilator(1).unwrap()).unwrap(),
            c(0.0)
        );
        let other = CarContext::build(2).unwrap();
        assert!(ctx.normalized_trace(&other.identity()).is_err());
    }
}
