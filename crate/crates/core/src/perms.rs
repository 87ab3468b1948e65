//! Mode permutations and their second quantization.
//!
//! `Γ(g)` is a genuine representation, `Γ(g) a_j Γ(g)* = a_{g(j)}`, and the
//! Bogoliubov action is `α_g = Ad Γ(g⁻¹)`, so that `α_g(a_j) = a_{g⁻¹(j)}`.

use std::fmt;

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::monomial::SignedMonomial;
use crate::operator::{ModeCount, Operator};

/// Largest `n` for which full `S_n` averages are enumerated.
pub const EXHAUSTIVE_CAP: usize = 8;

/// A bijection of `{1..n}`, stored 0-based.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
        }
    }

    /// From 1-based images: `images[j−1] = g(j)`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let zero: Vec<usize> = images
            .iter()
            .map(|&x| {
                x.checked_sub(1)
                    .ok_or_else(|| Error::Domain("images are 1-based".into()))
            })
            .collect::<Result<_>>()?;
        Self::from_zero_based(zero)
    }

    pub fn from_zero_based(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &x in &image {
            if x >= n || seen[x] {
                return Err(Error::Domain(format!("{image:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Self { image })
    }

    /// Transposition of the 1-based modes `i` and `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::IndexOutOfRange(format!(
                "transposition ({i} {j}) outside 1..={n}"
            )));
        }
        let mut image: Vec<usize> = (0..n).collect();
        image.swap(i - 1, j - 1);
        Ok(Self { image })
    }

    /// Cycle `c_1 → c_2 → ⋯ → c_r → c_1` on 1-based modes.
    pub fn cycle(n: usize, cycle: &[usize]) -> Result<Self> {
        let mut image: Vec<usize> = (0..n).collect();
        for (&from, &to) in cycle.iter().zip(cycle.iter().cycle().skip(1)) {
            if from == 0 || from > n || to == 0 || to > n {
                return Err(Error::IndexOutOfRange(format!(
                    "cycle {cycle:?} outside 1..={n}"
                )));
            }
            image[from - 1] = to - 1;
        }
        Self::from_zero_based(image)
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    /// `g(j)` for 1-based `j`.
    pub fn apply(&self, j: usize) -> usize {
        self.image[j - 1] + 1
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    /// `self ∘ other`, i.e. `j ↦ self(other(j))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation {
            image: other.image.iter().map(|&x| self.image[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0; self.len()];
        for (j, &gj) in self.image.iter().enumerate() {
            image[gj] = j;
        }
        Permutation { image }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(j, &g)| j == g)
    }

    /// Extends to `n ≥ len` modes by fixing the extra ones.
    pub fn embed(&self, n: usize) -> Permutation {
        assert!(n >= self.len());
        let mut image = self.image.clone();
        image.extend(self.len()..n);
        Permutation { image }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one: Vec<usize> = self.image.iter().map(|x| x + 1).collect();
        write!(f, "Permutation{one:?}")
    }
}

/// Every permutation of `{1..n}` in lexicographic order of image lists.
pub fn all_permutations(n: usize) -> impl Iterator<Item = Permutation> {
    (0..n).permutations(n).map(|image| Permutation { image })
}

/// Second-quantized permutation unitary, a signed permutation matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockUnitary {
    n: ModeCount,
    target: Vec<u32>,
    sign: Vec<i8>,
}

impl FockUnitary {
    pub fn modes(&self) -> ModeCount {
        self.n
    }

    /// Row index of the nonzero entry in column `b`.
    pub fn target(&self) -> &[u32] {
        &self.target
    }

    pub fn signs(&self) -> &[i8] {
        &self.sign
    }

    pub fn to_monomial(&self) -> SignedMonomial {
        SignedMonomial::from_columns(
            self.target
                .iter()
                .zip(&self.sign)
                .map(|(&t, &s)| Some((t, s)))
                .collect(),
        )
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        self.to_monomial().to_dense()
    }

    pub fn adjoint(&self) -> FockUnitary {
        let d = self.target.len();
        let mut target = vec![0; d];
        let mut sign = vec![0; d];
        for b in 0..d {
            let t = self.target[b] as usize;
            target[t] = b as u32;
            sign[t] = self.sign[b];
        }
        FockUnitary {
            n: self.n,
            target,
            sign,
        }
    }

    /// `W v` for a vector `v`.
    pub fn apply_vector(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (b, &x) in v.iter().enumerate() {
            out[self.target[b] as usize] = x * self.sign[b] as f64;
        }
        out
    }

    /// `W X W*` in `O(4^n)`.
    pub fn conjugate_matrix(&self, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let d = self.target.len();
        let mut out = DMatrix::zeros(d, d);
        for c in 0..d {
            let tc = self.target[c] as usize;
            let sc = self.sign[c];
            for r in 0..d {
                let tr = self.target[r] as usize;
                let v = x[(r, c)];
                out[(tr, tc)] = if self.sign[r] == sc { v } else { -v };
            }
        }
        out
    }

    /// `acc += W X W*`.
    pub(crate) fn conjugate_accumulate(
        &self,
        x: &DMatrix<Complex64>,
        acc: &mut DMatrix<Complex64>,
    ) {
        let d = self.target.len();
        for c in 0..d {
            let tc = self.target[c] as usize;
            let sc = self.sign[c];
            for r in 0..d {
                let tr = self.target[r] as usize;
                let v = x[(r, c)];
                acc[(tr, tc)] += if self.sign[r] == sc { v } else { -v };
            }
        }
    }

    pub fn conjugate(&self, a: &Operator) -> Result<Operator> {
        a.check_modes(self.n)?;
        Operator::from_matrix(self.n, self.conjugate_matrix(a.matrix()))
    }
}

/// Sign picked up by `|s⟩` under `Γ(g)`: the parity of the permutation
/// sorting `(g(j_1), …, g(j_k))` for the occupied `j_1 < ⋯ < j_k`.
pub(crate) fn occupation_sign(n: usize, images: &[usize], b: usize) -> (usize, i8) {
    let mut seen: u32 = 0;
    let mut inversions = 0u32;
    let mut out = 0usize;
    for (j, &g) in images.iter().enumerate().take(n) {
        if (b >> (n - 1 - j)) & 1 == 1 {
            let gj = g as u32;
            // earlier occupied modes landing above g(j)
            inversions += (seen >> (gj + 1)).count_ones();
            seen |= 1 << gj;
            out |= 1 << (n - 1 - gj as usize);
        }
    }
    (out, if inversions.is_multiple_of(2) { 1 } else { -1 })
}

/// `Γ(g)` with `Γ(g)|s⟩ = sgn · |g·s⟩`.
pub fn second_quantize(g: &Permutation) -> FockUnitary {
    let n = ModeCount::new(g.len()).expect("permutation length must be a valid mode count");
    let nn = n.get();
    let d = n.dim();
    let mut target = Vec::with_capacity(d);
    let mut sign = Vec::with_capacity(d);
    for b in 0..d {
        let (t, s) = occupation_sign(nn, &g.image, b);
        target.push(t as u32);
        sign.push(s);
    }
    FockUnitary { n, target, sign }
}

/// Bogoliubov action `α_g(A) = Γ(g⁻¹) A Γ(g⁻¹)*`.
pub fn alpha(g: &Permutation, a: &Operator) -> Result<Operator> {
    if g.len() != a.modes().get() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: 1 << g.len(),
        });
    }
    second_quantize(&g.inverse()).conjugate(a)
}

/// `(1/n!) Σ_{g ∈ S_n} α_g(A)` by full enumeration (`n ≤ EXHAUSTIVE_CAP`).
pub fn symmetrize_operator(a: &Operator) -> Result<Operator> {
    let n = a.modes().get();
    group_average(a, n)
}

/// Average of `α_g(A)` over the subgroup `S_k` permuting modes `1..=k`.
pub fn group_average(a: &Operator, k: usize) -> Result<Operator> {
    let n = a.modes().get();
    if k > n {
        return Err(Error::IndexOutOfRange(format!("subgroup S_{k} of S_{n}")));
    }
    if k > EXHAUSTIVE_CAP {
        return Err(Error::Capacity {
            what: "exhaustive permutation average",
            limit: EXHAUSTIVE_CAP,
            got: k,
            hint: "; use symmetrize_operator_sampled or commutant::SymmetricProjector",
        });
    }
    let d = a.dim();
    let mut acc = DMatrix::zeros(d, d);
    let mut count = 0usize;
    for g in all_permutations(k) {
        // the average over a group is the same whether g or g⁻¹ is used
        second_quantize(&g.embed(n)).conjugate_accumulate(a.matrix(), &mut acc);
        count += 1;
    }
    acc /= Complex64::new(count as f64, 0.0);
    Operator::from_matrix(a.modes(), acc)
}

/// Monte Carlo estimate of the symmetrization.
#[derive(Clone, Debug)]
pub struct SampledAverage {
    pub mean: Operator,
    /// Standard error of the mean in Frobenius norm.
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Uniformly sampled estimate of `(1/n!) Σ_g α_g(A)`.
pub fn symmetrize_operator_sampled(
    a: &Operator,
    samples: usize,
    seed: u64,
) -> Result<SampledAverage> {
    if samples < 2 {
        return Err(Error::Domain("need at least two samples".into()));
    }
    let n = a.modes().get();
    let d = a.dim();
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut sum = DMatrix::<Complex64>::zeros(d, d);
    let mut sum_sq = 0.0;
    let mut image: Vec<usize> = (0..n).collect();
    for _ in 0..samples {
        image.shuffle(&mut rng);
        let g = Permutation {
            image: image.clone(),
        };
        let x = second_quantize(&g).conjugate_matrix(a.matrix());
        sum_sq += x.norm_squared();
        sum += x;
    }
    let mean = sum / Complex64::new(samples as f64, 0.0);
    let s = samples as f64;
    // Σ‖X_i − X̄‖² = Σ‖X_i‖² − s‖X̄‖²
    let spread = (sum_sq - s * mean.norm_squared()).max(0.0);
    let std_error = (spread / (s * (s - 1.0))).sqrt();
    Ok(SampledAverage {
        mean: Operator::from_matrix(a.modes(), mean)?,
        std_error,
        samples,
        seed,
    })
}

/// Dyadic mixing permutation `g_m`: swaps the blocks `1..=2^{m−1}` and
/// `2^{m−1}+1..=2^m`, fixing everything above `2^m`.
pub fn mixing_permutation(m: usize, n: usize) -> Result<Permutation> {
    if m == 0 {
        return Err(Error::Domain("stage m must be at least 1".into()));
    }
    let block = 1usize
        .checked_shl(m as u32 - 1)
        .filter(|&b| b.checked_mul(2).is_some_and(|span| span <= n))
        .ok_or_else(|| Error::Capacity {
            what: "mixing stage (2^m modes)",
            limit: n,
            got: 1usize.checked_shl(m as u32).unwrap_or(usize::MAX),
            hint: "",
        })?;
    let image = (0..n)
        .map(|k| {
            if k < block {
                k + block
            } else if k < 2 * block {
                k - block
            } else {
                k
            }
        })
        .collect();
    Ok(Permutation { image })
}

/// Fraction of `g ∈ S_N` with `{1..m} ∩ g{1..k} ≠ ∅`, and the leading-order
/// estimate `mk/N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntersectingFraction {
    pub exact: f64,
    pub estimate: f64,
}

impl IntersectingFraction {
    pub fn abs_error(&self) -> f64 {
        (self.exact - self.estimate).abs()
    }
}

/// `1 − (N−m)!(N−k)! / ((N−m−k)! N!)`, exactly for `N ≤ 20` and through
/// the telescoped product `Π_{j<k} (1 − m/(N−j))` above.
pub fn intersecting_fraction(m: usize, k: usize, big_n: usize) -> Result<IntersectingFraction> {
    if m < 1 || k < 1 || m >= big_n || k >= big_n || m + k > big_n {
        return Err(Error::Domain(format!(
            "need 1 ≤ m, k < N and m + k ≤ N (m={m}, k={k}, N={big_n})"
        )));
    }
    let estimate = (m * k) as f64 / big_n as f64;
    let exact = if big_n <= 20 {
        let fact = |x: usize| (1..=x as u128).product::<u128>();
        let num = fact(big_n - m) * fact(big_n - k);
        let den = fact(big_n - m - k) * fact(big_n);
        // both products stay below 2^128 for N ≤ 20
        let g = gcd(num, den);
        let (num, den) = (num / g, den / g);
        (den - num) as f64 / den as f64
    } else {
        let (short, long) = (m.min(k), m.max(k));
        let log_miss: f64 = (0..short)
            .map(|j| (-(long as f64) / (big_n - j) as f64).ln_1p())
            .sum();
        -log_miss.exp_m1()
    };
    Ok(IntersectingFraction { exact, estimate })
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
