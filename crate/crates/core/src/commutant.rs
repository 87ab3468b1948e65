//! The commutant of `{Γ(g) : g ∈ S_n}` via orbit sums of matrix entries.
//!
//! `S_n` acts on pairs of basis indices `(r, c)` diagonally. Two pairs are in
//! the same orbit iff they have the same counts of mode types
//! `(r_j, c_j) ∈ {00, 01, 10, 11}`. Summing `Γ(g)|r⟩⟨c|Γ(g)*` over the group
//! gives a signed orbit sum `S_o`; the nonzero ones form an orthogonal basis
//! of the commutant, and the symmetrization `A ↦ (1/n!) Σ_g α_g(A)` is the
//! Hilbert–Schmidt orthogonal projection onto their span. This costs
//! `O(n·4^n)` instead of `O(n!·4^n)`.
//!
//! An orbit sum vanishes exactly when two modes of type `01` (or two of type
//! `10`) can be swapped: such a transposition fixes `(r, c)` but contributes
//! sign `−1`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::operator::{ModeCount, Operator};
use crate::perms::occupation_sign;

/// Occupation-type counts `(n00, n01, n10, n11)` labelling an orbit.
pub type OrbitKey = [usize; 4];
/// `(row, column, sign)` of one matrix entry.
pub type SignedEntry = (usize, usize, i8);

/// Precomputed orbit labels and signs for every matrix entry.
#[derive(Clone, Debug)]
pub struct SymmetricProjector {
    n: ModeCount,
    keys: Vec<OrbitKey>,
    /// per entry `r * d + c`: orbit index
    orbit: Vec<u32>,
    /// per entry: sign of the entry inside its orbit sum (0 if the orbit vanishes)
    coeff: Vec<i8>,
    sizes: Vec<usize>,
}

fn orbit_key(n: usize, r: usize, c: usize) -> OrbitKey {
    let mut key = [0; 4];
    for j in 0..n {
        let t = 2 * ((r >> (n - 1 - j)) & 1) + ((c >> (n - 1 - j)) & 1);
        key[t] += 1;
    }
    key
}

fn key_index(n: usize, key: &OrbitKey) -> usize {
    // (n00, n01, n10) determine n11
    (key[0] * (n + 1) + key[1]) * (n + 1) + key[2]
}

impl SymmetricProjector {
    pub fn new(n: ModeCount) -> Self {
        let nn = n.get();
        let d = n.dim();
        let mut slot = vec![u32::MAX; (nn + 1).pow(3)];
        let mut keys = Vec::new();
        let mut sizes = Vec::new();
        let mut orbit = Vec::with_capacity(d * d);
        let mut coeff = Vec::with_capacity(d * d);
        let mut image = vec![0usize; nn];

        for r in 0..d {
            for c in 0..d {
                let key = orbit_key(nn, r, c);
                let ki = key_index(nn, &key);
                if slot[ki] == u32::MAX {
                    slot[ki] = keys.len() as u32;
                    keys.push(key);
                    sizes.push(0);
                }
                let o = slot[ki] as usize;
                sizes[o] += 1;
                orbit.push(o as u32);

                if key[1] > 1 || key[2] > 1 {
                    coeff.push(0);
                    continue;
                }
                // Representative: modes sorted by type 00, 01, 10, 11. The
                // order-preserving map g from the representative onto (r, c)
                // fixes the sign of this entry in the orbit sum.
                let mut next = [0, key[0], key[0] + key[1], key[0] + key[1] + key[2]];
                for j in 0..nn {
                    let t = 2 * ((r >> (nn - 1 - j)) & 1) + ((c >> (nn - 1 - j)) & 1);
                    image[next[t]] = j;
                    next[t] += 1;
                }
                let (rep_r, rep_c) = representative(nn, &key);
                let (tr, sr) = occupation_sign(nn, &image, rep_r);
                let (tc, sc) = occupation_sign(nn, &image, rep_c);
                debug_assert_eq!((tr, tc), (r, c));
                coeff.push(sr * sc);
            }
        }

        Self {
            n,
            keys,
            orbit,
            coeff,
            sizes,
        }
    }

    pub fn modes(&self) -> ModeCount {
        self.n
    }

    pub fn orbit_count(&self) -> usize {
        self.keys.len()
    }

    pub fn keys(&self) -> &[OrbitKey] {
        &self.keys
    }

    /// Orbits whose signed sum is nonzero; the dimension of the commutant.
    pub fn live_orbits(&self) -> Vec<usize> {
        (0..self.keys.len())
            .filter(|&o| self.keys[o][1] <= 1 && self.keys[o][2] <= 1)
            .collect()
    }

    /// Signed orbit sum `S_o` as a dense matrix (zero if the orbit vanishes).
    pub fn orbit_sum(&self, o: usize) -> DMatrix<Complex64> {
        let d = self.n.dim();
        let mut m = DMatrix::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                let e = r * d + c;
                if self.orbit[e] as usize == o && self.coeff[e] != 0 {
                    m[(r, c)] = Complex64::new(self.coeff[e] as f64, 0.0);
                }
            }
        }
        m
    }

    /// Entries of every live orbit sum, grouped by orbit.
    pub fn orbit_entries(&self) -> Vec<(usize, Vec<SignedEntry>)> {
        let d = self.n.dim();
        let live = self.live_orbits();
        let mut pos = vec![usize::MAX; self.keys.len()];
        for (i, &o) in live.iter().enumerate() {
            pos[o] = i;
        }
        let mut out: Vec<(usize, Vec<SignedEntry>)> = live
            .iter()
            .map(|&o| (o, Vec::with_capacity(self.sizes[o])))
            .collect();
        for r in 0..d {
            for c in 0..d {
                let e = r * d + c;
                let o = self.orbit[e] as usize;
                if self.coeff[e] != 0 {
                    out[pos[o]].1.push((r, c, self.coeff[e]));
                }
            }
        }
        out
    }

    /// Orthogonal projection of `X` onto the commutant, equal to the full
    /// `S_n` average of `α_g(X)`.
    pub fn project_matrix(&self, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let d = self.n.dim();
        let mut overlap = vec![Complex64::new(0.0, 0.0); self.keys.len()];
        for r in 0..d {
            for c in 0..d {
                let e = r * d + c;
                let s = self.coeff[e];
                if s != 0 {
                    overlap[self.orbit[e] as usize] += x[(r, c)] * s as f64;
                }
            }
        }
        for (o, v) in overlap.iter_mut().enumerate() {
            *v /= self.sizes[o] as f64;
        }
        DMatrix::from_fn(d, d, |r, c| {
            let e = r * d + c;
            overlap[self.orbit[e] as usize] * self.coeff[e] as f64
        })
    }

    pub fn project(&self, a: &Operator) -> Result<Operator> {
        a.check_modes(self.n)?;
        Operator::from_matrix(self.n, self.project_matrix(a.matrix()))
    }
}

fn representative(n: usize, key: &OrbitKey) -> (usize, usize) {
    let mut r = 0;
    let mut c = 0;
    let mut j = 0;
    for (t, &count) in key.iter().enumerate() {
        for _ in 0..count {
            if t >= 2 {
                r |= 1 << (n - 1 - j);
            }
            if t % 2 == 1 {
                c |= 1 << (n - 1 - j);
            }
            j += 1;
        }
    }
    (r, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perms::symmetrize_operator;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::SplitMix64;

    fn random_operator(n: ModeCount, seed: u64) -> Operator {
        let mut rng = SplitMix64::seed_from_u64(seed);
        let d = n.dim();
        let m = DMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        Operator::from_matrix(n, m).unwrap()
    }

    #[test]
    fn orbit_projection_matches_group_average() {
        for n in 1..=5 {
            let n = ModeCount::new(n).unwrap();
            let proj = SymmetricProjector::new(n);
            let a = random_operator(n, 11 + n.get() as u64);
            let fast = proj.project(&a).unwrap();
            let slow = symmetrize_operator(&a).unwrap();
            assert!(fast.approx_eq(&slow, 1e-13), "n = {n}");
        }
    }

    #[test]
    fn orbit_sums_match_group_average_of_representatives() {
        let n = ModeCount::new(4).unwrap();
        let proj = SymmetricProjector::new(n);
        for (o, key) in proj.keys().iter().enumerate() {
            let (r, c) = representative(4, key);
            let mut unit = DMatrix::zeros(16, 16);
            unit[(r, c)] = Complex64::new(1.0, 0.0);
            let avg = symmetrize_operator(&Operator::from_matrix(n, unit).unwrap()).unwrap();
            // the group average of a representative is S_o / |o|
            let expected = proj.orbit_sum(o) / Complex64::new(proj.sizes[o] as f64, 0.0);
            assert!((avg.matrix() - expected).norm() < 1e-13, "orbit {key:?}");
        }
    }

    #[test]
    fn commutant_dimension_is_four_n() {
        // live orbits: n01, n10 ∈ {0, 1}, the rest split between 00 and 11
        for n in 1..=6 {
            let proj = SymmetricProjector::new(ModeCount::new(n).unwrap());
            assert_eq!(proj.orbit_count(), (n + 1) * (n + 2) * (n + 3) / 6);
            assert_eq!(proj.live_orbits().len(), 4 * n, "n = {n}");
        }
    }

    #[test]
    fn projection_is_idempotent() {
        let n = ModeCount::new(4).unwrap();
        let proj = SymmetricProjector::new(n);
        let a = random_operator(n, 3);
        let p = proj.project(&a).unwrap();
        assert!(proj.project(&p).unwrap().approx_eq(&p, 1e-14));
    }
}
