//! Integer matrices with at most one nonzero entry (±1) per column.
//!
//! Every generator a_j, a†_j, every Jordan–Wigner matrix unit and every
//! second-quantized permutation lives in this class, and it is closed under
//! products and adjoints. Keeping them here lets the algebraic identities be
//! checked in exact integer arithmetic instead of floating point.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Partial signed permutation matrix of size `dim × dim`.
///
/// `cols[c] = Some((r, s))` means the single nonzero entry of column `c`
/// sits in row `r` with value `s ∈ {−1, +1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedMonomial {
    cols: Vec<Option<(u32, i8)>>,
}

impl SignedMonomial {
    pub fn identity(dim: usize) -> Self {
        Self {
            cols: (0..dim).map(|c| Some((c as u32, 1))).collect(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            cols: vec![None; dim],
        }
    }

    /// Diagonal matrix with the given ±1/0 entries.
    pub fn diagonal(entries: &[i8]) -> Self {
        Self {
            cols: entries
                .iter()
                .enumerate()
                .map(|(c, &s)| if s == 0 { None } else { Some((c as u32, s)) })
                .collect(),
        }
    }

    /// Builds from per-column entries. Panics if a row is hit twice or a
    /// value other than ±1 is supplied.
    pub fn from_columns(cols: Vec<Option<(u32, i8)>>) -> Self {
        let dim = cols.len();
        let mut seen = vec![false; dim];
        for &(r, s) in cols.iter().flatten() {
            assert!(s == 1 || s == -1, "monomial entries must be ±1");
            let r = r as usize;
            assert!(r < dim, "row {r} out of range");
            assert!(!seen[r], "row {r} occupied twice");
            seen[r] = true;
        }
        Self { cols }
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    /// The nonzero entry of column `c`, if any.
    pub fn column(&self, c: usize) -> Option<(usize, i8)> {
        self.cols[c].map(|(r, s)| (r as usize, s))
    }

    pub fn entry(&self, r: usize, c: usize) -> i8 {
        match self.cols[c] {
            Some((row, s)) if row as usize == r => s,
            _ => 0,
        }
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().filter(|e| e.is_some()).count()
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &SignedMonomial) -> SignedMonomial {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in product");
        let cols = rhs
            .cols
            .iter()
            .map(|e| e.and_then(|(mid, s1)| self.cols[mid as usize].map(|(r, s2)| (r, s1 * s2))))
            .collect();
        SignedMonomial { cols }
    }

    /// Conjugate transpose (the entries are real, so just the transpose).
    pub fn adjoint(&self) -> SignedMonomial {
        let mut cols = vec![None; self.dim()];
        for (c, e) in self.cols.iter().enumerate() {
            if let Some((r, s)) = *e {
                cols[r as usize] = Some((c as u32, s));
            }
        }
        SignedMonomial { cols }
    }

    pub fn neg(&self) -> SignedMonomial {
        SignedMonomial {
            cols: self.cols.iter().map(|e| e.map(|(r, s)| (r, -s))).collect(),
        }
    }

    /// Sum of two monomials whose column supports and row supports are
    /// disjoint; returns `None` when the sum leaves the monomial class.
    pub fn disjoint_sum(&self, rhs: &SignedMonomial) -> Option<SignedMonomial> {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in sum");
        let mut cols = Vec::with_capacity(self.dim());
        let mut rows = vec![false; self.dim()];
        for (a, b) in self.cols.iter().zip(&rhs.cols) {
            let e = match (a, b) {
                (Some(_), Some(_)) => return None,
                (Some(x), None) | (None, Some(x)) => Some(*x),
                (None, None) => None,
            };
            if let Some((r, _)) = e {
                if rows[r as usize] {
                    return None;
                }
                rows[r as usize] = true;
            }
            cols.push(e);
        }
        Some(SignedMonomial { cols })
    }

    /// Kronecker product `self ⊗ rhs` (left factor most significant).
    pub fn kron(&self, rhs: &SignedMonomial) -> SignedMonomial {
        let d2 = rhs.dim();
        let mut cols = Vec::with_capacity(self.dim() * d2);
        for a in &self.cols {
            for b in &rhs.cols {
                cols.push(match (a, b) {
                    (Some((r1, s1)), Some((r2, s2))) => Some((r1 * d2 as u32 + r2, s1 * s2)),
                    _ => None,
                });
            }
        }
        SignedMonomial { cols }
    }

    /// Dense integer matrix, row-major.
    pub fn to_integer(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.dim());
        m.add_monomial(self, 1);
        m
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (c, e) in self.cols.iter().enumerate() {
            if let Some((r, s)) = *e {
                m[(r as usize, c)] = Complex64::new(s as f64, 0.0);
            }
        }
        m
    }
}

/// Dense square integer matrix used for exact identity checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    dim: usize,
    data: Vec<i32>,
}

impl IntMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> i32 {
        self.data[r * self.dim + c]
    }

    /// `self += coeff · m`.
    pub fn add_monomial(&mut self, m: &SignedMonomial, coeff: i32) {
        assert_eq!(self.dim, m.dim());
        for c in 0..self.dim {
            if let Some((r, s)) = m.column(c) {
                self.data[r * self.dim + c] += coeff * s as i32;
            }
        }
    }

    pub fn scaled_identity(dim: usize, k: i32) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = k;
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Largest absolute entry of `self − other`.
    pub fn max_abs_diff(&self, other: &IntMatrix) -> i32 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or(0)
    }
}
