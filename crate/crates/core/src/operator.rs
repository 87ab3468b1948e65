//! Dense operators on the n-mode Fock space.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::monomial::SignedMonomial;

/// Largest number of modes a context may be built for.
pub const MAX_MODES: usize = 12;

/// Number of fermionic modes, `1 ≤ n ≤ MAX_MODES`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeCount(usize);

impl ModeCount {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("mode count must be at least 1".into()));
        }
        if n > MAX_MODES {
            return Err(Error::capacity("mode count", MAX_MODES, n));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Fock-space dimension `2^n`.
    pub fn dim(self) -> usize {
        1 << self.0
    }
}

impl fmt::Display for ModeCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Whether mode `j` (1-based) is occupied in basis index `b`.
///
/// Mode 1 is the most significant bit of the index.
#[inline]
pub fn occupied(n: usize, b: usize, j: usize) -> bool {
    (b >> (n - j)) & 1 == 1
}

#[inline]
pub(crate) fn mode_bit(n: usize, j: usize) -> usize {
    1 << (n - j)
}

/// A complex `2^n × 2^n` matrix tagged with its mode count.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    n: ModeCount,
    mat: DMatrix<Complex64>,
}

impl Operator {
    pub fn from_matrix(n: ModeCount, mat: DMatrix<Complex64>) -> Result<Self> {
        let d = n.dim();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: mat.nrows().max(mat.ncols()),
            });
        }
        Ok(Self { n, mat })
    }

    pub fn from_monomial(n: ModeCount, m: &SignedMonomial) -> Self {
        assert_eq!(m.dim(), n.dim());
        Self {
            n,
            mat: m.to_dense(),
        }
    }

    pub fn identity(n: ModeCount) -> Self {
        Self {
            n,
            mat: DMatrix::identity(n.dim(), n.dim()),
        }
    }

    pub fn zeros(n: ModeCount) -> Self {
        Self {
            n,
            mat: DMatrix::zeros(n.dim(), n.dim()),
        }
    }

    pub fn modes(&self) -> ModeCount {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            n: self.n,
            mat: self.mat.adjoint(),
        }
    }

    pub fn scale(&self, z: Complex64) -> Operator {
        Operator {
            n: self.n,
            mat: &self.mat * z,
        }
    }

    pub fn scale_real(&self, x: f64) -> Operator {
        self.scale(Complex64::new(x, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// `{A, B} = AB + BA`
    pub fn anticommutator(&self, other: &Operator) -> Operator {
        &(self * other) + &(other * self)
    }

    /// `[A, B] = AB − BA`
    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        self.check_same(other).expect("dimension mismatch");
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius distance relative to `max(‖self‖, ‖other‖, 1)`.
    pub fn relative_distance(&self, other: &Operator) -> f64 {
        let scale = self.frobenius_norm().max(other.frobenius_norm()).max(1.0);
        (&self.mat - &other.mat).norm() / scale
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.n == other.n && self.relative_distance(other) <= tol
    }

    pub(crate) fn check_same(&self, other: &Operator) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_modes(&self, n: ModeCount) -> Result<()> {
        if self.n != n {
            return Err(Error::DimensionMismatch {
                expected: n.dim(),
                got: self.dim(),
            });
        }
        Ok(())
    }

    /// Smallest `s` such that the operator lies in `M_{2^s} ⊗ 1`, i.e. acts
    /// only on modes `1..=s`. Returns 0 for multiples of the identity.
    pub fn support_extent(&self, tol: f64) -> usize {
        let n = self.n.get();
        (0..=n)
            .find(|&s| self.is_localized_in_prefix(s, tol))
            .unwrap_or(n)
    }

    fn is_localized_in_prefix(&self, s: usize, tol: f64) -> bool {
        let n = self.n.get();
        let tail = 1usize << (n - s);
        let head = 1usize << s;
        for x in 0..head {
            for y in 0..head {
                let reference = self.mat[(x * tail, y * tail)];
                for z in 0..tail {
                    for w in 0..tail {
                        let v = self.mat[(x * tail + z, y * tail + w)];
                        let expected = if z == w {
                            reference
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        if (v - expected).norm() > tol {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        self.check_same(rhs).expect("dimension mismatch in product");
        Operator {
            n: self.n,
            mat: &self.mat * &rhs.mat,
        }
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        self.check_same(rhs).expect("dimension mismatch in sum");
        Operator {
            n: self.n,
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        self.check_same(rhs)
            .expect("dimension mismatch in difference");
        Operator {
            n: self.n,
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator {
            n: self.n,
            mat: -&self.mat,
        }
    }
}
