//! Fixed-size dense complex matrices (2x2 and 4x4) and the matrix
//! exponentials used by the propagator.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::ParamPoint;
use crate::tolerance::TOL;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex square matrix of dimension 2 or 4, stored row-major in a
/// fixed buffer so values stay `Copy` and live on the stack.
#[derive(Clone, Copy, PartialEq)]
pub struct CMat {
    dim: usize,
    data: [C64; 16],
}

impl CMat {
    fn check_dim(dim: usize) {
        assert!(
            dim == 2 || dim == 4,
            "CMat dimension must be 2 or 4, got {dim}"
        );
    }

    pub fn zeros(dim: usize) -> Self {
        Self::check_dim(dim);
        Self {
            dim,
            data: [ZERO; 16],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Build from rows. Panics if the rows are not square of size 2 or 4.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), dim, "row {i} has wrong length");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let complex: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// `|a⟩⟨b|`
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        assert_eq!(a.len(), b.len());
        let mut m = Self::zeros(a.len());
        for i in 0..a.len() {
            for j in 0..b.len() {
                m[(i, j)] = a[i] * b[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for v in m.data.iter_mut().take(self.dim * self.dim) {
            *v *= s;
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus; NaN if any entry is NaN.
    pub fn max_abs(&self) -> f64 {
        self.data[..self.dim * self.dim]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, |acc, x| if x.is_nan() || x > acc { x } else { acc })
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        (*self - *other).max_abs()
    }

    /// `‖U†U − I‖_max`
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() <= TOL.unitarity
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_diff(&self.adjoint())
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Place a 2x2 matrix in the top-left block of a zero 4x4.
    pub fn embed(&self) -> Self {
        assert_eq!(self.dim, 2, "only 2x2 blocks can be embedded");
        let mut m = Self::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = self[(i, j)];
            }
        }
        m
    }

    /// Top-left 2x2 block of a 4x4.
    pub fn top_left_block(&self) -> Self {
        assert_eq!(self.dim, 4);
        let mut m = Self::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = self[(i, j)];
            }
        }
        m
    }

    /// `U A U†`
    pub fn conjugate(&self, a: &Self) -> Self {
        *self * *a * self.adjoint()
    }

    pub fn entries(&self) -> &[C64] {
        &self.data[..self.dim * self.dim]
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i * self.dim + j]
    }
}

impl Add for CMat {
    type Output = CMat;
    fn add(mut self, rhs: CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a += *b;
        }
        self
    }
}

impl Sub for CMat {
    type Output = CMat;
    fn sub(mut self, rhs: CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a -= *b;
        }
        self
    }
}

/// Matrix product. Panics on dimension mismatch; use [`matmul`] for a
/// checked version.
impl Mul for CMat {
    type Output = CMat;
    #[inline]
    fn mul(self, rhs: CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = CMat {
            dim: n,
            data: [ZERO; 16],
        };
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let v = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn matmul(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    Ok(*a * *b)
}

/// `exp(−i H(p) dt)` for the tripod Hamiltonian, in closed form.
///
/// `H` has rank two with `H³ = ‖r‖² H`, so the series collapses to
/// `I − i sin(‖r‖dt)/‖r‖ H + (cos(‖r‖dt) − 1)/‖r‖² H²`.
pub fn step_exp(p: &ParamPoint, dt: f64) -> CMat {
    let r2 = p.norm_sqr();
    let mut out = CMat::identity(4);
    if r2 == 0.0 || dt == 0.0 {
        return out;
    }
    let r = r2.sqrt();
    let theta = r * dt;
    // sin(θ)/r and (cos θ − 1)/r², the latter written via sin² to avoid
    // cancellation for small θ.
    let a = theta.sin() / r;
    let half = (0.5 * theta).sin();
    let b = -2.0 * half * half / r2;
    let c = p.components();

    // −i a H: row/column 3 only.
    for i in 0..3 {
        out[(3, i)] = C64::new(0.0, -a) * c[i];
        out[(i, 3)] = C64::new(0.0, -a) * c[i].conj();
    }
    // b H² with H² = conj(r_i) r_j on the ground block and ‖r‖² at (3, 3).
    for i in 0..3 {
        for j in 0..3 {
            out[(i, j)] += b * c[i].conj() * c[j];
        }
    }
    out[(3, 3)] += C64::new(b * r2, 0.0);
    out
}

/// Reference `exp(−i h dt)` by scaling and squaring a truncated Taylor
/// series. Only used to cross-check [`step_exp`].
pub fn expm_reference(h: &CMat, dt: f64) -> Result<CMat> {
    let defect = h.hermiticity_defect();
    if defect > TOL.hermiticity {
        return Err(Error::NotHermitian(defect));
    }
    let a = h.scale(C64::new(0.0, -dt));
    let norm = a.max_abs() * a.dim() as f64;
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = a.scale(C64::new(scale, 0.0));

    let mut sum = CMat::identity(h.dim());
    let mut term = CMat::identity(h.dim());
    for k in 1..=24 {
        term = (term * a).scale(C64::new(1.0 / k as f64, 0.0));
        sum = sum + term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    Ok(sum)
}
