//! Dense real vectors and image matrices.
//!
//! Arithmetic helpers on [`RealVector`] assume equal lengths and panic
//! otherwise; the checked entry points ([`inner`], [`brezinski_inverse`],
//! [`geometric_sandwich`]) report [`Error::DimensionMismatch`] instead.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Denominators with `|d| < SINGULAR_GUARD * max(1, scale)` are treated as zero.
pub const SINGULAR_GUARD: f64 = 1e-300;

/// Default relative tolerance of [`matrix_2norm`] on the Rayleigh quotient.
pub const NORM_TOL: f64 = 1e-10;

/// Default iteration budget of [`matrix_2norm`].
pub const NORM_MAX_ITER: usize = 1000;

/// Returns true when `den` is guard-zero relative to `scale`.
///
/// NaN denominators are always singular.
#[inline]
pub fn is_negligible(den: f64, scale: f64) -> bool {
    let bound = SINGULAR_GUARD * if scale > 1.0 { scale } else { 1.0 };
    den.is_nan() || den.abs() < bound
}

/// A dense vector of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealVector(Vec<f64>);

impl RealVector {
    /// Builds a vector from input data, rejecting empty or non-finite data.
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(data))
    }

    /// Wraps computed data without validation. Use [`RealVector::is_finite`]
    /// to detect divergence afterwards.
    pub fn from_vec(data: Vec<f64>) -> Self {
        Self(data)
    }

    /// A vector of `len` zeros.
    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    /// A vector of `len` copies of `value`.
    pub fn filled(len: usize, value: f64) -> Self {
        Self(vec![value; len])
    }

    #[allow(missing_docs)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[allow(missing_docs)]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[allow(missing_docs)]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    #[allow(missing_docs)]
    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// True when every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// `Σ xᵢyᵢ`, summed left to right.
    pub fn dot(&self, other: &RealVector) -> f64 {
        assert_eq!(self.len(), other.len(), "dot: length mismatch");
        self.0.iter().zip(&other.0).map(|(x, y)| x * y).sum()
    }

    /// Squared Euclidean norm.
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    /// `self + other`.
    pub fn add(&self, other: &RealVector) -> RealVector {
        self.zip_map(other, |x, y| x + y)
    }

    /// `self - other`.
    pub fn sub(&self, other: &RealVector) -> RealVector {
        self.zip_map(other, |x, y| x - y)
    }

    /// `alpha * self`.
    pub fn scale(&self, alpha: f64) -> RealVector {
        RealVector(self.0.iter().map(|x| alpha * x).collect())
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &RealVector) -> RealVector {
        self.zip_map(other, |x, y| x + alpha * y)
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(&self, other: &RealVector) -> f64 {
        assert_eq!(self.len(), other.len(), "max_abs_diff: length mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    fn zip_map(&self, other: &RealVector, f: impl Fn(f64, f64) -> f64) -> RealVector {
        assert_eq!(self.len(), other.len(), "length mismatch");
        RealVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&x, &y)| f(x, y))
                .collect(),
        )
    }
}

impl AsRef<[f64]> for RealVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

fn check_len(x: &RealVector, y: &RealVector) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(())
}

/// Inner product `xᵀy`.
pub fn inner(x: &RealVector, y: &RealVector) -> Result<f64> {
    check_len(x, y)?;
    Ok(x.dot(y))
}

/// Brezinski inverse of `c` paired with `v`: `v / (vᵀc)`.
///
/// With `v = c` this is the Samelson inverse `c / ||c||²`.
pub fn brezinski_inverse(c: &RealVector, v: &RealVector) -> Result<RealVector> {
    check_len(c, v)?;
    let den = v.dot(c);
    if is_negligible(den, v.norm() * c.norm()) {
        return Err(Error::NearSingular { denominator: den });
    }
    Ok(RealVector(v.0.iter().map(|vi| vi / den).collect()))
}

/// Samelson inverse `c / ||c||²`.
pub fn samelson_inverse(c: &RealVector) -> Result<RealVector> {
    brezinski_inverse(c, c)
}

/// Vector part of the geometric product `x y x = 2(xᵀy)x − ||x||²y`.
pub fn geometric_sandwich(x: &RealVector, y: &RealVector) -> Result<RealVector> {
    check_len(x, y)?;
    let xy = x.dot(y);
    let xx = x.norm_sq();
    Ok(x.zip_map(y, |xi, yi| 2.0 * xy * xi - xx * yi))
}

/// A row-major real matrix, used as the image view of a vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ImageMatrix {
    /// Builds a `rows x cols` matrix from row-major data.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if rows.checked_mul(cols) != Some(data.len()) {
            return Err(Error::ShapeMismatch {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// A matrix with every entry equal to `value`.
    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Reshapes a vector into a matrix.
    pub fn from_vector(rows: usize, cols: usize, v: RealVector) -> Result<Self> {
        Self::new(rows, cols, v.0)
    }

    #[allow(missing_docs)]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[allow(missing_docs)]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `(rows, cols)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Entry at `(r, c)`.
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    /// Row `r` as a slice.
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Flattens into a vector, row-major.
    pub fn into_vector(self) -> RealVector {
        RealVector(self.data)
    }

    /// Copies the entries into a vector, row-major.
    pub fn to_vector(&self) -> RealVector {
        RealVector(self.data.clone())
    }

    /// Applies `f` to every entry.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ImageMatrix {
        ImageMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    #[allow(missing_docs)]
    pub fn transpose(&self) -> ImageMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c));
            }
        }
        ImageMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// `M v` for `v` of length `cols`.
    fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(m, x)| m * x).sum())
            .collect()
    }

    /// `Mᵀ w` for `w` of length `rows`.
    fn mul_t_vec(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (r, &wr) in w.iter().enumerate() {
            for (o, m) in out.iter_mut().zip(self.row(r)) {
                *o += m * wr;
            }
        }
        out
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = libm::sqrt(v.iter().map(|x| x * x).sum());
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Largest singular value of `m` by power iteration on `mᵀm`.
///
/// Starts from the normalized all-ones vector; if that vector lies in the
/// null space of `m`, restarts from the column of largest norm. Stops when
/// the Rayleigh quotient changes by at most `tol` relative.
pub fn matrix_2norm(m: &ImageMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    if let Some(index) = m.data.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    if tol.is_nan() || tol <= 0.0 || max_iter == 0 {
        return Err(Error::InvalidParameter(
            "matrix_2norm needs tol > 0 and max_iter >= 1",
        ));
    }
    let mut v = vec![1.0; m.cols];
    normalize(&mut v);
    if m.mul_vec(&v).iter().all(|&x| x == 0.0) {
        let col_norm = |c: usize| (0..m.rows).map(|r| m.get(r, c) * m.get(r, c)).sum::<f64>();
        let best = (0..m.cols)
            .map(|c| (c, col_norm(c)))
            .fold((0, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if best.1 == 0.0 {
            return Ok(0.0);
        }
        v.iter_mut().for_each(|x| *x = 0.0);
        v[best.0] = 1.0;
    }

    let mut prev = f64::NAN;
    let mut rayleigh = 0.0;
    for _ in 0..max_iter {
        let w = m.mul_vec(&v);
        rayleigh = w.iter().map(|x| x * x).sum::<f64>();
        if (rayleigh - prev).abs() <= tol * rayleigh {
            return Ok(libm::sqrt(rayleigh));
        }
        prev = rayleigh;
        v = m.mul_t_vec(&w);
        if normalize(&mut v) == 0.0 {
            return Ok(0.0);
        }
    }
    Err(Error::IterationLimit {
        iterations: max_iter,
        estimate: libm::sqrt(rayleigh),
    })
}
