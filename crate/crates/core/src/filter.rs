//! Black-box image filters.
//!
//! All filters use half-sample symmetric (mirror) boundary extension, work on
//! `f64` data and accept any finite input, including values outside `[0, 1]`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::vector::ImageMatrix;
use crate::{Error, Result};

/// A filter treated as a black box by the reverse-filtering driver.
pub trait ImageFilter {
    /// Filters `img`, returning an image of the same shape.
    fn apply(&self, img: &ImageMatrix) -> ImageMatrix;
}

impl<F> ImageFilter for F
where
    F: Fn(&ImageMatrix) -> ImageMatrix,
{
    fn apply(&self, img: &ImageMatrix) -> ImageMatrix {
        self(img)
    }
}

/// Built-in filter kinds and parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterSpec {
    /// Gaussian smoothing, kernel truncated at `±⌈3σ⌉`.
    Gaussian {
        #[allow(missing_docs)]
        sigma: f64,
    },
    /// Mean over a `(2r+1)²` window.
    Box {
        #[allow(missing_docs)]
        radius: usize,
    },
    /// Self-guided filter (guide = input).
    Guided {
        #[allow(missing_docs)]
        radius: usize,
        #[allow(missing_docs)]
        eps: f64,
    },
    /// Brute-force bilateral filter over a `(2⌈3σ_s⌉+1)²` window.
    Bilateral {
        #[allow(missing_docs)]
        sigma_s: f64,
        #[allow(missing_docs)]
        sigma_r: f64,
    },
}

impl FilterSpec {
    /// Checks the parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            FilterSpec::Gaussian { sigma } => sigma > 0.0 && sigma.is_finite(),
            FilterSpec::Box { radius } => radius >= 1,
            FilterSpec::Guided { radius, eps } => radius >= 1 && eps > 0.0 && eps.is_finite(),
            FilterSpec::Bilateral { sigma_s, sigma_r } => {
                sigma_s > 0.0 && sigma_s.is_finite() && sigma_r > 0.0 && sigma_r.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("filter parameters out of range"))
        }
    }

    /// Validates and wraps the spec as an [`ImageFilter`].
    pub fn build(self) -> Result<BuiltinFilter> {
        self.validate()?;
        Ok(BuiltinFilter(self))
    }
}

impl fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FilterSpec::Gaussian { sigma } => write!(f, "gaussian:sigma={sigma}"),
            FilterSpec::Box { radius } => write!(f, "box:r={radius}"),
            FilterSpec::Guided { radius, eps } => write!(f, "guided:r={radius},eps={eps}"),
            FilterSpec::Bilateral { sigma_s, sigma_r } => {
                write!(f, "bilateral:sigma_s={sigma_s},sigma_r={sigma_r}")
            }
        }
    }
}

/// A validated built-in filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuiltinFilter(FilterSpec);

impl BuiltinFilter {
    #[allow(missing_docs)]
    pub fn spec(&self) -> FilterSpec {
        self.0
    }
}

impl ImageFilter for BuiltinFilter {
    fn apply(&self, img: &ImageMatrix) -> ImageMatrix {
        match self.0 {
            FilterSpec::Gaussian { sigma } => gaussian(img, sigma),
            FilterSpec::Box { radius } => box_mean(img, radius),
            FilterSpec::Guided { radius, eps } => guided(img, radius, eps),
            FilterSpec::Bilateral { sigma_s, sigma_r } => bilateral(img, sigma_s, sigma_r),
        }
    }
}

/// Applies `spec` to `img`.
pub fn apply_filter(spec: FilterSpec, img: &ImageMatrix) -> Result<ImageMatrix> {
    Ok(spec.build()?.apply(img))
}

/// Wraps a filter and counts how often it is called.
#[derive(Debug)]
pub struct CountingFilter<F> {
    inner: F,
    calls: AtomicUsize,
}

impl<F> CountingFilter<F> {
    #[allow(missing_docs)]
    pub fn new(inner: F) -> Self {
        Self {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    /// Calls made so far.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    #[allow(missing_docs)]
    pub fn reset(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }
}

impl<F: ImageFilter> ImageFilter for CountingFilter<F> {
    fn apply(&self, img: &ImageMatrix) -> ImageMatrix {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.apply(img)
    }
}

/// Half-sample symmetric index: `-1 → 0`, `n → n − 1`, periodic with `2n`.
#[inline]
pub(crate) fn mirror(i: isize, n: usize) -> usize {
    let n = n as isize;
    let k = i.rem_euclid(2 * n);
    (if k >= n { 2 * n - 1 - k } else { k }) as usize
}

/// Normalized Gaussian taps on `[-R, R]`, `R = ⌈3σ⌉`.
pub(crate) fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = libm::ceil(3.0 * sigma) as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|d| libm::exp(-((d * d) as f64) / (2.0 * sigma * sigma)))
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|w| *w /= sum);
    k
}

/// Runs `line_op` over every row and then every column.
fn separable(img: &ImageMatrix, line_op: impl Fn(&[f64], &mut [f64])) -> ImageMatrix {
    let (rows, cols) = img.shape();
    let mut tmp = vec![0.0; rows * cols];
    for r in 0..rows {
        line_op(img.row(r), &mut tmp[r * cols..(r + 1) * cols]);
    }
    let mut out = vec![0.0; rows * cols];
    let mut column = vec![0.0; rows];
    let mut result = vec![0.0; rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = tmp[r * cols + c];
        }
        line_op(&column, &mut result);
        for r in 0..rows {
            out[r * cols + c] = result[r];
        }
    }
    ImageMatrix::new(rows, cols, out).expect("shape preserved")
}

fn convolve_line(kernel: &[f64], input: &[f64], output: &mut [f64]) {
    let n = input.len();
    let radius = (kernel.len() / 2) as isize;
    for (i, o) in output.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, w) in kernel.iter().enumerate() {
            acc += w * input[mirror(i as isize + j as isize - radius, n)];
        }
        *o = acc;
    }
}

fn box_line(radius: usize, input: &[f64], output: &mut [f64]) {
    let n = input.len();
    let r = radius as isize;
    let width = (2 * radius + 1) as f64;
    // prefix sums over the mirror-padded line
    let mut prefix = Vec::with_capacity(n + 2 * radius + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for i in -r..(n as isize + r) {
        acc += input[mirror(i, n)];
        prefix.push(acc);
    }
    for (i, o) in output.iter_mut().enumerate() {
        *o = (prefix[i + 2 * radius + 1] - prefix[i]) / width;
    }
}

fn gaussian(img: &ImageMatrix, sigma: f64) -> ImageMatrix {
    let kernel = gaussian_kernel(sigma);
    separable(img, |i, o| convolve_line(&kernel, i, o))
}

fn box_mean(img: &ImageMatrix, radius: usize) -> ImageMatrix {
    separable(img, |i, o| box_line(radius, i, o))
}

fn zip_with(a: &ImageMatrix, b: &ImageMatrix, f: impl Fn(f64, f64) -> f64) -> ImageMatrix {
    let data = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&x, &y)| f(x, y))
        .collect();
    ImageMatrix::new(a.rows(), a.cols(), data).expect("shape preserved")
}

fn guided(img: &ImageMatrix, radius: usize, eps: f64) -> ImageMatrix {
    let mean = box_mean(img, radius);
    let corr = box_mean(&img.map(|v| v * v), radius);
    let var = zip_with(&corr, &mean, |c, m| c - m * m);
    let a = var.map(|v| v / (v + eps));
    let b = zip_with(&mean, &a, |m, a| m - a * m);
    let mean_a = box_mean(&a, radius);
    let mean_b = box_mean(&b, radius);
    let scaled = zip_with(&mean_a, img, |ma, i| ma * i);
    zip_with(&scaled, &mean_b, |s, mb| s + mb)
}

fn bilateral(img: &ImageMatrix, sigma_s: f64, sigma_r: f64) -> ImageMatrix {
    let (rows, cols) = img.shape();
    let radius = libm::ceil(3.0 * sigma_s) as isize;
    let spatial: Vec<f64> = (-radius..=radius)
        .flat_map(|dy| {
            (-radius..=radius)
                .map(move |dx| libm::exp(-((dx * dx + dy * dy) as f64) / (2.0 * sigma_s * sigma_s)))
        })
        .collect();
    let range_scale = -1.0 / (2.0 * sigma_r * sigma_r);
    let side = (2 * radius + 1) as usize;
    let col_index: Vec<Vec<usize>> = (0..cols as isize)
        .map(|c| (-radius..=radius).map(|dx| mirror(c + dx, cols)).collect())
        .collect();

    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows as isize {
        for (c, taps) in col_index.iter().enumerate() {
            let center = img.get(r as usize, c);
            let mut num = 0.0;
            let mut den = 0.0;
            for (wy, dy) in (-radius..=radius).enumerate() {
                let row = img.row(mirror(r + dy, rows));
                let weights = &spatial[wy * side..(wy + 1) * side];
                for (w, &cc) in weights.iter().zip(taps) {
                    let v = row[cc];
                    let d = v - center;
                    let weight = w * libm::exp(range_scale * d * d);
                    num += weight * v;
                    den += weight;
                }
            }
            out.push(num / den);
        }
    }
    ImageMatrix::new(rows, cols, out).expect("shape preserved")
}
