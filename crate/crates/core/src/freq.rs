//! Closed-form solves of the per-iteration quadratic in the frequency
//! domain.
//!
//! Each smoothing iteration minimizes
//!
//! ```text
//! sum_s (u_s - f_s)^2 + lambda * sum_{* in {x,y}} 1/2 (sqrt(c) du_* - mu_*/sqrt(c))^2
//! ```
//!
//! whose normal equations `(I + (c*lambda/2) * sum D*^T D*) u = f +
//! (lambda/2) * sum D*^T mu_*` diagonalize under the periodic boundary
//! convention: every quantity becomes a per-frequency scalar division.
//! [`FreqCache`] holds the denominator and the conjugated operator
//! transforms so that repeated solves (across iterations and channels)
//! cost three forward transforms and one inverse transform each.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::image::{check_same_size, ImagePlane};

/// Per-axis auxiliary fields of the surrogate quadratic.
#[derive(Debug, Clone)]
pub struct MuField {
    pub mux: ImagePlane,
    pub muy: ImagePlane,
}

impl MuField {
    pub fn new(mux: ImagePlane, muy: ImagePlane) -> Result<Self> {
        check_same_size(&mux, &muy)?;
        Ok(Self { mux, muy })
    }

    /// Both fields identically zero.
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            mux: ImagePlane::filled(width, height, 0.0),
            muy: ImagePlane::filled(width, height, 0.0),
        }
    }
}

/// Precomputed frequency-domain quantities for one image size and one
/// `(lambda, c)` pair. Immutable after construction and cheap to share
/// across threads and channels.
pub struct FreqCache {
    width: usize,
    height: usize,
    lambda: f64,
    c: f64,
    /// `1 + (c*lambda/2) * (|F(Dx)|^2 + |F(Dy)|^2)` per frequency bin; >= 1.
    denom: Vec<f64>,
    dx_conj: Vec<Complex<f64>>,
    dy_conj: Vec<Complex<f64>>,
    fft: Fft2d,
}

impl FreqCache {
    /// Plans the transforms and evaluates the operator spectra for the
    /// periodic forward-difference kernels embedded on a `width x height`
    /// grid.
    pub fn new(width: usize, height: usize, lambda: f64, c: f64) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(Error::DimensionTooSmall { width, height });
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::param("lambda", format!("must be > 0, got {lambda}")));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::param("c", format!("must be > 0, got {c}")));
        }
        let fft = Fft2d::new(width, height);

        // Operator spectra from the impulse responses of the same gradient
        // routine the iteration uses, so the two can never drift apart.
        let delta = ImagePlane::from_fn(width, height, |x, y| f64::from(x == 0 && y == 0));
        let grads = delta.forward_gradients()?;
        let mut dx = to_complex(grads.gx.data());
        let mut dy = to_complex(grads.gy.data());
        fft.forward(&mut dx);
        fft.forward(&mut dy);

        let denom: Vec<f64> = dx
            .iter()
            .zip(&dy)
            .map(|(x, y)| 1.0 + 0.5 * c * lambda * (x.norm_sqr() + y.norm_sqr()))
            .collect();
        debug_assert!(denom.iter().all(|&d| d >= 1.0));

        Ok(Self {
            width,
            height,
            lambda,
            c,
            denom,
            dx_conj: dx.iter().map(Complex::conj).collect(),
            dy_conj: dy.iter().map(Complex::conj).collect(),
            fft,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The surrogate constant the cache was built with.
    pub fn surrogate_constant(&self) -> f64 {
        self.c
    }

    pub fn denom(&self) -> &[f64] {
        &self.denom
    }

    /// Solves one least-squares iteration: returns the unique minimizer of
    /// the surrogate quadratic for data `f` and auxiliary field `mu`.
    pub fn solve_iteration(&self, f: &ImagePlane, mu: &MuField) -> Result<ImagePlane> {
        self.check_dims(f)?;
        self.check_dims(&mu.mux)?;
        self.check_dims(&mu.muy)?;

        let mut fh = to_complex(f.data());
        let mut mxh = to_complex(mu.mux.data());
        let mut myh = to_complex(mu.muy.data());
        self.fft.forward(&mut fh);
        self.fft.forward(&mut mxh);
        self.fft.forward(&mut myh);

        let half_lambda = 0.5 * self.lambda;
        for i in 0..fh.len() {
            let numerator =
                fh[i] + (self.dx_conj[i] * mxh[i] + self.dy_conj[i] * myh[i]) * half_lambda;
            fh[i] = numerator / self.denom[i];
        }

        self.fft.inverse(&mut fh);

        debug_assert!(
            fh.iter().map(|z| z.im.abs()).fold(0.0, f64::max) < 1e-8,
            "imaginary residue exceeded 1e-8 for real input"
        );
        let mut out = ImagePlane::filled(self.width, self.height, 0.0);
        for (dst, z) in out.data_mut().iter_mut().zip(&fh) {
            *dst = z.re;
        }
        Ok(out)
    }

    fn check_dims(&self, p: &ImagePlane) -> Result<()> {
        if p.width() != self.width || p.height() != self.height {
            return Err(Error::DimensionMismatch {
                expected_width: self.width,
                expected_height: self.height,
                width: p.width(),
                height: p.height(),
            });
        }
        Ok(())
    }
}

impl std::fmt::Debug for FreqCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FreqCache")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("lambda", &self.lambda)
            .field("c", &self.c)
            .finish_non_exhaustive()
    }
}

fn to_complex(data: &[f64]) -> Vec<Complex<f64>> {
    data.iter().map(|&v| Complex::new(v, 0.0)).collect()
}

/// Planned separable 2D FFT over row-major buffers.
struct Fft2d {
    width: usize,
    height: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Fft2d {
    fn new(width: usize, height: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            width,
            height,
            row_fwd: planner.plan_fft_forward(width),
            row_inv: planner.plan_fft_inverse(width),
            col_fwd: planner.plan_fft_forward(height),
            col_inv: planner.plan_fft_inverse(height),
        }
    }

    /// Unnormalized forward transform, in place.
    fn forward(&self, data: &mut [Complex<f64>]) {
        debug_assert_eq!(data.len(), self.width * self.height);
        self.row_fwd.process(data);
        let mut t = vec![Complex::new(0.0, 0.0); data.len()];
        transpose(data, self.width, self.height, &mut t);
        self.col_fwd.process(&mut t);
        transpose(&t, self.height, self.width, data);
    }

    /// Inverse transform with 1/(width*height) normalization, in place.
    fn inverse(&self, data: &mut [Complex<f64>]) {
        debug_assert_eq!(data.len(), self.width * self.height);
        self.row_inv.process(data);
        let mut t = vec![Complex::new(0.0, 0.0); data.len()];
        transpose(data, self.width, self.height, &mut t);
        self.col_inv.process(&mut t);
        transpose(&t, self.height, self.width, data);
        let scale = 1.0 / (self.width * self.height) as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }
}

fn transpose<T: Copy>(src: &[T], width: usize, height: usize, dst: &mut [T]) {
    debug_assert_eq!(src.len(), width * height);
    debug_assert_eq!(dst.len(), width * height);
    for y in 0..height {
        for x in 0..width {
            dst[x * height + y] = src[y * width + x];
        }
    }
}
