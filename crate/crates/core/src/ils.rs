//! The smoothing iteration driver.
//!
//! Both modes repeat the same two steps: turn the current iterate's
//! gradients into the auxiliary `mu` fields, then solve the resulting
//! least-squares problem in the frequency domain. They differ only in
//! what feeds the penalty: the original mode uses raw gradients, the
//! weighted mode first scales them by the per-axis weight field into
//! guidance values, so smoothing strength tracks structure rather than
//! gradient magnitude.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::freq::{FreqCache, MuField};
use crate::image::{ImagePlane, MultiChannelImage, RangeTag};
use crate::weights::{build_weight_field, IntervalGradientParams, WeightField};

/// Which quantity feeds the gradient penalty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothingMode {
    /// Raw gradients, the classic iterative least squares scheme.
    Original,
    /// Weighted gradients (guidance values) from a structure-aware field.
    Weighted,
}

/// All scalars of the smoothing objective plus the iteration budget.
#[derive(Debug, Clone)]
pub struct SmoothingParams {
    /// Smoothing strength. Recommended range [0.1, 1.0].
    pub lambda: f64,
    /// Norm power of the penalty, in (0, 1] for edge preservation.
    pub p: f64,
    /// Penalty stability constant.
    pub eps: f64,
    /// Fixed iteration count. Recommended range [2, 5].
    pub iterations: usize,
    pub mode: SmoothingMode,
    /// Weight-field parameters, used only in weighted mode.
    pub interval: IntervalGradientParams,
}

impl Default for SmoothingParams {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            p: 0.8,
            eps: 1e-4,
            iterations: 2,
            mode: SmoothingMode::Weighted,
            interval: IntervalGradientParams::default(),
        }
    }
}

impl SmoothingParams {
    /// The surrogate constant `c = p * eps^(p/2 - 1)`, recomputed from the
    /// current `p` and `eps` on every call.
    pub fn surrogate_constant(&self) -> f64 {
        self.p * self.eps.powf(self.p / 2.0 - 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::param(
                "lambda",
                format!("must be > 0, got {}", self.lambda),
            ));
        }
        if !(self.p.is_finite() && self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::param(
                "p",
                format!("must be in (0, 1], got {}", self.p),
            ));
        }
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::param(
                "eps",
                format!("must be > 0, got {}", self.eps),
            ));
        }
        if self.iterations == 0 {
            return Err(Error::param("iterations", "must be >= 1"));
        }
        if self.mode == SmoothingMode::Weighted {
            self.interval.validate()?;
        }
        Ok(())
    }
}

/// Per-run diagnostics.
#[derive(Debug, Clone, Default)]
pub struct SmoothingReport {
    /// Objective value after each iteration. Original mode only; empty in
    /// weighted mode, which has no stated closed-form objective.
    pub energies: Vec<f64>,
    /// Duration of each iteration (gradients, mu update, solve).
    pub wall_times: Vec<Duration>,
    pub iterations_run: usize,
}

/// Sub-quadratic gradient penalty `(d^2 + eps)^(p/2)`.
///
/// Callers keep `|d| <= 1`; gradients of unit-range images satisfy this
/// by construction.
pub fn penalty(d: f64, p: f64, eps: f64) -> f64 {
    debug_assert!(d.abs() <= 1.0 + 1e-9, "penalty argument {d} out of range");
    (d * d + eps).powf(p / 2.0)
}

/// Auxiliary update `mu = c g - p g (g^2 + eps)^(p/2 - 1)`, an odd
/// function of `g`. `c` must equal `p * eps^(p/2 - 1)`.
pub fn mu_update(g: f64, p: f64, eps: f64, c: f64) -> f64 {
    debug_assert!(g.abs() <= 1.0 + 1e-9, "mu argument {g} out of range");
    c * g - p * g * (g * g + eps).powf(p / 2.0 - 1.0)
}

/// The smoothing objective: data fidelity plus the gradient penalty on
/// both axes.
pub fn energy(u: &ImagePlane, f: &ImagePlane, lambda: f64, p: f64, eps: f64) -> Result<f64> {
    crate::image::check_same_size(u, f)?;
    let grads = u.forward_gradients()?;
    let mut total = 0.0;
    for i in 0..u.len() {
        let d = u.data()[i] - f.data()[i];
        total += d * d + lambda * (penalty(grads.gx.data()[i], p, eps) + penalty(grads.gy.data()[i], p, eps));
    }
    Ok(total)
}

/// Smooths one plane, building a fresh frequency cache for its size.
pub fn smooth_plane(
    f: &ImagePlane,
    params: &SmoothingParams,
    weights: Option<&WeightField>,
) -> Result<(ImagePlane, SmoothingReport)> {
    params.validate()?;
    let cache = FreqCache::new(
        f.width(),
        f.height(),
        params.lambda,
        params.surrogate_constant(),
    )?;
    smooth_plane_with_cache(f, params, weights, &cache)
}

/// Smooths one plane reusing a prebuilt cache (shared across channels).
pub fn smooth_plane_with_cache(
    f: &ImagePlane,
    params: &SmoothingParams,
    weights: Option<&WeightField>,
    cache: &FreqCache,
) -> Result<(ImagePlane, SmoothingReport)> {
    params.validate()?;
    if f.width() != cache.width() || f.height() != cache.height() {
        return Err(Error::DimensionMismatch {
            expected_width: cache.width(),
            expected_height: cache.height(),
            width: f.width(),
            height: f.height(),
        });
    }
    if cache.lambda() != params.lambda || cache.surrogate_constant() != params.surrogate_constant()
    {
        return Err(Error::param(
            "cache",
            "frequency cache was built for different lambda or penalty constants",
        ));
    }
    if let Some((index, &value)) = f
        .data()
        .iter()
        .enumerate()
        .find(|(_, v)| !(-1e-9..=1.0 + 1e-9).contains(*v))
    {
        return Err(Error::OutOfUnitRange { index, value });
    }
    let weights = match (params.mode, weights) {
        (SmoothingMode::Weighted, Some(w)) => {
            if w.width() != f.width() || w.height() != f.height() {
                return Err(Error::DimensionMismatch {
                    expected_width: f.width(),
                    expected_height: f.height(),
                    width: w.width(),
                    height: w.height(),
                });
            }
            Some(w)
        }
        (SmoothingMode::Weighted, None) => return Err(Error::MissingWeights),
        (SmoothingMode::Original, Some(_)) => return Err(Error::UnexpectedWeights),
        (SmoothingMode::Original, None) => None,
    };

    let c = params.surrogate_constant();
    let (w, h) = (f.width(), f.height());
    let mut report = SmoothingReport::default();
    let mut u = f.clone();

    for _ in 0..params.iterations {
        let started = Instant::now();
        let grads = u.forward_gradients()?;

        let mut mux = vec![0.0; w * h];
        let mut muy = vec![0.0; w * h];
        for i in 0..w * h {
            let (idx, idy) = match weights {
                Some(field) => (
                    field.wx().data()[i] * grads.gx.data()[i],
                    field.wy().data()[i] * grads.gy.data()[i],
                ),
                None => (grads.gx.data()[i], grads.gy.data()[i]),
            };
            debug_assert!(idx.abs() <= 1.0 + 1e-9 && idy.abs() <= 1.0 + 1e-9);
            mux[i] = mu_update(idx, params.p, params.eps, c);
            muy[i] = mu_update(idy, params.p, params.eps, c);
        }
        let mu = MuField::new(
            ImagePlane::new(w, h, mux)?,
            ImagePlane::new(w, h, muy)?,
        )?;

        u = cache.solve_iteration(f, &mu)?;
        report.wall_times.push(started.elapsed());
        report.iterations_run += 1;

        if params.mode == SmoothingMode::Original {
            report
                .energies
                .push(energy(&u, f, params.lambda, params.p, params.eps)?);
        }
    }

    Ok((u.map(|v| v.clamp(0.0, 1.0)), report))
}

/// Smooths every channel of a unit-range image.
///
/// In weighted mode a single weight field is computed from the luminance
/// plane and shared by all channels, which keeps them aligned; the
/// frequency cache is likewise built once. Channels run in parallel.
pub fn smooth(img: &MultiChannelImage, params: &SmoothingParams) -> Result<MultiChannelImage> {
    params.validate()?;
    if img.range() != RangeTag::Unit {
        return Err(Error::WrongRangeTag {
            expected: RangeTag::Unit,
        });
    }
    let cache = FreqCache::new(
        img.width(),
        img.height(),
        params.lambda,
        params.surrogate_constant(),
    )?;
    let weights = match params.mode {
        SmoothingMode::Weighted => Some(build_weight_field(&img.luminance(), &params.interval)?),
        SmoothingMode::Original => None,
    };

    let planes: Vec<ImagePlane> = img
        .channels()
        .par_iter()
        .map(|ch| smooth_plane_with_cache(ch, params, weights.as_ref(), &cache).map(|(u, _)| u))
        .collect::<Result<_>>()?;
    MultiChannelImage::new(planes, RangeTag::Unit)
}
