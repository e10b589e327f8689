//! Structure-aware weight computation.
//!
//! A pixel's one-sided window means (a right mean minus a left mean,
//! Gaussian-weighted and wrapping periodically) form the interval
//! gradient. Comparing its magnitude against the pointwise forward
//! difference yields a structure score `gamma` in (0, 1]: near 1 across
//! clean edges, small on isolated oscillatory detail. A sharpened sigmoid
//! maps `gamma` to the weight `omega` in (0, 1] that later scales raw
//! gradients into guidance values.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{check_same_size, ImagePlane};

/// Parameters of the one-sided window statistics and the weight mapping.
#[derive(Debug, Clone, Copy)]
pub struct IntervalGradientParams {
    /// Scale of the one-sided Gaussian window, in pixels.
    pub sigma: f64,
    /// Sharpness of the weight transition. Defaults to `sigma`.
    pub sigma_s: f64,
    /// Stability constant of the structure score.
    pub eps_s: f64,
    /// Extent of each one-sided window, in pixels.
    pub window_radius: usize,
}

impl IntervalGradientParams {
    /// Defaults derived from `sigma`: `sigma_s = sigma`, `eps_s = 1e-4`,
    /// `window_radius = ceil(3 sigma)` (covers over 99% of the Gaussian
    /// mass).
    pub fn new(sigma: f64) -> Self {
        Self {
            sigma,
            sigma_s: sigma,
            eps_s: 1e-4,
            window_radius: (3.0 * sigma).ceil() as usize,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 1.0) {
            return Err(Error::param(
                "sigma",
                format!("must be >= 1, got {}", self.sigma),
            ));
        }
        if !(self.sigma_s.is_finite() && self.sigma_s > 0.0) {
            return Err(Error::param(
                "sigma_s",
                format!("must be > 0, got {}", self.sigma_s),
            ));
        }
        if !(self.eps_s.is_finite() && self.eps_s > 0.0) {
            return Err(Error::param(
                "eps_s",
                format!("must be > 0, got {}", self.eps_s),
            ));
        }
        if self.window_radius < 1 {
            return Err(Error::param("window_radius", "must be >= 1"));
        }
        Ok(())
    }
}

impl Default for IntervalGradientParams {
    fn default() -> Self {
        Self::new(2.0)
    }
}

/// Per-axis weight maps, every value in (0, 1].
#[derive(Debug, Clone)]
pub struct WeightField {
    wx: ImagePlane,
    wy: ImagePlane,
}

impl WeightField {
    /// Builds a field from explicit per-axis maps, validating the range.
    pub fn new(wx: ImagePlane, wy: ImagePlane) -> Result<Self> {
        check_same_size(&wx, &wy)?;
        for plane in [&wx, &wy] {
            for (index, &value) in plane.data().iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::OutOfUnitRange { index, value });
                }
            }
        }
        Ok(Self { wx, wy })
    }

    pub fn wx(&self) -> &ImagePlane {
        &self.wx
    }

    pub fn wy(&self) -> &ImagePlane {
        &self.wy
    }

    pub fn width(&self) -> usize {
        self.wx.width()
    }

    pub fn height(&self) -> usize {
        self.wx.height()
    }
}

/// One-sided window gradient and pointwise forward difference of a 1D
/// signal, both wrapping periodically.
///
/// Returns `(ig, fg)` where `fg[q] = signal[q+1] - signal[q]` and `ig[q]`
/// is the normalized Gaussian-weighted mean over `q+1 ..= q+radius` minus
/// the one over `q-radius+1 ..= q`.
pub fn interval_gradient_1d(
    signal: &[f64],
    params: &IntervalGradientParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    params.validate()?;
    let n = signal.len();
    if n < 2 {
        return Err(Error::SignalTooShort(n));
    }
    let radius = params.window_radius;
    let gauss: Vec<f64> = (0..radius)
        .map(|j| (-((j * j) as f64) / (2.0 * params.sigma * params.sigma)).exp())
        .collect();
    let norm: f64 = gauss.iter().sum();

    let mut ig = Vec::with_capacity(n);
    let mut fg = Vec::with_capacity(n);
    for q in 0..n {
        let mut right = 0.0;
        let mut left = 0.0;
        for (j, &w) in gauss.iter().enumerate() {
            right += w * signal[(q + 1 + j) % n];
            left += w * signal[(q + n - (j % n)) % n];
        }
        ig.push(right / norm - left / norm);
        fg.push(signal[(q + 1) % n] - signal[q]);
    }
    Ok((ig, fg))
}

/// Structure score: `min(1, (|ig| + eps_s) / (|fg| + eps_s))`, in (0, 1].
pub fn gamma_1d(ig: &[f64], fg: &[f64], eps_s: f64) -> Result<Vec<f64>> {
    if ig.len() != fg.len() {
        return Err(Error::LengthMismatch(ig.len(), fg.len()));
    }
    if !(eps_s.is_finite() && eps_s > 0.0) {
        return Err(Error::param("eps_s", format!("must be > 0, got {eps_s}")));
    }
    Ok(ig
        .iter()
        .zip(fg)
        .map(|(&i, &f)| ((i.abs() + eps_s) / (f.abs() + eps_s)).min(1.0))
        .collect())
}

/// Sigmoid weight: `2 / (1 + exp(-(2 sigma_s + 1) (gamma - 1)))`, in (0, 1].
///
/// A score of 1 maps to weight 1 exactly; scores toward 0 collapse the
/// weight toward 0 at a rate set by `sigma_s`.
pub fn omega_from_gamma(gamma: &[f64], sigma_s: f64) -> Result<Vec<f64>> {
    if !(sigma_s.is_finite() && sigma_s > 0.0) {
        return Err(Error::param(
            "sigma_s",
            format!("must be > 0, got {sigma_s}"),
        ));
    }
    if let Some(&value) = gamma.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(Error::param(
            "gamma",
            format!("must be in [0, 1], got {value}"),
        ));
    }
    let steepness = 2.0 * sigma_s + 1.0;
    Ok(gamma
        .iter()
        .map(|&g| 2.0 / (1.0 + (-steepness * (g - 1.0)).exp()))
        .collect())
}

fn weight_signal(signal: &[f64], params: &IntervalGradientParams) -> Result<Vec<f64>> {
    let (ig, fg) = interval_gradient_1d(signal, params)?;
    let gamma = gamma_1d(&ig, &fg, params.eps_s)?;
    omega_from_gamma(&gamma, params.sigma_s)
}

/// Runs the interval-gradient / score / weight pipeline along every row
/// (for `wx`) and every column (for `wy`) of a unit-range guide plane.
pub fn build_weight_field(
    guide: &ImagePlane,
    params: &IntervalGradientParams,
) -> Result<WeightField> {
    params.validate()?;
    if guide.width() < 2 || guide.height() < 2 {
        return Err(Error::DimensionTooSmall {
            width: guide.width(),
            height: guide.height(),
        });
    }
    if let Some((index, &value)) = guide
        .data()
        .iter()
        .enumerate()
        .find(|(_, v)| !(-1e-9..=1.0 + 1e-9).contains(*v))
    {
        return Err(Error::OutOfUnitRange { index, value });
    }

    let (w, h) = (guide.width(), guide.height());

    let wx_rows: Vec<Vec<f64>> = (0..h)
        .into_par_iter()
        .map(|y| weight_signal(guide.row(y), params))
        .collect::<Result<_>>()?;
    let mut wx = Vec::with_capacity(w * h);
    for row in wx_rows {
        wx.extend(row);
    }

    // columns become rows of the transposed plane
    let mut transposed = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            transposed[x * h + y] = guide.get(x, y);
        }
    }
    let wy_cols: Vec<Vec<f64>> = (0..w)
        .into_par_iter()
        .map(|x| weight_signal(&transposed[x * h..(x + 1) * h], params))
        .collect::<Result<_>>()?;
    let mut wy = vec![0.0; w * h];
    for (x, col) in wy_cols.iter().enumerate() {
        for (y, &value) in col.iter().enumerate() {
            wy[y * w + x] = value;
        }
    }

    WeightField::new(
        ImagePlane::new(w, h, wx)?,
        ImagePlane::new(w, h, wy)?,
    )
}
