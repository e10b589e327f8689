//! Applications built on the smoother: detail enhancement and HDR tone
//! mapping, both based on a base/detail decomposition.

use crate::error::{Error, Result};
use crate::image::{ImagePlane, MultiChannelImage, RangeTag};
use crate::ils::{smooth, smooth_plane, SmoothingMode, SmoothingParams};
use crate::weights::build_weight_field;

/// Detail enhancement settings.
#[derive(Debug, Clone)]
pub struct EnhanceParams {
    /// Detail multiplier applied to the residual layer.
    pub boost: f64,
    pub smoothing: SmoothingParams,
}

impl Default for EnhanceParams {
    fn default() -> Self {
        Self {
            boost: 3.0,
            smoothing: SmoothingParams::default(),
        }
    }
}

/// Tone mapping settings.
#[derive(Debug, Clone)]
pub struct TonemapParams {
    /// Contrast target for the base layer, in (0, 1]. 1 keeps the base
    /// untouched.
    pub compression: f64,
    /// Smoothing settings for the base layer. The base is always computed
    /// in weighted mode.
    pub smoothing: SmoothingParams,
    /// Additive guard before taking logarithms of luminance.
    pub log_floor: f64,
}

impl Default for TonemapParams {
    fn default() -> Self {
        Self {
            compression: 0.6,
            smoothing: SmoothingParams::default(),
            log_floor: 1e-6,
        }
    }
}

/// Boosts the residual detail layer on top of a smoothed base:
/// `out = clamp(base + boost * (img - base))`.
pub fn enhance(img: &MultiChannelImage, params: &EnhanceParams) -> Result<MultiChannelImage> {
    if !(params.boost.is_finite() && params.boost >= 0.0) {
        return Err(Error::param(
            "boost",
            format!("must be >= 0, got {}", params.boost),
        ));
    }
    let base = smooth(img, &params.smoothing)?;
    let channels: Vec<ImagePlane> = img
        .channels()
        .iter()
        .zip(base.channels())
        .map(|(ch, b)| {
            ch.zip_map(b, |v, bv| (bv + params.boost * (v - bv)).clamp(0.0, 1.0))
        })
        .collect::<Result<_>>()?;
    MultiChannelImage::new(channels, RangeTag::Unit)
}

/// Compresses the base layer of the log-luminance while keeping the
/// detail layer, then rebuilds colors by luminance ratio.
pub fn tonemap(hdr: &MultiChannelImage, params: &TonemapParams) -> Result<MultiChannelImage> {
    if !(params.compression.is_finite() && params.compression > 0.0 && params.compression <= 1.0) {
        return Err(Error::param(
            "compression",
            format!("must be in (0, 1], got {}", params.compression),
        ));
    }
    if !(params.log_floor.is_finite() && params.log_floor > 0.0) {
        return Err(Error::param(
            "log_floor",
            format!("must be > 0, got {}", params.log_floor),
        ));
    }
    if hdr.range() != RangeTag::Hdr {
        return Err(Error::WrongRangeTag {
            expected: RangeTag::Hdr,
        });
    }

    let luminance = hdr.luminance();
    let log_lum = luminance.map(|v| (v + params.log_floor).log10());

    // the solver and the weight computation both assume unit-range input,
    // so work in a normalized log domain and invert the map afterwards
    let lmin = log_lum.data().iter().cloned().fold(f64::INFINITY, f64::min);
    let lmax = log_lum
        .data()
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let span = (lmax - lmin).max(1e-12);
    let norm = log_lum.map(|v| ((v - lmin) / span).clamp(0.0, 1.0));

    let smoothing = SmoothingParams {
        mode: SmoothingMode::Weighted,
        ..params.smoothing.clone()
    };
    smoothing.validate()?;
    let field = build_weight_field(&norm, &smoothing.interval)?;
    let (base, _) = smooth_plane(&norm, &smoothing, Some(&field))?;

    let compressed = compress_base(base.data(), params.compression);
    let mut out_lum = vec![0.0; luminance.len()];
    for i in 0..out_lum.len() {
        let detail = norm.data()[i] - base.data()[i];
        let out_log = (compressed[i] + detail) * span + lmin;
        out_lum[i] = (10f64.powf(out_log) - params.log_floor).max(0.0);
    }

    let channels: Vec<ImagePlane> = hdr
        .channels()
        .iter()
        .map(|ch| {
            ImagePlane::from_fn(ch.width(), ch.height(), |x, y| {
                let i = y * ch.width() + x;
                let l = luminance.data()[i];
                let ratio = if l > 0.0 { out_lum[i] / l } else { 0.0 };
                (ch.get(x, y) * ratio).clamp(0.0, 1.0)
            })
        })
        .collect();
    MultiChannelImage::new(channels, RangeTag::Unit)
}

/// Affine base compression anchored at the brightest base value:
/// `compression * (b - max) + max`. Monotone for any compression > 0.
fn compress_base(base: &[f64], compression: f64) -> Vec<f64> {
    let bmax = base.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    base.iter()
        .map(|&b| compression * (b - bmax) + bmax)
        .collect()
}
