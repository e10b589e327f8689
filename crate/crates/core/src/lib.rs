//! Edge-preserving image smoothing by iterative least squares, with a
//! structure-aware weighted variant that removes high-contrast detail
//! while keeping weak structures.
//!
//! The pipeline, bottom to top:
//!
//! * [`image`] — planar image model, periodic forward differences,
//!   channel handling.
//! * [`freq`] — cached frequency-domain solves of the per-iteration
//!   least-squares problem.
//! * [`weights`] — interval gradients, structure scores and the per-axis
//!   weight field that turns gradients into guidance values.
//! * [`ils`] — the iteration driver for both the original and the
//!   weighted scheme.
//! * [`apps`] — detail enhancement and HDR tone mapping built on the
//!   base/detail decomposition.
//!
//! All operations are pure; images are immutable once constructed and
//! safe to share across threads.

pub mod apps;
pub mod error;
pub mod freq;
pub mod ils;
pub mod image;
pub mod weights;

pub use apps::{enhance, tonemap, EnhanceParams, TonemapParams};
pub use error::{Error, Result};
pub use freq::{FreqCache, MuField};
pub use ils::{
    energy, mu_update, penalty, smooth, smooth_plane, smooth_plane_with_cache, SmoothingMode,
    SmoothingParams, SmoothingReport,
};
pub use image::{GradientPair, ImagePlane, MultiChannelImage, RangeTag};
pub use weights::{
    build_weight_field, gamma_1d, interval_gradient_1d, omega_from_gamma, IntervalGradientParams,
    WeightField,
};
