//! Planar image model: single-channel planes, multi-channel containers,
//! periodic forward differences and the pixel-wise helpers built on them.
//!
//! All boundaries are periodic: the right neighbor of the last column is
//! the first column, and likewise vertically. This matches the frequency
//! domain solver, which assumes the same wrap-around convention.

use crate::error::{Error, Result};

/// A single channel of real-valued intensities, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePlane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ImagePlane {
    /// Builds a plane from row-major data, validating the length and that
    /// every value is finite.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(Error::BadDataLength {
                width,
                height,
                len: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// A plane with every pixel set to `value`.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    /// Builds a plane by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub(crate) fn from_raw(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn same_size(&self, other: &ImagePlane) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Pixel-wise map into a new plane.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ImagePlane {
        ImagePlane::from_raw(
            self.width,
            self.height,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Pixel-wise combination of two equally sized planes.
    pub fn zip_map(&self, other: &ImagePlane, f: impl Fn(f64, f64) -> f64) -> Result<ImagePlane> {
        check_same_size(self, other)?;
        Ok(ImagePlane::from_raw(
            self.width,
            self.height,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    /// Forward differences along x and y with periodic wrap-around.
    ///
    /// `gx[s] = p[right(s)] - p[s]`, `gy[s] = p[down(s)] - p[s]`.
    pub fn forward_gradients(&self) -> Result<GradientPair> {
        if self.width < 2 || self.height < 2 {
            return Err(Error::DimensionTooSmall {
                width: self.width,
                height: self.height,
            });
        }
        let (w, h) = (self.width, self.height);
        let mut gx = vec![0.0; w * h];
        let mut gy = vec![0.0; w * h];
        for y in 0..h {
            let row = y * w;
            let down = ((y + 1) % h) * w;
            for x in 0..w {
                let right = (x + 1) % w;
                gx[row + x] = self.data[row + right] - self.data[row + x];
                gy[row + x] = self.data[down + x] - self.data[row + x];
            }
        }
        Ok(GradientPair {
            gx: ImagePlane::from_raw(w, h, gx),
            gy: ImagePlane::from_raw(w, h, gy),
        })
    }
}

/// Forward-difference gradients of a plane, one component per axis.
#[derive(Debug, Clone)]
pub struct GradientPair {
    pub gx: ImagePlane,
    pub gy: ImagePlane,
}

/// Value range an image claims to be in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeTag {
    /// Every value in [0, 1].
    Unit,
    /// Nonnegative, unbounded (linear radiance).
    Hdr,
}

/// Tolerance allowed when validating `RangeTag::Unit` on construction.
pub const UNIT_RANGE_TOLERANCE: f64 = 1e-9;

/// One or three equally sized planes plus a value-range tag.
#[derive(Debug, Clone)]
pub struct MultiChannelImage {
    channels: Vec<ImagePlane>,
    range: RangeTag,
}

impl MultiChannelImage {
    /// Validates channel count (1 or 3), matching dimensions and that the
    /// data respects the claimed range tag.
    pub fn new(channels: Vec<ImagePlane>, range: RangeTag) -> Result<Self> {
        if channels.len() != 1 && channels.len() != 3 {
            return Err(Error::UnsupportedChannels(channels.len()));
        }
        let first = &channels[0];
        for ch in &channels[1..] {
            check_same_size(first, ch)?;
        }
        for ch in &channels {
            for (index, &value) in ch.data().iter().enumerate() {
                match range {
                    RangeTag::Unit => {
                        if !(-UNIT_RANGE_TOLERANCE..=1.0 + UNIT_RANGE_TOLERANCE).contains(&value) {
                            return Err(Error::OutOfUnitRange { index, value });
                        }
                    }
                    RangeTag::Hdr => {
                        if value < 0.0 {
                            return Err(Error::NegativeValue { index, value });
                        }
                    }
                }
            }
        }
        Ok(Self { channels, range })
    }

    /// Single-channel image.
    pub fn gray(plane: ImagePlane, range: RangeTag) -> Result<Self> {
        Self::new(vec![plane], range)
    }

    pub fn channels(&self) -> &[ImagePlane] {
        &self.channels
    }

    pub fn into_channels(self) -> Vec<ImagePlane> {
        self.channels
    }

    pub fn range(&self) -> RangeTag {
        self.range
    }

    pub fn width(&self) -> usize {
        self.channels[0].width()
    }

    pub fn height(&self) -> usize {
        self.channels[0].height()
    }

    /// Luminance plane: a copy for gray images, Rec.601 weighting for RGB.
    pub fn luminance(&self) -> ImagePlane {
        match self.channels.as_slice() {
            [gray] => gray.clone(),
            [r, g, b] => ImagePlane::from_raw(
                r.width(),
                r.height(),
                r.data()
                    .iter()
                    .zip(g.data())
                    .zip(b.data())
                    .map(|((&r, &g), &b)| 0.299 * r + 0.587 * g + 0.114 * b)
                    .collect(),
            ),
            // channel count is validated on construction
            _ => unreachable!("channel count validated at construction"),
        }
    }

    /// Clips every value to [0, 1] and retags the image as unit range.
    pub fn clamp_unit(&self) -> MultiChannelImage {
        MultiChannelImage {
            channels: self
                .channels
                .iter()
                .map(|ch| ch.map(|v| v.clamp(0.0, 1.0)))
                .collect(),
            range: RangeTag::Unit,
        }
    }
}

pub(crate) fn check_same_size(a: &ImagePlane, b: &ImagePlane) -> Result<()> {
    if !a.same_size(b) {
        return Err(Error::DimensionMismatch {
            expected_width: a.width(),
            expected_height: a.height(),
            width: b.width(),
            height: b.height(),
        });
    }
    Ok(())
}
