//! Wall-clock benchmark of the smoothing methods.
//!
//! Timing covers the smooth call only; decode and encode stay outside the
//! measured region.

use std::time::Instant;

use ilsmooth::{smooth, MultiChannelImage, SmoothingMode, SmoothingParams};

use crate::CliError;

/// One timed run of one method.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub method: &'static str,
    pub lambda: f64,
    pub iterations: usize,
    pub sigma: f64,
    pub width: usize,
    pub height: usize,
    pub wall_time_total_s: f64,
    pub wall_time_per_iter_s: f64,
}

pub const CSV_HEADER: &str =
    "method,lambda,iterations,sigma,width,height,wall_time_total_s,wall_time_per_iter_s";

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.6},{:.6}",
            self.method,
            self.lambda,
            self.iterations,
            self.sigma,
            self.width,
            self.height,
            self.wall_time_total_s,
            self.wall_time_per_iter_s
        )
    }
}

/// Times one smooth run and folds the result into a record.
pub fn time_method(
    img: &MultiChannelImage,
    params: &SmoothingParams,
) -> Result<BenchRecord, CliError> {
    let method = match params.mode {
        SmoothingMode::Original => "original",
        SmoothingMode::Weighted => "weighted",
    };
    let started = Instant::now();
    smooth(img, params).map_err(CliError::from_lib)?;
    let total = started.elapsed().as_secs_f64();
    Ok(BenchRecord {
        method,
        lambda: params.lambda,
        iterations: params.iterations,
        sigma: params.interval.sigma,
        width: img.width(),
        height: img.height(),
        wall_time_total_s: total,
        wall_time_per_iter_s: total / params.iterations as f64,
    })
}

pub fn write_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for record in records {
        out.push_str(&record.csv_row());
        out.push('\n');
    }
    out
}
