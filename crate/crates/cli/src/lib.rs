//! Command-line front end: argument parsing, dispatch, exit codes.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use ilsmooth::{
    build_weight_field, enhance, smooth, tonemap, EnhanceParams, IntervalGradientParams,
    MultiChannelImage, RangeTag, SmoothingMode, SmoothingParams, TonemapParams,
};

pub mod bench;
pub mod io;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_PARAM: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

const EXIT_HELP: &str = "Exit codes:
  0  success
  2  usage error (unknown flag or malformed invocation)
  3  I/O error (missing or unwritable file, corrupt or unsupported format)
  4  parameter or input out of range for the requested operation
  5  internal error";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] io::IoError),
    #[error("{flag}: {reason}")]
    Param { flag: String, reason: String },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => EXIT_IO,
            CliError::Param { .. } => EXIT_PARAM,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn param(flag: &str, reason: impl Into<String>) -> Self {
        CliError::Param {
            flag: flag.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn from_lib(e: ilsmooth::Error) -> Self {
        use ilsmooth::Error;
        match e {
            Error::InvalidParameter { name, reason } => CliError::Param {
                flag: flag_for(name),
                reason,
            },
            Error::DimensionTooSmall { width, height } => CliError::param(
                "input",
                format!("image must be at least 2x2, got {width}x{height}"),
            ),
            Error::WrongRangeTag { expected } => CliError::param(
                "input",
                match expected {
                    RangeTag::Unit => "operation requires a unit-range image (8-bit PNG)",
                    RangeTag::Hdr => "operation requires an HDR image (PFM)",
                },
            ),
            Error::OutOfUnitRange { value, .. } => CliError::param(
                "input",
                format!("values must lie in [0, 1], found {value}"),
            ),
            other => CliError::Internal(other.to_string()),
        }
    }
}

/// Maps a library parameter name to the flag the user typed.
fn flag_for(name: &str) -> String {
    match name {
        "iterations" => "--iters".to_string(),
        other => format!("--{}", other.replace('_', "-")),
    }
}

#[derive(Parser)]
#[command(
    name = "ilsmooth",
    version,
    about = "Edge-preserving image smoothing via iterative least squares",
    after_help = EXIT_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Original,
    Weighted,
}

impl From<ModeArg> for SmoothingMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Original => SmoothingMode::Original,
            ModeArg::Weighted => SmoothingMode::Weighted,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Original,
    Weighted,
    Both,
}

#[derive(Args, Clone)]
struct SmoothingFlags {
    /// Smoothing strength (> 0)
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    lambda: f64,
    /// Iteration count (>= 1)
    #[arg(long = "iters", default_value_t = 2)]
    iters: usize,
    /// Scale of the one-sided averaging window, in pixels (>= 1)
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    sigma: f64,
    /// Norm power of the gradient penalty, in (0, 1]
    #[arg(long, default_value_t = 0.8, allow_negative_numbers = true)]
    p: f64,
    /// Penalty stability constant (> 0)
    #[arg(long, default_value_t = 1e-4, allow_negative_numbers = true)]
    eps: f64,
    /// Sharpness of the weight transition (> 0); defaults to sigma
    #[arg(long = "sigma-s", allow_negative_numbers = true)]
    sigma_s: Option<f64>,
    /// Stability constant of the structure score (> 0)
    #[arg(long = "eps-s", default_value_t = 1e-4, allow_negative_numbers = true)]
    eps_s: f64,
}

impl SmoothingFlags {
    fn params(&self, mode: SmoothingMode) -> Result<SmoothingParams, CliError> {
        let mut interval = IntervalGradientParams::new(self.sigma);
        if let Some(sigma_s) = self.sigma_s {
            interval.sigma_s = sigma_s;
        }
        interval.eps_s = self.eps_s;
        let params = SmoothingParams {
            lambda: self.lambda,
            p: self.p,
            eps: self.eps,
            iterations: self.iters,
            mode,
            interval,
        };
        params.validate().map_err(CliError::from_lib)?;
        Ok(params)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Smooth an image (8-bit PNG in, PNG out)
    Smooth {
        #[command(flatten)]
        flags: SmoothingFlags,
        /// Penalty input: raw gradients (original) or weighted guidance values
        #[arg(long, value_enum, default_value_t = ModeArg::Weighted)]
        mode: ModeArg,
        /// Also write the x/y weight maps as grayscale PNGs derived from this path
        #[arg(long, value_name = "PATH")]
        dump_weights: Option<PathBuf>,
        input: PathBuf,
        output: PathBuf,
    },
    /// Boost detail on top of a smoothed base layer
    Enhance {
        /// Detail multiplier (>= 0)
        #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
        boost: f64,
        #[command(flatten)]
        flags: SmoothingFlags,
        /// Penalty input for the base layer
        #[arg(long, value_enum, default_value_t = ModeArg::Weighted)]
        mode: ModeArg,
        input: PathBuf,
        output: PathBuf,
    },
    /// Compress an HDR image (PFM) into a displayable unit-range image
    Tonemap {
        /// Base-layer contrast target, in (0, 1]
        #[arg(long, default_value_t = 0.6, allow_negative_numbers = true)]
        compression: f64,
        /// Additive guard before taking logarithms (> 0)
        #[arg(long = "log-floor", default_value_t = 1e-6, allow_negative_numbers = true)]
        log_floor: f64,
        #[command(flatten)]
        flags: SmoothingFlags,
        input: PathBuf,
        output: PathBuf,
    },
    /// Time the smoothing methods on an input image
    Bench {
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[command(flatten)]
        flags: SmoothingFlags,
        /// Iteration count for the original method; defaults to --iters
        #[arg(long = "orig-iters")]
        orig_iters: Option<usize>,
        /// Write one CSV row per timed method to this path
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        input: PathBuf,
    },
    /// Compute the per-axis weight maps and save them as grayscale PNGs
    Weights {
        /// Scale of the one-sided averaging window, in pixels (>= 1)
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        sigma: f64,
        /// Sharpness of the weight transition (> 0); defaults to sigma
        #[arg(long = "sigma-s", allow_negative_numbers = true)]
        sigma_s: Option<f64>,
        /// Stability constant of the structure score (> 0)
        #[arg(long = "eps-s", default_value_t = 1e-4, allow_negative_numbers = true)]
        eps_s: f64,
        input: PathBuf,
        output: PathBuf,
    },
}

/// Parses `argv` and runs the selected subcommand, returning the process
/// exit status. Diagnostics go to stderr as a single line.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    EXIT_OK
                }
                _ => {
                    let rendered = e.to_string();
                    eprintln!("{}", rendered.lines().next().unwrap_or("error: bad usage"));
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Smooth {
            flags,
            mode,
            dump_weights,
            input,
            output,
        } => {
            let params = flags.params(mode.into())?;
            let img = load_unit(&input)?;
            if let Some(path) = &dump_weights {
                dump_weight_maps(&img, &params.interval, path)?;
            }
            let out = smooth(&img, &params).map_err(CliError::from_lib)?;
            io::save_image(&out, &output)?;
            Ok(())
        }
        Command::Enhance {
            boost,
            flags,
            mode,
            input,
            output,
        } => {
            if !(boost.is_finite() && boost >= 0.0) {
                return Err(CliError::param(
                    "--boost",
                    format!("must be >= 0, got {boost}"),
                ));
            }
            let params = EnhanceParams {
                boost,
                smoothing: flags.params(mode.into())?,
            };
            let img = load_unit(&input)?;
            let out = enhance(&img, &params).map_err(CliError::from_lib)?;
            io::save_image(&out, &output)?;
            Ok(())
        }
        Command::Tonemap {
            compression,
            log_floor,
            flags,
            input,
            output,
        } => {
            if !(compression.is_finite() && compression > 0.0 && compression <= 1.0) {
                return Err(CliError::param(
                    "--compression",
                    format!("must be in (0, 1], got {compression}"),
                ));
            }
            if !(log_floor.is_finite() && log_floor > 0.0) {
                return Err(CliError::param(
                    "--log-floor",
                    format!("must be > 0, got {log_floor}"),
                ));
            }
            let params = TonemapParams {
                compression,
                log_floor,
                smoothing: flags.params(SmoothingMode::Weighted)?,
            };
            let img = io::load_image(&input)?;
            if img.range() != RangeTag::Hdr {
                return Err(CliError::param(
                    "input",
                    "tonemap requires an HDR input (PFM)",
                ));
            }
            let out = tonemap(&img, &params).map_err(CliError::from_lib)?;
            io::save_image(&out, &output)?;
            Ok(())
        }
        Command::Bench {
            method,
            flags,
            orig_iters,
            csv,
            input,
        } => {
            let weighted = flags.params(SmoothingMode::Weighted)?;
            let mut original = flags.params(SmoothingMode::Original)?;
            if let Some(n) = orig_iters {
                original.iterations = n;
                original.validate().map_err(CliError::from_lib)?;
            }
            let img = load_unit(&input)?;

            let mut records = Vec::new();
            if matches!(method, MethodArg::Original | MethodArg::Both) {
                records.push(bench::time_method(&img, &original)?);
            }
            if matches!(method, MethodArg::Weighted | MethodArg::Both) {
                records.push(bench::time_method(&img, &weighted)?);
            }

            println!("{}", bench::CSV_HEADER);
            for record in &records {
                println!("{}", record.csv_row());
            }
            if let Some(path) = csv {
                std::fs::write(&path, bench::write_csv(&records)).map_err(|e| {
                    io::IoError::File {
                        path: path.display().to_string(),
                        source: e,
                    }
                })?;
            }
            Ok(())
        }
        Command::Weights {
            sigma,
            sigma_s,
            eps_s,
            input,
            output,
        } => {
            let mut interval = IntervalGradientParams::new(sigma);
            if let Some(sigma_s) = sigma_s {
                interval.sigma_s = sigma_s;
            }
            interval.eps_s = eps_s;
            interval.validate().map_err(CliError::from_lib)?;
            let img = load_unit(&input)?;
            dump_weight_maps(&img, &interval, &output)?;
            Ok(())
        }
    }
}

fn load_unit(path: &Path) -> Result<MultiChannelImage, CliError> {
    let img = io::load_image(path)?;
    if img.range() != RangeTag::Unit {
        return Err(CliError::param(
            "input",
            "operation requires a unit-range image (8-bit PNG)",
        ));
    }
    Ok(img)
}

/// `out.png` becomes `out.x.png` and `out.y.png`.
fn weight_map_paths(path: &Path) -> (PathBuf, PathBuf) {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "weights".to_string());
    let ext = path
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "png".to_string());
    let named = |axis: &str| path.with_file_name(format!("{stem}.{axis}.{ext}"));
    (named("x"), named("y"))
}

fn dump_weight_maps(
    img: &MultiChannelImage,
    interval: &IntervalGradientParams,
    path: &Path,
) -> Result<(), CliError> {
    let field = build_weight_field(&img.luminance(), interval).map_err(CliError::from_lib)?;
    let (x_path, y_path) = weight_map_paths(path);
    for (plane, path) in [(field.wx(), &x_path), (field.wy(), &y_path)] {
        let gray = MultiChannelImage::gray(plane.clone(), RangeTag::Unit)
            .map_err(CliError::from_lib)?;
        io::save_image(&gray, path)?;
    }
    Ok(())
}
