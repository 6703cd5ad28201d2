//! Command-line front end.
//!
//! Images are read and written as PGM (P5) or PNG, picked by file extension.
//! Outputs keep the bit depth of the input file.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::image::{load_image, save_image, BitDepth, Decoded, Image, ImageFormat, Orientation};
use crate::metrics::{rmse, tv_norm};
use crate::mire::{auto_sigma_oriented, mire_correct, MireConfig, DEFAULT_SIGMA_GRID};
use crate::report::{Method, MetricsReport, TracePoint};
use crate::simulate::{simulate_nu, NuParams};
use crate::{scene, tv_baseline};

#[derive(Debug, Parser)]
#[command(
    name = "mire",
    version,
    about = "Column/line fixed-pattern noise removal for single infrared frames"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equalize column (or line) histograms against their Gaussian-weighted neighborhood.
    Correct(CorrectArgs),
    /// Column-offset baseline minimizing horizontal total variation.
    TvCorrect(TvCorrectArgs),
    /// Corrupt a clean image with random per-column gains, offsets and pixel noise.
    Simulate(SimulateArgs),
    /// Print the RMSE between a reference image and a candidate.
    Evaluate(EvaluateArgs),
    /// Tabulate total variation of the corrected image over a list of sigmas.
    Sweep(SweepArgs),
    /// Render a synthetic test scene.
    Scene(SceneArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrientationArg {
    Columns,
    Lines,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::Columns => Orientation::Columns,
            OrientationArg::Lines => Orientation::Lines,
        }
    }
}

#[derive(Debug, Args)]
pub struct CorrectArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    /// Fixed Gaussian standard deviation, in columns.
    #[arg(long, conflicts_with = "auto", required_unless_present = "auto")]
    pub sigma: Option<f64>,
    /// Choose sigma by minimizing total variation over the grid, then refine.
    #[arg(long)]
    pub auto: bool,
    /// Comma-separated, ascending sigma candidates for --auto.
    #[arg(long, value_delimiter = ',', requires = "auto")]
    pub grid: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "columns")]
    pub orientation: OrientationArg,
    /// Write a JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Clean reference image; fills `rmse_vs_truth` in the report.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TvCorrectArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "columns")]
    pub orientation: OrientationArg,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    #[arg(long, default_value_t = NuParams::default().gain_std)]
    pub gain_std: f64,
    #[arg(long, default_value_t = NuParams::default().offset_std)]
    pub offset_std: f64,
    #[arg(long, default_value_t = NuParams::default().noise_std)]
    pub noise_std: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the drawn gains and offsets as JSON.
    #[arg(long)]
    pub ground_truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub truth: PathBuf,
    pub candidate: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "columns")]
    pub orientation: OrientationArg,
    /// CSV destination; printed to stdout when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also write each corrected image into this directory.
    #[arg(long)]
    pub save_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SceneKind {
    Landscape,
    Fractal,
    Texture,
}

#[derive(Debug, Args)]
pub struct SceneArgs {
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "landscape")]
    pub kind: SceneKind,
    #[arg(long, default_value_t = 256)]
    pub width: usize,
    #[arg(long, default_value_t = 256)]
    pub height: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 16)]
    pub bit_depth: u32,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Correct(args) => cmd_correct(&args),
        Command::TvCorrect(args) => cmd_tv_correct(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Evaluate(args) => cmd_evaluate(&args).map(|v| println!("{v}")),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Scene(args) => cmd_scene(&args),
    }
}

pub fn read_image(path: &Path) -> Result<Decoded> {
    let format = ImageFormat::from_path(path)?;
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    load_image(&bytes, format).with_context(|| format!("decoding {}", path.display()))
}

pub fn write_image(path: &Path, img: &Image, depth: BitDepth) -> Result<()> {
    let format = ImageFormat::from_path(path)?;
    let bytes = save_image(img, format, depth)?;
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn truth_rmse(truth: Option<&Path>, corrected: &Image) -> Result<Option<f64>> {
    let Some(path) = truth else { return Ok(None) };
    let reference = read_image(path)?.image;
    Ok(Some(
        rmse(&reference, corrected).context("truth image has a different size")?,
    ))
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !sigma.is_finite() || sigma < 0.0 {
        bail!("--sigma must be a finite non-negative number, got {sigma}");
    }
    Ok(())
}

pub fn cmd_correct(args: &CorrectArgs) -> Result<()> {
    let Decoded { image, bit_depth } = read_image(&args.input)?;
    let orientation = Orientation::from(args.orientation);

    let (corrected, sigma_used, trace, runtime_ms) = if args.auto {
        let grid = args
            .grid
            .clone()
            .unwrap_or_else(|| DEFAULT_SIGMA_GRID.to_vec());
        let start = Instant::now();
        let found = auto_sigma_oriented(&image, orientation, &grid, true)?;
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        println!("sigma* = {}", found.best_sigma);
        let trace = found
            .trace
            .iter()
            .map(|&(sigma, tv)| TracePoint { sigma, tv })
            .collect();
        (found.corrected, found.best_sigma, Some(trace), elapsed)
    } else {
        let sigma = args.sigma.expect("clap requires --sigma without --auto");
        check_sigma(sigma)?;
        let cfg = MireConfig::new(sigma).with_orientation(orientation);
        let start = Instant::now();
        let corrected = mire_correct(&image, &cfg)?;
        (corrected, sigma, None, start.elapsed().as_secs_f64() * 1e3)
    };

    write_image(&args.output, &corrected, bit_depth)?;
    let report = MetricsReport {
        input_path: args.input.display().to_string(),
        method: Method::Mire,
        sigma_used: Some(sigma_used),
        rmse_vs_truth: truth_rmse(args.truth.as_deref(), &corrected)?,
        tv_before: tv_norm(&image),
        tv_after: tv_norm(&corrected),
        runtime_ms,
        trace,
    };
    finish_report(&report, args.report.as_deref())
}

pub fn cmd_tv_correct(args: &TvCorrectArgs) -> Result<()> {
    let Decoded { image, bit_depth } = read_image(&args.input)?;
    let start = Instant::now();
    let corrected = tv_baseline::tv_correct_oriented(&image, args.orientation.into())?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    write_image(&args.output, &corrected, bit_depth)?;
    let report = MetricsReport {
        input_path: args.input.display().to_string(),
        method: Method::Tv,
        sigma_used: None,
        rmse_vs_truth: truth_rmse(args.truth.as_deref(), &corrected)?,
        tv_before: tv_norm(&image),
        tv_after: tv_norm(&corrected),
        runtime_ms,
        trace: None,
    };
    finish_report(&report, args.report.as_deref())
}

fn finish_report(report: &MetricsReport, path: Option<&Path>) -> Result<()> {
    println!(
        "tv {:.6} -> {:.6} in {:.3} ms",
        report.tv_before, report.tv_after, report.runtime_ms
    );
    if let Some(path) = path {
        write_text(path, &report.to_json())?;
    }
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let Decoded { image, bit_depth } = read_image(&args.input)?;
    let params = NuParams {
        gain_std: args.gain_std,
        offset_std: args.offset_std,
        noise_std: args.noise_std,
        seed: args.seed,
    };
    let (observed, truth) = simulate_nu(&image, &params)?;
    write_image(&args.output, &observed, bit_depth)?;
    if let Some(path) = &args.ground_truth {
        let mut text = serde_json::to_string_pretty(&truth)?;
        text.push('\n');
        write_text(path, &text)?;
    }
    Ok(())
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<f64> {
    let truth = read_image(&args.truth)?.image;
    let candidate = read_image(&args.candidate)?.image;
    Ok(rmse(&truth, &candidate)?)
}

/// One `sigma,tv_norm` row per grid entry, in grid order.
pub fn sweep_csv(trace: &[(f64, f64)]) -> String {
    let mut out = String::from("sigma,tv_norm\n");
    for (sigma, tv) in trace {
        out.push_str(&format!("{sigma},{tv}\n"));
    }
    out
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let Decoded { image, bit_depth } = read_image(&args.input)?;
    let orientation = Orientation::from(args.orientation);
    let grid = args
        .grid
        .clone()
        .unwrap_or_else(|| DEFAULT_SIGMA_GRID.to_vec());
    if grid.is_empty() {
        bail!("--grid is empty");
    }
    if let Some(dir) = &args.save_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let ext = args
        .input
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("pgm")
        .to_ascii_lowercase();
    let mut trace = Vec::with_capacity(grid.len());
    for &sigma in &grid {
        check_sigma(sigma)?;
        let corrected = mire_correct(
            &image,
            &MireConfig::new(sigma).with_orientation(orientation),
        )?;
        trace.push((sigma, tv_norm(&corrected)));
        if let Some(dir) = &args.save_dir {
            write_image(
                &dir.join(format!("sigma_{sigma}.{ext}")),
                &corrected,
                bit_depth,
            )?;
        }
    }
    let csv = sweep_csv(&trace);
    match &args.csv {
        Some(path) => write_text(path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

pub fn cmd_scene(args: &SceneArgs) -> Result<()> {
    let depth = BitDepth::from_bits(args.bit_depth)?;
    if args.width == 0 || args.height == 0 {
        bail!("scene dimensions must be positive");
    }
    let img = match args.kind {
        SceneKind::Landscape => scene::landscape(args.width, args.height, args.seed),
        SceneKind::Fractal => scene::fractal(args.width, args.height, args.seed),
        SceneKind::Texture => scene::texture(args.width, args.height, args.seed),
    };
    write_image(&args.output, &img, depth)
}
