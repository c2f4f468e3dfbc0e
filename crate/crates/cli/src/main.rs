//! Command-line driver for shadow-slope percolation experiments.
//!
//! Subcommands: `generate`, `alpha`, `render`, `scan`, `verify-bounds`,
//! `reconstruct`, `selftest`. Exit codes: 0 success, 1 a check failed,
//! 2 usage or I/O trouble. Every run is a pure function of the resolved
//! configuration and input files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use shadowperc::config::ExperimentConfig;
use shadowperc::{io, par, render, verify};
use shadowperc_core::alpha::{alpha_row_hull, compute_alpha};
use shadowperc_core::reconstruct::{
    apply_mean_mode, psi0_row, psi0_row_truncated, MeanMode, ReconstructionResult,
};
use shadowperc_core::{Adjacency, Side};

#[derive(Parser)]
#[command(name = "shadowperc", version, about = "Shadow-slope percolation experiments")]
struct Cli {
    /// JSON experiment configuration; flags override individual fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Light level; repeat for several (sorted ascending).
    #[arg(long = "level", global = true, allow_negative_numbers = true)]
    levels: Vec<f64>,

    /// Level-set side override.
    #[arg(long, global = true, value_enum)]
    side: Option<SideArg>,

    /// Cluster adjacency override.
    #[arg(long, global = true, value_enum)]
    adjacency: Option<AdjacencyArg>,

    /// Monte Carlo sample count override.
    #[arg(long, global = true)]
    samples: Option<u64>,

    /// Output path (stdout for textual outputs when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (defaults to all cores); results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Le,
    Ge,
    Lt,
    Gt,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Le => Side::Le,
            SideArg::Ge => Side::Ge,
            SideArg::Lt => Side::Lt,
            SideArg::Gt => Side::Gt,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AdjacencyArg {
    Orth,
    Star,
}

impl From<AdjacencyArg> for Adjacency {
    fn from(a: AdjacencyArg) -> Adjacency {
        match a {
            AdjacencyArg::Orth => Adjacency::Orthogonal,
            AdjacencyArg::Star => Adjacency::Star,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ImageFormat {
    Ppm,
    Pbm,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeanModeArg {
    /// Shift by the first moment of the law embedded in the input file.
    Known,
    /// Per-row empirical mean.
    Empirical,
    /// One pooled empirical mean across rows.
    EmpiricalGlobal,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldFormat {
    /// Binary dump.
    Shpf,
    /// One row per line, comma-separated; for small fields.
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a height field and write its binary dump.
    Generate {
        #[arg(long, value_enum, default_value = "shpf")]
        format: FieldFormat,
    },
    /// Compute the slope field of a height dump and write its binary dump.
    Alpha {
        /// Height dump (SHPF).
        #[arg(long)]
        input: PathBuf,
    },
    /// Draw a level set: shadow black, lit white, largest clusters red/blue.
    Render {
        /// Height (SHPF) or slope (SHAF) dump.
        #[arg(long)]
        input: PathBuf,
        /// P6 pixmap (colors) or P4 bitmap (the raw mask for --side).
        #[arg(long, value_enum, default_value = "ppm")]
        format: ImageFormat,
    },
    /// Estimate crossing probabilities over the configured levels (CSV).
    Scan,
    /// Run the bound suite and emit a JSON report; exits 1 on any failure.
    VerifyBounds,
    /// Rebuild heights from slopes; writes the dump plus a JSON sidecar.
    Reconstruct {
        /// Height (SHPF) or slope (SHAF) dump.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "empirical")]
        mean_mode: MeanModeArg,
    },
    /// Cross-check optimized kernels against brute-force oracles (JSON).
    Selftest,
}

enum AppError {
    Usage(String),
    Io(String),
}

impl AppError {
    fn io(path: &Path, err: std::io::Error) -> Self {
        AppError::Io(format!("{}: {err}", path.display()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, AppError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| AppError::Usage(format!("thread pool: {e}")))?;
    }
    let config = resolve_config(&cli)?;

    match &cli.command {
        Command::Generate { format } => cmd_generate(&config, *format),
        Command::Alpha { input } => cmd_alpha(&config, input),
        Command::Render { input, format } => cmd_render(&config, input, *format),
        Command::Scan => cmd_scan(&config),
        Command::VerifyBounds => cmd_verify_bounds(&config),
        Command::Reconstruct { input, mean_mode } => cmd_reconstruct(&config, input, *mean_mode),
        Command::Selftest => cmd_selftest(&config),
    }
}

fn resolve_config(cli: &Cli) -> Result<ExperimentConfig, AppError> {
    let mut config = match &cli.config {
        Some(path) => {
            let raw = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
            serde_json::from_str(&raw)
                .map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if !cli.levels.is_empty() {
        config.levels = cli.levels.clone();
    }
    if let Some(side) = cli.side {
        config.side = side.into();
    }
    if let Some(adjacency) = cli.adjacency {
        config.adjacency = adjacency.into();
    }
    if let Some(samples) = cli.samples {
        config.samples = samples;
    }
    if let Some(out) = &cli.out {
        config.out = Some(out.clone());
    }
    config.validate().map_err(AppError::Usage)?;
    Ok(config)
}

fn required_out(config: &ExperimentConfig) -> Result<&PathBuf, AppError> {
    config
        .out
        .as_ref()
        .ok_or_else(|| AppError::Usage("this command needs --out (or \"out\" in the config)".into()))
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<(), AppError> {
    std::fs::write(path, bytes).map_err(|e| AppError::io(path, e))
}

fn read_in(path: &Path) -> Result<Vec<u8>, AppError> {
    std::fs::read(path).map_err(|e| AppError::io(path, e))
}

fn emit_text(config: &ExperimentConfig, text: &str) -> Result<(), AppError> {
    match &config.out {
        Some(path) => write_out(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn provenance(config: &ExperimentConfig) -> String {
    serde_json::to_string(config).expect("config serializes")
}

fn cmd_generate(config: &ExperimentConfig, format: FieldFormat) -> Result<u8, AppError> {
    let out = required_out(config)?;
    let field = par::generate_parallel(
        config.width,
        config.height,
        config.lookahead,
        config.spec,
        config.seed,
    )
    .map_err(|e| AppError::Usage(e.to_string()))?;
    match format {
        FieldFormat::Shpf => write_out(out, &io::encode_height_field(&field))?,
        FieldFormat::Csv => write_out(out, io::heights_csv(&field).as_bytes())?,
    }
    Ok(0)
}

fn cmd_alpha(config: &ExperimentConfig, input: &Path) -> Result<u8, AppError> {
    let out = required_out(config)?;
    let field = io::decode_height_field(&read_in(input)?)
        .map_err(|e| AppError::Io(format!("{}: {e}", input.display())))?;
    let alpha = compute_alpha(&field);
    write_out(out, &io::encode_alpha(&io::AlphaDump::from_field(&alpha)))?;
    Ok(0)
}

/// Loads a slope grid from either dump kind; heights get their slopes
/// computed on the spot.
fn load_alpha(input: &Path) -> Result<io::AlphaDump, AppError> {
    let bytes = read_in(input)?;
    match io::sniff_magic(&bytes) {
        Some("SHPF") => {
            let field = io::decode_height_field(&bytes)
                .map_err(|e| AppError::Io(format!("{}: {e}", input.display())))?;
            Ok(io::AlphaDump::from_field(&compute_alpha(&field)))
        }
        Some("SHAF") => io::decode_alpha(&bytes)
            .map_err(|e| AppError::Io(format!("{}: {e}", input.display()))),
        _ => Err(AppError::Io(format!(
            "{}: not a height or slope dump",
            input.display()
        ))),
    }
}

fn cmd_render(
    config: &ExperimentConfig,
    input: &Path,
    format: ImageFormat,
) -> Result<u8, AppError> {
    let out = required_out(config)?;
    let level = match config.levels.as_slice() {
        [l] => *l,
        _ => {
            return Err(AppError::Usage(
                "render needs exactly one --level".into(),
            ))
        }
    };
    let dump = load_alpha(input)?;
    let note = provenance(config);
    let bytes = match format {
        ImageFormat::Ppm => {
            let rgb = render::render_rgb(&dump.values, dump.width, dump.rows, level, config.adjacency);
            io::rgb_ppm(&rgb, dump.width, dump.rows, &note)
        }
        ImageFormat::Pbm => {
            let mask = shadowperc_core::alpha::LevelSetMask::from_values(
                &dump.values,
                dump.width,
                dump.rows,
                level,
                config.side,
            );
            io::mask_pbm(&mask, &note)
        }
    };
    write_out(out, &bytes)?;
    Ok(0)
}

fn cmd_scan(config: &ExperimentConfig) -> Result<u8, AppError> {
    if config.levels.is_empty() {
        return Err(AppError::Usage("scan needs at least one --level".into()));
    }
    let estimates = par::scan_levels_parallel(
        config.spec,
        config.width,
        config.height,
        config.lookahead,
        &config.levels,
        config.side,
        config.axis,
        config.adjacency,
        config.samples,
        config.seed,
    )
    .map_err(|e| AppError::Usage(e.to_string()))?;
    emit_text(config, &io::scan_csv(&estimates))?;
    Ok(0)
}

fn cmd_verify_bounds(config: &ExperimentConfig) -> Result<u8, AppError> {
    let report = verify::run_bound_checks(config.seed);
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    emit_text(config, &format!("{json}\n"))?;
    Ok(verify::exit_code_for(&report) as u8)
}

fn cmd_reconstruct(
    config: &ExperimentConfig,
    input: &Path,
    mean_mode: MeanModeArg,
) -> Result<u8, AppError> {
    let out = required_out(config)?;
    let bytes = read_in(input)?;
    // Heights are rebuilt through the exact full-suffix slope map; a stored
    // slope dump only supports hops within its own truncation horizon.
    let (mut result, mean) = match io::sniff_magic(&bytes) {
        Some("SHPF") => {
            let field = io::decode_height_field(&bytes)
                .map_err(|e| AppError::Io(format!("{}: {e}", input.display())))?;
            let rows = (0..field.rows())
                .map(|j| psi0_row(&alpha_row_hull(field.row(j)).0))
                .collect();
            (
                ReconstructionResult::from_rows(field.total_cols() as usize, rows),
                field.spec().mean(),
            )
        }
        Some("SHAF") => {
            let dump = io::decode_alpha(&bytes)
                .map_err(|e| AppError::Io(format!("{}: {e}", input.display())))?;
            let horizon = dump.truncation as usize;
            let rows = (0..dump.rows)
                .map(|j| psi0_row_truncated(dump.row(j), horizon))
                .collect();
            (
                ReconstructionResult::from_rows(dump.width as usize + 1, rows),
                dump.spec.mean(),
            )
        }
        _ => {
            return Err(AppError::Io(format!(
                "{}: not a height or slope dump",
                input.display()
            )))
        }
    };
    let mode = match mean_mode {
        MeanModeArg::Known => MeanMode::Known(mean),
        MeanModeArg::Empirical => MeanMode::EmpiricalPerRow,
        MeanModeArg::EmpiricalGlobal => MeanMode::EmpiricalGlobal,
    };
    apply_mean_mode(&mut result, mode);
    write_out(out, &io::encode_reconstruction(&result))?;
    let sidecar = io::sidecar_for(&result, mode);
    let sidecar_path = sidecar_path_for(out);
    write_out(
        &sidecar_path,
        serde_json::to_string_pretty(&sidecar)
            .expect("sidecar serializes")
            .as_bytes(),
    )?;
    Ok(0)
}

fn sidecar_path_for(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

fn cmd_selftest(config: &ExperimentConfig) -> Result<u8, AppError> {
    let reports = verify::selftest_suite(config.seed);
    let json = serde_json::to_string_pretty(&reports).expect("reports serialize");
    emit_text(config, &format!("{json}\n"))?;
    Ok(if reports.iter().all(|r| r.pass) { 0 } else { 1 })
}
