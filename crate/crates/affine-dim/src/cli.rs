//! Command-line front end.
//!
//! One subcommand per pipeline stage, all driven by the same JSON spec
//! file. Reports go to stdout and, when `--out DIR` is given, to files in
//! that directory. Exit codes: 0 on success, 1 for spec-file problems
//! (missing file, schema violations), 2 for runtime failures (violated
//! preconditions, exceeded budgets).

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Word;
use crate::report::{build_full_report, ReportOptions, TransversalityReport};
use crate::system_spec::SystemSpecFile;

#[derive(Debug, Parser)]
#[command(
    name = "affine-dim",
    version,
    about = "Dimension analysis for planar self-affine systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full report: affinity dimension, splitting certificate, Gibbs
    /// thermodynamics, dimension formulas, condition flags, separation,
    /// and box counting.
    Dimension(CommonArgs),
    /// Finite-level pressure table as CSV (n, s, pressure).
    Pressure(CommonArgs),
    /// Stable and strong-stable directions of sampled words as CSV.
    Directions(CommonArgs),
    /// Translation-family transversality certificate as JSON.
    Transversality(CommonArgs),
    /// Attractor point cloud as CSV and SVG files.
    Render(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// System description file (JSON).
    #[arg(long, value_name = "FILE")]
    spec: PathBuf,
    /// Seed for every sampled computation.
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
    /// Output directory; created if missing.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Depth override: pressure levels, sampled word length, or cloud
    /// depth, depending on the command.
    #[arg(long, value_name = "N")]
    depth: Option<usize>,
    /// Root-finding tolerance override.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// Use the relaxed large-dimension threshold 3/2 instead of 5/3.
    #[arg(long)]
    relaxed_bound: bool,
}

/// Parses arguments, runs the chosen command, and maps errors to exit
/// codes. Meant to be the whole body of `main`.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(Error::SpecFile(msg)) => {
            eprintln!("spec error: {msg}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Dimension(args) => cmd_dimension(&args),
        Command::Pressure(args) => cmd_pressure(&args),
        Command::Directions(args) => cmd_directions(&args),
        Command::Transversality(args) => cmd_transversality(&args),
        Command::Render(args) => cmd_render(&args),
    }
}

/// Prints `text` and, when an output directory was requested, also writes
/// it to `DIR/filename`.
fn emit(args: &CommonArgs, filename: &str, text: &str) -> Result<()> {
    print!("{text}");
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(filename), text)?;
    }
    Ok(())
}

fn cmd_dimension(args: &CommonArgs) -> Result<()> {
    let spec = SystemSpecFile::load(&args.spec)?;
    let opts = ReportOptions {
        seed: args.seed,
        relaxed: args.relaxed_bound,
        depth: args.depth,
        tol: args.tol,
    };
    let report = build_full_report(&spec, &opts)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    emit(args, "dimension.json", &json)
}

/// `s` grid for the pressure table: 0.0 to 2.4 in steps of 0.1, crossing
/// both interpolation breaks of the singular value function.
fn pressure_grid() -> Vec<f64> {
    (0..=24).map(|i| i as f64 / 10.0).collect()
}

fn cmd_pressure(args: &CommonArgs) -> Result<()> {
    let spec = SystemSpecFile::load(&args.spec)?;
    let mats = spec.matrices()?;
    let depth = args.depth.unwrap_or_else(|| spec.pressure_depth());
    let mut csv = String::from("n,s,pressure\n");
    for n in 1..=depth {
        for s in pressure_grid() {
            let p = crate::pressure::finite_pressure(&mats, s, n)?;
            writeln!(csv, "{n},{s},{p}").expect("writing to a string cannot fail");
        }
    }
    emit(args, "pressure.csv", &csv)
}

/// Seeded sample of `count` words of length `len` over `n_symbols`.
fn sample_words(n_symbols: usize, len: usize, count: usize, seed: u64) -> Vec<Word> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let symbols: Vec<u8> = (0..len)
                .map(|_| rng.gen_range(1..=n_symbols as u8))
                .collect();
            Word::new(symbols).expect("sampled symbols are in range")
        })
        .collect()
}

fn cmd_directions(args: &CommonArgs) -> Result<()> {
    let spec = SystemSpecFile::load(&args.spec)?;
    let mats = spec.matrices()?;
    let cert = crate::splitting::find_backward_invariant_multicone(&mats)?;
    let depth = args.depth.unwrap_or(12);
    let words = sample_words(mats.len(), depth, 20, args.seed);
    let mut csv = String::from("word,stable_angle,strong_stable_angle,error_bound\n");
    for word in &words {
        let (stable, stable_err) = crate::splitting::stable_direction(&mats, word, depth, &cert)?;
        let (strong, strong_err) =
            crate::splitting::strong_stable_direction(&mats, word, depth, &cert)?;
        let bound = stable_err.max(strong_err);
        writeln!(csv, "{word},{},{},{bound}", stable.angle(), strong.angle())
            .expect("writing to a string cannot fail");
    }
    emit(args, "directions.csv", &csv)
}

fn cmd_transversality(args: &CommonArgs) -> Result<()> {
    let spec = SystemSpecFile::load(&args.spec)?;
    let mats = spec.matrices()?;
    let depth = args.depth.unwrap_or(10);
    let root_tol = args.tol.unwrap_or(spec.tolerances.root_tol);
    let affinity = crate::pressure::affinity_dimension(&mats, spec.pressure_depth(), root_tol)?;
    let classes = crate::dimension::classify_system(&mats, affinity.s0, args.relaxed_bound)?;
    let system = crate::transversality::IntervalMapSystem::new(&mats)?;
    let certificate =
        crate::transversality::certify_translation_transversality(&mats, 200, args.seed)?;
    let splitting = crate::splitting::find_backward_invariant_multicone(&mats)?;
    let cross_check =
        crate::transversality::ess_vs_pi_crosscheck(&mats, &splitting, depth, 30, args.seed)?;
    let report = TransversalityReport {
        version: 1,
        seed: args.seed,
        classes,
        derivative_bounds: system.derivative_bounds.clone(),
        certificate,
        cross_check,
    };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    emit(args, "transversality.json", &json)
}

fn cmd_render(args: &CommonArgs) -> Result<()> {
    let spec = SystemSpecFile::load(&args.spec)?;
    let ifs = spec
        .ifs()?
        .ok_or_else(|| Error::InvalidInput("render needs translations in the spec file".into()))?;
    let depth = args.depth.unwrap_or_else(|| spec.cloud_depth());
    let cloud = crate::geometry::generate_cloud(&ifs, depth)?;
    let csv = crate::geometry::cloud_to_csv(&cloud);
    let svg = crate::geometry::cloud_to_svg(&cloud);
    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    let csv_path = dir.join("attractor.csv");
    let svg_path = dir.join("attractor.svg");
    std::fs::write(&csv_path, &csv)?;
    std::fs::write(&svg_path, &svg)?;
    println!(
        "wrote {} ({} points) and {}",
        csv_path.display(),
        cloud.points.len(),
        svg_path.display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pressure_grid_crosses_both_breaks() {
        let grid = pressure_grid();
        assert_eq!(grid.len(), 25);
        assert_eq!(grid[0], 0.0);
        assert_eq!(grid[24], 2.4);
        assert!(grid.iter().any(|&s| s > 1.0 && s < 2.0));
        assert!(grid.iter().any(|&s| s > 2.0));
    }

    #[test]
    fn sampled_words_are_deterministic_and_valid() {
        let a = sample_words(3, 8, 5, 42);
        let b = sample_words(3, 8, 5, 42);
        assert_eq!(a, b);
        for w in &a {
            assert_eq!(w.len(), 8);
            w.validate(3).unwrap();
        }
        let c = sample_words(3, 8, 5, 43);
        assert_ne!(a, c);
    }
}
