//! Command-line pipeline: exact polynomial families, lattice points,
//! exact-WKB quantization, orthogonality verification, region boundary and
//! lattice comparison.
//!
//! Exit status: 0 when every enabled assertion passes, 1 on assertion
//! failures (with a machine-readable `failures.json`), 2 on configuration
//! errors.

mod config;
mod stages;

use clap::{Args, Parser, Subcommand};
use config::{parse_n_range, parse_probe, parse_scaling, FileConfig, RunConfig};
use stages::Context;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "painlattice", version, about = "Painlevé-II pole lattices vs anharmonic-oscillator degeneracy lattices, with exact-WKB verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct CommonOpts {
    /// Single lattice parameter n.
    #[arg(long)]
    n: Option<usize>,
    /// Inclusive range A:B of lattice parameters.
    #[arg(long, value_name = "A:B")]
    n_range: Option<String>,
    /// Working precision in bits (default 256).
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Trapezoid nodes per period loop (default 512).
    #[arg(long)]
    nodes: Option<usize>,
    /// Gauss–Legendre nodes per wedge ray (default 400).
    #[arg(long)]
    ray_nodes: Option<usize>,
    /// Finite-difference step for the derivative checks (default 1e-4).
    #[arg(long)]
    fd_step: Option<f64>,
    /// Lattice scaling: natural | conjecture.
    #[arg(long)]
    scaling: Option<String>,
    /// Probe point RE,IM in the scaled s-plane.
    #[arg(long, value_name = "RE,IM")]
    probe: Option<String>,
    /// Output directory (default ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Polynomial cache directory (default $PAINLATTICE_CACHE or temp).
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Quantize with the leading order only (drop the S₁ correction).
    #[arg(long)]
    no_s1: bool,
    /// TOML config file; explicit flags still win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate and cache the Vorob'ev–Yablonskii family Y_0..Y_n.
    VyGen(CommonOpts),
    /// Generate and cache the discriminant polynomials D_1..D_n.
    StDisc(CommonOpts),
    /// Compute the Painlevé pole points with Laurent data (JSON lines).
    JmPoints(CommonOpts),
    /// Compute the repeated-eigenvalue points with eigen-polynomials.
    StPoints(CommonOpts),
    /// Evaluate both quantization conditions at every lattice point.
    WkbQuantize(CommonOpts),
    /// Wedge-integral vanishing, moment rank and Fekete residuals.
    VerifyOrthogonality(CommonOpts),
    /// Trace the elliptic-region boundary and export the polyline.
    RegionBoundary(CommonOpts),
    /// Nearest-pair discrepancies over an n range with a log–log fit.
    LatticeCompare(CommonOpts),
    /// Run every stage for one n.
    All(CommonOpts),
}

impl Command {
    fn opts(&self) -> &CommonOpts {
        match self {
            Command::VyGen(o)
            | Command::StDisc(o)
            | Command::JmPoints(o)
            | Command::StPoints(o)
            | Command::WkbQuantize(o)
            | Command::VerifyOrthogonality(o)
            | Command::RegionBoundary(o)
            | Command::LatticeCompare(o)
            | Command::All(o) => o,
        }
    }
}

fn build_config(opts: &CommonOpts) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &opts.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let file: FileConfig =
            toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))?;
        cfg.apply_file(&file)?;
    }
    if let Some(v) = opts.precision_bits {
        cfg.precision_bits = v;
    }
    if let Some(v) = opts.nodes {
        cfg.loop_nodes = v;
    }
    if let Some(v) = opts.ray_nodes {
        cfg.ray_nodes = v;
    }
    if let Some(v) = opts.fd_step {
        cfg.fd_step = v;
    }
    if let Some(s) = &opts.scaling {
        cfg.scaling = parse_scaling(s)?;
    }
    if let Some(v) = &opts.out {
        cfg.out_dir = v.clone();
    }
    if let Some(v) = &opts.cache {
        cfg.cache_dir = Some(v.clone());
    }
    if opts.no_s1 {
        cfg.include_s1 = false;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn need_n(opts: &CommonOpts) -> Result<usize, String> {
    opts.n.ok_or_else(|| "--n is required".to_string())
}

fn n_list(opts: &CommonOpts) -> Result<Vec<usize>, String> {
    if let Some(r) = &opts.n_range {
        return parse_n_range(r);
    }
    if let Some(n) = opts.n {
        return Ok(vec![n]);
    }
    Err("--n or --n-range is required".to_string())
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let opts = cli.command.opts();
    let cfg = build_config(opts)?;
    let mut ctx = Context::new(cfg).map_err(|e| e.to_string())?;

    let result: painlattice::Result<()> = (|| {
        match &cli.command {
            Command::VyGen(o) => {
                stages::vy_gen(&mut ctx, need_n(o).map_err(painlattice::Error::Config)?)?;
            }
            Command::StDisc(o) => {
                stages::st_disc(&mut ctx, need_n(o).map_err(painlattice::Error::Config)?)?;
            }
            Command::JmPoints(o) => {
                stages::jm_points_stage(&mut ctx, need_n(o).map_err(painlattice::Error::Config)?)?;
            }
            Command::StPoints(o) => {
                stages::st_points_stage(&mut ctx, need_n(o).map_err(painlattice::Error::Config)?)?;
            }
            Command::WkbQuantize(o) => {
                let n = need_n(o).map_err(painlattice::Error::Config)?;
                let boundary = stages::region_boundary_stage(&mut ctx)?;
                let jm = stages::jm_points_stage(&mut ctx, n)?;
                let st = stages::st_points_stage(&mut ctx, n)?;
                stages::wkb_quantize(&mut ctx, n, &boundary, &jm, &st)?;
            }
            Command::VerifyOrthogonality(o) => {
                stages::verify_orthogonality(
                    &mut ctx,
                    need_n(o).map_err(painlattice::Error::Config)?,
                )?;
            }
            Command::RegionBoundary(_) => {
                stages::region_boundary_stage(&mut ctx)?;
            }
            Command::LatticeCompare(o) => {
                let ns = n_list(o).map_err(painlattice::Error::Config)?;
                let probe = parse_probe(o.probe.as_deref().unwrap_or("0,0"))
                    .map_err(painlattice::Error::Config)?;
                let boundary = stages::region_boundary_stage(&mut ctx)?;
                let variant = ctx.cfg.scaling;
                stages::lattice_compare(&mut ctx, probe, &ns, variant, &boundary)?;
            }
            Command::All(o) => {
                let n = need_n(o).map_err(painlattice::Error::Config)?;
                stages::vy_gen(&mut ctx, n)?;
                stages::st_disc(&mut ctx, n)?;
                let jm = stages::jm_points_stage(&mut ctx, n)?;
                let st = stages::st_points_stage(&mut ctx, n)?;
                let boundary = stages::region_boundary_stage(&mut ctx)?;
                stages::origin_constants(&mut ctx)?;
                stages::period_identities(&mut ctx)?;
                stages::wkb_quantize(&mut ctx, n, &boundary, &jm, &st)?;
                stages::neighbor_check(&mut ctx, n, &boundary, 0.10, &jm, &st)?;
                // The squared-integrand verification is capped: oscillation
                // grows with n and the precision schedule with it.
                if n <= 10 {
                    stages::verify_orthogonality(&mut ctx, n)?;
                }
            }
        }
        Ok(())
    })();

    if let Err(e) = result {
        return Err(format!("pipeline error: {e}"));
    }

    if ctx.failures.0.is_empty() {
        println!("all assertions passed");
        Ok(ExitCode::SUCCESS)
    } else {
        ctx.failures
            .write_json(&ctx.cfg.out_dir)
            .map_err(|e| e.to_string())?;
        eprintln!("{} assertion(s) failed:", ctx.failures.0.len());
        for (stage, msg) in &ctx.failures.0 {
            eprintln!("  [{stage}] {msg}");
        }
        Ok(ExitCode::FAILURE)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
