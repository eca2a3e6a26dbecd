use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use imag_lindblad::duality::{audit, write_audit_table};
use imag_lindblad::models::{Boundary, LatticeSpec};
use imag_lindblad::sweep::{emit, run_sweep, SweepConfig};

/// Phase-diagram sweeps of the imaginary-time Lindbladian.
#[derive(Parser, Debug)]
#[command(name = "imlind", version)]
struct Args {
    /// TOML sweep configuration.
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory, overriding the config.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Number of sites.
    #[arg(short = 'n', long)]
    n_sites: Option<usize>,
    /// open | periodic
    #[arg(long)]
    boundary: Option<Boundary>,
    /// Grid steps as AxB, e.g. 11x11.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to available parallelism.
    #[arg(short, long)]
    workers: Option<usize>,
    /// Also print each row to stderr.
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Check the b <-> 1-b duality over the grid instead of sweeping.
    #[arg(long)]
    duality_audit: bool,
    /// Pass threshold for the duality audit.
    #[arg(long, default_value_t = 1e-8)]
    duality_tol: f64,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected AxB, got {s:?}"))?;
    let a = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((a, b))
}

fn run(args: Args) -> Result<bool, Box<dyn std::error::Error>> {
    let mut config = SweepConfig::from_file(&args.config)?;
    if let Some(o) = args.output {
        config.output.directory = o;
    }
    if let Some(n) = args.n_sites {
        config.model.n_sites = n;
    }
    if let Some(b) = args.boundary {
        config.model.boundary = b;
    }
    if let Some((a, b)) = args.grid {
        config.grid.a_steps = a;
        config.grid.b_steps = b;
    }
    if let Some(s) = args.seed {
        config.solver.seed = s;
    }
    config.validate()?;
    let workers = args.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));

    if args.duality_audit {
        let lattice = LatticeSpec::new(config.model.n_sites, config.model.boundary)?;
        if lattice.boundary != Boundary::Periodic {
            return Err("the duality audit needs periodic boundaries".into());
        }
        let mut a: Vec<f64> = config.points().iter().map(|p| p.0).collect();
        let mut b: Vec<f64> = config.points().iter().map(|p| p.1).collect();
        a.dedup();
        b.sort_by(f64::total_cmp);
        b.dedup();
        let rows = audit(&a, &b, &lattice);
        write_audit_table(&rows, args.duality_tol, std::io::stdout().lock())?;
        return Ok(rows.iter().all(|r| r.as_ref().is_ok_and(|c| c.passed(args.duality_tol))));
    }

    let rows = run_sweep(&config, workers)?;
    if args.verbose > 0 {
        for r in &rows {
            match &r.error {
                Some(e) => eprintln!("a={} b={} error: {e}", r.a, r.b),
                None => eprintln!("a={} b={} gap={:?} {} ms", r.a, r.b, r.gap, r.wall_ms),
            }
        }
    }
    for path in emit(&rows, &config.output)? {
        println!("{}", path.display());
    }
    let failed = rows.iter().filter(|r| r.is_fatal()).count();
    if failed > 0 {
        eprintln!("{failed} of {} points failed", rows.len());
    }
    Ok(failed == 0)
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
