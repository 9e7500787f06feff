use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use elastolbm::error::{Error, Result};
use elastolbm::fracture::{sif_k0, CrackProblem, K1Oracle};
use elastolbm::material::MaterialParams;
use elastolbm::scenario::{run_scenario, RunOptions, ScenarioConfig};
use elastolbm::verify::quick_suite;

#[derive(Parser)]
#[command(name = "elastolbm", version, about = "Lattice Boltzmann elastodynamics benchmarks")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file, or a built-in scenario by name.
    Run {
        config: String,
        /// Output directory (overrides `output.directory`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Relaxation time over time step (overrides `lattice.tau_ratio`).
        #[arg(long)]
        tau_ratio: Option<f64>,
        /// Print the resolved config and exit.
        #[arg(long)]
        dry_run: bool,
    },
    /// Tabulate the analytical crack-tip stress intensity factor.
    Oracle {
        /// First time, in units of l_c/c_d.
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 2.0)]
        to: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long, default_value_t = elastolbm::fracture::sif::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 3.6)]
        rho0: f64,
        #[arg(long, default_value_t = 1.3)]
        mu: f64,
        /// c_d^2 / c_s^2.
        #[arg(long, default_value_t = 36.0 / 13.0)]
        speed_ratio_sq: f64,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the reduced invariant suite.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match cli.command {
        Command::Run {
            config,
            out,
            tau_ratio,
            dry_run,
        } => run(&config, out, tau_ratio, dry_run),
        Command::Oracle {
            from,
            to,
            step,
            tol,
            rho0,
            mu,
            speed_ratio_sq,
            out,
        } => oracle(from, to, step, tol, rho0, mu, speed_ratio_sq, out),
        Command::Verify => Ok(verify()),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load(config: &str) -> Result<ScenarioConfig> {
    let path = PathBuf::from(config);
    if !path.exists() {
        if let Some(c) = ScenarioConfig::builtin(config) {
            return Ok(c);
        }
    }
    ScenarioConfig::load(&path)
}

fn run(config: &str, out: Option<PathBuf>, tau_ratio: Option<f64>, dry_run: bool) -> Result<bool> {
    let mut cfg = load(config)?;
    if dry_run {
        if let Some(r) = tau_ratio {
            cfg.lattice.tau_ratio = r;
        }
        if let Some(d) = out {
            cfg.output.directory = d;
        }
        cfg.validate()?;
        print!("{}", cfg.to_toml());
        return Ok(true);
    }
    let options = RunOptions {
        out_dir: out,
        tau_ratio,
        write_files: true,
    };
    let art = run_scenario(&cfg, &options)?;
    let s = &art.summary;
    println!(
        "{}: {} steps to t = {:.6} (dt = {:.6e}) in {:.2} s, {} material sites, {} boundary links",
        s.scenario, s.steps, s.final_time, s.dt, s.wall_seconds, s.material_sites, s.boundary_links
    );
    for f in &s.files {
        println!("  wrote {}", f.display());
    }
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn oracle(
    from: f64,
    to: f64,
    step: f64,
    tol: f64,
    rho0: f64,
    mu: f64,
    speed_ratio_sq: f64,
    out: Option<PathBuf>,
) -> Result<bool> {
    if !(step > 0.0) || !(to >= from) || from < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= from <= to and step > 0, got {from}..{to} by {step}"
        )));
    }
    let mat = MaterialParams::from_speed_ratio(rho0, mu, speed_ratio_sq)?;
    // K/K_s does not depend on the load, so any traction works here.
    let problem = CrackProblem::new(1.0, 1.0, mat)?;
    let oracle = K1Oracle::new(problem, tol)?;
    let k_s = problem.k_static();
    let t_ref = problem.transit_time();
    let mut text = String::from("t_cd_over_lc,k0_over_ks,k1_over_ks,k_analytical_over_ks\n");
    let count = ((to - from) / step + 1e-9).floor() as usize;
    for k in 0..=count {
        let t = from + k as f64 * step;
        let k0 = sif_k0(t * t_ref, &problem) / k_s;
        let k1 = if t >= 1.0 {
            format!("{:.16e}", oracle.k1(t * t_ref)? / k_s)
        } else {
            String::new()
        };
        let ana = oracle.analytical(t * t_ref)? / k_s;
        let _ = writeln!(text, "{t:.16e},{k0:.16e},{k1},{ana:.16e}");
    }
    match out {
        Some(path) => std::fs::write(&path, text).map_err(|e| Error::Io { path, source: e })?,
        None => print!("{text}"),
    }
    Ok(true)
}

fn verify() -> bool {
    let checks = quick_suite();
    for c in &checks {
        println!("{c}");
    }
    checks.iter().all(|c| c.passed)
}
