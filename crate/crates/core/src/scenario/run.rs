use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use super::config::{InitialState, ScenarioConfig};
use super::output::{emit_sif_report, sif_table, ProbeSeries, SifRow, Snapshot};
use crate::continuum::poisson_from_cauchy;
use crate::dynamics::{RelaxationSetting, Simulation};
use crate::error::{ConfigIssue, Error, Result};
use crate::fracture::{CrackProblem, K1Oracle};
use crate::lattice::LatticeSpec;

/// Knobs that do not belong in the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Replaces `output.directory`.
    pub out_dir: Option<PathBuf>,
    /// Replaces `lattice.tau_ratio`.
    pub tau_ratio: Option<f64>,
    /// Keep everything in memory when false.
    pub write_files: bool,
}

impl RunOptions {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn to_dir(dir: impl Into<PathBuf>) -> Self {
        Self {
            out_dir: Some(dir.into()),
            tau_ratio: None,
            write_files: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Divergence {
    pub last_stable_step: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub steps: u64,
    pub dt: f64,
    pub final_time: f64,
    pub wall_seconds: f64,
    pub sites: usize,
    pub material_sites: usize,
    pub boundary_links: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence: Option<Divergence>,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub summary: RunSummary,
    pub probes: Vec<ProbeSeries>,
    pub sif: Option<Vec<SifRow>>,
}

impl RunArtifacts {
    pub fn probe(&self, id: &str) -> Option<&ProbeSeries> {
        self.probes.iter().find(|p| p.id == id)
    }
}

/// Simulation in its initial state, with every probe checked against the
/// material mask.
pub fn build_simulation(config: &ScenarioConfig) -> Result<Simulation> {
    config.validate()?;
    let material = config.material.params()?;
    let lattice = LatticeSpec::d2q9(config.lattice.dx, material.cs())?;
    let relax = RelaxationSetting::from_ratio(config.lattice.tau_ratio, lattice.dt)?;
    let mut sim = Simulation::new(config.domain.clone(), material, lattice, relax)?;

    if let InitialState::DilatationPulse {
        center,
        width,
        amplitude,
    } = config.initial
    {
        // Isotropic strain ε = (div u / 2) I.
        let rho0 = material.rho0;
        sim.initialize_equilibrium(|x| {
            let r2 = (x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2);
            let divu = amplitude * (-r2 / (width * width)).exp();
            let sigma = Matrix2::identity() * ((material.lambda + material.mu) * divu);
            let p = poisson_from_cauchy(&sigma, divu, &material).expect("isotropic stress is symmetric");
            (rho0 * (1.0 - divu), Vector2::zeros(), p)
        })?;
    }

    let issues: Vec<ConfigIssue> = config
        .probes
        .iter()
        .enumerate()
        .filter(|(_, p)| sim.sample(p.position).is_err())
        .map(|(k, p)| ConfigIssue {
            path: format!("probes[{k}].position"),
            message: format!("{:?} has no material site nearby", p.position),
        })
        .collect();
    if !issues.is_empty() {
        return Err(Error::Config(issues));
    }
    Ok(sim)
}

/// Output cadence on the time axis: due at `0, h, 2h, …`, or every step when
/// `h = 0`.
struct Cadence {
    interval: f64,
    next: u64,
    eps: f64,
}

impl Cadence {
    fn new(interval: f64, dt: f64) -> Self {
        Self {
            interval,
            next: 0,
            eps: 1e-9 * dt,
        }
    }

    fn due(&mut self, t: f64) -> bool {
        if self.interval == 0.0 {
            return true;
        }
        if t + self.eps < self.next as f64 * self.interval {
            return false;
        }
        while self.next as f64 * self.interval <= t + self.eps {
            self.next += 1;
        }
        true
    }
}

/// Runs a scenario to its end time. With `options.write_files` the output
/// directory receives `scenario.toml`, one `probe_<id>.csv` per probe,
/// snapshots `snapshot_<step>.vtk`, `sif_report.csv` for crack runs and
/// `summary.toml`. A diverged run still writes its partial probes and the
/// summary before returning the error.
pub fn run_scenario(config: &ScenarioConfig, options: &RunOptions) -> Result<RunArtifacts> {
    let mut config = config.clone();
    if let Some(r) = options.tau_ratio {
        config.lattice.tau_ratio = r;
    }
    if let Some(dir) = &options.out_dir {
        config.output.directory = dir.clone();
    }
    let started = Instant::now();
    let mut sim = build_simulation(&config)?;
    let dir = config.output.directory.clone();
    let mut files = Vec::new();
    if options.write_files {
        let path = dir.join("scenario.toml");
        write_text(&path, &config.to_toml())?;
        files.push(path);
    }

    let dt = sim.lattice().dt;
    let total = (config.run.end_time / dt - 1e-9).ceil() as u64;
    let mut probes: Vec<ProbeSeries> = config
        .probes
        .iter()
        .map(|p| ProbeSeries::new(p.id.clone(), p.position))
        .collect();
    let mut probe_clock = Cadence::new(config.run.probe_interval, dt);
    let snapshots = config.run.snapshot_interval > 0.0 && options.write_files;
    let mut snap_clock = Cadence::new(config.run.snapshot_interval, dt);
    let mut divergence = None;

    loop {
        let t = sim.time();
        if probe_clock.due(t) {
            for series in &mut probes {
                let s = sim.sample(series.position)?;
                series.push(t, s)?;
            }
        }
        if snapshots && snap_clock.due(t) {
            let path = dir.join(format!("snapshot_{:06}.vtk", sim.steps()));
            Snapshot::capture(&sim).write(&path)?;
            files.push(path);
        }
        if sim.steps() >= total {
            break;
        }
        match sim.step() {
            Ok(()) => {}
            Err(Error::SolverDiverged { step, reason }) => {
                divergence = Some(Divergence {
                    last_stable_step: step,
                    reason,
                });
                break;
            }
            Err(e) => return Err(e),
        }
    }

    if options.write_files {
        for series in &probes {
            let path = dir.join(format!("probe_{}.csv", series.id));
            series.write_csv(&path)?;
            files.push(path);
        }
    }

    let sif = match (&config.sif, &divergence) {
        (Some(sc), None) => {
            let problem = CrackProblem::new(sc.crack_length, sc.traction, *sim.material())?;
            let oracle = K1Oracle::new(problem, sc.tolerance)?;
            let rows = if options.write_files {
                let path = dir.join("sif_report.csv");
                let rows = emit_sif_report(&probes, &sc.probe, sc.tip_distance, &oracle, &path)?;
                files.push(path);
                rows
            } else {
                let series = probes
                    .iter()
                    .find(|p| p.id == sc.probe)
                    .ok_or_else(|| Error::config("sif.probe", "probe series missing"))?;
                sif_table(series, &oracle, sc.tip_distance)?
            };
            Some(rows)
        }
        _ => None,
    };

    let summary_path = dir.join("summary.toml");
    if options.write_files {
        files.push(summary_path.clone());
    }
    let dom = sim.classified();
    let summary = RunSummary {
        scenario: config.name.clone(),
        steps: sim.steps(),
        dt,
        final_time: sim.time(),
        wall_seconds: started.elapsed().as_secs_f64(),
        sites: dom.grid.len(),
        material_sites: dom.material_count(),
        boundary_links: dom.links.len(),
        divergence: divergence.clone(),
        files,
    };
    if options.write_files {
        let text = toml::to_string(&summary).expect("summaries always serialize");
        write_text(&summary_path, &text)?;
    }
    if let Some(d) = divergence {
        return Err(Error::SolverDiverged {
            step: d.last_stable_step,
            reason: d.reason,
        });
    }
    Ok(RunArtifacts {
        summary,
        probes,
        sif,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::config::periodic_smoke;

    fn short_smoke() -> ScenarioConfig {
        let mut c = periodic_smoke();
        c.run.end_time = 0.2;
        c
    }

    #[test]
    fn cadence_hits_each_multiple_once() {
        let dt = 0.3;
        let mut c = Cadence::new(1.0, dt);
        let hits: Vec<u32> = (0..20).filter(|&k| c.due(k as f64 * dt)).collect();
        assert_eq!(hits, [0, 4, 7, 10, 14, 17]);
        let mut every = Cadence::new(0.0, dt);
        assert!((0..5).all(|k| every.due(k as f64 * dt)));
    }

    #[test]
    fn smoke_conserves_mass() {
        let c = short_smoke();
        let mut sim = build_simulation(&c).unwrap();
        let m0 = sim.total_mass();
        sim.run(20).unwrap();
        assert!(((sim.total_mass() - m0) / m0).abs() < 1e-13);
        assert!(sim.state().rho.iter().any(|&r| (r - 1.0).abs() > 1e-6));
    }

    #[test]
    fn runs_are_deterministic_and_write_files() {
        let c = short_smoke();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let ra = run_scenario(&c, &RunOptions::to_dir(a.path())).unwrap();
        run_scenario(&c, &RunOptions::to_dir(b.path())).unwrap();
        let pa = std::fs::read(a.path().join("probe_center.csv")).unwrap();
        let pb = std::fs::read(b.path().join("probe_center.csv")).unwrap();
        assert_eq!(pa, pb);
        assert!(a.path().join("snapshot_000000.vtk").exists());
        let echoed = ScenarioConfig::load(a.path().join("scenario.toml")).unwrap();
        assert_eq!(echoed.output.directory, a.path());
        let summary = std::fs::read_to_string(a.path().join("summary.toml")).unwrap();
        assert!(summary.contains(&format!("steps = {}", ra.summary.steps)));
        let series = ra.probe("center").unwrap();
        assert!(series.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(series.len(), 5);
    }

    #[test]
    fn tau_override_changes_the_run() {
        let c = short_smoke();
        let base = run_scenario(&c, &RunOptions::in_memory()).unwrap();
        let opts = RunOptions {
            tau_ratio: Some(0.8),
            ..RunOptions::in_memory()
        };
        let other = run_scenario(&c, &opts).unwrap();
        assert_ne!(base.probes[0].samples, other.probes[0].samples);
    }

    #[test]
    fn probe_inside_hole_is_config_error() {
        let mut c = crate::scenario::config::plate_hole(3.0, 0.05);
        c.probes[0].position = [0.01, 0.01];
        let Err(Error::Config(issues)) = build_simulation(&c) else {
            panic!()
        };
        assert_eq!(issues[0].path, "probes[0].position");
    }

    #[test]
    fn divergence_reports_last_stable_step() {
        // A wall jumping by several plate widths in one step.
        let mut c = crate::scenario::config::plate_hole(3.0, 0.05);
        c.domain.faces.bottom = crate::boundary::BoundaryCondition::Dirichlet {
            displacement: [0.0, 5.0],
            profile: crate::boundary::Profile::Step { time: 0.1 },
        };
        c.probes.truncate(2);
        let dir = tempfile::tempdir().unwrap();
        let err = run_scenario(&c, &RunOptions::to_dir(dir.path())).unwrap_err();
        let Error::SolverDiverged { step, .. } = err else {
            panic!("{err}")
        };
        let summary = std::fs::read_to_string(dir.path().join("summary.toml")).unwrap();
        assert!(summary.contains(&format!("last_stable_step = {step}")));
    }
}
