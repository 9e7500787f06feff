use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryCondition, Profile, Traction};
use crate::error::{ConfigIssue, Error, Result};
use crate::geometry::{DomainSpec, FaceConditions, Shape};
use crate::material::MaterialParams;

/// Format version written to and required from every config file.
pub const CONFIG_VERSION: u32 = 1;

/// Complete description of one run. Every field is required in the file, so a
/// config read back from [`ScenarioConfig::to_toml`] reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub name: String,
    pub material: MaterialConfig,
    pub lattice: LatticeConfig,
    pub run: RunConfig,
    pub output: OutputConfig,
    pub initial: InitialState,
    pub domain: DomainSpec,
    pub probes: Vec<ProbeConfig>,
    /// Stress intensity post-processing for crack runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sif: Option<SifConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub rho0: f64,
    pub mu: f64,
    /// `c_d² / c_s²`.
    pub speed_ratio_sq: f64,
}

impl MaterialConfig {
    pub fn params(&self) -> Result<MaterialParams> {
        MaterialParams::from_speed_ratio(self.rho0, self.mu, self.speed_ratio_sq)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub dx: f64,
    /// `τ̄ / dt`.
    pub tau_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub end_time: f64,
    /// Time between probe samples; `0` samples every step.
    pub probe_interval: f64,
    /// Time between snapshots; `0` disables them.
    pub snapshot_interval: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
}

/// State at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// Undeformed and stress-free.
    Rest,
    /// Gaussian isotropic dilatation `div u = amplitude · exp(-|x-c|²/width²)`
    /// at rest.
    DilatationPulse {
        center: [f64; 2],
        width: f64,
        amplitude: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub id: String,
    pub position: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SifConfig {
    /// Probe whose `σ₁₁` is converted to `K_I`.
    pub probe: String,
    /// Distance of that probe ahead of the crack tip.
    pub tip_distance: f64,
    pub crack_length: f64,
    /// Magnitude of the crack face pressure.
    pub traction: f64,
    /// Absolute tolerance of the principal-value quadratures.
    pub tolerance: f64,
}

struct Issues(Vec<ConfigIssue>);

impl Issues {
    fn check(&mut self, ok: bool, path: impl Into<String>, message: impl Into<String>) {
        if !ok {
            self.0.push(ConfigIssue {
                path: path.into(),
                message: message.into(),
            });
        }
    }
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| {
            let at = e
                .span()
                .map(|s| format!("byte {}..{}", s.start, s.end))
                .unwrap_or_else(|| "<document>".into());
            Error::config(at, e.message())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    /// Collects every problem instead of stopping at the first one.
    pub fn validate(&self) -> Result<()> {
        let mut is = Issues(Vec::new());
        is.check(
            self.version == CONFIG_VERSION,
            "version",
            format!("unsupported version {}, expected {CONFIG_VERSION}", self.version),
        );
        is.check(!self.name.trim().is_empty(), "name", "must not be empty");

        let m = &self.material;
        is.check(positive(m.rho0), "material.rho0", "must be positive");
        is.check(positive(m.mu), "material.mu", "must be positive");
        is.check(
            m.speed_ratio_sq.is_finite() && m.speed_ratio_sq > 2.0,
            "material.speed_ratio_sq",
            "must exceed 2 (non-negative lambda)",
        );

        is.check(positive(self.lattice.dx), "lattice.dx", "must be positive");
        is.check(
            self.lattice.tau_ratio.is_finite() && self.lattice.tau_ratio > 0.5,
            "lattice.tau_ratio",
            "must exceed 0.5",
        );

        is.check(positive(self.run.end_time), "run.end_time", "must be positive");
        for (v, key) in [
            (self.run.probe_interval, "run.probe_interval"),
            (self.run.snapshot_interval, "run.snapshot_interval"),
        ] {
            is.check(v.is_finite() && v >= 0.0, key, "must be zero or positive");
        }
        is.check(
            !self.output.directory.as_os_str().is_empty(),
            "output.directory",
            "must not be empty",
        );

        if let InitialState::DilatationPulse { width, amplitude, .. } = self.initial {
            is.check(positive(width), "initial.width", "must be positive");
            is.check(
                amplitude.is_finite() && amplitude.abs() < 1.0,
                "initial.amplitude",
                "must lie in (-1, 1)",
            );
        }

        if let Err(e) = self.domain.validate() {
            is.check(false, "domain", e.to_string());
        }
        self.validate_conditions(&mut is);

        let (lo, hi) = (self.domain.lower, self.domain.upper);
        for (k, p) in self.probes.iter().enumerate() {
            is.check(!p.id.is_empty(), format!("probes[{k}].id"), "must not be empty");
            let inside = (0..2).all(|a| p.position[a] > lo[a] && p.position[a] < hi[a]);
            is.check(
                inside,
                format!("probes[{k}].position"),
                format!("{:?} lies outside the domain", p.position),
            );
            if self.probes[..k].iter().any(|q| q.id == p.id) {
                is.check(false, format!("probes[{k}].id"), format!("duplicate id {:?}", p.id));
            }
        }

        if let Some(sif) = &self.sif {
            is.check(
                self.probes.iter().any(|p| p.id == sif.probe),
                "sif.probe",
                format!("no probe named {:?}", sif.probe),
            );
            is.check(positive(sif.tip_distance), "sif.tip_distance", "must be positive");
            is.check(positive(sif.crack_length), "sif.crack_length", "must be positive");
            is.check(positive(sif.traction), "sif.traction", "must be positive");
            is.check(positive(sif.tolerance), "sif.tolerance", "must be positive");
        }

        if is.0.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(is.0))
        }
    }

    fn validate_conditions(&self, is: &mut Issues) {
        let faces = &self.domain.faces;
        let mut all: Vec<(String, &BoundaryCondition)> = vec![
            ("domain.faces.bottom".into(), &faces.bottom),
            ("domain.faces.top".into(), &faces.top),
            ("domain.faces.left".into(), &faces.left),
            ("domain.faces.right".into(), &faces.right),
        ];
        for (k, ob) in self.domain.obstacles.iter().enumerate() {
            all.push((format!("domain.obstacles[{k}].bc"), &ob.bc));
        }
        for (path, bc) in all {
            let (values, profile): (Vec<f64>, &Profile) = match bc {
                BoundaryCondition::Dirichlet {
                    displacement,
                    profile,
                } => (displacement.to_vec(), profile),
                BoundaryCondition::Neumann { traction, profile } => (
                    match traction {
                        Traction::Normal(p) => vec![*p],
                        Traction::Vector(v) => v.to_vec(),
                    },
                    profile,
                ),
            };
            is.check(
                values.iter().all(|v| v.is_finite()),
                path.to_string(),
                "boundary values must be finite",
            );
            let ok = match *profile {
                Profile::Constant => true,
                Profile::Ramp { duration } => duration.is_finite() && duration >= 0.0,
                Profile::Step { time } => time.is_finite(),
            };
            is.check(ok, format!("{path}.profile"), "bad profile parameters");
        }
    }

    /// Names accepted by [`ScenarioConfig::builtin`].
    pub const BUILTINS: [&'static str; 4] =
        ["plate_hole", "plate_hole_nonpoisson", "crack_mode1", "periodic_smoke"];

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "plate_hole" => Some(plate_hole(3.0, 0.0125)),
            "plate_hole_nonpoisson" => {
                let mut c = plate_hole(2.8, 0.0125);
                c.name = name.into();
                c.output.directory = "out/plate_hole_nonpoisson".into();
                Some(c)
            }
            "crack_mode1" => Some(crack_mode1()),
            "periodic_smoke" => Some(periodic_smoke()),
            _ => None,
        }
    }
}

/// Square plate of side 1 with a central hole of radius 0.133, pulled on the
/// top and bottom faces by a traction ramped to `5 μ u_ref / l` over one
/// shear transit time, with `u_ref = 10⁻³ l`. Units: `l = 1`, `c_s = 1`.
///
/// Probes `P1` and `P2` sit at the two monitored points; `P1m` and `P2m` are
/// their mirror images in the `x₁` axis.
pub fn plate_hole(speed_ratio_sq: f64, dx: f64) -> ScenarioConfig {
    let mu = 1.0;
    let pull = BoundaryCondition::Neumann {
        traction: Traction::Normal(5.0 * mu * 1e-3),
        profile: Profile::Ramp { duration: 1.0 },
    };
    let free = BoundaryCondition::free();
    let domain = DomainSpec {
        lower: [-0.5, -0.5],
        upper: [0.5, 0.5],
        periodic: [false, false],
        faces: FaceConditions {
            bottom: pull,
            top: pull,
            left: free,
            right: free,
        },
        obstacles: Vec::new(),
    }
    .with_obstacle(
        Shape::Circle {
            center: [0.0, 0.0],
            radius: 0.133,
        },
        free,
    );
    let h = 0.5 * dx;
    let probe = |id: &str, position| ProbeConfig {
        id: id.into(),
        position,
    };
    ScenarioConfig {
        version: CONFIG_VERSION,
        name: "plate_hole".into(),
        material: MaterialConfig {
            rho0: 1.0,
            mu,
            speed_ratio_sq,
        },
        lattice: LatticeConfig {
            dx,
            tau_ratio: 0.55,
        },
        run: RunConfig {
            end_time: 2.0,
            probe_interval: 0.0,
            snapshot_interval: 0.0,
        },
        output: OutputConfig {
            directory: "out/plate_hole".into(),
        },
        initial: InitialState::Rest,
        domain,
        probes: vec![
            probe("P1", [-0.5 + h, 0.5 - h]),
            probe("P1m", [-0.5 + h, -0.5 + h]),
            probe("P2", [-0.15 + h, h]),
            probe("P2m", [-0.15 + h, -h]),
        ],
        sif: None,
    }
}

/// Crack of length 1 along `x₂` in a free square of side 4, both faces
/// suddenly loaded by a pressure `0.009615 μ`. Units: `l_c = 1`, `c_d = 1`
/// (`ρ₀ = 3.6`, `μ = 1.3`, `c_s²/c_d² = 13/36`).
pub fn crack_mode1() -> ScenarioConfig {
    let mu = 1.3;
    let pressure = 0.009615 * mu;
    let domain = DomainSpec::rectangle([-2.0, -2.0], [2.0, 2.0], BoundaryCondition::free())
        .with_obstacle(
            Shape::Slit {
                start: [0.0, -0.5],
                end: [0.0, 0.5],
            },
            BoundaryCondition::Neumann {
                traction: Traction::Normal(-pressure),
                profile: Profile::Step { time: 0.0 },
            },
        );
    ScenarioConfig {
        version: CONFIG_VERSION,
        name: "crack_mode1".into(),
        material: MaterialConfig {
            rho0: 3.6,
            mu,
            speed_ratio_sq: 36.0 / 13.0,
        },
        lattice: LatticeConfig {
            dx: 0.01,
            tau_ratio: 0.55,
        },
        run: RunConfig {
            end_time: 2.0,
            probe_interval: 0.0,
            snapshot_interval: 0.0,
        },
        output: OutputConfig {
            directory: "out/crack_mode1".into(),
        },
        initial: InitialState::Rest,
        domain,
        probes: vec![ProbeConfig {
            id: "P1".into(),
            position: [0.0, 0.52],
        }],
        sif: Some(SifConfig {
            probe: "P1".into(),
            tip_distance: 0.02,
            crack_length: 1.0,
            traction: pressure,
            tolerance: crate::fracture::sif::DEFAULT_TOL,
        }),
    }
}

/// Doubly periodic box without boundaries, started from a dilatation pulse.
pub fn periodic_smoke() -> ScenarioConfig {
    let mut domain = DomainSpec::rectangle([0.0, 0.0], [1.0, 1.0], BoundaryCondition::free());
    domain.periodic = [true, true];
    ScenarioConfig {
        version: CONFIG_VERSION,
        name: "periodic_smoke".into(),
        material: MaterialConfig {
            rho0: 1.0,
            mu: 1.0,
            speed_ratio_sq: 3.0,
        },
        lattice: LatticeConfig {
            dx: 1.0 / 32.0,
            tau_ratio: 0.55,
        },
        run: RunConfig {
            end_time: 1.0,
            probe_interval: 0.05,
            snapshot_interval: 0.5,
        },
        output: OutputConfig {
            directory: "out/periodic_smoke".into(),
        },
        initial: InitialState::DilatationPulse {
            center: [0.5, 0.5],
            width: 0.1,
            amplitude: 1e-3,
        },
        domain,
        probes: vec![ProbeConfig {
            id: "center".into(),
            position: [0.5 + 1.0 / 64.0, 0.5 + 1.0 / 64.0],
        }],
        sif: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate_and_round_trip() {
        for name in ScenarioConfig::BUILTINS {
            let c = ScenarioConfig::builtin(name).unwrap();
            c.validate().unwrap();
            let back = ScenarioConfig::from_toml(&c.to_toml()).unwrap();
            assert_eq!(back, c, "{name}");
        }
        assert!(ScenarioConfig::builtin("nope").is_none());
    }

    #[test]
    fn shipped_files_match_builtins() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
        for name in ScenarioConfig::BUILTINS {
            let c = ScenarioConfig::load(dir.join(format!("{name}.toml"))).unwrap();
            assert_eq!(c, ScenarioConfig::builtin(name).unwrap(), "{name}");
        }
    }

    #[test]
    fn plate_probes_sit_on_sites() {
        let c = plate_hole(3.0, 0.0125);
        let grid = c.domain.grid(c.lattice.dx).unwrap();
        for p in &c.probes {
            let f = grid.fractional(p.position);
            assert!((f[0] - f[0].round()).abs() < 1e-9, "{}", p.id);
            assert!((f[1] - f[1].round()).abs() < 1e-9, "{}", p.id);
        }
    }

    #[test]
    fn issues_carry_field_paths() {
        let mut c = crack_mode1();
        c.version = 7;
        c.lattice.tau_ratio = 0.5;
        c.run.end_time = 0.0;
        c.probes[0].position = [5.0, 0.0];
        c.sif.as_mut().unwrap().probe = "missing".into();
        let Err(Error::Config(issues)) = c.validate() else {
            panic!("expected config error");
        };
        let paths: Vec<_> = issues.iter().map(|i| i.path.as_str()).collect();
        assert_eq!(
            paths,
            ["version", "lattice.tau_ratio", "run.end_time", "probes[0].position", "sif.probe"]
        );
    }

    #[test]
    fn unknown_keys_and_missing_fields_are_rejected() {
        let text = crack_mode1().to_toml();
        let extra = format!("bogus = 1\n{text}");
        assert!(matches!(ScenarioConfig::from_toml(&extra), Err(Error::Config(_))));
        let missing = text.replace("tau_ratio = 0.55\n", "");
        assert!(matches!(ScenarioConfig::from_toml(&missing), Err(Error::Config(_))));
    }

    #[test]
    fn bad_obstacle_is_a_domain_issue() {
        let mut c = plate_hole(3.0, 0.0125);
        c.domain.obstacles[0].shape = Shape::Circle {
            center: [0.45, 0.0],
            radius: 0.133,
        };
        let Err(Error::Config(issues)) = c.validate() else {
            panic!()
        };
        assert_eq!(issues[0].path, "domain");
    }
}
