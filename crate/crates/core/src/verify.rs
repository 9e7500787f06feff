//! Invariant checks shared by the `verify` subcommand and the acceptance
//! run. Each check builds its own small problem and reports a measured value
//! against a fixed threshold.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boundary::{
    anti_bounce_back, apply_dirichlet_link, apply_neumann_link, bounce_back, BoundaryCondition,
    PoissonStressTarget, Upstream,
};
use crate::continuum::div_u_from_density;
use crate::dynamics::{equilibrium, RelaxationSetting, Simulation};
use crate::error::Result;
use crate::fields::compute_moments;
use crate::fracture::{rayleigh_estimate, rayleigh_speed, sif_k0, CrackProblem, K1Oracle};
use crate::geometry::{BoundaryLink, BoundarySource, DomainSpec, Shape};
use crate::lattice::{LatticeSpec, Q};
use crate::material::MaterialParams;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    /// Passes when `measured <= limit` (NaN fails).
    pub fn at_most(name: impl Into<String>, measured: f64, limit: f64, what: &str) -> Self {
        Self {
            name: name.into(),
            passed: measured <= limit,
            detail: format!("{what} = {measured:.3e} (limit {limit:.1e})"),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn material(ratio: f64) -> MaterialParams {
    MaterialParams::from_speed_ratio(1.0, 1.0, ratio).expect("ratio above 2")
}

fn relaxation(lattice: &LatticeSpec) -> RelaxationSetting {
    RelaxationSetting::from_ratio(0.55, lattice.dt).expect("0.55 > 0.5")
}

/// Largest relative deviation of `compute_moments(equilibrium(ρ, j, P))` from
/// `(ρ, j, P)` over random admissible states; each moment is compared in its
/// own norm.
pub fn moment_identity_error(samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let dx = rng.gen_range(0.001..1.0);
        let cs = rng.gen_range(0.1..10.0);
        let lattice = LatticeSpec::d2q9(dx, cs).expect("positive spacing and speed");
        let rho = rng.gen_range(0.2..5.0);
        let scale = rho * cs * cs;
        let j = Vector2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * rho * cs * 0.1;
        let off = rng.gen_range(-0.5..0.5) * scale;
        let p = Matrix2::new(
            rng.gen_range(-1.0..1.0) * scale,
            off,
            off,
            rng.gen_range(-1.0..1.0) * scale,
        );
        let m = compute_moments(&equilibrium(rho, j, p, &lattice), Vector2::zeros(), &lattice);
        worst = worst
            .max((m.rho - rho).abs() / rho)
            .max((m.j - j).norm() / j.norm().max(f64::MIN_POSITIVE))
            .max((m.p - p).norm() / p.norm().max(f64::MIN_POSITIVE));
    }
    worst
}

/// Mass drift and momentum balance of a doubly periodic box over `steps`.
#[derive(Debug, Clone, Copy)]
pub struct ConservationReport {
    /// `|Σρ(T) - Σρ(0)| / Σρ(0)` without body force.
    pub mass_drift: f64,
    /// Largest `|ΔΣj - dt ΣF| / |dt ΣF|` over all steps with a constant force.
    pub momentum_defect: f64,
}

fn periodic_box(n: usize, ratio: f64) -> Result<Simulation> {
    let mat = material(ratio);
    let lattice = LatticeSpec::d2q9(1.0 / n as f64, mat.cs())?;
    let mut dom = DomainSpec::rectangle([0.0, 0.0], [1.0, 1.0], BoundaryCondition::free());
    dom.periodic = [true, true];
    let relax = relaxation(&lattice);
    let mut sim = Simulation::new(dom, mat, lattice, relax)?;
    // Smooth, non-uniform start so that every moment evolves.
    sim.initialize_equilibrium(|x| {
        let (a, b) = (2.0 * PI * x[0], 2.0 * PI * x[1]);
        let e = 1e-3 * (a.sin() * (2.0 * b).cos());
        let j = Vector2::new(1e-4 * b.cos(), -2e-4 * a.sin());
        let p = Matrix2::new(-e, 3e-4 * (a + b).cos(), 3e-4 * (a + b).cos(), 0.5 * e);
        (1.0 - e, j, p)
    })?;
    Ok(sim)
}

/// Runs two periodic boxes of `n × n` sites for `steps` steps, one without
/// forcing and one with a uniform body force. The forced run uses a Poisson
/// solid, for which the source carries no density-gradient term.
pub fn conservation(n: usize, steps: u64) -> Result<ConservationReport> {
    let mut free = periodic_box(n, 2.8)?;
    let m0 = free.total_mass();
    free.run(steps)?;
    let mass_drift = ((free.total_mass() - m0) / m0).abs();

    let mut forced = periodic_box(n, 3.0)?;
    let force = [2e-3, -1e-3];
    forced.set_body_force(force)?;
    let dt = forced.lattice().dt;
    let sites = forced.classified().material_count() as f64;
    let expect = [dt * force[0] * sites, dt * force[1] * sites];
    let scale = expect[0].hypot(expect[1]);
    let mut momentum_defect: f64 = 0.0;
    let mut before = forced.total_momentum();
    for _ in 0..steps {
        forced.step()?;
        let after = forced.total_momentum();
        let d = [after[0] - before[0] - expect[0], after[1] - before[1] - expect[1]];
        momentum_defect = momentum_defect.max(d[0].hypot(d[1]) / scale);
        before = after;
    }
    Ok(ConservationReport {
        mass_drift,
        momentum_defect,
    })
}

/// Relative error of the phase speed of a sinusoidal plane wave train with
/// `sites_per_wavelength` sites per wavelength on a periodic strip, measured
/// from the phase of the momentum density over two periods.
pub fn wave_speed_error(ratio: f64, shear: bool, sites_per_wavelength: usize) -> Result<f64> {
    let mat = material(ratio);
    let dx = 1.0 / sites_per_wavelength as f64;
    let lattice = LatticeSpec::d2q9(dx, mat.cs())?;
    let mut dom = DomainSpec::rectangle([0.0, 0.0], [1.0, 4.0 * dx], BoundaryCondition::free());
    dom.periodic = [true, true];
    let relax = relaxation(&lattice);
    let mut sim = Simulation::new(dom, mat, lattice, relax)?;
    let k = 2.0 * PI;
    let amp = 1e-4;
    let (mu, lam, rho0) = (mat.mu, mat.lambda, mat.rho0);
    let c = if shear { mat.cs() } else { mat.cd() };
    // Right-running wave u = a sin(k(x - ct)) along x₂ (shear) or x₁.
    sim.initialize_equilibrium(|x| {
        let e = amp * k * (k * x[0]).cos();
        let v = -c * e;
        if shear {
            let s12 = mu * e;
            (rho0, Vector2::new(0.0, rho0 * v), Matrix2::new(0.0, -s12, -s12, 0.0))
        } else {
            let shift = (lam - mu) * e;
            let p11 = -(lam + 2.0 * mu) * e + shift;
            let p22 = -lam * e + shift;
            (rho0 * (1.0 - e), Vector2::new(rho0 * v, 0.0), Matrix2::new(p11, 0.0, 0.0, p22))
        }
    })?;
    let grid = sim.classified().grid;
    let phase = |s: &Simulation| {
        let (mut re, mut im) = (0.0, 0.0);
        for ix in 0..grid.nx {
            let site = grid.index(ix, 0);
            let v = s.state().j[site][usize::from(shear)];
            let ph = k * grid.position(site)[0];
            re += v * ph.cos();
            im += v * ph.sin();
        }
        im.atan2(re)
    };
    let steps = (2.0 / c / lattice.dt).round() as u64;
    let mut last = phase(&sim);
    let mut advance = 0.0;
    for _ in 0..steps {
        sim.step()?;
        let p = phase(&sim);
        let mut d = p - last;
        if d > PI {
            d -= 2.0 * PI;
        } else if d < -PI {
            d += 2.0 * PI;
        }
        advance += d;
        last = p;
    }
    let measured = advance.abs() / (steps as f64 * lattice.dt) / k;
    Ok((measured - c) / c)
}

/// Largest `|interpolated - conforming|` at `q_frac = 1/2` over random
/// populations and boundary values, for both rule families and every
/// direction.
pub fn boundary_reduction_error(samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let lattice =
            LatticeSpec::d2q9(rng.gen_range(0.01..1.0), rng.gen_range(0.2..3.0)).expect("valid");
        let mut fcol = [0.0; Q];
        for f in fcol.iter_mut() {
            *f = rng.gen_range(-1.0..1.0);
        }
        let upstream = Upstream::Site(rng.gen_range(-1.0..1.0));
        let j_star = Vector2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let off = rng.gen_range(-1.0..1.0);
        let target = PoissonStressTarget {
            p: Matrix2::new(rng.gen_range(-1.0..1.0), off, off, rng.gen_range(-1.0..1.0)),
            rho_bd: rng.gen_range(0.5..2.0),
        };
        for dir in 1..Q {
            let link = BoundaryLink {
                site: 0,
                dir,
                q_frac: 0.5,
                length: lattice.link_length(dir),
                normal: [1.0, 0.0],
                source: BoundarySource::Obstacle(0),
            };
            let d = apply_dirichlet_link(&fcol, upstream, &link, j_star, &lattice)
                - bounce_back(fcol[dir], dir, j_star, &lattice);
            let n = apply_neumann_link(&fcol, upstream, &link, &target, &lattice)
                - anti_bounce_back(fcol[dir], dir, &target, &lattice);
            worst = worst.max(d.abs()).max(n.abs());
        }
    }
    worst
}

/// Largest per-step deviation `max |f - f_rest| / ρ₀` of a traction-free
/// rectangle with a hole and a slit started at rest.
pub fn rest_state_deviation(steps: u64) -> Result<f64> {
    let mat = material(2.8);
    let lattice = LatticeSpec::d2q9(0.05, mat.cs())?;
    let dom = DomainSpec::rectangle([-1.0, -1.0], [1.0, 1.0], BoundaryCondition::free())
        .with_obstacle(
            Shape::Circle {
                center: [0.31, 0.12],
                radius: 0.3,
            },
            BoundaryCondition::free(),
        )
        .with_obstacle(
            Shape::Slit {
                start: [-0.6, -0.5],
                end: [-0.2, 0.4],
            },
            BoundaryCondition::free(),
        );
    let relax = relaxation(&lattice);
    let mut sim = Simulation::new(dom, mat, lattice, relax)?;
    let rest = equilibrium(mat.rho0, Vector2::zeros(), Matrix2::zeros(), &lattice);
    let material_sites: Vec<usize> = (0..sim.classified().grid.len())
        .filter(|&x| sim.classified().material[x])
        .collect();
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        sim.step()?;
        let f = sim.distributions();
        for &x in &material_sites {
            for (i, r) in rest.iter().enumerate() {
                worst = worst.max((f.get(i, x) - r).abs() / mat.rho0);
            }
        }
    }
    Ok(worst)
}

/// Relative gap between the bisection root and the closed-form estimate of
/// the Rayleigh speed, for a solid with `c_s = 1` and Poisson ratio `nu`.
pub fn rayleigh_gap(nu: f64) -> Result<f64> {
    let ratio = 2.0 * (1.0 - nu) / (1.0 - 2.0 * nu);
    let root = rayleigh_speed(1.0, ratio.sqrt())?;
    let est = rayleigh_estimate(1.0, nu);
    Ok((root - est).abs() / est)
}

/// Self-consistency of the analytical crack solution.
#[derive(Debug, Clone, Copy)]
pub struct OracleReport {
    /// `|K¹ - K⁰| / K⁰` just after the first transit time.
    pub continuity: f64,
    /// Largest relative change of `K¹` when the tolerance is halved.
    pub tolerance_sensitivity: f64,
}

/// Oracle checks for the crack material, with `K¹` sampled at `times`
/// (multiples of `l_c/c_d`).
pub fn oracle_consistency(tol: f64, times: &[f64]) -> Result<OracleReport> {
    let mat = MaterialParams::from_speed_ratio(3.6, 1.3, 36.0 / 13.0)?;
    let problem = CrackProblem::new(1.0, 0.009615 * 1.3, mat)?;
    let coarse = K1Oracle::new(problem, tol)?;
    let fine = K1Oracle::new(problem, 0.5 * tol)?;
    let t1 = problem.transit_time() * (1.0 + 1e-4);
    let k0 = sif_k0(t1, &problem);
    let continuity = (coarse.k1(t1)? - k0).abs() / k0;
    let mut tolerance_sensitivity: f64 = 0.0;
    for &t in times {
        let a = coarse.k1(t)?;
        let b = fine.k1(t)?;
        tolerance_sensitivity = tolerance_sensitivity.max((a - b).abs() / b.abs());
    }
    Ok(OracleReport {
        continuity,
        tolerance_sensitivity,
    })
}

/// `|div u - (ρ₀-ρ)/ρ₀|` for the uniform deformation `F = I + εH`, with `ρ`
/// from exact mass conservation `ρ = ρ₀ / det F`.
pub fn dilatation_defect(eps: f64, h: Matrix2<f64>) -> Result<f64> {
    let rho0 = 1.0;
    let f = Matrix2::identity() + h * eps;
    let rho = rho0 / f.determinant();
    let divu = eps * h.trace();
    Ok((divu - div_u_from_density(rho, rho0)?).abs())
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| {
        let dx = x.ln() - mx;
        (a + dx * (y.ln() - my), b + dx * dx)
    });
    num / den
}

/// Reduced-size run of the invariant checks, for the `verify` subcommand.
pub fn quick_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let fail = |name: &str, e: crate::error::Error| Check {
        name: name.into(),
        passed: false,
        detail: e.to_string(),
    };

    out.push(Check::at_most(
        "moment identity",
        moment_identity_error(1000, 1),
        1e-12,
        "max relative error",
    ));
    match conservation(32, 200) {
        Ok(r) => {
            out.push(Check::at_most("mass conservation", r.mass_drift, 1e-10, "relative drift"));
            out.push(Check::at_most(
                "momentum balance",
                r.momentum_defect,
                1e-10,
                "relative defect",
            ));
        }
        Err(e) => out.push(fail("conservation", e)),
    }
    for (ratio, shear) in [(3.0, false), (3.0, true), (2.8, false), (2.8, true)] {
        let name = format!(
            "{} wave speed, cd2/cs2 = {ratio}",
            if shear { "shear" } else { "dilatational" }
        );
        match wave_speed_error(ratio, shear, 32) {
            Ok(e) => out.push(Check::at_most(name, e.abs(), 0.02, "relative error")),
            Err(e) => out.push(fail(&name, e)),
        }
    }
    out.push(Check::at_most(
        "boundary reduction at q = 1/2",
        boundary_reduction_error(200, 2),
        1e-15,
        "max difference",
    ));
    match rest_state_deviation(100) {
        Ok(d) => out.push(Check::at_most("rest state with boundaries", d, 1e-10, "max deviation")),
        Err(e) => out.push(fail("rest state with boundaries", e)),
    }
    for nu in [0.2174, 0.25] {
        let name = format!("Rayleigh speed, nu = {nu}");
        match rayleigh_gap(nu) {
            Ok(g) => out.push(Check::at_most(name, g, 0.01, "relative gap")),
            Err(e) => out.push(fail(&name, e)),
        }
    }
    let h = Matrix2::new(1.0, 0.3, -0.2, 0.5);
    let pts: Vec<(f64, f64)> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&e| (e, dilatation_defect(e, h).unwrap_or(f64::NAN)))
        .collect();
    let slope = log_log_slope(&pts);
    out.push(Check::at_most(
        "density-dilatation order",
        (slope - 2.0).abs(),
        0.1,
        "|slope - 2|",
    ));
    out
}
