//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit status if
//! any criterion fails.

use std::time::Instant;

use nalgebra::Matrix2;

use elastolbm::scenario::{crack_mode1, plate_hole, run_scenario, RunOptions};
use elastolbm::verify::{
    boundary_reduction_error, conservation, dilatation_defect, log_log_slope,
    moment_identity_error, oracle_consistency, rayleigh_gap, rest_state_deviation,
    wave_speed_error,
};
use elastolbm::Result;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn moment_identity() -> Result<Outcome> {
    let err = moment_identity_error(1000, 20_240_601);
    outcome(err <= 1e-12, format!("max relative error {err:.3e} over 1000 states (limit 1e-12)"))
}

fn conservation_128() -> Result<Outcome> {
    let r = conservation(128, 1000)?;
    outcome(
        r.mass_drift <= 1e-10 && r.momentum_defect <= 1e-10,
        format!(
            "mass drift {:.3e}, momentum defect {:.3e} per step (limit 1e-10)",
            r.mass_drift, r.momentum_defect
        ),
    )
}

fn wave_speeds() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for ratio in [3.0, 2.8] {
        for (shear, label) in [(false, "c_d"), (true, "c_s")] {
            let e = wave_speed_error(ratio, shear, 64)?;
            worst = worst.max(e.abs());
            parts.push(format!("{label}@{ratio}: {e:+.2e}"));
        }
    }
    outcome(worst <= 0.02, format!("{} (limit 2%)", parts.join(", ")))
}

fn boundary_reduction() -> Result<Outcome> {
    let err = boundary_reduction_error(10_000, 17);
    outcome(err <= 1e-15, format!("max difference {err:.3e} over 10000 states x 8 links (limit 1e-15)"))
}

fn rest_state() -> Result<Outcome> {
    let d = rest_state_deviation(500)?;
    outcome(d <= 1e-10, format!("max deviation {d:.3e} over 500 steps (limit 1e-10)"))
}

fn crack_benchmark() -> Result<Outcome> {
    let run = run_scenario(&crack_mode1(), &RunOptions::in_memory())?;
    let rows = run.sif.expect("crack scenario has an SIF section");
    let window = |lo: f64, hi: f64| {
        rows.iter()
            .filter(|r| r.t >= lo && r.t <= hi)
            .map(|r| (r.rel_err, r.t))
            .fold((0.0f64, 0.0), |a, b| if b.0 > a.0 { b } else { a })
    };
    let (e0, t0) = window(0.25, 1.0);
    let (e1, t1) = window(1.1, 1.9);
    outcome(
        e0 <= 0.1 && e1 <= 0.1,
        format!(
            "max |K_LBM - K0|/K0 = {:.1}% at t = {t0:.3} on [0.25, 1.0]; \
             max |K_LBM - K1|/K1 = {:.1}% at t = {t1:.3} on [1.1, 1.9] (limit 10%); {} steps",
            100.0 * e0,
            100.0 * e1,
            run.summary.steps
        ),
    )
}

fn oracle_self_consistency() -> Result<Outcome> {
    let times = [1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.75, 1.8, 1.85, 1.9];
    let r = oracle_consistency(2e-5, &times)?;
    outcome(
        r.continuity <= 1e-3 && r.tolerance_sensitivity <= 1e-4,
        format!(
            "continuity {:.3e} (limit 1e-3), tolerance halving {:.3e} (limit 1e-4)",
            r.continuity, r.tolerance_sensitivity
        ),
    )
}

fn rayleigh() -> Result<Outcome> {
    let a = rayleigh_gap(0.2174)?;
    let b = rayleigh_gap(0.25)?;
    outcome(
        a <= 0.01 && b <= 0.01,
        format!("gap {:.3}% at nu = 0.2174, {:.3}% at nu = 0.25 (limit 1%)", 100.0 * a, 100.0 * b),
    )
}

fn plate_benchmark() -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    for ratio in [3.0, 2.8] {
        let run = run_scenario(&plate_hole(ratio, 0.0125), &RunOptions::in_memory())?;
        let get = |id: &str| run.probe(id).expect("plate probe");
        let mut asym: f64 = 0.0;
        for (a, b) in [("P1", "P1m"), ("P2", "P2m")] {
            let (sa, sb) = (get(a), get(b));
            let scale = sa
                .samples
                .iter()
                .map(|s| s.u[0].abs().max(s.u[1].abs()))
                .fold(0.0, f64::max);
            for (x, y) in sa.samples.iter().zip(&sb.samples) {
                let d = (x.u[0] - y.u[0]).abs().max((x.u[1] + y.u[1]).abs());
                asym = asym.max(d / scale);
            }
        }
        let p1 = get("P1");
        let (t_peak, peak) = p1.max_by(|s| s.u[1]).expect("samples");
        let last = p1.samples.last().expect("samples").u[1];
        let sym_ok = asym <= 1e-8;
        let over_ok = peak > last;
        passed &= sym_ok && over_ok;
        parts.push(format!(
            "cd2/cs2 = {ratio}: asymmetry {asym:.1e}, peak u2(P1) {peak:.4e} at t = {t_peak:.3} > final {last:.4e}: {over_ok}"
        ));
    }
    let mut peaks = Vec::new();
    for dx in [0.025, 0.0125, 0.00625] {
        let run = run_scenario(&plate_hole(3.0, dx), &RunOptions::in_memory())?;
        peaks.push(run.probe("P1").expect("P1").max_by(|s| s.u[1]).expect("samples").1);
    }
    let (d1, d2) = ((peaks[1] - peaks[0]).abs(), (peaks[2] - peaks[1]).abs());
    passed &= d2 < d1;
    parts.push(format!(
        "peak u2(P1) at dx = 0.025/0.0125/0.00625: {:.5e}/{:.5e}/{:.5e}, changes {d1:.2e} then {d2:.2e}",
        peaks[0], peaks[1], peaks[2]
    ));
    outcome(passed, parts.join("; "))
}

fn dilatation_order() -> Result<Outcome> {
    let h = Matrix2::new(1.0, 0.3, -0.2, 0.5);
    let mut pts = Vec::new();
    for eps in [1e-2, 1e-3, 1e-4] {
        pts.push((eps, dilatation_defect(eps, h)?));
    }
    let slope = log_log_slope(&pts);
    outcome((slope - 2.0).abs() <= 0.1, format!("log-log slope {slope:.4} (target 2.0 +- 0.1)"))
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("moment/equilibrium identity", moment_identity),
        ("conservation on a 128x128 periodic box", conservation_128),
        ("wave speeds at 64 sites per wavelength", wave_speeds),
        ("boundary rule reduction at q = 1/2", boundary_reduction),
        ("rest state with traction-free boundaries", rest_state),
        ("crack benchmark vs analytical K_I", crack_benchmark),
        ("analytical K_I self-consistency", oracle_self_consistency),
        ("Rayleigh speed vs estimate", rayleigh),
        ("plate with hole: symmetry, overshoot, convergence", plate_benchmark),
        ("density-dilatation relation is second order", dilatation_order),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let (tag, detail) = match run() {
            Ok(o) if o.passed => ("PASS", o.detail),
            Ok(o) => ("FAIL", o.detail),
            Err(e) => ("FAIL", format!("error: {e}")),
        };
        if tag == "FAIL" {
            failures += 1;
        }
        println!(
            "{tag} [{}] {name}: {detail} ({:.1} s)",
            k + 1,
            started.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
