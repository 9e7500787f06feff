//! Plate with a circular hole under ramped tension. Writes probe files to
//! `out/plate_hole` and prints the displacement history at P1.
//!
//! ```bash
//! cargo run --release --example plate_with_hole -- 2.8
//! ```

use elastolbm::scenario::{plate_hole, run_scenario, RunOptions};

fn main() {
    let ratio: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("c_d^2/c_s^2"))
        .unwrap_or(3.0);
    let mut config = plate_hole(ratio, 0.0125);
    config.run.snapshot_interval = 0.5;
    let run = run_scenario(&config, &RunOptions::to_dir("out/plate_hole")).unwrap();

    let p1 = run.probe("P1").unwrap();
    let every = p1.len() / 20;
    println!("{:>8} {:>14} {:>14}", "t c_s/l", "u1(P1)", "u2(P1)");
    for k in (0..p1.len()).step_by(every.max(1)) {
        let s = p1.samples[k];
        println!("{:>8.3} {:>14.6e} {:>14.6e}", p1.times[k], s.u[0], s.u[1]);
    }
    let (t, peak) = p1.max_by(|s| s.u[1]).unwrap();
    println!("peak u2(P1) = {peak:.6e} at t = {t:.3}");
    let p2 = run.probe("P2").unwrap();
    println!("final u1(P2) = {:.6e}", p2.samples.last().unwrap().u[0]);
    println!("{} steps in {:.1} s", run.summary.steps, run.summary.wall_seconds);
}
