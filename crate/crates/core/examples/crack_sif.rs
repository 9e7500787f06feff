//! Suddenly loaded crack: LBM stress intensity factor next to the analytical
//! solution. Writes `out/crack_mode1/sif_report.csv`.
//!
//! ```bash
//! cargo run --release --example crack_sif
//! ```

use elastolbm::scenario::{crack_mode1, run_scenario, RunOptions};

fn main() {
    let config = crack_mode1();
    let run = run_scenario(&config, &RunOptions::to_dir("out/crack_mode1")).unwrap();
    let rows = run.sif.unwrap();
    println!("{:>8} {:>10} {:>10} {:>8}", "t c_d/l_c", "K_LBM/K_s", "K_ana/K_s", "rel err");
    for r in rows.iter().step_by(10) {
        println!("{:>8.3} {:>10.4} {:>10.4} {:>8.3}", r.t, r.k_lbm, r.k_analytical, r.rel_err);
    }
    println!("{} steps in {:.1} s", run.summary.steps, run.summary.wall_seconds);
}
