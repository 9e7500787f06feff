//! Analytical mode-I stress intensity factor of a suddenly loaded crack,
//! before and after the first dilatational transit.
//!
//! ```bash
//! cargo run --release --example fracture_oracle
//! ```

use elastolbm::fracture::{rayleigh_estimate, sif_k0, CrackProblem, K1Oracle};
use elastolbm::MaterialParams;

fn main() {
    let mat = MaterialParams::from_speed_ratio(3.6, 1.3, 36.0 / 13.0).unwrap();
    let problem = CrackProblem::new(1.0, 0.009615 * 1.3, mat).unwrap();
    let nu = mat.poisson_ratio();
    println!(
        "nu = {nu:.4}, c_s = {:.5}, c_R = {:.5} (estimate {:.5})",
        mat.cs(),
        problem.rayleigh_speed(),
        rayleigh_estimate(mat.cs(), nu)
    );

    let started = std::time::Instant::now();
    let oracle = K1Oracle::new(problem, 2e-5).unwrap();
    println!("tables built in {:.2} s", started.elapsed().as_secs_f64());

    let k_s = problem.k_static();
    println!("{:>6} {:>10} {:>10}", "t", "K0/K_s", "K/K_s");
    for k in 0..=20 {
        let t = 0.1 * k as f64;
        let ana = oracle.analytical(t).unwrap() / k_s;
        println!("{t:>6.2} {:>10.6} {ana:>10.6}", sif_k0(t, &problem) / k_s);
    }
}
