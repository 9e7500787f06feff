//! Interpolated boundary rules for one link as the wall moves along it,
//! and their half-way limits.
//!
//! ```bash
//! cargo run --example boundary_rules
//! ```

use nalgebra::{Matrix2, Vector2};

use elastolbm::boundary::{
    anti_bounce_back, apply_dirichlet_link, apply_neumann_link, bounce_back, link_coefficients,
    neumann_poisson_target, Upstream,
};
use elastolbm::dynamics::equilibrium;
use elastolbm::geometry::{BoundaryLink, BoundarySource};
use elastolbm::{LatticeSpec, MaterialParams};

fn main() {
    let mat = MaterialParams::from_speed_ratio(1.0, 1.0, 2.8).unwrap();
    let lattice = LatticeSpec::d2q9(0.05, mat.cs()).unwrap();
    let fcol = equilibrium(1.001, Vector2::new(2e-4, 0.0), Matrix2::new(-1e-3, 0.0, 0.0, 4e-4), &lattice);
    let upstream = Upstream::Site(fcol[3] * 0.999);

    let j_star = Vector2::new(1e-4, 0.0);
    let sigma = Matrix2::new(1e-3, 0.0, 0.0, -4e-4);
    let traction = Vector2::new(2e-3, 0.0);
    let normal = Vector2::new(1.0, 0.0);
    let target = neumann_poisson_target(traction, normal, &sigma, 1.001, &mat).unwrap();

    println!("{:>6} {:>8} {:>8} {:>18} {:>18}", "q", "kappa", "gain", "Dirichlet f_3", "Neumann f_3");
    for q in [0.05, 0.25, 0.5, 0.75, 1.0] {
        let link = BoundaryLink {
            site: 0,
            dir: 1,
            q_frac: q,
            length: lattice.dx,
            normal: [1.0, 0.0],
            source: BoundarySource::Obstacle(0),
        };
        let (kappa, gain) = link_coefficients(q);
        let d = apply_dirichlet_link(&fcol, upstream, &link, j_star, &lattice);
        let n = apply_neumann_link(&fcol, upstream, &link, &target, &lattice);
        println!("{q:>6.2} {kappa:>8.4} {gain:>8.4} {d:>18.12e} {n:>18.12e}");
    }
    println!(
        "half-way:          bounce-back {:>18.12e} anti-bounce-back {:>18.12e}",
        bounce_back(fcol[1], 1, j_star, &lattice),
        anti_bounce_back(fcol[1], 1, &target, &lattice)
    );
}
