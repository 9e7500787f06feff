//! Equilibrium distributions and their moments on the D2Q9 lattice.
//!
//! ```bash
//! cargo run --example lattice_moments
//! ```

use nalgebra::{Matrix2, Vector2};

use elastolbm::dynamics::equilibrium;
use elastolbm::fields::compute_moments;
use elastolbm::lattice::OFFSETS;
use elastolbm::{LatticeSpec, MaterialParams};

fn main() {
    let mat = MaterialParams::from_speed_ratio(1.0, 1.0, 2.8).unwrap();
    let lattice = LatticeSpec::d2q9(0.01, mat.cs()).unwrap();
    println!("dx = {}, dt = {:.6e}, c = dx/dt = {:.6}", lattice.dx, lattice.dt, lattice.speed());

    let rho = 1.002;
    let j = Vector2::new(3e-4, -1e-4);
    let p = Matrix2::new(-2e-3, 5e-4, 5e-4, 1e-3);
    let f = equilibrium(rho, j, p, &lattice);
    for (i, v) in f.iter().enumerate() {
        println!("  f_{i} {:>3?}: {v:+.12e}", OFFSETS[i]);
    }

    let m = compute_moments(&f, Vector2::zeros(), &lattice);
    println!("rho: {rho:.15} -> {:.15}", m.rho);
    println!("j:   {:?} -> {:?}", j.as_slice(), m.j.as_slice());
    println!("P:   {:?} -> {:?}", p.as_slice(), m.p.as_slice());
}
