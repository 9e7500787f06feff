//! Link classification around a hole and a slanted crack, with a coarse map
//! of the material mask and the number of cut links per site.
//!
//! ```bash
//! cargo run --example curved_geometry
//! ```

use elastolbm::geometry::{audit_coverage, classify_links, BoundarySource};
use elastolbm::{BoundaryCondition, DomainSpec, LatticeSpec, Shape};

fn main() {
    let dom = DomainSpec::rectangle([-1.0, -0.6], [1.0, 0.6], BoundaryCondition::free())
        .with_obstacle(
            Shape::Circle {
                center: [-0.45, 0.0],
                radius: 0.3,
            },
            BoundaryCondition::free(),
        )
        .with_obstacle(
            Shape::Slit {
                start: [0.2, -0.33],
                end: [0.7, 0.31],
            },
            BoundaryCondition::fixed(),
        );
    let lattice = LatticeSpec::d2q9(0.05, 1.0).unwrap();
    let c = classify_links(&dom, &lattice).unwrap();
    assert!(audit_coverage(&c).is_empty());

    for iy in (0..c.grid.ny).rev() {
        let row: String = (0..c.grid.nx)
            .map(|ix| {
                let x = c.grid.index(ix, iy);
                match (c.material[x], c.cut[x].count_ones()) {
                    (false, _) => '#',
                    (true, 0) => '.',
                    (true, n) => char::from_digit(n, 10).unwrap(),
                }
            })
            .collect();
        println!("{row}");
    }
    let count = |s: BoundarySource| c.links.iter().filter(|l| l.source == s).count();
    println!(
        "{} sites, {} material, links: hole {}, crack {}, faces {}",
        c.grid.len(),
        c.material_count(),
        count(BoundarySource::Obstacle(0)),
        count(BoundarySource::Obstacle(1)),
        c.links.len() - count(BoundarySource::Obstacle(0)) - count(BoundarySource::Obstacle(1)),
    );
}
