use nalgebra::{Matrix2, Rotation2, Vector2};
use proptest::prelude::*;

use elastolbm::boundary::{link_coefficients, neumann_poisson_target};
use elastolbm::geometry::{audit_coverage, classify_links, BoundarySource};
use elastolbm::lattice::OFFSETS;
use elastolbm::{BoundaryCondition, DomainSpec, Error, LatticeSpec, MaterialParams, Shape};

fn lattice(dx: f64) -> LatticeSpec {
    LatticeSpec::d2q9(dx, 1.0).unwrap()
}

fn crossing(site: [f64; 2], dir: usize, q: f64, dx: f64) -> [f64; 2] {
    let o = OFFSETS[dir];
    [site[0] + q * o[0] as f64 * dx, site[1] + q * o[1] as f64 * dx]
}

proptest! {
    #[test]
    fn circle_links_land_on_the_circle(
        cx in -0.3f64..0.3,
        cy in -0.3f64..0.3,
        r in 0.2f64..0.6,
    ) {
        let dx = 0.05;
        let dom = DomainSpec::rectangle([-1.0, -1.0], [1.0, 1.0], BoundaryCondition::fixed())
            .with_obstacle(Shape::Circle { center: [cx, cy], radius: r }, BoundaryCondition::free());
        let c = classify_links(&dom, &lattice(dx)).unwrap();
        prop_assert!(audit_coverage(&c).is_empty());
        for link in c.links.iter().filter(|l| l.source == BoundarySource::Obstacle(0)) {
            let x = crossing(c.grid.position(link.site), link.dir, link.q_frac, dx);
            let d = (x[0] - cx).hypot(x[1] - cy);
            prop_assert!((d - r).abs() < 1e-9 * r, "off circle by {}", d - r);
            let radial = [(x[0] - cx) / d, (x[1] - cy) / d];
            // Outward from the material means into the hole.
            prop_assert!((link.normal[0] + radial[0]).abs() < 1e-9);
            prop_assert!((link.normal[1] + radial[1]).abs() < 1e-9);
        }
        for x in 0..c.grid.len() {
            let p = c.grid.position(x);
            let inside = (p[0] - cx).hypot(p[1] - cy) <= r;
            prop_assert_eq!(c.material[x], !inside);
        }
    }

    #[test]
    fn slit_classification_is_complete(
        x0 in -0.5f64..0.5,
        y0 in -0.5f64..0.5,
        angle in 0.0f64..std::f64::consts::PI,
        len in 0.25f64..0.8,
    ) {
        let dx = 0.05;
        let end = [x0 + len * angle.cos(), y0 + len * angle.sin()];
        let dom = DomainSpec::rectangle([-1.5, -1.5], [1.5, 1.5], BoundaryCondition::free())
            .with_obstacle(Shape::Slit { start: [x0, y0], end }, BoundaryCondition::free());
        match classify_links(&dom, &lattice(dx)) {
            // Segments passing exactly through a site are rejected by design.
            Err(Error::GeometryResolution(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
            Ok(c) => {
                prop_assert!(audit_coverage(&c).is_empty());
                let slit_links = c.links.iter().filter(|l| l.source == BoundarySource::Obstacle(0)).count();
                prop_assert!(slit_links > 0);
                // Every cut link has its reverse cut from the other side.
                for l in c.links.iter().filter(|l| l.source == BoundarySource::Obstacle(0)) {
                    let back = c.grid.neighbor(l.site, l.dir).unwrap();
                    prop_assert!(c.is_cut(back, elastolbm::lattice::OPPOSITE[l.dir]));
                }
            }
        }
    }

    #[test]
    fn neumann_target_is_frame_covariant(
        t in prop::array::uniform2(-1.0f64..1.0),
        s in prop::array::uniform3(-1.0f64..1.0),
        theta in 0.0f64..std::f64::consts::TAU,
        rho_bd in 0.8f64..1.2,
    ) {
        let mat = MaterialParams::from_speed_ratio(1.0, 1.0, 2.8).unwrap();
        let n = Vector2::new(theta.cos(), theta.sin());
        let sigma = Matrix2::new(s[0], s[1], s[1], s[2]);
        let base = neumann_poisson_target(Vector2::from(t), n, &sigma, rho_bd, &mat).unwrap();
        let r = Rotation2::new(std::f64::consts::FRAC_PI_6).into_inner();
        let rotated = neumann_poisson_target(
            r * Vector2::from(t),
            r * n,
            &(r * sigma * r.transpose()),
            rho_bd,
            &mat,
        )
        .unwrap();
        prop_assert!((rotated.p - r * base.p * r.transpose()).norm() <= 1e-13);
        // The imposed traction is recovered from the target stress.
        let shift = (mat.lambda - mat.mu) * (mat.rho0 - rho_bd) / mat.rho0;
        let cauchy = -base.p + Matrix2::identity() * shift;
        prop_assert!((cauchy * n - Vector2::from(t)).norm() < 1e-13);
    }

    #[test]
    fn link_coefficients_interpolate(q in 1e-6f64..1.0) {
        let (kappa, gain) = link_coefficients(q);
        prop_assert!((gain - kappa - 1.0).abs() < 1e-14);
        prop_assert!(gain > 2.0 / 3.0 && gain < 2.0);
        prop_assert_eq!(kappa > 0.0, q < 0.5);
    }
}

#[test]
fn rectangle_walls_are_half_way() {
    let dom = DomainSpec::rectangle([0.0, 0.0], [1.0, 0.5], BoundaryCondition::free());
    let c = classify_links(&dom, &lattice(0.1)).unwrap();
    assert!(audit_coverage(&c).is_empty());
    assert!(!c.links.is_empty());
    // Corner diagonals hit both walls at the same point; only the q = 1/2 rule
    // is present.
    assert!(c.links.iter().all(|l| (l.q_frac - 0.5).abs() < 1e-12));
    assert_eq!(link_coefficients(0.5), (0.0, 1.0));
}

#[test]
fn undersized_obstacles_are_rejected() {
    let dom = DomainSpec::rectangle([-1.0, -1.0], [1.0, 1.0], BoundaryCondition::free()).with_obstacle(
        Shape::Circle {
            center: [0.0, 0.0],
            radius: 0.05,
        },
        BoundaryCondition::free(),
    );
    assert!(matches!(
        classify_links(&dom, &lattice(0.1)),
        Err(Error::GeometryResolution(_))
    ));
}
