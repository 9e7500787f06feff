//! Analytical crack solution against reference values frozen from
//! `tests/oracles/fracture_reference.py`, which uses scipy's Brent root finder
//! and QUADPACK Cauchy-weight quadrature instead of this crate's bisection and
//! contour deformation.

use elastolbm::fracture::{rayleigh_speed, sif_k0, CrackProblem, K1Oracle};
use elastolbm::MaterialParams;

#[allow(clippy::excessive_precision)]
const NU_5_23_RAYLEIGH_OVER_CS: f64 = 0.913_963_075_964_201_57;
#[allow(clippy::excessive_precision)]
const NU_1_4_RAYLEIGH_OVER_CS: f64 = 0.919_401_686_761_966_21;

/// `(t c_d / l_c, K¹/K_s)` for `c_d²/c_s² = 36/13`.
const K1_REFERENCE: [(f64, f64); 6] = [
    (1.0, 0.864_884_690_938),
    (1.2, 0.953_625_236_248),
    (1.5, 1.074_763_912_994),
    (1.8, 1.266_626_712_578),
    (1.9, 1.328_783_783_162),
    (1.95, 1.316_438_370_328),
];

const K0_REFERENCE: [(f64, f64); 3] = [(1.2, 0.947_433_709_735), (1.5, 1.059_263_089_571), (1.9, 1.192_161_274_482)];

fn crack() -> CrackProblem {
    let mat = MaterialParams::from_speed_ratio(3.6, 1.3, 36.0 / 13.0).unwrap();
    CrackProblem::new(1.0, 0.009615 * 1.3, mat).unwrap()
}

#[test]
fn rayleigh_roots_match_reference() {
    let cs = (13.0f64 / 36.0).sqrt();
    let c = rayleigh_speed(cs, 1.0).unwrap() / cs;
    assert!((c - NU_5_23_RAYLEIGH_OVER_CS).abs() < 1e-11);
    let c = rayleigh_speed(1.0, 3f64.sqrt()).unwrap();
    assert!((c - NU_1_4_RAYLEIGH_OVER_CS).abs() < 1e-11);
}

#[test]
fn k0_matches_reference() {
    let p = crack();
    for (t, want) in K0_REFERENCE {
        let got = sif_k0(t, &p) / p.k_static();
        assert!((got - want).abs() < 1e-11, "t = {t}: {got} vs {want}");
    }
}

#[test]
fn k1_matches_reference() {
    let p = crack();
    let oracle = K1Oracle::new(p, 2e-5).unwrap();
    for (t, want) in K1_REFERENCE {
        let got = oracle.k1(t).unwrap() / p.k_static();
        let rel = (got - want).abs() / want;
        assert!(rel < 1e-5, "t = {t}: {got} vs {want} ({rel:e})");
    }
}

#[test]
fn analytical_switches_at_transit_time() {
    let p = crack();
    let oracle = K1Oracle::new(p, 2e-5).unwrap();
    assert_eq!(oracle.analytical(0.5).unwrap(), sif_k0(0.5, &p));
    assert_eq!(oracle.analytical(1.0).unwrap(), sif_k0(1.0, &p));
    assert_eq!(oracle.analytical(1.5).unwrap(), oracle.k1(1.5).unwrap());
    assert!(oracle.k1(0.9).is_err());
}
