use crate::error::{Error, Result};

/// Secular function `(2 - (c/c_s)²)² - 4 √((1 - (c/c_d)²)(1 - (c/c_s)²))`.
pub fn secular(c: f64, cs: f64, cd: f64) -> f64 {
    let x2 = (c / cs).powi(2);
    let y2 = (c / cd).powi(2);
    (2.0 - x2).powi(2) - 4.0 * ((1.0 - y2) * (1.0 - x2)).max(0.0).sqrt()
}

/// Rayleigh surface wave speed by bisection on `(0.01 c_s, c_s)`, to `1e-12`
/// relative. The lower bracket skips the trivial root at `c = 0`.
pub fn rayleigh_speed(cs: f64, cd: f64) -> Result<f64> {
    if !(cs > 0.0 && cd > cs) || !cd.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need 0 < c_s < c_d, got c_s = {cs}, c_d = {cd}"
        )));
    }
    let mut lo = 0.01 * cs;
    let mut hi = cs;
    let mut f_lo = secular(lo, cs, cd);
    let f_hi = secular(hi, cs, cd);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NumericalFailure(format!(
            "secular equation has no sign change on ({lo}, {hi})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = secular(mid, cs, cd);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::NumericalFailure("Rayleigh bisection did not converge".into()))
}

/// Classical estimate `c_R ≈ c_s (0.862 + 1.14ν)/(1 + ν)`.
pub fn rayleigh_estimate(cs: f64, nu: f64) -> f64 {
    cs * (0.862 + 1.14 * nu) / (1.0 + nu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_solid_matches_closed_form() {
        let cr = rayleigh_speed(1.0, 3f64.sqrt()).unwrap();
        let exact = (2.0f64 - 2.0 / 3f64.sqrt()).sqrt();
        assert!((cr - exact).abs() < 1e-11);
        assert!(secular(cr, 1.0, 3f64.sqrt()).abs() < 1e-10);
        assert!(((rayleigh_estimate(1.0, 0.25) - 0.9176).abs()) < 1e-12);
    }

    #[test]
    fn root_sits_below_shear_speed() {
        for nu in [0.01, 0.1, 0.2174, 0.3, 0.45, 0.49] {
            let ratio: f64 = (2.0 - 2.0 * nu) / (1.0 - 2.0 * nu);
            let cs = 0.7;
            let cr = rayleigh_speed(cs, cs * ratio.sqrt()).unwrap();
            assert!(cr > 0.85 * cs && cr < cs, "nu {nu}: {cr}");
            assert!(secular(cr, cs, cs * ratio.sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_speeds() {
        assert!(rayleigh_speed(1.0, 1.0).is_err());
        assert!(rayleigh_speed(-1.0, 2.0).is_err());
    }
}
