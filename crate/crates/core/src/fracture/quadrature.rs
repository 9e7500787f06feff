//! Locally adaptive trapezoid rule.

use crate::error::{Error, Result};

/// Hard cap on panel halvings.
pub const MAX_LEVELS: u32 = 40;
const INITIAL_PANELS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the local error estimates of all accepted panels.
    pub error: f64,
    pub evaluations: usize,
    pub deepest: u32,
}

/// Integrates `f` over `[lo, hi]`.
///
/// Each panel is halved until the difference between its one- and two-panel
/// trapezoid sums, divided by three, falls below `tol · width / (hi - lo)`.
/// Panels reaching [`MAX_LEVELS`] are accepted as they are; the call fails if
/// their combined error estimate exceeds `tol`.
pub fn adaptive_trapezoid<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<Quadrature> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("bad interval [{lo}, {hi}]")));
    }
    if hi == lo {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            deepest: 0,
        });
    }
    let (a, b, sign) = if hi > lo { (lo, hi, 1.0) } else { (hi, lo, -1.0) };
    let width = b - a;
    let mut state = State {
        evaluations: 0,
        deepest: 0,
        capped_error: 0.0,
        error: 0.0,
        worst: None,
    };
    let mut eval = |x: f64, st: &mut State| {
        st.evaluations += 1;
        f(x)
    };
    let h = width / INITIAL_PANELS as f64;
    let mut left = eval(a, &mut state);
    let mut total = 0.0;
    for k in 0..INITIAL_PANELS {
        let l = a + k as f64 * h;
        let r = if k + 1 == INITIAL_PANELS { b } else { l + h };
        let right = eval(r, &mut state);
        total += panel(&mut eval, l, r, left, right, 0, tol / width, &mut state);
        left = right;
    }
    if !total.is_finite() {
        return Err(Error::NumericalFailure(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    if state.capped_error > tol {
        let at = state.worst.unwrap_or(a);
        return Err(Error::NumericalFailure(format!(
            "adaptive trapezoid on [{a}, {b}] not converged after {MAX_LEVELS} halvings near x = {at}: \
             residual estimate {:.3e} > tol {tol:.3e} ({} evaluations)",
            state.capped_error, state.evaluations
        )));
    }
    Ok(Quadrature {
        value: sign * total,
        error: state.error,
        evaluations: state.evaluations,
        deepest: state.deepest,
    })
}

struct State {
    evaluations: usize,
    deepest: u32,
    capped_error: f64,
    error: f64,
    worst: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
fn panel<E: FnMut(f64, &mut State) -> f64>(
    eval: &mut E,
    l: f64,
    r: f64,
    fl: f64,
    fr: f64,
    level: u32,
    density: f64,
    st: &mut State,
) -> f64 {
    let m = 0.5 * (l + r);
    let fm = eval(m, st);
    let w = r - l;
    let coarse = 0.5 * w * (fl + fr);
    let fine = 0.25 * w * (fl + 2.0 * fm + fr);
    let err = (fine - coarse).abs() / 3.0;
    st.deepest = st.deepest.max(level);
    if err <= density * w {
        st.error += err;
        return fine;
    }
    if level + 1 >= MAX_LEVELS || m <= l || m >= r {
        st.error += err;
        st.capped_error += err;
        if st.worst.is_none() {
            st.worst = Some(m);
        }
        return fine;
    }
    panel(eval, l, m, fl, fm, level + 1, density, st) + panel(eval, m, r, fm, fr, level + 1, density, st)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_linear_functions() {
        let q = adaptive_trapezoid(|x| 3.0 * x - 1.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((q.value - 4.0).abs() < 1e-14);
        let r = adaptive_trapezoid(|x| 3.0 * x - 1.0, 2.0, 0.0, 1e-12).unwrap();
        assert_eq!(r.value, -q.value);
    }

    #[test]
    fn endpoint_square_root() {
        // ∫₀¹ √x dx = 2/3 with a singular derivative at 0.
        let q = adaptive_trapezoid(f64::sqrt, 0.0, 1.0, 1e-9).unwrap();
        assert!((q.value - 2.0 / 3.0).abs() < 1e-8, "{}", q.value);
        assert!(q.deepest > 10);
    }

    #[test]
    fn smooth_oscillation() {
        let q = adaptive_trapezoid(f64::cos, 0.0, 10.0, 1e-10).unwrap();
        assert!((q.value - 10f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn reports_non_convergence() {
        // 1/x has a non-integrable pole at 0.
        let err = adaptive_trapezoid(|x| if x == 0.0 { 0.0 } else { 1.0 / x }, 0.0, 1.0, 1e-12)
            .unwrap_err();
        assert!(matches!(err, Error::NumericalFailure(_)));
        assert!(adaptive_trapezoid(|x| x, 0.0, 1.0, 0.0).is_err());
    }
}
