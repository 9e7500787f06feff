//! Stress intensity factors of a crack of length `l_c` whose faces are
//! suddenly loaded by a uniform opening traction `t*`.
//!
//! Slownesses are expressed in units of `1/c_d` and times in units of
//! `l_c/c_d`, so `a = 1`, `b = c_d/c_s` and `c_r = c_d/c_R`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::quadrature::{adaptive_trapezoid, MAX_LEVELS};
use super::rayleigh::rayleigh_speed;
use crate::error::{Error, Result};
use crate::material::MaterialParams;

/// Value of the Wiener-Hopf factor `F₊(0)`.
pub const F_PLUS_0: f64 = 0.8774;

/// Default absolute tolerance of the principal-value quadratures.
pub const DEFAULT_TOL: f64 = 2e-5;

const TABLE_NODES: usize = 512;
const INNER_TABLE_TOL: f64 = 1e-8;
const SEMICIRCLE_PANELS: usize = 128;
/// Outer points inside the exclusion shells closer than this to `c_r` use the
/// exact inner integral.
const EXACT_WINDOW: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrackProblem {
    pub l_c: f64,
    pub t_star: f64,
    pub material: MaterialParams,
    c_rayleigh: f64,
}

impl CrackProblem {
    pub fn new(l_c: f64, t_star: f64, material: MaterialParams) -> Result<Self> {
        if !(l_c > 0.0) || !l_c.is_finite() || !t_star.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "crack length {l_c} and traction {t_star} must be finite, l_c > 0"
            )));
        }
        let c_rayleigh = rayleigh_speed(material.cs(), material.cd())?;
        Ok(Self {
            l_c,
            t_star,
            material,
            c_rayleigh,
        })
    }

    /// Dilatational slowness `1/c_d`.
    pub fn a(&self) -> f64 {
        1.0 / self.material.cd()
    }

    /// Shear slowness `1/c_s`.
    pub fn b(&self) -> f64 {
        1.0 / self.material.cs()
    }

    /// Rayleigh slowness `1/c_R`.
    pub fn c_r(&self) -> f64 {
        1.0 / self.c_rayleigh
    }

    pub fn rayleigh_speed(&self) -> f64 {
        self.c_rayleigh
    }

    /// Quasi-static reference `K_s = t* √(π l_c / 2)`.
    pub fn k_static(&self) -> f64 {
        self.t_star * (PI * self.l_c / 2.0).sqrt()
    }

    /// Time for a dilatational wave to cross the crack, `l_c / c_d`.
    pub fn transit_time(&self) -> f64 {
        self.l_c / self.material.cd()
    }
}

/// `K⁰ = 2 t* √(1-2ν)/(1-ν) √(c_d t/π)`, exact until `t = l_c/c_d`.
pub fn sif_k0(t: f64, problem: &CrackProblem) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let nu = problem.material.poisson_ratio();
    2.0 * problem.t_star * (1.0 - 2.0 * nu).sqrt() / (1.0 - nu)
        * (problem.material.cd() * t / PI).sqrt()
}

/// `K¹(t)` for `l_c/c_d ≤ t`, exact until `2 l_c/c_d`. Builds a fresh
/// [`K1Oracle`]; reuse one when evaluating many times.
pub fn sif_k1(t: f64, problem: &CrackProblem, tol: f64) -> Result<f64> {
    K1Oracle::new(*problem, tol)?.k1(t)
}

/// Mode-I stress intensity factor from the opening stress at distance `r`
/// ahead of the tip: `K = σ₁₁ √(2π r)`.
pub fn extract_sif(sigma11: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("distance to the tip must be positive, got {r}")));
    }
    Ok(sigma11 * (2.0 * PI * r).sqrt())
}

/// Time series of a stress intensity factor with its normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct SIFSeries {
    pub times: Vec<f64>,
    pub k: Vec<f64>,
    pub k_static: f64,
}

impl SIFSeries {
    pub fn new(k_static: f64) -> Self {
        Self {
            times: Vec::new(),
            k: Vec::new(),
            k_static,
        }
    }

    pub fn push(&mut self, t: f64, k: f64) {
        self.times.push(t);
        self.k.push(k);
    }

    pub fn normalized(&self) -> Vec<f64> {
        self.k.iter().map(|k| k / self.k_static).collect()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Evaluator of the nested principal-value integral for `K¹`.
///
/// The inner integral depends only on the outer variable `η`, so it is
/// tabulated once on `[a, b]` and `[b, η_max]` and interpolated, except close
/// to the outer pole `η = c_r` where it is recomputed.
#[derive(Debug, Clone)]
pub struct K1Oracle {
    problem: CrackProblem,
    tol: f64,
    a: f64,
    b: f64,
    c_r: f64,
    eta_max: f64,
    lower: Vec<Complex64>,
    upper: Vec<Complex64>,
}

impl K1Oracle {
    /// Tabulates the inner integral up to `η = 2.5` (times up to
    /// `2.5 l_c/c_d`); later times fall back to direct evaluation.
    pub fn new(problem: CrackProblem, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
        let cd = problem.material.cd();
        let a = 1.0;
        let b = cd / problem.material.cs();
        let c_r = cd / problem.rayleigh_speed();
        if !(a < b && b < c_r) {
            return Err(Error::NumericalFailure(format!(
                "slowness ordering violated: a = {a}, b = {b}, c_r = {c_r}"
            )));
        }
        let eta_max = 2.5f64.max(1.5 * b);
        let mut oracle = Self {
            problem,
            tol,
            a,
            b,
            c_r,
            eta_max,
            lower: Vec::new(),
            upper: Vec::new(),
        };
        let mut lower = Vec::with_capacity(TABLE_NODES);
        let mut upper = Vec::with_capacity(TABLE_NODES);
        for k in 0..TABLE_NODES {
            let s = (k as f64 + 0.5) / TABLE_NODES as f64;
            lower.push(oracle.inner(oracle.lower_eta(s), INNER_TABLE_TOL)?);
            upper.push(oracle.inner(oracle.upper_eta(s), INNER_TABLE_TOL)?);
        }
        oracle.lower = lower;
        oracle.upper = upper;
        Ok(oracle)
    }

    pub fn problem(&self) -> &CrackProblem {
        &self.problem
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Node map for `[a, b]`: `η = a + (b-a)(1 - cos πs)/2`.
    fn lower_eta(&self, s: f64) -> f64 {
        self.a + 0.5 * (self.b - self.a) * (1.0 - (PI * s).cos())
    }

    /// Node map for `[b, η_max]`: `η = b + (η_max - b) s²`.
    fn upper_eta(&self, s: f64) -> f64 {
        self.b + (self.eta_max - self.b) * s * s
    }

    /// `g(ξ) = atan(4ξ² √((ξ²-a²)(b²-ξ²)) / (b²-2ξ²)²)` on the real line.
    fn g_real(&self, xi: f64) -> f64 {
        let (a, b) = (self.a, self.b);
        let root = ((xi * xi - a * a) * (b * b - xi * xi)).max(0.0).sqrt();
        let den = (b * b - 2.0 * xi * xi).powi(2);
        (4.0 * xi * xi * root).atan2(den)
    }

    /// Analytic continuation of `g` off the real axis. Large arguments use
    /// `atan w = π/2 - atan(1/w)` to stay clear of the zero of the
    /// denominator at `ξ = b/√2`.
    fn g_complex(&self, xi: Complex64) -> Complex64 {
        let (a, b) = (self.a, self.b);
        let x2 = xi * xi;
        let num = x2 * 4.0 * ((x2 - a * a) * (b * b - x2)).sqrt();
        let den = (-x2 * 2.0 + b * b).powi(2);
        if num.norm() <= den.norm() {
            (num / den).atan()
        } else {
            Complex64::new(PI / 2.0, 0.0) - (den / num).atan()
        }
    }

    /// `(1/π) ∫_a^b g(ξ) 2η/(ξ²-η²) dξ` along a contour passing above the pole
    /// at `ξ = η`, in the variable `ξ = m - h cos θ`.
    pub fn inner(&self, eta: f64, tol: f64) -> Result<Complex64> {
        let (a, b) = (self.a, self.b);
        let m = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let real = |theta: f64| -> f64 {
            let xi = m - h * theta.cos();
            let d = xi * xi - eta * eta;
            if d == 0.0 {
                return 0.0;
            }
            self.g_real(xi) * 2.0 * eta / d * h * theta.sin()
        };
        let inside = eta > a * (1.0 + 1e-12) && eta < b * (1.0 - 1e-12);
        if !inside {
            let q = adaptive_trapezoid(real, 0.0, PI, tol)?;
            return Ok(Complex64::new(q.value / PI, 0.0));
        }
        let theta0 = ((m - eta) / h).clamp(-1.0, 1.0).acos();
        let reach = theta0.min(PI - theta0);
        let radius = (PI / 256.0).min(0.5 * reach);
        // Symmetric pairs cancel the simple pole; the remainder is smooth.
        let paired = adaptive_trapezoid(|x| real(theta0 + x) + real(theta0 - x), radius, reach, tol)?;
        let tail = if theta0 < PI - theta0 {
            adaptive_trapezoid(real, 2.0 * theta0, PI, tol)?
        } else {
            adaptive_trapezoid(real, 0.0, 2.0 * theta0 - PI, tol)?
        };
        let arc = self.semicircle(eta, theta0, radius, m, h);
        Ok((Complex64::new(paired.value + tail.value, 0.0) + arc) / PI)
    }

    /// Contour piece `θ = θ₀ + ρ e^{iφ}`, `φ` from `π` to `0`, by Simpson's rule.
    fn semicircle(&self, eta: f64, theta0: f64, radius: f64, m: f64, h: f64) -> Complex64 {
        let integrand = |phi: f64| -> Complex64 {
            let e = Complex64::from_polar(radius, phi);
            let theta = e + theta0;
            let xi = -theta.cos() * h + m;
            let dxi = theta.sin() * h;
            let f = self.g_complex(xi) * 2.0 * eta / (xi * xi - eta * eta) * dxi;
            // dθ/dφ = iρe^{iφ}
            f * Complex64::i() * e
        };
        let n = SEMICIRCLE_PANELS;
        let step = PI / n as f64;
        let mut sum = integrand(0.0) + integrand(PI);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            sum += integrand(k as f64 * step) * w;
        }
        // Orientation π → 0 flips the sign of ∫₀^π.
        -sum * (step / 3.0)
    }

    /// Inner integral from the tables, by cubic Lagrange interpolation in the
    /// node variable.
    fn inner_table(&self, eta: f64) -> Result<Complex64> {
        if eta > self.eta_max {
            return self.inner(eta, self.tol * 1e-3);
        }
        let (table, s) = if eta <= self.b {
            let c = (1.0 - 2.0 * (eta - self.a) / (self.b - self.a)).clamp(-1.0, 1.0);
            (&self.lower, c.acos() / PI)
        } else {
            (&self.upper, ((eta - self.b) / (self.eta_max - self.b)).sqrt())
        };
        let n = table.len();
        let pos = s * n as f64 - 0.5;
        let base = (pos.floor() as i64 - 1).clamp(0, n as i64 - 4) as usize;
        let mut out = Complex64::new(0.0, 0.0);
        for j in 0..4 {
            let xj = (base + j) as f64;
            let mut w = 1.0;
            for k in 0..4 {
                if k != j {
                    let xk = (base + k) as f64;
                    w *= (pos - xk) / (xj - xk);
                }
            }
            out += table[base + j] * w;
        }
        Ok(out)
    }

    fn inner_at(&self, eta: f64) -> Result<Complex64> {
        if (eta - self.c_r).abs() <= EXACT_WINDOW {
            self.inner(eta, self.tol * 1e-2)
        } else {
            self.inner_table(eta)
        }
    }

    /// `√(T-η) √((a-η)/(a+η)) e^{I(η)} / η`, with the branch `√(-x) = +i√x`.
    fn core(&self, eta: f64, big_t: f64) -> Result<Complex64> {
        let a = self.a;
        let ratio = Complex64::new((a - eta) / (a + eta), 0.0).sqrt();
        let inner = self.inner_at(eta)?;
        Ok(ratio * inner.exp() * ((big_t - eta).max(0.0).sqrt() / eta))
    }

    fn outer_piece(&self, lo: f64, hi: f64, big_t: f64) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        let c_r = self.c_r;
        let err = std::cell::Cell::new(None);
        let q = adaptive_trapezoid(
            |eta| match self.core(eta, big_t) {
                Ok(c) => c.im * (c_r + eta) / (c_r - eta),
                Err(e) => {
                    err.set(Some(e.to_string()));
                    0.0
                }
            },
            lo,
            hi,
            self.tol,
        )?;
        if let Some(msg) = err.take() {
            return Err(Error::NumericalFailure(msg));
        }
        Ok(q.value)
    }

    /// `∫ Im(core) (c_r+η)/(c_r-η) dη` over `[a, T]` as a principal value at
    /// `η = c_r`. The pole is excluded symmetrically and the excluded window
    /// is filled by shells `δ/2 < |η - c_r| < δ` until a shell contributes
    /// less than the tolerance.
    pub fn outer_integral(&self, big_t: f64) -> Result<f64> {
        let (a, b, c_r) = (self.a, self.b, self.c_r);
        if big_t <= a {
            return Ok(0.0);
        }
        let mut total = self.outer_piece(a, big_t.min(b), big_t)?;
        if big_t <= b {
            return Ok(total);
        }
        if big_t <= c_r {
            return Ok(total + self.outer_piece(b, big_t, big_t)?);
        }
        let mut delta = EXACT_WINDOW.min(0.5 * (c_r - b)).min(0.5 * (big_t - c_r));
        total += self.outer_piece(b, c_r - delta, big_t)?;
        total += self.outer_piece(c_r + delta, big_t, big_t)?;
        let pair = |x: f64| -> Result<f64> {
            let lo = self.core(c_r - x, big_t)?.im * (2.0 * c_r - x);
            let hi = self.core(c_r + x, big_t)?.im * (2.0 * c_r + x);
            Ok((lo - hi) / x)
        };
        for level in 0..MAX_LEVELS {
            let err = std::cell::Cell::new(None);
            let q = adaptive_trapezoid(
                |x| match pair(x) {
                    Ok(v) => v,
                    Err(e) => {
                        err.set(Some(e.to_string()));
                        0.0
                    }
                },
                0.5 * delta,
                delta,
                self.tol,
            )?;
            if let Some(msg) = err.take() {
                return Err(Error::NumericalFailure(msg));
            }
            total += q.value;
            if q.value.abs() < self.tol && level >= 2 {
                return Ok(total);
            }
            delta *= 0.5;
        }
        Err(Error::NumericalFailure(format!(
            "principal value at c_r = {c_r} not converged after {MAX_LEVELS} exclusion halvings (T = {big_t})"
        )))
    }

    /// `K¹(t)`; requires `t ≥ l_c/c_d`.
    pub fn k1(&self, t: f64) -> Result<f64> {
        let big_t = t / self.problem.transit_time();
        if big_t < self.a * (1.0 - 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "K¹ needs t ≥ l_c/c_d = {}, got {t}",
                self.problem.transit_time()
            )));
        }
        let p = &self.problem;
        let prefactor = 2.0 * p.t_star * F_PLUS_0 / PI * (2.0 * p.l_c / PI).sqrt();
        Ok(sif_k0(t, p) + prefactor * self.outer_integral(big_t)?)
    }

    /// `K⁰` up to `t = l_c/c_d`, `K¹` afterwards.
    pub fn analytical(&self, t: f64) -> Result<f64> {
        if t <= self.problem.transit_time() {
            Ok(sif_k0(t, &self.problem))
        } else {
            self.k1(t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn crack() -> CrackProblem {
        let mat = MaterialParams::from_speed_ratio(3.6, 1.3, 36.0 / 13.0).unwrap();
        CrackProblem::new(1.0, 1.0, mat).unwrap()
    }

    #[test]
    fn k0_values() {
        let p = crack();
        assert_eq!(sif_k0(0.0, &p), 0.0);
        let ratio = sif_k0(1.0, &p) / p.k_static();
        let nu: f64 = 5.0 / 23.0;
        let expected = 2.0 * ((1.0 - 2.0 * nu).sqrt() / (1.0 - nu)) * (1.0 / PI).sqrt()
            / (PI / 2.0).sqrt();
        assert!((ratio - expected).abs() < 1e-14);
        assert!((ratio - 0.865).abs() < 5e-4);
        assert!((sif_k0(0.8, &p) - 2.0 * sif_k0(0.2, &p)).abs() < 1e-14);
    }

    #[test]
    fn slowness_ordering() {
        let p = crack();
        assert!(p.a() < p.b() && p.b() < p.c_r());
    }

    #[test]
    fn extraction_inverts_singular_field() {
        assert_eq!(extract_sif(0.0, 0.1).unwrap(), 0.0);
        for r in [1e-3, 0.02, 0.5] {
            let k = 1.7;
            let s = k / (2.0 * PI * r).sqrt();
            assert!((extract_sif(s, r).unwrap() - k).abs() < 1e-14);
        }
        assert!(extract_sif(1.0, 0.0).is_err());
    }

    #[test]
    fn semicircle_matches_residue() {
        let o = K1Oracle::new(crack(), DEFAULT_TOL).unwrap();
        for eta in [1.05, 1.3, 1.6] {
            let v = o.inner(eta, 1e-10).unwrap();
            assert!((v.im + o.g_real(eta)).abs() < 1e-9, "{eta}: {v}");
        }
        assert_eq!(o.inner(1.9, 1e-10).unwrap().im, 0.0);
    }

    #[test]
    fn table_agrees_with_direct_evaluation() {
        let o = K1Oracle::new(crack(), DEFAULT_TOL).unwrap();
        for eta in [1.000001, 1.0001, 1.2, 1.5, 1.66, 1.7, 2.0, 2.4] {
            let d = o.inner(eta, 1e-10).unwrap();
            let t = o.inner_table(eta).unwrap();
            assert!((d - t).norm() < 1e-6, "{eta}: {d} vs {t}");
        }
    }

    #[test]
    fn k1_rejects_early_times() {
        let o = K1Oracle::new(crack(), DEFAULT_TOL).unwrap();
        assert!(o.k1(0.5).is_err());
        assert!((o.analytical(0.5).unwrap() - sif_k0(0.5, &crack())).abs() < 1e-15);
    }
}
