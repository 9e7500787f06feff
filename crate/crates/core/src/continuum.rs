//! Conversions between the solver's moments and engineering quantities.
//!
//! The second moment `P` is a "Poisson stress": `P = -σ + (λ-μ)(div u) I`,
//! which coincides with `-σ` when `λ = μ`. The displacement divergence is
//! taken from the density via the first-order relation `div u ≈ (ρ₀-ρ)/ρ₀`.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::fields::MacroState;
use crate::material::MaterialParams;

/// Symmetric 2×2 Cauchy stress.
pub type CauchyStress = Matrix2<f64>;

const SYMMETRY_TOL: f64 = 1e-12;

/// First-order displacement divergence from the current density.
pub fn div_u_from_density(rho: f64, rho0: f64) -> Result<f64> {
    if !(rho0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "reference density must be positive, got {rho0}"
        )));
    }
    Ok((rho0 - rho) / rho0)
}

#[inline]
pub(crate) fn div_u(rho: f64, rho0: f64) -> f64 {
    (rho0 - rho) / rho0
}

/// `σ = -P + (λ-μ) div u I`.
pub fn cauchy_from_poisson(p: &Matrix2<f64>, divu: f64, material: &MaterialParams) -> CauchyStress {
    let shift = (material.lambda - material.mu) * divu;
    -p + Matrix2::identity() * shift
}

/// `P = -σ + (λ-μ) div u I`. Rejects an asymmetric `sigma`.
pub fn poisson_from_cauchy(
    sigma: &CauchyStress,
    divu: f64,
    material: &MaterialParams,
) -> Result<Matrix2<f64>> {
    let skew = (sigma[(0, 1)] - sigma[(1, 0)]).abs();
    let scale = sigma.abs().max().max(1.0);
    if skew > SYMMETRY_TOL * scale {
        return Err(Error::InvalidArgument(format!(
            "Cauchy stress must be symmetric, off-diagonal mismatch {skew:e}"
        )));
    }
    let shift = (material.lambda - material.mu) * divu;
    Ok(-sigma + Matrix2::identity() * shift)
}

/// Cauchy stress of one site from its cached moments.
pub fn site_stress(state: &MacroState, site: usize, material: &MaterialParams) -> CauchyStress {
    let divu = div_u(state.rho[site], material.rho0);
    cauchy_from_poisson(&state.poisson_stress(site), divu, material)
}

/// Cumulative trapezoidal integral of `j/ρ`. Entry `n` is `u(t_n)`, with
/// `u(t_0) = 0`.
pub fn integrate_displacement(
    j: &[Vector2<f64>],
    rho: &[f64],
    dt: f64,
) -> Result<Vec<Vector2<f64>>> {
    if j.len() != rho.len() {
        return Err(Error::InvalidArgument(format!(
            "momentum history has {} samples but density history has {}",
            j.len(),
            rho.len()
        )));
    }
    let mut out = Vec::with_capacity(j.len());
    let mut u = Vector2::zeros();
    let mut prev: Option<Vector2<f64>> = None;
    for (jn, rn) in j.iter().zip(rho) {
        let v = jn / *rn;
        if let Some(p) = prev {
            u += (p + v) * (0.5 * dt);
        }
        out.push(u);
        prev = Some(v);
    }
    Ok(out)
}

/// Per-site displacement accumulated by trapezoidal integration of `j/ρ`.
#[derive(Debug, Clone)]
pub struct DisplacementField {
    pub u: Vec<[f64; 2]>,
    velocity: Vec<[f64; 2]>,
}

impl DisplacementField {
    /// Zero displacement, with the velocity history seeded from `state`.
    pub fn new(state: &MacroState, material_mask: &[bool]) -> Self {
        let velocity = velocities(state, material_mask);
        Self {
            u: vec![[0.0; 2]; velocity.len()],
            velocity,
        }
    }

    /// Advance by one time step using the moments at the new time level.
    pub fn advance(&mut self, state: &MacroState, material_mask: &[bool], dt: f64) {
        for (site, (u, v_old)) in self.u.iter_mut().zip(self.velocity.iter_mut()).enumerate() {
            if !material_mask[site] {
                continue;
            }
            let r = state.rho[site];
            let v = [state.j[site][0] / r, state.j[site][1] / r];
            u[0] += 0.5 * dt * (v_old[0] + v[0]);
            u[1] += 0.5 * dt * (v_old[1] + v[1]);
            *v_old = v;
        }
    }
}

fn velocities(state: &MacroState, mask: &[bool]) -> Vec<[f64; 2]> {
    state
        .rho
        .iter()
        .zip(&state.j)
        .zip(mask)
        .map(|((r, j), &m)| if m { [j[0] / r, j[1] / r] } else { [0.0; 2] })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn glass() -> MaterialParams {
        MaterialParams::from_speed_ratio(1.0, 1.0, 2.8).unwrap()
    }

    #[test]
    fn divergence_from_density() {
        assert_eq!(div_u_from_density(2.0, 2.0).unwrap(), 0.0);
        assert!((div_u_from_density(0.99, 1.0).unwrap() - 0.01).abs() < 1e-15);
        assert!(div_u_from_density(1.0, 0.0).is_err());
    }

    #[test]
    fn uniform_dilation_matches_to_second_order() {
        // u = ε x: reference divergence 2ε, J = (1+ε)², ρ = ρ₀/J.
        for eps in [1e-2, 1e-3] {
            let jac: f64 = (1.0 + eps) * (1.0 + eps);
            let rho = 1.0 / jac;
            let d = div_u_from_density(rho, 1.0).unwrap();
            let err = (d - 2.0 * eps).abs();
            assert!(err < 4.0 * eps * eps, "eps {eps}: err {err}");
            assert!(err > 2.0 * eps * eps);
        }
    }

    #[test]
    fn poisson_solid_stress_is_negated_p() {
        let m = MaterialParams::from_speed_ratio(1.0, 1.0, 3.0).unwrap();
        let p = Matrix2::new(0.3, -0.1, -0.1, 0.7);
        assert_eq!(cauchy_from_poisson(&p, 0.2, &m), -p);
    }

    #[test]
    fn zero_poisson_stress_gives_pressure_shift() {
        let m = glass();
        let s = cauchy_from_poisson(&Matrix2::zeros(), 0.5, &m);
        let expect = (m.lambda - m.mu) * 0.5;
        assert!((s[(0, 0)] - expect).abs() < 1e-15);
        assert!((s[(1, 1)] - expect).abs() < 1e-15);
        assert_eq!(s[(0, 1)], 0.0);
    }

    #[test]
    fn poisson_from_cauchy_cases() {
        let m = MaterialParams::from_speed_ratio(1.0, 1.0, 3.0).unwrap();
        assert_eq!(
            poisson_from_cauchy(&Matrix2::zeros(), 0.0, &m).unwrap(),
            Matrix2::zeros()
        );
        let t = 0.7;
        let sigma = Matrix2::new(0.0, 0.0, 0.0, t);
        let p = poisson_from_cauchy(&sigma, 0.0, &m).unwrap();
        assert_eq!(p, Matrix2::new(0.0, 0.0, 0.0, -t));

        let asym = Matrix2::new(1.0, 0.5, 0.2, 1.0);
        assert!(matches!(
            poisson_from_cauchy(&asym, 0.0, &m),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn poisson_from_cauchy_generic_material() {
        // P_ab = -σ_ab + (λ-μ) d δ_ab, written out component-wise.
        let m = glass();
        let (s11, s12, s22, d) = (0.4, -0.25, 1.1, 0.03);
        let sigma = Matrix2::new(s11, s12, s12, s22);
        let p = poisson_from_cauchy(&sigma, d, &m).unwrap();
        let k = (m.lambda - m.mu) * d;
        assert!((p[(0, 0)] - (-s11 + k)).abs() < 1e-15);
        assert!((p[(1, 1)] - (-s22 + k)).abs() < 1e-15);
        assert!((p[(0, 1)] + s12).abs() < 1e-15);
        let back = cauchy_from_poisson(&p, d, &m);
        assert!((back - sigma).abs().max() < 1e-15);
    }

    #[test]
    fn displacement_integration() {
        let dt = 0.1;
        let zero = integrate_displacement(&[Vector2::zeros(); 5], &[1.0; 5], dt).unwrap();
        assert!(zero.iter().all(|u| *u == Vector2::zeros()));

        let v = 0.25;
        let rho0 = 2.0;
        let n = 8;
        let j = vec![Vector2::new(rho0 * v, 0.0); n + 1];
        let u = integrate_displacement(&j, &vec![rho0; n + 1], dt).unwrap();
        assert!((u[n][0] - v * n as f64 * dt).abs() < 1e-15);

        // j/ρ = a t: u = a t²/2, exact for the trapezoid.
        let a = 3.0;
        let j: Vec<_> = (0..=n).map(|k| Vector2::new(0.0, a * k as f64 * dt)).collect();
        let u = integrate_displacement(&j, &vec![1.0; n + 1], dt).unwrap();
        let t = n as f64 * dt;
        assert!((u[n][1] - 0.5 * a * t * t).abs() < 1e-14);

        assert!(integrate_displacement(&j, &[1.0; 3], dt).is_err());
    }
}
