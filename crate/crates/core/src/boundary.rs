//! Local bounce-back boundary rules.
//!
//! Every boundary link `(x, i)` is a lattice link from a material site `x`
//! that leaves the material at distance `s = q·l` along `c_i`. After
//! streaming, the population `f_ī(x)` travelling back along the reversed link
//! is missing and is set by one of two rules:
//!
//! * Dirichlet (bounce-back), imposing a momentum density `j*` derived from a
//!   prescribed displacement history;
//! * Neumann (anti-bounce-back), imposing a Poisson stress `P*` built from a
//!   prescribed traction.
//!
//! Both rules interpolate linearly along the link for arbitrary `q ∈ (0, 1]`
//! and reduce to the half-way rules at `q = 1/2`.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::continuum::div_u;
use crate::error::Result;
use crate::geometry::{normal_frame, BoundaryLink};
use crate::lattice::{LatticeSpec, Q};
use crate::material::MaterialParams;

/// Time profile multiplying a boundary value amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Constant,
    /// Linear rise from 0 at `t = 0` to 1 at `t = duration`, then held.
    Ramp { duration: f64 },
    /// 0 before `time`, 1 from `time` on.
    Step { time: f64 },
}

impl Profile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Profile::Constant => 1.0,
            Profile::Ramp { duration } => {
                if duration <= 0.0 {
                    1.0
                } else {
                    (t / duration).clamp(0.0, 1.0)
                }
            }
            Profile::Step { time } => {
                if t >= time {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Traction amplitude: along the outward normal (positive pulls) or a fixed
/// vector in global coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Traction {
    Normal(f64),
    Vector([f64; 2]),
}

/// Boundary condition together with its value schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// Prescribed displacement `u*(t) = displacement · profile(t)`.
    Dirichlet {
        displacement: [f64; 2],
        profile: Profile,
    },
    /// Prescribed traction `t*(t) = traction · profile(t)`.
    Neumann { traction: Traction, profile: Profile },
}

impl BoundaryCondition {
    /// Homogeneous Neumann (traction-free).
    pub fn free() -> Self {
        BoundaryCondition::Neumann {
            traction: Traction::Normal(0.0),
            profile: Profile::Constant,
        }
    }

    /// Homogeneous Dirichlet (clamped).
    pub fn fixed() -> Self {
        BoundaryCondition::Dirichlet {
            displacement: [0.0, 0.0],
            profile: Profile::Constant,
        }
    }

    pub fn is_neumann(&self) -> bool {
        matches!(self, BoundaryCondition::Neumann { .. })
    }

    pub fn displacement(&self, t: f64) -> Option<Vector2<f64>> {
        match self {
            BoundaryCondition::Dirichlet {
                displacement,
                profile,
            } => Some(Vector2::from(*displacement) * profile.value(t)),
            _ => None,
        }
    }

    /// Traction vector at time `t` on a boundary point with outward normal `n`.
    pub fn traction(&self, t: f64, n: Vector2<f64>) -> Option<Vector2<f64>> {
        match self {
            BoundaryCondition::Neumann { traction, profile } => {
                let a = profile.value(t);
                Some(match traction {
                    Traction::Normal(p) => n * (p * a),
                    Traction::Vector(v) => Vector2::from(*v) * a,
                })
            }
            _ => None,
        }
    }
}

/// Boundary momentum density `j* = ρ ∂_t u*`.
///
/// The time derivative is the exact average of `∂_t u*` over `[t, t+dt]`,
/// which is the analytic derivative on every linear piece of the built-in
/// profiles.
pub fn dirichlet_momentum(bc: &BoundaryCondition, rho_bd: f64, t: f64, dt: f64) -> Vector2<f64> {
    match (bc.displacement(t), bc.displacement(t + dt)) {
        (Some(u0), Some(u1)) => (u1 - u0) * (rho_bd / dt),
        _ => Vector2::zeros(),
    }
}

/// Density at the wall, linearly extrapolated along the link:
/// `ρ_bd = (1+q) ρ(x) - q ρ(x - c_i dt)`.
#[inline]
pub fn boundary_density(rho_at_x: f64, rho_upstream: f64, q_frac: f64) -> f64 {
    (1.0 + q_frac) * rho_at_x - q_frac * rho_upstream
}

/// Boundary targets of a Neumann link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonStressTarget {
    pub p: Matrix2<f64>,
    pub rho_bd: f64,
}

/// Poisson stress imposed by a traction `t_star` on a wall with outward normal
/// `n`.
///
/// In the wall frame the traction fixes the normal and shear components of
/// the Cauchy stress; the tangential normal component is taken from
/// `interior_sigma`, the stress at the owning site.
pub fn neumann_poisson_target(
    t_star: Vector2<f64>,
    n: Vector2<f64>,
    interior_sigma: &Matrix2<f64>,
    rho_bd: f64,
    material: &MaterialParams,
) -> Result<PoissonStressTarget> {
    let frame = normal_frame(n)?;
    let tn = frame * t_star;
    let interior_n = frame * interior_sigma * frame.transpose();
    let sigma_n = Matrix2::new(tn[0], tn[1], tn[1], interior_n[(1, 1)]);
    let sigma = frame.transpose() * sigma_n * frame;
    let divu = div_u(rho_bd, material.rho0);
    let p = -sigma + Matrix2::identity() * ((material.lambda - material.mu) * divu);
    Ok(PoissonStressTarget {
        p: sym(p),
        rho_bd,
    })
}

#[inline]
fn sym(m: Matrix2<f64>) -> Matrix2<f64> {
    let off = 0.5 * (m[(0, 1)] + m[(1, 0)]);
    Matrix2::new(m[(0, 0)], off, off, m[(1, 1)])
}

/// Interpolation coefficient `(l-2s)/(l+2s)` and value weight `2l/(l+2s)` for
/// a cut fraction `q = s/l`.
#[inline]
pub fn link_coefficients(q_frac: f64) -> (f64, f64) {
    let denom = 1.0 + 2.0 * q_frac;
    ((1.0 - 2.0 * q_frac) / denom, 2.0 / denom)
}

/// Upstream value used by the interpolating rules. When `x - c_i dt` is not a
/// material site the interpolation term is dropped.
#[derive(Debug, Clone, Copy)]
pub enum Upstream {
    Site(f64),
    Missing,
}

/// Population `f_ī(x, t+dt)` for a Dirichlet link.
///
/// `fcol_x` is the post-collision vector at `x`, `upstream` the post-collision
/// `f_i` at `x - c_i dt`.
pub fn apply_dirichlet_link(
    fcol_x: &[f64; Q],
    upstream: Upstream,
    link: &BoundaryLink,
    j_star: Vector2<f64>,
    lattice: &LatticeSpec,
) -> f64 {
    let i = link.dir;
    let ib = lattice.opposite(i);
    let (kappa, gain) = link_coefficients(link.q_frac);
    let c = lattice.velocities[i];
    let forcing = 2.0 / lattice.cs2() * lattice.weight(i) * (c[0] * j_star[0] + c[1] * j_star[1]);
    let interp = match upstream {
        Upstream::Site(f) => kappa * (f - fcol_x[ib]),
        Upstream::Missing => 0.0,
    };
    fcol_x[i] + interp - gain * forcing
}

/// Population `f_ī(x, t+dt)` for a Neumann link.
pub fn apply_neumann_link(
    fcol_x: &[f64; Q],
    upstream: Upstream,
    link: &BoundaryLink,
    target: &PoissonStressTarget,
    lattice: &LatticeSpec,
) -> f64 {
    let i = link.dir;
    let ib = lattice.opposite(i);
    let (kappa, gain) = link_coefficients(link.q_frac);
    let interp = match upstream {
        Upstream::Site(f) => kappa * (f + fcol_x[ib]),
        Upstream::Missing => 0.0,
    };
    -fcol_x[i] - interp + gain * 2.0 * stress_weight(i, target.rho_bd, &target.p, lattice)
}

/// Half-way bounce-back: `f_ī(x, t+dt) = f_i^col(x) - (2/c_s²) w_i c_i·j*`.
pub fn bounce_back(fcol_i: f64, dir: usize, j_star: Vector2<f64>, lattice: &LatticeSpec) -> f64 {
    let c = lattice.velocities[dir];
    fcol_i - 2.0 / lattice.cs2() * lattice.weight(dir) * (c[0] * j_star[0] + c[1] * j_star[1])
}

/// Half-way anti-bounce-back with boundary density and Poisson stress.
pub fn anti_bounce_back(
    fcol_i: f64,
    dir: usize,
    target: &PoissonStressTarget,
    lattice: &LatticeSpec,
) -> f64 {
    -fcol_i + 2.0 * stress_weight(dir, target.rho_bd, &target.p, lattice)
}

/// `w_i (ρ + (P - ρ c_s² I):(c_i c_i - c_s² I) / (2 c_s⁴))`.
#[inline]
pub(crate) fn stress_weight(i: usize, rho: f64, p: &Matrix2<f64>, lattice: &LatticeSpec) -> f64 {
    let cs2 = lattice.cs2();
    let c = lattice.velocities[i];
    let a = p[(0, 0)] - rho * cs2;
    let d = p[(1, 1)] - rho * cs2;
    let b = p[(0, 1)];
    let q11 = c[0] * c[0] - cs2;
    let q22 = c[1] * c[1] - cs2;
    let q12 = c[0] * c[1];
    lattice.weight(i) * (rho + (a * q11 + 2.0 * b * q12 + d * q22) / (2.0 * cs2 * cs2))
}
