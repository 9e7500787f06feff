use crate::error::{Error, Result};

/// Isotropic linear-elastic material.
///
/// The shear wave speed `c_s = √(μ/ρ₀)` is the lattice sound speed of the
/// solver, so one material fixes the time step for a given spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    pub rho0: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl MaterialParams {
    pub fn new(rho0: f64, lambda: f64, mu: f64) -> Result<Self> {
        let m = Self { rho0, lambda, mu };
        m.validate()?;
        Ok(m)
    }

    /// Builds the material from `ρ₀`, `μ` and the squared speed ratio
    /// `c_d²/c_s² = (λ+2μ)/μ`.
    pub fn from_speed_ratio(rho0: f64, mu: f64, cd2_over_cs2: f64) -> Result<Self> {
        Self::new(rho0, mu * (cd2_over_cs2 - 2.0), mu)
    }

    fn validate(&self) -> Result<()> {
        if !(self.rho0 > 0.0 && self.rho0.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "reference density must be positive, got {}",
                self.rho0
            )));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "shear modulus must be positive, got {}",
                self.mu
            )));
        }
        let nu = self.poisson_ratio();
        if !(nu > -1.0 && nu < 0.5) || !self.lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "Poisson ratio {nu} outside (-1, 0.5)"
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn cs(&self) -> f64 {
        (self.mu / self.rho0).sqrt()
    }

    #[inline]
    pub fn cd(&self) -> f64 {
        ((self.lambda + 2.0 * self.mu) / self.rho0).sqrt()
    }

    /// `c_d²/c_s²`.
    pub fn speed_ratio_sq(&self) -> f64 {
        (self.lambda + 2.0 * self.mu) / self.mu
    }

    /// Plane-strain Poisson ratio `λ / (2(λ+μ))`.
    pub fn poisson_ratio(&self) -> f64 {
        self.lambda / (2.0 * (self.lambda + self.mu))
    }
}
