//! Equilibrium, source term, BGK collision, streaming and the full time step.

use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;

use crate::boundary::{
    apply_dirichlet_link, apply_neumann_link, boundary_density, dirichlet_momentum,
    neumann_poisson_target, BoundaryCondition, Upstream,
};
use crate::continuum::{site_stress, DisplacementField};
use crate::error::{Error, Result};
use crate::fields::{raw_moments, DistributionField, MacroState};
use crate::geometry::{classify_links, BoundaryLink, ClassifiedDomain, DomainSpec};
use crate::lattice::{LatticeSpec, OPPOSITE, Q};
use crate::material::MaterialParams;

const NO_SITE: u32 = u32::MAX;

/// `f_i^eq` for a single direction.
#[inline]
pub fn equilibrium_component(
    i: usize,
    rho: f64,
    j: [f64; 2],
    p: [f64; 3],
    lattice: &LatticeSpec,
) -> f64 {
    let cs2 = lattice.cs2();
    let c = lattice.velocities[i];
    let cj = c[0] * j[0] + c[1] * j[1];
    let a = p[0] - rho * cs2;
    let d = p[2] - rho * cs2;
    let q11 = c[0] * c[0] - cs2;
    let q22 = c[1] * c[1] - cs2;
    let q12 = c[0] * c[1];
    lattice.weight(i)
        * (rho + cj / cs2 + (a * q11 + 2.0 * p[1] * q12 + d * q22) / (2.0 * cs2 * cs2))
}

/// Equilibrium distribution reproducing density `rho`, momentum `j` and Poisson
/// stress `p` as its first three moments.
pub fn equilibrium(rho: f64, j: Vector2<f64>, p: Matrix2<f64>, lattice: &LatticeSpec) -> [f64; Q] {
    let js = [j[0], j[1]];
    let ps = [p[(0, 0)], 0.5 * (p[(0, 1)] + p[(1, 0)]), p[(1, 1)]];
    std::array::from_fn(|i| equilibrium_component(i, rho, js, ps, lattice))
}

/// `ψ_i = w_i c_i·S / c_s²`.
#[inline]
pub fn source_component(i: usize, s: [f64; 2], lattice: &LatticeSpec) -> f64 {
    let c = lattice.velocities[i];
    lattice.weight(i) * (c[0] * s[0] + c[1] * s[1]) / lattice.cs2()
}

/// BGK relaxation time, constrained to `tau_bar > dt/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationSetting {
    pub tau_bar: f64,
}

impl RelaxationSetting {
    pub fn new(tau_bar: f64, dt: f64) -> Result<Self> {
        if !(tau_bar > 0.5 * dt) || !tau_bar.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "relaxation time {tau_bar} must exceed dt/2 = {}",
                0.5 * dt
            )));
        }
        Ok(Self { tau_bar })
    }

    /// `tau_bar = ratio * dt`.
    pub fn from_ratio(ratio: f64, dt: f64) -> Result<Self> {
        Self::new(ratio * dt, dt)
    }

    pub fn ratio(&self, dt: f64) -> f64 {
        self.tau_bar / dt
    }
}

/// `f - (dt/τ)(f - f_eq) + dt (1 - dt/2τ) ψ`.
pub fn collide(f: &[f64; Q], feq: &[f64; Q], psi: &[f64; Q], tau_bar: f64, dt: f64) -> [f64; Q] {
    let omega = dt / tau_bar;
    let k = dt * (1.0 - 0.5 * omega);
    std::array::from_fn(|i| f[i] - omega * (f[i] - feq[i]) + k * psi[i])
}

/// Per-site source `S = F + ((μ-λ)/ρ) ∇ρ`.
#[derive(Debug, Clone)]
pub struct SourceField {
    pub s: Vec<[f64; 2]>,
}

impl SourceField {
    pub fn psi(&self, site: usize, lattice: &LatticeSpec) -> [f64; Q] {
        std::array::from_fn(|i| source_component(i, self.s[site], lattice))
    }
}

/// Density gradient at a material site: central differences where both axis
/// neighbours are reachable without crossing a boundary, one-sided where only
/// one is, zero otherwise.
fn density_gradient(site: usize, rho: &[f64], domain: &ClassifiedDomain) -> [f64; 2] {
    let grid = &domain.grid;
    let reach = |dir: usize| -> Option<f64> {
        if domain.is_cut(site, dir) {
            return None;
        }
        grid.neighbor(site, dir)
            .filter(|&t| domain.material[t])
            .map(|t| rho[t])
    };
    let r0 = rho[site];
    let mut g = [0.0; 2];
    for (a, (fwd, bwd)) in [(1usize, 3usize), (2, 4)].into_iter().enumerate() {
        g[a] = match (reach(fwd), reach(bwd)) {
            (Some(p), Some(m)) => (p - m) / (2.0 * grid.dx),
            (Some(p), None) => (p - r0) / grid.dx,
            (None, Some(m)) => (r0 - m) / grid.dx,
            (None, None) => 0.0,
        };
    }
    g
}

/// Source field for body force `force` and density `rho` on the material
/// sites of `domain`.
pub fn source_term(
    force: &[[f64; 2]],
    rho: &[f64],
    domain: &ClassifiedDomain,
    material: &MaterialParams,
) -> Result<SourceField> {
    let coef = material.mu - material.lambda;
    if let Some(site) = (0..rho.len()).find(|&s| domain.material[s] && !(rho[s] > 0.0)) {
        return Err(Error::SolverDiverged {
            step: 0,
            reason: format!("density {} at site {site}", rho[site]),
        });
    }
    let s = (0..rho.len())
        .into_par_iter()
        .map(|site| {
            if !domain.material[site] {
                return [0.0; 2];
            }
            let f = force[site];
            if coef == 0.0 {
                return f;
            }
            let g = density_gradient(site, rho, domain);
            let k = coef / rho[site];
            [f[0] + k * g[0], f[1] + k * g[1]]
        })
        .collect();
    Ok(SourceField { s })
}

/// Pull table: entry `i * n + x` is the site that population `i` at `x` is
/// streamed from, or `u32::MAX` when the link is cut or `x` is solid.
pub fn pull_table(domain: &ClassifiedDomain) -> Vec<u32> {
    let grid = &domain.grid;
    let n = grid.len();
    let mut table = vec![NO_SITE; Q * n];
    for i in 0..Q {
        for x in 0..n {
            if !domain.material[x] {
                continue;
            }
            if i == 0 {
                table[x] = x as u32;
                continue;
            }
            let back = OPPOSITE[i];
            if domain.is_cut(x, back) {
                continue;
            }
            if let Some(src) = grid.neighbor(x, back) {
                if domain.material[src] {
                    table[i * n + x] = src as u32;
                }
            }
        }
    }
    table
}

/// Streams `current` into `next` along every uncut link. Entries behind cut
/// links are left untouched for the boundary rules.
pub fn stream(field: &mut DistributionField, pull: &[u32]) {
    let n = field.sites();
    let (cur, next) = field.split();
    next.par_chunks_mut(n).enumerate().for_each(|(i, out)| {
        let src = &cur[i * n..(i + 1) * n];
        let table = &pull[i * n..(i + 1) * n];
        for (o, &s) in out.iter_mut().zip(table) {
            if s != NO_SITE {
                *o = src[s as usize];
            }
        }
    });
}

/// Interpolated value at a probe point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSample {
    pub rho: f64,
    pub u: [f64; 2],
    /// Cauchy stress `[σ11, σ12, σ22]`.
    pub sigma: [f64; 3],
}

#[derive(Debug, Clone, Copy)]
struct LinkPlan {
    link: BoundaryLink,
    upstream: Option<usize>,
}

/// Time-stepping state of one lattice Boltzmann run.
#[derive(Debug, Clone)]
pub struct Simulation {
    domain: DomainSpec,
    classified: ClassifiedDomain,
    lattice: LatticeSpec,
    material: MaterialParams,
    relaxation: RelaxationSetting,
    f: DistributionField,
    state: MacroState,
    source: SourceField,
    force: Vec<[f64; 2]>,
    pull: Vec<u32>,
    plans: Vec<LinkPlan>,
    displacement: DisplacementField,
    step: u64,
}

impl Simulation {
    /// Classifies the domain and starts from the undeformed rest state.
    pub fn new(
        domain: DomainSpec,
        material: MaterialParams,
        lattice: LatticeSpec,
        relaxation: RelaxationSetting,
    ) -> Result<Self> {
        RelaxationSetting::new(relaxation.tau_bar, lattice.dt)?;
        if (lattice.cs - material.cs()).abs() > 1e-12 * material.cs() {
            return Err(Error::InvalidArgument(format!(
                "lattice shear speed {} differs from the material's {}",
                lattice.cs,
                material.cs()
            )));
        }
        let classified = classify_links(&domain, &lattice)?;
        let n = classified.grid.len();
        let pull = pull_table(&classified);
        // Link i at x interpolates with x - c_i, the site population i is
        // pulled from when the opposite link is uncut.
        let plans = classified
            .links
            .iter()
            .map(|&link| {
                let up = pull[link.dir * n + link.site];
                LinkPlan {
                    link,
                    upstream: (up != NO_SITE).then_some(up as usize),
                }
            })
            .collect();
        let state = MacroState::zeros(n);
        let displacement = DisplacementField::new(&state, &classified.material);
        let mut sim = Self {
            domain,
            classified,
            lattice,
            material,
            relaxation,
            f: DistributionField::zeros(n),
            state,
            source: SourceField { s: vec![[0.0; 2]; n] },
            force: vec![[0.0; 2]; n],
            pull,
            plans,
            displacement,
            step: 0,
        };
        let rest = material.rho0;
        sim.initialize_equilibrium(|_| (rest, Vector2::zeros(), Matrix2::zeros()))?;
        Ok(sim)
    }

    /// Resets the run to equilibrium distributions of the given fields. The
    /// moments after initialization equal the supplied `(ρ, j, P)` exactly,
    /// including the half-step source shift of `j`.
    pub fn initialize_equilibrium(
        &mut self,
        fields: impl Fn([f64; 2]) -> (f64, Vector2<f64>, Matrix2<f64>),
    ) -> Result<()> {
        let n = self.classified.grid.len();
        let mut rho = vec![0.0; n];
        let mut j = vec![Vector2::zeros(); n];
        let mut p = vec![Matrix2::zeros(); n];
        for site in 0..n {
            if self.classified.material[site] {
                let (r, jj, pp) = fields(self.classified.grid.position(site));
                rho[site] = r;
                j[site] = jj;
                p[site] = pp;
            }
        }
        let source = source_term(&self.force, &rho, &self.classified, &self.material)?;
        let half = 0.5 * self.lattice.dt;
        let mut f = DistributionField::zeros(n);
        for site in 0..n {
            if self.classified.material[site] {
                let s = source.s[site];
                let raw = j[site] - Vector2::new(s[0], s[1]) * half;
                f.set_site(site, &equilibrium(rho[site], raw, p[site], &self.lattice));
            }
        }
        self.f = f;
        self.step = 0;
        self.refresh_moments()?;
        self.displacement = DisplacementField::new(&self.state, &self.classified.material);
        Ok(())
    }

    /// Uniform body force density on every material site.
    pub fn set_body_force(&mut self, force: [f64; 2]) -> Result<()> {
        self.force = vec![force; self.classified.grid.len()];
        self.refresh_moments()
    }

    pub fn set_force_field(&mut self, force: Vec<[f64; 2]>) -> Result<()> {
        if force.len() != self.classified.grid.len() {
            return Err(Error::InvalidArgument(format!(
                "force field has {} entries for {} sites",
                force.len(),
                self.classified.grid.len()
            )));
        }
        self.force = force;
        self.refresh_moments()
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn classified(&self) -> &ClassifiedDomain {
        &self.classified
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn material(&self) -> &MaterialParams {
        &self.material
    }

    pub fn relaxation(&self) -> RelaxationSetting {
        self.relaxation
    }

    pub fn state(&self) -> &MacroState {
        &self.state
    }

    pub fn source(&self) -> &SourceField {
        &self.source
    }

    pub fn distributions(&self) -> &DistributionField {
        &self.f
    }

    pub fn displacement(&self) -> &DisplacementField {
        &self.displacement
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.lattice.dt
    }

    /// Advances by one time step.
    pub fn step(&mut self) -> Result<()> {
        self.collide_in_place();
        stream(&mut self.f, &self.pull);
        self.apply_boundaries()?;
        self.f.swap();
        self.step += 1;
        self.refresh_moments()?;
        self.displacement
            .advance(&self.state, &self.classified.material, self.lattice.dt);
        Ok(())
    }

    pub fn run(&mut self, steps: u64) -> Result<()> {
        for _ in 0..steps {
            self.step()?;
        }
        Ok(())
    }

    fn collide_in_place(&mut self) {
        let n = self.classified.grid.len();
        let lattice = &self.lattice;
        let omega = lattice.dt / self.relaxation.tau_bar;
        let k = lattice.dt * (1.0 - 0.5 * omega);
        let state = &self.state;
        let source = &self.source.s;
        let material = &self.classified.material;
        self.f
            .as_mut_slice()
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(i, fi)| {
                for (x, v) in fi.iter_mut().enumerate() {
                    if !material[x] {
                        continue;
                    }
                    let feq =
                        equilibrium_component(i, state.rho[x], state.j[x], state.p[x], lattice);
                    let psi = source_component(i, source[x], lattice);
                    *v = *v - omega * (*v - feq) + k * psi;
                }
            });
    }

    fn apply_boundaries(&mut self) -> Result<()> {
        let t = self.time();
        let dt = self.lattice.dt;
        let n = self.classified.grid.len();
        let (cur, next) = self.f.split();
        for plan in &self.plans {
            let link = &plan.link;
            let x = link.site;
            let i = link.dir;
            let fcol: [f64; Q] = std::array::from_fn(|k| cur[k * n + x]);
            let rho_x = self.state.rho[x];
            let (upstream, rho_bd) = match plan.upstream {
                Some(u) => (
                    Upstream::Site(cur[i * n + u]),
                    boundary_density(rho_x, self.state.rho[u], link.q_frac),
                ),
                None => (Upstream::Missing, rho_x),
            };
            let bc = self.domain.condition(link.source);
            let value = match bc {
                BoundaryCondition::Dirichlet { .. } => {
                    let j_star = dirichlet_momentum(bc, rho_bd, t, dt);
                    apply_dirichlet_link(&fcol, upstream, link, j_star, &self.lattice)
                }
                BoundaryCondition::Neumann { .. } => {
                    let normal = link.normal_vec();
                    let t_star = bc.traction(t, normal).unwrap_or_else(Vector2::zeros);
                    let sigma = site_stress(&self.state, x, &self.material);
                    let target =
                        neumann_poisson_target(t_star, normal, &sigma, rho_bd, &self.material)?;
                    apply_neumann_link(&fcol, upstream, link, &target, &self.lattice)
                }
            };
            next[OPPOSITE[i] * n + x] = value;
        }
        Ok(())
    }

    fn refresh_moments(&mut self) -> Result<()> {
        let n = self.classified.grid.len();
        let c = self.lattice.speed();
        let material = &self.classified.material;
        let f = self.f.as_slice();
        let raw: Vec<(f64, [f64; 2], [f64; 3])> = (0..n)
            .into_par_iter()
            .map(|x| {
                if !material[x] {
                    return (0.0, [0.0; 2], [0.0; 3]);
                }
                let fx: [f64; Q] = std::array::from_fn(|i| f[i * n + x]);
                raw_moments(&fx, c)
            })
            .collect();
        for (x, (r, j, p)) in raw.iter().enumerate() {
            self.state.rho[x] = *r;
            self.state.j[x] = *j;
            self.state.p[x] = *p;
        }
        self.watchdog()?;
        self.source = source_term(&self.force, &self.state.rho, &self.classified, &self.material)
            .map_err(|e| self.at_step(e))?;
        let half = 0.5 * self.lattice.dt;
        for x in 0..n {
            if material[x] {
                let s = self.source.s[x];
                self.state.j[x][0] += half * s[0];
                self.state.j[x][1] += half * s[1];
            }
        }
        Ok(())
    }

    fn at_step(&self, e: Error) -> Error {
        match e {
            Error::SolverDiverged { reason, .. } => Error::SolverDiverged {
                step: self.step.saturating_sub(1),
                reason,
            },
            other => other,
        }
    }

    fn watchdog(&self) -> Result<()> {
        let material = &self.classified.material;
        for x in 0..material.len() {
            if !material[x] {
                continue;
            }
            let r = self.state.rho[x];
            let j = self.state.j[x];
            let p = self.state.p[x];
            let finite = r.is_finite()
                && j.iter().all(|v| v.is_finite())
                && p.iter().all(|v| v.is_finite());
            if !finite || r <= 0.0 {
                return Err(Error::SolverDiverged {
                    step: self.step.saturating_sub(1),
                    reason: format!("site {x}: rho = {r}, j = {j:?}, P = {p:?}"),
                });
            }
        }
        Ok(())
    }

    /// Cauchy stress at a site.
    pub fn stress(&self, site: usize) -> Matrix2<f64> {
        site_stress(&self.state, site, &self.material)
    }

    /// Bilinear interpolation of density, displacement and stress over the
    /// material corners of the lattice cell containing `point`. Points within
    /// `1e-9` spacings of a site use that site alone.
    pub fn sample(&self, point: [f64; 2]) -> Result<ProbeSample> {
        let grid = &self.classified.grid;
        let fr = grid.fractional(point);
        let snap = [fr[0].round(), fr[1].round()];
        let on_site = (fr[0] - snap[0]).abs() < 1e-9 && (fr[1] - snap[1]).abs() < 1e-9;
        let mut corners: Vec<(usize, f64)> = Vec::with_capacity(4);
        if on_site {
            if snap[0] < 0.0 || snap[1] < 0.0 || snap[0] >= grid.nx as f64 || snap[1] >= grid.ny as f64 {
                return Err(Error::InvalidArgument(format!("probe {point:?} outside the lattice")));
            }
            corners.push((grid.index(snap[0] as usize, snap[1] as usize), 1.0));
        } else {
            let x0 = fr[0].floor();
            let y0 = fr[1].floor();
            let (ax, ay) = (fr[0] - x0, fr[1] - y0);
            for (dxi, wx) in [(0.0, 1.0 - ax), (1.0, ax)] {
                for (dyi, wy) in [(0.0, 1.0 - ay), (1.0, ay)] {
                    let (ix, iy) = (x0 + dxi, y0 + dyi);
                    if ix < 0.0 || iy < 0.0 || ix >= grid.nx as f64 || iy >= grid.ny as f64 {
                        continue;
                    }
                    let site = grid.index(ix as usize, iy as usize);
                    if self.classified.material[site] && wx * wy > 0.0 {
                        corners.push((site, wx * wy));
                    }
                }
            }
        }
        let total: f64 = corners
            .iter()
            .filter(|(s, _)| self.classified.material[*s])
            .map(|(_, w)| w)
            .sum();
        if total <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "probe {point:?} has no material sites nearby"
            )));
        }
        let mut out = ProbeSample {
            rho: 0.0,
            u: [0.0; 2],
            sigma: [0.0; 3],
        };
        for (site, w) in corners {
            if !self.classified.material[site] {
                continue;
            }
            let w = w / total;
            let s = self.stress(site);
            let u = self.displacement.u[site];
            out.rho += w * self.state.rho[site];
            out.u[0] += w * u[0];
            out.u[1] += w * u[1];
            out.sigma[0] += w * s[(0, 0)];
            out.sigma[1] += w * s[(0, 1)];
            out.sigma[2] += w * s[(1, 1)];
        }
        Ok(out)
    }

    /// `Σρ` over material sites.
    pub fn total_mass(&self) -> f64 {
        self.material_sum(|x| self.state.rho[x])
    }

    /// `Σj` over material sites.
    pub fn total_momentum(&self) -> [f64; 2] {
        [
            self.material_sum(|x| self.state.j[x][0]),
            self.material_sum(|x| self.state.j[x][1]),
        ]
    }

    /// `ΣS` over material sites.
    pub fn total_source(&self) -> [f64; 2] {
        [
            self.material_sum(|x| self.source.s[x][0]),
            self.material_sum(|x| self.source.s[x][1]),
        ]
    }

    /// `Σ f_i²` over all material entries.
    pub fn quadratic_norm(&self) -> f64 {
        let n = self.classified.grid.len();
        let f = self.f.as_slice();
        (0..Q)
            .map(|i| self.material_sum(|x| f[i * n + x] * f[i * n + x]))
            .sum()
    }

    fn material_sum(&self, value: impl Fn(usize) -> f64) -> f64 {
        (0..self.classified.grid.len())
            .filter(|&x| self.classified.material[x])
            .map(value)
            .sum()
    }
}
