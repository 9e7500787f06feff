//! Lattice storage: the site grid, distribution buffers and macroscopic moments.

use nalgebra::{Matrix2, Vector2};

use crate::lattice::{LatticeSpec, OFFSETS, Q};

/// Rectangular arrangement of lattice sites.
///
/// Site `(ix, iy)` has flat index `ix + iy * nx` and sits at
/// `center + (ix - (nx-1)/2, iy - (ny-1)/2) * dx`, which keeps coordinates of
/// mirrored sites exact negatives of each other about `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub center: [f64; 2],
    pub periodic: [bool; 2],
}

impl Grid {
    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix + iy * self.nx
    }

    #[inline]
    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site % self.nx, site / self.nx)
    }

    pub fn position(&self, site: usize) -> [f64; 2] {
        let (ix, iy) = self.coords(site);
        [
            self.center[0] + (ix as f64 - (self.nx as f64 - 1.0) * 0.5) * self.dx,
            self.center[1] + (iy as f64 - (self.ny as f64 - 1.0) * 0.5) * self.dx,
        ]
    }

    /// Fractional site coordinates of a physical point.
    pub fn fractional(&self, p: [f64; 2]) -> [f64; 2] {
        [
            (p[0] - self.center[0]) / self.dx + (self.nx as f64 - 1.0) * 0.5,
            (p[1] - self.center[1]) / self.dx + (self.ny as f64 - 1.0) * 0.5,
        ]
    }

    /// Neighbour of `site` along link `dir`, wrapping on periodic axes.
    #[inline]
    pub fn neighbor(&self, site: usize, dir: usize) -> Option<usize> {
        let (ix, iy) = self.coords(site);
        let o = OFFSETS[dir];
        let x = wrap(ix as i64 + o[0] as i64, self.nx, self.periodic[0])?;
        let y = wrap(iy as i64 + o[1] as i64, self.ny, self.periodic[1])?;
        Some(self.index(x, y))
    }
}

#[inline]
fn wrap(v: i64, n: usize, periodic: bool) -> Option<usize> {
    let n = n as i64;
    if (0..n).contains(&v) {
        Some(v as usize)
    } else if periodic {
        Some(v.rem_euclid(n) as usize)
    } else {
        None
    }
}

/// Distribution functions in structure-of-arrays layout: entry `(i, site)` is
/// at `i * n + site`. Holds the current buffer and the streaming target.
#[derive(Debug, Clone)]
pub struct DistributionField {
    n: usize,
    current: Vec<f64>,
    next: Vec<f64>,
}

impl DistributionField {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            current: vec![0.0; Q * n],
            next: vec![0.0; Q * n],
        }
    }

    #[inline]
    pub fn sites(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, site: usize) -> f64 {
        self.current[i * self.n + site]
    }

    #[inline]
    pub fn set(&mut self, i: usize, site: usize, v: f64) {
        self.current[i * self.n + site] = v;
    }

    pub fn site(&self, site: usize) -> [f64; Q] {
        std::array::from_fn(|i| self.current[i * self.n + site])
    }

    pub fn set_site(&mut self, site: usize, f: &[f64; Q]) {
        for (i, v) in f.iter().enumerate() {
            self.current[i * self.n + site] = *v;
        }
    }

    /// Slice of direction `i` in the current buffer.
    pub fn direction(&self, i: usize) -> &[f64] {
        &self.current[i * self.n..(i + 1) * self.n]
    }

    pub fn direction_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.current[i * self.n..(i + 1) * self.n]
    }

    /// Current buffer (read) and next buffer (write) at once.
    pub fn split(&mut self) -> (&[f64], &mut [f64]) {
        (&self.current, &mut self.next)
    }

    pub fn swap(&mut self) {
        std::mem::swap(&mut self.current, &mut self.next);
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.current
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.current
    }
}

/// Cached moments `(ρ, j, P)` per site. `P` is stored as `[P11, P12, P22]`.
#[derive(Debug, Clone)]
pub struct MacroState {
    pub rho: Vec<f64>,
    pub j: Vec<[f64; 2]>,
    pub p: Vec<[f64; 3]>,
}

impl MacroState {
    pub fn zeros(n: usize) -> Self {
        Self {
            rho: vec![0.0; n],
            j: vec![[0.0; 2]; n],
            p: vec![[0.0; 3]; n],
        }
    }

    pub fn momentum(&self, site: usize) -> Vector2<f64> {
        Vector2::from(self.j[site])
    }

    pub fn poisson_stress(&self, site: usize) -> Matrix2<f64> {
        sym_to_matrix(self.p[site])
    }
}

#[inline]
pub fn sym_to_matrix(p: [f64; 3]) -> Matrix2<f64> {
    Matrix2::new(p[0], p[1], p[1], p[2])
}

/// Moments of one site's distribution vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub rho: f64,
    pub j: Vector2<f64>,
    pub p: Matrix2<f64>,
}

/// `ρ = Σf`, `j = Σ f c + ½ dt S`, `P = Σ f c⊗c`.
pub fn compute_moments(f: &[f64; Q], source: Vector2<f64>, lattice: &LatticeSpec) -> Moments {
    let (rho, j, p) = raw_moments(f, lattice.speed());
    Moments {
        rho,
        j: Vector2::new(j[0], j[1]) + source * (0.5 * lattice.dt),
        p: sym_to_matrix(p),
    }
}

/// Zeroth, first and second moments without the source shift.
#[inline]
pub(crate) fn raw_moments(f: &[f64; Q], c: f64) -> (f64, [f64; 2], [f64; 3]) {
    let mut rho = 0.0;
    let mut j = [0.0; 2];
    let mut p = [0.0; 3];
    for (i, v) in f.iter().enumerate() {
        let o = OFFSETS[i];
        let cx = o[0] as f64 * c;
        let cy = o[1] as f64 * c;
        rho += v;
        j[0] += v * cx;
        j[1] += v * cy;
        p[0] += v * cx * cx;
        p[1] += v * cx * cy;
        p[2] += v * cy * cy;
    }
    (rho, j, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_state_has_zero_moments() {
        let l = LatticeSpec::d2q9(1.0, 1.0 / 3f64.sqrt()).unwrap();
        let m = compute_moments(&[0.0; Q], Vector2::zeros(), &l);
        assert_eq!(m.rho, 0.0);
        assert_eq!(m.j, Vector2::zeros());
        assert_eq!(m.p, Matrix2::zeros());
    }

    #[test]
    fn second_moment_is_symmetric() {
        let l = LatticeSpec::d2q9(0.1, 1.0).unwrap();
        let f: [f64; Q] = std::array::from_fn(|i| (i as f64 * 0.37).sin());
        let m = compute_moments(&f, Vector2::new(0.3, -0.2), &l);
        assert_eq!(m.p[(0, 1)], m.p[(1, 0)]);
    }

    #[test]
    fn grid_positions_are_mirror_exact() {
        let g = Grid {
            nx: 80,
            ny: 80,
            dx: 0.0125,
            center: [0.0, 0.0],
            periodic: [false, false],
        };
        for iy in 0..g.ny {
            let a = g.position(g.index(3, iy));
            let b = g.position(g.index(3, g.ny - 1 - iy));
            assert_eq!(a[1], -b[1]);
        }
        let p = g.position(g.index(0, g.ny - 1));
        assert!((p[0] - (-0.5 + 0.00625)).abs() < 1e-15);
        assert!((p[1] - (0.5 - 0.00625)).abs() < 1e-15);
        let fr = g.fractional(p);
        assert!((fr[0]).abs() < 1e-12 && (fr[1] - 79.0).abs() < 1e-12);
    }

    #[test]
    fn neighbors_wrap_only_when_periodic() {
        let mut g = Grid {
            nx: 4,
            ny: 3,
            dx: 1.0,
            center: [0.0, 0.0],
            periodic: [false, false],
        };
        assert_eq!(g.neighbor(g.index(3, 1), 1), None);
        assert_eq!(g.neighbor(g.index(1, 1), 5), Some(g.index(2, 2)));
        g.periodic = [true, true];
        assert_eq!(g.neighbor(g.index(3, 2), 5), Some(g.index(0, 0)));
        assert_eq!(g.neighbor(g.index(0, 0), 7), Some(g.index(3, 2)));
    }

    #[test]
    fn swap_preserves_entry_count() {
        let mut d = DistributionField::zeros(10);
        d.set(3, 4, 1.5);
        let before = d.as_slice().len();
        d.swap();
        assert_eq!(d.as_slice().len(), before);
        assert_eq!(d.get(3, 4), 0.0);
        d.swap();
        assert_eq!(d.get(3, 4), 1.5);
    }
}
