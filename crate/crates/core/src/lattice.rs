//! D2Q9 velocity set.
//!
//! Direction numbering:
//! ```text
//!   6   2   5
//!    \  |  /
//!   3 - 0 - 1
//!    /  |  \
//!   7   4   8
//! ```
//! Rest first, then the four axis links, then the four diagonals, so that
//! `opposite(5) = 7` and `opposite(6) = 8`.

use crate::error::{Error, Result};

pub const Q: usize = 9;

/// Integer lattice offsets of the nine links.
pub const OFFSETS: [[i32; 2]; Q] = [
    [0, 0],
    [1, 0],
    [0, 1],
    [-1, 0],
    [0, -1],
    [1, 1],
    [-1, 1],
    [-1, -1],
    [1, -1],
];

pub const OPPOSITE: [usize; Q] = [0, 3, 4, 1, 2, 7, 8, 5, 6];

pub const WEIGHTS: [f64; Q] = [
    4.0 / 9.0,
    1.0 / 9.0,
    1.0 / 9.0,
    1.0 / 9.0,
    1.0 / 9.0,
    1.0 / 36.0,
    1.0 / 36.0,
    1.0 / 36.0,
    1.0 / 36.0,
];

/// Geometry and time step of a D2Q9 lattice.
///
/// Immutable after construction. The lattice speed `c = dx/dt` and the shear
/// wave speed satisfy `c_s = c/√3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    pub dx: f64,
    pub dt: f64,
    pub cs: f64,
    /// Link velocities `c_i = OFFSETS[i] * dx / dt`.
    pub velocities: [[f64; 2]; Q],
}

impl LatticeSpec {
    pub const DIM: usize = 2;
    pub const Q: usize = Q;

    /// Builds the lattice for spacing `dx` and shear wave speed `cs`, choosing
    /// `dt = dx / (√3 cs)`.
    pub fn d2q9(dx: f64, cs: f64) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "lattice spacing must be positive, got {dx}"
            )));
        }
        if !(cs > 0.0 && cs.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "shear wave speed must be positive, got {cs}"
            )));
        }
        let dt = dx / (3f64.sqrt() * cs);
        let c = dx / dt;
        let mut velocities = [[0.0; 2]; Q];
        for (v, o) in velocities.iter_mut().zip(OFFSETS.iter()) {
            *v = [o[0] as f64 * c, o[1] as f64 * c];
        }
        Ok(Self {
            dx,
            dt,
            cs,
            velocities,
        })
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        WEIGHTS[i]
    }

    #[inline]
    pub fn opposite(&self, i: usize) -> usize {
        OPPOSITE[i]
    }

    #[inline]
    pub fn cs2(&self) -> f64 {
        self.cs * self.cs
    }

    /// Lattice speed `dx/dt`.
    #[inline]
    pub fn speed(&self) -> f64 {
        self.dx / self.dt
    }

    /// Length of link `i`: `dx` for axis links, `√2 dx` for diagonals.
    pub fn link_length(&self, i: usize) -> f64 {
        let o = OFFSETS[i];
        self.dx * ((o[0] * o[0] + o[1] * o[1]) as f64).sqrt()
    }
}

/// Free-function form of [`LatticeSpec::d2q9`].
pub fn build_d2q9(dx: f64, cs: f64) -> Result<LatticeSpec> {
    LatticeSpec::d2q9(dx, cs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn time_step_from_isotropy() {
        let l = LatticeSpec::d2q9(0.0125, 1.0).unwrap();
        assert!((l.dt - 7.217e-3).abs() < 5e-7);
        assert!(rel(l.dx / (3f64.sqrt() * l.dt), l.cs) < 1e-15);
    }

    #[test]
    fn crack_time_step() {
        // c_d = 1 and c_s^2/c_d^2 = 13/36: dt = 0.01/(√3·√(13/36)) in l_c/c_d.
        let cs = (13.0f64 / 36.0).sqrt();
        let l = LatticeSpec::d2q9(0.01, cs).unwrap();
        assert!((l.dt - 9.6077e-3).abs() < 1e-7, "dt = {}", l.dt);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            LatticeSpec::d2q9(0.0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            LatticeSpec::d2q9(1.0, -2.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(LatticeSpec::d2q9(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn weights_and_opposites() {
        let l = LatticeSpec::d2q9(0.3, 2.0).unwrap();
        let sum: f64 = WEIGHTS.iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
        assert_eq!(l.velocities[0], [0.0, 0.0]);
        for i in 0..Q {
            let o = l.opposite(i);
            assert_eq!(l.opposite(o), i);
            assert_eq!(OFFSETS[o][0], -OFFSETS[i][0]);
            assert_eq!(OFFSETS[o][1], -OFFSETS[i][1]);
            assert!(l.weight(i) >= 0.0);
        }
        assert_eq!(OPPOSITE[5], 7);
    }

    #[test]
    fn isotropy_moments_by_brute_force() {
        let l = LatticeSpec::d2q9(0.7, 1.3).unwrap();
        let cs2 = l.cs2();
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        for a in 0..2 {
            for b in 0..2 {
                let m2: f64 = (0..Q)
                    .map(|i| l.weight(i) * l.velocities[i][a] * l.velocities[i][b])
                    .sum();
                assert!((m2 - cs2 * d(a, b)).abs() <= 1e-12 * cs2);
                let m1: f64 = (0..Q).map(|i| l.weight(i) * l.velocities[i][a]).sum();
                assert!(m1.abs() < 1e-14);
                for c in 0..2 {
                    let m3: f64 = (0..Q)
                        .map(|i| {
                            l.weight(i)
                                * l.velocities[i][a]
                                * l.velocities[i][b]
                                * l.velocities[i][c]
                        })
                        .sum();
                    assert!(m3.abs() < 1e-12);
                    for e in 0..2 {
                        let m4: f64 = (0..Q)
                            .map(|i| {
                                let v = l.velocities[i];
                                l.weight(i) * v[a] * v[b] * v[c] * v[e]
                            })
                            .sum();
                        let expect =
                            cs2 * cs2 * (d(a, b) * d(c, e) + d(a, c) * d(b, e) + d(a, e) * d(b, c));
                        assert!((m4 - expect).abs() <= 1e-12 * cs2 * cs2, "{a}{b}{c}{e}");
                    }
                }
            }
        }
    }

    #[test]
    fn back_and_forth_returns_to_origin() {
        for i in 0..Q {
            let o = OFFSETS[i];
            let b = OFFSETS[OPPOSITE[i]];
            assert_eq!([o[0] + b[0], o[1] + b[1]], [0, 0]);
        }
    }
}
