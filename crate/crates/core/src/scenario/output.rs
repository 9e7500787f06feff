//! Probe CSV files, structured-points snapshots and the crack comparison
//! table.
//!
//! All floating-point output uses `{:.16e}`, i.e. 17 significant digits, which
//! round-trips every `f64` exactly.
//!
//! # Snapshot layout
//!
//! Legacy VTK ASCII, `DATASET STRUCTURED_POINTS`, one point per lattice site
//! with `x` fastest. Point data, in order:
//!
//! | name       | kind    | content                                               |
//! |------------|---------|-------------------------------------------------------|
//! | `rho`      | SCALARS | density                                               |
//! | `u`        | VECTORS | `u₁ u₂ 0`                                             |
//! | `sigma`    | TENSORS | `σ11 σ12 0 / σ12 σ22 0 / 0 0 0` (out-of-plane zero)   |
//! | `material` | SCALARS | `1` for material sites, `0` for solid ones (int)      |
//!
//! Fields at non-material sites are written as zero.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::dynamics::{ProbeSample, Simulation};
use crate::error::{Error, Result};
use crate::fracture::{extract_sif, K1Oracle};

/// Recorded samples of one probe; one row per output step.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSeries {
    pub id: String,
    pub position: [f64; 2],
    pub times: Vec<f64>,
    pub samples: Vec<ProbeSample>,
}

impl ProbeSeries {
    pub fn new(id: impl Into<String>, position: [f64; 2]) -> Self {
        Self {
            id: id.into(),
            position,
            times: Vec::new(),
            samples: Vec::new(),
        }
    }

    /// Appends a row. Times must increase strictly.
    pub fn push(&mut self, t: f64, sample: ProbeSample) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::InvalidArgument(format!(
                    "probe {}: time {t} does not follow {last}",
                    self.id
                )));
            }
        }
        self.times.push(t);
        self.samples.push(sample);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_by(&self, value: impl Fn(&ProbeSample) -> f64) -> Option<(f64, f64)> {
        self.times
            .iter()
            .zip(&self.samples)
            .map(|(&t, s)| (t, value(s)))
            .fold(None, |best, (t, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((t, v)),
            })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,rho,u1,u2,sigma11,sigma12,sigma22\n");
        for (t, s) in self.times.iter().zip(&self.samples) {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                t, s.rho, s.u[0], s.u[1], s.sigma[0], s.sigma[1], s.sigma[2]
            );
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_file(path.as_ref(), self.to_csv().as_bytes())
    }

    /// Parses the output of [`ProbeSeries::to_csv`].
    pub fn from_csv(id: impl Into<String>, position: [f64; 2], text: &str) -> Result<Self> {
        let mut series = Self::new(id, position);
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        if header != "t,rho,u1,u2,sigma11,sigma12,sigma22" {
            return Err(Error::InvalidArgument(format!("unexpected probe header {header:?}")));
        }
        for (k, line) in lines.enumerate() {
            let v: Vec<f64> = line
                .split(',')
                .map(|x| x.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidArgument(format!("probe row {k}: {e}")))?;
            if v.len() != 7 {
                return Err(Error::InvalidArgument(format!("probe row {k}: {} columns", v.len())));
            }
            series.push(
                v[0],
                ProbeSample {
                    rho: v[1],
                    u: [v[2], v[3]],
                    sigma: [v[4], v[5], v[6]],
                },
            )?;
        }
        Ok(series)
    }
}

/// Site fields at one time level, laid out as in the snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: u64,
    pub time: f64,
    pub nx: usize,
    pub ny: usize,
    pub origin: [f64; 2],
    pub spacing: f64,
    pub rho: Vec<f64>,
    pub u: Vec<[f64; 2]>,
    /// `[σ11, σ12, σ22]` per site.
    pub sigma: Vec<[f64; 3]>,
    pub material: Vec<bool>,
}

impl Snapshot {
    pub fn capture(sim: &Simulation) -> Self {
        let dom = sim.classified();
        let grid = &dom.grid;
        let n = grid.len();
        let mut snap = Self {
            step: sim.steps(),
            time: sim.time(),
            nx: grid.nx,
            ny: grid.ny,
            origin: grid.position(0),
            spacing: grid.dx,
            rho: vec![0.0; n],
            u: vec![[0.0; 2]; n],
            sigma: vec![[0.0; 3]; n],
            material: dom.material.clone(),
        };
        for x in (0..n).filter(|&x| dom.material[x]) {
            let s = sim.stress(x);
            snap.rho[x] = sim.state().rho[x];
            snap.u[x] = sim.displacement().u[x];
            snap.sigma[x] = [s[(0, 0)], s[(0, 1)], s[(1, 1)]];
        }
        snap
    }

    pub fn to_vtk(&self) -> String {
        let n = self.nx * self.ny;
        let mut o = String::with_capacity(n * 300);
        let _ = writeln!(o, "# vtk DataFile Version 3.0");
        let _ = writeln!(o, "elastolbm step {} time {:.16e}", self.step, self.time);
        let _ = writeln!(o, "ASCII");
        let _ = writeln!(o, "DATASET STRUCTURED_POINTS");
        let _ = writeln!(o, "DIMENSIONS {} {} 1", self.nx, self.ny);
        let _ = writeln!(o, "ORIGIN {:.16e} {:.16e} 0", self.origin[0], self.origin[1]);
        let _ = writeln!(o, "SPACING {:.16e} {:.16e} 1", self.spacing, self.spacing);
        let _ = writeln!(o, "POINT_DATA {n}");
        let _ = writeln!(o, "SCALARS rho double 1\nLOOKUP_TABLE default");
        for r in &self.rho {
            let _ = writeln!(o, "{r:.16e}");
        }
        let _ = writeln!(o, "VECTORS u double");
        for u in &self.u {
            let _ = writeln!(o, "{:.16e} {:.16e} 0", u[0], u[1]);
        }
        let _ = writeln!(o, "TENSORS sigma double");
        for s in &self.sigma {
            let _ = writeln!(o, "{:.16e} {:.16e} 0", s[0], s[1]);
            let _ = writeln!(o, "{:.16e} {:.16e} 0", s[1], s[2]);
            let _ = writeln!(o, "0 0 0");
        }
        let _ = writeln!(o, "SCALARS material int 1\nLOOKUP_TABLE default");
        for &m in &self.material {
            let _ = writeln!(o, "{}", u8::from(m));
        }
        o
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_file(path.as_ref(), self.to_vtk().as_bytes())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_vtk(&text)
    }

    /// Parses the layout written by [`Snapshot::to_vtk`].
    pub fn from_vtk(text: &str) -> Result<Self> {
        let mut c = Cursor(text.lines());
        if !c.line()?.starts_with("# vtk DataFile") {
            return Err(malformed("missing VTK signature"));
        }
        let title: Vec<&str> = c.line()?.split_whitespace().collect();
        let (step, time) = match title.as_slice() {
            ["elastolbm", "step", s, "time", t] => (
                s.parse().map_err(|_| malformed("step"))?,
                t.parse().map_err(|_| malformed("time"))?,
            ),
            _ => return Err(malformed("title line")),
        };
        c.expect("ASCII")?;
        c.expect("DATASET STRUCTURED_POINTS")?;
        let dims = c.keyed("DIMENSIONS", 3)?;
        let origin = c.keyed("ORIGIN", 3)?;
        let spacing = c.keyed("SPACING", 3)?;
        let (nx, ny) = (dims[0] as usize, dims[1] as usize);
        let n = nx * ny;
        if c.keyed("POINT_DATA", 1)?[0] as usize != n {
            return Err(malformed("POINT_DATA count"));
        }

        c.expect("SCALARS rho double 1")?;
        c.expect("LOOKUP_TABLE default")?;
        let rho = (0..n).map(|_| Ok(c.values(1)?[0])).collect::<Result<_>>()?;
        c.expect("VECTORS u double")?;
        let u = (0..n)
            .map(|_| c.values(3).map(|v| [v[0], v[1]]))
            .collect::<Result<_>>()?;
        c.expect("TENSORS sigma double")?;
        let sigma = (0..n)
            .map(|_| {
                let r0 = c.values(3)?;
                let r1 = c.values(3)?;
                c.values(3)?;
                Ok([r0[0], r0[1], r1[1]])
            })
            .collect::<Result<_>>()?;
        c.expect("SCALARS material int 1")?;
        c.expect("LOOKUP_TABLE default")?;
        let material = (0..n)
            .map(|_| match c.line()? {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(malformed(&format!("material flag {other:?}"))),
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            step,
            time,
            nx,
            ny,
            origin: [origin[0], origin[1]],
            spacing: spacing[0],
            rho,
            u,
            sigma,
            material,
        })
    }
}

fn malformed(what: &str) -> Error {
    Error::InvalidArgument(format!("malformed snapshot: {what}"))
}

struct Cursor<'a>(std::str::Lines<'a>);

impl<'a> Cursor<'a> {
    fn line(&mut self) -> Result<&'a str> {
        self.0.next().ok_or_else(|| malformed("unexpected end of file"))
    }

    fn expect(&mut self, want: &str) -> Result<()> {
        let got = self.line()?;
        if got == want {
            Ok(())
        } else {
            Err(malformed(&format!("expected {want:?}, found {got:?}")))
        }
    }

    fn values(&mut self, count: usize) -> Result<Vec<f64>> {
        let v = self
            .line()?
            .split_whitespace()
            .map(|x| x.parse::<f64>().map_err(|_| malformed(&format!("number {x:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if v.len() == count {
            Ok(v)
        } else {
            Err(malformed("row arity"))
        }
    }

    fn keyed(&mut self, key: &str, count: usize) -> Result<Vec<f64>> {
        let line = self.line()?;
        let rest = line
            .strip_prefix(key)
            .ok_or_else(|| malformed(&format!("expected {key}")))?;
        let v = rest
            .split_whitespace()
            .map(|x| x.parse::<f64>().map_err(|_| malformed(key)))
            .collect::<Result<Vec<_>>>()?;
        if v.len() == count {
            Ok(v)
        } else {
            Err(malformed(key))
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

pub fn write_snapshot(snapshot: &Snapshot, path: impl AsRef<Path>) -> Result<()> {
    snapshot.write(path)
}

/// One row of the crack comparison table. All quantities are normalized:
/// time by `l_c/c_d`, intensities by `K_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SifRow {
    pub t: f64,
    pub k_lbm: f64,
    pub k_analytical: f64,
    pub rel_err: f64,
}

/// Denominator floor of the relative error column.
pub const REL_ERR_FLOOR: f64 = 1e-12;

/// Converts the probe's `σ₁₁` at distance `tip_distance` ahead of the tip to
/// `K_I` and sets it against the analytical solution, `K⁰` up to the first
/// transit time and `K¹` afterwards.
pub fn sif_table(series: &ProbeSeries, oracle: &K1Oracle, tip_distance: f64) -> Result<Vec<SifRow>> {
    let problem = oracle.problem();
    let k_s = problem.k_static();
    let t_ref = problem.transit_time();
    series
        .times
        .par_iter()
        .zip(series.samples.par_iter())
        .map(|(&t, s)| {
            let k_lbm = extract_sif(s.sigma[0], tip_distance)? / k_s;
            let k_analytical = oracle.analytical(t)? / k_s;
            let rel_err = (k_lbm - k_analytical).abs() / k_analytical.abs().max(REL_ERR_FLOOR);
            Ok(SifRow {
                t: t / t_ref,
                k_lbm,
                k_analytical,
                rel_err,
            })
        })
        .collect()
}

pub fn sif_csv(rows: &[SifRow]) -> String {
    let mut out = String::from("t_cd_over_lc,k_lbm_over_ks,k_analytical_over_ks,rel_err\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            r.t, r.k_lbm, r.k_analytical, r.rel_err
        );
    }
    out
}

/// Writes the comparison table for the probe named `probe`.
pub fn emit_sif_report(
    probes: &[ProbeSeries],
    probe: &str,
    tip_distance: f64,
    oracle: &K1Oracle,
    path: impl AsRef<Path>,
) -> Result<Vec<SifRow>> {
    let series = probes
        .iter()
        .find(|p| p.id == probe)
        .ok_or_else(|| Error::config("sif.probe", format!("no probe series named {probe:?}")))?;
    if series.is_empty() {
        return Err(Error::config("sif.probe", format!("probe {probe:?} has no samples")));
    }
    let rows = sif_table(series, oracle, tip_distance)?;
    write_file(path.as_ref(), sif_csv(&rows).as_bytes())?;
    Ok(rows)
}
