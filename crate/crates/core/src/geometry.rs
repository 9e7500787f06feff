//! Material domain description and classification of cut lattice links.
//!
//! The domain is a rectangle whose walls sit half a spacing beyond the
//! outermost sites, optionally periodic along either axis, with circular holes
//! and zero-thickness slits inside. `classify_links` walks every link of every
//! material site and records the ones crossing a boundary.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryCondition;
use crate::error::{Error, Result};
use crate::fields::Grid;
use crate::lattice::{LatticeSpec, OFFSETS, OPPOSITE, Q};

const TIE_EPS: f64 = 1e-12;
const TIP_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Face {
    Bottom,
    Top,
    Left,
    Right,
}

impl Face {
    pub const ALL: [Face; 4] = [Face::Bottom, Face::Top, Face::Left, Face::Right];

    pub fn normal(self) -> [f64; 2] {
        match self {
            Face::Bottom => [0.0, -1.0],
            Face::Top => [0.0, 1.0],
            Face::Left => [-1.0, 0.0],
            Face::Right => [1.0, 0.0],
        }
    }

    fn axis(self) -> usize {
        match self {
            Face::Bottom | Face::Top => 1,
            Face::Left | Face::Right => 0,
        }
    }
}

/// Conditions on the four rectangle faces. Faces along a periodic axis are
/// ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceConditions {
    pub bottom: BoundaryCondition,
    pub top: BoundaryCondition,
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
}

impl FaceConditions {
    pub fn uniform(bc: BoundaryCondition) -> Self {
        Self {
            bottom: bc.clone(),
            top: bc.clone(),
            left: bc.clone(),
            right: bc,
        }
    }

    pub fn get(&self, face: Face) -> &BoundaryCondition {
        match face {
            Face::Bottom => &self.bottom,
            Face::Top => &self.top,
            Face::Left => &self.left,
            Face::Right => &self.right,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Circular hole; sites inside or on the circle are solid.
    Circle { center: [f64; 2], radius: f64 },
    /// Zero-thickness cut between two endpoints.
    Slit { start: [f64; 2], end: [f64; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub shape: Shape,
    pub bc: BoundaryCondition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub lower: [f64; 2],
    pub upper: [f64; 2],
    #[serde(default)]
    pub periodic: [bool; 2],
    pub faces: FaceConditions,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
}

/// Which part of the boundary a link hits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundarySource {
    Face(Face),
    Obstacle(usize),
}

/// A lattice link from material site `site` along `dir` that crosses the
/// boundary at `q_frac * length` from the site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryLink {
    pub site: usize,
    pub dir: usize,
    pub q_frac: f64,
    pub length: f64,
    /// Outward unit normal of the material at the intersection point.
    pub normal: [f64; 2],
    pub source: BoundarySource,
}

impl BoundaryLink {
    pub fn normal_vec(&self) -> Vector2<f64> {
        Vector2::new(self.normal[0], self.normal[1])
    }
}

impl DomainSpec {
    /// Closed rectangle with the same condition on every face.
    pub fn rectangle(lower: [f64; 2], upper: [f64; 2], bc: BoundaryCondition) -> Self {
        Self {
            lower,
            upper,
            periodic: [false, false],
            faces: FaceConditions::uniform(bc),
            obstacles: Vec::new(),
        }
    }

    pub fn with_obstacle(mut self, shape: Shape, bc: BoundaryCondition) -> Self {
        self.obstacles.push(Obstacle { shape, bc });
        self
    }

    pub fn condition(&self, source: BoundarySource) -> &BoundaryCondition {
        match source {
            BoundarySource::Face(f) => self.faces.get(f),
            BoundarySource::Obstacle(k) => &self.obstacles[k].bc,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |p: [f64; 2]| p[0].is_finite() && p[1].is_finite();
        if !finite(self.lower) || !finite(self.upper) {
            return Err(Error::InvalidArgument("domain corners must be finite".into()));
        }
        if !(self.lower[0] < self.upper[0] && self.lower[1] < self.upper[1]) {
            return Err(Error::InvalidArgument(format!(
                "empty domain {:?}..{:?}",
                self.lower, self.upper
            )));
        }
        let inside = |p: [f64; 2]| {
            p[0] > self.lower[0] && p[0] < self.upper[0] && p[1] > self.lower[1] && p[1] < self.upper[1]
        };
        for (k, ob) in self.obstacles.iter().enumerate() {
            match ob.shape {
                Shape::Circle { center, radius } => {
                    if !(radius > 0.0) || !finite(center) {
                        return Err(Error::InvalidArgument(format!("obstacle {k}: bad circle")));
                    }
                    let fits = center[0] - radius > self.lower[0]
                        && center[0] + radius < self.upper[0]
                        && center[1] - radius > self.lower[1]
                        && center[1] + radius < self.upper[1];
                    if !fits {
                        return Err(Error::InvalidArgument(format!(
                            "obstacle {k}: circle not strictly inside the domain"
                        )));
                    }
                }
                Shape::Slit { start, end } => {
                    if !finite(start) || !finite(end) || start == end {
                        return Err(Error::InvalidArgument(format!(
                            "obstacle {k}: slit endpoints must be finite and distinct"
                        )));
                    }
                    if !inside(start) || !inside(end) {
                        return Err(Error::InvalidArgument(format!(
                            "obstacle {k}: slit not strictly inside the domain"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Site grid with walls half a spacing beyond the outermost sites.
    pub fn grid(&self, dx: f64) -> Result<Grid> {
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(Error::InvalidArgument(format!("dx must be positive, got {dx}")));
        }
        let mut n = [0usize; 2];
        for a in 0..2 {
            let cells = (self.upper[a] - self.lower[a]) / dx;
            let rounded = cells.round();
            if (cells - rounded).abs() > 1e-9 * cells.max(1.0) || rounded < 1.0 {
                return Err(Error::GeometryResolution(format!(
                    "domain extent {} along axis {a} is not a multiple of dx = {dx}",
                    self.upper[a] - self.lower[a]
                )));
            }
            n[a] = rounded as usize;
        }
        Ok(Grid {
            nx: n[0],
            ny: n[1],
            dx,
            center: [
                0.5 * (self.lower[0] + self.upper[0]),
                0.5 * (self.lower[1] + self.upper[1]),
            ],
            periodic: self.periodic,
        })
    }
}

/// Classification result: material mask, per-site cut bitmask (bit `i` set
/// when link `i` is cut) and the list of cut links.
#[derive(Debug, Clone)]
pub struct ClassifiedDomain {
    pub grid: Grid,
    pub material: Vec<bool>,
    pub cut: Vec<u16>,
    pub links: Vec<BoundaryLink>,
}

impl ClassifiedDomain {
    #[inline]
    pub fn is_cut(&self, site: usize, dir: usize) -> bool {
        self.cut[site] & (1 << dir) != 0
    }

    pub fn material_count(&self) -> usize {
        self.material.iter().filter(|&&m| m).count()
    }
}

/// Rotation whose first row is `n` and second row the tangent `(-n₂, n₁)`.
pub fn normal_frame(n: Vector2<f64>) -> Result<Matrix2<f64>> {
    let norm = n.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "normal must be a unit vector, |n| = {norm}"
        )));
    }
    Ok(Matrix2::new(n[0], n[1], -n[1], n[0]))
}

#[derive(Debug, Clone, Copy)]
struct Hit {
    s: f64,
    normal: [f64; 2],
    source: BoundarySource,
    neumann: bool,
    rank: usize,
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

fn face_hit(domain: &DomainSpec, face: Face, p: [f64; 2], d: [f64; 2]) -> Option<f64> {
    let a = face.axis();
    if domain.periodic[a] {
        return None;
    }
    let (wall, outward) = match face {
        Face::Bottom | Face::Left => (domain.lower[a], d[a] < 0.0),
        Face::Top | Face::Right => (domain.upper[a], d[a] > 0.0),
    };
    if !outward {
        return None;
    }
    let s = (wall - p[a]) / d[a];
    (s > 0.0 && s <= 1.0 + TIE_EPS).then(|| s.min(1.0))
}

fn circle_hit(center: [f64; 2], radius: f64, p: [f64; 2], d: [f64; 2]) -> Option<(f64, [f64; 2])> {
    let m = [p[0] - center[0], p[1] - center[1]];
    let a = d[0] * d[0] + d[1] * d[1];
    let b = 2.0 * (d[0] * m[0] + d[1] * m[1]);
    let c = m[0] * m[0] + m[1] * m[1] - radius * radius;
    let disc = b * b - 4.0 * a * c;
    if disc <= 0.0 {
        return None;
    }
    let s = (-b - disc.sqrt()) / (2.0 * a);
    if !(s > 0.0 && s <= 1.0 + TIE_EPS) {
        return None;
    }
    let s = s.min(1.0);
    let x = [p[0] + s * d[0], p[1] + s * d[1]];
    Some((s, unit([center[0] - x[0], center[1] - x[1]])))
}

fn slit_hit(start: [f64; 2], end: [f64; 2], p: [f64; 2], d: [f64; 2]) -> Option<(f64, [f64; 2])> {
    let e = [end[0] - start[0], end[1] - start[1]];
    let den = cross(d, e);
    let scale = d[0].hypot(d[1]) * e[0].hypot(e[1]);
    if den.abs() <= TIE_EPS * scale {
        return None;
    }
    let w = [start[0] - p[0], start[1] - p[1]];
    let s = cross(w, e) / den;
    let u = cross(w, d) / den;
    if !(s > 0.0 && s <= 1.0 + TIE_EPS) || u <= TIP_EPS || u >= 1.0 - TIP_EPS {
        return None;
    }
    let ns = unit([-e[1], e[0]]);
    let sign = if d[0] * ns[0] + d[1] * ns[1] > 0.0 { 1.0 } else { -1.0 };
    Some((s.min(1.0), [sign * ns[0], sign * ns[1]]))
}

fn point_on_slit(start: [f64; 2], end: [f64; 2], p: [f64; 2], dx: f64) -> bool {
    let e = [end[0] - start[0], end[1] - start[1]];
    let w = [p[0] - start[0], p[1] - start[1]];
    let len2 = e[0] * e[0] + e[1] * e[1];
    let u = (w[0] * e[0] + w[1] * e[1]) / len2;
    let dist = cross(e, w).abs() / len2.sqrt();
    (-TIP_EPS..=1.0 + TIP_EPS).contains(&u) && dist <= TIE_EPS * dx.max(len2.sqrt())
}

/// Classify every link of every material site against the domain boundary.
///
/// A link is cut at the nearest intersection along it. Intersections within
/// `1e-12` of each other (lattice corners) resolve to a Neumann condition
/// before a Dirichlet one, then to the first source in the order bottom, top,
/// left, right, obstacles.
pub fn classify_links(domain: &DomainSpec, lattice: &LatticeSpec) -> Result<ClassifiedDomain> {
    domain.validate()?;
    let dx = lattice.dx;
    let grid = domain.grid(dx)?;
    for (k, ob) in domain.obstacles.iter().enumerate() {
        let extent = match ob.shape {
            Shape::Circle { radius, .. } => 2.0 * radius,
            Shape::Slit { start, end } => (end[0] - start[0]).hypot(end[1] - start[1]),
        };
        if extent < 4.0 * dx {
            return Err(Error::GeometryResolution(format!(
                "obstacle {k} spans {extent}, fewer than four lattice spacings ({dx})"
            )));
        }
    }

    let n = grid.len();
    let mut material = vec![true; n];
    for site in 0..n {
        let p = grid.position(site);
        for (k, ob) in domain.obstacles.iter().enumerate() {
            match ob.shape {
                Shape::Circle { center, radius } => {
                    let r = (p[0] - center[0]).hypot(p[1] - center[1]);
                    if r <= radius * (1.0 + TIE_EPS) {
                        material[site] = false;
                    }
                }
                Shape::Slit { start, end } => {
                    if point_on_slit(start, end, p, dx) {
                        return Err(Error::GeometryResolution(format!(
                            "site {site} at {p:?} lies on slit {k}"
                        )));
                    }
                }
            }
        }
    }

    let mut cut = vec![0u16; n];
    let mut links = Vec::new();
    for site in 0..n {
        if !material[site] {
            continue;
        }
        let p = grid.position(site);
        for dir in 1..Q {
            let d = [OFFSETS[dir][0] as f64 * dx, OFFSETS[dir][1] as f64 * dx];
            if let Some(hit) = nearest_hit(domain, p, d) {
                cut[site] |= 1 << dir;
                links.push(BoundaryLink {
                    site,
                    dir,
                    q_frac: hit.s,
                    length: lattice.link_length(dir),
                    normal: hit.normal,
                    source: hit.source,
                });
            } else {
                match grid.neighbor(site, dir) {
                    Some(t) if material[t] => {}
                    _ => {
                        return Err(Error::GeometryResolution(format!(
                            "link {dir} of site {site} leaves the material without crossing a boundary"
                        )))
                    }
                }
            }
        }
        if cut[site] == ((1u16 << Q) - 2) {
            return Err(Error::GeometryResolution(format!(
                "site {site} at {p:?} is cut off on every link"
            )));
        }
    }

    Ok(ClassifiedDomain {
        grid,
        material,
        cut,
        links,
    })
}

fn nearest_hit(domain: &DomainSpec, p: [f64; 2], d: [f64; 2]) -> Option<Hit> {
    let mut hits: Vec<Hit> = Vec::new();
    for (rank, face) in Face::ALL.into_iter().enumerate() {
        if let Some(s) = face_hit(domain, face, p, d) {
            hits.push(Hit {
                s,
                normal: face.normal(),
                source: BoundarySource::Face(face),
                neumann: domain.faces.get(face).is_neumann(),
                rank,
            });
        }
    }
    for (k, ob) in domain.obstacles.iter().enumerate() {
        let found = match ob.shape {
            Shape::Circle { center, radius } => circle_hit(center, radius, p, d),
            Shape::Slit { start, end } => slit_hit(start, end, p, d),
        };
        if let Some((s, normal)) = found {
            hits.push(Hit {
                s,
                normal,
                source: BoundarySource::Obstacle(k),
                neumann: ob.bc.is_neumann(),
                rank: 4 + k,
            });
        }
    }
    let s_min = hits.iter().map(|h| h.s).fold(f64::INFINITY, f64::min);
    hits.into_iter()
        .filter(|h| h.s <= s_min + TIE_EPS)
        .min_by_key(|h| (!h.neumann, h.rank))
}

/// Problems found by [`audit_coverage`]; empty when every missing population
/// is written exactly once.
pub fn audit_coverage(domain: &ClassifiedDomain) -> Vec<String> {
    let grid = &domain.grid;
    let mut issues = Vec::new();
    let mut writes = vec![0u8; grid.len() * Q];
    for link in &domain.links {
        if !domain.material[link.site] {
            issues.push(format!("link on solid site {}", link.site));
            continue;
        }
        if !domain.is_cut(link.site, link.dir) {
            issues.push(format!("link ({}, {}) missing from the cut mask", link.site, link.dir));
        }
        if !(link.q_frac > 0.0 && link.q_frac <= 1.0) {
            issues.push(format!("link ({}, {}) has q = {}", link.site, link.dir, link.q_frac));
        }
        let nn = link.normal[0].hypot(link.normal[1]);
        if (nn - 1.0).abs() > 1e-12 {
            issues.push(format!("link ({}, {}) normal not unit", link.site, link.dir));
        }
        let o = OFFSETS[link.dir];
        if link.normal[0] * o[0] as f64 + link.normal[1] * o[1] as f64 <= 0.0 {
            issues.push(format!("link ({}, {}) normal points into the material", link.site, link.dir));
        }
        writes[OPPOSITE[link.dir] * grid.len() + link.site] += 1;
    }
    for site in 0..grid.len() {
        if !domain.material[site] {
            continue;
        }
        for i in 1..Q {
            // Population i at `site` is pulled from site - c_i or written by the
            // rule of link opposite(i).
            let back = OPPOSITE[i];
            let w = writes[i * grid.len() + site];
            if domain.is_cut(site, back) {
                if w != 1 {
                    issues.push(format!("population ({site}, {i}) written {w} times"));
                }
                if let Some(up) = grid.neighbor(site, back) {
                    if domain.material[up] && !domain.is_cut(up, i) {
                        issues.push(format!("cut between {site} and {up} is one-sided"));
                    }
                }
            } else {
                if w != 0 {
                    issues.push(format!("population ({site}, {i}) streamed and overwritten"));
                }
                match grid.neighbor(site, back) {
                    Some(up) if domain.material[up] => {
                        if domain.is_cut(up, i) {
                            issues.push(format!("cut between {site} and {up} is one-sided"));
                        }
                    }
                    _ => issues.push(format!("population ({site}, {i}) has no source")),
                }
            }
        }
    }
    issues
}
