//! Reinforcement geometries, their indicator functions, cross-sections and
//! areas, plus the builders for the cross, tile, network and truss classes.
//!
//! Every reinforcement is lowered to a [`Geometry`]: a union of polygons and
//! disks with cached ordinate breakpoints. Horizontal cross-sections are
//! unions of open intervals, and the union area is computed exactly for
//! polygons with the slab method: between consecutive vertex or
//! edge-crossing ordinates the cross-section length is affine, so the
//! midpoint rule is exact on each slab.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::RangeInclusive;

use libm::{fabs, sqrt};

use crate::config::PlateConfig;
use crate::error::{Error, Result};
use crate::num::IntPow;
use crate::num::{brent_root, GaussRule};

/// A point `(x, y)` of the plate.
pub type Point = [f64; 2];

/// Boundary tolerance used by point tests and containment checks.
const GEOM_TOL: f64 = 1e-12;

/// An axis-aligned open rectangle `]x0, x1[ x ]y0, y1[`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rect {
    /// Left abscissa.
    pub x0: f64,
    /// Right abscissa.
    pub x1: f64,
    /// Lower ordinate.
    pub y0: f64,
    /// Upper ordinate.
    pub y1: f64,
}

impl Rect {
    /// Rectangle from its corner coordinates.
    pub const fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    /// Radius of the largest inscribed disk.
    pub fn inradius(&self) -> f64 {
        0.5 * (self.x1 - self.x0).min(self.y1 - self.y0)
    }

    fn polygon(&self) -> Vec<Point> {
        vec![
            [self.x0, self.y0],
            [self.x1, self.y0],
            [self.x1, self.y1],
            [self.x0, self.y1],
        ]
    }
}

/// The four polygonal truss presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TrussPreset {
    /// Two parallel strips along the free edges.
    Strips,
    /// Edge strips, vertical bars and alternating diagonals.
    Triangles,
    /// Edge strips and vertical bars.
    Squares,
    /// Edge strips and Y-shaped components.
    Hexagons,
}

impl TrussPreset {
    /// All presets in table order.
    pub const ALL: [TrussPreset; 4] = [
        TrussPreset::Strips,
        TrussPreset::Triangles,
        TrussPreset::Squares,
        TrussPreset::Hexagons,
    ];

    /// Display name.
    pub fn name(self) -> &'static str {
        match self {
            TrussPreset::Strips => "Strips",
            TrussPreset::Triangles => "Triangles",
            TrussPreset::Squares => "Squares",
            TrussPreset::Hexagons => "Hexagons",
        }
    }
}

/// How the width of the interior truss members is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MemberWidth {
    /// Width solved so the interior members add exactly `2 pi (X - W)` of area.
    AreaFitted,
    /// The published approximate widths ([`TrussSpec::TRIANGLE_WIDTH`],
    /// [`TrussSpec::HEXAGON_WIDTH`]); squares use `W`.
    Verbatim,
    /// A user-supplied width.
    Fixed(f64),
}

/// Parameters of a polygonal truss.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrussSpec {
    /// Which preset.
    pub preset: TrussPreset,
    /// Width `X` of the two strips of the `Strips` preset.
    pub x_width: f64,
    /// Width `W` of the edge strips of the other presets.
    pub w_width: f64,
    /// Interior member width rule.
    pub member_width: MemberWidth,
    /// Hexagon leg length `b` from the edge line to the Y junction.
    pub branch_length: f64,
}

impl TrussSpec {
    /// `X = 1046 pi / 750^2`.
    pub const X: f64 = 1046.0 * PI / (750.0 * 750.0);
    /// `W = pi / 750`.
    pub const W: f64 = PI / 750.0;
    /// Published approximate width of the triangle members.
    pub const TRIANGLE_WIDTH: f64 = 0.002_871_59;
    /// Published approximate width `Z` of the hexagon members.
    pub const HEXAGON_WIDTH: f64 = 0.021_521_1;

    /// Preset with area-fitted members and the junction on the midline.
    pub fn preset(preset: TrussPreset, cfg: &PlateConfig) -> Self {
        Self {
            preset,
            x_width: Self::X,
            w_width: Self::W,
            member_width: MemberWidth::AreaFitted,
            branch_length: cfg.ell,
        }
    }
}

/// Tagged description of a reinforcement `D` inside the plate.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Reinforcement {
    /// No reinforcement.
    Empty,
    /// Vertical arms `]x_i - mu, x_i + mu[ x ]-ell, ell[` and horizontal arms
    /// `]0, pi[ x ]y_j - eps, y_j + eps[`.
    Cross {
        /// Arm centers `x_i`, increasing.
        x_centers: Vec<f64>,
        /// Half-width of the vertical arms.
        mu: f64,
        /// Arm centers `y_j`, increasing.
        y_centers: Vec<f64>,
        /// Half-width of the horizontal arms.
        eps: f64,
    },
    /// The constant-area family `D^N`: the strip `|y| < eps` and `2N+1`
    /// vertical arms centred at `pi i/(2N+2)` of half-width `mu/(2N+1)`.
    /// `mu = 0` leaves the horizontal strip alone.
    SymmetricCrossN {
        /// Arm count parameter `N`.
        n: u32,
        /// Total vertical half-width `mu`.
        mu: f64,
        /// Strip half-width `eps`.
        eps: f64,
    },
    /// Union of open rectangles, each with inradius at least `eps`.
    Tiles {
        /// The rectangles.
        rects: Vec<Rect>,
        /// Minimal inradius.
        eps: f64,
    },
    /// Tubular neighbourhood of radius `radius` of a polyline of length at
    /// most `length_bound`.
    NetworkTube {
        /// Polyline vertices.
        polyline: Vec<Point>,
        /// Tube radius.
        radius: f64,
        /// Bound on the polyline length.
        length_bound: f64,
    },
    /// One of the polygonal truss presets.
    PolygonalTruss(TrussSpec),
    /// Union of simple polygons.
    PolygonUnion(Vec<Vec<Point>>),
}

impl Reinforcement {
    /// The family member `D^N` with parameters `mu` and `eps`.
    pub fn cross_n(n: u32, mu: f64, eps: f64) -> Self {
        Reinforcement::SymmetricCrossN { n, mu, eps }
    }

    /// A truss preset with default parameters.
    pub fn truss(preset: TrussPreset, cfg: &PlateConfig) -> Self {
        Reinforcement::PolygonalTruss(TrussSpec::preset(preset, cfg))
    }

    /// Short human-readable label.
    pub fn label(&self) -> alloc::string::String {
        match self {
            Reinforcement::Empty => "empty".into(),
            Reinforcement::Cross { .. } => "cross".into(),
            Reinforcement::SymmetricCrossN { n, .. } => format!("D{n}"),
            Reinforcement::Tiles { rects, .. } => format!("tiles({})", rects.len()),
            Reinforcement::NetworkTube { .. } => "network".into(),
            Reinforcement::PolygonalTruss(t) => t.preset.name().into(),
            Reinforcement::PolygonUnion(p) => format!("polygons({})", p.len()),
        }
    }
}

/// A primitive shape of a geometry.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Simple polygon, counter-clockwise.
    Polygon(Vec<Point>),
    /// Open disk.
    Disk {
        /// Centre.
        center: Point,
        /// Radius.
        radius: f64,
    },
}

impl Shape {
    fn polygon(mut v: Vec<Point>) -> Self {
        if signed_area(&v) < 0.0 {
            v.reverse();
        }
        Shape::Polygon(v)
    }

    fn y_range(&self) -> (f64, f64) {
        match self {
            Shape::Polygon(v) => v
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
                    (a.min(p[1]), b.max(p[1]))
                }),
            Shape::Disk { center, radius } => (center[1] - radius, center[1] + radius),
        }
    }

    /// Pushes the intervals of `{x : (x, y) in shape}` using half-open
    /// crossings `y0 <= y < y1`.
    fn push_intervals(&self, y: f64, out: &mut Vec<(f64, f64)>) {
        match self {
            Shape::Polygon(v) => {
                let mut xs: [f64; 16] = [0.0; 16];
                let mut heap: Vec<f64> = Vec::new();
                let mut k = 0usize;
                let n = v.len();
                for i in 0..n {
                    let p = v[i];
                    let q = v[(i + 1) % n];
                    if (p[1] <= y && y < q[1]) || (q[1] <= y && y < p[1]) {
                        let x = p[0] + (y - p[1]) * (q[0] - p[0]) / (q[1] - p[1]);
                        if k < xs.len() {
                            xs[k] = x;
                        } else {
                            if heap.is_empty() {
                                heap.extend_from_slice(&xs);
                            }
                            heap.push(x);
                        }
                        k += 1;
                    }
                }
                let xs: &mut [f64] = if heap.is_empty() {
                    &mut xs[..k]
                } else {
                    &mut heap[..]
                };
                xs.sort_by(f64::total_cmp);
                for pair in xs.chunks_exact(2) {
                    out.push((pair[0], pair[1]));
                }
            }
            Shape::Disk { center, radius } => {
                let dy = y - center[1];
                let r2 = radius * radius - dy * dy;
                if r2 > 0.0 {
                    let h = sqrt(r2);
                    out.push((center[0] - h, center[0] + h));
                }
            }
        }
    }

    fn on_boundary(&self, x: f64, y: f64, tol: f64) -> bool {
        match self {
            Shape::Polygon(v) => {
                let n = v.len();
                (0..n).any(|i| segment_distance([x, y], v[i], v[(i + 1) % n]) <= tol)
            }
            Shape::Disk { center, radius } => {
                let r = sqrt((x - center[0]).ipow(2) + (y - center[1]).ipow(2));
                fabs(r - radius) <= tol
            }
        }
    }

    fn contains_strict(&self, x: f64, y: f64) -> bool {
        if self.on_boundary(x, y, GEOM_TOL) {
            return false;
        }
        match self {
            Shape::Polygon(v) => {
                let mut inside = false;
                let n = v.len();
                for i in 0..n {
                    let p = v[i];
                    let q = v[(i + 1) % n];
                    if (p[1] <= y && y < q[1]) || (q[1] <= y && y < p[1]) {
                        let xc = p[0] + (y - p[1]) * (q[0] - p[0]) / (q[1] - p[1]);
                        if x < xc {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
            Shape::Disk { center, radius } => {
                (x - center[0]).ipow(2) + (y - center[1]).ipow(2) < radius * radius
            }
        }
    }
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for i in 0..n {
        let p = v[i];
        let q = v[(i + 1) % n];
        s += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * s
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (cx, cy) = (a[0] + t * dx, a[1] + t * dy);
    sqrt((p[0] - cx).ipow(2) + (p[1] - cy).ipow(2))
}

/// Ordinate of the proper intersection of two segments, if any.
fn segment_intersection_y(a0: Point, a1: Point, b0: Point, b1: Point) -> Option<f64> {
    let r = [a1[0] - a0[0], a1[1] - a0[1]];
    let s = [b1[0] - b0[0], b1[1] - b0[1]];
    let den = r[0] * s[1] - r[1] * s[0];
    if den == 0.0 {
        return None;
    }
    let qp = [b0[0] - a0[0], b0[1] - a0[1]];
    let t = (qp[0] * s[1] - qp[1] * s[0]) / den;
    let u = (qp[0] * r[1] - qp[1] * r[0]) / den;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some(a0[1] + t * r[1])
    } else {
        None
    }
}

/// Merges sorted-or-unsorted intervals into a disjoint increasing union,
/// clipped to `[lo, hi]`.
pub fn merge_intervals(mut iv: Vec<(f64, f64)>, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        let (a, b) = (a.max(lo), b.min(hi));
        if b <= a {
            continue;
        }
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// A reinforcement lowered to primitive shapes, with cached breakpoints,
/// area and symmetry flag.
#[derive(Debug, Clone)]
pub struct Geometry {
    reinforcement: Reinforcement,
    shapes: Vec<Shape>,
    y_ranges: Vec<(f64, f64)>,
    breakpoints: Vec<f64>,
    area: f64,
    symmetric: bool,
    ell: f64,
    member_width: Option<f64>,
}

impl Geometry {
    /// Validates and lowers a reinforcement.
    pub fn new(reinforcement: Reinforcement, cfg: &PlateConfig) -> Result<Self> {
        cfg.validate()?;
        let (shapes, member_width) = build_shapes(&reinforcement, cfg)?;
        Ok(Self::from_shapes(reinforcement, shapes, member_width, cfg))
    }

    /// The unreinforced plate.
    pub fn empty(cfg: &PlateConfig) -> Self {
        Self::from_shapes(Reinforcement::Empty, Vec::new(), None, cfg)
    }

    fn from_shapes(
        reinforcement: Reinforcement,
        shapes: Vec<Shape>,
        member_width: Option<f64>,
        cfg: &PlateConfig,
    ) -> Self {
        let ell = cfg.ell;
        let y_ranges = shapes.iter().map(Shape::y_range).collect();
        let breakpoints = compute_breakpoints(&shapes, ell);
        let mut g = Self {
            reinforcement,
            shapes,
            y_ranges,
            breakpoints,
            area: 0.0,
            symmetric: true,
            ell,
            member_width,
        };
        g.area = g.closed_form_area().unwrap_or_else(|| g.slab_area());
        g.symmetric = g.check_symmetry();
        g
    }

    /// The reinforcement this geometry was built from.
    pub fn reinforcement(&self) -> &Reinforcement {
        &self.reinforcement
    }

    /// Primitive shapes.
    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    /// `true` when there is no reinforcement.
    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    /// Interior member width actually used (trusses only).
    pub fn member_width(&self) -> Option<f64> {
        self.member_width
    }

    /// Half-width of the plate this geometry was built for.
    pub fn ell(&self) -> f64 {
        self.ell
    }

    /// `(N, mu, eps)` when the reinforcement is a `D^N` cross.
    pub fn cross_params(&self) -> Option<(u32, f64, f64)> {
        match self.reinforcement {
            Reinforcement::SymmetricCrossN { n, mu, eps } => Some((n, mu, eps)),
            _ => None,
        }
    }

    /// Lebesgue area of `D`.
    pub fn area(&self) -> f64 {
        self.area
    }

    /// `true` iff `(x, y) in D <=> (x, -y) in D`.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Sorted ordinates in `[-ell, ell]` where the cross-section changes
    /// shape, always including `+-ell`.
    pub fn y_breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `chi_D(x, y)` with open-set semantics: boundary points give 0.
    pub fn indicator(&self, x: f64, y: f64) -> Result<u8> {
        let tol = 1e-12;
        if !(x >= -tol && x <= PI + tol && fabs(y) <= self.ell + tol) {
            return Err(Error::domain(format!(
                "point ({x}, {y}) lies outside the closed plate"
            )));
        }
        if self.shapes.iter().any(|s| s.contains_strict(x, y)) {
            return Ok(1);
        }
        if !self.shapes.iter().any(|s| s.on_boundary(x, y, GEOM_TOL)) {
            return Ok(0);
        }
        // On the boundary of a piece: interior of the union only if `x` is
        // strictly inside the merged cross-sections just above and below.
        let d = 1e-11 * (1.0 + self.ell);
        let strictly_in = |yy: f64| {
            self.cross_section(yy)
                .iter()
                .any(|&(a, b)| a + d < x && x < b - d)
        };
        let all_in = strictly_in(y - d) && strictly_in(y) && strictly_in(y + d);
        Ok(u8::from(all_in))
    }

    /// Disjoint increasing open intervals forming `{x : (x, y) in D}`,
    /// clipped to `[0, pi]`.
    pub fn cross_section(&self, y: f64) -> Vec<(f64, f64)> {
        let mut iv = Vec::new();
        for (s, r) in self.shapes.iter().zip(&self.y_ranges) {
            if y >= r.0 && y <= r.1 {
                s.push_intervals(y, &mut iv);
            }
        }
        merge_intervals(iv, 0.0, PI)
    }

    /// Total length of the cross-section at `y`.
    pub fn cross_section_length(&self, y: f64) -> f64 {
        self.cross_section(y).iter().map(|(a, b)| b - a).sum()
    }

    fn has_disks(&self) -> bool {
        self.shapes.iter().any(|s| matches!(s, Shape::Disk { .. }))
    }

    fn closed_form_area(&self) -> Option<f64> {
        let ell = self.ell;
        match &self.reinforcement {
            Reinforcement::Empty => Some(0.0),
            Reinforcement::SymmetricCrossN { mu, eps, .. } => {
                Some(2.0 * PI * eps + 4.0 * mu * (ell - eps))
            }
            Reinforcement::Cross {
                x_centers,
                mu,
                y_centers,
                eps,
            } => {
                let (nx, ny) = (x_centers.len() as f64, y_centers.len() as f64);
                Some(nx * 2.0 * mu * 2.0 * ell + ny * 2.0 * eps * PI - nx * ny * 4.0 * mu * eps)
            }
            _ => None,
        }
    }

    /// Union area by integrating cross-section lengths slab by slab.
    pub fn slab_area(&self) -> f64 {
        let mut total = crate::num::NeumaierSum::new();
        let disks = self.has_disks();
        let rule = GaussRule::new(16);
        for w in self.breakpoints.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            if disks {
                let parts = 8;
                for j in 0..parts {
                    let lo = a + (b - a) * j as f64 / parts as f64;
                    let hi = a + (b - a) * (j + 1) as f64 / parts as f64;
                    total.add(rule.integrate(lo, hi, |y| self.cross_section_length(y)));
                }
            } else {
                total.add((b - a) * self.cross_section_length(0.5 * (a + b)));
            }
        }
        total.value()
    }

    fn check_symmetry(&self) -> bool {
        if self.shapes.is_empty() {
            return true;
        }
        let mut ys: Vec<f64> = Vec::new();
        for w in self.breakpoints.windows(2) {
            ys.push(0.5 * (w[0] + w[1]));
            ys.push(w[0] + 0.25 * (w[1] - w[0]));
        }
        let tol = 1e-10;
        ys.iter().all(|&y| {
            let a = self.cross_section(y);
            let b = self.cross_section(-y);
            a.len() == b.len()
                && a.iter()
                    .zip(&b)
                    .all(|(p, q)| fabs(p.0 - q.0) < tol && fabs(p.1 - q.1) < tol)
        })
    }
}

fn compute_breakpoints(shapes: &[Shape], ell: f64) -> Vec<f64> {
    let mut ys: Vec<f64> = vec![-ell, ell];
    let mut edges: Vec<(Point, Point, f64, f64)> = Vec::new();
    for s in shapes {
        match s {
            Shape::Polygon(v) => {
                let n = v.len();
                for i in 0..n {
                    let (p, q) = (v[i], v[(i + 1) % n]);
                    ys.push(p[1]);
                    edges.push((p, q, p[0].min(q[0]), p[0].max(q[0])));
                    // clipping at x = 0 and x = pi introduces kinks
                    for xc in [0.0, PI] {
                        if (p[0] - xc) * (q[0] - xc) < 0.0 {
                            ys.push(p[1] + (xc - p[0]) * (q[1] - p[1]) / (q[0] - p[0]));
                        }
                    }
                }
            }
            Shape::Disk { center, radius } => {
                ys.push(center[1] - radius);
                ys.push(center[1]);
                ys.push(center[1] + radius);
            }
        }
    }
    edges.sort_by(|a, b| a.2.total_cmp(&b.2));
    for i in 0..edges.len() {
        let (a0, a1, _, amax) = edges[i];
        let (aylo, ayhi) = (a0[1].min(a1[1]), a0[1].max(a1[1]));
        for e in &edges[i + 1..] {
            if e.2 > amax {
                break;
            }
            let (b0, b1) = (e.0, e.1);
            if b0[1].max(b1[1]) < aylo || b0[1].min(b1[1]) > ayhi {
                continue;
            }
            if let Some(y) = segment_intersection_y(a0, a1, b0, b1) {
                ys.push(y);
            }
        }
    }
    let mut ys: Vec<f64> = ys.into_iter().filter(|y| fabs(*y) <= ell).collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup_by(|a, b| fabs(*a - *b) <= 1e-15 * (1.0 + fabs(*b)));
    ys
}

fn check_inside(p: Point, ell: f64) -> Result<()> {
    if p[0] < -GEOM_TOL || p[0] > PI + GEOM_TOL || fabs(p[1]) > ell + GEOM_TOL {
        return Err(Error::domain(format!(
            "vertex ({}, {}) lies outside the plate",
            p[0], p[1]
        )));
    }
    Ok(())
}

fn rect_shape(x0: f64, x1: f64, y0: f64, y1: f64) -> Shape {
    Shape::polygon(Rect::new(x0, x1, y0, y1).polygon())
}

/// Parallelogram of perpendicular width `w` around the segment `p -> q`,
/// with horizontal end edges at `p[1]` and `q[1]`.
fn slanted_member(p: Point, q: Point, w: f64) -> Shape {
    let len = sqrt((q[0] - p[0]).ipow(2) + (q[1] - p[1]).ipow(2));
    let sin_t = fabs(q[1] - p[1]) / len;
    let hw = 0.5 * w / sin_t;
    Shape::polygon(vec![
        [p[0] - hw, p[1]],
        [p[0] + hw, p[1]],
        [q[0] + hw, q[1]],
        [q[0] - hw, q[1]],
    ])
}

/// Rotated rectangle of width `w` around the segment `p -> q`.
fn segment_rect(p: Point, q: Point, w: f64) -> Shape {
    let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
    let len = sqrt(dx * dx + dy * dy);
    let (nx, ny) = (-dy / len * 0.5 * w, dx / len * 0.5 * w);
    Shape::polygon(vec![
        [p[0] - nx, p[1] - ny],
        [q[0] - nx, q[1] - ny],
        [q[0] + nx, q[1] + ny],
        [p[0] + nx, p[1] + ny],
    ])
}

fn build_shapes(r: &Reinforcement, cfg: &PlateConfig) -> Result<(Vec<Shape>, Option<f64>)> {
    let ell = cfg.ell;
    match r {
        Reinforcement::Empty => Ok((Vec::new(), None)),
        Reinforcement::SymmetricCrossN { n, mu, eps } => {
            let (n, mu, eps) = (*n, *mu, *eps);
            let arms = 2 * n + 1;
            let mu_max = (2 * n + 1) as f64 * PI / (4.0 * (n + 1) as f64);
            if !(mu >= 0.0 && mu < mu_max) {
                return Err(Error::domain(format!(
                    "mu = {mu} must lie in [0, {mu_max}) for N = {n}"
                )));
            }
            if !(eps > 0.0 && eps < ell) {
                return Err(Error::domain(format!("eps = {eps} must lie in ]0, ell[")));
            }
            let mut shapes = vec![rect_shape(0.0, PI, -eps, eps)];
            if mu > 0.0 {
                let half = mu / arms as f64;
                for i in 1..=arms {
                    let c = PI * i as f64 / (2 * n + 2) as f64;
                    shapes.push(rect_shape(c - half, c + half, -ell, ell));
                }
            }
            Ok((shapes, None))
        }
        Reinforcement::Cross {
            x_centers,
            mu,
            y_centers,
            eps,
        } => {
            let (mu, eps) = (*mu, *eps);
            if !x_centers.is_empty() && !(mu > 0.0 && mu < PI / (2.0 * x_centers.len() as f64)) {
                return Err(Error::domain(format!("cross mu = {mu} out of range")));
            }
            if !y_centers.is_empty() && !(eps > 0.0 && eps < ell / y_centers.len() as f64) {
                return Err(Error::domain(format!("cross eps = {eps} out of range")));
            }
            for (i, &x) in x_centers.iter().enumerate() {
                if x < mu || x > PI - mu {
                    return Err(Error::domain(format!("arm centre x = {x} out of range")));
                }
                if i > 0 && x - x_centers[i - 1] <= 2.0 * mu {
                    return Err(Error::domain("vertical arms overlap"));
                }
            }
            for (j, &y) in y_centers.iter().enumerate() {
                if y < -ell + eps || y > ell - eps {
                    return Err(Error::domain(format!("arm centre y = {y} out of range")));
                }
                if j > 0 && y - y_centers[j - 1] <= 2.0 * eps {
                    return Err(Error::domain("horizontal arms overlap"));
                }
            }
            let mut shapes: Vec<Shape> = x_centers
                .iter()
                .map(|&x| rect_shape(x - mu, x + mu, -ell, ell))
                .collect();
            shapes.extend(
                y_centers
                    .iter()
                    .map(|&y| rect_shape(0.0, PI, y - eps, y + eps)),
            );
            Ok((shapes, None))
        }
        Reinforcement::Tiles { rects, eps } => {
            let mut shapes = Vec::new();
            for t in rects {
                if !(t.x1 > t.x0 && t.y1 > t.y0) {
                    return Err(Error::domain("degenerate tile"));
                }
                if t.inradius() < *eps {
                    return Err(Error::domain(format!(
                        "tile inradius {} below eps = {eps}",
                        t.inradius()
                    )));
                }
                check_inside([t.x0, t.y0], ell)?;
                check_inside([t.x1, t.y1], ell)?;
                shapes.push(Shape::polygon(t.polygon()));
            }
            Ok((shapes, None))
        }
        Reinforcement::NetworkTube {
            polyline,
            radius,
            length_bound,
        } => {
            if polyline.is_empty() || !(*radius > 0.0 && *radius < ell) {
                return Err(Error::domain(
                    "network needs vertices and a radius in ]0, ell[",
                ));
            }
            let mut length = 0.0;
            let mut shapes = Vec::new();
            for w in polyline.windows(2) {
                let l = sqrt((w[1][0] - w[0][0]).ipow(2) + (w[1][1] - w[0][1]).ipow(2));
                length += l;
                if l > 0.0 {
                    shapes.push(segment_rect(w[0], w[1], 2.0 * radius));
                }
            }
            if length > *length_bound * (1.0 + 1e-12) {
                return Err(Error::domain(format!(
                    "polyline length {length} exceeds the bound {length_bound}"
                )));
            }
            for p in polyline {
                check_inside(*p, ell)?;
                shapes.push(Shape::Disk {
                    center: *p,
                    radius: *radius,
                });
            }
            Ok((shapes, None))
        }
        Reinforcement::PolygonUnion(polys) => {
            let mut shapes = Vec::new();
            for p in polys {
                if p.len() < 3 {
                    return Err(Error::domain("polygon needs at least three vertices"));
                }
                for v in p {
                    check_inside(*v, ell)?;
                }
                shapes.push(Shape::polygon(p.clone()));
            }
            Ok((shapes, None))
        }
        Reinforcement::PolygonalTruss(spec) => build_truss(spec, cfg),
    }
}

fn edge_strips(w: f64, ell: f64) -> Vec<Shape> {
    vec![
        rect_shape(0.0, PI, ell - w, ell),
        rect_shape(0.0, PI, -ell, -ell + w),
    ]
}

fn truss_members(spec: &TrussSpec, ell: f64, width: f64) -> Vec<Shape> {
    let w_edge = spec.w_width;
    let h = ell - w_edge;
    let mut shapes = edge_strips(w_edge, ell);
    match spec.preset {
        TrussPreset::Strips => {}
        TrussPreset::Squares => {
            for k in 1..75 {
                let c = k as f64 * PI / 75.0;
                shapes.push(rect_shape(c - 0.5 * width, c + 0.5 * width, -h, h));
            }
        }
        TrussPreset::Triangles => {
            for k in 1..75 {
                let c = k as f64 * PI / 75.0;
                shapes.push(rect_shape(c - 0.5 * width, c + 0.5 * width, -h, h));
            }
            for k in 0..75 {
                let x0 = k as f64 * PI / 75.0 + w_edge;
                let x1 = (k + 1) as f64 * PI / 75.0 - w_edge;
                let (y0, y1) = if k % 2 == 0 { (-h, h) } else { (h, -h) };
                shapes.push(slanted_member([x0, y0], [x1, y1], width));
            }
        }
        TrussPreset::Hexagons => {
            let step = PI / 18.0;
            let yj = ell - spec.branch_length;
            for k in 0..=18 {
                let x = k as f64 * step;
                let up = k % 2 == 1;
                let (junction, far) = if up { (yj, -h) } else { (-yj, h) };
                if (1..18).contains(&k) {
                    let (lo, hi) = if up { (junction, h) } else { (-h, junction) };
                    shapes.push(rect_shape(x - 0.5 * width, x + 0.5 * width, lo, hi));
                    for dx in [-0.5 * step, 0.5 * step] {
                        shapes.push(slanted_member([x, junction], [x + dx, far], width));
                    }
                } else {
                    let dx = if k == 0 { 0.5 * step } else { -0.5 * step };
                    shapes.push(slanted_member([x, junction], [x + dx, far], width));
                }
            }
        }
    }
    shapes
}

fn build_truss(spec: &TrussSpec, cfg: &PlateConfig) -> Result<(Vec<Shape>, Option<f64>)> {
    let ell = cfg.ell;
    let (x, w) = (spec.x_width, spec.w_width);
    if !(x > 0.0 && x < ell && w > 0.0 && w < ell && w < x) {
        return Err(Error::domain("truss widths must satisfy 0 < W < X < ell"));
    }
    if spec.preset == TrussPreset::Strips {
        return Ok((edge_strips(x, ell), None));
    }
    if spec.preset == TrussPreset::Hexagons
        && !(spec.branch_length > w && spec.branch_length < 2.0 * ell - w)
    {
        return Err(Error::domain(
            "hexagon branch length must lie in ]W, 2 ell - W[",
        ));
    }
    let width = match spec.member_width {
        MemberWidth::Fixed(v) => v,
        MemberWidth::Verbatim => match spec.preset {
            TrussPreset::Triangles => TrussSpec::TRIANGLE_WIDTH,
            TrussPreset::Hexagons => TrussSpec::HEXAGON_WIDTH,
            _ => w,
        },
        MemberWidth::AreaFitted => fit_member_width(spec, cfg)?,
    };
    if !(width > 0.0 && width < 2.0 * ell) {
        return Err(Error::domain(format!("member width {width} out of range")));
    }
    Ok((truss_members(spec, ell, width), Some(width)))
}

/// Member width for which the truss adds `2 pi (X - W)` to the edge strips.
fn fit_member_width(spec: &TrussSpec, cfg: &PlateConfig) -> Result<f64> {
    let target = 2.0 * PI * (spec.x_width - spec.w_width);
    let base = 2.0 * PI * spec.w_width;
    let excess = |width: f64| {
        let shapes = truss_members(spec, cfg.ell, width);
        let g = Geometry::from_shapes(Reinforcement::Empty, shapes, None, cfg);
        g.slab_area() - base - target
    };
    brent_root(
        excess,
        1e-7,
        0.5 * spec.w_width.max(0.02).min(cfg.ell),
        1e-17,
    )
    .ok_or_else(|| Error::numeric("could not fit the truss member width to the area target"))
}

/// Finite reinforcement classes.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassSpec {
    /// `D^N` for `N` in the range, all with the same `mu` and `eps`.
    CrossFamily {
        /// Range of `N`.
        n: RangeInclusive<u32>,
        /// Vertical half-width parameter.
        mu: f64,
        /// Strip half-width.
        eps: f64,
    },
    /// The four truss presets in table order.
    TrussPresets,
    /// Regular `nx x ny` grids of equal rectangles, one element per count
    /// pair. Tile height is `fill` of the cell height; the width is `fill` of
    /// the cell width, or set by the area constraint when one is given.
    TileGrid {
        /// `(nx, ny)` per element.
        counts: Vec<(u32, u32)>,
        /// Fill fraction in `]0, 1[`.
        fill: f64,
        /// Minimal tile inradius.
        eps: f64,
    },
}

/// Enumerates a finite class, optionally keeping only members with
/// `|D| = kappa` (relative tolerance `1e-12`).
pub fn enumerate_class(
    spec: &ClassSpec,
    kappa: Option<f64>,
    cfg: &PlateConfig,
) -> Result<Vec<Reinforcement>> {
    let mut out = Vec::new();
    match spec {
        ClassSpec::CrossFamily { n, mu, eps } => {
            for k in n.clone() {
                let r = Reinforcement::cross_n(k, *mu, *eps);
                Geometry::new(r.clone(), cfg)?;
                out.push(r);
            }
        }
        ClassSpec::TrussPresets => {
            for p in TrussPreset::ALL {
                out.push(Reinforcement::truss(p, cfg));
            }
        }
        ClassSpec::TileGrid { counts, fill, eps } => {
            if !(*fill > 0.0 && *fill < 1.0) {
                return Err(Error::domain("tile fill fraction must lie in ]0, 1["));
            }
            for &(nx, ny) in counts {
                if nx == 0 || ny == 0 {
                    continue;
                }
                let (cw, chh) = (PI / nx as f64, 2.0 * cfg.ell / ny as f64);
                let th = fill * chh;
                let tw = match kappa {
                    Some(k) => k / ((nx * ny) as f64 * th),
                    None => fill * cw,
                };
                if tw >= cw || 0.5 * tw.min(th) < *eps {
                    continue;
                }
                let mut rects = Vec::new();
                for i in 0..nx {
                    for j in 0..ny {
                        let xc = (i as f64 + 0.5) * cw;
                        let yc = -cfg.ell + (j as f64 + 0.5) * chh;
                        rects.push(Rect::new(
                            xc - 0.5 * tw,
                            xc + 0.5 * tw,
                            yc - 0.5 * th,
                            yc + 0.5 * th,
                        ));
                    }
                }
                out.push(Reinforcement::Tiles { rects, eps: *eps });
            }
        }
    }
    if let Some(k) = kappa {
        let mut kept = Vec::new();
        for r in out {
            let a = Geometry::new(r.clone(), cfg)?.area();
            if fabs(a - k) <= 1e-12 * fabs(k) {
                kept.push(r);
            }
        }
        out = kept;
    }
    if out.is_empty() {
        return Err(Error::EmptyClass(format!(
            "{spec:?} has no admissible member"
        )));
    }
    Ok(out)
}
