//! Latent point configurations and the domains they live in.
//!
//! Points are stored row-major in [`Coords`]. Domains are either one- or
//! two-dimensional; everything downstream of a [`PointConfig`] (distances,
//! graphs, hop counts, embeddings) works for arbitrary ambient dimension.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Membership tolerance for points on a domain boundary.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

const STREAM_SAMPLE: u64 = 1 << 48;

/// Dense row-major `n × dim` coordinate matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Coords {
    n: usize,
    dim: usize,
    data: Vec<f64>,
}

impl Coords {
    pub fn new(n: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("coordinate dimension must be positive"));
        }
        if data.len() != n * dim {
            return Err(Error::SizeMismatch { left: data.len(), right: n * dim });
        }
        Ok(Coords { n, dim, data })
    }

    pub fn zeros(n: usize, dim: usize) -> Self {
        Coords { n, dim, data: vec![0.0; n * dim] }
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(1);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Coords::new(rows.len(), dim, data)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        euclid(self.row(i), self.row(j))
    }

    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for r in self.rows() {
            for (a, b) in c.iter_mut().zip(r) {
                *a += b;
            }
        }
        if self.n > 0 {
            c.iter_mut().for_each(|a| *a /= self.n as f64);
        }
        c
    }

    /// Subtracts the column means in place.
    pub fn center(&mut self) {
        let c = self.centroid();
        for r in self.data.chunks_exact_mut(self.dim) {
            for (a, b) in r.iter_mut().zip(&c) {
                *a -= b;
            }
        }
    }

    /// Sum of squared row norms.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    /// Keeps only the listed rows, in the given order.
    pub fn select(&self, idx: &[usize]) -> Coords {
        let mut data = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Coords { n: idx.len(), dim: self.dim, data }
    }
}

#[inline]
pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Axis-aligned rectangle `[min.0, max.0] × [min.1, max.1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Rect {
    pub fn new(min: [f64; 2], max: [f64; 2]) -> Result<Self> {
        let ok = (0..2).all(|k| min[k].is_finite() && max[k].is_finite() && max[k] > min[k]);
        if !ok {
            return Err(Error::DegenerateDomain(format!(
                "rectangle sides must be strictly positive, got {min:?}..{max:?}"
            )));
        }
        Ok(Rect { min, max })
    }

    pub fn area(&self) -> f64 {
        (self.max[0] - self.min[0]) * (self.max[1] - self.min[1])
    }

    fn contains(&self, p: &[f64], tol: f64) -> bool {
        (0..2).all(|k| p[k] >= self.min[k] - tol && p[k] <= self.max[k] + tol)
    }

    fn strictly_contains(&self, p: &[f64]) -> bool {
        (0..2).all(|k| p[k] > self.min[k] && p[k] < self.max[k])
    }

    /// Euclidean distance to the rectangle (zero inside).
    fn distance_outside(&self, p: &[f64]) -> f64 {
        let dx = (self.min[0] - p[0]).max(0.0).max(p[0] - self.max[0]);
        let dy = (self.min[1] - p[1]).max(0.0).max(p[1] - self.max[1]);
        dx.hypot(dy)
    }

    /// Distance from an interior point to the rectangle's boundary.
    fn distance_inside(&self, p: &[f64]) -> f64 {
        (p[0] - self.min[0])
            .min(self.max[0] - p[0])
            .min(p[1] - self.min[1])
            .min(self.max[1] - p[1])
    }

    /// Distance to the boundary from anywhere.
    fn boundary_distance(&self, p: &[f64]) -> f64 {
        if self.contains(p, 0.0) {
            self.distance_inside(p).max(0.0)
        } else {
            self.distance_outside(p)
        }
    }
}

/// The region latent points are drawn from.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Rectangle(Rect),
    /// Outer rectangle minus the open interior of a hole rectangle.
    RectangleWithHole { outer: Rect, hole: Rect },
    Interval { lo: f64, hi: f64 },
    /// Counterclockwise, strictly convex.
    ConvexPolygon(Vec<[f64; 2]>),
}

impl Domain {
    /// `[0,a] × [0,b]`.
    pub fn rectangle(a: f64, b: f64) -> Result<Self> {
        Ok(Domain::Rectangle(Rect::new([0.0, 0.0], [a, b])?))
    }

    pub fn rect(min: [f64; 2], max: [f64; 2]) -> Result<Self> {
        Ok(Domain::Rectangle(Rect::new(min, max)?))
    }

    pub fn rectangle_with_hole(outer: Rect, hole: Rect) -> Result<Self> {
        let inside = (0..2).all(|k| hole.min[k] > outer.min[k] && hole.max[k] < outer.max[k]);
        if !inside {
            return Err(Error::DegenerateDomain(
                "hole must lie strictly inside the outer rectangle".into(),
            ));
        }
        Ok(Domain::RectangleWithHole { outer, hole })
    }

    /// `[0, length]`.
    pub fn interval(length: f64) -> Result<Self> {
        Domain::interval_between(0.0, length)
    }

    pub fn interval_between(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::DegenerateDomain(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Domain::Interval { lo, hi })
    }

    pub fn convex_polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let k = vertices.len();
        if k < 3 {
            return Err(Error::DegenerateDomain("polygon needs at least 3 vertices".into()));
        }
        for i in 0..k {
            let a = vertices[i];
            let b = vertices[(i + 1) % k];
            let c = vertices[(i + 2) % k];
            if cross(a, b, c) <= 0.0 {
                return Err(Error::DegenerateDomain(
                    "polygon vertices must be counterclockwise and strictly convex".into(),
                ));
            }
        }
        Ok(Domain::ConvexPolygon(vertices))
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            _ => 2,
        }
    }

    /// Lebesgue measure (length in 1D, area in 2D).
    pub fn measure(&self) -> f64 {
        match self {
            Domain::Rectangle(r) => r.area(),
            Domain::RectangleWithHole { outer, hole } => outer.area() - hole.area(),
            Domain::Interval { lo, hi } => hi - lo,
            Domain::ConvexPolygon(v) => polygon_area(v),
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Rectangle(r) | Domain::RectangleWithHole { outer: r, .. } => {
                (r.min.to_vec(), r.max.to_vec())
            }
            Domain::Interval { lo, hi } => (vec![*lo], vec![*hi]),
            Domain::ConvexPolygon(v) => {
                let mut lo = vec![f64::INFINITY; 2];
                let mut hi = vec![f64::NEG_INFINITY; 2];
                for p in v {
                    for k in 0..2 {
                        lo[k] = lo[k].min(p[k]);
                        hi[k] = hi[k].max(p[k]);
                    }
                }
                (lo, hi)
            }
        }
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        if p.len() != self.dim() {
            return false;
        }
        match self {
            Domain::Rectangle(r) => r.contains(p, tol),
            Domain::RectangleWithHole { outer, hole } => {
                outer.contains(p, tol) && !(hole.strictly_contains(p) && hole.distance_inside(p) > tol)
            }
            Domain::Interval { lo, hi } => p[0] >= lo - tol && p[0] <= hi + tol,
            Domain::ConvexPolygon(v) => polygon_signed_boundary_distance(v, p) >= -tol,
        }
    }

    /// Distance from `p` to the domain boundary. Only meaningful for points
    /// in the domain; for the holed rectangle both boundaries count.
    pub fn boundary_distance(&self, p: &[f64]) -> Result<f64> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: p.len() });
        }
        Ok(match self {
            Domain::Rectangle(r) => r.boundary_distance(p),
            Domain::RectangleWithHole { outer, hole } => {
                outer.boundary_distance(p).min(hole.boundary_distance(p))
            }
            Domain::Interval { lo, hi } => (p[0] - lo).abs().min((hi - p[0]).abs()),
            Domain::ConvexPolygon(v) => polygon_signed_boundary_distance(v, p).abs(),
        })
    }

    /// Euclidean distance from `p` to the closed domain (zero inside).
    pub fn distance_to(&self, p: &[f64]) -> f64 {
        match self {
            Domain::Rectangle(r) => r.distance_outside(p),
            Domain::RectangleWithHole { outer, hole } => {
                if hole.strictly_contains(p) {
                    hole.distance_inside(p)
                } else {
                    outer.distance_outside(p)
                }
            }
            Domain::Interval { lo, hi } => (lo - p[0]).max(0.0).max(p[0] - hi),
            Domain::ConvexPolygon(v) => (-polygon_signed_boundary_distance(v, p)).max(0.0),
        }
    }

    fn sample_point<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let (lo, hi) = self.bounding_box();
        loop {
            let p: Vec<f64> =
                lo.iter().zip(&hi).map(|(a, b)| a + (b - a) * rng.random::<f64>()).collect();
            let accept = match self {
                Domain::Rectangle(_) | Domain::Interval { .. } => true,
                _ => self.contains(&p, 0.0),
            };
            if accept {
                return p;
            }
        }
    }
}

fn cross(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn polygon_area(v: &[[f64; 2]]) -> f64 {
    let k = v.len();
    0.5 * (0..k).map(|i| v[i][0] * v[(i + 1) % k][1] - v[(i + 1) % k][0] * v[i][1]).sum::<f64>()
}

fn segment_distance(a: [f64; 2], b: [f64; 2], p: &[f64]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0);
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

/// Positive inside (distance to boundary), negative outside (distance to polygon).
fn polygon_signed_boundary_distance(v: &[[f64; 2]], p: &[f64]) -> f64 {
    let k = v.len();
    let mut inside = true;
    let mut best = f64::INFINITY;
    for i in 0..k {
        let (a, b) = (v[i], v[(i + 1) % k]);
        if cross(a, b, [p[0], p[1]]) < 0.0 {
            inside = false;
        }
        best = best.min(segment_distance(a, b, p));
    }
    if inside {
        best
    } else {
        -best
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Sampled(u64),
    Constructed(String),
    Loaded(String),
}

/// Latent positions together with the domain they were drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    pub coords: Coords,
    pub domain: Domain,
    pub provenance: Provenance,
}

impl PointConfig {
    pub fn new(coords: Coords, domain: Domain, provenance: Provenance) -> Result<Self> {
        if coords.n() < 3 {
            return Err(Error::invalid(format!("need at least 3 points, got {}", coords.n())));
        }
        if coords.dim() != domain.dim() {
            return Err(Error::DimensionMismatch { expected: domain.dim(), got: coords.dim() });
        }
        if let Some(i) = (0..coords.n()).find(|&i| !domain.contains(coords.row(i), MEMBERSHIP_TOL)) {
            return Err(Error::invalid(format!("point {i} lies outside the domain")));
        }
        Ok(PointConfig { coords, domain, provenance })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.coords.n()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.dim()
    }
}

/// Draws `n` iid uniform points on `domain`. Holed domains use rejection.
pub fn sample_uniform(domain: &Domain, n: usize, seed: u64) -> Result<PointConfig> {
    if n < 3 {
        return Err(Error::invalid(format!("need at least 3 points, got {n}")));
    }
    if !(domain.measure() > 0.0) {
        return Err(Error::DegenerateDomain("domain has zero measure".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(STREAM_SAMPLE);
    let mut data = Vec::with_capacity(n * domain.dim());
    for _ in 0..n {
        data.extend(domain.sample_point(&mut rng));
    }
    PointConfig::new(Coords::new(n, domain.dim(), data)?, domain.clone(), Provenance::Sampled(seed))
}

/// Concatenation of independent uniform samples on several sub-domains, all
/// inside `envelope`. Part `k` draws from its own stream.
pub fn sample_mixture(parts: &[(Domain, usize)], envelope: &Domain, seed: u64) -> Result<PointConfig> {
    let total: usize = parts.iter().map(|p| p.1).sum();
    if total < 3 {
        return Err(Error::invalid(format!("need at least 3 points, got {total}")));
    }
    let mut data = Vec::with_capacity(total * envelope.dim());
    for (k, (dom, count)) in parts.iter().enumerate() {
        if dom.dim() != envelope.dim() {
            return Err(Error::DimensionMismatch { expected: envelope.dim(), got: dom.dim() });
        }
        if !(dom.measure() > 0.0) {
            return Err(Error::DegenerateDomain(format!("mixture part {k} has zero measure")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(STREAM_SAMPLE + 1 + k as u64);
        for _ in 0..*count {
            data.extend(dom.sample_point(&mut rng));
        }
    }
    PointConfig::new(
        Coords::new(total, envelope.dim(), data)?,
        envelope.clone(),
        Provenance::Sampled(seed),
    )
}

/// Symmetric matrix of exact pairwise Euclidean distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_coords(coords: &Coords) -> Self {
        let n = coords.n();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = coords.dist(i, j);
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        DistanceMatrix { n, values }
    }

    /// Wraps a dense matrix after checking symmetry, zero diagonal and sign.
    pub fn from_dense(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::SizeMismatch { left: values.len(), right: n * n });
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::invalid(format!("nonzero diagonal at {i}")));
            }
            for j in (i + 1)..n {
                let (a, b) = (values[i * n + j], values[j * n + i]);
                if a != b || !(a >= 0.0) || !a.is_finite() {
                    return Err(Error::invalid(format!("entry ({i},{j}) not symmetric, finite and nonnegative")));
                }
            }
        }
        Ok(DistanceMatrix { n, values })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

pub fn pairwise_distances(config: &PointConfig) -> DistanceMatrix {
    DistanceMatrix::from_coords(&config.coords)
}

/// Nearest-point queries against a fixed point set: sorted scan in 1D,
/// bucket grid in 2D, brute force otherwise.
pub(crate) enum NearestIndex<'a> {
    Line(Vec<f64>),
    Grid {
        coords: &'a Coords,
        lo: [f64; 2],
        cell: f64,
        shape: [usize; 2],
        starts: Vec<usize>,
        items: Vec<usize>,
    },
    Brute(&'a Coords),
}

impl<'a> NearestIndex<'a> {
    /// `extent` must cover every future query point.
    pub(crate) fn new(coords: &'a Coords, extent: Option<(&[f64], &[f64])>) -> Self {
        match coords.dim() {
            1 => {
                let mut v: Vec<f64> = coords.as_slice().to_vec();
                v.sort_by(|a, b| a.total_cmp(b));
                NearestIndex::Line(v)
            }
            2 => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for r in coords.rows() {
                    for k in 0..2 {
                        lo[k] = lo[k].min(r[k]);
                        hi[k] = hi[k].max(r[k]);
                    }
                }
                if let Some((elo, ehi)) = extent {
                    for k in 0..2 {
                        lo[k] = lo[k].min(elo[k]);
                        hi[k] = hi[k].max(ehi[k]);
                    }
                }
                let area = ((hi[0] - lo[0]) * (hi[1] - lo[1])).max(f64::MIN_POSITIVE);
                let mut cell = (area / coords.n().max(1) as f64).sqrt() * 1.5;
                if !(cell > 0.0) {
                    cell = 1.0;
                }
                let shape = [
                    ((hi[0] - lo[0]) / cell).floor() as usize + 1,
                    ((hi[1] - lo[1]) / cell).floor() as usize + 1,
                ];
                let cell_of = |p: &[f64]| -> usize {
                    let cx = (((p[0] - lo[0]) / cell).floor() as usize).min(shape[0] - 1);
                    let cy = (((p[1] - lo[1]) / cell).floor() as usize).min(shape[1] - 1);
                    cy * shape[0] + cx
                };
                let mut counts = vec![0usize; shape[0] * shape[1] + 1];
                for r in coords.rows() {
                    counts[cell_of(r) + 1] += 1;
                }
                for c in 1..counts.len() {
                    counts[c] += counts[c - 1];
                }
                let starts = counts.clone();
                let mut fill = counts;
                let mut items = vec![0usize; coords.n()];
                for (i, r) in coords.rows().enumerate() {
                    let c = cell_of(r);
                    items[fill[c]] = i;
                    fill[c] += 1;
                }
                NearestIndex::Grid { coords, lo, cell, shape, starts, items }
            }
            _ => NearestIndex::Brute(coords),
        }
    }

    pub(crate) fn nearest_distance(&self, q: &[f64]) -> f64 {
        match self {
            NearestIndex::Line(v) => {
                let k = v.partition_point(|&x| x < q[0]);
                let mut best = f64::INFINITY;
                if k < v.len() {
                    best = best.min((v[k] - q[0]).abs());
                }
                if k > 0 {
                    best = best.min((v[k - 1] - q[0]).abs());
                }
                best
            }
            NearestIndex::Brute(c) => c.rows().map(|r| euclid(r, q)).fold(f64::INFINITY, f64::min),
            NearestIndex::Grid { coords, lo, cell, shape, starts, items } => {
                let cx = (((q[0] - lo[0]) / cell).floor().max(0.0) as usize).min(shape[0] - 1);
                let cy = (((q[1] - lo[1]) / cell).floor().max(0.0) as usize).min(shape[1] - 1);
                let mut best = f64::INFINITY;
                let max_ring = shape[0].max(shape[1]);
                for ring in 0..=max_ring {
                    let x0 = cx.saturating_sub(ring);
                    let x1 = (cx + ring).min(shape[0] - 1);
                    let y0 = cy.saturating_sub(ring);
                    let y1 = (cy + ring).min(shape[1] - 1);
                    for y in y0..=y1 {
                        for x in x0..=x1 {
                            let on_ring = x + ring == cx || x == cx + ring || y + ring == cy || y == cy + ring;
                            if !on_ring {
                                continue;
                            }
                            let c = y * shape[0] + x;
                            for &i in &items[starts[c]..starts[c + 1]] {
                                best = best.min(euclid(coords.row(i), q));
                            }
                        }
                    }
                    // every unvisited point is at least `ring * cell` away
                    if best <= ring as f64 * cell {
                        break;
                    }
                }
                best
            }
        }
    }
}

/// Region over which the coverage radius is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageRegion {
    Domain,
    ConvexHull,
}

/// Certified bracket around the coverage radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageBracket {
    pub lower: f64,
    pub upper: f64,
    /// Largest per-axis grid spacing actually used (never above the request).
    pub grid_step: f64,
}

impl CoverageBracket {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }
}

/// Convex hull of a 1D or 2D point set as a domain (interval or CCW polygon).
pub fn convex_hull(coords: &Coords) -> Result<Domain> {
    match coords.dim() {
        1 => {
            let (lo, hi) = coords
                .as_slice()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
            Domain::interval_between(lo, hi)
        }
        2 => {
            let mut pts: Vec<[f64; 2]> = coords.rows().map(|r| [r[0], r[1]]).collect();
            pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
            pts.dedup();
            if pts.len() < 3 {
                return Err(Error::Empty("convex hull has empty interior".into()));
            }
            // Andrew's monotone chain
            let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
            for pass in 0..2 {
                let start = hull.len();
                let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
                    if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
                for &p in iter {
                    while hull.len() >= start + 2
                        && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
                    {
                        hull.pop();
                    }
                    hull.push(p);
                }
                hull.pop();
            }
            Domain::convex_polygon(hull)
                .map_err(|_| Error::Empty("convex hull has empty interior".into()))
        }
        d => Err(Error::invalid(format!("convex hull unsupported in dimension {d}"))),
    }
}

/// Brackets `sup_{x in region} min_i ‖x − x_i‖` on a regular grid.
///
/// `lower` is the maximum over grid nodes inside the region. `upper` adds the
/// half-diagonal `h` of a grid cell to the maximum over nodes within `h` of
/// the region, which covers every region point. On rectangles and intervals
/// the grid is aligned with the boundary, so `upper = lower + h`.
pub fn coverage_radius(
    config: &PointConfig,
    region: CoverageRegion,
    grid_step: f64,
) -> Result<CoverageBracket> {
    if !(grid_step > 0.0) {
        return Err(Error::invalid("grid step must be positive"));
    }
    let hull;
    let dom = match region {
        CoverageRegion::Domain => &config.domain,
        CoverageRegion::ConvexHull => {
            hull = convex_hull(&config.coords)?;
            &hull
        }
    };
    coverage_over(&config.coords, dom, grid_step)
}

pub(crate) fn coverage_over(coords: &Coords, dom: &Domain, grid_step: f64) -> Result<CoverageBracket> {
    if !(dom.measure() > 0.0) {
        return Err(Error::Empty("coverage region is empty".into()));
    }
    let (lo, hi) = dom.bounding_box();
    let dim = lo.len();
    if dim != coords.dim() {
        return Err(Error::DimensionMismatch { expected: dim, got: coords.dim() });
    }
    let counts: Vec<usize> =
        (0..dim).map(|k| (((hi[k] - lo[k]) / grid_step).ceil() as usize).max(1)).collect();
    let steps: Vec<f64> = (0..dim).map(|k| (hi[k] - lo[k]) / counts[k] as f64).collect();
    let h = 0.5 * steps.iter().map(|s| s * s).sum::<f64>().sqrt();
    let index = NearestIndex::new(coords, Some((&lo, &hi)));

    let total: usize = counts.iter().map(|c| c + 1).product();
    let mut lower = f64::NEG_INFINITY;
    let mut near = f64::NEG_INFINITY;
    let mut node = vec![0.0; dim];
    for flat in 0..total {
        let mut rem = flat;
        for k in 0..dim {
            let t = rem % (counts[k] + 1);
            rem /= counts[k] + 1;
            node[k] = if t == counts[k] { hi[k] } else { lo[k] + t as f64 * steps[k] };
        }
        let gap = dom.distance_to(&node);
        if gap > h {
            continue;
        }
        let f = index.nearest_distance(&node);
        if dom.contains(&node, MEMBERSHIP_TOL) {
            lower = lower.max(f);
        }
        near = near.max(f);
    }
    if lower == f64::NEG_INFINITY {
        return Err(Error::Empty("no grid node falls inside the region".into()));
    }
    let grid_step = steps.iter().cloned().fold(0.0, f64::max);
    Ok(CoverageBracket { lower, upper: near + h, grid_step })
}

/// Flags points whose distance to the domain boundary exceeds `u`.
pub fn erosion_membership(config: &PointConfig, u: f64) -> Result<Vec<bool>> {
    if !(u >= 0.0) {
        return Err(Error::invalid("erosion depth must be nonnegative"));
    }
    boundary_distances(config).map(|d| d.into_iter().map(|b| b > u).collect())
}

/// Per-point distance to the domain boundary.
pub fn boundary_distances(config: &PointConfig) -> Result<Vec<f64>> {
    config.coords.rows().map(|p| config.domain.boundary_distance(p)).collect()
}

/// Two 1D configurations on `[0,1]` that induce the same indicator graph.
#[derive(Debug, Clone)]
pub struct MinimaxPair {
    pub first: PointConfig,
    pub second: PointConfig,
    /// `r (n − 1)`.
    pub m: usize,
    pub eta: f64,
    /// Radius strictly between the largest `m`-span and the smallest
    /// `(m+1)`-span of both configurations; both indicator graphs at this
    /// radius equal `1{|i − j| ≤ m}`.
    pub link_radius: f64,
}

impl MinimaxPair {
    /// Closed-form `d¹ᵢⱼ − d²ᵢⱼ` for 0-based `i < j`.
    pub fn gap(&self, i: usize, j: usize) -> f64 {
        let n = self.first.n() as f64;
        let (a, b) = ((i + 1) as f64, (j + 1) as f64);
        (b - a) / (n - 1.0) * self.eta * (a + b - n - 1.0) / (1.0 - self.eta * (n - 1.0))
    }
}

/// Default perturbation for [`minimax_pair`]: `1 / (2n + 2m(n − m))`.
///
/// Any `η < 1/(2m(n−m) − 4m + 2n − 3)` keeps the last `(m+1)`-span of the
/// second configuration longer than its first `m`-span, which is what makes
/// a common indicator radius exist.
pub fn minimax_eta(n: usize, m: usize) -> f64 {
    1.0 / (2.0 * n as f64 + 2.0 * (m * (n - m)) as f64)
}

pub fn minimax_pair(n: usize, r: f64) -> Result<MinimaxPair> {
    let m = minimax_m(n, r)?;
    minimax_pair_with_eta(n, r, minimax_eta(n, m))
}

fn minimax_m(n: usize, r: f64) -> Result<usize> {
    if n < 5 {
        return Err(Error::invalid(format!("minimax pair needs n >= 5, got {n}")));
    }
    if !(r > 0.0 && r <= 0.5) {
        return Err(Error::invalid(format!("minimax pair needs 0 < r <= 1/2, got {r}")));
    }
    let mf = r * (n - 1) as f64;
    let m = mf.round();
    if (mf - m).abs() > 1e-9 || m < 1.0 {
        return Err(Error::invalid(format!("r (n - 1) = {mf} is not a positive integer")));
    }
    Ok(m as usize)
}

pub fn minimax_pair_with_eta(n: usize, r: f64, eta: f64) -> Result<MinimaxPair> {
    let m = minimax_m(n, r)?;
    let nf = n as f64;
    if !(eta >= 0.0 && eta <= 1.0 / (2.0 * nf - 3.0)) {
        return Err(Error::invalid(format!("eta = {eta} breaks monotonicity")));
    }
    let first: Vec<f64> = (0..n).map(|i| i as f64 / (nf - 1.0)).collect();
    let denom = (nf - 1.0) * (1.0 - eta * (nf - 1.0));
    let second: Vec<f64> = (0..n).map(|i| i as f64 * (1.0 - eta * i as f64) / denom).collect();

    let span = |x: &[f64], k: usize| -> (f64, f64) {
        let spans = (0..n - k).map(|i| x[i + k] - x[i]);
        spans.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s), b.max(s)))
    };
    let max_m = span(&first, m).1.max(span(&second, m).1);
    let min_m1 = span(&first, m + 1).0.min(span(&second, m + 1).0);
    if !(max_m < min_m1) {
        return Err(Error::invalid(format!(
            "eta = {eta} admits no common indicator radius (max {m}-span {max_m} >= min {}-span {min_m1})",
            m + 1
        )));
    }
    let dom = Domain::interval(1.0)?;
    let wrap = |x: Vec<f64>, name: &str| {
        PointConfig::new(Coords::new(n, 1, x)?, dom.clone(), Provenance::Constructed(name.into()))
    };
    Ok(MinimaxPair {
        first: wrap(first, "minimax-uniform")?,
        second: wrap(second, "minimax-perturbed")?,
        m,
        eta,
        link_radius: 0.5 * (max_m + min_m1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_square() -> Domain {
        Domain::rectangle(1.0, 1.0).unwrap()
    }

    #[test]
    fn sample_rectangle_stays_inside() {
        let dom = Domain::rectangle(2.0, 1.0).unwrap();
        let cfg = sample_uniform(&dom, 5000, 7).unwrap();
        assert_eq!(cfg.n(), 5000);
        assert!(cfg.coords.rows().all(|p| p[0] >= 0.0 && p[0] <= 2.0 && p[1] >= 0.0 && p[1] <= 1.0));
        assert_eq!(cfg, sample_uniform(&dom, 5000, 7).unwrap());
    }

    #[test]
    fn sample_interval_minimal() {
        let cfg = sample_uniform(&Domain::interval(1.0).unwrap(), 3, 0).unwrap();
        assert_eq!((cfg.n(), cfg.dim()), (3, 1));
        assert!(cfg.coords.as_slice().iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert!(sample_uniform(&Domain::interval(1.0).unwrap(), 2, 0).is_err());
    }

    #[test]
    fn sample_avoids_hole() {
        let outer = Rect::new([0.0, 0.0], [2.0, 1.0]).unwrap();
        let hole = Rect::new([0.5, 0.25], [1.5, 0.75]).unwrap();
        let dom = Domain::rectangle_with_hole(outer, hole).unwrap();
        let cfg = sample_uniform(&dom, 1000, 1).unwrap();
        for p in cfg.coords.rows() {
            assert!(!(p[0] > 0.5 && p[0] < 1.5 && p[1] > 0.25 && p[1] < 0.75));
        }
    }

    #[test]
    fn degenerate_domains_rejected() {
        assert!(Domain::rectangle(0.0, 1.0).is_err());
        assert!(Domain::interval(0.0).is_err());
        let outer = Rect::new([0.0, 0.0], [1.0, 1.0]).unwrap();
        let hole = Rect::new([0.5, 0.5], [1.5, 0.9]).unwrap();
        assert!(Domain::rectangle_with_hole(outer, hole).is_err());
        // clockwise
        assert!(Domain::convex_polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).is_err());
        assert!(Domain::convex_polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).is_ok());
    }

    #[test]
    fn polygon_sampling_and_membership() {
        let tri = Domain::convex_polygon(vec![[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]]).unwrap();
        assert_relative_eq!(tri.measure(), 2.0);
        let cfg = sample_uniform(&tri, 200, 3).unwrap();
        assert!(cfg.coords.rows().all(|p| p[0] + p[1] <= 2.0 + 1e-12));
        assert_relative_eq!(tri.boundary_distance(&[0.5, 0.5]).unwrap(), 0.5);
    }

    #[test]
    fn distances_345() {
        let c = Coords::from_rows(&[[0.0, 0.0], [3.0, 4.0], [1.0, 0.0]]).unwrap();
        let d = DistanceMatrix::from_coords(&c);
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(1, 0), 5.0);
        assert!((0..3).all(|i| d.get(i, i) == 0.0));
    }

    #[test]
    fn distances_match_scalar_recompute() {
        let cfg = sample_uniform(&unit_square(), 10, 11).unwrap();
        let d = pairwise_distances(&cfg);
        for i in 0..10 {
            for j in 0..10 {
                let (a, b) = (cfg.coords.row(i), cfg.coords.row(j));
                let want = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                assert_relative_eq!(d.get(i, j), want, epsilon = 1e-15);
                for k in 0..10 {
                    assert!(d.get(i, k) <= d.get(i, j) + d.get(j, k) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn coverage_square_corners_and_center() {
        let c = Coords::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]]).unwrap();
        let cfg = PointConfig::new(c, unit_square(), Provenance::Constructed("corners".into())).unwrap();
        let b = coverage_radius(&cfg, CoverageRegion::Domain, 0.001).unwrap();
        assert!(b.contains(0.5), "{b:?}");
        assert!(b.upper - b.lower <= 0.001);
        let h = coverage_radius(&cfg, CoverageRegion::ConvexHull, 0.001).unwrap();
        assert!(h.contains(0.5), "{h:?}");
    }

    #[test]
    fn coverage_single_center_point() {
        // PointConfig needs 3 points; stack them at the center
        let c = Coords::from_rows(&[[0.5, 0.5], [0.5, 0.5], [0.5, 0.5]]).unwrap();
        let cfg = PointConfig::new(c, unit_square(), Provenance::Constructed("center".into())).unwrap();
        let b = coverage_radius(&cfg, CoverageRegion::Domain, 0.01).unwrap();
        assert!(b.contains(std::f64::consts::FRAC_1_SQRT_2), "{b:?}");
        assert!(coverage_radius(&cfg, CoverageRegion::ConvexHull, 0.01).is_err());
        assert!(coverage_radius(&cfg, CoverageRegion::Domain, 0.0).is_err());
    }

    #[test]
    fn coverage_interval() {
        let c = Coords::new(3, 1, vec![0.0, 0.5, 1.0]).unwrap();
        let cfg = PointConfig::new(c, Domain::interval(1.0).unwrap(), Provenance::Constructed("l".into())).unwrap();
        let b = coverage_radius(&cfg, CoverageRegion::Domain, 0.01).unwrap();
        assert!(b.contains(0.25));
    }

    #[test]
    fn coverage_refined_grid_inside_bracket() {
        let dom = Domain::rectangle(2.0, 1.0).unwrap();
        let cfg = sample_uniform(&dom, 5000, 7).unwrap();
        let coarse = coverage_radius(&cfg, CoverageRegion::Domain, 0.01).unwrap();
        let fine = coverage_radius(&cfg, CoverageRegion::Domain, 0.005).unwrap();
        assert!(coarse.contains(fine.lower), "{coarse:?} vs {fine:?}");
        assert!(fine.lower >= coarse.lower);
    }

    #[test]
    fn hull_of_square_points() {
        let c = Coords::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.5, 0.5], [1.0, 1.0], [0.0, 1.0], [0.5, 0.0]])
            .unwrap();
        match convex_hull(&c).unwrap() {
            Domain::ConvexPolygon(v) => {
                assert_eq!(v.len(), 4);
                assert_relative_eq!(polygon_area(&v), 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn erosion_basic() {
        let c = Coords::from_rows(&[[0.5, 0.5], [0.05, 0.5], [0.9, 0.9]]).unwrap();
        let cfg = PointConfig::new(c, unit_square(), Provenance::Constructed("e".into())).unwrap();
        assert_eq!(erosion_membership(&cfg, 0.4).unwrap(), vec![true, false, false]);
        assert!(!erosion_membership(&cfg, 0.1).unwrap()[1]);
        assert!(erosion_membership(&cfg, -1.0).is_err());
    }

    #[test]
    fn erosion_matches_edge_oracle() {
        let dom = Domain::rectangle(4.0, 1.0).unwrap();
        let cfg = sample_uniform(&dom, 100, 5).unwrap();
        let flags = erosion_membership(&cfg, 0.2).unwrap();
        let edges = [([0.0, 0.0], [4.0, 0.0]), ([4.0, 0.0], [4.0, 1.0]), ([4.0, 1.0], [0.0, 1.0]), ([0.0, 1.0], [0.0, 0.0])];
        for (p, flag) in cfg.coords.rows().zip(flags) {
            let d = edges.iter().map(|&(a, b)| segment_distance(a, b, p)).fold(f64::INFINITY, f64::min);
            assert_eq!(flag, d > 0.2);
        }
    }

    #[test]
    fn erosion_counts_hole_boundary() {
        let outer = Rect::new([0.0, 0.0], [2.0, 1.0]).unwrap();
        let hole = Rect::new([0.5, 0.25], [1.5, 0.75]).unwrap();
        let dom = Domain::rectangle_with_hole(outer, hole).unwrap();
        assert_relative_eq!(dom.boundary_distance(&[1.0, 0.125]).unwrap(), 0.125);
        assert_relative_eq!(dom.boundary_distance(&[0.3, 0.5]).unwrap(), 0.2);
    }

    #[test]
    fn minimax_small_case() {
        let p = minimax_pair(5, 0.5).unwrap();
        assert_eq!(p.m, 2);
        assert_eq!(p.first.coords.as_slice(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let x = p.second.coords.as_slice();
        assert_eq!(x[0], 0.0);
        assert_relative_eq!(x[4], 1.0, epsilon = 1e-15);
        assert!(x.windows(2).all(|w| w[1] > w[0]));
        assert!(minimax_pair(5, 0.3).is_err());
        assert!(minimax_pair(4, 0.5).is_err());
    }

    #[test]
    fn minimax_zero_eta_coincides() {
        let p = minimax_pair_with_eta(9, 0.25, 0.0).unwrap();
        assert_eq!(p.first.coords, p.second.coords);
    }

    #[test]
    fn minimax_gap_formula() {
        let p = minimax_pair(41, 0.25).unwrap();
        let n = 41;
        let bound = ((n as f64) / 2f64.sqrt() + 1.0).ceil() as usize;
        for i in 0..n {
            for j in (i + 1)..n {
                let d1 = p.first.coords.dist(i, j);
                let d2 = p.second.coords.dist(i, j);
                assert!((d1 - d2 - p.gap(i, j)).abs() < 1e-12);
                if (i + 1) + (j + 1) <= bound {
                    assert!(d1 < d2);
                }
            }
        }
    }

    #[test]
    fn minimax_literal_eta_small_n() {
        // at n = 5 the literal 1/(2n + m(n − m)) = 1/16 still works
        let p = minimax_pair_with_eta(5, 0.5, 1.0 / 16.0).unwrap();
        assert_eq!(p.m, 2);
        let x = p.second.coords.as_slice();
        let expect = |i: f64| i * (1.0 - i / 16.0) / (4.0 * (1.0 - 4.0 / 16.0));
        for (i, xi) in x.iter().enumerate() {
            assert_relative_eq!(*xi, expect(i as f64), epsilon = 1e-15);
        }
    }

    #[test]
    fn minimax_same_graph_at_link_radius() {
        let p = minimax_pair(9, 0.25).unwrap();
        assert_eq!(p.m, 2);
        use crate::linkgraph::{generate_graph, LinkFunction};
        let graphs = |radius: f64| {
            let link = LinkFunction::indicator(radius).unwrap();
            (generate_graph(&p.first, &link, 0), generate_graph(&p.second, &link, 0))
        };
        let (a, b) = graphs(p.link_radius);
        assert_eq!(a, b);
        assert_eq!(a.edge_count(), 8 + 7);
        // at exactly r the perturbed configuration's first m-span is longer than r
        let (a, b) = graphs(0.25);
        assert_eq!(a.edge_count(), 15);
        assert!(b.edge_count() < 15);
    }

    #[test]
    fn larger_eta_has_no_common_radius() {
        // 1 / (2n + m(n - m)) is too large once n is moderately big
        let (n, m) = (401usize, 100usize);
        let eta = 1.0 / (2.0 * n as f64 + (m * (n - m)) as f64);
        assert!(minimax_pair_with_eta(n, 0.25, eta).is_err());
        assert!(minimax_pair(n, 0.25).is_ok());
    }
}
