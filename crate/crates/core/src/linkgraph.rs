//! Link functions, random geometric graphs, kNN graphs, edge thinning and
//! common-neighbor denoising.
//!
//! Every random edge outcome is drawn from a ChaCha8 stream keyed by
//! `(seed, tag, i)` at word position `2j`, so a pair's coin flip does not
//! depend on iteration order or on how rows are split across threads.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Coords, Domain, PointConfig};

const TAG_GENERATE: u64 = 2;
const TAG_THIN: u64 = 3;

/// Non-increasing map from latent distance to edge probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkFunction {
    /// `1{d ≤ r}`
    Indicator { r: f64 },
    /// `c0 (1 − d/r)^alpha` on `[0, r]`, zero beyond.
    PolynomialEdge { r: f64, c0: f64, alpha: f64 },
    /// `p 1{d ≤ r} + q 1{d > r}` with `0 < q < p ≤ 1`.
    TwoLevel { r: f64, p: f64, q: f64 },
    /// `p 1{d ≤ r}`
    ScaledIndicator { r: f64, p: f64 },
}

impl LinkFunction {
    pub fn indicator(r: f64) -> Result<Self> {
        check_radius(r)?;
        Ok(LinkFunction::Indicator { r })
    }

    pub fn polynomial_edge(r: f64, c0: f64, alpha: f64) -> Result<Self> {
        check_radius(r)?;
        if !(c0 > 0.0 && c0 <= 1.0) || !(alpha >= 0.0) {
            return Err(Error::invalid(format!("need 0 < c0 <= 1 and alpha >= 0, got c0={c0}, alpha={alpha}")));
        }
        Ok(LinkFunction::PolynomialEdge { r, c0, alpha })
    }

    pub fn two_level(r: f64, p: f64, q: f64) -> Result<Self> {
        check_radius(r)?;
        if !(q > 0.0 && q < p && p <= 1.0) {
            return Err(Error::invalid(format!("need 0 < q < p <= 1, got p={p}, q={q}")));
        }
        Ok(LinkFunction::TwoLevel { r, p, q })
    }

    pub fn scaled_indicator(r: f64, p: f64) -> Result<Self> {
        check_radius(r)?;
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::invalid(format!("need 0 < p <= 1, got {p}")));
        }
        Ok(LinkFunction::ScaledIndicator { r, p })
    }

    pub fn radius(&self) -> f64 {
        match *self {
            LinkFunction::Indicator { r }
            | LinkFunction::PolynomialEdge { r, .. }
            | LinkFunction::TwoLevel { r, .. }
            | LinkFunction::ScaledIndicator { r, .. } => r,
        }
    }

    /// Support radius when the link is compactly supported.
    pub fn support(&self) -> Option<f64> {
        match self {
            LinkFunction::TwoLevel { .. } => None,
            _ => Some(self.radius()),
        }
    }

    pub fn eval(&self, d: f64) -> f64 {
        match *self {
            LinkFunction::Indicator { r } => f64::from(u8::from(d <= r)),
            LinkFunction::ScaledIndicator { r, p } => if d <= r { p } else { 0.0 },
            LinkFunction::TwoLevel { r, p, q } => if d <= r { p } else { q },
            LinkFunction::PolynomialEdge { r, c0, alpha } => {
                if d > r {
                    0.0
                } else if alpha == 0.0 {
                    c0
                } else {
                    c0 * (1.0 - d / r).powf(alpha)
                }
            }
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("link radius must be positive, got {r}")))
    }
}

pub fn evaluate_link(link: &LinkFunction, d: f64) -> f64 {
    link.eval(d)
}

/// Symmetric adjacency matrix with zero diagonal, one bit per entry.
#[derive(Clone, PartialEq, Eq)]
pub struct Adjacency {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl std::fmt::Debug for Adjacency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Adjacency").field("n", &self.n).field("edges", &self.edge_count()).finish()
    }
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64);
        Adjacency { n, words, bits: vec![0; n * words] }
    }

    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Result<Self> {
        let mut a = Adjacency::empty(n);
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::invalid(format!("edge ({i},{j}) out of range for n={n}")));
            }
            if i == j {
                return Err(Error::invalid(format!("self loop at {i}")));
            }
            a.insert(i, j);
        }
        Ok(a)
    }

    fn from_upper_lists(n: usize, lists: &[Vec<u32>]) -> Self {
        let mut a = Adjacency::empty(n);
        for (i, l) in lists.iter().enumerate() {
            for &j in l {
                a.insert(i, j as usize);
            }
        }
        a
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of `u64` words per row.
    #[inline]
    pub fn words_per_row(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row_bits(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    /// Adds the undirected edge `{i, j}`.
    pub fn insert(&mut self, i: usize, j: usize) {
        debug_assert!(i != j);
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
        self.bits[j * self.words + i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] &= !(1 << (j % 64));
        self.bits[j * self.words + i / 64] &= !(1 << (i % 64));
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row_bits(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row_bits(i))
    }

    /// Edges as `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.neighbors(i).filter(move |&j| j > i).map(move |j| (i, j)))
    }

    pub fn is_subgraph_of(&self, other: &Adjacency) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| !self.has_edge(i, i) && self.neighbors(i).all(|j| self.has_edge(j, i)))
    }

    /// Connected component label per node, labels in order of first node.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for w in self.neighbors(u) {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.components().iter().all(|&c| c == 0)
    }
}

pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            }
        })
    })
}

/// Uniform draws keyed by `(tag, i, j)` for a fixed seed.
struct KeyedUniform {
    base: ChaCha8Rng,
}

impl KeyedUniform {
    fn new(seed: u64) -> Self {
        KeyedUniform { base: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn row(&self, tag: u64, i: usize) -> RowUniform {
        let mut rng = self.base.clone();
        rng.set_stream((tag << 48) | i as u64);
        RowUniform { rng }
    }
}

struct RowUniform {
    rng: ChaCha8Rng,
}

impl RowUniform {
    fn at(&mut self, j: usize) -> f64 {
        self.rng.set_word_pos(2 * j as u128);
        self.rng.random::<f64>()
    }
}

/// Draws `W(i,j) ~ Bernoulli(φ(‖xᵢ − xⱼ‖))` independently for `i < j`.
pub fn generate_graph(config: &PointConfig, link: &LinkFunction, seed: u64) -> Adjacency {
    generate_from_coords(&config.coords, link, seed)
}

pub fn generate_from_coords(coords: &Coords, link: &LinkFunction, seed: u64) -> Adjacency {
    let n = coords.n();
    let keyed = KeyedUniform::new(seed);
    let lists: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = keyed.row(TAG_GENERATE, i);
            let xi = coords.row(i);
            let mut out = Vec::new();
            for j in (i + 1)..n {
                let p = link.eval(crate::geometry::euclid(xi, coords.row(j)));
                let hit = if p >= 1.0 {
                    true
                } else if p <= 0.0 {
                    false
                } else {
                    rng.at(j) < p
                };
                if hit {
                    out.push(j as u32);
                }
            }
            out
        })
        .collect();
    Adjacency::from_upper_lists(n, &lists)
}

/// Keeps each edge independently with probability `keep_prob`.
pub fn couple_thin(adj: &Adjacency, keep_prob: f64, seed: u64) -> Result<Adjacency> {
    if !(keep_prob > 0.0 && keep_prob <= 1.0) {
        return Err(Error::invalid(format!("keep probability must be in (0,1], got {keep_prob}")));
    }
    let keyed = KeyedUniform::new(seed);
    let lists: Vec<Vec<u32>> = (0..adj.n())
        .into_par_iter()
        .map(|i| {
            let mut rng = keyed.row(TAG_THIN, i);
            adj.neighbors(i)
                .filter(|&j| j > i && rng.at(j) < keep_prob)
                .map(|j| j as u32)
                .collect()
        })
        .collect();
    Ok(Adjacency::from_upper_lists(adj.n(), &lists))
}

/// Directed κ-nearest-neighbor graph.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnAdjacency {
    pub n: usize,
    pub kappa: usize,
    /// `out_neighbors[i]` sorted by (distance, index).
    pub out_neighbors: Vec<Vec<usize>>,
    /// Distance from `i` to its κ-th nearest neighbor.
    pub radii: Vec<f64>,
}

impl KnnAdjacency {
    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.out_neighbors[i].contains(&j)
    }
}

fn by_dist_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

fn check_kappa(n: usize, kappa: usize) -> Result<()> {
    if kappa == 0 || kappa >= n {
        return Err(Error::invalid(format!("kappa must be in [1, n-1] = [1, {}], got {kappa}", n.saturating_sub(1))));
    }
    Ok(())
}

/// κ nearest neighbors of every point, ties broken by smaller index.
pub fn knn_graph(config: &PointConfig, kappa: usize) -> Result<KnnAdjacency> {
    knn_from_coords(&config.coords, kappa)
}

pub fn knn_from_coords(coords: &Coords, kappa: usize) -> Result<KnnAdjacency> {
    let n = coords.n();
    check_kappa(n, kappa)?;
    let rows: Vec<(Vec<usize>, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = coords.row(i);
            let mut cand: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (crate::geometry::euclid(xi, coords.row(j)), j))
                .collect();
            cand.select_nth_unstable_by(kappa - 1, by_dist_then_index);
            cand.truncate(kappa);
            cand.sort_by(by_dist_then_index);
            let radius = cand[kappa - 1].0;
            (cand.into_iter().map(|c| c.1).collect(), radius)
        })
        .collect();
    let (out_neighbors, radii) = rows.into_iter().unzip();
    Ok(KnnAdjacency { n, kappa, out_neighbors, radii })
}

/// `rᵢ`: distance from each point to its κ-th nearest other point.
pub fn knn_radii(config: &PointConfig, kappa: usize) -> Result<Vec<f64>> {
    Ok(knn_graph(config, kappa)?.radii)
}

/// How a directed kNN graph is turned into an undirected one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Symmetrization {
    /// Edge when either endpoint lists the other.
    #[default]
    Union,
    /// Edge when both endpoints list each other.
    Mutual,
}

pub fn symmetrize(knn: &KnnAdjacency, mode: Symmetrization) -> Adjacency {
    let mut a = Adjacency::empty(knn.n);
    for (i, outs) in knn.out_neighbors.iter().enumerate() {
        for &j in outs {
            let keep = match mode {
                Symmetrization::Union => true,
                Symmetrization::Mutual => knn.out_neighbors[j].contains(&i),
            };
            if keep {
                a.insert(i, j);
            }
        }
    }
    a
}

pub fn symmetrize_union(knn: &KnnAdjacency) -> Adjacency {
    symmetrize(knn, Symmetrization::Union)
}

/// Convention for `ω` in the kNN scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OmegaConvention {
    /// `ω = |Ω| / β_v` with `β_v` the unit-ball volume.
    #[default]
    VolumeRatio,
    /// `ω = |Ω|`.
    AreaOnly,
}

/// Volume of the unit ball in `R^v`.
pub fn unit_ball_volume(v: usize) -> f64 {
    match v {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(v - 2) * 2.0 * std::f64::consts::PI / v as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnScale {
    pub omega: f64,
    pub r_circ: f64,
    pub eps: f64,
    pub r: f64,
}

/// `r◦ = (ωκ/n)^{1/v}`, `ε = C₁ (log n / n)^{1/v}`, `r = r◦ + ε`.
pub fn knn_scale(
    domain: &Domain,
    n: usize,
    kappa: usize,
    c1: f64,
    v: usize,
    convention: OmegaConvention,
) -> Result<KnnScale> {
    if kappa == 0 || n <= kappa {
        return Err(Error::invalid(format!("need 1 <= kappa < n, got kappa={kappa}, n={n}")));
    }
    if v == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if !(c1 >= 0.0) {
        return Err(Error::invalid("C1 must be nonnegative"));
    }
    let measure = domain.measure();
    let omega = match convention {
        OmegaConvention::VolumeRatio => measure / unit_ball_volume(v),
        OmegaConvention::AreaOnly => measure,
    };
    let nf = n as f64;
    let inv_v = 1.0 / v as f64;
    let r_circ = (omega * kappa as f64 / nf).powf(inv_v);
    let eps = c1 * (nf.ln() / nf).powf(inv_v);
    Ok(KnnScale { omega, r_circ, eps, r: r_circ + eps })
}

/// Re-declares edges by thresholding the Jaccard ratio `Nᵢⱼ / (Nᵢ + Nⱼ − Nᵢⱼ)`.
pub fn common_neighbor_denoise(adj: &Adjacency, tau: f64) -> Result<Adjacency> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::invalid(format!("tau must be in (0,1], got {tau}")));
    }
    let n = adj.n();
    let degree: Vec<usize> = (0..n).map(|i| adj.degree(i)).collect();
    let lists: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let ri = adj.row_bits(i);
            ((i + 1)..n)
                .filter(|&j| {
                    let common: usize =
                        ri.iter().zip(adj.row_bits(j)).map(|(a, b)| (a & b).count_ones() as usize).sum();
                    let union = degree[i] + degree[j] - common;
                    union > 0 && common as f64 / union as f64 >= tau
                })
                .map(|j| j as u32)
                .collect()
        })
        .collect();
    Ok(Adjacency::from_upper_lists(n, &lists))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{pairwise_distances, sample_uniform, Provenance};
    use approx::assert_relative_eq;

    fn line(xs: &[f64]) -> PointConfig {
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        PointConfig::new(
            Coords::new(xs.len(), 1, xs.to_vec()).unwrap(),
            Domain::interval_between(lo, hi).unwrap(),
            Provenance::Constructed("line".into()),
        )
        .unwrap()
    }

    #[test]
    fn link_values() {
        let ind = LinkFunction::indicator(0.2).unwrap();
        assert_eq!(ind.eval(0.1), 1.0);
        assert_eq!(ind.eval(0.3), 0.0);
        assert_eq!(LinkFunction::polynomial_edge(1.0, 1.0, 1.0).unwrap().eval(0.5), 0.5);
        assert_eq!(LinkFunction::two_level(1.0, 0.8, 0.1).unwrap().eval(2.0), 0.1);
        assert_eq!(LinkFunction::scaled_indicator(1.0, 0.5).unwrap().eval(0.9), 0.5);
        assert!(LinkFunction::two_level(1.0, 0.1, 0.1).is_err());
        assert!(LinkFunction::indicator(0.0).is_err());
        assert!(LinkFunction::polynomial_edge(1.0, 1.5, 1.0).is_err());
    }

    #[test]
    fn links_are_nonincreasing_probabilities() {
        let links = [
            LinkFunction::indicator(0.5).unwrap(),
            LinkFunction::polynomial_edge(0.5, 0.7, 2.5).unwrap(),
            LinkFunction::two_level(0.5, 0.9, 0.05).unwrap(),
            LinkFunction::scaled_indicator(0.5, 0.3).unwrap(),
        ];
        for l in links {
            let mut prev = f64::INFINITY;
            for k in 0..200 {
                let v = l.eval(k as f64 * 0.005);
                assert!((0.0..=1.0).contains(&v) && v <= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn indicator_graph_is_thresholding() {
        let cfg = sample_uniform(&Domain::rectangle(1.0, 1.0).unwrap(), 150, 4).unwrap();
        let d = pairwise_distances(&cfg);
        let a = generate_graph(&cfg, &LinkFunction::indicator(0.15).unwrap(), 99);
        for i in 0..150 {
            for j in 0..150 {
                assert_eq!(a.has_edge(i, j), i != j && d.get(i, j) <= 0.15);
            }
        }
        assert!(a.is_symmetric());
    }

    #[test]
    fn coincident_points_connect() {
        let cfg = line(&[0.0, 0.0, 1.0]);
        let a = generate_graph(&cfg, &LinkFunction::polynomial_edge(0.5, 1.0, 3.0).unwrap(), 1);
        assert!(a.has_edge(0, 1));
        assert!(!a.has_edge(0, 2));
    }

    #[test]
    fn scaled_indicator_edge_fraction() {
        let cfg = sample_uniform(&Domain::rectangle(1.0, 1.0).unwrap(), 200, 8).unwrap();
        let link = LinkFunction::scaled_indicator(0.3, 0.5).unwrap();
        let a = generate_graph(&cfg, &link, 21);
        let (mut close, mut hit) = (0usize, 0usize);
        for i in 0..200 {
            for j in (i + 1)..200 {
                if cfg.coords.dist(i, j) <= 0.3 {
                    close += 1;
                    hit += usize::from(a.has_edge(i, j));
                } else {
                    assert!(!a.has_edge(i, j));
                }
            }
        }
        let frac = hit as f64 / close as f64;
        let sigma = (0.25 / close as f64).sqrt();
        assert!((frac - 0.5).abs() < 4.0 * sigma, "frac={frac} close={close}");
        assert_eq!(a, generate_graph(&cfg, &link, 21));
    }

    #[test]
    fn thinning_is_subgraph_with_expected_rate() {
        let n = 300;
        let full = Adjacency::from_edges(n, (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))).unwrap();
        assert_eq!(couple_thin(&full, 1.0, 5).unwrap(), full);
        // take a ~10^4-edge subgraph
        let base = couple_thin(&full, 10_000.0 / full.edge_count() as f64, 1).unwrap();
        let thin = couple_thin(&base, 0.5, 2).unwrap();
        assert!(thin.is_subgraph_of(&base));
        let m = base.edge_count() as f64;
        let frac = thin.edge_count() as f64 / m;
        assert!((frac - 0.5).abs() < 4.0 * (0.25 / m).sqrt(), "frac={frac}");
        assert!(couple_thin(&base, 0.0, 2).is_err());
    }

    #[test]
    fn coupled_thinning_emulates_lower_probability() {
        // p = 0.5 thinned with keep 0.2/0.5 behaves like p = 0.2
        let cfg = sample_uniform(&Domain::rectangle(1.0, 1.0).unwrap(), 400, 2).unwrap();
        let half = generate_graph(&cfg, &LinkFunction::scaled_indicator(0.2, 0.5).unwrap(), 3);
        let fifth = couple_thin(&half, 0.2 / 0.5, 4).unwrap();
        let close = (0..400)
            .flat_map(|i| ((i + 1)..400).map(move |j| (i, j)))
            .filter(|&(i, j)| cfg.coords.dist(i, j) <= 0.2)
            .count() as f64;
        let frac = fifth.edge_count() as f64 / close;
        assert!((frac - 0.2).abs() < 4.0 * (0.16 / close).sqrt(), "frac={frac}");
    }

    #[test]
    fn knn_collinear_tie_break() {
        let cfg = line(&[0.0, 1.0, 2.0, 3.0]);
        let k = knn_graph(&cfg, 1).unwrap();
        assert_eq!(k.out_neighbors, vec![vec![1], vec![0], vec![1], vec![2]]);
        let full = knn_graph(&cfg, 3).unwrap();
        assert!(full.out_neighbors.iter().all(|o| o.len() == 3));
        assert!(knn_graph(&cfg, 0).is_err());
        assert!(knn_graph(&cfg, 4).is_err());
    }

    #[test]
    fn knn_matches_sort_oracle() {
        let cfg = sample_uniform(&Domain::rectangle(1.0, 1.0).unwrap(), 50, 13).unwrap();
        let k = knn_graph(&cfg, 5).unwrap();
        for i in 0..50 {
            let mut all: Vec<(f64, usize)> =
                (0..50).filter(|&j| j != i).map(|j| (cfg.coords.dist(i, j), j)).collect();
            all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let want: Vec<usize> = all[..5].iter().map(|p| p.1).collect();
            assert_eq!(k.out_neighbors[i], want);
            assert_eq!(k.radii[i], all[4].0);
            for &j in &k.out_neighbors[i] {
                assert!(cfg.coords.dist(i, j) <= k.radii[i]);
            }
        }
    }

    #[test]
    fn knn_radii_small_cases() {
        let cfg = line(&[0.0, 1.0, 2.0]);
        assert_eq!(knn_radii(&cfg, 2).unwrap()[0], 2.0);
        assert_eq!(knn_radii(&cfg, 1).unwrap(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn union_symmetrization() {
        let knn = KnnAdjacency {
            n: 3,
            kappa: 1,
            out_neighbors: vec![vec![1], vec![2], vec![1]],
            radii: vec![1.0; 3],
        };
        let a = symmetrize_union(&knn);
        assert_eq!(a.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        let m = symmetrize(&knn, Symmetrization::Mutual);
        assert_eq!(m.edges().collect::<Vec<_>>(), vec![(1, 2)]);
    }

    #[test]
    fn union_matches_dense_or() {
        let cfg = sample_uniform(&Domain::rectangle(1.0, 1.0).unwrap(), 50, 3).unwrap();
        let knn = knn_graph(&cfg, 4).unwrap();
        let mut dense = vec![false; 2500];
        for i in 0..50 {
            for &j in &knn.out_neighbors[i] {
                dense[i * 50 + j] = true;
            }
        }
        let want = (0..50)
            .flat_map(|i| ((i + 1)..50).map(move |j| (i, j)))
            .filter(|&(i, j)| dense[i * 50 + j] || dense[j * 50 + i])
            .count();
        let a = symmetrize_union(&knn);
        assert_eq!(a.edge_count(), want);
        assert!(a.is_symmetric());
    }

    #[test]
    fn knn_scale_rectangle() {
        let dom = Domain::rectangle(4.0, 1.0).unwrap();
        let s = knn_scale(&dom, 5000, 25, 0.0, 2, OmegaConvention::VolumeRatio).unwrap();
        assert_relative_eq!(s.omega, 4.0 / std::f64::consts::PI, epsilon = 1e-15);
        assert_relative_eq!(s.r_circ, (100.0 / (std::f64::consts::PI * 5000.0)).sqrt(), epsilon = 1e-15);
        assert!((s.r_circ - 0.07979).abs() < 1e-5);
        assert_eq!(s.r, s.r_circ);
        let lit = knn_scale(&dom, 5000, 25, 0.0, 2, OmegaConvention::AreaOnly).unwrap();
        assert_relative_eq!(lit.omega, 4.0);
        let line = knn_scale(&Domain::interval(1.0).unwrap(), 100, 50, 0.0, 1, OmegaConvention::VolumeRatio).unwrap();
        assert_relative_eq!(line.omega, 0.5);
        assert_relative_eq!(line.r_circ, 0.25);
        let with_eps = knn_scale(&dom, 5000, 25, 1.0, 2, OmegaConvention::VolumeRatio).unwrap();
        assert_relative_eq!(with_eps.eps, (5000f64.ln() / 5000.0).sqrt());
    }

    #[test]
    fn unit_balls() {
        assert_relative_eq!(unit_ball_volume(2), std::f64::consts::PI);
        assert_relative_eq!(unit_ball_volume(3), 4.0 / 3.0 * std::f64::consts::PI);
    }

    #[test]
    fn jaccard_triangle() {
        let tri = Adjacency::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(common_neighbor_denoise(&tri, 0.3).unwrap(), tri);
        assert_eq!(common_neighbor_denoise(&tri, 0.4).unwrap().edge_count(), 0);
        assert!(common_neighbor_denoise(&tri, 0.0).is_err());
    }

    #[test]
    fn jaccard_small_tau_links_common_neighbors() {
        // path 0-1-2 plus isolated 3
        let p = Adjacency::from_edges(4, [(0, 1), (1, 2)]).unwrap();
        let d = common_neighbor_denoise(&p, 1e-9).unwrap();
        assert_eq!(d.edges().collect::<Vec<_>>(), vec![(0, 2)]);
    }

    #[test]
    fn jaccard_matches_triple_loop() {
        let cfg = sample_uniform(&Domain::rectangle(1.0, 1.0).unwrap(), 100, 6).unwrap();
        let a = generate_graph(&cfg, &LinkFunction::two_level(0.2, 0.8, 0.05).unwrap(), 7);
        for tau in [0.1, 0.25, 0.5] {
            let got = common_neighbor_denoise(&a, tau).unwrap();
            for i in 0..100 {
                for j in (i + 1)..100 {
                    let common = (0..100).filter(|&k| a.has_edge(i, k) && a.has_edge(j, k)).count();
                    let union = a.degree(i) + a.degree(j) - common;
                    let want = union > 0 && common as f64 / union as f64 >= tau;
                    assert_eq!(got.has_edge(i, j), want, "({i},{j}) tau={tau}");
                }
            }
        }
    }
}
