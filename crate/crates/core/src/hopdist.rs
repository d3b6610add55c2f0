//! All-pairs hop distances, scaled estimates and bound checks.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{boundary_distances, DistanceMatrix, PointConfig};
use crate::linkgraph::{iter_bits, symmetrize_union, Adjacency, KnnAdjacency};

/// Sentinel for "no path".
pub const INF_HOPS: u16 = u16::MAX;

/// Absolute tolerance on residuals in every bound check.
pub const BOUND_TOL: f64 = 1e-9;

/// Symmetric matrix of graph distances, `INF_HOPS` across components.
#[derive(Clone, PartialEq, Eq)]
pub struct HopMatrix {
    n: usize,
    hops: Vec<u16>,
}

impl std::fmt::Debug for HopMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HopMatrix").field("n", &self.n).field("diameter", &self.diameter()).finish()
    }
}

impl HopMatrix {
    pub fn from_raw(n: usize, hops: Vec<u16>) -> Result<Self> {
        if hops.len() != n * n {
            return Err(Error::SizeMismatch { left: hops.len(), right: n * n });
        }
        for i in 0..n {
            if hops[i * n + i] != 0 {
                return Err(Error::invalid(format!("nonzero diagonal at {i}")));
            }
            for j in (i + 1)..n {
                if hops[i * n + j] != hops[j * n + i] {
                    return Err(Error::invalid(format!("hop matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(HopMatrix { n, hops })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Raw entry; `INF_HOPS` means disconnected.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u16 {
        self.hops[i * self.n + j]
    }

    #[inline]
    pub fn hops(&self, i: usize, j: usize) -> Option<u32> {
        match self.get(i, j) {
            INF_HOPS => None,
            h => Some(u32::from(h)),
        }
    }

    pub fn as_slice(&self) -> &[u16] {
        &self.hops
    }

    pub fn row(&self, i: usize) -> &[u16] {
        &self.hops[i * self.n..(i + 1) * self.n]
    }

    /// Largest finite entry.
    pub fn diameter(&self) -> u16 {
        self.hops.iter().copied().filter(|&h| h != INF_HOPS).max().unwrap_or(0)
    }

    pub fn disconnected_pairs(&self) -> usize {
        (0..self.n)
            .map(|i| self.row(i)[i + 1..].iter().filter(|&&h| h == INF_HOPS).count())
            .sum()
    }

    pub fn is_connected(&self) -> bool {
        self.hops.iter().all(|&h| h != INF_HOPS)
    }
}

/// Breadth-first search from every node over bit-packed rows.
pub fn all_pairs_hops(adj: &Adjacency) -> Result<HopMatrix> {
    let n = adj.n();
    if n >= INF_HOPS as usize {
        return Err(Error::invalid(format!("n = {n} too large for 16-bit hop counts")));
    }
    let words = adj.words_per_row();
    let mut hops = vec![INF_HOPS; n * n];
    if n == 0 {
        return Ok(HopMatrix { n, hops });
    }
    hops.par_chunks_mut(n).enumerate().for_each_init(
        || (vec![0u64; words], vec![0u64; words], Vec::new(), Vec::new()),
        |(visited, next, frontier, scratch), (s, row)| {
            visited.iter_mut().for_each(|w| *w = 0);
            visited[s / 64] |= 1 << (s % 64);
            row[s] = 0;
            frontier.clear();
            frontier.push(s);
            let mut level: u16 = 0;
            while !frontier.is_empty() {
                level += 1;
                next.iter_mut().for_each(|w| *w = 0);
                for &u in frontier.iter() {
                    for (a, b) in next.iter_mut().zip(adj.row_bits(u)) {
                        *a |= b;
                    }
                }
                for (a, v) in next.iter_mut().zip(visited.iter_mut()) {
                    *a &= !*v;
                    *v |= *a;
                }
                scratch.clear();
                scratch.extend(iter_bits(next));
                for &w in scratch.iter() {
                    row[w] = level;
                }
                std::mem::swap(frontier, scratch);
            }
        },
    );
    Ok(HopMatrix { n, hops })
}

/// One shortest path from `i` to `j`, endpoints included.
pub fn shortest_path(adj: &Adjacency, i: usize, j: usize) -> Option<Vec<usize>> {
    let n = adj.n();
    let mut parent = vec![usize::MAX; n];
    parent[i] = i;
    let mut queue = std::collections::VecDeque::from([i]);
    while let Some(u) = queue.pop_front() {
        if u == j {
            break;
        }
        for w in adj.neighbors(u) {
            if parent[w] == usize::MAX {
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    if parent[j] == usize::MAX {
        return None;
    }
    let mut path = vec![j];
    while *path.last().unwrap() != i {
        path.push(parent[*path.last().unwrap()]);
    }
    path.reverse();
    Some(path)
}

/// `d̂ᵢⱼ = scale · δᵢⱼ`, infinite across components.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateMatrix {
    pub scale: f64,
    hops: HopMatrix,
}

impl EstimateMatrix {
    #[inline]
    pub fn n(&self) -> usize {
        self.hops.n()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.hops.get(i, j) {
            INF_HOPS => f64::INFINITY,
            h => self.scale * f64::from(h),
        }
    }

    pub fn hop_matrix(&self) -> &HopMatrix {
        &self.hops
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n();
        (0..n * n).map(|k| self.get(k / n, k % n)).collect()
    }
}

pub fn scale_hops(hops: &HopMatrix, r: f64) -> Result<EstimateMatrix> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("scale must be positive, got {r}")));
    }
    Ok(EstimateMatrix { scale: r, hops: hops.clone() })
}

/// Upper bound shape `a (ε/r)^γ d + b r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundForm {
    pub a: f64,
    pub gamma: f64,
    pub b: f64,
}

impl BoundForm {
    pub fn eval(&self, eps: f64, r: f64, d: f64) -> f64 {
        self.a * (eps / r).powf(self.gamma) * d + self.b * r
    }
}

/// Outcome of comparing scaled hop distances against true distances.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub pairs: usize,
    pub connected_pairs: usize,
    pub disconnected_pairs: usize,
    pub eps: f64,
    pub r: f64,
    pub form: BoundForm,
    /// Whether the theorem's hypothesis on `ε/r` held, so violations count.
    pub hypothesis_met: bool,
    pub lower_checked_pairs: usize,
    pub lower_violations: usize,
    pub upper_violations: usize,
    pub min_residual: f64,
    pub max_residual: f64,
    pub mean_residual: f64,
    /// max of `|d̂ − d| / d` over connected pairs with `d > 0`.
    pub max_relative_error: f64,
    /// Smallest `s` with `d̂ − d ≤ s · bound(d)` on every connected pair.
    pub fitted_scale: f64,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.lower_violations == 0 && (!self.hypothesis_met || self.upper_violations == 0)
    }
}

fn check_sizes(est: &EstimateMatrix, truth: &DistanceMatrix) -> Result<()> {
    if est.n() != truth.n() {
        return Err(Error::SizeMismatch { left: est.n(), right: truth.n() });
    }
    Ok(())
}

struct Accum {
    pairs: usize,
    connected: usize,
    lower_checked: usize,
    lower_viol: usize,
    upper_viol: usize,
    min_res: f64,
    max_res: f64,
    sum_res: f64,
    max_rel: f64,
    fitted: f64,
}

impl Accum {
    fn new() -> Self {
        Accum {
            pairs: 0,
            connected: 0,
            lower_checked: 0,
            lower_viol: 0,
            upper_viol: 0,
            min_res: f64::INFINITY,
            max_res: f64::NEG_INFINITY,
            sum_res: 0.0,
            max_rel: 0.0,
            fitted: 0.0,
        }
    }

    fn merge(mut self, o: Accum) -> Accum {
        self.pairs += o.pairs;
        self.connected += o.connected;
        self.lower_checked += o.lower_checked;
        self.lower_viol += o.lower_viol;
        self.upper_viol += o.upper_viol;
        self.min_res = self.min_res.min(o.min_res);
        self.max_res = self.max_res.max(o.max_res);
        self.sum_res += o.sum_res;
        self.max_rel = self.max_rel.max(o.max_rel);
        self.fitted = self.fitted.max(o.fitted);
        self
    }
}

/// Shared pair loop; `lower_applies(i, j, d)` restricts the `d̂ ≥ d` check.
fn evaluate<F>(est: &EstimateMatrix, truth: &DistanceMatrix, eps: f64, r: f64, form: BoundForm, hypothesis_met: bool, lower_applies: F) -> BoundReport
where
    F: Fn(usize, usize, f64) -> bool + Sync,
{
    let n = est.n();
    // rows are reduced sequentially so float sums do not depend on scheduling
    let rows: Vec<Accum> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = Accum::new();
            for j in (i + 1)..n {
                acc.pairs += 1;
                let dh = est.get(i, j);
                if !dh.is_finite() {
                    continue;
                }
                acc.connected += 1;
                let d = truth.get(i, j);
                let res = dh - d;
                acc.min_res = acc.min_res.min(res);
                acc.max_res = acc.max_res.max(res);
                acc.sum_res += res;
                if d > 0.0 {
                    acc.max_rel = acc.max_rel.max(res.abs() / d);
                }
                if lower_applies(i, j, d) {
                    acc.lower_checked += 1;
                    if res < -BOUND_TOL {
                        acc.lower_viol += 1;
                    }
                }
                let bound = form.eval(eps, r, d);
                if res > bound + BOUND_TOL {
                    acc.upper_viol += 1;
                }
                acc.fitted = acc.fitted.max(res / bound);
            }
            acc
        })
        .collect();
    let acc = rows.into_iter().fold(Accum::new(), Accum::merge);
    BoundReport {
        n,
        pairs: acc.pairs,
        connected_pairs: acc.connected,
        disconnected_pairs: acc.pairs - acc.connected,
        eps,
        r,
        form,
        hypothesis_met,
        lower_checked_pairs: acc.lower_checked,
        lower_violations: acc.lower_viol,
        upper_violations: acc.upper_viol,
        min_residual: if acc.connected > 0 { acc.min_res } else { 0.0 },
        max_residual: if acc.connected > 0 { acc.max_res } else { 0.0 },
        mean_residual: if acc.connected > 0 { acc.sum_res / acc.connected as f64 } else { 0.0 },
        max_relative_error: acc.max_rel,
        fitted_scale: acc.fitted,
    }
}

fn check_eps_r(eps: f64, r: f64) -> Result<()> {
    if !(r > 0.0) || !(eps >= 0.0) {
        return Err(Error::invalid(format!("need r > 0 and eps >= 0, got r={r}, eps={eps}")));
    }
    Ok(())
}

/// `0 ≤ d̂ − d ≤ 4(ε/r) d + r`; the upper side only counts when `ε ≤ r/4`.
pub fn check_simple_bound(est: &EstimateMatrix, truth: &DistanceMatrix, eps: f64, r: f64) -> Result<BoundReport> {
    check_sizes(est, truth)?;
    check_eps_r(eps, r)?;
    let form = BoundForm { a: 4.0, gamma: 1.0, b: 1.0 };
    Ok(evaluate(est, truth, eps, r, form, eps <= r / 4.0, |_, _, _| true))
}

/// `0 ≤ d̂ − d ≤ C₂ [(ε/r)^{1/(1+α)} d + r]`; `fitted_scale` is the smallest `C₂`.
pub fn check_general_bound(
    est: &EstimateMatrix,
    truth: &DistanceMatrix,
    eps: f64,
    r: f64,
    alpha: f64,
) -> Result<BoundReport> {
    check_sizes(est, truth)?;
    check_eps_r(eps, r)?;
    if !(alpha >= 0.0) {
        return Err(Error::invalid("alpha must be nonnegative"));
    }
    let form = BoundForm { a: 1.0, gamma: 1.0 / (1.0 + alpha), b: 1.0 };
    // no numeric C₂ exists to test against, so upper violations are report-only
    Ok(evaluate(est, truth, eps, r, form, false, |_, _, _| true))
}

/// kNN bounds: `d̂ − d ≤ 8(ε/r) d + r` on all pairs, and `d̂ ≥ d` on pairs
/// with `d ≥ 2r` whose endpoints both lie deeper than `d/2` in the domain.
pub fn check_knn_bounds(
    est: &EstimateMatrix,
    truth: &DistanceMatrix,
    config: &PointConfig,
    eps: f64,
    r: f64,
) -> Result<BoundReport> {
    check_sizes(est, truth)?;
    check_eps_r(eps, r)?;
    if config.n() != est.n() {
        return Err(Error::SizeMismatch { left: config.n(), right: est.n() });
    }
    let depth = boundary_distances(config)?;
    let form = BoundForm { a: 8.0, gamma: 1.0, b: 1.0 };
    let one_dim = config.dim() == 1;
    Ok(evaluate(est, truth, eps, r, form, true, |i, j, d| {
        one_dim || (d >= 2.0 * r && depth[i] > d / 2.0 && depth[j] > d / 2.0)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasReport {
    pub max_ratio: f64,
    pub pair_count: usize,
}

impl BiasReport {
    pub fn bias_confirmed(&self) -> bool {
        self.max_ratio < 1.0
    }
}

/// Largest `d̂/d` over pairs with `d ≥ threshold_d`.
pub fn check_boundary_bias(est: &EstimateMatrix, truth: &DistanceMatrix, threshold_d: f64) -> Result<BiasReport> {
    check_sizes(est, truth)?;
    if !(threshold_d > 0.0) {
        return Err(Error::invalid("threshold must be positive"));
    }
    let n = est.n();
    let (max_ratio, pair_count) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = f64::NEG_INFINITY;
            let mut count = 0;
            for j in (i + 1)..n {
                let d = truth.get(i, j);
                if d >= threshold_d {
                    count += 1;
                    best = best.max(est.get(i, j) / d);
                }
            }
            (best, count)
        })
        .reduce(|| (f64::NEG_INFINITY, 0), |a, b| (a.0.max(b.0), a.1 + b.1));
    if pair_count == 0 {
        return Err(Error::Empty(format!("no pairs at distance >= {threshold_d}")));
    }
    Ok(BiasReport { max_ratio, pair_count })
}

/// Checks, on a 1D configuration, that every pair is joined by a shortest
/// path of the union-symmetrized kNN graph that is monotone in position.
///
/// Forward-only BFS (moves to strictly larger sorted rank) must reach every
/// later node in the unconstrained hop count.
pub fn monotone_path_check(config_1d: &PointConfig, knn: &KnnAdjacency) -> Result<bool> {
    if config_1d.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: config_1d.dim() });
    }
    let n = config_1d.n();
    if knn.n != n {
        return Err(Error::SizeMismatch { left: knn.n, right: n });
    }
    let x = config_1d.coords.as_slice();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let mut rank = vec![0usize; n];
    for (k, &i) in order.iter().enumerate() {
        rank[i] = k;
    }
    let adj = symmetrize_union(knn);
    let hops = all_pairs_hops(&adj)?;
    let ok = (0..n).into_par_iter().all(|s| {
        let mut dist = vec![u32::MAX; n];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for w in adj.neighbors(u) {
                if rank[w] > rank[u] && dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        (0..n).filter(|&t| rank[t] > rank[s]).all(|t| match hops.hops(s, t) {
            Some(h) => dist[t] == h,
            None => dist[t] == u32::MAX,
        })
    });
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_uniform, Coords, Domain, Provenance};
    use crate::linkgraph::{generate_graph, knn_graph, LinkFunction};

    fn floyd_warshall(adj: &Adjacency) -> Vec<u32> {
        let n = adj.n();
        let inf = u32::MAX / 4;
        let mut d = vec![inf; n * n];
        for i in 0..n {
            d[i * n + i] = 0;
            for j in adj.neighbors(i) {
                d[i * n + j] = 1;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i * n + k] + d[k * n + j];
                    if via < d[i * n + j] {
                        d[i * n + j] = via;
                    }
                }
            }
        }
        d.into_iter().map(|v| if v >= inf { u32::from(INF_HOPS) } else { v }).collect()
    }

    #[test]
    fn path_graph_hops() {
        let a = Adjacency::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let h = all_pairs_hops(&a).unwrap();
        assert_eq!(h.hops(0, 3), Some(3));
        assert_eq!(shortest_path(&a, 0, 3), Some(vec![0, 1, 2, 3]));
    }

    #[test]
    fn disconnected_is_infinite() {
        let a = Adjacency::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let h = all_pairs_hops(&a).unwrap();
        assert_eq!(h.hops(0, 2), None);
        assert_eq!(h.disconnected_pairs(), 4);
        assert!(shortest_path(&a, 0, 3).is_none());
        let e = scale_hops(&h, 0.5).unwrap();
        assert_eq!(e.get(1, 3), f64::INFINITY);
        assert_eq!(e.get(0, 1), 0.5);
    }

    #[test]
    fn bfs_matches_floyd_warshall() {
        let cfg = sample_uniform(&Domain::rectangle(1.0, 1.0).unwrap(), 12, 77).unwrap();
        let a = generate_graph(&cfg, &LinkFunction::indicator(0.4).unwrap(), 0);
        let h = all_pairs_hops(&a).unwrap();
        let fw = floyd_warshall(&a);
        assert!(h.as_slice().iter().zip(&fw).all(|(&x, &y)| u32::from(x) == y));
        // crosses a word boundary
        let cfg = sample_uniform(&Domain::rectangle(1.0, 1.0).unwrap(), 130, 5).unwrap();
        let a = generate_graph(&cfg, &LinkFunction::indicator(0.15).unwrap(), 0);
        let h = all_pairs_hops(&a).unwrap();
        let fw = floyd_warshall(&a);
        assert!(h.as_slice().iter().zip(&fw).all(|(&x, &y)| u32::from(x) == y));
    }

    #[test]
    fn scaling() {
        let a = Adjacency::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let h = all_pairs_hops(&a).unwrap();
        let e = scale_hops(&h, 0.2).unwrap();
        assert!((e.get(0, 3) - 0.6).abs() < 1e-15);
        assert!(scale_hops(&h, 0.0).is_err());
    }

    fn collinear(xs: &[f64]) -> PointConfig {
        PointConfig::new(
            Coords::new(xs.len(), 1, xs.to_vec()).unwrap(),
            Domain::interval_between(0.0, xs.iter().cloned().fold(0.0, f64::max)).unwrap(),
            Provenance::Constructed("line".into()),
        )
        .unwrap()
    }

    #[test]
    fn exact_estimate_satisfies_simple_bound() {
        // points at 0, r, 2r, 3r: the indicator graph is a path and d̂ = d
        let r = 0.25;
        let cfg = collinear(&[0.0, 0.25, 0.5, 0.75]);
        let a = generate_graph(&cfg, &LinkFunction::indicator(r).unwrap(), 0);
        let est = scale_hops(&all_pairs_hops(&a).unwrap(), r).unwrap();
        let truth = DistanceMatrix::from_coords(&cfg.coords);
        let rep = check_simple_bound(&est, &truth, 0.0, r).unwrap();
        assert_eq!((rep.lower_violations, rep.upper_violations), (0, 0));
        assert!(rep.min_residual.abs() < 1e-12 && rep.max_residual.abs() < 1e-12);
    }

    #[test]
    fn just_over_radius_is_tight() {
        let r = 0.25;
        let cfg = collinear(&[0.0, 0.125, 0.25 + 1e-6, 0.375 + 1e-6]);
        let a = generate_graph(&cfg, &LinkFunction::indicator(r).unwrap(), 0);
        let est = scale_hops(&all_pairs_hops(&a).unwrap(), r).unwrap();
        let truth = DistanceMatrix::from_coords(&cfg.coords);
        // d(0,2) = r + 1e-6 needs two hops
        assert!((est.get(0, 2) - truth.get(0, 2) - (r - 1e-6)).abs() < 1e-12);
        let rep = check_simple_bound(&est, &truth, 0.0625, r).unwrap();
        assert!(rep.hypothesis_met && rep.passed());
        assert!(rep.max_residual > r - 1e-5);
    }

    #[test]
    fn general_bound_alpha_zero_matches_simple_shape() {
        let cfg = sample_uniform(&Domain::rectangle(1.0, 1.0).unwrap(), 300, 3).unwrap();
        let r = 0.2;
        let a = generate_graph(&cfg, &LinkFunction::indicator(r).unwrap(), 0);
        let est = scale_hops(&all_pairs_hops(&a).unwrap(), r).unwrap();
        let truth = DistanceMatrix::from_coords(&cfg.coords);
        let g = check_general_bound(&est, &truth, 0.05, r, 0.0).unwrap();
        assert_eq!(g.form.gamma, 1.0);
        let s = check_simple_bound(&est, &truth, 0.05, r).unwrap();
        assert_eq!(g.lower_violations, 0);
        assert!(g.fitted_scale <= 4.0 * s.fitted_scale.max(0.25) + 1e-12);
    }

    #[test]
    fn bias_errors_and_identity() {
        let cfg = collinear(&[0.0, 0.25, 0.5, 0.75]);
        let a = generate_graph(&cfg, &LinkFunction::indicator(0.25).unwrap(), 0);
        let est = scale_hops(&all_pairs_hops(&a).unwrap(), 0.25).unwrap();
        let truth = DistanceMatrix::from_coords(&cfg.coords);
        assert!(check_boundary_bias(&est, &truth, 5.0).is_err());
        let b = check_boundary_bias(&est, &truth, 0.1).unwrap();
        assert!((b.max_ratio - 1.0).abs() < 1e-12);
        assert_eq!(b.pair_count, 6);
    }

    #[test]
    fn monotone_paths_simple_cases() {
        let cfg = collinear(&[0.0, 0.1, 0.3, 0.35, 0.9, 1.0]);
        let k1 = knn_graph(&cfg, 1).unwrap();
        assert!(monotone_path_check(&cfg, &k1).unwrap());
        let kfull = knn_graph(&cfg, 5).unwrap();
        assert!(monotone_path_check(&cfg, &kfull).unwrap());
    }

    #[test]
    fn one_dimensional_knn_never_underestimates() {
        let dom = Domain::interval(1.0).unwrap();
        let cfg = sample_uniform(&dom, 200, 9).unwrap();
        let knn = knn_graph(&cfg, 6).unwrap();
        let adj = symmetrize_union(&knn);
        let r = knn.radii.iter().cloned().fold(0.0, f64::max);
        let est = scale_hops(&all_pairs_hops(&adj).unwrap(), r).unwrap();
        let truth = DistanceMatrix::from_coords(&cfg.coords);
        let rep = check_knn_bounds(&est, &truth, &cfg, 0.0, r).unwrap();
        assert_eq!(rep.lower_checked_pairs, rep.connected_pairs);
        assert_eq!(rep.lower_violations, 0);
    }
}
