//! Maximum variance unfolding of a unit-edge graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embed::{classical_mds, Dissimilarity};
use crate::error::{Error, Result};
use crate::geometry::{Coords, DistanceMatrix};
use crate::hopdist::{all_pairs_hops, scale_hops, HopMatrix};
use crate::linkgraph::Adjacency;

/// Penalty weights and the number of ascent steps spent at each.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltySchedule {
    pub mus: Vec<f64>,
    pub steps: usize,
}

impl Default for PenaltySchedule {
    fn default() -> Self {
        PenaltySchedule { mus: vec![1.0, 10.0, 100.0, 1000.0], steps: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvuTraceRow {
    pub stage: usize,
    pub iter: usize,
    /// Penalized objective `Σ‖yᵢ−yⱼ‖²/N − μ Σ((ℓₑ−1)₊)²`, the quantity being ascended.
    pub objective: f64,
    pub max_violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MvuSolution {
    pub coords: Coords,
    /// `Σ_{i<j} ‖yᵢ − yⱼ‖²`.
    pub objective: f64,
    /// max over edges of `(‖yᵢ−yⱼ‖ − 1)₊`.
    pub max_edge_violation: f64,
    /// Objective of the feasible starting layout.
    pub initial_objective: f64,
    pub trace: Vec<MvuTraceRow>,
}

impl MvuSolution {
    /// Wraps an arbitrary layout, measuring it against the edges of `adj`.
    pub fn from_coords(mut coords: Coords, adj: &Adjacency) -> Result<Self> {
        if coords.n() != adj.n() {
            return Err(Error::SizeMismatch { left: coords.n(), right: adj.n() });
        }
        coords.center();
        let edges: Vec<(usize, usize)> = adj.edges().collect();
        let objective = spread(&coords);
        let max_edge_violation = max_violation(&coords, &edges);
        Ok(MvuSolution { coords, objective, max_edge_violation, initial_objective: objective, trace: Vec::new() })
    }

    /// The induced metric `γ*ᵢⱼ = ‖yᵢ − yⱼ‖`.
    pub fn gamma(&self) -> DistanceMatrix {
        DistanceMatrix::from_coords(&self.coords)
    }
}

/// `Σ_{i<j} ‖yᵢ−yⱼ‖² = n Σ ‖yᵢ − ȳ‖²`.
fn spread(y: &Coords) -> f64 {
    let c = y.centroid();
    let s: f64 = y.rows().map(|p| p.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()).sum();
    y.n() as f64 * s
}

fn max_violation(y: &Coords, edges: &[(usize, usize)]) -> f64 {
    edges.iter().map(|&(i, j)| (y.dist(i, j) - 1.0).max(0.0)).fold(0.0, f64::max)
}

fn max_edge_length(y: &Coords, edges: &[(usize, usize)]) -> f64 {
    edges.iter().map(|&(i, j)| y.dist(i, j)).fold(0.0, f64::max)
}

struct Problem<'a> {
    n: usize,
    dim: usize,
    edges: &'a [(usize, usize)],
    pairs: f64,
}

impl Problem<'_> {
    fn value(&self, y: &[f64], mu: f64) -> f64 {
        let (n, d) = (self.n, self.dim);
        let mut mean = vec![0.0; d];
        for p in y.chunks_exact(d) {
            mean.iter_mut().zip(p).for_each(|(m, x)| *m += x);
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let f: f64 = y.chunks_exact(d).map(|p| p.iter().zip(&mean).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()).sum();
        let pen: f64 = self
            .edges
            .iter()
            .map(|&(i, j)| {
                let l = dist(y, d, i, j);
                let e = (l - 1.0).max(0.0);
                e * e
            })
            .sum();
        n as f64 * f / self.pairs - mu * pen
    }

    fn gradient(&self, y: &[f64], mu: f64, g: &mut [f64]) {
        let (n, d) = (self.n, self.dim);
        let mut mean = vec![0.0; d];
        for p in y.chunks_exact(d) {
            mean.iter_mut().zip(p).for_each(|(m, x)| *m += x);
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let c = 2.0 * n as f64 / self.pairs;
        for (gp, p) in g.chunks_exact_mut(d).zip(y.chunks_exact(d)) {
            for k in 0..d {
                gp[k] = c * (p[k] - mean[k]);
            }
        }
        for &(i, j) in self.edges {
            let l = dist(y, d, i, j);
            if l > 1.0 {
                let w = 2.0 * mu * (l - 1.0) / l;
                for k in 0..d {
                    let diff = w * (y[i * d + k] - y[j * d + k]);
                    g[i * d + k] -= diff;
                    g[j * d + k] += diff;
                }
            }
        }
    }
}

fn dist(y: &[f64], d: usize, i: usize, j: usize) -> f64 {
    y[i * d..(i + 1) * d].iter().zip(&y[j * d..(j + 1) * d]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Feasible starting layout: classical scaling of the hop counts shrunk
/// until every edge has length at most one, plus a little seeded noise in
/// every coordinate so that extra dimensions are not stuck at zero.
fn initial_layout(adj: &Adjacency, hops: &HopMatrix, rank: usize, seed: u64, edges: &[(usize, usize)]) -> Result<Coords> {
    let n = adj.n();
    let est = scale_hops(hops, 1.0)?;
    let mut y = classical_mds(&est, rank.min(n))?.coords;
    if y.dim() < rank {
        let mut padded = Coords::zeros(n, rank);
        for i in 0..n {
            padded.row_mut(i)[..y.dim()].copy_from_slice(y.row(i));
        }
        y = padded;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amp = 1e-3;
    for x in y.as_mut_slice() {
        *x += amp * (rng.random::<f64>() - 0.5);
    }
    let longest = max_edge_length(&y, edges);
    if longest > 0.0 {
        let s = 1.0 / longest;
        y.as_mut_slice().iter_mut().for_each(|x| *x *= s);
    }
    y.center();
    Ok(y)
}

/// Penalty-method ascent for `max Σ‖yᵢ−yⱼ‖²` subject to `‖yᵢ−yⱼ‖ ≤ 1` on edges.
///
/// The returned layout is exactly feasible: the last iterate is shrunk by its
/// longest edge, and if that loses to the starting layout the latter is kept.
pub fn solve_mvu(adj: &Adjacency, rank: usize, schedule: &PenaltySchedule, seed: u64) -> Result<MvuSolution> {
    let n = adj.n();
    if rank < 2 {
        return Err(Error::invalid("rank budget must be at least 2"));
    }
    if n < 2 {
        return Err(Error::invalid("need at least two nodes"));
    }
    if !adj.is_connected() {
        return Err(Error::Disconnected("MVU objective is unbounded".into()));
    }
    if schedule.mus.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::invalid("penalty weights must be positive"));
    }
    let edges: Vec<(usize, usize)> = adj.edges().collect();
    let hops = all_pairs_hops(adj)?;
    let init = initial_layout(adj, &hops, rank, seed, &edges)?;
    let initial_objective = spread(&init);

    let prob = Problem { n, dim: rank, edges: &edges, pairs: (n * (n - 1) / 2) as f64 };
    let mut y = init.as_slice().to_vec();
    let mut g = vec![0.0; y.len()];
    let mut trial = vec![0.0; y.len()];
    let mut trace = Vec::new();
    let mut step = 1e-2;
    for (stage, &mu) in schedule.mus.iter().enumerate() {
        let mut val = prob.value(&y, mu);
        for iter in 0..schedule.steps {
            prob.gradient(&y, mu, &mut g);
            let gg: f64 = g.iter().map(|x| x * x).sum();
            if gg <= 1e-24 * (1.0 + val.abs()) {
                break;
            }
            let mut accepted = false;
            while step > 1e-16 {
                trial.iter_mut().zip(&y).zip(&g).for_each(|((t, y), g)| *t = y + step * g);
                let tv = prob.value(&trial, mu);
                if tv >= val + 1e-4 * step * gg {
                    std::mem::swap(&mut y, &mut trial);
                    val = tv;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            step *= 2.0;
            let yc = Coords::new(n, rank, y.clone())?;
            trace.push(MvuTraceRow { stage, iter, objective: val, max_violation: max_violation(&yc, &edges) });
        }
    }

    let mut last = Coords::new(n, rank, y)?;
    last.center();
    let longest = max_edge_length(&last, &edges);
    if longest > 1.0 {
        let s = 1.0 / longest;
        last.as_mut_slice().iter_mut().for_each(|x| *x *= s);
    }
    let chosen = if spread(&last) >= initial_objective { last } else { init };
    let objective = spread(&chosen);
    let max_edge_violation = max_violation(&chosen, &edges);
    Ok(MvuSolution { coords: chosen, objective, max_edge_violation, initial_objective, trace })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvuBoundReport {
    pub pairs_checked: usize,
    pub violations: usize,
    /// Largest `γᵢⱼ − δᵢⱼ` over connected pairs.
    pub max_excess: f64,
}

/// Counts pairs with `γᵢⱼ > δᵢⱼ + slack·δᵢⱼ + 1e−9`.
pub fn check_gamma_bound<D: Dissimilarity + ?Sized>(gamma: &D, hops: &HopMatrix, slack: f64) -> Result<MvuBoundReport> {
    let n = hops.n();
    if gamma.size() != n {
        return Err(Error::SizeMismatch { left: gamma.size(), right: n });
    }
    let mut rep = MvuBoundReport { pairs_checked: 0, violations: 0, max_excess: f64::NEG_INFINITY };
    for i in 0..n {
        for j in (i + 1)..n {
            let Some(h) = hops.hops(i, j) else { continue };
            let h = f64::from(h);
            let excess = gamma.value(i, j) - h;
            rep.pairs_checked += 1;
            rep.max_excess = rep.max_excess.max(excess);
            if excess > slack * h + 1e-9 {
                rep.violations += 1;
            }
        }
    }
    Ok(rep)
}

/// `γ*ᵢⱼ ≤ δᵢⱼ`, with the solution's edge slack propagated along paths.
pub fn check_mvu_bound(sol: &MvuSolution, hops: &HopMatrix) -> Result<MvuBoundReport> {
    check_gamma_bound(&sol.gamma(), hops, sol.max_edge_violation)
}

/// `Σ|d̃² − d²| / (η Σ d²)` with `d̃ = r γ*`.
pub fn discrepancy_ratio(sol: &MvuSolution, truth: &DistanceMatrix, r: f64, eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid(format!("eta must lie in (0,1), got {eta}")));
    }
    discrepancy_ratio_of(&sol.gamma(), truth, r, eta)
}

pub(crate) fn discrepancy_ratio_of<D: Dissimilarity + ?Sized>(gamma: &D, truth: &DistanceMatrix, r: f64, eta: f64) -> Result<f64> {
    let n = truth.n();
    if gamma.size() != n {
        return Err(Error::SizeMismatch { left: gamma.size(), right: n });
    }
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let dt = r * gamma.value(i, j);
            let d = truth.get(i, j);
            num += (dt * dt - d * d).abs();
            den += d * d;
        }
    }
    if den == 0.0 {
        return Err(Error::DegenerateDomain("all true distances are zero".into()));
    }
    Ok(num / (eta * den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_uniform, Domain};
    use crate::linkgraph::{generate_graph, LinkFunction};

    fn quick() -> PenaltySchedule {
        PenaltySchedule { mus: vec![1.0, 10.0, 100.0, 1000.0], steps: 400 }
    }

    #[test]
    fn single_edge() {
        let a = Adjacency::from_edges(2, [(0, 1)]).unwrap();
        let s = solve_mvu(&a, 2, &quick(), 0).unwrap();
        assert!((s.coords.dist(0, 1) - 1.0).abs() < 1e-6);
        assert!((s.objective - 1.0).abs() < 1e-6);
    }

    #[test]
    fn path_straightens() {
        let a = Adjacency::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let s = solve_mvu(&a, 3, &PenaltySchedule::default(), 1).unwrap();
        // maximizing 1D oracle: ends at distance 2, total spread 1 + 1 + 4
        let g = s.gamma();
        assert!(g.get(0, 2) <= 2.0 + 1e-9);
        assert!(g.get(0, 2) > 2.0 - 1e-3, "{}", g.get(0, 2));
        assert!((s.objective - 6.0).abs() < 5e-3);
        assert!(s.max_edge_violation <= 1e-9);
    }

    #[test]
    fn disconnected_rejected() {
        let a = Adjacency::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(solve_mvu(&a, 2, &quick(), 0), Err(Error::Disconnected(_))));
    }

    #[test]
    fn random_graph_satisfies_prop() {
        let cfg = sample_uniform(&Domain::rectangle(1.0, 1.0).unwrap(), 80, 3).unwrap();
        let a = generate_graph(&cfg, &LinkFunction::indicator(0.3).unwrap(), 0);
        assert!(a.is_connected());
        let s = solve_mvu(&a, 5, &quick(), 7).unwrap();
        assert!(s.max_edge_violation <= 1e-4);
        assert!(s.objective >= s.initial_objective);
        let h = all_pairs_hops(&a).unwrap();
        let rep = check_mvu_bound(&s, &h).unwrap();
        assert_eq!(rep.violations, 0);
        for st in 0..4 {
            let rows: Vec<_> = s.trace.iter().filter(|r| r.stage == st).collect();
            assert!(rows.windows(2).all(|w| w[1].objective >= w[0].objective));
        }
    }

    #[test]
    fn hops_as_gamma_and_injected_violation() {
        let a = Adjacency::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let h = all_pairs_hops(&a).unwrap();
        let as_dist = DistanceMatrix::from_dense(3, (0..9).map(|k| f64::from(h.get(k / 3, k % 3))).collect()).unwrap();
        assert_eq!(check_gamma_bound(&as_dist, &h, 0.0).unwrap().violations, 0);
        let y = Coords::new(3, 2, vec![0.0, 0.0, 1.5, 0.0, 2.5, 0.0]).unwrap();
        let bad = MvuSolution::from_coords(y, &a).unwrap();
        assert!((bad.max_edge_violation - 0.5).abs() < 1e-12);
        assert!(check_gamma_bound(&bad.gamma(), &h, 0.0).unwrap().violations > 0);
    }

    #[test]
    fn discrepancy_identities() {
        let c = Coords::new(3, 1, vec![0.0, 1.0, 3.0]).unwrap();
        let truth = DistanceMatrix::from_coords(&c);
        let a = Adjacency::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let sol = MvuSolution::from_coords(c.clone(), &a).unwrap();
        assert_eq!(discrepancy_ratio(&sol, &truth, 1.0, 0.1).unwrap(), 0.0);
        let eta = 0.1;
        let ratio = discrepancy_ratio(&sol, &truth, 1.0 + eta, eta).unwrap();
        assert!((ratio - (2.0 + eta)).abs() < 1e-12);
        assert!(discrepancy_ratio(&sol, &truth, 1.0, 1.0).is_err());
        assert!(discrepancy_ratio(&sol, &truth, 1.0, 0.0).is_err());
    }
}
