//! Classical scaling, procrustes alignment and localized SMACOF.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Coords, DistanceMatrix};
use crate::hopdist::{EstimateMatrix, HopMatrix, INF_HOPS};

/// Anything that serves pairwise dissimilarities.
pub trait Dissimilarity: Sync {
    fn size(&self) -> usize;
    fn value(&self, i: usize, j: usize) -> f64;
}

impl Dissimilarity for DistanceMatrix {
    fn size(&self) -> usize {
        self.n()
    }
    fn value(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

impl Dissimilarity for EstimateMatrix {
    fn size(&self) -> usize {
        self.n()
    }
    fn value(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingResult {
    pub coords: Coords,
    /// Leading eigenvalues, descending, before clamping (classical scaling only).
    pub eigenvalues: Vec<f64>,
    /// Final stress (SMACOF only).
    pub stress: Option<f64>,
    pub iterations: usize,
    /// Stress before the first update and after each one (SMACOF only).
    pub stress_trace: Vec<f64>,
}

/// Above this size the spectrum is found by subspace iteration.
const DENSE_EIGEN_MAX: usize = 400;

pub fn classical_mds<D: Dissimilarity + ?Sized>(d: &D, v: usize) -> Result<EmbeddingResult> {
    let n = d.size();
    if v == 0 {
        return Err(Error::invalid("embedding dimension must be at least 1"));
    }
    if n < 2 {
        return Err(Error::invalid("need at least two points"));
    }
    let v_eff = v.min(n);
    let b = double_centered(d)?;
    let (vals, vecs) = top_eigenpairs(&b, v_eff);
    if vals.iter().all(|&l| l <= 0.0) {
        return Err(Error::NoPositiveSpectrum(v));
    }
    let mut coords = Coords::zeros(n, v);
    for (k, &l) in vals.iter().enumerate() {
        let s = l.max(0.0).sqrt();
        for i in 0..n {
            coords.row_mut(i)[k] = s * vecs[(i, k)];
        }
    }
    coords.center();
    Ok(EmbeddingResult { coords, eigenvalues: vals, stress: None, iterations: 0, stress_trace: Vec::new() })
}

/// `B = −½ J (D∘D) J`.
fn double_centered<D: Dissimilarity + ?Sized>(d: &D) -> Result<DMatrix<f64>> {
    let n = d.size();
    let mut sq = DMatrix::<f64>::zeros(n, n);
    // column-major: column j is contiguous
    let bad = sq
        .as_mut_slice()
        .par_chunks_mut(n)
        .enumerate()
        .map(|(j, col)| {
            let mut bad = None;
            for (i, c) in col.iter_mut().enumerate() {
                let x = d.value(i, j);
                if !x.is_finite() && bad.is_none() {
                    bad = Some((i, j));
                }
                *c = x * x;
            }
            bad
        })
        .find_any(|b| b.is_some())
        .flatten();
    if let Some((i, j)) = bad {
        return Err(Error::invalid(format!(
            "non-finite dissimilarity at ({i},{j}); is the graph connected?"
        )));
    }
    let means: Vec<f64> = (0..n).map(|j| sq.column(j).sum() / n as f64).collect();
    let grand = means.iter().sum::<f64>() / n as f64;
    sq.as_mut_slice().par_chunks_mut(n).enumerate().for_each(|(j, col)| {
        for (i, c) in col.iter_mut().enumerate() {
            *c = -0.5 * (*c - means[i] - means[j] + grand);
        }
    });
    Ok(sq)
}

/// Top-`k` eigenpairs (largest algebraic) of a symmetric matrix.
fn top_eigenpairs(b: &DMatrix<f64>, k: usize) -> (Vec<f64>, DMatrix<f64>) {
    let n = b.nrows();
    let (vals, mut vecs) = if n <= DENSE_EIGEN_MAX {
        let eig = SymmetricEigen::new(b.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
        let vals: Vec<f64> = order[..k].iter().map(|&o| eig.eigenvalues[o]).collect();
        let vecs = DMatrix::from_fn(n, k, |i, c| eig.eigenvectors[(i, order[c])]);
        (vals, vecs)
    } else {
        subspace_iteration(b, k)
    };
    // fix signs: the largest-magnitude entry of each vector is positive
    for c in 0..k {
        let mut col = vecs.column_mut(c);
        let idx = col.iamax();
        if col[idx] < 0.0 {
            col.neg_mut();
        }
    }
    (vals, vecs)
}

/// Block subspace iteration with Rayleigh–Ritz extraction.
fn subspace_iteration(b: &DMatrix<f64>, k: usize) -> (Vec<f64>, DMatrix<f64>) {
    const MAX_ITER: usize = 3000;
    const TOL: f64 = 1e-10;
    let n = b.nrows();
    let p = (k + 10).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let start = DMatrix::from_fn(n, p, |_, _| rng.random::<f64>() - 0.5);
    let mut q = start.qr().q();
    let mut result = None;
    for it in 0..MAX_ITER {
        let y = b * &q;
        let h = q.transpose() * &y;
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&x, &z| eig.eigenvalues[z].total_cmp(&eig.eigenvalues[x]));
        let w = DMatrix::from_fn(p, p, |i, c| eig.eigenvectors[(i, order[c])]);
        let theta: Vec<f64> = order.iter().map(|&o| eig.eigenvalues[o]).collect();
        let ritz = &q * &w;
        let by = &y * &w;
        let scale = theta.iter().fold(0.0f64, |m, t| m.max(t.abs())).max(f64::MIN_POSITIVE);
        let converged = (0..k).all(|c| {
            let res = (by.column(c) - ritz.column(c) * theta[c]).norm();
            res <= TOL * scale
        });
        if converged || it + 1 == MAX_ITER {
            if !converged {
                log::warn!("subspace iteration did not converge in {MAX_ITER} steps");
            }
            result = Some((theta[..k].to_vec(), ritz.columns(0, k).into_owned()));
            break;
        }
        q = by.qr().q();
    }
    result.expect("loop always yields")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Procrustes {
    pub aligned: Coords,
    pub scale: f64,
    /// Row-major `v×v`; `aligned = scale · source_c · R + mean(target)`.
    pub rotation: Vec<f64>,
    pub rmse: f64,
}

/// Best similarity transform (reflections allowed) of `source` onto `target`.
pub fn procrustes_align(source: &Coords, target: &Coords) -> Result<Procrustes> {
    let (n, v) = (source.n(), source.dim());
    if target.n() != n {
        return Err(Error::SizeMismatch { left: n, right: target.n() });
    }
    if target.dim() != v {
        return Err(Error::DimensionMismatch { expected: v, got: target.dim() });
    }
    if n < v + 1 {
        return Err(Error::invalid(format!("need at least {} points in dimension {v}", v + 1)));
    }
    let mut a = source.clone();
    a.center();
    let tmean = target.centroid();
    let mut t = target.clone();
    t.center();
    let norm_a = a.frobenius_sq();
    if !(norm_a > 0.0) {
        return Err(Error::DegenerateDomain("source configuration has zero spread".into()));
    }
    let am = DMatrix::from_row_slice(n, v, a.as_slice());
    let tm = DMatrix::from_row_slice(n, v, t.as_slice());
    let m = am.transpose() * &tm;
    let svd = m.svd(true, true);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let r = u * vt;
    let scale = svd.singular_values.sum() / norm_a;
    let mut out = am * &r * scale;
    for mut row in out.row_iter_mut() {
        for (x, m) in row.iter_mut().zip(&tmean) {
            *x += m;
        }
    }
    let mut data = Vec::with_capacity(n * v);
    for i in 0..n {
        data.extend(out.row(i).iter());
    }
    let aligned = Coords::new(n, v, data)?;
    let rmse = rmse(&aligned, target);
    let mut rotation = Vec::with_capacity(v * v);
    for i in 0..v {
        rotation.extend(r.row(i).iter());
    }
    Ok(Procrustes { aligned, scale, rotation, rmse })
}

/// Root mean squared point displacement.
pub fn rmse(a: &Coords, b: &Coords) -> f64 {
    let s: f64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y) * (x - y)).sum();
    (s / a.n() as f64).sqrt()
}

/// Procrustes-aligned RMSE of an embedding against the truth.
pub fn aligned_rmse(embedding: &Coords, truth: &Coords) -> Result<f64> {
    Ok(procrustes_align(embedding, truth)?.rmse)
}

/// Sparse symmetric dissimilarities with a presence mask; the diagonal is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialDissimilarity {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<u32>,
    values: Vec<f64>,
}

impl PartialDissimilarity {
    /// Every off-diagonal entry present.
    pub fn from_full<D: Dissimilarity + ?Sized>(d: &D) -> Result<Self> {
        let n = d.size();
        Self::build(n, |i, j| {
            let x = d.value(i, j);
            x.is_finite().then_some(x)
        })
    }

    fn build<F: Fn(usize, usize) -> Option<f64> + Sync>(n: usize, entry: F) -> Result<Self> {
        let rows: Vec<Vec<(u32, f64)>> = (0..n)
            .into_par_iter()
            .map(|i| (0..n).filter(|&j| j != i).filter_map(|j| entry(i, j).map(|x| (j as u32, x))).collect())
            .collect();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let total: usize = rows.iter().map(Vec::len).sum();
        let mut cols = Vec::with_capacity(total);
        let mut values = Vec::with_capacity(total);
        for row in rows {
            for (j, x) in row {
                if !(x >= 0.0) {
                    return Err(Error::invalid(format!("negative dissimilarity {x}")));
                }
                cols.push(j);
                values.push(x);
            }
            offsets.push(cols.len());
        }
        let p = PartialDissimilarity { n, offsets, cols, values };
        for i in 0..n {
            for (j, x) in p.row(i) {
                if p.get(j, i) != Some(x) {
                    return Err(Error::invalid(format!("asymmetric entry at ({i},{j})")));
                }
            }
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of present pairs `i < j`.
    pub fn present_pairs(&self) -> usize {
        self.cols.len() / 2
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.offsets[i]..self.offsets[i + 1];
        self.cols[span.clone()].iter().zip(&self.values[span]).map(|(&j, &x)| (j as usize, x))
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        if i == j {
            return Some(0.0);
        }
        let span = self.offsets[i]..self.offsets[i + 1];
        let cols = &self.cols[span.clone()];
        cols.binary_search(&(j as u32)).ok().map(|k| self.values[span.start + k])
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut stack = vec![0];
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for (w, _) in self.row(u) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Weighted stress over present pairs.
    pub fn stress(&self, x: &Coords) -> f64 {
        // per-row partials summed in order keep the result thread-count independent
        let rows: Vec<f64> = (0..self.n)
            .into_par_iter()
            .map(|i| {
                self.row(i)
                    .filter(|&(j, _)| j > i)
                    .map(|(j, d)| {
                        let e = x.dist(i, j) - d;
                        e * e
                    })
                    .sum::<f64>()
            })
            .collect();
        rows.iter().sum()
    }
}

/// Keeps `r · δᵢⱼ` where `δᵢⱼ ≤ max_hops`.
pub fn localize(hops: &HopMatrix, max_hops: u16, r: f64) -> Result<PartialDissimilarity> {
    if max_hops == 0 || max_hops == INF_HOPS {
        return Err(Error::invalid(format!("max_hops must be in 1..{INF_HOPS}")));
    }
    if !(r > 0.0) {
        return Err(Error::invalid("scale must be positive"));
    }
    PartialDissimilarity::build(hops.n(), |i, j| {
        let h = hops.get(i, j);
        (h <= max_hops).then(|| r * f64::from(h))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmacofOptions {
    pub max_iter: usize,
    pub rel_tol: f64,
    /// Conjugate-gradient steps per Guttman update.
    pub cg_steps: usize,
}

impl Default for SmacofOptions {
    fn default() -> Self {
        SmacofOptions { max_iter: 500, rel_tol: 1e-6, cg_steps: 25 }
    }
}

/// Stress majorization with binary weights on the present pairs.
///
/// Each update minimizes the majorizing quadratic `tr XᵀVX − 2 tr XᵀB(Z)Z`
/// by preconditioned CG started at `Z`. Every CG iterate lowers that
/// quadratic, so stress cannot rise even when the solve is truncated.
pub fn smacof(partial: &PartialDissimilarity, init: &Coords, opts: SmacofOptions) -> Result<EmbeddingResult> {
    let n = partial.n();
    if init.n() != n {
        return Err(Error::SizeMismatch { left: init.n(), right: n });
    }
    if opts.max_iter == 0 || !(opts.rel_tol >= 0.0) {
        return Err(Error::invalid("max_iter must be positive and rel_tol nonnegative"));
    }
    if !partial.is_connected() {
        return Err(Error::Disconnected("localization threshold too small".into()));
    }
    let v = init.dim();
    let mut z = init.clone();
    z.center();
    let mut stress = partial.stress(&z);
    let mut trace = vec![stress];
    let mut iterations = 0;
    let degree: Vec<f64> = (0..n).map(|i| (partial.offsets[i + 1] - partial.offsets[i]) as f64).collect();

    while iterations < opts.max_iter && stress > 0.0 {
        let rhs = guttman_rhs(partial, &z);
        let mut x = z.clone();
        for c in 0..v {
            let b: Vec<f64> = (0..n).map(|i| rhs[i * v + c]).collect();
            let mut col: Vec<f64> = (0..n).map(|i| z.row(i)[c]).collect();
            pcg_laplacian(partial, &degree, &b, &mut col, opts.cg_steps);
            for (i, val) in col.into_iter().enumerate() {
                x.row_mut(i)[c] = val;
            }
        }
        x.center();
        let next = partial.stress(&x);
        if next > stress {
            // only round-off can do this; keep the better iterate
            break;
        }
        iterations += 1;
        let prev = stress;
        z = x;
        stress = next;
        trace.push(stress);
        if stress == 0.0 || (prev - stress) / prev < opts.rel_tol {
            break;
        }
    }
    Ok(EmbeddingResult { coords: z, eigenvalues: Vec::new(), stress: Some(stress), iterations, stress_trace: trace })
}

/// Row-major `B(Z) Z`, with `(B(Z)Z)ᵢ = Σⱼ δᵢⱼ/‖zᵢ−zⱼ‖ (zᵢ − zⱼ)`.
fn guttman_rhs(p: &PartialDissimilarity, z: &Coords) -> Vec<f64> {
    let v = z.dim();
    let mut out = vec![0.0; p.n() * v];
    out.par_chunks_mut(v).enumerate().for_each(|(i, o)| {
        let zi = z.row(i);
        for (j, d) in p.row(i) {
            let dist = z.dist(i, j);
            if dist > 0.0 {
                let w = d / dist;
                for ((o, a), b) in o.iter_mut().zip(zi).zip(z.row(j)) {
                    *o += w * (a - b);
                }
            }
        }
    });
    out
}

/// `(L x)ᵢ = deg(i) xᵢ − Σⱼ xⱼ` for the presence graph.
fn laplacian_mul(p: &PartialDissimilarity, degree: &[f64], x: &[f64], out: &mut [f64]) {
    out.par_iter_mut().enumerate().for_each(|(i, o)| {
        let s: f64 = p.row(i).map(|(j, _)| x[j]).sum();
        *o = degree[i] * x[i] - s;
    });
}

fn pcg_laplacian(p: &PartialDissimilarity, degree: &[f64], b: &[f64], x: &mut [f64], steps: usize) {
    let n = b.len();
    let mut lx = vec![0.0; n];
    laplacian_mul(p, degree, x, &mut lx);
    let mut r: Vec<f64> = b.iter().zip(&lx).map(|(b, l)| b - l).collect();
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let precond = |r: &[f64]| -> Vec<f64> { r.iter().zip(degree).map(|(r, d)| r / d).collect() };
    let mut zvec = precond(&r);
    let mut dir = zvec.clone();
    let mut rz: f64 = r.iter().zip(&zvec).map(|(a, b)| a * b).sum();
    let mut ld = vec![0.0; n];
    for _ in 0..steps {
        let rnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rnorm <= 1e-12 * bnorm.max(f64::MIN_POSITIVE) || rz <= 0.0 {
            break;
        }
        laplacian_mul(p, degree, &dir, &mut ld);
        let dld: f64 = dir.iter().zip(&ld).map(|(a, b)| a * b).sum();
        if !(dld > 0.0) {
            break;
        }
        let alpha = rz / dld;
        for k in 0..n {
            x[k] += alpha * dir[k];
            r[k] -= alpha * ld[k];
        }
        zvec = precond(&r);
        let rz_new: f64 = r.iter().zip(&zvec).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            dir[k] = zvec[k] + beta * dir[k];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_uniform, Domain};
    use crate::hopdist::{all_pairs_hops, scale_hops};
    use crate::linkgraph::{generate_graph, Adjacency, LinkFunction};

    fn square() -> Coords {
        Coords::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    fn max_dist_err(a: &Coords, b: &Coords) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..a.n() {
            for j in 0..a.n() {
                m = m.max((a.dist(i, j) - b.dist(i, j)).abs());
            }
        }
        m
    }

    #[test]
    fn collinear_exact() {
        let c = Coords::new(3, 1, vec![0.0, 1.0, 2.0]).unwrap();
        let e = classical_mds(&DistanceMatrix::from_coords(&c), 1).unwrap();
        assert!(max_dist_err(&c, &e.coords) < 1e-12);
        assert!((e.eigenvalues[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn square_corners() {
        let c = square();
        let e = classical_mds(&DistanceMatrix::from_coords(&c), 2).unwrap();
        assert!(max_dist_err(&c, &e.coords) < 1e-9);
        let centroid = e.coords.centroid();
        assert!(centroid.iter().all(|x| x.abs() < 1e-9));
    }

    #[test]
    fn no_positive_spectrum() {
        let c = Coords::new(3, 1, vec![0.0, 0.0, 0.0]).unwrap();
        let d = DistanceMatrix::from_coords(&c);
        assert!(matches!(classical_mds(&d, 1), Err(Error::NoPositiveSpectrum(1))));
    }

    #[test]
    fn disconnected_estimates_rejected() {
        let a = Adjacency::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let e = scale_hops(&all_pairs_hops(&a).unwrap(), 1.0).unwrap();
        assert!(classical_mds(&e, 2).is_err());
    }

    #[test]
    fn subspace_iteration_matches_dense() {
        let cfg = sample_uniform(&Domain::rectangle(2.0, 1.0).unwrap(), 450, 4).unwrap();
        let r = 0.25;
        let a = generate_graph(&cfg, &LinkFunction::indicator(r).unwrap(), 0);
        let e = scale_hops(&all_pairs_hops(&a).unwrap(), r).unwrap();
        let b = double_centered(&e).unwrap();
        let (vals, vecs) = subspace_iteration(&b, 3);
        let eig = SymmetricEigen::new(b.clone());
        let mut dense: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        dense.sort_by(|a, b| b.total_cmp(a));
        for k in 0..3 {
            assert!((vals[k] - dense[k]).abs() < 1e-8 * dense[0], "{k}: {} vs {}", vals[k], dense[k]);
            let res = (&b * vecs.column(k) - vecs.column(k) * vals[k]).norm();
            assert!(res < 1e-8 * dense[0]);
        }
    }

    #[test]
    fn large_exact_input_recovered() {
        let cfg = sample_uniform(&Domain::rectangle(2.0, 1.0).unwrap(), 500, 8).unwrap();
        let d = DistanceMatrix::from_coords(&cfg.coords);
        let e = classical_mds(&d, 2).unwrap();
        let p = procrustes_align(&e.coords, &cfg.coords).unwrap();
        assert!(p.rmse < 1e-8);
    }

    #[test]
    fn procrustes_rotation_and_scale() {
        let s = Coords::from_rows(&[[0.0, 0.0], [2.0, 0.0], [0.0, 1.0], [1.0, 3.0]]).unwrap();
        let rot = Coords::from_rows(&s.rows().map(|p| [-p[1], p[0]]).collect::<Vec<_>>()).unwrap();
        let p = procrustes_align(&s, &rot).unwrap();
        assert!(p.rmse < 1e-12 && (p.scale - 1.0).abs() < 1e-12);
        let big = Coords::from_rows(&s.rows().map(|p| [2.0 * p[0] + 3.0, 2.0 * p[1] + 3.0]).collect::<Vec<_>>()).unwrap();
        let p = procrustes_align(&s, &big).unwrap();
        assert!(p.rmse < 1e-12 && (p.scale - 2.0).abs() < 1e-12);
        let mirrored = Coords::from_rows(&s.rows().map(|p| [-p[0], p[1]]).collect::<Vec<_>>()).unwrap();
        assert!(procrustes_align(&s, &mirrored).unwrap().rmse < 1e-12);
        let flat = Coords::from_rows(&[[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(procrustes_align(&flat, &square().select(&[0, 1, 2])).is_err());
    }

    #[test]
    fn localize_extremes() {
        let a = Adjacency::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let h = all_pairs_hops(&a).unwrap();
        let full = localize(&h, 3, 0.5).unwrap();
        assert_eq!(full.present_pairs(), 6);
        assert_eq!(full.get(0, 3), Some(1.5));
        let edges = localize(&h, 1, 0.5).unwrap();
        assert_eq!(edges.present_pairs(), 3);
        assert_eq!(edges.get(1, 2), Some(0.5));
        assert_eq!(edges.get(0, 2), None);
        assert_eq!(edges.get(2, 2), Some(0.0));
        assert!(localize(&h, 0, 0.5).is_err());
    }

    #[test]
    fn smacof_fixed_point() {
        let c = square();
        let p = PartialDissimilarity::from_full(&DistanceMatrix::from_coords(&c)).unwrap();
        let e = smacof(&p, &c, SmacofOptions::default()).unwrap();
        assert_eq!(e.stress, Some(0.0));
        assert!(e.iterations <= 1);
    }

    #[test]
    fn smacof_disconnected_mask() {
        let a = Adjacency::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let h = all_pairs_hops(&a).unwrap();
        let p = localize(&h, 1, 1.0).unwrap();
        let err = smacof(&p, &square(), SmacofOptions::default()).unwrap_err();
        assert!(err.to_string().contains("localization threshold too small"));
    }

    #[test]
    fn smacof_beats_classical_on_full_hops() {
        let cfg = sample_uniform(&Domain::rectangle(1.0, 1.0).unwrap(), 120, 2).unwrap();
        let r = 0.3;
        let a = generate_graph(&cfg, &LinkFunction::indicator(r).unwrap(), 0);
        let est = scale_hops(&all_pairs_hops(&a).unwrap(), r).unwrap();
        let p = PartialDissimilarity::from_full(&est).unwrap();
        let cmds = classical_mds(&est, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let init = Coords::new(120, 2, (0..240).map(|_| rng.random::<f64>()).collect()).unwrap();
        let e = smacof(&p, &init, SmacofOptions::default()).unwrap();
        assert!(e.stress.unwrap() <= p.stress(&cmds.coords));
        assert!(e.stress_trace.windows(2).all(|w| w[1] <= w[0]));
    }
}
