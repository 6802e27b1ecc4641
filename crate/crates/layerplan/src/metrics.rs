//! Path quality and diversity metrics.
//!
//! * [`total_variation`] — polyline arc length.
//! * [`min_cosine_similarity`] — worst-case turn sharpness: the minimum
//!   cosine between consecutive nonzero segments (1 = straight,
//!   -1 = full reversal).
//! * [`sinkhorn_distance`] — entropy-regularized optimal transport cost
//!   between two paths viewed as uniform point clouds with squared
//!   Euclidean ground cost, computed with log-domain potential updates.
//! * [`path_diversity`] — mean pairwise Sinkhorn distance over a batch.

use crate::{Error, Result};
use ndarray::Array2;

/// Default entropic regularization strength.
pub const DEFAULT_LAMBDA: f64 = 5e-3;

/// L1 marginal violation below which the transport plan is accepted.
pub const SINKHORN_TOL: f64 = 1e-6;

/// Update rounds before giving up on convergence.
pub const SINKHORN_MAX_ITERS: usize = 1000;

/// Update rounds spent at each annealing level of the regularization
/// schedule before halving toward the target.
const ANNEAL_ROUNDS_PER_LEVEL: usize = 10;

/// Sum of Euclidean segment lengths of a polyline.
pub fn total_variation(path: &Array2<f64>) -> f64 {
    let mut total = 0.0;
    for w in path.windows((2, path.ncols())) {
        let mut sq = 0.0;
        for c in 0..path.ncols() {
            let d = w[[1, c]] - w[[0, c]];
            sq += d * d;
        }
        total += sq.sqrt();
    }
    total
}

/// Minimum cosine between consecutive segment directions.
///
/// Zero-length segments carry no direction and are skipped; the metric
/// needs at least two nonzero segments, otherwise the path is degenerate.
pub fn min_cosine_similarity(path: &Array2<f64>) -> Result<f64> {
    let d = path.ncols();
    let mut directions: Vec<(Vec<f64>, f64)> = Vec::new();
    for w in path.windows((2, d)) {
        let seg: Vec<f64> = (0..d).map(|c| w[[1, c]] - w[[0, c]]).collect();
        let norm = seg.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            directions.push((seg, norm));
        }
    }
    if directions.len() < 2 {
        return Err(Error::DegeneratePath);
    }
    let mut min_cos = f64::INFINITY;
    for pair in directions.windows(2) {
        let (u, nu) = &pair[0];
        let (v, nv) = &pair[1];
        let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
        let cos = dot / (nu * nv);
        if cos < min_cos {
            min_cos = cos;
        }
    }
    Ok(min_cos)
}

/// Squared Euclidean cost matrix between two point clouds.
fn ground_cost(x: &Array2<f64>, y: &Array2<f64>) -> Array2<f64> {
    let (n, m, d) = (x.nrows(), y.nrows(), x.ncols());
    let mut cost = Array2::zeros((n, m));
    for i in 0..n {
        for j in 0..m {
            let mut sq = 0.0;
            for c in 0..d {
                let diff = x[[i, c]] - y[[j, c]];
                sq += diff * diff;
            }
            cost[[i, j]] = sq;
        }
    }
    cost
}

/// Stable log-sum-exp of a slice.
fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
    max + sum.ln()
}

/// Entropy-regularized transport cost `<plan, cost>` between two paths.
///
/// Both clouds carry uniform weights. Potentials are iterated in the log
/// domain, so arbitrarily small `lambda` cannot overflow. Because plain
/// updates stall for regularization far below the cost scale, the
/// effective regularization starts at the largest ground cost and halves
/// toward `lambda`, holding each level for a few rounds so the potentials
/// settle before the next cut (warm-starting throughout); rounds then
/// continue at `lambda` itself. Iteration stops once
/// the plan at the target `lambda` has L1 marginal violation below
/// [`SINKHORN_TOL`], and fails with the residual after
/// [`SINKHORN_MAX_ITERS`] total rounds. The arguments are ordered
/// canonically before computing, so `sinkhorn_distance(p, q, l)` and
/// `sinkhorn_distance(q, p, l)` return bit-identical values.
pub fn sinkhorn_distance(x: &Array2<f64>, y: &Array2<f64>, lambda: f64) -> Result<f64> {
    sinkhorn_distance_with(x, y, lambda, SINKHORN_TOL, SINKHORN_MAX_ITERS)
}

/// [`sinkhorn_distance`] with explicit tolerance and iteration budget.
pub fn sinkhorn_distance_with(
    x: &Array2<f64>,
    y: &Array2<f64>,
    lambda: f64,
    tol: f64,
    max_iters: usize,
) -> Result<f64> {
    if x.ncols() != y.ncols() {
        return Err(Error::DimensionMismatch { expected: x.ncols(), got: y.ncols() });
    }
    if x.nrows() == 0 || y.nrows() == 0 {
        return Err(Error::InvalidParameter("point clouds must be nonempty".into()));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    // Canonical argument order makes the metric exactly symmetric: both
    // orders run the identical float program.
    let (x, y) = if cloud_key_less(y, x) { (y, x) } else { (x, y) };

    let (n, m) = (x.nrows(), y.nrows());
    let cost = ground_cost(x, y);
    let log_a = -(n as f64).ln();
    let log_b = -(m as f64).ln();

    let mut f = vec![0.0f64; n];
    let mut g = vec![0.0f64; m];
    let mut terms = vec![0.0f64; n.max(m)];
    let mut plan = Array2::zeros((n, m));

    // Regularization schedule: halve from the cost scale down to the
    // target, holding each level for several rounds so that assignment
    // competitions resolve while the temperature is still high (one round
    // per level leaves them to creep at the target rate instead).
    let cost_max = cost.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut lam = if cost_max > lambda { cost_max } else { lambda };
    let mut rounds_at_level = 0usize;

    let mut residual = f64::INFINITY;
    for _ in 0..max_iters {
        // f-update: rows become exact for the current g.
        for i in 0..n {
            for j in 0..m {
                terms[j] = log_b + (g[j] - cost[[i, j]]) / lam;
            }
            f[i] = -lam * log_sum_exp(&terms[..m]);
        }
        // g-update: columns become exact for the current f.
        for j in 0..m {
            for i in 0..n {
                terms[i] = log_a + (f[i] - cost[[i, j]]) / lam;
            }
            g[j] = -lam * log_sum_exp(&terms[..n]);
        }

        if lam == lambda {
            for i in 0..n {
                for j in 0..m {
                    plan[[i, j]] =
                        (log_a + log_b + (f[i] + g[j] - cost[[i, j]]) / lam).exp();
                }
            }
            residual = marginal_violation(&plan, n, m);
            if residual <= tol {
                let transport_cost = plan.iter().zip(cost.iter()).map(|(p, c)| p * c).sum();
                return Ok(transport_cost);
            }
        } else {
            rounds_at_level += 1;
            if rounds_at_level == ANNEAL_ROUNDS_PER_LEVEL {
                lam = (0.5 * lam).max(lambda);
                rounds_at_level = 0;
            }
        }
    }
    Err(Error::SinkhornDiverged { residual, iterations: max_iters })
}

/// L1 distance of the plan's marginals from the uniform weights.
fn marginal_violation(plan: &Array2<f64>, n: usize, m: usize) -> f64 {
    let a = 1.0 / n as f64;
    let b = 1.0 / m as f64;
    let mut err = 0.0;
    for i in 0..n {
        let row: f64 = plan.row(i).sum();
        err += (row - a).abs();
    }
    for j in 0..m {
        let col: f64 = plan.column(j).sum();
        err += (col - b).abs();
    }
    err
}

/// Total order on point clouds: shorter first, then lexicographic on
/// coordinates under IEEE total ordering.
fn cloud_key_less(p: &Array2<f64>, q: &Array2<f64>) -> bool {
    if p.nrows() != q.nrows() {
        return p.nrows() < q.nrows();
    }
    for (a, b) in p.iter().zip(q.iter()) {
        match a.total_cmp(b) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

/// Mean Sinkhorn distance over all ordered pairs of distinct paths.
///
/// Because the pairwise metric is exactly symmetric, each unordered pair
/// is computed once and counted twice. The pair values are summed in
/// sorted order, which makes the result exactly invariant under
/// reordering of the batch (the multiset of values is the same, so the
/// float additions are too).
pub fn path_diversity(paths: &[Array2<f64>], lambda: f64) -> Result<f64> {
    let b = paths.len();
    if b < 2 {
        return Err(Error::InvalidParameter(
            "path diversity needs at least two paths".into(),
        ));
    }
    let mut values = Vec::with_capacity(b * (b - 1));
    for i in 0..b {
        for j in i + 1..b {
            let v = sinkhorn_distance(&paths[i], &paths[j], lambda)?;
            values.push(v);
            values.push(v);
        }
    }
    values.sort_unstable_by(f64::total_cmp);
    let sum: f64 = values.iter().sum();
    Ok(sum / (b * (b - 1)) as f64)
}
