//! Stochastic degree sequence model: both degree sequences fixed in
//! expectation.
//!
//! A cellwise probability matrix `P` with `P_ij = P(B*_ij = 1)` is fitted
//! first (ratio or maximum-entropy polytope method). Under independent cells
//! the weight of pair (i, j) is Poisson-binomial with parameters
//! `p_k = P_ik * P_jk`, whose tails are approximated by a refined normal
//! expansion; an exact convolution is provided as a test oracle.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::hyperg::Tail;
use crate::matrix::SquareMatrix;
use crate::null_model::{ModelSummary, NullModelResult};
use crate::special::{normal_cdf, normal_pdf};

/// How the cellwise probabilities are constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProbabilityMethod {
    /// `min(1, R_i * C_j / sum(B))`.
    Ratio,
    /// Unique maximum-entropy matrix with the margins of `B`.
    #[default]
    Polytope,
}

impl fmt::Display for ProbabilityMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProbabilityMethod::Ratio => "ratio",
            ProbabilityMethod::Polytope => "polytope",
        })
    }
}

impl FromStr for ProbabilityMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ratio" => Ok(ProbabilityMethod::Ratio),
            "polytope" => Ok(ProbabilityMethod::Polytope),
            other => Err(Error::InvalidInput(format!(
                "unknown probability method {other:?}; expected ratio or polytope"
            ))),
        }
    }
}

/// Cellwise Bernoulli probabilities `P(B*_ij = 1)` fitted to a graph's
/// margins.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
    method: ProbabilityMethod,
    row_target: Vec<usize>,
    col_target: Vec<usize>,
}

impl ProbabilityMatrix {
    fn new(
        rows: usize,
        cols: usize,
        entries: Vec<f64>,
        method: ProbabilityMethod,
        row_target: Vec<usize>,
        col_target: Vec<usize>,
        margin_tol: f64,
    ) -> Result<Self> {
        debug_assert_eq!(entries.len(), rows * cols);
        if let Some(p) = entries.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidInput(format!(
                "fitted probability {p} is outside [0, 1]"
            )));
        }
        let pm = Self {
            rows,
            cols,
            entries,
            method,
            row_target,
            col_target,
        };
        if method == ProbabilityMethod::Polytope {
            let worst = pm.margin_residual();
            if worst > margin_tol {
                return Err(Error::NoConvergence {
                    iterations: 0,
                    residual: worst,
                    tolerance: margin_tol,
                });
            }
        }
        Ok(pm)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn method(&self) -> ProbabilityMethod {
        self.method
    }

    pub fn row_target(&self) -> &[usize] {
        &self.row_target
    }

    pub fn col_target(&self) -> &[usize] {
        &self.col_target
    }

    /// Largest absolute difference between a row/column sum and its target.
    pub fn margin_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            let s: f64 = self.row(i).iter().sum();
            worst = worst.max((s - self.row_target[i] as f64).abs());
        }
        for j in 0..self.cols {
            let s: f64 = (0..self.rows).map(|i| self.entry(i, j)).sum();
            worst = worst.max((s - self.col_target[j] as f64).abs());
        }
        worst
    }

    /// Bernoulli entropy `sum_ij [-p ln p - (1-p) ln(1-p)]` in nats.
    pub fn entropy(&self) -> f64 {
        self.entries
            .iter()
            .map(|&p| {
                let mut h = 0.0;
                if p > 0.0 {
                    h -= p * p.ln();
                }
                if p < 1.0 {
                    h -= (1.0 - p) * (1.0 - p).ln();
                }
                h
            })
            .sum()
    }
}

/// Probabilities `min(1, R_i * C_j / sum(B))`. Products larger than the total
/// are truncated to 1.
pub fn probability_matrix_ratio(b: &BipartiteGraph) -> Result<ProbabilityMatrix> {
    let margins = b.margins();
    let total = b.edge_total();
    if total == 0 {
        return Err(Error::InvalidInput(
            "ratio probabilities are undefined for an all-zero matrix".into(),
        ));
    }
    let mut entries = Vec::with_capacity(b.rows() * b.cols());
    for &r in &margins.rows {
        for &c in &margins.cols {
            entries.push(((r * c) as f64 / total as f64).min(1.0));
        }
    }
    ProbabilityMatrix::new(
        b.rows(),
        b.cols(),
        entries,
        ProbabilityMethod::Ratio,
        margins.rows,
        margins.cols,
        f64::INFINITY,
    )
}

/// Default tolerance on the polytope solver's margin residual.
pub const POLYTOPE_TOL: f64 = 1e-8;
/// Default iteration cap for the polytope solver.
pub const POLYTOPE_MAX_ITER: usize = 10_000;

/// The unique maximum-entropy matrix with the margins of `b` and entries in
/// [0, 1].
///
/// Entropy stationarity under the margin constraints forces the logistic form
/// `M_ij = 1 / (1 + exp(-(a_i + c_j)))` on cells that are not structurally
/// forced to 0 or 1; the dual parameters are fitted so every margin matches
/// its target within `tol`. Saturated rows and columns are peeled off first
/// since the logistic form cannot represent forced cells at finite
/// parameters.
pub fn probability_matrix_polytope(
    b: &BipartiteGraph,
    tol: f64,
    max_iter: usize,
) -> Result<ProbabilityMatrix> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance {tol} must be positive")));
    }
    solve_polytope(b, tol, max_iter, None)
}

fn solve_polytope(
    b: &BipartiteGraph,
    tol: f64,
    max_iter: usize,
    init: Option<(&[f64], &[f64])>,
) -> Result<ProbabilityMatrix> {
    let m = b.rows();
    let n = b.cols();
    let margins = b.margins();
    let mut entries = vec![0.0f64; m * n];

    // Peel rows/columns whose remaining margin forces every remaining cell.
    let mut row_rem: Vec<i64> = margins.rows.iter().map(|&r| r as i64).collect();
    let mut col_rem: Vec<i64> = margins.cols.iter().map(|&c| c as i64).collect();
    let mut row_active = vec![true; m];
    let mut col_active = vec![true; n];
    let mut changed = true;
    while changed {
        changed = false;
        let nc = col_active.iter().filter(|&&a| a).count() as i64;
        for i in 0..m {
            if !row_active[i] {
                continue;
            }
            if row_rem[i] == 0 {
                row_active[i] = false;
                changed = true;
            } else if row_rem[i] == nc {
                for j in 0..n {
                    if col_active[j] {
                        entries[i * n + j] = 1.0;
                        col_rem[j] -= 1;
                    }
                }
                row_rem[i] = 0;
                row_active[i] = false;
                changed = true;
            }
        }
        let mr = row_active.iter().filter(|&&a| a).count() as i64;
        for j in 0..n {
            if !col_active[j] {
                continue;
            }
            if col_rem[j] == 0 {
                col_active[j] = false;
                changed = true;
            } else if col_rem[j] == mr {
                for i in 0..m {
                    if row_active[i] {
                        entries[i * n + j] = 1.0;
                        row_rem[i] -= 1;
                    }
                }
                col_rem[j] = 0;
                col_active[j] = false;
                changed = true;
            }
        }
    }

    let ar: Vec<usize> = (0..m).filter(|&i| row_active[i]).collect();
    let ac: Vec<usize> = (0..n).filter(|&j| col_active[j]).collect();
    let ma = ar.len();

    if ma > 0 {
        let rt: Vec<f64> = ar.iter().map(|&i| row_rem[i] as f64).collect();
        let ct: Vec<f64> = ac.iter().map(|&j| col_rem[j] as f64).collect();
        let (a, c) = fit_duals(&rt, &ct, tol, max_iter, init)?;
        for (ii, &i) in ar.iter().enumerate() {
            for (jj, &j) in ac.iter().enumerate() {
                entries[i * n + j] = sigmoid(a[ii] + c[jj]);
            }
        }
    }

    ProbabilityMatrix::new(
        m,
        n,
        entries,
        ProbabilityMethod::Polytope,
        margins.rows,
        margins.cols,
        tol.max(1e-6),
    )
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Fit dual parameters (a, c) so the margins of `sigmoid(a_i + c_j)` hit the
/// targets. Damped Newton steps on a gauge-pinned Schur complement, with
/// coordinatewise 1-D Newton sweeps as warm start and fallback.
fn fit_duals(
    rt: &[f64],
    ct: &[f64],
    tol: f64,
    max_iter: usize,
    init: Option<(&[f64], &[f64])>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let ma = rt.len();
    let nc = ct.len();
    let (mut a, mut c) = match init {
        Some((a0, c0)) => (a0.to_vec(), c0.to_vec()),
        None => (
            rt.iter().map(|&r| logit(r / nc as f64)).collect(),
            vec![0.0; nc],
        ),
    };

    let residual = |a: &[f64], c: &[f64]| -> f64 {
        let mut fr = vec![0.0; ma];
        let mut fc = vec![0.0; nc];
        for ii in 0..ma {
            for jj in 0..nc {
                let s = sigmoid(a[ii] + c[jj]);
                fr[ii] += s;
                fc[jj] += s;
            }
        }
        let r1 = fr
            .iter()
            .zip(rt)
            .fold(0.0f64, |w, (s, t)| w.max((s - t).abs()));
        fc.iter()
            .zip(ct)
            .fold(r1, |w, (s, t)| w.max((s - t).abs()))
    };

    let mut iters = 0usize;
    let mut res = residual(&a, &c);

    // warm-start sweeps stabilize the duals before Newton touches them
    for _ in 0..3 {
        if res <= tol || iters >= max_iter {
            break;
        }
        coordinate_sweep(&mut a, &mut c, rt, ct);
        res = residual(&a, &c);
        iters += 1;
    }

    let mut sp = vec![0.0f64; ma * nc];
    while res > tol {
        if iters >= max_iter {
            return Err(Error::NoConvergence {
                iterations: iters,
                residual: res,
                tolerance: tol,
            });
        }
        let improved = newton_step(&mut a, &mut c, rt, ct, &mut sp, res, &residual);
        iters += 1;
        if !improved {
            coordinate_sweep(&mut a, &mut c, rt, ct);
            iters += 1;
        }
        res = residual(&a, &c);
    }
    Ok((a, c))
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln().clamp(-10.0, 10.0)
}

/// One cyclic pass of 1-D Newton solves: each a_i against its row target,
/// then each c_j against its column target.
fn coordinate_sweep(a: &mut [f64], c: &mut [f64], rt: &[f64], ct: &[f64]) {
    for (ii, target) in rt.iter().enumerate() {
        let mut x = a[ii];
        for _ in 0..4 {
            let mut f = -target;
            let mut fp = 0.0;
            for &cj in c.iter() {
                let s = sigmoid(x + cj);
                f += s;
                fp += s * (1.0 - s);
            }
            if fp < 1e-300 || f.abs() < 1e-13 {
                break;
            }
            x -= (f / fp).clamp(-30.0, 30.0);
        }
        a[ii] = x.clamp(-50.0, 50.0);
    }
    for (jj, target) in ct.iter().enumerate() {
        let mut x = c[jj];
        for _ in 0..4 {
            let mut f = -target;
            let mut fp = 0.0;
            for &ai in a.iter() {
                let s = sigmoid(ai + x);
                f += s;
                fp += s * (1.0 - s);
            }
            if fp < 1e-300 || f.abs() < 1e-13 {
                break;
            }
            x -= (f / fp).clamp(-30.0, 30.0);
        }
        c[jj] = x.clamp(-50.0, 50.0);
    }
}

/// One damped Newton step on the dual margin equations. The Jacobian
/// [[Dr, S], [S^T, Dc]] has the constant shift (1, -1) in its kernel, so one
/// column variable is pinned and the remaining system is reduced to a Schur
/// complement on the smaller side. Returns false when no step length
/// improved the residual.
fn newton_step(
    a: &mut [f64],
    c: &mut [f64],
    rt: &[f64],
    ct: &[f64],
    sp: &mut [f64],
    res: f64,
    residual: &dyn Fn(&[f64], &[f64]) -> f64,
) -> bool {
    let ma = rt.len();
    let nc = ct.len();
    let swap = ma > nc;
    // work with u (small side, kept) and v (large side, eliminated)
    let (u, v, ut, vt, nu, nv): (&mut [f64], &mut [f64], &[f64], &[f64], usize, usize) = if swap {
        (c, a, ct, rt, nc, ma)
    } else {
        (a, c, rt, ct, ma, nc)
    };

    // sp[p * nv + q] = sigma'(u_p + v_q); margins and errors in the same pass
    let mut du = vec![0.0f64; nu];
    let mut dv = vec![0.0f64; nv];
    let mut fu = vec![0.0f64; nu];
    let mut fv = vec![0.0f64; nv];
    for p in 0..nu {
        for q in 0..nv {
            let s = sigmoid(u[p] + v[q]);
            let d = s * (1.0 - s);
            sp[p * nv + q] = d;
            du[p] += d;
            dv[q] += d;
            fu[p] += s;
            fv[q] += s;
        }
    }
    for p in 0..nu {
        fu[p] -= ut[p];
    }
    for q in 0..nv {
        fv[q] -= vt[q];
    }

    // Schur complement H = Du - S' Dv'^-1 S'^T with the last v pinned
    let mut h = vec![0.0f64; nu * nu];
    let mut rhs = vec![0.0f64; nu];
    for p in 0..nu {
        h[p * nu + p] = du[p];
        rhs[p] = -fu[p];
    }
    for q in 0..nv.saturating_sub(1) {
        let d = dv[q].max(1e-12);
        for p in 0..nu {
            let spq = sp[p * nv + q];
            rhs[p] += spq * fv[q] / d;
            for r in 0..=p {
                h[p * nu + r] -= spq * sp[r * nv + q] / d;
            }
        }
    }

    let delta_u = match cholesky_solve(&h, &rhs, nu) {
        Some(d) => d,
        None => return false,
    };
    let mut delta_v = vec![0.0f64; nv];
    for q in 0..nv.saturating_sub(1) {
        let d = dv[q].max(1e-12);
        let mut dot = 0.0;
        for p in 0..nu {
            dot += sp[p * nv + q] * delta_u[p];
        }
        delta_v[q] = (-fv[q] - dot) / d;
    }

    // backtracking line search on the margin residual
    let mut t = 1.0f64;
    for _ in 0..14 {
        let ua: Vec<f64> = u
            .iter()
            .zip(&delta_u)
            .map(|(x, d)| (x + t * d.clamp(-30.0, 30.0)).clamp(-50.0, 50.0))
            .collect();
        let va: Vec<f64> = v
            .iter()
            .zip(&delta_v)
            .map(|(x, d)| (x + t * d.clamp(-30.0, 30.0)).clamp(-50.0, 50.0))
            .collect();
        let new_res = if swap { residual(&va, &ua) } else { residual(&ua, &va) };
        if new_res < res {
            u.copy_from_slice(&ua);
            v.copy_from_slice(&va);
            return true;
        }
        t *= 0.5;
    }
    false
}

/// Dense Cholesky solve of `h x = rhs` using the lower triangle of `h`.
/// Returns None if the matrix is not positive definite even after a small
/// diagonal boost.
fn cholesky_solve(h: &[f64], rhs: &[f64], n: usize) -> Option<Vec<f64>> {
    if n == 0 {
        return Some(Vec::new());
    }
    let max_diag = (0..n).map(|i| h[i * n + i]).fold(0.0f64, f64::max);
    for attempt in 0..2 {
        let mut l = h.to_vec();
        if attempt == 1 {
            let boost = (max_diag * 1e-10).max(1e-12);
            for i in 0..n {
                l[i * n + i] += boost;
            }
        }
        if let Some(x) = try_cholesky(&mut l, rhs, n) {
            return Some(x);
        }
    }
    None
}

fn try_cholesky(l: &mut [f64], rhs: &[f64], n: usize) -> Option<Vec<f64>> {
    for k in 0..n {
        let mut pivot = l[k * n + k];
        for q in 0..k {
            pivot -= l[k * n + q] * l[k * n + q];
        }
        if pivot <= 0.0 {
            return None;
        }
        let pk = pivot.sqrt();
        l[k * n + k] = pk;
        for i in k + 1..n {
            let mut v = l[i * n + k];
            for q in 0..k {
                v -= l[i * n + q] * l[k * n + q];
            }
            l[i * n + k] = v / pk;
        }
    }
    let mut y = rhs.to_vec();
    for i in 0..n {
        for q in 0..i {
            y[i] -= l[i * n + q] * y[q];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for q in i + 1..n {
            y[i] -= l[q * n + i] * y[q];
        }
        y[i] /= l[i * n + i];
    }
    Some(y)
}

fn validate_pb(probs: &[f64], k: usize) -> Result<()> {
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidInput(format!(
            "Poisson-binomial parameter {p} is outside [0, 1]"
        )));
    }
    if k > probs.len() {
        return Err(Error::InvalidInput(format!(
            "count {k} exceeds the number of parameters {}",
            probs.len()
        )));
    }
    Ok(())
}

fn pb_moments(probs: impl Iterator<Item = f64>) -> (f64, f64, f64) {
    let (mut mu, mut var, mut m3) = (0.0, 0.0, 0.0);
    for p in probs {
        let q = 1.0 - p;
        mu += p;
        var += p * q;
        m3 += p * q * (q - p);
    }
    (mu, var, m3)
}

/// Refined-normal CDF `F(x) = clamp01[Phi(z) + gamma (1 - z^2) phi(z) / 6]`
/// with `z = (x + 0.5 - mu) / sigma`.
fn rna_cdf(mu: f64, sigma: f64, gamma: f64, x: f64) -> f64 {
    let z = (x + 0.5 - mu) / sigma;
    if !z.is_finite() {
        return if z > 0.0 { 1.0 } else { 0.0 };
    }
    let mut f = normal_cdf(z);
    let corr = gamma * (1.0 - z * z) * normal_pdf(z) / 6.0;
    if corr.is_finite() {
        f += corr;
    }
    f.clamp(0.0, 1.0)
}

struct RnaTails {
    mu: f64,
    sigma: f64,
    gamma: f64,
}

impl RnaTails {
    fn from_moments(mu: f64, var: f64, m3: f64) -> Self {
        let sigma = var.sqrt();
        let gamma = if var > 0.0 { m3 / (var * sigma) } else { 0.0 };
        Self { mu, sigma, gamma }
    }

    /// (P(X >= k), P(X <= k)) with mass at k counted in both and the CDF
    /// forced monotone between k-1 and k.
    fn both(&self, k: usize) -> (f64, f64) {
        if self.sigma == 0.0 {
            // deterministic count: point mass at mu
            let k = k as f64;
            return (
                if k <= self.mu { 1.0 } else { 0.0 },
                if k >= self.mu { 1.0 } else { 0.0 },
            );
        }
        let f0 = if k == 0 {
            0.0
        } else {
            rna_cdf(self.mu, self.sigma, self.gamma, k as f64 - 1.0)
        };
        let f1 = rna_cdf(self.mu, self.sigma, self.gamma, k as f64).max(f0);
        (1.0 - f0, f1)
    }
}

/// Refined-normal approximation of the upper tail `P(X >= k)` of a
/// Poisson-binomial variable.
pub fn poisson_binomial_upper_rna(probs: &[f64], k: usize) -> Result<f64> {
    validate_pb(probs, k)?;
    let (mu, var, m3) = pb_moments(probs.iter().copied());
    Ok(RnaTails::from_moments(mu, var, m3).both(k).0)
}

/// Refined-normal approximation of the lower tail `P(X <= k)`.
pub fn poisson_binomial_lower_rna(probs: &[f64], k: usize) -> Result<f64> {
    validate_pb(probs, k)?;
    if k == probs.len() {
        return Ok(1.0);
    }
    let (mu, var, m3) = pb_moments(probs.iter().copied());
    Ok(RnaTails::from_moments(mu, var, m3).both(k).1)
}

/// Full Poisson-binomial probability mass function by convolution,
/// `result[x] = P(X = x)`.
pub fn poisson_binomial_distribution(probs: &[f64]) -> Result<Vec<f64>> {
    validate_pb(probs, 0)?;
    let mut dist = vec![0.0f64; probs.len() + 1];
    dist[0] = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        for x in (1..=i + 1).rev() {
            dist[x] = dist[x] * (1.0 - p) + dist[x - 1] * p;
        }
        dist[0] *= 1.0 - p;
    }
    Ok(dist)
}

/// Exact Poisson-binomial tail by convolution; O(n^2), intended as an
/// oracle for the refined normal approximation rather than a production
/// path.
pub fn poisson_binomial_exact(probs: &[f64], k: usize, tail: Tail) -> Result<f64> {
    validate_pb(probs, k)?;
    let dist = poisson_binomial_distribution(probs)?;
    let sum: f64 = match tail {
        Tail::Upper => dist[k..].iter().sum(),
        Tail::Lower => dist[..=k].iter().sum(),
    };
    Ok(sum.min(1.0))
}

/// Stochastic degree sequence model over all agent pairs of `b`.
pub fn sdsm(b: &BipartiteGraph, method: ProbabilityMethod) -> Result<NullModelResult> {
    let start = Instant::now();
    let mut summary = ModelSummary::for_graph("sdsm", b)?;
    summary
        .extra
        .insert("probability_method".into(), serde_json::json!(method.to_string()));
    let p = match method {
        ProbabilityMethod::Ratio => probability_matrix_ratio(b)?,
        ProbabilityMethod::Polytope => {
            probability_matrix_polytope(b, POLYTOPE_TOL, POLYTOPE_MAX_ITER)?
        }
    };

    let g = b.project();
    let m = b.rows();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let tails: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (ri, rj) = (p.row(i), p.row(j));
            let (mu, var, m3) = pb_moments(ri.iter().zip(rj).map(|(x, y)| x * y));
            RnaTails::from_moments(mu, var, m3).both(g.weight(i, j) as usize)
        })
        .collect();

    let mut positive = SquareMatrix::<f64>::new(m);
    let mut negative = SquareMatrix::<f64>::new(m);
    for i in 0..m {
        positive.set(i, i, 1.0);
        negative.set(i, i, 1.0);
    }
    for (&(i, j), &(up, lo)) in pairs.iter().zip(&tails) {
        positive.set_sym(i, j, up);
        negative.set_sym(i, j, lo);
    }
    summary.runtime_seconds = start.elapsed().as_secs_f64();
    NullModelResult::new(b.row_labels().to_vec(), positive, negative, summary)
}
