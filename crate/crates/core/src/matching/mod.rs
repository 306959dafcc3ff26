//! Labelled graph matching through a relaxed quadratic assignment problem.
//!
//! For graphs with adjacency `A`, `B` (padded to a common size `n`) and a
//! label fitness matrix `C`, the matching objective at a permutation matrix
//! `P` is
//!
//! ```text
//! phi(P) = (1 - nu) |A - P B P^T|^2 / (|A|^2 + |B|^2) - nu <C, P> / |C|
//! ```
//!
//! It is minimised over doubly stochastic matrices using the convex form
//! `|A P - P B|^2` of the structural term (equal to the above on
//! permutations) by conditional gradient with exact line search, then the
//! solution is projected to a permutation by linear assignment.

mod lap;
mod matrix;

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::{DetectionType, Gender, Orientation, Snapshot};
use crate::math;

pub use lap::solve as linear_assignment;
pub use matrix::Matrix;
use matrix::SparseRows;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchError {
    #[error("dimension mismatch: {0}")]
    Dimension(&'static str),
    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),
    #[error("invalid matching parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("exhaustive matching limited to {max} vertices, got {size}")]
    TooLarge { size: usize, max: usize },
    #[error("snapshot sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("empty snapshot sequence")]
    Empty,
}

/// Graph with symmetric adjacency and one label row per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelledGraph {
    adjacency: Matrix,
    labels: Matrix,
}

/// Covariates per detected vertex: gender, orientation, detection day,
/// detection type.
pub const LABEL_DIM: usize = 4;

impl LabelledGraph {
    pub fn new(adjacency: Matrix, labels: Matrix) -> Result<Self, MatchError> {
        if !adjacency.is_square() || adjacency.rows() != labels.rows() {
            return Err(MatchError::Dimension(
                "adjacency must be n x n with n label rows",
            ));
        }
        if !adjacency.is_finite() {
            return Err(MatchError::NonFinite("adjacency"));
        }
        if !labels.is_finite() {
            return Err(MatchError::NonFinite("labels"));
        }
        let n = adjacency.rows();
        for i in 0..n {
            for j in 0..i {
                if adjacency[(i, j)] != adjacency[(j, i)] {
                    return Err(MatchError::Dimension("adjacency must be symmetric"));
                }
            }
        }
        Ok(Self { adjacency, labels })
    }

    /// Unweighted graph on `n` vertices with the given label rows.
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize)],
        labels: Matrix,
    ) -> Result<Self, MatchError> {
        let mut a = Matrix::zeros(n, n);
        for &(i, j) in edges {
            if i >= n || j >= n || i == j {
                return Err(MatchError::Dimension("edge endpoint out of range"));
            }
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        Self::new(a, labels)
    }

    pub fn from_snapshot(snapshot: &Snapshot) -> Self {
        let n = snapshot.len();
        let mut labels = Matrix::zeros(n, LABEL_DIM);
        for (k, (_, obs)) in snapshot.vertices.iter().enumerate() {
            let row = labels.row_mut(k);
            row[0] = f64::from(u8::from(obs.gender == Gender::Female));
            row[1] = f64::from(u8::from(obs.orientation == Orientation::Bisexual));
            row[2] = obs.detection_time;
            row[3] = f64::from(u8::from(obs.detection_type == DetectionType::ContactTraced));
        }
        let mut a = Matrix::zeros(n, n);
        for &(u, v) in &snapshot.edges {
            if let (Some(i), Some(j)) = (snapshot.position(u), snapshot.position(v)) {
                a[(i, j)] = 1.0;
                a[(j, i)] = 1.0;
            }
        }
        Self {
            adjacency: a,
            labels,
        }
    }

    pub fn len(&self) -> usize {
        self.adjacency.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn adjacency(&self) -> &Matrix {
        &self.adjacency
    }

    pub fn labels(&self) -> &Matrix {
        &self.labels
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchParams {
    /// Trade-off between label fit (1) and structure (0).
    pub nu: f64,
    /// Adjacency value for padded (dummy) vertex pairs.
    pub xi: f64,
    /// Label fitness of a padded row or column.
    pub label_pad: f64,
    pub max_iter: usize,
    /// Relative objective decrease below which iteration stops.
    pub tol: f64,
    /// Sweeps of pairwise-swap descent applied to the projected permutation.
    pub refine_passes: usize,
}

impl Default for MatchParams {
    fn default() -> Self {
        Self {
            nu: 0.2,
            xi: 0.0,
            label_pad: 1.0,
            max_iter: 100,
            tol: 1e-6,
            refine_passes: 20,
        }
    }
}

impl MatchParams {
    pub fn validate(&self) -> Result<(), MatchError> {
        if !(0.0..=1.0).contains(&self.nu) {
            return Err(MatchError::InvalidParameter("nu must lie in [0, 1]"));
        }
        if !(self.xi >= 0.0) || !self.xi.is_finite() {
            return Err(MatchError::InvalidParameter(
                "xi must be finite and non-negative",
            ));
        }
        if !self.label_pad.is_finite() {
            return Err(MatchError::NonFinite("label pad"));
        }
        if self.max_iter == 0 {
            return Err(MatchError::InvalidParameter("max_iter must be positive"));
        }
        if !(self.tol >= 0.0) {
            return Err(MatchError::InvalidParameter("tol must be non-negative"));
        }
        Ok(())
    }
}

/// Label fitness matrix (`n x m`, unpadded) in `[0, 1]`, 1 being the best fit.
///
/// Columns of the stacked label matrix are scaled to unit norm, rows are
/// compared by Euclidean distance, and distances are mapped affinely so the
/// smallest becomes 1 and the largest 0. Equal distances give all ones.
pub fn label_cost(x: &Matrix, y: &Matrix) -> Result<Matrix, MatchError> {
    if x.cols() != y.cols() {
        return Err(MatchError::Dimension("label matrices differ in width"));
    }
    let (n, m, d) = (x.rows(), y.rows(), x.cols());
    if n == 0 || m == 0 {
        return Ok(Matrix::zeros(n, m));
    }
    let scale: Vec<f64> = (0..d)
        .map(|c| {
            let sq: f64 = (0..n).map(|i| x[(i, c)] * x[(i, c)]).sum::<f64>()
                + (0..m).map(|j| y[(j, c)] * y[(j, c)]).sum::<f64>();
            let norm = math::sqrt(sq);
            if norm > 0.0 {
                1.0 / norm
            } else {
                0.0
            }
        })
        .collect();
    let mut dist = Matrix::zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            let sq: f64 = (0..d)
                .map(|c| {
                    let diff = (x[(i, c)] - y[(j, c)]) * scale[c];
                    diff * diff
                })
                .sum();
            dist[(i, j)] = math::sqrt(sq);
        }
    }
    let (lo, hi) = (dist.min(), dist.max());
    let mut cost = Matrix::filled(n, m, 1.0);
    if hi > lo {
        for i in 0..n {
            for j in 0..m {
                cost[(i, j)] = (hi - dist[(i, j)]) / (hi - lo);
            }
        }
    }
    Ok(cost)
}

/// `A` padded with `xi` to size `n`; padded diagonal entries stay 0.
fn pad_adjacency(a: &Matrix, n: usize, xi: f64) -> Matrix {
    let mut out = a.padded(n, xi);
    for i in a.rows()..n {
        out[(i, i)] = 0.0;
    }
    out
}

/// Normalised matching objective at a doubly stochastic `p`, with the
/// structural term `|A - P B P^T|^2`.
pub fn qap_objective(
    a: &Matrix,
    b: &Matrix,
    c: &Matrix,
    p: &Matrix,
    nu: f64,
) -> Result<f64, MatchError> {
    let n = a.rows();
    for m in [a, b, c, p] {
        if m.rows() != n || m.cols() != n {
            return Err(MatchError::Dimension("all matrices must be n x n"));
        }
    }
    let pbp = p.matmul(b).matmul(&p.transpose());
    let mut diff = a.clone();
    for i in 0..n {
        for j in 0..n {
            diff[(i, j)] -= pbp[(i, j)];
        }
    }
    let (sc, lc) = coefficients(a, b, c, nu);
    Ok(sc * diff.frobenius_sq() - lc * c.dot(p))
}

fn coefficients(a: &Matrix, b: &Matrix, c: &Matrix, nu: f64) -> (f64, f64) {
    let z = a.frobenius_sq() + b.frobenius_sq();
    let structural = if z > 0.0 { (1.0 - nu) / z } else { 0.0 };
    let c_norm = math::sqrt(c.frobenius_sq());
    let label = if c_norm > 0.0 { nu / c_norm } else { 0.0 };
    (structural, label)
}

/// A padded matching instance.
#[derive(Clone, Debug)]
pub struct MatchProblem {
    a: Matrix,
    b: Matrix,
    cost: Matrix,
    a_sparse: SparseRows,
    b_sparse: SparseRows,
    structural: f64,
    label: f64,
    nu: f64,
}

impl MatchProblem {
    pub fn new(
        g: &LabelledGraph,
        h: &LabelledGraph,
        params: &MatchParams,
    ) -> Result<Self, MatchError> {
        params.validate()?;
        let n = g.len().max(h.len());
        let cost = label_cost(g.labels(), h.labels())?.padded(n, params.label_pad);
        let a = pad_adjacency(g.adjacency(), n, params.xi);
        let b = pad_adjacency(h.adjacency(), n, params.xi);
        Ok(Self::from_matrices(a, b, cost, params.nu))
    }

    /// Instance from already padded `n x n` matrices.
    pub fn from_matrices(a: Matrix, b: Matrix, cost: Matrix, nu: f64) -> Self {
        let (structural, label) = coefficients(&a, &b, &cost, nu);
        Self {
            a_sparse: SparseRows::from_dense(&a),
            b_sparse: SparseRows::from_dense(&b),
            a,
            b,
            cost,
            structural,
            label,
            nu,
        }
    }

    pub fn size(&self) -> usize {
        self.a.rows()
    }

    pub fn cost(&self) -> &Matrix {
        &self.cost
    }

    /// `phi` at the permutation `perm` (vertex `i` of the first graph matched
    /// to vertex `perm[i]` of the second).
    pub fn objective_at(&self, perm: &[usize]) -> f64 {
        let n = self.size();
        let mut structural = 0.0;
        for i in 0..n {
            let (ai, pi) = (self.a.row(i), perm[i]);
            for k in 0..n {
                let d = ai[k] - self.b[(pi, perm[k])];
                structural += d * d;
            }
        }
        let label: f64 = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| self.cost[(i, j)])
            .sum();
        self.structural * structural - self.label * label
    }

    /// Change of `phi` when the images of `i` and `j` under `perm` are swapped.
    pub fn swap_delta(&self, perm: &[usize], i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let n = self.size();
        let image = |k: usize, swapped: bool| match (swapped, k) {
            (true, k) if k == i => perm[j],
            (true, k) if k == j => perm[i],
            _ => perm[k],
        };
        let term = |a: usize, b: usize, swapped: bool| {
            let d = self.a[(a, b)] - self.b[(image(a, swapped), image(b, swapped))];
            d * d
        };
        let mut delta = 0.0;
        for k in 0..n {
            for (a, b) in [(i, k), (j, k)] {
                delta += term(a, b, true) - term(a, b, false);
            }
            if k != i && k != j {
                for (a, b) in [(k, i), (k, j)] {
                    delta += term(a, b, true) - term(a, b, false);
                }
            }
        }
        let label = self.cost[(i, perm[j])] + self.cost[(j, perm[i])]
            - self.cost[(i, perm[i])]
            - self.cost[(j, perm[j])];
        self.structural * delta - self.label * label
    }

    /// Pairwise-swap descent on `phi`, at most `passes` sweeps. Returns the
    /// number of swaps applied.
    pub fn refine(&self, perm: &mut [usize], passes: usize) -> usize {
        let n = self.size();
        let mut swaps = 0;
        for _ in 0..passes {
            let mut improved = false;
            for i in 0..n {
                for j in i + 1..n {
                    if self.swap_delta(perm, i, j) < -1e-12 {
                        perm.swap(i, j);
                        swaps += 1;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        swaps
    }

    /// `phi` at a doubly stochastic `p`, in the `|A - P B P^T|` form.
    pub fn qap_objective(&self, p: &Matrix) -> f64 {
        qap_objective(&self.a, &self.b, &self.cost, p, self.nu).expect("square by construction")
    }

    /// Convex relaxation `(1 - nu)|AP - PB|^2 / Z - nu <C, P> / |C|`.
    pub fn relaxed_objective(&self, p: &Matrix) -> f64 {
        let r = self.residual(p);
        self.structural * r.frobenius_sq() - self.label * self.cost.dot(p)
    }

    fn residual(&self, p: &Matrix) -> Matrix {
        let mut r = self.a_sparse.left_mul(p);
        let pb = self.b_sparse.right_mul(p);
        for i in 0..self.size() {
            for (x, y) in r.row_mut(i).iter_mut().zip(pb.row(i)) {
                *x -= y;
            }
        }
        r
    }
}

/// Conditional-gradient (Frank-Wolfe) iterate over doubly stochastic
/// matrices, started at the barycenter.
#[derive(Clone, Debug)]
pub struct ConditionalGradient<'a> {
    problem: &'a MatchProblem,
    plan: Matrix,
    residual: Matrix,
    value: f64,
    iterations: usize,
    best_vertex: Option<(Vec<usize>, f64)>,
}

impl<'a> ConditionalGradient<'a> {
    pub fn new(problem: &'a MatchProblem) -> Self {
        let n = problem.size();
        let plan = if n == 0 {
            Matrix::zeros(0, 0)
        } else {
            Matrix::filled(n, n, 1.0 / n as f64)
        };
        let residual = problem.residual(&plan);
        let value =
            problem.structural * residual.frobenius_sq() - problem.label * problem.cost.dot(&plan);
        Self {
            problem,
            plan,
            residual,
            value,
            iterations: 0,
            best_vertex: None,
        }
    }

    /// Best permutation, by `phi`, among the linear-minimisation vertices
    /// visited so far.
    pub fn best_vertex(&self) -> Option<(&[usize], f64)> {
        self.best_vertex.as_ref().map(|(p, v)| (p.as_slice(), *v))
    }

    pub fn plan(&self) -> &Matrix {
        &self.plan
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// One iteration. Returns the new relaxed objective, or `None` when no
    /// descent direction remains.
    pub fn step(&mut self) -> Option<f64> {
        let p = self.problem;
        let n = p.size();
        if n == 0 {
            return None;
        }
        self.iterations += 1;
        // gradient: 2 s (A R - R B) - l C, with A and B symmetric
        let mut grad = p.a_sparse.left_mul(&self.residual);
        let rb = p.b_sparse.right_mul(&self.residual);
        for i in 0..n {
            let (g, rb, c) = (grad.row_mut(i), rb.row(i), p.cost.row(i));
            for j in 0..n {
                g[j] = 2.0 * p.structural * (g[j] - rb[j]) - p.label * c[j];
            }
        }
        let vertex = lap::solve(&grad);
        let vertex_phi = p.objective_at(&vertex);
        if self
            .best_vertex
            .as_ref()
            .map_or(true, |(_, v)| vertex_phi < *v)
        {
            self.best_vertex = Some((vertex.clone(), vertex_phi));
        }

        // Q = (A S - S B) - R along D = S - P
        let mut inverse = vec![0usize; n];
        for (i, &j) in vertex.iter().enumerate() {
            inverse[j] = i;
        }
        let mut q = Matrix::zeros(n, n);
        for i in 0..n {
            let si = vertex[i];
            for j in 0..n {
                q[(i, j)] = p.a[(i, inverse[j])] - p.b[(si, j)] - self.residual[(i, j)];
            }
        }
        let label_slope =
            (0..n).map(|i| p.cost[(i, vertex[i])]).sum::<f64>() - p.cost.dot(&self.plan);
        let slope = 2.0 * p.structural * self.residual.dot(&q) - p.label * label_slope;
        if !(slope < 0.0) {
            return None;
        }
        let curvature = p.structural * q.frobenius_sq();
        let t = if curvature > 0.0 {
            (-slope / (2.0 * curvature)).min(1.0)
        } else {
            1.0
        };
        for i in 0..n {
            let row = self.plan.row_mut(i);
            row.iter_mut().for_each(|x| *x *= 1.0 - t);
            row[vertex[i]] += t;
            for (r, qv) in self.residual.row_mut(i).iter_mut().zip(q.row(i)) {
                *r += t * qv;
            }
        }
        let next = self.value + t * slope + t * t * curvature;
        self.value = next.min(self.value);
        Some(self.value)
    }
}

/// Conditional gradient on the indefinite form
/// `-2 s tr(A P B P^T) - l <C, P>`, which differs from `phi` by a constant on
/// permutations. Started from the convex solution it leaves symmetric
/// fractional optima for a vertex.
fn indefinite_descent(problem: &MatchProblem, mut plan: Matrix, max_iter: usize) -> Matrix {
    let n = problem.size();
    let (s, l) = (problem.structural, problem.label);
    let mut apb = problem
        .b_sparse
        .right_mul(&problem.a_sparse.left_mul(&plan));
    for _ in 0..max_iter {
        let mut grad = Matrix::zeros(n, n);
        for i in 0..n {
            let (g, m, c) = (grad.row_mut(i), apb.row(i), problem.cost.row(i));
            for j in 0..n {
                g[j] = -4.0 * s * m[j] - l * c[j];
            }
        }
        let vertex = lap::solve(&grad);
        let mut inverse = vec![0usize; n];
        for (i, &j) in vertex.iter().enumerate() {
            inverse[j] = i;
        }
        // E = A D B with D = S - P
        let mut a_s = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a_s[(i, j)] = problem.a[(i, inverse[j])];
            }
        }
        let mut e = problem.b_sparse.right_mul(&a_s);
        for i in 0..n {
            for (x, m) in e.row_mut(i).iter_mut().zip(apb.row(i)) {
                *x -= m;
            }
        }
        let mut d = plan.clone();
        for i in 0..n {
            d.row_mut(i).iter_mut().for_each(|x| *x = -*x);
            d[(i, vertex[i])] += 1.0;
        }
        let slope = -4.0 * s * apb.dot(&d) - l * problem.cost.dot(&d);
        let curvature = -2.0 * s * e.dot(&d);
        let t = if curvature > 0.0 {
            (-slope / (2.0 * curvature)).clamp(0.0, 1.0)
        } else if slope + curvature < 0.0 {
            1.0
        } else {
            0.0
        };
        if !(t > 0.0) || !(slope < 0.0) {
            break;
        }
        for i in 0..n {
            for (p, dv) in plan.row_mut(i).iter_mut().zip(d.row(i)) {
                *p += t * dv;
            }
            for (m, ev) in apb.row_mut(i).iter_mut().zip(e.row(i)) {
                *m += t * ev;
            }
        }
        if t >= 1.0 {
            break;
        }
    }
    plan
}

/// Outcome of a matching.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchResult {
    /// `permutation[i]` is the vertex of the second (padded) graph matched to
    /// vertex `i` of the first.
    pub permutation: Vec<usize>,
    /// Objective at `permutation`.
    pub phi: f64,
    /// Relaxed objective at the final doubly stochastic iterate.
    pub relaxed_phi: f64,
    pub iterations: usize,
    /// Relaxed objective at the start and after each iteration.
    pub objective_trace: Vec<f64>,
}

/// Matches `g` to `h`: conditional gradient on the relaxation, then
/// projection of the doubly stochastic solution to the closest permutation.
/// The projection and the best permutation vertex met during the iteration
/// are both polished by swap descent; the better one is returned.
pub fn solve_match(
    g: &LabelledGraph,
    h: &LabelledGraph,
    params: &MatchParams,
) -> Result<MatchResult, MatchError> {
    let problem = MatchProblem::new(g, h, params)?;
    Ok(solve_problem(&problem, params))
}

pub fn solve_problem(problem: &MatchProblem, params: &MatchParams) -> MatchResult {
    let n = problem.size();
    let mut cg = ConditionalGradient::new(problem);
    let mut trace = vec![cg.value()];
    while cg.iterations() < params.max_iter {
        let before = cg.value();
        let Some(after) = cg.step() else { break };
        trace.push(after);
        let scale = math::abs(before).max(f64::MIN_POSITIVE);
        if before - after <= params.tol * scale {
            break;
        }
    }
    let mut negated = indefinite_descent(problem, cg.plan().clone(), params.max_iter);
    for i in 0..n {
        negated.row_mut(i).iter_mut().for_each(|x| *x = -*x);
    }
    let mut permutation = lap::solve(&negated);
    problem.refine(&mut permutation, params.refine_passes);
    let mut phi = problem.objective_at(&permutation);
    if let Some((vertex, _)) = cg.best_vertex() {
        let mut candidate = vertex.to_vec();
        problem.refine(&mut candidate, params.refine_passes);
        let value = problem.objective_at(&candidate);
        if value < phi {
            phi = value;
            permutation = candidate;
        }
    }
    MatchResult {
        phi,
        relaxed_phi: cg.value(),
        iterations: cg.iterations().max(1),
        objective_trace: trace,
        permutation,
    }
}

pub const BRUTE_FORCE_MAX: usize = 8;

/// Exact minimum of `phi` over all permutations; padded size at most 8.
pub fn brute_force_match(
    g: &LabelledGraph,
    h: &LabelledGraph,
    params: &MatchParams,
) -> Result<MatchResult, MatchError> {
    let problem = MatchProblem::new(g, h, params)?;
    brute_force_problem(&problem)
}

pub fn brute_force_problem(problem: &MatchProblem) -> Result<MatchResult, MatchError> {
    let n = problem.size();
    if n > BRUTE_FORCE_MAX {
        return Err(MatchError::TooLarge {
            size: n,
            max: BRUTE_FORCE_MAX,
        });
    }
    // Heap's algorithm
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = perm.clone();
    let mut best_value = problem.objective_at(&perm);
    let mut count = 1usize;
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            count += 1;
            let value = problem.objective_at(&perm);
            if value < best_value {
                best_value = value;
                best.copy_from_slice(&perm);
            }
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(MatchResult {
        permutation: best,
        phi: best_value,
        relaxed_phi: best_value,
        iterations: count,
        objective_trace: vec![best_value],
    })
}

/// Normalised weights `omega (1 - omega)^(K - i)` for `i = 0..=K`.
pub fn temporal_weights(len: usize, omega: f64) -> Result<Vec<f64>, MatchError> {
    if len == 0 {
        return Err(MatchError::Empty);
    }
    if !(omega > 0.0 && omega <= 1.0) {
        return Err(MatchError::InvalidParameter("omega must lie in (0, 1]"));
    }
    let k = len - 1;
    let raw: Vec<f64> = (0..len)
        .map(|i| omega * math::powf(1.0 - omega, (k - i) as f64))
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Exponentially weighted mean of per-snapshot objectives, later snapshots
/// weighing more.
pub fn weighted_objective(phis: &[f64], omega: f64) -> Result<f64, MatchError> {
    let w = temporal_weights(phis.len(), omega)?;
    Ok(w.iter().zip(phis).map(|(w, p)| w * p).sum())
}

#[derive(Clone, Debug, PartialEq)]
pub struct TemporalMatch {
    pub value: f64,
    pub per_snapshot: Vec<f64>,
}

/// Time-weighted matching objective between two snapshot sequences taken on
/// the same subdivision.
pub fn temporal_objective(
    observed: &[Snapshot],
    simulated: &[Snapshot],
    omega: f64,
    params: &MatchParams,
) -> Result<TemporalMatch, MatchError> {
    if observed.len() != simulated.len() {
        return Err(MatchError::LengthMismatch(observed.len(), simulated.len()));
    }
    let per_snapshot = observed
        .iter()
        .zip(simulated)
        .map(|(a, b)| {
            solve_match(
                &LabelledGraph::from_snapshot(a),
                &LabelledGraph::from_snapshot(b),
                params,
            )
            .map(|r| r.phi)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TemporalMatch {
        value: weighted_objective(&per_snapshot, omega)?,
        per_snapshot,
    })
}
