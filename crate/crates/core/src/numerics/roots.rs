//! Simultaneous root finding for monic polynomials (Aberth–Ehrlich) with
//! multiplicity recovery.
//!
//! Aberth iterates converge to a multiple root of multiplicity `m` only up to
//! a ring of radius about `eps^(1/m)`. After iterating, the approximations
//! are grouped by single-linkage clustering; the coarsest grouping whose
//! expanded product still reproduces the input coefficients (a backward
//! error test) is kept, and each group is replaced by its refined centre
//! repeated `m` times.

use num_complex::Complex64;

use super::{expand_roots, horner, MonicPoly};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 200;
/// Normalised coefficient residual allowed when merging approximations into
/// a multiple root.
pub const DEFAULT_MERGE_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSolver {
    pub tol: f64,
    pub max_iter: usize,
    pub merge_tol: f64,
}

impl Default for RootSolver {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            merge_tol: DEFAULT_MERGE_TOL,
        }
    }
}

/// Roots of `p` with multiplicity, using the default merge tolerance.
pub fn monic_roots(p: &MonicPoly, tol: f64, max_iter: usize) -> Result<Vec<Complex64>> {
    RootSolver {
        tol,
        max_iter,
        ..RootSolver::default()
    }
    .solve(p)
}

impl RootSolver {
    /// Returns the `N` roots of `p`, sorted by real then imaginary part.
    /// Repeated roots are returned as bit-identical values.
    pub fn solve(&self, p: &MonicPoly) -> Result<Vec<Complex64>> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tol must be positive".into()));
        }
        if p.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        let n = p.degree();
        if n == 0 {
            return Ok(Vec::new());
        }
        let desc = p.descending();
        let center = p.coeffs[0] / n as f64;
        let shifted = taylor_shift(&desc, center);
        let radius = (1..=n)
            .map(|k| shifted[k].norm().powf(1.0 / k as f64))
            .fold(0.0, f64::max);
        if radius == 0.0 {
            return Ok(vec![center; n]);
        }

        let mut z = initial_circle(center, radius, n);
        aberth(&desc, &mut z, self.max_iter);
        if z.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
            return Err(Error::NoConvergence {
                max_iter: self.max_iter,
            });
        }

        let mut roots = cluster_multiple_roots(&desc, &z, self.merge_tol);
        let coeff_scale = 1.0 + desc.iter().skip(1).map(|c| c.norm()).fold(0.0, f64::max);
        let worst = roots.iter().map(|&r| horner(&desc, r).norm()).fold(0.0, f64::max);
        if worst > self.tol * coeff_scale {
            return Err(Error::NoConvergence {
                max_iter: self.max_iter,
            });
        }
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Ok(roots)
    }
}

fn initial_circle(center: Complex64, radius: f64, n: usize) -> Vec<Complex64> {
    // The angular offset keeps starting points off the real axis and away
    // from conjugate-symmetric configurations.
    (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            center + Complex64::from_polar(radius, theta)
        })
        .collect()
}

fn aberth(desc: &[Complex64], z: &mut [Complex64], max_iter: usize) {
    let n = z.len();
    let deriv = derivative(desc);
    for _ in 0..max_iter {
        let mut worst = 0.0f64;
        for i in 0..n {
            let zi = z[i];
            let pv = horner(desc, zi);
            if pv == Complex64::new(0.0, 0.0) {
                continue;
            }
            let dv = horner(&deriv, zi);
            let ratio = if dv == Complex64::new(0.0, 0.0) {
                // Stationary point: nudge along the value instead.
                pv * 1e-3
            } else {
                pv / dv
            };
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i && zj != zi {
                    repulsion += (zi - zj).inv();
                }
            }
            let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
            let w = if denom.norm() == 0.0 { ratio } else { ratio / denom };
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[i] = zi - w;
            worst = worst.max(w.norm() / (1.0 + zi.norm()));
        }
        if worst <= 2.0 * f64::EPSILON {
            break;
        }
    }
}

/// Descending coefficients of the derivative.
fn derivative(desc: &[Complex64]) -> Vec<Complex64> {
    let deg = desc.len() - 1;
    desc.iter()
        .take(deg)
        .enumerate()
        .map(|(i, &c)| c * (deg - i) as f64)
        .collect()
}

fn nth_derivative(desc: &[Complex64], order: usize) -> Vec<Complex64> {
    (0..order).fold(desc.to_vec(), |d, _| derivative(&d))
}

/// Coefficients of `p(s + c)` in descending powers of `s`.
fn taylor_shift(desc: &[Complex64], c: Complex64) -> Vec<Complex64> {
    let mut a = desc.to_vec();
    let n = a.len() - 1;
    for i in 0..n {
        for j in 1..=(n - i) {
            let prev = a[j - 1];
            a[j] += c * prev;
        }
    }
    a
}

/// Largest coefficient deviation between `prod (t - r)` and `desc`, with
/// the degree-`k` coefficient normalised by `scale^k`.
fn coefficient_residual(desc: &[Complex64], roots: &[Complex64], scale: f64) -> f64 {
    let rebuilt = expand_roots(roots);
    rebuilt
        .iter()
        .zip(desc)
        .enumerate()
        .map(|(k, (a, b))| (a - b).norm() / scale.powi(k as i32))
        .fold(0.0, f64::max)
}

/// Newton iterations on `p^(m-1)`, which has a simple root where `p` has a
/// root of multiplicity `m`. Steps that do not reduce the residual are
/// rejected.
fn refine_center(desc: &[Complex64], start: Complex64, multiplicity: usize) -> Complex64 {
    let q = nth_derivative(desc, multiplicity - 1);
    let dq = derivative(&q);
    if dq.is_empty() {
        return start;
    }
    let mut x = start;
    let mut fx = horner(&q, x).norm();
    for _ in 0..8 {
        let d = horner(&dq, x);
        if d.norm() == 0.0 || fx == 0.0 {
            break;
        }
        let candidate = x - horner(&q, x) / d;
        let fc = horner(&q, candidate).norm();
        if !(fc < fx) {
            break;
        }
        x = candidate;
        fx = fc;
    }
    x
}

fn cluster_multiple_roots(desc: &[Complex64], z: &[Complex64], merge_tol: f64) -> Vec<Complex64> {
    let n = z.len();
    let scale = z.iter().map(|r| r.norm()).fold(1.0, f64::max);

    // Minimum spanning tree edges (Prim) define the single-linkage hierarchy.
    let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(n.saturating_sub(1));
    let mut in_tree = vec![false; n];
    let mut best = vec![(f64::INFINITY, 0usize); n];
    in_tree[0] = true;
    for j in 1..n {
        best[j] = ((z[j] - z[0]).norm(), 0);
    }
    for _ in 1..n {
        let (next, &(d, from)) = best
            .iter()
            .enumerate()
            .filter(|(j, _)| !in_tree[*j])
            .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
            .expect("vertices remain");
        in_tree[next] = true;
        edges.push((d, from, next));
        for j in 0..n {
            if !in_tree[j] {
                let dj = (z[j] - z[next]).norm();
                if dj < best[j].0 {
                    best[j] = (dj, next);
                }
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut k = i;
        while parent[k] != r {
            let next = parent[k];
            parent[k] = r;
            k = next;
        }
        r
    }

    let realise = |parent: &mut Vec<usize>| -> Vec<Complex64> {
        let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
        for i in 0..n {
            let r = find(parent, i);
            match groups.iter_mut().find(|(root, _)| *root == r) {
                Some((_, g)) => g.push(z[i]),
                None => groups.push((r, vec![z[i]])),
            }
        }
        let mut out = Vec::with_capacity(n);
        for (_, g) in groups {
            let m = g.len();
            let centroid = g.iter().sum::<Complex64>() / m as f64;
            let c = refine_center(desc, centroid, m);
            out.extend(std::iter::repeat_n(c, m));
        }
        out
    };

    // Every partition of the single-linkage hierarchy is refitted and scored.
    // Near a cluster the raw iterates are only pseudo-zeros and can score
    // badly, so the reference is the best partition found.
    let raw = refine_structured(desc, z);
    let mut scored = vec![(coefficient_residual(desc, &raw, scale), raw)];
    for &(_, a, b) in &edges {
        let ra = find(&mut parent, a);
        let rb = find(&mut parent, b);
        parent[ra] = rb;
        let candidate = refine_structured(desc, &realise(&mut parent));
        scored.push((coefficient_residual(desc, &candidate, scale), candidate));
    }
    let best = scored.iter().map(|(r, _)| *r).fold(f64::INFINITY, f64::min);
    let threshold = merge_tol.max(8.0 * best);
    scored
        .into_iter()
        .rev()
        .find(|(r, _)| *r <= threshold)
        .map(|(_, roots)| roots)
        .expect("the best partition is within the threshold")
}

/// Distinct values of `roots` with their multiplicities, in first-seen order.
fn multiplicities(roots: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for &r in roots {
        match out.iter_mut().find(|(c, _)| *c == r) {
            Some((_, m)) => *m += 1,
            None => out.push((r, 1)),
        }
    }
    out
}

fn expand_with_multiplicity(centers: &[(Complex64, usize)]) -> Vec<Complex64> {
    let all: Vec<Complex64> = centers
        .iter()
        .flat_map(|&(c, m)| std::iter::repeat_n(c, m))
        .collect();
    expand_roots(&all)
}

/// Gauss–Newton on the centres of a fixed multiplicity structure, fitting
/// `prod (t - c_i)^m_i` to `desc`. A simple root next to a high-order
/// cluster is badly determined by `p` alone but well determined once the
/// cluster is known to be a single repeated value.
fn refine_structured(desc: &[Complex64], roots: &[Complex64]) -> Vec<Complex64> {
    let mut centers = multiplicities(roots);
    let n = desc.len() - 1;
    let g = centers.len();
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let weights: Vec<f64> = (0..=n).map(|k| scale.powi(-(k as i32))).collect();
    let residual_of = |centers: &[(Complex64, usize)]| -> (Vec<Complex64>, f64) {
        let rebuilt = expand_with_multiplicity(centers);
        let f: Vec<Complex64> = (1..=n).map(|k| (rebuilt[k] - desc[k]) * weights[k]).collect();
        let norm = f.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        (f, norm)
    };
    let (mut f, mut current) = residual_of(&centers);
    for _ in 0..20 {
        if current == 0.0 {
            break;
        }
        // Column i: derivative with respect to c_i, i.e. -m_i times the
        // product with one factor (t - c_i) removed.
        let columns: Vec<Vec<Complex64>> = (0..g)
            .map(|i| {
                let mut reduced = centers.clone();
                reduced[i].1 -= 1;
                let q = expand_with_multiplicity(&reduced);
                let m = centers[i].1 as f64;
                (1..=n).map(|k| -q[k - 1] * m * weights[k]).collect()
            })
            .collect();
        let mut normal = vec![vec![Complex64::new(0.0, 0.0); g]; g];
        let mut rhs = vec![Complex64::new(0.0, 0.0); g];
        for a in 0..g {
            for b in 0..g {
                normal[a][b] = columns[a].iter().zip(&columns[b]).map(|(x, y)| x.conj() * y).sum();
            }
            rhs[a] = -columns[a].iter().zip(&f).map(|(x, y)| x.conj() * y).sum::<Complex64>();
        }
        let Some(step) = solve_dense(normal, rhs) else { break };
        let trial: Vec<(Complex64, usize)> = centers
            .iter()
            .zip(&step)
            .map(|(&(c, m), &s)| (c + s, m))
            .collect();
        let (trial_f, trial_norm) = residual_of(&trial);
        if !(trial_norm < current) {
            break;
        }
        centers = trial;
        f = trial_f;
        current = trial_norm;
    }
    centers
        .iter()
        .flat_map(|&(c, m)| std::iter::repeat_n(c, m))
        .collect()
}

/// Gaussian elimination with partial pivoting; `None` for singular systems.
fn solve_dense(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[pivot][col].norm() == 0.0 || !a[pivot][col].norm().is_finite() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
            let v = b[col];
            b[row] -= factor * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let tail: Complex64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x.iter().all(|v| v.re.is_finite() && v.im.is_finite()).then_some(x)
}
