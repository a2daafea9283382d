//! Multiset value type, canonical ordering, matching distance and scalar
//! multiset statistics.
//!
//! A [`Multiset`] keeps its elements in lexicographic order on raw
//! coordinates, so any sum taken over [`Multiset::iter`] is bit-exactly
//! independent of the order in which the elements were supplied.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::numerics::assignment::{assignment_min_cost, CostMatrix};

/// Sizes up to this bound use exhaustive permutation search in
/// [`matching_distance`]; larger ones go through the assignment solver.
pub const BRUTE_FORCE_MATCHING_LIMIT: usize = 6;

/// A canonically ordered multiset of `len` vectors in `R^dim`, holding at
/// most `capacity` elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiset {
    data: Vec<f64>,
    dim: usize,
    capacity: usize,
}

/// Lexicographic comparison of two coordinate vectors.
pub fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

impl Multiset {
    /// Builds a multiset from elements given in any order. See [`canonicalize`].
    pub fn new<V: AsRef<[f64]>>(raw: &[V], capacity: usize) -> Result<Self> {
        canonicalize(raw, capacity)
    }

    /// Convenience constructor with `capacity == raw.len()`.
    pub fn from_elements<V: AsRef<[f64]>>(raw: &[V]) -> Result<Self> {
        canonicalize(raw, raw.len().max(1))
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Elements in canonical order.
    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    pub fn element(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    /// Largest Euclidean norm of any element.
    pub fn max_norm(&self) -> f64 {
        self.iter().map(norm).fold(0.0, f64::max)
    }

    /// Same elements, different capacity.
    pub fn with_capacity(mut self, capacity: usize) -> Result<Self> {
        if self.len() > capacity {
            return Err(Error::CapacityExceeded {
                len: self.len(),
                capacity,
            });
        }
        self.capacity = capacity;
        Ok(self)
    }

    /// Smallest Euclidean distance between two distinct elements, or `None`
    /// when all elements coincide.
    pub fn min_separation(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let d = dist(self.element(i), self.element(j));
                if d > 0.0 {
                    best = Some(best.map_or(d, |b| b.min(d)));
                }
            }
        }
        best
    }

    /// Number of distinct elements.
    pub fn unique_count(&self) -> usize {
        // Canonical order places duplicates next to each other.
        let mut count = usize::from(!self.is_empty());
        for i in 1..self.len() {
            if self.element(i) != self.element(i - 1) {
                count += 1;
            }
        }
        count
    }
}

/// Sorts raw elements into canonical order and validates them.
///
/// Negative zeros are normalised to `+0.0` so that equal values compare and
/// sort identically.
pub fn canonicalize<V: AsRef<[f64]>>(raw: &[V], capacity: usize) -> Result<Multiset> {
    let first = raw.first().ok_or(Error::EmptyInput)?;
    let dim = first.as_ref().len();
    if dim == 0 {
        return Err(Error::InvalidArgument("elements must have at least one coordinate".into()));
    }
    if raw.len() > capacity {
        return Err(Error::CapacityExceeded {
            len: raw.len(),
            capacity,
        });
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(raw.len());
    for v in raw {
        let v = v.as_ref();
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        rows.push(v.iter().map(|&x| x + 0.0).collect());
    }
    rows.sort_by(|a, b| lex_cmp(a, b));
    Ok(Multiset {
        data: rows.concat(),
        dim,
        capacity,
    })
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

/// Matching distance: the square root of the minimum, over all bijections
/// between the two multisets, of the summed squared element distances.
///
/// Returns `f64::INFINITY` when the sizes (or dimensions) differ.
pub fn matching_distance(x: &Multiset, y: &Multiset) -> f64 {
    if x.len() != y.len() || x.dim() != y.dim() {
        return f64::INFINITY;
    }
    let n = x.len();
    let entries: Vec<f64> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| dist2(x.element(i), y.element(j)))
        .collect();
    let cost = CostMatrix::new(n, entries).expect("squared distances are finite");
    let total = if n <= BRUTE_FORCE_MATCHING_LIMIT {
        brute_force_assignment(&cost)
    } else {
        assignment_min_cost(&cost).1
    };
    total.max(0.0).sqrt()
}

/// Exhaustive minimum over all permutations (Heap's algorithm).
pub(crate) fn brute_force_assignment(cost: &CostMatrix) -> f64 {
    let n = cost.size();
    if n == 0 {
        return 0.0;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let eval = |p: &[usize]| -> f64 { p.iter().enumerate().map(|(i, &j)| cost.get(i, j)).sum() };
    let mut best = eval(&perm);
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(eval(&perm));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

/// Order statistics of a multiset of real scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarProfile {
    /// Values in non-increasing order.
    pub sorted_desc: Vec<f64>,
    pub unique_count: usize,
    /// Smallest distance between distinct values; `None` when all values
    /// are equal.
    pub gap: Option<f64>,
    /// Largest pairwise distance (0 for a single value).
    pub diam: f64,
}

/// Profile with exact value comparison.
pub fn scalar_profile(values: &[f64]) -> ScalarProfile {
    scalar_profile_with_tolerance(values, |_| 0.0)
}

/// Profile in which neighbouring sorted values `a >= b` count as equal when
/// `a - b <= tol(a)`.
pub fn scalar_profile_with_tolerance(values: &[f64], tol: impl Fn(f64) -> f64) -> ScalarProfile {
    let mut sorted_desc = values.to_vec();
    sorted_desc.sort_by(|a, b| b.total_cmp(a));
    let mut unique_count = usize::from(!sorted_desc.is_empty());
    let mut gap: Option<f64> = None;
    for w in sorted_desc.windows(2) {
        let d = w[0] - w[1];
        if d > tol(w[0].abs().max(w[1].abs())) {
            unique_count += 1;
            gap = Some(gap.map_or(d, |g| g.min(d)));
        }
    }
    let diam = match (sorted_desc.first(), sorted_desc.last()) {
        (Some(hi), Some(lo)) => hi - lo,
        _ => 0.0,
    };
    ScalarProfile {
        sorted_desc,
        unique_count,
        gap,
        diam,
    }
}
