//! Exponent tuples indexing the monomial feature map.

use crate::error::{Error, Result};

/// Upper bound on the number of monomials an index may hold.
pub const MAX_INDEX_LEN: usize = 1 << 26;

/// All exponent tuples `k in N^D` with `1 <= |k| <= N`, ordered by total
/// degree, then `k_1` descending, then `k_2` descending, and so on.
///
/// For `N = D = 2` the order is `(1,0), (0,1), (2,0), (1,1), (0,2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentIndex {
    max_degree: usize,
    dim: usize,
    tuples: Vec<Vec<u32>>,
    /// `degree_start[s]` is the position of the first tuple of degree `s`;
    /// the last entry is `tuples.len()`.
    degree_start: Vec<usize>,
    /// For degree >= 2: (position of `k - e_d`, `d`) with `d` the first
    /// non-zero coordinate of `k`.
    parent: Vec<Option<(usize, usize)>>,
    multinomial: Vec<f64>,
}

/// `C(n, k)` with overflow detection.
pub fn binomial(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

/// Length of the monomial latent, `C(N + D, D) - 1`.
pub fn poly_latent_dim(max_degree: usize, dim: usize) -> Option<usize> {
    binomial(max_degree.checked_add(dim)?, dim).map(|c| c - 1)
}

impl ExponentIndex {
    pub fn new(max_degree: usize, dim: usize) -> Result<Self> {
        if max_degree == 0 || dim == 0 {
            return Err(Error::InvalidArgument("N and D must be at least 1".into()));
        }
        let len = poly_latent_dim(max_degree, dim)
            .filter(|&l| l <= MAX_INDEX_LEN)
            .ok_or_else(|| Error::SizeOverflow {
                what: format!("monomial index with N = {max_degree}, D = {dim}"),
            })?;

        let mut tuples: Vec<Vec<u32>> = Vec::with_capacity(len);
        let mut degree_start = vec![0usize; max_degree + 2];
        for s in 1..=max_degree {
            degree_start[s] = tuples.len();
            let mut current = vec![0u32; dim];
            compositions_desc(s as u32, 0, &mut current, &mut tuples);
        }
        degree_start[max_degree + 1] = tuples.len();
        debug_assert_eq!(tuples.len(), len);

        let mut parent = Vec::with_capacity(len);
        let mut multinomial = Vec::with_capacity(len);
        for k in &tuples {
            let degree: u32 = k.iter().sum();
            multinomial.push(multinomial_coefficient(k));
            if degree < 2 {
                parent.push(None);
                continue;
            }
            let d = k.iter().position(|&e| e > 0).expect("degree >= 2");
            let mut p = k.clone();
            p[d] -= 1;
            let lo = degree_start[degree as usize - 1];
            let hi = degree_start[degree as usize];
            let pos = tuples[lo..hi]
                .iter()
                .position(|t| *t == p)
                .expect("parent tuple of lower degree exists");
            parent.push(Some((lo + pos, d)));
        }

        Ok(Self {
            max_degree,
            dim,
            tuples,
            degree_start,
            parent,
            multinomial,
        })
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tuples(&self) -> &[Vec<u32>] {
        &self.tuples
    }

    /// Positions of all tuples of total degree `degree`.
    pub fn degree_range(&self, degree: usize) -> std::ops::Range<usize> {
        self.degree_start[degree]..self.degree_start[degree + 1]
    }

    pub fn multinomial(&self, pos: usize) -> f64 {
        self.multinomial[pos]
    }

    /// Evaluates every monomial at `x`, each as one multiplication of an
    /// already computed monomial of lower degree.
    pub fn monomials(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        let mut out = Vec::with_capacity(self.len());
        for (pos, parent) in self.parent.iter().enumerate() {
            let v = match *parent {
                None => {
                    let d = self.tuples[pos].iter().position(|&e| e == 1).expect("degree 1");
                    x[d]
                }
                Some((p, d)) => out[p] * x[d],
            };
            out.push(v);
        }
        out
    }
}

/// Writes all compositions of `remaining` into the coordinates from `pos`
/// on, with earlier coordinates taking larger values first.
fn compositions_desc(remaining: u32, pos: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for v in (0..=remaining).rev() {
        current[pos] = v;
        compositions_desc(remaining - v, pos + 1, current, out);
    }
    current[pos] = 0;
}

fn multinomial_coefficient(k: &[u32]) -> f64 {
    // Product of binomials keeps intermediate values exact for the sizes used.
    let mut total = 0u32;
    let mut acc = 1.0f64;
    for &e in k {
        for i in 1..=e {
            total += 1;
            acc = acc * total as f64 / i as f64;
        }
    }
    acc.round()
}
