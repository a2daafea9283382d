//! Independent oracles shared by the integration suites and the acceptance
//! harness. Nothing here calls into the library's numerics.
#![allow(dead_code)]

use permcodec::tensor::Tensor;
use permcodec::Multiset;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Descending coefficients of `prod_i (t - p_i)` by direct convolution with
/// each linear factor `[1, -p_i]`.
pub fn coefficient_oracle(projections: &[f64]) -> Vec<f64> {
    projections.iter().fold(vec![1.0], |acc, &p| {
        let mut next = vec![0.0; acc.len() + 1];
        for (i, &c) in acc.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * p;
        }
        next
    })
}

/// `sum_x (z . x)^n` computed by explicit repeated multiplication.
pub fn power_oracle(x: &Multiset, z: &[f64], n: usize) -> f64 {
    x.iter()
        .map(|e| {
            let p = dot(z, e);
            (0..n).fold(1.0, |acc, _| acc * p)
        })
        .sum()
}

/// Number of exponent tuples `k in [0, N]^D` with `1 <= |k| <= N`, counted
/// by enumerating the whole cube.
pub fn monomial_count(n: usize, d: usize) -> usize {
    let mut count = 0;
    let mut k = vec![0usize; d];
    loop {
        let deg: usize = k.iter().sum();
        if (1..=n).contains(&deg) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == d {
                return count;
            }
            k[i] += 1;
            if k[i] <= n {
                break;
            }
            k[i] = 0;
            i += 1;
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Matching distance by exhaustive search over all pairings.
pub fn brute_matching(x: &[Vec<f64>], y: &[Vec<f64>]) -> f64 {
    if x.len() != y.len() {
        return f64::INFINITY;
    }
    permutations(x.len())
        .iter()
        .map(|p| {
            x.iter()
                .zip(p)
                .map(|(a, &j)| a.iter().zip(&y[j]).map(|(u, v)| (u - v) * (u - v)).sum::<f64>())
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Exhaustive congruence: some relabelling `pi` with `b[i..] = a[pi(i)..]`.
pub fn brute_congruent(a: &Tensor, b: &Tensor) -> bool {
    if (a.entities(), a.order(), a.feature_dim()) != (b.entities(), b.order(), b.feature_dim()) {
        return false;
    }
    let (n, k) = (a.entities(), a.order());
    let cells = n.pow(k as u32);
    permutations(n).iter().any(|p| {
        (0..cells).all(|cell| {
            let mut idx = vec![0usize; k];
            let mut c = cell;
            for slot in idx.iter_mut().rev() {
                *slot = c % n;
                c /= n;
            }
            let src: Vec<usize> = idx.iter().map(|&i| p[i]).collect();
            b.entry(&idx) == a.entry(&src)
        })
    })
}

pub fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.gen_range(0..=i));
    }
    p
}

/// Tensor with entries drawn from `{0, 1/4, ..., levels/4}`.
pub fn grid_tensor(rng: &mut ChaCha8Rng, n: usize, k: usize, d: usize, levels: u32) -> Tensor {
    Tensor::from_fn(n, k, d, |_| (0..d).map(|_| rng.gen_range(0..=levels) as f64 / 4.0).collect()).unwrap()
}

pub fn random_multiset(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Multiset {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    Multiset::from_elements(&rows).unwrap()
}

pub fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
