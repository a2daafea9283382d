//! Permutation-invariant encodings of `K`-th order tensors over `N` entities.
//!
//! A tensor holds a `D`-dimensional feature for every index tuple in
//! `[N]^K`; the symmetric group acts on all entity axes at once. Entity
//! labels (by default derived from the hyper-diagonal) make the nested-set
//! form [`NestedSet`] canonical and drive the nested sum encoder.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ident::{identifier_prime_log, phi_ident};
use crate::multiset::lex_cmp;
use crate::par::Execution;
use crate::poly::{binomial, ExponentIndex};

/// Labels closer than this count as equal for identifiability.
pub const LABEL_GAP: f64 = 1e-9;
/// Largest real-mode output length `encode_tensor` accepts.
pub const REAL_MODE_LIMIT: usize = 1_000_000;
/// Largest `N` for the brute-force congruence search.
pub const BRUTE_FORCE_LIMIT: usize = 8;

/// Dense tensor of shape `[N]^K x D`, entity-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    n: usize,
    k: usize,
    d: usize,
    data: Vec<f64>,
}

fn entity_count(n: usize, k: usize) -> Option<usize> {
    n.checked_pow(u32::try_from(k).ok()?)
}

impl Tensor {
    pub fn new(n: usize, k: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || k == 0 || d == 0 {
            return Err(Error::InvalidArgument("N, K and D must be at least 1".into()));
        }
        let expected = entity_count(n, k)
            .and_then(|c| c.checked_mul(d))
            .ok_or_else(|| Error::SizeOverflow {
                what: format!("tensor with N = {n}, K = {k}, D = {d}"),
            })?;
        if data.len() != expected {
            return Err(Error::SizeMismatch {
                expected,
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(Self { n, k, d, data })
    }

    /// Builds a tensor by evaluating `f` at every index tuple.
    pub fn from_fn(n: usize, k: usize, d: usize, mut f: impl FnMut(&[usize]) -> Vec<f64>) -> Result<Self> {
        let count = entity_count(n, k).ok_or_else(|| Error::SizeOverflow {
            what: format!("tensor with N = {n}, K = {k}"),
        })?;
        let mut data = Vec::with_capacity(count * d);
        let mut idx = vec![0usize; k];
        for flat in 0..count {
            unflatten(flat, n, &mut idx);
            let v = f(&idx);
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: v.len(),
                });
            }
            data.extend(v);
        }
        Self::new(n, k, d, data)
    }

    pub fn entities(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn feature_dim(&self) -> usize {
        self.d
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i) * self.d
    }

    pub fn entry(&self, idx: &[usize]) -> &[f64] {
        let at = self.offset(idx);
        &self.data[at..at + self.d]
    }

    /// The hyper-diagonal entry `T[n, n, ..., n]`.
    pub fn diagonal(&self, n: usize) -> &[f64] {
        self.entry(&vec![n; self.k])
    }

    fn same_shape(&self, other: &Tensor) -> bool {
        (self.n, self.k, self.d) == (other.n, other.k, other.d)
    }
}

fn unflatten(mut flat: usize, n: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::BadPermutation { n });
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::BadPermutation { n });
        }
        seen[p] = true;
    }
    Ok(())
}

/// `T'[n_1..n_K] = T[perm[n_1]..perm[n_K]]`.
pub fn permute_tensor(t: &Tensor, perm: &[usize]) -> Result<Tensor> {
    check_permutation(perm, t.n)?;
    let mut mapped = vec![0usize; t.k];
    Tensor::from_fn(t.n, t.k, t.d, |idx| {
        for (m, &i) in mapped.iter_mut().zip(idx) {
            *m = perm[i];
        }
        t.entry(&mapped).to_vec()
    })
}

/// One label row of `M` reals per entity.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeLabels {
    rows: Vec<Vec<f64>>,
}

impl NodeLabels {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.first().map(Vec::len).ok_or(Error::EmptyInput)?;
        if m == 0 {
            return Err(Error::InvalidArgument("labels need at least one coordinate".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: bad.len(),
            });
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.rows[n]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    /// All rows pairwise farther apart than [`LABEL_GAP`].
    pub fn is_identifiable(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, a)| {
            self.rows[i + 1..].iter().all(|b| {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                d2.sqrt() > LABEL_GAP
            })
        })
    }

    /// Entities sorted by label.
    pub fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by(|&a, &b| lex_cmp(&self.rows[a], &self.rows[b]).then(a.cmp(&b)));
        idx
    }

    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.rows.len())?;
        Ok(Self {
            rows: perm.iter().map(|&p| self.rows[p].clone()).collect(),
        })
    }
}

/// Prime-log identifier of each entity's hyper-diagonal entry (`M = 1`).
pub fn tensor_identifier_default(t: &Tensor) -> NodeLabels {
    NodeLabels {
        rows: (0..t.n).map(|n| vec![identifier_prime_log(t.diagonal(n))]).collect(),
    }
}

/// Canonical nested form of a labelled tensor: at every level a set of
/// `(label, child)` pairs sorted by label, with raw entries at the leaves.
#[derive(Debug, Clone, PartialEq)]
pub enum NestedSet {
    Leaf(Vec<f64>),
    Node(Vec<(Vec<f64>, NestedSet)>),
}

impl NestedSet {
    /// Total order used to sort siblings: label first, then content.
    pub fn canonical_cmp(&self, other: &NestedSet) -> Ordering {
        match (self, other) {
            (NestedSet::Leaf(a), NestedSet::Leaf(b)) => lex_cmp(a, b),
            (NestedSet::Leaf(_), NestedSet::Node(_)) => Ordering::Less,
            (NestedSet::Node(_), NestedSet::Leaf(_)) => Ordering::Greater,
            (NestedSet::Node(a), NestedSet::Node(b)) => {
                for ((la, ca), (lb, cb)) in a.iter().zip(b) {
                    let ord = lex_cmp(la, lb).then_with(|| ca.canonical_cmp(cb));
                    if ord != Ordering::Equal {
                        return ord;
                    }
                }
                a.len().cmp(&b.len())
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            NestedSet::Leaf(_) => 0,
            NestedSet::Node(children) => 1 + children.first().map_or(0, |(_, c)| c.depth()),
        }
    }
}

fn check_labels(t: &Tensor, labels: &NodeLabels) -> Result<()> {
    if labels.len() != t.n {
        return Err(Error::SizeMismatch {
            expected: t.n,
            found: labels.len(),
        });
    }
    if !labels.is_identifiable() {
        return Err(Error::NotIdentifiable);
    }
    Ok(())
}

/// The nested labelled set of `t`.
pub fn build_s(t: &Tensor, labels: &NodeLabels) -> Result<NestedSet> {
    check_labels(t, labels)?;
    let order = labels.order();
    let mut prefix = Vec::with_capacity(t.k);
    Ok(nested(t, labels, &order, &mut prefix))
}

fn nested(t: &Tensor, labels: &NodeLabels, order: &[usize], prefix: &mut Vec<usize>) -> NestedSet {
    if prefix.len() == t.k {
        return NestedSet::Leaf(t.entry(prefix).to_vec());
    }
    let mut children = Vec::with_capacity(t.n);
    for &n in order {
        prefix.push(n);
        children.push((labels.row(n).to_vec(), nested(t, labels, order, prefix)));
        prefix.pop();
    }
    children.sort_by(|(la, ca), (lb, cb)| lex_cmp(la, lb).then_with(|| ca.canonical_cmp(cb)));
    NestedSet::Node(children)
}

/// Whether `b` is a simultaneous relabelling of `a`'s entities.
///
/// Uses the nested sets when both tensors have identifiable default labels,
/// and searches all `N!` permutations otherwise.
pub fn congruent(a: &Tensor, b: &Tensor) -> Result<bool> {
    if !a.same_shape(b) {
        return Err(Error::InvalidArgument("tensors have different shapes".into()));
    }
    let la = tensor_identifier_default(a);
    let lb = tensor_identifier_default(b);
    match (la.is_identifiable(), lb.is_identifiable()) {
        (true, true) => Ok(build_s(a, &la)? == build_s(b, &lb)?),
        // Identifiability is preserved by permutation.
        (true, false) | (false, true) => Ok(false),
        (false, false) => congruent_brute_force(a, b),
    }
}

/// Exhaustive search for `perm` with `permute_tensor(a, perm) == b`.
pub fn congruent_brute_force(a: &Tensor, b: &Tensor) -> Result<bool> {
    if !a.same_shape(b) {
        return Err(Error::InvalidArgument("tensors have different shapes".into()));
    }
    if a.n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLargeForFallback { n: a.n });
    }
    let mut found = false;
    for_each_permutation(a.n, |perm| {
        found = found || permute_tensor(a, perm).map(|p| p == *b).unwrap_or(false);
        found
    });
    Ok(found)
}

/// Calls `f` on every permutation of `0..n` (Heap's algorithm) until it
/// returns `true`.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize]) -> bool) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    if f(&perm) {
        return;
    }
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if f(&perm) {
                return;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Element encoder used at each level of [`encode_tensor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorMode {
    /// Complex power encoder with the label as identifier.
    Rational,
    /// Monomial encoder.
    Real,
}

impl FromStr for TensorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(Self::Rational),
            "real" => Ok(Self::Real),
            other => Err(Error::InvalidArgument(format!("unknown tensor mode {other:?}"))),
        }
    }
}

impl fmt::Display for TensorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Rational => "rational",
            Self::Real => "real",
        })
    }
}

fn overflow(k: usize, n: usize, m: usize, d: usize) -> Error {
    Error::SizeOverflow {
        what: format!("tensor latent for K = {k}, N = {n}, M = {m}, D = {d}"),
    }
}

fn check_positive(k: usize, n: usize, m: usize, d: usize) -> Result<()> {
    if k == 0 || n == 0 || m == 0 || d == 0 {
        return Err(Error::InvalidArgument("K, N, M and D must be at least 1".into()));
    }
    Ok(())
}

/// The per-level dimensions `(D_1, ..., D_K)` from the backward recursion
/// `D_K = D` and `D_k = 2 (M + D_(k+1)) N` (rational) or
/// `D_k = C(N + D_(k+1), N) - 1` (real).
pub fn latent_dims(k: usize, n: usize, m: usize, d: usize, mode: TensorMode) -> Result<Vec<usize>> {
    check_positive(k, n, m, d)?;
    let mut dims = vec![d];
    for _ in 1..k {
        let next = *dims.last().expect("non-empty");
        let value = match mode {
            TensorMode::Rational => m
                .checked_add(next)
                .and_then(|v| v.checked_mul(2))
                .and_then(|v| v.checked_mul(n)),
            TensorMode::Real => n.checked_add(next).and_then(|v| binomial(v, n)).map(|c| c - 1),
        };
        dims.push(value.ok_or_else(|| overflow(k, n, m, d))?);
    }
    dims.reverse();
    Ok(dims)
}

/// Input and output sizes of the element encoder applied to `width`-
/// dimensional (label, value) vectors.
fn level_output(n: usize, width: usize, mode: TensorMode) -> Option<usize> {
    match mode {
        TensorMode::Rational => width.checked_mul(2)?.checked_mul(n),
        TensorMode::Real => binomial(n.checked_add(width)?, n).map(|c| c - 1),
    }
}

/// Lengths `(E_0, ..., E_(K-1))` of the intermediate sums of
/// [`encode_tensor`], where `E_K = D`, `E_(k-1)` is the encoder output on
/// `(M + E_k)`-dimensional inputs and `E_0` is the final output length.
pub fn encoder_dims(k: usize, n: usize, m: usize, d: usize, mode: TensorMode) -> Result<Vec<usize>> {
    check_positive(k, n, m, d)?;
    let mut dims = vec![d];
    for _ in 0..k {
        let inner = *dims.last().expect("non-empty");
        let out = m
            .checked_add(inner)
            .and_then(|w| level_output(n, w, mode))
            .ok_or_else(|| overflow(k, n, m, d))?;
        dims.push(out);
    }
    dims.reverse();
    dims.pop();
    Ok(dims)
}

/// Nested sum encoding. At depth `k` (from `K` down to 1) each branch
/// `beta^k` is paired with its entity's label and encoded, and the results
/// are summed over that entity index in label order. The top-level branches
/// are independent and are evaluated with `exec`.
pub fn encode_tensor(t: &Tensor, labels: &NodeLabels, mode: TensorMode) -> Result<Vec<f64>> {
    encode_tensor_with(t, labels, mode, Execution::default())
}

pub fn encode_tensor_with(t: &Tensor, labels: &NodeLabels, mode: TensorMode, exec: Execution) -> Result<Vec<f64>> {
    check_labels(t, labels)?;
    let m = labels.width();
    let dims = encoder_dims(t.k, t.n, m, t.d, mode)?;
    if mode == TensorMode::Real && dims.iter().any(|&v| v > REAL_MODE_LIMIT) {
        return Err(Error::SizeOverflow {
            what: format!("real-mode tensor latent of length {} exceeds {REAL_MODE_LIMIT}", dims[0]),
        });
    }
    let order = labels.order();
    let encoders: Vec<LevelEncoder> = (1..=t.k)
        .map(|level| {
            let width = m + if level == t.k { t.d } else { dims[level] };
            LevelEncoder::new(mode, t.n, m, width)
        })
        .collect::<Result<_>>()?;
    let ctx = Context {
        t,
        labels,
        order: &order,
        encoders: &encoders,
    };
    let branches = exec.map(&order, |_, &n1| ctx.encoded_branch(&mut vec![n1]));
    let mut total = vec![0.0; dims[0]];
    for branch in branches {
        for (acc, v) in total.iter_mut().zip(branch) {
            *acc += v;
        }
    }
    Ok(total)
}

/// Element encoder of one level, mapping `(label, beta)` to a real vector.
enum LevelEncoder {
    Rational { n: usize, m: usize },
    Real { index: ExponentIndex },
}

impl LevelEncoder {
    fn new(mode: TensorMode, n: usize, m: usize, width: usize) -> Result<Self> {
        Ok(match mode {
            TensorMode::Rational => LevelEncoder::Rational { n, m },
            TensorMode::Real => LevelEncoder::Real {
                index: ExponentIndex::new(n, width)?,
            },
        })
    }

    fn encode(&self, input: &[f64]) -> Vec<f64> {
        match self {
            LevelEncoder::Rational { n, m } => {
                // The label acts as the identifier; wider labels are folded
                // to a scalar with prime-log weights.
                let label = if *m == 1 { input[0] } else { identifier_prime_log(&input[..*m]) };
                let id = crate::ident::Identifier::custom("label", move |_| label);
                phi_ident(input, *n, &id)
                    .iter()
                    .flatten()
                    .flat_map(|c: &Complex64| [c.re, c.im])
                    .collect()
            }
            LevelEncoder::Real { index } => index.monomials(input),
        }
    }
}

struct Context<'a> {
    t: &'a Tensor,
    labels: &'a NodeLabels,
    order: &'a [usize],
    encoders: &'a [LevelEncoder],
}

impl Context<'_> {
    /// `phi_k(label(n_k), beta^k_(n_1..n_k))` for the last index of `prefix`.
    fn encoded_branch(&self, prefix: &mut Vec<usize>) -> Vec<f64> {
        let level = prefix.len();
        let beta = if level == self.t.k {
            self.t.entry(prefix).to_vec()
        } else {
            self.inner_sum(prefix)
        };
        let node = *prefix.last().expect("non-empty prefix");
        let mut input = self.labels.row(node).to_vec();
        input.extend(beta);
        self.encoders[level - 1].encode(&input)
    }

    /// `beta^k_(prefix)`: sum over the next index in label order.
    fn inner_sum(&self, prefix: &mut Vec<usize>) -> Vec<f64> {
        let mut total: Option<Vec<f64>> = None;
        for &n in self.order {
            prefix.push(n);
            let v = self.encoded_branch(prefix);
            prefix.pop();
            match total.as_mut() {
                None => total = Some(v),
                Some(acc) => acc.iter_mut().zip(v).for_each(|(a, b)| *a += b),
            }
        }
        total.expect("N >= 1")
    }
}
