//! The `2DN`-dimensional encoder for identifiable multisets.
//!
//! Every element `x` is lifted to `r(x) = x + l(x) j` (the identifier `l(x)`
//! added as imaginary part to every coordinate). Row `d` of the latent holds
//! the complex power sums of `{x_d + l(x) j}`, so each row can be inverted
//! as a scalar multiset, and the shared imaginary parts tell which entries of
//! different rows belong to the same element.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multiset::{canonicalize, Multiset};
use crate::numerics::{monic_roots, newton_girard, PowerSums, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::poly::DomainBox;

/// Relative tolerance for two identifier values being equal at decode time.
pub const IDENT_TIE_TOL: f64 = 1e-7;
pub const PRIME_LOG: &str = "prime_log";

pub type IdentifierFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A continuous scalar labelling of elements.
#[derive(Clone)]
pub enum Identifier {
    /// `l(x) = sum_d x_d ln(p_d)` with `p_d` the `d`-th prime.
    PrimeLog,
    Custom { name: String, eval: IdentifierFn },
}

impl fmt::Debug for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PrimeLog => f.write_str("PrimeLog"),
            Self::Custom { name, .. } => f.debug_struct("Custom").field("name", name).finish(),
        }
    }
}

impl Identifier {
    pub fn custom(name: impl Into<String>, eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Self::PrimeLog => PRIME_LOG,
            Self::Custom { name, .. } => name,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::PrimeLog => identifier_prime_log(x),
            Self::Custom { eval, .. } => eval(x),
        }
    }
}

/// The first `count` primes.
pub fn primes(count: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while out.len() < count {
        if out.iter().take_while(|&&p| p * p <= candidate).all(|&p| !candidate.is_multiple_of(p)) {
            out.push(candidate);
        }
        candidate += 1;
    }
    out
}

/// `sum_d x_d ln(p_d)`.
pub fn identifier_prime_log(x: &[f64]) -> f64 {
    primes(x.len())
        .iter()
        .zip(x)
        .map(|(&p, &v)| v * (p as f64).ln())
        .sum()
}

/// Complex power matrix of one element: `out[d][n-1] = (x_d + l(x) j)^n`.
pub fn phi_ident(x: &[f64], n: usize, l: &Identifier) -> Vec<Vec<Complex64>> {
    let label = l.eval(x);
    x.iter()
        .map(|&v| {
            let r = Complex64::new(v, label);
            let mut p = Complex64::new(1.0, 0.0);
            (0..n)
                .map(|_| {
                    p *= r;
                    p
                })
                .collect()
        })
        .collect()
}

/// `D x N` complex matrix stored as `2DN` reals, row-major with real and
/// imaginary parts interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentLatent {
    pub n: usize,
    pub d: usize,
    pub identifier: String,
    pub values: Vec<f64>,
    /// Set for shifted (variable-size) latents.
    pub sentinel: Option<Vec<f64>>,
}

impl IdentLatent {
    pub fn from_rows(n: usize, d: usize, identifier: &str, rows: &[Vec<Complex64>]) -> Self {
        let values = rows.iter().flatten().flat_map(|c| [c.re, c.im]).collect();
        Self {
            n,
            d,
            identifier: identifier.to_string(),
            values,
            sentinel: None,
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let at = (row * self.n + col) * 2;
        Complex64::new(self.values[at], self.values[at + 1])
    }

    pub fn row(&self, row: usize) -> Vec<Complex64> {
        (0..self.n).map(|c| self.get(row, c)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.d).map(|r| self.row(r)).collect()
    }

    pub fn is_shifted(&self) -> bool {
        self.sentinel.is_some()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &IdentLatent) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    fn check_shape(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::Schema("N and D must be at least 1".into()));
        }
        let expected = self.d.checked_mul(self.n).and_then(|v| v.checked_mul(2));
        if expected != Some(self.values.len()) {
            return Err(Error::Schema(format!(
                "latent has {} values, expected 2 * {} * {}",
                self.values.len(),
                self.d,
                self.n
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(())
    }
}

/// Latent length `2DN`.
pub fn ident_latent_dim(n: usize, d: usize) -> Option<usize> {
    n.checked_mul(d)?.checked_mul(2)
}

/// Encoder and decoder for identifiable multisets of `N` elements in `R^D`.
#[derive(Debug, Clone)]
pub struct IdentCodec {
    n: usize,
    d: usize,
    identifier: Identifier,
    verify_tol: f64,
}

impl IdentCodec {
    pub fn new(n: usize, d: usize, identifier: Identifier) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidArgument("N and D must be at least 1".into()));
        }
        ident_latent_dim(n, d).ok_or_else(|| Error::SizeOverflow {
            what: format!("identifiable latent with N = {n}, D = {d}"),
        })?;
        Ok(Self {
            n,
            d,
            identifier,
            verify_tol: 1e-6,
        })
    }

    pub fn prime_log(n: usize, d: usize) -> Result<Self> {
        Self::new(n, d, Identifier::PrimeLog)
    }

    pub fn with_verify_tol(mut self, tol: f64) -> Self {
        self.verify_tol = tol;
        self
    }

    pub fn capacity(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn identifier(&self) -> &Identifier {
        &self.identifier
    }

    pub fn latent_dim(&self) -> usize {
        2 * self.n * self.d
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found,
            });
        }
        Ok(())
    }

    /// Row sums over the elements in canonical order.
    fn sum_rows<'a>(&self, elements: impl Iterator<Item = &'a [f64]>) -> Vec<Vec<Complex64>> {
        let mut rows = vec![vec![Complex64::new(0.0, 0.0); self.n]; self.d];
        for e in elements {
            for (acc_row, phi_row) in rows.iter_mut().zip(phi_ident(e, self.n, &self.identifier)) {
                for (a, v) in acc_row.iter_mut().zip(phi_row) {
                    *a += v;
                }
            }
        }
        rows
    }

    fn latent(&self, rows: &[Vec<Complex64>]) -> IdentLatent {
        IdentLatent::from_rows(self.n, self.d, self.identifier.name(), rows)
    }

    pub fn encode(&self, x: &Multiset) -> Result<IdentLatent> {
        self.check_dim(x.dim())?;
        if x.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(self.latent(&self.sum_rows(x.iter())))
    }

    /// Encodes `1..=N` elements from `domain` as `sum phi(x) - |X| phi(x_o)`.
    /// The sentinel's identifier must differ from every element's.
    pub fn shift_encode(&self, x: &Multiset, domain: &DomainBox) -> Result<IdentLatent> {
        self.check_dim(x.dim())?;
        self.check_dim(domain.dim())?;
        if x.len() > self.n {
            return Err(Error::CapacityExceeded {
                len: x.len(),
                capacity: self.n,
            });
        }
        if let Some(index) = x.iter().position(|e| !domain.contains(e)) {
            return Err(Error::ElementOutsideBox { index });
        }
        let sentinel = domain.sentinel();
        let sentinel_label = self.identifier.eval(&sentinel);
        let tie = IDENT_TIE_TOL * (1.0 + sentinel_label.abs());
        if x.iter().any(|e| (self.identifier.eval(e) - sentinel_label).abs() <= tie) {
            return Err(Error::IdentifierCollision);
        }
        let pad = self.sum_rows(std::iter::once(sentinel.as_slice()));
        let count = x.len() as f64;
        let mut rows = self.sum_rows(x.iter());
        for (row, pad_row) in rows.iter_mut().zip(&pad) {
            for (v, p) in row.iter_mut().zip(pad_row) {
                *v -= p * count;
            }
        }
        let mut latent = self.latent(&rows);
        latent.sentinel = Some(sentinel);
        Ok(latent)
    }

    fn check_latent(&self, z: &IdentLatent) -> Result<()> {
        z.check_shape()?;
        if z.n != self.n || z.d != self.d {
            return Err(Error::Schema(format!(
                "latent is for N = {}, D = {}; codec is for N = {}, D = {}",
                z.n, z.d, self.n, self.d
            )));
        }
        if z.identifier != self.identifier.name() {
            return Err(Error::Schema(format!(
                "latent uses identifier {:?}, codec uses {:?}",
                z.identifier,
                self.identifier.name()
            )));
        }
        Ok(())
    }

    /// Sortvec decoding followed by a re-encoding check.
    pub fn decode(&self, z: &IdentLatent) -> Result<Multiset> {
        self.check_latent(z)?;
        if z.is_shifted() {
            return Err(Error::InvalidArgument("use decode_variable for shifted latents".into()));
        }
        let x = sortvec_decode(z)?;
        let residual = self.encode(&x)?.distance(z);
        if residual > self.verify_tol * (1.0 + z.norm()) {
            return Err(Error::DecodeVerificationFailed { residual, attempts: 1 });
        }
        Ok(x)
    }

    /// Inverse of [`IdentCodec::shift_encode`].
    pub fn decode_variable(&self, z: &IdentLatent) -> Result<Multiset> {
        self.check_latent(z)?;
        let sentinel = z
            .sentinel
            .clone()
            .ok_or_else(|| Error::InvalidArgument("latent carries no sentinel".into()))?;
        self.check_dim(sentinel.len())?;
        let pad = self.sum_rows(std::iter::once(sentinel.as_slice()));
        let n = self.n as f64;
        let mut rows = z.rows();
        for (row, pad_row) in rows.iter_mut().zip(&pad) {
            for (v, p) in row.iter_mut().zip(pad_row) {
                *v += p * n;
            }
        }
        let padded = self.decode(&self.latent(&rows))?;
        crate::poly::decoder::strip_sentinel(&padded, &sentinel, self.n)
    }
}

pub fn encode_ident(x: &Multiset, n: usize, l: &Identifier) -> Result<IdentLatent> {
    IdentCodec::new(n, x.dim(), l.clone())?.encode(x)
}

pub fn decode_ident(z: &IdentLatent, l: &Identifier) -> Result<Multiset> {
    IdentCodec::new(z.n, z.d, l.clone())?.decode(z)
}

/// Scalar multiset with the given complex power sums.
pub fn deepsets1d_invert(sums: &PowerSums) -> Result<Vec<Complex64>> {
    monic_roots(&newton_girard(sums), DEFAULT_TOL, DEFAULT_MAX_ITER)
}

/// Inverts every row, sorts each row's values by imaginary part and reads
/// the `n`-th element off position `n` of every row.
pub fn sortvec_decode(z: &IdentLatent) -> Result<Multiset> {
    z.check_shape()?;
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(z.d);
    for row in z.rows() {
        let mut values = deepsets1d_invert(&PowerSums(row))?;
        check_identifier_ties(&values)?;
        values.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
        columns.push(values);
    }
    let elements: Vec<Vec<f64>> = (0..z.n)
        .map(|i| columns.iter().map(|col| col[i].re).collect())
        .collect();
    canonicalize(&elements, z.n)
}

/// Equal identifiers are only allowed together with equal values.
fn check_identifier_ties(values: &[Complex64]) -> Result<()> {
    let scale = 1.0 + values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tol = IDENT_TIE_TOL * scale;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            if (a.im - b.im).abs() <= tol && (a.re - b.re).abs() > tol {
                return Err(Error::IdentifierCollision);
            }
        }
    }
    Ok(())
}

/// `D x D x N` tensor, index `(d1 * D + d2) * N + (n - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseLatent {
    pub n: usize,
    pub d: usize,
    pub values: Vec<f64>,
}

impl PairwiseLatent {
    pub fn get(&self, d1: usize, d2: usize, n: usize) -> f64 {
        self.values[(d1 * self.d + d2) * self.n + (n - 1)]
    }

    pub fn max_abs_diff(&self, other: &PairwiseLatent) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Pairwise complex-power encoder, injective only on multisets of vectors
/// with distinct coordinates; kept as a negative control.
pub fn encode_pairwise_baseline(x: &Multiset, n: usize) -> Result<PairwiseLatent> {
    let d = x.dim();
    if d < 2 {
        return Err(Error::InvalidArgument("pairwise baseline needs D >= 2".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let mut values = vec![0.0; d * d * n];
    for e in x.iter() {
        for d1 in 0..d {
            for d2 in 0..d {
                if d1 == d2 {
                    continue;
                }
                let r = Complex64::new(e[d1], e[d2]);
                let mut p = Complex64::new(1.0, 0.0);
                for k in 0..n {
                    p *= r;
                    values[(d1 * d + d2) * n + k] += if d2 > d1 { p.re } else { p.im };
                }
            }
        }
    }
    Ok(PairwiseLatent { n, d, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiset::matching_distance;
    use crate::numerics::power_sums_from_roots;

    fn ms(v: &[&[f64]]) -> Multiset {
        Multiset::from_elements(v).unwrap()
    }

    #[test]
    fn prime_log_examples() {
        assert_eq!(identifier_prime_log(&[0.0, 0.0, 0.0]), 0.0);
        assert!((identifier_prime_log(&[1.0, 2.0]) - 2.890_371_757_896_164_7).abs() < 1e-15);
        assert_ne!(identifier_prime_log(&[1.0, 0.0]), identifier_prime_log(&[0.0, 1.0]));
        assert_eq!(primes(6), vec![2, 3, 5, 7, 11, 13]);
    }

    #[test]
    fn phi_examples() {
        let l = Identifier::PrimeLog;
        assert!(phi_ident(&[0.0, 0.0], 3, &l).iter().flatten().all(|c| c.norm() == 0.0));
        let m = phi_ident(&[1.0, 2.0], 2, &l);
        let id = identifier_prime_log(&[1.0, 2.0]);
        assert_eq!(m[0][0], Complex64::new(1.0, id));
        assert_eq!(m[1][0], Complex64::new(2.0, id));
        assert_eq!(m[1][1], Complex64::new(2.0, id) * Complex64::new(2.0, id));
        let s = phi_ident(&[0.5], 3, &l);
        let r = Complex64::new(0.5, 0.5 * 2f64.ln());
        assert_eq!(s[0], vec![r, r * r, r * r * r]);
    }

    #[test]
    fn rows_are_scalar_power_sums() {
        let x = ms(&[&[0.25, 1.5], &[2.0, 0.0], &[0.75, 0.75]]);
        let z = encode_ident(&x, 3, &Identifier::PrimeLog).unwrap();
        assert_eq!(z.values.len(), 12);
        for d in 0..2 {
            let roots: Vec<Complex64> = x
                .iter()
                .map(|e| Complex64::new(e[d], identifier_prime_log(e)))
                .collect();
            assert_eq!(z.row(d), power_sums_from_roots(&roots).0);
        }
    }

    #[test]
    fn deepsets_examples() {
        let mut r = deepsets1d_invert(&PowerSums::from_real(&[3.0, 5.0])).unwrap();
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        assert!(deepsets1d_invert(&PowerSums::from_real(&[0.0; 4])).unwrap().iter().all(|c| c.norm() == 0.0));
        let pair = [Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0)];
        let mut r = deepsets1d_invert(&power_sums_from_roots(&pair)).unwrap();
        r.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((r[0] - pair[1]).norm() < 1e-14 && (r[1] - pair[0]).norm() < 1e-14);
    }

    #[test]
    fn decode_examples() {
        let l = Identifier::PrimeLog;
        let x = ms(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let back = decode_ident(&encode_ident(&x, 2, &l).unwrap(), &l).unwrap();
        assert!(matching_distance(&back, &x) < 1e-12);

        let dup = ms(&[&[0.5, 1.25], &[0.5, 1.25], &[2.0, 0.0]]);
        let back = decode_ident(&encode_ident(&dup, 3, &l).unwrap(), &l).unwrap();
        assert!(matching_distance(&back, &dup) < 1e-9, "{back:?}");

        let zero = IdentLatent::from_rows(3, 2, PRIME_LOG, &vec![vec![Complex64::new(0.0, 0.0); 3]; 2]);
        assert_eq!(decode_ident(&zero, &l).unwrap(), ms(&[&[0.0, 0.0], &[0.0, 0.0], &[0.0, 0.0]]));
    }

    #[test]
    fn constant_identifier_collides() {
        let l = Identifier::custom("constant", |_| 1.0);
        let x = ms(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let z = encode_ident(&x, 2, &l).unwrap();
        assert_eq!(decode_ident(&z, &l), Err(Error::IdentifierCollision));
    }

    #[test]
    fn variable_size_round_trip() {
        let codec = IdentCodec::prime_log(4, 2).unwrap();
        let domain = DomainBox::uniform(0.0, 2.0, 2).unwrap();
        for k in 1..=4 {
            let elems: Vec<Vec<f64>> = (0..k).map(|i| vec![0.25 * i as f64, 2.0 - 0.5 * i as f64]).collect();
            let x = Multiset::new(&elems, 4).unwrap();
            let back = codec.decode_variable(&codec.shift_encode(&x, &domain).unwrap()).unwrap();
            assert!(matching_distance(&back, &x) < 1e-9);
        }
    }

    #[test]
    fn sentinel_identifier_clash_is_rejected() {
        // The sentinel (3, 3) and (2, 1) share the label 0.25.
        let l = Identifier::custom("parabola", |x| (x[0] - 2.5) * (x[0] - 2.5));
        let codec = IdentCodec::new(2, 2, l).unwrap();
        let domain = DomainBox::uniform(0.0, 2.0, 2).unwrap();
        let x = Multiset::new(&[vec![2.0, 1.0]], 2).unwrap();
        assert_eq!(codec.shift_encode(&x, &domain), Err(Error::IdentifierCollision));
        let ok = Multiset::new(&[vec![1.0, 1.0]], 2).unwrap();
        assert!(codec.shift_encode(&ok, &domain).is_ok());
    }

    #[test]
    fn pairwise_baseline_collides_on_counterexample() {
        let x = ms(&[&[1.0, 1.0, 1.0], &[3.0, 2.0, 1.0], &[1.0, 2.0, 2.0], &[3.0, 1.0, 2.0]]);
        let y = ms(&[&[1.0, 2.0, 1.0], &[3.0, 1.0, 1.0], &[3.0, 2.0, 2.0], &[1.0, 1.0, 2.0]]);
        let px = encode_pairwise_baseline(&x, 4).unwrap();
        let py = encode_pairwise_baseline(&y, 4).unwrap();
        assert!(px.max_abs_diff(&py) < 1e-9);
        assert!(px.values.iter().any(|v| *v != 0.0));
        for d in 0..3 {
            for n in 1..=4 {
                assert_eq!(px.get(d, d, n), 0.0);
            }
        }
        let a = encode_pairwise_baseline(&ms(&[&[1.0, 2.0, 3.0]]), 2).unwrap();
        let b = encode_pairwise_baseline(&ms(&[&[1.0, 2.0, 3.5]]), 2).unwrap();
        assert!(a.max_abs_diff(&b) > 0.1);
    }
}
