//! Power-sum multi-symmetric encoder and the polynomial it determines.

use std::sync::Arc;

use num_complex::Complex64;

use super::exponent::ExponentIndex;
use crate::error::{Error, Result};
use crate::multiset::Multiset;
use crate::numerics::{newton_girard, MonicPoly, PowerSums};

/// Sum of monomial features over a multiset.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyLatent {
    /// Capacity `N` (maximum monomial degree).
    pub n: usize,
    /// Element dimension `D`.
    pub d: usize,
    pub values: Vec<f64>,
    /// Set for shifted (variable-size) latents.
    pub sentinel: Option<Vec<f64>>,
}

impl PolyLatent {
    pub fn is_shifted(&self) -> bool {
        self.sentinel.is_some()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &PolyLatent) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Axis-aligned bounding box for variable-size encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl DomainBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidArgument("box bounds must have equal, non-zero length".into()));
        }
        if lo.iter().chain(&hi).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::InvalidArgument("box lower bound exceeds upper bound".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn uniform(lo: f64, hi: f64, dim: usize) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| l <= v && v <= h)
    }

    /// The point outside the box used to pad multisets: the upper corner
    /// plus one in every coordinate.
    pub fn sentinel(&self) -> Vec<f64> {
        self.hi.iter().map(|h| h + 1.0).collect()
    }
}

/// Monomial encoder for multisets of at most `N` elements of `R^D`.
///
/// Holds the exponent table so repeated encodes and decodes share it.
#[derive(Debug, Clone)]
pub struct PolyCodec {
    index: Arc<ExponentIndex>,
}

impl PolyCodec {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        Ok(Self {
            index: Arc::new(ExponentIndex::new(n, d)?),
        })
    }

    pub fn for_latent(latent: &PolyLatent) -> Result<Self> {
        let codec = Self::new(latent.n, latent.d)?;
        if latent.values.len() != codec.latent_dim() {
            return Err(Error::Schema(format!(
                "latent has {} values, expected {}",
                latent.values.len(),
                codec.latent_dim()
            )));
        }
        Ok(codec)
    }

    pub fn index(&self) -> &ExponentIndex {
        &self.index
    }

    pub fn capacity(&self) -> usize {
        self.index.max_degree()
    }

    pub fn dim(&self) -> usize {
        self.index.dim()
    }

    pub fn latent_dim(&self) -> usize {
        self.index.len()
    }

    fn check_dim(&self, x: &Multiset) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    fn sum_features(&self, x: &Multiset) -> Vec<f64> {
        let mut acc = vec![0.0; self.latent_dim()];
        for e in x.iter() {
            for (a, v) in acc.iter_mut().zip(self.index.monomials(e)) {
                *a += v;
            }
        }
        acc
    }

    /// Encodes a multiset of exactly `N` elements.
    pub fn encode(&self, x: &Multiset) -> Result<PolyLatent> {
        self.check_dim(x)?;
        if x.len() != self.capacity() {
            return Err(Error::SizeMismatch {
                expected: self.capacity(),
                found: x.len(),
            });
        }
        Ok(PolyLatent {
            n: self.capacity(),
            d: self.dim(),
            values: self.sum_features(x),
            sentinel: None,
        })
    }

    /// Encodes `1..=N` elements from `domain` as `sum phi(x) - |X| phi(x_o)`.
    pub fn shift_encode(&self, x: &Multiset, domain: &DomainBox) -> Result<PolyLatent> {
        self.check_dim(x)?;
        if domain.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: domain.dim(),
            });
        }
        if x.len() > self.capacity() {
            return Err(Error::CapacityExceeded {
                len: x.len(),
                capacity: self.capacity(),
            });
        }
        if let Some(index) = x.iter().position(|e| !domain.contains(e)) {
            return Err(Error::ElementOutsideBox { index });
        }
        let sentinel = domain.sentinel();
        let pad = self.index.monomials(&sentinel);
        let count = x.len() as f64;
        let values = self
            .sum_features(x)
            .into_iter()
            .zip(pad)
            .map(|(v, p)| v - count * p)
            .collect();
        Ok(PolyLatent {
            n: self.capacity(),
            d: self.dim(),
            values,
            sentinel: Some(sentinel),
        })
    }

    /// Undoes the sentinel shift: `L' + N phi(x_o)`.
    pub fn unshift(&self, latent: &PolyLatent) -> Result<PolyLatent> {
        let sentinel = latent
            .sentinel
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("latent is not shifted".into()))?;
        let pad = self.index.monomials(sentinel);
        let n = self.capacity() as f64;
        Ok(PolyLatent {
            n: latent.n,
            d: latent.d,
            values: latent.values.iter().zip(pad).map(|(v, p)| v + n * p).collect(),
            sentinel: None,
        })
    }

    /// Weight vector with `<psi(z, n), phi(x)> = (z . x)^n`.
    pub fn psi(&self, z: &[f64], n: usize) -> Vec<f64> {
        psi(z, n, &self.index)
    }

    /// Parameterized moments `E_n(z) = <psi(z, n), L>` for `n = 1..=N`.
    pub fn moments(&self, z: &[f64], latent: &PolyLatent) -> Result<PowerSums> {
        if latent.is_shifted() {
            return Err(Error::InvalidArgument("moments need an unshifted latent".into()));
        }
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: z.len(),
            });
        }
        let zm = self.index.monomials(z);
        let sums = (1..=self.capacity())
            .map(|deg| {
                let e: f64 = self
                    .index
                    .degree_range(deg)
                    .map(|pos| self.index.multinomial(pos) * zm[pos] * latent.values[pos])
                    .sum();
                Complex64::new(e, 0.0)
            })
            .collect();
        Ok(PowerSums(sums))
    }

    /// The monic polynomial `prod_{x in X} (t - z . x)`.
    pub fn poly_at(&self, z: &[f64], latent: &PolyLatent) -> Result<MonicPoly> {
        Ok(newton_girard(&self.moments(z, latent)?))
    }
}

/// Monomial features `(prod_d x_d^k_d)_k` of one element.
pub fn phi_poly(x: &[f64], index: &ExponentIndex) -> Vec<f64> {
    index.monomials(x)
}

/// `psi(z, n)_k = multinomial(n; k) prod_d z_d^k_d` for `|k| = n`, else 0.
pub fn psi(z: &[f64], n: usize, index: &ExponentIndex) -> Vec<f64> {
    let zm = index.monomials(z);
    let mut out = vec![0.0; index.len()];
    if (1..=index.max_degree()).contains(&n) {
        for pos in index.degree_range(n) {
            out[pos] = index.multinomial(pos) * zm[pos];
        }
    }
    out
}

pub fn exponent_index(n: usize, d: usize) -> Result<ExponentIndex> {
    ExponentIndex::new(n, d)
}

/// Encodes a multiset of exactly `n` elements.
pub fn encode_poly(x: &Multiset, n: usize) -> Result<PolyLatent> {
    PolyCodec::new(n, x.dim())?.encode(x)
}

pub fn shift_encode(x: &Multiset, n: usize, domain: &DomainBox) -> Result<PolyLatent> {
    PolyCodec::new(n, x.dim())?.shift_encode(x, domain)
}

pub fn moments(z: &[f64], latent: &PolyLatent) -> Result<PowerSums> {
    PolyCodec::for_latent(latent)?.moments(z, latent)
}

pub fn poly_at(z: &[f64], latent: &PolyLatent) -> Result<MonicPoly> {
    PolyCodec::for_latent(latent)?.poly_at(z, latent)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(v: &[&[f64]]) -> Multiset {
        Multiset::from_elements(v).unwrap()
    }

    fn latent(values: &[f64]) -> PolyLatent {
        PolyLatent {
            n: 2,
            d: 2,
            values: values.to_vec(),
            sentinel: None,
        }
    }

    #[test]
    fn phi_examples() {
        let idx = ExponentIndex::new(2, 2).unwrap();
        assert_eq!(phi_poly(&[1.0, 0.0], &idx), vec![1.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(phi_poly(&[0.0, 0.0], &idx), vec![0.0; 5]);
        assert_eq!(phi_poly(&[-3.0, 2.0], &idx), vec![-3.0, 2.0, 9.0, -6.0, 4.0]);
    }

    #[test]
    fn encode_examples() {
        assert_eq!(
            encode_poly(&ms(&[&[1.0, 0.0], &[1.0, 0.0]]), 2).unwrap().values,
            vec![2.0, 0.0, 2.0, 0.0, 0.0]
        );
        assert_eq!(
            encode_poly(&ms(&[&[1.0, -1.0], &[-3.0, 2.0]]), 2).unwrap().values,
            vec![-2.0, 1.0, 10.0, -7.0, 5.0]
        );
        assert_eq!(encode_poly(&ms(&[&[0.0, 0.0], &[0.0, 0.0], &[0.0, 0.0]]), 3).unwrap().values, vec![0.0; 9]);
        assert_eq!(
            encode_poly(&ms(&[&[0.0, 0.0]]), 2),
            Err(Error::SizeMismatch { expected: 2, found: 1 })
        );
    }

    #[test]
    fn psi_examples() {
        let idx = ExponentIndex::new(2, 2).unwrap();
        let z = [0.7, -1.3];
        assert_eq!(psi(&z, 1, &idx), vec![0.7, -1.3, 0.0, 0.0, 0.0]);
        assert_eq!(psi(&z, 2, &idx), vec![0.0, 0.0, 0.7 * 0.7, 2.0 * 0.7 * -1.3, -1.3 * -1.3]);
    }

    #[test]
    fn moments_and_poly_examples() {
        let z = [0.8, 0.3];
        let e = moments(&z, &latent(&[2.0, 0.0, 2.0, 0.0, 0.0])).unwrap();
        assert_eq!(e.0[0].re, 2.0 * z[0]);
        assert_eq!(e.0[1].re, 2.0 * z[0] * z[0]);

        let l = latent(&[-2.0, 1.0, 10.0, -7.0, 5.0]);
        let e = moments(&z, &l).unwrap();
        assert!((e.0[0].re - (-2.0 * z[0] + z[1])).abs() < 1e-15);
        assert!((e.0[1].re - (10.0 * z[0] * z[0] - 14.0 * z[0] * z[1] + 5.0 * z[1] * z[1])).abs() < 1e-14);
        let p = poly_at(&z, &l).unwrap();
        assert!((p.coeffs[0].re - (-2.0 * z[0] + z[1])).abs() < 1e-15);
        let a2 = -3.0 * z[0] * z[0] + 5.0 * z[0] * z[1] - 2.0 * z[1] * z[1];
        assert!((p.coeffs[1].re - a2).abs() < 1e-14);

        let p = poly_at(&[1.0, 1.0], &latent(&[2.0, 0.0, 2.0, 0.0, 0.0])).unwrap();
        assert_eq!(p.coeffs, vec![Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0)]);

        let p = poly_at(&z, &latent(&[0.0; 5])).unwrap();
        assert!(p.coeffs.iter().all(|c| c.norm() == 0.0));
        assert!(moments(&z, &latent(&[0.0; 5])).unwrap().0.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn shift_examples() {
        let codec = PolyCodec::new(2, 2).unwrap();
        let domain = DomainBox::uniform(0.0, 1.0, 2).unwrap();
        let x = ms(&[&[0.25, 0.5]]);
        let l = codec.shift_encode(&x, &domain).unwrap();
        assert_eq!(l.sentinel, Some(vec![2.0, 2.0]));
        let phi_x = codec.index().monomials(&[0.25, 0.5]);
        let phi_s = codec.index().monomials(&[2.0, 2.0]);
        let expected: Vec<f64> = phi_x.iter().zip(&phi_s).map(|(a, b)| a - b).collect();
        assert_eq!(l.values, expected);

        let full = ms(&[&[0.25, 0.5], &[1.0, 0.0]]);
        let shifted = codec.shift_encode(&full, &domain).unwrap();
        let plain = codec.encode(&full).unwrap();
        for ((s, p), f) in shifted.values.iter().zip(&plain.values).zip(&phi_s) {
            assert_eq!(*s, p - 2.0 * f);
        }
        assert_eq!(codec.unshift(&shifted).unwrap().values, plain.values);

        assert_eq!(
            codec.shift_encode(&ms(&[&[1.5, 0.0]]), &domain),
            Err(Error::ElementOutsideBox { index: 0 })
        );
    }
}
