//! Batch round trips over a corpus, sequential or data-parallel.

use std::fmt;
use std::str::FromStr;

use crate::corpus::CorpusItem;
use crate::error::{Error, Result};
use crate::ident::{IdentCodec, Identifier};
use crate::multiset::{matching_distance, Multiset};
use crate::par::Execution;
use crate::poly::{decode_poly, encode_poly};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncoderKind {
    Poly,
    Ident,
}

impl FromStr for EncoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poly" => Ok(Self::Poly),
            "ident" => Ok(Self::Ident),
            other => Err(Error::InvalidArgument(format!("unknown encoder {other:?}"))),
        }
    }
}

impl fmt::Display for EncoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Poly => "poly",
            Self::Ident => "ident",
        })
    }
}

/// Encodes and decodes `x`, returning the matching distance to the input.
pub fn roundtrip(x: &Multiset, kind: EncoderKind, seed: u64) -> Result<f64> {
    let back = match kind {
        EncoderKind::Poly => decode_poly(&encode_poly(x, x.len())?, seed)?,
        EncoderKind::Ident => {
            let codec = IdentCodec::new(x.len(), x.dim(), Identifier::PrimeLog)?;
            codec.decode(&codec.encode(x)?)?
        }
    };
    Ok(matching_distance(x, &back))
}

/// Round trips every corpus item with its own seed; results are in corpus
/// order for either execution mode.
pub fn roundtrip_batch(items: &[CorpusItem], kind: EncoderKind, exec: Execution) -> Vec<Result<f64>> {
    exec.map(items, |_, item| roundtrip(&item.multiset, kind, item.seed))
}

/// Error percentiles of a batch (nearest rank over successful items).
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub failures: usize,
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
    pub max: f64,
}

pub fn summarize(results: &[Result<f64>]) -> Summary {
    let mut ok: Vec<f64> = results.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
    ok.sort_by(f64::total_cmp);
    let rank = |q: f64| -> f64 {
        if ok.is_empty() {
            return f64::NAN;
        }
        let idx = ((q * ok.len() as f64).ceil() as usize).clamp(1, ok.len()) - 1;
        ok[idx]
    };
    Summary {
        count: results.len(),
        failures: results.len() - ok.len(),
        p50: rank(0.5),
        p90: rank(0.9),
        p99: rank(0.99),
        max: ok.last().copied().unwrap_or(f64::NAN),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::CorpusSpec;

    #[test]
    fn sequential_and_parallel_agree() {
        let items = CorpusSpec::standard(40).generate(11);
        let seq = roundtrip_batch(&items, EncoderKind::Poly, Execution::Sequential);
        let par = roundtrip_batch(&items, EncoderKind::Poly, Execution::Parallel);
        assert_eq!(seq, par);
        let items = CorpusSpec::rational(40).generate(11);
        let seq = roundtrip_batch(&items, EncoderKind::Ident, Execution::Sequential);
        let par = roundtrip_batch(&items, EncoderKind::Ident, Execution::Parallel);
        assert_eq!(seq, par);
    }

    #[test]
    fn summary_ranks() {
        let results: Vec<Result<f64>> = (1..=100).map(|i| Ok(i as f64)).chain([Err(Error::EmptyInput)]).collect();
        let s = summarize(&results);
        assert_eq!((s.count, s.failures), (101, 1));
        assert_eq!((s.p50, s.p90, s.p99, s.max), (50.0, 90.0, 99.0, 100.0));
        assert!(summarize(&[]).p50.is_nan());
    }

    #[test]
    fn encoder_names() {
        assert_eq!("poly".parse::<EncoderKind>().unwrap(), EncoderKind::Poly);
        assert_eq!(EncoderKind::Ident.to_string(), "ident");
        assert!("tensor".parse::<EncoderKind>().is_err());
    }
}
