//! JSON documents for multisets, latents and tensors.
//!
//! Floats are written with 17 significant digits, which round-trips every
//! finite double exactly.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ident::IdentLatent;
use crate::multiset::Multiset;
use crate::poly::PolyLatent;
use crate::tensor::Tensor;

/// Compact JSON formatter writing floats with 17 significant digits.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sig17;

pub fn format_f64(v: f64) -> String {
    if !v.is_finite() {
        return "null".into();
    }
    let sci = format!("{v:.16e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    if (-5..=16).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, v)
    } else {
        sci
    }
}

impl Formatter for Sig17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Schema(e.to_string()))?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultisetDoc {
    pub dim: usize,
    pub capacity: usize,
    pub elements: Vec<Vec<f64>>,
}

impl From<&Multiset> for MultisetDoc {
    fn from(x: &Multiset) -> Self {
        Self {
            dim: x.dim(),
            capacity: x.capacity(),
            elements: x.to_vecs(),
        }
    }
}

impl MultisetDoc {
    pub fn into_multiset(self) -> Result<Multiset> {
        if let Some(bad) = self.elements.iter().find(|e| e.len() != self.dim) {
            return Err(Error::Schema(format!(
                "element of length {} in a multiset of dimension {}",
                bad.len(),
                self.dim
            )));
        }
        Multiset::new(&self.elements, self.capacity)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyLatentDoc {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub shifted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentinel: Option<Vec<f64>>,
    pub values: Vec<f64>,
}

impl From<&PolyLatent> for PolyLatentDoc {
    fn from(l: &PolyLatent) -> Self {
        Self {
            n: l.n,
            d: l.d,
            shifted: l.is_shifted(),
            sentinel: l.sentinel.clone(),
            values: l.values.clone(),
        }
    }
}

impl PolyLatentDoc {
    pub fn into_latent(self) -> Result<PolyLatent> {
        if self.shifted != self.sentinel.is_some() {
            return Err(Error::Schema("\"shifted\" requires a \"sentinel\" and vice versa".into()));
        }
        if let Some(s) = &self.sentinel {
            if s.len() != self.d {
                return Err(Error::Schema(format!("sentinel has {} coordinates, expected {}", s.len(), self.d)));
            }
        }
        let latent = PolyLatent {
            n: self.n,
            d: self.d,
            values: self.values,
            sentinel: self.sentinel,
        };
        crate::poly::PolyCodec::for_latent(&latent)?;
        Ok(latent)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentLatentDoc {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub identifier: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentinel: Option<Vec<f64>>,
    pub values: Vec<f64>,
}

impl From<&IdentLatent> for IdentLatentDoc {
    fn from(l: &IdentLatent) -> Self {
        Self {
            n: l.n,
            d: l.d,
            identifier: l.identifier.clone(),
            sentinel: l.sentinel.clone(),
            values: l.values.clone(),
        }
    }
}

impl IdentLatentDoc {
    pub fn into_latent(self) -> Result<IdentLatent> {
        if Some(self.values.len()) != self.n.checked_mul(self.d).and_then(|v| v.checked_mul(2)) {
            return Err(Error::Schema(format!(
                "latent has {} values, expected 2 * {} * {}",
                self.values.len(),
                self.d,
                self.n
            )));
        }
        Ok(IdentLatent {
            n: self.n,
            d: self.d,
            identifier: self.identifier,
            values: self.values,
            sentinel: self.sentinel,
        })
    }
}

/// Either latent kind, told apart by the `"identifier"` field.
#[derive(Debug, Clone, PartialEq)]
pub enum LatentDoc {
    Poly(PolyLatent),
    Ident(IdentLatent),
}

pub fn read_latent(text: &str) -> Result<LatentDoc> {
    let value: Value = parse(text)?;
    if value.get("identifier").is_some() {
        Ok(LatentDoc::Ident(serde_json::from_value::<IdentLatentDoc>(value).map_err(schema)?.into_latent()?))
    } else {
        Ok(LatentDoc::Poly(serde_json::from_value::<PolyLatentDoc>(value).map_err(schema)?.into_latent()?))
    }
}

fn schema(e: serde_json::Error) -> Error {
    Error::Schema(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorDoc {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "D")]
    pub d: usize,
    /// `K` levels of length-`N` arrays around length-`D` feature arrays.
    pub data: Value,
}

impl From<&Tensor> for TensorDoc {
    fn from(t: &Tensor) -> Self {
        fn nest(level: usize, chunk: &[f64], n: usize, k: usize) -> Value {
            if level == k {
                return Value::Array(chunk.iter().map(|&v| Value::from(v)).collect());
            }
            let step = chunk.len() / n;
            Value::Array(chunk.chunks(step).map(|c| nest(level + 1, c, n, k)).collect())
        }
        let (n, k, d) = (t.entities(), t.order(), t.feature_dim());
        Self {
            n,
            k,
            d,
            data: nest(0, t.data(), n, k),
        }
    }
}

impl TensorDoc {
    pub fn into_tensor(self) -> Result<Tensor> {
        fn flatten(v: &Value, level: usize, n: usize, k: usize, d: usize, out: &mut Vec<f64>) -> Result<()> {
            let arr = v
                .as_array()
                .ok_or_else(|| Error::Schema(format!("expected an array at depth {level}")))?;
            let expected = if level == k { d } else { n };
            if arr.len() != expected {
                return Err(Error::Schema(format!(
                    "array of length {} at depth {level}, expected {expected}",
                    arr.len()
                )));
            }
            for item in arr {
                if level == k {
                    out.push(
                        item.as_f64()
                            .ok_or_else(|| Error::Schema("tensor entries must be numbers".into()))?,
                    );
                } else {
                    flatten(item, level + 1, n, k, d, out)?;
                }
            }
            Ok(())
        }
        let mut data = Vec::new();
        flatten(&self.data, 0, self.n, self.k, self.d, &mut data)?;
        Tensor::new(self.n, self.k, self.d, data)
    }
}

pub fn multiset_to_json(x: &Multiset) -> Result<String> {
    to_json(&MultisetDoc::from(x))
}

pub fn multiset_from_json(text: &str) -> Result<Multiset> {
    parse::<MultisetDoc>(text)?.into_multiset()
}

pub fn poly_latent_to_json(l: &PolyLatent) -> Result<String> {
    to_json(&PolyLatentDoc::from(l))
}

pub fn poly_latent_from_json(text: &str) -> Result<PolyLatent> {
    parse::<PolyLatentDoc>(text)?.into_latent()
}

pub fn ident_latent_to_json(l: &IdentLatent) -> Result<String> {
    to_json(&IdentLatentDoc::from(l))
}

pub fn ident_latent_from_json(text: &str) -> Result<IdentLatent> {
    parse::<IdentLatentDoc>(text)?.into_latent()
}

pub fn tensor_to_json(t: &Tensor) -> Result<String> {
    to_json(&TensorDoc::from(t))
}

pub fn tensor_from_json(text: &str) -> Result<Tensor> {
    parse::<TensorDoc>(text)?.into_tensor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ident::{encode_ident, Identifier};
    use crate::poly::{encode_poly, DomainBox, PolyCodec};

    #[test]
    fn float_format() {
        assert_eq!(format_f64(-2.0), "-2.0000000000000000");
        assert_eq!(format_f64(0.1), "0.10000000000000001");
        assert_eq!(format_f64(0.0), "0.0000000000000000");
        assert_eq!(format_f64(1e-300), "1.0000000000000000e-300");
        assert_eq!(format_f64(123456.0), "123456.00000000000");
        for v in [std::f64::consts::PI, -1e-7, 6.02214076e23, f64::MIN_POSITIVE, f64::MAX, 5e-324] {
            let s = format_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn multiset_round_trip() {
        let x = Multiset::new(&[vec![0.1, -1.0 / 3.0], vec![1e-12, 7.0]], 3).unwrap();
        let text = multiset_to_json(&x).unwrap();
        assert!(text.starts_with("{\"dim\":2,\"capacity\":3,\"elements\":[["));
        assert_eq!(multiset_from_json(&text).unwrap(), x);
        assert!(matches!(multiset_from_json("{\"dim\":2}"), Err(Error::Schema(_))));
        assert!(matches!(
            multiset_from_json("{\"dim\":2,\"capacity\":2,\"elements\":[[1.0]]}"),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn latent_round_trips() {
        let x = Multiset::new(&[vec![0.3, -0.7], vec![1.0 / 7.0, 0.2]], 2).unwrap();
        let l = encode_poly(&x, 2).unwrap();
        let text = poly_latent_to_json(&l).unwrap();
        assert!(text.starts_with("{\"N\":2,\"D\":2,\"shifted\":false,\"values\":"));
        assert_eq!(poly_latent_from_json(&text).unwrap(), l);
        assert_eq!(read_latent(&text).unwrap(), LatentDoc::Poly(l));

        let codec = PolyCodec::new(2, 2).unwrap();
        let one = Multiset::new(&[vec![0.5, 0.5]], 2).unwrap();
        let shifted = codec.shift_encode(&one, &DomainBox::uniform(0.0, 1.0, 2).unwrap()).unwrap();
        assert_eq!(poly_latent_from_json(&poly_latent_to_json(&shifted).unwrap()).unwrap(), shifted);

        let z = encode_ident(&x, 2, &Identifier::PrimeLog).unwrap();
        let text = ident_latent_to_json(&z).unwrap();
        assert!(text.contains("\"identifier\":\"prime_log\""));
        assert_eq!(ident_latent_from_json(&text).unwrap(), z);
        assert_eq!(read_latent(&text).unwrap(), LatentDoc::Ident(z));

        assert!(poly_latent_from_json("{\"N\":2,\"D\":2,\"shifted\":false,\"values\":[1.0]}").is_err());
        assert!(poly_latent_from_json("{\"N\":2,\"D\":2,\"shifted\":true,\"values\":[1,2,3,4,5]}").is_err());
    }

    #[test]
    fn tensor_round_trip() {
        let t = Tensor::from_fn(2, 2, 3, |idx| vec![idx[0] as f64, idx[1] as f64 / 3.0, 0.1]).unwrap();
        let text = tensor_to_json(&t).unwrap();
        assert!(text.starts_with("{\"N\":2,\"K\":2,\"D\":3,\"data\":[[[0.0000000000000000,0.0000000000000000,"));
        assert_eq!(tensor_from_json(&text).unwrap(), t);
        assert!(tensor_from_json("{\"N\":2,\"K\":1,\"D\":1,\"data\":[[1.0]]}").is_err());
        assert!(tensor_from_json("{\"N\":1,\"K\":1,\"D\":1,\"data\":[[\"a\"]]}").is_err());
    }
}
