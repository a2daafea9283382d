//! The monomial (power-sum) multiset encoder and its decoder.

pub mod decoder;
pub mod encoder;
pub mod exponent;

pub use decoder::{
    decode_poly, decode_variable, find_separator, parameterized_roots, recover_coordinates, DecodeOptions,
    Separator,
};
pub use encoder::{encode_poly, moments, phi_poly, poly_at, psi, shift_encode, DomainBox, PolyCodec, PolyLatent};
pub use exponent::{binomial, poly_latent_dim, ExponentIndex};
