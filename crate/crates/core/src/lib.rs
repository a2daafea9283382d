//! Injective permutation-invariant encoders for multisets of vectors and for
//! k-tensors, with exact decoders.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod batch;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod ident;
pub mod io;
pub mod multiset;
pub mod numerics;
pub mod par;
pub mod poly;
pub mod tensor;

pub use error::{Error, Result};
pub use multiset::{canonicalize, matching_distance, scalar_profile, Multiset, ScalarProfile};
