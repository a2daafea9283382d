//! Inversion of the monomial encoder.
//!
//! Given `L = Phi(X)`, the polynomial `p(t; z)` has roots `{z . x}`. A
//! separating direction `z*` is searched for, the sorted roots are tracked
//! under small moves `z* + delta e_d`, and the finite differences give the
//! coordinates of every element directly (they are exact, not approximate,
//! as long as the sort order is preserved).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::encoder::{PolyCodec, PolyLatent};
use crate::error::{Error, Result};
use crate::multiset::{canonicalize, scalar_profile_with_tolerance, Multiset, ScalarProfile};
use crate::numerics::RootSolver;

/// Relative tolerance for treating two roots as the same value.
pub const ROOT_CLUSTER_TOL: f64 = 1e-7;
/// Relative bound on imaginary parts accepted as rounding noise.
pub const IMAG_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeOptions {
    pub candidates: usize,
    pub retries: usize,
    pub verify_tol: f64,
    pub delta_consistency_tol: f64,
    pub solver: RootSolver,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        Self {
            candidates: 32,
            retries: 4,
            verify_tol: 1e-6,
            delta_consistency_tol: 1e-7,
            solver: RootSolver::default(),
        }
    }
}

/// A direction whose projections separate the distinct elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Separator {
    pub z_star: Vec<f64>,
    pub unique_count: usize,
    /// `None` when all projections coincide.
    pub root_gap: Option<f64>,
    pub max_root: f64,
}

impl Separator {
    /// Builds a separator for `z` (normalised to unit length) from the
    /// latent's parameterized roots.
    pub fn from_direction(codec: &PolyCodec, latent: &PolyLatent, z: &[f64], opts: &DecodeOptions) -> Result<Self> {
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidArgument("separator direction must be non-zero".into()));
        }
        let unit: Vec<f64> = z.iter().map(|v| v / norm).collect();
        let roots = parameterized_roots_with(codec, &unit, latent, &opts.solver)?;
        let profile = root_profile(&roots);
        Ok(Self {
            z_star: unit,
            unique_count: profile.unique_count,
            root_gap: profile.gap,
            max_root: roots.iter().map(|r| r.abs()).fold(0.0, f64::max),
        })
    }

    /// Step `delta = gap / (4 (1 + max|root|))`, or `0.1` when all roots
    /// coincide.
    pub fn default_delta(&self) -> f64 {
        match self.root_gap {
            Some(gap) if self.unique_count > 1 => gap / (4.0 * (1.0 + self.max_root)),
            _ => 0.1,
        }
    }
}

fn root_profile(roots: &[f64]) -> ScalarProfile {
    scalar_profile_with_tolerance(roots, |r| ROOT_CLUSTER_TOL * (1.0 + r))
}

/// Real roots of `p(t; z, L)` in non-increasing order.
pub fn parameterized_roots(z: &[f64], latent: &PolyLatent) -> Result<Vec<f64>> {
    parameterized_roots_with(&PolyCodec::for_latent(latent)?, z, latent, &RootSolver::default())
}

pub fn parameterized_roots_with(
    codec: &PolyCodec,
    z: &[f64],
    latent: &PolyLatent,
    solver: &RootSolver,
) -> Result<Vec<f64>> {
    let p = codec.poly_at(z, latent)?;
    let roots = solver.solve(&p)?;
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let max_imag = roots.iter().map(|r| r.im.abs()).fold(0.0, f64::max);
    if max_imag > IMAG_TOL * scale {
        return Err(Error::NonRealRoots { max_imag });
    }
    let mut real: Vec<f64> = roots.iter().map(|r| r.re).collect();
    real.sort_by(|a, b| b.total_cmp(a));
    Ok(real)
}

/// Draws a unit vector uniformly from the sphere (rejection from the cube).
fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = n2.sqrt();
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Samples `candidates` directions and keeps the one with the most distinct
/// roots, breaking ties by the larger root gap.
pub fn find_separator(latent: &PolyLatent, seed: u64, candidates: usize) -> Result<Separator> {
    let codec = PolyCodec::for_latent(latent)?;
    let opts = DecodeOptions {
        candidates,
        ..DecodeOptions::default()
    };
    find_separator_with(&codec, latent, seed, &opts)
}

pub fn find_separator_with(codec: &PolyCodec, latent: &PolyLatent, seed: u64, opts: &DecodeOptions) -> Result<Separator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Separator> = None;
    let mut last_err = None;
    for _ in 0..opts.candidates.max(1) {
        let z = random_unit(&mut rng, codec.dim());
        match Separator::from_direction(codec, latent, &z, opts) {
            Ok(sep) => {
                let better = match &best {
                    None => true,
                    Some(b) => {
                        sep.unique_count > b.unique_count
                            || (sep.unique_count == b.unique_count
                                && sep.root_gap.unwrap_or(0.0) > b.root_gap.unwrap_or(0.0))
                    }
                };
                if better {
                    best = Some(sep);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.expect("at least one candidate was tried"))
}

/// Directional differences of the sorted parameterized roots.
pub fn recover_coordinates(latent: &PolyLatent, sep: &Separator, delta: f64) -> Result<Multiset> {
    let codec = PolyCodec::for_latent(latent)?;
    recover_coordinates_with(&codec, latent, sep, delta, &DecodeOptions::default())
}

pub fn recover_coordinates_with(
    codec: &PolyCodec,
    latent: &PolyLatent,
    sep: &Separator,
    delta: f64,
    opts: &DecodeOptions,
) -> Result<Multiset> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let base = parameterized_roots_with(codec, &sep.z_star, latent, &opts.solver)?;
    let coords_at = |step: f64| -> Result<Vec<Vec<f64>>> {
        let n = base.len();
        let d = codec.dim();
        let mut elements = vec![vec![0.0; d]; n];
        for axis in 0..d {
            let mut z = sep.z_star.clone();
            z[axis] += step;
            let moved = parameterized_roots_with(codec, &z, latent, &opts.solver)?;
            for (i, e) in elements.iter_mut().enumerate() {
                e[axis] = (moved[i] - base[i]) / step;
            }
        }
        Ok(elements)
    };
    let coarse = coords_at(delta)?;
    let fine = coords_at(delta / 2.0)?;
    let scale = 1.0 + coarse.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    let deviation = coarse
        .iter()
        .flatten()
        .zip(fine.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if deviation > opts.delta_consistency_tol * scale {
        return Err(Error::UnstableDelta { delta, deviation });
    }
    canonicalize(&coarse, codec.capacity())
}

/// For `D = 1` the roots at `z* = +-1` are the elements themselves (up to
/// sign), which is what the directional differences evaluate to exactly.
fn scalar_inverse(codec: &PolyCodec, latent: &PolyLatent, sep: &Separator, opts: &DecodeOptions) -> Result<Multiset> {
    let z = sep.z_star[0];
    let roots = parameterized_roots_with(codec, &sep.z_star, latent, &opts.solver)?;
    let elements: Vec<[f64; 1]> = roots.iter().map(|r| [r / z]).collect();
    canonicalize(&elements, codec.capacity())
}

/// Full inverse of the monomial encoder, verified by re-encoding.
pub fn decode_poly(latent: &PolyLatent, seed: u64) -> Result<Multiset> {
    let codec = PolyCodec::for_latent(latent)?;
    decode_poly_with(&codec, latent, seed, &DecodeOptions::default())
}

fn attempt_seed(seed: u64, attempt: usize) -> u64 {
    seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn decode_poly_with(codec: &PolyCodec, latent: &PolyLatent, seed: u64, opts: &DecodeOptions) -> Result<Multiset> {
    if latent.is_shifted() {
        return Err(Error::InvalidArgument("use decode_variable for shifted latents".into()));
    }
    if latent.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let bound = opts.verify_tol * (1.0 + latent.norm());
    let mut best_residual = f64::INFINITY;
    let attempts = opts.retries + 1;
    for attempt in 0..attempts {
        let result = find_separator_with(codec, latent, attempt_seed(seed, attempt), opts).and_then(|sep| {
            if codec.dim() == 1 {
                scalar_inverse(codec, latent, &sep, opts)
            } else {
                recover_coordinates_with(codec, latent, &sep, sep.default_delta(), opts)
            }
        });
        match result {
            Ok(x) => {
                let residual = codec.encode(&x)?.distance(latent);
                if residual <= bound {
                    return Ok(x);
                }
                log::debug!("decode attempt {attempt}: residual {residual:e} above {bound:e}");
                best_residual = best_residual.min(residual);
            }
            Err(e) => log::debug!("decode attempt {attempt} failed: {e}"),
        }
    }
    Err(Error::DecodeVerificationFailed {
        residual: best_residual,
        attempts,
    })
}

/// Inverse of [`PolyCodec::shift_encode`]: decodes the padded multiset and
/// drops every copy of the sentinel.
pub fn decode_variable(latent: &PolyLatent, seed: u64) -> Result<Multiset> {
    let codec = PolyCodec::for_latent(latent)?;
    decode_variable_with(&codec, latent, seed, &DecodeOptions::default())
}

pub fn decode_variable_with(codec: &PolyCodec, latent: &PolyLatent, seed: u64, opts: &DecodeOptions) -> Result<Multiset> {
    let sentinel = latent
        .sentinel
        .clone()
        .ok_or_else(|| Error::InvalidArgument("latent carries no sentinel".into()))?;
    let padded = decode_poly_with(codec, &codec.unshift(latent)?, seed, opts)?;
    strip_sentinel(&padded, &sentinel, codec.capacity())
}

/// Removes copies of `sentinel`; the survivors must lie below the box's
/// upper corner (`sentinel - 1`).
pub(crate) fn strip_sentinel(padded: &Multiset, sentinel: &[f64], capacity: usize) -> Result<Multiset> {
    let scale = 1.0 + sentinel.iter().map(|v| v * v).sum::<f64>().sqrt();
    let tol = 1e-6 * scale;
    let kept: Vec<&[f64]> = padded
        .iter()
        .filter(|e| crate::multiset::dist(e, sentinel) > tol)
        .collect();
    let leaked = kept
        .iter()
        .filter(|e| e.iter().zip(sentinel).any(|(v, s)| *v > s - 1.0 + tol))
        .count();
    if leaked > 0 {
        return Err(Error::SentinelLeak { count: leaked });
    }
    canonicalize(&kept, capacity)
}
