//! Seeded random multisets for tests, benches and the CLI `bench` command.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::multiset::Multiset;

/// Per-item seed derived from a corpus seed, so that items can be generated
/// (and processed) independently.
pub fn item_seed(seed: u64, index: u64) -> u64 {
    // SplitMix64 finaliser.
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(item_seed(seed, index))
}

/// Value distribution of generated coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Entries {
    /// Uniform in `[-1, 1]`.
    Uniform,
    /// Multiples of `1 / denominator` in `[0, hi]`.
    Grid { denominator: u32, hi: u32 },
}

impl Entries {
    pub const RATIONAL: Entries = Entries::Grid { denominator: 16, hi: 2 };

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            Entries::Uniform => rng.gen_range(-1.0..=1.0),
            Entries::Grid { denominator, hi } => {
                rng.gen_range(0..=denominator * hi) as f64 / denominator as f64
            }
        }
    }
}

/// `n` random elements of dimension `d`; with `duplicates`, between one and
/// `n - 1` of them are replaced by copies of others.
pub fn random_multiset(rng: &mut ChaCha8Rng, n: usize, d: usize, entries: Entries, duplicates: bool) -> Multiset {
    let mut elements: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| entries.sample(rng)).collect()).collect();
    if duplicates && n > 1 {
        let copies = rng.gen_range(1..n);
        let mut slots: Vec<usize> = (0..n).collect();
        slots.shuffle(rng);
        let source = slots[0];
        for &slot in &slots[1..=copies] {
            elements[slot] = elements[source].clone();
        }
    }
    Multiset::new(&elements, n).expect("generated elements are finite and non-empty")
}

/// One corpus entry: the multiset and whether duplicates were planted.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusItem {
    pub seed: u64,
    pub multiset: Multiset,
    pub planted_duplicates: bool,
}

/// Shape of a generated corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub count: usize,
    pub dims: Vec<usize>,
    pub sizes: Vec<usize>,
    pub entries: Entries,
    /// Fraction of items with planted duplicates.
    pub duplicate_fraction: f64,
}

impl CorpusSpec {
    /// Uniform entries in `[-1, 1]`, `D` in `1..=3`, `N` in `1..=6`, a fifth
    /// of the items with duplicates.
    pub fn standard(count: usize) -> Self {
        Self {
            count,
            dims: vec![1, 2, 3],
            sizes: (1..=6).collect(),
            entries: Entries::Uniform,
            duplicate_fraction: 0.2,
        }
    }

    /// Same shape on the `1/16` grid of `[0, 2]^D`.
    pub fn rational(count: usize) -> Self {
        Self {
            entries: Entries::RATIONAL,
            ..Self::standard(count)
        }
    }

    pub fn item(&self, seed: u64, index: usize) -> CorpusItem {
        let item_seed = item_seed(seed, index as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(item_seed);
        let d = *self.dims.choose(&mut rng).expect("dims non-empty");
        let n = *self.sizes.choose(&mut rng).expect("sizes non-empty");
        let planted = rng.gen_bool(self.duplicate_fraction.clamp(0.0, 1.0)) && n > 1;
        CorpusItem {
            seed: item_seed,
            multiset: random_multiset(&mut rng, n, d, self.entries, planted),
            planted_duplicates: planted,
        }
    }

    pub fn generate(&self, seed: u64) -> Vec<CorpusItem> {
        (0..self.count).map(|i| self.item(seed, i)).collect()
    }
}

/// Rounds every coordinate to the nearest multiple of `step`.
pub fn round_to_grid(x: &Multiset, step: f64) -> Multiset {
    let elements: Vec<Vec<f64>> = x
        .iter()
        .map(|e| e.iter().map(|v| (v / step).round() * step).collect())
        .collect();
    Multiset::new(&elements, x.capacity()).expect("rounding keeps values finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_reproducible() {
        let spec = CorpusSpec::standard(50);
        assert_eq!(spec.generate(3), spec.generate(3));
        assert_ne!(spec.generate(3), spec.generate(4));
    }

    #[test]
    fn items_respect_the_spec() {
        let spec = CorpusSpec::rational(200);
        let items = spec.generate(0);
        for item in &items {
            assert!((1..=3).contains(&item.multiset.dim()));
            assert!((1..=6).contains(&item.multiset.len()));
            for v in item.multiset.iter().flatten() {
                assert!((0.0..=2.0).contains(v));
                assert_eq!((v * 16.0).fract(), 0.0);
            }
            if item.planted_duplicates {
                assert!(item.multiset.unique_count() < item.multiset.len());
            }
        }
        let planted = items.iter().filter(|i| i.planted_duplicates).count();
        assert!(planted > 10 && planted < 80, "{planted}");
    }

    #[test]
    fn grid_rounding() {
        let x = Multiset::new(&[vec![0.123_456_789, -0.5]], 1).unwrap();
        let r = round_to_grid(&x, 1e-6);
        assert!((r.element(0)[0] - 0.123_457).abs() < 1e-15);
        assert_eq!(r.element(0)[1], -0.5);
    }
}
