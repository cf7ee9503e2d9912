//! Counter-based keyed random numbers.
//!
//! Every random quantity in the crate is a pure function of a master seed
//! and a structured key, so results are bit-identical across runs, thread
//! counts, and evaluation order. Keys are folded into a 64-bit state with a
//! SplitMix64-style finalizer, and sequences are generated by advancing a
//! counter from the keyed state.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer (Stafford mix13 variant).
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash a structured key (seed plus word list) into one 64-bit state.
/// Order-sensitive and length-separated.
#[inline]
pub fn hash_words(seed: u64, words: &[u64]) -> u64 {
    let mut h = mix(seed ^ GOLDEN);
    for &w in words {
        h = mix(h.wrapping_add(GOLDEN) ^ w);
    }
    mix(h ^ (words.len() as u64))
}

#[inline]
fn to_unit(x: u64) -> f64 {
    // 53 mantissa bits, value in [0, 1)
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One uniform draw in [0, 1) for a fully specified key.
#[inline]
pub fn keyed_uniform(seed: u64, words: &[u64]) -> f64 {
    to_unit(hash_words(seed, words))
}

/// A counter-based stream rooted at a keyed state. Cloneable and `Copy`;
/// two streams with the same key produce the same sequence.
#[derive(Debug, Clone, Copy)]
pub struct KeyStream {
    key: u64,
    counter: u64,
    cached_normal: Option<f64>,
}

impl KeyStream {
    pub fn new(seed: u64, words: &[u64]) -> Self {
        KeyStream {
            key: hash_words(seed, words),
            counter: 0,
            cached_normal: None,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in [0, 1).
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        to_unit(self.next_u64())
    }

    /// Uniform integer in [0, n).
    #[inline]
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let i = (self.next_f64() * n as f64) as usize;
        i.min(n - 1)
    }

    pub fn next_bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Standard normal via Box-Muller; the second value of each pair is cached.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.cached_normal.take() {
            return z;
        }
        // u1 in (0, 1] so the log is finite
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.cached_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Seeded Fisher-Yates shuffle of `items`.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_index(i + 1);
            items.swap(i, j);
        }
    }
}
