//! Deterministic, splittable random streams.
//!
//! Every random decision in this workspace is drawn from a named stream so
//! that replications never share generator state and so that ports in other
//! languages can reproduce the exact same values. The scheme:
//!
//! 1. A stream is identified by `(base, replication, purpose)` where
//!    `purpose` is an ASCII string such as `"parity.noise"`.
//! 2. The stream key is the FNV-1a 64-bit hash of the ASCII string
//!    `"{purpose}#{base}#{replication}"` with both integers written in
//!    decimal.
//! 3. The generator is SplitMix64 (Steele, Lea & Flood): state starts at
//!    the key, advances by the constant `0x9E37_79B9_7F4A_7C15` per draw,
//!    and each output is the finalizer of the advanced state. The i-th
//!    output is therefore a pure function of `(key, i)`.
//!
//! Derived values: `uniform` takes the top 53 bits over 2^53; `normal` is a
//! single Box-Muller evaluation consuming exactly two raw draws (no cached
//! spare); `below(n)` is the 128-bit multiply-shift reduction.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// FNV-1a over a byte slice, the stream-key hash.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// One named SplitMix64 stream.
#[derive(Clone, Debug)]
pub struct Stream {
    state: u64,
}

impl Stream {
    /// Stream keyed directly by a raw seed.
    pub fn from_seed(seed: u64) -> Self {
        Stream { state: seed }
    }

    /// Stream keyed by `(base, replication, purpose)` per the module scheme.
    pub fn named(base: u64, replication: u64, purpose: &str) -> Self {
        let mut key = alloc::string::String::new();
        core::fmt::Write::write_fmt(
            &mut key,
            format_args!("{purpose}#{base}#{replication}"),
        )
        .expect("formatting stream key");
        Stream::from_seed(fnv1a64(key.as_bytes()))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        const DEN: f64 = (1u64 << 53) as f64;
        ((self.next_u64() >> 11) as f64) / DEN
    }

    /// Uniform in `(0, 1]`, safe as a logarithm argument.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        const DEN: f64 = (1u64 << 53) as f64;
        (((self.next_u64() >> 11) + 1) as f64) / DEN
    }

    /// Uniform in `[lo, hi)`.
    #[inline]
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.uniform() * (hi - lo)
    }

    /// Standard normal via Box-Muller; consumes two raw draws per call.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform_open();
        let u2 = self.uniform();
        crate::math::sqrt(-2.0 * crate::math::ln(u1))
            * crate::math::cos(2.0 * core::f64::consts::PI * u2)
    }

    /// Uniform integer in `[0, n)` via multiply-shift (bias below 2^-64).
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (((self.next_u64() as u128) * (n as u128)) >> 64) as usize
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn streams_are_reproducible() {
        let mut a = Stream::named(7, 3, "unit");
        let mut b = Stream::named(7, 3, "unit");
        for _ in 0..32 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn distinct_purposes_give_distinct_streams() {
        let mut a = Stream::named(7, 3, "one");
        let mut b = Stream::named(7, 3, "two");
        let same = (0..8).filter(|_| a.next_u64() == b.next_u64()).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn distinct_replications_give_distinct_streams() {
        let mut a = Stream::named(7, 0, "one");
        let mut b = Stream::named(7, 1, "one");
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn uniform_within_bounds_and_normal_has_sane_moments() {
        let mut s = Stream::from_seed(11);
        let mut sum = 0.0;
        let mut sq = 0.0;
        let n = 20_000;
        for _ in 0..n {
            let u = s.uniform();
            assert!((0.0..1.0).contains(&u));
            let z = s.normal();
            sum += z;
            sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.03, "mean = {mean}");
        assert!((var - 1.0).abs() < 0.05, "var = {var}");
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut s = Stream::from_seed(5);
        let mut v: Vec<usize> = (0..100).collect();
        s.shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn fnv_matches_reference_vector() {
        // Reference value for "a" from the FNV-1a specification.
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
    }
}
