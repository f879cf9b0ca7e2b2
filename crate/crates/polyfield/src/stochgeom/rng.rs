//! Counter-based splittable random streams.
//!
//! Output block `i` of a stream with 128-bit key `k` is
//! `Philox4x32-10(counter = (i, k_hi), key = k_lo)`, truncated to 64 bits.
//! Child keys are SipHash-1-3 (128-bit output) of the tag words, keyed by the
//! parent key. Nothing depends on platform word size or endianness.

use rand_core::{impls, RngCore};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use siphasher::sip128::{Hasher128, SipHasher13};
use std::hash::Hasher;

/// 128-bit stream identifier. Serialized as a 32-digit hex string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StreamKey(pub u128);

impl Serialize for StreamKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{:032x}", self.0))
    }
}

impl<'de> Deserialize<'de> for StreamKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        u128::from_str_radix(&s, 16).map(StreamKey).map_err(serde::de::Error::custom)
    }
}

impl StreamKey {
    /// Root key for a user seed.
    pub fn from_seed(seed: u64) -> StreamKey {
        StreamKey(0).child(&[0x5eed, seed])
    }

    /// Derives the key of a child stream from structured tag words.
    pub fn child(self, tag: &[u64]) -> StreamKey {
        let k0 = self.0 as u64;
        let k1 = (self.0 >> 64) as u64;
        let mut h = SipHasher13::new_with_keys(k0, k1);
        h.write(&(tag.len() as u64).to_le_bytes());
        for w in tag {
            h.write(&w.to_le_bytes());
        }
        StreamKey(h.finish128().as_u128())
    }

    /// Hashes arbitrary bytes under this key (used to key objects by content).
    pub fn child_bytes(self, bytes: &[u8]) -> StreamKey {
        let mut h = SipHasher13::new_with_keys(self.0 as u64, (self.0 >> 64) as u64);
        h.write(&(bytes.len() as u64).to_le_bytes());
        h.write(bytes);
        StreamKey(h.finish128().as_u128())
    }

    pub fn stream(self) -> RngStream {
        RngStream::new(self)
    }
}

/// A position in a counter-based stream: the output depends only on
/// (key, counter).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    key: StreamKey,
    counter: u64,
}

const M0: u32 = 0xD251_1F53;
const M1: u32 = 0xCD9E_8D57;
const W0: u32 = 0x9E37_79B9;
const W1: u32 = 0xBB67_AE85;

/// The Philox4x32 bijection with 10 rounds.
pub fn philox4x32_10(ctr: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = ctr;
    let mut k = key;
    for _ in 0..10 {
        let p0 = (M0 as u64) * (c[0] as u64);
        let p1 = (M1 as u64) * (c[2] as u64);
        let (hi0, lo0) = ((p0 >> 32) as u32, p0 as u32);
        let (hi1, lo1) = ((p1 >> 32) as u32, p1 as u32);
        c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0];
        k = [k[0].wrapping_add(W0), k[1].wrapping_add(W1)];
    }
    c
}

impl RngStream {
    pub fn new(key: StreamKey) -> RngStream {
        RngStream { key, counter: 0 }
    }

    pub fn from_seed(seed: u64) -> RngStream {
        RngStream::new(StreamKey::from_seed(seed))
    }

    pub fn at(key: StreamKey, counter: u64) -> RngStream {
        RngStream { key, counter }
    }

    pub fn key(&self) -> StreamKey {
        self.key
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Independent child stream; does not advance `self`.
    pub fn split(&self, tag: &[u64]) -> RngStream {
        RngStream::new(self.key.child(tag))
    }

    pub fn next_word(&mut self) -> u64 {
        let k = self.key.0;
        let hi = (k >> 64) as u64;
        let out = philox4x32_10(
            [self.counter as u32, (self.counter >> 32) as u32, hi as u32, (hi >> 32) as u32],
            [k as u32, (k >> 32) as u32],
        );
        self.counter = self.counter.wrapping_add(1);
        (out[0] as u64) | ((out[1] as u64) << 32)
    }

    /// Uniform on [0, 1) with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_word() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on (0, 1).
    pub fn open01(&mut self) -> f64 {
        ((self.next_word() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.uniform()
    }

    /// Uniform integer in 0..n (n > 0), by rejection to avoid modulo bias.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let w = self.next_word();
            if w < zone {
                return w % n;
            }
        }
    }

    pub fn exponential(&mut self, rate: f64) -> f64 {
        -self.open01().ln() / rate
    }

    /// Poisson variate by the multiplication method applied to chunks of the mean.
    pub fn poisson(&mut self, mean: f64) -> u64 {
        let mut left = mean.max(0.0);
        let mut n = 0u64;
        while left > 0.0 {
            let m = left.min(16.0);
            left -= m;
            let floor = (-m).exp();
            let mut p = self.open01();
            while p > floor {
                n += 1;
                p *= self.open01();
            }
        }
        n
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.next_word() as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.next_word()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        impls::fill_bytes_via_next(self, dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand_core::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Known-answer vectors of the Random123 distribution.
    #[test]
    fn philox_known_answers() {
        assert_eq!(philox4x32_10([0; 4], [0; 2]), [0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8]);
        assert_eq!(
            philox4x32_10([u32::MAX; 4], [u32::MAX; 2]),
            [0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd]
        );
        assert_eq!(
            philox4x32_10([0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344], [0xa4093822, 0x299f31d0]),
            [0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1]
        );
    }

    #[test]
    fn output_depends_on_key_and_counter_only() {
        let k = StreamKey::from_seed(7);
        let mut a = RngStream::new(k);
        let _ = a.next_word();
        let x = a.next_word();
        let mut b = RngStream::at(k, 1);
        assert_eq!(b.next_word(), x);
    }

    #[test]
    fn split_is_tag_sensitive() {
        let k = StreamKey::from_seed(1);
        assert_ne!(k.child(&[1, 2]), k.child(&[2, 1]));
        assert_ne!(k.child(&[1]), k.child(&[1, 0]));
        assert_ne!(k.child(&[1]), StreamKey::from_seed(2).child(&[1]));
        assert_eq!(k.child(&[3, 4]), k.child(&[3, 4]));
    }

    #[test]
    fn key_serde_roundtrip() {
        let k = StreamKey::from_seed(99);
        let s = serde_json::to_string(&k).unwrap();
        assert_eq!(s.len(), 34);
        assert_eq!(serde_json::from_str::<StreamKey>(&s).unwrap(), k);
    }

    #[test]
    fn uniform_moments() {
        let mut r = RngStream::from_seed(3);
        let n = 200_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
            s += u;
            s2 += u * u;
        }
        let m = s / n as f64;
        assert!((m - 0.5).abs() < 4.0 * (1.0 / 12.0f64 / n as f64).sqrt());
        assert!((s2 / n as f64 - 1.0 / 3.0).abs() < 0.003);
    }

    #[test]
    fn poisson_mean_and_variance() {
        let mut r = RngStream::from_seed(11);
        for &lam in &[0.3, 5.0, 40.0] {
            let n = 40_000;
            let xs: Vec<f64> = (0..n).map(|_| r.poisson(lam) as f64).collect();
            let m = xs.iter().sum::<f64>() / n as f64;
            let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
            assert!((m - lam).abs() < 4.0 * (lam / n as f64).sqrt(), "lam {lam} mean {m}");
            assert!((v / lam - 1.0).abs() < 0.05, "lam {lam} var {v}");
        }
    }
}
