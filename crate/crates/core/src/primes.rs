//! Prime counting by segmented sieve.
//!
//! The table stores one bit per odd number together with cumulative counts
//! per 64-bit word, so π(x) costs one lookup and one popcount.
//!
//! On-disk cache layout (little-endian): a 16-byte header
//! `b"PSV1"`, `version: u32`, `limit: u64`, followed by the odd-number bit
//! array as `u64` words (bit `i` of word `w` marks `2·(64w + i) + 1` as prime).

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const DEFAULT_LIMIT: u64 = 100_000_000;
const CACHE_MAGIC: &[u8; 4] = b"PSV1";
const CACHE_VERSION: u32 = 1;
const SEGMENT: u64 = 1 << 18;

/// Immutable prime-counting table for arguments up to `limit`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeCounter {
    limit: u64,
    /// Bit i set iff 2i + 1 is prime (bit for 1 cleared).
    odd_bits: Vec<u64>,
    /// Number of odd primes in all words strictly before word w.
    cumulative: Vec<u32>,
}

impl PrimeCounter {
    pub fn new(limit: u64) -> Self {
        let odd_bits = segmented_sieve(limit);
        Self::from_bits(limit, odd_bits)
    }

    fn from_bits(limit: u64, odd_bits: Vec<u64>) -> Self {
        let mut cumulative = Vec::with_capacity(odd_bits.len() + 1);
        let mut acc = 0u32;
        for w in &odd_bits {
            cumulative.push(acc);
            acc += w.count_ones();
        }
        cumulative.push(acc);
        Self {
            limit,
            odd_bits,
            cumulative,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Exact π(x) for 0 ≤ x ≤ limit.
    pub fn pi_exact(&self, x: f64) -> Result<u64> {
        if !(x >= 0.0) || x > self.limit as f64 {
            return Err(Error::OutOfRange { x, limit: self.limit });
        }
        let n = x.floor() as u64;
        if n < 2 {
            return Ok(0);
        }
        // Odd numbers 1, 3, ..., up to n occupy indices 0..=(n - 1) / 2.
        let last = (n - 1) / 2;
        let word = (last / 64) as usize;
        let bit = last % 64;
        let mask = if bit == 63 { u64::MAX } else { (1u64 << (bit + 1)) - 1 };
        let odd = self.cumulative[word] as u64 + (self.odd_bits[word] & mask).count_ones() as u64;
        Ok(odd + 1)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
        let mut buf = Vec::with_capacity(16 + 8 * self.odd_bits.len());
        buf.extend_from_slice(CACHE_MAGIC);
        buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        buf.extend_from_slice(&self.limit.to_le_bytes());
        for w in &self.odd_bits {
            buf.extend_from_slice(&w.to_le_bytes());
        }
        let mut f = fs::File::create(path).map_err(io)?;
        f.write_all(&buf).map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
        let mut raw = Vec::new();
        fs::File::open(path).map_err(io)?.read_to_end(&mut raw).map_err(io)?;
        if raw.len() < 16 || &raw[0..4] != CACHE_MAGIC {
            return Err(Error::Cache(format!("{}: bad magic", path.display())));
        }
        let version = u32::from_le_bytes(raw[4..8].try_into().expect("4 bytes"));
        if version != CACHE_VERSION {
            return Err(Error::Cache(format!("unsupported sieve version {version}")));
        }
        let limit = u64::from_le_bytes(raw[8..16].try_into().expect("8 bytes"));
        let words = odd_words(limit);
        if raw.len() != 16 + 8 * words {
            return Err(Error::Cache(format!("{}: truncated", path.display())));
        }
        let odd_bits = raw[16..]
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Ok(Self::from_bits(limit, odd_bits))
    }

    /// Loads the cached table for `limit` from `dir`, building and saving it
    /// when absent.
    pub fn cached(dir: &Path, limit: u64) -> Result<Self> {
        let path = dir.join(format!("primes-{limit}.bin"));
        if let Ok(pc) = Self::load(&path) {
            if pc.limit == limit {
                return Ok(pc);
            }
        }
        let pc = Self::new(limit);
        fs::create_dir_all(dir).map_err(|e| Error::Cache(e.to_string()))?;
        pc.save(&path)?;
        Ok(pc)
    }
}

fn odd_words(limit: u64) -> usize {
    (limit / 2 + 1).div_ceil(64) as usize
}

/// Bit table of odd primes up to `limit`.
fn segmented_sieve(limit: u64) -> Vec<u64> {
    let words = odd_words(limit);
    let mut bits = vec![0u64; words];
    if limit < 3 {
        return bits;
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let base_primes: Vec<u64> = plain_sieve(root)
        .into_iter()
        .enumerate()
        .filter(|&(n, p)| p && n > 2)
        .map(|(n, _)| n as u64)
        .collect();

    let mut seg = vec![true; SEGMENT as usize];
    let mut lo = 0u64;
    while lo <= limit {
        let hi = (lo + SEGMENT - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        seg[..len].fill(true);
        for &p in &base_primes {
            if p * p > hi {
                break;
            }
            let mut m = (p * p).max(lo.div_ceil(p) * p);
            if m % 2 == 0 {
                m += p;
            }
            while m <= hi {
                seg[(m - lo) as usize] = false;
                m += 2 * p;
            }
        }
        let mut n = if lo % 2 == 0 { lo + 1 } else { lo };
        while n <= hi {
            if n >= 3 && seg[(n - lo) as usize] {
                let idx = n / 2;
                bits[(idx / 64) as usize] |= 1 << (idx % 64);
            }
            n += 2;
        }
        lo += SEGMENT;
    }
    bits
}

/// Sieve of Eratosthenes over 0..=n.
pub(crate) fn plain_sieve(n: u64) -> Vec<bool> {
    let n = n as usize;
    let mut is_prime = vec![true; n + 1];
    is_prime[0] = false;
    if n >= 1 {
        is_prime[1] = false;
    }
    let mut p = 2;
    while p * p <= n {
        if is_prime[p] {
            for m in (p * p..=n).step_by(p) {
                is_prime[m] = false;
            }
        }
        p += 1;
    }
    is_prime
}

/// ζ(s) for real s ≥ 2 by Euler–Maclaurin with ten explicit terms.
fn zeta_real(s: f64) -> f64 {
    const B: [f64; 6] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
    ];
    let n = 10.0f64;
    let mut sum: f64 = (1..10).map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    let mut poch = s;
    let mut fact = 2.0;
    for (j, b) in B.iter().enumerate() {
        let k = 2 * j + 2;
        sum += b / fact * poch * n.powf(-s - (k as f64) + 1.0);
        poch *= (s + k as f64 - 1.0) * (s + k as f64);
        fact *= ((k + 1) * (k + 2)) as f64;
    }
    sum
}

/// Riemann's R(x) = Σ μ(n)/n · li(x^{1/n}), evaluated by the Gram series.
///
/// This is the smooth approximation used when x exceeds the sieve limit.
/// Note R(2) ≈ 1.541 (li(2) ≈ 1.045); it is reported as approximate.
pub fn pi_approx(x: f64) -> f64 {
    assert!(x >= 2.0, "pi_approx requires x >= 2");
    let lx = x.ln();
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 1..400 {
        let kf = k as f64;
        term *= lx / kf;
        let add = term / (kf * zeta_real(kf + 1.0));
        sum += add;
        if add < 1e-17 * sum && kf > lx {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let pc = PrimeCounter::new(1000);
        assert_eq!(pc.pi_exact(0.0).unwrap(), 0);
        assert_eq!(pc.pi_exact(1.0).unwrap(), 0);
        assert_eq!(pc.pi_exact(2.0).unwrap(), 1);
        assert_eq!(pc.pi_exact(3.0).unwrap(), 2);
        assert_eq!(pc.pi_exact(10.0).unwrap(), 4);
        assert_eq!(pc.pi_exact(100.0).unwrap(), 25);
        assert_eq!(pc.pi_exact(1000.0).unwrap(), 168);
        assert!(pc.pi_exact(1001.0).is_err());
    }

    #[test]
    fn agrees_with_plain_sieve() {
        let limit = 200_003;
        let pc = PrimeCounter::new(limit);
        let plain = plain_sieve(limit);
        let mut count = 0;
        for (n, &p) in plain.iter().enumerate() {
            count += p as u64;
            if n % 997 == 0 || n as u64 == limit {
                assert_eq!(pc.pi_exact(n as f64).unwrap(), count, "n={n}");
            }
        }
    }

    #[test]
    fn million() {
        let pc = PrimeCounter::new(1_000_000);
        assert_eq!(pc.pi_exact(1e6).unwrap(), 78498);
        let approx = pi_approx(1e6);
        assert!((approx - 78498.0).abs() / 78498.0 < 5e-4);
        assert!((approx - 78527.3994291277).abs() < 1e-6);
    }

    #[test]
    fn approx_at_two() {
        assert!((pi_approx(2.0) - 1.54100901618713).abs() < 1e-10);
    }

    #[test]
    fn zeta_real_values() {
        assert!((zeta_real(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        assert!((zeta_real(3.0) - 1.2020569031595942).abs() < 1e-14);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let pc = PrimeCounter::cached(dir.path(), 50_000).unwrap();
        let again = PrimeCounter::load(&dir.path().join("primes-50000.bin")).unwrap();
        assert_eq!(pc, again);
        assert_eq!(again.pi_exact(50_000.0).unwrap(), 5133);
    }
}
