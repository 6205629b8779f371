//! Number-theoretic transform over a few word-sized primes of the form c·2^k + 1.

use crate::fields::scalar::{mulmod, powmod};

/// (prime, primitive root), largest power-of-two transform first
pub const NTT_PRIMES: [(u64, u64); 3] = [(469_762_049, 3), (167_772_161, 3), (998_244_353, 3)];

/// Longest supported transform: the 2-part of p - 1.
pub fn max_len(p: u64) -> usize {
    1usize << (p - 1).trailing_zeros()
}

pub fn primitive_root(p: u64) -> Option<u64> {
    NTT_PRIMES.iter().find(|(q, _)| *q == p).map(|&(_, g)| g)
}

fn transform(a: &mut [u64], p: u64, g: u64, invert: bool) {
    let n = a.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j ^= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = powmod(g, (p - 1) / len as u64, p);
        if invert {
            w = powmod(w, p - 2, p);
        }
        let half = len / 2;
        let mut tw = Vec::with_capacity(half);
        let mut cur = 1;
        for _ in 0..half {
            tw.push(cur);
            cur = mulmod(cur, w, p);
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for k in 0..half {
                let u = lo[k];
                let v = hi[k] * tw[k] % p;
                lo[k] = if u + v >= p { u + v - p } else { u + v };
                hi[k] = if u >= v { u - v } else { u + p - v };
            }
        }
        len <<= 1;
    }
    if invert {
        let inv = powmod(n as u64, p - 2, p);
        for x in a.iter_mut() {
            *x = *x * inv % p;
        }
    }
}

/// Product of two coefficient vectors modulo `p` (which must be an NTT prime).
pub fn multiply(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let g = primitive_root(p).expect("not an NTT prime");
    let need = a.len() + b.len() - 1;
    let n = need.next_power_of_two();
    assert!(n <= max_len(p), "transform of length {n} exceeds the 2-part of p - 1");
    let mut fa = a.to_vec();
    fa.resize(n, 0);
    transform(&mut fa, p, g, false);
    if std::ptr::eq(a, b) {
        for x in fa.iter_mut() {
            *x = *x * *x % p;
        }
    } else {
        let mut fb = b.to_vec();
        fb.resize(n, 0);
        transform(&mut fb, p, g, false);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = *x * y % p;
        }
    }
    transform(&mut fa, p, g, true);
    fa.truncate(need);
    fa
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_schoolbook() {
        let p = NTT_PRIMES[0].0;
        let a: Vec<u64> = (0..37).map(|i| (i * i * 7919 + 3) % p).collect();
        let b: Vec<u64> = (0..23).map(|i| (i * 104729 + 11) % p).collect();
        let mut naive = vec![0u64; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                naive[i + j] = (naive[i + j] + x * y % p) % p;
            }
        }
        assert_eq!(multiply(&a, &b, p), naive);
        assert_eq!(multiply(&a, &a, p), multiply(&a, &a.clone(), p));
    }

    #[test]
    fn transform_lengths() {
        assert_eq!(NTT_PRIMES.map(|(p, _)| max_len(p)), [1 << 26, 1 << 25, 1 << 23]);
        for (p, g) in NTT_PRIMES {
            assert_eq!(powmod(g, (p - 1) / 2, p), p - 1, "{g} is not a generator mod {p}");
        }
    }
}
