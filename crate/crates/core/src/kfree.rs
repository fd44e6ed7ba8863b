//! k-th-power-free integers.

use crate::error::{Error, Result};
use crate::numtheory::{crt, first_primes, primes_up_to};

/// Largest interval [`enumerate_kfree`] and [`kfree_mask`] will sieve.
pub const DEFAULT_INTERVAL_CEILING: u64 = 1 << 32;

/// The power `k >= 2` defining the set of k-free integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KFreeSpec(u32);

impl KFreeSpec {
    pub fn new(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::Domain(format!("k = {k}, need k >= 2")));
        }
        Ok(Self(k))
    }

    pub fn k(self) -> u32 {
        self.0
    }
}

/// Trial division of `n > 0` by `p^k`, stripping factors as they are found.
pub(crate) fn is_kfree_abs(mut n: u128, k: u32) -> bool {
    let mut p: u128 = 2;
    loop {
        let Some(pk) = p.checked_pow(k) else {
            return true;
        };
        if pk > n {
            return true;
        }
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
                if e >= k {
                    return false;
                }
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
}

/// Whether no prime `p` has `p^k | x`. The sign of `x` is ignored.
pub fn is_kfree(x: i64, k: u32) -> Result<bool> {
    KFreeSpec::new(k)?;
    if x == 0 {
        return Err(Error::Domain("k-freeness is undefined at 0".into()));
    }
    Ok(is_kfree_abs(x.unsigned_abs() as u128, k))
}

/// Membership flags for `lo..=hi`, entry `i` describing `lo + i`. Zero is
/// flagged `false`.
pub fn kfree_mask(lo: i64, hi: i64, k: u32) -> Result<Vec<bool>> {
    KFreeSpec::new(k)?;
    if lo > hi {
        return Err(Error::Argument(format!("empty interval [{lo}, {hi}]")));
    }
    let len = (hi as i128 - lo as i128 + 1) as u128;
    if len > DEFAULT_INTERVAL_CEILING as u128 {
        return Err(Error::Size {
            what: "sieve interval",
            requested: len,
            ceiling: DEFAULT_INTERVAL_CEILING as u128,
        });
    }
    let mut mask = vec![true; len as usize];
    if lo <= 0 && 0 <= hi {
        mask[(-lo) as usize] = false;
    }
    let max_abs = lo.unsigned_abs().max(hi.unsigned_abs());
    let root = integer_root(max_abs, k);
    for p in primes_up_to(root) {
        let pk = (p as i128).pow(k);
        let lo = lo as i128;
        let hi = hi as i128;
        let mut m = lo.div_euclid(pk) * pk;
        if m < lo {
            m += pk;
        }
        while m <= hi {
            mask[(m - lo) as usize] = false;
            m += pk;
        }
    }
    Ok(mask)
}

/// Largest `r` with `r^k <= n`.
fn integer_root(n: u64, k: u32) -> u64 {
    let mut r = (n as f64).powf(1.0 / k as f64) as u64;
    while r > 0 && (r as u128).pow(k) > n as u128 {
        r -= 1;
    }
    while ((r + 1) as u128).pow(k) <= n as u128 {
        r += 1;
    }
    r
}

/// k-free integers in `lo..=hi`, ascending, zero excluded.
pub fn enumerate_kfree(lo: i64, hi: i64, k: u32) -> Result<Vec<i64>> {
    let mask = kfree_mask(lo, hi, k)?;
    Ok(mask
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(i, _)| lo + i as i64)
        .collect())
}

/// Start of a run of `len` consecutive integers none of which is k-free.
///
/// Solves `N = -j (mod m_j^k)` for `j = 0..len`, so `m_j^k | N + j`. The
/// moduli default to the first `len` primes. Returns the least positive
/// solution.
pub fn find_gap(k: u32, len: usize, moduli: Option<&[u64]>) -> Result<u128> {
    KFreeSpec::new(k)?;
    if len == 0 {
        return Err(Error::Argument("gap length must be positive".into()));
    }
    let moduli: Vec<u64> = match moduli {
        Some(m) => m.to_vec(),
        None => first_primes(len),
    };
    if moduli.len() != len {
        return Err(Error::Argument(format!(
            "{} moduli for a gap of length {len}",
            moduli.len()
        )));
    }
    let powers: Vec<u128> = moduli
        .iter()
        .map(|&m| {
            let power = (m as u128).saturating_pow(k);
            if power >= 1 << 127 {
                return Err(Error::Size {
                    what: "gap modulus power",
                    requested: power,
                    ceiling: 1 << 127,
                });
            }
            Ok(power)
        })
        .collect::<Result<_>>()?;
    let residues: Vec<i128> = (0..len).map(|j| -(j as i128)).collect();
    let (mut n, m) = crt(&residues, &powers)?;
    if n == 0 {
        n = m;
    }
    if n.checked_add(len as u128).is_none() {
        return Err(Error::Overflow("gap start exceeds 128 bits".into()));
    }
    for j in 0..len as u128 {
        assert!(
            !is_kfree_abs(n + j, k),
            "gap construction left {} k-free",
            n + j
        );
    }
    Ok(n)
}
