//! Arithmetic functions, CRT and truncated Dirichlet series.
//!
//! The sieve fills the Möbius function, the divisor-count function and the
//! smallest-prime-factor table in one linear pass. Series are evaluated as
//! Euler products over the primes up to a bound `P`, each paired with an
//! upper bound on the truncation error.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest table size [`build_tables`] accepts.
pub const DEFAULT_TABLE_CEILING: usize = 100_000_000;

/// Prime bound used wherever a series constant is needed implicitly.
pub const DEFAULT_PRIME_BOUND: u64 = 1_000_000;

/// Safety factor applied to the integral-comparison tail bound of an
/// Euler product.
const EULER_TAIL_FACTOR: f64 = 4.0;

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Sieved tables of `mu`, `sigma` and smallest prime factors on `1..=limit`.
#[derive(Debug, Clone)]
pub struct ArithTables {
    limit: usize,
    mu: Vec<i8>,
    sigma: Vec<u32>,
    primes: Vec<u32>,
    spf: Vec<u32>,
}

/// Runs the linear sieve up to `limit` with the default ceiling.
pub fn build_tables(limit: usize) -> Result<ArithTables> {
    ArithTables::with_ceiling(limit, DEFAULT_TABLE_CEILING)
}

impl ArithTables {
    pub fn new(limit: usize) -> Result<Self> {
        build_tables(limit)
    }

    pub fn with_ceiling(limit: usize, ceiling: usize) -> Result<Self> {
        if limit == 0 || limit > ceiling {
            return Err(Error::Size {
                what: "arithmetic table",
                requested: limit as u128,
                ceiling: ceiling as u128,
            });
        }
        if limit > u32::MAX as usize {
            return Err(Error::Overflow(format!(
                "table limit {limit} does not fit 32-bit entries"
            )));
        }

        let n = limit;
        let mut mu = vec![0i8; n + 1];
        let mut sigma = vec![0u32; n + 1];
        let mut spf = vec![0u32; n + 1];
        // exponent of spf(m) in m
        let mut spf_exp = vec![0u8; n + 1];
        let mut primes = Vec::new();

        mu[1] = 1;
        sigma[1] = 1;
        spf[1] = 1;
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                spf_exp[i] = 1;
                mu[i] = -1;
                sigma[i] = 2;
                primes.push(i as u32);
            }
            let spf_i = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > spf_i || m > n {
                    break;
                }
                spf[m] = p;
                if p == spf_i {
                    let e = spf_exp[i] as u32;
                    spf_exp[m] = (e + 1) as u8;
                    mu[m] = 0;
                    sigma[m] = sigma[i] / (e + 1) * (e + 2);
                } else {
                    spf_exp[m] = 1;
                    mu[m] = -mu[i];
                    sigma[m] = sigma[i] * 2;
                }
            }
        }

        Ok(Self {
            limit,
            mu,
            sigma,
            primes,
            spf,
        })
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// Möbius function; `m` must lie in `1..=limit`.
    pub fn mu(&self, m: usize) -> i8 {
        assert!(m >= 1 && m <= self.limit, "index {m} outside table");
        self.mu[m]
    }

    /// Number of positive divisors of `m`.
    pub fn sigma(&self, m: usize) -> u32 {
        assert!(m >= 1 && m <= self.limit, "index {m} outside table");
        self.sigma[m]
    }

    pub fn smallest_prime_factor(&self, m: usize) -> u32 {
        assert!(m >= 1 && m <= self.limit, "index {m} outside table");
        self.spf[m]
    }

    /// Primes up to `limit`, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// `mu(1..=limit)`; element `i` holds `mu(i + 1)`.
    pub fn mu_slice(&self) -> &[i8] {
        &self.mu[1..]
    }

    pub fn sigma_slice(&self) -> &[u32] {
        &self.sigma[1..]
    }

    /// Prime factorization of `m` as `(p, exponent)` pairs, ascending.
    pub fn factorize(&self, mut m: usize) -> Vec<(u64, u32)> {
        assert!(m >= 1 && m <= self.limit, "index {m} outside table");
        let mut out: Vec<(u64, u32)> = Vec::new();
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        out
    }
}

/// Primes up to `bound` by the sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::with_capacity(n / 10 + 8);
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    let mut bound = 16u64;
    loop {
        let ps = primes_up_to(bound);
        if ps.len() >= count {
            return ps[..count].to_vec();
        }
        bound *= 2;
    }
}

/// Prime factorization by trial division.
pub fn factorize(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p: u128 = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Product of the distinct primes dividing `d`.
pub fn squarefree_kernel(d: u64) -> Result<u64> {
    if d == 0 {
        return Err(Error::Domain("squarefree kernel of 0".into()));
    }
    Ok(factorize(d as u128)
        .iter()
        .map(|&(p, _)| p as u64)
        .product())
}

/// Smallest `m >= 1` with `d | m^k`.
///
/// For `d = prod p^a` this is `prod p^ceil(a/k)`.
pub fn k_root_index(d: u64, k: u32) -> Result<u64> {
    if d == 0 {
        return Err(Error::Domain("k-th root index of 0".into()));
    }
    if k < 2 {
        return Err(Error::Domain(format!("k = {k}, need k >= 2")));
    }
    Ok(factorize(d as u128)
        .iter()
        .map(|&(p, a)| (p as u64).pow(a.div_ceil(k)))
        .product())
}

/// `(a * b) mod m` without overflow for `m < 2^127`.
pub(crate) fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    let (mut a, mut b) = (a % m, b % m);
    if let Some(p) = a.checked_mul(b) {
        return p % m;
    }
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = (acc + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    acc
}

fn inverse_mod(a: u128, m: u128) -> Option<u128> {
    // extended Euclid on signed values; m < 2^127 keeps every step in range
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u128)
}

/// Solves `x = residues[j] (mod moduli[j])` for pairwise-coprime moduli.
///
/// Returns `(x, M)` with `M` the product of the moduli and `0 <= x < M`.
/// The product must stay below `2^127`.
pub fn crt(residues: &[i128], moduli: &[u128]) -> Result<(u128, u128)> {
    if residues.len() != moduli.len() {
        return Err(Error::Argument(format!(
            "{} residues for {} moduli",
            residues.len(),
            moduli.len()
        )));
    }
    if moduli.is_empty() {
        return Err(Error::Argument("no congruences given".into()));
    }
    for (i, &m) in moduli.iter().enumerate() {
        if m < 2 {
            return Err(Error::Argument(format!("modulus {m} must exceed 1")));
        }
        for &other in &moduli[..i] {
            if gcd_u128(m, other) != 1 {
                return Err(Error::Argument(format!(
                    "moduli {other} and {m} are not coprime"
                )));
            }
        }
    }

    const LIMIT: u128 = 1 << 127;
    let mut x: u128 = 0;
    let mut modulus: u128 = 1;
    for (&r, &m) in residues.iter().zip(moduli) {
        let next = modulus.saturating_mul(m);
        if next >= LIMIT {
            return Err(Error::Size {
                what: "product of CRT moduli",
                requested: next,
                ceiling: LIMIT,
            });
        }
        let r = r.rem_euclid(m as i128) as u128;
        let diff = (r + m - x % m) % m;
        let inv = inverse_mod(modulus % m, m).expect("coprime moduli");
        let t = mul_mod_u128(diff, inv, m);
        x += modulus * t;
        modulus = next;
    }
    Ok((x, modulus))
}

/// Which Dirichlet series to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    /// `zeta(s) = prod (1 - p^-s)^-1`
    Zeta,
    /// `1/zeta(s) = sum mu(m) m^-s = prod (1 - p^-s)`
    InvZeta,
    /// `xi(s) = sum mu(m) sigma(m) m^-s = prod (1 - 2 p^-s)`
    Xi,
}

impl SeriesKind {
    fn coefficient_bound(self) -> f64 {
        match self {
            SeriesKind::Zeta | SeriesKind::InvZeta => 1.0,
            SeriesKind::Xi => 2.0,
        }
    }
}

impl std::str::FromStr for SeriesKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zeta" => Ok(SeriesKind::Zeta),
            "inv_zeta" | "inv-zeta" => Ok(SeriesKind::InvZeta),
            "xi" => Ok(SeriesKind::Xi),
            other => Err(Error::Argument(format!("unknown series kind `{other}`"))),
        }
    }
}

impl std::fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SeriesKind::Zeta => "zeta",
            SeriesKind::InvZeta => "inv_zeta",
            SeriesKind::Xi => "xi",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// Euler product over primes `p <= P`.
    PrimeBound(u64),
    /// Dirichlet sum over `m <= M`.
    TermBound(u64),
}

/// A truncated series value and a bound on its distance to the full series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub truncation: Truncation,
}

fn check_exponent(s: i64) -> Result<i32> {
    if s <= 1 {
        return Err(Error::Divergent(s));
    }
    i32::try_from(s).map_err(|_| Error::Argument(format!("exponent {s} too large")))
}

fn euler_product(kind: SeriesKind, s: i32, primes: impl Iterator<Item = u64>) -> f64 {
    let local = |p: u64| -> f64 {
        let t = (p as f64).powi(-s);
        match kind {
            SeriesKind::Zeta | SeriesKind::InvZeta => 1.0 - t,
            SeriesKind::Xi => 1.0 - 2.0 * t,
        }
    };
    let prod: f64 = primes.map(local).product();
    match kind {
        SeriesKind::Zeta => 1.0 / prod,
        _ => prod,
    }
}

/// Euler product truncated at primes `<= prime_bound`.
///
/// The tail bound is `4 c P^(1-s) / (s-1)`, with `c` the coefficient bound
/// of the local factors (1, or 2 for `xi`).
pub fn eval_series(kind: SeriesKind, s: i64, prime_bound: u64) -> Result<SeriesValue> {
    let s = check_exponent(s)?;
    if prime_bound < 2 {
        return Err(Error::Argument(format!(
            "prime bound {prime_bound} must be at least 2"
        )));
    }
    let value = if prime_bound == DEFAULT_PRIME_BOUND {
        euler_product(kind, s, default_primes().iter().copied())
    } else {
        euler_product(kind, s, primes_up_to(prime_bound).into_iter())
    };
    let tail_bound =
        EULER_TAIL_FACTOR * kind.coefficient_bound() * (prime_bound as f64).powi(1 - s)
            / f64::from(s - 1);
    Ok(SeriesValue {
        value,
        tail_bound,
        truncation: Truncation::PrimeBound(prime_bound),
    })
}

/// Partial Dirichlet sum over `m <= tables.limit()`.
///
/// `zeta` and `1/zeta` use `sum_{m>M} m^-s <= M^(1-s)/(s-1)`. For `xi` the
/// coefficients are bounded by the divisor count, and partial summation with
/// `sum_{m<=t} d(m) <= t (ln t + 1)` gives
/// `s M^(1-s) (ln M/(s-1) + 1/(s-1)^2 + 1/(s-1))`.
pub fn dirichlet_sum(kind: SeriesKind, s: i64, tables: &ArithTables) -> Result<SeriesValue> {
    let s = check_exponent(s)?;
    let m_max = tables.limit();
    let mut value = 0.0;
    // smallest terms first
    for m in (1..=m_max).rev() {
        let c = match kind {
            SeriesKind::Zeta => 1.0,
            SeriesKind::InvZeta => f64::from(tables.mu[m]),
            SeriesKind::Xi => f64::from(tables.mu[m]) * f64::from(tables.sigma[m]),
        };
        if c != 0.0 {
            value += c * (m as f64).powi(-s);
        }
    }
    let mf = m_max as f64;
    let sm1 = f64::from(s - 1);
    let tail_bound = match kind {
        SeriesKind::Zeta | SeriesKind::InvZeta => mf.powi(1 - s) / sm1,
        SeriesKind::Xi => {
            f64::from(s) * mf.powi(1 - s) * (mf.ln() / sm1 + 1.0 / (sm1 * sm1) + 1.0 / sm1)
        }
    };
    Ok(SeriesValue {
        value,
        tail_bound,
        truncation: Truncation::TermBound(m_max as u64),
    })
}

fn default_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(DEFAULT_PRIME_BOUND))
}

/// `zeta(s)` for integer `s >= 2` to double precision, by Euler-Maclaurin
/// summation cut at `N = 32`.
fn zeta_int(s: u32) -> f64 {
    const N: u32 = 32;
    // B_2j / (2j)!
    const COEF: [f64; 5] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
    ];
    let s_f = f64::from(s);
    let n = f64::from(N);
    let head: f64 = (1..N).rev().map(|m| f64::from(m).powi(-(s as i32))).sum();
    let mut tail = n.powf(1.0 - s_f) / (s_f - 1.0) + 0.5 * n.powf(-s_f);
    // rising factorial s (s+1) ... (s+2j-2), times N^(-s-2j+1)
    let mut rising = s_f;
    let mut power = n.powf(-s_f - 1.0);
    for (j, c) in COEF.iter().enumerate() {
        tail += c * rising * power;
        let a = s_f + 2.0 * j as f64;
        rising *= (a + 1.0) * (a + 2.0);
        power /= n * n;
    }
    head + tail
}

/// Full series value for integer `s >= 2`, accurate to double precision.
///
/// `xi` is computed as `zeta(s)^-2 prod_p (1 - 2 p^-s) / (1 - p^-s)^2`,
/// whose factors are `1 - O(p^-2s)`, so the product over primes up to the
/// default bound has no visible truncation error.
pub fn series_constant(kind: SeriesKind, s: u32) -> f64 {
    assert!(s >= 2, "series constant needs s >= 2");
    let zeta = zeta_int(s);
    match kind {
        SeriesKind::Zeta => zeta,
        SeriesKind::InvZeta => 1.0 / zeta,
        SeriesKind::Xi => {
            // each factor is 1 - u with u = t^2 / (1 - t)^2
            let log_correction: f64 = default_primes()
                .iter()
                .rev()
                .map(|&p| {
                    let t = (p as f64).powi(-(s as i32));
                    let u = t / (1.0 - t);
                    (-u * u).ln_1p()
                })
                .sum();
            log_correction.exp() / (zeta * zeta)
        }
    }
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    // v_0 = 1, v_1 = 2, v_n = 2 pi / n * v_{n-2}
    let mut v = [1.0, 2.0];
    if n < 2 {
        return v[n];
    }
    for k in 2..=n {
        v[k % 2] *= 2.0 * std::f64::consts::PI / k as f64;
    }
    v[n % 2]
}
