//! Counting distinct profiles.
//!
//! `P_q(n, ell)` is the number of distinct `ell`-gram profiles among the
//! `q^n` words of length `n`. This module provides:
//!
//! - exact values for `ell <= n < 2 ell` via Lyndon-word counts,
//! - a brute-force oracle that buckets every word by its profile,
//! - lower bounds from addressable codes and from partial de Bruijn words,
//! - the weak-composition upper bound,
//! - [`BoundReport`] and log-spaced rate sweeps.
//!
//! Bounds that can be astronomically large are returned in `log_q` units.
//! Exact counts use arbitrary-precision integers.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use statrs::function::gamma::ln_gamma;

use crate::word::check_alphabet;
use crate::{Error, Exec, Result};

/// Default limit on the number of words an exhaustive routine may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 20;

/// Environment variable overriding [`DEFAULT_ENUMERATION_BUDGET`].
pub const BUDGET_ENV: &str = "PROFILECODE_ENUM_BUDGET";

/// Default limit, in bits, for exact counts such as `(q!)^(q^(ell-1))`.
pub const DEFAULT_BIGCOUNT_BITS: u64 = 1 << 26;

/// Word lengths up to this use exact big-integer arithmetic in reports.
pub const EXACT_SWITCH: u64 = 4096;

pub fn enumeration_budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ENUMERATION_BUDGET)
}

// ---------------------------------------------------------------------------
// Number theory

/// Möbius function.
pub fn mobius(mut n: u64) -> i8 {
    assert!(n >= 1, "mobius is defined for n >= 1");
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Divisors of `n` in increasing order, by trial division up to `sqrt(n)`.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Smallest `k` with `q^k >= m`; zero for `m <= 1`.
pub fn ceil_log(q: u64, m: u64) -> u32 {
    let mut k = 0;
    let mut power = 1u128;
    while power < m as u128 {
        power *= q as u128;
        k += 1;
    }
    k
}

fn big_pow(q: u32, e: u64) -> BigUint {
    BigUint::from(q).pow(e as u32)
}

/// `sum_{t | r} mu(r/t) q^t`, the number of aperiodic words of length `r`.
fn aperiodic_words(q: u32, r: u64) -> BigInt {
    divisors(r)
        .into_iter()
        .map(|t| BigInt::from(mobius(r / t)) * BigInt::from(big_pow(q, t)))
        .sum()
}

/// Number of Lyndon words of length `r` over `q` symbols.
pub fn lyndon_count(q: u32, r: u64) -> BigUint {
    assert!(q >= 2 && r >= 1);
    let total = aperiodic_words(q, r);
    let (quot, rem) = total.div_rem(&BigInt::from(r));
    debug_assert!(rem.is_zero());
    quot.to_biguint().expect("Lyndon count is nonnegative")
}

/// `q^n - sum_{r | n-ell+1} (r-1) L_q(r)`.
fn conjugacy_class_count(q: u32, n: u64, ell: u64) -> BigUint {
    let span = n - ell + 1;
    let removed: BigUint = divisors(span)
        .into_iter()
        .map(|r| BigUint::from(r - 1) * lyndon_count(q, r))
        .sum();
    big_pow(q, n) - removed
}

fn check_gram_params(q: u32, n: u64, ell: u64) -> Result<()> {
    check_alphabet(q)?;
    if ell == 0 || ell > n {
        return Err(Error::Parameter(format!(
            "need 1 <= ell <= n, got n={n}, ell={ell}"
        )));
    }
    Ok(())
}

/// Exact `P_q(n, ell)` for `ell <= n < 2 ell`.
pub fn exact_count_small_n(q: u32, n: u64, ell: u64) -> Result<BigUint> {
    check_gram_params(q, n, ell)?;
    if n >= 2 * ell {
        return Err(Error::Parameter(format!(
            "exact count needs n < 2 ell, got n={n}, ell={ell}"
        )));
    }
    Ok(conjugacy_class_count(q, n, ell))
}

/// The same class count for `n >= 2 ell`, where it only bounds `P_q(n, ell)`
/// from above.
pub fn upper_count_small_n(q: u32, n: u64, ell: u64) -> Result<BigUint> {
    check_gram_params(q, n, ell)?;
    if n < 2 * ell {
        return Err(Error::Parameter(format!(
            "class-count upper bound applies for n >= 2 ell, got n={n}, ell={ell}; use the exact count"
        )));
    }
    Ok(conjugacy_class_count(q, n, ell))
}

// ---------------------------------------------------------------------------
// Exhaustive oracles

fn word_space(q: u32, n: u64, budget: u64, what: &'static str) -> Result<u64> {
    check_alphabet(q)?;
    (q as u64)
        .checked_pow(n as u32)
        .filter(|&total| total <= budget && n <= 64)
        .ok_or_else(|| Error::BudgetExceeded {
            what,
            needed: format!("{q}^{n} words"),
            budget: budget.to_string(),
        })
}

/// Symbols of the `index`-th word of length `n` in lexicographic order.
pub fn word_at_index(q: u32, n: usize, mut index: u64, out: &mut [u8]) {
    debug_assert_eq!(out.len(), n);
    for slot in out.iter_mut().rev() {
        *slot = (index % q as u64) as u8;
        index /= q as u64;
    }
}

/// Canonical profile key: the multiset of gram codes, sorted.
fn profile_key(q: u32, symbols: &[u8], ell: usize) -> Vec<u64> {
    let mut grams: Vec<u64> = symbols
        .windows(ell)
        .map(|g| g.iter().fold(0u64, |acc, &s| acc * q as u64 + s as u64))
        .collect();
    grams.sort_unstable();
    grams
}

/// Ground-truth `P_q(n, ell)`: enumerate all `q^n` words and count distinct
/// profiles.
pub fn oracle_count(q: u32, n: u64, ell: u64, budget: u64, exec: Exec) -> Result<BigUint> {
    check_gram_params(q, n, ell)?;
    let total = word_space(q, n, budget, "profile oracle")?;
    let (n, ell) = (n as usize, ell as usize);
    let keys = exec.fold(
        0..total,
        HashSet::<Vec<u64>>::new,
        |mut set, index| {
            let mut symbols = vec![0u8; n];
            word_at_index(q, n, index, &mut symbols);
            set.insert(profile_key(q, &symbols, ell));
            set
        },
        |a, b| {
            let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
            big.extend(small);
            big
        },
    );
    Ok(BigUint::from(keys.len()))
}

fn all_grams_distinct(symbols: &[u8], ell: usize) -> bool {
    let mut seen = HashSet::with_capacity(symbols.len());
    symbols.windows(ell).all(|g| seen.insert(g))
}

/// Number of partial `ell`-de Bruijn words of length `n` (every gram at most
/// once), by enumeration.
pub fn partial_debruijn_census(q: u32, n: u64, ell: u64, budget: u64, exec: Exec) -> Result<u64> {
    check_gram_params(q, n, ell)?;
    let total = word_space(q, n, budget, "partial de Bruijn census")?;
    let (n, ell) = (n as usize, ell as usize);
    Ok(exec.count(0..total, |index| {
        let mut symbols = vec![0u8; n];
        word_at_index(q, n, index, &mut symbols);
        all_grams_distinct(&symbols, ell)
    }))
}

/// Number of complete `ell`-de Bruijn words (length `q^ell + ell - 1`), by
/// enumeration.
pub fn complete_debruijn_census(q: u32, ell: u64, budget: u64, exec: Exec) -> Result<u64> {
    check_alphabet(q)?;
    let grams = (q as u64)
        .checked_pow(ell as u32)
        .ok_or_else(|| Error::Parameter("q^ell overflows".into()))?;
    // every gram distinct at this length means every gram occurs exactly once
    partial_debruijn_census(q, grams + ell - 1, ell, budget, exec)
}

/// Number of Lyndon words of length `r`, by enumeration.
pub fn lyndon_census(q: u32, r: u64, budget: u64, exec: Exec) -> Result<u64> {
    let total = word_space(q, r, budget, "Lyndon census")?;
    let r = r as usize;
    Ok(exec.count(0..total, |index| {
        let mut symbols = vec![0u8; r];
        word_at_index(q, r, index, &mut symbols);
        crate::word::is_lyndon(&crate::Word::from_trusted(q, symbols))
    }))
}

// ---------------------------------------------------------------------------
// Lower and upper bounds

fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().expect("finite").ln()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

fn log_q_big(q: u32, x: &BigUint) -> f64 {
    ln_big(x) / (q as f64).ln()
}

fn log_q(q: u32, x: f64) -> f64 {
    x.ln() / (q as f64).ln()
}

/// Block layout of the padded addressable code for word length `n`:
/// `n = m ell + t`, address length `a = ceil(log_q m) + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PaddedLayout {
    pub q: u32,
    pub n: u64,
    pub ell: u64,
    pub blocks: u64,
    pub tail: u64,
    pub address_len: u64,
}

impl PaddedLayout {
    pub fn new(q: u32, n: u64, ell: u64) -> Result<Self> {
        check_alphabet(q)?;
        if ell == 0 || n < ell {
            return Err(Error::NotApplicable(format!(
                "need at least one block: n={n}, ell={ell}"
            )));
        }
        let blocks = n / ell;
        let address_len = ceil_log(q as u64, blocks) as u64 + 1;
        if 2 * address_len > ell {
            return Err(Error::NotApplicable(format!(
                "address length {address_len} needs 2a <= ell, got ell={ell}"
            )));
        }
        Ok(PaddedLayout {
            q,
            n,
            ell,
            blocks,
            tail: n - blocks * ell,
            address_len,
        })
    }

    /// Number of data symbols, each in `1..q`.
    pub fn data_len(&self) -> u64 {
        self.blocks * (self.ell - self.address_len)
    }
}

/// `log_q` of the padded addressable code size `(q-1)^(m (ell - a))`.
pub fn addressable_lower_logq(q: u32, n: u64, ell: u64) -> Result<f64> {
    let layout = PaddedLayout::new(q, n, ell)?;
    // n <= q^(floor(ell/2) - 1) * ell
    let exponent = (ell / 2).saturating_sub(1) as f64;
    if log_q(q, n as f64) > exponent + log_q(q, ell as f64) + 1e-12 {
        return Err(Error::NotApplicable(format!(
            "n={n} exceeds q^(floor(ell/2)-1) ell for q={q}, ell={ell}"
        )));
    }
    Ok(layout.data_len() as f64 * log_q(q, (q - 1) as f64))
}

/// `sum_{t | n} mu(n/t) q^t - C(n,2) q^(n-ell+1)`, exactly.
pub fn debruijn_bound_numerator(q: u32, n: u64, ell: u64) -> Result<BigInt> {
    check_gram_params(q, n, ell)?;
    if ell < 2 {
        return Err(Error::Parameter("de Bruijn bound needs ell >= 2".into()));
    }
    let pairs = BigInt::from(n) * BigInt::from(n - 1) / 2;
    Ok(aperiodic_words(q, n) - pairs * BigInt::from(big_pow(q, n - ell + 1)))
}

fn debruijn_lower_logq_exact(q: u32, n: u64, ell: u64) -> Result<Option<f64>> {
    let num = debruijn_bound_numerator(q, n, ell)?;
    if num.sign() != Sign::Plus {
        return Ok(None);
    }
    let num = num.to_biguint().expect("positive");
    Ok(Some(log_q_big(q, &num) - log_q(q, n as f64)))
}

/// Factored form `n - log_q n + log_q(1 + S - T)`, safe for any `n`.
fn debruijn_lower_logq_float(q: u32, n: u64, ell: u64) -> Option<f64> {
    let ln_q = (q as f64).ln();
    let s: f64 = divisors(n)
        .into_iter()
        .filter(|&t| t < n)
        .map(|t| mobius(n / t) as f64 * (-((n - t) as f64) * ln_q).exp())
        .sum();
    let nf = n as f64;
    let ln_pairs = (nf * (nf - 1.0) / 2.0).ln();
    let t = (ln_pairs - (ell as f64 - 1.0) * ln_q).exp();
    let correction = s - t;
    if correction.is_nan() || correction <= -1.0 {
        return None;
    }
    Some(nf - nf.ln() / ln_q + correction.ln_1p() / ln_q)
}

/// `log_q` of the partial de Bruijn lower bound, or `None` where the bound is
/// vacuous (its argument is not positive).
pub fn debruijn_lower_logq(q: u32, n: u64, ell: u64) -> Result<Option<f64>> {
    check_gram_params(q, n, ell)?;
    if ell < 2 {
        return Err(Error::Parameter("de Bruijn bound needs ell >= 2".into()));
    }
    if n <= EXACT_SWITCH {
        debruijn_lower_logq_exact(q, n, ell)
    } else {
        Ok(debruijn_lower_logq_float(q, n, ell))
    }
}

/// `(n - 1) - log_q n` when `ell >= 2 log_q n + 2` and `n >= 8`.
pub fn simplified_lower_logq(q: u32, n: u64, ell: u64) -> Option<f64> {
    let log_n = log_q(q, n as f64);
    (n >= 8 && ell as f64 >= 2.0 * log_n + 2.0).then(|| (n - 1) as f64 - log_n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RisingSum {
    Direct,
    Complement,
    Series,
    Stirling,
}

const DIRECT_TERMS: u64 = 100_000;

/// `ln C(big_n, big_k)` by Stirling, for `big_k, big_n - big_k >= DIRECT_TERMS`.
/// The large leading terms are combined through `ln_1p` so nothing cancels.
fn ln_binomial_stirling(big_n: f64, big_k: f64) -> f64 {
    let rest = big_n - big_k;
    big_k * big_n.ln()
        - (rest + 0.5) * (-big_k / big_n).ln_1p()
        - (big_k + 0.5) * big_k.ln()
        - 0.5 * (2.0 * std::f64::consts::PI).ln()
        + 1.0 / (12.0 * big_n)
        - 1.0 / (12.0 * big_k)
        - 1.0 / (12.0 * rest)
}

/// `ln prod_{j=1}^{k} (Q + j - 1) / j` with `ln Q = ln_big_q`, which is
/// `ln C(Q + k - 1, k)`.
fn ln_binomial_terms(ln_big_q: f64, k: u64, method: Option<RisingSum>) -> f64 {
    let kf = k as f64;
    if ln_big_q > 700.0 {
        // Q overflows; each factor is (Q + j - 1)/j ~ Q/j with relative error < k/Q
        return kf * ln_big_q - ln_gamma(kf + 1.0);
    }
    let big_q = ln_big_q.exp().round();
    let method = method.unwrap_or(if k <= DIRECT_TERMS {
        RisingSum::Direct
    } else if big_q - 1.0 <= DIRECT_TERMS as f64 {
        RisingSum::Complement
    } else if kf < 1e-3 * big_q {
        RisingSum::Series
    } else {
        RisingSum::Stirling
    });
    match method {
        RisingSum::Direct => (1..=k)
            .map(|j| {
                let j = j as f64;
                ((big_q + j - 1.0) / j).ln()
            })
            .sum(),
        RisingSum::Complement => (1..big_q as u64)
            .map(|i| {
                let i = i as f64;
                (kf / i).ln_1p()
            })
            .sum(),
        RisingSum::Series => {
            let first = kf * (kf - 1.0) / (2.0 * big_q);
            let second = (kf - 1.0) * kf * (2.0 * kf - 1.0) / (12.0 * big_q * big_q);
            kf * ln_big_q + first - second - ln_gamma(kf + 1.0)
        }
        RisingSum::Stirling => ln_binomial_stirling(big_q + kf - 1.0, kf.min(big_q - 1.0)),
    }
}

/// `log_q C(n - ell + q^ell, q^ell - 1)`: the number of weak compositions of
/// `n - ell + 1` into `q^ell` parts.
pub fn upper_logq(q: u32, n: u64, ell: u64) -> Result<f64> {
    check_gram_params(q, n, ell)?;
    let ln_q = (q as f64).ln();
    Ok(ln_binomial_terms(ell as f64 * ln_q, n - ell + 1, None) / ln_q)
}

/// `floor(L_q(n) - C(n,2) q^(n-ell) / n)`, a lower bound on the number of
/// partial `ell`-de Bruijn words of length `n`. May be negative.
pub fn maurer_partial_count_lower(q: u32, n: u64, ell: u64) -> Result<BigInt> {
    check_gram_params(q, n, ell)?;
    let pairs = BigInt::from(n) * BigInt::from(n - 1) / 2;
    let numerator: BigInt = aperiodic_words(q, n) - pairs * BigInt::from(big_pow(q, n - ell));
    Ok(numerator.div_floor(&BigInt::from(n)))
}

/// `(q!)^(q^(ell-1))`, the number of complete `ell`-de Bruijn words.
pub fn complete_debruijn_count(q: u32, ell: u64, max_bits: u64) -> Result<BigUint> {
    check_alphabet(q)?;
    if ell == 0 {
        return Err(Error::Parameter("ell must be positive".into()));
    }
    let factorial: BigUint = (1..=q).map(BigUint::from).product();
    let budget_err = || Error::BudgetExceeded {
        what: "complete de Bruijn count",
        needed: format!("({q}!)^({q}^{})", ell - 1),
        budget: format!("{max_bits} bits"),
    };
    let exponent = (q as u64)
        .checked_pow((ell - 1) as u32)
        .ok_or_else(budget_err)?;
    if exponent as f64 * factorial.bits() as f64 > max_bits as f64 {
        return Err(budget_err());
    }
    Ok(num_traits::pow(factorial, exponent as usize))
}

// ---------------------------------------------------------------------------
// Reports and sweeps

/// All applicable bounds for one `(q, n, ell)` in `log_q` units.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub q: u32,
    pub n: u64,
    pub ell: u64,
    /// Exact `log_q P_q(n, ell)`; present iff `ell <= n < 2 ell`.
    pub exact_logq: Option<f64>,
    pub addressable_logq: Option<f64>,
    pub debruijn_logq: Option<f64>,
    pub simplified_logq: Option<f64>,
    pub upper_logq: f64,
}

pub const CSV_HEADER: &str =
    "q,n,ell,exact_rate,addressable_rate,debruijn_rate,simplified_rate,upper_rate";

impl BoundReport {
    fn rate(&self, v: Option<f64>) -> Option<f64> {
        v.map(|v| v / self.n as f64)
    }

    pub fn exact_rate(&self) -> Option<f64> {
        self.rate(self.exact_logq)
    }

    pub fn addressable_rate(&self) -> Option<f64> {
        self.rate(self.addressable_logq)
    }

    pub fn debruijn_rate(&self) -> Option<f64> {
        self.rate(self.debruijn_logq)
    }

    pub fn simplified_rate(&self) -> Option<f64> {
        self.rate(self.simplified_logq)
    }

    pub fn upper_rate(&self) -> f64 {
        self.upper_logq / self.n as f64
    }

    /// Largest rate among the exact value and the lower bounds.
    pub fn best_lower_rate(&self) -> Option<f64> {
        [
            self.exact_rate(),
            self.addressable_rate(),
            self.debruijn_rate(),
            self.simplified_rate(),
        ]
        .into_iter()
        .flatten()
        .reduce(f64::max)
    }

    /// One CSV line matching [`CSV_HEADER`]; absent bounds are empty fields.
    pub fn csv_row(&self) -> String {
        let cell = |v: Option<f64>| v.map(|v| format!("{v:.6}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{:.6}",
            self.q,
            self.n,
            self.ell,
            cell(self.exact_rate()),
            cell(self.addressable_rate()),
            cell(self.debruijn_rate()),
            cell(self.simplified_rate()),
            self.upper_rate()
        )
    }
}

fn exact_logq(q: u32, n: u64, ell: u64) -> Option<f64> {
    if n >= 2 * ell {
        return None;
    }
    if n <= EXACT_SWITCH {
        return Some(log_q_big(q, &conjugacy_class_count(q, n, ell)));
    }
    // log_q(q^n - removed) = n + log_q(1 - removed / q^n)
    let ln_q = (q as f64).ln();
    let removed: f64 = divisors(n - ell + 1)
        .into_iter()
        .map(|r| {
            let weight = (r - 1) as f64 / r as f64;
            let aperiodic: f64 = divisors(r)
                .into_iter()
                .map(|t| mobius(r / t) as f64 * (-((n - t) as f64) * ln_q).exp())
                .sum();
            weight * aperiodic
        })
        .sum();
    Some(n as f64 + (-removed).ln_1p() / ln_q)
}

pub fn bound_report(q: u32, n: u64, ell: u64) -> Result<BoundReport> {
    check_gram_params(q, n, ell)?;
    if ell < 2 {
        return Err(Error::Parameter("bound report needs ell >= 2".into()));
    }
    Ok(BoundReport {
        q,
        n,
        ell,
        exact_logq: exact_logq(q, n, ell),
        addressable_logq: addressable_lower_logq(q, n, ell).ok(),
        debruijn_logq: debruijn_lower_logq(q, n, ell)?,
        simplified_logq: simplified_lower_logq(q, n, ell),
        upper_logq: upper_logq(q, n, ell)?,
    })
}

/// Default sampling density for sweeps.
pub const POINTS_PER_DECADE: u32 = 200;

/// Logarithmically spaced integers in `[min, max]`, both ends included,
/// deduplicated and increasing.
pub fn log_spaced(min: u64, max: u64, per_decade: u32) -> Vec<u64> {
    assert!(min >= 1 && min <= max && per_decade >= 1);
    let (lo, hi) = ((min as f64).log10(), (max as f64).log10());
    let steps = ((hi - lo) * per_decade as f64).ceil() as u64;
    let mut out: Vec<u64> = (0..=steps)
        .map(|k| {
            let v = 10f64.powf(lo + k as f64 / per_decade as f64).round() as u64;
            v.clamp(min, max)
        })
        .collect();
    out.push(max);
    out.sort_unstable();
    out.dedup();
    out
}

/// Reports for fixed `q, ell` over log-spaced `n`.
pub fn sweep_n(
    q: u32,
    ell: u64,
    n_min: u64,
    n_max: u64,
    per_decade: u32,
    exec: Exec,
) -> Result<Vec<BoundReport>> {
    if n_min < ell || n_min > n_max || per_decade == 0 {
        return Err(Error::Parameter(format!(
            "need ell <= n-min <= n-max, got {n_min}..{n_max}, ell={ell}"
        )));
    }
    let points = log_spaced(n_min, n_max, per_decade);
    exec.map(&points, |&n| bound_report(q, n, ell))
        .into_iter()
        .collect()
}

/// Reports for fixed `q, n` over log-spaced `ell`.
pub fn sweep_ell(
    q: u32,
    n: u64,
    ell_min: u64,
    ell_max: u64,
    per_decade: u32,
    exec: Exec,
) -> Result<Vec<BoundReport>> {
    if ell_min < 2 || ell_min > ell_max || ell_max > n || per_decade == 0 {
        return Err(Error::Parameter(format!(
            "need 2 <= ell-min <= ell-max <= n, got {ell_min}..{ell_max}, n={n}"
        )));
    }
    let points = log_spaced(ell_min, ell_max, per_decade);
    exec.map(&points, |&ell| bound_report(q, n, ell))
        .into_iter()
        .collect()
}
