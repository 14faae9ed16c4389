//! Gram profiles: occurrence counts of every length-`ell` substring.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::word::{same_shape, Word};
use crate::{Error, Result};

/// Largest `q^ell` for which completeness is checked.
pub const COMPLETE_DEBRUIJN_LIMIT: u64 = 1 << 24;

/// Sparse profile vector. Only grams that occur are stored; iteration is in
/// lexicographic gram order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GramProfile {
    q: u32,
    ell: usize,
    counts: BTreeMap<Vec<u8>, usize>,
}

impl GramProfile {
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Number of occurrences of `z` (zero if absent).
    pub fn count(&self, z: &Word) -> usize {
        self.counts.get(z.symbols()).copied().unwrap_or(0)
    }

    /// Number of distinct grams.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Sum of all counts; `n - ell + 1` for a word of length `n`.
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn max_count(&self) -> usize {
        self.counts.values().copied().max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Word, usize)> + '_ {
        self.counts
            .iter()
            .map(|(g, &c)| (Word::from_trusted(self.q, g.clone()), c))
    }

    pub fn support(&self) -> BTreeSet<Word> {
        self.counts
            .keys()
            .map(|g| Word::from_trusted(self.q, g.clone()))
            .collect()
    }
}

/// Canonical text form: one `gram:count` line per gram, sorted by gram.
impl fmt::Display for GramProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (gram, count) in self.iter() {
            writeln!(f, "{gram}:{count}")?;
        }
        Ok(())
    }
}

fn check_gram(x: &Word, ell: usize) -> Result<()> {
    if ell == 0 {
        return Err(Error::Parameter("gram length must be positive".into()));
    }
    if ell > x.len() {
        return Err(Error::GramTooLong { ell, len: x.len() });
    }
    Ok(())
}

pub fn profile(x: &Word, ell: usize) -> Result<GramProfile> {
    check_gram(x, ell)?;
    let mut counts = BTreeMap::new();
    for gram in x.symbols().windows(ell) {
        *counts.entry(gram.to_vec()).or_insert(0) += 1;
    }
    Ok(GramProfile {
        q: x.q(),
        ell,
        counts,
    })
}

pub fn support(x: &Word, ell: usize) -> Result<BTreeSet<Word>> {
    Ok(profile(x, ell)?.support())
}

pub fn profiles_equal(x: &Word, y: &Word, ell: usize) -> Result<bool> {
    same_shape(x, y)?;
    Ok(profile(x, ell)? == profile(y, ell)?)
}

/// Every gram occurs at most once.
pub fn is_partial_debruijn(x: &Word, ell: usize) -> Result<bool> {
    check_gram(x, ell)?;
    let mut seen = std::collections::HashSet::with_capacity(x.len());
    Ok(x.symbols().windows(ell).all(|g| seen.insert(g)))
}

/// Every one of the `q^ell` grams occurs exactly once.
pub fn is_complete_debruijn(x: &Word, ell: usize) -> Result<bool> {
    check_gram(x, ell)?;
    let size = (x.q() as u64)
        .checked_pow(ell as u32)
        .filter(|&s| s <= COMPLETE_DEBRUIJN_LIMIT)
        .ok_or_else(|| Error::BudgetExceeded {
            what: "complete de Bruijn check",
            needed: format!("{}^{}", x.q(), ell),
            budget: COMPLETE_DEBRUIJN_LIMIT.to_string(),
        })?;
    if (x.len() - ell + 1) as u64 != size {
        return Ok(false);
    }
    is_partial_debruijn(x, ell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{min_period, root_conjugate};

    fn w(s: &str) -> Word {
        Word::parse(2, s).unwrap()
    }

    fn all_words(q: u32, n: usize) -> Vec<Word> {
        let total = (q as u64).pow(n as u32);
        (0..total)
            .map(|mut v| {
                let mut s = vec![0u8; n];
                for slot in s.iter_mut().rev() {
                    *slot = (v % q as u64) as u8;
                    v /= q as u64;
                }
                Word::new(q, s).unwrap()
            })
            .collect()
    }

    #[test]
    fn profile_examples() {
        let p = profile(&w("10001"), 2).unwrap();
        assert_eq!(p.count(&w("00")), 2);
        assert_eq!(p.count(&w("01")), 1);
        assert_eq!(p.count(&w("10")), 1);
        assert_eq!(p.count(&w("11")), 0);
        assert_eq!(p.to_string(), "00:2\n01:1\n10:1\n");

        let whole = profile(&w("10001"), 5).unwrap();
        assert_eq!(whole.distinct(), 1);
        assert_eq!(whole.count(&w("10001")), 1);

        assert_eq!(profile(&w("00010"), 2).unwrap(), p);
        assert!(matches!(
            profile(&w("10"), 3),
            Err(Error::GramTooLong { ell: 3, len: 2 })
        ));
    }

    #[test]
    fn supports() {
        let expect: BTreeSet<Word> = ["00", "01", "10"].iter().map(|s| w(s)).collect();
        assert_eq!(support(&w("10001"), 2).unwrap(), expect);
        assert_eq!(support(&w("00101"), 2).unwrap(), expect);
        let x = w("0110");
        assert_eq!(support(&x, 4).unwrap(), [x.clone()].into_iter().collect());
    }

    #[test]
    fn equality() {
        assert!(profiles_equal(&w("10001"), &w("00010"), 2).unwrap());
        assert!(!profiles_equal(&w("10001"), &w("00101"), 2).unwrap());
        assert!(profiles_equal(&w("0110"), &w("0110"), 3).unwrap());
        assert!(profiles_equal(&w("0110"), &w("011"), 2).is_err());
    }

    #[test]
    fn debruijn_predicates() {
        assert!(is_partial_debruijn(&w("00110"), 2).unwrap());
        assert!(!is_partial_debruijn(&w("000"), 2).unwrap());
        assert!(is_partial_debruijn(&w("0011"), 2).unwrap());
        assert!(is_complete_debruijn(&w("00110"), 2).unwrap());
        assert!(is_complete_debruijn(&w("01100"), 2).unwrap());
        assert!(!is_complete_debruijn(&w("00100"), 2).unwrap());
        let big = Word::new(4, vec![0; 20]).unwrap();
        assert!(matches!(
            is_complete_debruijn(&big, 13),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn counts_sum_to_positions() {
        for n in 1..=9 {
            for x in all_words(2, n) {
                for ell in 1..=n {
                    assert_eq!(profile(&x, ell).unwrap().total(), n - ell + 1);
                }
            }
        }
    }

    #[test]
    fn unique_short_grams_determine_the_word() {
        // if every (ell-1)-gram of x is unique, x is the only word with its ell-profile
        for n in 2..=12 {
            let words = all_words(2, n);
            for ell in 2..=5.min(n) {
                let mut by_profile: std::collections::HashMap<GramProfile, Vec<&Word>> =
                    Default::default();
                for x in &words {
                    by_profile
                        .entry(profile(x, ell).unwrap())
                        .or_default()
                        .push(x);
                }
                for x in &words {
                    if is_partial_debruijn(x, ell - 1).unwrap() {
                        assert_eq!(by_profile[&profile(x, ell).unwrap()].len(), 1, "{x}");
                    }
                }
            }
        }
    }

    #[test]
    fn conjugates_with_dividing_period_share_profiles() {
        // build x = prefix of h^inf with |h| | n - ell + 1, pair with a rotated root
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let q = rng.random_range(2..=4u32);
            let r = rng.random_range(1..=6usize);
            let h: Vec<u8> = (0..r).map(|_| rng.random_range(0..q) as u8).collect();
            let h = Word::new(q, h).unwrap();
            let s = rng.random_range(1..=4usize);
            let ell = rng.random_range(1..=12usize);
            let n = r * s + ell - 1;
            let k = rng.random_range(0..r);
            let extend = |root: &Word| {
                let sym = root.symbols().iter().copied().cycle().take(n).collect();
                Word::new(q, sym).unwrap()
            };
            let x = extend(&h);
            let y = extend(&h.rotate(k));
            assert_eq!(n - ell + 1, r * s);
            assert!(profiles_equal(&x, &y, ell).unwrap(), "{x} {y} ell={ell}");
        }
    }

    #[test]
    fn equal_profiles_force_conjugacy_in_short_regime() {
        for n in 2..=12 {
            let words = all_words(2, n);
            for ell in (n / 2 + 1)..=n {
                let mut classes: std::collections::HashMap<GramProfile, Vec<&Word>> =
                    Default::default();
                for x in &words {
                    classes.entry(profile(x, ell).unwrap()).or_default().push(x);
                }
                for members in classes.values() {
                    for x in members {
                        for y in members {
                            if x != y {
                                assert!(root_conjugate(x, y).unwrap());
                                assert_eq!((n - ell + 1) % min_period(x), 0);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn class_representative_matches_profile_classes() {
        use crate::word::class_representative;
        for n in 2..=11 {
            let words = all_words(2, n);
            for ell in (n / 2 + 1)..=n {
                for x in words.iter().step_by(3) {
                    for y in words.iter().step_by(5) {
                        let same_rep = class_representative(x, ell).unwrap()
                            == class_representative(y, ell).unwrap();
                        assert_eq!(
                            same_rep,
                            profiles_equal(x, y, ell).unwrap(),
                            "{x} {y} {ell}"
                        );
                    }
                }
            }
        }
    }
}
