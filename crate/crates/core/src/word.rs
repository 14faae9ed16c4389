//! Words over a `q`-ary alphabet and their periodic structure.
//!
//! Public positions are 1-based: `x.at(1)` is the first symbol and
//! `x.substring(i, j)` is the inclusive range `x[i, j]`.

use std::cmp::Ordering;
use std::fmt;

use crate::{Error, Result};

pub const MAX_ALPHABET: u32 = 256;

/// A finite sequence of symbols in `0..q`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    q: u32,
    symbols: Vec<u8>,
}

pub(crate) fn check_alphabet(q: u32) -> Result<()> {
    if (2..=MAX_ALPHABET).contains(&q) {
        Ok(())
    } else {
        Err(Error::InvalidAlphabet(q))
    }
}

impl Word {
    pub fn new(q: u32, symbols: Vec<u8>) -> Result<Self> {
        check_alphabet(q)?;
        if let Some(&s) = symbols.iter().find(|&&s| u32::from(s) >= q) {
            return Err(Error::SymbolOutOfRange {
                symbol: s.into(),
                q,
            });
        }
        Ok(Word { q, symbols })
    }

    /// Builds a word from symbols already known to be in range.
    pub(crate) fn from_trusted(q: u32, symbols: Vec<u8>) -> Self {
        debug_assert!(symbols.iter().all(|&s| u32::from(s) < q));
        Word { q, symbols }
    }

    /// Parses the textual form: a digit string for `q <= 10`, comma-separated
    /// decimal symbols otherwise.
    pub fn parse(q: u32, text: &str) -> Result<Self> {
        check_alphabet(q)?;
        let text = text.trim();
        let symbols = if q <= 10 {
            text.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::Parse(format!("'{c}' is not a digit in {text:?}")))
                })
                .collect::<Result<Vec<u8>>>()?
        } else {
            text.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
                        .and_then(|v| {
                            u8::try_from(v).map_err(|_| Error::SymbolOutOfRange { symbol: v, q })
                        })
                })
                .collect::<Result<Vec<u8>>>()?
        };
        Word::new(q, symbols)
    }

    /// Parses a nucleotide string with `A=0, C=1, G=2, T=3` (case-insensitive).
    pub fn parse_dna(text: &str) -> Result<Self> {
        let symbols = text
            .trim()
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'A' => Ok(0),
                'C' => Ok(1),
                'G' => Ok(2),
                'T' => Ok(3),
                other => Err(Error::Parse(format!("'{other}' is not a nucleotide"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Word::new(4, symbols)
    }

    pub fn to_dna_string(&self) -> Option<String> {
        (self.q == 4).then(|| {
            self.symbols
                .iter()
                .map(|&s| ['A', 'C', 'G', 'T'][s as usize])
                .collect()
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<u8> {
        self.symbols
    }

    /// Symbol at 1-based position `i`.
    pub fn at(&self, i: usize) -> u8 {
        self.symbols[i - 1]
    }

    /// The inclusive 1-based substring `x[i, j]`.
    pub fn substring(&self, i: usize, j: usize) -> Word {
        Word::from_trusted(self.q, self.symbols[i - 1..j].to_vec())
    }

    /// Left rotation by `k`: `x[k+1, n] . x[1, k]`.
    pub fn rotate(&self, k: usize) -> Word {
        let mut symbols = self.symbols.clone();
        if !symbols.is_empty() {
            let k = k % symbols.len();
            symbols.rotate_left(k);
        }
        Word::from_trusted(self.q, symbols)
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        same_alphabet(self, other)?;
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Ok(Word::from_trusted(self.q, symbols))
    }

    /// Digit sum modulo `q`.
    pub fn digit_sum_mod(&self) -> u32 {
        self.symbols.iter().map(|&s| u32::from(s)).sum::<u32>() % self.q
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q <= 10 {
            for &s in &self.symbols {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let mut first = true;
            for &s in &self.symbols {
                if !first {
                    f.write_str(",")?;
                }
                first = false;
                write!(f, "{s}")?;
            }
            Ok(())
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(q={}, {})", self.q, self)
    }
}

pub(crate) fn same_alphabet(x: &Word, y: &Word) -> Result<()> {
    if x.q != y.q {
        return Err(Error::AlphabetMismatch {
            left: x.q,
            right: y.q,
        });
    }
    Ok(())
}

pub(crate) fn same_shape(x: &Word, y: &Word) -> Result<()> {
    same_alphabet(x, y)?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

/// Failure function: `border[i]` is the length of the longest proper border
/// of `s[..=i]`.
pub fn border_array<T: Eq>(s: &[T]) -> Vec<usize> {
    let mut border = vec![0; s.len()];
    let mut k = 0;
    for i in 1..s.len() {
        while k > 0 && s[i] != s[k] {
            k = border[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        border[i] = k;
    }
    border
}

/// Least `r >= 1` with `x[s] = x[s + r]` for all valid `s`. Linear time.
pub fn min_period(x: &Word) -> usize {
    let n = x.len();
    match border_array(&x.symbols).last() {
        Some(&b) => n - b,
        None => 0,
    }
}

/// The prefix of length `min_period(x)`.
pub fn root(x: &Word) -> Word {
    x.substring(1, min_period(x))
}

pub fn is_rotation(u: &Word, v: &Word) -> bool {
    if u.q != v.q || u.len() != v.len() {
        return false;
    }
    if u.is_empty() {
        return true;
    }
    let n = u.len();
    (0..n).any(|k| {
        u.symbols[k..]
            .iter()
            .chain(&u.symbols[..k])
            .eq(v.symbols.iter())
    })
}

pub fn root_conjugate(x: &Word, y: &Word) -> Result<bool> {
    same_shape(x, y)?;
    Ok(is_rotation(&root(x), &root(y)))
}

fn cmp_rotations(s: &[u8], a: usize, b: usize) -> Ordering {
    let n = s.len();
    (0..n)
        .map(|i| s[(a + i) % n].cmp(&s[(b + i) % n]))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Offset `k` such that `x.rotate(k)` is the lexicographically least
/// rotation (smallest such `k` on ties).
pub fn least_rotation_offset(x: &Word) -> usize {
    (0..x.len())
        .min_by(|&a, &b| cmp_rotations(&x.symbols, a, b).then(a.cmp(&b)))
        .unwrap_or(0)
}

pub fn is_lyndon(u: &Word) -> bool {
    let n = u.len();
    n >= 1
        && min_period(u) == n
        && (1..n).all(|k| cmp_rotations(&u.symbols, 0, k) == Ordering::Less)
}

/// Canonical member of the profile-equivalence class of `x` when
/// `ell <= |x| < 2 ell`: words whose period divides `|x| - ell + 1` are
/// replaced by the repetition of the Lyndon rotation of their root.
pub fn class_representative(x: &Word, ell: usize) -> Result<Word> {
    let n = x.len();
    if !(ell >= 1 && ell <= n && n < 2 * ell) {
        return Err(Error::Parameter(format!(
            "class representative needs ell <= n < 2 ell, got n={n}, ell={ell}"
        )));
    }
    let p = min_period(x);
    if !(n - ell + 1).is_multiple_of(p) {
        return Ok(x.clone());
    }
    let h = root(x);
    let lyndon = h.rotate(least_rotation_offset(&h));
    let symbols = lyndon.symbols.iter().copied().cycle().take(n).collect();
    Ok(Word::from_trusted(x.q, symbols))
}
