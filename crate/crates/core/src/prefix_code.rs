//! Distinct-profile words for `ell <= n < 2 ell`.
//!
//! A word with `x[ell-1] != x[n]` cannot share its profile with any other
//! word of the same length in this regime. The encoder forces that
//! inequality by zeroing the last symbol when needed; the data alphabet is
//! `[q]^(n-1) x {1, .., q-1}`, so the code has `q^(n-1) (q-1)` words.

use crate::word::check_alphabet;
use crate::{Error, Result, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrefixCodecParams {
    q: u32,
    n: usize,
    ell: usize,
}

impl PrefixCodecParams {
    pub fn new(q: u32, n: usize, ell: usize) -> Result<Self> {
        check_alphabet(q)?;
        if !(2 <= ell && ell <= n && n < 2 * ell) {
            return Err(Error::Parameter(format!(
                "prefix code needs 2 <= ell <= n < 2 ell, got n={n}, ell={ell}"
            )));
        }
        Ok(PrefixCodecParams { q, n, ell })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// `q^(n-1) (q-1)`, if it fits.
    pub fn code_size(&self) -> Option<u64> {
        (self.q as u64)
            .checked_pow(self.n as u32 - 1)
            .and_then(|v| v.checked_mul(self.q as u64 - 1))
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        if w.q() != self.q {
            return Err(Error::AlphabetMismatch {
                left: w.q(),
                right: self.q,
            });
        }
        if w.len() != self.n {
            return Err(Error::LengthMismatch {
                left: w.len(),
                right: self.n,
            });
        }
        Ok(())
    }
}

/// Counts symbol reads and writes.
#[derive(Debug, Default)]
pub(crate) struct Ops(pub usize);

pub(crate) fn encode1_traced(c: &Word, params: &PrefixCodecParams, ops: &mut Ops) -> Result<Word> {
    params.check_word(c)?;
    let (n, ell) = (params.n, params.ell);
    let last = c.at(n);
    ops.0 += 1;
    if last == 0 {
        return Err(Error::Parameter(format!(
            "the last data symbol must be in 1..{}, got 0",
            params.q
        )));
    }
    let mut symbols = Vec::with_capacity(n);
    symbols.extend_from_slice(c.symbols());
    ops.0 += n;
    ops.0 += 1;
    if c.at(ell - 1) == last {
        symbols[n - 1] = 0;
        ops.0 += 1;
    }
    Ok(Word::from_trusted(params.q, symbols))
}

pub(crate) fn decode1_traced(x: &Word, params: &PrefixCodecParams, ops: &mut Ops) -> Result<Word> {
    params.check_word(x)?;
    let (n, ell) = (params.n, params.ell);
    let (marker, last) = (x.at(ell - 1), x.at(n));
    ops.0 += 2;
    if marker == last {
        return Err(Error::NotInCode(format!(
            "{x}: positions {} and {n} agree",
            ell - 1
        )));
    }
    let mut symbols = Vec::with_capacity(n);
    symbols.extend_from_slice(x.symbols());
    ops.0 += n;
    if last == 0 {
        symbols[n - 1] = marker;
        ops.0 += 1;
    }
    Ok(Word::from_trusted(params.q, symbols))
}

/// Maps a data word (last symbol nonzero) to a codeword with
/// `x[ell-1] != x[n]`.
pub fn encode1(c: &Word, params: &PrefixCodecParams) -> Result<Word> {
    encode1_traced(c, params, &mut Ops::default())
}

/// Inverse of [`encode1`]. Fails on words outside the code.
pub fn decode1(x: &Word, params: &PrefixCodecParams) -> Result<Word> {
    decode1_traced(x, params, &mut Ops::default())
}
