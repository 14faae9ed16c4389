//! The lossy read channel and assembly of addressable codewords.
//!
//! The channel fragments a word into all of its `ell`-grams (a multiset) and
//! may lose some of them. A read is *Type I* when its last address occurrence
//! starts early enough (offset `<= ell - 2a + 2`) that the read can only have
//! come from one place; such reads are aligned by their last address and
//! written into a reconstruction buffer. With both boundary blocks known in
//! advance, every interior symbol is covered by `ell - 2a + 2` Type I reads,
//! so any `ell - 2a + 1` losses are tolerated.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::address::{encode2, is_addressable, AddressBook, AddressableParams};
use crate::{Error, Exec, Result, Word};

/// Why assembly gave up.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Failure {
    #[error("position {position} is not covered by any Type I read")]
    Uncovered { position: usize },
    #[error("reads disagree at position {position}")]
    Conflict { position: usize },
    #[error("read {read} aligns outside the word")]
    CorruptRead { read: String },
    #[error("read {read} has the wrong length")]
    WrongLength { read: String },
    #[error("reconstruction failed verification: {0}")]
    Verification(&'static str),
}

/// Multiset of reads of a common length. Reads are kept sorted, so two bags
/// with the same multiplicities compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadBag {
    ell: usize,
    reads: Vec<Word>,
}

impl ReadBag {
    pub fn new(ell: usize, mut reads: Vec<Word>) -> Result<Self> {
        if let Some(r) = reads.iter().find(|r| r.len() != ell) {
            return Err(Error::LengthMismatch {
                left: r.len(),
                right: ell,
            });
        }
        if let Some(first) = reads.first() {
            let q = first.q();
            if let Some(r) = reads.iter().find(|r| r.q() != q) {
                return Err(Error::AlphabetMismatch {
                    left: r.q(),
                    right: q,
                });
            }
        }
        reads.sort();
        Ok(ReadBag { ell, reads })
    }

    /// Parses the line format: one read per line, blank lines and lines
    /// starting with `#` ignored, duplicates meaning multiplicity.
    pub fn parse_lines<F>(text: &str, mut parse: F) -> Result<Self>
    where
        F: FnMut(&str) -> Result<Word>,
    {
        let reads = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(&mut parse)
            .collect::<Result<Vec<_>>>()?;
        let ell = reads.first().map_or(0, Word::len);
        ReadBag::new(ell, reads)
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn len(&self) -> usize {
        self.reads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reads.is_empty()
    }

    pub fn reads(&self) -> &[Word] {
        &self.reads
    }

    /// Multiplicity of every distinct read.
    pub fn counts(&self) -> BTreeMap<&Word, usize> {
        let mut counts = BTreeMap::new();
        for r in &self.reads {
            *counts.entry(r).or_insert(0) += 1;
        }
        counts
    }

    /// Removes one copy of `read`; false if it was absent.
    pub fn remove_one(&mut self, read: &Word) -> bool {
        match self.reads.binary_search(read) {
            Ok(i) => {
                self.reads.remove(i);
                true
            }
            Err(_) => false,
        }
    }
}

/// Full-coverage fragmentation: every `ell`-gram of `x`, with multiplicity.
pub fn fragment(x: &Word, ell: usize) -> Result<ReadBag> {
    if ell == 0 || ell > x.len() {
        return Err(Error::GramTooLong { ell, len: x.len() });
    }
    let reads = (1..=x.len() - ell + 1)
        .map(|j| x.substring(j, j + ell - 1))
        .collect();
    ReadBag::new(ell, reads)
}

/// Removes exactly `e` reads chosen uniformly without replacement.
/// Deterministic for a fixed seed.
pub fn drop_reads(bag: &ReadBag, e: usize, seed: u64) -> Result<ReadBag> {
    if e > bag.len() {
        return Err(Error::Parameter(format!(
            "cannot drop {e} of {} reads",
            bag.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = vec![true; bag.len()];
    for i in rand::seq::index::sample(&mut rng, bag.len(), e) {
        keep[i] = false;
    }
    let reads = bag
        .reads
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(r, _)| r.clone())
        .collect();
    Ok(ReadBag {
        ell: bag.ell,
        reads,
    })
}

/// Largest 1-based offset `t` with `r[t, t+a-1]` in the book.
pub fn last_address_index(r: &Word, book: &AddressBook) -> Option<usize> {
    r.symbols()
        .windows(book.address_len())
        .rposition(|g| book.contains(g))
        .map(|i| i + 1)
}

fn check_read(r: &Word, ell: usize) -> Result<()> {
    if r.len() != ell {
        return Err(Error::LengthMismatch {
            left: r.len(),
            right: ell,
        });
    }
    Ok(())
}

fn type1_limit(ell: usize, a: usize) -> usize {
    (ell + 2).saturating_sub(2 * a)
}

pub fn is_type1(r: &Word, book: &AddressBook, ell: usize) -> Result<bool> {
    check_read(r, ell)?;
    let limit = type1_limit(ell, book.address_len());
    Ok(last_address_index(r, book).is_some_and(|t| t <= limit))
}

/// Start position of a Type I read inside an addressable word of length
/// `M ell`, or `None` for reads that are not Type I.
pub fn align(r: &Word, book: &AddressBook, ell: usize) -> Result<Option<usize>> {
    check_read(r, ell)?;
    let a = book.address_len();
    let Some(t) = last_address_index(r, book) else {
        return Ok(None);
    };
    if t > type1_limit(ell, a) {
        return Ok(None);
    }
    let i = book
        .rank_of(&r.symbols()[t - 1..t - 1 + a])
        .expect("address found above");
    let j = ((i - 1) * ell + 2) as i64 - t as i64;
    let last_start = (book.len() * ell - ell + 1) as i64;
    if j < 1 || j > last_start {
        return Err(Failure::CorruptRead {
            read: r.to_string(),
        }
        .into());
    }
    Ok(Some(j as usize))
}

/// Start positions `j in 1..=n-ell+1` whose reads are Type I in any
/// addressable word: those with `j mod ell` outside `2..=2a-1`.
pub fn type1_positions(ell: usize, a: usize, n: usize) -> Vec<usize> {
    (1..=n + 1 - ell)
        .filter(|j| !(2..2 * a).contains(&(j % ell)))
        .collect()
}

/// Start positions of the Type I reads that cover symbol `position`.
pub fn type1_reads_covering(position: usize, ell: usize, a: usize, n: usize) -> Vec<usize> {
    type1_positions(ell, a, n)
        .into_iter()
        .filter(|&j| j <= position && position < j + ell)
        .collect()
}

/// Code parameters plus the fixed first and last blocks shared by every
/// codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssemblyParams {
    book: AddressBook,
    geometry: AddressableParams,
    first_block: Word,
    last_block: Word,
}

fn check_boundary(block: &Word, book: &AddressBook, index: usize, ell: usize) -> Result<()> {
    let a = book.address_len();
    if block.len() != ell || block.q() != book.q() {
        return Err(Error::Parameter(format!(
            "boundary block {block} must have length {ell}"
        )));
    }
    if block.symbols()[..a] != *book.get(index).symbols() {
        return Err(Error::Parameter(format!(
            "boundary block {block} must start with address {}",
            book.get(index)
        )));
    }
    if block.symbols()[1..].windows(a).any(|g| book.contains(g)) {
        return Err(Error::Parameter(format!(
            "boundary block {block} contains an address at an interior offset"
        )));
    }
    Ok(())
}

impl AssemblyParams {
    pub fn new(book: AddressBook, ell: usize, first_block: Word, last_block: Word) -> Result<Self> {
        let geometry = AddressableParams::new(&book, ell)?;
        check_boundary(&first_block, &book, 1, ell)?;
        check_boundary(&last_block, &book, book.len(), ell)?;
        if book.len() == 1 && first_block != last_block {
            return Err(Error::Parameter(
                "a single-block code needs identical boundary blocks".into(),
            ));
        }
        Ok(AssemblyParams {
            book,
            geometry,
            first_block,
            last_block,
        })
    }

    /// Boundary blocks are the encodings of all-one data under the first and
    /// last address.
    pub fn with_default_boundaries(book: AddressBook, ell: usize) -> Result<Self> {
        let geometry = AddressableParams::new(&book, ell)?;
        let ones = Word::new(book.q(), vec![1; geometry.data_len()])?;
        let x = encode2(&ones, &book, ell)?;
        let n = geometry.n();
        let first = x.substring(1, ell);
        let last = x.substring(n - ell + 1, n);
        AssemblyParams::new(book, ell, first, last)
    }

    pub fn book(&self) -> &AddressBook {
        &self.book
    }

    pub fn ell(&self) -> usize {
        self.geometry.ell
    }

    pub fn address_len(&self) -> usize {
        self.geometry.a
    }

    pub fn n(&self) -> usize {
        self.geometry.n()
    }

    pub fn first_block(&self) -> &Word {
        &self.first_block
    }

    pub fn last_block(&self) -> &Word {
        &self.last_block
    }

    /// Number of read losses always tolerated: `ell - 2a + 1`.
    pub fn correction_radius(&self) -> usize {
        self.ell() + 1 - 2 * self.address_len()
    }

    /// A codeword with random interior data and the fixed boundary blocks.
    pub fn random_codeword<R: Rng>(&self, rng: &mut R) -> Word {
        let q = self.book.q();
        let data: Vec<u8> = (0..self.geometry.data_len())
            .map(|_| rng.random_range(1..q) as u8)
            .collect();
        let data = Word::from_trusted(q, data);
        let mut symbols = encode2(&data, &self.book, self.ell())
            .expect("parameters validated at construction")
            .into_symbols();
        let (ell, n) = (self.ell(), self.n());
        symbols[..ell].copy_from_slice(self.first_block.symbols());
        symbols[n - ell..].copy_from_slice(self.last_block.symbols());
        Word::from_trusted(q, symbols)
    }
}

/// Reconstructs a codeword from a possibly lossy bag of its reads.
///
/// Boundary blocks are written first; every Type I read is then aligned and
/// written, and any disagreement fails. The result must be fully covered,
/// addressable, and contain every input read.
pub fn assemble(bag: &ReadBag, params: &AssemblyParams) -> Result<Word> {
    let (ell, n) = (params.ell(), params.n());
    let book = &params.book;
    let mut buffer: Vec<Option<u8>> = vec![None; n];
    let mut write = |start: usize, symbols: &[u8]| -> std::result::Result<(), Failure> {
        for (k, &s) in symbols.iter().enumerate() {
            let slot = &mut buffer[start - 1 + k];
            match *slot {
                Some(prev) if prev != s => {
                    return Err(Failure::Conflict {
                        position: start + k,
                    })
                }
                _ => *slot = Some(s),
            }
        }
        Ok(())
    };
    write(1, params.first_block.symbols())?;
    write(n - ell + 1, params.last_block.symbols())?;
    for r in bag.reads() {
        if r.len() != ell || r.q() != book.q() {
            return Err(Failure::WrongLength {
                read: r.to_string(),
            }
            .into());
        }
        if let Some(j) = align(r, book, ell)? {
            write(j, r.symbols())?;
        }
    }
    let symbols = buffer
        .iter()
        .enumerate()
        .map(|(i, s)| s.ok_or(Failure::Uncovered { position: i + 1 }))
        .collect::<std::result::Result<Vec<u8>, Failure>>()?;
    let x = Word::from_trusted(book.q(), symbols);
    if !is_addressable(&x, book, ell)? {
        return Err(Failure::Verification("result is not addressable").into());
    }
    let available = fragment(&x, ell)?;
    let available = available.counts();
    let consistent = bag
        .counts()
        .into_iter()
        .all(|(r, c)| available.get(r).is_some_and(|&have| have >= c));
    if !consistent {
        return Err(Failure::Verification("a read does not occur in the result").into());
    }
    Ok(x)
}

/// Outcome of a batch of random loss trials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialSummary {
    pub trials: u64,
    pub successes: u64,
    /// Trial indices whose assembly did not return the original codeword.
    pub failed: Vec<u64>,
}

/// Runs `trials` independent trials: draw a random codeword, fragment it,
/// drop `losses` reads uniformly, assemble. Trial `i` uses seed `seed + i`
/// for both the codeword and the losses.
pub fn loss_trials(
    params: &AssemblyParams,
    trials: u64,
    losses: usize,
    seed: u64,
    exec: Exec,
) -> Result<TrialSummary> {
    let indices: Vec<u64> = (0..trials).collect();
    let outcomes = exec.map(&indices, |&i| -> Result<bool> {
        let trial_seed = seed.wrapping_add(i);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let x = params.random_codeword(&mut rng);
        let bag = drop_reads(&fragment(&x, params.ell())?, losses, rng.random())?;
        Ok(assemble(&bag, params).is_ok_and(|y| y == x))
    });
    let mut failed = Vec::new();
    for (i, ok) in outcomes.into_iter().enumerate() {
        if !ok? {
            failed.push(i as u64);
        }
    }
    Ok(TrialSummary {
        trials,
        successes: trials - failed.len() as u64,
        failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::address::canonical_addresses;

    fn w4(s: &str) -> Word {
        Word::parse(4, s).unwrap()
    }

    fn book(q: u32, a: usize) -> AddressBook {
        canonical_addresses(q, a, 1 << 20).unwrap()
    }

    fn example_word() -> Word {
        w4("00101130232211131210")
    }

    #[test]
    fn fragmentation() {
        let x = Word::parse(2, "10001").unwrap();
        let bag = fragment(&x, 2).unwrap();
        assert_eq!(bag.len(), 4);
        let counts: Vec<(String, usize)> = bag
            .counts()
            .into_iter()
            .map(|(r, c)| (r.to_string(), c))
            .collect();
        assert_eq!(
            counts,
            [("00".into(), 2), ("01".into(), 1), ("10".into(), 1)]
        );
        let whole = fragment(&x, 5).unwrap();
        assert_eq!(whole.reads(), std::slice::from_ref(&x));
        assert!(fragment(&x, 6).is_err());
    }

    #[test]
    fn dropping_reads() {
        let x = Word::parse(2, "10001").unwrap();
        let bag = fragment(&x, 2).unwrap();
        assert_eq!(drop_reads(&bag, 0, 1).unwrap(), bag);
        assert!(drop_reads(&bag, 4, 1).unwrap().is_empty());
        assert!(drop_reads(&bag, 5, 1).is_err());
        for seed in 0..20 {
            let one = drop_reads(&bag, 1, seed).unwrap();
            assert_eq!(one, drop_reads(&bag, 1, seed).unwrap());
            assert_eq!(one.len(), 3);
            let c = one.counts();
            let zeros = c.get(&Word::parse(2, "00").unwrap()).copied().unwrap_or(0);
            assert!(zeros == 1 || c.len() == 2);
        }
    }

    #[test]
    fn last_address_examples() {
        let b2 = book(4, 2);
        assert_eq!(last_address_index(&w4("01130"), &b2), Some(3));
        assert_eq!(last_address_index(&w4("30232"), &b2), None);
        assert_eq!(last_address_index(&w4("21113"), &b2), Some(4));
        let b3 = book(4, 3);
        assert_eq!(last_address_index(&w4("21301303"), &b3), Some(5));
    }

    #[test]
    fn type1_examples() {
        let b2 = book(4, 2);
        assert!(is_type1(&w4("01130"), &b2, 5).unwrap());
        assert!(!is_type1(&w4("21113"), &b2, 5).unwrap());
        assert!(!is_type1(&w4("30232"), &b2, 5).unwrap());
        let b3 = book(4, 3);
        assert!(is_type1(&w4("10122001"), &b3, 8).unwrap());
        assert!(!is_type1(&w4("32122133"), &b3, 8).unwrap());
        assert!(!is_type1(&w4("21301303"), &b3, 8).unwrap());
        assert!(is_type1(&w4("0113"), &b2, 5).is_err());
    }

    #[test]
    fn alignment_examples() {
        let b2 = book(4, 2);
        let x = example_word();
        assert_eq!(align(&w4("01130"), &b2, 5).unwrap(), Some(4));
        assert_eq!(x.substring(4, 8), w4("01130"));
        assert_eq!(align(&w4("21113"), &b2, 5).unwrap(), None);
        assert_eq!(align(&w4("00101"), &b2, 5).unwrap(), Some(1));
        // address 00 found at offset 3 cannot start a read inside the word
        assert!(matches!(
            align(&w4("12001"), &b2, 5),
            Err(Error::AssemblyFail(Failure::CorruptRead { .. }))
        ));
    }

    #[test]
    fn position_table() {
        assert_eq!(
            type1_positions(5, 2, 20),
            vec![1, 4, 5, 6, 9, 10, 11, 14, 15, 16]
        );
        let b2 = book(4, 2);
        let x = example_word();
        for j in 1..=16 {
            let typed = is_type1(&x.substring(j, j + 4), &b2, 5).unwrap();
            assert_eq!(typed, type1_positions(5, 2, 20).contains(&j), "j={j}");
        }
        assert_eq!(type1_positions(6, 1, 12).len(), 7);
        for i in 5..=15 {
            assert_eq!(type1_reads_covering(i, 5, 2, 20).len(), 3);
        }
    }

    #[test]
    fn boundary_validation() {
        let b = book(4, 2);
        let p = AssemblyParams::with_default_boundaries(b.clone(), 5).unwrap();
        assert_eq!(p.first_block(), &w4("00101"));
        assert_eq!(p.correction_radius(), 2);
        assert!(AssemblyParams::new(b.clone(), 5, w4("13023"), w4("31210")).is_err());
        assert!(AssemblyParams::new(b.clone(), 5, w4("00000"), w4("31210")).is_err());
        assert!(AssemblyParams::new(b, 5, w4("00101"), w4("31210")).is_ok());
    }

    #[test]
    fn assembles_without_losses() {
        let b = book(4, 2);
        let p = AssemblyParams::with_default_boundaries(b, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x = p.random_codeword(&mut rng);
            assert_eq!(assemble(&fragment(&x, 5).unwrap(), &p).unwrap(), x);
        }
    }

    #[test]
    fn assembles_within_radius() {
        for (a, ell) in [(2usize, 4usize), (2, 6), (2, 9), (3, 8)] {
            let p = AssemblyParams::with_default_boundaries(book(4, a), ell).unwrap();
            let summary = loss_trials(&p, 200, p.correction_radius(), 99, Exec::default()).unwrap();
            assert_eq!(
                summary.successes, 200,
                "a={a} ell={ell}: {:?}",
                summary.failed
            );
        }
    }

    #[test]
    fn targeted_losses_fail() {
        let p = AssemblyParams::with_default_boundaries(book(4, 2), 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = p.random_codeword(&mut rng);
        let mut bag = fragment(&x, 6).unwrap();
        let starts = type1_reads_covering(10, 6, 2, p.n());
        assert_eq!(starts.len(), p.correction_radius() + 1);
        for j in starts {
            assert!(bag.remove_one(&x.substring(j, j + 5)));
        }
        assert!(matches!(
            assemble(&bag, &p),
            Err(Error::AssemblyFail(Failure::Uncovered { position: 10 }))
        ));
    }

    #[test]
    fn garbage_is_rejected() {
        let p = AssemblyParams::with_default_boundaries(book(4, 2), 5).unwrap();
        let x = example_word();
        let mut bag = fragment(&x, 5).unwrap();
        // a read from a different codeword conflicts or fails verification
        bag = ReadBag::new(
            5,
            bag.reads().iter().cloned().chain([w4("13111")]).collect(),
        )
        .unwrap();
        assert!(assemble(&bag, &p).is_err());
        let short = ReadBag::new(4, vec![w4("0010")]).unwrap();
        assert!(assemble(&short, &p).is_err());
    }

    #[test]
    fn bag_parsing() {
        let text = "# seed: 4\n00101\n\n01011\n00101\n";
        let bag = ReadBag::parse_lines(text, |l| Word::parse(2, l)).unwrap();
        assert_eq!(bag.len(), 3);
        assert_eq!(bag.ell(), 5);
        assert!(ReadBag::parse_lines("0101\n010\n", |l| Word::parse(2, l)).is_err());
    }
}
