//! Addressable block codes.
//!
//! A word `z_1 z_2 .. z_M` (each block of length `ell`) is addressable for a
//! book `u_1, .., u_M` of length-`a` addresses when block `i` starts with
//! `u_i` and no address occurs at any other offset inside a block. Distinct
//! addressable words always have distinct `ell`-gram supports when
//! `2a <= ell`.
//!
//! The canonical book holds every `a`-gram with digit sum `0 mod q`. The
//! encoder fills each block after its address with symbols chosen so that
//! every freshly completed `a`-gram has a nonzero digit sum.

use std::collections::HashMap;

use crate::enumeration::{ceil_log, PaddedLayout};
use crate::prefix_code::Ops;
use crate::word::check_alphabet;
use crate::{Error, Result, Word};

/// Default cap on the size of a generated address book.
pub const DEFAULT_BOOK_BUDGET: u64 = 1 << 20;

/// Ordered, duplicate-free list of equal-length addresses with O(1) rank
/// lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AddressBook {
    q: u32,
    a: usize,
    addresses: Vec<Word>,
    rank: HashMap<Vec<u8>, usize>,
}

impl AddressBook {
    pub fn new(q: u32, a: usize, addresses: Vec<Word>) -> Result<Self> {
        check_alphabet(q)?;
        if a == 0 {
            return Err(Error::Parameter("address length must be positive".into()));
        }
        let mut rank = HashMap::with_capacity(addresses.len());
        for (i, u) in addresses.iter().enumerate() {
            if u.q() != q {
                return Err(Error::AlphabetMismatch {
                    left: u.q(),
                    right: q,
                });
            }
            if u.len() != a {
                return Err(Error::LengthMismatch {
                    left: u.len(),
                    right: a,
                });
            }
            if rank.insert(u.symbols().to_vec(), i + 1).is_some() {
                return Err(Error::Parameter(format!("duplicate address {u}")));
            }
        }
        Ok(AddressBook {
            q,
            a,
            addresses,
            rank,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Address length.
    pub fn address_len(&self) -> usize {
        self.a
    }

    /// Number of addresses `M`.
    pub fn len(&self) -> usize {
        self.addresses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.addresses.is_empty()
    }

    pub fn addresses(&self) -> &[Word] {
        &self.addresses
    }

    /// The `i`-th address, 1-based.
    pub fn get(&self, i: usize) -> &Word {
        &self.addresses[i - 1]
    }

    /// 1-based rank of an `a`-gram, if it is an address.
    pub fn rank_of(&self, gram: &[u8]) -> Option<usize> {
        self.rank.get(gram).copied()
    }

    pub fn contains(&self, gram: &[u8]) -> bool {
        self.rank.contains_key(gram)
    }

    /// Book made of the first `m` addresses.
    pub fn first(&self, m: usize) -> Result<AddressBook> {
        if m == 0 || m > self.len() {
            return Err(Error::Parameter(format!(
                "cannot take {m} of {} addresses",
                self.len()
            )));
        }
        AddressBook::new(self.q, self.a, self.addresses[..m].to_vec())
    }

    fn is_zero_sum(&self) -> bool {
        self.addresses.iter().all(|u| u.digit_sum_mod() == 0)
    }
}

/// All length-`a` words with digit sum `0 mod q`, in lexicographic order.
pub fn canonical_addresses(q: u32, a: usize, budget: u64) -> Result<AddressBook> {
    check_alphabet(q)?;
    if a == 0 {
        return Err(Error::Parameter("address length must be positive".into()));
    }
    let size = (q as u64)
        .checked_pow(a as u32 - 1)
        .filter(|&s| s <= budget)
        .ok_or_else(|| Error::BudgetExceeded {
            what: "address book",
            needed: format!("{q}^{} addresses", a - 1),
            budget: budget.to_string(),
        })?;
    // free prefix of length a-1 in lexicographic order, last symbol forced
    let addresses = (0..size)
        .map(|index| {
            let mut s = vec![0u8; a];
            crate::enumeration::word_at_index(q, a - 1, index, &mut s[..a - 1]);
            let partial: u32 = s[..a - 1].iter().map(|&v| v as u32).sum();
            s[a - 1] = ((q - partial % q) % q) as u8;
            Word::from_trusted(q, s)
        })
        .collect();
    AddressBook::new(q, a, addresses)
}

/// Block geometry for an addressable word: `M` blocks of length `ell`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AddressableParams {
    pub q: u32,
    pub ell: usize,
    pub a: usize,
    pub blocks: usize,
}

impl AddressableParams {
    pub fn new(book: &AddressBook, ell: usize) -> Result<Self> {
        let a = book.address_len();
        if 2 * a > ell {
            return Err(Error::Parameter(format!(
                "addressable codes need 2a <= ell, got a={a}, ell={ell}"
            )));
        }
        Ok(AddressableParams {
            q: book.q(),
            ell,
            a,
            blocks: book.len(),
        })
    }

    pub fn n(&self) -> usize {
        self.blocks * self.ell
    }

    pub fn data_len(&self) -> usize {
        self.blocks * (self.ell - self.a)
    }

    /// Whether `4 <= 2a`, the stricter hypothesis under which the block-count
    /// bound `(q-1)^(q^(a-1) (ell-a))` is usually quoted. Smaller `a` still
    /// yields valid codes.
    pub fn meets_strict_hypothesis(&self) -> bool {
        self.a >= 2
    }
}

/// Checks the block prefixes and that no address occurs at offsets
/// `2..=ell-a+1` within any block.
pub fn is_addressable(x: &Word, book: &AddressBook, ell: usize) -> Result<bool> {
    let m = book.len();
    if x.len() != m * ell {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: m * ell,
        });
    }
    let a = book.address_len();
    if a > ell || x.q() != book.q() {
        return Ok(false);
    }
    Ok(x.symbols().chunks(ell).enumerate().all(|(i, block)| {
        block[..a] == *book.get(i + 1).symbols() && block[1..].windows(a).all(|g| !book.contains(g))
    }))
}

/// The symbol that would complete a zero-sum `a`-gram after `window`.
fn forbidden_symbol(q: u32, window: &[u8]) -> u8 {
    let sum: u32 = window.iter().map(|&v| v as u32).sum();
    ((q - sum % q) % q) as u8
}

fn check_encodable(book: &AddressBook, ell: usize) -> Result<AddressableParams> {
    let params = AddressableParams::new(book, ell)?;
    if !book.is_zero_sum() {
        return Err(Error::Parameter(
            "the block encoder needs an address book of zero-sum addresses".into(),
        ));
    }
    Ok(params)
}

fn encode_block(
    q: u32,
    a: usize,
    address: &[u8],
    data: &[u8],
    out: &mut Vec<u8>,
    ops: &mut Ops,
) -> Result<()> {
    let start = out.len();
    out.extend_from_slice(address);
    for &c in data {
        if c == 0 || c as u32 >= q {
            return Err(Error::Parameter(format!(
                "data symbol {c} is not in 1..{q}"
            )));
        }
        let len = out.len();
        let bad = forbidden_symbol(q, &out[len - (a - 1)..]);
        // c-th element (1-based) of the ascending list [q] \ {bad}
        let z = if c <= bad { c - 1 } else { c };
        ops.0 += a + 1;
        out.push(z);
    }
    debug_assert_eq!(out.len() - start, a + data.len());
    Ok(())
}

pub(crate) fn encode2_traced(
    c: &Word,
    book: &AddressBook,
    ell: usize,
    ops: &mut Ops,
) -> Result<Word> {
    let params = check_encodable(book, ell)?;
    if c.len() != params.data_len() {
        return Err(Error::LengthMismatch {
            left: c.len(),
            right: params.data_len(),
        });
    }
    let q = book.q();
    let chunk = ell - params.a;
    let mut out = Vec::with_capacity(params.n());
    // 2a <= ell, so every block carries at least one data symbol
    for (i, data) in c.symbols().chunks(chunk).enumerate() {
        encode_block(q, params.a, book.get(i + 1).symbols(), data, &mut out, ops)?;
    }
    Ok(Word::from_trusted(q, out))
}

pub(crate) fn decode2_traced(
    x: &Word,
    book: &AddressBook,
    ell: usize,
    ops: &mut Ops,
) -> Result<Word> {
    let params = check_encodable(book, ell)?;
    if x.len() != params.n() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: params.n(),
        });
    }
    if x.q() != book.q() {
        return Err(Error::AlphabetMismatch {
            left: x.q(),
            right: book.q(),
        });
    }
    let (q, a) = (book.q(), params.a);
    let mut data = Vec::with_capacity(params.data_len());
    for (i, block) in x.symbols().chunks(ell).enumerate() {
        if block[..a] != *book.get(i + 1).symbols() {
            return Err(Error::NotInCode(format!(
                "block {} does not start with address {}",
                i + 1,
                book.get(i + 1)
            )));
        }
        for j in a..ell {
            let bad = forbidden_symbol(q, &block[j + 1 - a..j]);
            let z = block[j];
            ops.0 += a + 1;
            if z == bad {
                return Err(Error::NotInCode(format!(
                    "symbol {z} at position {} of block {} completes an address",
                    j + 1,
                    i + 1
                )));
            }
            data.push(if z < bad { z + 1 } else { z });
        }
    }
    Ok(Word::from_trusted(q, data))
}

/// Encodes `M (ell - a)` data symbols, each in `1..q`, into an addressable
/// word of length `M ell`.
pub fn encode2(c: &Word, book: &AddressBook, ell: usize) -> Result<Word> {
    encode2_traced(c, book, ell, &mut Ops::default())
}

/// Inverse of [`encode2`].
pub fn decode2(x: &Word, book: &AddressBook, ell: usize) -> Result<Word> {
    decode2_traced(x, book, ell, &mut Ops::default())
}

/// Address book used by the padded code for `layout`: the first `m` zero-sum
/// addresses of length `a`.
pub fn padded_book(layout: &PaddedLayout) -> Result<AddressBook> {
    canonical_addresses(layout.q, layout.address_len as usize, DEFAULT_BOOK_BUDGET)?
        .first(layout.blocks as usize)
}

/// Encodes `m (ell - a)` data symbols into a word of any length
/// `n = m ell + t`: `m` addressable blocks followed by `t` zeros.
pub fn encode2_padded(c: &Word, q: u32, n: usize, ell: usize) -> Result<Word> {
    let layout =
        PaddedLayout::new(q, n as u64, ell as u64).map_err(|e| Error::Parameter(e.to_string()))?;
    let book = padded_book(&layout)?;
    let mut symbols = encode2(c, &book, ell)?.into_symbols();
    symbols.resize(n, 0);
    Ok(Word::from_trusted(q, symbols))
}

/// Inverse of [`encode2_padded`]; the tail must be all zeros.
pub fn decode2_padded(x: &Word, ell: usize) -> Result<Word> {
    let layout = PaddedLayout::new(x.q(), x.len() as u64, ell as u64)
        .map_err(|e| Error::Parameter(e.to_string()))?;
    let book = padded_book(&layout)?;
    let body = layout.blocks as usize * ell;
    if x.symbols()[body..].iter().any(|&s| s != 0) {
        return Err(Error::NotInCode("padding is not all zeros".into()));
    }
    decode2(&x.substring(1, body), &book, ell)
}

/// Address length `ceil(log_q m) + 1` for `m` blocks.
pub fn address_len_for(q: u32, blocks: u64) -> usize {
    ceil_log(q as u64, blocks) as usize + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::word_at_index;
    use crate::profile::support;
    use rand::{Rng, SeedableRng};
    use std::collections::HashSet;

    fn w4(s: &str) -> Word {
        Word::parse(4, s).unwrap()
    }

    fn book(q: u32, a: usize) -> AddressBook {
        canonical_addresses(q, a, DEFAULT_BOOK_BUDGET).unwrap()
    }

    fn example_word() -> Word {
        w4("00101130232211131210")
    }

    #[test]
    fn canonical_books() {
        let b = book(4, 2);
        let listed: Vec<String> = b.addresses().iter().map(|u| u.to_string()).collect();
        assert_eq!(listed, ["00", "13", "22", "31"]);
        assert_eq!(b.rank_of(&[2, 2]), Some(3));
        assert_eq!(b.rank_of(&[2, 1]), None);
        let listed: Vec<String> = book(2, 1)
            .addresses()
            .iter()
            .map(|u| u.to_string())
            .collect();
        assert_eq!(listed, ["0"]);
        let listed: Vec<String> = book(3, 2)
            .addresses()
            .iter()
            .map(|u| u.to_string())
            .collect();
        assert_eq!(listed, ["00", "12", "21"]);
        assert!(canonical_addresses(4, 12, 1000).is_err());
    }

    #[test]
    fn canonical_books_are_sorted_and_complete() {
        for q in 2..=5u32 {
            for a in 1..=4usize {
                let b = book(q, a);
                assert_eq!(b.len() as u64, (q as u64).pow(a as u32 - 1));
                assert!(b.addresses().windows(2).all(|p| p[0] < p[1]));
                let total = (q as u64).pow(a as u32);
                let mut s = vec![0u8; a];
                let zero_sum = (0..total)
                    .filter(|&i| {
                        word_at_index(q, a, i, &mut s);
                        s.iter().map(|&v| v as u32).sum::<u32>() % q == 0
                    })
                    .count();
                assert_eq!(zero_sum, b.len());
            }
        }
    }

    #[test]
    fn worked_example_round_trip() {
        let b = book(4, 2);
        let c = w4("111123222321");
        let x = encode2(&c, &b, 5).unwrap();
        assert_eq!(x, example_word());
        assert!(is_addressable(&x, &b, 5).unwrap());
        assert_eq!(decode2(&x, &b, 5).unwrap(), c);
        // first block trace: 00 -> 001 -> 0010
        assert_eq!(&x.symbols()[..4], &[0, 0, 1, 0]);
    }

    #[test]
    fn addressability_violations() {
        let b = book(4, 2);
        let mut s = example_word().into_symbols();
        s[..5].copy_from_slice(&[0, 0, 0, 0, 0]);
        let x = Word::new(4, s).unwrap();
        assert!(!is_addressable(&x, &b, 5).unwrap());
        assert!(matches!(decode2(&x, &b, 5), Err(Error::NotInCode(_))));

        let mut s = example_word().into_symbols();
        s[5] = 2;
        assert!(!is_addressable(&Word::new(4, s).unwrap(), &b, 5).unwrap());
        assert!(is_addressable(&w4("0010"), &b, 5).is_err());
    }

    #[test]
    fn degenerate_single_symbol_address() {
        let b = book(2, 1);
        let c = Word::new(2, vec![1; 5]).unwrap();
        let x = encode2(&c, &b, 6).unwrap();
        assert_eq!(x.to_string(), "011111");
        assert_eq!(decode2(&x, &b, 6).unwrap(), c);
    }

    #[test]
    fn encoder_input_checks() {
        let b = book(4, 2);
        assert!(encode2(&w4("011123222321"), &b, 5).is_err());
        assert!(encode2(&w4("11112322232"), &b, 5).is_err());
        assert!(encode2(&w4("111123222321"), &b, 3).is_err());
        let custom = AddressBook::new(4, 2, vec![w4("01"), w4("13")]).unwrap();
        assert!(encode2(&w4("111111"), &custom, 5).is_err());
        assert!(AddressBook::new(4, 2, vec![w4("01"), w4("01")]).is_err());
    }

    #[test]
    fn appended_grams_never_sum_to_zero() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let q = rng.random_range(2..=5u32);
            let a = rng.random_range(1..=3usize);
            let ell = rng.random_range(2 * a..=2 * a + 8);
            let b = book(q, a);
            let data_len = b.len() * (ell - a);
            let c: Vec<u8> = (0..data_len)
                .map(|_| rng.random_range(1..q) as u8)
                .collect();
            let c = Word::new(q, c).unwrap();
            let x = encode2(&c, &b, ell).unwrap();
            assert!(is_addressable(&x, &b, ell).unwrap());
            for block in x.symbols().chunks(ell) {
                for end in a..ell {
                    let g = &block[end + 1 - a..=end];
                    assert_ne!(g.iter().map(|&v| v as u32).sum::<u32>() % q, 0);
                }
            }
            assert_eq!(decode2(&x, &b, ell).unwrap(), c);
        }
    }

    #[test]
    fn production_scale_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for a in 1..=5usize {
            let b = book(4, a);
            let c: Vec<u8> = (0..b.len() * (100 - a))
                .map(|_| rng.random_range(1..4u8))
                .collect();
            let c = Word::new(4, c).unwrap();
            let x = encode2(&c, &b, 100).unwrap();
            assert_eq!(x.len(), b.len() * 100);
            assert!(is_addressable(&x, &b, 100).unwrap());
            assert_eq!(decode2(&x, &b, 100).unwrap(), c);
        }
    }

    fn all_data(q: u32, len: usize) -> Vec<Word> {
        let total = ((q - 1) as u64).pow(len as u32);
        (0..total)
            .map(|mut i| {
                let s = (0..len)
                    .map(|_| {
                        let d = (i % (q as u64 - 1)) as u8 + 1;
                        i /= q as u64 - 1;
                        d
                    })
                    .collect();
                Word::new(q, s).unwrap()
            })
            .collect()
    }

    #[test]
    fn exhaustive_distinct_supports() {
        // q=2 with a=1 has a single codeword; q=3 exercises real choices
        for (q, a) in [(2u32, 1usize), (3, 1), (3, 2), (4, 1)] {
            for ell in (2 * a).max(2)..=4 {
                let b = book(q, a);
                let data_len = b.len() * (ell - a);
                if ((q - 1) as u64).pow(data_len as u32) > 5000 {
                    continue;
                }
                let mut seen = HashSet::new();
                for c in all_data(q, data_len) {
                    let x = encode2(&c, &b, ell).unwrap();
                    assert!(
                        seen.insert(support(&x, ell).unwrap()),
                        "q={q} a={a} ell={ell}"
                    );
                }
            }
        }
    }

    #[test]
    fn padded_layout_and_round_trip() {
        let layout = PaddedLayout::new(4, 205, 100).unwrap();
        assert_eq!((layout.blocks, layout.tail, layout.address_len), (2, 5, 2));
        let c = Word::new(4, vec![2; layout.data_len() as usize]).unwrap();
        let x = encode2_padded(&c, 4, 205, 100).unwrap();
        assert_eq!(x.len(), 205);
        assert_eq!(&x.symbols()[..2], &[0, 0]);
        assert_eq!(&x.symbols()[100..102], &[1, 3]);
        assert!(x.symbols()[200..].iter().all(|&s| s == 0));
        assert_eq!(decode2_padded(&x, 100).unwrap(), c);

        // t = 0 is plain encode2 over the first m addresses
        let c = w4("111123222321");
        let padded = encode2_padded(&c, 4, 20, 5).unwrap();
        assert_eq!(padded, example_word());

        assert!(encode2_padded(&c, 4, 20, 3).is_err());
    }

    #[test]
    fn padded_code_has_distinct_profiles() {
        for (q, n, ell) in [
            (2u32, 8usize, 4usize),
            (3, 9, 4),
            (3, 11, 4),
            (4, 13, 4),
            (4, 15, 4),
            (3, 14, 5),
        ] {
            let layout = PaddedLayout::new(q, n as u64, ell as u64).unwrap();
            let mut seen = HashSet::new();
            let data = all_data(q, layout.data_len() as usize);
            for c in &data {
                let x = encode2_padded(c, q, n, ell).unwrap();
                assert!(seen.insert(crate::profile::profile(&x, ell).unwrap()));
            }
            assert_eq!(seen.len(), ((q - 1) as usize).pow(layout.data_len() as u32));
        }
    }

    #[test]
    fn linear_operation_count() {
        for (q, a, ell) in [(4u32, 2usize, 12usize), (4, 3, 50), (2, 4, 100)] {
            let b = book(q, a);
            let c = Word::new(q, vec![1; b.len() * (ell - a)]).unwrap();
            let mut ops = Ops::default();
            let x = encode2_traced(&c, &b, ell, &mut ops).unwrap();
            let budget = (q as usize + a) * b.len() * ell;
            assert!(ops.0 <= budget);
            let mut ops = Ops::default();
            decode2_traced(&x, &b, ell, &mut ops).unwrap();
            assert!(ops.0 <= budget);
        }
    }
}
