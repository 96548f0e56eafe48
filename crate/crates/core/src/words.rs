//! Signed generator letters and freely reduced words.
//!
//! Words are reduced on construction and stay reduced, so equality and
//! hashing are structural. The letter order is frozen as
//! `x0 < x0^-1 < x1 < x1^-1 < ...`; every enumeration in the crate leans on
//! it, so it must never change.

use crate::computability::cantor_unpair;
use std::fmt;

/// A generator, identified by its 0-based index. The default display name is
/// `x<index>`; presentations may attach nicer names, which never affect
/// semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneratorId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

/// One signed letter of a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: GeneratorId,
    pub sign: Sign,
}

impl Letter {
    pub fn new(gen: u64, sign: Sign) -> Letter {
        Letter {
            gen: GeneratorId(gen),
            sign,
        }
    }

    pub fn pos(gen: u64) -> Letter {
        Letter::new(gen, Sign::Pos)
    }

    pub fn neg(gen: u64) -> Letter {
        Letter::new(gen, Sign::Neg)
    }

    pub fn inverse(self) -> Letter {
        Letter {
            gen: self.gen,
            sign: self.sign.flip(),
        }
    }

    /// Position in the frozen letter order: `2 * gen` for positive letters,
    /// `2 * gen + 1` for inverses.
    pub fn value(self) -> u64 {
        2 * self.gen.0
            + match self.sign {
                Sign::Pos => 0,
                Sign::Neg => 1,
            }
    }

    pub fn from_value(v: u64) -> Letter {
        Letter::new(v / 2, if v % 2 == 0 { Sign::Pos } else { Sign::Neg })
    }

    fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.sign != other.sign
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Letter) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Letter) -> std::cmp::Ordering {
        self.value().cmp(&other.value())
    }
}

/// A freely reduced word; the empty word is the identity.
///
/// The derived `Ord` is plain lexicographic on letters; use
/// [`Word::shortlex_cmp`] where the graded order matters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Word {
        Word::default()
    }

    /// Free reduction: cancels adjacent inverse pairs until none remain.
    /// Idempotent, and the result is the unique reduced form.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
        let mut letters: Vec<Letter> = Vec::new();
        for l in raw {
            match letters.last() {
                Some(&top) if top.cancels(l) => {
                    letters.pop();
                }
                _ => letters.push(l),
            }
        }
        Word { letters }
    }

    pub fn generator(gen: u64) -> Word {
        Word {
            letters: vec![Letter::pos(gen)],
        }
    }

    pub fn letter(l: Letter) -> Word {
        Word { letters: vec![l] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Freely reduced product self * other.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            match letters.last() {
                Some(&top) if top.cancels(l) => {
                    letters.pop();
                }
                _ => letters.push(l),
            }
        }
        Word { letters }
    }

    /// n-th power, negative n through the inverse.
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// by^-1 * self * by.
    pub fn conjugate(&self, by: &Word) -> Word {
        by.inverse().concat(self).concat(by)
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<u64> {
        self.letters.iter().map(|l| l.gen.0).max()
    }

    /// Splits self as `u^-1 * core * u` with `core` cyclically reduced.
    /// Returns (core, u).
    pub fn cyclic_decompose(&self) -> (Word, Word) {
        let n = self.letters.len();
        let mut strip = 0;
        while n >= 2 * (strip + 1) && self.letters[strip].cancels(self.letters[n - 1 - strip]) {
            strip += 1;
        }
        let core = Word {
            letters: self.letters[strip..n - strip].to_vec(),
        };
        let conj = Word {
            letters: self.letters[n - strip..].to_vec(),
        };
        (core, conj)
    }

    /// The shortest `root` with `self = root^k` as a letter string, together
    /// with the maximal such k. The identity decomposes as (identity, 1).
    pub fn primitive_power(&self) -> (Word, u64) {
        let n = self.letters.len();
        if n == 0 {
            return (Word::identity(), 1);
        }
        for period in 1..=n {
            if n % period != 0 {
                continue;
            }
            if (period..n).all(|i| self.letters[i] == self.letters[i - period]) {
                return (
                    Word {
                        letters: self.letters[..period].to_vec(),
                    },
                    (n / period) as u64,
                );
            }
        }
        unreachable!("period n always works")
    }

    /// Shortlex comparison in the frozen letter order.
    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

/// Free reduction of a raw letter sequence. Alias for [`Word::from_letters`]
/// in the shape the operation tables use.
pub fn free_reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
    Word::from_letters(raw)
}

/// The alphabet a word enumeration runs over: finitely many generators or
/// all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alphabet {
    Finite(u64),
    Omega,
}

impl Alphabet {
    /// True when the word only uses generators this alphabet has.
    pub fn admits(&self, w: &Word) -> bool {
        match (self, w.max_generator()) {
            (Alphabet::Omega, _) | (_, None) => true,
            (Alphabet::Finite(n), Some(g)) => g < *n,
        }
    }
}

/// Rank `rank` in the length-lexicographic enumeration of reduced words over
/// `k >= 1` generators: rank 0 is the empty word, then words of length 1 in
/// letter order, and so on. Within a length, the first letter ranges over all
/// 2k letters and each later letter over the 2k-1 letters that do not cancel
/// the previous one, in letter order.
fn finite_unrank(k: u64, rank: u64) -> Word {
    assert!(k >= 1, "finite enumeration needs at least one generator");
    if rank == 0 {
        return Word::identity();
    }
    let mut remaining = rank as u128 - 1;
    let mut len = 1u32;
    let mut block = 2 * k as u128;
    loop {
        if remaining < block {
            break;
        }
        remaining -= block;
        len += 1;
        block = block.saturating_mul((2 * k - 1) as u128);
    }
    // Mixed-radix digits: first digit base 2k, the rest base 2k - 1.
    let rest_base = (2 * k - 1) as u128;
    let mut digits = Vec::with_capacity(len as usize);
    let mut suffix_count = 1u128;
    for _ in 1..len {
        suffix_count = suffix_count.saturating_mul(rest_base);
    }
    let mut idx = remaining;
    let first_digit = (idx / suffix_count) as u64;
    idx %= suffix_count;
    digits.push(first_digit);
    for _ in 1..len {
        suffix_count /= rest_base;
        digits.push((idx / suffix_count) as u64);
        idx %= suffix_count;
    }
    let mut letters = Vec::with_capacity(len as usize);
    let mut prev: Option<Letter> = None;
    for (pos, d) in digits.into_iter().enumerate() {
        let value = match prev {
            None => d,
            Some(p) => {
                debug_assert!(pos > 0);
                let forbidden = p.inverse().value();
                if d < forbidden {
                    d
                } else {
                    d + 1
                }
            }
        };
        let l = Letter::from_value(value);
        letters.push(l);
        prev = Some(l);
    }
    debug_assert_eq!(letters.len(), len as usize);
    Word { letters }
}

/// Smallest alphabet that contains the word; the empty word counts as
/// needing one generator so it has a home in the interleaved enumeration.
fn minimal_alphabet(w: &Word) -> u64 {
    w.max_generator().map(|g| g + 1).unwrap_or(0).max(1)
}

/// Deterministic enumeration of all reduced words over an alphabet.
///
/// For `Finite(k)` this is the bijective length-lexicographic ranking with
/// rank 0 the empty word. For `Omega` the finite enumerations are interleaved
/// along Cantor anti-diagonals — step z looks at pair `(j-1, r) = unpair(z)`
/// and keeps word r of the j-generator enumeration when j is exactly its
/// minimal alphabet — so every word appears at exactly one rank, and the
/// single letters of generator g already appear at rank O(g^2).
pub struct WordEnumerator {
    alphabet: Alphabet,
    next_rank: u64,
    omega_step: u64,
}

impl WordEnumerator {
    pub fn new(alphabet: Alphabet) -> WordEnumerator {
        WordEnumerator {
            alphabet,
            next_rank: 0,
            omega_step: 0,
        }
    }
}

impl Iterator for WordEnumerator {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        match self.alphabet {
            Alphabet::Finite(0) => {
                // No generators: the empty word is the only word.
                if self.next_rank == 0 {
                    self.next_rank = 1;
                    Some(Word::identity())
                } else {
                    None
                }
            }
            Alphabet::Finite(k) => {
                let w = finite_unrank(k, self.next_rank);
                self.next_rank += 1;
                Some(w)
            }
            Alphabet::Omega => loop {
                let (a, r) = cantor_unpair(self.omega_step);
                self.omega_step += 1;
                let j = a + 1;
                let w = finite_unrank(j, r);
                if minimal_alphabet(&w) == j {
                    return Some(w);
                }
            },
        }
    }
}

/// The word at `rank` in the documented enumeration order.
pub fn enumerate_words(alphabet: Alphabet, rank: u64) -> Word {
    match alphabet {
        Alphabet::Finite(k) => finite_unrank(k, rank),
        Alphabet::Omega => WordEnumerator::new(Alphabet::Omega)
            .nth(rank as usize)
            .expect("omega enumeration is endless"),
    }
}

/// Naming scheme for generators in the text syntax.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GeneratorNames {
    /// x0, x1, x2, ...
    Default,
    Named(Vec<String>),
}

impl GeneratorNames {
    pub fn name(&self, gen: u64) -> String {
        match self {
            GeneratorNames::Default => format!("x{gen}"),
            GeneratorNames::Named(names) => names
                .get(gen as usize)
                .cloned()
                .unwrap_or_else(|| format!("x{gen}")),
        }
    }

    pub fn index_of(&self, name: &str) -> Option<u64> {
        match self {
            GeneratorNames::Default => {
                let digits = name.strip_prefix('x')?;
                if digits.is_empty() || (digits.len() > 1 && digits.starts_with('0')) {
                    return None;
                }
                digits.parse().ok()
            }
            GeneratorNames::Named(names) => names
                .iter()
                .position(|n| n == name)
                .map(|i| i as u64)
                .or_else(|| GeneratorNames::Default.index_of(name)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordParseError {
    pub msg: String,
}

impl fmt::Display for WordParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "word syntax error: {}", self.msg)
    }
}

impl std::error::Error for WordParseError {}

/// Renders a word in the text syntax: whitespace-separated letters, each
/// `name` or `name^-1`, runs of the same positive letter collapsed to
/// `name^k`; the empty word is `1`.
pub fn format_word(w: &Word, names: &GeneratorNames) -> String {
    if w.is_identity() {
        return "1".to_string();
    }
    let mut out: Vec<String> = Vec::new();
    let mut i = 0;
    let ls = w.letters();
    while i < ls.len() {
        let l = ls[i];
        let mut run = 1;
        while i + run < ls.len() && ls[i + run] == l {
            run += 1;
        }
        let name = names.name(l.gen.0);
        match l.sign {
            Sign::Pos => {
                if run == 1 {
                    out.push(name);
                } else {
                    out.push(format!("{name}^{run}"));
                }
            }
            Sign::Neg => {
                for _ in 0..run {
                    out.push(format!("{name}^-1"));
                }
            }
        }
        i += run;
    }
    out.join(" ")
}

/// Parses the text syntax. Tokens are `name`, `name^-1`, or `name^k` with
/// k >= 1; the single token `1` is the empty word.
pub fn parse_word(text: &str, names: &GeneratorNames) -> Result<Word, WordParseError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.is_empty() {
        return Err(WordParseError {
            msg: "empty input (the empty word is spelled `1`)".into(),
        });
    }
    if tokens == ["1"] {
        return Ok(Word::identity());
    }
    let mut letters = Vec::new();
    for tok in tokens {
        if tok == "1" {
            return Err(WordParseError {
                msg: "`1` must stand alone".into(),
            });
        }
        let (name, exp) = match tok.find('^') {
            Some(pos) => (&tok[..pos], &tok[pos + 1..]),
            None => (tok, "1"),
        };
        let gen = names.index_of(name).ok_or_else(|| WordParseError {
            msg: format!("unknown generator `{name}`"),
        })?;
        if exp == "-1" {
            letters.push(Letter::neg(gen));
        } else {
            let k: u64 = exp.parse().map_err(|_| WordParseError {
                msg: format!("bad exponent `{exp}`"),
            })?;
            if k == 0 {
                return Err(WordParseError {
                    msg: "exponent must be positive or -1".into(),
                });
            }
            for _ in 0..k {
                letters.push(Letter::pos(gen));
            }
        }
    }
    Ok(Word::from_letters(letters))
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_word(self, &GeneratorNames::Default))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str) -> Word {
        parse_word(text, &GeneratorNames::Named(vec!["a".into(), "b".into(), "c".into()]))
            .unwrap()
    }

    #[test]
    fn free_reduce_examples() {
        assert_eq!(
            Word::from_letters([Letter::pos(0), Letter::neg(0)]),
            Word::identity()
        );
        assert_eq!(
            Word::from_letters([Letter::pos(0), Letter::pos(1), Letter::neg(1), Letter::pos(0)]),
            w("a a")
        );
        assert_eq!(
            Word::from_letters([Letter::pos(0), Letter::pos(1), Letter::neg(0)]),
            w("a b a^-1")
        );
    }

    #[test]
    fn free_reduce_idempotent() {
        for text in ["1", "a b", "a b^-1 a^3", "b b b"] {
            let word = w(text);
            assert_eq!(Word::from_letters(word.letters().to_vec()), word);
        }
    }

    #[test]
    fn invert_examples() {
        assert_eq!(Word::identity().inverse(), Word::identity());
        assert_eq!(w("a b").inverse(), w("b^-1 a^-1"));
        assert_eq!(w("a a").inverse(), w("a^-1 a^-1"));
        assert_eq!(w("a b").inverse().inverse(), w("a b"));
    }

    #[test]
    fn concat_examples() {
        assert_eq!(Word::identity().concat(&w("a b")), w("a b"));
        assert_eq!(w("a b").concat(&w("b^-1 c")), w("a c"));
        let x = w("a b c^-1");
        assert_eq!(x.concat(&x.inverse()), Word::identity());
    }

    #[test]
    fn concat_associative() {
        let samples = ["a", "b^-1 a", "c b", "a^-1 c^-1", "1"];
        for u in samples {
            for v in samples {
                for t in samples {
                    let (u, v, t) = (w(u), w(v), w(t));
                    assert_eq!(u.concat(&v).concat(&t), u.concat(&v.concat(&t)));
                }
            }
        }
    }

    #[test]
    fn power_examples() {
        assert_eq!(w("a b").pow(0), Word::identity());
        assert_eq!(w("a").pow(3), w("a a a"));
        assert_eq!(w("a b a^-1").pow(2), w("a b b a^-1"));
        assert_eq!(w("a").pow(-2), w("a^-1 a^-1"));
    }

    #[test]
    fn power_adds_exponents() {
        let base = w("a b^-1");
        for m in -4i64..=4 {
            for n in -4i64..=4 {
                assert_eq!(base.pow(m + n), base.pow(m).concat(&base.pow(n)));
            }
        }
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(w("a b").conjugate(&Word::identity()), w("a b"));
        assert_eq!(w("a").conjugate(&w("b")), w("b^-1 a b"));
        assert_eq!(Word::identity().conjugate(&w("c b")), Word::identity());
    }

    #[test]
    fn cyclic_decompose_roundtrip() {
        for text in ["a", "b^-1 a b", "c b^-1 a^3 b c^-1", "1", "a b"] {
            let word = w(text);
            let (core, conj) = word.cyclic_decompose();
            assert_eq!(core.conjugate(&conj), word, "case {text}");
            // Core is cyclically reduced.
            if !core.is_identity() {
                let f = core.letters()[0];
                let l = *core.letters().last().unwrap();
                assert!(!f.cancels(l) || core.len() == 1);
            }
        }
    }

    #[test]
    fn primitive_power_cases() {
        assert_eq!(w("a b a b").primitive_power(), (w("a b"), 2));
        assert_eq!(w("a a a").primitive_power(), (w("a"), 3));
        assert_eq!(w("a b").primitive_power(), (w("a b"), 1));
        assert_eq!(Word::identity().primitive_power(), (Word::identity(), 1));
    }

    #[test]
    fn enumeration_first_words_rank_one_generator() {
        assert_eq!(enumerate_words(Alphabet::Finite(1), 0), Word::identity());
        assert_eq!(enumerate_words(Alphabet::Finite(1), 1), w("a"));
        assert_eq!(enumerate_words(Alphabet::Finite(1), 2), w("a^-1"));
        assert_eq!(enumerate_words(Alphabet::Finite(1), 3), w("a a"));
    }

    #[test]
    fn enumeration_two_generators_documented_prefix() {
        // Brute-force oracle: all reduced words sorted length-lex must agree
        // with the closed-form unranking.
        let oracle = brute_force_reduced(2, 3);
        for (rank, expect) in oracle.iter().enumerate() {
            assert_eq!(
                &enumerate_words(Alphabet::Finite(2), rank as u64),
                expect,
                "rank {rank}"
            );
        }
        // Spot-check the spec's printed prefix.
        let prefix: Vec<Word> = (0..9)
            .map(|r| enumerate_words(Alphabet::Finite(2), r))
            .collect();
        assert_eq!(
            prefix,
            vec![
                w("1"),
                w("a"),
                w("a^-1"),
                w("b"),
                w("b^-1"),
                w("a a"),
                w("a b"),
                w("a b^-1"),
                w("a^-1 a^-1"),
            ]
        );
    }

    /// All reduced words of length <= maxlen over k generators, length-lex.
    fn brute_force_reduced(k: u64, maxlen: usize) -> Vec<Word> {
        let mut all: Vec<Word> = vec![Word::identity()];
        let mut layer: Vec<Word> = vec![Word::identity()];
        for _ in 0..maxlen {
            let mut next = Vec::new();
            for word in &layer {
                for v in 0..2 * k {
                    let l = Letter::from_value(v);
                    match word.letters().last() {
                        Some(&top) if top.cancels(l) => continue,
                        _ => {}
                    }
                    let mut ls = word.letters().to_vec();
                    ls.push(l);
                    next.push(Word { letters: ls });
                }
            }
            next.sort_by(|a, b| a.shortlex_cmp(b));
            all.extend(next.iter().cloned());
            layer = next;
        }
        all
    }

    #[test]
    fn enumeration_injective_small_ranks() {
        for alphabet in [
            Alphabet::Finite(1),
            Alphabet::Finite(2),
            Alphabet::Finite(3),
            Alphabet::Omega,
        ] {
            let mut seen = std::collections::HashSet::new();
            for (i, word) in WordEnumerator::new(alphabet).take(10_000).enumerate() {
                assert!(alphabet.admits(&word));
                assert!(seen.insert(word.clone()), "duplicate at rank {i}: {word}");
            }
        }
    }

    #[test]
    fn enumeration_hits_short_words() {
        for k in 1..=3u64 {
            let expect = brute_force_reduced(k, 3);
            let got: std::collections::HashSet<Word> = WordEnumerator::new(Alphabet::Finite(k))
                .take(expect.len())
                .collect();
            for word in &expect {
                assert!(got.contains(word), "alphabet {k} missing {word}");
            }
        }
        // The omega enumeration reaches the same words at finite rank.
        let expect = brute_force_reduced(3, 3);
        let got: std::collections::HashSet<Word> = WordEnumerator::new(Alphabet::Omega)
            .take(40_000)
            .collect();
        for word in &expect {
            assert!(got.contains(word), "omega missing {word}");
        }
    }

    #[test]
    fn enumerator_restarts_identically() {
        let a: Vec<Word> = WordEnumerator::new(Alphabet::Omega).take(500).collect();
        let b: Vec<Word> = WordEnumerator::new(Alphabet::Omega).take(500).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn omega_singles_appear_early() {
        // Single letters of generator g must appear at polynomially small
        // ranks; the constructions over prime-indexed generators depend on it.
        let words: Vec<Word> = WordEnumerator::new(Alphabet::Omega).take(20_000).collect();
        for g in [0u64, 5, 13, 37, 97] {
            let pos = words.iter().position(|cand| *cand == Word::generator(g));
            assert!(pos.is_some(), "x{g} not found in 20000 ranks");
        }
    }

    #[test]
    fn word_text_roundtrip() {
        let names = GeneratorNames::Named(vec!["a".into(), "b".into()]);
        for text in ["1", "a", "a b^-1 a^3", "b^-1 b^-1 a^2"] {
            let word = parse_word(text, &names).unwrap();
            let rendered = format_word(&word, &names);
            assert_eq!(parse_word(&rendered, &names).unwrap(), word);
        }
        // Canonical form collapses positive runs.
        assert_eq!(format_word(&w("a a a"), &GeneratorNames::Default), "x0^3");
    }

    #[test]
    fn word_parse_rejects_junk() {
        let names = GeneratorNames::Named(vec!["a".into()]);
        for bad in ["", "a^0", "a^-2", "q", "1 a"] {
            assert!(parse_word(bad, &names).is_err(), "accepted `{bad}`");
        }
    }
}
