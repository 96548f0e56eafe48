//! The three presentation classes and the uniform constructions on them:
//! free products (finite and streamed), k-torsion quotients, presentation
//! enumeration, and abelianization invariants.
//!
//! A presentation never mutates; stream-backed relator sets are restartable
//! producers, so two cursors over the same presentation always see the same
//! relators in the same order.

mod abelian;
mod enumerate;
mod stream;
pub mod text;

pub use abelian::{abelianization_invariants, smith_normal_form};
pub use enumerate::{encode_finite_presentation, enumerate_finite_presentations};
pub use stream::{base_relators, interleave, Provenance, Restartable, RelatorStream, TaggedRelator};

use crate::computability::cantor_pair;
use crate::words::{Alphabet, GeneratorNames, Word, WordEnumerator};
use std::fmt;

/// Error building or combining presentations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PresentationError {
    /// A relator references a generator outside the declared alphabet.
    GeneratorOutOfRange { relator: usize, gen: u64 },
    /// k-torsion quotients need k >= 1.
    ZeroExponent,
    /// The names list length must match the generator count.
    BadNameCount { gens: u64, names: usize },
}

impl fmt::Display for PresentationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PresentationError::GeneratorOutOfRange { relator, gen } => {
                write!(f, "relator {relator} uses undeclared generator x{gen}")
            }
            PresentationError::ZeroExponent => write!(f, "exponent k must be at least 1"),
            PresentationError::BadNameCount { gens, names } => {
                write!(f, "{names} names given for {gens} generators")
            }
        }
    }
}

impl std::error::Error for PresentationError {}

/// Finitely many generators, finitely many relators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinitePresentation {
    gens: u64,
    names: GeneratorNames,
    relators: Vec<Word>,
}

impl FinitePresentation {
    pub fn new(gens: u64, relators: Vec<Word>) -> Result<Self, PresentationError> {
        for (i, r) in relators.iter().enumerate() {
            if let Some(g) = r.max_generator() {
                if g >= gens {
                    return Err(PresentationError::GeneratorOutOfRange { relator: i, gen: g });
                }
            }
        }
        Ok(FinitePresentation {
            gens,
            names: GeneratorNames::Default,
            relators,
        })
    }

    pub fn with_names(
        gens: u64,
        names: Vec<String>,
        relators: Vec<Word>,
    ) -> Result<Self, PresentationError> {
        if names.len() as u64 != gens {
            return Err(PresentationError::BadNameCount {
                gens,
                names: names.len(),
            });
        }
        let mut p = FinitePresentation::new(gens, relators)?;
        p.names = GeneratorNames::Named(names);
        Ok(p)
    }

    pub fn generator_count(&self) -> u64 {
        self.gens
    }

    pub fn names(&self) -> &GeneratorNames {
        &self.names
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn to_recursive(&self) -> RecursivePresentation {
        RecursivePresentation {
            gens: self.gens,
            names: self.names.clone(),
            relators: base_relators("finite", self.relators.clone()),
        }
    }
}

/// Finitely many generators, a recursively enumerated relator stream.
#[derive(Debug, Clone)]
pub struct RecursivePresentation {
    gens: u64,
    names: GeneratorNames,
    relators: RelatorStream,
}

impl RecursivePresentation {
    pub fn new(gens: u64, relators: RelatorStream) -> Self {
        RecursivePresentation {
            gens,
            names: GeneratorNames::Default,
            relators,
        }
    }

    pub fn generator_count(&self) -> u64 {
        self.gens
    }

    pub fn names(&self) -> &GeneratorNames {
        &self.names
    }

    pub fn relators(&self) -> &RelatorStream {
        &self.relators
    }
}

/// Every natural number is a generator; relators come from a stream.
#[derive(Debug, Clone)]
pub struct CountablePresentation {
    relators: RelatorStream,
}

impl CountablePresentation {
    pub fn new(relators: RelatorStream) -> Self {
        CountablePresentation { relators }
    }

    pub fn relators(&self) -> &RelatorStream {
        &self.relators
    }
}

/// Any of the three presentation classes.
#[derive(Debug, Clone)]
pub enum Presentation {
    Finite(FinitePresentation),
    Recursive(RecursivePresentation),
    Countable(CountablePresentation),
}

impl Presentation {
    pub fn alphabet(&self) -> Alphabet {
        match self {
            Presentation::Finite(p) => Alphabet::Finite(p.gens),
            Presentation::Recursive(p) => Alphabet::Finite(p.gens),
            Presentation::Countable(_) => Alphabet::Omega,
        }
    }

    pub fn names(&self) -> GeneratorNames {
        match self {
            Presentation::Finite(p) => p.names.clone(),
            Presentation::Recursive(p) => p.names.clone(),
            Presentation::Countable(_) => GeneratorNames::Default,
        }
    }

    /// The relator stream; a finite presentation's list becomes a finite
    /// stream.
    pub fn relator_stream(&self) -> RelatorStream {
        match self {
            Presentation::Finite(p) => base_relators("finite", p.relators.clone()),
            Presentation::Recursive(p) => p.relators.clone(),
            Presentation::Countable(p) => p.relators.clone(),
        }
    }

    /// True for classes whose relator set is only seen through bounded
    /// prefixes, which makes nontriviality refutations provisional.
    pub fn is_stream_backed(&self) -> bool {
        !matches!(self, Presentation::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&FinitePresentation> {
        match self {
            Presentation::Finite(p) => Some(p),
            _ => None,
        }
    }
}

impl From<FinitePresentation> for Presentation {
    fn from(p: FinitePresentation) -> Presentation {
        Presentation::Finite(p)
    }
}

impl From<RecursivePresentation> for Presentation {
    fn from(p: RecursivePresentation) -> Presentation {
        Presentation::Recursive(p)
    }
}

impl From<CountablePresentation> for Presentation {
    fn from(p: CountablePresentation) -> Presentation {
        Presentation::Countable(p)
    }
}

fn translate(w: &Word, map: impl Fn(u64) -> u64) -> Word {
    Word::from_letters(
        w.letters()
            .iter()
            .map(|l| crate::words::Letter::new(map(l.gen.0), l.sign)),
    )
}

/// Free product of finitely many presentations: disjoint union of generators
/// and relators. Finite-alphabet parts are renumbered by offset; if any part
/// is countably generated the pairing translation of [`free_product_stream`]
/// is used instead. The result's class is the weakest among the parts and
/// generator names are reset to the defaults.
pub fn free_product(parts: &[Presentation]) -> Presentation {
    if parts.iter().any(|p| matches!(p, Presentation::Countable(_))) {
        let vec: Vec<Presentation> = parts.to_vec();
        let stream = Restartable::new("parts", move || vec.clone().into_iter());
        return Presentation::Countable(free_product_stream(stream));
    }
    if let Some(finites) = parts
        .iter()
        .map(|p| p.as_finite())
        .collect::<Option<Vec<_>>>()
    {
        let mut gens = 0u64;
        let mut relators = Vec::new();
        for p in finites {
            let offset = gens;
            gens += p.gens;
            relators.extend(p.relators.iter().map(|r| translate(r, |g| g + offset)));
        }
        return Presentation::Finite(FinitePresentation::new(gens, relators).expect("offsets"));
    }
    // Finite and recursive parts: offsets plus a round-robin interleave.
    let mut gens = 0u64;
    let mut offsets = Vec::new();
    for p in parts {
        offsets.push(gens);
        gens += match p {
            Presentation::Finite(q) => q.gens,
            Presentation::Recursive(q) => q.gens,
            Presentation::Countable(_) => unreachable!(),
        };
    }
    let parts: Vec<Presentation> = parts.to_vec();
    let stream = Restartable::new("free product", move || {
        RoundRobin::new(
            parts
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let offset = offsets[i];
                    let iter = p.relator_stream().iter();
                    TranslatedPart {
                        part: i as u64,
                        emitted: 0,
                        iter,
                        map: Box::new(move |g| g + offset),
                    }
                })
                .collect(),
        )
    });
    Presentation::Recursive(RecursivePresentation::new(gens, stream))
}

struct TranslatedPart {
    part: u64,
    emitted: u64,
    iter: Box<dyn Iterator<Item = TaggedRelator> + Send>,
    map: Box<dyn Fn(u64) -> u64 + Send>,
}

impl TranslatedPart {
    fn next_translated(&mut self) -> Option<TaggedRelator> {
        let item = self.iter.next()?;
        let out = TaggedRelator {
            word: translate(&item.word, &self.map),
            provenance: Provenance::Part {
                part: self.part,
                index: self.emitted,
            },
        };
        self.emitted += 1;
        Some(out)
    }
}

struct RoundRobin {
    parts: Vec<TranslatedPart>,
    done: Vec<bool>,
    cursor: usize,
}

impl RoundRobin {
    fn new(parts: Vec<TranslatedPart>) -> RoundRobin {
        let done = vec![false; parts.len()];
        RoundRobin {
            parts,
            done,
            cursor: 0,
        }
    }
}

impl Iterator for RoundRobin {
    type Item = TaggedRelator;

    fn next(&mut self) -> Option<TaggedRelator> {
        let n = self.parts.len();
        if n == 0 {
            return None;
        }
        for _ in 0..n {
            let i = self.cursor;
            self.cursor = (self.cursor + 1) % n;
            if self.done[i] {
                continue;
            }
            match self.parts[i].next_translated() {
                Some(item) => return Some(item),
                None => self.done[i] = true,
            }
        }
        if self.done.iter().all(|&d| d) {
            None
        } else {
            self.next()
        }
    }
}

/// Free product of a deterministic stream of presentations (finite,
/// recursive, or countable parts). Generator j of part i becomes the global
/// generator `cantor_pair(i, j)`; relators are dovetailed diagonally — at
/// stage s, each part i <= s emits its next untranslated relator.
pub fn free_product_stream(parts: Restartable<Presentation>) -> CountablePresentation {
    let stream = Restartable::new("free product stream", move || DovetailParts {
        source: parts.iter(),
        source_done: false,
        parts: Vec::new(),
        stage: 0,
        within: 0,
        pending_exhausted: 0,
    });
    CountablePresentation::new(stream)
}

struct DovetailParts {
    source: Box<dyn Iterator<Item = Presentation> + Send>,
    source_done: bool,
    parts: Vec<Option<TranslatedPart>>,
    stage: u64,
    within: usize,
    pending_exhausted: usize,
}

impl Iterator for DovetailParts {
    type Item = TaggedRelator;

    fn next(&mut self) -> Option<TaggedRelator> {
        loop {
            // Open the next part when a new stage begins.
            if self.within == 0 && !self.source_done {
                match self.source.next() {
                    Some(p) => {
                        let part = self.parts.len() as u64;
                        let iter = p.relator_stream().iter();
                        self.parts.push(Some(TranslatedPart {
                            part,
                            emitted: 0,
                            iter,
                            map: Box::new(move |g| cantor_pair(part, g)),
                        }));
                    }
                    None => self.source_done = true,
                }
            }
            if self.parts.is_empty() {
                return None;
            }
            if self.within >= self.parts.len() {
                self.stage += 1;
                self.within = 0;
                if self.pending_exhausted == self.parts.len() && self.source_done {
                    return None;
                }
                self.pending_exhausted = 0;
                continue;
            }
            let i = self.within;
            self.within += 1;
            if let Some(part) = self.parts[i].as_mut() {
                match part.next_translated() {
                    Some(item) => return Some(item),
                    None => {
                        self.parts[i] = None;
                    }
                }
            }
            if self.parts[i].is_none() {
                self.pending_exhausted += 1;
            }
        }
    }
}

/// The k-torsion universal quotient presentation: the base relators
/// interleaved with w^k for every word w over the alphabet, in enumeration
/// order. Rejects k = 0.
pub fn k_torsion_quotient(
    p: &RecursivePresentation,
    k: u64,
) -> Result<RecursivePresentation, PresentationError> {
    if k == 0 {
        return Err(PresentationError::ZeroExponent);
    }
    let gens = p.gens;
    let powers = Restartable::new("powers", move || {
        WordEnumerator::new(Alphabet::Finite(gens))
            .enumerate()
            .map(move |(rank, w)| TaggedRelator {
                word: w.pow(k as i64),
                provenance: Provenance::TorsionPower {
                    rank: rank as u64,
                    exponent: k,
                },
            })
    });
    let stream = interleave("k-torsion", p.relators.clone(), powers);
    Ok(RecursivePresentation {
        gens,
        names: p.names.clone(),
        relators: stream,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{parse_word, Letter};

    fn fp(gens: u64, rels: &[&str]) -> FinitePresentation {
        let names = GeneratorNames::Default;
        FinitePresentation::new(
            gens,
            rels.iter().map(|r| parse_word(r, &names).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn finite_presentation_validates_generators() {
        let bad = FinitePresentation::new(1, vec![Word::generator(3)]);
        assert!(matches!(
            bad,
            Err(PresentationError::GeneratorOutOfRange { relator: 0, gen: 3 })
        ));
    }

    #[test]
    fn free_product_of_finite_parts() {
        let a = fp(1, &["x0^2"]);
        let b = fp(1, &["x0^3"]);
        let q = free_product(&[a.into(), b.into()]);
        let q = q.as_finite().unwrap();
        assert_eq!(q.generator_count(), 2);
        let names = GeneratorNames::Default;
        assert_eq!(
            q.relators(),
            &[
                parse_word("x0^2", &names).unwrap(),
                parse_word("x1^3", &names).unwrap()
            ]
        );
    }

    #[test]
    fn free_product_with_trivial_part() {
        let a = fp(2, &["x0 x1"]);
        let trivial = fp(0, &[]);
        let q = free_product(&[a.clone().into(), trivial.into()]);
        let q = q.as_finite().unwrap();
        assert_eq!(q.generator_count(), 2);
        assert_eq!(q.relators(), a.relators());
    }

    #[test]
    fn free_product_of_free_parts_has_no_relators() {
        let q = free_product(&[fp(1, &[]).into(), fp(1, &[]).into()]);
        let q = q.as_finite().unwrap();
        assert_eq!(q.generator_count(), 2);
        assert!(q.relators().is_empty());
    }

    #[test]
    fn free_product_offsets_compose_associatively() {
        let p = fp(1, &["x0^2"]);
        let q = fp(2, &["x0 x1^-1"]);
        let r = fp(1, &["x0^5"]);
        let left = free_product(&[
            free_product(&[p.clone().into(), q.clone().into()]),
            r.clone().into(),
        ]);
        let right = free_product(&[
            p.into(),
            free_product(&[q.into(), r.into()]),
        ]);
        assert_eq!(left.as_finite().unwrap(), right.as_finite().unwrap());
    }

    #[test]
    fn free_product_stream_constant_parts() {
        let part = fp(1, &["x0^2"]);
        let parts = Restartable::new("const", move || {
            std::iter::repeat(Presentation::from(part.clone()))
        });
        let q = free_product_stream(parts);
        let prefix = q.relators().prefix(6);
        // Part i's only generator becomes cantor_pair(i, 0).
        for (idx, item) in prefix.iter().enumerate() {
            match item.provenance {
                Provenance::Part { part, index } => {
                    assert_eq!(index, 0, "each part has one relator");
                    let g = cantor_pair(part, 0);
                    assert_eq!(item.word, Word::generator(g).pow(2), "item {idx}");
                }
                ref other => panic!("unexpected provenance {other:?}"),
            }
        }
        // Diagonal dovetail: parts 0, 0 exhausted -> 1, then 2, ...
        let tags: Vec<u64> = prefix
            .iter()
            .map(|t| match t.provenance {
                Provenance::Part { part, .. } => part,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(tags, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn free_product_stream_empty_parts_emit_nothing() {
        let parts = Restartable::new("frees", || {
            (0..3).map(|_| Presentation::from(FinitePresentation::new(1, vec![]).unwrap()))
        });
        let q = free_product_stream(parts);
        assert!(q.relators().prefix(10).is_empty());
    }

    #[test]
    fn free_product_stream_is_deterministic() {
        let parts = Restartable::new("mix", || {
            (0..4).map(|i| {
                Presentation::from(
                    FinitePresentation::new(1, vec![Word::generator(0).pow(i + 2)]).unwrap(),
                )
            })
        });
        let q = free_product_stream(parts);
        assert_eq!(q.relators().prefix(12), q.relators().prefix(12));
    }

    #[test]
    fn k_torsion_relators_are_base_or_powers() {
        let p = fp(2, &["x0 x1 x0^-1 x1^-1"]).to_recursive();
        let q = k_torsion_quotient(&p, 2).unwrap();
        for item in q.relators().prefix(40) {
            match item.provenance {
                Provenance::Base { index } => {
                    assert_eq!(item.word, p.relators().prefix(index + 1)[index].word);
                }
                Provenance::TorsionPower { rank, exponent } => {
                    assert_eq!(exponent, 2);
                    let w = crate::words::enumerate_words(Alphabet::Finite(2), rank);
                    assert_eq!(item.word, w.pow(2));
                }
                ref other => panic!("unexpected provenance {other:?}"),
            }
        }
    }

    #[test]
    fn k_torsion_rejects_zero() {
        let p = fp(1, &[]).to_recursive();
        assert!(matches!(
            k_torsion_quotient(&p, 0),
            Err(PresentationError::ZeroExponent)
        ));
    }

    #[test]
    fn exponent_one_quotient_kills_generators() {
        let p = fp(2, &[]).to_recursive();
        let q = k_torsion_quotient(&p, 1).unwrap();
        let words: Vec<Word> = q.relators().prefix(12).into_iter().map(|t| t.word).collect();
        assert!(words.contains(&Word::generator(0)));
        assert!(words.contains(&Word::generator(1)));
    }

    #[test]
    fn translate_is_capture_free() {
        let w = Word::from_letters([Letter::pos(0), Letter::neg(1)]);
        let t = translate(&w, |g| g + 5);
        assert_eq!(t, Word::from_letters([Letter::pos(5), Letter::neg(6)]));
    }
}
