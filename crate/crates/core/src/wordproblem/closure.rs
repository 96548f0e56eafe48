//! Semi-decider for word triviality by normal-closure search.
//!
//! The target is proved trivial by exhibiting it as a product of conjugates
//! of relators. Search runs in stages; stage t looks at a longer relator
//! prefix (64t for conjugate matching, 8t inside products), more conjugators
//! (4t), deeper products (t factors), and longer intermediate words. Within
//! a stage the product search is best-first by intermediate word length
//! (ties in insertion order), which reaches cancelling derivations in a
//! fraction of the steps a plain breadth-first layer order would need.
//! Sound always; complete in the limit: any true derivation is inside some
//! stage's bounds, so enough fuel finds it.

use super::{Certificate, Derivation, DerivationFactor, Fuel, Verdict};
use crate::presentations::{Presentation, RelatorStream, TaggedRelator};
use crate::words::{Alphabet, Word, WordEnumerator};
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

/// The query word uses generators the presentation does not have.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineError {
    pub gen: u64,
}

impl std::fmt::Display for EngineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "word uses generator x{} outside the alphabet", self.gen)
    }
}

impl std::error::Error for EngineError {}

/// Lazily materialized prefix of a relator enumeration.
pub(crate) trait RelatorFeed {
    /// As much of the first n relators as exists.
    fn fetch(&mut self, n: usize) -> &[TaggedRelator];
}

pub(crate) struct StreamFeed {
    iter: Box<dyn Iterator<Item = TaggedRelator> + Send>,
    cache: Vec<TaggedRelator>,
    done: bool,
}

impl StreamFeed {
    pub(crate) fn new(stream: &RelatorStream) -> StreamFeed {
        StreamFeed {
            iter: stream.iter(),
            cache: Vec::new(),
            done: false,
        }
    }

    pub(crate) fn cached(&self) -> &[TaggedRelator] {
        &self.cache
    }
}

impl RelatorFeed for StreamFeed {
    fn fetch(&mut self, n: usize) -> &[TaggedRelator] {
        while self.cache.len() < n && !self.done {
            match self.iter.next() {
                Some(item) => self.cache.push(item),
                None => self.done = true,
            }
        }
        &self.cache[..n.min(self.cache.len())]
    }
}

pub(crate) struct SliceFeed<'a>(pub &'a [TaggedRelator]);

impl RelatorFeed for SliceFeed<'_> {
    fn fetch(&mut self, n: usize) -> &[TaggedRelator] {
        &self.0[..n.min(self.0.len())]
    }
}

/// Proves `w = e` in the presented group within `fuel` elementary steps.
/// Sound: `Proved` comes with a derivation that multiplies out to w.
/// Never refutes.
pub fn prove_trivial(p: &Presentation, w: &Word, fuel: u64) -> Result<Verdict, EngineError> {
    if let (Alphabet::Finite(n), Some(g)) = (p.alphabet(), w.max_generator()) {
        if g >= n {
            return Err(EngineError { gen: g });
        }
    }
    let mut feed = StreamFeed::new(&p.relator_stream());
    Ok(closure_search(p.alphabet(), &mut feed, w, fuel))
}

/// Engine core, shared with the torsion machinery (which feeds it quotient
/// presentations as in-memory slices).
pub(crate) fn closure_search(
    alphabet: Alphabet,
    feed: &mut dyn RelatorFeed,
    target: &Word,
    fuel: u64,
) -> Verdict {
    if target.is_identity() {
        return Verdict::proved(0, Certificate::TrivialityDerivation(Derivation::empty()));
    }
    let mut meter = Fuel::new(fuel);
    let mut conjugators: Vec<Word> = Vec::new();
    let mut conj_enum = WordEnumerator::new(alphabet);
    let mut stage: usize = 1;
    loop {
        if !meter.try_spend(1) {
            return Verdict::unknown(meter.spent());
        }
        // Phase 1: is the target a conjugate of a single relator (or its
        // inverse)? Cheap scan over a long prefix.
        let prefix = feed.fetch(64 * stage);
        for (idx, rel) in prefix.iter().enumerate() {
            if !meter.try_spend(1) {
                return Verdict::unknown(meter.spent());
            }
            if rel.word.is_identity() {
                continue;
            }
            if let Some(d) = conjugate_match(target, &rel.word, idx) {
                debug_assert!(d.verifies(target));
                return Verdict::proved(meter.spent(), Certificate::TrivialityDerivation(d));
            }
        }
        // Phase 2: product search. Multiply the target on the right by
        // conjugated relators, aiming for the empty word.
        while conjugators.len() < 2 * stage {
            if !meter.try_spend(1) {
                return Verdict::unknown(meter.spent());
            }
            match conj_enum.next() {
                Some(c) => conjugators.push(c),
                None => break,
            }
        }
        let edge_rels: Vec<(usize, &Word)> = prefix
            .iter()
            .enumerate()
            .take(8 * stage)
            .filter(|(_, r)| !r.word.is_identity())
            .map(|(i, r)| (i, &r.word))
            .collect();
        let max_rel_len = edge_rels.iter().map(|(_, r)| r.len()).max().unwrap_or(0);
        let conj_limit = conjugators.len().min(2 * stage);
        let len_cap = target.len() + 4 * stage + max_rel_len;
        if let Some(d) = product_search(
            target,
            &edge_rels,
            &conjugators[..conj_limit],
            len_cap,
            &mut meter,
        ) {
            debug_assert!(d.verifies(target));
            return Verdict::proved(meter.spent(), Certificate::TrivialityDerivation(d));
        }
        if meter.exhausted() {
            return Verdict::unknown(meter.spent());
        }
        stage += 1;
    }
}

/// Match `target = c^-1 relator^sign c` for some c, through cyclic
/// decomposition: conjugates of a word are exactly the conjugates of the
/// rotations of its cyclically reduced core.
fn conjugate_match(target: &Word, relator: &Word, idx: usize) -> Option<Derivation> {
    let (core_t, u_t) = target.cyclic_decompose();
    let (core_r, u_r) = relator.cyclic_decompose();
    if core_t.len() != core_r.len() || core_t.is_identity() {
        return None;
    }
    for sign in [1i8, -1] {
        let base = if sign > 0 {
            core_r.clone()
        } else {
            core_r.inverse()
        };
        for j in 0..base.len() {
            // rotation_j(base) = conj(base, base[..j])
            let rotated = Word::from_letters(
                base.letters()[j..]
                    .iter()
                    .chain(base.letters()[..j].iter())
                    .copied(),
            );
            if rotated != core_t {
                continue;
            }
            let s = Word::from_letters(base.letters()[..j].iter().copied());
            // target = conj(core_t, u_t) = conj(base, s * u_t)
            //        = conj(relator^sign, u_r^-1 * s * u_t).
            let conjugator = u_r.inverse().concat(&s).concat(&u_t);
            let d = Derivation {
                factors: vec![DerivationFactor {
                    conjugator,
                    relator: relator.clone(),
                    relator_index: idx,
                    sign,
                }],
            };
            if d.verifies(target) {
                return Some(d);
            }
        }
    }
    None
}

struct Edge {
    relator_index: usize,
    relator: Word,
    conjugator: Word,
    sign: i8,
    /// conj(relator^sign, conjugator), the word multiplied in.
    value: Word,
}

/// Product search from the target toward the empty word, multiplying on the
/// right by `conj(r^sign, c)`. Best-first by current word length with FIFO
/// tie-breaking, no depth bound — cancelling derivations of any factor count
/// surface as soon as their shrinking intermediates do. Edge order is
/// relator-major, then conjugator, then sign, so the whole search is
/// deterministic.
fn product_search(
    target: &Word,
    relators: &[(usize, &Word)],
    conjugators: &[Word],
    len_cap: usize,
    meter: &mut Fuel,
) -> Option<Derivation> {
    if relators.is_empty() {
        return None;
    }
    let mut edges: Vec<Edge> = Vec::new();
    for (idx, r) in relators {
        for c in conjugators {
            for sign in [1i8, -1] {
                let base = if sign > 0 { (*r).clone() } else { r.inverse() };
                edges.push(Edge {
                    relator_index: *idx,
                    relator: (*r).clone(),
                    conjugator: c.clone(),
                    sign,
                    value: base.conjugate(c),
                });
            }
        }
    }
    let mut visited: HashMap<Word, Option<(Word, usize)>> = HashMap::new();
    let mut heap: BinaryHeap<Reverse<(usize, u64, Word)>> = BinaryHeap::new();
    let mut seq = 0u64;
    visited.insert(target.clone(), None);
    heap.push(Reverse((target.len(), seq, target.clone())));
    while let Some(Reverse((_, _, cur))) = heap.pop() {
        for (ei, edge) in edges.iter().enumerate() {
            if !meter.try_spend(1) {
                return None;
            }
            let next = cur.concat(&edge.value);
            if next.len() > len_cap || visited.contains_key(&next) {
                continue;
            }
            visited.insert(next.clone(), Some((cur.clone(), ei)));
            if next.is_identity() {
                return Some(reconstruct(&visited, &edges, &next));
            }
            seq += 1;
            heap.push(Reverse((next.len(), seq, next)));
        }
    }
    None
}

fn reconstruct(
    visited: &HashMap<Word, Option<(Word, usize)>>,
    edges: &[Edge],
    end: &Word,
) -> Derivation {
    // The path target -> ... -> e multiplied by f1, ..., fk in order, so
    // target = fk^-1 * ... * f1^-1: walk back to front, flipping signs.
    let mut applied: Vec<usize> = Vec::new();
    let mut cur = end.clone();
    while let Some(Some((prev, ei))) = visited.get(&cur) {
        applied.push(*ei);
        cur = prev.clone();
    }
    let factors = applied
        .into_iter()
        .map(|ei| {
            let e = &edges[ei];
            DerivationFactor {
                conjugator: e.conjugator.clone(),
                relator: e.relator.clone(),
                relator_index: e.relator_index,
                sign: -e.sign,
            }
        })
        .collect();
    Derivation { factors }
}
