//! Restartable deterministic streams and relator provenance.
//!
//! A stream is a pure producer: every call to `iter()` starts an identical
//! enumeration from the beginning. Streams may be infinite, may repeat
//! items, and must yield each of their first n items in finite time.

use crate::words::Word;
use std::fmt;
use std::sync::Arc;

/// A restartable, deterministic stream of values.
#[derive(Clone)]
pub struct Restartable<T> {
    description: String,
    producer: Arc<dyn Fn() -> Box<dyn Iterator<Item = T> + Send> + Send + Sync>,
}

impl<T: 'static> Restartable<T> {
    pub fn new<F, I>(description: impl Into<String>, make: F) -> Restartable<T>
    where
        F: Fn() -> I + Send + Sync + 'static,
        I: Iterator<Item = T> + Send + 'static,
    {
        Restartable {
            description: description.into(),
            producer: Arc::new(move || Box::new(make())),
        }
    }

    pub fn from_vec(description: impl Into<String>, items: Vec<T>) -> Restartable<T>
    where
        T: Clone + Send + Sync,
    {
        Restartable::new(description, move || items.clone().into_iter())
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// A fresh enumeration from the start.
    pub fn iter(&self) -> Box<dyn Iterator<Item = T> + Send> {
        (self.producer)()
    }

    pub fn prefix(&self, n: usize) -> Vec<T> {
        self.iter().take(n).collect()
    }
}

impl<T> fmt::Debug for Restartable<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Restartable({})", self.description)
    }
}

/// Where a relator in a constructed stream came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// One of the presentation's own relators.
    Base { index: usize },
    /// A w^k relator of a k-torsion quotient; `rank` is w's enumeration rank.
    TorsionPower { rank: u64, exponent: u64 },
    /// A torsion-tower word detected or generated at this tower stage.
    Tower { stage: u32 },
    /// Keepalive tick from a tower stage round that found nothing new; the
    /// word is always empty.
    TowerTick { stage: u32 },
    /// Relator of part `part` translated into a free product.
    Part { part: u64, index: u64 },
    /// An x_g^e relator of a generator-power construction.
    GeneratorPower { gen: u64, exponent: u64 },
    /// An x_g = e relator fired by the `cause`-th enumeration event.
    GeneratorKill { gen: u64, cause: u64 },
    /// A live staged relator x_{p_i^m}^i = e.
    StageLive { index: u64, stage: u64 },
    /// A staged kill x_{p_i^m} = e fired by the predicate returning a value
    /// other than 1 at inner coordinate `at`.
    StageKill { index: u64, stage: u64, at: u64 },
    /// Terminal marker: a predicate evaluation exhausted its step budget at
    /// (a, m, n). The stream ends right after this item.
    BudgetExhausted { a: u64, m: u64, n: u64 },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Base { index } => write!(f, "base {index}"),
            Provenance::TorsionPower { rank, exponent } => {
                write!(f, "power rank {rank} exp {exponent}")
            }
            Provenance::Tower { stage } => write!(f, "tower stage {stage}"),
            Provenance::TowerTick { stage } => write!(f, "tower tick stage {stage}"),
            Provenance::Part { part, index } => write!(f, "part {part} rel {index}"),
            Provenance::GeneratorPower { gen, exponent } => {
                write!(f, "gen {gen} power {exponent}")
            }
            Provenance::GeneratorKill { gen, cause } => write!(f, "kill gen {gen} cause {cause}"),
            Provenance::StageLive { index, stage } => write!(f, "live i {index} stage {stage}"),
            Provenance::StageKill { index, stage, at } => {
                write!(f, "stagekill i {index} stage {stage} at {at}")
            }
            Provenance::BudgetExhausted { a, m, n } => {
                write!(f, "budget exhausted at ({a}, {m}, {n})")
            }
        }
    }
}

/// A relator together with the event that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedRelator {
    pub word: Word,
    pub provenance: Provenance,
}

impl TaggedRelator {
    pub fn base(index: usize, word: Word) -> TaggedRelator {
        TaggedRelator {
            word,
            provenance: Provenance::Base { index },
        }
    }
}

/// Deterministic restartable enumeration of relators.
pub type RelatorStream = Restartable<TaggedRelator>;

/// Relators of a finite list, tagged `base 0`, `base 1`, ...
pub fn base_relators(description: impl Into<String>, relators: Vec<Word>) -> RelatorStream {
    Restartable::new(description, move || {
        relators
            .clone()
            .into_iter()
            .enumerate()
            .map(|(i, w)| TaggedRelator::base(i, w))
    })
}

/// Strict alternation of two streams: a0, b0, a1, b1, ... Once one side is
/// exhausted the other continues alone.
pub fn interleave<T: 'static + Send>(
    description: impl Into<String>,
    a: Restartable<T>,
    b: Restartable<T>,
) -> Restartable<T> {
    Restartable::new(description, move || {
        Alternate {
            a: a.iter(),
            b: b.iter(),
            take_a: true,
            a_done: false,
            b_done: false,
        }
    })
}

struct Alternate<T> {
    a: Box<dyn Iterator<Item = T> + Send>,
    b: Box<dyn Iterator<Item = T> + Send>,
    take_a: bool,
    a_done: bool,
    b_done: bool,
}

impl<T> Iterator for Alternate<T> {
    type Item = T;

    fn next(&mut self) -> Option<T> {
        loop {
            if self.a_done && self.b_done {
                return None;
            }
            let want_a = (self.take_a && !self.a_done) || self.b_done;
            self.take_a = !self.take_a;
            if want_a {
                match self.a.next() {
                    Some(v) => return Some(v),
                    None => self.a_done = true,
                }
            } else {
                match self.b.next() {
                    Some(v) => return Some(v),
                    None => self.b_done = true,
                }
            }
        }
    }
}
