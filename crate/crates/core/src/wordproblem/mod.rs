//! Semi-decision and decision engines for the word problem, with
//! machine-checkable certificates.
//!
//! Soundness is enforced at the type level as far as it goes — a `Proved` or
//! `Refuted` verdict always carries a certificate, and every certificate
//! variant has an independent recheck that does not trust the engine that
//! produced it.

pub(crate) mod closure;
mod coset;
mod cyclics;
mod kb;
mod quotient;

pub use closure::{prove_trivial, EngineError};
pub use coset::{element_order_in_table, todd_coxeter, CosetTable, TableError, TcOutcome};
pub use cyclics::{torord_oracle_cyclics, CyclicsError};
pub use kb::{kb_complete, KbOutcome, RewriteSystem, Rule};
pub use quotient::{find_exact_order_witness, refute_trivial_finite_quotient};

use crate::presentations::TaggedRelator;
use crate::words::{format_word, GeneratorNames, Word};
use std::collections::BTreeMap;
use std::fmt;

/// Outcome of a fuel-bounded engine run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Proved,
    Refuted,
    Unknown,
}

/// A verdict plus its audit trail. `provisional` marks refutations of
/// stream-backed presentations, where only a bounded relator prefix could be
/// verified.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub status: Status,
    pub fuel_spent: u64,
    pub certificate: Option<Certificate>,
    pub provisional: bool,
}

impl Verdict {
    pub fn proved(fuel_spent: u64, certificate: Certificate) -> Verdict {
        Verdict {
            status: Status::Proved,
            fuel_spent,
            certificate: Some(certificate),
            provisional: false,
        }
    }

    pub fn refuted(fuel_spent: u64, certificate: Certificate, provisional: bool) -> Verdict {
        Verdict {
            status: Status::Refuted,
            fuel_spent,
            certificate: Some(certificate),
            provisional,
        }
    }

    pub fn unknown(fuel_spent: u64) -> Verdict {
        Verdict {
            status: Status::Unknown,
            fuel_spent,
            certificate: None,
            provisional: false,
        }
    }
}

/// One factor `c^-1 r^sign c` of a triviality derivation. The relator word
/// is embedded so the certificate rechecks without replaying the stream; the
/// index records where in the presentation's enumeration it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationFactor {
    pub conjugator: Word,
    pub relator: Word,
    pub relator_index: usize,
    pub sign: i8,
}

impl DerivationFactor {
    fn value(&self) -> Word {
        let base = if self.sign >= 0 {
            self.relator.clone()
        } else {
            self.relator.inverse()
        };
        base.conjugate(&self.conjugator)
    }
}

/// A word expressed as a product of conjugates of relators.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Derivation {
    pub factors: Vec<DerivationFactor>,
}

impl Derivation {
    pub fn empty() -> Derivation {
        Derivation::default()
    }

    /// Multiplies the factors out, freely reduced.
    pub fn expand(&self) -> Word {
        let mut acc = Word::identity();
        for f in &self.factors {
            acc = acc.concat(&f.value());
        }
        acc
    }

    pub fn verifies(&self, target: &Word) -> bool {
        self.expand() == *target
    }

    /// Derivation of the inverse word: factors reversed, signs flipped.
    pub fn inverse(&self) -> Derivation {
        Derivation {
            factors: self
                .factors
                .iter()
                .rev()
                .map(|f| DerivationFactor {
                    conjugator: f.conjugator.clone(),
                    relator: f.relator.clone(),
                    relator_index: f.relator_index,
                    sign: -f.sign,
                })
                .collect(),
        }
    }

    /// Derivation of `by^-1 * w * by` from a derivation of w.
    pub fn conjugated(&self, by: &Word) -> Derivation {
        Derivation {
            factors: self
                .factors
                .iter()
                .map(|f| DerivationFactor {
                    conjugator: f.conjugator.concat(by),
                    relator: f.relator.clone(),
                    relator_index: f.relator_index,
                    sign: f.sign,
                })
                .collect(),
        }
    }

    pub fn then(mut self, other: Derivation) -> Derivation {
        self.factors.extend(other.factors);
        self
    }
}

/// A permutation of {0, ..., n-1} by its image vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm {
            images: (0..n).collect(),
        }
    }

    /// The standard n-cycle (0 1 ... n-1) inside Sym(degree).
    pub fn cycle(n: usize, degree: usize) -> Perm {
        assert!(n <= degree && n >= 1);
        let mut images: Vec<usize> = (0..degree).collect();
        for (i, img) in images.iter_mut().enumerate().take(n) {
            *img = (i + 1) % n;
        }
        Perm { images }
    }

    pub fn from_images(images: Vec<usize>) -> Perm {
        Perm { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// self then other.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm {
            images: self.images.iter().map(|&v| other.images[v]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v] = i;
        }
        Perm { images }
    }

    pub fn pow(&self, e: u64) -> Perm {
        let mut acc = Perm::identity(self.degree());
        for _ in 0..e {
            acc = acc.compose(self);
        }
        acc
    }

    /// Order as the lcm of cycle lengths.
    pub fn order(&self) -> u64 {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut order: u64 = 1;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.images[p];
                len += 1;
            }
            order = num_integer::lcm(order, len);
        }
        order
    }

    /// Cycle notation; the identity prints as `()`.
    pub fn cycle_notation(&self) -> String {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.images[start];
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.images[p];
            }
            out.push('(');
            out.push_str(
                &cycle
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

/// A homomorphism to Sym(degree) given by generator images; generators not
/// listed map to the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomWitness {
    pub degree: usize,
    pub images: BTreeMap<u64, Perm>,
    /// How many relators of the presentation's enumeration were verified to
    /// map to the identity.
    pub checked_relators: usize,
}

impl HomWitness {
    pub fn image_of(&self, w: &Word) -> Perm {
        let mut acc = Perm::identity(self.degree);
        for l in w.letters() {
            let base = match self.images.get(&l.gen.0) {
                Some(p) => p.clone(),
                None => Perm::identity(self.degree),
            };
            let factor = match l.sign {
                crate::words::Sign::Pos => base,
                crate::words::Sign::Neg => base.inverse(),
            };
            acc = acc.compose(&factor);
        }
        acc
    }

    /// True when every relator in the slice maps to the identity.
    pub fn kills_relators(&self, relators: &[TaggedRelator]) -> bool {
        relators
            .iter()
            .all(|r| self.image_of(&r.word).is_identity())
    }
}

/// Machine-checkable evidence attached to a non-Unknown verdict.
#[derive(Debug, Clone)]
pub enum Certificate {
    /// The word written as a product of conjugates of relators.
    TrivialityDerivation(Derivation),
    /// A closed coset table; triviality or nontriviality is read off the
    /// word's action on it.
    CosetTable(CosetTable),
    /// A finite-quotient homomorphism with the word's image nontrivial.
    FiniteQuotientWitness(HomWitness),
    /// A confluent rewriting system (rules carry their own derivations) and
    /// the word's nontrivial normal form. Used for refutations by completed
    /// Knuth-Bendix systems, where none of the other shapes fits.
    ConfluentRewriting(RewriteCertificate),
}

#[derive(Debug, Clone)]
pub struct RewriteCertificate {
    pub system: RewriteSystem,
    pub normal_form: Word,
}

/// Serializes a certificate in the line-oriented text format.
pub fn write_certificate(cert: &Certificate, names: &GeneratorNames) -> String {
    let mut out = String::new();
    match cert {
        Certificate::TrivialityDerivation(d) => {
            out.push_str("derivation:\n");
            for f in &d.factors {
                out.push_str(&format!(
                    "conj {} rel {} sign {}\n",
                    format_word(&f.conjugator, names),
                    f.relator_index,
                    if f.sign >= 0 { "+1" } else { "-1" }
                ));
            }
        }
        Certificate::CosetTable(t) => {
            out.push_str("table:\n");
            out.push_str(&t.render_rows());
        }
        Certificate::FiniteQuotientWitness(h) => {
            out.push_str(&format!("homwitness: degree {}\n", h.degree));
            for (gen, perm) in &h.images {
                out.push_str(&format!("{}: {}\n", names.name(*gen), perm.cycle_notation()));
            }
        }
        Certificate::ConfluentRewriting(rc) => {
            out.push_str("rewriting:\n");
            for rule in rc.system.rules() {
                out.push_str(&format!(
                    "rule {} -> {}\n",
                    kb::format_string(&rule.lhs, names),
                    kb::format_string(&rule.rhs, names)
                ));
            }
            out.push_str(&format!("nf: {}\n", format_word(&rc.normal_form, names)));
        }
    }
    out
}

/// Independent recheck of a certificate against the claim it supports.
///
/// `relators` is the presentation prefix the certificate's indices refer to
/// (longer is fine). For a derivation the claim is `word = e`; for the other
/// variants the claim is read from `claimed_trivial`.
pub fn verify_certificate(
    cert: &Certificate,
    relators: &[TaggedRelator],
    word: &Word,
    claimed_trivial: bool,
) -> bool {
    match cert {
        Certificate::TrivialityDerivation(d) => {
            if !claimed_trivial || !d.verifies(word) {
                return false;
            }
            // Factors must quote the presentation honestly.
            d.factors.iter().all(|f| {
                relators
                    .get(f.relator_index)
                    .map(|r| r.word == f.relator)
                    .unwrap_or(false)
            })
        }
        Certificate::CosetTable(t) => {
            if !t.is_complete() || !t.is_consistent(relators) {
                return false;
            }
            match t.permutation_of(word) {
                Ok(p) => p.is_identity() == claimed_trivial,
                Err(_) => false,
            }
        }
        Certificate::FiniteQuotientWitness(h) => {
            if claimed_trivial {
                return false;
            }
            let checked = &relators[..h.checked_relators.min(relators.len())];
            h.kills_relators(checked) && !h.image_of(word).is_identity()
        }
        Certificate::ConfluentRewriting(rc) => {
            if claimed_trivial {
                return false;
            }
            rc.system.verify(relators)
                && rc.system.normal_form(word) == rc.normal_form
                && !rc.normal_form.is_identity()
        }
    }
}

/// Step-budget meter shared by the engines. One unit is one elementary step:
/// a relator comparison, a coset definition, a rewrite, or one
/// conjugate-product extension.
#[derive(Debug, Clone)]
pub(crate) struct Fuel {
    budget: u64,
    spent: u64,
}

impl Fuel {
    pub(crate) fn new(budget: u64) -> Fuel {
        Fuel { budget, spent: 0 }
    }

    /// Spends n units; false when the budget is gone.
    pub(crate) fn try_spend(&mut self, n: u64) -> bool {
        if self.spent + n > self.budget {
            self.spent = self.budget;
            return false;
        }
        self.spent += n;
        true
    }

    pub(crate) fn spent(&self) -> u64 {
        self.spent
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.spent >= self.budget
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Proved => write!(f, "proved"),
            Status::Refuted => write!(f, "refuted"),
            Status::Unknown => write!(f, "unknown"),
        }
    }
}
