//! Torsion detection, the torsion tower, the torsion-free universal
//! quotient, and bounded certified torsion orders.
//!
//! Everything here is a deterministic restartable stream or a pure bounded
//! computation. Torsion of a presented group is only semi-decidable, so the
//! streams interleave proof attempts over (word rank, exponent, fuel) and
//! emit a witness whenever an attempt closes. Rounds that close nothing emit
//! an empty-word tick, which keeps every stream total at every finite fuel.
//!
//! The tower realizes the iterated construction: stage 1 detects torsion of
//! the presented group and enumerates the normal closure of what it finds;
//! stage i+1 does the same against the quotient by everything the lower
//! stages have emitted so far. Each emission is sound for its stage; the
//! fair dovetail over stages gives completeness in the limit.

use crate::presentations::{
    interleave, Presentation, Provenance, RecursivePresentation, Restartable, TaggedRelator,
};
use crate::words::{Alphabet, Word, WordEnumerator};
use crate::wordproblem::closure::{closure_search, RelatorFeed, SliceFeed, StreamFeed};
use crate::wordproblem::{
    find_exact_order_witness, Certificate, Derivation, HomWitness, Status,
};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

/// A certified torsion element: the embedded derivation proves
/// `word^exponent = e` in the presentation the witness was produced for
/// (at tower stage `stage`).
#[derive(Debug, Clone)]
pub struct TorsionWitness {
    pub word: Word,
    pub exponent: u64,
    pub proof: Certificate,
    pub stage: u32,
}

impl TorsionWitness {
    /// Recheck: the derivation multiplies out to exactly `word^exponent`.
    pub fn verify(&self) -> bool {
        match &self.proof {
            Certificate::TrivialityDerivation(d) => d.verifies(&self.word.pow(self.exponent as i64)),
            _ => false,
        }
    }
}

/// An item of the torsion tower stream.
#[derive(Debug, Clone)]
pub struct TowerItem {
    pub stage: u32,
    pub word: Word,
    pub origin: TowerOrigin,
}

#[derive(Debug, Clone)]
pub enum TowerOrigin {
    /// Detected directly: `word^exponent` was proved trivial in the stage's
    /// quotient presentation.
    Detected { exponent: u64, derivation: Derivation },
    /// The inverse of an emission of the same stage.
    Inverse,
    /// A conjugate of an already-emitted word of the same stage.
    Conjugate,
    /// A product of two already-emitted words of stages at most this one.
    Product,
    /// Keepalive: a proof-attempt round finished without a new emission.
    Tick,
}

impl TowerItem {
    pub fn is_tick(&self) -> bool {
        matches!(self.origin, TowerOrigin::Tick)
    }

    fn to_relator(&self) -> TaggedRelator {
        TaggedRelator {
            word: self.word.clone(),
            provenance: if self.is_tick() {
                Provenance::TowerTick { stage: self.stage }
            } else {
                Provenance::Tower { stage: self.stage }
            },
        }
    }
}

/// Per-(rank, exponent) bookkeeping of one stage's detector. A failed cell
/// backs off exponentially — it is retried once its round counter doubles,
/// or as soon as the relator view has grown since the failure — so hopeless
/// cells don't dominate the budget while nothing provable waits longer than
/// it has to.
struct Detector {
    rounds: usize,
    words: Vec<Word>,
    word_enum: WordEnumerator,
    proved: HashSet<(usize, u64)>,
    retry_at: std::collections::HashMap<(usize, u64), (usize, usize)>,
}

impl Detector {
    fn new(alphabet: Alphabet) -> Detector {
        Detector {
            rounds: 0,
            words: Vec::new(),
            word_enum: WordEnumerator::new(alphabet),
            proved: HashSet::new(),
            retry_at: std::collections::HashMap::new(),
        }
    }

    /// One detection round over the given relator view. Calls `tick` per
    /// attempted cell and returns the newly proved (word, exponent,
    /// derivation) triples in deterministic order.
    fn round(
        &mut self,
        alphabet: Alphabet,
        view: &[TaggedRelator],
        mut tick: impl FnMut(),
    ) -> Vec<(Word, u64, Derivation)> {
        self.rounds += 1;
        let t = self.rounds;
        while self.words.len() <= t {
            match self.word_enum.next() {
                Some(w) => self.words.push(w),
                None => break,
            }
        }
        let fuel = 64 * t as u64;
        let mut found = Vec::new();
        for rank in 0..=t.min(self.words.len().saturating_sub(1)) {
            for exponent in 1..=t as u64 {
                let cell = (rank, exponent);
                if self.proved.contains(&cell) {
                    continue;
                }
                if rank == 0 {
                    // The empty word is torsion at every exponent; it only
                    // ever contributes ticks.
                    self.proved.insert(cell);
                    tick();
                    continue;
                }
                if let Some(&(at, seen_len)) = self.retry_at.get(&cell) {
                    if t < at && view.len() <= seen_len {
                        // Backed off; the dovetail still visited the cell.
                        tick();
                        continue;
                    }
                }
                let target = self.words[rank].pow(exponent as i64);
                let mut feed = SliceFeed(view);
                let verdict = closure_search(alphabet, &mut feed, &target, fuel);
                tick();
                if verdict.status == Status::Proved {
                    self.proved.insert(cell);
                    let derivation = match verdict.certificate {
                        Some(Certificate::TrivialityDerivation(d)) => d,
                        _ => unreachable!("closure proofs carry derivations"),
                    };
                    found.push((self.words[rank].clone(), exponent, derivation));
                } else {
                    self.retry_at.insert(cell, (2 * t, view.len()));
                }
            }
        }
        found
    }
}

/// R.e. stream of certified torsion elements of the presented group:
/// dovetails proof attempts over (word rank, exponent, fuel) and emits a
/// witness exactly when an attempt proves `w^n = e`. Rounds are separated by
/// `(empty word, 1)` witnesses so the stream is total even for torsion-free
/// groups.
pub fn torsion_stream(p: &Presentation) -> Restartable<TorsionWitness> {
    let p = p.clone();
    Restartable::new("torsion", move || TorsionIter {
        alphabet: p.alphabet(),
        feed: StreamFeed::new(&p.relator_stream()),
        detector: Detector::new(p.alphabet()),
        buffer: Vec::new(),
    })
}

struct TorsionIter {
    alphabet: Alphabet,
    feed: StreamFeed,
    detector: Detector,
    buffer: Vec<TorsionWitness>,
}

impl Iterator for TorsionIter {
    type Item = TorsionWitness;

    fn next(&mut self) -> Option<TorsionWitness> {
        loop {
            if let Some(w) = self.buffer.pop() {
                return Some(w);
            }
            let t = self.detector.rounds + 1;
            let view = self.feed.fetch(64 * (t + 1)).to_vec();
            let mut ticks = 0usize;
            let found = self.detector.round(self.alphabet, &view, || ticks += 1);
            let mut out: Vec<TorsionWitness> = found
                .into_iter()
                .map(|(word, exponent, d)| TorsionWitness {
                    word,
                    exponent,
                    proof: Certificate::TrivialityDerivation(d),
                    stage: 1,
                })
                .collect();
            // One identity witness per attempted cell keeps the stream
            // total however sparse the real finds are.
            out.extend((0..ticks.max(1)).map(|_| TorsionWitness {
                word: Word::identity(),
                exponent: 1,
                proof: Certificate::TrivialityDerivation(Derivation::empty()),
                stage: 1,
            }));
            out.reverse();
            self.buffer = out;
        }
    }
}

/// The torsion tower stream: emits (stage, word) pairs with words known to
/// lie in the stage's iterated torsion closure. Stage s starts running at
/// global round s; stage i's detector works against the base relators
/// interleaved with everything stages below i have emitted so far.
pub fn tor_tower_stream(p: &Presentation) -> Restartable<TowerItem> {
    let p = p.clone();
    Restartable::new("tower", move || TowerIter::new(&p))
}

struct StageState {
    detector: Detector,
}

struct TowerIter {
    alphabet: Alphabet,
    base: StreamFeed,
    /// All non-tick emissions in order, with their stages.
    log: Vec<(u32, Word)>,
    seen: HashSet<Word>,
    stages: Vec<StageState>,
    round: usize,
    conj_cursor: u64,
    prod_cursor: u64,
    buffer: std::collections::VecDeque<TowerItem>,
}

impl TowerIter {
    fn new(p: &Presentation) -> TowerIter {
        TowerIter {
            alphabet: p.alphabet(),
            base: StreamFeed::new(&p.relator_stream()),
            log: Vec::new(),
            seen: HashSet::new(),
            stages: Vec::new(),
            round: 0,
            conj_cursor: 0,
            prod_cursor: 0,
            buffer: std::collections::VecDeque::new(),
        }
    }

    /// Base relators interleaved with the lower stages' emissions, as the
    /// stage-i detector's relator view.
    fn view_for_stage(&mut self, stage_idx: usize, base_len: usize) -> Vec<TaggedRelator> {
        let base = self.base.fetch(base_len).to_vec();
        let lower: Vec<TaggedRelator> = self
            .log
            .iter()
            .filter(|(s, _)| (*s as usize) <= stage_idx)
            .map(|(s, w)| TaggedRelator {
                word: w.clone(),
                provenance: Provenance::Tower { stage: *s },
            })
            .collect();
        let mut out = Vec::with_capacity(base.len() + lower.len());
        let mut bi = base.into_iter();
        let mut li = lower.into_iter();
        loop {
            match (bi.next(), li.next()) {
                (Some(b), Some(l)) => {
                    out.push(b);
                    out.push(l);
                }
                (Some(b), None) => out.push(b),
                (None, Some(l)) => out.push(l),
                (None, None) => break,
            }
        }
        out
    }

    fn emit(&mut self, stage: u32, word: Word, origin: TowerOrigin) {
        // The stage sets are closed under inversion, so each emission brings
        // its inverse along at the same stage.
        let inverse = word.inverse();
        self.emit_one(stage, word, origin);
        self.emit_one(stage, inverse, TowerOrigin::Inverse);
    }

    fn emit_one(&mut self, stage: u32, word: Word, origin: TowerOrigin) {
        if word.is_identity() || self.seen.contains(&word) {
            return;
        }
        self.seen.insert(word.clone());
        self.log.push((stage, word.clone()));
        self.buffer.push_back(TowerItem {
            stage,
            word,
            origin,
        });
    }

    fn run_round(&mut self) {
        self.round += 1;
        let t = self.round;
        if self.stages.len() < t {
            self.stages.push(StageState {
                detector: Detector::new(self.alphabet),
            });
        }
        for idx in 0..self.stages.len() {
            let stage_no = (idx + 1) as u32;
            let t_loc = self.stages[idx].detector.rounds + 1;
            let view = self.view_for_stage(idx, 64 * (t_loc + 1));
            let mut ticks = 0usize;
            let found = {
                let stage = &mut self.stages[idx];
                stage.detector.round(self.alphabet, &view, || ticks += 1)
            };
            for (word, exponent, derivation) in found {
                self.emit(
                    stage_no,
                    word,
                    TowerOrigin::Detected {
                        exponent,
                        derivation,
                    },
                );
            }
            for _ in 0..ticks {
                self.buffer.push_back(TowerItem {
                    stage: stage_no,
                    word: Word::identity(),
                    origin: TowerOrigin::Tick,
                });
            }
        }
        // Normal-closure expansion over the whole log, one conjugate and one
        // product per round. A conjugate keeps its source's stage; a product
        // takes the larger of its factors' stages, so everything lands at
        // the smallest stage that can justify it.
        if !self.log.is_empty() {
            let z = self.conj_cursor;
            self.conj_cursor += 1;
            let (wi, crank) = crate::computability::cantor_unpair(z);
            let wi = (wi as usize) % self.log.len();
            let (stage, word) = self.log[wi].clone();
            let c = crate::words::enumerate_words(self.alphabet, crank);
            self.emit(stage, word.conjugate(&c), TowerOrigin::Conjugate);
        }
        if self.log.len() >= 2 {
            let z = self.prod_cursor;
            self.prod_cursor += 1;
            let (a, b) = crate::computability::cantor_unpair(z);
            let a = (a as usize) % self.log.len();
            let b = (b as usize) % self.log.len();
            let (sa, wa) = self.log[a].clone();
            let (sb, wb) = self.log[b].clone();
            self.emit(sa.max(sb), wa.concat(&wb), TowerOrigin::Product);
        }
    }
}

impl Iterator for TowerIter {
    type Item = TowerItem;

    fn next(&mut self) -> Option<TowerItem> {
        loop {
            if let Some(item) = self.buffer.pop_front() {
                return Some(item);
            }
            self.run_round();
        }
    }
}

/// The torsion-free universal quotient presentation: the base relators
/// interleaved with the tower's emissions on the same generating set, so the
/// base relator set is contained in the result's relator set.
pub fn torsion_free_quotient(p: &Presentation) -> Presentation {
    let tower = tor_tower_stream(p);
    let tower_rels: Restartable<TaggedRelator> = Restartable::new("tower relators", move || {
        tower.iter().map(|item| item.to_relator())
    });
    let stream = interleave("torsion-free quotient", p.relator_stream(), tower_rels);
    match p {
        Presentation::Finite(fp) => Presentation::Recursive(RecursivePresentation::new(
            fp.generator_count(),
            stream,
        )),
        Presentation::Recursive(rp) => {
            Presentation::Recursive(RecursivePresentation::new(rp.generator_count(), stream))
        }
        Presentation::Countable(_) => Presentation::Countable(
            crate::presentations::CountablePresentation::new(stream),
        ),
    }
}

/// A finite set of naturals >= 2 closed under nontrivial divisors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FactorCompleteSet {
    members: BTreeSet<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorError {
    pub value: u64,
}

impl fmt::Display for FactorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} is below 2", self.value)
    }
}

impl std::error::Error for FactorError {}

impl FactorCompleteSet {
    /// Builds from arbitrary members >= 2 by closing under divisors.
    pub fn closure_of(members: impl IntoIterator<Item = u64>) -> Result<Self, FactorError> {
        let mut out = BTreeSet::new();
        for n in members {
            if n < 2 {
                return Err(FactorError { value: n });
            }
            for d in 2..=n {
                if n % d == 0 {
                    out.insert(d);
                }
            }
        }
        Ok(FactorCompleteSet { members: out })
    }

    pub fn members(&self) -> &BTreeSet<u64> {
        &self.members
    }

    pub fn contains(&self, n: u64) -> bool {
        self.members.contains(&n)
    }
}

/// Nontrivial divisors of n, including n, excluding 1.
pub fn factor_closure(n: u64) -> Result<FactorCompleteSet, FactorError> {
    if n < 2 {
        return Err(FactorError { value: n });
    }
    FactorCompleteSet::closure_of([n])
}

/// True iff the set is closed under nontrivial divisors (and has no members
/// below 2).
pub fn is_factor_complete(set: &BTreeSet<u64>) -> bool {
    set.iter().all(|&n| {
        n >= 2 && (2..=n).filter(|d| n % d == 0).all(|d| set.contains(&d))
    })
}

/// Certificate that some element has this exact order: a triviality proof
/// for `word^order` and a finite-quotient image of exact order `order`,
/// which simultaneously refutes `word^d = e` for every proper divisor d.
#[derive(Debug, Clone)]
pub struct OrderCertificate {
    pub order: u64,
    pub word: Word,
    pub witness: TorsionWitness,
    pub hom: HomWitness,
    pub refuted_divisors: Vec<u64>,
    pub provisional: bool,
}

impl OrderCertificate {
    /// Independent recheck of both halves against a relator prefix.
    pub fn verify(&self, relators: &[TaggedRelator]) -> bool {
        if !self.witness.verify() {
            return false;
        }
        let checked = &relators[..self.hom.checked_relators.min(relators.len())];
        if !self.hom.kills_relators(checked) {
            return false;
        }
        self.hom.image_of(&self.word).order() == self.order
    }
}

/// Result of a bounded torsion-order certification run.
#[derive(Debug, Clone, Default)]
pub struct TorordReport {
    pub certified: BTreeMap<u64, OrderCertificate>,
    pub fuel_spent: u64,
}

impl TorordReport {
    /// The certified orders; factor-complete by construction, since every
    /// certificate's divisors are certified from the same witness.
    pub fn snapshot(&self) -> FactorCompleteSet {
        FactorCompleteSet {
            members: self.certified.keys().copied().collect(),
        }
    }
}

/// Sound lower approximation of the torsion orders in [2, bound]: an order
/// is certified when some word's power is proved trivial and a
/// finite-quotient witness pins the exact order. Candidate words come from
/// the cyclically-reduced primitive roots of relator-prefix entries plus the
/// first word ranks; the schedule, prefix growth, and per-round budgets are
/// all deterministic in `fuel`.
pub fn torord_bounded(p: &Presentation, bound: u64, fuel: u64) -> TorordReport {
    let mut report = TorordReport::default();
    if bound < 2 {
        return report;
    }
    let alphabet = p.alphabet();
    let mut feed = StreamFeed::new(&p.relator_stream());
    let provisional = p.is_stream_backed();
    let mut budget = fuel;
    let mut candidates: Vec<(Word, u64)> = Vec::new();
    let mut candidate_set: HashSet<(Word, u64)> = HashSet::new();
    let mut proved: BTreeMap<(Word, u64), Derivation> = BTreeMap::new();
    let mut word_enum = WordEnumerator::new(alphabet);
    let mut enum_cache: Vec<Word> = Vec::new();
    let mut t: usize = 0;
    let mut paid_len: u64 = 0;
    while budget > 0 {
        t += 1;
        let check_len = 64 * t + 64;
        let prefix = feed.fetch(check_len).to_vec();
        // Producing deep stream prefixes costs real work in the producer;
        // charge quadratically so fuel bounds the whole run.
        let len = prefix.len() as u64;
        if len > paid_len {
            budget = budget.saturating_sub((len * len - paid_len * paid_len) / 32);
            paid_len = len;
        }
        // Harvest candidates from relators: a relator conj(root^k, u) makes
        // conj(root, u)^(k/m) a candidate of order m for every divisor m.
        for rel in prefix.iter().take(16 * t) {
            budget = budget.saturating_sub(1);
            let (core, u) = rel.word.cyclic_decompose();
            let (root, k) = core.primitive_power();
            if k < 2 {
                continue;
            }
            let base = root.conjugate(&u);
            for m in 2..=k.min(bound) {
                if k % m != 0 {
                    continue;
                }
                let cand = (base.pow((k / m) as i64), m);
                if candidate_set.insert(cand.clone()) {
                    candidates.push(cand);
                }
            }
        }
        // Generic candidates from the word enumeration.
        while enum_cache.len() < t {
            match word_enum.next() {
                Some(w) => enum_cache.push(w),
                None => break,
            }
        }
        for w in enum_cache.iter().take(t) {
            if w.is_identity() {
                continue;
            }
            for m in 2..=bound.min(t as u64) {
                let cand = (w.clone(), m);
                if candidate_set.insert(cand.clone()) {
                    candidates.push(cand);
                }
            }
        }
        // Attempts, in candidate discovery order. Once an order is
        // certified no other candidate for it is tried.
        for (v, m) in candidates.clone() {
            if budget == 0 {
                break;
            }
            if report.certified.contains_key(&m) {
                continue;
            }
            let key = (v.clone(), m);
            if !proved.contains_key(&key) {
                let target = v.pow(m as i64);
                let proof_fuel = (64 * t as u64).min(budget);
                let mut sfeed = SliceFeed(&prefix);
                let verdict = closure_search(alphabet, &mut sfeed, &target, proof_fuel);
                budget = budget.saturating_sub(verdict.fuel_spent.max(1));
                match verdict.status {
                    Status::Proved => {
                        let d = match verdict.certificate {
                            Some(Certificate::TrivialityDerivation(d)) => d,
                            _ => unreachable!(),
                        };
                        proved.insert(key.clone(), d);
                    }
                    _ => continue,
                }
            }
            let hom_fuel = (4096 * t as u64).min(budget);
            let (found, spent) =
                find_exact_order_witness(&prefix, &v, m, bound as usize, hom_fuel);
            budget = budget.saturating_sub(spent.max(1));
            if let Some(hom) = found {
                let derivation = proved.get(&(v.clone(), m)).cloned().unwrap();
                certify_with_divisors(
                    &mut report,
                    &v,
                    m,
                    derivation,
                    hom,
                    provisional,
                );
            }
        }
    }
    report.fuel_spent = fuel - budget;
    report
}

/// Certifies order m for word v and every nontrivial divisor d via
/// `v^(m/d)`, reusing the same derivation (the expanded power is the same
/// reduced word) and the same homomorphism witness.
fn certify_with_divisors(
    report: &mut TorordReport,
    v: &Word,
    m: u64,
    derivation: Derivation,
    hom: HomWitness,
    provisional: bool,
) {
    for d in 2..=m {
        if m % d != 0 || report.certified.contains_key(&d) {
            continue;
        }
        let word = v.pow((m / d) as i64);
        let witness = TorsionWitness {
            word: word.clone(),
            exponent: d,
            proof: Certificate::TrivialityDerivation(derivation.clone()),
            stage: 1,
        };
        debug_assert!(witness.verify());
        debug_assert_eq!(hom.image_of(&word).order(), d);
        let refuted: Vec<u64> = std::iter::once(1)
            .chain((2..d).filter(|x| d % x == 0))
            .collect();
        report.certified.insert(
            d,
            OrderCertificate {
                order: d,
                word,
                witness,
                hom: hom.clone(),
                refuted_divisors: refuted,
                provisional,
            },
        );
    }
}
