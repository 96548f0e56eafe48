//! The named uniform constructions: generator-killing presentations driven
//! by r.e. sets, the staged torsion-order realizer for Σ⁰₂-style predicates,
//! prime coding, free-generator witnesses inside F₂, and the universal
//! torsion-free assembly.
//!
//! Every construction returns a countably generated presentation whose
//! relator stream replays the defining events deterministically; provenance
//! tags record which event fired each relator, so tests and the provenance
//! sidecar can audit a prefix without re-deriving it.

use crate::computability::{
    crush, is_prime, nth_prime, prime_index, sigma2_eval, ReSet, Sigma2Predicate,
};
use crate::presentations::{
    free_product_stream, CountablePresentation, FinitePresentation, Presentation, Provenance,
    Restartable, TaggedRelator,
};
use crate::torsion::{torsion_free_quotient, FactorCompleteSet, FactorError};
use crate::words::Word;
use num_bigint::BigUint;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotPrime {
    pub value: u64,
}

impl fmt::Display for NotPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} is not prime", self.value)
    }
}

impl std::error::Error for NotPrime {}

/// The presentation `< x0, x1, ... | x_i^p for all i, x_j for j in the crush
/// of W >`: a free product of copies of C_p while W is finite, trivial when
/// W is infinite. Round t emits `x_t^p` and then any kills the crushed
/// enumeration reaches with t diagonals of dovetail volume.
pub fn build_pn(p: u64, s: &ReSet) -> Result<CountablePresentation, NotPrime> {
    if !is_prime(p) {
        return Err(NotPrime { value: p });
    }
    let crushed = crush(s);
    let stream = Restartable::new("pn", move || {
        let mut cursor = crushed.cursor();
        let mut kills = 0u64;
        (0u64..).flat_map(move |round| {
            let mut out = vec![TaggedRelator {
                word: Word::generator(round).pow(p as i64),
                provenance: Provenance::GeneratorPower {
                    gen: round,
                    exponent: p,
                },
            }];
            // The dovetail advances every fourth round: diagonals get
            // quadratically pricier, relators stay cheap.
            if round % 4 == 0 {
                for j in cursor.advance() {
                    out.push(TaggedRelator {
                        word: Word::generator(j),
                        provenance: Provenance::GeneratorKill { gen: j, cause: kills },
                    });
                    kills += 1;
                }
            }
            out
        })
    });
    Ok(CountablePresentation::new(stream))
}

/// The prime-coded complement realizer: generators x_i for i >= 2 with
/// `x_i^{p_i} = e`, plus `x_j = e` for every j the set enumerates. The
/// certified torsion orders are the primes `p_i` with i >= 2 outside W,
/// one-one equivalent to the complement of W above 1.
pub fn build_qn_complement(s: &ReSet) -> CountablePresentation {
    let s = s.clone();
    let stream = Restartable::new("qcomp", move || {
        let mut cursor = s.cursor();
        let mut kills = 0u64;
        (0u64..).flat_map(move |round| {
            let mut out = Vec::new();
            let i = round + 2;
            let p = nth_prime(i).expect("index >= 2");
            out.push(TaggedRelator {
                word: Word::generator(i).pow(p as i64),
                provenance: Provenance::GeneratorPower { gen: i, exponent: p },
            });
            if round % 4 == 0 {
                for j in cursor.advance() {
                    out.push(TaggedRelator {
                        word: Word::generator(j),
                        provenance: Provenance::GeneratorKill { gen: j, cause: kills },
                    });
                    kills += 1;
                }
            }
            out
        })
    });
    CountablePresentation::new(stream)
}

/// The staged torsion-order realizer. For each i > 1 a live generator
/// `x_{p_i^m}` holds the relator `x_{p_i^m}^i = e`; evaluating the predicate
/// along phi(i, m, 1), phi(i, m, 2), ... and hitting a value other than 1
/// kills the live generator and advances to stage m+1. All i are dovetailed:
/// round t activates i = t and performs one evaluation for every active i.
///
/// When the set described by the predicate is factor-complete the presented
/// group realizes exactly that set as its torsion orders. Factor
/// completeness is not checkable here; a violation shifts the realized set
/// to the factor closure, nothing worse.
///
/// A budget-exhausted evaluation emits a final `BudgetExhausted` marker and
/// ends the stream — a countable construction stream ending at all is the
/// loud signal that the predicate broke its totality promise.
pub fn build_qphi(pred: &Sigma2Predicate) -> CountablePresentation {
    let pred = pred.clone();
    let stream = Restartable::new("qphi", move || QphiIter {
        pred: pred.clone(),
        active: Vec::new(),
        next_index: 2,
        buffer: std::collections::VecDeque::new(),
        dead: false,
    });
    CountablePresentation::new(stream)
}

struct QphiState {
    index: u64,
    stage: u64,
    next_n: u64,
}

struct QphiIter {
    pred: Sigma2Predicate,
    active: Vec<QphiState>,
    next_index: u64,
    buffer: std::collections::VecDeque<TaggedRelator>,
    dead: bool,
}

impl QphiIter {
    fn live_relator(&self, i: u64, stage: u64) -> TaggedRelator {
        let gen = nth_prime_power(i, stage);
        TaggedRelator {
            word: Word::generator(gen).pow(i as i64),
            provenance: Provenance::StageLive { index: i, stage },
        }
    }
}

/// p_i^m, the generator index carrying stage m of column i.
fn nth_prime_power(i: u64, m: u64) -> u64 {
    let p = nth_prime(i).expect("i >= 2");
    let mut v = 1u64;
    for _ in 0..m {
        v = v.checked_mul(p).expect("desk-scale prime power");
    }
    v
}

impl Iterator for QphiIter {
    type Item = TaggedRelator;

    fn next(&mut self) -> Option<TaggedRelator> {
        loop {
            if let Some(item) = self.buffer.pop_front() {
                return Some(item);
            }
            if self.dead {
                return None;
            }
            // One round: activate the next column, then one evaluation per
            // active column.
            let i = self.next_index;
            self.next_index += 1;
            self.active.push(QphiState {
                index: i,
                stage: 1,
                next_n: 1,
            });
            let live = self.live_relator(i, 1);
            self.buffer.push_back(live);
            for state in self.active.iter_mut() {
                match sigma2_eval(&self.pred, state.index, state.stage, state.next_n) {
                    Ok(1) => {
                        state.next_n += 1;
                    }
                    Ok(_) => {
                        let dying = nth_prime_power(state.index, state.stage);
                        self.buffer.push_back(TaggedRelator {
                            word: Word::generator(dying),
                            provenance: Provenance::StageKill {
                                index: state.index,
                                stage: state.stage,
                                at: state.next_n,
                            },
                        });
                        state.stage += 1;
                        state.next_n = 1;
                        let gen = nth_prime_power(state.index, state.stage);
                        self.buffer.push_back(TaggedRelator {
                            word: Word::generator(gen).pow(state.index as i64),
                            provenance: Provenance::StageLive {
                                index: state.index,
                                stage: state.stage,
                            },
                        });
                    }
                    Err(e) => {
                        self.buffer.push_back(TaggedRelator {
                            word: Word::identity(),
                            provenance: Provenance::BudgetExhausted {
                                a: e.a,
                                m: e.m,
                                n: e.n,
                            },
                        });
                        self.dead = true;
                        break;
                    }
                }
            }
        }
    }
}

/// Prime coding of a set of indices (1-based): `{p_i | i in X}`. The image
/// is factor-complete outright, being a set of primes, and the coding is
/// invertible.
pub fn prime_code(xs: impl IntoIterator<Item = u64>) -> Result<FactorCompleteSet, FactorError> {
    let mut primes = Vec::new();
    for i in xs {
        if i == 0 {
            return Err(FactorError { value: 0 });
        }
        primes.push(nth_prime(i).expect("i >= 1"));
    }
    FactorCompleteSet::closure_of(primes)
}

/// Inverse of [`prime_code`] on sets of primes.
pub fn prime_decode(set: &FactorCompleteSet) -> Option<Vec<u64>> {
    set.members().iter().map(|&p| prime_index(p)).collect()
}

/// `{b^-i a b^i | 1 <= i <= n}`, a free basis of an F_n inside F_2
/// (generators a = x0, b = x1).
pub fn f2_universal_basis(n: u64) -> Vec<Word> {
    let a = Word::generator(0);
    let b = Word::generator(1);
    (1..=n).map(|i| a.conjugate(&b.pow(i as i64))).collect()
}

/// The universal torsion-free assembly: the free product, over the
/// enumeration of all finite presentations, of their torsion-free universal
/// quotients. With `limit` set only the first `limit` presentations enter
/// (desk-scale mode); unlimited mode streams lazily.
pub fn universal_tf_assembly(limit: Option<u64>) -> CountablePresentation {
    let parts: Restartable<Presentation> = Restartable::new("tf parts", move || {
        let mut rank = BigUint::from(0u32);
        let mut produced = 0u64;
        std::iter::from_fn(move || {
            if let Some(lim) = limit {
                if produced >= lim {
                    return None;
                }
            }
            let p = crate::presentations::enumerate_finite_presentations(&rank);
            rank += 1u32;
            produced += 1;
            Some(torsion_free_quotient(&Presentation::Finite(p)))
        })
    });
    free_product_stream(parts)
}

/// Declared extension point for a finite-presentation embedding that
/// preserves the set of torsion orders: a countably generated recursive
/// presentation goes in, a finite presentation and the generator embedding
/// come out, with `torord` unchanged. No implementation ships; the
/// constructions stop at the countably generated stage.
pub trait TorsionPreservingEmbedding {
    /// Embed the presented group of `p` into a finitely presented group
    /// with the same torsion orders. The returned map sends each generator
    /// index of `p` to its image word over the output's generators.
    fn embed(&self, p: &CountablePresentation) -> (FinitePresentation, Vec<(u64, Word)>);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::computability::we_enumerate;
    use crate::presentations::Provenance;
    use crate::programs;
    use crate::torsion::{is_factor_complete, torord_bounded};
    use crate::words::{Alphabet, WordEnumerator};

    #[test]
    fn pn_rejects_composite_modulus() {
        let s = ReSet::domain_of(programs::diverge());
        assert!(matches!(build_pn(4, &s), Err(NotPrime { value: 4 })));
        assert!(build_pn(3, &s).is_ok());
    }

    #[test]
    fn pn_with_empty_set_is_pure_powers() {
        let s = ReSet::domain_of(programs::diverge());
        let q = build_pn(2, &s).unwrap();
        for (i, rel) in q.relators().prefix(12).into_iter().enumerate() {
            assert_eq!(rel.word, Word::generator(i as u64).pow(2));
            assert!(matches!(
                rel.provenance,
                Provenance::GeneratorPower { exponent: 2, .. }
            ));
        }
    }

    #[test]
    fn pn_finite_set_torord_is_exactly_p() {
        // W = {5, 9} crushes to {0, 1}: generators x0, x1 die, the rest give
        // C_3 free factors.
        let s = ReSet::domain_of(programs::halt_iff_in_5_9());
        let q = build_pn(3, &s).unwrap();
        let report = torord_bounded(&Presentation::Countable(q), 10, 60_000);
        let got: Vec<u64> = report.snapshot().members().iter().copied().collect();
        assert_eq!(got, vec![3]);
        for cert in report.certified.values() {
            assert!(cert.provisional, "stream-backed refutations are provisional");
        }
    }

    #[test]
    fn pn_total_set_kills_everything() {
        let s = ReSet::domain_of(programs::always_halt());
        let q = build_pn(3, &s).unwrap();
        let p = Presentation::Countable(q);
        // Every small generator is eventually proved trivial.
        for j in 0..5 {
            let v = crate::wordproblem::prove_trivial(&p, &Word::generator(j), 100_000).unwrap();
            assert_eq!(v.status, crate::wordproblem::Status::Proved, "x{j}");
        }
        let report = torord_bounded(&p, 10, 60_000);
        assert!(report.certified.is_empty());
    }

    #[test]
    fn qphi_constant_true_never_advances() {
        let pred = Sigma2Predicate::new(programs::one_fn(), 10_000);
        let q = build_qphi(&pred);
        for rel in q.relators().prefix(10) {
            match rel.provenance {
                Provenance::StageLive { index, stage } => {
                    assert_eq!(stage, 1);
                    let p = nth_prime(index).unwrap();
                    assert_eq!(rel.word, Word::generator(p).pow(index as i64));
                }
                ref other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn qphi_constant_false_kills_every_stage() {
        let pred = Sigma2Predicate::new(programs::zero_fn(), 10_000);
        let q = build_qphi(&pred);
        let prefix = q.relators().prefix(40);
        let kills = prefix
            .iter()
            .filter(|r| matches!(r.provenance, Provenance::StageKill { .. }))
            .count();
        assert!(kills >= 10, "kills should pile up, saw {kills}");
        let report = torord_bounded(
            &Presentation::Countable(q),
            8,
            200_000,
        );
        assert!(report.certified.is_empty());
    }

    #[test]
    fn qphi_budget_violation_is_loud() {
        let pred = Sigma2Predicate::new(programs::diverge(), 100);
        let q = build_qphi(&pred);
        let prefix = q.relators().prefix(10);
        assert!(prefix
            .iter()
            .any(|r| matches!(r.provenance, Provenance::BudgetExhausted { .. })));
        // The stream ends after the marker.
        let longer = q.relators().prefix(1000);
        assert_eq!(longer.len(), prefix.len());
    }

    #[test]
    fn qphi_membership_fixture_realizes_the_set() {
        let pred = Sigma2Predicate::new(programs::membership_2346(), 2_000_000);
        let q = build_qphi(&pred);
        let report = torord_bounded(&Presentation::Countable(q), 12, 300_000);
        let got: Vec<u64> = report.snapshot().members().iter().copied().collect();
        assert_eq!(got, vec![2, 3, 4, 6]);
        assert!(is_factor_complete(report.snapshot().members()));
    }

    #[test]
    fn qcomp_complement_indices() {
        // W = {3}: index 3 (prime 5) is killed; 2 -> 3 and 4 -> 7 survive.
        let s = ReSet::domain_of(programs::halt_iff_in(&[3]));
        let q = build_qn_complement(&s);
        let report = torord_bounded(&Presentation::Countable(q), 8, 60_000);
        let got: Vec<u64> = report.snapshot().members().iter().copied().collect();
        assert_eq!(got, vec![3, 7]);
    }

    #[test]
    fn qcomp_empty_set_keeps_all_primes() {
        let s = ReSet::domain_of(programs::diverge());
        let q = build_qn_complement(&s);
        let report = torord_bounded(&Presentation::Countable(q), 6, 60_000);
        let got: Vec<u64> = report.snapshot().members().iter().copied().collect();
        assert_eq!(got, vec![3, 5]);
    }

    #[test]
    fn prime_code_roundtrip() {
        let sets: [&[u64]; 3] = [&[1, 2, 3], &[], &[4, 10]];
        for xs in sets {
            let coded = prime_code(xs.iter().copied()).unwrap();
            assert!(is_factor_complete(coded.members()));
            let mut back = prime_decode(&coded).unwrap();
            back.sort_unstable();
            assert_eq!(back, xs.to_vec());
        }
        assert_eq!(
            prime_code([1, 2, 3])
                .unwrap()
                .members()
                .iter()
                .copied()
                .collect::<Vec<_>>(),
            vec![2, 3, 5]
        );
        assert!(prime_code([0]).is_err());
    }

    #[test]
    fn f2_basis_words() {
        let names = crate::words::GeneratorNames::Named(vec!["a".into(), "b".into()]);
        let basis = f2_universal_basis(2);
        assert_eq!(crate::words::format_word(&basis[0], &names), "b^-1 a b");
        assert_eq!(
            crate::words::format_word(&basis[1], &names),
            "b^-1 b^-1 a b^2"
        );
    }

    #[test]
    fn f2_basis_is_free() {
        // All reduced words of length <= 5 over the rank-2 basis expand to
        // pairwise distinct elements of F2.
        let basis = f2_universal_basis(2);
        let mut expanded = std::collections::HashSet::new();
        let mut count = 0usize;
        for w in WordEnumerator::new(Alphabet::Finite(2)) {
            if w.len() > 5 {
                break;
            }
            count += 1;
            let image = w
                .letters()
                .iter()
                .map(|l| {
                    let base = &basis[l.gen.0 as usize];
                    match l.sign {
                        crate::words::Sign::Pos => base.clone(),
                        crate::words::Sign::Neg => base.inverse(),
                    }
                })
                .fold(Word::identity(), |acc, w| acc.concat(&w));
            assert!(expanded.insert(image), "collision under {w}");
        }
        assert_eq!(count, 485);
    }

    #[test]
    fn assembly_blocks_never_mix() {
        let q = universal_tf_assembly(Some(4));
        for rel in q.relators().prefix(300) {
            if let Provenance::Part { part, .. } = rel.provenance {
                for l in rel.word.letters() {
                    let (i, _) = crate::computability::cantor_unpair(l.gen.0);
                    assert_eq!(i, part, "letter crosses blocks");
                }
            } else {
                panic!("assembly relators must carry part tags");
            }
        }
    }

    #[test]
    fn assembly_is_deterministic() {
        let q1 = universal_tf_assembly(Some(3));
        let q2 = universal_tf_assembly(Some(3));
        assert_eq!(q1.relators().prefix(120), q2.relators().prefix(120));
    }

    #[test]
    fn assembly_certifies_no_torsion() {
        let q = universal_tf_assembly(Some(5));
        let report = torord_bounded(&Presentation::Countable(q), 6, 150_000);
        assert!(report.certified.is_empty());
    }

    #[test]
    fn crush_feeds_pn_kills_in_order() {
        let s = ReSet::domain_of(programs::halt_iff_in_5_9());
        let crushed_prefix = we_enumerate(&crush(&s), 5);
        assert_eq!(crushed_prefix, vec![0, 1]);
        let q = build_pn(3, &s).unwrap();
        let kills: Vec<u64> = q
            .relators()
            .prefix(80)
            .into_iter()
            .filter_map(|r| match r.provenance {
                Provenance::GeneratorKill { gen, .. } => Some(gen),
                _ => None,
            })
            .collect();
        assert_eq!(kills, vec![0, 1]);
    }
}
