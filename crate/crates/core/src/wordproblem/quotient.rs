//! Nontriviality refutation by homomorphism search into symmetric groups.
//!
//! The refuter is sound and never proves: a witness maps every checked
//! relator to the identity and the query word to a nontrivial permutation.
//! On finite presentations the whole relator set is checked and the verdict
//! is final; on stream-backed presentations only a prefix can be checked, so
//! the verdict is flagged provisional.
//!
//! Search order: degrees ascending; per degree, exhaustive lexicographic
//! enumeration of images for the word's support generators while the
//! assignment space is small, then targeted cycle assignments (every support
//! generator to the standard k-cycle, then each single generator). All other
//! generators map to the identity.

use super::closure::{RelatorFeed, SliceFeed, StreamFeed};
use super::{Certificate, Fuel, HomWitness, Perm, Verdict};
use crate::presentations::{Presentation, TaggedRelator};
use crate::words::Word;
use std::collections::BTreeMap;

const EXHAUSTIVE_LIMIT: u128 = 200_000;

fn support(w: &Word) -> Vec<u64> {
    let mut gens: Vec<u64> = w.letters().iter().map(|l| l.gen.0).collect();
    gens.sort_unstable();
    gens.dedup();
    gens
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// All permutations of degree k in lexicographic order of image vectors.
fn all_perms(k: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut images: Vec<usize> = (0..k).collect();
    loop {
        out.push(Perm::from_images(images.clone()));
        // Next lexicographic permutation.
        let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| images[i] < images[i + 1]) else {
            break;
        };
        let j = (i + 1..k).rev().find(|&j| images[j] > images[i]).unwrap();
        images.swap(i, j);
        images[i + 1..].reverse();
    }
    out
}

fn try_assignment(
    gens: &[u64],
    perms: &[Perm],
    degree: usize,
    relators: &[TaggedRelator],
    w: &Word,
    meter: &mut Fuel,
) -> Option<HomWitness> {
    let mut images = BTreeMap::new();
    for (g, p) in gens.iter().zip(perms) {
        if !p.is_identity() {
            images.insert(*g, p.clone());
        }
    }
    let hom = HomWitness {
        degree,
        images,
        checked_relators: relators.len(),
    };
    for r in relators {
        if !meter.try_spend(1) {
            return None;
        }
        if !hom.image_of(&r.word).is_identity() {
            return None;
        }
    }
    if !meter.try_spend(1) {
        return None;
    }
    if hom.image_of(w).is_identity() {
        return None;
    }
    Some(hom)
}

fn search_witness(
    relators: &[TaggedRelator],
    w: &Word,
    max_degree: usize,
    meter: &mut Fuel,
    want: impl Fn(&HomWitness) -> bool,
) -> Option<HomWitness> {
    let gens = support(w);
    if gens.is_empty() {
        return None;
    }
    for degree in 2..=max_degree {
        let space = factorial(degree).saturating_pow(gens.len() as u32);
        if space <= EXHAUSTIVE_LIMIT {
            let perms = all_perms(degree);
            let mut idx = vec![0usize; gens.len()];
            'assign: loop {
                if meter.exhausted() {
                    return None;
                }
                let chosen: Vec<Perm> = idx.iter().map(|&i| perms[i].clone()).collect();
                if let Some(h) = try_assignment(&gens, &chosen, degree, relators, w, meter) {
                    if want(&h) {
                        return Some(h);
                    }
                }
                // Odometer.
                for pos in (0..idx.len()).rev() {
                    idx[pos] += 1;
                    if idx[pos] < perms.len() {
                        continue 'assign;
                    }
                    idx[pos] = 0;
                }
                break;
            }
        } else {
            // Targeted candidates: all support generators on the standard
            // k-cycle, then each generator alone.
            let cyc = Perm::cycle(degree, degree);
            let mut candidates: Vec<Vec<Perm>> =
                vec![vec![cyc.clone(); gens.len()]];
            for solo in 0..gens.len() {
                let mut perms = vec![Perm::identity(degree); gens.len()];
                perms[solo] = cyc.clone();
                candidates.push(perms);
            }
            for chosen in candidates {
                if meter.exhausted() {
                    return None;
                }
                if let Some(h) = try_assignment(&gens, &chosen, degree, relators, w, meter) {
                    if want(&h) {
                        return Some(h);
                    }
                }
            }
        }
    }
    None
}

/// Searches for a finite-quotient witness that `w` is nontrivial, checking
/// homomorphisms to Sym(k) for k up to `max_degree` against the first
/// `relator_budget` relators (all of them for a finite presentation).
/// Never returns `Proved`.
pub fn refute_trivial_finite_quotient(
    p: &Presentation,
    w: &Word,
    max_degree: usize,
    relator_budget: usize,
) -> Verdict {
    let provisional = p.is_stream_backed();
    let mut feed = StreamFeed::new(&p.relator_stream());
    let relators: Vec<TaggedRelator> = match p {
        Presentation::Finite(fp) => {
            let n = fp.relators().len();
            feed.fetch(n).to_vec()
        }
        _ => feed.fetch(relator_budget).to_vec(),
    };
    let mut meter = Fuel::new(u64::MAX / 2);
    match search_witness(&relators, w, max_degree, &mut meter, |_| true) {
        Some(h) => Verdict::refuted(
            meter.spent(),
            Certificate::FiniteQuotientWitness(h),
            provisional,
        ),
        None => Verdict::unknown(meter.spent()),
    }
}

/// Witness that `v` has image of order exactly `order` in some symmetric
/// group of degree at most `max_degree`, with every relator of the prefix
/// killed. Shared by the torsion-order certifier.
///
/// Tries the cheap shape first: one support generator on the standard
/// order-cycle, everything else the identity (a conjugate of a cycle has the
/// cycle's order, so this works whatever the conjugating letters are). Falls
/// back to the general search.
pub fn find_exact_order_witness(
    prefix: &[TaggedRelator],
    v: &Word,
    order: u64,
    max_degree: usize,
    fuel: u64,
) -> (Option<HomWitness>, u64) {
    let mut feed = SliceFeed(prefix);
    let relators = feed.fetch(prefix.len()).to_vec();
    let mut meter = Fuel::new(fuel);
    let gens = support(v);
    if order >= 2 && order as usize <= max_degree && !gens.is_empty() {
        let degree = order as usize;
        let cyc = Perm::cycle(degree, degree);
        for solo in 0..gens.len() {
            let mut perms = vec![Perm::identity(degree); gens.len()];
            perms[solo] = cyc.clone();
            if let Some(h) = try_assignment(&gens, &perms, degree, &relators, v, &mut meter) {
                if h.image_of(v).order() == order {
                    return (Some(h), meter.spent());
                }
            }
            if meter.exhausted() {
                return (None, meter.spent());
            }
        }
    }
    let found = search_witness(&relators, v, max_degree, &mut meter, |h| {
        h.image_of(v).order() == order
    });
    (found, meter.spent())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::FinitePresentation;
    use crate::words::{parse_word, GeneratorNames};
    use crate::wordproblem::Status;

    fn fp(gens: u64, rels: &[&str]) -> Presentation {
        let gn = GeneratorNames::Named(vec!["a".into(), "b".into()]);
        Presentation::Finite(
            FinitePresentation::new(
                gens,
                rels.iter().map(|r| parse_word(r, &gn).unwrap()).collect(),
            )
            .unwrap(),
        )
    }

    fn w(s: &str) -> Word {
        parse_word(s, &GeneratorNames::Named(vec!["a".into(), "b".into()])).unwrap()
    }

    #[test]
    fn refutes_generator_of_c2() {
        let p = fp(1, &["a^2"]);
        let v = refute_trivial_finite_quotient(&p, &w("a"), 2, 100);
        assert_eq!(v.status, Status::Refuted);
        assert!(!v.provisional);
        match v.certificate {
            Some(Certificate::FiniteQuotientWitness(h)) => {
                assert_eq!(h.degree, 2);
                assert!(!h.image_of(&w("a")).is_identity());
            }
            _ => panic!("expected a homomorphism witness"),
        }
    }

    #[test]
    fn cannot_refute_trivial_word() {
        let p = fp(1, &["a^2"]);
        let v = refute_trivial_finite_quotient(&p, &w("a^2"), 3, 100);
        assert_eq!(v.status, Status::Unknown);
        assert!(v.certificate.is_none());
    }

    #[test]
    fn refutes_ab_in_c2_star_c3() {
        let p = fp(2, &["a^2", "b^3"]);
        let v = refute_trivial_finite_quotient(&p, &w("a b"), 5, 100);
        assert_eq!(v.status, Status::Refuted);
        let h = match v.certificate {
            Some(Certificate::FiniteQuotientWitness(h)) => h,
            _ => panic!(),
        };
        assert!(h.degree <= 5);
        assert!(h.image_of(&w("a^2")).is_identity());
        assert!(h.image_of(&w("b^3")).is_identity());
        assert!(!h.image_of(&w("a b")).is_identity());
    }

    #[test]
    fn never_both_proved_and_refuted() {
        // Soundness cross-check on a decidable fixture.
        let p = fp(1, &["a^6"]);
        for word in ["a", "a^2", "a^3", "a^6", "a^12"] {
            let refute = refute_trivial_finite_quotient(&p, &w(word), 6, 100);
            let prove = crate::wordproblem::prove_trivial(&p, &w(word), 50_000).unwrap();
            assert!(
                !(refute.status == Status::Refuted && prove.status == Status::Proved),
                "{word} both proved and refuted"
            );
        }
    }

    #[test]
    fn exact_order_witness_on_c6() {
        let p = match fp(1, &["a^6"]) {
            Presentation::Finite(f) => f,
            _ => unreachable!(),
        };
        let prefix = crate::presentations::base_relators("c6", p.relators().to_vec()).prefix(10);
        let (found, _) = find_exact_order_witness(&prefix, &w("a"), 6, 10, 1_000_000);
        let h = found.expect("a has order 6");
        assert_eq!(h.image_of(&w("a")).order(), 6);
        let (none, _) = find_exact_order_witness(&prefix, &w("a"), 5, 10, 1_000_000);
        assert!(none.is_none(), "a^5 is not the identity in C6");
    }
}
