//! Surjective ranking of all finite presentations by nested Cantor pairing.
//!
//! Encoding, from the inside out: a letter is `2 * gen + (1 if inverse)`; a
//! list is nil -> 0, cons(x, rest) -> pair(x, code(rest)) + 1; a word is the
//! list of its letter codes; a presentation is `pair(generator count, list of
//! word codes)`. Decoding is total — out-of-range letters are folded into the
//! declared alphabet and words are reduced — so every rank names some
//! presentation and `decode(encode(p)) = p`. Several ranks may name the same
//! presentation; that repetition is deliberate.

use super::FinitePresentation;
use crate::words::{Letter, Sign, Word};
use num_bigint::BigUint;
use num_traits::Zero;

fn pair(x: &BigUint, y: &BigUint) -> BigUint {
    let s = x + y;
    (&s * (&s + 1u32)) / 2u32 + y
}

fn unpair(z: &BigUint) -> (BigUint, BigUint) {
    let w: BigUint = z * 8u32 + 1u32;
    let root = w.sqrt();
    let s = (&root - 1u32) / 2u32;
    let tri = (&s * (&s + 1u32)) / 2u32;
    let y = z - tri;
    let x = s - &y;
    (x, y)
}

fn encode_list(items: &[BigUint]) -> BigUint {
    let mut code = BigUint::zero();
    for item in items.iter().rev() {
        code = pair(item, &code) + 1u32;
    }
    code
}

fn decode_list(mut code: BigUint) -> Vec<BigUint> {
    let mut out = Vec::new();
    while !code.is_zero() {
        let (head, rest) = unpair(&(code - 1u32));
        out.push(head);
        code = rest;
    }
    out
}

fn encode_word(w: &Word) -> BigUint {
    let letters: Vec<BigUint> = w
        .letters()
        .iter()
        .map(|l| BigUint::from(l.value()))
        .collect();
    encode_list(&letters)
}

fn decode_word(code: BigUint, gens: u64) -> Word {
    let letters = decode_list(code).into_iter().filter_map(|v| {
        if gens == 0 {
            return None;
        }
        let v: BigUint = v;
        let sign = if (&v % 2u32).is_zero() {
            Sign::Pos
        } else {
            Sign::Neg
        };
        let gen_code = v / 2u32;
        // Fold out-of-range generators into the alphabet so decoding stays
        // total.
        let gen = (gen_code % gens).try_into().unwrap_or(0u64);
        Some(Letter::new(gen, sign))
    });
    Word::from_letters(letters)
}

/// Rank of a finite presentation in the enumeration (a right inverse of
/// decoding: `enumerate_finite_presentations(&encode(p)) == p`).
/// Generator names are not part of the code.
pub fn encode_finite_presentation(p: &FinitePresentation) -> BigUint {
    let words: Vec<BigUint> = p.relators().iter().map(encode_word).collect();
    pair(&BigUint::from(p.generator_count()), &encode_list(&words))
}

/// The presentation at `rank`; total and surjective (with repetition) over
/// all finite presentations.
pub fn enumerate_finite_presentations(rank: &BigUint) -> FinitePresentation {
    let (gens_code, list_code) = unpair(rank);
    // Generator counts beyond u64 are unusable anyway; wrap them so decoding
    // stays total.
    let gens: u64 = (&gens_code % (BigUint::from(u64::MAX) + 1u32))
        .try_into()
        .unwrap_or(0);
    let relators: Vec<Word> = decode_list(list_code)
        .into_iter()
        .map(|c| decode_word(c, gens))
        .collect();
    FinitePresentation::new(gens, relators).expect("decoded relators are in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::GeneratorNames;
    use num_traits::One;

    #[test]
    fn rank_zero_is_the_empty_presentation() {
        let p = enumerate_finite_presentations(&BigUint::zero());
        assert_eq!(p.generator_count(), 0);
        assert!(p.relators().is_empty());
    }

    #[test]
    fn early_ranks_decode_sensibly() {
        // rank 1 = pair(1, 0): one generator, no relators.
        let p = enumerate_finite_presentations(&BigUint::one());
        assert_eq!(p.generator_count(), 1);
        assert!(p.relators().is_empty());
    }

    #[test]
    fn roundtrip_random_small_presentations() {
        // Deterministic LCG; 1000 presentations with <= 3 gens, <= 3 relators
        // of length <= 3.
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = move |bound: u64| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) % bound
        };
        for _ in 0..1000 {
            let gens = 1 + next(3);
            let nrels = next(4);
            let mut rels = Vec::new();
            for _ in 0..nrels {
                let len = next(4);
                let mut letters = Vec::new();
                for _ in 0..len {
                    let g = next(gens);
                    let s = if next(2) == 0 { Sign::Pos } else { Sign::Neg };
                    letters.push(Letter::new(g, s));
                }
                rels.push(Word::from_letters(letters));
            }
            let p = FinitePresentation::new(gens, rels).unwrap();
            let code = encode_finite_presentation(&p);
            assert_eq!(enumerate_finite_presentations(&code), p);
        }
    }

    #[test]
    fn small_presentations_appear_within_scan_bound() {
        // Every presentation with <= 2 generators and <= 1 relator of length
        // <= 2 appears at or before the max of their own codes.
        let names = GeneratorNames::Default;
        let mut family = vec![];
        for gens in 0..=2u64 {
            family.push(FinitePresentation::new(gens, vec![]).unwrap());
            if gens == 0 {
                family.push(FinitePresentation::new(0, vec![Word::identity()]).unwrap());
                continue;
            }
            let mut words = vec![Word::identity()];
            for v1 in 0..2 * gens {
                words.push(Word::from_letters([Letter::from_value(v1)]));
                for v2 in 0..2 * gens {
                    let w =
                        Word::from_letters([Letter::from_value(v1), Letter::from_value(v2)]);
                    if w.len() == 2 {
                        words.push(w);
                    }
                }
            }
            for w in words {
                family.push(FinitePresentation::new(gens, vec![w]).unwrap());
            }
        }
        let _ = names;
        let bound = family
            .iter()
            .map(encode_finite_presentation)
            .max()
            .unwrap();
        // The scan itself: walk ranks 0..=bound and tick off the family.
        let mut missing: std::collections::HashSet<FinitePresentation> =
            family.into_iter().collect();
        let mut rank = BigUint::zero();
        while rank <= bound && !missing.is_empty() {
            let p = enumerate_finite_presentations(&rank);
            missing.remove(&p);
            rank += 1u32;
        }
        assert!(missing.is_empty(), "not all small presentations appeared");
    }
}
