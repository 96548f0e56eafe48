//! Abelianization invariants through integer Smith normal form.
//!
//! Arbitrary-precision arithmetic throughout; no modular shortcuts.

use super::FinitePresentation;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Exponent-sum matrix: one row per relator, one column per generator.
pub fn relator_matrix(p: &FinitePresentation) -> Vec<Vec<BigInt>> {
    let cols = p.generator_count() as usize;
    p.relators()
        .iter()
        .map(|r| {
            let mut row = vec![BigInt::zero(); cols];
            for l in r.letters() {
                let c = l.gen.0 as usize;
                match l.sign {
                    crate::words::Sign::Pos => row[c] += 1,
                    crate::words::Sign::Neg => row[c] -= 1,
                }
            }
            row
        })
        .collect()
}

/// Diagonal of the Smith normal form of an integer matrix: nonnegative
/// entries d1 | d2 | ... | dr followed by zeros.
pub fn smith_normal_form(mat: &[Vec<BigInt>]) -> Vec<BigInt> {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    let mut m: Vec<Vec<BigInt>> = mat.to_vec();
    let n = rows.min(cols);
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        loop {
            // Pivot: entry of smallest nonzero absolute value in the
            // remaining block, first occurrence row-major.
            let mut pivot: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    if m[i][j].is_zero() {
                        continue;
                    }
                    match pivot {
                        Some((pi, pj)) if m[pi][pj].abs() <= m[i][j].abs() => {}
                        _ => pivot = Some((i, j)),
                    }
                }
            }
            let (pi, pj) = match pivot {
                Some(p) => p,
                None => {
                    // Block is zero; the rest of the diagonal is zero.
                    for _ in k..n {
                        diag.push(BigInt::zero());
                    }
                    return normalize_divisibility(diag);
                }
            };
            m.swap(k, pi);
            for row in m.iter_mut() {
                row.swap(k, pj);
            }
            if m[k][k].is_negative() {
                for j in k..cols {
                    let v = -m[k][j].clone();
                    m[k][j] = v;
                }
            }
            // Reduce the pivot row and column by division; repeat from pivot
            // selection while any remainder survives.
            let mut disturbed = false;
            for i in k + 1..rows {
                if m[i][k].is_zero() {
                    continue;
                }
                let q = div_floor(&m[i][k], &m[k][k]);
                if !q.is_zero() {
                    for j in k..cols {
                        let sub = &q * &m[k][j];
                        m[i][j] -= sub;
                    }
                }
                if !m[i][k].is_zero() {
                    disturbed = true;
                }
            }
            for j in k + 1..cols {
                if m[k][j].is_zero() {
                    continue;
                }
                let q = div_floor(&m[k][j], &m[k][k]);
                if !q.is_zero() {
                    for i in k..rows {
                        let sub = &q * &m[i][k];
                        m[i][j] -= sub;
                    }
                }
                if !m[k][j].is_zero() {
                    disturbed = true;
                }
            }
            if disturbed {
                continue;
            }
            // Row and column are clear. Enforce that the pivot divides the
            // rest of the block: fold an offending row in and retry.
            let mut offender = None;
            'scan: for i in k + 1..rows {
                for j in k + 1..cols {
                    if !(&m[i][j] % &m[k][k]).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    for j in k..cols {
                        let add = m[i][j].clone();
                        m[k][j] += add;
                    }
                }
                None => break,
            }
        }
        diag.push(m[k][k].clone());
    }
    normalize_divisibility(diag)
}

fn div_floor(a: &BigInt, b: &BigInt) -> BigInt {
    // Round-to-nearest keeps remainders small; exactness is restored by the
    // outer loop either way.
    let (q, r) = num_integer::Integer::div_rem(a, b);
    if r.abs() * 2 > b.abs() {
        if (a.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

fn normalize_divisibility(mut diag: Vec<BigInt>) -> Vec<BigInt> {
    // The elimination already gives divisibility in the generic case; this
    // pass repairs any stragglers and fixes signs and zero placement.
    for d in diag.iter_mut() {
        if d.is_negative() {
            let v = -d.clone();
            *d = v;
        }
    }
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..diag.len() {
            for j in i + 1..diag.len() {
                let (a, b) = (diag[i].clone(), diag[j].clone());
                if a.is_zero() && b.is_zero() {
                    continue;
                }
                // a | b (including b = 0) needs no repair.
                if !a.is_zero() && (&b % &a).is_zero() {
                    continue;
                }
                let g = num_integer::Integer::gcd(&a, &b);
                let l = if g.is_zero() {
                    BigInt::zero()
                } else {
                    (&a * &b) / &g
                };
                // a | b fails (or a = 0 != b): replace with (gcd, lcm).
                if a.is_zero() {
                    diag[i] = b;
                    diag[j] = BigInt::zero();
                } else {
                    diag[i] = g;
                    diag[j] = l;
                }
                changed = true;
            }
        }
    }
    diag
}

/// Elementary divisors of the abelianization: the non-unit invariant factors
/// of the relator matrix in divisibility order, with one 0 per free rank.
pub fn abelianization_invariants(p: &FinitePresentation) -> Vec<u64> {
    let mat = relator_matrix(p);
    let diag = smith_normal_form(&mat);
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    let free_rank = p.generator_count() as usize - rank;
    let mut out: Vec<u64> = diag
        .iter()
        .filter(|d| !d.is_zero() && **d != BigInt::from(1))
        .map(|d| u64::try_from(d).expect("divisor fits u64 at desk scale"))
        .collect();
    out.extend(std::iter::repeat(0).take(free_rank));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::FinitePresentation;
    use crate::words::{parse_word, GeneratorNames, Word};
    use num_bigint::BigInt;
    use num_traits::Zero;

    fn fp(gens: u64, rels: &[&str]) -> FinitePresentation {
        let names = GeneratorNames::Default;
        FinitePresentation::new(
            gens,
            rels.iter().map(|r| parse_word(r, &names).unwrap()).collect(),
        )
        .unwrap()
    }

    fn int_mat(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    /// Independent oracle: invariant factors via gcds of k x k minors.
    fn minor_gcd_divisors(mat: &[Vec<BigInt>]) -> Vec<BigInt> {
        let rows = mat.len();
        let cols = if rows == 0 { 0 } else { mat[0].len() };
        let n = rows.min(cols);
        let mut prev = BigInt::from(1);
        let mut out = Vec::new();
        for k in 1..=n {
            let mut g = BigInt::zero();
            for rsel in combinations(rows, k) {
                for csel in combinations(cols, k) {
                    let det = determinant(mat, &rsel, &csel);
                    g = num_integer::Integer::gcd(&g, &det);
                }
            }
            if g.is_zero() {
                out.push(BigInt::zero());
                continue;
            }
            out.push(&g / &prev);
            prev = g;
        }
        out
    }

    fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        rec(0, n, k, &mut cur, &mut out);
        out
    }

    fn determinant(mat: &[Vec<BigInt>], rsel: &[usize], csel: &[usize]) -> BigInt {
        let k = rsel.len();
        if k == 1 {
            return mat[rsel[0]][csel[0]].clone();
        }
        let mut det = BigInt::zero();
        for (i, &r) in rsel.iter().enumerate() {
            let minor_rows: Vec<usize> = rsel
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, &v)| v)
                .collect();
            let term = &mat[r][csel[0]] * determinant(mat, &minor_rows, &csel[1..]);
            if i % 2 == 0 {
                det += term;
            } else {
                det -= term;
            }
        }
        det
    }

    #[test]
    fn snf_matches_minor_oracle() {
        let cases = [
            int_mat(&[&[6]]),
            int_mat(&[&[2, 0], &[0, 3]]),
            int_mat(&[&[2, 0, 0], &[0, 3, 0], &[1, 1, -6]]),
            int_mat(&[&[4, 6], &[6, 4]]),
            int_mat(&[&[0, 0], &[0, 0]]),
            int_mat(&[&[1, 2, 3], &[4, 5, 6]]),
        ];
        for mat in &cases {
            let snf = smith_normal_form(mat);
            let oracle = minor_gcd_divisors(mat);
            // Oracle's zero entries appear once rank is exceeded; compare
            // nonzero prefixes and zero counts.
            assert_eq!(snf.len(), oracle.len(), "{mat:?}");
            for (a, b) in snf.iter().zip(&oracle) {
                assert_eq!(a, b, "{mat:?}: snf {snf:?} oracle {oracle:?}");
            }
        }
    }

    #[test]
    fn abelianization_cyclic_six() {
        assert_eq!(abelianization_invariants(&fp(1, &["x0^6"])), vec![6]);
    }

    #[test]
    fn abelianization_free_abelian_rank_two() {
        assert_eq!(
            abelianization_invariants(&fp(2, &["x0 x1 x0^-1 x1^-1"])),
            vec![0, 0]
        );
    }

    #[test]
    fn abelianization_three_generator_example() {
        // Exponent rows (2,0,0), (0,3,0), (1,1,-6): the minor oracle gives
        // invariant factors 1, 1, 36, so the single elementary divisor is 36.
        let p = fp(3, &["x0^2", "x1^3", "x0 x1 x2^-1 x2^-1 x2^-1 x2^-1 x2^-1 x2^-1"]);
        let mat = relator_matrix(&p);
        assert_eq!(
            mat,
            int_mat(&[&[2, 0, 0], &[0, 3, 0], &[1, 1, -6]])
        );
        let oracle = minor_gcd_divisors(&mat);
        assert_eq!(
            oracle,
            vec![BigInt::from(1), BigInt::from(1), BigInt::from(36)]
        );
        assert_eq!(abelianization_invariants(&p), vec![36]);
    }

    #[test]
    fn abelianization_invariant_under_relator_permutation_and_consequences() {
        let base = fp(2, &["x0^4", "x1^6"]);
        let permuted = fp(2, &["x1^6", "x0^4"]);
        assert_eq!(
            abelianization_invariants(&base),
            abelianization_invariants(&permuted)
        );
        // Appending the product of two relators changes nothing.
        let names = GeneratorNames::Default;
        let product = parse_word("x0^4", &names)
            .unwrap()
            .concat(&parse_word("x1^6", &names).unwrap());
        let mut rels: Vec<Word> = base.relators().to_vec();
        rels.push(product);
        let extended = FinitePresentation::new(2, rels).unwrap();
        assert_eq!(
            abelianization_invariants(&base),
            abelianization_invariants(&extended)
        );
    }

    #[test]
    fn abelianization_of_free_presentation() {
        assert_eq!(abelianization_invariants(&fp(3, &[])), vec![0, 0, 0]);
    }
}
