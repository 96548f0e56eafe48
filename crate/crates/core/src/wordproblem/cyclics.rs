//! Decidable torsion-order oracle for free products of finite cyclic groups:
//! torsion elements of a free product are conjugates of torsion elements of
//! the factors, so the realized orders are exactly the nontrivial divisors
//! of the factor orders.

use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyclicsError {
    pub order: u64,
}

impl fmt::Display for CyclicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cyclic factor order {} is below 2", self.order)
    }
}

impl std::error::Error for CyclicsError {}

/// Torsion orders of `C_{n1} * C_{n2} * ...`: the union of the divisor sets
/// of the factor orders, excluding 1. Rejects factor orders below 2.
pub fn torord_oracle_cyclics(
    orders: impl IntoIterator<Item = u64>,
) -> Result<BTreeSet<u64>, CyclicsError> {
    let mut out = BTreeSet::new();
    for n in orders {
        if n < 2 {
            return Err(CyclicsError { order: n });
        }
        for d in 2..=n {
            if n % d == 0 {
                out.insert(d);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisor_unions() {
        let got = torord_oracle_cyclics([4, 6]).unwrap();
        assert_eq!(got.into_iter().collect::<Vec<_>>(), vec![2, 3, 4, 6]);
        let got = torord_oracle_cyclics([12]).unwrap();
        assert_eq!(got.into_iter().collect::<Vec<_>>(), vec![2, 3, 4, 6, 12]);
    }

    #[test]
    fn single_prime() {
        for p in [2u64, 3, 5, 7, 11] {
            let got = torord_oracle_cyclics([p]).unwrap();
            assert_eq!(got.into_iter().collect::<Vec<_>>(), vec![p]);
        }
    }

    #[test]
    fn rejects_small_orders() {
        assert_eq!(torord_oracle_cyclics([1]), Err(CyclicsError { order: 1 }));
        assert_eq!(torord_oracle_cyclics([4, 0]), Err(CyclicsError { order: 0 }));
        assert_eq!(torord_oracle_cyclics([]), Ok(BTreeSet::new()));
    }
}
