//! Streaming subset enumeration with a hard cost guard.

use itertools::Itertools;

use crate::dictionary::SupportSet;
use crate::error::{Error, Result};

/// Maximum number of subset evaluations any exhaustive certificate may perform.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub fn guard(count: u128, limit: u128) -> Result<()> {
    if count > limit {
        Err(Error::TooLarge { count, limit })
    } else {
        Ok(())
    }
}

/// Number of `(Q, Q*)` pairs with `|Q*| = k`, `|Q ∩ Q*| = g`, `|Q \ Q*| = b`.
pub fn admissible_count(n: usize, k: usize, g: usize, b: usize) -> u128 {
    if g > k || k + b > n {
        return 0;
    }
    binomial(n, g + b)
        .saturating_mul(binomial(g + b, g))
        .saturating_mul(binomial(n - g - b, k - g))
}

/// All `(Q, Q*)` pairs with the given cardinalities, `Q` varying slowest so
/// callers can cache work that depends only on `Q`.
pub fn admissible_pairs(
    n: usize,
    k: usize,
    g: usize,
    b: usize,
) -> impl Iterator<Item = (SupportSet, SupportSet)> {
    let valid = g <= k && k + b <= n;
    let outer = if valid { g + b } else { n + 1 };
    (0..n).combinations(outer).flat_map(move |q| {
        let rest: Vec<usize> = (0..n).filter(|i| !q.contains(i)).collect();
        let q_set = SupportSet::from_sorted(q.clone());
        q.clone().into_iter().combinations(g).flat_map(move |qg| {
            let q_set = q_set.clone();
            rest.clone().into_iter().combinations(k - g).map(move |extra| {
                let star = SupportSet::from_sorted(qg.iter().copied().merge(extra).collect());
                (q_set.clone(), star)
            })
        })
    })
}

/// All size-`k` subsets of `0..n`, ascending lexicographic.
pub fn subsets(n: usize, k: usize) -> impl Iterator<Item = SupportSet> {
    (0..n).combinations(k).map(SupportSet::from_sorted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(14, 7), 3432);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(0, 0), 1);
    }

    #[test]
    fn pair_enumeration_matches_count() {
        for (n, k, g, b) in [(6, 2, 1, 0), (6, 3, 1, 1), (5, 2, 0, 2), (4, 4, 4, 0)] {
            let pairs: Vec<_> = admissible_pairs(n, k, g, b).collect();
            assert_eq!(pairs.len() as u128, admissible_count(n, k, g, b));
            for (q, star) in &pairs {
                assert_eq!(star.len(), k);
                assert_eq!(q.intersection(star).len(), g);
                assert_eq!(q.difference(star).len(), b);
            }
        }
        assert_eq!(admissible_pairs(3, 3, 0, 1).count(), 0);
    }

    #[test]
    fn guard_rejects() {
        assert!(guard(ENUMERATION_LIMIT, ENUMERATION_LIMIT).is_ok());
        assert!(matches!(guard(ENUMERATION_LIMIT + 1, ENUMERATION_LIMIT), Err(Error::TooLarge { .. })));
    }
}
