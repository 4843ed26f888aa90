//! The mod-2 cohomology ring of real projective space `P^N`, Steenrod-square
//! evaluation, and Stiefel–Whitney classes of multiples of the Hopf bundle.
//!
//! `H^*(P^N; F2) = F2[x]/(x^{N+1})` on a degree-1 class `x`.  A class is kept
//! as the set of exponents of its monomials; addition is symmetric
//! difference.  Squares act by `Sq^k x^j = C(j,k) x^{j+k}` extended linearly,
//! with everything above the truncation discarded, and `w_i(p xi) =
//! C(p,i) x^i` comes from the total class `(1+x)^p`.  Words of squares are
//! evaluated directly, rightmost factor first; no Adem normalization is
//! needed on a polynomial algebra.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyadic::binom_mod2_u64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("truncation mismatch: P^{0} vs P^{1}")]
    TruncationMismatch(u64, u64),
}

/// An element of `H^*(P^N; F2)`: a set of monomial exponents, all `<= N`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CohomologyClass {
    truncation: u64,
    degrees: BTreeSet<u64>,
}

impl CohomologyClass {
    pub fn zero(truncation: u64) -> Self {
        CohomologyClass {
            truncation,
            degrees: BTreeSet::new(),
        }
    }

    pub fn one(truncation: u64) -> Self {
        Self::monomial(truncation, 0)
    }

    /// The monomial `x^d`, or zero if `d` exceeds the truncation.
    pub fn monomial(truncation: u64, d: u64) -> Self {
        let mut degrees = BTreeSet::new();
        if d <= truncation {
            degrees.insert(d);
        }
        CohomologyClass {
            truncation,
            degrees,
        }
    }

    pub fn truncation(&self) -> u64 {
        self.truncation
    }

    pub fn degrees(&self) -> &BTreeSet<u64> {
        &self.degrees
    }

    pub fn is_zero(&self) -> bool {
        self.degrees.is_empty()
    }

    /// Characteristic-2 addition: symmetric difference of monomial sets.
    pub fn add(&self, other: &Self) -> Result<Self, CohomologyError> {
        if self.truncation != other.truncation {
            return Err(CohomologyError::TruncationMismatch(
                self.truncation,
                other.truncation,
            ));
        }
        let degrees = self
            .degrees
            .symmetric_difference(&other.degrees)
            .copied()
            .collect();
        Ok(CohomologyClass {
            truncation: self.truncation,
            degrees,
        })
    }

    fn toggle(&mut self, d: u64) {
        if d > self.truncation {
            return;
        }
        if !self.degrees.remove(&d) {
            self.degrees.insert(d);
        }
    }
}

impl fmt::Display for CohomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degrees.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .degrees
            .iter()
            .map(|&d| match d {
                0 => "1".to_string(),
                1 => "x".to_string(),
                d => format!("x^{d}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// A composition `Sq^{k_1} ∘ ... ∘ Sq^{k_r}`; evaluation is right-to-left.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct SteenrodWord(pub Vec<u64>);

impl SteenrodWord {
    pub fn identity() -> Self {
        SteenrodWord(Vec::new())
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().sum()
    }
}

impl fmt::Display for SteenrodWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|k| format!("Sq{k}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `p` times the Hopf line bundle over `P^N`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BundleData {
    pub multiple: u64,
    pub base_dim: u64,
}

/// `Sq^k` on a class, by linear extension of `Sq^k x^j = C(j,k) x^{j+k}`.
pub fn sq(k: u64, c: &CohomologyClass) -> CohomologyClass {
    let mut out = CohomologyClass::zero(c.truncation);
    for &j in &c.degrees {
        if binom_mod2_u64(j, k) {
            out.toggle(j + k);
        }
    }
    out
}

/// Evaluate a word of squares, rightmost factor first.
pub fn sq_word(w: &SteenrodWord, c: &CohomologyClass) -> CohomologyClass {
    let mut acc = c.clone();
    for &k in w.0.iter().rev() {
        acc = sq(k, &acc);
    }
    acc
}

/// F2 polynomial product, truncated above `N`.
pub fn multiply(
    a: &CohomologyClass,
    b: &CohomologyClass,
) -> Result<CohomologyClass, CohomologyError> {
    if a.truncation != b.truncation {
        return Err(CohomologyError::TruncationMismatch(
            a.truncation,
            b.truncation,
        ));
    }
    let mut out = CohomologyClass::zero(a.truncation);
    for &i in &a.degrees {
        for &j in &b.degrees {
            out.toggle(i + j);
        }
    }
    Ok(out)
}

/// `w_i(p xi) = C(p,i) x^i` in `H^i(P^N)`.
pub fn sw_class(b: &BundleData, i: u64) -> CohomologyClass {
    if binom_mod2_u64(b.multiple, i) {
        CohomologyClass::monomial(b.base_dim, i)
    } else {
        CohomologyClass::zero(b.base_dim)
    }
}

/// The total Stiefel–Whitney class of `p xi`, truncated: `(1+x)^p`.
pub fn total_sw_class(b: &BundleData) -> CohomologyClass {
    let mut out = CohomologyClass::zero(b.base_dim);
    for i in 0..=b.base_dim {
        if binom_mod2_u64(b.multiple, i) {
            out.toggle(i);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(trunc: u64, d: u64) -> CohomologyClass {
        CohomologyClass::monomial(trunc, d)
    }

    #[test]
    fn sq_examples() {
        assert!(sq(6, &x(58, 50)).is_zero());
        assert_eq!(sq(2, &x(58, 50)), x(58, 52));
        for j in (2..40).step_by(2) {
            assert!(sq(1, &x(100, j)).is_zero(), "Sq1 x^{j}");
        }
    }

    #[test]
    fn sq_word_examples() {
        assert_eq!(sq_word(&SteenrodWord(vec![2, 3]), &x(58, 51)), x(58, 56));
        let c = x(58, 50).add(&x(58, 7)).unwrap();
        assert_eq!(sq_word(&SteenrodWord::identity(), &c), c);
        assert!(sq_word(&SteenrodWord(vec![2, 1]), &x(58, 50)).is_zero());
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(multiply(&x(58, 52), &x(58, 4)).unwrap(), x(58, 56));
        let c = x(58, 3).add(&x(58, 17)).unwrap();
        assert_eq!(multiply(&c, &CohomologyClass::one(58)).unwrap(), c);
        assert!(multiply(&x(58, 30), &x(58, 30)).unwrap().is_zero());
        assert!(matches!(
            multiply(&x(58, 1), &x(59, 1)),
            Err(CohomologyError::TruncationMismatch(58, 59))
        ));
    }

    #[test]
    fn sw_examples() {
        let b108 = BundleData {
            multiple: 108,
            base_dim: 58,
        };
        assert_eq!(sw_class(&b108, 4), x(58, 4));
        assert_eq!(sw_class(&b108, 8), x(58, 8));
        let b112 = BundleData {
            multiple: 112,
            base_dim: 58,
        };
        assert!(sw_class(&b112, 52).is_zero());
        assert!(sw_class(&b112, 4).is_zero());
        assert!(sw_class(&b112, 8).is_zero());
    }

    #[test]
    fn instability() {
        for j in 0..40u64 {
            for k in j + 1..j + 10 {
                assert!(sq(k, &x(200, j)).is_zero(), "Sq{k} x^{j}");
            }
            assert_eq!(sq(j, &x(200, j)), x(200, 2 * j), "Sq{j} x^{j}");
        }
    }

    #[test]
    fn cartan_formula_spot() {
        // full randomized sweep lives in the acceptance suite
        for (i, j) in [(3u64, 5u64), (7, 10), (12, 12), (1, 30)] {
            let a = x(100, i);
            let b = x(100, j);
            let ab = multiply(&a, &b).unwrap();
            for k in 0..=8u64 {
                let lhs = sq(k, &ab);
                let mut rhs = CohomologyClass::zero(100);
                for p in 0..=k {
                    let term = multiply(&sq(p, &a), &sq(k - p, &b)).unwrap();
                    rhs = rhs.add(&term).unwrap();
                }
                assert_eq!(lhs, rhs, "Cartan failed at i={i} j={j} k={k}");
            }
        }
    }

    #[test]
    fn whitney_sum() {
        let n = 40u64;
        for (p1, p2) in [(3u64, 5u64), (12, 20), (31, 33), (50, 62)] {
            let total = total_sw_class(&BundleData {
                multiple: p1 + p2,
                base_dim: n,
            });
            let prod = multiply(
                &total_sw_class(&BundleData {
                    multiple: p1,
                    base_dim: n,
                }),
                &total_sw_class(&BundleData {
                    multiple: p2,
                    base_dim: n,
                }),
            )
            .unwrap();
            assert_eq!(total, prod, "p1={p1} p2={p2}");
        }
    }

    #[test]
    fn low_binomials_ignore_n() {
        // C(16n+d, k) for k <= 8, d <= 15 only sees the low nibble
        for k in 0..=8u64 {
            for d in 0..=15u64 {
                let vals: BTreeSet<bool> = [3u64, 5, 6, 9, 10, 12]
                    .iter()
                    .map(|&n| binom_mod2_u64(16 * n + d, k))
                    .collect();
                assert_eq!(vals.len(), 1, "k={k} d={d}");
            }
        }
    }
}
