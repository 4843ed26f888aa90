//! Exact binary arithmetic: digit sums, 2-adic valuations, binomial parity
//! and binomial valuation.
//!
//! Everything here is bit-level and exact.  `alpha(n)` counts the ones in the
//! binary expansion of `n`; `nu(n)` is the exponent of 2 in `n`.  Binomial
//! parity is Lucas's theorem (`C(m,k)` is odd iff the bits of `k` are
//! dominated by the bits of `m`) and the binomial valuation is Kummer's carry
//! count `alpha(k) + alpha(m-k) - alpha(m)`.  No floating point, no fixed
//! width: the public entry points take arbitrary-precision naturals.

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

/// Arbitrary-precision nonnegative integer; the only number type dimension
/// arithmetic is allowed to use.
pub type Natural = BigUint;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DyadicError {
    /// `nu(0)` is undefined: the valuation of zero is not a number here.
    #[error("2-adic valuation of 0 is undefined")]
    ValuationOfZero,
    /// `nu_binom(m, k)` requires `k <= m`.
    #[error("binomial domain error: k = {k} exceeds m = {m}")]
    BinomialDomain { m: Natural, k: Natural },
}

/// Number of 1's in the binary expansion of `n`.
pub fn alpha(n: &Natural) -> u64 {
    n.count_ones()
}

/// Largest `e` with `2^e` dividing `n`; errors on `n = 0`.
pub fn nu(n: &Natural) -> Result<u64, DyadicError> {
    if n.is_zero() {
        return Err(DyadicError::ValuationOfZero);
    }
    Ok(n.trailing_zeros().expect("nonzero"))
}

/// `C(m, k) mod 2` via Lucas: odd iff `k AND m == k`.  Zero when `k > m`.
pub fn binom_mod2(m: &Natural, k: &Natural) -> bool {
    (k & m) == *k
}

/// Convenience width for instantiated dimensions.
pub fn binom_mod2_u64(m: u64, k: u64) -> bool {
    k & m == k
}

/// `nu(C(m, k)) = alpha(k) + alpha(m - k) - alpha(m)`, the number of carries
/// when adding `k` and `m - k` in base 2.
pub fn nu_binom(m: &Natural, k: &Natural) -> Result<u64, DyadicError> {
    if k > m {
        return Err(DyadicError::BinomialDomain {
            m: m.clone(),
            k: k.clone(),
        });
    }
    Ok(alpha(k) + alpha(&(m - k)) - alpha(m))
}

pub fn nu_binom_u64(m: u64, k: u64) -> Result<u64, DyadicError> {
    if k > m {
        return Err(DyadicError::BinomialDomain {
            m: Natural::from(m),
            k: Natural::from(k),
        });
    }
    Ok(u64::from(k.count_ones() + (m - k).count_ones()) - u64::from(m.count_ones()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn nat(n: u64) -> Natural {
        Natural::from(n)
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(&nat(0)), 0);
        assert_eq!(alpha(&nat(3)), 2);
        assert_eq!(alpha(&nat(7)), 3);
    }

    #[test]
    fn nu_examples() {
        assert_eq!(nu(&nat(1)), Ok(0));
        assert_eq!(nu(&nat(8)), Ok(3));
        assert_eq!(nu(&nat(12)), Ok(2));
        assert_eq!(nu(&nat(0)), Err(DyadicError::ValuationOfZero));
    }

    #[test]
    fn binom_mod2_examples() {
        assert!(!binom_mod2(&nat(50), &nat(6)));
        assert!(binom_mod2(&nat(50), &nat(2)));
        for m in [0u64, 1, 17, 50, 1023] {
            assert!(binom_mod2(&nat(m), &nat(0)));
        }
        // k > m gives 0
        assert!(!binom_mod2(&nat(5), &nat(6)));
    }

    #[test]
    fn nu_binom_examples() {
        assert_eq!(nu_binom(&nat(27), &nat(13)), Ok(2));
        assert_eq!(nu_binom(&nat(28), &nat(14)), Ok(3));
        assert_eq!(nu_binom(&nat(28), &nat(13)), Ok(4));
        assert!(matches!(
            nu_binom(&nat(3), &nat(4)),
            Err(DyadicError::BinomialDomain { .. })
        ));
    }

    #[test]
    fn lucas_iff_kummer_zero_small() {
        // spot check here; the full m,k <= 4096 sweep runs in the acceptance suite
        for m in 0u64..256 {
            for k in 0..=m {
                let parity = binom_mod2(&nat(m), &nat(k));
                let val = nu_binom(&nat(m), &nat(k)).unwrap();
                assert_eq!(parity, val == 0, "m={m} k={k}");
                assert_eq!(parity, k & m == k);
            }
        }
    }

    #[test]
    fn alpha_two_family() {
        // alpha(n) = 2 forces nu C(8n+3, 4n+1) = nu C(8n+3, 4n+2) = 2
        for n in 1u64..=4096 {
            if nat(n).count_ones() != 2 {
                continue;
            }
            assert_eq!(nu_binom(&nat(8 * n + 3), &nat(4 * n + 1)), Ok(2), "n={n}");
            assert_eq!(nu_binom(&nat(8 * n + 3), &nat(4 * n + 2)), Ok(2), "n={n}");
        }
    }

    #[test]
    fn central_binomial_valuation_is_alpha() {
        for n in 1u64..=4096 {
            assert_eq!(
                nu_binom(&nat(4 * n), &nat(2 * n)).unwrap(),
                alpha(&nat(n)),
                "n={n}"
            );
        }
    }

    #[test]
    fn factorial_oracle() {
        // independent route: exact factorials and their 2-adic valuations
        let mut factorials = vec![Natural::one()];
        for i in 1u64..=300 {
            let next = factorials.last().unwrap() * nat(i);
            factorials.push(next);
        }
        let val = |x: &Natural| nu(x).unwrap();
        for m in 0u64..=300 {
            for k in 0..=m {
                let expect = val(&factorials[m as usize])
                    - val(&factorials[k as usize])
                    - val(&factorials[(m - k) as usize]);
                assert_eq!(nu_binom(&nat(m), &nat(k)).unwrap(), expect, "m={m} k={k}");
            }
        }
    }
}
