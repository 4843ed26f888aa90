//! The bo-lifting decision procedure.
//!
//! `p H_k` (p times the quaternionic Hopf bundle over `HP^k`) lifts to the
//! fiberwise smash `B^o(m)` if and only if `m >= 2k` and
//! `nu(C(p,i)) >= nu(|ko_{4i-1}(P_m)|)` for all `i <= k`.  Both sides of the
//! inequality are computed exactly: the
//! left from Kummer's carry count, the right from a minimal A(1)-resolution.
//! Every index is checked even after the first failure so reproduction
//! reports can cite the exact violated indices.

use serde::Serialize;
use thiserror::Error;

use crate::dyadic::nu_binom_u64;
use crate::ext_a1::chart::{KoError, KoTable};

#[derive(Debug, Error)]
pub enum LiftError {
    #[error("k must be at least 1")]
    EmptyRange,
    #[error(transparent)]
    Ko(#[from] KoError),
}

/// `p H_k` against `B^o(m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LiftQuery {
    pub p: u64,
    pub k: u64,
    pub m: u64,
}

/// One violated index: `(i, nu(C(p,i)), nu(|ko_{4i-1}(P_m)|))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub i: u64,
    pub nu_binom: u64,
    pub ko_order: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftVerdict {
    pub query: LiftQuery,
    pub lifts: bool,
    pub dimension_ok: bool,
    pub failures: Vec<Failure>,
}

/// Decide whether `p H_k` lifts to `B^o(m)`.
pub fn bo_lift_decision(q: LiftQuery, ko: &KoTable) -> Result<LiftVerdict, LiftError> {
    if q.k == 0 {
        return Err(LiftError::EmptyRange);
    }
    let dimension_ok = q.m >= 2 * q.k;
    let mut failures = Vec::new();
    for i in 1..=q.k {
        // stems below the bottom cell of P_m hold the zero group
        let ko_order = ko.ko_order(i, q.m)?;
        if ko_order == 0 {
            continue;
        }
        if i > q.p {
            // C(p, i) = 0: the obstruction class vanishes outright
            continue;
        }
        let nu = nu_binom_u64(q.p, i).expect("i <= p");
        if nu < ko_order {
            failures.push(Failure {
                i,
                nu_binom: nu,
                ko_order,
            });
        }
    }
    let lifts = dimension_ok && failures.is_empty();
    let verdict = LiftVerdict {
        query: q,
        lifts,
        dimension_ok,
        failures,
    };
    debug_assert_eq!(
        verdict.lifts,
        verdict.dimension_ok && verdict.failures.is_empty()
    );
    Ok(verdict)
}
