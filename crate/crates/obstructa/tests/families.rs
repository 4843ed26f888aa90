//! Family sweeps: the derivations go through for every admissible n up to
//! 64, not just the spot-checked values.

use obstructa::derivations::{derive_embedding, derive_nonimmersion_2, Engine, StatementKind};
use obstructa::dyadic::{alpha, Natural};
use obstructa::ext_a1::chart::KoTable;
use obstructa::fixtures::Fixtures;

fn engine() -> Engine {
    Engine {
        fixtures: Fixtures::builtin(),
        ko: KoTable::new(),
    }
}

#[test]
fn nonimmersion_family_through_64() {
    let e = engine();
    let mut count = 0;
    for n in 1u64..=64 {
        if alpha(&Natural::from(n)) != 2 {
            continue;
        }
        let r = derive_nonimmersion_2(&e, n).unwrap_or_else(|err| panic!("n = {n}: {err}"));
        assert_eq!(
            r.conclusion.kind,
            StatementKind::NoImmersion {
                space: 16 * n + 10,
                ambient: 32 * n + 11
            }
        );
        count += 1;
    }
    assert_eq!(count, 15, "alpha(n) = 2 values up to 64");
}

#[test]
fn embedding_family_through_64() {
    let e = engine();
    let mut count = 0;
    for n in 1u64..=64 {
        if alpha(&Natural::from(n)) <= 2 {
            continue;
        }
        let r = derive_embedding(&e, n).unwrap_or_else(|err| panic!("n = {n}: {err}"));
        assert_eq!(
            r.conclusion.kind,
            StatementKind::Embedding {
                space: 8 * n + 4,
                ambient: 16 * n + 1
            }
        );
        count += 1;
    }
    assert_eq!(count, 42, "alpha(n) > 2 values up to 64");
}
