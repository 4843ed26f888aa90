//! Theorem reproductions with full provenance.
//!
//! A derivation is a fixed chain of engine verdicts; each step records the
//! rule applied, its inputs (including every fixture or axiom consumed) and
//! the computed verdict.  A step whose verdict deviates from what the chain
//! needs aborts the derivation; records are never emitted with a silently
//! wrong step.  Records replay: re-running the derivation at the same `n`
//! reproduces the identical step list, and serialization is deterministic.
//!
//! Two chains are implemented end to end:
//!
//! * nonimmersion of `P^{16n+10}` in `R^{32n+11}` for `alpha(n) = 2`, via
//!   binomial valuations, the bo-lifting quadruple, the quaternionic
//!   pullback check, and the stage-2 implication / stage-1 kernel gates of
//!   the symplectic tower;
//! * embedding of `P^{8n+4}` in `R^{16n+1}` for `alpha(n) > 2`, via the
//!   classical embedding of `P^{8n+2}`, the normal-bundle twist identity,
//!   the spin-tower analysis (variation bullets, forced vanishing, the
//!   difference-map evaluation), a two-section count, the inductive
//!   embedding step and the metastable smoothing bound.

use serde::Serialize;
use thiserror::Error;

use crate::cohomology::{sw_class, BundleData};
use crate::dyadic::{alpha, nu_binom_u64, Natural};
use crate::ext_a1::chart::{KoError, KoTable};
use crate::fixtures::{FixtureError, Fixtures};
use crate::lifting::{bo_lift_decision, LiftError, LiftQuery};
use crate::mpt::analysis::{
    check_implication, delta_through_level1_fiber, forced_vanishing, quaternionic_pullback_check,
    variation_delta, variation_matrix,
};
use crate::mpt::parse::parse_label;
use crate::mpt::{Label, MptError};

#[derive(Debug, Error)]
pub enum DerivationError {
    #[error("precondition failed: need {need}, got {got}")]
    Precondition { need: String, got: String },
    #[error("verdict mismatch in rule `{rule}`: {detail}")]
    VerdictMismatch { rule: String, detail: String },
    #[error("missing premise: {0}")]
    MissingPremise(String),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error(transparent)]
    Ko(#[from] KoError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Mpt(#[from] MptError),
}

/// What a statement claims.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StatementKind {
    Immersion {
        space: u64,
        ambient: u64,
    },
    NoImmersion {
        space: u64,
        ambient: u64,
    },
    Embedding {
        space: u64,
        ambient: u64,
    },
    SphereEmbedding {
        space: u64,
        sphere: u64,
    },
    SectionCount {
        multiple: u64,
        base: u64,
        rank: u64,
        sections: u64,
    },
    /// `multiple·xi` over `P^space` factors through `target(gd_bound)`.
    Lifting {
        multiple: u64,
        space: u64,
        gd_bound: u64,
        target: String,
    },
    NoLifting {
        multiple: u64,
        space: u64,
        gd_bound: u64,
        target: String,
    },
    /// A bundle over `P^base` identified stably as `multiple·xi`, of the
    /// given geometric rank.
    StableClass {
        base: u64,
        multiple: u64,
        rank: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Axiom,
    Derived,
    Refuted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Statement {
    #[serde(flatten)]
    pub kind: StatementKind,
    pub status: Status,
    pub justification: Vec<String>,
}

impl Statement {
    pub fn axiom(kind: StatementKind, source: &str) -> Self {
        Statement {
            kind,
            status: Status::Axiom,
            justification: vec![source.to_string()],
        }
    }

    pub fn derived(kind: StatementKind, justification: Vec<String>) -> Self {
        assert!(
            !justification.is_empty(),
            "derived statements carry provenance"
        );
        Statement {
            kind,
            status: Status::Derived,
            justification,
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            StatementKind::Immersion { space, ambient } => {
                format!("P^{space} immerses in R^{ambient}")
            }
            StatementKind::NoImmersion { space, ambient } => {
                format!("P^{space} does not immerse in R^{ambient}")
            }
            StatementKind::Embedding { space, ambient } => {
                format!("P^{space} embeds in R^{ambient}")
            }
            StatementKind::SphereEmbedding { space, sphere } => {
                format!("P^{space} embeds in S^{sphere}")
            }
            StatementKind::SectionCount {
                multiple,
                base,
                rank,
                sections,
            } => format!(
                "the rank-{rank} bundle stably {multiple}xi over P^{base} has at least {sections} linearly independent sections"
            ),
            StatementKind::Lifting {
                multiple,
                space,
                gd_bound,
                target,
            } => format!("{multiple}xi over P^{space} factors through {target}({gd_bound})"),
            StatementKind::NoLifting {
                multiple,
                space,
                gd_bound,
                target,
            } => format!(
                "{multiple}xi over P^{space} does not factor through {target}({gd_bound})"
            ),
            StatementKind::StableClass {
                base,
                multiple,
                rank,
            } => format!("a rank-{rank} bundle over P^{base}, stably {multiple}xi"),
        }
    }
}

/// One applied rule with its recorded verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub rule: String,
    pub inputs: Vec<String>,
    pub verdict: serde_json::Value,
}

/// Which reproduction a record belongs to (used for replay).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "target", rename_all = "kebab-case")]
pub enum Target {
    Nonimmersion2 { n: u64 },
    Embedding { n: u64 },
    Lemma35 { n: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivationRecord {
    #[serde(flatten)]
    pub target: Target,
    pub conclusion: Statement,
    pub steps: Vec<Step>,
    pub assumptions: Vec<String>,
}

impl DerivationRecord {
    /// Re-run the whole chain and compare.
    pub fn replay(&self, engine: &Engine) -> Result<bool, DerivationError> {
        let again = match self.target {
            Target::Nonimmersion2 { n } => derive_nonimmersion_2(engine, n)?,
            Target::Embedding { n } => derive_embedding(engine, n)?,
            Target::Lemma35 { n } => derive_lemma_3_5(engine, n)?,
        };
        Ok(again == *self)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("records serialize")
    }

    /// Human-readable transcript mirroring the proof order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("Derivation: {}\n", self.conclusion.describe()));
        for (i, step) in self.steps.iter().enumerate() {
            out.push_str(&format!("  [{}] {}", i + 1, step.rule));
            if !step.inputs.is_empty() {
                out.push_str(&format!("  (inputs: {})", step.inputs.join(", ")));
            }
            out.push('\n');
            let pretty = serde_json::to_string(&step.verdict).expect("verdict serializes");
            out.push_str(&format!("      {pretty}\n"));
        }
        out.push_str(&format!("Assumptions: {}\n", self.assumptions.join(", ")));
        out.push_str(&format!("Conclusion: {}\n", self.conclusion.describe()));
        out
    }
}

/// Shared computation context: fixtures plus the memoizing ko table.
pub struct Engine {
    pub fixtures: Fixtures,
    pub ko: KoTable,
}

impl Engine {
    pub fn new() -> Result<Self, FixtureError> {
        Ok(Engine {
            fixtures: Fixtures::load()?,
            ko: KoTable::new(),
        })
    }
}

/// The immersion question for `P^space` in `R^{space+k}` is the factoring of
/// `(space+k+1)xi` through `BO(k)`.
pub fn sanderson_reduce(space: u64, k: u64) -> Statement {
    Statement::derived(
        StatementKind::Lifting {
            multiple: space + k + 1,
            space,
            gd_bound: k,
            target: "BO".to_string(),
        },
        vec!["geometric-dimension reduction of the immersion question".to_string()],
    )
}

/// From an embedding `P^q ⊂ R^p` with normal bundle `nu`, the twist
/// `nu ⊗ xi_q` plus `q+1` trivial lines is `(p+1) xi_q`; so the twist is a
/// rank-`(p-q)` bundle stably `(p+1) xi_q`.
pub fn normal_twist_identity(
    p: u64,
    q: u64,
    premise: &Statement,
) -> Result<Statement, DerivationError> {
    if premise.kind
        != (StatementKind::Embedding {
            space: q,
            ambient: p,
        })
    {
        return Err(DerivationError::MissingPremise(format!(
            "embedding P^{q} in R^{p} (got: {})",
            premise.describe()
        )));
    }
    Ok(Statement::derived(
        StatementKind::StableClass {
            base: q,
            multiple: p + 1,
            rank: p - q,
        },
        vec![
            "normal-bundle twist identity".to_string(),
            premise.describe(),
        ],
    ))
}

/// Inductive embedding step: from `P^q ⊂ R^p`, `sections` independent
/// sections of the twisted normal bundle, and `P^{sections-1} ⊂ S^{m-1}`,
/// conclude `P^{sections+q} ⊂ R^{p+m}`.
pub fn mahowald_step(
    embed: &Statement,
    sections: u64,
    sphere_embed: Option<(u64, u64)>,
    section_premise: Option<&Statement>,
) -> Result<Statement, DerivationError> {
    let StatementKind::Embedding {
        space: q,
        ambient: p,
    } = embed.kind
    else {
        return Err(DerivationError::MissingPremise(format!(
            "an embedding statement (got: {})",
            embed.describe()
        )));
    };
    if sections == 0 {
        return Ok(Statement::derived(
            StatementKind::Embedding {
                space: q,
                ambient: p,
            },
            vec!["inductive embedding step with zero sections".to_string()],
        ));
    }
    let Some((proj, sphere)) = sphere_embed else {
        return Err(DerivationError::MissingPremise(format!(
            "an embedding of P^{} in a sphere",
            sections - 1
        )));
    };
    if proj + 1 != sections {
        return Err(DerivationError::MissingPremise(format!(
            "sphere embedding of P^{} (got P^{proj})",
            sections - 1
        )));
    }
    let sp = section_premise.ok_or_else(|| {
        DerivationError::MissingPremise(format!(
            "a section-count statement with {sections} sections over P^{q}"
        ))
    })?;
    match sp.kind {
        StatementKind::SectionCount {
            base, sections: s, ..
        } if base == q && s >= sections => {}
        _ => {
            return Err(DerivationError::MissingPremise(format!(
                "a section-count statement with {sections} sections over P^{q} (got: {})",
                sp.describe()
            )))
        }
    }
    let m = sphere + 1;
    Ok(Statement::derived(
        StatementKind::Embedding {
            space: sections + q,
            ambient: p + m,
        },
        vec![
            "inductive embedding step".to_string(),
            embed.describe(),
            sp.describe(),
            format!("P^{proj} embeds in S^{sphere}"),
        ],
    ))
}

/// Metastable smoothing bound as instantiated: a topological embedding of an
/// `manifold`-manifold in `R^ambient` smooths when `2·ambient >= 3·manifold`.
pub fn haefliger_ok(ambient: u64, manifold: u64) -> bool {
    2 * ambient >= 3 * manifold
}

fn nat(n: u64) -> Natural {
    Natural::from(n)
}

fn json(v: impl Serialize) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

struct RecordBuilder {
    steps: Vec<Step>,
    assumptions: Vec<String>,
}

impl RecordBuilder {
    fn new() -> Self {
        RecordBuilder {
            steps: Vec::new(),
            assumptions: Vec::new(),
        }
    }

    fn step(&mut self, rule: &str, inputs: Vec<String>, verdict: serde_json::Value) {
        self.steps.push(Step {
            rule: rule.to_string(),
            inputs,
            verdict,
        });
    }

    fn assume(&mut self, id: &str) {
        if !self.assumptions.iter().any(|a| a == id) {
            self.assumptions.push(id.to_string());
        }
    }
}

fn expect(rule: &str, ok: bool, detail: String) -> Result<(), DerivationError> {
    if ok {
        Ok(())
    } else {
        Err(DerivationError::VerdictMismatch {
            rule: rule.to_string(),
            detail,
        })
    }
}

fn label(s: &str) -> Label {
    parse_label(s).expect("static label")
}

/// Nonimmersion of `P^{16n+10}` in `R^{32n+11}` for `alpha(n) = 2`.
pub fn derive_nonimmersion_2(engine: &Engine, n: u64) -> Result<DerivationRecord, DerivationError> {
    if alpha(&nat(n)) != 2 {
        return Err(DerivationError::Precondition {
            need: "alpha(n) = 2".to_string(),
            got: format!("alpha({n}) = {}", alpha(&nat(n))),
        });
    }
    let mut rb = RecordBuilder::new();
    let space = 16 * n + 10;
    let ambient = 32 * n + 11;
    let h = 8 * n + 3; // (32n+12)xi factors through (8n+3)H over HP^{4n+2}

    // 1. binomial valuations
    let v1 = nu_binom_u64(h, 4 * n + 1).expect("4n+1 <= 8n+3");
    let v2 = nu_binom_u64(h, 4 * n + 2).expect("4n+2 <= 8n+3");
    expect(
        "binomial-valuations",
        v1 == 2 && v2 == 2,
        format!(
            "expected nu C({h},{}) = nu C({h},{}) = 2, got {v1}, {v2}",
            4 * n + 1,
            4 * n + 2
        ),
    )?;
    rb.step(
        "binomial-valuations",
        vec![],
        json(serde_json::json!({
            "nu_binom": [[h, 4*n+1, v1], [h, 4*n+2, v2]],
            "alpha_n": 2,
        })),
    );

    // 2. ko-orders (with collapse assumption)
    let ms = [16 * n + 1, 16 * n + 2, 16 * n + 5, 16 * n + 6];
    let mut table = Vec::new();
    for &i in &[4 * n + 1, 4 * n + 2] {
        for &m in &ms {
            table.push((i, m, engine.ko.ko_order(i, m)?));
        }
    }
    rb.assume("adams-collapse-ko");
    rb.step(
        "ko-orders",
        vec!["adams-collapse-ko".to_string()],
        json(&table),
    );

    // 3. bo-lift quadruple
    let quads = [
        (4 * n + 1, 16 * n + 2, true),
        (4 * n + 1, 16 * n + 1, false),
        (4 * n + 2, 16 * n + 6, true),
        (4 * n + 2, 16 * n + 5, false),
    ];
    let mut verdicts = Vec::new();
    for (k, m, want) in quads {
        let v = bo_lift_decision(LiftQuery { p: h, k, m }, &engine.ko)?;
        expect(
            "bo-lift-verdicts",
            v.lifts == want,
            format!(
                "{h}H_{k} against B^o({m}): expected lifts={want}, got {}",
                v.lifts
            ),
        )?;
        verdicts.push(v);
    }
    rb.step(
        "bo-lift-verdicts",
        vec!["adams-collapse-ko".to_string()],
        json(&verdicts),
    );

    // 4. pullback obstruction degrees are empty
    let axioms = engine.fixtures.axioms()?;
    let kernel = axioms
        .get("filt01-kernel-p16n1")
        .ok_or_else(|| DerivationError::MissingPremise("filt01-kernel-p16n1".to_string()))?;
    let offsets: Vec<i64> = serde_json::from_value(kernel.data["offsets"].clone())
        .map_err(|e| DerivationError::MissingPremise(e.to_string()))?;
    let dims: std::collections::BTreeSet<u64> =
        offsets.iter().map(|o| (16 * n as i64 + o) as u64).collect();
    let obstructions = quaternionic_pullback_check(&dims, 4 * n + 2, 1);
    expect(
        "pullback-obstruction-check",
        obstructions.is_empty(),
        format!("expected empty obstruction set, got {obstructions:?}"),
    )?;
    rb.assume("filt01-kernel-p16n1");
    rb.step(
        "pullback-obstruction-check",
        vec!["filt01-kernel-p16n1".to_string()],
        json(serde_json::json!({"fiber_dims": dims, "hp_dim": 4*n+2, "obstruction_degrees": []})),
    );

    // 5. the stage-2 lift premise
    rb.assume("pi-ko-surjective-p16n1");
    rb.step(
        "stage2-lift-premise",
        vec![
            "bo-lift-verdicts".to_string(),
            "pullback-obstruction-check".to_string(),
            "pi-ko-surjective-p16n1".to_string(),
        ],
        json(serde_json::json!({
            "statement": format!("a lifting of {h}H to tower stage 2 exists and sends k(b+4)@2 and k(b+8)@2 nontrivially"),
        })),
    );

    // 6. the bundle's w4 and w8 are nonzero
    let bundle = BundleData {
        multiple: 32 * n + 12,
        base_dim: space,
    };
    let w4 = sw_class(&bundle, 4);
    let w8 = sw_class(&bundle, 8);
    expect(
        "bundle-w-classes",
        !w4.is_zero() && !w8.is_zero(),
        format!(
            "expected w4, w8 nonzero for {}xi, got {w4}, {w8}",
            bundle.multiple
        ),
    )?;
    rb.step(
        "bundle-w-classes",
        vec![],
        json(serde_json::json!({"multiple": bundle.multiple, "w4": w4.to_string(), "w8": w8.to_string()})),
    );

    // 7. stage-2 variation implication
    let model = engine.fixtures.bsp_16n1()?;
    rb.assume("relations-bsp-16n1");
    let m2 = variation_matrix(&model, 2, n)?;
    let ante = [label("k(b+4)@2"), label("k(b+8)@2")].into_iter().collect();
    let cons = [label("k(b+10)@2"), label("k'(b+10)@2")]
        .into_iter()
        .collect();
    let implied = check_implication(&m2, &ante, &cons)?;
    expect(
        "stage2-variation-implication",
        implied,
        "expected the implication to hold".to_string(),
    )?;
    rb.step(
        "stage2-variation-implication",
        vec!["relations-bsp-16n1".to_string()],
        json(serde_json::json!({
            "matrix": m2,
            "antecedent": ["k(b+4)@2", "k(b+8)@2"],
            "consequent": ["k(b+10)@2", "k'(b+10)@2"],
            "holds": implied,
        })),
    );

    // 8. stage-1 kernel triviality (secondary indeterminacy)
    let m1 = variation_matrix(&model, 1, n)?;
    let trivial = crate::mpt::analysis::kernel_trivial(&m1);
    expect(
        "stage1-kernel-trivial",
        trivial,
        "expected independent stage-1 variation rows".to_string(),
    )?;
    rb.step(
        "stage1-kernel-trivial",
        vec!["relations-bsp-16n1".to_string()],
        json(serde_json::json!({"matrix": m1, "trivial": trivial})),
    );

    // 9. conclusion through the geometric-dimension reduction
    let reduction = sanderson_reduce(space, 16 * n + 1);
    rb.step(
        "geometric-dimension-reduction",
        vec![],
        json(serde_json::json!({
            "negation_target": reduction,
            "refuted_by": ["stage2-lift-premise", "stage2-variation-implication", "stage1-kernel-trivial"],
        })),
    );

    let conclusion = Statement::derived(
        StatementKind::NoImmersion { space, ambient },
        vec![
            "stage2-lift-premise".to_string(),
            "stage2-variation-implication".to_string(),
            "stage1-kernel-trivial".to_string(),
            "geometric-dimension-reduction".to_string(),
        ],
    );
    Ok(DerivationRecord {
        target: Target::Nonimmersion2 { n },
        conclusion,
        steps: rb.steps,
        assumptions: rb.assumptions,
    })
}

/// The lifting of `16n xi` over `P^{8n+2}` to geometric dimension `8n-5`
/// (through the symplectic tower), for `alpha(n) > 2`.
pub fn derive_lemma_3_5(engine: &Engine, n: u64) -> Result<DerivationRecord, DerivationError> {
    let a = alpha(&nat(n));
    if a <= 2 {
        return Err(DerivationError::Precondition {
            need: "alpha(n) > 2".to_string(),
            got: format!("alpha({n}) = {a}"),
        });
    }
    let mut rb = RecordBuilder::new();

    // binomial valuations
    let v1 = nu_binom_u64(4 * n, 2 * n - 1).expect("2n-1 <= 4n");
    let v2 = nu_binom_u64(4 * n, 2 * n).expect("2n <= 4n");
    expect(
        "binomial-valuations",
        v1 > 2 && v2 == a,
        format!("expected nu C(4n,2n-1) > 2 and nu C(4n,2n) = alpha(n) = {a}, got {v1}, {v2}"),
    )?;
    rb.step(
        "binomial-valuations",
        vec![],
        json(serde_json::json!({"nu_binom": [[4*n, 2*n-1, v1], [4*n, 2*n, v2]], "alpha_n": a})),
    );

    // ko orders at the bottom of P_{8n-5}
    rb.assume("adams-collapse-ko");
    let k1 = engine.ko.ko_order(2 * n - 1, 8 * n - 5)?;
    let k2 = engine.ko.ko_order(2 * n, 8 * n - 5)?;
    expect(
        "ko-orders",
        k1 == 1 && k2 == 4,
        format!("expected orders 1 and 4 at P_{}, got {k1}, {k2}", 8 * n - 5),
    )?;
    rb.step(
        "ko-orders",
        vec!["adams-collapse-ko".to_string()],
        json(serde_json::json!([
            [2 * n - 1, 8 * n - 5, k1],
            [2 * n, 8 * n - 5, k2]
        ])),
    );

    let axioms = engine.fixtures.axioms()?;
    let kernel = axioms
        .get("filt01-kernel-p8n5")
        .ok_or_else(|| DerivationError::MissingPremise("filt01-kernel-p8n5".to_string()))?;
    let offsets: Vec<i64> = serde_json::from_value(kernel.data["offsets"].clone())
        .map_err(|e| DerivationError::MissingPremise(e.to_string()))?;
    let dims: std::collections::BTreeSet<u64> =
        offsets.iter().map(|o| (8 * n as i64 + o) as u64).collect();
    rb.assume("filt01-kernel-p8n5");

    if a > 3 {
        // direct lift all the way to B^o(8n-5)
        let v = bo_lift_decision(
            LiftQuery {
                p: 4 * n,
                k: 2 * n,
                m: 8 * n - 5,
            },
            &engine.ko,
        )?;
        expect(
            "bo-lift-direct",
            v.lifts,
            format!("expected a lift of 4nH to B^o(8n-5), got {v:?}"),
        )?;
        rb.step(
            "bo-lift-direct",
            vec!["adams-collapse-ko".to_string()],
            json(&v),
        );
        let obstructions = quaternionic_pullback_check(&dims, 2 * n, 1);
        expect(
            "pullback-obstruction-check",
            obstructions.is_empty(),
            format!("expected empty obstruction set, got {obstructions:?}"),
        )?;
        rb.step(
            "pullback-obstruction-check",
            vec!["filt01-kernel-p8n5".to_string()],
            json(serde_json::json!({"fiber_dims": dims, "hp_dim": 2*n, "obstruction_degrees": []})),
        );
    } else {
        // alpha(n) = 3: lift in two pieces, then through the tower stages
        let va = bo_lift_decision(
            LiftQuery {
                p: 4 * n,
                k: 2 * n - 1,
                m: 8 * n - 5,
            },
            &engine.ko,
        )?;
        let vb = bo_lift_decision(
            LiftQuery {
                p: 4 * n,
                k: 2 * n,
                m: 8 * n - 3,
            },
            &engine.ko,
        )?;
        expect(
            "bo-lift-pair",
            va.lifts && vb.lifts,
            format!("expected lifts of 4nH restricted to B^o(8n-5) and 4nH to B^o(8n-3), got {va:?}, {vb:?}"),
        )?;
        rb.assume("pi-ko-surjective-p8n5");
        rb.step(
            "bo-lift-pair",
            vec![
                "adams-collapse-ko".to_string(),
                "pi-ko-surjective-p8n5".to_string(),
            ],
            json(serde_json::json!([va, vb])),
        );
        let obstructions = quaternionic_pullback_check(&dims, 2 * n, 1);
        expect(
            "pullback-obstruction-check",
            obstructions.is_empty(),
            format!("expected empty obstruction set, got {obstructions:?}"),
        )?;
        rb.step(
            "pullback-obstruction-check",
            vec!["filt01-kernel-p8n5".to_string()],
            json(serde_json::json!({"fiber_dims": dims, "hp_dim": 2*n, "obstruction_degrees": []})),
        );
        // the unique level-3 invariant of the two-stage tower is flippable
        let tilde = engine.fixtures.bspin_8n5()?;
        rb.assume("relations-bspin-8n5");
        let deltas = variation_delta(&tilde, 3, &label("k(b+0)@2"), n)?;
        let flip = &deltas[&label("k(b+0)@3")];
        expect(
            "tower-stage3-flip",
            !flip.is_zero(),
            "expected the level-3 invariant to flip through the fiber factor of dimension 8n-1"
                .to_string(),
        )?;
        rb.step(
            "tower-stage3-flip",
            vec!["relations-bspin-8n5".to_string()],
            json(serde_json::json!({"fiber": "k(b+0)@2", "delta": flip.to_string()})),
        );
    }

    let conclusion = Statement::derived(
        StatementKind::Lifting {
            multiple: 16 * n,
            space: 8 * n + 2,
            gd_bound: 8 * n - 5,
            target: "BSp~".to_string(),
        },
        vec![if a > 3 {
            "bo-lift-direct".to_string()
        } else {
            "bo-lift-pair".to_string()
        }],
    );
    Ok(DerivationRecord {
        target: Target::Lemma35 { n },
        conclusion,
        steps: rb.steps,
        assumptions: rb.assumptions,
    })
}

/// Embedding of `P^{8n+4}` in `R^{16n+1}` for `alpha(n) > 2`.
pub fn derive_embedding(engine: &Engine, n: u64) -> Result<DerivationRecord, DerivationError> {
    let a = alpha(&nat(n));
    if a <= 2 {
        return Err(DerivationError::Precondition {
            need: "alpha(n) > 2".to_string(),
            got: format!("alpha({n}) = {a}"),
        });
    }
    let mut rb = RecordBuilder::new();

    // 1. the classical embedding and the normal-bundle twist
    let th = Statement::axiom(
        StatementKind::Embedding {
            space: 8 * n + 2,
            ambient: 16 * n - 1,
        },
        "embedding-p8n2-in-r16n1",
    );
    rb.assume("embedding-p8n2-in-r16n1");
    rb.step(
        "axiom-embedding",
        vec!["embedding-p8n2-in-r16n1".to_string()],
        json(&th),
    );
    let theta = normal_twist_identity(16 * n - 1, 8 * n + 2, &th)?;
    expect(
        "normal-twist",
        theta.kind
            == StatementKind::StableClass {
                base: 8 * n + 2,
                multiple: 16 * n,
                rank: 8 * n - 3,
            },
        format!("unexpected twist class: {}", theta.describe()),
    )?;
    rb.step("normal-twist", vec![], json(&theta));

    // 2. the geometric-dimension lemma, inlined step by step
    let lemma = derive_lemma_3_5(engine, n)?;
    for s in &lemma.steps {
        rb.steps.push(s.clone());
    }
    for ax in &lemma.assumptions {
        rb.assume(ax);
    }
    rb.step(
        "symplectic-to-spin",
        vec![],
        json(serde_json::json!({
            "statement": format!(
                "{}; reinterpreted: {}xi over P^{} lifts to BSpin({})",
                lemma.conclusion.describe(), 16 * n, 8 * n + 2, 8 * n - 5
            ),
        })),
    );

    // 3. spin-tower analysis for the bundle theta
    let model = engine.fixtures.bspin_8n5_8n3()?;
    rb.assume("relations-bspin-8n5-8n3");
    let at = model.at(n)?;
    let bundle = at.bundle;
    let w_top = sw_class(&bundle, 8 * n - 4);
    let w4 = sw_class(&bundle, 4);
    let w8 = sw_class(&bundle, 8);
    expect(
        "w-class-checks",
        w_top.is_zero() && w4.is_zero() && w8.is_zero(),
        format!(
            "expected w_(8n-4) = w4 = w8 = 0 for {}xi, got {w_top}, {w4}, {w8}",
            bundle.multiple
        ),
    )?;
    rb.step(
        "w-class-checks",
        vec!["relations-bspin-8n5-8n3".to_string()],
        json(serde_json::json!({
            "multiple": bundle.multiple,
            "w_8n_minus_4": "0", "w4": "0", "w8": "0",
            "consequence": "the map lifts to the first tower stage",
        })),
    );

    // variation bullets: exactly these classes are changeable
    let mut matrices = Vec::new();
    for stage in 1..=3u32 {
        matrices.push(variation_matrix(&model, stage, n)?);
    }
    let changeable: Vec<Vec<String>> = matrices
        .iter()
        .map(|m| {
            let mut flips: Vec<String> = m
                .rows
                .iter()
                .flat_map(|r| r.flips.iter().map(|l| l.to_string()))
                .collect();
            flips.sort();
            flips.dedup();
            flips
        })
        .collect();
    let want: Vec<Vec<String>> = vec![
        vec!["k(b-3)@1".to_string()],
        vec!["k(b+2)@2".to_string(), "k(b-2)@2".to_string()],
        vec!["k(b+0)@3".to_string()],
    ];
    expect(
        "spin-tower-variation",
        changeable == want,
        format!("changeable classes {changeable:?} differ from the tower bullets"),
    )?;
    rb.step(
        "spin-tower-variation",
        vec!["relations-bspin-8n5-8n3".to_string()],
        json(&matrices),
    );

    // forced vanishing of the two non-flippable invariants; the other source
    // of the level-3 relation contributes nothing on its candidate monomial
    let f1 = forced_vanishing(&model, &label("k(b-1)@2"), &label("k(b-2)@1"), n)?;
    let f2 = forced_vanishing(&model, &label("k(b+0)@3"), &label("k(b-1)@2"), n)?;
    let other = at.eval_term_on(
        &crate::mpt::Term {
            coef: crate::mpt::Coef::One,
            word: crate::cohomology::SteenrodWord(vec![3]),
            source: label("k(b-2)@2"),
        },
        8 * n - 2,
    );
    expect(
        "forced-vanishing",
        f1 && f2 && other.is_zero(),
        format!("expected both forced vanishings (got {f1}, {f2}; stray term {other})"),
    )?;
    rb.step(
        "forced-vanishing",
        vec!["relations-bspin-8n5-8n3".to_string()],
        json(serde_json::json!({
            "level1_invariant_b_minus_2_vanishes": f1,
            "level2_invariant_b_minus_1_vanishes": f2,
            "other_source_term_zero": other.is_zero(),
        })),
    );

    // difference-map evaluation kills the remaining level-1 invariant
    let tilde = engine.fixtures.bspin_8n5()?;
    rb.assume("relations-bspin-8n5");
    rb.assume("stiefel-transfer-k1");
    let d_low = delta_through_level1_fiber(&tilde, &label("k(b-1)@1"), 8 * n - 5, n)?;
    let d_high = delta_through_level1_fiber(&tilde, &label("k(b-1)@1"), 8 * n - 1, n)?;
    expect(
        "difference-map-evaluation",
        d_low.is_zero() && d_high.is_zero(),
        format!("expected zero deltas through the stage-0 fiber, got {d_low}, {d_high}"),
    )?;
    rb.step(
        "difference-map-evaluation",
        vec![
            "relations-bspin-8n5".to_string(),
            "stiefel-transfer-k1".to_string(),
        ],
        json(serde_json::json!({
            "delta_via_dim_8n_minus_5": d_low.to_string(),
            "delta_via_dim_8n_minus_1": d_high.to_string(),
            "consequence": "the level-1 invariant of degree 8n-1 pulls back to zero",
        })),
    );

    // 4. every obstruction is flippable or zero, so theta lifts; 2 sections
    let sections = Statement::derived(
        StatementKind::SectionCount {
            multiple: 16 * n,
            base: 8 * n + 2,
            rank: 8 * n - 3,
            sections: 2,
        },
        vec![
            "spin-tower-variation".to_string(),
            "forced-vanishing".to_string(),
            "difference-map-evaluation".to_string(),
            "symplectic-to-spin".to_string(),
        ],
    );
    rb.step("section-count", vec![], json(&sections));

    // 5. inductive embedding step and smoothing
    rb.assume("embedding-p1-in-s1");
    let topological = mahowald_step(&th, 2, Some((1, 1)), Some(&sections))?;
    rb.step(
        "inductive-embedding-step",
        vec!["embedding-p1-in-s1".to_string()],
        json(&topological),
    );
    let StatementKind::Embedding { space, ambient } = topological.kind else {
        unreachable!("mahowald_step returns an embedding");
    };
    expect(
        "inductive-embedding-step",
        space == 8 * n + 4 && ambient == 16 * n + 1,
        format!(
            "expected P^{} in R^{}, got {}",
            8 * n + 4,
            16 * n + 1,
            topological.describe()
        ),
    )?;
    let smooth = haefliger_ok(ambient, space);
    expect(
        "metastable-smoothing",
        smooth,
        format!("2*{ambient} < 3*{space}"),
    )?;
    rb.step(
        "metastable-smoothing",
        vec![],
        json(serde_json::json!({"ambient": ambient, "manifold": space, "smoothable": smooth})),
    );

    let conclusion = Statement::derived(
        StatementKind::Embedding { space, ambient },
        vec![
            "inductive-embedding-step".to_string(),
            "metastable-smoothing".to_string(),
        ],
    );
    Ok(DerivationRecord {
        target: Target::Embedding { n },
        conclusion,
        steps: rb.steps,
        assumptions: rb.assumptions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine() -> Engine {
        Engine {
            fixtures: Fixtures::builtin(),
            ko: KoTable::new(),
        }
    }

    #[test]
    fn sanderson_examples() {
        let s = sanderson_reduce(58, 49);
        assert_eq!(
            s.kind,
            StatementKind::Lifting {
                multiple: 108,
                space: 58,
                gd_bound: 49,
                target: "BO".to_string()
            }
        );
        let s = sanderson_reduce(31, 31);
        assert_eq!(
            s.kind,
            StatementKind::Lifting {
                multiple: 63,
                space: 31,
                gd_bound: 31,
                target: "BO".to_string()
            }
        );
        let s = sanderson_reduce(56, 42);
        assert!(s.describe().contains("99xi over P^56"));
    }

    #[test]
    fn normal_twist_examples() {
        let th = Statement::axiom(
            StatementKind::Embedding {
                space: 58,
                ambient: 111,
            },
            "embedding-p8n2-in-r16n1",
        );
        let s = normal_twist_identity(111, 58, &th).unwrap();
        assert_eq!(
            s.kind,
            StatementKind::StableClass {
                base: 58,
                multiple: 112,
                rank: 53
            }
        );
        let bad = Statement::axiom(
            StatementKind::Embedding {
                space: 10,
                ambient: 20,
            },
            "x",
        );
        assert!(normal_twist_identity(111, 58, &bad).is_err());
    }

    #[test]
    fn mahowald_examples() {
        let th = Statement::axiom(
            StatementKind::Embedding {
                space: 58,
                ambient: 111,
            },
            "embedding-p8n2-in-r16n1",
        );
        let sections = Statement::derived(
            StatementKind::SectionCount {
                multiple: 112,
                base: 58,
                rank: 53,
                sections: 2,
            },
            vec!["test".to_string()],
        );
        let e = mahowald_step(&th, 2, Some((1, 1)), Some(&sections)).unwrap();
        assert_eq!(
            e.kind,
            StatementKind::Embedding {
                space: 60,
                ambient: 113
            }
        );
        let e0 = mahowald_step(&th, 0, None, None).unwrap();
        assert_eq!(
            e0.kind,
            StatementKind::Embedding {
                space: 58,
                ambient: 111
            }
        );
        let err = mahowald_step(&th, 2, Some((1, 1)), None).unwrap_err();
        assert!(err.to_string().contains("section-count"));
    }

    #[test]
    fn haefliger_examples() {
        assert!(haefliger_ok(113, 60));
        assert!(haefliger_ok(3, 2));
        assert!(!haefliger_ok(33, 28));
    }

    #[test]
    fn nonimmersion_records() {
        let e = engine();
        let r3 = derive_nonimmersion_2(&e, 3).unwrap();
        assert_eq!(
            r3.conclusion.kind,
            StatementKind::NoImmersion {
                space: 58,
                ambient: 107
            }
        );
        let r5 = derive_nonimmersion_2(&e, 5).unwrap();
        assert_eq!(
            r5.conclusion.kind,
            StatementKind::NoImmersion {
                space: 90,
                ambient: 171
            }
        );
        assert!(matches!(
            derive_nonimmersion_2(&e, 7),
            Err(DerivationError::Precondition { .. })
        ));
        assert!(r3.replay(&e).unwrap());
    }

    #[test]
    fn embedding_records() {
        let e = engine();
        let r7 = derive_embedding(&e, 7).unwrap();
        assert_eq!(
            r7.conclusion.kind,
            StatementKind::Embedding {
                space: 60,
                ambient: 113
            }
        );
        let r11 = derive_embedding(&e, 11).unwrap();
        assert_eq!(
            r11.conclusion.kind,
            StatementKind::Embedding {
                space: 92,
                ambient: 177
            }
        );
        assert!(matches!(
            derive_embedding(&e, 3),
            Err(DerivationError::Precondition { .. })
        ));
        assert!(r7.replay(&e).unwrap());
        // every step citing a fixture has it in the assumption list
        for step in &r7.steps {
            for input in &step.inputs {
                if input.starts_with("relations-") || input.starts_with("filt01-") {
                    assert!(
                        r7.assumptions.contains(input),
                        "unlisted assumption {input}"
                    );
                }
            }
        }
    }

    #[test]
    fn alpha4_branch() {
        let e = engine();
        // n = 15 has alpha = 4: the direct branch of the lemma
        let r = derive_lemma_3_5(&e, 15).unwrap();
        assert!(r.steps.iter().any(|s| s.rule == "bo-lift-direct"));
        let emb = derive_embedding(&e, 15).unwrap();
        assert_eq!(
            emb.conclusion.kind,
            StatementKind::Embedding {
                space: 124,
                ambient: 241
            }
        );
    }
}
