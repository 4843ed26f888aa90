//! Indeterminacy and forced-vanishing analysis on a parsed tower.
//!
//! Varying a stage-`j` lifting through the fiber class coming from a
//! stage-`j-1` invariant of degree `d+1` composes the lifting with the
//! action of `x^d`; the pullback of a stage-`j` invariant changes by the sum
//! of its relation terms at that source, evaluated on `x^d`.  A k-invariant
//! "flips" when that delta is the nonzero monomial in its degree.  Stacking
//! the deltas over all fiber classes gives an F2 matrix, and the two logical
//! gates of the nonimmersion argument are row-span quantifications over it.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::cohomology::CohomologyClass;

use super::{Label, ModelAt, MptError, MptModel, RelationBody};

/// The change of every stage-`j` invariant when the lifting is varied
/// through one fiber class.
pub fn variation_delta(
    model: &MptModel,
    stage: u32,
    fiber: &Label,
    n: u64,
) -> Result<BTreeMap<Label, CohomologyClass>, MptError> {
    let at = model.at(n)?;
    delta_at(&at, stage, fiber)
}

fn delta_at(
    at: &ModelAt<'_>,
    stage: u32,
    fiber: &Label,
) -> Result<BTreeMap<Label, CohomologyClass>, MptError> {
    let model = at.model;
    if stage == 0 || stage > model.stage_count() {
        return Err(MptError::WrongStage(format!("stage {stage}"), stage));
    }
    if fiber.stage() + 1 != stage || !model.has_label(fiber) {
        return Err(MptError::WrongStage(fiber.to_string(), stage - 1));
    }
    let fiber_dim = at.degree_of(fiber)? - 1;
    let mut out = BTreeMap::new();
    for label in model.labels_of_stage(stage) {
        let inv = model.find(&label).expect("label enumerated from the stage");
        let terms = match &inv.relation {
            RelationBody::Known(t) => t,
            RelationBody::Unknown => return Err(MptError::UnknownRelation(label.to_string())),
        };
        let mut delta = CohomologyClass::zero(at.space);
        for term in terms.iter().filter(|t| t.source == *fiber) {
            delta = delta
                .add(&at.eval_term_on(term, fiber_dim))
                .expect("same truncation");
        }
        out.insert(label, delta);
    }
    Ok(out)
}

/// One row of a variation matrix: the fiber class and the invariants whose
/// pullbacks it flips.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct VariationRow {
    pub fiber: Label,
    pub fiber_dim: u64,
    pub flips: Vec<Label>,
}

/// F2 matrix of "which k-invariant images flip" per fiber class of a stage.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct VariationMatrix {
    pub stage: u32,
    pub n: u64,
    pub columns: Vec<Label>,
    pub rows: Vec<VariationRow>,
}

impl VariationMatrix {
    fn col_index(&self, label: &Label) -> Result<usize, MptError> {
        self.columns
            .iter()
            .position(|c| c == label)
            .ok_or_else(|| MptError::UnknownLabel(label.to_string()))
    }

    fn row_mask(&self, row: &VariationRow) -> u64 {
        let mut mask = 0u64;
        for f in &row.flips {
            let i = self.col_index(f).expect("flip labels are columns");
            mask |= 1 << i;
        }
        mask
    }

    pub fn flips_of(&self, fiber: &Label) -> Option<&[Label]> {
        self.rows
            .iter()
            .find(|r| r.fiber == *fiber)
            .map(|r| r.flips.as_slice())
    }
}

/// Stack [`variation_delta`] over every fiber class of the stage.
pub fn variation_matrix(model: &MptModel, stage: u32, n: u64) -> Result<VariationMatrix, MptError> {
    let at = model.at(n)?;
    let columns = model.labels_of_stage(stage);
    let mut rows = Vec::new();
    for fiber in model.labels_of_stage(stage - 1) {
        let deltas = delta_at(&at, stage, &fiber)?;
        let flips: Vec<Label> = columns
            .iter()
            .filter(|c| !deltas[c].is_zero())
            .copied()
            .collect();
        rows.push(VariationRow {
            fiber,
            fiber_dim: at.degree_of(&fiber)? - 1,
            flips,
        });
    }
    Ok(VariationMatrix {
        stage,
        n,
        columns,
        rows,
    })
}

/// True iff every F2 combination of rows whose support contains all
/// antecedent labels also meets the consequent set.  Decided by enumerating
/// the row span (the towers here have at most 8 fiber classes per stage).
pub fn check_implication(
    matrix: &VariationMatrix,
    antecedent: &BTreeSet<Label>,
    consequent: &BTreeSet<Label>,
) -> Result<bool, MptError> {
    assert!(matrix.rows.len() <= 20, "row span enumeration blowup");
    let mut ante = 0u64;
    for l in antecedent {
        ante |= 1 << matrix.col_index(l)?;
    }
    let mut cons = 0u64;
    for l in consequent {
        cons |= 1 << matrix.col_index(l)?;
    }
    let masks: Vec<u64> = matrix.rows.iter().map(|r| matrix.row_mask(r)).collect();
    for combo in 0u64..(1 << masks.len()) {
        let mut support = 0u64;
        for (i, m) in masks.iter().enumerate() {
            if combo >> i & 1 == 1 {
                support ^= m;
            }
        }
        if support & ante == ante && support & cons == 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff no nonzero F2 combination of rows is the zero vector, i.e. the
/// rows are linearly independent.
pub fn kernel_trivial(matrix: &VariationMatrix) -> bool {
    let mut basis: Vec<u64> = Vec::new();
    for row in &matrix.rows {
        let mut m = matrix.row_mask(row);
        loop {
            let before = m;
            for &b in &basis {
                let pivot = 1u64 << (63 - b.leading_zeros());
                if m & pivot != 0 {
                    m ^= b;
                }
            }
            if m == before {
                break;
            }
        }
        if m == 0 {
            return false;
        }
        basis.push(m);
    }
    true
}

/// The relation named `relation` contains terms at `candidate`; if the sum
/// of those terms evaluated on the only possible nonzero pullback value
/// `x^{deg(candidate)}` is nonzero, the relation forces the candidate
/// pullback to vanish.  The caller is responsible for knowing that every
/// other source of the relation contributes zero.
pub fn forced_vanishing(
    model: &MptModel,
    relation: &Label,
    candidate: &Label,
    n: u64,
) -> Result<bool, MptError> {
    let at = model.at(n)?;
    let inv = model
        .find(relation)
        .ok_or_else(|| MptError::UnknownLabel(relation.to_string()))?;
    let terms = match &inv.relation {
        RelationBody::Known(t) => t,
        RelationBody::Unknown => return Err(MptError::UnknownRelation(relation.to_string())),
    };
    if !model.has_label(candidate) {
        return Err(MptError::UnknownLabel(candidate.to_string()));
    }
    let at_source: Vec<_> = terms.iter().filter(|t| t.source == *candidate).collect();
    if at_source.is_empty() {
        return Err(MptError::MissingSource(
            relation.to_string(),
            candidate.to_string(),
        ));
    }
    let d = at.degree_of(candidate)?;
    let mut total = CohomologyClass::zero(at.space);
    for term in at_source {
        total = total
            .add(&at.eval_term_on(term, d))
            .expect("same truncation");
    }
    Ok(!total.is_zero())
}

/// Obstruction degrees to compressing a map of `HP^{hp_dim}` through a
/// comparison fiber with homotopy in `fiber_degrees`: the obstruction in
/// `H^{d+shift}(HP^{hp_dim}; pi_d)` can be nonzero only in degrees that are
/// positive multiples of 4 up to `4·hp_dim`.  Empty output means the
/// pullback exists.  (`shift` is the homotopy-to-obstruction degree offset,
/// 1 for a one-stage compression.)
pub fn quaternionic_pullback_check(
    fiber_degrees: &BTreeSet<u64>,
    hp_dim: u64,
    shift: u64,
) -> BTreeSet<u64> {
    fiber_degrees
        .iter()
        .map(|d| d + shift)
        .filter(|&o| o % 4 == 0 && o > 0 && o / 4 <= hp_dim)
        .collect()
}

/// Evaluate a stage-1 relation on the stage-0 fiber class of dimension
/// `fiber_dim`, with w-coefficients from the model's bundle: the change of a
/// level-1 k-invariant under a difference map through the stage-0 fiber.
pub fn delta_through_level1_fiber(
    model: &MptModel,
    relation: &Label,
    fiber_dim: u64,
    n: u64,
) -> Result<CohomologyClass, MptError> {
    if relation.stage() != 1 {
        return Err(MptError::WrongStage(relation.to_string(), 1));
    }
    let at = model.at(n)?;
    let fiber = model
        .labels_of_stage(0)
        .into_iter()
        .find(|w| at.degree_of(w).map(|d| d - 1) == Ok(fiber_dim));
    let Some(fiber) = fiber else {
        return Err(MptError::UnknownLabel(format!(
            "stage-0 fiber class of dimension {fiber_dim}"
        )));
    };
    let deltas = delta_at(&at, 1, &fiber)?;
    deltas
        .get(relation)
        .cloned()
        .ok_or_else(|| MptError::UnknownLabel(relation.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpt::parse::{parse_label, parse_relations};

    fn toy() -> MptModel {
        parse_relations(
            "base 8n+0\nbundle 16n+4\nspace 8n+2\nstage 0\nw(b-4)\nw(b+0)\nstage 1\nk(b-1) = (Sq4 + w4) w(b-4)\n",
        )
        .unwrap()
    }

    #[test]
    fn delta_with_nonzero_w4() {
        // bundle 16n+4 has w4 = x^4, so the fiber variation lands on x^{8n-1}
        let model = toy();
        let d =
            delta_through_level1_fiber(&model, &parse_label("k(b-1)@1").unwrap(), 51, 7).unwrap();
        assert_eq!(d, crate::cohomology::CohomologyClass::monomial(58, 55));
        // through the other fiber class (no terms at that source): zero
        let d0 =
            delta_through_level1_fiber(&model, &parse_label("k(b-1)@1").unwrap(), 55, 7).unwrap();
        assert!(d0.is_zero());
    }

    #[test]
    fn implication_trivial_cases() {
        let model = toy();
        let m = variation_matrix(&model, 1, 7).unwrap();
        // the single row flips k(b-1)@1
        assert_eq!(m.rows.len(), 2);
        let k = parse_label("k(b-1)@1").unwrap();
        let ante: BTreeSet<Label> = [k].into_iter().collect();
        // antecedent ⊆ consequent
        assert!(check_implication(&m, &ante, &ante).unwrap());
    }

    #[test]
    fn repeated_row_kills_kernel_triviality() {
        let model = toy();
        let mut m = variation_matrix(&model, 1, 7).unwrap();
        // duplicate the nonzero row
        let row = m
            .rows
            .iter()
            .find(|r| !r.flips.is_empty())
            .expect("w4 is nonzero for 16n+4")
            .clone();
        m.rows = vec![row.clone(), row];
        assert!(!kernel_trivial(&m));
    }

    #[test]
    fn quaternionic_examples() {
        let degs: BTreeSet<u64> = [52u64, 54, 56].into_iter().collect();
        assert!(quaternionic_pullback_check(&degs, 14, 1).is_empty());
        let degs: BTreeSet<u64> = [43u64].into_iter().collect();
        assert_eq!(
            quaternionic_pullback_check(&degs, 11, 1),
            [44u64].into_iter().collect()
        );
        // dimensions 8n-2 and 8n at n = 7: nothing congruent to 3 mod 4
        let degs: BTreeSet<u64> = [54u64, 56].into_iter().collect();
        assert!(quaternionic_pullback_check(&degs, 14, 1).is_empty());
    }

    #[test]
    fn implication_fails_without_the_second_antecedent() {
        // flipping only k(b+4)@2 is possible without touching the
        // consequent pair: the row through the bottom fiber also flips
        // k'(b+8)@2 but neither degree-(b+10) invariant
        let fx = crate::fixtures::Fixtures::builtin();
        let model = fx.bsp_16n1().unwrap();
        let m = variation_matrix(&model, 2, 3).unwrap();
        let ante: BTreeSet<Label> = [parse_label("k(b+4)@2").unwrap()].into_iter().collect();
        let cons: BTreeSet<Label> = [
            parse_label("k(b+10)@2").unwrap(),
            parse_label("k'(b+10)@2").unwrap(),
        ]
        .into_iter()
        .collect();
        assert!(!check_implication(&m, &ante, &cons).unwrap());
    }

    #[test]
    fn forcing_fails_when_the_word_kills_the_monomial() {
        // Sq3 on x^{8n-2} is zero, so the level-3 relation does not force
        // the level-2 invariant of degree 8n-2
        let fx = crate::fixtures::Fixtures::builtin();
        let model = fx.bspin_8n5_8n3().unwrap();
        let forced = forced_vanishing(
            &model,
            &parse_label("k(b+0)@3").unwrap(),
            &parse_label("k(b-2)@2").unwrap(),
            7,
        )
        .unwrap();
        assert!(!forced);
        // relation not referencing the candidate errors
        let err = forced_vanishing(
            &model,
            &parse_label("k(b-1)@2").unwrap(),
            &parse_label("k(b-1)@1").unwrap(),
            7,
        );
        assert!(matches!(err, Err(MptError::MissingSource(_, _))));
    }
}
