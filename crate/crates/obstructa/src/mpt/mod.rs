//! Modified-Postnikov-tower engine.
//!
//! A tower is described by a relation file (grammar in [`parse`]): a
//! symbolic base dimension `b = coef·n + offset`, a bundle and a space, the
//! stage-0 Stiefel–Whitney classes, and per stage the k-invariants, each
//! with the relation that gives rise to it.  Relations are F2 sums of terms
//! `coefficient · Steenrod-word · source`, the coefficient one of
//! `1, w4, w8, w4^2` and the source a previous-stage k-invariant or a
//! stage-0 class.
//!
//! Everything downstream ([`analysis`]) is evaluation of those terms on the
//! cohomology of the space being lifted: varying a lifting through a fiber
//! class `x^d` changes the pullback of a k-invariant by the sum of its
//! relation terms at that source, with `Sq`-words evaluated on `x^d` and
//! `w`-coefficients evaluated on the bundle.

pub mod analysis;
pub mod parse;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cohomology::{self, BundleData, CohomologyClass, SteenrodWord};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MptError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: degree imbalance in term `{term}`: {detail}")]
    DegreeImbalance {
        line: usize,
        term: String,
        detail: String,
    },
    #[error("line {line}: dangling source reference `{reference}`")]
    DanglingSource { line: usize, reference: String },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("label `{0}` does not name a stage-{1} class")]
    WrongStage(String, u32),
    #[error("relation `{0}` does not reference `{1}`")]
    MissingSource(String, String),
    #[error("relation `{0}` is not carried by the model (declared unknown)")]
    UnknownRelation(String),
    #[error("degree expression instantiates out of range at n = {n}: {expr}")]
    DegreeOverflow { n: u64, expr: String },
}

/// A linear dimension expression `coef·n + offset`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct DimExpr {
    pub coef: u64,
    pub offset: i64,
}

impl DimExpr {
    pub fn eval(&self, n: u64) -> Result<u64, MptError> {
        let v = (self.coef as i128) * (n as i128) + self.offset as i128;
        u64::try_from(v).map_err(|_| MptError::DegreeOverflow {
            n,
            expr: self.to_string(),
        })
    }
}

impl fmt::Display for DimExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.offset < 0 {
            write!(f, "{}n-{}", self.coef, -self.offset)
        } else {
            write!(f, "{}n+{}", self.coef, self.offset)
        }
    }
}

/// w-coefficient of a relation term.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Coef {
    One,
    W4,
    W8,
    W4W4,
}

impl Coef {
    pub fn degree(self) -> u64 {
        match self {
            Coef::One => 0,
            Coef::W4 => 4,
            Coef::W8 | Coef::W4W4 => 8,
        }
    }

    /// Evaluate on the bundle, as a class of the base space.
    pub fn eval(self, bundle: &BundleData) -> CohomologyClass {
        match self {
            Coef::One => CohomologyClass::one(bundle.base_dim),
            Coef::W4 => cohomology::sw_class(bundle, 4),
            Coef::W8 => cohomology::sw_class(bundle, 8),
            Coef::W4W4 => {
                let w4 = cohomology::sw_class(bundle, 4);
                cohomology::multiply(&w4, &w4).expect("same truncation")
            }
        }
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coef::One => Ok(()),
            Coef::W4 => write!(f, "w4"),
            Coef::W8 => write!(f, "w8"),
            Coef::W4W4 => write!(f, "w4w4"),
        }
    }
}

/// A stage-0 class `w(b+off)` or a k-invariant `k['](b+off)@stage`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Label {
    W {
        offset: i64,
    },
    K {
        prime: bool,
        offset: i64,
        stage: u32,
    },
}

impl Label {
    pub fn stage(&self) -> u32 {
        match self {
            Label::W { .. } => 0,
            Label::K { stage, .. } => *stage,
        }
    }

    pub fn offset(&self) -> i64 {
        match self {
            Label::W { offset } | Label::K { offset, .. } => *offset,
        }
    }

    fn fmt_degree(offset: i64) -> String {
        match offset.cmp(&0) {
            std::cmp::Ordering::Equal => "b+0".to_string(),
            std::cmp::Ordering::Greater => format!("b+{offset}"),
            std::cmp::Ordering::Less => format!("b-{}", -offset),
        }
    }

    /// The label as it appears on a defining line (no stage suffix).
    pub fn decl(&self) -> String {
        match self {
            Label::W { offset } => format!("w({})", Self::fmt_degree(*offset)),
            Label::K { prime, offset, .. } => format!(
                "k{}({})",
                if *prime { "'" } else { "" },
                Self::fmt_degree(*offset)
            ),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::W { .. } => write!(f, "{}", self.decl()),
            Label::K { stage, .. } => write!(f, "{}@{}", self.decl(), stage),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// One relation term: `coef · word · source`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Term {
    pub coef: Coef,
    pub word: SteenrodWord,
    pub source: Label,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.coef != Coef::One {
            parts.push(self.coef.to_string());
        }
        for k in &self.word.0 {
            parts.push(format!("Sq{k}"));
        }
        parts.push(self.source.to_string());
        write!(f, "{}", parts.join(" "))
    }
}

/// The relation giving rise to a k-invariant.  `Unknown` marks invariants a
/// fixture declares (so they can be referenced as sources) without carrying
/// their relation.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum RelationBody {
    Known(Vec<Term>),
    Unknown,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct KInvariant {
    pub prime: bool,
    pub offset: i64,
    pub relation: RelationBody,
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct Stage {
    pub k_invariants: Vec<KInvariant>,
}

/// A parsed, validated tower.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct MptModel {
    pub base: DimExpr,
    pub bundle: DimExpr,
    pub space: DimExpr,
    /// Degree offsets of the stage-0 classes, in file order.
    pub stage0: Vec<i64>,
    /// `stages[j - 1]` holds stage `j`.
    pub stages: Vec<Stage>,
}

impl MptModel {
    pub fn stage(&self, j: u32) -> Option<&Stage> {
        if j == 0 {
            return None;
        }
        self.stages.get((j - 1) as usize)
    }

    pub fn stage_count(&self) -> u32 {
        self.stages.len() as u32
    }

    /// Labels of one stage; stage 0 gives the w-classes.
    pub fn labels_of_stage(&self, j: u32) -> Vec<Label> {
        if j == 0 {
            return self
                .stage0
                .iter()
                .map(|&offset| Label::W { offset })
                .collect();
        }
        self.stage(j).map_or_else(Vec::new, |s| {
            s.k_invariants
                .iter()
                .map(|k| Label::K {
                    prime: k.prime,
                    offset: k.offset,
                    stage: j,
                })
                .collect()
        })
    }

    pub fn find(&self, label: &Label) -> Option<&KInvariant> {
        match label {
            Label::W { .. } => None,
            Label::K {
                prime,
                offset,
                stage,
            } => self
                .stage(*stage)?
                .k_invariants
                .iter()
                .find(|k| k.prime == *prime && k.offset == *offset),
        }
    }

    pub fn has_label(&self, label: &Label) -> bool {
        match label {
            Label::W { offset } => self.stage0.contains(offset),
            Label::K { .. } => self.find(label).is_some(),
        }
    }

    /// Instantiate the symbolic dimensions at a concrete `n`.
    pub fn at(&self, n: u64) -> Result<ModelAt<'_>, MptError> {
        let base = self.base.eval(n)?;
        let space = self.space.eval(n)?;
        let bundle = BundleData {
            multiple: self.bundle.eval(n)?,
            base_dim: space,
        };
        let at = ModelAt {
            model: self,
            n,
            base,
            space,
            bundle,
        };
        // degrees strictly positive and within the working range
        for j in 0..=self.stage_count() {
            for label in self.labels_of_stage(j) {
                let d = at.degree_of(&label)?;
                if d == 0 || d > space + 3 {
                    return Err(MptError::DegreeOverflow {
                        n,
                        expr: label.to_string(),
                    });
                }
            }
        }
        Ok(at)
    }
}

/// A model with `n` fixed; all degrees concrete.
pub struct ModelAt<'m> {
    pub model: &'m MptModel,
    pub n: u64,
    pub base: u64,
    pub space: u64,
    pub bundle: BundleData,
}

impl ModelAt<'_> {
    pub fn degree_of(&self, label: &Label) -> Result<u64, MptError> {
        if !self.model.has_label(label) {
            return Err(MptError::UnknownLabel(label.to_string()));
        }
        let d = self.base as i128 + label.offset() as i128;
        u64::try_from(d).map_err(|_| MptError::DegreeOverflow {
            n: self.n,
            expr: label.to_string(),
        })
    }

    /// Evaluate one term on the monomial `x^d` of the space.
    pub fn eval_term_on(&self, term: &Term, d: u64) -> CohomologyClass {
        let x = CohomologyClass::monomial(self.space, d);
        let img = cohomology::sq_word(&term.word, &x);
        let coef = term.coef.eval(&self.bundle);
        cohomology::multiply(&coef, &img).expect("same truncation")
    }
}
