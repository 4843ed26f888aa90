//! Fixture data: relation tables, chart transcriptions and the axiom
//! registry.
//!
//! Fixtures are compiled in; setting `OBSTRUCTA_FIXTURES` to a directory
//! overrides any of them by file name.  `verify` re-checks every fixture
//! against engine recomputation where one exists: relation files must parse,
//! round-trip and degree-balance; chart transcriptions must match freshly
//! computed resolutions; the filtration-kernel axioms must match the
//! comparison of the homotopy fixture charts with computed ko charts; and
//! the w-class hypothesis under which the BSpin relation table omits its
//! w4/w8 terms must hold for the bundle the table is used against.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohomology::{sw_class, BundleData};
use crate::ext_a1::chart::{ko_window, ExtChart, KoTable};
use crate::mpt::parse::{parse_relations, print_relations};
use crate::mpt::MptModel;

pub const FIXTURE_NAMES: [&str; 7] = [
    "bsp_16n1.rel",
    "bspin_8n5_8n3.rel",
    "bspin_8n5.rel",
    "ko_charts_16n.json",
    "ko_chart_8n5.json",
    "homotopy_charts.json",
    "axioms.json",
];

const BUILTIN: [(&str, &str); 7] = [
    ("bsp_16n1.rel", include_str!("../fixtures/bsp_16n1.rel")),
    (
        "bspin_8n5_8n3.rel",
        include_str!("../fixtures/bspin_8n5_8n3.rel"),
    ),
    ("bspin_8n5.rel", include_str!("../fixtures/bspin_8n5.rel")),
    (
        "ko_charts_16n.json",
        include_str!("../fixtures/ko_charts_16n.json"),
    ),
    (
        "ko_chart_8n5.json",
        include_str!("../fixtures/ko_chart_8n5.json"),
    ),
    (
        "homotopy_charts.json",
        include_str!("../fixtures/homotopy_charts.json"),
    ),
    ("axioms.json", include_str!("../fixtures/axioms.json")),
];

/// Environment variable naming a directory of fixture overrides.
pub const FIXTURES_ENV: &str = "OBSTRUCTA_FIXTURES";

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`")]
    Unknown(String),
    #[error("fixture `{name}`: {err}")]
    Parse { name: String, err: String },
    #[error("io error reading fixture override: {0}")]
    Io(#[from] std::io::Error),
}

/// A chart transcription: dots per stem, offsets relative to `base_coef·n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChartFixtureFile {
    #[serde(default)]
    pub comment: String,
    pub base_coef: u64,
    /// Towers are displayed through this filtration.
    pub display_filt_max: u32,
    pub panels: Vec<PanelFixture>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PanelFixture {
    pub bottom_offset: i64,
    /// Stem-offset window the figure displays.
    pub window: (i64, i64),
    pub stems: Vec<StemFixture>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StemFixture {
    pub offset: i64,
    pub filts: Vec<u32>,
    pub tower: bool,
}

/// A stable-homotopy chart consumed as data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PiChart {
    pub base_coef: u64,
    pub bottom_offset: i64,
    /// `[stem offset, filtration, multiplicity]`.
    pub dots: Vec<(i64, u32, u32)>,
    #[serde(default)]
    pub maps_across: Vec<(i64, u32)>,
}

impl PiChart {
    /// Multiplicity at `(stem offset, filtration)`.
    pub fn mult(&self, offset: i64, filt: u32) -> u32 {
        self.dots
            .iter()
            .filter(|&&(o, s, _)| o == offset && s == filt)
            .map(|&(_, _, m)| m)
            .sum()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomotopyChartsFile {
    #[serde(default)]
    pub comment: String,
    pub p16n1: PiChart,
    pub p8n5: PiChart,
    pub v8n3_2: PiChart,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Axiom {
    pub id: String,
    pub kind: String,
    pub statement: String,
    pub source: String,
    #[serde(default)]
    pub data: serde_json::Value,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxiomRegistry {
    #[serde(default)]
    pub comment: String,
    pub version: u32,
    pub axioms: Vec<Axiom>,
}

impl AxiomRegistry {
    pub fn get(&self, id: &str) -> Option<&Axiom> {
        self.axioms.iter().find(|a| a.id == id)
    }
}

/// The fixture set in effect (builtin, plus overrides from
/// `OBSTRUCTA_FIXTURES` if set).
pub struct Fixtures {
    texts: BTreeMap<String, String>,
}

impl Fixtures {
    pub fn builtin() -> Self {
        Fixtures {
            texts: BUILTIN
                .iter()
                .map(|&(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }

    /// Builtin fixtures with per-file overrides from the directory named by
    /// `OBSTRUCTA_FIXTURES`, when set.
    pub fn load() -> Result<Self, FixtureError> {
        let mut fx = Self::builtin();
        if let Ok(dir) = std::env::var(FIXTURES_ENV) {
            for name in FIXTURE_NAMES {
                let path = std::path::Path::new(&dir).join(name);
                if path.is_file() {
                    fx.texts
                        .insert(name.to_string(), std::fs::read_to_string(path)?);
                }
            }
        }
        Ok(fx)
    }

    pub fn text(&self, name: &str) -> Result<&str, FixtureError> {
        self.texts
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| FixtureError::Unknown(name.to_string()))
    }

    pub fn model(&self, name: &str) -> Result<MptModel, FixtureError> {
        parse_relations(self.text(name)?).map_err(|e| FixtureError::Parse {
            name: name.to_string(),
            err: e.to_string(),
        })
    }

    /// The tower over BSp targeting BSp~(16n+1).
    pub fn bsp_16n1(&self) -> Result<MptModel, FixtureError> {
        self.model("bsp_16n1.rel")
    }

    /// The tower BSpin(8n-5) -> BSpin(8n-3).
    pub fn bspin_8n5_8n3(&self) -> Result<MptModel, FixtureError> {
        self.model("bspin_8n5_8n3.rel")
    }

    /// The partial two-stage tower BSpin(8n-5) -> BSpin.
    pub fn bspin_8n5(&self) -> Result<MptModel, FixtureError> {
        self.model("bspin_8n5.rel")
    }

    fn json<T: serde::de::DeserializeOwned>(&self, name: &str) -> Result<T, FixtureError> {
        serde_json::from_str(self.text(name)?).map_err(|e| FixtureError::Parse {
            name: name.to_string(),
            err: e.to_string(),
        })
    }

    pub fn ko_charts_16n(&self) -> Result<ChartFixtureFile, FixtureError> {
        self.json("ko_charts_16n.json")
    }

    pub fn ko_chart_8n5(&self) -> Result<ChartFixtureFile, FixtureError> {
        self.json("ko_chart_8n5.json")
    }

    pub fn homotopy_charts(&self) -> Result<HomotopyChartsFile, FixtureError> {
        self.json("homotopy_charts.json")
    }

    pub fn axioms(&self) -> Result<AxiomRegistry, FixtureError> {
        self.json("axioms.json")
    }
}

impl Default for Fixtures {
    fn default() -> Self {
        Self::builtin()
    }
}

/// Engine comparison of one transcribed panel against a computed chart.
///
/// Non-tower stems must match the full computed column dot-for-dot; tower
/// stems must be flagged by the engine and match through the displayed
/// filtration range.
pub fn compare_panel(
    chart: &ExtChart,
    panel: &PanelFixture,
    base: u64,
    display_filt_max: u32,
) -> Result<(), String> {
    let stem_of = |offset: i64| (base as i64 + offset) as u64;
    for offset in panel.window.0..=panel.window.1 {
        let fixture = panel.stems.iter().find(|s| s.offset == offset);
        let expected: Vec<u32> = fixture.map_or_else(Vec::new, |s| s.filts.clone());
        let expected_tower = fixture.is_some_and(|s| s.tower);
        let stem = u32::try_from(stem_of(offset)).expect("stem fits");
        let mut actual: Vec<u32> = Vec::new();
        for (s, m) in chart.stem_column(stem) {
            for _ in 0..m {
                actual.push(s);
            }
        }
        if expected_tower {
            if !chart.has_tower(stem) {
                return Err(format!(
                    "stem offset {offset}: fixture shows a tower, engine found none"
                ));
            }
            let shown: Vec<u32> = actual
                .iter()
                .copied()
                .filter(|&s| s <= display_filt_max)
                .collect();
            if shown != expected {
                return Err(format!(
                    "stem offset {offset}: tower column {shown:?} != fixture {expected:?}"
                ));
            }
        } else {
            if chart.has_tower(stem) {
                return Err(format!(
                    "stem offset {offset}: engine flags a tower, fixture shows none"
                ));
            }
            if actual != expected {
                return Err(format!(
                    "stem offset {offset}: column {actual:?} != fixture {expected:?}"
                ));
            }
        }
    }
    Ok(())
}

/// Compare a whole chart fixture file against fresh resolutions at `n`.
pub fn verify_chart_fixture(fx: &ChartFixtureFile, n: u64, ko: &KoTable) -> Result<(), String> {
    let base = fx.base_coef * n;
    for panel in &fx.panels {
        let m = u32::try_from(base as i64 + panel.bottom_offset).map_err(|_| "bad bottom")?;
        let hi = u32::try_from(base as i64 + panel.window.1).map_err(|_| "bad window")?;
        let (s_max, top) = ko_window(hi, m);
        let chart = ko
            .stunted_chart(m, s_max, top)
            .map_err(|e| format!("P_{m}: {e}"))?;
        compare_panel(&chart, panel, base, fx.display_filt_max)
            .map_err(|e| format!("P_{m}: {e}"))?;
    }
    Ok(())
}

/// Filtration-<=1 dimensions where the homotopy fixture chart has more dots
/// than the computed ko chart: the kernel dimensions the pullback
/// obstruction argument consumes.
pub fn filt01_kernel_offsets(pi: &PiChart, n: u64, ko: &KoTable) -> Result<Vec<i64>, String> {
    let base = pi.base_coef * n;
    let m = u32::try_from(base as i64 + pi.bottom_offset).map_err(|_| "bad bottom")?;
    let max_offset = pi.dots.iter().map(|&(o, _, _)| o).max().unwrap_or(0);
    let hi = u32::try_from(base as i64 + max_offset).map_err(|_| "bad window")?;
    let (s_max, top) = ko_window(hi, m);
    let chart = ko
        .stunted_chart(m, s_max, top)
        .map_err(|e| format!("P_{m}: {e}"))?;
    let mut offsets = Vec::new();
    for &(offset, filt, mult) in &pi.dots {
        if filt > 1 {
            continue;
        }
        let stem = u32::try_from(base as i64 + offset).map_err(|_| "bad stem")?;
        let ko_mult: u32 = chart
            .stem_column(stem)
            .into_iter()
            .filter(|&(s, _)| s == filt)
            .map(|(_, m)| m)
            .sum();
        if mult > ko_mult && !offsets.contains(&offset) {
            offsets.push(offset);
        }
    }
    offsets.sort_unstable();
    Ok(offsets)
}

/// Outcome of one fixture verification.
#[derive(Debug, Serialize)]
pub struct VerifyItem {
    pub fixture: String,
    pub check: String,
    pub ok: bool,
    pub detail: String,
}

/// Re-check every fixture against engine recomputation where one exists.
pub fn verify_all(fx: &Fixtures, ko: &KoTable) -> Vec<VerifyItem> {
    let mut items = Vec::new();
    let mut push = |fixture: &str, check: &str, r: Result<String, String>| {
        let (ok, detail) = match r {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        items.push(VerifyItem {
            fixture: fixture.to_string(),
            check: check.to_string(),
            ok,
            detail,
        });
    };

    // relation files: parse, round-trip, degree balance (parse-time)
    for name in ["bsp_16n1.rel", "bspin_8n5_8n3.rel", "bspin_8n5.rel"] {
        match fx.model(name) {
            Err(e) => push(name, "parse", Err(e.to_string())),
            Ok(model) => {
                push(name, "parse", Ok("degree-balanced".to_string()));
                let printed = print_relations(&model);
                match parse_relations(&printed) {
                    Ok(again) if again == model => {
                        push(name, "round-trip", Ok("parse∘print = id".to_string()))
                    }
                    Ok(_) => push(name, "round-trip", Err("models differ".to_string())),
                    Err(e) => push(name, "round-trip", Err(e.to_string())),
                }
            }
        }
    }

    // structure counts of the towers
    if let Ok(model) = fx.bsp_16n1() {
        let counts: Vec<usize> = model.stages.iter().map(|s| s.k_invariants.len()).collect();
        let ok = model.stage0.len() == 3 && counts == vec![7, 6, 2, 1];
        push(
            "bsp_16n1.rel",
            "shape",
            if ok {
                Ok("3 stage-0 classes, 7+6+2+1 k-invariants".to_string())
            } else {
                Err(format!(
                    "unexpected shape: stage0 {} counts {counts:?}",
                    model.stage0.len()
                ))
            },
        );
    }
    if let Ok(model) = fx.bspin_8n5_8n3() {
        let counts: Vec<usize> = model.stages.iter().map(|s| s.k_invariants.len()).collect();
        let ok = model.stage0.len() == 1 && counts == vec![3, 3, 1];
        push(
            "bspin_8n5_8n3.rel",
            "shape",
            if ok {
                Ok("1 stage-0 class, 3+3+1 k-invariants".to_string())
            } else {
                Err(format!(
                    "unexpected shape: stage0 {} counts {counts:?}",
                    model.stage0.len()
                ))
            },
        );
        // the table omits w4/w8 terms; that needs w4 = w8 = 0 for the bundle
        match model.at(7) {
            Ok(at) => {
                let b = BundleData {
                    multiple: at.bundle.multiple,
                    base_dim: at.space,
                };
                let ok = sw_class(&b, 4).is_zero() && sw_class(&b, 8).is_zero();
                push(
                    "bspin_8n5_8n3.rel",
                    "w4-w8-vanish",
                    if ok {
                        Ok(format!("w4 = w8 = 0 for {}ξ", b.multiple))
                    } else {
                        Err(format!("w4 or w8 nonzero for {}ξ", b.multiple))
                    },
                );
            }
            Err(e) => push("bspin_8n5_8n3.rel", "w4-w8-vanish", Err(e.to_string())),
        }
    }

    // chart fixtures against fresh resolutions at n = 3
    match fx.ko_charts_16n() {
        Ok(charts) => push(
            "ko_charts_16n.json",
            "recompute(n=3)",
            verify_chart_fixture(&charts, 3, ko).map(|_| "dot-for-dot".to_string()),
        ),
        Err(e) => push("ko_charts_16n.json", "parse", Err(e.to_string())),
    }
    match fx.ko_chart_8n5() {
        Ok(charts) => push(
            "ko_chart_8n5.json",
            "recompute(n=3)",
            verify_chart_fixture(&charts, 3, ko).map(|_| "dot-for-dot".to_string()),
        ),
        Err(e) => push("ko_chart_8n5.json", "parse", Err(e.to_string())),
    }

    // kernel axioms against homotopy fixtures + computed ko charts
    match (fx.homotopy_charts(), fx.axioms()) {
        (Ok(charts), Ok(axioms)) => {
            for (axiom_id, pi) in [
                ("filt01-kernel-p16n1", &charts.p16n1),
                ("filt01-kernel-p8n5", &charts.p8n5),
            ] {
                let expected: Vec<i64> = axioms
                    .get(axiom_id)
                    .and_then(|a| a.data.get("offsets"))
                    .and_then(|v| serde_json::from_value(v.clone()).ok())
                    .unwrap_or_default();
                let r = filt01_kernel_offsets(pi, 3, ko).and_then(|got| {
                    if got == expected {
                        Ok(format!("kernel offsets {got:?}"))
                    } else {
                        Err(format!("computed {got:?}, axiom claims {expected:?}"))
                    }
                });
                push("axioms.json", axiom_id, r);
            }
            // the transfer axiom names a dot that must exist in both charts
            if let Some(a) = axioms.get("stiefel-transfer-k1") {
                let dot: Option<(i64, u32)> =
                    serde_json::from_value(a.data.get("dot").cloned().unwrap_or_default()).ok();
                let r = match dot {
                    Some((o, s)) => {
                        let in_v = charts.v8n3_2.mult(o, s) > 0
                            && charts.v8n3_2.maps_across.contains(&(o, s));
                        let in_p = charts.p8n5.mult(o, s) > 0;
                        if in_v && in_p {
                            Ok(format!("dot ({o},{s}) present and marked across"))
                        } else {
                            Err(format!("dot ({o},{s}) missing from a chart"))
                        }
                    }
                    None => Err("axiom data carries no dot".to_string()),
                };
                push("axioms.json", "stiefel-transfer-k1", r);
            }
        }
        (Err(e), _) => push("homotopy_charts.json", "parse", Err(e.to_string())),
        (_, Err(e)) => push("axioms.json", "parse", Err(e.to_string())),
    }

    items
}
