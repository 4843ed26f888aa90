//! Adams charts read off minimal resolutions, and ko-homology orders of
//! stunted projective spectra.
//!
//! A chart dot at `(stem, filtration) = (t - s, s)` stands for a resolution
//! generator; `h0` lines are boundary entries that are exactly `Sq1`, `h1`
//! lines entries that are exactly `Sq2`.  A stem whose column of dots
//! reaches the computed filtration ceiling is flagged as a tower and is
//! never reported as a finite order.
//!
//! `nu(|ko_{4i-1}(P_m)|)` is the number of dots in stem `4i-1` of the chart
//! of `P_m`, under the standing assumptions that the Adams spectral sequence
//! for `ko ∧ P_m` collapses in the computed range and that all hidden
//! extensions are resolved by the h0 towers.  Those assumptions ride along
//! in every verdict as [`KO_ASSUMPTION`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::resolution::{minimal_resolution, Resolution, ResolutionError};
use super::A1Module;
use crate::steenrod::{SQ1, SQ2};

/// Provenance tag attached to every ko-order verdict.
pub const KO_ASSUMPTION: &str =
    "adams-collapse: charts for ko ∧ P_m collapse in the computed range with extensions resolved by h0 towers";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KoError {
    #[error("stem {stem} carries an h0 tower reaching the ceiling: the group is not finite")]
    InfiniteTower { stem: u32 },
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error("module window is invalid: {0}")]
    Module(String),
    #[error("index i must be at least 1")]
    BadIndex,
}

/// Chart dots, structure lines and tower flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtChart {
    /// `(stem, filtration) -> multiplicity`.
    pub dots: BTreeMap<(u32, u32), u32>,
    /// Lines `(d, s) -> (d, s+1)` given by their lower dot.
    pub h0: BTreeSet<(u32, u32)>,
    /// Lines `(d, s) -> (d+1, s+1)` given by their lower dot.
    pub h1: BTreeSet<(u32, u32)>,
    /// Stems whose dot column reaches the filtration ceiling.
    pub towers: BTreeSet<u32>,
    /// The filtration ceiling of the computation that produced the chart.
    pub s_ceiling: u32,
}

/// The documented JSON shape:
/// `{"dots": [[stem, filtration, multiplicity]], "h0": [[[d,s],[d,s+1]]],
///   "h1": [[[d,s],[d+1,s+1]]], "towers": [stems], "s_ceiling": s}`.
#[derive(Serialize, Deserialize)]
struct ChartJson {
    dots: Vec<(u32, u32, u32)>,
    h0: Vec<((u32, u32), (u32, u32))>,
    h1: Vec<((u32, u32), (u32, u32))>,
    towers: Vec<u32>,
    s_ceiling: u32,
}

impl ExtChart {
    /// Read the chart of a resolution.
    pub fn from_resolution(res: &Resolution) -> Self {
        let mut dots = BTreeMap::new();
        let mut h0 = BTreeSet::new();
        let mut h1 = BTreeSet::new();
        for s in 0..=res.s_max() {
            for (i, &t) in res.generator_degrees(s).iter().enumerate() {
                let stem = t - s as u32;
                *dots.entry((stem, s as u32)).or_insert(0) += 1;
                for &(tgt, mask) in res.boundary_of(s, i) {
                    let t_prev = res.generator_degrees(s - 1)[tgt];
                    if t - t_prev == 1 && mask == SQ1 {
                        h0.insert((stem, s as u32 - 1));
                    }
                    if t - t_prev == 2 && mask == SQ2 {
                        h1.insert((stem - 1, s as u32 - 1));
                    }
                }
            }
        }
        let s_ceiling = res.s_max() as u32;
        let towers = dots
            .keys()
            .filter(|&&(_, s)| s == s_ceiling)
            .map(|&(d, _)| d)
            .collect();
        ExtChart {
            dots,
            h0,
            h1,
            towers,
            s_ceiling,
        }
    }

    /// Total number of dots (with multiplicity) in one stem.
    pub fn dots_in_stem(&self, stem: u32) -> u64 {
        self.dots
            .iter()
            .filter(|&(&(d, _), _)| d == stem)
            .map(|(_, &m)| m as u64)
            .sum()
    }

    /// Filtration multiset of one stem as `(filtration, multiplicity)` pairs.
    pub fn stem_column(&self, stem: u32) -> Vec<(u32, u32)> {
        self.dots
            .iter()
            .filter(|&(&(d, _), _)| d == stem)
            .map(|(&(_, s), &m)| (s, m))
            .collect()
    }

    pub fn has_tower(&self, stem: u32) -> bool {
        self.towers.contains(&stem)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = ChartJson {
            dots: self.dots.iter().map(|(&(d, s), &m)| (d, s, m)).collect(),
            h0: self.h0.iter().map(|&(d, s)| ((d, s), (d, s + 1))).collect(),
            h1: self
                .h1
                .iter()
                .map(|&(d, s)| ((d, s), (d + 1, s + 1)))
                .collect(),
            towers: self.towers.iter().copied().collect(),
            s_ceiling: self.s_ceiling,
        };
        serde_json::to_value(j).expect("chart serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, serde_json::Error> {
        let j: ChartJson = serde_json::from_value(v.clone())?;
        let mut dots = BTreeMap::new();
        for (d, s, m) in j.dots {
            *dots.entry((d, s)).or_insert(0) += m;
        }
        Ok(ExtChart {
            dots,
            h0: j.h0.into_iter().map(|(lo, _)| lo).collect(),
            h1: j.h1.into_iter().map(|(lo, _)| lo).collect(),
            towers: j.towers.into_iter().collect(),
            s_ceiling: j.s_ceiling,
        })
    }
}

/// Truncation policy: for queries about stems `<= d` of `P_m`, resolve with
/// filtration ceiling `s_max = max(8, d - m + 2)` and top internal degree
/// `d + 6 s_max + 8` (each resolution step raises internal degree by at most
/// 6, plus margin for the stability check).
pub fn ko_window(stem: u32, m: u32) -> (usize, u32) {
    let s_max = 8.max(stem.saturating_sub(m) + 2) as usize;
    let top = stem + 6 * s_max as u32 + 8;
    (s_max, top)
}

/// Memoizing provider of ko-orders and stunted charts.
///
/// Completed charts are immutable; the table may be shared and queried
/// concurrently (interior mutability is a plain mutex around the caches).
#[derive(Default)]
pub struct KoTable {
    orders: Mutex<HashMap<(u64, u64), u64>>,
    charts: Mutex<HashMap<(u32, usize, u32), std::sync::Arc<ExtChart>>>,
}

impl KoTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Chart of `P_m` computed in the window `(s_max, t_max)`; cached.
    pub fn stunted_chart(
        &self,
        m: u32,
        s_max: usize,
        t_max: u32,
    ) -> Result<std::sync::Arc<ExtChart>, KoError> {
        if let Some(c) = self.charts.lock().unwrap().get(&(m, s_max, t_max)) {
            return Ok(c.clone());
        }
        let module = A1Module::stunted(m, t_max).map_err(|e| KoError::Module(e.to_string()))?;
        let res = minimal_resolution(&module, s_max, t_max)?;
        res.verify()?;
        let chart = std::sync::Arc::new(ExtChart::from_resolution(&res));
        self.charts
            .lock()
            .unwrap()
            .insert((m, s_max, t_max), chart.clone());
        Ok(chart)
    }

    /// `nu(|ko_{4i-1}(P_m)|)`: the dot count of stem `4i-1` in the chart of
    /// `P_m`.  Stems below the bottom cell hold the zero group (order
    /// exponent 0); stems flagged as towers are rejected.
    pub fn ko_order(&self, i: u64, m: u64) -> Result<u64, KoError> {
        if i == 0 {
            return Err(KoError::BadIndex);
        }
        if let Some(&v) = self.orders.lock().unwrap().get(&(i, m)) {
            return Ok(v);
        }
        let stem64 = 4 * i - 1;
        let v = if stem64 < m {
            0
        } else {
            let stem = u32::try_from(stem64).expect("stem fits in 32 bits");
            let m32 = u32::try_from(m).expect("bottom cell fits in 32 bits");
            let (s_max, top) = ko_window(stem, m32);
            let chart = self.stunted_chart(m32, s_max, top)?;
            if chart.has_tower(stem) {
                return Err(KoError::InfiniteTower { stem });
            }
            chart.dots_in_stem(stem)
        };
        self.orders.lock().unwrap().insert((i, m), v);
        Ok(v)
    }

    /// Recompute a ko-order with the top degree pushed up by `extra`;
    /// used by the truncation-stability checks.
    pub fn ko_order_with_margin(&self, i: u64, m: u64, extra: u32) -> Result<u64, KoError> {
        if i == 0 {
            return Err(KoError::BadIndex);
        }
        let stem64 = 4 * i - 1;
        if stem64 < m {
            return Ok(0);
        }
        let stem = u32::try_from(stem64).expect("stem fits in 32 bits");
        let m32 = u32::try_from(m).expect("bottom cell fits in 32 bits");
        let (s_max, top) = ko_window(stem, m32);
        let chart = self.stunted_chart(m32, s_max, top + extra)?;
        if chart.has_tower(stem) {
            return Err(KoError::InfiniteTower { stem });
        }
        Ok(chart.dots_in_stem(stem))
    }
}
