//! Minimal free resolutions over A(1).
//!
//! The resolution is built by a single sweep over internal degree `t`; at
//! each `t` the filtrations are processed bottom-up.  New generators of
//! `F_s` in degree `t` are added for a basis of
//! `ker(d_{s-1}) / d_s(existing part of F_s)`, so the resulting resolution
//! is minimal by construction: a boundary image can never involve a
//! same-degree generator with unit coefficient, because those generators
//! were just chosen with linearly independent boundaries outside the image
//! of the older part.
//!
//! Generator counts per bidegree are the dimensions of
//! `Ext_{A(1)}^{s,t}(M, F2)`.

use thiserror::Error;

use super::A1Module;
use crate::f2::{BitVec, Echelon};
use crate::steenrod::{a1, TOP_DEGREE, UNIT};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ResolutionError {
    #[error("window too small: need internal degree {needed} but the window tops out at {have}")]
    WindowTooSmall { needed: u32, have: u32 },
    #[error("resolution self-check failed: {0}")]
    SelfCheck(String),
}

/// Boundary of one generator: an F2 sum of `algebra-element * generator`
/// terms in the previous filtration, the algebra element as a basis mask.
pub type Boundary = Vec<(usize, u8)>;

/// A minimal free resolution of an [`A1Module`] through `s <= s_max`,
/// `t <= t_max`.
pub struct Resolution {
    module: A1Module,
    s_max: usize,
    t_max: u32,
    /// `gens[s]` lists the internal degrees of the generators of `F_s`.
    gens: Vec<Vec<u32>>,
    /// `boundary[s][i]` is the image of generator `i` of `F_s` in `F_{s-1}`
    /// (empty list at `s = 0`).
    boundary: Vec<Vec<Boundary>>,
    /// Augmentation images of the `F_0` generators in the module.
    aug: Vec<BitVec>,
}

/// One F2-basis element of `F_s` in a fixed internal degree: a generator
/// index paired with an A(1)-basis element index.
type CellBasis = Vec<(usize, usize)>;

impl Resolution {
    pub fn s_max(&self) -> usize {
        self.s_max
    }

    pub fn t_max(&self) -> u32 {
        self.t_max
    }

    pub fn module(&self) -> &A1Module {
        &self.module
    }

    pub fn generator_degrees(&self, s: usize) -> &[u32] {
        &self.gens[s]
    }

    /// `dim Ext^{s,t}` = number of generators of `F_s` in degree `t`.
    pub fn ext_dim(&self, s: usize, t: u32) -> usize {
        self.gens
            .get(s)
            .map_or(0, |g| g.iter().filter(|&&d| d == t).count())
    }

    pub fn boundary_of(&self, s: usize, gen: usize) -> &Boundary {
        &self.boundary[s][gen]
    }

    pub fn augmentation_of(&self, gen: usize) -> (u32, &BitVec) {
        (self.gens[0][gen], &self.aug[gen])
    }

    fn basis_at(&self, s: usize, t: u32) -> CellBasis {
        let alg = a1();
        let mut basis = Vec::new();
        for (i, &d) in self.gens[s].iter().enumerate() {
            if d > t || t - d > TOP_DEGREE {
                continue;
            }
            for &e in &alg.basis_by_degree[(t - d) as usize] {
                basis.push((i, e));
            }
        }
        basis
    }

    /// Expand the boundary of the basis element `elt * gen_i` of `F_s` in the
    /// coordinates of `basis_prev` (a basis of `F_{s-1}` in the same degree).
    fn boundary_coords(&self, s: usize, gen: usize, elt: usize, basis_prev: &CellBasis) -> BitVec {
        let alg = a1();
        let mut out = BitVec::zeros(basis_prev.len());
        for &(tgt, mask) in &self.boundary[s][gen] {
            let prod = alg.mul_masks(1 << elt, mask);
            if prod == 0 {
                continue;
            }
            for (col, &(g2, e2)) in basis_prev.iter().enumerate() {
                if g2 == tgt && prod >> e2 & 1 == 1 {
                    out.flip(col);
                }
            }
        }
        out
    }

    /// Image of the basis element `elt * gen_i` of `F_0` in the module.
    fn aug_coords(&self, gen: usize, elt: usize, t: u32) -> BitVec {
        let word = &a1().gen_word[elt];
        let (deg, v) = self
            .module
            .act_word(word, self.gens[0][gen], &self.aug[gen]);
        debug_assert_eq!(deg, t);
        v
    }

    /// Re-run the structural checks: `d∘d = 0`, `aug∘d_1 = 0`, minimality.
    pub fn verify(&self) -> Result<(), ResolutionError> {
        for s in 0..self.gens.len() {
            for (i, b) in self.boundary[s].iter().enumerate() {
                for &(_, mask) in b {
                    if mask & UNIT != 0 {
                        return Err(ResolutionError::SelfCheck(format!(
                            "minimality violated at filtration {s}, generator {i}"
                        )));
                    }
                }
                let t = self.gens[s][i];
                if s == 1 {
                    let basis_prev = self.basis_at(0, t);
                    let mut total = BitVec::zeros(self.module.dim(t));
                    let coords = self.vector_in_basis(b, &basis_prev);
                    for col in coords.iter_ones() {
                        let (g, e) = basis_prev[col];
                        total.xor_in(&self.aug_coords(g, e, t));
                    }
                    if !total.is_zero() {
                        return Err(ResolutionError::SelfCheck(format!(
                            "aug∘d_1 != 0 at generator {i}"
                        )));
                    }
                } else if s >= 2 {
                    let basis_prev = self.basis_at(s - 1, t);
                    let basis_prev2 = self.basis_at(s - 2, t);
                    let coords = self.vector_in_basis(b, &basis_prev);
                    let mut total = BitVec::zeros(basis_prev2.len());
                    for col in coords.iter_ones() {
                        let (g, e) = basis_prev[col];
                        total.xor_in(&self.boundary_coords(s - 1, g, e, &basis_prev2));
                    }
                    if !total.is_zero() {
                        return Err(ResolutionError::SelfCheck(format!(
                            "d∘d != 0 at filtration {s}, generator {i}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn vector_in_basis(&self, b: &Boundary, basis: &CellBasis) -> BitVec {
        let mut v = BitVec::zeros(basis.len());
        for &(tgt, mask) in b {
            for (col, &(g2, e2)) in basis.iter().enumerate() {
                if g2 == tgt && mask >> e2 & 1 == 1 {
                    v.flip(col);
                }
            }
        }
        v
    }
}

/// Build a minimal free resolution of `module` through filtration `s_max`
/// and internal degree `t_max`.
pub fn minimal_resolution(
    module: &A1Module,
    s_max: usize,
    t_max: u32,
) -> Result<Resolution, ResolutionError> {
    if t_max < module.max_degree() {
        // kernels above the module window cannot be closed reliably
        return Err(ResolutionError::WindowTooSmall {
            needed: module.max_degree(),
            have: t_max,
        });
    }
    let mut res = Resolution {
        module: module.clone(),
        s_max,
        t_max,
        gens: vec![Vec::new(); s_max + 1],
        boundary: vec![Vec::new(); s_max + 1],
        aug: Vec::new(),
    };

    for t in module.min_degree()..=t_max {
        // Filtration 0: minimally cover the module in degree t.
        let target_dim = module.dim(t);
        if target_dim > 0 {
            let mut image = Echelon::new(target_dim);
            for (g, e) in res.basis_at(0, t) {
                image.insert(res.aug_coords(g, e, t));
            }
            for k in 0..target_dim {
                let mut v = BitVec::zeros(target_dim);
                v.set(k, true);
                if image.insert(v.clone()) {
                    res.gens[0].push(t);
                    res.boundary[0].push(Vec::new());
                    res.aug.push(v);
                }
            }
        }

        // Filtrations >= 1: new generators for the uncovered kernel.
        for s in 1..=s_max {
            let basis_prev = res.basis_at(s - 1, t);
            if basis_prev.is_empty() {
                continue;
            }
            // kernel of d_{s-1} (the augmentation when s = 1)
            let rows: Vec<BitVec> = basis_prev
                .iter()
                .map(|&(g, e)| {
                    if s == 1 {
                        res.aug_coords(g, e, t)
                    } else {
                        res.boundary_coords(s - 1, g, e, &res.basis_at(s - 2, t))
                    }
                })
                .collect();
            let cols = rows.first().map_or(0, BitVec::len);
            let matrix = crate::f2::BitMatrix::from_rows(rows, cols);
            let kernel = matrix.left_kernel_basis();
            if kernel.is_empty() {
                continue;
            }
            let mut image = Echelon::new(basis_prev.len());
            for (g, e) in res.basis_at(s, t) {
                image.insert(res.boundary_coords(s, g, e, &basis_prev));
            }
            for v in kernel {
                if !image.insert(v.clone()) {
                    continue;
                }
                let mut bd: Boundary = Vec::new();
                for col in v.iter_ones() {
                    let (g, e) = basis_prev[col];
                    match bd.iter_mut().find(|(tg, _)| *tg == g) {
                        Some((_, mask)) => *mask ^= 1 << e,
                        None => bd.push((g, 1 << e)),
                    }
                }
                bd.retain(|&(_, mask)| mask != 0);
                debug_assert!(bd.iter().all(|&(_, m)| m & UNIT == 0));
                res.gens[s].push(t);
                res.boundary[s].push(bd);
            }
        }
    }

    debug_assert!(res.verify().is_ok());
    Ok(res)
}
