//! Ext over A(1) for stunted projective spectra.
//!
//! The chain is: build the cohomology of a (truncated) stunted projective
//! space as an [`A1Module`], run a minimal free resolution over A(1)
//! ([`resolution`]), read off an Adams chart ([`chart`]), and extract the
//! 2-exponents `nu(|ko_{4i-1}(P_m)|)` that the bo-lifting criterion consumes.

pub mod chart;
pub mod resolution;

use thiserror::Error;

use crate::f2::{BitMatrix, BitVec};
use crate::steenrod::a1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModuleError {
    #[error("bottom degree {m} exceeds top degree {top}")]
    EmptyWindow { m: u32, top: u32 },
    #[error("action matrix for Sq{gen} out of degree {degree} has wrong shape")]
    ActionShape { gen: u32, degree: u32 },
    #[error("A(1) relation {relation} fails on a basis element of degree {degree}")]
    RelationFails { relation: String, degree: u32 },
}

/// A finite graded F2 module with Sq1/Sq2 action matrices satisfying the
/// A(1) relations `Sq1 Sq1 = 0` and `Sq2 Sq2 = Sq1 Sq2 Sq1`.
///
/// Degrees run over `min_degree ..= max_degree`; the action of a degree-k
/// generator out of the top k degrees is zero (matrices with zero columns).
#[derive(Clone, Debug)]
pub struct A1Module {
    min_degree: u32,
    dims: Vec<usize>,
    sq1: Vec<BitMatrix>,
    sq2: Vec<BitMatrix>,
}

impl A1Module {
    pub fn new(
        min_degree: u32,
        dims: Vec<usize>,
        sq1: Vec<BitMatrix>,
        sq2: Vec<BitMatrix>,
    ) -> Result<Self, ModuleError> {
        let n = dims.len();
        let dim_at = |i: isize| -> usize {
            if i < 0 || i as usize >= n {
                0
            } else {
                dims[i as usize]
            }
        };
        for i in 0..n {
            let d = min_degree + i as u32;
            if sq1.len() != n || sq1[i].rows != dims[i] || sq1[i].cols != dim_at(i as isize + 1) {
                return Err(ModuleError::ActionShape { gen: 1, degree: d });
            }
            if sq2.len() != n || sq2[i].rows != dims[i] || sq2[i].cols != dim_at(i as isize + 2) {
                return Err(ModuleError::ActionShape { gen: 2, degree: d });
            }
        }
        let module = A1Module {
            min_degree,
            dims,
            sq1,
            sq2,
        };
        module.check_relations()?;
        Ok(module)
    }

    /// `H^*(P_m^top)`: one basis element `x^j` per degree `m <= j <= top`,
    /// with `Sq1 x^j = C(j,1) x^{j+1}` and `Sq2 x^j = C(j,2) x^{j+2}`.
    pub fn stunted(m: u32, top: u32) -> Result<Self, ModuleError> {
        if m > top {
            return Err(ModuleError::EmptyWindow { m, top });
        }
        let n = (top - m + 1) as usize;
        let mut sq1 = Vec::with_capacity(n);
        let mut sq2 = Vec::with_capacity(n);
        for j in m..=top {
            let mut m1 = BitMatrix::zeros(1, usize::from(j < top));
            if j < top && j % 2 == 1 {
                m1.set(0, 0, true);
            }
            let mut m2 = BitMatrix::zeros(1, usize::from(j + 1 < top));
            if j + 1 < top && (j % 4 == 2 || j % 4 == 3) {
                m2.set(0, 0, true);
            }
            sq1.push(m1);
            sq2.push(m2);
        }
        Self::new(m, vec![1; n], sq1, sq2)
    }

    /// The free module on one generator in degree `d` (a copy of A(1)).
    pub fn free_on_one_generator(d: u32) -> Self {
        let alg = a1();
        let dims: Vec<usize> = (0..=6).map(|k| alg.basis_by_degree[k].len()).collect();
        let mut sq1 = Vec::new();
        let mut sq2 = Vec::new();
        for k in 0..=6usize {
            let rows = &alg.basis_by_degree[k];
            let cols1: &[usize] = if k < 6 {
                &alg.basis_by_degree[k + 1]
            } else {
                &[]
            };
            let cols2: &[usize] = if k + 2 <= 6 {
                &alg.basis_by_degree[k + 2]
            } else {
                &[]
            };
            let mut m1 = BitMatrix::zeros(rows.len(), cols1.len());
            let mut m2 = BitMatrix::zeros(rows.len(), cols2.len());
            for (r, &b) in rows.iter().enumerate() {
                let im1 = alg.mul_masks(crate::steenrod::SQ1, 1 << b);
                let im2 = alg.mul_masks(crate::steenrod::SQ2, 1 << b);
                for (c, &t) in cols1.iter().enumerate() {
                    if im1 >> t & 1 == 1 {
                        m1.set(r, c, true);
                    }
                }
                for (c, &t) in cols2.iter().enumerate() {
                    if im2 >> t & 1 == 1 {
                        m2.set(r, c, true);
                    }
                }
            }
            sq1.push(m1);
            sq2.push(m2);
        }
        Self::new(d, dims, sq1, sq2).expect("free module is a valid A(1)-module")
    }

    /// One basis element in degree `d`, all actions zero.
    pub fn trivial(d: u32) -> Self {
        Self::new(
            d,
            vec![1],
            vec![BitMatrix::zeros(1, 0)],
            vec![BitMatrix::zeros(1, 0)],
        )
        .expect("trivial module is valid")
    }

    /// Same module with the grading translated so the bottom sits at `new_min`.
    pub fn translated(&self, new_min: u32) -> Self {
        A1Module {
            min_degree: new_min,
            dims: self.dims.clone(),
            sq1: self.sq1.clone(),
            sq2: self.sq2.clone(),
        }
    }

    fn check_relations(&self) -> Result<(), ModuleError> {
        for i in 0..self.dims.len() {
            let d = self.min_degree + i as u32;
            for r in 0..self.dims[i] {
                let mut v = BitVec::zeros(self.dims[i]);
                v.set(r, true);
                // Sq1 Sq1 = 0
                let aa = self.act_gen(1, d + 1, &self.act_gen(1, d, &v));
                if !aa.is_zero() {
                    return Err(ModuleError::RelationFails {
                        relation: "Sq1 Sq1 = 0".into(),
                        degree: d,
                    });
                }
                // Sq2 Sq2 = Sq1 Sq2 Sq1
                let bb = self.act_gen(2, d + 2, &self.act_gen(2, d, &v));
                let aba = self.act_gen(1, d + 3, &self.act_gen(2, d + 1, &self.act_gen(1, d, &v)));
                if bb != aba {
                    return Err(ModuleError::RelationFails {
                        relation: "Sq2 Sq2 = Sq1 Sq2 Sq1".into(),
                        degree: d,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn min_degree(&self) -> u32 {
        self.min_degree
    }

    pub fn max_degree(&self) -> u32 {
        self.min_degree + self.dims.len() as u32 - 1
    }

    pub fn dim(&self, degree: u32) -> usize {
        if degree < self.min_degree {
            return 0;
        }
        let i = (degree - self.min_degree) as usize;
        self.dims.get(i).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Apply `Sq1` or `Sq2` to a vector in the given degree.
    pub fn act_gen(&self, gen: u32, degree: u32, v: &BitVec) -> BitVec {
        debug_assert!(gen == 1 || gen == 2);
        let target = self.dim(degree + gen);
        if degree < self.min_degree || self.dim(degree) == 0 {
            return BitVec::zeros(target);
        }
        let i = (degree - self.min_degree) as usize;
        let mat = if gen == 1 { &self.sq1[i] } else { &self.sq2[i] };
        if mat.cols == 0 {
            return BitVec::zeros(target);
        }
        mat.act_left(v)
    }

    /// Apply a composition of generators, rightmost entry first.
    pub fn act_word(&self, word: &[u32], degree: u32, v: &BitVec) -> (u32, BitVec) {
        let mut d = degree;
        let mut acc = v.clone();
        for &g in word.iter().rev() {
            acc = self.act_gen(g, d, &acc);
            d += g;
        }
        (d, acc)
    }

    /// Apply an A(1) basis element (by index) to a vector.
    pub fn act_basis_elt(&self, elt: usize, degree: u32, v: &BitVec) -> (u32, BitVec) {
        let word = a1().gen_word[elt].clone();
        self.act_word(&word, degree, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stunted_examples() {
        let m = A1Module::stunted(49, 130).unwrap();
        let mut v = BitVec::zeros(1);
        v.set(0, true);
        // Sq1 x^49 = x^50, Sq2 x^49 = 0
        assert!(!m.act_gen(1, 49, &v).is_zero());
        assert!(m.act_gen(2, 49, &v).is_zero());
        // Sq1 x^50 = 0, Sq2 x^50 = x^52
        assert!(m.act_gen(1, 50, &v).is_zero());
        assert!(!m.act_gen(2, 50, &v).is_zero());

        let single = A1Module::stunted(1, 1).unwrap();
        assert_eq!(single.total_dim(), 1);
        assert!(single.act_gen(1, 1, &v).is_zero());
        assert!(single.act_gen(2, 1, &v).is_zero());

        assert!(matches!(
            A1Module::stunted(5, 4),
            Err(ModuleError::EmptyWindow { m: 5, top: 4 })
        ));
    }

    #[test]
    fn free_module_is_valid_and_eight_dimensional() {
        let m = A1Module::free_on_one_generator(0);
        assert_eq!(m.total_dim(), 8);
        assert_eq!(m.max_degree(), 6);
    }

    #[test]
    fn bad_action_rejected() {
        // Sq1 with Sq1 Sq1 != 0: two elements in consecutive-plus-one degrees
        let mut s1a = BitMatrix::zeros(1, 1);
        s1a.set(0, 0, true);
        let mut s1b = BitMatrix::zeros(1, 1);
        s1b.set(0, 0, true);
        let err = A1Module::new(
            0,
            vec![1, 1, 1],
            vec![s1a, s1b, BitMatrix::zeros(1, 0)],
            vec![
                BitMatrix::zeros(1, 1),
                BitMatrix::zeros(1, 0),
                BitMatrix::zeros(1, 0),
            ],
        );
        assert!(matches!(err, Err(ModuleError::RelationFails { .. })));
    }
}
