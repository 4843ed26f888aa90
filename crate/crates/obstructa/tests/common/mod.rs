//! Shared test support: the bar-resolution homology oracle.
//!
//! An independent route to `Ext_{A(1)}^{s,t}(M, F2)`: the reduced bar
//! complex `C_s = Abar^{⊗s} ⊗ M` with
//!
//! ```text
//! d(a_1|...|a_s ⊗ m) = sum_{i<s} a_1|..|a_i·a_{i+1}|..|a_s ⊗ m
//!                      + a_1|...|a_{s-1} ⊗ a_s·m
//! ```
//!
//! computes `Tor^{A(1)}_s(F2, M)`, whose graded dimensions equal those of
//! `Ext^{s,t}(M, F2)`.  Nothing here touches the minimal-resolution path it
//! is checking: products come straight from the derived multiplication
//! table and ranks from plain row reduction.

use std::collections::HashMap;

use obstructa::ext_a1::A1Module;
use obstructa::f2::{BitVec, Echelon};
use obstructa::steenrod::a1;

/// One basis element of `Abar^{⊗s} ⊗ M` in a fixed internal degree:
/// the word of algebra basis indices (all nonzero) and a module basis
/// element `(degree, index)`.
type BarWord = (Vec<u8>, (u32, usize));

fn enumerate_words(
    module: &A1Module,
    s: usize,
    t: u32,
    prefix: &mut Vec<u8>,
    used: u32,
    out: &mut Vec<BarWord>,
) {
    let alg = a1();
    if prefix.len() == s {
        if t < used {
            return;
        }
        let d = t - used;
        for idx in 0..module.dim(d) {
            out.push((prefix.clone(), (d, idx)));
        }
        return;
    }
    // remaining factors need at least 1 degree each
    let remaining = (s - prefix.len() - 1) as u32;
    for deg in 1..=6u32 {
        if used + deg + remaining > t {
            continue;
        }
        for &b in &alg.basis_by_degree[deg as usize] {
            prefix.push(b as u8);
            enumerate_words(module, s, t, prefix, used + deg, out);
            prefix.pop();
        }
    }
}

fn basis(module: &A1Module, s: usize, t: u32) -> Vec<BarWord> {
    let mut out = Vec::new();
    enumerate_words(module, s, t, &mut Vec::new(), 0, &mut out);
    out
}

/// Rank of `d_s : C_{s,t} -> C_{s-1,t}`.
fn boundary_rank(module: &A1Module, s: usize, t: u32) -> usize {
    if s == 0 {
        return 0;
    }
    let alg = a1();
    let domain = basis(module, s, t);
    if domain.is_empty() {
        return 0;
    }
    let codomain = basis(module, s - 1, t);
    if codomain.is_empty() {
        return 0;
    }
    let index: HashMap<&BarWord, usize> = codomain.iter().zip(0..).collect();
    let mut ech = Echelon::new(codomain.len());
    let mut rank = 0;
    for (word, m) in &domain {
        let mut row = BitVec::zeros(codomain.len());
        // merge adjacent factors
        for i in 0..word.len().saturating_sub(1) {
            let prod = alg.mul[word[i] as usize][word[i + 1] as usize];
            for b in 0..8u8 {
                if prod >> b & 1 == 0 {
                    continue;
                }
                let mut merged = Vec::with_capacity(word.len() - 1);
                merged.extend_from_slice(&word[..i]);
                merged.push(b);
                merged.extend_from_slice(&word[i + 2..]);
                let key = (merged, *m);
                if let Some(&col) = index.get(&key) {
                    row.flip(col);
                }
            }
        }
        // act by the last factor on the module element
        let last = *word.last().expect("s >= 1") as usize;
        let mut v = BitVec::zeros(module.dim(m.0));
        v.set(m.1, true);
        let (d2, image) = module.act_basis_elt(last, m.0, &v);
        for idx in image.iter_ones() {
            let key = (word[..word.len() - 1].to_vec(), (d2, idx));
            if let Some(&col) = index.get(&key) {
                row.flip(col);
            }
        }
        if ech.insert(row) {
            rank += 1;
        }
    }
    rank
}

/// `dim Ext^{s,t}(M, F2)` for `s <= s_max`, `t <= t_max`, via bar homology.
/// Returned as `dims[s][t]`.
#[allow(clippy::needless_range_loop)]
pub fn bar_ext_dims(module: &A1Module, s_max: usize, t_max: u32) -> Vec<Vec<usize>> {
    let mut dims = vec![vec![0usize; (t_max + 1) as usize]; s_max + 1];
    for t in 0..=t_max {
        let mut rank_here = 0; // rank of d_0 = 0
        let mut dim_here = module.dim(t);
        for s in 0..=s_max {
            let rank_next = boundary_rank(module, s + 1, t);
            dims[s][t as usize] = dim_here - rank_here - rank_next;
            rank_here = rank_next;
            dim_here = basis(module, s + 1, t).len();
        }
    }
    dims
}
