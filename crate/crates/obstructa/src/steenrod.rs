//! The mod-2 Steenrod algebra in low degrees, and the subalgebra A(1) derived
//! from it.
//!
//! Elements of the full algebra are F2 sums of admissible monomials
//! `Sq^{i_1} ... Sq^{i_r}` (`i_j >= 2 i_{j+1}`); products are straightened
//! with the Adem relations
//!
//! ```text
//! Sq^a Sq^b = sum_c C(b-c-1, a-2c) Sq^{a+b-c} Sq^c      (a < 2b, mod 2)
//! ```
//!
//! A(1) is the 8-dimensional subalgebra generated by `Sq1` and `Sq2`.  Its
//! basis, Poincaré series and multiplication table are not hand-entered:
//! [`a1`] generates the subalgebra from the Adem relations at first use and
//! asserts the expected shape (dimension 8, series
//! `1 + t + t^2 + 2t^3 + t^4 + t^5 + t^6`).
//! Elements of A(1) are passed around as `u8` masks over the
//! canonical basis.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use crate::dyadic::binom_mod2_u64;

/// F2 sum of admissible monomials; each monomial is its exponent sequence.
type AdmissibleSum = BTreeSet<Vec<u32>>;

fn toggle(set: &mut AdmissibleSum, word: Vec<u32>) {
    if !set.remove(&word) {
        set.insert(word);
    }
}

fn is_admissible(word: &[u32]) -> bool {
    word.windows(2).all(|w| w[0] >= 2 * w[1])
}

/// Straighten an arbitrary composition `Sq^{w_1} ... Sq^{w_r}` into a sum of
/// admissible monomials.
fn adem_reduce(word: &[u32]) -> AdmissibleSum {
    let mut out = AdmissibleSum::new();
    let mut work: Vec<Vec<u32>> = vec![word.iter().copied().filter(|&k| k > 0).collect()];
    while let Some(w) = work.pop() {
        match w.windows(2).position(|p| p[0] < 2 * p[1]) {
            None => toggle(&mut out, w),
            Some(i) => {
                let (a, b) = (w[i], w[i + 1]);
                for c in 0..=a / 2 {
                    if !binom_mod2_u64((b - c - 1) as u64, (a - 2 * c) as u64) {
                        continue;
                    }
                    let mut next: Vec<u32> = w[..i].to_vec();
                    next.push(a + b - c);
                    if c > 0 {
                        next.push(c);
                    }
                    next.extend_from_slice(&w[i + 2..]);
                    work.push(next);
                }
            }
        }
    }
    debug_assert!(out.iter().all(|w| is_admissible(w)));
    out
}

fn sum_mul(x: &AdmissibleSum, y: &AdmissibleSum) -> AdmissibleSum {
    let mut out = AdmissibleSum::new();
    for u in x {
        for v in y {
            let mut w = u.clone();
            w.extend_from_slice(v);
            for m in adem_reduce(&w) {
                toggle(&mut out, m);
            }
        }
    }
    out
}

fn word_degree(word: &[u32]) -> u32 {
    word.iter().sum()
}

/// The subalgebra A(1), with its canonical 8-element basis.
///
/// Basis elements are indexed 0..8; an element is a `u8` bit mask.  Basis
/// element `i` equals the composition of `Sq`-generators in `gen_word[i]`
/// (leftmost factor outermost, i.e. applied last).
pub struct A1 {
    /// Degrees of the basis elements: `[0, 1, 2, 3, 3, 4, 5, 6]`.
    pub degree: [u32; 8],
    /// Generator words over {1, 2}.
    pub gen_word: [Vec<u32>; 8],
    /// Display names derived from the generator words.
    pub name: [String; 8],
    /// Full multiplication table on masks: `mul[i][j]` is basis_i * basis_j.
    pub mul: [[u8; 8]; 8],
    /// Basis indices listed by degree 0..=6.
    pub basis_by_degree: [Vec<usize>; 7],
}

pub const UNIT: u8 = 1 << 0;
pub const SQ1: u8 = 1 << 1;
pub const SQ2: u8 = 1 << 2;

/// The top degree of A(1).
pub const TOP_DEGREE: u32 = 6;

impl A1 {
    pub fn mask_degree(&self, mask: u8) -> Option<u32> {
        let mut deg = None;
        for i in 0..8 {
            if mask >> i & 1 == 1 {
                match deg {
                    None => deg = Some(self.degree[i]),
                    Some(d) => assert_eq!(d, self.degree[i], "inhomogeneous mask"),
                }
            }
        }
        deg
    }

    pub fn mul_masks(&self, x: u8, y: u8) -> u8 {
        let mut out = 0u8;
        for i in 0..8 {
            if x >> i & 1 == 0 {
                continue;
            }
            for j in 0..8 {
                if y >> j & 1 == 1 {
                    out ^= self.mul[i][j];
                }
            }
        }
        out
    }

    pub fn mask_name(&self, mask: u8) -> String {
        if mask == 0 {
            return "0".into();
        }
        (0..8)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.name[i].clone())
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn derive_a1() -> A1 {
    // The eight alternating generator words; independence and spanning are
    // verified below against the Adem-reduced admissible forms.
    let gen_word: [Vec<u32>; 8] = [
        vec![],
        vec![1],
        vec![2],
        vec![1, 2],
        vec![2, 1],
        vec![1, 2, 1],
        vec![2, 1, 2],
        vec![1, 2, 1, 2],
    ];
    let degree: [u32; 8] = [0, 1, 2, 3, 3, 4, 5, 6];
    let admissible: Vec<AdmissibleSum> = gen_word.iter().map(|w| adem_reduce(w)).collect();
    for (i, adm) in admissible.iter().enumerate() {
        for w in adm {
            assert_eq!(word_degree(w), degree[i]);
        }
    }

    // Span of all words over {Sq1, Sq2}: confirm it is exactly the span of
    // the eight chosen words, with the expected dimension per degree.
    let mut span: Vec<AdmissibleSum> = Vec::new();
    let mut frontier: Vec<AdmissibleSum> = vec![adem_reduce(&[])];
    let mut all: Vec<AdmissibleSum> = frontier.clone();
    while let Some(s) = frontier.pop() {
        for g in [1u32, 2] {
            let next = sum_mul(&adem_reduce(&[g]), &s);
            if next.is_empty() {
                continue;
            }
            let deg = word_degree(next.iter().next().unwrap());
            if deg > TOP_DEGREE {
                // products of the generators vanish above degree 6
                assert!(next.is_empty() || deg <= 12);
                continue;
            }
            if !all.contains(&next) {
                all.push(next.clone());
                frontier.push(next);
            }
        }
    }
    span.extend(all);
    let dim_by_degree = |elements: &[AdmissibleSum]| -> Vec<usize> {
        let mut dims = vec![0usize; (TOP_DEGREE + 1) as usize];
        for d in 0..=TOP_DEGREE {
            let of_deg: Vec<&AdmissibleSum> = elements
                .iter()
                .filter(|s| !s.is_empty() && word_degree(s.iter().next().unwrap()) == d)
                .collect();
            // Gaussian elimination over the admissible-monomial coordinates.
            let mut basis: Vec<AdmissibleSum> = Vec::new();
            for s in of_deg {
                let mut v = s.clone();
                while let Some(lead) = v.iter().next_back().cloned() {
                    match basis.iter().find(|b| b.iter().next_back() == Some(&lead)) {
                        Some(b) => {
                            let b = b.clone();
                            for w in b {
                                toggle(&mut v, w);
                            }
                        }
                        None => {
                            basis.push(v.clone());
                            v.clear();
                        }
                    }
                }
            }
            dims[d as usize] = basis.len();
        }
        dims
    };
    let dims = dim_by_degree(&span);
    assert_eq!(
        dims,
        vec![1, 1, 1, 2, 1, 1, 1],
        "A(1) Poincaré series mismatch"
    );
    assert_eq!(dims.iter().sum::<usize>(), 8, "A(1) dimension mismatch");

    // Express an admissible sum in the chosen basis (per degree).
    let coords = |s: &AdmissibleSum| -> u8 {
        if s.is_empty() {
            return 0;
        }
        let deg = word_degree(s.iter().next().unwrap());
        assert!(deg <= TOP_DEGREE, "nonzero A(1) product above top degree");
        let idxs: Vec<usize> = (0..8).filter(|&i| degree[i] == deg).collect();
        // at most two basis elements per degree: solve by enumeration
        for mask in 1u8..(1 << idxs.len()) {
            let mut acc = AdmissibleSum::new();
            for (pos, &i) in idxs.iter().enumerate() {
                if mask >> pos & 1 == 1 {
                    for w in &admissible[i] {
                        toggle(&mut acc, w.clone());
                    }
                }
            }
            if acc == *s {
                let mut out = 0u8;
                for (pos, &i) in idxs.iter().enumerate() {
                    if mask >> pos & 1 == 1 {
                        out |= 1 << i;
                    }
                }
                return out;
            }
        }
        panic!("element is not in the A(1) span: {s:?}");
    };

    let mut mul = [[0u8; 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            let prod = sum_mul(&admissible[i], &admissible[j]);
            if prod.is_empty() {
                mul[i][j] = 0;
            } else if word_degree(prod.iter().next().unwrap()) > TOP_DEGREE {
                assert!(
                    prod.is_empty(),
                    "A(1) is not closed: product of {i} and {j} sticks out"
                );
            } else {
                mul[i][j] = coords(&prod);
            }
        }
    }
    // unit row/column sanity
    for (i, row) in mul.iter().enumerate() {
        assert_eq!(mul[0][i], 1 << i);
        assert_eq!(row[0], 1 << i);
    }

    let mut basis_by_degree: [Vec<usize>; 7] = Default::default();
    for i in 0..8 {
        basis_by_degree[degree[i] as usize].push(i);
    }
    let name: [String; 8] = std::array::from_fn(|i| {
        if gen_word[i].is_empty() {
            "1".to_string()
        } else {
            gen_word[i]
                .iter()
                .map(|k| format!("Sq{k}"))
                .collect::<Vec<_>>()
                .join("")
        }
    });

    A1 {
        degree,
        gen_word,
        name,
        mul,
        basis_by_degree,
    }
}

/// The derived A(1); built on first use.
pub fn a1() -> &'static A1 {
    static INSTANCE: OnceLock<A1> = OnceLock::new();
    INSTANCE.get_or_init(derive_a1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adem_small_identities() {
        assert_eq!(adem_reduce(&[1, 1]), AdmissibleSum::new());
        assert_eq!(adem_reduce(&[1, 2]), BTreeSet::from([vec![3]]));
        assert_eq!(adem_reduce(&[2, 2]), BTreeSet::from([vec![3, 1]]));
        assert_eq!(adem_reduce(&[3, 2]), AdmissibleSum::new());
        assert_eq!(adem_reduce(&[2, 3]), BTreeSet::from([vec![5], vec![4, 1]]));
        assert_eq!(adem_reduce(&[3, 3]), BTreeSet::from([vec![5, 1]]));
        assert_eq!(adem_reduce(&[1, 3]), AdmissibleSum::new());
    }

    #[test]
    fn a1_shape() {
        let alg = a1();
        assert_eq!(alg.degree, [0, 1, 2, 3, 3, 4, 5, 6]);
        assert_eq!(alg.mask_degree(SQ1), Some(1));
        assert_eq!(alg.mask_degree(SQ2), Some(2));
    }

    #[test]
    fn a1_relations() {
        let alg = a1();
        // Sq1 Sq1 = 0
        assert_eq!(alg.mul_masks(SQ1, SQ1), 0);
        // Sq2 Sq2 = Sq1 Sq2 Sq1 (module relation b^2 = aba)
        let aba = alg.mul_masks(SQ1, alg.mul_masks(SQ2, SQ1));
        assert_eq!(alg.mul_masks(SQ2, SQ2), aba);
        assert_ne!(aba, 0);
    }

    #[test]
    fn a1_associativity() {
        let alg = a1();
        for i in 0..8u8 {
            for j in 0..8u8 {
                for k in 0..8u8 {
                    let x = 1 << i;
                    let y = 1 << j;
                    let z = 1 << k;
                    assert_eq!(
                        alg.mul_masks(alg.mul_masks(x, y), z),
                        alg.mul_masks(x, alg.mul_masks(y, z))
                    );
                }
            }
        }
    }

    #[test]
    fn a1_top_class() {
        let alg = a1();
        // the two length-4 alternating words agree and sit in degree 6
        let abab = alg.mul_masks(SQ1, alg.mul_masks(SQ2, alg.mul_masks(SQ1, SQ2)));
        let baba = alg.mul_masks(SQ2, alg.mul_masks(SQ1, alg.mul_masks(SQ2, SQ1)));
        assert_eq!(abab, baba);
        assert_eq!(alg.mask_degree(abab), Some(6));
        // and every product with a positive-degree element kills it
        for i in 1..8 {
            assert_eq!(alg.mul_masks(abab, 1 << i), 0);
            assert_eq!(alg.mul_masks(1 << i, abab), 0);
        }
    }
}
