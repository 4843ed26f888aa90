//! Bit-packed linear algebra over GF(2).
//!
//! Vectors are `Vec<u64>` with bit `i` of word `i / 64` holding coordinate
//! `i`.  Row reduction works a word at a time, which is what makes the
//! resolution sweep in [`crate::ext_a1`] cheap even at internal degrees
//! around 150.

/// A dense bit vector of fixed length.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_in(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Index of the lowest set bit, if any.
    pub fn first_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                let i = wi * 64 + w.trailing_zeros() as usize;
                return (i < self.len).then_some(i);
            }
        }
        None
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// A dense matrix over GF(2), row-major.
#[derive(Clone, Debug)]
pub struct BitMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn from_rows(rows: Vec<BitVec>, cols: usize) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        BitMatrix {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.data[i]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut BitVec {
        &mut self.data[i]
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.data[r].set(c, v);
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    /// Multiply a row vector (coordinates over the rows) by the matrix.
    pub fn act_left(&self, v: &BitVec) -> BitVec {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = BitVec::zeros(self.cols);
        for i in v.iter_ones() {
            out.xor_in(&self.data[i]);
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new(self.cols);
        let mut rank = 0;
        for r in &self.data {
            if ech.insert(r.clone()) {
                rank += 1;
            }
        }
        rank
    }

    /// Basis of the kernel of the map "row vector ↦ row · matrix".
    ///
    /// Returns vectors of length `self.rows`.
    pub fn left_kernel_basis(&self) -> Vec<BitVec> {
        // Eliminate rows while tracking the combination that produced each
        // reduced row; combinations reducing to zero span the kernel.
        let mut reduced: Vec<(BitVec, BitVec)> = Vec::new(); // (row image, combination)
        let mut kernel = Vec::new();
        for i in 0..self.rows {
            let mut img = self.data[i].clone();
            let mut comb = BitVec::zeros(self.rows);
            comb.set(i, true);
            for (pivot_img, pivot_comb) in &reduced {
                let p = pivot_img.first_one().unwrap();
                if img.get(p) {
                    img.xor_in(pivot_img);
                    comb.xor_in(pivot_comb);
                }
            }
            if img.is_zero() {
                kernel.push(comb);
            } else {
                reduced.push((img, comb));
            }
        }
        kernel
    }
}

/// An incrementally built echelon basis of a subspace of GF(2)^n.
///
/// Rows are kept fully reduced against each other, one pivot per row.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Echelon {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the current basis.
    pub fn reduce(&self, mut v: BitVec) -> BitVec {
        debug_assert_eq!(v.len(), self.cols);
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_in(row);
            }
        }
        v
    }

    /// Insert `v`; returns `true` if it enlarged the span.
    pub fn insert(&mut self, v: BitVec) -> bool {
        let v = self.reduce(v);
        match v.first_one() {
            None => false,
            Some(p) => {
                for row in &mut self.rows {
                    if row.get(p) {
                        row.xor_in(&v);
                    }
                }
                self.rows.push(v);
                self.pivots.push(p);
                true
            }
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v.clone()).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echelon_insert_and_reduce() {
        let mut e = Echelon::new(4);
        let mut a = BitVec::zeros(4);
        a.set(0, true);
        a.set(2, true);
        let mut b = BitVec::zeros(4);
        b.set(2, true);
        assert!(e.insert(a.clone()));
        assert!(e.insert(b.clone()));
        assert_eq!(e.dim(), 2);
        // a + b is in the span
        let mut ab = a.clone();
        ab.xor_in(&b);
        assert!(e.contains(&ab));
        assert!(!e.insert(ab));
        let mut c = BitVec::zeros(4);
        c.set(3, true);
        assert!(!e.contains(&c));
    }

    #[test]
    fn left_kernel() {
        // rows: r0 = (1,0), r1 = (0,1), r2 = (1,1); kernel = {r0+r1+r2}
        let mut m = BitMatrix::zeros(3, 2);
        m.set(0, 0, true);
        m.set(1, 1, true);
        m.set(2, 0, true);
        m.set(2, 1, true);
        let k = m.left_kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].iter_ones().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rank_of_zero_and_identity() {
        let z = BitMatrix::zeros(5, 7);
        assert_eq!(z.rank(), 0);
        let mut id = BitMatrix::zeros(6, 6);
        for i in 0..6 {
            id.set(i, i, true);
        }
        assert_eq!(id.rank(), 6);
        assert!(id.left_kernel_basis().is_empty());
    }
}
