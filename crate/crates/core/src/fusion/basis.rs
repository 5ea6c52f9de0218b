//! Fusion-tree bases of associator blocks.
//!
//! A block `(a, b, m; m2)` maps `Hom(m2, (a ⊗ b) ▷ m)` to `Hom(m2, a ▷ (b ▷ m))`.
//! Rows are the left trees `(e, x, y)` with `x < N(a,b,e)` and
//! `y < n(e,m,m2)`; columns are the right trees `(m', x', y')` with
//! `x' < n(b,m,m')` and `y' < n(a,m',m2)`. Both are ordered
//! lexicographically. For F-symbols the acted-on category is the fusion
//! category itself and `n = N`.

use super::ring::FusionRing;

/// Fusion rules of a ring together with its action on a set of simples.
#[derive(Debug, Clone, Copy)]
pub struct ActionTable<'a> {
    pub ring: &'a FusionRing,
    pub acted_rank: usize,
    n: &'a [u32],
}

impl<'a> ActionTable<'a> {
    pub(crate) fn new(ring: &'a FusionRing, acted_rank: usize, n: &'a [u32]) -> Self {
        debug_assert_eq!(n.len(), ring.rank() * acted_rank * acted_rank);
        ActionTable { ring, acted_rank, n }
    }

    /// The ring acting on itself.
    pub fn regular(ring: &'a FusionRing) -> Self {
        ActionTable::new(ring, ring.rank(), ring.tensor())
    }

    /// `dim Hom(m2, a ▷ m)`.
    #[inline]
    pub fn mult(&self, a: usize, m: usize, m2: usize) -> usize {
        let r = self.acted_rank;
        self.n[(a * r + m) * r + m2] as usize
    }

    pub fn basis(&self, a: usize, b: usize, m: usize, m2: usize) -> BlockBasis {
        let ring = self.ring;
        let mut row_offset = Vec::with_capacity(ring.rank());
        let mut row_inner = Vec::with_capacity(ring.rank());
        let mut rows = 0;
        for e in 0..ring.rank() {
            row_offset.push(rows);
            let inner = self.mult(e, m, m2);
            row_inner.push(inner);
            rows += ring.n(a, b, e) * inner;
        }
        let mut col_offset = Vec::with_capacity(self.acted_rank);
        let mut col_inner = Vec::with_capacity(self.acted_rank);
        let mut cols = 0;
        for mm in 0..self.acted_rank {
            col_offset.push(cols);
            let inner = self.mult(a, mm, m2);
            col_inner.push(inner);
            cols += self.mult(b, m, mm) * inner;
        }
        BlockBasis {
            row_offset,
            row_inner,
            col_offset,
            col_inner,
            rows,
            cols,
        }
    }

    /// Quadruples `(a, b, m, m2)` whose block is nonempty.
    pub fn admissible(&self) -> Vec<(usize, usize, usize, usize)> {
        let r = self.ring.rank();
        let mut out = Vec::new();
        for a in 0..r {
            for b in 0..r {
                for m in 0..self.acted_rank {
                    for m2 in 0..self.acted_rank {
                        if self.basis(a, b, m, m2).rows > 0 {
                            out.push((a, b, m, m2));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Index arithmetic for one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockBasis {
    row_offset: Vec<usize>,
    row_inner: Vec<usize>,
    col_offset: Vec<usize>,
    col_inner: Vec<usize>,
    pub rows: usize,
    pub cols: usize,
}

impl BlockBasis {
    #[inline]
    pub fn row(&self, e: usize, x: usize, y: usize) -> usize {
        self.row_offset[e] + x * self.row_inner[e] + y
    }

    #[inline]
    pub fn col(&self, m: usize, x: usize, y: usize) -> usize {
        self.col_offset[m] + x * self.col_inner[m] + y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_block_sizes() {
        let ring = FusionRing::fibonacci();
        let t = ActionTable::regular(&ring);
        let b = t.basis(1, 1, 1, 1);
        assert_eq!((b.rows, b.cols), (2, 2));
        assert_eq!(b.row(0, 0, 0), 0);
        assert_eq!(b.row(1, 0, 0), 1);
        let b0 = t.basis(1, 1, 1, 0);
        assert_eq!((b0.rows, b0.cols), (1, 1));
        assert_eq!(b0.row(1, 0, 0), 0);
        assert_eq!(t.admissible().len(), 12);
    }

    #[test]
    fn blocks_are_square_by_associativity() {
        for ring in [FusionRing::fibonacci(), FusionRing::ising()] {
            let t = ActionTable::regular(&ring);
            for (a, b, c, d) in t.admissible() {
                let bb = t.basis(a, b, c, d);
                assert_eq!(bb.rows, bb.cols);
            }
        }
    }
}
