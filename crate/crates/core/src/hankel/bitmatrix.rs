use std::collections::HashSet;
use std::fmt::Write as _;

/// Dense 0/1 matrix with rows packed 64 columns per word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
    /// Index of each row's structure in the pool it was built from.
    pub row_labels: Vec<usize>,
    /// Index of each column's structure or context.
    pub col_labels: Vec<usize>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Self {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
            row_labels: (0..rows).collect(),
            col_labels: (0..cols).collect(),
        }
    }

    /// Builds from packed rows; bits beyond `cols` must be clear.
    pub fn from_packed_rows(cols: usize, rows: Vec<Vec<u64>>) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.into_iter().enumerate() {
            assert_eq!(r.len(), m.words, "packed row width");
            m.data[i * m.words..(i + 1) * m.words].copy_from_slice(&r);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "rows must have equal length");
            for (j, &b) in r.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "index out of range");
        self.data[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        let w = &mut self.data[i * self.words + j / 64];
        if v {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    pub fn distinct_rows(&self) -> usize {
        (0..self.rows).map(|i| self.row_words(i)).collect::<HashSet<_>>().len()
    }

    /// Rank over GF(2) by elimination on a copy.
    pub fn gf2_rank(&self) -> usize {
        let mut rows: Vec<Vec<u64>> = (0..self.rows).map(|i| self.row_words(i).to_vec()).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let (w, bit) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let (top, rest) = rows.split_at_mut(rank + 1);
            let pivot = &top[rank];
            for r in rest.iter_mut() {
                if r[w] & bit != 0 {
                    for (x, y) in r[w..].iter_mut().zip(&pivot[w..]) {
                        *x ^= y;
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// One line of `0`/`1` characters per row.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.rows * (self.cols + 1));
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.push(if self.get(i, j) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    /// Rows with their labels, for dumps: `<label> <bits>`.
    pub fn to_labeled_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let _ = write!(out, "{} ", self.row_labels[i]);
            for j in 0..self.cols {
                out.push(if self.get(i, j) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

pub fn gf2_rank(m: &BitMatrix) -> usize {
    m.gf2_rank()
}
