//! Sparse integer matrices in canonical column form.
//!
//! Each column is a list of `(row, value)` pairs sorted by row with no zero
//! values, so two matrices are equal as linear maps iff they are equal as data.

use std::fmt;

pub(crate) fn add_i64(a: i64, b: i64) -> i64 {
    a.checked_add(b).unwrap_or_else(|| panic!("integer overflow: {a} + {b}"))
}

pub(crate) fn mul_i64(a: i64, b: i64) -> i64 {
    a.checked_mul(b).unwrap_or_else(|| panic!("integer overflow: {a} * {b}"))
}

pub type SparseVec = Vec<(u32, i64)>;

/// Sort by index and merge duplicate entries, dropping zeros.
pub fn canonical_vec(mut v: Vec<(u32, i64)>) -> SparseVec {
    v.sort_unstable_by_key(|e| e.0);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 = add_i64(last.1, x),
            _ => out.push((i, x)),
        }
        if let Some(last) = out.last() {
            if last.1 == 0 {
                out.pop();
            }
        }
    }
    out.retain(|e| e.1 != 0);
    out
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparseMat {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl fmt::Debug for SparseMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseMat {}x{} [", self.rows, self.cols)?;
        for (j, c) in self.data.iter().enumerate() {
            for (i, v) in c {
                write!(f, " ({i},{j})={v}")?;
            }
        }
        write!(f, " ]")
    }
}

impl SparseMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMat { rows, cols, data: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMat { rows: n, cols: n, data: (0..n).map(|i| vec![(i as u32, 1)]).collect() }
    }

    pub fn from_columns(rows: usize, columns: Vec<Vec<(u32, i64)>>) -> Self {
        let cols = columns.len();
        let data = columns
            .into_iter()
            .map(|c| {
                let c = canonical_vec(c);
                assert!(c.iter().all(|e| (e.0 as usize) < rows), "row index out of range");
                c
            })
            .collect();
        SparseMat { rows, cols, data }
    }

    pub fn from_triplets(rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize, i64)>) -> Self {
        let mut columns = vec![Vec::new(); cols];
        for (i, j, v) in entries {
            assert!(i < rows && j < cols, "triplet ({i},{j}) outside {rows}x{cols}");
            columns[j].push((i as u32, v));
        }
        SparseMat::from_columns(rows, columns)
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut t = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    t.push((i, j, v));
                }
            }
        }
        SparseMat::from_triplets(r, c, t)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0; self.cols]; self.rows];
        for (j, c) in self.data.iter().enumerate() {
            for &(i, v) in c {
                out[i as usize][j] = v;
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> &[(u32, i64)] {
        &self.data[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        match self.data[j].binary_search_by_key(&(i as u32), |e| e.0) {
            Ok(k) => self.data[j][k].1,
            Err(_) => 0,
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|c| c.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_empty())
    }

    pub fn triplets(&self) -> Vec<(usize, usize, i64)> {
        let mut t = Vec::with_capacity(self.nnz());
        for (j, c) in self.data.iter().enumerate() {
            for &(i, v) in c {
                t.push((i as usize, j, v));
            }
        }
        t
    }

    pub fn transpose(&self) -> SparseMat {
        let mut columns = vec![Vec::new(); self.rows];
        for (j, c) in self.data.iter().enumerate() {
            for &(i, v) in c {
                columns[i as usize].push((j as u32, v));
            }
        }
        SparseMat { rows: self.cols, cols: self.rows, data: columns }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &SparseMat) -> SparseMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut acc = vec![0i64; self.rows];
        let mut touched: Vec<u32> = Vec::new();
        let mut data = Vec::with_capacity(other.cols);
        for oc in &other.data {
            for &(k, w) in oc {
                for &(i, v) in &self.data[k as usize] {
                    if acc[i as usize] == 0 {
                        touched.push(i);
                    }
                    acc[i as usize] = add_i64(acc[i as usize], mul_i64(v, w));
                }
            }
            touched.sort_unstable();
            touched.dedup();
            let mut col = Vec::with_capacity(touched.len());
            for &i in &touched {
                let v = acc[i as usize];
                if v != 0 {
                    col.push((i, v));
                }
                acc[i as usize] = 0;
            }
            touched.clear();
            data.push(col);
        }
        SparseMat { rows: self.rows, cols: other.cols, data }
    }

    pub fn apply(&self, v: &[(u32, i64)]) -> SparseVec {
        let mut out = Vec::new();
        for &(k, w) in v {
            for &(i, x) in &self.data[k as usize] {
                out.push((i, mul_i64(x, w)));
            }
        }
        canonical_vec(out)
    }

    pub fn add(&self, other: &SparseMat) -> SparseMat {
        self.lin(other, 1)
    }

    pub fn sub(&self, other: &SparseMat) -> SparseMat {
        self.lin(other, -1)
    }

    fn lin(&self, other: &SparseMat, s: i64) -> SparseMat {
        assert!(self.rows == other.rows && self.cols == other.cols, "dimension mismatch in sum");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut v = a.clone();
                v.extend(b.iter().map(|&(i, x)| (i, mul_i64(s, x))));
                canonical_vec(v)
            })
            .collect();
        SparseMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: i64) -> SparseMat {
        if s == 0 {
            return SparseMat::zeros(self.rows, self.cols);
        }
        let data = self.data.iter().map(|c| c.iter().map(|&(i, v)| (i, mul_i64(s, v))).collect()).collect();
        SparseMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> SparseMat {
        self.scale(-1)
    }

    /// Submatrix on the given row and column index lists (in that order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseMat {
        let mut rmap = vec![u32::MAX; self.rows];
        for (k, &r) in rows.iter().enumerate() {
            rmap[r] = k as u32;
        }
        let data = cols
            .iter()
            .map(|&j| {
                self.data[j]
                    .iter()
                    .filter(|e| rmap[e.0 as usize] != u32::MAX)
                    .map(|&(i, v)| (rmap[i as usize], v))
                    .collect::<Vec<_>>()
            })
            .map(canonical_vec)
            .collect();
        SparseMat { rows: rows.len(), cols: cols.len(), data }
    }

    pub fn hstack(parts: &[&SparseMat]) -> SparseMat {
        let rows = parts.first().map_or(0, |p| p.rows);
        let mut data = Vec::new();
        for p in parts {
            assert_eq!(p.rows, rows, "hstack row mismatch");
            data.extend(p.data.iter().cloned());
        }
        SparseMat { rows, cols: data.len(), data }
    }

    pub fn vstack(parts: &[&SparseMat]) -> SparseMat {
        let cols = parts.first().map_or(0, |p| p.cols);
        let mut data = vec![Vec::new(); cols];
        let mut off = 0u32;
        for p in parts {
            assert_eq!(p.cols, cols, "vstack column mismatch");
            for (j, c) in p.data.iter().enumerate() {
                data[j].extend(c.iter().map(|&(i, v)| (i + off, v)));
            }
            off += p.rows as u32;
        }
        SparseMat { rows: off as usize, cols, data }
    }

    /// Block matrix from a grid of optional blocks; `None` is a zero block.
    pub fn block(row_sizes: &[usize], col_sizes: &[usize], blocks: &[Vec<Option<&SparseMat>>]) -> SparseMat {
        let rows: usize = row_sizes.iter().sum();
        let mut data: Vec<SparseVec> = Vec::new();
        for (bj, &cw) in col_sizes.iter().enumerate() {
            let mut cols = vec![Vec::new(); cw];
            let mut off = 0u32;
            for (bi, &rh) in row_sizes.iter().enumerate() {
                if let Some(m) = blocks[bi][bj] {
                    assert!(m.rows == rh && m.cols == cw, "block shape mismatch");
                    for (j, c) in m.data.iter().enumerate() {
                        cols[j].extend(c.iter().map(|&(i, v)| (i + off, v)));
                    }
                }
                off += rh as u32;
            }
            data.extend(cols);
        }
        SparseMat { rows, cols: data.len(), data }
    }

    /// First entry where the two matrices differ, as `(row, col, self, other)`.
    pub fn first_difference(&self, other: &SparseMat) -> Option<(usize, usize, i64, i64)> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some((usize::MAX, usize::MAX, 0, 0));
        }
        for j in 0..self.cols {
            if self.data[j] != other.data[j] {
                let mut rows: Vec<u32> =
                    self.data[j].iter().map(|e| e.0).chain(other.data[j].iter().map(|e| e.0)).collect();
                rows.sort_unstable();
                for i in rows {
                    let (a, b) = (self.get(i as usize, j), other.get(i as usize, j));
                    if a != b {
                        return Some((i as usize, j, a, b));
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_drops_zeros_and_merges() {
        let m = SparseMat::from_triplets(2, 2, vec![(1, 0, 2), (0, 0, 1), (1, 0, -2), (0, 1, 3)]);
        assert_eq!(m.col(0), &[(0, 1)]);
        assert_eq!(m.col(1), &[(0, 3)]);
    }

    #[test]
    fn product_matches_dense() {
        let a = SparseMat::from_dense(&[vec![1, 2, 0], vec![0, -1, 3]]);
        let b = SparseMat::from_dense(&[vec![1, 0], vec![2, 1], vec![0, -1]]);
        assert_eq!(a.mul(&b).to_dense(), vec![vec![5, 2], vec![-2, -4]]);
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn block_layout() {
        let a = SparseMat::identity(2);
        let b = SparseMat::from_dense(&[vec![7]]);
        let m = SparseMat::block(&[2, 1], &[2, 1], &[vec![Some(&a), None], vec![None, Some(&b)]]);
        assert_eq!(m.to_dense(), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 7]]);
    }
}
