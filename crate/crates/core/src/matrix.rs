//! Dense binary, signed and real matrices.
//!
//! All matrices are stored row-major. A data matrix `D` has one row per
//! transaction and one column per item; a pattern matrix `X` is
//! `items × rank` and a usage matrix `Y` is `transactions × rank`, so the
//! reconstruction is `Y Xᵀ`.
//!
//! Binary matrices keep their column sums up to date on every mutation,
//! since the usage counts `|Y_{·s}|` are read in every cost evaluation.

use crate::error::{Error, Result};

/// Dense 0/1 matrix with cached column sums.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
    col_sums: Vec<usize>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BinaryMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
            col_sums: vec![0; cols],
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        BinaryMatrix {
            rows,
            cols,
            data: vec![1; rows * cols],
            col_sums: vec![rows; cols],
        }
    }

    /// Builds a matrix from row-major 0/1 values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|&v| v > 1) {
            return Err(Error::InvalidEntry {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
                value: data[pos] as f64,
            });
        }
        let mut m = BinaryMatrix {
            rows,
            cols,
            data,
            col_sums: Vec::new(),
        };
        m.recompute_col_sums();
        Ok(m)
    }

    /// Builds a matrix from literal rows. Panics on ragged or non-binary input.
    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_vec(rows.len(), cols, data).expect("entries must be 0 or 1")
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..rows {
            for i in 0..cols {
                data.push(f(j, i) as u8);
            }
        }
        let mut m = BinaryMatrix {
            rows,
            cols,
            data,
            col_sums: Vec::new(),
        };
        m.recompute_col_sums();
        m
    }

    fn recompute_col_sums(&mut self) {
        let mut sums = vec![0usize; self.cols];
        for row in self.data.chunks_exact(self.cols.max(1)).take(self.rows) {
            for (s, &v) in sums.iter_mut().zip(row) {
                *s += v as usize;
            }
        }
        self.col_sums = sums;
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row * self.cols + col] != 0
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        let cell = &mut self.data[row * self.cols + col];
        let old = *cell != 0;
        if old != value {
            *cell = value as u8;
            if value {
                self.col_sums[col] += 1;
            } else {
                self.col_sums[col] -= 1;
            }
        }
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    /// Column indices holding a one in the given row, ascending.
    pub fn row_ones(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(row)
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| (v != 0).then_some(i))
    }

    #[inline]
    pub fn col_sum(&self, col: usize) -> usize {
        self.col_sums[col]
    }

    pub fn col_sums(&self) -> &[usize] {
        &self.col_sums
    }

    pub fn row_sums(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|j| self.row(j).iter().map(|&v| v as usize).sum())
            .collect()
    }

    /// Number of ones, `|M|`.
    pub fn count_ones(&self) -> usize {
        self.col_sums.iter().sum()
    }

    pub fn column(&self, col: usize) -> Vec<bool> {
        (0..self.rows).map(|j| self.get(j, col)).collect()
    }

    pub fn transpose(&self) -> Self {
        BinaryMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Keeps the listed columns in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> Self {
        BinaryMatrix::from_fn(self.rows, keep.len(), |j, s| self.get(j, keep[s]))
    }

    /// Pads with zero columns up to `cols` columns.
    pub fn padded_to(&self, cols: usize) -> Self {
        assert!(cols >= self.cols);
        BinaryMatrix::from_fn(self.rows, cols, |j, s| s < self.cols && self.get(j, s))
    }

    pub fn to_real(&self) -> RealMatrix {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v as f64).collect(),
        }
    }

    /// Rows packed into 64-bit words, used by the Boolean product.
    fn packed_rows(&self) -> (usize, Vec<u64>) {
        let words = self.cols.div_ceil(64).max(1);
        let mut packed = vec![0u64; self.rows * words];
        for j in 0..self.rows {
            for i in self.row_ones(j) {
                packed[j * words + i / 64] |= 1u64 << (i % 64);
            }
        }
        (words, packed)
    }
}

/// Dense real matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        RealMatrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidEntry {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
                value: data[pos],
            });
        }
        Ok(RealMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_vec(rows.len(), cols, data).expect("entries must be finite")
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..rows {
            for i in 0..cols {
                data.push(f(j, i));
            }
        }
        RealMatrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// True when every entry lies in `[0, 1]`.
    pub fn in_unit_box(&self) -> bool {
        self.data.iter().all(|&v| (0.0..=1.0).contains(&v))
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for row in self.data.chunks_exact(self.cols.max(1)).take(self.rows) {
            for (s, &v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        sums
    }

    /// Appends the columns of `other` on the right.
    pub fn hstack(&self, other: &RealMatrix) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                op: "hstack",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for j in 0..self.rows {
            data.extend_from_slice(self.row(j));
            data.extend_from_slice(other.row(j));
        }
        Ok(RealMatrix {
            rows: self.rows,
            cols,
            data,
        })
    }

    /// Elementary product `self · otherᵀ`.
    pub fn mul_transpose(&self, other: &RealMatrix) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                op: "mul_transpose",
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(RealMatrix::from_fn(self.rows, other.rows, |j, i| {
            dot(self.row(j), other.row(i))
        }))
    }

    /// Gram matrix `selfᵀ · self`, of size `cols × cols`.
    pub fn gram(&self) -> RealMatrix {
        let r = self.cols;
        let mut g = vec![0.0; r * r];
        for row in self.data.chunks_exact(r.max(1)).take(self.rows) {
            for (s, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (t, &b) in row.iter().enumerate() {
                    g[s * r + t] += a * b;
                }
            }
        }
        RealMatrix {
            rows: r,
            cols: r,
            data: g,
        }
    }

    pub fn sub(&self, other: &RealMatrix) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op: "sub",
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.frobenius_sq().sqrt()
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Matrix with entries in `{-1, 0, 1}`, used for the noise `N = D − θ(YXᵀ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i8>,
}

impl SignedMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SignedMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<i8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !(-1..=1).contains(v)) {
            return Err(Error::InvalidEntry {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
                value: data[pos] as f64,
            });
        }
        Ok(SignedMatrix { rows, cols, data })
    }

    /// `a − b` for binary matrices of equal shape.
    pub fn difference(a: &BinaryMatrix, b: &BinaryMatrix) -> Result<Self> {
        if a.shape() != b.shape() {
            return Err(Error::DimensionMismatch {
                op: "difference",
                left: a.shape(),
                right: b.shape(),
            });
        }
        Ok(SignedMatrix {
            rows: a.rows,
            cols: a.cols,
            data: a
                .as_slice()
                .iter()
                .zip(b.as_slice())
                .map(|(&x, &y)| x as i8 - y as i8)
                .collect(),
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: i8) {
        assert!((-1..=1).contains(&value));
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[i8] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.data
    }

    /// Number of nonzero entries per column, `|N_{·i}|`.
    pub fn col_nonzeros(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.cols];
        for row in self.data.chunks_exact(self.cols.max(1)).take(self.rows) {
            for (c, &v) in counts.iter_mut().zip(row) {
                *c += (v != 0) as usize;
            }
        }
        counts
    }
}

/// `|M|` and `‖M‖²` for every matrix kind.
pub trait EntrywiseNorms {
    fn entrywise_l1(&self) -> f64;
    fn frobenius_sq(&self) -> f64;
}

impl EntrywiseNorms for BinaryMatrix {
    fn entrywise_l1(&self) -> f64 {
        self.count_ones() as f64
    }

    fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|&v| (v as f64) * (v as f64)).sum()
    }
}

impl EntrywiseNorms for RealMatrix {
    fn entrywise_l1(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }
}

impl EntrywiseNorms for SignedMatrix {
    fn entrywise_l1(&self) -> f64 {
        self.data.iter().map(|&v| v.unsigned_abs() as f64).sum()
    }

    fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|&v| (v as f64) * (v as f64)).sum()
    }
}

pub fn entrywise_l1<M: EntrywiseNorms + ?Sized>(m: &M) -> f64 {
    m.entrywise_l1()
}

pub fn frobenius_sq<M: EntrywiseNorms + ?Sized>(m: &M) -> f64 {
    m.frobenius_sq()
}

/// Counts of `+1` and `−1` entries of a noise matrix.
pub fn noise_split(noise: &SignedMatrix) -> (usize, usize) {
    noise
        .as_slice()
        .iter()
        .fold((0, 0), |(pos, neg), &v| match v {
            1 => (pos + 1, neg),
            -1 => (pos, neg + 1),
            _ => (pos, neg),
        })
}

/// `θ_t`: one where the entry is at least `t`.
pub fn threshold(m: &RealMatrix, t: f64) -> BinaryMatrix {
    BinaryMatrix::from_fn(m.rows(), m.cols(), |j, i| m.get(j, i) >= t)
}

/// Boolean product `θ(Y Xᵀ)` of a usage matrix `Y` (m×r) and a pattern
/// matrix `X` (n×r).
pub fn bool_product(y: &BinaryMatrix, x: &BinaryMatrix) -> Result<BinaryMatrix> {
    if y.cols() != x.cols() {
        return Err(Error::DimensionMismatch {
            op: "bool_product",
            left: y.shape(),
            right: x.shape(),
        });
    }
    let (words, py) = y.packed_rows();
    let (_, px) = x.packed_rows();
    Ok(BinaryMatrix::from_fn(y.rows(), x.rows(), |j, i| {
        let yr = &py[j * words..(j + 1) * words];
        let xr = &px[i * words..(i + 1) * words];
        yr.iter().zip(xr).any(|(a, b)| a & b != 0)
    }))
}

/// Number of tiles with more than one item and more than one transaction.
pub fn valuable_rank(x: &BinaryMatrix, y: &BinaryMatrix) -> Result<usize> {
    if x.cols() != y.cols() {
        return Err(Error::DimensionMismatch {
            op: "valuable_rank",
            left: x.shape(),
            right: y.shape(),
        });
    }
    Ok((0..x.cols())
        .filter(|&s| x.col_sum(s) > 1 && y.col_sum(s) > 1)
        .count())
}

/// Indices of valuable (non-trivial) tiles.
pub fn valuable_columns(x: &BinaryMatrix, y: &BinaryMatrix) -> Vec<usize> {
    (0..x.cols().min(y.cols()))
        .filter(|&s| x.col_sum(s) > 1 && y.col_sum(s) > 1)
        .collect()
}


#[cfg(test)]
mod tests {
    use super::fixtures::two_tile_example;
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_binary(rng: &mut impl Rng, rows: usize, cols: usize, p: f64) -> BinaryMatrix {
        BinaryMatrix::from_fn(rows, cols, |_, _| rng.gen_bool(p))
    }

    #[test]
    fn threshold_boundary_is_inclusive() {
        let m = RealMatrix::from_rows(&[&[0.5, 0.49]]);
        let b = threshold(&m, 0.5);
        assert!(b.get(0, 0));
        assert!(!b.get(0, 1));
    }

    #[test]
    fn threshold_matches_scalar_comparison() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = RealMatrix::from_fn(5, 5, |_, _| rng.gen::<f64>());
        let b = threshold(&m, 0.3);
        for j in 0..5 {
            for i in 0..5 {
                assert_eq!(b.get(j, i), m.get(j, i) >= 0.3);
            }
        }
    }

    #[test]
    fn bool_product_reproduces_two_tile_example() {
        let (d, x, y) = two_tile_example();
        assert_eq!(bool_product(&y, &x).unwrap(), d);
    }

    #[test]
    fn bool_product_of_zero_usage_is_zero() {
        let (_, x, _) = two_tile_example();
        let y = BinaryMatrix::zeros(4, 2);
        assert_eq!(bool_product(&y, &x).unwrap().count_ones(), 0);
    }

    #[test]
    fn bool_product_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let y = random_binary(&mut rng, 6, 3, 0.4);
            let x = random_binary(&mut rng, 4, 3, 0.4);
            let p = bool_product(&y, &x).unwrap();
            for j in 0..6 {
                for i in 0..4 {
                    let mut any = false;
                    for s in 0..3 {
                        any |= y.get(j, s) && x.get(i, s);
                    }
                    assert_eq!(p.get(j, i), any);
                }
            }
        }
    }

    #[test]
    fn bool_product_wide_rank_crosses_word_boundary() {
        let y = BinaryMatrix::from_fn(2, 130, |j, s| s == 129 && j == 0);
        let x = BinaryMatrix::from_fn(3, 130, |i, s| s == 129 && i == 2);
        let p = bool_product(&y, &x).unwrap();
        assert_eq!(p.count_ones(), 1);
        assert!(p.get(0, 2));
    }

    #[test]
    fn bool_product_rejects_mismatch() {
        let y = BinaryMatrix::zeros(2, 3);
        let x = BinaryMatrix::zeros(2, 2);
        assert!(matches!(
            bool_product(&y, &x),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn exact_factorization_has_no_noise() {
        let (d, x, y) = two_tile_example();
        let n = SignedMatrix::difference(&d, &bool_product(&y, &x).unwrap()).unwrap();
        assert_eq!(noise_split(&n), (0, 0));
    }

    #[test]
    fn noise_split_matches_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data: Vec<i8> = (0..25).map(|_| rng.gen_range(-1..=1)).collect();
        let n = SignedMatrix::from_vec(5, 5, data.clone()).unwrap();
        let pos = data.iter().filter(|&&v| v == 1).count();
        let neg = data.iter().filter(|&&v| v == -1).count();
        assert_eq!(noise_split(&n), (pos, neg));
        assert_eq!(n.entrywise_l1(), (pos + neg) as f64);
    }

    #[test]
    fn signed_rejects_out_of_range() {
        assert!(SignedMatrix::from_vec(1, 2, vec![0, 2]).is_err());
    }

    #[test]
    fn valuable_rank_of_two_tile_example() {
        let (_, x, y) = two_tile_example();
        assert_eq!(valuable_rank(&x, &y).unwrap(), 2);
    }

    #[test]
    fn singleton_columns_are_not_valuable() {
        let x = BinaryMatrix::from_rows(&[&[1, 1], &[0, 1], &[0, 1]]);
        let y = BinaryMatrix::from_rows(&[&[1, 1], &[1, 1]]);
        assert_eq!(valuable_rank(&x, &y).unwrap(), 1);
        assert_eq!(valuable_columns(&x, &y), vec![1]);
        assert_eq!(
            valuable_rank(&BinaryMatrix::zeros(3, 4), &BinaryMatrix::zeros(5, 4)).unwrap(),
            0
        );
    }

    #[test]
    fn set_keeps_column_sums() {
        let mut m = BinaryMatrix::zeros(3, 2);
        m.set(0, 1, true);
        m.set(2, 1, true);
        m.set(2, 1, true);
        assert_eq!(m.col_sums(), &[0, 2]);
        m.set(0, 1, false);
        assert_eq!(m.col_sum(1), 1);
        assert_eq!(m.row_sums(), vec![0, 0, 1]);
    }

    #[test]
    fn gram_frobenius_matches_outer_gram() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = RealMatrix::from_fn(7, 3, |_, _| rng.gen::<f64>());
        let outer = a.mul_transpose(&a).unwrap();
        assert!((outer.frobenius() - a.gram().frobenius()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn binary_norms_agree(rows in 0usize..8, cols in 0usize..8, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_binary(&mut rng, rows, cols, 0.5);
            prop_assert_eq!(entrywise_l1(&m), frobenius_sq(&m));
        }

        #[test]
        fn bool_product_is_thresholded_real_product(seed in any::<u64>(), m in 1usize..7, n in 1usize..7, r in 0usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let y = random_binary(&mut rng, m, r, 0.5);
            let x = random_binary(&mut rng, n, r, 0.5);
            let real = y.to_real().mul_transpose(&x.to_real()).unwrap();
            prop_assert_eq!(bool_product(&y, &x).unwrap(), threshold(&real, 1.0));
            prop_assert!(valuable_rank(&x, &y).unwrap() <= x.cols());
        }

        #[test]
        fn threshold_idempotent_on_binary(seed in any::<u64>(), t in 0.001f64..=1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = random_binary(&mut rng, 4, 5, 0.5);
            prop_assert_eq!(threshold(&b.to_real(), t), b);
        }
    }
}
