//! Cost measures for tilings and their smooth relaxations.
//!
//! Discrete costs act on binary factors:
//!
//! * `f_rss = |D − θ(YXᵀ)|`, the number of mismatched cells;
//! * `f_l1 = f_rss + |X| + |Y|`, the sparse-position encoding;
//! * `f_ct`, the description length of a code table whose non-singleton
//!   patterns are the columns of `X`, whose cover is `Y`, and whose singleton
//!   usages are the nonzeros of the noise `N = D − θ(YXᵀ)`.
//!
//! Relaxed objectives act on factors in `[0, 1]` and have the form
//! `F = (μ/2)‖D − YXᵀ‖² + ½ G(X, Y)`, using the elementary product. PANPAL
//! uses `μ = 1` and `G = |X| + |Y|`; PRIMP uses `μ = 1 + ln n`, the item code
//! lengths `c`, and `G = g(1; |Y_{·1}|, …, |Y_{·r}|) + |Xᵀc| + |Y|`, where `g`
//! is [`usage_entropy`]. For nonnegative factors the 1-norms are plain entry
//! sums, which is what makes `G` smooth.
//!
//! All logarithms are natural.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{bool_product, BinaryMatrix, RealMatrix};

/// Which PAL-Tiling instance to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// L1-regularized reconstruction error.
    Panpal,
    /// Code-table description length.
    Primp,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Panpal => "panpal",
            ModelKind::Primp => "primp",
        }
    }

    /// The discrete cost a model of this kind minimizes.
    pub fn discrete_cost(self) -> DiscreteCost {
        match self {
            ModelKind::Panpal => DiscreteCost::L1,
            ModelKind::Primp => DiscreteCost::Ct,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "panpal" => Ok(ModelKind::Panpal),
            "primp" => Ok(ModelKind::Primp),
            other => Err(Error::InvalidArgument(format!(
                "unknown model '{other}' (expected panpal or primp)"
            ))),
        }
    }
}

/// Discrete cost measures on binary factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiscreteCost {
    Rss,
    L1,
    Ct,
}

impl DiscreteCost {
    pub fn evaluate(self, x: &BinaryMatrix, y: &BinaryMatrix, d: &BinaryMatrix) -> Result<f64> {
        match self {
            DiscreteCost::Rss => f_rss(x, y, d),
            DiscreteCost::L1 => f_l1(x, y, d),
            DiscreteCost::Ct => Ok(f_ct(x, y, d)?.total),
        }
    }
}

/// Data and model parts of the code-table description length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CtBreakdown {
    pub data_bits: f64,
    pub model_bits: f64,
    pub total: f64,
}

/// A cost model bundle: relaxed objective, gradients and Lipschitz moduli,
/// bound to one data matrix's dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    kind: ModelKind,
    mu: f64,
    codes: Vec<f64>,
    items: usize,
    transactions: usize,
}

impl CostModel {
    pub fn panpal(d: &BinaryMatrix) -> Self {
        CostModel {
            kind: ModelKind::Panpal,
            mu: 1.0,
            codes: Vec::new(),
            items: d.cols(),
            transactions: d.rows(),
        }
    }

    /// Fails on an all-zero data matrix, which has no code table.
    pub fn primp(d: &BinaryMatrix) -> Result<Self> {
        Ok(CostModel {
            kind: ModelKind::Primp,
            mu: 1.0 + (d.cols() as f64).ln(),
            codes: standard_codes(d)?,
            items: d.cols(),
            transactions: d.rows(),
        })
    }

    pub fn new(kind: ModelKind, d: &BinaryMatrix) -> Result<Self> {
        match kind {
            ModelKind::Panpal => Ok(Self::panpal(d)),
            ModelKind::Primp => Self::primp(d),
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Weight on the squared residual.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Standard code lengths `c_i`; empty for PANPAL.
    pub fn codes(&self) -> &[f64] {
        &self.codes
    }

    fn check_shapes(&self, x: &RealMatrix, y: &RealMatrix, d: &BinaryMatrix) -> Result<()> {
        if d.cols() != self.items || d.rows() != self.transactions {
            return Err(Error::DimensionMismatch {
                op: "cost model data",
                left: (self.transactions, self.items),
                right: d.shape(),
            });
        }
        check_factor_shapes(x.shape(), y.shape(), d)
    }

    /// The discrete cost `f` this model is rounded against.
    pub fn discrete_cost(
        &self,
        x: &BinaryMatrix,
        y: &BinaryMatrix,
        d: &BinaryMatrix,
    ) -> Result<f64> {
        match self.kind {
            ModelKind::Panpal => f_l1(x, y, d),
            ModelKind::Primp => Ok(f_ct_with_codes(x, y, d, &self.codes)?.total),
        }
    }

    /// Regularizer `G(X, Y)`.
    fn regularizer(&self, x: &RealMatrix, y: &RealMatrix) -> f64 {
        match self.kind {
            ModelKind::Panpal => x.sum() + y.sum(),
            ModelKind::Primp => {
                let usage = y.col_sums();
                let pattern_bits: f64 = (0..x.rows())
                    .map(|i| self.codes[i] * x.row(i).iter().sum::<f64>())
                    .sum();
                usage_entropy(&usage, 1.0) + pattern_bits + y.sum()
            }
        }
    }

    pub fn relaxed_objective(
        &self,
        x: &RealMatrix,
        y: &RealMatrix,
        d: &BinaryMatrix,
    ) -> Result<f64> {
        self.check_shapes(x, y, d)?;
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Numerical("non-finite factor entries".into()));
        }
        let mut residual = vec![0.0; d.rows() * d.cols()];
        residual_into(x, y, d, &mut residual);
        let value = self.objective_from_residual(&residual, x, y);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Numerical(format!("relaxed objective is {value}")))
        }
    }

    pub(crate) fn objective_from_residual(
        &self,
        residual: &[f64],
        x: &RealMatrix,
        y: &RealMatrix,
    ) -> f64 {
        let rss: f64 = residual.iter().map(|v| v * v).sum();
        0.5 * self.mu * rss + 0.5 * self.regularizer(x, y)
    }

    pub fn grad_x(&self, x: &RealMatrix, y: &RealMatrix, d: &BinaryMatrix) -> Result<RealMatrix> {
        self.check_shapes(x, y, d)?;
        check_rank(x.cols())?;
        let mut residual = vec![0.0; d.rows() * d.cols()];
        residual_into(x, y, d, &mut residual);
        let mut out = RealMatrix::zeros(x.rows(), x.cols());
        self.grad_x_from_residual(&residual, y, &mut out);
        Ok(out)
    }

    pub fn grad_y(&self, x: &RealMatrix, y: &RealMatrix, d: &BinaryMatrix) -> Result<RealMatrix> {
        self.check_shapes(x, y, d)?;
        check_rank(x.cols())?;
        let mut residual = vec![0.0; d.rows() * d.cols()];
        residual_into(x, y, d, &mut residual);
        let mut out = RealMatrix::zeros(y.rows(), y.cols());
        self.grad_y_from_residual(&residual, x, y, &mut out);
        Ok(out)
    }

    /// `∇_X F = μ RᵀY + ½·(1 or c_i)` with `R = YXᵀ − D`.
    pub(crate) fn grad_x_from_residual(
        &self,
        residual: &[f64],
        y: &RealMatrix,
        out: &mut RealMatrix,
    ) {
        let (n, r) = out.shape();
        let g = out.as_mut_slice();
        g.fill(0.0);
        for j in 0..y.rows() {
            let yrow = y.row(j);
            let rrow = &residual[j * n..(j + 1) * n];
            for (i, &rji) in rrow.iter().enumerate() {
                if rji == 0.0 {
                    continue;
                }
                let gi = &mut g[i * r..(i + 1) * r];
                for (gv, &yv) in gi.iter_mut().zip(yrow) {
                    *gv += rji * yv;
                }
            }
        }
        for i in 0..n {
            let offset = match self.kind {
                ModelKind::Panpal => 0.5,
                ModelKind::Primp => 0.5 * self.codes[i],
            };
            for gv in &mut g[i * r..(i + 1) * r] {
                *gv = self.mu * *gv + offset;
            }
        }
    }

    /// `∇_Y F = μ R X + ½ − ½ ln((|Y_{·s}| + 1)/(|Y| + r))` (log term PRIMP only).
    pub(crate) fn grad_y_from_residual(
        &self,
        residual: &[f64],
        x: &RealMatrix,
        y: &RealMatrix,
        out: &mut RealMatrix,
    ) {
        let (m, r) = out.shape();
        let n = x.rows();
        let offsets: Vec<f64> = match self.kind {
            ModelKind::Panpal => vec![0.5; r],
            ModelKind::Primp => {
                let usage = y.col_sums();
                let total = usage.iter().sum::<f64>() + r as f64;
                usage
                    .iter()
                    .map(|&u| 0.5 - 0.5 * ((u + 1.0) / total).ln())
                    .collect()
            }
        };
        let g = out.as_mut_slice();
        for j in 0..m {
            let rrow = &residual[j * n..(j + 1) * n];
            let gj = &mut g[j * r..(j + 1) * r];
            gj.fill(0.0);
            for (i, &rji) in rrow.iter().enumerate() {
                if rji == 0.0 {
                    continue;
                }
                for (gv, &xv) in gj.iter_mut().zip(x.row(i)) {
                    *gv += rji * xv;
                }
            }
            for (gv, &off) in gj.iter_mut().zip(&offsets) {
                *gv = self.mu * *gv + off;
            }
        }
    }

    /// `M_∇XF(Y) = μ‖YYᵀ‖` (Frobenius).
    pub fn lipschitz_x(&self, y: &RealMatrix) -> f64 {
        self.mu * gram_norm(y)
    }

    /// `M_∇YF(X) = μ‖XXᵀ‖`, plus `m` for PRIMP.
    pub fn lipschitz_y(&self, x: &RealMatrix) -> f64 {
        let extra = match self.kind {
            ModelKind::Panpal => 0.0,
            ModelKind::Primp => self.transactions as f64,
        };
        self.mu * gram_norm(x) + extra
    }
}

fn check_rank(r: usize) -> Result<()> {
    if r == 0 {
        Err(Error::InvalidArgument(
            "gradient of an empty factorization is undefined".into(),
        ))
    } else {
        Ok(())
    }
}

fn check_factor_shapes(x: (usize, usize), y: (usize, usize), d: &BinaryMatrix) -> Result<()> {
    if x.1 != y.1 {
        return Err(Error::DimensionMismatch {
            op: "factor rank",
            left: x,
            right: y,
        });
    }
    if x.0 != d.cols() {
        return Err(Error::DimensionMismatch {
            op: "pattern matrix vs data columns",
            left: x,
            right: d.shape(),
        });
    }
    if y.0 != d.rows() {
        return Err(Error::DimensionMismatch {
            op: "usage matrix vs data rows",
            left: y,
            right: d.shape(),
        });
    }
    Ok(())
}

/// `‖AAᵀ‖_F`, computed through the smaller Gram matrix `AᵀA`.
pub fn gram_norm(a: &RealMatrix) -> f64 {
    a.gram().frobenius()
}

/// `R = YXᵀ − D` into a row-major `m × n` buffer.
pub(crate) fn residual_into(x: &RealMatrix, y: &RealMatrix, d: &BinaryMatrix, out: &mut [f64]) {
    let n = d.cols();
    for j in 0..d.rows() {
        let yrow = y.row(j);
        let drow = d.row(j);
        let orow = &mut out[j * n..(j + 1) * n];
        for i in 0..n {
            let mut acc = 0.0;
            for (a, b) in yrow.iter().zip(x.row(i)) {
                acc += a * b;
            }
            orow[i] = acc - drow[i] as f64;
        }
    }
}

/// `g(x; a) = −Σ_s (a_s + x) ln((a_s + x)/(Σa + r·x))`, with `0·ln 0 = 0`.
///
/// Nondecreasing in `x ≥ 0` for nonnegative `a`. At `x = 1` with `a_s = |Y_{·s}|`
/// it is the smoothed pattern-usage term of the PRIMP objective.
pub fn usage_entropy(a: &[f64], x: f64) -> f64 {
    let total = a.iter().sum::<f64>() + a.len() as f64 * x;
    let mut acc = 0.0;
    for &v in a {
        let u = v + x;
        if u > 0.0 {
            acc -= u * (u / total).ln();
        }
    }
    acc
}

pub fn f_rss(x: &BinaryMatrix, y: &BinaryMatrix, d: &BinaryMatrix) -> Result<f64> {
    check_factor_shapes(x.shape(), y.shape(), d)?;
    let p = bool_product(y, x)?;
    Ok(mismatches(d, &p) as f64)
}

fn mismatches(d: &BinaryMatrix, p: &BinaryMatrix) -> usize {
    d.as_slice()
        .iter()
        .zip(p.as_slice())
        .filter(|(a, b)| a != b)
        .count()
}

pub fn f_l1(x: &BinaryMatrix, y: &BinaryMatrix, d: &BinaryMatrix) -> Result<f64> {
    Ok(f_rss(x, y, d)? + x.count_ones() as f64 + y.count_ones() as f64)
}

/// `c_i = −ln(|D_{·i}| / |D|)`. Items that never occur get `0`.
pub fn standard_codes(d: &BinaryMatrix) -> Result<Vec<f64>> {
    let total = d.count_ones();
    if total == 0 {
        return Err(Error::EmptyData("no code table for an all-zero database"));
    }
    let total = total as f64;
    Ok(d.col_sums()
        .iter()
        .map(|&s| {
            if s == 0 {
                0.0
            } else {
                -(s as f64 / total).ln()
            }
        })
        .collect())
}

/// Code-table description length of `D` encoded with patterns `X`, cover `Y`
/// and singleton codes for every nonzero of `N = D − θ(YXᵀ)`.
pub fn f_ct(x: &BinaryMatrix, y: &BinaryMatrix, d: &BinaryMatrix) -> Result<CtBreakdown> {
    let codes = standard_codes(d)?;
    f_ct_with_codes(x, y, d, &codes)
}

pub(crate) fn f_ct_with_codes(
    x: &BinaryMatrix,
    y: &BinaryMatrix,
    d: &BinaryMatrix,
    codes: &[f64],
) -> Result<CtBreakdown> {
    check_factor_shapes(x.shape(), y.shape(), d)?;
    if d.count_ones() == 0 {
        return Err(Error::EmptyData("no code table for an all-zero database"));
    }
    let p = bool_product(y, x)?;
    let n = d.cols();
    let mut noise = vec![0usize; n];
    for (k, (a, b)) in d.as_slice().iter().zip(p.as_slice()).enumerate() {
        if a != b {
            noise[k % n] += 1;
        }
    }
    let usage = y.col_sums();
    let total = (usage.iter().sum::<usize>() + noise.iter().sum::<usize>()) as f64;

    let mut data_bits = 0.0;
    let mut model_bits = 0.0;
    for (s, &u) in usage.iter().enumerate() {
        if u == 0 {
            continue;
        }
        let code_len = -(u as f64 / total).ln();
        data_bits += u as f64 * code_len;
        let pattern: f64 = (0..n).filter(|&i| x.get(i, s)).map(|i| codes[i]).sum();
        model_bits += pattern + code_len;
    }
    for (i, &u) in noise.iter().enumerate() {
        if u == 0 {
            continue;
        }
        let code_len = -(u as f64 / total).ln();
        data_bits += u as f64 * code_len;
        model_bits += codes[i] + code_len;
    }
    Ok(CtBreakdown {
        data_bits,
        model_bits,
        total: data_bits + model_bits,
    })
}

/// Upper bound on `f_ct.data_bits` for binary factors:
/// `μ‖D − YXᵀ‖² − Σ_s(|Y_{·s}|+1) ln((|Y_{·s}|+1)/(|Y|+r)) + |Y|`, `μ = 1 + ln n`.
pub fn ct_data_bound(x: &BinaryMatrix, y: &BinaryMatrix, d: &BinaryMatrix) -> Result<f64> {
    check_factor_shapes(x.shape(), y.shape(), d)?;
    let mu = 1.0 + (d.cols() as f64).ln();
    let mut rss: u64 = 0;
    for j in 0..d.rows() {
        for i in 0..d.cols() {
            let overlap = y
                .row(j)
                .iter()
                .zip(x.row(i))
                .filter(|(&a, &b)| a & b != 0)
                .count() as i64;
            let diff = d.get(j, i) as i64 - overlap;
            rss += (diff * diff) as u64;
        }
    }
    let usage: Vec<f64> = y.col_sums().iter().map(|&u| u as f64).collect();
    Ok(mu * rss as f64 + usage_entropy(&usage, 1.0) + y.count_ones() as f64)
}

/// Free-function forms of the [`CostModel`] methods.
pub fn relaxed_objective(
    model: &CostModel,
    x: &RealMatrix,
    y: &RealMatrix,
    d: &BinaryMatrix,
) -> Result<f64> {
    model.relaxed_objective(x, y, d)
}

pub fn grad_x(
    model: &CostModel,
    x: &RealMatrix,
    y: &RealMatrix,
    d: &BinaryMatrix,
) -> Result<RealMatrix> {
    model.grad_x(x, y, d)
}

pub fn grad_y(
    model: &CostModel,
    x: &RealMatrix,
    y: &RealMatrix,
    d: &BinaryMatrix,
) -> Result<RealMatrix> {
    model.grad_y(x, y, d)
}

pub fn lipschitz_x(model: &CostModel, y: &RealMatrix) -> f64 {
    model.lipschitz_x(y)
}

pub fn lipschitz_y(model: &CostModel, x: &RealMatrix) -> f64 {
    model.lipschitz_y(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::fixtures::two_tile_example;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::LN_2;

    fn random_binary(rng: &mut impl Rng, rows: usize, cols: usize, p: f64) -> BinaryMatrix {
        BinaryMatrix::from_fn(rows, cols, |_, _| rng.gen_bool(p))
    }

    fn random_unit(rng: &mut impl Rng, rows: usize, cols: usize) -> RealMatrix {
        RealMatrix::from_fn(rows, cols, |_, _| rng.gen::<f64>())
    }

    /// Literal transcription of the code-table formulas, cell by cell.
    fn ct_oracle(x: &BinaryMatrix, y: &BinaryMatrix, d: &BinaryMatrix) -> (f64, f64) {
        let (m, n, r) = (d.rows(), d.cols(), x.cols());
        let total_d: f64 = (0..m)
            .flat_map(|j| (0..n).map(move |i| (j, i)))
            .filter(|&(j, i)| d.get(j, i))
            .count() as f64;
        let c: Vec<f64> = (0..n)
            .map(|i| {
                let s = (0..m).filter(|&j| d.get(j, i)).count() as f64;
                if s == 0.0 {
                    0.0
                } else {
                    -(s / total_d).ln()
                }
            })
            .collect();
        let mut ncol = vec![0.0; n];
        for j in 0..m {
            for i in 0..n {
                let covered = (0..r).any(|s| y.get(j, s) && x.get(i, s));
                if d.get(j, i) != covered {
                    ncol[i] += 1.0;
                }
            }
        }
        let ycol: Vec<f64> = (0..r)
            .map(|s| (0..m).filter(|&j| y.get(j, s)).count() as f64)
            .collect();
        let denom: f64 = ycol.iter().sum::<f64>() + ncol.iter().sum::<f64>();
        let xlogp = |u: f64| if u == 0.0 { 0.0 } else { u * (u / denom).ln() };
        let data = -ycol.iter().map(|&u| xlogp(u)).sum::<f64>()
            - ncol.iter().map(|&u| xlogp(u)).sum::<f64>();
        let mut model = 0.0;
        for s in 0..r {
            if ycol[s] > 0.0 {
                let xc: f64 = (0..n).filter(|&i| x.get(i, s)).map(|i| c[i]).sum();
                model += xc - (ycol[s] / denom).ln();
            }
        }
        for i in 0..n {
            if ncol[i] > 0.0 {
                model += c[i] - (ncol[i] / denom).ln();
            }
        }
        (data, model)
    }

    /// Literal transcription of the relaxed objectives.
    fn relaxed_oracle(kind: ModelKind, x: &RealMatrix, y: &RealMatrix, d: &BinaryMatrix) -> f64 {
        let (m, n, r) = (d.rows(), d.cols(), x.cols());
        let mut rss = 0.0;
        for j in 0..m {
            for i in 0..n {
                let mut p = 0.0;
                for s in 0..r {
                    p += y.get(j, s) * x.get(i, s);
                }
                rss += (d.get(j, i) as u8 as f64 - p).powi(2);
            }
        }
        let xsum: f64 = x.as_slice().iter().sum();
        let ysum: f64 = y.as_slice().iter().sum();
        match kind {
            ModelKind::Panpal => 0.5 * rss + 0.5 * (xsum + ysum),
            ModelKind::Primp => {
                let mu = 1.0 + (n as f64).ln();
                let c = standard_codes(d).unwrap();
                let mut g = 0.0;
                for s in 0..r {
                    let ys: f64 = (0..m).map(|j| y.get(j, s)).sum();
                    g -= (ys + 1.0) * ((ys + 1.0) / (ysum + r as f64)).ln();
                    for i in 0..n {
                        g += x.get(i, s) * c[i];
                    }
                }
                g += ysum;
                0.5 * mu * rss + 0.5 * g
            }
        }
    }

    #[test]
    fn rss_and_l1_on_two_tile_example() {
        let (d, x, y) = two_tile_example();
        assert_eq!(f_rss(&x, &y, &d).unwrap(), 0.0);
        assert_eq!(f_l1(&x, &y, &d).unwrap(), 12.0);
        let (ex, ey) = (BinaryMatrix::zeros(5, 0), BinaryMatrix::zeros(4, 0));
        assert_eq!(f_rss(&ex, &ey, &d).unwrap(), d.count_ones() as f64);
        assert_eq!(f_l1(&ex, &ey, &d).unwrap(), d.count_ones() as f64);
    }

    #[test]
    fn rss_and_l1_match_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let d = random_binary(&mut rng, 6, 7, 0.4);
            let x = random_binary(&mut rng, 7, 3, 0.3);
            let y = random_binary(&mut rng, 6, 3, 0.3);
            let mut errs = 0;
            for j in 0..6 {
                for i in 0..7 {
                    let cov = (0..3).any(|s| y.get(j, s) && x.get(i, s));
                    errs += (cov != d.get(j, i)) as usize;
                }
            }
            assert_eq!(f_rss(&x, &y, &d).unwrap(), errs as f64);
            let l1 = errs + x.count_ones() + y.count_ones();
            assert_eq!(f_l1(&x, &y, &d).unwrap(), l1 as f64);
        }
    }

    #[test]
    fn rss_rejects_mismatch() {
        let d = BinaryMatrix::zeros(3, 4);
        assert!(f_rss(&BinaryMatrix::zeros(3, 2), &BinaryMatrix::zeros(3, 2), &d).is_err());
    }

    #[test]
    fn standard_code_examples() {
        let eye = BinaryMatrix::from_rows(&[&[1, 0], &[0, 1]]);
        let c = standard_codes(&eye).unwrap();
        assert!((c[0] - LN_2).abs() < 1e-15 && (c[1] - LN_2).abs() < 1e-15);
        let col = BinaryMatrix::ones(3, 1);
        assert_eq!(standard_codes(&col).unwrap(), vec![0.0]);
        assert!(matches!(
            standard_codes(&BinaryMatrix::zeros(2, 2)),
            Err(Error::EmptyData(_))
        ));
        let sparse = BinaryMatrix::from_rows(&[&[1, 0, 1], &[1, 0, 0]]);
        assert_eq!(standard_codes(&sparse).unwrap()[1], 0.0);
    }

    #[test]
    fn standard_codes_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = random_binary(&mut rng, 20, 8, 0.5);
        let c = standard_codes(&d).unwrap();
        let total = d.count_ones() as f64;
        for (i, ci) in c.iter().enumerate() {
            let s = (0..20).filter(|&j| d.get(j, i)).count() as f64;
            assert!((ci + (s / total).ln()).abs() < 1e-12);
            assert!(*ci >= 0.0);
        }
    }

    #[test]
    fn ct_identity_empty_model() {
        let d = BinaryMatrix::from_rows(&[&[1, 0], &[0, 1]]);
        let ct = f_ct(&BinaryMatrix::zeros(2, 0), &BinaryMatrix::zeros(2, 0), &d).unwrap();
        assert!((ct.data_bits - 2.0 * LN_2).abs() < 1e-12);
        assert!((ct.model_bits - 4.0 * LN_2).abs() < 1e-12);
        assert!((ct.total - 6.0 * LN_2).abs() < 1e-12);
        let (od, om) = ct_oracle(&BinaryMatrix::zeros(2, 0), &BinaryMatrix::zeros(2, 0), &d);
        assert!((od - ct.data_bits).abs() < 1e-12 && (om - ct.model_bits).abs() < 1e-12);
    }

    #[test]
    fn ct_single_tile_on_ones() {
        let d = BinaryMatrix::ones(2, 2);
        let x = BinaryMatrix::ones(2, 1);
        let y = BinaryMatrix::ones(2, 1);
        let ct = f_ct(&x, &y, &d).unwrap();
        assert!(ct.data_bits.abs() < 1e-15);
        assert!((ct.model_bits - 2.0 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn ct_ignores_unused_patterns() {
        let (d, x, y) = two_tile_example();
        let base = f_ct(&x, &y, &d).unwrap();
        let x3 = BinaryMatrix::from_fn(5, 3, |i, s| if s < 2 { x.get(i, s) } else { i % 2 == 0 });
        let y3 = BinaryMatrix::from_fn(4, 3, |j, s| s < 2 && y.get(j, s));
        let extended = f_ct(&x3, &y3, &d).unwrap();
        assert_eq!(base, extended);
    }

    #[test]
    fn ct_matches_literal_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let (m, n, r) = (
                rng.gen_range(2..9),
                rng.gen_range(2..9),
                rng.gen_range(0..4),
            );
            let d = random_binary(&mut rng, m, n, 0.5);
            if d.count_ones() == 0 {
                continue;
            }
            let x = random_binary(&mut rng, n, r, 0.4);
            let y = random_binary(&mut rng, m, r, 0.4);
            let ct = f_ct(&x, &y, &d).unwrap();
            let (od, om) = ct_oracle(&x, &y, &d);
            assert!((ct.data_bits - od).abs() < 1e-9);
            assert!((ct.model_bits - om).abs() < 1e-9);
            assert!(ct.data_bits >= 0.0 && ct.model_bits >= 0.0);
        }
    }

    #[test]
    fn relaxed_objective_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = random_binary(&mut rng, 5, 6, 0.5);
        let total = d.count_ones() as f64;
        let pan = CostModel::panpal(&d);
        let f = pan
            .relaxed_objective(&RealMatrix::zeros(6, 2), &RealMatrix::zeros(5, 2), &d)
            .unwrap();
        assert!((f - 0.5 * total).abs() < 1e-12);
        let primp = CostModel::primp(&d).unwrap();
        let f = primp
            .relaxed_objective(&RealMatrix::zeros(6, 1), &RealMatrix::zeros(5, 1), &d)
            .unwrap();
        assert!((f - 0.5 * primp.mu() * total).abs() < 1e-12);
    }

    #[test]
    fn relaxed_objective_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for kind in [ModelKind::Panpal, ModelKind::Primp] {
            for _ in 0..20 {
                let (m, n, r) = (
                    rng.gen_range(2..8),
                    rng.gen_range(2..8),
                    rng.gen_range(1..4),
                );
                let mut d = random_binary(&mut rng, m, n, 0.5);
                d.set(0, 0, true);
                let x = random_unit(&mut rng, n, r);
                let y = random_unit(&mut rng, m, r);
                let model = CostModel::new(kind, &d).unwrap();
                let got = model.relaxed_objective(&x, &y, &d).unwrap();
                let want = relaxed_oracle(kind, &x, &y, &d);
                assert!(
                    (got - want).abs() < 1e-9 * want.abs().max(1.0),
                    "{kind}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn relaxed_objective_rejects_non_finite_and_bad_shape() {
        let d = BinaryMatrix::ones(2, 2);
        let model = CostModel::panpal(&d);
        let mut x = RealMatrix::zeros(2, 1);
        x.set(0, 0, f64::NAN);
        assert!(model
            .relaxed_objective(&x, &RealMatrix::zeros(2, 1), &d)
            .is_err());
        assert!(model
            .relaxed_objective(&RealMatrix::zeros(3, 1), &RealMatrix::zeros(2, 1), &d)
            .is_err());
    }

    fn central_difference(
        model: &CostModel,
        x: &RealMatrix,
        y: &RealMatrix,
        d: &BinaryMatrix,
        wrt_x: bool,
        (row, col): (usize, usize),
    ) -> f64 {
        let h = 1e-6;
        let eval = |delta: f64| {
            let (mut xp, mut yp) = (x.clone(), y.clone());
            if wrt_x {
                xp.set(row, col, x.get(row, col) + delta);
            } else {
                yp.set(row, col, y.get(row, col) + delta);
            }
            model.relaxed_objective(&xp, &yp, d).unwrap()
        };
        (eval(h) - eval(-h)) / (2.0 * h)
    }

    #[test]
    fn gradients_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for kind in [ModelKind::Panpal, ModelKind::Primp] {
            for _ in 0..5 {
                let (m, n, r) = (
                    rng.gen_range(3..8),
                    rng.gen_range(3..8),
                    rng.gen_range(1..4),
                );
                let mut d = random_binary(&mut rng, m, n, 0.5);
                d.set(0, 0, true);
                let x = RealMatrix::from_fn(n, r, |_, _| rng.gen_range(0.1..0.9));
                let y = RealMatrix::from_fn(m, r, |_, _| rng.gen_range(0.1..0.9));
                let model = CostModel::new(kind, &d).unwrap();
                let gx = model.grad_x(&x, &y, &d).unwrap();
                let gy = model.grad_y(&x, &y, &d).unwrap();
                for i in 0..n {
                    for s in 0..r {
                        let fd = central_difference(&model, &x, &y, &d, true, (i, s));
                        assert!(
                            (gx.get(i, s) - fd).abs() < 1e-5 * fd.abs().max(1.0),
                            "{kind} dX"
                        );
                    }
                }
                for j in 0..m {
                    for s in 0..r {
                        let fd = central_difference(&model, &x, &y, &d, false, (j, s));
                        assert!(
                            (gy.get(j, s) - fd).abs() < 1e-5 * fd.abs().max(1.0),
                            "{kind} dY"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn gradient_is_lipschitz_with_stated_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for kind in [ModelKind::Panpal, ModelKind::Primp] {
            let mut d = random_binary(&mut rng, 7, 6, 0.5);
            d.set(0, 0, true);
            let model = CostModel::new(kind, &d).unwrap();
            let y = random_unit(&mut rng, 7, 3);
            let x = random_unit(&mut rng, 6, 3);
            for _ in 0..10 {
                let x1 = random_unit(&mut rng, 6, 3);
                let x2 = random_unit(&mut rng, 6, 3);
                let g = model
                    .grad_x(&x1, &y, &d)
                    .unwrap()
                    .sub(&model.grad_x(&x2, &y, &d).unwrap())
                    .unwrap();
                let bound = model.lipschitz_x(&y) * x1.sub(&x2).unwrap().frobenius();
                assert!(g.frobenius() <= bound + 1e-9);
                let y1 = random_unit(&mut rng, 7, 3);
                let y2 = random_unit(&mut rng, 7, 3);
                let g = model
                    .grad_y(&x, &y1, &d)
                    .unwrap()
                    .sub(&model.grad_y(&x, &y2, &d).unwrap())
                    .unwrap();
                let bound = model.lipschitz_y(&x) * y1.sub(&y2).unwrap().frobenius();
                assert!(g.frobenius() <= bound + 1e-9);
            }
        }
    }

    #[test]
    fn usage_entropy_is_nondecreasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let a: Vec<f64> = (0..rng.gen_range(1..6))
                .map(|_| rng.gen_range(0..20) as f64)
                .collect();
            let mut prev = usage_entropy(&a, 0.0);
            for k in 1..40 {
                let cur = usage_entropy(&a, k as f64 * 0.05);
                assert!(cur >= prev - 1e-12);
                prev = cur;
            }
        }
    }

    #[test]
    fn panpal_gradient_at_exact_factorization() {
        let (d, x, y) = two_tile_example();
        let model = CostModel::panpal(&d);
        // elementary product has two overlap cells, so build a disjoint exact pair
        let d2 = BinaryMatrix::from_rows(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
        let x2 = RealMatrix::from_rows(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let y2 = RealMatrix::from_rows(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let g = CostModel::panpal(&d2).grad_x(&x2, &y2, &d2).unwrap();
        assert!(g.as_slice().iter().all(|&v| v == 0.5));
        assert!(model.grad_x(&x.to_real(), &y.to_real(), &d).is_ok());
    }

    #[test]
    fn primp_log_term_at_zero_usage() {
        let d = BinaryMatrix::from_rows(&[&[1, 0], &[0, 1], &[1, 1]]);
        let model = CostModel::primp(&d).unwrap();
        let x = RealMatrix::zeros(2, 2);
        let y = RealMatrix::zeros(3, 2);
        let g = model.grad_y(&x, &y, &d).unwrap();
        let want = 0.5 - 0.5 * (0.5f64).ln();
        assert!(g.as_slice().iter().all(|&v| (v - want).abs() < 1e-15));
    }

    #[test]
    fn gradient_of_empty_factorization_is_error() {
        let d = BinaryMatrix::ones(2, 2);
        let model = CostModel::panpal(&d);
        assert!(model
            .grad_x(&RealMatrix::zeros(2, 0), &RealMatrix::zeros(2, 0), &d)
            .is_err());
    }

    #[test]
    fn lipschitz_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let d = random_binary(&mut rng, 6, 4, 0.5);
        let primp = CostModel::primp(&d).unwrap();
        assert_eq!(primp.lipschitz_y(&RealMatrix::zeros(4, 3)), 6.0);
        let pan = CostModel::panpal(&d);
        let eye = RealMatrix::from_fn(6, 6, |j, s| (j == s) as u8 as f64);
        assert!((pan.lipschitz_x(&eye) - 6f64.sqrt()).abs() < 1e-12);
        let x = random_unit(&mut rng, 4, 3);
        let outer = x.mul_transpose(&x).unwrap().frobenius();
        assert!((primp.lipschitz_y(&x) - (primp.mu() * outer + 6.0)).abs() < 1e-9);
    }

    #[test]
    fn data_bound_on_two_tile_example() {
        let (d, x, y) = two_tile_example();
        let bound = ct_data_bound(&x, &y, &d).unwrap();
        // two overlap cells give ‖D − YXᵀ‖² = 2; usages 3 and 2
        let mu = 1.0 + 5f64.ln();
        let want = 2.0 * mu - (4.0 * (4.0f64 / 7.0).ln() + 3.0 * (3.0f64 / 7.0).ln()) + 5.0;
        assert!((bound - want).abs() < 1e-12);
        assert!(bound >= f_ct(&x, &y, &d).unwrap().data_bits);
    }

    #[test]
    fn data_bound_of_empty_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut d = random_binary(&mut rng, 9, 7, 0.3);
        d.set(0, 0, true);
        let (ex, ey) = (BinaryMatrix::zeros(7, 0), BinaryMatrix::zeros(9, 0));
        let bound = ct_data_bound(&ex, &ey, &d).unwrap();
        let mu = 1.0 + 7f64.ln();
        assert!((bound - mu * d.count_ones() as f64).abs() < 1e-9);
        assert!(bound >= f_ct(&ex, &ey, &d).unwrap().data_bits);
    }

    #[test]
    fn model_kind_parsing() {
        assert_eq!("PRIMP".parse::<ModelKind>().unwrap(), ModelKind::Primp);
        assert_eq!("panpal".parse::<ModelKind>().unwrap(), ModelKind::Panpal);
        assert!("asso".parse::<ModelKind>().is_err());
    }

    proptest! {
        #[test]
        fn ct_invariant_under_column_permutation(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut d = random_binary(&mut rng, 6, 5, 0.5);
            d.set(0, 0, true);
            let x = random_binary(&mut rng, 5, 4, 0.4);
            let y = random_binary(&mut rng, 6, 4, 0.4);
            let perm = [2usize, 0, 3, 1];
            let a = f_ct(&x, &y, &d).unwrap();
            let b = f_ct(&x.select_columns(&perm), &y.select_columns(&perm), &d).unwrap();
            prop_assert!((a.total - b.total).abs() < 1e-9);
        }

        #[test]
        fn rss_and_l1_invariant_under_transpose(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_binary(&mut rng, 5, 7, 0.5);
            let x = random_binary(&mut rng, 7, 3, 0.4);
            let y = random_binary(&mut rng, 5, 3, 0.4);
            let dt = d.transpose();
            prop_assert_eq!(f_rss(&x, &y, &d).unwrap(), f_rss(&y, &x, &dt).unwrap());
            prop_assert_eq!(f_l1(&x, &y, &d).unwrap(), f_l1(&y, &x, &dt).unwrap());
        }
    }
}
