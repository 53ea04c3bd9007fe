//! Tile recovery scores and relative costs.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{BinaryMatrix, RealMatrix};
use crate::objectives::DiscreteCost;

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    /// `sigma[s]` is the computed tile matched to planted tile `s`.
    pub sigma: Vec<usize>,
    pub per_pair_f: RealMatrix,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn column_overlap(a: &BinaryMatrix, s: usize, b: &BinaryMatrix, t: usize) -> usize {
    (0..a.rows())
        .filter(|&j| a.get(j, s) && b.get(j, t))
        .count()
}

/// Rank both pairs are padded to.
fn padded_rank(xs: &BinaryMatrix, xt: &BinaryMatrix) -> usize {
    xs.cols().max(xt.cols())
}

/// `|Y*_s ∘ Y_t| · |X*_s ∘ X_t|`, the cells tile `t` shares with tile `s`.
fn intersections(
    xs: &BinaryMatrix,
    ys: &BinaryMatrix,
    xt: &BinaryMatrix,
    yt: &BinaryMatrix,
    r: usize,
) -> Vec<usize> {
    let mut out = vec![0; r * r];
    for s in 0..xs.cols() {
        for t in 0..xt.cols() {
            out[s * r + t] = column_overlap(ys, s, yt, t) * column_overlap(xs, s, xt, t);
        }
    }
    out
}

fn areas(x: &BinaryMatrix, y: &BinaryMatrix, r: usize) -> Vec<usize> {
    (0..r)
        .map(|s| {
            if s < x.cols() {
                x.col_sum(s) * y.col_sum(s)
            } else {
                0
            }
        })
        .collect()
}

fn check_pair(x: &BinaryMatrix, y: &BinaryMatrix) -> Result<()> {
    if x.cols() != y.cols() {
        return Err(Error::DimensionMismatch {
            op: "tiling rank",
            left: x.shape(),
            right: y.shape(),
        });
    }
    Ok(())
}

fn check_tilings(
    xs: &BinaryMatrix,
    ys: &BinaryMatrix,
    xt: &BinaryMatrix,
    yt: &BinaryMatrix,
) -> Result<()> {
    check_pair(xs, ys)?;
    check_pair(xt, yt)?;
    if xs.rows() != xt.rows() || ys.rows() != yt.rows() {
        return Err(Error::DimensionMismatch {
            op: "planted vs computed tiling",
            left: (ys.rows(), xs.rows()),
            right: (yt.rows(), xt.rows()),
        });
    }
    Ok(())
}

/// `F_{s,t}` between planted tile `s` and computed tile `t`, zero-padded to a
/// square matrix. Zero-area tiles score 0 against everything.
pub fn pairwise_f(
    xs: &BinaryMatrix,
    ys: &BinaryMatrix,
    xt: &BinaryMatrix,
    yt: &BinaryMatrix,
) -> Result<RealMatrix> {
    check_tilings(xs, ys, xt, yt)?;
    let r = padded_rank(xs, xt);
    let inter = intersections(xs, ys, xt, yt, r);
    let (area_s, area_t) = (areas(xs, ys, r), areas(xt, yt, r));
    Ok(RealMatrix::from_fn(r, r, |s, t| {
        let i = inter[s * r + t];
        harmonic(ratio(i, area_t[t]), ratio(i, area_s[s]))
    }))
}

/// Assignment maximizing `Σ_s F[s][σ(s)]` on a square matrix.
pub fn match_tiles(f: &RealMatrix) -> Result<Vec<usize>> {
    let r = f.rows();
    if f.cols() != r {
        return Err(Error::DimensionMismatch {
            op: "match_tiles",
            left: f.shape(),
            right: (r, r),
        });
    }
    if !f.is_finite() {
        return Err(Error::Numerical("non-finite score matrix".into()));
    }
    if r == 0 {
        return Ok(Vec::new());
    }
    let top = f
        .as_slice()
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let cost = |i: usize, j: usize| top - f.get(i, j);

    // potentials over 1-based rows/columns; column 0 is a virtual source
    let mut u = vec![0.0; r + 1];
    let mut v = vec![0.0; r + 1];
    let mut p = vec![0usize; r + 1];
    let mut way = vec![0usize; r + 1];
    for i in 1..=r {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; r + 1];
        let mut used = vec![false; r + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=r {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=r {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut sigma = vec![0; r];
    for j in 1..=r {
        sigma[p[j] - 1] = j - 1;
    }
    Ok(sigma)
}

/// Micro-averaged F-measure of a computed tiling `(x, y)` against the planted
/// `(xs, ys)`. If the computed tiling is empty the score is 1 when the planted
/// one is empty too and 0 otherwise.
pub fn micro_f(
    xs: &BinaryMatrix,
    ys: &BinaryMatrix,
    x: &BinaryMatrix,
    y: &BinaryMatrix,
) -> Result<MatchResult> {
    check_tilings(xs, ys, x, y)?;
    let r = padded_rank(xs, x);
    let inter = intersections(xs, ys, x, y, r);
    let (area_s, area_t) = (areas(xs, ys, r), areas(x, y, r));
    let per_pair_f = RealMatrix::from_fn(r, r, |s, t| {
        let i = inter[s * r + t];
        harmonic(ratio(i, area_t[t]), ratio(i, area_s[s]))
    });
    let sigma = match_tiles(&per_pair_f)?;
    let (total_s, total_t): (usize, usize) = (area_s.iter().sum(), area_t.iter().sum());
    if total_t == 0 {
        let f = if total_s == 0 { 1.0 } else { 0.0 };
        return Ok(MatchResult {
            sigma,
            per_pair_f,
            precision: f,
            recall: f,
            f_measure: f,
        });
    }
    let hit: usize = (0..r).map(|s| inter[s * r + sigma[s]]).sum();
    let precision = ratio(hit, total_t);
    let recall = ratio(hit, total_s);
    Ok(MatchResult {
        sigma,
        per_pair_f,
        precision,
        recall,
        f_measure: harmonic(precision, recall),
    })
}

/// `f(X, Y, D) / f(0, 0, D) · 100`.
pub fn relative_cost(
    cost: DiscreteCost,
    x: &BinaryMatrix,
    y: &BinaryMatrix,
    d: &BinaryMatrix,
) -> Result<f64> {
    if d.count_ones() == 0 {
        return Err(Error::EmptyData("relative cost of an all-zero database"));
    }
    let empty = cost.evaluate(
        &BinaryMatrix::zeros(d.cols(), 0),
        &BinaryMatrix::zeros(d.rows(), 0),
        d,
    )?;
    Ok(cost.evaluate(x, y, d)? / empty * 100.0)
}

/// Sample mean and `n − 1` standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// One line of the metrics CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub run_id: String,
    pub model: String,
    pub n: usize,
    pub m: usize,
    pub r_star: usize,
    pub q: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub seed: u64,
    pub rank_offered: usize,
    pub rank_valuable: usize,
    pub f_measure: f64,
    pub precision: f64,
    pub recall: f64,
    pub pct_f_rss: f64,
    pub pct_f_l1: f64,
    pub pct_f_ct: f64,
    pub wall_ms: u64,
}

pub const METRIC_HEADER: &str = "run_id,model,n,m,r_star,q,p_plus,p_minus,seed,rank_offered,rank_valuable,f_measure,precision,recall,pct_f_rss,pct_f_l1,pct_f_ct,wall_ms";

impl MetricRow {
    pub fn to_csv_line(&self) -> String {
        let mut out = String::new();
        write!(
            out,
            "{},{},{},{},{},{:?},{:?},{:?},{},{},{},{:?},{:?},{:?},{:?},{:?},{:?},{}",
            csv_field(&self.run_id),
            csv_field(&self.model),
            self.n,
            self.m,
            self.r_star,
            self.q,
            self.p_plus,
            self.p_minus,
            self.seed,
            self.rank_offered,
            self.rank_valuable,
            self.f_measure,
            self.precision,
            self.recall,
            self.pct_f_rss,
            self.pct_f_l1,
            self.pct_f_ct,
            self.wall_ms
        )
        .unwrap();
        out.push('\n');
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
