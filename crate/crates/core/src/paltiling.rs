//! Proximal alternating linearized tiling.
//!
//! The outer loop offers `Δr` fresh random columns per round, runs `K` PALM
//! iterations on the relaxed objective, rounds the relaxed factors with the
//! best pair of thresholds and stops once the rounding leaves more than
//! `stop_slack` offered columns unused.

use std::fmt::{self, Write as _};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{threshold, valuable_columns, valuable_rank, BinaryMatrix, RealMatrix};
use crate::objectives::{residual_into, CostModel, ModelKind};
use crate::penalty::{phi, prox_phi_in_place};

/// `{0, 0.05, …, 1}`.
pub fn default_thresholds() -> Vec<f64> {
    (0..=20).map(|k| k as f64 / 20.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PalConfig {
    pub model: ModelKind,
    pub delta_r: usize,
    pub iterations: usize,
    pub thresholds: Vec<f64>,
    pub gamma: f64,
    pub seed: u64,
    pub lipschitz_floor: f64,
    /// Stop once `offered − valuable > stop_slack`.
    pub stop_slack: usize,
    /// Record the relaxed objective every this many iterations.
    pub trace_stride: usize,
    pub max_rounds: usize,
}

impl Default for PalConfig {
    fn default() -> Self {
        PalConfig {
            model: ModelKind::Primp,
            delta_r: 10,
            iterations: 50_000,
            thresholds: default_thresholds(),
            gamma: 1.00001,
            seed: 0,
            lipschitz_floor: 1e-12,
            stop_slack: 1,
            trace_stride: 50,
            max_rounds: 100,
        }
    }
}

impl PalConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.delta_r == 0 {
            return bad("delta_r must be at least 1".into());
        }
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be > 1, got {}", self.gamma));
        }
        if self.thresholds.is_empty() {
            return bad("threshold set is empty".into());
        }
        if let Some(t) = self.thresholds.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return bad(format!("threshold {t} outside [0, 1]"));
        }
        if !(self.lipschitz_floor > 0.0 && self.lipschitz_floor.is_finite()) {
            return bad("lipschitz_floor must be positive".into());
        }
        if self.trace_stride == 0 {
            return bad("trace_stride must be at least 1".into());
        }
        if self.max_rounds == 0 {
            return bad("max_rounds must be at least 1".into());
        }
        Ok(())
    }

    /// Applies `key=value` lines on top of `self` and returns the keys set.
    /// `#` starts a comment.
    pub fn apply_config_text(&mut self, text: &str) -> Result<Vec<String>> {
        let mut keys = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(lineno, format!("expected key=value, got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || Error::parse(lineno, format!("bad value for {key}: '{value}'"));
            match key {
                "delta_r" => self.delta_r = value.parse().map_err(|_| bad())?,
                "iterations" => self.iterations = value.parse().map_err(|_| bad())?,
                "gamma" => self.gamma = value.parse().map_err(|_| bad())?,
                "seed" => self.seed = value.parse().map_err(|_| bad())?,
                "stop_slack" => self.stop_slack = value.parse().map_err(|_| bad())?,
                "trace_stride" => self.trace_stride = value.parse().map_err(|_| bad())?,
                "max_rounds" => self.max_rounds = value.parse().map_err(|_| bad())?,
                "lipschitz_floor" => self.lipschitz_floor = value.parse().map_err(|_| bad())?,
                "model" => {
                    self.model = value
                        .parse()
                        .map_err(|_| Error::parse(lineno, format!("unknown model '{value}'")))?
                }
                "thresholds" => {
                    self.thresholds = value
                        .split(',')
                        .map(|t| t.trim().parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| bad())?
                }
                other => return Err(Error::parse(lineno, format!("unknown key '{other}'"))),
            }
            keys.push(key.to_string());
        }
        self.validate()?;
        Ok(keys)
    }

    pub fn from_config_text(text: &str) -> Result<Self> {
        let mut cfg = PalConfig::default();
        cfg.apply_config_text(text)?;
        Ok(cfg)
    }

    /// Inverse of [`PalConfig::from_config_text`].
    pub fn to_config_text(&self) -> String {
        let mut out = String::new();
        let ts: Vec<String> = self.thresholds.iter().map(|t| format!("{t:?}")).collect();
        writeln!(out, "model={}", self.model).unwrap();
        writeln!(out, "delta_r={}", self.delta_r).unwrap();
        writeln!(out, "iterations={}", self.iterations).unwrap();
        writeln!(out, "gamma={:?}", self.gamma).unwrap();
        writeln!(out, "seed={}", self.seed).unwrap();
        writeln!(out, "thresholds={}", ts.join(",")).unwrap();
        writeln!(out, "stop_slack={}", self.stop_slack).unwrap();
        writeln!(out, "trace_stride={}", self.trace_stride).unwrap();
        writeln!(out, "max_rounds={}", self.max_rounds).unwrap();
        writeln!(out, "lipschitz_floor={:?}", self.lipschitz_floor).unwrap();
        out
    }
}

/// `1 / (γ · max(M, floor))`.
#[inline]
pub fn step_size(modulus: f64, gamma: f64, floor: f64) -> f64 {
    1.0 / (gamma * modulus.max(floor))
}

/// Appends `delta_r` columns of `U[0, 1)` entries to both factors. `X`'s
/// new entries are drawn first, row-major, then `Y`'s.
pub fn increase_rank(
    x: &RealMatrix,
    y: &RealMatrix,
    delta_r: usize,
    rng: &mut impl Rng,
) -> Result<(RealMatrix, RealMatrix)> {
    if x.cols() != y.cols() {
        return Err(Error::DimensionMismatch {
            op: "increase_rank",
            left: x.shape(),
            right: y.shape(),
        });
    }
    let xr = RealMatrix::from_fn(x.rows(), delta_r, |_, _| rng.gen::<f64>());
    let yr = RealMatrix::from_fn(y.rows(), delta_r, |_, _| rng.gen::<f64>());
    Ok((x.hstack(&xr)?, y.hstack(&yr)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    /// Smooth part `F(X, Y)`.
    pub objective: f64,
    /// `F(X, Y) + φ(X) + φ(Y)`, the quantity PALM never increases.
    pub penalized: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PalmParams {
    pub iterations: usize,
    pub gamma: f64,
    pub lipschitz_floor: f64,
    pub trace_stride: usize,
}

impl PalmParams {
    pub fn from_config(cfg: &PalConfig) -> Self {
        PalmParams {
            iterations: cfg.iterations,
            gamma: cfg.gamma,
            lipschitz_floor: cfg.lipschitz_floor,
            trace_stride: cfg.trace_stride,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PalmOutput {
    pub x: RealMatrix,
    pub y: RealMatrix,
    /// Sampled at iteration 0, every `trace_stride` iterations and at the end.
    pub trace: Vec<TracePoint>,
}

fn trace_point(
    model: &CostModel,
    residual: &[f64],
    x: &RealMatrix,
    y: &RealMatrix,
    iteration: usize,
) -> Result<TracePoint> {
    let objective = model.objective_from_residual(residual, x, y);
    let penalty = match (phi(x).finite(), phi(y).finite()) {
        (Some(a), Some(b)) => a + b,
        _ => {
            return Err(Error::Numerical(format!(
                "factor left [0, 1] at iteration {iteration}"
            )))
        }
    };
    if !objective.is_finite() {
        return Err(Error::Numerical(format!(
            "relaxed objective is {objective} at iteration {iteration}"
        )));
    }
    Ok(TracePoint {
        iteration,
        objective,
        penalized: objective + penalty,
    })
}

/// `K` PALM rounds: `X ← prox_{αφ}(X − α∇_X F)`, then
/// `Y ← prox_{βφ}(Y − β∇_Y F)` at the new `X`.
pub fn palm_inner(
    d: &BinaryMatrix,
    x0: &RealMatrix,
    y0: &RealMatrix,
    model: &CostModel,
    params: PalmParams,
) -> Result<PalmOutput> {
    if x0.cols() != y0.cols() || x0.rows() != d.cols() || y0.rows() != d.rows() {
        return Err(Error::DimensionMismatch {
            op: "palm_inner",
            left: x0.shape(),
            right: y0.shape(),
        });
    }
    if !x0.in_unit_box() || !y0.in_unit_box() {
        return Err(Error::InvalidArgument(
            "initial factors must lie in [0, 1]".into(),
        ));
    }
    if params.trace_stride == 0 {
        return Err(Error::InvalidArgument(
            "trace_stride must be at least 1".into(),
        ));
    }
    let mut x = x0.clone();
    let mut y = y0.clone();
    let mut residual = vec![0.0; d.rows() * d.cols()];
    residual_into(&x, &y, d, &mut residual);
    let mut trace = vec![trace_point(model, &residual, &x, &y, 0)?];
    if params.iterations == 0 || x.cols() == 0 {
        return Ok(PalmOutput { x, y, trace });
    }

    let mut gx = RealMatrix::zeros(x.rows(), x.cols());
    let mut gy = RealMatrix::zeros(y.rows(), y.cols());
    for k in 1..=params.iterations {
        let alpha = step_size(model.lipschitz_x(&y), params.gamma, params.lipschitz_floor);
        model.grad_x_from_residual(&residual, &y, &mut gx);
        for (v, g) in x.as_mut_slice().iter_mut().zip(gx.as_slice()) {
            *v -= alpha * g;
        }
        prox_phi_in_place(&mut x, alpha);
        residual_into(&x, &y, d, &mut residual);

        let beta = step_size(model.lipschitz_y(&x), params.gamma, params.lipschitz_floor);
        model.grad_y_from_residual(&residual, &x, &y, &mut gy);
        for (v, g) in y.as_mut_slice().iter_mut().zip(gy.as_slice()) {
            *v -= beta * g;
        }
        prox_phi_in_place(&mut y, beta);
        residual_into(&x, &y, d, &mut residual);

        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::Numerical(format!(
                "step size diverged at iteration {k}"
            )));
        }
        if k % params.trace_stride == 0 || k == params.iterations {
            trace.push(trace_point(model, &residual, &x, &y, k)?);
        }
    }
    Ok(PalmOutput { x, y, trace })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdChoice {
    pub x: BinaryMatrix,
    pub y: BinaryMatrix,
    pub t_x: f64,
    pub t_y: f64,
    pub cost: f64,
    /// Number of threshold pairs scored.
    pub evaluations: usize,
}

/// Scores every `(t_x, t_y) ∈ T × T` with the model's discrete cost and keeps
/// the cheapest pair. Ties go to the larger `t_x + t_y`, then to the
/// lexicographically smaller pair.
pub fn threshold_search(
    xk: &RealMatrix,
    yk: &RealMatrix,
    d: &BinaryMatrix,
    model: &CostModel,
    thresholds: &[f64],
) -> Result<ThresholdChoice> {
    if thresholds.is_empty() {
        return Err(Error::InvalidArgument("threshold set is empty".into()));
    }
    let xs: Vec<BinaryMatrix> = thresholds.iter().map(|&t| threshold(xk, t)).collect();
    let ys: Vec<BinaryMatrix> = thresholds.iter().map(|&t| threshold(yk, t)).collect();
    let t = thresholds.len();
    let costs: Vec<f64> = (0..t * t)
        .into_par_iter()
        .map(|k| model.discrete_cost(&xs[k / t], &ys[k % t], d))
        .collect::<Result<_>>()?;

    let mut best = 0;
    for k in 1..t * t {
        let (a, b) = (costs[k], costs[best]);
        let key = |k: usize| (thresholds[k / t], thresholds[k % t]);
        let (tx, ty) = key(k);
        let (bx, by) = key(best);
        let better =
            a < b || (a == b && (tx + ty > bx + by || (tx + ty == bx + by && (tx, ty) < (bx, by))));
        if better {
            best = k;
        }
    }
    Ok(ThresholdChoice {
        x: xs[best / t].clone(),
        y: ys[best % t].clone(),
        t_x: thresholds[best / t],
        t_y: thresholds[best % t],
        cost: costs[best],
        evaluations: t * t,
    })
}

/// Drops columns that do not form a valuable tile.
pub fn prune_trivial(x: &BinaryMatrix, y: &BinaryMatrix) -> (BinaryMatrix, BinaryMatrix) {
    let keep = valuable_columns(x, y);
    (x.select_columns(&keep), y.select_columns(&keep))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankTracePoint {
    pub round: usize,
    pub offered: usize,
    pub valuable: usize,
    /// Discrete cost of the pruned tiling.
    pub cost: f64,
    pub t_x: f64,
    pub t_y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The rounding left more than `stop_slack` offered columns unused.
    RankSaturated,
    MaxRounds,
    /// `D` has no ones.
    EmptyData,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::RankSaturated => "rank_saturated",
            StopReason::MaxRounds => "max_rounds",
            StopReason::EmptyData => "empty_data",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxedTracePoint {
    pub round: usize,
    pub iteration: usize,
    pub objective: f64,
    pub penalized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tiling {
    pub x: BinaryMatrix,
    pub y: BinaryMatrix,
    pub thresholds: (f64, f64),
    pub rank_trace: Vec<RankTracePoint>,
    pub relaxed_trace: Vec<RelaxedTracePoint>,
    pub stop: StopReason,
}

impl Tiling {
    pub fn rank(&self) -> usize {
        self.x.cols()
    }

    /// Offered rank at the final round.
    pub fn offered_rank(&self) -> usize {
        self.rank_trace.last().map_or(0, |p| p.offered)
    }

    fn empty(d: &BinaryMatrix, stop: StopReason) -> Self {
        Tiling {
            x: BinaryMatrix::zeros(d.cols(), 0),
            y: BinaryMatrix::zeros(d.rows(), 0),
            thresholds: (0.0, 0.0),
            rank_trace: Vec::new(),
            relaxed_trace: Vec::new(),
            stop,
        }
    }

    /// `round,offered,valuable,cost,t_x,t_y` followed by one line per round.
    pub fn rank_trace_csv(&self) -> String {
        let mut out = String::from("round,offered,valuable,cost,t_x,t_y\n");
        for p in &self.rank_trace {
            writeln!(
                out,
                "{},{},{},{:?},{:?},{:?}",
                p.round, p.offered, p.valuable, p.cost, p.t_x, p.t_y
            )
            .unwrap();
        }
        out
    }

    pub fn relaxed_trace_csv(&self) -> String {
        let mut out = String::from("round,iteration,objective,penalized\n");
        for p in &self.relaxed_trace {
            writeln!(
                out,
                "{},{},{:?},{:?}",
                p.round, p.iteration, p.objective, p.penalized
            )
            .unwrap();
        }
        out
    }
}

pub fn pal_tiling(d: &BinaryMatrix, config: &PalConfig) -> Result<Tiling> {
    config.validate()?;
    if d.count_ones() == 0 {
        return Ok(Tiling::empty(d, StopReason::EmptyData));
    }
    let model = CostModel::new(config.model, d)?;
    let params = PalmParams::from_config(config);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut xr = RealMatrix::zeros(d.cols(), 0);
    let mut yr = RealMatrix::zeros(d.rows(), 0);
    let mut rank_trace = Vec::new();
    let mut relaxed_trace = Vec::new();
    let mut last = None;

    for round in 1..=config.max_rounds {
        let (x0, y0) = increase_rank(&xr, &yr, config.delta_r, &mut rng)?;
        let out = palm_inner(d, &x0, &y0, &model, params)?;
        relaxed_trace.extend(out.trace.iter().map(|p| RelaxedTracePoint {
            round,
            iteration: p.iteration,
            objective: p.objective,
            penalized: p.penalized,
        }));
        xr = out.x;
        yr = out.y;

        let choice = threshold_search(&xr, &yr, d, &model, &config.thresholds)?;
        let offered = xr.cols();
        let valuable = valuable_rank(&choice.x, &choice.y)?;
        let (px, py) = prune_trivial(&choice.x, &choice.y);
        let cost = model.discrete_cost(&px, &py, d)?;
        rank_trace.push(RankTracePoint {
            round,
            offered,
            valuable,
            cost,
            t_x: choice.t_x,
            t_y: choice.t_y,
        });
        let saturated = offered - valuable > config.stop_slack;
        last = Some((px, py, (choice.t_x, choice.t_y)));
        if saturated {
            break;
        }
    }

    let stop = match rank_trace.last() {
        Some(p) if p.offered - p.valuable > config.stop_slack => StopReason::RankSaturated,
        _ => StopReason::MaxRounds,
    };
    let (x, y, thresholds) = last.expect("max_rounds >= 1");
    Ok(Tiling {
        x,
        y,
        thresholds,
        rank_trace,
        relaxed_trace,
        stop,
    })
}
