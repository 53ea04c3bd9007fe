//! The hat penalty `Λ(x) = 1 − |1 − 2x|` on `[0, 1]` (infinite elsewhere),
//! its entrywise matrix lift `φ`, and the closed-form proximal map.

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;

/// Value of `Λ` or `φ`. Points outside `[0, 1]` are infeasible rather than
/// carrying a floating infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty {
    Finite(f64),
    Infeasible,
}

impl Penalty {
    pub fn finite(self) -> Option<f64> {
        match self {
            Penalty::Finite(v) => Some(v),
            Penalty::Infeasible => None,
        }
    }

    pub fn is_infeasible(self) -> bool {
        matches!(self, Penalty::Infeasible)
    }
}

/// Step weight of the proximal map. Zero reduces the map to projection onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxParams {
    alpha: f64,
}

impl ProxParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha >= 0.0 {
            Ok(ProxParams { alpha })
        } else {
            Err(Error::InvalidArgument(format!(
                "prox weight must be finite and non-negative, got {alpha}"
            )))
        }
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }
}

pub fn lambda_penalty(x: f64) -> Penalty {
    if (0.0..=1.0).contains(&x) {
        Penalty::Finite(1.0 - (1.0 - 2.0 * x).abs())
    } else {
        Penalty::Infeasible
    }
}

/// `φ(M) = Σ Λ(M_ji)`.
pub fn phi(m: &RealMatrix) -> Penalty {
    let mut total = 0.0;
    for &v in m.as_slice() {
        match lambda_penalty(v) {
            Penalty::Finite(p) => total += p,
            Penalty::Infeasible => return Penalty::Infeasible,
        }
    }
    Penalty::Finite(total)
}

/// Exact minimizer of `½(x − z)² + α Λ(z)` over `z`.
#[inline]
pub fn prox_lambda(x: f64, alpha: f64) -> f64 {
    if x <= 0.5 {
        (x - 2.0 * alpha).max(0.0)
    } else {
        (x + 2.0 * alpha).min(1.0)
    }
}

pub fn prox_phi(m: &RealMatrix, params: ProxParams) -> RealMatrix {
    m.map(|v| prox_lambda(v, params.alpha))
}

pub(crate) fn prox_phi_in_place(m: &mut RealMatrix, alpha: f64) {
    for v in m.as_mut_slice() {
        *v = prox_lambda(*v, alpha);
    }
}
