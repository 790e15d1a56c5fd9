//! Generalized Heisenberg algebra of an invertible sequence: the inverse
//! perturbation γ, the jump function δ and the characteristic function h with
//! `h(x_n) = x_{n+1}`.
//!
//! The algebra is built on the original sequence, not the renormalized one.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequence::{DeloneSequence, SequenceSpec};

const MONOTONE_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Inverse {
    /// `α(y) = (a y + b)/(c y + d)` with `c ≥ 0`: γ has a closed form.
    Projective { a: f64, b: f64, c: f64, d: f64 },
    /// Bisection on `y ↦ y + α(y)` over `[x − 1, x + 1]`.
    Numeric,
}

/// γ, δ and h for one sequence.
#[derive(Debug, Clone)]
pub struct GhaModel {
    seq: DeloneSequence,
    inverse: Inverse,
}

impl GhaModel {
    pub fn new(seq: &DeloneSequence) -> Result<Self> {
        let inverse = match *seq.spec() {
            SequenceSpec::ConstantShift { .. } => {
                return Err(Error::Unsupported(
                    "the constant shift with x_0 = 0 has no characteristic function".into(),
                ))
            }
            SequenceSpec::Table { .. } => {
                return Err(Error::Unsupported(
                    "table sequences have no continuous extension".into(),
                ))
            }
            SequenceSpec::Homographic { a, b, c, d } if c >= 0.0 => {
                Inverse::Projective { a, b, c, d }
            }
            _ => Inverse::Numeric,
        };
        Ok(GhaModel {
            seq: seq.clone(),
            inverse,
        })
    }

    pub fn sequence(&self) -> &DeloneSequence {
        &self.seq
    }

    /// Whether γ comes from the closed form.
    pub fn is_closed_form(&self) -> bool {
        matches!(self.inverse, Inverse::Projective { .. })
    }

    fn alpha(&self, y: f64) -> Result<f64> {
        if y == 0.0 {
            return Ok(0.0);
        }
        self.seq.alpha_continuous(y)
    }

    /// γ(x) with `x + γ(x) = n` whenever `x = x_n`.
    pub fn gamma_of(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::domain(
                "gamma_of",
                format!("x = {x} must be finite and non-negative"),
            ));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        match self.inverse {
            Inverse::Projective { a, b, c, d } => {
                if c == 0.0 {
                    return Ok(-b / d);
                }
                // root of c y² + (a + d − c x) y + (b − d x) = 0, written without cancellation
                let disc = (c * x - a - d).powi(2) + 4.0 * c * (d * x - b);
                Ok(-2.0 * (a * x + b) / (disc.sqrt() + c * x + a + d))
            }
            Inverse::Numeric => self.invert_numeric(x),
        }
    }

    fn invert_numeric(&self, x: f64) -> Result<f64> {
        let map = |y: f64| -> Result<f64> { Ok(y + self.alpha(y)? - x) };
        let lo = (x - 1.0).max(0.0);
        let hi = x + 1.0;
        let mut prev = map(lo)?;
        for i in 1..=MONOTONE_SAMPLES {
            let v = map(lo + (hi - lo) * i as f64 / MONOTONE_SAMPLES as f64)?;
            if !(v > prev) {
                return Err(Error::NonInvertible(x));
            }
            prev = v;
        }
        let (mut a, mut b) = (lo, hi);
        if !(map(a)? <= 0.0 && map(b)? >= 0.0) {
            return Err(Error::NonInvertible(x));
        }
        // bisect down to floating-point resolution
        loop {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if map(mid)? < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b) - x)
    }

    /// `δ(x) = γ(x) + α(x + 1 + γ(x))`.
    pub fn delta_of(&self, x: f64) -> Result<f64> {
        let g = self.gamma_of(x)?;
        match self.inverse {
            Inverse::Projective { a, b, c, d } => {
                let y = x + g;
                Ok(g + (a * y + a + b) / (c * y + c + d))
            }
            Inverse::Numeric => Ok(g + self.alpha(x + 1.0 + g)?),
        }
    }

    /// `h(x) = x + 1 + δ(x)`.
    pub fn h_of(&self, x: f64) -> Result<f64> {
        Ok(x + 1.0 + self.delta_of(x)?)
    }
}

/// One row of the α, γ, δ curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GhaRow {
    pub n: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// `(α(n), γ(x_n), δ(x_n))` for `n = 0..=n_max`.
pub fn gha_curves(model: &GhaModel, n_max: usize) -> Result<Vec<GhaRow>> {
    (0..=n_max)
        .map(|n| {
            let x = model.seq.value(n);
            Ok(GhaRow {
                n,
                alpha: model.seq.alpha(n),
                gamma: model.gamma_of(x)?,
                delta: model.delta_of(x)?,
            })
        })
        .collect()
}

/// `max_n |h(x_n) − x_{n+1}|` over `n ≤ n_max`.
pub fn max_recurrence_error(model: &GhaModel, n_max: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in 0..=n_max {
        let s = &model.seq;
        worst = worst.max((model.h_of(s.value(n))? - s.value(n + 1)).abs());
    }
    Ok(worst)
}
