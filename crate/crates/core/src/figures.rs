//! Datasets behind the four standard plots: the two measures of the constant
//! shift, `x_n − x̃_n`, the moment ratios of the oscillating family, and the
//! α, γ, δ curves of a projective sequence.

use serde::Serialize;

use crate::error::Result;
use crate::gha::{gha_curves, GhaModel};
use crate::moments::mu_sequence;
use crate::renorm::{compare_measures, renormalize};
use crate::sequence::{make_sequence, SequenceSpec};

/// Column-labelled numeric table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Dataset {
    fn new(name: &str, columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Dataset {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        }
    }

    /// Values of one column.
    pub fn column(&self, index: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[index]).collect()
    }
}

/// `t = 0, step, …, t_max`.
pub fn uniform_grid(t_max: f64, step: f64) -> Vec<f64> {
    let count = (t_max / step).round() as usize;
    (0..=count).map(|i| i as f64 * step).collect()
}

/// Solved density and `𝒩̃/(μ₀𝒩)` for `x_n = n + ε` on `t_grid`.
pub fn measures(epsilon: f64, t_grid: &[f64], tol: f64) -> Result<Dataset> {
    let rows = compare_measures(epsilon, t_grid, tol)?
        .into_iter()
        .map(|r| vec![r.t, r.solved, r.nu])
        .collect();
    Ok(Dataset::new(
        "measures",
        &["t", "solved_density", "nu_density"],
        rows,
    ))
}

/// `x_n − x̃_n` for `x_n = n + ε`, `n = 0..=n_max`.
pub fn renormalization_gap(epsilon: f64, n_max: usize, tol: f64) -> Result<Dataset> {
    let seq = make_sequence(SequenceSpec::ConstantShift { epsilon })?;
    let ren = renormalize(&seq, mu_sequence(&seq, n_max, tol)?);
    let rows = (0..=n_max)
        .map(|n| vec![n as f64, seq.value(n) - ren.value(n)])
        .collect();
    Ok(Dataset::new(
        "renormalization_gap",
        &["n", "x_minus_x_tilde"],
        rows,
    ))
}

/// `μ_n` for `α(n) = ε sin(√2 n)/n`, `n = 1..=n_max`.
pub fn oscillating_moments(epsilon: f64, n_max: usize, tol: f64) -> Result<Dataset> {
    let seq = make_sequence(SequenceSpec::SineOverN {
        epsilon,
        kappa: std::f64::consts::SQRT_2,
    })?;
    let table = mu_sequence(&seq, n_max, tol)?;
    let rows = (1..=n_max).map(|n| vec![n as f64, table.mu[n]]).collect();
    Ok(Dataset::new("oscillating_moments", &["n", "mu"], rows))
}

/// `α(n), γ(x_n), δ(x_n)` for `α(n) = a n/(c n + d)`.
pub fn gha_dataset(a: f64, c: f64, d: f64, n_max: usize) -> Result<Dataset> {
    let seq = make_sequence(SequenceSpec::Homographic { a, b: 0.0, c, d })?;
    let rows = gha_curves(&GhaModel::new(&seq)?, n_max)?
        .into_iter()
        .map(|r| vec![r.n as f64, r.alpha, r.gamma, r.delta])
        .collect();
    Ok(Dataset::new("gha", &["n", "alpha", "gamma", "delta"], rows))
}
