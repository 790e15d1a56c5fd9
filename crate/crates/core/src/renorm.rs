//! Renormalized sequence `x̃_n = (μ_n/μ_{n−1}) x_n`, the density of the
//! modified measure, and the closed-form weight of the constant shift.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{mu_sequence, MomentTable};
use crate::numeric::LogSum;
use crate::sequence::{
    make_sequence, DeloneSequence, Factorials, Prefix, PrefixCache, SequenceSpec,
};
use crate::series::{exp_series, series_ratio};
use crate::specfun::{gamma, lower_regularized_gamma, upper_incomplete_gamma_ext};

/// Relative accuracy of the series behind the measure densities.
pub const DENSITY_SERIES_TOL: f64 = 1e-14;

/// `x̃_n` for `n ≤ n_max` of the moment table. Past `n_max` the moments are
/// taken as frozen, so `x̃_n = x_n` there.
pub struct RenormalizedSequence {
    base: DeloneSequence,
    moments: Arc<MomentTable>,
    values: Vec<f64>,
    reordered: bool,
    cache: PrefixCache,
}

impl std::fmt::Debug for RenormalizedSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RenormalizedSequence")
            .field("base", &self.base)
            .field("n_max", &self.moments.n_max)
            .field("reordered", &self.reordered)
            .finish()
    }
}

/// Build `x̃` from a sequence and its moments. Values that fail to increase
/// are sorted (with `x̃_0 = 0` kept first) and the result is flagged.
pub fn renormalize(seq: &DeloneSequence, moments: MomentTable) -> RenormalizedSequence {
    let n_max = moments.n_max;
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(0.0);
    for n in 1..=n_max {
        values.push(moments.ratio(n) * seq.value(n));
    }
    let reordered = values.windows(2).any(|w| !(w[1] > w[0]));
    if reordered {
        log::warn!("renormalized values cross; sorting them");
        values[1..].sort_by(f64::total_cmp);
    }
    RenormalizedSequence {
        base: seq.clone(),
        moments: Arc::new(moments),
        values,
        reordered,
        cache: PrefixCache::default(),
    }
}

impl RenormalizedSequence {
    pub fn base(&self) -> &DeloneSequence {
        &self.base
    }

    pub fn moments(&self) -> &MomentTable {
        &self.moments
    }

    pub fn n_max(&self) -> usize {
        self.moments.n_max
    }

    pub fn mu0(&self) -> f64 {
        self.moments.mu[0]
    }

    /// Whether the raw values had to be sorted.
    pub fn reordered(&self) -> bool {
        self.reordered
    }

    /// `x̃_n` for `n ≤ n_max`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `x̃_n` for any n.
    pub fn value(&self, n: usize) -> f64 {
        if n < self.values.len() {
            self.values[n]
        } else {
            self.base.value(n)
        }
    }

    /// `α̃(n) = x̃_n − n`.
    pub fn alpha(&self, n: usize) -> f64 {
        if n < self.values.len() {
            self.values[n] - n as f64
        } else {
            self.base.alpha(n)
        }
    }

    /// `ln x̃_n!` for `n ≤ n_max`.
    pub fn log_factorials(&self) -> Result<Vec<f64>> {
        Ok(self.prefix(self.n_max())?.log_factorials()[..=self.n_max()].to_vec())
    }

    /// Largest series index that `𝒩̃(t)` needs with non-negligible weight.
    pub fn index_needed(t: f64) -> usize {
        (t + 10.0 * t.sqrt() + 30.0).ceil() as usize
    }

    fn check_reach(&self, t: f64) -> Result<()> {
        let need = Self::index_needed(t);
        if need > self.n_max() {
            return Err(Error::Truncation {
                dim: self.n_max(),
                suggested: need,
            });
        }
        Ok(())
    }
}

impl Factorials for RenormalizedSequence {
    fn prefix(&self, n: usize) -> Result<Arc<Prefix>> {
        self.cache.get(n, &|k| self.value(k))
    }
}

/// `𝒩̃(t)/(μ₀ 𝒩(t))`, from the ratio of the two series.
pub fn nu_density(ren: &RenormalizedSequence, t: f64) -> Result<f64> {
    ren.check_reach(t)?;
    Ok(series_ratio(ren, &ren.base, t, DENSITY_SERIES_TOL)? / ren.mu0())
}

/// The same density as the Poisson-like expectation of `σ(n) = 1/μ_n`.
/// Agrees with [`nu_density`] when no reordering took place.
pub fn nu_density_expectation(ren: &RenormalizedSequence, t: f64) -> Result<f64> {
    ren.check_reach(t)?;
    let base = &ren.base;
    let ln_n = exp_series(base, t, DENSITY_SERIES_TOL)?.value_ln;
    if t == 0.0 {
        return Ok(1.0 / ren.mu0());
    }
    let m = &ren.moments;
    let mut acc = LogSum::new();
    let ln_t = t.ln();
    let mut n = 0usize;
    let mut past_peak = false;
    loop {
        let ln_mu = m.ln_mu(n.min(m.n_max));
        let ln_w = n as f64 * ln_t - base.log_factorial(n)? - ln_n;
        acc.add_ln(ln_w - ln_mu);
        if base.value(n + 1) > t {
            past_peak = true;
        }
        if past_peak && ln_w < -40.0 && n > t as usize {
            break;
        }
        n += 1;
    }
    Ok(acc.ln().exp())
}

/// The weight `t^ε e^{−t}/Γ(ε + 1)` solving the moment problem of `x_n = n + ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolvedMeasure {
    epsilon: f64,
}

impl SolvedMeasure {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > -1.0) || !epsilon.is_finite() {
            return Err(Error::invalid(
                "solved measure",
                format!("ε > −1 required (ε = {epsilon})"),
            ));
        }
        Ok(SolvedMeasure { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The weight itself.
    pub fn weight(&self, t: f64) -> Result<f64> {
        let e = self.epsilon;
        Ok(t.powf(e) * (-t).exp() / gamma(e + 1.0)?)
    }
}

/// Density value with a flag for the divergent point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolvedDensity {
    pub value: f64,
    /// True when the density is infinite (ε < 0 at t = 0).
    pub divergent: bool,
}

/// `w(t)𝒩(t) = 1 − εΓ(ε, t)/Γ(1 + ε)`.
pub fn solved_measure_density(m: &SolvedMeasure, t: f64) -> Result<SolvedDensity> {
    let e = m.epsilon;
    if !(t >= 0.0) {
        return Err(Error::domain(
            "solved_measure_density",
            format!("t = {t} must be non-negative"),
        ));
    }
    if e == 0.0 {
        return Err(Error::domain(
            "solved_measure_density",
            "ε = 0 leaves Γ(ε, t) undefined at t = 0",
        ));
    }
    if e > 0.0 {
        // 1 − εΓ(ε,t)/Γ(1+ε) is the regularized lower gamma P(ε, t)
        return Ok(SolvedDensity {
            value: lower_regularized_gamma(e, t)?,
            divergent: false,
        });
    }
    if t == 0.0 {
        return Ok(SolvedDensity {
            value: f64::INFINITY,
            divergent: true,
        });
    }
    let value = 1.0 - e * upper_incomplete_gamma_ext(e, t)? / gamma(1.0 + e)?;
    Ok(SolvedDensity {
        value,
        divergent: false,
    })
}

/// One row of the measure comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureRow {
    pub t: f64,
    pub solved: f64,
    pub nu: f64,
}

/// Both densities for `x_n = n + ε` on `t_grid`.
pub fn compare_measures(epsilon: f64, t_grid: &[f64], tol: f64) -> Result<Vec<MeasureRow>> {
    if t_grid.is_empty() {
        return Err(Error::domain("compare_measures", "empty t grid"));
    }
    let seq = make_sequence(SequenceSpec::ConstantShift { epsilon })?;
    let measure = SolvedMeasure::new(epsilon)?;
    let t_max = t_grid.iter().cloned().fold(0.0, f64::max);
    let n_max = RenormalizedSequence::index_needed(t_max);
    let ren = renormalize(&seq, mu_sequence(&seq, n_max, tol)?);
    t_grid
        .iter()
        .map(|&t| {
            Ok(MeasureRow {
                t,
                solved: solved_measure_density(&measure, t)?.value,
                nu: nu_density(&ren, t)?,
            })
        })
        .collect()
}
