//! Moment integrals `𝓘(n) = ∫₀^∞ tⁿ/𝒩(t) dt`, the ratios `μ_n = 𝓘(n)/x_n!`,
//! Hankel determinants of the factorial sequence, and closed asymptotes.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{integrate_hump, Hump, Integrand, ScaledIntegral};
use crate::sequence::{DeloneSequence, Factorials};
use crate::specfun::ln_gamma;

/// Default subdivision budget of the adaptive quadrature.
pub const DEFAULT_BUDGET: usize = 4000;

/// `ln 𝓘(n)` together with its relative error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentIntegral {
    pub ln_value: f64,
    pub rel_err: f64,
}

/// `ln ∫_T^∞ u^q/𝒩(u) du`, bounded with single terms of the series:
/// `𝒩(u) ≥ u^m/x_m!` gives `x_m! T^{q+1−m}/(m−q−1)` for every `m > q + 1`.
fn ln_upper_tail(seq: &DeloneSequence, big_t: f64, q: f64) -> Result<f64> {
    let ln_t = big_t.ln();
    let m0 = (q + 1.0).floor() as usize + 1;
    let mut best = f64::INFINITY;
    let mut m = m0;
    loop {
        let excess = m as f64 - q - 1.0;
        if excess > 0.0 {
            let b = seq.log_factorial(m)? - excess * ln_t - excess.ln();
            best = best.min(b);
        }
        if seq.value(m + 1) > big_t && m > m0 {
            break;
        }
        m += 1;
    }
    Ok(best)
}

/// `∫₀^∞ u^power h(u)/𝒩(u) du` for the base sequence's 𝒩, with `|h(u)| ≤ C u^k`
/// given as `bound = (ln C, k)`.
pub(crate) fn radial_integral<T: Integrand>(
    seq: &DeloneSequence,
    power: f64,
    factor: impl Fn(f64) -> T + Sync,
    bound: (f64, f64),
    tol: f64,
    budget: usize,
) -> Result<ScaledIntegral<T>> {
    check_tol("moment_integral", tol)?;
    let ln_den = |u: f64| seq.ln_exp_cached(u);
    let tail = |big_t: f64, q: f64| ln_upper_tail(seq, big_t, q);
    let hump = Hump {
        power,
        ln_denominator: &ln_den,
        ln_upper_tail: &tail,
    };
    integrate_hump(&hump, factor, bound, tol, budget)
}

fn check_tol(what: &'static str, tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(
            what,
            format!("tol = {tol} must lie in (0, 1)"),
        ))
    }
}

/// `ln 𝓘(n)`.
pub fn moment_integral(seq: &DeloneSequence, n: usize, tol: f64) -> Result<f64> {
    Ok(moment_integral_detailed(seq, n as f64, tol, DEFAULT_BUDGET)?.ln_value)
}

/// `ln ∫₀^∞ t^p/𝒩(t) dt` for real `p > −1`, with an explicit subdivision budget.
pub fn moment_integral_detailed(
    seq: &DeloneSequence,
    p: f64,
    tol: f64,
    budget: usize,
) -> Result<MomentIntegral> {
    let r = radial_integral(seq, p, |_| 1.0, (0.0, 0.0), tol, budget)?;
    Ok(MomentIntegral {
        ln_value: r.ln_scale + r.value.ln(),
        rel_err: r.abs_err / r.value,
    })
}

/// `μ_0 … μ_{n_max}` with error estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentTable {
    pub mu: Vec<f64>,
    pub abs_err: Vec<f64>,
    /// `ln 𝓘(n)`.
    pub ln_integrals: Vec<f64>,
    /// `ln x_n!` of the sequence the table was computed for.
    pub ln_factorials: Vec<f64>,
    pub n_max: usize,
    pub tol: f64,
}

impl MomentTable {
    /// `μ_n/μ_{n−1}` from the integrals directly, so that correlated
    /// quadrature errors cancel.
    pub fn ratio(&self, n: usize) -> f64 {
        (self.ln_integrals[n]
            - self.ln_integrals[n - 1]
            - (self.ln_factorials[n] - self.ln_factorials[n - 1]))
            .exp()
    }

    pub fn ln_mu(&self, n: usize) -> f64 {
        self.ln_integrals[n] - self.ln_factorials[n]
    }
}

/// Moments for `n = 0..=n_max`, computed in parallel.
pub fn mu_sequence(seq: &DeloneSequence, n_max: usize, tol: f64) -> Result<MomentTable> {
    mu_sequence_with_budget(seq, n_max, tol, DEFAULT_BUDGET)
}

pub fn mu_sequence_with_budget(
    seq: &DeloneSequence,
    n_max: usize,
    tol: f64,
    budget: usize,
) -> Result<MomentTable> {
    check_tol("mu_sequence", tol)?;
    let prefix = seq.prefix(n_max)?;
    let rows: Vec<MomentIntegral> = (0..=n_max)
        .into_par_iter()
        .map(|n| moment_integral_detailed(seq, n as f64, tol, budget))
        .collect::<Result<_>>()?;
    let ln_factorials = prefix.log_factorials()[..=n_max].to_vec();
    let mut mu = Vec::with_capacity(n_max + 1);
    let mut abs_err = Vec::with_capacity(n_max + 1);
    let mut ln_integrals = Vec::with_capacity(n_max + 1);
    for (row, lf) in rows.iter().zip(&ln_factorials) {
        let m = (row.ln_value - lf).exp();
        mu.push(m);
        abs_err.push(m * row.rel_err);
        ln_integrals.push(row.ln_value);
    }
    Ok(MomentTable {
        mu,
        abs_err,
        ln_integrals,
        ln_factorials,
        n_max,
        tol,
    })
}

/// Determinant stored as sign and log-magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignedLogDet {
    pub sign: f64,
    pub ln_abs: f64,
    /// Determinant of the unit-diagonal rescaled matrix is below 1e-10.
    pub ill_conditioned: bool,
}

impl SignedLogDet {
    pub fn value(&self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

/// Hankel determinants of size `k`: `A = [x_{i+j}!]` and `B = [x_{i+j+1}!]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HankelPair {
    pub size: usize,
    pub det_a: SignedLogDet,
    pub det_b: SignedLogDet,
}

/// Hankel determinants for sizes `1..=n_max` (at most 15).
pub fn hankel_determinants<S: Factorials + ?Sized>(
    seq: &S,
    n_max: usize,
) -> Result<Vec<HankelPair>> {
    if n_max == 0 || n_max > 15 {
        return Err(Error::domain(
            "hankel_determinants",
            format!("size {n_max} outside 1..=15"),
        ));
    }
    let prefix = seq.prefix(2 * n_max)?;
    let lf = prefix.log_factorials();
    (1..=n_max)
        .map(|k| {
            let det_a = scaled_log_det(k, |i, j| lf[i + j]);
            let det_b = scaled_log_det(k, |i, j| lf[i + j + 1]);
            if det_a.ill_conditioned || det_b.ill_conditioned {
                log::warn!("Hankel determinant of size {k} is poorly conditioned");
            }
            Ok(HankelPair {
                size: k,
                det_a,
                det_b,
            })
        })
        .collect()
}

/// Determinant of the symmetric matrix `exp(ln_entry(i, j))`, rescaled to
/// unit diagonal and factored by LU with partial pivoting.
fn scaled_log_det(k: usize, ln_entry: impl Fn(usize, usize) -> f64) -> SignedLogDet {
    let half: Vec<f64> = (0..k).map(|i| 0.5 * ln_entry(i, i)).collect();
    let mut m: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| (ln_entry(i, j) - half[i] - half[j]).exp())
                .collect()
        })
        .collect();
    let mut sign = 1.0;
    let mut ln_abs: f64 = 2.0 * half.iter().sum::<f64>();
    let mut scaled = 1.0f64;
    for c in 0..k {
        let p = (c..k)
            .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
            .expect("non-empty range");
        if m[p][c] == 0.0 {
            return SignedLogDet {
                sign: 0.0,
                ln_abs: f64::NEG_INFINITY,
                ill_conditioned: true,
            };
        }
        if p != c {
            m.swap(p, c);
            sign = -sign;
        }
        let piv = m[c][c];
        sign *= piv.signum();
        ln_abs += piv.abs().ln();
        scaled *= piv;
        for r in c + 1..k {
            let f = m[r][c] / piv;
            for j in c..k {
                m[r][j] -= f * m[c][j];
            }
        }
    }
    SignedLogDet {
        sign,
        ln_abs,
        ill_conditioned: scaled.abs() < 1e-10,
    }
}

/// Families with a known closed asymptote for `μ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AsymptoticModel {
    /// `x_n = n + ε`: `1 + 1/(Γ(ε) n 2ⁿ)`.
    ConstantShift(f64),
    /// `x_n = n − ε/n`: `1 + ε/n²`.
    InverseSquare(f64),
}

/// The closed asymptote of `μ_n` for `n ≥ 1`.
pub fn asymptotic_mu(model: AsymptoticModel, n: usize) -> f64 {
    let x = n as f64;
    match model {
        AsymptoticModel::ConstantShift(eps) => {
            // 1/Γ(ε) = ε/Γ(1 + ε)
            let inv_gamma = eps * (-ln_gamma(1.0 + eps).unwrap_or(0.0)).exp();
            1.0 + inv_gamma / (x * 2f64.powf(x))
        }
        AsymptoticModel::InverseSquare(eps) => 1.0 + eps / (x * x),
    }
}

/// Thresholds for [`check_prop_conditions`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropConditionOptions {
    /// Bound that `|α′|` and `x|α″|` must stay below.
    pub threshold: f64,
    /// Grid points below this are ignored.
    pub x_min: f64,
}

impl Default for PropConditionOptions {
    fn default() -> Self {
        PropConditionOptions {
            threshold: 0.1,
            x_min: 100.0,
        }
    }
}

/// Finite-difference smoothness report for the continuous extension of α.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropConditionReport {
    pub max_abs_first: f64,
    pub max_x_abs_second: f64,
    /// Grid points used.
    pub evaluated: usize,
    /// Grid points skipped because a jump of α lies inside the stencil.
    pub skipped_at_jumps: usize,
    pub threshold: f64,
    pub holds: bool,
}

/// Evaluate `|α′(x)|` and `x|α″(x)|` by central differences on `x_grid`.
/// Points where α jumps inside the stencil are skipped (derivatives are
/// only required almost everywhere).
pub fn check_prop_conditions(
    seq: &DeloneSequence,
    x_grid: &[f64],
    opts: PropConditionOptions,
) -> Result<PropConditionReport> {
    let mut max1 = 0.0f64;
    let mut max2 = 0.0f64;
    let mut evaluated = 0;
    let mut skipped = 0;
    for &x in x_grid.iter().filter(|&&x| x >= opts.x_min.max(1.0)) {
        let h = 1e-5 * x.max(1.0);
        let (am, a0, ap) = (
            seq.alpha_continuous(x - h)?,
            seq.alpha_continuous(x)?,
            seq.alpha_continuous(x + h)?,
        );
        let second_diff = ap - 2.0 * a0 + am;
        if second_diff.abs() > 1e-6 {
            skipped += 1;
            continue;
        }
        max1 = max1.max(((ap - am) / (2.0 * h)).abs());
        max2 = max2.max(x * (second_diff / (h * h)).abs());
        evaluated += 1;
    }
    Ok(PropConditionReport {
        max_abs_first: max1,
        max_x_abs_second: max2,
        evaluated,
        skipped_at_jumps: skipped,
        threshold: opts.threshold,
        holds: evaluated > 0 && max1 < opts.threshold && max2 < opts.threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{make_sequence, SequenceSpec};

    #[test]
    fn naturals_moments_are_factorials() {
        let s = DeloneSequence::naturals();
        for n in [0usize, 1, 5, 40] {
            let l = moment_integral(&s, n, 1e-12).unwrap();
            let want = ln_gamma(n as f64 + 1.0).unwrap();
            assert!((l - want).abs() < 1e-11 * want.max(1.0), "n={n}");
        }
        let t = mu_sequence(&s, 30, 1e-11).unwrap();
        for (n, m) in t.mu.iter().enumerate() {
            assert!((m - 1.0).abs() < 1e-10, "n={n} mu={m}");
            assert!(t.abs_err[n] < 1e-11);
        }
    }

    #[test]
    fn shift_first_moments_match_frozen_values() {
        // 30-digit reference values for ε = 0.1
        let s = make_sequence(SequenceSpec::ConstantShift { epsilon: 0.1 }).unwrap();
        let t = mu_sequence(&s, 10, 1e-12).unwrap();
        assert!((t.mu[0] - 1.068_611_587_368_006_6).abs() < 1e-10);
        assert!((t.mu[1] - 1.019_497_049_69).abs() < 1e-10);
        assert!((t.mu[5] - 1.000_502_321_845_2).abs() < 1e-10);
        assert!((t.mu[10] - 1.000_009_537_156_929).abs() < 1e-10);
    }

    #[test]
    fn hankel_naturals() {
        let h = hankel_determinants(&DeloneSequence::naturals(), 6).unwrap();
        assert!((h[1].det_a.value() - 1.0).abs() < 1e-14);
        let mut want_a = 0.0;
        let mut want_b = 0.0;
        let mut lf = 0.0f64;
        for (k, pair) in h.iter().enumerate() {
            // det A_{k+1} = ∏_{j≤k} j!², det B_{k+1} = ∏_{j≤k} j!(j+1)!
            let next = lf + ((k + 1) as f64).ln();
            want_a += 2.0 * lf;
            want_b += lf + next;
            lf = next;
            assert_eq!(pair.det_a.sign, 1.0);
            assert!(
                (pair.det_a.ln_abs - want_a).abs() < 1e-9 * want_a.max(1.0),
                "k={k}"
            );
            assert!(
                (pair.det_b.ln_abs - want_b).abs() < 1e-9 * want_b.max(1.0),
                "k={k}"
            );
        }
    }

    #[test]
    fn hankel_counterexample() {
        let s = make_sequence(SequenceSpec::Table {
            values: vec![0.0, 1.0, 1.5, 1.6, 5.0, 6.0, 7.0, 8.0],
            r: None,
            l: None,
        })
        .unwrap();
        let h = hankel_determinants(&s, 3).unwrap();
        assert_eq!(h[2].det_b.sign, -1.0);
        assert!((h[2].det_b.value() + 60.624).abs() < 1e-9);
    }

    #[test]
    fn asymptotes() {
        assert!(
            (asymptotic_mu(AsymptoticModel::InverseSquare(0.01), 100) - (1.0 + 1e-6)).abs() < 1e-16
        );
        let g = crate::specfun::gamma(0.1).unwrap();
        let want = 1.0 + 1.0 / (g * 5.0 * 32.0);
        assert!((asymptotic_mu(AsymptoticModel::ConstantShift(0.1), 5) - want).abs() < 1e-15);
        assert!(asymptotic_mu(AsymptoticModel::ConstantShift(0.1), 10) - 1.0 < 2e-5);
    }

    #[test]
    fn prop_conditions() {
        let fp = make_sequence(SequenceSpec::FractionalPeriodic {
            lambda: 0.2,
            mu: 2f64.sqrt(),
            nu: 0.0,
        })
        .unwrap();
        let grid: Vec<f64> = (0..400).map(|i| 100.0 + 0.37 * i as f64).collect();
        let r = check_prop_conditions(&fp, &grid, PropConditionOptions::default()).unwrap();
        assert!((r.max_abs_first - 0.2 * 2f64.sqrt()).abs() < 1e-6);
        assert!(r.max_x_abs_second < 1e-3);
        assert!(r.skipped_at_jumps < 10);
        let cs = make_sequence(SequenceSpec::ConstantShift { epsilon: 0.3 }).unwrap();
        let r = check_prop_conditions(&cs, &grid, PropConditionOptions::default()).unwrap();
        assert_eq!(r.max_abs_first, 0.0);
        assert!(r.holds);
        let t = make_sequence(SequenceSpec::Table {
            values: vec![0.0, 1.0],
            r: None,
            l: None,
        })
        .unwrap();
        assert!(matches!(
            check_prop_conditions(&t, &grid, PropConditionOptions::default()),
            Err(Error::Unsupported(_))
        ));
    }
}
