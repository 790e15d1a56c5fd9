//! Log-gamma, incomplete gamma and generalized hypergeometric series.
//!
//! `ln_gamma` uses the Taylor series of ln Γ(1 + z) on [0.5, 2.5] (zeta
//! coefficients), the recurrence below 0.5 and between 2.5 and 10, and the
//! Stirling series with seven correction terms from 10 on.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{CompensatedSum, LogSum};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const ZETA_TERMS: usize = 64;

/// ζ(k) for k = 0..ZETA_TERMS (entries 0 and 1 unused), by Euler–Maclaurin.
fn zeta_table() -> &'static [f64; ZETA_TERMS] {
    static TABLE: OnceLock<[f64; ZETA_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; ZETA_TERMS];
        let big_n = 100.0f64;
        for (k, slot) in t.iter_mut().enumerate().skip(2) {
            let s = k as f64;
            let mut acc = CompensatedSum::new();
            for n in (1..100).rev() {
                acc.add((n as f64).powf(-s));
            }
            let p = big_n.powf(-s);
            acc.add(big_n.powf(1.0 - s) / (s - 1.0));
            acc.add(0.5 * p);
            acc.add(s * p / big_n / 12.0);
            acc.add(-s * (s + 1.0) * (s + 2.0) * p / big_n.powi(3) / 720.0);
            acc.add(
                s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * p / big_n.powi(5) / 30240.0,
            );
            *slot = acc.value();
        }
        t
    })
}

/// ln Γ(1 + z) for |z| ≤ 0.5.
fn ln_gamma_1p(z: f64) -> f64 {
    let zeta = zeta_table();
    let mut acc = CompensatedSum::new();
    let mut zk = -z;
    acc.add(-EULER_GAMMA * z);
    for (k, zk_coef) in zeta.iter().enumerate().skip(2) {
        zk *= -z;
        let term = zk_coef * zk / k as f64;
        acc.add(term);
        if term.abs() < 1e-18 * acc.value().abs() {
            break;
        }
    }
    acc.value()
}

fn stirling(x: f64) -> f64 {
    const C: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    for c in C.iter().rev() {
        corr = corr * inv2 + c;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + corr * inv
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(Error::domain(
            "ln_gamma",
            format!("x = {x} must be positive"),
        ));
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        0.0
    } else if x < 0.5 {
        ln_gamma_1p(x) - x.ln()
    } else if x <= 1.5 {
        ln_gamma_1p(x - 1.0)
    } else if x <= 2.5 {
        (x - 1.0).ln() + ln_gamma_1p(x - 2.0)
    } else if x < 10.0 {
        let mut y = x;
        let mut prod = 1.0;
        while y > 2.5 {
            y -= 1.0;
            prod *= y;
        }
        prod.ln() + ln_gamma_pos(y)
    } else {
        stirling(x)
    }
}

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> Result<f64> {
    Ok(ln_gamma(x)?.exp())
}

/// Upper incomplete gamma Γ(s, t) for s > 0, t ≥ 0.
pub fn upper_incomplete_gamma(s: f64, t: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain(
            "upper_incomplete_gamma",
            format!("s = {s} must be positive"),
        ));
    }
    if !(t >= 0.0) {
        return Err(Error::domain(
            "upper_incomplete_gamma",
            format!("t = {t} must be non-negative"),
        ));
    }
    upper_gamma_any(s, t)
}

/// Γ(s, t) for s > −1, s ≠ 0, t > 0 (and t = 0 when s > 0).
pub fn upper_incomplete_gamma_ext(s: f64, t: f64) -> Result<f64> {
    if s > 0.0 {
        return upper_incomplete_gamma(s, t);
    }
    if !(s > -1.0) || s == 0.0 {
        return Err(Error::domain(
            "upper_incomplete_gamma",
            format!("s = {s} outside (-1, 0) ∪ (0, ∞)"),
        ));
    }
    if !(t > 0.0) {
        return Err(Error::domain(
            "upper_incomplete_gamma",
            "Γ(s, 0) diverges for s ≤ 0",
        ));
    }
    upper_gamma_any(s, t)
}

fn upper_gamma_any(s: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return gamma(s);
    }
    if t > s + 1.0 || (s < 0.0 && t >= 1.0) {
        return upper_gamma_cf(s, t);
    }
    if s < 0.0 {
        // Γ(s, t) = (Γ(s + 1, t) − t^s e^{−t}) / s
        let up = upper_gamma_any(s + 1.0, t)?;
        return Ok((up - (s * t.ln() - t).exp()) / s);
    }
    // regularized lower series P(s, t), then Γ(s)(1 − P)
    let lg = ln_gamma_pos(s);
    let mut acc = CompensatedSum::new();
    let mut term = 1.0 / s;
    acc.add(term);
    for n in 1..10_000 {
        term *= t / (s + n as f64);
        acc.add(term);
        if term.abs() < 1e-17 * acc.value().abs() {
            let p = acc.value() * (s * t.ln() - t - lg).exp();
            return Ok(lg.exp() * (1.0 - p));
        }
    }
    Err(Error::NonConvergence {
        what: "incomplete gamma series",
        detail: format!("s = {s}, t = {t}"),
    })
}

/// Regularized lower incomplete gamma `P(s, t) = γ(s, t)/Γ(s)` for s > 0, t ≥ 0.
pub fn lower_regularized_gamma(s: f64, t: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain(
            "lower_regularized_gamma",
            format!("s = {s} must be positive"),
        ));
    }
    if !(t >= 0.0) {
        return Err(Error::domain(
            "lower_regularized_gamma",
            format!("t = {t} must be non-negative"),
        ));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if t > s + 1.0 {
        return Ok(1.0 - upper_gamma_cf(s, t)? * (-ln_gamma_pos(s)).exp());
    }
    let mut acc = CompensatedSum::new();
    let mut term = 1.0 / s;
    acc.add(term);
    for n in 1..10_000 {
        term *= t / (s + n as f64);
        acc.add(term);
        if term.abs() < 1e-17 * acc.value().abs() {
            return Ok(acc.value() * (s * t.ln() - t - ln_gamma_pos(s)).exp());
        }
    }
    Err(Error::NonConvergence {
        what: "incomplete gamma series",
        detail: format!("s = {s}, t = {t}"),
    })
}

/// Modified Lentz evaluation of the continued fraction for Γ(s, t).
fn upper_gamma_cf(s: f64, t: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = t + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            return Ok((s * t.ln() - t).exp() * h);
        }
    }
    Err(Error::NonConvergence {
        what: "incomplete gamma continued fraction",
        detail: format!("s = {s}, t = {t}"),
    })
}

/// Parameters of a generalized hypergeometric series pFq.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfqParams {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl PfqParams {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let p = PfqParams { a, b };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        for &b in &self.b {
            if b <= 0.0 && b == b.round() {
                return Err(Error::DenominatorPole(b));
            }
        }
        if self.a.len() > self.b.len() + 1 {
            return Err(Error::Unsupported(format!(
                "{}F{} series has zero radius of convergence",
                self.a.len(),
                self.b.len()
            )));
        }
        Ok(())
    }

    fn ratio(&self, n: usize, t: f64) -> f64 {
        let k = n as f64;
        let mut r = t / (k + 1.0);
        for a in &self.a {
            r *= a + k;
        }
        for b in &self.b {
            r /= b + k;
        }
        r
    }
}

const PFQ_RUN: usize = 25;
const PFQ_MAX_TERMS: usize = 1_000_000;

/// Sum of the pFq series at `t`. Stops once 25 consecutive terms are each
/// below `tol` times the running sum.
pub fn pfq(params: &PfqParams, t: f64, tol: f64) -> Result<f64> {
    params.check()?;
    check_tol(tol)?;
    let mut acc = CompensatedSum::new();
    let mut term = 1.0;
    let mut small = 0;
    acc.add(term);
    for n in 0..PFQ_MAX_TERMS {
        term *= params.ratio(n, t);
        acc.add(term);
        if !acc.value().is_finite() {
            return Ok(acc.value());
        }
        if term.abs() < tol * acc.value().abs() || term == 0.0 {
            small += 1;
            if small >= PFQ_RUN {
                return Ok(acc.value());
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence {
        what: "pFq series",
        detail: format!("t = {t}"),
    })
}

/// Log-magnitude variant of [`pfq`]: returns `(sign, ln|value|)`.
pub fn pfq_ln(params: &PfqParams, t: f64, tol: f64) -> Result<(f64, f64)> {
    params.check()?;
    check_tol(tol)?;
    let ln_t = t.abs().ln();
    let t_sign = t.signum();
    let mut acc = LogSum::new();
    let mut ln_term = 0.0;
    let mut sign = 1.0;
    let mut small = 0;
    acc.add_ln(0.0);
    let ln_tol = tol.ln();
    for n in 0..PFQ_MAX_TERMS {
        let k = n as f64;
        let mut factor_sign = t_sign;
        let mut l = ln_t - (k + 1.0).ln();
        for a in &params.a {
            let v = a + k;
            factor_sign *= v.signum();
            l += v.abs().ln();
        }
        for b in &params.b {
            let v = b + k;
            factor_sign *= v.signum();
            l -= v.abs().ln();
        }
        if factor_sign == 0.0 || t == 0.0 {
            return Ok(acc.signed_ln());
        }
        sign *= factor_sign;
        ln_term += l;
        acc.add_signed_ln(sign, ln_term);
        let (_, ln_sum) = acc.signed_ln();
        if ln_term < ln_tol + ln_sum {
            small += 1;
            if small >= PFQ_RUN {
                return Ok(acc.signed_ln());
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence {
        what: "pFq series",
        detail: format!("t = {t}"),
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(
            "pfq",
            format!("tol = {tol} must lie in (0, 1)"),
        ))
    }
}
