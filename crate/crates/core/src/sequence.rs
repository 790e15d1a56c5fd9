//! Delone perturbations of the natural numbers and their factorials.
//!
//! A sequence is described by a [`SequenceSpec`] (serializable as
//! `{"family": ..., "params": {...}}`) and turned into a [`DeloneSequence`]
//! by [`make_sequence`]. No automatic rescaling is applied: the caller picks
//! the scale through the family parameters (β-integers are the one family
//! rescaled internally, by their density constant).

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{frac, CompensatedSum};

/// Kind of quadratic Pisot unit used for β-integers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BetaKind {
    /// β² = mβ + 1 with integer m ≥ 1.
    SimpleUnit { beta: f64 },
    /// β² = mβ − 1 with integer m ≥ 3.
    NonsimpleUnit { beta: f64 },
    /// β = (1 + √5)/2.
    Golden,
}

/// Parametric description of a sequence `x_n = n + α(n)`, `x_0 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum SequenceSpec {
    /// `x_n = n`.
    Naturals,
    /// `x_n = n + ε` for n ≥ 1, with |ε| < 1.
    ConstantShift { epsilon: f64 },
    /// `α(n) = (a n + b)/(c n + d)`.
    Homographic { a: f64, b: f64, c: f64, d: f64 },
    /// `α(n) = ε sin(ω n)`.
    Periodic { epsilon: f64, omega: f64 },
    /// `α(n) = ε sin(κ n)/n`.
    SineOverN { epsilon: f64, kappa: f64 },
    /// `α(n) = λ {μ n} + ν`.
    FractionalPeriodic { lambda: f64, mu: f64, nu: f64 },
    /// β-integers rescaled to unit density.
    BetaInteger(BetaKind),
    /// `x_n = n ∏(b_i + n − 1)/∏(a_i + n − 1)`, so that the deformed
    /// exponential is the pFq series with these parameters.
    HypergeometricPq { a: Vec<f64>, b: Vec<f64> },
    /// Explicit values starting with 0; continued with unit steps past the end.
    /// `r`/`l` default to the smallest/largest gap of the table.
    Table {
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        l: Option<f64>,
    },
}

impl SequenceSpec {
    /// `x_n = n − ε/n`, i.e. `n(1 − ε/n²)`, as a 2F2 family. Requires 0 ≤ ε < 1.
    pub fn inverse_square(epsilon: f64) -> Self {
        let s = epsilon.max(0.0).sqrt();
        SequenceSpec::HypergeometricPq {
            a: vec![1.0, 1.0],
            b: vec![1.0 - s, 1.0 + s],
        }
    }

    /// Short family name, as used in the JSON `family` tag.
    pub fn family_name(&self) -> &'static str {
        match self {
            SequenceSpec::Naturals => "naturals",
            SequenceSpec::ConstantShift { .. } => "constant_shift",
            SequenceSpec::Homographic { .. } => "homographic",
            SequenceSpec::Periodic { .. } => "periodic",
            SequenceSpec::SineOverN { .. } => "sine_over_n",
            SequenceSpec::FractionalPeriodic { .. } => "fractional_periodic",
            SequenceSpec::BetaInteger(_) => "beta_integer",
            SequenceSpec::HypergeometricPq { .. } => "hypergeometric_pq",
            SequenceSpec::Table { .. } => "table",
        }
    }
}

/// Result of scanning the gaps `x_{n+1} − x_n` for `n < n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeloneCertificate {
    /// No gap is non-positive or outside the declared `[r, L]`.
    pub ok: bool,
    pub min_gap: f64,
    pub max_gap: f64,
    /// First `n` whose gap `x_{n+1} − x_n` is a violation.
    pub first_violation: Option<usize>,
}

/// Values and cumulative log-factorials `ln x_n!` for `n < len`.
#[derive(Debug, Clone, Default)]
pub struct Prefix {
    values: Vec<f64>,
    log_factorials: Vec<f64>,
    acc: CompensatedSum,
}

impl Prefix {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn log_factorials(&self) -> &[f64] {
        &self.log_factorials
    }

    fn extend_to(&mut self, len: usize, value: &dyn Fn(usize) -> f64) -> Result<()> {
        while self.values.len() < len {
            let n = self.values.len();
            let x = if n == 0 { 0.0 } else { value(n) };
            if n > 0 {
                if !(x > 0.0) || !x.is_finite() {
                    return Err(Error::DegenerateSequence { index: n, value: x });
                }
                self.acc.add(x.ln());
            }
            self.values.push(x);
            self.log_factorials.push(self.acc.value());
        }
        Ok(())
    }
}

/// Append-only memo of a sequence prefix, safe for concurrent readers.
#[derive(Debug, Default)]
pub(crate) struct PrefixCache {
    inner: RwLock<Arc<Prefix>>,
}

impl PrefixCache {
    pub(crate) fn get(&self, n: usize, value: &dyn Fn(usize) -> f64) -> Result<Arc<Prefix>> {
        {
            let p = self.inner.read().unwrap_or_else(|e| e.into_inner());
            if p.len() > n {
                return Ok(Arc::clone(&p));
            }
        }
        let mut w = self.inner.write().unwrap_or_else(|e| e.into_inner());
        if w.len() > n {
            return Ok(Arc::clone(&w));
        }
        let target = (n + 1).max(2 * w.len()).max(64);
        let mut next = (**w).clone();
        next.extend_to(target, value)?;
        *w = Arc::new(next);
        Ok(Arc::clone(&w))
    }
}

/// Anything with values `x_n` and factorials `x_n! = x_1 ⋯ x_n`.
pub trait Factorials: Send + Sync {
    /// A prefix holding at least indices `0..=n`.
    fn prefix(&self, n: usize) -> Result<Arc<Prefix>>;

    fn log_factorial(&self, n: usize) -> Result<f64> {
        Ok(self.prefix(n)?.log_factorials[n])
    }

    fn term(&self, n: usize) -> Result<f64> {
        Ok(self.prefix(n)?.values[n])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct BetaConsts {
    beta: f64,
    /// Density constant c_β; the stored sequence is b_n / c_β.
    density: f64,
    offset: f64,
    coef: f64,
    /// `step + step_lo` is the irrational slope in double-double form.
    step: f64,
    step_lo: f64,
    index_shift: f64,
}

impl BetaConsts {
    fn raw_alpha(&self, x: f64) -> f64 {
        let y = x + self.index_shift;
        let hi = y * self.step;
        let err = y.mul_add(self.step, -hi);
        let f = frac(frac(hi) + (err + y * self.step_lo));
        self.offset + self.coef * f
    }
}

/// Double-double reciprocal of `hi + lo`.
fn recip_dd(hi: f64, lo: f64) -> (f64, f64) {
    let q = 1.0 / hi;
    let r = (-q).mul_add(hi, 1.0) - q * lo;
    (q, r / hi)
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[derive(Debug, Clone, PartialEq)]
enum Family {
    Naturals,
    Shift(f64),
    Homographic { a: f64, b: f64, c: f64, d: f64 },
    Periodic { eps: f64, omega: f64 },
    SineOverN { eps: f64, kappa: f64 },
    FracPeriodic { lambda: f64, mu: f64, nu: f64 },
    Beta(BetaConsts),
    Hyper { a: Vec<f64>, b: Vec<f64> },
    Table(Vec<f64>),
}

impl Family {
    /// α(n) for integer n ≥ 1.
    fn alpha(&self, n: usize, warned: &AtomicBool) -> f64 {
        let x = n as f64;
        match self {
            Family::Beta(b) => {
                if x * b.step > 9.007_199_254_740_992e15 && !warned.swap(true, Ordering::Relaxed) {
                    log::warn!("fractional part at n = {n} exceeds 2^53: precision lost");
                }
                b.raw_alpha(x) / b.density
            }
            Family::FracPeriodic { lambda, mu, nu } => {
                if x * mu.abs() > 9.007_199_254_740_992e15 && !warned.swap(true, Ordering::Relaxed)
                {
                    log::warn!("fractional part at n = {n} exceeds 2^53: precision lost");
                }
                lambda * frac(mu * x) + nu
            }
            Family::Table(v) => {
                if n < v.len() {
                    v[n] - x
                } else {
                    v[v.len() - 1] - (v.len() - 1) as f64
                }
            }
            Family::Hyper { .. } => self.value(n, warned) - x,
            _ => self.alpha_continuous(x).unwrap_or(0.0),
        }
    }

    fn value(&self, n: usize, warned: &AtomicBool) -> f64 {
        if n == 0 {
            return 0.0;
        }
        match self {
            Family::Naturals => n as f64,
            Family::Table(v) if n < v.len() => v[n],
            Family::Hyper { a, b } => {
                let x = n as f64;
                let mut v = x;
                for (ai, bi) in a.iter().zip(b) {
                    v *= (bi + x - 1.0) / (ai + x - 1.0);
                }
                v
            }
            _ => n as f64 + self.alpha(n, warned),
        }
    }

    fn alpha_continuous(&self, x: f64) -> Result<f64> {
        Ok(match self {
            Family::Naturals => 0.0,
            Family::Shift(e) => *e,
            Family::Homographic { a, b, c, d } => (a * x + b) / (c * x + d),
            Family::Periodic { eps, omega } => eps * (omega * x).sin(),
            Family::SineOverN { eps, kappa } => eps * (kappa * x).sin() / x,
            Family::FracPeriodic { lambda, mu, nu } => lambda * frac(mu * x) + nu,
            Family::Beta(b) => b.raw_alpha(x) / b.density,
            Family::Hyper { a, b } => {
                let mut v = x;
                for (ai, bi) in a.iter().zip(b) {
                    v *= (bi + x - 1.0) / (ai + x - 1.0);
                }
                v - x
            }
            Family::Table(_) => {
                return Err(Error::Unsupported(
                    "table sequences have no continuous extension".into(),
                ))
            }
        })
    }
}

struct Resolved {
    family: Family,
    r: f64,
    l: f64,
    certified_up_to: usize,
    alpha_perturbation: bool,
}

struct Inner {
    spec: SequenceSpec,
    family: Family,
    r: f64,
    l: f64,
    certified_up_to: usize,
    alpha_perturbation: bool,
    warned: AtomicBool,
    cache: PrefixCache,
    /// ln 𝒩(t) at quadrature nodes, keyed by the bits of t.
    nodes: RwLock<HashMap<u64, f64>>,
}

/// Accuracy of cached ln 𝒩 node values.
pub(crate) const NODE_TOL: f64 = 1e-15;
const NODE_CACHE_LIMIT: usize = 1 << 22;

/// A validated Delone sequence with lazily cached values and log-factorials.
///
/// Cloning is cheap and clones share the cache.
#[derive(Clone)]
pub struct DeloneSequence {
    inner: Arc<Inner>,
}

impl std::fmt::Debug for DeloneSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DeloneSequence")
            .field("spec", &self.inner.spec)
            .field("r", &self.inner.r)
            .field("l", &self.inner.l)
            .field("certified_up_to", &self.inner.certified_up_to)
            .finish()
    }
}

/// Validate `spec` and build the sequence.
pub fn make_sequence(spec: SequenceSpec) -> Result<DeloneSequence> {
    DeloneSequence::new(spec)
}

/// β-integers for the given quadratic unit, rescaled to `x_n = b_n / c_β`.
pub fn beta_integers(kind: BetaKind) -> Result<DeloneSequence> {
    DeloneSequence::new(SequenceSpec::BetaInteger(kind))
}

/// Scan gaps `x_{n+1} − x_n` for `n < n_max` against positivity and the
/// sequence's declared bounds `[r, L]`.
pub fn certify_delone(seq: &DeloneSequence, n_max: usize) -> DeloneCertificate {
    let (r, l) = (seq.r(), seq.l());
    let mut min_gap = f64::INFINITY;
    let mut max_gap = f64::NEG_INFINITY;
    let mut first_violation = None;
    let mut prev = seq.value(0);
    for n in 0..n_max.max(1) {
        let next = seq.value(n + 1);
        let gap = next - prev;
        prev = next;
        min_gap = min_gap.min(gap);
        max_gap = max_gap.max(gap);
        // gaps of large values carry the rounding of both endpoints
        let slack = 1e-12 + 4.0 * f64::EPSILON * next.abs();
        let bad = !(gap > 0.0) || !gap.is_finite() || gap < r - slack || gap > l + slack;
        if bad && first_violation.is_none() {
            first_violation = Some(n);
        }
    }
    DeloneCertificate {
        ok: first_violation.is_none() && min_gap > 0.0 && max_gap.is_finite(),
        min_gap,
        max_gap,
        first_violation,
    }
}

const SCAN: usize = 4096;

fn finite(family: &'static str, vals: &[f64]) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid(family, "parameters must be finite"))
    }
}

/// Root > 1 of β² = mβ + sign as a double-double `(hi, lo)`, from one Newton
/// step whose residual is evaluated with a single rounding.
fn quadratic_unit(m: f64, sign: f64) -> (f64, f64) {
    let beta = 0.5 * (m + (m * m + 4.0 * sign).sqrt());
    // β − m is exact here (Sterbenz), so fma gives β(β − m) − sign rounded once.
    let residual = beta.mul_add(beta - m, -sign);
    two_sum(beta, -residual / (2.0 * beta - m))
}

fn beta_consts(kind: BetaKind) -> Result<BetaConsts> {
    const FAM: &str = "beta_integer";
    let ((beta, beta_lo), simple) = match kind {
        BetaKind::Golden => (quadratic_unit(1.0, 1.0), true),
        BetaKind::SimpleUnit { beta } => {
            finite(FAM, &[beta])?;
            if beta <= 1.0 {
                return Err(Error::invalid(FAM, "simple unit requires β > 1"));
            }
            let m = beta - 1.0 / beta;
            let mr = m.round();
            if (m - mr).abs() > 1e-9 || mr < 1.0 {
                return Err(Error::invalid(
                    FAM,
                    format!("β = {beta} does not satisfy β² = mβ + 1 with integer m ≥ 1"),
                ));
            }
            (quadratic_unit(mr, 1.0), true)
        }
        BetaKind::NonsimpleUnit { beta } => {
            finite(FAM, &[beta])?;
            if beta <= 1.0 {
                return Err(Error::invalid(FAM, "non-simple unit requires β > 1"));
            }
            let m = beta + 1.0 / beta;
            let mr = m.round();
            if (m - mr).abs() > 1e-9 || mr < 3.0 {
                return Err(Error::invalid(
                    FAM,
                    format!("β = {beta} does not satisfy β² = mβ − 1 with integer m ≥ 3"),
                ));
            }
            (quadratic_unit(mr, -1.0), false)
        }
    };
    Ok(if simple {
        let (d, dl) = two_sum(1.0, beta);
        let (step, step_lo) = recip_dd(d, dl + beta_lo);
        BetaConsts {
            beta,
            density: (1.0 + beta * beta) / (beta * (1.0 + beta)),
            offset: (1.0 - beta) / (beta * (1.0 + beta)),
            coef: (beta - 1.0) / beta,
            step,
            step_lo,
            index_shift: 1.0,
        }
    } else {
        let (step, step_lo) = recip_dd(beta, beta_lo);
        BetaConsts {
            beta,
            density: 1.0 - 1.0 / (beta * beta),
            offset: 0.0,
            coef: 1.0 / beta,
            step,
            step_lo,
            index_shift: 0.0,
        }
    })
}

fn gap_bounds(gaps: impl IntoIterator<Item = f64>) -> (f64, f64) {
    gaps.into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), g| {
            (lo.min(g), hi.max(g))
        })
}

fn resolve(spec: &SequenceSpec) -> Result<Resolved> {
    let warned = AtomicBool::new(true);
    let all = usize::MAX;
    let res = match spec {
        SequenceSpec::Naturals => Resolved {
            family: Family::Naturals,
            r: 1.0,
            l: 1.0,
            certified_up_to: all,
            alpha_perturbation: true,
        },
        &SequenceSpec::ConstantShift { epsilon } => {
            finite("constant_shift", &[epsilon])?;
            if epsilon.abs() >= 1.0 {
                return Err(Error::invalid(
                    "constant_shift",
                    format!("|ε| < 1 violated (ε = {epsilon})"),
                ));
            }
            Resolved {
                family: Family::Shift(epsilon),
                r: (1.0 + epsilon).min(1.0),
                l: (1.0 + epsilon).max(1.0),
                certified_up_to: all,
                alpha_perturbation: true,
            }
        }
        &SequenceSpec::Homographic { a, b, c, d } => {
            const FAM: &str = "homographic";
            finite(FAM, &[a, b, c, d])?;
            let family = Family::Homographic { a, b, c, d };
            if c == 0.0 {
                if d == 0.0 {
                    return Err(Error::invalid(FAM, "c and d cannot both vanish"));
                }
                if a != 0.0 {
                    return Err(Error::invalid(FAM, "c = 0 requires a = 0 (α bounded)"));
                }
            } else if c * (c + d) <= 0.0 {
                return Err(Error::invalid(
                    FAM,
                    "c n + d must keep the sign of c for n ≥ 1 (no pole)",
                ));
            }
            let a1 = (a + b) / (c + d);
            let a_inf = if c == 0.0 { b / d } else { a / c };
            if a1.abs() >= 1.0 || a_inf.abs() >= 1.0 {
                return Err(Error::invalid(
                    FAM,
                    format!("|α| < 1 violated (α(1) = {a1}, α(∞) = {a_inf})"),
                ));
            }
            // jumps are monotone in magnitude for n ≥ 1, so gaps 0, 1 and the limit bound all of them
            let a2 = (2.0 * a + b) / (2.0 * c + d);
            let (r, l) = gap_bounds([1.0 + a1, 1.0 + a2 - a1, 1.0]);
            if r <= 0.0 {
                return Err(Error::invalid(
                    FAM,
                    format!("gaps must be positive (r = {r})"),
                ));
            }
            Resolved {
                family,
                r,
                l,
                certified_up_to: all,
                alpha_perturbation: true,
            }
        }
        &SequenceSpec::Periodic { epsilon, omega } => {
            const FAM: &str = "periodic";
            finite(FAM, &[epsilon, omega])?;
            if epsilon.abs() >= 1.0 {
                return Err(Error::invalid(
                    FAM,
                    format!("|ε| < 1 violated (ε = {epsilon})"),
                ));
            }
            let jump = 2.0 * (epsilon * (0.5 * omega).sin()).abs();
            if jump >= 1.0 {
                return Err(Error::invalid(
                    FAM,
                    format!("2|ε sin(ω/2)| < 1 violated ({jump})"),
                ));
            }
            Resolved {
                family: Family::Periodic {
                    eps: epsilon,
                    omega,
                },
                r: 1.0 - jump,
                l: 1.0 + jump,
                certified_up_to: all,
                alpha_perturbation: true,
            }
        }
        &SequenceSpec::SineOverN { epsilon, kappa } => {
            const FAM: &str = "sine_over_n";
            finite(FAM, &[epsilon, kappa])?;
            if epsilon.abs() >= 1.0 {
                return Err(Error::invalid(
                    FAM,
                    format!("|ε| < 1 violated (ε = {epsilon})"),
                ));
            }
            let family = Family::SineOverN {
                eps: epsilon,
                kappa,
            };
            let vals: Vec<f64> = (0..=SCAN).map(|n| family.value(n, &warned)).collect();
            let tail = 2.0 * epsilon.abs() / SCAN as f64;
            let (lo, hi) = gap_bounds(vals.windows(2).map(|w| w[1] - w[0]));
            let (r, l) = (lo.min(1.0 - tail), hi.max(1.0 + tail));
            if r <= 0.0 {
                return Err(Error::invalid(
                    FAM,
                    format!("gaps must be positive (min gap {lo})"),
                ));
            }
            Resolved {
                family,
                r,
                l,
                certified_up_to: all,
                alpha_perturbation: true,
            }
        }
        &SequenceSpec::FractionalPeriodic { lambda, mu, nu } => {
            const FAM: &str = "fractional_periodic";
            finite(FAM, &[lambda, mu, nu])?;
            if !(mu > 0.0) {
                return Err(Error::invalid(FAM, "μ > 0 required"));
            }
            if lambda.abs() >= 0.5 {
                return Err(Error::invalid(
                    FAM,
                    format!("|λ| < 1/2 violated (λ = {lambda})"),
                ));
            }
            let (nu_lo, nu_hi) = if lambda >= 0.0 {
                (-1.0, 1.0 - lambda)
            } else {
                (-lambda - 1.0, 1.0)
            };
            if !(nu > nu_lo && nu < nu_hi) {
                return Err(Error::invalid(
                    FAM,
                    format!("ν must lie in ({nu_lo}, {nu_hi}) (ν = {nu})"),
                ));
            }
            let f = frac(mu);
            let (r, l) = gap_bounds([
                1.0 + lambda * f + nu,
                1.0 + lambda * f,
                1.0 + lambda * (f - 1.0),
            ]);
            if r <= 0.0 {
                return Err(Error::invalid(
                    FAM,
                    format!("gaps must be positive (r = {r})"),
                ));
            }
            Resolved {
                family: Family::FracPeriodic { lambda, mu, nu },
                r,
                l,
                certified_up_to: all,
                alpha_perturbation: true,
            }
        }
        &SequenceSpec::BetaInteger(kind) => {
            let bc = beta_consts(kind)?;
            let hi = (bc.density + bc.coef * bc.step) / bc.density;
            let lo = (bc.density + bc.coef * (bc.step - 1.0)) / bc.density;
            let amin = bc.offset / bc.density;
            let amax = (bc.offset + bc.coef) / bc.density;
            Resolved {
                family: Family::Beta(bc),
                r: lo.min(hi),
                l: lo.max(hi),
                certified_up_to: all,
                alpha_perturbation: amin > -1.0 && amax < 1.0,
            }
        }
        SequenceSpec::HypergeometricPq { a, b } => {
            const FAM: &str = "hypergeometric_pq";
            if a.len() != b.len() || a.is_empty() {
                return Err(Error::invalid(FAM, "need len(a) = len(b) ≥ 1"));
            }
            finite(FAM, a)?;
            finite(FAM, b)?;
            for &ai in a {
                if ai <= 0.0 && ai == ai.round() {
                    return Err(Error::invalid(FAM, format!("a = {ai} makes x_n infinite")));
                }
            }
            let family = Family::Hyper {
                a: a.clone(),
                b: b.clone(),
            };
            let big = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs()));
            let scan = SCAN.max(4 * big as usize + 16);
            let mut vals = Vec::with_capacity(scan + 1);
            for n in 0..=scan {
                let x = family.value(n, &warned);
                if n > 0 && !(x > 0.0) {
                    return Err(Error::DegenerateSequence { index: n, value: x });
                }
                vals.push(x);
            }
            let a_inf: f64 = b.iter().zip(a).map(|(bi, ai)| bi - ai).sum();
            let amax = vals
                .iter()
                .enumerate()
                .skip(1)
                .fold(0.0f64, |m, (n, v)| m.max((v - n as f64).abs()));
            let tail = (vals[scan] - scan as f64 - a_inf).abs();
            let (lo, hi) = gap_bounds(vals.windows(2).map(|w| w[1] - w[0]));
            let (r, l) = (lo.min(1.0 - tail), hi.max(1.0 + tail));
            if r <= 0.0 {
                return Err(Error::invalid(
                    FAM,
                    format!("gaps must be positive (min gap {lo})"),
                ));
            }
            Resolved {
                family,
                r,
                l,
                certified_up_to: all,
                alpha_perturbation: amax < 1.0 && a_inf.abs() < 1.0,
            }
        }
        SequenceSpec::Table { values, r, l } => {
            const FAM: &str = "table";
            if values.len() < 2 {
                return Err(Error::invalid(FAM, "need at least x_0 and x_1"));
            }
            finite(FAM, values)?;
            if values[0] != 0.0 {
                return Err(Error::invalid(FAM, "x_0 = 0 required"));
            }
            if let Some(n) = values.windows(2).position(|w| !(w[1] > w[0])) {
                return Err(Error::invalid(
                    FAM,
                    format!("values must strictly increase (x_{} ≥ x_{})", n, n + 1),
                ));
            }
            let (lo, hi) = gap_bounds(values.windows(2).map(|w| w[1] - w[0]).chain([1.0]));
            let r = r.unwrap_or(lo);
            let l = l.unwrap_or(hi);
            if !(r > 0.0 && r <= l) || !l.is_finite() {
                return Err(Error::invalid(
                    FAM,
                    format!("declared bounds need 0 < r ≤ L (r = {r}, L = {l})"),
                ));
            }
            let alpha_perturbation = values
                .iter()
                .enumerate()
                .all(|(n, v)| (v - n as f64).abs() < 1.0);
            Resolved {
                family: Family::Table(values.clone()),
                r,
                l,
                certified_up_to: all,
                alpha_perturbation,
            }
        }
    };
    Ok(res)
}

impl DeloneSequence {
    pub fn new(spec: SequenceSpec) -> Result<Self> {
        let res = resolve(&spec)?;
        Ok(DeloneSequence {
            inner: Arc::new(Inner {
                spec,
                family: res.family,
                r: res.r,
                l: res.l,
                certified_up_to: res.certified_up_to,
                alpha_perturbation: res.alpha_perturbation,
                warned: AtomicBool::new(false),
                cache: PrefixCache::default(),
                nodes: RwLock::new(HashMap::new()),
            }),
        })
    }

    pub fn naturals() -> Self {
        Self::new(SequenceSpec::Naturals).expect("naturals are valid")
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.inner.spec
    }

    /// Declared lower bound on the gaps.
    pub fn r(&self) -> f64 {
        self.inner.r
    }

    /// Declared upper bound on the gaps.
    pub fn l(&self) -> f64 {
        self.inner.l
    }

    /// Largest index for which the bounds are established; `usize::MAX` when
    /// they hold for every n.
    pub fn certified_up_to(&self) -> usize {
        self.inner.certified_up_to
    }

    /// `x_n`.
    pub fn value(&self, n: usize) -> f64 {
        self.inner.family.value(n, &self.inner.warned)
    }

    /// `α(n) = x_n − n`, with `α(0) = 0`.
    pub fn alpha(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.inner.family.alpha(n, &self.inner.warned)
        }
    }

    /// α extended to real arguments `x ≥ 1`.
    pub fn alpha_continuous(&self, x: f64) -> Result<f64> {
        self.inner.family.alpha_continuous(x)
    }

    /// `|α(n)| < 1` for all n.
    pub fn is_alpha_perturbation(&self) -> bool {
        self.inner.alpha_perturbation
    }

    /// The quadratic unit β for β-integer sequences.
    pub fn beta(&self) -> Option<f64> {
        match &self.inner.family {
            Family::Beta(b) => Some(b.beta),
            _ => None,
        }
    }

    /// The density constant `c_β` for β-integer sequences.
    pub fn beta_density(&self) -> Option<f64> {
        match &self.inner.family {
            Family::Beta(b) => Some(b.density),
            _ => None,
        }
    }

    /// `ln x_n!`, zero for n = 0.
    pub fn log_factorial(&self, n: usize) -> Result<f64> {
        Factorials::log_factorial(self, n)
    }

    /// ln 𝒩(t), memoized per node. Concurrent inserts of the same key write
    /// the same value.
    pub(crate) fn ln_exp_cached(&self, t: f64) -> Result<f64> {
        let key = t.to_bits();
        if let Some(v) = self
            .inner
            .nodes
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(&key)
        {
            return Ok(*v);
        }
        let v = crate::series::exp_series(self, t, NODE_TOL)?.value_ln;
        let mut w = self.inner.nodes.write().unwrap_or_else(|e| e.into_inner());
        if w.len() >= NODE_CACHE_LIMIT {
            w.clear();
        }
        w.insert(key, v);
        Ok(v)
    }

    /// True when both handles share one underlying sequence.
    pub fn same_as(&self, other: &DeloneSequence) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }
}

impl Factorials for DeloneSequence {
    fn prefix(&self, n: usize) -> Result<Arc<Prefix>> {
        let fam = &self.inner.family;
        let warned = &self.inner.warned;
        self.inner.cache.get(n, &|k| fam.value(k, warned))
    }
}
