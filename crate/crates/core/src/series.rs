//! The deformed exponential `𝒩(t) = Σ tⁿ/x_n!`, evaluated in log space.
//!
//! Terms are unimodal in n (the ratio `t/x_{n+1}` decreases), so the sum
//! starts at the largest term and walks outwards in both directions. Each
//! side stops once a geometric bound on everything not yet added falls
//! below a quarter of `tol` relative to the partial sum.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::LogSum;
use crate::sequence::{Factorials, Prefix};

/// Outcome of a series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEval {
    /// Natural log of the sum.
    pub value_ln: f64,
    /// Number of terms added.
    pub n_terms: usize,
    /// Bound on the omitted terms, relative to the sum (so at most `tol`).
    pub tail_bound: f64,
}

impl SeriesEval {
    pub fn value(&self) -> f64 {
        self.value_ln.exp()
    }
}

/// Walks the prefix cache forward on demand.
struct Cursor<'a, S: ?Sized> {
    seq: &'a S,
    prefix: Arc<Prefix>,
}

impl<'a, S: Factorials + ?Sized> Cursor<'a, S> {
    fn new(seq: &'a S) -> Result<Self> {
        Ok(Cursor {
            seq,
            prefix: seq.prefix(1)?,
        })
    }

    fn ensure(&mut self, n: usize) -> Result<()> {
        if n >= self.prefix.len() {
            self.prefix = self.seq.prefix(n)?;
        }
        Ok(())
    }

    fn value(&mut self, n: usize) -> Result<f64> {
        self.ensure(n)?;
        Ok(self.prefix.values()[n])
    }

    fn log_factorial(&mut self, n: usize) -> Result<f64> {
        self.ensure(n)?;
        Ok(self.prefix.log_factorials()[n])
    }

    /// Largest n with `x_n ≤ t`.
    fn peak_index(&mut self, t: f64) -> Result<usize> {
        let mut hi = self.prefix.len().max(2);
        while self.value(hi - 1)? <= t {
            hi *= 2;
            self.ensure(hi)?;
        }
        let vals = self.prefix.values();
        Ok(vals[..hi].partition_point(|&x| x <= t).saturating_sub(1))
    }
}

/// `𝒩(t)` for `t ≥ 0` with relative truncation error at most `tol`.
pub fn exp_series<S: Factorials + ?Sized>(seq: &S, t: f64, tol: f64) -> Result<SeriesEval> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(
            "exp_series",
            format!("t = {t} must be finite and non-negative"),
        ));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::domain(
            "exp_series",
            format!("tol = {tol} must lie in (0, 1)"),
        ));
    }
    if t == 0.0 {
        return Ok(SeriesEval {
            value_ln: 0.0,
            n_terms: 1,
            tail_bound: 0.0,
        });
    }
    let ln_t = t.ln();
    let ln_quarter_tol = (0.25 * tol).ln();
    let mut cur = Cursor::new(seq)?;
    let k = cur.peak_index(t)?;
    let term = |cur: &mut Cursor<S>, n: usize| -> Result<f64> {
        Ok(n as f64 * ln_t - cur.log_factorial(n)?)
    };

    let mut acc = LogSum::new();
    acc.add_ln(term(&mut cur, k)?);
    let mut n_terms = 1;

    // upward: ratio t/x_{n+1} < 1 beyond the peak and decreasing
    let mut n = k;
    let up_bound;
    loop {
        let ratio = t / cur.value(n + 1)?;
        let next = term(&mut cur, n + 1)?;
        if ratio < 1.0 {
            // everything from n+1 on is below next/(1 − ratio)
            let bound = next - (1.0 - ratio).ln();
            if bound < ln_quarter_tol + acc.ln() {
                up_bound = (bound - acc.ln()).exp();
                break;
            }
        }
        acc.add_ln(next);
        n_terms += 1;
        n += 1;
    }

    // downward: ratio x_n/t < 1 below the peak and decreasing as n falls
    let mut down_bound = 0.0;
    let mut n = k;
    while n > 0 {
        let ratio = cur.value(n)? / t;
        let prev = term(&mut cur, n - 1)?;
        if ratio < 1.0 {
            let bound = prev - (1.0 - ratio).ln();
            if bound < ln_quarter_tol + acc.ln() {
                down_bound = (bound - acc.ln()).exp();
                break;
            }
        }
        acc.add_ln(prev);
        n_terms += 1;
        n -= 1;
    }

    Ok(SeriesEval {
        value_ln: acc.ln(),
        n_terms,
        tail_bound: up_bound + down_bound,
    })
}

/// `𝒩_num(t)/𝒩_den(t)` formed from the difference of logs.
pub fn series_ratio<A, B>(num: &A, den: &B, t: f64, tol: f64) -> Result<f64>
where
    A: Factorials + ?Sized,
    B: Factorials + ?Sized,
{
    let a = exp_series(num, t, tol)?;
    let b = exp_series(den, t, tol)?;
    Ok((a.value_ln - b.value_ln).exp())
}
