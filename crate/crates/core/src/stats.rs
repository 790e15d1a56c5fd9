//! Deformed Poisson and binomial laws, and the Poisson and Gamma averages
//! that express the moment ratios of an α-perturbation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::moment_integral;
use crate::numeric::CompensatedSum;
use crate::quad::{integrate, QuadConfig};
use crate::sequence::{make_sequence, DeloneSequence, Factorials, SequenceSpec};
use crate::series::exp_series;
use crate::specfun::{ln_gamma, lower_regularized_gamma};

/// Highest order at which [`i_m`] cross-checks its two routes.
pub const I_M_CHECK_LIMIT: usize = 20;
const I_M_AGREEMENT: f64 = 1e-8;

/// `tⁿ/(𝒩(t) x_n!)`.
pub fn poisson_like_pmf<S: Factorials + ?Sized>(seq: &S, t: f64, n: usize) -> Result<f64> {
    let ln_norm = exp_series(seq, t, 1e-15)?.value_ln;
    if t == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    Ok((n as f64 * t.ln() - seq.log_factorial(n)? - ln_norm).exp())
}

/// `ξ(n) = n!/x_n!`.
pub fn xi(seq: &DeloneSequence, n: usize) -> Result<f64> {
    if !seq.is_alpha_perturbation() {
        return Err(Error::Unsupported(format!(
            "ξ needs an α-perturbation of the naturals, not the {} family",
            seq.spec().family_name()
        )));
    }
    Ok((ln_gamma(n as f64 + 1.0)? - seq.log_factorial(n)?).exp())
}

fn ln_poisson(t: f64, n: usize) -> f64 {
    if t == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    n as f64 * t.ln() - t - ln_gamma(n as f64 + 1.0).expect("n + 1 is positive")
}

/// `Σ_n e^{−t} tⁿ/n! f(n)`. The upward walk stops when the terms shrink
/// geometrically and their remainder is below `tol/4` of the sum.
pub fn poisson_mean(f: impl Fn(usize) -> f64, t: f64, tol: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(
            "poisson_mean",
            format!("t = {t} must be finite and non-negative"),
        ));
    }
    let peak = t.floor() as usize;
    let mut acc = CompensatedSum::new();
    for n in 0..=peak {
        acc.add(ln_poisson(t, n).exp() * f(n));
    }
    let limit = peak + 1000 + (60.0 * t.sqrt()) as usize;
    let mut prev = (ln_poisson(t, peak).exp() * f(peak)).abs();
    for n in peak + 1.. {
        let term = ln_poisson(t, n).exp() * f(n);
        acc.add(term);
        let ratio = term.abs() / prev;
        if term == 0.0
            || (ratio < 1.0 && term.abs() * ratio / (1.0 - ratio) < 0.25 * tol * acc.value().abs())
        {
            break;
        }
        if n > limit {
            return Err(Error::Divergence {
                what: "Poisson mean",
                detail: format!("terms still significant at n = {n} for t = {t}"),
            });
        }
        prev = term.abs();
    }
    Ok(acc.value())
}

/// `∫₀^∞ t^m e^{−t}/m! F(t) dt`, integrated up to a cut where the Gamma
/// law has negligible mass; `F` must grow at most polynomially.
pub fn gamma_mean(f: impl Fn(f64) -> f64 + Sync, m: usize, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::domain(
            "gamma_mean",
            format!("tol = {tol} must lie in (0, 1)"),
        ));
    }
    let shape = m as f64 + 1.0;
    let ln_norm = ln_gamma(shape)?;
    let density = |t: f64| {
        if t == 0.0 {
            if m == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            (m as f64 * t.ln() - t - ln_norm).exp()
        }
    };
    let mut cut = shape + 10.0 * shape.sqrt() + 40.0;
    // grow the cut until the neglected mass, weighted by |F| there, is tiny
    loop {
        let mass = 1.0 - lower_regularized_gamma(shape + 4.0, cut)?;
        let weight = f(cut).abs().max(1.0) * (cut / shape).powi(4).max(1.0);
        if mass * weight < 0.1 * tol {
            break;
        }
        cut *= 1.5;
        if cut > 1e7 {
            return Err(Error::Divergence {
                what: "Gamma mean",
                detail: "integrand does not decay".into(),
            });
        }
    }
    let g = |t: f64| density(t) * f(t);
    let mode = m as f64;
    let cfg = QuadConfig::new(tol * 0.25).with_budget(4000);
    let mut total = 0.0;
    if mode > 0.0 {
        total += integrate(g, 0.0, mode, 8, cfg)?.value;
    }
    total += integrate(g, mode, cut, 16, cfg)?.value;
    Ok(total)
}

/// `μ_m` of an α-perturbation. For `m ≤` [`I_M_CHECK_LIMIT`] it is also formed as
/// `ξ(m) E_G[1/E_P ξ](m)` and the two routes must agree.
pub fn i_m(seq: &DeloneSequence, m: usize, tol: f64) -> Result<f64> {
    let mu = (moment_integral(seq, m, tol)? - seq.log_factorial(m)?).exp();
    if m <= I_M_CHECK_LIMIT {
        let composed = i_m_composed(seq, m, tol)?;
        if (composed - mu).abs() > I_M_AGREEMENT.max(10.0 * tol) * mu {
            return Err(Error::Consistency(format!(
                "μ_{m} = {mu} from quadrature but {composed} from the Poisson/Gamma averages"
            )));
        }
    }
    Ok(mu)
}

/// `ξ(m) ∫ t^m e^{−t}/m! · 1/(E_P ξ)(t) dt`, built literally from the averages.
pub fn i_m_composed(seq: &DeloneSequence, m: usize, tol: f64) -> Result<f64> {
    let xi_m = xi(seq, m)?;
    let lf: Vec<f64> = seq.prefix(4096)?.log_factorials().to_vec();
    let xi_table: Vec<f64> = lf
        .iter()
        .enumerate()
        .map(|(n, l)| (ln_gamma(n as f64 + 1.0).expect("positive") - l).exp())
        .collect();
    let inner_tol = (tol * 1e-2).max(1e-15);
    let xi_of = |n: usize| {
        if n < xi_table.len() {
            xi_table[n]
        } else {
            xi(seq, n).unwrap_or(0.0)
        }
    };
    let avg = gamma_mean(
        |t| match poisson_mean(xi_of, t, inner_tol) {
            Ok(p) => 1.0 / p,
            Err(_) => f64::NAN,
        },
        m,
        tol * 0.1,
    )?;
    if !avg.is_finite() {
        return Err(Error::NonConvergence {
            what: "Gamma average",
            detail: format!("non-finite result at m = {m}"),
        });
    }
    Ok(xi_m * avg)
}

/// Deformed binomial law of n trials with win probability p, built on the
/// Kummer perturbation `x_n = n + ε/(1 + (a − 1)/n)`.
#[derive(Debug, Clone)]
pub struct DeformedBinomial {
    seq: DeloneSequence,
    a: f64,
    epsilon: f64,
    n: usize,
    p: f64,
}

/// Outcome of a deformed binomial evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinomialTable {
    pub pmf: Vec<f64>,
    /// `𝔴_n`, the normalization.
    pub normalization: f64,
}

impl DeformedBinomial {
    pub fn new(a: f64, epsilon: f64, n: usize, p: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::invalid(
                "deformed binomial",
                format!("a = {a} must be positive"),
            ));
        }
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::invalid(
                "deformed binomial",
                format!("ε = {epsilon} must lie in [0, 1)"),
            ));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(
                "deformed binomial",
                format!("p = {p} must lie in (0, 1)"),
            ));
        }
        if n == 0 {
            return Err(Error::invalid("deformed binomial", "n must be positive"));
        }
        let spec = if a == 1.0 {
            SequenceSpec::ConstantShift { epsilon }
        } else {
            SequenceSpec::HypergeometricPq {
                a: vec![a],
                b: vec![a + epsilon],
            }
        };
        Ok(DeformedBinomial {
            seq: make_sequence(spec)?,
            a,
            epsilon,
            n,
            p,
        })
    }

    /// The law with `p = t/x_n`.
    pub fn with_mean_parameter(a: f64, epsilon: f64, n: usize, t: f64) -> Result<Self> {
        let probe = Self::new(a, epsilon, n, 0.5)?;
        let p = t / probe.seq.value(n);
        Self::new(a, epsilon, n, p)
    }

    pub fn sequence(&self) -> &DeloneSequence {
        &self.seq
    }

    pub fn trials(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `t = p x_n`.
    pub fn t(&self) -> f64 {
        self.p * self.seq.value(self.n)
    }

    /// `(Γ(a+ε)/(Γ(a)Γ(ε))) ∫₀¹ (1 − p u)^{−x_{n−k}} u^{a−1} (1 − u)^{ε−1} du`,
    /// integrated in `v = (1 − u)^ε` to remove the endpoint singularity.
    pub fn hypergeometric_factor(&self, k: usize, tol: f64) -> Result<f64> {
        let power = self.seq.value(self.n - k);
        let (a, e, p) = (self.a, self.epsilon, self.p);
        if e == 0.0 {
            return Ok((1.0 - p).powf(-power));
        }
        let prefactor = (ln_gamma(a + e)? - ln_gamma(a)? - ln_gamma(e + 1.0)?).exp();
        let inv_e = 1.0 / e;
        let g = |v: f64| {
            let u = 1.0 - v.powf(inv_e);
            let base = (-power * (-p * u).ln_1p()).exp();
            if a == 1.0 {
                base
            } else {
                base * u.powf(a - 1.0)
            }
        };
        let r = integrate(g, 0.0, 1.0, 8, QuadConfig::new(tol).with_budget(4000))?;
        if !r.value.is_finite() {
            return Err(Error::Divergence {
                what: "Euler integral",
                detail: format!("non-finite value for k = {k}"),
            });
        }
        Ok(prefactor * r.value)
    }

    /// `𝔭_k` for `k = 0..=n`, normalized so that they sum to one.
    pub fn table(&self, tol: f64) -> Result<BinomialTable> {
        let n = self.n;
        let lf_n = self.seq.log_factorial(n)?;
        let ln_p = self.p.ln();
        let mut raw = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let ln_binom = lf_n - self.seq.log_factorial(n - k)? - self.seq.log_factorial(k)?;
            raw.push((ln_binom + k as f64 * ln_p).exp() / self.hypergeometric_factor(k, tol)?);
        }
        let normalization: f64 = raw.iter().copied().collect::<CompensatedSum>().value();
        Ok(BinomialTable {
            pmf: raw.iter().map(|r| r / normalization).collect(),
            normalization,
        })
    }
}

/// `𝔭_k` of the deformed binomial law.
pub fn deformed_binomial_pmf(db: &DeformedBinomial, k: usize, tol: f64) -> Result<f64> {
    if k > db.n {
        return Err(Error::domain(
            "deformed_binomial_pmf",
            format!("k = {k} exceeds n = {}", db.n),
        ));
    }
    Ok(db.table(tol)?.pmf[k])
}

/// `sup_k |𝔭_k − t^k/(𝒩(t) x_k!)|` over `k ≤ n`.
pub fn poisson_limit_distance(db: &DeformedBinomial, tol: f64) -> Result<f64> {
    let t = db.t();
    let table = db.table(tol)?;
    let mut worst: f64 = 0.0;
    for (k, pk) in table.pmf.iter().enumerate() {
        worst = worst.max((pk - poisson_like_pmf(&db.seq, t, k)?).abs());
    }
    Ok(worst)
}
