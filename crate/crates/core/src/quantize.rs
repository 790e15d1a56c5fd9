//! Coherent states, ladder operators and the quantization of radial symbols
//! on a truncated Fock basis `e_0 … e_{dim−1}`.
//!
//! Identities between truncated operators hold only on the leading block:
//! a product like `ã ã†` misses the contribution of `e_dim`, so its last
//! diagonal entry is wrong by construction.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{radial_integral, DEFAULT_BUDGET};
use crate::renorm::RenormalizedSequence;
use crate::sequence::Factorials;
use crate::series::exp_series;

/// Tail probability below which an automatically sized state is accepted.
pub const AUTO_TAIL: f64 = 1e-12;
/// Smallest automatically chosen dimension.
pub const MIN_DIM: usize = 16;

const HERMITIAN_TOL: f64 = 1e-12;

/// Sparsity pattern of an operator matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Storage {
    Diagonal,
    Tridiagonal,
    Dense,
}

/// Square complex matrix, stored densely in row-major order. The storage
/// tag is derived from the actual nonzero pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    storage: Storage,
    entries: Vec<Complex64>,
}

impl OperatorMatrix {
    pub fn from_dense(dim: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count must be dim²");
        let mut band = 0usize;
        for i in 0..dim {
            for j in 0..dim {
                if entries[i * dim + j] != Complex64::new(0.0, 0.0) {
                    band = band.max(i.abs_diff(j));
                }
            }
        }
        let storage = match band {
            0 => Storage::Diagonal,
            1 => Storage::Tridiagonal,
            _ => Storage::Dense,
        };
        OperatorMatrix {
            dim,
            storage,
            entries,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_dense(dim, vec![Complex64::new(0.0, 0.0); dim * dim])
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![1.0; dim])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut e = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (i, d) in diag.iter().enumerate() {
            e[i * dim + i] = Complex64::new(*d, 0.0);
        }
        Self::from_dense(dim, e)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn storage(&self) -> Storage {
        self.storage
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Nonzero entries as `(row, col, value)`, row-major.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != Complex64::new(0.0, 0.0))
            .map(move |(k, v)| (k / self.dim, k % self.dim, *v))
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let e = (0..d * d).map(|k| self.get(k % d, k / d).conj()).collect();
        Self::from_dense(d, e)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let e = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| f(*a, *b))
            .collect();
        Self::from_dense(self.dim, e)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_dense(self.dim, self.entries.iter().map(|a| a * s).collect())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let d = self.dim;
        let mut e = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    e[i * d + j] += a * other.get(k, j);
                }
            }
        }
        Self::from_dense(d, e)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Largest entry modulus over the leading `block × block` corner.
    pub fn max_abs_leading(&self, block: usize) -> f64 {
        let b = block.min(self.dim);
        let mut m: f64 = 0.0;
        for i in 0..b {
            for j in 0..b {
                m = m.max(self.get(i, j).norm());
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_leading(self.dim)
    }

    /// Frobenius norm, an upper bound on the operator norm.
    pub fn frobenius(&self) -> f64 {
        self.entries
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_hermitian(&self) -> bool {
        self.sub(&self.adjoint()).max_abs() < HERMITIAN_TOL
    }
}

/// Values `x_1 … x_dim`, rejecting a dimension that outruns the moments.
fn ladder_values<S: Factorials + ?Sized>(seq: &S, dim: usize) -> Result<Vec<f64>> {
    if dim < 2 {
        return Err(Error::domain(
            "ladder_matrices",
            format!("dim = {dim} must be at least 2"),
        ));
    }
    Ok(seq.prefix(dim)?.values()[..=dim].to_vec())
}

/// Lowering and raising operators with `a e_n = √x_n e_{n−1}`.
pub fn ladder_matrices<S: Factorials + ?Sized>(
    seq: &S,
    dim: usize,
) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let x = ladder_values(seq, dim)?;
    let mut e = vec![Complex64::new(0.0, 0.0); dim * dim];
    for n in 1..dim {
        e[(n - 1) * dim + n] = Complex64::new(x[n].sqrt(), 0.0);
    }
    let lower = OperatorMatrix::from_dense(dim, e);
    let raise = lower.adjoint();
    Ok((lower, raise))
}

/// `Q = (a + a†)/√2` and `P = (a − a†)/(i√2)`.
pub fn position_momentum<S: Factorials + ?Sized>(
    seq: &S,
    dim: usize,
) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let (a, ad) = ladder_matrices(seq, dim)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = a.add(&ad).scale(Complex64::new(s, 0.0));
    let p = a.sub(&ad).scale(Complex64::new(0.0, -s));
    debug_assert!(q.is_hermitian() && p.is_hermitian());
    Ok((q, p))
}

/// Truncated coherent state `Σ_{n<dim} zⁿ/√(𝒩(|z|²) x_n!) e_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    pub z: Complex64,
    pub coeffs: Vec<Complex64>,
    /// Certified bound on the probability mass beyond `dim`.
    pub tail: f64,
}

impl CoherentState {
    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `|⟨e_n, v_z⟩|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }
}

/// Bound on `Σ_{n≥dim} tⁿ/(𝒩(t) x_n!)`, or infinity while the terms still grow.
fn tail_mass<S: Factorials + ?Sized>(seq: &S, t: f64, ln_norm: f64, dim: usize) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let prefix = seq.prefix(dim + 1)?;
    let ratio = t / prefix.values()[dim + 1];
    if ratio >= 1.0 {
        return Ok(f64::INFINITY);
    }
    let ln_term = dim as f64 * t.ln() - prefix.log_factorials()[dim] - ln_norm;
    Ok((ln_term - (1.0 - ratio).ln()).exp())
}

/// Smallest dimension (at least [`MIN_DIM`]) whose coherent-state tail at
/// `|z| = radius` is below `tol`.
pub fn auto_dim<S: Factorials + ?Sized>(seq: &S, radius: f64, tol: f64) -> Result<usize> {
    let t = radius * radius;
    let ln_norm = exp_series(seq, t, 1e-15)?.value_ln;
    let mut dim = MIN_DIM;
    while tail_mass(seq, t, ln_norm, dim)? >= tol {
        dim += 1;
    }
    Ok(dim)
}

pub fn coherent_state<S: Factorials + ?Sized>(
    seq: &S,
    z: Complex64,
    dim: usize,
    tol: f64,
) -> Result<CoherentState> {
    if dim == 0 {
        return Err(Error::domain("coherent_state", "dim must be positive"));
    }
    let t = z.norm_sqr();
    let ln_norm = exp_series(seq, t, 1e-15)?.value_ln;
    let tail = tail_mass(seq, t, ln_norm, dim)?;
    if !(tail < tol) {
        return Err(Error::Truncation {
            dim,
            suggested: auto_dim(seq, z.norm(), tol)?,
        });
    }
    let prefix = seq.prefix(dim)?;
    let lf = prefix.log_factorials();
    let coeffs = if t == 0.0 {
        let mut c = vec![Complex64::new(0.0, 0.0); dim];
        c[0] = Complex64::new(1.0, 0.0);
        c
    } else {
        let (r, theta) = z.to_polar();
        (0..dim)
            .map(|n| {
                let ln_mod = n as f64 * r.ln() - 0.5 * (ln_norm + lf[n]);
                Complex64::from_polar(ln_mod.exp(), n as f64 * theta)
            })
            .collect()
    };
    Ok(CoherentState { z, coeffs, tail })
}

/// Expectation with its truncation error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerSymbol {
    pub value: Complex64,
    /// Tail mass times the Frobenius norm of the truncated operator.
    pub error_bound: f64,
}

/// `⟨v_z, A v_z⟩` with the truncated state of `A`'s dimension.
pub fn lower_symbol<S: Factorials + ?Sized>(
    a: &OperatorMatrix,
    seq: &S,
    z: Complex64,
    tol: f64,
) -> Result<LowerSymbol> {
    let v = coherent_state(seq, z, a.dim(), tol)?;
    let av = a.apply(&v.coeffs);
    let value = v.coeffs.iter().zip(&av).map(|(c, w)| c.conj() * w).sum();
    Ok(LowerSymbol {
        value,
        error_bound: 2.0 * v.tail.sqrt() * a.frobenius(),
    })
}

/// Product of dispersions and the bounds set by the jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Uncertainty {
    /// `ΔQ ΔP` from second moments.
    pub product: f64,
    /// `½⟨x_{N+1} − x_N⟩`, the same quantity from the commutator.
    pub via_commutator: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

pub fn uncertainty_product<S: Factorials + ?Sized>(
    seq: &S,
    z: Complex64,
    dim: usize,
    tol: f64,
) -> Result<Uncertainty> {
    let v = coherent_state(seq, z, dim, tol)?;
    // one extra basis vector so that Q v and P v are exact for the truncated v
    let (q, p) = position_momentum(seq, dim + 1)?;
    let mut padded = v.coeffs.clone();
    padded.push(Complex64::new(0.0, 0.0));
    let dispersion = |op: &OperatorMatrix| {
        let w = op.apply(&padded);
        let mean: f64 = padded.iter().zip(&w).map(|(c, x)| (c.conj() * x).re).sum();
        let second: f64 = w.iter().map(|x| x.norm_sqr()).sum();
        (second - mean * mean).max(0.0).sqrt()
    };
    let product = dispersion(&q) * dispersion(&p);

    let x = seq.prefix(dim + 1)?.values()[..=dim].to_vec();
    let jumps: Vec<f64> = (0..dim).map(|n| x[n + 1] - x[n]).collect();
    let via_commutator = 0.5
        * v.probabilities()
            .iter()
            .zip(&jumps)
            .map(|(w, j)| w * j)
            .sum::<f64>();
    let lo = jumps.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = jumps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(Uncertainty {
        product,
        via_commutator,
        lower_bound: 0.5 * lo,
        upper_bound: 0.5 * hi,
    })
}

/// Diagonal of `∫ |ṽ_z⟩⟨ṽ_z| ν(|z|²) d²z/π`, i.e. `𝓘(n)/(μ₀ x̃_n!)`, with the
/// integrals recomputed at `tol`. The angular integral kills the off-diagonal.
pub fn resolution_check(ren: &RenormalizedSequence, dim: usize, tol: f64) -> Result<Vec<f64>> {
    if dim > ren.n_max() + 1 {
        return Err(Error::Truncation {
            dim: ren.n_max() + 1,
            suggested: dim,
        });
    }
    let lf = ren.prefix(dim)?.log_factorials().to_vec();
    let ln_mu0 = ren.mu0().ln();
    (0..dim)
        .into_par_iter()
        .map(|n| {
            let r = radial_integral(
                ren.base(),
                n as f64,
                |_| 1.0,
                (0.0, 0.0),
                tol,
                DEFAULT_BUDGET,
            )?;
            Ok((r.ln_scale + r.value.ln() - ln_mu0 - lf[n]).exp())
        })
        .collect()
}

/// The same diagonal for the states of the base sequence under the measure
/// `1/(μ₀𝒩)`: `μ_n/μ₀`, which is not 1 in general.
pub fn resolution_check_base(ren: &RenormalizedSequence, dim: usize) -> Result<Vec<f64>> {
    if dim > ren.n_max() + 1 {
        return Err(Error::Truncation {
            dim: ren.n_max() + 1,
            suggested: dim,
        });
    }
    let m = ren.moments();
    Ok((0..dim).map(|n| m.mu[n] / m.mu[0]).collect())
}

/// A function on the plane given by its angular Fourier coefficients
/// `c_k(u) = (1/2π)∫ e^{−ikθ} f(√u e^{iθ}) dθ`, written as
/// `c_k(u) = u^{radial_power(k)} g_k(u)` with `|g_k(u)| ≤ C u^p`.
pub trait RadialSymbol: Sync {
    /// Harmonics k with nonzero `c_k`, or `None` if all may be nonzero.
    fn harmonics(&self) -> Option<Vec<i64>>;

    /// Power of u pulled out of `c_k`.
    fn radial_power(&self, _k: i64) -> f64 {
        0.0
    }

    /// `g_k(u)`.
    fn coefficient(&self, k: i64, u: f64) -> Complex64;

    /// `(ln C, p)` with `|g_k(u)| ≤ C u^p`.
    fn growth(&self, k: i64) -> (f64, f64);
}

/// The polynomial symbols `1, z, z̄, |z|², q, p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monomial {
    One,
    Z,
    ZBar,
    ZZBar,
    Q,
    P,
}

impl RadialSymbol for Monomial {
    fn harmonics(&self) -> Option<Vec<i64>> {
        Some(match self {
            Monomial::One | Monomial::ZZBar => vec![0],
            Monomial::Z => vec![1],
            Monomial::ZBar => vec![-1],
            Monomial::Q | Monomial::P => vec![-1, 1],
        })
    }

    fn radial_power(&self, _k: i64) -> f64 {
        match self {
            Monomial::One => 0.0,
            Monomial::ZZBar => 1.0,
            _ => 0.5,
        }
    }

    fn coefficient(&self, k: i64, _u: f64) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match (self, k) {
            (Monomial::Q, _) => Complex64::new(s, 0.0),
            // p = (z − z̄)/(i√2)
            (Monomial::P, 1) => Complex64::new(0.0, -s),
            (Monomial::P, _) => Complex64::new(0.0, s),
            _ => Complex64::new(1.0, 0.0),
        }
    }

    fn growth(&self, _k: i64) -> (f64, f64) {
        (0.0, 0.0)
    }
}

/// A caller-supplied symbol from a closure `(k, u) ↦ c_k(u)`.
pub struct FourierSymbol<F> {
    pub coefficient: F,
    pub harmonics: Option<Vec<i64>>,
    /// `(ln C, p)` with `|c_k(u)| ≤ C u^p` for every k.
    pub growth: (f64, f64),
}

impl<F: Fn(i64, f64) -> Complex64 + Sync> RadialSymbol for FourierSymbol<F> {
    fn harmonics(&self) -> Option<Vec<i64>> {
        self.harmonics.clone()
    }

    fn coefficient(&self, k: i64, u: f64) -> Complex64 {
        (self.coefficient)(k, u)
    }

    fn growth(&self, _k: i64) -> (f64, f64) {
        self.growth
    }
}

/// `(A_f)_{nn′} = [x̃_n! x̃_{n′}!]^{−1/2} ∫₀^∞ u^{(n+n′)/2} c_{n′−n}(u) du/(μ₀𝒩(u))`.
pub fn quantize_radial(
    ren: &RenormalizedSequence,
    symbol: &dyn RadialSymbol,
    dim: usize,
    tol: f64,
) -> Result<OperatorMatrix> {
    if dim == 0 || dim > ren.n_max() {
        return Err(Error::Truncation {
            dim: ren.n_max(),
            suggested: dim.max(1),
        });
    }
    let lf = ren.prefix(dim)?.log_factorials().to_vec();
    let ln_mu0 = ren.mu0().ln();
    let harmonics = symbol.harmonics();
    let pairs: Vec<(usize, usize)> = (0..dim)
        .flat_map(|n| (0..dim).map(move |m| (n, m)))
        .filter(|&(n, m)| {
            harmonics
                .as_ref()
                .is_none_or(|h| h.contains(&(m as i64 - n as i64)))
        })
        .collect();
    let values: Vec<Complex64> = pairs
        .par_iter()
        .map(|&(n, m)| {
            let k = m as i64 - n as i64;
            let power = 0.5 * (n + m) as f64 + symbol.radial_power(k);
            let r = radial_integral(
                ren.base(),
                power,
                |u| symbol.coefficient(k, u),
                symbol.growth(k),
                tol,
                DEFAULT_BUDGET,
            )?;
            let v = r.value * (r.ln_scale - ln_mu0 - 0.5 * (lf[n] + lf[m])).exp();
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Divergence {
                    what: "quantized matrix entry",
                    detail: format!("entry ({n}, {m}) is not finite"),
                });
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let mut e = vec![Complex64::new(0.0, 0.0); dim * dim];
    for ((n, m), v) in pairs.into_iter().zip(values) {
        e[n * dim + m] = v;
    }
    Ok(OperatorMatrix::from_dense(dim, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::mu_sequence;
    use crate::renorm::renormalize;
    use crate::sequence::{make_sequence, DeloneSequence, SequenceSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn shifted(n_max: usize) -> RenormalizedSequence {
        let s = make_sequence(SequenceSpec::ConstantShift { epsilon: 0.1 }).unwrap();
        renormalize(&s, mu_sequence(&s, n_max, 1e-12).unwrap())
    }

    #[test]
    fn oscillator_ladder() {
        let s = DeloneSequence::naturals();
        let (a, ad) = ladder_matrices(&s, 3).unwrap();
        assert_eq!(a.storage(), Storage::Tridiagonal);
        assert_eq!(a.get(0, 1), c(1.0, 0.0));
        assert!((a.get(1, 2).re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(ad, a.adjoint());
        assert!(ladder_matrices(&s, 1).is_err());
    }

    #[test]
    fn number_operator_and_commutator() {
        let ren = shifted(40);
        let dim = 20;
        let (a, ad) = ladder_matrices(&ren, dim).unwrap();
        let num = ad.matmul(&a);
        assert_eq!(num.storage(), Storage::Diagonal);
        for n in 0..dim {
            assert!((num.get(n, n).re - ren.value(n)).abs() < 1e-12 * ren.value(n).max(1.0));
        }
        let jumps: Vec<f64> = (0..dim).map(|n| ren.value(n + 1) - ren.value(n)).collect();
        let diff = a
            .commutator(&ad)
            .sub(&OperatorMatrix::from_diagonal(&jumps));
        assert!(diff.max_abs_leading(dim - 1) < 1e-12);
    }

    #[test]
    fn position_momentum_commutator() {
        let ren = shifted(40);
        let (q, p) = position_momentum(&ren, 12).unwrap();
        assert!(q.is_hermitian() && p.is_hermitian());
        let comm = q.commutator(&p);
        for n in 0..11 {
            let want = ren.value(n + 1) - ren.value(n);
            assert!((comm.get(n, n) - c(0.0, want)).norm() < 1e-12);
        }
        let s = DeloneSequence::naturals();
        let (q, _) = position_momentum(&s, 5).unwrap();
        assert!((q.get(2, 3).re - 1.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn coherent_state_basics() {
        let s = DeloneSequence::naturals();
        let v0 = coherent_state(&s, c(0.0, 0.0), 4, 1e-12).unwrap();
        assert_eq!(
            v0.coeffs,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );
        let z = c(1.2, -0.7);
        let dim = auto_dim(&s, z.norm(), 1e-12).unwrap();
        assert!(dim >= MIN_DIM);
        let v = coherent_state(&s, z, dim, 1e-12).unwrap();
        let mut fact = 1.0;
        for n in 0..dim {
            if n > 0 {
                fact *= n as f64;
            }
            let want = (-0.5 * z.norm_sqr()).exp() * z.powu(n as u32) / fact.sqrt();
            assert!((v.coeffs[n] - want).norm() < 1e-14);
        }
        assert!((v.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(matches!(
            coherent_state(&s, c(4.0, 0.0), 10, 1e-12),
            Err(Error::Truncation { dim: 10, .. })
        ));
    }

    #[test]
    fn lower_symbols_for_naturals() {
        let s = DeloneSequence::naturals();
        let z = c(0.8, -1.1);
        let dim = auto_dim(&s, z.norm(), 1e-14).unwrap();
        let (q, p) = position_momentum(&s, dim).unwrap();
        let lq = lower_symbol(&q, &s, z, 1e-14).unwrap().value;
        let lp = lower_symbol(&p, &s, z, 1e-14).unwrap().value;
        assert!((lq.re - 2f64.sqrt() * z.re).abs() < 1e-8 && lq.im.abs() < 1e-12);
        assert!((lp.re - 2f64.sqrt() * z.im).abs() < 1e-8);
        let shifted_num =
            OperatorMatrix::from_diagonal(&(1..=dim).map(|n| n as f64).collect::<Vec<_>>());
        let l = lower_symbol(&shifted_num, &s, z, 1e-14).unwrap();
        assert!((l.value.re - (z.norm_sqr() + 1.0)).abs() < 1e-8);
    }

    #[test]
    fn uncertainty_naturals_and_bounds() {
        let s = DeloneSequence::naturals();
        for z in [c(0.0, 0.0), c(2.0, 1.0), c(-0.3, 2.5)] {
            let dim = auto_dim(&s, z.norm(), 1e-12).unwrap();
            let u = uncertainty_product(&s, z, dim, 1e-12).unwrap();
            assert!((u.product - 0.5).abs() < 1e-9, "{z} {}", u.product);
        }
        let ren = shifted(80);
        let z = c(1.5, 0.5);
        let dim = auto_dim(&ren, z.norm(), 1e-12).unwrap();
        let u = uncertainty_product(&ren, z, dim, 1e-12).unwrap();
        assert!((u.product - u.via_commutator).abs() < 1e-8);
        assert!(u.lower_bound <= u.product && u.product <= u.upper_bound);
    }

    #[test]
    fn resolution_of_identity() {
        let ren = shifted(30);
        for d in resolution_check(&ren, 31, 1e-12).unwrap() {
            assert!((d - 1.0).abs() < 1e-6);
        }
        let base = resolution_check_base(&ren, 10).unwrap();
        assert!((base[1] - 1.0).abs() > 1e-3);
    }

    #[test]
    fn quantized_monomials() {
        let tol = 1e-12;
        let ren = shifted(30);
        let dim = 12;
        let one = quantize_radial(&ren, &Monomial::One, dim, tol).unwrap();
        assert!(one.sub(&OperatorMatrix::identity(dim)).max_abs() < 10.0 * tol);
        let (a, ad) = ladder_matrices(&ren, dim).unwrap();
        let az = quantize_radial(&ren, &Monomial::Z, dim, tol).unwrap();
        assert!(az.sub(&a).max_abs() < 10.0 * tol);
        let azb = quantize_radial(&ren, &Monomial::ZBar, dim, tol).unwrap();
        assert!(azb.sub(&ad).max_abs() < 10.0 * tol);
        let azz = quantize_radial(&ren, &Monomial::ZZBar, dim, tol).unwrap();
        let want: Vec<f64> = (0..dim).map(|n| ren.value(n + 1)).collect();
        assert!(
            azz.sub(&OperatorMatrix::from_diagonal(&want)).max_abs() < 10.0 * tol * ren.value(dim)
        );
        let (q, _) = position_momentum(&ren, dim).unwrap();
        let aq = quantize_radial(&ren, &Monomial::Q, dim, tol).unwrap();
        assert!(aq.sub(&q).max_abs() < 10.0 * tol);
    }

    #[test]
    fn closure_symbol_matches_builtin() {
        let ren = shifted(20);
        let f = FourierSymbol {
            coefficient: |k: i64, u: f64| if k == 0 { c(u, 0.0) } else { c(0.0, 0.0) },
            harmonics: None,
            growth: (0.0, 1.0),
        };
        let m = quantize_radial(&ren, &f, 6, 1e-11).unwrap();
        let b = quantize_radial(&ren, &Monomial::ZZBar, 6, 1e-11).unwrap();
        assert!(m.sub(&b).max_abs() < 1e-8);
        assert_eq!(m.storage(), Storage::Diagonal);
    }
}
