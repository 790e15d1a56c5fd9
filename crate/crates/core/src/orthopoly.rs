//! Monic orthogonal polynomials of the position operator, its truncations,
//! their spectra and the polynomial generating function.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantize::{position_momentum, OperatorMatrix};
use crate::renorm::RenormalizedSequence;
use crate::sequence::Factorials;

/// Degree beyond which monomial coefficients lose too much precision to be
/// trusted for root finding.
pub const COEFF_DEGREE_LIMIT: usize = 60;

/// Off-diagonals `c_n = √(x_n/2)`, `n = 1..=n`; index 0 holds 0.
fn off_diagonals<S: Factorials + ?Sized>(seq: &S, n: usize) -> Result<Vec<f64>> {
    Ok(seq.prefix(n)?.values()[..=n]
        .iter()
        .map(|x| (0.5 * x).sqrt())
        .collect())
}

/// Coefficient table of `q_0 … q_{n_max}` in ascending powers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolySet {
    pub n_max: usize,
    pub coeffs: Vec<Vec<f64>>,
    /// `c_0 = 0, c_1, …, c_{n_max}`.
    pub c: Vec<f64>,
}

impl PolySet {
    /// `q_n(λ)` by the recursion rather than the coefficients.
    pub fn eval(&self, n: usize, lambda: f64) -> f64 {
        let (mut prev, mut cur) = (0.0, 1.0);
        for k in 0..n {
            let next = lambda * cur - self.c[k] * self.c[k] * prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// `p_n(λ) = q_n(λ)/(c_1 ⋯ c_n)`, via the orthonormal recursion.
    pub fn eval_normalized(&self, n: usize, lambda: f64) -> f64 {
        let (mut prev, mut cur) = (0.0, 1.0);
        for k in 0..n {
            let next = (lambda * cur - self.c[k] * prev) / self.c[k + 1];
            prev = cur;
            cur = next;
        }
        cur
    }

    /// Largest coefficient magnitude of row n, the conditioning monitor.
    pub fn growth(&self, n: usize) -> f64 {
        self.coeffs[n].iter().fold(0.0, |m, a| m.max(a.abs()))
    }
}

/// `q_{n+1}(λ) = λ q_n(λ) − c_n² q_{n−1}(λ)` with `q_0 = 1`, `q_1 = λ`.
pub fn monic_polys<S: Factorials + ?Sized>(seq: &S, n_max: usize) -> Result<PolySet> {
    if n_max == 0 {
        return Err(Error::domain("monic_polys", "n_max must be at least 1"));
    }
    if n_max > COEFF_DEGREE_LIMIT {
        log::warn!(
            "monomial coefficients beyond degree {COEFF_DEGREE_LIMIT} are poorly conditioned"
        );
    }
    let x = seq.prefix(n_max)?.values()[..=n_max].to_vec();
    let c = x.iter().map(|v| (0.5 * v).sqrt()).collect();
    let mut coeffs: Vec<Vec<f64>> = vec![vec![1.0], vec![0.0, 1.0]];
    for n in 1..n_max {
        let c2 = 0.5 * x[n];
        let mut next = vec![0.0; n + 2];
        for (k, a) in coeffs[n].iter().enumerate() {
            next[k + 1] += a;
        }
        for (k, a) in coeffs[n - 1].iter().enumerate() {
            next[k] -= c2 * a;
        }
        coeffs.push(next);
    }
    Ok(PolySet { n_max, coeffs, c })
}

/// Leading `n × n` block of the position operator: zero diagonal, off-diagonals `c_1 … c_{n−1}`.
pub fn truncated_position<S: Factorials + ?Sized>(seq: &S, n: usize) -> Result<OperatorMatrix> {
    match n {
        0 => Err(Error::domain("truncated_position", "n must be at least 1")),
        1 => Ok(OperatorMatrix::zeros(1)),
        _ => Ok(position_momentum(seq, n)?.0),
    }
}

/// `det(λI − T)` of a tridiagonal matrix, coefficients in ascending powers,
/// by expansion along the last row.
pub fn characteristic_polynomial(m: &OperatorMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            if i.abs_diff(j) > 1 && m.get(i, j) != Complex64::new(0.0, 0.0) {
                return Err(Error::Unsupported(
                    "characteristic polynomial of a non-tridiagonal matrix".into(),
                ));
            }
        }
    }
    let mut prev: Vec<f64> = vec![1.0];
    let mut cur: Vec<f64> = vec![-m.get(0, 0).re, 1.0];
    for k in 1..n {
        let d = m.get(k, k).re;
        let coupling = (m.get(k, k - 1) * m.get(k - 1, k)).re;
        let mut next = vec![0.0; k + 2];
        for (i, a) in cur.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= d * a;
        }
        for (i, a) in prev.iter().enumerate() {
            next[i] -= coupling * a;
        }
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Eigenvalues (ascending) and the first component of each unit eigenvector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub first_components: Vec<f64>,
}

const EIGEN_ITERATIONS: usize = 10_000;

/// Spectrum of the truncated position operator of size n.
pub fn spectrum<S: Factorials + ?Sized>(seq: &S, n: usize) -> Result<Spectrum> {
    if n == 0 {
        return Err(Error::domain("spectrum", "n must be at least 1"));
    }
    let c = off_diagonals(seq, n)?;
    let mut t = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        t[(k - 1, k)] = c[k];
        t[(k, k - 1)] = c[k];
    }
    let eig = SymmetricEigen::try_new(t, f64::EPSILON, EIGEN_ITERATIONS).ok_or_else(|| {
        Error::NonConvergence {
            what: "tridiagonal eigensolver",
            detail: format!("no convergence for n = {n} within {EIGEN_ITERATIONS} sweeps"),
        }
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    Ok(Spectrum {
        eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        first_components: order.iter().map(|&i| eig.eigenvectors[(0, i)]).collect(),
    })
}

/// Nodes and weights of the n-point Gauss rule of the position operator.
pub fn gauss_rule<S: Factorials + ?Sized>(seq: &S, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let s = spectrum(seq, n)?;
    let w = s.first_components.iter().map(|v| v * v).collect();
    Ok((s.eigenvalues, w))
}

/// Roots of `q_n` by Sturm-count bisection, independent of the eigensolver.
pub fn roots_by_bisection<S: Factorials + ?Sized>(seq: &S, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::domain("roots_by_bisection", "n must be at least 1"));
    }
    let c = off_diagonals(seq, n)?;
    // number of eigenvalues below λ, from the pivots of T − λI
    let count_below = |lambda: f64| {
        let mut count = 0;
        let mut d = -lambda;
        for k in 0..n {
            if k > 0 {
                let pivot = if d == 0.0 {
                    f64::EPSILON * (1.0 + lambda.abs())
                } else {
                    d
                };
                d = -lambda - c[k] * c[k] / pivot;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let radius = 2.0 * c.iter().fold(0.0f64, |m, v| m.max(*v)) + 1.0;
    let mut roots = Vec::with_capacity(n);
    for k in 0..n {
        // k-th smallest: count_below(lo) ≤ k < count_below(hi)
        let (mut lo, mut hi) = (-radius, radius);
        while hi - lo > 1e-15 * (1.0 + lo.abs().max(hi.abs())) {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    Ok(roots)
}

/// `G(z, λ) = Σ_n 2^{n/2} zⁿ q_n(λ)/x_n!`, summed to `n_trunc` (exclusive).
/// The omitted terms are bounded through `|q_{n+1}| ≤ |λ||q_n| + c_n²|q_{n−1}|`
/// and must stay below `1e−12` relative to the sum.
pub fn generating_function<S: Factorials + ?Sized>(
    seq: &S,
    z: Complex64,
    lambda: f64,
    n_trunc: usize,
) -> Result<Complex64> {
    const TAIL: f64 = 1e-12;
    if n_trunc == 0 {
        return Err(Error::domain(
            "generating_function",
            "n_trunc must be positive",
        ));
    }
    let ok = |(sum, tail): (Complex64, f64)| tail <= TAIL * sum.norm().max(1.0);
    let first = generating_sum(seq, z, lambda, n_trunc)?;
    if ok(first) {
        return Ok(first.0);
    }
    let mut suggested = n_trunc;
    while !ok(generating_sum(seq, z, lambda, suggested)?) {
        suggested += suggested / 2 + 1;
    }
    Err(Error::Truncation {
        dim: n_trunc,
        suggested,
    })
}

/// Partial sum and a bound on the omitted terms.
fn generating_sum<S: Factorials + ?Sized>(
    seq: &S,
    z: Complex64,
    lambda: f64,
    n_trunc: usize,
) -> Result<(Complex64, f64)> {
    if z.norm() == 0.0 {
        return Ok((Complex64::new(1.0, 0.0), 0.0));
    }
    let ln_2z = (std::f64::consts::SQRT_2 * z.norm()).ln();
    let theta = z.arg();
    let mut sum = Complex64::new(0.0, 0.0);
    let (mut q_prev, mut q) = (0.0, 1.0);
    let (mut b_prev, mut b) = (0.0f64, 1.0f64);
    let mut tail = 0.0;
    let mut last_term = 0.0;
    let mut n = 0usize;
    loop {
        let prefix = seq.prefix(n + 1)?;
        let scale = (n as f64 * ln_2z - prefix.log_factorials()[n]).exp();
        if n < n_trunc {
            sum += Complex64::from_polar(scale * q, n as f64 * theta);
        } else {
            let term = scale * b;
            tail += term;
            if n > n_trunc {
                let ratio = term / last_term;
                // geometric remainder once the bound terms shrink fast enough
                if ratio < 0.5 || term == 0.0 {
                    tail += term * ratio / (1.0 - ratio);
                    return Ok((sum, tail));
                }
            }
            last_term = term;
            if n > n_trunc + 10_000 {
                return Err(Error::Divergence {
                    what: "generating function",
                    detail: "tail bound does not decay".into(),
                });
            }
        }
        let c2 = 0.5 * prefix.values()[n];
        let next_q = lambda * q - c2 * q_prev;
        let next_b = lambda.abs() * b + c2 * b_prev;
        q_prev = q;
        q = next_q;
        b_prev = b;
        b = next_b;
        n += 1;
    }
}

/// Eigen-decomposition of the renormalized position truncation; reordering
/// of the renormalized values is reported by [`RenormalizedSequence::reordered`].
pub fn renormalized_spectrum(ren: &RenormalizedSequence, n: usize) -> Result<Spectrum> {
    if ren.reordered() {
        log::warn!("spectrum built from reordered renormalized values");
    }
    spectrum(ren, n)
}

/// Unit eigenvectors are only needed through their first components here;
/// this helper exposes the whole Gram check for tests and the CLI.
pub fn gauss_gram<S: Factorials + ?Sized>(
    seq: &S,
    nodes: usize,
    degree: usize,
) -> Result<Vec<Vec<f64>>> {
    let polys = monic_polys(seq, degree.max(1))?;
    let (x, w) = gauss_rule(seq, nodes)?;
    let values: Vec<DVector<f64>> = (0..=degree)
        .map(|n| DVector::from_iterator(x.len(), x.iter().map(|l| polys.eval_normalized(n, *l))))
        .collect();
    let w = DVector::from_vec(w);
    Ok((0..=degree)
        .map(|n| {
            (0..=degree)
                .map(|m| values[n].component_mul(&values[m]).dot(&w))
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::mu_sequence;
    use crate::renorm::renormalize;
    use crate::sequence::{make_sequence, DeloneSequence, SequenceSpec};

    #[test]
    fn naturals_low_degrees() {
        let s = DeloneSequence::naturals();
        let p = monic_polys(&s, 3).unwrap();
        assert_eq!(p.coeffs[1], vec![0.0, 1.0]);
        assert_eq!(p.coeffs[2], vec![-0.5, 0.0, 1.0]);
        assert_eq!(p.coeffs[3], vec![0.0, -1.5, 0.0, 1.0]);
        assert!(monic_polys(&s, 0).is_err());
    }

    #[test]
    fn hermite_rescale() {
        // monic Hermite He_{n+1} = x He_n − n He_{n−1}, then q_n(λ) = 2^{−n/2} He_n(√2 λ)
        let s = DeloneSequence::naturals();
        let p = monic_polys(&s, 20).unwrap();
        let mut he: Vec<Vec<f64>> = vec![vec![1.0], vec![0.0, 1.0]];
        for n in 1..20 {
            let mut next = vec![0.0; n + 2];
            for (k, a) in he[n].iter().enumerate() {
                next[k + 1] += a;
            }
            for (k, a) in he[n - 1].iter().enumerate() {
                next[k] -= n as f64 * a;
            }
            he.push(next);
        }
        for n in 0..=20 {
            for k in 0..=n {
                let want = he[n][k] * 2f64.powf((k as f64 - n as f64) / 2.0);
                assert!(
                    (p.coeffs[n][k] - want).abs() <= 1e-12 * want.abs().max(1.0),
                    "n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn truncation_and_small_spectra() {
        let s = DeloneSequence::naturals();
        assert_eq!(
            truncated_position(&s, 1).unwrap().get(0, 0),
            Complex64::new(0.0, 0.0)
        );
        let t2 = truncated_position(&s, 2).unwrap();
        assert!((t2.get(0, 1).re - 0.5f64.sqrt()).abs() < 1e-15);
        let e2 = spectrum(&s, 2).unwrap().eigenvalues;
        assert!((e2[0] + 0.5f64.sqrt()).abs() < 1e-14 && (e2[1] - 0.5f64.sqrt()).abs() < 1e-14);
        let e3 = spectrum(&s, 3).unwrap().eigenvalues;
        let r = 1.5f64.sqrt();
        assert!((e3[0] + r).abs() < 1e-14 && e3[1].abs() < 1e-14 && (e3[2] - r).abs() < 1e-14);
    }

    #[test]
    fn char_poly_matches_recursion() {
        let s = make_sequence(SequenceSpec::Periodic {
            epsilon: 0.2,
            omega: 1.1,
        })
        .unwrap();
        let p = monic_polys(&s, 25).unwrap();
        for n in 1..=25 {
            let cp = characteristic_polynomial(&truncated_position(&s, n).unwrap()).unwrap();
            let scale = p.growth(n);
            for (a, b) in cp.iter().zip(&p.coeffs[n]) {
                assert!((a - b).abs() <= 1e-9 * scale, "n={n}");
            }
        }
    }

    #[test]
    fn eigenvalues_match_bisection_and_interlace() {
        let s = make_sequence(SequenceSpec::SineOverN {
            epsilon: 0.1,
            kappa: 2f64.sqrt(),
        })
        .unwrap();
        for n in [1, 2, 7, 16, 25] {
            let e = spectrum(&s, n).unwrap().eigenvalues;
            let r = roots_by_bisection(&s, n).unwrap();
            for (a, b) in e.iter().zip(&r) {
                assert!((a - b).abs() < 1e-8, "n={n}");
            }
            // zero diagonal: spectrum symmetric about 0
            for (a, b) in e.iter().zip(e.iter().rev()) {
                assert!((a + b).abs() < 1e-10);
            }
        }
        for n in 1..20 {
            let a = spectrum(&s, n).unwrap().eigenvalues;
            let b = spectrum(&s, n + 1).unwrap().eigenvalues;
            for k in 0..n {
                assert!(b[k] < a[k] && a[k] < b[k + 1]);
            }
        }
    }

    #[test]
    fn discrete_orthogonality() {
        let s = make_sequence(SequenceSpec::ConstantShift { epsilon: 0.1 }).unwrap();
        let ren = renormalize(&s, mu_sequence(&s, 40, 1e-12).unwrap());
        let g = gauss_gram(&ren, 22, 20).unwrap();
        for (n, row) in g.iter().enumerate() {
            for (m, v) in row.iter().enumerate() {
                let want = if n == m { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-8, "n={n} m={m} {v}");
            }
        }
    }

    #[test]
    fn generating_function_hermite() {
        let s = DeloneSequence::naturals();
        assert_eq!(
            generating_function(&s, Complex64::new(0.0, 0.0), 0.7, 5).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        let z = Complex64::new(0.6, 0.3);
        for lambda in [-1.0, 0.2, 1.5] {
            let g = generating_function(&s, z, lambda, 60).unwrap();
            let want = (z * (2f64.sqrt() * lambda) - z * z * 0.5).exp();
            assert!((g - want).norm() < 1e-12 * want.norm(), "λ={lambda}");
        }
        assert!(matches!(
            generating_function(&s, z, 0.5, 3),
            Err(Error::Truncation { dim: 3, .. })
        ));
    }

    #[test]
    fn generating_coefficients_recover_polys() {
        // Taylor coefficient of zⁿ is 2^{n/2} q_n(λ)/x_n!; recover it with a
        // discrete Cauchy integral on a small circle
        let s = make_sequence(SequenceSpec::ConstantShift { epsilon: 0.3 }).unwrap();
        let p = monic_polys(&s, 6).unwrap();
        let lambda = 0.4;
        let (m, rho) = (64, 0.5);
        for n in 0..=6 {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..m {
                let w =
                    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / m as f64);
                acc += generating_function(&s, w * rho, lambda, 80).unwrap() * w.powi(-(n as i32));
            }
            let coef = acc.re / (m as f64 * rho.powi(n as i32));
            let q = coef * s.log_factorial(n).unwrap().exp() / 2f64.powf(n as f64 / 2.0);
            assert!((q - p.eval(n, lambda)).abs() < 1e-10, "n={n}");
        }
    }
}
