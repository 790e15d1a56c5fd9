//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#![allow(clippy::needless_range_loop)]

use std::f64::consts::SQRT_2;
use std::time::Instant;

use delone::moments::PropConditionOptions;
use delone::quad::{integrate, QuadConfig};
use delone::*;
use num_complex::Complex64;
use rand::{rngs::StdRng, Rng, SeedableRng};

type Outcome = std::result::Result<Vec<String>, String>;

struct Check {
    notes: Vec<String>,
    failures: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check {
            notes: Vec::new(),
            failures: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, what: String) {
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn finish(self) -> Outcome {
        if self.failures.is_empty() {
            Ok(self.notes)
        } else {
            Err(self.failures.join("; "))
        }
    }
}

fn shift(epsilon: f64) -> DeloneSequence {
    make_sequence(SequenceSpec::ConstantShift { epsilon }).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut c = Check::new();
    let s = DeloneSequence::naturals();
    let worst_series = (0..=500)
        .map(|i| i as f64 * 0.1)
        .map(|t| (exp_series(&s, t, 1e-15).unwrap().value() - t.exp()).abs() / t.exp())
        .fold(0.0, f64::max);
    c.expect(
        worst_series < 1e-10,
        format!("max rel err of 𝒩(t) vs e^t on [0, 50]: {worst_series:.2e}"),
    );

    let table = mu_sequence(&s, 110, 1e-12).map_err(|e| e.to_string())?;
    let worst_mu = table.mu[..=100]
        .iter()
        .map(|m| (m - 1.0).abs())
        .fold(0.0, f64::max);
    c.expect(
        worst_mu < 1e-9,
        format!("max |μ_n − 1| for n ≤ 100: {worst_mu:.2e}"),
    );

    let ren = renormalize(&s, table);
    let worst_x = (0..=100)
        .map(|n| (ren.value(n) - n as f64).abs())
        .fold(0.0, f64::max);
    c.expect(worst_x < 1e-8, format!("max |x̃_n − n|: {worst_x:.2e}"));

    let diag = resolution_check(&ren, 60, 1e-12).map_err(|e| e.to_string())?;
    let worst_res = diag.iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max);
    c.expect(
        worst_res < 1e-8,
        format!("max |𝔽_n − 1| for n < 60: {worst_res:.2e}"),
    );

    let mut rng = StdRng::seed_from_u64(20_240_601);
    let mut worst_u: f64 = 0.0;
    for _ in 0..20 {
        let r = 3.0 * rng.gen::<f64>().sqrt();
        let z = Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU));
        let dim = quantize::auto_dim(&ren, z.norm(), 1e-12).map_err(|e| e.to_string())?;
        let u = uncertainty_product(&ren, z, dim, 1e-12).map_err(|e| e.to_string())?;
        worst_u = worst_u.max((u.product - 0.5).abs());
    }
    c.expect(
        worst_u < 1e-8,
        format!("max |ΔQΔP − 1/2| at 20 random z: {worst_u:.2e}"),
    );
    let secs = start.elapsed().as_secs_f64();
    c.expect(secs < 30.0, format!("runtime {secs:.1} s"));
    c.finish()
}

fn criterion_2() -> Outcome {
    let mut c = Check::new();
    let eps = 0.1;
    let s = shift(eps);
    let table = mu_sequence(&s, 20, 1e-13).map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    for n in 8..=20 {
        let dev = table.mu[n] - 1.0;
        let model = asymptotic_mu(AsymptoticModel::ConstantShift(eps), n) - 1.0;
        let rel = (dev - model).abs() / dev.abs();
        if rel > 0.05 {
            bad.push(format!("n={n}: rel {rel:.3}"));
        }
    }
    c.expect(
        bad.is_empty(),
        format!(
            "asymptote within 5% of |μ_n − 1| for n ∈ [8, 20]; misses: [{}]",
            bad.join(", ")
        ),
    );
    let d10 = (table.mu[10] - 1.0).abs();
    c.expect(d10 < 1e-3, format!("|μ_10 − 1| = {d10:.2e}"));

    let gap = renormalization_gap(eps, 14, 1e-12).map_err(|e| e.to_string())?;
    let values = gap.column(1);
    c.expect(
        values.len() == 15,
        format!("{} rows for n = 0..14", values.len()),
    );
    // after the last sign change the magnitudes must shrink monotonically towards 0
    let cross = (1..values.len())
        .rfind(|&i| values[i] * values[i - 1] < 0.0)
        .unwrap_or(1);
    let decaying = values[cross..].windows(2).all(|w| w[1].abs() < w[0].abs());
    let last = values.last().copied().unwrap_or(f64::NAN);
    c.expect(
        decaying && last.abs() < 1e-3,
        format!("x_n − x̃_n decays after the crossover at n = {cross} (x_14 − x̃_14 = {last:.2e})"),
    );
    c.finish()
}

fn criterion_3() -> Outcome {
    let mut c = Check::new();
    for eps in [0.1, 0.5] {
        let s = shift(eps);
        let g1 = gamma(1.0 + eps).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..=1000 {
            let t = 0.1 * (1000f64).powf(i as f64 / 1000.0);
            let ln_closed =
                t - eps * t.ln() + (g1 - eps * upper_incomplete_gamma(eps, t).unwrap()).ln();
            let ln_series = exp_series(&s, t, 1e-15).unwrap().value_ln;
            worst = worst.max((ln_series - ln_closed).exp_m1().abs());
        }
        c.expect(
            worst < 1e-8,
            format!("ε = {eps}: series vs closed form on [0.1, 100], max rel {worst:.2e}"),
        );

        let w = SolvedMeasure::new(eps).unwrap();
        let mut worst_m: f64 = 0.0;
        for n in 0..=20 {
            let f = |t: f64| t.powi(n) * w.weight(t).unwrap();
            let cfg = QuadConfig::new(1e-14).with_budget(4000);
            let cut = n as f64 + 200.0;
            let total = integrate(f, 0.0, 1.0, 4, cfg).unwrap().value
                + integrate(f, 1.0, cut, 64, cfg).unwrap().value;
            let want = s.log_factorial(n as usize).unwrap().exp();
            worst_m = worst_m.max((total - want).abs() / want);
        }
        c.expect(
            worst_m < 1e-8,
            format!("ε = {eps}: ∫tⁿw = x_n! for n ≤ 20, max rel {worst_m:.2e}"),
        );
    }
    c.finish()
}

fn criterion_4() -> Outcome {
    let mut c = Check::new();
    let eps = 0.04;
    let s = make_sequence(SequenceSpec::inverse_square(eps)).unwrap();
    let p = PfqParams::new(vec![1.0, 1.0], vec![1.0 - eps.sqrt(), 1.0 + eps.sqrt()]).unwrap();
    let mut worst: f64 = 0.0;
    for t in [0.01, 0.5, 1.0, 5.0, 20.0, 60.0, 150.0, 400.0] {
        let (_, ln_p) = pfq_ln(&p, t, 1e-16).unwrap();
        worst = worst.max(
            (exp_series(&s, t, 1e-15).unwrap().value_ln - ln_p)
                .exp_m1()
                .abs(),
        );
    }
    c.expect(worst < 1e-8, format!("𝒩 vs ₂F₂ max rel {worst:.2e}"));
    let table = mu_sequence(&s, 200, 1e-12).map_err(|e| e.to_string())?;
    let worst_a = (100..=200)
        .map(|n| ((n * n) as f64 * (table.mu[n] - 1.0) - eps).abs() / eps)
        .fold(0.0, f64::max);
    c.expect(
        worst_a < 0.1,
        format!(
            "n²(μ_n − 1) within {:.1}% of ε on [100, 200]",
            100.0 * worst_a
        ),
    );
    c.finish()
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut c = Check::new();
    let eps = 0.1;
    let data = oscillating_moments(eps, 300, 1e-8).map_err(|e| e.to_string())?;
    let dev: Vec<f64> = data.column(1).iter().map(|m| (m - 1.0).abs()).collect();
    // dev[i] belongs to n = i + 1
    let mut ratios = Vec::new();
    for i in 1..dev.len() - 1 {
        let n = i + 1;
        if n >= 50 && dev[i] > dev[i - 1] && dev[i] > dev[i + 1] {
            ratios.push((n, dev[i] / (eps / n as f64)));
        }
    }
    let worst = ratios
        .iter()
        .map(|(_, r)| (r - 1.0).abs())
        .fold(0.0, f64::max);
    let sample: Vec<String> = ratios
        .iter()
        .take(4)
        .map(|(n, r)| format!("n={n}: {r:.3}"))
        .collect();
    c.expect(
        !ratios.is_empty() && worst <= 0.2,
        format!(
            "{} local maxima of |μ_n − 1| for n ≥ 50; ratio to ε/n off by up to {:.0}% (first: {})",
            ratios.len(),
            100.0 * worst,
            sample.join(", ")
        ),
    );
    let secs = start.elapsed().as_secs_f64();
    c.expect(secs < 600.0, format!("runtime {secs:.1} s"));
    c.finish()
}

fn criterion_6() -> Outcome {
    let mut c = Check::new();
    let eps = 0.5;
    let grid: Vec<f64> = [1e-8, 1e-6, 1e-4, 1e-2]
        .into_iter()
        .chain(uniform_grid(30.0, 0.25))
        .collect();
    let mut grid = grid;
    grid.sort_by(f64::total_cmp);
    let rows = compare_measures(eps, &grid, 1e-12).map_err(|e| e.to_string())?;
    let s = shift(eps);
    let mu0 = mu_sequence(&s, 0, 1e-12).unwrap().mu[0];
    let near0 = rows.iter().find(|r| r.t == 1e-8).expect("grid holds 1e-8");
    let at0 = rows.iter().find(|r| r.t == 0.0).expect("grid holds 0");
    let at30 = rows.last().expect("grid nonempty");
    c.expect(
        (near0.solved - (1.0 - eps)).abs() < 1e-3,
        format!(
            "solved density at t = 1e−8: {:.4e} (target 1 − ε = {})",
            near0.solved,
            1.0 - eps
        ),
    );
    c.expect(
        (at30.solved - 1.0).abs() < 1e-3,
        format!("solved density at t = 30: {:.6}", at30.solved),
    );
    c.expect(
        (at0.nu - 1.0 / mu0).abs() < 1e-3,
        format!("ν(0) = {:.6}, 1/μ₀ = {:.6}", at0.nu, 1.0 / mu0),
    );
    c.expect(
        (at30.nu - 1.0 / mu0).abs() < 1e-3,
        format!("ν(30) = {:.6} vs 1/μ₀ = {:.6}", at30.nu, 1.0 / mu0),
    );
    let positive = rows
        .iter()
        .all(|r| r.nu > 0.0 && r.solved >= 0.0 && r.t.is_finite());
    let strictly = rows
        .iter()
        .filter(|r| r.t > 0.0)
        .all(|r| r.solved > 0.0 && r.nu > 0.0);
    c.expect(
        positive && strictly,
        "both densities positive on (0, 30]".to_string(),
    );
    c.finish()
}

fn criterion_7() -> Outcome {
    let mut c = Check::new();
    let s = shift(0.1);
    let ren = renormalize(&s, mu_sequence(&s, 40, 1e-12).map_err(|e| e.to_string())?);
    let polys = monic_polys(&ren, 25).unwrap();
    let mut worst_cp: f64 = 0.0;
    for n in 1..=25 {
        let cp = characteristic_polynomial(&truncated_position(&ren, n).unwrap()).unwrap();
        let scale = polys.growth(n);
        for (a, b) in cp.iter().zip(&polys.coeffs[n]) {
            worst_cp = worst_cp.max((a - b).abs() / scale);
        }
    }
    c.expect(
        worst_cp < 1e-9,
        format!("char poly vs recursion, max rel {worst_cp:.2e}"),
    );

    let mut worst_root: f64 = 0.0;
    for n in 1..=25 {
        let e = spectrum(&ren, n).unwrap().eigenvalues;
        let r = roots_by_bisection(&ren, n).unwrap();
        worst_root = worst_root.max(
            e.iter()
                .zip(&r)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        );
    }
    c.expect(
        worst_root < 1e-8,
        format!("eigenvalues vs bisection roots, max {worst_root:.2e}"),
    );

    // monic Hermite He_{n+1} = x He_n − n He_{n−1}; q_n(λ) = 2^{−n/2} He_n(√2 λ)
    let nat = monic_polys(&DeloneSequence::naturals(), 25).unwrap();
    let mut he: Vec<Vec<f64>> = vec![vec![1.0], vec![0.0, 1.0]];
    for n in 1..25 {
        let mut next = vec![0.0; n + 2];
        for (k, a) in he[n].iter().enumerate() {
            next[k + 1] += a;
        }
        for (k, a) in he[n - 1].iter().enumerate() {
            next[k] -= n as f64 * a;
        }
        he.push(next);
    }
    let mut worst_h: f64 = 0.0;
    for n in 0..=25 {
        for k in 0..=n {
            let want = he[n][k] * 2f64.powf((k as f64 - n as f64) / 2.0);
            worst_h = worst_h.max((nat.coeffs[n][k] - want).abs() / want.abs().max(1.0));
        }
    }
    c.expect(
        worst_h < 1e-12,
        format!("naturals vs rescaled Hermite, max rel {worst_h:.2e}"),
    );

    let gram = gauss_gram(&ren, 22, 20).unwrap();
    let mut worst_g: f64 = 0.0;
    for (n, row) in gram.iter().enumerate() {
        for (m, v) in row.iter().enumerate() {
            worst_g = worst_g.max((v - if n == m { 1.0 } else { 0.0 }).abs());
        }
    }
    c.expect(
        worst_g < 1e-8,
        format!("Gauss-rule orthogonality for n, m ≤ 20, max dev {worst_g:.2e}"),
    );
    c.finish()
}

fn criterion_8() -> Outcome {
    let mut c = Check::new();
    let tol = 1e-11;
    let dim = 16;
    let cases = [
        ("constant shift ε = 0.1", shift(0.1)),
        (
            "golden β-integers",
            beta_integers(BetaKind::Golden).unwrap(),
        ),
    ];
    for (label, s) in cases {
        let ren = renormalize(
            &s,
            mu_sequence(&s, dim + 4, tol).map_err(|e| e.to_string())?,
        );
        let (a, _) = ladder_matrices(&ren, dim).unwrap();
        let one = quantize_radial(&ren, &Monomial::One, dim, tol).map_err(|e| e.to_string())?;
        let az = quantize_radial(&ren, &Monomial::Z, dim, tol).map_err(|e| e.to_string())?;
        let azz = quantize_radial(&ren, &Monomial::ZZBar, dim, tol).map_err(|e| e.to_string())?;
        let d1 = one.sub(&OperatorMatrix::identity(dim)).max_abs();
        let dz = az.sub(&a).max_abs();
        let want: Vec<f64> = (0..dim).map(|n| ren.value(n + 1)).collect();
        let dzz = azz.sub(&OperatorMatrix::from_diagonal(&want)).max_abs();
        c.expect(
            d1 < 10.0 * tol && dz < 10.0 * tol && dzz < 10.0 * tol,
            format!("{label}: |Ã₁ − I| {d1:.1e}, |Ã_z − ã| {dz:.1e}, |Ã_zz̄ − x̃_{{N+1}}| {dzz:.1e}"),
        );
    }
    c.finish()
}

fn criterion_9() -> Outcome {
    let mut c = Check::new();
    let s = make_sequence(SequenceSpec::Homographic {
        a: 0.1,
        b: 0.0,
        c: 1.0,
        d: 2.2,
    })
    .unwrap();
    let model = GhaModel::new(&s).map_err(|e| e.to_string())?;
    let err = max_recurrence_error(&model, 1000).map_err(|e| e.to_string())?;
    c.expect(
        err < 1e-10,
        format!("max |h(x_n) − x_{{n+1}}| for n ≤ 1000: {err:.2e}"),
    );
    let data = gha_dataset(0.1, 1.0, 2.2, 100).map_err(|e| e.to_string())?;
    let ordered = data.rows[1..]
        .iter()
        .all(|r| r[2] < 0.0 && 0.0 < r[3] && r[3] < r[1]);
    let mirrored = data.rows[1..].iter().all(|r| (r[1] + r[2]).abs() < 1e-12);
    c.expect(
        ordered && mirrored,
        "γ = −α < 0 < δ < α for 1 ≤ n ≤ 100".to_string(),
    );
    c.finish()
}

fn criterion_10() -> Outcome {
    let mut c = Check::new();
    let cases = [
        (
            "fractional periodic (λ = 0.2, μ = √2, ν = 0)",
            make_sequence(SequenceSpec::FractionalPeriodic {
                lambda: 0.2,
                mu: SQRT_2,
                nu: 0.0,
            })
            .unwrap(),
        ),
        (
            "golden β-integers",
            beta_integers(BetaKind::Golden).unwrap(),
        ),
    ];
    for (label, s) in cases {
        let table = mu_sequence(&s, 200, 1e-10).map_err(|e| e.to_string())?;
        let window = &table.mu[100..=200];
        let (lo, hi) = window
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), m| {
                (l.min(*m), h.max(*m))
            });
        c.expect(
            lo >= 0.98 && hi <= 1.02,
            format!("{label}: μ_m ∈ [{lo:.5}, {hi:.5}] on [100, 200]"),
        );
        // least-squares slope of |μ_m − 1| against m
        let pts: Vec<(f64, f64)> = (100..=200)
            .map(|m| (m as f64, (table.mu[m] - 1.0).abs()))
            .collect();
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        c.expect(
            slope < 0.0,
            format!("{label}: slope of |μ_m − 1| = {slope:.3e}"),
        );
        let report = check_prop_conditions(
            &s,
            &uniform_grid(400.0, 0.37),
            PropConditionOptions::default(),
        );
        if let Ok(r) = report {
            c.notes.push(format!(
                "{label}: sup|α′| = {:.3}, sup x|α″| = {:.3}",
                r.max_abs_first, r.max_x_abs_second
            ));
        }
    }
    c.finish()
}

fn criterion_11() -> Outcome {
    let mut c = Check::new();
    let mut worst: f64 = 0.0;
    for n in 1..=60 {
        let db = DeformedBinomial::new(1.0, 0.1, n, 0.3).map_err(|e| e.to_string())?;
        let t = db.table(1e-13).map_err(|e| e.to_string())?;
        let sum: f64 = t.pmf.iter().sum();
        if t.pmf.iter().any(|p| *p < 0.0) {
            return Err(format!("negative probability at n = {n}"));
        }
        worst = worst.max((sum - 1.0).abs());
    }
    c.expect(
        worst < 1e-9,
        format!("max |Σ_k 𝔭_k − 1| for n ≤ 60: {worst:.2e}"),
    );
    let dists: Vec<f64> = [20, 40, 80]
        .iter()
        .map(|&n| {
            let db = DeformedBinomial::with_mean_parameter(1.0, 0.1, n, 2.0).unwrap();
            poisson_limit_distance(&db, 1e-13).unwrap()
        })
        .collect();
    c.expect(
        dists[0] > dists[1] && dists[1] > dists[2],
        format!(
            "sup-distance to the deformed Poisson law at n = 20, 40, 80: {:.3e}, {:.3e}, {:.3e}",
            dists[0], dists[1], dists[2]
        ),
    );
    c.finish()
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(notes) => println!("criterion {id}: PASS ({secs:.1} s) {}", notes.join("; ")),
            Err(why) => {
                failed += 1;
                println!("criterion {id}: FAIL ({secs:.1} s) {why}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
