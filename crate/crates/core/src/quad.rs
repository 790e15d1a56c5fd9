//! Adaptive Gauss–Kronrod (10/21-point) quadrature, plus a log-space driver
//! for integrals `∫₀^∞ u^p h(u) / 𝒩(u) du` whose integrand is a sharp hump.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_715_783_193_350,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_146,
];

/// Values that can be integrated: reals and complex numbers.
pub trait Integrand:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Tolerances and subdivision budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadConfig {
    pub fn new(tol: f64) -> Self {
        QuadConfig {
            abs_tol: tol,
            rel_tol: tol,
            max_subdivisions: 2000,
        }
    }

    pub fn with_budget(mut self, max_subdivisions: usize) -> Self {
        self.max_subdivisions = max_subdivisions;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_err: f64,
    pub evaluations: usize,
}

/// One 21-point Kronrod panel on [a, b]; returns (estimate, |K − G|).
pub fn gk21<T: Integrand>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[10];
    let mut gauss = T::zero();
    for j in 0..10 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kron = kron + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let k = kron * h;
    let g = gauss * h;
    (k, (k - g).magnitude())
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive integration over [a, b], starting from `initial`
/// equal panels and always bisecting the panel with the largest error.
pub fn integrate<T: Integrand>(
    f: impl Fn(f64) -> T,
    a: f64,
    b: f64,
    initial: usize,
    cfg: QuadConfig,
) -> Result<QuadResult<T>> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain(
            "integrate",
            format!("interval [{a}, {b}] must be finite"),
        ));
    }
    let pieces = initial.max(1);
    let mut heap = BinaryHeap::with_capacity(pieces + cfg.max_subdivisions + 1);
    let mut evaluations = 0;
    let width = (b - a) / pieces as f64;
    for i in 0..pieces {
        let pa = a + width * i as f64;
        let pb = if i + 1 == pieces { b } else { pa + width };
        let (value, err) = gk21(&f, pa, pb);
        evaluations += 21;
        heap.push(Panel {
            a: pa,
            b: pb,
            value,
            err,
        });
    }
    let mut splits = 0;
    loop {
        let (total, err) = heap
            .iter()
            .fold((T::zero(), 0.0), |(v, e), p| (v + p.value, e + p.err));
        let target = cfg.abs_tol.max(cfg.rel_tol * total.magnitude());
        if err <= target || !err.is_finite() && !total.magnitude().is_finite() {
            return Ok(QuadResult {
                value: total,
                abs_err: err,
                evaluations,
            });
        }
        if splits >= cfg.max_subdivisions {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                detail: format!(
                    "error {err:.3e} above target {target:.3e} after {splits} subdivisions"
                ),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                detail: format!("panel at {mid} reached machine resolution with error {err:.3e}"),
            });
        }
        let (v1, e1) = gk21(&f, worst.a, mid);
        let (v2, e2) = gk21(&f, mid, worst.b);
        evaluations += 42;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
        splits += 1;
    }
}

/// Integral represented as `exp(ln_scale) * value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledIntegral<T> {
    pub ln_scale: f64,
    pub value: T,
    /// Absolute error of `value` (same scale), quadrature plus both tail bounds.
    pub abs_err: f64,
    /// Integration window in `s = ln u`.
    pub window: (f64, f64),
}

/// Drop from the envelope peak at which the window is cut.
pub const CUT_DROP: f64 = 40.0;

/// Problem description for [`integrate_hump`].
pub struct Hump<'a> {
    /// Exponent of `u` in the envelope.
    pub power: f64,
    /// `ln 𝒩(u)`.
    pub ln_denominator: &'a (dyn Fn(f64) -> Result<f64> + Sync),
    /// Bound on `ln ∫_T^∞ u^q/𝒩(u) du`, called as `(T, q)`.
    pub ln_upper_tail: &'a (dyn Fn(f64, f64) -> Result<f64> + Sync),
}

impl Hump<'_> {
    fn phi(&self, s: f64) -> Result<f64> {
        Ok((self.power + 1.0) * s - (self.ln_denominator)(s.exp())?)
    }

    /// Maximum of the concave envelope in `s`.
    fn peak(&self) -> Result<(f64, f64)> {
        let p1 = self.power + 1.0;
        let mut lo = (0.25 * p1).ln().min(-4.0);
        let mut hi = (4.0 * p1 + 8.0).ln();
        // widen until the maximum is interior
        for _ in 0..60 {
            let (fl, fl2) = (self.phi(lo)?, self.phi(lo + 1e-3)?);
            if fl2 > fl {
                break;
            }
            lo -= 4.0;
        }
        for _ in 0..60 {
            let (fh, fh2) = (self.phi(hi)?, self.phi(hi - 1e-3)?);
            if fh2 > fh {
                break;
            }
            hi += 1.0;
        }
        const INV_PHI: f64 = 0.618_033_988_749_894_8;
        let mut x1 = hi - INV_PHI * (hi - lo);
        let mut x2 = lo + INV_PHI * (hi - lo);
        let mut f1 = self.phi(x1)?;
        let mut f2 = self.phi(x2)?;
        while hi - lo > 1e-9 * (1.0 + lo.abs().max(hi.abs())) {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + INV_PHI * (hi - lo);
                f2 = self.phi(x2)?;
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - INV_PHI * (hi - lo);
                f1 = self.phi(x1)?;
            }
        }
        let s = 0.5 * (lo + hi);
        Ok((s, self.phi(s)?))
    }

    /// Point on one side of the peak where the envelope has dropped by `drop`.
    fn cut(&self, peak: f64, top: f64, drop: f64, dir: f64) -> Result<f64> {
        let level = top - drop;
        let mut near = peak;
        let mut step = 0.5;
        let mut far = peak + dir * step;
        let mut guard = 0;
        while self.phi(far)? > level {
            near = far;
            step *= 2.0;
            far = peak + dir * step;
            guard += 1;
            if guard > 80 {
                return Err(Error::Divergence {
                    what: "moment integrand",
                    detail: "envelope does not decay away from its peak".into(),
                });
            }
        }
        for _ in 0..100 {
            let mid = 0.5 * (near + far);
            if (far - near).abs() < 1e-10 {
                break;
            }
            if self.phi(mid)? > level {
                near = mid;
            } else {
                far = mid;
            }
        }
        Ok(far)
    }
}

/// `∫₀^∞ u^power h(u)/𝒩(u) du` in log-scaled form. `factor` is the
/// polynomially bounded part `h`; `factor_bound` bounds `|h(u)|` by
/// `C u^k` as `(ln C, k)` for the tail estimates.
pub fn integrate_hump<T: Integrand>(
    hump: &Hump<'_>,
    factor: impl Fn(f64) -> T + Sync,
    factor_bound: (f64, f64),
    tol: f64,
    max_subdivisions: usize,
) -> Result<ScaledIntegral<T>> {
    if !(hump.power > -1.0) {
        return Err(Error::Divergence {
            what: "moment integral",
            detail: format!("integrand u^{} is not integrable at 0", hump.power),
        });
    }
    let (peak, top) = hump.peak()?;
    let (ln_c, k) = factor_bound;
    let mut drop = CUT_DROP;
    loop {
        let s_lo = hump.cut(peak, top, drop, -1.0)?;
        let s_hi = hump.cut(peak, top, drop, 1.0)?;
        let ln_denominator = hump.ln_denominator;
        let err_cell = std::sync::atomic::AtomicBool::new(false);
        let f = |s: f64| -> T {
            let u = s.exp();
            match ln_denominator(u) {
                Ok(ln_n) => factor(u) * ((hump.power + 1.0) * s - ln_n - top).exp(),
                Err(_) => {
                    err_cell.store(true, std::sync::atomic::Ordering::Relaxed);
                    T::zero()
                }
            }
        };
        let width = s_hi - s_lo;
        let initial = ((width * (hump.power + 1.0).sqrt()).ceil() as usize).clamp(4, 64);
        let cfg = QuadConfig {
            abs_tol: 0.0,
            rel_tol: tol,
            max_subdivisions,
        };
        let res = integrate(f, s_lo, s_hi, initial, cfg);
        if err_cell.load(std::sync::atomic::Ordering::Relaxed) {
            // re-run the failing evaluation to surface its error
            (hump.ln_denominator)(s_lo.exp())?;
            (hump.ln_denominator)(s_hi.exp())?;
            return Err(Error::NonConvergence {
                what: "moment integrand",
                detail: "series evaluation failed inside the window".into(),
            });
        }
        let res = res?;
        // lower tail: 𝒩 ≥ 1, |h| ≤ C u^k
        let pk = hump.power + k + 1.0;
        let lower = (ln_c + pk * s_lo - pk.ln() - top).exp();
        // upper tail: |h| ≤ C u^k folded into the power
        let upper = ((hump.ln_upper_tail)(s_hi.exp(), hump.power + k)? + ln_c - top).exp();
        let mag = res.value.magnitude();
        let abs_err = res.abs_err + lower + upper;
        if lower + upper <= 0.5 * tol * mag || drop > 4.0 * CUT_DROP {
            return Ok(ScaledIntegral {
                ln_scale: top,
                value: res.value,
                abs_err,
                window: (s_lo, s_hi),
            });
        }
        drop += CUT_DROP;
    }
}
