//! Compensated and log-space accumulators shared by the series and quadrature code.

/// Neumaier (improved Kahan) summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    fn scale(&mut self, factor: f64) {
        self.sum *= factor;
        self.comp *= factor;
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Streaming sum of `sign * exp(log_mag)` terms, kept relative to the largest
/// magnitude seen so far so that nothing overflows.
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    shift: f64,
    acc: CompensatedSum,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub fn new() -> Self {
        LogSum {
            shift: f64::NEG_INFINITY,
            acc: CompensatedSum::new(),
        }
    }

    /// Add a positive term given by its logarithm.
    pub fn add_ln(&mut self, ln_term: f64) {
        self.add_signed_ln(1.0, ln_term);
    }

    pub fn add_signed_ln(&mut self, sign: f64, ln_mag: f64) {
        if ln_mag == f64::NEG_INFINITY || sign == 0.0 {
            return;
        }
        if ln_mag > self.shift {
            if self.shift.is_finite() {
                self.acc.scale((self.shift - ln_mag).exp());
            }
            self.shift = ln_mag;
        }
        self.acc.add(sign * (ln_mag - self.shift).exp());
    }

    /// Current value as `(sign, ln|value|)`; an empty or zero sum gives `(0, -inf)`.
    pub fn signed_ln(&self) -> (f64, f64) {
        let v = self.acc.value();
        if v == 0.0 || !self.shift.is_finite() {
            return (0.0, f64::NEG_INFINITY);
        }
        (v.signum(), v.abs().ln() + self.shift)
    }

    /// ln of the sum, assuming it is positive.
    pub fn ln(&self) -> f64 {
        self.signed_ln().1
    }

    /// Largest ln|term| added so far.
    pub fn max_ln_term(&self) -> f64 {
        self.shift
    }
}

/// Fractional part `{x} = x - floor(x)`, in `[0, 1)`.
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
