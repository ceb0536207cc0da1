//! Small numerically careful helpers shared by the estimator, oracle and bench.

use num_complex::Complex64;

/// Neumaier-compensated running sum. Summation order is the call order, so
/// results are reproducible for a fixed input order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn scale(&mut self, factor: f64) {
        self.sum *= factor;
        self.carry *= factor;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Complex counterpart of [`CompensatedSum`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn scale(&mut self, factor: f64) {
        self.re.scale(factor);
        self.im.scale(factor);
    }

    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `log(2 cosh z)` for complex `z`, evaluated as `±z + ln(1 + e^{∓2z})` so the
/// exponential never exceeds unit magnitude.
#[inline]
pub fn log_two_cosh(z: Complex64) -> Complex64 {
    if z.re >= 0.0 {
        z + (Complex64::new(1.0, 0.0) + (-2.0 * z).exp()).ln()
    } else {
        -z + (Complex64::new(1.0, 0.0) + (2.0 * z).exp()).ln()
    }
}

/// Real part of [`log_two_cosh`], i.e. `ln|2 cosh z|`, without complex logs.
#[inline]
pub fn log_abs_two_cosh(z: Complex64) -> f64 {
    // |2cosh z|^2 = e^{2|x|} (1 + 2 e^{-2|x|} cos 2y + e^{-4|x|})
    let ax = z.re.abs();
    let e = (-2.0 * ax).exp();
    let inner = 1.0 + 2.0 * e * (2.0 * z.im).cos() + e * e;
    ax + 0.5 * inner.max(0.0).ln()
}

/// Mean and unbiased variance of a real sample. `None` variance for fewer
/// than two values.
pub fn mean_var(xs: &[f64]) -> (f64, Option<f64>) {
    if xs.is_empty() {
        return (f64::NAN, None);
    }
    let mut s = CompensatedSum::new();
    xs.iter().for_each(|&x| s.add(x));
    let mean = s.value() / xs.len() as f64;
    if xs.len() < 2 {
        return (mean, None);
    }
    let mut ss = CompensatedSum::new();
    xs.iter().for_each(|&x| ss.add((x - mean) * (x - mean)));
    (mean, Some(ss.value() / (xs.len() - 1) as f64))
}

/// Unbiased variance of a complex sample, `Σ|z - z̄|² / (m - 1)`.
pub fn complex_var(zs: &[Complex64]) -> Option<f64> {
    if zs.len() < 2 {
        return None;
    }
    let mut s = ComplexSum::new();
    zs.iter().for_each(|&z| s.add(z));
    let mean = s.value() / zs.len() as f64;
    let mut ss = CompensatedSum::new();
    zs.iter().for_each(|&z| ss.add((z - mean).norm_sqr()));
    Some(ss.value() / (zs.len() - 1) as f64)
}

/// Standard error of a variance estimate built from squared deviations
/// `d_r = |z_r - z̄|²`: the spread of the `d_r` divided by `sqrt(m)`.
pub fn variance_standard_error(sq_devs: &[f64]) -> Option<f64> {
    let m = sq_devs.len();
    let (_, var) = mean_var(sq_devs);
    var.map(|v| (v / m as f64).sqrt())
}
