//! Shared numeric helpers: log-factorials and the standard normal
//! distribution.

/// Table of `ln(k!)` for `k = 0..=max`, built once per model run so that
/// log-space PMF evaluation is a handful of lookups.
pub struct LnFactorial {
    table: Vec<f64>,
}

impl LnFactorial {
    pub fn up_to(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        table.push(0.0);
        for k in 1..=max {
            table.push(table[k - 1] + (k as f64).ln());
        }
        Self { table }
    }

    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.table[k]
    }

    /// `ln C(n, k)`; caller guarantees `k <= n < table size`.
    #[inline]
    pub fn ln_choose(&self, n: usize, k: usize) -> f64 {
        self.get(n) - self.get(k) - self.get(n - k)
    }
}

/// Standard normal CDF via the complementary error function, accurate in
/// both tails.
#[inline]
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_table() {
        let t = LnFactorial::up_to(10);
        assert_eq!(t.get(0), 0.0);
        assert_eq!(t.get(1), 0.0);
        assert!((t.get(5) - 120f64.ln()).abs() < 1e-12);
        assert!((t.ln_choose(10, 3) - 120f64.ln()).abs() < 1e-12);
        assert_eq!(t.ln_choose(10, 0), 0.0);
    }

    #[test]
    fn normal_cdf_reference_points() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.959963984540054) - 0.975).abs() < 1e-12);
        assert!((normal_cdf(-1.959963984540054) - 0.025).abs() < 1e-12);
        // deep tail stays positive instead of underflowing to rounding noise
        assert!(normal_cdf(-8.0) > 0.0);
        assert!(normal_cdf(-8.0) < 1e-14);
    }

    #[test]
    fn normal_pdf_peak() {
        assert!((normal_pdf(0.0) - 0.3989422804014327).abs() < 1e-15);
    }
}
