//! Neumaier-compensated accumulators.
//!
//! All mode sums in the crate are reduced in ascending mode order through
//! these accumulators so that tabulated errors reproduce digit for digit.

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Component-wise compensated accumulation of equally sized vectors.
#[derive(Clone, Debug)]
pub struct VectorSum {
    sums: Vec<CompensatedSum>,
}

impl VectorSum {
    pub fn zeros(len: usize) -> Self {
        Self {
            sums: vec![CompensatedSum::new(); len],
        }
    }

    /// Adds `scale * v`.
    pub fn add_scaled(&mut self, scale: f64, v: &[f64]) {
        debug_assert_eq!(v.len(), self.sums.len());
        for (acc, &x) in self.sums.iter_mut().zip(v) {
            acc.add(scale * x);
        }
    }

    pub fn value(&self) -> Vec<f64> {
        self.sums.iter().map(CompensatedSum::value).collect()
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_low_bits() {
        let vals = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(vals), 2.0);
        let naive: f64 = vals.iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn vector_sum_is_componentwise() {
        let mut acc = VectorSum::zeros(2);
        acc.add_scaled(1.0, &[1e16, 1.0]);
        acc.add_scaled(1.0, &[1.0, 2.0]);
        acc.add_scaled(-1.0, &[1e16, 0.0]);
        assert_eq!(acc.value(), vec![1.0, 3.0]);
    }

    #[test]
    fn complex_sum_matches_parts() {
        let mut acc = ComplexSum::new();
        acc.add(Complex64::new(0.1, -0.2));
        acc.add(Complex64::new(0.2, 0.4));
        let v = acc.value();
        assert!((v.re - 0.3).abs() < 1e-16 && (v.im - 0.2).abs() < 1e-16);
    }
}
