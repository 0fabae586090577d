//! Scalar evaluation of `q(tau, w) = w e^{w tau} / (e^w - 1)`, its plain
//! Fourier series, the Lanczos coefficients `c_k, s_k`, the truncated
//! approximation `h_{p-1} + f_{p,N}` and Parseval norms of its residual.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_traits::Zero;

use crate::bernoulli::BernoulliTable;
use crate::error::{Error, Result};
use crate::summation::{CompensatedSum, ComplexSum};

/// Below this modulus `reference_q` switches to the Taylor series in `w`.
pub const SERIES_SWITCH_RADIUS: f64 = 1e-1;

/// Distance to a nonzero pole `2 pi i k` that is reported as a domain error.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Parameters `(p, N, ell, tau)` shared by the scalar and matrix
/// approximations. The argument `w` (or the matrix `A`) is passed
/// separately so the same parameters drive both code paths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxParams {
    /// Lanczos order `p >= 1`; `h_{p-1}` has degree `p - 1`.
    pub order: usize,
    /// Number `N >= 1` of retained Fourier modes.
    pub modes: usize,
    /// Acceleration depth `ell >= 0`.
    pub depth: usize,
    pub tau: f64,
}

impl ApproxParams {
    pub fn new(order: usize, modes: usize, depth: usize, tau: f64) -> Result<Self> {
        let params = Self {
            order,
            modes,
            depth,
            tau,
        };
        params.validate()?;
        Ok(params)
    }

    /// Parameters of the classical `g_{n,N}` approximation, `p = 2n + 2`.
    pub fn lanczos(n: usize, modes: usize, tau: f64) -> Result<Self> {
        Self::new(2 * n + 2, modes, 0, tau)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::InvalidParameter("order p must be >= 1".into()));
        }
        if self.modes == 0 {
            return Err(Error::InvalidParameter("mode count N must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::InvalidParameter(format!(
                "tau = {} outside [0, 1]",
                self.tau
            )));
        }
        Ok(())
    }

    /// `n` with `p = 2n + 2`, when `p` is even.
    pub fn lanczos_n(&self) -> Option<usize> {
        (self.order >= 2 && self.order.is_multiple_of(2)).then(|| (self.order - 2) / 2)
    }

    pub fn with_tau(self, tau: f64) -> Self {
        Self { tau, ..self }
    }

    pub fn with_depth(self, depth: usize) -> Self {
        Self { depth, ..self }
    }
}

/// Fourier data of one mode `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeCoefficients {
    pub k: usize,
    pub c: Complex64,
    pub s: Complex64,
}

pub fn check_pole(w: Complex64) -> Result<()> {
    let m = (w.im / TAU).round();
    if m != 0.0 && (w - Complex64::new(0.0, TAU * m)).norm() < POLE_TOLERANCE {
        return Err(Error::Pole(w));
    }
    Ok(())
}

/// `e^z - 1` without cancellation for small `|z|`.
pub fn expm1(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return Complex64::new(z.re.exp_m1(), 0.0);
    }
    let half = (0.5 * z.im).sin();
    let re = z.re.exp_m1() * z.im.cos() - 2.0 * half * half;
    let im = z.re.exp() * z.im.sin();
    Complex64::new(re, im)
}

/// Direct evaluation of `q(tau, w)`; the oracle for every scalar test.
pub fn reference_q(tau: f64, w: Complex64) -> Result<Complex64> {
    check_pole(w)?;
    if w.norm() < SERIES_SWITCH_RADIUS {
        return Ok(taylor_q(tau, w));
    }
    if w.re > 0.0 {
        // w e^{w(tau-1)} / (1 - e^{-w}) avoids overflow of e^w
        Ok(w * (w * (tau - 1.0)).exp() / -expm1(-w))
    } else {
        Ok(w * (w * tau).exp() / expm1(w))
    }
}

fn taylor_q(tau: f64, w: Complex64) -> Complex64 {
    let table = BernoulliTable::shared();
    // |B_k(tau)| / k! <= 4 (2 pi)^{-k} for k >= 2
    let ratio = w.norm() / TAU;
    let mut sum = ComplexSum::new();
    let mut power = Complex64::new(1.0, 0.0);
    for k in 0..=table.max_degree() {
        let b = table.eval(k, tau).expect("degree within table");
        sum.add(power * (b * table.inv_factorial(k)));
        if k >= 2 && 4.0 * ratio.powi(k as i32 + 1) <= 1e-17 * sum.value().norm() {
            break;
        }
        power *= w;
    }
    sum.value()
}

/// Plain Fourier coefficients `(c_hat_k, s_hat_k)` of `q(., w)`:
/// `c_hat = w^2 / (w^2 + (2 pi k)^2)`, `s_hat = -2 pi k w / (w^2 + (2 pi k)^2)`.
pub fn hat_coefficients(k: usize, w: Complex64) -> Result<(Complex64, Complex64)> {
    check_pole(w)?;
    let t = TAU * k as f64;
    let d = w * w + t * t;
    Ok((w * w / d, -w * t / d))
}

/// The two kernels `r^p / (1 + r^2)` and `r^{p+1} / (1 + r^2)`, with
/// `r = w / (2 pi k)`. They equal `w^p / ((2 pi k)^{p-2} (w^2 + (2 pi k)^2))`
/// and `w^{p+1} / ((2 pi k)^{p-1} (w^2 + (2 pi k)^2))` respectively.
pub(crate) fn mode_kernels(order: usize, k: usize, w: Complex64) -> (Complex64, Complex64) {
    let r = w / (TAU * k as f64);
    let base = r.powu(order as u32) / (1.0 + r * r);
    (base, base * r)
}

/// Signs multiplying the cosine and sine kernels in `c_k`, `s_k`.
///
/// For even `p` both are `(-1)^{p/2+1}`. For odd `p` the sine sign is
/// `(-1)^{(p+1)/2}` and the cosine sign is its negative, as obtained from
/// `c_k + i s_k = (-1)^{p+1} w^p (2 pi k + i w) / ((2 pi k)^{p-1} i^p (w^2 + (2 pi k)^2))`.
pub fn coefficient_signs(order: usize) -> (f64, f64) {
    let sine = correction_sign(order);
    if order.is_multiple_of(2) {
        (sine, sine)
    } else {
        (-sine, sine)
    }
}

/// `(-1)^{ceil((p+1)/2)}`.
pub fn correction_sign(order: usize) -> f64 {
    if ((order + 2) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `(c_k, s_k)` of the Lanczos representation of order `p`.
pub fn lanczos_coefficients(order: usize, k: usize, w: Complex64) -> Result<ModeCoefficients> {
    if order == 0 || k == 0 {
        return Err(Error::InvalidParameter(
            "order and mode index must be >= 1".into(),
        ));
    }
    check_pole(w)?;
    let (lo, hi) = mode_kernels(order, k, w);
    let (cos_sign, sin_sign) = coefficient_signs(order);
    let (c, s) = if order.is_multiple_of(2) {
        (lo, hi)
    } else {
        (hi, lo)
    };
    Ok(ModeCoefficients {
        k,
        c: c * cos_sign,
        s: s * sin_sign,
    })
}

/// `1 + 2 sum_{k=1}^{N} [c_hat_k cos(2 pi k tau) + s_hat_k sin(2 pi k tau)]`.
pub fn fourier_partial(tau: f64, w: Complex64, modes: usize) -> Result<Complex64> {
    check_pole(w)?;
    let mut sum = ComplexSum::new();
    for k in 1..=modes {
        let (c, s) = hat_coefficients(k, w)?;
        let arg = TAU * k as f64 * tau;
        sum.add(c * arg.cos() + s * arg.sin());
    }
    Ok(1.0 + 2.0 * sum.value())
}

/// `f_{p,N}(tau) = 2 sum_{k=1}^{N} [c_k cos(2 pi k tau) + s_k sin(2 pi k tau)]`.
pub fn lanczos_fourier_part(
    order: usize,
    modes: usize,
    tau: f64,
    w: Complex64,
) -> Result<Complex64> {
    let mut sum = ComplexSum::new();
    for k in 1..=modes {
        let m = lanczos_coefficients(order, k, w)?;
        let arg = TAU * k as f64 * tau;
        sum.add(m.c * arg.cos() + m.s * arg.sin());
    }
    Ok(2.0 * sum.value())
}

/// `h_{p-1}(tau) + f_{p,N}(tau)`; for `p = 2n + 2` this is `g_{n,N}`.
pub fn g_approx(params: &ApproxParams, w: Complex64) -> Result<Complex64> {
    params.validate()?;
    check_pole(w)?;
    let h = BernoulliTable::shared().lanczos_polynomial(params.order, params.tau, w)?;
    let f = lanczos_fourier_part(params.order, params.modes, params.tau, w)?;
    Ok(h + f)
}

/// `sqrt(2 sum_{k=N+1}^{K} (|c_k|^2 + |s_k|^2))`: the L2 norm on `[0, 1]`
/// of the residual `R_{p,N}` restricted to modes up to `K`.
pub fn residual_l2(order: usize, w: Complex64, modes: usize, last_mode: usize) -> Result<f64> {
    if order == 0 {
        return Err(Error::InvalidParameter("order p must be >= 1".into()));
    }
    check_pole(w)?;
    let mut sum = CompensatedSum::new();
    for k in modes + 1..=last_mode {
        let m = lanczos_coefficients(order, k, w)?;
        sum.add(m.c.norm_sqr() + m.s.norm_sqr());
    }
    Ok((2.0 * sum.value()).sqrt())
}

/// `Delta(N) = N^{7/2} |z|^{-4} ||R_{1,N}(., z)||_2` with the residual
/// truncated after mode `K`; tends to `sqrt(2/7)`.
pub fn delta_of_n(z: Complex64, modes: usize, last_mode: usize) -> Result<f64> {
    if z.is_zero() {
        return Err(Error::InvalidParameter("z must be nonzero".into()));
    }
    if last_mode < 2 * modes {
        return Err(Error::InvalidParameter(format!(
            "tail truncation K = {last_mode} must be at least 2N = {}",
            2 * modes
        )));
    }
    let r = residual_l2(4, z * TAU, modes, last_mode)?;
    Ok((modes as f64).powf(3.5) / z.norm().powi(4) * r)
}

/// Limit of `N^{p-1/2} ||R_{p,N}||_2`.
pub fn residual_limit_constant(order: usize, w: Complex64) -> f64 {
    let p = order as f64;
    (w.norm() / (2.0 * PI)).powf(p) * (2.0 / (2.0 * p - 1.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn reference_q_examples() {
        assert_eq!(reference_q(0.3, c(0.0)).unwrap(), c(1.0));
        let v = reference_q(0.0, c(1.0)).unwrap();
        assert_relative_eq!(
            v.re,
            1.0 / (std::f64::consts::E - 1.0),
            max_relative = 1e-15
        );
        let w = c(3.7);
        let d = reference_q(1.0, w).unwrap() - reference_q(0.0, w).unwrap();
        assert_relative_eq!(d.re, 3.7, max_relative = 1e-14);
    }

    #[test]
    fn series_and_closed_form_agree_at_the_switch() {
        for &w in &[
            Complex64::new(0.0999, 0.0),
            Complex64::new(-0.07, 0.07),
            Complex64::new(0.0, 0.0999),
        ] {
            for &tau in &[0.0, 0.3, 1.0] {
                let series = taylor_q(tau, w);
                let closed = w * (w * tau).exp() / expm1(w);
                assert!((series - closed).norm() < 1e-14, "w={w} tau={tau}");
            }
        }
    }

    #[test]
    fn overflow_safe_for_large_arguments() {
        let v = reference_q(0.5, c(2000.0)).unwrap();
        assert!(v.re.is_finite() && v.re < 1e-300 * 1e10);
        let v = reference_q(1.0, c(2000.0)).unwrap();
        assert_relative_eq!(v.re, 2000.0, max_relative = 1e-15);
        let v = reference_q(0.0, c(-5000.0)).unwrap();
        assert_relative_eq!(v.re, 5000.0, max_relative = 1e-15);
    }

    #[test]
    fn poles_are_rejected() {
        let w = Complex64::new(0.0, 2.0 * TAU);
        assert!(matches!(reference_q(0.2, w), Err(Error::Pole(_))));
        assert!(reference_q(0.2, w + Complex64::new(1e-13, 0.0)).is_err());
        assert!(reference_q(0.2, w + Complex64::new(1e-9, 0.0)).is_ok());
        assert!(hat_coefficients(3, Complex64::new(0.0, -TAU)).is_err());
    }

    #[test]
    fn hat_coefficient_examples() {
        assert_eq!(hat_coefficients(1, c(0.0)).unwrap(), (c(0.0), c(-0.0)));
        let (ch, sh) = hat_coefficients(1, c(TAU)).unwrap();
        assert_relative_eq!(ch.re, 0.5, max_relative = 1e-15);
        assert_relative_eq!(sh.re, -0.5, max_relative = 1e-15);
    }

    #[test]
    fn lanczos_coefficient_examples() {
        let m = lanczos_coefficients(2, 1, c(TAU)).unwrap();
        assert_relative_eq!(m.c.re, 0.5, max_relative = 1e-15);
        assert_relative_eq!(m.s.re, 0.5, max_relative = 1e-15);
        let m = lanczos_coefficients(2, 7, c(0.0)).unwrap();
        assert_eq!((m.c, m.s), (c(0.0), c(0.0)));
        // n = 1, z = 1, k = 2: c = -1/(4*5), s = -1/(8*5)
        let m = lanczos_coefficients(4, 2, c(TAU)).unwrap();
        assert_relative_eq!(m.c.re, -0.05, max_relative = 1e-14);
        assert_relative_eq!(m.s.re, -0.025, max_relative = 1e-14);
    }

    #[test]
    fn order_one_reduces_to_plain_fourier() {
        let w = Complex64::new(-2.5, 1.5);
        for k in 1..6 {
            let m = lanczos_coefficients(1, k, w).unwrap();
            let (ch, sh) = hat_coefficients(k, w).unwrap();
            assert!((m.c - ch).norm() < 1e-15 && (m.s - sh).norm() < 1e-15);
        }
    }

    #[test]
    fn signs_follow_the_closed_product_form() {
        // c + i s from (-1)^{p+1} w^p (2 pi k + i w) / ((2 pi k)^{p-1} i^p D), real w
        let i = Complex64::new(0.0, 1.0);
        for order in 1..=9usize {
            for k in 1..4usize {
                let w = 1.7;
                let t = TAU * k as f64;
                let d = w * w + t * t;
                let sign = if (order + 1) % 2 == 0 { 1.0 } else { -1.0 };
                let z = sign * w.powi(order as i32) * (t + i * w)
                    / (t.powi(order as i32 - 1) * i.powu(order as u32) * d);
                let m = lanczos_coefficients(order, k, c(w)).unwrap();
                assert_relative_eq!(m.c.re, z.re, max_relative = 1e-13);
                assert_relative_eq!(m.s.re, z.im, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn g_approx_small_cases() {
        let p = ApproxParams::new(2, 10, 0, 0.3).unwrap();
        assert_eq!(g_approx(&p, c(0.0)).unwrap(), c(1.0));
        assert!(ApproxParams::new(0, 1, 0, 0.1).is_err());
        assert!(ApproxParams::new(1, 0, 0, 0.1).is_err());
        assert!(ApproxParams::new(1, 1, 0, 1.5).is_err());
        assert_eq!(ApproxParams::lanczos(2, 5, 0.1).unwrap().order, 6);
        assert_eq!(p.lanczos_n(), Some(0));
        assert_eq!(ApproxParams::new(3, 1, 0, 0.1).unwrap().lanczos_n(), None);
    }

    #[test]
    fn residual_edge_cases() {
        assert_eq!(residual_l2(4, c(TAU), 100, 100).unwrap(), 0.0);
        assert_eq!(residual_l2(4, c(TAU), 100, 50).unwrap(), 0.0);
        assert!(delta_of_n(c(0.0), 10, 20).is_err());
        assert!(delta_of_n(c(1.0), 10, 19).is_err());
    }
}
