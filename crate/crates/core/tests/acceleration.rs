mod common;

use std::f64::consts::TAU;

use bernoulli_action::acceleration::{
    accelerated_approx, build_triangle, correction_weights, delta0, gamma0, leading_error_term,
    q0_shift, DirectExp, RationalExp,
};
use bernoulli_action::fourier::{correction_sign, g_approx, reference_q};
use bernoulli_action::{ApproxParams, Complex64, Error};
use common::{c, loglog_slope};

fn err(order: usize, modes: usize, depth: usize, tau: f64, w: Complex64) -> f64 {
    let p = ApproxParams::new(order, modes, depth, tau).unwrap();
    (accelerated_approx(&p, w).unwrap() - reference_q(tau, w).unwrap()).norm()
}

#[test]
fn one_correction_step_gains_an_order_of_magnitude() {
    let w = c(-4.0);
    let e0 = err(2, 100, 0, 0.125, w);
    let e1 = err(2, 100, 1, 0.125, w);
    assert!(e1 * 10.0 <= e0, "{e0} -> {e1}");
}

#[test]
fn three_steps_reach_the_target() {
    let w = c(-8.0);
    let q = reference_q(0.125, w).unwrap();
    assert!(err(2, 100, 3, 0.125, w) / q.norm() < 1e-8);
}

#[test]
fn depth_zero_is_bit_identical_to_the_plain_approximation() {
    for order in 1..7 {
        for &tau in &[0.0, 0.1, 0.5, 1.0] {
            let p = ApproxParams::new(order, 37, 0, tau).unwrap();
            let w = Complex64::new(-2.5, 1.5);
            let a = accelerated_approx(&p, w).unwrap();
            let b = g_approx(&p, w).unwrap();
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
}

#[test]
fn endpoints_are_rejected_with_positive_depth() {
    for tau in [0.0, 1.0] {
        let p = ApproxParams::new(2, 50, 1, tau).unwrap();
        assert!(matches!(
            accelerated_approx(&p, c(1.0)),
            Err(Error::EndpointTau(_))
        ));
    }
}

#[test]
fn error_decreases_with_depth() {
    for order in [2usize, 3, 4] {
        let w = c(-3.0);
        let errs: Vec<f64> = (0..=4).map(|l| err(order, 60, l, 1.0 / 6.0, w)).collect();
        assert!(errs.windows(2).all(|e| e[1] < e[0]), "p={order}: {errs:?}");
    }
}

#[test]
fn leading_term_captures_the_residual() {
    let w = c(1.0);
    let tau = 1.0 / 3.0;
    let q = reference_q(tau, w).unwrap();
    // both sides averaged: the leading term nearly vanishes when N = 1 mod 3
    let (mut gap, mut size) = (0.0, 0.0);
    for n in 200..=210 {
        let r = q - g_approx(&ApproxParams::new(2, n, 0, tau).unwrap(), w).unwrap();
        let l = leading_error_term(2, n, tau, w).unwrap();
        gap += (r - l).norm();
        size += l.norm();
    }
    assert!(gap <= 0.05 * size, "gap {gap} vs {size}");

    assert_eq!(leading_error_term(2, 200, tau, c(0.0)).unwrap().norm(), 0.0);

    let ns = [160.0, 320.0, 640.0, 1280.0];
    let mags: Vec<f64> = ns
        .iter()
        .map(|&n| leading_error_term(2, n as usize, 0.3, w).unwrap().norm())
        .collect();
    assert!((loglog_slope(&ns, &mags) + 2.0).abs() < 0.1);
}

#[test]
fn triangle_matches_analytic_second_differences() {
    let w = c(2.0);
    let base: Vec<Complex64> = (10..=16).map(|k| gamma0(2, k, w).unwrap()).collect();
    let t = build_triangle(base.clone(), 10, 3).unwrap();
    for k in 11..=15 {
        let i = k - 10;
        let expected = -base[i - 1] + 2.0 * base[i] - base[i + 1];
        let got = *t.get(1, k).unwrap();
        assert!((got - expected).norm() <= 1e-15 * expected.norm().max(1e-300));
    }
}

#[test]
fn triangle_levels_gain_two_orders_of_decay() {
    let w = c(1.0);
    let ks = [128.0, 256.0, 512.0, 1024.0, 2048.0];
    let level1 =
        |f: &dyn Fn(usize) -> Complex64, k: usize| (-f(k - 1) + 2.0 * f(k) - f(k + 1)).norm();
    let g: Vec<f64> = ks
        .iter()
        .map(|&k| level1(&|m| gamma0(2, m, w).unwrap(), k as usize))
        .collect();
    let d: Vec<f64> = ks
        .iter()
        .map(|&k| level1(&|m| delta0(2, m, w).unwrap(), k as usize))
        .collect();
    assert!((loglog_slope(&ks, &g) + 4.0).abs() < 0.1);
    assert!((loglog_slope(&ks, &d) + 5.0).abs() < 0.1);
}

#[test]
fn summation_by_parts_tail_identity() {
    let (order, modes, tau, w) = (2usize, 50usize, 0.3, c(1.0));
    let top = 100_000usize;
    let theta = TAU * tau;
    let gamma = |k: usize| gamma0(order, k, w).unwrap().re;
    let mut lhs = 0.0;
    for k in modes + 1..=top {
        lhs += gamma(k) * (theta * k as f64).cos();
    }
    lhs *= 2.0 - 2.0 * theta.cos();
    let wt = correction_weights(modes, 1, tau).unwrap()[0];
    let denom = 2.0 - 2.0 * theta.cos();
    let boundary = (gamma(modes + 1) * wt.cos_lead + gamma(modes + 2) * wt.cos_next) * denom;
    let mut rhs = 0.0;
    for k in modes + 2..top {
        let g1 = -gamma(k - 1) + 2.0 * gamma(k) - gamma(k + 1);
        rhs += g1 * (theta * k as f64).cos();
    }
    assert!(
        (lhs - boundary - rhs).abs() < 1e-10,
        "{}",
        lhs - boundary - rhs
    );
}

#[test]
fn odd_orders_improve_under_correction() {
    for order in [1usize, 3, 5] {
        let w = c(-2.0);
        let e0 = err(order, 80, 0, 0.3, w);
        let e2 = err(order, 80, 2, 0.3, w);
        assert!(e2 * 100.0 < e0, "p={order}: {e0} -> {e2}");
    }
}

#[test]
fn sign_helper_matches_ceiling_formula() {
    for order in 1..20usize {
        let ceil = (order + 2) / 2;
        let expected = if ceil % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(correction_sign(order), expected);
    }
}

#[test]
fn shifted_endpoint_formula() {
    let p = ApproxParams::new(2, 100, 3, 0.0).unwrap();
    let w = c(-3.0);
    let v = q0_shift(w, 0.125, &DirectExp, &p).unwrap();
    let exact = reference_q(0.0, w).unwrap();
    assert!((v - exact).norm() <= 1e-6 * exact.norm(), "{v} vs {exact}");

    // with the exact q in place of G the identity holds to rounding
    let lhs = reference_q(1.0 - 0.125, w).unwrap() * (w * 0.125).exp() - w;
    assert!((lhs - exact).norm() <= 1e-12 * exact.norm());

    let w = c(-50.0);
    let v = q0_shift(w, 0.125, &DirectExp, &p).unwrap();
    let exact = reference_q(0.0, w).unwrap();
    assert!((v - exact).norm() <= 1e-6 * exact.norm(), "{v} vs {exact}");

    let pade = RationalExp::pade(8);
    let v = q0_shift(c(-3.0), 0.125, &pade, &p).unwrap();
    assert!((v - reference_q(0.0, c(-3.0)).unwrap()).norm() < 1e-6);
    assert!(q0_shift(w, 1.5, &DirectExp, &p).is_err());
}
