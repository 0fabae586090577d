mod common;

use bernoulli_action::acceleration::accelerated_approx;
use bernoulli_action::arnoldi::{arnoldi_q_approx, arnoldi_with, orthogonality_loss};
use bernoulli_action::bvp::{discretize_laplacian, geometric_grid, uniform_grid};
use bernoulli_action::experiments::test_operator;
use bernoulli_action::matfunc::{
    expm_action, reference_solution, shifted_solve, ActionPlan, BandedOperator,
};
use bernoulli_action::ApproxParams;
use common::{c, inf_norm, inf_norm_diff};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

fn wiggle(s: usize) -> Vec<f64> {
    (0..s).map(|i| 1.0 + 0.5 * (1.7 * i as f64).sin()).collect()
}

fn uniform(s: usize) -> BandedOperator {
    discretize_laplacian(&uniform_grid(24.0, s).unwrap()).unwrap()
}

/// Eigenvalues of a tridiagonal matrix with `sub * sup > 0`, through the
/// similar symmetric matrix.
fn tridiagonal_eigenvalues(a: &BandedOperator) -> Vec<f64> {
    let s = a.dim();
    let m = DMatrix::from_fn(s, s, |i, j| {
        if i == j {
            a.get(i, i)
        } else if i.abs_diff(j) == 1 {
            (a.get(i, j) * a.get(j, i)).sqrt()
        } else {
            0.0
        }
    });
    SymmetricEigen::new(m).eigenvalues.as_slice().to_vec()
}

#[test]
fn geometric_operator_spectrum() {
    let a = test_operator(2, 512).unwrap();
    let ev = tridiagonal_eigenvalues(&a);
    let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // the quoted interval [-3.7e4, -1.7e-2] truncates both ends to two digits
    assert!((-3.8e4..=-3.7e4).contains(&lo), "{lo}");
    assert!((-1.8e-2..=-1.7e-2).contains(&hi), "{hi}");
}

#[test]
fn uniform_operator_is_symmetric_negative_definite() {
    let a = uniform(64);
    let scale = a.one_norm();
    for i in 0..63 {
        assert!((a.get(i, i + 1) - a.get(i + 1, i)).abs() <= 1e-14 * scale);
    }
    for (centre, radius) in a.gershgorin_discs() {
        assert!(centre + radius <= 1e-12);
    }
    let ev = tridiagonal_eigenvalues(&a);
    assert!(ev.iter().all(|&l| l < 0.0));
    let h = 24.0 / 65.0;
    let smallest = -4.0 / (h * h) * (std::f64::consts::PI * h / 48.0).sin().powi(2);
    assert!(ev
        .iter()
        .any(|&l| (l - smallest).abs() < 1e-12 * smallest.abs()));
}

#[test]
fn laplacian_is_exact_on_quadratics_and_second_order_on_smooth_data() {
    for grid in [
        uniform_grid(3.0, 40).unwrap(),
        geometric_grid(0.01, 1.005, 200).unwrap(),
    ] {
        let a = discretize_laplacian(&grid).unwrap();
        let l = grid.length();
        let u: Vec<f64> = grid.interior().iter().map(|x| x * (l - x)).collect();
        for v in a.matvec(&u) {
            assert!((v + 2.0).abs() < 1e-8, "{v}");
        }
    }
    let err = |s: usize| {
        let g = uniform_grid(1.0, s).unwrap();
        let u: Vec<f64> = g
            .interior()
            .iter()
            .map(|x| (std::f64::consts::PI * x).sin())
            .collect();
        let au = discretize_laplacian(&g).unwrap().matvec(&u);
        let exact: Vec<f64> = u
            .iter()
            .map(|v| -std::f64::consts::PI.powi(2) * v)
            .collect();
        inf_norm_diff(&au, &exact)
    };
    let ratio = err(31) / err(63);
    assert!((ratio - 4.0).abs() < 0.1, "{ratio}");
}

#[test]
fn reference_solution_solves_the_nonlocal_problem() {
    // u' = A u and the mean of u over [0, 1] equals f
    let a = uniform(32);
    let f = wiggle(32);
    let m = 200;
    let u: Vec<Vec<f64>> = (0..=m)
        .map(|i| reference_solution(&a, i as f64 / m as f64, &f).unwrap())
        .collect();
    let mut mean = vec![0.0; 32];
    for (i, ui) in u.iter().enumerate() {
        let w = if i == 0 || i == m {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        for (acc, v) in mean.iter_mut().zip(ui) {
            *acc += w * v / (3.0 * m as f64);
        }
    }
    assert!(inf_norm_diff(&mean, &f) < 1e-7 * inf_norm(&f));

    let (t, dt) = (0.4, 1e-4);
    let up = reference_solution(&a, t + dt, &f).unwrap();
    let um = reference_solution(&a, t - dt, &f).unwrap();
    let du: Vec<f64> = up
        .iter()
        .zip(&um)
        .map(|(p, q)| (p - q) / (2.0 * dt))
        .collect();
    let au = a.matvec(&reference_solution(&a, t, &f).unwrap());
    assert!(inf_norm_diff(&du, &au) < 1e-5 * inf_norm(&au));

    // the endpoint values differ by A f
    let jump: Vec<f64> = u[m].iter().zip(&u[0]).map(|(x, y)| x - y).collect();
    assert!(inf_norm_diff(&jump, &a.matvec(&f)) < 1e-10 * inf_norm(&a.matvec(&f)));
}

#[test]
fn accelerated_action_converges_to_reference() {
    let a = uniform(32);
    let f = wiggle(32);
    let plan = ActionPlan::new(&a, 2, 60, 4, &f).unwrap();
    for tau in [0.1, 0.3, 0.5, 0.77] {
        let z = reference_solution(&a, tau, &f).unwrap();
        let y = plan.eval(tau).unwrap();
        assert!(inf_norm_diff(&y, &z) < 1e-9 * inf_norm(&z), "tau {tau}");
    }
}

#[test]
fn banded_and_dense_storage_agree() {
    for s in [8, 33, 64] {
        let a = uniform(s);
        let d = BandedOperator::dense(a.to_dense()).unwrap();
        assert!(!d.is_tridiagonal());
        let f = wiggle(s);
        for k in [1, 7, 40] {
            let xb = shifted_solve(&a, k, &f).unwrap();
            let xd = shifted_solve(&d, k, &f).unwrap();
            assert!(
                inf_norm_diff(&xb, &xd) <= 1e-12 * inf_norm(&xb),
                "s {s}, k {k}"
            );
        }
        let yb = ActionPlan::new(&a, 2, 40, 3, &f)
            .unwrap()
            .eval(0.3)
            .unwrap();
        let yd = ActionPlan::new(&d, 2, 40, 3, &f)
            .unwrap()
            .eval(0.3)
            .unwrap();
        assert!(inf_norm_diff(&yb, &yd) <= 1e-11 * inf_norm(&yb));
    }
}

#[test]
fn diagonal_operator_acts_entrywise() {
    let d = vec![-0.5, -3.0, -12.0, 1e-9, 2.0];
    let a = BandedOperator::diagonal(d.clone()).unwrap();
    let f = vec![1.0, -2.0, 0.5, 3.0, 1.5];
    let params = ApproxParams::new(3, 40, 2, 0.35).unwrap();
    let y = ActionPlan::from_params(&a, &params, &f)
        .unwrap()
        .eval(0.35)
        .unwrap();
    for i in 0..d.len() {
        let g = accelerated_approx(&params, c(d[i])).unwrap();
        assert!(
            (y[i] - g.re * f[i]).abs() < 1e-12 * (1.0 + y[i].abs()),
            "entry {i}"
        );
    }
}

#[test]
fn plan_commutes_with_the_operator() {
    // q(tau, A) A f = A q(tau, A) f
    let a = discretize_laplacian(&geometric_grid(0.05, 1.02, 24).unwrap()).unwrap();
    let f = wiggle(24);
    let af = a.matvec(&f);
    let left = ActionPlan::new(&a, 2, 50, 3, &af)
        .unwrap()
        .eval(0.4)
        .unwrap();
    let right = a.matvec(
        &ActionPlan::new(&a, 2, 50, 3, &f)
            .unwrap()
            .eval(0.4)
            .unwrap(),
    );
    assert!(inf_norm_diff(&left, &right) < 1e-8 * inf_norm(&right));
}

#[test]
fn exponential_action_matches_eigen_decomposition() {
    let a = uniform(16);
    let sym = SymmetricEigen::new(a.to_dense());
    let f = DVector::from_vec(wiggle(16));
    let t = 0.7;
    let exact = &sym.eigenvectors
        * DMatrix::from_diagonal(&sym.eigenvalues.map(|l| (t * l).exp()))
        * sym.eigenvectors.transpose()
        * &f;
    let y = expm_action(&a, t, f.as_slice()).unwrap();
    assert!(inf_norm_diff(&y, exact.as_slice()) < 1e-13);
}

#[test]
fn arnoldi_relation_holds() {
    let a = test_operator(3, 64).unwrap();
    let f = wiggle(64);
    let m = 20;
    let dec = arnoldi_with(&a, &f, m, false).unwrap();
    let v = dec.basis_matrix(m);
    let av = a.to_dense() * &v;
    let mut r = av - &v * dec.hessenberg(m);
    let next = dec.vector(m).unwrap();
    for i in 0..64 {
        r[(i, m - 1)] -= dec.subdiagonal(m) * next[i];
    }
    let res = r.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    assert!(res <= 1e-12 * a.one_norm(), "{res}");
}

#[test]
fn arnoldi_is_shift_invariant() {
    let a = uniform(20);
    let shift = 3.5;
    let b = BandedOperator::from_dense(a.to_dense() + DMatrix::identity(20, 20) * shift).unwrap();
    let f = wiggle(20);
    let da = arnoldi_with(&a, &f, 8, true).unwrap();
    let db = arnoldi_with(&b, &f, 8, true).unwrap();
    let diff = db.hessenberg(8) - da.hessenberg(8) - DMatrix::identity(8, 8) * shift;
    assert!(diff.amax() < 1e-11, "{}", diff.amax());
    assert!((da.basis_matrix(8) - db.basis_matrix(8)).amax() < 1e-10);
}

#[test]
fn full_dimension_arnoldi_is_exact() {
    let a = uniform(32);
    let f = wiggle(32);
    let dec = arnoldi_with(&a, &f, 32, true).unwrap();
    assert!(orthogonality_loss(&dec) < 1e-12);
    let y = arnoldi_q_approx(&dec, 1.0 / 6.0).unwrap();
    let z = reference_solution(&a, 1.0 / 6.0, &f).unwrap();
    assert!(inf_norm_diff(&y, &z) <= 1e-10, "{}", inf_norm_diff(&y, &z));
}
