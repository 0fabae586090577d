use std::f64::consts::TAU;

use rayon::prelude::*;

use super::operator::BandedOperator;
use super::solve::ShiftedSolver;
use crate::acceleration::{correction_weights, CoefficientTriangle};
use crate::bernoulli::BernoulliTable;
use crate::error::{Error, Result};
use crate::fourier::{coefficient_signs, ApproxParams};
use crate::summation::VectorSum;

/// Vector-valued coefficient triangle `gamma_k^(j) f` or `delta_k^(j) f`.
pub type VectorSequence = CoefficientTriangle<Vec<f64>>;

fn check_len(a: &BandedOperator, f: &[f64]) -> Result<()> {
    if f.len() != a.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            found: f.len(),
        });
    }
    Ok(())
}

/// `h_{p-1}(tau, A) f = sum_{k<p} B_k(tau) A^k f / k!` by Horner's rule.
pub fn h_action(a: &BandedOperator, order: usize, tau: f64, f: &[f64]) -> Result<Vec<f64>> {
    check_len(a, f)?;
    let weights = BernoulliTable::shared().lanczos_weights(order, tau)?;
    let mut y: Vec<f64> = f.iter().map(|v| v * weights[order - 1]).collect();
    for &wk in weights[..order - 1].iter().rev() {
        y = a.matvec(&y);
        for (yi, fi) in y.iter_mut().zip(f) {
            *yi += wk * fi;
        }
    }
    Ok(y)
}

/// The tau-independent part of `G_{p,N,ell}(tau, A) f`: the cosine and sine
/// kernels applied to `f` for modes `1 ..= N + 2 ell`, and the triangles
/// built from the last `2 ell + 1` of them.
///
/// Building the plan performs exactly `N + 2 ell` shifted solves;
/// [`eval`](Self::eval) performs none.
#[derive(Clone, Debug)]
pub struct ActionPlan {
    op: BandedOperator,
    f: Vec<f64>,
    order: usize,
    modes: usize,
    depth: usize,
    /// Unsigned cosine kernels `gamma_k^(0) f`, index `k - 1`.
    cos_kernels: Vec<Vec<f64>>,
    sin_kernels: Vec<Vec<f64>>,
    gamma: Option<VectorSequence>,
    delta: Option<VectorSequence>,
    solves: usize,
}

impl ActionPlan {
    pub fn new(
        a: &BandedOperator,
        order: usize,
        modes: usize,
        depth: usize,
        f: &[f64],
    ) -> Result<Self> {
        check_len(a, f)?;
        ApproxParams::new(order, modes, depth, 0.5)?;
        BernoulliTable::shared().lanczos_weights(order, 0.0)?;

        let solver = ShiftedSolver::new(a)?;
        let mut apf = f.to_vec();
        for _ in 0..order {
            apf = a.matvec(&apf);
        }
        let last = if depth > 0 { modes + 2 * depth } else { modes };
        // lo_k f = (2 pi k)^{2-p} x_k, hi_k f = (2 pi k)^{1-p} A x_k,
        // x_k = (A^2 + (2 pi k)^2 I)^{-1} A^p f
        let kernels: Vec<(Vec<f64>, Vec<f64>)> = (1..=last)
            .into_par_iter()
            .map(|k| {
                let x = solver.solve(k, &apf)?;
                let t = TAU * k as f64;
                let lo_scale = t.powi(2 - order as i32);
                let hi_scale = t.powi(1 - order as i32);
                let ax = a.matvec(&x);
                let lo: Vec<f64> = x.iter().map(|v| v * lo_scale).collect();
                let hi: Vec<f64> = ax.iter().map(|v| v * hi_scale).collect();
                Ok(if order.is_multiple_of(2) {
                    (lo, hi)
                } else {
                    (hi, lo)
                })
            })
            .collect::<Result<_>>()?;
        let (cos_kernels, sin_kernels): (Vec<_>, Vec<_>) = kernels.into_iter().unzip();

        let (gamma, delta) = if depth > 0 {
            let g = CoefficientTriangle::build(cos_kernels[modes - 1..].to_vec(), modes, depth)?;
            let d = CoefficientTriangle::build(sin_kernels[modes - 1..].to_vec(), modes, depth)?;
            (Some(g), Some(d))
        } else {
            (None, None)
        };
        Ok(Self {
            op: a.clone(),
            f: f.to_vec(),
            order,
            modes,
            depth,
            cos_kernels,
            sin_kernels,
            gamma,
            delta,
            solves: solver.solve_count(),
        })
    }

    pub fn from_params(a: &BandedOperator, params: &ApproxParams, f: &[f64]) -> Result<Self> {
        Self::new(a, params.order, params.modes, params.depth, f)
    }

    pub fn params(&self, tau: f64) -> ApproxParams {
        ApproxParams {
            order: self.order,
            modes: self.modes,
            depth: self.depth,
            tau,
        }
    }

    /// Shifted solves performed while building the plan.
    pub fn solve_count(&self) -> usize {
        self.solves
    }

    pub fn gamma_sequence(&self) -> Option<&VectorSequence> {
        self.gamma.as_ref()
    }

    pub fn delta_sequence(&self) -> Option<&VectorSequence> {
        self.delta.as_ref()
    }

    /// `h_{p-1}(tau, A) f + f_{p,N}(tau, A) f`.
    pub fn eval_base(&self, tau: f64) -> Result<Vec<f64>> {
        self.params(tau).validate()?;
        let (cos_sign, sin_sign) = coefficient_signs(self.order);
        let h = h_action(&self.op, self.order, tau, &self.f)?;
        let mut acc = VectorSum::zeros(self.f.len());
        for k in 1..=self.modes {
            let (s, c) = (TAU * k as f64 * tau).sin_cos();
            acc.add_scaled(cos_sign * c, &self.cos_kernels[k - 1]);
            acc.add_scaled(sin_sign * s, &self.sin_kernels[k - 1]);
        }
        Ok(h.iter()
            .zip(acc.value())
            .map(|(a, b)| a + 2.0 * b)
            .collect())
    }

    /// `G_{p,N,ell}(tau, A) f`; equals [`eval_base`](Self::eval_base) when `ell = 0`.
    pub fn eval(&self, tau: f64) -> Result<Vec<f64>> {
        let (gamma, delta) = match (&self.gamma, &self.delta) {
            (Some(g), Some(d)) => (g, d),
            _ => return self.eval_base(tau),
        };
        let weights = correction_weights(self.modes, self.depth, tau)?;
        let base = self.eval_base(tau)?;
        let s = self.f.len();
        let (mut gsum, mut dsum) = (VectorSum::zeros(s), VectorSum::zeros(s));
        for (j, wt) in weights.iter().enumerate() {
            let (lead, next) = gamma.boundary_pair(j + 1).expect("triangle covers depth");
            gsum.add_scaled(wt.cos_lead, lead);
            gsum.add_scaled(wt.cos_next, next);
            let (lead, next) = delta.boundary_pair(j + 1).expect("triangle covers depth");
            dsum.add_scaled(wt.sin_lead, lead);
            dsum.add_scaled(wt.sin_next, next);
        }
        let (gamma_sign, sign) = coefficient_signs(self.order);
        Ok(base
            .iter()
            .zip(gsum.value().iter().zip(dsum.value()))
            .map(|(b, (g, d))| b + 2.0 * (gamma_sign * g + sign * d))
            .collect())
    }
}

/// `g(tau, A) f = h_{p-1}(tau, A) f + f_{p,N}(tau, A) f`; `N` shifted solves.
/// For `p = 2n + 2` this is the classical `g_{n,N}` action.
pub fn g_action(a: &BandedOperator, params: &ApproxParams, f: &[f64]) -> Result<Vec<f64>> {
    ActionPlan::from_params(a, &params.with_depth(0), f)?.eval_base(params.tau)
}

/// `G_{p,N,ell}(tau, A) f`; `N + 2 ell` shifted solves.
#[doc(alias = "G_action")]
pub fn accelerated_action(
    a: &BandedOperator,
    params: &ApproxParams,
    f: &[f64],
) -> Result<Vec<f64>> {
    if params.depth > 0 {
        correction_weights(params.modes, params.depth, params.tau)?;
    }
    ActionPlan::from_params(a, params, f)?.eval(params.tau)
}
