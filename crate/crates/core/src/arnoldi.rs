//! Arnoldi projection of `q(tau, A) f`, the baseline the accelerated
//! expansion is compared against.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matfunc::{expm, BandedOperator};

/// Relative size of `h_{j+1,j}` (against `||A||_1`) treated as breakdown.
pub const BREAKDOWN_TOLERANCE: f64 = 1e-14;

/// `A V_j = V_j H_j + h_{j+1,j} v_{j+1} e_j^T` after `j` steps.
#[derive(Clone, Debug)]
pub struct KrylovDecomposition {
    /// `v_1 .. v_j`, and `v_{j+1}` unless the process broke down.
    basis: Vec<Vec<f64>>,
    /// Columns of the `(j+1) x j` Hessenberg matrix.
    h_cols: Vec<Vec<f64>>,
    beta: f64,
    breakdown: bool,
    reorthogonalize: bool,
    norm_a: f64,
}

impl KrylovDecomposition {
    /// Starts the process at `v_1 = f / ||f||_2` without taking a step.
    pub fn start(a: &BandedOperator, f: &[f64], reorthogonalize: bool) -> Result<Self> {
        if f.len() != a.dim() {
            return Err(Error::Dimension {
                expected: a.dim(),
                found: f.len(),
            });
        }
        let beta = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::InvalidParameter(
                "starting vector must be nonzero".into(),
            ));
        }
        Ok(Self {
            basis: vec![f.iter().map(|v| v / beta).collect()],
            h_cols: Vec::new(),
            beta,
            breakdown: false,
            reorthogonalize,
            norm_a: a.one_norm(),
        })
    }

    /// One modified Gram-Schmidt step; returns `false` once the process
    /// has broken down or the space is exhausted.
    pub fn step(&mut self, a: &BandedOperator) -> bool {
        let j = self.h_cols.len();
        if self.breakdown || j >= a.dim() {
            return false;
        }
        let mut w = a.matvec(&self.basis[j]);
        let mut col = vec![0.0; j + 2];
        let passes = if self.reorthogonalize { 2 } else { 1 };
        for _ in 0..passes {
            for (i, v) in self.basis.iter().enumerate() {
                let hij: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
                col[i] += hij;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= hij * vk;
                }
            }
        }
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        col[j + 1] = norm;
        self.h_cols.push(col);
        if norm <= BREAKDOWN_TOLERANCE * self.norm_a {
            self.breakdown = true;
        } else {
            self.basis.push(w.iter().map(|v| v / norm).collect());
        }
        true
    }

    pub fn steps(&self) -> usize {
        self.h_cols.len()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn broke_down(&self) -> bool {
        self.breakdown
    }

    /// `v_i`, `0`-based; includes `v_{j+1}` when present.
    pub fn vector(&self, i: usize) -> Option<&[f64]> {
        self.basis.get(i).map(Vec::as_slice)
    }

    /// `V_m`, the first `m <= j` basis vectors as columns.
    pub fn basis_matrix(&self, m: usize) -> DMatrix<f64> {
        let s = self.basis[0].len();
        DMatrix::from_fn(s, m, |i, c| self.basis[c][i])
    }

    /// Leading `m x m` block `H_m`.
    pub fn hessenberg(&self, m: usize) -> DMatrix<f64> {
        DMatrix::from_fn(m, m, |i, c| self.h_cols[c].get(i).copied().unwrap_or(0.0))
    }

    /// `h_{m+1,m}`; zero after breakdown at step `m`.
    pub fn subdiagonal(&self, m: usize) -> f64 {
        if self.breakdown && m == self.steps() {
            0.0
        } else {
            self.h_cols[m - 1][m]
        }
    }
}

/// `j` Arnoldi steps from `f`, without re-orthogonalization.
pub fn arnoldi_extend(a: &BandedOperator, f: &[f64], j: usize) -> Result<KrylovDecomposition> {
    arnoldi_with(a, f, j, false)
}

pub fn arnoldi_with(
    a: &BandedOperator,
    f: &[f64],
    j: usize,
    reorthogonalize: bool,
) -> Result<KrylovDecomposition> {
    if j == 0 || j > a.dim() {
        return Err(Error::InvalidParameter(format!(
            "step count {j} outside 1..={}",
            a.dim()
        )));
    }
    let mut dec = KrylovDecomposition::start(a, f, reorthogonalize)?;
    while dec.steps() < j && dec.step(a) {}
    Ok(dec)
}

/// `y_m = V_m (e^{H_m} - I) \ (e^{tau H_m} H_m e_1 beta)` using the first
/// `m` steps. `e^{H_m} - I` is formed by subtraction, as in the classical
/// formulation.
pub fn arnoldi_q_approx_at(dec: &KrylovDecomposition, m: usize, tau: f64) -> Result<Vec<f64>> {
    if m == 0 || m > dec.steps() {
        return Err(Error::InvalidParameter(format!(
            "step {m} outside 1..={}",
            dec.steps()
        )));
    }
    let h = dec.hessenberg(m);
    let e = expm(&h)? - DMatrix::identity(m, m);
    let mut e1 = DVector::zeros(m);
    e1[0] = dec.beta();
    let rhs = expm(&(&h * tau))? * (&h * e1);
    let y = e
        .lu()
        .solve(&rhs)
        .ok_or(Error::Singular("e^H - I in the Arnoldi projection"))?;
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("e^H - I in the Arnoldi projection"));
    }
    Ok((dec.basis_matrix(m) * y).as_slice().to_vec())
}

/// [`arnoldi_q_approx_at`] with all steps taken.
pub fn arnoldi_q_approx(dec: &KrylovDecomposition, tau: f64) -> Result<Vec<f64>> {
    arnoldi_q_approx_at(dec, dec.steps(), tau)
}

/// `||V_m^T V_m - I||_F` for the first `m` basis vectors.
pub fn orthogonality_loss_at(dec: &KrylovDecomposition, m: usize) -> f64 {
    let v = dec.basis_matrix(m.min(dec.basis.len()));
    let g = v.transpose() * &v - DMatrix::identity(v.ncols(), v.ncols());
    g.norm()
}

pub fn orthogonality_loss(dec: &KrylovDecomposition) -> f64 {
    orthogonality_loss_at(dec, dec.steps())
}
