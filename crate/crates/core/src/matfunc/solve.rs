//! Factorizations of `A^2 + (2 pi k)^2 I`.
//!
//! For tridiagonal `A` the square is pentadiagonal and is factored by a
//! band LU with partial pivoting. For dense `A` the square is reduced once
//! to Hessenberg form `Q H Q^T`; each shift then costs an `O(s^2)` LU of
//! `H + sigma I`.

use std::f64::consts::TAU;
use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::DMatrix;

use super::operator::BandedOperator;
use crate::error::{Error, Result};

/// LU with partial pivoting of a band matrix with `kl` sub- and `ku`
/// super-diagonals. Row `i` stores columns `i - kl ..= i + kl + ku` so the
/// fill-in from pivoting fits.
#[derive(Clone, Debug)]
struct BandLu {
    n: usize,
    kl: usize,
    width: usize,
    ab: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    fn factor(n: usize, kl: usize, ku: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let width = 2 * kl + ku + 1;
        let mut lu = Self {
            n,
            kl,
            width,
            ab: vec![0.0; n * width],
            piv: vec![0; n],
        };
        for i in 0..n {
            for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                *lu.at(i, j) = entry(i, j);
            }
        }
        let reach = kl + ku;
        for i in 0..n {
            let last_row = (i + kl).min(n - 1);
            let last_col = (i + reach).min(n - 1);
            let mut p = i;
            let mut best = lu.get(i, i).abs();
            for r in i + 1..=last_row {
                let v = lu.get(r, i).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular("banded shifted system"));
            }
            lu.piv[i] = p;
            if p != i {
                for j in i..=last_col {
                    let a = lu.get(i, j);
                    let b = lu.get(p, j);
                    *lu.at(i, j) = b;
                    *lu.at(p, j) = a;
                }
            }
            let pivot = lu.get(i, i);
            for r in i + 1..=last_row {
                let m = lu.get(r, i) / pivot;
                *lu.at(r, i) = m;
                if m != 0.0 {
                    for j in i + 1..=last_col {
                        let u = lu.get(i, j);
                        *lu.at(r, j) -= m * u;
                    }
                }
            }
        }
        Ok(lu)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j + self.kl - i < self.width);
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.ab[self.idx(i, j)]
    }

    #[inline]
    fn at(&mut self, i: usize, j: usize) -> &mut f64 {
        let k = self.idx(i, j);
        &mut self.ab[k]
    }

    #[allow(clippy::needless_range_loop)]
    fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            b.swap(i, self.piv[i]);
            let bi = b[i];
            for r in i + 1..=(i + self.kl).min(n - 1) {
                b[r] -= self.get(r, i) * bi;
            }
        }
        let reach = self.width - self.kl - 1;
        for i in (0..n).rev() {
            let mut v = b[i];
            for j in i + 1..=(i + reach).min(n - 1) {
                v -= self.get(i, j) * b[j];
            }
            b[i] = v / self.get(i, i);
        }
    }
}

/// LU with partial pivoting of an upper Hessenberg matrix plus a shift.
#[derive(Clone, Debug)]
struct HessenbergLu {
    u: DMatrix<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl HessenbergLu {
    fn factor(h: &DMatrix<f64>, shift: f64) -> Result<Self> {
        let n = h.nrows();
        let mut u = h.clone();
        for i in 0..n {
            u[(i, i)] += shift;
        }
        let mut mult = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if u[(i + 1, i)].abs() > u[(i, i)].abs() {
                u.swap_rows(i, i + 1);
                swapped[i] = true;
            }
            let pivot = u[(i, i)];
            if pivot == 0.0 {
                return Err(Error::Singular("dense shifted system"));
            }
            let m = u[(i + 1, i)] / pivot;
            mult[i] = m;
            u[(i + 1, i)] = 0.0;
            if m != 0.0 {
                for j in i + 1..n {
                    let v = u[(i, j)];
                    u[(i + 1, j)] -= m * v;
                }
            }
        }
        if n > 0 && u[(n - 1, n - 1)] == 0.0 {
            return Err(Error::Singular("dense shifted system"));
        }
        Ok(Self { u, mult, swapped })
    }

    #[allow(clippy::needless_range_loop)]
    fn solve_in_place(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.mult[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            for j in i + 1..n {
                v -= self.u[(i, j)] * b[j];
            }
            b[i] = v / self.u[(i, i)];
        }
    }
}

#[derive(Clone, Debug)]
enum SquareForm {
    /// Rows of `A^2`, columns `i - 2 ..= i + 2`.
    Pentadiagonal(Vec<[f64; 5]>),
    /// `A^2 = Q H Q^T`.
    Hessenberg { q: DMatrix<f64>, h: DMatrix<f64> },
}

/// One factored shifted system `A^2 + (2 pi k)^2 I`.
#[derive(Clone, Debug)]
pub struct ShiftedFactorization {
    k: usize,
    shift: f64,
    kind: FactorKind,
}

#[derive(Clone, Debug)]
enum FactorKind {
    Band(BandLu),
    Hessenberg(HessenbergLu),
}

impl ShiftedFactorization {
    pub fn mode(&self) -> usize {
        self.k
    }

    /// `(2 pi k)^2`.
    pub fn shift(&self) -> f64 {
        self.shift
    }
}

/// Precomputed square of an operator, handing out shifted factorizations
/// and counting the shifted solves performed through it.
#[derive(Debug)]
pub struct ShiftedSolver<'a> {
    op: &'a BandedOperator,
    form: SquareForm,
    solves: AtomicUsize,
}

impl<'a> ShiftedSolver<'a> {
    pub fn new(op: &'a BandedOperator) -> Result<Self> {
        let s = op.dim();
        let form = if op.is_tridiagonal() {
            let rows = (0..s)
                .map(|i| {
                    let mut row = [0.0; 5];
                    for (slot, j) in (i as isize - 2..=i as isize + 2).enumerate() {
                        if j < 0 || j as usize >= s {
                            continue;
                        }
                        let j = j as usize;
                        let lo = i.max(j).saturating_sub(1);
                        let hi = (i.min(j) + 1).min(s - 1);
                        row[slot] = (lo..=hi).map(|m| op.get(i, m) * op.get(m, j)).sum();
                    }
                    row
                })
                .collect();
            SquareForm::Pentadiagonal(rows)
        } else {
            let a = op.to_dense();
            let (q, h) = (&a * &a).hessenberg().unpack();
            SquareForm::Hessenberg { q, h }
        };
        Ok(Self {
            op,
            form,
            solves: AtomicUsize::new(0),
        })
    }

    pub fn operator(&self) -> &BandedOperator {
        self.op
    }

    pub fn factor(&self, k: usize) -> Result<ShiftedFactorization> {
        if k == 0 {
            return Err(Error::InvalidParameter("shift index k must be >= 1".into()));
        }
        let shift = (TAU * k as f64).powi(2);
        let kind = match &self.form {
            SquareForm::Pentadiagonal(rows) => {
                let n = rows.len();
                let lu = BandLu::factor(n, 2, 2, |i, j| {
                    let v = rows[i][j + 2 - i];
                    if i == j {
                        v + shift
                    } else {
                        v
                    }
                })?;
                FactorKind::Band(lu)
            }
            SquareForm::Hessenberg { h, .. } => {
                FactorKind::Hessenberg(HessenbergLu::factor(h, shift)?)
            }
        };
        Ok(ShiftedFactorization { k, shift, kind })
    }

    /// Solves with a factorization obtained from this solver.
    pub fn solve_with(&self, fac: &ShiftedFactorization, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.op.dim() {
            return Err(Error::Dimension {
                expected: self.op.dim(),
                found: b.len(),
            });
        }
        self.solves.fetch_add(1, Ordering::Relaxed);
        let x = match (&fac.kind, &self.form) {
            (FactorKind::Band(lu), _) => {
                let mut x = b.to_vec();
                lu.solve_in_place(&mut x);
                x
            }
            (FactorKind::Hessenberg(lu), SquareForm::Hessenberg { q, .. }) => {
                let mut y: Vec<f64> = (0..b.len())
                    .map(|j| q.column(j).iter().zip(b).map(|(a, c)| a * c).sum())
                    .collect();
                lu.solve_in_place(&mut y);
                let n = y.len();
                (0..n)
                    .map(|i| (0..n).map(|j| q[(i, j)] * y[j]).sum())
                    .collect()
            }
            _ => unreachable!("factorization kind follows the square form"),
        };
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular("shifted solve produced non-finite values"));
        }
        Ok(x)
    }

    /// `(A^2 + (2 pi k)^2 I)^{-1} b`.
    pub fn solve(&self, k: usize, b: &[f64]) -> Result<Vec<f64>> {
        let fac = self.factor(k)?;
        self.solve_with(&fac, b)
    }

    /// Number of shifted solves performed so far.
    pub fn solve_count(&self) -> usize {
        self.solves.load(Ordering::Relaxed)
    }
}

/// One-shot `(A^2 + (2 pi k)^2 I)^{-1} b`.
pub fn shifted_solve(a: &BandedOperator, k: usize, b: &[f64]) -> Result<Vec<f64>> {
    ShiftedSolver::new(a)?.solve(k, b)
}
