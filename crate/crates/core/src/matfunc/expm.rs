//! Dense matrix exponential by scaling and squaring with the degree-13
//! diagonal Pade approximant, and the reference solution built on it.

use nalgebra::DMatrix;

use super::operator::{BandedOperator, MAX_DENSE_DIM};
use crate::error::{Error, Result};

/// Scaling threshold on the 1-norm for the degree-13 approximant.
pub const THETA_13: f64 = 5.37;

const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn check_square(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if a.nrows() > MAX_DENSE_DIM {
        return Err(Error::DenseCap(a.nrows(), MAX_DENSE_DIM));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "matrix has non-finite entries".into(),
        ));
    }
    Ok(())
}

/// Odd and even parts `(U, V)` of the approximant at `b`, plus the number
/// of squarings applied to reach `b = a / 2^s`.
fn pade_parts(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>, u32) {
    let norm = one_norm(a);
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let b = a / 2f64.powi(squarings as i32);
    let n = b.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let b2 = &b * &b;
    let b4 = &b2 * &b2;
    let b6 = &b4 * &b2;
    let c = &PADE_13;
    let inner_u = &b6 * (&b6 * c[13] + &b4 * c[11] + &b2 * c[9]);
    let u = &b * (inner_u + &b6 * c[7] + &b4 * c[5] + &b2 * c[3] + &id * c[1]);
    let inner_v = &b6 * (&b6 * c[12] + &b4 * c[10] + &b2 * c[8]);
    let v = inner_v + &b6 * c[6] + &b4 * c[4] + &b2 * c[2] + &id * c[0];
    (u, v, squarings)
}

fn solve_dense(a: DMatrix<f64>, b: DMatrix<f64>, what: &'static str) -> Result<DMatrix<f64>> {
    let x = a.lu().solve(&b).ok_or(Error::Singular(what))?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular(what));
    }
    Ok(x)
}

/// `e^A`.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_square(a)?;
    let (u, v, squarings) = pade_parts(a);
    let mut r = solve_dense(&v - &u, &v + &u, "Pade denominator")?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

/// `e^A - I` without the cancellation of forming `e^A` first.
///
/// At the scaled matrix `e^B - I = (V - U)^{-1} 2U`; squaring uses
/// `e^{2B} - I = E (E + 2I)` with `E = e^B - I`.
pub fn expm1(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_square(a)?;
    let (u, v, squarings) = pade_parts(a);
    let n = a.nrows();
    let two = DMatrix::<f64>::identity(n, n) * 2.0;
    let mut e = solve_dense(&v - &u, &u * 2.0, "Pade denominator")?;
    for _ in 0..squarings {
        e = &e * (&e + &two);
    }
    Ok(e)
}

/// `e^{tA} f`, computed densely.
pub fn expm_action(a: &BandedOperator, t: f64, f: &[f64]) -> Result<Vec<f64>> {
    if f.len() != a.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            found: f.len(),
        });
    }
    let e = expm(&(a.to_dense() * t))?;
    Ok((&e * nalgebra::DVector::from_column_slice(f))
        .as_slice()
        .to_vec())
}

/// `q(tau, A) f = (e^A - I)^{-1} e^{tau A} A f`, the oracle for matrix
/// errors. `e^A - I` is formed by [`expm1`].
pub fn reference_solution(a: &BandedOperator, tau: f64, f: &[f64]) -> Result<Vec<f64>> {
    if f.len() != a.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            found: f.len(),
        });
    }
    let dense = a.to_dense();
    let em1 = expm1(&dense)?;
    let af = a.matvec(f);
    let rhs = expm(&(&dense * tau))? * nalgebra::DVector::from_column_slice(&af);
    let z = em1.lu().solve(&rhs).ok_or(Error::Singular("e^A - I"))?;
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("e^A - I"));
    }
    Ok(z.as_slice().to_vec())
}
