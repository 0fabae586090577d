//! Bernoulli polynomials with exactly generated coefficients, and the
//! polynomial part `h_{p-1}(tau) = sum_{k<p} B_k(tau) w^k / k!` of the
//! Lanczos representation.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest degree accepted by [`BernoulliTable::new`].
pub const DEFAULT_DEGREE_CAP: usize = 64;

/// Monomial coefficients of `B_0 .. B_max_degree`, ascending powers of tau.
#[derive(Clone, Debug)]
pub struct BernoulliTable {
    max_degree: usize,
    exact: Vec<Vec<BigRational>>,
    coeffs: Vec<Vec<f64>>,
    inv_factorial: Vec<f64>,
}

impl BernoulliTable {
    pub fn new(max_degree: usize) -> Result<Self> {
        Self::with_cap(max_degree, DEFAULT_DEGREE_CAP)
    }

    /// Builds the table by integrating `B_k' = k B_{k-1}` and fixing the
    /// constant with the zero-mean condition, all in rational arithmetic.
    pub fn with_cap(max_degree: usize, cap: usize) -> Result<Self> {
        if max_degree > cap {
            return Err(Error::DegreeCap {
                requested: max_degree,
                cap,
            });
        }
        let mut exact: Vec<Vec<BigRational>> = Vec::with_capacity(max_degree + 1);
        exact.push(vec![BigRational::one()]);
        for k in 1..=max_degree {
            let prev = &exact[k - 1];
            let kk = BigRational::from_integer(BigInt::from(k));
            let mut next = vec![BigRational::zero(); k + 1];
            for (j, c) in prev.iter().enumerate() {
                next[j + 1] = &kk * c / BigRational::from_integer(BigInt::from(j + 1));
            }
            // int_0^1 tau^j dtau = 1/(j+1)
            let mut mean = BigRational::zero();
            for (j, c) in next.iter().enumerate().skip(1) {
                mean += c / BigRational::from_integer(BigInt::from(j + 1));
            }
            next[0] = -mean;
            exact.push(next);
        }
        let coeffs = exact
            .iter()
            .map(|poly| poly.iter().map(rational_to_f64).collect())
            .collect();
        let mut inv_factorial = Vec::with_capacity(max_degree + 1);
        let mut fact = BigInt::one();
        for k in 0..=max_degree {
            if k > 0 {
                fact *= BigInt::from(k);
            }
            inv_factorial.push(rational_to_f64(&BigRational::new(
                BigInt::one(),
                fact.clone(),
            )));
        }
        Ok(Self {
            max_degree,
            exact,
            coeffs,
            inv_factorial,
        })
    }

    /// Process-wide table at the default cap.
    pub fn shared() -> &'static BernoulliTable {
        static TABLE: OnceLock<BernoulliTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            BernoulliTable::new(DEFAULT_DEGREE_CAP).expect("default degree is within the cap")
        })
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Exact coefficients of `B_k`, ascending powers.
    pub fn exact_coefficients(&self, k: usize) -> Option<&[BigRational]> {
        self.exact.get(k).map(Vec::as_slice)
    }

    pub fn coefficients(&self, k: usize) -> Option<&[f64]> {
        self.coeffs.get(k).map(Vec::as_slice)
    }

    pub fn eval(&self, k: usize, tau: f64) -> Result<f64> {
        let poly = self.coeffs.get(k).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "Bernoulli index {k} outside table of degree {}",
                self.max_degree
            ))
        })?;
        Ok(poly.iter().rev().fold(0.0, |acc, &c| acc * tau + c))
    }

    /// `1/k!` rounded once from the exact value.
    pub fn inv_factorial(&self, k: usize) -> f64 {
        self.inv_factorial[k]
    }

    /// Weights `B_k(tau)/k!` for `k = 0 .. order-1`; these are the Horner
    /// coefficients of `h_{order-1}` in the variable `w`.
    pub fn lanczos_weights(&self, order: usize, tau: f64) -> Result<Vec<f64>> {
        if order == 0 {
            return Err(Error::InvalidParameter("order p must be at least 1".into()));
        }
        if order - 1 > self.max_degree {
            return Err(Error::DegreeCap {
                requested: order - 1,
                cap: self.max_degree,
            });
        }
        (0..order)
            .map(|k| Ok(self.eval(k, tau)? * self.inv_factorial[k]))
            .collect()
    }

    /// `h_{p-1}(tau) = sum_{k=0}^{p-1} B_k(tau) w^k / k!`.
    pub fn lanczos_polynomial(&self, order: usize, tau: f64, w: Complex64) -> Result<Complex64> {
        let weights = self.lanczos_weights(order, tau)?;
        Ok(weights
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, &a| acc * w + a))
    }
}

/// Convenience wrapper over [`BernoulliTable::new`].
pub fn build_bernoulli_table(max_degree: usize) -> Result<BernoulliTable> {
    BernoulliTable::new(max_degree)
}

pub fn eval_bernoulli(table: &BernoulliTable, k: usize, tau: f64) -> Result<f64> {
    table.eval(k, tau)
}

pub fn lanczos_polynomial(
    table: &BernoulliTable,
    order: usize,
    tau: f64,
    w: Complex64,
) -> Result<Complex64> {
    table.lanczos_polynomial(order, tau, w)
}

fn rational_to_f64(r: &BigRational) -> f64 {
    // to_f64 on BigRational rounds correctly when both parts fit; our
    // numerators and denominators stay far below the f64 exponent range.
    r.to_f64().unwrap_or_else(|| {
        r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
    })
}
