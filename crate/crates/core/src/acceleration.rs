//! Rational acceleration of the Lanczos residual.
//!
//! The tail `sum_{k>N} gamma_k cos(2 pi k tau)` is repeatedly multiplied by
//! `2 - 2 cos(2 pi tau)`. Each pass peels off two boundary terms and replaces
//! the coefficients by their negated second differences, which decay two
//! orders faster. Summing the peeled terms for `ell` passes yields the
//! correction `Gamma_1^(ell)` (and its sine analogue `Delta_1^(ell)`).

use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{self, check_pole, correction_sign, ApproxParams};

/// Corrections are refused when `|1 - cos(2 pi tau)|` falls below this.
pub const ENDPOINT_GUARD: f64 = 1e-8;

/// Default shift used by [`q0_shift`].
pub const DEFAULT_ALPHA: f64 = 0.125;

/// `gamma_k^(0)`: the cosine kernel of the residual without its sign.
pub fn gamma0(order: usize, k: usize, w: Complex64) -> Result<Complex64> {
    check_mode(order, k)?;
    check_pole(w)?;
    let (lo, hi) = fourier::mode_kernels(order, k, w);
    Ok(if order.is_multiple_of(2) { lo } else { hi })
}

/// `delta_k^(0)`: the sine kernel; equals `gamma0` with the parity of `p` flipped.
pub fn delta0(order: usize, k: usize, w: Complex64) -> Result<Complex64> {
    check_mode(order, k)?;
    check_pole(w)?;
    let (lo, hi) = fourier::mode_kernels(order, k, w);
    Ok(if order.is_multiple_of(2) { hi } else { lo })
}

fn check_mode(order: usize, k: usize) -> Result<()> {
    if order == 0 || k == 0 {
        return Err(Error::InvalidParameter(
            "order and mode index must be >= 1".into(),
        ));
    }
    Ok(())
}

/// Entry type of a [`CoefficientTriangle`].
pub trait TriangleEntry: Clone {
    /// `-prev + 2 * mid - next`.
    fn second_difference(prev: &Self, mid: &Self, next: &Self) -> Self;
}

impl TriangleEntry for f64 {
    fn second_difference(prev: &Self, mid: &Self, next: &Self) -> Self {
        -prev + 2.0 * mid - next
    }
}

impl TriangleEntry for Complex64 {
    fn second_difference(prev: &Self, mid: &Self, next: &Self) -> Self {
        -prev + 2.0 * mid - next
    }
}

impl TriangleEntry for Vec<f64> {
    fn second_difference(prev: &Self, mid: &Self, next: &Self) -> Self {
        prev.iter()
            .zip(mid)
            .zip(next)
            .map(|((a, b), c)| -a + 2.0 * b - c)
            .collect()
    }
}

/// Second-difference pyramid over the modes `N .. N + 2 ell`.
///
/// Level `j` holds `gamma_k^(j)` for `k = N + j ..= N + 2 ell - j`.
#[derive(Clone, Debug)]
pub struct CoefficientTriangle<T> {
    first_mode: usize,
    depth: usize,
    levels: Vec<Vec<T>>,
}

impl<T: TriangleEntry> CoefficientTriangle<T> {
    /// `base[j]` is the level-0 entry at mode `first_mode + j`.
    pub fn build(base: Vec<T>, first_mode: usize, depth: usize) -> Result<Self> {
        if base.len() < 2 * depth + 1 {
            return Err(Error::InvalidParameter(format!(
                "triangle of depth {depth} needs {} base entries, got {}",
                2 * depth + 1,
                base.len()
            )));
        }
        let mut base = base;
        base.truncate(2 * depth + 1);
        let mut levels = vec![base];
        for _ in 0..depth {
            let prev = levels.last().expect("level 0 exists");
            let next: Vec<T> = prev
                .windows(3)
                .map(|w| T::second_difference(&w[0], &w[1], &w[2]))
                .collect();
            levels.push(next);
        }
        Ok(Self {
            first_mode,
            depth,
            levels,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn first_mode(&self) -> usize {
        self.first_mode
    }

    pub fn level(&self, j: usize) -> Option<&[T]> {
        self.levels.get(j).map(Vec::as_slice)
    }

    /// Entry `gamma_k^(j)`, if inside the triangle.
    pub fn get(&self, j: usize, k: usize) -> Option<&T> {
        let offset = k.checked_sub(self.first_mode + j)?;
        self.levels.get(j)?.get(offset)
    }

    /// `(gamma_{N+j}^(j-1), gamma_{N+j+1}^(j-1))`, the pair entering the
    /// `j`-th correction term, `1 <= j <= ell`.
    pub fn boundary_pair(&self, j: usize) -> Option<(&T, &T)> {
        if j == 0 || j > self.depth {
            return None;
        }
        let k = self.first_mode + j;
        Some((self.get(j - 1, k)?, self.get(j - 1, k + 1)?))
    }
}

pub fn build_triangle<T: TriangleEntry>(
    base: Vec<T>,
    first_mode: usize,
    depth: usize,
) -> Result<CoefficientTriangle<T>> {
    CoefficientTriangle::build(base, first_mode, depth)
}

/// Trigonometric weights of the `j`-th correction term, already divided by
/// `(2 - 2 cos 2 pi tau)^j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectionWeights {
    /// Multiplies `gamma_{N+j}^(j-1)`.
    pub cos_lead: f64,
    /// Multiplies `gamma_{N+j+1}^(j-1)`.
    pub cos_next: f64,
    pub sin_lead: f64,
    pub sin_next: f64,
}

pub fn endpoint_denominator(tau: f64) -> Result<f64> {
    let one_minus_cos = 1.0 - (TAU * tau).cos();
    if one_minus_cos.abs() <= ENDPOINT_GUARD {
        return Err(Error::EndpointTau(tau));
    }
    Ok(2.0 * one_minus_cos)
}

/// Weights for `j = 1 ..= ell`.
pub fn correction_weights(modes: usize, depth: usize, tau: f64) -> Result<Vec<CorrectionWeights>> {
    if depth == 0 {
        return Ok(Vec::new());
    }
    let denom = endpoint_denominator(tau)?;
    let mut scale = 1.0;
    (1..=depth)
        .map(|j| {
            scale /= denom;
            let k = (modes + j) as f64;
            let (s_k, c_k) = (TAU * k * tau).sin_cos();
            let (s_km1, c_km1) = (TAU * (k - 1.0) * tau).sin_cos();
            Ok(CorrectionWeights {
                cos_lead: (2.0 * c_k - c_km1) * scale,
                cos_next: -c_k * scale,
                sin_lead: (2.0 * s_k - s_km1) * scale,
                sin_next: -s_k * scale,
            })
        })
        .collect()
}

/// The correction `sign * 2 (Gamma_1^(ell) + Delta_1^(ell))`, kept in parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectionTerm {
    /// `Gamma_1^(ell)`.
    pub gamma_part: Complex64,
    /// `Delta_1^(ell)`.
    pub delta_part: Complex64,
    /// `(-1)^{ceil((p+1)/2)}`; the sign of the sine part for every `p`.
    pub sign: f64,
    /// Sign of the cosine part: equal to `sign` for even `p`, opposite for odd `p`.
    pub gamma_sign: f64,
}

impl CorrectionTerm {
    pub fn value(&self) -> Complex64 {
        2.0 * (self.gamma_sign * self.gamma_part + self.sign * self.delta_part)
    }
}

/// Combines triangle pairs with the weights; works for scalar entries.
fn weighted_boundary_sum(
    triangle: &CoefficientTriangle<Complex64>,
    weights: &[CorrectionWeights],
    cosine: bool,
) -> Complex64 {
    let mut acc = crate::summation::ComplexSum::new();
    for (j, wt) in weights.iter().enumerate() {
        let (lead, next) = triangle
            .boundary_pair(j + 1)
            .expect("triangle covers depth");
        let (a, b) = if cosine {
            (wt.cos_lead, wt.cos_next)
        } else {
            (wt.sin_lead, wt.sin_next)
        };
        acc.add(lead * a + next * b);
    }
    acc.value()
}

pub fn correction(
    order: usize,
    modes: usize,
    depth: usize,
    tau: f64,
    w: Complex64,
) -> Result<CorrectionTerm> {
    let (gamma_sign, sign) = fourier::coefficient_signs(order);
    debug_assert_eq!(sign, correction_sign(order));
    let zero = Complex64::new(0.0, 0.0);
    if depth == 0 {
        return Ok(CorrectionTerm {
            gamma_part: zero,
            delta_part: zero,
            sign,
            gamma_sign,
        });
    }
    let weights = correction_weights(modes, depth, tau)?;
    let gammas = (modes..=modes + 2 * depth)
        .map(|k| gamma0(order, k, w))
        .collect::<Result<Vec<_>>>()?;
    let deltas = (modes..=modes + 2 * depth)
        .map(|k| delta0(order, k, w))
        .collect::<Result<Vec<_>>>()?;
    let gt = CoefficientTriangle::build(gammas, modes, depth)?;
    let dt = CoefficientTriangle::build(deltas, modes, depth)?;
    Ok(CorrectionTerm {
        gamma_part: weighted_boundary_sum(&gt, &weights, true),
        delta_part: weighted_boundary_sum(&dt, &weights, false),
        sign,
        gamma_sign,
    })
}

/// `G_{p,N,ell}(tau, w) = h_{p-1} + f_{p,N} + sign * 2 (Gamma + Delta)`.
pub fn accelerated_approx(params: &ApproxParams, w: Complex64) -> Result<Complex64> {
    let base = fourier::g_approx(params, w)?;
    if params.depth == 0 {
        return Ok(base);
    }
    let corr = correction(params.order, params.modes, params.depth, params.tau, w)?;
    Ok(base + corr.value())
}

/// Principal part of `R_{p,N}` at interior `tau`.
///
/// For even `p` this is `(-1)^{ceil((p+1)/2)} Gamma_{p,N} / (1 - cos 2 pi tau)`
/// with `Gamma_{p,N} = gamma_{N+1}[2cos(2pi(N+1)tau) - cos(2pi N tau)] - gamma_{N+2} cos(2pi(N+1)tau)`.
/// For odd `p` the sine kernel decays slowest, so the sine analogue built
/// from `delta_{N+1}, delta_{N+2}` is returned instead.
pub fn leading_error_term(order: usize, modes: usize, tau: f64, w: Complex64) -> Result<Complex64> {
    let weights = correction_weights(modes, 1, tau)?;
    let wt = weights[0];
    let sign = correction_sign(order);
    if order.is_multiple_of(2) {
        let g1 = gamma0(order, modes + 1, w)?;
        let g2 = gamma0(order, modes + 2, w)?;
        Ok(2.0 * sign * (g1 * wt.cos_lead + g2 * wt.cos_next))
    } else {
        let d1 = delta0(order, modes + 1, w)?;
        let d2 = delta0(order, modes + 2, w)?;
        Ok(2.0 * sign * (d1 * wt.sin_lead + d2 * wt.sin_next))
    }
}

/// Evaluates `e^x` for the shifted `tau = 0` formula.
pub trait ExpEvaluator: Send + Sync {
    fn exp(&self, x: Complex64) -> Result<Complex64>;
}

/// The library exponential.
#[derive(Clone, Copy, Debug, Default)]
pub struct DirectExp;

impl ExpEvaluator for DirectExp {
    fn exp(&self, x: Complex64) -> Result<Complex64> {
        let v = x.exp();
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluator(format!("exp({x}) is not finite")))
        }
    }
}

/// Rational approximant `N_r(zeta) / D_r(zeta)` of `e^{-zeta}`, applied as
/// `e^x ~ N_r(-x) / D_r(-x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalExp {
    numerator: Vec<f64>,
    denominator: Vec<f64>,
}

impl RationalExp {
    /// Coefficients in ascending powers; both of length `r + 1`.
    pub fn new(numerator: Vec<f64>, denominator: Vec<f64>) -> Result<Self> {
        if numerator.is_empty() || numerator.len() != denominator.len() {
            return Err(Error::InvalidParameter(
                "numerator and denominator need r + 1 coefficients each".into(),
            ));
        }
        Ok(Self {
            numerator,
            denominator,
        })
    }

    /// Diagonal `[r/r]` Pade approximant of `e^{-zeta}` at the origin.
    pub fn pade(degree: usize) -> Self {
        let mut num = Vec::with_capacity(degree + 1);
        let mut den = Vec::with_capacity(degree + 1);
        let mut c = 1.0;
        for j in 0..=degree {
            if j > 0 {
                c *= (degree + 1 - j) as f64 / (j as f64 * (2 * degree + 1 - j) as f64);
            }
            num.push(if j % 2 == 0 { c } else { -c });
            den.push(c);
        }
        Self {
            numerator: num,
            denominator: den,
        }
    }

    pub fn degree(&self) -> usize {
        self.numerator.len() - 1
    }

    /// Plain-text format: the degree `r`, then `r + 1` numerator and
    /// `r + 1` denominator coefficients in ascending order, separated by
    /// whitespace. Lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.starts_with('#') {
                continue;
            }
            for tok in line.split_whitespace() {
                tokens.push((idx + 1, tok));
            }
        }
        let mut it = tokens.into_iter();
        let (line, tok) = it.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty file".into(),
        })?;
        let degree: usize = tok.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad degree {tok:?}"),
        })?;
        let mut coeffs = Vec::with_capacity(2 * degree + 2);
        for (line, tok) in it {
            coeffs.push(tok.parse::<f64>().map_err(|_| Error::Parse {
                line,
                msg: format!("bad coefficient {tok:?}"),
            })?);
        }
        if coeffs.len() != 2 * degree + 2 {
            return Err(Error::Parse {
                line,
                msg: format!(
                    "expected {} coefficients, found {}",
                    2 * degree + 2,
                    coeffs.len()
                ),
            });
        }
        let den = coeffs.split_off(degree + 1);
        Self::new(coeffs, den)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.degree());
        for row in [&self.numerator, &self.denominator] {
            let line: Vec<String> = row.iter().map(|c| format!("{c:e}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl ExpEvaluator for RationalExp {
    fn exp(&self, x: Complex64) -> Result<Complex64> {
        let zeta = -x;
        let horner = |c: &[f64]| {
            c.iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * zeta + a)
        };
        let d = horner(&self.denominator);
        if d.norm() == 0.0 {
            return Err(Error::Evaluator(format!("denominator vanishes at {zeta}")));
        }
        Ok(horner(&self.numerator) / d)
    }
}

/// `q(0, w) = G_{p,N,ell}(1 - alpha, w) e^{alpha w} - w`, avoiding the
/// endpoint where the correction degenerates.
pub fn q0_shift(
    w: Complex64,
    alpha: f64,
    exp_eval: &dyn ExpEvaluator,
    params: &ApproxParams,
) -> Result<Complex64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} outside (0, 1)"
        )));
    }
    let shifted = params.with_tau(1.0 - alpha);
    let g = accelerated_approx(&shifted, w)?;
    Ok(g * exp_eval.exp(w * alpha)? - w)
}
