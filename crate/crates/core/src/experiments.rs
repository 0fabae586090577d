//! The numerical experiments behind the `bernact` commands, as library
//! functions returning [`ExperimentReport`]s.

use std::f64::consts::TAU;
use std::time::Instant;

use rayon::prelude::*;

use crate::acceleration::{accelerated_approx, q0_shift, DirectExp};
use crate::arnoldi::{arnoldi_q_approx_at, orthogonality_loss_at, KrylovDecomposition};
use crate::bvp::{
    circulant_shift, discretize_laplacian, geometric_grid, uniform_grid, Grid, GridKind,
};
use crate::error::{Error, Result};
use crate::fourier::{delta_of_n, reference_q};
use crate::matfunc::{reference_solution, ActionPlan, BandedOperator};
use crate::report::{ExperimentReport, ReportRow};
use crate::{ApproxParams, Complex64};

/// Domain length of the uniform test grid.
pub const UNIFORM_LENGTH: f64 = 24.0;
/// First spacing and ratio of the geometric test grid.
pub const GEOMETRIC_FIRST_STEP: f64 = 0.01;
pub const GEOMETRIC_RATIO: f64 = 1.005;
/// Scale of the cyclic-shift test operator.
pub const CIRCULANT_SCALE: f64 = 1e-8;

/// Max-norm distance.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn test_grid(kind: GridKind, s: usize) -> Result<Grid> {
    match kind {
        GridKind::Uniform => uniform_grid(UNIFORM_LENGTH, s),
        GridKind::Geometric => geometric_grid(GEOMETRIC_FIRST_STEP, GEOMETRIC_RATIO, s),
        GridKind::Nonuniform => Err(Error::InvalidParameter(
            "test grids are uniform or geometric".into(),
        )),
    }
}

/// Operator of test problem 1 (uniform Laplacian), 2 and 3 (geometric
/// Laplacian) or 4 (scaled cyclic shift), with interior size `s`.
pub fn test_operator(test: u8, s: usize) -> Result<BandedOperator> {
    match test {
        1 => discretize_laplacian(&test_grid(GridKind::Uniform, s)?),
        2 | 3 => discretize_laplacian(&test_grid(GridKind::Geometric, s)?),
        4 => circulant_shift(s, CIRCULANT_SCALE),
        other => Err(Error::InvalidParameter(format!(
            "unknown test problem {other}"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaTableConfig {
    pub z: Vec<f64>,
    pub modes: Vec<usize>,
    /// Number of residual modes summed past `N`.
    pub tail: usize,
}

impl Default for DeltaTableConfig {
    fn default() -> Self {
        Self {
            z: vec![1.0, 0.1, 10.0],
            modes: vec![512, 1024, 2048],
            tail: 2048,
        }
    }
}

/// `Delta(N)` for every `(z, N)`, summing modes `N+1 ..= N+K`.
pub fn cmd_delta_table(cfg: &DeltaTableConfig) -> Result<ExperimentReport> {
    if let Some(&max_n) = cfg.modes.iter().max() {
        if cfg.tail < max_n {
            return Err(Error::InvalidParameter(format!(
                "tail length K = {} is smaller than the largest N = {max_n}",
                cfg.tail
            )));
        }
    }
    let jobs: Vec<(f64, usize)> = cfg
        .z
        .iter()
        .flat_map(|&z| cfg.modes.iter().map(move |&n| (z, n)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(z, n)| {
            let v = delta_of_n(Complex64::new(z, 0.0), n, n + cfg.tail)?;
            let mut row = ReportRow::new("delta-table", "Delta", v);
            row.p = Some(4);
            row.n = Some(1);
            row.modes = Some(n);
            row.z = Some(z);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = ExperimentReport::new();
    report.extend(rows);
    report.sort();
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarErrorConfig {
    pub w_min: f64,
    pub w_max: f64,
    pub points: usize,
    pub modes: usize,
    pub taus: Vec<f64>,
    pub orders: Vec<usize>,
    pub depths: Vec<usize>,
    /// Enables the shifted evaluation at `tau = 0`.
    pub alpha: Option<f64>,
}

impl Default for ScalarErrorConfig {
    fn default() -> Self {
        Self {
            w_min: -10.0,
            w_max: 0.0,
            points: 400,
            modes: 100,
            taus: vec![0.125, 0.0078125],
            orders: vec![2],
            depths: vec![0, 3],
            alpha: None,
        }
    }
}

impl ScalarErrorConfig {
    pub fn w_grid(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.w_min],
            m => (0..m)
                .map(|i| self.w_min + (self.w_max - self.w_min) * i as f64 / (m - 1) as f64)
                .collect(),
        }
    }
}

/// Relative error `|q - G| / |q|` over a real `w` grid. At `tau = 0` with
/// a positive depth the shifted evaluation is used when `alpha` is set;
/// the `z` column holds `w / (2 pi)`.
pub fn cmd_scalar_error(cfg: &ScalarErrorConfig) -> Result<ExperimentReport> {
    if !(cfg.w_min <= cfg.w_max) {
        return Err(Error::InvalidParameter(
            "w-min must not exceed w-max".into(),
        ));
    }
    let ws = cfg.w_grid();
    let mut jobs = Vec::new();
    for &tau in &cfg.taus {
        for &p in &cfg.orders {
            for &ell in &cfg.depths {
                let params = ApproxParams::new(p, cfg.modes, ell, tau)?;
                let shifted = ell > 0 && tau == 0.0 && cfg.alpha.is_some();
                if ell > 0 && !shifted {
                    crate::acceleration::endpoint_denominator(tau)?;
                }
                jobs.push((params, shifted));
            }
        }
    }
    let rows = jobs
        .par_iter()
        .map(|&(params, shifted)| {
            ws.iter()
                .map(|&w| {
                    let wc = Complex64::new(w, 0.0);
                    let exact = reference_q(params.tau, wc)?;
                    let approx = if shifted {
                        q0_shift(wc, cfg.alpha.expect("checked above"), &DirectExp, &params)?
                    } else {
                        accelerated_approx(&params, wc)?
                    };
                    let method = if shifted { "G-shift" } else { "G" };
                    let mut row = ReportRow::new(
                        "scalar-error",
                        method,
                        (exact - approx).norm() / exact.norm(),
                    );
                    row.p = Some(params.order);
                    row.modes = Some(params.modes);
                    row.ell = Some(params.depth);
                    row.tau = Some(params.tau);
                    row.z = Some(w / TAU);
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = ExperimentReport::new();
    report.extend(rows.into_iter().flatten());
    report.sort();
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BvpCompareConfig {
    pub grid: GridKind,
    pub s: usize,
    pub taus: Vec<f64>,
    pub modes: Vec<usize>,
    /// `n` values of the classical expansion, `p = 2n + 2`.
    pub lanczos_n: Vec<usize>,
    pub depths: Vec<usize>,
    /// Order of the accelerated expansion.
    pub order: usize,
    /// Replaces the grid operator when set.
    pub operator: Option<BandedOperator>,
    pub timing: bool,
}

impl Default for BvpCompareConfig {
    fn default() -> Self {
        Self {
            grid: GridKind::Uniform,
            s: 512,
            taus: vec![1.0 / 12.0, 1.0 / 6.0],
            modes: vec![50, 100, 200],
            lanczos_n: vec![2, 3, 4],
            depths: vec![2, 3, 4],
            order: 2,
            operator: None,
            timing: false,
        }
    }
}

impl BvpCompareConfig {
    pub fn experiment_name(&self) -> &'static str {
        match (&self.operator, self.grid) {
            (Some(_), _) => "custom",
            (None, GridKind::Uniform) => "test1",
            (None, _) => "test2",
        }
    }

    pub fn build_operator(&self) -> Result<BandedOperator> {
        match &self.operator {
            Some(op) => Ok(op.clone()),
            None => discretize_laplacian(&test_grid(self.grid, self.s)?),
        }
    }
}

/// Max-norm errors of the classical (`Lanc`) and accelerated (`FastLanc`)
/// actions against the exponential reference, with `f` all ones.
pub fn cmd_bvp_compare(cfg: &BvpCompareConfig) -> Result<ExperimentReport> {
    let a = cfg.build_operator()?;
    let f = vec![1.0; a.dim()];
    for &tau in &cfg.taus {
        if !cfg.depths.is_empty() {
            crate::acceleration::endpoint_denominator(tau)?;
        }
        ApproxParams::new(cfg.order, 1, 0, tau)?;
    }
    let refs: Vec<Vec<f64>> = cfg
        .taus
        .par_iter()
        .map(|&tau| reference_solution(&a, tau, &f))
        .collect::<Result<_>>()?;

    let mut jobs = Vec::new();
    for &n in &cfg.modes {
        for &ln in &cfg.lanczos_n {
            jobs.push(("Lanc", 2 * ln + 2, Some(ln), n, 0));
        }
        for &ell in &cfg.depths {
            jobs.push(("FastLanc", cfg.order, None, n, ell));
        }
    }
    let name = cfg.experiment_name();
    let rows = jobs
        .par_iter()
        .map(|&(method, p, ln, n, ell)| {
            let start = Instant::now();
            let plan = ActionPlan::new(&a, p, n, ell, &f)?;
            let build = start.elapsed().as_secs_f64();
            cfg.taus
                .iter()
                .zip(&refs)
                .map(|(&tau, z)| {
                    let t0 = Instant::now();
                    let y = plan.eval(tau)?;
                    let mut row = ReportRow::new(name, method, max_abs_diff(&y, z));
                    row.p = Some(p);
                    row.n = ln;
                    row.modes = Some(n);
                    row.ell = (method == "FastLanc").then_some(ell);
                    row.tau = Some(tau);
                    if cfg.timing {
                        row.elapsed_s = Some(build + t0.elapsed().as_secs_f64());
                    }
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = ExperimentReport::new();
    report.extend(rows.into_iter().flatten());
    report.sort();
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArnoldiCompareConfig {
    /// 3 (geometric Laplacian) or 4 (scaled cyclic shift).
    pub test: u8,
    pub s: usize,
    pub steps: usize,
    pub tau: f64,
    pub order: usize,
    pub modes: usize,
    /// Defaults to 5 for test 3 and 4 for test 4.
    pub depth: Option<usize>,
    pub reorthogonalize: bool,
    pub timing: bool,
}

impl Default for ArnoldiCompareConfig {
    fn default() -> Self {
        Self {
            test: 3,
            s: 512,
            steps: 100,
            tau: 1.0 / 6.0,
            order: 2,
            modes: 50,
            depth: None,
            reorthogonalize: false,
            timing: false,
        }
    }
}

/// Arnoldi error (`Arnoldi`) and orthogonality loss (`Arnoldi-orth`) per
/// step, stored with the step in the `N` column, plus one `FastLanc`
/// summary row. Steps stop early at breakdown.
pub fn cmd_arnoldi_compare(cfg: &ArnoldiCompareConfig) -> Result<ExperimentReport> {
    if cfg.test != 3 && cfg.test != 4 {
        return Err(Error::InvalidParameter(format!(
            "arnoldi-compare supports tests 3 and 4, got {}",
            cfg.test
        )));
    }
    let depth = cfg.depth.unwrap_or(if cfg.test == 3 { 5 } else { 4 });
    let params = ApproxParams::new(cfg.order, cfg.modes, depth, cfg.tau)?;
    if cfg.steps == 0 || cfg.steps > cfg.s {
        return Err(Error::InvalidParameter(format!(
            "steps must lie in 1..={}",
            cfg.s
        )));
    }
    let a = test_operator(cfg.test, cfg.s)?;
    let f = vec![1.0; a.dim()];
    let z = reference_solution(&a, cfg.tau, &f)?;
    let name = format!("test{}", cfg.test);
    let mut report = ExperimentReport::new();

    let start = Instant::now();
    let g = ActionPlan::from_params(&a, &params, &f)?.eval(cfg.tau)?;
    let mut summary = ReportRow::new(&name, "FastLanc", max_abs_diff(&g, &z));
    summary.p = Some(params.order);
    summary.modes = Some(params.modes);
    summary.ell = Some(params.depth);
    summary.tau = Some(cfg.tau);
    if cfg.timing {
        summary.elapsed_s = Some(start.elapsed().as_secs_f64());
    }
    report.push(summary);

    let start = Instant::now();
    let mut dec = KrylovDecomposition::start(&a, &f, cfg.reorthogonalize)?;
    while dec.steps() < cfg.steps && dec.step(&a) {
        let j = dec.steps();
        let y = arnoldi_q_approx_at(&dec, j, cfg.tau)?;
        let elapsed = start.elapsed().as_secs_f64();
        for (method, value) in [
            ("Arnoldi", max_abs_diff(&y, &z)),
            ("Arnoldi-orth", orthogonality_loss_at(&dec, j)),
        ] {
            let mut row = ReportRow::new(&name, method, value);
            row.modes = Some(j);
            row.tau = Some(cfg.tau);
            if cfg.timing {
                row.elapsed_s = Some(elapsed);
            }
            report.push(row);
        }
    }
    report.sort();
    Ok(report)
}
