//! Grids on `[0, a]`, the three-point Laplacian with homogeneous Dirichlet
//! conditions, and the scaled cyclic shift.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matfunc::BandedOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    Uniform,
    Geometric,
    /// Imported nodes without a known generator.
    Nonuniform,
}

/// Nodes `x_0 < x_1 < ... < x_{s+1}`; `s` interior nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    kind: GridKind,
}

impl Grid {
    pub fn new(nodes: Vec<f64>, kind: GridKind) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidParameter(
                "a grid needs at least one interior node".into(),
            ));
        }
        if nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::InvalidParameter(
                "grid nodes must be finite and increasing".into(),
            ));
        }
        Ok(Self { nodes, kind })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn interior(&self) -> &[f64] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    pub fn interior_size(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    /// Right endpoint `x_{s+1}`.
    pub fn length(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        for x in &self.nodes {
            writeln!(out, "{x:e}")?;
        }
        Ok(())
    }

    /// Reads one node per line; the kind is `Uniform` when the spacing is
    /// constant to `1e-14` relative to the grid length and `Nonuniform`
    /// otherwise.
    pub fn read_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut nodes = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            nodes.push(line.parse::<f64>().map_err(|e| Error::Parse {
                line: idx + 1,
                msg: e.to_string(),
            })?);
        }
        let h0 = nodes
            .get(1)
            .zip(nodes.first())
            .map(|(b, a)| b - a)
            .unwrap_or(0.0);
        let scale = nodes.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let uniform = nodes
            .windows(2)
            .all(|p| ((p[1] - p[0]) - h0).abs() <= 1e-14 * scale);
        let kind = if uniform {
            GridKind::Uniform
        } else {
            GridKind::Nonuniform
        };
        Self::new(nodes, kind)
    }
}

/// `x_i = i a / (s + 1)`, `i = 0 ..= s + 1`.
pub fn uniform_grid(a: f64, s: usize) -> Result<Grid> {
    if !(a > 0.0) || s == 0 {
        return Err(Error::InvalidParameter(format!(
            "uniform grid needs a > 0, s >= 1 (a={a}, s={s})"
        )));
    }
    let h = a / (s + 1) as f64;
    let mut nodes: Vec<f64> = (0..=s + 1).map(|i| i as f64 * h).collect();
    nodes[s + 1] = a;
    Grid::new(nodes, GridKind::Uniform)
}

/// `x_0 = 0`, `x_1`, `x_{i+1} = x_i + sigma (x_i - x_{i-1})` until `s`
/// interior nodes and the right endpoint exist.
pub fn geometric_grid(x1: f64, sigma: f64, s: usize) -> Result<Grid> {
    if !(x1 > 0.0) || !(sigma > 0.0) || s == 0 {
        return Err(Error::InvalidParameter(format!(
            "geometric grid needs x1 > 0, sigma > 0, s >= 1 (x1={x1}, sigma={sigma}, s={s})"
        )));
    }
    let mut nodes = vec![0.0, x1];
    while nodes.len() < s + 2 {
        let n = nodes.len();
        nodes.push(nodes[n - 1] + sigma * (nodes[n - 1] - nodes[n - 2]));
    }
    Grid::new(nodes, GridKind::Geometric)
}

/// Three-point second-derivative operator on the interior nodes:
///
/// ```text
/// a_{i,i}   = -2 / ((x_{i+1} - x_i)(x_i - x_{i-1}))
/// a_{i+1,i} =  2 / ((x_{i+1} - x_i)(x_{i+2} - x_i))
/// a_{i,i+1} =  2 / ((x_{i+1} - x_i)(x_{i+1} - x_{i-1}))
/// ```
pub fn discretize_laplacian(grid: &Grid) -> Result<BandedOperator> {
    let x = grid.nodes();
    let s = grid.interior_size();
    if s < 2 {
        return Err(Error::InvalidParameter(
            "the Laplacian needs s >= 2 interior nodes".into(),
        ));
    }
    // interior node i (1-based) is matrix row i - 1
    let diag = (1..=s)
        .map(|i| -2.0 / ((x[i + 1] - x[i]) * (x[i] - x[i - 1])))
        .collect();
    let sub = (1..s)
        .map(|i| 2.0 / ((x[i + 1] - x[i]) * (x[i + 2] - x[i])))
        .collect();
    let sup = (1..s)
        .map(|i| 2.0 / ((x[i + 1] - x[i]) * (x[i + 1] - x[i - 1])))
        .collect();
    BandedOperator::tridiagonal(sub, diag, sup)
}

/// `scale * C` with `C e_i = e_{i+1}` and `C e_s = e_1`, stored densely.
pub fn circulant_shift(s: usize, scale: f64) -> Result<BandedOperator> {
    if s < 2 {
        return Err(Error::InvalidParameter("circulant needs s >= 2".into()));
    }
    let mut m = DMatrix::zeros(s, s);
    for i in 0..s {
        m[((i + 1) % s, i)] = scale;
    }
    BandedOperator::dense(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_examples() {
        assert_eq!(uniform_grid(1.0, 1).unwrap().nodes(), &[0.0, 0.5, 1.0]);
        let g = uniform_grid(24.0, 512).unwrap();
        let h = 24.0 / 513.0;
        // node differences carry rounding at the scale of a, not of h
        for p in g.nodes().windows(2) {
            assert!(((p[1] - p[0]) - h).abs() <= 1e-15 * 24.0);
        }
        assert!(uniform_grid(0.0, 3).is_err());
    }

    #[test]
    fn geometric_examples() {
        let g = geometric_grid(0.01, 1.005, 4).unwrap();
        assert_eq!(g.nodes().len(), 6);
        assert!((g.nodes()[2] - 0.02005).abs() < 1e-16);
        let flat = geometric_grid(0.25, 1.0, 3).unwrap();
        for (i, x) in flat.nodes().iter().enumerate() {
            assert!((x - 0.25 * i as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn laplacian_small_cases() {
        let g = Grid::new(vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], GridKind::Uniform).unwrap();
        let a = discretize_laplacian(&g).unwrap().to_dense();
        let expected = [[-18.0, 9.0], [9.0, -18.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[(i, j)] - expected[i][j]).abs() < 1e-12);
            }
        }
        let h = 24.0 / 513.0;
        let a = discretize_laplacian(&uniform_grid(24.0, 512).unwrap()).unwrap();
        assert!((a.get(10, 10) + 2.0 / (h * h)).abs() <= 1e-12 / (h * h));
        assert!((a.get(10, 11) - 1.0 / (h * h)).abs() <= 1e-12 / (h * h));
        assert!(discretize_laplacian(&uniform_grid(1.0, 1).unwrap()).is_err());
    }

    #[test]
    fn circulant_is_a_cycle() {
        let c = circulant_shift(3, 1.0).unwrap();
        assert_eq!(c.matvec(&[1.0, 2.0, 3.0]), vec![3.0, 1.0, 2.0]);
        let mut v = vec![1.0, 2.0, 3.0, 4.0];
        let c = circulant_shift(4, 1.0).unwrap();
        for _ in 0..4 {
            v = c.matvec(&v);
        }
        assert_eq!(v, vec![1.0, 2.0, 3.0, 4.0]);
        assert!(!c.is_tridiagonal());
    }

    #[test]
    fn text_round_trip() {
        let g = geometric_grid(0.01, 1.005, 20).unwrap();
        let mut buf = Vec::new();
        g.write_text(&mut buf).unwrap();
        let back = Grid::read_text(buf.as_slice()).unwrap();
        assert_eq!(back.nodes(), g.nodes());
        assert_eq!(back.kind(), GridKind::Nonuniform);
        let u = Grid::read_text("0\n0.5\n1\n".as_bytes()).unwrap();
        assert_eq!(u.kind(), GridKind::Uniform);
        assert!(Grid::read_text("0\nx\n".as_bytes()).is_err());
    }
}
