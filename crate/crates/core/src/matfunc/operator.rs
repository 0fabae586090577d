use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest dimension accepted for dense storage and dense oracles.
pub const MAX_DENSE_DIM: usize = 1024;

/// A real square operator, stored by its three central bands or densely.
#[derive(Clone, Debug, PartialEq)]
pub enum BandedOperator {
    /// `sub[i] = A[i+1][i]`, `diag[i] = A[i][i]`, `sup[i] = A[i][i+1]`.
    Tridiagonal {
        sub: Vec<f64>,
        diag: Vec<f64>,
        sup: Vec<f64>,
    },
    Dense(DMatrix<f64>),
}

impl BandedOperator {
    pub fn tridiagonal(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let s = diag.len();
        if s == 0 {
            return Err(Error::InvalidParameter("empty operator".into()));
        }
        for band in [&sub, &sup] {
            if band.len() != s - 1 {
                return Err(Error::Dimension {
                    expected: s - 1,
                    found: band.len(),
                });
            }
        }
        Ok(Self::Tridiagonal { sub, diag, sup })
    }

    pub fn diagonal(diag: Vec<f64>) -> Result<Self> {
        let off = vec![0.0; diag.len().saturating_sub(1)];
        Self::tridiagonal(off.clone(), diag, off)
    }

    pub fn zeros(s: usize) -> Result<Self> {
        Self::diagonal(vec![0.0; s])
    }

    pub fn dense(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidParameter("empty operator".into()));
        }
        if m.nrows() > MAX_DENSE_DIM {
            return Err(Error::DenseCap(m.nrows(), MAX_DENSE_DIM));
        }
        Ok(Self::Dense(m))
    }

    /// Dense input, stored by bands when nothing lies outside them.
    pub fn from_dense(m: DMatrix<f64>) -> Result<Self> {
        let s = m.nrows();
        let banded = m.ncols() == s
            && (0..s).all(|j| (0..s).all(|i| i.abs_diff(j) <= 1 || m[(i, j)] == 0.0));
        if banded && s > 0 {
            let sub = (0..s - 1).map(|i| m[(i + 1, i)]).collect();
            let sup = (0..s - 1).map(|i| m[(i, i + 1)]).collect();
            let diag = (0..s).map(|i| m[(i, i)]).collect();
            return Self::tridiagonal(sub, diag, sup);
        }
        Self::dense(m)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Tridiagonal { diag, .. } => diag.len(),
            Self::Dense(m) => m.nrows(),
        }
    }

    pub fn is_tridiagonal(&self) -> bool {
        matches!(self, Self::Tridiagonal { .. })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            Self::Tridiagonal { sub, diag, sup } => {
                if i == j {
                    diag[i]
                } else if i == j + 1 {
                    sub[j]
                } else if j == i + 1 {
                    sup[i]
                } else {
                    0.0
                }
            }
            Self::Dense(m) => m[(i, j)],
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            Self::Tridiagonal { sub, sup, .. } => sub == sup,
            Self::Dense(m) => m == &m.transpose(),
        }
    }

    /// `A x`.
    ///
    /// # Panics
    /// If `x` does not have length `dim()`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim(), "matvec dimension mismatch");
        match self {
            Self::Tridiagonal { sub, diag, sup } => {
                let s = diag.len();
                (0..s)
                    .map(|i| {
                        let mut v = diag[i] * x[i];
                        if i > 0 {
                            v += sub[i - 1] * x[i - 1];
                        }
                        if i + 1 < s {
                            v += sup[i] * x[i + 1];
                        }
                        v
                    })
                    .collect()
            }
            Self::Dense(m) => {
                let s = m.nrows();
                (0..s)
                    .map(|i| (0..s).map(|j| m[(i, j)] * x[j]).sum())
                    .collect()
            }
        }
    }

    /// Checked [`matvec`](Self::matvec).
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(self.matvec(x))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            Self::Dense(m) => m.clone(),
            Self::Tridiagonal { .. } => {
                let s = self.dim();
                DMatrix::from_fn(s, s, |i, j| self.get(i, j))
            }
        }
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let s = self.dim();
        (0..s)
            .map(|j| {
                let rows = match self {
                    Self::Tridiagonal { .. } => j.saturating_sub(1)..(j + 2).min(s),
                    Self::Dense(_) => 0..s,
                };
                rows.map(|i| self.get(i, j).abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Row Gershgorin discs as `(center, radius)`.
    pub fn gershgorin_discs(&self) -> Vec<(f64, f64)> {
        let s = self.dim();
        (0..s)
            .map(|i| {
                let cols = match self {
                    Self::Tridiagonal { .. } => i.saturating_sub(1)..(i + 2).min(s),
                    Self::Dense(_) => 0..s,
                };
                let radius = cols.filter(|&j| j != i).map(|j| self.get(i, j).abs()).sum();
                (self.get(i, i), radius)
            })
            .collect()
    }

    /// Reads a Matrix Market `coordinate real|integer general|symmetric` file.
    pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty file".into(),
        })?;
        let header = header?.to_ascii_lowercase();
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() < 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
            return Err(Error::Parse {
                line: 1,
                msg: "missing %%MatrixMarket header".into(),
            });
        }
        if fields[2] != "coordinate" || !matches!(fields[3], "real" | "integer") {
            return Err(Error::Parse {
                line: 1,
                msg: format!("unsupported format {} {}", fields[2], fields[3]),
            });
        }
        let symmetric = match fields[4] {
            "general" => false,
            "symmetric" => true,
            other => {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("unsupported symmetry {other}"),
                })
            }
        };

        let mut size: Option<(usize, usize)> = None;
        let mut entries = Vec::new();
        for (idx, line) in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('%') {
                continue;
            }
            let lineno = idx + 1;
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| Error::Parse {
                line: lineno,
                msg: msg.to_string(),
            };
            match size {
                None => {
                    if parts.len() != 3 {
                        return Err(bad("expected `rows cols nnz`"));
                    }
                    let r: usize = parts[0].parse().map_err(|_| bad("bad row count"))?;
                    let c: usize = parts[1].parse().map_err(|_| bad("bad column count"))?;
                    if r != c || r == 0 {
                        return Err(bad("matrix must be square and nonempty"));
                    }
                    size = Some((r, c));
                }
                Some((r, _)) => {
                    if parts.len() != 3 {
                        return Err(bad("expected `i j value`"));
                    }
                    let i: usize = parts[0].parse().map_err(|_| bad("bad row index"))?;
                    let j: usize = parts[1].parse().map_err(|_| bad("bad column index"))?;
                    let v: f64 = parts[2].parse().map_err(|_| bad("bad value"))?;
                    if i == 0 || j == 0 || i > r || j > r {
                        return Err(bad("index out of range"));
                    }
                    entries.push((i - 1, j - 1, v));
                }
            }
        }
        let (s, _) = size.ok_or(Error::Parse {
            line: 1,
            msg: "missing size line".into(),
        })?;
        let tri = entries.iter().all(|&(i, j, _)| i.abs_diff(j) <= 1);
        if !tri && s > MAX_DENSE_DIM {
            return Err(Error::DenseCap(s, MAX_DENSE_DIM));
        }
        let put = |m: &mut dyn FnMut(usize, usize, f64)| {
            for &(i, j, v) in &entries {
                m(i, j, v);
                if symmetric && i != j {
                    m(j, i, v);
                }
            }
        };
        if tri {
            let (mut sub, mut diag, mut sup) = (vec![0.0; s - 1], vec![0.0; s], vec![0.0; s - 1]);
            put(&mut |i, j, v| {
                if i == j {
                    diag[i] += v;
                } else if i > j {
                    sub[j] += v;
                } else {
                    sup[i] += v;
                }
            });
            Self::tridiagonal(sub, diag, sup)
        } else {
            let mut m = DMatrix::zeros(s, s);
            put(&mut |i, j, v| m[(i, j)] += v);
            Self::dense(m)
        }
    }

    pub fn from_matrix_market(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_matrix_market(BufReader::new(file))
    }

    /// Writes a `coordinate real general` Matrix Market file.
    pub fn write_matrix_market<W: Write>(&self, mut out: W) -> Result<()> {
        let s = self.dim();
        let mut entries = Vec::new();
        for j in 0..s {
            for i in 0..s {
                let v = self.get(i, j);
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(out, "{s} {s} {}", entries.len())?;
        for (i, j, v) in entries {
            writeln!(out, "{} {} {v:e}", i + 1, j + 1)?;
        }
        Ok(())
    }

    /// Reads the compact tridiagonal format: one row per line holding
    /// `A[i][i-1] A[i][i] A[i][i+1]`. The first entry of the first line and
    /// the last entry of the last line are ignored. Lines starting with `#`
    /// are comments.
    pub fn read_triplet<R: BufRead>(reader: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let vals: std::result::Result<Vec<f64>, _> =
                line.split_whitespace().map(str::parse::<f64>).collect();
            match vals {
                Ok(v) if v.len() == 3 => rows.push([v[0], v[1], v[2]]),
                _ => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        msg: "expected three numbers `sub diag super`".into(),
                    })
                }
            }
        }
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 1,
                msg: "no rows".into(),
            });
        }
        let s = rows.len();
        let sub = (1..s).map(|i| rows[i][0]).collect();
        let diag = rows.iter().map(|r| r[1]).collect();
        let sup = (0..s - 1).map(|i| rows[i][2]).collect();
        Self::tridiagonal(sub, diag, sup)
    }

    pub fn from_triplet_file(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_triplet(BufReader::new(file))
    }

    /// Inverse of [`read_triplet`](Self::read_triplet); dense operators
    /// with entries outside the bands are rejected.
    pub fn write_triplet<W: Write>(&self, mut out: W) -> Result<()> {
        let s = self.dim();
        if let Self::Dense(m) = self {
            if !Self::from_dense(m.clone())?.is_tridiagonal() {
                return Err(Error::InvalidParameter(
                    "operator is not tridiagonal".into(),
                ));
            }
        }
        for i in 0..s {
            let lo = if i > 0 { self.get(i, i - 1) } else { 0.0 };
            let hi = if i + 1 < s { self.get(i, i + 1) } else { 0.0 };
            writeln!(out, "{lo:e} {:e} {hi:e}", self.get(i, i))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> BandedOperator {
        BandedOperator::tridiagonal(vec![1.0, 2.0], vec![-3.0, -4.0, -5.0], vec![0.5, 0.25])
            .unwrap()
    }

    #[test]
    fn band_dense_round_trip() {
        let a = sample();
        let d = a.to_dense();
        assert_eq!(d[(1, 0)], 1.0);
        assert_eq!(d[(0, 1)], 0.5);
        assert_eq!(d[(0, 2)], 0.0);
        assert_eq!(BandedOperator::from_dense(d.clone()).unwrap(), a);
        let full = BandedOperator::dense(d).unwrap();
        assert!(!full.is_tridiagonal());
        assert_eq!(full.matvec(&[1.0, 2.0, 3.0]), a.matvec(&[1.0, 2.0, 3.0]));
        assert_eq!(full.one_norm(), a.one_norm());
    }

    #[test]
    fn matvec_and_norms() {
        let a = sample();
        assert_eq!(a.matvec(&[1.0, 1.0, 1.0]), vec![-2.5, -2.75, -3.0]);
        assert_eq!(a.one_norm(), 6.5);
        assert!(a.apply(&[1.0]).is_err());
        assert!(!a.is_symmetric());
        let g = a.gershgorin_discs();
        assert_eq!(g[1], (-4.0, 1.25));
    }

    #[test]
    fn triplet_round_trip() {
        let a = sample();
        let mut buf = Vec::new();
        a.write_triplet(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let b = BandedOperator::read_triplet(format!("# comment\n{text}").as_bytes()).unwrap();
        assert_eq!(a, b);
        assert!(BandedOperator::read_triplet("1 2\n".as_bytes()).is_err());
    }

    #[test]
    fn matrix_market_round_trip() {
        let m = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let a = BandedOperator::from_dense(m).unwrap();
        assert!(!a.is_tridiagonal());
        let mut buf = Vec::new();
        a.write_matrix_market(&mut buf).unwrap();
        let b = BandedOperator::read_matrix_market(buf.as_slice()).unwrap();
        assert_eq!(a, b);

        let sym = "%%MatrixMarket matrix coordinate real symmetric\n% c\n2 2 2\n1 1 -2\n2 1 1\n";
        let b = BandedOperator::read_matrix_market(sym.as_bytes()).unwrap();
        assert!(b.is_tridiagonal() && b.is_symmetric());
        assert_eq!(b.get(0, 1), 1.0);

        let bad = "%%MatrixMarket matrix array real general\n2 2\n";
        assert!(matches!(
            BandedOperator::read_matrix_market(bad.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
