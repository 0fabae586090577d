//! Experiment rows and their CSV form.

use std::cmp::Ordering;
use std::io::Write;

use crate::error::{Error, Result};

/// CSV header, written once per report.
pub const CSV_HEADER: [&str; 10] = [
    "experiment",
    "method",
    "p",
    "n",
    "N",
    "ell",
    "tau",
    "z",
    "value",
    "elapsed_s",
];

/// One measured value with its complete parameter tuple. Inapplicable
/// parameters are `None` and print as empty fields.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub experiment: String,
    pub method: String,
    pub p: Option<usize>,
    pub n: Option<usize>,
    /// Mode count `N`; Arnoldi rows store the step index here.
    pub modes: Option<usize>,
    pub ell: Option<usize>,
    pub tau: Option<f64>,
    pub z: Option<f64>,
    pub value: f64,
    pub elapsed_s: Option<f64>,
}

impl ReportRow {
    pub fn new(experiment: &str, method: &str, value: f64) -> Self {
        Self {
            experiment: experiment.to_string(),
            method: method.to_string(),
            p: None,
            n: None,
            modes: None,
            ell: None,
            tau: None,
            z: None,
            value,
            elapsed_s: None,
        }
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        fn f(a: Option<f64>, b: Option<f64>) -> Ordering {
            match (a, b) {
                (Some(x), Some(y)) => x.total_cmp(&y),
                (a, b) => a.is_some().cmp(&b.is_some()),
            }
        }
        self.experiment
            .cmp(&other.experiment)
            .then_with(|| self.method.cmp(&other.method))
            .then_with(|| self.p.cmp(&other.p))
            .then_with(|| self.n.cmp(&other.n))
            .then_with(|| self.modes.cmp(&other.modes))
            .then_with(|| self.ell.cmp(&other.ell))
            .then_with(|| f(self.tau, other.tau))
            .then_with(|| f(self.z, other.z))
    }

    fn fields(&self) -> [String; 10] {
        fn u(v: Option<usize>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        fn r(v: Option<f64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        [
            self.experiment.clone(),
            self.method.clone(),
            u(self.p),
            u(self.n),
            u(self.modes),
            u(self.ell),
            r(self.tau),
            r(self.z),
            format!("{:e}", self.value),
            self.elapsed_s
                .map(|t| format!("{t:.6}"))
                .unwrap_or_default(),
        ]
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentReport {
    rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, rows: impl IntoIterator<Item = ReportRow>) {
        self.rows.extend(rows);
    }

    pub fn rows(&self) -> &[ReportRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// Orders rows by `(experiment, method, p, n, N, ell, tau, z)`.
    pub fn sort(&mut self) {
        self.rows.sort_by(ReportRow::key_cmp);
    }

    /// Rows matching a method, in stored order.
    pub fn by_method<'a>(&'a self, method: &'a str) -> impl Iterator<Item = &'a ReportRow> {
        self.rows.iter().filter(move |r| r.method == method)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.fields()).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}
