//! CSV and pretty-table rendering of case reports.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::BenchError;
use crate::run::CaseReport;

/// One CSV row: a single solver on a single case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "Q")]
    pub q: usize,
    #[serde(rename = "Np")]
    pub np: usize,
    pub c: f64,
    pub solver: String,
    pub iterations: usize,
    pub converged: bool,
    pub avg_rank: Option<f64>,
    pub time_total_s: f64,
    pub share_precond: f64,
    pub share_trunc: f64,
    pub share_trace: f64,
    pub share_matvec: f64,
    pub nnz_op: usize,
    pub nnz_precond: usize,
    #[serde(rename = "size_A")]
    pub size_a: usize,
    pub discrepancy: Option<f64>,
}

pub const HEADER: [&str; 17] = [
    "N",
    "Q",
    "Np",
    "c",
    "solver",
    "iterations",
    "converged",
    "avg_rank",
    "time_total_s",
    "share_precond",
    "share_trunc",
    "share_trace",
    "share_matvec",
    "nnz_op",
    "nnz_precond",
    "size_A",
    "discrepancy",
];

pub fn rows(reports: &[CaseReport]) -> Vec<Row> {
    reports
        .iter()
        .flat_map(|case| {
            case.runs.iter().map(move |run| {
                let r = &run.report;
                Row {
                    n: case.config.n,
                    q: case.config.q,
                    np: case.config.np,
                    c: case.config.c,
                    solver: run.solver.name().to_string(),
                    iterations: r.iterations,
                    converged: r.converged,
                    avg_rank: r.avg_rank,
                    time_total_s: r.total_time.as_secs_f64(),
                    share_precond: r.time_shares.preconditioner,
                    share_trunc: r.time_shares.truncation,
                    share_trace: r.time_shares.trace,
                    share_matvec: r.time_shares.matvec,
                    nnz_op: r.nnz_operator,
                    nnz_precond: r.nnz_preconditioner,
                    size_a: case.size_a,
                    discrepancy: case.discrepancy,
                }
            })
        })
        .collect()
}

/// Writes the report CSV. The header is written even when there are no rows.
pub fn write_csv<W: Write>(out: W, reports: &[CaseReport]) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER)?;
    for row in rows(reports) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<Row>, BenchError> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.prec$}"))
}

/// Human-readable table, one line per solver run.
pub fn pretty(reports: &[CaseReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>3} {:>2} {:>4} {:>8} {:>8} {:>5} {:>5} {:>7} {:>10} {:>7} {:>7} {:>7} {:>7} {:>10} {:>10} {:>9}",
        "N", "Q", "Np", "c/pi", "solver", "its", "conv", "rank", "time [s]", "prec%", "trunc%", "trace%", "matvec%", "nnz op", "nnz M", "discr"
    );
    for row in rows(reports) {
        let _ = writeln!(
            s,
            "{:>3} {:>2} {:>4} {:>8.3} {:>8} {:>5} {:>5} {:>7} {:>10.4} {:>7.1} {:>7.1} {:>7.1} {:>7.1} {:>10} {:>10} {:>9}",
            row.n,
            row.q,
            row.np,
            row.c / std::f64::consts::PI,
            row.solver,
            row.iterations,
            if row.converged { "yes" } else { "no" },
            opt(row.avg_rank, 2),
            row.time_total_s,
            100.0 * row.share_precond,
            100.0 * row.share_trunc,
            100.0 * row.share_trace,
            100.0 * row.share_matvec,
            row.nnz_op,
            row.nnz_precond,
            row.discrepancy.map_or_else(|| "-".to_string(), |d| format!("{d:.2e}")),
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), HEADER.join(",") + "\n");
    }
}
