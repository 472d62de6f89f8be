//! CSV artifacts. Floats are written with 17 significant digits and every
//! file is written to a temporary sibling first, then renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::fidelity::FidelityReport;
use crate::harness::{BruteForceResult, ExperimentOutput, LogFit, MseRow};
use crate::oracle::OracleResult;
use crate::simulate::PathObservation;

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `header` and `rows` to `path` atomically.
pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let tmp = tempfile::NamedTempFile::new_in(&dir)?;
    {
        let mut w = csv::Writer::from_writer(std::io::BufWriter::new(tmp.as_file()));
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

/// Renders rows to a CSV string, for printing to stdout.
pub fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub const ORACLE_HEADER: [&str; 4] = ["b_star", "tail_mean", "expected_cost_at_star", "residual"];

pub fn oracle_row(r: &OracleResult) -> Vec<String> {
    vec![
        float(r.b_star),
        float(r.tail_mean),
        float(r.expected_cost_at_star),
        float(r.residual),
    ]
}

pub fn write_regret(path: &Path, out: &ExperimentOutput) -> Result<()> {
    let c = &out.curve;
    write_csv(
        path,
        &["round", "mean_gap", "se", "cumulative"],
        (0..c.cumulative.len()).map(|n| {
            vec![
                n.to_string(),
                float(c.per_round_gap[n]),
                float(c.standard_error[n]),
                float(c.cumulative[n]),
            ]
        }),
    )
}

pub fn write_diagnostics(path: &Path, out: &ExperimentOutput) -> Result<()> {
    let d = &out.diagnostics;
    write_csv(
        path,
        &["round", "mean_full_info_count", "full_info_fraction"],
        (0..d.full_info_fraction.len()).map(|n| {
            vec![
                n.to_string(),
                float(d.mean_records[n]),
                float(d.full_info_fraction[n]),
            ]
        }),
    )
}

pub fn write_rounds(path: &Path, out: &ExperimentOutput) -> Result<()> {
    write_csv(
        path,
        &["replication", "round", "threshold", "stop", "full_info", "records", "gap"],
        out.traces.iter().enumerate().flat_map(|(r, t)| {
            t.iter().enumerate().map(move |(n, rec)| {
                vec![
                    r.to_string(),
                    n.to_string(),
                    float(rec.threshold),
                    float(rec.stop),
                    u8::from(rec.full_info).to_string(),
                    rec.records_count.to_string(),
                    float(rec.gap),
                ]
            })
        }),
    )
}

pub fn write_fit(path: &Path, fit: &LogFit) -> Result<()> {
    write_csv(
        path,
        &[
            "intercept",
            "slope",
            "r_squared",
            "window_start",
            "window_end",
            "slope_ratio",
            "logarithmic",
        ],
        [vec![
            float(fit.intercept),
            float(fit.slope),
            float(fit.r_squared),
            fit.window_start.to_string(),
            fit.window_end.to_string(),
            float(fit.slope_ratio),
            fit.logarithmic.to_string(),
        ]],
    )
}

pub fn write_mse(path: &Path, rows: &[MseRow]) -> Result<()> {
    write_csv(
        path,
        &["n", "quantity", "empirical_mse", "se", "theory", "theory_kind", "ratio"],
        rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                r.quantity.name().to_string(),
                float(r.empirical_mse),
                float(r.standard_error),
                float(r.theory),
                r.quantity.theory_kind().to_string(),
                float(r.ratio),
            ]
        }),
    )
}

pub fn write_brute(path: &Path, r: &BruteForceResult) -> Result<()> {
    write_csv(
        path,
        &["b", "mean_cost", "se"],
        r.grid.iter().map(|&(b, m, se)| vec![float(b), float(m), float(se)]),
    )
}

pub fn write_paths(path: &Path, paths: &[(u64, u64, PathObservation)]) -> Result<()> {
    write_csv(
        path,
        &["replication", "round", "threshold", "stop", "jump_count", "jumps"],
        paths.iter().map(|(r, n, obs)| {
            let jumps: Vec<String> = obs.jump_positions.iter().map(|&x| float(x)).collect();
            vec![
                r.to_string(),
                n.to_string(),
                float(obs.threshold),
                float(obs.stop_position),
                obs.jump_positions.len().to_string(),
                jumps.join(";"),
            ]
        }),
    )
}

pub fn bounds_csv(report: &BoundReport) -> Result<String> {
    csv_string(
        &["name", "value"],
        report.rows().into_iter().map(|(k, v)| vec![k.to_string(), float(v)]),
    )
}

pub fn fidelity_csv(report: &FidelityReport) -> Result<String> {
    let c = &report.counts;
    let mut rows = vec![
        vec!["count_expected".into(), float(c.expected), String::new()],
        vec!["count_mean".into(), float(c.mean), c.mean_ok().to_string()],
        vec!["count_variance".into(), float(c.variance), c.variance_ok().to_string()],
        vec!["chi_square_p".into(), float(c.p_value), c.gof_ok().to_string()],
        vec![
            "increment_covariance".into(),
            float(report.increments.covariance),
            report.increments.passed().to_string(),
        ],
    ];
    for s in &report.survival {
        rows.push(vec![format!("survival_{}", s.t), float(s.empirical), s.passed().to_string()]);
    }
    csv_string(&["check", "value", "passed"], rows)
}

/// Writes to stdout and flushes.
pub fn print(s: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(s.as_bytes())?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_has_17_significant_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(-2.0f64.ln()).parse::<f64>().unwrap(), -2.0f64.ln());
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("x.csv");
        write_csv(&p, &["a", "b"], [vec!["1".into(), "2".into()]]).unwrap();
        write_csv(&p, &["a", "b"], [vec!["3".into(), "4".into()]]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "a,b\n3,4\n");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
