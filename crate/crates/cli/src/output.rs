//! CSV output. Reals are written with 17 significant digits so every value
//! round-trips.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use twostep::driver::ConvergencePoint;
use twostep::SolutionSeries;

pub const OUTPUT_DIR_ENV: &str = "TWOSTEP_OUTPUT_DIR";

pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Output directory: an explicit flag wins, then the environment variable,
/// then the configuration, then the working directory.
pub fn resolve_output_dir(flag: Option<&Path>, configured: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUTPUT_DIR_ENV).filter(|s| !s.is_empty()) {
        return PathBuf::from(p);
    }
    configured.map_or_else(|| PathBuf::from("."), Path::to_path_buf)
}

fn write_csv(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_series(dir: &Path, series: &SolutionSeries) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;

    let dim = series.records.first().map_or(0, |r| r.x.dim());
    let with_v = series.records.first().is_some_and(|r| r.v.is_some());
    let mut header = vec!["t".to_string()];
    header.extend((1..=dim).map(|i| format!("x{i}")));
    if with_v {
        header.extend((1..=dim).map(|i| format!("v{i}")));
    }
    write_csv(
        &dir.join("solution.csv"),
        &header,
        series.records.iter().map(|r| {
            let mut row = vec![real(r.t)];
            row.extend(r.x.iter().map(|&v| real(v)));
            if let Some(v) = &r.v {
                row.extend(v.iter().map(|&v| real(v)));
            }
            row
        }),
    )?;

    write_csv(
        &dir.join("error_trace.csv"),
        &["t".into(), "eps".into(), "h".into()],
        series
            .trace
            .iter()
            .map(|e| vec![real(e.t), real(e.eps), real(e.h)]),
    )?;

    let s = series.stats;
    write_csv(
        &dir.join("stats.csv"),
        &["steps".into(), "halved".into(), "doubled".into(), "restarts".into()],
        std::iter::once(vec![
            s.local_steps.to_string(),
            s.halvings.to_string(),
            s.doublings.to_string(),
            s.restarts.to_string(),
        ]),
    )
}

/// Records whether the run finished; aborted runs leave their partial CSVs
/// next to this file.
pub fn write_status(dir: &Path, error: Option<&str>) -> Result<()> {
    fs::create_dir_all(dir)?;
    let text = match error {
        None => "complete\n".to_string(),
        Some(e) => format!("aborted: {e}\n"),
    };
    fs::write(dir.join("status.txt"), text)?;
    Ok(())
}

pub fn write_convergence(path: &Path, points: &[ConvergencePoint]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    write_csv(
        path,
        &["h".into(), "error".into()],
        points.iter().map(|p| vec![real(p.h), real(p.error)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 123456789.12345679] {
            assert_eq!(real(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn flag_beats_configured_dir() {
        let p = resolve_output_dir(Some(Path::new("a")), Some(Path::new("b")));
        assert_eq!(p, PathBuf::from("a"));
    }
}
