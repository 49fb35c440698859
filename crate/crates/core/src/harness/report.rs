use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{HarnessError, Report, ReportRow};
use crate::oracles::OracleKind;
use crate::testers::Decision;

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format `{s}` (json or csv)")),
        }
    }
}

pub fn csv_header() -> Vec<&'static str> {
    let mut h = vec!["trial", "seed", "decision"];
    h.extend(OracleKind::ALL.iter().map(|k| k.name()));
    h.extend(["total", "rejected_at", "wall_ms"]);
    h
}

fn csv_record(r: &ReportRow) -> Vec<String> {
    let mut rec = vec![
        r.trial.to_string(),
        r.seed.to_string(),
        match r.decision {
            Decision::Accept => "accept",
            Decision::Reject => "reject",
        }
        .to_string(),
    ];
    rec.extend(OracleKind::ALL.iter().map(|&k| r.log.get(k).to_string()));
    rec.push(r.log.total().to_string());
    rec.push(r.rejected_at.map(|s| s.name().to_string()).unwrap_or_default());
    rec.push(r.wall_ms.map(|w| format!("{w:.3}")).unwrap_or_default());
    rec
}

/// Serializes `r` into `w`.
pub fn write_report_to<W: Write>(r: &Report, format: Format, w: W) -> Result<(), HarnessError> {
    let path = || "<report>".to_string();
    match format {
        Format::Json => serde_json::to_writer_pretty(w, r).map_err(|source| HarnessError::Json { path: path(), source }),
        Format::Csv => {
            let mut wr = csv::Writer::from_writer(w);
            let err = |source| HarnessError::Csv { path: path(), source };
            wr.write_record(csv_header()).map_err(err)?;
            for row in &r.rows {
                wr.write_record(csv_record(row)).map_err(err)?;
            }
            wr.flush().map_err(|source| HarnessError::Io { path: path(), source })
        }
    }
}

/// Writes `r` to `path` atomically: a temporary file in the same directory
/// is renamed into place.
pub fn write_report(r: &Report, format: Format, path: &Path) -> Result<(), HarnessError> {
    let shown = path.display().to_string();
    let io = |source| HarnessError::Io {
        path: shown.clone(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    write_report_to(r, format, &mut tmp).map_err(|e| match e {
        HarnessError::Json { source, .. } => HarnessError::Json {
            path: shown.clone(),
            source,
        },
        HarnessError::Csv { source, .. } => HarnessError::Csv {
            path: shown.clone(),
            source,
        },
        HarnessError::Io { source, .. } => HarnessError::Io {
            path: shown.clone(),
            source,
        },
        other => other,
    })?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use crate::instances::{Family, InstanceSpec};
    use crate::testers::{TestParams, TesterKind};

    fn report(trials: u64) -> Report {
        let cfg = ExperimentConfig::new(
            TesterKind::Cumulative,
            InstanceSpec::new(Family::Uniform, 256),
            TestParams::eps(0.3),
            trials,
            1,
        );
        run_experiment_with(&cfg, Some(1)).unwrap()
    }

    #[test]
    fn csv_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        write_report(&report(3), Format::Csv, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("trial,seed,decision,samp,"));

        let mut empty = report(1);
        empty.rows.clear();
        write_report(&empty, Format::Csv, &p).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap().lines().count(), 1);
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        let mut r = report(4);
        r.rows[0].wall_ms = Some(1.0 / 3.0);
        write_report(&r, Format::Json, &p).unwrap();
        let back: Report = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.schema, "v1");
    }

    #[test]
    fn missing_directory_names_the_path() {
        let e = write_report(&report(1), Format::Json, Path::new("/nonexistent/dir/r.json")).unwrap_err();
        assert!(e.to_string().contains("/nonexistent/dir/r.json"));
    }
}
