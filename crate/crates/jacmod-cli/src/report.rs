//! Machine-readable verification reports: per-cell quantity records plus
//! per-predicate pass/fail records, JSON on disk, CSV/series exports.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::config::SuiteConfig;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CellParams {
    pub func: String,
    pub k: u32,
    pub r: u32,
    pub alpha: f64,
    pub beta: f64,
    #[serde(with = "crate::pnorm_serde")]
    pub p: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CellRecord {
    pub quantity: String,
    #[serde(flatten)]
    pub params: CellParams,
    /// t or n, depending on the quantity.
    pub x: f64,
    pub value: f64,
    pub err_est: f64,
    pub diverged: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PredicateRecord {
    pub id: String,
    /// Largest observed ratio/constant over the predicate's grid.
    pub empirical_constant: f64,
    pub pass: bool,
    pub notes: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub seed: u64,
    pub config: SuiteConfig,
    pub cells: Vec<CellRecord>,
    pub predicates: Vec<PredicateRecord>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.predicates.iter().all(|p| p.pass)
    }

    pub fn failing(&self) -> Vec<&PredicateRecord> {
        self.predicates.iter().filter(|p| !p.pass).collect()
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json).with_context(|| format!("writing {path:?}"))
    }

    pub fn load_json(path: &Path) -> Result<Report> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {path:?}"))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {path:?}"))
    }

    /// CSV tables plus plot-ready `(x, value)` series files, one per
    /// quantity, in deterministic order. Summary rows carry fitted log-log
    /// slopes for modulus-decay series and max/min for ratio series.
    pub fn export_csv(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        // Predicate table.
        let mut w = csv::Writer::from_path(dir.join("predicates.csv"))?;
        w.write_record(["id", "empirical_constant", "pass", "notes"])?;
        for p in &self.predicates {
            w.write_record([
                p.id.as_str(),
                &format!("{}", p.empirical_constant),
                if p.pass { "true" } else { "false" },
                p.notes.as_str(),
            ])?;
        }
        w.flush()?;
        // Cell table.
        let mut w = csv::Writer::from_path(dir.join("cells.csv"))?;
        w.write_record([
            "quantity", "func", "k", "r", "alpha", "beta", "p", "x", "value", "err_est",
            "diverged",
        ])?;
        for c in &self.cells {
            w.write_record([
                c.quantity.as_str(),
                c.params.func.as_str(),
                &c.params.k.to_string(),
                &c.params.r.to_string(),
                &format!("{}", c.params.alpha),
                &format!("{}", c.params.beta),
                &p_str(c.params.p),
                &format!("{}", c.x),
                &format!("{}", c.value),
                &format!("{}", c.err_est),
                if c.diverged { "true" } else { "false" },
            ])?;
        }
        w.flush()?;
        // Per-quantity series with summary statistics.
        let mut quantities: Vec<&str> =
            self.cells.iter().map(|c| c.quantity.as_str()).collect();
        quantities.sort_unstable();
        quantities.dedup();
        let mut summary = csv::Writer::from_path(dir.join("series_summary.csv"))?;
        summary.write_record(["quantity", "series", "n_points", "loglog_slope", "max", "min"])?;
        for q in quantities {
            let path = dir.join(format!("series_{}.csv", q.replace([':', '/'], "_")));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["series", "x", "value"])?;
            let mut groups: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
            for c in self.cells.iter().filter(|c| c.quantity == q) {
                let key = format!(
                    "{}_k{}_r{}_a{}_b{}_p{}",
                    c.params.func, c.params.k, c.params.r, c.params.alpha, c.params.beta,
                    p_str(c.params.p)
                );
                match groups.iter_mut().find(|(g, _)| *g == key) {
                    Some((_, pts)) => pts.push((c.x, c.value)),
                    None => groups.push((key, vec![(c.x, c.value)])),
                }
            }
            for (key, pts) in &groups {
                for (x, v) in pts {
                    w.write_record([key.as_str(), &format!("{x}"), &format!("{v}")])?;
                }
                let logpts: Vec<(f64, f64)> = pts
                    .iter()
                    .filter(|(x, v)| *x > 0.0 && *v > 0.0)
                    .map(|(x, v)| (x.ln(), v.ln()))
                    .collect();
                let slope = jacmod_core::quad::fit_slope(&logpts);
                let max = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
                let min = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
                summary.write_record([
                    q,
                    key.as_str(),
                    &pts.len().to_string(),
                    &format!("{slope}"),
                    &format!("{max}"),
                    &format!("{min}"),
                ])?;
            }
            w.flush()?;
        }
        summary.flush()?;
        Ok(())
    }
}

pub fn p_str(p: f64) -> String {
    if p.is_finite() {
        format!("{p}")
    } else {
        "inf".to_string()
    }
}

/// One pass/fail console line per predicate.
pub fn print_predicates(report: &Report, mut out: impl Write) -> Result<()> {
    for p in &report.predicates {
        writeln!(
            out,
            "{} {:28} c = {:<12.6} {}",
            if p.pass { "PASS" } else { "FAIL" },
            p.id,
            p.empirical_constant,
            p.notes
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report {
            tool_version: crate::TOOL_VERSION.to_string(),
            seed: 0x5EED,
            config: SuiteConfig::default(),
            cells: vec![CellRecord {
                quantity: "modulus".into(),
                params: CellParams {
                    func: "exp".into(),
                    k: 2,
                    r: 0,
                    alpha: 0.25,
                    beta: 0.0,
                    p: f64::INFINITY,
                },
                x: 0.1,
                value: 0.5,
                err_est: 1e-6,
                diverged: false,
            }],
            predicates: vec![PredicateRecord {
                id: "averaged-le-sup".into(),
                empirical_constant: 1.0,
                pass: true,
                notes: "0 violations".into(),
            }],
        }
    }

    #[test]
    fn json_round_trip_preserves_records() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let r = sample();
        r.save_json(&path).unwrap();
        let back = Report::load_json(&path).unwrap();
        assert_eq!(r.cells, back.cells);
        assert_eq!(r.predicates, back.predicates);
        assert_eq!(back.cells[0].params.p, f64::INFINITY);
    }

    #[test]
    fn csv_export_writes_tables() {
        let dir = tempfile::tempdir().unwrap();
        sample().export_csv(dir.path()).unwrap();
        let cells = std::fs::read_to_string(dir.path().join("cells.csv")).unwrap();
        assert!(cells.contains("modulus,exp,2,0,0.25,0,inf,0.1,0.5"));
        assert!(dir.path().join("predicates.csv").exists());
        assert!(dir.path().join("series_modulus.csv").exists());
        assert!(dir.path().join("series_summary.csv").exists());
    }
}
