//! Simulation reports: analytic densities next to simulated estimates.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::SimulationConfig;
use crate::functionals::montecarlo::z_score;
use crate::geom::AaBox;
use crate::stochastic::{
    analytic_density_X, boolean_density_formula, expected_hit_count, simulate, skeleton_density_report,
    AnalyticValue, Estimate, RotationAverage, RotationMode, Shape,
};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub quantity: String,
    pub analytic_value: f64,
    pub analytic_stderr: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub z_score: f64,
    /// Whether the row counts towards `all_within`.
    pub gated: bool,
}

impl ReportRow {
    fn new(quantity: String, a: AnalyticValue, e: &Estimate, gated: bool) -> ReportRow {
        let se = (e.stderr.powi(2) + a.stderr.powi(2)).sqrt();
        ReportRow {
            quantity,
            analytic_value: a.value,
            analytic_stderr: a.stderr,
            estimate: e.mean,
            stderr: e.stderr,
            z_score: z_score(e.mean, se, a.value),
            gated,
        }
    }

    pub fn within(&self, sigma: f64) -> bool {
        self.z_score.abs() <= sigma
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    pub seed: u64,
    pub replications: usize,
    pub tolerance_sigma: f64,
    pub jitters: usize,
    pub inner_window: Vec<f64>,
    pub rows: Vec<ReportRow>,
    pub all_within: bool,
}

fn quantity_names(cfg: &SimulationConfig) -> Vec<String> {
    let d = cfg.dimension;
    if cfg.functional.family.trim() == "skeleton" && cfg.functional.x0.is_none() {
        let names: &[&str] = if d == 2 {
            &["N0", "L", "A"]
        } else {
            &["N0", "L1", "S", "V"]
        };
        names.iter().map(|s| s.to_string()).collect()
    } else {
        (0..=d).map(|j| format!("phi{j}")).collect()
    }
}

/// Simulates the configured Boolean model and compares every degree with
/// the analytic densities. `base` resolves relative shape paths.
pub fn run_simulation(
    cfg: &SimulationConfig,
    base: &Path,
    seed: u64,
    replications: usize,
    tolerance_sigma: f64,
) -> Result<SimulationReport> {
    cfg.validate()?;
    let d = cfg.dimension;
    let f = cfg.family()?;
    let q = cfg.grains(base)?;
    let w = AaBox::centered_cube(d, cfg.window_size);
    let rot = RotationAverage {
        samples: cfg.rotation_samples,
        seed,
    };
    log::info!(
        "simulating {replications} replications in a window of side {}",
        cfg.window_size
    );
    let sim = simulate(&f, &q, cfg.gamma, &w, replications, seed)?;
    let names = quantity_names(cfg);
    let mut rows = Vec::new();
    for (j, name) in names.iter().enumerate() {
        let a = boolean_density_formula(&f, j, &q, cfg.gamma, &rot)?;
        rows.push(ReportRow::new(format!("{name}(Z)"), a, &sim.z[j], true));
    }
    for (j, name) in names.iter().enumerate() {
        let a = analytic_density_X(&f, j, &q, cfg.gamma, &rot)?;
        rows.push(ReportRow::new(format!("{name}(X)"), a, &sim.x[j], true));
    }
    if q.shapes.iter().all(|(s, _)| matches!(s, Shape::Convex(_))) {
        let a = AnalyticValue::exact(expected_hit_count(&q, cfg.gamma, &w)?);
        rows.push(ReportRow::new("grain_count".into(), a, &sim.count, true));
    }
    if names[0] == "N0" && q.rotation == RotationMode::Isotropic {
        let closed = skeleton_density_report(d, &q, cfg.gamma)?;
        for (j, name) in names.iter().enumerate() {
            let a = AnalyticValue::exact(closed.z[j]);
            rows.push(ReportRow::new(
                format!("{name}(Z)_closed_form"),
                a,
                &sim.z[j],
                false,
            ));
        }
    }
    let all_within = rows.iter().filter(|r| r.gated).all(|r| r.within(tolerance_sigma));
    Ok(SimulationReport {
        config: cfg.clone(),
        seed,
        replications,
        tolerance_sigma,
        jitters: sim.jitters,
        inner_window: sim.inner_window,
        rows,
        all_within,
    })
}

impl SimulationReport {
    /// Header `quantity,analytic_value,estimate,stderr,z_score,gated`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| crate::Error::Io(e.to_string());
        out.write_record([
            "quantity",
            "analytic_value",
            "estimate",
            "stderr",
            "z_score",
            "gated",
        ])
        .map_err(io)?;
        for r in &self.rows {
            out.write_record([
                r.quantity.clone(),
                r.analytic_value.to_string(),
                r.estimate.to_string(),
                r.stderr.to_string(),
                r.z_score.to_string(),
                r.gated.to_string(),
            ])
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}
