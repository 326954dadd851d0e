//! Result export: fixed-layout time-series CSV, self-describing metrics
//! JSON, and bit-rate contour grids.
//!
//! Exports are deterministic: the same record always serializes to the same
//! bytes. Floating-point values in the time series carry 17 significant
//! digits, which round-trips the underlying doubles exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use conelink::optics::{bit_rate_for_inverse_q, q_inverse, LinkGeometry, OpticalLink};
use conelink::sim::RunRecord;

use crate::config::{ConfigError, RunConfig};

/// CSV column order of the time series.
pub const CSV_HEADER: &str = "t,x,y,rho,u,v,r,x_ref,y_ref,rho_ref,tau1,tau2,tau3,d,psi,log10_bitrate,inside_cone,lyapunov_v";

/// 17-significant-digit decimal form; infinities serialize as `inf`/`-inf`.
pub fn format_g17(value: f64) -> String {
    format!("{value:.16e}")
}

/// Render the per-step time series in the fixed column order with LF line
/// endings. A zero bit rate (out of the field of view) appears as a
/// `-inf` logarithm.
pub fn render_timeseries(record: &RunRecord) -> String {
    let mut out = String::with_capacity(record.rows.len() * 64);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &record.rows {
        let fields = [
            row.t,
            row.eta.x,
            row.eta.y,
            row.eta.z,
            row.nu.x,
            row.nu.y,
            row.nu.z,
            row.eta_ref.x,
            row.eta_ref.y,
            row.eta_ref.z,
            row.tau.surge,
            row.tau.sway,
            row.tau.yaw,
            row.distance,
            row.incidence_angle,
            row.bit_rate.log10(),
        ];
        for value in fields {
            out.push_str(&format_g17(value));
            out.push(',');
        }
        out.push(if row.inside_cone { '1' } else { '0' });
        out.push(',');
        out.push_str(&format_g17(row.lyapunov));
        out.push('\n');
    }
    out
}

/// Write the time series CSV to `path`.
pub fn export_timeseries(record: &RunRecord, path: &Path) -> std::io::Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(render_timeseries(record).as_bytes())
}

/// Communication metrics of one run as exported to JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsJson {
    pub cone_arrival_time: Option<f64>,
    pub established_time: Option<f64>,
    pub restoring_time: Option<f64>,
    pub rmse_x: Option<f64>,
    pub rmse_y: Option<f64>,
    pub rmse_rho: Option<f64>,
    pub rmse_window: Option<[f64; 2]>,
}

/// One run in the metrics export: metrics plus everything needed to
/// reproduce them (the full canonical config and the noise seed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub seed: Option<u64>,
    /// SHA-256 of the embedded canonical config text.
    pub config_hash: String,
    pub cone_slant_height: f64,
    pub cone_height: f64,
    pub metrics: MetricsJson,
    /// Canonical TOML of the configuration that produced this run.
    pub config: String,
}

/// Top-level metrics document; `compare` consumes these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsDocument {
    pub runs: Vec<RunSummary>,
}

fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Build the export summary of one run.
pub fn run_summary(config: &RunConfig, record: &RunRecord) -> Result<RunSummary, ConfigError> {
    let canonical = config.serialize()?;
    let m = &record.metrics;
    Ok(RunSummary {
        name: config.name.clone(),
        seed: config.noise.map(|n| n.seed),
        config_hash: sha256_hex(&canonical),
        cone_slant_height: record.cone_slant_height,
        cone_height: record.cone_height,
        metrics: MetricsJson {
            cone_arrival_time: m.cone_arrival_time,
            established_time: m.established_time,
            restoring_time: m.restoring_time,
            rmse_x: m.rmse_x,
            rmse_y: m.rmse_y,
            rmse_rho: m.rmse_rho,
            rmse_window: m.rmse_window.map(|(a, b)| [a, b]),
        },
        config: canonical,
    })
}

/// Render a metrics document for one or more runs.
pub fn render_metrics(summaries: &[RunSummary]) -> String {
    let doc = MetricsDocument {
        runs: summaries.to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("metrics serialize");
    text.push('\n');
    text
}

/// Write a metrics JSON document to `path`.
pub fn export_metrics(summaries: &[RunSummary], path: &Path) -> std::io::Result<()> {
    fs::write(path, render_metrics(summaries))
}

/// Read a metrics document back.
pub fn read_metrics(path: &Path) -> Result<MetricsDocument, ConfigError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ConfigError::Validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| ConfigError::Validation(format!("cannot parse {}: {e}", path.display())))
}

/// Rectangular evaluation grid for the contour export: horizontal offset
/// from the receiver on one axis, depth on the other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub offset_min: f64,
    pub offset_max: f64,
    pub depth_min: f64,
    pub depth_max: f64,
    pub step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            offset_min: -5.0,
            offset_max: 5.0,
            depth_min: 0.0,
            depth_max: 8.0,
            step: 0.05,
        }
    }
}

impl GridSpec {
    fn axis(min: f64, max: f64, step: f64) -> Vec<f64> {
        let count = ((max - min) / step).round() as usize;
        (0..=count).map(|i| min + i as f64 * step).collect()
    }

    pub fn offsets(&self) -> Vec<f64> {
        Self::axis(self.offset_min, self.offset_max, self.step)
    }

    pub fn depths(&self) -> Vec<f64> {
        Self::axis(self.depth_min, self.depth_max, self.step)
    }
}

/// Render log10 of the achievable bit rate over the grid.
///
/// Two comment lines define the axes; the matrix follows with the offset
/// header row and one row per depth. Out-of-view cells are `-inf`; the
/// receiver position itself (zero distance) is `inf`.
pub fn render_contour(
    link: &OpticalLink,
    grid: &GridSpec,
    target_ber: f64,
) -> Result<String, ConfigError> {
    let inverse_q = q_inverse(target_ber)?;
    let offsets = grid.offsets();
    let depths = grid.depths();
    let mut out = String::new();
    out.push_str(&format!(
        "# log10 bit rate at target_ber={target_ber}; offsets_m: start={} stop={} step={} count={}\n",
        grid.offset_min,
        grid.offset_max,
        grid.step,
        offsets.len()
    ));
    out.push_str(&format!(
        "# depths_m: start={} stop={} step={} count={}\n",
        grid.depth_min,
        grid.depth_max,
        grid.step,
        depths.len()
    ));
    out.push_str("depth_m/offset_m");
    for offset in &offsets {
        out.push(',');
        out.push_str(&format!("{offset}"));
    }
    out.push('\n');
    for depth in &depths {
        out.push_str(&format!("{depth}"));
        for offset in &offsets {
            let distance = (offset * offset + depth * depth).sqrt();
            out.push(',');
            if distance == 0.0 {
                out.push_str("inf");
                continue;
            }
            let geometry = LinkGeometry {
                distance,
                incidence_angle: offset.abs().atan2(*depth),
                depth: *depth,
            };
            let rate = bit_rate_for_inverse_q(link, &geometry, inverse_q)?;
            out.push_str(&format!("{}", rate.log10()));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Write the contour grid to `path`.
pub fn export_contour(
    link: &OpticalLink,
    grid: &GridSpec,
    target_ber: f64,
    path: &Path,
) -> Result<(), ConfigError> {
    let text = render_contour(link, grid, target_ber)?;
    fs::write(path, text).map_err(|e| {
        ConfigError::Validation(format!("cannot write {}: {e}", path.display()))
    })
}
