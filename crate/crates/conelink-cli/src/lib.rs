//! Configuration ingestion, scenario presets, and result export around the
//! `conelink` simulation library.

pub mod compare;
pub mod config;
pub mod export;

pub use compare::{compare, render_comparison, Comparison};
pub use config::{parse_config, preset, ConfigError, RunConfig};
pub use export::{
    export_contour, export_metrics, export_timeseries, render_timeseries, GridSpec, RunSummary,
};
