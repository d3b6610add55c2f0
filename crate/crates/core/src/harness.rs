//! Experiment driver: presets, cities ingestion, manifests and plot output.

pub mod cities;
pub mod manifest;
pub mod parse;
pub mod plot;
pub mod presets;

pub use cities::{ingest_cities, ingest_cities_with, CityColumns};
pub use manifest::Manifest;
pub use parse::{format_domain, parse_domain, parse_graph_model, GraphModel};
pub use plot::{emit_plotdata, render_svg};
pub use presets::{record_bound, run_preset, PresetOptions, PresetOutcome, PRESET_NAMES};
