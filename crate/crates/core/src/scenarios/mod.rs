//! Config files, named presets and parameter sweeps.

mod config_file;
mod presets;
mod sweep;

pub use config_file::{load_config, parse_config, to_config_text};
pub use presets::{
    find_preset, preset, presets, Preset, DEFAULT_COLLECTION_WIDTH, PRESET_NAMES, TEICH_PUMP_WAIST,
};
pub use sweep::{linspace, sweep, Output, RowStatus, SweepParameter, SweepRow, SweepTable};
