//! Scenarios, sweeps, figure tables and result files.

pub mod config;
pub mod figures;
pub mod link;
pub mod output;
pub mod scenario;
pub mod sweep;
pub mod transport;

pub use config::RunConfig;
pub use figures::{run_figure3, run_figure4, Figure3Spec, Figure4Spec};
pub use link::{run_link, run_link_with, ChannelResult, LinkReport};
pub use output::{OutputFormat, RunDir, Table};
pub use scenario::{DigitalTransport, FronthaulScenario, LinkSettings, Seeds};
pub use sweep::{dynamic_range_db, run_evm_sweep, run_evm_sweep_with, SweepResult, SweepSpec};
