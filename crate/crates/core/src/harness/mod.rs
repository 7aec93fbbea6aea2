//! Reproduction of the worked examples and figures, seeded verification
//! campaigns, and the counterexample search behind the CLI.

mod campaign;
mod config;
mod examples;
mod figure;
mod hunt;

pub use campaign::{
    default_eof_grid, run_campaign, BoundCheck, BoundReport, CampaignConfig, CampaignOutcome, CampaignSummary, CheckStatus, MeasureBlock,
    StateFamily, StatusCounts, VIOLATION_MARGIN,
};
pub use config::{parse_beta, parse_beta_list, parse_measure_list, FileConfig};
pub use examples::{example_params, reproduce_example, ExampleCheck, ExampleReport};
pub use figure::{emit_figure_data, figure_rows, write_figure_csv, FigureRow, FigureSpec};
pub use hunt::{hunt_counterexamples, HuntCandidate, HuntResult};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VIOLATION: i32 = 1;
    pub const USAGE: i32 = 2;
}
