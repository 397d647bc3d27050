//! Monte Carlo estimators over independent, seed-addressed trials.

mod assigned;
mod availability;
mod estimate;
mod execution;
mod figures;
mod rates;
mod sweep;
mod table;

pub use assigned::MAX_SINGULAR_REDRAWS;
pub use availability::{estimate_p_av, AvailabilitySamples};
pub use estimate::Estimate;
pub use execution::Execution;
pub use figures::{
    figure_scenario, rate_thresholds, reproduce_figure, scaled_trials, FigureId,
    AVAILABILITY_TARGETS, PRACTICAL_THRESHOLDS_DB, TARGET_CHANNELS,
};
pub use rates::{estimate_rate_grid, estimate_rates, supported_ra_count, RateReport};
pub use sweep::{analytic_rate, parse_grid, simulate, sweep, SweepAxis, SUMMARY_COLUMNS};
pub use table::{Cell, Table};

pub(crate) const STREAM_AVAILABILITY: u64 = 1;
pub(crate) const STREAM_RATES: u64 = 2;
