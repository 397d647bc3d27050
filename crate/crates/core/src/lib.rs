pub mod analytic;
pub mod beamforming;
pub mod channel;
pub mod config;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod uplink;
pub mod vcs;

pub use error::{Error, Result};
