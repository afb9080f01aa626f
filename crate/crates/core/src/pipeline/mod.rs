//! Two-party post-processing runs over a simulated classical channel, and
//! the analytic reports built on the same configuration.

pub mod config;
pub mod parties;
pub mod reports;
pub mod session;
pub mod wire;

pub use config::{ChannelConfig, ChannelEvent, CurveConfig, DistanceGrid, Method, RunConfig, Sampling, SnrReportConfig, TOrDistance};
pub use reports::{curve, snr_deviation_report, CurveReport, CurveRow, Cutoff, SnrReport, SnrRow};
pub use session::{block_data, derive_seed, run, run_legacy, run_proposed, BlockOutcome, BlockReport, Run, Session};
pub use wire::{ClassicalChannel, Leakage, Message, Party};
