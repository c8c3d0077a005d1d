//! Artificial-noise-aided linear precoding for multi-user MIMO broadcast
//! channels with multiple eavesdroppers, and Monte-Carlo evaluation of the
//! resulting secrecy rates.
//!
//! The pipeline per trial is: draw channels ([`channel`]), build information
//! and noise precoders ([`precoding`]), split the power budget ([`power`]),
//! and evaluate Bob, Eve and secrecy rates ([`rates`]). [`sim`] runs trials
//! in parallel and aggregates them into SNR sweeps.

pub mod channel;
pub mod effective;
pub mod error;
pub mod matcore;
pub mod power;
pub mod precoding;
pub mod rates;
pub mod scenario;
pub mod sim;

pub use channel::{collude, draw_channels, draw_effective_channels, ChannelSet};
pub use effective::EffectiveChannels;
pub use error::{Error, Result};
pub use matcore::{CMatrix, Tolerances};
pub use power::{PowerProfile, StreamAllocation};
pub use precoding::{precode, NoiseMapping, PrecodingSolution};
pub use rates::RateReport;
pub use scenario::{Allocation, Objective, PowerMode, Scenario, Scheme, UserOrdering};
pub use sim::{run_series_sweep, run_sweep, Metric, PointRecord, SweepMetadata, SweepResult};
