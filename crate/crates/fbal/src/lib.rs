//! Feedback-bit allocation for interference-limited multiuser beamforming.
//!
//! A transmitter with `N` antennas serves its own receiver while steering
//! nulls towards `K` protected users. Each protected user feeds back a
//! quantized channel direction; the residual quantization error leaks
//! interference. This crate answers two operational questions about the
//! shared feedback budget:
//!
//! - **Given `B` total feedback bits, how should they be split** so the
//!   worst per-user average interference is as small as possible?
//!   ([`allocate_minmax_exact`], [`allocate_lnorm`], [`brute_force_minmax`])
//! - **Given a per-user interference cap, how few bits suffice?**
//!   ([`min_bits_for_threshold`])
//!
//! The closed-form model behind both lives in [`model`]; a Monte Carlo
//! simulator of the full quantize/zero-force chain ([`simulator`]) measures
//! how well that model tracks reality, and [`experiments`] turns sweeps over
//! budgets, thresholds and gains into CSV tables with built-in sanity
//! checks.
//!
//! # Example
//!
//! ```
//! use fbal::{allocate_minmax_exact, round_allocation, SolverConfig, SystemParams};
//!
//! let params = SystemParams::new(4, 1.0, vec![100.0, 10.0, 1.0]).unwrap();
//! let report = allocate_minmax_exact(&params, 18.0, &SolverConfig::default()).unwrap();
//! // heterogeneous gains pull bits towards the strongest user
//! assert!(report.bits()[0] > report.bits()[2]);
//!
//! let integer = round_allocation(&params, report.allocation(), 18).unwrap();
//! assert_eq!(integer.allocation().total(), 18.0);
//! ```
//!
//! Runnable walkthroughs for every capability live under `examples/`; the
//! `fbal` binary exposes the same operations as subcommands (`allocate`,
//! `minbits`, `simulate`, `figure`, `scenario`).

pub mod allocator;
pub mod error;
pub mod experiments;
pub mod model;
pub mod simulator;

pub use allocator::{
    allocate_lnorm, allocate_minmax_exact, brute_force_minmax, min_bits_for_threshold,
    round_allocation, ThresholdAllocation, WaterfillTrace,
};
pub use error::{Error, Result};
pub use experiments::{
    run_figure, run_figure1, run_figure2, run_figure3, run_figure4, run_scenario, Check, McConfig,
    Scenario, Sweep, SweepOutput, SweepRow, SweepValue,
};
pub use model::{
    asymptotic_minmax, avg_interference, bits_for_interference, distortion, AllocationReport,
    BitAllocation, SolverConfig, SolverTag, SystemParams,
};
pub use simulator::{
    build_rvq_codebook, build_rvq_codebook_with_rng, generate_channels, generate_channels_with_rng,
    measure_interference, measure_interference_with_mode, quantize, zf_beamformer,
    ChannelRealization, Codebook, CodebookMode, MonteCarloStats, QuantizationResult,
};
