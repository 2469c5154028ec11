//! Density-matrix simulation of projection events and repeated-measurement
//! (Zeno) dynamics in the presence of environmental dephasing.
//!
//! States are carried as unnormalized weight operators `S`; the density
//! matrix is `S / Tr S` and normalization happens only inside ratio formulas.
//!
//! * [`opalg`]: dense complex operators, projectors, tensor products, partial traces.
//! * [`channels`]: unitary steps, pointer-basis dephasing, vesicle-release branch mixtures.
//! * [`collapse`]: Yes/No reduction, the probability rule, process 1, event selection.
//! * [`zeno`]: repeated process 1 at interval `d`, leakage sweeps, robustness checks.
//! * [`estimates`]: SI-unit calcium-ion uncertainty estimate.
//! * [`scenario`], [`config`], [`output`]: the experiment harness behind the CLI.

pub mod channels;
pub mod collapse;
pub mod config;
pub mod error;
pub mod estimates;
pub mod opalg;
pub mod output;
pub mod scenario;
pub mod zeno;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Library version echoed into result files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
