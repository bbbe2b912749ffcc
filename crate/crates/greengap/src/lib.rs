//! Monte Carlo simulator of green-technology investment decisions by
//! heterogeneous firms.
//!
//! A population of firms is drawn from calibrated parameter distributions
//! (investment cost premium, electricity price, annual savings, discount
//! rate, lifetime, payback threshold). Each firm evaluates a binary
//! invest/reject decision under one of four protocols:
//!
//! * **Technological** — net present value at the calibration means, one
//!   representative firm.
//! * **Optimizing** — per-firm NPV over the full expected lifetime with a
//!   private discount rate.
//! * **Satisficing** — undiscounted payback comparison truncated at the
//!   firm's payback threshold.
//! * **Behavioural** — a loss-aversion value function applied to the
//!   satisficing cash flows.
//!
//! An ensemble mixes the three heterogeneous protocols across the
//! population. On top of the simulation engine sit policy experiments
//! (electricity tax, capital subsidy, decision-protocol shifting),
//! one-at-a-time sensitivity sweeps, implicit-parameter inversion, and an
//! audit-data ingestion pipeline that calibrates the model from raw
//! project records.
//!
//! All sampling is driven by counter-based per-firm random streams, so
//! results are bit-identical across runs and across worker counts.

pub mod audit;
pub mod decision;
pub mod distributions;
pub mod engine;
pub mod grid;
pub mod policy;
pub mod sensitivity;
pub mod special;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

pub use audit::{AuditRecord, LoadReport, ScaledDataset};
pub use decision::{BehaviouralConstants, DecisionLevel, EnsembleWeights, FirmDraw};
pub use distributions::{DistributionSpec, SampleStream};
pub use engine::{CalibrationConfig, LevelTag, SimulationResult, ValueStats};
pub use policy::{EquivalentSubsidy, PolicyImpact, PolicySpec};
pub use sensitivity::{InversionResult, SweepParameter, SweepSpec};
