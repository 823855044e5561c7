//! Monte Carlo runs of the two-party experiment, estimation of `I_N` from the
//! recorded trials, and the lightcone relations used to state which events
//! may influence which.

pub mod dataset;
pub mod estimate;
pub mod simulate;
pub mod spacetime;

pub use dataset::{read_dataset, write_dataset};
pub use estimate::{estimate, estimate_counts, wilson_interval, ChainedEstimate, TermEstimate, TermKind};
pub use simulate::{simulate, simulate_sharded, tally, CellCounts, TrialDataset, TrialRecord, TrialSampler};
pub use spacetime::{lightcone_ordered, spacelike_separated, SpacetimeEvent};
