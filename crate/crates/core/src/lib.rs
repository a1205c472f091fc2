//! Exact classical simulation of amplitude estimation by polynomial
//! sampling.
//!
//! All dynamics live in the two-dimensional Grover subspace, so a sample
//! from a polynomial `P` is a biased coin with `Pr[1] = |P(a)|²` plus a
//! transition among four labelled states and a query-ledger update. On top
//! of that primitive the crate implements Chebyshev amplitude estimation,
//! nearly unbiased estimation, depth-limited hybrid estimation, state
//! repair, baseline estimators, and a deterministic sweep harness.

pub mod baselines;
pub mod chebae;
pub mod error;
pub mod grover;
pub mod harness;
pub mod hybrid;
pub mod poly;
pub mod record;
pub mod repair;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod unbiased;

pub use baselines::{bhmt_queries, classical_mc, mlae_estimate, MlaeSchedule};
pub use chebae::{chebae_estimate, find_next_cheb, invert_cheb_ci, ChainMode, ChebAEConfig};
pub use error::{Error, Result};
pub use grover::{Amplitude, GroverLabel};
pub use harness::{fit_models, run_sweep, Algorithm, FitReport, ParamGrid, SweepConfig};
pub use hybrid::{hybrid_estimate, round_params, Branch, HybridConfig, RoundParams};
pub use poly::{Family, Kind, Parity, PolyMode, PolySpec, SupNormCertificate};
pub use record::RunRecord;
pub use repair::{nondestructive_chebae, repair_state, RepairConfig, RepairOutcome};
pub use rng::{rng_from_seed, substream_seed, SimRng};
pub use sampler::{sample_pellian, sample_semi_pellian, QueryLedger, StateAfter};
pub use stats::{clopper_pearson, hoeffding_shots, ConfidenceInterval};
pub use unbiased::{unbiased_estimate, UnbiasedConfig};
