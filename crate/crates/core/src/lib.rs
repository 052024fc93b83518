//! Structural goodness-of-fit testing for zero-field Ising models.
//!
//! * [`model`]: models, graphs, widget pairs and lifted change ensembles.
//! * [`exact`]: enumeration, χ² divergences and symmetry-reduced sums.
//! * [`sampler`]: Glauber dynamics and an exact sampling oracle.
//! * [`stattests`]: edge-sum threshold tests and the Chow–Liu baseline.
//! * [`bounds`]: sample-complexity formulas and widget χ² bounds.
//! * [`harness`]: Monte-Carlo risk estimation and experiment sweeps.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod exact;
pub mod harness;
pub mod io;
pub mod model;
pub mod sampler;
pub mod stattests;

pub use error::{IsingError, Result};
pub use exact::{Chi2Method, Chi2Value, Enumerator};
pub use model::{GraphStructure, IsingModel, WidgetFamily, WidgetSpec};
pub use sampler::{SampleBatch, Sampler, SamplerConfig, SamplerMode};
pub use stattests::{GofTest, TestDecision, Verdict};
