//! Tersoff many-body potential: energy and force kernels built on a
//! vector-width-oblivious lane abstraction.
//!
//! Module map:
//!
//! * [`simd`]: lane vectors, masks, gathers and conflict-safe scatters with
//!   scalar, emulated (any width) and optional native backends.
//! * [`potential`]: parameters and the component functions with analytic
//!   derivatives, written once and instantiated for scalars and lanes.
//! * [`neighbor`]: cell lists, skin neighbor lists, and cutoff packing into
//!   lane batches.
//! * [`kernels`]: the reference, scalar-optimized, J-vectorized and
//!   I-vectorized force kernels plus the threaded driver.
//! * [`system`]: structures, boxes, velocity Verlet and the stretching driver.
//! * [`paramfile`]: the 17-token parameter file format.

pub mod error;
pub mod kernels;
pub mod neighbor;
pub mod paramfile;
pub mod potential;
pub mod simd;
pub mod system;
pub mod vec3;

pub use error::{Error, Result};
pub use kernels::{BackendKind, BackendSpec, Evaluator, ForceEnergyResult, KernelVariant, VariantTag, WorkCounts};
pub use neighbor::{NeighborList, PackMode};
pub use potential::{ParamTable, TersoffParams};
pub use simd::{BackendDescriptor, Precision};
pub use system::{SimBox, SimulationState};
