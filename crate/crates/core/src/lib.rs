//! Simulation and analysis of the PT-symmetric kicked rotor.

pub mod basis;
pub mod error;
pub mod fit;
pub mod io;
pub mod model;
pub mod otoc;
pub mod phase;
pub mod propagator;
pub mod state;

pub use basis::BasisSpec;
pub use error::{Error, Result};
pub use model::{Direction, ModelParams};
pub use propagator::Propagator;
pub use state::{Moments, Observables, Representation, WaveState};
