//! Front-limited pulses, Fourier propagation through the slab, the response
//! kernel and the combined causality verdict.

mod causality;
mod kernel;
mod propagate;
mod pulse;

pub use causality::*;
pub use kernel::*;
pub use propagate::*;
pub use pulse::*;
