//! Directional EPR steering harvested from the vacuum of a massless scalar
//! field by two static Unruh-DeWitt detectors near a perfectly reflecting
//! plane.
//!
//! All lengths, times and energy gaps are measured in units of the Gaussian
//! switching width σ; nothing in the crate carries a dimension.
//!
//! * [`special`]: complex error function and the Faddeeva kernel.
//! * [`xstate`]: concurrence and directional steering of two-qubit X-states.
//! * [`detector`]: closed-form joint detector state next to the boundary.
//! * [`oracle`]: brute-force double integrals used to validate the closed forms.
//! * [`sweep`]: parameter sweeps, peak and transition search, figure datasets.

pub mod detector;
pub mod error;
pub mod oracle;
pub mod special;
pub mod sweep;
pub mod xstate;

pub use error::{Error, Result};
pub use num_complex::Complex64;
