//! Scripted numerical experiments: the pinching spline, the perforated sheet and
//! the semicontinuity sweep over families of currents.

pub mod cancellation;
pub mod spline;
pub mod sweep;
