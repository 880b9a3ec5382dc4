//! Fourier–Stieltjes coefficients of finite positive measures on the unit
//! circle, horizon-qualified Rajchman / quasi-Rajchman / continuity
//! verdicts, the position operator on `L²(T, μ)` and exact simulations of
//! a few classical operator counterexamples.

pub mod classify;
pub mod error;
pub mod measure;
pub mod operators;
pub mod position;
pub mod report;
pub mod spec;

pub use error::{Error, Result};
pub use measure::{Atom, Density, DensityShape, FourierTable, IfsMeasure, Interval, Measure};
