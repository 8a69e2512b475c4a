//! Weighted CFLOBDDs: hierarchically structured weighted decision diagrams
//! over a semi-field, with pointwise, matrix and sampling operations.

#![no_std]
#![allow(clippy::type_complexity)]

extern crate alloc;

pub mod construct;
pub mod core;
pub mod dot;
pub mod error;
pub mod matrix;
pub mod pointwise;
pub mod quantum;
pub mod sampling;
pub mod semifield;
pub mod validate;

pub use crate::core::{Assignment, Grouping, GroupingId, Manager, ValueTuple, Wcflobdd};
pub use crate::error::{Error, Result};
pub use crate::semifield::{Complex64, Field, Instance, Numeric, Rational, Semifield, Tropical, Weight};
pub use crate::validate::{validate, Violation, ViolationKind};
