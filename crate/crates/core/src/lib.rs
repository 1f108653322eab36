//! Fractional Fueter-type operators on complex quaternions.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod experiment;
pub mod field;
pub mod frac1d;
pub mod fueter;
pub mod gamma;
pub mod geometry;
pub mod kernels;
pub mod quadrature;
pub mod quat;
pub mod verify;

pub use error::{Error, Result};
pub use frac1d::{FracOrder, Func1D, Interval};
pub use quat::{BiComplexQuaternion, BiQuat, Bicomplex, CPoint2, Cx, Quaternion, StructuralSet};
