//! Scalar abstraction for the numeric core.
//!
//! Everything numeric in this crate is generic over [`Scalar`] so the same
//! layer and gradient code runs in two arithmetic modes: `f32` for training
//! and inference, `f64` for finite-difference gradient verification. The
//! crate root exposes concrete aliases for both.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point element type of tensors, parameters and losses.
pub trait Scalar:
    num_traits::Float
    + num_traits::NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Width in bytes of the on-disk encoding (4 or 8).
    const WIDTH: u8;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;

    /// Parse a decimal literal exactly as `str::parse` would for the
    /// concrete type, so `f32` tables are rounded once, not twice.
    fn parse_str(s: &str) -> Option<Self>;

    /// Little-endian byte encoding used by the checkpoint format.
    fn write_le(self, out: &mut Vec<u8>);
    fn read_le(bytes: &[u8]) -> Self;
}

impl Scalar for f32 {
    const WIDTH: u8 = 4;

    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn to_f64(self) -> f64 {
        f64::from(self)
    }
    fn parse_str(s: &str) -> Option<Self> {
        s.parse().ok()
    }
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes(bytes[..4].try_into().unwrap())
    }
}

impl Scalar for f64 {
    const WIDTH: u8 = 8;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn parse_str(s: &str) -> Option<Self> {
        s.parse().ok()
    }
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes[..8].try_into().unwrap())
    }
}
