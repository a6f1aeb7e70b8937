//! Geometry-based XL-MIMO channel synthesis and beamforming for wireless
//! power transfer.
//!
//! The library models the radio channel between a physically large transmit
//! array (a "radiating wall") and a single-antenna energy-neutral device from
//! scene geometry alone: flat walls generate first-order image sources of the
//! array, per-element visibility is resolved by ray casting, and each specular
//! component contributes a spherical-wavefront phasor with Friis path loss,
//! antenna gains, and a reflection coefficient.
//!
//! On top of the channel model sit four beamforming strategies
//! (maximum-ratio transmission, planar wavefront, spherical wavefront towards
//! a focal point, and a composite multi-beam former exploiting specular
//! components), search procedures for the composite beam phases and
//! reflection coefficients, and Monte Carlo / analytic tooling for the
//! efficiency of reciprocity-based beamforming under noisy channel estimates.
//!
//! The `wptbeam` binary exposes all of this behind a scenario configuration
//! file; see the crate README for the CLI surface and file formats.

pub mod analysis;
pub mod arrays;
pub mod beamform;
pub mod channel;
pub mod cli;
pub mod geometry;
pub mod io;
pub mod optimize;
pub mod scenario;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Crate-wide error type.
///
/// Variants are grouped so the CLI can map them onto exit codes: anything
/// that stems from invalid inputs (configuration, file schemas, argument
/// combinations, violated preconditions) is a validation error, I/O faults
/// are runtime errors.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("scenario: {0}")]
    Scenario(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for validation errors, 1 for
    /// runtime errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Wavelength (m) for a carrier frequency (Hz).
pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

/// Spatial angular frequency k0 = 2*pi/lambda (rad/m).
pub fn wavenumber(wavelength_m: f64) -> f64 {
    2.0 * std::f64::consts::PI / wavelength_m
}

/// Linear power ratio to dB.
pub fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// dB to linear power ratio.
pub fn from_db(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}
