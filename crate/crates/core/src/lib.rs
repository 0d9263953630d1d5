//! Numerical model of one-photon and two-photon wavepackets in spontaneous
//! parametric down-conversion.
//!
//! The pipeline mirrors the physics:
//!
//! * [`crystal`] evaluates BBO-style uniaxial dispersion, group-velocity
//!   mismatch `D`, group-velocity dispersion `D''` and collinear
//!   phase-matching angles.
//! * [`spectral`] builds the biphoton amplitude `T(ν) = S(ν) P(ν)` on a
//!   detuning grid and applies filters and dispersion.
//! * [`correlation`] turns the amplitude into `g¹(τ)` and `G²(τ)`.
//! * [`interferometry`] produces Michelson fringes and Shih-Alley /
//!   Hong-Ou-Mandel coincidence traces, visibilities and accidental
//!   subtraction.
//! * [`tuning`] solves the non-collinear type-I tuning curve and the
//!   aperture/filter post-selection of detectable pairs.
//! * [`montecarlo`] simulates the TAC/MCA counting chain with accidentals.
//!
//! [`reproduce`] chains everything into the numerical checks behind the
//! `reproduce-paper` command of the `biphoton` binary, and [`cli`] holds that
//! command-line front end.
//!
//! Units: wavelengths in nm at the API, angular frequencies in rad/fs,
//! delays in fs, lengths in µm, angles in degrees.

pub mod cli;
pub mod correlation;
pub mod crystal;
mod error;
pub mod export;
pub mod interferometry;
pub mod montecarlo;
pub mod reproduce;
pub mod roots;
pub mod spectral;
pub mod tuning;

pub use error::{Error, Result};

/// Speed of light in µm/fs.
pub const SPEED_OF_LIGHT_UM_PER_FS: f64 = 0.299_792_458;

/// Speed of light in nm/fs.
pub const SPEED_OF_LIGHT_NM_PER_FS: f64 = 299.792_458;

/// Schema version written into every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;

/// Angular frequency (rad/fs) of light with vacuum wavelength `lambda_nm`.
pub fn angular_frequency(lambda_nm: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_NM_PER_FS / lambda_nm
}

/// Vacuum wavelength (nm) of light with angular frequency `omega` (rad/fs).
pub fn wavelength_nm(omega: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_NM_PER_FS / omega
}
