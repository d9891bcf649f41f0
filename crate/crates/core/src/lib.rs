//! Lower bounds on the capacity of peak-power-limited, band-limited AWGN
//! channels.
//!
//! The transmitted signal over `N` Nyquist intervals is a point in the
//! `N`-dimensional space of its Nyquist samples (`2N` real dimensions for
//! complex band-pass signals). All signals whose continuous waveform stays
//! below the peak limit form a convex body; the log of its volume is the
//! largest achievable differential entropy, which the entropy power
//! inequality turns into a capacity lower bound
//! `C >= 0.5 log2(1 + gamma * SNR)` (real) or `log2(1 + gamma * SNR)` (complex).
//!
//! The crate estimates that volume two ways:
//!
//! * [`bounds`] integrates a radial-length model against extreme-value laws
//!   for the waveform peak ([`extreme`]), giving a semianalytic lower bound.
//! * [`mc`] draws directions, synthesizes band-limited waveforms
//!   ([`signal`]) and averages the radial function, with importance sampling
//!   from the cube or polydisc.

use serde::{Deserialize, Serialize};

pub mod bounds;
pub mod error;
pub mod export;
pub mod extreme;
pub mod math;
pub mod mc;
mod par;

pub use par::with_workers;
pub mod quad;
pub mod rng;
pub mod signal;
pub mod verify;

pub use error::{Error, Result};

use math::{LN_2PI_E, LN_PI_E};

/// Real low-pass or complex band-pass signalling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Real,
    Complex,
}

impl Domain {
    /// Real dimension of the body spanned by `n` Nyquist samples.
    pub fn body_dimension(self, n_symbols: usize) -> usize {
        match self {
            Domain::Real => n_symbols,
            Domain::Complex => 2 * n_symbols,
        }
    }

    /// Power efficiency of a body with the given log-volume at unit peak power:
    /// `V^{2/N} / (2 pi e)` (real) or `V^{1/N} / (pi e)` (complex).
    pub fn gamma_from_log_volume(self, n_symbols: usize, log_volume: f64) -> f64 {
        let n = n_symbols as f64;
        match self {
            Domain::Real => (2.0 * log_volume / n - LN_2PI_E).exp(),
            Domain::Complex => (log_volume / n - LN_PI_E).exp(),
        }
    }

    /// Exponent `c` with `gamma ∝ V^{c/N}`.
    pub(crate) fn gamma_exponent(self) -> f64 {
        match self {
            Domain::Real => 2.0,
            Domain::Complex => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Real => "real",
            Domain::Complex => "complex",
        }
    }
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Domain {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(Domain::Real),
            "complex" => Ok(Domain::Complex),
            other => Err(Error::Domain(format!("unknown domain '{other}'"))),
        }
    }
}
