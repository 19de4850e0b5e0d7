//! Numerical laboratory for flat Littlewood and Newman–Bourgain polynomials.
//!
//! The crate covers polynomial evaluation on roots of unity and norm
//! estimates ([`poly`]), the correspondence between ±1 and 0/1 coefficient
//! classes ([`correspondence`]), autocorrelation statistics ([`stats`]),
//! Barker and extremal searches ([`barker`], [`flat_scan`]), generalized
//! Morse sequences ([`morse`]), arithmetic sieves and moment experiments
//! ([`numtheory`]) and spectral diagnostics ([`spectral`]).

pub mod barker;
pub mod correspondence;
pub mod error;
pub mod flat_scan;
pub mod morse;
pub mod numtheory;
pub mod poly;
pub mod report;
pub mod seq;
pub mod spectral;
pub mod stats;
pub mod transform;

pub use error::{FlatError, Result};
pub use poly::{FlatnessReport, NormalizedPolynomial};
pub use seq::{BinarySequence, IntegerSequence, SignSequence};
pub use stats::{AutocorrelationProfile, MeritFactor, Rational};
