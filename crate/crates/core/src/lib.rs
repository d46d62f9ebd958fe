//! Spectra and survival dynamics of a discrete level coupled to an
//! equally spaced ladder through a Lorentzian coupling profile.
//!
//! The crate solves the model semi-analytically ([`spectral`]), propagates
//! the discrete state ([`dynamics`]), and carries independent references to
//! check it against: closed-form limiting models ([`limits`]) and a dense
//! truncated-matrix diagonalization ([`dense`]).

pub mod dense;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod limits;
pub mod output;
pub mod params;
pub mod presets;
pub mod roots;
pub mod special_sums;
pub mod spectral;
pub mod validate;

pub use error::{Error, Result};
pub use exec::Mode;
pub use params::ModelParams;
pub use spectral::{EigenPair, SolveOptions, Spectrum, SpectrumModel};
