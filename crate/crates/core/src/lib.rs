//! Fixed points of substitutions, balanced-pair lifts of their shifts,
//! echoing certificates and the exact polynomial machinery behind
//! non-vanishing checks.

pub mod echo;
pub mod error;
pub mod kbonacci;
pub mod morphism;
pub mod numeric;
pub mod pairs;
pub mod poly;
pub mod spectral;
pub mod stream;
pub mod word;

pub use echo::{EchoingCertificate, Ratio};
pub use error::{Error, Result};
pub use morphism::{IncidenceMatrix, Morphism, MorphismFile};
pub use pairs::{BalancedPair, LiftedMorphism};
pub use kbonacci::KbSystem;
pub use poly::{AlgebraicInput, EvalStatus, IntPolynomial};
pub use spectral::{spectral_report, SpectralReport};
pub use stream::WordStream;
pub use word::{Letter, Word};
