//! Generalized Baumslag-Solitar knot group presentations, Dehn fillings,
//! slope thresholds for non-left-orderable surgery, and a certificate
//! producing search for non-left-orderability of finitely presented groups.

pub mod error;
pub mod gbs;
pub mod homology;
pub mod orderability;
pub mod presentations;
pub mod trace;
pub mod twisted_torus;
pub mod words;

pub use error::{Error, Result};
pub use presentations::{dehn_fill, FilledPresentation, PeripheralSystem, Presentation, Slope};
pub use words::{Alphabet, GeneratorId, Letter, Word};
