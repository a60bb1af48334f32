//! # berezin
//!
//! A numerical toolkit for quantization maps on a truncated Fock space and
//! on the Euclidean plane: coherent-state (anti-Wick/Toeplitz) quantization
//! by exact phase-space quadrature, prime quantization through the
//! reproducing kernel of the coherent subspace, finite tight-frame
//! quantization of functions on N points, quantization against arbitrary
//! finite operator-valued measures, and the classical ordering schemes they
//! are compared with.
//!
//! The through-line: a family of operators resolving the identity turns
//! functions into operators by weighted superposition, and the different
//! modules are instances of the one map. [`measure::quantize_general`]
//! makes that literal — the polygon frame and the discretized coherent
//! family reproduce [`frame::quantize_finite`] and [`cs::quantize_cs`]
//! exactly within their contracts, which [`verify`] checks end to end.
//!
//! Truncation is the central numerical decision: the Fock cutoff D is an
//! explicit parameter everywhere, identities broken only by truncation are
//! asserted on leading interior blocks, and coherent-state constructions
//! report computable tail bounds instead of opaque tolerances.

pub mod cs;
pub mod fock;
pub mod frame;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod ordering;
pub mod prime;
pub mod quad;
pub mod symbol;
pub mod verify;

pub use cs::{lower_symbol, quantize_cs, semiclassical_scan, trajectory_check, weak_matrix_element};
pub use fock::{FockParams, OscillatorParams};
pub use frame::{FiniteSymbol, PolygonFrame};
pub use linalg::{ComplexMatrix, Ket};
pub use measure::OperatorValuedMeasure;
pub use ordering::OrderingScheme;
pub use prime::{dirac_residual, prime_quantize, BorelRegion};
pub use quad::QuadratureScheme;
pub use symbol::{parse as parse_symbol, PhasePoint, SymbolExpr};
