//! Skeletal fusion categories: fusion rules, associators and gauges.

pub mod basis;
pub mod characters;
pub mod fsymbols;
pub mod gauge;
pub mod ring;

pub use characters::{fp_dimensions, positive_character_space, CharacterSpace};
pub use fsymbols::{apply_gauge, verify_pentagon, verify_unitary, FSymbolSet, Quad, DEFAULT_TOL};
pub use gauge::{adjoint_gauge, compose_gauges, invert_gauge, Gauge, NatIso, Vertex};
pub use ring::{verify_ring_axioms, FusionRing, RingReport};
