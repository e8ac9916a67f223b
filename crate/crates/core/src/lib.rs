//! Continuous-time quantum walks on graphs and group state transfer.
//!
//! The walk on `X` is `U(t) = exp(itA)`. A pair `(S, T)` of vertex sets has
//! group state transfer at `t` when every column of `U(t)` indexed by `S` is
//! supported inside `T`.

pub mod error;
pub mod exact;
pub mod graph;
pub mod golden;
pub mod gst;
pub mod io;
pub mod poset;
pub mod scan;
pub mod spectral;
pub mod symmetry;
pub mod vertex_set;

pub use error::{Error, Result};
pub use graph::{GeneratorSpec, Graph, SrgParams};
pub use spectral::{decompose, transition, Spectrum, TransitionMatrix};
pub use vertex_set::VertexSet;
