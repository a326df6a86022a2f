//! # psi-monotones
//!
//! Multipartite pure-state entanglement monotones built from local-unitary
//! invariant polynomials of a state and its conjugate.
//!
//! Each invariant is encoded as a ψ-graph: an edge-labeled, color-regular,
//! bipartite graph whose white (ket) vertices carry a copy of the amplitude
//! tensor and whose black (bra) vertices carry its conjugate. An edge labeled
//! `A` contracts the index of party `A` between its two endpoints.
//!
//! The crate is organized as:
//!
//! - [`graph`]: constructing and validating ψ-graphs (cycles, hypercubes,
//!   colored Cartesian products, Cayley graphs of Coxeter groups).
//! - [`reflect`]: reflecting cuts, edge/vertex-reflecting decisions and
//!   convexity certificates.
//! - [`tensor`]: states, density matrices, partial traces, purification and
//!   invariant evaluation by greedy tensor contraction.
//! - [`monotones`]: the bipartite Schmidt-tail family, graph monotones, projector
//!   maximization, determinant ratios, majorization and composite bounds.
//! - [`locc`]: SLOCC deformations, transition-probability bounds, random
//!   Kraus instruments, monotonicity fuzzing and the GHZ sweep.
//! - [`io`]: the JSON and CSV file formats used by the `psimono` binary.

#![forbid(unsafe_code)]

pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod locc;
pub mod monotones;
pub mod reflect;
pub mod tensor;

pub use error::{Error, Result};
pub use graph::{CoxeterMatrix, Parity, PsiGraph};
pub use reflect::{ConvexityCertificate, ReflectingCut};
pub use tensor::{DensityMatrix, PureState};
