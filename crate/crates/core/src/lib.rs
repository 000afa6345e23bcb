//! Fourier analysis on continuous graphs with equal edge lengths.
//!
//! A finite simple graph whose edges are unit intervals carries the
//! Laplace operator with standard (continuity + Kirchhoff) vertex
//! conditions. Its eigenbasis splits into primitive frequencies in
//! `(0, 2 pi]` plus `2 pi` shifts, and restriction to the uniformly
//! subdivided graph `G_N` yields a complete basis of the sampled space.
//! This crate builds that basis, the associated block-structured discrete
//! Fourier transform, and a radix-2 fast path computing the transform and
//! its inverse in `O(N log N)`.
//!
//! Modules follow the pipeline:
//! - [`graph`]: combinatorial model, cycle/bipartition structure, the
//!   degree-weighted inner products;
//! - [`spectrum`]: eigendecomposition of the discrete vertex operators;
//! - [`eigenbasis`]: lifted, shifted, and special eigenfunctions;
//! - [`sampling`]: restriction to `G_N`, trapezoid identities and error
//!   responses;
//! - [`transform`]: the block basis of the sampled space and the fast
//!   forward/inverse transforms;
//! - [`oracle`]: brute-force reference implementations for every fast path;
//! - [`verify`]: the invariant suite behind the `verify` CLI command;
//! - [`io`]: JSON/CSV artifact formats with deterministic float output.

// Index arithmetic over vertices, edges, and samples reads clearest as
// plain loops here.
#![allow(clippy::needless_range_loop)]

pub mod eigenbasis;
pub mod families;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod sampling;
pub mod spectrum;
pub mod transform;
pub mod util;
pub mod verify;

pub use eigenbasis::{
    continuous_inner_product, cosine_eigenfunction, cycle_eigenspace, flow_space, lift,
    odd_eigenspace, primitive_spectrum, rescale, shift, BasisError, BlockOrigin, Branch,
    EdgeWaveFunction, FlowBasis, PrimitiveBlock, PrimitiveSpectrum,
};
pub use graph::{
    bipartition, spanning_tree_cycles, validate_parts, vertex_inner_product, Bipartition,
    CycleBasis, Graph, GraphError,
};
pub use sampling::{inner_product_error, m0, m1, restrict, trapezoid, SamplingError, VertexSignal};
pub use spectrum::{
    apply_delta_n, delta_n_eigenvalue, eigensolve_delta1, eigensolve_delta1_with, DiscreteSpectrum,
    EigensolveOptions, SpectrumError,
};
pub use transform::{
    build_basis, coefficients, fft_forward, fft_inverse, parseval_norm, radix2_fft,
    spectral_filter, FftDirection, GraphDft, SpectralBasis, TransformError,
};
