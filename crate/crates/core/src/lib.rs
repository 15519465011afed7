//! Dynamic graph wavelets for time-vertex signal processing.
//!
//! Signals that live on the vertices of a graph and evolve in time — waves
//! propagating across a sensor network, for instance — call for atoms that
//! propagate too. This crate builds frames of causal damped-wave atoms on
//! arbitrary weighted graphs, analyzes time-vertex signals against them in
//! the joint spectral domain, recovers sparse coefficient sets with FISTA,
//! and turns those coefficients into physical source estimates.
//!
//! The pipeline, end to end:
//!
//! 1. [`graph`]: build a k-NN graph from station coordinates and decompose
//!    its Laplacian.
//! 2. [`time_vertex`]: the joint Fourier transform pairing the graph spectral
//!    basis with the time DFT.
//! 3. [`kernels`] / [`frame`]: causal damped-wave kernels, frame multipliers,
//!    analysis/synthesis operators, frame bounds.
//! 4. [`solver`]: FISTA for l1-sparse synthesis coefficients.
//! 5. [`localize`]: energy-weighted epicenter estimates and error reporting.
//! 6. [`sim`]: synthetic events (spectral atoms cross-checked against
//!    explicit leapfrog integration) and seeded noise.
//!
//! The `parallel` feature (on by default) runs the per-scale and per-row
//! inner loops on rayon; disabling it yields a fully sequential build.

pub mod error;
pub mod frame;
pub mod graph;
pub mod io;
pub mod kernels;
pub mod localize;
pub mod sim;
pub mod solver;
pub mod time_vertex;

pub use error::{DgwError, Result};
pub use frame::{
    corollary_lower_bound, default_scale_grid, materialize_atom, scale_grid, CoefficientTensor,
    DgwFrame, FrameBounds,
};
pub use graph::{
    build_knn_graph, eigendecompose, haversine_km, Graph, SpectralBasis, Station, StationTable,
};
pub use kernels::{
    damped_wave_kernel, heat_kernel, kernel_time_spectrum, kernel_time_spectrum_closed_form,
    wave_kernel, KernelSpec,
};
pub use localize::{estimate_epicenter, localization_error_km, EventEstimate};
pub use sim::{add_noise, random_geometric_graph, synth_event, EventSpec, SynthMethod};
pub use solver::{fista, gradient_g, kkt_residual, soft_threshold, SolverConfig, SolverResult};
pub use time_vertex::{
    ijft, jft, joint_laplacian_apply, ring_eigenvalues, ring_laplacian_apply, JointSpectrum,
    TimeVertexSignal,
};
