//! Joint time-vertex representation.
//!
//! A time-vertex signal is an N x T matrix: one temporal signal per vertex.
//! Time is modeled as a ring graph (periodic boundary), whose Laplacian is the
//! circulant second difference `[X L_T](n,t) = X(n,t+1) - 2X(n,t) + X(n,t-1)`
//! with eigenvalues `omega_k = 2(cos(2 pi k / T) - 1)` on the DFT basis. Note
//! the sign convention: this operator is negative semi-definite, and it is
//! used as-is throughout.
//!
//! The joint Fourier transform (JFT) applies the graph Fourier transform along
//! the vertex dimension and a unitary DFT along the time dimension. Both
//! directions are unitary, so Parseval holds exactly and the JFT diagonalizes
//! `X -> L_G X + X L_T` with joint symbol `lambda_l + omega_k`.

use std::cell::RefCell;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{DgwError, Result};
use crate::graph::{Graph, SpectralBasis};

/// N x T real matrix of per-vertex temporal signals.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeVertexSignal {
    values: Array2<f64>,
}

impl TimeVertexSignal {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        if values.nrows() < 1 || values.ncols() < 1 {
            return Err(DgwError::InvalidParameter(format!(
                "signal must be at least 1x1, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DgwError::InvalidParameter(
                "signal contains non-finite entries".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn zeros(n_vertices: usize, n_steps: usize) -> Self {
        Self {
            values: Array2::zeros((n_vertices, n_steps)),
        }
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    pub fn n_vertices(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_steps(&self) -> usize {
        self.values.ncols()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// N x T complex joint spectrum indexed by (graph frequency l, time frequency k).
#[derive(Debug, Clone)]
pub struct JointSpectrum {
    values: Array2<Complex64>,
}

impl JointSpectrum {
    pub fn new(values: Array2<Complex64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<Complex64> {
        self.values
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Eigenvalues of the ring-time Laplacian: `omega_k = 2(cos(2 pi k / T) - 1)`,
/// k = 0..T-1. These are the exact eigenvalues of the periodic second
/// difference; they are all <= 0 under this sign convention.
pub fn ring_eigenvalues(n_steps: usize) -> Vec<f64> {
    (0..n_steps)
        .map(|k| 2.0 * ((std::f64::consts::TAU * k as f64 / n_steps as f64).cos() - 1.0))
        .collect()
}

/// Periodic second temporal difference `X(n,t+1) - 2X(n,t) + X(n,t-1)`.
pub fn ring_laplacian_apply(x: &TimeVertexSignal) -> Result<TimeVertexSignal> {
    let t_len = x.n_steps();
    if t_len < 3 {
        return Err(DgwError::InvalidParameter(format!(
            "ring Laplacian needs T >= 3, got {t_len}"
        )));
    }
    let v = x.values();
    let mut out = Array2::<f64>::zeros(v.raw_dim());
    for n in 0..x.n_vertices() {
        for t in 0..t_len {
            let prev = v[[n, (t + t_len - 1) % t_len]];
            let next = v[[n, (t + 1) % t_len]];
            out[[n, t]] = next - 2.0 * v[[n, t]] + prev;
        }
    }
    Ok(TimeVertexSignal { values: out })
}

/// Joint Laplacian action `L_G X + X L_T`.
pub fn joint_laplacian_apply(x: &TimeVertexSignal, graph: &Graph) -> Result<TimeVertexSignal> {
    if graph.n_vertices() != x.n_vertices() {
        return Err(DgwError::DimensionMismatch(format!(
            "graph has {} vertices, signal has {}",
            graph.n_vertices(),
            x.n_vertices()
        )));
    }
    let time_part = ring_laplacian_apply(x)?;
    let graph_part = graph.laplacian().dot(x.values());
    Ok(TimeVertexSignal {
        values: graph_part + time_part.values(),
    })
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place DFT of every row, unitary scaling 1/sqrt(T).
/// Forward phase is `exp(-j 2 pi k t / T)`. Rows run on rayon when the
/// `parallel` feature is on.
pub(crate) fn dft_rows_unitary(m: &mut Array2<Complex64>, inverse: bool) {
    let t_len = m.ncols();
    if t_len == 0 {
        return;
    }
    let fft = plan(t_len, inverse);
    let scale = 1.0 / (t_len as f64).sqrt();
    let rows = m
        .as_slice_mut()
        .expect("row-major layout for owned arrays");

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        rows.par_chunks_mut(t_len).for_each(|row| {
            fft.process(row);
            for v in row.iter_mut() {
                *v *= scale;
            }
        });
    }
    #[cfg(not(feature = "parallel"))]
    {
        for row in rows.chunks_mut(t_len) {
            fft.process(row);
            for v in row.iter_mut() {
                *v *= scale;
            }
        }
    }
}

/// Sequential variant for callers that already parallelize one level up
/// (nesting row-level tasks under per-scale tasks only adds overhead).
pub(crate) fn dft_rows_unitary_seq(m: &mut Array2<Complex64>, inverse: bool) {
    let t_len = m.ncols();
    if t_len == 0 {
        return;
    }
    let fft = plan(t_len, inverse);
    let scale = 1.0 / (t_len as f64).sqrt();
    let rows = m
        .as_slice_mut()
        .expect("row-major layout for owned arrays");
    for row in rows.chunks_mut(t_len) {
        fft.process(row);
        for v in row.iter_mut() {
            *v *= scale;
        }
    }
}

fn plan(t_len: usize, inverse: bool) -> std::sync::Arc<dyn rustfft::Fft<f64>> {
    PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        if inverse {
            planner.plan_fft_inverse(t_len)
        } else {
            planner.plan_fft_forward(t_len)
        }
    })
}

/// Joint Fourier transform: GFT along vertices, then unitary DFT along time.
pub fn jft(x: &TimeVertexSignal, basis: &SpectralBasis) -> Result<JointSpectrum> {
    if basis.n_vertices() != x.n_vertices() {
        return Err(DgwError::DimensionMismatch(format!(
            "basis has {} vertices, signal has {}",
            basis.n_vertices(),
            x.n_vertices()
        )));
    }
    let gft = basis.eigenvectors().t().dot(x.values());
    let mut spec = gft.mapv(|v| Complex64::new(v, 0.0));
    dft_rows_unitary(&mut spec, false);
    Ok(JointSpectrum { values: spec })
}

/// Inverse JFT. The imaginary residue (below 1e-10 for spectra of real
/// signals, by unitarity) is discarded.
pub fn ijft(spectrum: &JointSpectrum, basis: &SpectralBasis) -> Result<TimeVertexSignal> {
    if basis.n_vertices() != spectrum.values().nrows() {
        return Err(DgwError::DimensionMismatch(format!(
            "basis has {} vertices, spectrum has {} rows",
            basis.n_vertices(),
            spectrum.values().nrows()
        )));
    }
    let mut time_domain = spectrum.values().clone();
    dft_rows_unitary(&mut time_domain, true);
    let re = time_domain.mapv(|v| v.re);
    Ok(TimeVertexSignal {
        values: basis.eigenvectors().dot(&re),
    })
}
