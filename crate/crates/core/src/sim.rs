//! Synthetic propagating events and noisy observations.
//!
//! Two independent routes generate the same event: materializing the spectral
//! atom, or explicitly time-stepping the graph wave equation
//! `X(.,t+1) = 2X(.,t) - X(.,t-1) - s L_G X(.,t)` from a vertex delta with
//! vanishing initial velocity (ghost step `X(.,tau-1) := X(.,tau+1)`). With
//! the damping envelope applied to both, they agree to roundoff — which is
//! the master cross-check that the closed-form kernel really solves the wave
//! equation on the graph.

use ndarray::{Array1, Array2};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{DgwError, Result};
use crate::frame::materialize_atom;
use crate::graph::{Graph, SpectralBasis, Station, StationTable};
use crate::time_vertex::TimeVertexSignal;

/// A planted event: source vertex, onset, propagation scale, amplitude, damping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventSpec {
    /// Source vertex m.
    pub m: usize,
    /// Onset time step tau.
    pub tau: usize,
    /// Propagation scale s (must satisfy s * lambda_max < 4).
    pub s: f64,
    pub amplitude: f64,
    pub beta: f64,
}

/// How to generate the event waveform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthMethod {
    /// Materialize the spectral atom.
    Atom,
    /// Explicit leapfrog time stepping of the wave equation.
    Leapfrog,
}

/// Generate a clean propagating event as an N x T signal.
pub fn synth_event(
    graph: &Graph,
    basis: &SpectralBasis,
    spec: &EventSpec,
    method: SynthMethod,
    n_steps: usize,
) -> Result<TimeVertexSignal> {
    if graph.n_vertices() != basis.n_vertices() {
        return Err(DgwError::DimensionMismatch(format!(
            "graph has {} vertices, basis has {}",
            graph.n_vertices(),
            basis.n_vertices()
        )));
    }
    if spec.m >= graph.n_vertices() {
        return Err(DgwError::InvalidParameter(format!(
            "source vertex {} out of range (N = {})",
            spec.m,
            graph.n_vertices()
        )));
    }
    if spec.tau >= n_steps {
        return Err(DgwError::InvalidParameter(format!(
            "onset {} out of range (T = {n_steps})",
            spec.tau
        )));
    }
    if !spec.amplitude.is_finite() || !spec.beta.is_finite() || spec.beta < 0.0 {
        return Err(DgwError::InvalidParameter(
            "amplitude must be finite and beta >= 0".into(),
        ));
    }
    let lambda_max = basis.lambda_max();
    if spec.s * lambda_max > 4.0 + 1e-9 {
        return Err(DgwError::Stability {
            scale: spec.s,
            s_lambda: spec.s * lambda_max,
            bound: 4.0 / lambda_max,
        });
    }

    match method {
        SynthMethod::Atom => {
            let atom = materialize_atom(basis, n_steps, spec.s, spec.beta, spec.m, spec.tau)?;
            TimeVertexSignal::new(atom.values() * spec.amplitude)
        }
        SynthMethod::Leapfrog => leapfrog_event(graph, spec, n_steps),
    }
}

fn leapfrog_event(graph: &Graph, spec: &EventSpec, n_steps: usize) -> Result<TimeVertexSignal> {
    let n = graph.n_vertices();
    let lap = graph.laplacian();
    let mut values = Array2::<f64>::zeros((n, n_steps));

    let mut current = Array1::<f64>::zeros(n);
    current[spec.m] = spec.amplitude;
    values.column_mut(spec.tau).assign(&current);

    if spec.tau + 1 < n_steps {
        // first step from vanishing initial velocity: X(tau+1) = (I - sL/2) X(tau)
        let mut next = current.clone();
        next.scaled_add(-spec.s / 2.0, &lap.dot(&current));
        values.column_mut(spec.tau + 1).assign(&next);

        let mut prev = current;
        let mut cur = next;
        for t in (spec.tau + 2)..n_steps {
            let lx = lap.dot(&cur);
            let mut nx = &cur * 2.0 - &prev;
            nx.scaled_add(-spec.s, &lx);
            values.column_mut(t).assign(&nx);
            prev = cur;
            cur = nx;
        }
    }

    // damping envelope exp(-beta (t - tau))
    if spec.beta > 0.0 {
        for t in spec.tau..n_steps {
            let envelope = (-spec.beta * (t - spec.tau) as f64).exp();
            values.column_mut(t).mapv_inplace(|v| v * envelope);
        }
    }
    TimeVertexSignal::new(values)
}

/// The Gaussian noise matrix that [`add_noise`] adds: per-row variance set so
/// each row attains the requested SNR. Rows with zero power get zero noise.
pub fn noise_for(x: &TimeVertexSignal, snr_db: f64, seed: u64) -> Array2<f64> {
    let (n, t_len) = x.values().dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noise = Array2::<f64>::zeros((n, t_len));
    let snr_linear = 10.0_f64.powf(snr_db / 10.0);
    for row in 0..n {
        let power: f64 =
            x.values().row(row).iter().map(|v| v * v).sum::<f64>() / t_len as f64;
        if power == 0.0 {
            continue;
        }
        let sigma = (power / snr_linear).sqrt();
        for t in 0..t_len {
            let z: f64 = rng.sample(StandardNormal);
            noise[[row, t]] = sigma * z;
        }
    }
    noise
}

/// Add white Gaussian noise at the same per-waveform SNR on every row.
/// Deterministic given the seed. Rows that are identically zero are left
/// untouched (their SNR is undefined).
pub fn add_noise(x: &TimeVertexSignal, snr_db: f64, seed: u64) -> Result<TimeVertexSignal> {
    if x.values().iter().all(|&v| v == 0.0) {
        return Err(DgwError::InvalidParameter(
            "cannot set an SNR on an all-zero signal".into(),
        ));
    }
    let noise = noise_for(x, snr_db, seed);
    TimeVertexSignal::new(x.values() + &noise)
}

/// Row indices with zero power (these receive no noise).
pub fn zero_rows(x: &TimeVertexSignal) -> Vec<usize> {
    (0..x.n_vertices())
        .filter(|&r| x.values().row(r).iter().all(|&v| v == 0.0))
        .collect()
}

/// `n` stations uniform in an `extent_deg` x `extent_deg` box at mid-latitude,
/// deterministic by seed. `extent_deg = 1.0` is the standard fixture box.
pub fn random_geometric_graph(n: usize, extent_deg: f64, seed: u64) -> Result<StationTable> {
    if n < 2 {
        return Err(DgwError::InvalidParameter(format!(
            "need at least 2 stations, got {n}"
        )));
    }
    if !(extent_deg > 0.0) || extent_deg > 90.0 {
        return Err(DgwError::InvalidParameter(format!(
            "extent {extent_deg} degrees out of (0, 90]"
        )));
    }
    let (center_lat, center_lon) = (-43.5, 172.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stations = (0..n)
        .map(|i| Station {
            id: format!("S{i:04}"),
            lat: center_lat + (rng.random::<f64>() - 0.5) * extent_deg,
            lon: center_lon + (rng.random::<f64>() - 0.5) * extent_deg,
        })
        .collect();
    StationTable::new(stations)
}
