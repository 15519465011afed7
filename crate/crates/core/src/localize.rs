//! From sparse coefficients to a physical source estimate.
//!
//! The epicenter estimate averages the coordinates of the stations whose
//! coefficients carry the highest energy: every coefficient with
//! `|C|^2 >= rho * max |C|^2` contributes its station, weighted by energy.
//! Averaging happens on the unit sphere (3D Cartesian mean, re-projected),
//! which stays correct across the antimeridian; at sensor-network extents it
//! agrees with naive lat/lon averaging to within meters.

use crate::error::{DgwError, Result};
use crate::frame::CoefficientTensor;
use crate::graph::{haversine_km, StationTable};

/// A localized source: weighted contributing stations, spherical-mean
/// coordinates, onset, dominant scale, and amplitude of the top coefficient.
#[derive(Debug, Clone)]
pub struct EventEstimate {
    pub est_lat: f64,
    pub est_lon: f64,
    /// (vertex, weight) pairs; weights are positive and sum to 1.
    pub contributors: Vec<(usize, f64)>,
    pub onset_tau: usize,
    /// Scale value (not index) of the largest-energy coefficient.
    pub dominant_scale: f64,
    /// `|C|` at the largest-energy coefficient.
    pub amplitude: f64,
}

/// Energy-weighted source estimate from analysis coefficients.
///
/// `rho` in (0, 1] is the relative energy cutoff; `rho = 1` keeps exactly the
/// argmax coefficient (deterministic tie-breaking: lowest vertex, then lowest
/// onset, then lowest scale index).
pub fn estimate_epicenter(
    c: &CoefficientTensor,
    stations: &StationTable,
    rho: f64,
) -> Result<EventEstimate> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(DgwError::InvalidParameter(format!(
            "rho = {rho} must be in (0, 1]"
        )));
    }
    let (n_scales, n_vertices, n_steps) = c.values().dim();
    if stations.len() != n_vertices {
        return Err(DgwError::DimensionMismatch(format!(
            "station table has {} entries, coefficients have {} vertices",
            stations.len(),
            n_vertices
        )));
    }

    let (s_top, m_top, tau_top) = c.argmax_by_energy().ok_or(DgwError::NoEvent)?;
    let peak = c.values()[[s_top, m_top, tau_top]];
    let max_energy = peak * peak;

    // Energy per vertex over the selected coefficient set.
    let mut vertex_energy = vec![0.0_f64; n_vertices];
    if rho >= 1.0 {
        vertex_energy[m_top] = max_energy;
    } else {
        let cutoff = rho * max_energy;
        for s in 0..n_scales {
            for m in 0..n_vertices {
                for tau in 0..n_steps {
                    let e = c.values()[[s, m, tau]].powi(2);
                    if e >= cutoff && e > 0.0 {
                        vertex_energy[m] += e;
                    }
                }
            }
        }
    }

    let total: f64 = vertex_energy.iter().sum();
    let contributors: Vec<(usize, f64)> = vertex_energy
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0.0)
        .map(|(m, &e)| (m, e / total))
        .collect();

    // Weighted spherical mean of contributing station coordinates.
    let (mut x, mut y, mut z) = (0.0, 0.0, 0.0);
    for &(m, w) in &contributors {
        let (lat, lon) = stations.coords(m);
        let (lat_r, lon_r) = (lat.to_radians(), lon.to_radians());
        x += w * lat_r.cos() * lon_r.cos();
        y += w * lat_r.cos() * lon_r.sin();
        z += w * lat_r.sin();
    }
    let norm = (x * x + y * y + z * z).sqrt();
    if norm < 1e-12 {
        return Err(DgwError::Numeric(
            "degenerate spherical mean (antipodal contributors)".into(),
        ));
    }
    let est_lat = (z / norm).asin().to_degrees();
    let est_lon = y.atan2(x).to_degrees();

    Ok(EventEstimate {
        est_lat,
        est_lon,
        contributors,
        onset_tau: tau_top,
        dominant_scale: c.scales()[s_top],
        amplitude: peak.abs(),
    })
}

/// Great-circle distance between the estimate and a reference epicenter.
pub fn localization_error_km(est: &EventEstimate, truth: (f64, f64)) -> f64 {
    haversine_km((est.est_lat, est.est_lon), truth)
}
