//! Sensor graphs: station tables, k-NN graph construction on great-circle
//! distance, the combinatorial Laplacian L = D - W and its spectral
//! decomposition.
//!
//! The Laplacian of an undirected nonnegatively weighted graph is symmetric
//! positive semi-definite, so it admits a complete orthonormal eigenbasis
//! `L = U diag(lambda) U^T` with `0 = lambda_0 <= lambda_1 <= ...`. The
//! eigenbasis drives every spectral operation downstream (joint transforms,
//! wavelet kernels), so it is computed once, densely, and cached.

use ndarray::{Array1, Array2};

use crate::error::{DgwError, Result};

/// Mean Earth radius used for all great-circle distances.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// One seismic station: identifier plus geographic coordinates in decimal degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct Station {
    pub id: String,
    pub lat: f64,
    pub lon: f64,
}

/// A validated list of stations. Ids are unique, coordinates in range,
/// and there are at least two entries.
#[derive(Debug, Clone)]
pub struct StationTable {
    stations: Vec<Station>,
}

impl StationTable {
    pub fn new(stations: Vec<Station>) -> Result<Self> {
        if stations.len() < 2 {
            return Err(DgwError::InvalidParameter(format!(
                "station table needs at least 2 entries, got {}",
                stations.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for st in &stations {
            if !seen.insert(st.id.as_str()) {
                return Err(DgwError::InvalidParameter(format!(
                    "duplicate station id {:?}",
                    st.id
                )));
            }
            if !(-90.0..=90.0).contains(&st.lat) || !st.lat.is_finite() {
                return Err(DgwError::InvalidParameter(format!(
                    "station {:?}: latitude {} out of [-90, 90]",
                    st.id, st.lat
                )));
            }
            if !(-180.0..=180.0).contains(&st.lon) || !st.lon.is_finite() {
                return Err(DgwError::InvalidParameter(format!(
                    "station {:?}: longitude {} out of [-180, 180]",
                    st.id, st.lon
                )));
            }
        }
        Ok(Self { stations })
    }

    pub fn len(&self) -> usize {
        self.stations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stations.is_empty()
    }

    pub fn get(&self, idx: usize) -> Option<&Station> {
        self.stations.get(idx)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Station> {
        self.stations.iter()
    }

    /// (lat, lon) of station `idx`.
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let s = &self.stations[idx];
        (s.lat, s.lon)
    }
}

/// Great-circle distance in kilometers between two (lat, lon) points in degrees.
pub fn haversine_km(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (lat1, lon1) = (a.0.to_radians(), a.1.to_radians());
    let (lat2, lon2) = (b.0.to_radians(), b.1.to_radians());
    let dlat = lat2 - lat1;
    let dlon = lon2 - lon1;
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

/// Weighted undirected graph with its combinatorial Laplacian cached.
///
/// Immutable after construction; cheap to share across threads by reference.
#[derive(Debug, Clone)]
pub struct Graph {
    weights: Array2<f64>,
    laplacian: Array2<f64>,
}

impl Graph {
    /// Build a graph from a symmetric nonnegative weight matrix with zero diagonal.
    pub fn from_weights(weights: Array2<f64>) -> Result<Self> {
        let (n, m) = weights.dim();
        if n != m {
            return Err(DgwError::DimensionMismatch(format!(
                "weight matrix is {n}x{m}, expected square"
            )));
        }
        if n < 1 {
            return Err(DgwError::InvalidParameter("empty weight matrix".into()));
        }
        for i in 0..n {
            if weights[[i, i]] != 0.0 {
                return Err(DgwError::InvalidParameter(format!(
                    "nonzero diagonal entry at ({i},{i})"
                )));
            }
            for j in 0..n {
                let w = weights[[i, j]];
                if !w.is_finite() || w < 0.0 {
                    return Err(DgwError::InvalidParameter(format!(
                        "weight ({i},{j}) = {w} is negative or non-finite"
                    )));
                }
                if (w - weights[[j, i]]).abs() > 1e-12 {
                    return Err(DgwError::InvalidParameter(format!(
                        "weights not symmetric at ({i},{j}): {w} vs {}",
                        weights[[j, i]]
                    )));
                }
            }
        }
        let mut laplacian = -&weights;
        for i in 0..n {
            let degree: f64 = weights.row(i).sum();
            laplacian[[i, i]] = degree;
        }
        Ok(Self { weights, laplacian })
    }

    pub fn n_vertices(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn laplacian(&self) -> &Array2<f64> {
        &self.laplacian
    }

    /// Vertex degree (sum of incident edge weights).
    pub fn degree(&self, i: usize) -> f64 {
        self.weights.row(i).sum()
    }

    /// Neighbors of `i` (vertices joined by a positive-weight edge).
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n_vertices())
            .filter(|&j| j != i && self.weights[[i, j]] > 0.0)
            .collect()
    }

    /// Number of connected components, by breadth-first traversal.
    pub fn n_components(&self) -> usize {
        let n = self.n_vertices();
        let mut seen = vec![false; n];
        let mut components = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                for j in 0..n {
                    if self.weights[[v, j]] > 0.0 && !seen[j] {
                        stack.push(j);
                    }
                }
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.n_components() == 1
    }
}

/// Connect each station to its `k` nearest neighbors by great-circle distance,
/// union-symmetrized, with Gaussian edge weights `w = exp(-d^2 / sigma^2)`.
///
/// `sigma = None` selects the mean k-NN distance, which keeps the weighting
/// scale-free across deployments. Coincident stations get weight 1.
pub fn build_knn_graph(stations: &StationTable, k: usize, sigma: Option<f64>) -> Result<Graph> {
    let n = stations.len();
    if k < 1 || k >= n {
        return Err(DgwError::InvalidParameter(format!(
            "k = {k} must satisfy 1 <= k < {n}"
        )));
    }
    if let Some(s) = sigma {
        if !(s > 0.0) || !s.is_finite() {
            return Err(DgwError::InvalidParameter(format!(
                "sigma = {s} must be positive"
            )));
        }
    }

    let mut dist = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let d = haversine_km(stations.coords(i), stations.coords(j));
            dist[[i, j]] = d;
            dist[[j, i]] = d;
        }
    }

    // k nearest per vertex. Vertices tied with the k-th distance are all
    // included, which keeps the construction purely distance-determined
    // (hence exactly permutation-equivariant) and turns equidistant triples
    // into triangles rather than an index-dependent path.
    let mut selected: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut knn_dist_sum = 0.0;
    let mut knn_pairs = 0usize;
    for i in 0..n {
        let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| dist[[i, a]].total_cmp(&dist[[i, b]]).then(a.cmp(&b)));
        // relative slack so that mathematically equal distances computed
        // through different floating-point routes still count as tied
        let kth = dist[[i, order[k - 1]]] * (1.0 + 1e-12);
        order.retain(|&j| dist[[i, j]] <= kth);
        for &j in &order {
            knn_dist_sum += dist[[i, j]];
        }
        knn_pairs += order.len();
        selected.push(order);
    }

    let sigma = sigma.unwrap_or_else(|| {
        let mean = knn_dist_sum / knn_pairs as f64;
        if mean > 0.0 { mean } else { 1.0 }
    });

    let mut weights = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for &j in &selected[i] {
            let w = (-(dist[[i, j]] / sigma).powi(2)).exp();
            weights[[i, j]] = w;
            weights[[j, i]] = w;
        }
    }
    Graph::from_weights(weights)
}

/// Orthonormal eigendecomposition of a graph Laplacian, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    eigenvalues: Array1<f64>,
    eigenvectors: Array2<f64>,
}

impl SpectralBasis {
    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.eigenvalues
    }

    /// Column `l` is the eigenvector for `eigenvalues[l]`.
    pub fn eigenvectors(&self) -> &Array2<f64> {
        &self.eigenvectors
    }

    pub fn n_vertices(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// Multiplicity of the zero eigenvalue = number of connected components.
    pub fn zero_multiplicity(&self) -> usize {
        self.eigenvalues.iter().filter(|&&l| l.abs() < 1e-8).count()
    }
}

/// Full dense symmetric eigendecomposition of the Laplacian.
///
/// Dense is deliberate: sensor networks are at most a few thousand vertices,
/// and exact eigenpairs avoid polynomial-approximation error in the spectral
/// kernels downstream.
pub fn eigendecompose(graph: &Graph) -> Result<SpectralBasis> {
    let n = graph.n_vertices();
    let lap = graph.laplacian();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| lap[[i, j]]);
    let eig = m
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or_else(|| {
            DgwError::Numeric(format!(
                "symmetric eigensolver failed to converge on {n}x{n} Laplacian"
            ))
        })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues = Array1::from_iter(order.iter().map(|&i| eig.eigenvalues[i]));
    let mut eigenvectors = Array2::<f64>::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            eigenvectors[[row, col]] = eig.eigenvectors[(row, src)];
        }
    }
    Ok(SpectralBasis {
        eigenvalues,
        eigenvectors,
    })
}
