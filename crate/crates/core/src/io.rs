//! File formats: station CSV, graph JSON, signal matrices (CSV or raw f64
//! binary with a JSON sidecar), coefficient dumps, and the JSON summaries
//! emitted by the CLI.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{DgwError, Result};
use crate::frame::{CoefficientTensor, DgwFrame, FrameBounds};
use crate::graph::{Graph, Station, StationTable};
use crate::localize::EventEstimate;
use crate::sim::{EventSpec, SynthMethod};
use crate::solver::SolverResult;
use crate::time_vertex::TimeVertexSignal;

/// Read a station table from CSV with header `station_id,lat,lon`.
pub fn read_station_csv(path: &Path) -> Result<StationTable> {
    let file = fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut stations = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if idx == 0 {
            let header: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if header != ["station_id", "lat", "lon"] {
                return Err(DgwError::Parse {
                    line: line_no,
                    msg: format!("expected header `station_id,lat,lon`, got `{trimmed}`"),
                });
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(DgwError::Parse {
                line: line_no,
                msg: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let lat: f64 = fields[1].parse().map_err(|_| DgwError::Parse {
            line: line_no,
            msg: format!("bad latitude `{}`", fields[1]),
        })?;
        let lon: f64 = fields[2].parse().map_err(|_| DgwError::Parse {
            line: line_no,
            msg: format!("bad longitude `{}`", fields[2]),
        })?;
        stations.push(Station {
            id: fields[0].to_string(),
            lat,
            lon,
        });
    }
    StationTable::new(stations)
}

pub fn write_station_csv(path: &Path, stations: &StationTable) -> Result<()> {
    let mut out = String::from("station_id,lat,lon\n");
    for st in stations.iter() {
        out.push_str(&format!("{},{},{}\n", st.id, st.lat, st.lon));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Graph JSON: `{"n": N, "edges": [[i, j, w], ...]}` with i < j only.
#[derive(Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl GraphJson {
    pub fn from_graph(graph: &Graph) -> Self {
        let n = graph.n_vertices();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let w = graph.weights()[[i, j]];
                if w > 0.0 {
                    edges.push((i, j, w));
                }
            }
        }
        Self { n, edges }
    }

    pub fn to_graph(&self) -> Result<Graph> {
        let mut weights = Array2::<f64>::zeros((self.n, self.n));
        for &(i, j, w) in &self.edges {
            if i >= self.n || j >= self.n {
                return Err(DgwError::InvalidParameter(format!(
                    "edge ({i},{j}) out of range for n = {}",
                    self.n
                )));
            }
            weights[[i, j]] = w;
            weights[[j, i]] = w;
        }
        Graph::from_weights(weights)
    }
}

pub fn write_graph_json(path: &Path, graph: &Graph) -> Result<()> {
    let json = serde_json::to_string_pretty(&GraphJson::from_graph(graph))?;
    fs::write(path, json)?;
    Ok(())
}

pub fn read_graph_json(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    let parsed: GraphJson = serde_json::from_str(&text)?;
    parsed.to_graph()
}

/// Signal matrix as CSV: N rows x T comma-separated columns, no header.
pub fn write_signal_csv(path: &Path, x: &TimeVertexSignal) -> Result<()> {
    let mut out = String::new();
    for row in x.values().rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_signal_csv(path: &Path) -> Result<TimeVertexSignal> {
    let file = fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            trimmed.split(',').map(|f| f.trim().parse::<f64>()).collect();
        let row = row.map_err(|_| DgwError::Parse {
            line: idx + 1,
            msg: "bad float field".into(),
        })?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(DgwError::Parse {
                    line: idx + 1,
                    msg: format!("row has {} columns, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(DgwError::Parse {
            line: 1,
            msg: "empty signal file".into(),
        });
    }
    let n = rows.len();
    let t = rows[0].len();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    TimeVertexSignal::new(
        Array2::from_shape_vec((n, t), flat)
            .map_err(|e| DgwError::InvalidParameter(e.to_string()))?,
    )
}

/// Sidecar metadata for raw binary signal files.
#[derive(Debug, Serialize, Deserialize)]
pub struct SignalSidecar {
    pub n: usize,
    pub t: usize,
    pub fs_hz: f64,
}

/// Write a signal as little-endian f64 (row major) plus a JSON sidecar at
/// `<path>.json`.
pub fn write_signal_binary(path: &Path, x: &TimeVertexSignal, fs_hz: f64) -> Result<()> {
    let mut file = fs::File::create(path)?;
    for v in x.values().iter() {
        file.write_all(&v.to_le_bytes())?;
    }
    let sidecar = SignalSidecar {
        n: x.n_vertices(),
        t: x.n_steps(),
        fs_hz,
    };
    let sidecar_path = sidecar_path(path);
    fs::write(&sidecar_path, serde_json::to_string_pretty(&sidecar)?)?;
    Ok(())
}

pub fn read_signal_binary(path: &Path) -> Result<(TimeVertexSignal, SignalSidecar)> {
    let sidecar_text = fs::read_to_string(sidecar_path(path))?;
    let sidecar: SignalSidecar = serde_json::from_str(&sidecar_text)?;
    let mut file = fs::File::open(path)?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes)?;
    let expected = sidecar.n * sidecar.t * 8;
    if bytes.len() != expected {
        return Err(DgwError::InvalidParameter(format!(
            "binary signal is {} bytes, sidecar implies {expected}",
            bytes.len()
        )));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let signal = TimeVertexSignal::new(
        Array2::from_shape_vec((sidecar.n, sidecar.t), values)
            .map_err(|e| DgwError::InvalidParameter(e.to_string()))?,
    )?;
    Ok((signal, sidecar))
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    os.into()
}

/// Coefficient dump CSV: `scale_index,vertex,tau,value`, entries with
/// `|value|` at or above `threshold` only.
pub fn write_coefficients_csv(
    path: &Path,
    c: &CoefficientTensor,
    threshold: f64,
) -> Result<()> {
    let mut out = String::from("scale_index,vertex,tau,value\n");
    let (n_scales, n_vertices, n_steps) = c.values().dim();
    for s in 0..n_scales {
        for m in 0..n_vertices {
            for tau in 0..n_steps {
                let v = c.values()[[s, m, tau]];
                if v.abs() >= threshold && v != 0.0 {
                    out.push_str(&format!("{s},{m},{tau},{v}\n"));
                }
            }
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Frame metadata JSON `{scales, beta, A, B}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct FrameMetaJson {
    pub scales: Vec<f64>,
    pub beta: f64,
    #[serde(rename = "A")]
    pub lower: f64,
    #[serde(rename = "B")]
    pub upper: f64,
}

impl FrameMetaJson {
    pub fn from_frame(frame: &DgwFrame) -> Self {
        let FrameBounds { lower, upper } = frame.frame_bounds();
        Self {
            scales: frame.scales().to_vec(),
            beta: frame.beta(),
            lower,
            upper,
        }
    }
}

/// Solver diagnostics JSON.
#[derive(Debug, Serialize, Deserialize)]
pub struct SolverDiagnosticsJson {
    pub iterations: usize,
    pub converged: bool,
    pub objective_history: Vec<f64>,
    pub kkt_residual: f64,
}

impl SolverDiagnosticsJson {
    pub fn from_result(result: &SolverResult) -> Self {
        Self {
            iterations: result.iterations,
            converged: result.converged,
            objective_history: result.objective_history.clone(),
            kkt_residual: result.kkt_residual,
        }
    }
}

/// Localization result JSON.
#[derive(Debug, Serialize, Deserialize)]
pub struct ContributorJson {
    pub vertex: usize,
    pub weight: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EventEstimateJson {
    pub est_lat: f64,
    pub est_lon: f64,
    pub onset_tau: usize,
    pub dominant_scale: f64,
    pub amplitude: f64,
    pub contributors: Vec<ContributorJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_km: Option<f64>,
}

impl EventEstimateJson {
    pub fn from_estimate(est: &EventEstimate, error_km: Option<f64>) -> Self {
        Self {
            est_lat: est.est_lat,
            est_lon: est.est_lon,
            onset_tau: est.onset_tau,
            dominant_scale: est.dominant_scale,
            amplitude: est.amplitude,
            contributors: est
                .contributors
                .iter()
                .map(|&(vertex, weight)| ContributorJson { vertex, weight })
                .collect(),
            error_km,
        }
    }
}

/// Event spec JSON `{m, tau, s, amplitude, beta, method}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct EventSpecJson {
    pub m: usize,
    pub tau: usize,
    pub s: f64,
    pub amplitude: f64,
    pub beta: f64,
    #[serde(default = "default_method")]
    pub method: SynthMethod,
}

fn default_method() -> SynthMethod {
    SynthMethod::Atom
}

impl EventSpecJson {
    pub fn into_parts(self) -> (EventSpec, SynthMethod) {
        (
            EventSpec {
                m: self.m,
                tau: self.tau,
                s: self.s,
                amplitude: self.amplitude,
                beta: self.beta,
            },
            self.method,
        )
    }
}

pub fn read_event_spec(path: &Path) -> Result<EventSpecJson> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
