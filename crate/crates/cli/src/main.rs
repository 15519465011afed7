//! Command-line pipeline: graph construction, frame diagnostics, event
//! synthesis, analysis, localization, and denoising over files.
//!
//! Every JSON output embeds the tool version and the effective configuration,
//! and reruns are byte-identical given the same inputs and flags.
//!
//! Exit codes: 0 success, 2 input error, 3 stability violation, 4 solver or
//! numeric failure.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use config::RunConfig;
use dgw::{
    build_knn_graph, corollary_lower_bound, eigendecompose, estimate_epicenter, fista,
    localization_error_km, synth_event, DgwError, DgwFrame, Graph, Result, SpectralBasis,
    TimeVertexSignal,
};

#[derive(Parser)]
#[command(name = "dgw", version, about = "Dynamic graph wavelet pipeline")]
struct Cli {
    /// JSON run configuration; missing fields take defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// RNG seed (noise in `synth`)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output path; JSON outputs default to stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a k-NN station graph and report its spectral summary
    BuildGraph {
        /// Station CSV with header `station_id,lat,lon`
        stations: PathBuf,
    },
    /// Compute frame bounds A, B and check the closed-form lower bound
    FrameBounds {
        /// Graph JSON from build-graph
        graph: PathBuf,
        /// Time horizon T of the frame
        #[arg(long, default_value_t = 256)]
        steps: usize,
    },
    /// Synthesize a propagating event as a signal matrix CSV
    Synth {
        graph: PathBuf,
        /// Event JSON `{m, tau, s, amplitude, beta, method}`
        event: PathBuf,
        #[arg(long, default_value_t = 256)]
        steps: usize,
        /// Per-waveform SNR in dB; omit for a clean signal
        #[arg(long)]
        snr_db: Option<f64>,
    },
    /// Frame analysis of a signal; dumps large coefficients as CSV
    Analyze {
        graph: PathBuf,
        /// Signal CSV (N rows x T columns, no header)
        signal: PathBuf,
        /// Dump threshold on |value|
        #[arg(long, default_value_t = 1e-6)]
        dump_threshold: f64,
    },
    /// Sparse-code the signal and localize the dominant source
    Localize {
        graph: PathBuf,
        signal: PathBuf,
        stations: PathBuf,
        /// True epicenter `lat,lon`; adds error_km to the output
        #[arg(long, allow_hyphen_values = true)]
        truth: Option<String>,
    },
    /// Sparse-code the signal and emit the synthesized (denoised) version
    Denoise {
        graph: PathBuf,
        signal: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                DgwError::Stability { .. } => 3,
                DgwError::Numeric(_) => 4,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    let out = cli.out.clone().or_else(|| cfg.io.out.clone());
    match &cli.command {
        Command::BuildGraph { stations } => cmd_build_graph(stations, &cfg, out.as_deref()),
        Command::FrameBounds { graph, steps } => {
            cmd_frame_bounds(graph, *steps, &cfg, out.as_deref())
        }
        Command::Synth {
            graph,
            event,
            steps,
            snr_db,
        } => cmd_synth(graph, event, *steps, *snr_db, cli.seed, &cfg, out.as_deref()),
        Command::Analyze {
            graph,
            signal,
            dump_threshold,
        } => cmd_analyze(graph, signal, *dump_threshold, &cfg, out.as_deref()),
        Command::Localize {
            graph,
            signal,
            stations,
            truth,
        } => cmd_localize(graph, signal, stations, truth.as_deref(), &cfg, out.as_deref()),
        Command::Denoise { graph, signal } => cmd_denoise(graph, signal, &cfg, out.as_deref()),
    }
}

/// Wrap a payload with version and effective-config provenance.
fn with_provenance(cfg: &RunConfig, seed: Option<u64>, payload: Value) -> Result<Value> {
    let mut map = serde_json::Map::new();
    map.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    map.insert("config".into(), serde_json::to_value(cfg)?);
    if let Some(seed) = seed {
        map.insert("seed".into(), json!(seed));
    }
    if let Value::Object(fields) = payload {
        for (k, v) in fields {
            map.insert(k, v);
        }
    }
    Ok(Value::Object(map))
}

fn emit_json(out: Option<&Path>, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn load_graph_with_basis(path: &Path) -> Result<(Graph, SpectralBasis)> {
    let graph = dgw::io::read_graph_json(path)?;
    let basis = eigendecompose(&graph)?;
    Ok((graph, basis))
}

fn build_frame_from_config(
    cfg: &RunConfig,
    basis: SpectralBasis,
    n_steps: usize,
) -> Result<DgwFrame> {
    let scales = cfg.scales(basis.lambda_max())?;
    if cfg.frame.beta <= 0.0 {
        eprintln!(
            "warning: beta = {} <= 0; the frame property is not guaranteed",
            cfg.frame.beta
        );
    }
    let frame = DgwFrame::build(basis, n_steps, &scales, cfg.frame.beta)?;
    if frame.wrap_residual() > 1e-3 {
        eprintln!(
            "warning: exp(-beta*T) = {:.3e} > 1e-3; periodic time wrap-around is not negligible",
            frame.wrap_residual()
        );
    }
    Ok(frame)
}

fn cmd_build_graph(stations_path: &Path, cfg: &RunConfig, out: Option<&Path>) -> Result<()> {
    let stations = dgw::io::read_station_csv(stations_path)?;
    let graph = build_knn_graph(&stations, cfg.graph.k, cfg.graph.sigma)?;
    let basis = eigendecompose(&graph)?;
    if !graph.is_connected() {
        eprintln!(
            "warning: graph is disconnected ({} components); localization quality degrades",
            graph.n_components()
        );
    }
    let graph_json = dgw::io::GraphJson::from_graph(&graph);
    let payload = json!({
        "n": graph_json.n,
        "edges": graph_json.edges,
        "spectral": {
            "lambda_max": basis.lambda_max(),
            "n_components": graph.n_components(),
            "connected": graph.is_connected(),
        },
    });
    emit_json(out, &with_provenance(cfg, None, payload)?)
}

fn cmd_frame_bounds(
    graph_path: &Path,
    steps: usize,
    cfg: &RunConfig,
    out: Option<&Path>,
) -> Result<()> {
    let (_, basis) = load_graph_with_basis(graph_path)?;
    let frame = build_frame_from_config(cfg, basis, steps)?;
    let bounds = frame.frame_bounds();
    let corollary = corollary_lower_bound(cfg.frame.beta.max(0.0));

    // truncation slack: the cached spectra drop the t >= T tail of the
    // infinite-horizon sum the corollary bounds
    let tolerance = if cfg.frame.beta > 0.0 {
        let tail = frame.wrap_residual() / (1.0 - (-cfg.frame.beta).exp());
        (tail * (2.0 / (1.0 - (-cfg.frame.beta).exp()) + tail)).max(1e-12)
    } else {
        1e-12
    };
    if bounds.lower < corollary - tolerance {
        return Err(DgwError::Numeric(format!(
            "computed A = {} falls below the closed-form lower bound {} (tolerance {})",
            bounds.lower, corollary, tolerance
        )));
    }

    let payload = json!({
        "A": bounds.lower,
        "B": bounds.upper,
        "corollary_lower_bound": corollary,
        "truncation_tolerance": tolerance,
        "steps": steps,
        "scales": frame.scales(),
    });
    emit_json(out, &with_provenance(cfg, None, payload)?)
}

fn cmd_synth(
    graph_path: &Path,
    event_path: &Path,
    steps: usize,
    snr_db: Option<f64>,
    seed: u64,
    cfg: &RunConfig,
    out: Option<&Path>,
) -> Result<()> {
    let (graph, basis) = load_graph_with_basis(graph_path)?;
    let (spec, method) = dgw::io::read_event_spec(event_path)?.into_parts();
    let mut signal = synth_event(&graph, &basis, &spec, method, steps)?;
    if let Some(snr) = snr_db {
        let silent = dgw::sim::zero_rows(&signal);
        if !silent.is_empty() {
            eprintln!(
                "warning: {} all-zero waveform rows receive no noise (SNR undefined): {:?}",
                silent.len(),
                silent
            );
        }
        signal = dgw::add_noise(&signal, snr, seed)?;
    }
    let out_path = out.ok_or_else(|| {
        DgwError::InvalidParameter("synth writes a signal matrix; --out is required".into())
    })?;
    dgw::io::write_signal_csv(out_path, &signal)?;
    let payload = json!({
        "output": out_path.display().to_string(),
        "n": signal.n_vertices(),
        "t": signal.n_steps(),
        "event": {
            "m": spec.m, "tau": spec.tau, "s": spec.s,
            "amplitude": spec.amplitude, "beta": spec.beta,
        },
        "snr_db": snr_db,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&with_provenance(cfg, Some(seed), payload)?)?
    );
    Ok(())
}

fn cmd_analyze(
    graph_path: &Path,
    signal_path: &Path,
    dump_threshold: f64,
    cfg: &RunConfig,
    out: Option<&Path>,
) -> Result<()> {
    let (_, basis) = load_graph_with_basis(graph_path)?;
    let signal = dgw::io::read_signal_csv(signal_path)?;
    check_signal_matches_graph(&signal, basis.n_vertices())?;
    let frame = build_frame_from_config(cfg, basis, signal.n_steps())?;
    let coeffs = frame.analyze(&signal)?;
    let out_path = out.ok_or_else(|| {
        DgwError::InvalidParameter("analyze writes a coefficient dump; --out is required".into())
    })?;
    dgw::io::write_coefficients_csv(out_path, &coeffs, dump_threshold)?;
    let payload = json!({
        "output": out_path.display().to_string(),
        "dump_threshold": dump_threshold,
        "frame": dgw::io::FrameMetaJson::from_frame(&frame),
        "max_abs_coefficient": coeffs.max_abs(),
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&with_provenance(cfg, None, payload)?)?
    );
    Ok(())
}

fn cmd_localize(
    graph_path: &Path,
    signal_path: &Path,
    stations_path: &Path,
    truth: Option<&str>,
    cfg: &RunConfig,
    out: Option<&Path>,
) -> Result<()> {
    let (graph, basis) = load_graph_with_basis(graph_path)?;
    let stations = dgw::io::read_station_csv(stations_path)?;
    if stations.len() != graph.n_vertices() {
        return Err(DgwError::DimensionMismatch(format!(
            "station table has {} entries, graph has {} vertices",
            stations.len(),
            graph.n_vertices()
        )));
    }
    let signal = dgw::io::read_signal_csv(signal_path)?;
    check_signal_matches_graph(&signal, graph.n_vertices())?;
    if !graph.is_connected() {
        eprintln!("warning: graph is disconnected; localization quality degrades");
    }

    let frame = build_frame_from_config(cfg, basis, signal.n_steps())?;
    let result = fista(&frame, &signal, &cfg.solver_config())?;
    let estimate = estimate_epicenter(&result.coefficients, &stations, cfg.localization.rho)?;

    let error_km = match truth {
        Some(text) => Some(localization_error_km(&estimate, parse_truth(text)?)),
        None => None,
    };
    let estimate_json = dgw::io::EventEstimateJson::from_estimate(&estimate, error_km);
    let payload = json!({
        "estimate": estimate_json,
        "solver": dgw::io::SolverDiagnosticsJson::from_result(&result),
    });
    emit_json(out, &with_provenance(cfg, None, payload)?)
}

fn cmd_denoise(
    graph_path: &Path,
    signal_path: &Path,
    cfg: &RunConfig,
    out: Option<&Path>,
) -> Result<()> {
    let (_, basis) = load_graph_with_basis(graph_path)?;
    let signal = dgw::io::read_signal_csv(signal_path)?;
    check_signal_matches_graph(&signal, basis.n_vertices())?;
    let frame = build_frame_from_config(cfg, basis, signal.n_steps())?;
    let result = fista(&frame, &signal, &cfg.solver_config())?;
    let denoised = frame.synthesize(&result.coefficients)?;
    let out_path = out.ok_or_else(|| {
        DgwError::InvalidParameter("denoise writes a signal matrix; --out is required".into())
    })?;
    dgw::io::write_signal_csv(out_path, &denoised)?;
    let payload = json!({
        "output": out_path.display().to_string(),
        "solver": dgw::io::SolverDiagnosticsJson::from_result(&result),
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&with_provenance(cfg, None, payload)?)?
    );
    Ok(())
}

fn check_signal_matches_graph(signal: &TimeVertexSignal, n_vertices: usize) -> Result<()> {
    if signal.n_vertices() != n_vertices {
        return Err(DgwError::DimensionMismatch(format!(
            "signal has {} rows, graph has {} vertices",
            signal.n_vertices(),
            n_vertices
        )));
    }
    Ok(())
}

fn parse_truth(text: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(DgwError::InvalidParameter(format!(
            "--truth expects `lat,lon`, got `{text}`"
        )));
    }
    let lat: f64 = parts[0]
        .parse()
        .map_err(|_| DgwError::InvalidParameter(format!("bad latitude `{}`", parts[0])))?;
    let lon: f64 = parts[1]
        .parse()
        .map_err(|_| DgwError::InvalidParameter(format!("bad longitude `{}`", parts[1])))?;
    Ok((lat, lon))
}
