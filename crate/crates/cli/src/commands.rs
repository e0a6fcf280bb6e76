use std::fs;
use std::path::Path;

use qbigraph::graph::Side;
use qbigraph::protocols::{
    estimate_parity_counts, measure_bloch_means, measure_entanglement_distance,
    measure_parity_correlators, CountEstimate, ProtocolError,
};
use qbigraph::rng::derive_seed;
use qbigraph::{BipartiteGraph, EstimationResult, Execution, QubitParams, VertexId};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{MethodChoice, OutputFormat, RunConfig, Target};
use crate::CliError;

/// Output of a subcommand: the bytes to write and the process exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub body: String,
    pub code: i32,
}

impl Report {
    fn ok(body: String) -> Self {
        Report { body, code: 0 }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_graph(cfg: &RunConfig) -> Result<BipartiteGraph, CliError> {
    let path = cfg.graph.as_deref().ok_or(CliError::MissingGraph)?;
    Ok(BipartiteGraph::parse(&read(path)?)?)
}

fn load_params(cfg: &RunConfig, g: &BipartiteGraph) -> Result<QubitParams, CliError> {
    match &cfg.params {
        Some(path) => Ok(QubitParams::parse(&read(path)?)?),
        None => Ok(cfg.angles.for_graph(g)?),
    }
}

fn execution(cfg: &RunConfig, method: MethodChoice, seed: u64) -> Execution {
    match method {
        MethodChoice::Analytic => Execution::Analytic,
        MethodChoice::Exact => Execution::Exact,
        MethodChoice::Sampled => Execution::Sampled {
            shots: cfg.shots_or_default(),
            seed,
            noise: (!cfg.noise.is_ideal()).then_some(cfg.noise),
        },
    }
}

fn format_or(
    cfg: &RunConfig,
    default: OutputFormat,
    allowed: &[OutputFormat],
    command: &'static str,
) -> Result<OutputFormat, CliError> {
    let f = cfg.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::UnsupportedFormat {
            command,
            format: f.name(),
        })
    }
}

fn config_echo(cfg: &RunConfig) -> Value {
    Value::Object(
        cfg.pairs()
            .into_iter()
            .map(|(k, v)| (k.to_string(), Value::String(v)))
            .collect::<Map<_, _>>(),
    )
}

fn graph_echo(g: &BipartiteGraph) -> Value {
    json!({
        "u_count": g.u_count(),
        "v_count": g.v_count(),
        "edges": g.edges().iter().map(|(u, v)| format!("{} {}", u.0, v.0)).collect::<Vec<_>>(),
    })
}

fn to_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn indices(set: &std::collections::BTreeSet<VertexId>) -> Vec<usize> {
    set.iter().map(|v| v.0).collect()
}

/// Degree summary and parity-set sizes of a graph file.
pub fn cmd_validate(cfg: &RunConfig) -> Result<Report, CliError> {
    let format = format_or(
        cfg,
        OutputFormat::Text,
        &[OutputFormat::Text, OutputFormat::Json],
        "validate",
    )?;
    let g = load_graph(cfg)?;
    let s = g.parity_sets();
    let body = match format {
        OutputFormat::Json => to_json(&json!({
            "command": "validate",
            "graph": graph_echo(&g),
            "degrees": s.degree,
            "u_odd": indices(&s.u_odd),
            "u_even": indices(&s.u_even),
            "v_odd": indices(&s.v_odd),
            "v_even": indices(&s.v_even),
        })),
        _ => {
            let degrees: Vec<String> = s.degree.iter().map(ToString::to_string).collect();
            format!(
                "|U|={} |V|={} |E|={} U_odd={} V_odd={}\nU_even={} V_even={} degrees={}\n",
                g.u_count(),
                g.v_count(),
                g.edges().len(),
                s.u_odd.len(),
                s.v_odd.len(),
                s.u_even.len(),
                s.v_even.len(),
                degrees.join(","),
            )
        }
    };
    Ok(Report::ok(body))
}

/// Entanglement distance of one qubit, analytic and exact, plus a sampled
/// estimate when shots are configured or `method=sampled`.
pub fn cmd_entanglement(cfg: &RunConfig) -> Result<Report, CliError> {
    format_or(
        cfg,
        OutputFormat::Json,
        &[OutputFormat::Json],
        "entanglement",
    )?;
    let g = load_graph(cfg)?;
    let params = load_params(cfg, &g)?;
    let q = VertexId(cfg.qubit.ok_or(CliError::MissingQubit)?);
    let side = g.side(q)?;

    let analytic = measure_entanglement_distance(&g, &params, q, &Execution::Analytic)?;
    let exact = measure_entanglement_distance(&g, &params, q, &Execution::Exact)?;
    let means = measure_bloch_means(&g, &params, q, &Execution::Analytic)?.map(|r| r.value);

    let mut record = json!({
        "command": "entanglement",
        "config": config_echo(cfg),
        "graph": graph_echo(&g),
        "qubit": q.0,
        "side": if side == Side::U { "U" } else { "V" },
        "degree": g.degree(q)?,
        "bloch_means": means,
        "analytic": analytic,
        "exact": exact,
    });
    if cfg.shots.is_some() || cfg.method == Some(MethodChoice::Sampled) {
        let exec = execution(cfg, MethodChoice::Sampled, cfg.seed);
        let sampled = measure_entanglement_distance(&g, &params, q, &exec)?;
        let sampled_means = measure_bloch_means(&g, &params, q, &exec)?.map(|r| r.value);
        record["sampled"] = json!(sampled);
        record["sampled_bloch_means"] = json!(sampled_means);
    }
    Ok(Report::ok(to_json(&record)))
}

fn count_json(c: &CountEstimate, round: bool) -> Value {
    let mut v = json!({ "value": c.value, "stderr": c.stderr });
    if round {
        let (r, far) = c.rounded();
        v["rounded"] = json!(r);
        v["beyond_two_stderr"] = json!(far);
    }
    v
}

fn protocol_error_record(cfg: &RunConfig, e: &ProtocolError) -> Option<Value> {
    let detail = match e {
        ProtocolError::NonInvertibleParameters { base, value } => {
            json!({ "kind": "NonInvertibleParameters", "base": base, "value": value })
        }
        ProtocolError::NonPositiveCorrelator { correlator, value } => {
            json!({ "kind": "NonPositiveCorrelator", "correlator": correlator, "value": value })
        }
        ProtocolError::NonUniformParameters => json!({ "kind": "NonUniformParameters" }),
        _ => return None,
    };
    let mut detail = detail;
    detail["message"] = json!(e.to_string());
    Some(json!({
        "command": "parity",
        "config": config_echo(cfg),
        "error": detail,
    }))
}

/// The four global correlators and the odd/even vertex counts they encode.
///
/// Inversion failures are reported as a JSON error record with exit code 2.
pub fn cmd_parity(cfg: &RunConfig) -> Result<Report, CliError> {
    format_or(cfg, OutputFormat::Json, &[OutputFormat::Json], "parity")?;
    let g = load_graph(cfg)?;
    let params = load_params(cfg, &g)?;
    let exec = execution(cfg, cfg.effective_method(), cfg.seed);
    let est = match estimate_parity_counts(&g, &params, &exec) {
        Ok(est) => est,
        Err(e) => {
            return match protocol_error_record(cfg, &e) {
                Some(record) => Ok(Report {
                    body: to_json(&record),
                    code: 2,
                }),
                None => Err(e.into()),
            }
        }
    };
    let s = g.parity_sets();
    let record = json!({
        "command": "parity",
        "config": config_echo(cfg),
        "graph": graph_echo(&g),
        "method": exec.method(),
        "correlators": est.correlators,
        "counts": {
            "u_odd": count_json(&est.u_odd, cfg.round),
            "v_odd": count_json(&est.v_odd, cfg.round),
            "u_even": count_json(&est.u_even, cfg.round),
            "v_even": count_json(&est.v_even, cfg.round),
        },
        "graph_counts": {
            "u_odd": s.u_odd.len(),
            "v_odd": s.v_odd.len(),
            "u_even": s.u_even.len(),
            "v_even": s.v_even.len(),
        },
    });
    Ok(Report::ok(to_json(&record)))
}

/// Shortest round-trip text, switching to exponent form outside `[1e-5, 1e16)`.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

struct SweepRow {
    a: f64,
    b: f64,
    analytic: f64,
    measured: Option<EstimationResult>,
}

fn evaluate(
    target: Target,
    g: &BipartiteGraph,
    params: &QubitParams,
    exec: &Execution,
) -> Result<EstimationResult, CliError> {
    Ok(match target {
        Target::Entanglement(q) => measure_entanglement_distance(g, params, q, exec)?,
        Target::Correlator(c) => *measure_parity_correlators(g, params, exec)?.get(c),
    })
}

/// Evaluates the target over a two-axis grid.
///
/// CSV columns are `index,<axis A>,<axis B>,analytic,sampled,stderr,seed`,
/// preceded by `#` lines echoing the config. Axis A is the outer loop, so
/// `index = i_A * n_B + i_B`. The `sampled` column holds the measured value
/// for `method=sampled` and the statevector value for `method=exact`; it is
/// empty for analytic sweeps, as are `stderr` and `seed`. Each grid point
/// samples with its own seed derived from the base seed and the index.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<Report, CliError> {
    let format = format_or(
        cfg,
        OutputFormat::Csv,
        &[OutputFormat::Csv, OutputFormat::Json],
        "sweep",
    )?;
    if cfg.params.is_some() {
        return Err(CliError::Config {
            key: "params".into(),
            message: "sweeps vary uniform per-side angles; drop the per-qubit file".into(),
        });
    }
    let g = load_graph(cfg)?;
    let spec = cfg.sweep;
    if let Target::Entanglement(q) = spec.target {
        g.side(q)?;
    }
    let grid = spec.values()?;
    let n = grid.len();
    let method = cfg.effective_method();

    let rows = (0..n * n)
        .into_par_iter()
        .map(|index| -> Result<SweepRow, CliError> {
            let (a, b) = (grid[index / n], grid[index % n]);
            let mut angles = cfg.angles;
            angles.set(spec.axes.0, a);
            angles.set(spec.axes.1, b);
            let params = angles.for_graph(&g)?;
            let analytic = evaluate(spec.target, &g, &params, &Execution::Analytic)?.value;
            let measured = match method {
                MethodChoice::Analytic => None,
                m => {
                    let exec = execution(cfg, m, derive_seed(cfg.seed, index as u64));
                    Some(evaluate(spec.target, &g, &params, &exec)?)
                }
            };
            Ok(SweepRow {
                a,
                b,
                analytic,
                measured,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let columns = [
        "index".to_string(),
        spec.axes.0.name().to_string(),
        spec.axes.1.name().to_string(),
        "analytic".into(),
        "sampled".into(),
        "stderr".into(),
        "seed".into(),
    ];
    let cells = |i: usize, r: &SweepRow| -> [String; 7] {
        let (value, stderr, seed) = match &r.measured {
            Some(m) => (
                num(m.value),
                num(m.stderr),
                m.seed.map(|s| s.to_string()).unwrap_or_default(),
            ),
            None => Default::default(),
        };
        [
            i.to_string(),
            num(r.a),
            num(r.b),
            num(r.analytic),
            value,
            stderr,
            seed,
        ]
    };

    let body = match format {
        OutputFormat::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    json!({
                        "index": i,
                        spec.axes.0.name(): r.a,
                        spec.axes.1.name(): r.b,
                        "analytic": r.analytic,
                        "sampled": r.measured,
                    })
                })
                .collect();
            to_json(&json!({
                "command": "sweep",
                "config": config_echo(cfg),
                "graph": graph_echo(&g),
                "columns": columns,
                "rows": rows,
            }))
        }
        _ => {
            let mut out = String::from("# qbigraph sweep\n");
            for (k, v) in cfg.pairs() {
                out.push_str(&format!("# {k}={v}\n"));
            }
            out.push_str(&format!(
                "# graph: |U|={} |V|={} |E|={}\n",
                g.u_count(),
                g.v_count(),
                g.edges().len()
            ));
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&columns)?;
            for (i, r) in rows.iter().enumerate() {
                w.write_record(cells(i, r))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io {
                path: "<csv buffer>".into(),
                source: e.into_error(),
            })?;
            out.push_str(&String::from_utf8(bytes).expect("CSV of UTF-8 fields is UTF-8"));
            out
        }
    };
    Ok(Report::ok(body))
}
