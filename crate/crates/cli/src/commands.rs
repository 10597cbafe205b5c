use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use heatcut::expmv::{expmv_dense, expmv_lanczos, expmv_taylor, exprational, DEFAULT_TAYLOR_CAP};
use heatcut::graph::{generate, load_edge_list, write_edge_list, Generator, Graph};
use heatcut::linalg::{dist, norm};
use heatcut::operators::{estimate_norm, AhkGenerator, CgShiftedInverse, LinearOperator, ProjectedExponent};
use heatcut::partition::{balsep, random_frame, stream_rng, BalsepConfig, PartitionReport, PartitionResult};
use heatcut::polyapprox::{
    cheb_interpolate_exp, cheb_truncate_exp, degree_lower_bound, degree_upper_bound, lower_bound_witness,
    minimal_degree_empirical, LowerBound,
};
use heatcut::report::to_json;
use serde::Serialize;

use crate::{
    config, Command, ExpmvArgs, ExpmvBackend, GenArgs, GraphKind, Operator, PartitionArgs, PolyfitArgs,
};

pub const SCHEMA: u32 = 1;

/// Exit status for a run that completed but did not produce what was asked for.
const EXIT_NEGATIVE: u8 = 2;

type Outcome = Result<u8, String>;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

pub fn run(cmd: &Command) -> Outcome {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Partition(a) => partition(a),
        Command::Expmv(a) => expmv(a),
        Command::Polyfit(a) => polyfit(a),
    }
}

fn emit<T: Serialize>(command: &str, body: T, output: Option<&Path>) -> Result<(), String> {
    let text = to_json(&Envelope { schema: SCHEMA, command, body }).map_err(|e| e.to_string())?;
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<Graph, String> {
    let f = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    load_edge_list(BufReader::new(f)).map_err(|e| format!("{}: {e}", path.display()))
}

fn require(v: Option<usize>, flag: &str, kind: &str) -> Result<usize, String> {
    v.ok_or_else(|| format!("--{flag} is required for --type {kind}"))
}

fn gen(a: &GenArgs) -> Outcome {
    let spec = match a.kind {
        GraphKind::Clique => Generator::Clique { n: require(a.n, "n", "clique")? },
        GraphKind::Path => Generator::Path { n: require(a.n, "n", "path")? },
        GraphKind::Regular => Generator::Regular { n: require(a.n, "n", "regular")?, d: a.d },
        GraphKind::Planted => Generator::Planted { n: require(a.n, "n", "planted")?, d: a.d, cross: a.cross },
        GraphKind::Dumbbell => Generator::Dumbbell {
            left: require(a.left, "left", "dumbbell")?,
            right: require(a.right, "right", "dumbbell")?,
            bridge: a.bridge,
        },
    };
    let g = generate(&spec, a.seed).map_err(|e| e.to_string())?;
    match &a.output {
        Some(p) => {
            let f = File::create(p).map_err(|e| format!("{}: {e}", p.display()))?;
            let mut w = BufWriter::new(f);
            write_edge_list(&g, &mut w).map_err(|e| e.to_string())?;
            w.flush().map_err(|e| e.to_string())?;
        }
        None => write_edge_list(&g, std::io::stdout().lock()).map_err(|e| e.to_string())?,
    }
    Ok(0)
}

#[derive(Serialize)]
struct PartitionBody<'a> {
    input: &'a Path,
    #[serde(flatten)]
    report: PartitionReport,
}

fn partition(a: &PartitionArgs) -> Outcome {
    let mut cfg = BalsepConfig::default();
    if let Some(p) = &a.config {
        config::load(&mut cfg, p)?;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(b) = &a.backend {
        cfg.backend = b.parse().map_err(|e: heatcut::Error| e.to_string())?;
    }
    cfg.alpha_factor = a.alpha_factor.unwrap_or(cfg.alpha_factor);
    cfg.c_factor = a.c_factor.unwrap_or(cfg.c_factor);
    cfg.c_jl = a.c_jl.unwrap_or(cfg.c_jl);
    cfg.directions = a.directions.or(cfg.directions);
    cfg.k_jl = a.k_jl.or(cfg.k_jl);
    cfg.timing = a.timing;

    let g = load(&a.input)?;
    let report = balsep(&g, a.b, a.gamma, &cfg).map_err(|e| e.to_string())?;
    let code = match report.result {
        PartitionResult::BalancedCut { .. } => 0,
        PartitionResult::NoCert { .. } if !a.require_cut => 0,
        _ => EXIT_NEGATIVE,
    };
    emit("partition", PartitionBody { input: &a.input, report }, a.output.as_deref())?;
    Ok(code)
}

#[derive(Serialize)]
struct ExpmvBody<'a> {
    input: &'a Path,
    n: usize,
    operator: &'static str,
    tau: f64,
    delta: f64,
    backend: &'static str,
    seed: Option<u64>,
    norm_estimate: f64,
    input_norm: f64,
    result_norm: f64,
    dense_error: Option<f64>,
    result: Vec<f64>,
}

fn read_vector(path: &PathBuf, n: usize) -> Result<Vec<f64>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let v = text
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|e| format!("{}: {t:?}: {e}", path.display())))
        .collect::<Result<Vec<_>, _>>()?;
    if v.len() != n {
        return Err(format!("{}: expected {n} entries, got {}", path.display(), v.len()));
    }
    Ok(v)
}

fn expmv(a: &ExpmvArgs) -> Outcome {
    if !(a.tau >= 0.0 && a.tau.is_finite()) {
        return Err(format!("--tau must be finite and >= 0, got {}", a.tau));
    }
    let g = load(&a.input)?;
    let n = g.n();
    let v = match &a.vector {
        Some(p) => read_vector(p, n)?,
        None => random_frame(n, 1, &mut stream_rng(a.seed, 0)).map_err(|e| e.to_string())?.remove(0),
    };
    let zero = vec![0.0; n];
    let err = |e: heatcut::Error| e.to_string();
    let (u, norm_estimate, dense_error) = match a.operator {
        Operator::Normalized => {
            let op = ProjectedExponent::ahk(&g, &zero, a.tau).map_err(err)?;
            apply(&op, &v, a, || exprational(&op, &v, a.delta))?
        }
        Operator::Laplacian => {
            let op = AhkGenerator::new(&g, &zero, a.tau).map_err(err)?;
            let inv = CgShiftedInverse::new(&op).map_err(err)?;
            apply(&op, &v, a, || exprational(&inv, &v, a.delta))?
        }
    };
    let body = ExpmvBody {
        input: &a.input,
        n,
        operator: match a.operator {
            Operator::Normalized => "normalized",
            Operator::Laplacian => "laplacian",
        },
        tau: a.tau,
        delta: a.delta,
        backend: match a.backend {
            ExpmvBackend::Rational => "rational",
            ExpmvBackend::Lanczos => "lanczos",
            ExpmvBackend::Taylor => "taylor",
            ExpmvBackend::Dense => "dense",
        },
        seed: a.vector.is_none().then_some(a.seed),
        norm_estimate,
        input_norm: norm(&v),
        result_norm: norm(&u),
        dense_error,
        result: u,
    };
    emit("expmv", body, a.output.as_deref())?;
    Ok(0)
}

/// Runs the chosen backend on `op`; `rational` supplies the shifted-inverse route.
fn apply<A: LinearOperator>(
    op: &A,
    v: &[f64],
    a: &ExpmvArgs,
    rational: impl FnOnce() -> heatcut::Result<Vec<f64>>,
) -> Result<(Vec<f64>, f64, Option<f64>), String> {
    let err = |e: heatcut::Error| e.to_string();
    let u = match a.backend {
        ExpmvBackend::Rational => rational(),
        ExpmvBackend::Lanczos => expmv_lanczos(op, v, a.delta),
        ExpmvBackend::Taylor => expmv_taylor(op, v, a.delta, DEFAULT_TAYLOR_CAP),
        ExpmvBackend::Dense => expmv_dense(op, v),
    }
    .map_err(err)?;
    let norm_estimate = estimate_norm(op).map_err(err)?.value;
    let dense_error = if a.check { Some(dist(&u, &expmv_dense(op, v).map_err(err)?)) } else { None };
    Ok((u, norm_estimate, dense_error))
}

#[derive(Serialize)]
struct PolyfitBody {
    a: f64,
    b: f64,
    delta: f64,
    degree: usize,
    measured_error: f64,
    grid_size: usize,
    lower_bound: LowerBound,
    upper_bound_guide: usize,
    /// Certified lower bound on the best error one degree below, relative to e^{-a}.
    witness_below: Option<f64>,
}

fn polyfit(a: &PolyfitArgs) -> Outcome {
    let err = |e: heatcut::Error| e.to_string();
    let degree = minimal_degree_empirical(a.a, a.b, a.delta, a.cap).map_err(err)?;
    let p = cheb_interpolate_exp(a.a, a.b, degree).map_err(err)?;
    let witness_below = match degree {
        0 => None,
        d => {
            let q = cheb_truncate_exp(a.a, a.b, d - 1).map_err(err)?;
            Some(lower_bound_witness(&q, d - 1) / (-a.a).exp())
        }
    };
    let body = PolyfitBody {
        a: a.a,
        b: a.b,
        delta: a.delta,
        degree,
        measured_error: p.measured_error,
        grid_size: p.grid_size,
        lower_bound: degree_lower_bound(a.a, a.b, a.delta),
        upper_bound_guide: degree_upper_bound(a.a, a.b, a.delta),
        witness_below,
    };
    emit("polyfit", body, a.output.as_deref())?;
    Ok(0)
}
