use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use irrepcore::io::format_g17;
use irrepcore::rotations::rng_from_seed;
use irrepcore::sh::{degree_order, num_components};
use irrepcore::suites::{is_known_suite, run_suite, RunConfig};
use irrepcore::{
    dense_init, eval_sh, featurize, tensor_apply, Capacity, CgcTable, Error, FeatureShape,
    IrrepFeatures, Layout, RadialBasisSpec, RadialKind, TensorParams,
};

use crate::{Command, LayoutArg, ParamsKind, TableFormat, EXIT_DOMAIN, EXIT_USAGE, EXIT_VERIFY};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: EXIT_DOMAIN,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_DOMAIN,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

pub fn run(cmd: Command) -> Outcome {
    let capacity = Capacity::from_env()?;
    match cmd {
        Command::Sh { r, max_degree } => cmd_sh(&r, max_degree, capacity),
        Command::Cgc {
            max_degree,
            format,
            out,
        } => cmd_cgc(max_degree, format, out.as_deref(), capacity),
        Command::Check {
            suite,
            max_degree,
            trials,
            tol,
            seed,
            features,
        } => cmd_check(&suite, max_degree, trials, tol, seed, features, capacity),
        Command::Bench { seed, calls } => cmd_bench(seed, calls, capacity),
        Command::Featurize {
            r,
            max_degree,
            radial_kind,
            radial_count,
            cutoff,
            out,
        } => {
            let kind: RadialKind = radial_kind.parse().map_err(|e: Error| usage(e.to_string()))?;
            let spec = RadialBasisSpec::new(radial_count, kind, cutoff)?;
            cmd_featurize(&r, max_degree, &spec, out.as_deref(), capacity)
        }
        Command::Params {
            kind,
            max_degree,
            features,
            features_out,
            layout,
            seed,
            out,
        } => cmd_params(kind, max_degree, features, features_out, layout, seed, &out, capacity),
    }
}

fn parse_vector(s: &str) -> Result<[f64; 3], Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(usage(format!("expected x,y,z, got {s:?}")));
    }
    let mut v = [0.0f64; 3];
    for (o, p) in v.iter_mut().zip(&parts) {
        *o = p
            .parse()
            .map_err(|_| usage(format!("{p:?} is not a number")))?;
        if !o.is_finite() {
            return Err(usage(format!("{p:?} is not finite")));
        }
    }
    Ok(v)
}

fn checksum(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn checksum_f64s(values: &[f64]) -> String {
    let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
    checksum(&bytes)
}

fn cmd_sh(r: &str, max_degree: usize, capacity: Capacity) -> Outcome {
    let r = parse_vector(r)?;
    capacity.check(max_degree)?;
    let y = eval_sh(r, max_degree)?;
    let mut out = io::stdout().lock();
    writeln!(out, "l,m,value")?;
    for (i, v) in y.values().iter().enumerate() {
        let (l, m) = degree_order(i);
        writeln!(out, "{l},{m},{}", format_g17(*v))?;
    }
    Ok(0)
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes),
        None => io::stdout().lock().write_all(bytes),
    }
}

fn cmd_cgc(max_degree: usize, format: TableFormat, out: Option<&Path>, capacity: Capacity) -> Outcome {
    let table = CgcTable::build(max_degree, capacity)?;
    let bytes = match format {
        TableFormat::Csv => {
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            buf
        }
        TableFormat::Blob => table.to_blob(),
    };
    write_output(out, &bytes)?;
    let line = format!("sha256 {}", checksum(&bytes));
    // keep stdout clean when it carries the table
    if out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(0)
}

fn cmd_check(
    suite: &str,
    max_degree: usize,
    trials: usize,
    tol: f64,
    seed: u64,
    features: usize,
    capacity: Capacity,
) -> Outcome {
    if !is_known_suite(suite) {
        return Err(usage(format!("unknown suite {suite:?}")));
    }
    let cfg = RunConfig::new(max_degree, trials, tol, seed, features).map_err(|e| usage(e.to_string()))?;
    let table = CgcTable::build(max_degree.max(1), capacity)?;
    let results = run_suite(suite, &cfg, &table)?;
    let mut out = io::stdout().lock();
    let mut all_pass = true;
    for r in &results {
        let per_block: Map<String, Value> = r
            .per_block
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        let line = json!({
            "op": r.op,
            "trials": r.trials,
            "seed": r.seed,
            "max_dev": r.max_dev,
            "per_block": per_block,
        });
        writeln!(out, "{line}")?;
        all_pass &= r.passes(tol);
    }
    Ok(if all_pass { 0 } else { EXIT_VERIFY })
}

fn cmd_bench(seed: u64, calls: usize, capacity: Capacity) -> Outcome {
    let start = Instant::now();
    let table = CgcTable::build(8, capacity)?;
    let cgc_secs = start.elapsed().as_secs_f64();
    let cgc_sum = checksum(&table.to_blob());

    let shape = FeatureShape::new(Layout::General, 2);
    let p = TensorParams::init(shape, shape, 2, 64)?;
    let mut rng = rng_from_seed(seed);
    let x = IrrepFeatures::random(Layout::General, 2, 64, &mut rng);
    let y = IrrepFeatures::random(Layout::General, 2, 64, &mut rng);
    let mut acc = vec![0.0; x.data().len()];
    let start = Instant::now();
    for _ in 0..calls {
        let z = tensor_apply(&p, &table, &x, &y, 2)?;
        for (a, v) in acc.iter_mut().zip(z.data()) {
            *a += v;
        }
    }
    let tensor_secs = start.elapsed().as_secs_f64();

    let points: Vec<[f64; 3]> = (0..calls)
        .map(|_| {
            let v = IrrepFeatures::random(Layout::Compact, 1, 1, &mut rng);
            [v.data()[1], v.data()[2], v.data()[3]]
        })
        .collect();
    let mut sh_acc = vec![0.0; num_components(8)];
    let start = Instant::now();
    for r in &points {
        let v = eval_sh(*r, 8)?;
        for (a, y) in sh_acc.iter_mut().zip(v.values()) {
            *a += y;
        }
    }
    let sh_secs = start.elapsed().as_secs_f64();

    let report = json!({
        "seed": seed,
        "cgc_build": {"L": 8, "seconds": cgc_secs, "checksum": cgc_sum},
        "tensor_apply": {"L": 2, "F": 64, "calls": calls, "seconds": tensor_secs, "checksum": checksum_f64s(&acc)},
        "eval_sh": {"L": 8, "calls": calls, "seconds": sh_secs, "checksum": checksum_f64s(&sh_acc)},
    });
    println!("{report}");
    Ok(0)
}

fn cmd_featurize(
    r: &str,
    max_degree: usize,
    spec: &RadialBasisSpec,
    out: Option<&Path>,
    capacity: Capacity,
) -> Outcome {
    let r = parse_vector(r)?;
    capacity.check(max_degree)?;
    let x = featurize(r, spec, max_degree)?;
    let k = spec.count();
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "l,m,k,value")?;
    for (i, row) in x.data().chunks_exact(k).enumerate() {
        let (l, m) = degree_order(i);
        for (c, v) in row.iter().enumerate() {
            writeln!(stdout, "{l},{m},{c},{}", format_g17(*v))?;
        }
    }
    if let Some(path) = out {
        let blob = x.to_blob();
        fs::write(path, &blob)?;
        eprintln!("sha256 {}", checksum(&blob));
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_params(
    kind: ParamsKind,
    max_degree: usize,
    features: usize,
    features_out: Option<usize>,
    layout: LayoutArg,
    seed: u64,
    out: &Path,
    capacity: Capacity,
) -> Outcome {
    capacity.check(max_degree)?;
    let layout = match layout {
        LayoutArg::General => Layout::General,
        LayoutArg::Compact => Layout::Compact,
    };
    let blob = match kind {
        ParamsKind::Dense => {
            dense_init(seed, max_degree, features, features_out.unwrap_or(features), layout)?.to_blob()
        }
        ParamsKind::Tensor => {
            let s = FeatureShape::new(layout, max_degree);
            TensorParams::init(s, s, max_degree, features)?.to_blob()
        }
    };
    fs::write(out, &blob)?;
    println!("sha256 {}", checksum(&blob));
    Ok(0)
}
