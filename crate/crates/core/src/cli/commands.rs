use std::fmt::Write as _;

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::denning::{data_movement_accuracy, denning_table, query_miss_ratio, QueryMode};
use crate::dsl::AffineProgram;
use crate::poly::{int, poly_json, ratfn_json};
use crate::ri::{ri_distribution, ri_sum_check};
use crate::sim::{sweep, CacheGeometry};
use crate::symbolic::{
    default_samples, derive_symbolic_table, min_max_scaling, predict, ri_sum_check_symbolic, symbolic_denning,
    SymbolicCacheTable, SymbolicError, SymbolicRiTable,
};
use crate::trace::{block_sequence, generate_trace, pad_layout, unpadded_layout, write_csv};

use super::output::{csv, json, table};
use super::{load_program, Format, Report, RunConfig, EXIT_CHECK, EXIT_DERIVATION, EXIT_INPUT};

macro_rules! tri {
    ($e:expr, $code:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return Report::fail($code, format!("error: {e}")),
        }
    };
}

fn derivation_code(e: &SymbolicError) -> i32 {
    match e {
        SymbolicError::Trace(_)
        | SymbolicError::UnknownParam(_)
        | SymbolicError::InvalidSample { .. }
        | SymbolicError::OutOfDomain { .. } => EXIT_INPUT,
        _ => EXIT_DERIVATION,
    }
}

/// The `--param` value, or the only parameter left unbound.
fn resolve_param(prog: &AffineProgram, cfg: &RunConfig) -> Result<String, String> {
    if let Some(p) = &cfg.param {
        return Ok(p.clone());
    }
    let free: Vec<&String> = prog.symbols.iter().filter(|s| !cfg.bindings.contains_key(*s)).collect();
    match free[..] {
        [p] => Ok(p.clone()),
        [] if prog.symbols.len() == 1 => Ok(prog.symbols[0].clone()),
        [] => Err("program has no parameter to analyze in; pass --param".into()),
        _ => Err(format!(
            "several unbound parameters ({}); pass --param and --bind the rest",
            free.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
        )),
    }
}

fn symbolic(
    prog: &AffineProgram,
    cfg: &RunConfig,
    param: &str,
) -> Result<(SymbolicRiTable, SymbolicCacheTable), SymbolicError> {
    let samples = cfg.samples.clone().unwrap_or_else(|| default_samples(prog, cfg.b));
    let mut fixed = cfg.bindings.clone();
    fixed.remove(param);
    let t = derive_symbolic_table(prog, param, &fixed, cfg.b, &samples)?;
    let c = symbolic_denning(&t)?;
    Ok((t, c))
}

fn render(cfg: &RunConfig, v: &Value, header: &[&str], rows: &[Vec<String>], preamble: &str) -> String {
    match cfg.format {
        Format::Json => json(v),
        Format::Csv => csv(header, rows),
        Format::Table => format!("{preamble}{}", table(header, rows)),
    }
}

fn nest_warning(prog: &AffineProgram) -> Option<String> {
    let k = prog.top_level_nests();
    (k > 1).then(|| {
        format!(
            "warning: program has {k} top-level loop nests; predicted miss-ratio drops may sit at smaller sizes than simulated (moving cliff)"
        )
    })
}

/// Symbolic reuse-interval table, symbolic cache table and the sum test.
pub fn cmd_analyze(cfg: &RunConfig) -> Report {
    let prog = tri!(load_program(&cfg.input), EXIT_INPUT);
    let param = tri!(resolve_param(&prog, cfg), EXIT_INPUT);
    let (t, c) = match symbolic(&prog, cfg, &param) {
        Ok(v) => v,
        Err(e) => return Report::fail(derivation_code(&e), format!("error: {e}")),
    };
    let check = ri_sum_check_symbolic(&t);
    let p = param.as_str();
    let ct = &c.table;
    let v = json!({
        "param": p,
        "block_size": cfg.b,
        "domain": { "modulus": t.domain.modulus, "min_n": t.domain.min_n },
        "samples": { "fitted": t.fitted, "held_out": t.held_out, "degenerate": t.degenerate },
        "accesses": poly_json(&t.accesses, p),
        "data_size": poly_json(&t.data_size, p),
        "ri_table": t.rows.iter().enumerate().map(|(i, r)| json!({
            "row": i + 1,
            "value": poly_json(&r.value, p),
            "real": ratfn_json(&r.real, p),
            "imaginary": ratfn_json(&r.imaginary, p),
        })).collect::<Vec<_>>(),
        "cache_table": ct.rows.iter().enumerate().map(|(i, r)| json!({
            "row": i,
            "value": ratfn_json(&r.value, p),
            "cache_size": ratfn_json(&r.cache_size, p),
            "miss_ratio": ratfn_json(&r.miss_ratio, p),
            "cold": ratfn_json(&r.cold, p),
            "adjusted_miss_ratio": ratfn_json(&ct.adjusted(i), p),
        })).collect::<Vec<_>>(),
        "invariance": {
            "pass": check.pass,
            "sum": ratfn_json(&check.sum, p),
            "expected": poly_json(&check.expected, p),
        },
    });
    let header = ["row", "ri", "real", "imaginary", "m", "cold", "c", "miss_ratio"];
    let rows: Vec<Vec<String>> = ct
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let ri = |f: &crate::poly::RationalFn| if i == 0 { "-".to_string() } else { f.render(p) };
            vec![
                i.to_string(),
                ri(&r.value),
                ri(&r.real_portion),
                ri(&r.imaginary_portion),
                r.miss_ratio.render(p),
                r.cold.render(p),
                r.cache_size.render(p),
                ct.adjusted(i).render(p),
            ]
        })
        .collect();
    let mut pre = String::new();
    let _ = writeln!(
        pre,
        "parameter {p}, b = {}, valid for {p} = 0 mod {} and {p} >= {}",
        cfg.b, t.domain.modulus, t.domain.min_n
    );
    let _ = writeln!(
        pre,
        "fitted at {:?}, verified at {:?}, degenerate {:?}",
        t.fitted, t.held_out, t.degenerate
    );
    let _ = writeln!(
        pre,
        "accesses {}, data blocks {}",
        t.accesses.render(p),
        t.data_size.render(p)
    );
    let _ = writeln!(
        pre,
        "sum of ri * P(ri) = {}: {}\n",
        check.sum.render(p),
        if check.pass { "matches data size" } else { "MISMATCH" }
    );
    Report {
        output: render(cfg, &v, &header, &rows, &pre),
        warnings: Vec::new(),
        exit_code: if check.pass { 0 } else { EXIT_CHECK },
    }
}

fn geometries(cfg: &RunConfig) -> Vec<CacheGeometry> {
    let block_bytes = cfg.geometries.first().map_or(64, |g| g.block_bytes);
    let mut g = cfg.geometries.clone();
    g.extend(
        cfg.sweep
            .iter()
            .map(|&c| CacheGeometry::fully_associative(c, cfg.b, block_bytes)),
    );
    if g.is_empty() {
        g.push(CacheGeometry::fully_associative(96, cfg.b, 64));
    }
    g
}

/// Exact LRU simulation at the bound parameter values.
pub fn cmd_simulate(cfg: &RunConfig) -> Report {
    let prog = tri!(load_program(&cfg.input), EXIT_INPUT);
    let trace = tri!(generate_trace(&prog, &cfg.bindings, cfg.b), EXIT_INPUT);
    let layout = if cfg.padded {
        pad_layout(&prog, &cfg.bindings, cfg.b)
    } else {
        unpadded_layout(&prog, &cfg.bindings, cfg.b)
    };
    let layout = tri!(layout, EXIT_INPUT);
    if let Some(path) = &cfg.dump_trace {
        let file = tri!(std::fs::File::create(path), EXIT_INPUT);
        tri!(write_csv(&trace, std::io::BufWriter::new(file)), EXIT_INPUT);
    }
    let geoms = geometries(cfg);
    let results = tri!(sweep(&trace, &layout, &geoms), EXIT_INPUT);
    let v = json!({
        "bindings": cfg.bindings,
        "block_size": cfg.b,
        "layout": if cfg.padded { "padded" } else { "unpadded" },
        "data_blocks": trace.distinct_blocks(),
        "results": results.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
    });
    let header = ["geometry", "capacity", "accesses", "misses", "cold", "miss_ratio"];
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            vec![
                r.geometry.to_string(),
                r.geometry.capacity_blocks().to_string(),
                r.accesses.to_string(),
                r.misses.to_string(),
                r.cold_misses.to_string(),
                format!("{:.6}", r.miss_ratio()),
            ]
        })
        .collect();
    Report {
        output: render(cfg, &v, &header, &rows, ""),
        warnings: Vec::new(),
        exit_code: 0,
    }
}

/// Predicted against simulated misses for every geometry.
pub fn cmd_compare(cfg: &RunConfig) -> Report {
    let prog = tri!(load_program(&cfg.input), EXIT_INPUT);
    let trace = tri!(generate_trace(&prog, &cfg.bindings, cfg.b), EXIT_INPUT);
    let layout = tri!(pad_layout(&prog, &cfg.bindings, cfg.b), EXIT_INPUT);
    let geoms = geometries(cfg);
    let sims = tri!(sweep(&trace, &layout, &geoms), EXIT_INPUT);
    let accesses = trace.len() as u64;
    let mut warnings: Vec<String> = nest_warning(&prog).into_iter().collect();

    // Symbolic prediction when the table derives and covers the bound value,
    // otherwise the concrete table of this run.
    let symbolic_table = resolve_param(&prog, cfg).ok().and_then(|p| {
        let n = *cfg.bindings.get(&p)?;
        match symbolic(&prog, cfg, &p) {
            Ok((_, c)) if c.domain.contains(n) => Some((c, n)),
            Ok(_) => None,
            Err(e) => {
                warnings.push(format!(
                    "note: symbolic table unavailable ({e}); using the concrete table"
                ));
                None
            }
        }
    });
    let concrete = if symbolic_table.is_none() {
        let ids = tri!(block_sequence(&prog, &cfg.bindings, cfg.b), EXIT_INPUT);
        Some(denning_table(&ri_distribution(&ids)).expect("closed distribution"))
    } else {
        None
    };
    let mut points = Vec::new();
    for (g, s) in geoms.iter().zip(&sims) {
        let cap = g.capacity_blocks() as u64;
        let q = match (&symbolic_table, &concrete) {
            (Some((c, n)), _) => tri!(predict(c, *n, cap), EXIT_INPUT),
            (None, Some(t)) => query_miss_ratio(t, cap, accesses, QueryMode::Step),
            (None, None) => unreachable!(),
        };
        let predicted = q.miss_count.to_f64().unwrap_or(f64::NAN);
        let simulated = s.misses as f64;
        let error = (predicted - simulated).abs() / accesses.max(1) as f64;
        points.push((
            g,
            predicted,
            s.misses,
            error,
            data_movement_accuracy(predicted, simulated, accesses as f64),
        ));
    }
    let mean = if points.is_empty() {
        0.0
    } else {
        points.iter().map(|p| p.3).sum::<f64>() / points.len() as f64
    };
    let pass = mean <= cfg.threshold;
    let v = json!({
        "bindings": cfg.bindings,
        "block_size": cfg.b,
        "accesses": accesses,
        "prediction": if symbolic_table.is_some() { "symbolic" } else { "concrete" },
        "points": points.iter().map(|(g, p, s, e, a)| json!({
            "geometry": g.to_string(),
            "capacity_blocks": g.capacity_blocks(),
            "predicted": p,
            "simulated": s,
            "error": e,
            "data_movement_accuracy": a,
        })).collect::<Vec<_>>(),
        "mean_error": mean,
        "threshold": cfg.threshold,
        "pass": pass,
    });
    let header = ["geometry", "capacity", "predicted", "simulated", "error", "accuracy"];
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|(g, p, s, e, a)| {
            vec![
                g.to_string(),
                g.capacity_blocks().to_string(),
                format!("{p:.2}"),
                s.to_string(),
                format!("{e:.6}"),
                format!("{a:.6}"),
            ]
        })
        .collect();
    let mut out = render(cfg, &v, &header, &rows, "");
    if cfg.format == Format::Table {
        let _ = writeln!(
            out,
            "\nmean error {mean:.6} (threshold {}): {}",
            cfg.threshold,
            if pass { "pass" } else { "FAIL" }
        );
    }
    Report {
        output: out,
        warnings,
        exit_code: if pass { 0 } else { EXIT_CHECK },
    }
}

/// Min-max scaling rows, optionally evaluated at given parameter values.
pub fn cmd_scale(cfg: &RunConfig) -> Report {
    let prog = tri!(load_program(&cfg.input), EXIT_INPUT);
    let param = tri!(resolve_param(&prog, cfg), EXIT_INPUT);
    let (_, c) = match symbolic(&prog, cfg, &param) {
        Ok(v) => v,
        Err(e) => return Report::fail(derivation_code(&e), format!("error: {e}")),
    };
    let s = min_max_scaling(&c);
    let p = param.as_str();
    let mut warnings = Vec::new();
    for &n in &cfg.eval {
        if !s.domain.contains(n) {
            warnings.push(format!(
                "warning: {p} = {n} is outside the validity domain ({p} = 0 mod {}, {p} >= {})",
                s.domain.modulus, s.domain.min_n
            ));
        }
    }
    let evals: Vec<Value> = cfg
        .eval
        .iter()
        .map(|&n| {
            let x = int(n);
            json!({
                "n": n,
                "rows": s.rows.iter().map(|r| json!({
                    "min_cache_size": r.min_cache_size.eval(&x).to_string(),
                    "max_miss_ratio": r.max_miss_ratio.eval(&x).map(|v| v.to_string()),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let v = json!({
        "param": p,
        "domain": { "modulus": s.domain.modulus, "min_n": s.domain.min_n },
        "rows": s.rows.iter().map(|r| json!({
            "min_cache_size": poly_json(&r.min_cache_size, p),
            "max_miss_ratio": ratfn_json(&r.max_miss_ratio, p),
            "source_row": r.source_row,
        })).collect::<Vec<_>>(),
        "evaluations": evals,
    });
    let mut header = vec!["min_cache_size".to_string(), "max_miss_ratio".to_string()];
    for n in &cfg.eval {
        header.push(format!("c({n})"));
        header.push(format!("m({n})"));
    }
    let rows: Vec<Vec<String>> = s
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![r.min_cache_size.render(p), r.max_miss_ratio.render(p)];
            for &n in &cfg.eval {
                let x = int(n);
                row.push(r.min_cache_size.eval(&x).to_string());
                row.push(r.max_miss_ratio.eval_f64(n as f64).to_string());
            }
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    Report {
        output: render(cfg, &v, &header, &rows, ""),
        warnings,
        exit_code: 0,
    }
}

/// Reuse-interval sum test: concrete when every parameter is bound,
/// symbolic otherwise.
pub fn cmd_check(cfg: &RunConfig) -> Report {
    let prog = tri!(load_program(&cfg.input), EXIT_INPUT);
    let all_bound = prog.symbols.iter().all(|s| cfg.bindings.contains_key(s));
    let (v, pass, line) = if all_bound && cfg.param.is_none() {
        let ids = tri!(block_sequence(&prog, &cfg.bindings, cfg.b), EXIT_INPUT);
        let c = ri_sum_check(&ri_distribution(&ids));
        let v = json!({
            "mode": "concrete",
            "pass": c.pass,
            "sum": c.sum.to_string(),
            "expected": c.expected.to_string(),
        });
        let line = format!("sum of ri * P(ri) = {}, data blocks {}", c.sum, c.expected);
        (v, c.pass, line)
    } else {
        let param = tri!(resolve_param(&prog, cfg), EXIT_INPUT);
        let (t, _) = match symbolic(&prog, cfg, &param) {
            Ok(v) => v,
            Err(e) => return Report::fail(derivation_code(&e), format!("error: {e}")),
        };
        let c = ri_sum_check_symbolic(&t);
        let p = param.as_str();
        let v = json!({
            "mode": "symbolic",
            "pass": c.pass,
            "sum": ratfn_json(&c.sum, p),
            "expected": poly_json(&c.expected, p),
            "surviving": ratfn_json(&c.surviving, p),
        });
        let line = format!(
            "sum of ri * P(ri) = {}, data blocks {}",
            c.sum.render(p),
            c.expected.render(p)
        );
        (v, c.pass, line)
    };
    let verdict = if pass { "pass" } else { "FAIL" };
    let output = match cfg.format {
        Format::Json => json(&v),
        Format::Csv => csv(&["pass"], &[vec![pass.to_string()]]),
        Format::Table => format!("{line}: {verdict}\n"),
    };
    Report {
        output,
        warnings: Vec::new(),
        exit_code: if pass { 0 } else { EXIT_CHECK },
    }
}
