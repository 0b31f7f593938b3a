//! Command-line front end: loads a JSON problem bundle, runs law checks and
//! queries, and prints JSON or aligned tables.

pub mod render;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use paramdp::bundle::{Bundle, BundleError, Request};
use paramdp::laws::LawReport;
use paramdp::monad::laws::{check_monad_laws, Fault, MonadLawConfig};
use paramdp::monad::{MonadKind, Payload};
use paramdp::query::{bayes_update, decide, fit_threshold, query_cell, QueryError};
use paramdp::suites::{check_dp_laws, check_instance_laws, check_para_laws, DpLawConfig, ParaLawConfig};

use render::Table;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "paramdp", version, about = "Parametrized uncertain design problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for randomized law checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Comparison tolerance for distributions.
    #[arg(long, global = true, default_value_t = paramdp::monad::MASS_TOLERANCE)]
    pub tolerance: f64,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InjectFault {
    /// Interval multiplication picks the wrong endpoints.
    SwappedIntervalJoin,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the law suites on random instances, or on the posets, problems and cells of a bundle
    CheckLaws {
        /// Bundle whose own instances are checked; omit for the built-in random suites.
        bundle: Option<PathBuf>,
        /// Random instances per law.
        #[arg(long)]
        samples: Option<usize>,
        /// Corrupt the monad multiplication to demonstrate a failing report.
        #[arg(long, value_enum)]
        inject_fault: Option<InjectFault>,
    },
    /// Evaluate the bundle's diagram and summarize the composite cell.
    Eval { bundle: PathBuf },
    /// Minimal resources at the requested functionalities.
    Query { bundle: PathBuf },
    /// Best parameter point under a utility.
    Decide { bundle: PathBuf },
    /// Posterior over one parameter factor.
    Infer { bundle: PathBuf },
    /// Fit threshold parameters to data.
    Fit { bundle: PathBuf },
}

/// A command result: primary output plus exit code.
struct Output {
    json: Value,
    table: String,
    code: i32,
}

#[derive(Debug)]
enum CliError {
    Input(String),
}

impl From<BundleError> for CliError {
    fn from(e: BundleError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<QueryError> for CliError {
    fn from(e: QueryError) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Runs one invocation; returns the process exit code.
pub fn run(args: impl IntoIterator<Item = String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::CheckLaws {
            bundle,
            samples,
            inject_fault,
        } => check_laws(&cli, bundle.as_ref(), *samples, *inject_fault),
        Command::Eval { bundle } => load(bundle).and_then(|b| eval(&b)),
        Command::Query { bundle } => load(bundle).and_then(|b| query(&b)),
        Command::Decide { bundle } => load(bundle).and_then(|b| decide_cmd(&b)),
        Command::Infer { bundle } => load(bundle).and_then(|b| infer(&b)),
        Command::Fit { bundle } => load(bundle).and_then(|b| fit(&b)),
    };
    let output = match result {
        Ok(o) => o,
        Err(CliError::Input(message)) => {
            let _ = writeln!(stderr, "error: {message}");
            return EXIT_INPUT;
        }
    };
    let text = match cli.format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&output.json).expect("serializable")
        ),
        Format::Table => output.table,
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => {
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    if output.code != EXIT_OK {
        let _ = writeln!(stderr, "law check failed");
    }
    output.code
}

fn load(path: &PathBuf) -> Result<Bundle, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(Bundle::from_json(&text)?)
}

fn check_laws(
    cli: &Cli,
    bundle: Option<&PathBuf>,
    samples: Option<usize>,
    fault: Option<InjectFault>,
) -> Result<Output, CliError> {
    let fault = fault.map(|InjectFault::SwappedIntervalJoin| Fault::SwappedIntervalJoin);
    let monad_config = |default: usize| MonadLawConfig {
        samples: samples.unwrap_or(default),
        tolerance: cli.tolerance,
        fault,
        ..MonadLawConfig::default()
    };
    let mut reports: Vec<LawReport> = Vec::new();
    match bundle {
        None => {
            for kind in MonadKind::ALL {
                reports.push(check_monad_laws(kind, cli.seed, &monad_config(200)));
            }
            let dp = DpLawConfig {
                samples: samples.unwrap_or(500),
                ..DpLawConfig::default()
            };
            reports.push(check_dp_laws(cli.seed, &dp));
            for kind in MonadKind::ALL {
                let para = ParaLawConfig {
                    samples: samples.unwrap_or(100),
                    tolerance: cli.tolerance,
                    ..ParaLawConfig::default()
                };
                reports.push(check_para_laws(kind, cli.seed, &para));
            }
        }
        Some(path) => {
            let b = load(path)?;
            reports.push(check_monad_laws(b.kind, cli.seed, &monad_config(200)));
            let posets: Vec<_> = b.posets.values().cloned().collect();
            let dps: Vec<_> = b.dps.values().cloned().collect();
            let mut cells: Vec<_> = b.cells.values().cloned().collect();
            if let Some(d) = &b.diagram {
                cells.push(d.cell.clone());
            }
            reports.push(check_instance_laws(b.kind, &posets, &dps, &cells, cli.tolerance));
        }
    }
    let passed = reports.iter().all(LawReport::all_passed);
    let mut table = Table::new(&["status", "suite", "law", "instances", "witness"]).titled(format!(
        "seed {}: {}",
        cli.seed,
        if passed { "all laws hold" } else { "FAILURES" }
    ));
    for r in &reports {
        for o in &r.outcomes {
            let mut witness = o.witness.clone().unwrap_or_default();
            if witness.chars().count() > 120 {
                witness = witness.chars().take(117).collect::<String>() + "...";
            }
            table.row(vec![
                if o.passed { "PASS" } else { "FAIL" }.into(),
                r.suite.clone(),
                o.law.clone(),
                o.instances.to_string(),
                witness,
            ]);
        }
    }
    Ok(Output {
        json: json!({
            "command": "check-laws",
            "seed": cli.seed,
            "passed": passed,
            "suites": reports,
        }),
        table: table.render(),
        code: if passed { EXIT_OK } else { EXIT_FAILURE },
    })
}

fn eval(b: &Bundle) -> Result<Output, CliError> {
    let d = b
        .diagram
        .as_ref()
        .ok_or_else(|| CliError::Input("the bundle has no `diagram`".into()))?;
    let cell = &d.cell;
    let supports: Vec<usize> = cell.table().iter().map(|v| v.support_size()).collect();
    let widths: Vec<usize> = cell
        .table()
        .iter()
        .filter_map(|v| match v.payload() {
            Payload::Interval { lo, hi } => Some(hi.feasible_count() - lo.feasible_count()),
            _ => None,
        })
        .collect();
    let feasible: Vec<usize> = cell
        .table()
        .iter()
        .flat_map(|v| v.support().into_iter().map(|dp| dp.feasible_count()))
        .collect();
    let stats = |xs: &[usize]| {
        if xs.is_empty() {
            return json!(null);
        }
        let mean = xs.iter().sum::<usize>() as f64 / xs.len() as f64;
        json!({ "min": xs.iter().min(), "max": xs.iter().max(), "mean": render::float(mean) })
    };
    let poset = |p: &paramdp::poset::FinPoset| {
        json!({
            "display": p.to_string(),
            "size": p.len(),
            "factors": p.factors().iter().map(|f| json!({ "name": f.name(), "size": f.len() })).collect::<Vec<_>>(),
        })
    };
    let params = json!({
        "display": cell.dom().to_string(),
        "points": cell.dom().len(),
        "factors": cell.dom().factors().iter().map(|f| json!({
            "name": f.name(),
            "labels": f.labels().iter().map(render::label).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    let json = json!({
        "command": "eval",
        "monad": b.kind.name(),
        "diagram": d.expr.to_string(),
        "interface": d.interface.to_string(),
        "params": params,
        "src": poset(cell.src()),
        "tgt": poset(cell.tgt()),
        "payload": {
            "support_size": stats(&supports),
            "interval_width": stats(&widths),
            "feasible_pairs": stats(&feasible),
        },
    });
    let mut t = Table::new(&["field", "value"]).titled(format!("diagram {}", d.expr));
    t.row(vec!["monad".into(), b.kind.name().into()]);
    let count = |n: usize, noun: &str| format!("{n} {noun}{}", if n == 1 { "" } else { "s" });
    t.row(vec![
        "params".into(),
        format!("{} ({})", cell.dom(), count(cell.dom().len(), "point")),
    ]);
    t.row(vec![
        "src".into(),
        format!("{} ({})", cell.src(), count(cell.src().len(), "element")),
    ]);
    t.row(vec![
        "tgt".into(),
        format!("{} ({})", cell.tgt(), count(cell.tgt().len(), "element")),
    ]);
    for (name, key) in [
        ("support size", "support_size"),
        ("interval width", "interval_width"),
        ("feasible pairs", "feasible_pairs"),
    ] {
        let s = &json["payload"][key];
        if !s.is_null() {
            t.row(vec![
                name.into(),
                format!("min {} / mean {} / max {}", s["min"], s["mean"], s["max"]),
            ]);
        }
    }
    Ok(Output {
        json,
        table: t.render(),
        code: EXIT_OK,
    })
}

fn requests<'a>(b: &'a Bundle, verb: &str) -> Result<Vec<&'a Request>, CliError> {
    let found: Vec<&Request> = b.requests.iter().filter(|r| r.verb() == verb).collect();
    if found.is_empty() {
        return Err(CliError::Input(format!("the bundle has no `{verb}` requests")));
    }
    Ok(found)
}

fn query(b: &Bundle) -> Result<Output, CliError> {
    // Without explicit requests, query every functionality of the default cell.
    let implicit;
    let found: Vec<&Request> = match b.requests.iter().filter(|r| r.verb() == "query").collect::<Vec<_>>() {
        v if !v.is_empty() => v,
        _ => {
            let cell = b
                .default_cell()
                .ok_or_else(|| CliError::Input("the bundle has no `query` requests and no diagram".into()))?;
            implicit = Request::Query {
                label: "query".into(),
                fs: (0..cell.src().len()).collect(),
                cell,
            };
            vec![&implicit]
        }
    };
    let mut results = Vec::new();
    let mut text = String::new();
    for r in found {
        let Request::Query { label, cell, fs } = r else {
            unreachable!()
        };
        let mut t = Table::new(&["f", "point", "minimal resources"]).titled(format!(
            "{label}: {} -> {}",
            cell.src(),
            cell.tgt()
        ));
        let mut fronts = Vec::new();
        for &f in fs {
            let values = query_cell(cell, f)?;
            let per_point: Vec<Value> = values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    for (k, line) in render::uncertain_antichain_lines(v).into_iter().enumerate() {
                        let (fc, pc) = if k == 0 {
                            (render::tuple_text(cell.src(), f), cell.dom().point_name(i))
                        } else {
                            (String::new(), String::new())
                        };
                        t.row(vec![fc, pc, line]);
                    }
                    json!({ "point": cell.dom().point_name(i), "front": render::uncertain_antichain(v) })
                })
                .collect();
            fronts.push(json!({ "f": render::element(cell.src(), f), "points": per_point }));
        }
        text.push_str(&t.render());
        results.push(
            json!({ "name": label, "src": cell.src().to_string(), "tgt": cell.tgt().to_string(), "fronts": fronts }),
        );
    }
    Ok(Output {
        json: json!({ "command": "query", "monad": b.kind.name(), "results": results }),
        table: text,
        code: EXIT_OK,
    })
}

fn point_labels(space: &paramdp::para::ParamSpace, i: usize) -> Value {
    let map: serde_json::Map<String, Value> = space
        .factors()
        .iter()
        .zip(space.point_labels(i))
        .map(|(f, l)| (f.name().to_string(), render::label(l)))
        .collect();
    Value::Object(map)
}

fn decide_cmd(b: &Bundle) -> Result<Output, CliError> {
    let mut results = Vec::new();
    let mut text = String::new();
    for r in requests(b, "decide")? {
        let Request::Decide {
            label,
            cell,
            f,
            utility,
        } = r
        else {
            unreachable!()
        };
        let d = decide(cell, *f, *utility)?;
        let mut t = Table::new(&["point", "score", ""]).titled(format!(
            "{label}: {utility} at f = {}",
            render::tuple_text(cell.src(), *f)
        ));
        for (i, s) in d.scores.iter().enumerate() {
            t.row(vec![
                cell.dom().point_name(i),
                render::score_text(s),
                if i == d.point {
                    "<- chosen".into()
                } else {
                    String::new()
                },
            ]);
        }
        text.push_str(&t.render());
        results.push(json!({
            "name": label,
            "utility": utility,
            "f": render::element(cell.src(), *f),
            "point": point_labels(cell.dom(), d.point),
            "point_name": cell.dom().point_name(d.point),
            "score": render::score(&d.score),
            "scores": d.scores.iter().enumerate().map(|(i, s)| json!({
                "point": cell.dom().point_name(i),
                "score": render::score(s),
            })).collect::<Vec<_>>(),
        }));
    }
    Ok(Output {
        json: json!({ "command": "decide", "results": results }),
        table: text,
        code: EXIT_OK,
    })
}

fn infer(b: &Bundle) -> Result<Output, CliError> {
    let mut results = Vec::new();
    let mut text = String::new();
    for r in requests(b, "infer")? {
        let Request::Infer {
            label,
            cell,
            factor,
            prior,
            observations,
        } = r
        else {
            unreachable!()
        };
        let post = bayes_update(cell, *factor, prior, observations)?;
        let atoms: Vec<(usize, f64)> = post.probs.iter().copied().enumerate().collect();
        let mut t = Table::new(&["value", "prob"]).titled(format!("{label}: posterior over {}", post.factor.name()));
        let mut map = serde_json::Map::new();
        for (k, p) in post.probs.iter().enumerate() {
            map.insert(post.factor.labels()[k].to_string(), render::float(*p));
        }
        for (_, &k, p) in render::sorted_atoms(&atoms) {
            t.row(vec![post.factor.labels()[k].to_string(), render::float_text(p)]);
        }
        text.push_str(&t.render());
        results.push(json!({
            "name": label,
            "factor": post.factor.name(),
            "observations": observations.len(),
            "posterior": map,
        }));
    }
    Ok(Output {
        json: json!({ "command": "infer", "results": results }),
        table: text,
        code: EXIT_OK,
    })
}

fn fit(b: &Bundle) -> Result<Output, CliError> {
    let mut results = Vec::new();
    let mut text = String::new();
    for r in requests(b, "fit")? {
        let Request::Fit {
            label,
            formula,
            grid,
            data,
            mode,
            metric,
        } = r
        else {
            unreachable!()
        };
        let res = fit_threshold(formula, grid, data, *mode, metric.as_ref())?;
        let theta: serde_json::Map<String, Value> = res
            .theta
            .iter()
            .map(|(k, v)| (k.clone(), render::rational(v)))
            .collect();
        let mut t = Table::new(&["field", "value"]).titled(format!("{label}: {formula}"));
        for (k, v) in &res.theta {
            t.row(vec![k.clone(), paramdp::rational::format_rational(v)]);
        }
        t.row(vec!["loss".into(), paramdp::rational::format_rational(&res.loss)]);
        t.row(vec!["metric".into(), paramdp::rational::format_rational(&res.metric)]);
        t.row(vec![
            "feasible points".into(),
            format!("{} of {}", res.feasible_points, grid.len()),
        ]);
        text.push_str(&t.render());
        results.push(json!({
            "name": label,
            "mode": mode,
            "theta": theta,
            "grid_index": res.index,
            "loss": render::float(paramdp::rational::to_f64(&res.loss)),
            "loss_exact": paramdp::rational::format_rational(&res.loss),
            "metric": render::float(paramdp::rational::to_f64(&res.metric)),
            "feasible_points": res.feasible_points,
        }));
    }
    Ok(Output {
        json: json!({ "command": "fit", "results": results }),
        table: text,
        code: EXIT_OK,
    })
}
