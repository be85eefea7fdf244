//! The `mmot` command line. Every subcommand writes deterministic JSON (sorted
//! keys, canonical rationals), CSV (header row, comma separated) or an aligned
//! text table. Site indices are 1-based in all input and output.
//!
//! Exit codes: 0 success, 1 invalid input, 2 refused because of a work budget.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::costs::{self, CostSpec, Root};
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational};
use crate::fkgas;
use crate::gallery::{self, GalleryParams};
use crate::monge;
use crate::plans::{Dims, PairMarginal, Plan, SymmetricPlan};
use crate::polytope::{self, ReducedCatalog, VertexCatalog};

#[derive(Parser, Debug)]
#[command(
    name = "mmot",
    version,
    about = "Exact geometry of symmetric multi-marginal optimal transport",
    args_override_self = true,
    after_help = "Every flag can also be given in a TOML file passed with --config <file>; \
                  command-line flags take precedence."
)]
struct Cli {
    /// TOML file whose keys are used as flags of the subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolytopeKind {
    Symmetric,
    Reduced,
    Monge,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate the vertices of a polytope.
    Vertices {
        #[arg(long, value_enum)]
        polytope: PolytopeKind,
        /// Number of marginals.
        #[arg(short = 'N', long = "marginals", default_value_t = 3)]
        n: usize,
        /// Number of sites.
        #[arg(short = 'L', long = "sites", default_value_t = 3)]
        l: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Maximum number of candidate bases to examine.
        #[arg(long, default_value_t = polytope::DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Classify a plan given as JSON.
    Classify {
        plan: PathBuf,
        #[arg(long, default_value_t = polytope::DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Minimize a cost given as JSON over the symmetric polytope.
    Solve {
        cost: PathBuf,
        /// Solve the LP over all tuples instead of scanning the vertex catalog.
        #[arg(long)]
        full: bool,
        /// Fail unless the minimizer is unique.
        #[arg(long)]
        certify_unique: bool,
        #[arg(long, default_value_t = polytope::DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Sweep the spring cost |x-y-a|^2 on X = {1,2,3}.
    SweepFk {
        #[arg(long, default_value = "0")]
        from: String,
        #[arg(long, default_value = "1")]
        to: String,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run the worked examples and randomized property suites.
    Gallery {
        /// One of 1.1, 4.1, 4.2, 4.3, 4.4, 4.5, 4.6; all when omitted.
        #[arg(long)]
        example: Option<String>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Frenkel-Kontorova gas diagnostics.
    Fkgas {
        /// Comma separated refinement levels of the Monge map sequence.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        nu: Vec<usize>,
        #[arg(long, default_value_t = 16)]
        points_per_cell: usize,
        #[arg(long, default_value_t = 300)]
        grid: usize,
        /// Number of map samples per level in CSV output.
        #[arg(long, default_value_t = 600)]
        samples: usize,
        /// `json` reports the diagnostics; `csv` exports (nu, x, T2, T3) samples.
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

const SUBCOMMANDS: [&str; 6] = ["vertices", "classify", "solve", "sweep-fk", "gallery", "fkgas"];

/// Replace `--config FILE` by the flags it lists, placed right after the
/// subcommand so that explicit flags given later win.
fn expand_config(argv: Vec<String>) -> Result<Vec<String>> {
    let mut args = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or_else(|| Error::invalid("--config needs a file"))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            args.push(a);
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::invalid(format!("cannot read config {path}: {e}")))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::invalid(format!("config {path}: {e}")))?;
    let mut flags = Vec::new();
    for (key, value) in &table {
        let flag = if key.len() == 1 {
            format!("-{key}")
        } else {
            format!("--{}", key.replace('_', "-"))
        };
        match value {
            toml::Value::Boolean(true) => flags.push(flag),
            toml::Value::Boolean(false) => {}
            toml::Value::Array(items) => {
                let parts: Vec<String> = items.iter().map(toml_scalar).collect::<Result<_>>()?;
                flags.push(flag);
                flags.push(parts.join(","));
            }
            other => {
                flags.push(flag);
                flags.push(toml_scalar(other)?);
            }
        }
    }
    let at = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.as_str()))
        .ok_or_else(|| Error::invalid("--config needs a subcommand"))?;
    args.splice(at + 1..at + 1, flags);
    Ok(args)
}

fn toml_scalar(v: &toml::Value) -> Result<String> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(x) => Ok(x.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        other => Err(Error::invalid(format!("unsupported config value {other}"))),
    }
}

/// Parse `argv` (including the program name), run, and return the exit code.
/// Errors go to `err`.
pub fn run(argv: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let args = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<()> {
    let text = match cmd {
        Command::Vertices {
            polytope,
            n,
            l,
            format,
            budget,
        } => vertices(polytope, Dims::new(n, l)?, format, budget)?,
        Command::Classify { plan, budget } => json_text(&classify(&read(&plan)?, budget)?),
        Command::Solve {
            cost,
            full,
            certify_unique,
            budget,
        } => json_text(&solve(&read(&cost)?, full, certify_unique, budget)?),
        Command::SweepFk { from, to, steps, format } => sweep(&from, &to, steps, format)?,
        Command::Gallery { example, trials, seed } => gallery_cmd(example.as_deref(), trials, seed)?,
        Command::Fkgas {
            nu,
            points_per_cell,
            grid,
            samples,
            format,
        } => fkgas_cmd(&nu, points_per_cell, grid, samples, format)?,
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are serializable");
    s.push('\n');
    s
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::invalid(format!("csv: {e}"))
}

fn table_text(header: &[String], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut s = line(header);
    s += &(width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ") + "\n");
    for r in rows {
        s += &line(r);
    }
    s
}

fn tabular(format: Format, header: Vec<String>, rows: Vec<Vec<String>>, json: Value) -> Result<String> {
    match format {
        Format::Json => Ok(json_text(&json)),
        Format::Csv => csv_text(&header, &rows),
        Format::Table => Ok(table_text(&header, &rows)),
    }
}

fn alpha_json(plan: &SymmetricPlan) -> Value {
    Value::Array(
        plan.alpha()
            .iter()
            .map(|(m, w)| json!([m.to_string(), format_rational(w)]))
            .collect(),
    )
}

/// Column key for a multi-index: `a112` for the index 1,1,2.
fn index_key(digits: &[usize]) -> String {
    let sep = if digits.iter().any(|&d| d > 9) { "_" } else { "" };
    let parts: Vec<String> = digits.iter().map(|d| d.to_string()).collect();
    format!("a{}", parts.join(sep))
}

fn catalog_output(cat: &VertexCatalog, format: Format) -> Result<String> {
    let dims = cat.dims();
    let columns = dims.multi_indices();
    let mut header: Vec<String> = ["name", "symmetrized_monge", "reduced_extreme"].map(String::from).to_vec();
    header.extend(columns.iter().map(|m| index_key(&m.one_based())));
    let rows = cat
        .iter()
        .map(|(name, plan, f)| {
            let mut r = vec![name.to_string(), f.symmetrized_monge.to_string(), f.reduced_extreme.to_string()];
            r.extend(columns.iter().map(|m| format_rational(&plan.coefficient(m))));
            r
        })
        .collect();
    let json = json!({
        "n_marginals": dims.n_marginals,
        "n_sites": dims.n_sites,
        "vertices": cat.iter().map(|(name, plan, f)| json!({
            "name": name,
            "alpha": alpha_json(plan),
            "symmetrized_monge": f.symmetrized_monge,
            "reduced_extreme": f.reduced_extreme,
        })).collect::<Vec<_>>(),
    });
    tabular(format, header, rows, json)
}

fn marginal_json(m: &PairMarginal) -> Value {
    let l = m.n_sites();
    Value::Array(
        (0..l)
            .map(|i| Value::Array((0..l).map(|j| json!(format_rational(&m.probability(i, j)))).collect()))
            .collect(),
    )
}

fn reduced_output(cat: &ReducedCatalog, format: Format) -> Result<String> {
    let l = cat.dims.n_sites;
    let mut header = vec!["name".to_string()];
    for i in 1..=l {
        for j in 1..=l {
            header.push(if l > 9 { format!("p{i}_{j}") } else { format!("p{i}{j}") });
        }
    }
    let rows = cat
        .entries
        .iter()
        .map(|e| {
            let mut r = vec![e.name.clone()];
            r.extend(e.marginal.as_vector().iter().map(format_rational));
            r
        })
        .collect();
    let json = json!({
        "n_marginals": cat.dims.n_marginals,
        "n_sites": l,
        "vertices": cat.entries.iter().map(|e| json!({
            "name": e.name,
            "marginal": marginal_json(&e.marginal),
            "preimage": alpha_json(&e.plan),
        })).collect::<Vec<_>>(),
    });
    tabular(format, header, rows, json)
}

fn catalog(dims: Dims, budget: u128) -> Result<VertexCatalog> {
    polytope::enumerate_vertices_with_budget(&polytope::build_constraints(dims), budget)
}

fn vertices(kind: PolytopeKind, dims: Dims, format: Format, budget: u128) -> Result<String> {
    match kind {
        PolytopeKind::Symmetric => catalog_output(&catalog(dims, budget)?, format),
        PolytopeKind::Reduced => reduced_output(&polytope::reduced_vertices(&catalog(dims, budget)?), format),
        PolytopeKind::Monge => reduced_output(&monge::monge_polytope_vertices(dims)?, format),
    }
}

/// Classification of a plan: vertex status, Monge status and name.
pub fn classify(plan_json: &str, budget: u128) -> Result<Value> {
    let plan = Plan::from_json_str(plan_json)?;
    let sym = plan.symmetrized();
    let dims = sym.dims();
    let system = polytope::build_constraints(dims);
    if !system.is_satisfied_by(&sym) {
        return Err(Error::invalid(
            "plan does not lie in the symmetric polytope (marginals must be uniform)",
        ));
    }
    let extreme = polytope::is_vertex(&sym, &system);
    let cat = catalog(dims, budget)?;
    let marginal = sym.two_point_marginal();
    let reduced_extreme = polytope::reduced_vertices(&cat)
        .entries
        .iter()
        .any(|e| e.marginal == marginal);
    Ok(json!({
        "extreme": extreme,
        "monge": monge::is_monge(&plan.dense()),
        "symmetrized_monge": monge::is_symmetrized_monge(&sym)?,
        "reduced_extreme": reduced_extreme,
        "name": if extreme { Value::String(monge::name_vertex(&sym)) } else { Value::Null },
    }))
}

/// `{"argmin": [...], "unique": bool, "value": "p/q"}` for a cost JSON.
pub fn solve(cost_json: &str, full: bool, certify_unique: bool, budget: u128) -> Result<Value> {
    let cost = CostSpec::from_json_str(cost_json)?;
    let (value, argmin, unique) = if full {
        let res = costs::minimize_full_certified(&cost, budget)?;
        let names = match &res.minimizer {
            Some(p) if res.unique => vec![monge::name_vertex(&p.symmetrize())],
            _ => Vec::new(),
        };
        (res.value, names, res.unique)
    } else {
        let res = costs::minimize_over_catalog(&cost, &catalog(cost.dims(), budget)?)?;
        (res.value, res.argmin, res.unique)
    };
    if certify_unique && !unique {
        return Err(Error::invalid(format!("the minimum {value} is attained by more than one plan")));
    }
    Ok(json!({
        "value": value.to_string(),
        "unique": unique,
        "argmin": argmin,
    }))
}

fn root_text(r: &Root) -> String {
    match r {
        Root::Exact(q) => format_rational(q),
        Root::Approx(x) => format!("{x:.15e}"),
    }
}

fn sweep(from: &str, to: &str, steps: usize, format: Format) -> Result<String> {
    let grid = costs::uniform_grid(&parse_rational(from)?, &parse_rational(to)?, steps)?;
    let curves = gallery::fk_sweep(&grid)?;
    let samples = curves.samples();
    let header = ["a", "name", "cost"].map(String::from).to_vec();
    let rows = samples
        .iter()
        .map(|(a, n, c)| vec![format_rational(a), n.clone(), format_rational(c)])
        .collect();
    let json = json!({
        "curves": curves.curves.iter().map(|(n, q)| json!({
            "name": n,
            "c0": format_rational(&q.c0),
            "c1": format_rational(&q.c1),
            "c2": format_rational(&q.c2),
        })).collect::<Vec<_>>(),
        "rows": curves.sweep.rows.iter().map(|r| json!({
            "a": format_rational(&r.a),
            "argmin": r.argmin,
            "value": format_rational(&r.value),
        })).collect::<Vec<_>>(),
        "crossings": curves.sweep.crossings.iter().map(|c| json!({
            "from": c.from,
            "to": c.to,
            "at": root_text(&c.at),
        })).collect::<Vec<_>>(),
    });
    tabular(format, header, rows, json)
}

fn gallery_cmd(example: Option<&str>, trials: usize, seed: Option<u64>) -> Result<String> {
    if trials == 0 {
        return Err(Error::invalid("--trials must be positive"));
    }
    let params = GalleryParams { trials, seed };
    let reports = match example {
        Some(id) => vec![gallery::run_gallery_example(id, &params)?],
        None => gallery::run_suite(&params)?,
    };
    let text = json_text(&Value::Array(reports.iter().map(|r| r.to_json()).collect()));
    if let Some(r) = reports.iter().find(|r| !r.pass) {
        return Err(Error::invalid(format!(
            "gallery example {} failed:\n{text}",
            r.example_id
        )));
    }
    Ok(text)
}

fn f64_text(x: f64) -> String {
    format!("{x:.15e}")
}

fn fkgas_cmd(nu: &[usize], points_per_cell: usize, grid: usize, samples: usize, format: Format) -> Result<String> {
    if nu.is_empty() || nu.contains(&0) {
        return Err(Error::invalid("--nu needs positive levels"));
    }
    if let Format::Csv | Format::Table = format {
        let header = ["nu", "x", "t2", "t3"].map(String::from).to_vec();
        let mut rows = Vec::new();
        for &n in nu {
            for (x, t2, t3) in fkgas::MongeMapPair::new(n)?.samples(samples) {
                rows.push(vec![n.to_string(), f64_text(x), f64_text(t2), f64_text(t3)]);
            }
        }
        return tabular(format, header, rows, Value::Null);
    }
    let tm = fkgas::triple_min(&crate::costs::Potential::QuarticFk, grid, 1e-8)?;
    let reduction = fkgas::finite_reduction()?;
    let quasi = fkgas::quasi_monge_cost(1000, 300)?;
    let seq = fkgas::microstructure_sequence(nu, points_per_cell)?;
    Ok(json_text(&json!({
        "triple_min": {
            "minimizers": tm.minimizers.iter().map(|(a, b)| json!([f64_text(*a), f64_text(*b)])).collect::<Vec<_>>(),
            "value": f64_text(tm.min_value),
            "flat": tm.flat,
        },
        "finite_reduction": reduction.to_json(),
        "quasi_monge": {
            "cost": f64_text(quasi.cost),
            "marginal_deviation": f64_text(quasi.marginal_deviation),
        },
        "microstructure": seq.iter().map(|m| json!({
            "nu": m.nu,
            "energy": f64_text(m.energy),
            "exact_excess": format_rational(&m.exact_excess),
            "pushforward_deviation": f64_text(m.pushforward_deviation),
        })).collect::<Vec<_>>(),
    })))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("mmot").chain(args.iter().copied()).map(String::from).collect();
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn vertices_csv_has_22_rows() {
        let (code, out, _) = run_args(&["vertices", "--polytope", "symmetric", "-N", "3", "-L", "3", "--format", "csv"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 23);
        assert!(out.starts_with("name,symmetrized_monge,reduced_extreme,a111,a112"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["vertices", "--polytope", "bogus"]).0, 1);
        assert_eq!(run_args(&["--help"]).0, 0);
        let (code, _, err) = run_args(&["vertices", "--polytope", "symmetric", "-N", "3", "-L", "3", "--budget", "5"]);
        assert_eq!(code, 2, "{err}");
    }

    #[test]
    fn solve_and_classify() {
        let cost = r#"{"metric": {"coords1d": [1, 2, 3]}, "potential": {"kind": "spring", "a": "3/4"}}"#;
        let v = solve(cost, true, true, polytope::DEFAULT_BUDGET).unwrap();
        assert_eq!(v, json!({"value": "11/16", "unique": true, "argmin": ["F112"]}));
        let plan = r#"{"n_marginals": 3, "n_sites": 3, "symmetric": true,
            "terms": [{"index": [1,1,2], "weight": "1/2"}, {"index": [2,3,3], "weight": "1/2"}]}"#;
        let c = classify(plan, polytope::DEFAULT_BUDGET).unwrap();
        assert_eq!(c["extreme"], json!(true));
        assert_eq!(c["monge"], json!(false));
        assert_eq!(c["symmetrized_monge"], json!(false));
        assert_eq!(c["reduced_extreme"], json!(true));
        assert_eq!(c["name"], json!("F112"));
        let err = solve("{\"metric\": ", false, false, 1000).unwrap_err();
        assert!(err.to_string().contains("line 1 column"));
    }

    #[test]
    fn config_expansion() {
        let dir = std::env::temp_dir().join(format!("mmot-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.toml");
        std::fs::write(&path, "polytope = \"reduced\"\nformat = \"csv\"\n").unwrap();
        let p = path.to_str().unwrap();
        let (code, out, _) = run_args(&["--config", p, "vertices"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 9);
        let (_, json_out, _) = run_args(&["--config", p, "vertices", "--format", "json"]);
        assert!(json_out.starts_with('{'));
    }
}
