//! Command line front end over the enumeration engines. Every subcommand
//! computes one report and renders it as plain text (default), JSON with
//! sorted keys, or CSV, so identical invocations produce identical bytes.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when a check the
//! command ran reports a mismatch (a failed closed-form comparison, a nonzero
//! algebraic residual, or an equivalence threshold that missed a merge).

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use relenum::families::{self, FamilySpec, GrowthClass};
use relenum::moddec;
use relenum::monomorph::{self, EquivLevel, EquivMode, MonomorphError};
use relenum::perm::Permutation;
use relenum::separable::{count_separable, DiagonalMode};
use relenum::series::{
    algebraic_residual, expand_rational, solve_quadratic_series, IntPolynomial, IntegerSeries,
    RationalGF,
};
use relenum::FiniteStructure;

#[derive(Parser)]
#[command(name = "relenum", version, about = "Enumeration of relational structures up to isomorphism")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Cap the number of worker threads.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Count isomorphism types of n-vertex substructures of a family.
    ///
    /// Sweeps growing truncations until the counts saturate and reports
    /// phi(n) for n = 0..=N, the stage each count stabilized at, and a
    /// closed-form comparison when one is registered.
    Profile {
        /// Family name, see `relenum catalog`.
        #[arg(long)]
        family: String,
        /// Largest substructure size to count.
        #[arg(long)]
        n: usize,
    },
    /// Check a family's computed profile against its closed form.
    ///
    /// Exits 2 if any value disagrees.
    ClosedForm {
        /// Family name, see `relenum catalog`.
        #[arg(long)]
        family: String,
        /// Largest substructure size to check.
        #[arg(long)]
        n: usize,
    },
    /// Count separable reflexive, irreflexive, or mixed structures.
    SeparableCount {
        /// Number of binary relations.
        #[arg(long)]
        k: usize,
        /// Diagonal convention: reflexive, irreflexive, or mixed.
        #[arg(long)]
        mode: String,
        /// Number of vertices.
        #[arg(long)]
        n: usize,
    },
    /// Modular decomposition of a structure read from a file.
    Decompose {
        /// Structure file in the text format of the core library.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
    },
    /// Monomorphic equivalence classes of a structure read from a file.
    Equiv {
        /// Structure file in the text format of the core library.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Recompute the partition exhaustively and exit 2 on any mismatch
        /// with the threshold sweep.
        #[arg(long)]
        verify: bool,
    },
    /// Classify the profile growth of an ordered family.
    Classify {
        /// Family name, see `relenum catalog`.
        #[arg(long)]
        family: String,
        /// Largest substructure size to profile.
        #[arg(long)]
        n: usize,
    },
    /// Exact integer power series tools.
    #[command(subcommand)]
    Series(SeriesCommand),
    /// Permutation tools.
    #[command(subcommand)]
    Perm(PermCommand),
    /// List the registered families.
    Catalog,
}

#[derive(Subcommand)]
enum SeriesCommand {
    /// Expand a rational generating function num/den to a given order.
    ///
    /// Polynomials are comma-separated integer coefficients, constant term
    /// first: `--den 1,-1,-1` is 1 - x - x^2.
    Expand {
        #[arg(long, value_name = "COEFFS", allow_hyphen_values = true)]
        num: String,
        #[arg(long, value_name = "COEFFS", allow_hyphen_values = true)]
        den: String,
        #[arg(long)]
        order: usize,
    },
    /// Substitute a series S into a polynomial q(x, y) and report q(x, S).
    ///
    /// `--poly` lists the coefficient polynomials of y^0, y^1, ... separated
    /// by semicolons: `--poly 1;-1,1;0,1` is 1 + (x - 1) y + x y^2. Exits 2
    /// when the residual is not identically zero up to the order.
    Residual {
        #[arg(long, value_name = "POLYS", allow_hyphen_values = true)]
        poly: String,
        /// Comma-separated series coefficients, constant term first.
        #[arg(long, value_name = "COEFFS", allow_hyphen_values = true)]
        series: String,
        #[arg(long)]
        order: usize,
    },
    /// Solve a(x) S^2 + b(x) S + c(x) = 0 for an integer series S.
    Solve {
        #[arg(long, value_name = "COEFFS", allow_hyphen_values = true)]
        a: String,
        #[arg(long, value_name = "COEFFS", allow_hyphen_values = true)]
        b: String,
        #[arg(long, value_name = "COEFFS", allow_hyphen_values = true)]
        c: String,
        /// Constant term of the root to follow.
        #[arg(long, default_value_t = 0)]
        seed: i64,
        #[arg(long)]
        order: usize,
    },
}

#[derive(Subcommand)]
enum PermCommand {
    /// Table of simple permutation counts for sizes 1..=N.
    SimpleCount {
        #[arg(long)]
        n: usize,
    },
    /// Whether a permutation is separable.
    ///
    /// One-line notation, 1-based: `2413` or `2,4,1,3`.
    Separable {
        #[arg(long)]
        perm: String,
    },
    /// Substitution decomposition tree of a permutation.
    Decompose {
        #[arg(long)]
        perm: String,
    },
}

struct Report {
    json: Value,
    text: String,
    csv: String,
}

struct Outcome {
    report: Option<Report>,
    code: i32,
}

impl Outcome {
    fn ok(report: Report) -> Outcome {
        Outcome { report: Some(report), code: 0 }
    }

    fn mismatch(report: Report) -> Outcome {
        Outcome { report: Some(report), code: 2 }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let outcome = match cli.command {
        Command::Profile { family, n } => cmd_profile(&family, n)?,
        Command::ClosedForm { family, n } => cmd_closed_form(&family, n)?,
        Command::SeparableCount { k, mode, n } => cmd_separable_count(k, &mode, n)?,
        Command::Decompose { input } => cmd_decompose(&input)?,
        Command::Equiv { input, verify } => cmd_equiv(&input, verify)?,
        Command::Classify { family, n } => cmd_classify(&family, n)?,
        Command::Series(series) => match series {
            SeriesCommand::Expand { num, den, order } => cmd_series_expand(&num, &den, order)?,
            SeriesCommand::Residual { poly, series, order } => {
                cmd_series_residual(&poly, &series, order)?
            }
            SeriesCommand::Solve { a, b, c, seed, order } => {
                cmd_series_solve(&a, &b, &c, seed, order)?
            }
        },
        Command::Perm(perm) => match perm {
            PermCommand::SimpleCount { n } => cmd_perm_simple_count(n)?,
            PermCommand::Separable { perm } => cmd_perm_separable(&perm)?,
            PermCommand::Decompose { perm } => cmd_perm_decompose(&perm)?,
        },
        Command::Catalog => cmd_catalog()?,
    };
    if let Some(report) = &outcome.report {
        emit(report, cli.format, cli.out.as_deref())?;
    }
    Ok(outcome.code)
}

fn cmd_profile(family: &str, n: usize) -> Result<Outcome> {
    let spec = FamilySpec::parse(family)?;
    let report = families::profile(&spec, n)?;
    let formula: Option<Vec<bool>> = match families::closed_form(&spec, 0) {
        Err(families::FamilyError::NoFormula(_)) => None,
        Err(e) => return Err(e.into()),
        Ok(_) => {
            let mut checks = Vec::with_capacity(n + 1);
            for (i, &observed) in report.phi.iter().enumerate() {
                checks.push(families::closed_form(&spec, i)? == observed);
            }
            Some(checks)
        }
    };
    let sizes: Vec<usize> = (0..=n).collect();

    let json = json!({
        "family": report.family,
        "formula_check": formula,
        "m_used": report.m_used,
        "n": sizes,
        "phi": report.phi,
    });

    let mut rows = vec![
        ("n:".to_string(), sizes.iter().map(usize::to_string).collect()),
        ("phi:".to_string(), report.phi.iter().map(u64::to_string).collect()),
        ("m_used:".to_string(), report.m_used.iter().map(usize::to_string).collect()),
    ];
    if let Some(checks) = &formula {
        rows.push((
            "formula:".to_string(),
            checks.iter().map(|&p| if p { "ok" } else { "FAIL" }.to_string()).collect(),
        ));
    }
    let mut text = format!("family: {}\n", report.family);
    text.push_str(&text_table(&rows));
    if formula.is_none() {
        text.push_str("formula: none registered\n");
    }

    let csv_rows: Vec<Vec<String>> = sizes
        .iter()
        .map(|&i| {
            vec![
                i.to_string(),
                report.phi[i].to_string(),
                report.m_used[i].to_string(),
                formula.as_ref().map_or(String::new(), |c| c[i].to_string()),
            ]
        })
        .collect();
    let csv = csv_table("n,phi,m_used,formula_check", &csv_rows);

    let report = Report { json, text, csv };
    if formula.as_ref().is_some_and(|c| c.iter().any(|&p| !p)) {
        Ok(Outcome::mismatch(report))
    } else {
        Ok(Outcome::ok(report))
    }
}

fn cmd_closed_form(family: &str, n: usize) -> Result<Outcome> {
    let spec = FamilySpec::parse(family)?;
    let checks = families::closed_form_check(&spec, n)?;
    let all_pass = checks.iter().all(|c| c.pass);

    let json = json!({
        "checks": checks
            .iter()
            .map(|c| {
                json!({
                    "expected": c.expected,
                    "n": c.n,
                    "observed": c.observed,
                    "pass": c.pass,
                })
            })
            .collect::<Vec<_>>(),
        "family": spec.name(),
        "pass": all_pass,
    });

    let mut text = format!("closed form check for {}, n <= {n}\n", spec.name());
    for c in &checks {
        text.push_str(&format!(
            "n={} expected={} observed={} {}\n",
            c.n,
            c.expected,
            c.observed,
            if c.pass { "ok" } else { "FAIL" }
        ));
    }
    text.push_str(if all_pass { "all values match\n" } else { "MISMATCH\n" });

    let csv_rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            vec![
                c.n.to_string(),
                c.expected.to_string(),
                c.observed.to_string(),
                c.pass.to_string(),
            ]
        })
        .collect();
    let csv = csv_table("n,expected,observed,pass", &csv_rows);

    let report = Report { json, text, csv };
    if all_pass {
        Ok(Outcome::ok(report))
    } else {
        Ok(Outcome::mismatch(report))
    }
}

fn cmd_separable_count(k: usize, mode: &str, n: usize) -> Result<Outcome> {
    let Some(mode) = DiagonalMode::from_tag(mode) else {
        bail!("unknown diagonal mode `{mode}` (expected reflexive, irreflexive, or mixed)");
    };
    let count = count_separable(k, mode, n)?;
    let json = json!({
        "count": count,
        "k": k,
        "mode": mode.tag(),
        "n": n,
    });
    let text = format!("separable structures with k = {k}, {mode} diagonal, n = {n}: {count}\n");
    let csv = csv_kv(&[
        ("k".to_string(), k.to_string()),
        ("mode".to_string(), mode.tag().to_string()),
        ("n".to_string(), n.to_string()),
        ("count".to_string(), count.to_string()),
    ]);
    Ok(Outcome::ok(Report { json, text, csv }))
}

fn cmd_decompose(input: &Path) -> Result<Outcome> {
    let r = load_structure(input)?;
    let partition = moddec::gallai_partition(&r)?;
    let kind = partition.quotient_kind().tag();

    let json = json!({
        "blocks": partition.blocks(),
        "n": r.n(),
        "quotient_kind": kind,
        "quotient_n": partition.quotient().n(),
    });

    let mut text = format!(
        "n = {}: {} blocks, quotient {kind} on {} vertices\n",
        r.n(),
        partition.blocks().len(),
        partition.quotient().n()
    );
    for (i, block) in partition.blocks().iter().enumerate() {
        text.push_str(&format!("block {i}: {}\n", join(block, " ")));
    }

    let mut pairs = vec![
        ("n".to_string(), r.n().to_string()),
        ("quotient_kind".to_string(), kind.to_string()),
        ("quotient_n".to_string(), partition.quotient().n().to_string()),
    ];
    for (i, block) in partition.blocks().iter().enumerate() {
        pairs.push((format!("block_{i}"), join(block, ";")));
    }
    let csv = csv_kv(&pairs);

    Ok(Outcome::ok(Report { json, text, csv }))
}

fn cmd_equiv(input: &Path, verify: bool) -> Result<Outcome> {
    let r = load_structure(input)?;
    let mode = if verify { EquivMode::Verify } else { EquivMode::Threshold };
    let result = match monomorph::equivalence_classes(&r, mode) {
        Ok(result) => result,
        Err(e @ MonomorphError::ThresholdViolation { .. }) => {
            eprintln!("verification mismatch: {e}");
            return Ok(Outcome { report: None, code: 2 });
        }
        Err(e) => return Err(e.into()),
    };
    let level = match result.level() {
        EquivLevel::Full => "full".to_string(),
        EquivLevel::AtMost(t) => format!("at-most-{t}"),
    };
    let shapes: Vec<Option<Vec<String>>> = result
        .classes()
        .iter()
        .map(|class| {
            monomorph::class_shapes(&r, class)
                .map(|s| s.iter().map(ToString::to_string).collect())
        })
        .collect();

    let json = json!({
        "classes": result.classes(),
        "dim_mon": result.dim_mon(),
        "level": level,
        "n": r.n(),
        "shapes": shapes,
        "threshold_used": result.threshold_used(),
    });

    let mut text = format!(
        "n = {}, dim_mon = {} (threshold {}, level {level})\n",
        r.n(),
        result.dim_mon(),
        result.threshold_used()
    );
    for (i, class) in result.classes().iter().enumerate() {
        text.push_str(&format!("class {i}: {}", join(class, " ")));
        if let Some(tags) = &shapes[i] {
            text.push_str(&format!(" [{}]", tags.join(", ")));
        }
        text.push('\n');
    }

    let mut pairs = vec![
        ("n".to_string(), r.n().to_string()),
        ("dim_mon".to_string(), result.dim_mon().to_string()),
        ("threshold_used".to_string(), result.threshold_used().to_string()),
        ("level".to_string(), level.clone()),
    ];
    for (i, class) in result.classes().iter().enumerate() {
        pairs.push((format!("class_{i}"), join(class, ";")));
        if let Some(tags) = &shapes[i] {
            pairs.push((format!("shapes_{i}"), tags.join(";")));
        }
    }
    let csv = csv_kv(&pairs);

    Ok(Outcome::ok(Report { json, text, csv }))
}

fn cmd_classify(family: &str, n: usize) -> Result<Outcome> {
    let spec = FamilySpec::parse(family)?;
    let report = monomorph::growth_classify(&spec, n)?;
    let (label, ratio) = match report.classification {
        GrowthClass::Unclassified => ("unclassified", None),
        GrowthClass::PolynomialCandidate => ("polynomial-candidate", None),
        GrowthClass::ExponentialLowerBound { ratio } => ("exponential-lower-bound", Some(ratio)),
    };
    let sizes: Vec<usize> = (0..=n).collect();

    let json = json!({
        "classification": label,
        "dim_mon": report.dim_mon,
        "family": report.family,
        "m_used": report.m_used,
        "n": sizes,
        "phi": report.phi,
        "ratio": ratio,
    });

    let mut text = format!("family: {}\nclassification: {label}", report.family);
    if let Some(ratio) = ratio {
        text.push_str(&format!(" (phi grows by a factor >= {ratio:.3} per step)"));
    }
    text.push('\n');
    text.push_str(&text_table(&[
        ("n:".to_string(), sizes.iter().map(usize::to_string).collect()),
        ("phi:".to_string(), report.phi.iter().map(u64::to_string).collect()),
        ("m_used:".to_string(), report.m_used.iter().map(usize::to_string).collect()),
    ]));
    if let Some(dims) = &report.dim_mon {
        let cells: Vec<String> = dims.iter().map(|(v, d)| format!("{v}->{d}")).collect();
        text.push_str(&format!("dim_mon by truncation (vertices->classes): {}\n", cells.join(" ")));
    }

    let mut pairs = vec![
        ("family".to_string(), report.family.clone()),
        ("classification".to_string(), label.to_string()),
    ];
    if let Some(ratio) = ratio {
        pairs.push(("ratio".to_string(), ratio.to_string()));
    }
    pairs.push(("n".to_string(), join(&sizes, ";")));
    pairs.push(("phi".to_string(), join(&report.phi, ";")));
    pairs.push(("m_used".to_string(), join(&report.m_used, ";")));
    if let Some(dims) = &report.dim_mon {
        pairs.push((
            "dim_vertices".to_string(),
            dims.iter().map(|(v, _)| v.to_string()).collect::<Vec<_>>().join(";"),
        ));
        pairs.push((
            "dim_mon".to_string(),
            dims.iter().map(|(_, d)| d.to_string()).collect::<Vec<_>>().join(";"),
        ));
    }
    let csv = csv_kv(&pairs);

    Ok(Outcome::ok(Report { json, text, csv }))
}

fn cmd_series_expand(num: &str, den: &str, order: usize) -> Result<Outcome> {
    let num = parse_poly(num, "--num")?;
    let den = parse_poly(den, "--den")?;
    let gf = RationalGF::new(num, den)?;
    let series = expand_rational(&gf, order)?;
    Ok(Outcome::ok(series_report(&series, &[])))
}

fn cmd_series_residual(poly: &str, series: &str, order: usize) -> Result<Outcome> {
    let polys: Vec<IntPolynomial> = poly
        .split(';')
        .map(|sec| parse_poly(sec, "--poly"))
        .collect::<Result<_>>()?;
    let s = parse_series(series, "--series")?;
    let residual = algebraic_residual(&polys, &s, order);
    let zero = residual.is_zero();
    let extra = [("zero".to_string(), zero.to_string())];
    let report = series_report(&residual, &extra);
    if zero {
        Ok(Outcome::ok(report))
    } else {
        Ok(Outcome::mismatch(report))
    }
}

fn cmd_series_solve(a: &str, b: &str, c: &str, seed: i64, order: usize) -> Result<Outcome> {
    let a = parse_poly(a, "--a")?;
    let b = parse_poly(b, "--b")?;
    let c = parse_poly(c, "--c")?;
    let series = solve_quadratic_series(&a, &b, &c, seed, order)?;
    Ok(Outcome::ok(series_report(&series, &[])))
}

fn series_report(series: &IntegerSeries, extra: &[(String, String)]) -> Report {
    let coeffs: Vec<String> = series.coeffs().iter().map(ToString::to_string).collect();
    let mut json_map = serde_json::Map::new();
    json_map.insert("coefficients".to_string(), json!(coeffs));
    json_map.insert("order".to_string(), json!(series.order()));
    for (key, value) in extra {
        json_map.insert(key.clone(), json!(value));
    }

    let mut text = format!("order: {}\ncoefficients: {}\n", series.order(), coeffs.join(" "));
    for (key, value) in extra {
        text.push_str(&format!("{key}: {value}\n"));
    }

    let csv_rows: Vec<Vec<String>> = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| vec![i.to_string(), c.clone()])
        .collect();
    let csv = csv_table("i,coefficient", &csv_rows);

    Report { json: Value::Object(json_map), text, csv }
}

fn cmd_perm_simple_count(n: usize) -> Result<Outcome> {
    let sizes: Vec<usize> = (1..=n).collect();
    let counts: Vec<u64> = sizes.iter().map(|&i| relenum::perm::count_simple(i)).collect();

    let json = json!({
        "count": counts,
        "n": sizes,
    });
    let text = text_table(&[
        ("n:".to_string(), sizes.iter().map(usize::to_string).collect()),
        ("simple:".to_string(), counts.iter().map(u64::to_string).collect()),
    ]);
    let csv_rows: Vec<Vec<String>> = sizes
        .iter()
        .zip(&counts)
        .map(|(i, c)| vec![i.to_string(), c.to_string()])
        .collect();
    let csv = csv_table("n,count", &csv_rows);

    Ok(Outcome::ok(Report { json, text, csv }))
}

fn cmd_perm_separable(perm: &str) -> Result<Outcome> {
    let p = parse_perm(perm)?;
    let separable = p.is_separable();
    let json = json!({
        "n": p.len(),
        "perm": p.to_string(),
        "separable": separable,
    });
    let text = format!("{p} is {}separable\n", if separable { "" } else { "not " });
    let csv = csv_kv(&[
        ("perm".to_string(), p.to_string()),
        ("n".to_string(), p.len().to_string()),
        ("separable".to_string(), separable.to_string()),
    ]);
    Ok(Outcome::ok(Report { json, text, csv }))
}

fn cmd_perm_decompose(perm: &str) -> Result<Outcome> {
    let p = parse_perm(perm)?;
    if p.is_empty() {
        bail!("cannot decompose the empty permutation");
    }
    let tree = p.decompose();
    let json = json!({
        "n": p.len(),
        "perm": p.to_string(),
        "separable": p.is_separable(),
        "simple": p.is_simple(),
        "tree": tree_json(&tree),
    });
    let text = format!(
        "perm: {p}\ntree: {}\nsimple: {}\nseparable: {}\n",
        tree_text(&tree),
        p.is_simple(),
        p.is_separable()
    );
    let csv = csv_kv(&[
        ("perm".to_string(), p.to_string()),
        ("n".to_string(), p.len().to_string()),
        ("simple".to_string(), p.is_simple().to_string()),
        ("separable".to_string(), p.is_separable().to_string()),
        ("tree".to_string(), tree_text(&tree)),
    ]);
    Ok(Outcome::ok(Report { json, text, csv }))
}

fn tree_json(tree: &relenum::perm::DecompositionTree) -> Value {
    json!({
        "blocks": tree.blocks().iter().map(tree_json).collect::<Vec<_>>(),
        "quotient": tree.quotient().values(),
    })
}

/// Leaves print as `*`, inner nodes as `quotient(child, ...)`.
fn tree_text(tree: &relenum::perm::DecompositionTree) -> String {
    if tree.is_leaf() {
        return "*".to_string();
    }
    let children: Vec<String> = tree.blocks().iter().map(tree_text).collect();
    format!("{}({})", tree.quotient(), children.join(", "))
}

fn cmd_catalog() -> Result<Outcome> {
    let entries: Vec<(&str, &str, bool)> = families::REGISTRY
        .iter()
        .map(|e| {
            let has_formula = families::closed_form(&e.spec, 0).is_ok();
            (e.name, e.description, has_formula)
        })
        .collect();

    let json = json!({
        "count": entries.len(),
        "families": entries
            .iter()
            .map(|(name, description, has_formula)| {
                json!({
                    "closed_form": has_formula,
                    "description": description,
                    "name": name,
                })
            })
            .collect::<Vec<_>>(),
    });

    let name_w = entries.iter().map(|(name, ..)| name.len()).max().unwrap_or(0);
    let mut text = format!("{} registered families\n", entries.len());
    for (name, description, has_formula) in &entries {
        let tag = if *has_formula { "formula" } else { "sweep  " };
        text.push_str(&format!("{name:<name_w$}  {tag}  {description}\n"));
    }

    let csv_rows: Vec<Vec<String>> = entries
        .iter()
        .map(|(name, description, has_formula)| {
            vec![name.to_string(), csv_quote(description), has_formula.to_string()]
        })
        .collect();
    let csv = csv_table("name,description,closed_form", &csv_rows);

    Ok(Outcome::ok(Report { json, text, csv }))
}

fn load_structure(path: &Path) -> Result<FiniteStructure> {
    let contents =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    contents
        .parse::<FiniteStructure>()
        .with_context(|| format!("malformed structure file {}", path.display()))
}

fn parse_perm(text: &str) -> Result<Permutation> {
    text.parse::<Permutation>()
        .with_context(|| format!("parsing permutation `{text}`"))
}

fn parse_i64_list(text: &str, what: &str) -> Result<Vec<i64>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|token| {
            token
                .trim()
                .parse::<i64>()
                .with_context(|| format!("bad integer `{}` in {what}", token.trim()))
        })
        .collect()
}

fn parse_poly(text: &str, what: &str) -> Result<IntPolynomial> {
    Ok(IntPolynomial::from_i64(&parse_i64_list(text, what)?))
}

fn parse_series(text: &str, what: &str) -> Result<IntegerSeries> {
    let coeffs = parse_i64_list(text, what)?;
    if coeffs.is_empty() {
        bail!("{what} needs at least one coefficient");
    }
    let order = coeffs.len() - 1;
    Ok(IntegerSeries::from_i64(&coeffs, order))
}

fn emit(report: &Report, format: Format, out: Option<&Path>) -> Result<()> {
    let body = match format {
        Format::Text => report.text.clone(),
        Format::Json => {
            let mut rendered =
                serde_json::to_string_pretty(&report.json).context("rendering json")?;
            rendered.push('\n');
            rendered
        }
        Format::Csv => report.csv.clone(),
    };
    match out {
        Some(path) => {
            fs::write(path, &body).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

/// Rows of (label, cells) rendered with right-aligned columns.
fn text_table(rows: &[(String, Vec<String>)]) -> String {
    let label_w = rows.iter().map(|(label, _)| label.len()).max().unwrap_or(0);
    let columns = rows.iter().map(|(_, cells)| cells.len()).max().unwrap_or(0);
    let mut widths = vec![0usize; columns];
    for (_, cells) in rows {
        for (i, cell) in cells.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    for (label, cells) in rows {
        out.push_str(&format!("{label:<label_w$}"));
        for (i, cell) in cells.iter().enumerate() {
            out.push(' ');
            out.push_str(&format!("{cell:>width$}", width = widths[i]));
        }
        out.push('\n');
    }
    out
}

fn csv_table(header: &str, rows: &[Vec<String>]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn csv_kv(pairs: &[(String, String)]) -> String {
    let rows: Vec<Vec<String>> =
        pairs.iter().map(|(k, v)| vec![k.clone(), v.clone()]).collect();
    csv_table("key,value", &rows)
}

fn csv_quote(text: &str) -> String {
    format!("\"{}\"", text.replace('"', "\"\""))
}
