use std::fs;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fhgamma::characters::{
    cross_validate_blocks, nakayama_blocks, wreath_blocks, wreath_central_character_bruteforce,
    wreath_central_character_content,
};
use fhgamma::fh::{render_char_sym, to_elementary_basis, FhAlgebra, FhElement};
use fhgamma::groupdata::{builtin_group, format_rational, GroupData, BUILTIN_GROUPS};
use fhgamma::lambdagamma::{hopf_check, indecomposables};
use fhgamma::partitions::Multipartition;
use fhgamma::verify;
use fhgamma::wreath::{element_cap_from_env, WreathEngine, CAP_ENV_VAR};
use fhgamma::{Error, Result};

/// Exact class algebra computations for wreath products `Γ≀S_n`, uniform in `n`.
#[derive(Parser, Debug)]
#[command(name = "fhgamma", version)]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,

    /// Cap on enumerated group elements and products (overrides the environment).
    #[arg(long, global = true, value_name = "N")]
    max_elements: Option<u128>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classes, class coefficients and character table of a group.
    GroupInfo {
        /// Built-in group name or path to a group JSON file.
        #[arg(long)]
        group: String,
    },
    /// Product of two class sums in the centre of Γ≀S_n.
    CentreMult {
        #[arg(long)]
        group: String,
        #[arg(long)]
        n: usize,
        /// Cycle type of size n, or a partially-reduced label.
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
    },
    /// Structure polynomial of K_mu K_nu at K_lambda, or the whole product.
    StructPoly {
        #[arg(long)]
        group: String,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Character symmetric function f_mu.
    CharSym {
        #[arg(long)]
        group: String,
        #[arg(long)]
        mu: String,
    },
    /// Central character of an irreducible of Γ≀S_n on a class sum.
    CentralChar {
        #[arg(long)]
        group: String,
        #[arg(long)]
        n: usize,
        /// Irreducible label: a multipartition of n indexed by irreps of the group.
        #[arg(long)]
        lambda: String,
        /// Partially-reduced class label.
        #[arg(long)]
        mu: String,
        #[arg(long, value_enum, default_value_t = Method::Content)]
        method: Method,
    },
    /// p-blocks of Γ≀S_n.
    Blocks {
        #[arg(long)]
        group: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u64,
        /// Also group by central characters mod p and compare.
        #[arg(long)]
        validate: bool,
    },
    /// Hopf algebra identities of the weighted symmetric functions.
    HopfCheck {
        #[arg(long)]
        group: String,
        #[arg(long)]
        maxdeg: usize,
    },
    /// Indecomposables of the weighted symmetric functions in one degree.
    Indecomposables {
        #[arg(long)]
        group: String,
        #[arg(long)]
        degree: usize,
    },
    /// Run acceptance suites: `all`, a criterion number, or a suite name.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Content,
    Bruteforce,
}

fn load_group(spec: &str) -> Result<GroupData> {
    if BUILTIN_GROUPS.contains(&spec) {
        return builtin_group(spec);
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| Error::InvalidParameter(format!("{spec} is neither a built-in group nor a readable file: {e}")))?;
    GroupData::from_json(&text)
}

fn label(s: &str) -> Result<Multipartition> {
    s.parse()
}

/// A full cycle type of size `n`, accepting partially-reduced labels too.
fn full_type(s: &str, n: usize) -> Result<Multipartition> {
    let m = label(s)?;
    if m.size() == n {
        return Ok(m);
    }
    m.unreduce(n).ok_or_else(|| Error::InvalidParameter(format!("{m} is not a class of degree {n}")))
}

/// Text and JSON forms of a result, and whether it reports a failed check.
struct Report {
    text: String,
    json: Value,
    failed: bool,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { text, json, failed: false }
    }
}

fn run(cli: &Cli) -> Result<Report> {
    let cap = cli.max_elements.unwrap_or_else(element_cap_from_env);
    let algebra = |group: &str| -> Result<FhAlgebra> { Ok(FhAlgebra::new(Arc::new(load_group(group)?), cap)) };
    match &cli.command {
        Command::GroupInfo { group } => group_info(&load_group(group)?),
        Command::CentreMult { group, n, mu, nu } => {
            let engine = WreathEngine::new(Arc::new(load_group(group)?), cap);
            let (mu, nu) = (full_type(mu, *n)?, full_type(nu, *n)?);
            let product = engine.centre_product(&mu, &nu, *n)?;
            let terms: serde_json::Map<String, Value> =
                product.terms.iter().map(|(k, v)| (k.to_string(), Value::String(v.to_string()))).collect();
            Ok(Report::ok(
                product.to_string(),
                json!({"group": group, "n": n, "mu": mu.to_string(), "nu": nu.to_string(), "product": terms}),
            ))
        }
        Command::StructPoly { group, mu, nu, lambda } => {
            let fh = algebra(group)?;
            let (mu, nu) = (label(mu)?, label(nu)?);
            match lambda {
                Some(lambda) => {
                    let lambda = label(lambda)?;
                    let poly = fh.structure_poly(&mu, &nu, &lambda)?;
                    Ok(Report::ok(
                        poly.to_string(),
                        json!({"group": group, "mu": mu.to_string(), "nu": nu.to_string(),
                               "lambda": lambda.to_string(), "poly": poly.to_string()}),
                    ))
                }
                None => {
                    let product = fh.multiply(&FhElement::basis(mu.clone()), &FhElement::basis(nu.clone()))?;
                    Ok(Report::ok(
                        product.to_string(),
                        json!({"group": group, "mu": mu.to_string(), "nu": nu.to_string(),
                               "product": to_json(&product)}),
                    ))
                }
            }
        }
        Command::CharSym { group, mu } => {
            let fh = algebra(group)?;
            let mu = label(mu)?;
            let f = fh.char_sym_fn(&mu)?;
            let text = render_char_sym(&f, fh.group())?;
            let mut out = json!({"group": group, "mu": mu.to_string(), "terms": to_json(&*f), "text": text});
            if fh.group().num_classes() == 1 {
                let elementary: Vec<Value> = to_elementary_basis(&f, fh.group())?
                    .into_iter()
                    .map(|(rho, a)| json!({"e": rho.to_string(), "coefficient": a.to_string()}))
                    .collect();
                out["elementary"] = Value::Array(elementary);
            }
            Ok(Report::ok(text, out))
        }
        Command::CentralChar { group, n, lambda, mu, method } => {
            let lambda = label(lambda)?;
            let mu = label(mu)?;
            if lambda.size() != *n {
                return Err(Error::InvalidParameter(format!("irreducible label {lambda} does not have size {n}")));
            }
            let (value, name) = match method {
                Method::Content => (wreath_central_character_content(&algebra(group)?, &lambda, &mu)?, "content"),
                Method::Bruteforce => (wreath_central_character_bruteforce(&load_group(group)?, &lambda, &mu)?, "bruteforce"),
            };
            let value = format_rational(&value);
            Ok(Report::ok(
                value.clone(),
                json!({"group": group, "n": n, "lambda": lambda.to_string(), "mu": mu.to_string(),
                       "method": name, "value": value}),
            ))
        }
        Command::Blocks { group, n, p, validate } => {
            let blocks = if *validate {
                cross_validate_blocks(&algebra(group)?, *n, *p)?
            } else {
                let g = load_group(group)?;
                if g.num_classes() == 1 {
                    nakayama_blocks(*n, *p)?
                } else {
                    wreath_blocks(&g, *n, *p)?
                }
            };
            let failed = blocks.agrees == Some(false);
            Ok(Report { text: blocks.to_string().trim_end().to_string(), json: to_json(&blocks), failed })
        }
        Command::HopfCheck { group, maxdeg } => {
            let report = hopf_check(&load_group(group)?, *maxdeg);
            let text = format!(
                "{} basis elements, {} products up to degree {}: {}",
                report.basis_elements,
                report.products,
                report.max_degree,
                if report.passed() { "all identities hold" } else { "FAILED" }
            );
            Ok(Report { text, json: to_json(&report), failed: !report.passed() })
        }
        Command::Indecomposables { group, degree } => {
            let report = indecomposables(&load_group(group)?, *degree)?;
            let torsion: Vec<String> = report.torsion.iter().map(|t| format!("Z/{t}")).collect();
            let mut text = format!("degree {}: Z^{}", report.degree, report.free_rank);
            for t in &torsion {
                text.push_str(&format!(" + {t}"));
            }
            Ok(Report::ok(text, to_json(&report)))
        }
        Command::Verify { suite } => {
            let outcomes: Vec<verify::Outcome> = verify::select(suite)?.into_iter().map(verify::run).collect();
            let lines: Vec<String> = outcomes
                .iter()
                .map(|o| {
                    let status = if o.passed { "PASS" } else { "FAIL" };
                    if o.detail.is_empty() {
                        format!("{status} {:>2} {}", o.id, o.name)
                    } else {
                        format!("{status} {:>2} {}: {}", o.id, o.name, o.detail)
                    }
                })
                .collect();
            let failed = outcomes.iter().any(|o| !o.passed);
            Ok(Report { text: lines.join("\n"), json: to_json(&outcomes), failed })
        }
    }
}

fn to_json<T: serde::Serialize + ?Sized>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

fn group_info(g: &GroupData) -> Result<Report> {
    let l = g.num_classes();
    let mut text = format!("group {}: order {}, {} classes\n", g.name, g.order(), l);
    let mut classes = Vec::new();
    for c in 0..l {
        text.push_str(&format!("  class {c}: size {}, elements {:?}\n", g.class_size(c), g.class(c)));
        classes.push(json!({"index": c, "size": g.class_size(c), "elements": g.class(c)}));
    }
    let mut irreps = Value::Null;
    if g.has_char_table() {
        text.push_str("character table:\n");
        let mut rows = Vec::new();
        for ir in g.irreps()? {
            let values: Vec<String> = ir.values.iter().map(format_rational).collect();
            text.push_str(&format!("  {} (dim {}): {}\n", ir.name, ir.dim, values.join(" ")));
            rows.push(json!({"name": ir.name, "dim": ir.dim, "values": values}));
        }
        irreps = Value::Array(rows);
    } else {
        text.push_str("no rational character table\n");
    }
    let json = json!({
        "name": g.name,
        "order": g.order(),
        "classes": classes,
        "class_coefficients": g.class_coefficients(),
        "irreps": irreps,
        "document": to_json(&g.to_document()),
    });
    Ok(Report::ok(text.trim_end().to_string(), json))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report.json).expect("json"));
            } else {
                println!("{}", report.text);
            }
            if report.failed {
                ExitCode::from(Error::Validation(String::new()).exit_code() as u8)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::ResourceLimit { .. }) {
                eprintln!("raise the cap with --max-elements or {CAP_ENV_VAR}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
