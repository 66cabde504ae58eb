use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use ualg::clone::DEFAULT_SIZE_CAP;
use ualg::congruence::{is_congruence_uniform, lower_central_series};
use ualg::field::FiniteField;
use ualg::polyclone::{self, PolySet, DEFAULT_POLY_CAP};
use ualg::supernil::{bound_pipeline, spectrum_degree_probe};
use ualg::{expand_algebra, find_malcev_term, CongruenceLattice, Error, FiniteAlgebra, MalcevSearch};

#[derive(Parser)]
#[command(name = "ualg", version, about = "Finite universal algebra workbench")]
struct Cli {
    /// Largest term depth explored by searches.
    #[arg(long, global = true)]
    depth_cap: Option<usize>,
    /// Largest number of functions or polynomials kept by a closure.
    #[arg(long, global = true)]
    size_cap: Option<usize>,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Congruence lattice, nilpotency class and Mal'cev term.
    Analyze { file: PathBuf },
    /// Expand a nilpotent Mal'cev algebra by an abelian group.
    Expand {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        zero: usize,
        /// Where to write the expanded algebra.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Supernilpotency bound pipeline.
    BoundVerify {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        zero: usize,
        #[arg(long, default_value_t = 3)]
        arity_cap: usize,
    },
    /// Free spectrum and its growth degree.
    Spectrum {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
    },
    /// Clones of polynomials over a finite field.
    Polyclone {
        /// Field order, as `q` or `p^e`.
        #[arg(long, global = true, default_value = "2")]
        field: String,
        #[command(subcommand)]
        op: PolyOp,
    },
}

#[derive(Args)]
struct PolyInput {
    /// A polynomial such as `x1*x2^2 + 3*x3`; repeat for a set.
    #[arg(short = 'p', long = "poly")]
    polys: Vec<String>,
}

#[derive(Subcommand)]
enum PolyOp {
    /// The set product AB.
    Product {
        #[arg(short = 'a', long = "a")]
        a: Vec<String>,
        #[arg(short = 'b', long = "b")]
        b: Vec<String>,
    },
    /// L(F): linear combinations over the prime field, in x1..xn.
    Span {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Homovariate components.
    Hoc {
        #[command(flatten)]
        input: PolyInput,
    },
    /// The clone generated inside the window x1..xn.
    Clop {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long)]
        window: usize,
    },
    /// The homovariate set H with L Clop(H) = Clop(F, +, -, 0).
    BuildH {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Compare the functions induced by L Clop(H) and Clop(F, +, -, 0).
    LcloCheck {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
    },
}

#[derive(Serialize)]
struct Report {
    command: String,
    input_digest: String,
    parameters: Value,
    results: Value,
    caps_hit: Vec<String>,
    wall_time_ms: u128,
}

/// What a command found, besides its payload.
#[derive(Default)]
struct Outcome {
    caps: Vec<String>,
    witness: bool,
    inconclusive: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    let start = Instant::now();
    let size_cap = cli.size_cap.unwrap_or(DEFAULT_SIZE_CAP);
    let mut outcome = Outcome::default();
    let (name, digest, parameters, results) = match &cli.command {
        Command::Analyze { file } => {
            let (alg, digest) = load(file)?;
            let results = analyze(&alg, cli.depth_cap, size_cap, &mut outcome).map_err(|e| e.to_string())?;
            ("analyze", digest, json!({"file": file}), results)
        }
        Command::Expand { file, zero, out } => {
            let (alg, digest) = load(file)?;
            let exp = expand_algebra(&alg, *zero, cli.depth_cap, Some(size_cap)).map_err(|e| e.to_string())?;
            let expanded = exp.expanded.to_algebra();
            if let Some(out) = out {
                std::fs::write(out, expanded.to_json()).map_err(|e| format!("{}: {e}", out.display()))?;
            }
            outcome.witness = !exp.report.passed();
            let results = json!({
                "malcev_term": exp.witness.term.to_string(),
                "series": exp.series,
                "report": exp.report,
                "expanded_algebra": expanded,
            });
            (
                "expand",
                digest,
                json!({"file": file, "zero": zero, "out": out}),
                results,
            )
        }
        Command::BoundVerify { file, zero, arity_cap } => {
            let (alg, digest) = load(file)?;
            let r = bound_pipeline(&alg, *zero, *arity_cap, size_cap).map_err(|e| e.to_string())?;
            if r.supernil.capped {
                outcome
                    .caps
                    .push(format!("absorbing survey stopped below arity {arity_cap}"));
            }
            if r.boundabs.as_ref().is_some_and(|b| b.capped) {
                outcome.caps.push("boundabs survey".into());
            }
            if r.reduct_falsifier.capped {
                outcome.caps.push("term condition search".into());
            }
            outcome.witness = !r.consistent
                || r.boundabs
                    .as_ref()
                    .is_some_and(|b| !b.within_bound || b.pnl_violation.is_some());
            outcome.inconclusive = r.supernil.capped;
            let params = json!({"file": file, "zero": zero, "arity_cap": arity_cap});
            ("bound-verify", digest, params, to_value(&r))
        }
        Command::Spectrum { file, max_arity } => {
            let (alg, digest) = load(file)?;
            let results = match spectrum_degree_probe(&alg, *max_arity, size_cap) {
                Ok(p) => to_value(&p),
                Err(Error::CapExceeded(w)) => {
                    outcome.caps.push(w.clone());
                    outcome.inconclusive = true;
                    json!({"aborted": w})
                }
                Err(e) => return Err(e.to_string()),
            };
            (
                "spectrum",
                digest,
                json!({"file": file, "max_arity": max_arity}),
                results,
            )
        }
        Command::Polyclone { field, op } => {
            let field = Arc::new(field.parse::<FiniteField>().map_err(|e| e.to_string())?);
            let cap = cli.size_cap.unwrap_or(DEFAULT_POLY_CAP);
            let (name, sources, params, results) =
                polyclone_cmd(&field, op, cli.depth_cap, cap, &mut outcome).map_err(|e| e.to_string())?;
            let params = json!({"field": field.order(), "inputs": sources, "options": params});
            (name, digest_of(sources.join("\n").as_bytes()), params, results)
        }
    };
    let report = Report {
        command: name.to_string(),
        input_digest: digest,
        parameters,
        results,
        caps_hit: outcome.caps.clone(),
        wall_time_ms: start.elapsed().as_millis(),
    };
    let text = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = writeln!(stdout, "{text}") {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            return Err(e.to_string());
        }
    }
    if let Some(path) = &cli.json_out {
        std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(if outcome.witness {
        ExitCode::from(2)
    } else if outcome.inconclusive {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    })
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn digest_of(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn load(path: &Path) -> Result<(FiniteAlgebra, String), String> {
    let src = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let text = String::from_utf8(src.clone()).map_err(|_| format!("{}: not UTF-8", path.display()))?;
    let alg = FiniteAlgebra::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((alg, digest_of(&src)))
}

fn analyze(
    alg: &FiniteAlgebra,
    depth_cap: Option<usize>,
    size_cap: usize,
    outcome: &mut Outcome,
) -> ualg::Result<Value> {
    let lattice = CongruenceLattice::of(alg);
    let lcs = lower_central_series(alg)?;
    let malcev = match find_malcev_term(alg, depth_cap, Some(size_cap))? {
        MalcevSearch::Found { witness, depth } => json!({"term": witness.term.to_string(), "depth": depth}),
        MalcevSearch::NoneExists { clone_size } => json!({"term": null, "clone_size": clone_size}),
        MalcevSearch::Unknown { explored } => {
            outcome.caps.push("Mal'cev term search".into());
            outcome.inconclusive = true;
            json!({"term": null, "explored": explored, "capped": true})
        }
    };
    Ok(json!({
        "name": alg.name(),
        "size": alg.size(),
        "max_arity": alg.max_arity(),
        "congruences": lattice.len(),
        "height": lattice.height(),
        "class": match lcs.class {
            Some(c) => json!(c),
            None => json!("not nilpotent"),
        },
        "lower_central_series": lcs.terms.iter().map(|c| c.blocks()).collect::<Vec<_>>(),
        "malcev": malcev,
        "congruence_uniform": is_congruence_uniform(alg),
    }))
}

type PolyResult = (&'static str, Vec<String>, Value, Value);

fn parse_set(field: &Arc<FiniteField>, tag: &str, sources: &[String]) -> ualg::Result<PolySet> {
    let refs: Vec<&str> = sources.iter().map(String::as_str).collect();
    PolySet::parse(field, tag, &refs)
}

/// The smallest window holding every polynomial and its total degree.
fn default_window(f: &PolySet) -> usize {
    f.max_var().max(f.max_degree() as usize).max(1)
}

fn polyclone_cmd(
    field: &Arc<FiniteField>,
    op: &PolyOp,
    depth_cap: Option<usize>,
    cap: usize,
    outcome: &mut Outcome,
) -> ualg::Result<PolyResult> {
    Ok(match op {
        PolyOp::Product { a, b } => {
            let pa = parse_set(field, "A", a)?;
            let pb = parse_set(field, "B", b)?;
            let prod = polyclone::set_product(&pa, &pb, cap)?;
            let sources = a.iter().chain(b).cloned().collect();
            ("polyclone product", sources, json!({"a": a, "b": b}), to_value(&prod))
        }
        PolyOp::Span { input, window } => {
            let f = parse_set(field, "F", &input.polys)?;
            let n = window.unwrap_or(f.max_var().max(1));
            let span = polyclone::l_span(&f, n, cap)?;
            (
                "polyclone span",
                input.polys.clone(),
                json!({"window": n}),
                to_value(&span),
            )
        }
        PolyOp::Hoc { input } => {
            let f = parse_set(field, "F", &input.polys)?;
            let per: Vec<Value> = f
                .iter()
                .map(|p| json!({"polynomial": p, "components": polyclone::hoc(p)}))
                .collect();
            (
                "polyclone hoc",
                input.polys.clone(),
                json!({}),
                json!({"components": per, "hoc": polyclone::hoc_set(&f)}),
            )
        }
        PolyOp::Clop { input, window } => {
            let f = parse_set(field, "C", &input.polys)?;
            let c = polyclone::clop_closure(&f, *window, depth_cap, cap)?;
            if c.capped {
                outcome.caps.push("clop closure".into());
                outcome.inconclusive = true;
            }
            let params = json!({"window": window, "depth_cap": depth_cap});
            ("polyclone clop", input.polys.clone(), params, to_value(&c))
        }
        PolyOp::BuildH { input, window } => {
            let f = parse_set(field, "F", &input.polys)?;
            let n = window.unwrap_or_else(|| default_window(&f));
            let h = polyclone::build_h(&f, n, cap)?;
            (
                "polyclone build-h",
                input.polys.clone(),
                json!({"window": n}),
                to_value(&h),
            )
        }
        PolyOp::LcloCheck {
            input,
            window,
            max_arity,
        } => {
            let f = parse_set(field, "F", &input.polys)?;
            let n = window.unwrap_or_else(|| default_window(&f));
            let check = polyclone::lclo_check(&f, n, *max_arity, cap)?;
            outcome.witness = !check.passed();
            let mut v = to_value(&check);
            v["passed"] = json!(check.passed());
            let params = json!({"window": n, "max_arity": max_arity});
            ("polyclone lclo-check", input.polys.clone(), params, v)
        }
    })
}
