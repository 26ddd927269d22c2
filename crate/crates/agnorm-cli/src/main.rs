//! `agnorm`: JSON front end to the agnorm library.
//!
//! Exit codes: 0 success, 1 a check or audit failed, 2 usage or input error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use agnorm::decomposer::{idempotent_decompose, DEFAULT_MAX_STEPS};
use agnorm::freiman::{
    doubling_to_tripling, fournier_subgroup, freiman_correlation, pair_system, weak_freiman, SearchConfig,
};
use agnorm::group_core::{build_group_capped, subgroups, Group};
use agnorm::io::{function_json, parse_function, parse_pair, parse_subset, subset_json, to_stable_string};
use agnorm::mult_pairs::{pair_from_growth, validate_pair, StepTable, DEFAULT_R_CAP};
use agnorm::set_structures::{doubling, energy_ratio, symmetry_set};
use agnorm::spectral::{a_norm, fourier_basis, pm_norm, singular_values};
use agnorm::verify::{run_suite, SUITES};
use agnorm::{Error, GFunc};
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const DEFAULT_CAP: usize = 1024;

#[derive(Parser, Debug)]
#[command(name = "agnorm", version, about = "Algebra norms and coset decompositions on finite groups")]
struct Cli {
    /// Seed for every randomized search.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Largest group order accepted.
    #[arg(long, global = true, env = "AGNORM_CAP_N", default_value_t = DEFAULT_CAP)]
    cap_n: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Describe a group: order, element orders, subgroup count.
    Group {
        #[arg(long)]
        group: String,
        /// Include the Cayley table.
        #[arg(long)]
        table: bool,
    },
    /// Algebra, PM and Lebesgue norms of a function.
    Norm {
        #[arg(long)]
        group: String,
        #[arg(long)]
        function: String,
    },
    /// Singular values and canonical Fourier basis of `L_f`.
    Spectrum {
        #[arg(long)]
        group: String,
        #[arg(long)]
        function: String,
        /// Also count singular values above `δ‖f‖_L¹`.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// The symmetry set `Sym_η(A)`.
    Symset {
        #[arg(long)]
        group: String,
        #[arg(long)]
        set: String,
        #[arg(long)]
        eta: f64,
    },
    /// Validate a multiplicative pair, given explicitly or grown from a set.
    Pair {
        #[arg(long)]
        group: String,
        /// Symmetric neighbourhood to grow a pair from.
        #[arg(long, required_unless_present = "pair")]
        set: Option<String>,
        /// Explicit pair as JSON `{ground, perturb, upper, lower, width}`.
        #[arg(long)]
        pair: Option<String>,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    /// One stage of the Freĭman pipeline.
    Freiman {
        #[arg(long)]
        group: String,
        #[arg(long)]
        set: String,
        #[arg(long, value_enum)]
        stage: Stage,
        #[arg(long, default_value_t = 1.0 / 15.0)]
        eta: f64,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Random subsets tried by witness searches.
        #[arg(long, default_value_t = 16)]
        budget: usize,
        /// Scales for `--stage system`.
        #[arg(long, default_value_t = 1)]
        levels: usize,
    },
    /// Write an integer-valued function as a sum of coset indicators.
    Decompose {
        #[arg(long)]
        group: String,
        #[arg(long)]
        function: String,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
    },
    /// Run a named verification suite.
    Verify {
        #[arg(long)]
        group: String,
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Stage {
    Fournier,
    Tripling,
    Weak,
    Correlation,
    System,
}

/// Failure classes mapped to exit codes.
enum Fail {
    Check(Value),
    Usage(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Audit { .. } | Error::Numerical(_) | Error::NoAdmissibleSubgroup | Error::NotAlmostInteger { .. } => {
                Fail::Check(json!({ "error": e.to_string() }))
            }
            other => Fail::Usage(other.to_string()),
        }
    }
}

type Outcome = Result<Value, Fail>;

fn group(spec: &str, cap: usize) -> Result<Group, Fail> {
    Ok(build_group_capped(spec, cap)?)
}

fn norm_report(f: &GFunc) -> Result<Value, Error> {
    Ok(json!({
        "a_norm": a_norm(f)?,
        "pm_norm": pm_norm(f)?,
        "l1": f.l1_norm(),
        "l2": f.l2_norm(),
        "linf": f.linf_norm(),
        "singular_values": singular_values(f)?,
    }))
}

fn run(cli: &Cli) -> Outcome {
    let cap = cli.cap_n;
    let cfg = |budget| SearchConfig { budget, seed: cli.seed };
    match &cli.cmd {
        Cmd::Group { group: spec, table } => {
            let g = group(spec, cap)?;
            let subs = subgroups(&g).ok();
            let mut out = json!({
                "name": g.name(),
                "order": g.order(),
                "abelian": g.is_abelian(),
                "identity": g.identity(),
                "labels": g.labels(),
                "element_orders": g.elements().map(|x| g.element_order(x)).collect::<Vec<_>>(),
                "subgroups": subs.as_ref().map(|s| s.len()),
                "normal_subgroups": subs.as_ref().map(|s| s.iter().filter(|h| h.is_normal()).count()),
            });
            if *table {
                out["table"] = json!(g.elements().map(|x| g.elements().map(|y| g.mul(x, y)).collect::<Vec<_>>()).collect::<Vec<_>>());
            }
            Ok(out)
        }
        Cmd::Norm { group: spec, function } => {
            let g = group(spec, cap)?;
            let f = parse_function(&g, function)?;
            Ok(norm_report(&f)?)
        }
        Cmd::Spectrum { group: spec, function, delta } => {
            let g = group(spec, cap)?;
            let f = parse_function(&g, function)?;
            let basis = fourier_basis(&f)?;
            let vectors: Vec<Value> = basis
                .sing_values
                .iter()
                .zip(&basis.vectors)
                .map(|(s, v)| json!({ "s": s, "vector": function_json(v)["values"] }))
                .collect();
            let mut out = json!({ "singular_values": basis.sing_values, "basis": vectors });
            if let Some(d) = delta {
                let thr = d * f.l1_norm();
                out["delta"] = json!(d);
                out["spectrum_dim"] = json!(basis.sing_values.iter().filter(|&&s| s > thr).count());
            }
            Ok(out)
        }
        Cmd::Symset { group: spec, set, eta } => {
            let g = group(spec, cap)?;
            let a = parse_subset(&g, set)?;
            let s = symmetry_set(&a, *eta)?;
            Ok(json!({
                "set": subset_json(&a),
                "eta": eta,
                "sym": subset_json(&s),
                "size": s.len(),
                "measure": s.measure(),
                "energy_ratio": energy_ratio(&a)?,
                "doubling": doubling(&a)?,
            }))
        }
        Cmd::Pair { group: spec, set, pair, r, eps } => {
            let g = group(spec, cap)?;
            let (p, n) = match (pair, set) {
                (Some(text), _) => (parse_pair(&g, text)?, None),
                (None, Some(text)) => {
                    let (p, n) = pair_from_growth(&parse_subset(&g, text)?, *r, *eps)?;
                    (p, Some(n))
                }
                (None, None) => return Err(Fail::Usage("one of --set or --pair is required".into())),
            };
            let report = validate_pair(&p, DEFAULT_R_CAP.max(*r));
            let out = json!({
                "pair": agnorm::io::pair_json(&p),
                "growth_exponent": n,
                "report": report,
            });
            if report.valid {
                Ok(out)
            } else {
                Err(Fail::Check(out))
            }
        }
        Cmd::Freiman { group: spec, set, stage, eta, r, eps, budget, levels } => {
            let g = group(spec, cap)?;
            let a = parse_subset(&g, set)?;
            let c = cfg(*budget);
            let out = match stage {
                Stage::Fournier => {
                    let res = fournier_subgroup(&a, *eta)?;
                    json!({ "subgroup": subset_json(&res.subgroup), "x": res.x, "overlap": res.overlap, "c": res.c, "trace": res.trace })
                }
                Stage::Tripling => {
                    let res = doubling_to_tripling(&a, &c)?;
                    json!({ "a_prime": subset_json(&res.a_prime), "x": res.x, "ratio": res.ratio, "tripling": res.tripling, "trace": res.trace })
                }
                Stage::Weak => {
                    let res = weak_freiman(&a, *r, *eps, &c)?;
                    json!({ "pair": agnorm::io::pair_json(&res.pair), "report": res.report, "k": res.k, "eta": res.eta, "c_prime": res.c_prime, "trace": res.trace })
                }
                Stage::Correlation => {
                    let res = freiman_correlation(&a, *r, *eps, &c)?;
                    json!({ "pair": agnorm::io::pair_json(&res.pair), "report": res.report, "sup": res.sup, "sup_left": res.sup_left, "trace": res.trace })
                }
                Stage::System => {
                    let res = pair_system(&a, &StepTable::constant(*r), &StepTable::constant(*eps), *levels, &c)?;
                    let mut v = serde_json::to_value(&res).map_err(|e| Fail::Usage(e.to_string()))?;
                    v["sets"] = json!(res.sets.iter().map(subset_json).collect::<Vec<_>>());
                    v
                }
            };
            Ok(out)
        }
        Cmd::Decompose { group: spec, function, max_steps } => {
            let g = group(spec, cap)?;
            let f = parse_function(&g, function)?;
            let out = idempotent_decompose(&f, *max_steps)?;
            let v = json!({
                "terms": out.decomposition.terms,
                "steps": out.steps,
                "norms": out.norms,
                "complete": out.complete,
                "compacted": out.compacted,
                "failure": out.failure,
                "residual": function_json(&out.residual)["values"],
            });
            if out.complete {
                Ok(v)
            } else {
                Err(Fail::Check(v))
            }
        }
        Cmd::Verify { group: spec, suite } => {
            let g = group(spec, cap)?;
            let report = run_suite(suite, &g, cli.seed)?;
            let v = serde_json::to_value(&report).map_err(|e| Fail::Usage(e.to_string()))?;
            if report.passed {
                Ok(v)
            } else {
                Err(Fail::Check(v))
            }
        }
    }
}

fn emit(cli: &Cli, v: &Value) -> std::io::Result<()> {
    let text = to_stable_string(v).unwrap_or_else(|e| format!("{{\"error\": \"{e}\"}}"));
    match &cli.json {
        Some(path) => std::fs::write(path, text + "\n"),
        None => writeln!(std::io::stdout().lock(), "{text}"),
    }
}

/// Help for the subcommand named on the command line, else the top level.
fn usage_help() -> String {
    let mut top = Cli::command();
    let named = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    match named.and_then(|n| top.find_subcommand_mut(&n).cloned()) {
        Some(mut sub) => sub.render_help().to_string(),
        None => top.render_help().to_string(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return ExitCode::SUCCESS;
            }
            eprintln!("\n{}", usage_help());
            return ExitCode::from(2);
        }
    };
    let (value, code) = match run(&cli) {
        Ok(v) => (v, 0),
        Err(Fail::Check(v)) => (v, 1),
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}\n\n{}", usage_help());
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&cli, &value) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
