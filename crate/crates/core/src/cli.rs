//! Command-line front end. Every subcommand writes JSON (or CSV) to stdout.
//!
//! Exit codes: 0 success, 1 budget refusal, 2 rejected input, 3 a
//! verification failed, 64 unknown subcommand.

use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::acceptance::run_all;
use crate::archimedean::singular_integral;
use crate::classgroup::{admissibility_report, ClassGroup};
use crate::count::{convergence_table, MainTermConfig, CONVERGENCE_COLUMNS};
use crate::delta::{delta_table, MAX_M_OVER_Q2};
use crate::density::{class_number_formula_check, local_density, singular_series, sser_two_path, DEFAULT_LEVEL_BUDGET};
use crate::error::{invalid, Error, Result, DEFAULT_BUDGET};
use crate::expsum::{exp_sum_with, verify_prime_laws, ExpSumParams, Method};
use crate::model::ModelSystem;
use crate::repnum::decompose;
use crate::report::{fmt12, to_csv, to_json};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "quadinter", version, about = "Intersections of two quadrics: class groups, exponential sums, densities, counts")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RunConfig {
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Ceiling on elementary operations per computation.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Model JSON file, or the name of a shipped model (quartic, ternary, toy).
    #[arg(long, global = true)]
    pub model: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reduced forms, structure and characters of the class group.
    Classgroup {
        #[arg(long = "D", allow_negative_numbers = true)]
        d: i64,
    },
    /// r_F(m) split into its genus and cuspidal parts.
    Repnum {
        #[arg(long = "D", allow_negative_numbers = true)]
        d: i64,
        #[arg(long)]
        m: i64,
    },
    /// Whether m is represented by the principal genus.
    Admissible {
        #[arg(long = "D", allow_negative_numbers = true)]
        d: i64,
        #[arg(long)]
        m: i64,
    },
    /// The complete exponential sum for the model's forms.
    Expsum {
        #[arg(long)]
        q1: i64,
        #[arg(long)]
        q2: i64,
        #[arg(long, default_value_t = 23)]
        k: i64,
        #[arg(long, default_value_t = 1)]
        m: i64,
        /// Defaults to the model's discriminant.
        #[arg(long = "D", allow_negative_numbers = true)]
        d: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        mvec: String,
        #[arg(long, default_value = "auto")]
        method: String,
    },
    /// Every prime law of the exponential sums at p.
    VerifyLaws {
        #[arg(long)]
        p: i64,
        #[arg(long, default_value_t = 2)]
        c: u32,
        #[arg(long, default_value_t = 23)]
        k: i64,
        #[arg(long, default_value_t = 1)]
        m: i64,
        #[arg(long = "D", allow_negative_numbers = true)]
        d: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        mvec: String,
    },
    /// One local density (with --p) or the truncated singular series.
    Density {
        #[arg(long)]
        p: Option<i64>,
        #[arg(long, default_value_t = 2)]
        ell: u32,
        /// Prime cutoff of the singular series.
        #[arg(long = "P", default_value_t = 50)]
        cutoff: i64,
        /// Terms for L(1, chi_D).
        #[arg(long, default_value_t = 100_000)]
        terms: u64,
    },
    /// tau_inf and the singular integral by both routes.
    Sigint {
        #[arg(long, default_value_t = 0.02)]
        eps: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
    /// The delta-symbol expansion at scale Q.
    Delta {
        #[arg(long = "Q")]
        q: f64,
        #[arg(long, allow_negative_numbers = true)]
        m: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        m_min: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        m_max: Option<i64>,
    },
    /// Weighted counts against the predicted main term.
    Count {
        #[arg(long = "B")]
        b: Option<f64>,
        /// Comma-separated scales.
        #[arg(long = "B-list")]
        b_list: Option<String>,
        #[arg(long = "P", default_value_t = 50)]
        cutoff: i64,
        #[arg(long, default_value_t = 0.02)]
        eps: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
    /// Every acceptance criterion; nonzero exit if any fails.
    VerifyAll,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| Error::Invalid(format!("cannot parse '{t}' in {what}"))))
        .collect()
}

fn load_model(run: &RunConfig) -> Result<ModelSystem> {
    match &run.model {
        None => ModelSystem::shipped("quartic"),
        Some(s) if !Path::new(s).exists() && ModelSystem::shipped_names().contains(&s.as_str()) => ModelSystem::shipped(s),
        Some(s) => ModelSystem::load(Path::new(s)),
    }
}

fn wrap<T: Serialize>(run: &RunConfig, command: &str, result: &T) -> Result<String> {
    to_json(&json!({
        "command": command,
        "seed": run.seed,
        "budget": run.budget,
        "result": result,
    }))
}

/// Output of a successful command and whether verification passed.
pub struct Outcome {
    pub stdout: String,
    pub verified: bool,
}

fn ok(stdout: String) -> Result<Outcome> {
    Ok(Outcome { stdout, verified: true })
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let run = &cli.run;
    let csv = run.format == Format::Csv;
    match &cli.command {
        Command::Classgroup { d } => {
            let g = ClassGroup::new(*d)?;
            if csv {
                let rows = g.classes.iter().map(|f| vec![f.a.to_string(), f.b.to_string(), f.c.to_string()]).collect::<Vec<_>>();
                return ok(to_csv(&["a", "b", "c"], &rows)?);
            }
            let chars = g.characters();
            ok(wrap(run, "classgroup", &json!({"group": g, "characters": chars}))?)
        }
        Command::Repnum { d, m } => {
            let r = decompose(*m, *d)?;
            let (en, ed) = r.eisenstein_exact;
            let out = json!({
                "D": d, "m": m, "total": r.total,
                "eisenstein": r.eisenstein, "eisenstein_exact": format!("{en}/{ed}"),
                "cuspidal": r.cuspidal.re, "cuspidal_imag": r.cuspidal.im,
            });
            if csv {
                let row = vec![d.to_string(), m.to_string(), r.total.to_string(), fmt12(r.eisenstein), fmt12(r.cuspidal.re)];
                return ok(to_csv(&["D", "m", "total", "eisenstein", "cuspidal"], &[row])?);
            }
            ok(wrap(run, "repnum", &out)?)
        }
        Command::Admissible { d, m } => {
            let rep = admissibility_report(*m, &ClassGroup::new(*d)?)?;
            if csv {
                let row = vec![d.to_string(), m.to_string(), rep.admissible.to_string(), rep.local_check.to_string()];
                return ok(to_csv(&["D", "m", "admissible", "local_check"], &[row])?);
            }
            ok(wrap(run, "admissible", &rep)?)
        }
        Command::Expsum { q1, q2, k, m, d, mvec, method } => {
            let model = load_model(run)?;
            let params = ExpSumParams::new(*q1, *q2, *k, *m, d.unwrap_or(model.d), parse_list(mvec, "--mvec")?);
            let method: Method = method.parse()?;
            let z = exp_sum_with(&params, &model.q1, &model.q2, method, run.budget)?;
            if csv {
                let row = vec![q1.to_string(), q2.to_string(), fmt12(z.re), fmt12(z.im), fmt12(z.norm())];
                return ok(to_csv(&["q1", "q2", "re", "im", "abs"], &[row])?);
            }
            ok(wrap(run, "expsum", &json!({"model": model.name, "params": params, "re": z.re, "im": z.im, "abs": z.norm()}))?)
        }
        Command::VerifyLaws { p, c, k, m, d, mvec } => {
            let model = load_model(run)?;
            let mv: Vec<i64> = parse_list(mvec, "--mvec")?;
            let rep = verify_prime_laws(*p, *c, *k, *m, d.unwrap_or(model.d), &mv, &model.q1, &model.q2, run.budget)?;
            let verified = rep.failures() == 0;
            let stdout = if csv {
                let rows: Vec<Vec<String>> = rep
                    .checks
                    .iter()
                    .map(|ch| {
                        vec![
                            ch.law.clone(),
                            ch.q1.to_string(),
                            ch.q2.to_string(),
                            ch.precondition.to_string(),
                            ch.abs_value.map_or(String::new(), fmt12),
                            ch.bound.map_or(String::new(), fmt12),
                            serde_json::to_value(ch.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                        ]
                    })
                    .collect();
                to_csv(&["law", "q1", "q2", "precondition", "abs_value", "bound", "status"], &rows)?
            } else {
                wrap(run, "verify-laws", &rep)?
            };
            Ok(Outcome { stdout, verified })
        }
        Command::Density { p, ell, cutoff, terms } => {
            let model = load_model(run)?;
            if let Some(p) = p {
                let rep = local_density(*p, *ell, &model, run.budget)?;
                let two = sser_two_path(*p, *ell, &model, run.budget).ok();
                if csv {
                    let rows: Vec<Vec<String>> =
                        rep.levels.iter().map(|l| vec![p.to_string(), l.ell.to_string(), l.sigma_exact.clone(), fmt12(l.sigma)]).collect();
                    return ok(to_csv(&["p", "ell", "sigma_exact", "sigma"], &rows)?);
                }
                return ok(wrap(run, "density", &json!({"model": model.name, "local": rep, "two_path": two}))?);
            }
            let s = singular_series(&model, *cutoff, DEFAULT_LEVEL_BUDGET.min(run.budget))?;
            if csv {
                let rows: Vec<Vec<String>> = s
                    .factors
                    .iter()
                    .map(|f| vec![f.p.to_string(), f.levels_used.to_string(), f.exact.clone().unwrap_or_default(), fmt12(f.value), f.stabilized.to_string()])
                    .collect();
                return ok(to_csv(&["p", "levels", "exact", "value", "stabilized"], &rows)?);
            }
            let cnf = class_number_formula_check(model.d, *terms)?;
            ok(wrap(run, "density", &json!({"model": model.name, "series": s, "class_number_formula": cnf}))?)
        }
        Command::Sigint { eps, samples } => {
            let model = load_model(run)?;
            let w = model.weight()?.clone();
            let s = singular_integral(&model, &w, *eps, *samples, run.seed)?;
            if csv {
                let row = vec![fmt12(s.tau.tau), fmt12(s.j_identity), fmt12(s.j_direct), fmt12(s.j_identity_stderr), fmt12(s.j_direct_stderr), fmt12(s.sigmas)];
                return ok(to_csv(&["tau", "J_identity", "J_direct", "stderr_identity", "stderr_direct", "sigmas"], &[row])?);
            }
            let out = json!({
                "model": model.name, "tau": s.tau.tau, "J_identity": s.j_identity, "J_direct": s.j_direct,
                "stderr": {"tau": s.tau.stderr, "J_identity": s.j_identity_stderr, "J_direct": s.j_direct_stderr},
                "seeds": s.seeds, "detail": s,
            });
            ok(wrap(run, "sigint", &out)?)
        }
        Command::Delta { q, m, m_min, m_max } => {
            let (lo, hi) = match (m, m_min, m_max) {
                (Some(m), None, None) => (*m, *m),
                (None, Some(a), Some(b)) => (*a, *b),
                (None, None, None) => {
                    let b = (2.0 * q * q).floor() as i64;
                    (-b, b)
                }
                _ => return invalid("give either --m or both --m-min and --m-max"),
            };
            if (hi.unsigned_abs().max(lo.unsigned_abs()) as f64) > MAX_M_OVER_Q2 * q * q {
                return invalid(format!("|m| must stay below {MAX_M_OVER_Q2} Q^2"));
            }
            let (cal, rows) = delta_table(*q, lo, hi)?;
            if csv {
                let rows: Vec<Vec<String>> = rows.iter().map(|r| vec![r.m.to_string(), fmt12(r.value)]).collect();
                return ok(to_csv(&["m", "value"], &rows)?);
            }
            ok(wrap(run, "delta", &json!({"calibration": cal, "rows": rows}))?)
        }
        Command::Count { b, b_list, cutoff, eps, samples } => {
            let model = load_model(run)?;
            let w = model.weight()?.clone();
            let bs: Vec<f64> = match (b, b_list) {
                (Some(b), None) => vec![*b],
                (None, Some(l)) => parse_list(l, "--B-list")?,
                _ => return invalid("give exactly one of --B and --B-list"),
            };
            let cfg = MainTermConfig { prime_cutoff: *cutoff, eps: *eps, samples: *samples, seed: run.seed, ..MainTermConfig::default() };
            let rows = convergence_table(&model, &w, &bs, &cfg, run.budget)?;
            if csv {
                let cells: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| {
                        vec![
                            fmt12(r.b),
                            fmt12(r.lhs),
                            fmt12(r.s_trunc),
                            fmt12(r.j),
                            fmt12(r.main_term),
                            fmt12(r.ratio),
                            r.twisted_max_ratio.map_or(String::new(), fmt12),
                        ]
                    })
                    .collect();
                return ok(to_csv(&CONVERGENCE_COLUMNS, &cells)?);
            }
            ok(wrap(run, "count", &json!({"model": model.name, "rows": rows}))?)
        }
        Command::VerifyAll => {
            let results = run_all(run.seed);
            for r in &results {
                eprintln!("{}", r.line());
            }
            let verified = results.iter().all(|r| r.pass);
            let stdout = if csv {
                let rows: Vec<Vec<String>> =
                    results.iter().map(|r| vec![r.id.to_string(), r.name.clone(), r.pass.to_string(), r.detail.clone()]).collect();
                to_csv(&["id", "name", "pass", "detail"], &rows)?
            } else {
                let slim: Vec<_> = results.iter().map(|r| json!({"id": r.id, "name": r.name, "pass": r.pass, "detail": r.detail})).collect();
                wrap(run, "verify-all", &json!({"all_pass": verified, "criteria": slim}))?
            };
            Ok(Outcome { stdout, verified })
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Budget { .. } => 1,
        _ => 2,
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand | ErrorKind::MissingSubcommand => 64,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            use std::io::Write;
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{}", out.stdout.trim_end());
            if out.verified {
                0
            } else {
                3
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
