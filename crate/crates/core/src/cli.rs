//! Command-line surface.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::{build_graph, OpenGraph};
use crate::io::symmetry_file::{first_basis_vector, parse_symmetry_str, SymmetryFile};
use crate::io::{matrix::to_rows, parse_graph_description, parse_graph_str, read_text, sha256_hex, IoError, RunReport};
use crate::isoscattering::{transplantability_verdict, low_discrepancy_samples, IsoError, VerdictOptions};
use crate::linalg::{self, c, C64};
use crate::resonances::{find_poles, PoleOptions, Rect, ResonanceError};
use crate::scattering::{eigenvalues_compact, ScatteringError, ScatteringSystem, SpectrumRequest};
use crate::symmetry::{characters_equal, ClassFunction, Quotient, QuotientBlock, SymmetryError};

#[derive(Debug, Parser)]
#[command(name = "qgs", version, about = "Scattering on quantum graphs with leads", arg_required_else_help = true)]
struct Cli {
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scattering matrix at one wavenumber.
    ComputeS {
        #[arg(long)]
        graph: PathBuf,
        /// `RE` or `RE,IM`.
        #[arg(long, value_parser = parse_complex, allow_negative_numbers = true)]
        k: C64,
    },
    /// Eigenvalues of the compact graph (leads in the file are ignored).
    Eigenvalues {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        kmin: f64,
        #[arg(long, allow_negative_numbers = true)]
        kmax: f64,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
    },
    /// Resonance poles in a rectangle of the complex k plane.
    Poles {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        re_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        re_max: f64,
        #[arg(long, allow_negative_numbers = true)]
        im_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        im_max: f64,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
    },
    /// Scattering matrix of a symmetry quotient.
    Quotient {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        symmetry: PathBuf,
        /// Representation name, or names joined by `+` for a direct sum.
        #[arg(long)]
        rep: String,
        /// Index of the basis vector used as carrier (single representation only).
        #[arg(long)]
        v: Option<usize>,
        #[arg(long, value_parser = parse_complex, allow_negative_numbers = true)]
        k: C64,
    },
    /// Conjugacy, phase and pole comparison of two open graphs.
    CheckIsoscattering {
        #[arg(long)]
        graph1: PathBuf,
        #[arg(long)]
        graph2: PathBuf,
        /// `RE_MIN,RE_MAX,IM_MIN,IM_MAX` for the pole comparison.
        #[arg(long, value_parser = parse_window, allow_negative_numbers = true, default_value = "0,8,-3,0")]
        window: Rect,
        /// Number of training wavenumbers for the conjugator.
        #[arg(long, default_value_t = 6)]
        samples: usize,
    },
    /// Compares two (sums of, possibly induced) characters.
    CheckInduced {
        #[arg(long)]
        symmetry: PathBuf,
        /// Representation names joined by `+`; subgroup representations are induced.
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("`{p}`: {e}"));
    match parts.as_slice() {
        [re] => Ok(c(num(re)?, 0.0)),
        [re, im] => Ok(c(num(re)?, num(im)?)),
        _ => Err("expected RE or RE,IM".into()),
    }
}

fn parse_window(s: &str) -> Result<Rect, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [a, b, c2, d] => Ok(Rect::new(*a, *b, *c2, *d)),
        _ => Err("expected RE_MIN,RE_MAX,IM_MIN,IM_MAX".into()),
    }
}

#[derive(Debug, Error)]
enum DomainError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error(transparent)]
    Resonance(#[from] ResonanceError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Iso(#[from] IsoError),
    #[error("{0}")]
    Invalid(String),
}

/// Result of one invocation: exit code and the two output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line `args` (program name first).
///
/// Exit codes: 0 success, 1 domain error, 2 usage error.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    configure_threads();
    let start = Instant::now();
    match execute(&cli.command) {
        Ok(Output::Report(mut report)) => {
            if cli.timing {
                report.wall_time = Some(start.elapsed().as_secs_f64());
            }
            let stderr = report.warnings.iter().map(|w| format!("warning: {w}\n")).collect();
            Outcome {
                code: 0,
                stdout: report.to_json(),
                stderr,
            }
        }
        Ok(Output::Text(text)) => Outcome {
            code: 0,
            stdout: text,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("QGS_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // A second configuration attempt in the same process is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

enum Output {
    Report(RunReport),
    Text(String),
}

struct Loaded {
    text: String,
    digest: String,
    name: String,
}

fn load(path: &Path) -> Result<Loaded, IoError> {
    let text = read_text(path)?;
    Ok(Loaded {
        digest: sha256_hex(text.as_bytes()),
        name: path.display().to_string(),
        text,
    })
}

fn load_graph(path: &Path, report: &mut RunReport) -> Result<OpenGraph, DomainError> {
    let f = load(path)?;
    report.inputs.insert(f.name.clone(), f.digest);
    Ok(parse_graph_str(&f.text, &f.name)?)
}

fn load_symmetry(path: &Path, report: &mut RunReport) -> Result<SymmetryFile, DomainError> {
    let f = load(path)?;
    report.inputs.insert(f.name.clone(), f.digest);
    Ok(parse_symmetry_str(&f.text, &f.name)?)
}

fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

fn matrix(m: &linalg::CMatrix) -> Value {
    json!(to_rows(m))
}

fn rep_names(spec: &str) -> Result<Vec<&str>, DomainError> {
    let names: Vec<&str> = spec.split('+').map(str::trim).collect();
    if names.iter().any(|n| n.is_empty()) {
        return Err(DomainError::Invalid(format!("malformed representation list `{spec}`")));
    }
    Ok(names)
}

fn execute(cmd: &Command) -> Result<Output, DomainError> {
    match cmd {
        Command::ComputeS { graph, k } => {
            let mut report = RunReport::new("compute-s");
            let og = load_graph(graph, &mut report)?;
            report.parameters = json!({ "k": complex(*k) });
            let eval = ScatteringSystem::new(&og)?.evaluate(*k)?;
            report.results = json!({
                "leads": og.leads().iter().map(|l| l.id.clone()).collect::<Vec<_>>(),
                "s": matrix(&eval.s),
                "interior_det": complex(eval.interior_det),
                "interior_min_singular": eval.interior_min_singular,
                "unitarity_defect": if k.im == 0.0 { json!(linalg::unitarity_defect(&eval.s)) } else { Value::Null },
            });
            Ok(Output::Report(report))
        }
        Command::Eigenvalues { graph, kmin, kmax, emit } => {
            let mut report = RunReport::new("eigenvalues");
            let f = load(graph)?;
            report.inputs.insert(f.name.clone(), f.digest);
            let desc = parse_graph_description(&f.text, &f.name)?;
            if !desc.leads.is_empty() {
                report.warnings.push(format!("{} leads ignored for the compact spectrum", desc.leads.len()));
            }
            let compact = build_graph(&desc).map_err(IoError::from)?;
            let spec = eigenvalues_compact(&compact, &SpectrumRequest::new(*kmin, *kmax))?;
            if *emit == Emit::Csv {
                let mut s = String::from("k,multiplicity,residual\n");
                for e in &spec.eigenvalues {
                    s.push_str(&format!("{:.16e},{},{:.16e}\n", e.k, e.multiplicity, e.residual));
                }
                return Ok(Output::Text(s));
            }
            if spec.count_verified == Some(false) {
                report.warnings.push("eigenvalue count differs from the contour count".into());
            }
            report.parameters = json!({ "kmin": kmin, "kmax": kmax });
            report.results = json!({
                "eigenvalues": spec.eigenvalues,
                "step": spec.step,
                "count_verified": spec.count_verified,
                "total_multiplicity": spec.total_multiplicity(),
            });
            Ok(Output::Report(report))
        }
        Command::Poles {
            graph,
            re_min,
            re_max,
            im_min,
            im_max,
            emit,
        } => {
            let mut report = RunReport::new("poles");
            let og = load_graph(graph, &mut report)?;
            let window = Rect::new(*re_min, *re_max, *im_min, *im_max);
            let opts = PoleOptions::default();
            let set = find_poles(&og, &window, &opts)?;
            if *emit == Emit::Csv {
                let mut s = String::from("re,im,multiplicity,residual\n");
                for p in &set.poles {
                    s.push_str(&format!("{:.16e},{:.16e},{},{:.16e}\n", p.k.re, p.k.im, p.multiplicity, p.residual));
                }
                return Ok(Output::Text(s));
            }
            report.parameters = json!({ "window": window, "options": opts });
            report.warnings.extend(set.warnings.iter().cloned());
            report.results = json!({
                "poles": set.poles,
                "bound_states": set.bound_states,
                "total_multiplicity": set.total_multiplicity(),
            });
            Ok(Output::Report(report))
        }
        Command::Quotient {
            graph,
            symmetry,
            rep,
            v,
            k,
        } => {
            let mut report = RunReport::new("quotient");
            let og = load_graph(graph, &mut report)?;
            let sym = load_symmetry(symmetry, &mut report)?;
            let names = rep_names(rep)?;
            if v.is_some() && names.len() > 1 {
                return Err(DomainError::Invalid("--v applies to a single representation".into()));
            }
            let full = sym.action(&og)?;
            let mut act = None;
            let mut blocks = Vec::new();
            for name in &names {
                let r = sym.representation(name)?;
                let this_act = match &r.subgroup {
                    Some(h) => full.restrict(h)?,
                    None => full.clone(),
                };
                if act.as_ref().is_some_and(|a| a != &this_act) {
                    return Err(DomainError::Invalid("summed representations must live on the same group".into()));
                }
                act = Some(this_act);
                let index = v.unwrap_or(0);
                if index >= r.rep.dim() {
                    return Err(DomainError::Invalid(format!(
                        "--v {index} out of range for `{name}` of dimension {}",
                        r.rep.dim()
                    )));
                }
                let mut carrier = first_basis_vector(r.rep.dim());
                carrier.swap_rows(0, index);
                blocks.push(QuotientBlock {
                    rep: r.rep,
                    multiplicity: 1,
                    v: carrier,
                });
            }
            let act = act.expect("at least one representation");
            let q = Quotient::new(&og, &act, &blocks)?.scattering(*k)?;
            report.parameters = json!({ "k": complex(*k), "rep": rep, "v": v.unwrap_or(0) });
            report.results = json!({
                "s": matrix(&q),
                "dimension": q.nrows(),
                "blocks": blocks.iter().map(|b| json!({"rep": b.rep.name(), "dim": b.rep.dim()})).collect::<Vec<_>>(),
            });
            Ok(Output::Report(report))
        }
        Command::CheckIsoscattering {
            graph1,
            graph2,
            window,
            samples,
        } => {
            let mut report = RunReport::new("check-isoscattering");
            let og1 = load_graph(graph1, &mut report)?;
            let og2 = load_graph(graph2, &mut report)?;
            if !window.is_valid() {
                return Err(DomainError::Invalid("empty or non-finite window".into()));
            }
            let mut opts = VerdictOptions::new(*window);
            opts.training = low_discrepancy_samples(*samples, 0.5, 15.0, 0.0);
            let v = transplantability_verdict(&og1, &og2, &opts)?;
            report.parameters = json!({ "window": window, "training": opts.training, "holdout": opts.holdout });
            report.warnings.extend(v.warnings.iter().cloned());
            let poles = v.poles.as_ref().map(|(a, b, pairing)| {
                json!({
                    "first": a.poles,
                    "second": b.poles,
                    "pairing": pairing,
                })
            });
            report.results = json!({
                "verdict": v.verdict,
                "description": v.verdict.describe(),
                "label": v.label,
                "conjugacy": {
                    "status": v.conjugacy.status,
                    "pi": v.conjugacy.pi.as_ref().map(matrix),
                    "residual": v.conjugacy.residual,
                    "solution_dim": v.conjugacy.solution_dim,
                },
                "isophasal": v.phases,
                "poles": poles,
            });
            Ok(Output::Report(report))
        }
        Command::CheckInduced { symmetry, left, right } => {
            let mut report = RunReport::new("check-induced");
            let sym = load_symmetry(symmetry, &mut report)?;
            let group = sym.group()?;
            let total = |spec: &str| -> Result<ClassFunction, DomainError> {
                let mut acc: Option<ClassFunction> = None;
                for name in rep_names(spec)? {
                    let chi = sym.representation(name)?.character_on(&group)?;
                    acc = Some(match acc {
                        None => chi,
                        Some(a) => a.add(&chi)?,
                    });
                }
                Ok(acc.expect("non-empty list"))
            };
            let a = total(left)?;
            let b = total(right)?;
            let classes = group.conjugacy_classes();
            let on_classes = |chi: &ClassFunction| -> Value {
                Value::Object(
                    classes
                        .iter()
                        .map(|cl| (group.name(cl[0]).to_string(), complex(chi.value(cl[0]))))
                        .collect(),
                )
            };
            report.parameters = json!({ "left": left, "right": right });
            report.results = json!({
                "equal": characters_equal(&a, &b, crate::symmetry::character::CHARACTER_TOL)?,
                "left": on_classes(&a),
                "right": on_classes(&b),
            });
            Ok(Output::Report(report))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_arguments_is_usage_error() {
        let out = run(["qgs"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("Usage"));
    }

    #[test]
    fn unknown_flag_lists_valid_ones() {
        let out = run(["qgs", "compute-s", "--graf", "x"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("--graph"));
    }

    #[test]
    fn missing_file_is_domain_error() {
        let out = run(["qgs", "compute-s", "--graph", "/nonexistent.json", "--k", "1"]);
        assert_eq!(out.code, 1);
    }

    #[test]
    fn complex_arguments() {
        assert_eq!(parse_complex("1.5").unwrap(), c(1.5, 0.0));
        assert_eq!(parse_complex("1,-0.25").unwrap(), c(1.0, -0.25));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_window("0,8,-3").is_err());
    }
}
