//! equiflow: decide equivariant fixed-point-free deformability of simplicial
//! group actions, realize prescribed fixed sets, and construct checkable
//! combinatorial witnesses.
//!
//! Exit codes: 0 when every verdict is YES/PASS, 1 when any verdict is
//! NO/FAIL, 2 when an input or pipeline error prevented a verdict.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

use equiflow_core::json::{
    canonical_json, complex_digest, complex_from_spec, complex_to_spec, displacement_from_spec,
    displacement_to_spec, ComplexSpec, DisplacementSpec,
};
use equiflow_core::{
    barycentric_subdivision, build_displacement, build_matching, cancel, catalog, conjugacy_classes,
    decide_cipd, decide_path_field, euler_report, fixed_subcomplex, morse_report, strata,
    subgroups_with_bound, verify_displacement, GComplex, GroupError, Simplex, Subcomplex, Subgroup,
    DEFAULT_MAX_GROUP_ORDER,
};

use report::{complex_summary, Format, Report};

#[derive(Parser)]
#[command(name = "equiflow", version, about = "Equivariant path-field and fixed-set decisions on simplicial complexes")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "both")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a complex, its group, and its action.
    Validate { input: String },
    /// Barycentrically subdivide and emit the resulting complex.
    Subdivide {
        input: String,
        #[arg(long, default_value_t = 1)]
        times: usize,
        /// Write the subdivided complex to a file instead of the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Orbit types, strata, and their components.
    Stratify { input: String },
    /// Euler characteristics per orbit type.
    Euler {
        input: String,
        /// Also compute Betti numbers of component closures.
        #[arg(long)]
        betti: bool,
    },
    /// The two decision procedures.
    Decide {
        #[command(subcommand)]
        which: DecideCommand,
    },
    /// Construct combinatorial witnesses.
    Construct {
        #[command(subcommand)]
        which: ConstructCommand,
    },
    /// Verify a witness against a complex.
    Verify {
        #[command(subcommand)]
        which: VerifyCommand,
    },
    /// Emit a built-in example complex.
    Catalog {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DecideCommand {
    /// Does a non-singular equivariant path field exist?
    PathField { input: String },
    /// Can the prescribed invariant subcomplex be an exact fixed set?
    Cipd {
        input: String,
        /// Fixed-set selector: input | full | vertex:N | fixed:g,... | inline:JSON.
        #[arg(long, default_value = "input")]
        fixed_set: String,
    },
}

#[derive(Subcommand)]
enum ConstructCommand {
    /// Equivariant acyclic matching with critical-cell accounting.
    Matching {
        input: String,
        /// Run the cancellation pass after the greedy construction.
        #[arg(long)]
        cancel: bool,
    },
    /// Equivariant displacement map with certified singular set.
    Displacement {
        input: String,
        #[arg(long)]
        fixed_set: Option<String>,
        /// Write the map to a file for later verification.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Check a displacement map file against the complex.
    Displacement { input: String, map_file: PathBuf },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Json(#[from] equiflow_core::json::JsonError),
    #[error("{0}")]
    Catalog(#[from] equiflow_core::CatalogError),
    #[error("{0}")]
    Complex(#[from] equiflow_core::ComplexError),
    #[error("{0}")]
    Stratify(#[from] equiflow_core::StratifyError),
    #[error("{0}")]
    Decide(#[from] equiflow_core::DecideError),
    #[error("{0}")]
    Displacement(#[from] equiflow_core::DisplacementError),
    #[error("{0}")]
    Matching(#[from] equiflow_core::MatchingError),
    #[error("invalid fixed-set selector {0:?}")]
    BadSelector(String),
    #[error("input file has no fixed_set field; pass --fixed-set")]
    MissingFixedSet,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(report) => {
            let fail = report.any_fail();
            print!("{}", report.render(cli.format));
            if fail {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            let value = json!({"error": err.to_string()});
            match cli.format {
                Format::Table => eprintln!("error: {err}"),
                _ => {
                    println!("{}", serde_json::to_string_pretty(&value).unwrap());
                    eprintln!("error: {err}");
                }
            }
            ExitCode::from(2)
        }
    }
}

/// Loads `catalog:<name>` or a file path into a complex plus optional
/// fixed set from the file.
fn load_input(input: &str) -> Result<(Arc<GComplex>, Option<Subcomplex>), CliError> {
    if let Some(name) = input.strip_prefix("catalog:") {
        return Ok((catalog(name)?, None));
    }
    let text = std::fs::read_to_string(input)
        .map_err(|source| CliError::Io { path: input.to_string(), source })?;
    let spec: ComplexSpec =
        serde_json::from_str(&text).map_err(equiflow_core::json::JsonError::from)?;
    Ok(complex_from_spec(&spec)?)
}

/// Regularizes, carrying an optional fixed set through the subdivisions.
fn regularize(
    k: Arc<GComplex>,
    fixed: Option<Subcomplex>,
) -> Result<(Arc<GComplex>, Option<Subcomplex>, usize), CliError> {
    let mut k = k;
    let mut fixed = fixed;
    let mut rounds = 0;
    while !k.is_regular() {
        let sd = barycentric_subdivision(&k);
        fixed = fixed.map(|a| {
            let ids: Vec<usize> = (0..sd.simplex_count())
                .filter(|&cid| sd.simplex(cid).vertices().iter().all(|v| a.contains(*v)))
                .collect();
            Subcomplex::from_ids(Arc::clone(&sd), ids)
                .expect("subdivided fixed set is face-closed")
        });
        k = sd;
        rounds += 1;
        if rounds > 2 {
            return Err(equiflow_core::ComplexError::RegularizationFailed.into());
        }
    }
    Ok((k, fixed, rounds))
}

fn resolve_fixed_set(
    k: &Arc<GComplex>,
    from_input: Option<Subcomplex>,
    selector: &str,
) -> Result<Subcomplex, CliError> {
    if selector == "input" {
        return from_input.ok_or(CliError::MissingFixedSet);
    }
    if selector == "full" {
        return Ok(Subcomplex::full(Arc::clone(k)));
    }
    if let Some(v) = selector.strip_prefix("vertex:") {
        let v: usize = v.parse().map_err(|_| CliError::BadSelector(selector.to_string()))?;
        let id = k
            .id_of(&Simplex::new(vec![v]).map_err(CliError::Complex)?)
            .ok_or_else(|| CliError::BadSelector(selector.to_string()))?;
        return Ok(Subcomplex::closure_of(Arc::clone(k), &[id]));
    }
    if let Some(gens) = selector.strip_prefix("fixed:") {
        let gens: Vec<usize> = gens
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| CliError::BadSelector(selector.to_string())))
            .collect::<Result<_, _>>()?;
        let h = Subgroup::generated(k.group(), &gens);
        return Ok(fixed_subcomplex(k, &h)?);
    }
    if let Some(text) = selector.strip_prefix("inline:") {
        let sets: Vec<Vec<usize>> =
            serde_json::from_str(text).map_err(equiflow_core::json::JsonError::from)?;
        let mut ids = Vec::new();
        for raw in sets {
            let s = Simplex::new(raw).map_err(CliError::Complex)?;
            let id = k
                .id_of(&s)
                .ok_or_else(|| CliError::BadSelector(selector.to_string()))?;
            ids.push(id);
        }
        return Ok(Subcomplex::closure_of(Arc::clone(k), &ids));
    }
    Err(CliError::BadSelector(selector.to_string()))
}

fn write_or_embed(
    r: &mut Report,
    out: &Option<PathBuf>,
    key: &str,
    text: String,
) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
            r.line(format!("wrote {key} to {}", path.display()));
            r.set(&format!("{key}_file"), json!(path.display().to_string()));
        }
        None => {
            r.set(key, serde_json::from_str(&text).expect("canonical json parses"));
        }
    }
    Ok(())
}

fn max_group_order() -> usize {
    std::env::var("EQUIFLOW_MAX_GROUP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_GROUP_ORDER)
}

fn run(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Validate { input } => {
            let mut r = Report::new("validate", input);
            // Build errors are the subject of this command: report FAIL
            // rather than erroring out, but only once the file parses.
            let outcome = load_input(input);
            match outcome {
                Ok((k, fixed)) => {
                    r.set("input_digest", json!(complex_digest(&k)));
                    complex_summary(&mut r, &k);
                    for w in k.manifold_warnings() {
                        r.warn(w);
                    }
                    let bound = max_group_order();
                    match subgroups_with_bound(k.group(), bound) {
                        Ok(subs) => {
                            let cc = conjugacy_classes(k.group(), &subs);
                            r.set("subgroups", json!(subs.len()));
                            r.set("subgroup_classes", json!(cc.classes.len()));
                            r.line(format!(
                                "group: {} subgroups in {} conjugacy classes",
                                subs.len(),
                                cc.classes.len()
                            ));
                        }
                        Err(GroupError::GroupTooLarge { order, bound }) => {
                            r.warn(format!(
                                "subgroup enumeration skipped: order {order} exceeds bound {bound}"
                            ));
                        }
                        Err(e) => return Err(equiflow_core::json::JsonError::from(e).into()),
                    }
                    if let Some(f) = fixed {
                        r.line(format!("fixed_set: {} simplices (closure)", f.len()));
                        r.set("fixed_set_cells", json!(f.len()));
                    }
                    r.verdict("valid", true);
                }
                Err(CliError::Complex(e)) => {
                    r.line(format!("invalid complex: {e}"));
                    r.set("invalid", json!(e.to_string()));
                    r.verdict("valid", false);
                }
                Err(CliError::Json(equiflow_core::json::JsonError::Complex(e))) => {
                    r.line(format!("invalid complex: {e}"));
                    r.set("invalid", json!(e.to_string()));
                    r.verdict("valid", false);
                }
                Err(CliError::Json(equiflow_core::json::JsonError::Group(e))) => {
                    r.line(format!("invalid group: {e}"));
                    r.set("invalid", json!(e.to_string()));
                    r.verdict("valid", false);
                }
                Err(other) => return Err(other),
            }
            Ok(r)
        }

        Command::Subdivide { input, times, out } => {
            let (mut k, _) = load_input(input)?;
            let mut r = Report::new("subdivide", input);
            r.set("input_digest", json!(complex_digest(&k)));
            let before = k.counts_by_dim();
            for _ in 0..*times {
                k = barycentric_subdivision(&k);
            }
            r.line(format!(
                "subdivided {times} time(s): cells {:?} -> {:?}, chi = {}",
                before,
                k.counts_by_dim(),
                k.chi()
            ));
            r.set("times", json!(times));
            r.set("cells_by_dim", json!(k.counts_by_dim()));
            r.set("chi", json!(k.chi()));
            let text = canonical_json(&complex_to_spec(&k, None));
            write_or_embed(&mut r, out, "complex", text)?;
            Ok(r)
        }

        Command::Stratify { input } => {
            let (k0, fixed) = load_input(input)?;
            let mut r = Report::new("stratify", input);
            r.set("input_digest", json!(complex_digest(&k0)));
            let (k, _, rounds) = regularize(k0, fixed)?;
            r.set("regularized_subdivisions", json!(rounds));
            if rounds > 0 {
                r.line(format!("regularized with {rounds} barycentric subdivision(s)"));
            }
            complex_summary(&mut r, &k);
            let s = strata(&k)?;
            report::stratification_section(&mut r, &s);
            Ok(r)
        }

        Command::Euler { input, betti } => {
            let (k0, fixed) = load_input(input)?;
            let mut r = Report::new("euler", input);
            r.set("input_digest", json!(complex_digest(&k0)));
            let (k, _, rounds) = regularize(k0, fixed)?;
            r.set("regularized_subdivisions", json!(rounds));
            let s = strata(&k)?;
            let rep = euler_report(&s, *betti);
            report::euler_section(&mut r, &k, &rep);
            Ok(r)
        }

        Command::Decide { which } => match which {
            DecideCommand::PathField { input } => {
                let (k0, fixed) = load_input(input)?;
                let mut r = Report::new("decide path-field", input);
                r.set("input_digest", json!(complex_digest(&k0)));
                let (k, _, rounds) = regularize(k0, fixed)?;
                r.set("regularized_subdivisions", json!(rounds));
                for w in k.manifold_warnings() {
                    r.warn(w);
                }
                let s = strata(&k)?;
                let d = decide_path_field(&s);
                report::path_field_section(&mut r, &k, &d);
                Ok(r)
            }
            DecideCommand::Cipd { input, fixed_set } => {
                let (k0, from_input) = load_input(input)?;
                let mut r = Report::new("decide cipd", input);
                r.set("input_digest", json!(complex_digest(&k0)));
                let (k, carried, rounds) = regularize(k0, from_input)?;
                r.set("regularized_subdivisions", json!(rounds));
                let a = resolve_fixed_set(&k, carried, fixed_set)?;
                r.line(format!("fixed set: {} simplices", a.len()));
                r.set("fixed_set_cells", json!(a.len()));
                let s = strata(&k)?;
                let d = decide_cipd(&s, &a)?;
                report::cipd_section(&mut r, &k, &d);
                Ok(r)
            }
        },

        Command::Construct { which } => match which {
            ConstructCommand::Matching { input, cancel: do_cancel } => {
                let (k0, fixed) = load_input(input)?;
                let mut r = Report::new("construct matching", input);
                r.set("input_digest", json!(complex_digest(&k0)));
                let (k, _, rounds) = regularize(k0, fixed)?;
                r.set("regularized_subdivisions", json!(rounds));
                let s = strata(&k)?;
                let mut m = build_matching(&s);
                if *do_cancel {
                    m = cancel(&s, &m);
                }
                m.validate(&s)?;
                let morse = morse_report(&s, &m);
                report::matching_section(&mut r, &k, &m, &morse);
                r.verdict("matching_valid", true);
                Ok(r)
            }
            ConstructCommand::Displacement { input, fixed_set, out } => {
                let (k0, from_input) = load_input(input)?;
                let mut r = Report::new("construct displacement", input);
                r.set("input_digest", json!(complex_digest(&k0)));
                let (k, carried, rounds) = regularize(k0, from_input)?;
                r.set("regularized_subdivisions", json!(rounds));
                let a = match fixed_set {
                    None => None,
                    Some(sel) => Some(resolve_fixed_set(&k, carried, sel)?),
                };
                let f = build_displacement(&k, a.as_ref())?;
                report::displacement_section(&mut r, &k, &f);
                let cert = verify_displacement(&k, &f);
                report::certificate_section(&mut r, &cert);
                let text = canonical_json(&displacement_to_spec(&f));
                write_or_embed(&mut r, out, "map", text)?;
                Ok(r)
            }
        },

        Command::Verify { which } => match which {
            VerifyCommand::Displacement { input, map_file } => {
                let (k0, fixed) = load_input(input)?;
                let mut r = Report::new("verify displacement", input);
                r.set("input_digest", json!(complex_digest(&k0)));
                let (k, _, rounds) = regularize(k0, fixed)?;
                r.set("regularized_subdivisions", json!(rounds));
                let text = std::fs::read_to_string(map_file).map_err(|source| CliError::Io {
                    path: map_file.display().to_string(),
                    source,
                })?;
                let spec: DisplacementSpec =
                    serde_json::from_str(&text).map_err(equiflow_core::json::JsonError::from)?;
                let f = displacement_from_spec(&k, &spec)?;
                let cert = verify_displacement(&k, &f);
                report::certificate_section(&mut r, &cert);
                Ok(r)
            }
        },

        Command::Catalog { name, out } => {
            let k = catalog(name)?;
            let mut r = Report::new("catalog", name);
            r.set("input_digest", json!(complex_digest(&k)));
            complex_summary(&mut r, &k);
            let text = canonical_json(&complex_to_spec(&k, None));
            write_or_embed(&mut r, out, "complex", text)?;
            Ok(r)
        }
    }
}
