//! Command dispatch for the `ehrhart` binary.
//!
//! Every command produces a human-readable table, a JSON payload and a
//! verdict. Exit codes: 0 success, 1 a check came out false, 2 bad input,
//! 3 violated internal invariant.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ehrhart_core::ehrhart::{check_unimodality, polytope_profile, EhrhartProfile};
use ehrhart_core::exactmath::{format_rat, format_vec, Rat};
use ehrhart_core::families::hibi_counterexample;
use ehrhart_core::fan::{Fan, PsiK};
use ehrhart_core::io::Document;
use ehrhart_core::polytope::LatticePolytope;
use ehrhart_core::stringy::{stringy_report, verify_identities, BoundaryTriangulation};
use ehrhart_core::Error;

#[derive(Debug, Parser)]
#[command(name = "ehrhart", version, about = "Exact Ehrhart and δ-vector computations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format on standard output.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,

    /// Also write the JSON payload to this file.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,

    /// Log progress on standard error.
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lattice points in mP (or its interior).
    Count {
        /// Input document: a path, `-` for stdin, or inline JSON.
        input: String,
        #[arg(short = 'm', long = "m")]
        m: u64,
        #[arg(long)]
        interior: bool,
    },
    /// Ehrhart polynomial, counts and δ-vector.
    Ehrhart { input: String },
    /// δ-vector with symmetry and unimodality flags.
    Delta { input: String },
    /// Reflexivity verdict with certificate.
    Reflexive { input: String },
    /// Polar polytope over the dual lattice.
    Polar { input: String },
    /// Completeness and Gorenstein diagnosis of a fan.
    FanCheck { input: String },
    /// δ from a pulling triangulation, Box points, and the identity report.
    DeltaStringy {
        input: String,
        /// Pulling order as ray indices, e.g. `2,0,1`; unlisted rays follow
        /// in fan order.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
        /// Truncation order (default d + 3).
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Full identity suite.
    Verify {
        input: String,
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Member of the non-unimodal reflexive family.
    Family {
        #[arg(short = 'm', long = "m")]
        m: usize,
        /// Include the closed-form δ-vector.
        #[arg(long)]
        expected: bool,
    },
    /// Unimodality report over every `*.json` polytope in a directory.
    HibiScan { dir: PathBuf },
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub json: Value,
    /// `false` when the command is a check and the answer is negative.
    pub verdict: bool,
}

/// A failed command with its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Internal(_) | Error::NotEhrhartConsistent(_) => 3,
            Error::NotReflexive { .. }
            | Error::InvalidFan(_)
            | Error::NoSupportFunction { .. }
            | Error::NonIntegralSupport { .. }
            | Error::OriginNotInterior
            | Error::PolarNotLattice { .. } => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

pub fn read_document(input: &str) -> Result<Document, Failure> {
    let text = if input.trim_start().starts_with('{') {
        input.to_string()
    } else if input == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| input_failure(format!("stdin: {e}")))?
    } else {
        fs::read_to_string(input).map_err(|e| input_failure(format!("{input}: {e}")))?
    };
    let doc = Document::parse(&text)?;
    log::debug!("parsed document of dimension {}", doc.lattice.dim);
    Ok(doc)
}

fn vec_text(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("({})", parts.join(", "))
}

fn profile_text(p: &EhrhartProfile, with_table: bool) -> String {
    let mut s = String::new();
    if with_table {
        let _ = writeln!(s, "{:>4}  {:>12}", "m", "f(m)");
        for (m, c) in p.counts.iter().enumerate() {
            let _ = writeln!(s, "{m:>4}  {c:>12}");
        }
        let terms: Vec<String> = (0..=p.d)
            .map(|i| format!("{}·m^{i}", format_rat(&p.poly.coeff(i))))
            .collect();
        let _ = writeln!(s, "f(m) = {}", terms.join(" + "));
    }
    let u = p.unimodality();
    let _ = writeln!(s, "δ = {}", vec_text(&p.delta));
    let r = p.r.map_or("-".to_string(), |r| r.to_string());
    let _ = writeln!(s, "ℓ = {}, r = {r}", p.ell);
    let _ = writeln!(
        s,
        "symmetric: {}, unimodal: {}, descents: {:?}, weak inequality: {}",
        p.is_symmetric(),
        u.unimodal,
        u.descents,
        u.weak_ineq_holds
    );
    s
}

fn default_truncation(fan: &Fan, t: Option<usize>) -> usize {
    t.unwrap_or(fan.dim() + 3)
}

fn pulling_order(fan: &Fan, order: Option<&[usize]>) -> Result<Option<Vec<Vec<Rat>>>, Failure> {
    let Some(order) = order else { return Ok(None) };
    let n = fan.rays().len();
    let mut seen = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for &i in order {
        if i >= n || seen[i] {
            return Err(input_failure(format!("--order: bad or repeated ray index {i}")));
        }
        seen[i] = true;
        out.push(fan.rays()[i].ambient.clone());
    }
    for (i, s) in seen.iter().enumerate() {
        if !s {
            out.push(fan.rays()[i].ambient.clone());
        }
    }
    Ok(Some(out))
}

fn polytope_from(input: &str) -> Result<LatticePolytope, Failure> {
    Ok(read_document(input)?.polytope()?)
}

pub fn execute(command: &Command) -> Result<Outcome, Failure> {
    log::info!("running {command:?}");
    match command {
        Command::Count { input, m, interior } => {
            let p = polytope_from(input)?;
            let n = p.count_points(*m, *interior)?;
            Ok(Outcome {
                text: format!("{n}\n"),
                json: json!({"m": m, "interior": interior, "count": n}),
                verdict: true,
            })
        }
        Command::Ehrhart { input } | Command::Delta { input } => {
            let p = polytope_from(input)?;
            let prof = polytope_profile(&p)?;
            let table = matches!(command, Command::Ehrhart { .. });
            Ok(Outcome {
                text: profile_text(&prof, table),
                json: serde_json::to_value(prof.to_json()).expect("serialisable"),
                verdict: true,
            })
        }
        Command::Reflexive { input } => {
            let p = polytope_from(input)?;
            let report = p.is_reflexive();
            let reasons: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
            let mut text = format!("reflexive: {}\n", report.reflexive);
            for r in &reasons {
                let _ = writeln!(text, "  {r}");
            }
            Ok(Outcome {
                text,
                json: json!({"reflexive": report.reflexive, "certificate": reasons}),
                verdict: report.reflexive,
            })
        }
        Command::Polar { input } => {
            let p = polytope_from(input)?;
            let polar = p.polar()?;
            let doc = serde_json::to_value(Document::for_polytope(&polar)).expect("serialisable");
            Ok(Outcome {
                text: format!("{}\n", serde_json::to_string_pretty(&doc).expect("serialisable")),
                json: doc,
                verdict: true,
            })
        }
        Command::FanCheck { input } => {
            let doc = read_document(input)?;
            let fan = match doc.fan() {
                Ok(f) => f,
                Err(e @ (Error::InvalidFan(_) | Error::NotReflexive { .. })) => {
                    return Ok(Outcome {
                        text: format!("complete: false\n  {e}\n"),
                        json: json!({"complete": false, "gorenstein": null, "diagnosis": e.to_string()}),
                        verdict: false,
                    })
                }
                Err(e) => return Err(e.into()),
            };
            let simplicial = fan.is_simplicial();
            let (gorenstein, diagnosis, u) = match PsiK::compute(&fan) {
                Ok(psi) => {
                    let u: Vec<String> =
                        (0..fan.cones().len()).map(|k| format_vec(&psi.ambient(&fan, k))).collect();
                    (true, None, u)
                }
                Err(e @ (Error::NoSupportFunction { .. } | Error::NonIntegralSupport { .. })) => {
                    (false, Some(e.to_string()), Vec::new())
                }
                Err(e) => return Err(e.into()),
            };
            let mut text = format!(
                "complete: true ({} rays, {} maximal cones, simplicial: {simplicial})\ngorenstein: {gorenstein}\n",
                fan.rays().len(),
                fan.cones().len()
            );
            if let Some(d) = &diagnosis {
                let _ = writeln!(text, "  {d}");
            }
            for (k, u) in u.iter().enumerate() {
                let _ = writeln!(text, "  u[{k}] = {u}");
            }
            Ok(Outcome {
                text,
                json: json!({
                    "complete": true,
                    "simplicial": simplicial,
                    "gorenstein": gorenstein,
                    "diagnosis": diagnosis,
                    "u": u,
                }),
                verdict: gorenstein,
            })
        }
        Command::DeltaStringy { input, order, truncation } => {
            let fan = read_document(input)?.fan()?;
            let psi = PsiK::compute(&fan)?;
            let order = pulling_order(&fan, order.as_deref())?;
            let tri = BoundaryTriangulation::pulling(&fan, &psi, order.as_deref())?;
            let report = stringy_report(&fan, &psi, &tri, default_truncation(&fan, *truncation))?;
            let ids = &report.identities;
            let ok = ids.lattice_sum && ids.second_proof && ids.enumerative_match && ids.symmetry;
            let mut text = format!(
                "facets: {}\nh_T = {}\nδ = {}\n",
                report.facets,
                vec_text(&report.h_t),
                vec_text(&report.delta)
            );
            for b in &report.boxes {
                let _ = writeln!(text, "  Box{:?}: ({}) shift {}", b.face, b.point.join(", "), b.shift);
            }
            let _ = writeln!(
                text,
                "identities: lattice_sum {}, second_proof {}, enumerative_match {}, symmetry {}",
                ids.lattice_sum, ids.second_proof, ids.enumerative_match, ids.symmetry
            );
            Ok(Outcome {
                text,
                json: serde_json::to_value(&report).expect("serialisable"),
                verdict: ok,
            })
        }
        Command::Verify { input, truncation } => {
            let fan = read_document(input)?.fan()?;
            let psi = PsiK::compute(&fan)?;
            let tri = BoundaryTriangulation::pulling(&fan, &psi, None)?;
            let m = default_truncation(&fan, *truncation);
            let r = verify_identities(&fan, &psi, &tri, m)?;
            let mut text = format!("truncation: t^{}\n", m + 1);
            for (name, c) in [
                ("(i) lattice sum", &r.lattice_sum),
                ("(ii) second proof", &r.second_proof),
                ("(iii) enumerative match", &r.enumerative_match),
                ("(iv) symmetry", &r.symmetry),
            ] {
                let status = if c.pass { "pass".to_string() } else { format!("FAIL at t^{}", c.first_difference.unwrap_or(0)) };
                let _ = writeln!(text, "{name:<26} {status}");
            }
            let _ = writeln!(text, "δ (enumeration)   = {}", vec_text(&r.delta_enumerative));
            let _ = writeln!(text, "δ (triangulation) = {}", vec_text(&r.delta_triangulation));
            Ok(Outcome {
                text,
                json: serde_json::to_value(&r).expect("serialisable"),
                verdict: r.all_pass(),
            })
        }
        Command::Family { m, expected } => {
            let inst = hibi_counterexample(*m)?;
            let mut doc = serde_json::to_value(Document::for_polytope(&inst.polytope)).expect("serialisable");
            if *expected {
                doc["expected_delta"] = json!(inst.expected_delta);
            }
            Ok(Outcome {
                text: format!("{}\n", serde_json::to_string_pretty(&doc).expect("serialisable")),
                json: doc,
                verdict: true,
            })
        }
        Command::HibiScan { dir } => hibi_scan(dir),
    }
}

fn hibi_scan(dir: &Path) -> Result<Outcome, Failure> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| input_failure(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut rows = Vec::new();
    let mut text = String::new();
    for path in &paths {
        let name = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
        let p = polytope_from(&path.to_string_lossy())?;
        let reflexive = p.is_reflexive().reflexive;
        let prof = polytope_profile(&p)?;
        let u = check_unimodality(&prof.delta, prof.d);
        let flag = if u.unimodal { "" } else { "  <-- not unimodal" };
        let _ = writeln!(
            text,
            "{name}: d={} reflexive={reflexive} δ={} symmetric={} weak={} unimodal={} descents={:?}{flag}",
            prof.d,
            vec_text(&prof.delta),
            prof.is_symmetric(),
            u.weak_ineq_holds,
            u.unimodal,
            u.descents,
        );
        rows.push(json!({
            "file": name,
            "dim": prof.d,
            "reflexive": reflexive,
            "delta": prof.delta,
            "symmetric": prof.is_symmetric(),
            "weak_ineq_holds": u.weak_ineq_holds,
            "unimodal": u.unimodal,
            "descents": u.descents,
        }));
    }
    Ok(Outcome {
        text,
        json: Value::Array(rows),
        verdict: true,
    })
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs a parsed command line without touching the process streams.
pub fn run(cli: &Cli) -> Run {
    match execute(&cli.command) {
        Ok(out) => {
            if let Some(path) = &cli.json {
                let body = serde_json::to_string_pretty(&out.json).expect("serialisable");
                if let Err(e) = fs::write(path, body + "\n") {
                    return Run {
                        code: 2,
                        stdout: String::new(),
                        stderr: format!("error: {}: {e}\n", path.display()),
                    };
                }
            }
            let stdout = match cli.format {
                Format::Text => out.text,
                Format::Json => serde_json::to_string_pretty(&out.json).expect("serialisable") + "\n",
            };
            Run {
                code: i32::from(!out.verdict),
                stdout,
                stderr: String::new(),
            }
        }
        Err(f) => Run {
            code: f.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message),
        },
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn run_args<I, T>(args: I) -> Run
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Run { code, stdout: text, stderr: String::new() }
            } else {
                Run { code, stdout: String::new(), stderr: text }
            }
        }
    }
}
