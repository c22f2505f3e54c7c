//! `shellsat`: decide, certify and verify shellability, collapsibility and
//! weak K₃-saturation from the command line.
//!
//! Exit codes: 0 the property holds (or the certificate verifies), 1 it is
//! refuted, 2 the search budget ran out, 3 bad input or usage.

mod json;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use shellsat_core::certificates::{
    saturation_to_collapse, shelling_to_saturated_tree, CertificateError,
};
use shellsat_core::collapse::{collapsible_after_removing, is_collapsible, verify_collapse};
use shellsat_core::format::{self, CertificateKind};
use shellsat_core::harness::{write_corpus, GeneratorSpec, Mode};
use shellsat_core::shelling::{find_shelling, verify_shelling};
use shellsat_core::wsat::{decide_wsat_eq_treesize, verify_saturation, wsat_number};
use shellsat_core::{
    run_chain, Budget, ChainError, Complex, Graph, Outcome, Verdict, WsatError, DEFAULT_BUDGET,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Code {
    Holds = 0,
    Refuted = 1,
    Budget = 2,
    Input = 3,
}

#[derive(Parser)]
#[command(
    name = "shellsat",
    version,
    about = "Shellings, collapses and weak K3-saturation of simplicial complexes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Complex in `.sc` format: one facet per line.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
}

#[derive(Args)]
struct Search {
    /// Search node budget.
    #[arg(long, value_name = "N", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Verify this certificate instead of searching.
    #[arg(long, value_name = "FILE")]
    cert: Option<PathBuf>,
    /// Write the certificate found here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Print a JSON summary instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenMode {
    Random,
    Enumerate,
    Subdivide,
}

#[derive(Subcommand)]
enum Command {
    /// Print the f-vector, reduced Euler characteristic, dimension, purity,
    /// flagness and connectivity.
    Info {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        json: bool,
    },
    /// Write the iterated barycentric subdivision.
    Sd {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "K", default_value_t = 1)]
        depth: u32,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Decide shellability, or verify a shelling certificate.
    Shell {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        search: Search,
    },
    /// Decide collapsibility (after deleting `--k` triangles, if given), or
    /// verify a collapse certificate.
    Collapse {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "N")]
        k: Option<usize>,
        #[command(flatten)]
        search: Search,
    },
    /// Decide whether some spanning tree of the 1-skeleton is weakly
    /// K3-saturated, or verify a saturation certificate.
    Wsat {
        #[command(flatten)]
        input: Input,
        /// Also compute the exact weak saturation number.
        #[arg(long)]
        number: bool,
        #[command(flatten)]
        search: Search,
    },
    /// Turn a shelling into a saturating tree, or a saturating tree into a
    /// collapse, depending on the certificate given.
    Convert {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "FILE")]
        cert: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run shelling search, both conversions and every verifier.
    Chain {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "N", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Write a corpus directory of generated complexes.
    Gen {
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, value_name = "N", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "random")]
        mode: GenMode,
        #[arg(long, value_name = "N")]
        vertices: usize,
        #[arg(long, value_name = "N")]
        triangles: usize,
        /// Subdivision depth for `--mode subdivide`.
        #[arg(long, value_name = "K", default_value_t = 1)]
        depth: u32,
        /// Instances to write; enumeration writes all by default.
        #[arg(long, value_name = "N")]
        count: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(Code::Input as u8);
        }
    };
    let code = run(cli).unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        Code::Input
    });
    ExitCode::from(code as u8)
}

fn run(cli: Cli) -> Result<Code> {
    match cli.command {
        Command::Info { input, json } => info(&load(&input.input)?, json),
        Command::Sd { input, depth, out } => {
            let k = load(&input.input)?;
            let sd = (0..depth).fold(k, |k, _| k.barycentric_subdivision());
            emit(out.as_deref(), &format::write_sc(&sd))?;
            Ok(Code::Holds)
        }
        Command::Shell { input, search } => shell(&load(&input.input)?, &search),
        Command::Collapse { input, k, search } => collapse(&load(&input.input)?, k, &search),
        Command::Wsat {
            input,
            number,
            search,
        } => wsat(&load(&input.input)?, number, &search),
        Command::Convert { input, cert, out } => {
            convert(&load(&input.input)?, &cert, out.as_deref())
        }
        Command::Chain {
            input,
            budget,
            out,
            json,
        } => chain(&load(&input.input)?, budget, out.as_deref(), json),
        Command::Gen {
            out,
            seed,
            mode,
            vertices,
            triangles,
            depth,
            count,
        } => {
            let mode = match mode {
                GenMode::Random => Mode::RandomPure2,
                GenMode::Enumerate => Mode::EnumerateAll,
                GenMode::Subdivide => Mode::SubdivideDepth(depth),
            };
            let count = count.unwrap_or(if mode == Mode::EnumerateAll {
                usize::MAX
            } else {
                10
            });
            let spec = GeneratorSpec {
                seed,
                n_vertices: vertices,
                n_triangles: triangles,
                mode,
            };
            let written = write_corpus(&out, &spec, count)?;
            println!("wrote {written} complexes to {}", out.display());
            Ok(Code::Holds)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(path: &Path) -> Result<Complex> {
    let text = read(path)?;
    let parsed = format::parse_sc(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    for line in parsed.absorbed_lines {
        eprintln!(
            "warning: {}: line {line}: face is absorbed by another face",
            path.display()
        );
    }
    Ok(parsed.complex)
}

/// Reads a certificate, checking its kind and warning when its header
/// names a different complex.
fn load_cert(path: &Path, want: CertificateKind, fingerprint: &str) -> Result<String> {
    let text = read(path)?;
    match format::certificate_kind(&text) {
        Some(kind) if kind == want => {}
        Some(kind) => bail!(
            "{}: expected a {} certificate, found a {} certificate",
            path.display(),
            want.name(),
            kind.name()
        ),
        None => bail!("{}: not a certificate file", path.display()),
    }
    let header = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .unwrap_or_default();
    if !header.trim_end().ends_with(fingerprint) {
        eprintln!(
            "warning: {}: certificate header names another complex",
            path.display()
        );
    }
    Ok(text)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .context("cannot write to stdout"),
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn info(k: &Complex, as_json: bool) -> Result<Code> {
    let view = json::Info::of(k);
    if as_json {
        print!("{}", json::render(&view));
        return Ok(Code::Holds);
    }
    println!("fingerprint: {}", view.fingerprint);
    println!("f-vector: {}", k.f_vector());
    println!("dimension: {}", view.dimension);
    println!(
        "reduced euler characteristic: {}",
        view.reduced_euler_characteristic
    );
    println!("pure: {}", yes(view.pure));
    println!("flag: {}", view.flag.map_or("n/a", yes));
    println!("connected: {}", yes(view.connected));
    Ok(Code::Holds)
}

/// Prints a decision and writes its certificate to `--out`.
fn report(
    command: &'static str,
    search: &Search,
    code: Code,
    detail: String,
    nodes: u64,
    cert: Option<String>,
) -> Result<Code> {
    if let (Some(path), Some(text)) = (&search.out, &cert) {
        emit(Some(path), text)?;
    }
    if search.json {
        let verdict = match code {
            Code::Holds => "holds",
            Code::Refuted => "refuted",
            _ => "budget-exceeded",
        };
        let view = json::Decision {
            command,
            verdict,
            detail,
            nodes,
            certificate: cert,
        };
        print!("{}", json::render(&view));
    } else {
        println!("{detail}");
        if let (Some(path), Some(_)) = (&search.out, &cert) {
            println!("certificate written to {}", path.display());
        }
    }
    Ok(code)
}

fn verdict_code(verdict: &Verdict, what: &str) -> (Code, String) {
    match verdict {
        Verdict::Accepted => (Code::Holds, format!("valid {what} certificate")),
        Verdict::Rejected { index, reason } => (
            Code::Refuted,
            format!("invalid {what} certificate: item {index}: {reason}"),
        ),
    }
}

fn budget_detail(budget: &Budget) -> String {
    format!("search budget exceeded after {} nodes", budget.used())
}

fn shell(k: &Complex, search: &Search) -> Result<Code> {
    let fp = k.fingerprint();
    if let Some(path) = &search.cert {
        let text = load_cert(path, CertificateKind::Shelling, &fp)?;
        let cert =
            format::parse_shelling(k, &text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
        let (code, detail) = verdict_code(&verify_shelling(k, &cert)?, "shelling");
        return report("shell", search, code, detail, 0, None);
    }
    let mut budget = Budget::new(search.budget);
    match find_shelling(k, &mut budget)? {
        Outcome::Found(cert) => {
            let text = format::write_shelling(k, &cert);
            report(
                "shell",
                search,
                Code::Holds,
                "shellable".into(),
                budget.used(),
                Some(text),
            )
        }
        Outcome::Refuted => report(
            "shell",
            search,
            Code::Refuted,
            "not shellable".into(),
            budget.used(),
            None,
        ),
        Outcome::BudgetExceeded => report(
            "shell",
            search,
            Code::Budget,
            budget_detail(&budget),
            budget.used(),
            None,
        ),
    }
}

fn collapse(k: &Complex, removals: Option<usize>, search: &Search) -> Result<Code> {
    let fp = k.fingerprint();
    if let Some(path) = &search.cert {
        let text = load_cert(path, CertificateKind::Collapse, &fp)?;
        let cert =
            format::parse_collapse(k, &text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
        let (mut code, mut detail) = verdict_code(&verify_collapse(k, &cert)?, "collapse");
        if code == Code::Holds && !cert.targets_point() {
            (code, detail) = (
                Code::Refuted,
                "valid collapse, but the target is not a point".into(),
            );
        }
        if let Some(n) =
            removals.filter(|&n| code == Code::Holds && n != cert.removed_triangles.len())
        {
            (code, detail) = (
                Code::Refuted,
                format!(
                    "certificate removes {} triangles, not {n}",
                    cert.removed_triangles.len()
                ),
            );
        }
        return report("collapse", search, code, detail, 0, None);
    }
    let mut budget = Budget::new(search.budget);
    let outcome = match removals {
        None => is_collapsible(k, &mut budget),
        Some(n) => collapsible_after_removing(k, n, &mut budget)?,
    };
    let holds = match removals {
        None => "collapsible".to_string(),
        Some(1) => "collapsible after removing 1 triangle".to_string(),
        Some(n) => format!("collapsible after removing {n} triangles"),
    };
    match outcome {
        Outcome::Found(cert) => {
            let text = format::write_collapse(k, &cert);
            report(
                "collapse",
                search,
                Code::Holds,
                holds,
                budget.used(),
                Some(text),
            )
        }
        Outcome::Refuted => report(
            "collapse",
            search,
            Code::Refuted,
            format!("not {holds}"),
            budget.used(),
            None,
        ),
        Outcome::BudgetExceeded => report(
            "collapse",
            search,
            Code::Budget,
            budget_detail(&budget),
            budget.used(),
            None,
        ),
    }
}

fn host_graph(k: &Complex) -> Graph {
    if k.dimension() > 1 {
        eprintln!(
            "note: using the 1-skeleton of a {}-dimensional complex",
            k.dimension()
        );
    }
    Graph::one_skeleton(k)
}

fn wsat(k: &Complex, number: bool, search: &Search) -> Result<Code> {
    let host = host_graph(k);
    let fp = host.to_complex().fingerprint();
    if let Some(path) = &search.cert {
        let text = load_cert(path, CertificateKind::Saturation, &fp)?;
        let cert = format::parse_saturation(&host, &text)
            .map_err(|e| anyhow!("{}: {e}", path.display()))?;
        let (code, mut detail) = verdict_code(&verify_saturation(&host, &cert)?, "saturation");
        if code == Code::Holds {
            let tree = cert.start.num_edges() + 1 == host.num_vertices();
            detail.push_str(&format!(
                " ({} start edges, spanning tree: {})",
                cert.start.num_edges(),
                yes(tree)
            ));
        }
        return report("wsat", search, code, detail, 0, None);
    }
    let mut budget = Budget::new(search.budget);
    let (code, mut detail, cert) = match decide_wsat_eq_treesize(&host, &mut budget)? {
        Outcome::Found(cert) => (
            Code::Holds,
            "a spanning tree is weakly K3-saturated".to_string(),
            Some(format::write_saturation(&host, &cert)),
        ),
        Outcome::Refuted => (
            Code::Refuted,
            "no spanning tree is weakly K3-saturated".into(),
            None,
        ),
        Outcome::BudgetExceeded => {
            return report(
                "wsat",
                search,
                Code::Budget,
                budget_detail(&budget),
                budget.used(),
                None,
            )
        }
    };
    if number {
        match wsat_number(&host, &mut budget) {
            Ok(w) => detail.push_str(&format!("; wsat = {w}")),
            Err(WsatError::BudgetExceeded) => {
                return report(
                    "wsat",
                    search,
                    Code::Budget,
                    budget_detail(&budget),
                    budget.used(),
                    None,
                )
            }
            Err(e) => return Err(e.into()),
        }
    }
    report("wsat", search, code, detail, budget.used(), cert)
}

fn convert(k: &Complex, cert_path: &Path, out: Option<&Path>) -> Result<Code> {
    let text = read(cert_path)?;
    let fail = |e: CertificateError| match e {
        CertificateError::InvalidShelling(_)
        | CertificateError::InvalidSaturation(_)
        | CertificateError::NotATree { .. } => {
            eprintln!("{}: {e}", cert_path.display());
            Ok(Code::Refuted)
        }
        other => Err(anyhow::Error::new(other)),
    };
    let parse_err = |e: format::ParseError| anyhow!("{}: {e}", cert_path.display());
    let kind = format::certificate_kind(&text);
    let expected = match kind {
        Some(CertificateKind::Saturation) => Graph::one_skeleton(k).to_complex().fingerprint(),
        _ => k.fingerprint(),
    };
    let text = match kind {
        Some(kind) => load_cert(cert_path, kind, &expected)?,
        None => bail!("{}: not a certificate file", cert_path.display()),
    };
    let output = match kind {
        Some(CertificateKind::Shelling) => {
            let shelling = format::parse_shelling(k, &text).map_err(parse_err)?;
            match shelling_to_saturated_tree(k, &shelling) {
                Ok(sat) => format::write_saturation(&Graph::one_skeleton(k), &sat),
                Err(e) => return fail(e),
            }
        }
        Some(CertificateKind::Saturation) => {
            let host = Graph::one_skeleton(k);
            let sat = format::parse_saturation(&host, &text).map_err(parse_err)?;
            match saturation_to_collapse(k, &sat) {
                Ok(col) => format::write_collapse(k, &col),
                Err(e) => return fail(e),
            }
        }
        _ => bail!(
            "{}: a collapse certificate is the end of the chain",
            cert_path.display()
        ),
    };
    emit(out, &output)?;
    Ok(Code::Holds)
}

fn chain(k: &Complex, budget: u64, out: Option<&Path>, as_json: bool) -> Result<Code> {
    let report = match run_chain(k, &mut Budget::new(budget)) {
        Ok(r) => r,
        Err(ChainError::BudgetExceeded(stage)) => {
            eprintln!("search budget exceeded during the {} stage", stage.name());
            return Ok(Code::Budget);
        }
        Err(ChainError::Certificate(e)) => return Err(e.into()),
    };
    let text = if as_json {
        json::render(&json::Chain::of(&report))
    } else {
        format::write_report(&report)
    };
    emit(out, &text)?;
    Ok(if report.all_passed() {
        Code::Holds
    } else {
        Code::Refuted
    })
}
