//! `agc`: validate containment scenarios, simulate them, extract candidate
//! ontologies from text and compare them with the coded ontology.
//!
//! Exit status is 0 on success, 1 when the command found something (axiom
//! violations, failed containment, an imperfect comparison, an unknown
//! concept) and 2 on usage, I/O or parse errors.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use agc_core::axioms::{validate_scenario, Violation};
use agc_core::corpus::{
    compare, extract, load_dir, ExtractOptions, Parallelism, TokenizerConfig, Window,
    DEFAULT_MIN_COUNT, DEFAULT_MIN_WEIGHT, DEFAULT_TOP_N,
};
use agc_core::dsl::{
    candidate_from_document, candidate_to_document, concept_graph_from_document,
    concept_graph_to_document, parse, serialize, trace_to_document, Document, Scenario,
};
use agc_core::ontology::{canonical_ontology, ConceptCode, ConceptGraph};
use agc_core::sim::{containment_verdict, run, SimError, Trace};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "agc", version, about = "Containment ontology toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    /// One JSON object per line.
    Records,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario against the axioms.
    Validate {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a scenario's events and report the containment verdict.
    Simulate {
        scenario: PathBuf,
        /// Write the canonical trace document here.
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Build a candidate ontology from a directory of .txt files.
    Extract {
        corpus: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOP_N)]
        top_n: usize,
        #[arg(long, default_value_t = DEFAULT_MIN_COUNT)]
        min_count: u64,
        #[arg(long, default_value_t = DEFAULT_MIN_WEIGHT)]
        min_weight: u64,
        /// `sentence` or `fixed:N`.
        #[arg(long, default_value = "sentence", value_parser = parse_window)]
        window: Window,
        /// Replacement stopword list, one word per line.
        #[arg(long)]
        stopwords: Option<PathBuf>,
        /// Count on a single thread.
        #[arg(long)]
        serial: bool,
        /// Output path (default: standard output).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Score a candidate ontology against the coded ontology.
    Compare {
        candidate: PathBuf,
        /// Concepts document to compare against (default: the built-in ontology).
        #[arg(long)]
        canonical: Option<PathBuf>,
    },
    /// Show one concept with its parent and children.
    Query {
        code: String,
        #[arg(long)]
        canonical: Option<PathBuf>,
    },
    /// Write the built-in coded ontology as a concepts document.
    Canon {
        /// Output path (default: standard output).
        out: Option<PathBuf>,
    },
}

fn parse_window(s: &str) -> Result<Window, String> {
    if s == "sentence" {
        return Ok(Window::Sentence);
    }
    match s.strip_prefix("fixed:").map(str::parse::<usize>) {
        Some(Ok(n)) if n > 0 => Ok(Window::Fixed(n)),
        _ => Err(format!(
            "expected `sentence` or `fixed:N` with N >= 1, found {s:?}"
        )),
    }
}

/// A failure that ends the command with status 2.
struct Failure(String);

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn status(findings: bool) -> ExitCode {
    if findings {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn read_document(path: &Path) -> Result<Document, Failure> {
    parse(&read_text(path)?).map_err(|e| Failure(format!("{}:\n{e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    let doc = read_document(path)?;
    Scenario::from_document(&doc).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_graph(path: Option<&Path>) -> Result<ConceptGraph, Failure> {
    match path {
        None => Ok(canonical_ontology()),
        Some(p) => concept_graph_from_document(&read_document(p)?)
            .map_err(|e| Failure(format!("{}: {e}", p.display()))),
    }
}

fn json(s: &str) -> String {
    serde_json::Value::from(s).to_string()
}

fn violation_record(v: &Violation) -> String {
    format!(
        "{{\"axiom\":{},\"subject\":{},\"message\":{}}}",
        json(v.axiom.code()),
        json(&v.subject.to_string()),
        json(&v.message)
    )
}

fn validate(path: &Path, format: Format) -> CmdResult {
    let scenario = load_scenario(path)?;
    let violations = validate_scenario(&scenario.world, &scenario.events)?;
    let mut out = String::new();
    for v in &violations {
        match format {
            Format::Text => out.push_str(&format!("{v}\n")),
            Format::Records => out.push_str(&format!("{}\n", violation_record(v))),
        }
    }
    match format {
        Format::Text => out.push_str(&format!("{} violations\n", violations.len())),
        Format::Records => eprintln!("{} violations", violations.len()),
    }
    write_output(None, &out)?;
    Ok(status(!violations.is_empty()))
}

fn state_table(trace: &Trace) -> String {
    let mut out = format!(
        "{:>4}  {:<10} {:<12} {:>3}  {}\n",
        "seq", "event", "phase", "k", "equilibrium"
    );
    for (e, s) in trace.events.iter().zip(&trace.states) {
        out.push_str(&format!(
            "{:>4}  {:<10} {:<12} {:>3}  {}\n",
            e.seq,
            e.kind.name(),
            s.phase.to_string(),
            s.k(),
            s.equilibrium
        ));
    }
    if let Some(h) = &trace.halt {
        if let Some(e) = &h.event {
            out.push_str(&format!(
                "halted at event {}: {}: {}\n",
                e.seq,
                h.error.code(),
                h.error
            ));
        }
    }
    out
}

fn simulate_records(trace: &Trace) -> String {
    let mut out = String::new();
    for (e, s) in trace.events.iter().zip(&trace.states) {
        out.push_str(&format!(
            "{{\"seq\":{},\"event\":{},\"phase\":{},\"k\":{},\"equilibrium\":{}}}\n",
            e.seq,
            json(e.kind.name()),
            json(&s.phase.to_string()),
            s.k(),
            s.equilibrium
        ));
    }
    if let Some(h) = &trace.halt {
        let seq = h.event.as_ref().map_or(0, |e| e.seq);
        out.push_str(&format!(
            "{{\"halt\":{seq},\"reason\":{},\"message\":{}}}\n",
            json(h.error.code()),
            json(&h.error.to_string())
        ));
    }
    out
}

fn simulate(path: &Path, trace_out: Option<&Path>, format: Format) -> CmdResult {
    let scenario = load_scenario(path)?;
    let trace = run(scenario.world.clone(), &scenario.events);
    if let Some(h) = &trace.halt {
        if let SimError::InvalidWorld(violations) = &h.error {
            let lines: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(Failure(format!(
                "{}: invalid world\n{}",
                path.display(),
                lines.join("\n")
            )));
        }
    }
    if let Some(p) = trace_out {
        let doc = trace_to_document(&scenario.world, &trace)?;
        write_output(Some(p), &serialize(&doc))?;
    }

    let verdict = containment_verdict(&trace);
    let k = trace.final_state().map_or(0, |s| s.k());
    let out = match format {
        Format::Text => {
            let head = if verdict.holds {
                "containment holds"
            } else {
                "containment fails"
            };
            format!(
                "{}{head} ({})\n{}\n",
                state_table(&trace),
                verdict.clause,
                verdict.explanation
            )
        }
        Format::Records => format!(
            "{}{{\"holds\":{},\"clause\":{},\"k\":{k},\"explanation\":{}}}\n",
            simulate_records(&trace),
            verdict.holds,
            json(&verdict.clause.to_string()),
            json(&verdict.explanation)
        ),
    };
    write_output(None, &out)?;
    Ok(status(!verdict.holds))
}

#[allow(clippy::too_many_arguments)]
fn extract_cmd(
    corpus: &Path,
    top_n: usize,
    min_count: u64,
    min_weight: u64,
    window: Window,
    stopwords: Option<&Path>,
    serial: bool,
    out: Option<&Path>,
) -> CmdResult {
    let mut config = TokenizerConfig::default();
    if let Some(p) = stopwords {
        config = config.with_stopword_text(&read_text(p)?);
    }
    let docs = load_dir(corpus, &config)?;
    let parallelism = if serial {
        Parallelism::Serial
    } else {
        Parallelism::Parallel
    };
    let opts = ExtractOptions {
        top_n,
        min_count,
        min_weight,
        window,
        parallelism,
    };
    let candidate = extract(&docs, &opts)?;
    write_output(out, &serialize(&candidate_to_document(&candidate)?))?;
    Ok(ExitCode::SUCCESS)
}

fn compare_cmd(candidate: &Path, canonical: Option<&Path>) -> CmdResult {
    let doc = read_document(candidate)?;
    let candidate = candidate_from_document(&doc)?;
    let graph = load_graph(canonical)?;
    let c = compare(&candidate, &graph);
    let list = |v: &[String]| {
        if v.is_empty() {
            "-".to_string()
        } else {
            v.join(",")
        }
    };
    let out = format!(
        "precision {} ({:.6})\nrecall {} ({:.6})\nf1 {} ({:.6})\nmatched {}\nmissing {}\nspurious {}\n",
        c.precision,
        c.precision.to_f64(),
        c.recall,
        c.recall.to_f64(),
        c.f1,
        c.f1.to_f64(),
        list(&c.matched),
        list(&c.missing),
        list(&c.spurious)
    );
    write_output(None, &out)?;
    Ok(status(!c.missing.is_empty() || !c.spurious.is_empty()))
}

fn query(code: &str, canonical: Option<&Path>) -> CmdResult {
    let code: ConceptCode = code.parse()?;
    let graph = load_graph(canonical)?;
    let Ok(concept) = graph.lookup(code) else {
        eprintln!("{code}: no such concept");
        return Ok(ExitCode::from(1));
    };
    let mut line = format!("{} {}", concept.code, concept.descriptor);
    if let Some(p) = concept.parent {
        line.push_str(&format!(", parent {p}"));
    }
    let children: Vec<String> = concept.children.iter().map(ToString::to_string).collect();
    if children.is_empty() {
        line.push_str(", no children");
    } else {
        line.push_str(&format!(", children {}", children.join(" ")));
    }
    write_output(None, &format!("{line}\n"))?;
    Ok(ExitCode::SUCCESS)
}

fn canon(out: Option<&Path>) -> CmdResult {
    let doc = concept_graph_to_document(&canonical_ontology())?;
    write_output(out, &serialize(&doc))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { scenario, format } => validate(scenario, *format),
        Command::Simulate {
            scenario,
            trace_out,
            format,
        } => simulate(scenario, trace_out.as_deref(), *format),
        Command::Extract {
            corpus,
            top_n,
            min_count,
            min_weight,
            window,
            stopwords,
            serial,
            out,
        } => extract_cmd(
            corpus,
            *top_n,
            *min_count,
            *min_weight,
            *window,
            stopwords.as_deref(),
            *serial,
            out.as_deref(),
        ),
        Command::Compare {
            candidate,
            canonical,
        } => compare_cmd(candidate, canonical.as_deref()),
        Command::Query { code, canonical } => query(code, canonical.as_deref()),
        Command::Canon { out } => canon(out.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("agc: {e}");
            ExitCode::from(2)
        }
    }
}
