//! Command-line surface over the reversible-LTS library: load a model,
//! check the theory obligations, run and normalize signed scripts, decide
//! causal equivalence, or step through a model interactively.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use revlts::ccs::{parse_process, CcsLts};
use revlts::reversible::{
    apply_signed, backward, causally_equivalent, enabled_backward, enabled_forward,
    encode_sequence, forward, normalize, ReversibleError, ValidSequence,
};
use revlts::xmachine::{parse_system, SharedSystem};
use revlts::{
    check_theory, reachable, Configuration, Lts, SignedLabel, TheoryReport, DEFAULT_DEPTH,
    DEFAULT_STATE_CAP,
};

#[derive(Parser)]
#[command(
    name = "revlts",
    version,
    about = "Reversible labelled transition systems: CCS processes and shared-memory X-machines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Exploration depth bound
    #[arg(long, global = true, default_value_t = DEFAULT_DEPTH)]
    depth: usize,
    /// Explored-state cap
    #[arg(long, global = true, default_value_t = DEFAULT_STATE_CAP)]
    cap: usize,
    /// Emit a machine-readable JSON document instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Override the model kind detected from the file extension
    #[arg(long, global = true, value_enum)]
    kind: Option<Kind>,
}

#[derive(Subcommand)]
enum Command {
    /// Check determinism, co-determinism, the co-diamond property, and the
    /// loop law on the explored fragment
    Check {
        /// Model file (`.ccs` or `.xm.json`)
        model: PathBuf,
    },
    /// Run a signed script from the initial configuration
    Run {
        model: PathBuf,
        /// Script text, or a path to a script file
        script: String,
    },
    /// Rewrite a script into its undo-then-redo normal form
    Normalize {
        model: PathBuf,
        /// Script text, or a path to a script file
        script: String,
    },
    /// Decide whether two scripts are causally equivalent
    Equiv {
        model: PathBuf,
        /// First script text, or a path to a script file
        first: String,
        /// Second script text, or a path to a script file
        second: String,
    },
    /// Step through a model interactively
    Explore { model: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Ccs,
    Xmachine,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Ccs => "ccs",
            Kind::Xmachine => "xmachine",
        }
    }
}

/// Anything that stops a command before its semantics can run: unreadable
/// files, unparseable models or scripts, ambiguous initial configurations.
struct UsageError(String);

type Exit = Result<u8, UsageError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(UsageError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Exit {
    let model_path = match &cli.command {
        Command::Check { model }
        | Command::Run { model, .. }
        | Command::Normalize { model, .. }
        | Command::Equiv { model, .. }
        | Command::Explore { model } => model.clone(),
    };
    let kind = detect_kind(&model_path, cli.kind)?;
    let text = std::fs::read_to_string(&model_path)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", model_path.display())))?;

    match kind {
        Kind::Ccs => {
            let root = parse_process(text.trim())
                .map_err(|e| UsageError(format!("{}: {e}", model_path.display())))?;
            run_command(cli, &CcsLts, vec![root], kind, &model_path)
        }
        Kind::Xmachine => {
            let system: SharedSystem = parse_system(&text)
                .map_err(|e| UsageError(format!("{}: {e}", model_path.display())))?;
            let roots = system.initial_terms();
            run_command(cli, &system, roots, kind, &model_path)
        }
    }
}

fn run_command<I: Lts>(
    cli: Cli,
    lts: &I,
    roots: Vec<I::Term>,
    kind: Kind,
    path: &Path,
) -> Exit {
    match cli.command {
        Command::Check { .. } => Ok(cmd_check(lts, &roots, kind, path, cli.depth, cli.cap, cli.json)),
        Command::Run { script, .. } => {
            let script = load_script(lts, &script)?;
            Ok(cmd_run(lts, one_root(roots)?, &script, cli.json))
        }
        Command::Normalize { script, .. } => {
            let script = load_script(lts, &script)?;
            Ok(cmd_normalize(lts, one_root(roots)?, &script, cli.json))
        }
        Command::Equiv { first, second, .. } => {
            let first = load_script(lts, &first)?;
            let second = load_script(lts, &second)?;
            Ok(cmd_equiv(lts, one_root(roots)?, &first, &second, cli.json))
        }
        Command::Explore { .. } => Ok(cmd_explore(lts, one_root(roots)?)),
    }
}

fn detect_kind(path: &Path, requested: Option<Kind>) -> Result<Kind, UsageError> {
    if let Some(kind) = requested {
        return Ok(kind);
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    if name.ends_with(".ccs") {
        Ok(Kind::Ccs)
    } else if name.ends_with(".xm.json") {
        Ok(Kind::Xmachine)
    } else {
        Err(UsageError(format!(
            "cannot tell what kind of model {} is; use --kind ccs|xmachine",
            path.display()
        )))
    }
}

fn one_root<T>(mut roots: Vec<T>) -> Result<T, UsageError> {
    if roots.len() == 1 {
        Ok(roots.remove(0))
    } else {
        Err(UsageError(format!(
            "model has {} initial configurations; this command needs exactly one",
            roots.len()
        )))
    }
}

/// A script argument is either script text or the name of a file holding it.
fn load_script<I: Lts>(lts: &I, arg: &str) -> Result<Vec<SignedLabel<I::Label>>, UsageError> {
    let text = if Path::new(arg).is_file() {
        std::fs::read_to_string(arg)
            .map_err(|e| UsageError(format!("cannot read script {arg}: {e}")))?
    } else {
        arg.to_string()
    };
    parse_script(lts, &text).map_err(UsageError)
}

/// Scripts are a bracketed signed sequence (`[u, v^-1]`) or one
/// `fwd <label>` / `back <label>` step per line.
fn parse_script<I: Lts>(lts: &I, text: &str) -> Result<Vec<SignedLabel<I::Label>>, String> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(inner) = trimmed.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| "script starts with `[` but does not end with `]`".to_string())?;
        return split_top_level(inner)
            .into_iter()
            .map(|item| parse_signed_label(lts, item))
            .collect();
    }
    trimmed
        .lines()
        .map(str::trim)
        .filter(|line| !line.is_empty())
        .map(|line| match line.split_once(char::is_whitespace) {
            Some(("fwd", rest)) => Ok(SignedLabel::Forward(parse_plain_label(lts, rest.trim())?)),
            Some(("back", rest)) => Ok(SignedLabel::Backward(parse_plain_label(lts, rest.trim())?)),
            _ => Err(format!(
                "script line `{line}` is neither `fwd <label>` nor `back <label>`"
            )),
        })
        .collect()
}

fn parse_signed_label<I: Lts>(lts: &I, item: &str) -> Result<SignedLabel<I::Label>, String> {
    let item = item.trim();
    if let Some(core) = item.strip_suffix("^-1") {
        Ok(SignedLabel::Backward(parse_plain_label(lts, core.trim())?))
    } else {
        Ok(SignedLabel::Forward(parse_plain_label(lts, item)?))
    }
}

fn parse_plain_label<I: Lts>(lts: &I, text: &str) -> Result<I::Label, String> {
    lts.parse_label(text).map_err(|e| format!("bad label `{text}`: {e}"))
}

/// Split on commas that are not nested inside brackets of any shape.
fn split_top_level(text: &str) -> Vec<&str> {
    let mut items = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '{' | '[' => depth += 1,
            ')' | '}' | ']' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                items.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = text[start..].trim();
    if !last.is_empty() || !items.is_empty() {
        items.push(&text[start..]);
    }
    items
}

fn cmd_check<I: Lts>(
    lts: &I,
    roots: &[I::Term],
    kind: Kind,
    path: &Path,
    depth: usize,
    cap: usize,
    json: bool,
) -> u8 {
    let report = check_theory(lts, roots, depth, cap);
    let (loop_checked, loop_failures) = loop_spot_checks(lts, roots, depth, cap);

    let broken = !report.ok() || !loop_failures.is_empty();
    let verdict = if broken {
        "violations found"
    } else if report.truncated {
        "inconclusive"
    } else {
        "ok"
    };

    if json {
        let doc = json!({
            "model": path.display().to_string(),
            "kind": kind.name(),
            "report": report,
            "loop_checks": loop_checked,
            "loop_failures": loop_failures,
            "verdict": verdict,
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
    } else {
        println!("model: {} ({})", path.display(), kind.name());
        println!("states: {}", report.states);
        println!("transitions: {}", report.transitions);
        println!(
            "exploration: {}",
            if report.truncated { "truncated" } else { "complete" }
        );
        print_violations(&report);
        println!(
            "loop checks: {} passed, {} failed",
            loop_checked - loop_failures.len(),
            loop_failures.len()
        );
        for label in &loop_failures {
            println!("  loop broken at {label}");
        }
        println!("verdict: {verdict}");
    }

    if broken {
        1
    } else if report.truncated {
        3
    } else {
        0
    }
}

fn print_violations(report: &TheoryReport) {
    println!("determinism violations: {}", report.determinism.len());
    for v in &report.determinism {
        println!(
            "  label {} from {} reaches {} successors: {}",
            v.label,
            v.term,
            v.successors.len(),
            v.successors.join(", ")
        );
    }
    println!("co-determinism violations: {}", report.codeterminism.len());
    for v in &report.codeterminism {
        println!(
            "  label {} into {} from {} sources: {}",
            v.label,
            v.target,
            v.sources.len(),
            v.sources.join(", ")
        );
    }
    println!("co-diamond violations: {}", report.codiamond.len());
    for v in &report.codiamond {
        println!(
            "  independent {} then {} from {} cannot be reordered",
            v.label_u, v.label_v, v.first
        );
    }
}

/// Undo and redo every fragment transition, verifying both round trips.
fn loop_spot_checks<I: Lts>(
    lts: &I,
    roots: &[I::Term],
    depth: usize,
    cap: usize,
) -> (usize, Vec<String>) {
    let mut checked = 0;
    let mut failures = Vec::new();
    for root in roots {
        let fragment = reachable(lts, root, depth, cap);
        for (src, u, tgt) in &fragment.transitions {
            checked += 1;
            let r = Configuration::init(fragment.states[*src].clone());
            let round_trip = forward(lts, &r, u).and_then(|taken| {
                let undone = backward(lts, &taken, u)?;
                let retaken = forward(lts, &undone, u)?;
                Ok((taken, undone, retaken))
            });
            match round_trip {
                Ok((taken, undone, retaken))
                    if taken.project() == &fragment.states[*tgt]
                        && undone == r
                        && retaken == taken => {}
                _ => failures.push(lts.encode_label(u)),
            }
        }
    }
    (checked, failures)
}

fn cmd_run<I: Lts>(
    lts: &I,
    root: I::Term,
    script: &[SignedLabel<I::Label>],
    json: bool,
) -> u8 {
    let mut at = Configuration::init(root);
    let initial = lts.encode_term(at.project());
    let mut steps = Vec::new();

    if !json {
        println!("init: {initial}");
    }
    for (i, sl) in script.iter().enumerate() {
        let moved = match sl {
            SignedLabel::Forward(u) => forward(lts, &at, u),
            SignedLabel::Backward(u) => backward(lts, &at, u),
        };
        match moved {
            Ok(next) => {
                at = next;
                let direction = if sl.is_forward() { "fwd" } else { "back" };
                let label = lts.encode_label(sl.label());
                let term = lts.encode_term(at.project());
                if json {
                    steps.push(json!({"label": label, "direction": direction, "term": term}));
                } else {
                    println!("step {}: {direction} {label} -> {term}", i + 1);
                }
            }
            Err(e) => {
                if json {
                    let doc = json!({
                        "initial": initial,
                        "steps": steps,
                        "error": {"step": i + 1, "message": e.to_string()},
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
                } else {
                    println!("error at step {}: {e}", i + 1);
                }
                return 1;
            }
        }
    }

    let trace = at.trace().encode(lts);
    let final_term = lts.encode_term(at.project());
    if json {
        let doc = json!({
            "initial": initial,
            "steps": steps,
            "trace": at.trace().canonical().iter().map(|u| lts.encode_label(u)).collect::<Vec<_>>(),
            "final": final_term,
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
    } else {
        println!("trace: {trace}");
        println!("final: {final_term}");
    }
    0
}

/// Step indices in library errors are zero-based; the printed step numbers
/// are one-based, so shift before showing them.
fn human_error(e: &ReversibleError) -> String {
    match e {
        ReversibleError::StepFailed { index, source } => format!("step {}: {source}", index + 1),
        other => other.to_string(),
    }
}

fn format_normal_form<I: Lts>(lts: &I, l1: &[I::Label], l2: &[I::Label]) -> String {
    let mut out = String::from("([");
    for (i, u) in l1.iter().rev().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{}^-1", lts.encode_label(u));
    }
    out.push_str("], [");
    for (i, u) in l2.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&lts.encode_label(u));
    }
    out.push_str("])");
    out
}

fn cmd_normalize<I: Lts>(
    lts: &I,
    root: I::Term,
    script: &[SignedLabel<I::Label>],
    json: bool,
) -> u8 {
    let r = Configuration::init(root);
    match normalize(lts, &r, script) {
        Ok((l1, l2)) => {
            if json {
                let undo: Vec<String> =
                    l1.iter().rev().map(|u| lts.encode_label(u)).collect();
                let redo: Vec<String> = l2.iter().map(|u| lts.encode_label(u)).collect();
                let doc = json!({"undo": undo, "redo": redo});
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
            } else {
                println!("{}", format_normal_form(lts, &l1, &l2));
            }
            0
        }
        Err(e) => {
            eprintln!("error: script does not run: {}", human_error(&e));
            1
        }
    }
}

fn cmd_equiv<I: Lts>(
    lts: &I,
    root: I::Term,
    first: &[SignedLabel<I::Label>],
    second: &[SignedLabel<I::Label>],
    json: bool,
) -> u8 {
    let r = Configuration::init(root);
    let validate = |seq: &[SignedLabel<I::Label>], which: &str| {
        apply_signed(lts, &r, seq)
            .map(|end| ValidSequence::new(lts, seq.to_vec(), end).expect("just ran"))
            .map_err(|e| format!("{which} script does not run: {}", human_error(&e)))
    };
    let outcome = validate(first, "first").and_then(|s1| {
        let s2 = validate(second, "second")?;
        causally_equivalent(lts, &s1, &s2).map_err(|e| e.to_string())
    });
    match outcome {
        Ok(verdict) => {
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({"equivalent": verdict}))
                        .expect("serializes")
                );
            } else {
                println!("{verdict}");
            }
            if verdict {
                0
            } else {
                1
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            2
        }
    }
}

fn cmd_explore<I: Lts>(lts: &I, root: I::Term) -> u8 {
    let initial = Configuration::init(root);
    let mut at = initial.clone();
    let mut history: Vec<SignedLabel<I::Label>> = Vec::new();
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();

    loop {
        let forward_moves = enabled_forward(lts, &at);
        let undoable = enabled_backward(lts, &at);
        println!("term: {}", lts.encode_term(at.project()));
        println!("trace: {}", at.trace().encode(lts));
        if forward_moves.is_empty() {
            println!("forward: (none)");
        } else {
            println!("forward:");
            for (i, (u, _)) in forward_moves.iter().enumerate() {
                println!("  f {}: {}", i + 1, lts.encode_label(u));
            }
        }
        if undoable.is_empty() {
            println!("undoable: (none)");
        } else {
            println!("undoable:");
            for (i, u) in undoable.iter().enumerate() {
                println!("  b {}: {}", i + 1, lts.encode_label(u));
            }
        }
        print!("> ");
        let _ = io::stdout().flush();

        let line = match lines.next() {
            Some(Ok(line)) => line,
            _ => return 0,
        };
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            None => {}
            Some("quit") => return 0,
            Some("hist") => println!("history: {}", encode_sequence(lts, &history)),
            Some("norm") => match normalize(lts, &initial, &history) {
                Ok((l1, l2)) => println!("{}", format_normal_form(lts, &l1, &l2)),
                Err(e) => println!("cannot normalize: {e}"),
            },
            Some("init") => {
                at = initial.clone();
                history.clear();
            }
            Some("f") => match parse_index(tokens.next(), forward_moves.len()) {
                Ok(n) => {
                    let (u, _) = &forward_moves[n - 1];
                    at = forward(lts, &at, u).expect("listed move is enabled");
                    history.push(SignedLabel::Forward(u.clone()));
                }
                Err(message) => println!("{message}"),
            },
            Some("b") => match parse_index(tokens.next(), undoable.len()) {
                Ok(n) => {
                    let u = &undoable[n - 1];
                    at = backward(lts, &at, u).expect("listed label is undoable");
                    history.push(SignedLabel::Backward(u.clone()));
                }
                Err(message) => println!("{message}"),
            },
            Some(_) => println!("unknown command; use: f <n>, b <n>, hist, norm, init, quit"),
        }
    }
}

fn parse_index(token: Option<&str>, available: usize) -> Result<usize, String> {
    let n: usize = token
        .and_then(|t| t.parse().ok())
        .ok_or("usage: f <n> or b <n> with a move number")?;
    if n == 0 || n > available {
        return Err(format!("no move numbered {n}; {available} available"));
    }
    Ok(n)
}
