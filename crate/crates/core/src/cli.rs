//! The `gtcheck` command line.
//!
//! Exit codes: 0 success or property holds, 1 property fails, 2 usage or
//! parse error, 3 unknown (a bounded exploration was cut off).

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::complement::{
    complement_auto, complement_cartesian, complement_dual, renunciation_with_stats, verify_complement, Complement,
    Method, DEFAULT_VERIFY_BOUND, VERIFY_NOTE,
};
use crate::formats::{json, parse_cfsm, parse_gt, render_cfsm, render_dot, render_dot_system, render_gt};
use crate::gtype::{GlobalType, GtError};
use crate::oracle::{count_profile_check, enumerate_canonical, xor_check, Side};
use crate::realisability::{check_p2p_realisable, check_sync_realisable, Check, Verdict, Witness, DEFAULT_BOUND, DEFAULT_MAX_EVENTS};
use crate::semantics::{explore_executions, p2p_explore};
use crate::trace::{Declaration, Msc};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "gtcheck", version, about = "Complementation and realisability checks for global types")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Report determinism, commutation closure, sender-drivenness and
    /// commutation-determinism.
    Classify { file: PathBuf },
    /// Compute a complement.
    Complement {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Write the complement here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Bound used to self-check a Cartesian complement in auto mode.
        #[arg(long, default_value_t = DEFAULT_VERIFY_BOUND)]
        check_bound: usize,
    },
    /// Bounded check that two types are complements (`-` reads standard input).
    VerifyComplement {
        g: PathBuf,
        gbar: PathBuf,
        #[arg(long, default_value_t = DEFAULT_VERIFY_BOUND)]
        max_events: usize,
    },
    /// MSC membership, existential by default.
    Member {
        file: PathBuf,
        /// Arrows separated by `;`.
        #[arg(long)]
        msc: String,
        #[arg(long)]
        universal: bool,
    },
    /// Project onto one CFSM per process.
    Project {
        file: PathBuf,
        /// Directory for `<process>.cfsm` files.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Deadlock-free realisability.
    Realisable {
        file: PathBuf,
        #[arg(long, value_enum)]
        model: Model,
        /// A complement file, `-` for standard input, or `auto`.
        #[arg(long)]
        complement: String,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_EVENTS)]
        max_events: usize,
    },
    /// Explore the projected system.
    Simulate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Model::P2p)]
        model: Model,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_EVENTS)]
        max_events: usize,
    },
    /// Graphviz rendering of a `.gt` or `.cfsm` file.
    Dot(DotArgs),
    /// Brute-force oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Args, Debug)]
pub struct DotArgs {
    pub file: PathBuf,
    /// Render the projected system instead of the type.
    #[arg(long)]
    pub project: bool,
    /// Render the synchronous product of the projections.
    #[arg(long, conflicts_with = "project")]
    pub product: bool,
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    /// MSCs claimed by both or neither type.
    Xor {
        g: PathBuf,
        gbar: PathBuf,
        #[arg(long, default_value_t = DEFAULT_VERIFY_BOUND)]
        max_events: usize,
    },
    /// Canonical MSCs over the type's arrows.
    Enumerate {
        file: PathBuf,
        #[arg(long)]
        max_events: usize,
    },
    /// Checks a predicate on the block counts of accepted words.
    CountProfile {
        file: PathBuf,
        /// The three arrows m1;m2;m3.
        #[arg(long)]
        letters: String,
        /// For example `k1>k2`, `k1>k2 or k2>k3`, `true`.
        #[arg(long)]
        predicate: String,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Dual,
    Cartesian,
    Renunciation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Synch,
    P2p,
}

/// An error that terminates the command with the given exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn fails(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_FAILS,
            message: message.into(),
        }
    }
}

impl From<GtError> for Failure {
    fn from(e: GtError) -> Self {
        match e {
            GtError::Classification(m) => Failure::fails(m),
            other => Failure::usage(other.to_string()),
        }
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    stdin: &'a mut dyn Read,
    json: bool,
}

impl Io<'_> {
    fn emit<T: Serialize>(&mut self, value: &T, text: impl FnOnce() -> String) -> Result<(), Failure> {
        let s = if self.json {
            serde_json::to_string_pretty(value).expect("serialisable") + "\n"
        } else {
            text()
        };
        self.out
            .write_all(s.as_bytes())
            .map_err(|e| Failure::usage(format!("cannot write output: {e}")))
    }

    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        if path == Path::new("-") {
            let mut s = String::new();
            self.stdin
                .read_to_string(&mut s)
                .map_err(|e| Failure::usage(format!("cannot read standard input: {e}")))?;
            return Ok(s);
        }
        fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    }

    fn load(&mut self, path: &Path) -> Result<GlobalType, Failure> {
        let src = self.read(path)?;
        parse_gt(&src).map_err(|e| Failure::usage(format!("{}:{e}", path.display())))
    }
}

/// Runs the command line with explicit streams; returns the exit code.
pub fn run_with(args: &[String], stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let mut io = Io {
        out,
        stdin,
        json: cli.json,
    };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "gtcheck: {}", f.message);
            f.code
        }
    }
}

pub fn run() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    run_with(&args, &mut io::stdin(), &mut io::stdout(), &mut io::stderr())
}

fn status(holds: bool) -> i32 {
    if holds {
        EXIT_OK
    } else {
        EXIT_FAILS
    }
}

fn dispatch(command: Command, io: &mut Io) -> Result<i32, Failure> {
    match command {
        Command::Classify { file } => {
            let g = io.load(&file)?;
            let out = json::classify(&g);
            io.emit(&out, || {
                let c = &out.classification;
                format!(
                    "{}: {} states, {} arrows\n  deterministic: {}\n  commutation_closed: {}\n  sender_driven: {}\n  commutation_deterministic: {}\n  participant_count: {}\n",
                    out.name,
                    out.states,
                    out.arrows.len(),
                    c.deterministic,
                    c.commutation_closed,
                    c.sender_driven,
                    c.commutation_deterministic,
                    c.participant_count
                )
            })?;
            Ok(EXIT_OK)
        }
        Command::Complement {
            file,
            method,
            output,
            check_bound,
        } => {
            let g = io.load(&file)?;
            let (c, stats) = match method {
                MethodArg::Auto => (complement_auto(&g, check_bound)?, None),
                MethodArg::Dual => (
                    Complement {
                        gtype: complement_dual(&g)?,
                        method: Method::Dual,
                        determinised: false,
                        note: None,
                    },
                    None,
                ),
                MethodArg::Cartesian => (complement_cartesian(&g), None),
                MethodArg::Renunciation => {
                    let (gtype, stats) = renunciation_with_stats(&g)?;
                    (
                        Complement {
                            gtype,
                            method: Method::Renunciation,
                            determinised: false,
                            note: None,
                        },
                        Some(stats),
                    )
                }
            };
            let text = render_gt(&c.gtype);
            if let Some(path) = &output {
                fs::write(path, &text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            }
            let out = json::complement(&c, stats);
            io.emit(&out, || {
                if output.is_some() {
                    let mut s = format!("{} complement with {} states", out.method, out.states);
                    if let Some(n) = &out.note {
                        s.push_str(&format!(" ({n})"));
                    }
                    s + "\n"
                } else {
                    text.clone()
                }
            })?;
            Ok(EXIT_OK)
        }
        Command::VerifyComplement { g, gbar, max_events } => {
            let g = io.load(&g)?;
            let gbar = io.load(&gbar)?;
            let report = verify_complement(&g, &gbar, max_events)?;
            let out = json::verify(g.decl(), &report);
            io.emit(&out, || {
                let mut s = format!(
                    "{}: {} MSCs with at most {} events checked, {} violations\n",
                    if out.passed { "pass" } else { "FAIL" },
                    out.mscs_checked,
                    out.max_events,
                    out.violations.len()
                );
                for v in &out.violations {
                    let who = match v.side {
                        Side::Both => "claimed by both",
                        Side::Neither => "claimed by neither",
                    };
                    s.push_str(&format!("  {} {}\n", show_msc(&v.msc), who));
                }
                s.push_str(&format!("note: {VERIFY_NOTE}\n"));
                s
            })?;
            Ok(status(report.passed))
        }
        Command::Member { file, msc, universal } => {
            let g = io.load(&file)?;
            let word = g.decl().parse_word(&msc).map_err(|e| Failure::usage(e.to_string()))?;
            let m = Msc::of(&word);
            let member = if universal {
                g.member_universal(&m)
            } else {
                g.member_existential(&m)
            };
            let out = json::member(g.decl(), &m, universal, member);
            io.emit(&out, || {
                format!(
                    "{} is {}in the {} language of {}\n",
                    show_msc(&out.msc),
                    if member { "" } else { "not " },
                    out.semantics,
                    g.name()
                )
            })?;
            Ok(status(member))
        }
        Command::Project { file, output } => {
            let g = io.load(&file)?;
            let system = g.project();
            let decl = g.decl();
            let mut files = Vec::new();
            if let Some(dir) = &output {
                fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
            }
            for m in system.machines() {
                match &output {
                    Some(dir) => {
                        let path = dir.join(format!("{}.cfsm", decl.process_name(m.process())));
                        fs::write(&path, render_cfsm(decl, m))
                            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
                        files.push(Some(path.display().to_string()));
                    }
                    None => files.push(None),
                }
            }
            let out = json::project(&system, &files);
            io.emit(&out, || match &output {
                Some(_) => out
                    .machines
                    .iter()
                    .map(|m| format!("wrote {}\n", m.file.as_deref().unwrap_or("")))
                    .collect(),
                None => out.machines.iter().map(|m| m.cfsm.clone()).collect::<Vec<_>>().join("\n"),
            })?;
            Ok(EXIT_OK)
        }
        Command::Realisable {
            file,
            model,
            complement,
            bound,
            max_events,
        } => {
            let g = io.load(&file)?;
            let gbar = if complement == "auto" {
                complement_auto(&g, DEFAULT_VERIFY_BOUND)?.gtype
            } else {
                io.load(Path::new(&complement))?
            };
            let decl = g.decl().clone();
            match model {
                Model::Synch => {
                    let v = check_sync_realisable(&g, &gbar)?;
                    let out = json::synch(&decl, &v);
                    io.emit(&out, || {
                        let mut s = if out.realisable {
                            "deadlock-free realisable in synch\n".to_string()
                        } else {
                            "NOT deadlock-free realisable in synch\n".to_string()
                        };
                        s.push_str(&format!("  condition (CC): {}\n", out.cc_holds));
                        if let Some(w) = &out.cc_counterexample {
                            s.push_str(&format!("    counterexample: {}\n", show_msc(w)));
                        }
                        match out.deadlock_free {
                            Some(d) => s.push_str(&format!("  deadlock free: {d}\n")),
                            None => s.push_str("  deadlock free: not checked\n"),
                        }
                        if let Some(w) = &out.deadlock_witness {
                            s.push_str(&format!("    stuck after {} in {}\n", show_msc(&w.word), w.configuration));
                        }
                        if !out.sanity_lower_inclusion {
                            s.push_str("  warning: projection does not cover the type\n");
                        }
                        s
                    })?;
                    Ok(status(v.realisable()))
                }
                Model::P2p => {
                    let v = check_p2p_realisable(&g, &gbar, bound, max_events)?;
                    let out = json::p2p(&decl, &v);
                    io.emit(&out, || {
                        let qualifier = format!("channel bound {bound}, executions up to {max_events} events");
                        let mut s = match v.overall() {
                            Verdict::Holds => format!("deadlock-free realisable in p2p (bounded check: {qualifier})\n"),
                            Verdict::Fails => "NOT deadlock-free realisable in p2p\n".to_string(),
                            Verdict::Unknown => format!("unknown: bounded check inconclusive ({qualifier})\n"),
                        };
                        for (name, c) in v.conditions() {
                            s.push_str(&format!("  {name}: {}\n", show_check(&decl, c)));
                        }
                        s
                    })?;
                    Ok(match v.overall() {
                        Verdict::Holds => EXIT_OK,
                        Verdict::Fails => EXIT_FAILS,
                        Verdict::Unknown => EXIT_UNKNOWN,
                    })
                }
            }
        }
        Command::Simulate {
            file,
            model,
            bound,
            max_events,
        } => {
            if model != Model::P2p {
                return Err(Failure::usage("simulate supports --model p2p only"));
            }
            let g = io.load(&file)?;
            let system = g.project();
            let report = p2p_explore(&system, bound);
            let sample = explore_executions(&system, bound, max_events);
            let rsc: Vec<_> = sample.mscs.iter().filter(|(m, _)| !m.is_rsc_schedulable()).collect();
            let out = json::simulate(&system, &report, max_events, &rsc, sample.truncated);
            let problems = !out.deadlocks.is_empty() || !out.orphans.is_empty() || !out.rsc_violations.is_empty();
            io.emit(&out, || {
                let mut s = format!(
                    "{} reachable configurations ({} final) with channel bound {}\n",
                    out.configurations, out.finals, out.bound
                );
                for (label, list) in [("deadlock", &out.deadlocks), ("orphan", &out.orphans), ("bound-blocked", &out.bound_blocked)] {
                    for d in list {
                        s.push_str(&format!("  {label} after {}\n", show_msc(&d.execution)));
                    }
                }
                for e in &out.rsc_violations {
                    s.push_str(&format!("  not RSC: {}\n", show_msc(e)));
                }
                if out.bound_hit || out.truncated {
                    s.push_str("  exploration was cut off; results are a semi-decision\n");
                }
                s
            })?;
            Ok(if problems {
                EXIT_FAILS
            } else if out.bound_hit || out.truncated {
                EXIT_UNKNOWN
            } else {
                EXIT_OK
            })
        }
        Command::Dot(args) => {
            let src = io.read(&args.file)?;
            let text = match crate::formats::text::file_kind(&src) {
                Some("cfsm") => {
                    let (decl, m) = parse_cfsm(&src).map_err(|e| Failure::usage(format!("{}:{e}", args.file.display())))?;
                    let name = decl.process_name(m.process()).to_string();
                    let system = single_machine_system(decl, m)?;
                    render_dot_system(&system, &name)
                }
                _ => {
                    let g = parse_gt(&src).map_err(|e| Failure::usage(format!("{}:{e}", args.file.display())))?;
                    if args.project {
                        render_dot_system(&g.project(), g.name())
                    } else if args.product {
                        render_dot(&crate::gtype::sync_product(&g.project(), g.name()))
                    } else {
                        render_dot(&g)
                    }
                }
            };
            io.out
                .write_all(text.as_bytes())
                .map_err(|e| Failure::usage(format!("cannot write output: {e}")))?;
            Ok(EXIT_OK)
        }
        Command::Oracle(cmd) => oracle(cmd, io),
    }
}

fn single_machine_system(decl: std::sync::Arc<Declaration>, m: crate::semantics::Cfsm) -> Result<crate::semantics::System, Failure> {
    use crate::automata::Nfa;
    use crate::semantics::{Cfsm, System};
    let mut machines = Vec::new();
    for p in decl.processes() {
        if p == m.process() {
            machines.push(m.clone());
        } else {
            let mut nfa = Nfa::new(Vec::new());
            let s = nfa.add_state("idle", true);
            nfa.set_initial(s).expect("in range");
            machines.push(Cfsm::new(p, nfa, &decl).map_err(|e| Failure::usage(e.to_string()))?);
        }
    }
    let arrows = m.automaton().alphabet().iter().map(|a| a.arrow).collect();
    System::new(decl, arrows, machines).map_err(|e| Failure::usage(e.to_string()))
}

fn oracle(cmd: OracleCommand, io: &mut Io) -> Result<i32, Failure> {
    match cmd {
        OracleCommand::Xor { g, gbar, max_events } => {
            let g = io.load(&g)?;
            let gbar = io.load(&gbar)?;
            g.check_compatible(&gbar)?;
            let vs = xor_check(&g, &gbar, max_events).map_err(|e| Failure::usage(e.to_string()))?;
            let out = json::xor(g.decl(), max_events, &vs);
            io.emit(&out, || {
                let mut s = format!(
                    "{}: {} violations up to {} events\n",
                    if out.passed { "pass" } else { "FAIL" },
                    out.violations.len(),
                    max_events
                );
                for v in &out.violations {
                    s.push_str(&format!("  {} ({:?})\n", show_msc(&v.msc), v.side));
                }
                s
            })?;
            Ok(status(out.passed))
        }
        OracleCommand::Enumerate { file, max_events } => {
            let g = io.load(&file)?;
            let set = enumerate_canonical(g.arrows(), max_events).map_err(|e| Failure::usage(e.to_string()))?;
            let out = json::enumerate(g.decl(), g.arrows(), max_events, &set);
            io.emit(&out, || {
                let mut s = format!("{} MSCs with at most {} events\n", out.count, max_events);
                for m in &out.mscs {
                    s.push_str(&format!("  {}\n", show_msc(m)));
                }
                s
            })?;
            Ok(EXIT_OK)
        }
        OracleCommand::CountProfile {
            file,
            letters,
            predicate,
            max_len,
        } => {
            let g = io.load(&file)?;
            let word = g.decl().parse_word(&letters).map_err(|e| Failure::usage(e.to_string()))?;
            let letters: [crate::trace::Arrow; 3] = word
                .try_into()
                .map_err(|_| Failure::usage("--letters needs exactly three arrows"))?;
            let pred = Predicate::parse(&predicate).map_err(Failure::usage)?;
            let report = count_profile_check(&g, letters, |a, b, c| pred.eval([a, b, c]), max_len)
                .map_err(|e| Failure::usage(e.to_string()))?;
            let out = json::count_profile(g.decl(), max_len, &predicate, &report);
            io.emit(&out, || {
                let mut s = format!(
                    "{}: {} block-shaped words of {} accepted words up to length {}\n",
                    if out.passed { "pass" } else { "FAIL" },
                    out.block_words,
                    out.words_checked,
                    max_len
                );
                for v in &out.violations {
                    s.push_str(&format!("  {} with counts {:?}\n", show_msc(&v.word), v.counts));
                }
                s
            })?;
            Ok(status(out.passed))
        }
    }
}

fn show_msc(w: &[String]) -> String {
    if w.is_empty() {
        "ε".into()
    } else {
        w.join(";")
    }
}

fn show_check(decl: &Declaration, c: &Check) -> String {
    match c {
        Check::Holds => "holds".into(),
        Check::Unknown(r) => format!("unknown ({r})"),
        Check::Fails(Witness::Word(w)) => format!("fails, witness {}", show_msc(&json::word(decl, w))),
        Check::Fails(Witness::Execution(e)) => format!("fails, witness {}", show_msc(&json::execution(decl, e))),
    }
}

/// A disjunction of comparisons over `k1`, `k2`, `k3` and integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    clauses: Vec<(Term, Cmp, Term)>,
    always: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Term {
    Count(usize),
    Const(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cmp {
    Gt,
    Ge,
    Lt,
    Le,
    Eq,
    Ne,
}

impl Predicate {
    pub fn parse(text: &str) -> Result<Predicate, String> {
        let text = text.trim();
        if text == "true" {
            return Ok(Predicate {
                clauses: Vec::new(),
                always: true,
            });
        }
        let mut clauses = Vec::new();
        for part in text.split("or") {
            let part: String = part.chars().filter(|c| !c.is_whitespace()).collect();
            let ops = [(">=", Cmp::Ge), ("<=", Cmp::Le), ("!=", Cmp::Ne), (">", Cmp::Gt), ("<", Cmp::Lt), ("=", Cmp::Eq)];
            let (pos, op, cmp) = ops
                .iter()
                .find_map(|(op, cmp)| part.find(op).map(|p| (p, *op, *cmp)))
                .ok_or_else(|| format!("no comparison in `{part}`"))?;
            let lhs = Self::term(&part[..pos])?;
            let rhs = Self::term(&part[pos + op.len()..])?;
            clauses.push((lhs, cmp, rhs));
        }
        Ok(Predicate { clauses, always: false })
    }

    fn term(s: &str) -> Result<Term, String> {
        match s {
            "k1" => Ok(Term::Count(0)),
            "k2" => Ok(Term::Count(1)),
            "k3" => Ok(Term::Count(2)),
            n => n.parse().map(Term::Const).map_err(|_| format!("unknown term `{n}`")),
        }
    }

    pub fn eval(&self, k: [usize; 3]) -> bool {
        let value = |t: Term| match t {
            Term::Count(i) => k[i],
            Term::Const(c) => c,
        };
        self.always
            || self.clauses.iter().any(|&(a, cmp, b)| {
                let (a, b) = (value(a), value(b));
                match cmp {
                    Cmp::Gt => a > b,
                    Cmp::Ge => a >= b,
                    Cmp::Lt => a < b,
                    Cmp::Le => a <= b,
                    Cmp::Eq => a == b,
                    Cmp::Ne => a != b,
                }
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicates() {
        let p = Predicate::parse("k1>k2 or k2 > k3").unwrap();
        assert!(p.eval([2, 1, 5]));
        assert!(p.eval([0, 1, 0]));
        assert!(!p.eval([1, 1, 1]));
        assert!(Predicate::parse("true").unwrap().eval([0, 0, 0]));
        assert!(Predicate::parse("k1>=2").unwrap().eval([2, 0, 0]));
        assert!(Predicate::parse("k4>1").is_err());
        assert!(Predicate::parse("k1").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let args: Vec<String> = ["gtcheck", "classify"].iter().map(|s| s.to_string()).collect();
        assert_eq!(run_with(&args, &mut io::empty(), &mut out, &mut err), EXIT_USAGE);
        let args: Vec<String> = ["gtcheck", "classify", "/nonexistent.gt"].iter().map(|s| s.to_string()).collect();
        assert_eq!(run_with(&args, &mut io::empty(), &mut out, &mut err), EXIT_USAGE);
    }
}
