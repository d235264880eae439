//! JSON renderings of reports. Words are lists of `p->q:m` strings and
//! executions lists of `p!q:m` / `q?p:m` strings.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::complement::{Complement, ComplementReport, RenunciationStats, VERIFY_NOTE};
use crate::gtype::{Classification, GlobalType};
use crate::oracle::{CountProfileReport, Side, Violation};
use crate::realisability::{Check, P2pVerdict, SynchVerdict, Verdict, Witness};
use crate::semantics::{Execution, P2pConfig, P2pMsc, P2pReport, System};
use crate::trace::{Arrow, Declaration, Msc, ProcessId};

use super::text::render_gt;

pub fn word(decl: &Declaration, w: &[Arrow]) -> Vec<String> {
    w.iter().map(|a| decl.show_arrow(a)).collect()
}

pub fn execution(decl: &Declaration, e: &Execution) -> Vec<String> {
    e.show(decl).split(';').filter(|s| !s.is_empty()).map(String::from).collect()
}

#[derive(Serialize)]
pub struct ClassifyOut {
    pub name: String,
    pub states: usize,
    pub arrows: Vec<String>,
    #[serde(flatten)]
    pub classification: Classification,
}

pub fn classify(g: &GlobalType) -> ClassifyOut {
    ClassifyOut {
        name: g.name().to_string(),
        states: g.num_states(),
        arrows: word(g.decl(), g.arrows()),
        classification: g.classify(),
    }
}

#[derive(Serialize)]
pub struct ComplementOut {
    pub name: String,
    pub method: &'static str,
    pub determinised: bool,
    pub note: Option<String>,
    pub states: usize,
    pub transitions: usize,
    pub unpruned_states: Option<usize>,
    pub gt: String,
}

pub fn complement(c: &Complement, stats: Option<RenunciationStats>) -> ComplementOut {
    ComplementOut {
        name: c.gtype.name().to_string(),
        method: c.method.as_str(),
        determinised: c.determinised,
        note: c.note.clone(),
        states: c.gtype.num_states(),
        transitions: c.gtype.automaton().num_transitions(),
        unpruned_states: stats.map(|s| s.unpruned_states),
        gt: render_gt(&c.gtype),
    }
}

#[derive(Serialize)]
pub struct ViolationOut {
    pub msc: Vec<String>,
    pub side: Side,
}

fn violations(decl: &Declaration, vs: &[Violation]) -> Vec<ViolationOut> {
    vs.iter()
        .map(|v| ViolationOut {
            msc: word(decl, v.msc.word()),
            side: v.side,
        })
        .collect()
}

#[derive(Serialize)]
pub struct VerifyOut {
    pub max_events: usize,
    pub mscs_checked: usize,
    pub passed: bool,
    pub note: &'static str,
    pub violations: Vec<ViolationOut>,
}

pub fn verify(decl: &Declaration, r: &ComplementReport) -> VerifyOut {
    VerifyOut {
        max_events: r.max_events,
        mscs_checked: r.mscs_checked,
        passed: r.passed,
        note: VERIFY_NOTE,
        violations: violations(decl, &r.violations),
    }
}

#[derive(Serialize)]
pub struct MemberOut {
    pub msc: Vec<String>,
    pub semantics: &'static str,
    pub member: bool,
}

pub fn member(decl: &Declaration, m: &Msc, universal: bool, member: bool) -> MemberOut {
    MemberOut {
        msc: word(decl, m.word()),
        semantics: if universal { "universal" } else { "existential" },
        member,
    }
}

#[derive(Serialize)]
pub struct MachineOut {
    pub process: String,
    pub states: usize,
    pub transitions: usize,
    pub file: Option<String>,
    pub cfsm: String,
}

#[derive(Serialize)]
pub struct ProjectOut {
    pub machines: Vec<MachineOut>,
}

pub fn project(system: &System, files: &[Option<String>]) -> ProjectOut {
    let decl = system.decl();
    ProjectOut {
        machines: system
            .machines()
            .iter()
            .zip(files)
            .map(|(m, f)| MachineOut {
                process: decl.process_name(m.process()).to_string(),
                states: m.automaton().num_states(),
                transitions: m.automaton().num_transitions(),
                file: f.clone(),
                cfsm: super::text::render_cfsm(decl, m),
            })
            .collect(),
    }
}

#[derive(Serialize)]
pub struct DeadlockOut {
    pub word: Vec<String>,
    pub configuration: String,
}

#[derive(Serialize)]
pub struct SynchOut {
    pub model: &'static str,
    pub realisable: bool,
    pub cc_holds: bool,
    pub cc_counterexample: Option<Vec<String>>,
    pub deadlock_free: Option<bool>,
    pub deadlock_witness: Option<DeadlockOut>,
    pub sanity_lower_inclusion: bool,
    pub sanity_counterexample: Option<Vec<String>>,
}

pub fn synch(decl: &Declaration, v: &SynchVerdict) -> SynchOut {
    SynchOut {
        model: "synch",
        realisable: v.realisable(),
        cc_holds: v.cc_holds,
        cc_counterexample: v.cc_counterexample.as_ref().map(|w| word(decl, w)),
        deadlock_free: v.deadlock_free,
        deadlock_witness: v.deadlock_witness.as_ref().map(|d| DeadlockOut {
            word: word(decl, &d.word),
            configuration: d.configuration.clone(),
        }),
        sanity_lower_inclusion: v.sanity_lower_inclusion,
        sanity_counterexample: v.sanity_counterexample.as_ref().map(|w| word(decl, w)),
    }
}

#[derive(Serialize)]
pub struct WitnessOut {
    pub kind: &'static str,
    pub events: Vec<String>,
}

#[derive(Serialize)]
pub struct CheckOut {
    pub status: Verdict,
    pub witness: Option<WitnessOut>,
    pub reason: Option<String>,
}

fn check(decl: &Declaration, c: &Check) -> CheckOut {
    match c {
        Check::Holds => CheckOut {
            status: Verdict::Holds,
            witness: None,
            reason: None,
        },
        Check::Unknown(r) => CheckOut {
            status: Verdict::Unknown,
            witness: None,
            reason: Some(r.clone()),
        },
        Check::Fails(w) => CheckOut {
            status: Verdict::Fails,
            witness: Some(match w {
                Witness::Execution(e) => WitnessOut {
                    kind: "execution",
                    events: execution(decl, e),
                },
                Witness::Word(w) => WitnessOut {
                    kind: "word",
                    events: word(decl, w),
                },
            }),
            reason: None,
        },
    }
}

#[derive(Serialize)]
pub struct P2pOut {
    pub model: &'static str,
    pub bound: usize,
    pub max_events: usize,
    pub verdict: Verdict,
    /// Conditions 1 to 3 are bounded explorations.
    pub semi_decision: bool,
    pub conditions: BTreeMap<&'static str, CheckOut>,
    pub synch: SynchOut,
}

pub fn p2p(decl: &Declaration, v: &P2pVerdict) -> P2pOut {
    P2pOut {
        model: "p2p",
        bound: v.bound,
        max_events: v.max_events,
        verdict: v.overall(),
        semi_decision: true,
        conditions: v.conditions().iter().map(|(k, c)| (*k, check(decl, c))).collect(),
        synch: synch(decl, &v.synch),
    }
}

#[derive(Serialize)]
pub struct ConfigOut {
    pub locals: BTreeMap<String, String>,
    pub channels: BTreeMap<String, Vec<String>>,
}

pub fn config(system: &System, c: &P2pConfig) -> ConfigOut {
    let decl = system.decl();
    let n = system.machines().len();
    ConfigOut {
        locals: system
            .machines()
            .iter()
            .zip(&c.locals)
            .map(|(m, &s)| {
                (
                    decl.process_name(m.process()).to_string(),
                    m.automaton().state_name(s).to_string(),
                )
            })
            .collect(),
        channels: c
            .channels
            .iter()
            .enumerate()
            .filter(|(_, ch)| !ch.is_empty())
            .map(|(i, ch)| {
                let key = format!(
                    "{}->{}",
                    decl.process_name(ProcessId((i / n) as u32)),
                    decl.process_name(ProcessId((i % n) as u32))
                );
                (key, ch.iter().map(|m| decl.message_name(*m).to_string()).collect())
            })
            .collect(),
    }
}

#[derive(Serialize)]
pub struct StuckOut {
    pub configuration: ConfigOut,
    pub execution: Vec<String>,
}

#[derive(Serialize)]
pub struct SimulateOut {
    pub model: &'static str,
    pub bound: usize,
    pub max_events: usize,
    pub configurations: usize,
    pub finals: usize,
    pub deadlocks: Vec<StuckOut>,
    pub orphans: Vec<StuckOut>,
    pub bound_blocked: Vec<StuckOut>,
    pub bound_hit: bool,
    pub rsc_violations: Vec<Vec<String>>,
    pub truncated: bool,
}

pub fn simulate(
    system: &System,
    report: &P2pReport,
    max_events: usize,
    rsc_violations: &[(&P2pMsc, &Execution)],
    truncated: bool,
) -> SimulateOut {
    let decl = system.decl();
    let stuck = |ws: &[crate::semantics::Witness]| -> Vec<StuckOut> {
        ws.iter()
            .map(|w| StuckOut {
                configuration: config(system, &report.configurations[w.config]),
                execution: execution(decl, &w.execution),
            })
            .collect()
    };
    SimulateOut {
        model: "p2p",
        bound: report.bound,
        max_events,
        configurations: report.configurations.len(),
        finals: report.finals.len(),
        deadlocks: stuck(&report.deadlocks),
        orphans: stuck(&report.orphans),
        bound_blocked: stuck(&report.bound_blocked),
        bound_hit: report.bound_hit,
        rsc_violations: rsc_violations.iter().map(|(_, e)| execution(decl, e)).collect(),
        truncated,
    }
}

#[derive(Serialize)]
pub struct XorOut {
    pub max_events: usize,
    pub passed: bool,
    pub violations: Vec<ViolationOut>,
}

pub fn xor(decl: &Declaration, max_events: usize, vs: &[Violation]) -> XorOut {
    XorOut {
        max_events,
        passed: vs.is_empty(),
        violations: violations(decl, vs),
    }
}

#[derive(Serialize)]
pub struct EnumerateOut {
    pub arrows: Vec<String>,
    pub max_events: usize,
    pub count: usize,
    pub mscs: Vec<Vec<String>>,
}

pub fn enumerate<'a>(decl: &Declaration, arrows: &[Arrow], max_events: usize, mscs: impl IntoIterator<Item = &'a Msc>) -> EnumerateOut {
    let mscs: Vec<Vec<String>> = mscs.into_iter().map(|m| word(decl, m.word())).collect();
    EnumerateOut {
        arrows: word(decl, arrows),
        max_events,
        count: mscs.len(),
        mscs,
    }
}

#[derive(Serialize)]
pub struct ProfileViolationOut {
    pub word: Vec<String>,
    pub counts: [usize; 3],
}

#[derive(Serialize)]
pub struct CountProfileOut {
    pub max_len: usize,
    pub predicate: String,
    pub words_checked: usize,
    pub block_words: usize,
    pub passed: bool,
    pub violations: Vec<ProfileViolationOut>,
}

pub fn count_profile(decl: &Declaration, max_len: usize, predicate: &str, r: &CountProfileReport) -> CountProfileOut {
    CountProfileOut {
        max_len,
        predicate: predicate.to_string(),
        words_checked: r.words_checked,
        block_words: r.block_words,
        passed: r.passed(),
        violations: r
            .violations
            .iter()
            .map(|(w, k)| ProfileViolationOut {
                word: word(decl, w),
                counts: *k,
            })
            .collect(),
    }
}
