//! Deadlock-free realisability: exact in the synchronous model, bounded in
//! the p2p model.

use std::collections::VecDeque;

use serde::Serialize;

use crate::automata::{Inclusion, Nfa};
use crate::gtype::{sync_product, GlobalType, GtError};
use crate::semantics::{explore_executions, p2p_explore, Execution};
use crate::trace::Arrow;

pub const DEFAULT_BOUND: usize = 2;
pub const DEFAULT_MAX_EVENTS: usize = 8;

#[derive(Clone, Debug)]
pub struct SynchVerdict {
    pub cc_holds: bool,
    /// A word of the Cartesian abstraction whose MSC the complement claims.
    pub cc_counterexample: Option<Vec<Arrow>>,
    /// Decided only when `cc_holds`.
    pub deadlock_free: Option<bool>,
    /// Shortest word into a product state that cannot reach acceptance.
    pub deadlock_witness: Option<DeadlockWitness>,
    pub sanity_lower_inclusion: bool,
    pub sanity_counterexample: Option<Vec<Arrow>>,
}

#[derive(Clone, Debug)]
pub struct DeadlockWitness {
    pub word: Vec<Arrow>,
    pub configuration: String,
}

impl SynchVerdict {
    pub fn realisable(&self) -> bool {
        self.cc_holds && self.deadlock_free == Some(true)
    }
}

/// Checks condition (CC) as emptiness of the product of the Cartesian
/// abstraction with the complement, then deadlock freedom of the product.
pub fn check_sync_realisable(g: &GlobalType, gbar: &GlobalType) -> Result<SynchVerdict, GtError> {
    g.check_compatible(gbar)?;
    let product = sync_product(&g.project(), "product");
    let pa = product.automaton();
    let cc_counterexample = pa.product(gbar.automaton())?.shortest_accepted();
    let (sanity_lower_inclusion, sanity_counterexample) = match pa.includes(g.automaton())? {
        Inclusion::Holds => (true, None),
        Inclusion::Counterexample(w) => (false, Some(w)),
    };
    let cc_holds = cc_counterexample.is_none();
    let (deadlock_free, deadlock_witness) = if cc_holds {
        match stuck_state(pa) {
            None => (Some(true), None),
            Some((word, s)) => (
                Some(false),
                Some(DeadlockWitness {
                    word,
                    configuration: pa.state_name(s).to_string(),
                }),
            ),
        }
    } else {
        (None, None)
    };
    Ok(SynchVerdict {
        cc_holds,
        cc_counterexample,
        deadlock_free,
        deadlock_witness,
        sanity_lower_inclusion,
        sanity_counterexample,
    })
}

/// The first reachable state, in breadth-first order over sorted letters,
/// that cannot reach an accepting state.
fn stuck_state(a: &Nfa<Arrow>) -> Option<(Vec<Arrow>, usize)> {
    let a = a.eps_eliminate();
    let co = a.coreachable_states();
    let mut parent: Vec<Option<Option<(usize, usize)>>> = vec![None; a.num_states()];
    let mut queue = VecDeque::new();
    for &s in a.initial_states() {
        parent[s] = Some(None);
        queue.push_back(s);
    }
    while let Some(s) = queue.pop_front() {
        if !co[s] {
            let mut word = Vec::new();
            let mut cur = s;
            while let Some(Some((p, l))) = parent[cur] {
                word.push(a.alphabet()[l]);
                cur = p;
            }
            word.reverse();
            return Some((word, s));
        }
        for &(l, t) in a.out_edges(s) {
            if parent[t].is_none() {
                parent[t] = Some(Some((s, l.expect("epsilon-free"))));
                queue.push_back(t);
            }
        }
    }
    None
}

/// Recognises every prefix of the type's language.
pub fn accept_completion(g: &GlobalType) -> GlobalType {
    g.derived(format!("{}_completion", g.name()), g.automaton().prefix_closure())
}

#[derive(Clone, Debug)]
pub enum Witness {
    Execution(Execution),
    Word(Vec<Arrow>),
}

/// Three-valued outcome of a bounded check.
#[derive(Clone, Debug)]
pub enum Check {
    Holds,
    Fails(Witness),
    Unknown(String),
}

impl Check {
    pub fn holds(&self) -> bool {
        matches!(self, Check::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Check::Fails(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Check::Unknown(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct P2pVerdict {
    pub bound: usize,
    pub max_events: usize,
    pub cond1_rsc: Check,
    pub cond2_orphan_free: Check,
    pub cond3_accept_completion: Check,
    pub cond4_synch: Check,
    pub synch: SynchVerdict,
}

impl P2pVerdict {
    pub fn conditions(&self) -> [(&'static str, &Check); 4] {
        [
            ("rsc", &self.cond1_rsc),
            ("orphan_free", &self.cond2_orphan_free),
            ("accept_completion", &self.cond3_accept_completion),
            ("synch", &self.cond4_synch),
        ]
    }

    /// Conjunction: a definite failure wins, otherwise any unknown makes the
    /// result unknown.
    pub fn overall(&self) -> Verdict {
        let checks = self.conditions();
        if checks.iter().any(|(_, c)| c.fails()) {
            Verdict::Fails
        } else if checks.iter().any(|(_, c)| c.is_unknown()) {
            Verdict::Unknown
        } else {
            Verdict::Holds
        }
    }
}

/// The four-condition reduction, with conditions 1 to 3 explored with
/// channel bound `bound` and executions of at most `max_events` events.
pub fn check_p2p_realisable(
    g: &GlobalType,
    gbar: &GlobalType,
    bound: usize,
    max_events: usize,
) -> Result<P2pVerdict, GtError> {
    g.check_compatible(gbar)?;
    let system = g.project();
    let sample = explore_executions(&system, bound, max_events);

    let cond1_rsc = match sample
        .mscs
        .iter()
        .filter(|(m, _)| !m.is_rsc_schedulable())
        .min_by_key(|(m, _)| m.num_events())
    {
        Some((_, e)) => Check::Fails(Witness::Execution(e.clone())),
        None if sample.truncated => Check::Unknown(truncation(bound, max_events)),
        None => Check::Holds,
    };

    let report = p2p_explore(&system, bound);
    let cond2_orphan_free = match report.orphans.first() {
        Some(w) => Check::Fails(Witness::Execution(w.execution.clone())),
        None if report.bound_hit => Check::Unknown(format!("channel bound {} reached", report.bound)),
        None => Check::Holds,
    };

    let completion = accept_completion(g).project();
    let completed = explore_executions(&completion, bound, max_events);
    let missing = completed
        .final_mscs
        .iter()
        .find(|m| !sample.final_mscs.iter().any(|full| m.is_prefix_of(full)));
    let cond3_accept_completion = match missing {
        Some(m) if !sample.truncated => Check::Fails(Witness::Execution(completed.mscs[m].clone())),
        Some(_) => Check::Unknown(truncation(bound, max_events)),
        None if completed.truncated => Check::Unknown(truncation(bound, max_events)),
        None => Check::Holds,
    };

    let synch = check_sync_realisable(g, gbar)?;
    let cond4_synch = if synch.realisable() {
        Check::Holds
    } else if let Some(w) = &synch.cc_counterexample {
        Check::Fails(Witness::Word(w.clone()))
    } else {
        let w = synch.deadlock_witness.as_ref().expect("deadlock decided");
        Check::Fails(Witness::Word(w.word.clone()))
    };

    Ok(P2pVerdict {
        bound,
        max_events,
        cond1_rsc,
        cond2_orphan_free,
        cond3_accept_completion,
        cond4_synch,
        synch,
    })
}

fn truncation(bound: usize, max_events: usize) -> String {
    format!("exploration cut off by channel bound {bound} or the {max_events}-event limit")
}

#[derive(Clone, Debug, Default)]
pub struct CrossModelReport {
    pub checked: usize,
    pub p2p_realisable: usize,
    pub unknown: usize,
    /// Types realisable in p2p but not in the synchronous model.
    pub violations: Vec<String>,
}

impl CrossModelReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every type whose p2p verdict holds outright must be realisable in the
/// synchronous model.
pub fn cross_model_property_test(
    sample: &[(GlobalType, GlobalType)],
    bound: usize,
    max_events: usize,
) -> Result<CrossModelReport, GtError> {
    let mut report = CrossModelReport::default();
    for (g, gbar) in sample {
        report.checked += 1;
        let p2p = check_p2p_realisable(g, gbar, bound, max_events)?;
        match p2p.overall() {
            Verdict::Holds => {
                report.p2p_realisable += 1;
                if !check_sync_realisable(g, gbar)?.realisable() {
                    report.violations.push(g.name().to_string());
                }
            }
            Verdict::Unknown => report.unknown += 1,
            Verdict::Fails => {}
        }
    }
    Ok(report)
}
