//! Global types: automata over arrows, with classification, projection and
//! MSC-language membership.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::automata::{AutomatonError, Dfa, Inclusion, Nfa};
use crate::oracle::OracleError;
use crate::semantics::{sync_explore, Action, Cfsm, SemanticsError, System};
use crate::trace::{commute, Arrow, Declaration, EventSet, Msc, ProcessId, TraceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GtError {
    #[error("arrow {0} uses undeclared processes or messages")]
    Undeclared(String),
    #[error("global type has no initial state")]
    NoInitialState,
    #[error("global types have different declarations or arrow alphabets")]
    DeclarationMismatch,
    #[error("state {0} does not exist")]
    UnknownState(usize),
    #[error("{0}")]
    Classification(String),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// A protocol as a finite automaton over declared arrows.
#[derive(Clone, Debug)]
pub struct GlobalType {
    name: String,
    decl: Arc<Declaration>,
    automaton: Nfa<Arrow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub deterministic: bool,
    pub commutation_closed: bool,
    pub sender_driven: bool,
    pub commutation_deterministic: bool,
    pub participant_count: usize,
}

/// Outcome of the commutation-closure decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Closure {
    Closed,
    /// `word` is accepted, `swapped` differs from it by one swap of adjacent
    /// commuting arrows and is rejected.
    Counterexample { word: Vec<Arrow>, swapped: Vec<Arrow> },
}

impl Closure {
    pub fn is_closed(&self) -> bool {
        matches!(self, Closure::Closed)
    }
}

impl GlobalType {
    pub fn new(name: impl Into<String>, decl: Arc<Declaration>, automaton: Nfa<Arrow>) -> Result<Self, GtError> {
        if let Some(a) = automaton.alphabet().iter().find(|a| !decl.contains(a)) {
            return Err(GtError::Undeclared(format!("{a:?}")));
        }
        if automaton.initial_states().is_empty() {
            return Err(GtError::NoInitialState);
        }
        Ok(GlobalType {
            name: name.into(),
            decl,
            automaton,
        })
    }

    /// Same declaration, new automaton over the same alphabet.
    pub(crate) fn derived(&self, name: impl Into<String>, automaton: Nfa<Arrow>) -> GlobalType {
        debug_assert_eq!(automaton.alphabet(), self.automaton.alphabet());
        GlobalType {
            name: name.into(),
            decl: self.decl.clone(),
            automaton,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn decl(&self) -> &Arc<Declaration> {
        &self.decl
    }

    pub fn automaton(&self) -> &Nfa<Arrow> {
        &self.automaton
    }

    pub fn arrows(&self) -> &[Arrow] {
        self.automaton.alphabet()
    }

    pub fn num_states(&self) -> usize {
        self.automaton.num_states()
    }

    /// Same declaration and arrow alphabet.
    pub fn compatible(&self, other: &GlobalType) -> bool {
        *self.decl == *other.decl && self.arrows() == other.arrows()
    }

    pub fn check_compatible(&self, other: &GlobalType) -> Result<(), GtError> {
        if self.compatible(other) {
            Ok(())
        } else {
            Err(GtError::DeclarationMismatch)
        }
    }

    pub fn accepts(&self, word: &[Arrow]) -> bool {
        self.automaton.accepts(word)
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.automaton.state_names().iter().position(|n| n == name)
    }

    /// Arrows labelling outgoing transitions of `s`.
    pub fn choices(&self, s: usize) -> Result<Vec<Arrow>, GtError> {
        if s >= self.automaton.num_states() {
            return Err(GtError::UnknownState(s));
        }
        let mut out: Vec<Arrow> = self
            .automaton
            .out_edges(s)
            .iter()
            .filter_map(|(l, _)| l.map(|i| self.arrows()[i]))
            .collect();
        out.dedup();
        Ok(out)
    }

    pub fn is_deterministic(&self) -> bool {
        self.automaton.is_deterministic()
    }

    /// Processes occurring in the arrow alphabet.
    pub fn participants(&self) -> BTreeSet<ProcessId> {
        self.arrows()
            .iter()
            .flat_map(|a| [a.sender, a.receiver])
            .collect()
    }

    pub fn is_sender_driven(&self) -> bool {
        self.is_deterministic()
            && (0..self.num_states()).all(|s| {
                let c = self.choices(s).expect("in range");
                c.windows(2).all(|w| w[0].sender == w[1].sender)
            })
    }

    pub fn is_commutation_deterministic(&self) -> bool {
        self.is_deterministic()
            && (0..self.num_states()).all(|s| {
                let c = self.choices(s).expect("in range");
                c.iter()
                    .enumerate()
                    .all(|(i, a)| c[i + 1..].iter().all(|b| !commute(a, b)))
            })
    }

    /// Decides closure under swaps of adjacent commuting arrows: for each
    /// ordered commuting pair `(a, b)` the image `{u·b·a·v | u·a·b·v ∈ L}`
    /// must be included in `L`.
    pub fn commutation_closure(&self) -> Closure {
        let g = self.automaton.eps_eliminate();
        let arrows = self.arrows().to_vec();
        for (ai, a) in arrows.iter().enumerate() {
            for (bi, b) in arrows.iter().enumerate() {
                if !commute(a, b) {
                    continue;
                }
                let image = swap_image(&g, ai, bi);
                if let Inclusion::Counterexample(swapped) =
                    self.automaton.includes(&image).expect("same alphabet")
                {
                    let word = (0..swapped.len().saturating_sub(1))
                        .filter(|&i| swapped[i] == *b && swapped[i + 1] == *a)
                        .map(|i| {
                            let mut w = swapped.clone();
                            w.swap(i, i + 1);
                            w
                        })
                        .find(|w| self.accepts(w))
                        .expect("image words come from accepted words");
                    return Closure::Counterexample { word, swapped };
                }
            }
        }
        Closure::Closed
    }

    pub fn is_commutation_closed(&self) -> bool {
        self.commutation_closure().is_closed()
    }

    pub fn classify(&self) -> Classification {
        Classification {
            deterministic: self.is_deterministic(),
            commutation_closed: self.is_commutation_closed(),
            sender_driven: self.is_sender_driven(),
            commutation_deterministic: self.is_commutation_deterministic(),
            participant_count: self.participants().len(),
        }
    }

    pub fn determinise(&self) -> GlobalType {
        self.derived(self.name.clone(), self.automaton.determinise().to_nfa())
    }

    pub fn dfa(&self) -> Result<Dfa<Arrow>, GtError> {
        Ok(Dfa::from_nfa(&self.automaton)?)
    }

    /// The same automaton started in `s` only.
    pub fn from_state(&self, s: usize) -> Result<GlobalType, GtError> {
        if s >= self.num_states() {
            return Err(GtError::UnknownState(s));
        }
        let g = &self.automaton;
        let mut fresh = Nfa::new(self.arrows().iter().copied());
        for i in 0..g.num_states() {
            fresh.add_state(g.state_name(i).to_string(), g.is_accepting(i));
        }
        for (x, l, y) in g.transitions() {
            fresh.add_transition(x, l, y).expect("same alphabet");
        }
        fresh.set_initial(s).expect("in range");
        Ok(self.derived(self.name.clone(), fresh))
    }

    /// One CFSM per declared process: the image of `G` under the
    /// projection homomorphism, epsilon-eliminated and determinised.
    pub fn project(&self) -> System {
        let mut machines = Vec::with_capacity(self.decl.process_count());
        for p in self.decl.processes() {
            let actions: Vec<Action> = self
                .arrows()
                .iter()
                .filter_map(|a| local_action(a, p))
                .collect();
            let image = self
                .automaton
                .map_letters(actions, |a| local_action(a, p))
                .expect("actions cover the image");
            let local = image.eps_eliminate().determinise().to_nfa();
            machines.push(Cfsm::new(p, local, &self.decl).expect("actions owned by p"));
        }
        System::new(self.decl.clone(), self.arrows().to_vec(), machines).expect("one machine per process")
    }

    /// Automata product; the MSC language of the result is the
    /// intersection when `other` is commutation-closed.
    pub fn product(&self, other: &GlobalType) -> Result<GlobalType, GtError> {
        self.check_compatible(other)?;
        let nfa = self.automaton.product(&other.automaton)?;
        Ok(self.derived(format!("{}_x_{}", self.name, other.name), nfa))
    }

    /// Some linearisation of `m` is accepted. Searches pairs of a
    /// downward-closed event set of `m` and an automaton state.
    pub fn member_existential(&self, m: &Msc) -> bool {
        let word = m.word();
        let Some(letters) = word
            .iter()
            .map(|a| self.automaton.letter_index(a))
            .collect::<Option<Vec<usize>>>()
        else {
            return false;
        };
        let g = self.automaton.eps_eliminate();
        let n = word.len();
        let preds = m.predecessors();
        let mut seen: HashSet<(EventSet, usize)> = HashSet::new();
        let mut queue = VecDeque::new();
        for &s in g.initial_states() {
            let key = (EventSet::empty(n), s);
            if seen.insert(key.clone()) {
                queue.push_back(key);
            }
        }
        while let Some((done, s)) = queue.pop_front() {
            if done.len() == n && g.is_accepting(s) {
                return true;
            }
            for i in 0..n {
                if done.contains(i) || !preds[i].is_subset(&done) {
                    continue;
                }
                let mut next = done.clone();
                next.insert(i);
                for &(l, t) in g.out_edges(s) {
                    if l == Some(letters[i]) {
                        let key = (next.clone(), t);
                        if seen.insert(key.clone()) {
                            queue.push_back(key);
                        }
                    }
                }
            }
        }
        false
    }

    /// Every linearisation of `m` is accepted: `m` is not in the
    /// existential language of the dual of the determinisation.
    pub fn member_universal(&self, m: &Msc) -> bool {
        if m.word().iter().any(|a| self.automaton.letter_index(a).is_none()) {
            return false;
        }
        let dual = self.derived("dual", self.automaton.determinise().dual().to_nfa());
        !dual.member_existential(m)
    }

    /// Membership by the next-arrow recursion, valid for
    /// commutation-deterministic types: follow the unique choice arrow that
    /// occurs first, and fail if it is blocked or absent.
    pub fn member_by_next_msc(&self, m: &Msc) -> Result<bool, GtError> {
        if !self.is_commutation_deterministic() {
            return Err(GtError::Classification(
                "next-arrow membership requires a commutation-deterministic type".into(),
            ));
        }
        let dfa = self.dfa()?;
        let mut s = dfa.initial();
        let mut cur = m.clone();
        loop {
            if cur.is_empty() {
                return Ok(dfa.is_accepting(s));
            }
            let choices = self.choices(s)?;
            let Some(a) = cur.next_arrow(&choices)? else {
                return Ok(false);
            };
            let Some(rest) = cur.next_msc(&choices)? else {
                return Ok(false);
            };
            let l = self.automaton.letter_index(&a).expect("choice is in alphabet");
            s = dfa.next(s, l).expect("choice has a successor");
            cur = rest;
        }
    }
}

fn local_action(a: &Arrow, p: ProcessId) -> Option<Action> {
    if a.sender == p {
        Some(Action::send(*a))
    } else if a.receiver == p {
        Some(Action::receive(*a))
    } else {
        None
    }
}

/// Words of `g` with one occurrence of `a·b` replaced by `b·a`.
fn swap_image(g: &Nfa<Arrow>, a: usize, b: usize) -> Nfa<Arrow> {
    let n = g.num_states();
    let mut out = Nfa::new(g.alphabet().iter().copied());
    for copy in 0..2 {
        for s in 0..n {
            out.add_state(format!("{}{}", g.state_name(s), if copy == 0 { "" } else { "'" }), copy == 1 && g.is_accepting(s));
        }
    }
    for &s in g.initial_states() {
        out.set_initial(s).expect("in range");
    }
    for s in 0..n {
        for &(l, t) in g.out_edges(s) {
            out.push_edge(s, l, t);
            out.push_edge(n + s, l, n + t);
        }
    }
    for s in 0..n {
        for &(la, t) in g.out_edges(s) {
            if la != Some(a) {
                continue;
            }
            for &(lb, u) in g.out_edges(t) {
                if lb != Some(b) {
                    continue;
                }
                let mid = out.add_state(format!("{}~{}", g.state_name(s), g.state_name(u)), false);
                out.push_edge(s, Some(b), mid);
                out.push_edge(mid, Some(a), n + u);
            }
        }
    }
    out
}

/// The Cartesian abstraction: synchronous product of a system.
pub fn sync_product(system: &System, name: &str) -> GlobalType {
    let nfa = sync_explore(system).to_nfa(system);
    GlobalType::new(name, system.decl().clone(), nfa).expect("product has an initial configuration")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gsd() -> GlobalType {
        let decl = Arc::new(Declaration::new(["p", "q", "q'", "r"], ["m1", "m2", "m2'", "m3", "m4"]).unwrap());
        let arrows: Vec<Arrow> = ["p->q:m1", "p->q':m2", "p->q':m2'", "r->q':m3", "q->q':m4"]
            .iter()
            .map(|a| decl.parse_arrow(a).unwrap())
            .collect();
        let mut nfa = Nfa::new(arrows.clone());
        let s: Vec<usize> = (0..4)
            .map(|i| nfa.add_state(format!("s{i}"), i >= 2))
            .collect();
        nfa.set_initial(s[0]).unwrap();
        nfa.add_transition(s[0], Some(&arrows[0]), s[1]).unwrap();
        nfa.add_transition(s[0], Some(&arrows[1]), s[2]).unwrap();
        nfa.add_transition(s[1], Some(&arrows[3]), s[3]).unwrap();
        GlobalType::new("gsd", decl, nfa).unwrap()
    }

    #[test]
    fn classification_of_sender_driven_type() {
        let g = gsd();
        let c = g.classify();
        assert!(c.deterministic && c.sender_driven && c.commutation_deterministic);
        assert!(!c.commutation_closed);
        assert_eq!(c.participant_count, 4);
        let d = g.decl();
        assert_eq!(g.choices(0).unwrap(), d.parse_word("p->q:m1;p->q':m2").unwrap());
        assert_eq!(g.choices(1).unwrap(), d.parse_word("r->q':m3").unwrap());
        assert!(g.choices(3).unwrap().is_empty());
        assert_eq!(g.choices(9), Err(GtError::UnknownState(9)));
    }

    #[test]
    fn closure_counterexample_is_one_swap() {
        let g = gsd();
        let Closure::Counterexample { word, swapped } = g.commutation_closure() else {
            panic!("expected a counterexample");
        };
        assert!(g.accepts(&word));
        assert!(!g.accepts(&swapped));
        assert_eq!(Msc::of(&word), Msc::of(&swapped));
    }

    #[test]
    fn existential_and_universal_membership() {
        let g = gsd();
        let d = g.decl().clone();
        let m1 = Msc::of(&d.parse_word("r->q':m3;p->q:m1").unwrap());
        let m2 = Msc::of(&d.parse_word("p->q':m2").unwrap());
        assert!(g.member_existential(&m1));
        assert!(g.member_existential(&m2));
        assert!(!g.member_universal(&m1));
        assert!(g.member_universal(&m2));
        assert!(!g.member_existential(&Msc::empty()));
        for m in [&m1, &m2] {
            assert_eq!(g.member_by_next_msc(m).unwrap(), g.member_existential(m));
        }
    }

    #[test]
    fn projection_of_first_sender() {
        let g = gsd();
        let sys = g.project();
        let p = sys.machine(g.decl().process("p").unwrap()).automaton();
        let words = p.words_up_to(2);
        let shown: Vec<String> = words
            .iter()
            .map(|w| w.iter().map(|a| a.show(g.decl())).collect::<Vec<_>>().join(";"))
            .collect();
        assert_eq!(shown, vec!["p!q:m1", "p!q':m2"]);
    }

    #[test]
    fn cartesian_product_contains_type() {
        let g = gsd();
        let p = sync_product(&g.project(), "pi");
        assert!(p.automaton().includes(g.automaton()).unwrap().holds());
        assert!(p.is_commutation_closed());
    }
}
