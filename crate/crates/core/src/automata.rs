//! Finite automata over an abstract alphabet.
//!
//! States are integer indices; names are kept as diagnostics only. Every
//! construction materialises reachable states only, except where noted.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

/// Anything usable as an automaton letter.
pub trait Letter: Clone + Ord + Hash + Debug {}
impl<T: Clone + Ord + Hash + Debug> Letter for T {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("letter {0} is not in the alphabet")]
    UnknownLetter(String),
    #[error("state {0} out of range")]
    StateOutOfRange(usize),
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("automaton is not deterministic: {0}")]
    NotDeterministic(String),
}

/// Result of a language inclusion check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inclusion<L> {
    Holds,
    /// A shortest, then lexicographically least, word in the right-hand
    /// language but not in the left-hand one.
    Counterexample(Vec<L>),
}

impl<L> Inclusion<L> {
    pub fn holds(&self) -> bool {
        matches!(self, Inclusion::Holds)
    }
}

type Edge = (Option<usize>, usize);

/// A nondeterministic automaton with optional epsilon moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa<L> {
    alphabet: Vec<L>,
    names: Vec<String>,
    accepting: Vec<bool>,
    initial: BTreeSet<usize>,
    edges: Vec<Vec<Edge>>,
}

impl<L: Letter> Nfa<L> {
    pub fn new(alphabet: impl IntoIterator<Item = L>) -> Self {
        let mut alphabet: Vec<L> = alphabet.into_iter().collect();
        alphabet.sort();
        alphabet.dedup();
        Nfa {
            alphabet,
            names: Vec::new(),
            accepting: Vec::new(),
            initial: BTreeSet::new(),
            edges: Vec::new(),
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>, accepting: bool) -> usize {
        self.names.push(name.into());
        self.accepting.push(accepting);
        self.edges.push(Vec::new());
        self.names.len() - 1
    }

    pub fn set_initial(&mut self, s: usize) -> Result<(), AutomatonError> {
        self.check_state(s)?;
        self.initial.insert(s);
        Ok(())
    }

    pub fn set_accepting(&mut self, s: usize, accepting: bool) -> Result<(), AutomatonError> {
        self.check_state(s)?;
        self.accepting[s] = accepting;
        Ok(())
    }

    pub fn set_name(&mut self, s: usize, name: impl Into<String>) {
        self.names[s] = name.into();
    }

    fn check_state(&self, s: usize) -> Result<(), AutomatonError> {
        if s < self.names.len() {
            Ok(())
        } else {
            Err(AutomatonError::StateOutOfRange(s))
        }
    }

    /// Adds `from --letter--> to`; `None` is an epsilon move.
    pub fn add_transition(
        &mut self,
        from: usize,
        letter: Option<&L>,
        to: usize,
    ) -> Result<(), AutomatonError> {
        self.check_state(from)?;
        self.check_state(to)?;
        let idx = match letter {
            None => None,
            Some(l) => Some(
                self.letter_index(l)
                    .ok_or_else(|| AutomatonError::UnknownLetter(format!("{l:?}")))?,
            ),
        };
        self.push_edge(from, idx, to);
        Ok(())
    }

    pub(crate) fn push_edge(&mut self, from: usize, letter: Option<usize>, to: usize) {
        let list = &mut self.edges[from];
        if let Err(pos) = list.binary_search(&(letter, to)) {
            list.insert(pos, (letter, to));
        }
    }

    pub fn alphabet(&self) -> &[L] {
        &self.alphabet
    }

    pub fn letter_index(&self, l: &L) -> Option<usize> {
        self.alphabet.binary_search(l).ok()
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn initial_states(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    /// Outgoing edges of `s` as `(letter index or epsilon, target)`.
    pub fn out_edges(&self, s: usize) -> &[(Option<usize>, usize)] {
        &self.edges[s]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, Option<&L>, usize)> + '_ {
        self.edges.iter().enumerate().flat_map(move |(s, es)| {
            es.iter()
                .map(move |(l, t)| (s, l.map(|i| &self.alphabet[i]), *t))
        })
    }

    pub fn num_transitions(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn has_epsilon(&self) -> bool {
        self.edges.iter().flatten().any(|(l, _)| l.is_none())
    }

    pub fn eps_closure(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = set.clone();
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for &(l, t) in &self.edges[s] {
                if l.is_none() && out.insert(t) {
                    stack.push(t);
                }
            }
        }
        out
    }

    /// Closure of the successors of `set` on letter index `letter`.
    pub fn step(&self, set: &BTreeSet<usize>, letter: usize) -> BTreeSet<usize> {
        let next: BTreeSet<usize> = set
            .iter()
            .flat_map(|&s| self.edges[s].iter())
            .filter(|(l, _)| *l == Some(letter))
            .map(|(_, t)| *t)
            .collect();
        self.eps_closure(&next)
    }

    pub fn initial_closure(&self) -> BTreeSet<usize> {
        self.eps_closure(&self.initial)
    }

    pub fn accepts(&self, word: &[L]) -> bool {
        let mut current = self.initial_closure();
        for l in word {
            let Some(i) = self.letter_index(l) else {
                return false;
            };
            current = self.step(&current, i);
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|&s| self.accepting[s])
    }

    /// Same-language automaton without epsilon moves, over the same states.
    pub fn eps_eliminate(&self) -> Nfa<L> {
        if !self.has_epsilon() {
            return self.clone();
        }
        let mut out = Nfa {
            alphabet: self.alphabet.clone(),
            names: self.names.clone(),
            accepting: vec![false; self.num_states()],
            initial: self.initial.clone(),
            edges: vec![Vec::new(); self.num_states()],
        };
        for s in 0..self.num_states() {
            let closure = self.eps_closure(&BTreeSet::from([s]));
            out.accepting[s] = closure.iter().any(|&c| self.accepting[c]);
            for &c in &closure {
                for &(l, t) in &self.edges[c] {
                    if l.is_some() {
                        out.push_edge(s, l, t);
                    }
                }
            }
        }
        out
    }

    /// Accessible states, following epsilon moves.
    pub fn reachable_states(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<usize> = self.initial.iter().copied().collect();
        for &s in &stack {
            seen[s] = true;
        }
        while let Some(s) = stack.pop() {
            for &(_, t) in &self.edges[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// States from which an accepting state is reachable.
    pub fn coreachable_states(&self) -> Vec<bool> {
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); self.num_states()];
        for (s, es) in self.edges.iter().enumerate() {
            for &(_, t) in es {
                rev[t].push(s);
            }
        }
        let mut seen = self.accepting.clone();
        let mut stack: Vec<usize> = (0..self.num_states()).filter(|&s| seen[s]).collect();
        while let Some(s) = stack.pop() {
            for &p in &rev[s] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Keeps only the states for which `keep` holds, renumbering densely.
    pub fn restrict(&self, keep: &[bool]) -> Nfa<L> {
        let mut map = vec![usize::MAX; self.num_states()];
        let mut out = Nfa::new(self.alphabet.clone());
        for s in 0..self.num_states() {
            if keep[s] {
                map[s] = out.add_state(self.names[s].clone(), self.accepting[s]);
            }
        }
        for &s in &self.initial {
            if keep[s] {
                out.initial.insert(map[s]);
            }
        }
        for (s, es) in self.edges.iter().enumerate() {
            if !keep[s] {
                continue;
            }
            for &(l, t) in es {
                if keep[t] {
                    out.push_edge(map[s], l, map[t]);
                }
            }
        }
        out
    }

    /// Drops inaccessible states.
    pub fn accessible_part(&self) -> Nfa<L> {
        self.restrict(&self.reachable_states())
    }

    /// Drops states that are inaccessible or cannot reach acceptance. An
    /// empty language yields a single non-accepting initial state.
    pub fn trim(&self) -> Nfa<L> {
        let reach = self.reachable_states();
        let co = self.coreachable_states();
        let keep: Vec<bool> = reach.iter().zip(&co).map(|(a, b)| *a && *b).collect();
        let mut out = self.restrict(&keep);
        if out.initial.is_empty() {
            let s = out.add_state("empty", false);
            out.initial.insert(s);
        }
        out
    }

    /// Recognises the set of prefixes of the language.
    pub fn prefix_closure(&self) -> Nfa<L> {
        let reach = self.reachable_states();
        let co = self.coreachable_states();
        if !(0..self.num_states()).any(|s| reach[s] && co[s]) {
            return self.trim();
        }
        let mut out = self.trim();
        out.accepting.iter_mut().for_each(|a| *a = true);
        out
    }

    /// Image of the language under the homomorphism `f` (`None` erases).
    pub fn map_letters<M: Letter>(
        &self,
        alphabet: impl IntoIterator<Item = M>,
        f: impl Fn(&L) -> Option<M>,
    ) -> Result<Nfa<M>, AutomatonError> {
        let mut out = Nfa::new(alphabet);
        out.names = self.names.clone();
        out.accepting = self.accepting.clone();
        out.initial = self.initial.clone();
        out.edges = vec![Vec::new(); self.num_states()];
        let mut image: Vec<Option<usize>> = Vec::with_capacity(self.alphabet.len());
        for l in &self.alphabet {
            image.push(match f(l) {
                None => None,
                Some(m) => Some(
                    out.letter_index(&m)
                        .ok_or_else(|| AutomatonError::UnknownLetter(format!("{m:?}")))?,
                ),
            });
        }
        for (s, es) in self.edges.iter().enumerate() {
            for &(l, t) in es {
                out.push_edge(s, l.and_then(|i| image[i]), t);
            }
        }
        Ok(out)
    }

    /// Replaces every `x` transition by an epsilon move; `x` leaves the
    /// alphabet.
    pub fn erase_letter(&self, x: &L) -> Result<Nfa<L>, AutomatonError> {
        if self.letter_index(x).is_none() {
            return Err(AutomatonError::UnknownLetter(format!("{x:?}")));
        }
        let rest: Vec<L> = self.alphabet.iter().filter(|l| *l != x).cloned().collect();
        self.map_letters(rest, |l| (l != x).then(|| l.clone()))
    }

    /// Same automaton over a larger alphabet.
    pub fn extend_alphabet(&self, alphabet: impl IntoIterator<Item = L>) -> Result<Nfa<L>, AutomatonError> {
        let mut all: Vec<L> = alphabet.into_iter().collect();
        all.extend(self.alphabet.iter().cloned());
        self.map_letters(all, |l| Some(l.clone()))
    }

    /// Subset construction over reachable subsets. Missing transitions stay
    /// missing (the result is partial) except that an empty initial subset
    /// is materialised as a non-accepting state.
    pub fn determinise(&self) -> Dfa<L> {
        let start = self.initial_closure();
        let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut subsets: Vec<BTreeSet<usize>> = Vec::new();
        let mut delta: Vec<Vec<Option<usize>>> = Vec::new();
        let mut queue = VecDeque::new();
        index.insert(start.clone(), 0);
        subsets.push(start.clone());
        delta.push(vec![None; self.alphabet.len()]);
        queue.push_back(0);
        while let Some(i) = queue.pop_front() {
            for l in 0..self.alphabet.len() {
                let next = self.step(&subsets[i], l);
                if next.is_empty() {
                    continue;
                }
                let j = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        let j = subsets.len();
                        index.insert(next.clone(), j);
                        subsets.push(next);
                        delta.push(vec![None; self.alphabet.len()]);
                        queue.push_back(j);
                        j
                    }
                };
                delta[i][l] = Some(j);
            }
        }
        let accepting = subsets
            .iter()
            .map(|s| s.iter().any(|&q| self.accepting[q]))
            .collect();
        let names = subsets
            .iter()
            .map(|s| {
                let inner: Vec<&str> = s.iter().map(|&q| self.names[q].as_str()).collect();
                format!("{{{}}}", inner.join(","))
            })
            .collect();
        Dfa {
            alphabet: self.alphabet.clone(),
            names,
            accepting,
            initial: 0,
            delta,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.determinism_violation().is_none()
    }

    fn determinism_violation(&self) -> Option<String> {
        if self.initial.len() != 1 {
            return Some(format!("{} initial states", self.initial.len()));
        }
        for (s, es) in self.edges.iter().enumerate() {
            for w in es.windows(2) {
                if w[0].0.is_some() && w[0].0 == w[1].0 {
                    return Some(format!("state {} has two successors on one letter", self.names[s]));
                }
            }
            if es.iter().any(|(l, _)| l.is_none()) {
                return Some(format!("state {} has an epsilon move", self.names[s]));
            }
        }
        None
    }

    /// Synchronised product; accepts the intersection.
    pub fn product(&self, other: &Nfa<L>) -> Result<Nfa<L>, AutomatonError> {
        if self.alphabet != other.alphabet {
            return Err(AutomatonError::AlphabetMismatch);
        }
        let a = self.eps_eliminate();
        let b = other.eps_eliminate();
        let mut out = Nfa::new(self.alphabet.clone());
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut queue = VecDeque::new();
        for &x in &a.initial {
            for &y in &b.initial {
                let s = out.add_state(format!("({},{})", a.names[x], b.names[y]), a.accepting[x] && b.accepting[y]);
                index.insert((x, y), s);
                out.initial.insert(s);
                queue.push_back((x, y));
            }
        }
        while let Some((x, y)) = queue.pop_front() {
            let s = index[&(x, y)];
            for &(l, tx) in &a.edges[x] {
                for &(m, ty) in &b.edges[y] {
                    if l != m {
                        continue;
                    }
                    let t = match index.get(&(tx, ty)) {
                        Some(&t) => t,
                        None => {
                            let t = out.add_state(
                                format!("({},{})", a.names[tx], b.names[ty]),
                                a.accepting[tx] && b.accepting[ty],
                            );
                            index.insert((tx, ty), t);
                            queue.push_back((tx, ty));
                            t
                        }
                    };
                    out.push_edge(s, l, t);
                }
            }
        }
        Ok(out)
    }

    /// A shortest, then lexicographically least, accepted word.
    pub fn shortest_accepted(&self) -> Option<Vec<L>> {
        let a = self.eps_eliminate();
        let n = a.num_states();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (s, es) in a.edges.iter().enumerate() {
            for &(_, t) in es {
                rev[t].push(s);
            }
        }
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for s in (0..n).filter(|&s| a.accepting[s]) {
            dist[s] = 0;
            queue.push_back(s);
        }
        while let Some(s) = queue.pop_front() {
            for &p in &rev[s] {
                if dist[p] == usize::MAX {
                    dist[p] = dist[s] + 1;
                    queue.push_back(p);
                }
            }
        }
        let best = a.initial.iter().map(|&s| dist[s]).min()?;
        if best == usize::MAX {
            return None;
        }
        let mut current: BTreeSet<usize> = a.initial.iter().copied().filter(|&s| dist[s] == best).collect();
        let mut word = Vec::with_capacity(best);
        for remaining in (0..best).rev() {
            let mut by_letter: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
            for &s in &current {
                for &(l, t) in &a.edges[s] {
                    if dist[t] == remaining {
                        by_letter.entry(l.expect("epsilon-free")).or_default().insert(t);
                    }
                }
            }
            let (l, next) = by_letter.into_iter().next().expect("distance bookkeeping");
            word.push(a.alphabet[l].clone());
            current = next;
        }
        Some(word)
    }

    pub fn is_empty(&self) -> bool {
        let reach = self.reachable_states();
        !(0..self.num_states()).any(|s| reach[s] && self.accepting[s])
    }

    /// `L(self) ⊇ L(other)`, decided as emptiness of
    /// `dual(det(self)) × other`.
    pub fn includes(&self, other: &Nfa<L>) -> Result<Inclusion<L>, AutomatonError> {
        if self.alphabet != other.alphabet {
            return Err(AutomatonError::AlphabetMismatch);
        }
        let outside = self.determinise().dual().to_nfa();
        Ok(match outside.product(other)?.shortest_accepted() {
            None => Inclusion::Holds,
            Some(w) => Inclusion::Counterexample(w),
        })
    }

    /// Accepted words of length at most `max_len`, in length-lex order.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Vec<L>> {
        let mut out = Vec::new();
        let mut frontier = vec![(Vec::new(), self.initial_closure())];
        for len in 0..=max_len {
            let mut next = Vec::new();
            for (w, set) in frontier {
                if set.iter().any(|&s| self.accepting[s]) {
                    out.push(w.clone());
                }
                if len == max_len {
                    continue;
                }
                for l in 0..self.alphabet.len() {
                    let succ = self.step(&set, l);
                    if !succ.is_empty() {
                        let mut v = w.clone();
                        v.push(self.alphabet[l].clone());
                        next.push((v, succ));
                    }
                }
            }
            frontier = next;
        }
        out
    }
}

/// A deterministic automaton, possibly partial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa<L> {
    alphabet: Vec<L>,
    names: Vec<String>,
    accepting: Vec<bool>,
    initial: usize,
    delta: Vec<Vec<Option<usize>>>,
}

impl<L: Letter> Dfa<L> {
    /// Checks the determinism conditions and converts.
    pub fn from_nfa(nfa: &Nfa<L>) -> Result<Dfa<L>, AutomatonError> {
        if let Some(why) = nfa.determinism_violation() {
            return Err(AutomatonError::NotDeterministic(why));
        }
        let mut delta = vec![vec![None; nfa.alphabet.len()]; nfa.num_states()];
        for (s, es) in nfa.edges.iter().enumerate() {
            for &(l, t) in es {
                delta[s][l.expect("checked")] = Some(t);
            }
        }
        Ok(Dfa {
            alphabet: nfa.alphabet.clone(),
            names: nfa.names.clone(),
            accepting: nfa.accepting.clone(),
            initial: *nfa.initial.iter().next().expect("checked"),
            delta,
        })
    }

    pub fn to_nfa(&self) -> Nfa<L> {
        let mut out = Nfa::new(self.alphabet.clone());
        for s in 0..self.num_states() {
            out.add_state(self.names[s].clone(), self.accepting[s]);
        }
        out.initial.insert(self.initial);
        for (s, row) in self.delta.iter().enumerate() {
            for (l, t) in row.iter().enumerate() {
                if let Some(t) = t {
                    out.push_edge(s, Some(l), *t);
                }
            }
        }
        out
    }

    pub fn alphabet(&self) -> &[L] {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn next(&self, s: usize, letter: usize) -> Option<usize> {
        self.delta[s][letter]
    }

    pub fn is_complete(&self) -> bool {
        self.delta.iter().all(|row| row.iter().all(Option::is_some))
    }

    pub fn accepts(&self, word: &[L]) -> bool {
        let mut s = self.initial;
        for l in word {
            let Ok(i) = self.alphabet.binary_search(l) else {
                return false;
            };
            match self.delta[s][i] {
                Some(t) => s = t,
                None => return false,
            }
        }
        self.accepting[s]
    }

    /// Adds a single non-accepting sink if some transition is missing.
    pub fn complete(&self) -> Dfa<L> {
        if self.is_complete() {
            return self.clone();
        }
        let mut out = self.clone();
        let sink = out.names.len();
        out.names.push("sink".to_string());
        out.accepting.push(false);
        out.delta.push(vec![Some(sink); self.alphabet.len()]);
        for row in out.delta.iter_mut() {
            for t in row.iter_mut() {
                t.get_or_insert(sink);
            }
        }
        out
    }

    /// Completes, then swaps accepting and non-accepting states.
    pub fn dual(&self) -> Dfa<L> {
        let mut out = self.complete();
        out.accepting.iter_mut().for_each(|a| *a = !*a);
        out
    }

    /// Minimal complete DFA by partition refinement on the reachable part.
    pub fn minimise(&self) -> Dfa<L> {
        let full = self.complete();
        let n = full.num_states();
        let k = full.alphabet.len();
        let mut order = Vec::new();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([full.initial]);
        seen[full.initial] = true;
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for l in 0..k {
                let t = full.delta[s][l].expect("complete");
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        let mut class: Vec<usize> = vec![0; n];
        for &s in &order {
            class[s] = usize::from(full.accepting[s]);
        }
        loop {
            let mut sigs: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next = vec![0; n];
            for &s in &order {
                let mut sig = vec![class[s]];
                sig.extend((0..k).map(|l| class[full.delta[s][l].expect("complete")]));
                let fresh = sigs.len();
                next[s] = *sigs.entry(sig).or_insert(fresh);
            }
            let distinct_before: BTreeSet<usize> = order.iter().map(|&s| class[s]).collect();
            let stable = sigs.len() == distinct_before.len();
            class = next;
            if stable {
                break;
            }
        }
        let count = order.iter().map(|&s| class[s]).max().map_or(0, |m| m + 1);
        let mut rep = vec![usize::MAX; count];
        for &s in &order {
            if rep[class[s]] == usize::MAX {
                rep[class[s]] = s;
            }
        }
        let names = rep.iter().map(|&s| full.names[s].clone()).collect();
        let accepting = rep.iter().map(|&s| full.accepting[s]).collect();
        let delta = rep
            .iter()
            .map(|&s| (0..k).map(|l| Some(class[full.delta[s][l].expect("complete")])).collect())
            .collect();
        Dfa {
            alphabet: full.alphabet.clone(),
            names,
            accepting,
            initial: class[full.initial],
            delta,
        }
    }
}
