//! Arrows, the commutation relation and synchronous MSCs as traces.
//!
//! An [`Msc`] is an equivalence class of arrow words under swaps of adjacent
//! commuting arrows. It is stored as the lexicographically least member of
//! its class, where arrows are ordered by `(sender, receiver, message)` using
//! declaration indices. Two arrows commute iff their participant sets are
//! disjoint.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Index of a process in its [`Declaration`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcessId(pub u32);

/// Index of a message label in its [`Declaration`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MessageLabel(pub u32);

/// An atomic communication `sender->receiver:message`.
///
/// The derived order compares sender, then receiver, then message, each by
/// declaration index. This is the order used for canonical forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arrow {
    pub sender: ProcessId,
    pub receiver: ProcessId,
    pub message: MessageLabel,
}

impl Arrow {
    pub fn involves(&self, p: ProcessId) -> bool {
        self.sender == p || self.receiver == p
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("unknown process `{0}`")]
    UnknownProcess(String),
    #[error("unknown message `{0}`")]
    UnknownMessage(String),
    #[error("self-message `{0}`: sender and receiver must differ")]
    SelfMessage(String),
    #[error("malformed arrow `{0}`, expected `p->q:m`")]
    MalformedArrow(String),
    #[error("choices {0:?} and {1:?} commute")]
    CommutingChoices(Arrow, Arrow),
    #[error("size {size} exceeds limit {limit}")]
    TooLarge { size: usize, limit: usize },
}

/// Returns true if `s` matches `[A-Za-z][A-Za-z0-9_']*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// The declared process and message sets. Arrows refer to both by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Declaration {
    processes: Vec<String>,
    messages: Vec<String>,
    process_index: HashMap<String, ProcessId>,
    message_index: HashMap<String, MessageLabel>,
}

impl Declaration {
    pub fn new<P, M>(processes: P, messages: M) -> Result<Self, TraceError>
    where
        P: IntoIterator,
        P::Item: Into<String>,
        M: IntoIterator,
        M::Item: Into<String>,
    {
        let processes: Vec<String> = processes.into_iter().map(Into::into).collect();
        let messages: Vec<String> = messages.into_iter().map(Into::into).collect();
        let mut process_index = HashMap::new();
        for (i, p) in processes.iter().enumerate() {
            if !is_identifier(p) {
                return Err(TraceError::InvalidIdentifier(p.clone()));
            }
            if process_index.insert(p.clone(), ProcessId(i as u32)).is_some() {
                return Err(TraceError::Duplicate(p.clone()));
            }
        }
        let mut message_index = HashMap::new();
        for (i, m) in messages.iter().enumerate() {
            if !is_identifier(m) {
                return Err(TraceError::InvalidIdentifier(m.clone()));
            }
            if message_index.insert(m.clone(), MessageLabel(i as u32)).is_some() {
                return Err(TraceError::Duplicate(m.clone()));
            }
        }
        Ok(Declaration {
            processes,
            messages,
            process_index,
            message_index,
        })
    }

    pub fn processes(&self) -> impl Iterator<Item = ProcessId> + '_ {
        (0..self.processes.len()).map(|i| ProcessId(i as u32))
    }

    pub fn messages(&self) -> impl Iterator<Item = MessageLabel> + '_ {
        (0..self.messages.len()).map(|i| MessageLabel(i as u32))
    }

    pub fn process_count(&self) -> usize {
        self.processes.len()
    }

    pub fn message_count(&self) -> usize {
        self.messages.len()
    }

    pub fn process(&self, name: &str) -> Result<ProcessId, TraceError> {
        self.process_index
            .get(name)
            .copied()
            .ok_or_else(|| TraceError::UnknownProcess(name.to_string()))
    }

    pub fn message(&self, name: &str) -> Result<MessageLabel, TraceError> {
        self.message_index
            .get(name)
            .copied()
            .ok_or_else(|| TraceError::UnknownMessage(name.to_string()))
    }

    pub fn process_name(&self, p: ProcessId) -> &str {
        &self.processes[p.0 as usize]
    }

    pub fn message_name(&self, m: MessageLabel) -> &str {
        &self.messages[m.0 as usize]
    }

    pub fn contains(&self, a: &Arrow) -> bool {
        (a.sender.0 as usize) < self.processes.len()
            && (a.receiver.0 as usize) < self.processes.len()
            && (a.message.0 as usize) < self.messages.len()
    }

    pub fn arrow(&self, sender: &str, receiver: &str, message: &str) -> Result<Arrow, TraceError> {
        let s = self.process(sender)?;
        let r = self.process(receiver)?;
        let m = self.message(message)?;
        if s == r {
            return Err(TraceError::SelfMessage(format!("{sender}->{receiver}:{message}")));
        }
        Ok(Arrow {
            sender: s,
            receiver: r,
            message: m,
        })
    }

    /// Parses `p->q:m` (no whitespace inside).
    pub fn parse_arrow(&self, text: &str) -> Result<Arrow, TraceError> {
        let malformed = || TraceError::MalformedArrow(text.to_string());
        let (sender, rest) = text.split_once("->").ok_or_else(malformed)?;
        let (receiver, message) = rest.split_once(':').ok_or_else(malformed)?;
        if ![sender, receiver, message].iter().all(|s| is_identifier(s)) {
            return Err(malformed());
        }
        self.arrow(sender, receiver, message)
    }

    /// Parses a `;`-separated arrow list. Blank input is the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Arrow>, TraceError> {
        text.split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| self.parse_arrow(s))
            .collect()
    }

    pub fn show_arrow(&self, a: &Arrow) -> String {
        format!(
            "{}->{}:{}",
            self.process_name(a.sender),
            self.process_name(a.receiver),
            self.message_name(a.message)
        )
    }

    pub fn show_word(&self, w: &[Arrow]) -> String {
        w.iter().map(|a| self.show_arrow(a)).collect::<Vec<_>>().join(";")
    }
}

/// Two arrows commute iff their participant sets are disjoint.
pub fn commute(a: &Arrow, b: &Arrow) -> bool {
    !(a.involves(b.sender) || a.involves(b.receiver))
}

/// Canonical trace of a word.
pub fn msc_of(word: &[Arrow]) -> Msc {
    Msc::of(word)
}

/// Immediate-or-transitive predecessor sets of each position of `word` in its
/// dependence order, as bitsets.
fn dependence_masks(word: &[Arrow]) -> Vec<EventSet> {
    let n = word.len();
    let mut preds: Vec<EventSet> = Vec::with_capacity(n);
    for j in 0..n {
        let mut set = EventSet::empty(n);
        for i in 0..j {
            if !commute(&word[i], &word[j]) {
                set.insert(i);
                let pi = preds[i].clone();
                set.union_with(&pi);
            }
        }
        preds.push(set);
    }
    preds
}

/// A fixed-capacity bitset over event positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventSet {
    bits: Vec<u64>,
}

impl EventSet {
    pub fn empty(capacity: usize) -> Self {
        EventSet {
            bits: vec![0; capacity.div_ceil(64).max(1)],
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut s = Self::empty(capacity);
        for i in 0..capacity {
            s.insert(i);
        }
        s
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn insert(&mut self, i: usize) {
        self.bits[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.bits[i / 64] &= !(1 << (i % 64));
    }

    pub fn union_with(&mut self, other: &EventSet) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= *b;
        }
    }

    pub fn is_subset(&self, other: &EventSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|b| *b == 0)
    }
}

/// One event of an [`Msc`], identified by its position in the normal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occurrence {
    pub position: usize,
    pub arrow: Arrow,
}

/// A synchronous MSC, stored in lexicographic normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Msc {
    word: Vec<Arrow>,
}

impl Msc {
    pub fn empty() -> Self {
        Msc::default()
    }

    /// Greedy lex-least linear extension of the dependence order of `word`.
    ///
    /// Minimal events never share a letter (an arrow does not commute with
    /// itself), so the greedy choice is unique.
    pub fn of(word: &[Arrow]) -> Self {
        let n = word.len();
        let preds = dependence_masks(word);
        let mut done = EventSet::empty(n);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let next = (0..n)
                .filter(|&i| !done.contains(i) && preds[i].is_subset(&done))
                .min_by_key(|&i| word[i])
                .expect("a finite poset always has a minimal element");
            done.insert(next);
            out.push(word[next]);
        }
        Msc { word: out }
    }

    pub fn word(&self) -> &[Arrow] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Predecessor sets of each event, indexed by normal-form position.
    pub fn predecessors(&self) -> Vec<EventSet> {
        dependence_masks(&self.word)
    }

    /// Every word whose canonical trace is `self`.
    pub fn linearisations(&self, limit: usize) -> Result<Vec<Vec<Arrow>>, TraceError> {
        if self.len() > limit {
            return Err(TraceError::TooLarge {
                size: self.len(),
                limit,
            });
        }
        let preds = self.predecessors();
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(self.len());
        let mut done = EventSet::empty(self.len());
        self.extend_linearisations(&preds, &mut done, &mut current, &mut out);
        out.sort();
        Ok(out)
    }

    fn extend_linearisations(
        &self,
        preds: &[EventSet],
        done: &mut EventSet,
        current: &mut Vec<Arrow>,
        out: &mut Vec<Vec<Arrow>>,
    ) {
        if current.len() == self.len() {
            out.push(current.clone());
            return;
        }
        for i in 0..self.len() {
            if !done.contains(i) && preds[i].is_subset(done) {
                done.insert(i);
                current.push(self.word[i]);
                self.extend_linearisations(preds, done, current, out);
                current.pop();
                done.remove(i);
            }
        }
    }

    /// Events that can occur first in some linearisation.
    pub fn minimal_arrows(&self) -> Vec<Occurrence> {
        self.predecessors()
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_empty())
            .map(|(i, _)| Occurrence {
                position: i,
                arrow: self.word[i],
            })
            .collect()
    }

    fn check_choices(choices: &[Arrow]) -> Result<(), TraceError> {
        for (i, a) in choices.iter().enumerate() {
            for b in &choices[i + 1..] {
                if commute(a, b) {
                    return Err(TraceError::CommutingChoices(*a, *b));
                }
            }
        }
        Ok(())
    }

    /// Position of the first occurrence of a choice arrow. Choices are
    /// pairwise dependent, so this is the same in every linearisation.
    fn first_choice(&self, choices: &[Arrow]) -> Result<Option<usize>, TraceError> {
        Self::check_choices(choices)?;
        Ok(self.word.iter().position(|a| choices.contains(a)))
    }

    /// The first arrow of `choices` occurring in `self`.
    pub fn next_arrow(&self, choices: &[Arrow]) -> Result<Option<Arrow>, TraceError> {
        Ok(self.first_choice(choices)?.map(|i| self.word[i]))
    }

    /// Removes [`Self::next_arrow`], provided no earlier dependent arrow
    /// blocks it.
    pub fn next_msc(&self, choices: &[Arrow]) -> Result<Option<Msc>, TraceError> {
        let Some(i) = self.first_choice(choices)? else {
            return Ok(None);
        };
        let blocked = self.word[..i].iter().any(|b| !commute(b, &self.word[i]));
        if blocked {
            return Ok(None);
        }
        let mut rest = self.word.clone();
        rest.remove(i);
        Ok(Some(Msc::of(&rest)))
    }
}

impl From<&[Arrow]> for Msc {
    fn from(word: &[Arrow]) -> Self {
        Msc::of(word)
    }
}

/// Renders arrows with their declared names.
pub struct ShowMsc<'a>(pub &'a Declaration, pub &'a Msc);

impl fmt::Display for ShowMsc<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.show_word(self.1.word()))
    }
}

/// Swap-closure of a word: every word reachable by adjacent swaps of
/// commuting arrows. Independent of the normal-form machinery.
pub fn swap_closure(word: &[Arrow]) -> BTreeSet<Vec<Arrow>> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![word.to_vec()];
    while let Some(w) = stack.pop() {
        if !seen.insert(w.clone()) {
            continue;
        }
        for i in 0..w.len().saturating_sub(1) {
            if commute(&w[i], &w[i + 1]) {
                let mut v = w.clone();
                v.swap(i, i + 1);
                if !seen.contains(&v) {
                    stack.push(v);
                }
            }
        }
    }
    seen
}
