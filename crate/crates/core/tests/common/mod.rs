//! Shared fixtures, random generators and brute-force oracles for the
//! integration tests. The oracles reimplement word acceptance, commutation
//! and canonical forms from scratch so they do not share code with the
//! library.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};
use std::path::PathBuf;
use std::sync::Arc;

use gtcheck_core::automata::Nfa;
use gtcheck_core::formats::parse_gt;
use gtcheck_core::gtype::GlobalType;
use gtcheck_core::trace::{Arrow, Declaration};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub const FIXTURES: [&str; 8] = ["gsd", "g0", "branch", "real", "nonreal", "deadlock", "cross", "single"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.gt"))
}

pub fn fixture(name: &str) -> GlobalType {
    let src = std::fs::read_to_string(fixture_path(name)).unwrap();
    parse_gt(&src).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixtures() -> Vec<GlobalType> {
    FIXTURES.iter().map(|n| fixture(n)).collect()
}

pub fn arrows(g: &GlobalType, text: &str) -> Vec<Arrow> {
    g.decl().parse_word(text).unwrap()
}

pub fn arrow(g: &GlobalType, text: &str) -> Arrow {
    g.decl().parse_arrow(text).unwrap()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Brute-force oracles

/// Word acceptance by direct simulation of the transition list.
pub fn accepts(nfa: &Nfa<Arrow>, w: &[Arrow]) -> bool {
    let edges: Vec<(usize, Option<Arrow>, usize)> = nfa.transitions().map(|(s, l, t)| (s, l.copied(), t)).collect();
    let close = |mut set: BTreeSet<usize>| {
        loop {
            let more: Vec<usize> = edges
                .iter()
                .filter(|(s, l, t)| l.is_none() && set.contains(s) && !set.contains(t))
                .map(|e| e.2)
                .collect();
            if more.is_empty() {
                return set;
            }
            set.extend(more);
        }
    };
    let mut cur = close(nfa.initial_states().clone());
    for a in w {
        let next = edges
            .iter()
            .filter(|(s, l, _)| cur.contains(s) && *l == Some(*a))
            .map(|e| e.2)
            .collect();
        cur = close(next);
    }
    cur.iter().any(|&s| nfa.is_accepting(s))
}

pub fn all_words(alphabet: &[Arrow], max_len: usize) -> Vec<Vec<Arrow>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in alphabet {
                let mut v: Vec<Arrow> = w.clone();
                v.push(*a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn accepted_words(nfa: &Nfa<Arrow>, max_len: usize) -> BTreeSet<Vec<Arrow>> {
    all_words(nfa.alphabet(), max_len)
        .into_iter()
        .filter(|w| accepts(nfa, w))
        .collect()
}

pub fn independent(a: &Arrow, b: &Arrow) -> bool {
    let pa = [a.sender, a.receiver];
    !pa.contains(&b.sender) && !pa.contains(&b.receiver)
}

/// All words reachable from `w` by adjacent swaps of independent arrows.
pub fn trace_class(w: &[Arrow]) -> BTreeSet<Vec<Arrow>> {
    let mut seen = BTreeSet::from([w.to_vec()]);
    let mut queue = VecDeque::from([w.to_vec()]);
    while let Some(u) = queue.pop_front() {
        for i in 0..u.len().saturating_sub(1) {
            if independent(&u[i], &u[i + 1]) {
                let mut v = u.clone();
                v.swap(i, i + 1);
                if seen.insert(v.clone()) {
                    queue.push_back(v);
                }
            }
        }
    }
    seen
}

pub fn canon(w: &[Arrow]) -> Vec<Arrow> {
    trace_class(w).into_iter().next().unwrap()
}

/// Canonical words of every trace with at most `n` events.
pub fn universe(alphabet: &[Arrow], n: usize) -> BTreeSet<Vec<Arrow>> {
    all_words(alphabet, n).iter().map(|w| canon(w)).collect()
}

pub fn exists(nfa: &Nfa<Arrow>, w: &[Arrow]) -> bool {
    trace_class(w).iter().any(|u| accepts(nfa, u))
}

pub fn forall(nfa: &Nfa<Arrow>, w: &[Arrow]) -> bool {
    trace_class(w).iter().all(|u| accepts(nfa, u))
}

pub fn bounded_exists(nfa: &Nfa<Arrow>, n: usize) -> BTreeSet<Vec<Arrow>> {
    accepted_words(nfa, n).iter().map(|w| canon(w)).collect()
}

/// First accepted word of length at most `n` with a rejected single swap.
pub fn swap_violation(nfa: &Nfa<Arrow>, n: usize) -> Option<(Vec<Arrow>, Vec<Arrow>)> {
    for w in accepted_words(nfa, n) {
        for i in 0..w.len().saturating_sub(1) {
            if independent(&w[i], &w[i + 1]) {
                let mut v = w.clone();
                v.swap(i, i + 1);
                if !accepts(nfa, &v) {
                    return Some((w, v));
                }
            }
        }
    }
    None
}

pub fn differ_by_one_swap(w: &[Arrow], v: &[Arrow]) -> bool {
    w.len() == v.len()
        && (0..w.len().saturating_sub(1)).any(|i| {
            independent(&w[i], &w[i + 1]) && {
                let mut u = w.to_vec();
                u.swap(i, i + 1);
                u == v
            }
        })
}

// ---------------------------------------------------------------------------
// Random global types

pub fn declaration(processes: usize, messages: usize) -> Arc<Declaration> {
    let ps: Vec<String> = ["p", "q", "r", "s", "t"][..processes].iter().map(|s| s.to_string()).collect();
    let ms: Vec<String> = (0..messages).map(|i| format!("m{i}")).collect();
    Arc::new(Declaration::new(ps, ms).unwrap())
}

pub fn all_arrows(decl: &Declaration) -> Vec<Arrow> {
    let mut out = Vec::new();
    for s in decl.processes() {
        for r in decl.processes() {
            if s == r {
                continue;
            }
            for m in decl.messages() {
                out.push(Arrow {
                    sender: s,
                    receiver: r,
                    message: m,
                });
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub processes: usize,
    pub messages: usize,
    pub min_states: usize,
    pub max_states: usize,
    pub max_arrows: usize,
    /// Probability that a state offers a given arrow.
    pub density: f64,
    pub deterministic: bool,
    /// Choices at each state pairwise dependent.
    pub commutation_deterministic: bool,
}

impl Shape {
    pub fn small(processes: usize) -> Shape {
        Shape {
            processes,
            messages: 2,
            min_states: 1,
            max_states: 4,
            max_arrows: 4,
            density: 0.4,
            deterministic: false,
            commutation_deterministic: false,
        }
    }
}

pub fn random_type(rng: &mut StdRng, shape: Shape, name: &str) -> GlobalType {
    let decl = declaration(shape.processes, shape.messages);
    let mut pool = all_arrows(&decl);
    pool.shuffle(rng);
    let k = rng.random_range(1..=shape.max_arrows);
    let arrows: Vec<Arrow> = pool[..k].to_vec();
    random_over(rng, shape, name, decl, &arrows)
}

pub fn random_over(rng: &mut StdRng, shape: Shape, name: &str, decl: Arc<Declaration>, arrows: &[Arrow]) -> GlobalType {
    let n = rng.random_range(shape.min_states..=shape.max_states);
    let mut nfa = Nfa::new(arrows.iter().copied());
    for i in 0..n {
        nfa.add_state(format!("s{i}"), rng.random_bool(0.5));
    }
    let acc = rng.random_range(0..n);
    nfa.set_accepting(acc, true).unwrap();
    nfa.set_initial(0).unwrap();
    if !shape.deterministic && !shape.commutation_deterministic && n > 1 && rng.random_bool(0.3) {
        nfa.set_initial(rng.random_range(1..n)).unwrap();
    }
    for s in 0..n {
        let mut offered: Vec<Arrow> = Vec::new();
        let mut order = arrows.to_vec();
        order.shuffle(rng);
        for a in order {
            if !rng.random_bool(shape.density) {
                continue;
            }
            if shape.commutation_deterministic && offered.iter().any(|b| independent(&a, b)) {
                continue;
            }
            offered.push(a);
            nfa.add_transition(s, Some(&a), rng.random_range(0..n)).unwrap();
            if !shape.deterministic && !shape.commutation_deterministic && rng.random_bool(0.2) {
                nfa.add_transition(s, Some(&a), rng.random_range(0..n)).unwrap();
            }
        }
    }
    GlobalType::new(name, decl, nfa).unwrap()
}
