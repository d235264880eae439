//! Brute-force ground truth over bounded MSC universes.
//!
//! Everything here works by enumerating words and canonicalising them, and
//! is meant to be obviously correct rather than fast.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::gtype::GlobalType;
use crate::trace::{Arrow, Msc};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{count} arrows exceed the oracle limit of {limit}")]
    TooManyArrows { count: usize, limit: usize },
    #[error("{requested} events exceed the oracle limit of {limit}")]
    TooManyEvents { requested: usize, limit: usize },
    #[error("more than {limit} MSCs; raise the limit or lower the bound")]
    TooManyMscs { limit: usize },
    #[error("the language must be over exactly the three given arrows")]
    WrongAlphabet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_arrows: usize,
    pub max_events: usize,
    pub max_mscs: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_arrows: 8,
            max_events: 8,
            max_mscs: 1_000_000,
        }
    }
}

/// Every canonical trace over `arrows` with at most `max_events` events.
pub fn enumerate_canonical(arrows: &[Arrow], max_events: usize) -> Result<BTreeSet<Msc>, OracleError> {
    enumerate_canonical_with(arrows, max_events, &Limits::default())
}

pub fn enumerate_canonical_with(
    arrows: &[Arrow],
    max_events: usize,
    limits: &Limits,
) -> Result<BTreeSet<Msc>, OracleError> {
    let mut arrows = arrows.to_vec();
    arrows.sort();
    arrows.dedup();
    if arrows.len() > limits.max_arrows {
        return Err(OracleError::TooManyArrows {
            count: arrows.len(),
            limit: limits.max_arrows,
        });
    }
    if max_events > limits.max_events {
        return Err(OracleError::TooManyEvents {
            requested: max_events,
            limit: limits.max_events,
        });
    }
    // Prefixes of normal forms are normal, so extending only normal words
    // by one letter and re-canonicalising reaches every class once.
    let mut out = BTreeSet::new();
    let mut frontier = vec![Vec::<Arrow>::new()];
    out.insert(Msc::empty());
    for _ in 0..max_events {
        let mut next = Vec::new();
        for w in &frontier {
            for a in &arrows {
                let mut v = w.clone();
                v.push(*a);
                let m = Msc::of(&v);
                if m.word() == v.as_slice() {
                    out.insert(m);
                    next.push(v);
                    if out.len() > limits.max_mscs {
                        return Err(OracleError::TooManyMscs { limit: limits.max_mscs });
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// `{msc(w) | w ∈ L(G), |w| ≤ max_events}` by word enumeration.
pub fn bounded_existential(g: &GlobalType, max_events: usize) -> Result<BTreeSet<Msc>, OracleError> {
    let limits = Limits::default();
    if max_events > limits.max_events {
        return Err(OracleError::TooManyEvents {
            requested: max_events,
            limit: limits.max_events,
        });
    }
    Ok(g.automaton()
        .words_up_to(max_events)
        .iter()
        .map(|w| Msc::of(w))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Claimed by both languages.
    Both,
    /// Claimed by neither.
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub msc: Msc,
    pub side: Side,
}

/// MSCs of the bounded universe that are not in exactly one of the two
/// bounded existential languages.
pub fn xor_check(g: &GlobalType, gbar: &GlobalType, max_events: usize) -> Result<Vec<Violation>, OracleError> {
    let mut arrows: Vec<Arrow> = g.arrows().to_vec();
    arrows.extend_from_slice(gbar.arrows());
    let universe = enumerate_canonical(&arrows, max_events)?;
    let left = bounded_existential(g, max_events)?;
    let right = bounded_existential(gbar, max_events)?;
    Ok(universe
        .into_iter()
        .filter_map(|m| match (left.contains(&m), right.contains(&m)) {
            (true, true) => Some(Violation { msc: m, side: Side::Both }),
            (false, false) => Some(Violation { msc: m, side: Side::Neither }),
            _ => None,
        })
        .collect())
}

#[derive(Clone, Debug, Default)]
pub struct CountProfileReport {
    pub words_checked: usize,
    /// Accepted words whose trace is `m1^k1 m2^k2 m3^k3`.
    pub block_words: usize,
    pub violations: Vec<(Vec<Arrow>, [usize; 3])>,
}

impl CountProfileReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every accepted word of length at most `max_len` whose trace is the
/// block word `m1^k1 m2^k2 m3^k3`, checks `predicate(k1, k2, k3)`.
/// Violations come in length-lexicographic order.
pub fn count_profile_check(
    g: &GlobalType,
    letters: [Arrow; 3],
    predicate: impl Fn(usize, usize, usize) -> bool,
    max_len: usize,
) -> Result<CountProfileReport, OracleError> {
    let mut expected = letters.to_vec();
    expected.sort();
    expected.dedup();
    if g.arrows() != expected.as_slice() {
        return Err(OracleError::WrongAlphabet);
    }
    let mut report = CountProfileReport::default();
    for w in g.automaton().words_up_to(max_len) {
        report.words_checked += 1;
        let k = letters.map(|l| w.iter().filter(|a| **a == l).count());
        let block: Vec<Arrow> = (0..3)
            .flat_map(|i| std::iter::repeat_n(letters[i], k[i]))
            .collect();
        if Msc::of(&w) != Msc::of(&block) {
            continue;
        }
        report.block_words += 1;
        if !predicate(k[0], k[1], k[2]) {
            report.violations.push((w, k));
        }
    }
    Ok(report)
}
