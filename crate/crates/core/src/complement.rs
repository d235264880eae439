//! Complementation of global types with respect to the synchronous MSC
//! universe, and bounded verification of complements.

use serde::Serialize;

use crate::automata::Nfa;
use crate::gtype::{sync_product, GlobalType, GtError};
use crate::oracle::{enumerate_canonical_with, Limits, Side, Violation};
use crate::realisability::check_sync_realisable;
use crate::trace::{commute, Arrow};

pub const DEFAULT_VERIFY_BOUND: usize = 6;

pub const CARTESIAN_NOTE: &str = "under-approximation, exactness not guaranteed";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dual,
    Cartesian,
    Renunciation,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Dual => "dual",
            Method::Cartesian => "cartesian",
            Method::Renunciation => "renunciation",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dual" => Ok(Method::Dual),
            "cartesian" => Ok(Method::Cartesian),
            "renunciation" => Ok(Method::Renunciation),
            other => Err(format!("unknown complementation method `{other}`")),
        }
    }
}

/// A complement together with how it was obtained.
#[derive(Clone, Debug)]
pub struct Complement {
    pub gtype: GlobalType,
    pub method: Method,
    /// The input had to be determinised first.
    pub determinised: bool,
    pub note: Option<String>,
}

/// Dual of the completed DFA. Requires a deterministic type that is
/// commutation-closed or has at most three participants.
pub fn complement_dual(g: &GlobalType) -> Result<GlobalType, GtError> {
    if !g.is_deterministic() {
        return Err(GtError::Classification(
            "dual complement requires a deterministic type".into(),
        ));
    }
    if g.participants().len() > 3 && !g.is_commutation_closed() {
        return Err(GtError::Classification(
            "dual complement requires a commutation-closed type or at most three participants".into(),
        ));
    }
    let dfa = g.dfa()?;
    Ok(g.derived(format!("{}_dual", g.name()), dfa.dual().to_nfa()))
}

/// Dual of the determinised synchronous product of the projections. Exact
/// when the type is deadlock-free realisable in the synchronous model, an
/// under-approximation of the complement otherwise.
pub fn complement_cartesian(g: &GlobalType) -> Complement {
    let product = sync_product(&g.project(), "product");
    let nfa = product.automaton().determinise().dual().to_nfa();
    Complement {
        gtype: g.derived(format!("{}_cartesian", g.name()), nfa),
        method: Method::Cartesian,
        determinised: false,
        note: Some(CARTESIAN_NOTE.into()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RenunciationStats {
    /// Size of the full state set `S ∪ S̄ ∪ (S ∪ S̄)×Arrows ∪ {s_acc}`.
    pub unpruned_states: usize,
    /// States reachable from the initial state.
    pub states: usize,
}

pub fn complement_renunciation(g: &GlobalType) -> Result<GlobalType, GtError> {
    renunciation_with_stats(g).map(|(out, _)| out)
}

/// The renunciation complement of a commutation-deterministic type.
pub fn renunciation_with_stats(g: &GlobalType) -> Result<(GlobalType, RenunciationStats), GtError> {
    if !g.is_commutation_deterministic() {
        return Err(GtError::Classification(
            "renunciation complement requires a commutation-deterministic type".into(),
        ));
    }
    let dfa = g.dfa()?;
    let decl = g.decl();
    let arrows: Vec<Arrow> = g.arrows().to_vec();
    let n = dfa.num_states();
    let k = arrows.len();
    let plain = |s: usize| s;
    let bar = |s: usize| n + s;
    let pending = |s: usize, a: usize| 2 * n + s * k + a;
    let pending_bar = |s: usize, a: usize| 2 * n + n * k + s * k + a;
    let acc = 2 * n + 2 * n * k;

    let mut nfa = Nfa::new(arrows.iter().copied());
    for s in 0..n {
        nfa.add_state(dfa.state_name(s).to_string(), !dfa.is_accepting(s));
    }
    for s in 0..n {
        nfa.add_state(format!("{}_bar", dfa.state_name(s)), true);
    }
    for s in 0..n {
        for a in &arrows {
            nfa.add_state(format!("({},{})", dfa.state_name(s), decl.show_arrow(a)), false);
        }
    }
    for s in 0..n {
        for a in &arrows {
            nfa.add_state(format!("({}_bar,{})", dfa.state_name(s), decl.show_arrow(a)), false);
        }
    }
    nfa.add_state("s_acc", true);
    let unpruned_states = nfa.num_states();
    debug_assert_eq!(unpruned_states, 2 * n * (1 + k) + 1);

    nfa.set_initial(plain(dfa.initial())).expect("in range");
    for s in 0..n {
        let choice: Vec<bool> = (0..k).map(|l| dfa.next(s, l).is_some()).collect();
        for l in 0..k {
            match dfa.next(s, l) {
                Some(t) => nfa.push_edge(plain(s), Some(l), plain(t)),
                None => {
                    nfa.push_edge(plain(s), Some(l), bar(s));
                    nfa.push_edge(bar(s), Some(l), bar(s));
                }
            }
        }
        for a in (0..k).filter(|&a| choice[a]) {
            for b in (0..k).filter(|&b| !choice[b]) {
                if commute(&arrows[a], &arrows[b]) {
                    nfa.push_edge(plain(s), Some(b), pending(s, a));
                    nfa.push_edge(pending(s, a), Some(b), pending(s, a));
                } else {
                    nfa.push_edge(plain(s), Some(b), pending_bar(s, a));
                    nfa.push_edge(pending(s, a), Some(b), pending_bar(s, a));
                }
                nfa.push_edge(pending_bar(s, a), Some(b), pending_bar(s, a));
            }
            nfa.push_edge(pending_bar(s, a), Some(a), acc);
        }
    }
    for l in 0..k {
        nfa.push_edge(acc, Some(l), acc);
    }
    let pruned = nfa.accessible_part();
    let stats = RenunciationStats {
        unpruned_states,
        states: pruned.num_states(),
    };
    Ok((g.derived(format!("{}_renunciation", g.name()), pruned), stats))
}

/// Tries dual, then renunciation, then a self-checked Cartesian complement.
pub fn complement_auto(g: &GlobalType, check_bound: usize) -> Result<Complement, GtError> {
    let determinised = !g.is_deterministic();
    let d = if determinised { g.determinise() } else { g.clone() };
    if d.participants().len() <= 3 || d.is_commutation_closed() {
        return Ok(Complement {
            gtype: complement_dual(&d)?,
            method: Method::Dual,
            determinised,
            note: None,
        });
    }
    if d.is_commutation_deterministic() {
        return Ok(Complement {
            gtype: complement_renunciation(&d)?,
            method: Method::Renunciation,
            determinised,
            note: None,
        });
    }
    let cart = complement_cartesian(g);
    let verified = verify_complement(g, &cart.gtype, check_bound)?.passed;
    if verified && check_sync_realisable(g, &cart.gtype)?.realisable() {
        return Ok(Complement {
            note: Some(format!(
                "type is realisable in the synchronous model; complement verified up to {check_bound} events"
            )),
            ..cart
        });
    }
    Err(GtError::Classification(
        "no applicable complementation procedure; the type may be non-complementable".into(),
    ))
}

/// Bounded check that exactly one of `g`, `gbar` claims each MSC.
#[derive(Clone, Debug)]
pub struct ComplementReport {
    pub max_events: usize,
    pub mscs_checked: usize,
    pub violations: Vec<Violation>,
    pub passed: bool,
}

pub const VERIFY_NOTE: &str = "bounded check: a pass is necessary but not sufficient for complementarity";

pub fn verify_complement(g: &GlobalType, gbar: &GlobalType, max_events: usize) -> Result<ComplementReport, GtError> {
    verify_complement_with(g, gbar, max_events, &Limits::default())
}

pub fn verify_complement_with(
    g: &GlobalType,
    gbar: &GlobalType,
    max_events: usize,
    limits: &Limits,
) -> Result<ComplementReport, GtError> {
    g.check_compatible(gbar)?;
    let universe = enumerate_canonical_with(g.arrows(), max_events, limits)?;
    let mut violations = Vec::new();
    for m in &universe {
        match (g.member_existential(m), gbar.member_existential(m)) {
            (true, true) => violations.push(Violation {
                msc: m.clone(),
                side: Side::Both,
            }),
            (false, false) => violations.push(Violation {
                msc: m.clone(),
                side: Side::Neither,
            }),
            _ => {}
        }
    }
    Ok(ComplementReport {
        max_events,
        mscs_checked: universe.len(),
        passed: violations.is_empty(),
        violations,
    })
}
