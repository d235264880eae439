//! Communicating finite-state machines under the synchronous and p2p models.
//!
//! In the p2p model every ordered pair of processes has its own FIFO
//! channel. Exploration is bounded: a send is disabled once its channel
//! holds `bound` messages, and every report says when that happened.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::automata::Nfa;
use crate::trace::{Arrow, Declaration, EventSet, MessageLabel, ProcessId, TraceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("receive at position {0} has no valid matching send")]
    InvalidMatching(usize),
    #[error("action {action} does not belong to process {process}")]
    ForeignAction { process: String, action: String },
    #[error("system must have exactly one machine per declared process")]
    MachineCount,
    #[error("local automata must not contain epsilon moves")]
    EpsilonMove,
    #[error("message sequence chart order is cyclic")]
    CyclicOrder,
    #[error(transparent)]
    Trace(#[from] TraceError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Send,
    Receive,
}

/// A local action: the send or the receive half of an arrow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action {
    pub arrow: Arrow,
    pub direction: Direction,
}

impl Action {
    pub fn send(arrow: Arrow) -> Self {
        Action {
            arrow,
            direction: Direction::Send,
        }
    }

    pub fn receive(arrow: Arrow) -> Self {
        Action {
            arrow,
            direction: Direction::Receive,
        }
    }

    /// The process performing the action.
    pub fn owner(&self) -> ProcessId {
        match self.direction {
            Direction::Send => self.arrow.sender,
            Direction::Receive => self.arrow.receiver,
        }
    }

    pub fn peer(&self) -> ProcessId {
        match self.direction {
            Direction::Send => self.arrow.receiver,
            Direction::Receive => self.arrow.sender,
        }
    }

    /// `p!q:m` for sends, `q?p:m` for receives.
    pub fn show(&self, decl: &Declaration) -> String {
        let op = match self.direction {
            Direction::Send => '!',
            Direction::Receive => '?',
        };
        format!(
            "{}{}{}:{}",
            decl.process_name(self.owner()),
            op,
            decl.process_name(self.peer()),
            decl.message_name(self.arrow.message)
        )
    }

    pub fn parse(decl: &Declaration, text: &str) -> Result<Action, TraceError> {
        let malformed = || TraceError::MalformedArrow(text.to_string());
        let (pos, direction) = text
            .char_indices()
            .find_map(|(i, c)| match c {
                '!' => Some((i, Direction::Send)),
                '?' => Some((i, Direction::Receive)),
                _ => None,
            })
            .ok_or_else(malformed)?;
        let owner = &text[..pos];
        let (peer, message) = text[pos + 1..].split_once(':').ok_or_else(malformed)?;
        if ![owner, peer, message].iter().all(|s| crate::trace::is_identifier(s)) {
            return Err(malformed());
        }
        let arrow = match direction {
            Direction::Send => decl.arrow(owner, peer, message)?,
            Direction::Receive => decl.arrow(peer, owner, message)?,
        };
        Ok(Action { arrow, direction })
    }
}

/// The local automaton of one process.
#[derive(Clone, Debug)]
pub struct Cfsm {
    process: ProcessId,
    automaton: Nfa<Action>,
}

impl Cfsm {
    pub fn new(process: ProcessId, automaton: Nfa<Action>, decl: &Declaration) -> Result<Self, SemanticsError> {
        if automaton.has_epsilon() {
            return Err(SemanticsError::EpsilonMove);
        }
        if let Some(a) = automaton.alphabet().iter().find(|a| a.owner() != process) {
            return Err(SemanticsError::ForeignAction {
                process: decl.process_name(process).to_string(),
                action: a.show(decl),
            });
        }
        Ok(Cfsm { process, automaton })
    }

    pub fn process(&self) -> ProcessId {
        self.process
    }

    pub fn automaton(&self) -> &Nfa<Action> {
        &self.automaton
    }

    /// Successors of local state `s` on `action`.
    pub fn successors(&self, s: usize, action: &Action) -> Vec<usize> {
        match self.automaton.letter_index(action) {
            None => Vec::new(),
            Some(i) => self
                .automaton
                .out_edges(s)
                .iter()
                .filter(|(l, _)| *l == Some(i))
                .map(|(_, t)| *t)
                .collect(),
        }
    }
}

/// One CFSM per declared process, plus the arrow alphabet they realise.
#[derive(Clone, Debug)]
pub struct System {
    decl: Arc<Declaration>,
    arrows: Vec<Arrow>,
    machines: Vec<Cfsm>,
}

impl System {
    pub fn new(decl: Arc<Declaration>, arrows: Vec<Arrow>, machines: Vec<Cfsm>) -> Result<Self, SemanticsError> {
        if machines.len() != decl.process_count()
            || machines.iter().enumerate().any(|(i, m)| m.process.0 as usize != i)
        {
            return Err(SemanticsError::MachineCount);
        }
        let mut arrows = arrows;
        arrows.sort();
        arrows.dedup();
        Ok(System { decl, arrows, machines })
    }

    pub fn decl(&self) -> &Arc<Declaration> {
        &self.decl
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn machines(&self) -> &[Cfsm] {
        &self.machines
    }

    pub fn machine(&self, p: ProcessId) -> &Cfsm {
        &self.machines[p.0 as usize]
    }

    fn initial_tuples(&self) -> Vec<Vec<usize>> {
        let mut tuples = vec![Vec::new()];
        for m in &self.machines {
            let mut next = Vec::new();
            for t in &tuples {
                for &s in m.automaton.initial_states() {
                    let mut v = t.clone();
                    v.push(s);
                    next.push(v);
                }
            }
            tuples = next;
        }
        tuples
    }

    fn all_accepting(&self, locals: &[usize]) -> bool {
        self.machines
            .iter()
            .zip(locals)
            .all(|(m, &s)| m.automaton.is_accepting(s))
    }
}

/// Reachable synchronous configurations (tuples of local states).
#[derive(Clone, Debug)]
pub struct SyncGraph {
    pub configs: Vec<Vec<usize>>,
    pub initial: Vec<usize>,
    pub accepting: Vec<bool>,
    pub edges: Vec<(usize, Arrow, usize)>,
}

impl SyncGraph {
    pub fn to_nfa(&self, system: &System) -> Nfa<Arrow> {
        let mut nfa = Nfa::new(system.arrows.iter().copied());
        for (i, c) in self.configs.iter().enumerate() {
            let name = c
                .iter()
                .zip(&system.machines)
                .map(|(&s, m)| m.automaton.state_name(s).to_string())
                .collect::<Vec<_>>()
                .join(",");
            nfa.add_state(format!("<{name}>"), self.accepting[i]);
        }
        for &i in &self.initial {
            nfa.set_initial(i).expect("in range");
        }
        for (s, a, t) in &self.edges {
            nfa.add_transition(*s, Some(a), *t).expect("arrow in alphabet");
        }
        nfa
    }
}

/// Rendezvous semantics: an arrow fires when its sender and receiver step
/// together on the matching actions.
pub fn sync_explore(system: &System) -> SyncGraph {
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut graph = SyncGraph {
        configs: Vec::new(),
        initial: Vec::new(),
        accepting: Vec::new(),
        edges: Vec::new(),
    };
    let mut queue = VecDeque::new();
    for t in system.initial_tuples() {
        if !index.contains_key(&t) {
            index.insert(t.clone(), graph.configs.len());
            graph.initial.push(graph.configs.len());
            graph.accepting.push(system.all_accepting(&t));
            graph.configs.push(t.clone());
            queue.push_back(t);
        }
    }
    while let Some(c) = queue.pop_front() {
        let from = index[&c];
        for a in &system.arrows {
            let sp = a.sender.0 as usize;
            let rp = a.receiver.0 as usize;
            let sends = system.machines[sp].successors(c[sp], &Action::send(*a));
            let recvs = system.machines[rp].successors(c[rp], &Action::receive(*a));
            for &s in &sends {
                for &r in &recvs {
                    let mut next = c.clone();
                    next[sp] = s;
                    next[rp] = r;
                    let to = match index.get(&next) {
                        Some(&to) => to,
                        None => {
                            let to = graph.configs.len();
                            index.insert(next.clone(), to);
                            graph.accepting.push(system.all_accepting(&next));
                            graph.configs.push(next.clone());
                            queue.push_back(next);
                            to
                        }
                    };
                    graph.edges.push((from, *a, to));
                }
            }
        }
    }
    graph
}

// ---------------------------------------------------------------------------
// p2p executions and MSCs

/// One event of an execution. Receives carry the index of their send.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Event {
    pub direction: Direction,
    pub arrow: Arrow,
    pub source: Option<usize>,
}

impl Event {
    pub fn owner(&self) -> ProcessId {
        Action {
            arrow: self.arrow,
            direction: self.direction,
        }
        .owner()
    }
}

/// A sequence of send and receive events with a matching.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Execution {
    events: Vec<Event>,
}

impl Execution {
    /// Checks that every receive is matched to an earlier send of the same
    /// arrow, injectively, and that sends carry no source.
    pub fn new(events: Vec<Event>) -> Result<Self, SemanticsError> {
        let mut used = HashSet::new();
        for (i, e) in events.iter().enumerate() {
            match e.direction {
                Direction::Send => {
                    if e.source.is_some() {
                        return Err(SemanticsError::InvalidMatching(i));
                    }
                }
                Direction::Receive => {
                    let ok = e.source.is_some_and(|j| {
                        j < i
                            && events[j].direction == Direction::Send
                            && events[j].arrow == e.arrow
                            && used.insert(j)
                    });
                    if !ok {
                        return Err(SemanticsError::InvalidMatching(i));
                    }
                }
            }
        }
        Ok(Execution { events })
    }

    /// Builds an execution from actions, matching each receive with the
    /// oldest unmatched send on its channel.
    pub fn from_actions_fifo(actions: &[Action]) -> Result<Self, SemanticsError> {
        let mut pending: HashMap<(ProcessId, ProcessId), VecDeque<usize>> = HashMap::new();
        let mut events = Vec::with_capacity(actions.len());
        for (i, a) in actions.iter().enumerate() {
            let key = (a.arrow.sender, a.arrow.receiver);
            let source = match a.direction {
                Direction::Send => {
                    pending.entry(key).or_default().push_back(i);
                    None
                }
                Direction::Receive => {
                    let src = pending
                        .get_mut(&key)
                        .and_then(VecDeque::pop_front)
                        .ok_or(SemanticsError::InvalidMatching(i))?;
                    Some(src)
                }
            };
            events.push(Event {
                direction: a.direction,
                arrow: a.arrow,
                source,
            });
        }
        Execution::new(events)
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Index of the receive matched with send `i`.
    pub fn receive_of(&self, i: usize) -> Option<usize> {
        self.events.iter().position(|e| e.source == Some(i))
    }

    pub fn unmatched_sends(&self) -> Vec<usize> {
        (0..self.events.len())
            .filter(|&i| self.events[i].direction == Direction::Send && self.receive_of(i).is_none())
            .collect()
    }

    pub fn show(&self, decl: &Declaration) -> String {
        self.events
            .iter()
            .map(|e| {
                Action {
                    arrow: e.arrow,
                    direction: e.direction,
                }
                .show(decl)
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// An event of a [`P2pMsc`] lane. `partner` is the matched event as
/// `(process, lane position)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MscEvent {
    pub direction: Direction,
    pub arrow: Arrow,
    pub partner: Option<(ProcessId, usize)>,
}

/// Per-process event sequences with a send/receive matching. The partial
/// order is process order joined with the matching, transitively closed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct P2pMsc {
    lanes: Vec<Vec<MscEvent>>,
}

/// A scheduling unit of an RSC linearisation, as node ids of a [`P2pMsc`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RscBlock {
    Pair { send: usize, receive: usize },
    Unmatched { send: usize },
}

impl P2pMsc {
    pub fn new(lanes: Vec<Vec<MscEvent>>) -> Result<Self, SemanticsError> {
        let msc = P2pMsc { lanes };
        for (p, lane) in msc.lanes.iter().enumerate() {
            for (i, e) in lane.iter().enumerate() {
                if let Some((q, j)) = e.partner {
                    let back = msc
                        .lanes
                        .get(q.0 as usize)
                        .and_then(|l| l.get(j))
                        .and_then(|o| o.partner);
                    if back != Some((ProcessId(p as u32), i)) {
                        return Err(SemanticsError::InvalidMatching(i));
                    }
                } else if e.direction == Direction::Receive {
                    return Err(SemanticsError::InvalidMatching(i));
                }
            }
        }
        if msc.predecessors_checked().is_none() {
            return Err(SemanticsError::CyclicOrder);
        }
        Ok(msc)
    }

    pub fn lanes(&self) -> &[Vec<MscEvent>] {
        &self.lanes
    }

    pub fn num_events(&self) -> usize {
        self.lanes.iter().map(Vec::len).sum()
    }

    fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.lanes.len());
        let mut acc = 0;
        for l in &self.lanes {
            out.push(acc);
            acc += l.len();
        }
        out
    }

    /// Node id of `(process, position)`.
    pub fn node(&self, p: ProcessId, i: usize) -> usize {
        self.offsets()[p.0 as usize] + i
    }

    /// `(process, position, event)` for every node id.
    pub fn nodes(&self) -> Vec<(ProcessId, usize, MscEvent)> {
        self.lanes
            .iter()
            .enumerate()
            .flat_map(|(p, l)| l.iter().enumerate().map(move |(i, e)| (ProcessId(p as u32), i, *e)))
            .collect()
    }

    fn predecessors_checked(&self) -> Option<Vec<EventSet>> {
        let n = self.num_events();
        let offs = self.offsets();
        let mut direct: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (p, lane) in self.lanes.iter().enumerate() {
            for (i, e) in lane.iter().enumerate() {
                let id = offs[p] + i;
                if i > 0 {
                    direct[id].push(id - 1);
                }
                if let (Direction::Receive, Some((q, j))) = (e.direction, e.partner) {
                    direct[id].push(offs[q.0 as usize] + j);
                }
            }
        }
        // topological order, then closure
        let mut indeg: Vec<usize> = direct.iter().map(Vec::len).collect();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (v, ps) in direct.iter().enumerate() {
            for &u in ps {
                succ[u].push(v);
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(u) = queue.pop_front() {
            topo.push(u);
            for &v in &succ[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
        if topo.len() != n {
            return None;
        }
        let mut preds = vec![EventSet::empty(n); n];
        for &v in &topo {
            let mut set = EventSet::empty(n);
            for &u in &direct[v] {
                set.insert(u);
                set.union_with(&preds[u]);
            }
            preds[v] = set;
        }
        Some(preds)
    }

    /// Strict predecessors of each node in the MSC order.
    pub fn predecessors(&self) -> Vec<EventSet> {
        self.predecessors_checked().expect("acyclic by construction")
    }

    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.predecessors()[b].contains(a)
    }

    /// Every linear extension of the order, as an execution.
    pub fn linearisations(&self, limit: usize) -> Result<Vec<Execution>, TraceError> {
        let n = self.num_events();
        if n > limit {
            return Err(TraceError::TooLarge { size: n, limit });
        }
        let preds = self.predecessors();
        let nodes = self.nodes();
        let mut out = Vec::new();
        let mut order = Vec::with_capacity(n);
        let mut done = EventSet::empty(n);
        self.extend(&preds, &mut done, &mut order, &mut out);
        Ok(out
            .into_iter()
            .map(|order| self.execution_from_order(&nodes, &order))
            .collect())
    }

    fn extend(&self, preds: &[EventSet], done: &mut EventSet, order: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let n = preds.len();
        if order.len() == n {
            out.push(order.clone());
            return;
        }
        for v in 0..n {
            if !done.contains(v) && preds[v].is_subset(done) {
                done.insert(v);
                order.push(v);
                self.extend(preds, done, order, out);
                order.pop();
                done.remove(v);
            }
        }
    }

    fn execution_from_order(&self, nodes: &[(ProcessId, usize, MscEvent)], order: &[usize]) -> Execution {
        let mut position = vec![0; order.len()];
        for (k, &v) in order.iter().enumerate() {
            position[v] = k;
        }
        let events = order
            .iter()
            .map(|&v| {
                let (_, _, e) = nodes[v];
                let source = match (e.direction, e.partner) {
                    (Direction::Receive, Some((q, j))) => Some(position[self.node(q, j)]),
                    _ => None,
                };
                Event {
                    direction: e.direction,
                    arrow: e.arrow,
                    source,
                }
            })
            .collect();
        Execution::new(events).expect("linear extensions respect the matching")
    }

    /// A linearisation where each receive directly follows its send, if one
    /// exists.
    pub fn rsc_schedule(&self) -> Option<Vec<RscBlock>> {
        let n = self.num_events();
        let preds = self.predecessors();
        let nodes = self.nodes();
        let partner: Vec<Option<usize>> = nodes
            .iter()
            .map(|(_, _, e)| e.partner.map(|(q, j)| self.node(q, j)))
            .collect();
        let mut failed = HashSet::new();
        let mut schedule = Vec::new();
        let mut done = EventSet::empty(n);
        fn search(
            n: usize,
            nodes: &[(ProcessId, usize, MscEvent)],
            partner: &[Option<usize>],
            preds: &[EventSet],
            done: &mut EventSet,
            schedule: &mut Vec<RscBlock>,
            failed: &mut HashSet<EventSet>,
        ) -> bool {
            if done.len() == n {
                return true;
            }
            if failed.contains(done) {
                return false;
            }
            for v in 0..n {
                let (_, _, e) = nodes[v];
                if done.contains(v) || e.direction != Direction::Send || !preds[v].is_subset(done) {
                    continue;
                }
                let block = match partner[v] {
                    None => {
                        done.insert(v);
                        RscBlock::Unmatched { send: v }
                    }
                    Some(r) => {
                        let mut with_send = done.clone();
                        with_send.insert(v);
                        if !preds[r].is_subset(&with_send) {
                            continue;
                        }
                        done.insert(v);
                        done.insert(r);
                        RscBlock::Pair { send: v, receive: r }
                    }
                };
                schedule.push(block);
                if search(n, nodes, partner, preds, done, schedule, failed) {
                    return true;
                }
                schedule.pop();
                done.remove(v);
                if let RscBlock::Pair { receive, .. } = block {
                    done.remove(receive);
                }
            }
            failed.insert(done.clone());
            false
        }
        search(n, &nodes, &partner, &preds, &mut done, &mut schedule, &mut failed).then_some(schedule)
    }

    pub fn is_rsc_schedulable(&self) -> bool {
        self.rsc_schedule().is_some()
    }

    /// True if `self` is a downward-closed part of `other`: every lane is a
    /// prefix, and the matchings agree inside the prefix.
    pub fn is_prefix_of(&self, other: &P2pMsc) -> bool {
        if self.lanes.len() != other.lanes.len() {
            return false;
        }
        let within = |p: ProcessId, i: usize| i < self.lanes[p.0 as usize].len();
        self.lanes.iter().zip(&other.lanes).all(|(mine, theirs)| {
            mine.len() <= theirs.len()
                && mine.iter().zip(theirs).all(|(a, b)| {
                    a.direction == b.direction
                        && a.arrow == b.arrow
                        && match (a.partner, b.partner) {
                            (Some(x), Some(y)) => x == y,
                            (None, None) => true,
                            // unmatched in the prefix, matched outside it
                            (None, Some((q, j))) => !within(q, j),
                            (Some(_), None) => false,
                        }
                })
        })
    }

    pub fn show(&self, decl: &Declaration) -> String {
        self.lanes
            .iter()
            .enumerate()
            .map(|(p, lane)| {
                let events: Vec<String> = lane
                    .iter()
                    .map(|e| {
                        Action {
                            arrow: e.arrow,
                            direction: e.direction,
                        }
                        .show(decl)
                    })
                    .collect();
                format!("{}: {}", decl.process_name(ProcessId(p as u32)), events.join(" "))
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

/// The MSC of an execution over `processes` processes.
pub fn msc_of_execution(e: &Execution, processes: usize) -> P2pMsc {
    let mut lanes: Vec<Vec<MscEvent>> = vec![Vec::new(); processes];
    let mut place = Vec::with_capacity(e.len());
    for ev in e.events() {
        let p = ev.owner();
        place.push((p, lanes[p.0 as usize].len()));
        lanes[p.0 as usize].push(MscEvent {
            direction: ev.direction,
            arrow: ev.arrow,
            partner: None,
        });
    }
    for (i, ev) in e.events().iter().enumerate() {
        if let Some(j) = ev.source {
            let (rp, ri) = place[i];
            let (sp, si) = place[j];
            lanes[rp.0 as usize][ri].partner = Some((sp, si));
            lanes[sp.0 as usize][si].partner = Some((rp, ri));
        }
    }
    P2pMsc { lanes }
}

/// FIFO condition on the MSC order: for same-channel sends `s1 < s2`
/// either `s2` is unmatched or both are received, in order.
pub fn is_p2p_execution(e: &Execution, processes: usize) -> bool {
    let msc = msc_of_execution(e, processes);
    let preds = msc.predecessors();
    let mut place = Vec::with_capacity(e.len());
    let mut counts = vec![0usize; processes];
    for ev in e.events() {
        let p = ev.owner().0 as usize;
        place.push(msc.node(ev.owner(), counts[p]));
        counts[p] += 1;
    }
    let receive: Vec<Option<usize>> = (0..e.len()).map(|i| e.receive_of(i)).collect();
    let sends: Vec<usize> = (0..e.len())
        .filter(|&i| e.events()[i].direction == Direction::Send)
        .collect();
    for &s1 in &sends {
        for &s2 in &sends {
            let (a, b) = (e.events()[s1].arrow, e.events()[s2].arrow);
            if s1 == s2 || a.sender != b.sender || a.receiver != b.receiver {
                continue;
            }
            if !preds[place[s2]].contains(place[s1]) {
                continue;
            }
            let Some(r2) = receive[s2] else { continue };
            let ordered = receive[s1].is_some_and(|r1| preds[place[r2]].contains(place[r1]));
            if !ordered {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// bounded p2p exploration

/// Local states plus one FIFO queue per ordered process pair, indexed by
/// `sender * n + receiver`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct P2pConfig {
    pub locals: Vec<usize>,
    pub channels: Vec<Vec<MessageLabel>>,
}

impl P2pConfig {
    pub fn channels_empty(&self) -> bool {
        self.channels.iter().all(Vec::is_empty)
    }
}

enum Step {
    Enabled(Action, usize),
    /// A send disabled only by the channel bound.
    Capacity,
}

fn steps(system: &System, config: &P2pConfig, bound: usize) -> Vec<Step> {
    let n = system.machines.len();
    let mut out = Vec::new();
    for (p, m) in system.machines.iter().enumerate() {
        let s = config.locals[p];
        for &(l, t) in m.automaton.out_edges(s) {
            let action = m.automaton.alphabet()[l.expect("epsilon-free")];
            let ch = action.arrow.sender.0 as usize * n + action.arrow.receiver.0 as usize;
            match action.direction {
                Direction::Send => {
                    if config.channels[ch].len() < bound {
                        out.push(Step::Enabled(action, t));
                    } else {
                        out.push(Step::Capacity);
                    }
                }
                Direction::Receive => {
                    if config.channels[ch].first() == Some(&action.arrow.message) {
                        out.push(Step::Enabled(action, t));
                    }
                }
            }
        }
    }
    out
}

fn apply(system: &System, config: &P2pConfig, action: &Action, target: usize) -> P2pConfig {
    let n = system.machines.len();
    let mut next = config.clone();
    let ch = action.arrow.sender.0 as usize * n + action.arrow.receiver.0 as usize;
    next.locals[action.owner().0 as usize] = target;
    match action.direction {
        Direction::Send => next.channels[ch].push(action.arrow.message),
        Direction::Receive => {
            next.channels[ch].remove(0);
        }
    }
    next
}

fn initial_configs(system: &System) -> Vec<P2pConfig> {
    let n = system.machines.len();
    system
        .initial_tuples()
        .into_iter()
        .map(|locals| P2pConfig {
            locals,
            channels: vec![Vec::new(); n * n],
        })
        .collect()
}

/// A reachable configuration with a shortest execution leading to it.
#[derive(Clone, Debug)]
pub struct Witness {
    pub config: usize,
    pub execution: Execution,
}

#[derive(Clone, Debug)]
pub struct P2pReport {
    pub bound: usize,
    pub configurations: Vec<P2pConfig>,
    pub finals: Vec<usize>,
    /// Non-final configurations with no enabled event.
    pub deadlocks: Vec<Witness>,
    /// Stuck configurations where every machine accepts but messages remain.
    pub orphans: Vec<Witness>,
    /// Stuck configurations whose only continuations exceed the bound.
    pub bound_blocked: Vec<Witness>,
    /// Some send was disabled by the bound somewhere.
    pub bound_hit: bool,
}

impl P2pReport {
    pub fn is_final(&self, i: usize) -> bool {
        self.finals.contains(&i)
    }
}

/// Breadth-first reachability; events are tried in process order, then in
/// the local automaton's edge order, so reports are deterministic.
pub fn p2p_explore(system: &System, bound: usize) -> P2pReport {
    let bound = bound.max(1);
    let mut index: HashMap<P2pConfig, usize> = HashMap::new();
    let mut configs: Vec<P2pConfig> = Vec::new();
    let mut parent: Vec<Option<(usize, Action)>> = Vec::new();
    let mut queue = VecDeque::new();
    for c in initial_configs(system) {
        if !index.contains_key(&c) {
            index.insert(c.clone(), configs.len());
            configs.push(c);
            parent.push(None);
            queue.push_back(configs.len() - 1);
        }
    }
    let mut report = P2pReport {
        bound,
        configurations: Vec::new(),
        finals: Vec::new(),
        deadlocks: Vec::new(),
        orphans: Vec::new(),
        bound_blocked: Vec::new(),
        bound_hit: false,
    };
    let mut stuck: Vec<(usize, bool)> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let c = configs[i].clone();
        if system.all_accepting(&c.locals) && c.channels_empty() {
            report.finals.push(i);
        }
        let mut enabled = 0;
        let mut capacity = false;
        for step in steps(system, &c, bound) {
            match step {
                Step::Capacity => capacity = true,
                Step::Enabled(action, t) => {
                    enabled += 1;
                    let next = apply(system, &c, &action, t);
                    if !index.contains_key(&next) {
                        index.insert(next.clone(), configs.len());
                        configs.push(next);
                        parent.push(Some((i, action)));
                        queue.push_back(configs.len() - 1);
                    }
                }
            }
        }
        report.bound_hit |= capacity;
        if enabled == 0 {
            stuck.push((i, capacity));
        }
    }
    let witness = |i: usize| -> Witness {
        let mut actions = Vec::new();
        let mut cur = i;
        while let Some((p, a)) = parent[cur] {
            actions.push(a);
            cur = p;
        }
        actions.reverse();
        Witness {
            config: i,
            execution: Execution::from_actions_fifo(&actions).expect("explored runs are FIFO"),
        }
    };
    for (i, capacity) in stuck {
        let c = &configs[i];
        let accepting = system.all_accepting(&c.locals);
        if accepting && c.channels_empty() {
            continue;
        }
        if capacity {
            report.bound_blocked.push(witness(i));
            continue;
        }
        let w = witness(i);
        if accepting {
            report.orphans.push(w.clone());
        }
        report.deadlocks.push(w);
    }
    report.finals.sort_unstable();
    report.configurations = configs;
    report
}

/// The distinct MSCs of p2p executions with at most `max_events` events.
#[derive(Clone, Debug)]
pub struct ExecutionSample {
    /// Each MSC with one execution producing it.
    pub mscs: BTreeMap<P2pMsc, Execution>,
    /// MSCs of executions ending in a final configuration.
    pub final_mscs: BTreeSet<P2pMsc>,
    /// Exploration stopped early somewhere (event limit or channel bound).
    pub truncated: bool,
}

/// Depth-first enumeration of executions, memoised on (MSC, configuration).
pub fn explore_executions(system: &System, bound: usize, max_events: usize) -> ExecutionSample {
    let bound = bound.max(1);
    let n = system.machines.len();
    let mut sample = ExecutionSample {
        mscs: BTreeMap::new(),
        final_mscs: BTreeSet::new(),
        truncated: false,
    };
    let mut seen: HashSet<(P2pMsc, P2pConfig)> = HashSet::new();
    let mut stack: Vec<(Vec<Action>, P2pConfig)> =
        initial_configs(system).into_iter().map(|c| (Vec::new(), c)).collect();
    while let Some((actions, config)) = stack.pop() {
        let exec = Execution::from_actions_fifo(&actions).expect("explored runs are FIFO");
        let msc = msc_of_execution(&exec, n);
        if !seen.insert((msc.clone(), config.clone())) {
            continue;
        }
        if system.all_accepting(&config.locals) && config.channels_empty() {
            sample.final_mscs.insert(msc.clone());
        }
        sample.mscs.entry(msc).or_insert(exec);
        let next = steps(system, &config, bound);
        for step in next.into_iter().rev() {
            match step {
                Step::Capacity => sample.truncated = true,
                Step::Enabled(action, t) => {
                    if actions.len() >= max_events {
                        sample.truncated = true;
                        continue;
                    }
                    let mut a = actions.clone();
                    a.push(action);
                    stack.push((a, apply(system, &config, &action, t)));
                }
            }
        }
    }
    sample
}

#[derive(Clone, Debug, Default)]
pub struct CausalClosureReport {
    pub mscs_checked: usize,
    pub linearisations_checked: usize,
    pub truncated: bool,
    /// Linearisations that are not p2p executions. The closure property
    /// says this is always empty.
    pub violations: Vec<Execution>,
}

impl CausalClosureReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every linearisation of every explored p2p MSC must be a p2p execution.
pub fn check_causal_closure(system: &System, bound: usize, max_events: usize) -> CausalClosureReport {
    let n = system.machines.len();
    let sample = explore_executions(system, bound, max_events);
    let mut report = CausalClosureReport {
        truncated: sample.truncated,
        ..Default::default()
    };
    for msc in sample.mscs.keys() {
        report.mscs_checked += 1;
        let lins = msc
            .linearisations(max_events)
            .expect("explored executions respect the event limit");
        for e in lins {
            report.linearisations_checked += 1;
            if !is_p2p_execution(&e, n) {
                report.violations.push(e);
            }
        }
    }
    report
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Send => "send",
            Direction::Receive => "receive",
        })
    }
}
