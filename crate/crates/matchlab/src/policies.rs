//! Online decision rules: greedy, greedy with free disposal, the
//! one-suggested-matching rule, and the two-matching rule with free
//! disposal.
//!
//! A policy consumes an [`ArrivalSequence`] against a [`TypeGraph`] one
//! arrival at a time and produces the final [`Matching`] (online ids are
//! arrival positions) together with a per-round [`SimulationTrace`]. A
//! *round* is a maximal run of consecutive arrivals of the same type, so for
//! consecutive-arrival models rounds coincide with types.

use crate::graph::{ArrivalSequence, TypeGraph};
use crate::matching::{
    build_residual, max_weight_matching, MatchedEdge, Matching, ResidualGraph,
};

/// Per-round counters: copies seen (`z`), free neighbors of the round's type
/// at round start (`x`), net matched this round, and the cumulative matching
/// size (`y`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRound {
    pub round: usize,
    pub copies: usize,
    pub available: usize,
    pub matched: usize,
    pub cumulative: usize,
}

/// Round-by-round record of a policy run.
#[derive(Debug, Clone, Default)]
pub struct SimulationTrace {
    rounds: Vec<TraceRound>,
}

impl SimulationTrace {
    pub fn rounds(&self) -> &[TraceRound] {
        &self.rounds
    }

    /// Final matching size (0 for an empty run).
    pub fn final_matched(&self) -> usize {
        self.rounds.last().map_or(0, |r| r.cumulative)
    }

    /// CSV export `round,z,x,matched,cumulative` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,z,x,matched,cumulative\n");
        for r in &self.rounds {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.round, r.copies, r.available, r.matched, r.cumulative
            ));
        }
        out
    }
}

/// Mutable state shared by the policy loops: the current edge per offline
/// node and per-type arrival counters.
struct PolicyState {
    /// offline node -> (arrival position, weight) of its current edge
    current: Vec<Option<(usize, u64)>>,
    seen: Vec<usize>,
    size: usize,
}

impl PolicyState {
    fn new(graph: &TypeGraph) -> Self {
        PolicyState {
            current: vec![None; graph.n_offline()],
            seen: vec![0; graph.num_types()],
            size: 0,
        }
    }

    fn is_free(&self, u: usize) -> bool {
        self.current[u].is_none()
    }

    fn assign(&mut self, u: usize, arrival: usize, weight: u64) {
        if self.current[u].is_none() {
            self.size += 1;
        }
        self.current[u] = Some((arrival, weight));
    }

    fn into_matching(self) -> Matching {
        let pairs = self
            .current
            .iter()
            .enumerate()
            .filter_map(|(u, slot)| {
                slot.map(|(arrival, weight)| MatchedEdge { offline: u, online: arrival, weight })
            })
            .collect();
        Matching::new(pairs)
    }
}

/// Drive `step` over the arrivals, grouping consecutive equal types into
/// trace rounds.
fn run_rounds<F>(
    graph: &TypeGraph,
    arrivals: &ArrivalSequence,
    mut step: F,
) -> (Matching, SimulationTrace)
where
    F: FnMut(&mut PolicyState, usize, usize),
{
    let mut state = PolicyState::new(graph);
    let mut rounds = Vec::new();
    let seq = arrivals.arrivals();
    let mut i = 0usize;
    let mut round = 0usize;
    while i < seq.len() {
        let t = seq[i];
        let mut z = 0usize;
        let x = graph
            .type_node(t)
            .neighbors()
            .iter()
            .filter(|&&u| state.is_free(u))
            .count();
        let before = state.size;
        while i < seq.len() && seq[i] == t {
            state.seen[t] += 1;
            step(&mut state, t, i);
            z += 1;
            i += 1;
        }
        rounds.push(TraceRound {
            round,
            copies: z,
            available: x,
            matched: state.size - before,
            cumulative: state.size,
        });
        round += 1;
    }
    (state.into_matching(), SimulationTrace { rounds })
}

/// Plain greedy. In unweighted mode the arrival takes its lowest-indexed
/// free neighbor; in weighted mode the heaviest free neighbor (ties to the
/// lowest index). Nothing is ever displaced.
pub fn run_greedy(
    graph: &TypeGraph,
    arrivals: &ArrivalSequence,
    weighted: bool,
) -> (Matching, SimulationTrace) {
    run_rounds(graph, arrivals, |state, t, pos| {
        let node = graph.type_node(t);
        let mut best: Option<(usize, u64)> = None;
        for (p, &u) in node.neighbors().iter().enumerate() {
            if !state.is_free(u) {
                continue;
            }
            if !weighted {
                best = Some((u, node.weight_at(p)));
                break; // neighbors ascend, first free wins
            }
            let w = node.weight_at(p);
            if best.map_or(true, |(_, bw)| w > bw) {
                best = Some((u, w));
            }
        }
        if let Some((u, w)) = best {
            state.assign(u, pos, w);
        }
    })
}

/// Greedy with free disposal: the arrival goes to the offline node with the
/// largest marginal gain `w(u, v) - current(u)`, displacing the held edge;
/// zero-gain arrivals are discarded.
pub fn run_greedy_fd(graph: &TypeGraph, arrivals: &ArrivalSequence) -> (Matching, SimulationTrace) {
    run_rounds(graph, arrivals, |state, t, pos| {
        let node = graph.type_node(t);
        let mut best: Option<(usize, u64, u64)> = None; // (u, gain, weight)
        for (p, &u) in node.neighbors().iter().enumerate() {
            let w = node.weight_at(p);
            let held = state.current[u].map_or(0, |(_, hw)| hw);
            if w <= held {
                continue;
            }
            let gain = w - held;
            if best.map_or(true, |(_, bg, _)| gain > bg) {
                best = Some((u, gain, w));
            }
        }
        if let Some((u, _, w)) = best {
            state.assign(u, pos, w);
        }
    })
}

/// The one-suggested-matching rule: precompute the maximum-weight matching
/// `M1`; an arrival is matched along its `M1` edge on its first appearance
/// if the offline endpoint is still free, and ignored otherwise.
pub fn run_one_sm(graph: &TypeGraph, arrivals: &ArrivalSequence) -> (Matching, SimulationTrace) {
    let m1 = max_weight_matching(graph);
    let mut partner: Vec<Option<(usize, u64)>> = vec![None; graph.num_types()];
    for e in m1.pairs() {
        partner[e.online] = Some((e.offline, e.weight));
    }
    run_rounds(graph, arrivals, |state, t, pos| {
        if state.seen[t] != 1 {
            return;
        }
        if let Some((u, w)) = partner[t] {
            // no other rule places edges, so u cannot be taken here
            debug_assert!(state.is_free(u));
            if state.is_free(u) {
                state.assign(u, pos, w);
            }
        }
    })
}

/// Exact integer accounting of a two-matching run, for the identity
/// `final weight = placed M1 weight + net M2 weight`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SfdAccounting {
    /// Total weight of M1 edges placed on first arrivals, including edges
    /// later displaced by an M2 use.
    pub placed_m1_weight: u64,
    /// Net weight added by M2 uses (full edge weight minus any displaced M1
    /// weight at that moment).
    pub m2_net_weight: u64,
    /// Total weight of displaced M1 edges.
    pub displaced_weight: u64,
}

/// Two-matching run with all parts exposed.
#[derive(Debug, Clone)]
pub struct SfdRun {
    pub matching: Matching,
    pub trace: SimulationTrace,
    pub m1: Matching,
    /// Maximum-weight matching on the residual graph (residual weights).
    pub m2: Matching,
    pub accounting: SfdAccounting,
}

/// The two-matching rule with free disposal: the first arrival of a type
/// follows `M1` (if the endpoint is free), the second follows `M2` on the
/// residual graph, displacing the incident `M1` edge if present; later
/// arrivals are ignored.
pub fn run_sfd(graph: &TypeGraph, arrivals: &ArrivalSequence) -> (Matching, SimulationTrace) {
    let run = run_sfd_detailed(graph, arrivals);
    (run.matching, run.trace)
}

/// [`run_sfd`] with matchings, residual structure, and accounting exposed.
pub fn run_sfd_detailed(graph: &TypeGraph, arrivals: &ArrivalSequence) -> SfdRun {
    let m1 = max_weight_matching(graph);
    let residual: ResidualGraph =
        build_residual(graph, &m1).expect("own matching is a subset of the graph");
    let m2 = max_weight_matching(residual.graph());

    let mut m1_partner: Vec<Option<(usize, u64)>> = vec![None; graph.num_types()];
    for e in m1.pairs() {
        m1_partner[e.online] = Some((e.offline, e.weight));
    }
    // M2 pairs carry residual weights; the edge actually placed uses the
    // full original weight.
    let mut m2_partner: Vec<Option<usize>> = vec![None; graph.num_types()];
    for e in m2.pairs() {
        m2_partner[e.online] = Some(e.offline);
    }

    let mut acct = SfdAccounting::default();
    let (matching, trace) = run_rounds(graph, arrivals, |state, t, pos| {
        match state.seen[t] {
            1 => {
                if let Some((u, w)) = m1_partner[t] {
                    // an occupied M1 partner can only hold an M2 edge; two M1
                    // edges never share an offline node
                    if state.is_free(u) {
                        state.assign(u, pos, w);
                        acct.placed_m1_weight += w;
                    }
                }
            }
            2 => {
                if let Some(u) = m2_partner[t] {
                    let w_full = graph.edge_weight(u, t).expect("M2 edge exists in base graph");
                    let displaced = state.current[u].map_or(0, |(_, hw)| hw);
                    acct.displaced_weight += displaced;
                    acct.m2_net_weight += w_full - displaced;
                    state.assign(u, pos, w_full);
                }
            }
            _ => {}
        }
    });

    SfdRun { matching, trace, m1, m2, accounting: acct }
}
