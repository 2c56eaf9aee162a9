//! Exact offline matching oracles and the residual-graph construction used
//! by the two-matching online policy.

use crate::error::{Error, Result};
use crate::graph::{TypeGraph, TypeNode};
use std::collections::VecDeque;
use std::fmt::Write as _;

/// One matched edge. `online` is a type id for matchings on type graphs and
/// an occurrence index for matchings on realization graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchedEdge {
    pub offline: usize,
    pub online: usize,
    pub weight: u64,
}

/// A bipartite matching with its total weight (unweighted edges count 1).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Matching {
    pairs: Vec<MatchedEdge>,
    total_weight: u64,
}

impl Matching {
    pub fn new(mut pairs: Vec<MatchedEdge>) -> Self {
        pairs.sort_unstable_by_key(|e| (e.offline, e.online));
        debug_assert!(
            pairs.windows(2).all(|w| w[0].offline != w[1].offline),
            "offline id repeated"
        );
        let total_weight = pairs.iter().map(|e| e.weight).sum();
        Matching { pairs, total_weight }
    }

    pub fn pairs(&self) -> &[MatchedEdge] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    /// CSV rows `offline_id,online_id,weight` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("offline_id,online_id,weight\n");
        for e in &self.pairs {
            writeln!(out, "{},{},{}", e.offline, e.online, e.weight).expect("string write");
        }
        out
    }
}

/// Sum of member edge weights; 0 for the empty matching.
pub fn matching_weight(m: &Matching) -> u64 {
    m.pairs().iter().map(|e| e.weight).sum()
}

/// Maximum-cardinality matching via Hopcroft–Karp. Online side indices are
/// the graph's type indices.
pub fn max_cardinality_matching(graph: &TypeGraph) -> Matching {
    let n_left = graph.num_types();
    let n_right = graph.n_offline();
    let mut match_l: Vec<Option<usize>> = vec![None; n_left]; // type -> offline
    let mut match_r: Vec<Option<usize>> = vec![None; n_right]; // offline -> type

    const UNREACHED: u32 = u32::MAX;
    let mut dist = vec![UNREACHED; n_left];
    let mut queue = VecDeque::new();

    loop {
        // BFS layers from free left nodes
        queue.clear();
        for t in 0..n_left {
            if match_l[t].is_none() {
                dist[t] = 0;
                queue.push_back(t);
            } else {
                dist[t] = UNREACHED;
            }
        }
        let mut found_augmenting = false;
        while let Some(t) = queue.pop_front() {
            for &u in graph.type_node(t).neighbors() {
                match match_r[u] {
                    None => found_augmenting = true,
                    Some(t2) if dist[t2] == UNREACHED => {
                        dist[t2] = dist[t] + 1;
                        queue.push_back(t2);
                    }
                    _ => {}
                }
            }
        }
        if !found_augmenting {
            break;
        }
        // DFS along layered edges
        for t in 0..n_left {
            if match_l[t].is_none() {
                hk_dfs(graph, t, &mut dist, &mut match_l, &mut match_r);
            }
        }
    }

    let pairs = match_l
        .iter()
        .enumerate()
        .filter_map(|(t, &mu)| {
            mu.map(|u| MatchedEdge {
                offline: u,
                online: t,
                weight: graph.edge_weight(u, t).expect("matched edge exists"),
            })
        })
        .collect();
    Matching::new(pairs)
}

fn hk_dfs(
    graph: &TypeGraph,
    t: usize,
    dist: &mut [u32],
    match_l: &mut [Option<usize>],
    match_r: &mut [Option<usize>],
) -> bool {
    let d = std::mem::replace(&mut dist[t], u32::MAX);
    for &u in graph.type_node(t).neighbors() {
        let ok = match match_r[u] {
            None => true,
            Some(t2) => dist[t2] == d + 1 && hk_dfs(graph, t2, dist, match_l, match_r),
        };
        if ok {
            match_l[t] = Some(u);
            match_r[u] = Some(t);
            return true;
        }
    }
    false
}

/// Maximum-weight matching (not necessarily maximum cardinality) via the
/// assignment algorithm: successive shortest augmenting paths with row and
/// column potentials on a zero-padded square cost matrix. Integer costs keep
/// the result exact; pairs assigned through a zero pad are simply unmatched.
pub fn max_weight_matching(graph: &TypeGraph) -> Matching {
    let rows = graph.num_types();
    let cols = graph.n_offline();
    let n = rows.max(cols);
    if n == 0 || graph.edge_count() == 0 {
        return Matching::new(Vec::new());
    }

    // cost[t][u] = -w(u, t); 0 where no edge or padding
    let mut cost = vec![0i64; n * n];
    for (t, node) in graph.types().iter().enumerate() {
        for (pos, &u) in node.neighbors().iter().enumerate() {
            cost[t * n + u] = -(node.weight_at(pos) as i64);
        }
    }

    let inf = i64::MAX / 4;
    let mut u_pot = vec![0i64; n + 1];
    let mut v_pot = vec![0i64; n + 1];
    let mut col_row = vec![0usize; n + 1]; // col_row[j] = row assigned to column j (1-based, 0 = none)
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        col_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_row[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u_pot[i0] - v_pot[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u_pot[col_row[j]] += delta;
                    v_pot[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if col_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_row[j0] = col_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut pairs = Vec::new();
    for j in 1..=n {
        let i = col_row[j];
        if i == 0 {
            continue;
        }
        let (t, u) = (i - 1, j - 1);
        if t < rows && u < cols && cost[t * n + u] < 0 {
            // zero-cost pads are "unmatched"; only real edges count
            let w = graph.edge_weight(u, t).expect("negative cost implies edge");
            pairs.push(MatchedEdge { offline: u, online: t, weight: w });
        }
    }
    Matching::new(pairs)
}

/// The residual graph `H` relative to a base matching `M1`:
///
/// - edges of `M1` are removed;
/// - an edge at an offline node matched in `M1` is removed unless strictly
///   heavier than the `M1` edge there, otherwise kept with the difference as
///   its weight (ties removed, so every residual weight is positive);
/// - edges at offline nodes unmatched in `M1` keep their original weight.
#[derive(Debug, Clone)]
pub struct ResidualGraph {
    graph: TypeGraph,
    /// Per offline node: the `M1` edge that a residual edge there displaces.
    base_edge: Vec<Option<MatchedEdge>>,
}

impl ResidualGraph {
    pub fn graph(&self) -> &TypeGraph {
        &self.graph
    }

    /// The `M1` edge displaced when a residual edge at offline `u` is used.
    pub fn displaced_edge(&self, u: usize) -> Option<MatchedEdge> {
        self.base_edge[u]
    }
}

/// Build the residual graph `H` for `m1` on `graph`.
pub fn build_residual(graph: &TypeGraph, m1: &Matching) -> Result<ResidualGraph> {
    let n = graph.n_offline();
    let mut base_edge: Vec<Option<MatchedEdge>> = vec![None; n];
    let mut online_seen = vec![false; graph.num_types()];
    for e in m1.pairs() {
        if e.offline >= n || e.online >= graph.num_types() {
            return Err(Error::InvalidParameter(format!(
                "matching edge ({}, {}) outside graph",
                e.offline, e.online
            )));
        }
        if graph.edge_weight(e.offline, e.online) != Some(e.weight) {
            return Err(Error::InvalidParameter(format!(
                "matching edge ({}, {}, w={}) is not a graph edge",
                e.offline, e.online, e.weight
            )));
        }
        if base_edge[e.offline].is_some() || online_seen[e.online] {
            return Err(Error::InvalidParameter("base matching repeats a node".into()));
        }
        base_edge[e.offline] = Some(*e);
        online_seen[e.online] = true;
    }

    let types = graph
        .types()
        .iter()
        .enumerate()
        .map(|(t, node)| {
            let mut neighbors = Vec::new();
            let mut weights = Vec::new();
            for (pos, &u) in node.neighbors().iter().enumerate() {
                let w = node.weight_at(pos);
                match base_edge[u] {
                    Some(base) => {
                        if base.online == t {
                            continue; // the M1 edge itself
                        }
                        if w > base.weight {
                            neighbors.push(u);
                            weights.push(w - base.weight);
                        }
                    }
                    None => {
                        neighbors.push(u);
                        weights.push(w);
                    }
                }
            }
            TypeNode::weighted(neighbors, weights)
        })
        .collect();

    Ok(ResidualGraph {
        graph: TypeGraph::new(n, types)?,
        base_edge,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TypeNode;

    fn graph(n: usize, types: Vec<TypeNode>) -> TypeGraph {
        TypeGraph::new(n, types).unwrap()
    }

    #[test]
    fn empty_graph_empty_matching() {
        let g = graph(2, vec![TypeNode::unweighted(vec![]), TypeNode::unweighted(vec![])]);
        assert!(max_cardinality_matching(&g).is_empty());
        assert!(max_weight_matching(&g).is_empty());
        assert_eq!(matching_weight(&Matching::default()), 0);
    }

    #[test]
    fn complete_3x3_has_perfect_matching() {
        let g = graph(3, (0..3).map(|_| TypeNode::unweighted(vec![0, 1, 2])).collect());
        let m = max_cardinality_matching(&g);
        assert_eq!(m.len(), 3);
        assert_eq!(m.total_weight(), 3);
    }

    #[test]
    fn single_edge_weight_seven() {
        let g = graph(1, vec![TypeNode::weighted(vec![0], vec![7])]);
        let m = max_weight_matching(&g);
        assert_eq!(m.len(), 1);
        assert_eq!(m.total_weight(), 7);
    }

    #[test]
    fn picks_heavier_of_two_offline_options() {
        // offline {a=0, b=1}, one type v with w(a,v)=3, w(b,v)=5
        let g = graph(2, vec![TypeNode::weighted(vec![0, 1], vec![3, 5])]);
        let m = max_weight_matching(&g);
        assert_eq!(m.total_weight(), 5);
        assert_eq!(m.pairs(), &[MatchedEdge { offline: 1, online: 0, weight: 5 }]);
    }

    #[test]
    fn weight_beats_cardinality() {
        // a single heavy edge should beat two light ones
        let g = graph(
            2,
            vec![
                TypeNode::weighted(vec![0, 1], vec![10, 2]),
                TypeNode::weighted(vec![0], vec![1]),
            ],
        );
        let m = max_weight_matching(&g);
        assert_eq!(m.total_weight(), 10);
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn residual_subtracts_and_drops_dominated() {
        // u0 matched at weight 5 (type 0); edge (u0, type1) weight 8 stays at
        // 3; edge (u0, type2) weight 4 is dropped; u1 unmatched keeps 4.
        let g = graph(
            2,
            vec![
                TypeNode::weighted(vec![0], vec![5]),
                TypeNode::weighted(vec![0, 1], vec![8, 4]),
                TypeNode::weighted(vec![0], vec![4]),
            ],
        );
        let m1 = Matching::new(vec![MatchedEdge { offline: 0, online: 0, weight: 5 }]);
        let h = build_residual(&g, &m1).unwrap();
        assert_eq!(h.graph().edge_weight(0, 0), None);
        assert_eq!(h.graph().edge_weight(0, 1), Some(3));
        assert_eq!(h.graph().edge_weight(0, 2), None);
        assert_eq!(h.graph().edge_weight(1, 1), Some(4));
        assert_eq!(
            h.displaced_edge(0),
            Some(MatchedEdge { offline: 0, online: 0, weight: 5 })
        );
        assert_eq!(h.displaced_edge(1), None);
    }

    #[test]
    fn uniform_weights_give_empty_residual_when_m1_covers_all() {
        let g = graph(
            2,
            vec![
                TypeNode::weighted(vec![0, 1], vec![2, 2]),
                TypeNode::weighted(vec![0, 1], vec![2, 2]),
            ],
        );
        let m1 = max_weight_matching(&g);
        assert_eq!(m1.len(), 2);
        let h = build_residual(&g, &m1).unwrap();
        assert_eq!(h.graph().edge_count(), 0);
    }

    #[test]
    fn ties_are_removed_from_residual() {
        // u matched at weight 5; a second weight-5 edge at u must vanish
        let g = graph(
            1,
            vec![
                TypeNode::weighted(vec![0], vec![5]),
                TypeNode::weighted(vec![0], vec![5]),
            ],
        );
        let m1 = Matching::new(vec![MatchedEdge { offline: 0, online: 0, weight: 5 }]);
        let h = build_residual(&g, &m1).unwrap();
        assert_eq!(h.graph().edge_count(), 0);
    }

    #[test]
    fn residual_rejects_non_subset_matching() {
        let g = graph(1, vec![TypeNode::weighted(vec![0], vec![5])]);
        let bogus = Matching::new(vec![MatchedEdge { offline: 0, online: 0, weight: 4 }]);
        assert!(build_residual(&g, &bogus).is_err());
    }

    #[test]
    fn csv_shape() {
        let m = Matching::new(vec![
            MatchedEdge { offline: 1, online: 0, weight: 3 },
            MatchedEdge { offline: 0, online: 2, weight: 1 },
        ]);
        let csv = m.to_csv();
        assert_eq!(csv, "offline_id,online_id,weight\n0,2,1\n1,0,3\n");
    }

    #[test]
    fn cardinality_on_path_graph() {
        // t0 - {u0, u1}, t1 - {u1}: maximum matching has size 2
        let g = graph(
            2,
            vec![TypeNode::unweighted(vec![0, 1]), TypeNode::unweighted(vec![1])],
        );
        let m = max_cardinality_matching(&g);
        assert_eq!(m.len(), 2);
    }
}
