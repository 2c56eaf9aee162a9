//! Bipartite type graphs and online arrival sequences.
//!
//! A [`TypeGraph`] has `n_offline` offline nodes and a list of online
//! *types*; each type carries a sorted neighbor list over offline ids and,
//! when the graph is weighted, one integer weight per neighbor. An
//! [`ArrivalSequence`] is an ordered list of type ids realizing the online
//! side of an instance.

use crate::error::{Error, Result};
use std::fmt;
use std::io::{BufRead, Write};

/// One online type: its offline neighborhood, optionally weighted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeNode {
    neighbors: Vec<usize>,
    weights: Option<Vec<u64>>,
}

impl TypeNode {
    pub fn unweighted(neighbors: Vec<usize>) -> Self {
        TypeNode { neighbors, weights: None }
    }

    pub fn weighted(neighbors: Vec<usize>, weights: Vec<u64>) -> Self {
        assert_eq!(neighbors.len(), weights.len());
        TypeNode { neighbors, weights: Some(weights) }
    }

    pub fn neighbors(&self) -> &[usize] {
        &self.neighbors
    }

    pub fn degree(&self) -> usize {
        self.neighbors.len()
    }

    /// Weight of the `pos`-th incident edge (1 when unweighted).
    pub fn weight_at(&self, pos: usize) -> u64 {
        self.weights.as_ref().map_or(1, |w| w[pos])
    }
}

/// Bipartite type graph: offline nodes `0..n_offline` against online types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeGraph {
    n_offline: usize,
    types: Vec<TypeNode>,
    weighted: bool,
}

impl TypeGraph {
    /// Build a graph, validating neighbor ids, duplicates, and weights.
    pub fn new(n_offline: usize, types: Vec<TypeNode>) -> Result<Self> {
        if n_offline == 0 {
            return Err(Error::InvalidParameter("n_offline must be >= 1".into()));
        }
        let weighted = types.iter().any(|t| t.weights.is_some());
        for (i, t) in types.iter().enumerate() {
            if weighted != t.weights.is_some() {
                return Err(Error::InvalidParameter(format!(
                    "type {i}: mixed weighted/unweighted neighbor lists"
                )));
            }
            // neighbor lists are kept strictly increasing; "first available
            // neighbor" and weight lookup both rely on this order
            for (pos, &u) in t.neighbors.iter().enumerate() {
                if u >= n_offline {
                    return Err(Error::InvalidParameter(format!(
                        "type {i}: neighbor {u} out of range (n_offline = {n_offline})"
                    )));
                }
                if pos > 0 && t.neighbors[pos - 1] >= u {
                    return Err(Error::InvalidParameter(format!(
                        "type {i}: neighbors must be strictly increasing at {u}"
                    )));
                }
            }
            if let Some(ws) = &t.weights {
                if ws.len() != t.neighbors.len() {
                    return Err(Error::InvalidParameter(format!(
                        "type {i}: {} weights for {} neighbors",
                        ws.len(),
                        t.neighbors.len()
                    )));
                }
                if ws.iter().any(|&w| w == 0) {
                    return Err(Error::InvalidParameter(format!("type {i}: zero edge weight")));
                }
            }
        }
        Ok(TypeGraph { n_offline, types, weighted })
    }

    pub fn n_offline(&self) -> usize {
        self.n_offline
    }

    pub fn num_types(&self) -> usize {
        self.types.len()
    }

    pub fn types(&self) -> &[TypeNode] {
        &self.types
    }

    pub fn type_node(&self, t: usize) -> &TypeNode {
        &self.types[t]
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn edge_count(&self) -> usize {
        self.types.iter().map(|t| t.degree()).sum()
    }

    /// Weight of edge (offline `u`, type `t`), if present (1 when unweighted).
    pub fn edge_weight(&self, u: usize, t: usize) -> Option<u64> {
        let node = &self.types[t];
        node.neighbors
            .binary_search(&u)
            .ok()
            .map(|pos| node.weight_at(pos))
    }

    /// Expand arrivals into the per-occurrence instance graph: one online
    /// node per arrival, connected like its type.
    pub fn realization(&self, arrivals: &ArrivalSequence) -> TypeGraph {
        let types = arrivals
            .arrivals()
            .iter()
            .map(|&t| self.types[t].clone())
            .collect();
        TypeGraph {
            n_offline: self.n_offline,
            types,
            weighted: self.weighted,
        }
    }
}

/// Which generator produced an arrival sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    /// Each type arrives exactly once, in index order.
    SingleArrivals,
    /// Poisson(1) copies per type, types consecutive, graph drawn interleaved.
    RtpamOneStep,
    /// Poisson(1) copies per type, types consecutive, graph drawn first.
    RtpamTwoStep,
    /// Two-step counts followed by a uniform random permutation.
    RtpamThreeStep,
    /// Fixed number of i.i.d. uniform type draws.
    KnownIid,
    /// Poi(n) total arrivals, each an i.i.d. uniform type draw.
    PoissonArrivals,
}

impl ModelTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelTag::SingleArrivals => "single",
            ModelTag::RtpamOneStep => "rtpam1",
            ModelTag::RtpamTwoStep => "rtpam2",
            ModelTag::RtpamThreeStep => "rtpam3",
            ModelTag::KnownIid => "known_iid",
            ModelTag::PoissonArrivals => "poisson_arrivals",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "single" => ModelTag::SingleArrivals,
            "rtpam1" => ModelTag::RtpamOneStep,
            "rtpam2" => ModelTag::RtpamTwoStep,
            "rtpam3" => ModelTag::RtpamThreeStep,
            "known_iid" => ModelTag::KnownIid,
            "poisson_arrivals" => ModelTag::PoissonArrivals,
            other => return Err(Error::Format(format!("unknown model tag `{other}`"))),
        })
    }

    /// Whether every occurrence of a type must be contiguous in the sequence.
    pub fn consecutive(&self) -> bool {
        matches!(
            self,
            ModelTag::SingleArrivals | ModelTag::RtpamOneStep | ModelTag::RtpamTwoStep
        )
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordered online arrivals over a type graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalSequence {
    arrivals: Vec<usize>,
    counts: Vec<usize>,
    model: ModelTag,
}

impl ArrivalSequence {
    /// Build from an arrival list; `num_types` sizes the count table.
    pub fn new(arrivals: Vec<usize>, num_types: usize, model: ModelTag) -> Result<Self> {
        let mut counts = vec![0usize; num_types];
        for &t in &arrivals {
            if t >= num_types {
                return Err(Error::InvalidParameter(format!(
                    "arrival references type {t} but graph has {num_types} types"
                )));
            }
            counts[t] += 1;
        }
        if model.consecutive() {
            let mut last_of: Vec<Option<usize>> = vec![None; num_types];
            for (i, &t) in arrivals.iter().enumerate() {
                if let Some(prev) = last_of[t] {
                    if prev + 1 != i {
                        return Err(Error::InvalidParameter(format!(
                            "model {model} requires consecutive occurrences, type {t} is split"
                        )));
                    }
                }
                last_of[t] = Some(i);
            }
        }
        Ok(ArrivalSequence { arrivals, counts, model })
    }

    pub fn arrivals(&self) -> &[usize] {
        &self.arrivals
    }

    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrivals.is_empty()
    }

    /// Occurrence count of each type (`Z` in trace terms).
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn model(&self) -> ModelTag {
        self.model
    }
}

/// A generated instance plus the metadata needed to reproduce it, as carried
/// by the text format header.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: TypeGraph,
    pub arrivals: Option<ArrivalSequence>,
    pub model: ModelTag,
    /// Compact `key=value` parameter string, e.g. `p=0.5;R=10`.
    pub params: String,
    pub seed: u64,
}

impl Instance {
    /// Write the line-oriented text format:
    ///
    /// ```text
    /// n m model params seed
    /// <type_id>: neighbor[:weight] ...
    /// ...
    /// arrivals: t1 t2 ...
    /// ```
    ///
    /// `n` is the offline count and `m` the number of arrivals (0 when the
    /// instance carries no arrival sequence, in which case the `arrivals:`
    /// line is omitted).
    pub fn write_text<W: Write>(&self, out: &mut W) -> Result<()> {
        let m = self.arrivals.as_ref().map_or(0, |a| a.len());
        writeln!(
            out,
            "{} {} {} {} {}",
            self.graph.n_offline(),
            m,
            self.model,
            self.params,
            self.seed
        )?;
        for (t, node) in self.graph.types().iter().enumerate() {
            write!(out, "{t}:")?;
            for (pos, &u) in node.neighbors().iter().enumerate() {
                if self.graph.is_weighted() {
                    write!(out, " {}:{}", u, node.weight_at(pos))?;
                } else {
                    write!(out, " {u}")?;
                }
            }
            writeln!(out)?;
        }
        if let Some(arr) = &self.arrivals {
            write!(out, "arrivals:")?;
            for &t in arr.arrivals() {
                write!(out, " {t}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parse the text format back into an instance.
    pub fn read_text<R: BufRead>(input: R) -> Result<Instance> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty input".into()))??;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::Format(format!(
                "header must be `n m model params seed`, got `{header}`"
            )));
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|_| Error::Format(format!("bad n `{}`", fields[0])))?;
        let m: usize = fields[1]
            .parse()
            .map_err(|_| Error::Format(format!("bad m `{}`", fields[1])))?;
        let model = ModelTag::parse(fields[2])?;
        let params = fields[3].to_string();
        let seed: u64 = fields[4]
            .parse()
            .map_err(|_| Error::Format(format!("bad seed `{}`", fields[4])))?;

        let mut types: Vec<TypeNode> = Vec::new();
        let mut arrivals: Option<Vec<usize>> = None;
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::Format(format!("missing `:` in line `{line}`")))?;
            if head == "arrivals" {
                let arr = rest
                    .split_whitespace()
                    .map(|s| {
                        s.parse::<usize>()
                            .map_err(|_| Error::Format(format!("bad arrival `{s}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                arrivals = Some(arr);
                continue;
            }
            let type_id: usize = head
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad type id `{head}`")))?;
            if type_id != types.len() {
                return Err(Error::Format(format!(
                    "type lines must be in order: expected {}, got {type_id}",
                    types.len()
                )));
            }
            let mut neighbors = Vec::new();
            let mut weights = Vec::new();
            let mut any_weight = false;
            for tok in rest.split_whitespace() {
                match tok.split_once(':') {
                    Some((u, w)) => {
                        any_weight = true;
                        neighbors.push(u.parse::<usize>().map_err(|_| {
                            Error::Format(format!("bad neighbor `{u}`"))
                        })?);
                        weights.push(w.parse::<u64>().map_err(|_| {
                            Error::Format(format!("bad weight `{w}`"))
                        })?);
                    }
                    None => {
                        neighbors.push(tok.parse::<usize>().map_err(|_| {
                            Error::Format(format!("bad neighbor `{tok}`"))
                        })?);
                        weights.push(1);
                    }
                }
            }
            types.push(if any_weight {
                TypeNode::weighted(neighbors, weights)
            } else {
                TypeNode::unweighted(neighbors)
            });
        }

        let graph = TypeGraph::new(n, types)?;
        let arrivals = match arrivals {
            Some(arr) => {
                if arr.len() != m {
                    return Err(Error::Format(format!(
                        "header promises {m} arrivals, file has {}",
                        arr.len()
                    )));
                }
                Some(ArrivalSequence::new(arr, graph.num_types(), model)?)
            }
            None if m == 0 => None,
            None => {
                return Err(Error::Format(format!(
                    "header promises {m} arrivals but no arrivals line present"
                )))
            }
        };
        Ok(Instance { graph, arrivals, model, params, seed })
    }
}
