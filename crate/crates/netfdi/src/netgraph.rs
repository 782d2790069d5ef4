//! Directed interconnection topology: distance queries and failure manipulation.
//!
//! Nodes are numbered `1..=N`. An edge `(i, j)` always means a directed link
//! from node `i` to node `j`; self-loops are allowed. The transposed adjacency
//! layout (where entry `(i, j)` carries the weight of edge `(j, i)`) lives
//! only in [`crate::sysmodel`].

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A directed link `(from, to)`, 1-based.
pub type Edge = (usize, usize);

/// Hop count between nodes; `Infinite` when no directed path exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    /// Saturating addition; `Infinite` absorbs.
    pub fn add(self, other: Distance) -> Distance {
        match (self, other) {
            (Distance::Finite(a), Distance::Finite(b)) => Distance::Finite(a + b),
            _ => Distance::Infinite,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => write!(f, "infinite"),
        }
    }
}

/// Weight pattern of one edge: a free parameter or a fixed nonzero value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSpec {
    Free,
    Fixed(f64),
}

/// Interconnection topology with weight pattern and sensor locations.
#[derive(Debug, Clone)]
pub struct NetworkModel {
    node_count: usize,
    edges: BTreeSet<Edge>,
    weight_pattern: BTreeMap<Edge, WeightSpec>,
    sensors: BTreeSet<usize>,
}

impl NetworkModel {
    /// Build a model, validating node ranges, duplicate edges, nonzero fixed
    /// weights, and pattern/edge consistency. Edges absent from
    /// `weight_pattern` default to `Free`.
    pub fn new(
        node_count: usize,
        edges: impl IntoIterator<Item = Edge>,
        weight_pattern: impl IntoIterator<Item = (Edge, WeightSpec)>,
        sensors: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let mut edge_set = BTreeSet::new();
        for (from, to) in edges {
            check_node(from, node_count)?;
            check_node(to, node_count)?;
            if !edge_set.insert((from, to)) {
                return Err(Error::DuplicateEdge(from, to));
            }
        }
        let mut pattern: BTreeMap<Edge, WeightSpec> = BTreeMap::new();
        for (edge, spec) in weight_pattern {
            if !edge_set.contains(&edge) {
                return Err(Error::PatternEdgeMissing(edge.0, edge.1));
            }
            if let WeightSpec::Fixed(w) = spec {
                if w == 0.0 {
                    return Err(Error::ZeroFixedWeight(edge.0, edge.1));
                }
            }
            pattern.insert(edge, spec);
        }
        for edge in &edge_set {
            pattern.entry(*edge).or_insert(WeightSpec::Free);
        }
        let mut sensor_set = BTreeSet::new();
        for s in sensors {
            check_node(s, node_count)?;
            sensor_set.insert(s);
        }
        Ok(Self {
            node_count,
            edges: edge_set,
            weight_pattern: pattern,
            sensors: sensor_set,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn weight_pattern(&self) -> &BTreeMap<Edge, WeightSpec> {
        &self.weight_pattern
    }

    pub fn sensors(&self) -> &BTreeSet<usize> {
        &self.sensors
    }

    /// Replace the sensor set, keeping topology and weights.
    pub fn with_sensors(&self, sensors: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut model = self.clone();
        model.sensors = BTreeSet::new();
        for s in sensors {
            check_node(s, self.node_count)?;
            model.sensors.insert(s);
        }
        Ok(model)
    }

    fn out_neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count + 1];
        for &(from, to) in &self.edges {
            adj[from].push(to);
        }
        adj
    }

    /// Minimum number of edges on a directed path `from -> to`; 0 when equal.
    pub fn shortest_distance(&self, from: usize, to: usize) -> Result<Distance> {
        check_node(from, self.node_count)?;
        check_node(to, self.node_count)?;
        let dist = self.bfs_from(from);
        Ok(dist[to])
    }

    /// BFS hop counts from `source` to every node (index 0 unused).
    pub fn bfs_from(&self, source: usize) -> Vec<Distance> {
        let adj = self.out_neighbors();
        let mut dist = vec![Distance::Infinite; self.node_count + 1];
        dist[source] = Distance::Finite(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let Distance::Finite(d) = dist[v] else { unreachable!() };
            for &u in &adj[v] {
                if dist[u] == Distance::Infinite {
                    dist[u] = Distance::Finite(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Shortest path `from -> to` as a node sequence, if one exists.
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let adj = self.out_neighbors();
        let mut parent = vec![usize::MAX; self.node_count + 1];
        let mut seen = vec![false; self.node_count + 1];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = v;
                    queue.push_back(u);
                }
            }
        }
        None
    }

    /// Remove the failed edges, returning the post-failure model. Sensors and
    /// the weight pattern of surviving edges are unchanged.
    pub fn apply_failure(&self, failure: &FailureScenario) -> Result<NetworkModel> {
        let missing: Vec<Edge> = failure
            .removed_edges()
            .iter()
            .filter(|e| !self.edges.contains(e))
            .copied()
            .collect();
        if !missing.is_empty() {
            return Err(Error::FailureEdgesMissing(missing));
        }
        let mut model = self.clone();
        for edge in failure.removed_edges() {
            model.edges.remove(edge);
            model.weight_pattern.remove(edge);
        }
        Ok(model)
    }

    /// All edges adjacent to any of `failed_nodes` (incoming, outgoing, and
    /// self-loops), as a failure scenario.
    pub fn node_failure_to_links(&self, failed_nodes: &BTreeSet<usize>) -> Result<FailureScenario> {
        for &node in failed_nodes {
            check_node(node, self.node_count)?;
        }
        let removed: BTreeSet<Edge> = self
            .edges
            .iter()
            .filter(|(from, to)| failed_nodes.contains(from) || failed_nodes.contains(to))
            .copied()
            .collect();
        if removed.is_empty() {
            return Err(Error::DegenerateNodeFailure(
                failed_nodes.iter().copied().collect(),
            ));
        }
        FailureScenario::new(removed)
    }

    /// Nodes with at least one incoming edge (self-loops count).
    pub fn receiving_nodes(&self) -> BTreeSet<usize> {
        self.edges.iter().map(|&(_, to)| to).collect()
    }
}

fn check_node(node: usize, node_count: usize) -> Result<()> {
    if node == 0 || node > node_count {
        return Err(Error::NodeOutOfRange(node, node_count));
    }
    Ok(())
}

/// A non-empty set of removed edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureScenario {
    removed_edges: BTreeSet<Edge>,
}

impl FailureScenario {
    pub fn new(removed_edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let removed_edges: BTreeSet<Edge> = removed_edges.into_iter().collect();
        if removed_edges.is_empty() {
            return Err(Error::EmptyScenario);
        }
        Ok(Self { removed_edges })
    }

    pub fn removed_edges(&self) -> &BTreeSet<Edge> {
        &self.removed_edges
    }

    /// Heads of the removed edges.
    pub fn ending_nodes(&self) -> BTreeSet<usize> {
        self.removed_edges.iter().map(|&(_, to)| to).collect()
    }
}

/// Ending nodes of an arbitrary edge set (the heads of its edges).
pub fn ending_nodes_of(edges: &BTreeSet<Edge>) -> BTreeSet<usize> {
    edges.iter().map(|&(_, to)| to).collect()
}

/// Symmetric difference of two scenarios' edge sets; either side may be the
/// empty (nominal) scenario. An empty difference means the scenarios are
/// identical and never distinguishable, which is an error.
pub fn scenario_difference(
    e_i: Option<&FailureScenario>,
    e_j: Option<&FailureScenario>,
) -> Result<BTreeSet<Edge>> {
    let empty = BTreeSet::new();
    let a = e_i.map_or(&empty, |s| &s.removed_edges);
    let b = e_j.map_or(&empty, |s| &s.removed_edges);
    let diff: BTreeSet<Edge> = a.symmetric_difference(b).copied().collect();
    if diff.is_empty() {
        return Err(Error::IdenticalScenarios);
    }
    Ok(diff)
}

/// Ordered candidate failure list. The nominal scenario is implicit and must
/// never be listed; listed scenarios are pairwise distinct edge sets.
#[derive(Debug, Clone)]
pub struct FailureSet {
    scenarios: Vec<FailureScenario>,
}

impl FailureSet {
    pub fn new(scenarios: Vec<FailureScenario>) -> Result<Self> {
        if scenarios.is_empty() {
            return Err(Error::EmptyFailureSet);
        }
        for i in 0..scenarios.len() {
            for j in (i + 1)..scenarios.len() {
                if scenarios[i].removed_edges == scenarios[j].removed_edges {
                    return Err(Error::DuplicateScenario(i + 1, j + 1));
                }
            }
        }
        Ok(Self { scenarios })
    }

    pub fn scenarios(&self) -> &[FailureScenario] {
        &self.scenarios
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Scenario by 1-based index; index 0 is the implicit nominal scenario
    /// and yields `None`.
    pub fn get(&self, index: usize) -> Option<&FailureScenario> {
        if index == 0 {
            None
        } else {
            self.scenarios.get(index - 1)
        }
    }
}
