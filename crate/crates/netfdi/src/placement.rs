//! Sensor placement as a hitting-set problem.
//!
//! Detectability of every single-link failure reduces to hitting one target
//! per receiving node (the nodes within `r_max - 1` hops of it); isolability
//! of a failure set reduces to hitting one target per scenario pair. The
//! greedy solver carries the classic `1 + ln q` approximation guarantee; the
//! exhaustive solver certifies optimality on small ground sets.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::netgraph::{ending_nodes_of, scenario_difference, Distance, FailureSet, NetworkModel};
use crate::structural::{transfer_index, TransferIndex};
use crate::sysmodel::SubsystemDynamics;

/// Default cap on the ground-set size accepted by [`exact_hitting_set`].
pub const DEFAULT_EXACT_LIMIT: usize = 16;

/// Where a target came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TargetOrigin {
    /// Detectability of failures ending at this node.
    ReceivingNode(usize),
    /// Distinguishability of scenario pair `(i, j)`, 0 = nominal.
    ScenarioPair(usize, usize),
}

impl std::fmt::Display for TargetOrigin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TargetOrigin::ReceivingNode(v) => write!(f, "receiving node {v}"),
            TargetOrigin::ScenarioPair(i, j) => write!(f, "scenario pair ({i}, {j})"),
        }
    }
}

/// One set that the chosen sensors must intersect.
#[derive(Debug, Clone, Serialize)]
pub struct Target {
    pub nodes: BTreeSet<usize>,
    pub origin: TargetOrigin,
}

/// A hitting-set instance: candidate sensor locations and the targets every
/// feasible placement must hit.
#[derive(Debug, Clone, Serialize)]
pub struct HittingSetInstance {
    ground_set: Vec<usize>,
    targets: Vec<Target>,
}

impl HittingSetInstance {
    /// Build an instance, rejecting empty targets and targets that leave the
    /// ground set.
    pub fn new(ground_set: Vec<usize>, targets: Vec<Target>) -> Result<Self> {
        let ground: BTreeSet<usize> = ground_set.iter().copied().collect();
        for target in &targets {
            if target.nodes.is_empty() {
                return match target.origin {
                    TargetOrigin::ScenarioPair(i, j) => Err(Error::InfeasiblePair(i, j)),
                    origin => Err(Error::EmptyTarget(origin.to_string())),
                };
            }
            if let Some(&stray) = target.nodes.difference(&ground).next() {
                return Err(Error::EmptyTarget(format!(
                    "{} contains node {stray} outside the ground set",
                    target.origin
                )));
            }
        }
        Ok(Self { ground_set, targets })
    }

    pub fn ground_set(&self) -> &[usize] {
        &self.ground_set
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    /// Number of targets `q`.
    pub fn target_count(&self) -> usize {
        self.targets.len()
    }

    /// Whether `sensors` intersects every target.
    pub fn is_hit_by(&self, sensors: &BTreeSet<usize>) -> bool {
        self.targets
            .iter()
            .all(|t| !t.nodes.is_disjoint(sensors))
    }

    /// The `1 + ln q` greedy guarantee for this instance (1 when q = 0).
    pub fn approximation_bound(&self) -> f64 {
        if self.targets.is_empty() {
            1.0
        } else {
            1.0 + (self.targets.len() as f64).ln()
        }
    }
}

/// How a placement's cardinality is certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Optimality {
    GreedyOnly,
    ProvedOptimal,
}

/// A feasible sensor placement.
#[derive(Debug, Clone, Serialize)]
pub struct PlacementResult {
    /// Chosen sensors in the order they were committed.
    pub sensors: Vec<usize>,
    /// Number of targets hit (equals the instance's target count).
    pub covered: usize,
    pub optimality: Optimality,
    /// The `1 + ln q` guarantee in force when `optimality` is `GreedyOnly`.
    pub bound: f64,
}

impl PlacementResult {
    pub fn sensor_set(&self) -> BTreeSet<usize> {
        self.sensors.iter().copied().collect()
    }
}

/// Nodes within `radius` hops of `source` (forward reachability for
/// `Infinite`), intersected with nothing — callers restrict as needed.
fn reach_set(model: &NetworkModel, source: usize, radius: Distance) -> BTreeSet<usize> {
    let dist = model.bfs_from(source);
    (1..=model.node_count())
        .filter(|&u| dist[u] <= radius)
        .collect()
}

fn radius_from(r_max: &TransferIndex) -> Result<Distance> {
    match r_max.value {
        Distance::Finite(0) => Err(Error::ZeroTransferIndex),
        Distance::Finite(i) => Ok(Distance::Finite(i - 1)),
        Distance::Infinite => Ok(Distance::Infinite),
    }
}

/// One target per receiving node `i`: the nodes within `r_max - 1` hops of
/// `i` in the faultless graph. Hitting all of them makes every single-link
/// failure generically detectable.
pub fn build_detect_instance(
    dynamics: &SubsystemDynamics,
    model: &NetworkModel,
) -> Result<HittingSetInstance> {
    let r_max = transfer_index(dynamics, crate::algebraic::DEFAULT_TOL)?;
    let radius = radius_from(&r_max)?;
    let targets = model
        .receiving_nodes()
        .into_iter()
        .map(|i| Target {
            nodes: reach_set(model, i, radius),
            origin: TargetOrigin::ReceivingNode(i),
        })
        .collect();
    HittingSetInstance::new((1..=model.node_count()).collect(), targets)
}

/// One target per scenario pair `0 <= i < j <= r`: the union of the
/// `r_max - 1` reach sets of the pair difference's ending nodes, measured in
/// the post-failure graph of scenario `i`.
pub fn build_isolate_instance(
    dynamics: &SubsystemDynamics,
    model: &NetworkModel,
    failure_set: &FailureSet,
) -> Result<HittingSetInstance> {
    let r_max = transfer_index(dynamics, crate::algebraic::DEFAULT_TOL)?;
    let radius = radius_from(&r_max)?;
    let r = failure_set.len();
    let mut targets = Vec::with_capacity((r + 1) * r / 2);
    for i in 0..=r {
        for j in (i + 1)..=r {
            let diff = scenario_difference(failure_set.get(i), failure_set.get(j))?;
            let g_i = match failure_set.get(i) {
                Some(s) => model.apply_failure(s)?,
                None => model.clone(),
            };
            let mut nodes = BTreeSet::new();
            for &v in &ending_nodes_of(&diff) {
                nodes.extend(reach_set(&g_i, v, radius));
            }
            if nodes.is_empty() {
                return Err(Error::InfeasiblePair(i, j));
            }
            targets.push(Target {
                nodes,
                origin: TargetOrigin::ScenarioPair(i, j),
            });
        }
    }
    HittingSetInstance::new((1..=model.node_count()).collect(), targets)
}

/// Greedy hitting set: repeatedly commit the ground-set element hitting the
/// most not-yet-hit targets, breaking ties by smallest node index.
pub fn greedy_hitting_set(instance: &HittingSetInstance) -> Result<PlacementResult> {
    let q = instance.target_count();
    let mut unhit: Vec<&Target> = instance.targets().iter().collect();
    let mut sensors = Vec::new();
    let mut candidates: BTreeSet<usize> = instance.ground_set().iter().copied().collect();
    while !unhit.is_empty() {
        // BTreeSet iteration is ascending, so strict > keeps the lowest index
        let (&best, _) = candidates
            .iter()
            .map(|s| (s, unhit.iter().filter(|t| t.nodes.contains(s)).count()))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(a.0)))
            .expect("non-empty targets over a validated ground set");
        sensors.push(best);
        candidates.remove(&best);
        unhit.retain(|t| !t.nodes.contains(&best));
    }
    Ok(PlacementResult {
        sensors,
        covered: q,
        optimality: Optimality::GreedyOnly,
        bound: instance.approximation_bound(),
    })
}

/// Exhaustive minimum hitting set: subsets in increasing cardinality,
/// lexicographic within a cardinality. Rejects ground sets larger than
/// `size_limit`.
pub fn exact_hitting_set(
    instance: &HittingSetInstance,
    size_limit: usize,
) -> Result<PlacementResult> {
    let ground = instance.ground_set();
    if ground.len() > size_limit {
        return Err(Error::GroundSetTooLarge(ground.len(), size_limit));
    }
    let q = instance.target_count();
    for size in 0..=ground.len() {
        let mut found = None;
        visit_subsets(ground, size, &mut Vec::new(), 0, &mut |subset| {
            if found.is_none() {
                let set: BTreeSet<usize> = subset.iter().copied().collect();
                if instance.is_hit_by(&set) {
                    found = Some(subset.to_vec());
                }
            }
        });
        if let Some(sensors) = found {
            return Ok(PlacementResult {
                sensors,
                covered: q,
                optimality: Optimality::ProvedOptimal,
                bound: instance.approximation_bound(),
            });
        }
    }
    unreachable!("the full ground set hits every validated (non-empty) target")
}

fn visit_subsets(
    ground: &[usize],
    size: usize,
    current: &mut Vec<usize>,
    start: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if current.len() == size {
        visit(current);
        return;
    }
    let remaining = size - current.len();
    for idx in start..=ground.len().saturating_sub(remaining) {
        current.push(ground[idx]);
        visit_subsets(ground, size, current, idx + 1, visit);
        current.pop();
    }
}
