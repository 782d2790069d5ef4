//! Graph-theoretic generic verdicts: the transfer index of the subsystem
//! dynamics, distance indices on the topology, and the resulting generic
//! detectability and isolability decisions.
//!
//! A failure is generically detectable iff `d_min <= r_max - 1`, where
//! `d_min` is the shortest hop distance from the failure's ending nodes to a
//! sensor in the faultless graph and `r_max` is the largest exponent `i`
//! with `C [(lambda I - A)^(-1) H]^i` not identically zero. When both sides
//! are infinite the inequality does not hold.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{cmax_abs, complexify, resolvent_solve, sample_lambda, spectral_radius};
use crate::netgraph::{
    ending_nodes_of, scenario_difference, Distance, FailureScenario, FailureSet, NetworkModel,
};
use crate::sysmodel::SubsystemDynamics;

const LAMBDA_SAMPLES: usize = 3;
const SOLVE_RETRIES: usize = 10;

/// How a transfer-index value was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Certification {
    /// `C H_s^n` is still nonzero at the cap `n`; kernel chains of an
    /// n-dimensional operator have stabilized, so no later power vanishes.
    CapRule,
    /// The next power is identically zero as a rational matrix.
    ZeroOutput,
}

/// The transfer index `r_max` of the subsystem dynamics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TransferIndex {
    pub value: Distance,
    pub certified_by: Certification,
    /// Set when `C = 0`, which forces the degenerate value 0.
    pub degenerate_output: bool,
}

/// Largest exponent `i` such that `C H_s(lambda)^i` is not identically zero,
/// with `H_s(lambda) = (lambda I - A)^(-1) H`. Tested at `i = 1..=n` on
/// random sample points; surviving all `n` powers certifies `Infinite`.
pub fn transfer_index(dynamics: &SubsystemDynamics, tol: f64) -> Result<TransferIndex> {
    if tol <= 0.0 {
        return Err(Error::NonPositiveTolerance(tol));
    }
    let c = dynamics.c();
    if c.amax() == 0.0 {
        return Ok(TransferIndex {
            value: Distance::Finite(0),
            certified_by: Certification::ZeroOutput,
            degenerate_output: true,
        });
    }
    let n = dynamics.state_dim();
    let rho = spectral_radius(dynamics.a());
    let a_c = complexify(dynamics.a());
    let h_c = complexify(dynamics.h());
    let c_c = complexify(c);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0a11_5eed);

    // per sample point: the running product C H_s^i and its scale reference
    let mut states = Vec::with_capacity(LAMBDA_SAMPLES);
    for _ in 0..LAMBDA_SAMPLES {
        let mut h_s = None;
        let mut lambda = sample_lambda(&mut rng, rho);
        for attempt in 0..=SOLVE_RETRIES {
            if let Some(m) = resolvent_solve(&a_c, lambda, &h_c) {
                h_s = Some(m);
                break;
            }
            if attempt == SOLVE_RETRIES {
                return Err(Error::SolveFailed(SOLVE_RETRIES));
            }
            lambda = sample_lambda(&mut rng, rho);
        }
        let h_s = h_s.expect("solved or returned above");
        let h_scale = cmax_abs(&h_s).max(f64::MIN_POSITIVE);
        states.push((c_c.clone(), h_s, h_scale, c.amax()));
    }

    for i in 1..=n {
        let mut all_zero = true;
        for (g, h_s, h_scale, scale) in states.iter_mut() {
            *g *= &*h_s;
            *scale *= *h_scale;
            all_zero &= cmax_abs(g) <= tol * *scale;
        }
        if all_zero {
            return Ok(TransferIndex {
                value: Distance::Finite(i - 1),
                certified_by: Certification::ZeroOutput,
                degenerate_output: false,
            });
        }
    }
    Ok(TransferIndex {
        value: Distance::Infinite,
        certified_by: Certification::CapRule,
        degenerate_output: false,
    })
}

/// `d_min`: shortest distance from the failure's ending nodes to the sensor
/// set, measured in the faultless graph.
pub fn distance_index(model: &NetworkModel, failure: &FailureScenario) -> Result<Distance> {
    if model.sensors().is_empty() {
        return Err(Error::EmptySensors);
    }
    min_distance_to_sensors(model, &failure.ending_nodes(), model)
}

fn min_distance_to_sensors(
    graph: &NetworkModel,
    sources: &std::collections::BTreeSet<usize>,
    sensor_model: &NetworkModel,
) -> Result<Distance> {
    let mut best = Distance::Infinite;
    for &v in sources {
        let dist = graph.bfs_from(v);
        for &u in sensor_model.sensors() {
            best = best.min(dist[u]);
        }
    }
    Ok(best)
}

/// Whether `d <= r_max - 1` holds, with the convention that the inequality
/// fails when both sides are infinite.
pub fn detectability_condition(d: Distance, r_max: Distance) -> bool {
    match r_max {
        Distance::Infinite => d.is_finite(),
        Distance::Finite(0) => false,
        Distance::Finite(i) => d <= Distance::Finite(i - 1),
    }
}

/// Structural verdict on one failure.
#[derive(Debug, Clone, Serialize)]
pub struct StructuralDetectability {
    pub detectable: bool,
    pub d_min: Distance,
    pub r_max: TransferIndex,
    /// A shortest path from an ending node to a sensor, present when
    /// detectable and `d_min` is finite.
    pub witness_path: Option<Vec<usize>>,
}

/// Generic detectability verdict: detectable iff `d_min <= r_max - 1`.
pub fn generically_detectable(
    dynamics: &SubsystemDynamics,
    model: &NetworkModel,
    failure: &FailureScenario,
) -> Result<StructuralDetectability> {
    model.apply_failure(failure)?;
    let r_max = transfer_index(dynamics, crate::algebraic::DEFAULT_TOL)?;
    let d_min = distance_index(model, failure)?;
    let detectable = detectability_condition(d_min, r_max.value);
    let witness_path = if detectable {
        find_witness_path(model, &failure.ending_nodes(), d_min)
    } else {
        None
    };
    Ok(StructuralDetectability {
        detectable,
        d_min,
        r_max,
        witness_path,
    })
}

fn find_witness_path(
    model: &NetworkModel,
    sources: &std::collections::BTreeSet<usize>,
    d_min: Distance,
) -> Option<Vec<usize>> {
    for &v in sources {
        for &u in model.sensors() {
            if model.shortest_distance(v, u).ok()? == d_min {
                return model.shortest_path(v, u);
            }
        }
    }
    None
}

/// `d_ij`: shortest distance from the ending nodes of the symmetric
/// difference `E_ij` to the sensors, measured in the post-failure graph
/// `G_i`. Either argument may be the nominal (empty) scenario.
pub fn pair_distance(
    model: &NetworkModel,
    e_i: Option<&FailureScenario>,
    e_j: Option<&FailureScenario>,
) -> Result<Distance> {
    if model.sensors().is_empty() {
        return Err(Error::EmptySensors);
    }
    let diff = scenario_difference(e_i, e_j)?;
    let g_i = match e_i {
        Some(s) => model.apply_failure(s)?,
        None => model.clone(),
    };
    min_distance_to_sensors(&g_i, &ending_nodes_of(&diff), model)
}

/// Structural verdict on a failure set.
#[derive(Debug, Clone, Serialize)]
pub struct StructuralIsolability {
    pub isolable: bool,
    /// `max d_ij` over all pairs, nominal scenario included.
    pub d_min_set: Distance,
    pub r_max: TransferIndex,
    /// All pair distances, lexicographic over `(i, j)` with `0 <= i < j <= r`.
    pub pair_distances: Vec<((usize, usize), Distance)>,
    /// Lexicographically first pair violating the distance bound.
    pub failing_pair: Option<(usize, usize)>,
}

/// Generic isolability verdict: isolable iff `max d_ij <= r_max - 1`.
pub fn generically_isolable(
    dynamics: &SubsystemDynamics,
    model: &NetworkModel,
    failure_set: &FailureSet,
) -> Result<StructuralIsolability> {
    let r_max = transfer_index(dynamics, crate::algebraic::DEFAULT_TOL)?;
    let r = failure_set.len();
    let mut pair_distances = Vec::new();
    let mut worst = Distance::Finite(0);
    let mut failing_pair = None;
    for i in 0..=r {
        for j in (i + 1)..=r {
            let d = pair_distance(model, failure_set.get(i), failure_set.get(j))?;
            if !detectability_condition(d, r_max.value) && failing_pair.is_none() {
                failing_pair = Some((i, j));
            }
            worst = worst.max(d);
            pair_distances.push(((i, j), d));
        }
    }
    Ok(StructuralIsolability {
        isolable: failing_pair.is_none(),
        d_min_set: worst,
        r_max,
        pair_distances,
        failing_pair,
    })
}

/// Shortcut verdict for pairwise edge-disjoint failure sets.
#[derive(Debug, Clone, Serialize)]
pub struct DisjointShortcut {
    pub isolable: bool,
    pub per_scenario: Vec<StructuralDetectability>,
    /// 1-based index of the first generically undetectable scenario.
    pub failing_scenario: Option<usize>,
}

/// When all scenarios are pairwise edge-disjoint, the set is generically
/// isolable iff every scenario is generically detectable; returns `None`
/// (not applicable) when any two scenarios share an edge.
pub fn disjoint_isolability_shortcut(
    dynamics: &SubsystemDynamics,
    model: &NetworkModel,
    failure_set: &FailureSet,
) -> Result<Option<DisjointShortcut>> {
    let scenarios = failure_set.scenarios();
    for i in 0..scenarios.len() {
        for j in (i + 1)..scenarios.len() {
            if scenarios[i]
                .removed_edges()
                .intersection(scenarios[j].removed_edges())
                .next()
                .is_some()
            {
                return Ok(None);
            }
        }
    }
    let mut per_scenario = Vec::with_capacity(scenarios.len());
    let mut failing_scenario = None;
    for (idx, scenario) in scenarios.iter().enumerate() {
        let verdict = generically_detectable(dynamics, model, scenario)?;
        if !verdict.detectable && failing_scenario.is_none() {
            failing_scenario = Some(idx + 1);
        }
        per_scenario.push(verdict);
    }
    Ok(Some(DisjointShortcut {
        isolable: failing_scenario.is_none(),
        per_scenario,
        failing_scenario,
    }))
}

/// A witness of non-isolability: a nested scenario pair whose
/// difference cannot reach the sensors within the transfer index.
#[derive(Debug, Clone, Serialize)]
pub struct SubsetCounterexample {
    /// 1-based positions in the failure set, lexicographic.
    pub pair: (usize, usize),
    pub difference: Vec<(usize, usize)>,
    pub pair_distance: Distance,
}

/// Scan for nested scenario pairs (`E_j` a subset of `E_i`) whose difference
/// is undetectable. The difference is measured as the pair distance `d_ij`
/// (in the graph of the lower-indexed scenario), so the screen's verdicts
/// always agree with the full pairwise computation.
pub fn subset_nonisolability_screen(
    dynamics: &SubsystemDynamics,
    model: &NetworkModel,
    failure_set: &FailureSet,
) -> Result<Option<SubsetCounterexample>> {
    let r_max = transfer_index(dynamics, crate::algebraic::DEFAULT_TOL)?;
    let scenarios = failure_set.scenarios();
    for i in 0..scenarios.len() {
        for j in (i + 1)..scenarios.len() {
            let a = scenarios[i].removed_edges();
            let b = scenarios[j].removed_edges();
            let nested = a.is_subset(b) || b.is_subset(a);
            if !nested {
                continue;
            }
            let d = pair_distance(model, failure_set.get(i + 1), failure_set.get(j + 1))?;
            if !detectability_condition(d, r_max.value) {
                let difference: Vec<_> = a.symmetric_difference(b).copied().collect();
                return Ok(Some(SubsetCounterexample {
                    pair: (i + 1, j + 1),
                    difference,
                    pair_distance: d,
                }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::DEFAULT_TOL;
    use crate::fixtures;
    use nalgebra::DMatrix;

    #[test]
    fn transfer_index_example2_is_two() {
        let idx = transfer_index(&fixtures::example2_dynamics(), DEFAULT_TOL).unwrap();
        assert_eq!(idx.value, Distance::Finite(2));
        assert_eq!(idx.certified_by, Certification::ZeroOutput);
        assert!(!idx.degenerate_output);
    }

    #[test]
    fn transfer_index_single_integrator_infinite() {
        let idx = transfer_index(&fixtures::example1_dynamics(), DEFAULT_TOL).unwrap();
        assert_eq!(idx.value, Distance::Infinite);
        assert_eq!(idx.certified_by, Certification::CapRule);
    }

    #[test]
    fn transfer_index_swing_dynamics_infinite() {
        let idx = transfer_index(&fixtures::ieee9_dynamics(), DEFAULT_TOL).unwrap();
        assert_eq!(idx.value, Distance::Infinite);
    }

    #[test]
    fn transfer_index_zero_output_degenerate() {
        let dynamics = SubsystemDynamics::new(
            DMatrix::identity(2, 2),
            DMatrix::identity(2, 2),
            DMatrix::identity(2, 2),
            DMatrix::zeros(1, 2),
        )
        .unwrap();
        let idx = transfer_index(&dynamics, DEFAULT_TOL).unwrap();
        assert_eq!(idx.value, Distance::Finite(0));
        assert!(idx.degenerate_output);
    }

    #[test]
    fn distance_index_example2() {
        let model = fixtures::example2_model();
        let f = FailureScenario::new([(1, 2)]).unwrap();
        assert_eq!(distance_index(&model, &f).unwrap(), Distance::Finite(2));
        let f = FailureScenario::new([(2, 5)]).unwrap();
        assert_eq!(distance_index(&model, &f).unwrap(), Distance::Finite(1));
        let f = FailureScenario::new([(5, 1)]).unwrap();
        assert_eq!(distance_index(&model, &f).unwrap(), Distance::Finite(0));
    }

    #[test]
    fn generically_detectable_example2_census() {
        let model = fixtures::example2_model();
        let dynamics = fixtures::example2_dynamics();
        let detectable = [(2, 5), (4, 5), (5, 1)];
        for &edge in model.edges() {
            let f = FailureScenario::new([edge]).unwrap();
            let verdict = generically_detectable(&dynamics, &model, &f).unwrap();
            assert_eq!(verdict.detectable, detectable.contains(&edge), "{edge:?}");
            if verdict.detectable {
                let path = verdict.witness_path.expect("witness path present");
                assert_eq!(*path.last().unwrap(), 1);
            }
        }
    }

    #[test]
    fn pair_distance_fixtures() {
        let model = fixtures::example2_model();
        let set = fixtures::example2_failure_set();
        // (E_0, E_1): ending nodes {4, 5}, dist(5,1) = 1 in G
        assert_eq!(
            pair_distance(&model, None, set.get(1)).unwrap(),
            Distance::Finite(1)
        );
        // (E_1, E_2) with a sensor on the ending node 4
        let with_4 = model.with_sensors([4]).unwrap();
        assert_eq!(
            pair_distance(&with_4, set.get(1), set.get(2)).unwrap(),
            Distance::Finite(0)
        );
        // (E_0, E_f) coincides with the plain distance index
        let f = FailureScenario::new([(2, 5)]).unwrap();
        assert_eq!(
            pair_distance(&model, None, Some(&f)).unwrap(),
            distance_index(&model, &f).unwrap()
        );
    }

    #[test]
    fn generically_isolable_example2() {
        let model = fixtures::example2_model();
        let dynamics = fixtures::example2_dynamics();
        let set = fixtures::example2_failure_set();

        let verdict = generically_isolable(&dynamics, &model, &set).unwrap();
        assert!(!verdict.isolable);
        assert_eq!(verdict.failing_pair, Some((1, 2)));

        let with_4 = model.with_sensors([1, 4]).unwrap();
        let verdict = generically_isolable(&dynamics, &with_4, &set).unwrap();
        assert!(verdict.isolable);
    }

    #[test]
    fn generically_isolable_ieee9_single_sensor() {
        let model = fixtures::ieee9_model();
        let dynamics = fixtures::ieee9_dynamics();
        let set = fixtures::ieee9_failure_set();
        let verdict = generically_isolable(&dynamics, &model, &set).unwrap();
        assert!(verdict.isolable);
    }

    #[test]
    fn shortcut_on_disjoint_sets() {
        let model = fixtures::example2_model();
        let dynamics = fixtures::example2_dynamics();

        // all six single-link failures: disjoint, but three are undetectable
        let all_links: Vec<_> = model
            .edges()
            .iter()
            .map(|&e| FailureScenario::new([e]).unwrap())
            .collect();
        let set = FailureSet::new(all_links).unwrap();
        let shortcut = disjoint_isolability_shortcut(&dynamics, &model, &set)
            .unwrap()
            .expect("applicable");
        assert!(!shortcut.isolable);
        let full = generically_isolable(&dynamics, &model, &set).unwrap();
        assert_eq!(shortcut.isolable, full.isolable);

        // the three detectable links alone are isolable
        let detectable = FailureSet::new(
            [(2, 5), (4, 5), (5, 1)]
                .iter()
                .map(|&e| FailureScenario::new([e]).unwrap())
                .collect(),
        )
        .unwrap();
        let shortcut = disjoint_isolability_shortcut(&dynamics, &model, &detectable)
            .unwrap()
            .expect("applicable");
        assert!(shortcut.isolable);
        let full = generically_isolable(&dynamics, &model, &detectable).unwrap();
        assert!(full.isolable);

        // overlapping set: not applicable
        let overlapping = fixtures::example2_failure_set();
        assert!(disjoint_isolability_shortcut(&dynamics, &model, &overlapping)
            .unwrap()
            .is_none());
    }

    #[test]
    fn subset_screen_finds_example2_pair() {
        let model = fixtures::example2_model();
        let dynamics = fixtures::example2_dynamics();
        let set = fixtures::example2_failure_set();
        let hit = subset_nonisolability_screen(&dynamics, &model, &set)
            .unwrap()
            .expect("counterexample");
        assert_eq!(hit.pair, (1, 2));
        assert_eq!(hit.difference, vec![(3, 4)]);
    }

    #[test]
    fn subset_screen_skips_disjoint_and_detectable_differences() {
        let model = fixtures::example2_model();
        let dynamics = fixtures::example2_dynamics();

        let disjoint = FailureSet::new(vec![
            FailureScenario::new([(2, 5)]).unwrap(),
            FailureScenario::new([(4, 5)]).unwrap(),
        ])
        .unwrap();
        assert!(subset_nonisolability_screen(&dynamics, &model, &disjoint)
            .unwrap()
            .is_none());

        // nested pair whose difference (5,1) stays detectable after the
        // failure of (2,5): ending node 1 carries the sensor
        let nested = FailureSet::new(vec![
            FailureScenario::new([(2, 5), (5, 1)]).unwrap(),
            FailureScenario::new([(2, 5)]).unwrap(),
        ])
        .unwrap();
        assert!(subset_nonisolability_screen(&dynamics, &model, &nested)
            .unwrap()
            .is_none());
    }

    #[test]
    fn sensor_monotonicity_on_fixture() {
        // enlarging the sensor set never flips detectable to undetectable
        let model = fixtures::example2_model();
        let dynamics = fixtures::example2_dynamics();
        for &edge in model.edges() {
            let f = FailureScenario::new([edge]).unwrap();
            let base = generically_detectable(&dynamics, &model, &f).unwrap();
            let bigger = model.with_sensors([1, 3, 4]).unwrap();
            let wide = generically_detectable(&dynamics, &bigger, &f).unwrap();
            if base.detectable {
                assert!(wide.detectable);
            }
        }
    }
}
