//! End-to-end checks of the crate's guarantees, one test per check, each
//! printing a single PASS/FAIL line (run with `--nocapture` to see them).

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use netfdi::algebraic::{
    generic_detectable_mc, generic_isolable_mc, is_distinguishable, transfer_check,
    unobservable_subspace, DEFAULT_TOL,
};
use netfdi::fixtures;
use netfdi::netgraph::{Distance, Edge, FailureScenario, FailureSet, NetworkModel};
use netfdi::placement::{
    build_isolate_instance, exact_hitting_set, greedy_hitting_set, HittingSetInstance, Target,
    TargetOrigin, DEFAULT_EXACT_LIMIT,
};
use netfdi::sim::{detection_time, propagate, residual, TimeGrid};
use netfdi::structural::{
    disjoint_isolability_shortcut, generically_detectable, generically_isolable, pair_distance,
    transfer_index,
};
use netfdi::sysmodel::{assemble_lumped, sample_weights, SubsystemDynamics};

fn verdict(id: u32, label: &str, ok: bool) {
    println!(
        "[{}] check {id:02}: {label}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "check {id:02} failed: {label}");
}

#[test]
fn check_01_transfer_index_of_the_five_node_fixture() {
    let idx = transfer_index(&fixtures::example2_dynamics(), DEFAULT_TOL).unwrap();
    verdict(
        1,
        "transfer index of the 5-node fixture equals 2",
        idx.value == Distance::Finite(2),
    );
}

#[test]
fn check_02_single_link_census_with_one_sensor() {
    let model = fixtures::example2_model();
    let dynamics = fixtures::example2_dynamics();
    let expected: BTreeSet<Edge> = [(2, 5), (4, 5), (5, 1)].into_iter().collect();
    let mut ok = true;
    for &edge in model.edges() {
        let failure = FailureScenario::new([edge]).unwrap();
        let structural = generically_detectable(&dynamics, &model, &failure).unwrap();
        let mc = generic_detectable_mc(&dynamics, &model, &failure, 5, DEFAULT_TOL, 0).unwrap();
        ok &= structural.detectable == expected.contains(&edge);
        ok &= structural.detectable == mc.holds();
    }
    verdict(
        2,
        "exactly {(2,5),(4,5),(5,1)} are detectable with a sensor at node 1, graph and sampled verdicts agreeing",
        ok,
    );
}

#[test]
fn check_03_two_scenario_isolability_depends_on_the_sensor_set() {
    let model = fixtures::example2_model();
    let dynamics = fixtures::example2_dynamics();
    let set = fixtures::example2_failure_set();

    let narrow = generically_isolable(&dynamics, &model, &set).unwrap();
    let narrow_mc = generic_isolable_mc(&dynamics, &model, &set, 5, DEFAULT_TOL, 0).unwrap();
    let wide_model = model.with_sensors([1, 4]).unwrap();
    let wide = generically_isolable(&dynamics, &wide_model, &set).unwrap();
    let wide_mc = generic_isolable_mc(&dynamics, &wide_model, &set, 5, DEFAULT_TOL, 0).unwrap();

    verdict(
        3,
        "the two-scenario set is not isolable with sensor {1} but is with {1,4}, both routes agreeing",
        !narrow.isolable && !narrow_mc.holds() && wide.isolable && wide_mc.holds(),
    );
}

#[test]
fn check_04_isolability_placement_is_optimal() {
    let instance = build_isolate_instance(
        &fixtures::example2_dynamics(),
        &fixtures::example2_model(),
        &fixtures::example2_failure_set(),
    )
    .unwrap();
    let greedy = greedy_hitting_set(&instance).unwrap();
    let exact = exact_hitting_set(&instance, DEFAULT_EXACT_LIMIT).unwrap();
    verdict(
        4,
        "greedy returns sensors {1,4} and the exhaustive solver certifies optimum cardinality 2",
        greedy.sensors == vec![1, 4] && exact.sensors.len() == 2,
    );
}

#[test]
fn check_05_nine_bus_grid() {
    let model = fixtures::ieee9_model();
    let dynamics = fixtures::ieee9_dynamics();

    let idx = transfer_index(&dynamics, DEFAULT_TOL).unwrap();
    let mut ok = idx.value == Distance::Infinite;

    let bus1 = FailureScenario::new([(1, 4), (4, 1), (1, 1)]).unwrap();
    for sensor in 1..=9 {
        let placed = model.with_sensors([sensor]).unwrap();
        ok &= generically_detectable(&dynamics, &placed, &bus1)
            .unwrap()
            .detectable;
    }

    let instance = build_isolate_instance(&dynamics, &model, &fixtures::ieee9_failure_set()).unwrap();
    let greedy = greedy_hitting_set(&instance).unwrap();
    ok &= greedy.sensors.len() == 1;

    verdict(
        5,
        "9-bus grid: infinite transfer index, bus-1 failure detectable from any single bus, single-sensor isolating placement",
        ok,
    );
}

fn random_dynamics(rng: &mut ChaCha8Rng, max_n: usize) -> SubsystemDynamics {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=n);
    let p = rng.gen_range(1..=n);
    let mat = |rng: &mut ChaCha8Rng, r: usize, c: usize| {
        DMatrix::from_fn(r, c, |_, _| rng.gen_range(-1.0..1.0_f64))
    };
    SubsystemDynamics::new(
        mat(rng, n, n),
        mat(rng, n, m),
        mat(rng, m, n),
        mat(rng, p, n),
    )
    .unwrap()
}

fn random_model(rng: &mut ChaCha8Rng) -> NetworkModel {
    loop {
        let n = rng.gen_range(2..=6);
        let mut edges = Vec::new();
        for from in 1..=n {
            for to in 1..=n {
                if rng.gen_bool(0.35) {
                    edges.push((from, to));
                }
            }
        }
        let sensors: Vec<usize> = (1..=n).filter(|_| rng.gen_bool(0.4)).collect();
        if edges.is_empty() || sensors.is_empty() {
            continue;
        }
        return NetworkModel::new(n, edges, [], sensors).unwrap();
    }
}

fn random_failure(rng: &mut ChaCha8Rng, model: &NetworkModel) -> FailureScenario {
    let edges: Vec<Edge> = model.edges().iter().copied().collect();
    loop {
        let picked: Vec<Edge> = edges
            .iter()
            .filter(|_| rng.gen_bool(0.4))
            .copied()
            .collect();
        if !picked.is_empty() {
            return FailureScenario::new(picked).unwrap();
        }
    }
}

#[test]
fn check_06_graph_and_sampled_verdicts_agree_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(600);
    let mut detect_agree = 0;
    let detect_total = 500;
    for k in 0..detect_total {
        let dynamics = random_dynamics(&mut rng, 3);
        let model = random_model(&mut rng);
        let failure = random_failure(&mut rng, &model);
        let structural = generically_detectable(&dynamics, &model, &failure).unwrap();
        let mc = generic_detectable_mc(&dynamics, &model, &failure, 5, DEFAULT_TOL, k).unwrap();
        if structural.detectable == mc.holds() {
            detect_agree += 1;
        } else {
            println!(
                "  detect disagreement #{k}: graph says {}, sampling says {:?} (edges {:?}, sensors {:?}, failed {:?})",
                structural.detectable,
                mc.verdict,
                model.edges(),
                model.sensors(),
                failure.removed_edges()
            );
        }
    }

    let mut isolate_agree = 0;
    let isolate_total = 200;
    for k in 0..isolate_total {
        let dynamics = random_dynamics(&mut rng, 3);
        let model = random_model(&mut rng);
        let r = rng.gen_range(1..=3usize);
        let mut scenarios = Vec::new();
        for _ in 0..20 {
            let candidate = random_failure(&mut rng, &model);
            if scenarios.iter().all(|s: &FailureScenario| {
                s.removed_edges() != candidate.removed_edges()
            }) {
                scenarios.push(candidate);
            }
            if scenarios.len() == r {
                break;
            }
        }
        let set = FailureSet::new(scenarios).unwrap();
        let structural = generically_isolable(&dynamics, &model, &set).unwrap();
        let mc = generic_isolable_mc(&dynamics, &model, &set, 5, DEFAULT_TOL, k).unwrap();
        if structural.isolable == mc.holds() {
            isolate_agree += 1;
        } else {
            println!(
                "  isolate disagreement #{k}: graph says {}, sampling says {:?}",
                structural.isolable, mc.verdict
            );
        }
    }

    println!(
        "  detectability agreement {detect_agree}/{detect_total}, isolability agreement {isolate_agree}/{isolate_total}"
    );
    verdict(
        6,
        "graph-theoretic and sampled algebraic verdicts agree on at least 99% of random instances",
        detect_agree * 100 >= detect_total * 99 && isolate_agree * 100 >= isolate_total * 99,
    );
}

#[test]
fn check_07_subspace_and_transfer_conditions_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(700);
    let mut ok = true;
    for k in 0..100 {
        let n = rng.gen_range(2..=10);
        let p = rng.gen_range(1..n);
        let phi = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0_f64));
        let q = DMatrix::from_fn(p, n, |_, _| rng.gen_range(-1.0..1.0_f64));

        // a third of the cases are constructed to be indistinguishable:
        // perturbation columns confined to the unobservable subspace
        let dphi = match k % 3 {
            0 => {
                let basis = unobservable_subspace(&phi, &q).unwrap();
                if basis.ncols() == 0 {
                    DMatrix::zeros(n, n)
                } else {
                    let coeffs =
                        DMatrix::from_fn(basis.ncols(), n, |_, _| rng.gen_range(-1.0..1.0_f64));
                    basis * coeffs
                }
            }
            _ => DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0_f64)),
        };

        let subspace = is_distinguishable(&phi, &(&phi - &dphi), &q, DEFAULT_TOL).unwrap();
        let transfer = transfer_check(&phi, &dphi, &q, 3, DEFAULT_TOL).unwrap();
        if subspace.verdict != transfer.verdict {
            ok = false;
            println!(
                "  disagreement #{k}: subspace {:?} vs transfer {:?} (n = {n}, p = {p})",
                subspace.verdict, transfer.verdict
            );
        }
    }
    verdict(
        7,
        "kernel-containment and resolvent-sampling distinguishability tests agree on 100 random triples",
        ok,
    );
}

#[test]
fn check_08_disjoint_shortcut_and_pair_distance_symmetry() {
    let mut ok = true;

    // bundled systems first
    {
        let model = fixtures::example2_model();
        let dynamics = fixtures::example2_dynamics();
        let set = fixtures::example2_failure_set();
        ok &= symmetric_pairs(&model, &set);
        let all_links = FailureSet::new(
            model
                .edges()
                .iter()
                .map(|&e| FailureScenario::new([e]).unwrap())
                .collect(),
        )
        .unwrap();
        let shortcut = disjoint_isolability_shortcut(&dynamics, &model, &all_links)
            .unwrap()
            .unwrap();
        let full = generically_isolable(&dynamics, &model, &all_links).unwrap();
        ok &= shortcut.isolable == full.isolable;
        ok &= symmetric_pairs(&model, &all_links);
    }
    {
        let model = fixtures::ieee9_model();
        let set = fixtures::ieee9_failure_set();
        ok &= symmetric_pairs(&model, &set);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(800);
    let mut generated = 0;
    while generated < 100 {
        let dynamics = random_dynamics(&mut rng, 3);
        let model = random_model(&mut rng);
        let mut pool: Vec<Edge> = model.edges().iter().copied().collect();
        let r = rng.gen_range(2..=3usize);
        if pool.len() < r {
            continue;
        }
        // deal edges into r disjoint non-empty scenarios
        let mut buckets: Vec<Vec<Edge>> = vec![Vec::new(); r];
        while let Some(edge) = pool.pop() {
            buckets[rng.gen_range(0..r)].push(edge);
        }
        if buckets.iter().any(Vec::is_empty) {
            continue;
        }
        let set = FailureSet::new(
            buckets
                .into_iter()
                .map(|edges| FailureScenario::new(edges).unwrap())
                .collect(),
        )
        .unwrap();
        generated += 1;

        let shortcut = disjoint_isolability_shortcut(&dynamics, &model, &set)
            .unwrap()
            .expect("scenarios are edge-disjoint by construction");
        let full = generically_isolable(&dynamics, &model, &set).unwrap();
        if shortcut.isolable != full.isolable {
            ok = false;
            println!(
                "  shortcut mismatch: shortcut {} vs pairwise {}",
                shortcut.isolable, full.isolable
            );
        }
        ok &= symmetric_pairs(&model, &set);
    }
    verdict(
        8,
        "edge-disjoint shortcut matches the pairwise verdict and pair distances are symmetric",
        ok,
    );
}

fn symmetric_pairs(model: &NetworkModel, set: &FailureSet) -> bool {
    let r = set.len();
    for i in 0..=r {
        for j in (i + 1)..=r {
            let d_ij = pair_distance(model, set.get(i), set.get(j)).unwrap();
            let d_ji = pair_distance(model, set.get(j), set.get(i)).unwrap();
            if d_ij != d_ji {
                println!("  asymmetric pair ({i}, {j}): {d_ij} vs {d_ji}");
                return false;
            }
        }
    }
    true
}

#[test]
fn check_09_greedy_stays_within_the_logarithmic_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(900);
    let mut ok = true;
    let mut worst_ratio = 1.0_f64;
    for _ in 0..200 {
        let v = rng.gen_range(3..=12usize);
        let q = rng.gen_range(1..=8usize);
        let targets: Vec<Target> = (0..q)
            .map(|k| {
                let mut nodes: BTreeSet<usize> =
                    (1..=v).filter(|_| rng.gen_bool(0.3)).collect();
                if nodes.is_empty() {
                    nodes.insert(rng.gen_range(1..=v));
                }
                Target {
                    nodes,
                    origin: TargetOrigin::ReceivingNode(k + 1),
                }
            })
            .collect();
        let instance = HittingSetInstance::new((1..=v).collect(), targets).unwrap();
        let greedy = greedy_hitting_set(&instance).unwrap();
        let exact = exact_hitting_set(&instance, 12).unwrap();
        ok &= instance.is_hit_by(&greedy.sensor_set());
        ok &= instance.is_hit_by(&exact.sensor_set());
        let ratio = greedy.sensors.len() as f64 / exact.sensors.len() as f64;
        worst_ratio = worst_ratio.max(ratio);
        ok &= ratio <= instance.approximation_bound();
    }
    println!("  worst greedy/optimal ratio over 200 instances: {worst_ratio:.3}");
    verdict(
        9,
        "greedy placements are feasible and within (1 + ln q) of the exhaustive optimum on 200 random instances",
        ok,
    );
}

#[test]
fn check_10_trajectories_match_the_distinguishability_verdicts() {
    let model = fixtures::example2_model();
    let dynamics = fixtures::example2_dynamics();
    let weights = sample_weights(&model, 0);
    let grid = TimeGrid::uniform(10.0, 400).unwrap();
    let nominal = assemble_lumped(&dynamics, &weights, model.sensors()).unwrap();

    let silent = [(1, 2), (2, 3), (3, 4)];
    let mut ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut visible_hits = vec![0usize; 3];
    let trials = 100;
    for _ in 0..trials {
        let x0 = DVector::from_fn(15, |_, _| rng.gen_range(-1.0..1.0_f64)).normalize();
        let base = propagate(&nominal, &x0, &grid, "nominal").unwrap();
        for (idx, &edge) in model.edges().iter().enumerate() {
            let failure = FailureScenario::new([edge]).unwrap();
            let faulty =
                assemble_lumped(&dynamics, &weights.zero_edges(&failure), model.sensors())
                    .unwrap();
            let traj = propagate(&faulty, &x0, &grid, "faulty").unwrap();
            let sup = residual(&base, &traj).unwrap().sup_norm;
            if silent.contains(&edge) {
                ok &= sup < 1e-8;
            } else {
                // edges iterate in sorted order; the visible ones are at
                // positions 2, 4, 5 -> compact indices 0, 1, 2
                let slot = match idx {
                    2 => 0,
                    4 => 1,
                    _ => 2,
                };
                if sup > 1e-6 {
                    visible_hits[slot] += 1;
                }
            }
        }
    }
    ok &= visible_hits.iter().all(|&h| h >= 99);
    println!("  visible-failure residual hits per link: {visible_hits:?}/{trials}");
    verdict(
        10,
        "silent links leave the output unchanged and visible links perturb it for at least 99/100 initial states",
        ok,
    );
}

#[test]
fn check_11_more_sensors_detect_no_later() {
    let model = fixtures::ieee9_model();
    let dynamics = fixtures::ieee9_dynamics();
    let weights = sample_weights(&model, 0);
    let failure = FailureScenario::new([(1, 4), (4, 1), (1, 1)]).unwrap();
    let faulty_weights = weights.zero_edges(&failure);
    let grid = TimeGrid::uniform(10.0, 500).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1100);
    let x0 = DVector::from_fn(18, |_, _| rng.gen_range(-1.0..1.0_f64)).normalize();

    let sensor_sets: [&[usize]; 3] = [&[4], &[4, 3], &[4, 5, 3]];
    let mut medians = Vec::new();
    for sensors in sensor_sets {
        let s: BTreeSet<usize> = sensors.iter().copied().collect();
        let a = propagate(&assemble_lumped(&dynamics, &weights, &s).unwrap(), &x0, &grid, "n")
            .unwrap();
        let b = propagate(
            &assemble_lumped(&dynamics, &faulty_weights, &s).unwrap(),
            &x0,
            &grid,
            "f",
        )
        .unwrap();
        let mut times: Vec<f64> = (0..20)
            .map(|seed| {
                detection_time(&a, &b, 0.05, 0.15, seed)
                    .unwrap()
                    .first_detection_time
                    .unwrap_or(f64::INFINITY)
            })
            .collect();
        times.sort_by(f64::total_cmp);
        medians.push((times[9] + times[10]) / 2.0);
    }
    println!("  median detection times: {medians:?}");
    verdict(
        11,
        "median noisy detection time is non-increasing as sensors are added",
        medians.iter().all(|m| m.is_finite())
            && medians[0] >= medians[1]
            && medians[1] >= medians[2],
    );
}
