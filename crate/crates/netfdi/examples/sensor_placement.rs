//! Find minimum sensor placements by reducing to hitting set: one run that
//! makes every single-link failure detectable, one that makes the bundled
//! two-scenario failure set isolable, and the 9-bus case where a single
//! sensor anywhere suffices.

use netfdi::fixtures;
use netfdi::placement::{
    build_detect_instance, build_isolate_instance, exact_hitting_set, greedy_hitting_set,
    DEFAULT_EXACT_LIMIT,
};

fn main() {
    let model = fixtures::example2_model();
    let dynamics = fixtures::example2_dynamics();

    let detect = build_detect_instance(&dynamics, &model).expect("r_max >= 1");
    println!("detect instance ({} targets):", detect.target_count());
    for target in detect.targets() {
        println!("  {} -> must hit {:?}", target.origin, target.nodes);
    }
    let greedy = greedy_hitting_set(&detect).expect("feasible instance");
    let exact = exact_hitting_set(&detect, DEFAULT_EXACT_LIMIT).expect("small ground set");
    println!(
        "  greedy {:?} (guarantee <= {:.2}x optimum), exact optimum {:?}",
        greedy.sensors, greedy.bound, exact.sensors
    );

    let set = fixtures::example2_failure_set();
    let isolate = build_isolate_instance(&dynamics, &model, &set).expect("feasible pairs");
    println!("\nisolate instance ({} targets):", isolate.target_count());
    for target in isolate.targets() {
        println!("  {} -> must hit {:?}", target.origin, target.nodes);
    }
    let greedy = greedy_hitting_set(&isolate).expect("feasible instance");
    let exact = exact_hitting_set(&isolate, DEFAULT_EXACT_LIMIT).expect("small ground set");
    println!(
        "  greedy {:?}, exact optimum {:?} -> the greedy answer is optimal here",
        greedy.sensors, exact.sensors
    );

    let grid = fixtures::ieee9_model();
    let swing = fixtures::ieee9_dynamics();
    let buses = fixtures::ieee9_failure_set();
    let instance = build_isolate_instance(&swing, &grid, &buses).expect("feasible pairs");
    let greedy = greedy_hitting_set(&instance).expect("feasible instance");
    println!(
        "\nIEEE 9-bus, all {} single-bus failures: one sensor at bus {} isolates everything",
        buses.len(),
        greedy.sensors[0]
    );
}
