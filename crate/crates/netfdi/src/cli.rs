//! Command implementations behind the `netfdi` binary: each takes a parsed
//! [`NetworkDescription`] and returns a serializable verdict document. The
//! binary is a thin argument-parsing shell around these functions.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebraic::{generic_detectable_mc, generic_isolable_mc, GenericVerdict, DEFAULT_TOL};
use crate::desc::NetworkDescription;
use crate::error::{Error, Result};
use crate::placement::{
    build_detect_instance, build_isolate_instance, exact_hitting_set, greedy_hitting_set,
    PlacementResult, Target,
};
use crate::sim::{detection_time, export_csv, propagate, TimeGrid};
use crate::structural::{
    disjoint_isolability_shortcut, generically_detectable, generically_isolable, transfer_index,
    StructuralDetectability, StructuralIsolability, TransferIndex,
};
use crate::sysmodel::{assemble_lumped, sample_weights};

/// Knobs shared by the analysis commands, with the documented defaults.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnalysisOptions {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            trials: 5,
            seed: 0,
            tol: DEFAULT_TOL,
        }
    }
}

/// Map an error to the process exit code: 4 for an infeasible placement,
/// 2 for any other input or analysis error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InfeasiblePair(_, _) => 4,
        _ => 2,
    }
}

#[derive(Debug, Serialize)]
pub struct RmaxDocument {
    pub command: String,
    pub r_max: TransferIndex,
}

/// Transfer index of the description's subsystem dynamics.
pub fn cmd_rmax(description: &NetworkDescription) -> Result<RmaxDocument> {
    let dynamics = description.subsystem_dynamics()?;
    Ok(RmaxDocument {
        command: "rmax".into(),
        r_max: transfer_index(&dynamics, DEFAULT_TOL)?,
    })
}

#[derive(Debug, Serialize)]
pub struct DetectDocument {
    pub command: String,
    pub failure: String,
    pub structural: StructuralDetectability,
    pub generic: GenericVerdict,
    /// Structural and Monte-Carlo verdicts coincide.
    pub agreement: bool,
    pub options: AnalysisOptions,
}

/// Generic detectability of one named failure: graph verdict, Monte-Carlo
/// algebraic verdict, and their agreement.
pub fn cmd_detect(
    description: &NetworkDescription,
    failure_name: &str,
    options: AnalysisOptions,
) -> Result<DetectDocument> {
    let model = description.model()?;
    let dynamics = description.subsystem_dynamics()?;
    let failure = description.scenario(failure_name)?;
    let structural = generically_detectable(&dynamics, &model, &failure)?;
    let generic = generic_detectable_mc(
        &dynamics,
        &model,
        &failure,
        options.trials,
        options.tol,
        options.seed,
    )?;
    let agreement = structural.detectable == generic.holds();
    Ok(DetectDocument {
        command: "detect".into(),
        failure: failure_name.into(),
        structural,
        generic,
        agreement,
        options,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IsolationRoute {
    /// Full pairwise distance analysis.
    Pairwise,
    /// Edge-disjoint shortcut: per-scenario detectability sufficed.
    DisjointShortcut,
}

#[derive(Debug, Serialize)]
pub struct IsolateDocument {
    pub command: String,
    pub set: Vec<String>,
    pub structural: StructuralIsolability,
    pub route: IsolationRoute,
    pub generic: GenericVerdict,
    pub agreement: bool,
    pub options: AnalysisOptions,
}

/// Generic isolability of a named failure set, including the nominal
/// scenario in every pairing.
pub fn cmd_isolate(
    description: &NetworkDescription,
    set_names: &[String],
    options: AnalysisOptions,
) -> Result<IsolateDocument> {
    let model = description.model()?;
    let dynamics = description.subsystem_dynamics()?;
    let failure_set = description.failure_set(set_names)?;
    let structural = generically_isolable(&dynamics, &model, &failure_set)?;
    let route = match disjoint_isolability_shortcut(&dynamics, &model, &failure_set)? {
        Some(shortcut) => {
            debug_assert_eq!(shortcut.isolable, structural.isolable);
            IsolationRoute::DisjointShortcut
        }
        None => IsolationRoute::Pairwise,
    };
    let generic = generic_isolable_mc(
        &dynamics,
        &model,
        &failure_set,
        options.trials,
        options.tol,
        options.seed,
    )?;
    let agreement = structural.isolable == generic.holds();
    let set = if set_names.is_empty() {
        description.failure_set.clone()
    } else {
        set_names.to_vec()
    };
    Ok(IsolateDocument {
        command: "isolate".into(),
        set,
        structural,
        route,
        generic,
        agreement,
        options,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlacementMode {
    Detect,
    Isolate,
}

#[derive(Debug, Serialize)]
pub struct PlaceDocument {
    pub command: String,
    pub mode: PlacementMode,
    /// The target collection the placement must hit, for auditability.
    pub targets: Vec<Target>,
    pub greedy: PlacementResult,
    /// Present when the ground set fits under the exact-solver limit.
    pub exact: Option<PlacementResult>,
    /// `|greedy| / |exact|` when both are available.
    pub ratio: Option<f64>,
    pub exact_limit: usize,
}

/// Minimum sensor placement for detectability of all single-link failures
/// (`Detect`) or isolability of the description's failure set (`Isolate`).
pub fn cmd_place(
    description: &NetworkDescription,
    mode: PlacementMode,
    set_names: &[String],
    exact_limit: usize,
) -> Result<PlaceDocument> {
    let model = description.model()?;
    let dynamics = description.subsystem_dynamics()?;
    let instance = match mode {
        PlacementMode::Detect => build_detect_instance(&dynamics, &model)?,
        PlacementMode::Isolate => {
            let failure_set = description.failure_set(set_names)?;
            build_isolate_instance(&dynamics, &model, &failure_set)?
        }
    };
    let greedy = greedy_hitting_set(&instance)?;
    let exact = if instance.ground_set().len() <= exact_limit {
        Some(exact_hitting_set(&instance, exact_limit)?)
    } else {
        None
    };
    let ratio = exact.as_ref().map(|e| {
        if e.sensors.is_empty() {
            1.0
        } else {
            greedy.sensors.len() as f64 / e.sensors.len() as f64
        }
    });
    Ok(PlaceDocument {
        command: "place".into(),
        mode,
        targets: instance.targets().to_vec(),
        greedy,
        exact,
        ratio,
        exact_limit,
    })
}

/// Knobs of the simulation command, with the documented defaults.
#[derive(Debug, Clone, Serialize)]
pub struct SimulateOptions {
    pub seed: u64,
    pub horizon: f64,
    pub steps: usize,
    pub noise_std: Option<f64>,
    pub threshold: Option<f64>,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            horizon: 10.0,
            steps: 1000,
            noise_std: None,
            threshold: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SimulateDocument {
    pub command: String,
    pub csv_path: PathBuf,
    pub metadata_path: PathBuf,
    pub scenarios: Vec<String>,
    /// First-detection time per failure when noise and threshold are set;
    /// `None` entries mean the rule never fired.
    pub detection_times: Option<Vec<(String, Option<f64>)>>,
    pub options: SimulateOptions,
}

/// Propagate the nominal system and each named failure from a common random
/// initial state; write the trajectories as CSV plus a JSON metadata
/// companion. With noise and threshold set, also run the detection-time
/// experiment per failure.
pub fn cmd_simulate(
    description: &NetworkDescription,
    failure_names: &[String],
    options: SimulateOptions,
    out: impl AsRef<Path>,
) -> Result<SimulateDocument> {
    let model = description.model()?;
    let dynamics = description.subsystem_dynamics()?;
    let weights = sample_weights(&model, options.seed);
    let grid = TimeGrid::uniform(options.horizon, options.steps)?;

    // the common initial state, unit norm, drawn from a separate stream
    let n_x = model.node_count() * dynamics.state_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ 0x5852_f1f0);
    let x0 = {
        let v = DVector::from_fn(n_x, |_, _| rng.gen_range(-1.0..1.0));
        let norm = v.norm();
        v / norm
    };

    let nominal = assemble_lumped(&dynamics, &weights, model.sensors())?;
    let nominal_traj = propagate(&nominal, &x0, &grid, "nominal")?;
    let mut trajectories = vec![nominal_traj.clone()];
    let mut scenarios = vec!["nominal".to_string()];
    for name in failure_names {
        let failure = description.scenario(name)?;
        model.apply_failure(&failure)?;
        let faulty = assemble_lumped(&dynamics, &weights.zero_edges(&failure), model.sensors())?;
        trajectories.push(propagate(&faulty, &x0, &grid, name.clone())?);
        scenarios.push(name.clone());
    }

    let detection_times = match (options.noise_std, options.threshold) {
        (Some(noise_std), Some(threshold)) => {
            let mut times = Vec::new();
            for traj in &trajectories[1..] {
                let exp = detection_time(&nominal_traj, traj, noise_std, threshold, options.seed)?;
                times.push((traj.label.clone(), exp.first_detection_time));
            }
            Some(times)
        }
        _ => None,
    };

    let csv_path = out.as_ref().to_path_buf();
    export_csv(&trajectories, &csv_path)?;
    let metadata_path = csv_path.with_extension("meta.json");
    let metadata = serde_json::json!({
        "scenarios": scenarios,
        "seed": options.seed,
        "horizon": options.horizon,
        "steps": options.steps,
        "noise_std": options.noise_std,
        "threshold": options.threshold,
        "sensors": model.sensors().iter().collect::<Vec<_>>(),
        "initial_state_norm": 1.0,
    });
    std::fs::write(
        &metadata_path,
        serde_json::to_string_pretty(&metadata).expect("metadata serializes"),
    )
    .map_err(|source| Error::Io {
        path: metadata_path.display().to_string(),
        source,
    })?;

    Ok(SimulateDocument {
        command: "simulate".into(),
        csv_path,
        metadata_path,
        scenarios,
        detection_times,
        options,
    })
}

/// Sensor-set override used by the binary's `--sensors` flag: replaces the
/// description's sensor list before analysis.
pub fn with_sensor_override(
    description: &NetworkDescription,
    sensors: &[usize],
) -> NetworkDescription {
    if sensors.is_empty() {
        return description.clone();
    }
    let mut description = description.clone();
    description.sensors = BTreeSet::from_iter(sensors.iter().copied())
        .into_iter()
        .collect();
    description
}
