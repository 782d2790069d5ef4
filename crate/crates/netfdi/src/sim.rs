//! Time-domain experiments: output trajectories of the lumped system,
//! residuals between nominal and faulty responses, and threshold-based
//! detection under measurement noise.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::sysmodel::LumpedRealization;

/// Strictly increasing sampling instants starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidGrid("grid is empty".into()));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidGrid(format!(
                "grid must start at 0, got {}",
                times[0]
            )));
        }
        for pair in times.windows(2) {
            if !(pair[1] > pair[0]) || !pair[1].is_finite() {
                return Err(Error::InvalidGrid(format!(
                    "instants must be finite and strictly increasing, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(Self { times })
    }

    /// `steps + 1` uniform instants over `[0, horizon]`.
    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || steps == 0 {
            return Err(Error::InvalidGrid(format!(
                "need horizon > 0 and steps > 0, got {horizon} and {steps}"
            )));
        }
        let dt = horizon / steps as f64;
        Self::new((0..=steps).map(|k| k as f64 * dt).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

/// Sampled output response of one scenario.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// One output vector per instant.
    pub outputs: Vec<DVector<f64>>,
    pub label: String,
    pub initial_state: DVector<f64>,
    /// Set when propagation hit non-finite values and the trajectory was cut
    /// short of the requested grid.
    pub truncated: bool,
}

impl Trajectory {
    pub fn output_dim(&self) -> usize {
        self.outputs.first().map_or(0, |y| y.len())
    }
}

/// Integrate `y(t_k) = Q exp(Phi t_k) x_0` over the grid. The step propagator
/// `exp(Phi dt)` is computed once per distinct step length (scaling and
/// squaring) and reused; non-finite states truncate the trajectory.
pub fn propagate(
    lumped: &LumpedRealization,
    x0: &DVector<f64>,
    grid: &TimeGrid,
    label: impl Into<String>,
) -> Result<Trajectory> {
    let n = lumped.phi.nrows();
    if x0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "initial state has dimension {}, lumped system has {n}",
            x0.len()
        )));
    }
    let mut propagators: HashMap<u64, DMatrix<f64>> = HashMap::new();
    let mut state = x0.clone();
    let mut times = Vec::with_capacity(grid.times().len());
    let mut outputs = Vec::with_capacity(grid.times().len());
    let mut truncated = false;
    let mut prev_t = 0.0;
    for (k, &t) in grid.times().iter().enumerate() {
        if k > 0 {
            let dt = t - prev_t;
            let step = propagators
                .entry(dt.to_bits())
                .or_insert_with(|| (lumped.phi.clone() * dt).exp());
            state = &*step * state;
        }
        prev_t = t;
        if !state.iter().all(|v| v.is_finite()) {
            truncated = true;
            break;
        }
        times.push(t);
        outputs.push(&lumped.q * &state);
    }
    Ok(Trajectory {
        times,
        outputs,
        label: label.into(),
        initial_state: x0.clone(),
        truncated,
    })
}

/// Pointwise 2-norm differences between two matched trajectories.
#[derive(Debug, Clone)]
pub struct Residual {
    pub norms: Vec<f64>,
    pub sup_norm: f64,
}

/// `||y_a(t_k) - y_b(t_k)||_2` per instant plus its maximum. The
/// trajectories must share grid and initial state.
pub fn residual(traj_a: &Trajectory, traj_b: &Trajectory) -> Result<Residual> {
    if traj_a.times != traj_b.times || traj_a.initial_state != traj_b.initial_state {
        return Err(Error::TrajectoryMismatch);
    }
    let norms: Vec<f64> = traj_a
        .outputs
        .iter()
        .zip(&traj_b.outputs)
        .map(|(a, b)| (a - b).norm())
        .collect();
    let sup_norm = norms.iter().copied().fold(0.0, f64::max);
    Ok(Residual { norms, sup_norm })
}

/// Outcome of a threshold detection run.
#[derive(Debug, Clone)]
pub struct DetectionExperiment {
    pub noise_std: f64,
    pub threshold: f64,
    /// Earliest grid instant where the noisy deviation exceeds the
    /// threshold; `None` when the rule never fires.
    pub first_detection_time: Option<f64>,
    /// The thresholded deviation norms, one per instant.
    pub deviation_norms: Vec<f64>,
}

/// Add zero-mean Gaussian noise (per channel, per instant) to the faulty
/// outputs, compare against the noiseless nominal reference, and report the
/// first instant where the deviation's 2-norm exceeds `threshold`.
pub fn detection_time(
    nominal: &Trajectory,
    faulty: &Trajectory,
    noise_std: f64,
    threshold: f64,
    seed: u64,
) -> Result<DetectionExperiment> {
    if nominal.times != faulty.times || nominal.initial_state != faulty.initial_state {
        return Err(Error::TrajectoryMismatch);
    }
    if noise_std < 0.0 || !(threshold > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "need noise_std >= 0 and threshold > 0, got {noise_std} and {threshold}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_std.max(f64::MIN_POSITIVE))
        .expect("standard deviation is positive");
    let mut first_detection_time = None;
    let mut deviation_norms = Vec::with_capacity(nominal.times.len());
    for (k, t) in nominal.times.iter().enumerate() {
        let mut measured = faulty.outputs[k].clone();
        if noise_std > 0.0 {
            for v in measured.iter_mut() {
                *v += noise.sample(&mut rng);
            }
        }
        let deviation = (&measured - &nominal.outputs[k]).norm();
        if deviation > threshold && first_detection_time.is_none() {
            first_detection_time = Some(*t);
        }
        deviation_norms.push(deviation);
    }
    Ok(DetectionExperiment {
        noise_std,
        threshold,
        first_detection_time,
        deviation_norms,
    })
}

/// Write trajectories as CSV: a `time` column followed by one column per
/// trajectory per output channel, headed `label:channel` with channels
/// numbered from 1. Rows cover the union grid; trajectories truncated early
/// leave empty cells.
pub fn export_csv(trajectories: &[Trajectory], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    let mut run = || -> std::io::Result<()> {
        write!(out, "time")?;
        for traj in trajectories {
            for ch in 1..=traj.output_dim() {
                write!(out, ",{}:{}", traj.label, ch)?;
            }
        }
        writeln!(out)?;
        let rows = trajectories.iter().map(|t| t.times.len()).max().unwrap_or(0);
        let longest = trajectories.iter().max_by_key(|t| t.times.len());
        for k in 0..rows {
            write!(out, "{:.9}", longest.expect("rows > 0").times[k])?;
            for traj in trajectories {
                for ch in 0..traj.output_dim() {
                    match traj.outputs.get(k) {
                        Some(y) => write!(out, ",{:.9}", y[ch])?,
                        None => write!(out, ",")?,
                    }
                }
            }
            writeln!(out)?;
        }
        out.flush()
    };
    run().map_err(io_err)
}
