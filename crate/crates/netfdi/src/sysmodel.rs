//! Subsystem dynamics and Kronecker assembly of the lumped system.
//!
//! The adjacency matrix follows the transposed convention: entry `(i, j)` of
//! `W` (1-based) carries the weight of the edge from node `j` to node `i`.
//! The lumped pair is `Phi = I_N (x) A + W (x) H` and `Q = S (x) C`, where
//! `H = B * Gamma` and `S` selects the measured subsystems.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::netgraph::{Edge, FailureScenario, NetworkModel, WeightSpec};

/// Identical dynamics `(A, B, Gamma, C)` of every subsystem, with the derived
/// coupling matrix `H = B * Gamma`.
#[derive(Debug, Clone)]
pub struct SubsystemDynamics {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    gamma: DMatrix<f64>,
    c: DMatrix<f64>,
    h: DMatrix<f64>,
}

impl SubsystemDynamics {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        gamma: DMatrix<f64>,
        c: DMatrix<f64>,
    ) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "A must be square and non-empty, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let m = b.ncols();
        if b.nrows() != n || m == 0 {
            return Err(Error::DimensionMismatch(format!(
                "B must be {n}x(m>=1), got {}x{}",
                b.nrows(),
                b.ncols()
            )));
        }
        if gamma.nrows() != m || gamma.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Gamma must be {m}x{n}, got {}x{}",
                gamma.nrows(),
                gamma.ncols()
            )));
        }
        if c.ncols() != n || c.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "C must be (p>=1)x{n}, got {}x{}",
                c.nrows(),
                c.ncols()
            )));
        }
        let h = &b * &gamma;
        Ok(Self { a, b, gamma, c, h })
    }

    /// Build directly from `(A, H, C)` when the factorization of the coupling
    /// matrix is immaterial (`B = H`, `Gamma = I`).
    pub fn from_ahc(a: DMatrix<f64>, h: DMatrix<f64>, c: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        let gamma = DMatrix::identity(n, n);
        Self::new(a, h, gamma, c)
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }
    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }
    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }
    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }
    /// State dimension of one subsystem.
    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }
    /// Output dimension of one subsystem.
    pub fn output_dim(&self) -> usize {
        self.c.nrows()
    }
}

/// How a nonzero entry of a realized adjacency matrix came to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    SampledFree,
    FixedFromPattern,
}

/// A concrete numeric adjacency matrix respecting the model's edge pattern.
#[derive(Debug, Clone)]
pub struct WeightRealization {
    w: DMatrix<f64>,
    provenance: BTreeMap<Edge, Provenance>,
}

impl WeightRealization {
    /// Wrap an adjacency matrix. `provenance` maps each edge carrying a
    /// nonzero entry to its origin; entries off the recorded edges must be
    /// zero.
    pub fn new(w: DMatrix<f64>, provenance: BTreeMap<Edge, Provenance>) -> Result<Self> {
        if w.nrows() != w.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "W must be square, got {}x{}",
                w.nrows(),
                w.ncols()
            )));
        }
        let n = w.nrows();
        for i in 0..n {
            for j in 0..n {
                let nonzero = w[(i, j)] != 0.0;
                let has_edge = provenance.contains_key(&(j + 1, i + 1));
                if nonzero && !has_edge {
                    return Err(Error::UnknownEdge(j + 1, i + 1));
                }
            }
        }
        Ok(Self { w, provenance })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn node_count(&self) -> usize {
        self.w.nrows()
    }

    pub fn provenance(&self) -> &BTreeMap<Edge, Provenance> {
        &self.provenance
    }

    /// Weight of edge `(from, to)` under the transposed layout.
    pub fn edge_weight(&self, edge: Edge) -> f64 {
        self.w[(edge.1 - 1, edge.0 - 1)]
    }

    /// Copy with the failed edges' weights zeroed (the post-failure adjacency).
    pub fn zero_edges(&self, failure: &FailureScenario) -> WeightRealization {
        let mut w = self.w.clone();
        let mut provenance = self.provenance.clone();
        for &(from, to) in failure.removed_edges() {
            w[(to - 1, from - 1)] = 0.0;
            provenance.remove(&(from, to));
        }
        WeightRealization { w, provenance }
    }
}

/// Numerically realized lumped pair `(Phi, Q)` with its generating dimensions.
#[derive(Debug, Clone)]
pub struct LumpedRealization {
    pub phi: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub dims: LumpedDims,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LumpedDims {
    pub node_count: usize,
    pub state_dim: usize,
    pub input_dim: usize,
    pub output_dim: usize,
    pub sensor_count: usize,
}

/// Assemble `Phi = I_N (x) A + W (x) H` and the sensor-selected output map
/// `Q`. Sensor block rows are stacked in ascending node order.
pub fn assemble_lumped(
    dynamics: &SubsystemDynamics,
    weights: &WeightRealization,
    sensors: &BTreeSet<usize>,
) -> Result<LumpedRealization> {
    if sensors.is_empty() {
        return Err(Error::EmptySensors);
    }
    let big_n = weights.node_count();
    for &s in sensors {
        if s == 0 || s > big_n {
            return Err(Error::NodeOutOfRange(s, big_n));
        }
    }
    let n = dynamics.state_dim();
    let p = dynamics.output_dim();
    let phi = DMatrix::identity(big_n, big_n).kronecker(dynamics.a())
        + weights.matrix().kronecker(dynamics.h());
    // Q = S (x) C assembled row-block by row-block; S is never materialized.
    let mut q = DMatrix::zeros(sensors.len() * p, big_n * n);
    for (row_block, &s) in sensors.iter().enumerate() {
        q.view_mut((row_block * p, (s - 1) * n), (p, n))
            .copy_from(dynamics.c());
    }
    Ok(LumpedRealization {
        phi,
        q,
        dims: LumpedDims {
            node_count: big_n,
            state_dim: n,
            input_dim: dynamics.b().ncols(),
            output_dim: p,
            sensor_count: sensors.len(),
        },
    })
}

/// Perturbation `(W_i - W_j) (x) H` between two realizations of the same
/// nominal pattern.
pub fn delta_phi(
    w_i: &WeightRealization,
    w_j: &WeightRealization,
    dynamics: &SubsystemDynamics,
) -> Result<DMatrix<f64>> {
    if w_i.node_count() != w_j.node_count() {
        return Err(Error::DimensionMismatch(format!(
            "realizations have {} and {} nodes",
            w_i.node_count(),
            w_j.node_count()
        )));
    }
    let dw = w_i.matrix() - w_j.matrix();
    Ok(dw.kronecker(dynamics.h()))
}

/// Realize the model's weight pattern: fixed edges keep their values, free
/// edges draw independently from the uniform distribution on
/// `[-2, -0.1] U [0.1, 2]`. Deterministic for a given seed.
pub fn sample_weights(model: &NetworkModel, seed: u64) -> WeightRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let big_n = model.node_count();
    let mut w = DMatrix::zeros(big_n, big_n);
    let mut provenance = BTreeMap::new();
    // BTreeMap order makes the edge -> draw assignment reproducible.
    for (&(from, to), spec) in model.weight_pattern() {
        let (value, origin) = match spec {
            WeightSpec::Fixed(v) => (*v, Provenance::FixedFromPattern),
            WeightSpec::Free => {
                let magnitude = rng.gen_range(0.1..=2.0);
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                (sign * magnitude, Provenance::SampledFree)
            }
        };
        w[(to - 1, from - 1)] = value;
        provenance.insert((from, to), origin);
    }
    WeightRealization { w, provenance }
}
