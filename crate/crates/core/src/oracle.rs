//! Brute-force reference solutions: classical fourth-order Runge–Kutta on
//! the coupled-mode equations of a truncated lattice.
//!
//! The infinite models are cut to a finite window whose edges stay outside
//! the light cone `|j - n0| <= (2 g1 + 4 g2) z` by [`LIGHT_CONE_MARGIN`]
//! sites, so the artificial boundary never receives appreciable intensity.

use num_complex::Complex64;
use thiserror::Error;

use crate::propagators::{
    CouplingConfig, Excitation, FieldSnapshot, NeighborOrder, PropagatorError, Topology,
};

/// Sites kept beyond the light cone when sizing a lattice.
pub const LIGHT_CONE_MARGIN: usize = 40;

pub const DEFAULT_DZ: f64 = 1e-3;

/// Largest tolerated `|‖E(z)‖² - ‖E(0)‖²|`, relative to `max(1, ‖E(0)‖²)`,
/// before a run is aborted.
pub const MAX_NORM_DRIFT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid integration request: {0}")]
    InvalidStep(String),
    #[error("norm drift {drift:e} at z = {z} exceeds the limit; reduce dz")]
    StepTooLarge { z: f64, drift: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
}

/// Finite window of guides with its complex amplitudes.
///
/// A semi-infinite lattice always starts at the physical edge `j = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedLattice {
    config: CouplingConfig,
    j_min: i64,
    state: Vec<Complex64>,
}

impl TruncatedLattice {
    pub fn new(
        config: CouplingConfig,
        j_min: i64,
        state: Vec<Complex64>,
    ) -> Result<Self, OracleError> {
        if state.is_empty() {
            return Err(OracleError::InvalidLattice("lattice has no sites".into()));
        }
        if config.topology() == Topology::SemiInfinite && j_min != 0 {
            return Err(OracleError::InvalidLattice(format!(
                "semi-infinite lattice must start at j = 0, got {j_min}"
            )));
        }
        if state.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(OracleError::InvalidLattice("state is not finite".into()));
        }
        Ok(Self {
            config,
            j_min,
            state,
        })
    }

    /// Lattice over `j_min..=j_max` holding the amplitudes of `exc`.
    pub fn seeded(
        config: CouplingConfig,
        exc: &Excitation,
        (j_min, j_max): (i64, i64),
    ) -> Result<Self, OracleError> {
        if j_min > j_max {
            return Err(OracleError::InvalidLattice(format!(
                "empty window [{j_min}, {j_max}]"
            )));
        }
        exc.validate(config.topology())?;
        let mut state = vec![Complex64::new(0.0, 0.0); (j_max - j_min + 1) as usize];
        for (site, amp) in exc.sources()? {
            if site < j_min || site > j_max {
                if amp.norm() == 0.0 {
                    continue;
                }
                return Err(OracleError::InvalidLattice(format!(
                    "excited site {site} outside [{j_min}, {j_max}]"
                )));
            }
            state[(site - j_min) as usize] += amp;
        }
        Self::new(config, j_min, state)
    }

    /// Lattice seeded with `exc` and wide enough for propagation up to
    /// `z_max`: `[-N, N]` with `N = max|n0| + ceil((2 g1 + 4 g2) z_max) + 40`
    /// for infinite arrays, `[0, max n0 + ceil(..) + 40]` otherwise.
    pub fn for_excitation(
        config: CouplingConfig,
        exc: &Excitation,
        z_max: f64,
    ) -> Result<Self, OracleError> {
        if !(z_max >= 0.0) || !z_max.is_finite() {
            return Err(OracleError::InvalidStep(format!(
                "z_max must be >= 0, got {z_max}"
            )));
        }
        exc.validate(config.topology())?;
        let margin = light_cone_margin(&config, z_max) as i64;
        let sources = exc.sources()?;
        let window = match config.topology() {
            Topology::Infinite => {
                let far = sources.iter().map(|(s, _)| s.abs()).max().unwrap_or(0);
                (-(far + margin), far + margin)
            }
            Topology::SemiInfinite => {
                let top = sources.iter().map(|(s, _)| *s).max().unwrap_or(0);
                (0, top + margin)
            }
        };
        Self::seeded(config, exc, window)
    }

    pub fn config(&self) -> &CouplingConfig {
        &self.config
    }

    pub fn j_min(&self) -> i64 {
        self.j_min
    }

    pub fn j_max(&self) -> i64 {
        self.j_min + self.state.len() as i64 - 1
    }

    pub fn state(&self) -> &[Complex64] {
        &self.state
    }

    pub fn norm(&self) -> f64 {
        self.state.iter().map(|a| a.norm_sqr()).sum()
    }

    fn snapshot(&self, z: f64, initial_norm: f64) -> FieldSnapshot {
        FieldSnapshot {
            z,
            j_min: self.j_min,
            j_max: self.j_max(),
            amplitudes: self.state.clone(),
            initial_norm,
        }
    }
}

/// `ceil((2 g1 + 4 g2) z_max) + 40`.
pub fn light_cone_margin(config: &CouplingConfig, z_max: f64) -> usize {
    (config.max_speed() * z_max).ceil() as usize + LIGHT_CONE_MARGIN
}

/// `dE/dz = -i H E` with the stencil of the lattice model. Sites outside the
/// window count as dark; the semi-infinite next-nearest-neighbor model adds
/// the on-site term `-g2 E_0` to the edge row.
pub fn rhs(lattice: &TruncatedLattice) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); lattice.state.len()];
    apply_rhs(&lattice.config, &lattice.state, &mut out);
    out
}

fn apply_rhs(config: &CouplingConfig, e: &[Complex64], out: &mut [Complex64]) {
    let n = e.len();
    let g1 = config.g1();
    let g2 = config.g2();
    let second = config.order() == NeighborOrder::Second;
    for idx in 0..n {
        let mut h = Complex64::new(0.0, 0.0);
        if idx >= 1 {
            h += g1 * e[idx - 1];
        }
        if idx + 1 < n {
            h += g1 * e[idx + 1];
        }
        if second {
            if idx >= 2 {
                h += g2 * e[idx - 2];
            }
            if idx + 2 < n {
                h += g2 * e[idx + 2];
            }
        }
        out[idx] = Complex64::new(h.im, -h.re);
    }
    if second && config.topology() == Topology::SemiInfinite {
        out[0] += Complex64::new(-g2 * e[0].im, g2 * e[0].re);
    }
}

/// Snapshots emitted by [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Integration {
    pub snapshots: Vec<FieldSnapshot>,
    /// Number of RK4 steps taken.
    pub steps: usize,
    /// Largest `|E|` seen on an artificial edge of the window over the run.
    pub max_edge_amplitude: f64,
}

/// Fixed-step RK4 from `z = 0`, emitting a snapshot at each requested
/// distance. Each interval between samples is split into the fewest equal
/// steps no longer than `dz`.
pub fn integrate(
    lattice: &TruncatedLattice,
    z_samples: &[f64],
    dz: f64,
) -> Result<Integration, OracleError> {
    if !(dz > 0.0) || !dz.is_finite() {
        return Err(OracleError::InvalidStep(format!(
            "dz must be positive, got {dz}"
        )));
    }
    if z_samples.iter().any(|z| !z.is_finite() || *z < 0.0) {
        return Err(OracleError::InvalidStep(
            "sample distances must be finite and >= 0".into(),
        ));
    }
    if z_samples.windows(2).any(|w| w[1] < w[0]) {
        return Err(OracleError::InvalidStep(
            "sample distances must be non-decreasing".into(),
        ));
    }

    let config = lattice.config;
    let n = lattice.state.len();
    let initial_norm = lattice.norm();
    let drift_limit = MAX_NORM_DRIFT * initial_norm.max(1.0);
    let mut state = lattice.state.clone();
    let zero = Complex64::new(0.0, 0.0);
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut stage = vec![zero; n];

    let edge = |s: &[Complex64]| match config.topology() {
        Topology::Infinite => s[0].norm().max(s[n - 1].norm()),
        Topology::SemiInfinite => s[n - 1].norm(),
    };

    let mut z = 0.0;
    let mut steps = 0;
    let mut max_edge = edge(&state);
    let mut snapshots = Vec::with_capacity(z_samples.len());
    for &target in z_samples {
        let span = target - z;
        if span > 0.0 {
            let count = ((span / dz) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            let h = span / count as f64;
            for i in 0..count {
                apply_rhs(&config, &state, &mut k1);
                stage
                    .iter_mut()
                    .zip(&state)
                    .zip(&k1)
                    .for_each(|((s, y), k)| *s = y + k * (0.5 * h));
                apply_rhs(&config, &stage, &mut k2);
                stage
                    .iter_mut()
                    .zip(&state)
                    .zip(&k2)
                    .for_each(|((s, y), k)| *s = y + k * (0.5 * h));
                apply_rhs(&config, &stage, &mut k3);
                stage
                    .iter_mut()
                    .zip(&state)
                    .zip(&k3)
                    .for_each(|((s, y), k)| *s = y + k * h);
                apply_rhs(&config, &stage, &mut k4);
                for idx in 0..n {
                    state[idx] += (k1[idx] + 2.0 * (k2[idx] + k3[idx]) + k4[idx]) * (h / 6.0);
                }
                steps += 1;
                let norm: f64 = state.iter().map(|a| a.norm_sqr()).sum();
                let drift = (norm - initial_norm).abs();
                if !(drift <= drift_limit) {
                    return Err(OracleError::StepTooLarge {
                        z: z + (i + 1) as f64 * h,
                        drift,
                    });
                }
                max_edge = max_edge.max(edge(&state));
            }
            z = target;
        }
        snapshots.push(FieldSnapshot {
            z: target,
            ..lattice_view(lattice, &state, initial_norm)
        });
    }
    Ok(Integration {
        snapshots,
        steps,
        max_edge_amplitude: max_edge,
    })
}

fn lattice_view(
    lattice: &TruncatedLattice,
    state: &[Complex64],
    initial_norm: f64,
) -> FieldSnapshot {
    let mut s = lattice.snapshot(0.0, initial_norm);
    s.amplitudes.copy_from_slice(state);
    s
}

/// Pointwise comparison of closed-form snapshots against an oracle run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationReport {
    /// Largest `|E_closed - E_oracle|` over all sampled sites and distances.
    pub max_abs_error: f64,
    pub at_site: i64,
    pub at_z: f64,
    /// `|‖E(z_end)‖² - ‖E(0)‖²|` of the oracle run.
    pub norm_drift: f64,
    pub steps: usize,
}

/// Compares closed-form snapshots with oracle snapshots at the same
/// distances. Each oracle window must cover the matching closed-form window;
/// the comparison runs over the closed-form window.
pub fn compare(
    closed: &[FieldSnapshot],
    oracle: &Integration,
) -> Result<IntegrationReport, OracleError> {
    if closed.is_empty() {
        return Err(OracleError::ShapeMismatch("no snapshots to compare".into()));
    }
    if closed.len() != oracle.snapshots.len() {
        return Err(OracleError::ShapeMismatch(format!(
            "{} closed-form snapshots vs {} oracle snapshots",
            closed.len(),
            oracle.snapshots.len()
        )));
    }
    let mut report = IntegrationReport {
        max_abs_error: 0.0,
        at_site: closed[0].j_min,
        at_z: closed[0].z,
        norm_drift: 0.0,
        steps: oracle.steps,
    };
    for (c, o) in closed.iter().zip(&oracle.snapshots) {
        if (c.z - o.z).abs() > 1e-12 * c.z.abs().max(1.0) {
            return Err(OracleError::ShapeMismatch(format!(
                "z = {} vs z = {}",
                c.z, o.z
            )));
        }
        if c.j_min < o.j_min
            || c.j_max > o.j_max
            || c.amplitudes.len() as i64 != c.j_max - c.j_min + 1
        {
            return Err(OracleError::ShapeMismatch(format!(
                "window [{}, {}] not covered by oracle window [{}, {}]",
                c.j_min, c.j_max, o.j_min, o.j_max
            )));
        }
        for (j, a) in c.sites().zip(&c.amplitudes) {
            let b = o.amplitude(j).ok_or_else(|| {
                OracleError::ShapeMismatch(format!("oracle has no amplitude at j = {j}"))
            })?;
            let d = (a - b).norm();
            if d > report.max_abs_error {
                report.max_abs_error = d;
                report.at_site = j;
                report.at_z = c.z;
            }
        }
    }
    let last = oracle.snapshots.last().expect("non-empty");
    report.norm_drift = (last.norm() - last.initial_norm).abs();
    Ok(report)
}
