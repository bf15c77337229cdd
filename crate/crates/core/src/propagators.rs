//! Closed-form field amplitudes `E_j(z)` for the four lattice models.
//!
//! With `x = -2 g1 z` and `y = -2 g2 z`, a single guide `n0` excited at
//! `z = 0` propagates as
//!
//! | topology      | nearest neighbor                            | next-nearest neighbor                                        |
//! |---------------|---------------------------------------------|--------------------------------------------------------------|
//! | infinite      | `i^{j-n0} J_{j-n0}(x)`                      | `i^{j-n0} J_{j-n0}(x, y; -i)`                                |
//! | semi-infinite | `i^{j-n0} J_{j-n0}(x) + i^{j+n0} J_{j+n0+2}(x)` | `i^{j-n0} J_{j-n0}(x, y; -i) + i^{j+n0} J_{j+n0+2}(x, y; -i)` |
//!
//! The second term in the semi-infinite forms is a mirror source at
//! `-(n0 + 2)` that keeps the virtual guide `j = -1` dark. General initial
//! conditions are linear superpositions of these responses.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::phase::i_pow;
use crate::special_functions::{
    bessel_j, bessel_row, gbessel_j, signed_lookup, GBesselParams, GBesselRow,
    SpecialFunctionError, MAX_ORDER, MIN_TOL,
};

/// Tolerance used for every generalized Bessel sum inside the propagators.
pub const FUNCTION_TOL: f64 = MIN_TOL;

/// Tail tolerance of the coherent-state series used by [`snapshot`].
pub const COHERENT_TOL: f64 = 1e-12;

/// Largest coherent amplitude `|α|` accepted.
pub const MAX_COHERENT_ALPHA: f64 = 20.0;

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagatorError {
    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),
    #[error("site index {0} is negative in a semi-infinite array")]
    NegativeSite(i64),
    #[error("non-finite {name} = {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("invalid excitation: {0}")]
    InvalidExcitation(String),
    #[error("invalid site window [{j_min}, {j_max}]")]
    InvalidWindow { j_min: i64, j_max: i64 },
    #[error("invalid z grid: {0}")]
    InvalidGrid(String),
    #[error("coherent series tail exceeds {tol:e} after {terms} terms")]
    NoConvergence { tol: f64, terms: usize },
    #[error(transparent)]
    Special(#[from] SpecialFunctionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    Infinite,
    SemiInfinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeighborOrder {
    First,
    Second,
}

/// Coupling constants and lattice model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConfig {
    g1: f64,
    g2: f64,
    topology: Topology,
    order: NeighborOrder,
}

impl CouplingConfig {
    /// Requires `g1 > 0` and `g2 >= 0`; a nearest-neighbor model must have
    /// `g2 == 0`.
    pub fn new(
        topology: Topology,
        order: NeighborOrder,
        g1: f64,
        g2: f64,
    ) -> Result<Self, PropagatorError> {
        check_couplings(g1, g2)?;
        if order == NeighborOrder::First && g2 != 0.0 {
            return Err(PropagatorError::InvalidCoupling(format!(
                "nearest-neighbor model requires g2 = 0, got {g2}"
            )));
        }
        Ok(Self {
            g1,
            g2,
            topology,
            order,
        })
    }

    pub fn first_neighbor(topology: Topology, g1: f64) -> Result<Self, PropagatorError> {
        Self::new(topology, NeighborOrder::First, g1, 0.0)
    }

    pub fn second_neighbor(topology: Topology, g1: f64, g2: f64) -> Result<Self, PropagatorError> {
        Self::new(topology, NeighborOrder::Second, g1, g2)
    }

    pub fn g1(&self) -> f64 {
        self.g1
    }

    pub fn g2(&self) -> f64 {
        self.g2
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn order(&self) -> NeighborOrder {
        self.order
    }

    /// Upper bound `2 g1 + 4 g2` on the group velocity of the dispersion
    /// relation `2 g1 cos θ + 2 g2 cos 2θ`.
    pub fn max_speed(&self) -> f64 {
        2.0 * self.g1 + 4.0 * self.g2
    }
}

fn check_couplings(g1: f64, g2: f64) -> Result<(), PropagatorError> {
    check_finite("g1", g1)?;
    check_finite("g2", g2)?;
    if g1 <= 0.0 {
        return Err(PropagatorError::InvalidCoupling(format!(
            "g1 must be positive, got {g1}"
        )));
    }
    if g2 < 0.0 {
        return Err(PropagatorError::InvalidCoupling(format!(
            "g2 must be non-negative, got {g2}"
        )));
    }
    Ok(())
}

fn check_finite(name: &'static str, value: f64) -> Result<(), PropagatorError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(PropagatorError::NonFinite { name, value })
    }
}

fn check_site(j: i64) -> Result<(), PropagatorError> {
    if j < 0 {
        Err(PropagatorError::NegativeSite(j))
    } else {
        Ok(())
    }
}

/// Initial condition at `z = 0`.
///
/// Superpositions are taken as given, without renormalization.
#[derive(Debug, Clone, PartialEq)]
pub enum Excitation {
    SingleSite(i64),
    MultiSite(Vec<(i64, Complex64)>),
    /// Sum of coherent states `e^{-|α|²/2} Σ_l α^l/√l! |l⟩`, one per entry.
    /// Only meaningful on a semi-infinite array, whose sites play the role of
    /// Fock states.
    Coherent(Vec<Complex64>),
}

impl Excitation {
    pub fn validate(&self, topology: Topology) -> Result<(), PropagatorError> {
        match self {
            Excitation::SingleSite(n0) => {
                if topology == Topology::SemiInfinite {
                    check_site(*n0)?;
                }
            }
            Excitation::MultiSite(sources) => {
                for (site, amp) in sources {
                    if topology == Topology::SemiInfinite {
                        check_site(*site)?;
                    }
                    check_finite("amplitude", amp.re)?;
                    check_finite("amplitude", amp.im)?;
                }
            }
            Excitation::Coherent(alphas) => {
                if topology != Topology::SemiInfinite {
                    return Err(PropagatorError::InvalidExcitation(
                        "coherent states need a semi-infinite array".into(),
                    ));
                }
                for alpha in alphas {
                    check_alpha(*alpha)?;
                }
            }
        }
        Ok(())
    }

    /// Total norm `Σ_j |E_j(0)|²` of the initial condition.
    pub fn initial_norm(&self) -> f64 {
        match self {
            Excitation::SingleSite(_) => 1.0,
            Excitation::MultiSite(sources) => merge_sources(sources.iter().copied())
                .values()
                .map(|a| a.norm_sqr())
                .sum(),
            Excitation::Coherent(alphas) => {
                // Σ_{a,b} ⟨α_a|α_b⟩ with ⟨α|β⟩ = exp(-|α|²/2 - |β|²/2 + α* β).
                let mut total = Complex64::new(0.0, 0.0);
                for a in alphas {
                    for b in alphas {
                        let exponent = -0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a.conj() * b;
                        total += exponent.exp();
                    }
                }
                total.re
            }
        }
    }

    /// Site-amplitude pairs whose closed-form responses are superposed.
    /// Coherent states are expanded up to [`coherent_cutoff`].
    pub fn sources(&self) -> Result<Vec<(i64, Complex64)>, PropagatorError> {
        self.sources_with_tol(COHERENT_TOL)
    }

    fn sources_with_tol(&self, tol: f64) -> Result<Vec<(i64, Complex64)>, PropagatorError> {
        match self {
            Excitation::SingleSite(n0) => Ok(vec![(*n0, Complex64::new(1.0, 0.0))]),
            Excitation::MultiSite(sources) => {
                Ok(merge_sources(sources.iter().copied()).into_iter().collect())
            }
            Excitation::Coherent(alphas) => {
                let mut merged: Vec<Complex64> = Vec::new();
                for alpha in alphas {
                    let amps = coherent_amplitudes(*alpha, tol)?;
                    if amps.len() > merged.len() {
                        merged.resize(amps.len(), Complex64::new(0.0, 0.0));
                    }
                    merged.iter_mut().zip(&amps).for_each(|(m, a)| *m += a);
                }
                Ok(merged
                    .into_iter()
                    .enumerate()
                    .map(|(l, a)| (l as i64, a))
                    .collect())
            }
        }
    }
}

fn merge_sources(sources: impl Iterator<Item = (i64, Complex64)>) -> BTreeMap<i64, Complex64> {
    let mut merged = BTreeMap::new();
    for (site, amp) in sources {
        *merged.entry(site).or_insert(Complex64::new(0.0, 0.0)) += amp;
    }
    merged
}

fn check_alpha(alpha: Complex64) -> Result<(), PropagatorError> {
    check_finite("alpha", alpha.re)?;
    check_finite("alpha", alpha.im)?;
    if alpha.norm() > MAX_COHERENT_ALPHA {
        return Err(PropagatorError::InvalidExcitation(format!(
            "|alpha| = {} exceeds {MAX_COHERENT_ALPHA}",
            alpha.norm()
        )));
    }
    Ok(())
}

/// Cutoff `ceil(|α|² + 12|α| + 30)` of the coherent-state series.
pub fn coherent_cutoff(alpha: Complex64) -> usize {
    let a = alpha.norm();
    (a * a + 12.0 * a + 30.0).ceil() as usize
}

/// Fock amplitudes `e^{-|α|²/2} α^l / √l!` for `l = 0..=cutoff`.
///
/// Fails if the bound on the discarded Poisson tail exceeds `tol`.
pub fn coherent_amplitudes(alpha: Complex64, tol: f64) -> Result<Vec<Complex64>, PropagatorError> {
    check_alpha(alpha)?;
    let cutoff = coherent_cutoff(alpha);
    let mut amps = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    amps.push(c);
    for l in 1..=cutoff {
        c = c * alpha / (l as f64).sqrt();
        amps.push(c);
    }
    // Successive magnitudes shrink by at least `ratio` past the cutoff.
    let ratio = alpha.norm() / ((cutoff + 1) as f64).sqrt();
    let tail = amps[cutoff].norm() * ratio / (1.0 - ratio);
    if !(tail <= tol) {
        return Err(PropagatorError::NoConvergence {
            tol,
            terms: cutoff + 1,
        });
    }
    Ok(amps)
}

/// `E_j(z) = i^{j-n0} J_{j-n0}(-2 g1 z)`.
pub fn field_infinite_first(
    n0: i64,
    j: i64,
    z: f64,
    g1: f64,
) -> Result<Complex64, PropagatorError> {
    check_couplings(g1, 0.0)?;
    check_finite("z", z)?;
    let m = offset(j, n0)?;
    Ok(i_pow(m) * bessel_j(m, -2.0 * g1 * z)?)
}

/// `E_j(z) = i^{j-n0} J_{j-n0}(-2 g1 z) + i^{j+n0} J_{j+n0+2}(-2 g1 z)`.
pub fn field_semi_first(n0: i64, j: i64, z: f64, g1: f64) -> Result<Complex64, PropagatorError> {
    check_site(n0)?;
    check_site(j)?;
    check_couplings(g1, 0.0)?;
    check_finite("z", z)?;
    let x = -2.0 * g1 * z;
    let direct = j - n0;
    let image = mirror(j, n0)?;
    Ok(i_pow(direct) * bessel_j(direct, x)? + i_pow(j + n0) * bessel_j(image, x)?)
}

/// `E_j(z) = i^{j-n0} J_{j-n0}(-2 g1 z, -2 g2 z; -i)`.
pub fn field_infinite_second(
    n0: i64,
    j: i64,
    z: f64,
    g1: f64,
    g2: f64,
) -> Result<Complex64, PropagatorError> {
    check_couplings(g1, g2)?;
    check_finite("z", z)?;
    let m = offset(j, n0)?;
    Ok(i_pow(m) * generalized(m, z, g1, g2)?)
}

/// `E_j(z) = i^{j-n0} J_{j-n0}(x, y; -i) + i^{n0+j} J_{n0+j+2}(x, y; -i)` with
/// `x = -2 g1 z`, `y = -2 g2 z`.
pub fn field_semi_second(
    n0: i64,
    j: i64,
    z: f64,
    g1: f64,
    g2: f64,
) -> Result<Complex64, PropagatorError> {
    check_site(n0)?;
    check_site(j)?;
    check_couplings(g1, g2)?;
    check_finite("z", z)?;
    let direct = j - n0;
    let image = mirror(j, n0)?;
    Ok(i_pow(direct) * generalized(direct, z, g1, g2)?
        + i_pow(j + n0) * generalized(image, z, g1, g2)?)
}

/// Field at guide `j` of a semi-infinite next-nearest-neighbor array
/// launched with the coherent state `|α⟩`.
pub fn field_coherent_semi_second(
    alpha: Complex64,
    j: i64,
    z: f64,
    g1: f64,
    g2: f64,
    tol: f64,
) -> Result<Complex64, PropagatorError> {
    check_site(j)?;
    check_couplings(g1, g2)?;
    check_finite("z", z)?;
    if !(tol >= COHERENT_TOL) {
        return Err(PropagatorError::InvalidExcitation(format!(
            "coherent tolerance must be at least {COHERENT_TOL:e}, got {tol:e}"
        )));
    }
    let amps = coherent_amplitudes(alpha, tol)?;
    let config = CouplingConfig::second_neighbor(Topology::SemiInfinite, g1, g2)?;
    let reach = j as usize + amps.len() + 1;
    let kernel = Kernel::new(&config, z, reach)?;
    Ok(amps
        .iter()
        .enumerate()
        .map(|(l, a)| a * kernel.response(Topology::SemiInfinite, l as i64, j))
        .sum())
}

fn generalized(m: i64, z: f64, g1: f64, g2: f64) -> Result<Complex64, PropagatorError> {
    let p = GBesselParams::new(m, -2.0 * g1 * z, -2.0 * g2 * z, MINUS_I)?;
    Ok(gbessel_j(&p, FUNCTION_TOL)?.value)
}

fn offset(j: i64, n0: i64) -> Result<i64, PropagatorError> {
    j.checked_sub(n0).ok_or(PropagatorError::Special(
        SpecialFunctionError::OrderTooLarge {
            order: i64::MAX,
            max: MAX_ORDER,
        },
    ))
}

fn mirror(j: i64, n0: i64) -> Result<i64, PropagatorError> {
    j.checked_add(n0)
        .and_then(|s| s.checked_add(2))
        .ok_or(PropagatorError::Special(
            SpecialFunctionError::OrderTooLarge {
                order: i64::MAX,
                max: MAX_ORDER,
            },
        ))
}

/// Phase-weighted single-source propagator `G(m) = i^m J_m(…)` tabulated for
/// `|m| <= reach` at one propagation distance.
struct Kernel {
    reach: i64,
    values: Vec<Complex64>,
}

impl Kernel {
    fn new(config: &CouplingConfig, z: f64, reach: usize) -> Result<Self, PropagatorError> {
        if reach as u64 > MAX_ORDER {
            return Err(SpecialFunctionError::OrderTooLarge {
                order: reach as i64,
                max: MAX_ORDER,
            }
            .into());
        }
        let r = reach as i64;
        let x = -2.0 * config.g1 * z;
        let values = match config.order {
            NeighborOrder::First => {
                let row = bessel_row(x, reach)?;
                (-r..=r)
                    .map(|m| i_pow(m) * signed_lookup(&row, m))
                    .collect()
            }
            NeighborOrder::Second => {
                let row = GBesselRow::new(x, -2.0 * config.g2 * z, MINUS_I, reach, FUNCTION_TOL)?;
                (-r..=r).map(|m| i_pow(m) * row.get(m)).collect()
            }
        };
        Ok(Self { reach: r, values })
    }

    #[inline]
    fn at(&self, m: i64) -> Complex64 {
        self.values[(m + self.reach) as usize]
    }

    /// Field at `j` from a unit source at `n0`. On the semi-infinite array
    /// `i^{j+n0} J_{j+n0+2} = -G(j+n0+2)`, exactly, because the phase comes
    /// from the 4-cycle.
    #[inline]
    fn response(&self, topology: Topology, n0: i64, j: i64) -> Complex64 {
        match topology {
            Topology::Infinite => self.at(j - n0),
            Topology::SemiInfinite => self.at(j - n0) - self.at(j + n0 + 2),
        }
    }
}

/// Complex amplitudes over the guides `j_min..=j_max` at one distance `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub z: f64,
    pub j_min: i64,
    pub j_max: i64,
    pub amplitudes: Vec<Complex64>,
    /// Norm of the initial condition the field evolved from.
    pub initial_norm: f64,
}

impl FieldSnapshot {
    pub fn sites(&self) -> std::ops::RangeInclusive<i64> {
        self.j_min..=self.j_max
    }

    pub fn amplitude(&self, j: i64) -> Option<Complex64> {
        if j < self.j_min || j > self.j_max {
            return None;
        }
        self.amplitudes.get((j - self.j_min) as usize).copied()
    }

    pub fn intensities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `Σ_j |E_j|²` over the window.
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Copy of the sub-window `j_min..=j_max`, if it lies inside this one.
    pub fn restrict(&self, j_min: i64, j_max: i64) -> Option<FieldSnapshot> {
        if j_min > j_max || j_min < self.j_min || j_max > self.j_max {
            return None;
        }
        let lo = (j_min - self.j_min) as usize;
        let hi = (j_max - self.j_min) as usize;
        Some(FieldSnapshot {
            z: self.z,
            j_min,
            j_max,
            amplitudes: self.amplitudes[lo..=hi].to_vec(),
            initial_norm: self.initial_norm,
        })
    }
}

/// `|E_j(z)|²` over a grid of distances and a fixed window of guides.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityMap {
    pub snapshots: Vec<FieldSnapshot>,
}

impl IntensityMap {
    pub fn z_grid(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.z).collect()
    }

    /// One row of intensities per sampled `z`.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.snapshots
            .iter()
            .map(FieldSnapshot::intensities)
            .collect()
    }

    pub fn intensity(&self, z_index: usize, j: i64) -> Option<f64> {
        self.snapshots
            .get(z_index)?
            .amplitude(j)
            .map(|a| a.norm_sqr())
    }
}

fn check_window(topology: Topology, (j_min, j_max): (i64, i64)) -> Result<(), PropagatorError> {
    if j_min > j_max || (topology == Topology::SemiInfinite && j_min < 0) {
        return Err(PropagatorError::InvalidWindow { j_min, j_max });
    }
    Ok(())
}

/// Excitation resolved into point sources, shared by every `z` of a map.
struct Plan {
    sources: Vec<(i64, Complex64)>,
    reach: usize,
    initial_norm: f64,
}

impl Plan {
    fn new(
        config: &CouplingConfig,
        exc: &Excitation,
        window: (i64, i64),
    ) -> Result<Self, PropagatorError> {
        check_window(config.topology, window)?;
        exc.validate(config.topology)?;
        let sources = exc.sources()?;
        let (j_min, j_max) = (window.0 as i128, window.1 as i128);
        let mut reach: i128 = 0;
        for &(site, _) in &sources {
            let site = site as i128;
            reach = reach.max((j_min - site).abs()).max((j_max - site).abs());
            if config.topology == Topology::SemiInfinite {
                reach = reach.max(j_max + site + 2);
            }
        }
        if reach > MAX_ORDER as i128 {
            return Err(SpecialFunctionError::OrderTooLarge {
                order: i64::MAX,
                max: MAX_ORDER,
            }
            .into());
        }
        Ok(Self {
            sources,
            reach: reach as usize,
            initial_norm: exc.initial_norm(),
        })
    }

    fn evaluate(
        &self,
        config: &CouplingConfig,
        z: f64,
        window: (i64, i64),
    ) -> Result<FieldSnapshot, PropagatorError> {
        check_finite("z", z)?;
        let kernel = Kernel::new(config, z, self.reach)?;
        let amplitudes = (window.0..=window.1)
            .map(|j| {
                self.sources
                    .iter()
                    .map(|&(n0, a)| a * kernel.response(config.topology, n0, j))
                    .sum()
            })
            .collect();
        Ok(FieldSnapshot {
            z,
            j_min: window.0,
            j_max: window.1,
            amplitudes,
            initial_norm: self.initial_norm,
        })
    }
}

/// Field over `window` at distance `z`, superposing the closed-form response
/// of every source in `exc`.
pub fn snapshot(
    config: &CouplingConfig,
    exc: &Excitation,
    z: f64,
    window: (i64, i64),
) -> Result<FieldSnapshot, PropagatorError> {
    Plan::new(config, exc, window)?.evaluate(config, z, window)
}

/// Snapshots for every `z` in a strictly increasing, non-negative grid.
/// Rows are evaluated in parallel and independently, so the result does not
/// depend on the thread count.
pub fn intensity_map(
    config: &CouplingConfig,
    exc: &Excitation,
    z_grid: &[f64],
    window: (i64, i64),
) -> Result<IntensityMap, PropagatorError> {
    if z_grid.is_empty() {
        return Err(PropagatorError::InvalidGrid("z grid is empty".into()));
    }
    for &z in z_grid {
        check_finite("z", z)?;
    }
    if z_grid[0] < 0.0 {
        return Err(PropagatorError::InvalidGrid(
            "z grid must start at z >= 0".into(),
        ));
    }
    if z_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PropagatorError::InvalidGrid(
            "z grid must be strictly increasing".into(),
        ));
    }
    let plan = Plan::new(config, exc, window)?;
    let snapshots = z_grid
        .par_iter()
        .map(|&z| plan.evaluate(config, z, window))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntensityMap { snapshots })
}
