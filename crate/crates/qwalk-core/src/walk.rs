//! Exact position-space evolution of the walk.
//!
//! The state is a sparse map from lattice position to a 4-component amplitude
//! vector. One step applies `ψ_{t+1}(x) = P ψ_t(x+1) + R ψ_t(x−1)` sitewise;
//! this is the ground truth every closed-form claim is audited against.

use crate::coin::CoinMatrix;
use crate::linalg::{vadd, vnorm_sqr, Vec4, C64, ZERO_VEC};
use std::collections::BTreeMap;
use thiserror::Error;

/// Tolerance for initial-state normalization.
pub const INIT_NORM_TOL: f64 = 1e-12;

/// Sites whose amplitude vector stays below this magnitude are dropped after
/// each step; the pruned mass is far below every reporting tolerance.
const PRUNE_EPS: f64 = 1e-15;

/// Period detection declares a match when probabilities agree within this.
pub const PERIOD_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum WalkError {
    #[error(
        "initial state is not normalized: |‖ψ‖² − 1| = {defect:.3e} exceeds {INIT_NORM_TOL:.1e}"
    )]
    NotNormalized { defect: f64 },
}

/// Origin-localized initial chirality amplitudes (α, β, γ, μ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    amps: Vec4,
}

impl InitialState {
    pub fn new(amps: Vec4) -> Result<Self, WalkError> {
        let defect = (vnorm_sqr(&amps) - 1.0).abs();
        if defect > INIT_NORM_TOL {
            return Err(WalkError::NotNormalized { defect });
        }
        Ok(InitialState { amps })
    }

    pub fn from_components(alpha: C64, beta: C64, gamma: C64, mu: C64) -> Result<Self, WalkError> {
        Self::new([alpha, beta, gamma, mu])
    }

    /// Basis state on a single chirality.
    pub fn basis(chirality: usize) -> Self {
        let mut amps = ZERO_VEC;
        amps[chirality] = C64::new(1.0, 0.0);
        InitialState { amps }
    }

    pub fn amplitudes(&self) -> &Vec4 {
        &self.amps
    }

    pub fn alpha(&self) -> C64 {
        self.amps[0]
    }

    pub fn beta(&self) -> C64 {
        self.amps[1]
    }

    pub fn gamma(&self) -> C64 {
        self.amps[2]
    }

    pub fn mu(&self) -> C64 {
        self.amps[3]
    }
}

/// Sparse walker state: position ↦ chirality amplitudes, plus the time.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    amplitudes: BTreeMap<i64, Vec4>,
    time: u64,
}

impl WalkState {
    /// The t = 0 state with `ψ₀(0) = (α, β, γ, μ)`.
    pub fn from_initial(init: &InitialState) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(0, *init.amplitudes());
        WalkState {
            amplitudes,
            time: 0,
        }
    }

    pub(crate) fn from_map(amplitudes: BTreeMap<i64, Vec4>, time: u64) -> Self {
        WalkState { amplitudes, time }
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    /// Amplitude vector at `x` (zero vector off the support).
    pub fn amplitude(&self, x: i64) -> Vec4 {
        self.amplitudes.get(&x).copied().unwrap_or(ZERO_VEC)
    }

    /// Positions carrying amplitude, ascending.
    pub fn support(&self) -> impl Iterator<Item = (i64, &Vec4)> {
        self.amplitudes.iter().map(|(&x, v)| (x, v))
    }

    pub fn support_bounds(&self) -> Option<(i64, i64)> {
        let min = self.amplitudes.keys().next().copied()?;
        let max = self.amplitudes.keys().next_back().copied()?;
        Some((min, max))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(vnorm_sqr).sum()
    }

    /// One time step: `ψ_{t+1}(x) = P ψ_t(x+1) + R ψ_t(x−1)`.
    pub fn step(&self, coin: &CoinMatrix) -> WalkState {
        let mut next: BTreeMap<i64, Vec4> = BTreeMap::new();
        for (&x, v) in &self.amplitudes {
            let left = coin.p().mul_vec(v);
            let right = coin.r().mul_vec(v);
            for (target, part) in [(x - 1, left), (x + 1, right)] {
                let entry = next.entry(target).or_insert(ZERO_VEC);
                *entry = vadd(entry, &part);
            }
        }
        next.retain(|_, v| vnorm_sqr(v) > PRUNE_EPS * PRUNE_EPS);
        WalkState {
            amplitudes: next,
            time: self.time + 1,
        }
    }

    /// Applies `step` the given number of times; zero steps is the identity.
    pub fn evolve(&self, coin: &CoinMatrix, steps: u64) -> WalkState {
        let mut state = self.clone();
        for _ in 0..steps {
            state = state.step(coin);
        }
        state
    }

    /// Position distribution `P(X_t = x) = ‖ψ_t(x)‖²`.
    pub fn distribution(&self) -> Distribution {
        let probabilities = self
            .amplitudes
            .iter()
            .map(|(&x, v)| (x, vnorm_sqr(v)))
            .filter(|&(_, p)| p > 0.0)
            .collect();
        Distribution {
            probabilities,
            time: self.time,
        }
    }

    /// Superposition `a·self + b·other` (for linearity checks).
    pub fn superpose(&self, a: C64, other: &WalkState, b: C64) -> WalkState {
        let mut amplitudes = BTreeMap::new();
        for (&x, v) in &self.amplitudes {
            amplitudes.insert(x, crate::linalg::vscale(a, v));
        }
        for (&x, v) in &other.amplitudes {
            let entry = amplitudes.entry(x).or_insert(ZERO_VEC);
            *entry = vadd(entry, &crate::linalg::vscale(b, v));
        }
        WalkState {
            amplitudes,
            time: self.time,
        }
    }

    /// Largest componentwise difference against another state.
    pub fn max_component_diff(&self, other: &WalkState) -> f64 {
        let mut keys: Vec<i64> = self.amplitudes.keys().copied().collect();
        keys.extend(other.amplitudes.keys().copied());
        keys.sort_unstable();
        keys.dedup();
        keys.iter()
            .map(|&x| {
                let a = self.amplitude(x);
                let b = other.amplitude(x);
                (0..4).map(|i| (a[i] - b[i]).norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Probabilities at time `t`, sparse over positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probabilities: BTreeMap<i64, f64>,
    time: u64,
}

impl Distribution {
    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn probability(&self, x: i64) -> f64 {
        self.probabilities.get(&x).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probabilities.iter().map(|(&x, &p)| (x, p))
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }

    /// Raw moment `E[X_t^r] = Σ_x x^r P(X_t = x)`.
    pub fn moment(&self, r: u32) -> f64 {
        self.probabilities
            .iter()
            .map(|(&x, &p)| (x as f64).powi(r as i32) * p)
            .sum()
    }
}

/// `P(X_t = x)` for t = 0..=max_t, plus the detected eventual period.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilitySequence {
    pub values: Vec<f64>,
    pub period: Option<usize>,
}

/// Evolves the walk and tracks the probability at one position over time.
pub fn origin_probability_sequence(
    coin: &CoinMatrix,
    init: &InitialState,
    x: i64,
    max_t: u64,
) -> ProbabilitySequence {
    let mut state = WalkState::from_initial(init);
    let mut values = Vec::with_capacity(max_t as usize + 1);
    values.push(vnorm_sqr(&state.amplitude(x)));
    for _ in 0..max_t {
        state = state.step(coin);
        values.push(vnorm_sqr(&state.amplitude(x)));
    }
    let period = detect_period(&values, PERIOD_TOL);
    ProbabilitySequence { values, period }
}

/// Smallest `p ≥ 1` such that the sequence repeats with period `p` (within
/// `tol`) for all indices from the midpoint on; `None` when no period fits.
pub fn detect_period(values: &[f64], tol: f64) -> Option<usize> {
    let n = values.len();
    if n < 2 {
        return None;
    }
    let t0 = (n - 1) / 2;
    let max_p = n - 1 - t0;
    (1..=max_p).find(|&p| (t0..n - p).all(|t| (values[t] - values[t + p]).abs() <= tol))
}
