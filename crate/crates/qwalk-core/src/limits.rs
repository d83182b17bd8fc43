//! Closed-form limit quantities and their oracle-side counterparts:
//! stationary-distribution formulas, the localized-branch mass Δ (computed
//! three ways), the Konno density kernel, and limit moments of the rescaled
//! position — each paired with exact-evolution data for auditing.

use crate::coin::CoinMatrix;
use crate::linalg::C64;
use crate::spectral::{self, SpectralError};
use crate::walk::{
    detect_period, origin_probability_sequence, InitialState, ProbabilitySequence, WalkState,
    PERIOD_TOL,
};
use thiserror::Error;

/// Branches are identified as λ = ±1 when within this distance.
pub const BRANCH_ID_TOL: f64 = 1e-8;

/// 1/√2, the right edge of the Konno density's real domain.
pub const KONNO_EDGE: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Error)]
pub enum LimitsError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("could not identify the λ = ±1 branches at k = {k}: {detail}")]
    BranchIdentification { k: f64, detail: String },
    #[error("density formula is non-real on [1/√2, 1): radicand 1 − 2x² < 0 at x = {x}")]
    KonnoDomain { x: f64 },
    #[error("quadrature grid must have at least 64 points, got {got}")]
    GridTooSmall { got: usize },
}

/// The stationary-distribution formula values for a given initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem1Prediction {
    /// Claimed `lim P(X_{2t} = 0) = |μ|² + ¼(|γ|² + |β|² + |α|²)`.
    pub even_limit: f64,
    /// Claimed `lim P(X_{2t+1} = 0) = ¼ + Im(ᾱμ) + Im(γ̄β) + |μ|² + |β|²`.
    pub odd_limit: f64,
    /// Claimed limit at every x ≠ 0 (always zero).
    pub offsite_limit: f64,
}

/// Evaluates the closed-form stationary limits for `(α, β, γ, μ)`.
pub fn theorem1_predict(init: &InitialState) -> Theorem1Prediction {
    let (alpha, beta, gamma, mu) = (init.alpha(), init.beta(), init.gamma(), init.mu());
    let even_limit = mu.norm_sqr() + 0.25 * (gamma.norm_sqr() + beta.norm_sqr() + alpha.norm_sqr());
    let odd_limit =
        0.25 + (alpha.conj() * mu).im + (gamma.conj() * beta).im + mu.norm_sqr() + beta.norm_sqr();
    Theorem1Prediction {
        even_limit,
        odd_limit,
        offsite_limit: 0.0,
    }
}

/// Even and odd subsequences of `P(X_t = x)`, each with period detection.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarySequences {
    pub even: ProbabilitySequence,
    pub odd: ProbabilitySequence,
}

/// Exact-evolution probabilities at `x` split by time parity.
pub fn oracle_stationary(
    coin: &CoinMatrix,
    init: &InitialState,
    x: i64,
    max_t: u64,
) -> StationarySequences {
    let full = origin_probability_sequence(coin, init, x, max_t);
    let even: Vec<f64> = full.values.iter().copied().step_by(2).collect();
    let odd: Vec<f64> = full.values.iter().copied().skip(1).step_by(2).collect();
    StationarySequences {
        even: ProbabilitySequence {
            period: detect_period(&even, PERIOD_TOL),
            values: even,
        },
        odd: ProbabilitySequence {
            period: detect_period(&odd, PERIOD_TOL),
            values: odd,
        },
    }
}

fn branch_mass_quadrature(
    coin: &CoinMatrix,
    init: &InitialState,
    grid_size: usize,
    select_pm_one: bool,
) -> Result<f64, LimitsError> {
    if grid_size < 64 {
        return Err(LimitsError::GridTooSmall { got: grid_size });
    }
    let one = C64::new(1.0, 0.0);
    let psi0 = *init.amplitudes();
    let mut total = 0.0f64;
    for k in spectral::k_grid(grid_size) {
        let eig = spectral::eigensystem(&spectral::build_momentum_operator(coin, k))?;
        let overlaps = spectral::overlap_density(&eig.vectors, &psi0);
        if select_pm_one {
            let mut plus: Option<usize> = None;
            let mut minus: Option<usize> = None;
            for (j, l) in eig.values.iter().enumerate() {
                if (l - one).norm() <= BRANCH_ID_TOL {
                    if plus.replace(j).is_some() {
                        return Err(LimitsError::BranchIdentification {
                            k,
                            detail: "two branches at λ = +1".into(),
                        });
                    }
                } else if (l + one).norm() <= BRANCH_ID_TOL {
                    if minus.replace(j).is_some() {
                        return Err(LimitsError::BranchIdentification {
                            k,
                            detail: "two branches at λ = −1".into(),
                        });
                    }
                }
            }
            match (plus, minus) {
                (Some(p), Some(m)) => total += overlaps[p] + overlaps[m],
                _ => {
                    return Err(LimitsError::BranchIdentification {
                        k,
                        detail: format!(
                            "spectrum {:?} has no λ = ±1 pair",
                            eig.values.map(|z| (z.re, z.im))
                        ),
                    })
                }
            }
        } else {
            total += overlaps.iter().sum::<f64>();
        }
    }
    Ok(total / grid_size as f64)
}

/// Quadrature of the λ = ±1 branch mass
/// `∫ Σ_{λ_j = ±1} |⟨v_j(k)|ψ̂₀⟩|² dk/2π` with unit-norm eigenvectors.
///
/// For the Grover coin this evaluates to `½ + Re(ᾱγ)` exactly.
pub fn delta_mass_quadrature(
    coin: &CoinMatrix,
    init: &InitialState,
    grid_size: usize,
) -> Result<f64, LimitsError> {
    branch_mass_quadrature(coin, init, grid_size, true)
}

/// Same quadrature summed over all four branches; equals 1 for a unit
/// initial state (completeness).
pub fn total_mass_quadrature(
    coin: &CoinMatrix,
    init: &InitialState,
    grid_size: usize,
) -> Result<f64, LimitsError> {
    branch_mass_quadrature(coin, init, grid_size, false)
}

/// The two claimed closed forms for the δ-mass; they disagree with each
/// other and are generally non-real, so both are reported verbatim and
/// audited against the quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaClosedForms {
    /// Derivation-stage value `½αμi`.
    pub derivation: C64,
    /// Theorem-statement value `½μi`.
    pub theorem: C64,
}

pub fn delta_closed_forms(init: &InitialState) -> DeltaClosedForms {
    let half_i = C64::new(0.0, 0.5);
    DeltaClosedForms {
        derivation: half_i * init.alpha() * init.mu(),
        theorem: half_i * init.mu(),
    }
}

/// Weak-limit measure description: δ-mass at the origin plus a polynomial
/// weight times the Konno kernel. The weight coefficients have no defining
/// formulas and stay unevaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitMeasure {
    pub delta_mass: C64,
    pub density_weights: Option<[f64; 3]>,
}

pub fn theorem2_limit_measure(init: &InitialState) -> LimitMeasure {
    LimitMeasure {
        delta_mass: delta_closed_forms(init).theorem,
        density_weights: None,
    }
}

/// Konno density `f_K(x) = 1/(π(1−x²)√(1−2x²))` on the indicator support
/// (0, 1): zero outside (0, 1), a domain error on [1/√2, 1) where the
/// radicand is negative.
pub fn konno_density(x: f64) -> Result<f64, LimitsError> {
    if x <= 0.0 || x >= 1.0 {
        return Ok(0.0);
    }
    let radicand = 1.0 - 2.0 * x * x;
    if radicand <= 0.0 {
        return Err(LimitsError::KonnoDomain { x });
    }
    Ok(1.0 / (std::f64::consts::PI * (1.0 - x * x) * radicand.sqrt()))
}

/// Limit moments `lim E[(X_t/t)^r] = ∫ Σ_j h_j(k)^r |⟨v_j|ψ̂₀⟩|² dk/2π`
/// for r = 1..=r_max, via branch-tracked velocities on the k-grid.
pub fn limit_moments_spectral(
    coin: &CoinMatrix,
    init: &InitialState,
    r_max: u32,
    grid_size: usize,
) -> Result<Vec<f64>, LimitsError> {
    if grid_size < 64 {
        return Err(LimitsError::GridTooSmall { got: grid_size });
    }
    let samples = spectral::sample_grid(coin, init, grid_size, spectral::DEFAULT_DK);
    let mut moments = vec![0.0f64; r_max as usize];
    for sample in samples {
        let s = sample?;
        for j in 0..4 {
            let mut power = 1.0f64;
            for m in moments.iter_mut() {
                power *= s.group_velocities[j];
                *m += power * s.overlaps[j];
            }
        }
    }
    for m in moments.iter_mut() {
        *m /= grid_size as f64;
    }
    Ok(moments)
}

/// Empirical `E[(X_t/t)^r]` for r = 1..=r_max from the exact distribution.
pub fn empirical_rescaled_moments(
    coin: &CoinMatrix,
    init: &InitialState,
    t: u64,
    r_max: u32,
) -> Vec<f64> {
    let dist = WalkState::from_initial(init).evolve(coin, t).distribution();
    let scale = t.max(1) as f64;
    (1..=r_max)
        .map(|r| dist.moment(r) / scale.powi(r as i32))
        .collect()
}
