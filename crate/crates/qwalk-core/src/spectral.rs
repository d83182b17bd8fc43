//! Momentum-space machinery: `Û(k) = R(k)·U`, its eigensystem on a k-grid,
//! group velocities from branch-tracked eigenvalues, and a Fourier-ring
//! propagation engine that serves as a second, independent evolution oracle.

use crate::coin::CoinMatrix;
use crate::linalg::{self, vdot, vnorm, vscale, vsub, Mat4, Vec4, C64, ZERO_VEC};
use crate::walk::{InitialState, WalkState};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use thiserror::Error;

/// Residual bound for accepted eigenpairs.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-10;

/// Default step for central-difference group velocities.
pub const DEFAULT_DK: f64 = 1e-4;

/// Largest admissible central-difference step.
pub const MAX_DK: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Eigen(#[from] linalg::LinalgError),
    #[error("branch tracking failed at k = {k}: {detail}")]
    BranchTracking { k: f64, detail: String },
    #[error("finite-difference step must lie in (0, {MAX_DK}], got {dk}")]
    InvalidStep { dk: f64 },
    #[error("branch index must be 0..4, got {index}")]
    InvalidBranch { index: usize },
    #[error("ring size {got} too small for t = {t}; need an even size of at least {required}")]
    RingTooSmall { required: usize, got: usize, t: u64 },
    #[error("ring size must be even, got {got}")]
    RingOdd { got: usize },
}

/// `Û(k) = R(k) U` with `R(k) = diag(e^{ik}, e^{ik}, e^{−ik}, e^{−ik})`.
#[derive(Debug, Clone, Copy)]
pub struct MomentumOperator {
    k: f64,
    uk: Mat4,
    rk: Mat4,
}

impl MomentumOperator {
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn uk(&self) -> &Mat4 {
        &self.uk
    }

    pub fn rk(&self) -> &Mat4 {
        &self.rk
    }
}

/// Builds the one-step momentum-space operator at wavenumber `k`.
pub fn build_momentum_operator(coin: &CoinMatrix, k: f64) -> MomentumOperator {
    let left = C64::from_polar(1.0, k);
    let right = C64::from_polar(1.0, -k);
    let mut rk = Mat4::zeros();
    rk.set(0, 0, left);
    rk.set(1, 1, left);
    rk.set(2, 2, right);
    rk.set(3, 3, right);
    MomentumOperator {
        k,
        uk: rk.matmul(coin.u()),
        rk,
    }
}

/// Eigenpairs of `Û(k)`, sorted by principal argument in [−π, π) ascending
/// with a deterministic phase convention (largest component real positive).
#[derive(Debug, Clone, Copy)]
pub struct Eigensystem {
    pub k: f64,
    pub values: [C64; 4],
    pub vectors: [Vec4; 4],
}

/// Principal argument mapped into [−π, π).
fn principal_arg(z: C64) -> f64 {
    let a = z.arg();
    if (a - PI).abs() < 1e-12 {
        -PI
    } else {
        a
    }
}

fn fix_phase(v: &Vec4) -> Vec4 {
    let mut best = 0usize;
    let mut best_mag = 0.0f64;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    if best_mag == 0.0 {
        return *v;
    }
    let phase = v[best] / C64::new(best_mag, 0.0);
    vscale(phase.conj(), v)
}

fn lex_cmp(a: &Vec4, b: &Vec4) -> std::cmp::Ordering {
    for i in 0..4 {
        for (x, y) in [(a[i].re, b[i].re), (a[i].im, b[i].im)] {
            match x.partial_cmp(&y).unwrap() {
                std::cmp::Ordering::Equal => {}
                ord => return ord,
            }
        }
    }
    std::cmp::Ordering::Equal
}

/// Full eigendecomposition of a momentum operator.
pub fn eigensystem(op: &MomentumOperator) -> Result<Eigensystem, SpectralError> {
    let pairs = linalg::eig_normal4(op.uk(), EIGEN_RESIDUAL_TOL)?;
    let mut items: Vec<(C64, Vec4)> = pairs
        .iter()
        .map(|p| (p.value, fix_phase(&p.vector)))
        .collect();
    items.sort_by(|(la, va), (lb, vb)| {
        principal_arg(*la)
            .partial_cmp(&principal_arg(*lb))
            .unwrap()
            .then_with(|| lex_cmp(va, vb))
    });
    let mut values = [C64::new(0.0, 0.0); 4];
    let mut vectors = [ZERO_VEC; 4];
    for (j, (l, v)) in items.into_iter().enumerate() {
        values[j] = l;
        vectors[j] = v;
    }
    Ok(Eigensystem {
        k: op.k(),
        values,
        vectors,
    })
}

/// Fourier transform of the initial condition; constant in `k` for an
/// origin-localized state.
#[derive(Debug, Clone, Copy)]
pub struct FourierInitial {
    amps: Vec4,
}

impl FourierInitial {
    pub fn from_initial(init: &InitialState) -> Self {
        FourierInitial {
            amps: *init.amplitudes(),
        }
    }

    pub fn eval(&self, _k: f64) -> Vec4 {
        self.amps
    }
}

/// `|⟨v_j|ψ̂₀⟩|²` for the four eigenvectors.
pub fn overlap_density(vectors: &[Vec4; 4], psi0: &Vec4) -> [f64; 4] {
    let mut out = [0.0f64; 4];
    for (o, v) in out.iter_mut().zip(vectors) {
        *o = vdot(v, psi0).norm_sqr();
    }
    out
}

/// Matches each eigenvector of `from` to its continuation in `to` by maximal
/// overlap; fails on ambiguous (collision) geometry.
fn match_branches(from: &Eigensystem, to: &Eigensystem) -> Result<[usize; 4], SpectralError> {
    let mut assignment = [usize::MAX; 4];
    let mut taken = [false; 4];
    for j in 0..4 {
        let mut best = 0usize;
        let mut best_ov = -1.0f64;
        for m in 0..4 {
            let ov = vdot(&from.vectors[j], &to.vectors[m]).norm_sqr();
            if ov > best_ov {
                best_ov = ov;
                best = m;
            }
        }
        if best_ov < 0.5 {
            return Err(SpectralError::BranchTracking {
                k: from.k,
                detail: format!(
                    "no continuation for branch {j}: best overlap {best_ov:.3} (eigenvalue collision)"
                ),
            });
        }
        if taken[best] {
            return Err(SpectralError::BranchTracking {
                k: from.k,
                detail: format!("branches collide: {best} claimed twice"),
            });
        }
        taken[best] = true;
        assignment[j] = best;
    }
    Ok(assignment)
}

/// Central-difference group velocities `h_j(k) = Re[i λ_j'(k)/λ_j(k)]` for all
/// four branches at once, with branch tracking across the stencil.
pub fn group_velocities(coin: &CoinMatrix, k: f64, dk: f64) -> Result<[f64; 4], SpectralError> {
    if !(dk > 0.0 && dk <= MAX_DK) {
        return Err(SpectralError::InvalidStep { dk });
    }
    let center = eigensystem(&build_momentum_operator(coin, k))?;
    group_velocities_at(coin, &center, dk)
}

fn group_velocities_at(
    coin: &CoinMatrix,
    center: &Eigensystem,
    dk: f64,
) -> Result<[f64; 4], SpectralError> {
    let minus = eigensystem(&build_momentum_operator(coin, center.k - dk))?;
    let plus = eigensystem(&build_momentum_operator(coin, center.k + dk))?;
    let to_minus = match_branches(center, &minus)?;
    let to_plus = match_branches(center, &plus)?;
    let mut h = [0.0f64; 4];
    for j in 0..4 {
        let derivative =
            (plus.values[to_plus[j]] - minus.values[to_minus[j]]) / C64::new(2.0 * dk, 0.0);
        let hj = C64::new(0.0, 1.0) * derivative / center.values[j];
        if hj.im.abs() > 1e-8 {
            return Err(SpectralError::BranchTracking {
                k: center.k,
                detail: format!("velocity for branch {j} not real: imag {:.3e}", hj.im),
            });
        }
        h[j] = hj.re;
    }
    Ok(h)
}

/// Group velocity of one branch (by sorted index) at wavenumber `k`.
pub fn group_velocity(
    coin: &CoinMatrix,
    branch: usize,
    k: f64,
    dk: f64,
) -> Result<f64, SpectralError> {
    if branch >= 4 {
        return Err(SpectralError::InvalidBranch { index: branch });
    }
    Ok(group_velocities(coin, k, dk)?[branch])
}

/// Everything the spectrum scan reports at one wavenumber.
#[derive(Debug, Clone, Copy)]
pub struct SpectralSample {
    pub k: f64,
    pub eigenvalues: [C64; 4],
    pub eigenvectors: [Vec4; 4],
    pub overlaps: [f64; 4],
    pub group_velocities: [f64; 4],
}

/// Assembles the full sample at `k` (eigensystem, overlaps, velocities).
pub fn spectral_sample(
    coin: &CoinMatrix,
    init: &InitialState,
    k: f64,
    dk: f64,
) -> Result<SpectralSample, SpectralError> {
    if !(dk > 0.0 && dk <= MAX_DK) {
        return Err(SpectralError::InvalidStep { dk });
    }
    let eig = eigensystem(&build_momentum_operator(coin, k))?;
    let psi0 = FourierInitial::from_initial(init).eval(k);
    let overlaps = overlap_density(&eig.vectors, &psi0);
    let h = group_velocities_at(coin, &eig, dk)?;
    Ok(SpectralSample {
        k,
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
        overlaps,
        group_velocities: h,
    })
}

/// Uniform grid `k_m = −π + 2πm/n`, m = 0..n.
pub fn k_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|m| -PI + 2.0 * PI * m as f64 / n as f64)
        .collect()
}

/// Samples the whole grid in parallel; per-k failures are kept in place so
/// callers can report them without aborting the scan.
pub fn sample_grid(
    coin: &CoinMatrix,
    init: &InitialState,
    grid_size: usize,
    dk: f64,
) -> Vec<Result<SpectralSample, SpectralError>> {
    k_grid(grid_size)
        .into_par_iter()
        .map(|k| spectral_sample(coin, init, k, dk))
        .collect()
}

/// Evolves on a momentum ring of `ring_size` points and transforms back:
/// `ψ_t(x) = (1/N) Σ_m e^{i k_m x} Û(k_m)^t ψ̂₀(k_m)`.
///
/// Exact (to rounding) as long as the light cone fits, hence the
/// `ring_size ≥ 2t + 3` precondition.
pub fn fourier_propagate(
    coin: &CoinMatrix,
    init: &InitialState,
    t: u64,
    ring_size: usize,
) -> Result<WalkState, SpectralError> {
    if ring_size % 2 != 0 {
        return Err(SpectralError::RingOdd { got: ring_size });
    }
    let required = 2 * t as usize + 3;
    if ring_size < required {
        return Err(SpectralError::RingTooSmall {
            required,
            got: ring_size,
            t,
        });
    }

    let fourier = FourierInitial::from_initial(init);
    let ks = k_grid(ring_size);
    let evolved: Vec<Vec4> = ks
        .par_iter()
        .map(|&k| {
            let op = build_momentum_operator(coin, k);
            op.uk().pow(t).mul_vec(&fourier.eval(k))
        })
        .collect();

    let reach = t as i64;
    let inv_n = 1.0 / ring_size as f64;
    let mut amplitudes = BTreeMap::new();
    for x in -reach..=reach {
        let mut acc = ZERO_VEC;
        for (k, phi) in ks.iter().zip(&evolved) {
            let phase = C64::from_polar(inv_n, k * x as f64);
            for (a, p) in acc.iter_mut().zip(phi) {
                *a += phase * p;
            }
        }
        if linalg::vnorm_sqr(&acc) > 1e-30 {
            amplitudes.insert(x, acc);
        }
    }
    Ok(WalkState::from_map(amplitudes, t))
}

#[allow(dead_code)]
fn residual(m: &Mat4, v: &Vec4, lambda: C64) -> f64 {
    vnorm(&vsub(&m.mul_vec(v), &vscale(lambda, v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::CoinSpec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn momentum_operator_at_zero_is_u() {
        let coin = CoinMatrix::grover();
        let op = build_momentum_operator(&coin, 0.0);
        assert!(op.uk().sub(coin.u()).max_abs() < 1e-15);
    }

    #[test]
    fn grover_momentum_entries() {
        let coin = CoinMatrix::grover();
        for k in [0.4f64, -1.3, 2.9] {
            let op = build_momentum_operator(&coin, k);
            let e_ik = C64::from_polar(1.0, k);
            let e_mik = C64::from_polar(1.0, -k);
            for i in 0..4 {
                for j in 0..4 {
                    let expect = match (i, j) {
                        (0, 3) | (1, 0) => e_ik,
                        (2, 1) | (3, 2) => e_mik,
                        _ => c(0.0, 0.0),
                    };
                    assert!((op.uk().get(i, j) - expect).norm() < 1e-15);
                }
            }
            assert!(op.uk().unitarity_defect() < 1e-14);
        }
    }

    #[test]
    fn hadamard_momentum_unitary() {
        let coin = CoinMatrix::hadamard();
        let op = build_momentum_operator(&coin, std::f64::consts::FRAC_PI_3);
        assert!(op.uk().unitarity_defect() < 1e-14);
    }

    #[test]
    fn grover_eigenvalues_are_fourth_roots_of_unity() {
        let coin = CoinMatrix::grover();
        let roots = [c(-1.0, 0.0), c(0.0, -1.0), c(1.0, 0.0), c(0.0, 1.0)];
        for k in [0.0f64, 0.7, -2.1] {
            let eig = eigensystem(&build_momentum_operator(&coin, k)).unwrap();
            // sorted by principal argument: −1, −i, 1, i
            for (l, root) in eig.values.iter().zip(&roots) {
                assert!((l - root).norm() < 1e-10, "k={k}: {l} vs {root}");
            }
            for j in 0..4 {
                let r = residual(
                    build_momentum_operator(&coin, k).uk(),
                    &eig.vectors[j],
                    eig.values[j],
                );
                assert!(r < 1e-12);
            }
        }
    }

    #[test]
    fn identity_coin_eigensystem() {
        let spec = CoinSpec::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let coin = CoinMatrix::new(spec).unwrap();
        let eig = eigensystem(&build_momentum_operator(&coin, 0.0)).unwrap();
        let mut plus = 0;
        let mut minus = 0;
        for l in eig.values.iter() {
            if (l - c(1.0, 0.0)).norm() < 1e-12 {
                plus += 1;
            } else if (l + c(1.0, 0.0)).norm() < 1e-12 {
                minus += 1;
            }
        }
        assert_eq!((plus, minus), (3, 1));
    }

    #[test]
    fn trace_identity_random_k() {
        let coin = CoinMatrix::hadamard();
        for k in [-3.0f64, -0.2, 0.9, 2.4] {
            let op = build_momentum_operator(&coin, k);
            let eig = eigensystem(&op).unwrap();
            let sum: C64 = eig.values.iter().sum();
            assert!((sum - op.uk().trace()).norm() < 1e-10);
        }
    }

    #[test]
    fn eigenvector_phase_and_order_deterministic() {
        let coin = CoinMatrix::hadamard();
        let a = eigensystem(&build_momentum_operator(&coin, 0.37)).unwrap();
        let b = eigensystem(&build_momentum_operator(&coin, 0.37)).unwrap();
        for j in 0..4 {
            assert_eq!(a.values[j], b.values[j]);
            assert_eq!(a.vectors[j], b.vectors[j]);
            // phase convention: a component of (near-)maximal magnitude is
            // real and positive
            let v = a.vectors[j];
            let max_mag = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(
                v.iter()
                    .any(|z| z.norm() >= max_mag - 1e-12 && z.im.abs() < 1e-12 && z.re > 0.0),
                "no dominant real-positive component in {v:?}"
            );
        }
    }

    #[test]
    fn grover_group_velocities_vanish() {
        let coin = CoinMatrix::grover();
        for k in k_grid(128) {
            let h = group_velocities(&coin, k, DEFAULT_DK).unwrap();
            for hj in h {
                assert!(hj.abs() < 1e-8, "h = {hj} at k = {k}");
            }
        }
    }

    #[test]
    fn hadamard_group_velocities_spread_and_bounded() {
        let coin = CoinMatrix::hadamard();
        let mut max_abs: f64 = 0.0;
        for k in k_grid(128) {
            let h = group_velocities(&coin, k, DEFAULT_DK).unwrap();
            for hj in h {
                max_abs = max_abs.max(hj.abs());
                assert!(
                    hj.abs() <= 1.0 + 1e-6,
                    "|h| = {} exceeds speed bound",
                    hj.abs()
                );
            }
        }
        assert!(
            max_abs > 0.1,
            "expected a spreading branch, max |h| = {max_abs}"
        );
        // the moving branches top out at 1/√2
        assert!((max_abs - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-4);
    }

    #[test]
    fn group_velocity_input_validation() {
        let coin = CoinMatrix::grover();
        assert!(matches!(
            group_velocity(&coin, 0, 0.0, 0.0),
            Err(SpectralError::InvalidStep { .. })
        ));
        assert!(matches!(
            group_velocity(&coin, 0, 0.0, 2e-3),
            Err(SpectralError::InvalidStep { .. })
        ));
        assert!(matches!(
            group_velocity(&coin, 7, 0.0, 1e-4),
            Err(SpectralError::InvalidBranch { .. })
        ));
    }

    #[test]
    fn overlaps_complete_for_unit_states() {
        let coin = CoinMatrix::grover();
        let init = InitialState::basis(0);
        for k in [0.0f64, 1.1, -2.6] {
            let eig = eigensystem(&build_momentum_operator(&coin, k)).unwrap();
            let ov = overlap_density(&eig.vectors, init.amplitudes());
            let sum: f64 = ov.iter().sum();
            assert!((sum - 1.0).abs() < 1e-10);
        }
        let zero = ZERO_VEC;
        let eig = eigensystem(&build_momentum_operator(&coin, 0.5)).unwrap();
        assert_eq!(overlap_density(&eig.vectors, &zero), [0.0; 4]);
    }

    /// Independent algebraic route: for the Grover coin the mass on the
    /// λ = ±1 eigenspace is ⟨ψ|Π|ψ⟩ with Π = (I + Û(k)²)/2, which expands to
    /// ½·[1 + 2Re(ᾱγ) + 2Re(β̄μ e^{2ik})] for a unit initial state.
    #[test]
    fn grover_branch_masses_match_projector_formula() {
        let coin = CoinMatrix::grover();
        let amps = [c(0.31, 0.4), c(-0.2, 0.25), c(0.44, -0.1), c(0.05, 0.62)];
        let n = crate::linalg::vnorm_sqr(&amps).sqrt();
        let amps = amps.map(|z| z / n);
        let init = InitialState::new(amps).unwrap();
        for k in k_grid(16) {
            let eig = eigensystem(&build_momentum_operator(&coin, k)).unwrap();
            let ov = overlap_density(&eig.vectors, init.amplitudes());
            let mut mass = 0.0;
            for j in 0..4 {
                let l = eig.values[j];
                if (l - c(1.0, 0.0)).norm() < 1e-9 || (l + c(1.0, 0.0)).norm() < 1e-9 {
                    mass += ov[j];
                }
            }
            let a_bar_g = (amps[0].conj() * amps[2]).re;
            let b_bar_m = amps[1].conj() * amps[3];
            let phase = C64::from_polar(1.0, 2.0 * k);
            let expect = 0.5 * (1.0 + 2.0 * a_bar_g + 2.0 * (b_bar_m * phase).re);
            assert!((mass - expect).abs() < 1e-10, "k = {k}: {mass} vs {expect}");
        }
    }

    #[test]
    fn fourier_ring_validation() {
        let coin = CoinMatrix::grover();
        let init = InitialState::basis(0);
        assert!(matches!(
            fourier_propagate(&coin, &init, 4, 9),
            Err(SpectralError::RingOdd { .. })
        ));
        assert!(matches!(
            fourier_propagate(&coin, &init, 4, 10),
            Err(SpectralError::RingTooSmall { .. })
        ));
    }

    #[test]
    fn fourier_grover_period_four() {
        let coin = CoinMatrix::grover();
        let init = InitialState::basis(0);
        let state = fourier_propagate(&coin, &init, 4, 16).unwrap();
        let direct = WalkState::from_initial(&init);
        assert!(state.max_component_diff(&direct) < 1e-10);
    }

    #[test]
    fn fourier_t_zero_is_initial() {
        let coin = CoinMatrix::hadamard();
        let init = InitialState::new([c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.0), c(0.0, 0.5)]).unwrap();
        let state = fourier_propagate(&coin, &init, 0, 8).unwrap();
        assert!(state.max_component_diff(&WalkState::from_initial(&init)) < 1e-14);
    }

    #[test]
    fn dual_engine_agreement_hadamard() {
        let coin = CoinMatrix::hadamard();
        let init = InitialState::new([c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.0), c(0.0, 0.5)]).unwrap();
        let t = 50;
        let ring = fourier_propagate(&coin, &init, t, 128).unwrap();
        let direct = WalkState::from_initial(&init).evolve(&coin, t);
        assert!(ring.max_component_diff(&direct) < 1e-10);
    }

    mod random_coins {
        use super::*;
        use crate::coin::CoinSpec;
        use proptest::prelude::*;

        fn arb_coin() -> impl Strategy<Value = CoinMatrix> {
            (
                0.0..std::f64::consts::FRAC_PI_2,
                0.0..std::f64::consts::TAU,
                0.0..std::f64::consts::TAU,
                0.0..std::f64::consts::TAU,
            )
                .prop_map(|(th, p1, p2, p3)| {
                    let spec = CoinSpec::new(
                        C64::from_polar(th.cos(), p1),
                        C64::from_polar(th.sin(), p2),
                        -C64::from_polar(th.sin(), p3),
                        C64::from_polar(th.cos(), p2 + p3 - p1),
                    )
                    .expect("construction is unitary");
                    CoinMatrix::new(spec).expect("unitary")
                })
        }

        fn arb_init() -> impl Strategy<Value = InitialState> {
            proptest::array::uniform8(-1.0f64..1.0).prop_filter_map("degenerate", |raw| {
                let amps = [
                    C64::new(raw[0], raw[1]),
                    C64::new(raw[2], raw[3]),
                    C64::new(raw[4], raw[5]),
                    C64::new(raw[6], raw[7]),
                ];
                let n = crate::linalg::vnorm_sqr(&amps).sqrt();
                if n < 1e-3 {
                    return None;
                }
                InitialState::new(amps.map(|z| z / n)).ok()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn dual_engine_equivalence(coin in arb_coin(), init in arb_init(), t in 1u64..40) {
                let ring_size = 2 * t as usize + 8;
                let ring = fourier_propagate(&coin, &init, t, ring_size).unwrap();
                let direct = WalkState::from_initial(&init).evolve(&coin, t);
                prop_assert!(ring.max_component_diff(&direct) < 1e-10);
            }

            #[test]
            fn eigen_residuals_on_grid(coin in arb_coin(), k in -std::f64::consts::PI..std::f64::consts::PI) {
                let op = build_momentum_operator(&coin, k);
                let eig = eigensystem(&op).unwrap();
                for j in 0..4 {
                    prop_assert!(residual(op.uk(), &eig.vectors[j], eig.values[j]) < 1e-10);
                    prop_assert!((eig.values[j].norm() - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
