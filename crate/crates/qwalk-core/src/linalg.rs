//! Small dense complex linear algebra sized for the 4-component coin space.
//!
//! Everything here is fixed at dimension 4 (the walk's chirality space), so
//! the matrix type is a plain `[[C64; 4]; 4]` wrapper with no allocation.
//! The eigensolver targets *normal* matrices (unitaries in practice): it
//! splits `M` into the commuting Hermitian pair `H = (M + M†)/2` and
//! `K = (M − M†)/2i`, diagonalizes `H` by cyclic Jacobi rotations, and then
//! diagonalizes `K` restricted to each (near-)degenerate eigenspace of `H`.
//! For a non-normal input the pair does not commute and the residual check
//! fails, which is exactly the error the callers want to see.

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// A 4-component complex vector (chirality amplitudes).
pub type Vec4 = [C64; 4];

pub const ZERO_VEC: Vec4 = [C64::new(0.0, 0.0); 4];

/// Conjugating inner product ⟨a|b⟩ = Σ conj(a_i) b_i.
pub fn vdot(a: &Vec4, b: &Vec4) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vnorm_sqr(v: &Vec4) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

pub fn vnorm(v: &Vec4) -> f64 {
    vnorm_sqr(v).sqrt()
}

pub fn vadd(a: &Vec4, b: &Vec4) -> Vec4 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

pub fn vsub(a: &Vec4, b: &Vec4) -> Vec4 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub fn vscale(s: C64, v: &Vec4) -> Vec4 {
    [s * v[0], s * v[1], s * v[2], s * v[3]]
}

/// Largest component magnitude.
pub fn vmax_abs(v: &Vec4) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Dense 4×4 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4 {
    rows: [[C64; 4]; 4],
}

impl Mat4 {
    pub fn zeros() -> Self {
        Mat4 {
            rows: [[C64::new(0.0, 0.0); 4]; 4],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.rows[i][i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: [[C64; 4]; 4]) -> Self {
        Mat4 { rows }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.rows[i][j] = v;
    }

    pub fn row(&self, i: usize) -> &[C64; 4] {
        &self.rows[i]
    }

    pub fn column(&self, j: usize) -> Vec4 {
        [
            self.rows[0][j],
            self.rows[1][j],
            self.rows[2][j],
            self.rows[3][j],
        ]
    }

    pub fn mul_vec(&self, v: &Vec4) -> Vec4 {
        let mut out = ZERO_VEC;
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
        out
    }

    pub fn matmul(&self, rhs: &Mat4) -> Mat4 {
        let mut out = Mat4::zeros();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.rows[i][k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..4 {
                    out.rows[i][j] += a * rhs.rows[k][j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Mat4 {
        let mut out = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.rows[j][i] = self.rows[i][j].conj();
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat4) -> Mat4 {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out.rows[i][j] += rhs.rows[i][j];
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Mat4) -> Mat4 {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out.rows[i][j] -= rhs.rows[i][j];
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Mat4 {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out.rows[i][j] *= s;
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.rows[0][0] + self.rows[1][1] + self.rows[2][2] + self.rows[3][3]
    }

    /// Largest entry magnitude (max norm).
    pub fn max_abs(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// ‖M†M − I‖_max, zero iff the matrix is unitary.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().matmul(self).sub(&Mat4::identity()).max_abs()
    }

    /// Matrix power by repeated squaring.
    pub fn pow(&self, mut n: u64) -> Mat4 {
        let mut base = *self;
        let mut acc = Mat4::identity();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.matmul(&base);
            }
            base = base.matmul(&base);
            n >>= 1;
        }
        acc
    }
}

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("eigendecomposition residual {residual:.3e} exceeds {tolerance:.1e}; input is not normal/unitary to working precision")]
    ResidualTooLarge { residual: f64, tolerance: f64 },
}

/// One eigenpair of a 4×4 matrix.
#[derive(Debug, Clone, Copy)]
pub struct EigPair {
    pub value: C64,
    pub vector: Vec4,
}

const JACOBI_SWEEPS: usize = 40;
const JACOBI_EPS: f64 = 1e-15;

/// Cyclic Jacobi diagonalization of the Hermitian leading `n`×`n` block.
///
/// Returns the (real) eigenvalue estimates on the diagonal positions and the
/// accumulated unitary whose first `n` columns are the eigenvectors.
fn jacobi_hermitian(a: &Mat4, n: usize) -> ([f64; 4], Mat4) {
    let mut a = *a;
    let mut v = Mat4::identity();
    let scale = a.max_abs().max(1.0);

    for _ in 0..JACOBI_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.get(p, q).norm());
            }
        }
        if off <= JACOBI_EPS * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r <= JACOBI_EPS * scale {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                // phase: apq = r e^{iφ}
                let phase = apq / r;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Unitary W: columns p,q mix as
                //   col_p ← c·col_p − s·conj(phase)·col_q
                //   col_q ← s·phase·col_p + c·col_q
                let wpp = C64::new(c, 0.0);
                let wpq = C64::new(s, 0.0) * phase;
                let wqp = -C64::new(s, 0.0) * phase.conj();
                let wqq = C64::new(c, 0.0);

                // A ← W† A W  (apply W on the right, W† on the left)
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip * wpp + aiq * wqp);
                    a.set(i, q, aip * wpq + aiq * wqq);
                }
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, wpp.conj() * apj + wqp.conj() * aqj);
                    a.set(q, j, wpq.conj() * apj + wqq.conj() * aqj);
                }
                // keep Hermitian structure exact where it matters
                a.set(q, p, a.get(p, q).conj());
                let dp = a.get(p, p);
                let dq = a.get(q, q);
                a.set(p, p, C64::new(dp.re, 0.0));
                a.set(q, q, C64::new(dq.re, 0.0));

                for i in 0..4 {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * wpp + viq * wqp);
                    v.set(i, q, vip * wpq + viq * wqq);
                }
            }
        }
    }

    let mut d = [0.0f64; 4];
    for (i, di) in d.iter_mut().enumerate().take(n) {
        *di = a.get(i, i).re;
    }
    (d, v)
}

/// Eigendecomposition of a normal 4×4 matrix (unitary in practice).
///
/// The returned pairs are unsorted and carry no phase convention; callers fix
/// ordering and phases. `residual_tol` bounds ‖M v − λ v‖₂ per pair.
pub fn eig_normal4(m: &Mat4, residual_tol: f64) -> Result<[EigPair; 4], LinalgError> {
    let half = C64::new(0.5, 0.0);
    let herm = m.add(&m.adjoint()).scale(half);
    let skew = m.sub(&m.adjoint()).scale(C64::new(0.0, -0.5));

    let (d, mut v) = jacobi_hermitian(&herm, 4);

    // Sort columns by the Hermitian-part eigenvalue for deterministic grouping.
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let sorted_cols: Vec<Vec4> = order.iter().map(|&i| v.column(i)).collect();
    let sorted_d: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    for (j, col) in sorted_cols.iter().enumerate() {
        for i in 0..4 {
            v.set(i, j, col[i]);
        }
    }

    // Within each near-degenerate eigenspace of H, diagonalize K to split it.
    let group_tol = 1e-8 * herm.max_abs().max(1.0);
    let mut start = 0;
    while start < 4 {
        let mut end = start + 1;
        while end < 4 && (sorted_d[end] - sorted_d[end - 1]).abs() <= group_tol {
            end += 1;
        }
        let g = end - start;
        if g > 1 {
            // K restricted to the group basis
            let cols: Vec<Vec4> = (start..end).map(|j| v.column(j)).collect();
            let mut sub = Mat4::zeros();
            for (i, ci) in cols.iter().enumerate() {
                let kci = skew.mul_vec(ci);
                for (j, cj) in cols.iter().enumerate() {
                    sub.set(j, i, vdot(cj, &kci));
                }
            }
            let (_, w) = jacobi_hermitian(&sub, g);
            let mut new_cols = vec![ZERO_VEC; g];
            for (jj, nc) in new_cols.iter_mut().enumerate() {
                for (ii, ci) in cols.iter().enumerate() {
                    *nc = vadd(nc, &vscale(w.get(ii, jj), ci));
                }
            }
            for (jj, nc) in new_cols.iter().enumerate() {
                for i in 0..4 {
                    v.set(i, start + jj, nc[i]);
                }
            }
        }
        start = end;
    }

    let mut pairs = [EigPair {
        value: C64::new(0.0, 0.0),
        vector: ZERO_VEC,
    }; 4];
    for (j, pair) in pairs.iter_mut().enumerate() {
        let mut vec = v.column(j);
        let n = vnorm(&vec);
        vec = vscale(C64::new(1.0 / n, 0.0), &vec);
        let lambda = vdot(&vec, &m.mul_vec(&vec));
        let resid = vnorm(&vsub(&m.mul_vec(&vec), &vscale(lambda, &vec)));
        if resid > residual_tol {
            return Err(LinalgError::ResidualTooLarge {
                residual: resid,
                tolerance: residual_tol,
            });
        }
        *pair = EigPair {
            value: lambda,
            vector: vec,
        };
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_unitary(seed: u64) -> Mat4 {
        // Product of Jacobi-style rotations with seeded angles; no RNG crate
        // needed for a deterministic test matrix.
        let mut m = Mat4::identity();
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut next = || {
            x = x
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (x >> 11) as f64 / (1u64 << 53) as f64
        };
        for p in 0..4 {
            for q in (p + 1)..4 {
                let th = next() * std::f64::consts::PI;
                let ph = next() * std::f64::consts::TAU;
                let mut rot = Mat4::identity();
                rot.set(p, p, c(th.cos(), 0.0));
                rot.set(q, q, c(th.cos(), 0.0));
                rot.set(p, q, c(th.sin(), 0.0) * C64::from_polar(1.0, ph));
                rot.set(q, p, c(-th.sin(), 0.0) * C64::from_polar(1.0, -ph));
                m = m.matmul(&rot);
            }
        }
        // a diagonal phase layer keeps the spectrum generic
        let mut d = Mat4::zeros();
        for i in 0..4 {
            d.set(i, i, C64::from_polar(1.0, next() * std::f64::consts::TAU));
        }
        m.matmul(&d)
    }

    #[test]
    fn identity_and_matmul() {
        let id = Mat4::identity();
        let u = random_unitary(3);
        let d = u.matmul(&id).sub(&u).max_abs();
        assert!(d == 0.0);
        assert!(u.unitarity_defect() < 1e-14);
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let u = random_unitary(11);
        let mut acc = Mat4::identity();
        for _ in 0..13 {
            acc = acc.matmul(&u);
        }
        assert!(u.pow(13).sub(&acc).max_abs() < 1e-12);
        assert!(u.pow(0).sub(&Mat4::identity()).max_abs() == 0.0);
    }

    #[test]
    fn jacobi_diagonalizes_hermitian() {
        for seed in 0..8u64 {
            let u = random_unitary(seed);
            let h = u.add(&u.adjoint()).scale(c(0.5, 0.0));
            let (d, v) = jacobi_hermitian(&h, 4);
            assert!(v.unitarity_defect() < 1e-13, "eigenvectors not orthonormal");
            for j in 0..4 {
                let col = v.column(j);
                let r = vnorm(&vsub(&h.mul_vec(&col), &vscale(c(d[j], 0.0), &col)));
                assert!(r < 1e-13, "residual {r} at seed {seed}");
            }
        }
    }

    #[test]
    fn eig_normal_unitary_residuals() {
        for seed in 0..16u64 {
            let u = random_unitary(seed);
            let pairs = eig_normal4(&u, 1e-10).expect("unitary must decompose");
            let mut tr = c(0.0, 0.0);
            for p in pairs.iter() {
                assert!(
                    (p.value.norm() - 1.0).abs() < 1e-12,
                    "eigenvalue off unit circle"
                );
                let r = vnorm(&vsub(&u.mul_vec(&p.vector), &vscale(p.value, &p.vector)));
                assert!(r < 1e-12, "residual {r}");
                tr += p.value;
            }
            assert!((tr - u.trace()).norm() < 1e-10, "trace identity violated");
        }
    }

    #[test]
    fn eig_normal_handles_degenerate_spectrum() {
        // swap of components 0<->2, identity on 1,3: eigenvalues {1,1,1,-1}
        let mut m = Mat4::zeros();
        m.set(0, 2, c(1.0, 0.0));
        m.set(2, 0, c(1.0, 0.0));
        m.set(1, 1, c(1.0, 0.0));
        m.set(3, 3, c(1.0, 0.0));
        let pairs = eig_normal4(&m, 1e-10).unwrap();
        let mut ones = 0;
        let mut minus = 0;
        for p in pairs.iter() {
            if (p.value - c(1.0, 0.0)).norm() < 1e-12 {
                ones += 1;
            }
            if (p.value + c(1.0, 0.0)).norm() < 1e-12 {
                minus += 1;
            }
        }
        assert_eq!((ones, minus), (3, 1));
    }

    #[test]
    fn eig_normal_rejects_non_normal() {
        let mut m = Mat4::identity();
        m.set(0, 1, c(0.5, 0.0)); // upper-triangular bump: not normal
        assert!(eig_normal4(&m, 1e-10).is_err());
    }
}
