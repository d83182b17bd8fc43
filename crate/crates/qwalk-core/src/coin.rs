//! Coin operators for the 4-state walk.
//!
//! A 2×2 unitary `[[a, c], [b, d]]` is embedded into the 4×4 one-step coin
//!
//! ```text
//!     | 0  0  a  c |
//! U = | b  d  0  0 |        P = rows 0,1 of U (left movers)
//!     | a  c  0  0 |        R = rows 2,3 of U (right movers)
//!     | 0  0  b  d |
//! ```
//!
//! and split by rows into `P + R = U`. The Grover instance uses
//! `(a, b, c, d) = (0, 1, 1, 0)`, i.e. the 2×2 Grover diffusion.

use crate::linalg::{Mat4, C64};
use thiserror::Error;

/// Validation tolerance for 2×2 coin unitarity.
pub const COIN_UNITARITY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CoinError {
    #[error("coin parameters are not unitary: largest defect {defect:.3e} exceeds {COIN_UNITARITY_TOL:.1e}")]
    NotUnitary { defect: f64 },
    #[error("diffusion dimension must be at least 1")]
    ZeroDimension,
}

/// Parameters of the embedded 2×2 coin `[[a, c], [b, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinSpec {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl CoinSpec {
    /// Validates that `[[a, c], [b, d]]` is unitary within [`COIN_UNITARITY_TOL`].
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self, CoinError> {
        let spec = CoinSpec { a, b, c, d };
        let defect = spec.unitarity_defect();
        if defect > COIN_UNITARITY_TOL {
            return Err(CoinError::NotUnitary { defect });
        }
        Ok(spec)
    }

    /// The Grover coin, `(0, 1, 1, 0)`: the 2×2 Grover diffusion embedded.
    pub fn grover() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        CoinSpec {
            a: zero,
            b: one,
            c: one,
            d: zero,
        }
    }

    /// Hadamard comparison coin: `(1, 1, 1, -1)/√2`.
    pub fn hadamard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        CoinSpec {
            a: C64::new(s, 0.0),
            b: C64::new(s, 0.0),
            c: C64::new(s, 0.0),
            d: C64::new(-s, 0.0),
        }
    }

    /// Largest entry of `M†M − I` for the 2×2 matrix `[[a, c], [b, d]]`.
    pub fn unitarity_defect(&self) -> f64 {
        let col0 = (self.a.norm_sqr() + self.b.norm_sqr() - 1.0).abs();
        let col1 = (self.c.norm_sqr() + self.d.norm_sqr() - 1.0).abs();
        let cross = (self.a * self.c.conj() + self.b * self.d.conj()).norm();
        col0.max(col1).max(cross)
    }
}

/// Chirality basis labels; 0,1 move left, 2,3 move right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    /// "right → left"
    RightToLeft = 0,
    /// "left → left"
    LeftToLeft = 1,
    /// "left → right"
    LeftToRight = 2,
    /// "right → right"
    RightToRight = 3,
}

impl Chirality {
    pub const ALL: [Chirality; 4] = [
        Chirality::RightToLeft,
        Chirality::LeftToLeft,
        Chirality::LeftToRight,
        Chirality::RightToRight,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Chirality> {
        Chirality::ALL.get(i).copied()
    }

    pub fn is_left_mover(self) -> bool {
        matches!(self, Chirality::RightToLeft | Chirality::LeftToLeft)
    }
}

/// The 4×4 coin `U` together with its row split `U = P + R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinMatrix {
    spec: CoinSpec,
    u: Mat4,
    p: Mat4,
    r: Mat4,
}

impl CoinMatrix {
    /// Builds the embedded 4×4 coin from a validated spec.
    pub fn new(spec: CoinSpec) -> Result<Self, CoinError> {
        let defect = spec.unitarity_defect();
        if defect > COIN_UNITARITY_TOL {
            return Err(CoinError::NotUnitary { defect });
        }
        let (a, b, c, d) = (spec.a, spec.b, spec.c, spec.d);
        let mut u = Mat4::zeros();
        u.set(0, 2, a);
        u.set(0, 3, c);
        u.set(1, 0, b);
        u.set(1, 1, d);
        u.set(2, 0, a);
        u.set(2, 1, c);
        u.set(3, 2, b);
        u.set(3, 3, d);

        let mut p = Mat4::zeros();
        let mut r = Mat4::zeros();
        for j in 0..4 {
            p.set(0, j, u.get(0, j));
            p.set(1, j, u.get(1, j));
            r.set(2, j, u.get(2, j));
            r.set(3, j, u.get(3, j));
        }
        Ok(CoinMatrix { spec, u, p, r })
    }

    pub fn grover() -> Self {
        Self::new(CoinSpec::grover()).expect("Grover spec is unitary")
    }

    pub fn hadamard() -> Self {
        Self::new(CoinSpec::hadamard()).expect("Hadamard spec is unitary")
    }

    pub fn spec(&self) -> &CoinSpec {
        &self.spec
    }

    /// The full one-step coin.
    pub fn u(&self) -> &Mat4 {
        &self.u
    }

    /// Left-mover rows of `U` (applied to amplitudes arriving from x+1).
    pub fn p(&self) -> &Mat4 {
        &self.p
    }

    /// Right-mover rows of `U` (applied to amplitudes arriving from x−1).
    pub fn r(&self) -> &Mat4 {
        &self.r
    }
}

/// The d×d Grover diffusion, entries `2/d − δ_ij`.
///
/// Its d = 2 instance `[[0, 1], [1, 0]]` is the 2×2 coin behind
/// [`CoinSpec::grover`].
pub fn grover_diffusion(dim: usize) -> Result<Vec<Vec<f64>>, CoinError> {
    if dim == 0 {
        return Err(CoinError::ZeroDimension);
    }
    let off = 2.0 / dim as f64;
    Ok((0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { off - 1.0 } else { off })
                .collect()
        })
        .collect())
}
