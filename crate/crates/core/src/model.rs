//! The four-level tripod system: control parameters, Hamiltonian, dark
//! states, computational-subspace operators and the target holonomy.
//!
//! Basis order is fixed globally: `|0⟩, |1⟩, |a⟩, |e⟩` map to indices
//! 0..3, so the computational qubit is always the top-left 2x2 block.

use std::ops::{Add, Sub};

use num_complex::Complex64 as C64;

use crate::linalg::CMat;

/// Index assignment of the level basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(usize)]
pub enum Level {
    Zero = 0,
    One = 1,
    Ancilla = 2,
    Excited = 3,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::Zero, Level::One, Level::Ancilla, Level::Excited];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn ket(self) -> [C64; 4] {
        let mut v = [C64::new(0.0, 0.0); 4];
        v[self.index()] = C64::new(1.0, 0.0);
        v
    }
}

/// Complex Rabi amplitudes `(x, y, z)` coupling `|0⟩, |1⟩, |a⟩` to `|e⟩`,
/// in units of `Ω`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamPoint {
    pub x: C64,
    pub y: C64,
    pub z: C64,
}

impl ParamPoint {
    pub const fn new(x: C64, y: C64, z: C64) -> Self {
        Self { x, y, z }
    }

    pub const fn real(x: f64, y: f64, z: f64) -> Self {
        Self::new(C64::new(x, 0.0), C64::new(y, 0.0), C64::new(z, 0.0))
    }

    pub const fn zero() -> Self {
        Self::real(0.0, 0.0, 0.0)
    }

    pub fn components(&self) -> [C64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_components(c: [C64; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }

    /// `|x|² + |y|² + |z|²`
    pub fn norm_sqr(&self) -> f64 {
        self.x.norm_sqr() + self.y.norm_sqr() + self.z.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.components()
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        (*self - *other)
            .components()
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

impl Add for ParamPoint {
    type Output = ParamPoint;
    fn add(self, o: ParamPoint) -> ParamPoint {
        ParamPoint::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for ParamPoint {
    type Output = ParamPoint;
    fn sub(self, o: ParamPoint) -> ParamPoint {
        ParamPoint::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

/// `H = |e⟩(x⟨0| + y⟨1| + z⟨a|) + h.c.`
pub fn hamiltonian(p: &ParamPoint) -> CMat {
    let mut h = CMat::zeros(4);
    let e = Level::Excited.index();
    for (i, c) in p.components().into_iter().enumerate() {
        h[(e, i)] = c;
        h[(i, e)] = c.conj();
    }
    h
}

/// Point on the sphere of radius `omega_amp` at polar angle `theta` and
/// azimuth `phi`.
pub fn polar_to_cartesian(omega_amp: f64, theta: f64, phi: f64) -> ParamPoint {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    ParamPoint::real(omega_amp * st * cp, omega_amp * st * sp, omega_amp * ct)
}

/// The two zero-energy eigenstates at `(theta, phi)`, in the gauge that
/// reduces to `(|0⟩, |1⟩)` at the north pole.
pub fn dark_states(theta: f64, phi: f64) -> ([C64; 4], [C64; 4]) {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let r = |v: f64| C64::new(v, 0.0);
    let psi0 = [r(ct * cp), r(ct * sp), r(-st), r(0.0)];
    let psi1 = [r(-sp), r(cp), r(0.0), r(0.0)];
    (psi0, psi1)
}

/// Projector onto the computational subspace and the Pauli matrices acting
/// on it, each embedded in the four-level space.
#[derive(Clone, Copy, Debug)]
pub struct ComputationalOps {
    pub p0: CMat,
    pub sigma: [CMat; 3],
}

pub fn pauli() -> [CMat; 3] {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        CMat::from_rows(&[[o, l], [l, o]]),
        CMat::from_rows(&[[o, -i], [i, o]]),
        CMat::from_rows(&[[l, o], [o, -l]]),
    ]
}

pub fn computational_ops() -> ComputationalOps {
    let [sx, sy, sz] = pauli();
    ComputationalOps {
        p0: CMat::identity(2).embed(),
        sigma: [sx.embed(), sy.embed(), sz.embed()],
    }
}

/// Ideal holonomy `W = exp(−i σ_y ω)` for a loop enclosing solid angle `ω`.
#[derive(Clone, Copy, Debug)]
pub struct HolonomyTarget {
    pub omega: f64,
    pub w: CMat,
}

impl HolonomyTarget {
    /// `W` placed on the computational block, zero on `|a⟩, |e⟩`.
    pub fn embedded(&self) -> CMat {
        self.w.embed()
    }
}

pub fn holonomy_target(omega: f64) -> HolonomyTarget {
    let sy = pauli()[1];
    let w =
        CMat::identity(2).scale(C64::new(omega.cos(), 0.0)) + sy.scale(C64::new(0.0, -omega.sin()));
    HolonomyTarget { omega, w }
}
