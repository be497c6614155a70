//! Numerical tolerances shared across the crate.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Max-norm bound on `U†U - I` for matrices treated as unitary.
    pub unitarity: f64,
    /// Round-off bound for fixed-size arithmetic identities.
    pub arithmetic: f64,
    /// Max-norm bound on `H - H†` for inputs treated as Hermitian.
    pub hermiticity: f64,
    /// Unitarity defect allowed on the output of a long ordered product.
    pub propagator_unitarity: f64,
    /// Points closer than this to the origin cannot be projected onto the sphere.
    pub origin: f64,
}

pub const TOL: Tolerances = Tolerances {
    unitarity: 1e-10,
    arithmetic: 1e-12,
    hermiticity: 1e-10,
    propagator_unitarity: 1e-8,
    origin: 1e-12,
};
