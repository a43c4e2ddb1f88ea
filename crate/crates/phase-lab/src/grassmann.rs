//! Finite Grassmann algebra over the generator pair (ζ, ζ̄) with complex
//! coefficients, in the fixed basis {1, ζ, ζ̄, ζ̄ζ}.
//!
//! The fermionic coherent-state calculus only ever needs one constant
//! Grassmann pair, so the four-dimensional algebra is hard-wired rather than
//! generated. Products respect ζ² = ζ̄² = 0 and ζζ̄ = −ζ̄ζ; anything carrying
//! three or more generators vanishes identically.

use crate::linops::{C64, ComplexMatrix};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GrassmannError {
    #[error("element has a nonzero odd part (|ζ| = {cz:.3e}, |ζ̄| = {czb:.3e})")]
    OddElement { cz: f64, czb: f64 },
    #[error("body too small for arg ({body:.3e})")]
    ZeroBody { body: f64 },
    #[error("matrix exponential series did not converge (tail {tail:.3e})")]
    SeriesNotConverged { tail: f64 },
}

/// Element `c0·1 + cz·ζ + czb·ζ̄ + czz·ζ̄ζ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrassmannElement {
    pub c0: C64,
    pub cz: C64,
    pub czb: C64,
    pub czz: C64,
}

impl GrassmannElement {
    pub const fn new(c0: C64, cz: C64, czb: C64, czz: C64) -> Self {
        Self { c0, cz, czb, czz }
    }

    pub fn zero() -> Self {
        Self::from_complex(C64::new(0.0, 0.0))
    }

    pub fn one() -> Self {
        Self::from_complex(C64::new(1.0, 0.0))
    }

    pub fn from_complex(c0: C64) -> Self {
        let z = C64::new(0.0, 0.0);
        Self { c0, cz: z, czb: z, czz: z }
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_complex(C64::new(x, 0.0))
    }

    /// The generator ζ.
    pub fn zeta() -> Self {
        let z = C64::new(0.0, 0.0);
        Self { c0: z, cz: C64::new(1.0, 0.0), czb: z, czz: z }
    }

    /// The generator ζ̄.
    pub fn zeta_bar() -> Self {
        let z = C64::new(0.0, 0.0);
        Self { c0: z, cz: z, czb: C64::new(1.0, 0.0), czz: z }
    }

    /// The even nilpotent ζ̄ζ.
    pub fn zeta_bar_zeta() -> Self {
        let z = C64::new(0.0, 0.0);
        Self { c0: z, cz: z, czb: z, czz: C64::new(1.0, 0.0) }
    }

    pub fn is_even(&self) -> bool {
        self.odd_norm() == 0.0
    }

    /// L1 size of the odd part.
    pub fn odd_norm(&self) -> f64 {
        self.cz.norm() + self.czb.norm()
    }

    /// L1 size over the whole basis.
    pub fn l1_norm(&self) -> f64 {
        self.c0.norm() + self.cz.norm() + self.czb.norm() + self.czz.norm()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            c0: self.c0 + rhs.c0,
            cz: self.cz + rhs.cz,
            czb: self.czb + rhs.czb,
            czz: self.czz + rhs.czz,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            c0: self.c0 - rhs.c0,
            cz: self.cz - rhs.cz,
            czb: self.czb - rhs.czb,
            czz: self.czz - rhs.czz,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { c0: self.c0 * s, cz: self.cz * s, czb: self.czb * s, czz: self.czz * s }
    }
}

/// Product of two algebra elements.
///
/// Bilinear, associative, and respects the sign rules of the generators;
/// `ζζ̄` is normalized to `−ζ̄ζ`.
pub fn g_mul(a: &GrassmannElement, b: &GrassmannElement) -> GrassmannElement {
    GrassmannElement {
        c0: a.c0 * b.c0,
        cz: a.c0 * b.cz + a.cz * b.c0,
        czb: a.c0 * b.czb + a.czb * b.c0,
        // ζ̄·ζ = +ζ̄ζ, ζ·ζ̄ = −ζ̄ζ.
        czz: a.c0 * b.czz + a.czz * b.c0 + a.czb * b.cz - a.cz * b.czb,
    }
}

/// Exponential of an even element: `exp(c0 + czz ζ̄ζ) = e^{c0}(1 + czz ζ̄ζ)`.
///
/// The series terminates because `(ζ̄ζ)² = 0`.
pub fn g_exp_even(g: &GrassmannElement) -> Result<GrassmannElement, GrassmannError> {
    require_even(g)?;
    let body = g.c0.exp();
    Ok(GrassmannElement {
        c0: body,
        cz: C64::new(0.0, 0.0),
        czb: C64::new(0.0, 0.0),
        czz: body * g.czz,
    })
}

/// Argument of an even element, via the imaginary part of the formal
/// logarithm: `arg(g) = arg(c0) + Im(czz/c0)·ζ̄ζ`, body in `(−π, π]`.
pub fn g_arg_even(g: &GrassmannElement) -> Result<GrassmannElement, GrassmannError> {
    require_even(g)?;
    let body = g.c0.norm();
    if body < 1e-300 {
        return Err(GrassmannError::ZeroBody { body });
    }
    let soul = (g.czz / g.c0).im;
    Ok(GrassmannElement {
        c0: C64::new(g.c0.arg(), 0.0),
        cz: C64::new(0.0, 0.0),
        czb: C64::new(0.0, 0.0),
        czz: C64::new(soul, 0.0),
    })
}

fn require_even(g: &GrassmannElement) -> Result<(), GrassmannError> {
    // Tolerate roundoff residue from closed-loop cancellations.
    let scale = g.l1_norm().max(1.0);
    if g.odd_norm() > 1e-9 * scale {
        return Err(GrassmannError::OddElement { cz: g.cz.norm(), czb: g.czb.norm() });
    }
    Ok(())
}

/// Square matrix over the Grassmann algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannMatrix {
    dim: usize,
    entries: Vec<GrassmannElement>,
}

impl GrassmannMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![GrassmannElement::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = GrassmannElement::one();
        }
        m
    }

    /// Lift a complex matrix into the body.
    pub fn from_complex(m: &ComplexMatrix) -> Self {
        let dim = m.dim();
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                out.entries[i * dim + j] = GrassmannElement::from_complex(m[(i, j)]);
            }
        }
        out
    }

    /// Complex matrix scaled by a single algebra element.
    pub fn from_complex_scaled(m: &ComplexMatrix, g: &GrassmannElement) -> Self {
        let dim = m.dim();
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                out.entries[i * dim + j] = g.scale(m[(i, j)]);
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &GrassmannElement {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, g: GrassmannElement) {
        self.entries[i * self.dim + j] = g;
    }

    /// Body (coefficient of 1) as a complex matrix.
    pub fn body(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, |i, j| self.entries[i * self.dim + j].c0)
    }

    /// ζ̄ζ coefficients as a complex matrix.
    pub fn soul_zz(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, |i, j| self.entries[i * self.dim + j].czz)
    }

    /// Largest odd-part entry.
    pub fn odd_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.odd_norm()).fold(0.0, f64::max)
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.l1_norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|e| e.scale(s)).collect() }
    }

    pub fn scale_g(&self, g: &GrassmannElement) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|e| g_mul(e, g)).collect() }
    }
}

/// Matrix product over the Grassmann ring.
pub fn gm_mul(a: &GrassmannMatrix, b: &GrassmannMatrix) -> GrassmannMatrix {
    assert_eq!(a.dim, b.dim, "Grassmann matrix product dimension mismatch");
    let n = a.dim;
    let mut out = GrassmannMatrix::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = &a.entries[i * n + k];
            if aik.l1_norm() == 0.0 {
                continue;
            }
            for j in 0..n {
                let prod = g_mul(aik, &b.entries[k * n + j]);
                out.entries[i * n + j] = out.entries[i * n + j].add(&prod);
            }
        }
    }
    out
}

/// Ring trace (sum of diagonal entries).
pub fn gm_trace(a: &GrassmannMatrix) -> GrassmannElement {
    let mut acc = GrassmannElement::zero();
    for i in 0..a.dim {
        acc = acc.add(&a.entries[i * a.dim + i]);
    }
    acc
}

/// Matrix exponential by the power series; generator nilpotency makes it
/// terminate after a handful of terms. Capped at 12 terms with a tail check.
pub fn gm_exp(a: &GrassmannMatrix) -> Result<GrassmannMatrix, GrassmannError> {
    let mut out = GrassmannMatrix::identity(a.dim);
    let mut term = GrassmannMatrix::identity(a.dim);
    let mut tail = f64::INFINITY;
    for j in 1..=12 {
        term = gm_mul(a, &term).scale(C64::new(1.0 / j as f64, 0.0));
        out = out.add(&term);
        tail = term.l1_norm();
        if tail <= 1e-14 * out.l1_norm().max(1.0) {
            return Ok(out);
        }
    }
    if tail > 1e-14 * out.l1_norm().max(1.0) {
        return Err(GrassmannError::SeriesNotConverged { tail });
    }
    Ok(out)
}
