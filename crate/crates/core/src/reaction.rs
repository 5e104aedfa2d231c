//! Chemical invariants and the fast-reaction closure for `n_A A + n_B B → n_C C`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::network::NetworkParams;
use crate::scalar::{Point2, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stoichiometry<T> {
    pub n_a: T,
    pub n_b: T,
    pub n_c: T,
}

impl<T: Real> Stoichiometry<T> {
    pub fn new(n_a: T, n_b: T, n_c: T) -> Result<Self> {
        let s = Self { n_a, n_b, n_c };
        if !(n_a > T::zero() && n_b > T::zero() && n_c > T::zero()) {
            return Err(Error::Input(format!(
                "stoichiometric coefficients must be > 0, got ({n_a}, {n_b}, {n_c})"
            )));
        }
        Ok(s)
    }
}

/// Prescribed `(c_A, c_B, c_C)` on the Dirichlet boundary.
pub type Prescription<T> = Arc<dyn Fn(Point2<T>) -> [T; 3] + Send + Sync>;

#[derive(Clone)]
pub struct ReactionSystem<T> {
    pub stoich: Stoichiometry<T>,
    pub prescription: Prescription<T>,
}

impl<T: Real> fmt::Debug for ReactionSystem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReactionSystem")
            .field("stoich", &self.stoich)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantPair<T> {
    pub psi_a: T,
    pub psi_b: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpeciesTriple<T> {
    pub c_a: T,
    pub c_b: T,
    pub c_c: T,
}

impl<T: Real> ReactionSystem<T> {
    pub fn new(stoich: Stoichiometry<T>, prescription: impl Fn(Point2<T>) -> [T; 3] + Send + Sync + 'static) -> Self {
        Self {
            stoich,
            prescription: Arc::new(prescription),
        }
    }

    /// `A + 2B → C` with pure A entering through the upper half of the left
    /// side and pure B through the lower half. `y = 0.5` belongs to A.
    pub fn tank_default() -> Self {
        let (one, two) = (T::one(), T::lit(2.0));
        Self::tank(Stoichiometry { n_a: one, n_b: two, n_c: one })
    }

    pub fn tank(stoich: Stoichiometry<T>) -> Self {
        let half = T::lit(0.5);
        Self::new(stoich, move |p: Point2<T>| {
            let (zero, one) = (T::zero(), T::one());
            if p[1] >= half {
                [one, zero, zero]
            } else {
                [zero, one, zero]
            }
        })
    }

    /// `(Ψ_A, Ψ_B)` of the prescribed concentrations at `x_b`.
    pub fn invariant_boundary_values(&self, x_b: Point2<T>) -> Result<InvariantPair<T>> {
        let c = (self.prescription)(x_b);
        if c.iter().any(|v| !(*v >= T::zero())) {
            return Err(Error::Input(format!(
                "prescribed concentrations ({}, {}, {}) at ({}, {}) must be >= 0",
                c[0], c[1], c[2], x_b[0], x_b[1]
            )));
        }
        Ok(invariants(&self.stoich, SpeciesTriple { c_a: c[0], c_b: c[1], c_c: c[2] }))
    }

    pub fn species_from_invariants(&self, inv: InvariantPair<T>) -> SpeciesTriple<T> {
        species_from_invariants(&self.stoich, inv)
    }
}

/// `Ψ_A = c_A + (n_A/n_C) c_C`, `Ψ_B = c_B + (n_B/n_C) c_C`.
pub fn invariants<T: Real>(s: &Stoichiometry<T>, c: SpeciesTriple<T>) -> InvariantPair<T> {
    InvariantPair {
        psi_a: c.c_a + s.n_a / s.n_c * c.c_c,
        psi_b: c.c_b + s.n_b / s.n_c * c.c_c,
    }
}

/// Fast-reaction closure: A and B never coexist.
pub fn species_from_invariants<T: Real>(s: &Stoichiometry<T>, inv: InvariantPair<T>) -> SpeciesTriple<T> {
    let d = s.n_b * inv.psi_a - s.n_a * inv.psi_b;
    let c_a = d.max(T::zero()) / s.n_b;
    let c_b = (-d).max(T::zero()) / s.n_a;
    let c_c = s.n_c / s.n_a * (inv.psi_a - c_a);
    SpeciesTriple { c_a, c_b, c_c }
}

/// Species concentrations at `points`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpeciesFields<T> {
    pub c_a: Vec<T>,
    pub c_b: Vec<T>,
    pub c_c: Vec<T>,
}

/// Evaluates both invariant networks at `points` and applies the closure.
pub fn reconstruct_fields<T: Real>(
    sys: &ReactionSystem<T>,
    psi_a_net: &NetworkParams<T>,
    psi_b_net: &NetworkParams<T>,
    points: &[Point2<T>],
) -> Result<SpeciesFields<T>> {
    let mut fields = SpeciesFields {
        c_a: Vec::with_capacity(points.len()),
        c_b: Vec::with_capacity(points.len()),
        c_c: Vec::with_capacity(points.len()),
    };
    for &p in points {
        let inv = InvariantPair {
            psi_a: psi_a_net.eval(p)[0],
            psi_b: psi_b_net.eval(p)[0],
        };
        if !(inv.psi_a.is_finite() && inv.psi_b.is_finite()) {
            return Err(Error::NonFinite {
                what: "invariant",
                x: p[0].to_f64_lossy(),
                y: p[1].to_f64_lossy(),
            });
        }
        let c = sys.species_from_invariants(inv);
        fields.c_a.push(c.c_a);
        fields.c_b.push(c.c_b);
        fields.c_c.push(c.c_c);
    }
    Ok(fields)
}
