//! Boundary-condition tables.

use std::fmt;
use std::sync::Arc;

use super::{BoundaryPoint, CollocationSet, Segment};
use crate::error::{Error, Result};
use crate::reaction::ReactionSystem;
use crate::scalar::{Point2, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BcKind {
    /// Dirichlet pressure.
    Pressure,
    /// Prescribed `v·n`.
    NormalVelocity,
    /// Dirichlet concentration.
    Concentration,
    /// Prescribed `−n·(D ∇c)`.
    Flux,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    fn pick<T: Copy>(self, p: Point2<T>) -> T {
        match self {
            Axis::X => p[0],
            Axis::Y => p[1],
        }
    }
}

/// Part of a segment a rule applies to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region<T> {
    All,
    /// `lo ≤ coordinate ≤ hi`.
    Within(Axis, T, T),
    /// Complement of `Within`.
    Outside(Axis, T, T),
    /// `coordinate ≥ v`.
    AtLeast(Axis, T),
    /// `coordinate < v`.
    Below(Axis, T),
}

impl<T: Real> Region<T> {
    pub fn contains(&self, p: Point2<T>) -> bool {
        match *self {
            Region::All => true,
            Region::Within(a, lo, hi) => (lo..=hi).contains(&a.pick(p)),
            Region::Outside(a, lo, hi) => !(lo..=hi).contains(&a.pick(p)),
            Region::AtLeast(a, v) => a.pick(p) >= v,
            Region::Below(a, v) => a.pick(p) < v,
        }
    }
}

pub type ValueFn<T> = Arc<dyn Fn(Point2<T>) -> Result<T> + Send + Sync>;

#[derive(Clone)]
pub enum BcValue<T> {
    Constant(T),
    Field(ValueFn<T>),
}

impl<T: Real> BcValue<T> {
    pub fn at(&self, p: Point2<T>) -> Result<T> {
        match self {
            BcValue::Constant(v) => Ok(*v),
            BcValue::Field(f) => f(p),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for BcValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BcValue::Constant(v) => write!(f, "Constant({v:?})"),
            BcValue::Field(_) => f.write_str("Field(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BcRule<T> {
    pub segment: Segment,
    pub region: Region<T>,
    pub kind: BcKind,
    pub value: BcValue<T>,
}

/// Boundary conditions of one field. Every boundary point must match exactly
/// one rule.
#[derive(Clone, Debug, Default)]
pub struct BcSpec<T> {
    pub rules: Vec<BcRule<T>>,
}

impl<T: Real> BcSpec<T> {
    pub fn new() -> Self {
        Self { rules: Vec::new() }
    }

    pub fn with(mut self, segment: Segment, region: Region<T>, kind: BcKind, value: BcValue<T>) -> Self {
        self.rules.push(BcRule {
            segment,
            region,
            kind,
            value,
        });
        self
    }

    pub fn constant(self, segment: Segment, kind: BcKind, value: T) -> Self {
        self.with(segment, Region::All, kind, BcValue::Constant(value))
    }

    /// The rule governing `b`.
    pub fn rule_for(&self, b: &BoundaryPoint<T>) -> Result<&BcRule<T>> {
        let mut hits = self
            .rules
            .iter()
            .filter(|r| r.segment == b.segment && r.region.contains(b.x));
        let rule = hits.next().ok_or_else(|| {
            Error::config(format!(
                "no boundary condition for {} point ({}, {})",
                b.segment, b.x[0], b.x[1]
            ))
        })?;
        if hits.next().is_some() {
            return Err(Error::config(format!(
                "overlapping boundary conditions at {} point ({}, {})",
                b.segment, b.x[0], b.x[1]
            )));
        }
        Ok(rule)
    }

    /// Kind and prescribed value at `b`.
    pub fn resolve(&self, b: &BoundaryPoint<T>) -> Result<(BcKind, T)> {
        let rule = self.rule_for(b)?;
        Ok((rule.kind, rule.value.at(b.x)?))
    }

    /// Checks that every boundary point of `set` is covered exactly once.
    pub fn check_partition(&self, set: &CollocationSet<T>) -> Result<()> {
        set.boundary.iter().try_for_each(|b| self.rule_for(b).map(|_| ()))
    }
}

/// Unit pressure on the left, zero on the right, no flow through top and
/// bottom.
pub fn flow_bc_vertical_patch<T: Real>() -> BcSpec<T> {
    BcSpec::new()
        .constant(Segment::Left, BcKind::Pressure, T::one())
        .constant(Segment::Right, BcKind::Pressure, T::zero())
        .constant(Segment::Bottom, BcKind::NormalVelocity, T::zero())
        .constant(Segment::Top, BcKind::NormalVelocity, T::zero())
}

/// Unit pressure on the left, a zero-pressure outlet on the middle third of
/// the right side, no flow elsewhere.
pub fn flow_bc_reaction_tank<T: Real>() -> BcSpec<T> {
    let third = T::one() / T::lit(3.0);
    let two_thirds = T::lit(2.0) * third;
    let zero = BcValue::Constant(T::zero());
    BcSpec::new()
        .constant(Segment::Left, BcKind::Pressure, T::one())
        .with(Segment::Right, Region::Within(Axis::Y, third, two_thirds), BcKind::Pressure, zero.clone())
        .with(Segment::Right, Region::Outside(Axis::Y, third, two_thirds), BcKind::NormalVelocity, zero)
        .constant(Segment::Bottom, BcKind::NormalVelocity, T::zero())
        .constant(Segment::Top, BcKind::NormalVelocity, T::zero())
}

/// Boundary conditions of the two invariants `(Ψ_A, Ψ_B)` in the reaction
/// tank: Dirichlet data from the prescribed inlet concentrations on the left,
/// zero flux elsewhere.
pub fn species_bc_reaction_tank<T: Real>(sys: &ReactionSystem<T>) -> [BcSpec<T>; 2] {
    let spec = |component: usize| {
        let sys = sys.clone();
        let inlet = BcValue::Field(Arc::new(move |p: Point2<T>| {
            let inv = sys.invariant_boundary_values(p)?;
            Ok([inv.psi_a, inv.psi_b][component])
        }));
        BcSpec::new()
            .with(Segment::Left, Region::All, BcKind::Concentration, inlet)
            .constant(Segment::Right, BcKind::Flux, T::zero())
            .constant(Segment::Bottom, BcKind::Flux, T::zero())
            .constant(Segment::Top, BcKind::Flux, T::zero())
    };
    [spec(0), spec(1)]
}
