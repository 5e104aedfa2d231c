//! Collocation sets on the unit square and on a square with a centred hole.

mod bc;

use std::fmt;
use std::io::Write as _;
use std::path::Path;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::{Point2, Real};

pub use bc::{
    flow_bc_reaction_tank, flow_bc_vertical_patch, species_bc_reaction_tank, Axis, BcKind, BcRule, BcSpec,
    BcValue, Region,
};

/// Boundary segment tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Segment {
    Left,
    Right,
    Bottom,
    Top,
    /// Outer perimeter of the square with a hole.
    Outer,
    /// Hole perimeter.
    Inner,
}

impl Segment {
    pub fn name(self) -> &'static str {
        match self {
            Segment::Left => "left",
            Segment::Right => "right",
            Segment::Bottom => "bottom",
            Segment::Top => "top",
            Segment::Outer => "outer",
            Segment::Inner => "inner",
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint<T> {
    pub x: Point2<T>,
    /// Outward unit normal of the material domain.
    pub normal: [T; 2],
    pub segment: Segment,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollocationSet<T> {
    pub interior: Vec<Point2<T>>,
    pub boundary: Vec<BoundaryPoint<T>>,
    /// Lattice spacing.
    pub spacing: T,
}

impl<T: Real> CollocationSet<T> {
    pub fn len(&self) -> usize {
        self.interior.len() + self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Interior points followed by boundary points.
    pub fn all_points(&self) -> Vec<Point2<T>> {
        self.interior
            .iter()
            .copied()
            .chain(self.boundary.iter().map(|b| b.x))
            .collect()
    }

    pub fn boundary_on(&self, segment: Segment) -> impl Iterator<Item = &BoundaryPoint<T>> {
        self.boundary.iter().filter(move |b| b.segment == segment)
    }

    /// Moves interior points closer than half a spacing to an interface onto
    /// its high side, exactly half a spacing away.
    ///
    /// `interface` returns a signed distance (negative on the low side) and the
    /// unit normal pointing to the high side.
    pub fn offset_from_interface(&mut self, interface: impl Fn(Point2<T>) -> (T, [T; 2])) {
        let half = self.spacing * T::lit(0.5);
        // lattice points sitting exactly half a spacing away must not move
        let tol = self.spacing * T::lit(1e-9);
        for p in &mut self.interior {
            let (d, n) = interface(*p);
            if d.abs() < half - tol {
                let shift = half - d;
                *p = [p[0] + shift * n[0], p[1] + shift * n[1]];
            }
        }
    }

    /// Debug export: `x,y,tag` with tag `interior` or the segment name.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "x,y,tag")?;
        for p in &self.interior {
            writeln!(out, "{:.17e},{:.17e},interior", p[0], p[1])?;
        }
        for b in &self.boundary {
            writeln!(out, "{:.17e},{:.17e},{}", b.x[0], b.x[1], b.segment)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn lattice<T: Real>(n: usize) -> Vec<T> {
    let h = T::one() / T::lit((n - 1) as f64);
    (0..n).map(|i| if i == n - 1 { T::one() } else { T::lit(i as f64) * h }).collect()
}

/// Uniform `n × n` lattice on the unit square.
///
/// Points are ordered row by row (y outer, x inner). Corners go to the first
/// matching segment of left, right, bottom, top.
pub fn unit_square_grid<T: Real>(n_side: usize) -> Result<CollocationSet<T>> {
    if n_side < 3 {
        return Err(Error::config(format!("grid needs at least 3 points per side, got {n_side}")));
    }
    let coords = lattice::<T>(n_side);
    let last = n_side - 1;
    let (zero, one) = (T::zero(), T::one());
    let mut interior = Vec::with_capacity((n_side - 2) * (n_side - 2));
    let mut boundary = Vec::with_capacity(4 * last);
    for j in 0..n_side {
        for i in 0..n_side {
            let x = [coords[i], coords[j]];
            let tagged = if i == 0 {
                Some((Segment::Left, [-one, zero]))
            } else if i == last {
                Some((Segment::Right, [one, zero]))
            } else if j == 0 {
                Some((Segment::Bottom, [zero, -one]))
            } else if j == last {
                Some((Segment::Top, [zero, one]))
            } else {
                None
            };
            match tagged {
                Some((segment, normal)) => boundary.push(BoundaryPoint { x, normal, segment }),
                None => interior.push(x),
            }
        }
    }
    Ok(CollocationSet {
        interior,
        boundary,
        spacing: one / T::lit(last as f64),
    })
}

/// Unit square lattice with the centred square `[0.5 − s/2, 0.5 + s/2]²`
/// removed.
///
/// Lattice points strictly inside the hole are dropped. The hole perimeter is
/// sampled exactly at the lattice density, starting from each hole corner and
/// running counter-clockwise; its normals point into the hole.
pub fn square_with_hole<T: Real>(n_side: usize, hole_side: T) -> Result<CollocationSet<T>> {
    if !(hole_side > T::zero() && hole_side < T::one()) {
        return Err(Error::config(format!("hole side must lie in (0, 1), got {hole_side}")));
    }
    let grid = unit_square_grid::<T>(n_side)?;
    let half = T::lit(0.5);
    let lo = half - hole_side * half;
    let hi = half + hole_side * half;
    let inside = |p: &Point2<T>| p[0] > lo && p[0] < hi && p[1] > lo && p[1] < hi;

    let interior = grid.interior.into_iter().filter(|p| !inside(p)).collect();
    let mut boundary: Vec<BoundaryPoint<T>> = grid
        .boundary
        .into_iter()
        .map(|b| BoundaryPoint {
            segment: Segment::Outer,
            ..b
        })
        .collect();

    let per_side = Float::round(hole_side / grid.spacing).to_usize().unwrap_or(0);
    if per_side > 0 {
        let step = hole_side / T::lit(per_side as f64);
        let (zero, one) = (T::zero(), T::one());
        // (start corner, direction, normal into the hole)
        let sides = [
            ([lo, lo], [one, zero], [zero, one]),
            ([hi, lo], [zero, one], [-one, zero]),
            ([hi, hi], [-one, zero], [zero, -one]),
            ([lo, hi], [zero, -one], [one, zero]),
        ];
        for (start, dir, normal) in sides {
            for k in 0..per_side {
                let t = T::lit(k as f64) * step;
                boundary.push(BoundaryPoint {
                    x: [start[0] + t * dir[0], start[1] + t * dir[1]],
                    normal,
                    segment: Segment::Inner,
                });
            }
        }
    }
    Ok(CollocationSet {
        interior,
        boundary,
        spacing: grid.spacing,
    })
}
