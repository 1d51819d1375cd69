//! Two-objective Pareto machinery: dominance, front extraction, exact
//! hypervolume by sweep, hypervolume increments and the staircase
//! decomposition of the region not dominated by a front.
//!
//! Both coordinates are minimised. The functions work on any points in the
//! plane, so the same code serves the original (ε, error) space and the
//! transformed space the surrogates live in.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::objective::ObjectivePoint;

/// Weak dominance: `u` is no worse than `v` in both coordinates.
pub fn dominates(u: &ObjectivePoint, v: &ObjectivePoint) -> bool {
    u.epsilon <= v.epsilon && u.error <= v.error
}

/// The hypervolume reference point; every counted front point must dominate it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntiIdealPoint {
    pub epsilon_max: f64,
    pub error_max: f64,
}

impl AntiIdealPoint {
    pub const fn new(epsilon_max: f64, error_max: f64) -> Self {
        Self {
            epsilon_max,
            error_max,
        }
    }

    fn bounds(&self, p: &ObjectivePoint) -> bool {
        p.epsilon <= self.epsilon_max && p.error <= self.error_max
    }
}

impl Default for AntiIdealPoint {
    fn default() -> Self {
        Self::new(10.0, 1.0)
    }
}

/// Non-dominated points sorted by ascending ε (hence strictly descending error).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    points: Vec<ObjectivePoint>,
}

impl ParetoFront {
    pub fn points(&self) -> &[ObjectivePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ObjectivePoint> {
        self.points.iter()
    }

    /// Whether some front point weakly dominates `v`.
    pub fn dominates_point(&self, v: &ObjectivePoint) -> bool {
        // The last front point with epsilon <= v.epsilon has the lowest error
        // among the candidates.
        let k = self.points.partition_point(|p| p.epsilon <= v.epsilon);
        k > 0 && self.points[k - 1].error <= v.error
    }

    /// Writes `epsilon,error` CSV rows in ascending ε.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "epsilon,error")?;
        for p in &self.points {
            writeln!(w, "{},{}", p.epsilon, p.error)?;
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a ParetoFront {
    type Item = &'a ObjectivePoint;
    type IntoIter = std::slice::Iter<'a, ObjectivePoint>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Extracts the non-dominated subset. Exact duplicates are collapsed first,
/// and NaN coordinates are dropped.
pub fn pareto_front<'a, I>(points: I) -> ParetoFront
where
    I: IntoIterator<Item = &'a ObjectivePoint>,
{
    let mut pts: Vec<ObjectivePoint> = points
        .into_iter()
        .filter(|p| !p.epsilon.is_nan() && !p.error.is_nan())
        .copied()
        .collect();
    pts.sort_by(|a, b| {
        a.epsilon
            .total_cmp(&b.epsilon)
            .then(a.error.total_cmp(&b.error))
    });
    pts.dedup();
    let mut front: Vec<ObjectivePoint> = Vec::new();
    for p in pts {
        // Sorted by (eps, err): p is dominated iff some kept point has error <= p.error,
        // and the last kept point has the smallest error so far.
        match front.last() {
            Some(last) if last.error <= p.error => {}
            _ => front.push(p),
        }
    }
    ParetoFront { points: front }
}

/// Area dominated by `front` and bounded above by `anti`. Points that do not
/// dominate the anti-ideal point contribute nothing.
pub fn hypervolume(front: &ParetoFront, anti: &AntiIdealPoint) -> f64 {
    let mut area = 0.0;
    let mut prev_err = anti.error_max;
    for p in front.iter().filter(|p| anti.bounds(p)) {
        area += (anti.epsilon_max - p.epsilon) * (prev_err - p.error);
        prev_err = p.error;
    }
    area
}

/// `HV(PF(front ∪ {v})) − HV(front)`; zero when `v` is dominated or outside the box.
pub fn hv_increment(front: &ParetoFront, v: &ObjectivePoint, anti: &AntiIdealPoint) -> f64 {
    if !anti.bounds(v) || front.dominates_point(v) {
        return 0.0;
    }
    // Exclusive area of v: the rectangle [v, anti] minus what the front already covers.
    // Only in-box front points with eps > v.eps and err < ... matter; sweep them directly.
    let mut gain = 0.0;
    let mut eps_lo = v.epsilon;
    let mut err_cap = anti.error_max;
    // Front points with eps <= v.eps cap the error band v can add to.
    for p in front.iter().filter(|p| anti.bounds(p)) {
        if p.epsilon <= v.epsilon {
            err_cap = err_cap.min(p.error);
        }
    }
    // Walk points to the right of v in ascending eps; each shrinks the band.
    for p in front.iter().filter(|p| anti.bounds(p) && p.epsilon > v.epsilon) {
        if p.error >= err_cap {
            continue;
        }
        if p.error <= v.error {
            gain += (p.epsilon - eps_lo) * (err_cap - v.error);
            return gain.max(0.0);
        }
        gain += (p.epsilon - eps_lo) * (err_cap - v.error);
        eps_lo = p.epsilon;
        err_cap = p.error;
    }
    gain += (anti.epsilon_max - eps_lo) * (err_cap - v.error);
    gain.max(0.0)
}

/// An axis-aligned box; lower edges may be `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub lower: [f64; 2],
    pub upper: [f64; 2],
}

impl Cell {
    /// Half-open membership `lower <= p < upper`.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        (0..2).all(|j| p[j] >= self.lower[j] && p[j] < self.upper[j])
    }
}

/// Interior-disjoint cells covering `{v ⪯ anti : v not dominated by front}`,
/// extended to `-inf` below. A front with `n` in-box points yields `n + 1` cells
/// (degenerate zero-width cells are dropped).
pub fn nondominated_cells(front: &ParetoFront, anti: &AntiIdealPoint) -> Vec<Cell> {
    let pts: Vec<&ObjectivePoint> = front.iter().filter(|p| anti.bounds(p)).collect();
    let ninf = f64::NEG_INFINITY;
    let mut cells = Vec::with_capacity(pts.len() + 1);
    let first_eps = pts.first().map_or(anti.epsilon_max, |p| p.epsilon);
    cells.push(Cell {
        lower: [ninf, ninf],
        upper: [first_eps, anti.error_max],
    });
    for (i, p) in pts.iter().enumerate() {
        let right = pts.get(i + 1).map_or(anti.epsilon_max, |q| q.epsilon);
        cells.push(Cell {
            lower: [p.epsilon, ninf],
            upper: [right, p.error],
        });
    }
    cells.retain(|c| c.lower[0] < c.upper[0] && c.lower[1] < c.upper[1]);
    cells
}
