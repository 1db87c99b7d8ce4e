//! The map interface shared by model families and the local snake model.

use crate::error::Result;
use crate::sympl::SymplecticMatrix;

/// Per-coordinate phase-space topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CoordKind {
    /// Reduced mod 1 to `[0, 1)`; distances wrap.
    Torus,
    /// Plain real coordinate.
    Plane,
}

/// A discrete-time symplectic dynamical system on `R^{2n}` (possibly with
/// torus coordinates).
pub trait Dynamics {
    fn dim_half(&self) -> usize;

    fn dim(&self) -> usize {
        2 * self.dim_half()
    }

    /// Topology of each of the `2n` coordinates.
    fn topology(&self) -> &[CoordKind];

    /// One forward step, written into `out` (torus reduction applied).
    fn step(&self, point: &[f64], out: &mut [f64]) -> Result<()>;

    /// Exact Jacobian at `point`.
    fn jacobian(&self, point: &[f64]) -> Result<SymplecticMatrix>;

    /// Convenience allocating step.
    fn evaluate(&self, point: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; point.len()];
        self.step(point, &mut out)?;
        Ok(out)
    }

    /// Sup-metric respecting per-coordinate topology.
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let topo = self.topology();
        a.iter()
            .zip(b.iter())
            .zip(topo.iter())
            .map(|((x, y), kind)| coord_distance(*x, *y, *kind))
            .fold(0.0, f64::max)
    }
}

pub fn coord_distance(x: f64, y: f64, kind: CoordKind) -> f64 {
    match kind {
        CoordKind::Plane => (x - y).abs(),
        CoordKind::Torus => {
            let d = (x - y).rem_euclid(1.0);
            d.min(1.0 - d)
        }
    }
}

/// Signed displacement `y - x` through the nearest image.
pub fn coord_displacement(x: f64, y: f64, kind: CoordKind) -> f64 {
    match kind {
        CoordKind::Plane => y - x,
        CoordKind::Torus => {
            let mut d = (y - x).rem_euclid(1.0);
            if d >= 0.5 {
                d -= 1.0;
            }
            d
        }
    }
}

pub fn reduce(point: &mut [f64], topo: &[CoordKind]) {
    for (v, kind) in point.iter_mut().zip(topo.iter()) {
        if *kind == CoordKind::Torus {
            *v = v.rem_euclid(1.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_distance_wraps() {
        assert!((coord_distance(0.05, 0.95, CoordKind::Torus) - 0.1).abs() < 1e-15);
        assert!((coord_displacement(0.05, 0.95, CoordKind::Torus) + 0.1).abs() < 1e-15);
        assert!((coord_distance(0.05, 0.95, CoordKind::Plane) - 0.9).abs() < 1e-15);
    }
}
