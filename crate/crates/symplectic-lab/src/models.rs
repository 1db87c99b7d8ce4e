//! Concrete symplectic map families with exact Jacobians, Newton
//! periodic-orbit detection, and the periodic-orbit exponent-sum estimator.
//!
//! Conventions: torus coordinates are reduced mod 1 to `[0, 1)`; the standard
//! map is the kick-then-drift form
//! `y' = y + (k/2π) sin(2πx)`, `x' = x + y'`, which keeps all golden values
//! in the tests stable. Coupled standard maps add a symmetric
//! `±(c/2π) sin(2π(x₁-x₂))` momentum kick derived from a generating
//! potential, so the 4D family is exactly symplectic for every coupling.

use std::f64::consts::TAU;

use nalgebra::DMatrix;

use crate::cocycle::Word;
use crate::dynamics::{coord_displacement, reduce, CoordKind, Dynamics};
use crate::error::{Error, Result};
use crate::par::parallel_map;
use crate::snake::SnakeMapModel;
use crate::sympl::{
    classify_periodic, lyapunov_vector_periodic, word_product, Classification, LyapunovVector,
    Spectrum, SymplecticMatrix,
};

#[derive(Debug, Clone)]
pub enum Family {
    StandardMap { k: f64 },
    CoupledStandardMaps { k1: f64, k2: f64, c: f64 },
    TorusAutomorphism { matrix: DMatrix<f64> },
    SnakeComposed { model: Box<SnakeMapModel> },
}

/// A symplectic map model with per-coordinate phase-space topology.
#[derive(Debug, Clone)]
pub struct MapModel {
    family: Family,
    dim_half: usize,
    topology: Vec<CoordKind>,
}

impl MapModel {
    pub fn standard_map(k: f64) -> Self {
        Self {
            family: Family::StandardMap { k },
            dim_half: 1,
            topology: vec![CoordKind::Torus; 2],
        }
    }

    pub fn coupled_standard_maps(k1: f64, k2: f64, c: f64) -> Self {
        Self {
            family: Family::CoupledStandardMaps { k1, k2, c },
            dim_half: 2,
            topology: vec![CoordKind::Torus; 4],
        }
    }

    /// Integer symplectic matrix acting on the torus. Validates integrality
    /// and symplecticity.
    pub fn torus_automorphism(matrix: DMatrix<f64>) -> Result<Self> {
        for v in matrix.iter() {
            if (v - v.round()).abs() > 1e-9 {
                return Err(Error::Construction(format!(
                    "torus automorphism entries must be integers, got {v}"
                )));
            }
        }
        let checked = SymplecticMatrix::new(matrix.clone(), 1e-9)?;
        let n = checked.dim_half();
        Ok(Self {
            family: Family::TorusAutomorphism { matrix },
            dim_half: n,
            topology: vec![CoordKind::Torus; 2 * n],
        })
    }

    /// The local homoclinic model with its snake shear applied; plane
    /// topology.
    pub fn snake_composed(model: SnakeMapModel) -> Self {
        let n = model.dim_half();
        Self {
            family: Family::SnakeComposed {
                model: Box::new(model),
            },
            dim_half: n,
            topology: vec![CoordKind::Plane; 2 * n],
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }
}

impl Dynamics for MapModel {
    fn dim_half(&self) -> usize {
        self.dim_half
    }

    fn topology(&self) -> &[CoordKind] {
        &self.topology
    }

    fn step(&self, point: &[f64], out: &mut [f64]) -> Result<()> {
        if point.len() != 2 * self.dim_half {
            return Err(Error::Dimension {
                expected: 2 * self.dim_half,
                got: point.len(),
            });
        }
        if !point.iter().all(|v| v.is_finite()) {
            return Err(Error::Numeric("non-finite phase point".into()));
        }
        match &self.family {
            Family::StandardMap { k } => {
                let (x, y) = (point[0], point[1]);
                let y1 = y + k / TAU * (TAU * x).sin();
                out[0] = x + y1;
                out[1] = y1;
            }
            Family::CoupledStandardMaps { k1, k2, c } => {
                let (x1, x2, y1, y2) = (point[0], point[1], point[2], point[3]);
                let coupling = c / TAU * (TAU * (x1 - x2)).sin();
                let p1 = y1 + k1 / TAU * (TAU * x1).sin() + coupling;
                let p2 = y2 + k2 / TAU * (TAU * x2).sin() - coupling;
                out[0] = x1 + p1;
                out[1] = x2 + p2;
                out[2] = p1;
                out[3] = p2;
            }
            Family::TorusAutomorphism { matrix } => {
                let dim = 2 * self.dim_half;
                for r in 0..dim {
                    let mut acc = 0.0;
                    for ci in 0..dim {
                        acc += matrix[(r, ci)] * point[ci];
                    }
                    out[r] = acc;
                }
            }
            Family::SnakeComposed { model } => {
                model.step(point, out)?;
            }
        }
        reduce(out, &self.topology);
        Ok(())
    }

    fn jacobian(&self, point: &[f64]) -> Result<SymplecticMatrix> {
        match &self.family {
            Family::StandardMap { k } => {
                let c = k * (TAU * point[0]).cos();
                Ok(SymplecticMatrix::new_unchecked(DMatrix::from_row_slice(
                    2,
                    2,
                    &[1.0 + c, 1.0, c, 1.0],
                )))
            }
            Family::CoupledStandardMaps { k1, k2, c } => {
                let cc = c * (TAU * (point[0] - point[1])).cos();
                let d1 = k1 * (TAU * point[0]).cos() + cc;
                let d2 = k2 * (TAU * point[1]).cos() + cc;
                // Kick matrix S is symmetric; full Jacobian [[I+S, I], [S, I]].
                let s = [[d1, -cc], [-cc, d2]];
                let mut m = DMatrix::<f64>::zeros(4, 4);
                for i in 0..2 {
                    for j in 0..2 {
                        m[(i, j)] = s[i][j] + if i == j { 1.0 } else { 0.0 };
                        m[(i, 2 + j)] = if i == j { 1.0 } else { 0.0 };
                        m[(2 + i, j)] = s[i][j];
                        m[(2 + i, 2 + j)] = if i == j { 1.0 } else { 0.0 };
                    }
                }
                Ok(SymplecticMatrix::new_unchecked(m))
            }
            Family::TorusAutomorphism { matrix } => {
                Ok(SymplecticMatrix::new_unchecked(matrix.clone()))
            }
            Family::SnakeComposed { model } => model.jacobian(point),
        }
    }
}

/// A detected periodic orbit with its cocycle data.
#[derive(Debug, Clone)]
pub struct PeriodicOrbit {
    pub points: Vec<Vec<f64>>,
    pub period: usize,
    pub cocycle: Word,
    pub spectrum: Spectrum,
    pub classification: Classification,
    pub lyapunov: LyapunovVector,
    /// `‖f^τ(p_0) - p_0‖` in the model metric.
    pub residual: f64,
}

impl PeriodicOrbit {
    /// `S(p, f)` with the default zero threshold.
    pub fn exponent_sum(&self) -> f64 {
        crate::sympl::sum_positive_exponents(&self.lyapunov)
    }
}

/// Orbit of length `steps + 1` and the word of `steps` Jacobians along it.
pub fn orbit_cocycle<M: Dynamics>(
    model: &M,
    start: &[f64],
    steps: usize,
) -> Result<(Vec<Vec<f64>>, Word)> {
    if steps == 0 {
        return Err(Error::Domain("orbit cocycle needs at least one step".into()));
    }
    let mut points = Vec::with_capacity(steps + 1);
    let mut letters = Vec::with_capacity(steps);
    let mut current = start.to_vec();
    for _ in 0..steps {
        letters.push(model.jacobian(&current)?);
        let next = model.evaluate(&current)?;
        points.push(current);
        current = next;
    }
    points.push(current);
    Ok((points, Word::new(letters)?))
}

/// Diagnostics of one periodic scan.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct ScanDiagnostics {
    pub seeds: usize,
    pub converged: usize,
    pub singular_skipped: usize,
    pub rejected_not_minimal: usize,
    pub deduplicated: usize,
}

#[derive(Debug)]
pub struct ScanResult {
    pub orbits: Vec<PeriodicOrbit>,
    pub diagnostics: ScanDiagnostics,
}

/// Newton search for minimal-period-`tau` orbits, seeded on a uniform grid
/// (`grid_per_dim` points per coordinate). Solves `f^τ(x) - x = 0` through
/// the nearest torus image; seeds with a singular Newton matrix are skipped
/// and counted. Orbits are deduplicated up to cyclic shift and filtered to
/// minimal period.
pub fn find_periodic_orbits<M: Dynamics + Sync>(
    model: &M,
    tau: usize,
    grid_per_dim: usize,
    newton_tol: f64,
    max_iters: usize,
) -> Result<ScanResult> {
    if tau == 0 {
        return Err(Error::Domain("period must be positive".into()));
    }
    if grid_per_dim < 2 {
        return Err(Error::Domain("grid_per_dim must be at least 2".into()));
    }
    let dim = model.dim();
    let seeds = grid_per_dim.pow(dim as u32);

    let candidates: Vec<std::result::Result<Option<Vec<f64>>, String>> =
        parallel_map(seeds, |index| {
            let seed = grid_point(model, index, grid_per_dim);
            newton_solve(model, seed, tau, newton_tol, max_iters).map_err(|e| e.to_string())
        });

    let mut diagnostics = ScanDiagnostics {
        seeds,
        ..Default::default()
    };
    let mut orbits: Vec<PeriodicOrbit> = Vec::new();
    let match_tol = 10.0 * newton_tol;

    'seed: for cand in candidates {
        let point = match cand {
            Ok(Some(p)) => p,
            Ok(None) => continue,
            Err(_) => {
                diagnostics.singular_skipped += 1;
                continue;
            }
        };
        diagnostics.converged += 1;

        let mut current = point.clone();
        let mut orbit_points = Vec::with_capacity(tau);
        for _ in 0..tau {
            orbit_points.push(current.clone());
            current = model.evaluate(&current)?;
        }
        let residual = model.distance(&current, &point);
        if residual > newton_tol {
            continue;
        }
        // Minimal period: discard if a strict divisor period also closes.
        for d in 1..tau {
            if tau.is_multiple_of(d) && model.distance(&orbit_points[d % tau], &point) <= match_tol {
                diagnostics.rejected_not_minimal += 1;
                continue 'seed;
            }
        }
        // Dedup against found orbits up to cyclic shift.
        for existing in &orbits {
            for shift in 0..tau {
                let same = (0..tau).all(|j| {
                    model.distance(&existing.points[(j + shift) % tau], &orbit_points[j])
                        <= match_tol
                });
                if same {
                    diagnostics.deduplicated += 1;
                    continue 'seed;
                }
            }
        }

        let mut letters = Vec::with_capacity(tau);
        for p in &orbit_points {
            letters.push(model.jacobian(p)?);
        }
        let cocycle = Word::new(letters)?;
        let spectrum = cocycle.spectrum()?;
        let classification = classify_periodic(&spectrum, 1e-6);
        let lyapunov = lyapunov_vector_periodic(cocycle.letters())?;
        orbits.push(PeriodicOrbit {
            points: orbit_points,
            period: tau,
            cocycle,
            spectrum,
            classification,
            lyapunov,
            residual,
        });
    }

    Ok(ScanResult {
        orbits,
        diagnostics,
    })
}

fn grid_point<M: Dynamics>(model: &M, index: usize, grid_per_dim: usize) -> Vec<f64> {
    let dim = model.dim();
    let mut point = Vec::with_capacity(dim);
    let mut rest = index;
    for d in 0..dim {
        let cell = rest % grid_per_dim;
        rest /= grid_per_dim;
        point.push(match model.topology()[d] {
            CoordKind::Torus => cell as f64 / grid_per_dim as f64,
            CoordKind::Plane => -1.0 + 2.0 * (cell as f64) / (grid_per_dim - 1) as f64,
        });
    }
    point
}

fn newton_solve<M: Dynamics>(
    model: &M,
    mut x: Vec<f64>,
    tau: usize,
    newton_tol: f64,
    max_iters: usize,
) -> Result<Option<Vec<f64>>> {
    let dim = model.dim();
    let topo = model.topology();
    for _ in 0..max_iters {
        // F(x) = f^τ(x) - x through the nearest image, with the τ-step
        // Jacobian accumulated along the way.
        let mut letters = Vec::with_capacity(tau);
        let mut current = x.clone();
        for _ in 0..tau {
            letters.push(model.jacobian(&current)?);
            current = model.evaluate(&current)?;
        }
        let mut disp = nalgebra::DVector::<f64>::zeros(dim);
        for j in 0..dim {
            disp[j] = coord_displacement(x[j], current[j], topo[j]);
        }
        if disp.amax() <= newton_tol {
            return Ok(Some(x));
        }
        let dftau = word_product(&letters)?.into_matrix();
        let jac = dftau - DMatrix::<f64>::identity(dim, dim);
        let lu = jac.lu();
        let delta = lu
            .solve(&disp)
            .ok_or_else(|| Error::Numeric("singular Newton matrix".into()))?;
        if !delta.iter().all(|v| v.is_finite()) {
            return Err(Error::Numeric("Newton step diverged".into()));
        }
        for j in 0..dim {
            x[j] -= delta[j];
        }
        reduce(&mut x, topo);
    }
    // Final residual check after the iteration budget.
    let mut current = x.clone();
    for _ in 0..tau {
        current = model.evaluate(&current)?;
    }
    let res = model.distance(&current, &x);
    Ok(if res <= newton_tol { Some(x) } else { None })
}

/// Lower bound for the exponent-sum supremum `S(f)` over hyperbolic periodic
/// orbits of minimal period `<= max_period`.
#[derive(Debug)]
pub struct SLowerBound {
    pub value: f64,
    pub witness: PeriodicOrbit,
}

#[derive(Debug)]
pub struct SEstimate {
    pub best: Option<SLowerBound>,
    pub orbits: Vec<PeriodicOrbit>,
    pub diagnostics: Vec<ScanDiagnostics>,
}

/// Scans periods `1..=max_period` and maximizes `S(p, f)` over hyperbolic
/// orbits. An empty result signals insufficient search, not `S(f) = 0`.
pub fn estimate_s<M: Dynamics + Sync>(
    model: &M,
    max_period: usize,
    grid_per_dim: usize,
    newton_tol: f64,
) -> Result<SEstimate> {
    if max_period == 0 {
        return Err(Error::Domain("max_period must be positive".into()));
    }
    let mut best: Option<SLowerBound> = None;
    let mut orbits = Vec::new();
    let mut diagnostics = Vec::new();
    for tau in 1..=max_period {
        let scan = find_periodic_orbits(model, tau, grid_per_dim, newton_tol, 50)?;
        diagnostics.push(scan.diagnostics);
        for orbit in scan.orbits {
            if orbit.classification == Classification::Hyperbolic {
                let s = orbit.exponent_sum();
                let better = best.as_ref().is_none_or(|b| s > b.value);
                if better {
                    best = Some(SLowerBound {
                        value: s,
                        witness: orbit.clone(),
                    });
                }
            }
            orbits.push(orbit);
        }
    }
    Ok(SEstimate {
        best,
        orbits,
        diagnostics,
    })
}

/// The Arnold cat matrix `[[2, 1], [1, 1]]`.
pub fn cat_matrix() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0])
}

/// Direct sum of `n` cat blocks in `(x_1..x_n, y_1..y_n)` coordinates.
pub fn cat_power_matrix(n: usize) -> DMatrix<f64> {
    crate::sympl::direct_sum_2x2(&vec![[2.0, 1.0, 1.0, 1.0]; n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::coord_distance;
    use crate::sympl::is_symplectic;

    fn fd_jacobian<M: Dynamics>(model: &M, point: &[f64], h: f64) -> DMatrix<f64> {
        let dim = model.dim();
        let topo = model.topology();
        let mut jac = DMatrix::<f64>::zeros(dim, dim);
        for j in 0..dim {
            let mut plus = point.to_vec();
            let mut minus = point.to_vec();
            plus[j] += h;
            minus[j] -= h;
            let fp = model.evaluate(&plus).unwrap();
            let fm = model.evaluate(&minus).unwrap();
            for i in 0..dim {
                jac[(i, j)] = coord_displacement(fm[i], fp[i], topo[i]) / (2.0 * h);
            }
        }
        jac
    }

    #[test]
    fn standard_map_formulas() {
        let integrable = MapModel::standard_map(0.0);
        let img = integrable.evaluate(&[0.3, 0.2]).unwrap();
        assert!((img[0] - 0.5).abs() < 1e-15 && (img[1] - 0.2).abs() < 1e-15);

        // sin(2π · 0.5) = 0 up to roundoff, so (0.5, 0) is fixed.
        let m = MapModel::standard_map(1.0);
        let img = m.evaluate(&[0.5, 0.0]).unwrap();
        assert!((img[0] - 0.5).abs() < 1e-12 && img[1].abs() < 1e-12);

        let jac = m.jacobian(&[0.0, 0.0]).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]);
        assert!((jac.matrix() - expect).amax() < 1e-12);

        let fd = fd_jacobian(&m, &[0.123, 0.456], 1e-6);
        assert!((m.jacobian(&[0.123, 0.456]).unwrap().matrix() - fd).amax() < 1e-6);
    }

    #[test]
    fn torus_automorphism_fixes_origin() {
        let cat = MapModel::torus_automorphism(cat_matrix()).unwrap();
        let img = cat.evaluate(&[0.0, 0.0]).unwrap();
        assert_eq!(img, vec![0.0, 0.0]);
        let jac = cat.jacobian(&[0.77, 0.13]).unwrap();
        assert!((jac.matrix() - cat_matrix()).amax() == 0.0);
    }

    #[test]
    fn coupled_maps_decouple_and_stay_symplectic() {
        let decoupled = MapModel::coupled_standard_maps(1.1, 0.7, 0.0);
        let jac = decoupled.jacobian(&[0.2, 0.6, 0.1, 0.3]).unwrap();
        // Block structure: no cross terms between the two pairs.
        assert_eq!(jac.matrix()[(0, 1)], 0.0);
        assert_eq!(jac.matrix()[(2, 1)], 0.0);

        let coupled = MapModel::coupled_standard_maps(1.1, 0.7, 0.4);
        for seed in 0..20 {
            let p = [
                (seed as f64 * 0.137) % 1.0,
                (seed as f64 * 0.219) % 1.0,
                (seed as f64 * 0.311) % 1.0,
                (seed as f64 * 0.433) % 1.0,
            ];
            let jac = coupled.jacobian(&p).unwrap();
            assert!(is_symplectic(jac.matrix(), 1e-12).unwrap());
            let fd = fd_jacobian(&coupled, &p, 1e-6);
            assert!((jac.matrix() - fd).amax() < 1e-5);
        }
    }

    #[test]
    fn orbit_cocycle_matches_finite_difference_power() {
        let m = MapModel::standard_map(1.3);
        let start = [0.21, 0.47];
        let (orbit, word) = orbit_cocycle(&m, &start, 8).unwrap();
        assert_eq!(orbit.len(), 9);
        assert_eq!(word.len(), 8);
        // Chain rule vs finite differences of f^8.
        let product = word.product().unwrap();
        let dim = m.dim();
        let h = 1e-7;
        let mut fd = DMatrix::<f64>::zeros(dim, dim);
        for j in 0..dim {
            let mut fp = start.to_vec();
            let mut fm = start.to_vec();
            fp[j] += h;
            fm[j] -= h;
            for _ in 0..8 {
                fp = m.evaluate(&fp).unwrap();
                fm = m.evaluate(&fm).unwrap();
            }
            for i in 0..dim {
                fd[(i, j)] = coord_displacement(fm[i], fp[i], m.topology()[i]) / (2.0 * h);
            }
        }
        assert!((product.matrix() - &fd).amax() / product.matrix().amax() < 1e-4);

        let fixed = MapModel::torus_automorphism(cat_matrix()).unwrap();
        let (_, word) = orbit_cocycle(&fixed, &[0.0, 0.0], 3).unwrap();
        for letter in word.letters() {
            assert!((letter.matrix() - cat_matrix()).amax() == 0.0);
        }
    }

    #[test]
    fn cat_has_exactly_one_fixed_orbit() {
        let cat = MapModel::torus_automorphism(cat_matrix()).unwrap();
        let scan = find_periodic_orbits(&cat, 1, 16, 1e-10, 50).unwrap();
        assert_eq!(scan.orbits.len(), 1);
        let orbit = &scan.orbits[0];
        assert!(orbit.points[0]
            .iter()
            .all(|v| coord_distance(*v, 0.0, CoordKind::Torus) < 1e-9));
        assert_eq!(orbit.classification, Classification::Hyperbolic);
    }

    #[test]
    fn standard_map_fixed_points_and_classification() {
        let m = MapModel::standard_map(1.2);
        let scan = find_periodic_orbits(&m, 1, 24, 1e-10, 50).unwrap();
        assert_eq!(scan.orbits.len(), 2, "expected (0,0) and (0.5,0)");
        for orbit in &scan.orbits {
            let x = orbit.points[0][0];
            let y = orbit.points[0][1];
            assert!(coord_distance(y, 0.0, CoordKind::Torus) < 1e-8);
            if coord_distance(x, 0.0, CoordKind::Torus) < 1e-8 {
                // trace 2 + k > 2: hyperbolic
                assert_eq!(orbit.classification, Classification::Hyperbolic);
            } else {
                assert!(coord_distance(x, 0.5, CoordKind::Torus) < 1e-8);
                // trace 2 - k inside (-2, 2): elliptic
                assert_eq!(orbit.classification, Classification::MElliptic(1));
            }
        }
    }

    #[test]
    fn integrable_case_returns_degenerate_line() {
        let m = MapModel::standard_map(0.0);
        let scan = find_periodic_orbits(&m, 1, 8, 1e-10, 50).unwrap();
        assert!(!scan.orbits.is_empty());
        for orbit in &scan.orbits {
            assert_eq!(orbit.classification, Classification::Degenerate);
            assert!(coord_distance(orbit.points[0][1], 0.0, CoordKind::Torus) < 1e-10);
        }
        assert!(scan.diagnostics.singular_skipped > 0);
    }

    #[test]
    fn estimate_s_on_cat_and_product() {
        let cat = MapModel::torus_automorphism(cat_matrix()).unwrap();
        let est = estimate_s(&cat, 1, 16, 1e-10).unwrap();
        let chi = ((3.0 + 5.0f64.sqrt()) / 2.0).ln();
        let best = est.best.unwrap();
        assert!((best.value - chi).abs() < 1e-9);

        let cat2 = MapModel::torus_automorphism(cat_power_matrix(2)).unwrap();
        let est = estimate_s(&cat2, 1, 6, 1e-10).unwrap();
        let best = est.best.unwrap();
        assert!((best.value - 2.0 * chi).abs() < 1e-6);
        assert!(best.witness.lyapunov.pairing_residual() < 1e-7);
        assert!(best.witness.lyapunov.sum().abs() < 1e-7);
    }

    #[test]
    fn estimate_s_monotone_in_max_period() {
        let m = MapModel::standard_map(1.5);
        let v2 = estimate_s(&m, 2, 12, 1e-9)
            .unwrap()
            .best
            .map(|b| b.value)
            .unwrap_or(0.0);
        let v4 = estimate_s(&m, 4, 12, 1e-9)
            .unwrap()
            .best
            .map(|b| b.value)
            .unwrap_or(0.0);
        assert!(v4 >= v2 - 1e-12);
    }

    #[test]
    fn standard_map_s_matches_trace_polynomial() {
        // S((0,0)) = log of the larger root of λ² - (2+k)λ + 1.
        let k = 1.2;
        let m = MapModel::standard_map(k);
        let est = estimate_s(&m, 1, 24, 1e-10).unwrap();
        let tr = 2.0 + k;
        let lam = (tr + (tr * tr - 4.0).sqrt()) / 2.0;
        assert!((est.best.unwrap().value - lam.ln()).abs() < 1e-9);
    }

    #[test]
    fn orbit_shift_closure() {
        let m = MapModel::standard_map(1.7);
        let scan = find_periodic_orbits(&m, 2, 16, 1e-10, 50).unwrap();
        assert!(!scan.orbits.is_empty());
        for orbit in &scan.orbits {
            for j in 0..orbit.period {
                let next = m.evaluate(&orbit.points[j]).unwrap();
                let expect = &orbit.points[(j + 1) % orbit.period];
                assert!(m.distance(&next, expect) < 1e-7);
            }
        }
    }

    #[test]
    fn symplecticity_along_long_orbits() {
        let models: Vec<MapModel> = vec![
            MapModel::standard_map(1.2),
            MapModel::coupled_standard_maps(1.2, 0.8, 0.3),
            MapModel::torus_automorphism(cat_matrix()).unwrap(),
        ];
        for m in &models {
            let mut p = vec![0.234; m.dim()];
            let mut worst = 0.0f64;
            for _ in 0..10_000 {
                let jac = m.jacobian(&p).unwrap();
                worst = worst.max(jac.residual());
                p = m.evaluate(&p).unwrap();
            }
            assert!(worst < 1e-9, "residual {worst}");
        }
    }
}
