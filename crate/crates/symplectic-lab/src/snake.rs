//! Explicit local model around a full homoclinic tangency and the snake
//! perturbation that certifies a horseshoe out of it.
//!
//! Model coordinates: the hyperbolic fixed point `p` sits at the origin with
//! exactly linear dynamics `diag(σ_i^{1/τ}, σ_i^{-1/τ})`; the stable plane is
//! `{x = 0}`, the unstable plane `{y = 0}`. A disc `D^u` on the unstable
//! plane at `x_1 ≈ 0.8` is carried by a `T`-step connector (a quarter-turn
//! rotation plus translations, exactly symplectic) onto the disc
//! `D^s = {(0, y) : |y - q| ≤ a}` inside the stable plane — so `D^s` consists
//! of homoclinic points and the tangency has full codimension: the unstable
//! manifold arrives flat inside the stable plane.
//!
//! The snake shear acts in the chart `ψ(x, y) = (y - q, -x)` centered on the
//! disc, where it reads `(u, v) ↦ (u, v + A sin(u_i πN/(2a)))`. Conjugated
//! back it shears the unstable coordinates by `±A sin((y_i - q) πN/(2a))`,
//! bending the arriving disc into a snake that crosses the stable plane in
//! exactly `N^n` transversal homoclinic points. The certified return map on
//! the rectangle `R` then crosses itself in `N^n` components with entropy
//! `n log N / (T + τ t)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::cocycle::Word;
use crate::dynamics::{CoordKind, Dynamics};
use crate::entropy::{
    check_entropy_exponent_bound, entropy_from_counts_windowed, horseshoe_lower_bound,
    separated_table,
    EntropyEstimate, TransitionMatrixModel,
};
use crate::error::{Error, Result};
use crate::sympl::{lyapunov_vector_periodic, SymplecticMatrix, DEFAULT_ZERO_TOL};

/// Fixed unit-scale layout of the local model.
pub mod layout {
    /// Half-width of the working box on which the dynamics is linear.
    pub const WORKING_HALFWIDTH: f64 = 2.0;
    /// Stable offset of the homoclinic disc: `D^s` is centered at `y = q`.
    pub const Q_OFFSET: f64 = 0.3;
    /// Unstable offset of `D^u`: centered at `x_1 = c_u`.
    pub const CU_OFFSET: f64 = 0.8;
    /// Half-width of the connector entry box around `D^u`.
    pub const BU_HALFWIDTH: f64 = 0.18;
    /// Largest disc radius compatible with the layout.
    pub const MAX_DISC_RADIUS: f64 = 0.15;
    /// First corridor box center (on the y_1 axis) and spacing for T >= 2.
    pub const CORRIDOR_FIRST: f64 = -1.5;
    pub const CORRIDOR_SPACING: f64 = 0.8;
    pub const CORRIDOR_HALFWIDTH: f64 = 0.3;
}

/// The componentwise sinusoidal shear in disc-chart coordinates:
/// `(u, v) ↦ (u, v + A sin(u_i π N / (2a)))`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SnakeShear {
    pub amplitude: f64,
    pub frequency: usize,
    pub disc_radius: f64,
    pub dim_half: usize,
}

impl SnakeShear {
    pub fn new(amplitude: f64, frequency: usize, disc_radius: f64, dim_half: usize) -> Result<Self> {
        if amplitude <= 0.0 || !amplitude.is_finite() {
            return Err(Error::Domain("shear amplitude must be positive".into()));
        }
        if frequency == 0 || frequency.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "snake frequency must be a positive odd integer, got {frequency}"
            )));
        }
        if disc_radius <= 0.0 || dim_half == 0 {
            return Err(Error::Domain("disc radius and dimension must be positive".into()));
        }
        Ok(Self {
            amplitude,
            frequency,
            disc_radius,
            dim_half,
        })
    }

    fn phase(&self, u: f64) -> f64 {
        u * PI * self.frequency as f64 / (2.0 * self.disc_radius)
    }

    /// The shear in chart coordinates (`2n`-dimensional point `(u, v)`).
    pub fn apply_psi(&self, point: &[f64]) -> Vec<f64> {
        let n = self.dim_half;
        let mut out = point.to_vec();
        for i in 0..n {
            out[n + i] += self.amplitude * self.phase(point[i]).sin();
        }
        out
    }

    /// Exact Jacobian in chart coordinates: unit lower-triangular shear.
    pub fn jacobian_psi(&self, point: &[f64]) -> SymplecticMatrix {
        let n = self.dim_half;
        let mut m = DMatrix::<f64>::identity(2 * n, 2 * n);
        let slope = self.amplitude * PI * self.frequency as f64 / (2.0 * self.disc_radius);
        for i in 0..n {
            m[(n + i, i)] = slope * self.phase(point[i]).cos();
        }
        SymplecticMatrix::new_unchecked(m)
    }

    /// C¹ distance from the identity: `A π N / (2a)`, exact for this family.
    pub fn c1_distance(&self) -> f64 {
        self.amplitude * PI * self.frequency as f64 / (2.0 * self.disc_radius)
    }

    /// The intersection `Θ(D̃) ∩ D̃` in chart coordinates: the grid
    /// `{2ak/N}^n × {0}^n`, exactly `N^n` points for odd `N`.
    pub fn homoclinic_grid(&self) -> Vec<Vec<f64>> {
        let n = self.dim_half;
        let big_n = self.frequency as i64;
        let half = (big_n - 1) / 2;
        let axis: Vec<f64> = (-half..=half)
            .map(|k| 2.0 * self.disc_radius * k as f64 / big_n as f64)
            .collect();
        let mut points = Vec::with_capacity(axis.len().pow(n as u32));
        let mut idx = vec![0usize; n];
        loop {
            let mut p = vec![0.0; 2 * n];
            for (d, &i) in idx.iter().enumerate() {
                p[d] = axis[i];
            }
            points.push(p);
            // mixed-radix increment
            let mut d = 0;
            loop {
                if d == n {
                    return points;
                }
                idx[d] += 1;
                if idx[d] < axis.len() {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    }
}

/// The unperturbed local tangency model: linear hyperbolic part plus an
/// exactly symplectic `T`-step connector carrying `D^u` onto `D^s`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TangencyModel {
    dim_half: usize,
    /// Full-period unstable multipliers, descending, all > 1.
    multipliers: Vec<f64>,
    /// Linear period: the fixed point's return is `diag(σ, 1/σ)` after τ steps.
    tau: usize,
    /// Connector transition time `T`.
    connector_time: usize,
    disc_radius: f64,
}

/// Builds the model; `τ` defaults to 1 (see [`TangencyModel::with_period`]).
///
/// The layout is rigid: the disc radius must leave the connector entry box
/// clear of the linearization region, and the leading multiplier must be
/// strong enough that orbits jump across the entry box's edge rather than
/// creeping into it early.
pub fn build_tangency_model(
    dim_half: usize,
    multipliers: &[f64],
    connector_time: usize,
    disc_radius: f64,
) -> Result<TangencyModel> {
    if dim_half == 0 || multipliers.len() != dim_half {
        return Err(Error::Construction(format!(
            "need exactly {dim_half} multipliers, got {}",
            multipliers.len()
        )));
    }
    if connector_time == 0 {
        return Err(Error::Construction("connector time must be positive".into()));
    }
    if multipliers.iter().any(|s| !s.is_finite() || *s <= 1.0) {
        return Err(Error::Construction(
            "unstable multipliers must all exceed 1".into(),
        ));
    }
    if disc_radius <= 0.0 || disc_radius > layout::MAX_DISC_RADIUS {
        return Err(Error::Construction(format!(
            "disc radius {disc_radius} outside (0, {}]: the connector support would intersect \
             the linearization region; shrink a",
            layout::MAX_DISC_RADIUS
        )));
    }
    let mut sorted = multipliers.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite multipliers"));
    let model = TangencyModel {
        dim_half,
        multipliers: sorted,
        tau: 1,
        connector_time,
        disc_radius,
    };
    model.validate_entry_gap()?;
    Ok(model)
}

impl TangencyModel {
    /// Sets the linear period τ; the per-step map becomes `diag(σ^{1/τ})`.
    pub fn with_period(mut self, tau: usize) -> Result<Self> {
        if tau == 0 {
            return Err(Error::Construction("linear period must be positive".into()));
        }
        self.tau = tau;
        self.validate_entry_gap()?;
        Ok(self)
    }

    fn validate_entry_gap(&self) -> Result<()> {
        // One linear step must carry x_1 from below the entry box across its
        // near edge, otherwise orbits enter the connector region early.
        let needed = (layout::CU_OFFSET + self.disc_radius)
            / (layout::CU_OFFSET - layout::BU_HALFWIDTH);
        if self.step_multiplier(0) < needed {
            return Err(Error::Construction(format!(
                "per-step expansion {:.4} below {needed:.4}: orbits would creep into the \
                 connector entry box; increase σ_1 or reduce the period",
                self.step_multiplier(0)
            )));
        }
        Ok(())
    }

    pub fn dim_half(&self) -> usize {
        self.dim_half
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }

    pub fn period(&self) -> usize {
        self.tau
    }

    pub fn connector_time(&self) -> usize {
        self.connector_time
    }

    pub fn disc_radius(&self) -> f64 {
        self.disc_radius
    }

    fn step_multiplier(&self, coord: usize) -> f64 {
        self.multipliers[coord].powf(1.0 / self.tau as f64)
    }

    /// Lipschitz constant of the unperturbed model: the strongest per-step
    /// expansion (connector stages are isometries).
    pub fn lipschitz(&self) -> f64 {
        self.step_multiplier(0)
    }

    /// Radius of the stable ball around the origin containing `D^s`.
    pub fn l_d(&self) -> f64 {
        layout::Q_OFFSET + self.disc_radius
    }

    /// The homoclinic point at the disc center: `(0, q, …, q)`.
    pub fn q_tilde(&self) -> Vec<f64> {
        let mut p = vec![0.0; 2 * self.dim_half];
        for i in 0..self.dim_half {
            p[self.dim_half + i] = layout::Q_OFFSET;
        }
        p
    }

    fn cu(&self) -> Vec<f64> {
        let mut p = vec![0.0; 2 * self.dim_half];
        p[0] = layout::CU_OFFSET;
        p
    }

    fn corridor_center(&self, stage: usize) -> Vec<f64> {
        // stage 1..T-1, parked on the y_1 axis away from everything else.
        let mut p = vec![0.0; 2 * self.dim_half];
        p[self.dim_half] = layout::CORRIDOR_FIRST - layout::CORRIDOR_SPACING * (stage - 1) as f64;
        p
    }

    fn in_entry_box(&self, z: &[f64]) -> bool {
        (z[0] - layout::CU_OFFSET).abs() <= layout::BU_HALFWIDTH
            && z[1..].iter().all(|v| v.abs() <= layout::BU_HALFWIDTH)
    }

    fn in_corridor(&self, z: &[f64], stage: usize) -> bool {
        let c = self.corridor_center(stage);
        z.iter()
            .zip(c.iter())
            .all(|(v, w)| (v - w).abs() <= layout::CORRIDOR_HALFWIDTH)
    }

    fn in_working_box(&self, z: &[f64]) -> bool {
        z.iter().all(|v| v.abs() <= layout::WORKING_HALFWIDTH)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Entry,
    Corridor(usize),
    Linear,
    Outside,
}

/// The model with its snake shear applied: the perturbed map whose return on
/// the rectangle `R` is the certified horseshoe. With `shear = None` this is
/// the unperturbed tangency model.
#[derive(Debug, Clone)]
pub struct SnakeMapModel {
    tangency: TangencyModel,
    shear: Option<SnakeShear>,
    topology: Vec<CoordKind>,
}

impl SnakeMapModel {
    pub fn new(tangency: TangencyModel, shear: SnakeShear) -> Result<Self> {
        if shear.dim_half != tangency.dim_half {
            return Err(Error::Dimension {
                expected: tangency.dim_half,
                got: shear.dim_half,
            });
        }
        if (shear.disc_radius - tangency.disc_radius).abs() > 1e-15 {
            return Err(Error::Construction(
                "shear disc radius must match the model disc radius".into(),
            ));
        }
        let topology = vec![CoordKind::Plane; 2 * tangency.dim_half];
        Ok(Self {
            tangency,
            shear: Some(shear),
            topology,
        })
    }

    pub fn unperturbed(tangency: TangencyModel) -> Self {
        let topology = vec![CoordKind::Plane; 2 * tangency.dim_half];
        Self {
            tangency,
            shear: None,
            topology,
        }
    }

    pub fn tangency(&self) -> &TangencyModel {
        &self.tangency
    }

    pub fn shear(&self) -> Option<&SnakeShear> {
        self.shear.as_ref()
    }

    fn region(&self, z: &[f64]) -> Region {
        let t = &self.tangency;
        if t.in_entry_box(z) {
            return Region::Entry;
        }
        for stage in 1..t.connector_time {
            if t.in_corridor(z, stage) {
                return Region::Corridor(stage);
            }
        }
        if t.in_working_box(z) {
            return Region::Linear;
        }
        Region::Outside
    }

    /// The shear conjugated through the disc chart `ψ(x,y) = (y - q, -x)`:
    /// in model coordinates `x_i ↦ x_i - A sin((y_i - q) π N / (2a))`.
    fn theta_chart(&self, z: &mut [f64]) {
        if let Some(shear) = &self.shear {
            let n = self.tangency.dim_half;
            for i in 0..n {
                let u = z[n + i] - layout::Q_OFFSET;
                z[i] -= shear.amplitude * shear.phase(u).sin();
            }
        }
    }

    fn theta_chart_jacobian(&self, z: &[f64]) -> DMatrix<f64> {
        let n = self.tangency.dim_half;
        let mut m = DMatrix::<f64>::identity(2 * n, 2 * n);
        if let Some(shear) = &self.shear {
            let slope = shear.amplitude * PI * shear.frequency as f64 / (2.0 * shear.disc_radius);
            for i in 0..n {
                let u = z[n + i] - layout::Q_OFFSET;
                m[(i, n + i)] = -slope * shear.phase(u).cos();
            }
        }
        m
    }

    /// Quarter turn `J(z - c_u) + dest`: maps the unstable plane directions
    /// into the stable plane, realizing the flattened (full) tangency.
    fn rotate_from_entry(&self, z: &[f64], dest: &[f64], out: &mut [f64]) {
        let n = self.tangency.dim_half;
        let cu = self.tangency.cu();
        for i in 0..n {
            let dx = z[i] - cu[i];
            let dy = z[n + i] - cu[n + i];
            out[i] = dy + dest[i];
            out[n + i] = -dx + dest[n + i];
        }
    }
}

impl Dynamics for SnakeMapModel {
    fn dim_half(&self) -> usize {
        self.tangency.dim_half
    }

    fn topology(&self) -> &[CoordKind] {
        &self.topology
    }

    fn step(&self, point: &[f64], out: &mut [f64]) -> Result<()> {
        let t = &self.tangency;
        let n = t.dim_half;
        if point.len() != 2 * n {
            return Err(Error::Dimension {
                expected: 2 * n,
                got: point.len(),
            });
        }
        if !point.iter().all(|v| v.is_finite()) {
            return Err(Error::Numeric("non-finite phase point".into()));
        }
        match self.region(point) {
            Region::Entry => {
                let final_stage = t.connector_time == 1;
                let dest = if final_stage {
                    t.q_tilde()
                } else {
                    t.corridor_center(1)
                };
                self.rotate_from_entry(point, &dest, out);
                if final_stage {
                    self.theta_chart(out);
                }
            }
            Region::Corridor(stage) => {
                let final_stage = stage == t.connector_time - 1;
                let from = t.corridor_center(stage);
                let dest = if final_stage {
                    t.q_tilde()
                } else {
                    t.corridor_center(stage + 1)
                };
                for i in 0..2 * n {
                    out[i] = point[i] - from[i] + dest[i];
                }
                if final_stage {
                    self.theta_chart(out);
                }
            }
            Region::Linear => {
                for i in 0..n {
                    let s = t.step_multiplier(i);
                    out[i] = point[i] * s;
                    out[n + i] = point[n + i] / s;
                }
            }
            Region::Outside => out.copy_from_slice(point),
        }
        Ok(())
    }

    fn jacobian(&self, point: &[f64]) -> Result<SymplecticMatrix> {
        let t = &self.tangency;
        let n = t.dim_half;
        let dim = 2 * n;
        let mat = match self.region(point) {
            Region::Entry => {
                let rot = crate::sympl::standard_form(n);
                if t.connector_time == 1 {
                    let mut image = vec![0.0; dim];
                    self.rotate_from_entry(point, &t.q_tilde(), &mut image);
                    self.theta_chart_jacobian(&image) * rot
                } else {
                    rot
                }
            }
            Region::Corridor(stage) => {
                if stage == t.connector_time - 1 {
                    let from = t.corridor_center(stage);
                    let dest = t.q_tilde();
                    let image: Vec<f64> = point
                        .iter()
                        .zip(from.iter().zip(dest.iter()))
                        .map(|(z, (f, d))| z - f + d)
                        .collect();
                    self.theta_chart_jacobian(&image)
                } else {
                    DMatrix::identity(dim, dim)
                }
            }
            Region::Linear => {
                let mut m = DMatrix::<f64>::zeros(dim, dim);
                for i in 0..n {
                    let s = t.step_multiplier(i);
                    m[(i, i)] = s;
                    m[(n + i, n + i)] = 1.0 / s;
                }
                m
            }
            Region::Outside => DMatrix::identity(dim, dim),
        };
        Ok(SymplecticMatrix::new_unchecked(mat))
    }
}

/// Default iteration budget for the `t` search.
pub const CHOOSE_T_BUDGET: usize = 1_000_000;

/// Smallest positive `t` such that
/// (t.1) the `τt`-fold pullback of the unstable disc box sits within `A/4`
///       of the stable plane, and
/// (t.2) the stable ball of radius `l_A = A/(4λ^T)` expands over the disc
///       ball `l_D` after `τt` steps.
///
/// Both conditions are evaluated by explicit iteration of the linear model.
pub fn choose_t(model: &TangencyModel, amplitude: f64) -> Result<usize> {
    choose_t_with_budget(model, amplitude, CHOOSE_T_BUDGET)
}

pub fn choose_t_with_budget(
    model: &TangencyModel,
    amplitude: f64,
    budget: usize,
) -> Result<usize> {
    if amplitude <= 0.0 || !amplitude.is_finite() {
        return Err(Error::Domain("amplitude must be positive".into()));
    }
    let n = model.dim_half;
    let lambda = model.lipschitz();
    let l_a = amplitude / (4.0 * lambda.powi(model.connector_time as i32));
    let l_d = model.l_d();
    let a = model.disc_radius;

    // Unstable extents of the D^u box per coordinate.
    let mut extents: Vec<f64> = (0..n)
        .map(|i| if i == 0 { layout::CU_OFFSET + a } else { a })
        .collect();
    let mut stable_reach = l_a;
    let sigma_min = model.multipliers[n - 1];

    let cond1 = |e: &[f64]| e.iter().cloned().fold(0.0, f64::max) <= amplitude / 4.0;
    let cond2 = |s: f64| s >= l_d;

    if cond1(&extents) && cond2(stable_reach) {
        return Err(Error::Domain(
            "amplitude so large that t = 0 would satisfy both conditions; \
             the perturbation is out of the model's scale"
                .into(),
        ));
    }
    for t in 1..=budget {
        for (i, e) in extents.iter_mut().enumerate() {
            *e /= model.multipliers[i];
        }
        stable_reach *= sigma_min;
        if cond1(&extents) && cond2(stable_reach) {
            return Ok(t);
        }
    }
    let best_gap = extents.iter().cloned().fold(0.0, f64::max) - amplitude / 4.0;
    Err(Error::Budget {
        tried: budget,
        best_gap,
    })
}

/// One row of the `t`-vs-`A` bracket table.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BracketRow {
    pub frequency: usize,
    pub amplitude: f64,
    pub t: usize,
    /// `min{‖Df^{tτ}|E^u‖⁻¹, ‖Df^{-tτ}|E^s‖⁻¹}` = σ_max^{-tτ}.
    pub bracket_lower: f64,
    /// `max{‖Df^{-tτ}|E^u‖, ‖Df^{tτ}|E^s‖}` = σ_min^{-tτ}.
    pub bracket_upper: f64,
    /// Smallest `K` validating both inequalities for this row.
    pub k_required: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct BracketSweep {
    pub rows: Vec<BracketRow>,
    /// Single constant validating every row.
    pub k: f64,
}

impl BracketSweep {
    /// Running maxima of `k_required`; stability means the prefix constant
    /// stops growing.
    pub fn prefix_ks(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows.len());
        let mut acc = 0.0f64;
        for r in &self.rows {
            acc = acc.max(r.k_required);
            out.push(acc);
        }
        out
    }
}

/// Sweeps odd frequencies, choosing `A(N) = 2aδ/(πN)` and `t(N)`, and finds
/// the smallest single `K` bracketing the amplitude between the hyperbolic
/// norms at time `tτ` for every `N` in the list.
pub fn bracket_bounds(model: &TangencyModel, frequencies: &[usize], delta: f64) -> Result<BracketSweep> {
    if frequencies.is_empty() {
        return Err(Error::Domain("frequency list must be nonempty".into()));
    }
    if delta <= 0.0 {
        return Err(Error::Domain("delta must be positive".into()));
    }
    let n = model.dim_half;
    let a = model.disc_radius;
    let tt = model.tau as f64;
    let sigma_max = model.multipliers[0];
    let sigma_min = model.multipliers[n - 1];
    let mut rows = Vec::with_capacity(frequencies.len());
    for &freq in frequencies {
        if freq == 0 || freq % 2 == 0 {
            return Err(Error::Domain(format!(
                "snake frequencies must be odd, got {freq}"
            )));
        }
        let amplitude = 2.0 * a * delta / (PI * freq as f64);
        let t = choose_t(model, amplitude)?;
        let bracket_lower = sigma_max.powf(-(t as f64) * tt);
        let bracket_upper = sigma_min.powf(-(t as f64) * tt);
        let k_required = (bracket_lower / amplitude).max(amplitude / bracket_upper);
        rows.push(BracketRow {
            frequency: freq,
            amplitude,
            t,
            bracket_lower,
            bracket_upper,
            k_required,
        });
    }
    let k = rows.iter().map(|r| r.k_required).fold(0.0, f64::max);
    Ok(BracketSweep { rows, k })
}

/// Verified crossing evidence for one component of the horseshoe.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ComponentEvidence {
    /// Branch indices `k ∈ {-(N-1)/2 .. (N-1)/2}^n`.
    pub index: Vec<i64>,
    /// Source slab inside `R` (x-part bounds; the y-part spans the full box).
    pub slab_lo: Vec<f64>,
    pub slab_hi: Vec<f64>,
    /// Smallest overshoot beyond the x-box across the two crossing faces,
    /// in units of the shear amplitude.
    pub overshoot_ratio: f64,
    /// Smallest distance of image stable coordinates from the boundary of
    /// the y-box, over all band samples.
    pub stable_margin: f64,
    pub samples: usize,
}

/// A verified Markov structure for the snake return map.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HorseshoeCertificate {
    pub dim_half: usize,
    pub frequency: usize,
    pub connector_time: usize,
    pub tau: usize,
    pub t: usize,
    pub amplitude: f64,
    pub delta: f64,
    /// Rectangle `R` in model coordinates: unstable then stable bounds.
    pub rectangle_lo: Vec<f64>,
    pub rectangle_hi: Vec<f64>,
    pub components: Vec<ComponentEvidence>,
    pub transition: TransitionMatrixModel,
    /// `n log N / (T + τ t)`.
    pub certified_entropy: f64,
    pub bracket_k: f64,
}

impl HorseshoeCertificate {
    pub fn return_time(&self) -> usize {
        self.connector_time + self.tau * self.t
    }
}

/// Default boundary samples per component face.
pub const FACE_SAMPLES: usize = 100;

/// Components are enumerated explicitly; certificates beyond this many
/// symbols are out of desk scale.
pub const COMPONENT_CAP: usize = 4096;

/// Builds the perturbed model and certifies its horseshoe: chooses `t`,
/// forms the rectangle `R`, locates the `N^n` crossing slabs, and verifies
/// the Markov box conditions on sampled slab boundaries by direct iteration
/// of the return map. Fails if any component's evidence is inconclusive.
pub fn build_horseshoe(
    model: &TangencyModel,
    frequency: usize,
    delta: f64,
) -> Result<(HorseshoeCertificate, SnakeMapModel)> {
    let n = model.dim_half;
    let a = model.disc_radius;
    if delta <= 0.0 {
        return Err(Error::Domain("delta must be positive".into()));
    }
    let amplitude = 2.0 * a * delta / (PI * frequency as f64);
    let shear = SnakeShear::new(amplitude, frequency, a, n)?;
    debug_assert!(shear.c1_distance() <= delta * (1.0 + 1e-12));
    let t = choose_t(model, amplitude)?;
    let snake = SnakeMapModel::new(model.clone(), shear)?;

    let symbols = frequency.pow(n as u32);
    if symbols > COMPONENT_CAP {
        return Err(Error::Construction(format!(
            "N^n = {symbols} exceeds the component cap {COMPONENT_CAP}"
        )));
    }

    // Rectangle R: pulled-back D^u box times the D^s box.
    let tau_t = (model.tau * t) as i32;
    let contraction: Vec<f64> = (0..n).map(|i| model.multipliers[i].powi(-tau_t)).collect();
    let mut rect_lo = vec![0.0; 2 * n];
    let mut rect_hi = vec![0.0; 2 * n];
    for i in 0..n {
        let center = if i == 0 { layout::CU_OFFSET } else { 0.0 };
        rect_lo[i] = (center - a) * contraction[i];
        rect_hi[i] = (center + a) * contraction[i];
        rect_lo[n + i] = layout::Q_OFFSET - a;
        rect_hi[n + i] = layout::Q_OFFSET + a;
    }

    // Worst stable remnant after the linear leg; bounded by l_A ≤ A/4 by
    // the choice of t.
    let w_max: Vec<f64> = (0..n)
        .map(|i| contraction[i] * (layout::Q_OFFSET + a))
        .collect();

    let return_time = model.connector_time + model.tau * t;
    let big_n = frequency as i64;
    let half = (big_n - 1) / 2;

    // Conservative crossing band per coordinate: |sin| ≤ ρ on the crossing.
    let mut bands = Vec::with_capacity(n);
    for i in 0..n {
        let reach = rect_lo[i].abs().max(rect_hi[i].abs());
        let rho = (w_max[i] + reach) / amplitude;
        if rho >= 0.95 {
            return Err(Error::Construction(format!(
                "crossing level ratio {rho:.3} too close to 1 in coordinate {i}; \
                 the snake cannot cross transversally (N too large for δ)"
            )));
        }
        bands.push(2.0 * a / (PI * frequency as f64) * rho.asin());
    }

    let mut components = Vec::with_capacity(symbols);
    let mut k_index = vec![-half; n];
    loop {
        let evidence = verify_component(
            &snake, model, &k_index, &rect_lo, &rect_hi, &bands, t, return_time, amplitude,
        )?;
        components.push(evidence);
        // mixed-radix increment over {-half..=half}^n
        let mut d = 0;
        loop {
            if d == n {
                break;
            }
            k_index[d] += 1;
            if k_index[d] <= half {
                break;
            }
            k_index[d] = -half;
            d += 1;
        }
        if d == n {
            break;
        }
    }
    debug_assert_eq!(components.len(), symbols);

    // Disjointness across components: adjacent crossing bands must not touch.
    for (i, band) in bands.iter().enumerate() {
        if 2.0 * band >= 2.0 * a / frequency as f64 {
            return Err(Error::Construction(format!(
                "crossing bands overlap in coordinate {i}: components are not disjoint"
            )));
        }
    }

    let brackets = bracket_bounds(model, &[frequency], delta)?;
    let certified_entropy =
        horseshoe_lower_bound(frequency, n, model.connector_time, model.tau, t)?;
    let certificate = HorseshoeCertificate {
        dim_half: n,
        frequency,
        connector_time: model.connector_time,
        tau: model.tau,
        t,
        amplitude,
        delta,
        rectangle_lo: rect_lo,
        rectangle_hi: rect_hi,
        components,
        transition: TransitionMatrixModel::full_shift(symbols),
        certified_entropy,
        bracket_k: brackets.k,
    };
    Ok((certificate, snake))
}

#[allow(clippy::too_many_arguments)]
fn verify_component(
    snake: &SnakeMapModel,
    model: &TangencyModel,
    k_index: &[i64],
    rect_lo: &[f64],
    rect_hi: &[f64],
    bands: &[f64],
    t: usize,
    return_time: usize,
    amplitude: f64,
) -> Result<ComponentEvidence> {
    let n = model.dim_half;
    let a = model.disc_radius;
    let freq = snake.shear().expect("perturbed model").frequency as f64;
    let tau_t = (model.tau * t) as i32;

    // Branch slab in source coordinates: θ_i within the k-th half-period.
    let mut slab_lo = vec![0.0; n];
    let mut slab_hi = vec![0.0; n];
    let mut band_lo = vec![0.0; n];
    let mut band_hi = vec![0.0; n];
    for i in 0..n {
        let center_u = if i == 0 { layout::CU_OFFSET } else { 0.0 };
        let theta_center = 2.0 * a * k_index[i] as f64 / freq;
        let contraction = model.multipliers[i].powi(-tau_t);
        slab_lo[i] = (center_u + theta_center - a / freq) * contraction;
        slab_hi[i] = (center_u + theta_center + a / freq) * contraction;
        band_lo[i] = (center_u + theta_center - bands[i]) * contraction;
        band_hi[i] = (center_u + theta_center + bands[i]) * contraction;
    }

    let iterate = |z0: &[f64]| -> Result<Vec<f64>> {
        let mut z = z0.to_vec();
        let mut buf = vec![0.0; z.len()];
        for _ in 0..return_time {
            snake.step(&z, &mut buf)?;
            std::mem::swap(&mut z, &mut buf);
        }
        Ok(z)
    };

    // Face grids: for coordinate i, the two θ-extreme faces of the branch
    // slab; remaining coordinates sampled on a coarse lattice.
    let free_dims = 2 * n - 1;
    let side = (FACE_SAMPLES as f64)
        .powf(1.0 / free_dims as f64)
        .ceil()
        .max(2.0) as usize;
    let lattice = |k: usize, count: usize, lo: f64, hi: f64| -> f64 {
        lo + (hi - lo) * (k as f64 + 0.5) / count as f64
    };

    let mut overshoot_low = f64::INFINITY; // how far below rect_lo the low side lands
    let mut overshoot_high = f64::INFINITY;
    let mut samples = 0usize;

    for i in 0..n {
        for (face, x_fixed) in [(0usize, slab_lo[i]), (1usize, slab_hi[i])] {
            let mut mins = f64::INFINITY;
            let mut maxs = f64::NEG_INFINITY;
            let total = side.pow(free_dims as u32);
            for s in 0..total {
                let mut rest = s;
                let mut z = vec![0.0; 2 * n];
                z[i] = x_fixed;
                for d in 0..2 * n {
                    if d == i {
                        continue;
                    }
                    let cell = rest % side;
                    rest /= side;
                    let (lo, hi) = if d < n {
                        (slab_lo[d], slab_hi[d])
                    } else {
                        (rect_lo[d], rect_hi[d])
                    };
                    z[d] = lattice(cell, side, lo, hi);
                }
                let image = iterate(&z)?;
                mins = mins.min(image[i]);
                maxs = maxs.max(image[i]);
                samples += 1;
            }
            // One face must land beyond the low edge, the other beyond the
            // high edge (which is which depends on branch parity); record
            // the worst clearance over faces.
            let below = rect_lo[i] - maxs; // face entirely below the box
            let above = mins - rect_hi[i]; // face entirely above the box
            if below > 0.0 {
                overshoot_low = overshoot_low.min(below);
            } else if above > 0.0 {
                overshoot_high = overshoot_high.min(above);
            } else {
                return Err(Error::Construction(format!(
                    "component {k_index:?}: face {face} of coordinate {i} does not clear the \
                     crossing box (min {mins:.3e}, max {maxs:.3e})"
                )));
            }
        }
    }
    if !overshoot_low.is_finite() || !overshoot_high.is_finite() {
        return Err(Error::Construction(format!(
            "component {k_index:?}: crossing faces land on the same side; no full crossing"
        )));
    }

    // Stable strict containment: sample the crossing band sub-slab.
    let mut stable_margin = f64::INFINITY;
    let band_side = side.max(3);
    let total = band_side.pow((2 * n) as u32);
    for s in 0..total {
        let mut rest = s;
        let mut z = vec![0.0; 2 * n];
        for d in 0..2 * n {
            let cell = rest % band_side;
            rest /= band_side;
            let (lo, hi) = if d < n {
                (band_lo[d], band_hi[d])
            } else {
                (rect_lo[d], rect_hi[d])
            };
            z[d] = lattice(cell, band_side, lo, hi);
        }
        let image = iterate(&z)?;
        for d in n..2 * n {
            let margin = (image[d] - rect_lo[d]).min(rect_hi[d] - image[d]);
            stable_margin = stable_margin.min(margin);
        }
        samples += 1;
    }
    let required = a / (2.0 * freq);
    if stable_margin < required {
        return Err(Error::Construction(format!(
            "component {k_index:?}: stable margin {stable_margin:.3e} below required {required:.3e}"
        )));
    }

    Ok(ComponentEvidence {
        index: k_index.to_vec(),
        slab_lo,
        slab_hi,
        overshoot_ratio: overshoot_low.min(overshoot_high) / amplitude,
        stable_margin,
        samples,
    })
}

/// Comparison of the certificate against the separated-set estimator and the
/// exponent target.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CertificationReport {
    pub certified_entropy: f64,
    pub estimator: EntropyEstimate,
    /// Seeds whose orbits stayed in `R` at every sampled return.
    pub estimator_seeds: usize,
    pub chi_min_plus: f64,
    /// `ε` making the entropy bound meet `n χ⁺_min - ε`.
    pub epsilon_implied: f64,
    pub entropy_bound_ok: bool,
    /// Set when the separated-count estimate falls below the certificate by
    /// more than the tolerance: the estimator under-resolves the horseshoe.
    pub undercount_flagged: bool,
    pub tolerance: f64,
}

/// Hard cap on cylinder depth; beyond this the growth per extra return
/// cannot be resolved in f64 for typical layouts anyway.
const ESTIMATOR_MAX_RETURNS: usize = 6;

/// Exact per-coordinate return dynamics of the diagonal model on the
/// rectangle: from `(x, w)` at one return to the next, where `w` is the
/// contracted stable remnant `y / Λ`.
struct CoordinateReturn {
    lambda: f64,
    center: f64,
    amplitude: f64,
    phase_rate: f64, // πN / (2a)
    q: f64,
}

impl CoordinateReturn {
    fn apply(&self, x: f64, w: f64) -> (f64, f64) {
        let theta = self.lambda * x - self.center;
        let x1 = w + self.amplitude * (theta * self.phase_rate).sin();
        let w1 = (self.q - theta) / self.lambda;
        (x1, w1)
    }

    fn final_x(&self, x0: f64, w0: f64, returns: usize) -> f64 {
        let (mut x, mut w) = (x0, w0);
        for _ in 0..returns {
            (x, w) = self.apply(x, w);
        }
        x
    }

    /// θ at the last of `returns` applications (the branch coordinate).
    fn final_theta(&self, x0: f64, w0: f64, returns: usize) -> f64 {
        let (mut x, mut w) = (x0, w0);
        for _ in 0..returns - 1 {
            (x, w) = self.apply(x, w);
        }
        self.lambda * x - self.center
    }

    /// Depth-`returns` cylinder centers for the stable level `y0`.
    ///
    /// Within each depth-(d-1) cylinder the last-return branch coordinate
    /// θ_d sweeps the disc range once and monotonically, and the return value
    /// is monotone per sin-branch, so every sub-cylinder is bracketed by
    /// monotone bisections — no sampling density to tune.
    fn cylinders(&self, lo: f64, hi: f64, y0: f64, returns: usize, disc: f64, freq: usize) -> Vec<f64> {
        let w0 = y0 / self.lambda;
        let pad = 1e-6 * (hi - lo);
        let (t_lo, t_hi) = (lo + pad, hi - pad);
        let half = (freq as i64 - 1) / 2;
        let mut intervals = vec![(lo, hi)];
        for depth in 1..=returns {
            let mut next = Vec::new();
            for &(alpha, beta) in &intervals {
                let theta = |x: f64| self.final_theta(x, w0, depth);
                let value = |x: f64| self.final_x(x, w0, depth);
                for k in -half..=half {
                    let b_lo = 2.0 * disc * k as f64 / freq as f64 - disc / freq as f64;
                    let b_hi = 2.0 * disc * k as f64 / freq as f64 + disc / freq as f64;
                    let Some((u, v)) = monotone_preimage(&theta, alpha, beta, b_lo, b_hi) else {
                        continue;
                    };
                    let Some((cl, ch)) = monotone_preimage(&value, u, v, t_lo, t_hi) else {
                        continue;
                    };
                    if ch > cl {
                        next.push((cl, ch));
                    }
                }
            }
            intervals = next;
        }
        intervals.iter().map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Newton-polishes a midline cylinder center to the stable level `y0`:
    /// solves `final_x(x, w0) = target` starting from `x_init`. The accepted
    /// residual is relative to `width` (the crossing box size); the composed
    /// return map is so expanding that absolute tolerances would sit below
    /// the representable resolution.
    fn polish(&self, x_init: f64, y0: f64, returns: usize, target: f64, width: f64) -> Option<f64> {
        let w0 = y0 / self.lambda;
        let tol = 1e-3 * width;
        let mut x = x_init;
        let mut best = (f64::INFINITY, x_init);
        let h = 1e-7 * width;
        for _ in 0..40 {
            let f = self.final_x(x, w0, returns) - target;
            if f.abs() < best.0 {
                best = (f.abs(), x);
            }
            if f.abs() < tol {
                return Some(x);
            }
            let d = (self.final_x(x + h, w0, returns) - self.final_x(x - h, w0, returns))
                / (2.0 * h);
            if !d.is_finite() || d.abs() < 1e-30 {
                break;
            }
            x -= f / d;
            if !x.is_finite() {
                break;
            }
        }
        (best.0 < 10.0 * tol).then_some(best.1)
    }
}

/// Preimage of `[target_lo, target_hi]` under a monotone function on
/// `[alpha, beta]`: solved by bisection after orienting the endpoints.
/// Returns `None` when the ranges do not overlap.
fn monotone_preimage(
    f: &impl Fn(f64) -> f64,
    alpha: f64,
    beta: f64,
    target_lo: f64,
    target_hi: f64,
) -> Option<(f64, f64)> {
    let fa = f(alpha);
    let fb = f(beta);
    let (x_at_min, x_at_max, f_min, f_max) = if fa <= fb {
        (alpha, beta, fa, fb)
    } else {
        (beta, alpha, fb, fa)
    };
    if f_max < target_lo || f_min > target_hi {
        return None;
    }
    let solve = |level: f64| -> f64 {
        let (mut lo_x, mut hi_x) = (x_at_min, x_at_max);
        for _ in 0..200 {
            let mid = 0.5 * (lo_x + hi_x);
            if f(mid) < level {
                lo_x = mid;
            } else {
                hi_x = mid;
            }
            if lo_x == hi_x {
                break;
            }
        }
        0.5 * (lo_x + hi_x)
    };
    let from = if f_min >= target_lo { x_at_min } else { solve(target_lo) };
    let to = if f_max <= target_hi { x_at_max } else { solve(target_hi) };
    let (a, b) = if from <= to { (from, to) } else { (to, from) };
    Some((a, b))
}

/// Runs the separated-count estimator on the horseshoe itself. Uniform
/// seeding cannot probe the invariant Cantor set (its measure shrinks by the
/// slab ratio every return), so seeds are constructed on symbol cylinders of
/// the exact per-coordinate return dynamics, one family per stable level.
/// Stable levels are spaced above the finest separation scale and the
/// remaining budget goes into cylinder depth (bounded by what f64 resolves),
/// so the counts grow by the symbol factor per return with no spurious
/// sub-ε structure; the growth is fitted over the full window.
pub fn certify_against_estimator(
    certificate: &HorseshoeCertificate,
    snake: &SnakeMapModel,
    seeds_per_dim: usize,
    tolerance: f64,
) -> Result<CertificationReport> {
    let model = snake.tangency();
    let n = model.dim_half();
    let a = model.disc_radius();
    let return_time = certificate.return_time();
    let amplitude = certificate.amplitude;
    let freq = certificate.frequency;
    let tau_t = (model.period() * certificate.t) as i32;
    let eps_small = a / (2.0 * freq as f64);

    // Stable levels: spaced a bit above the finest ε so level pairs do not
    // leak extra separations mid-window.
    let y_span = 2.0 * a;
    let y_count = ((y_span / (1.3 * eps_small)).floor() as usize).clamp(4, 64);

    // Depth: spend the remaining seed budget on returns, capped by the f64
    // resolvability of the shrinking cylinders.
    let budget = seeds_per_dim.pow((2 * n) as u32).max(16) as f64;
    let per_level = (budget / (y_count as f64).powi(n as i32)).max(1.0);
    let symbols = freq.pow(n as u32) as f64;
    let budget_depth = (per_level.ln() / symbols.ln()).floor() as usize;
    let mut depth = budget_depth.clamp(2, ESTIMATOR_MAX_RETURNS);
    for i in 0..n {
        let lambda = model.multipliers()[i].powi(tau_t);
        let slope = amplitude * PI * freq as f64 / (2.0 * a) * lambda;
        let width = certificate.rectangle_hi[i] - certificate.rectangle_lo[i];
        let ulp = f64::EPSILON * certificate.rectangle_hi[i].abs().max(1e-300);
        let resolvable = ((width / (1e4 * ulp)).ln() / slope.ln()).floor() as usize;
        depth = depth.min(resolvable.max(1));
    }
    let n_max = depth * return_time;

    let mut per_coordinate: Vec<(Vec<f64>, Vec<Vec<f64>>)> = Vec::with_capacity(n);
    for i in 0..n {
        let coord = CoordinateReturn {
            lambda: model.multipliers()[i].powi(tau_t),
            center: if i == 0 { layout::CU_OFFSET } else { 0.0 },
            amplitude,
            phase_rate: PI * freq as f64 / (2.0 * a),
            q: layout::Q_OFFSET,
        };
        let (lo, hi) = (certificate.rectangle_lo[i], certificate.rectangle_hi[i]);
        let target = 0.5 * (lo + hi);
        let midline = coord.cylinders(lo, hi, layout::Q_OFFSET, depth, a, freq);
        if midline.is_empty() {
            return Err(Error::Construction(format!(
                "no return cylinders found in coordinate {i}; the certificate geometry is off"
            )));
        }
        let y_lo = certificate.rectangle_lo[n + i];
        let y_hi = certificate.rectangle_hi[n + i];
        let y_values: Vec<f64> = (0..y_count)
            .map(|k| y_lo + (y_hi - y_lo) * (k as f64 + 0.5) / y_count as f64)
            .collect();
        let mut centers_per_y = Vec::with_capacity(y_count);
        for &y0 in &y_values {
            let centers: Vec<f64> = midline
                .iter()
                .filter_map(|&x| coord.polish(x, y0, depth, target, hi - lo))
                .filter(|x| *x >= lo && *x <= hi)
                .collect();
            centers_per_y.push(centers);
        }
        per_coordinate.push((y_values, centers_per_y));
    }

    // Assemble the product seeds: every combination of per-coordinate
    // (stable level, cylinder center).
    let mut seeds: Vec<f64> = Vec::new();
    let mut combo = vec![(0usize, 0usize); n]; // (y index, cylinder index)
    'outer: loop {
        let mut point = vec![0.0; 2 * n];
        let mut valid = true;
        for (i, &(yi, ci)) in combo.iter().enumerate() {
            let (y_values, centers_per_y) = &per_coordinate[i];
            if ci >= centers_per_y[yi].len() {
                valid = false;
                break;
            }
            point[i] = centers_per_y[yi][ci];
            point[n + i] = y_values[yi];
        }
        if valid {
            seeds.extend_from_slice(&point);
        }
        // Mixed-radix increment over (y, cylinder) pairs per coordinate.
        for i in 0..=n {
            if i == n {
                break 'outer;
            }
            let (y_values, centers_per_y) = &per_coordinate[i];
            let max_ci = centers_per_y[combo[i].0].len().max(1);
            combo[i].1 += 1;
            if combo[i].1 < max_ci {
                break;
            }
            combo[i].1 = 0;
            combo[i].0 += 1;
            if combo[i].0 < y_values.len() {
                break;
            }
            combo[i].0 = 0;
        }
    }
    let estimator_seeds = seeds.len() / (2 * n);
    if estimator_seeds < 2 {
        return Err(Error::Construction(
            "too few cylinder seeds assembled; raise the seed budget".into(),
        ));
    }

    let n_values: Vec<usize> = (0..=n_max).collect();
    let eps_big = a / freq as f64;
    let table = separated_table(snake, &seeds, &n_values, &[eps_big, eps_big / 2.0])?;
    // The invariant set's counts grow in bursts at the returns; fit across
    // the whole window rather than hunting for a smooth regime.
    let estimator = entropy_from_counts_windowed(&table, Some((0, n_max)))?;

    // Fixed-point cocycle: τ copies of the per-step linear map.
    let step_jac = snake.jacobian(&vec![0.0; 2 * n])?;
    let word = Word::new(vec![step_jac; model.period()])?;
    let lyap = lyapunov_vector_periodic(word.letters())?;
    let chi_min_plus = lyap.chi_min_plus(DEFAULT_ZERO_TOL)?;

    let lhs = (certificate.frequency as f64).ln() / return_time as f64;
    let epsilon_implied = (n as f64 * chi_min_plus - lhs).max(0.0) + 1e-12;
    let entropy_bound_ok = check_entropy_exponent_bound(
        certificate.frequency,
        n,
        certificate.connector_time,
        certificate.tau,
        certificate.t,
        chi_min_plus,
        epsilon_implied,
    );
    let undercount_flagged = estimator.value < certificate.certified_entropy - tolerance;

    Ok(CertificationReport {
        certified_entropy: certificate.certified_entropy,
        estimator,
        estimator_seeds,
        chi_min_plus,
        epsilon_implied,
        entropy_bound_ok,
        undercount_flagged,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn c4_model() -> TangencyModel {
        build_tangency_model(1, &[2.0], 1, 0.1).unwrap()
    }

    #[test]
    fn shear_formula_and_jacobian() {
        let shear = SnakeShear::new(0.01, 3, 0.5, 2).unwrap();
        let img = shear.apply_psi(&[0.2, -0.3, 0.0, 0.0]);
        assert!((img[0] - 0.2).abs() < 1e-15);
        let expect = 0.01 * (0.2 * PI * 3.0 / 1.0).sin();
        assert!((img[2] - expect).abs() < 1e-15);
        // x = 0 stays fixed.
        let img = shear.apply_psi(&[0.0, 0.0, 0.4, -0.7]);
        assert!((img[2] - 0.4).abs() < 1e-15 && (img[3] + 0.7).abs() < 1e-15);

        let mut rng = SplitMix64::new(9);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let p: Vec<f64> = (0..4).map(|_| rng.range(-0.5, 0.5)).collect();
            let jac = shear.jacobian_psi(&p);
            worst = worst.max(jac.residual());
        }
        assert!(worst < 1e-14, "shear residual {worst}");
    }

    #[test]
    fn c1_distance_law() {
        // A = 2aδ/(πN) with unit chart constant gives exactly δ.
        let (a, delta, freq) = (0.1, 0.05, 9usize);
        let amp = 2.0 * a * delta / (PI * freq as f64);
        let shear = SnakeShear::new(amp, freq, a, 1).unwrap();
        assert!((shear.c1_distance() - delta).abs() < 1e-15);

        // Doubling N at fixed A doubles the distance (odd frequencies).
        let s1 = SnakeShear::new(0.001, 9, a, 1).unwrap();
        let s2 = SnakeShear::new(0.001, 18 + 9, a, 1).unwrap();
        assert!((s2.c1_distance() / s1.c1_distance() - 3.0).abs() < 1e-12);

        // Measured sup of |DΘ - I| over a fine grid matches AπN/(2a).
        let shear = SnakeShear::new(0.02, 5, 0.15, 1).unwrap();
        let mut measured = 0.0f64;
        for k in 0..20_000 {
            let u = -0.15 + 0.3 * k as f64 / 19_999.0;
            let jac = shear.jacobian_psi(&[u, 0.0]);
            measured = measured.max((jac.matrix()[(1, 0)]).abs());
        }
        let exact = shear.c1_distance();
        assert!((measured - exact).abs() / exact < 1e-6);
    }

    #[test]
    fn homoclinic_grid_counts_and_roots() {
        let shear = SnakeShear::new(0.01, 3, 1.0, 1).unwrap();
        let grid = shear.homoclinic_grid();
        let xs: Vec<f64> = grid.iter().map(|p| p[0]).collect();
        assert_eq!(xs.len(), 3);
        for (x, expect) in xs.iter().zip([-2.0 / 3.0, 0.0, 2.0 / 3.0]) {
            assert!((x - expect).abs() < 1e-15);
        }

        // Cross-check: sign-change bisection of sin(3πu/2) on [-1, 1].
        let f = |u: f64| (u * PI * 3.0 / 2.0).sin();
        let mut roots = Vec::new();
        let samples = 2000;
        for k in 0..samples {
            let u0 = -1.0 + 2.0 * k as f64 / samples as f64;
            let u1 = -1.0 + 2.0 * (k + 1) as f64 / samples as f64;
            if f(u0) == 0.0 {
                roots.push(u0);
            } else if f(u0) * f(u1) < 0.0 {
                let (mut lo, mut hi) = (u0, u1);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if f(lo) * f(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
        }
        assert_eq!(roots.len(), 3);
        for (r, x) in roots.iter().zip(xs.iter()) {
            assert!((r - x).abs() < 1e-10);
        }

        let single = SnakeShear::new(0.01, 1, 1.0, 1).unwrap();
        assert_eq!(single.homoclinic_grid(), vec![vec![0.0, 0.0]]);

        let planar = SnakeShear::new(0.01, 3, 1.0, 2).unwrap();
        assert_eq!(planar.homoclinic_grid().len(), 9);
    }

    #[test]
    fn grid_exactness_across_frequencies() {
        for n in 1..=3usize {
            for freq in (1..=33usize).step_by(2) {
                let shear = SnakeShear::new(1e-3, freq, 0.1, n).unwrap();
                assert_eq!(
                    shear.homoclinic_grid().len(),
                    freq.pow(n as u32),
                    "N = {freq}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn tangency_model_validations() {
        assert!(build_tangency_model(1, &[2.0], 1, 0.1).is_ok());
        assert!(matches!(
            build_tangency_model(1, &[2.0], 1, 0.2),
            Err(Error::Construction(_))
        ));
        assert!(matches!(
            build_tangency_model(1, &[1.0], 1, 0.1),
            Err(Error::Construction(_))
        ));
        // Weak expansion creeps into the entry box.
        assert!(matches!(
            build_tangency_model(1, &[1.2], 1, 0.1),
            Err(Error::Construction(_))
        ));
    }

    #[test]
    fn disc_points_are_homoclinic() {
        let model = c4_model();
        let map = SnakeMapModel::unperturbed(model.clone());
        // Forward orbit of a disc point contracts to p at rate 1/2 per step.
        let mut z = vec![0.0, 0.35];
        for step in 1..=20 {
            z = map.evaluate(&z).unwrap();
            let expect = 0.35 * 0.5f64.powi(step);
            assert!((z[1] - expect).abs() < 1e-12);
            assert!(z[0].abs() < 1e-15);
        }
        // The connector carries D^u onto D^s: f^T(c_u + (ξ, 0)) = (0, q - ξ).
        for &xi in &[-0.1, -0.05, 0.0, 0.05, 0.1] {
            let z = vec![layout::CU_OFFSET + xi, 0.0];
            let img = map.evaluate(&z).unwrap();
            assert!(img[0].abs() < 1e-15);
            assert!((img[1] - (layout::Q_OFFSET - xi)).abs() < 1e-15);
        }
    }

    #[test]
    fn tangency_is_full_codimension() {
        // The connector's derivative maps unstable-plane directions into the
        // stable plane, so T_q W^u = T_q W^s along the disc.
        let model = c4_model();
        let map = SnakeMapModel::unperturbed(model);
        let jac = map.jacobian(&[layout::CU_OFFSET, 0.0]).unwrap();
        let img = jac.matrix() * nalgebra::DVector::from_vec(vec![1.0, 0.0]);
        assert!(img[0].abs() < 1e-15, "unstable direction must flatten");
        assert!(jac.residual() < 1e-10);
    }

    #[test]
    fn choose_t_matches_closed_form() {
        let model = c4_model();
        let delta = 0.05;
        let freq = 3.0;
        let amplitude = 2.0 * 0.1 * delta / (PI * freq);
        let t = choose_t(&model, amplitude).unwrap();
        // Closed forms for σ = 2, τ = 1:
        let t1 = ((4.0 * (layout::CU_OFFSET + 0.1) / amplitude).ln() / 2.0f64.ln()).ceil();
        let l_a = amplitude / (4.0 * 2.0);
        let t2 = ((model.l_d() / l_a).ln() / 2.0f64.ln()).ceil();
        assert_eq!(t, t1.max(t2) as usize);
        assert_eq!(t, 12, "frozen regression value for the c4 parameters");

        // Faster contraction cannot increase t.
        let faster = build_tangency_model(1, &[4.0], 1, 0.1).unwrap();
        let t_fast = choose_t(&faster, amplitude).unwrap();
        assert!(t_fast <= t);
    }

    #[test]
    fn choose_t_domain_boundaries() {
        let model = c4_model();
        // Conditions already hold at t = 0 for absurdly large amplitudes.
        assert!(matches!(choose_t(&model, 3.61), Err(Error::Domain(_))));
        // Just below the threshold both conditions need one step.
        assert_eq!(choose_t(&model, 3.59).unwrap(), 1);
    }

    #[test]
    fn bracket_single_and_sweep() {
        let model = c4_model();
        let single = bracket_bounds(&model, &[3], 0.05).unwrap();
        let row = &single.rows[0];
        assert_eq!(single.k, row.k_required);
        assert!(
            (row.k_required
                - (row.bracket_lower / row.amplitude).max(row.amplitude / row.bracket_upper))
            .abs()
                < 1e-15
        );

        let freqs: Vec<usize> = (3..=21).step_by(2).collect();
        let sweep = bracket_bounds(&model, &freqs, 0.05).unwrap();
        // t non-decreasing along the sweep.
        for w in sweep.rows.windows(2) {
            assert!(w[1].t >= w[0].t);
        }
        // A single K validates every row by construction; its prefix
        // stabilizes within a factor 2.
        let prefix = sweep.prefix_ks();
        assert!(prefix.last().unwrap() / prefix[0] < 2.0 + 1e-12 || prefix.len() < 2);
    }

    #[test]
    fn horseshoe_certificate_c4() {
        let model = c4_model();
        let (cert, _snake) = build_horseshoe(&model, 3, 0.05).unwrap();
        assert_eq!(cert.t, 12);
        assert_eq!(cert.components.len(), 3);
        assert_eq!(cert.transition.symbols, 3);
        let expect = 3.0f64.ln() / 13.0;
        assert!((cert.certified_entropy - expect).abs() < 1e-15);
        for c in &cert.components {
            assert!(c.overshoot_ratio > 0.1, "weak crossing: {}", c.overshoot_ratio);
            assert!(c.stable_margin > 0.1 / (2.0 * 3.0));
        }
    }

    #[test]
    fn horseshoe_single_component_for_frequency_one() {
        let model = c4_model();
        let (cert, _snake) = build_horseshoe(&model, 1, 0.05).unwrap();
        assert_eq!(cert.components.len(), 1);
        assert_eq!(cert.certified_entropy, 0.0);
    }

    #[test]
    fn snake_jacobians_symplectic_along_orbits() {
        let model = c4_model();
        let (_cert, snake) = build_horseshoe(&model, 3, 0.05).unwrap();
        let mut worst = 0.0f64;
        let mut z = vec![2.1973e-4, 0.31];
        for _ in 0..10_000 {
            let jac = snake.jacobian(&z).unwrap();
            worst = worst.max(jac.residual());
            z = snake.evaluate(&z).unwrap();
        }
        assert!(worst < 1e-12, "snake orbit residual {worst}");
    }

    #[test]
    fn two_dimensional_horseshoe() {
        let model = build_tangency_model(2, &[2.5, 2.0], 1, 0.1).unwrap();
        let (cert, _snake) = build_horseshoe(&model, 3, 0.05).unwrap();
        assert_eq!(cert.components.len(), 9);
        let expect = 2.0 * 3.0f64.ln() / (1.0 + cert.t as f64);
        assert!((cert.certified_entropy - expect).abs() < 1e-15);
    }
}
