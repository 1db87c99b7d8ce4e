//! Topological entropy estimators.
//!
//! The core estimator counts `(n, ε)`-separated orbit segments: two seeds are
//! separated when some iterate `j <= n` puts them more than `ε` apart in the
//! model's sup metric. Counts are certified lower bounds — every retained
//! pair is checked — built greedily over a deterministically ordered seed
//! list with a time-0 spatial hash for the candidate neighborhood, and grown
//! incrementally in `n` so each table column extends the previous one.
//! Growth rates come from a least-squares fit of `log r` against `n` over an
//! automatically selected pre-saturation window.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::dynamics::{coord_distance, CoordKind, Dynamics};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// A certified `(n, ε)`-separated subset of a seed list.
///
/// `retained` indexes into the seed list; every pair of retained seeds is
/// `ε`-distinct within `n` steps.
#[derive(Debug)]
pub struct SeparatedSet {
    pub retained: Vec<usize>,
    pub n: usize,
    pub epsilon: f64,
}

/// Greedy `(n, ε)`-separated subset of `seeds` (row-major, `dim` coordinates
/// per seed), processed in list order. Returns a lower bound for `r(n, ε)`
/// over the seed set.
pub fn separated_count<M: Dynamics>(
    model: &M,
    seeds: &[f64],
    n: usize,
    epsilon: f64,
) -> Result<usize> {
    let counts = separated_table(model, seeds, &[n], &[epsilon])?;
    Ok(counts.count(0, 0))
}

/// Count table `r(n, ε)` over an `(n, ε)` grid.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CountTable {
    pub n_values: Vec<usize>,
    pub epsilons: Vec<f64>,
    /// `counts[e][j]` = certified lower bound for `r(n_values[j], epsilons[e])`.
    pub counts: Vec<Vec<usize>>,
    /// Size of the seed pool the counts were drawn from; 0 when unknown.
    pub seed_count: usize,
}

impl CountTable {
    pub fn count(&self, eps_index: usize, n_index: usize) -> usize {
        self.counts[eps_index][n_index]
    }

    /// Monotonicity required of every produced table: counts non-decreasing
    /// in `n`, non-increasing in `ε`.
    pub fn is_monotone(&self) -> bool {
        for row in &self.counts {
            if row.windows(2).any(|w| w[1] < w[0]) {
                return false;
            }
        }
        for e in 1..self.counts.len() {
            // epsilons are sorted descending, so later rows may only grow.
            for j in 0..self.n_values.len() {
                if self.counts[e][j] < self.counts[e - 1][j] {
                    return false;
                }
            }
        }
        true
    }
}

struct OrbitArena {
    data: Vec<f64>,
    dim: usize,
    steps: usize,
}

impl OrbitArena {
    fn point(&self, seed: usize, step: usize) -> &[f64] {
        let stride = self.dim * (self.steps + 1);
        let base = seed * stride + step * self.dim;
        &self.data[base..base + self.dim]
    }
}

/// Builds certified count tables for all pairs in `n_values x epsilons`.
///
/// Seeds are consumed in the order given. For each `ε` (internally processed
/// with retained sets grown as `n` increases) the retained set at a smaller
/// `n` seeds the run at the next `n`, so `r` is non-decreasing in `n` by
/// construction. Across `ε` the final counts take the monotone envelope: a
/// set separated at some `ε` is separated at every smaller `ε`, so the
/// envelope is still a certified lower bound.
pub fn separated_table<M: Dynamics>(
    model: &M,
    seeds: &[f64],
    n_values: &[usize],
    epsilons: &[f64],
) -> Result<CountTable> {
    let dim = model.dim();
    if dim == 0 || !seeds.len().is_multiple_of(dim) {
        return Err(Error::Dimension {
            expected: dim,
            got: seeds.len(),
        });
    }
    if n_values.is_empty() || epsilons.is_empty() {
        return Err(Error::Domain("empty (n, ε) grid".into()));
    }
    if epsilons.iter().any(|e| *e <= 0.0) {
        return Err(Error::Domain("ε must be positive".into()));
    }
    let mut n_sorted = n_values.to_vec();
    n_sorted.sort_unstable();
    n_sorted.dedup();
    if n_sorted != n_values {
        return Err(Error::Domain(
            "n values must be strictly increasing".into(),
        ));
    }
    let mut eps_sorted = epsilons.to_vec();
    eps_sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite ε"));

    let seed_count = seeds.len() / dim;
    let n_max = *n_values.last().unwrap();

    // Precompute all orbits once; everything after is table lookups.
    let mut data = vec![0.0f64; seed_count * dim * (n_max + 1)];
    for s in 0..seed_count {
        let stride = dim * (n_max + 1);
        data[s * stride..s * stride + dim].copy_from_slice(&seeds[s * dim..(s + 1) * dim]);
        for step in 0..n_max {
            let (done, rest) = data[s * stride..].split_at_mut((step + 1) * dim);
            let src = &done[step * dim..];
            model.step(src, &mut rest[..dim])?;
        }
    }
    let arena = OrbitArena {
        data,
        dim,
        steps: n_max,
    };

    let topo = model.topology().to_vec();
    let mut counts_by_eps: Vec<Vec<usize>> = Vec::with_capacity(eps_sorted.len());
    for &eps in &eps_sorted {
        counts_by_eps.push(separated_chain(&arena, &topo, seed_count, n_values, eps));
    }

    // Monotone envelope across ε (descending order: each row may only grow).
    for e in 1..counts_by_eps.len() {
        let (done, rest) = counts_by_eps.split_at_mut(e);
        for (current, previous) in rest[0].iter_mut().zip(done[e - 1].iter()) {
            if *current < *previous {
                *current = *previous;
            }
        }
    }

    Ok(CountTable {
        n_values: n_values.to_vec(),
        epsilons: eps_sorted,
        counts: counts_by_eps,
        seed_count,
    })
}

fn pair_separated(
    arena: &OrbitArena,
    topo: &[CoordKind],
    a: usize,
    b: usize,
    n: usize,
    eps: f64,
    from_step: usize,
) -> bool {
    for step in from_step..=n {
        let pa = arena.point(a, step);
        let pb = arena.point(b, step);
        let mut d = 0.0f64;
        for i in 0..arena.dim {
            d = d.max(coord_distance(pa[i], pb[i], topo[i]));
        }
        if d > eps {
            return true;
        }
    }
    false
}

/// Greedy separated sets grown incrementally over the `n` ladder for one ε.
fn separated_chain(
    arena: &OrbitArena,
    topo: &[CoordKind],
    seed_count: usize,
    n_values: &[usize],
    eps: f64,
) -> Vec<usize> {
    let dim = arena.dim;
    // Spatial hash on time-0 cells of side ε: a candidate can only be blocked
    // by a retained seed within ε at time 0, i.e. in a neighboring cell.
    let cell_of = |seed: usize| -> Vec<i64> {
        let p = arena.point(seed, 0);
        (0..dim).map(|i| (p[i] / eps).floor() as i64).collect()
    };
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let mut retained: Vec<usize> = Vec::new();
    let mut blocked: Vec<(usize, usize)> = (0..seed_count).map(|s| (s, usize::MAX)).collect();
    let mut counts = Vec::with_capacity(n_values.len());

    let mut neighbor_offsets: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::new();
        for partial in &neighbor_offsets {
            for d in [0i64, -1, 1] {
                let mut p = partial.clone();
                p.push(d);
                next.push(p);
            }
        }
        neighbor_offsets = next;
    }

    for &n in n_values {
        let mut still_blocked: Vec<(usize, usize)> = Vec::new();
        for &(cand, last_blocker) in &blocked {
            // Cached blocker first: if it still blocks, skip the full scan.
            if last_blocker != usize::MAX
                && !pair_separated(arena, topo, cand, last_blocker, n, eps, 0)
            {
                still_blocked.push((cand, last_blocker));
                continue;
            }
            let cell = cell_of(cand);
            let mut blocker = None;
            'search: for off in &neighbor_offsets {
                let key: Vec<i64> = cell.iter().zip(off.iter()).map(|(c, o)| c + o).collect();
                if let Some(members) = grid.get(&key) {
                    for &r in members {
                        if !pair_separated(arena, topo, cand, r, n, eps, 0) {
                            blocker = Some(r);
                            break 'search;
                        }
                    }
                }
            }
            match blocker {
                Some(r) => still_blocked.push((cand, r)),
                None => {
                    grid.entry(cell).or_default().push(cand);
                    retained.push(cand);
                }
            }
        }
        blocked = still_blocked;
        counts.push(retained.len());
    }
    counts
}

/// A fitted growth rate for one ε with its diagnostics.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RateFit {
    pub epsilon: f64,
    pub rate: f64,
    /// Inclusive window `[n_lo, n_hi]` used for the fit.
    pub window: (usize, usize),
    pub fit_residual: f64,
    pub saturated: bool,
}

/// Entropy estimate: fitted growth rates per ε and their maximum.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EntropyEstimate {
    pub table: CountTable,
    pub fits: Vec<RateFit>,
    pub value: f64,
}

/// Fraction of the peak per-step growth below which the tail of the count
/// table is treated as saturated and excluded from the fit window.
pub const SATURATION_RATIO: f64 = 0.4;

/// Fraction of the seed pool beyond which counts are considered
/// depletion-biased: the greedy set can no longer grow freely once a sizable
/// share of all seeds is retained, which bends the curve below the true rate.
pub const DEPLETION_FRACTION: f64 = 0.15;

/// Least-squares growth rates of `log r(n, ε)` in `n` over the automatically
/// selected window; the estimate is the maximum over ε (the ε → 0 limit is
/// monotone, so the smallest sampled ε dominates in well-resolved tables).
///
/// Window selection per ε: trailing cells are dropped while their count
/// exceeds [`DEPLETION_FRACTION`] of the seed pool or their per-step growth
/// falls below [`SATURATION_RATIO`] of the peak; then leading cells whose
/// increment deviates from the median of the rest (the packing transient)
/// are trimmed while at least 3 points remain. Fit windows need at least 3
/// points; saturated columns are flagged.
pub fn entropy_from_counts(table: &CountTable) -> Result<EntropyEstimate> {
    entropy_from_counts_windowed(table, None)
}

/// Same with an explicit inclusive window `[n_lo, n_hi]` overriding the
/// automatic selection for every ε.
pub fn entropy_from_counts_windowed(
    table: &CountTable,
    window: Option<(usize, usize)>,
) -> Result<EntropyEstimate> {
    let mut fits = Vec::with_capacity(table.epsilons.len());
    for (e, eps) in table.epsilons.iter().enumerate() {
        let ns: Vec<f64> = table.n_values.iter().map(|&n| n as f64).collect();
        let logs: Vec<f64> = table.counts[e]
            .iter()
            .map(|&c| (c.max(1) as f64).ln())
            .collect();

        let (lo, hi, saturated) = match window {
            Some((wlo, whi)) => {
                let lo = table.n_values.iter().position(|&n| n >= wlo).ok_or_else(|| {
                    Error::Domain(format!("window start {wlo} beyond the sampled n range"))
                })?;
                let hi = table
                    .n_values
                    .iter()
                    .rposition(|&n| n <= whi)
                    .ok_or_else(|| {
                        Error::Domain(format!("window end {whi} below the sampled n range"))
                    })?;
                (lo, hi, false)
            }
            None => auto_window(&ns, &logs, &table.counts[e], table.seed_count, eps)?,
        };
        if hi - lo + 1 < 3 {
            return Err(Error::Domain(format!(
                "fit window for ε = {eps} has fewer than 3 points (saturation at n = {})",
                table.n_values[hi]
            )));
        }
        let (rate, residual) = least_squares_slope(&ns[lo..=hi], &logs[lo..=hi]);
        fits.push(RateFit {
            epsilon: *eps,
            rate: rate.max(0.0),
            window: (table.n_values[lo], table.n_values[hi]),
            fit_residual: residual,
            saturated,
        });
    }
    let value = fits.iter().map(|f| f.rate).fold(0.0, f64::max);
    Ok(EntropyEstimate {
        table: table.clone(),
        fits,
        value,
    })
}

fn auto_window(
    ns: &[f64],
    logs: &[f64],
    counts: &[usize],
    seed_count: usize,
    eps: &f64,
) -> Result<(usize, usize, bool)> {
    let mut increments = Vec::with_capacity(logs.len().saturating_sub(1));
    for j in 1..logs.len() {
        increments.push((logs[j] - logs[j - 1]) / (ns[j] - ns[j - 1]));
    }
    let peak = increments.iter().cloned().fold(0.0, f64::max);
    let depletion_cap = if seed_count > 0 {
        (seed_count as f64 * DEPLETION_FRACTION) as usize
    } else {
        usize::MAX
    };
    let truncate = |cap: usize| -> (usize, bool) {
        let mut hi = logs.len() - 1;
        let mut saturated = false;
        while hi >= 1
            && ((counts[hi] > cap && increments[hi - 1] > 0.0)
                || increments[hi - 1] < SATURATION_RATIO * peak)
        {
            hi -= 1;
            saturated = true;
        }
        (hi, saturated)
    };
    let (mut hi, mut saturated) = truncate(depletion_cap);
    if hi < 2 {
        // The depletion guard left too little data; fall back to the
        // saturation-only window and accept the bias.
        (hi, saturated) = truncate(usize::MAX);
    }
    if hi < 2 {
        return Err(Error::Domain(format!(
            "fit window for ε = {eps} has fewer than 3 points before saturation"
        )));
    }
    // Leading packing transient: trim while the first increment deviates
    // from the median of the remaining ones.
    let mut lo = 0usize;
    while hi - lo + 1 > 3 {
        let rest: Vec<f64> = increments[lo + 1..hi].to_vec();
        let med = median(&rest);
        if med > 0.0 && (increments[lo] - med).abs() > 0.15 * med {
            lo += 1;
        } else {
            break;
        }
    }
    Ok((lo, hi, saturated))
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite increments"));
    let mid = v.len() / 2;
    if v.len().is_multiple_of(2) {
        0.5 * (v[mid - 1] + v[mid])
    } else {
        v[mid]
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = xs
        .iter()
        .zip(ys.iter())
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        .sqrt()
        / n.sqrt();
    (slope, residual)
}

/// Uniform grid seeds over the torus coordinates (plane coordinates are not
/// supported here; use an explicit seed box instead), optionally shuffled by
/// a seed-order hash.
pub fn torus_grid_seeds<M: Dynamics>(
    model: &M,
    per_dim: usize,
    order_seed: Option<u64>,
) -> Result<Vec<f64>> {
    let dim = model.dim();
    if model.topology().iter().any(|k| *k != CoordKind::Torus) {
        return Err(Error::Domain(
            "torus_grid_seeds requires all-torus topology".into(),
        ));
    }
    let total = per_dim.pow(dim as u32);
    let mut order: Vec<usize> = (0..total).collect();
    if let Some(seed) = order_seed {
        SplitMix64::new(seed).shuffle(&mut order);
    }
    let mut seeds = Vec::with_capacity(total * dim);
    for idx in order {
        let mut rest = idx;
        for _ in 0..dim {
            seeds.push((rest % per_dim) as f64 / per_dim as f64);
            rest /= per_dim;
        }
    }
    Ok(seeds)
}

/// Uniform grid seeds inside an axis-aligned box, optionally shuffled.
pub fn box_grid_seeds(
    lo: &[f64],
    hi: &[f64],
    per_dim: usize,
    order_seed: Option<u64>,
) -> Result<Vec<f64>> {
    if lo.len() != hi.len() || lo.is_empty() {
        return Err(Error::Domain("box bounds must have equal nonzero length".into()));
    }
    if per_dim < 2 {
        return Err(Error::Domain("per_dim must be at least 2".into()));
    }
    let dim = lo.len();
    let total = per_dim.pow(dim as u32);
    let mut order: Vec<usize> = (0..total).collect();
    if let Some(seed) = order_seed {
        SplitMix64::new(seed).shuffle(&mut order);
    }
    let mut seeds = Vec::with_capacity(total * dim);
    for idx in order {
        let mut rest = idx;
        for d in 0..dim {
            let cell = rest % per_dim;
            rest /= per_dim;
            let frac = cell as f64 / (per_dim - 1) as f64;
            seeds.push(lo[d] + (hi[d] - lo[d]) * frac);
        }
    }
    Ok(seeds)
}

/// A subshift of finite type given by a 0/1 transition matrix.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct TransitionMatrixModel {
    pub symbols: usize,
    /// Row-major 0/1 entries.
    pub matrix: Vec<u8>,
}

impl TransitionMatrixModel {
    pub fn new(symbols: usize, matrix: Vec<u8>) -> Result<Self> {
        if matrix.len() != symbols * symbols {
            return Err(Error::Dimension {
                expected: symbols * symbols,
                got: matrix.len(),
            });
        }
        if matrix.iter().any(|v| *v > 1) {
            return Err(Error::Domain("transition entries must be 0 or 1".into()));
        }
        Ok(Self { symbols, matrix })
    }

    pub fn full_shift(symbols: usize) -> Self {
        Self {
            symbols,
            matrix: vec![1; symbols * symbols],
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> u8 {
        self.matrix[i * self.symbols + j]
    }
}

/// Log spectral radius of the transition matrix by power iteration
/// (tolerance 1e-10). Nilpotent matrices (empty subshift) return `-∞`.
pub fn shift_entropy(tm: &TransitionMatrixModel) -> Result<f64> {
    let k = tm.symbols;
    if k == 0 || tm.matrix.iter().all(|v| *v == 0) {
        return Ok(f64::NEG_INFINITY);
    }
    let a = DMatrix::<f64>::from_fn(k, k, |i, j| tm.entry(i, j) as f64);
    let mut v = nalgebra::DVector::<f64>::from_element(k, 1.0);
    let mut lambda = 0.0f64;
    for _ in 0..10_000 {
        let w = &a * &v;
        let norm = w.amax();
        if norm == 0.0 {
            // Power of the matrix annihilates the positive cone: nilpotent.
            return Ok(f64::NEG_INFINITY);
        }
        let next = w / norm;
        let delta = (lambda - norm).abs();
        lambda = norm;
        v = next;
        if delta < 1e-10 * lambda.max(1.0) {
            return Ok(lambda.ln());
        }
    }
    // Periodic (non-primitive) matrices make the iteration oscillate; fall
    // back to the averaged growth of ‖A^m 1‖ which converges to ρ.
    let mut v = nalgebra::DVector::<f64>::from_element(k, 1.0);
    let mut log_total = 0.0f64;
    let reps = 200usize;
    for _ in 0..reps {
        v = &a * &v;
        let norm = v.amax();
        if norm == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        log_total += norm.ln();
        v /= norm;
    }
    Ok(log_total / reps as f64)
}

/// Entropy of the snake horseshoe: `n log N / (T + τ t)`. Requires odd `N`.
pub fn horseshoe_lower_bound(
    big_n: usize,
    n: usize,
    connector_time: usize,
    tau: usize,
    t: usize,
) -> Result<f64> {
    if big_n == 0 || big_n.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "snake frequency must be a positive odd integer, got {big_n}"
        )));
    }
    if n == 0 || connector_time == 0 || tau == 0 || t == 0 {
        return Err(Error::Domain("all horseshoe times must be positive".into()));
    }
    Ok(n as f64 * (big_n as f64).ln() / (connector_time as f64 + tau as f64 * t as f64))
}

/// The bound `(1/(T+τt)) log N > n χ⁺_min - ε` that certifies the horseshoe
/// entropy approaches the exponent target.
pub fn check_entropy_exponent_bound(
    big_n: usize,
    n: usize,
    connector_time: usize,
    tau: usize,
    t: usize,
    chi_min_plus: f64,
    epsilon: f64,
) -> bool {
    let lhs = (big_n as f64).ln() / (connector_time as f64 + tau as f64 * t as f64);
    lhs > n as f64 * chi_min_plus - epsilon
}

/// Consistency report for the entropy-vs-exponents direction.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RuelleReport {
    pub entropy_estimate: f64,
    pub s_lower: f64,
    pub tolerance: f64,
    pub violated: bool,
    /// Plain-language cause when flagged: the estimate exceeding the
    /// exponent sum signals estimator over-count or an insufficient periodic
    /// search, never a refutation of the inequality itself.
    pub cause: Option<String>,
}

pub fn ruelle_consistency(entropy_estimate: f64, s_lower: f64, tolerance: f64) -> RuelleReport {
    let violated = entropy_estimate > s_lower + tolerance;
    RuelleReport {
        entropy_estimate,
        s_lower,
        tolerance,
        violated,
        cause: violated.then(|| {
            format!(
                "entropy estimate {entropy_estimate:.4} exceeds exponent sum {s_lower:.4} + {tolerance:.2}: \
                 separated-set over-count or periodic search too shallow"
            )
        }),
    }
}
