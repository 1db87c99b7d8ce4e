//! Periodic symplectic linear systems with transitions.
//!
//! A [`Word`] is a finite sequence of symplectic letters stored in orbit
//! order: index 0 is the matrix applied first, and the word's product is
//! `letters[τ-1] · … · letters[0]`. On diagonalizable words an
//! [`EigenFrame`] orders the eigendirections by modulus so that the
//! symplectic pairing couples ranks `i` and `2n+1-i`; transposition
//! transitions swap adjacent eigendirections and compose into the cyclic
//! shifts used by the exponent-mixing construction, which equalizes all
//! positive exponents of a periodic word while preserving their sum.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::sympl::{
    self, lyapunov_vector_periodic, op_norm, word_product, LyapunovVector, Spectrum,
    SymplecticMatrix, DEFAULT_ZERO_TOL,
};

/// A finite ordered sequence of symplectic letters (orbit order).
#[derive(Debug, Clone)]
pub struct Word {
    letters: Vec<SymplecticMatrix>,
}

impl Word {
    pub fn new(letters: Vec<SymplecticMatrix>) -> Result<Self> {
        let first = letters
            .first()
            .ok_or_else(|| Error::Domain("a word must have at least one letter".into()))?;
        let dim = first.dim();
        for l in &letters {
            if l.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: l.dim(),
                });
            }
        }
        Ok(Self { letters })
    }

    pub fn singleton(letter: SymplecticMatrix) -> Self {
        Self {
            letters: vec![letter],
        }
    }

    pub fn letters(&self) -> &[SymplecticMatrix] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn dim_half(&self) -> usize {
        self.letters[0].dim_half()
    }

    /// Product applying the letter at index 0 first.
    pub fn product(&self) -> Result<SymplecticMatrix> {
        word_product(&self.letters)
    }

    pub fn lyapunov_vector(&self) -> Result<LyapunovVector> {
        lyapunov_vector_periodic(&self.letters)
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        self.product()?.spectrum()
    }

    /// Word repeated `k` times.
    pub fn pow(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("word power must be positive".into()));
        }
        let mut letters = Vec::with_capacity(self.len() * k);
        for _ in 0..k {
            letters.extend_from_slice(&self.letters);
        }
        Ok(Self { letters })
    }

    /// Cyclic rotation moving the letter at `shift` to the front.
    pub fn rotate(&self, shift: usize) -> Self {
        let mut letters = self.letters.clone();
        letters.rotate_left(shift % self.len());
        Self { letters }
    }

    /// True iff the word repeats with some strict divisor period, letters
    /// compared in operator norm within `tol`.
    pub fn is_power(&self, tol: f64) -> bool {
        let len = self.len();
        for d in 1..len {
            if !len.is_multiple_of(d) {
                continue;
            }
            let repeats = (d..len).all(|s| {
                let diff = self.letters[s].matrix() - self.letters[s % d].matrix();
                op_norm(&diff) <= tol
            });
            if repeats {
                return true;
            }
        }
        false
    }
}

/// True iff equal lengths and every pair of corresponding letters is within
/// `epsilon` in operator norm.
pub fn words_close(w1: &Word, w2: &Word, epsilon: f64) -> bool {
    if w1.len() != w2.len() {
        return false;
    }
    w1.letters()
        .iter()
        .zip(w2.letters().iter())
        .all(|(a, b)| op_norm(&(a.matrix() - b.matrix())) <= epsilon)
}

/// Transition words connecting a family of periodic words, per ordered pair
/// of point indices. Every letter of every transition must be symplectic.
#[derive(Debug, Clone)]
pub struct TransitionFamily {
    pub points: Vec<String>,
    pub epsilon: f64,
    words: BTreeMap<(usize, usize), Vec<Word>>,
}

impl TransitionFamily {
    pub fn new(points: Vec<String>, epsilon: f64) -> Self {
        Self {
            points,
            epsilon,
            words: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, from: usize, to: usize, word: Word) -> Result<()> {
        if from >= self.points.len() || to >= self.points.len() {
            return Err(Error::Domain(format!(
                "transition endpoints ({from}, {to}) outside the family of {} points",
                self.points.len()
            )));
        }
        for letter in word.letters() {
            if letter.residual() > 1e-9 {
                return Err(Error::Numeric(format!(
                    "transition letter fails symplecticity: residual {:.3e}",
                    letter.residual()
                )));
            }
        }
        self.words.entry((from, to)).or_default().push(word);
        Ok(())
    }

    pub fn get(&self, from: usize, to: usize) -> &[Word] {
        self.words.get(&(from, to)).map_or(&[], Vec::as_slice)
    }
}

/// Eigendirections of a diagonalizable word, ordered by eigenvalue modulus
/// ascending and rescaled so that `ω(E_i, E_{2n+1-i}) = 1` for `i <= n`.
#[derive(Debug, Clone)]
pub struct EigenFrame {
    word: Word,
    /// Column `i` is the (rescaled) eigendirection of rank `i+1`.
    basis: DMatrix<f64>,
    eigenvalues: Vec<f64>,
}

const FRAME_RESIDUAL_TOL: f64 = 1e-7;

impl EigenFrame {
    /// Builds the frame when the word product has only real eigenvalues with
    /// pairwise relative gaps above `tol`; returns `Ok(None)` otherwise.
    pub fn from_word(word: &Word, tol: f64) -> Result<Option<Self>> {
        let product = word.product()?;
        let spec = product.spectrum()?;
        let values = spec.values();
        let dim = values.len();
        let n = dim / 2;

        for v in values {
            if v.im.abs() > tol * v.norm().max(1.0) {
                return Ok(None);
            }
        }
        let mut reals: Vec<f64> = values.iter().map(|v| v.re).collect();
        for i in 0..dim {
            for j in (i + 1)..dim {
                let gap = (reals[i] - reals[j]).abs();
                if gap <= tol * reals[i].abs().max(reals[j].abs()) {
                    return Ok(None);
                }
            }
        }

        // Sort by modulus, then pin the reciprocal partner of rank i at rank
        // 2n+1-i so the symplectic pairing is positional.
        reals.sort_by(|a, b| {
            (a.abs(), *a)
                .partial_cmp(&(b.abs(), *b))
                .expect("finite eigenvalues")
        });
        let mut ordered = reals;
        for i in 0..n {
            let target = 1.0 / ordered[i];
            let mut best = n;
            let mut best_err = f64::INFINITY;
            for (j, cand) in ordered.iter().enumerate().take(dim).skip(n) {
                let err = (cand - target).abs() / target.abs().max(1e-300);
                if err < best_err {
                    best_err = err;
                    best = j;
                }
            }
            if best_err > 1e-5 {
                return Err(Error::Numeric(format!(
                    "spectrum is not reciprocally paired: rank {} has no partner (err {:.3e})",
                    i + 1,
                    best_err
                )));
            }
            ordered.swap(dim - 1 - i, best);
        }

        let mat = product.matrix();
        let mut basis = DMatrix::<f64>::zeros(dim, dim);
        for (idx, &lambda) in ordered.iter().enumerate() {
            let v = eigenvector_for(mat, lambda)?;
            basis.set_column(idx, &v);
        }

        let mut frame = Self {
            word: word.clone(),
            basis,
            eigenvalues: ordered,
        };
        frame.normalize_symplectic()?;
        frame.check_residuals(mat)?;
        Ok(Some(frame))
    }

    fn normalize_symplectic(&mut self) -> Result<()> {
        let dim = self.eigenvalues.len();
        let n = dim / 2;
        for i in 0..n {
            let j = dim - 1 - i;
            let u = self.basis.column(i).into_owned();
            let v = self.basis.column(j).into_owned();
            let c = sympl::omega(&u, &v);
            if c.abs() < 1e-12 {
                return Err(Error::Numeric(format!(
                    "frame is not symplectically normalizable: ω(E_{}, E_{}) = {c:.3e}",
                    i + 1,
                    j + 1
                )));
            }
            self.basis.set_column(i, &(u / c));
        }
        Ok(())
    }

    fn check_residuals(&self, product: &DMatrix<f64>) -> Result<()> {
        for (idx, &lambda) in self.eigenvalues.iter().enumerate() {
            let v = self.basis.column(idx).into_owned();
            let res = (product * &v - lambda * &v).amax() / (lambda.abs() * v.amax()).max(1e-300);
            if res > FRAME_RESIDUAL_TOL {
                return Err(Error::Numeric(format!(
                    "eigendirection {} residual {res:.3e} exceeds {FRAME_RESIDUAL_TOL:.1e}",
                    idx + 1
                )));
            }
        }
        Ok(())
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn dim_half(&self) -> usize {
        self.eigenvalues.len() / 2
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues ordered by modulus ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigendirection of rank `i` (1-based).
    pub fn direction(&self, rank: usize) -> DVector<f64> {
        self.basis.column(rank - 1).into_owned()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Lyapunov vector of the base word from the frame eigenvalues.
    pub fn lyapunov_vector(&self) -> LyapunovVector {
        let tau = self.word.len() as f64;
        LyapunovVector::new(
            self.eigenvalues
                .iter()
                .map(|l| l.abs().ln() / tau)
                .collect(),
        )
    }
}

fn eigenvector_for(mat: &DMatrix<f64>, lambda: f64) -> Result<DVector<f64>> {
    let dim = mat.nrows();
    let shifted = mat - DMatrix::<f64>::identity(dim, dim) * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numeric("SVD failed while extracting eigenvector".into()))?;
    let mut v = v_t.row(dim - 1).transpose();
    // Deterministic sign: largest-magnitude entry positive.
    let mut pivot = 0;
    for k in 0..dim {
        if v[k].abs() > v[pivot].abs() {
            pivot = k;
        }
    }
    if v[pivot] < 0.0 {
        v = -v;
    }
    Ok(v)
}

/// Diagonalizability probe: `Some(frame)` iff the product spectrum is real
/// with all pairwise relative gaps above `tol`.
pub fn is_diagonalizable_real_simple(word: &Word, tol: f64) -> Result<Option<EigenFrame>> {
    EigenFrame::from_word(word, tol)
}

/// Domination test for the rank-`i` splitting extracted from the word's
/// eigenframe: for every cyclic starting position, the `m`-step products must
/// satisfy `‖P|E‖ · ‖P⁻¹|F‖ <= 1/2`.
pub fn domination_test(word: &Word, split_index: usize, m: usize, tol: f64) -> Result<bool> {
    let frame = EigenFrame::from_word(word, tol)?.ok_or_else(|| {
        Error::Domain(format!(
            "no invariant splitting of index {split_index} extractable: product is not real-diagonalizable"
        ))
    })?;
    domination_test_with_splitting(word, frame.basis(), split_index, m, tol)
}

/// Same test with a caller-supplied candidate splitting: the first
/// `split_index` columns of `basis` span the dominated bundle at position 0.
pub fn domination_test_with_splitting(
    word: &Word,
    basis: &DMatrix<f64>,
    split_index: usize,
    m: usize,
    tol: f64,
) -> Result<bool> {
    let dim = word.letters()[0].dim();
    let tau = word.len();
    let i = split_index;
    if i == 0 || i >= dim {
        return Err(Error::Domain(format!(
            "split index must lie in 1..={}, got {i}",
            dim - 1
        )));
    }
    if m == 0 {
        return Err(Error::Domain("domination horizon m must be positive".into()));
    }
    if basis.nrows() != dim || basis.ncols() != dim {
        return Err(Error::Dimension {
            expected: dim,
            got: basis.nrows().max(basis.ncols()),
        });
    }

    // Propagate the candidate basis along the orbit, normalizing columns.
    let mut bases = Vec::with_capacity(tau + 1);
    bases.push(basis.clone());
    for letter in word.letters() {
        let mut next = letter.matrix() * bases.last().unwrap();
        for c in 0..dim {
            let norm = next.column(c).norm();
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::Numeric(
                    "splitting degenerated along the orbit".into(),
                ));
            }
            let scaled = next.column(c) / norm;
            next.set_column(c, &scaled);
        }
        bases.push(next);
    }

    // Invariance over one period: the closed-orbit return must preserve both
    // bundles, otherwise the candidate is not a splitting at all.
    let inv_tol = tol.max(1e-7);
    for (lo, hi) in [(0usize, i), (i, dim)] {
        let q0 = orthonormal_span(&bases[0], lo, hi);
        let q1 = orthonormal_span(&bases[tau], lo, hi);
        let gap = (&q0 * q0.transpose() - &q1 * q1.transpose()).amax();
        if gap > inv_tol {
            return Err(Error::Domain(format!(
                "no invariant splitting of index {i}: period return moves the bundle by {gap:.3e}"
            )));
        }
    }

    let letters = word.letters();
    for s in 0..tau {
        // m-step product from position s, with magnitude scaling.
        let mut fwd = DMatrix::<f64>::identity(dim, dim);
        let mut log_fwd = 0.0;
        let mut inv = DMatrix::<f64>::identity(dim, dim);
        let mut log_inv = 0.0;
        for k in 0..m {
            let a = &letters[(s + k) % tau];
            fwd = a.matrix() * fwd;
            let mag = fwd.amax();
            if mag > 1e120 {
                fwd /= mag;
                log_fwd += mag.ln();
            }
            inv *= a.inverse().into_matrix();
            let mag = inv.amax();
            if mag > 1e120 {
                inv /= mag;
                log_inv += mag.ln();
            }
        }
        let q_e = orthonormal_span(&bases[s], 0, i);
        let q_f = orthonormal_span(&bases[(s + m) % tau], i, dim);
        let norm_e = op_norm(&(&fwd * q_e)).ln() + log_fwd;
        let norm_f = op_norm(&(&inv * q_f)).ln() + log_inv;
        if norm_e + norm_f > 0.5f64.ln() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn orthonormal_span(basis: &DMatrix<f64>, lo: usize, hi: usize) -> DMatrix<f64> {
    let cols = basis.columns(lo, hi - lo).into_owned();
    cols.qr().q()
}

/// True iff the product spectrum, ordered by modulus, carries a simple
/// complex-conjugate pair at positions `(i, i+1)` with strict relative
/// modulus gaps to positions `i-1` and `i+2`.
pub fn has_complex_rank(word: &Word, i: usize, tol: f64) -> Result<bool> {
    let dim = word.letters()[0].dim();
    if i == 0 || i >= dim {
        return Err(Error::Domain(format!(
            "rank must lie in 1..={}, got {i}",
            dim - 1
        )));
    }
    let spec = word.spectrum()?;
    let values = spec.values();
    let a = values[i - 1];
    let b = values[i];

    let non_real = a.im.abs() > tol * a.norm() && b.im.abs() > tol * b.norm();
    if !non_real {
        return Ok(false);
    }
    if (a - b.conj()).norm() > tol * a.norm().max(1.0) {
        return Ok(false);
    }
    // Simplicity: nothing else clusters onto either member of the pair.
    let near_a = values
        .iter()
        .filter(|v| (**v - a).norm() <= sympl::EIGEN_CLUSTER_REL_TOL * a.norm())
        .count();
    let near_b = values
        .iter()
        .filter(|v| (**v - b).norm() <= sympl::EIGEN_CLUSTER_REL_TOL * b.norm())
        .count();
    if near_a != 1 || near_b != 1 {
        return Ok(false);
    }
    let modulus = a.norm();
    if i >= 2 && values[i - 2].norm() >= modulus * (1.0 - tol) {
        return Ok(false);
    }
    if i + 1 < dim && values[i + 1].norm() <= modulus * (1.0 + tol) {
        return Ok(false);
    }
    Ok(true)
}

/// The perturbed transition swapping eigendirections of ranks `i` and `i+1`
/// (1-based), acting as the induced symplectic map on the conjugate ranks and
/// as the identity elsewhere.
///
/// Ranks `i`, `i+1` must not form a symplectically conjugate pair unless
/// `n = 1`, where the swap is the quarter turn of the plane.
pub fn transposition_transition(frame: &EigenFrame, i: usize) -> Result<SymplecticMatrix> {
    let dim = frame.dim();
    let n = frame.dim_half();
    if i == 0 || i >= dim {
        return Err(Error::Domain(format!(
            "transposition rank must lie in 1..={}, got {i}",
            dim - 1
        )));
    }
    // Rank i pairs with 2n+1-i; the conjugate case i = n only for n = 1.
    if i == n && n > 1 {
        return Err(Error::Domain(
            "ranks n and n+1 form a symplectically conjugate pair; swap is only defined for n = 1"
                .into(),
        ));
    }

    let sigma = if n == 1 {
        // Quarter turn: E_1 -> -E_2, E_2 -> E_1 (sign on one image keeps ω).
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
    } else {
        let mut s = DMatrix::<f64>::identity(dim, dim);
        let (a, b) = (i - 1, i); // 0-indexed ranks i, i+1
        let (ac, bc) = (dim - 1 - a, dim - 1 - b); // conjugate ranks
        for &(p, q) in &[(a, b), (ac, bc)] {
            s[(p, p)] = 0.0;
            s[(q, q)] = 0.0;
            s[(p, q)] = 1.0;
            s[(q, p)] = 1.0;
        }
        s
    };

    let basis = frame.basis();
    let binv = basis
        .clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Numeric("eigenframe basis is singular".into()))?;
    let t = basis * sigma * binv;
    let residual = sympl::symplectic_residual(&t)?;
    if residual > 1e-8 {
        return Err(Error::Numeric(format!(
            "transposition transition fails symplecticity: residual {residual:.3e}"
        )));
    }
    Ok(SymplecticMatrix::new_unchecked(t))
}

/// Letters (orbit order) realizing the cyclic shift by `k` on the unstable
/// eigendirections: `S_k(E_{j+n}) = E_{((j+k) mod n)+n}` linewise. `k = 0`
/// yields the empty composition.
pub fn cycle_transpositions(frame: &EigenFrame, k: usize) -> Result<Vec<SymplecticMatrix>> {
    let n = frame.dim_half();
    if k > n {
        return Err(Error::Domain(format!(
            "cycle shift must lie in 0..={n}, got {k}"
        )));
    }
    let mut letters = Vec::new();
    for _ in 0..k {
        // One upward shift: adjacent swaps from the top rank down.
        for i in (n + 1..=2 * n - 1).rev() {
            letters.push(transposition_transition(frame, i)?);
        }
    }
    Ok(letters)
}

/// Product matrix of [`cycle_transpositions`]; `S_0` is the identity.
pub fn cycle_permutation(frame: &EigenFrame, k: usize) -> Result<SymplecticMatrix> {
    let letters = cycle_transpositions(frame, k)?;
    if letters.is_empty() {
        return Ok(SymplecticMatrix::identity(frame.dim_half()));
    }
    word_product(&letters)
}

/// All transposition transitions of a frame packaged as self-transitions of
/// the base word.
pub fn transposition_family(frame: &EigenFrame, epsilon: f64) -> Result<TransitionFamily> {
    let n = frame.dim_half();
    let dim = frame.dim();
    let mut family = TransitionFamily::new(vec!["base".into()], epsilon);
    for i in 1..dim {
        if i == n && n > 1 {
            continue;
        }
        let t = transposition_transition(frame, i)?;
        family.insert(0, 0, Word::singleton(t))?;
    }
    Ok(family)
}

/// The mixing word `[W(n-1,m)] ∘ … ∘ [W(0,m)]` with
/// `[W(k,m)] = [S_{n-k}][base]^m[S_k]`, stored in orbit order.
///
/// Its product fixes every unstable eigendirection linewise, so all positive
/// exponents converge to their average as `m` grows.
pub fn mixing_word(frame: &EigenFrame, m: usize) -> Result<Word> {
    if m == 0 {
        return Err(Error::Domain("mixing power m must be positive".into()));
    }
    let n = frame.dim_half();
    let base = frame.word();
    let mut letters = Vec::new();
    for k in 0..n {
        letters.extend(cycle_transpositions(frame, k)?);
        for _ in 0..m {
            letters.extend_from_slice(base.letters());
        }
        letters.extend(cycle_transpositions(frame, n - k)?);
    }
    Word::new(letters)
}

fn transition_letter_count(n: usize) -> usize {
    // Σ_k len(S_k) + len(S_{n-k}) with len(S_k) = k·(n-1).
    (0..n).map(|k| (k + (n - k)) * (n - 1)).sum()
}

/// Period of the mixing word for a given `m`.
pub fn mixing_period(frame: &EigenFrame, m: usize) -> usize {
    let n = frame.dim_half();
    n * m * frame.word().len() + transition_letter_count(n)
}

/// Closed-form prediction of the mixing word's Lyapunov vector: each unstable
/// exponent is the average of the base's unstable exponents plus the
/// transition correction `(1/τ) Σ_k log μ_{j,k}`, where `μ_{j,k}` is the
/// eigenvalue of `S_{n-k} S_k` on the j-th unstable eigendirection.
pub fn mixed_exponent_prediction(frame: &EigenFrame, m: usize) -> Result<LyapunovVector> {
    let n = frame.dim_half();
    let dim = frame.dim();
    let tau_base = frame.word().len() as f64;
    let tau_mix = mixing_period(frame, m) as f64;

    let unstable_mean = frame.eigenvalues()[n..]
        .iter()
        .map(|l| l.abs().ln() / tau_base)
        .sum::<f64>()
        / n as f64;

    // Rayleigh quotients of the composed shifts along each unstable line.
    let mut log_mu = vec![0.0f64; n];
    for k in 0..n {
        let s_k = cycle_permutation(frame, k)?;
        let s_nk = cycle_permutation(frame, n - k)?;
        let composed = s_nk.matrix() * s_k.matrix();
        for (j, log) in log_mu.iter_mut().enumerate() {
            let v = frame.direction(n + j + 1);
            let mu = v.dot(&(&composed * &v)) / v.dot(&v);
            if mu.abs() < 1e-300 {
                return Err(Error::Numeric(
                    "transition eigen-factor vanished; frame is degenerate".into(),
                ));
            }
            *log += mu.abs().ln();
        }
    }

    let mut chis = Vec::with_capacity(dim);
    for log in log_mu {
        let chi = unstable_mean + log / tau_mix;
        chis.push(chi);
        chis.push(-chi);
    }
    Ok(LyapunovVector::new(chis))
}

/// One probe of the mixing construction at a given power `m`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MixingTrial {
    pub m: usize,
    pub period: usize,
    /// `|n χ⁺_min(mixing word) - S(base)|`.
    pub gap: f64,
    pub chi_min_plus: f64,
    pub prediction_error: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct MixingVerification {
    pub m0: usize,
    pub achieved_gap: f64,
    pub target: f64,
    pub trials: Vec<MixingTrial>,
}

/// Powers probed by [`verify_mixing`]: 1..=10, then ~1.25-geometric growth.
pub fn mixing_ladder(budget_letters: usize, frame: &EigenFrame) -> Vec<usize> {
    let mut ms = Vec::new();
    let mut m = 1usize;
    while mixing_period(frame, m) <= budget_letters {
        ms.push(m);
        m = if m < 10 { m + 1 } else { (m * 5).div_ceil(4) };
    }
    ms
}

/// Searches the ladder of powers for the smallest tested `m` with
/// `|n χ⁺_min(mixing word) - S(base)| < epsilon`.
pub fn verify_mixing(
    frame: &EigenFrame,
    epsilon: f64,
    budget_letters: usize,
) -> Result<MixingVerification> {
    if epsilon <= 0.0 {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    let n = frame.dim_half() as f64;
    let target = frame.lyapunov_vector().sum_positive(DEFAULT_ZERO_TOL);
    let mut trials = Vec::new();
    let mut best_gap = f64::INFINITY;
    let ladder = mixing_ladder(budget_letters, frame);
    if ladder.is_empty() {
        return Err(Error::Budget {
            tried: 0,
            best_gap: f64::INFINITY,
        });
    }
    for &m in &ladder {
        let word = mixing_word(frame, m)?;
        let lyap = word.lyapunov_vector()?;
        let chi_min = lyap.chi_min_plus(DEFAULT_ZERO_TOL)?;
        let gap = (n * chi_min - target).abs();
        let prediction = mixed_exponent_prediction(frame, m)?;
        let prediction_error = prediction
            .chis()
            .iter()
            .zip(lyap.chis().iter())
            .map(|(p, c)| (p - c).abs())
            .fold(0.0, f64::max);
        trials.push(MixingTrial {
            m,
            period: word.len(),
            gap,
            chi_min_plus: chi_min,
            prediction_error,
        });
        best_gap = best_gap.min(gap);
        if gap < epsilon {
            return Ok(MixingVerification {
                m0: m,
                achieved_gap: gap,
                target,
                trials,
            });
        }
    }
    Err(Error::Budget {
        tried: trials.len(),
        best_gap,
    })
}

/// Random symplectic word built from shear and diagonal generators; useful
/// for property probes and demos. `strength` controls how far letters sit
/// from the identity.
pub fn random_symplectic_word(n: usize, len: usize, strength: f64, seed: u64) -> Word {
    let mut rng = SplitMix64::new(seed);
    let mut letters = Vec::with_capacity(len);
    for _ in 0..len {
        letters.push(random_symplectic_matrix(n, strength, &mut rng));
    }
    Word::new(letters).expect("nonempty by construction")
}

pub fn random_symplectic_matrix(n: usize, strength: f64, rng: &mut SplitMix64) -> SymplecticMatrix {
    let dim = 2 * n;
    let mut upper = DMatrix::<f64>::identity(dim, dim);
    let mut lower = DMatrix::<f64>::identity(dim, dim);
    for i in 0..n {
        for j in i..n {
            let a = rng.range(-strength, strength);
            upper[(i, n + j)] = a;
            upper[(j, n + i)] = a;
            let b = rng.range(-strength, strength);
            lower[(n + i, j)] = b;
            lower[(n + j, i)] = b;
        }
    }
    let mut diag = DMatrix::<f64>::identity(dim, dim);
    for i in 0..n {
        let a = rng.range(0.75, 1.35);
        diag[(i, i)] = a;
        diag[(n + i, n + i)] = 1.0 / a;
    }
    SymplecticMatrix::new_unchecked(upper * diag * lower)
}
