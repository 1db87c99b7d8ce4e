//! Linear algebra over symplectic vector spaces.
//!
//! Coordinates are ordered `(x_1..x_n, y_1..y_n)` so the standard form is the
//! block matrix `J = [[0, I], [-I, 0]]` and `diag(a_1..a_n, 1/a_1..1/a_n)` is
//! symplectic. Everything downstream (cocycles, map models, the snake forge)
//! shares this convention.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default threshold below which a Lyapunov exponent counts as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-8;

/// Default tolerance for symplecticity residuals of validated matrices.
pub const DEFAULT_SYMPL_TOL: f64 = 1e-9;

/// Relative radius used when clustering eigenvalues into multiplicities.
pub const EIGEN_CLUSTER_REL_TOL: f64 = 1e-6;

/// Words longer than this are handled by reorthogonalized QR accumulation
/// instead of a dense product, which would overflow for hyperbolic letters.
pub const DENSE_WORD_LIMIT: usize = 200;

/// The standard symplectic form `J` on `R^{2n}`: `J^2 = -I`, `J^T = -J`.
pub fn standard_form(n: usize) -> DMatrix<f64> {
    assert!(n >= 1, "standard form needs n >= 1");
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// Max-norm of `M^T J M - J`, the defect of symplecticity.
pub fn symplectic_residual(m: &DMatrix<f64>) -> Result<f64> {
    let (rows, cols) = m.shape();
    if rows != cols || rows % 2 != 0 || rows == 0 {
        return Err(Error::OddDimension { rows, cols });
    }
    let j = standard_form(rows / 2);
    let defect = m.transpose() * &j * m - &j;
    Ok(defect.amax())
}

/// Whether `‖M^T J M - J‖_max <= tol`. Errs on odd dimension.
pub fn is_symplectic(m: &DMatrix<f64>, tol: f64) -> Result<bool> {
    Ok(symplectic_residual(m)? <= tol)
}

/// A real `2n x 2n` matrix validated against the standard form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    dim_half: usize,
    mat: DMatrix<f64>,
}

impl SymplecticMatrix {
    /// Validates symplecticity within `tol` and, independently, `det = 1`.
    pub fn new(mat: DMatrix<f64>, tol: f64) -> Result<Self> {
        let residual = symplectic_residual(&mat)?;
        if residual > tol {
            return Err(Error::Numeric(format!(
                "matrix is not symplectic: residual {residual:.3e} > tol {tol:.3e}"
            )));
        }
        let det = mat.clone().lu().determinant();
        // Determinant conditioning degrades with the matrix scale, so the
        // check is relative to ‖M‖^dim.
        let scale = mat.amax().max(1.0).powi(mat.nrows() as i32);
        if (det - 1.0).abs() > (tol * scale).max(1e-9) {
            return Err(Error::Numeric(format!(
                "symplectic matrix must have det 1, got {det:.12}"
            )));
        }
        let dim_half = mat.nrows() / 2;
        Ok(Self { dim_half, mat })
    }

    /// Wraps without validation; for matrices symplectic by construction.
    pub fn new_unchecked(mat: DMatrix<f64>) -> Self {
        debug_assert!(mat.is_square() && mat.nrows().is_multiple_of(2));
        let dim_half = mat.nrows() / 2;
        Self { dim_half, mat }
    }

    pub fn dim_half(&self) -> usize {
        self.dim_half
    }

    pub fn dim(&self) -> usize {
        2 * self.dim_half
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.mat
    }

    pub fn identity(n: usize) -> Self {
        Self::new_unchecked(DMatrix::identity(2 * n, 2 * n))
    }

    /// Symplectic matrices invert exactly: `M^{-1} = -J M^T J` (no pivoting).
    pub fn inverse(&self) -> Self {
        let j = standard_form(self.dim_half);
        Self::new_unchecked(-(&j * self.mat.transpose() * &j))
    }

    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.mat).expect("validated shape")
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        op_norm(&self.mat)
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        Spectrum::of_matrix(&self.mat)
    }
}

/// Operator 2-norm via singular values.
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

fn eigenvalues_checked(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), 1e-14, 10_000).ok_or_else(|| {
        Error::Numeric(format!(
            "eigenvalue iteration did not converge (dim {}, max entry {:.3e})",
            m.nrows(),
            m.amax()
        ))
    })?;
    Ok(schur.complex_eigenvalues().iter().cloned().collect())
}

/// Eigenvalues with algebraic multiplicity, sorted by modulus ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(mut values: Vec<Complex64>) -> Self {
        values.sort_by(|a, b| {
            (a.norm(), a.re, a.im)
                .partial_cmp(&(b.norm(), b.re, b.im))
                .expect("finite eigenvalues")
        });
        Self { values }
    }

    pub fn of_matrix(m: &DMatrix<f64>) -> Result<Self> {
        let values = eigenvalues_checked(m)?;
        if values.iter().any(|v| v.norm() == 0.0) {
            return Err(Error::Numeric(
                "zero eigenvalue modulus; input cannot be symplectic".into(),
            ));
        }
        Ok(Self::new(values))
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Groups eigenvalues within `rel_tol` relative distance; returns
    /// `(representative, multiplicity)` pairs sorted by modulus ascending.
    pub fn clusters(&self, rel_tol: f64) -> Vec<(Complex64, usize)> {
        let mut out: Vec<(Complex64, usize)> = Vec::new();
        for &v in &self.values {
            match out
                .iter_mut()
                .find(|(rep, _)| (v - *rep).norm() <= rel_tol * rep.norm().max(1e-300))
            {
                Some((_, count)) => *count += 1,
                None => out.push((v, 1)),
            }
        }
        out
    }

    /// Worst relative defect of the symplectic symmetry `λ -> 1/λ`.
    pub fn pairing_residual(&self) -> f64 {
        self.values
            .iter()
            .map(|&v| {
                let target = Complex64::new(1.0, 0.0) / v;
                self.values
                    .iter()
                    .map(|&w| (w - target).norm() / target.norm().max(1e-300))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    /// Product of all eigenvalues (equals 1 for symplectic spectra).
    pub fn product(&self) -> Complex64 {
        self.values
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, &v| acc * v)
    }
}

/// Periodic-point classification from the period-cocycle spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Classification {
    Hyperbolic,
    /// Exactly `2m` simple non-real unit-modulus eigenvalues, all others off
    /// the unit circle.
    MElliptic(usize),
    /// Real or multiple eigenvalues on the unit circle.
    Degenerate,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Classification::Hyperbolic => write!(f, "hyperbolic"),
            Classification::MElliptic(m) => write!(f, "{m}-elliptic"),
            Classification::Degenerate => write!(f, "degenerate"),
        }
    }
}

/// Classifies a spectrum: hyperbolic iff no modulus in `[1-tol, 1+tol]`;
/// m-elliptic iff the unit-modulus part consists of `2m` simple non-real
/// eigenvalues; degenerate otherwise.
pub fn classify_periodic(spectrum: &Spectrum, tol: f64) -> Classification {
    let clusters = spectrum.clusters(EIGEN_CLUSTER_REL_TOL);
    let mut unit_count = 0usize;
    for (rep, mult) in &clusters {
        let modulus = rep.norm();
        if (modulus - 1.0).abs() <= tol {
            let non_real = rep.im.abs() > tol;
            if !non_real || *mult > 1 {
                return Classification::Degenerate;
            }
            unit_count += 1;
        }
    }
    if unit_count == 0 {
        Classification::Hyperbolic
    } else if unit_count.is_multiple_of(2) {
        Classification::MElliptic(unit_count / 2)
    } else {
        // A lone unit-modulus complex value cannot occur for a real matrix;
        // treat as degenerate rather than guess.
        Classification::Degenerate
    }
}

/// The `2n` Lyapunov exponents of a periodic cocycle, sorted ascending.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LyapunovVector {
    chis: Vec<f64>,
}

impl LyapunovVector {
    pub fn new(mut chis: Vec<f64>) -> Self {
        chis.sort_by(|a, b| a.partial_cmp(b).expect("finite exponents"));
        Self { chis }
    }

    pub fn chis(&self) -> &[f64] {
        &self.chis
    }

    pub fn len(&self) -> usize {
        self.chis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chis.is_empty()
    }

    /// `S(p, f)`: sum of the exponents above `zero_tol`, counting multiplicity.
    pub fn sum_positive(&self, zero_tol: f64) -> f64 {
        // + 0.0 turns the empty sum's -0.0 into +0.0 for clean reports.
        self.chis.iter().filter(|&&c| c > zero_tol).sum::<f64>() + 0.0
    }

    /// Smallest exponent above `zero_tol`. Errs when none exists, which
    /// signals non-hyperbolic input.
    pub fn chi_min_plus(&self, zero_tol: f64) -> Result<f64> {
        self.chis
            .iter()
            .cloned()
            .filter(|&c| c > zero_tol)
            .fold(None, |acc: Option<f64>, c| {
                Some(acc.map_or(c, |a| a.min(c)))
            })
            .ok_or_else(|| Error::Domain("no positive Lyapunov exponent".into()))
    }

    /// Worst defect of the antisymmetric pairing `χ_i + χ_{2n+1-i} = 0`.
    pub fn pairing_residual(&self) -> f64 {
        let k = self.chis.len();
        (0..k)
            .map(|i| (self.chis[i] + self.chis[k - 1 - i]).abs())
            .fold(0.0, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.chis.iter().sum()
    }
}

/// Convenience wrappers matching the functional names used in reports.
pub fn sum_positive_exponents(l: &LyapunovVector) -> f64 {
    l.sum_positive(DEFAULT_ZERO_TOL)
}

pub fn chi_min_plus(l: &LyapunovVector) -> Result<f64> {
    l.chi_min_plus(DEFAULT_ZERO_TOL)
}

/// Product of a word of letters, applying index 0 first:
/// `letters[k-1] · … · letters[0]`.
pub fn word_product(letters: &[SymplecticMatrix]) -> Result<SymplecticMatrix> {
    let first = letters
        .first()
        .ok_or_else(|| Error::Domain("empty word has no product".into()))?;
    let dim = first.dim();
    let mut acc = DMatrix::<f64>::identity(dim, dim);
    for letter in letters {
        if letter.dim() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: letter.dim(),
            });
        }
        acc = letter.matrix() * acc;
    }
    Ok(SymplecticMatrix::new_unchecked(acc))
}

/// Dense product with magnitude rescaling: returns `(P, s)` such that the
/// true product is `e^s · P`. Keeps entries inside the f64 range for long
/// hyperbolic words.
fn scaled_word_product(letters: &[SymplecticMatrix]) -> Result<(DMatrix<f64>, f64)> {
    let first = letters
        .first()
        .ok_or_else(|| Error::Domain("empty word has no product".into()))?;
    let dim = first.dim();
    let mut acc = DMatrix::<f64>::identity(dim, dim);
    let mut log_scale = 0.0f64;
    for letter in letters {
        if letter.dim() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: letter.dim(),
            });
        }
        acc = letter.matrix() * acc;
        let mag = acc.amax();
        if !(mag.is_finite()) || mag == 0.0 {
            return Err(Error::Numeric(
                "word product degenerated to zero or overflow".into(),
            ));
        }
        if mag > 1e120 {
            acc /= mag;
            log_scale += mag.ln();
        }
    }
    Ok((acc, log_scale))
}

/// Lyapunov vector of one full period of a cocycle word:
/// `χ_i = (1/τ) log|λ_i|` sorted ascending, `τ` = word length.
///
/// Words up to [`DENSE_WORD_LIMIT`] letters go through the exact product
/// spectrum. Longer words use the rescaled product's top-half eigenvalues
/// reflected through the symplectic pairing, which keeps exactly-degenerate
/// exponent pairs exact; when the top half itself spans too many orders of
/// magnitude for that, reorthogonalized QR accumulation over repeated passes
/// takes over (it resolves well-separated exponents at any length, at the
/// price of an arbitrary split within degenerate clusters).
pub fn lyapunov_vector_periodic(letters: &[SymplecticMatrix]) -> Result<LyapunovVector> {
    let tau = letters.len();
    if tau == 0 {
        return Err(Error::Domain("empty word has no Lyapunov vector".into()));
    }
    if tau <= DENSE_WORD_LIMIT {
        if let Some(v) = lyapunov_dense(letters)? {
            return Ok(v);
        }
        // Spread too wide for a dense spectrum even after rescaling.
    }
    if let Some(v) = lyapunov_top_reflected(letters)? {
        return Ok(v);
    }
    lyapunov_qr(letters, 400, 1e-10)
}

/// Top-half eigenvalues of the rescaled product, reflected through the
/// symplectic pairing `χ_i = -χ_{2n+1-i}`. Valid whenever the `n` largest
/// moduli stay within the eigensolver's dynamic range of each other; returns
/// `None` otherwise.
fn lyapunov_top_reflected(letters: &[SymplecticMatrix]) -> Result<Option<LyapunovVector>> {
    let tau = letters.len() as f64;
    let n = letters[0].dim_half();
    let (product, log_scale) = scaled_word_product(letters)?;
    let values = eigenvalues_checked(&product)?;
    let mut moduli: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    moduli.sort_by(|a, b| b.partial_cmp(a).expect("finite moduli"));
    // The n-th modulus must be resolvable next to the largest one.
    if moduli[n - 1] < moduli[0] * 1e-11 {
        return Ok(None);
    }
    let mut chis = Vec::with_capacity(2 * n);
    for m in &moduli[..n] {
        let chi = (m.ln() + log_scale) / tau;
        chis.push(chi);
        chis.push(-chi);
    }
    Ok(Some(LyapunovVector::new(chis)))
}

/// Dense path: spectrum of the (rescaled) product. Returns `None` when the
/// modulus spread degenerates below the f64 floor, signalling the caller to
/// fall back to QR accumulation.
fn lyapunov_dense(letters: &[SymplecticMatrix]) -> Result<Option<LyapunovVector>> {
    let tau = letters.len() as f64;
    let (product, log_scale) = scaled_word_product(letters)?;
    let values = eigenvalues_checked(&product)?;
    let max_mod = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if values.iter().any(|v| v.norm() < max_mod * 1e-280) {
        return Ok(None);
    }
    if values.iter().any(|v| v.norm() == 0.0) {
        return Err(Error::Numeric(
            "zero eigenvalue modulus; input cannot be symplectic".into(),
        ));
    }
    let chis = values
        .iter()
        .map(|v| (v.norm().ln() + log_scale) / tau)
        .collect();
    Ok(Some(LyapunovVector::new(chis)))
}

/// Reorthogonalized QR accumulation over repeated word passes. Per-pass
/// diagonal log increments converge to the exponents of the periodic cocycle;
/// convergence is declared on the tail-averaged increment vector.
pub fn lyapunov_qr(
    letters: &[SymplecticMatrix],
    max_reps: usize,
    conv_tol: f64,
) -> Result<LyapunovVector> {
    let dim = letters[0].dim();
    let tau = letters.len() as f64;
    let window = 4usize;
    let mut q = DMatrix::<f64>::identity(dim, dim);
    let mut recent: Vec<Vec<f64>> = Vec::new();
    let mut prev_mean: Option<Vec<f64>> = None;
    let mut last_mean: Vec<f64> = vec![0.0; dim];

    for _rep in 0..max_reps {
        let mut acc = vec![0.0f64; dim];
        for letter in letters {
            if letter.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: letter.dim(),
                });
            }
            let b = letter.matrix() * &q;
            let qr = b.qr();
            let r = qr.r();
            q = qr.q();
            for i in 0..dim {
                let rii = r[(i, i)];
                if rii == 0.0 || !rii.is_finite() {
                    return Err(Error::Numeric(
                        "QR accumulation hit a zero diagonal; letters are degenerate".into(),
                    ));
                }
                if rii < 0.0 {
                    for k in 0..dim {
                        q[(k, i)] = -q[(k, i)];
                    }
                }
                acc[i] += rii.abs().ln();
            }
        }
        recent.push(acc);
        if recent.len() > window {
            recent.remove(0);
        }
        if recent.len() == window {
            let mean: Vec<f64> = (0..dim)
                .map(|i| recent.iter().map(|a| a[i]).sum::<f64>() / (window as f64 * tau))
                .collect();
            if let Some(pm) = &prev_mean {
                let diff = mean
                    .iter()
                    .zip(pm.iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if diff < conv_tol {
                    return Ok(LyapunovVector::new(mean));
                }
            }
            prev_mean = Some(mean.clone());
            last_mean = mean;
        }
    }
    if prev_mean.is_some() {
        // Oscillatory (elliptic) increments settle slowly; the tail mean is
        // still the right estimate, so return it rather than fail.
        return Ok(LyapunovVector::new(last_mean));
    }
    Err(Error::Numeric(
        "QR accumulation produced no estimate; word too short for the rep budget".into(),
    ))
}

/// Finite-time Lyapunov exponents of a single cocycle pass (no periodicity
/// assumed): one QR sweep through the letters, diagonal logs divided by the
/// length, sorted ascending.
pub fn finite_time_exponents(letters: &[SymplecticMatrix]) -> Result<Vec<f64>> {
    let first = letters
        .first()
        .ok_or_else(|| Error::Domain("empty cocycle".into()))?;
    let dim = first.dim();
    let mut q = DMatrix::<f64>::identity(dim, dim);
    let mut acc = vec![0.0f64; dim];
    for letter in letters {
        if letter.dim() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: letter.dim(),
            });
        }
        let b = letter.matrix() * &q;
        let qr = b.qr();
        let r = qr.r();
        q = qr.q();
        for i in 0..dim {
            let rii = r[(i, i)];
            if rii == 0.0 || !rii.is_finite() {
                return Err(Error::Numeric("degenerate cocycle letter".into()));
            }
            if rii < 0.0 {
                for k in 0..dim {
                    q[(k, i)] = -q[(k, i)];
                }
            }
            acc[i] += rii.abs().ln();
        }
    }
    let tau = letters.len() as f64;
    let mut out: Vec<f64> = acc.into_iter().map(|a| a / tau).collect();
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite exponents"));
    Ok(out)
}

/// Builds the 2n x 2n direct sum of 2x2 symplectic blocks, respecting the
/// `(x_1..x_n, y_1..y_n)` coordinate order: block `i` acts on `(x_i, y_i)`.
pub fn direct_sum_2x2(blocks: &[[f64; 4]]) -> DMatrix<f64> {
    let n = blocks.len();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for (i, b) in blocks.iter().enumerate() {
        // b = [a, b; c, d] acting on (x_i, y_i)
        m[(i, i)] = b[0];
        m[(i, n + i)] = b[1];
        m[(n + i, i)] = b[2];
        m[(n + i, n + i)] = b[3];
    }
    m
}

/// Symplectic product `ω(u, v) = u^T J v`.
pub fn omega(u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let n = u.len() / 2;
    let mut s = 0.0;
    for i in 0..n {
        s += u[i] * v[n + i] - u[n + i] * v[i];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cat_matrix() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0])
    }

    #[test]
    fn standard_form_basics() {
        for n in 1..=4 {
            let j = standard_form(n);
            let jj = &j * &j;
            assert_eq!(jj, -DMatrix::<f64>::identity(2 * n, 2 * n));
            assert_eq!(j.transpose(), -j.clone());
        }
        let j1 = standard_form(1);
        assert_eq!(j1, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    }

    #[test]
    fn symplectic_checks() {
        let j = standard_form(2);
        assert!(is_symplectic(&j, 1e-12).unwrap());
        assert!(is_symplectic(&DMatrix::identity(4, 4), 1e-12).unwrap());
        let not = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        assert!(!is_symplectic(&not, 1e-9).unwrap());
        assert!(matches!(
            is_symplectic(&DMatrix::identity(3, 3), 1e-9),
            Err(Error::OddDimension { .. })
        ));
    }

    #[test]
    fn cat_map_spectrum_matches_characteristic_roots() {
        // λ² - 3λ + 1 = 0 → (3 ± √5)/2
        let m = SymplecticMatrix::new(cat_matrix(), 1e-12).unwrap();
        let spec = m.spectrum().unwrap();
        let lo = (3.0 - 5.0f64.sqrt()) / 2.0;
        let hi = (3.0 + 5.0f64.sqrt()) / 2.0;
        assert!((spec.values()[0].re - lo).abs() < 1e-12);
        assert!((spec.values()[1].re - hi).abs() < 1e-12);
        assert!(spec.pairing_residual() < 1e-10);
        assert!((spec.product().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_spectrum_sorted_by_modulus() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0, 0.5, 1.0 / 3.0]));
        let m = SymplecticMatrix::new(m, 1e-12).unwrap();
        let spec = m.spectrum().unwrap();
        let mods: Vec<f64> = spec.values().iter().map(|v| v.norm()).collect();
        let expect = [1.0 / 3.0, 0.5, 2.0, 3.0];
        for (a, b) in mods.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn word_product_order_applies_first_letter_first() {
        let a = SymplecticMatrix::new(cat_matrix(), 1e-12).unwrap();
        let b = SymplecticMatrix::new(standard_form(1), 1e-12).unwrap();
        let p = word_product(&[a.clone(), b.clone()]).unwrap();
        let direct = b.matrix() * a.matrix();
        assert_eq!(p.matrix(), &direct);

        let single = word_product(std::slice::from_ref(&a)).unwrap();
        assert_eq!(single.matrix(), a.matrix());

        let ids = vec![SymplecticMatrix::identity(1); 5];
        assert_eq!(
            word_product(&ids).unwrap().matrix(),
            &DMatrix::<f64>::identity(2, 2)
        );
    }

    #[test]
    fn lyapunov_vector_of_cat_fixed_point() {
        let a = SymplecticMatrix::new(cat_matrix(), 1e-12).unwrap();
        let l = lyapunov_vector_periodic(&[a]).unwrap();
        let chi = ((3.0 + 5.0f64.sqrt()) / 2.0).ln();
        assert!((l.chis()[0] + chi).abs() < 1e-12);
        assert!((l.chis()[1] - chi).abs() < 1e-12);
        assert!((sum_positive_exponents(&l) - chi).abs() < 1e-12);
        assert!((chi_min_plus(&l).unwrap() - chi).abs() < 1e-12);
    }

    #[test]
    fn lyapunov_vector_identity_and_diagonal() {
        let id = vec![SymplecticMatrix::identity(2); 7];
        let l = lyapunov_vector_periodic(&id).unwrap();
        assert!(l.chis().iter().all(|c| c.abs() < 1e-14));
        assert_eq!(sum_positive_exponents(&l), 0.0);
        assert!(chi_min_plus(&l).is_err());

        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0, 0.5, 1.0 / 3.0]));
        let d = SymplecticMatrix::new(d, 1e-12).unwrap();
        let l = lyapunov_vector_periodic(&[d]).unwrap();
        let expect = [-(3.0f64.ln()), -(2.0f64.ln()), 2.0f64.ln(), 3.0f64.ln()];
        for (a, b) in l.chis().iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((sum_positive_exponents(&l) - 6.0f64.ln()).abs() < 1e-12);
        assert!((chi_min_plus(&l).unwrap() - 2.0f64.ln()).abs() < 1e-12);
        assert!((l.sum_positive(DEFAULT_ZERO_TOL) + l.chis()[..2].iter().sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn long_word_uses_qr_and_matches_closed_form() {
        // 500 copies of diag(2, 1/2): dense product would reach 2^500.
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5]));
        let letters = vec![SymplecticMatrix::new(d, 1e-12).unwrap(); 500];
        let l = lyapunov_vector_periodic(&letters).unwrap();
        assert!((l.chis()[1] - 2.0f64.ln()).abs() < 1e-9);
        assert!(l.pairing_residual() < 1e-9);
    }

    #[test]
    fn classification_cases() {
        let cat = SymplecticMatrix::new(cat_matrix(), 1e-12).unwrap();
        assert_eq!(
            classify_periodic(&cat.spectrum().unwrap(), 1e-9),
            Classification::Hyperbolic
        );

        let th = 1.0f64;
        let rot =
            DMatrix::from_row_slice(2, 2, &[th.cos(), th.sin(), -th.sin(), th.cos()]);
        let rot = SymplecticMatrix::new(rot, 1e-12).unwrap();
        assert_eq!(
            classify_periodic(&rot.spectrum().unwrap(), 1e-9),
            Classification::MElliptic(1)
        );

        let id = SymplecticMatrix::identity(1);
        assert_eq!(
            classify_periodic(&id.spectrum().unwrap(), 1e-9),
            Classification::Degenerate
        );
    }

    #[test]
    fn cyclic_rotation_preserves_lyapunov_vector() {
        // Conjugate products share spectra; rotated words must agree.
        let a = SymplecticMatrix::new(cat_matrix(), 1e-12).unwrap();
        let b = SymplecticMatrix::new(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.7, 0.0, 1.0]),
            1e-12,
        )
        .unwrap();
        let c = SymplecticMatrix::new(standard_form(1), 1e-12).unwrap();
        let word = vec![a, b, c];
        let base = lyapunov_vector_periodic(&word).unwrap();
        for shift in 1..word.len() {
            let mut rotated = word.clone();
            rotated.rotate_left(shift);
            let l = lyapunov_vector_periodic(&rotated).unwrap();
            for (x, y) in l.chis().iter().zip(base.chis().iter()) {
                assert!((x - y).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn direct_sum_is_symplectic() {
        let m = direct_sum_2x2(&[[2.0, 1.0, 1.0, 1.0], [2.0, 1.0, 1.0, 1.0]]);
        assert!(is_symplectic(&m, 1e-12).unwrap());
    }
}
