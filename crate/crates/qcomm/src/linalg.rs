//! Dense complex matrix numerics shared by every protocol.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::blockenc::{BlockEncoding, UseCost};
use crate::qsvt::{ChebyshevPoly, Parity};

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Reconstruction residual allowed relative to `‖A‖`.
pub const SVD_RESIDUAL_TOL: f64 = 1e-10;

/// Off-diagonal threshold handed to the iterative solvers. Machine epsilon
/// itself stalls the bidiagonal sweep on rank-deficient complex input.
const CONVERGENCE_EPS: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("SVD did not converge within {cap} iterations")]
    NoConvergence { cap: usize },
    #[error("SVD reconstruction residual {residual:e} exceeds certificate")]
    Certificate { residual: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("contract violated: {0}")]
    Contract(String),
}

/// Thin singular value decomposition `A = U Σ V†` with `k = min(m, n)` triplets.
#[derive(Debug, Clone)]
pub struct Svd {
    pub left_vectors: Matrix,
    pub singular_values: Vec<f64>,
    pub right_vectors: Matrix,
    pub rank_tol: f64,
}

impl Svd {
    pub fn rank(&self) -> usize {
        self.singular_values.iter().filter(|&&s| s > self.rank_tol).count()
    }

    pub fn reconstruct(&self) -> Matrix {
        let sigma = DMatrix::from_diagonal(&DVector::from_iterator(
            self.singular_values.len(),
            self.singular_values.iter().map(|&s| C64::new(s, 0.0)),
        ));
        &self.left_vectors * sigma * self.right_vectors.adjoint()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumStats {
    pub kappa: f64,
    pub gamma: f64,
    pub op_norm: f64,
    pub frob_norm: f64,
    pub min_nonzero_sv: f64,
}

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> Matrix {
    Matrix::from_row_iterator(rows, cols, entries.iter().map(|&x| c(x)))
}

pub fn real_vector(entries: &[f64]) -> Vector {
    Vector::from_iterator(entries.len(), entries.iter().map(|&x| c(x)))
}

pub fn diag(entries: &[f64]) -> Matrix {
    Matrix::from_diagonal(&real_vector(entries))
}

pub fn basis(dim: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(dim);
    v[i] = ONE;
    v
}

pub fn default_rank_tol(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

fn check_finite(a: &Matrix) -> Result<(), LinalgError> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite)
    }
}

pub fn frob_norm(a: &Matrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &Vector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalized(v: &Vector) -> Vector {
    let n = vec_norm(v);
    v.map(|z| z / n)
}

/// `|⟨a|b⟩|²` for unit vectors.
pub fn fidelity(a: &Vector, b: &Vector) -> f64 {
    let na = vec_norm(a);
    let nb = vec_norm(b);
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (a.dotc(b).norm() / (na * nb)).powi(2)
}

pub fn svd(a: &Matrix) -> Result<Svd, LinalgError> {
    check_finite(a)?;
    let (m, n) = a.shape();
    if m * n == 0 {
        return Err(LinalgError::Degenerate("empty matrix"));
    }
    if let Some(out) = diagonal_svd(a) {
        return Ok(out);
    }
    let cap = 100 * m.max(n);
    let first = svd_with(a, CONVERGENCE_EPS, cap)?;
    match certify(a, first) {
        Ok(out) => Ok(out),
        // Exactly zero singular values can stall the relative stopping rule
        // early; iterating to full convergence fixes the reconstruction.
        Err(_) => certify(a, svd_with(a, 0.0, cap)?),
    }
}

/// Exact decomposition when only the leading diagonal is nonzero.
fn diagonal_svd(a: &Matrix) -> Option<Svd> {
    let (m, n) = a.shape();
    let off_diagonal = (0..n).any(|j| (0..m).any(|i| i != j && a[(i, j)] != ZERO));
    if off_diagonal {
        return None;
    }
    let k = m.min(n);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| a[(j, j)].norm().total_cmp(&a[(i, i)].norm()));
    let mut u = Matrix::zeros(m, k);
    let mut v = Matrix::zeros(n, k);
    let mut singular_values = Vec::with_capacity(k);
    for (col, &i) in order.iter().enumerate() {
        let d = a[(i, i)];
        let sigma = d.norm();
        u[(i, col)] = if sigma > 0.0 { d / sigma } else { ONE };
        v[(i, col)] = ONE;
        singular_values.push(sigma);
    }
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    Some(Svd { left_vectors: u, singular_values, right_vectors: v, rank_tol: default_rank_tol(m, n, sigma_max) })
}

fn svd_with(a: &Matrix, eps: f64, cap: usize) -> Result<Svd, LinalgError> {
    let dec = SVD::try_new(a.clone(), true, true, eps, cap).ok_or(LinalgError::NoConvergence { cap })?;
    let u = dec.u.expect("requested U");
    let v = dec.v_t.expect("requested V").adjoint();
    let singular_values: Vec<f64> = dec.singular_values.iter().copied().collect();
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    Ok(Svd {
        left_vectors: u,
        singular_values,
        right_vectors: v,
        rank_tol: default_rank_tol(a.nrows(), a.ncols(), sigma_max),
    })
}

fn certify(a: &Matrix, out: Svd) -> Result<Svd, LinalgError> {
    let sigma_max = out.singular_values.first().copied().unwrap_or(0.0);
    let residual = frob_norm(&(a - out.reconstruct()));
    if residual > SVD_RESIDUAL_TOL * sigma_max.max(f64::MIN_POSITIVE) * (a.nrows().max(a.ncols()) as f64).sqrt() {
        return Err(LinalgError::Certificate { residual });
    }
    Ok(out)
}

pub fn op_norm(a: &Matrix) -> Result<f64, LinalgError> {
    Ok(svd(a)?.singular_values.first().copied().unwrap_or(0.0))
}

/// Moore–Penrose inverse keeping only singular values above `rank_tol`.
pub fn pseudoinverse(a: &Matrix, rank_tol: f64) -> Result<Matrix, LinalgError> {
    if rank_tol < 0.0 || rank_tol.is_nan() {
        return Err(LinalgError::Contract(format!("rank_tol {rank_tol} < 0")));
    }
    Ok(pseudoinverse_of(&svd(a)?, rank_tol))
}

fn pseudoinverse_of(s: &Svd, rank_tol: f64) -> Matrix {
    let (n, m) = (s.right_vectors.nrows(), s.left_vectors.nrows());
    let mut out = Matrix::zeros(n, m);
    for (i, &sigma) in s.singular_values.iter().enumerate() {
        if sigma > rank_tol && sigma > 0.0 {
            let v = s.right_vectors.column(i);
            let u = s.left_vectors.column(i);
            out += (v * u.adjoint()) * c(1.0 / sigma);
        }
    }
    out
}

pub fn pinv(a: &Matrix) -> Result<Matrix, LinalgError> {
    let s = svd(a)?;
    Ok(pseudoinverse_of(&s, s.rank_tol))
}

/// Zero-pads `a` into the top-left corner of a `dim × dim` matrix.
pub fn pad_square(a: &Matrix, dim: usize) -> Matrix {
    let (m, n) = a.shape();
    assert!(m <= dim && n <= dim, "pad target too small");
    let mut out = Matrix::zeros(dim, dim);
    out.view_mut((0, 0), (m, n)).copy_from(a);
    out
}

/// Unitary `[[M, √(I−MM†)], [√(I−M†M), −M†]]` for a square contraction `M`.
pub fn contraction_dilation(m: &Matrix) -> Result<Matrix, LinalgError> {
    let (r, cdim) = m.shape();
    if r != cdim {
        return Err(LinalgError::Dimension { expected: r, got: cdim });
    }
    let s = svd(m)?;
    if s.singular_values[0] > 1.0 + 1e-9 {
        return Err(LinalgError::Contract(format!("norm {} exceeds 1", s.singular_values[0])));
    }
    let comp: Vec<f64> = s.singular_values.iter().map(|&x| (1.0 - x * x).max(0.0).sqrt()).collect();
    let dc = diag(&comp);
    let top_right = &s.left_vectors * &dc * s.left_vectors.adjoint();
    let bottom_left = &s.right_vectors * &dc * s.right_vectors.adjoint();
    let mut u = Matrix::zeros(2 * r, 2 * r);
    u.view_mut((0, 0), (r, r)).copy_from(m);
    u.view_mut((0, r), (r, r)).copy_from(&top_right);
    u.view_mut((r, 0), (r, r)).copy_from(&bottom_left);
    u.view_mut((r, r), (r, r)).copy_from(&(-m.adjoint()));
    Ok(u)
}

/// The one-ancilla dilation of `A/‖A‖`, padding non-square inputs with zeros.
pub fn unitary_dilation(a: &Matrix) -> Result<BlockEncoding, LinalgError> {
    let (m, n) = a.shape();
    unitary_dilation_padded(a, m.max(n))
}

/// As [`unitary_dilation`] but pads the data register to `dim`.
pub fn unitary_dilation_padded(a: &Matrix, dim: usize) -> Result<BlockEncoding, LinalgError> {
    check_finite(a)?;
    let norm = op_norm(a)?;
    if norm == 0.0 {
        return Err(LinalgError::Degenerate("zero matrix has no dilation"));
    }
    let (m, n) = a.shape();
    let scaled = pad_square(a, dim).map(|z| z / norm);
    let unitary = contraction_dilation(&scaled)?;
    Ok(BlockEncoding {
        unitary,
        rows: m,
        cols: n,
        alpha: norm,
        ancilla_qubits: 1,
        error: 0.0,
        use_cost: UseCost::round_trip(qubits_for(dim) + 1),
    })
}

/// `⌈log₂ dim⌉`, with one qubit for dimension 1.
pub fn qubits_for(dim: usize) -> usize {
    if dim <= 1 {
        0
    } else {
        (usize::BITS - (dim - 1).leading_zeros()) as usize
    }
}

/// Singular-value transform of `a` by a parity-tagged polynomial.
///
/// Odd `f` gives `Σ f(σᵢ)|uᵢ⟩⟨vᵢ|`; even `f` gives `Σ f(σᵢ)|vᵢ⟩⟨vᵢ|` over
/// all `n` right vectors, zero singular values included.
pub fn sv_function(a: &Matrix, f: &ChebyshevPoly) -> Result<Matrix, LinalgError> {
    let (m, n) = a.shape();
    let dim = m.max(n);
    let s = svd(&pad_square(a, dim))?;
    let fs: Vec<f64> = s.singular_values.iter().map(|&x| f.eval(x)).collect();
    let fd = diag(&fs);
    match f.parity {
        Parity::Odd => {
            let full = &s.left_vectors * fd * s.right_vectors.adjoint();
            Ok(full.view((0, 0), (m, n)).into_owned())
        }
        Parity::Even => {
            let full = &s.right_vectors * fd * s.right_vectors.adjoint();
            Ok(full.view((0, 0), (n, n)).into_owned())
        }
        Parity::Mixed => Err(LinalgError::Contract("singular-value transform needs a definite parity".into())),
    }
}

pub fn spectrum_stats(a: &Matrix, b: &Vector) -> Result<SpectrumStats, LinalgError> {
    if b.len() != a.nrows() {
        return Err(LinalgError::Dimension { expected: a.nrows(), got: b.len() });
    }
    let bn = vec_norm(b);
    if bn == 0.0 {
        return Err(LinalgError::Degenerate("b is zero"));
    }
    let s = svd(a)?;
    let op = s.singular_values[0];
    let min_nonzero =
        s.singular_values.iter().copied().filter(|&x| x > s.rank_tol && x > 0.0).fold(f64::INFINITY, f64::min);
    let (kappa, min_nonzero) = if min_nonzero.is_finite() { (op / min_nonzero, min_nonzero) } else { (1.0, 0.0) };
    let proj = column_space_projection(&s, b);
    Ok(SpectrumStats {
        kappa,
        gamma: (vec_norm(&proj) / bn).min(1.0),
        op_norm: op,
        frob_norm: frob_norm(a),
        min_nonzero_sv: min_nonzero,
    })
}

/// `A A⁺ b`, the projection of `b` onto the column space.
fn column_space_projection(s: &Svd, b: &Vector) -> Vector {
    let mut out = Vector::zeros(b.len());
    for (i, &sigma) in s.singular_values.iter().enumerate() {
        if sigma > s.rank_tol && sigma > 0.0 {
            let u = s.left_vectors.column(i);
            out += u * u.dotc(b);
        }
    }
    out
}

pub fn is_hermitian(h: &Matrix, tol: f64) -> bool {
    h.is_square() && frob_norm(&(h - h.adjoint())) <= tol
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(h: &Matrix) -> Result<(Vec<f64>, Matrix), LinalgError> {
    check_finite(h)?;
    if !is_hermitian(h, 1e-9 * (1.0 + frob_norm(h))) {
        return Err(LinalgError::Contract("matrix is not Hermitian".into()));
    }
    let dim = h.nrows();
    let eig = SymmetricEigen::try_new(h.clone(), CONVERGENCE_EPS, 100 * dim.max(1))
        .ok_or(LinalgError::NoConvergence { cap: 100 * dim.max(1) })?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Matrix::zeros(dim, dim);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    let rebuilt = &vectors * diag(&values) * vectors.adjoint();
    let residual = frob_norm(&(h - rebuilt));
    if residual > SVD_RESIDUAL_TOL * (1.0 + frob_norm(h)) * (dim as f64).sqrt() {
        return Err(LinalgError::Certificate { residual });
    }
    Ok((values, vectors))
}

/// `exp(i t H)` for Hermitian `H`.
pub fn expm_i(h: &Matrix, t: f64) -> Result<Matrix, LinalgError> {
    let (values, vectors) = hermitian_eigen(h)?;
    let phases: Vec<C64> = values.iter().map(|&l| C64::from_polar(1.0, l * t)).collect();
    let d = Matrix::from_diagonal(&Vector::from_vec(phases));
    Ok(&vectors * d * vectors.adjoint())
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

pub fn unitarity_defect(u: &Matrix) -> f64 {
    let id = Matrix::identity(u.ncols(), u.ncols());
    frob_norm(&(u.adjoint() * u - id))
}

/// Unitary whose first column is the unit vector `v` (Householder completion).
pub fn completion_with_first_column(v: &Vector) -> Matrix {
    let dim = v.len();
    let v = normalized(v);
    // Reflect from -phase·e₀ so that |target - v| ≥ √2 and the reflector is
    // never built from rounding noise.
    let phase = if v[0].norm() > 0.0 { v[0] / v[0].norm() } else { ONE };
    let target = basis(dim, 0).map(|z| -z * phase);
    let w = normalized(&(&target - &v));
    let reflector = Matrix::identity(dim, dim) - (&w * w.adjoint()) * c(2.0);
    reflector * Matrix::from_diagonal(&Vector::from_fn(dim, |i, _| if i == 0 { -phase } else { ONE }))
}

pub fn random_real_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| c(rng.gen_range(-1.0..1.0)))
}

pub fn random_complex_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_unit_vector<R: Rng>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let v = Vector::from_fn(dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        if vec_norm(&v) > 1e-3 {
            return normalized(&v);
        }
    }
}

pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> Matrix {
    let a = random_complex_matrix(rng, dim, dim);
    (&a + a.adjoint()).map(|z| z * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsvt::ChebyshevPoly;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_shortcut_matches_iterative_svd() {
        let mut a = Matrix::zeros(4, 3);
        a[(0, 0)] = C64::new(0.5, -0.5);
        a[(1, 1)] = c(-2.0);
        let fast = svd(&a).unwrap();
        let slow = svd_with(&a, 0.0, 400).unwrap();
        for (x, y) in fast.singular_values.iter().zip(&slow.singular_values) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(frob_norm(&(&a - fast.reconstruct())) < 1e-15);
        assert!(frob_norm(&(pinv(&a).unwrap() - pseudoinverse_of(&slow, slow.rank_tol))) < 1e-12);
    }

    #[test]
    fn svd_of_identity_and_diag() {
        let s = svd(&Matrix::identity(2, 2)).unwrap();
        assert_eq!(s.singular_values, vec![1.0, 1.0]);
        let s = svd(&diag(&[3.0, 0.0])).unwrap();
        assert!((s.singular_values[0] - 3.0).abs() < 1e-14);
        assert!(s.singular_values[1].abs() < 1e-14);
    }

    #[test]
    fn svd_reconstructs_rectangular() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_complex_matrix(&mut rng, 8, 5);
        let s = svd(&a).unwrap();
        assert!(frob_norm(&(&a - s.reconstruct())) <= 1e-10 * frob_norm(&a));
        let gram = s.left_vectors.adjoint() * &s.left_vectors;
        assert!(frob_norm(&(gram - Matrix::identity(5, 5))) < 1e-10);
        assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn pinv_examples() {
        let p = pinv(&diag(&[1.0, 0.5])).unwrap();
        assert!(frob_norm(&(p - diag(&[1.0, 2.0]))) < 1e-12);
        let z = pinv(&Matrix::zeros(3, 2)).unwrap();
        assert_eq!(z.shape(), (2, 3));
        assert_eq!(frob_norm(&z), 0.0);
    }

    #[test]
    fn pinv_rank_deficient_penrose() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_complex_matrix(&mut rng, 4, 2) * random_complex_matrix(&mut rng, 2, 4);
        let p = pinv(&a).unwrap();
        assert!(frob_norm(&(&a * &p * &a - &a)) < 1e-9);
        assert!(frob_norm(&(&p * &a * &p - &p)) < 1e-9);
    }

    #[test]
    fn dilation_of_diag() {
        let be = unitary_dilation(&diag(&[1.0, 0.5])).unwrap();
        let u = &be.unitary;
        assert!((u[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((u[(1, 1)].re - 0.5).abs() < 1e-12);
        assert!(u[(0, 2)].norm() < 1e-12);
        assert!((u[(1, 3)].re - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(unitarity_defect(u) < 1e-10);
    }

    #[test]
    fn dilation_of_scalar_and_zero() {
        let be = unitary_dilation(&real_matrix(1, 1, &[1.0])).unwrap();
        assert_eq!(be.unitary.shape(), (2, 2));
        assert!((be.unitary[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!(matches!(unitary_dilation(&Matrix::zeros(2, 2)), Err(LinalgError::Degenerate(_))));
    }

    #[test]
    fn sv_function_identity_and_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_complex_matrix(&mut rng, 3, 5).map(|z| z * 0.3);
        let id = ChebyshevPoly::from_monomials(&[0.0, 1.0]).unwrap();
        assert!(frob_norm(&(sv_function(&a, &id).unwrap() - &a)) < 1e-10);
        let sq = ChebyshevPoly::from_monomials(&[0.0, 0.0, 1.0]).unwrap();
        let out = sv_function(&diag(&[2.0, 3.0]), &sq).unwrap();
        assert!(frob_norm(&(out - diag(&[4.0, 9.0]))) < 1e-10);
    }

    #[test]
    fn even_function_counts_zero_singular_values() {
        let a = real_matrix(1, 2, &[1.0, 0.0]);
        let one = ChebyshevPoly::from_monomials(&[1.0]).unwrap();
        let out = sv_function(&a, &one).unwrap();
        assert!(frob_norm(&(out - Matrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn stats_examples() {
        let s = spectrum_stats(&Matrix::identity(3, 3), &basis(3, 1)).unwrap();
        assert!((s.gamma - 1.0).abs() < 1e-12 && (s.kappa - 1.0).abs() < 1e-12);
        let e1 = diag(&[1.0, 0.0]);
        let b = real_vector(&[1.0, 1.0]);
        let s = spectrum_stats(&e1, &b).unwrap();
        assert!((s.gamma - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(spectrum_stats(&e1, &Vector::zeros(2)).is_err());
    }

    #[test]
    fn expm_of_pauli_z() {
        let z = diag(&[1.0, -1.0]);
        let u = expm_i(&z, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((u[(0, 0)] - C64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((u[(1, 1)] - C64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn completion_first_column() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = random_unit_vector(&mut rng, 5);
        let u = completion_with_first_column(&v);
        assert!(unitarity_defect(&u) < 1e-12);
        assert!(vec_norm(&(u.column(0).into_owned() - v)) < 1e-12);

        // Already aligned with e₀ up to a complex phase.
        let aligned = Vector::from_vec(vec![C64::new(-0.12687301040125853, -0.2148801529635658), ZERO]);
        let u = completion_with_first_column(&aligned);
        assert!(vec_norm(&(u.column(0).into_owned() - normalized(&aligned))) < 1e-12);
    }

    #[test]
    fn qubit_counts() {
        assert_eq!(qubits_for(1), 0);
        assert_eq!(qubits_for(2), 1);
        assert_eq!(qubits_for(8), 3);
        assert_eq!(qubits_for(9), 4);
    }
}
