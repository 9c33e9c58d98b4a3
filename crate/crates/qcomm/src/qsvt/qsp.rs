//! Alternating phase sequences and a least-squares phase finder.
//!
//! For `n` phases the sequence is
//!
//! * odd `n`:  `e^{iφ₁(2Π̃−I)} U · Π_{j=1}^{(n−1)/2} e^{iφ_{2j}(2Π−I)} U† e^{iφ_{2j+1}(2Π̃−I)} U`
//! * even `n`: `Π_{j=1}^{n/2} e^{iφ_{2j−1}(2Π−I)} U† e^{iφ_{2j}(2Π̃−I)} U`
//!
//! with the products written left to right. The scalar form used by
//! [`find_phases`] takes the reflection signal `[[x, s], [s, −x]]`,
//! `s = √(1−x²)`, and `Π = Π̃ = |0⟩⟨0|`; the real part of the top-left entry
//! is what an extra ancilla can extract via `(U_Φ + U_{−Φ})/2`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::poly::{ChebyshevPoly, Parity};
use crate::linalg::{frob_norm, unitarity_defect, Matrix};

/// Degrees above this go to the exact encoding path.
pub const MAX_QSP_DEGREE: usize = 60;

/// Required agreement between the scalar sequence and the polynomial.
pub const PHASE_TOLERANCE: f64 = 1e-6;

const STARTS: usize = 12;
const LM_ITERATIONS: usize = 400;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QspError {
    #[error("signal unitary defect {0:e}")]
    NonUnitary(f64),
    #[error("{0} is not an orthogonal projector of matching size")]
    BadProjector(&'static str),
    #[error("phase finding failed: {0}")]
    PhaseFinding(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSequence {
    pub phases: Vec<f64>,
    pub degree: usize,
}

impl PhaseSequence {
    pub fn new(phases: Vec<f64>) -> Self {
        let degree = phases.len();
        Self { phases, degree }
    }

    pub fn negated(&self) -> Self {
        Self::new(self.phases.iter().map(|p| -p).collect())
    }
}

/// Resources of one sequence application.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QspCost {
    pub signal_uses: usize,
    pub phase_ops: usize,
    pub ancilla_qubits: usize,
}

pub fn qsp_cost(phi: &PhaseSequence) -> QspCost {
    QspCost { signal_uses: phi.degree, phase_ops: phi.degree, ancilla_qubits: 1 }
}

/// `e^{iφ(2Π−I)} = e^{iφ}Π + e^{−iφ}(I−Π)`.
fn phase_rotation(proj: &Matrix, phi: f64) -> Matrix {
    let n = proj.nrows();
    let plus = Complex64::from_polar(1.0, phi);
    let minus = Complex64::from_polar(1.0, -phi);
    proj * plus + (Matrix::identity(n, n) - proj) * minus
}

fn check_projector(p: &Matrix, dim: usize, name: &'static str) -> Result<(), QspError> {
    if p.shape() != (dim, dim) || frob_norm(&(p * p - p)) > 1e-9 || frob_norm(&(p - p.adjoint())) > 1e-9 {
        return Err(QspError::BadProjector(name));
    }
    Ok(())
}

/// The full alternating product `U_Φ`.
pub fn qsp_sequence(u: &Matrix, proj: &Matrix, proj_tilde: &Matrix, phi: &PhaseSequence) -> Result<Matrix, QspError> {
    let dim = u.nrows();
    let defect = if u.is_square() { unitarity_defect(u) } else { f64::INFINITY };
    if defect > 1e-9 {
        return Err(QspError::NonUnitary(defect));
    }
    check_projector(proj, dim, "proj")?;
    check_projector(proj_tilde, dim, "proj_tilde")?;
    let ud = u.adjoint();
    let n = phi.phases.len();
    let mut out = Matrix::identity(dim, dim);
    let mut k = 0;
    if n % 2 == 1 {
        out = phase_rotation(proj_tilde, phi.phases[0]) * u;
        k = 1;
    }
    while k < n {
        out = out * phase_rotation(proj, phi.phases[k]) * &ud * phase_rotation(proj_tilde, phi.phases[k + 1]) * u;
        k += 2;
    }
    Ok(out)
}

/// `[[x, √(1−x²)], [√(1−x²), −x]]`.
pub fn reflection_signal(x: f64) -> Matrix {
    let s = (1.0 - x * x).max(0.0).sqrt();
    Matrix::from_row_slice(2, 2, &[x, s, s, -x].map(Complex64::from))
}

/// Top-left entry of the scalar sequence. The reflection is its own inverse,
/// so every factor is `e^{iφZ} R`.
pub fn scalar_qsp(phases: &[f64], x: f64) -> Complex64 {
    let s = (1.0 - x * x).max(0.0).sqrt();
    // Row vector ⟨0| pushed through the product from the left.
    let mut a = Complex64::new(1.0, 0.0);
    let mut b = Complex64::new(0.0, 0.0);
    for &phi in phases {
        a *= Complex64::from_polar(1.0, phi);
        b *= Complex64::from_polar(1.0, -phi);
        let (na, nb) = (a * x + b * s, a * s - b * x);
        a = na;
        b = nb;
    }
    a
}

/// Real part of [`scalar_qsp`], the value a real-part extraction encodes.
pub fn scalar_qsp_real(phases: &[f64], x: f64) -> f64 {
    scalar_qsp(phases, x).re
}

/// Chebyshev nodes of the first kind.
pub fn chebyshev_nodes(count: usize) -> Vec<f64> {
    (0..count).map(|k| (std::f64::consts::PI * (k as f64 + 0.5) / count as f64).cos()).collect()
}

/// Max deviation of the scalar sequence from `poly` on `count` nodes.
pub fn phase_residual(phi: &PhaseSequence, poly: &ChebyshevPoly, count: usize) -> f64 {
    chebyshev_nodes(count)
        .into_iter()
        .map(|x| (scalar_qsp_real(&phi.phases, x) - poly.eval(x)).abs())
        .fold(0.0, f64::max)
}

/// Phases whose scalar sequence reproduces `poly`, by damped least squares
/// from several seeded starting points.
pub fn find_phases(poly: &ChebyshevPoly) -> Result<PhaseSequence, QspError> {
    if poly.parity == Parity::Mixed {
        return Err(QspError::PhaseFinding("polynomial has no definite parity".into()));
    }
    if poly.sup_bound > 1.0 + 1e-9 {
        return Err(QspError::PhaseFinding(format!("sup {} exceeds 1", poly.sup_bound)));
    }
    let n = poly.degree.max(1);
    if n > MAX_QSP_DEGREE {
        return Err(QspError::PhaseFinding(format!("degree {n} above {MAX_QSP_DEGREE}; use the exact encoding")));
    }
    // Degree 0 is still a parity-even target; two signal uses realise it.
    let n = if poly.degree == 0 { 2 } else { n };
    // Only x ≥ 0 is needed: both sides share the parity.
    let nodes: Vec<f64> = chebyshev_nodes(2 * 64.max(2 * n)).into_iter().filter(|&x| x > 0.0).collect();
    let targets: Vec<f64> = nodes.iter().map(|&x| poly.eval(x)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ n as u64);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in 0..STARTS {
        let init: Vec<f64> = match start {
            0 => symmetric_start(n),
            1 => vec![0.0; n],
            _ => (0..n).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect(),
        };
        let (fit, res) = levenberg_marquardt(init, &nodes, &targets);
        if best.as_ref().map_or(true, |(r, _)| res < *r) {
            best = Some((res, fit));
        }
        if res < PHASE_TOLERANCE * 1e-2 {
            break;
        }
    }
    let (_, phases) = best.expect("at least one start");
    let phi = PhaseSequence::new(phases);
    let residual = phase_residual(&phi, poly, 64);
    if residual > PHASE_TOLERANCE {
        return Err(QspError::PhaseFinding(format!("residual {residual:e} on 64 nodes")));
    }
    Ok(phi)
}

/// Alternating ±π/2 pattern with a small ramp; it sits close to the
/// Chebyshev polynomial of matching degree.
fn symmetric_start(n: usize) -> Vec<f64> {
    let half = std::f64::consts::FRAC_PI_2;
    (0..n).map(|k| if k % 2 == 0 { -half } else { half } * if n % 2 == 1 { 0.5 } else { 1.0 }).collect()
}

fn residuals(phases: &[f64], nodes: &[f64], targets: &[f64]) -> DVector<f64> {
    DVector::from_iterator(nodes.len(), nodes.iter().zip(targets).map(|(&x, &t)| scalar_qsp_real(phases, x) - t))
}

fn levenberg_marquardt(mut phases: Vec<f64>, nodes: &[f64], targets: &[f64]) -> (Vec<f64>, f64) {
    let n = phases.len();
    let m = nodes.len();
    let mut r = residuals(&phases, nodes, targets);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let h = 1e-7;
    for _ in 0..LM_ITERATIONS {
        if r.amax() < 1e-12 {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(m, n);
        for k in 0..n {
            let mut p = phases.clone();
            p[k] += h;
            let rp = residuals(&p, nodes, targets);
            p[k] -= 2.0 * h;
            let rm = residuals(&p, nodes, targets);
            jac.set_column(k, &((rp - rm) / (2.0 * h)));
        }
        let jt = jac.transpose();
        let normal = &jt * &jac;
        let grad = &jt * &r;
        let mut improved = false;
        while lambda < 1e10 {
            let mut damped = normal.clone();
            for k in 0..n {
                damped[(k, k)] += lambda * (normal[(k, k)] + 1e-9);
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 4.0;
                continue;
            };
            let step = chol.solve(&(-&grad));
            let trial: Vec<f64> = phases.iter().zip(step.iter()).map(|(p, s)| p + s).collect();
            let tr = residuals(&trial, nodes, targets);
            let tc = tr.norm_squared();
            if tc < cost {
                phases = trial;
                r = tr;
                cost = tc;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    let worst = r.amax();
    (phases, worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, kron};

    fn ket0_proj(dim: usize) -> Matrix {
        let mut p = Matrix::zeros(dim, dim);
        p[(0, 0)] = c(1.0);
        p
    }

    #[test]
    fn degree_one_zero_phase_is_identity_transform() {
        let u = reflection_signal(0.3);
        let p = ket0_proj(2);
        let out = qsp_sequence(&u, &p, &p, &PhaseSequence::new(vec![0.0])).unwrap();
        assert!((out[(0, 0)].re - 0.3).abs() < 1e-15);
    }

    #[test]
    fn zero_phases_match_direct_product() {
        let u = reflection_signal(0.7);
        let p = ket0_proj(2);
        let out = qsp_sequence(&u, &p, &p, &PhaseSequence::new(vec![0.0; 4])).unwrap();
        let direct = u.adjoint() * &u * u.adjoint() * &u;
        assert!(frob_norm(&(out - direct)) < 1e-14);
    }

    #[test]
    fn scalar_form_matches_matrix_form() {
        let p = ket0_proj(2);
        let phases = vec![0.3, -1.1, 0.7, 2.0, -0.4];
        for &x in &[-0.9, -0.2, 0.0, 0.5, 1.0] {
            let full = qsp_sequence(&reflection_signal(x), &p, &p, &PhaseSequence::new(phases.clone())).unwrap();
            assert!((full[(0, 0)] - scalar_qsp(&phases, x)).norm() < 1e-13);
        }
    }

    #[test]
    fn second_chebyshev_polynomial_by_hand() {
        let phases = [-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2];
        for &x in &[0.0, 0.5, -0.5, 1.0, -1.0] {
            assert!((scalar_qsp_real(&phases, x) - (2.0 * x * x - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_unitary_and_bad_projectors() {
        let p = ket0_proj(2);
        let bad = Matrix::from_element(2, 2, c(1.0));
        assert!(matches!(qsp_sequence(&bad, &p, &p, &PhaseSequence::new(vec![0.0])), Err(QspError::NonUnitary(_))));
        let not_proj = Matrix::identity(2, 2) * c(0.5);
        assert!(qsp_sequence(&reflection_signal(0.1), &not_proj, &p, &PhaseSequence::new(vec![0.0])).is_err());
    }

    #[test]
    fn phases_for_low_chebyshev_polynomials() {
        for n in 1..=5 {
            let t = ChebyshevPoly::chebyshev_t(n);
            let phi = find_phases(&t).unwrap();
            assert!(phase_residual(&phi, &t, 64) <= PHASE_TOLERANCE, "T_{n}");
        }
        let t1 = find_phases(&ChebyshevPoly::chebyshev_t(1)).unwrap();
        assert!((t1.phases[0].cos().abs() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn phases_for_square_polynomial_on_block() {
        let p2 = ChebyshevPoly::from_monomials(&[-1.0, 0.0, 2.0]).unwrap();
        let phi = find_phases(&p2).unwrap();
        let proj = ket0_proj(2);
        for &x in &[0.0, 0.5, -0.5, 1.0, -1.0] {
            let plus = qsp_sequence(&reflection_signal(x), &proj, &proj, &phi).unwrap();
            let minus = qsp_sequence(&reflection_signal(x), &proj, &proj, &phi.negated()).unwrap();
            let real = (plus[(0, 0)] + minus[(0, 0)]) / 2.0;
            assert!((real.re - p2.eval(x)).abs() < 1e-6);
            assert!(real.im.abs() < 1e-12);
        }
    }

    #[test]
    fn high_degree_is_routed_away() {
        let t = ChebyshevPoly::chebyshev_t(61);
        assert!(matches!(find_phases(&t), Err(QspError::PhaseFinding(_))));
    }

    #[test]
    fn sequence_on_larger_unitary_has_block_structure() {
        // Signal ⊗ I keeps the scalar transform on each copy.
        let u = kron(&reflection_signal(0.4), &Matrix::identity(2, 2));
        let mut p = Matrix::zeros(4, 4);
        p[(0, 0)] = c(1.0);
        p[(1, 1)] = c(1.0);
        let phases = vec![0.2, -0.5, 1.3];
        let out = qsp_sequence(&u, &p, &p, &PhaseSequence::new(phases.clone())).unwrap();
        let z = scalar_qsp(&phases, 0.4);
        assert!((out[(0, 0)] - z).norm() < 1e-13);
        assert!((out[(1, 1)] - z).norm() < 1e-13);
    }
}
