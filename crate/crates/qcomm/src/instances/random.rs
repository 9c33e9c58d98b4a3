use rand::seq::index::sample;
use rand::Rng;

use crate::comm::Party;
use crate::linalg::{diag, op_norm, random_hermitian, random_real_matrix, random_unit_vector, Matrix, Vector};

use super::{Combine, Instance, InstanceError, InstanceKind, Metadata};

/// Sorted uniform subset of `[0, universe)`.
pub fn random_subset<R: Rng>(rng: &mut R, universe: usize, size: usize) -> Vec<usize> {
    let mut v = sample(rng, universe, size.min(universe)).into_vec();
    v.sort_unstable();
    v
}

fn orthogonal<R: Rng>(rng: &mut R, dim: usize) -> Matrix {
    random_real_matrix(rng, dim, dim).qr().q()
}

/// Real `rows × cols` matrix with singular values spaced geometrically from
/// 1 down to `1/kappa`.
pub fn conditioned_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, kappa: f64) -> Result<Matrix, InstanceError> {
    if rows == 0 || cols == 0 {
        return Err(InstanceError::Param("dimensions must be positive".into()));
    }
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(InstanceError::Param(format!("kappa = {kappa} must be at least 1")));
    }
    let k = rows.min(cols);
    let sigma: Vec<f64> = (0..k).map(|i| if k == 1 { 1.0 } else { kappa.powf(-(i as f64) / (k - 1) as f64) }).collect();
    let u = orthogonal(rng, rows);
    let v = orthogonal(rng, cols);
    Ok(u.columns(0, k) * diag(&sigma) * v.columns(0, k).transpose())
}

/// Two-party instance with a conditioned `A` and a random complex unit `b`.
pub fn random_regression<R: Rng>(rng: &mut R, m: usize, n: usize, kappa: f64) -> Result<Instance, InstanceError> {
    let a = conditioned_matrix(rng, m, n, kappa)?;
    let b = random_unit_vector(rng, m);
    Instance::two_party(InstanceKind::Regression, a, b)
        .with_param("m", m)
        .with_param("n", n)
        .with_param("kappa", kappa)
        .finish()
}

/// Two-party instance with `A = diag(spectrum)`.
pub fn diagonal_regression(spectrum: &[f64], b: Vector) -> Result<Instance, InstanceError> {
    if spectrum.len() != b.len() {
        return Err(InstanceError::Shape("spectrum and b differ in length".into()));
    }
    let text: Vec<String> = spectrum.iter().map(|s| s.to_string()).collect();
    Instance::two_party(InstanceKind::Regression, diag(spectrum), b).with_param("spectrum", text.join(",")).finish()
}

fn block_sizes(dim: usize, r: usize) -> Vec<usize> {
    (0..r).map(|i| dim / r + usize::from(i < dim % r)).collect()
}

fn players(r: usize) -> Vec<Party> {
    (0..r).map(Party::Player).collect()
}

/// Conditioned `dim × dim` system split into `r` row blocks, block `i` and
/// the matching slice of `b` held by player `i`.
pub fn coordinator_split<R: Rng>(rng: &mut R, dim: usize, r: usize, kappa: f64) -> Result<Instance, InstanceError> {
    if r == 0 || r > dim {
        return Err(InstanceError::Param(format!("need 1 <= r <= dim, got r = {r}")));
    }
    let a = conditioned_matrix(rng, dim, dim, kappa)?;
    let b = random_unit_vector(rng, dim);
    let mut a_parts = Vec::with_capacity(r);
    let mut b_parts = Vec::with_capacity(r);
    let mut at = 0;
    for size in block_sizes(dim, r) {
        a_parts.push(a.rows(at, size).into_owned());
        b_parts.push(b.rows(at, size).into_owned());
        at += size;
    }
    Instance {
        kind: InstanceKind::CoordinatorSplit,
        params: Default::default(),
        combine: Combine::Stack,
        a_parts,
        a_owners: players(r),
        b_parts,
        b_owners: players(r),
        time: None,
        metadata: Metadata::default(),
    }
    .with_param("dim", dim)
    .with_param("r", r)
    .with_param("kappa", kappa)
    .finish()
}

/// Conditioned `dim × dim` system written as `A = ΣAᵢ`, `b = Σbᵢ` with random
/// summands, one per player.
pub fn sum_split<R: Rng>(rng: &mut R, dim: usize, r: usize, kappa: f64) -> Result<Instance, InstanceError> {
    if r == 0 || dim == 0 {
        return Err(InstanceError::Param("need r >= 1 and dim >= 1".into()));
    }
    let a = conditioned_matrix(rng, dim, dim, kappa)?;
    let b = random_unit_vector(rng, dim);
    let mut a_parts: Vec<Matrix> =
        (1..r).map(|_| random_real_matrix(rng, dim, dim).map(|z| z * (0.5 / dim as f64))).collect();
    let mut b_parts: Vec<Vector> = (1..r).map(|_| random_unit_vector(rng, dim).map(|z| z * 0.5)).collect();
    let a_rest = a_parts.iter().fold(a, |acc, m| acc - m);
    let b_rest = b_parts.iter().fold(b, |acc, v| acc - v);
    a_parts.push(a_rest);
    b_parts.push(b_rest);
    Instance {
        kind: InstanceKind::SumSplit,
        params: Default::default(),
        combine: Combine::Sum,
        a_parts,
        a_owners: players(r),
        b_parts,
        b_owners: players(r),
        time: None,
        metadata: Metadata::default(),
    }
    .with_param("dim", dim)
    .with_param("r", r)
    .with_param("kappa", kappa)
    .finish()
}

/// `r` random Hermitian summands, each of operator norm `norm_budget / r`,
/// with a random state at the referee.
pub fn hamiltonian_split<R: Rng>(
    rng: &mut R,
    dim: usize,
    r: usize,
    time: f64,
    norm_budget: f64,
) -> Result<Instance, InstanceError> {
    if r == 0 || dim == 0 {
        return Err(InstanceError::Param("need r >= 1 and dim >= 1".into()));
    }
    if !(norm_budget >= 0.0 && norm_budget.is_finite() && time.is_finite()) {
        return Err(InstanceError::Param("norm budget and time must be finite".into()));
    }
    let per_part = norm_budget / r as f64;
    let mut a_parts = Vec::with_capacity(r);
    for _ in 0..r {
        let h = random_hermitian(rng, dim);
        let scale = per_part / op_norm(&h)?;
        a_parts.push(h.map(|z| z * scale));
    }
    let psi = random_unit_vector(rng, dim);
    Instance {
        kind: InstanceKind::HamiltonianSplit,
        params: Default::default(),
        combine: Combine::Sum,
        a_parts,
        a_owners: players(r),
        b_parts: vec![psi],
        b_owners: vec![Party::Referee],
        time: Some(time),
        metadata: Metadata::default(),
    }
    .with_param("dim", dim)
    .with_param("r", r)
    .with_param("norm_budget", norm_budget)
    .finish()
}
