use std::collections::BTreeSet;
use std::f64::consts::PI;

use crate::comm::Party;
use crate::linalg::{c, diag, frob_norm, op_norm, pinv, real_vector, vec_norm, Matrix, Vector, ONE};

use super::{Combine, Instance, InstanceError, InstanceKind, Metadata};

fn set_of(items: &[usize], bound: usize, name: &str) -> Result<BTreeSet<usize>, InstanceError> {
    let set: BTreeSet<usize> = items.iter().copied().collect();
    if let Some(&bad) = set.iter().find(|&&i| i >= bound) {
        return Err(InstanceError::IndexRange { index: bad, bound });
    }
    if set.len() != items.len() {
        return Err(InstanceError::Param(format!("{name} has repeated elements")));
    }
    Ok(set)
}

fn set_text(s: &BTreeSet<usize>) -> String {
    let items: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    items.join(",")
}

fn with_event(mut inst: Instance, indices: Vec<usize>, intersecting: bool) -> Instance {
    inst.metadata = Metadata { event_indices: indices, intersecting: Some(intersecting), ..Metadata::default() };
    inst
}

fn pinv_frobenius_ratio(inst: &Instance) -> Result<f64, InstanceError> {
    let p = pinv(&inst.a())?;
    let x = inst.solution()?;
    Ok((frob_norm(&p) * vec_norm(&inst.b()) / vec_norm(&x)).powi(2))
}

/// `A = I_n`, `b = e₀`.
pub fn identity(n: usize) -> Result<Instance, InstanceError> {
    if n == 0 {
        return Err(InstanceError::Param("n must be positive".into()));
    }
    Instance::two_party(InstanceKind::Identity, Matrix::identity(n, n), crate::linalg::basis(n, 0))
        .with_param("n", n)
        .finish()
}

/// Diagonal instance hiding set intersection in the solution.
///
/// Within `[0, l)`, `A` has 1 on `S` and `1/ε` elsewhere while `b` has 1 on
/// `T` and `ε` elsewhere, with `ε = 1/√l` unless overridden. Coordinates
/// from `l` to `n` are zero in both. Intersection points carry weight 1 in
/// `A⁺b`, the symmetric difference `ε` and the rest `ε²`.
pub fn disjointness_regression(
    s: &[usize],
    t: &[usize],
    l: usize,
    n: usize,
    eps: Option<f64>,
) -> Result<Instance, InstanceError> {
    if l < 2 || l > n {
        return Err(InstanceError::Param(format!("need 2 <= l <= n, got l = {l}, n = {n}")));
    }
    let s = set_of(s, l, "S")?;
    let t = set_of(t, l, "T")?;
    for (name, set) in [("S", &s), ("T", &t)] {
        if set.is_empty() || set.len() == l {
            return Err(InstanceError::Param(format!("{name} must be a nonempty proper subset of [0, {l})")));
        }
    }
    let eps = eps.unwrap_or(1.0 / (l as f64).sqrt());
    if !(eps > 0.0 && eps < 1.0) {
        return Err(InstanceError::Param(format!("eps = {eps} not in (0, 1)")));
    }
    let a_diag: Vec<f64> = (0..n)
        .map(|i| match i {
            _ if i >= l => 0.0,
            _ if s.contains(&i) => 1.0,
            _ => 1.0 / eps,
        })
        .collect();
    let b: Vec<f64> = (0..n)
        .map(|i| match i {
            _ if i >= l => 0.0,
            _ if t.contains(&i) => 1.0,
            _ => eps,
        })
        .collect();
    let common: Vec<usize> = s.intersection(&t).copied().collect();
    let intersecting = !common.is_empty();
    let inst = Instance::two_party(InstanceKind::Disjointness, diag(&a_diag), real_vector(&b))
        .with_param("S", set_text(&s))
        .with_param("T", set_text(&t))
        .with_param("l", l)
        .with_param("n", n)
        .with_param("eps", eps);
    with_event(inst, common, intersecting).finish()
}

/// Projector instance with `κ = 1` and `γ` near `1/√|T|`.
///
/// Dimension `n + 1`: `A` projects onto `S ∪ {n}`, `b` is the indicator of
/// `T ∪ {n}`. The solution is the indicator of `(S ∩ T) ∪ {n}`.
pub fn gamma_regression(s: &[usize], t: &[usize], n: usize) -> Result<Instance, InstanceError> {
    let s = set_of(s, n, "S")?;
    let t = set_of(t, n, "T")?;
    let common: Vec<usize> = s.intersection(&t).copied().collect();
    if common.len() > 1 {
        return Err(InstanceError::Param("S and T may share at most one element".into()));
    }
    let a: Vec<f64> = (0..=n).map(|i| if i == n || s.contains(&i) { 1.0 } else { 0.0 }).collect();
    let b: Vec<f64> = (0..=n).map(|i| if i == n || t.contains(&i) { 1.0 } else { 0.0 }).collect();
    let intersecting = !common.is_empty();
    let inst = Instance::two_party(InstanceKind::Gamma, diag(&a), real_vector(&b))
        .with_param("S", set_text(&s))
        .with_param("T", set_text(&t))
        .with_param("n", n);
    with_event(inst, common, intersecting).finish()
}

/// Rescaled disjointness instance: `A` is `√ε` on `S` and `1/√ε` off it,
/// `b` is `1/√ε` on `T` and `√ε` off it, `ε = 1/√n`.
///
/// Records `‖A⁺‖²‖b‖²/‖A⁺b‖²` as the `norm_ratio` note.
pub fn scaled_disjointness(s: &[usize], t: &[usize], n: usize) -> Result<Instance, InstanceError> {
    let s = set_of(s, n, "S")?;
    let t = set_of(t, n, "T")?;
    if s.is_empty() || t.is_empty() {
        return Err(InstanceError::Param("S and T must be nonempty".into()));
    }
    let eps = 1.0 / (n as f64).sqrt();
    let (lo, hi) = (eps.sqrt(), 1.0 / eps.sqrt());
    let a: Vec<f64> = (0..n).map(|i| if s.contains(&i) { lo } else { hi }).collect();
    let b: Vec<f64> = (0..n).map(|i| if t.contains(&i) { hi } else { lo }).collect();
    let common: Vec<usize> = s.intersection(&t).copied().collect();
    let intersecting = !common.is_empty();
    let inst = Instance::two_party(InstanceKind::ScaledDisjointness, diag(&a), real_vector(&b))
        .with_param("S", set_text(&s))
        .with_param("T", set_text(&t))
        .with_param("n", n);
    let mut inst = with_event(inst, common, intersecting).finish()?;
    let ratio = (op_norm(&pinv(&inst.a())?)? * vec_norm(&inst.b()) / vec_norm(&inst.solution()?)).powi(2);
    inst.metadata.notes.insert("norm_ratio".into(), ratio);
    Ok(inst)
}

/// Instance whose solution is `e_{perm[j]}`.
///
/// `A` is the matrix of the inverse permutation, so `A⁺ e_j = e_{perm[j]}`.
pub fn permutation_index(perm: &[usize], j: usize) -> Result<Instance, InstanceError> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(InstanceError::Permutation(n));
        }
        seen[p] = true;
    }
    if j >= n {
        return Err(InstanceError::IndexRange { index: j, bound: n });
    }
    let mut a = Matrix::zeros(n, n);
    for (k, &p) in perm.iter().enumerate() {
        a[(k, p)] = ONE;
    }
    let perm_text: Vec<String> = perm.iter().map(|p| p.to_string()).collect();
    let inst = Instance::two_party(InstanceKind::PermutationIndex, a, crate::linalg::basis(n, j))
        .with_param("perm", perm_text.join(","))
        .with_param("j", j);
    with_event(inst, vec![perm[j]], true).finish()
}

/// Block-diagonal involution revealing bit `x_j`.
///
/// Block `k` acts on basis indices `2k` and `2k + 1` (flag in the low bit)
/// and is `I₂` when `x_k` is set, Pauli-X otherwise. `b = e_{2j}`; the
/// solution sits on `2j + 1` exactly when `x_j` is clear.
pub fn index_pauli(x: &[bool], j: usize) -> Result<Instance, InstanceError> {
    let n = x.len();
    if j >= n {
        return Err(InstanceError::IndexRange { index: j, bound: n });
    }
    let mut u = Matrix::zeros(2 * n, 2 * n);
    for (k, &bit) in x.iter().enumerate() {
        if bit {
            u[(2 * k, 2 * k)] = ONE;
            u[(2 * k + 1, 2 * k + 1)] = ONE;
        } else {
            u[(2 * k, 2 * k + 1)] = ONE;
            u[(2 * k + 1, 2 * k)] = ONE;
        }
    }
    let bits: String = x.iter().map(|&b| if b { '1' } else { '0' }).collect();
    let inst = Instance::two_party(InstanceKind::IndexPauli, u, crate::linalg::basis(2 * n, 2 * j))
        .with_param("x", bits)
        .with_param("j", j);
    with_event(inst, vec![2 * j + 1], !x[j]).finish()
}

/// Index-function instance built from an `m × n` bit matrix.
///
/// `D` stacks `n` diagonal `m × m` blocks; block `k` holds `1/√ε` where
/// column `k` has a one and `√ε` elsewhere, `ε = 1/√m`. `b` is zero except
/// in block `j`, which is `1/√ε` at row `i` and `√ε` elsewhere. Index `i`
/// dominates the solution when bit `(i, j)` is set.
pub fn bit_table_regression(bits: &[Vec<bool>], i: usize, j: usize) -> Result<Instance, InstanceError> {
    let m = bits.len();
    let n = bits.first().map_or(0, |r| r.len());
    if m == 0 || n == 0 || bits.iter().any(|r| r.len() != n) {
        return Err(InstanceError::Shape("bit matrix must be rectangular and nonempty".into()));
    }
    if i >= m {
        return Err(InstanceError::IndexRange { index: i, bound: m });
    }
    if j >= n {
        return Err(InstanceError::IndexRange { index: j, bound: n });
    }
    let eps = 1.0 / (m as f64).sqrt();
    let (lo, hi) = (eps.sqrt(), 1.0 / eps.sqrt());
    let mut d = Matrix::zeros(m * n, m);
    for k in 0..n {
        for row in 0..m {
            d[(k * m + row, row)] = c(if bits[row][k] { hi } else { lo });
        }
    }
    let mut b = Vector::zeros(m * n);
    for row in 0..m {
        b[j * m + row] = c(if row == i { hi } else { lo });
    }
    let warnings: Vec<String> = bits
        .iter()
        .enumerate()
        .filter(|(_, r)| r.iter().all(|&x| x) || r.iter().all(|&x| !x))
        .map(|(k, _)| format!("row {k} is constant"))
        .collect();
    let rows: Vec<String> = bits.iter().map(|r| r.iter().map(|&x| if x { '1' } else { '0' }).collect()).collect();
    let mut inst = Instance::two_party(InstanceKind::IndexRegression, d, b)
        .with_param("bits", rows.join("/"))
        .with_param("i", i)
        .with_param("j", j);
    inst = with_event(inst, vec![i], bits[i][j]);
    inst.metadata.warnings = warnings;
    let mut inst = inst.finish()?;
    let ratio = pinv_frobenius_ratio(&inst)?;
    inst.metadata.notes.insert("norm_ratio".into(), ratio);
    Ok(inst)
}

fn sign_table(table: &[i8]) -> Result<usize, InstanceError> {
    let len = table.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(InstanceError::TableLength(len));
    }
    if table.iter().any(|&v| v != 1 && v != -1) {
        return Err(InstanceError::NotSign);
    }
    Ok(len.trailing_zeros() as usize)
}

fn walsh_hadamard(d: usize) -> Matrix {
    let n = 1usize << d;
    let scale = 1.0 / (n as f64).sqrt();
    Matrix::from_fn(n, n, |s, x| if (s & x).count_ones() % 2 == 0 { c(scale) } else { c(-scale) })
}

fn sign_vector(table: &[i8]) -> Vec<f64> {
    table.iter().map(|&v| v as f64).collect()
}

/// Squared Fourier coefficients of the pointwise product `f·g`, by direct
/// summation.
pub fn fourier_distribution(f: &[i8], g: &[i8]) -> Result<Vec<f64>, InstanceError> {
    let d = sign_table(f)?;
    if sign_table(g)? != d {
        return Err(InstanceError::Shape("f and g must have equal length".into()));
    }
    let n = f.len();
    Ok((0..n)
        .map(|s| {
            let sum: f64 = (0..n)
                .map(|x| {
                    let sign = if (s & x).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    sign * (f[x] * g[x]) as f64
                })
                .sum();
            (sum / n as f64).powi(2)
        })
        .collect())
}

fn table_text(t: &[i8]) -> String {
    t.iter().map(|&v| if v > 0 { '+' } else { '-' }).collect()
}

/// Instance whose solution is `H^{⊗d} D_f |g⟩`.
///
/// `A = D_f H^{⊗d}`, the inverse of the Fourier-sampling map, so the
/// solution distribution is the Fourier spectrum of `f·g`.
pub fn fourier_sampling(f: &[i8], g: &[i8]) -> Result<Instance, InstanceError> {
    let d = sign_table(f)?;
    if sign_table(g)? != d {
        return Err(InstanceError::Shape("f and g must have equal length".into()));
    }
    let n = f.len();
    let a = diag(&sign_vector(f)) * walsh_hadamard(d);
    let b = real_vector(&sign_vector(g)) / c((n as f64).sqrt());
    Instance::two_party(InstanceKind::Fourier, a, b)
        .with_param("f", table_text(f))
        .with_param("g", table_text(g))
        .finish()
}

/// `H = (π/2) D_f L D_f` with `L = Σₖ (I − H₂)` on qubit `k`, `ψ = |g⟩`,
/// `t = 1`. Since `exp(iπ/2 (I − H₂)) = H₂`, the evolved state is
/// `D_f H^{⊗d} D_f |g⟩`.
pub fn hadamard_hamiltonian(f: &[i8], g: &[i8]) -> Result<Instance, InstanceError> {
    let d = sign_table(f)?;
    if sign_table(g)? != d {
        return Err(InstanceError::Shape("f and g must have equal length".into()));
    }
    let n = f.len();
    let h2 = 1.0 / 2f64.sqrt();
    let mut lap = Matrix::zeros(n, n);
    for x in 0..n {
        lap[(x, x)] += c(d as f64);
        for k in 0..d {
            let bit = (x >> k) & 1;
            // −H₂ on qubit k, other qubits untouched.
            lap[(x, x)] -= c(if bit == 1 { -h2 } else { h2 });
            lap[(x, x ^ (1 << k))] -= c(h2);
        }
    }
    let df = diag(&sign_vector(f));
    let h = (&df * lap * &df).map(|z| z * (PI / 2.0));
    let psi = real_vector(&sign_vector(g)) / c((n as f64).sqrt());
    let mut inst = Instance::two_party(InstanceKind::HadamardHamiltonian, h, psi)
        .with_param("f", table_text(f))
        .with_param("g", table_text(g));
    inst.combine = Combine::Sum;
    inst.time = Some(1.0);
    inst.finish()
}

/// Scale overrides for [`multiparty_regression`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultipartyScales {
    pub eps: f64,
    pub xi: f64,
    pub eta: f64,
}

impl MultipartyScales {
    /// `ε = 1/√n`, `ξ = 1/√r`, `η = 1/(r√n)`.
    pub fn standard(n: usize, r: usize) -> Self {
        let sn = (n as f64).sqrt();
        Self { eps: 1.0 / sn, xi: 1.0 / (r as f64).sqrt(), eta: 1.0 / (sn * r as f64) }
    }
}

/// Coordinator instance over `r = sets.len()` players.
///
/// Player 0 holds `D` (1 on `T₀`, `1/ε` off it) with a zero vector; player
/// `j ≥ 1` holds `ξI` and the vector that is 1 on `T_j` and `η` off it. The
/// event indices are the elements common to every set.
pub fn multiparty_regression(
    sets: &[Vec<usize>],
    n: usize,
    scales: Option<MultipartyScales>,
) -> Result<Instance, InstanceError> {
    let r = sets.len();
    if r < 2 {
        return Err(InstanceError::Param("need at least two players".into()));
    }
    if r * r > n {
        return Err(InstanceError::Param(format!("r = {r} needs r^2 <= n = {n}")));
    }
    let sets: Vec<BTreeSet<usize>> =
        sets.iter().enumerate().map(|(k, s)| set_of(s, n, &format!("T{k}"))).collect::<Result<_, _>>()?;
    let sc = scales.unwrap_or_else(|| MultipartyScales::standard(n, r));
    if ![sc.eps, sc.xi, sc.eta].iter().all(|v| v.is_finite() && *v > 0.0) {
        return Err(InstanceError::Param("scales must be positive".into()));
    }
    let d: Vec<f64> = (0..n).map(|i| if sets[0].contains(&i) { 1.0 } else { 1.0 / sc.eps }).collect();
    let mut a_parts = vec![diag(&d)];
    let mut b_parts = vec![Vector::zeros(n)];
    for set in &sets[1..] {
        a_parts.push(Matrix::identity(n, n).map(|z| z * sc.xi));
        let v: Vec<f64> = (0..n).map(|i| if set.contains(&i) { 1.0 } else { sc.eta }).collect();
        b_parts.push(real_vector(&v));
    }
    let common: Vec<usize> = (0..n).filter(|i| sets.iter().all(|s| s.contains(i))).collect();
    let intersecting = !common.is_empty();
    let owners: Vec<Party> = (0..r).map(Party::Player).collect();
    let mut inst = Instance {
        kind: InstanceKind::Multiparty,
        params: Default::default(),
        combine: Combine::Stack,
        a_parts,
        a_owners: owners.clone(),
        b_parts,
        b_owners: owners,
        time: None,
        metadata: Metadata::default(),
    };
    for (k, s) in sets.iter().enumerate() {
        inst = inst.with_param(&format!("T{k}"), set_text(s));
    }
    inst = inst
        .with_param("n", n)
        .with_param("r", r)
        .with_param("eps", sc.eps)
        .with_param("xi", sc.xi)
        .with_param("eta", sc.eta);
    with_event(inst, common, intersecting).finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqVariant {
    /// `A = |0⟩⟨0| + (1/n)|a⟩⟨a|`, `b = |0⟩ + |b⟩`.
    Scaled,
    /// `A = |0⟩⟨0| + |a⟩⟨a|`, `b = (1/n)|0⟩ + |b⟩`.
    SmallOverlap,
}

impl SqVariant {
    pub fn number(self) -> u8 {
        match self {
            SqVariant::Scaled => 1,
            SqVariant::SmallOverlap => 2,
        }
    }

    pub fn from_number(v: u8) -> Result<Self, InstanceError> {
        match v {
            1 => Ok(SqVariant::Scaled),
            2 => Ok(SqVariant::SmallOverlap),
            _ => Err(InstanceError::Param(format!("variant {v} is not 1 or 2"))),
        }
    }
}

/// Rank-2 instance of dimension `n + 1` where `|a⟩`, `|b⟩` are the normalised
/// indicators of the bit strings on indices `1..=n`.
///
/// Notes record `frob_times_pinv = ‖A‖_F ‖A⁺‖`. Every nonzero index is an
/// event index, so the event probability is the mass away from index 0.
pub fn sq_counterexample(a_bits: &[bool], b_bits: &[bool], variant: SqVariant) -> Result<Instance, InstanceError> {
    let n = a_bits.len();
    if b_bits.len() != n || n == 0 {
        return Err(InstanceError::Shape("bit strings must share a positive length".into()));
    }
    let indicator = |bits: &[bool]| -> Result<Vector, InstanceError> {
        let weight = bits.iter().filter(|&&x| x).count();
        if weight == 0 {
            return Err(InstanceError::Param("bit string has zero weight".into()));
        }
        let scale = 1.0 / (weight as f64).sqrt();
        let mut v = Vector::zeros(n + 1);
        for (k, &bit) in bits.iter().enumerate() {
            if bit {
                v[k + 1] = c(scale);
            }
        }
        Ok(v)
    };
    let ka = indicator(a_bits)?;
    let kb = indicator(b_bits)?;
    let e0 = crate::linalg::basis(n + 1, 0);
    let inv_n = 1.0 / n as f64;
    let (a_weight, b0) = match variant {
        SqVariant::Scaled => (inv_n, 1.0),
        SqVariant::SmallOverlap => (1.0, inv_n),
    };
    let a = &e0 * e0.adjoint() + (&ka * ka.adjoint()).map(|z| z * a_weight);
    let b = e0.map(|z| z * b0) + kb;
    let intersecting = a_bits.iter().zip(b_bits).any(|(&x, &y)| x && y);
    let text = |bits: &[bool]| -> String { bits.iter().map(|&x| if x { '1' } else { '0' }).collect() };
    let inst = Instance::two_party(InstanceKind::SqCounterexample, a, b)
        .with_param("a", text(a_bits))
        .with_param("b", text(b_bits))
        .with_param("variant", variant.number());
    let mut inst = with_event(inst, (1..=n).collect(), intersecting).finish()?;
    let a = inst.a();
    let product = frob_norm(&a) * op_norm(&pinv(&a)?)?;
    inst.metadata.notes.insert("frob_times_pinv".into(), product);
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm_i;

    #[test]
    fn disjointness_hand_case() {
        // S = {1,2}, T = {2,3} in 1-based labels.
        let inst = disjointness_regression(&[0, 1], &[1, 2], 4, 4, None).unwrap();
        let p = inst.metadata.event_probability.unwrap();
        assert!((p - 0.64).abs() < 1e-12);
        assert!((inst.metadata.kappa - 2.0).abs() < 1e-12);
        assert_eq!(inst.metadata.intersecting, Some(true));
    }

    #[test]
    fn disjointness_disjoint_case_is_flat_on_symmetric_difference() {
        let inst = disjointness_regression(&[0, 1], &[2, 3], 9, 10, None).unwrap();
        let dist = &inst.metadata.expected_distribution;
        for i in 1..4 {
            assert!((dist[i] - dist[0]).abs() < 1e-12);
        }
        assert!(dist[9] == 0.0);
        assert!(disjointness_regression(&[], &[1], 4, 4, None).is_err());
        assert!(disjointness_regression(&[0, 1, 2, 3], &[1], 4, 4, None).is_err());
    }

    #[test]
    fn gamma_regression_half_on_intersection() {
        let inst = gamma_regression(&[0, 3], &[3, 4, 5], 8).unwrap();
        assert!((inst.metadata.expected_distribution[3] - 0.5).abs() < 1e-12);
        assert!((inst.metadata.kappa - 1.0).abs() < 1e-12);
        // γ² = (|S∩T| + 1)/(|T| + 1) = 2/4.
        assert!((inst.metadata.gamma - 0.5f64.sqrt()).abs() < 1e-12);
        let disjoint = gamma_regression(&[0, 1], &[4, 5], 8).unwrap();
        assert!((disjoint.metadata.expected_distribution[8] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scaled_disjointness_intersection_dominates() {
        let s: Vec<usize> = (0..8).collect();
        let t: Vec<usize> = (7..15).collect();
        let inst = scaled_disjointness(&s, &t, 16).unwrap();
        assert!(inst.metadata.event_probability.unwrap() >= 0.5);
        let t2: Vec<usize> = (8..16).collect();
        let disjoint = scaled_disjointness(&s, &t2, 16).unwrap();
        let ratio = disjoint.metadata.notes["norm_ratio"];
        assert!(ratio >= 8.0 / 4.0 && ratio <= 8.0 * 4.0, "{ratio}");
    }

    #[test]
    fn permutation_cases() {
        let inst = permutation_index(&[1, 2, 3, 0], 1).unwrap();
        assert!((inst.metadata.expected_distribution[2] - 1.0).abs() < 1e-12);
        assert!(permutation_index(&[0, 0, 1], 0).is_err());
    }

    #[test]
    fn index_pauli_reveals_bit() {
        let inst = index_pauli(&[true, false, true, true], 1).unwrap();
        assert!((inst.metadata.expected_distribution[3] - 1.0).abs() < 1e-12);
        let ones = index_pauli(&[true; 4], 2).unwrap();
        assert!((ones.metadata.expected_distribution[4] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn index_regression_balanced_bits() {
        let bits: Vec<Vec<bool>> = (0..4).map(|r| (0..4).map(|k| (r + k) % 4 < 2).collect()).collect();
        for i in 0..4 {
            for j in 0..4 {
                let inst = bit_table_regression(&bits, i, j).unwrap();
                let p = inst.metadata.event_probability.unwrap();
                assert_eq!(p >= 0.5, bits[i][j], "({i},{j}) p = {p}");
                assert!(inst.metadata.warnings.is_empty());
            }
        }
        let flat = vec![vec![true; 2]; 2];
        assert_eq!(bit_table_regression(&flat, 0, 0).unwrap().metadata.warnings.len(), 2);
    }

    #[test]
    fn fourier_constant_tables() {
        let inst = fourier_sampling(&[1, 1], &[1, 1]).unwrap();
        assert!((inst.metadata.expected_distribution[0] - 1.0).abs() < 1e-12);
        let f = [1, -1, -1, 1, 1, 1, -1, 1];
        let same = fourier_sampling(&f, &f).unwrap();
        assert!((same.metadata.expected_distribution[0] - 1.0).abs() < 1e-12);
        assert!(fourier_sampling(&[1, 1, 1], &[1, 1, 1]).is_err());
        assert!(fourier_sampling(&[1, 0], &[1, 1]).is_err());
    }

    #[test]
    fn hadamard_exponential_is_hadamard() {
        let inst = hadamard_hamiltonian(&[1, 1], &[1, 1]).unwrap();
        let u = expm_i(&inst.a(), 1.0).unwrap();
        let h2 = walsh_hadamard(1);
        assert!(frob_norm(&(u - h2)) < 1e-12);
        let f = [1, -1, 1, 1];
        let g = [-1, -1, 1, -1];
        let inst = hadamard_hamiltonian(&f, &g).unwrap();
        let oracle = fourier_distribution(&f, &g).unwrap();
        for (p, q) in inst.metadata.expected_distribution.iter().zip(&oracle) {
            assert!((p - q).abs() < 1e-10);
        }
    }

    #[test]
    fn multiparty_intersection_mass() {
        let t0: Vec<usize> = (0..8).collect();
        let t1: Vec<usize> = (7..15).collect();
        let inst = multiparty_regression(&[t0, t1], 16, None).unwrap();
        assert!(inst.metadata.event_probability.unwrap() >= 1.0 / 3.0);
        assert!(inst.is_multiparty());
        assert!(multiparty_regression(&[vec![0], vec![1], vec![2]], 8, None).is_err());
    }

    #[test]
    fn sq_variants() {
        let a = [true, true, false, false];
        let b = [false, false, true, true];
        let v1 = sq_counterexample(&a, &b, SqVariant::Scaled).unwrap();
        assert!((v1.metadata.expected_distribution[0] - 1.0).abs() < 1e-12);
        let v2 = sq_counterexample(&a, &b, SqVariant::SmallOverlap).unwrap();
        assert!((v2.metadata.notes["frob_times_pinv"] - 2f64.sqrt()).abs() < 1e-9);
        assert!(sq_counterexample(&[false; 4], &b, SqVariant::Scaled).is_err());
    }
}
