use crate::blockenc::{hermitian_dilation, stack_lcu, sum_lcu, vstack, zero_encoding, BlockEncoding};
use crate::comm::{DistributedState, Party, Register, Session, Topology, TopologyKind};
use crate::linalg::{
    basis, c, completion_with_first_column, expm_i, frob_norm, is_hermitian, kron, pseudoinverse, qubits_for,
    spectrum_stats, unitary_dilation_padded, vec_norm, Matrix, Vector,
};
use crate::qsvt::{exact_poly_encoding, exponential_encoding, inverse_poly, jacobi_anger};

use super::{aa_iterations, amplify, unit, ProtocolError, ProtocolOutcome, NORM_BITS, ZERO_PROBABILITY};

/// `|b⟩` assembled at the referee, with the session that paid for it.
#[derive(Debug, Clone)]
pub struct PreparedState {
    /// Registers `sel` (one value per player) and `data` (largest part).
    pub state: DistributedState,
    pub session: Session,
    /// Data register size; amplitude `sel·block + x` holds `bᵢ[x]/‖b‖`.
    pub block: usize,
    pub norm: f64,
}

fn session_for(parties: usize) -> Result<Session, ProtocolError> {
    Ok(Session::new(Topology::new(TopologyKind::Coordinator, parties.max(2))?))
}

/// Unitary on `sel ⊗ data` applying `U_{bᵢ}` (first column `b̂ᵢ`) when `sel = i`.
fn controlled_prep(parts_sel: usize, i: usize, part: &Vector, block: usize) -> Matrix {
    let dim = parts_sel * block;
    let mut u = Matrix::identity(dim, dim);
    if vec_norm(part) > 0.0 {
        let mut padded = Vector::zeros(block);
        padded.rows_mut(0, part.len()).copy_from(part);
        u.view_mut((i * block, i * block), (block, block)).copy_from(&completion_with_first_column(&padded));
    }
    u
}

/// Players report `‖bᵢ‖` classically; the referee loads the selector and
/// then lends `sel ⊗ data` to each player for a controlled preparation.
pub fn coordinator_state_prep_b(parts: &[Vector]) -> Result<PreparedState, ProtocolError> {
    let r = parts.len();
    if r == 0 {
        return Err(ProtocolError::Precondition("no parts of b".into()));
    }
    let block = parts.iter().map(|v| v.len()).max().unwrap_or(0);
    let norms: Vec<f64> = parts.iter().map(vec_norm).collect();
    let norm = norms.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(ProtocolError::Precondition("all parts of b are zero".into()));
    }
    if r * block < 2 {
        return Err(ProtocolError::Precondition("b needs at least two entries".into()));
    }
    let mut session = session_for(r)?;
    for i in 0..r {
        session.send_classical(Party::Player(i), Party::Referee, NORM_BITS)?;
    }
    let selector = Vector::from_iterator(r, norms.iter().map(|&x| c(x / norm)));
    let mut state = DistributedState::product(vec![
        (Register { name: "sel".into(), dim: r, owner: Party::Referee }, selector),
        (Register { name: "data".into(), dim: block, owner: Party::Referee }, basis(block, 0)),
    ])?;
    for (i, part) in parts.iter().enumerate() {
        let u = controlled_prep(r, i, part, block);
        state.remote_apply(&mut session, Party::Player(i), &u, &["sel", "data"])?;
    }
    Ok(PreparedState { state, session, block, norm })
}

/// `b/‖b‖` in the `sel·block + x` layout, computed directly.
pub(crate) fn padded_layout(parts: &[Vector], block: usize) -> Vector {
    let mut out = Vector::zeros(parts.len() * block);
    for (i, p) in parts.iter().enumerate() {
        out.rows_mut(i * block, p.len()).copy_from(p);
    }
    let n = vec_norm(&out);
    out.map(|z| z / n)
}

pub(crate) fn part_encoding(a: &Matrix, rows: usize, dim: usize, owner: Party) -> Result<BlockEncoding, ProtocolError> {
    let enc = if frob_norm(a) == 0.0 {
        zero_encoding(rows, a.ncols(), dim)
    } else {
        let mut padded = Matrix::zeros(rows, a.ncols());
        padded.view_mut((0, 0), a.shape()).copy_from(a);
        unitary_dilation_padded(&padded, dim)?
    };
    Ok(enc.with_owner(owner))
}

/// Charges `uses` queries to an encoding spread over `r` players: each query
/// is a round trip of `width` qubits with every player.
fn charge_uses(session: &mut Session, r: usize, width: usize, uses: usize) -> Result<(), ProtocolError> {
    for _ in 0..uses {
        for i in 0..r {
            session.send_quantum(Party::Referee, Party::Player(i), width)?;
            session.send_quantum(Party::Player(i), Party::Referee, width)?;
        }
    }
    Ok(())
}

fn per_player_width(enc: &BlockEncoding, r: usize) -> usize {
    (enc.use_cost.qubits_per_use / (2 * r)).max(1)
}

struct InverseSetup {
    delta: f64,
    truncated: bool,
    target: Vector,
    gamma: f64,
    op_norm: f64,
}

fn inverse_setup(a: &Matrix, b: &Vector, delta: Option<f64>) -> Result<InverseSetup, ProtocolError> {
    let stats = spectrum_stats(a, b)?;
    if stats.min_nonzero_sv == 0.0 {
        return Err(ProtocolError::Precondition("A is zero".into()));
    }
    let delta = delta.unwrap_or(stats.min_nonzero_sv);
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(ProtocolError::Precondition(format!("delta = {delta} must be positive")));
    }
    let truncated = delta > stats.min_nonzero_sv * (1.0 + 1e-9);
    let inverse = pseudoinverse(a, delta * (1.0 - 1e-9))?;
    Ok(InverseSetup { delta, truncated, target: inverse * b, gamma: stats.gamma, op_norm: stats.op_norm })
}

/// Wraps the amplified run into an outcome and charges the encoding uses.
#[allow(clippy::too_many_arguments)]
fn inverse_outcome(
    protocol: &str,
    mut session: Session,
    r: usize,
    encoding: &BlockEncoding,
    inner: &BlockEncoding,
    degree: usize,
    prep_width: usize,
    p: f64,
    steps: usize,
    output: Vector,
    mono: Vector,
    final_p: f64,
    setup: &InverseSetup,
) -> Result<ProtocolOutcome, ProtocolError> {
    for _ in 0..2 * steps {
        for i in 0..r {
            session.send_quantum(Party::Referee, Party::Player(i), prep_width)?;
            session.send_quantum(Party::Player(i), Party::Referee, prep_width)?;
        }
    }
    let uses = (2 * steps + 1) * 2 * degree;
    charge_uses(&mut session, r, per_player_width(inner, r), uses)?;
    let mut out =
        ProtocolOutcome::new(protocol, TopologyKind::Coordinator, output, &setup.target, mono, session.ledger);
    out.success_prob = p;
    out.final_success_prob = final_p;
    out.repetitions_or_iterations = steps + 1;
    out.oracle_uses = Some(uses);
    out.degree = Some(degree);
    out.failed = p <= ZERO_PROBABILITY;
    out.diagnostics.insert("alpha".into(), inner.alpha);
    out.diagnostics.insert("delta".into(), setup.delta);
    out.diagnostics.insert("gamma".into(), setup.gamma);
    out.diagnostics.insert("op_norm".into(), setup.op_norm);
    out.diagnostics.insert("encoding_dim".into(), encoding.dim() as f64);
    if setup.truncated {
        out.warnings.push(format!(
            "delta {} exceeds the smallest singular value; target is the truncated solution",
            setup.delta
        ));
    }
    if out.failed {
        out.warnings.push("b is orthogonal to the column space".into());
    }
    Ok(out)
}

/// Regression over row blocks: player `i` holds `Aᵢ` and `bᵢ`, and the
/// referee ends with `|A⁺b⟩`. Before amplification the good branch has
/// probability `(9/64)·δ²‖A⁺b‖²/‖b‖²`, at least `(9/64)·δ²γ²/‖A‖²`.
pub fn coordinator_regression(
    a_parts: &[Matrix],
    b_parts: &[Vector],
    delta: Option<f64>,
    eps: f64,
) -> Result<ProtocolOutcome, ProtocolError> {
    let r = a_parts.len();
    if r == 0 || b_parts.len() != r {
        return Err(ProtocolError::Precondition("need one (A_i, b_i) pair per player".into()));
    }
    let n = a_parts[0].ncols();
    if a_parts.iter().zip(b_parts).any(|(a, b)| a.ncols() != n || a.nrows() != b.len()) {
        return Err(ProtocolError::Precondition("row blocks and vector blocks disagree".into()));
    }
    let a = vstack(a_parts);
    let b_len: usize = b_parts.iter().map(|v| v.len()).sum();
    let mut b = Vector::zeros(b_len);
    let mut at = 0;
    for part in b_parts {
        b.rows_mut(at, part.len()).copy_from(part);
        at += part.len();
    }
    let setup = inverse_setup(&a, &b, delta)?;

    let prepared = coordinator_state_prep_b(b_parts)?;
    let block = prepared.block;
    let dim = block.max(n);
    let encodings: Vec<BlockEncoding> = a_parts
        .iter()
        .enumerate()
        .map(|(i, part)| part_encoding(part, block, dim, Party::Player(i)))
        .collect::<Result<_, _>>()?;
    let stacked = stack_lcu(&encodings)?;
    let herm = hermitian_dilation(&stacked);
    let poly = inverse_poly((setup.delta / stacked.alpha).min(0.5), eps)?.scaled(0.5);
    let enc = exact_poly_encoding(&herm, &poly)?;

    let rows = stacked.rows;
    let embed = |v: &Vector| {
        let mut out = Vector::zeros(enc.dim());
        out.rows_mut(0, rows).copy_from(v);
        out
    };
    let init = embed(prepared.state.amplitudes());
    let direct = embed(&padded_layout(b_parts, block));
    let u = &enc.unitary;
    let inverse = u.adjoint();
    let good = |i: usize| (rows..rows + n).contains(&i);
    let first = u * &init;
    let p: f64 = (rows..rows + n).map(|i| first[i].norm_sqr()).sum();
    let steps = if p > ZERO_PROBABILITY { aa_iterations(p) } else { 0 };
    let amplified = amplify(&init, |v| u * v, |v| &inverse * v, good, steps);
    let final_p: f64 = (rows..rows + n).map(|i| amplified[i].norm_sqr()).sum();
    let output = amplified.rows(rows, n).into_owned();
    let mono = (u * &direct).rows(rows, n).into_owned();
    let prep_width = qubits_for(r) + qubits_for(block);
    let mut out = inverse_outcome(
        "coord",
        prepared.session,
        r,
        &enc,
        &stacked,
        poly.degree,
        prep_width,
        p,
        steps,
        output,
        mono,
        final_p,
        &setup,
    )?;
    let predicted = 9.0 / 64.0 * setup.delta.powi(2) * vec_norm(&setup.target).powi(2) / vec_norm(&b).powi(2);
    out.diagnostics.insert("predicted_success".into(), predicted);
    Ok(out)
}

/// Regression with `A = ΣAᵢ` and `b = Σbᵢ`. The referee prepares `b` by a
/// linear combination of the players' preparations, which succeeds with
/// probability `(‖b‖/Σ‖bᵢ‖)²`; amplification covers both stages.
pub fn coordinator_sum_regression(
    a_parts: &[Matrix],
    b_parts: &[Vector],
    delta: Option<f64>,
    eps: f64,
) -> Result<ProtocolOutcome, ProtocolError> {
    let r = a_parts.len();
    if r == 0 || b_parts.len() != r {
        return Err(ProtocolError::Precondition("need one (A_i, b_i) pair per player".into()));
    }
    let (m, n) = a_parts[0].shape();
    if a_parts.iter().any(|a| a.shape() != (m, n)) || b_parts.iter().any(|v| v.len() != m) {
        return Err(ProtocolError::Precondition("summed parts must share one shape".into()));
    }
    if m * r < 2 {
        return Err(ProtocolError::Precondition("b needs at least two entries".into()));
    }
    let a = a_parts.iter().skip(1).fold(a_parts[0].clone(), |acc, x| acc + x);
    let b = b_parts.iter().skip(1).fold(b_parts[0].clone(), |acc, x| acc + x);
    unit(&b, "b")?;
    let setup = inverse_setup(&a, &b, delta)?;
    let dim = m.max(n);
    let encodings: Vec<BlockEncoding> = a_parts
        .iter()
        .enumerate()
        .map(|(i, part)| part_encoding(part, m, dim, Party::Player(i)))
        .collect::<Result<_, _>>()?;
    let summed = sum_lcu(&encodings)?;
    let herm = hermitian_dilation(&summed);
    let poly = inverse_poly((setup.delta / summed.alpha).min(0.5), eps)?.scaled(0.5);
    let enc = exact_poly_encoding(&herm, &poly)?;

    // Selector weights √(‖bᵢ‖/S), controlled preparations, then unweighting.
    let norms: Vec<f64> = b_parts.iter().map(vec_norm).collect();
    let total: f64 = norms.iter().sum();
    let weights = Vector::from_iterator(r, norms.iter().map(|&x| c((x / total).sqrt())));
    let spread = completion_with_first_column(&weights);
    let mut session = session_for(r)?;
    for i in 0..r {
        session.send_classical(Party::Player(i), Party::Referee, NORM_BITS)?;
    }
    let mut state = DistributedState::product(vec![
        (Register { name: "sel".into(), dim: r, owner: Party::Referee }, basis(r, 0)),
        (Register { name: "data".into(), dim: m, owner: Party::Referee }, basis(m, 0)),
    ])?;
    state.apply_local(Party::Referee, &["sel"], &spread)?;
    let mut controlled = Matrix::identity(r * m, r * m);
    for (i, part) in b_parts.iter().enumerate() {
        let u = controlled_prep(r, i, part, m);
        state.remote_apply(&mut session, Party::Player(i), &u, &["sel", "data"])?;
        controlled = u * controlled;
    }
    state.apply_local(Party::Referee, &["sel"], &spread.adjoint())?;
    let prep = kron(&spread.adjoint(), &Matrix::identity(m, m)) * controlled * kron(&spread, &Matrix::identity(m, m));
    let prep_success = state.probability("sel", 0)?;

    // Work vector over sel ⊗ encoding register; data sits in the first m slots.
    let width = enc.dim();
    let u = &enc.unitary;
    let inverse = u.adjoint();
    let apply_prep = |v: &Vector, g: &Matrix| {
        let mut out = v.clone();
        let small = Vector::from_iterator(r * m, (0..r * m).map(|k| v[(k / m) * width + k % m]));
        let moved = g * small;
        for k in 0..r * m {
            out[(k / m) * width + k % m] = moved[k];
        }
        out
    };
    let apply_enc = |v: &Vector, g: &Matrix| {
        let mut out = v.clone();
        for s in 0..r {
            let piece = g * v.rows(s * width, width);
            out.rows_mut(s * width, width).copy_from(&piece);
        }
        out
    };
    let prep_adj = prep.adjoint();
    let forward = |v: &Vector| apply_enc(&apply_prep(v, &prep), u);
    let backward = |v: &Vector| apply_prep(&apply_enc(v, &inverse), &prep_adj);
    let good = |i: usize| i < width && (m..m + n).contains(&i);

    let mut init = Vector::zeros(r * width);
    init[0] = c(1.0);
    let mut prepared = Vector::zeros(r * width);
    for k in 0..r * m {
        prepared[(k / m) * width + k % m] = state.amplitudes()[k];
    }
    let first = apply_enc(&prepared, u);
    let p: f64 = (m..m + n).map(|i| first[i].norm_sqr()).sum();
    let steps = if p > ZERO_PROBABILITY { aa_iterations(p) } else { 0 };
    // The distributed preparation is the first forward pass; later passes
    // repeat it through the same unitary.
    let amplified = if steps == 0 { first.clone() } else { amplify(&init, forward, backward, good, steps) };
    let final_p: f64 = (m..m + n).map(|i| amplified[i].norm_sqr()).sum();
    let output = amplified.rows(m, n).into_owned();
    let mono = forward(&init).rows(m, n).into_owned();
    let prep_width = qubits_for(r) + qubits_for(m);
    let mut out = inverse_outcome(
        "coord-sum",
        session,
        r,
        &enc,
        &summed,
        poly.degree,
        prep_width,
        p,
        steps,
        output,
        mono,
        final_p,
        &setup,
    )?;
    out.diagnostics.insert("prep_success".into(), prep_success);
    out.diagnostics.insert("prep_success_predicted".into(), (vec_norm(&b) / total).powi(2));
    Ok(out)
}

/// `e^{i(ΣHᵢ)t}|ψ⟩` at the referee from players' Hamiltonians. The summed
/// encoding feeds a Jacobi–Anger pair whose combined block is `e^{iHt}/2`,
/// so one amplification step lifts the success probability from about 1/4.
pub fn hamiltonian_sim_coordinator(
    h_parts: &[Matrix],
    psi: &Vector,
    t: f64,
    eps: f64,
) -> Result<ProtocolOutcome, ProtocolError> {
    if !(eps > 0.0 && eps < (-1.0f64).exp()) {
        return Err(ProtocolError::Precondition(format!("eps = {eps} not in (0, 1/e)")));
    }
    let r = h_parts.len();
    if r == 0 {
        return Err(ProtocolError::Precondition("no Hamiltonian parts".into()));
    }
    let n = h_parts[0].nrows();
    for h in h_parts {
        if h.shape() != (n, n) || !is_hermitian(h, 1e-9 * (1.0 + frob_norm(h))) {
            return Err(ProtocolError::Precondition("parts must be Hermitian of one size".into()));
        }
    }
    if psi.len() != n || n < 2 {
        return Err(ProtocolError::Precondition("psi must match the Hamiltonian size (at least 2)".into()));
    }
    let psi_unit = unit(psi, "psi")?;
    let h = h_parts.iter().skip(1).fold(h_parts[0].clone(), |acc, x| acc + x);
    let target = expm_i(&h, t)? * &psi_unit;
    let encodings: Vec<BlockEncoding> = h_parts
        .iter()
        .enumerate()
        .map(|(i, part)| part_encoding(part, n, n, Party::Player(i)))
        .collect::<Result<_, _>>()?;
    let summed = sum_lcu(&encodings)?;
    let (cos_p, sin_p) = jacobi_anger(summed.alpha * t, eps / 2.0)?;
    let enc = exponential_encoding(&summed, &cos_p, &sin_p)?;
    let degree = cos_p.degree + sin_p.degree;

    let mut init = Vector::zeros(enc.dim());
    init.rows_mut(0, n).copy_from(&psi_unit);
    let u = &enc.unitary;
    let inverse = u.adjoint();
    let first = u * &init;
    let p: f64 = (0..n).map(|i| first[i].norm_sqr()).sum();
    let steps = aa_iterations(p);
    let amplified = amplify(&init, |v| u * v, |v| &inverse * v, |i| i < n, steps);
    let final_p: f64 = (0..n).map(|i| amplified[i].norm_sqr()).sum();

    let mut session = session_for(r)?;
    let uses = (2 * steps + 1) * degree;
    charge_uses(&mut session, r, per_player_width(&summed, r), uses)?;
    let output = amplified.rows(0, n).into_owned();
    let mono = first.rows(0, n).into_owned();
    let mut out = ProtocolOutcome::new("hsim-coord", TopologyKind::Coordinator, output, &target, mono, session.ledger);
    out.success_prob = p;
    out.final_success_prob = final_p;
    out.repetitions_or_iterations = steps + 1;
    out.oracle_uses = Some(uses);
    out.degree = Some(degree);
    out.diagnostics.insert("alpha".into(), summed.alpha);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{coordinator_split, hamiltonian_split, sum_split};
    use crate::linalg::{diag, fidelity, random_unit_vector, real_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn state_prep_examples() {
        let prep = coordinator_state_prep_b(&[basis(2, 0), Vector::zeros(2)]).unwrap();
        assert!((prep.state.amplitudes()[0].re - 1.0).abs() < 1e-12);
        let prep = coordinator_state_prep_b(&[real_vector(&[1.0, 0.0]), real_vector(&[0.0, 1.0])]).unwrap();
        assert!((prep.state.amplitudes()[0].re - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((prep.state.amplitudes()[3].re - 0.5f64.sqrt()).abs() < 1e-12);
        let totals = prep.session.ledger.totals();
        assert_eq!(totals.bits_sent, 2 * NORM_BITS);
        assert_eq!(totals.messages, 2 + 4);
        assert!(coordinator_state_prep_b(&[Vector::zeros(2), Vector::zeros(2)]).is_err());
    }

    #[test]
    fn state_prep_random_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let b = random_unit_vector(&mut rng, 16);
        let parts: Vec<Vector> = (0..4).map(|i| b.rows(4 * i, 4).into_owned()).collect();
        let prep = coordinator_state_prep_b(&parts).unwrap();
        assert!((fidelity(prep.state.amplitudes(), &b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_player_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = random_unit_vector(&mut rng, 4);
        let out = coordinator_regression(&[Matrix::identity(4, 4)], &[b], None, 1e-6).unwrap();
        assert!(out.fidelity_to_target >= 1.0 - 1e-6, "{}", out.fidelity_to_target);
        assert!(out.final_success_prob > 0.9);
        assert!(out.monolithic_gap() < 1e-8);
    }

    #[test]
    fn stacked_split_is_accurate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let inst = coordinator_split(&mut rng, 8, 2, 2.0).unwrap();
        let out = coordinator_regression(&inst.a_parts, &inst.b_parts, None, 1e-3).unwrap();
        assert!(out.fidelity_to_target >= 0.999, "{}", out.fidelity_to_target);
        assert!(out.success_prob >= out.diagnostics["predicted_success"] * (1.0 - 1e-2));
        assert!(out.monolithic_gap() < 1e-8);
    }

    #[test]
    fn truncation_warns() {
        let a = diag(&[1.0, 0.1]);
        let b = real_vector(&[1.0, 1.0]);
        let out = coordinator_regression(&[a], &[b], Some(0.5), 1e-3).unwrap();
        assert_eq!(out.warnings.len(), 1);
        assert!(out.fidelity_to_target > 0.99, "{}", out.fidelity_to_target);
    }

    #[test]
    fn sum_split_matches_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let inst = sum_split(&mut rng, 4, 2, 2.0).unwrap();
        let out = coordinator_sum_regression(&inst.a_parts, &inst.b_parts, None, 1e-3).unwrap();
        assert!(out.fidelity_to_target >= 0.999, "{}", out.fidelity_to_target);
        let measured = out.diagnostics["prep_success"];
        assert!((measured - out.diagnostics["prep_success_predicted"]).abs() < 1e-12);
        assert!(out.monolithic_gap() < 1e-8);
    }

    #[test]
    fn sum_with_idle_player_reduces_to_single() {
        let a = diag(&[1.0, 0.5]);
        let b = real_vector(&[0.6, 0.8]);
        let out =
            coordinator_sum_regression(&[a.clone(), Matrix::zeros(2, 2)], &[b.clone(), Vector::zeros(2)], None, 1e-3)
                .unwrap();
        assert!((out.diagnostics["prep_success"] - 1.0).abs() < 1e-12);
        assert!(out.fidelity_to_target >= 0.999);
    }

    #[test]
    fn hamiltonian_coordinator_accuracy() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let inst = hamiltonian_split(&mut rng, 4, 2, 1.0, 2.0).unwrap();
        let out = hamiltonian_sim_coordinator(&inst.a_parts, &inst.b_parts[0], 1.0, 1e-4).unwrap();
        assert!(out.fidelity_to_target >= 1.0 - 1e-4, "{}", out.fidelity_to_target);
        assert!(out.final_success_prob > 0.99);
        assert!(hamiltonian_sim_coordinator(&inst.a_parts, &inst.b_parts[0], 1.0, 0.5).is_err());
    }

    #[test]
    fn hamiltonian_coordinator_zero_is_identity() {
        let psi = real_vector(&[0.6, 0.8]);
        let out = hamiltonian_sim_coordinator(&[Matrix::zeros(2, 2)], &psi, 1.0, 1e-4).unwrap();
        assert!((out.fidelity_to_target - 1.0).abs() < 1e-12);
    }
}
