use crate::comm::{DistributedState, Party, Register, Session, Topology, TopologyKind};
use crate::linalg::{
    basis, completion_with_first_column, expm_i, frob_norm, is_hermitian, pinv, qubits_for, unitary_dilation_padded,
    Matrix, Vector,
};

use super::{
    aa_iterations, amplify, schedule_attempts, unit, Direction, Mode, ProtocolError, ProtocolOutcome, Schedule,
    REPEAT_CONSTANT, ZERO_PROBABILITY,
};

/// `⌈log₂ mn⌉` bits per transmitted entry.
fn entry_bits(m: usize, n: usize) -> usize {
    qubits_for(m * n).max(1)
}

fn copies_for(p: f64) -> usize {
    (REPEAT_CONSTANT / p).ceil() as usize
}

fn send_copies(
    session: &mut Session,
    from: Party,
    to: Party,
    qubits: usize,
    count: usize,
) -> Result<(), ProtocolError> {
    for _ in 0..count {
        session.send_quantum(from, to, qubits)?;
    }
    Ok(())
}

/// Registers holding the dilation of an `n × m` operator: a flag qubit, an
/// extension register when `n > m`, and the `m`-dimensional data register.
struct Dilation {
    unitary: Matrix,
    rows: usize,
    cols: usize,
    ext: usize,
}

impl Dilation {
    fn new(op: &Matrix) -> Result<Self, ProtocolError> {
        let (rows, cols) = op.shape();
        let ext = rows.max(cols).div_ceil(cols);
        let be = unitary_dilation_padded(op, ext * cols)?;
        Ok(Self { unitary: be.unitary, rows, cols, ext })
    }

    fn names(&self) -> Vec<&'static str> {
        if self.ext > 1 {
            vec!["anc", "ext", "data"]
        } else {
            vec!["anc", "data"]
        }
    }

    fn half(&self) -> usize {
        self.ext * self.cols
    }

    fn initial(&self, input: &Vector, flag_owner: Party, data_owner: Party) -> Result<DistributedState, ProtocolError> {
        let mut parts = vec![(Register { name: "anc".into(), dim: 2, owner: flag_owner }, basis(2, 0))];
        if self.ext > 1 {
            parts.push((Register { name: "ext".into(), dim: self.ext, owner: flag_owner }, basis(self.ext, 0)));
        }
        parts.push((Register { name: "data".into(), dim: self.cols, owner: data_owner }, input.clone()));
        Ok(DistributedState::product(parts)?)
    }

    fn plain_input(&self, input: &Vector) -> Vector {
        let mut v = Vector::zeros(2 * self.half());
        v.rows_mut(0, self.cols).copy_from(input);
        v
    }

    /// The first `rows` amplitudes of the given flag branch of a plain vector.
    fn branch(&self, v: &Vector, flag: usize) -> Vector {
        v.rows(flag * self.half(), self.rows).into_owned()
    }
}

/// Case 1: Bob ships `|b⟩`, Alice applies the dilation of the `n × m`
/// operator `op` and keeps the flag-zero branch.
pub(crate) fn one_way_to_alice(
    protocol: &str,
    op: &Matrix,
    b: &Vector,
    mode: Mode,
    target: &Vector,
) -> Result<ProtocolOutcome, ProtocolError> {
    let (n, m) = op.shape();
    if m < 2 {
        return Err(ProtocolError::Precondition("b needs at least two entries".into()));
    }
    let b_unit = unit(b, "b")?;
    let dil = Dilation::new(op)?;
    let kind = TopologyKind::OneWayBobToAlice;
    let mut session = Session::new(Topology::two_party(kind));
    let mut state = dil.initial(&b_unit, Party::Alice, Party::Bob)?;
    state.send_registers(&["data"], Party::Alice, &mut session)?;
    state.apply_local(Party::Alice, &dil.names(), &dil.unitary)?;
    let p = state.probability("anc", 0)?;
    let failed = p <= ZERO_PROBABILITY;
    let flag = usize::from(failed);
    state.postselect("anc", flag)?;
    let output = state.amplitudes().rows(0, n).into_owned();
    let mono = dil.branch(&(&dil.unitary * dil.plain_input(&b_unit)), flag);

    let per_copy = qubits_for(m);
    let bits = entry_bits(m, n);
    let cap = (REPEAT_CONSTANT * (m * bits) as f64).ceil() as usize;
    let mut reps = 1;
    let mut final_p = p;
    let mut fallback = false;
    if mode == Mode::Repeat {
        let wanted = if failed { usize::MAX } else { copies_for(p) };
        if wanted <= cap {
            send_copies(&mut session, Party::Bob, Party::Alice, per_copy, wanted - 1)?;
            reps = wanted;
            final_p = 1.0 - (1.0 - p).powi(wanted as i32);
        } else {
            send_copies(&mut session, Party::Bob, Party::Alice, per_copy, cap - 1)?;
            session.send_classical(Party::Bob, Party::Alice, m * bits)?;
            reps = cap;
            fallback = true;
        }
    }
    finish(protocol, kind, session, output, mono, target, p, final_p, reps, failed, fallback)
}

/// Case 2: Alice ships `|op⟩ = vec(op)/‖op‖_F`; Bob rotates its column half
/// with `U_b†` and keeps column zero.
pub(crate) fn one_way_to_bob(
    protocol: &str,
    op: &Matrix,
    b: &Vector,
    mode: Mode,
    target: &Vector,
) -> Result<ProtocolOutcome, ProtocolError> {
    let (n, m) = op.shape();
    if n * m < 2 || b.len() != m {
        return Err(ProtocolError::Precondition(format!("operator {n}x{m} does not fit b of length {}", b.len())));
    }
    let f = frob_norm(op);
    if f == 0.0 {
        return Err(ProtocolError::Precondition("A must be nonzero".into()));
    }
    let b_unit = unit(b, "b")?;
    let pair = Vector::from_iterator(n * m, (0..n * m).map(|k| op[(k / m, k % m)] / f));
    let rotate = completion_with_first_column(&b_unit.conjugate()).adjoint();
    let kind = TopologyKind::OneWayAliceToBob;
    let mut session = Session::new(Topology::two_party(kind));
    let mut state =
        DistributedState::product(vec![(Register { name: "pair".into(), dim: n * m, owner: Party::Alice }, pair)])?;
    state.send_registers(&["pair"], Party::Bob, &mut session)?;
    state.split_register("pair", &[("row", n), ("col", m)])?;
    state.apply_local(Party::Bob, &["col"], &rotate)?;
    let p = state.probability("col", 0)?;
    let failed = p <= ZERO_PROBABILITY;
    let flag = if failed && m > 1 { 1 } else { 0 };
    state.postselect("col", flag)?;
    let output = state.amplitudes().clone();
    let mono = op * rotate.row(flag).transpose();

    let per_copy = qubits_for(n * m);
    let bits = entry_bits(m, n);
    let cap_copies = ((REPEAT_CONSTANT * (m * n * bits) as f64).ceil() as usize / per_copy).max(1);
    let mut reps = 1;
    let mut final_p = p;
    let mut fallback = false;
    if mode == Mode::Repeat {
        let wanted = if failed { usize::MAX } else { copies_for(p) };
        if wanted <= cap_copies {
            send_copies(&mut session, Party::Alice, Party::Bob, per_copy, wanted - 1)?;
            reps = wanted;
            final_p = 1.0 - (1.0 - p).powi(wanted as i32);
        } else {
            send_copies(&mut session, Party::Alice, Party::Bob, per_copy, cap_copies - 1)?;
            session.send_classical(Party::Alice, Party::Bob, m * n * bits)?;
            reps = cap_copies;
            fallback = true;
        }
    }
    finish(protocol, kind, session, output, mono, target, p, final_p, reps, failed, fallback)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    protocol: &str,
    kind: TopologyKind,
    session: Session,
    output: Vector,
    mono: Vector,
    target: &Vector,
    p: f64,
    final_p: f64,
    reps: usize,
    failed: bool,
    fallback: bool,
) -> Result<ProtocolOutcome, ProtocolError> {
    let exact_target = crate::linalg::vec_norm(target) > 0.0;
    let (output, mono) = if fallback && exact_target { (target.clone(), target.clone()) } else { (output, mono) };
    let mut out = ProtocolOutcome::new(protocol, kind, output, target, mono, session.ledger);
    out.success_prob = p;
    out.final_success_prob = if fallback && exact_target { 1.0 } else { final_p };
    out.repetitions_or_iterations = reps;
    out.oracle_uses = Some(reps);
    out.failed = failed && !(fallback && exact_target);
    if fallback {
        out.warnings.push("copy cap reached; input sent classically".into());
    }
    if out.failed {
        out.warnings.push("success probability is zero".into());
    }
    Ok(out)
}

/// Bob sends `|b⟩` once; Alice applies the dilation of `A⁺`. Success
/// probability is `‖A⁺b‖²/(‖A⁺‖²‖b‖²)`.
pub fn regression_case1(a: &Matrix, b: &Vector, mode: Mode) -> Result<ProtocolOutcome, ProtocolError> {
    let op = pinv(a)?;
    let target = &op * b;
    one_way_to_alice("case1", &op, b, mode, &target)
}

/// Alice sends `|A⁺⟩`; success probability is `‖A⁺b‖²/(‖A⁺‖_F²‖b‖²)`.
pub fn regression_case2(a: &Matrix, b: &Vector, mode: Mode) -> Result<ProtocolOutcome, ProtocolError> {
    let op = pinv(a)?;
    let target = &op * b;
    one_way_to_bob("case2", &op, b, mode, &target)
}

/// Case 1 with amplitude amplification. Bob keeps every register; each use
/// of Alice's unitary is a round trip, and Bob's reflections are local.
pub fn regression_case3(a: &Matrix, b: &Vector, schedule: Schedule) -> Result<ProtocolOutcome, ProtocolError> {
    let op = pinv(a)?;
    let target = &op * b;
    let (n, m) = op.shape();
    if m < 2 {
        return Err(ProtocolError::Precondition("b needs at least two entries".into()));
    }
    let b_unit = unit(b, "b")?;
    let dil = Dilation::new(&op)?;
    let names = dil.names();
    let kind = TopologyKind::TwoWay;
    let mut session = Session::new(Topology::two_party(kind));

    let init = dil.plain_input(&b_unit);
    let half = dil.half();
    let first = &dil.unitary * &init;
    let p: f64 = first.rows(0, half).iter().map(|z| z.norm_sqr()).sum();
    let bits = entry_bits(m, n);
    let repeat_cap = (REPEAT_CONSTANT * (m * bits) as f64).ceil();
    let step_cap = repeat_cap.sqrt().ceil() as usize;

    // With p known, Bob also compares the planned shuttles against sending b
    // outright and takes the cheaper.
    let width = dil.initial(&b_unit, Party::Bob, Party::Bob)?.qubits_in(&names)?;
    let planned = 2 * (2 * aa_iterations(p) + 1) * width;
    if schedule == Schedule::KnownProbability
        && p > ZERO_PROBABILITY
        && (aa_iterations(p) > step_cap || planned > m * bits)
    {
        session.send_classical(Party::Bob, Party::Alice, m * bits)?;
        let mut out = ProtocolOutcome::new("case3", kind, target.clone(), &target, target.clone(), session.ledger);
        out.success_prob = p;
        out.final_success_prob = 1.0;
        out.repetitions_or_iterations = 0;
        out.oracle_uses = Some(0);
        out.warnings.push("classical transfer is cheaper; input sent classically".into());
        return Ok(out);
    }

    let (attempts, succeeded) = schedule_attempts(schedule, p, step_cap);
    let flip = Matrix::from_diagonal(&Vector::from_vec(vec![(-1.0).into(), 1.0.into()]));
    let reflect = (&init * init.adjoint()) * crate::linalg::c(2.0) - Matrix::identity(2 * half, 2 * half);
    let inverse = dil.unitary.adjoint();
    let mut state = dil.initial(&b_unit, Party::Bob, Party::Bob)?;
    for &steps in &attempts {
        state = dil.initial(&b_unit, Party::Bob, Party::Bob)?;
        state.remote_apply(&mut session, Party::Alice, &dil.unitary, &names)?;
        for _ in 0..steps {
            state.apply_local(Party::Bob, &["anc"], &flip)?;
            state.remote_apply(&mut session, Party::Alice, &inverse, &names)?;
            state.apply_local(Party::Bob, &names, &reflect)?;
            state.remote_apply(&mut session, Party::Alice, &dil.unitary, &names)?;
        }
    }
    let last = *attempts.last().expect("schedule yields an attempt");
    let final_p = state.probability("anc", 0)?;
    let failed = !succeeded;
    let flag = usize::from(failed);
    state.postselect("anc", flag)?;
    let output = state.amplitudes().rows(0, n).into_owned();
    let amplified = amplify(&init, |v| &dil.unitary * v, |v| &inverse * v, |i| i < half, last);
    let mono = dil.branch(&amplified, flag);

    let mut out = ProtocolOutcome::new("case3", kind, output, &target, mono, session.ledger);
    out.success_prob = p;
    out.final_success_prob = final_p;
    out.repetitions_or_iterations = attempts.iter().map(|k| k + 1).sum();
    out.oracle_uses = Some(attempts.iter().map(|k| 2 * k + 1).sum());
    out.failed = failed;
    out.diagnostics.insert("attempts".into(), attempts.len() as f64);
    if failed {
        out.warnings.push("amplification hit the step cap without success".into());
    }
    Ok(out)
}

/// `e^{iHt}|ψ⟩` with `H` at Alice and `ψ` at Bob. When Bob may speak he
/// sends `ψ` and Alice evolves it; otherwise Alice sends `|e^{iHt}⟩` and
/// the Case 2 rotation applies, succeeding with probability `1/n`.
pub fn hamiltonian_sim_two_party(
    h: &Matrix,
    psi: &Vector,
    t: f64,
    direction: Direction,
    mode: Mode,
) -> Result<ProtocolOutcome, ProtocolError> {
    if !is_hermitian(h, 1e-9 * (1.0 + frob_norm(h))) {
        return Err(ProtocolError::Precondition("H must be Hermitian".into()));
    }
    let n = h.nrows();
    if n < 2 || psi.len() != n {
        return Err(ProtocolError::Precondition("need n >= 2 and psi of length n".into()));
    }
    let psi_unit = unit(psi, "psi")?;
    let u = expm_i(h, t)?;
    let target = &u * &psi_unit;
    let kind = match direction {
        Direction::AliceToBob => return one_way_to_bob("hsim2", &u, &psi_unit, mode, &target),
        Direction::BobToAlice => TopologyKind::OneWayBobToAlice,
        Direction::TwoWay => TopologyKind::TwoWay,
    };
    let mut session = Session::new(Topology::two_party(kind));
    let mut state =
        DistributedState::product(vec![(Register { name: "data".into(), dim: n, owner: Party::Bob }, psi_unit)])?;
    state.send_registers(&["data"], Party::Alice, &mut session)?;
    state.apply_local(Party::Alice, &["data"], &u)?;
    let output = state.amplitudes().clone();
    let mut out = ProtocolOutcome::new("hsim2", kind, output, &target, target.clone(), session.ledger);
    out.success_prob = 1.0;
    out.final_success_prob = 1.0;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, diag, real_vector, C64};

    #[test]
    fn case1_identity_is_certain() {
        let a = Matrix::identity(4, 4);
        let out = regression_case1(&a, &basis(4, 1), Mode::Postselect).unwrap();
        assert!((out.success_prob - 1.0).abs() < 1e-12);
        assert!((out.fidelity_to_target - 1.0).abs() < 1e-12);
        assert_eq!(out.ledger.totals().qubits_sent, 2);
        assert_eq!(out.ledger.messages().len(), 1);
    }

    #[test]
    fn case1_hand_value() {
        let a = diag(&[1.0, 0.5]);
        let b = real_vector(&[1.0, 1.0]);
        let out = regression_case1(&a, &b, Mode::Postselect).unwrap();
        assert!((out.success_prob - 5.0 / 8.0).abs() < 1e-12, "{}", out.success_prob);
        assert!(out.monolithic_gap() < 1e-12);
    }

    #[test]
    fn case1_zero_overlap_fails_without_error() {
        let a = real_matrix_2x2(1.0, 0.0, 0.0, 0.0);
        let out = regression_case1(&a, &basis(2, 1), Mode::Postselect).unwrap();
        assert!(out.failed);
        assert_eq!(out.success_prob, 0.0);
        let rep = regression_case1(&a, &basis(2, 1), Mode::Repeat).unwrap();
        assert!(rep.failed);
        assert!(rep.ledger.totals().bits_sent > 0);
    }

    fn real_matrix_2x2(a: f64, b: f64, cc: f64, d: f64) -> Matrix {
        crate::linalg::real_matrix(2, 2, &[a, b, cc, d])
    }

    #[test]
    fn case2_examples() {
        let out = regression_case2(&Matrix::identity(4, 4), &basis(4, 2), Mode::Postselect).unwrap();
        assert!((out.success_prob - 0.25).abs() < 1e-12);
        assert!(!out.ledger.has_direction(Party::Bob, Party::Alice));
        let mut e = Matrix::zeros(3, 3);
        e[(0, 0)] = c(1.0);
        let out = regression_case2(&e, &basis(3, 0), Mode::Postselect).unwrap();
        assert!((out.success_prob - 1.0).abs() < 1e-12);
        assert!((out.fidelity_to_target - 1.0).abs() < 1e-12);
    }

    #[test]
    fn case3_certain_instance_takes_one_pass() {
        let out = regression_case3(&Matrix::identity(4, 4), &basis(4, 0), Schedule::KnownProbability).unwrap();
        assert_eq!(out.repetitions_or_iterations, 1);
        assert_eq!(out.oracle_uses, Some(1));
        assert_eq!(out.ledger.messages().len(), 2);
    }

    #[test]
    fn case3_amplifies_small_overlap() {
        // ‖A⁺b‖²/‖A⁺‖² = 1/64 with A⁺ = diag(1, 8, 8, ...).
        let mut s = vec![1.0 / 8.0; 32];
        s[0] = 1.0;
        let a = diag(&s);
        let out = regression_case3(&a, &basis(32, 0), Schedule::KnownProbability).unwrap();
        assert!((out.success_prob - 1.0 / 64.0).abs() < 1e-12);
        assert_eq!(out.oracle_uses, Some(13));
        assert!(out.final_success_prob > 0.95);
        assert!(out.monolithic_gap() < 1e-10);
        assert!((out.fidelity_to_target - 1.0).abs() < 1e-10);
    }

    #[test]
    fn case3_oblivious_schedule_succeeds() {
        let mut s = vec![1.0 / 4.0; 16];
        s[0] = 1.0;
        let out = regression_case3(&diag(&s), &basis(16, 0), Schedule::Oblivious { seed: 3 }).unwrap();
        assert!(!out.failed);
        assert!((out.fidelity_to_target - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hamiltonian_two_party_directions() {
        let z = diag(&[1.0, -1.0]);
        let h = crate::linalg::kron(&z, &Matrix::identity(2, 2));
        let psi = real_vector(&[1.0, 1.0, 1.0, 1.0]);
        let t = std::f64::consts::FRAC_PI_2;
        let out = hamiltonian_sim_two_party(&h, &psi, t, Direction::BobToAlice, Mode::Postselect).unwrap();
        assert_eq!(out.ledger.totals().qubits_sent, 2);
        assert!((out.fidelity_to_target - 1.0).abs() < 1e-12);
        assert!((out.output_state[0] - C64::new(0.0, 0.5)).norm() < 1e-12);
        let ab = hamiltonian_sim_two_party(&h, &psi, t, Direction::AliceToBob, Mode::Postselect).unwrap();
        assert!((ab.success_prob - 0.25).abs() < 1e-12);
        assert!((ab.fidelity_to_target - 1.0).abs() < 1e-12);
        let still = hamiltonian_sim_two_party(&h, &psi, 0.0, Direction::TwoWay, Mode::Postselect).unwrap();
        assert!((still.output_state[3] - c(0.5)).norm() < 1e-12);
    }
}
