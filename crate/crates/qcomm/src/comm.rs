//! Parties, topologies, the message ledger, and a register-level state whose
//! registers change hands when messages are sent.
//!
//! Complexity is reported as raw per-message sums. The channel-register
//! formalism would instead charge `t(r+1)T` for `t` rounds of `T`-qubit
//! channels across `r+1` parties; the two agree up to that bookkeeping.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{qubits_for, vec_norm, Matrix, Vector, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
    Player(usize),
    Referee,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Alice => write!(f, "alice"),
            Party::Bob => write!(f, "bob"),
            Party::Player(i) => write!(f, "p{i}"),
            Party::Referee => write!(f, "referee"),
        }
    }
}

impl std::str::FromStr for Party {
    type Err = CommError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "alice" => Ok(Party::Alice),
            "bob" => Ok(Party::Bob),
            "referee" => Ok(Party::Referee),
            _ => s
                .strip_prefix('p')
                .and_then(|rest| rest.parse().ok())
                .map(Party::Player)
                .ok_or_else(|| CommError::UnknownParty(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TopologyKind {
    #[serde(rename = "two_party_one_way_AtoB")]
    OneWayAliceToBob,
    #[serde(rename = "two_party_one_way_BtoA")]
    OneWayBobToAlice,
    #[serde(rename = "two_party_two_way")]
    TwoWay,
    #[serde(rename = "smp")]
    Smp,
    #[serde(rename = "coordinator")]
    Coordinator,
}

impl TopologyKind {
    pub fn name(self) -> &'static str {
        match self {
            TopologyKind::OneWayAliceToBob => "two_party_one_way_AtoB",
            TopologyKind::OneWayBobToAlice => "two_party_one_way_BtoA",
            TopologyKind::TwoWay => "two_party_two_way",
            TopologyKind::Smp => "smp",
            TopologyKind::Coordinator => "coordinator",
        }
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Topology {
    pub kind: TopologyKind,
    pub party_count: usize,
}

impl Topology {
    pub fn new(kind: TopologyKind, party_count: usize) -> Result<Self, CommError> {
        let ok = match kind {
            TopologyKind::Smp | TopologyKind::Coordinator => party_count >= 2,
            _ => party_count == 2,
        };
        if ok {
            Ok(Self { kind, party_count })
        } else {
            Err(CommError::PartyCount { kind, party_count })
        }
    }

    pub fn two_party(kind: TopologyKind) -> Self {
        Self::new(kind, 2).expect("two-party kinds take two parties")
    }

    pub fn has_party(&self, p: Party) -> bool {
        match (self.kind, p) {
            (TopologyKind::Smp | TopologyKind::Coordinator, Party::Player(i)) => i < self.party_count,
            (TopologyKind::Smp | TopologyKind::Coordinator, Party::Referee) => true,
            (TopologyKind::Smp | TopologyKind::Coordinator, _) => false,
            (_, Party::Alice | Party::Bob) => true,
            _ => false,
        }
    }

    pub fn allows(&self, from: Party, to: Party) -> bool {
        if from == to || !self.has_party(from) || !self.has_party(to) {
            return false;
        }
        match self.kind {
            TopologyKind::OneWayAliceToBob => from == Party::Alice,
            TopologyKind::OneWayBobToAlice => from == Party::Bob,
            TopologyKind::TwoWay => true,
            TopologyKind::Smp => to == Party::Referee,
            TopologyKind::Coordinator => (from == Party::Referee) != (to == Party::Referee),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CommError {
    #[error("{kind} forbids a message from {from} to {to}")]
    TopologyViolation { kind: TopologyKind, from: Party, to: Party },
    #[error("{kind} cannot have {party_count} parties")]
    PartyCount { kind: TopologyKind, party_count: usize },
    #[error("register {register} is held by {holder}, not {claimed}")]
    NotOwner { register: String, holder: Party, claimed: Party },
    #[error("unknown register {0}")]
    UnknownRegister(String),
    #[error("unknown party {0}")]
    UnknownParty(String),
    #[error("a message must carry a nonzero payload")]
    EmptyPayload,
    #[error("a message carries either qubits or bits, not both")]
    MixedPayload,
    #[error("unitary has dimension {got}, registers span {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub sender: Party,
    pub receiver: Party,
    pub qubit_count: usize,
    pub bit_count: usize,
    pub round: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerTotals {
    pub qubits_sent: usize,
    pub bits_sent: usize,
    pub rounds: usize,
    pub messages: usize,
}

/// Ordered log of every message in one run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MessageLedger {
    messages: Vec<Message>,
}

impl MessageLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    /// Appends a message; the round advances whenever the speaker changes.
    pub fn record(
        &mut self,
        sender: Party,
        receiver: Party,
        qubit_count: usize,
        bit_count: usize,
    ) -> Result<(), CommError> {
        if qubit_count == 0 && bit_count == 0 {
            return Err(CommError::EmptyPayload);
        }
        if qubit_count > 0 && bit_count > 0 {
            return Err(CommError::MixedPayload);
        }
        let round = match self.messages.last() {
            None => 1,
            Some(last) if last.sender == sender => last.round,
            Some(last) => last.round + 1,
        };
        self.messages.push(Message { sender, receiver, qubit_count, bit_count, round });
        Ok(())
    }

    /// Appends `count` copies of the same message.
    pub fn record_repeated(
        &mut self,
        sender: Party,
        receiver: Party,
        qubit_count: usize,
        bit_count: usize,
        count: usize,
    ) -> Result<(), CommError> {
        for _ in 0..count {
            self.record(sender, receiver, qubit_count, bit_count)?;
        }
        Ok(())
    }

    pub fn totals(&self) -> LedgerTotals {
        LedgerTotals {
            qubits_sent: self.messages.iter().map(|m| m.qubit_count).sum(),
            bits_sent: self.messages.iter().map(|m| m.bit_count).sum(),
            rounds: self.messages.last().map_or(0, |m| m.round),
            messages: self.messages.len(),
        }
    }

    /// True if any message flows from `from` to `to`.
    pub fn has_direction(&self, from: Party, to: Party) -> bool {
        self.messages.iter().any(|m| m.sender == from && m.receiver == to)
    }
}

pub fn ledger_report(ledger: &MessageLedger) -> LedgerTotals {
    ledger.totals()
}

/// A topology plus the ledger every send is charged to.
#[derive(Debug, Clone)]
pub struct Session {
    pub topology: Topology,
    pub ledger: MessageLedger,
}

impl Session {
    pub fn new(topology: Topology) -> Self {
        Self { topology, ledger: MessageLedger::new() }
    }

    fn check(&self, from: Party, to: Party) -> Result<(), CommError> {
        if self.topology.allows(from, to) {
            Ok(())
        } else {
            Err(CommError::TopologyViolation { kind: self.topology.kind, from, to })
        }
    }

    pub fn send_quantum(&mut self, from: Party, to: Party, qubits: usize) -> Result<(), CommError> {
        self.check(from, to)?;
        self.ledger.record(from, to, qubits, 0)
    }

    pub fn send_classical(&mut self, from: Party, to: Party, bits: usize) -> Result<(), CommError> {
        self.check(from, to)?;
        self.ledger.record(from, to, 0, bits)
    }
}

pub fn send_classical(payload_bits: usize, from: Party, to: Party, session: &mut Session) -> Result<(), CommError> {
    session.send_classical(from, to, payload_bits)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Register {
    pub name: String,
    pub dim: usize,
    pub owner: Party,
}

impl Register {
    pub fn qubits(&self) -> usize {
        qubits_for(self.dim)
    }
}

/// Joint amplitude vector over named registers; the first register is the
/// most significant index.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributedState {
    registers: Vec<Register>,
    amplitudes: Vector,
}

impl DistributedState {
    pub fn new(registers: Vec<Register>, amplitudes: Vector) -> Result<Self, CommError> {
        let total: usize = registers.iter().map(|r| r.dim).product();
        if total != amplitudes.len() {
            return Err(CommError::Dimension { expected: total, got: amplitudes.len() });
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > 1e-9 {
            return Err(CommError::NotNormalized(norm));
        }
        Ok(Self { registers, amplitudes })
    }

    /// Product state of per-register vectors.
    pub fn product(parts: Vec<(Register, Vector)>) -> Result<Self, CommError> {
        let mut amps = Vector::from_element(1, crate::linalg::ONE);
        let mut regs = Vec::with_capacity(parts.len());
        for (reg, v) in parts {
            if v.len() != reg.dim {
                return Err(CommError::Dimension { expected: reg.dim, got: v.len() });
            }
            amps = amps.kronecker(&v);
            regs.push(reg);
        }
        Self::new(regs, amps)
    }

    pub fn amplitudes(&self) -> &Vector {
        &self.amplitudes
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    fn index_of(&self, name: &str) -> Result<usize, CommError> {
        self.registers.iter().position(|r| r.name == name).ok_or_else(|| CommError::UnknownRegister(name.to_string()))
    }

    pub fn owner(&self, name: &str) -> Result<Party, CommError> {
        Ok(self.registers[self.index_of(name)?].owner)
    }

    pub fn qubits_in(&self, names: &[&str]) -> Result<usize, CommError> {
        names.iter().map(|n| self.index_of(n).map(|i| self.registers[i].qubits())).sum()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.registers.len()];
        for i in (0..self.registers.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.registers[i + 1].dim;
        }
        strides
    }

    /// Applies `unitary` to `names` (in the given order) with no ownership check.
    pub fn apply_unchecked(&mut self, names: &[&str], unitary: &Matrix) -> Result<(), CommError> {
        let idx: Vec<usize> = names.iter().map(|n| self.index_of(n)).collect::<Result<_, _>>()?;
        let sub_dims: Vec<usize> = idx.iter().map(|&i| self.registers[i].dim).collect();
        let sub_total: usize = sub_dims.iter().product();
        if unitary.nrows() != sub_total || unitary.ncols() != sub_total {
            return Err(CommError::Dimension { expected: sub_total, got: unitary.nrows() });
        }
        let strides = self.strides();
        // Offsets of each sub-index inside the full vector.
        let mut offsets = vec![0usize; sub_total];
        for (s, off) in offsets.iter_mut().enumerate() {
            let mut rem = s;
            for k in (0..idx.len()).rev() {
                *off += (rem % sub_dims[k]) * strides[idx[k]];
                rem /= sub_dims[k];
            }
        }
        let rest: Vec<usize> = (0..self.registers.len()).filter(|i| !idx.contains(i)).collect();
        let rest_total: usize = rest.iter().map(|&i| self.registers[i].dim).product();
        let mut buf = Vector::zeros(sub_total);
        for r in 0..rest_total {
            let mut base = 0;
            let mut rem = r;
            for &k in rest.iter().rev() {
                base += (rem % self.registers[k].dim) * strides[k];
                rem /= self.registers[k].dim;
            }
            for (s, &off) in offsets.iter().enumerate() {
                buf[s] = self.amplitudes[base + off];
            }
            let out = unitary * &buf;
            for (s, &off) in offsets.iter().enumerate() {
                self.amplitudes[base + off] = out[s];
            }
        }
        Ok(())
    }

    /// A party applies a unitary to registers it currently holds.
    pub fn apply_local(&mut self, party: Party, names: &[&str], unitary: &Matrix) -> Result<(), CommError> {
        for n in names {
            let holder = self.owner(n)?;
            if holder != party {
                return Err(CommError::NotOwner { register: n.to_string(), holder, claimed: party });
            }
        }
        self.apply_unchecked(names, unitary)
    }

    /// Moves `names` from their common holder to `to`, charging their qubits.
    pub fn send_registers(&mut self, names: &[&str], to: Party, session: &mut Session) -> Result<(), CommError> {
        let from = self.owner(names.first().ok_or(CommError::EmptyPayload)?)?;
        for n in names {
            let holder = self.owner(n)?;
            if holder != from {
                return Err(CommError::NotOwner { register: n.to_string(), holder, claimed: from });
            }
        }
        let qubits = self.qubits_in(names)?;
        session.send_quantum(from, to, qubits)?;
        for n in names {
            let i = self.index_of(n)?;
            self.registers[i].owner = to;
        }
        Ok(())
    }

    /// Ships `names` to `owner`, who applies `unitary`, then ships them back.
    pub fn remote_apply(
        &mut self,
        session: &mut Session,
        owner: Party,
        unitary: &Matrix,
        names: &[&str],
    ) -> Result<(), CommError> {
        let home = self.owner(names.first().ok_or(CommError::EmptyPayload)?)?;
        let sub_total: usize =
            names.iter().map(|n| self.index_of(n).map(|i| self.registers[i].dim)).product::<Result<usize, _>>()?;
        if unitary.nrows() != sub_total {
            return Err(CommError::Dimension { expected: sub_total, got: unitary.nrows() });
        }
        self.send_registers(names, owner, session)?;
        self.apply_local(owner, names, unitary)?;
        self.send_registers(names, home, session)
    }

    /// Probability that register `name` reads `value`.
    pub fn probability(&self, name: &str, value: usize) -> Result<f64, CommError> {
        let k = self.index_of(name)?;
        let strides = self.strides();
        let dim = self.registers[k].dim;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| (i / strides[k]) % dim == value)
            .map(|(_, z)| z.norm_sqr())
            .sum())
    }

    /// Postselects `name = value`, drops that register, and renormalises.
    /// Returns the probability of the outcome.
    pub fn postselect(&mut self, name: &str, value: usize) -> Result<f64, CommError> {
        let k = self.index_of(name)?;
        let strides = self.strides();
        let dim = self.registers[k].dim;
        let kept: Vec<_> = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| (i / strides[k]) % dim == value)
            .map(|(_, z)| *z)
            .collect();
        let prob: f64 = kept.iter().map(|z| z.norm_sqr()).sum();
        self.registers.remove(k);
        let norm = prob.sqrt();
        self.amplitudes = if norm > 0.0 {
            Vector::from_iterator(kept.len(), kept.into_iter().map(|z| z / norm))
        } else {
            Vector::from_element(kept.len(), ZERO)
        };
        Ok(prob)
    }

    /// Relabels one register as several whose dimensions multiply to its own;
    /// the first part is most significant. Local, so nothing is charged.
    pub fn split_register(&mut self, name: &str, parts: &[(&str, usize)]) -> Result<(), CommError> {
        let k = self.index_of(name)?;
        let dim: usize = parts.iter().map(|p| p.1).product();
        if dim != self.registers[k].dim {
            return Err(CommError::Dimension { expected: self.registers[k].dim, got: dim });
        }
        let owner = self.registers[k].owner;
        let new: Vec<Register> = parts.iter().map(|&(n, d)| Register { name: n.to_string(), dim: d, owner }).collect();
        self.registers.splice(k..=k, new);
        Ok(())
    }

    /// Samples a computational-basis outcome of `name` and collapses onto it.
    pub fn measure<R: Rng>(&mut self, name: &str, rng: &mut R) -> Result<usize, CommError> {
        let k = self.index_of(name)?;
        let dim = self.registers[k].dim;
        let probs: Vec<f64> = (0..dim).map(|v| self.probability(name, v)).collect::<Result<_, _>>()?;
        let mut u: f64 = rng.gen();
        let mut outcome = dim - 1;
        for (v, p) in probs.iter().enumerate() {
            if u < *p {
                outcome = v;
                break;
            }
            u -= p;
        }
        let strides = self.strides();
        let mut amps = self.amplitudes.clone();
        for (i, z) in amps.iter_mut().enumerate() {
            if (i / strides[k]) % dim != outcome {
                *z = ZERO;
            }
        }
        let norm = vec_norm(&amps);
        self.amplitudes = amps.map(|z| z / norm);
        Ok(outcome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis, c, real_vector, unitarity_defect};

    fn reg(name: &str, dim: usize, owner: Party) -> Register {
        Register { name: name.into(), dim, owner }
    }

    #[test]
    fn send_one_qubit_two_way() {
        let mut s = Session::new(Topology::two_party(TopologyKind::TwoWay));
        let mut st = DistributedState::product(vec![(reg("q", 2, Party::Alice), basis(2, 0))]).unwrap();
        st.send_registers(&["q"], Party::Bob, &mut s).unwrap();
        assert_eq!(s.ledger.totals().qubits_sent, 1);
        assert_eq!(st.owner("q").unwrap(), Party::Bob);
    }

    #[test]
    fn referee_cannot_send_in_smp() {
        let mut s = Session::new(Topology::new(TopologyKind::Smp, 2).unwrap());
        let err = s.send_quantum(Party::Referee, Party::Player(0), 1).unwrap_err();
        assert!(matches!(err, CommError::TopologyViolation { .. }));
    }

    #[test]
    fn one_way_rejects_reverse() {
        let mut s = Session::new(Topology::two_party(TopologyKind::OneWayBobToAlice));
        assert!(s.send_quantum(Party::Bob, Party::Alice, 3).is_ok());
        assert!(s.send_quantum(Party::Alice, Party::Bob, 3).is_err());
    }

    #[test]
    fn log_m_register_charges_three_qubits() {
        let mut s = Session::new(Topology::two_party(TopologyKind::OneWayBobToAlice));
        let mut st = DistributedState::product(vec![(reg("b", 8, Party::Bob), basis(8, 3))]).unwrap();
        st.send_registers(&["b"], Party::Alice, &mut s).unwrap();
        assert_eq!(s.ledger.totals().qubits_sent, 3);
    }

    #[test]
    fn classical_payloads() {
        let mut s = Session::new(Topology::new(TopologyKind::Coordinator, 2).unwrap());
        send_classical(8 * 3, Party::Player(0), Party::Referee, &mut s).unwrap();
        assert_eq!(s.ledger.totals().bits_sent, 24);
        assert_eq!(send_classical(0, Party::Player(0), Party::Referee, &mut s), Err(CommError::EmptyPayload));
        assert_eq!(s.ledger.record(Party::Player(0), Party::Referee, 1, 1), Err(CommError::MixedPayload));
    }

    #[test]
    fn remote_round_trip_and_inverse_pair() {
        let mut s = Session::new(Topology::new(TopologyKind::Coordinator, 2).unwrap());
        let mut st = DistributedState::product(vec![
            (reg("sel", 2, Party::Referee), basis(2, 0)),
            (reg("data", 8, Party::Referee), basis(8, 5)),
        ])
        .unwrap();
        let before = st.clone();
        let u = crate::linalg::completion_with_first_column(&real_vector(&[1.0, 2.0, 0.0, 1.0, 0.0, 0.0, 3.0, 1.0]));
        assert!(unitarity_defect(&u) < 1e-12);
        st.remote_apply(&mut s, Party::Player(1), &u, &["data"]).unwrap();
        assert_eq!(s.ledger.totals().qubits_sent, 6);
        st.remote_apply(&mut s, Party::Player(1), &u.adjoint(), &["data"]).unwrap();
        assert_eq!(s.ledger.totals().qubits_sent, 12);
        let diff = st.amplitudes() - before.amplitudes();
        assert!(vec_norm(&diff) < 1e-12);
        assert_eq!(st.owner("data").unwrap(), Party::Referee);
    }

    #[test]
    fn remote_apply_rejects_wrong_dimension() {
        let mut s = Session::new(Topology::new(TopologyKind::Coordinator, 2).unwrap());
        let mut st = DistributedState::product(vec![(reg("d", 4, Party::Referee), basis(4, 0))]).unwrap();
        let err = st.remote_apply(&mut s, Party::Player(0), &Matrix::identity(2, 2), &["d"]);
        assert!(matches!(err, Err(CommError::Dimension { .. })));
        assert!(s.ledger.messages().is_empty());
    }

    #[test]
    fn ledger_totals_and_rounds() {
        let mut l = MessageLedger::new();
        assert_eq!(ledger_report(&l), LedgerTotals::default());
        l.record(Party::Alice, Party::Bob, 3, 0).unwrap();
        l.record(Party::Alice, Party::Bob, 3, 0).unwrap();
        l.record(Party::Bob, Party::Alice, 0, 5).unwrap();
        let t = l.totals();
        assert_eq!((t.qubits_sent, t.bits_sent, t.rounds), (6, 5, 2));
    }

    #[test]
    fn apply_on_second_register_matches_kron() {
        let x = crate::linalg::real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let mut st = DistributedState::product(vec![
            (reg("a", 2, Party::Alice), real_vector(&[0.6, 0.8])),
            (reg("b", 3, Party::Alice), basis(3, 0)),
            (reg("c", 2, Party::Alice), basis(2, 0)),
        ])
        .unwrap();
        let expected = crate::linalg::kron(&crate::linalg::kron(&Matrix::identity(2, 2), &Matrix::identity(3, 3)), &x)
            * st.amplitudes();
        st.apply_local(Party::Alice, &["c"], &x).unwrap();
        assert!(vec_norm(&(st.amplitudes() - expected)) < 1e-15);
        let p = st.postselect("a", 1).unwrap();
        assert!((p - 0.64).abs() < 1e-12);
        assert!((st.amplitudes()[1] - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn party_names_round_trip() {
        for p in [Party::Alice, Party::Bob, Party::Referee, Party::Player(3)] {
            assert_eq!(p.to_string().parse::<Party>().unwrap(), p);
        }
    }
}
