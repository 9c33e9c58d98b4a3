//! Protocol dispatch by CLI name and the CSV row each run produces.

use std::fmt;
use std::str::FromStr;

use qcomm::baselines::{classical_naive_regression, sq_rank2_demo, tv_distance, NaiveDirection};
use qcomm::comm::Party;
use qcomm::instances::{Combine, Instance, InstanceKind};
use qcomm::protocols::{
    coordinator_regression, coordinator_sum_regression, hamiltonian_sim_coordinator, hamiltonian_sim_two_party,
    regression_case1, regression_case2, regression_case3, Direction, Mode, ProtocolOutcome, Schedule,
};
use qcomm::vtaa::vtaa_regression;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{DirectionChoice, Settings};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolName {
    Case1,
    Case2,
    Case3,
    Coord,
    CoordSum,
    Hsim2,
    HsimCoord,
    Vtaa,
    ClassicalNaive,
    SqDemo,
}

impl ProtocolName {
    pub const ALL: [ProtocolName; 10] = [
        ProtocolName::Case1,
        ProtocolName::Case2,
        ProtocolName::Case3,
        ProtocolName::Coord,
        ProtocolName::CoordSum,
        ProtocolName::Hsim2,
        ProtocolName::HsimCoord,
        ProtocolName::Vtaa,
        ProtocolName::ClassicalNaive,
        ProtocolName::SqDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolName::Case1 => "case1",
            ProtocolName::Case2 => "case2",
            ProtocolName::Case3 => "case3",
            ProtocolName::Coord => "coord",
            ProtocolName::CoordSum => "coord-sum",
            ProtocolName::Hsim2 => "hsim2",
            ProtocolName::HsimCoord => "hsim-coord",
            ProtocolName::Vtaa => "vtaa",
            ProtocolName::ClassicalNaive => "classical-naive",
            ProtocolName::SqDemo => "sq-demo",
        }
    }

    /// The instance layouts this protocol can run on.
    pub fn accepts(self) -> &'static [Layout] {
        match self {
            ProtocolName::Case1 | ProtocolName::Case2 | ProtocolName::Case3 | ProtocolName::ClassicalNaive => {
                &[Layout::TwoParty]
            }
            ProtocolName::SqDemo => &[Layout::TwoParty],
            ProtocolName::Coord => &[Layout::Coordinator],
            ProtocolName::CoordSum => &[Layout::CoordinatorSum],
            ProtocolName::Hsim2 => &[Layout::TwoPartyHamiltonian],
            ProtocolName::HsimCoord => &[Layout::CoordinatorHamiltonian],
            ProtocolName::Vtaa => &[Layout::Coordinator, Layout::TwoParty],
        }
    }
}

impl fmt::Display for ProtocolName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolName {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProtocolName::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown protocol {s:?}")))
    }
}

/// How an instance's data is spread over the parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    TwoParty,
    TwoPartyHamiltonian,
    Coordinator,
    CoordinatorSum,
    CoordinatorHamiltonian,
}

impl Layout {
    pub fn of(inst: &Instance) -> Layout {
        match (inst.is_multiparty(), inst.is_hamiltonian(), inst.combine) {
            (true, true, _) => Layout::CoordinatorHamiltonian,
            (true, false, Combine::Sum) => Layout::CoordinatorSum,
            (true, false, Combine::Stack) => Layout::Coordinator,
            (false, true, _) => Layout::TwoPartyHamiltonian,
            (false, false, _) => Layout::TwoParty,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Layout::TwoParty => "two-party",
            Layout::TwoPartyHamiltonian => "two-party-hamiltonian",
            Layout::Coordinator => "coordinator",
            Layout::CoordinatorSum => "coordinator-sum",
            Layout::CoordinatorHamiltonian => "coordinator-hamiltonian",
        }
    }
}

/// Column order of the ledger CSV. The first thirteen columns are the stable
/// schema; the rest carry the remaining scalar outcome fields.
pub const COLUMNS: [&str; 20] = [
    "protocol",
    "topology",
    "n",
    "r",
    "kappa",
    "gamma",
    "qubits_sent",
    "bits_sent",
    "rounds",
    "success_prob",
    "fidelity",
    "tv_distance",
    "seed",
    "instance",
    "eps",
    "final_success_prob",
    "iterations",
    "oracle_uses",
    "degree",
    "failed",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub protocol: String,
    pub topology: String,
    pub n: usize,
    pub r: usize,
    pub kappa: f64,
    pub gamma: f64,
    pub qubits_sent: usize,
    pub bits_sent: usize,
    pub rounds: usize,
    pub success_prob: f64,
    pub fidelity: f64,
    pub tv_distance: f64,
    pub seed: u64,
    pub instance: String,
    pub eps: f64,
    pub final_success_prob: f64,
    pub iterations: usize,
    pub oracle_uses: Option<usize>,
    pub degree: Option<usize>,
    pub failed: bool,
}

/// Players holding input, not counting the referee.
fn input_parties(inst: &Instance) -> usize {
    let mut owners: Vec<Party> =
        inst.a_owners.iter().chain(&inst.b_owners).copied().filter(|p| *p != Party::Referee).collect();
    owners.sort();
    owners.dedup();
    owners.len()
}

fn row_from(outcome: &ProtocolOutcome, inst: &Instance, s: &Settings) -> Row {
    let totals = outcome.ledger.totals();
    Row {
        protocol: outcome.protocol.clone(),
        topology: outcome.topology.name().to_string(),
        n: inst.a_parts[0].ncols(),
        r: input_parties(inst),
        kappa: inst.metadata.kappa,
        gamma: inst.metadata.gamma,
        qubits_sent: totals.qubits_sent,
        bits_sent: totals.bits_sent,
        rounds: totals.rounds,
        success_prob: outcome.success_prob,
        fidelity: outcome.fidelity_to_target,
        tv_distance: outcome.tv_distance,
        seed: s.seed,
        instance: inst.kind.name().to_string(),
        eps: s.eps,
        final_success_prob: outcome.final_success_prob,
        iterations: outcome.repetitions_or_iterations,
        oracle_uses: outcome.oracle_uses,
        degree: outcome.degree,
        failed: outcome.failed,
    }
}

/// Checks that `protocol` can run on `inst`, naming both on mismatch.
pub fn check_layout(protocol: ProtocolName, inst: &Instance) -> Result<(), CliError> {
    let layout = Layout::of(inst);
    let fits = protocol.accepts().contains(&layout)
        && (protocol != ProtocolName::SqDemo || inst.kind == InstanceKind::SqCounterexample);
    if fits {
        return Ok(());
    }
    let expected: Vec<&str> = protocol.accepts().iter().map(|l| l.name()).collect();
    Err(CliError::Topology {
        protocol: protocol.name().to_string(),
        expected: expected.join(" or "),
        instance: format!("{} {}", layout.name(), inst.kind),
    })
}

/// Full outcome of one run, for callers that need more than the CSV row.
pub fn run_outcome(protocol: ProtocolName, inst: &Instance, s: &Settings) -> Result<ProtocolOutcome, CliError> {
    check_layout(protocol, inst)?;
    let mode = if s.repeat { Mode::Repeat } else { Mode::Postselect };
    let out = match protocol {
        ProtocolName::Case1 => regression_case1(&inst.a(), &inst.b(), mode)?,
        ProtocolName::Case2 => regression_case2(&inst.a(), &inst.b(), mode)?,
        ProtocolName::Case3 => {
            let schedule = if s.oblivious { Schedule::Oblivious { seed: s.seed } } else { Schedule::KnownProbability };
            regression_case3(&inst.a(), &inst.b(), schedule)?
        }
        ProtocolName::Coord => coordinator_regression(&inst.a_parts, &inst.b_parts, s.delta, s.eps)?,
        ProtocolName::CoordSum => coordinator_sum_regression(&inst.a_parts, &inst.b_parts, s.delta, s.eps)?,
        ProtocolName::Hsim2 => {
            let direction = match s.direction {
                DirectionChoice::BobToAlice => Direction::BobToAlice,
                DirectionChoice::AliceToBob => Direction::AliceToBob,
                DirectionChoice::TwoWay => Direction::TwoWay,
            };
            hamiltonian_sim_two_party(&inst.a(), &inst.b(), time_of(inst), direction, mode)?
        }
        ProtocolName::HsimCoord => hamiltonian_sim_coordinator(&inst.a_parts, &inst.b(), time_of(inst), s.eps)?,
        ProtocolName::Vtaa => vtaa_regression(&inst.a_parts, &inst.b_parts, s.eps)?,
        ProtocolName::ClassicalNaive => {
            let direction = match s.direction {
                DirectionChoice::BobToAlice => NaiveDirection::BobToAlice,
                DirectionChoice::AliceToBob => NaiveDirection::AliceToBob,
                DirectionChoice::TwoWay => {
                    return Err(CliError::Config("classical-naive is one-way; pick a single direction".into()))
                }
            };
            classical_naive_regression(&inst.a(), &inst.b(), direction)?
        }
        ProtocolName::SqDemo => return Err(CliError::Usage("sq-demo has no quantum outcome".into())),
    };
    Ok(out)
}

fn time_of(inst: &Instance) -> f64 {
    inst.time.unwrap_or(0.0)
}

/// Runs `protocol` on `inst` and reports one CSV row.
pub fn run(protocol: ProtocolName, inst: &Instance, s: &Settings) -> Result<Row, CliError> {
    if protocol == ProtocolName::SqDemo {
        check_layout(protocol, inst)?;
        return sq_row(inst, s);
    }
    let out = run_outcome(protocol, inst, s)?;
    Ok(row_from(&out, inst, s))
}

/// The SQ demo sends nothing; success is a verdict matching the ground
/// truth, and fidelity compares the empirical histogram with the exact
/// distribution.
fn sq_row(inst: &Instance, s: &Settings) -> Result<Row, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let report = sq_rank2_demo(inst, s.draws, &mut rng)?;
    let empirical: Vec<f64> = report.counts.iter().map(|&c| c as f64 / report.draws.max(1) as f64).collect();
    let overlap: f64 = empirical.iter().zip(&report.distribution).map(|(p, q)| (p * q).sqrt()).sum();
    let matches = report.matches_ground_truth();
    Ok(Row {
        protocol: ProtocolName::SqDemo.name().to_string(),
        topology: "sq-access".to_string(),
        n: inst.a_parts[0].ncols(),
        r: input_parties(inst),
        kappa: inst.metadata.kappa,
        gamma: inst.metadata.gamma,
        qubits_sent: 0,
        bits_sent: 0,
        rounds: 0,
        success_prob: if matches { 1.0 } else { 0.0 },
        fidelity: overlap * overlap,
        tv_distance: tv_distance(&empirical, &report.distribution)?,
        seed: s.seed,
        instance: inst.kind.name().to_string(),
        eps: s.eps,
        final_success_prob: if matches { 1.0 } else { 0.0 },
        iterations: report.draws,
        oracle_uses: Some(report.counters.samples),
        degree: None,
        failed: !matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate;

    #[test]
    fn names_round_trip() {
        for p in ProtocolName::ALL {
            assert_eq!(p.name().parse::<ProtocolName>().unwrap(), p);
        }
        assert!("case4".parse::<ProtocolName>().is_err());
    }

    #[test]
    fn identity_case1_succeeds_surely() {
        let s = Settings::default();
        let inst = generate(InstanceKind::Identity, &s).unwrap();
        let row = run(ProtocolName::Case1, &inst, &s).unwrap();
        assert_eq!(row.success_prob, 1.0);
        assert_eq!(row.bits_sent, 0);
    }

    #[test]
    fn mismatch_names_both_sides() {
        let s = Settings::default();
        let inst = generate(InstanceKind::Identity, &s).unwrap();
        let msg = run(ProtocolName::Coord, &inst, &s).unwrap_err().to_string();
        assert!(msg.contains("coord") && msg.contains("two-party identity"), "{msg}");
        let split = generate(InstanceKind::CoordinatorSplit, &s).unwrap();
        assert!(run(ProtocolName::Case1, &split, &s).is_err());
        assert!(run(ProtocolName::SqDemo, &inst, &s).is_err());
    }

    #[test]
    fn coordinator_run_on_two_players() {
        let s = Settings::default();
        let inst = generate(InstanceKind::CoordinatorSplit, &s).unwrap();
        let row = run(ProtocolName::Coord, &inst, &s).unwrap();
        assert!(row.qubits_sent > 0);
        assert!(row.fidelity >= 1.0 - s.eps);
        assert_eq!(row.r, 2);
    }

    #[test]
    fn sq_demo_row_matches_ground_truth() {
        let s = Settings::default();
        let inst = generate(InstanceKind::SqCounterexample, &s).unwrap();
        let row = run(ProtocolName::SqDemo, &inst, &s).unwrap();
        assert!(!row.failed);
        assert_eq!(row.qubits_sent + row.bits_sent, 0);
    }
}
