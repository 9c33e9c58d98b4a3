//! End-to-end protocols. Each run returns the output state, its success
//! probability and the filled ledger, together with the same computation
//! done as one plain matrix product so the two can be compared.

pub(crate) mod coordinator;
mod two_party;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::baselines::tv_distance;
use crate::blockenc::BlockEncError;
use crate::comm::{CommError, MessageLedger, TopologyKind};
use crate::instances::InstanceError;
use crate::linalg::{fidelity, normalized, vec_norm, LinalgError, Vector};
use crate::qsvt::{EncodeError, PolyError};

pub use coordinator::{
    coordinator_regression, coordinator_state_prep_b, coordinator_sum_regression, hamiltonian_sim_coordinator,
    PreparedState,
};
pub use two_party::{hamiltonian_sim_two_party, regression_case1, regression_case2, regression_case3};

/// Copies sent in repeat mode are `⌈REPEAT_CONSTANT / p⌉`; with 3 the chance
/// that none succeed is below `e⁻³`.
pub const REPEAT_CONSTANT: f64 = 3.0;

/// Width of a classical norm message.
pub const NORM_BITS: usize = 64;

/// Outcome probabilities at or below this count as exactly zero.
pub const ZERO_PROBABILITY: f64 = 1e-20;

/// Growth factor of the oblivious amplification schedule.
const SCHEDULE_GROWTH: f64 = 1.2;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("{protocol} needs a {expected} instance, got {got}")]
    Topology { protocol: String, expected: String, got: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Comm(#[from] CommError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    BlockEnc(#[from] BlockEncError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Vtaa(#[from] crate::vtaa::VtaaError),
}

/// Single postselected attempt, or repetition until one copy succeeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Postselect,
    Repeat,
}

/// How many amplification steps to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// `⌊π/(4θ)⌋` steps computed from the exact success probability.
    #[default]
    KnownProbability,
    /// Exponential search with random step counts, for when `p` is unknown.
    Oblivious { seed: u64 },
}

/// Who may talk in the two-party Hamiltonian protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    BobToAlice,
    AliceToBob,
    TwoWay,
}

#[derive(Debug, Clone)]
pub struct ProtocolOutcome {
    pub protocol: String,
    pub topology: TopologyKind,
    /// Normalised state held by the output party on success.
    pub output_state: Vector,
    pub output_distribution: Vec<f64>,
    /// The same result computed without registers or messages.
    pub monolithic_state: Vector,
    /// Success probability of one attempt before any repetition.
    pub success_prob: f64,
    /// Probability that the protocol as run ends with the right flag.
    pub final_success_prob: f64,
    pub repetitions_or_iterations: usize,
    pub oracle_uses: Option<usize>,
    pub degree: Option<usize>,
    pub fidelity_to_target: f64,
    pub tv_distance: f64,
    pub ledger: MessageLedger,
    pub failed: bool,
    pub warnings: Vec<String>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl ProtocolOutcome {
    pub fn new(
        protocol: &str,
        topology: TopologyKind,
        output: Vector,
        target: &Vector,
        monolithic: Vector,
        ledger: MessageLedger,
    ) -> Self {
        let output = unit_or_zero(&output);
        let output_distribution: Vec<f64> = output.iter().map(|z| z.norm_sqr()).collect();
        let target_distribution: Vec<f64> = unit_or_zero(target).iter().map(|z| z.norm_sqr()).collect();
        let tv = tv_distance(&output_distribution, &target_distribution).unwrap_or(1.0);
        Self {
            protocol: protocol.to_string(),
            topology,
            fidelity_to_target: fidelity(&output, target),
            tv_distance: tv,
            output_state: output,
            output_distribution,
            monolithic_state: unit_or_zero(&monolithic),
            success_prob: 0.0,
            final_success_prob: 0.0,
            repetitions_or_iterations: 1,
            oracle_uses: None,
            degree: None,
            ledger,
            failed: false,
            warnings: Vec::new(),
            diagnostics: BTreeMap::new(),
        }
    }

    /// `1 − |⟨out|mono⟩|²`; zero when the distributed run reproduces the
    /// plain composition.
    pub fn monolithic_gap(&self) -> f64 {
        if self.output_state.len() != self.monolithic_state.len() {
            return 1.0;
        }
        (1.0 - fidelity(&self.output_state, &self.monolithic_state)).max(0.0)
    }
}

fn unit_or_zero(v: &Vector) -> Vector {
    if vec_norm(v) > 0.0 {
        normalized(v)
    } else {
        v.clone()
    }
}

pub(crate) fn unit(v: &Vector, what: &str) -> Result<Vector, ProtocolError> {
    let n = vec_norm(v);
    if !(n > 0.0 && n.is_finite()) {
        return Err(ProtocolError::Precondition(format!("{what} must be nonzero and finite")));
    }
    Ok(v.map(|z| z / n))
}

/// Grover steps that bring success probability `p` closest to one.
pub fn aa_iterations(p: f64) -> usize {
    if p >= 1.0 {
        return 0;
    }
    let theta = p.sqrt().asin();
    (std::f64::consts::PI / (4.0 * theta)).floor() as usize
}

/// Success probability after `k` Grover steps starting from `p`.
pub fn amplified_probability(p: f64, k: usize) -> f64 {
    let theta = p.clamp(0.0, 1.0).sqrt().asin();
    ((2 * k + 1) as f64 * theta).sin().powi(2)
}

/// Step counts of successive attempts. With a known probability this is the
/// single optimal count; the oblivious schedule draws each count uniformly
/// below a bound that grows by a constant factor after every failure, and
/// simulates the measurement with the given probabilities. Stops once the
/// summed steps would pass `step_cap`; the flag reports whether the last
/// attempt succeeded.
pub fn schedule_attempts(schedule: Schedule, p: f64, step_cap: usize) -> (Vec<usize>, bool) {
    use rand::{Rng, SeedableRng};
    match schedule {
        Schedule::KnownProbability => {
            if p <= ZERO_PROBABILITY {
                return (vec![step_cap], false);
            }
            (vec![aa_iterations(p)], true)
        }
        Schedule::Oblivious { seed } => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut bound = 1.0f64;
            let mut attempts = Vec::new();
            let mut spent = 0;
            loop {
                let k = rng.gen_range(0..bound.ceil() as usize);
                if spent + k > step_cap && !attempts.is_empty() {
                    return (attempts, false);
                }
                spent += k;
                attempts.push(k);
                if rng.gen::<f64>() < amplified_probability(p, k) {
                    return (attempts, true);
                }
                bound = (bound * SCHEDULE_GROWTH).min(step_cap.max(1) as f64);
            }
        }
    }
}

/// Amplitude amplification on a plain vector: `forward` prepares from
/// `init`, `backward` undoes it, `good` marks the target indices. Each step
/// is `−F·(I − 2|init⟩⟨init|)·B·S`, with `S` flipping the good amplitudes.
pub(crate) fn amplify(
    init: &Vector,
    forward: impl Fn(&Vector) -> Vector,
    backward: impl Fn(&Vector) -> Vector,
    good: impl Fn(usize) -> bool,
    steps: usize,
) -> Vector {
    let mut psi = forward(init);
    for _ in 0..steps {
        for (i, z) in psi.iter_mut().enumerate() {
            if good(i) {
                *z = -*z;
            }
        }
        let mut back = backward(&psi);
        let overlap = init.dotc(&back);
        back -= init * (overlap * 2.0);
        psi = -forward(&back);
    }
    psi
}
