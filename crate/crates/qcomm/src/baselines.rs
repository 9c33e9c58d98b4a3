//! Classical comparators charged on the same ledger as the quantum protocols.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use thiserror::Error;

use crate::comm::{CommError, Party, Session, Topology, TopologyKind};
use crate::instances::{Instance, InstanceKind};
use crate::linalg::{pinv, qubits_for, vec_norm, LinalgError, Matrix, Vector, C64};
use crate::protocols::ProtocolOutcome;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaselineError {
    #[error("cannot sample from a zero vector")]
    ZeroVector,
    #[error("distributions have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("distribution entry {0} is negative or not finite")]
    BadEntry(f64),
    #[error("index {index} outside [0, {bound})")]
    Index { index: usize, bound: usize },
    #[error("{0}")]
    Instance(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Comm(#[from] CommError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SqCounters {
    pub entry_queries: usize,
    pub norm_queries: usize,
    pub samples: usize,
}

#[derive(Debug, Clone)]
enum SqData {
    Vector(Vector),
    Matrix { entries: Matrix, row_norms: Vec<f64> },
}

/// Sampling-and-query access to a vector, or to a matrix through its rows.
///
/// Samples are drawn from the exact distribution `|vᵢ|²/‖v‖²` (rows by
/// `‖Aᵢ‖²/‖A‖_F²` for matrices).
#[derive(Debug, Clone)]
pub struct SqAccess {
    data: SqData,
    norm: f64,
    sampler: WeightedIndex<f64>,
    counters: SqCounters,
}

impl SqAccess {
    pub fn from_vector(v: &Vector) -> Result<Self, BaselineError> {
        let weights: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
        let sampler = WeightedIndex::new(&weights).map_err(|_| BaselineError::ZeroVector)?;
        Ok(Self { data: SqData::Vector(v.clone()), norm: vec_norm(v), sampler, counters: SqCounters::default() })
    }

    pub fn from_matrix(a: &Matrix) -> Result<Self, BaselineError> {
        let row_norms: Vec<f64> = a.row_iter().map(|r| r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
        let weights: Vec<f64> = row_norms.iter().map(|x| x * x).collect();
        let sampler = WeightedIndex::new(&weights).map_err(|_| BaselineError::ZeroVector)?;
        let norm = weights.iter().sum::<f64>().sqrt();
        Ok(Self {
            data: SqData::Matrix { entries: a.clone(), row_norms },
            norm,
            sampler,
            counters: SqCounters::default(),
        })
    }

    pub fn counters(&self) -> SqCounters {
        self.counters
    }

    /// Number of sampleable indices (entries, or rows).
    pub fn len(&self) -> usize {
        match &self.data {
            SqData::Vector(v) => v.len(),
            SqData::Matrix { entries, .. } => entries.nrows(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `vᵢ`, or `A[i, j]` for matrices (`j` ignored for vectors).
    pub fn query(&mut self, i: usize, j: usize) -> Result<C64, BaselineError> {
        self.counters.entry_queries += 1;
        match &self.data {
            SqData::Vector(v) => v.get(i).copied().ok_or(BaselineError::Index { index: i, bound: v.len() }),
            SqData::Matrix { entries, .. } => {
                if i >= entries.nrows() {
                    return Err(BaselineError::Index { index: i, bound: entries.nrows() });
                }
                if j >= entries.ncols() {
                    return Err(BaselineError::Index { index: j, bound: entries.ncols() });
                }
                Ok(entries[(i, j)])
            }
        }
    }

    /// `‖v‖`, or `‖A‖_F`.
    pub fn norm(&mut self) -> f64 {
        self.counters.norm_queries += 1;
        self.norm
    }

    /// `‖Aᵢ‖` for matrices, `|vᵢ|` for vectors.
    pub fn row_norm(&mut self, i: usize) -> Result<f64, BaselineError> {
        self.counters.norm_queries += 1;
        match &self.data {
            SqData::Vector(v) => v.get(i).map(|z| z.norm()).ok_or(BaselineError::Index { index: i, bound: v.len() }),
            SqData::Matrix { row_norms, .. } => {
                row_norms.get(i).copied().ok_or(BaselineError::Index { index: i, bound: row_norms.len() })
            }
        }
    }
}

pub fn sq_sample<R: Rng>(handle: &mut SqAccess, rng: &mut R) -> usize {
    handle.counters.samples += 1;
    handle.sampler.sample(rng)
}

/// `½ Σ|pᵢ − qᵢ|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64, BaselineError> {
    if p.len() != q.len() {
        return Err(BaselineError::LengthMismatch(p.len(), q.len()));
    }
    if let Some(&bad) = p.iter().chain(q).find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(BaselineError::BadEntry(bad));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Counts of `draws` samples from `dist`.
pub fn sample_histogram<R: Rng>(dist: &[f64], draws: usize, rng: &mut R) -> Result<Vec<usize>, BaselineError> {
    let sampler = WeightedIndex::new(dist).map_err(|_| BaselineError::ZeroVector)?;
    let mut counts = vec![0; dist.len()];
    for _ in 0..draws {
        counts[sampler.sample(rng)] += 1;
    }
    Ok(counts)
}

/// Which party ships its whole input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaiveDirection {
    /// Bob sends `b`: `m·⌈log₂ mn⌉` bits.
    BobToAlice,
    /// Alice sends `A`: `mn·⌈log₂ mn⌉` bits.
    AliceToBob,
}

/// The receiver gets the other input entry by entry, solves exactly, and
/// holds the exact output distribution.
pub fn classical_naive_regression(
    a: &Matrix,
    b: &Vector,
    direction: NaiveDirection,
) -> Result<ProtocolOutcome, BaselineError> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(BaselineError::LengthMismatch(m, b.len()));
    }
    let entry_bits = qubits_for(m * n).max(1);
    let (kind, from, to, bits) = match direction {
        NaiveDirection::BobToAlice => (TopologyKind::OneWayBobToAlice, Party::Bob, Party::Alice, m * entry_bits),
        NaiveDirection::AliceToBob => (TopologyKind::OneWayAliceToBob, Party::Alice, Party::Bob, m * n * entry_bits),
    };
    let mut session = Session::new(Topology::two_party(kind));
    session.send_classical(from, to, bits)?;
    let x = pinv(a)? * b;
    if vec_norm(&x) == 0.0 {
        return Err(BaselineError::ZeroVector);
    }
    let mut out = ProtocolOutcome::new("classical-naive", kind, x.clone(), &x, x.clone(), session.ledger);
    out.success_prob = 1.0;
    out.final_success_prob = 1.0;
    out.repetitions_or_iterations = 1;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqDemoReport {
    pub distribution: Vec<f64>,
    pub counts: Vec<usize>,
    pub draws: usize,
    /// "intersecting" iff some nonzero index was drawn.
    pub verdict_intersecting: bool,
    pub ground_truth: Option<bool>,
    pub counters: SqCounters,
}

impl SqDemoReport {
    pub fn matches_ground_truth(&self) -> bool {
        self.ground_truth == Some(self.verdict_intersecting)
    }
}

/// Samples the solution of a rank-2 counterexample through SQ access.
/// The default budget is `10·n` draws.
pub fn sq_rank2_demo<R: Rng>(
    inst: &Instance,
    draws: Option<usize>,
    rng: &mut R,
) -> Result<SqDemoReport, BaselineError> {
    if inst.kind != InstanceKind::SqCounterexample {
        return Err(BaselineError::Instance(format!("expected sq-counterexample, got {}", inst.kind)));
    }
    let x = inst.solution().map_err(|e| BaselineError::Instance(e.to_string()))?;
    let n = x.len() - 1;
    let draws = draws.unwrap_or(10 * n);
    let mut handle = SqAccess::from_vector(&x)?;
    let mut counts = vec![0; x.len()];
    for _ in 0..draws {
        counts[sq_sample(&mut handle, rng)] += 1;
    }
    let norm2: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    Ok(SqDemoReport {
        distribution: x.iter().map(|z| z.norm_sqr() / norm2).collect(),
        verdict_intersecting: counts[1..].iter().any(|&c| c > 0),
        counts,
        draws,
        ground_truth: inst.metadata.intersecting,
        counters: handle.counters(),
    })
}
