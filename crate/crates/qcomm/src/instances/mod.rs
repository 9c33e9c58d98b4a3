//! Problem instances: the lower-bound constructions, random splits for the
//! distributed protocols, and a TOML file format.
//!
//! Index sets are 0-based throughout.

mod constructions;
mod file;
mod random;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blockenc::vstack;
use crate::comm::Party;
use crate::linalg::{expm_i, is_hermitian, pinv, spectrum_stats, vec_norm, LinalgError, Matrix, Vector};

pub use constructions::{
    bit_table_regression, disjointness_regression, fourier_distribution, fourier_sampling, gamma_regression,
    hadamard_hamiltonian, identity, index_pauli, multiparty_regression, permutation_index, scaled_disjointness,
    sq_counterexample, MultipartyScales, SqVariant,
};
pub use file::{from_toml, to_toml};
pub use random::{
    conditioned_matrix, coordinator_split, diagonal_regression, hamiltonian_split, random_regression, random_subset,
    sum_split,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("index {index} outside [0, {bound})")]
    IndexRange { index: usize, bound: usize },
    #[error("not a permutation of 0..{0}")]
    Permutation(usize),
    #[error("table length {0} is not a power of two")]
    TableLength(usize),
    #[error("table entries must be +1 or -1")]
    NotSign,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("unknown instance kind {0:?}")]
    UnknownKind(String),
    #[error("instance file: {0}")]
    Format(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    Identity,
    Regression,
    Disjointness,
    Gamma,
    ScaledDisjointness,
    PermutationIndex,
    IndexPauli,
    IndexRegression,
    Fourier,
    Multiparty,
    HadamardHamiltonian,
    SqCounterexample,
    CoordinatorSplit,
    SumSplit,
    HamiltonianSplit,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 15] = [
        InstanceKind::Identity,
        InstanceKind::Regression,
        InstanceKind::Disjointness,
        InstanceKind::Gamma,
        InstanceKind::ScaledDisjointness,
        InstanceKind::PermutationIndex,
        InstanceKind::IndexPauli,
        InstanceKind::IndexRegression,
        InstanceKind::Fourier,
        InstanceKind::Multiparty,
        InstanceKind::HadamardHamiltonian,
        InstanceKind::SqCounterexample,
        InstanceKind::CoordinatorSplit,
        InstanceKind::SumSplit,
        InstanceKind::HamiltonianSplit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Identity => "identity",
            InstanceKind::Regression => "regression",
            InstanceKind::Disjointness => "disjointness",
            InstanceKind::Gamma => "gamma",
            InstanceKind::ScaledDisjointness => "scaled-disjointness",
            InstanceKind::PermutationIndex => "permutation-index",
            InstanceKind::IndexPauli => "index-pauli",
            InstanceKind::IndexRegression => "index-regression",
            InstanceKind::Fourier => "fourier",
            InstanceKind::Multiparty => "multiparty",
            InstanceKind::HadamardHamiltonian => "hadamard-hamiltonian",
            InstanceKind::SqCounterexample => "sq-counterexample",
            InstanceKind::CoordinatorSplit => "coordinator-split",
            InstanceKind::SumSplit => "sum-split",
            InstanceKind::HamiltonianSplit => "hamiltonian-split",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstanceKind {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        InstanceKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| InstanceError::UnknownKind(s.to_string()))
    }
}

/// How the per-party pieces combine into the global `A` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Combine {
    /// `A = [A₀; A₁; …]`, `b = [b₀; b₁; …]`.
    Stack,
    /// `A = ΣAᵢ`, `b = Σbᵢ`.
    Sum,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Metadata {
    pub kappa: f64,
    pub gamma: f64,
    /// `|x|²/‖x‖²` for the solution `A⁺b`, or for `e^{iHt}ψ` on Hamiltonian kinds.
    pub expected_distribution: Vec<f64>,
    /// Ground-truth indices of interest, e.g. the intersection of two sets.
    pub event_indices: Vec<usize>,
    pub event_probability: Option<f64>,
    pub intersecting: Option<bool>,
    pub warnings: Vec<String>,
    /// Named diagnostics such as norm ratios.
    pub notes: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub kind: InstanceKind,
    pub params: BTreeMap<String, String>,
    pub combine: Combine,
    pub a_parts: Vec<Matrix>,
    pub a_owners: Vec<Party>,
    pub b_parts: Vec<Vector>,
    pub b_owners: Vec<Party>,
    /// Evolution time; present exactly for Hamiltonian kinds.
    pub time: Option<f64>,
    pub metadata: Metadata,
}

impl Instance {
    /// Two-party regression with `A` at Alice and `b` at Bob.
    pub(crate) fn two_party(kind: InstanceKind, a: Matrix, b: Vector) -> Self {
        Self {
            kind,
            params: BTreeMap::new(),
            combine: Combine::Stack,
            a_parts: vec![a],
            a_owners: vec![Party::Alice],
            b_parts: vec![b],
            b_owners: vec![Party::Bob],
            time: None,
            metadata: Metadata::default(),
        }
    }

    pub(crate) fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn a(&self) -> Matrix {
        match self.combine {
            Combine::Stack => vstack(&self.a_parts),
            Combine::Sum => self.a_parts.iter().skip(1).fold(self.a_parts[0].clone(), |acc, m| acc + m),
        }
    }

    pub fn b(&self) -> Vector {
        match self.combine {
            Combine::Stack => {
                let len = self.b_parts.iter().map(|v| v.len()).sum();
                let mut out = Vector::zeros(len);
                let mut at = 0;
                for v in &self.b_parts {
                    out.rows_mut(at, v.len()).copy_from(v);
                    at += v.len();
                }
                out
            }
            Combine::Sum => self.b_parts.iter().skip(1).fold(self.b_parts[0].clone(), |acc, v| acc + v),
        }
    }

    pub fn is_hamiltonian(&self) -> bool {
        self.time.is_some()
    }

    pub fn party_count(&self) -> usize {
        let mut owners: Vec<Party> = self.a_owners.iter().chain(&self.b_owners).copied().collect();
        owners.sort();
        owners.dedup();
        owners.len()
    }

    /// True when every piece sits with a numbered player or the referee.
    pub fn is_multiparty(&self) -> bool {
        self.a_owners.iter().chain(&self.b_owners).all(|p| matches!(p, Party::Player(_) | Party::Referee))
    }

    /// The unnormalised target vector: `A⁺b`, or `e^{iHt}ψ`.
    pub fn solution(&self) -> Result<Vector, InstanceError> {
        match self.time {
            Some(t) => Ok(expm_i(&self.a(), t)? * self.b()),
            None => Ok(pinv(&self.a())? * self.b()),
        }
    }

    /// Shape and ownership checks shared by the generators and the file loader.
    pub fn validate(&self) -> Result<(), InstanceError> {
        let shape = |msg: String| Err(InstanceError::Shape(msg));
        if self.a_parts.is_empty() || self.b_parts.is_empty() {
            return shape("instance needs at least one matrix and one vector".into());
        }
        if self.a_parts.len() != self.a_owners.len() || self.b_parts.len() != self.b_owners.len() {
            return shape("every part needs exactly one owner".into());
        }
        let cols = self.a_parts[0].ncols();
        if self.a_parts.iter().any(|m| m.ncols() != cols || m.nrows() == 0 || cols == 0) {
            return shape("matrix parts must share a nonzero column count".into());
        }
        match self.combine {
            Combine::Stack if self.time.is_none() => {
                let rows: Vec<usize> = self.a_parts.iter().map(|m| m.nrows()).collect();
                let lens: Vec<usize> = self.b_parts.iter().map(|v| v.len()).collect();
                let same_split = rows == lens;
                let single_b = lens.len() == 1 && lens[0] == rows.iter().sum::<usize>();
                if !same_split && !single_b {
                    return shape(format!("row blocks {rows:?} do not match vector blocks {lens:?}"));
                }
            }
            _ => {
                let rows = self.a_parts[0].nrows();
                if self.a_parts.iter().any(|m| m.nrows() != rows) {
                    return shape("summed parts must share one shape".into());
                }
                if self.b_parts.iter().any(|v| v.len() != rows) {
                    return shape("vector parts must match the matrix row count".into());
                }
            }
        }
        if let Some(t) = self.time {
            if !t.is_finite() {
                return Err(InstanceError::Param("time must be finite".into()));
            }
            for h in &self.a_parts {
                if !h.is_square() || !is_hermitian(h, 1e-9 * (1.0 + crate::linalg::frob_norm(h))) {
                    return Err(InstanceError::Param("Hamiltonian parts must be Hermitian".into()));
                }
            }
        }
        let finite = |z: &crate::linalg::C64| z.re.is_finite() && z.im.is_finite();
        if !self.a_parts.iter().all(|m| m.iter().all(finite)) || !self.b_parts.iter().all(|v| v.iter().all(finite)) {
            return Err(InstanceError::Param("entries must be finite".into()));
        }
        if vec_norm(&self.b()) == 0.0 {
            return Err(InstanceError::Param("b is zero".into()));
        }
        Ok(())
    }

    /// Recomputes `κ`, `γ` and the expected distribution from the data,
    /// keeping the ground-truth fields already present.
    pub fn recompute_metadata(&self) -> Result<Metadata, InstanceError> {
        let a = self.a();
        let b = self.b();
        let stats = spectrum_stats(&a, &b)?;
        let x = self.solution()?;
        let norm2: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        if norm2 == 0.0 {
            return Err(InstanceError::Param("solution vector is zero".into()));
        }
        let dist: Vec<f64> = x.iter().map(|z| z.norm_sqr() / norm2).collect();
        let event_probability = if self.metadata.event_indices.is_empty() {
            self.metadata.event_probability
        } else {
            Some(self.metadata.event_indices.iter().map(|&i| dist[i]).sum())
        };
        Ok(Metadata {
            kappa: stats.kappa,
            gamma: stats.gamma,
            expected_distribution: dist,
            event_indices: self.metadata.event_indices.clone(),
            event_probability,
            intersecting: self.metadata.intersecting,
            warnings: self.metadata.warnings.clone(),
            notes: self.metadata.notes.clone(),
        })
    }

    /// Validates and fills in the computed metadata.
    pub(crate) fn finish(mut self) -> Result<Self, InstanceError> {
        self.validate()?;
        self.metadata = self.recompute_metadata()?;
        Ok(self)
    }
}

/// Largest deviation between two metadata records over the numeric fields.
pub fn metadata_deviation(a: &Metadata, b: &Metadata) -> f64 {
    if a.expected_distribution.len() != b.expected_distribution.len() {
        return f64::INFINITY;
    }
    let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(1.0);
    let dist =
        a.expected_distribution.iter().zip(&b.expected_distribution).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let event = match (a.event_probability, b.event_probability) {
        (Some(x), Some(y)) => (x - y).abs(),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    };
    rel(a.kappa, b.kappa).max(rel(a.gamma, b.gamma)).max(dist).max(event)
}
