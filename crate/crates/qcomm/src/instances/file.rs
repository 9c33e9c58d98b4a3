//! TOML instance files. Matrices are stored row-major as separate real and
//! imaginary arrays; the imaginary array is omitted when it is all zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::comm::Party;
use crate::linalg::{Matrix, Vector, C64};

use super::{Combine, Instance, InstanceError, InstanceKind, Metadata};

/// Refuse files describing more entries than this in one block.
const MAX_ENTRIES: usize = 1 << 20;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    kind: InstanceKind,
    combine: Combine,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    time: Option<f64>,
    #[serde(default)]
    params: BTreeMap<String, String>,
    matrices: Vec<MatrixEntry>,
    vectors: Vec<VectorEntry>,
    metadata: MetadataEntry,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixEntry {
    owner: String,
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VectorEntry {
    owner: String,
    re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetadataEntry {
    kappa: f64,
    gamma: f64,
    expected_distribution: Vec<f64>,
    #[serde(default)]
    event_indices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    event_probability: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    intersecting: Option<bool>,
    #[serde(default)]
    warnings: Vec<String>,
    #[serde(default)]
    notes: BTreeMap<String, f64>,
}

fn split_parts<'a>(values: impl Iterator<Item = &'a C64>) -> (Vec<f64>, Vec<f64>) {
    let (re, im): (Vec<f64>, Vec<f64>) = values.map(|z| (z.re, z.im)).unzip();
    let im = if im.iter().all(|&x| x == 0.0 && x.is_sign_positive()) { Vec::new() } else { im };
    (re, im)
}

fn join_parts(re: &[f64], im: &[f64], what: &str) -> Result<Vec<C64>, InstanceError> {
    if !im.is_empty() && im.len() != re.len() {
        return Err(InstanceError::Format(format!("{what}: {} real parts but {} imaginary parts", re.len(), im.len())));
    }
    Ok(re.iter().enumerate().map(|(k, &x)| C64::new(x, im.get(k).copied().unwrap_or(0.0))).collect())
}

pub fn to_toml(inst: &Instance) -> Result<String, InstanceError> {
    let matrices = inst
        .a_parts
        .iter()
        .zip(&inst.a_owners)
        .map(|(m, owner)| {
            let (re, im) = split_parts(m.transpose().iter());
            MatrixEntry { owner: owner.to_string(), rows: m.nrows(), cols: m.ncols(), re, im }
        })
        .collect();
    let vectors = inst
        .b_parts
        .iter()
        .zip(&inst.b_owners)
        .map(|(v, owner)| {
            let (re, im) = split_parts(v.iter());
            VectorEntry { owner: owner.to_string(), re, im }
        })
        .collect();
    let md = &inst.metadata;
    let file = InstanceFile {
        kind: inst.kind,
        combine: inst.combine,
        time: inst.time,
        params: inst.params.clone(),
        matrices,
        vectors,
        metadata: MetadataEntry {
            kappa: md.kappa,
            gamma: md.gamma,
            expected_distribution: md.expected_distribution.clone(),
            event_indices: md.event_indices.clone(),
            event_probability: md.event_probability,
            intersecting: md.intersecting,
            warnings: md.warnings.clone(),
            notes: md.notes.clone(),
        },
    };
    toml::to_string(&file).map_err(|e| InstanceError::Format(e.to_string()))
}

/// Parses and validates an instance file. Metadata is taken as written; use
/// [`Instance::recompute_metadata`] to check it.
pub fn from_toml(text: &str) -> Result<Instance, InstanceError> {
    let file: InstanceFile = toml::from_str(text).map_err(|e| InstanceError::Format(e.to_string()))?;
    let mut a_parts = Vec::with_capacity(file.matrices.len());
    let mut a_owners = Vec::with_capacity(file.matrices.len());
    for (k, m) in file.matrices.iter().enumerate() {
        let count = m
            .rows
            .checked_mul(m.cols)
            .filter(|&c| c <= MAX_ENTRIES)
            .ok_or_else(|| InstanceError::Format(format!("matrix {k} is too large")))?;
        if count != m.re.len() {
            return Err(InstanceError::Format(format!(
                "matrix {k}: {}x{} needs {count} entries, found {}",
                m.rows,
                m.cols,
                m.re.len()
            )));
        }
        let entries = join_parts(&m.re, &m.im, &format!("matrix {k}"))?;
        a_parts.push(Matrix::from_row_slice(m.rows, m.cols, &entries));
        a_owners.push(parse_owner(&m.owner)?);
    }
    let mut b_parts = Vec::with_capacity(file.vectors.len());
    let mut b_owners = Vec::with_capacity(file.vectors.len());
    for (k, v) in file.vectors.iter().enumerate() {
        if v.re.len() > MAX_ENTRIES {
            return Err(InstanceError::Format(format!("vector {k} is too large")));
        }
        let entries = join_parts(&v.re, &v.im, &format!("vector {k}"))?;
        b_parts.push(Vector::from_vec(entries));
        b_owners.push(parse_owner(&v.owner)?);
    }
    let md = file.metadata;
    let inst = Instance {
        kind: file.kind,
        params: file.params,
        combine: file.combine,
        a_parts,
        a_owners,
        b_parts,
        b_owners,
        time: file.time,
        metadata: Metadata {
            kappa: md.kappa,
            gamma: md.gamma,
            expected_distribution: md.expected_distribution,
            event_indices: md.event_indices,
            event_probability: md.event_probability,
            intersecting: md.intersecting,
            warnings: md.warnings,
            notes: md.notes,
        },
    };
    inst.validate()?;
    let dim = inst.a().ncols();
    if inst.metadata.event_indices.iter().any(|&i| i >= dim) {
        return Err(InstanceError::Format("event index outside the solution".into()));
    }
    Ok(inst)
}

fn parse_owner(s: &str) -> Result<Party, InstanceError> {
    s.parse().map_err(|_| InstanceError::Format(format!("unknown owner {s:?}")))
}
