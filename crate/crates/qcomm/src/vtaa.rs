//! Variable-time amplitude amplification for `A⁻¹b`: gapped phase
//! estimation, a truncated inverse, and the staged solver that runs one
//! stage per halving of the eigenvalue threshold.
//!
//! Every map here acts diagonally in the eigenbasis of the Hermitian block,
//! so states are stored as eigen-coefficients times the small clock and
//! flag registers. Phase estimation is simulated from its exact outcome
//! distribution with the garbage registers left out.

use std::cell::{Cell, RefCell};
use std::f64::consts::PI;

use nalgebra::linalg::Schur;
use statrs::distribution::{Binomial, DiscreteCDF};
use thiserror::Error;

use crate::blockenc::{hermitian_dilation, stack_lcu, vstack, BlockEncoding};
use crate::comm::{CommError, Party, Session, Topology, TopologyKind};
use crate::linalg::{
    hermitian_eigen, is_hermitian, pinv, unitarity_defect, vec_norm, LinalgError, Matrix, Vector, C64, ZERO,
};
use crate::protocols::coordinator::{padded_layout, part_encoding};
use crate::protocols::{aa_iterations, ProtocolError, ProtocolOutcome};
use crate::qsvt::{inverse_poly, jacobi_anger, ChebyshevPoly, PolyError};

/// Phase-estimation bits beyond `⌈log₂(1/φ)⌉`; seven keep a single run's
/// misclassification below 1/16.
pub const GPE_EXTRA_BITS: usize = 7;

/// Stages whose surviving probability drops below this are amplified.
pub const AMPLIFY_BELOW: f64 = 0.25;

/// Limit on the product of per-stage amplification factors.
pub const AMPLIFICATION_CAP: usize = 1 << 20;

/// Eigen-coefficients below this are treated as outside the support of `b`.
const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum VtaaError {
    #[error("phi = {0} not in (0, 1/4]")]
    Phi(f64),
    #[error("eps = {0} not in (0, 1/2)")]
    Eps(f64),
    #[error("lambda = {0} not in (0, 1]")]
    Lambda(f64),
    #[error("eigenphase {0} outside [-1, 1]")]
    Phase(f64),
    #[error("expected length {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("operator is not unitary (defect {0})")]
    NotUnitary(f64),
    #[error("block is not square and Hermitian")]
    NotHermitian,
    #[error("b lies in the kernel")]
    Singular,
    #[error("amplification needs more than {0} passes")]
    IterationCap(usize),
    #[error("Schur decomposition did not converge")]
    Schur,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Comm(#[from] CommError),
}

/// Sizes for one gapped phase estimation: `bits` of phase register per run
/// and a majority vote over `repetitions` runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpeParams {
    pub phi: f64,
    pub eps: f64,
    pub bits: usize,
    pub repetitions: usize,
    /// Bound on one run misreading a phase on either side of the gap.
    pub per_run_error: f64,
}

impl GpeParams {
    pub fn new(phi: f64, eps: f64) -> Result<Self, VtaaError> {
        if !(phi > 0.0 && phi <= 0.25) {
            return Err(VtaaError::Phi(phi));
        }
        if !(eps > 0.0 && eps < 0.5) {
            return Err(VtaaError::Eps(eps));
        }
        let bits = (1.0 / phi).log2().ceil() as usize + GPE_EXTRA_BITS;
        // Bins between a phase on either side of the gap and the 1.5φ
        // threshold, less one for rounding to the nearest bin.
        let margin = (0.5 * phi * (1u64 << bits) as f64 / (2.0 * PI)).floor() - 1.0;
        let per_run_error = 1.0 / (2.0 * (margin - 1.0));
        let target = eps * eps;
        let mut repetitions = 1;
        while majority_tail(repetitions, per_run_error) > target {
            repetitions += 2;
        }
        Ok(Self { phi, eps, bits, repetitions, per_run_error })
    }

    /// Controlled uses of the unitary across all runs.
    pub fn u_uses(&self) -> usize {
        ((1usize << self.bits) - 1) * self.repetitions
    }

    /// Phase registers of every run plus the flag.
    pub fn ancilla_qubits(&self) -> usize {
        self.bits * self.repetitions + 1
    }

    /// `(|α₀|, |α₁|)` for an eigenvector with eigenphase `phase`: flag 1
    /// means "large".
    pub fn flag_amplitudes(&self, phase: f64) -> (f64, f64) {
        let (stay, flag) = single_run(phase, self.bits, self.phi);
        let one = majority_tail(self.repetitions, flag / (stay + flag));
        let zero = majority_tail(self.repetitions, stay / (stay + flag));
        let norm = one + zero;
        ((zero / norm).sqrt(), (one / norm).sqrt())
    }
}

/// Probability that more than half of `k` independent runs err with rate `q`.
fn majority_tail(k: usize, q: f64) -> f64 {
    let q = q.clamp(0.0, 1.0);
    match Binomial::new(q, k as u64) {
        Ok(dist) => dist.sf(((k - 1) / 2) as u64),
        Err(_) => 1.0,
    }
}

/// Weights of the "small" and "large" readings of one textbook phase
/// estimation with `bits` bits, split at `|λ̂| = 1.5φ`.
fn single_run(phase: f64, bits: usize, phi: f64) -> (f64, f64) {
    let n = 1usize << bits;
    let theta = phase / (2.0 * PI);
    let mut stay = 0.0;
    let mut flag = 0.0;
    for y in 0..n {
        let mut est = y as f64 / n as f64;
        if est > 0.5 {
            est -= 1.0;
        }
        let d = theta - y as f64 / n as f64;
        let s = (PI * d).sin();
        let weight = if s.abs() < 1e-15 { 1.0 } else { ((PI * n as f64 * d).sin() / (n as f64 * s)).powi(2) };
        if (2.0 * PI * est).abs() > 1.5 * phi {
            flag += weight;
        } else {
            stay += weight;
        }
    }
    (stay, flag)
}

#[derive(Debug, Clone)]
pub struct GpeOutcome {
    /// Length `2n`: the flag-0 branch, then the flag-1 branch.
    pub state: Vector,
    pub phases: Vec<f64>,
    /// Per eigenvector, `(|α₀|, |α₁|)`.
    pub flag_amplitudes: Vec<(f64, f64)>,
    pub params: GpeParams,
    pub u_uses: usize,
    pub ancilla_qubits: usize,
}

/// Marks eigenvectors of `u` with `|λ| ≥ 2φ` by flag 1 and those with
/// `|λ| ≤ φ` by flag 0, each up to amplitude `eps`.
pub fn gapped_phase_estimation(u: &Matrix, phi: f64, eps: f64, state: &Vector) -> Result<GpeOutcome, VtaaError> {
    let params = GpeParams::new(phi, eps)?;
    let n = u.nrows();
    if !u.is_square() || state.len() != n {
        return Err(VtaaError::Dimension { expected: n, got: state.len() });
    }
    let defect = unitarity_defect(u);
    if defect > 1e-8 {
        return Err(VtaaError::NotUnitary(defect));
    }
    let schur = Schur::try_new(u.clone(), 1e-14, 1000 * n.max(1)).ok_or(VtaaError::Schur)?;
    let (q, t) = schur.unpack();
    let phases: Vec<f64> = (0..n).map(|i| t[(i, i)].arg()).collect();
    if let Some(&bad) = phases.iter().find(|p| p.abs() > 1.0 + 1e-9) {
        return Err(VtaaError::Phase(bad));
    }
    let coeffs = q.adjoint() * state;
    let amps: Vec<(f64, f64)> = phases.iter().map(|&p| params.flag_amplitudes(p)).collect();
    let zero = &q * Vector::from_fn(n, |i, _| coeffs[i] * amps[i].0);
    let one = &q * Vector::from_fn(n, |i, _| coeffs[i] * amps[i].1);
    let mut out = Vector::zeros(2 * n);
    out.rows_mut(0, n).copy_from(&zero);
    out.rows_mut(n, n).copy_from(&one);
    Ok(GpeOutcome {
        state: out,
        phases,
        flag_amplitudes: amps,
        u_uses: params.u_uses(),
        ancilla_qubits: params.ancilla_qubits(),
        params,
    })
}

#[derive(Debug, Clone)]
pub struct TruncatedInverse {
    /// Length `2n`: the flag-0 branch, then the flag-1 branch.
    pub state: Vector,
    /// The flag-1 branch is `amplitude_scale · f(A)|ψ⟩`.
    pub amplitude_scale: f64,
    /// `‖f(A)ψ − A⁺ψ‖` on the actual input.
    pub residual: f64,
    pub warning: Option<String>,
    pub uses: usize,
}

/// `W(λ, ε)`: flag 1 carries `(3λ/4)·f(A)|ψ⟩` with `f` within `eps` of `1/x`
/// on `λ ≤ |x| ≤ 1`, where `A` is the encoded block `A/α`. Thresholds above
/// 1/2 use the polynomial for 1/2, which also covers `[λ, 1]`.
pub fn truncated_inverse(
    be: &BlockEncoding,
    lambda: f64,
    eps: f64,
    state: &Vector,
) -> Result<TruncatedInverse, VtaaError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(VtaaError::Lambda(lambda));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(VtaaError::Eps(eps));
    }
    let block = hermitian_block(be)?;
    let n = block.nrows();
    if state.len() != n {
        return Err(VtaaError::Dimension { expected: n, got: state.len() });
    }
    let threshold = lambda.min(0.5);
    let scale = 0.75 * threshold;
    let poly = inverse_poly(threshold, (eps * scale).min(0.49))?;
    let (values, vectors) = hermitian_eigen(&block)?;
    let coeffs = vectors.adjoint() * state;
    let p: Vec<f64> = values.iter().map(|&x| poly.eval(x)).collect();
    let one = &vectors * Vector::from_fn(n, |i, _| coeffs[i] * p[i]);
    let zero = &vectors * Vector::from_fn(n, |i, _| coeffs[i] * (1.0 - p[i] * p[i]).max(0.0).sqrt());
    let mut out = Vector::zeros(2 * n);
    out.rows_mut(0, n).copy_from(&zero);
    out.rows_mut(n, n).copy_from(&one);
    let violated =
        values.iter().zip(coeffs.iter()).any(|(&x, z)| z.norm() > SUPPORT_TOL && x.abs() < lambda * (1.0 - 1e-12));
    let residual = vec_norm(&(one.map(|z| z / scale) - pinv(&block)? * state));
    Ok(TruncatedInverse {
        state: out,
        amplitude_scale: scale,
        residual,
        warning: violated.then(|| format!("input has weight below |x| = {lambda}; residual {residual:e}")),
        uses: poly.degree,
    })
}

fn hermitian_block(be: &BlockEncoding) -> Result<Matrix, VtaaError> {
    let block = be.block();
    if !block.is_square() || !is_hermitian(&block, 1e-9) {
        return Err(VtaaError::NotHermitian);
    }
    Ok(block)
}

/// Stage layout of the solver for a block with condition number `kappa`.
#[derive(Debug, Clone)]
pub struct VtaaConfig {
    /// Number of stages, `⌈log₂ κ⌉ + 1`.
    pub stages: usize,
    /// Threshold of stage `j` (1-based), `2⁻ʲ`.
    pub phi: Vec<f64>,
    /// Amplitude error allowed to each phase estimation.
    pub gpe_eps: f64,
    pub gpe: Vec<GpeParams>,
    /// Inverse polynomials, each rescaled to amplitude `3φ_T/(4x)`.
    pub inverses: Vec<ChebyshevPoly>,
    /// Block-encoding uses per application of `e^{iA/2}`.
    pub exp_cost: usize,
}

impl VtaaConfig {
    pub fn new(kappa: f64, eps: f64) -> Result<Self, VtaaError> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(VtaaError::Eps(eps));
        }
        let stages = (kappa.max(1.0).log2() - 1e-9).ceil().max(0.0) as usize + 1;
        let phi: Vec<f64> = (1..=stages).map(|j| 0.5f64.powi(j as i32)).collect();
        let last = phi[stages - 1];
        let gpe_eps = eps / (4.0 * stages as f64);
        // Phase estimation runs on e^{iA/2}, so thresholds halve as well.
        let gpe = phi.iter().map(|&f| GpeParams::new(f / 2.0, gpe_eps)).collect::<Result<Vec<_>, _>>()?;
        let inverses = phi
            .iter()
            .map(|&f| Ok(inverse_poly(f, 0.75 * f * eps / 4.0)?.scaled(last / f)))
            .collect::<Result<Vec<_>, VtaaError>>()?;
        let (cos_p, sin_p) = jacobi_anger(0.5, gpe_eps)?;
        Ok(Self { stages, phi, gpe_eps, gpe, inverses, exp_cost: 3 * (cos_p.degree + sin_p.degree) })
    }

    /// Block-encoding uses of one phase estimation in stage `j` (0-based).
    pub fn gpe_cost(&self, j: usize) -> usize {
        self.gpe[j].u_uses() * self.exp_cost
    }

    pub fn stage_cost(&self, j: usize) -> usize {
        self.gpe_cost(j) + self.inverses[j].degree
    }
}

/// The staged algorithm on eigen-coefficients. Index `(v·2ᵀ + clock)·2 + flag`,
/// where clock bit `j` set means the branch stopped at stage `j`.
struct Engine<'a> {
    config: &'a VtaaConfig,
    dim: usize,
    /// Per eigenvector and stage: GPE amplitudes, then the inverse value.
    gpe_amps: Vec<Vec<(f64, f64)>>,
    inverse_vals: Vec<Vec<f64>>,
    rounds: Vec<usize>,
    init: Vector,
    uses: Cell<usize>,
    /// Block-encoding uses of each stage application, in order.
    log: RefCell<Vec<usize>>,
}

impl Engine<'_> {
    fn clocks(&self) -> usize {
        1 << self.config.stages
    }

    fn index(&self, v: usize, clock: usize, flag: usize) -> usize {
        (v * self.clocks() + clock) * 2 + flag
    }

    fn charge(&self, uses: usize) {
        self.uses.set(self.uses.get() + uses);
        self.log.borrow_mut().push(uses);
    }

    /// Stage `j` phase estimation, acting only where clock bits `0..=j` are clear.
    fn gpe(&self, j: usize, x: &mut Vector, adjoint: bool) {
        let low = (1usize << (j + 1)) - 1;
        for v in 0..self.dim {
            let (a, b) = self.gpe_amps[v][j];
            let b = if adjoint { -b } else { b };
            for clock in (0..self.clocks()).filter(|s| s & low == 0) {
                let stopped = clock | (1 << j);
                for f in 0..2 {
                    let (i0, i1) = (self.index(v, clock, f), self.index(v, stopped, f));
                    let (p, q) = (x[i0], x[i1]);
                    x[i0] = p * a - q * b;
                    x[i1] = p * b + q * a;
                }
            }
        }
    }

    /// Stage `j` inverse rotation of the flag, on branches that stopped at `j`.
    fn inverse(&self, j: usize, x: &mut Vector, adjoint: bool) {
        let below = (1usize << j) - 1;
        for v in 0..self.dim {
            let p = self.inverse_vals[v][j];
            let g = (1.0 - p * p).max(0.0).sqrt();
            let p = if adjoint { -p } else { p };
            for clock in (0..self.clocks()).filter(|s| s & below == 0 && s & (1 << j) != 0) {
                let (i0, i1) = (self.index(v, clock, 0), self.index(v, clock, 1));
                let (u, w) = (x[i0], x[i1]);
                x[i0] = u * g - w * p;
                x[i1] = u * p + w * g;
            }
        }
    }

    fn stage(&self, j: usize, x: &Vector, adjoint: bool) -> Vector {
        let mut y = x.clone();
        if adjoint {
            self.inverse(j, &mut y, true);
            self.gpe(j, &mut y, true);
        } else {
            self.gpe(j, &mut y, false);
            self.inverse(j, &mut y, false);
        }
        self.charge(self.config.stage_cost(j));
        y
    }

    /// Still running, or stopped with the flag set.
    fn good(&self, i: usize) -> bool {
        let flag = i % 2;
        let clock = (i / 2) % self.clocks();
        clock == 0 || flag == 1
    }

    fn reflect_good(&self, x: &mut Vector) {
        for (i, z) in x.iter_mut().enumerate() {
            if self.good(i) {
                *z = -*z;
            }
        }
    }

    fn reflect_init(&self, x: &mut Vector) {
        let overlap = self.init.dotc(x);
        *x -= &self.init * (overlap * 2.0);
    }

    fn base(&self, j: usize, x: &Vector, adjoint: bool) -> Vector {
        if adjoint {
            self.amplified(j as isize - 1, &self.stage(j, x, true), true)
        } else {
            self.stage(j, &self.amplified(j as isize - 1, x, false), false)
        }
    }

    /// Stages `0..=j`, each followed by its amplification rounds.
    fn amplified(&self, j: isize, x: &Vector, adjoint: bool) -> Vector {
        if j < 0 {
            return x.clone();
        }
        let j = j as usize;
        let rounds = self.rounds[j];
        if !adjoint {
            let mut w = self.base(j, x, false);
            for _ in 0..rounds {
                self.reflect_good(&mut w);
                w = self.base(j, &w, true);
                self.reflect_init(&mut w);
                w = -self.base(j, &w, false);
            }
            w
        } else {
            let mut w = x.clone();
            for _ in 0..rounds {
                w = self.base(j, &w, true);
                self.reflect_init(&mut w);
                w = self.base(j, &w, false);
                self.reflect_good(&mut w);
                w = -w;
            }
            self.base(j, &w, true)
        }
    }

    fn good_probability(&self, x: &Vector) -> f64 {
        x.iter().enumerate().filter(|(i, _)| self.good(*i)).map(|(_, z)| z.norm_sqr()).sum()
    }

    /// Keeps the flag-1 part, undoes every phase estimation, and returns the
    /// clock-zero coefficients with the probability of that outcome.
    fn finish(&self, x: &Vector) -> (Vector, f64, f64) {
        let mut y = x.clone();
        for (i, z) in y.iter_mut().enumerate() {
            if i % 2 == 0 {
                *z = ZERO;
            }
        }
        let flag_prob: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        for j in (0..self.config.stages).rev() {
            self.gpe(j, &mut y, true);
        }
        let coeffs = Vector::from_fn(self.dim, |v, _| y[self.index(v, 0, 1)]);
        let clock_prob =
            if flag_prob > 0.0 { coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>() / flag_prob } else { 0.0 };
        (coeffs, flag_prob, clock_prob)
    }

    /// True if every amplitude sits on a clock with at most one bit set.
    fn clock_discipline(&self, x: &Vector) -> bool {
        x.iter().enumerate().all(|(i, z)| ((i / 2) % self.clocks()).count_ones() <= 1 || z.norm() < 1e-14)
    }
}

/// Staged solver for `|A⁻¹b⟩` with `A` the Hermitian block of `be`. Stage
/// `j` estimates whether `|λ| ≥ 2^{1−j}`; branches that stop apply the
/// truncated inverse for their threshold, and a stage is amplified when the
/// not-yet-failed weight drops below [`AMPLIFY_BELOW`]. Amplification
/// counts use the exact stage probabilities. Each stage application is
/// charged as one round trip per owner of `be`, sized by its uses.
pub fn vtaa_solve(be: &BlockEncoding, b: &Vector, eps: f64) -> Result<ProtocolOutcome, ProtocolError> {
    let block = hermitian_block(be)?;
    let n = block.nrows();
    if b.len() != n {
        return Err(VtaaError::Dimension { expected: n, got: b.len() }.into());
    }
    let b_unit = crate::protocols::unit(b, "b")?;
    let (values, vectors) = hermitian_eigen(&block)?;
    let mut coeffs = vectors.adjoint() * &b_unit;
    // Weight on the kernel never stops and is dropped with the final flag
    // anyway; removing it first keeps it out of the amplified set.
    let mut dropped = 0.0;
    for (x, z) in values.iter().zip(coeffs.iter_mut()) {
        if x.abs() <= SUPPORT_TOL {
            dropped += z.norm_sqr();
            *z = ZERO;
        }
    }
    if dropped > 1.0 - SUPPORT_TOL {
        return Err(VtaaError::Singular.into());
    }
    coeffs /= C64::from((1.0 - dropped).sqrt());
    let smallest = values.iter().map(|x| x.abs()).filter(|&x| x > SUPPORT_TOL).fold(f64::INFINITY, f64::min);
    let kappa = 1.0 / smallest.min(1.0);
    let config = VtaaConfig::new(kappa, eps)?;
    let stages = config.stages;

    let mut init = Vector::zeros(n * (1 << stages) * 2);
    for v in 0..n {
        init[(v << stages) * 2] = coeffs[v];
    }
    let mut engine = Engine {
        config: &config,
        dim: n,
        gpe_amps: values.iter().map(|&x| config.gpe.iter().map(|g| g.flag_amplitudes(x / 2.0)).collect()).collect(),
        inverse_vals: values.iter().map(|&x| config.inverses.iter().map(|p| p.eval(x)).collect()).collect(),
        rounds: Vec::new(),
        init,
        uses: Cell::new(0),
        log: RefCell::new(Vec::new()),
    };

    // Pick each stage's rounds from the exact probability after the stages before it.
    let mut passes = 1usize;
    let mut stage_probs = Vec::with_capacity(stages);
    for j in 0..stages {
        engine.rounds.push(0);
        let before = engine.base(j, &engine.init, false);
        let p = engine.good_probability(&before);
        let rounds = if p < AMPLIFY_BELOW && p > 0.0 { aa_iterations(p) } else { 0 };
        passes = passes.saturating_mul(2 * rounds + 1);
        if passes > AMPLIFICATION_CAP {
            return Err(VtaaError::IterationCap(AMPLIFICATION_CAP).into());
        }
        engine.rounds[j] = rounds;
        stage_probs.push(p);
    }
    engine.uses.set(0);
    engine.log.borrow_mut().clear();

    let last = stages as isize - 1;
    let amplified = engine.amplified(last, &engine.init, false);
    let disciplined = engine.clock_discipline(&amplified);
    let (out_coeffs, flag_prob, clock_prob) = engine.finish(&amplified);
    for j in 0..stages {
        engine.charge(config.gpe_cost(j));
    }
    let total_uses = engine.uses.get();

    // The same stages with no amplification and no registers in transit.
    let mut plain = engine.init.clone();
    for j in 0..stages {
        engine.gpe(j, &mut plain, false);
        engine.inverse(j, &mut plain, false);
    }
    let (mono_coeffs, plain_flag, _) = engine.finish(&plain);

    let owners = if be.use_cost.owners.is_empty() { vec![Party::Player(0)] } else { be.use_cost.owners.clone() };
    let width = (be.use_cost.qubits_per_use / (2 * owners.len())).max(1);
    let players = owners.iter().filter(|p| matches!(p, Party::Player(_))).count();
    let mut session = Session::new(Topology::new(TopologyKind::Coordinator, players.max(2))?);
    for &uses in engine.log.borrow().iter() {
        for &owner in &owners {
            session.send_quantum(Party::Referee, owner, uses * width)?;
            session.send_quantum(owner, Party::Referee, uses * width)?;
        }
    }

    let target = pinv(&block)? * &b_unit;
    let output = &vectors * out_coeffs;
    let mono = &vectors * mono_coeffs;
    let mut out = ProtocolOutcome::new("vtaa", TopologyKind::Coordinator, output, &target, mono, session.ledger);
    out.success_prob = plain_flag;
    out.final_success_prob = flag_prob * clock_prob;
    out.repetitions_or_iterations = 1 + engine.rounds.iter().sum::<usize>();
    out.oracle_uses = Some(total_uses);
    out.degree = config.inverses.iter().map(|p| p.degree).max();
    out.diagnostics.insert("stages".into(), stages as f64);
    out.diagnostics.insert("kappa".into(), kappa);
    out.diagnostics.insert("clock_uncompute_prob".into(), clock_prob);
    out.diagnostics.insert("clock_discipline".into(), if disciplined { 1.0 } else { 0.0 });
    for (j, (&r, &p)) in engine.rounds.iter().zip(&stage_probs).enumerate() {
        out.diagnostics.insert(format!("stage{}_rounds", j + 1), r as f64);
        out.diagnostics.insert(format!("stage{}_prob", j + 1), p);
    }
    out.warnings.push("amplification rounds use exact stage probabilities".into());
    if dropped > SUPPORT_TOL {
        out.warnings.push(format!("dropped weight {dropped:.3e} outside the range"));
    }
    out.diagnostics.insert("success_scale".into(), 1.0 - dropped);
    Ok(out)
}

/// Coordinator regression through [`vtaa_solve`]: the players' row blocks are
/// stacked and Hermitian-dilated exactly as in the fixed-threshold protocol,
/// and the referee keeps the solution register.
pub fn vtaa_regression(a_parts: &[Matrix], b_parts: &[Vector], eps: f64) -> Result<ProtocolOutcome, ProtocolError> {
    let r = a_parts.len();
    if r == 0 || b_parts.len() != r {
        return Err(ProtocolError::Precondition("need one (A_i, b_i) pair per player".into()));
    }
    let n = a_parts[0].ncols();
    if a_parts.iter().zip(b_parts).any(|(a, b)| a.ncols() != n || a.nrows() != b.len()) {
        return Err(ProtocolError::Precondition("row blocks and vector blocks disagree".into()));
    }
    let block = b_parts.iter().map(|v| v.len()).max().unwrap_or(0);
    if r * block < 2 {
        return Err(ProtocolError::Precondition("b needs at least two entries".into()));
    }
    let dim = block.max(n);
    let encodings: Vec<BlockEncoding> = a_parts
        .iter()
        .enumerate()
        .map(|(i, part)| part_encoding(part, block, dim, Party::Player(i)))
        .collect::<Result<_, _>>()?;
    let stacked = stack_lcu(&encodings)?;
    let herm = hermitian_dilation(&stacked);
    let rows = stacked.rows;
    let mut rhs = Vector::zeros(herm.rows);
    rhs.rows_mut(0, rows).copy_from(&padded_layout(b_parts, block));

    let inner = vtaa_solve(&herm, &rhs, eps)?;
    let a = vstack(a_parts);
    let b = Vector::from_iterator(a.nrows(), b_parts.iter().flat_map(|v| v.iter().copied()));
    let target = pinv(&a)? * b;
    let solution = |v: &Vector| v.rows(rows, n).into_owned();
    let mut out = ProtocolOutcome::new(
        "vtaa",
        TopologyKind::Coordinator,
        solution(&inner.output_state),
        &target,
        solution(&inner.monolithic_state),
        inner.ledger,
    );
    out.success_prob = inner.success_prob;
    out.final_success_prob = inner.final_success_prob;
    out.repetitions_or_iterations = inner.repetitions_or_iterations;
    out.oracle_uses = inner.oracle_uses;
    out.degree = inner.degree;
    out.warnings = inner.warnings;
    out.diagnostics = inner.diagnostics;
    out.diagnostics.insert("alpha".into(), stacked.alpha);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis, diag, expm_i, random_unit_vector, real_vector, unitary_dilation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gpe_bounds_on_both_sides() {
        let eps = 1e-3;
        let u = expm_i(&diag(&[0.0, 1.0, -1.0, 0.05]), 1.0).unwrap();
        let out = gapped_phase_estimation(&u, 0.25, eps, &basis(4, 0)).unwrap();
        assert!(out.flag_amplitudes[0].1 <= eps);
        assert!(out.state.rows(4, 4).norm() <= eps);
        for &(zero, _) in &out.flag_amplitudes[1..3] {
            assert!(zero <= eps);
        }
        assert!(gapped_phase_estimation(&u, 0.3, eps, &basis(4, 0)).is_err());
    }

    #[test]
    fn gpe_marginals_follow_the_eigenbasis() {
        let eps = 1e-2;
        let u = expm_i(&diag(&[0.02, 0.9]), 1.0).unwrap();
        let psi = real_vector(&[0.6, 0.8]);
        let out = gapped_phase_estimation(&u, 0.2, eps, &psi).unwrap();
        let flag1: f64 = out.state.rows(2, 2).iter().map(|z| z.norm_sqr()).sum();
        assert!((flag1 - 0.64).abs() <= 2.0 * eps, "{flag1}");
    }

    #[test]
    fn truncated_inverse_examples() {
        let be = unitary_dilation(&Matrix::identity(2, 2)).unwrap();
        let psi = real_vector(&[0.6, 0.8]);
        let w = truncated_inverse(&be, 1.0, 1e-3, &psi).unwrap();
        assert!(w.residual <= 1e-3);
        assert!(w.warning.is_none());

        let be = unitary_dilation(&diag(&[1.0, 0.5])).unwrap();
        let w = truncated_inverse(&be, 0.5, 1e-3, &basis(2, 1)).unwrap();
        let branch = w.state.rows(2, 2).map(|z| z / w.amplitude_scale);
        assert!((branch[1].re - 2.0).abs() <= 1e-3);
        let tight = truncated_inverse(&be, 0.5, 5e-4, &basis(2, 1)).unwrap();
        assert!(tight.residual <= 5e-4);

        let w = truncated_inverse(&be, 0.75, 1e-3, &basis(2, 1)).unwrap();
        assert!(w.warning.is_some());
    }

    #[test]
    fn identity_takes_one_stage() {
        let be = unitary_dilation(&Matrix::identity(4, 4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = random_unit_vector(&mut rng, 4);
        let out = vtaa_solve(&be, &b, 1e-3).unwrap();
        assert_eq!(out.diagnostics["stages"], 1.0);
        assert!(out.fidelity_to_target > 1.0 - 1e-9);
    }

    #[test]
    fn diagonal_spectrum_is_solved() {
        let eps = 1e-2;
        let be = unitary_dilation(&diag(&[1.0, 0.5, 0.25])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = random_unit_vector(&mut rng, 3);
        let out = vtaa_solve(&be, &b, eps).unwrap();
        assert!(out.fidelity_to_target >= 1.0 - eps, "{}", out.fidelity_to_target);
        assert_eq!(out.diagnostics["clock_discipline"], 1.0);
        assert!(out.monolithic_gap() < 1e-8);
        assert!(out.final_success_prob > 0.2);
    }

    #[test]
    fn negative_eigenvalues_keep_their_sign() {
        let be = unitary_dilation(&diag(&[-1.0, 0.5])).unwrap();
        let b = real_vector(&[1.0, 1.0]);
        let out = vtaa_solve(&be, &b, 1e-2).unwrap();
        assert!(out.fidelity_to_target >= 0.99);
    }
}
