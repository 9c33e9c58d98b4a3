//! The acceptance suite behind `qcomm verify` and the `acceptance` test.
//! Every check returns a verdict plus a one-line detail with the numbers it
//! compared.

use std::f64::consts::PI;
use std::fmt::Display;
use std::str::FromStr;

use qcomm::baselines::sq_rank2_demo;
use qcomm::blockenc::{hermitian_dilation, stack_lcu, sum_lcu, symmetrize, verify_block_encoding, BlockEncoding};
use qcomm::comm::Party;
use qcomm::instances::{
    bit_table_regression, coordinator_split, diagonal_regression, disjointness_regression, fourier_sampling,
    gamma_regression, hamiltonian_split, multiparty_regression, sq_counterexample, Instance, InstanceKind, SqVariant,
};
use qcomm::linalg::{
    basis, c, diag, frob_norm, op_norm, pinv, random_complex_matrix, random_hermitian, random_real_matrix,
    random_unit_vector, unitary_dilation, unitary_dilation_padded, vec_norm, Matrix,
};
use qcomm::protocols::{
    coordinator_regression, hamiltonian_sim_coordinator, hamiltonian_sim_two_party, regression_case1, regression_case3,
    Direction, Mode, Schedule,
};
use qcomm::qsvt::{
    certificate_grid, certify_inverse, inverse_error, inverse_poly, jacobi_anger, jacobi_anger_errors,
    INVERSE_DEGREE_CONSTANT,
};
use qcomm::vtaa::{gapped_phase_estimation, vtaa_regression, vtaa_solve};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{DirectionChoice, Settings};
use crate::generate::{generate, overlapping_sets};
use crate::report::rows_to_csv;
use crate::run::{run, run_outcome, ProtocolName};
use crate::CliError;

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "block-encoding"),
    (2, "success-probability"),
    (3, "amplification"),
    (4, "coordinator"),
    (5, "hamiltonian"),
    (6, "polynomials"),
    (7, "lower-bounds"),
    (8, "vtaa"),
    (9, "monolithic"),
    (10, "sq-demo"),
];

/// A deliberate defect, used to show that the suite notices it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Nudges one entry of every plain dilation before it is verified.
    PerturbedDilation,
}

impl FromStr for Fault {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Fault::None),
            "perturbed-dilation" => Ok(Fault::PerturbedDilation),
            _ => Err(CliError::Usage(format!("unknown fault {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn line(&self) -> String {
        format!("{} criterion {} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

/// Criterion ids named by `suite`: `all`, or a comma-separated list of ids
/// or names.
pub fn select(suite: &str) -> Result<Vec<u8>, CliError> {
    let suite = suite.trim();
    if suite.is_empty() {
        return Err(CliError::Usage("suite name is empty".into()));
    }
    if suite == "all" {
        return Ok(CRITERIA.iter().map(|c| c.0).collect());
    }
    let mut ids = Vec::new();
    for part in suite.split(',').map(str::trim) {
        let id = CRITERIA
            .iter()
            .find(|(id, name)| *name == part || id.to_string() == part)
            .map(|c| c.0)
            .ok_or_else(|| CliError::Usage(format!("unknown suite {part:?}")))?;
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    Ok(ids)
}

type Verdict = Result<String, String>;

fn err(e: impl Display) -> String {
    e.to_string()
}

pub fn run_check(id: u8, fault: Fault) -> Check {
    let verdict = match id {
        1 => block_encodings(fault),
        2 => success_probabilities(),
        3 => amplification_saving(),
        4 => coordinator(),
        5 => hamiltonian(),
        6 => polynomials(),
        7 => lower_bounds(),
        8 => vtaa(),
        9 => monolithic(),
        10 => sq_demo(),
        _ => Err(format!("no criterion {id}")),
    };
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
    let (passed, detail) = match verdict {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Check { id, name, passed, detail }
}

pub fn run_suite(ids: &[u8], fault: Fault) -> Vec<Check> {
    ids.iter().map(|&id| run_check(id, fault)).collect()
}

/// Fails with `detail` unless `ok`.
fn expect(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, complex: bool) -> Matrix {
    if complex {
        random_complex_matrix(rng, rows, cols)
    } else {
        random_real_matrix(rng, rows, cols)
    }
}

fn block_encodings(fault: Fault) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let dilate = |a: &Matrix, dim: usize| -> Result<BlockEncoding, String> {
        let mut be = unitary_dilation_padded(a, dim).map_err(err)?;
        if fault == Fault::PerturbedDilation {
            be.unitary[(0, 0)] += c(1e-6);
        }
        Ok(be)
    };
    let residual = |be: &BlockEncoding, target: &Matrix, what: &str| -> Result<f64, String> {
        verify_block_encoding(be, target).map_err(|e| format!("{what}: {e}"))
    };
    let mut worst = 0.0f64;
    let mut law_breaks = 0;
    for k in 0..50 {
        let rows = rng.gen_range(1..=16);
        let cols = rng.gen_range(1..=16);
        let a = random_matrix(&mut rng, rows, cols, k % 2 == 0);
        let dim = rows.max(cols);
        let plain = dilate(&a, dim)?;
        worst = worst.max(residual(&plain, &a, "unitary_dilation")?);
        worst = worst.max(residual(&hermitian_dilation(&plain), &symmetrize(&a), "hermitian_dilation")?);

        // Stacking needs equal-shaped parts, so odd row counts get one extra
        // random row.
        let tall = if rows % 2 == 0 {
            a.clone()
        } else {
            let extra = random_matrix(&mut rng, 1, cols, true);
            Matrix::from_fn(rows + 1, cols, |i, j| if i < rows { a[(i, j)] } else { extra[(0, j)] })
        };
        {
            let half = tall.nrows() / 2;
            let parts = [tall.rows(0, half).into_owned(), tall.rows(half, half).into_owned()];
            let width = half.max(cols);
            let encs = parts.iter().map(|p| dilate(p, width)).collect::<Result<Vec<_>, _>>()?;
            let stacked = stack_lcu(&encs).map_err(err)?;
            worst = worst.max(residual(&stacked, &tall, "stack_lcu")?);
            if stacked.alpha != encs.iter().map(|e| e.alpha * e.alpha).sum::<f64>().sqrt() {
                law_breaks += 1;
            }
        }

        let first = random_matrix(&mut rng, rows, cols, true);
        let second = &a - &first;
        let encs = [dilate(&first, dim)?, dilate(&second, dim)?];
        let summed = sum_lcu(&encs).map_err(err)?;
        worst = worst.max(residual(&summed, &a, "sum_lcu")?);
        if summed.alpha != encs[0].alpha + encs[1].alpha {
            law_breaks += 1;
        }
    }
    expect(
        worst <= 1e-9 && law_breaks == 0,
        format!("worst residual {worst:.2e} over 50 matrices, {law_breaks} alpha-law mismatches"),
    )
}

fn success_probabilities() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let m = rng.gen_range(2..=32);
        let n = rng.gen_range(1..=32);
        let a = random_matrix(&mut rng, m, n, k % 2 == 1);
        let b = random_unit_vector(&mut rng, m);
        let p = pinv(&a).map_err(err)?;
        let x2 = vec_norm(&(&p * &b)).powi(2);
        let case1 = x2 / op_norm(&p).map_err(err)?.powi(2);
        let case2 = x2 / frob_norm(&p).powi(2);
        let c1 = regression_case1(&a, &b, Mode::Postselect).map_err(err)?;
        let c2 = qcomm::protocols::regression_case2(&a, &b, Mode::Postselect).map_err(err)?;
        worst = worst.max((c1.success_prob - case1).abs()).max((c2.success_prob - case2).abs());
    }
    let b = (basis(2, 0) + basis(2, 1)) / c(2f64.sqrt());
    let hand = regression_case1(&diag(&[1.0, 0.5]), &b, Mode::Postselect).map_err(err)?.success_prob;
    expect(
        worst <= 1e-9 && (hand - 0.625).abs() <= 1e-12,
        format!("worst deviation {worst:.2e} over 100 instances; hand case {hand}"),
    )
}

fn amplification_saving() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for inv_p in [16.0, 64.0, 256.0f64] {
        let mut spectrum = vec![1.0 / inv_p.sqrt(); 32];
        spectrum[0] = 1.0;
        let a = diag(&spectrum);
        let b = basis(32, 0);
        let c3 = regression_case3(&a, &b, Schedule::KnownProbability).map_err(err)?;
        let uses = c3.oracle_uses.unwrap_or(0);
        let ideal = (PI / (4.0 / inv_p.sqrt())).ceil() as usize;
        ok &= 2 * uses >= ideal && uses <= 2 * ideal && (c3.success_prob - 1.0 / inv_p).abs() <= 1e-12;
        notes.push(format!("p=1/{inv_p}: {uses} uses vs {ideal}"));
        if inv_p == 64.0 {
            let c1 = regression_case1(&a, &b, Mode::Repeat).map_err(err)?;
            let (q3, q1) = (c3.ledger.totals().qubits_sent, c1.ledger.totals().qubits_sent);
            ok &= 4 * q3 <= q1;
            notes.push(format!("qubits {q3} vs repeat {q1}"));
        }
    }
    expect(ok, notes.join("; "))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fitted_exponent(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

fn coordinator() -> Verdict {
    const SEEDS: u64 = 8;
    let kappas = [2.0, 4.0, 8.0];
    let eps = 1e-3;
    let mut worst_fidelity = 1.0f64;
    let mut worst_margin = f64::INFINITY;
    let mut worst_growth = 0.0f64;
    // One attempt before amplification, reported for context only.
    let mut worst_attempt_growth = 0.0f64;
    for r in [2usize, 4] {
        let mut totals = Vec::new();
        let mut attempts = Vec::new();
        for &kappa in &kappas {
            let mut sum = 0usize;
            let mut attempt = 0.0;
            for seed in 0..SEEDS {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let inst = coordinator_split(&mut rng, 8, r, kappa).map_err(err)?;
                let out = coordinator_regression(&inst.a_parts, &inst.b_parts, None, eps).map_err(err)?;
                let d = &out.diagnostics;
                let bound = 0.1 * (d["delta"] * d["gamma"] / d["op_norm"]).powi(2);
                worst_fidelity = worst_fidelity.min(out.fidelity_to_target);
                worst_margin = worst_margin.min(out.success_prob / bound);
                sum += out.ledger.totals().qubits_sent;
                // `iterations` counts the initial attempt plus each amplification step.
                attempt += out.ledger.totals().qubits_sent as f64 / (2 * out.repetitions_or_iterations - 1) as f64;
            }
            totals.push(sum as f64 / SEEDS as f64);
            attempts.push(attempt / SEEDS as f64);
        }
        for w in totals.windows(2) {
            worst_growth = worst_growth.max(w[1] / w[0]);
        }
        for w in attempts.windows(2) {
            worst_attempt_growth = worst_attempt_growth.max(w[1] / w[0]);
        }
    }
    expect(
        worst_fidelity >= 0.999 && worst_margin >= 1.0 && worst_growth <= 2.5,
        format!(
            "min fidelity {worst_fidelity:.6}, min p/bound {worst_margin:.2}, max qubit growth per kappa doubling {worst_growth:.3} (single attempt {worst_attempt_growth:.3})"
        ),
    )
}

fn ceil_log2(n: usize) -> usize {
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

fn hamiltonian() -> Verdict {
    let eps = 1e-4;
    let mut worst_fidelity = 1.0f64;
    for (seed, t) in [(0u64, 2.0), (1, -2.0), (2, 1.0), (3, 4.0)] {
        // |t|·Σ‖Hᵢ‖ = 4 in every case.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = hamiltonian_split(&mut rng, 8, 2, t, 4.0 / t.abs()).map_err(err)?;
        let out = hamiltonian_sim_coordinator(&inst.a_parts, &inst.b(), t, eps).map_err(err)?;
        worst_fidelity = worst_fidelity.min(out.fidelity_to_target);
    }
    let mut worst_series = 0.0f64;
    for t in [0.5, 1.0, 4.0, 16.0] {
        for tol in [1e-2, 1e-4, 1e-8] {
            let (cos_p, sin_p) = jacobi_anger(t, tol).map_err(err)?;
            let (ce, se) = jacobi_anger_errors(&cos_p, &sin_p, t);
            worst_series = worst_series.max(ce.max(se) / tol);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ledger_misses = Vec::new();
    for n in [2usize, 3, 4, 5, 8, 13, 16] {
        let h = random_hermitian(&mut rng, n);
        let psi = random_unit_vector(&mut rng, n);
        let out = hamiltonian_sim_two_party(&h, &psi, 1.0, Direction::BobToAlice, Mode::Postselect).map_err(err)?;
        let totals = out.ledger.totals();
        if totals.qubits_sent != ceil_log2(n)
            || totals.bits_sent != 0
            || out.ledger.has_direction(Party::Alice, Party::Bob)
        {
            ledger_misses.push(format!("n={n}: {} qubits", totals.qubits_sent));
        }
    }
    expect(
        worst_fidelity >= 1.0 - eps && worst_series <= 1.0 && ledger_misses.is_empty(),
        format!(
            "coordinator min fidelity {worst_fidelity:.8}; worst series error/eps {worst_series:.3}; ledger misses {ledger_misses:?}"
        ),
    )
}

fn polynomials() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for delta in [0.25, 0.125] {
        for eps in [1e-2, 1e-4] {
            let poly = inverse_poly(delta, eps).map_err(err)?;
            let certified = certify_inverse(&poly, delta, eps).is_ok();
            let sup = certificate_grid().into_iter().map(|x| poly.eval(x).abs()).fold(0.0, f64::max);
            let error = inverse_error(&poly, delta);
            let bound = INVERSE_DEGREE_CONSTANT / delta * (1.0 / eps).ln();
            ok &= certified && sup <= 1.0 + 1e-9 && error <= eps && poly.degree as f64 <= bound;
            notes.push(format!("({delta}, {eps:e}): degree {} <= {bound:.0}, error {error:.1e}", poly.degree));
        }
    }
    expect(ok, notes.join("; "))
}

fn event_mass(inst: &Instance) -> f64 {
    inst.metadata.event_indices.iter().map(|&i| inst.metadata.expected_distribution[i]).sum()
}

/// Every `(S, T)` over `[0, l)` with exactly one common element.
fn single_overlap_pairs(l: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for w in 0..l {
        let others: Vec<usize> = (0..l).filter(|&i| i != w).collect();
        for code in 0..3usize.pow(others.len() as u32) {
            let (mut s, mut t) = (vec![w], vec![w]);
            let mut rest = code;
            for &i in &others {
                match rest % 3 {
                    1 => s.push(i),
                    2 => t.push(i),
                    _ => {}
                }
                rest /= 3;
            }
            s.sort_unstable();
            t.sort_unstable();
            out.push((s, t));
        }
    }
    out
}

fn lower_bounds() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;

    let mut worst = 1.0f64;
    let mut cases = 0usize;
    for l in 2..=12 {
        for (s, t) in single_overlap_pairs(l) {
            if s.len() == l || t.len() == l {
                continue;
            }
            let inst = disjointness_regression(&s, &t, l, l, None).map_err(err)?;
            worst = worst.min(event_mass(&inst));
            cases += 1;
        }
    }
    let hand = event_mass(&disjointness_regression(&[0, 1], &[1, 2], 4, 4, None).map_err(err)?);
    ok &= worst >= 0.5 && (hand - 0.64).abs() <= 1e-12;
    notes.push(format!("disjointness min mass {worst:.4} over {cases} pairs, hand case {hand:.6}"));

    let mut gamma_dev = 0.0f64;
    for n in 1..=8 {
        for (s, t) in single_overlap_pairs(n) {
            let inst = gamma_regression(&s, &t, n).map_err(err)?;
            gamma_dev = gamma_dev.max((event_mass(&inst) - 0.5).abs());
        }
    }
    ok &= gamma_dev <= 1e-12;
    notes.push(format!("gamma P(w) off 1/2 by {gamma_dev:.1e}"));

    // The construction commutes with relabelling, so the mass depends only
    // on the set sizes; every size pair is covered, plus random relabellings.
    let n = 16;
    let mut worst_multi = 1.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for a in 1..=n {
        for b in 1..=(n + 1 - a) {
            let mut labels: Vec<usize> = (0..n).collect();
            for relabel in [false, true] {
                if relabel {
                    labels.shuffle(&mut rng);
                }
                let s: Vec<usize> = (0..a).map(|i| labels[i]).collect();
                let t: Vec<usize> = std::iter::once(0).chain(a..a + b - 1).map(|i| labels[i]).collect();
                let inst = multiparty_regression(&[s, t], n, None).map_err(err)?;
                worst_multi = worst_multi.min(event_mass(&inst));
            }
        }
    }
    ok &= worst_multi >= 1.0 / 3.0;
    notes.push(format!("multiparty min mass {worst_multi:.4}"));

    let (mismatches, matrices) = index_verdicts()?;
    ok &= mismatches == 0;
    notes.push(format!("index verdict mismatches {mismatches} over {matrices} balanced matrices"));

    let fourier = fourier_deviation()?;
    ok &= fourier <= 1e-10;
    notes.push(format!("fourier deviation {fourier:.1e}"));
    expect(ok, notes.join("; "))
}

/// Index instances over every 4×4 bit matrix with two ones in each row and
/// column, at every `(i, j)`.
fn index_verdicts() -> Result<(usize, usize), String> {
    let rows: Vec<[bool; 4]> =
        (0u8..16).filter(|m| m.count_ones() == 2).map(|m| [m & 1 != 0, m & 2 != 0, m & 4 != 0, m & 8 != 0]).collect();
    let mut mismatches = 0;
    let mut matrices = 0;
    for a in &rows {
        for b in &rows {
            for c in &rows {
                for d in &rows {
                    let bits = [a, b, c, d];
                    if (0..4).any(|k| bits.iter().filter(|r| r[k]).count() != 2) {
                        continue;
                    }
                    matrices += 1;
                    let bits: Vec<Vec<bool>> = bits.iter().map(|r| r.to_vec()).collect();
                    for i in 0..4 {
                        for j in 0..4 {
                            let inst = bit_table_regression(&bits, i, j).map_err(err)?;
                            if (event_mass(&inst) >= 0.5) != bits[i][j] {
                                mismatches += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((mismatches, matrices))
}

/// Squared Walsh coefficients of `f·g`, summed directly.
fn brute_force_fourier(f: &[i8], g: &[i8]) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|s| {
            let total: i64 = (0..n)
                .map(|x| {
                    let sign = if (s & x).count_ones() % 2 == 0 { 1 } else { -1 };
                    sign * (f[x] * g[x]) as i64
                })
                .sum();
            (total as f64 / n as f64).powi(2)
        })
        .collect()
}

fn fourier_deviation() -> Result<f64, String> {
    let table =
        |len: usize, code: u64| -> Vec<i8> { (0..len).map(|k| if code >> k & 1 == 1 { -1 } else { 1 }).collect() };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for d in 1..=4 {
        let len = 1usize << d;
        let pairs: Vec<(u64, u64)> = if d <= 2 {
            let all = 1u64 << len;
            (0..all).flat_map(|f| (0..all).map(move |g| (f, g))).collect()
        } else {
            (0..300).map(|_| (rng.gen_range(0..1u64 << len), rng.gen_range(0..1u64 << len))).collect()
        };
        for (fc, gc) in pairs {
            let (f, g) = (table(len, fc), table(len, gc));
            let inst = fourier_sampling(&f, &g).map_err(err)?;
            let expected = brute_force_fourier(&f, &g);
            for (x, y) in inst.metadata.expected_distribution.iter().zip(&expected) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Ok(worst)
}

/// `V·diag(e^{iλ})·V†` for a random unitary `V`.
fn unitary_with_phases(rng: &mut ChaCha8Rng, phases: &[f64]) -> Matrix {
    let dim = phases.len();
    let v = qcomm::linalg::completion_with_first_column(&random_unit_vector(rng, dim));
    let mut d = Matrix::zeros(dim, dim);
    for (k, &p) in phases.iter().enumerate() {
        d[(k, k)] = qcomm::linalg::C64::from_polar(1.0, p);
    }
    &v * d * v.adjoint()
}

fn vtaa() -> Verdict {
    let mut notes = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let grid: Vec<f64> = (0..=64).map(|k| -1.0 + k as f64 / 32.0).collect();
    let mut violations = 0;
    for (phi, tol) in [(0.25, 1e-2), (0.125, 1e-3)] {
        for chunk in grid.chunks(16) {
            let u = unitary_with_phases(&mut rng, chunk);
            let state = random_unit_vector(&mut rng, chunk.len());
            let out = gapped_phase_estimation(&u, phi, tol, &state).map_err(err)?;
            for (&phase, &(zero, one)) in out.phases.iter().zip(&out.flag_amplitudes) {
                if (phase.abs() >= 2.0 * phi && zero > tol) || (phase.abs() <= phi && one > tol) {
                    violations += 1;
                }
            }
        }
    }
    notes.push(format!("GPE bound violations {violations}"));

    let be = unitary_dilation(&diag(&[1.0, 0.5, 0.25])).map_err(err)?;
    let mut worst_gap = f64::NEG_INFINITY;
    for eps in [1e-2, 1e-3] {
        for _ in 0..3 {
            let b = random_unit_vector(&mut rng, 3);
            let out = vtaa_solve(&be, &b, eps).map_err(err)?;
            worst_gap = worst_gap.max((1.0 - out.fidelity_to_target) / eps);
        }
    }
    notes.push(format!("worst infidelity/eps {worst_gap:.3}"));

    // b sits on the best-conditioned direction, where a fixed threshold
    // wastes the most work.
    let kappas = [2.0, 4.0, 8.0f64];
    let eps = 1e-3;
    let (mut with, mut without) = (Vec::new(), Vec::new());
    for &kappa in &kappas {
        let spectrum: Vec<f64> = (0..8).map(|i| kappa.powf(-(i as f64) / 7.0)).collect();
        let inst = diagonal_regression(&spectrum, basis(8, 0)).map_err(err)?;
        let v = vtaa_regression(&inst.a_parts, &inst.b_parts, eps).map_err(err)?;
        let plain = coordinator_regression(&inst.a_parts, &inst.b_parts, None, eps).map_err(err)?;
        with.push(v.ledger.totals().qubits_sent as f64);
        without.push(plain.ledger.totals().qubits_sent as f64);
    }
    let (ev, ep) = (fitted_exponent(&kappas, &with), fitted_exponent(&kappas, &without));
    notes.push(format!("ledger exponent {ev:.3} with vtaa, {ep:.3} without"));
    expect(violations == 0 && worst_gap <= 1.0 && ev <= 1.5 && ep >= 1.7, notes.join("; "))
}

fn monolithic() -> Verdict {
    let base = Settings::default();
    let two_way = Settings { direction: DirectionChoice::TwoWay, ..base.clone() };
    let alice = Settings { direction: DirectionChoice::AliceToBob, ..base.clone() };
    let oblivious = Settings { oblivious: true, seed: 5, ..base.clone() };
    let repeat = Settings { repeat: true, ..base.clone() };
    let loose = Settings { eps: 1e-2, ..base.clone() };
    let runs: Vec<(ProtocolName, InstanceKind, &Settings)> = vec![
        (ProtocolName::Case1, InstanceKind::Regression, &base),
        (ProtocolName::Case1, InstanceKind::Regression, &repeat),
        (ProtocolName::Case2, InstanceKind::Regression, &base),
        (ProtocolName::Case3, InstanceKind::Regression, &base),
        (ProtocolName::Case3, InstanceKind::Regression, &oblivious),
        (ProtocolName::Coord, InstanceKind::CoordinatorSplit, &base),
        (ProtocolName::CoordSum, InstanceKind::SumSplit, &base),
        (ProtocolName::Hsim2, InstanceKind::HadamardHamiltonian, &base),
        (ProtocolName::Hsim2, InstanceKind::HadamardHamiltonian, &alice),
        (ProtocolName::Hsim2, InstanceKind::HadamardHamiltonian, &two_way),
        (ProtocolName::HsimCoord, InstanceKind::HamiltonianSplit, &base),
        (ProtocolName::Vtaa, InstanceKind::CoordinatorSplit, &loose),
        (ProtocolName::ClassicalNaive, InstanceKind::Regression, &base),
        (ProtocolName::ClassicalNaive, InstanceKind::Regression, &alice),
    ];
    let mut worst = 0.0f64;
    let mut differing = Vec::new();
    for (protocol, kind, s) in runs {
        let inst = generate(kind, s).map_err(err)?;
        let out = run_outcome(protocol, &inst, s).map_err(err)?;
        worst = worst.max(out.monolithic_gap());
        let first = rows_to_csv(&[run(protocol, &inst, s).map_err(err)?]).map_err(err)?;
        let again = rows_to_csv(&[run(protocol, &generate(kind, s).map_err(err)?, s).map_err(err)?]).map_err(err)?;
        if first != again {
            differing.push(protocol.name());
        }
    }
    let sq = generate(InstanceKind::SqCounterexample, &base).map_err(err)?;
    let sq_rows =
        [run(ProtocolName::SqDemo, &sq, &base).map_err(err)?, run(ProtocolName::SqDemo, &sq, &base).map_err(err)?];
    if sq_rows[0] != sq_rows[1] {
        differing.push(ProtocolName::SqDemo.name());
    }
    expect(
        worst <= 1e-8 && differing.is_empty(),
        format!("worst monolithic gap {worst:.1e}; rows differing on replay {differing:?}"),
    )
}

fn sq_demo() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in [8usize, 16] {
        let (mut worst_product, mut gamma_range) = (0.0f64, (f64::INFINITY, 0.0f64));
        for overlap in [0usize, 0, 0, 1, 2] {
            let sets = overlapping_sets(&mut rng, n, 2, overlap).map_err(err)?;
            let bits = |set: &[usize]| -> Vec<bool> { (0..n).map(|i| set.contains(&i)).collect() };
            let inst = sq_counterexample(&bits(&sets[0]), &bits(&sets[1]), SqVariant::SmallOverlap).map_err(err)?;
            worst_product = worst_product.max((inst.metadata.notes["frob_times_pinv"] - 2f64.sqrt()).abs());
            if overlap == 0 {
                let g = inst.metadata.gamma * n as f64;
                gamma_range = (gamma_range.0.min(g), gamma_range.1.max(g));
            }
        }
        ok &= worst_product <= 1e-9 && gamma_range.0 >= 0.5 && gamma_range.1 <= 2.0;
        notes.push(format!(
            "n={n}: |product - sqrt2| {worst_product:.1e}, disjoint n*gamma in [{:.4}, {:.4}]",
            gamma_range.0, gamma_range.1
        ));
    }

    let n = 8;
    let mut mismatches = 0;
    let mut pairs = 0;
    let mut draw_rng = ChaCha8Rng::seed_from_u64(12);
    for variant in [SqVariant::Scaled, SqVariant::SmallOverlap] {
        for a in 1u32..(1 << n) {
            for b in 1u32..(1 << n) {
                let bits = |code: u32| -> Vec<bool> { (0..n).map(|i| code >> i & 1 == 1).collect() };
                let inst = sq_counterexample(&bits(a), &bits(b), variant).map_err(err)?;
                let report = sq_rank2_demo(&inst, None, &mut draw_rng).map_err(err)?;
                let truth = a & b != 0;
                if report.verdict_intersecting != truth || !report.matches_ground_truth() {
                    mismatches += 1;
                }
                pairs += 1;
            }
        }
    }
    ok &= mismatches == 0;
    notes.push(format!("{mismatches} verdict mismatches over {pairs} pairs"));
    expect(ok, notes.join("; "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_selection() {
        assert_eq!(select("all").unwrap().len(), 10);
        assert_eq!(select("1,vtaa,1").unwrap(), vec![1, 8]);
        assert!(select("").is_err());
        assert!(select("  ").is_err());
        assert!(select("everything").is_err());
    }

    #[test]
    fn exponent_of_a_power_law() {
        let xs = [2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(1.25)).collect();
        assert!((fitted_exponent(&xs, &ys) - 1.25).abs() < 1e-12);
    }

    #[test]
    fn single_overlap_pairs_are_complete() {
        let pairs = single_overlap_pairs(3);
        assert_eq!(pairs.len(), 3 * 9);
        assert!(pairs.iter().all(|(s, t)| s.iter().filter(|i| t.contains(i)).count() == 1));
    }

    #[test]
    fn injected_fault_only_breaks_its_criterion() {
        let check = run_check(1, Fault::PerturbedDilation);
        assert!(!check.passed, "{}", check.detail);
        let clean = run_check(1, Fault::None);
        assert!(clean.passed, "{}", clean.detail);
    }
}
