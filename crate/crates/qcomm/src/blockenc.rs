//! Block-encodings and the two LCU combiners.
//!
//! A [`BlockEncoding`] stores the full unitary together with the shape of
//! the encoded block, which always sits in the top-left corner:
//! `A/α = U[0..rows, 0..cols]`. For `stack_lcu` the output basis is
//! relabelled so that the stacked rows come first; the register order before
//! that relabelling is (selector, ancilla, data).

use thiserror::Error;

use crate::comm::Party;
use crate::linalg::{self, c, completion_with_first_column, op_norm, qubits_for, LinalgError, Matrix, Vector};

/// αᵢ given to zero blocks that pad the selector to a power of two.
pub const PAD_ALPHA: f64 = 1e-30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlockEncError {
    #[error("no encodings supplied")]
    Empty,
    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Communication charged each time a block-encoding is applied.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UseCost {
    pub qubits_per_use: usize,
    pub owners: Vec<Party>,
}

impl UseCost {
    /// One shuttle out and back of a `width`-qubit register.
    pub fn round_trip(width: usize) -> Self {
        Self { qubits_per_use: 2 * width, owners: Vec::new() }
    }

    pub fn scaled(&self, factor: usize) -> Self {
        Self { qubits_per_use: self.qubits_per_use * factor, owners: self.owners.clone() }
    }
}

#[derive(Debug, Clone)]
pub struct BlockEncoding {
    pub unitary: Matrix,
    pub rows: usize,
    pub cols: usize,
    pub alpha: f64,
    pub ancilla_qubits: usize,
    pub error: f64,
    pub use_cost: UseCost,
}

impl BlockEncoding {
    /// `U[0..rows, 0..cols]`, i.e. `A/α`.
    pub fn block(&self) -> Matrix {
        self.unitary.view((0, 0), (self.rows, self.cols)).into_owned()
    }

    /// `α · U[0..rows, 0..cols]`.
    pub fn encoded(&self) -> Matrix {
        self.block() * c(self.alpha)
    }

    pub fn dim(&self) -> usize {
        self.unitary.nrows()
    }

    pub fn register_qubits(&self) -> usize {
        qubits_for(self.dim())
    }

    pub fn with_owner(mut self, owner: Party) -> Self {
        self.use_cost.owners = vec![owner];
        self
    }
}

/// `‖target − α·(⟨0|⊗I)U(|0⟩⊗I)‖` in operator norm.
pub fn verify_block_encoding(be: &BlockEncoding, target: &Matrix) -> Result<f64, BlockEncError> {
    if target.shape() != (be.rows, be.cols) {
        return Err(BlockEncError::Shape(format!("target {:?} vs encoded {:?}", target.shape(), (be.rows, be.cols))));
    }
    let diff = target - be.encoded();
    if linalg::frob_norm(&diff) == 0.0 {
        return Ok(0.0);
    }
    Ok(op_norm(&diff)?)
}

fn check_family(encodings: &[BlockEncoding]) -> Result<(), BlockEncError> {
    let first = encodings.first().ok_or(BlockEncError::Empty)?;
    for be in encodings {
        if !(be.alpha > 0.0) {
            return Err(BlockEncError::NonPositiveAlpha(be.alpha));
        }
        if be.dim() != first.dim()
            || be.rows != first.rows
            || be.cols != first.cols
            || be.ancilla_qubits != first.ancilla_qubits
        {
            return Err(BlockEncError::Shape(format!(
                "encodings differ: {}x{} in dim {} vs {}x{} in dim {}",
                be.rows,
                be.cols,
                be.dim(),
                first.rows,
                first.cols,
                first.dim()
            )));
        }
    }
    Ok(())
}

/// Unitary with a zero top-left block: `X` on the leading ancilla qubit.
fn zero_block_unitary(dim: usize) -> Matrix {
    let half = dim / 2;
    Matrix::from_fn(dim, dim, |i, j| if (i + half) % dim == j { linalg::ONE } else { linalg::ZERO })
}

/// Encoding of a `rows × cols` zero block with one ancilla and data
/// dimension `dim`. α is [`PAD_ALPHA`] so LCU weights stay well defined.
pub fn zero_encoding(rows: usize, cols: usize, dim: usize) -> BlockEncoding {
    BlockEncoding {
        unitary: zero_block_unitary(2 * dim),
        rows,
        cols,
        alpha: PAD_ALPHA,
        ancilla_qubits: 1,
        error: 0.0,
        use_cost: UseCost::round_trip(qubits_for(dim) + 1),
    }
}

/// Pads the family to a power-of-two count; returns unitaries and weights.
fn padded_family(encodings: &[BlockEncoding]) -> (Vec<Matrix>, Vec<f64>) {
    let r = encodings.len();
    let padded = r.next_power_of_two();
    let dim = encodings[0].dim();
    let mut unitaries: Vec<Matrix> = encodings.iter().map(|be| be.unitary.clone()).collect();
    let mut alphas: Vec<f64> = encodings.iter().map(|be| be.alpha).collect();
    for _ in r..padded {
        unitaries.push(zero_block_unitary(dim));
        alphas.push(PAD_ALPHA);
    }
    (unitaries, alphas)
}

/// `Σ|i⟩⟨i| ⊗ Uᵢ`.
fn select(unitaries: &[Matrix]) -> Matrix {
    let dim = unitaries[0].nrows();
    let total = dim * unitaries.len();
    let mut out = Matrix::zeros(total, total);
    for (i, u) in unitaries.iter().enumerate() {
        out.view_mut((i * dim, i * dim), (dim, dim)).copy_from(u);
    }
    out
}

fn combined_cost(encodings: &[BlockEncoding], width: usize) -> UseCost {
    UseCost {
        qubits_per_use: 2 * encodings.len() * width,
        owners: encodings.iter().flat_map(|be| be.use_cost.owners.clone()).collect(),
    }
}

/// Row-stacked LCU: encodes `[A₀; A₁; …]` with `α = √(Σαᵢ²)`.
pub fn stack_lcu(encodings: &[BlockEncoding]) -> Result<BlockEncoding, BlockEncError> {
    check_family(encodings)?;
    if encodings.len() == 1 {
        return Ok(encodings[0].clone());
    }
    let r = encodings.len();
    let (unitaries, alphas) = padded_family(encodings);
    let sel_dim = unitaries.len();
    let dim = encodings[0].dim();
    let q = encodings[0].ancilla_qubits;
    let anc_dim = 1usize << q;
    let data_dim = dim / anc_dim;
    let alpha = encodings.iter().map(|be| be.alpha * be.alpha).sum::<f64>().sqrt();

    let weights = Vector::from_iterator(sel_dim, alphas.iter().map(|&a| c(a / alpha)));
    let v = completion_with_first_column(&weights);
    let prep = linalg::kron(&v, &Matrix::identity(dim, dim));
    let body = select(&unitaries) * prep;

    // Output labels: (ancilla, selector, data) after the swap, then the
    // stacked rows (ancilla 0, real selector, data < rows) moved to the front.
    let rows = encodings[0].rows;
    let total = sel_dim * dim;
    let mut order: Vec<usize> = Vec::with_capacity(total);
    let in_index = |s: usize, a: usize, x: usize| s * dim + a * data_dim + x;
    for s in 0..r {
        for x in 0..rows {
            order.push(in_index(s, 0, x));
        }
    }
    let mut taken = vec![false; total];
    for &i in &order {
        taken[i] = true;
    }
    for a in 0..anc_dim {
        for s in 0..sel_dim {
            for x in 0..data_dim {
                let i = in_index(s, a, x);
                if !taken[i] {
                    order.push(i);
                    taken[i] = true;
                }
            }
        }
    }
    let unitary = Matrix::from_fn(total, total, |i, j| body[(order[i], j)]);

    Ok(BlockEncoding {
        unitary,
        rows: r * rows,
        cols: encodings[0].cols,
        alpha,
        ancilla_qubits: q + qubits_for(sel_dim),
        error: encodings.iter().map(|be| be.error).fold(0.0, f64::max),
        use_cost: combined_cost(encodings, qubits_for(total)),
    })
}

/// Summed LCU: encodes `A₀ + A₁ + …` with `α = Σαᵢ`.
pub fn sum_lcu(encodings: &[BlockEncoding]) -> Result<BlockEncoding, BlockEncError> {
    check_family(encodings)?;
    if encodings.len() == 1 {
        return Ok(encodings[0].clone());
    }
    let (unitaries, alphas) = padded_family(encodings);
    let sel_dim = unitaries.len();
    let dim = encodings[0].dim();
    let alpha: f64 = encodings.iter().map(|be| be.alpha).sum();
    let weights = Vector::from_iterator(sel_dim, alphas.iter().map(|&a| c((a / alpha).sqrt())));
    let v = completion_with_first_column(&weights);
    let prep = linalg::kron(&v, &Matrix::identity(dim, dim));
    let unitary = prep.adjoint() * select(&unitaries) * &prep;
    let total = sel_dim * dim;
    Ok(BlockEncoding {
        unitary,
        rows: encodings[0].rows,
        cols: encodings[0].cols,
        alpha,
        ancilla_qubits: encodings[0].ancilla_qubits + qubits_for(sel_dim),
        error: encodings.iter().map(|be| be.error).sum(),
        use_cost: combined_cost(encodings, qubits_for(total)),
    })
}

/// Encodes `[[0, A], [A†, 0]]` from an encoding of `A`, same α.
pub fn hermitian_dilation(be: &BlockEncoding) -> BlockEncoding {
    let dim = be.dim();
    let total = 2 * dim;
    let mut full = Matrix::zeros(total, total);
    full.view_mut((0, dim), (dim, dim)).copy_from(&be.unitary);
    full.view_mut((dim, 0), (dim, dim)).copy_from(&be.unitary.adjoint());

    let mut order: Vec<usize> = (0..be.rows).chain((0..be.cols).map(|j| dim + j)).collect();
    let mut taken = vec![false; total];
    for &i in &order {
        taken[i] = true;
    }
    order.extend((0..total).filter(|&i| !taken[i]));
    let unitary = Matrix::from_fn(total, total, |i, j| full[(order[i], order[j])]);
    let n = be.rows + be.cols;
    BlockEncoding {
        unitary,
        rows: n,
        cols: n,
        alpha: be.alpha,
        ancilla_qubits: be.ancilla_qubits + 1,
        error: be.error,
        use_cost: be.use_cost.scaled(2),
    }
}

/// `[[0, A], [A†, 0]]`.
pub fn symmetrize(a: &Matrix) -> Matrix {
    let (m, n) = a.shape();
    let mut out = Matrix::zeros(m + n, m + n);
    out.view_mut((0, m), (m, n)).copy_from(a);
    out.view_mut((m, 0), (n, m)).copy_from(&a.adjoint());
    out
}

pub fn vstack(blocks: &[Matrix]) -> Matrix {
    let cols = blocks[0].ncols();
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = Matrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, 0), b.shape()).copy_from(b);
        at += b.nrows();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{
        diag, frob_norm, random_complex_matrix, random_hermitian, real_matrix, unitarity_defect, unitary_dilation,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_encoding_has_zero_residual() {
        let be = BlockEncoding {
            unitary: Matrix::identity(2, 2),
            rows: 2,
            cols: 2,
            alpha: 1.0,
            ancilla_qubits: 0,
            error: 0.0,
            use_cost: UseCost::default(),
        };
        assert_eq!(verify_block_encoding(&be, &Matrix::identity(2, 2)).unwrap(), 0.0);
    }

    #[test]
    fn perturbation_shows_up_in_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_complex_matrix(&mut rng, 3, 3);
        let mut be = unitary_dilation(&a).unwrap();
        let bump = 1e-3;
        be.unitary[(1, 2)] += c(bump);
        let r = verify_block_encoding(&be, &a).unwrap();
        assert!((r - bump * be.alpha).abs() < 1e-9);
    }

    #[test]
    fn stack_of_scalars_is_three_four_five() {
        let a0 = unitary_dilation(&real_matrix(1, 1, &[3.0])).unwrap();
        let a1 = unitary_dilation(&real_matrix(1, 1, &[4.0])).unwrap();
        let st = stack_lcu(&[a0, a1]).unwrap();
        assert!((st.alpha - 5.0).abs() < 1e-15);
        let blk = st.block();
        assert!((blk[(0, 0)].re - 0.6).abs() < 1e-12);
        assert!((blk[(1, 0)].re - 0.8).abs() < 1e-12);
        assert!(unitarity_defect(&st.unitary) < 1e-10);
    }

    #[test]
    fn stack_of_random_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let parts: Vec<Matrix> = (0..3).map(|_| random_complex_matrix(&mut rng, 2, 2)).collect();
        let encs: Vec<_> = parts.iter().map(|p| unitary_dilation(p).unwrap()).collect();
        let st = stack_lcu(&encs).unwrap();
        assert!(verify_block_encoding(&st, &vstack(&parts)).unwrap() < 1e-9);
        assert_eq!(st.ancilla_qubits, 3);
        assert_eq!(st.use_cost.qubits_per_use, 2 * 3 * st.register_qubits());
    }

    #[test]
    fn single_stack_is_identity_operation() {
        let be = unitary_dilation(&diag(&[1.0, 0.5])).unwrap();
        let st = stack_lcu(std::slice::from_ref(&be)).unwrap();
        assert_eq!(st.unitary, be.unitary);
    }

    #[test]
    fn sum_examples() {
        let one = unitary_dilation(&real_matrix(1, 1, &[1.0])).unwrap();
        let s = sum_lcu(&[one.clone(), one]).unwrap();
        assert_eq!(s.alpha, 2.0);
        assert!((s.block()[(0, 0)].re - 1.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random_hermitian(&mut rng, 4);
        let neg = h.map(|z| -z);
        let s = sum_lcu(&[unitary_dilation(&h).unwrap(), unitary_dilation(&neg).unwrap()]).unwrap();
        assert!(verify_block_encoding(&s, &Matrix::zeros(4, 4)).unwrap() < 1e-9);

        let h2 = random_hermitian(&mut rng, 4);
        let s = sum_lcu(&[unitary_dilation(&h).unwrap(), unitary_dilation(&h2).unwrap()]).unwrap();
        assert!(verify_block_encoding(&s, &(&h + &h2)).unwrap() < 1e-9);
    }

    #[test]
    fn sum_rejects_shape_mismatch() {
        let a = unitary_dilation(&diag(&[1.0, 2.0])).unwrap();
        let b = unitary_dilation(&diag(&[1.0, 2.0, 3.0])).unwrap();
        assert!(matches!(sum_lcu(&[a, b]), Err(BlockEncError::Shape(_))));
        assert_eq!(sum_lcu(&[]).unwrap_err(), BlockEncError::Empty);
    }

    #[test]
    fn hermitian_dilation_of_scalar_and_rectangle() {
        let be = unitary_dilation(&real_matrix(1, 1, &[2.0])).unwrap();
        let h = hermitian_dilation(&be);
        assert!(verify_block_encoding(&h, &real_matrix(2, 2, &[0.0, 2.0, 2.0, 0.0])).unwrap() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_complex_matrix(&mut rng, 3, 2);
        let h = hermitian_dilation(&unitary_dilation(&a).unwrap());
        assert!(verify_block_encoding(&h, &symmetrize(&a)).unwrap() < 1e-9);
        assert!(unitarity_defect(&h.unitary) < 1e-10);
        assert!(frob_norm(&(h.block() - h.block().adjoint())) < 1e-12);
    }

    #[test]
    fn hermitian_dilation_of_stack() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let parts: Vec<Matrix> = (0..2).map(|_| random_complex_matrix(&mut rng, 2, 2)).collect();
        let encs: Vec<_> = parts.iter().map(|p| unitary_dilation(p).unwrap()).collect();
        let h = hermitian_dilation(&stack_lcu(&encs).unwrap());
        assert!(verify_block_encoding(&h, &symmetrize(&vstack(&parts))).unwrap() < 1e-9);
    }
}
