use thiserror::Error;

use super::poly::{ChebyshevPoly, Parity};
use crate::blockenc::BlockEncoding;
use crate::linalg::{contraction_dilation, pad_square, sv_function, LinalgError, Matrix, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodeError {
    #[error("polynomial sup {sup} exceeds {bound}")]
    SupNorm { sup: f64, bound: f64 },
    #[error("block must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("polynomial has no definite parity")]
    Parity,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Block-encoding of `poly` applied to the singular values of `A/α`.
///
/// The unitary is the dilation of `sv_function(A/α, poly)` padded with an
/// idle branch, so the register has the same two extra qubits the circuit
/// form needs (phase ancilla and real-part selector). One use costs
/// `degree` uses of `be`.
pub fn exact_poly_encoding(be: &BlockEncoding, poly: &ChebyshevPoly) -> Result<BlockEncoding, EncodeError> {
    if poly.parity == Parity::Mixed {
        return Err(EncodeError::Parity);
    }
    if poly.sup_bound > 0.5 + 1e-9 {
        return Err(EncodeError::SupNorm { sup: poly.sup_bound, bound: 0.5 });
    }
    let transformed = sv_function(&be.block(), poly)?;
    let (rows, cols) = transformed.shape();
    let dim = be.dim();
    let dilated = contraction_dilation(&pad_square(&transformed, dim))?;
    let mut unitary = Matrix::identity(4 * dim, 4 * dim);
    unitary.view_mut((0, 0), (2 * dim, 2 * dim)).copy_from(&dilated);
    Ok(BlockEncoding {
        unitary,
        rows,
        cols,
        alpha: 1.0,
        ancilla_qubits: be.ancilla_qubits + 2,
        error: be.error * poly.degree as f64,
        use_cost: be.use_cost.scaled(poly.degree),
    })
}

/// Block-encoding of `(C + iS)/2`, where `C` and `S` are the even and odd
/// transforms of the square block `A/α`. With the Jacobi–Anger pair for
/// `αt` this is `e^{itA}/2`. One use costs `deg C + deg S` uses of `be` and
/// one more selector qubit than [`exact_poly_encoding`].
pub fn exponential_encoding(
    be: &BlockEncoding,
    cos_p: &ChebyshevPoly,
    sin_p: &ChebyshevPoly,
) -> Result<BlockEncoding, EncodeError> {
    if be.rows != be.cols {
        return Err(EncodeError::NotSquare { rows: be.rows, cols: be.cols });
    }
    if cos_p.parity != Parity::Even || sin_p.parity != Parity::Odd {
        return Err(EncodeError::Parity);
    }
    // |c + is| ≤ √(c² + s²), so sups up to √2 keep the halved block a contraction.
    for p in [cos_p, sin_p] {
        if p.sup_bound > std::f64::consts::SQRT_2 {
            return Err(EncodeError::SupNorm { sup: p.sup_bound, bound: std::f64::consts::SQRT_2 });
        }
    }
    let block = be.block();
    let combined = (sv_function(&block, cos_p)? + sv_function(&block, sin_p)? * C64::i()) * C64::new(0.5, 0.0);
    let dim = be.dim();
    let dilated = contraction_dilation(&pad_square(&combined, dim))?;
    let mut unitary = Matrix::identity(8 * dim, 8 * dim);
    unitary.view_mut((0, 0), (2 * dim, 2 * dim)).copy_from(&dilated);
    let degree = cos_p.degree + sin_p.degree;
    Ok(BlockEncoding {
        unitary,
        rows: be.rows,
        cols: be.cols,
        alpha: 1.0,
        ancilla_qubits: be.ancilla_qubits + 3,
        error: be.error * degree as f64,
        use_cost: be.use_cost.scaled(degree),
    })
}
