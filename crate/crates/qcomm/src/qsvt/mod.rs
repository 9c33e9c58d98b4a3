//! Polynomials, phase sequences and polynomial block-encodings.

mod approx;
mod encode;
pub mod poly;
mod qsp;

pub use approx::{
    bessel_j, bessel_j_all, certify_inverse, inverse_error, inverse_poly, jacobi_anger, jacobi_anger_errors,
    truncation_radius, INVERSE_DEGREE_CONSTANT,
};
pub use encode::{exact_poly_encoding, exponential_encoding, EncodeError};
pub use poly::{certificate_grid, chebyshev_interpolant, ChebyshevPoly, Parity, PolyError, GRID_POINTS};
pub use qsp::{
    chebyshev_nodes, find_phases, phase_residual, qsp_cost, qsp_sequence, reflection_signal, scalar_qsp,
    scalar_qsp_real, PhaseSequence, QspCost, QspError, MAX_QSP_DEGREE, PHASE_TOLERANCE,
};
