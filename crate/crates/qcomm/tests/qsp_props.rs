use proptest::prelude::*;
use qcomm::linalg::{c, Matrix};
use qcomm::qsvt::{
    chebyshev_interpolant, chebyshev_nodes, find_phases, qsp_sequence, reflection_signal, scalar_qsp_real,
    ChebyshevPoly, Parity,
};

fn ket0_projector() -> Matrix {
    let mut p = Matrix::zeros(2, 2);
    p[(0, 0)] = c(1.0);
    p
}

/// The real part reached by `phases`, as a Chebyshev series with exact parity.
fn reachable(phases: &[f64]) -> ChebyshevPoly {
    let degree = phases.len();
    let parity = if degree % 2 == 0 { Parity::Even } else { Parity::Odd };
    let mut coefficients = chebyshev_interpolant(|x| scalar_qsp_real(phases, x), degree + 1);
    for (k, v) in coefficients.iter_mut().enumerate() {
        if k % 2 != degree % 2 {
            *v = 0.0;
        }
    }
    ChebyshevPoly::new(parity, coefficients, 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn found_phases_reproduce_the_polynomial(phases in prop::collection::vec(-3.0f64..3.0, 1..=4)) {
        let poly = reachable(&phases);
        let found = find_phases(&poly).unwrap();
        let proj = ket0_projector();
        for x in chebyshev_nodes(64) {
            let plus = qsp_sequence(&reflection_signal(x), &proj, &proj, &found).unwrap();
            let minus = qsp_sequence(&reflection_signal(x), &proj, &proj, &found.negated()).unwrap();
            let real = (plus[(0, 0)] + minus[(0, 0)]) / 2.0;
            prop_assert!((real.re - poly.eval(x)).abs() <= 1e-6, "x = {x}");
        }
    }
}
