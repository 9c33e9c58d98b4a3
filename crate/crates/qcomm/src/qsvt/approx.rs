use statrs::function::erf::erfc_inv;

use super::poly::{certificate_grid, chebyshev_interpolant, ChebyshevPoly, Parity, PolyError};

/// Constant `C` in `degree ≤ C · δ′⁻¹ · ln(1/ε)` for [`inverse_poly`]. Observed
/// values stay between 3.7 and 4.5 for δ′ ≥ 1/32 and ε ≥ 1e-6.
pub const INVERSE_DEGREE_CONSTANT: f64 = 5.0;

const MAX_INTERPOLATION_NODES: usize = 1 << 14;

/// `J₀(x) … J_nmax(x)` by Miller's downward recurrence, normalised with
/// `J₀ + 2ΣJ₂ₖ = 1`.
pub fn bessel_j_all(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = nmax.max(ax.ceil() as usize);
    let m = 2 * ((top + 15 + (40.0 * top as f64).sqrt() as usize) / 2 + 1);
    let mut vals = vec![0.0; m + 1];
    let mut next = 0.0;
    let mut cur = 1.0;
    vals[m] = cur;
    for k in (1..=m).rev() {
        let prev = (2.0 * k as f64 / ax) * cur - next;
        next = cur;
        cur = prev;
        vals[k - 1] = cur;
        if cur.abs() > 1e100 {
            for v in vals[k - 1..].iter_mut() {
                *v *= 1e-100;
            }
            cur *= 1e-100;
            next *= 1e-100;
        }
    }
    let norm = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    for (n, o) in out.iter_mut().enumerate() {
        let v = vals[n] / norm;
        *o = if x < 0.0 && n % 2 == 1 { -v } else { v };
    }
    out
}

pub fn bessel_j(n: usize, x: f64) -> f64 {
    bessel_j_all(n, x)[n]
}

fn check_unit_interval(name: &str, v: f64, hi: f64) -> Result<(), PolyError> {
    if v > 0.0 && v <= hi {
        Ok(())
    } else {
        Err(PolyError::OutOfRange(format!("{name} = {v} not in (0, {hi}]")))
    }
}

/// Odd polynomial within `eps` of `3δ′/(4x)` on `δ′ ≤ |x| ≤ 1`, bounded by 1.
///
/// Built as the Chebyshev truncation of `(3δ′/4) · (1 − (1−x²)ᵇ)/x · S(x)`,
/// where `S = 1 − (erf(k(x+c)) − erf(k(x−c)))/2` switches off the region
/// `|x| < 5δ′/8`. Each of the three error sources gets `eps/4`.
pub fn inverse_poly(delta: f64, eps: f64) -> Result<ChebyshevPoly, PolyError> {
    check_unit_interval("delta", delta, 0.5)?;
    check_unit_interval("eps", eps, 0.5)?;
    let b = ((3.0 / eps).ln() / (delta * delta)).ceil();
    let center = 5.0 * delta / 8.0;
    let k = erfc_inv(2.0 * eps / 3.0) / (delta - center);
    let target = move |x: f64| {
        if x == 0.0 {
            return 0.0;
        }
        let damp = -(b * (-x * x).ln_1p()).exp_m1() / x;
        let erf = |y: f64| 1.0 - statrs::function::erf::erfc(y);
        let switch = 1.0 - (erf(k * (x + center)) - erf(k * (x - center))) / 2.0;
        0.75 * delta * damp * switch
    };
    let coeffs = converged_interpolant(&target, eps)?;
    let mut trimmed = truncate_tail(coeffs, eps / 4.0);
    for (j, c) in trimmed.iter_mut().enumerate() {
        if j % 2 == 0 {
            *c = 0.0;
        }
    }
    let poly = ChebyshevPoly::new(Parity::Odd, trimmed, eps)?;
    certify_inverse(&poly, delta, eps)?;
    Ok(poly)
}

/// Grid check of both inverse-polynomial guarantees.
pub fn certify_inverse(poly: &ChebyshevPoly, delta: f64, eps: f64) -> Result<(), PolyError> {
    if poly.sup_bound > 1.0 + 1e-9 {
        return Err(PolyError::Certificate(format!("sup {} exceeds 1", poly.sup_bound)));
    }
    let err = inverse_error(poly, delta);
    if err > eps {
        return Err(PolyError::Certificate(format!("error {err:e} exceeds {eps:e}")));
    }
    Ok(())
}

/// Max of `|P(x) − 3δ/(4x)|` over the grid restricted to `δ ≤ |x| ≤ 1`,
/// with the interval endpoints added.
pub fn inverse_error(poly: &ChebyshevPoly, delta: f64) -> f64 {
    let n = super::poly::GRID_POINTS;
    let inner: Vec<f64> = (0..=n).map(|i| delta + (1.0 - delta) * i as f64 / n as f64).collect();
    certificate_grid()
        .into_iter()
        .filter(|x| x.abs() >= delta)
        .chain(inner.iter().copied())
        .chain(inner.iter().map(|x| -x))
        .map(|x| (poly.eval(x) - 0.75 * delta / x).abs())
        .fold(0.0, f64::max)
}

fn converged_interpolant(f: &dyn Fn(f64) -> f64, eps: f64) -> Result<Vec<f64>, PolyError> {
    let mut n = 128;
    loop {
        let coeffs = chebyshev_interpolant(f, n);
        let tail: f64 = coeffs[3 * n / 4..].iter().map(|c| c.abs()).sum();
        if tail < eps * 1e-3 {
            return Ok(coeffs);
        }
        if n >= MAX_INTERPOLATION_NODES {
            return Err(PolyError::Certificate(format!("expansion did not settle within {n} nodes")));
        }
        n *= 2;
    }
}

/// Drops the longest tail whose absolute sum stays within `budget`.
fn truncate_tail(mut coeffs: Vec<f64>, budget: f64) -> Vec<f64> {
    let mut acc = 0.0;
    let mut keep = coeffs.len();
    while keep > 1 {
        let next = acc + coeffs[keep - 1].abs();
        if next > budget {
            break;
        }
        acc = next;
        keep -= 1;
    }
    coeffs.truncate(keep);
    coeffs
}

/// The `r(t, ε)` of the Jacobi–Anger truncation bound: the root of
/// `(t/r)ʳ = ε` with `r ≥ t`.
pub fn truncation_radius(t: f64, eps: f64) -> f64 {
    let target = (1.0 / eps).ln();
    let h = |r: f64| r * (r / t).ln() - target;
    let mut lo = t;
    let mut hi = std::f64::consts::E * t + target + 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Even/odd Chebyshev truncations of `cos(tx)` and `sin(tx)` from Bessel
/// coefficients; both are certified within `eps` on the grid.
pub fn jacobi_anger(t: f64, eps: f64) -> Result<(ChebyshevPoly, ChebyshevPoly), PolyError> {
    if !(eps > 0.0 && eps < (-1.0f64).exp()) {
        return Err(PolyError::OutOfRange(format!("eps = {eps} not in (0, 1/e)")));
    }
    if !t.is_finite() {
        return Err(PolyError::OutOfRange("t must be finite".into()));
    }
    if t == 0.0 {
        return Ok((
            ChebyshevPoly::new(Parity::Even, vec![1.0], eps)?,
            ChebyshevPoly::new(Parity::Odd, vec![0.0], eps)?,
        ));
    }
    let radius = truncation_radius(std::f64::consts::E * t.abs() / 2.0, 1.25 * eps);
    let r = (radius / 2.0).floor() as usize;
    let j = bessel_j_all(2 * r + 1, t);
    let mut cos_c = vec![0.0; 2 * r + 1];
    cos_c[0] = j[0];
    for k in 1..=r {
        cos_c[2 * k] = 2.0 * sign(k) * j[2 * k];
    }
    let mut sin_c = vec![0.0; 2 * r + 2];
    for k in 0..=r {
        sin_c[2 * k + 1] = 2.0 * sign(k) * j[2 * k + 1];
    }
    let cos_p = ChebyshevPoly::new(Parity::Even, cos_c, eps)?;
    let sin_p = ChebyshevPoly::new(Parity::Odd, sin_c, eps)?;
    let (ce, se) = jacobi_anger_errors(&cos_p, &sin_p, t);
    if ce > eps || se > eps {
        return Err(PolyError::Certificate(format!("cos error {ce:e}, sin error {se:e} above {eps:e}")));
    }
    Ok((cos_p, sin_p))
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Grid sup errors of the cosine and sine approximants.
pub fn jacobi_anger_errors(cos_p: &ChebyshevPoly, sin_p: &ChebyshevPoly, t: f64) -> (f64, f64) {
    certificate_grid().into_iter().fold((0.0, 0.0), |(ce, se), x| {
        (f64::max(ce, (cos_p.eval(x) - (t * x).cos()).abs()), f64::max(se, (sin_p.eval(x) - (t * x).sin()).abs()))
    })
}
