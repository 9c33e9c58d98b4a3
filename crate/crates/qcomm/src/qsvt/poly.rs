use std::fmt::Write as _;

use thiserror::Error;

/// Grid size for sup-norm certificates.
pub const GRID_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn of_index(k: usize) -> Parity {
        if k % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("coefficient {index} breaks {parity:?} parity")]
    ParityViolation { index: usize, parity: Parity },
    #[error("certificate failed: {0}")]
    Certificate(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Polynomial in the Chebyshev basis, `P(x) = Σ cₖ Tₖ(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevPoly {
    pub parity: Parity,
    pub coefficients: Vec<f64>,
    pub degree: usize,
    pub domain: (f64, f64),
    pub sup_bound: f64,
    pub target_error: f64,
}

/// Chebyshev points of the first kind in `[-1, 1]`, plus both endpoints.
pub fn certificate_grid() -> Vec<f64> {
    let n = GRID_POINTS;
    let mut xs: Vec<f64> = (0..n).map(|k| (std::f64::consts::PI * (k as f64 + 0.5) / n as f64).cos()).collect();
    xs.push(1.0);
    xs.push(-1.0);
    xs
}

impl ChebyshevPoly {
    /// Builds a polynomial, checking that coefficients respect `parity`.
    pub fn new(parity: Parity, mut coefficients: Vec<f64>, target_error: f64) -> Result<Self, PolyError> {
        if coefficients.is_empty() {
            coefficients.push(0.0);
        }
        if let Some(i) = coefficients.iter().position(|c| !c.is_finite()) {
            return Err(PolyError::OutOfRange(format!("coefficient {i} is not finite")));
        }
        if parity != Parity::Mixed {
            for (k, &c) in coefficients.iter().enumerate() {
                if c != 0.0 && Parity::of_index(k) != parity {
                    return Err(PolyError::ParityViolation { index: k, parity });
                }
            }
        }
        while coefficients.len() > 1 && *coefficients.last().unwrap() == 0.0 {
            coefficients.pop();
        }
        let degree = coefficients.len() - 1;
        let mut p = Self { parity, coefficients, degree, domain: (-1.0, 1.0), sup_bound: 0.0, target_error };
        p.sup_bound = p.grid_sup();
        Ok(p)
    }

    /// Converts power-basis coefficients `Σ aₖ xᵏ`; parity is inferred.
    pub fn from_monomials(monomials: &[f64]) -> Result<Self, PolyError> {
        let n = monomials.len().max(1);
        // Chebyshev expansion of xᵏ built by repeated multiplication by x.
        let mut cheb = vec![0.0; n];
        let mut power = vec![0.0; n + 1];
        power[0] = 1.0;
        for (k, &a) in monomials.iter().enumerate() {
            for (c, p) in cheb.iter_mut().zip(&power) {
                *c += a * p;
            }
            if k + 1 < n {
                let mut next = vec![0.0; n + 1];
                for (j, &p) in power.iter().enumerate() {
                    if p == 0.0 {
                        continue;
                    }
                    if j == 0 {
                        next[1] += p;
                    } else {
                        next[j - 1] += 0.5 * p;
                        if j + 1 <= n {
                            next[j + 1] += 0.5 * p;
                        }
                    }
                }
                power = next;
            }
        }
        let has_even = cheb.iter().step_by(2).any(|&c| c != 0.0);
        let has_odd = cheb.iter().skip(1).step_by(2).any(|&c| c != 0.0);
        let parity = match (has_even, has_odd) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Mixed,
        };
        Self::new(parity, cheb, 0.0)
    }

    /// `Tₙ` alone.
    pub fn chebyshev_t(n: usize) -> Self {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        Self::new(Parity::of_index(n), c, 0.0).expect("single term has definite parity")
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coefficients.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + self.coefficients[0]
    }

    pub fn grid_sup(&self) -> f64 {
        certificate_grid().into_iter().map(|x| self.eval(x).abs()).fold(0.0, f64::max)
    }

    /// Multiplies every coefficient by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let coeffs = self.coefficients.iter().map(|c| c * s).collect();
        let mut p = Self::new(self.parity, coeffs, self.target_error * s.abs()).expect("scaling keeps parity");
        p.domain = self.domain;
        p
    }

    /// Plain-text form: header lines then one coefficient per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "parity {}", self.parity.name());
        let _ = writeln!(out, "degree {}", self.degree);
        let _ = writeln!(out, "target_error {}", self.target_error);
        let _ = writeln!(out, "coefficients");
        for c in &self.coefficients {
            let _ = writeln!(out, "{c}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, PolyError> {
        let mut parity = None;
        let mut degree = None;
        let mut target_error = 0.0;
        let mut coeffs: Option<Vec<f64>> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |msg: String| PolyError::Parse { line: lineno + 1, msg };
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(list) = coeffs.as_mut() {
                let v: f64 = line.parse().map_err(|_| err(format!("bad coefficient {line:?}")))?;
                list.push(v);
                continue;
            }
            let (key, value) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let value = value.trim();
            match key {
                "parity" => {
                    parity = Some(match value {
                        "even" => Parity::Even,
                        "odd" => Parity::Odd,
                        "mixed" => Parity::Mixed,
                        _ => return Err(err(format!("unknown parity {value:?}"))),
                    })
                }
                "degree" => degree = Some(value.parse::<usize>().map_err(|_| err("bad degree".into()))?),
                "target_error" => {
                    target_error = value.parse().map_err(|_| err("bad target_error".into()))?;
                    if !(target_error >= 0.0) || !f64::is_finite(target_error) {
                        return Err(err("target_error must be finite and nonnegative".into()));
                    }
                }
                "coefficients" if value.is_empty() => coeffs = Some(Vec::new()),
                _ => return Err(err(format!("unknown key {key:?}"))),
            }
        }
        let last = text.lines().count();
        let parity = parity.ok_or(PolyError::Parse { line: last, msg: "missing parity".into() })?;
        let degree = degree.ok_or(PolyError::Parse { line: last, msg: "missing degree".into() })?;
        let coeffs = coeffs.ok_or(PolyError::Parse { line: last, msg: "missing coefficients".into() })?;
        if coeffs.len() != degree + 1 {
            return Err(PolyError::Parse {
                line: last,
                msg: format!("degree {degree} needs {} coefficients, found {}", degree + 1, coeffs.len()),
            });
        }
        if coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            return Err(PolyError::Parse { line: last, msg: "leading coefficient is zero".into() });
        }
        Self::new(parity, coeffs, target_error)
    }
}

/// Chebyshev coefficients of `f` from samples at `n` first-kind nodes.
pub fn chebyshev_interpolant(f: impl Fn(f64) -> f64, n: usize) -> Vec<f64> {
    let nodes: Vec<f64> = (0..n).map(|k| std::f64::consts::PI * (k as f64 + 0.5) / n as f64).collect();
    let values: Vec<f64> = nodes.iter().map(|&t| f(t.cos())).collect();
    (0..n)
        .map(|j| {
            let s: f64 = nodes.iter().zip(&values).map(|(&t, &v)| v * (j as f64 * t).cos()).sum();
            let scale = if j == 0 { 1.0 } else { 2.0 };
            scale * s / n as f64
        })
        .collect()
}
