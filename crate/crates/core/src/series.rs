//! Truncated Laurent/Taylor series around the origin.
//!
//! A series stores the coefficients of `z^lead, z^(lead+1), …, z^(lead+N)`.
//! Everything beyond `z^(lead+N)` is unknown, and every operation tracks how
//! far its result is still exact.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_ORDER: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series has no nonzero coefficient within its truncation")]
    ZeroLeadingCoefficient,
    #[error("expected {expected} form (lead {lead}, leading coefficient 1)")]
    WrongForm { expected: &'static str, lead: i32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    lead: i32,
    coeffs: Vec<Complex64>,
}

/// Wire format: `{"lead": int, "coeffs": [[re, im], …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub lead: i32,
    pub coeffs: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Mul,
    Div,
    Derivative,
}

impl TruncatedSeries {
    /// # Panics
    /// If `coeffs` is empty.
    pub fn new(lead: i32, coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least one coefficient");
        Self { lead, coeffs }
    }

    pub fn from_real(lead: i32, coeffs: &[f64]) -> Self {
        Self::new(lead, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Pads `coeffs` with zeros up to truncation order `order`.
    pub fn padded(lead: i32, coeffs: &[Complex64], order: usize) -> Self {
        let mut v = coeffs.to_vec();
        v.resize(order + 1, Complex64::new(0.0, 0.0));
        Self::new(lead, v)
    }

    /// `1/z + b0 + b1 z + …`, with `b` holding `b0, b1, …` and zero padding.
    pub fn b_form(b: &[Complex64], order: usize) -> Self {
        let mut v = vec![Complex64::new(1.0, 0.0)];
        v.extend_from_slice(b);
        Self::padded(-1, &v, order)
    }

    /// `z + a2 z² + a3 z³ + …`, with `a` holding `a2, a3, …` and zero padding.
    pub fn a_form(a: &[Complex64], order: usize) -> Self {
        let mut v = vec![Complex64::new(1.0, 0.0)];
        v.extend_from_slice(a);
        Self::padded(1, &v, order)
    }

    pub fn lead(&self) -> i32 {
        self.lead
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Truncation order N.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Highest exponent whose coefficient is known.
    pub fn top(&self) -> i32 {
        self.lead + self.order() as i32
    }

    /// Coefficient of `z^k`; zero below `lead`, `None` past the truncation.
    pub fn coeff(&self, k: i32) -> Option<Complex64> {
        if k > self.top() {
            None
        } else if k < self.lead {
            Some(Complex64::new(0.0, 0.0))
        } else {
            Some(self.coeffs[(k - self.lead) as usize])
        }
    }

    pub fn is_b_form(&self) -> bool {
        self.lead == -1 && self.coeffs[0] == Complex64::new(1.0, 0.0)
    }

    pub fn is_a_form(&self) -> bool {
        self.lead == 1 && self.coeffs[0] == Complex64::new(1.0, 0.0)
    }

    /// Drops leading zero coefficients, shortening the truncation accordingly.
    pub fn normalized(&self) -> Result<Self, SeriesError> {
        let skip = self
            .coeffs
            .iter()
            .position(|c| *c != Complex64::new(0.0, 0.0))
            .ok_or(SeriesError::ZeroLeadingCoefficient)?;
        Ok(Self::new(self.lead + skip as i32, self.coeffs[skip..].to_vec()))
    }

    /// Horner evaluation of the truncated sum at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let poly = self
            .coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
        poly * z.powi(self.lead)
    }

    pub fn add(&self, other: &Self) -> Self {
        let lead = self.lead.min(other.lead);
        let top = self.top().min(other.top());
        let coeffs = (lead..=top.max(lead))
            .map(|k| self.coeff(k).unwrap_or_default() + other.coeff(k).unwrap_or_default())
            .collect();
        Self::new(lead, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::new(self.lead, self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Cauchy product.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| (0..=k).map(|j| self.coeffs[j] * other.coeffs[k - j]).sum())
            .collect();
        Self::new(self.lead + other.lead, coeffs)
    }

    /// Long division after normalizing the divisor's leading term.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        let b = other.normalized()?;
        let n = self.order().min(b.order());
        let inv_b0 = b.coeffs[0].inv();
        let mut q: Vec<Complex64> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let acc: Complex64 = (1..=k).map(|j| b.coeffs[j] * q[k - j]).sum();
            q.push((self.coeffs[k] - acc) * inv_b0);
        }
        Ok(Self::new(self.lead - b.lead, q))
    }

    /// Termwise derivative; the result keeps N + 1 coefficients.
    pub fn derivative(&self) -> Self {
        if self.lead == 0 {
            // the constant term differentiates away; no z^{-1} slot
            let coeffs: Vec<Complex64> = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
            return if coeffs.is_empty() { Self::new(0, vec![Complex64::new(0.0, 0.0)]) } else { Self::new(0, coeffs) };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * f64::from(self.lead + k as i32))
            .collect();
        Self::new(self.lead - 1, coeffs)
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson { lead: self.lead, coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect() }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self, SeriesError> {
        if j.coeffs.is_empty() {
            return Err(SeriesError::ZeroLeadingCoefficient);
        }
        Ok(Self::new(j.lead, j.coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect()))
    }
}

pub fn series_arith(
    op: SeriesOp,
    a: &TruncatedSeries,
    b: Option<&TruncatedSeries>,
) -> Result<TruncatedSeries, SeriesError> {
    let rhs = || b.expect("binary series operation needs a second operand");
    Ok(match op {
        SeriesOp::Add => a.add(rhs()),
        SeriesOp::Mul => a.mul(rhs()),
        SeriesOp::Div => a.div(rhs())?,
        SeriesOp::Derivative => a.derivative(),
    })
}

/// `g = 1/f` for `f = 1/z + b0 + b1 z + …`; the result is `z + a2 z² + …`.
pub fn b_to_a(f: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    if !f.is_b_form() {
        return Err(SeriesError::WrongForm { expected: "class-B", lead: f.lead });
    }
    let one = TruncatedSeries::padded(0, &[Complex64::new(1.0, 0.0)], f.order());
    one.div(f)
}

/// Inverse of [`b_to_a`].
pub fn a_to_b(g: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    if !g.is_a_form() {
        return Err(SeriesError::WrongForm { expected: "class-A", lead: g.lead });
    }
    let one = TruncatedSeries::padded(0, &[Complex64::new(1.0, 0.0)], g.order());
    one.div(g)
}

/// Series of `S_s = (s''/s')' − ½ (s''/s')²`.
///
/// Class-B input goes through `1/s`, which has the same Schwarzian and no
/// pole to track.
pub fn schwarzian_series(s: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    let s = if s.is_b_form() { b_to_a(s)? } else { s.clone() };
    let d1 = s.derivative().normalized()?;
    let d2 = d1.derivative();
    let log_deriv = match d2.normalized() {
        Ok(d2) => d2.div(&d1)?,
        // s'' vanishes identically: s is affine
        Err(_) => return Ok(TruncatedSeries::padded(0, &[], d2.order().saturating_sub(2))),
    };
    let half_sq = log_deriv.mul(&log_deriv).scale(Complex64::new(0.5, 0.0));
    Ok(log_deriv.derivative().sub(&half_sq))
}

/// True iff the coefficients agree to `tol` over the range both series know.
pub fn series_equal_check(a: &TruncatedSeries, b: &TruncatedSeries, tol: f64) -> bool {
    let lo = a.lead.min(b.lead);
    let hi = a.top().min(b.top());
    (lo..=hi).all(|k| match (a.coeff(k), b.coeff(k)) {
        (Some(x), Some(y)) => (x - y).norm() <= tol,
        _ => true,
    })
}
