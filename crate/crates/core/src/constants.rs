//! Constants behind the small-Schwarzian criteria.
//!
//! * `c_α`: the sharp bound for meromorphic convexity of order α, the square
//!   of the first positive root of `2t = (1+α) tan t`.
//! * `φ(β)`, `ψ(β)` and the largest admissible `δ` for membership in `C_β`.
//! * The convexity order guaranteed by the older analytic-function criterion.
//!
//! Where the formulas involve `e^{δ/2}` this module uses `e^{δ/2}` throughout.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

pub const BISECTION_TOL: f64 = 1e-12;
/// Gap kept below the `tan` singularity when bracketing.
const TAN_GUARD: f64 = 1e-9;
const DELTA_BRACKET_HI: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstantsError {
    #[error("x = {0} is outside [0, π/2)")]
    Domain(f64),
    #[error("order α = {0} is outside [0, 1)")]
    BadAlpha(f64),
    #[error("β = {0} is below 3/2")]
    BadBeta(f64),
    #[error("η = {eta} is not below φ(β) = {phi}")]
    EtaTooLarge { eta: f64, phi: f64 },
    #[error("hypothesis 6η + 5δ(1+η)e^(δ/2) < 2 fails: left side is {lhs}")]
    HypothesisViolated { lhs: f64 },
    #[error("no sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
}

/// Order of meromorphic convexity, `0 ≤ α < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct OrderAlpha(f64);

impl OrderAlpha {
    pub fn new(alpha: f64) -> Result<Self, ConstantsError> {
        if (0.0..1.0).contains(&alpha) {
            Ok(Self(alpha))
        } else {
            Err(ConstantsError::BadAlpha(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Parameter of the class `C_β`: `β ≥ 3/2`, or `β = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaParam {
    Finite(f64),
    Infinite,
}

impl BetaParam {
    pub fn new(beta: f64) -> Result<Self, ConstantsError> {
        if beta.is_infinite() && beta > 0.0 {
            Ok(BetaParam::Infinite)
        } else if beta >= 1.5 {
            Ok(BetaParam::Finite(beta))
        } else {
            Err(ConstantsError::BadBeta(beta))
        }
    }

    /// Accepts a number or `inf`/`infinity`.
    pub fn parse(text: &str) -> Result<Self, String> {
        match text.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(BetaParam::Infinite),
            t => {
                let b: f64 = t.parse().map_err(|_| format!("invalid beta `{text}`"))?;
                Self::new(b).map_err(|e| e.to_string())
            }
        }
    }

    /// Upper bound on `Re(1 + zg''/g')`; `None` at β = ∞.
    pub fn upper(self) -> Option<f64> {
        match self {
            BetaParam::Finite(b) => Some(b),
            BetaParam::Infinite => None,
        }
    }

    /// Lower bound `−β/(2β−3)`; `None` at β = 3/2 where it is −∞.
    pub fn lower(self) -> Option<f64> {
        match self {
            BetaParam::Finite(b) if b == 1.5 => None,
            BetaParam::Finite(b) => Some(-b / (2.0 * b - 3.0)),
            BetaParam::Infinite => Some(-0.5),
        }
    }
}

impl fmt::Display for BetaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaParam::Finite(b) => write!(f, "{b}"),
            BetaParam::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for BetaParam {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            BetaParam::Finite(b) => s.serialize_f64(*b),
            BetaParam::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Sign-change bracket for bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl RootBracket {
    pub fn new(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<Self, ConstantsError> {
        let (f_lo, f_hi) = (f(lo), f(hi));
        if f_lo * f_hi < 0.0 {
            Ok(Self { lo, hi, f_lo, f_hi })
        } else {
            Err(ConstantsError::NoBracket { lo, hi })
        }
    }

    /// Halves the bracket until it is narrower than `tol`; returns the midpoint.
    pub fn bisect(mut self, f: impl Fn(f64) -> f64, tol: f64) -> f64 {
        while self.hi - self.lo > tol {
            let mid = 0.5 * (self.lo + self.hi);
            if mid <= self.lo || mid >= self.hi {
                break;
            }
            let fm = f(mid);
            if fm == 0.0 {
                return mid;
            }
            if (fm < 0.0) == (self.f_lo < 0.0) {
                self.lo = mid;
                self.f_lo = fm;
            } else {
                self.hi = mid;
                self.f_hi = fm;
            }
        }
        0.5 * (self.lo + self.hi)
    }
}

/// `h(x) = 2x − (1+α) tan x` on `[0, π/2)`.
pub fn h_alpha(x: f64, alpha: f64) -> Result<f64, ConstantsError> {
    if !(0.0..FRAC_PI_2).contains(&x) {
        return Err(ConstantsError::Domain(x));
    }
    Ok(2.0 * x - (1.0 + alpha) * x.tan())
}

/// Lower end of the bracket for `√c_α`; `h` decreases past this point.
pub fn c_alpha_lower_bound(alpha: f64) -> f64 {
    ((1.0 - alpha) / (1.0 + alpha)).sqrt().atan()
}

/// `c_α = t*²` with `t*` the root of `2t = (1+α) tan t` in `(0, π/2)`.
pub fn c_alpha(alpha: OrderAlpha, tol: f64) -> f64 {
    let a = alpha.value();
    let h = |t: f64| 2.0 * t - (1.0 + a) * t.tan();
    let bracket = RootBracket::new(h, c_alpha_lower_bound(a), FRAC_PI_2 - TAN_GUARD)
        .expect("h is positive at arctan√((1−α)/(1+α)) and negative near π/2");
    let t = bracket.bisect(h, tol.max(1e-15));
    t * t
}

/// `(φ(β), ψ(β))`; the β = ∞ limits are `(3/7, 11/7)`.
pub fn phi_psi(beta: BetaParam) -> (f64, f64) {
    match beta {
        BetaParam::Infinite => (3.0 / 7.0, 11.0 / 7.0),
        BetaParam::Finite(b) => {
            let phi = ((b - 1.0) / (b + 1.0)).min(6.0 * (b - 1.0) / (2.0 * (7.0 * b - 9.0)));
            let psi = ((b + 3.0) / (b + 1.0)).max((11.0 * b - 15.0) / (7.0 * b - 9.0));
            (phi, psi)
        }
    }
}

/// Left side minus right side of `2η + ψ δ (1+η) e^{δ/2} < 2φ`.
pub fn cbeta_hypothesis_slack(eta: f64, delta: f64, beta: BetaParam) -> f64 {
    let (phi, psi) = phi_psi(beta);
    2.0 * phi - (2.0 * eta + psi * delta * (1.0 + eta) * (0.5 * delta).exp())
}

/// The `δ` at which the `C_β` hypothesis turns into equality. Every smaller
/// `δ ≥ 0` satisfies it strictly.
pub fn delta_max(eta: f64, beta: BetaParam, tol: f64) -> Result<f64, ConstantsError> {
    let (phi, _) = phi_psi(beta);
    if !(eta >= 0.0 && eta < phi) {
        return Err(ConstantsError::EtaTooLarge { eta, phi });
    }
    let g = |d: f64| cbeta_hypothesis_slack(eta, d, beta);
    let lhs0 = g(0.0);
    if lhs0 <= 0.0 {
        // η within rounding of φ
        return Ok(0.0);
    }
    let bracket = RootBracket::new(g, 0.0, DELTA_BRACKET_HI)?;
    Ok(bracket.bisect(g, tol.max(1e-15)))
}

/// Convexity order `(2 − 6η − 5(1+η)δe^{δ/2}) / (2 − 2η − (1+η)δe^{δ/2})`.
pub fn chiang_order(eta: f64, delta: f64) -> Result<f64, ConstantsError> {
    let t = (1.0 + eta) * delta * (0.5 * delta).exp();
    let lhs = 6.0 * eta + 5.0 * t;
    if !(lhs < 2.0) || eta < 0.0 || delta < 0.0 {
        return Err(ConstantsError::HypothesisViolated { lhs });
    }
    Ok((2.0 - 6.0 * eta - 5.0 * t) / (2.0 - 2.0 * eta - t))
}

/// Bound on `|(cu' + v')/(cu + v)|` used to derive both the convexity order
/// and the `C_β` bounds: `2(η + (1+η)δe^{δ/2}) / (2 − 2η − (1+η)δe^{δ/2})`.
pub fn log_derivative_bound(eta: f64, delta: f64) -> f64 {
    let t = (1.0 + eta) * delta * (0.5 * delta).exp();
    2.0 * (eta + t) / (2.0 - 2.0 * eta - t)
}
