//! Order-3 forward-mode differentiation over the complex numbers.
//!
//! A [`Jet3`] carries `(f, f', f'', f''')` at a single expansion point. Jets
//! compose through the usual arithmetic operators (Leibniz rule) and through
//! the elementary functions in [`ElemKind`] (Faà di Bruno to third order), so
//! any closed-form expression yields the derivatives the Schwarzian needs
//! without symbolic work.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Below this modulus a divisor or a function argument is treated as zero.
pub const POLE_THRESHOLD: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum JetError {
    #[error("division by a jet whose value vanishes at {at}")]
    DivisionByZero { at: Complex64 },
    #[error("{kind} is not defined at {at} (pole or branch point)")]
    Domain { kind: ElemKind, at: Complex64 },
}

/// Value and first three derivatives of a function at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    pub d0: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub d3: Complex64,
}

/// Elementary functions understood by [`Jet3::elem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElemKind {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Cot,
    Sinh,
    Cosh,
    Tanh,
    Sqrt,
    Inv,
}

impl ElemKind {
    pub const ALL: [ElemKind; 11] = [
        ElemKind::Exp,
        ElemKind::Log,
        ElemKind::Sin,
        ElemKind::Cos,
        ElemKind::Tan,
        ElemKind::Cot,
        ElemKind::Sinh,
        ElemKind::Cosh,
        ElemKind::Tanh,
        ElemKind::Sqrt,
        ElemKind::Inv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElemKind::Exp => "exp",
            ElemKind::Log => "log",
            ElemKind::Sin => "sin",
            ElemKind::Cos => "cos",
            ElemKind::Tan => "tan",
            ElemKind::Cot => "cot",
            ElemKind::Sinh => "sinh",
            ElemKind::Cosh => "cosh",
            ElemKind::Tanh => "tanh",
            ElemKind::Sqrt => "sqrt",
            ElemKind::Inv => "inv",
        }
    }

    pub fn from_name(name: &str) -> Option<ElemKind> {
        ElemKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    /// Plain evaluation, with the same domain guards as the jet version.
    pub fn apply(self, x: Complex64) -> Result<Complex64, JetError> {
        Ok(self.ladder(x)?[0])
    }

    /// `[φ(x), φ'(x), φ''(x), φ'''(x)]` for the elementary function φ.
    fn ladder(self, x: Complex64) -> Result<[Complex64; 4], JetError> {
        let one = Complex64::new(1.0, 0.0);
        let domain = |ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(JetError::Domain { kind: self, at: x })
            }
        };
        let out = match self {
            ElemKind::Exp => {
                let e = x.exp();
                [e, e, e, e]
            }
            ElemKind::Log => {
                domain(x.norm() > POLE_THRESHOLD)?;
                let r = x.inv();
                [x.ln(), r, -r * r, 2.0 * r * r * r]
            }
            ElemKind::Sin => {
                let (s, c) = (x.sin(), x.cos());
                [s, c, -s, -c]
            }
            ElemKind::Cos => {
                let (s, c) = (x.sin(), x.cos());
                [c, -s, -c, s]
            }
            ElemKind::Tan => {
                domain(x.cos().norm() > POLE_THRESHOLD)?;
                let t = x.tan();
                let sec2 = one + t * t;
                [t, sec2, 2.0 * t * sec2, 2.0 * sec2 * (one + 3.0 * t * t)]
            }
            ElemKind::Cot => {
                let s = x.sin();
                domain(s.norm() > POLE_THRESHOLD)?;
                let c = x.cos() / s;
                let csc2 = one + c * c;
                [c, -csc2, 2.0 * c * csc2, -2.0 * csc2 * (one + 3.0 * c * c)]
            }
            ElemKind::Sinh => {
                let (s, c) = (x.sinh(), x.cosh());
                [s, c, s, c]
            }
            ElemKind::Cosh => {
                let (s, c) = (x.sinh(), x.cosh());
                [c, s, c, s]
            }
            ElemKind::Tanh => {
                domain(x.cosh().norm() > POLE_THRESHOLD)?;
                let t = x.tanh();
                let sech2 = one - t * t;
                [t, sech2, -2.0 * t * sech2, -2.0 * sech2 * (one - 3.0 * t * t)]
            }
            ElemKind::Sqrt => {
                domain(x.norm() > POLE_THRESHOLD)?;
                let s = x.sqrt();
                let r = s.inv();
                let r3 = r * r * r;
                [s, 0.5 * r, -0.25 * r3, 0.375 * r3 * r * r]
            }
            ElemKind::Inv => {
                if x.norm() <= POLE_THRESHOLD {
                    return Err(JetError::DivisionByZero { at: x });
                }
                let r = x.inv();
                let r2 = r * r;
                [r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2]
            }
        };
        if out.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Ok(out)
        } else {
            Err(JetError::Domain { kind: self, at: x })
        }
    }
}

impl std::fmt::Display for ElemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl Jet3 {
    pub const fn new(d0: Complex64, d1: Complex64, d2: Complex64, d3: Complex64) -> Self {
        Self { d0, d1, d2, d3 }
    }

    /// The independent variable lifted at `z0`: `(z0, 1, 0, 0)`.
    pub fn var(z0: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::new(z0, Complex64::new(1.0, 0.0), zero, zero)
    }

    pub fn constant(c: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::new(c, zero, zero, zero)
    }

    pub fn components(&self) -> [Complex64; 4] {
        [self.d0, self.d1, self.d2, self.d3]
    }

    pub fn is_finite(&self) -> bool {
        self.components()
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scale(self, k: Complex64) -> Self {
        Self::new(self.d0 * k, self.d1 * k, self.d2 * k, self.d3 * k)
    }

    /// Chain rule through an outer function with derivative ladder
    /// `[φ, φ', φ'', φ''']` evaluated at `self.d0`.
    fn compose(self, ladder: [Complex64; 4]) -> Self {
        let [p0, p1, p2, p3] = ladder;
        let (a1, a2, a3) = (self.d1, self.d2, self.d3);
        Self::new(
            p0,
            p1 * a1,
            p2 * a1 * a1 + p1 * a2,
            p3 * a1 * a1 * a1 + 3.0 * p2 * a1 * a2 + p1 * a3,
        )
    }

    pub fn elem(self, kind: ElemKind) -> Result<Self, JetError> {
        Ok(self.compose(kind.ladder(self.d0)?))
    }

    pub fn recip(self) -> Result<Self, JetError> {
        self.elem(ElemKind::Inv)
            .map_err(|_| JetError::DivisionByZero { at: self.d0 })
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self, JetError> {
        Ok(self * rhs.recip()?)
    }

    /// Integer power. Negative exponents require a nonzero value.
    pub fn powi(self, n: i32) -> Result<Self, JetError> {
        if n == 0 {
            return Ok(Self::constant(Complex64::new(1.0, 0.0)));
        }
        let x = self.d0;
        if n < 0 && x.norm() <= POLE_THRESHOLD {
            return Err(JetError::DivisionByZero { at: x });
        }
        let nf = f64::from(n);
        let coeffs = [1.0, nf, nf * (nf - 1.0), nf * (nf - 1.0) * (nf - 2.0)];
        let mut ladder = [Complex64::new(0.0, 0.0); 4];
        for (k, (slot, c)) in ladder.iter_mut().zip(coeffs).enumerate() {
            // a zero falling-factorial coefficient kills the term even at x = 0
            if c != 0.0 {
                *slot = x.powi(n - k as i32) * c;
            }
        }
        Ok(self.compose(ladder))
    }

    /// Principal-branch complex power `exp(w·log(self))`.
    pub fn powc(self, w: Self) -> Result<Self, JetError> {
        (w * self.elem(ElemKind::Log)?).elem(ElemKind::Exp)
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, b: Jet3) -> Jet3 {
        Jet3::new(self.d0 + b.d0, self.d1 + b.d1, self.d2 + b.d2, self.d3 + b.d3)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, b: Jet3) -> Jet3 {
        Jet3::new(self.d0 - b.d0, self.d1 - b.d1, self.d2 - b.d2, self.d3 - b.d3)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        Jet3::new(-self.d0, -self.d1, -self.d2, -self.d3)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, b: Jet3) -> Jet3 {
        let a = self;
        Jet3::new(
            a.d0 * b.d0,
            a.d1 * b.d0 + a.d0 * b.d1,
            a.d2 * b.d0 + 2.0 * a.d1 * b.d1 + a.d0 * b.d2,
            a.d3 * b.d0 + 3.0 * (a.d2 * b.d1 + a.d1 * b.d2) + a.d0 * b.d3,
        )
    }
}

/// Binary jet operations, in the shape the expression evaluator dispatches on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn jet_arith(op: ArithOp, a: Jet3, b: Jet3) -> Result<Jet3, JetError> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.checked_div(b)?,
    })
}

/// Finite-difference estimate of `(f, f', f'', f''')` at `z0` with fourth-order
/// central stencils along the real direction. Test oracle only: it shares no
/// code with the jet rules above.
pub fn fd_jet_oracle<F>(f: F, z0: Complex64, h: f64) -> Jet3
where
    F: Fn(Complex64) -> Complex64,
{
    let at = |k: f64| f(z0 + Complex64::new(k * h, 0.0));
    let (m3, m2, m1, c, p1, p2, p3) = (at(-3.0), at(-2.0), at(-1.0), at(0.0), at(1.0), at(2.0), at(3.0));
    let d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    let d2 = (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h);
    let d3 = (-p3 + 8.0 * p2 - 13.0 * p1 + 13.0 * m1 - 8.0 * m2 + m3) / (8.0 * h * h * h);
    Jet3::new(c, d1, d2, d3)
}
