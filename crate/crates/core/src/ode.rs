//! Radial integration of `w'' + p(z) w = 0` and the constructions built on it.
//!
//! Along the ray `z = ρe^{iθ}` the equation becomes a first-order complex
//! system in ρ, advanced with classical fixed-step RK4. Both fundamental
//! solutions
//!
//! * `w₁(0) = 1, w₁'(0) = 0`
//! * `w₂(0) = 0, w₂'(0) = 1`
//!
//! are carried together, so `f = w₁/w₂` has `S_f = 2p` and the Wronskian
//! `w₁w₂' − w₁'w₂` stays 1.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io;

use num_complex::Complex64;
use thiserror::Error;

use crate::classify::{BoundExpr, ClassVerdict, GridSpec, JetSource, SampleError};
use crate::constants::{c_alpha, OrderAlpha, BISECTION_TOL};
use crate::jets::Jet3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("invalid argument: {0}")]
    InvalidArgs(String),
    #[error("potential cannot be evaluated at {at}: {detail}")]
    PotentialSingularOnRay { at: Complex64, detail: String },
    #[error("w vanishes at the evaluation point {at}")]
    WZeroAtEvaluationPoint { at: Complex64 },
    #[error("cot(r√c) is singular: r√c = {0} is a multiple of π")]
    CotSingular(f64),
    #[error("c = {c} does not exceed c_α = {c_alpha}")]
    CNotAboveCAlpha { c: f64, c_alpha: f64 },
    #[error("no point with slack ≥ 1e-10 found in ({lo}, {hi})")]
    NoWitness { lo: f64, hi: f64 },
    #[error("profile does not vanish at ρ = 0 (y(0) = {0})")]
    ProfileNotVanishing(f64),
    #[error("cu + v vanishes at {at}")]
    DenominatorVanishes { at: Complex64 },
}

/// The coefficient `p` of `w'' + p w = 0`, so that `S_f = 2p`.
#[derive(Debug, Clone)]
pub enum PotentialP {
    Constant(Complex64),
    Expr(BoundExpr),
}

impl PotentialP {
    pub fn constant(c: f64) -> Self {
        PotentialP::Constant(Complex64::new(c, 0.0))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, OdeError> {
        match self {
            PotentialP::Constant(c) => Ok(*c),
            PotentialP::Expr(e) => match e.value(z) {
                Ok(v) if v.re.is_finite() && v.im.is_finite() => Ok(v),
                Ok(v) => Err(OdeError::PotentialSingularOnRay { at: z, detail: format!("value {v}") }),
                Err(err) => Err(OdeError::PotentialSingularOnRay { at: z, detail: err.to_string() }),
            },
        }
    }
}

/// Fundamental solutions sampled along one ray. Derivatives are with respect
/// to `z`, not ρ.
#[derive(Debug, Clone, PartialEq)]
pub struct RaySolution {
    pub theta: f64,
    pub rho: Vec<f64>,
    pub w1: Vec<Complex64>,
    pub w1p: Vec<Complex64>,
    pub w2: Vec<Complex64>,
    pub w2p: Vec<Complex64>,
}

type State = [Complex64; 4];

fn rhs(p: &PotentialP, dir: Complex64, rho: f64, y: &State) -> Result<State, OdeError> {
    let pz = p.eval(dir * rho)?;
    Ok([dir * y[1], -dir * pz * y[0], dir * y[3], -dir * pz * y[2]])
}

fn rk4_step(p: &PotentialP, dir: Complex64, rho: f64, h: f64, y: &State) -> Result<State, OdeError> {
    let axpy = |a: &State, k: &State, s: f64| -> State { std::array::from_fn(|i| a[i] + k[i] * s) };
    let k1 = rhs(p, dir, rho, y)?;
    let k2 = rhs(p, dir, rho + 0.5 * h, &axpy(y, &k1, 0.5 * h))?;
    let k3 = rhs(p, dir, rho + 0.5 * h, &axpy(y, &k2, 0.5 * h))?;
    let k4 = rhs(p, dir, rho + h, &axpy(y, &k3, h))?;
    Ok(std::array::from_fn(|i| y[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0)))
}

impl RaySolution {
    fn with_capacity(theta: f64, n: usize) -> Self {
        Self {
            theta,
            rho: Vec::with_capacity(n),
            w1: Vec::with_capacity(n),
            w1p: Vec::with_capacity(n),
            w2: Vec::with_capacity(n),
            w2p: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, rho: f64, y: &State) {
        self.rho.push(rho);
        self.w1.push(y[0]);
        self.w1p.push(y[1]);
        self.w2.push(y[2]);
        self.w2p.push(y[3]);
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn z(&self, k: usize) -> Complex64 {
        Complex64::from_polar(self.rho[k], self.theta)
    }

    pub fn wronskian(&self, k: usize) -> Complex64 {
        self.w1[k] * self.w2p[k] - self.w1p[k] * self.w2[k]
    }

    /// Largest deviation of the Wronskian from 1 over all nodes.
    pub fn wronskian_drift(&self) -> f64 {
        (0..self.len()).map(|k| (self.wronskian(k) - ONE).norm()).fold(0.0, f64::max)
    }

    /// CSV with header `rho,w1_re,w1_im,w1p_re,w1p_im,w2_re,w2_im,w2p_re,w2p_im`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["rho", "w1_re", "w1_im", "w1p_re", "w1p_im", "w2_re", "w2_im", "w2p_re", "w2p_im"])?;
        for k in 0..self.len() {
            let row = [self.rho[k], self.w1[k].re, self.w1[k].im, self.w1p[k].re, self.w1p[k].im,
                self.w2[k].re, self.w2[k].im, self.w2p[k].re, self.w2p[k].im];
            w.write_record(row.iter().map(|&v| fmt_num(v)))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest round-trip text for a CSV cell; scientific outside `[1e-4, 1e15)`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Integrates from the origin to `r_max` in `n_steps` equal RK4 steps.
pub fn solve_ray(p: &PotentialP, theta: f64, r_max: f64, n_steps: usize) -> Result<RaySolution, OdeError> {
    if !(0.0 < r_max && r_max < 1.0) || n_steps < 64 {
        return Err(OdeError::InvalidArgs(format!(
            "need 0 < r_max < 1 and n_steps ≥ 64 (got {r_max}, {n_steps})"
        )));
    }
    let dir = Complex64::from_polar(1.0, theta);
    let h = r_max / n_steps as f64;
    let mut y: State = [ONE, ZERO, ZERO, ONE];
    let mut sol = RaySolution::with_capacity(theta, n_steps + 1);
    sol.push(0.0, &y);
    for k in 0..n_steps {
        y = rk4_step(p, dir, k as f64 * h, h, &y)?;
        sol.push(if k + 1 == n_steps { r_max } else { (k + 1) as f64 * h }, &y);
    }
    Ok(sol)
}

/// Integrates to each radius in `radii` (increasing), using steps no longer
/// than `max_step`. The solution holds the origin plus one node per radius.
pub fn solve_ray_at(p: &PotentialP, theta: f64, radii: &[f64], max_step: f64) -> Result<RaySolution, OdeError> {
    if radii.windows(2).any(|w| w[0] > w[1]) || radii.first().is_some_and(|&r| r < 0.0) || !(max_step > 0.0) {
        return Err(OdeError::InvalidArgs("radii must be nonnegative and increasing".into()));
    }
    let dir = Complex64::from_polar(1.0, theta);
    let mut y: State = [ONE, ZERO, ZERO, ONE];
    let mut sol = RaySolution::with_capacity(theta, radii.len() + 1);
    sol.push(0.0, &y);
    let mut at = 0.0;
    for &r in radii {
        let n = ((r - at) / max_step).ceil().max(1.0) as usize;
        let h = (r - at) / n as f64;
        for k in 0..n {
            y = rk4_step(p, dir, at + k as f64 * h, h, &y)?;
        }
        at = r;
        sol.push(r, &y);
    }
    Ok(sol)
}

/// Five-point first and second derivative in ρ at node `k` (uniform spacing).
fn stencil(v: &[Complex64], k: usize, h: f64) -> (Complex64, Complex64) {
    let (m2, m1, c, p1, p2) = (v[k - 2], v[k - 1], v[k], v[k + 1], v[k + 2]);
    let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    let d2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
    (d1, d2)
}

/// Largest `|S_{w₁/w₂}(z) − 2p(z)|` over interior nodes of a uniform ray.
///
/// The ratio's first derivative comes from the stored values and
/// derivatives; its second and third derivatives are finite differences
/// along the ray. At each node the better-conditioned of `w₂/w₁` and `w₁/w₂`
/// is used; both have the same Schwarzian.
pub fn ratio_schwarzian_check(p: &PotentialP, sol: &RaySolution) -> Result<f64, OdeError> {
    let n = sol.len();
    if n < 5 {
        return Err(OdeError::InvalidArgs("need at least 5 nodes".into()));
    }
    let h = sol.rho[1] - sol.rho[0];
    let e = Complex64::from_polar(1.0, -sol.theta);
    // derivative of a/b from stored values
    let ratio_deriv = |k: usize, flip: bool| {
        let (a, ap, b, bp) = if flip {
            (sol.w1[k], sol.w1p[k], sol.w2[k], sol.w2p[k])
        } else {
            (sol.w2[k], sol.w2p[k], sol.w1[k], sol.w1p[k])
        };
        (ap * b - a * bp) / (b * b)
    };
    let mut worst: f64 = 0.0;
    for k in 2..n - 2 {
        let flip = sol.w2[k].norm() > sol.w1[k].norm();
        let g1: Vec<Complex64> = (k - 2..=k + 2).map(|j| ratio_deriv(j, flip)).collect();
        let (dr1, dr2) = stencil(&g1, 2, h);
        let (g2, g3) = (e * dr1, e * e * dr2);
        let q = g2 / g1[2];
        let s = g3 / g1[2] - 1.5 * q * q;
        worst = worst.max((s - 2.0 * p.eval(sol.z(k))?).norm());
    }
    Ok(worst)
}

/// Composite Simpson on uniform nodes (odd count), trapezoid otherwise.
fn integrate_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    if n.is_multiple_of(2) && n >= 2 {
        let inner: f64 = values[1..n]
            .iter()
            .enumerate()
            .map(|(i, v)| if i % 2 == 0 { 4.0 * v } else { 2.0 * v })
            .sum();
        h / 3.0 * (values[0] + inner + values[n])
    } else {
        h * (0.5 * values[0] + values[1..n].iter().sum::<f64>() + 0.5 * values[n])
    }
}

/// Both sides of the radial energy identity for `w = w₂`:
///
/// `|w|² Re(z w'/w) = r ∫₀^r |w'|² dρ − r ∫₀^r Re(ρ² e^{2iθ} p) |w|²/ρ² dρ`
///
/// at `z = re^{iθ}`. Returns `(lhs, rhs)`.
pub fn gabriel_identity_sides(p: &PotentialP, theta: f64, r: f64, n: usize) -> Result<(f64, f64), OdeError> {
    let n = n + n % 2;
    let sol = solve_ray(p, theta, r, n)?;
    let z = sol.z(n);
    let w = sol.w2[n];
    if w.norm() < 1e-12 {
        return Err(OdeError::WZeroAtEvaluationPoint { at: z });
    }
    let lhs = (z * sol.w2p[n] * w.conj()).re;
    let e2 = Complex64::from_polar(1.0, 2.0 * sol.theta);
    let kinetic: Vec<f64> = sol.w2p.iter().map(|v| v.norm_sqr()).collect();
    // ρ² cancels against |w|²/ρ², which also removes the 0/0 at the origin
    let potential = (0..=n)
        .map(|k| Ok((e2 * p.eval(sol.z(k))?).re * sol.w2[k].norm_sqr()))
        .collect::<Result<Vec<f64>, OdeError>>()?;
    let h = r / n as f64;
    let rhs = r * integrate_uniform(&kinetic, h) - r * integrate_uniform(&potential, h);
    Ok((lhs, rhs))
}

pub fn gabriel_identity_residual(p: &PotentialP, theta: f64, r: f64, n: usize) -> Result<f64, OdeError> {
    let (lhs, rhs) = gabriel_identity_sides(p, theta, r, n)?;
    Ok((lhs - rhs).abs())
}

/// Real profile `y(ρ)` with derivative on uniform nodes `0 = ρ₀ < … < ρ_n = r`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealProfile {
    pub rho: Vec<f64>,
    pub y: Vec<f64>,
    pub yp: Vec<f64>,
}

impl RealProfile {
    pub fn sample(y: impl Fn(f64) -> f64, yp: impl Fn(f64) -> f64, r: f64, n: usize) -> Result<Self, OdeError> {
        if !(r > 0.0) || n < 2 {
            return Err(OdeError::InvalidArgs(format!("need r > 0 and n ≥ 2 (got {r}, {n})")));
        }
        let rho: Vec<f64> = (0..=n).map(|k| r * k as f64 / n as f64).collect();
        let prof = Self { y: rho.iter().map(|&t| y(t)).collect(), yp: rho.iter().map(|&t| yp(t)).collect(), rho };
        if prof.y[0].abs() > 1e-12 {
            return Err(OdeError::ProfileNotVanishing(prof.y[0]));
        }
        Ok(prof)
    }
}

/// `r ∫₀^r y'² dρ − c r ∫₀^r y² dρ − r√c cot(r√c) y(r)²`, nonnegative for
/// every admissible profile; zero for `y = c^{−1/2} sin(ρ√c)`.
pub fn lemma42_functional(y: &RealProfile, c: f64) -> Result<f64, OdeError> {
    let n = y.rho.len() - 1;
    let r = y.rho[n];
    if !(0.0 < r && r < 1.0) || !(c > 0.0) {
        return Err(OdeError::InvalidArgs(format!("need 0 < r < 1 and c > 0 (got {r}, {c})")));
    }
    let t = r * c.sqrt();
    let nearest = (t / PI).round() * PI;
    if nearest > 0.0 && (t - nearest).abs() < 1e-9 || t >= PI {
        return Err(OdeError::CotSingular(t));
    }
    let h = r / n as f64;
    let kinetic: Vec<f64> = y.yp.iter().map(|v| v * v).collect();
    let mass: Vec<f64> = y.y.iter().map(|v| v * v).collect();
    Ok(r * integrate_uniform(&kinetic, h) - c * r * integrate_uniform(&mass, h) - t / t.tan() * y.y[n] * y.y[n])
}

/// `Re(z√c cot(z√c)) − (α+1)/2` over the grid, with the origin's limit
/// `(1−α)/2` as an extra sample.
pub fn lemma_l2_margin(c: f64, alpha: OrderAlpha, grid: &GridSpec) -> Result<ClassVerdict, OdeError> {
    grid.validate().map_err(|e| OdeError::InvalidArgs(e.to_string()))?;
    let s = c.sqrt();
    let half = 0.5 * (alpha.value() + 1.0);
    let samples = grid.points().into_iter().map(|z| {
        let w = z * s;
        (z, (w * w.cos() / w.sin()).re - half)
    });
    let origin = (ZERO, 1.0 - half);
    Ok(ClassVerdict::from_samples(std::iter::once(origin).chain(samples)))
}

/// A real `x₀ ∈ (√(c_α/c), min(1, π/(2√c)))` where
/// `x₀√c cot(x₀√c) ≤ (α+1)/2 − 1e-10`, showing that `√c cot(√c z)` is not
/// meromorphically convex of order α once `c > c_α`.
pub fn theorem1b_witness(alpha: OrderAlpha, c: f64) -> Result<f64, OdeError> {
    let ca = c_alpha(alpha, BISECTION_TOL);
    if !(c > ca) {
        return Err(OdeError::CNotAboveCAlpha { c, c_alpha: ca });
    }
    let s = c.sqrt();
    let (lo, hi) = ((ca / c).sqrt(), (FRAC_PI_2 / s).min(1.0));
    let half = 0.5 * (alpha.value() + 1.0);
    let slack = |x: f64| half - x * s / (x * s).tan();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        if slack(x) >= 1e-10 {
            return Ok(x);
        }
        let next = 0.5 * (x + hi);
        if next >= hi {
            break;
        }
        x = next;
    }
    Err(OdeError::NoWitness { lo, hi })
}

/// `g = u/(cu + v)` with `c = −a₂`, where `u = w₂` and `v = w₁` solve
/// `w'' + p w = 0`. Then `g ∈ A`, `g''(0)/2 = a₂` and `S_g = 2p`.
///
/// Each evaluation integrates the ray through the query point with steps of
/// at most `r_max / n_steps`.
#[derive(Debug, Clone)]
pub struct Theorem2Map {
    pub p: PotentialP,
    pub c: Complex64,
    pub r_max: f64,
    pub n_steps: usize,
}

/// Values of the construction at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem2Point {
    pub g: Complex64,
    /// `(cu' + v')/(cu + v)`.
    pub log_ratio: Complex64,
    /// `1 + z g''/g' = 1 − 2z (cu' + v')/(cu + v)`.
    pub convexity: Complex64,
    pub jet: Jet3,
}

pub fn theorem2_function(p: PotentialP, a2: Complex64, r_max: f64, n_steps: usize) -> Result<Theorem2Map, OdeError> {
    if a2.norm() >= 1.0 || !(0.0 < r_max && r_max < 1.0) || n_steps < 64 {
        return Err(OdeError::InvalidArgs(format!(
            "need |a2| < 1, 0 < r_max < 1, n_steps ≥ 64 (got {a2}, {r_max}, {n_steps})"
        )));
    }
    Ok(Theorem2Map { p, c: -a2, r_max, n_steps })
}

impl Theorem2Map {
    pub fn point(&self, z: Complex64) -> Result<Theorem2Point, OdeError> {
        let r = z.norm();
        if r > self.r_max * (1.0 + 1e-12) {
            return Err(OdeError::InvalidArgs(format!("|z| = {r} exceeds r_max = {}", self.r_max)));
        }
        let sol = solve_ray_at(&self.p, z.arg(), &[r], self.r_max / self.n_steps as f64)?;
        let (v, vp, u, up) = (sol.w1[1], sol.w1p[1], sol.w2[1], sol.w2p[1]);
        let d = self.c * u + v;
        if d.norm() < 1e-12 {
            return Err(OdeError::DenominatorVanishes { at: z });
        }
        let m = (self.c * up + vp) / d;
        let d1 = (up * v - u * vp) / (d * d);
        let pz = self.p.eval(z)?;
        let jet = Jet3::new(u / d, d1, -2.0 * m * d1, d1 * (2.0 * pz + 6.0 * m * m));
        Ok(Theorem2Point { g: jet.d0, log_ratio: m, convexity: 1.0 - 2.0 * z * m, jet })
    }
}

impl JetSource for Theorem2Map {
    fn jet(&self, z: Complex64) -> Result<Jet3, SampleError> {
        match self.point(z) {
            Ok(pt) => Ok(pt.jet),
            Err(OdeError::DenominatorVanishes { at }) => Err(SampleError::Pole { at }),
            Err(e) => Err(SampleError::Domain { at: z, detail: e.to_string() }),
        }
    }
}

/// `Re(z w₂'/w₂)` at node `k` of a ray.
pub fn w2_starlike_quantity(sol: &RaySolution, k: usize) -> Complex64 {
    sol.z(k) * sol.w2p[k] / sol.w2[k]
}

/// Largest `|Re(1 + z f''/f') − (1 − 2 Re(z w₂'/w₂))|` over nodes with
/// `ρ ≥ rho_min`, where `f = w₁/w₂` and `f''/f'` is obtained by finite
/// differences of `f'` along the ray. The ray must have uniform spacing.
pub fn convexity_identity_residual(sol: &RaySolution, rho_min: f64) -> f64 {
    let h = sol.rho[1] - sol.rho[0];
    let e = Complex64::from_polar(1.0, -sol.theta);
    let fp: Vec<Complex64> = (0..sol.len())
        .map(|k| (sol.w1p[k] * sol.w2[k] - sol.w1[k] * sol.w2p[k]) / (sol.w2[k] * sol.w2[k]))
        .collect();
    (2..sol.len() - 2)
        .filter(|&k| sol.rho[k] >= rho_min)
        .map(|k| {
            let (d, _) = stencil(&fp, k, h);
            let lhs = (1.0 + sol.z(k) * e * d / fp[k]).re;
            let rhs = 1.0 - 2.0 * w2_starlike_quantity(sol, k).re;
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ParamEnv;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn potential(text: &str, env: ParamEnv) -> PotentialP {
        PotentialP::Expr(BoundExpr::parse(text, env))
    }

    #[test]
    fn free_equation() {
        let sol = solve_ray(&PotentialP::constant(0.0), 0.0, 0.9, 64).unwrap();
        for k in 0..sol.len() {
            assert!((sol.w1[k] - ONE).norm() < 1e-12);
            assert!((sol.w2[k] - c(sol.rho[k], 0.0)).norm() < 1e-12);
        }
        assert_eq!(*sol.rho.last().unwrap(), 0.9);
    }

    #[test]
    fn constant_potential_closed_form() {
        let cc: f64 = 0.7;
        let s = cc.sqrt();
        let theta = 1.1;
        let sol = solve_ray(&PotentialP::constant(cc), theta, 0.95, 1024).unwrap();
        for k in 0..sol.len() {
            let z = sol.z(k);
            assert!((sol.w1[k] - (s * z).cos()).norm() < 1e-8);
            assert!((sol.w2[k] - (s * z).sin() / s).norm() < 1e-8);
        }
        assert!(sol.wronskian_drift() < 1e-9);
    }

    #[test]
    fn linear_potential_against_taylor_recurrence() {
        // w'' = −z w, w(0) = 0, w'(0) = 1: a_{k+2} = −a_{k−1}/((k+2)(k+1))
        let mut a = vec![0.0; 42];
        a[1] = 1.0;
        for k in 1..40 {
            a[k + 2] = -a[k - 1] / ((k + 2) as f64 * (k + 1) as f64);
        }
        let p = potential("z", ParamEnv::new());
        let theta = 0.6;
        let sol = solve_ray(&p, theta, 0.9, 256).unwrap();
        let z = sol.z(sol.len() - 1);
        let series: Complex64 = a.iter().rev().fold(ZERO, |acc, &ak| acc * z + ak);
        assert!((sol.w2[sol.len() - 1] - series).norm() < 1e-8);
    }

    #[test]
    fn solve_ray_arguments() {
        let p = PotentialP::constant(1.0);
        assert!(solve_ray(&p, 0.0, 1.0, 128).is_err());
        assert!(solve_ray(&p, 0.0, 0.5, 32).is_err());
        let bad = potential("1/(z - 0.5)", ParamEnv::new());
        assert!(matches!(solve_ray(&bad, 0.0, 0.5, 64), Err(OdeError::PotentialSingularOnRay { .. })));
    }

    #[test]
    fn piecewise_matches_uniform() {
        let p = potential("0.4*z^2", ParamEnv::new());
        let uni = solve_ray(&p, 0.3, 0.8, 400).unwrap();
        let pw = solve_ray_at(&p, 0.3, &[0.2, 0.5, 0.8], 0.002).unwrap();
        assert!((pw.w2[3] - uni.w2[400]).norm() < 1e-12);
        assert!((pw.w1[1] - uni.w1[100]).norm() < 1e-12);
    }

    #[test]
    fn ratio_schwarzian_examples() {
        let p = PotentialP::constant(0.5);
        let sol = solve_ray(&p, 0.4, 0.95, 1024).unwrap();
        assert!(ratio_schwarzian_check(&p, &sol).unwrap() < 1e-6);
        let p = PotentialP::constant(0.0);
        let sol = solve_ray(&p, 2.0, 0.95, 1024).unwrap();
        assert!(ratio_schwarzian_check(&p, &sol).unwrap() < 1e-10);
        let p = potential("0.3*z^2", ParamEnv::new());
        let sol = solve_ray(&p, 2.5, 0.95, 1024).unwrap();
        assert!(ratio_schwarzian_check(&p, &sol).unwrap() < 1e-5);
    }

    #[test]
    fn gabriel_examples() {
        // closed form for p ≡ c on θ = 0: w = sin(√c ρ)/√c
        let cc: f64 = 0.8;
        let (s, r) = (cc.sqrt(), 0.9);
        let (lhs, rhs) = gabriel_identity_sides(&PotentialP::constant(cc), 0.0, r, 1024).unwrap();
        let w = (s * r).sin() / s;
        let lhs_exact = w * r * (s * r).cos();
        let int_cos2 = 0.5 * r + (2.0 * s * r).sin() / (4.0 * s);
        let int_sin2 = (0.5 * r - (2.0 * s * r).sin() / (4.0 * s)) / cc;
        let rhs_exact = r * int_cos2 - r * cc * int_sin2;
        assert!((lhs - lhs_exact).abs() < 1e-10 && (rhs - rhs_exact).abs() < 1e-10);
        assert!((lhs_exact - rhs_exact).abs() < 1e-14);

        for (theta, r) in [(0.0, 0.3), (2.0, 0.7)] {
            let res = gabriel_identity_residual(&PotentialP::constant(0.0), theta, r, 128).unwrap();
            assert!(res < 1e-10);
        }
        let p = potential("0.5*z^2", ParamEnv::new());
        let res = gabriel_identity_residual(&p, PI / 3.0, 0.8, 1024).unwrap();
        let res2 = gabriel_identity_residual(&p, PI / 3.0, 0.8, 2048).unwrap();
        assert!(res < 1e-5 && res2 <= res.max(1e-14) * 1.01 + 1e-13);
    }

    #[test]
    fn lemma42_examples() {
        let cc: f64 = 1.0;
        let s = cc.sqrt();
        let eq = RealProfile::sample(|t| (t * s).sin() / s, |t| (t * s).cos(), 0.9, 2048).unwrap();
        assert!(lemma42_functional(&eq, cc).unwrap().abs() < 1e-8);

        // y = ρ, c = 1, r = 1/2: r² − r⁴/3 − r³ cot r
        let r: f64 = 0.5;
        let exact = r * r - r.powi(4) / 3.0 - r.powi(3) / r.tan();
        let lin = RealProfile::sample(|t| t, |_| 1.0, r, 64).unwrap();
        let val = lemma42_functional(&lin, cc).unwrap();
        assert!(exact > 0.0 && (val - exact).abs() < 1e-12, "{val} vs {exact}");

        let zero = RealProfile::sample(|_| 0.0, |_| 0.0, 0.5, 16).unwrap();
        assert_eq!(lemma42_functional(&zero, 1.0).unwrap(), 0.0);

        assert!(RealProfile::sample(|_| 1.0, |_| 0.0, 0.5, 16).is_err());
        let big = RealProfile::sample(|t| t, |_| 1.0, 0.99, 16).unwrap();
        assert!(matches!(lemma42_functional(&big, (PI / 0.99).powi(2)), Err(OdeError::CotSingular(_))));
    }

    #[test]
    fn lemma_l2_examples() {
        let grid = GridSpec::new(1e-3, 0.99, 24, 64).unwrap();
        let a0 = OrderAlpha::new(0.0).unwrap();
        let c0 = c_alpha(a0, BISECTION_TOL);
        let v = lemma_l2_margin(c0, a0, &grid).unwrap();
        assert!(v.holds && v.worst_margin < 0.02 && v.witness.im.abs() < 1e-12, "{v:?}");
        let a5 = OrderAlpha::new(0.5).unwrap();
        let v = lemma_l2_margin(0.1, a5, &grid).unwrap();
        assert!(v.holds && v.worst_margin > 0.15);
        let tiny = GridSpec::new(0.5, 0.6, 8, 8).unwrap();
        let v = lemma_l2_margin(0.1, a5, &tiny).unwrap();
        assert!(v.worst_margin < 0.25);
        let v = lemma_l2_margin(1e-9, a5, &tiny).unwrap();
        assert!((v.worst_margin - 0.25).abs() < 1e-6);
    }

    #[test]
    fn witness_examples() {
        let a0 = OrderAlpha::new(0.0).unwrap();
        let c0 = c_alpha(a0, BISECTION_TOL);
        let x = theorem1b_witness(a0, 1.1 * c0).unwrap();
        assert!(x > (1.0f64 / 1.1).sqrt() && x < 1.0);
        let t = x * (1.1 * c0).sqrt();
        assert!(2.0 * t - t.tan() < 0.0);
        assert!(matches!(theorem1b_witness(a0, c0), Err(OdeError::CNotAboveCAlpha { .. })));
    }

    #[test]
    fn theorem2_mobius_case() {
        let map = theorem2_function(PotentialP::constant(0.0), c(-0.3, 0.0), 0.95, 256).unwrap();
        for z in [c(0.5, 0.2), c(-0.3, -0.6), c(0.0, 0.0)] {
            let want = z / (0.3 * z + 1.0);
            assert!((map.point(z).unwrap().g - want).norm() < 1e-12);
        }
        let j = map.point(c(0.0, 0.0)).unwrap().jet;
        assert!((j.d2 / 2.0 - c(-0.3, 0.0)).norm() < 1e-12);

        let id = theorem2_function(PotentialP::constant(0.0), ZERO, 0.95, 128).unwrap();
        assert!((id.point(c(0.4, 0.1)).unwrap().g - c(0.4, 0.1)).norm() < 1e-14);
        assert!(theorem2_function(PotentialP::constant(0.0), c(1.0, 0.0), 0.9, 128).is_err());
    }

    #[test]
    fn theorem2_jet_is_consistent() {
        let p = potential("0.1*z + 0.05", ParamEnv::new());
        let map = theorem2_function(p, c(0.1, 0.05), 0.95, 512).unwrap();
        let z0 = c(0.3, -0.2);
        let fd = crate::jets::fd_jet_oracle(|z| map.point(z).unwrap().g, z0, 1e-3);
        let j = map.point(z0).unwrap().jet;
        for (a, b) in j.components().iter().zip(fd.components()) {
            assert!((a - b).norm() < 1e-6 * (1.0 + a.norm()), "{a} vs {b}");
        }
        let s = crate::classify::schwarzian_of_jet(&j, z0).unwrap();
        assert!((s - 2.0 * (0.1 * z0 + 0.05)).norm() < 1e-12);
    }

    #[test]
    fn convexity_identity_along_ray() {
        let p = potential("0.6*z^2 + 0.3", ParamEnv::new());
        let sol = solve_ray(&p, 0.9, 0.95, 4096).unwrap();
        let res = convexity_identity_residual(&sol, 0.1);
        assert!(res < 1e-7, "{res}");
    }

    #[test]
    fn csv_export() {
        let sol = solve_ray(&PotentialP::constant(0.0), 0.0, 0.5, 64).unwrap();
        let mut buf = Vec::new();
        sol.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("rho,w1_re,w1_im,w1p_re,w1p_im,w2_re,w2_im,w2p_re,w2p_im"));
        assert_eq!(lines.next(), Some("0,1,0,0,0,0,0,1,0"));
        assert_eq!(text.lines().count(), 66);
    }
}
