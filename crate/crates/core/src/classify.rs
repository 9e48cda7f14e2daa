//! Pointwise Schwarzian evaluation and sampled membership checks on the disk.
//!
//! Every check samples its defining inequality on a polar grid and reports the
//! smallest slack seen. A passing verdict certifies the inequality on the
//! samples only.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::constants::{BetaParam, OrderAlpha};
use crate::expr::{EvalError, FnExpr, ParamEnv};
use crate::jets::{Jet3, JetError};

/// `|f'|` at or below this is treated as a critical point.
pub const UNIVALENCE_GUARD: f64 = 1e-12;
/// Open inequalities pass only when the slack exceeds this.
pub const EPS_STRICT: f64 = 1e-12;
const WINDING_SAMPLES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("pole at {at}")]
    Pole { at: Complex64 },
    #[error("{detail}")]
    Domain { at: Complex64, detail: String },
    #[error("parameter `{0}` has no binding")]
    MissingParameter(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("function is not locally univalent at {at} (|f'| = {modulus:e})")]
    NotLocallyUnivalent { at: Complex64, modulus: f64 },
    #[error("pole inside the sampled region near {at}")]
    PoleInGrid { at: Complex64 },
    #[error("f vanishes inside the punctured disk near {at}")]
    ZeroOfF { at: Complex64 },
    #[error("g vanishes away from the origin near {at}")]
    ZeroOfG { at: Complex64 },
    #[error("evaluation failed at {at}: {source}")]
    Sample { at: Complex64, source: SampleError },
}

impl ClassifyError {
    /// Point at which the failure was detected, if any.
    pub fn witness(&self) -> Option<Complex64> {
        match self {
            ClassifyError::InvalidGrid(_) => None,
            ClassifyError::NotLocallyUnivalent { at, .. }
            | ClassifyError::PoleInGrid { at }
            | ClassifyError::ZeroOfF { at }
            | ClassifyError::ZeroOfG { at }
            | ClassifyError::Sample { at, .. } => Some(*at),
        }
    }
}

/// Anything that can produce `(f, f', f'', f''')` at a point of the disk.
pub trait JetSource: Sync {
    fn jet(&self, z: Complex64) -> Result<Jet3, SampleError>;
}

/// A parsed expression together with its parameter values.
#[derive(Debug, Clone)]
pub struct BoundExpr {
    pub expr: FnExpr,
    pub env: ParamEnv,
}

impl BoundExpr {
    pub fn new(expr: FnExpr, env: ParamEnv) -> Result<Self, SampleError> {
        if let Some(p) = expr.params().iter().find(|p| env.get(p).is_none()) {
            return Err(SampleError::MissingParameter(p.clone()));
        }
        Ok(Self { expr, env })
    }

    /// Parses `text` and binds it; panics on malformed input. Meant for
    /// fixed expressions in code and tests.
    pub fn parse(text: &str, env: ParamEnv) -> Self {
        let expr = crate::expr::parse(text).unwrap_or_else(|e| panic!("`{text}`: {e}"));
        Self::new(expr, env).unwrap_or_else(|e| panic!("`{text}`: {e}"))
    }

    pub fn value(&self, z: Complex64) -> Result<Complex64, SampleError> {
        self.expr.eval(z, &self.env).map_err(|e| sample_error(e, z))
    }
}

fn sample_error(e: EvalError, z: Complex64) -> SampleError {
    match e {
        EvalError::MissingParameter(p) => SampleError::MissingParameter(p),
        EvalError::Jet { source: JetError::DivisionByZero { .. }, .. } => SampleError::Pole { at: z },
        e @ EvalError::Jet { .. } => SampleError::Domain { at: z, detail: e.to_string() },
    }
}

impl JetSource for BoundExpr {
    fn jet(&self, z: Complex64) -> Result<Jet3, SampleError> {
        self.expr.eval_jet(z, &self.env).map_err(|e| sample_error(e, z))
    }
}

impl<F: Fn(Complex64) -> Result<Jet3, SampleError> + Sync> JetSource for F {
    fn jet(&self, z: Complex64) -> Result<Jet3, SampleError> {
        self(z)
    }
}

/// Polar sampling grid on `r_min ≤ |z| ≤ r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub n_radial: usize,
    pub n_angular: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { r_min: 1e-3, r_max: 0.99, n_radial: 64, n_angular: 256 }
    }
}

impl GridSpec {
    pub fn new(r_min: f64, r_max: f64, n_radial: usize, n_angular: usize) -> Result<Self, ClassifyError> {
        let g = Self { r_min, r_max, n_radial, n_angular };
        g.validate()?;
        Ok(g)
    }

    /// `rmin:rmax:nr:ntheta`.
    pub fn parse(text: &str) -> Result<Self, ClassifyError> {
        let bad = || ClassifyError::InvalidGrid(format!("expected rmin:rmax:nr:ntheta, got `{text}`"));
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let [a, b, c, d] = parts.as_slice() else { return Err(bad()) };
        Self::new(
            a.parse().map_err(|_| bad())?,
            b.parse().map_err(|_| bad())?,
            c.parse().map_err(|_| bad())?,
            d.parse().map_err(|_| bad())?,
        )
    }

    pub fn validate(&self) -> Result<(), ClassifyError> {
        if !(0.0 <= self.r_min && self.r_min < self.r_max && self.r_max < 1.0) {
            return Err(ClassifyError::InvalidGrid(format!(
                "need 0 ≤ r_min < r_max < 1, got {} and {}",
                self.r_min, self.r_max
            )));
        }
        if self.n_radial < 8 || self.n_angular < 8 {
            return Err(ClassifyError::InvalidGrid("need at least 8 radii and 8 angles".into()));
        }
        Ok(())
    }

    /// Radii with `1 − r` geometrically spaced, so samples crowd toward `r_max`.
    pub fn radii(&self) -> Vec<f64> {
        let (a, b) = (1.0 - self.r_min, 1.0 - self.r_max);
        let n = self.n_radial - 1;
        (0..=n)
            .map(|k| match k {
                0 => self.r_min,
                k if k == n => self.r_max,
                k => 1.0 - a * (b / a).powf(k as f64 / n as f64),
            })
            .collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.n_angular).map(|j| TAU * j as f64 / self.n_angular as f64).collect()
    }

    /// Radius-major list of sample points.
    pub fn points(&self) -> Vec<Complex64> {
        let angles = self.angles();
        self.radii()
            .into_iter()
            .flat_map(|r| angles.iter().map(move |&t| Complex64::from_polar(r, t)))
            .collect()
    }
}

/// Outcome of a sampled check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassVerdict {
    pub holds: bool,
    pub worst_margin: f64,
    pub witness: Complex64,
    pub samples: usize,
}

impl Serialize for ClassVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ClassVerdict", 4)?;
        st.serialize_field("holds", &self.holds)?;
        st.serialize_field("worst_margin", &self.worst_margin)?;
        st.serialize_field("witness", &[self.witness.re, self.witness.im])?;
        st.serialize_field("samples", &self.samples)?;
        st.end()
    }
}

impl ClassVerdict {
    /// Reduces `(point, margin)` samples in order; ties keep the earlier point.
    pub fn from_samples(samples: impl IntoIterator<Item = (Complex64, f64)>) -> Self {
        let mut worst = (Complex64::new(0.0, 0.0), f64::INFINITY);
        let mut n = 0;
        for (z, m) in samples {
            n += 1;
            if m < worst.1 || m.is_nan() {
                worst = (z, m);
            }
        }
        Self { holds: worst.1 > EPS_STRICT, worst_margin: worst.1, witness: worst.0, samples: n }
    }
}

/// `f'''/f' − (3/2)(f''/f')²` from a single jet.
pub fn schwarzian_of_jet(j: &Jet3, at: Complex64) -> Result<Complex64, ClassifyError> {
    let d1 = univalent_derivative(j, at)?;
    let q = j.d2 / d1;
    Ok(j.d3 / d1 - 1.5 * q * q)
}

fn univalent_derivative(j: &Jet3, at: Complex64) -> Result<Complex64, ClassifyError> {
    let m = j.d1.norm();
    if m <= UNIVALENCE_GUARD || !m.is_finite() {
        return Err(ClassifyError::NotLocallyUnivalent { at, modulus: m });
    }
    Ok(j.d1)
}

fn jet_at(f: &(impl JetSource + ?Sized), z: Complex64) -> Result<Jet3, ClassifyError> {
    match f.jet(z) {
        Ok(j) if j.is_finite() => Ok(j),
        Ok(_) => Err(ClassifyError::PoleInGrid { at: z }),
        Err(SampleError::Pole { .. }) => Err(ClassifyError::PoleInGrid { at: z }),
        Err(source) => Err(ClassifyError::Sample { at: z, source }),
    }
}

pub fn schwarzian_at(f: &impl JetSource, z: Complex64) -> Result<Complex64, ClassifyError> {
    schwarzian_of_jet(&jet_at(f, z)?, z)
}

/// Evaluates `quantity` at every grid point in parallel, keeping grid order.
fn sample_grid<T: Send>(
    grid: &GridSpec,
    quantity: impl Fn(Complex64) -> Result<T, ClassifyError> + Sync,
) -> Result<Vec<(Complex64, T)>, ClassifyError> {
    grid.validate()?;
    grid.points()
        .into_par_iter()
        .map(|z| quantity(z).map(|v| (z, v)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Largest sampled `|S_f|`, a lower estimate of `sup |S_f| = 2δ`.
pub fn sup_schwarzian(f: &impl JetSource, grid: &GridSpec) -> Result<f64, ClassifyError> {
    let vals = sample_grid(grid, |z| schwarzian_at(f, z).map(|s| s.norm()))?;
    Ok(vals.into_iter().map(|(_, v)| v).fold(0.0, f64::max))
}

/// `1 + z f''/f'`.
fn convexity_quantity(f: &impl JetSource, z: Complex64) -> Result<Complex64, ClassifyError> {
    let j = jet_at(f, z)?;
    let d1 = univalent_derivative(&j, z)?;
    Ok(1.0 + z * j.d2 / d1)
}

/// `−Re(1 + z f''/f') > α` for `f = 1/z + b0 + …`. The origin enters as its
/// limit value `1 − α`.
pub fn check_merom_convex(
    f: &impl JetSource,
    alpha: OrderAlpha,
    grid: &GridSpec,
) -> Result<ClassVerdict, ClassifyError> {
    let a = alpha.value();
    let vals = sample_grid(grid, |z| convexity_quantity(f, z).map(|q| -q.re - a))?;
    let origin = (Complex64::new(0.0, 0.0), 1.0 - a);
    Ok(ClassVerdict::from_samples(std::iter::once(origin).chain(vals)))
}

/// `−Re(z f'/f) > α`, after confirming `f` has no zeros in the sampled disk.
pub fn check_merom_starlike(
    f: &impl JetSource,
    alpha: OrderAlpha,
    grid: &GridSpec,
) -> Result<ClassVerdict, ClassifyError> {
    let a = alpha.value();
    let jets = sample_grid(grid, |z| jet_at(f, z))?;
    if let Some(at) = locate_extra_zero(f, &jets, grid.r_max, -1)? {
        return Err(ClassifyError::ZeroOfF { at });
    }
    let vals = jets.iter().map(|(z, j)| (*z, -(z * j.d1 / j.d0).re - a));
    let origin = (Complex64::new(0.0, 0.0), 1.0 - a);
    Ok(ClassVerdict::from_samples(std::iter::once(origin).chain(vals)))
}

/// `Re(1 + z g''/g') > β` for `g = z + a2 z² + …`.
pub fn check_convex_order(
    g: &impl JetSource,
    order: f64,
    grid: &GridSpec,
) -> Result<ClassVerdict, ClassifyError> {
    let vals = sample_grid(grid, |z| convexity_quantity(g, z).map(|q| q.re - order))?;
    Ok(ClassVerdict::from_samples(vals))
}

/// `Re(z g'/g) > β`, with the limit value `1` at the origin.
pub fn check_starlike_order(
    g: &impl JetSource,
    order: f64,
    grid: &GridSpec,
) -> Result<ClassVerdict, ClassifyError> {
    let jets = sample_grid(grid, |z| jet_at(g, z))?;
    if let Some(at) = locate_extra_zero(g, &jets, grid.r_max, 1)? {
        return Err(ClassifyError::ZeroOfG { at });
    }
    let vals = jets.iter().map(|(z, j)| (*z, (z * j.d1 / j.d0).re - order));
    let origin = (Complex64::new(0.0, 0.0), 1.0 - order);
    Ok(ClassVerdict::from_samples(std::iter::once(origin).chain(vals)))
}

/// `−β/(2β−3) < Re(1 + z g''/g') < β`. At β = 3/2 only the upper bound
/// applies, at β = ∞ only the lower bound `−1/2`.
pub fn check_c_beta(
    g: &impl JetSource,
    beta: BetaParam,
    grid: &GridSpec,
) -> Result<ClassVerdict, ClassifyError> {
    let (lo, hi) = (beta.lower(), beta.upper());
    let vals = sample_grid(grid, |z| {
        let q = convexity_quantity(g, z)?.re;
        let upper = hi.map_or(f64::INFINITY, |b| b - q);
        let lower = lo.map_or(f64::INFINITY, |b| q - b);
        Ok(upper.min(lower))
    })?;
    Ok(ClassVerdict::from_samples(vals))
}

/// `K(θ) = ∫₀^θ Re(1 + z g''/g') dθ'` on `|z| = r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KaplanProfile {
    pub r: f64,
    pub thetas: Vec<f64>,
    pub cumulative: Vec<f64>,
    /// Richardson estimate of the quadrature error in `cumulative`.
    pub quadrature_tol: f64,
    /// Smallest `K(θ₂) − K(θ₁)` over all arcs `θ₁ < θ₂`.
    pub min_arc: f64,
}

impl KaplanProfile {
    pub fn total(&self) -> f64 {
        *self.cumulative.last().expect("nonempty profile")
    }
}

fn cumulative_trapezoid(values: &[f64], step: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * step * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Minimum of `K(θ₂) − K(θ₁)` over `θ₁ < θ₂`. Arcs longer than one period
/// only add `K(2π)`, so with `K(2π) > 0` a window of one period suffices; the
/// window wraps through `K(θ + 2π) = K(θ) + K(2π)`.
fn min_arc_integral(cumulative: &[f64]) -> f64 {
    let n = cumulative.len() - 1;
    let total = cumulative[n];
    let at = |k: usize| if k <= n { cumulative[k] } else { cumulative[k - n] + total };
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..=i + n {
            best = best.min(at(j) - at(i));
        }
    }
    best
}

/// Kaplan's close-to-convexity test on one circle. Passes iff every arc
/// integral exceeds `−π` by more than the quadrature tolerance.
pub fn check_kaplan(
    g: &impl JetSource,
    r: f64,
    n_theta: usize,
) -> Result<(bool, KaplanProfile), ClassifyError> {
    if !(0.0 < r && r < 1.0) || n_theta < 256 || !n_theta.is_multiple_of(2) {
        return Err(ClassifyError::InvalidGrid(format!(
            "Kaplan check needs 0 < r < 1 and an even n_theta ≥ 256 (got r = {r}, n_theta = {n_theta})"
        )));
    }
    let thetas: Vec<f64> = (0..=n_theta).map(|k| TAU * k as f64 / n_theta as f64).collect();
    let values = thetas[..n_theta]
        .par_iter()
        .map(|&t| {
            let z = Complex64::from_polar(r, t);
            convexity_quantity(g, z).map(|q| q.re)
        })
        .collect::<Result<Vec<f64>, _>>()?;
    let mut periodic = values.clone();
    periodic.push(values[0]);

    let step = TAU / n_theta as f64;
    let cumulative = cumulative_trapezoid(&periodic, step);
    let coarse: Vec<f64> = periodic.iter().step_by(2).copied().collect();
    let coarse_cum = cumulative_trapezoid(&coarse, 2.0 * step);
    let quadrature_tol = coarse_cum
        .iter()
        .enumerate()
        .map(|(k, c)| (c - cumulative[2 * k]).abs())
        .fold(0.0, f64::max);

    let min_arc = min_arc_integral(&cumulative);
    let profile = KaplanProfile { r, thetas, cumulative, quadrature_tol, min_arc };
    Ok((min_arc > -PI + quadrature_tol, profile))
}

/// Result of probing `Re(1 + zg''/g') < 3/2 ⟹ |zg'/g − 2/3| < 2/3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImplicationProbe {
    /// Margins `2/3 − |zg'/g − 2/3|` over samples where the antecedent holds.
    pub verdict: ClassVerdict,
    /// Samples where the antecedent failed and which were skipped.
    pub skipped: usize,
}

pub fn pr95_implication_probe(g: &impl JetSource, grid: &GridSpec) -> Result<ImplicationProbe, ClassifyError> {
    let two_thirds = Complex64::new(2.0 / 3.0, 0.0);
    let vals = sample_grid(grid, |z| {
        let j = jet_at(g, z)?;
        let d1 = univalent_derivative(&j, z)?;
        let antecedent = (1.0 + z * j.d2 / d1).re < 1.5;
        let margin = 2.0 / 3.0 - (z * d1 / j.d0 - two_thirds).norm();
        Ok((antecedent, margin))
    })?;
    let skipped = vals.iter().filter(|(_, (a, _))| !a).count();
    let origin = (Complex64::new(0.0, 0.0), 1.0 / 3.0);
    let kept = vals.into_iter().filter(|(_, (a, _))| *a).map(|(z, (_, m))| (z, m));
    Ok(ImplicationProbe { verdict: ClassVerdict::from_samples(std::iter::once(origin).chain(kept)), skipped })
}

/// `(|a₂² − a₃|, |S_g(0)|/6)` read off one jet at the origin.
pub fn coefficient_relation_sides(g: &impl JetSource) -> Result<(f64, f64), ClassifyError> {
    let zero = Complex64::new(0.0, 0.0);
    let j = jet_at(g, zero)?;
    let (a2, a3) = (j.d2 / 2.0, j.d3 / 6.0);
    let s0 = schwarzian_of_jet(&j, zero)?;
    Ok(((a2 * a2 - a3).norm(), s0.norm() / 6.0))
}

pub fn coefficient_relation_check(g: &impl JetSource, tol: f64) -> bool {
    coefficient_relation_sides(g).is_ok_and(|(lhs, rhs)| (lhs - rhs).abs() <= tol)
}

/// Winding number of `f` around 0 along `|z| = r`.
pub fn winding_number(f: &(impl JetSource + ?Sized), r: f64) -> Result<i64, ClassifyError> {
    let values = (0..=WINDING_SAMPLES)
        .into_par_iter()
        .map(|k| {
            let z = Complex64::from_polar(r, TAU * k as f64 / WINDING_SAMPLES as f64);
            jet_at(f, z).map(|j| j.d0)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let turn: f64 = values.windows(2).map(|w| (w[1] / w[0]).arg()).sum();
    Ok((turn / TAU).round() as i64)
}

/// Zeros minus poles inside `|z| < r` should equal `expected` (−1 for a
/// class-B function, +1 for class A). When they do not, returns a point near
/// the offending zero.
fn locate_extra_zero(
    f: &impl JetSource,
    jets: &[(Complex64, Jet3)],
    r: f64,
    expected: i64,
) -> Result<Option<Complex64>, ClassifyError> {
    let (z_min, j_min) = jets
        .iter()
        .filter(|(z, _)| z.norm() > 0.0)
        .min_by(|a, b| a.1.d0.norm().total_cmp(&b.1.d0.norm()))
        .copied()
        .expect("grid is nonempty");
    let vanishes = j_min.d0.norm() <= UNIVALENCE_GUARD;
    if !vanishes && winding_number(f, r)? == expected {
        return Ok(None);
    }
    // Newton from the smallest sampled |f|
    let mut z = z_min;
    for _ in 0..50 {
        let Ok(j) = f.jet(z) else { break };
        if j.d1.norm() <= UNIVALENCE_GUARD {
            break;
        }
        let step = j.d0 / j.d1;
        z -= step;
        if step.norm() < 1e-14 || z.norm() >= 1.0 {
            break;
        }
    }
    Ok(Some(if z.norm() < r && z.norm() > 0.0 { z } else { z_min }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{c_alpha, BISECTION_TOL};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bound(text: &str, env: ParamEnv) -> BoundExpr {
        BoundExpr::parse(text, env)
    }

    fn small_grid() -> GridSpec {
        GridSpec::new(1e-3, 0.99, 24, 64).unwrap()
    }

    #[test]
    fn grid_layout() {
        let g = GridSpec::default();
        let r = g.radii();
        assert_eq!(r.len(), 64);
        assert_eq!((r[0], r[63]), (1e-3, 0.99));
        assert!(r.windows(2).all(|w| w[0] < w[1]));
        // spacing shrinks toward r_max
        assert!(r[63] - r[62] < r[1] - r[0]);
        assert_eq!(g.points().len(), 64 * 256);
        assert_eq!(GridSpec::parse("0.001:0.99:64:256").unwrap(), g);
        assert!(GridSpec::parse("0.5:0.2:64:256").is_err());
        assert!(GridSpec::parse("0:0.9:4:256").is_err());
        assert!(GridSpec::parse("0:0.9:64").is_err());
    }

    #[test]
    fn schwarzian_examples() {
        let mob = bound("z/(1-c*z)", ParamEnv::new().with("c", 0.3));
        for z in [c(0.1, 0.2), c(-0.7, 0.3), c(0.0, 0.9)] {
            assert!(schwarzian_at(&mob, z).unwrap().norm() < 1e-12);
        }
        let cot = bound("sqrt(c)*cot(sqrt(c)*z)", ParamEnv::new().with("c", 1.0));
        assert!((schwarzian_at(&cot, c(0.4, 0.0)).unwrap() - c(2.0, 0.0)).norm() < 1e-12);
        let exp = bound("exp(z)", ParamEnv::new());
        assert!((schwarzian_at(&exp, c(0.0, 0.0)).unwrap() - c(-0.5, 0.0)).norm() < 1e-15);
        let sq = bound("z^2", ParamEnv::new());
        assert!(matches!(
            schwarzian_at(&sq, c(0.0, 0.0)),
            Err(ClassifyError::NotLocallyUnivalent { .. })
        ));
    }

    #[test]
    fn sup_schwarzian_examples() {
        let grid = small_grid();
        let mob = bound("z/(1-c*z)", ParamEnv::new().with("c", 0.3));
        assert!(sup_schwarzian(&mob, &grid).unwrap() < 1e-12);
        let cot = bound("sqrt(c)*cot(sqrt(c)*z)", ParamEnv::new().with("c", 0.5));
        let sup = sup_schwarzian(&cot, &grid).unwrap();
        // both terms of S are O(|z|⁻²) at r_min = 1e-3 and cancel
        assert!((sup - 1.0).abs() < 1e-8, "{sup}");
    }

    #[test]
    fn merom_convex_examples() {
        let grid = small_grid();
        let a = OrderAlpha::new(0.4).unwrap();
        let v = check_merom_convex(&bound("1/z", ParamEnv::new()), a, &grid).unwrap();
        assert!(v.holds && (v.worst_margin - 0.6).abs() < 1e-12);

        let ca = c_alpha(a, BISECTION_TOL);
        let at = |k: f64| bound("sqrt(c)*cot(sqrt(c)*z)", ParamEnv::new().with("c", k * ca));
        let v = check_merom_convex(&at(1.0), a, &grid).unwrap();
        assert!(v.holds && v.worst_margin < 0.05, "{v:?}");
        let v = check_merom_convex(&at(1.1), a, &grid).unwrap();
        assert!(!v.holds);
        assert!(v.witness.im.abs() < 1e-12 && v.witness.re > 0.9, "{v:?}");
    }

    #[test]
    fn merom_starlike_examples() {
        let grid = small_grid();
        let a0 = OrderAlpha::new(0.0).unwrap();
        let v = check_merom_starlike(&bound("1/z", ParamEnv::new()), OrderAlpha::new(0.9).unwrap(), &grid).unwrap();
        assert!(v.holds && (v.worst_margin - 0.1).abs() < 1e-12);

        // f = 1/z + 2 vanishes at z = -1/2
        let err = check_merom_starlike(&bound("1/z + 2", ParamEnv::new()), a0, &grid).unwrap_err();
        match err {
            ClassifyError::ZeroOfF { at } => assert!((at - c(-0.5, 0.0)).norm() < 1e-8, "{at}"),
            other => panic!("{other:?}"),
        }

        // 1/z + z: −Re(zf'/f) = Re((1 − z²)/(1 + z²)) > 0, smallest at z = ±r
        let v = check_merom_starlike(&bound("1/z + z", ParamEnv::new()), a0, &grid).unwrap();
        let oracle = |z: Complex64| ((1.0 - z * z) / (1.0 + z * z)).re;
        assert!((v.worst_margin - oracle(v.witness)).abs() < 1e-10);
        let r2 = 0.99f64 * 0.99;
        assert!(v.holds && (v.worst_margin - (1.0 - r2) / (1.0 + r2)).abs() < 1e-12);
        assert!((v.witness - c(0.99, 0.0)).norm() < 1e-12, "{v:?}");
    }

    #[test]
    fn convex_and_starlike_examples() {
        let grid = small_grid();
        let id = bound("z", ParamEnv::new());
        let v = check_convex_order(&id, 0.3, &grid).unwrap();
        assert!(v.holds && (v.worst_margin - 0.7).abs() < 1e-14);
        let v = check_starlike_order(&id, 0.3, &grid).unwrap();
        assert!(v.holds && (v.worst_margin - 0.7).abs() < 1e-14);

        let half_plane = bound("z/(1-z)", ParamEnv::new());
        assert!(check_convex_order(&half_plane, 0.0, &grid).unwrap().holds);

        let koebe = bound("z/(1-z)^2", ParamEnv::new());
        assert!(check_starlike_order(&koebe, 0.0, &grid).unwrap().holds);
        let v = check_starlike_order(&koebe, 0.5, &grid).unwrap();
        assert!(!v.holds && v.witness.re < -0.9 && v.witness.im.abs() < 1e-12, "{v:?}");

        assert!(check_starlike_order(&bound("z + z^2/5", ParamEnv::new()), 0.0, &grid).unwrap().holds);

        // z(1 + 2z) vanishes at -1/2
        let err = check_starlike_order(&bound("z + 2*z^2", ParamEnv::new()), 0.0, &grid).unwrap_err();
        assert!(matches!(err, ClassifyError::ZeroOfG { .. }));
    }

    #[test]
    fn c_beta_examples() {
        let grid = small_grid();
        let g = bound("z/(1-c*z)", ParamEnv::new().with("c", 0.4));
        assert!(check_c_beta(&g, BetaParam::Finite(2.5), &grid).unwrap().holds);
        let g = bound("(2*z - z^2)/(2*(1-z)^2)", ParamEnv::new());
        assert!(check_c_beta(&g, BetaParam::Infinite, &grid).unwrap().holds);
        assert!(!check_c_beta(&g, BetaParam::Finite(1.5), &grid).unwrap().holds);
        let id = bound("z", ParamEnv::new());
        for b in [BetaParam::Finite(1.5), BetaParam::Finite(4.0), BetaParam::Infinite] {
            assert!(check_c_beta(&id, b, &grid).unwrap().holds);
        }
    }

    #[test]
    fn kaplan_identity_and_koebe() {
        let (ok, prof) = check_kaplan(&bound("z", ParamEnv::new()), 0.5, 256).unwrap();
        assert!(ok);
        for (t, k) in prof.thetas.iter().zip(&prof.cumulative) {
            assert!((t - k).abs() < 1e-12);
        }
        let (ok, prof) = check_kaplan(&bound("z/(1-z)^2", ParamEnv::new()), 0.95, 4096).unwrap();
        assert!(ok, "{} {}", prof.min_arc, prof.quadrature_tol);
        assert!((prof.total() - TAU).abs() < 1e-8);
        assert!(check_kaplan(&bound("z", ParamEnv::new()), 0.5, 100).is_err());
    }

    #[test]
    fn kaplan_rejects_non_close_to_convex() {
        // z + z^2 is not locally univalent on |z| = 1/2 (critical point at -1/2)
        let g = bound("z + z^2", ParamEnv::new());
        assert!(check_kaplan(&g, 0.5, 256).is_err());
        // (e^{4z} − 1)/4: Re(1 + zg''/g') = 1 + 4r cos θ, negative on
        // |θ − π| < a with cos a = 1/(4r); that arc integrates to 2a − 8r sin a
        let g = bound("(exp(4*z) - 1)/4", ParamEnv::new());
        let (ok, prof) = check_kaplan(&g, 0.9, 512).unwrap();
        let a = (1.0f64 / 3.6).acos();
        assert!(!ok);
        assert!((prof.min_arc - (2.0 * a - 7.2 * a.sin())).abs() < 1e-3, "{}", prof.min_arc);
        let (ok, _) = check_kaplan(&g, 0.7, 512).unwrap();
        assert!(ok);
    }

    #[test]
    fn implication_probe() {
        let grid = small_grid();
        let p = pr95_implication_probe(&bound("z", ParamEnv::new()), &grid).unwrap();
        assert_eq!(p.skipped, 0);
        assert!((p.verdict.worst_margin - 1.0 / 3.0).abs() < 1e-15);
        let p = pr95_implication_probe(&bound("z/(1-z)^2", ParamEnv::new()), &grid).unwrap();
        assert!(p.skipped > 0);
    }

    #[test]
    fn coefficient_relation() {
        let cubic = bound("z + a*z^2 + b*z^3", ParamEnv::new().with("a", 0.3).with("b", 0.1));
        assert!(coefficient_relation_check(&cubic, 1e-10));
        let mob = bound("z/(1-c*z)", ParamEnv::new().with("c", 0.2));
        let (l, r) = coefficient_relation_sides(&mob).unwrap();
        assert!(l < 1e-15 && r < 1e-15);
        let koebe = bound("z/(1-z)^2", ParamEnv::new());
        let (l, r) = coefficient_relation_sides(&koebe).unwrap();
        assert!((l - 1.0).abs() < 1e-14 && (r - 1.0).abs() < 1e-14);
        assert!((schwarzian_at(&koebe, c(0.0, 0.0)).unwrap().norm() - 6.0).abs() < 1e-13);
    }

    #[test]
    fn verdict_json() {
        let v = ClassVerdict { holds: false, worst_margin: -0.25, witness: c(0.5, -1.0), samples: 3 };
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"holds":false,"worst_margin":-0.25,"witness":[0.5,-1.0],"samples":3}"#
        );
    }
}
