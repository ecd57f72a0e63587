//! Planar sector computations: sine-series Poisson modes, the sign-function
//! series, principal-value double Riesz transforms and closed-form values for
//! piecewise-constant data.

use crate::error::{Error, Result};
use crate::fields::smooth_cutoff;
use crate::quad::{self, Estimate, GaussLegendre};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::sync::Arc;

/// The sector `Ω_mⁱ = {(i-1)π/m < θ < iπ/m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sector {
    m: u32,
    copy_index: u32,
}

impl Sector {
    pub fn new(m: u32, copy_index: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!("sector index m = {m} must be >= 2")));
        }
        if copy_index == 0 || copy_index > 2 * m {
            return Err(Error::InvalidParameter(format!("copy index {copy_index} outside 1..={}", 2 * m)));
        }
        Ok(Self { m, copy_index })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn copy_index(&self) -> u32 {
        self.copy_index
    }

    pub fn opening(&self) -> f64 {
        PI / self.m as f64
    }

    pub fn theta_range(&self) -> (f64, f64) {
        let w = self.opening();
        ((self.copy_index - 1) as f64 * w, self.copy_index as f64 * w)
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        let (a, b) = self.theta_range();
        let t = angle(x);
        x != [0.0, 0.0] && t > a && t < b
    }

    /// The copy containing `x`, or `None` on a boundary ray or at the origin.
    pub fn locate(m: u32, x: [f64; 2]) -> Option<Sector> {
        if m < 2 || x == [0.0, 0.0] {
            return None;
        }
        let w = PI / m as f64;
        let t = angle(x);
        let i = (t / w).floor() as u32;
        let s = Sector { m, copy_index: (i + 1).min(2 * m) };
        s.contains(x).then_some(s)
    }
}

fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Polar angle in `[0, 2π)`.
pub fn angle(x: [f64; 2]) -> f64 {
    let t = x[1].atan2(x[0]);
    if t < 0.0 {
        t + TAU
    } else {
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RieszKernel2 {
    R11,
    R22,
    R12,
}

impl RieszKernel2 {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "11" | "R11" => Ok(Self::R11),
            "22" | "R22" => Ok(Self::R22),
            "12" | "21" | "R12" => Ok(Self::R12),
            _ => Err(Error::InvalidParameter(format!("unknown kernel {s:?}"))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::R11 => "11",
            Self::R22 => "22",
            Self::R12 => "12",
        }
    }

    /// Kernel value at `z`, including the `1/π` prefactor.
    pub fn kernel(&self, z: [f64; 2]) -> f64 {
        let r2 = z[0] * z[0] + z[1] * z[1];
        self.angular(z) / r2
    }

    /// Kernel restricted to vectors of unit length (`z` need not be unit).
    fn angular(&self, z: [f64; 2]) -> f64 {
        let r2 = z[0] * z[0] + z[1] * z[1];
        match self {
            Self::R12 => z[0] * z[1] / (PI * r2),
            Self::R11 => (z[0] * z[0] - z[1] * z[1]) / (2.0 * PI * r2),
            Self::R22 => (z[1] * z[1] - z[0] * z[0]) / (2.0 * PI * r2),
        }
    }

    /// Coefficient of the point-evaluation part of the operator.
    pub fn local_coefficient(&self) -> f64 {
        match self {
            Self::R12 => 0.0,
            Self::R11 | Self::R22 => -0.5,
        }
    }
}

/// Value of the resonance-free mode solution or the logarithmic special case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeCoefficient {
    /// `ψ(r) = coefficient · r^exponent`.
    Power { coefficient: f64, exponent: f64 },
    /// `ψ(r) = coefficient · r² ln r`.
    Log { coefficient: f64 },
}

impl ModeCoefficient {
    pub fn profile(&self, r: f64) -> f64 {
        match *self {
            Self::Power { coefficient, exponent } => coefficient * r.powf(exponent),
            Self::Log { coefficient } => coefficient * r * r * r.ln(),
        }
    }

    pub fn coefficient(&self) -> f64 {
        match *self {
            Self::Power { coefficient, .. } | Self::Log { coefficient } => coefficient,
        }
    }

    pub fn is_log(&self) -> bool {
        matches!(self, Self::Log { .. })
    }
}

/// Radial coefficient of the solution `ψ(r) sin(mθ)` of `Δ(ψ sin mθ) = r^α sin mθ`.
pub fn sector_poisson_mode(m_total: u32, alpha: f64) -> Result<ModeCoefficient> {
    if m_total < 2 {
        return Err(Error::InvalidParameter(format!("mode {m_total} must be >= 2")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside [0, 1]")));
    }
    let p = 2.0 + alpha;
    let m = m_total as f64;
    if p == m {
        if m_total == 2 && alpha == 0.0 {
            return Ok(ModeCoefficient::Log { coefficient: 0.25 });
        }
        return Err(Error::UnsupportedResonance { m: m_total, alpha });
    }
    Ok(ModeCoefficient::Power { coefficient: 1.0 / (p * p - m * m), exponent: p })
}

/// Discrete polar Laplacian of `ψ(r) sin(mθ)` compared with `r^α sin(mθ)`;
/// returns the largest relative error over the radii, evaluated at `θ = π/(2m)`.
pub fn polar_laplacian_residual(m_total: u32, alpha: f64, radii: &[f64], h: f64) -> Result<f64> {
    let mode = sector_poisson_mode(m_total, alpha)?;
    let m = m_total as f64;
    let theta = PI / (2.0 * m);
    let u = |r: f64, t: f64| mode.profile(r) * (m * t).sin();
    let mut worst = 0.0f64;
    for &r in radii {
        let urr = (u(r + h, theta) - 2.0 * u(r, theta) + u(r - h, theta)) / (h * h);
        let ur = (u(r + h, theta) - u(r - h, theta)) / (2.0 * h);
        let utt = (u(r, theta + h) - 2.0 * u(r, theta) + u(r, theta - h)) / (h * h);
        let lap = urr + ur / r + utt / (r * r);
        let target = r.powf(alpha) * (m * theta).sin();
        worst = worst.max(((lap - target) / target).abs());
    }
    Ok(worst)
}

/// Partial sum of `Σ_{k<K} sin(2(2k+1)θ)/(2k+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub raw: f64,
    /// `raw · 4/π`, which tends to `sgn(sin 2θ)`.
    pub normalized: f64,
}

pub fn bahouri_chemin_partial_sum(theta: f64, k_terms: usize) -> Result<SeriesSum> {
    if k_terms == 0 {
        return Err(Error::InvalidParameter("series needs at least one term".into()));
    }
    let mut acc = quad::Neumaier::default();
    for k in 0..k_terms {
        let n = (2 * k + 1) as f64;
        acc.add((2.0 * n * theta).sin() / n);
    }
    let raw = acc.sum();
    Ok(SeriesSum { raw, normalized: raw / FRAC_PI_4 })
}

/// Scaling of the sign function fed to the logarithmic-slope experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum BcNormalization {
    /// `χ(|x|) sgn(x₁x₂)`.
    #[default]
    Normalized,
    /// `χ(|x|) (π/4) sgn(x₁x₂)`, the pointwise limit of the raw series.
    RawSeries,
}

impl BcNormalization {
    pub fn scale(&self) -> f64 {
        match self {
            Self::Normalized => 1.0,
            Self::RawSeries => FRAC_PI_4,
        }
    }
}

type Eval2 = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;
type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct SineTerm {
    pub mode: u32,
    pub profile: Profile,
}

#[derive(Clone)]
pub enum Representation {
    Evaluator(Eval2),
    SineSeries(Vec<SineTerm>),
}

/// Scalar function on the plane, with the geometric data the quadrature
/// needs: rays from the origin across which it jumps, circles `|y| = c` used
/// as quadrature breakpoints, and its support radius.
#[derive(Clone)]
pub struct SectorFunction2 {
    repr: Representation,
    cutoff: bool,
    rays: Vec<f64>,
    circles: Vec<f64>,
    support_radius: f64,
}

impl SectorFunction2 {
    pub fn from_evaluator<F: Fn([f64; 2]) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Self {
            repr: Representation::Evaluator(Arc::new(f)),
            cutoff: false,
            rays: Vec::new(),
            circles: Vec::new(),
            support_radius: f64::INFINITY,
        }
    }

    pub fn sine_series(terms: Vec<SineTerm>) -> Result<Self> {
        if terms.iter().any(|t| t.mode == 0) {
            return Err(Error::InvalidParameter("series modes must be positive".into()));
        }
        Ok(Self {
            repr: Representation::SineSeries(terms),
            cutoff: false,
            rays: Vec::new(),
            circles: Vec::new(),
            support_radius: f64::INFINITY,
        })
    }

    /// Multiplies by `χ(|x|)`, which makes the support radius at most 2.
    pub fn with_cutoff(mut self) -> Self {
        self.cutoff = true;
        self.support_radius = self.support_radius.min(2.0);
        self.circles.extend([1.0, 2.0]);
        self
    }

    pub fn with_rays(mut self, angles: &[f64]) -> Self {
        self.rays.extend(angles.iter().map(|a| a.rem_euclid(TAU)));
        self
    }

    pub fn with_circles(mut self, radii: &[f64]) -> Self {
        self.circles.extend_from_slice(radii);
        self
    }

    pub fn with_support(mut self, radius: f64) -> Self {
        self.support_radius = radius;
        self
    }

    pub fn zero() -> Self {
        Self::from_evaluator(|_| 0.0).with_support(0.0)
    }

    /// `1_{Ω₄¹} - 1_{Ω₄⁵}`.
    pub fn odd_indicator_omega4() -> Self {
        Self::from_evaluator(|x| match Sector::locate(4, x).map(|s| s.copy_index()) {
            Some(1) => 1.0,
            Some(5) => -1.0,
            _ => 0.0,
        })
        .with_rays(&[0.0, FRAC_PI_4, PI, 5.0 * FRAC_PI_4])
    }

    /// `Σᵢ (-1)^(i-1) 1_{Ω₄ⁱ}`.
    pub fn checkerboard_r4() -> Self {
        Self::from_evaluator(|x| match Sector::locate(4, x) {
            Some(s) if s.copy_index() % 2 == 1 => 1.0,
            Some(_) => -1.0,
            None => 0.0,
        })
        .with_rays(&(0..8).map(|k| k as f64 * FRAC_PI_4).collect::<Vec<_>>())
    }

    /// `scale · χ(|x|) sgn(x₁x₂)`.
    pub fn bc_sign(norm: BcNormalization) -> Self {
        let s = norm.scale();
        Self::from_evaluator(move |x| s * sgn(x[0] * x[1]))
            .with_rays(&[0.0, PI / 2.0, PI, 1.5 * PI])
            .with_cutoff()
    }

    /// Cut-off partial sum of the sign series, with `k_terms` terms.
    pub fn bc_series(k_terms: usize, norm: BcNormalization) -> Result<Self> {
        let s = match norm {
            BcNormalization::Normalized => 1.0 / FRAC_PI_4,
            BcNormalization::RawSeries => 1.0,
        };
        let terms = (0..k_terms)
            .map(|k| {
                let n = 2 * k as u32 + 1;
                let c = s / n as f64;
                SineTerm { mode: 2 * n, profile: Arc::new(move |_r: f64| c) as Profile }
            })
            .collect();
        Ok(Self::sine_series(terms)?.with_cutoff())
    }

    /// Copy restricted to the sectors `Ω_mⁱ` with `i` in `keep`.
    pub fn restricted(&self, m: u32, keep: &[u32]) -> Self {
        let base = self.clone();
        let keep = keep.to_vec();
        let mut out = Self::from_evaluator(move |x| match Sector::locate(m, x) {
            Some(s) if keep.contains(&s.copy_index()) => base.eval(x),
            _ => 0.0,
        });
        out.rays = self.rays.clone();
        out.rays.extend((0..2 * m).map(|k| k as f64 * PI / m as f64));
        out.circles = self.circles.clone();
        out.support_radius = self.support_radius;
        out
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        if r > self.support_radius {
            return 0.0;
        }
        let v = match &self.repr {
            Representation::Evaluator(f) => f(x),
            Representation::SineSeries(terms) => {
                let t = angle(x);
                terms.iter().map(|s| (s.profile)(r) * (s.mode as f64 * t).sin()).sum()
            }
        };
        if self.cutoff {
            v * smooth_cutoff(r)
        } else {
            v
        }
    }

    pub fn rays(&self) -> &[f64] {
        &self.rays
    }

    pub fn circles(&self) -> &[f64] {
        &self.circles
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// Distance from `x` to the jump set (rays and the origin).
    pub fn distance_to_jumps(&self, x: [f64; 2]) -> f64 {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let mut d = if self.rays.is_empty() { f64::INFINITY } else { r };
        for &phi in &self.rays {
            let u = [phi.cos(), phi.sin()];
            let t = u[0] * x[0] + u[1] * x[1];
            if t > 0.0 {
                d = d.min((u[0] * x[1] - u[1] * x[0]).abs());
            }
        }
        d
    }
}

/// Quadrature controls for [`riesz_pv_2d`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec2 {
    /// Largest exclusion radius, relative to `min(1, distance to the jump set)`.
    pub eps0: f64,
    /// Ratio between consecutive exclusion radii.
    pub eps_ratio: f64,
    pub n_eps: usize,
    /// Gauss-Legendre nodes per arc between jump crossings.
    pub arc_nodes: usize,
    /// Trapezoid nodes on circles that cross no jump.
    pub circle_nodes: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Largest acceptable error estimate.
    pub tolerance: f64,
}

impl Default for QuadratureSpec2 {
    fn default() -> Self {
        Self {
            eps0: 1e-2,
            eps_ratio: 10f64.powf(-0.2),
            n_eps: 5,
            arc_nodes: 24,
            circle_nodes: 64,
            abs_tol: 1e-11,
            rel_tol: 1e-11,
            max_intervals: 20_000,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PvValue {
    pub value: f64,
    pub err_est: f64,
    /// Truncated integrals for the exclusion radii `eps`.
    pub eps: Vec<f64>,
    pub truncated: Vec<f64>,
}

struct CircleRule<'a> {
    f: &'a SectorFunction2,
    kernel: RieszKernel2,
    x: [f64; 2],
    r: f64,
    gl: GaussLegendre,
    circle_nodes: usize,
}

impl CircleRule<'_> {
    /// Angles `θ` at which `x + ρ(cos θ, sin θ)` meets a ray or a circle.
    fn crossings(&self, rho: f64) -> Vec<f64> {
        let x = self.x;
        let mut out = Vec::new();
        for &phi in &self.f.rays {
            let u = [phi.cos(), phi.sin()];
            let b = u[0] * x[0] + u[1] * x[1];
            let disc = b * b - (self.r * self.r - rho * rho);
            if disc < 0.0 {
                continue;
            }
            let s = disc.sqrt();
            for t in [b - s, b + s] {
                if t > 0.0 {
                    out.push(angle([t * u[0] - x[0], t * u[1] - x[1]]));
                }
            }
        }
        if self.r > 0.0 {
            let tx = angle(x);
            for &c in &self.f.circles {
                let v = (c * c - self.r * self.r - rho * rho) / (2.0 * rho * self.r);
                if v.abs() < 1.0 {
                    let a = v.acos();
                    out.push((tx + a).rem_euclid(TAU));
                    out.push((tx - a).rem_euclid(TAU));
                }
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        out
    }

    fn term(&self, rho: f64, t: f64) -> f64 {
        let e = [t.cos(), t.sin()];
        self.kernel.angular(e) * self.f.eval([self.x[0] + rho * e[0], self.x[1] + rho * e[1]])
    }

    /// `ρ⁻¹ ∫ K(e) f(x + ρe) dθ`, the radial integrand in polar coordinates
    /// centred at `x`.
    fn radial(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        let cuts = self.crossings(rho);
        let mut acc = quad::Neumaier::default();
        if cuts.is_empty() {
            let h = TAU / self.circle_nodes as f64;
            for j in 0..self.circle_nodes {
                acc.add(h * self.term(rho, (j as f64 + 0.5) * h));
            }
        } else {
            for (i, &a) in cuts.iter().enumerate() {
                let b = if i + 1 < cuts.len() { cuts[i + 1] } else { cuts[0] + TAU };
                for (t, w) in self.gl.mapped(a, b) {
                    acc.add(w * self.term(rho, t));
                }
            }
        }
        acc.sum() / rho
    }

    /// Radii where the crossing pattern changes.
    fn radial_breaks(&self) -> Vec<f64> {
        let x = self.x;
        let mut b = Vec::new();
        if !self.f.rays.is_empty() {
            b.push(self.r);
        }
        for &phi in &self.f.rays {
            let u = [phi.cos(), phi.sin()];
            if u[0] * x[0] + u[1] * x[1] > 0.0 {
                b.push((u[0] * x[1] - u[1] * x[0]).abs());
            }
        }
        for &c in &self.f.circles {
            b.push((c - self.r).abs());
            b.push(c + self.r);
        }
        b.retain(|v| *v > 0.0 && v.is_finite());
        b
    }
}

/// Principal value `∫ K(x-y) f(y) dy` plus the point-evaluation part of the
/// double Riesz transform, with `K` the kernel of `kernel`.
///
/// The integral is taken in polar coordinates centred at `x`; on each circle
/// the angular rule is split at the crossings with the jump set, so the
/// radial integrand is piecewise smooth with known breakpoints. The excluded
/// disc shrinks geometrically and the truncated values are extrapolated.
pub fn riesz_pv_2d(f: &SectorFunction2, kernel: RieszKernel2, x: [f64; 2], spec: &QuadratureSpec2) -> Result<PvValue> {
    let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
    let d = f.distance_to_jumps(x);
    if d <= 0.0 || r == 0.0 && !f.rays.is_empty() {
        return Err(Error::OutsideDomain(x.to_vec()));
    }
    if spec.n_eps == 0 || !(spec.eps_ratio > 0.0 && spec.eps_ratio < 1.0) || spec.eps0 <= 0.0 {
        return Err(Error::InvalidParameter("bad exclusion-radius schedule".into()));
    }
    let rule = CircleRule {
        f,
        kernel,
        x,
        r,
        gl: GaussLegendre::new(spec.arc_nodes),
        circle_nodes: spec.circle_nodes,
    };
    let g = |rho: f64| rule.radial(rho);
    let eps: Vec<f64> = (0..spec.n_eps)
        .map(|k| spec.eps0 * d.min(1.0) * spec.eps_ratio.powi(k as i32))
        .collect();
    let breaks = rule.radial_breaks();
    let tol = |e: &Estimate| e.err;

    let e0 = eps[0];
    let outer = if f.support_radius.is_finite() {
        let top = r + f.support_radius;
        if top <= e0 {
            Estimate { value: 0.0, err: 0.0 }
        } else {
            quad::adaptive(g, e0, top, &breaks, spec.abs_tol, spec.rel_tol, spec.max_intervals)?
        }
    } else {
        let a = 2.0 * (breaks.iter().fold(0.0f64, |m, v| m.max(*v)) + r + 1.0);
        let near = quad::adaptive(g, e0, a, &breaks, spec.abs_tol, spec.rel_tol, spec.max_intervals)?;
        let far = quad::adaptive_to_infinity(g, a, spec.abs_tol, spec.rel_tol, spec.max_intervals)?;
        Estimate { value: near.value + far.value, err: near.err + far.err }
    };

    let mut truncated = vec![outer.value];
    let mut err = tol(&outer);
    let mut inner = 0.0;
    for w in eps.windows(2) {
        let piece = quad::adaptive(g, w[1], w[0], &[], spec.abs_tol * 1e-2, spec.rel_tol, spec.max_intervals)?;
        inner += piece.value;
        err += piece.err;
        truncated.push(outer.value + inner);
    }
    let extrap = quad::richardson(&eps, &truncated, 2.0);
    let extrap_err = if eps.len() > 1 { extrap.err } else { 0.0 };
    let value = extrap.value + kernel.local_coefficient() * f.eval(x);
    let err_est = err + extrap_err;
    if err_est > spec.tolerance || !value.is_finite() {
        return Err(Error::QuadratureFailure { value, err_est });
    }
    Ok(PvValue { value, err_est, eps, truncated })
}

/// [`riesz_pv_2d`] at many points, evaluated in parallel.
pub fn riesz_pv_2d_many(
    f: &SectorFunction2,
    kernel: RieszKernel2,
    points: &[[f64; 2]],
    spec: &QuadratureSpec2,
) -> Vec<Result<PvValue>> {
    points.par_iter().map(|&x| riesz_pv_2d(f, kernel, x, spec)).collect()
}

/// Limit of the truncated representation as `R -> ∞` for
/// `R₁₂(1_{Ω₄¹} - 1_{Ω₄⁵})` at `x` with `0 < x₂ < x₁`.
pub fn riesz_quadrant_closed_form(x: [f64; 2]) -> Result<f64> {
    if !(x[1] > 0.0 && x[0] > x[1]) {
        return Err(Error::OutsideDomain(x.to_vec()));
    }
    // The log terms pair up into logs of ratios tending to 1. The arctan
    // arguments tend to ∓∞ because x₁ - x₂ > 0.
    let log_terms = 0.0;
    let arctan_terms = -2.0 * (-PI / 2.0) + 2.0 * (PI / 2.0);
    Ok((arctan_terms + log_terms) / (8.0 * PI))
}

/// The same bracket at finite `R`.
pub fn riesz_quadrant_truncated(x: [f64; 2], big_r: f64) -> Result<f64> {
    if !(x[1] > 0.0 && x[0] > x[1]) {
        return Err(Error::OutsideDomain(x.to_vec()));
    }
    let (x1, x2, r) = (x[0], x[1], big_r);
    let dx = x1 - x2;
    let s = x1 + x2;
    let q = x1 * x1 + x2 * x2;
    let bracket = -2.0 * ((s - 2.0 * r) / dx).atan() + 2.0 * ((s + 2.0 * r) / dx).atan()
        + 2.0 * (x2 * x2 + (x1 - r).powi(2)).ln()
        - 2.0 * (x2 * x2 + (x1 + r).powi(2)).ln()
        - (q - 2.0 * s * r + 2.0 * r * r).ln()
        + (q + 2.0 * s * r + 2.0 * r * r).ln();
    Ok(bracket / (8.0 * PI))
}

/// Least-squares fit `value = c ln r + b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogSlopeFit {
    pub c: f64,
    pub b: f64,
    pub residual: f64,
    /// `(r, value, err_est)` per radius.
    pub samples: Vec<(f64, f64, f64)>,
}

/// Logarithmic slope of `K g` along the diagonal, for `g = χ(|x|)sgn(x₁x₂)`
/// scaled according to `norm`.
pub fn bc_log_slope(kernel: RieszKernel2, radii: &[f64], norm: BcNormalization, spec: &QuadratureSpec2) -> Result<LogSlopeFit> {
    log_slope(&SectorFunction2::bc_sign(norm), kernel, radii, spec)
}

/// Logarithmic slope of `K f` at the points `(r/√2, r/√2)`.
pub fn log_slope(f: &SectorFunction2, kernel: RieszKernel2, radii: &[f64], spec: &QuadratureSpec2) -> Result<LogSlopeFit> {
    if radii.len() < 4 {
        return Err(Error::InsufficientData { needed: 4, got: radii.len() });
    }
    if radii.iter().any(|&r| !(r > 0.0 && r <= 0.25)) || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("radii must be decreasing and lie in (0, 1/4]".into()));
    }
    let pts: Vec<[f64; 2]> = radii
        .iter()
        .map(|r| [r * std::f64::consts::FRAC_1_SQRT_2, r * std::f64::consts::FRAC_1_SQRT_2])
        .collect();
    let vals = riesz_pv_2d_many(f, kernel, &pts, spec)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = vals.iter().map(|v| v.value).collect();
    let (c, b, residual) = quad::linear_fit(&xs, &ys)?;
    let samples = radii.iter().zip(&vals).map(|(r, v)| (*r, v.value, v.err_est)).collect();
    Ok(LogSlopeFit { c, b, residual, samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HalfMoonTrig {
    Sin2,
    Cos2,
}

/// `∫_{v₁}^{l} r⁻¹ ∫_{-π}^{π} trig(θ) w_r(θ) dθ dr`, where `w_r = 1` for
/// `|θ| < π - θ_r`, `w_r = -1` otherwise, and `cos θ_r = v₁/r`.
pub fn halfmoon_integral(v1: f64, l: f64, trig: HalfMoonTrig) -> Result<f64> {
    if !(v1 > 0.0 && l > 0.0 && l <= 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < v1 and 0 < l <= 1, got v1 = {v1}, l = {l}")));
    }
    if v1 >= l {
        return Ok(0.0);
    }
    let gl = GaussLegendre::new(32);
    let h = |t: f64| match trig {
        HalfMoonTrig::Sin2 => (2.0 * t).sin(),
        HalfMoonTrig::Cos2 => (2.0 * t).cos(),
    };
    let inner = |r: f64| {
        let b = PI - (v1 / r).min(1.0).acos();
        let plus = gl.integrate(-b, b, h);
        let minus = gl.integrate(-PI, -b, h) + gl.integrate(b, PI, h);
        (plus - minus) / r
    };
    Ok(quad::adaptive(inner, v1, l, &[], 1e-13, 1e-12, 5000)?.value)
}

/// Extension of `g` (given on `0 < θ < π/4`) to the plane by
/// `g̃(x) = g̃(x^⊥)` and `g̃(x₁, x₂) = -g̃(x₁, -x₂)`.
pub fn extend_from_sector8(g: SectorFunction2) -> SectorFunction2 {
    use crate::symgroup::{extend_scalar, Domain, SymmetryGroup};
    let base = g.clone();
    let ext = extend_scalar(move |y: [f64; 2]| base.eval(y), &SymmetryGroup::extended_2d(), Domain::Sector8);
    let mut out = SectorFunction2::from_evaluator(move |y| if Sector::locate(4, y).is_some() { ext(y) } else { 0.0 });
    out.rays = (0..8).map(|k| k as f64 * FRAC_PI_4).collect();
    out.rays.extend(g.rays.iter().flat_map(|&a| (0..4).flat_map(move |k| {
        let q = k as f64 * PI / 2.0;
        [q + a, q - a]
    })).map(|a| a.rem_euclid(TAU)));
    out.circles = g.circles.clone();
    out.support_radius = g.support_radius;
    out
}

/// The part of `g̃` outside the copies `Ω₄ⁱ`, `i ∈ main`.
pub fn symmetry_remainder(g_ext: &SectorFunction2, main: &[u32]) -> SectorFunction2 {
    let keep: Vec<u32> = (1..=8).filter(|i| !main.contains(i)).collect();
    g_ext.restricted(4, &keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec() -> QuadratureSpec2 {
        QuadratureSpec2::default()
    }

    #[test]
    fn sector_bookkeeping() {
        let s = Sector::new(4, 1).unwrap();
        assert_eq!(s.theta_range(), (0.0, FRAC_PI_4));
        assert!(s.contains([2.0, 1.0]));
        assert!(!s.contains([1.0, 2.0]));
        assert_eq!(Sector::locate(4, [-2.0, -1.0]).unwrap().copy_index(), 5);
        assert_eq!(Sector::locate(4, [1.0, 0.0]), None);
        assert!(Sector::new(1, 1).is_err());
        assert!(Sector::new(4, 9).is_err());
    }

    #[test]
    fn mode_coefficients() {
        let c = sector_poisson_mode(2, 0.5).unwrap();
        assert!((c.coefficient() - 1.0 / 2.25).abs() < 1e-15);
        assert_eq!(sector_poisson_mode(2, 0.0).unwrap(), ModeCoefficient::Log { coefficient: 0.25 });
        assert!((sector_poisson_mode(4, 0.0).unwrap().coefficient() + 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(sector_poisson_mode(3, 1.0), Err(Error::UnsupportedResonance { m: 3, alpha: 1.0 }));
    }

    #[test]
    fn modes_solve_polar_poisson() {
        let radii: Vec<f64> = (0..=18).map(|k| 0.1 + 0.05 * k as f64).collect();
        for (m, a) in [(2, 0.5), (2, 0.0), (4, 0.0), (3, 0.3), (8, 1.0)] {
            let e = polar_laplacian_residual(m, a, &radii, 1e-3).unwrap();
            assert!(e <= 1e-4, "m={m} alpha={a}: {e}");
        }
    }

    #[test]
    fn sign_series() {
        let s = bahouri_chemin_partial_sum(FRAC_PI_4, 200).unwrap();
        assert!((s.normalized - 1.0).abs() < 5e-3);
        assert_eq!(bahouri_chemin_partial_sum(0.0, 17).unwrap().raw, 0.0);
        let t = bahouri_chemin_partial_sum(3.0 * FRAC_PI_4, 200).unwrap();
        assert!((t.normalized + 1.0).abs() < 5e-3);
        // Leibniz partial sums as oracle
        let leibniz: f64 = (0..200).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / (2 * k + 1) as f64).sum();
        assert!((s.raw - leibniz).abs() < 1e-13);
    }

    #[test]
    fn closed_form_and_truncation() {
        for x in [[2.0, 1.0], [10.0, 1.0], [1.0, 0.999]] {
            assert_eq!(riesz_quadrant_closed_form(x).unwrap(), 0.25);
            let t = riesz_quadrant_truncated(x, 1e7).unwrap();
            assert!((t - 0.25).abs() < 1e-5, "{t}");
        }
        assert!(riesz_quadrant_closed_form([1.0, 2.0]).is_err());
    }

    #[test]
    fn pv_matches_closed_form() {
        let f = SectorFunction2::odd_indicator_omega4();
        let v = riesz_pv_2d(&f, RieszKernel2::R12, [2.0, 1.0], &spec()).unwrap();
        assert!((v.value - 0.25).abs() < 1e-3, "{v:?}");
    }

    #[test]
    fn pv_at_random_interior_points() {
        let f = SectorFunction2::odd_indicator_omega4();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<[f64; 2]> = (0..20)
            .map(|_| {
                let r = rng.gen_range(0.2..5.0);
                let t = rng.gen_range(0.02..FRAC_PI_4 - 0.02);
                [r * f64::cos(t), r * f64::sin(t)]
            })
            .collect();
        for (x, v) in pts.iter().zip(riesz_pv_2d_many(&f, RieszKernel2::R12, &pts, &spec())) {
            let v = v.unwrap();
            let oracle = riesz_quadrant_closed_form(*x).unwrap();
            assert!((v.value - oracle).abs() < 1e-3, "{x:?}: {}", v.value);
        }
    }

    #[test]
    fn zero_function() {
        let v = riesz_pv_2d(&SectorFunction2::zero(), RieszKernel2::R11, [0.3, 0.1], &spec()).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn trace_identity() {
        for f in [SectorFunction2::checkerboard_r4(), SectorFunction2::odd_indicator_omega4()] {
            for x in [[2.0, 1.0], [-0.3, 1.7], [0.5, -0.2], [-1.0, -3.0]] {
                let a = riesz_pv_2d(&f, RieszKernel2::R11, x, &spec()).unwrap();
                let b = riesz_pv_2d(&f, RieszKernel2::R22, x, &spec()).unwrap();
                assert!((a.value + b.value + f.eval(x)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn checkerboard_is_piecewise_constant() {
        let f = SectorFunction2::checkerboard_r4();
        for k in [RieszKernel2::R11, RieszKernel2::R12] {
            for sector in 1..=8u32 {
                let vals: Vec<f64> = (0..8)
                    .map(|j| {
                        let t = (sector - 1) as f64 * FRAC_PI_4 + FRAC_PI_4 * (0.1 + 0.1 * j as f64);
                        let r = 0.5 + 0.4 * j as f64;
                        riesz_pv_2d(&f, k, [r * t.cos(), r * t.sin()], &spec()).unwrap().value
                    })
                    .collect();
                let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                assert!(hi - lo <= 1e-3, "{k:?} sector {sector}: {vals:?}");
            }
        }
    }

    /// Direct evaluation of the logarithmic growth: near the origin the
    /// kernel sees `sgn(y₁y₂)` on all scales `|x| < |y| < 1`, and
    /// `(1/π)∫|sin θ cos θ| dθ = 2/π`.
    #[test]
    fn bc_slopes() {
        let radii: Vec<f64> = (3..=8).map(|k| 0.5f64.powi(k)).collect();
        let fit = bc_log_slope(RieszKernel2::R12, &radii, BcNormalization::Normalized, &spec()).unwrap();
        assert!((fit.c + 2.0 / PI).abs() < 0.02, "{fit:?}");
        let raw = bc_log_slope(RieszKernel2::R12, &radii, BcNormalization::RawSeries, &spec()).unwrap();
        assert!((raw.c + 0.5).abs() < 0.02, "{raw:?}");
        let f11 = bc_log_slope(RieszKernel2::R11, &radii, BcNormalization::Normalized, &spec()).unwrap();
        assert!(f11.c.abs() < 0.02, "{f11:?}");
        let z = log_slope(&SectorFunction2::zero(), RieszKernel2::R12, &radii, &spec()).unwrap();
        assert_eq!(z.c, 0.0);
    }

    #[test]
    fn halfmoon() {
        assert!(halfmoon_integral(0.1, 0.5, HalfMoonTrig::Sin2).unwrap().abs() < 1e-8);
        let v = halfmoon_integral(0.1, 0.5, HalfMoonTrig::Cos2).unwrap();
        // closed form of the inner integral: -4 sin θ_r cos θ_r
        let phi = (0.1f64 / 0.5).acos();
        let oracle = -2.0 * (phi - phi.sin() * phi.cos());
        assert!((v - oracle).abs() < 1e-10, "{v} vs {oracle}");
        assert!(v.abs() <= 4.0 * 0.1 * (1.0 / 0.1 - 1.0 / 0.5));
        assert_eq!(halfmoon_integral(0.5, 0.5, HalfMoonTrig::Cos2).unwrap(), 0.0);
        assert!(halfmoon_integral(0.4999999, 0.5, HalfMoonTrig::Cos2).unwrap().abs() < 1e-6);
    }

    #[test]
    fn remainder_of_extension_is_regular_on_the_sector() {
        use crate::fields::{holder_seminorm, ring_holder_seminorm, SampleCloud};
        let alpha = 0.5;
        let width = PI / 8.0;
        let g = SectorFunction2::from_evaluator(move |x| {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            let t = angle(x);
            r.powf(alpha) * (1.0 - t / width).max(0.0).powi(2)
        })
        .with_rays(&[width])
        .with_cutoff();
        let ext = extend_from_sector8(g.clone());
        assert_eq!(ext.eval([1.0, 0.1]), g.eval([1.0, 0.1]));
        assert_eq!(ext.eval([1.0, -0.1]), -g.eval([1.0, 0.1]));
        assert_eq!(ext.eval([-0.1, 1.0]), g.eval([1.0, 0.1]));
        let rem = symmetry_remainder(&ext, &[8, 1]);
        assert_eq!(rem.eval([1.0, 0.1]), 0.0);

        let mut pts = Vec::new();
        for k in 0..6 {
            let r = 0.5f64.powi(k);
            for j in 0..6 {
                let t = FRAC_PI_4 * (0.05 + 0.18 * j as f64);
                pts.push([r * t.cos(), r * t.sin()]);
            }
        }
        let vals: Vec<f64> = riesz_pv_2d_many(&rem, RieszKernel2::R12, &pts, &spec())
            .into_iter()
            .map(|v| v.unwrap().value)
            .collect();
        let cloud = SampleCloud::new(pts.iter().map(|p| p.to_vec()).collect(), vals.iter().map(|v| vec![*v]).collect()).unwrap();
        let quotient = holder_seminorm(&cloud, alpha).unwrap() + ring_holder_seminorm(&cloud, alpha).unwrap();

        let gpts: Vec<Vec<f64>> = (1..40)
            .flat_map(|i| (1..10).map(move |j| {
                let r = 2.0 * i as f64 / 40.0;
                let t = FRAC_PI_4 * j as f64 / 10.0;
                vec![r * t.cos(), r * t.sin()]
            }))
            .collect();
        let gcloud = SampleCloud::from_scalar(gpts, |p| g.eval([p[0], p[1]])).unwrap();
        let gnorm = holder_seminorm(&gcloud, alpha).unwrap() + ring_holder_seminorm(&gcloud, alpha).unwrap();
        assert!(quotient <= 10.0 * gnorm, "{quotient} vs {gnorm}");
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn trace_identity_random(r in 0.1f64..4.0, t in 0.0f64..TAU) {
            let f = SectorFunction2::checkerboard_r4();
            let x = [r * t.cos(), r * t.sin()];
            proptest::prop_assume!(f.distance_to_jumps(x) > 1e-3);
            let a = riesz_pv_2d(&f, RieszKernel2::R11, x, &spec()).unwrap();
            let b = riesz_pv_2d(&f, RieszKernel2::R22, x, &spec()).unwrap();
            proptest::prop_assert!((a.value + b.value + f.eval(x)).abs() < 1e-8);
        }
    }
}
