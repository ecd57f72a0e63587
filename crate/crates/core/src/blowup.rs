//! Constant-vorticity octant solutions: the reduced ODE for `(λ, μ)`, blow-up
//! classification, the explicit velocity, and the localized initial data.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::symgroup::{extend_vector_field, Domain, ExtendedVectorField, SymmetryGroup, VectorParity};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeState {
    pub t: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl OdeState {
    pub fn new(t: f64, lambda: f64, mu: f64) -> Self {
        Self { t, lambda, mu }
    }

    pub fn magnitude(&self) -> f64 {
        self.lambda.abs() + self.mu.abs()
    }
}

/// `λ̇ = (2/3)λμ - λ²/3`, `μ̇ = (2/3)λμ - μ²/3`.
pub fn ode_rhs(s: &OdeState) -> (f64, f64) {
    rhs(s.lambda, s.mu)
}

fn rhs(l: f64, m: f64) -> (f64, f64) {
    let c = 2.0 * l * m / 3.0;
    (c - l * l / 3.0, c - m * m / 3.0)
}

/// `ω^SI = (-λ, λ, μ)`.
pub fn si_vorticity(lambda: f64, mu: f64) -> [f64; 3] {
    [-lambda, lambda, mu]
}

pub fn si_velocity(lambda: f64, mu: f64, x: [f64; 3]) -> [f64; 3] {
    let (l, m) = (lambda, mu);
    [
        ((-l + 2.0 * m) * x[0] - 3.0 * m * x[1] + 3.0 * l * x[2]) / 3.0,
        ((-l - m) * x[1] + 3.0 * l * x[2]) / 3.0,
        (2.0 * l - m) * x[2] / 3.0,
    ]
}

/// `g[i][j] = ∂_j u_i`.
pub fn si_velocity_gradient(lambda: f64, mu: f64) -> [[f64; 3]; 3] {
    let (l, m) = (lambda, mu);
    [
        [(-l + 2.0 * m) / 3.0, -m, l],
        [0.0, (-l - m) / 3.0, l],
        [0.0, 0.0, (2.0 * l - m) / 3.0],
    ]
}

/// `[∇u]ω` for the constant-vorticity field, checked against the closed form
/// `(1/3)(λ² - 2λμ, -λ² + 2λμ, 2λμ - μ²)`.
pub fn stretching_product(lambda: f64, mu: f64) -> Result<[f64; 3]> {
    let (l, m) = (lambda, mu);
    let closed = [(l * l - 2.0 * l * m) / 3.0, (-l * l + 2.0 * l * m) / 3.0, (2.0 * l * m - m * m) / 3.0];
    let g = si_velocity_gradient(l, m);
    let w = si_vorticity(l, m);
    let scale = 1.0 + l * l + m * m;
    for i in 0..3 {
        let v: f64 = (0..3).map(|j| g[i][j] * w[j]).sum();
        if (v - closed[i]).abs() > 1e-12 * scale {
            return Err(Error::Inconsistency(format!(
                "stretching component {i}: matrix product {v} vs closed form {}",
                closed[i]
            )));
        }
    }
    Ok(closed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlowupRule {
    /// `λ₀ ≠ μ₀` and `λ₀μ₀ ≠ 0`.
    #[serde(rename = "ThmB-1")]
    ThmB1,
    /// `λ₀ = μ₀ > 0`.
    #[serde(rename = "ThmB-2")]
    ThmB2,
    /// `λ₀ = 0, μ₀ < 0` or `μ₀ = 0, λ₀ < 0`.
    #[serde(rename = "remark-axis")]
    RemarkAxis,
    #[serde(rename = "global-decay")]
    GlobalDecay,
}

impl BlowupRule {
    pub fn label(&self) -> &'static str {
        match self {
            Self::ThmB1 => "ThmB-1",
            Self::ThmB2 => "ThmB-2",
            Self::RemarkAxis => "remark-axis",
            Self::GlobalDecay => "global-decay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupVerdict {
    pub blows_up: bool,
    pub rule: BlowupRule,
    pub t_star_estimate: Option<f64>,
}

pub fn classify_initial_data(lambda0: f64, mu0: f64) -> BlowupVerdict {
    let (l, m) = (lambda0, mu0);
    let verdict = |rule, t_star| BlowupVerdict { blows_up: rule != BlowupRule::GlobalDecay, rule, t_star_estimate: t_star };
    if l != m && l * m != 0.0 {
        verdict(BlowupRule::ThmB1, None)
    } else if l == m && l > 0.0 {
        verdict(BlowupRule::ThmB2, Some(3.0 / l))
    } else if l == 0.0 && m < 0.0 {
        verdict(BlowupRule::RemarkAxis, Some(-3.0 / m))
    } else if m == 0.0 && l < 0.0 {
        verdict(BlowupRule::RemarkAxis, Some(-3.0 / l))
    } else {
        verdict(BlowupRule::GlobalDecay, None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegrationControls {
    pub rtol: f64,
    pub atol: f64,
    pub escape_threshold: f64,
    pub t_max: f64,
    pub max_step: f64,
}

impl Default for IntegrationControls {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, escape_threshold: 1e8, t_max: 50.0, max_step: 0.1 }
    }
}

/// Fit of `|λ| + |μ| ≈ A / (T* - t)` over the last decade of growth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TStarFit {
    pub t_star: f64,
    pub amplitude: f64,
    /// RMS residual of the linear fit of `1/(|λ|+|μ|)`, relative to its range.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Accepted steps, starting with the initial state.
    pub states: Vec<OdeState>,
    pub escaped: bool,
    pub t_star: Option<TStarFit>,
}

impl Trajectory {
    pub fn t_end(&self) -> f64 {
        self.states.last().map_or(0.0, |s| s.t)
    }

    /// State at time `t`, by one Dormand-Prince substep from the preceding
    /// accepted step.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        let s = &self.states;
        if t < s[0].t || t > self.t_end() {
            if self.escaped && t > self.t_end() {
                let t_star = self.t_star.map_or(self.t_end(), |f| f.t_star);
                return Err(Error::PastBlowup { t, t_star });
            }
            return Err(Error::InvalidParameter(format!("time {t} outside [{}, {}]", s[0].t, self.t_end())));
        }
        let k = s.partition_point(|p| p.t <= t).max(1);
        let a = &s[k - 1];
        if t == a.t {
            return Ok((a.lambda, a.mu));
        }
        Ok(dopri_step(a.lambda, a.mu, t - a.t).0)
    }

    /// Uniform resampling with spacing `dt` (the last accepted state is
    /// always included).
    pub fn dense(&self, dt: f64) -> Result<Vec<OdeState>> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("sample spacing {dt} must be positive")));
        }
        let t0 = self.states[0].t;
        let n = ((self.t_end() - t0) / dt).floor() as usize;
        let mut out = Vec::with_capacity(n + 2);
        for i in 0..=n {
            let t = t0 + i as f64 * dt;
            let (l, m) = self.eval(t)?;
            out.push(OdeState::new(t, l, m));
        }
        let last = *self.states.last().unwrap();
        if out.last().map_or(true, |s| s.t < last.t) {
            out.push(last);
        }
        Ok(out)
    }
}

const A21: f64 = 1.0 / 5.0;
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand-Prince step: 5th-order solution and the embedded error.
fn dopri_step(l: f64, m: f64, h: f64) -> ((f64, f64), (f64, f64)) {
    let at = |ks: &[(f64, f64)], a: &[f64]| -> (f64, f64) {
        let (mut x, mut y) = (l, m);
        for (k, c) in ks.iter().zip(a) {
            x += h * c * k.0;
            y += h * c * k.1;
        }
        (x, y)
    };
    let mut k = Vec::with_capacity(7);
    k.push(rhs(l, m));
    let p = at(&k, &[A21]);
    k.push(rhs(p.0, p.1));
    let p = at(&k, &A3);
    k.push(rhs(p.0, p.1));
    let p = at(&k, &A4);
    k.push(rhs(p.0, p.1));
    let p = at(&k, &A5);
    k.push(rhs(p.0, p.1));
    let p = at(&k, &A6);
    k.push(rhs(p.0, p.1));
    let y5 = at(&k, &B5);
    k.push(rhs(y5.0, y5.1));
    let y4 = at(&k, &B4);
    (y5, (y5.0 - y4.0, y5.1 - y4.1))
}

fn fit_t_star(states: &[OdeState]) -> Result<TStarFit> {
    let end = states.last().map_or(0.0, |s| s.magnitude());
    let mut tail: Vec<&OdeState> = states.iter().filter(|s| s.magnitude() >= end / 10.0).collect();
    if tail.len() < 4 {
        tail = states.iter().rev().take(4).rev().collect();
    }
    if tail.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: tail.len() });
    }
    let t: Vec<f64> = tail.iter().map(|s| s.t).collect();
    let inv: Vec<f64> = tail.iter().map(|s| 1.0 / s.magnitude()).collect();
    let (slope, intercept, rms) = quad::linear_fit(&t, &inv)?;
    let range = inv.iter().cloned().fold(0.0f64, f64::max) - inv.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(TStarFit {
        t_star: -intercept / slope,
        amplitude: -1.0 / slope,
        residual: if range > 0.0 { rms / range } else { rms },
    })
}

/// Adaptive Dormand-Prince 5(4) integration of the reduced system.
pub fn integrate(lambda0: f64, mu0: f64, c: &IntegrationControls) -> Result<Trajectory> {
    if !(c.rtol > 0.0 && c.atol > 0.0 && c.escape_threshold > 0.0 && c.t_max > 0.0 && c.max_step > 0.0) {
        return Err(Error::InvalidParameter("integration controls must be positive".into()));
    }
    let mut s = OdeState::new(0.0, lambda0, mu0);
    let mut states = vec![s];
    let mut h = (0.01 / (1.0 + s.magnitude())).min(c.max_step);
    let mut escaped = s.magnitude() >= c.escape_threshold;
    while !escaped && s.t < c.t_max {
        h = h.min(c.t_max - s.t).min(c.max_step);
        if h < 1e-14 {
            return Err(Error::StepUnderflow { t: s.t });
        }
        let ((l, m), (el, em)) = dopri_step(s.lambda, s.mu, h);
        let sc = |a: f64, b: f64| c.atol + c.rtol * a.abs().max(b.abs());
        let err = ((el / sc(s.lambda, l)).powi(2) + (em / sc(s.mu, m)).powi(2)).sqrt() / std::f64::consts::SQRT_2;
        if err <= 1.0 && l.is_finite() && m.is_finite() {
            s = OdeState::new(s.t + h, l, m);
            states.push(s);
            escaped = s.magnitude() >= c.escape_threshold;
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= fac;
        }
    }
    let t_star = if escaped { Some(fit_t_star(&states)?) } else { None };
    Ok(Trajectory { states, escaped, t_star })
}

/// Derivative at node `k` of the Lagrange interpolant through `ts`.
fn lagrange_derivative_weights(ts: &[f64], k: usize) -> Vec<f64> {
    let n = ts.len();
    (0..n)
        .map(|j| {
            if j == k {
                (0..n).filter(|&m| m != k).map(|m| 1.0 / (ts[k] - ts[m])).sum()
            } else {
                let num: f64 = (0..n).filter(|&m| m != j && m != k).map(|m| ts[k] - ts[m]).product();
                let den: f64 = (0..n).filter(|&m| m != j).map(|m| ts[j] - ts[m]).product();
                num / den
            }
        })
        .collect()
}

/// Five-point finite-difference derivatives `(λ̇, μ̇)` at the interior
/// accepted steps.
fn fd_derivatives(states: &[OdeState]) -> Vec<(OdeState, f64, f64)> {
    if states.len() < 5 {
        return vec![];
    }
    (2..states.len() - 2)
        .map(|i| {
            let win = &states[i - 2..=i + 2];
            let ts: Vec<f64> = win.iter().map(|s| s.t).collect();
            let w = lagrange_derivative_weights(&ts, 2);
            let dl = win.iter().zip(&w).map(|(s, c)| c * s.lambda).sum();
            let dm = win.iter().zip(&w).map(|(s, c)| c * s.mu).sum();
            (states[i], dl, dm)
        })
        .collect()
}

/// Max over samples of `|d/dt(λ-μ) + (1/3)(λ-μ)(λ+μ)|`, scaled by `(|λ|+|μ|)²`,
/// with the derivative taken by finite differences of the trajectory.
pub fn difference_identity_residual(traj: &Trajectory) -> f64 {
    fd_derivatives(&traj.states)
        .into_iter()
        .map(|(s, dl, dm)| {
            let d = s.lambda - s.mu;
            let expect = -(d * (s.lambda + s.mu)) / 3.0;
            let scale = s.magnitude().powi(2);
            if scale == 0.0 {
                0.0
            } else {
                ((dl - dm) - expect).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Max over samples of `|d/dt ω^SI - [∇u^SI]ω^SI|`, scaled by `(|λ|+|μ|)²`.
pub fn stretching_residual(traj: &Trajectory) -> Result<f64> {
    let mut worst = 0.0f64;
    for (s, dl, dm) in fd_derivatives(&traj.states) {
        let scale = s.magnitude().powi(2);
        if scale == 0.0 {
            continue;
        }
        let st = stretching_product(s.lambda, s.mu)?;
        let dw = [-dl, dl, dm];
        for k in 0..3 {
            worst = worst.max((dw[k] - st[k]).abs() / scale);
        }
    }
    Ok(worst)
}

/// Whether `λ - μ` keeps one sign (or stays zero) along the trajectory.
/// Values with `|λ - μ| ≤ rel_tol·(|λ| + |μ|)` are below the integration
/// accuracy and count as either sign.
pub fn sign_preserved(traj: &Trajectory, rel_tol: f64) -> bool {
    let d0 = traj.states[0].lambda - traj.states[0].mu;
    traj.states.iter().all(|s| {
        let d = s.lambda - s.mu;
        let noise = rel_tol * s.magnitude();
        if d0 == 0.0 {
            d.abs() <= noise
        } else {
            d * d0.signum() > -noise
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Face {
    /// `x₃ = 0`.
    X3Zero,
    /// `x₁ = x₂`.
    X1EqX2,
    /// `x₂ = x₃`.
    X2EqX3,
}

impl Face {
    /// Outward unit normal of `Ũ` on the face.
    pub fn normal(&self) -> [f64; 3] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Self::X3Zero => [0.0, 0.0, -1.0],
            Self::X1EqX2 => [-s, s, 0.0],
            Self::X2EqX3 => [0.0, -s, s],
        }
    }

    /// Signed defining function, zero on the face and positive inside `Ũ`.
    pub fn functional(&self, x: &[f64; 3]) -> f64 {
        match self {
            Self::X3Zero => x[2],
            Self::X1EqX2 => x[0] - x[1],
            Self::X2EqX3 => x[1] - x[2],
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "x3=0" => Ok(Self::X3Zero),
            "x1=x2" => Ok(Self::X1EqX2),
            "x2=x3" => Ok(Self::X2EqX3),
            _ => Err(Error::InvalidParameter(format!("unknown face {s:?}"))),
        }
    }
}

/// The three face functionals of the closed chamber `x₁ ≥ x₂ ≥ x₃ ≥ 0`.
pub fn chamber_functionals(x: &[f64; 3]) -> [f64; 3] {
    [x[0] - x[1], x[1] - x[2], x[2]]
}

/// `max |u^SI · n|` over samples on `face`.
pub fn slip_residual(lambda: f64, mu: f64, face: Face, samples: &[[f64; 3]]) -> Result<f64> {
    let n = face.normal();
    let mut worst = 0.0f64;
    for x in samples {
        let scale = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let on_face = face.functional(x).abs() <= 1e-12 * scale.max(1.0);
        let inside = chamber_functionals(x).iter().all(|v| *v >= -1e-12 * scale.max(1.0));
        if !on_face || !inside {
            return Err(Error::OutsideDomain(x.to_vec()));
        }
        let u = si_velocity(lambda, mu, *x);
        worst = worst.max((u[0] * n[0] + u[1] * n[1] + u[2] * n[2]).abs());
    }
    Ok(worst)
}

/// Velocity amplitudes driving the flow map.
#[derive(Debug, Clone, Copy)]
pub enum FlowDriver<'a> {
    Frozen { lambda: f64, mu: f64 },
    Trajectory(&'a Trajectory),
}

impl FlowDriver<'_> {
    fn at(&self, t: f64) -> Result<(f64, f64)> {
        match self {
            Self::Frozen { lambda, mu } => Ok((*lambda, *mu)),
            Self::Trajectory(tr) => tr.eval(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowResult {
    pub x: [f64; 3],
    /// Minimum over the path of the three chamber functionals.
    pub min_face: f64,
}

/// RK4 integration of `∂_tΦ = u^SI(t, Φ)` from `Φ(0) = x0` to `t` in `steps` steps.
pub fn flow_map(driver: FlowDriver<'_>, x0: [f64; 3], t: f64, steps: usize) -> Result<FlowResult> {
    if steps == 0 || !(t >= 0.0) {
        return Err(Error::InvalidParameter("flow map needs t ≥ 0 and at least one step".into()));
    }
    if chamber_functionals(&x0).iter().any(|v| *v < 0.0) {
        return Err(Error::OutsideDomain(x0.to_vec()));
    }
    if let FlowDriver::Trajectory(tr) = driver {
        if t > tr.t_end() {
            if tr.escaped {
                return Err(Error::PastBlowup { t, t_star: tr.t_star.map_or(tr.t_end(), |f| f.t_star) });
            }
            return Err(Error::InvalidParameter(format!("time {t} beyond trajectory end {}", tr.t_end())));
        }
    }
    let h = t / steps as f64;
    let vel = |s: f64, x: &[f64; 3]| -> Result<[f64; 3]> {
        let (l, m) = driver.at(s.min(t))?;
        Ok(si_velocity(l, m, *x))
    };
    let mut x = x0;
    let mut min_face = chamber_functionals(&x).into_iter().fold(f64::INFINITY, f64::min);
    for i in 0..steps {
        let s = i as f64 * h;
        let k1 = vel(s, &x)?;
        let k2 = vel(s + 0.5 * h, &std::array::from_fn(|j| x[j] + 0.5 * h * k1[j]))?;
        let k3 = vel(s + 0.5 * h, &std::array::from_fn(|j| x[j] + 0.5 * h * k2[j]))?;
        let k4 = vel(s + h, &std::array::from_fn(|j| x[j] + h * k3[j]))?;
        x = std::array::from_fn(|j| x[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
        min_face = chamber_functionals(&x).into_iter().fold(min_face, f64::min);
    }
    Ok(FlowResult { x, min_face })
}

/// Plateau/support profile `χ`: 1 on `|z| ≤ 1`, 0 on `z ≥ 2`.
#[derive(Clone)]
pub enum Cutoff {
    /// Quintic smoothstep between `z = 1` and `z = 2` (C²).
    Quintic,
    /// [`crate::fields::smooth_cutoff`] (C∞).
    Smooth,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Cutoff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Quintic => write!(f, "Quintic"),
            Self::Smooth => write!(f, "Smooth"),
            Self::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Cutoff {
    pub fn eval(&self, z: f64) -> f64 {
        match self {
            Self::Quintic => {
                if z <= 1.0 {
                    1.0
                } else if z >= 2.0 {
                    0.0
                } else {
                    let s = 2.0 - z;
                    s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
                }
            }
            Self::Smooth => crate::fields::smooth_cutoff(z.max(0.0)),
            Self::Custom(f) => f(z),
        }
    }

    /// Samples the plateau `[-1, 1]` and the exterior `[2, 6]`.
    pub fn validate(&self) -> Result<()> {
        for i in 0..=400 {
            let z = -1.0 + 2.0 * i as f64 / 400.0;
            let v = self.eval(z);
            if (v - 1.0).abs() > 1e-14 {
                return Err(Error::InvalidCutoff(format!("χ({z}) = {v}, expected 1 on the plateau")));
            }
            let z = 2.0 + 4.0 * i as f64 / 400.0;
            let v = self.eval(z);
            if v.abs() > 1e-14 {
                return Err(Error::InvalidCutoff(format!("χ({z}) = {v}, expected 0 beyond 2")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LocalizedData {
    pub lambda0: f64,
    pub mu0: f64,
    pub chi: Cutoff,
}

impl LocalizedData {
    pub fn new(lambda0: f64, mu0: f64) -> Self {
        Self { lambda0, mu0, chi: Cutoff::Quintic }
    }

    /// `(-λ₀χ(x₁+x₂), λ₀χ(x₁+x₂), μ₀χ(x₁+x₂))` on the closed chamber.
    pub fn eval_chamber(&self, x: [f64; 3]) -> [f64; 3] {
        let c = self.chi.eval(x[0] + x[1]);
        [-self.lambda0 * c, self.lambda0 * c, self.mu0 * c]
    }

    /// Whether the extra vanishing conditions for propagating `C^{1,α}`
    /// regularity hold on the edge `x₁ = x₂, x₃ = 0`, checked at sample
    /// points by central differences.
    pub fn satisfies_higher_regularity_conditions(&self) -> bool {
        let h = 1e-6;
        let tol = 1e-8 * (1.0 + self.lambda0.abs() + self.mu0.abs());
        let d = |x: [f64; 3], k: usize, c: usize| {
            let mut a = x;
            let mut b = x;
            a[k] += h;
            b[k] -= h;
            (self.eval_chamber(a)[c] - self.eval_chamber(b)[c]) / (2.0 * h)
        };
        let zs: Vec<f64> = (1..40).map(|i| i as f64 * 0.03).collect();
        let sum_ok = zs.iter().all(|&z| {
            let x = [z, z, 0.0];
            (0..3).all(|k| (d(x, k, 0) + d(x, k, 1)).abs() <= tol)
        });
        let diff_ok = zs.iter().all(|&z| {
            let x = [z, z, 0.0];
            let w = self.eval_chamber(x);
            (w[0] - w[1]).abs() <= tol && (d(x, 0, 0) + d(x, 1, 0) - d(x, 0, 1) - d(x, 1, 1)).abs() <= tol
        });
        let third_ok = zs.iter().all(|&z| {
            let x = [z, z, 0.0];
            self.eval_chamber(x)[2].abs() <= tol && (d(x, 0, 2) + d(x, 1, 2)).abs() <= tol
        });
        sum_ok && (diff_ok || third_ok)
    }
}

/// The localized data extended to all of space by the orientation-odd
/// extended octahedral symmetry. Inside the chamber the support is
/// `x₁ + x₂ < 2`, hence contained in the ball of radius 2.
pub fn localized_initial_data(d: &LocalizedData) -> Result<ExtendedVectorField> {
    d.chi.validate()?;
    let data = d.clone();
    Ok(extend_vector_field(
        move |x| data.eval_chamber(x),
        2.0,
        &SymmetryGroup::extended_octahedral(),
        Domain::UTilde,
        VectorParity::Odd,
    ))
}
