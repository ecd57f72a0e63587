//! Three-dimensional Biot-Savart law: principal-value velocity and velocity
//! gradient, the moment expansion of the velocity near the origin and the
//! spherical moments that vanish for symmetric vorticity.
//!
//! Angular integrals use the 48 spherical triangles cut out by the nine
//! mirror planes of the signed-permutation group, each refined adaptively.
//! Symmetric extensions are smooth inside every such triangle, so the rule
//! never straddles a jump of the integrand.

use crate::error::{Error, Result};
use crate::fields::{norm3, FnField, SymmetryTag, VectorField3};
use crate::quad::{self, GaussLegendre};
use crate::symgroup::{SymmetryGroup, A2, A3, A4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const FOUR_PI: f64 = 4.0 * PI;

#[derive(Debug, Clone, Copy)]
struct SphTri {
    a: [f64; 3],
    b: [f64; 3],
    c: [f64; 3],
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn unit(p: [f64; 3]) -> [f64; 3] {
    let n = norm3(&p);
    [p[0] / n, p[1] / n, p[2] / n]
}

fn mid(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    unit([a[0] + b[0], a[1] + b[1], a[2] + b[2]])
}

impl SphTri {
    fn split(&self) -> [SphTri; 4] {
        let ab = mid(&self.a, &self.b);
        let bc = mid(&self.b, &self.c);
        let ca = mid(&self.c, &self.a);
        [
            SphTri { a: self.a, b: ab, c: ca },
            SphTri { a: ab, b: self.b, c: bc },
            SphTri { a: ca, b: bc, c: self.c },
            SphTri { a: ab, b: bc, c: ca },
        ]
    }
}

/// The 48 chamber triangles `g(a₄, a₂, a₃)`.
fn chamber_tiling() -> Vec<SphTri> {
    SymmetryGroup::extended_octahedral()
        .elements()
        .iter()
        .map(|g| SphTri { a: g.apply(&A4), b: g.apply(&A2), c: g.apply(&A3) })
        .collect()
}

/// Adaptive cubature on the unit sphere: collapsed Gauss rules on each
/// chamber triangle (central projection of the flat triangle). A triangle is
/// split 4 ways while a rule of order `n` and one of order `n - 2` disagree.
#[derive(Debug, Clone)]
pub struct SphereRule {
    tiles: Vec<SphTri>,
    /// `(s, t, w)` on the flat reference triangle `{s, t ≥ 0, s + t ≤ 1}`.
    hi: Vec<(f64, f64, f64)>,
    lo: Vec<(f64, f64, f64)>,
    rel_tol: f64,
    max_depth: u32,
}

fn collapsed_rule(order: usize) -> Vec<(f64, f64, f64)> {
    let gl = GaussLegendre::new(order);
    let mut nodes = Vec::with_capacity(order * order);
    for (u, wu) in gl.mapped(0.0, 1.0) {
        for (v, wv) in gl.mapped(0.0, 1.0) {
            nodes.push((u * (1.0 - v), u * v, wu * wv * u));
        }
    }
    nodes
}

impl SphereRule {
    pub fn new(order: usize, rel_tol: f64, max_depth: u32) -> Self {
        let order = order.max(3);
        Self { tiles: chamber_tiling(), hi: collapsed_rule(order), lo: collapsed_rule(order - 2), rel_tol, max_depth }
    }

    fn apply<const M: usize, F: Fn(&[f64; 3]) -> [f64; M]>(
        t: &SphTri,
        nodes: &[(f64, f64, f64)],
        f: &F,
    ) -> [f64; M] {
        let e1 = sub(&t.b, &t.a);
        let e2 = sub(&t.c, &t.a);
        let n = cross(&e1, &e2);
        let mut acc = [0.0; M];
        for &(s, r, w) in nodes {
            let p = [t.a[0] + s * e1[0] + r * e2[0], t.a[1] + s * e1[1] + r * e2[1], t.a[2] + s * e1[2] + r * e2[2]];
            let np = norm3(&p);
            let jac = dot(&p, &n).abs() / (np * np * np);
            let v = f(&[p[0] / np, p[1] / np, p[2] / np]);
            for m in 0..M {
                acc[m] += w * jac * v[m];
            }
        }
        acc
    }

    /// Value and error estimate on one triangle.
    fn tri<const M: usize, F: Fn(&[f64; 3]) -> [f64; M]>(&self, t: &SphTri, f: &F) -> ([f64; M], f64) {
        let a = Self::apply(t, &self.hi, f);
        let b = Self::apply(t, &self.lo, f);
        let err = (0..M).map(|m| (a[m] - b[m]).abs()).fold(0.0, f64::max);
        (a, err)
    }

    fn refine<const M: usize, F: Fn(&[f64; 3]) -> [f64; M]>(
        &self,
        t: &SphTri,
        own: ([f64; M], f64),
        f: &F,
        tol: f64,
        depth: u32,
    ) -> [f64; M] {
        if own.1 <= tol || depth == 0 {
            return own.0;
        }
        let mut out = [0.0; M];
        for k in t.split() {
            let v = self.tri(&k, f);
            let r = self.refine(&k, v, f, 0.5 * tol, depth - 1);
            for m in 0..M {
                out[m] += r[m];
            }
        }
        out
    }

    /// `∫_{S²} f dσ`.
    pub fn integrate<const M: usize, F>(&self, f: F) -> [f64; M]
    where
        F: Fn(&[f64; 3]) -> [f64; M] + Sync,
    {
        self.integrate_abs(f, 0.0)
    }

    /// As [`SphereRule::integrate`], stopping once the error estimate is
    /// below `abs_tol` even when the relative target is not met.
    pub fn integrate_abs<const M: usize, F>(&self, f: F, abs_tol: f64) -> [f64; M]
    where
        F: Fn(&[f64; 3]) -> [f64; M] + Sync,
    {
        let coarse: Vec<([f64; M], f64)> = self.tiles.par_iter().map(|t| self.tri(t, &f)).collect();
        let scale: f64 = coarse.iter().map(|v| v.0.iter().fold(0.0f64, |m, x| m.max(x.abs()))).sum();
        let tol = (self.rel_tol * scale).max(abs_tol).max(1e-300) / self.tiles.len() as f64;
        let parts: Vec<[f64; M]> = self
            .tiles
            .par_iter()
            .zip(coarse)
            .map(|(t, c)| self.refine(t, c, &f, tol, self.max_depth))
            .collect();
        let mut out = [0.0; M];
        for p in parts {
            for m in 0..M {
                out[m] += p[m];
            }
        }
        out
    }
}

/// Quadrature controls for the 3D singular integrals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec3 {
    /// Exclusion radii for the gradient, relative to the near-field radius.
    pub eps_schedule: Vec<f64>,
    /// Outer truncation radius for symmetric non-decaying data, relative to
    /// the start of the far field.
    #[serde(rename = "R_outer")]
    pub r_outer: f64,
    /// Gauss order of the collapsed triangle rule.
    pub tri_order: usize,
    pub angular_tol: f64,
    pub max_depth: u32,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Near-field radius relative to `|x|`.
    pub delta_fraction: f64,
    /// Near-field radius relative to the distance to the nearest mirror
    /// plane not through `x` (symmetric data only).
    pub plane_margin: f64,
    /// Largest acceptable error estimate.
    pub tolerance: f64,
}

impl Default for QuadratureSpec3 {
    fn default() -> Self {
        Self {
            eps_schedule: vec![1e-1, 10f64.powf(-1.5), 1e-2],
            r_outer: 1e4,
            tri_order: 7,
            angular_tol: 1e-8,
            max_depth: 6,
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            max_intervals: 400,
            delta_fraction: 0.5,
            plane_margin: 0.9,
            tolerance: 1e-6,
        }
    }
}

impl QuadratureSpec3 {
    fn sphere(&self) -> SphereRule {
        SphereRule::new(self.tri_order, self.angular_tol, self.max_depth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VectorEstimate {
    pub value: [f64; 3],
    pub err_est: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatrixEstimate {
    /// `value[i][j] = ∂_j u_i`.
    pub value: [[f64; 3]; 3],
    pub err_est: f64,
}

const MIRROR_NORMALS: [[f64; 3]; 9] = {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [s, -s, 0.0],
        [s, s, 0.0],
        [0.0, s, -s],
        [0.0, s, s],
        [s, 0.0, -s],
        [s, 0.0, s],
    ]
};

/// Radius of the ball around `x` that is integrated in coordinates centred at `x`.
fn near_radius<F: VectorField3 + ?Sized>(field: &F, x: &[f64; 3], spec: &QuadratureSpec3) -> f64 {
    let r = norm3(x);
    if r == 0.0 {
        return if field.support_radius().is_finite() { field.support_radius().max(1e-3) } else { 1.0 };
    }
    let mut d = spec.delta_fraction * r;
    if field.symmetry_tag() != SymmetryTag::None {
        for n in &MIRROR_NORMALS {
            let h = dot(n, x).abs();
            if h > 1e-12 * r {
                d = d.min(spec.plane_margin * h);
            }
        }
    }
    d
}

/// Partition weight: 1 on `[0, 1/2]`, 0 on `[1, ∞)`, a C³ septic step in
/// between. A polynomial step keeps the angular rules cheap on the shells
/// that cut the transition zone.
pub fn near_weight(s: f64) -> f64 {
    if s <= 0.5 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    let t = 2.0 * s - 1.0;
    let t4 = t * t * t * t;
    1.0 - t4 * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t)
}

fn levi(i: usize, j: usize, k: usize) -> f64 {
    if i == j || j == k || k == i {
        0.0
    } else if (i + 1) % 3 == j {
        1.0
    } else {
        -1.0
    }
}

/// Radial layout shared by the velocity and gradient integrals.
struct Layout {
    r: f64,
    delta: f64,
    /// End of the shell region integrated with the unmodified kernel.
    top: f64,
    /// Whether a subtracted tail over `[top, top · r_outer]` follows.
    tail: bool,
}

impl Layout {
    fn new<F: VectorField3 + ?Sized>(field: &F, x: &[f64; 3], spec: &QuadratureSpec3) -> Result<Self> {
        let r = norm3(x);
        let delta = near_radius(field, x, spec);
        let s = field.support_radius();
        if s.is_finite() {
            return Ok(Self { r, delta, top: s, tail: false });
        }
        if field.symmetry_tag() == SymmetryTag::None {
            return Err(Error::NonIntegrable(
                "unbounded support requires a symmetric vorticity".into(),
            ));
        }
        Ok(Self { r, delta, top: 2.0 * (r + delta), tail: true })
    }

    fn breaks(&self) -> Vec<f64> {
        let (r, d) = (self.r, self.delta);
        let mut b: Vec<f64> = [r - d, r - 0.5 * d, r, r + 0.5 * d, r + d].to_vec();
        b.retain(|v| *v > 0.0 && *v < self.top);
        b
    }
}

/// Angular error target for a shell whose integral is scaled by `jac`
/// and then integrated radially over a range of length `range`.
fn angular_floor(spec: &QuadratureSpec3, jac: f64, range: f64) -> f64 {
    1e-2 * spec.abs_tol / (jac * range).max(1e-300)
}

fn check(err: f64, spec: &QuadratureSpec3, first: f64) -> Result<()> {
    if err > spec.tolerance || !first.is_finite() {
        return Err(Error::QuadratureFailure { value: first, err_est: err });
    }
    Ok(())
}

/// Biot-Savart velocity `u(x) = -(1/4π) ∫ (x-y) × ω(y) / |x-y|³ dy`.
///
/// A smooth partition splits the integral into a ball of radius `δ` around
/// `x` (spherical coordinates centred at `x`) and the rest (shells centred
/// at the origin). For symmetric data without compact support the far tail
/// subtracts the first two Taylor terms of the kernel at `x = 0`, whose
/// shell integrals vanish identically.
pub fn velocity_pv<F: VectorField3 + ?Sized>(omega: &F, x: [f64; 3], spec: &QuadratureSpec3) -> Result<VectorEstimate> {
    let lay = Layout::new(omega, &x, spec)?;
    let sphere = spec.sphere();
    let delta = lay.delta;

    let near = |r: f64| -> [f64; 3] {
        let w = near_weight(r / delta);
        if w == 0.0 {
            return [0.0; 3];
        }
        let v = sphere.integrate_abs(
            |e| {
                let om = omega.eval([x[0] + r * e[0], x[1] + r * e[1], x[2] + r * e[2]]);
                cross(e, &om)
            },
            angular_floor(spec, 1.0 / FOUR_PI, delta),
        );
        v.map(|c| c * w / FOUR_PI)
    };
    let (vn, en) = quad::adaptive_vec(near, 0.0, delta, &[0.5 * delta], spec.abs_tol, spec.rel_tol, spec.max_intervals)?;

    let far_kernel = |y: &[f64; 3], om: &[f64; 3]| -> [f64; 3] {
        let d = sub(&x, y);
        let nd = norm3(&d);
        let w = 1.0 - near_weight(nd / delta);
        if w == 0.0 {
            return [0.0; 3];
        }
        let k = cross(&d, om);
        let s = -w / (FOUR_PI * nd * nd * nd);
        k.map(|c| c * s)
    };
    let shell = |rho: f64| -> [f64; 3] {
        let v = sphere.integrate_abs(
            |e| {
                let y = [rho * e[0], rho * e[1], rho * e[2]];
                far_kernel(&y, &omega.eval(y))
            },
            angular_floor(spec, rho * rho, lay.top),
        );
        v.map(|c| c * rho * rho)
    };
    let (vf, ef) = quad::adaptive_vec(shell, 0.0, lay.top, &lay.breaks(), spec.abs_tol, spec.rel_tol, spec.max_intervals)?;

    let mut value = [vn[0] + vf[0], vn[1] + vf[1], vn[2] + vf[2]];
    let mut err = en + ef;
    if lay.tail {
        let top = lay.top;
        let tail = |s: f64| -> [f64; 3] {
            let rho = top * s.exp();
            let v = sphere.integrate_abs(
                |e| {
                    let y = [rho * e[0], rho * e[1], rho * e[2]];
                    let om = omega.eval(y);
                    let d = sub(&x, &y);
                    let nd = norm3(&d);
                    let xy = dot(&x, &y);
                    let k: [f64; 3] = std::array::from_fn(|l| {
                        d[l] / (nd * nd * nd) + y[l] / (rho * rho * rho)
                            - (x[l] * rho * rho - 3.0 * y[l] * xy) / rho.powi(5)
                    });
                    cross(&k, &om).map(|c| -c / FOUR_PI)
                },
                angular_floor(spec, rho * rho * rho, spec.r_outer.ln()),
            );
            v.map(|c| c * rho * rho * rho)
        };
        let (vt, et) = quad::adaptive_vec(tail, 0.0, spec.r_outer.ln(), &[], spec.abs_tol, spec.rel_tol, spec.max_intervals)?;
        for m in 0..3 {
            value[m] += vt[m];
        }
        err += et;
    }
    check(err, spec, value[0])?;
    Ok(VectorEstimate { value, err_est: err })
}

/// `out[3i+j] = ε_{ikl} ω_k (δ_{jl} - 3 e_j e_l)` for a unit vector `e`.
fn gradient_kernel(om: &[f64; 3], e: &[f64; 3]) -> [f64; 9] {
    let mut out = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    let eps = levi(i, k, l);
                    if eps != 0.0 {
                        let h = if j == l { 1.0 } else { 0.0 } - 3.0 * e[j] * e[l];
                        s += eps * om[k] * h;
                    }
                }
            }
            out[3 * i + j] = s;
        }
    }
    out
}

/// `∂_j u_i(x) = (1/3) ε_{ikj} ω_k(x) + (1/4π) PV ∫ ε_{ikl} ω_k(x-y) (δ_{jl}|y|² - 3y_j y_l)/|y|⁵ dy`.
///
/// The principal value is taken over the exclusion radii of the schedule
/// (relative to the near-field radius) and extrapolated.
pub fn velocity_gradient_pv<F: VectorField3 + ?Sized>(
    omega: &F,
    x: [f64; 3],
    spec: &QuadratureSpec3,
) -> Result<MatrixEstimate> {
    let lay = Layout::new(omega, &x, spec)?;
    let sphere = spec.sphere();
    let delta = lay.delta;
    if spec.eps_schedule.is_empty() || spec.eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("eps schedule must be non-empty and decreasing".into()));
    }

    let near = |r: f64| -> [f64; 9] {
        let w = near_weight(r / delta);
        if w == 0.0 || r == 0.0 {
            return [0.0; 9];
        }
        let v = sphere.integrate_abs(
            |e| {
                let om = omega.eval([x[0] - r * e[0], x[1] - r * e[1], x[2] - r * e[2]]);
                gradient_kernel(&om, e)
            },
            angular_floor(spec, 1.0 / (FOUR_PI * r), delta),
        );
        v.map(|c| c * w / (FOUR_PI * r))
    };
    let eps: Vec<f64> = spec.eps_schedule.iter().map(|e| e * delta).collect();
    let (vn, en) = quad::adaptive_vec(&near, eps[0], delta, &[0.5 * delta], spec.abs_tol, spec.rel_tol, spec.max_intervals)?;
    let mut pieces = vec![vn];
    let mut err = en;
    for w in eps.windows(2) {
        let (v, e) = quad::adaptive_vec(&near, w[1], w[0], &[], spec.abs_tol * 1e-2, spec.rel_tol, spec.max_intervals)?;
        let last = *pieces.last().unwrap();
        pieces.push(std::array::from_fn(|m| last[m] + v[m]));
        err += e;
    }

    let far = |y: &[f64; 3], om: &[f64; 3], subtract: bool| -> [f64; 9] {
        let d = sub(&x, y);
        let nd = norm3(&d);
        let w = if subtract { 1.0 } else { 1.0 - near_weight(nd / delta) };
        if w == 0.0 {
            return [0.0; 9];
        }
        let k = gradient_kernel(om, &unit(d)).map(|c| c * w / (FOUR_PI * nd * nd * nd));
        if subtract {
            let ny = norm3(y);
            let k0 = gradient_kernel(om, &unit(*y)).map(|c| c / (FOUR_PI * ny * ny * ny));
            std::array::from_fn(|m| k[m] - k0[m])
        } else {
            k
        }
    };
    let shell = |rho: f64| -> [f64; 9] {
        let v = sphere.integrate_abs(
            |e| {
                let y = [rho * e[0], rho * e[1], rho * e[2]];
                far(&y, &omega.eval(y), false)
            },
            angular_floor(spec, rho * rho, lay.top),
        );
        v.map(|c| c * rho * rho)
    };
    let (mut vf, ef) = quad::adaptive_vec(shell, 0.0, lay.top, &lay.breaks(), spec.abs_tol, spec.rel_tol, spec.max_intervals)?;
    err += ef;
    if lay.tail {
        let top = lay.top;
        let tail = |s: f64| -> [f64; 9] {
            let rho = top * s.exp();
            let v = sphere.integrate_abs(
                |e| {
                    let y = [rho * e[0], rho * e[1], rho * e[2]];
                    far(&y, &omega.eval(y), true)
                },
                angular_floor(spec, rho * rho * rho, spec.r_outer.ln()),
            );
            v.map(|c| c * rho * rho * rho)
        };
        let (vt, et) = quad::adaptive_vec(tail, 0.0, spec.r_outer.ln(), &[], spec.abs_tol, spec.rel_tol, spec.max_intervals)?;
        for m in 0..9 {
            vf[m] += vt[m];
        }
        err += et;
    }

    let om_x = omega.eval(x);
    let mut value = [[0.0; 3]; 3];
    let mut extrap_err = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let m = 3 * i + j;
            let col: Vec<f64> = pieces.iter().map(|p| p[m] + vf[m]).collect();
            let ex = quad::richardson(&eps, &col, 2.0);
            if eps.len() > 1 {
                extrap_err = extrap_err.max(ex.err);
            }
            let local: f64 = (0..3).map(|k| levi(i, k, j) * om_x[k]).sum::<f64>() / 3.0;
            value[i][j] = ex.value + local;
        }
    }
    err += extrap_err;
    check(err, spec, value[0][0])?;
    Ok(MatrixEstimate { value, err_est: err })
}

/// Moments of one vorticity component: `I_j`, `II⁽¹⁾_j(r)`, `II⁽²⁾_j(r)`
/// for `j = 1, 2, 3` (stored 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSet {
    pub component: usize,
    pub r: f64,
    pub i: [f64; 3],
    pub ii1: [f64; 3],
    pub ii2: [f64; 3],
    pub err_est: f64,
}

/// Shell integrals `∫_{S²} e_j f(ρe) dσ` (first three entries) and
/// `∫ (e_{j+1}² - e_{j-1}²) f`, `∫ e_{j+1} e_{j-1} f` (next six).
fn moment_shell<F: VectorField3 + ?Sized>(omega: &F, c: usize, rho: f64, sphere: &SphereRule, floor: f64) -> [f64; 9] {
    sphere.integrate_abs(|e| {
        let f = omega.eval([rho * e[0], rho * e[1], rho * e[2]])[c];
        let mut out = [0.0; 9];
        for j in 0..3 {
            let (p, m) = ((j + 1) % 3, (j + 2) % 3);
            out[j] = e[j] * f;
            out[3 + j] = (e[p] * e[p] - e[m] * e[m]) * f;
            out[6 + j] = e[p] * e[m] * f;
        }
        out
    }, floor)
}

/// `I_j[ω_c] = (1/4π)∫ y_j/|y|³ ω_c`, `II⁽¹⁾_j[ω_c](r) = (1/4π)∫_{|y|≥2r} (y_{j+1}² - y_{j-1}²)/|y|⁵ ω_c`
/// and `II⁽²⁾_j[ω_c](r) = (1/4π)∫_{|y|≥2r} y_{j+1}y_{j-1}/|y|⁵ ω_c`, indices mod 3.
pub fn compute_moments<F: VectorField3 + ?Sized>(
    omega: &F,
    component: usize,
    r: f64,
    spec: &QuadratureSpec3,
) -> Result<MomentSet> {
    if component > 2 {
        return Err(Error::InvalidParameter(format!("component {component} outside 0..3")));
    }
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!("radius {r} must be non-negative")));
    }
    let sphere = spec.sphere();
    let floor = 1e-3 * spec.abs_tol;
    let s = omega.support_radius();
    let top = if s.is_finite() {
        s
    } else {
        // shells must vanish for the improper integrals to converge
        for k in 1..=3 {
            let rho = (1.0 + 2.0 * r) * 10f64.powi(k);
            let v = moment_shell(omega, component, rho, &sphere, floor);
            if v[..3].iter().any(|x| x.abs() > spec.tolerance) {
                return Err(Error::NonIntegrable(format!("moment shells do not decay at radius {rho}")));
            }
        }
        (1.0 + 2.0 * r) * spec.r_outer
    };
    let first = |rho: f64| -> [f64; 3] {
        let v = moment_shell(omega, component, rho, &sphere, floor);
        [v[0], v[1], v[2]].map(|c| c / FOUR_PI)
    };
    let second = |rho: f64| -> [f64; 6] {
        let v = moment_shell(omega, component, rho, &sphere, floor);
        std::array::from_fn(|m| v[3 + m] / (FOUR_PI * rho))
    };
    let mut breaks: Vec<f64> = vec![];
    if !s.is_finite() {
        breaks.extend([1.0, 10.0, 100.0, 1000.0].iter().map(|b| b * (1.0 + 2.0 * r)));
    }
    let (vi, ei) = quad::adaptive_vec(first, 0.0, top, &breaks, spec.abs_tol, spec.rel_tol, spec.max_intervals)?;
    let (vii, eii) = if 2.0 * r >= top {
        ([0.0; 6], 0.0)
    } else {
        if r == 0.0 {
            return Err(Error::InvalidParameter("second moments need r > 0".into()));
        }
        let lo = 2.0 * r;
        let t = |u: f64| {
            let rho = lo * u.exp();
            second(rho).map(|c| c * rho)
        };
        quad::adaptive_vec(t, 0.0, (top / lo).ln(), &[], spec.abs_tol, spec.rel_tol, spec.max_intervals)?
    };
    Ok(MomentSet {
        component,
        r,
        i: vi,
        ii1: [vii[0], vii[1], vii[2]],
        ii2: [vii[3], vii[4], vii[5]],
        err_est: ei + eii,
    })
}

/// Moment terms of the velocity expansion at `x`, from the moment sets of
/// the three components (evaluated at `r = |x|`).
pub fn assemble_expansion(x: [f64; 3], m: &[MomentSet; 3]) -> [f64; 3] {
    std::array::from_fn(|i| {
        let (p, q) = ((i + 1) % 3, (i + 2) % 3);
        let (wq, wp) = (&m[q], &m[p]);
        wq.i[p] - wp.i[q] - x[p] * wq.ii1[q] + x[p] * wq.ii1[i] + x[q] * wp.ii1[i] - x[q] * wp.ii1[p]
            + 3.0 * x[i] * wq.ii2[q]
            + 3.0 * x[q] * wq.ii2[i]
            - 3.0 * x[p] * wp.ii2[i]
            - 3.0 * x[i] * wp.ii2[p]
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionResult {
    pub u_expansion: [f64; 3],
    pub u_pv: [f64; 3],
    /// `|u_pv - u_expansion|`.
    pub remainder: f64,
    /// `remainder / |x|`.
    pub remainder_ratio: f64,
    pub x_norm: f64,
    /// Sampled `‖ω‖_∞`.
    pub omega_sup: f64,
}

impl ExpansionResult {
    /// `C·|x|·‖ω‖_∞`.
    pub fn remainder_bound(&self, c: f64) -> f64 {
        c * self.x_norm * self.omega_sup
    }

    /// Smallest `C` with `remainder ≤ C·|x|·‖ω‖_∞` over all results.
    pub fn fit_constant(results: &[ExpansionResult]) -> f64 {
        results
            .iter()
            .filter(|r| r.omega_sup > 0.0)
            .map(|r| r.remainder / (r.x_norm * r.omega_sup))
            .fold(0.0, f64::max)
    }
}

/// Maximum of `|ω|` over a 24³ grid covering the support ball.
fn sampled_sup<F: VectorField3 + ?Sized>(omega: &F) -> f64 {
    let s = omega.support_radius();
    let n = 24;
    let mut sup = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let c = |m: usize| s * (2.0 * (m as f64 + 0.5) / n as f64 - 1.0);
                sup = sup.max(norm3(&omega.eval([c(i), c(j), c(k)])));
            }
        }
    }
    sup
}

pub fn velocity_expansion<F: VectorField3 + ?Sized>(omega: &F, x: [f64; 3], spec: &QuadratureSpec3) -> Result<ExpansionResult> {
    if !omega.support_radius().is_finite() {
        return Err(Error::InvalidParameter("expansion needs compactly supported vorticity".into()));
    }
    let r = norm3(&x);
    if r == 0.0 {
        return Err(Error::OutsideDomain(x.to_vec()));
    }
    let m = [
        compute_moments(omega, 0, r, spec)?,
        compute_moments(omega, 1, r, spec)?,
        compute_moments(omega, 2, r, spec)?,
    ];
    let u_expansion = assemble_expansion(x, &m);
    let u_pv = velocity_pv(omega, x, spec)?.value;
    let remainder = norm3(&sub(&u_pv, &u_expansion));
    Ok(ExpansionResult {
        u_expansion,
        u_pv,
        remainder,
        remainder_ratio: remainder / r,
        x_norm: r,
        omega_sup: sampled_sup(omega),
    })
}

/// Monomial weights for [`sphere_moment_residual`] (indices 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SphereMonomial {
    /// `y_j / |y|³`.
    Linear(usize),
    /// `y_i y_j / |y|⁵`.
    Product(usize, usize),
    /// `y_j² / |y|⁵`.
    Square(usize),
}

impl SphereMonomial {
    fn eval(&self, y: &[f64; 3], r: f64) -> f64 {
        match *self {
            Self::Linear(j) => y[j] / r.powi(3),
            Self::Product(i, j) => y[i] * y[j] / r.powi(5),
            Self::Square(j) => y[j] * y[j] / r.powi(5),
        }
    }
}

/// `|∫_{|y|=R} p(y) ω_c(y) dσ(y)|`.
pub fn sphere_moment_residual<F: VectorField3 + ?Sized>(
    omega: &F,
    radius: f64,
    monomial: SphereMonomial,
    component: usize,
    spec: &QuadratureSpec3,
) -> f64 {
    let sphere = spec.sphere();
    let v = sphere.integrate_abs(
        |e| {
            let y = [radius * e[0], radius * e[1], radius * e[2]];
            [monomial.eval(&y, radius) * omega.eval(y)[component]]
        },
        1e-3 * spec.abs_tol / (radius * radius),
    );
    (v[0] * radius * radius).abs()
}

/// Divergence-free test vorticity `∇ × (b e₃)` with
/// `b = (1-|y|²)⁴ (1 + y₁ + 2y₂)`, supported in the unit ball.
pub fn bump_vorticity() -> FnField<impl Fn([f64; 3]) -> [f64; 3] + Send + Sync + Clone> {
    FnField::new(|y: [f64; 3]| {
        let r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
        if r2 >= 1.0 {
            return [0.0; 3];
        }
        let a = (1.0 - r2).powi(4);
        let da = -8.0 * (1.0 - r2).powi(3);
        let p = 1.0 + y[0] + 2.0 * y[1];
        [da * y[1] * p + 2.0 * a, -(da * y[0] * p + a), 0.0]
    })
    .with_support(1.0)
}
