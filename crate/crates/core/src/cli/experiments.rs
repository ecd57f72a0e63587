use std::f64::consts::FRAC_PI_4;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::biot3d::{self, QuadratureSpec3, SphereMonomial};
use crate::blowup::{self, Face, FlowDriver, IntegrationControls, LocalizedData};
use crate::error::Result;
use crate::fields::{self, FnField, VectorField3};
use crate::singular2d::{self, BcNormalization, ModeCoefficient, QuadratureSpec2, RieszKernel2, SectorFunction2};
use crate::symgroup::{extend_vector_field, Domain, SymmetryGroup, VectorParity};

pub(crate) fn dispatch(cmd: &Command, ctx: &Context) -> Result<Report> {
    match cmd {
        Command::GroupTables(a) => group_tables(a),
        Command::Riesz2dVerify(a) => riesz2d_verify(a, ctx),
        Command::BcSlope(a) => bc_slope(a),
        Command::SectorModes(a) => sector_modes(a),
        Command::ExpansionCheck(a) => expansion_check(a),
        Command::VelocityVerify(a) => verify_3d(a, ctx, false),
        Command::GradientVerify(a) => verify_3d(a, ctx, true),
        Command::SphereMoments(a) => sphere_moments(a),
        Command::BlowupClassify(a) => blowup_classify(a),
        Command::BlowupIntegrate(a) => blowup_integrate(a),
        Command::SlipCheck(a) => slip_check(a, ctx),
        Command::FlowMap(a) => flow_map(a, ctx),
        Command::HolderProbe(a) => holder_probe(a),
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        invalid(format!("{name} must be positive, got {v}"))
    }
}

fn pair(s: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b] => match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
            (Ok(a), Ok(b)) if a.is_finite() && b.is_finite() => Ok((a, b)),
            _ => invalid(format!("cannot parse pair {s:?}")),
        },
        _ => invalid(format!("expected a:b, got {s:?}")),
    }
}

/// Accuracy profile for the 3D integrals.
pub fn profile(name: &str) -> Result<QuadratureSpec3> {
    match name {
        "default" => Ok(QuadratureSpec3::default()),
        "fast" => Ok(QuadratureSpec3 {
            abs_tol: 1e-6,
            rel_tol: 1e-6,
            angular_tol: 1e-6,
            max_depth: 5,
            tolerance: 1e-4,
            ..Default::default()
        }),
        _ => invalid(format!("unknown profile {name:?} (default, fast)")),
    }
}

/// Random points of the chamber `x₁ > x₂ > x₃ > 0` with all coordinate gaps
/// at least `gap`, radii in `[r_min, r_max]`.
pub fn chamber_points(n: usize, r_min: f64, r_max: f64, gap: f64, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut x: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.0..1.0));
        x.sort_by(|a, b| b.total_cmp(a));
        let r = rng.gen_range(r_min..=r_max);
        let nx = fields::norm3(&x);
        let x = x.map(|c| c * r / nx);
        if x[0] - x[1] >= gap * r && x[1] - x[2] >= gap * r && x[2] >= gap * r {
            out.push(x);
        }
    }
    out
}

pub fn octant_vorticity(lambda: f64, mu: f64) -> impl VectorField3 {
    extend_vector_field(
        move |_| blowup::si_vorticity(lambda, mu),
        f64::INFINITY,
        &SymmetryGroup::extended_octahedral(),
        Domain::UTilde,
        VectorParity::Odd,
    )
}

fn group_tables(a: &GroupTablesArgs) -> Result<Report> {
    let which = a.group.clone().unwrap_or_else(|| "both".into());
    let groups: Vec<(&str, SymmetryGroup<3>, usize)> = match which.as_str() {
        "O" => vec![("O", SymmetryGroup::octahedral(), 24)],
        "O-tilde" => vec![("O-tilde", SymmetryGroup::extended_octahedral(), 48)],
        "both" => vec![
            ("O", SymmetryGroup::octahedral(), 24),
            ("O-tilde", SymmetryGroup::extended_octahedral(), 48),
        ],
        g => return invalid(format!("unknown group {g:?} (O, O-tilde, both)")),
    };
    let mut r = Report::new(&["group", "index", "m11", "m12", "m13", "m21", "m22", "m23", "m31", "m32", "m33", "parity"]);
    for (label, g, order) in groups {
        let ok = g.order() == order && g.is_closed();
        r.note(&format!("order_{label}"), g.order());
        for (i, e) in g.elements().iter().enumerate() {
            let mut row = vec![label.to_string(), i.to_string()];
            row.extend(e.matrix().iter().flatten().map(|v| v.to_string()));
            row.push(e.parity().to_string());
            r.push(row, ok);
        }
    }
    Ok(r)
}

fn riesz2d_verify(a: &Riesz2dArgs, ctx: &Context) -> Result<Report> {
    let n = a.n_points.unwrap_or(20);
    let (r0, r1) = (positive("r_min", a.r_min.unwrap_or(0.2))?, positive("r_max", a.r_max.unwrap_or(5.0))?);
    let tol = positive("tolerance", a.tolerance.unwrap_or(1e-3))?;
    if r0 >= r1 || n == 0 {
        return invalid("need 0 < r_min < r_max and n_points > 0");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let pts: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            let r = rng.gen_range(r0..r1);
            let t = rng.gen_range(0.02..FRAC_PI_4 - 0.02);
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    let spec = QuadratureSpec2::default();
    let mut r = Report::new(&["function", "x1", "x2", "kernel", "value", "err_est", "expected"]);
    let omega4 = SectorFunction2::odd_indicator_omega4();
    let r12 = singular2d::riesz_pv_2d_many(&omega4, RieszKernel2::R12, &pts, &spec);
    let mut worst = 0.0f64;
    for (x, v) in pts.iter().zip(r12) {
        let v = v?;
        let expected = singular2d::riesz_quadrant_closed_form(*x)?;
        let err = (v.value - expected).abs();
        worst = worst.max(err);
        r.push(
            vec!["omega4".into(), num(x[0]), num(x[1]), "R12".into(), num(v.value), num(v.err_est), num(expected)],
            err <= tol,
        );
    }
    r.note("max_err_R12", num(worst));
    for (label, f) in [("omega4", omega4), ("checkerboard", SectorFunction2::checkerboard_r4())] {
        let a11 = singular2d::riesz_pv_2d_many(&f, RieszKernel2::R11, &pts, &spec);
        let a22 = singular2d::riesz_pv_2d_many(&f, RieszKernel2::R22, &pts, &spec);
        for ((x, v11), v22) in pts.iter().zip(a11).zip(a22) {
            let (v11, v22) = (v11?, v22?);
            let value = v11.value + v22.value;
            let expected = -f.eval(*x);
            r.push(
                vec![
                    label.into(),
                    num(x[0]),
                    num(x[1]),
                    "R11+R22".into(),
                    num(value),
                    num(v11.err_est + v22.err_est),
                    num(expected),
                ],
                (value - expected).abs() <= tol,
            );
        }
    }
    Ok(r)
}

fn bc_slope(a: &BcSlopeArgs) -> Result<Report> {
    let radii = a.radii.clone().unwrap_or_else(|| (3..=8).map(|k| 0.5f64.powi(k)).collect());
    let norm = match a.normalization.as_deref().unwrap_or("raw") {
        "raw" => BcNormalization::RawSeries,
        "normalized" => BcNormalization::Normalized,
        s => return invalid(format!("unknown normalization {s:?} (raw, normalized)")),
    };
    let target = a.expected_c12.unwrap_or(0.25);
    let tol = positive("tolerance", a.tolerance.unwrap_or(0.02))?;
    let spec = QuadratureSpec2::default();
    let mut r = Report::new(&["kernel", "r", "value", "err_est", "c", "b", "residual", "expected_c"]);
    for k in [RieszKernel2::R12, RieszKernel2::R11, RieszKernel2::R22] {
        let fit = singular2d::bc_log_slope(k, &radii, norm, &spec)?;
        let (expected, ok) = match k {
            RieszKernel2::R12 => (target, (fit.c - target).abs() <= tol),
            _ => (0.0, fit.c.abs() <= tol),
        };
        r.note(&format!("c_{}", k.label()), num(fit.c));
        for (rad, v, e) in &fit.samples {
            r.push(
                vec![k.label().into(), num(*rad), num(*v), num(*e), num(fit.c), num(fit.b), num(fit.residual), num(expected)],
                ok,
            );
        }
    }
    r.plot = Some(PlotSpec { x: "r".into(), ys: vec!["value".into()], log_x: true, log_y: false });
    Ok(r)
}

fn sector_modes(a: &SectorModesArgs) -> Result<Report> {
    let cases: Vec<(u32, f64)> = match &a.cases {
        None => vec![(2, 0.5), (4, 0.0), (4, 0.5), (6, 0.25), (2, 0.0)],
        Some(cs) => cs
            .iter()
            .map(|c| {
                let (m, al) = pair(c)?;
                if m < 1.0 || m.fract() != 0.0 {
                    return invalid(format!("sector count {m} must be a positive integer"));
                }
                Ok((m as u32, al))
            })
            .collect::<Result<_>>()?,
    };
    let radii = a.radii.clone().unwrap_or_else(|| vec![0.25, 0.5, 1.0, 2.0]);
    let h = positive("h", a.h.unwrap_or(1e-3))?;
    let tol = positive("tolerance", a.tolerance.unwrap_or(1e-4))?;
    if radii.iter().any(|r| *r <= h) {
        return invalid("radii must exceed the difference step h");
    }
    let mut r = Report::new(&["m", "alpha", "kind", "coefficient", "exponent", "residual"]);
    for (m, al) in cases {
        let mode = singular2d::sector_poisson_mode(m, al)?;
        let res = singular2d::polar_laplacian_residual(m, al, &radii, h)?;
        let (kind, exponent) = match mode {
            ModeCoefficient::Power { exponent, .. } => ("power", num(exponent)),
            ModeCoefficient::Log { .. } => ("log", String::new()),
        };
        r.push(
            vec![m.to_string(), num(al), kind.into(), num(mode.coefficient()), exponent, num(res)],
            res <= tol,
        );
    }
    Ok(r)
}

fn expansion_check(a: &ExpansionArgs) -> Result<Report> {
    let (k0, k1) = (a.k_min.unwrap_or(5), a.k_max.unwrap_or(9));
    if k1 < k0 + 1 || k0 < 0 {
        return invalid("need 0 <= k_min < k_max");
    }
    let min_slope = a.min_slope.unwrap_or(0.9);
    let spec = profile(a.profile.as_deref().unwrap_or("default"))?;
    let w = biot3d::bump_vorticity();
    let mut results = vec![];
    for k in k0..=k1 {
        let t = 0.5f64.powi(k) / 3f64.sqrt();
        results.push((k, biot3d::velocity_expansion(&w, [t, t, t], &spec)?));
    }
    let lx: Vec<f64> = results.iter().map(|(_, e)| e.x_norm.ln()).collect();
    let lr: Vec<f64> = results.iter().map(|(_, e)| e.remainder.ln()).collect();
    let (slope, _, _) = crate::quad::linear_fit(&lx, &lr)?;
    let all: Vec<_> = results.iter().map(|(_, e)| *e).collect();
    let c = biot3d::ExpansionResult::fit_constant(&all);
    let ok = slope >= min_slope;
    let mut r = Report::new(&[
        "k", "x_norm", "u_pv_1", "u_pv_2", "u_pv_3", "u_exp_1", "u_exp_2", "u_exp_3", "remainder", "remainder_ratio",
        "remainder_bound",
    ]);
    for (k, e) in &results {
        let mut row = vec![k.to_string(), num(e.x_norm)];
        row.extend(e.u_pv.iter().map(|v| num(*v)));
        row.extend(e.u_expansion.iter().map(|v| num(*v)));
        row.extend([num(e.remainder), num(e.remainder_ratio), num(e.remainder_bound(c))]);
        r.push(row, ok);
    }
    r.note("slope", num(slope));
    r.note("C", num(c));
    r.plot = Some(PlotSpec { x: "x_norm".into(), ys: vec!["remainder".into()], log_x: true, log_y: true });
    Ok(r)
}

fn verify_3d(a: &VerifyArgs, ctx: &Context, gradient: bool) -> Result<Report> {
    let pairs: Vec<(f64, f64)> = match &a.pairs {
        None => vec![(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (-1.0, 2.0)],
        Some(p) => p.iter().map(|s| pair(s)).collect::<Result<_>>()?,
    };
    let n = a.n_points.unwrap_or(5);
    let tol = positive("tolerance", a.tolerance.unwrap_or(1e-2))?;
    let spec = profile(a.profile.as_deref().unwrap_or("fast"))?;
    let pts = chamber_points(n, 0.5, 4.0, 0.1, ctx.seed);
    let mut r = Report::new(&["lambda", "mu", "x1", "x2", "x3", "i", "j", "value", "exact", "err_est"]);
    let mut worst = 0.0f64;
    for &(l, m) in &pairs {
        let w = octant_vorticity(l, m);
        for x in &pts {
            let (vals, exact, err): (Vec<(usize, usize, f64)>, Vec<f64>, f64) = if gradient {
                let g = biot3d::velocity_gradient_pv(&w, *x, &spec)?;
                let e = blowup::si_velocity_gradient(l, m);
                let v = (0..9).map(|k| (k / 3, k % 3, g.value[k / 3][k % 3])).collect();
                (v, e.iter().flatten().copied().collect(), g.err_est)
            } else {
                let u = biot3d::velocity_pv(&w, *x, &spec)?;
                let e = blowup::si_velocity(l, m, *x);
                ((0..3).map(|k| (k, 0, u.value[k])).collect(), e.to_vec(), u.err_est)
            };
            let scale = exact.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
            for ((i, j, v), e) in vals.into_iter().zip(&exact) {
                let rel = (v - e).abs() / scale;
                worst = worst.max(rel);
                r.push(
                    vec![num(l), num(m), num(x[0]), num(x[1]), num(x[2]), (i + 1).to_string(), (j + 1).to_string(), num(v), num(*e), num(err)],
                    rel <= tol,
                );
            }
        }
    }
    r.note("max_rel_err", num(worst));
    Ok(r)
}

fn sphere_moments(a: &SphereMomentsArgs) -> Result<Report> {
    let radius = positive("radius", a.radius.unwrap_or(1.0))?;
    let (l, m) = (a.lambda.unwrap_or(1.0), a.mu.unwrap_or(1.0));
    let tol = positive("tolerance", a.tolerance.unwrap_or(1e-8))?;
    let spec = QuadratureSpec3::default();
    let w = octant_vorticity(l, m);
    let mut r = Report::new(&["field", "monomial", "component", "radius", "value", "expected"]);
    let mut monomials = vec![];
    for j in 0..3 {
        monomials.push((format!("y{}/|y|^3", j + 1), SphereMonomial::Linear(j)));
        monomials.push((format!("y{}^2/|y|^5", j + 1), SphereMonomial::Square(j)));
        let (p, q) = (j.min((j + 1) % 3), j.max((j + 1) % 3));
        monomials.push((format!("y{}y{}/|y|^5", p + 1, q + 1), SphereMonomial::Product(p, q)));
    }
    for (label, mono) in &monomials {
        for c in 0..3 {
            let v = biot3d::sphere_moment_residual(&w, radius, *mono, c, &spec);
            r.push(vec!["octant".into(), label.clone(), (c + 1).to_string(), num(radius), num(v), num(0.0)], v <= tol);
        }
    }
    let e3 = FnField::new(|_| [0.0, 0.0, 1.0]);
    let v = biot3d::sphere_moment_residual(&e3, radius, SphereMonomial::Square(2), 2, &spec);
    let expected = 4.0 * std::f64::consts::PI / (3.0 * radius);
    r.push(
        vec!["constant-e3".into(), "y3^2/|y|^5".into(), "3".into(), num(radius), num(v), num(expected)],
        v > 0.0 && (v - expected).abs() <= 1e-10 * expected,
    );
    Ok(r)
}

fn blowup_classify(a: &ClassifyArgs) -> Result<Report> {
    let grid = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];
    let cells: Vec<(f64, f64)> = match (a.lambda, a.mu) {
        (Some(l), Some(m)) => vec![(l, m)],
        (None, None) => grid.iter().flat_map(|&l| grid.iter().map(move |&m| (l, m))).collect(),
        _ => return invalid("give both --lambda and --mu, or neither for the grid"),
    };
    let controls = IntegrationControls {
        t_max: positive("t_max", a.t_max.unwrap_or(50.0))?,
        escape_threshold: positive("escape_threshold", a.escape_threshold.unwrap_or(1e8))?,
        ..Default::default()
    };
    let mut r = Report::new(&["lambda0", "mu0", "blows_up", "rule", "t_star", "integrated_escape", "integrated_t_star"]);
    for (l, m) in cells {
        let v = blowup::classify_initial_data(l, m);
        let tr = blowup::integrate(l, m, &controls)?;
        let fit = tr.t_star.map(|f| f.t_star);
        let mut ok = v.blows_up == tr.escaped;
        if let (Some(a), Some(b)) = (v.t_star_estimate, fit) {
            ok &= (a - b).abs() <= 0.01 * a;
        }
        r.push(
            vec![
                num(l),
                num(m),
                v.blows_up.to_string(),
                v.rule.label().into(),
                v.t_star_estimate.map(num).unwrap_or_default(),
                tr.escaped.to_string(),
                fit.map(num).unwrap_or_default(),
            ],
            ok,
        );
    }
    Ok(r)
}

fn blowup_integrate(a: &IntegrateArgs) -> Result<Report> {
    let d = IntegrationControls::default();
    let c = IntegrationControls {
        rtol: positive("rtol", a.rtol.unwrap_or(d.rtol))?,
        atol: positive("atol", a.atol.unwrap_or(d.atol))?,
        escape_threshold: positive("escape_threshold", a.escape_threshold.unwrap_or(d.escape_threshold))?,
        t_max: positive("t_max", a.t_max.unwrap_or(d.t_max))?,
        max_step: d.max_step,
    };
    let (l, m) = (a.lambda.unwrap_or(1.0), a.mu.unwrap_or(1.0));
    let id_tol = positive("identity_tolerance", a.identity_tolerance.unwrap_or(1e-6))?;
    let tr = blowup::integrate(l, m, &c)?;
    let states = match a.sample_dt {
        Some(dt) => tr.dense(dt)?,
        None => tr.states.clone(),
    };
    let verdict = blowup::classify_initial_data(l, m);
    let resid = blowup::difference_identity_residual(&tr);
    let mut ok = resid <= id_tol && verdict.blows_up == tr.escaped;
    if let (Some(a), Some(f)) = (verdict.t_star_estimate, tr.t_star) {
        ok &= (a - f.t_star).abs() <= 0.01 * a;
    }
    let mut r = Report::new(&["t", "lambda", "mu"]);
    for s in &states {
        r.push(vec![num(s.t), num(s.lambda), num(s.mu)], ok);
    }
    r.note("escaped", tr.escaped);
    if let Some(f) = tr.t_star {
        r.note("t_star", num(f.t_star));
        r.note("fit_residual", num(f.residual));
    }
    r.note("difference_identity_residual", num(resid));
    r.plot = Some(PlotSpec { x: "t".into(), ys: vec!["lambda".into(), "mu".into()], log_x: false, log_y: false });
    Ok(r)
}

fn slip_check(a: &SlipArgs, ctx: &Context) -> Result<Report> {
    let (l, m) = (a.lambda.unwrap_or(1.0), a.mu.unwrap_or(1.0));
    let n = a.n_samples.unwrap_or(20);
    let tol = positive("tolerance", a.tolerance.unwrap_or(1e-14))?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut r = Report::new(&["face", "x1", "x2", "x3", "residual"]);
    for (label, face) in [("x3=0", Face::X3Zero), ("x1=x2", Face::X1EqX2), ("x2=x3", Face::X2EqX3)] {
        for _ in 0..n {
            let (mut p, mut q) = (rng.gen_range(0.0..4.0), rng.gen_range(0.0..4.0));
            if p < q {
                std::mem::swap(&mut p, &mut q);
            }
            let x = match face {
                Face::X3Zero => [p, q, 0.0],
                Face::X1EqX2 => [p, p, q],
                Face::X2EqX3 => [p, q, q],
            };
            let res = blowup::slip_residual(l, m, face, &[x])?;
            r.push(vec![label.into(), num(x[0]), num(x[1]), num(x[2]), num(res)], res <= tol * (1.0 + p));
        }
    }
    Ok(r)
}

fn flow_map(a: &FlowMapArgs, ctx: &Context) -> Result<Report> {
    let (l, m) = (a.lambda.unwrap_or(1.0), a.mu.unwrap_or(1.0));
    let n = a.n_paths.unwrap_or(50);
    let frac = a.fraction.unwrap_or(0.9);
    if !(frac > 0.0 && frac < 1.0) {
        return invalid(format!("fraction {frac} must lie in (0, 1)"));
    }
    let steps = a.steps.unwrap_or(400);
    let tol = positive("tolerance", a.tolerance.unwrap_or(1e-9))?;
    let tr = blowup::integrate(l, m, &IntegrationControls::default())?;
    let t = match tr.t_star {
        Some(f) => frac * f.t_star.min(tr.t_end()),
        None => frac * a.t_end.unwrap_or(tr.t_end()).min(tr.t_end()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut r = Report::new(&["path", "x0_1", "x0_2", "x0_3", "t", "x1", "x2", "x3", "min_face"]);
    for i in 0..n {
        let mut x0: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.0..2.0));
        x0.sort_by(|a, b| b.total_cmp(a));
        let f = blowup::flow_map(FlowDriver::Trajectory(&tr), x0, t, steps)?;
        let mut row = vec![i.to_string()];
        row.extend(x0.iter().map(|v| num(*v)));
        row.push(num(t));
        row.extend(f.x.iter().map(|v| num(*v)));
        row.push(num(f.min_face));
        r.push(row, f.min_face >= -tol);
    }
    Ok(r)
}

fn holder_probe(a: &HolderArgs) -> Result<Report> {
    let alpha = a.alpha.unwrap_or(0.5);
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha {alpha} must lie in (0, 1)"));
    }
    let levels = a.levels.unwrap_or(6);
    let n_ang = a.n_angular.unwrap_or(12);
    let name = a.field.clone().unwrap_or_else(|| "octant-vorticity".into());
    let field: Box<dyn VectorField3> = match name.as_str() {
        "octant-vorticity" => Box::new(octant_vorticity(1.0, 1.0)),
        "localized" => Box::new(blowup::localized_initial_data(&LocalizedData::new(1.0, 1.0))?),
        "si-velocity" => Box::new(FnField::new(|x| blowup::si_velocity(1.0, 1.0, x))),
        s => return invalid(format!("unknown field {s:?} (octant-vorticity, localized, si-velocity)")),
    };
    let mut r = Report::new(&["levels", "n_points", "holder", "ring_holder"]);
    for k in 1..=levels {
        let pts = fields::probe_cloud(k, n_ang, None, 1.0);
        let cloud = fields::SampleCloud::from_field(&pts, &*field)?;
        let h = fields::holder_seminorm(&cloud, alpha)?;
        let rh = fields::ring_holder_seminorm(&cloud, alpha)?;
        r.push(vec![k.to_string(), cloud.len().to_string(), num(h), num(rh)], h.is_finite() && rh.is_finite());
    }
    r.plot = Some(PlotSpec { x: "levels".into(), ys: vec!["holder".into(), "ring_holder".into()], log_x: false, log_y: false });
    Ok(r)
}
