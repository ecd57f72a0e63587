//! Field representations and sample-based norm/constraint functionals.
//!
//! Hölder seminorms are estimated from point clouds, so every value returned
//! here is a lower bound for the true seminorm of the sampled function.

use crate::error::{Error, Result};
use crate::symgroup::{HalfLine, A2, A3, A4};
use rand::Rng;
use rayon::prelude::*;
use std::io::{Read, Write};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryTag {
    None,
    /// Invariant under the 24 octahedral rotations.
    OSymmetric,
    /// Odd (pseudovector) symmetric under all 48 signed permutations.
    OTildeOdd,
}

/// A map `R³ -> R³` with a declared support radius and symmetry tag.
pub trait VectorField3: Send + Sync {
    fn eval(&self, x: [f64; 3]) -> [f64; 3];

    /// `f(x) = 0` whenever `|x| > support_radius`.
    fn support_radius(&self) -> f64 {
        f64::INFINITY
    }

    fn symmetry_tag(&self) -> SymmetryTag {
        SymmetryTag::None
    }
}

impl<T: VectorField3 + ?Sized> VectorField3 for Arc<T> {
    fn eval(&self, x: [f64; 3]) -> [f64; 3] {
        (**self).eval(x)
    }
    fn support_radius(&self) -> f64 {
        (**self).support_radius()
    }
    fn symmetry_tag(&self) -> SymmetryTag {
        (**self).symmetry_tag()
    }
}

impl<T: VectorField3 + ?Sized> VectorField3 for &T {
    fn eval(&self, x: [f64; 3]) -> [f64; 3] {
        (**self).eval(x)
    }
    fn support_radius(&self) -> f64 {
        (**self).support_radius()
    }
    fn symmetry_tag(&self) -> SymmetryTag {
        (**self).symmetry_tag()
    }
}

/// Closure-backed field.
#[derive(Clone)]
pub struct FnField<F> {
    f: F,
    support_radius: f64,
    tag: SymmetryTag,
}

impl<F: Fn([f64; 3]) -> [f64; 3] + Send + Sync> FnField<F> {
    pub fn new(f: F) -> Self {
        Self { f, support_radius: f64::INFINITY, tag: SymmetryTag::None }
    }

    pub fn with_support(mut self, radius: f64) -> Self {
        self.support_radius = radius;
        self
    }

    pub fn with_tag(mut self, tag: SymmetryTag) -> Self {
        self.tag = tag;
        self
    }
}

impl<F: Fn([f64; 3]) -> [f64; 3] + Send + Sync> VectorField3 for FnField<F> {
    fn eval(&self, x: [f64; 3]) -> [f64; 3] {
        (self.f)(x)
    }
    fn support_radius(&self) -> f64 {
        self.support_radius
    }
    fn symmetry_tag(&self) -> SymmetryTag {
        self.tag
    }
}

/// Identically zero field.
pub struct ZeroField;

impl VectorField3 for ZeroField {
    fn eval(&self, _x: [f64; 3]) -> [f64; 3] {
        [0.0; 3]
    }
    fn support_radius(&self) -> f64 {
        0.0
    }
}

/// Smooth radial cutoff: 1 on `r <= 1`, 0 on `r >= 2`, C-infinity in between.
pub fn smooth_cutoff(r: f64) -> f64 {
    fn h(t: f64) -> f64 {
        if t > 0.0 {
            (-1.0 / t).exp()
        } else {
            0.0
        }
    }
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = h(2.0 - r);
        a / (a + h(r - 1.0))
    }
}

pub fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Checks the declared support radius at `n` random points outside it.
pub fn support_is_honest<F: VectorField3 + ?Sized, R: Rng>(field: &F, n: usize, rng: &mut R) -> bool {
    let r0 = field.support_radius();
    if !r0.is_finite() {
        return true;
    }
    (0..n).all(|_| {
        let dir = random_unit(rng);
        let r = r0 * (1.0 + 1e-9) + rng.gen::<f64>() * (1.0 + r0);
        norm3(&field.eval([r * dir[0], r * dir[1], r * dir[2]])) == 0.0
    })
}

pub fn random_unit<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = norm3(&v);
        if n > 1e-3 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Sampled function: points (2D or 3D) with matching values (1 to 3 components).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCloud {
    dim: usize,
    points: Vec<Vec<f64>>,
    values: Vec<Vec<f64>>,
}

impl SampleCloud {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<Vec<f64>>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        let dim = points.first().map_or(3, |p| p.len());
        if !(2..=3).contains(&dim) || points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidParameter("points must all be 2D or all 3D".into()));
        }
        let ncomp = values.first().map_or(1, |v| v.len());
        if ncomp == 0 || values.iter().any(|v| v.len() != ncomp) {
            return Err(Error::InvalidParameter("values must share a component count".into()));
        }
        let mut sorted: Vec<&Vec<f64>> = points.iter().collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("cloud points must be pairwise distinct".into()));
        }
        Ok(Self { dim, points, values })
    }

    /// Samples a scalar function at the given points.
    pub fn from_scalar<F: Fn(&[f64]) -> f64>(points: Vec<Vec<f64>>, f: F) -> Result<Self> {
        let values = points.iter().map(|p| vec![f(p)]).collect();
        Self::new(points, values)
    }

    /// Samples a vector field at 3D points.
    pub fn from_field<F: VectorField3 + ?Sized>(points: &[[f64; 3]], field: &F) -> Result<Self> {
        let pts = points.iter().map(|p| p.to_vec()).collect();
        let vals = points.iter().map(|p| field.eval(*p).to_vec()).collect();
        Self::new(pts, vals)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Merge with another cloud over the same domain; duplicate points are
    /// dropped.
    pub fn extended(&self, other: &SampleCloud) -> Result<Self> {
        let mut points = self.points.clone();
        let mut values = self.values.clone();
        for (p, v) in other.points.iter().zip(&other.values) {
            if !points.contains(p) {
                points.push(p.clone());
                values.push(v.clone());
            }
        }
        Self::new(points, values)
    }

    /// CSV with columns `x1,x2[,x3],f1[,f2,f3]`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=self.dim).map(|i| format!("x{i}")).collect();
        header.extend((1..=self.values[0].len()).map(|i| format!("f{i}")));
        w.write_record(&header).map_err(io_err)?;
        for (p, v) in self.points.iter().zip(&self.values) {
            let row: Vec<String> = p.iter().chain(v).map(|x| format!("{x:?}")).collect();
            w.write_record(&row).map_err(io_err)?;
        }
        w.flush().map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers().map_err(io_err)?.clone();
        let dim = headers.iter().filter(|h| h.starts_with('x')).count();
        let ncomp = headers.iter().filter(|h| h.starts_with('f')).count();
        if dim + ncomp != headers.len() || ncomp == 0 {
            return Err(Error::InvalidParameter(format!("unexpected cloud header {headers:?}")));
        }
        let mut points = Vec::new();
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(io_err)?;
            let nums: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::InvalidParameter(e.to_string())))
                .collect::<Result<_>>()?;
            points.push(nums[..dim].to_vec());
            values.push(nums[dim..].to_vec());
        }
        Self::new(points, values)
    }
}

fn io_err(e: csv::Error) -> Error {
    Error::InvalidParameter(format!("csv: {e}"))
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn pairwise_sup<F>(cloud: &SampleCloud, alpha: f64, weight: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if cloud.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: cloud.len() });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    let weighted: Vec<Vec<f64>> = cloud
        .points
        .iter()
        .zip(&cloud.values)
        .map(|(p, v)| {
            let w = weight(p);
            v.iter().map(|c| if w == 0.0 { 0.0 } else { w * c }).collect()
        })
        .collect();
    let n = cloud.len();
    let sup = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut m = 0.0f64;
            for j in i + 1..n {
                let num = dist(&weighted[i], &weighted[j]);
                if num > 0.0 {
                    m = m.max(num / dist(&cloud.points[i], &cloud.points[j]).powf(alpha));
                }
            }
            m
        })
        .reduce(|| 0.0, f64::max);
    Ok(sup)
}

/// `max_{x≠x'} |f(x) - f(x')| / |x - x'|^α` over all cloud pairs.
pub fn holder_seminorm(cloud: &SampleCloud, alpha: f64) -> Result<f64> {
    pairwise_sup(cloud, alpha, |_| 1.0)
}

/// Scale-invariant seminorm: the Hölder quotient of `|x|^α f(x)`.
pub fn ring_holder_seminorm(cloud: &SampleCloud, alpha: f64) -> Result<f64> {
    pairwise_sup(cloud, alpha, |p| {
        let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        r.powf(alpha)
    })
}

/// Largest central-difference divergence over the probes.
pub fn divergence_residual<F: VectorField3 + ?Sized>(field: &F, probes: &[[f64; 3]], h: f64) -> f64 {
    probes
        .iter()
        .map(|p| {
            let mut div = 0.0;
            for k in 0..3 {
                let mut a = *p;
                let mut b = *p;
                a[k] += h;
                b[k] -= h;
                div += (field.eval(a)[k] - field.eval(b)[k]) / (2.0 * h);
            }
            div.abs()
        })
        .fold(0.0, f64::max)
}

/// `max_z |f¹(z,z,0) + f²(z,z,0)|`: violation of the vanishing condition on
/// the edge `{x1 = x2 ≥ 0, x3 = 0}`.
pub fn vanishing_condition_residual<F: VectorField3 + ?Sized>(field: &F, samples: &[f64]) -> f64 {
    samples
        .iter()
        .map(|&z| {
            let v = field.eval([z, z, 0.0]);
            (v[0] + v[1]).abs()
        })
        .fold(0.0, f64::max)
}

/// Deterministic interior samples of the spherical triangle with corners
/// `a4, a2, a3`, returned as unit vectors.
pub fn triangle_samples(n: usize) -> Vec<[f64; 3]> {
    // Low-discrepancy (R2 sequence) points folded into the triangle.
    const G: f64 = 1.324_717_957_244_746;
    let (a1, a2) = (1.0 / G, 1.0 / (G * G));
    (0..n)
        .map(|k| {
            let mut s = (0.5 + a1 * (k as f64 + 1.0)).fract();
            let mut t = (0.5 + a2 * (k as f64 + 1.0)).fract();
            if s + t > 1.0 {
                s = 1.0 - s;
                t = 1.0 - t;
            }
            // keep samples off the edges
            let (s, t) = (0.02 + 0.96 * s, 0.02 + 0.96 * t);
            let b0 = (1.0 - s - t).max(0.01);
            let p: [f64; 3] = std::array::from_fn(|i| b0 * A4[i] + s * A2[i] + t * A3[i]);
            let n = norm3(&p);
            [p[0] / n, p[1] / n, p[2] / n]
        })
        .collect()
}

/// Probe cloud: radii `2^-k`, `k = 0..=levels`, times `n_angular` directions
/// of the chamber triangle. When `near` is given, the directions are pulled
/// towards that corner half-line (`pull` in (0, 1], 1 = no pull).
pub fn probe_cloud(levels: u32, n_angular: usize, near: Option<HalfLine>, pull: f64) -> Vec<[f64; 3]> {
    let dirs: Vec<[f64; 3]> = triangle_samples(n_angular)
        .into_iter()
        .map(|d| match near {
            None => d,
            Some(h) => {
                let a = h.direction();
                let p: [f64; 3] = std::array::from_fn(|i| a[i] + pull * (d[i] - a[i]));
                let n = norm3(&p);
                [p[0] / n, p[1] / n, p[2] / n]
            }
        })
        .collect();
    let mut out = Vec::with_capacity(dirs.len() * (levels as usize + 1));
    for k in 0..=levels {
        let r = 0.5f64.powi(k as i32);
        out.extend(dirs.iter().map(|d| [r * d[0], r * d[1], r * d[2]]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line_cloud(n: usize, h: f64, f: impl Fn(f64) -> f64) -> SampleCloud {
        let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 * h, 0.0]).collect();
        SampleCloud::from_scalar(pts, |p| f(p[0])).unwrap()
    }

    #[test]
    fn constant_has_zero_seminorm() {
        let c = line_cloud(20, 0.1, |_| 4.0);
        assert_eq!(holder_seminorm(&c, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn single_pair_quotient() {
        let c = SampleCloud::new(vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]], vec![vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(holder_seminorm(&c, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn power_function_seminorm_brute_force() {
        let alpha = 0.4;
        let c = line_cloud(200, 0.01, |x| x.powf(alpha));
        // brute-force oracle over all pairs
        let pts: Vec<f64> = (0..200).map(|i| i as f64 * 0.01).collect();
        let mut oracle = 0.0f64;
        for i in 0..pts.len() {
            for j in 0..i {
                let q = (pts[i].powf(alpha) - pts[j].powf(alpha)).abs() / (pts[i] - pts[j]).powf(alpha);
                oracle = oracle.max(q);
            }
        }
        let v = holder_seminorm(&c, alpha).unwrap();
        assert_eq!(v, oracle);
        assert!(v >= 1.0 - 1e-6 && v <= 1.0 + 1e-12);
    }

    #[test]
    fn too_few_points() {
        let c = SampleCloud::new(vec![vec![1.0, 0.0]], vec![vec![1.0]]).unwrap();
        assert_eq!(holder_seminorm(&c, 0.5), Err(Error::InsufficientData { needed: 2, got: 1 }));
        assert!(ring_holder_seminorm(&c, 0.5).is_err());
    }

    #[test]
    fn duplicate_points_rejected() {
        assert!(SampleCloud::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]], vec![vec![1.0], vec![2.0]]).is_err());
    }

    #[test]
    fn ring_seminorm_of_constant_matches_weighted_cloud() {
        let alpha = 0.5;
        let pts: Vec<Vec<f64>> = (1..30).map(|i| vec![0.1 * i as f64, 0.05 * i as f64 * (i % 3) as f64]).collect();
        let c = SampleCloud::from_scalar(pts.clone(), |_| 2.5).unwrap();
        let w = SampleCloud::from_scalar(pts, |p| 2.5 * (p[0] * p[0] + p[1] * p[1]).sqrt().powf(alpha)).unwrap();
        let a = ring_holder_seminorm(&c, alpha).unwrap();
        let b = holder_seminorm(&w, alpha).unwrap();
        assert!((a - b).abs() <= 1e-14 * b);
        let z = SampleCloud::from_scalar(vec![vec![0.0, 0.0], vec![1.0, 2.0]], |_| 0.0).unwrap();
        assert_eq!(ring_holder_seminorm(&z, alpha).unwrap(), 0.0);
    }

    #[test]
    fn origin_point_gets_zero_weight() {
        let c = SampleCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![vec![7.0], vec![1.0]]).unwrap();
        assert_eq!(ring_holder_seminorm(&c, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn divergence_of_simple_fields() {
        let probes = [[0.3, 0.2, 0.1], [1.0, -2.0, 0.5]];
        let id = FnField::new(|x| x);
        assert!((divergence_residual(&id, &probes, 1e-3) - 3.0).abs() < 1e-8);
        let c = FnField::new(|_| [1.0, 2.0, 3.0]);
        assert!(divergence_residual(&c, &probes, 1e-3) < 1e-12);
    }

    #[test]
    fn vanishing_witness() {
        let f = FnField::new(|_| [1.0, 0.0, 0.0]);
        assert_eq!(vanishing_condition_residual(&f, &[0.1, 1.0]), 1.0);
        let g = FnField::new(|_| [-2.0, 2.0, 5.0]);
        assert_eq!(vanishing_condition_residual(&g, &[0.1, 1.0, 3.0]), 0.0);
    }

    #[test]
    fn support_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = FnField::new(|x: [f64; 3]| if norm3(&x) <= 1.0 { [1.0, 0.0, 0.0] } else { [0.0; 3] }).with_support(1.0);
        assert!(support_is_honest(&f, 100, &mut rng));
        let g = FnField::new(|_| [1.0, 0.0, 0.0]).with_support(1.0);
        assert!(!support_is_honest(&g, 100, &mut rng));
    }

    #[test]
    fn probe_cloud_lies_in_chamber() {
        let pts = probe_cloud(12, 32, Some(HalfLine::A2), 0.3);
        assert_eq!(pts.len(), 13 * 32);
        for p in &pts {
            assert!(p[0] > p[1] && p[1] > p[2] && p[2] > 0.0, "{p:?}");
        }
    }

    #[test]
    fn cutoff_profile() {
        assert_eq!(smooth_cutoff(0.3), 1.0);
        assert_eq!(smooth_cutoff(2.5), 0.0);
        assert!((smooth_cutoff(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for k in 0..=100 {
            let v = smooth_cutoff(1.0 + k as f64 / 100.0);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn csv_roundtrip() {
        let c = SampleCloud::new(vec![vec![0.1, 0.2, 0.3], vec![1.0, 2.0, 3.0]], vec![vec![1.0, 2.0, 3.0], vec![-1.0, 0.5, 1e-17]]).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("x1,x2,x3,f1,f2,f3"));
        assert_eq!(SampleCloud::read_csv(buf.as_slice()).unwrap(), c);
    }
}
