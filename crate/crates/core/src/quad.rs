//! One-dimensional quadrature building blocks shared by the 2D and 3D
//! singular-integral code: Gauss-Legendre rules, adaptive Gauss-Kronrod,
//! compensated summation, Richardson extrapolation and a small least-squares
//! line fit.

use crate::error::{Error, Result};

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mut acc = Neumaier::default();
        for (x, w) in self.mapped(a, b) {
            acc.add(w * f(x));
        }
        acc.sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Neumaier compensated sum; order-dependent but deterministic.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Integral value together with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

const GK15_XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK15_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK15_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Estimate {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * GK15_WK[7];
    let mut gauss = fc * GK15_WG[3];
    for j in 0..7 {
        let dx = h * GK15_XK[j];
        let s = f(c - dx) + f(c + dx);
        kron += GK15_WK[j] * s;
        if j % 2 == 1 {
            gauss += GK15_WG[j / 2] * s;
        }
    }
    Estimate {
        value: kron * h,
        err: ((kron - gauss) * h).abs(),
    }
}

/// Adaptive Gauss-Kronrod (7-15) integration over `[a, b]`, with the interval
/// pre-split at `breaks` (points where the integrand is known to lose
/// smoothness). Returns an error when the tolerance is not met within
/// `max_intervals` subintervals.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, err: 0.0 });
    }
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x > a.min(b) && x < a.max(b))
        .collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + y.abs()));
    let sign = if b < a { -1.0 } else { 1.0 };

    let mut pieces: Vec<(f64, f64, Estimate)> = cuts
        .windows(2)
        .map(|w| (w[0], w[1], gk15(&mut f, w[0], w[1])))
        .collect();
    loop {
        let total: f64 = pieces.iter().map(|p| p.2.value).sum();
        let err: f64 = pieces.iter().map(|p| p.2.err).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(Estimate { value: sign * total, err });
        }
        if pieces.len() >= max_intervals {
            return Err(Error::QuadratureFailure {
                value: sign * total,
                err_est: err,
            });
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.err.partial_cmp(&y.1 .2.err).unwrap())
            .unwrap();
        let (lo, hi, _) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::QuadratureFailure {
                value: sign * total,
                err_est: err,
            });
        }
        pieces.push((lo, mid, gk15(&mut f, lo, mid)));
        pieces.push((mid, hi, gk15(&mut f, mid, hi)));
        // keep the summation order reproducible
        pieces.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    }
}

fn gk15_vec<const M: usize, F: FnMut(f64) -> [f64; M]>(f: &mut F, a: f64, b: f64) -> ([f64; M], f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc.map(|v| v * GK15_WK[7]);
    let mut gauss = fc.map(|v| v * GK15_WG[3]);
    for j in 0..7 {
        let dx = h * GK15_XK[j];
        let (l, r) = (f(c - dx), f(c + dx));
        for m in 0..M {
            let s = l[m] + r[m];
            kron[m] += GK15_WK[j] * s;
            if j % 2 == 1 {
                gauss[m] += GK15_WG[j / 2] * s;
            }
        }
    }
    let err = (0..M).map(|m| ((kron[m] - gauss[m]) * h).abs()).fold(0.0, f64::max);
    (kron.map(|v| v * h), err)
}

/// Vector-valued version of [`adaptive`]; the error is measured in the max
/// norm over components.
pub fn adaptive_vec<const M: usize, F: FnMut(f64) -> [f64; M]>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<([f64; M], f64)> {
    if a == b {
        return Ok(([0.0; M], 0.0));
    }
    assert!(a < b);
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + y.abs()));
    let mut pieces: Vec<(f64, f64, [f64; M], f64)> = cuts
        .windows(2)
        .map(|w| {
            let (v, e) = gk15_vec(&mut f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let mut total = [0.0; M];
        for p in &pieces {
            for m in 0..M {
                total[m] += p.2[m];
            }
        }
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        let scale = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if err <= abs_tol.max(rel_tol * scale) {
            return Ok((total, err));
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (lo, hi, _, _) = pieces[idx];
        let mid = 0.5 * (lo + hi);
        if pieces.len() >= max_intervals || mid <= lo || mid >= hi {
            return Err(Error::QuadratureFailure { value: total[0], err_est: err });
        }
        pieces.swap_remove(idx);
        let (v1, e1) = gk15_vec(&mut f, lo, mid);
        let (v2, e2) = gk15_vec(&mut f, mid, hi);
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
        pieces.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    }
}

/// Adaptive integration over `[a, inf)` through the substitution `r = a / t`.
/// The integrand must decay at least like `r^-2`.
pub fn adaptive_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Estimate> {
    assert!(a > 0.0);
    adaptive(
        |t| {
            if t <= 0.0 {
                0.0
            } else {
                let r = a / t;
                f(r) * a / (t * t)
            }
        },
        0.0,
        1.0,
        &[],
        abs_tol,
        rel_tol,
        max_intervals,
    )
}

/// Richardson extrapolation of `values[k] ~ L + c1 h^p + c2 h^(p+1) + ...`
/// through the whole table. `hs` must form a geometric sequence. Returns the final extrapolant and the difference to
/// the previous-level extrapolant as an error estimate.
pub fn richardson(hs: &[f64], values: &[f64], p: f64) -> Estimate {
    assert_eq!(hs.len(), values.len());
    assert!(!values.is_empty());
    let n = values.len();
    if n == 1 {
        return Estimate { value: values[0], err: f64::INFINITY };
    }
    let mut table = values.to_vec();
    let mut prev_best = table[n - 1];
    for level in 1..n {
        let mut next = Vec::with_capacity(n - level);
        for i in 0..n - level {
            let r = (hs[i] / hs[i + 1]).powf(p + (level - 1) as f64);
            next.push((r * table[i + 1] - table[i]) / (r - 1.0));
        }
        if level == n - 1 {
            prev_best = *table.last().unwrap();
        }
        table = next;
    }
    let value = table[0];
    Estimate { value, err: (value - prev_best).abs() }
}

/// Least-squares fit `y = slope * x + intercept`; the third entry is the
/// root-mean-square residual.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: xs.len().min(ys.len()) });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("degenerate abscissae in line fit".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok((slope, intercept, rms))
}
