//! Signed-permutation isometry groups: the octahedral rotation group, its
//! extension by coordinate reflections, and the planar analogues. Also the
//! fundamental domains, point classification and the extension rules that
//! rebuild a field on all of space from its values on one chamber.

use crate::error::{Error, Result};
use crate::fields::{SymmetryTag, VectorField3};
use std::fmt;
use std::sync::Arc;

/// A signed permutation matrix. `parity` is the determinant.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IsometryElement<const N: usize> {
    matrix: [[i8; N]; N],
    parity: i8,
}

pub type Isometry3 = IsometryElement<3>;
pub type Isometry2 = IsometryElement<2>;

impl<const N: usize> fmt::Debug for IsometryElement<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}(det {})", self.matrix, self.parity)
    }
}

impl<const N: usize> IsometryElement<N> {
    /// Validates that `matrix` has exactly one `±1` per row and column.
    pub fn new(matrix: [[i8; N]; N]) -> Result<Self> {
        let mut col_used = [false; N];
        let mut perm = [0usize; N];
        let mut sign = 1i8;
        for (i, row) in matrix.iter().enumerate() {
            let mut found = None;
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 | -1 if found.is_none() => found = Some(j),
                    _ => {
                        return Err(Error::InvalidGenerator(format!(
                            "row {i} of {matrix:?} is not a signed unit row"
                        )))
                    }
                }
            }
            let j = found.ok_or_else(|| Error::InvalidGenerator(format!("row {i} of {matrix:?} is zero")))?;
            if col_used[j] {
                return Err(Error::InvalidGenerator(format!("{matrix:?} is not orthogonal")));
            }
            col_used[j] = true;
            perm[i] = j;
            sign *= row[j];
        }
        Ok(Self { matrix, parity: sign * permutation_sign(&perm) })
    }

    pub fn identity() -> Self {
        let mut m = [[0i8; N]; N];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        Self { matrix: m, parity: 1 }
    }

    pub fn matrix(&self) -> &[[i8; N]; N] {
        &self.matrix
    }

    /// `+1` for rotations, `-1` for orientation-reversing elements.
    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn is_rotation(&self) -> bool {
        self.parity == 1
    }

    /// Matrix product `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let mut m = [[0i8; N]; N];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..N).map(|k| self.matrix[i][k] * other.matrix[k][j]).sum();
            }
        }
        Self { matrix: m, parity: self.parity * other.parity }
    }

    pub fn inverse(&self) -> Self {
        let mut m = [[0i8; N]; N];
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[j][i] = v;
            }
        }
        Self { matrix: m, parity: self.parity }
    }

    pub fn apply(&self, x: &[f64; N]) -> [f64; N] {
        let mut y = [0.0; N];
        for (i, yi) in y.iter_mut().enumerate() {
            for (j, xj) in x.iter().enumerate() {
                let m = self.matrix[i][j];
                if m != 0 {
                    *yi += f64::from(m) * xj;
                }
            }
        }
        y
    }

    /// `g^{-1} x` without forming the inverse.
    pub fn apply_inverse(&self, x: &[f64; N]) -> [f64; N] {
        let mut y = [0.0; N];
        for (j, yj) in y.iter_mut().enumerate() {
            for (i, xi) in x.iter().enumerate() {
                let m = self.matrix[i][j];
                if m != 0 {
                    *yj += f64::from(m) * xi;
                }
            }
        }
        y
    }

    fn flattened(&self) -> Vec<i8> {
        self.matrix.iter().flatten().copied().collect()
    }
}

fn permutation_sign(perm: &[usize]) -> i8 {
    let mut sign = 1i8;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

impl Isometry3 {
    /// Quarter turn about the `x1` axis: `(x1, -x3, x2)`.
    pub fn p1() -> Self {
        Self::new([[1, 0, 0], [0, 0, -1], [0, 1, 0]]).unwrap()
    }
    /// Quarter turn about the `x2` axis: `(x3, x2, -x1)`.
    pub fn p2() -> Self {
        Self::new([[0, 0, 1], [0, 1, 0], [-1, 0, 0]]).unwrap()
    }
    /// Quarter turn about the `x3` axis: `(-x2, x1, x3)`.
    pub fn p3() -> Self {
        Self::new([[0, -1, 0], [1, 0, 0], [0, 0, 1]]).unwrap()
    }
    /// Reflection `x_i -> -x_i`, `i` in `1..=3`.
    pub fn reflection(i: usize) -> Self {
        assert!((1..=3).contains(&i));
        let mut m = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        m[i - 1][i - 1] = -1;
        Self::new(m).unwrap()
    }
    pub fn r1() -> Self {
        Self::reflection(1)
    }
    pub fn r2() -> Self {
        Self::reflection(2)
    }
    pub fn r3() -> Self {
        Self::reflection(3)
    }
}

impl Isometry2 {
    /// `v -> v^perp`, the quarter turn.
    pub fn quarter_turn() -> Self {
        Self::new([[0, -1], [1, 0]]).unwrap()
    }
    pub fn reflection(i: usize) -> Self {
        assert!((1..=2).contains(&i));
        let mut m = [[1, 0], [0, 1]];
        m[i - 1][i - 1] = -1;
        Self::new(m).unwrap()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupLabel {
    /// 24 rotations of the cube.
    O,
    /// 48 signed permutations.
    OTilde,
    /// Quarter turns in the plane.
    O2D,
    /// Coordinate reflections in the plane.
    R2D,
    /// All 8 planar signed permutations.
    OTilde2D,
    Custom,
}

/// Maximum order accepted by [`generate_group`].
pub const MAX_GROUP_ORDER: usize = 48;

#[derive(Debug, Clone)]
pub struct SymmetryGroup<const N: usize> {
    elements: Vec<IsometryElement<N>>,
    label: GroupLabel,
}

/// Closure of `generators` under composition. Elements are sorted by their
/// flattened matrix entries.
pub fn generate_group<const N: usize>(
    generators: &[IsometryElement<N>],
    label: GroupLabel,
) -> Result<SymmetryGroup<N>> {
    let gens: Vec<_> = generators
        .iter()
        .map(|g| IsometryElement::new(g.matrix))
        .collect::<Result<_>>()?;
    let mut elements = vec![IsometryElement::<N>::identity()];
    let mut frontier = elements.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for g in &gens {
                let c = g.compose(a);
                if !elements.contains(&c) {
                    elements.push(c);
                    next.push(c);
                    if elements.len() > MAX_GROUP_ORDER {
                        return Err(Error::GroupTooLarge { limit: MAX_GROUP_ORDER });
                    }
                }
            }
        }
        frontier = next;
    }
    elements.sort_by_key(|e| e.flattened());
    Ok(SymmetryGroup { elements, label })
}

impl SymmetryGroup<3> {
    pub fn octahedral() -> Self {
        generate_group(&[Isometry3::p1(), Isometry3::p2(), Isometry3::p3()], GroupLabel::O).unwrap()
    }

    pub fn extended_octahedral() -> Self {
        generate_group(
            &[
                Isometry3::p1(),
                Isometry3::p2(),
                Isometry3::p3(),
                Isometry3::r1(),
                Isometry3::r2(),
                Isometry3::r3(),
            ],
            GroupLabel::OTilde,
        )
        .unwrap()
    }
}

impl SymmetryGroup<2> {
    pub fn rotations_2d() -> Self {
        generate_group(&[Isometry2::quarter_turn()], GroupLabel::O2D).unwrap()
    }

    pub fn reflections_2d() -> Self {
        generate_group(&[Isometry2::reflection(1), Isometry2::reflection(2)], GroupLabel::R2D).unwrap()
    }

    pub fn extended_2d() -> Self {
        generate_group(
            &[Isometry2::quarter_turn(), Isometry2::reflection(1), Isometry2::reflection(2)],
            GroupLabel::OTilde2D,
        )
        .unwrap()
    }
}

impl<const N: usize> SymmetryGroup<N> {
    pub fn elements(&self) -> &[IsometryElement<N>] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn label(&self) -> GroupLabel {
        self.label
    }

    pub fn contains(&self, g: &IsometryElement<N>) -> bool {
        self.elements.binary_search_by_key(&g.flattened(), |e| e.flattened()).is_ok()
    }

    /// Closure under products and inverses, plus presence of the identity.
    pub fn is_closed(&self) -> bool {
        self.contains(&IsometryElement::identity())
            && self.elements.iter().all(|a| {
                self.contains(&a.inverse()) && self.elements.iter().all(|b| self.contains(&a.compose(b)))
            })
    }

    /// One row per element: the `N*N` matrix entries row-major, then parity.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut header: Vec<String> = Vec::new();
        for i in 1..=N {
            for j in 1..=N {
                header.push(format!("m{i}{j}"));
            }
        }
        header.push("parity".into());
        out.push_str(&header.join(","));
        out.push('\n');
        for e in &self.elements {
            let mut row: Vec<String> = e.flattened().iter().map(|v| v.to_string()).collect();
            row.push(e.parity.to_string());
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Vertices of the spherical triangle `Ũ ∩ S²`.
pub const A2: [f64; 3] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2, 0.0];
pub const A3: [f64; 3] = [0.577_350_269_189_625_8, 0.577_350_269_189_625_8, 0.577_350_269_189_625_8];
pub const A4: [f64; 3] = [1.0, 0.0, 0.0];

/// Half-lines `{t a_j : t > 0}` through the corners of the fundamental domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfLine {
    A2,
    A3,
    A4,
}

impl HalfLine {
    pub fn direction(&self) -> [f64; 3] {
        match self {
            HalfLine::A2 => A2,
            HalfLine::A3 => A3,
            HalfLine::A4 => A4,
        }
    }
}

/// Fundamental domains. Boundary points are resolved by the tie-break rule
/// of [`DomainLocator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// `{x1, x2 > x3 > 0}`, for the rotation group.
    U,
    /// `{x1 > x2 > x3 > 0}`, for the extended group.
    UTilde,
    /// Open first quadrant `{x1 > 0, x2 > 0}`.
    Quadrant,
    /// Planar sector `{x1 > x2 > 0}`, i.e. `0 < θ < π/4`.
    Sector8,
}

impl Domain {
    fn contains_open(&self, x: &[f64]) -> bool {
        match self {
            Domain::U => x[0] > x[2] && x[1] > x[2] && x[2] > 0.0,
            Domain::UTilde => x[0] > x[1] && x[1] > x[2] && x[2] > 0.0,
            Domain::Quadrant => x[0] > 0.0 && x[1] > 0.0,
            Domain::Sector8 => x[0] > x[1] && x[1] > 0.0,
        }
    }

    fn contains_closed(&self, x: &[f64]) -> bool {
        match self {
            Domain::U => x[0] >= x[2] && x[1] >= x[2] && x[2] >= 0.0,
            Domain::UTilde => x[0] >= x[1] && x[1] >= x[2] && x[2] >= 0.0,
            Domain::Quadrant => x[0] >= 0.0 && x[1] >= 0.0,
            Domain::Sector8 => x[0] >= x[1] && x[1] >= 0.0,
        }
    }

    /// True when the domain is the sorted-absolute-value chamber, so points
    /// can be classified by sorting instead of searching the group.
    fn is_sorted_chamber(&self) -> bool {
        matches!(self, Domain::UTilde | Domain::Sector8)
    }
}

/// Classifies points into a fundamental domain. Points on reflection
/// hyperplanes are moved by `+η ‖x‖∞ (1, 2⁻¹, 2⁻², ...)` with `η = 2⁻⁴⁰`
/// before the strict-inequality tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainLocator {
    pub domain: Domain,
    pub eta: f64,
}

pub const TIE_BREAK_ETA: f64 = 9.094_947_017_729_282e-13; // 2^-40

impl DomainLocator {
    pub fn new(domain: Domain) -> Self {
        Self { domain, eta: TIE_BREAK_ETA }
    }

    pub fn contains_open(&self, x: &[f64]) -> bool {
        self.domain.contains_open(x)
    }

    pub fn contains_closed(&self, x: &[f64]) -> bool {
        self.domain.contains_closed(x)
    }

    fn perturb<const N: usize>(&self, x: &[f64; N]) -> [f64; N] {
        let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut y = *x;
        let mut w = 1.0;
        for yi in y.iter_mut() {
            *yi += self.eta * scale * w;
            w *= 0.5;
        }
        y
    }
}

/// Finds `g` and `x0` in the closed fundamental domain with `x = g x0`.
pub fn classify_point<const N: usize>(
    x: &[f64; N],
    group: &SymmetryGroup<N>,
    locator: &DomainLocator,
) -> Result<(IsometryElement<N>, [f64; N])> {
    if x.iter().all(|v| *v == 0.0) {
        return Err(Error::OriginUnclassifiable);
    }
    let xp = locator.perturb(x);
    let full_signed = group.order() == (1..=N).product::<usize>() << N;
    if full_signed && locator.domain.is_sorted_chamber() {
        let g = sorted_chamber_element(&xp);
        return Ok((g, g.apply_inverse(x)));
    }
    for g in group.elements() {
        if locator.contains_open(&g.apply_inverse(&xp)) {
            return Ok((*g, g.apply_inverse(x)));
        }
    }
    Err(Error::Inconsistency(format!(
        "no group element maps {x:?} into {:?}",
        locator.domain
    )))
}

/// Exhaustive version of [`classify_point`]; used as a cross-check.
pub fn classify_point_exhaustive<const N: usize>(
    x: &[f64; N],
    group: &SymmetryGroup<N>,
    locator: &DomainLocator,
) -> Result<(IsometryElement<N>, [f64; N])> {
    if x.iter().all(|v| *v == 0.0) {
        return Err(Error::OriginUnclassifiable);
    }
    let xp = locator.perturb(x);
    let hits: Vec<_> = group
        .elements()
        .iter()
        .filter(|g| locator.contains_open(&g.apply_inverse(&xp)))
        .collect();
    match hits.as_slice() {
        [g] => Ok((**g, g.apply_inverse(x))),
        _ => Err(Error::Inconsistency(format!("{} chambers claim {x:?}", hits.len()))),
    }
}

fn sorted_chamber_element<const N: usize>(xp: &[f64; N]) -> IsometryElement<N> {
    // x0 = |x| sorted descending; x[order[k]] = sign * x0[k]
    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&a, &b| xp[b].abs().partial_cmp(&xp[a].abs()).unwrap().then(a.cmp(&b)));
    let mut m = [[0i8; N]; N];
    for (k, &i) in order.iter().enumerate() {
        m[i][k] = if xp[i] < 0.0 { -1 } else { 1 };
    }
    IsometryElement::new(m).expect("sorted chamber element is a signed permutation")
}

/// How a vector field transforms under orientation-reversing elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorParity {
    /// `f̃(g x) = g f(x)` for every element.
    Plain,
    /// `f̃(g x) = det(g) g f(x)`: the odd (pseudovector) rule under
    /// reflections. Vorticity extended this way yields a velocity obeying
    /// the slip condition on the chamber walls.
    Odd,
}

/// A field on the closed fundamental domain extended to all of space.
#[derive(Clone)]
pub struct ExtendedVectorField {
    base: Arc<dyn Fn([f64; 3]) -> [f64; 3] + Send + Sync>,
    group: Arc<SymmetryGroup<3>>,
    locator: DomainLocator,
    parity: VectorParity,
    support_radius: f64,
}

impl ExtendedVectorField {
    pub fn group(&self) -> &SymmetryGroup<3> {
        &self.group
    }

    pub fn parity(&self) -> VectorParity {
        self.parity
    }
}

impl VectorField3 for ExtendedVectorField {
    fn eval(&self, y: [f64; 3]) -> [f64; 3] {
        let Ok((g, x0)) = classify_point(&y, &self.group, &self.locator) else {
            // the origin: use the value on the closure of the chamber
            return (self.base)(y);
        };
        let mut v = g.apply(&(self.base)(x0));
        if self.parity == VectorParity::Odd && g.parity() < 0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
        v
    }

    fn support_radius(&self) -> f64 {
        self.support_radius
    }

    fn symmetry_tag(&self) -> SymmetryTag {
        match (self.group.label(), self.parity) {
            (GroupLabel::OTilde, VectorParity::Odd) => SymmetryTag::OTildeOdd,
            (GroupLabel::O | GroupLabel::OTilde, _) => SymmetryTag::OSymmetric,
            _ => SymmetryTag::None,
        }
    }
}

/// `y -> g f(g⁻¹ y)` (with `det g` when `parity` is odd), `g` found by
/// [`classify_point`]. On reflection hyperplanes the tie-broken `g` is used.
pub fn extend_vector_field<F>(
    f: F,
    support_radius: f64,
    group: &SymmetryGroup<3>,
    domain: Domain,
    parity: VectorParity,
) -> ExtendedVectorField
where
    F: Fn([f64; 3]) -> [f64; 3] + Send + Sync + 'static,
{
    ExtendedVectorField {
        base: Arc::new(f),
        group: Arc::new(group.clone()),
        locator: DomainLocator::new(domain),
        parity,
        support_radius,
    }
}

/// `y -> (-1)^{sgn g} f(g⁻¹ y)`.
pub fn extend_scalar<const N: usize, F>(
    f: F,
    group: &SymmetryGroup<N>,
    domain: Domain,
) -> impl Fn([f64; N]) -> f64 + Clone
where
    F: Fn([f64; N]) -> f64 + Clone,
{
    let group = group.clone();
    let locator = DomainLocator::new(domain);
    move |y| match classify_point(&y, &group, &locator) {
        Ok((g, x0)) => f64::from(g.parity()) * f(x0),
        Err(_) => 0.0,
    }
}

/// `Σ_g (-1)^{sgn g} 1_{g(U)}` evaluated at `y` (tie-broken on walls).
pub fn extended_indicator<const N: usize>(y: &[f64; N], group: &SymmetryGroup<N>, domain: Domain) -> f64 {
    match classify_point(y, group, &DomainLocator::new(domain)) {
        Ok((g, _)) => f64::from(g.parity()),
        Err(_) => 0.0,
    }
}
