//! Upper half-space model of hyperbolic 3-space.
//!
//! Points are `(x, y, z)` with `z > 0` and metric `z⁻²(dx² + dy² + dz²)`.
//! Green's functions are normalized so that `ΔΓ = −2πδ`, which gives the
//! closed form `Γ = 1/(e^{2ρ} − 1)` in terms of the distance `ρ` to the pole.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hyperbolic distance below which an evaluation counts as hitting a pole.
pub const POLE_RADIUS: f64 = 1e-8;

/// A point of hyperbolic 3-space in upper half-space coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct HPoint {
    x: f64,
    y: f64,
    z: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) || z <= 0.0 {
            return Err(Error::InvalidPoint { x, y, z });
        }
        Ok(Self { x, y, z })
    }

    /// The point `(0, 0, z)` on the vertical geodesic through the origin.
    pub fn on_axis(z: f64) -> Result<Self> {
        Self::new(0.0, 0.0, z)
    }

    /// The reference point `(0, 0, 1)`.
    pub const fn origin() -> Self {
        Self { x: 0.0, y: 0.0, z: 1.0 }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_on_axis(&self) -> bool {
        self.x == 0.0 && self.y == 0.0
    }

    /// Coordinate displacement, used by finite-difference checks.
    pub fn offset(&self, v: [f64; 3]) -> Result<Self> {
        Self::new(self.x + v[0], self.y + v[1], self.z + v[2])
    }

    pub(crate) fn from_raw(x: f64, y: f64, z: f64) -> Self {
        debug_assert!(z > 0.0);
        Self { x, y, z }
    }
}

impl TryFrom<[f64; 3]> for HPoint {
    type Error = Error;

    fn try_from(c: [f64; 3]) -> Result<Self> {
        Self::new(c[0], c[1], c[2])
    }
}

impl From<HPoint> for [f64; 3] {
    fn from(p: HPoint) -> Self {
        p.coords()
    }
}

/// A point on the sphere at infinity: either on the `z = 0` plane or the
/// single point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPoint {
    Plane { x: f64, y: f64 },
    Infinity,
}

/// Monopole points with positive integer multiplicities.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MonopoleConfig {
    entries: Vec<(HPoint, u32)>,
}

impl MonopoleConfig {
    pub fn new(entries: Vec<(HPoint, u32)>) -> Result<Self> {
        for (i, &(_, m)) in entries.iter().enumerate() {
            if m == 0 {
                return Err(Error::ZeroMultiplicity { index: i });
            }
        }
        for i in 0..entries.len() {
            for j in i + 1..entries.len() {
                if dist_h(&entries[i].0, &entries[j].0) < POLE_RADIUS {
                    return Err(Error::DuplicatePoint { first: i, second: j });
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// A single point of the given multiplicity.
    pub fn single(p: HPoint, multiplicity: u32) -> Result<Self> {
        Self::new(vec![(p, multiplicity)])
    }

    /// Unit-multiplicity points.
    pub fn from_points(points: &[HPoint]) -> Result<Self> {
        Self::new(points.iter().map(|&p| (p, 1)).collect())
    }

    /// Two unit points `(0, 0, e^{d/2})` and `(0, 0, e^{−d/2})` at distance `d`.
    pub fn symmetric_pair(d: f64) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "pair distance must be positive, got {d}"
            )));
        }
        let r0 = (0.5 * d).exp();
        Self::from_points(&[HPoint::on_axis(r0)?, HPoint::on_axis(1.0 / r0)?])
    }

    pub fn entries(&self) -> &[(HPoint, u32)] {
        &self.entries
    }

    pub fn points(&self) -> impl Iterator<Item = HPoint> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn multiplicities(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.1).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `N = Σ mᵢ`.
    pub fn total_multiplicity(&self) -> u32 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Whether every monopole point lies on the vertical axis `x = y = 0`.
    pub fn is_axial(&self) -> bool {
        self.points().all(|p| p.is_on_axis())
    }

    pub fn map_points(&self, iso: &Isometry) -> Self {
        Self {
            entries: self.entries.iter().map(|&(p, m)| (iso.apply(&p), m)).collect(),
        }
    }
}

/// Hyperbolic distance, `arccosh(1 + |p − q|²/(2 z_p z_q))`.
///
/// Evaluated through the equivalent `2 asinh(|p − q| / (2√(z_p z_q)))`, which
/// keeps full relative precision for nearby points.
pub fn dist_h(p: &HPoint, q: &HPoint) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let dz = p.z - q.z;
    let euc = (dx * dx + dy * dy + dz * dz).sqrt();
    2.0 * (euc / (2.0 * (p.z * q.z).sqrt())).asinh()
}

/// `Γ(ρ) = 1/(e^{2ρ} − 1)`.
pub fn green_of_distance(rho: f64) -> f64 {
    1.0 / (2.0 * rho).exp_m1()
}

/// Green's function with pole at `q`, evaluated at `p`.
pub fn green_h(p: &HPoint, q: &HPoint) -> Result<f64> {
    let rho = dist_h(p, q);
    if rho < POLE_RADIUS {
        return Err(Error::Pole { distance: rho });
    }
    Ok(green_of_distance(rho))
}

/// `Δρ = 2 coth ρ` for a hyperbolic distance function.
pub fn laplacian_of_distance(rho: f64) -> f64 {
    2.0 / rho.tanh()
}

/// A tangent vector at `base`, stored by its coordinate components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub base: HPoint,
    pub components: [f64; 3],
}

impl TangentVector {
    pub fn zero(base: HPoint) -> Self {
        Self { base, components: [0.0; 3] }
    }

    /// Hyperbolic inner product `z⁻² (u · v)`.
    pub fn inner(&self, other: &TangentVector) -> f64 {
        let [a, b, c] = self.components;
        let [d, e, f] = other.components;
        (a * d + b * e + c * f) / (self.base.z * self.base.z)
    }

    /// Pairing with a coordinate vector.
    pub fn pair(&self, v: [f64; 3]) -> f64 {
        self.inner(&TangentVector { base: self.base, components: v })
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn add(&self, other: &TangentVector) -> Self {
        let mut c = self.components;
        for (ci, oi) in c.iter_mut().zip(other.components) {
            *ci += oi;
        }
        Self { base: self.base, components: c }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { base: self.base, components: self.components.map(|c| c * s) }
    }
}

/// Hyperbolic gradient of `ρ_q = dist_h(·, q)` at `p`.
///
/// The coordinate components are `z² ∂ᵢρ`, so the hyperbolic norm is one.
pub fn grad_dist_h(p: &HPoint, q: &HPoint) -> Result<TangentVector> {
    let rho = dist_h(p, q);
    if rho < POLE_RADIUS {
        return Err(Error::Pole { distance: rho });
    }
    Ok(grad_dist_raw(p, q))
}

/// Gradient of `ρ_q` without the pole check; zero when `p == q`.
pub(crate) fn grad_dist_raw(p: &HPoint, q: &HPoint) -> TangentVector {
    let rho = dist_h(p, q);
    if rho == 0.0 {
        return TangentVector::zero(*p);
    }
    let (dx, dy, dz) = (p.x - q.x, p.y - q.y, p.z - q.z);
    let euc_sq = dx * dx + dy * dy + dz * dz;
    let zz = p.z * q.z;
    let da = [dx / zz, dy / zz, dz / zz - euc_sq / (2.0 * p.z * p.z * q.z)];
    // ∂ᵢ cosh ρ scaled by z²/sinh ρ
    let s = p.z * p.z / rho.sinh();
    TangentVector { base: *p, components: da.map(|d| d * s) }
}

/// `V = 1 + Σ mᵢ Γ_{pᵢ}`.
pub fn potential_v(config: &MonopoleConfig, p: &HPoint) -> Result<f64> {
    config
        .entries
        .iter()
        .try_fold(1.0, |acc, &(q, m)| Ok(acc + f64::from(m) * green_h(p, &q)?))
}

/// Generators of the isometry group used for normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Generator {
    /// `(x, y, z) ↦ (x + dx, y + dy, z)`
    Translate { dx: f64, dy: f64 },
    /// `(x, y, z) ↦ k (x, y, z)`
    Dilate { factor: f64 },
    /// `(x, y, z) ↦ (x, y, z)/(x² + y² + z²)`
    InvertUnitSphere,
}

impl Generator {
    fn apply(&self, p: &HPoint) -> HPoint {
        match *self {
            Generator::Translate { dx, dy } => HPoint::from_raw(p.x + dx, p.y + dy, p.z),
            Generator::Dilate { factor } => {
                HPoint::from_raw(factor * p.x, factor * p.y, factor * p.z)
            }
            Generator::InvertUnitSphere => {
                let r2 = p.x * p.x + p.y * p.y + p.z * p.z;
                HPoint::from_raw(p.x / r2, p.y / r2, p.z / r2)
            }
        }
    }
}

/// A composition of generators, applied left to right.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Isometry {
    pub steps: Vec<Generator>,
}

impl Isometry {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn is_identity(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn apply(&self, p: &HPoint) -> HPoint {
        self.steps.iter().fold(*p, |acc, g| g.apply(&acc))
    }

    fn push(&mut self, g: Generator) {
        self.steps.push(g);
    }

    /// Translation and dilation taking `p` to `(0, 0, 1)`.
    fn to_origin(p: &HPoint) -> Self {
        let mut iso = Self::identity();
        if p.x != 0.0 || p.y != 0.0 {
            iso.push(Generator::Translate { dx: -p.x, dy: -p.y });
        }
        if p.z != 1.0 {
            iso.push(Generator::Dilate { factor: 1.0 / p.z });
        }
        iso
    }
}

/// Moves the first monopole point to `(0, 0, 1)`. Two-point configurations are
/// instead placed symmetrically at `(0, 0, r₀)` and `(0, 0, 1/r₀)` with
/// `r₀ = e^{d/2} > 1`.
pub fn normalize_config(config: &MonopoleConfig) -> Result<(MonopoleConfig, Isometry)> {
    let points: Vec<HPoint> = config.points().collect();
    let iso = match points.as_slice() {
        [] => return Err(Error::EmptyConfig),
        [p, q] => symmetric_pair_isometry(p, q),
        [p, ..] => Isometry::to_origin(p),
    };
    Ok((config.map_points(&iso), iso))
}

fn symmetric_pair_isometry(p: &HPoint, q: &HPoint) -> Isometry {
    let target = (0.5 * dist_h(p, q)).exp();
    let already = p.is_on_axis() && q.is_on_axis() && {
        let tol = 1e-15 * target;
        (p.z - target).abs() <= tol && (q.z - 1.0 / target).abs() <= tol
    };
    if already {
        return Isometry::identity();
    }

    let mut iso = Isometry::identity();
    let (dx, dy) = (q.x - p.x, q.y - p.y);
    let horizontal = dx.hypot(dy);
    if horizontal > 0.0 {
        // The geodesic through p and q is a semicircle in the vertical plane
        // through both points; send one of its ideal endpoints to infinity.
        let (ux, uy) = (dx / horizontal, dy / horizontal);
        let (t1, t2) = (0.0, horizontal);
        let c = (t2 * t2 + q.z * q.z - t1 * t1 - p.z * p.z) / (2.0 * (t2 - t1));
        let radius = (c * c + p.z * p.z).sqrt();
        let end = c - radius;
        let (ex, ey) = (p.x + end * ux, p.y + end * uy);
        iso.push(Generator::Translate { dx: -ex, dy: -ey });
        iso.push(Generator::InvertUnitSphere);
    }
    let p1 = iso.apply(p);
    let q1 = iso.apply(q);
    if p1.x != 0.0 || p1.y != 0.0 {
        iso.push(Generator::Translate { dx: -p1.x, dy: -p1.y });
    }
    let scale = 1.0 / (p1.z * q1.z).sqrt();
    if scale != 1.0 {
        iso.push(Generator::Dilate { factor: scale });
    }
    if p1.z < q1.z {
        iso.push(Generator::InvertUnitSphere);
    }
    // Snap the images exactly onto the axis.
    let (pa, qa) = (iso.apply(p), iso.apply(q));
    debug_assert!(pa.x.abs() < 1e-9 && qa.x.abs() < 1e-9);
    iso
}

/// Maximum over `rhos` of `|(−2 + 2 coth ρ) − 4e^{−2ρ}/(1 − e^{−2ρ})|`.
pub fn check_rholemma(rhos: &[f64]) -> f64 {
    rhos.iter()
        .map(|&rho| {
            let lhs = -2.0 + laplacian_of_distance(rho);
            let v1 = 1.0 / -(-2.0 * rho).exp_m1();
            let rhs = 4.0 * (-2.0 * rho).exp() * v1;
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max)
}

/// Hyperbolic Laplacian `z²(∂ₓ² + ∂ᵧ² + ∂_z²) − z∂_z` by central differences.
///
/// `h` is measured in hyperbolic units: the coordinate step is `h·z`.
pub fn fd_laplacian<F>(f: F, p: &HPoint, h: f64) -> Result<f64>
where
    F: Fn(&HPoint) -> Result<f64>,
{
    let f0 = f(p)?;
    let h = h * p.z;
    let mut lap = 0.0;
    let mut dz = 0.0;
    for axis in 0..3 {
        let mut v = [0.0; 3];
        v[axis] = h;
        let fp = f(&p.offset(v)?)?;
        let fm = f(&p.offset(v.map(|c| -c))?)?;
        lap += (fp - 2.0 * f0 + fm) / (h * h);
        if axis == 2 {
            dz = (fp - fm) / (2.0 * h);
        }
    }
    Ok(p.z * p.z * lap - p.z * dz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x: f64, y: f64, z: f64) -> HPoint {
        HPoint::new(x, y, z).unwrap()
    }

    #[test]
    fn rejects_nonpositive_height() {
        assert!(HPoint::new(0.0, 0.0, 0.0).is_err());
        assert!(HPoint::new(0.0, 0.0, -1.0).is_err());
        assert!(HPoint::new(f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn distance_along_axis_is_log_height() {
        let d = dist_h(&pt(0.0, 0.0, 1.0), &pt(0.0, 0.0, std::f64::consts::E));
        assert!((d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn distance_matches_arccosh_form() {
        let d = dist_h(&pt(0.0, 0.0, 1.0), &pt(3.0, 4.0, 1.0));
        assert!((d - 13.5_f64.acosh()).abs() < 1e-14);
        assert!((d - 3.2945).abs() < 1e-4);
    }

    #[test]
    fn green_at_unit_distance() {
        let g = green_of_distance(1.0);
        let oracle = 1.0 / (std::f64::consts::E.powi(2) - 1.0);
        assert!((g - oracle).abs() < 1e-16);
        assert!((g - 0.156518).abs() < 1e-6);
    }

    #[test]
    fn green_leading_singularity() {
        for rho in [1e-3, 1e-5, 1e-7] {
            assert!((green_of_distance(rho) * 2.0 * rho - 1.0).abs() < 2.0 * rho);
        }
    }

    #[test]
    fn green_pole_is_rejected() {
        let p = pt(0.2, 0.1, 0.5);
        assert!(matches!(green_h(&p, &p), Err(Error::Pole { .. })));
        assert!(grad_dist_h(&p, &p).is_err());
    }

    #[test]
    fn one_plus_green_is_v1() {
        for rho in [0.01, 0.3, 1.0, 4.0, 12.0] {
            let lhs = 1.0 + green_of_distance(rho);
            let rhs = 1.0 / (1.0 - (-2.0 * rho).exp());
            assert!((lhs - rhs).abs() < 1e-13 * rhs);
        }
    }

    #[test]
    fn gradient_on_axis_is_vertical() {
        let g = grad_dist_h(&pt(0.0, 0.0, 3.0), &pt(0.0, 0.0, 0.5)).unwrap();
        assert_eq!(g.components[0], 0.0);
        assert_eq!(g.components[1], 0.0);
        assert!(g.components[2] > 0.0);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let p = pt(0.3, -0.2, 0.7);
        let q = pt(-0.5, 0.4, 1.9);
        let grad = grad_dist_h(&p, &q).unwrap();
        let v = [0.3, -0.7, 0.5];
        let mut prev = f64::INFINITY;
        for h in [1e-2, 5e-3, 2.5e-3] {
            let fp = dist_h(&p.offset(v.map(|c| c * h)).unwrap(), &q);
            let fm = dist_h(&p.offset(v.map(|c| -c * h)).unwrap(), &q);
            let err = ((fp - fm) / (2.0 * h) - grad.pair(v)).abs();
            // second order: halving h cuts the error by about four
            assert!(err < prev / 3.0 || err < 1e-11);
            prev = err;
        }
    }

    #[test]
    fn potential_of_empty_config_is_one() {
        let v = potential_v(&MonopoleConfig::empty(), &pt(1.0, 2.0, 3.0)).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn potential_single_point_unit_distance() {
        let c = MonopoleConfig::single(HPoint::origin(), 1).unwrap();
        let v = potential_v(&c, &pt(0.0, 0.0, std::f64::consts::E)).unwrap();
        let oracle = 1.0 + 1.0 / (std::f64::consts::E.powi(2) - 1.0);
        assert!((v - oracle).abs() < 1e-15);
    }

    #[test]
    fn potential_is_linear_in_multiplicity() {
        let q = pt(0.1, 0.0, 0.8);
        let p = pt(0.7, -0.3, 1.4);
        let doubled = potential_v(&MonopoleConfig::single(q, 2).unwrap(), &p).unwrap();
        let single = potential_v(&MonopoleConfig::single(q, 1).unwrap(), &p).unwrap();
        assert!((doubled - (2.0 * single - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let p = pt(0.0, 0.0, 1.0);
        assert_eq!(
            MonopoleConfig::new(vec![(p, 1), (pt(1.0, 0.0, 1.0), 0)]),
            Err(Error::ZeroMultiplicity { index: 1 })
        );
        assert_eq!(
            MonopoleConfig::new(vec![(p, 1), (p, 2)]),
            Err(Error::DuplicatePoint { first: 0, second: 1 })
        );
        assert_eq!(MonopoleConfig::new(vec![(p, 2), (pt(0.0, 0.0, 2.0), 3)]).unwrap().total_multiplicity(), 5);
    }

    #[test]
    fn normalized_config_is_identity() {
        let c = MonopoleConfig::from_points(&[HPoint::origin(), pt(0.4, 0.1, 2.0), pt(-1.0, 0.0, 0.3)]).unwrap();
        let (n, iso) = normalize_config(&c).unwrap();
        assert!(iso.is_identity());
        assert_eq!(n, c);
        let pair = MonopoleConfig::symmetric_pair(1.3).unwrap();
        assert!(normalize_config(&pair).unwrap().1.is_identity());
    }

    #[test]
    fn pair_at_distance_two() {
        // two points at hyperbolic distance 2 along a non-vertical geodesic
        let p = pt(0.5, 0.5, 1.0);
        let dir = [0.6, 0.0, 0.8];
        let mut q = p;
        // walk along a geodesic by bisection on the parameter
        let (mut lo, mut hi) = (0.0, 50.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            q = p.offset(dir.map(|c| c * mid)).unwrap();
            if dist_h(&p, &q) < 2.0 { lo = mid } else { hi = mid }
        }
        let (n, _) = normalize_config(&MonopoleConfig::from_points(&[p, q]).unwrap()).unwrap();
        let pts: Vec<_> = n.points().collect();
        let e = std::f64::consts::E;
        assert!(pts[0].x().abs() < 1e-12 && pts[0].y().abs() < 1e-12);
        assert!((pts[0].z() - e).abs() < 1e-10, "{:?}", pts[0]);
        assert!((pts[1].z() - 1.0 / e).abs() < 1e-10);
        assert!((dist_h(&HPoint::on_axis(e).unwrap(), &HPoint::on_axis(1.0 / e).unwrap()) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rholemma_residual_is_tiny() {
        let grid: Vec<f64> = (0..1000).map(|i| 0.01 + (10.0 - 0.01) * i as f64 / 999.0).collect();
        assert!(check_rholemma(&grid) < 1e-12);
        // both sides vanish at large distance
        assert!((-2.0 + laplacian_of_distance(40.0)).abs() < 1e-30);
    }

    #[test]
    fn fd_laplacian_of_distance_on_axis() {
        let q = HPoint::origin();
        for z in [0.3, 2.0, 5.0] {
            let p = pt(0.0, 0.0, z);
            let rho = dist_h(&p, &q);
            let fd = fd_laplacian(|x| Ok(dist_h(x, &q)), &p, 1e-4).unwrap();
            assert!((fd - laplacian_of_distance(rho)).abs() < 1e-6, "z={z} fd={fd} exact={}", laplacian_of_distance(rho));
        }
    }

    fn arb_point() -> impl Strategy<Value = HPoint> {
        (-3.0..3.0f64, -3.0..3.0f64, 0.05..4.0f64).prop_map(|(x, y, z)| pt(x, y, z))
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(p in arb_point(), q in arb_point(), r in arb_point()) {
            let pq = dist_h(&p, &q);
            prop_assert!(pq >= 0.0);
            prop_assert_eq!(pq, dist_h(&q, &p));
            prop_assert_eq!(dist_h(&p, &p), 0.0);
            prop_assert!(pq <= dist_h(&p, &r) + dist_h(&r, &q) + 1e-10);
        }

        #[test]
        fn gradient_has_unit_norm(p in arb_point(), q in arb_point()) {
            prop_assume!(dist_h(&p, &q) > 1e-3);
            let g = grad_dist_h(&p, &q).unwrap();
            prop_assert!((g.norm_sq() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn normalization_preserves_distances(pts in proptest::collection::vec(arb_point(), 1..5)) {
            let cfg = match MonopoleConfig::from_points(&pts) { Ok(c) => c, Err(_) => return Ok(()) };
            let (norm, _) = normalize_config(&cfg).unwrap();
            let a: Vec<_> = cfg.points().collect();
            let b: Vec<_> = norm.points().collect();
            let expected_height = if a.len() == 2 { (0.5 * dist_h(&a[0], &a[1])).exp() } else { 1.0 };
            prop_assert!((b[0].z() - expected_height).abs() < 1e-9 * b[0].z());
            for i in 0..a.len() {
                for j in i + 1..a.len() {
                    let d0 = dist_h(&a[i], &a[j]);
                    let d1 = dist_h(&b[i], &b[j]);
                    prop_assert!((d0 - d1).abs() < 1e-12 * d0.max(1.0), "{} vs {}", d0, d1);
                }
            }
        }

        #[test]
        fn potential_decreases_away_from_pole(t in 0.05..5.0f64, s in 0.01..1.0f64) {
            let c = MonopoleConfig::from_points(&[HPoint::origin(), pt(2.0, 0.0, 1.0)]).unwrap();
            // move away from the origin along the vertical geodesic through it
            let near = potential_v(&c, &HPoint::on_axis((-t).exp()).unwrap()).unwrap();
            let far = potential_v(&c, &HPoint::on_axis((-t - s).exp()).unwrap()).unwrap();
            prop_assert!(near > 1.0 && far > 1.0);
            prop_assert!(far < near);
        }
    }
}
