//! Yamabe test energies over hyperbolic space and the closed-form bounds they
//! are compared against.
//!
//! Every energy is `𝒴 = (∫ R dV) · (∫ dV)^{−1/2}` over the 4-manifold. The
//! integrands do not depend on the fiber angle, so each 4-dimensional integral
//! is `2π` times an integral over `H³` against the hyperbolic volume.
//!
//! The `H³` integrands are split into terms, each of which is smooth in
//! hyperbolic polar coordinates about its own center up to a factor that is
//! bounded once multiplied by the polar volume density `sinh²ρ`. A Green's
//! function term `mⱼ Γⱼ(ρⱼ)` therefore goes into a chart centered at `pⱼ`.
//! Depending on the symmetry of all centers, the chart integrals reduce to one
//! (`ρ`), two (`ρ, θ`) or three (`ρ, θ, φ`) nested adaptive quadratures.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::conformal::{compactifier_u, Gauge, TestConformal};
use crate::error::{Error, Result};
use crate::hgeom::{dist_h, grad_dist_raw, green_of_distance, HPoint, MonopoleConfig, TangentVector};
use crate::quadrature::{integrate, Controls, Estimate};

/// `Y(S⁴) = 8π√6`.
pub fn sphere_yamabe() -> f64 {
    8.0 * PI * 6f64.sqrt()
}

/// `Y(CP², [g_FS]) = 12π√2`.
pub fn cp2_yamabe() -> f64 {
    12.0 * PI * 2f64.sqrt()
}

/// The single-point test value `12π√6 / √(N + 2)` for total multiplicity `N`.
pub fn single_point_energy(total_multiplicity: u32) -> f64 {
    12.0 * PI * 6f64.sqrt() / f64::from(total_multiplicity + 2).sqrt()
}

/// Orbifold ceiling `Y(S⁴)·m^{−1/2}`, the value for the football `S⁴/ℤ_m`.
pub fn bound_orbifold(group_order: u32) -> Result<f64> {
    if group_order == 0 {
        return Err(Error::InvalidArgument("group order must be positive".into()));
    }
    Ok(sphere_yamabe() / f64::from(group_order).sqrt())
}

/// Lower bound `4π√6·√(4 − n)` for positive self-dual conformal classes on
/// `n#CP²`, `0 ≤ n ≤ 3`.
pub fn bound_selfdual_lower(n: u32) -> Result<f64> {
    if n > 3 {
        return Err(Error::InvalidArgument(format!(
            "self-dual lower bound is vacuous for n = {n} > 3"
        )));
    }
    Ok(4.0 * PI * 6f64.sqrt() * f64::from(4 - n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExistenceVerdict {
    /// Small clusters with these multiplicities admit an orbifold Yamabe minimizer.
    SolvableByCorollary,
    Inconclusive,
}

/// Whether the largest multiplicity is below `4(N + 2)/9`, so that the
/// single-point test value undercuts the football bound for the worst point.
pub fn orbifold_existence_test(multiplicities: &[u32]) -> Result<ExistenceVerdict> {
    let Some(&max) = multiplicities.iter().max() else {
        return Err(Error::EmptyConfig);
    };
    if multiplicities.contains(&0) {
        return Err(Error::InvalidArgument("multiplicities must be positive".into()));
    }
    let total: u32 = multiplicities.iter().sum();
    // max < 4(N+2)/9  ⇔  9·max < 4(N+2), in integers
    Ok(if 9 * max < 4 * (total + 2) {
        ExistenceVerdict::SolvableByCorollary
    } else {
        ExistenceVerdict::Inconclusive
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Everything radial about `(0, 0, 1)`.
    #[serde(rename = "radial-1d")]
    Radial1D,
    /// Every center on the vertical axis.
    #[serde(rename = "axisymmetric-2d")]
    Axisymmetric2D,
    #[serde(rename = "tensor-3d")]
    Tensor3D,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Radial1D => "radial-1d",
            Scheme::Axisymmetric2D => "axisymmetric-2d",
            Scheme::Tensor3D => "tensor-3d",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "radial-1d" => Ok(Scheme::Radial1D),
            "axisymmetric-2d" => Ok(Scheme::Axisymmetric2D),
            "tensor-3d" => Ok(Scheme::Tensor3D),
            other => Err(Error::InvalidArgument(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// `None` selects the cheapest admissible scheme.
    pub scheme: Option<Scheme>,
    pub rho_max: f64,
    /// Target relative tolerance for each reported integral.
    pub tol: f64,
    /// Panel budget of the outermost quadrature.
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { scheme: None, rho_max: 30.0, tol: 1e-7, max_panels: 4000 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho_max >= 10.0) {
            return Err(Error::InvalidArgument(format!(
                "rho_max must be at least 10, got {}",
                self.rho_max
            )));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-4) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must lie in (0, 1e-4], got {}",
                self.tol
            )));
        }
        if self.max_panels == 0 {
            return Err(Error::InvalidArgument("max_panels must be positive".into()));
        }
        Ok(())
    }
}

/// Hyperbolic polar coordinates about `center`, with polar axis vertical.
#[derive(Debug, Clone, Copy)]
struct Chart {
    center: HPoint,
}

impl Chart {
    /// The point at distance `rho` in direction `(θ, φ)`.
    fn point(&self, rho: f64, theta: f64, (cos_p, sin_p): (f64, f64)) -> HPoint {
        let sh = rho.sinh();
        let half = (0.5 * theta).sin();
        // cosh ρ − sinh ρ cos θ without cancellation
        let denom = (-rho).exp() + 2.0 * sh * half * half;
        let z1 = 1.0 / denom;
        let horiz = sh * theta.sin() * z1;
        let [cx, cy, cz] = self.center.coords();
        HPoint::from_raw(cx + cz * horiz * cos_p, cy + cz * horiz * sin_p, cz * z1)
    }

    /// `(ρ, θ, φ)` of `q`.
    fn polar(&self, q: &HPoint) -> (f64, f64, f64) {
        let [cx, cy, cz] = self.center.coords();
        let (x, y, z) = ((q.x() - cx) / cz, (q.y() - cy) / cz, q.z() / cz);
        let rho = dist_h(&self.center, q);
        if rho == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let cos_t = ((rho.cosh() - 1.0 / z) / rho.sinh()).clamp(-1.0, 1.0);
        let phi = y.atan2(x).rem_euclid(2.0 * PI);
        (rho, cos_t.acos(), phi)
    }
}

type TermFn<'a> = Box<dyn Fn(&HPoint, f64) -> f64 + Sync + 'a>;

/// One piece of an `H³` integrand: `eval(p, ρ_center(p))`.
struct Term<'a> {
    center: HPoint,
    eval: TermFn<'a>,
}

impl<'a> Term<'a> {
    fn new(center: HPoint, eval: impl Fn(&HPoint, f64) -> f64 + Sync + 'a) -> Self {
        Self { center, eval: Box::new(eval) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HypIntegral {
    value: f64,
    error: f64,
    tail: f64,
    converged: bool,
}

fn sorted_breaks(mut pts: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    pts.retain(|x| *x > lo && *x < hi);
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    pts
}

fn check_scheme(scheme: Scheme, features: &[HPoint]) -> Result<()> {
    let origin = HPoint::origin();
    let reason = match scheme {
        Scheme::Radial1D if features.iter().any(|p| dist_h(p, &origin) > 1e-12) => {
            "radial-1d needs every monopole point and test-factor center at (0, 0, 1)"
        }
        Scheme::Axisymmetric2D
            if features.iter().any(|p| p.x().abs() > 1e-13 * p.z() || p.y().abs() > 1e-13 * p.z()) =>
        {
            "axisymmetric-2d needs every center on the vertical axis"
        }
        _ => return Ok(()),
    };
    Err(Error::SchemeMismatch { scheme: scheme.name().into(), reason: reason.into() })
}

fn select_scheme(requested: Option<Scheme>, features: &[HPoint]) -> Result<Scheme> {
    if let Some(s) = requested {
        check_scheme(s, features)?;
        return Ok(s);
    }
    for s in [Scheme::Radial1D, Scheme::Axisymmetric2D] {
        if check_scheme(s, features).is_ok() {
            return Ok(s);
        }
    }
    Ok(Scheme::Tensor3D)
}

/// `∫_{H³} Σ terms dV_H`.
fn integrate_terms(terms: &[Term<'_>], features: &[HPoint], scheme: Scheme, spec: &QuadratureSpec) -> HypIntegral {
    let inner_tol = spec.tol * 1e-2;
    let inner = Controls { rel_tol: inner_tol, abs_tol: 1e-300, max_panels: 400, parallel: false };
    let outer = Controls { rel_tol: spec.tol * 0.1, abs_tol: 1e-300, max_panels: spec.max_panels, parallel: true };

    let mut total = HypIntegral { value: 0.0, error: 0.0, tail: 0.0, converged: true };
    for term in terms {
        let chart = Chart { center: term.center };
        let polar: Vec<(f64, f64, f64)> = features
            .iter()
            .map(|q| chart.polar(q))
            .filter(|(r, _, _)| *r > 1e-12)
            .collect();
        let mut rho_breaks: Vec<f64> = polar.iter().map(|p| p.0).collect();
        rho_breaks.extend([0.5, 1.0, 2.0, 4.0, 8.0, 16.0]);
        let rho_breaks = sorted_breaks(rho_breaks, 0.0, spec.rho_max);
        let theta_breaks = sorted_breaks(polar.iter().map(|p| p.1).collect(), 0.0, PI);
        let phi_breaks = sorted_breaks(polar.iter().map(|p| p.2).collect(), 0.0, 2.0 * PI);

        let eval = |rho: f64, theta: f64, cs: (f64, f64)| (term.eval)(&chart.point(rho, theta, cs), rho);

        let radial = |rho: f64| -> (f64, f64) {
            let vol = rho.sinh().powi(2);
            match scheme {
                Scheme::Radial1D => (4.0 * PI * eval(rho, 0.0, (1.0, 0.0)) * vol, 0.0),
                Scheme::Axisymmetric2D => {
                    let e = integrate(
                        |t: f64| (eval(rho, t, (1.0, 0.0)) * t.sin(), 0.0),
                        &theta_breaks,
                        &inner,
                    );
                    (2.0 * PI * e.value * vol, 2.0 * PI * e.error * vol)
                }
                Scheme::Tensor3D => {
                    let e = integrate(
                        |t: f64| {
                            let s = t.sin();
                            let az = integrate(
                                |p: f64| (eval(rho, t, (p.cos(), p.sin())), 0.0),
                                &phi_breaks,
                                &inner,
                            );
                            (az.value * s, az.error * s)
                        },
                        &theta_breaks,
                        &inner,
                    );
                    (e.value * vol, e.error * vol)
                }
            }
        };

        let est: Estimate = integrate(radial, &rho_breaks, &outer);
        // The integrands decay at least like e^{−2ρ} in the polar variable.
        let tail = 0.5 * radial(spec.rho_max).0.abs();
        total.value += est.value;
        total.error += est.error + tail;
        total.tail += tail;
        total.converged &= est.converged;
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AtMost,
    AtLeast,
    Equals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundComparison {
    pub name: String,
    pub bound: f64,
    pub relation: Relation,
    pub satisfied: bool,
}

impl BoundComparison {
    fn new(name: &str, bound: f64, relation: Relation, energy: f64, slack: f64) -> Self {
        let satisfied = match relation {
            Relation::AtMost => energy <= bound + slack,
            Relation::AtLeast => energy >= bound - slack,
            Relation::Equals => (energy - bound).abs() <= slack,
        };
        Self { name: name.into(), bound, relation, satisfied }
    }
}

/// A test energy. It bounds the Yamabe invariant from above; it is not a
/// minimized value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YamabeReport {
    pub energy: f64,
    pub energy_error: f64,
    /// `∫ R dV`.
    pub numerator: f64,
    pub numerator_error: f64,
    pub volume: f64,
    pub volume_error: f64,
    pub tail_bound: f64,
    pub scheme: Scheme,
    pub gauge: Gauge,
    pub comparisons: Vec<BoundComparison>,
}

fn assemble(
    num: HypIntegral,
    vol: HypIntegral,
    scheme: Scheme,
    gauge: Gauge,
    spec: &QuadratureSpec,
) -> Result<YamabeReport> {
    let (numerator, numerator_error) = (2.0 * PI * num.value, 2.0 * PI * num.error);
    let (volume, volume_error) = (2.0 * PI * vol.value, 2.0 * PI * vol.error);
    let worst = (numerator_error / numerator.abs()).max(volume_error / volume);
    if !num.converged || !vol.converged || !(worst <= spec.tol) {
        return Err(Error::ToleranceNotMet { tol: spec.tol, estimate: worst, panels: spec.max_panels });
    }
    let energy = numerator / volume.sqrt();
    let energy_error = energy.abs() * (numerator_error / numerator.abs() + 0.5 * volume_error / volume);
    Ok(YamabeReport {
        energy,
        energy_error,
        numerator,
        numerator_error,
        volume,
        volume_error,
        tail_bound: 2.0 * PI * (num.tail + vol.tail),
        scheme,
        gauge,
        comparisons: Vec::new(),
    })
}

/// Bound comparisons that apply to a test energy of `config` in `gauge`.
pub fn compare_bounds(config: &MonopoleConfig, gauge: Gauge, energy: f64, error: f64) -> Vec<BoundComparison> {
    let slack = error.max(1e-9 * energy.abs());
    let mut out = Vec::new();
    let unit = config.multiplicities().iter().all(|&m| m == 1);
    let max_mult = config.multiplicities().into_iter().max().unwrap_or(1);
    match gauge {
        Gauge::Hyperbolic if !config.is_empty() => {
            out.push(BoundComparison::new("Y(CP2) = 12*pi*sqrt(2)", cp2_yamabe(), Relation::AtMost, energy, slack));
            if config.len() == 1 {
                let n = config.total_multiplicity();
                out.push(BoundComparison::new(
                    "single point 12*pi*sqrt(6)/sqrt(N+2)",
                    single_point_energy(n),
                    Relation::Equals,
                    energy,
                    slack.max(1e-6),
                ));
            }
        }
        Gauge::Hyperbolic => {}
        Gauge::ScalarFlat => {
            out.push(BoundComparison::new("Y(S4) = 8*pi*sqrt(6)", sphere_yamabe(), Relation::AtMost, energy, slack));
        }
    }
    if unit && (1..=3).contains(&config.len()) {
        let n = config.len() as u32;
        if let Ok(b) = bound_selfdual_lower(n) {
            out.push(BoundComparison::new("self-dual lower 4*pi*sqrt(6)*sqrt(4-n)", b, Relation::AtLeast, energy, slack));
        }
    }
    if max_mult > 1 {
        if let Ok(b) = bound_orbifold(max_mult) {
            out.push(BoundComparison::new("football 8*pi*sqrt(6)/sqrt(m)", b, Relation::AtMost, energy, 0.0));
        }
    }
    out
}

fn features(config: &MonopoleConfig, extra: &[HPoint]) -> Vec<HPoint> {
    let mut out: Vec<HPoint> = config.points().collect();
    for p in extra {
        if !out.iter().any(|q| dist_h(p, q) < 1e-12) {
            out.push(*p);
        }
    }
    out
}

fn avg_gradient(ps: &[HPoint], p: &HPoint) -> TangentVector {
    let mut g = TangentVector::zero(*p);
    for q in ps {
        g = g.add(&grad_dist_raw(p, q));
    }
    g.scale(-1.0 / ps.len() as f64)
}

/// Test energy of `e^{2f}(V g_H + V⁻¹ω²)` on the compactification.
pub fn energy_hyp_gauge(config: &MonopoleConfig, f: &TestConformal, spec: &QuadratureSpec) -> Result<YamabeReport> {
    spec.validate()?;
    let feats = features(config, &f.centers());
    let scheme = select_scheme(spec.scheme, &feats)?;

    let mut num: Vec<Term<'_>> = Vec::new();
    let f_center = f.centers()[0];
    match f {
        TestConformal::NegDist(q) => {
            // −1 − Δf − |∇f|² = 2(coth ρ − 1) = 4Γ
            num.push(Term::new(*q, |_, rho| 24.0 * (-2.0 * rho).exp() * green_of_distance(rho)));
        }
        TestConformal::AvgNegDist(ps) => {
            let n = ps.len() as f64;
            num.push(Term::new(ps[0], move |p, _| {
                6.0 * (2.0 * f.value(p)).exp() * (1.0 - avg_gradient(ps, p).norm_sq())
            }));
            for q in ps {
                num.push(Term::new(*q, move |p, rho| {
                    6.0 * (2.0 * f.value(p)).exp() * 4.0 / n * green_of_distance(rho)
                }));
            }
        }
        TestConformal::LogU => {
            num.push(Term::new(HPoint::origin(), |_, rho| 12.0 / rho.cosh().powi(4)));
        }
    }

    let mut vol: Vec<Term<'_>> = vec![Term::new(f_center, move |p, _| (4.0 * f.value(p)).exp())];
    for &(q, m) in config.entries() {
        let m = f64::from(m);
        vol.push(Term::new(q, move |p, rho| m * (4.0 * f.value(p)).exp() * green_of_distance(rho)));
    }

    let n_est = integrate_terms(&num, &feats, scheme, spec);
    let v_est = integrate_terms(&vol, &feats, scheme, spec);
    let mut report = assemble(n_est, v_est, scheme, Gauge::Hyperbolic, spec)?;
    report.comparisons = compare_bounds(config, Gauge::Hyperbolic, report.energy, report.energy_error);
    Ok(report)
}

/// Test energy of `u² g_LB`, with scalar curvature `12/V` and volume density
/// `u⁴ V z` in `(x, y, z, θ)` coordinates.
pub fn energy_flat_gauge(config: &MonopoleConfig, spec: &QuadratureSpec) -> Result<YamabeReport> {
    spec.validate()?;
    let feats = features(config, &[HPoint::origin()]);
    let scheme = select_scheme(spec.scheme, &feats)?;
    // z u⁴ dx dy dz = (z u)⁴ dV_H
    let weight = |p: &HPoint| (p.z() * compactifier_u(p)).powi(4);

    let num = vec![Term::new(HPoint::origin(), move |p, _| 12.0 * weight(p))];
    let mut vol = vec![Term::new(HPoint::origin(), move |p, _| weight(p))];
    for &(q, m) in config.entries() {
        let m = f64::from(m);
        vol.push(Term::new(q, move |p, rho| m * weight(p) * green_of_distance(rho)));
    }
    let n_est = integrate_terms(&num, &feats, scheme, spec);
    let v_est = integrate_terms(&vol, &feats, scheme, spec);
    let mut report = assemble(n_est, v_est, scheme, Gauge::ScalarFlat, spec)?;
    report.comparisons = compare_bounds(config, Gauge::ScalarFlat, report.energy, report.energy_error);
    Ok(report)
}

/// Test energy in either gauge; the hyperbolic gauge uses `f = −ρ_{p₁}`.
pub fn energy(config: &MonopoleConfig, gauge: Gauge, spec: &QuadratureSpec) -> Result<YamabeReport> {
    match gauge {
        Gauge::Hyperbolic => {
            let p1 = config.points().next().unwrap_or(HPoint::origin());
            energy_hyp_gauge(config, &TestConformal::NegDist(p1), spec)
        }
        Gauge::ScalarFlat => energy_flat_gauge(config, spec),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormRow {
    pub label: String,
    pub multiplicity: u32,
    pub quadrature: f64,
    pub error_estimate: f64,
    pub exact: f64,
    pub relative_error: f64,
}

/// `∫ V₁ e^{−4ρ} dV_H = π/4` and `∫ (1 + N Γ) e^{−4ρ} dV_H = (N + 2)π/12`
/// for `N = 1..=8`, by quadrature, against their closed forms.
pub fn closed_form_integrals(spec: &QuadratureSpec) -> Result<Vec<ClosedFormRow>> {
    spec.validate()?;
    let o = HPoint::origin();
    let feats = [o];
    let mut rows = Vec::new();

    let v1 = [Term::new(o, |_, rho: f64| (-4.0 * rho).exp() / -(-2.0 * rho).exp_m1())];
    let est = integrate_terms(&v1, &feats, Scheme::Radial1D, spec);
    rows.push(row("V1*exp(-4rho)", 1, est, PI / 4.0));

    for n in 1..=8u32 {
        let nf = f64::from(n);
        let terms = [
            Term::new(o, |_, rho: f64| (-4.0 * rho).exp()),
            Term::new(o, move |_, rho: f64| nf * green_of_distance(rho) * (-4.0 * rho).exp()),
        ];
        let est = integrate_terms(&terms, &feats, Scheme::Radial1D, spec);
        rows.push(row("(1+N*Gamma)*exp(-4rho)", n, est, f64::from(n + 2) * PI / 12.0));
    }
    Ok(rows)
}

fn row(label: &str, n: u32, est: HypIntegral, exact: f64) -> ClosedFormRow {
    ClosedFormRow {
        label: label.into(),
        multiplicity: n,
        quadrature: est.value,
        error_estimate: est.error,
        exact,
        relative_error: (est.value - exact).abs() / exact,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSample {
    pub distance: f64,
    pub report: YamabeReport,
    /// `12π√2` in the hyperbolic gauge, `8π√6` in the flat gauge.
    pub ceiling: f64,
    /// `ceiling − energy`.
    pub gap: f64,
}

/// Test energies of the symmetric pair `(0,0,e^{d/2}), (0,0,e^{−d/2})` over `ds`.
pub fn two_point_sweep(ds: &[f64], gauge: Gauge, spec: &QuadratureSpec) -> Result<Vec<SweepSample>> {
    let ceiling = match gauge {
        Gauge::Hyperbolic => cp2_yamabe(),
        Gauge::ScalarFlat => sphere_yamabe(),
    };
    ds.par_iter()
        .map(|&d| {
            let config = MonopoleConfig::symmetric_pair(d)?;
            let report = energy(&config, gauge, spec)?;
            Ok(SweepSample { distance: d, gap: ceiling - report.energy, ceiling, report })
        })
        .collect()
}
