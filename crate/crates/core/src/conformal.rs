//! Conformal test factors, the spherical compactifier and scalar curvature in
//! the two gauges used for Yamabe energies.
//!
//! In the hyperbolic gauge a metric is written `e^{2f}(V g_H + V⁻¹ω²)` and its
//! scalar curvature is `6 e^{−2f} V⁻¹ (−1 − Δf − |∇f|²)`, with the Laplacian and
//! gradient taken in `g_H`. In the scalar-flat gauge the AF metric is rescaled
//! by `u²` with `u = 2/(1 + x² + y² + z²)`, giving scalar curvature `12/V`.
//! The connection form never enters either formula.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hgeom::{
    dist_h, grad_dist_h, laplacian_of_distance, potential_v, HPoint, MonopoleConfig,
    TangentVector, POLE_RADIUS,
};

/// Conformal gauge in which a Yamabe energy is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gauge {
    /// `e^{2f}`-rescaled hyperbolic form; volume density `e^{4f} V z⁻³`.
    Hyperbolic,
    /// `u² g_LB`; scalar curvature `12/V`, volume density `u⁴ V z`.
    ScalarFlat,
}

impl Gauge {
    pub fn name(&self) -> &'static str {
        match self {
            Gauge::Hyperbolic => "hyperbolic",
            Gauge::ScalarFlat => "flat",
        }
    }
}

/// A conformal test factor `f` on hyperbolic space with analytic `Δf` and `∇f`.
#[derive(Debug, Clone, PartialEq)]
pub enum TestConformal {
    /// `f = −ρ_q`.
    NegDist(HPoint),
    /// `f = −(1/n) Σ ρ_{pᵢ}` over the distinct monopole points.
    AvgNegDist(Vec<HPoint>),
    /// `f = log(z u) = −log cosh ρ₀`, the hyperbolic-gauge form of `u² g_LB`.
    LogU,
}

impl TestConformal {
    pub fn avg_neg_dist(config: &MonopoleConfig) -> Result<Self> {
        if config.is_empty() {
            return Err(Error::EmptyConfig);
        }
        Ok(TestConformal::AvgNegDist(config.points().collect()))
    }

    /// Points where `f` fails to be smooth.
    pub fn centers(&self) -> Vec<HPoint> {
        match self {
            TestConformal::NegDist(q) => vec![*q],
            TestConformal::AvgNegDist(ps) => ps.clone(),
            TestConformal::LogU => vec![HPoint::origin()],
        }
    }

    /// Whether `f` depends on the distance to `(0, 0, 1)` only.
    pub fn is_radial_about_origin(&self) -> bool {
        match self {
            TestConformal::NegDist(q) => *q == HPoint::origin(),
            TestConformal::AvgNegDist(ps) => ps.iter().all(|p| *p == HPoint::origin()),
            TestConformal::LogU => true,
        }
    }

    /// Whether `f` is invariant under rotations about the vertical axis.
    pub fn is_axial(&self) -> bool {
        self.centers().iter().all(HPoint::is_on_axis)
    }

    pub fn value(&self, p: &HPoint) -> f64 {
        match self {
            TestConformal::NegDist(q) => -dist_h(p, q),
            TestConformal::AvgNegDist(ps) => {
                -ps.iter().map(|q| dist_h(p, q)).sum::<f64>() / ps.len() as f64
            }
            TestConformal::LogU => -dist_h(p, &HPoint::origin()).cosh().ln(),
        }
    }

    pub fn laplacian(&self, p: &HPoint) -> Result<f64> {
        match self {
            TestConformal::NegDist(q) => Ok(-laplacian_of_distance(off_pole(p, q)?)),
            TestConformal::AvgNegDist(ps) => {
                let mut sum = 0.0;
                for q in ps {
                    sum += laplacian_of_distance(off_pole(p, q)?);
                }
                Ok(-sum / ps.len() as f64)
            }
            TestConformal::LogU => {
                let rho = dist_h(p, &HPoint::origin());
                let sech = 1.0 / rho.cosh();
                Ok(-2.0 - sech * sech)
            }
        }
    }

    pub fn gradient(&self, p: &HPoint) -> Result<TangentVector> {
        match self {
            TestConformal::NegDist(q) => Ok(grad_dist_h(p, q)?.scale(-1.0)),
            TestConformal::AvgNegDist(ps) => {
                let mut g = TangentVector::zero(*p);
                for q in ps {
                    g = g.add(&grad_dist_h(p, q)?);
                }
                Ok(g.scale(-1.0 / ps.len() as f64))
            }
            TestConformal::LogU => {
                let o = HPoint::origin();
                let rho = dist_h(p, &o);
                if rho < POLE_RADIUS {
                    return Ok(TangentVector::zero(*p));
                }
                Ok(grad_dist_h(p, &o)?.scale(-rho.tanh()))
            }
        }
    }

    pub fn grad_norm_sq(&self, p: &HPoint) -> Result<f64> {
        match self {
            TestConformal::NegDist(q) => off_pole(p, q).map(|_| 1.0),
            TestConformal::LogU => Ok(dist_h(p, &HPoint::origin()).tanh().powi(2)),
            TestConformal::AvgNegDist(_) => Ok(self.gradient(p)?.norm_sq()),
        }
    }

    /// `−1 − Δf − |∇f|²`.
    pub fn curvature_bracket(&self, p: &HPoint) -> Result<f64> {
        Ok(-1.0 - self.laplacian(p)? - self.grad_norm_sq(p)?)
    }
}

fn off_pole(p: &HPoint, q: &HPoint) -> Result<f64> {
    let rho = dist_h(p, q);
    if rho < POLE_RADIUS {
        return Err(Error::Pole { distance: rho });
    }
    Ok(rho)
}

/// `u = sech(ρ₀)/z = 2/(1 + x² + y² + z²)`, with `ρ₀` the distance to `(0, 0, 1)`.
pub fn compactifier_u(p: &HPoint) -> f64 {
    let [x, y, z] = p.coords();
    2.0 / (1.0 + x * x + y * y + z * z)
}

/// The same function through its distance form `sech(ρ₀)/z`.
pub fn compactifier_u_from_distance(p: &HPoint) -> f64 {
    1.0 / (dist_h(p, &HPoint::origin()).cosh() * p.z())
}

/// Analytic `(∂ₓu, ∂ᵧu, ∂_z u)` and the Euclidean Laplacian of `u`.
fn compactifier_derivatives(p: &HPoint) -> ([f64; 3], f64) {
    let [x, y, z] = p.coords();
    let s = 1.0 + x * x + y * y + z * z;
    let grad = [x, y, z].map(|c| -4.0 * c / (s * s));
    let second: f64 = [x, y, z]
        .iter()
        .map(|c| -4.0 / (s * s) + 16.0 * c * c / (s * s * s))
        .sum();
    (grad, second)
}

/// `Δ_Euc u + z⁻¹ ∂_z u`, computed from analytic derivatives.
pub fn ueqn_lhs(p: &HPoint) -> f64 {
    let (grad, lap) = compactifier_derivatives(p);
    lap + grad[2] / p.z()
}

/// Maximum of `|Δ_Euc u + z⁻¹∂_z u + 2u³|` over `grid`.
pub fn check_ueqn(grid: &[HPoint]) -> f64 {
    grid.iter()
        .map(|p| (ueqn_lhs(p) + 2.0 * compactifier_u(p).powi(3)).abs())
        .fold(0.0, f64::max)
}

/// Finite-difference version of [`check_ueqn`] with coordinate step `h`.
pub fn check_ueqn_fd(grid: &[HPoint], h: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in grid {
        let u0 = compactifier_u(p);
        let mut lap = 0.0;
        let mut dz = 0.0;
        for axis in 0..3 {
            let mut v = [0.0; 3];
            v[axis] = h;
            let up = compactifier_u(&p.offset(v)?);
            let um = compactifier_u(&p.offset(v.map(|c| -c))?);
            lap += (up - 2.0 * u0 + um) / (h * h);
            if axis == 2 {
                dz = (up - um) / (2.0 * h);
            }
        }
        worst = worst.max((lap + dz / p.z() + 2.0 * u0.powi(3)).abs());
    }
    Ok(worst)
}

/// `R = 6 e^{−2f} V⁻¹ (−1 − Δf − |∇f|²)` in the hyperbolic gauge.
pub fn scalar_curvature_hyp(config: &MonopoleConfig, f: &TestConformal, p: &HPoint) -> Result<f64> {
    let v = potential_v(config, p)?;
    Ok(6.0 * (-2.0 * f.value(p)).exp() / v * f.curvature_bracket(p)?)
}

/// `R̃ = 12/V` for `u² g_LB`.
pub fn scalar_curvature_flat_gauge(config: &MonopoleConfig, p: &HPoint) -> Result<f64> {
    Ok(12.0 / potential_v(config, p)?)
}

/// `R̃ = −6 u⁻³ Δ_LB u` with `Δ_LB u = V⁻¹(Δ_Euc u + z⁻¹∂_z u)`.
pub fn scalar_curvature_flat_gauge_from_u(config: &MonopoleConfig, p: &HPoint) -> Result<f64> {
    let v = potential_v(config, p)?;
    let u = compactifier_u(p);
    Ok(-6.0 / u.powi(3) * ueqn_lhs(p) / v)
}

/// Coefficients of the negative-mass ALE metric on `O(−n)`:
/// `dr²/F + r²(σ₁² + σ₂² + F σ₃²)` with `F = 1 + A r⁻² + B r⁻⁴`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OLnCoefficients {
    pub n: u32,
    pub a: f64,
    pub b: f64,
    pub mass: f64,
}

impl OLnCoefficients {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("O(-n) requires n >= 1".into()));
        }
        let nf = f64::from(n);
        Ok(Self { n, a: nf - 2.0, b: 1.0 - nf, mass: -4.0 * PI * PI * (nf - 2.0) })
    }

    /// `F(r) = 1 + A r⁻² + B r⁻⁴`.
    pub fn radicand(&self, r: f64) -> f64 {
        let r2 = r * r;
        1.0 + self.a / r2 + self.b / (r2 * r2)
    }
}

/// The three coefficients in the shifted radius `r̂² = r² − 1`:
/// `((1 + r̂²)/(n + r̂²), 1 + r̂², r̂²(n + r̂²)/(n²(1 + r̂²)))` for `dr̂²`,
/// `σ₁² + σ₂²` and `σ₃²` respectively.
pub fn oln_profile(n: u32, r_hat: f64) -> Result<(f64, f64, f64)> {
    if n == 0 || !(r_hat >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "oln_profile needs n >= 1 and r_hat >= 0, got n = {n}, r_hat = {r_hat}"
        )));
    }
    let nf = f64::from(n);
    let s = r_hat * r_hat;
    Ok(((1.0 + s) / (nf + s), 1.0 + s, s * (nf + s) / (nf * nf * (1.0 + s))))
}
