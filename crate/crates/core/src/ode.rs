//! Shooting for radial solutions of the constant scalar curvature equation
//! on the negative-mass spaces `O(−n)`:
//!
//! ```text
//! ((n + (5 − 2n) r²) / (r (1 + r²))) f′ + ((n + r²) / (1 + r²)) f″ = −λ f³,
//! f(0) = 1, f′(0) = 0.
//! ```
//!
//! A solution extending to a compactified orbifold metric must stay positive
//! and decay like `r⁻²`. Shots start from a two-term series just off the
//! origin and are integrated with an adaptive Dormand-Prince 5(4) pair.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootOptions {
    /// Where the series start hands over to the integrator.
    pub r_start: f64,
    pub r_max: f64,
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self { r_start: 1e-3, r_max: 1e3, rtol: 1e-11, atol: 1e-13, h_min: 1e-13 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Classification {
    /// `r²f` settles to `limit`.
    DecaysQuadratically { limit: f64 },
    HitsZero { at: f64 },
    Grows,
    Indeterminate,
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Classification::DecaysQuadratically { .. } => "decays-quadratically",
            Classification::HitsZero { .. } => "hits-zero",
            Classification::Grows => "grows",
            Classification::Indeterminate => "indeterminate",
        }
    }
}

/// Sign persistence of `f″` along the stretch where `f′ < 0` beyond the
/// radius `√(n/(2n − 5))`, recorded for `n ≥ 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcavityMonitor {
    pub sign_change_radius: f64,
    /// Accepted steps inspected.
    pub checked: usize,
    /// First radius with `f″ ≥ 0`, if any.
    pub violation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub n: u32,
    pub lambda: f64,
    /// `(r, f, f′)` at the series point and every accepted step.
    pub grid: Vec<[f64; 3]>,
    pub classification: Classification,
    pub concavity: Option<ConcavityMonitor>,
}

impl RadialSolution {
    /// `|f − g|` maximized over grid points with `r ≤ r_hi`; `r = 0` is
    /// included through `f(0) = 1`.
    pub fn sup_error(&self, g: impl Fn(f64) -> f64, r_hi: f64) -> f64 {
        self.grid
            .iter()
            .take_while(|p| p[0] <= r_hi)
            .map(|p| (p[1] - g(p[0])).abs())
            .fold((1.0 - g(0.0)).abs(), f64::max)
    }

    /// Columnar text: `r f f_r r2f`.
    pub fn write_trajectory<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# n = {} lambda = {:.16e} class = {}", self.n, self.lambda, self.classification.name())?;
        writeln!(w, "# r f f_r r2f")?;
        for [r, f, fr] in &self.grid {
            writeln!(w, "{r:.16e} {f:.16e} {fr:.16e} {:.16e}", r * r * f)?;
        }
        Ok(())
    }
}

/// `f″` from the equation.
pub fn second_derivative(n: u32, lambda: f64, r: f64, f: f64, fr: f64) -> f64 {
    let nf = f64::from(n);
    let r2 = r * r;
    let a = (nf + (5.0 - 2.0 * nf) * r2) / (r * (1.0 + r2));
    let b = (nf + r2) / (1.0 + r2);
    (-lambda * f * f * f - a * fr) / b
}

/// Leading coefficient `c` of `f = 1 − c r² + O(r⁴)`.
pub fn series_coefficient(n: u32, lambda: f64) -> f64 {
    // balance (n/r) f′ + n f″ = −λ at the origin
    lambda / (4.0 * f64::from(n))
}

/// `√(n/(2n − 5))`, where the first-order coefficient turns negative.
pub fn sign_change_radius(n: u32) -> Option<f64> {
    (n >= 3).then(|| (f64::from(n) / (2.0 * f64::from(n) - 5.0)).sqrt())
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
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

type State = [f64; 2];

/// One Dormand-Prince step; returns the fifth-order state and the error vector.
fn dp_step(rhs: &impl Fn(f64, State) -> State, r: f64, y: State, h: f64) -> (State, State) {
    let mut k = [[0.0; 2]; 7];
    for s in 0..7 {
        let mut ys = y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for i in 0..2 {
                ys[i] += h * A[s][j] * kj[i];
            }
        }
        k[s] = rhs(r + C[s] * h, ys);
    }
    let mut hi = y;
    let mut err = [0.0; 2];
    for s in 0..7 {
        for i in 0..2 {
            hi[i] += h * B5[s] * k[s][i];
            err[i] += h * (B5[s] - B4[s]) * k[s][i];
        }
    }
    (hi, err)
}

struct Integrator<'a, F> {
    rhs: F,
    opts: &'a ShootOptions,
    h: f64,
}

enum Segment {
    Reached,
    Zero(f64),
}

impl<F: Fn(f64, State) -> State> Integrator<'_, F> {
    /// Advances `(r, y)` to `r_end`, pushing accepted points, or stops at the
    /// first sign change of `f`.
    fn run(&mut self, r: &mut f64, y: &mut State, r_end: f64, grid: &mut Vec<[f64; 3]>) -> Result<Segment> {
        while *r < r_end {
            let h = self.h.min(r_end - *r);
            let (next, e) = dp_step(&self.rhs, *r, *y, h);
            let mut ratio: f64 = 0.0;
            for i in 0..2 {
                let sc = self.opts.atol + self.opts.rtol * y[i].abs().max(next[i].abs());
                ratio = ratio.max((e[i] / sc).abs());
            }
            if !ratio.is_finite() || ratio > 1.0 {
                let shrink = if ratio.is_finite() { (0.9 * ratio.powf(-0.2)).max(0.2) } else { 0.2 };
                self.h = h * shrink;
                if self.h < self.opts.h_min * r.max(1.0) {
                    return Err(Error::StepUnderflow { r: *r });
                }
                continue;
            }
            if next[0] <= 0.0 {
                return Ok(Segment::Zero(self.locate_zero(*r, *y, h)));
            }
            *r += h;
            *y = next;
            grid.push([*r, y[0], y[1]]);
            let grow = if ratio == 0.0 { 5.0 } else { 0.9 * ratio.powf(-0.2) };
            // h may have been clipped to r_end; grow from the controller's step
            self.h *= grow.clamp(1.0, 5.0);
        }
        Ok(Segment::Reached)
    }

    /// Bisection on the step length from a point where `f > 0`.
    fn locate_zero(&self, r: f64, y: State, h: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, h);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let (ym, _) = dp_step(&self.rhs, r, y, mid);
            if ym[0] > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        r + 0.5 * (lo + hi)
    }
}

/// Integrates one shot from the series start to `r_max` or to the first zero.
pub fn shoot(n: u32, lambda: f64, opts: &ShootOptions) -> Result<RadialSolution> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    if !(opts.r_max >= 100.0) {
        return Err(Error::InvalidArgument(format!(
            "r_max = {} is too small to classify decay; need at least 100",
            opts.r_max
        )));
    }
    if !(opts.r_start > 0.0 && opts.r_start < 1e-2) {
        return Err(Error::InvalidArgument("r_start must lie in (0, 1e-2)".into()));
    }

    let c = series_coefficient(n, lambda);
    let r0 = opts.r_start;
    let mut r = r0;
    let mut y = [1.0 - c * r0 * r0, -2.0 * c * r0];
    let mut grid = vec![[r, y[0], y[1]]];
    let rhs = |r: f64, y: State| [y[1], second_derivative(n, lambda, r, y[0], y[1])];
    let mut integ = Integrator { rhs, opts, h: r0 };

    let r_mid = opts.r_max / 10.0;
    let mut classification = None;
    let mut q_mid = f64::NAN;
    for r_end in [r_mid, opts.r_max] {
        match integ.run(&mut r, &mut y, r_end, &mut grid)? {
            Segment::Zero(at) => {
                classification = Some(Classification::HitsZero { at });
                break;
            }
            Segment::Reached if r_end == r_mid => q_mid = r * r * y[0],
            Segment::Reached => {}
        }
    }
    let classification = classification.unwrap_or_else(|| {
        let q_end = r * r * y[0];
        if q_end > 0.0 && ((q_end - q_mid) / q_end).abs() < 1e-3 {
            Classification::DecaysQuadratically { limit: q_end }
        } else if q_end > 10.0 * q_mid {
            Classification::Grows
        } else {
            Classification::Indeterminate
        }
    });

    let concavity = sign_change_radius(n).map(|rs| {
        let mut monitor = ConcavityMonitor { sign_change_radius: rs, checked: 0, violation: None };
        for &[r, f, fr] in &grid {
            if r > rs && fr < 0.0 && f > 0.0 {
                monitor.checked += 1;
                if monitor.violation.is_none() && second_derivative(n, lambda, r, f, fr) >= 0.0 {
                    monitor.violation = Some(r);
                }
            }
        }
        monitor
    });

    Ok(RadialSolution { n, lambda, grid, classification, concavity })
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || count < 2 {
        return Err(Error::InvalidArgument("log grid needs 0 < lo < hi and at least 2 points".into()));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == count {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ScanVerdict {
    /// A shot at `lambda` decays quadratically; `bracket` is the refinement
    /// interval it came from (degenerate if the grid value itself decayed).
    AdmissibleFound { lambda: f64, bracket: [f64; 2] },
    NoneOnGrid,
}

/// Numerical evidence from a λ scan. It is not a proof of existence or
/// nonexistence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub n: u32,
    pub grid: Vec<f64>,
    pub classes: Vec<Classification>,
    pub verdict: ScanVerdict,
    /// Brackets refined between sign-opposed neighbours, with the class of
    /// each final midpoint.
    pub refinements: Vec<([f64; 2], Classification)>,
    /// Concavity monitors with a recorded violation.
    pub concavity_violations: Vec<(f64, f64)>,
}

/// `+1` for shots that overshoot (hit zero or `r²f` falling), `−1` for shots
/// that undershoot (`r²f` rising), `0` otherwise.
fn side(sol: &RadialSolution) -> i8 {
    match sol.classification {
        Classification::HitsZero { .. } => 1,
        Classification::Grows => -1,
        _ => {
            let tail: Vec<&[f64; 3]> = sol.grid.iter().rev().take(2).collect();
            match tail.as_slice() {
                [b, a] => {
                    let drift = b[0] * b[0] * b[1] - a[0] * a[0] * a[1];
                    if drift > 0.0 {
                        -1
                    } else if drift < 0.0 {
                        1
                    } else {
                        0
                    }
                }
                _ => 0,
            }
        }
    }
}

pub const BRACKET_WIDTH: f64 = 1e-12;

/// Shoots every `λ` on `grid` in parallel, then refines every neighbouring
/// pair that changes from undershoot to overshoot by bisection.
pub fn scan(n: u32, grid: &[f64], opts: &ShootOptions) -> Result<ScanReport> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) || grid[0] <= 0.0 {
        return Err(Error::InvalidArgument("lambda grid must be positive and strictly increasing".into()));
    }
    let shots: Vec<RadialSolution> = grid.par_iter().map(|&l| shoot(n, l, opts)).collect::<Result<_>>()?;
    let classes: Vec<Classification> = shots.iter().map(|s| s.classification).collect();
    let concavity_violations = shots
        .iter()
        .filter_map(|s| s.concavity.and_then(|c| c.violation).map(|r| (s.lambda, r)))
        .collect();

    if let Some(s) = shots.iter().find(|s| matches!(s.classification, Classification::DecaysQuadratically { .. })) {
        return Ok(ScanReport {
            n,
            grid: grid.to_vec(),
            classes,
            verdict: ScanVerdict::AdmissibleFound { lambda: s.lambda, bracket: [s.lambda, s.lambda] },
            refinements: Vec::new(),
            concavity_violations,
        });
    }

    let pairs: Vec<usize> = (1..shots.len())
        .filter(|&i| side(&shots[i - 1]) == -1 && side(&shots[i]) == 1)
        .collect();
    let refinements: Vec<([f64; 2], Classification)> = pairs
        .par_iter()
        .map(|&i| refine(n, grid[i - 1], grid[i], opts))
        .collect::<Result<_>>()?;

    let verdict = refinements
        .iter()
        .find_map(|(b, c)| match c {
            Classification::DecaysQuadratically { .. } => {
                Some(ScanVerdict::AdmissibleFound { lambda: 0.5 * (b[0] + b[1]), bracket: *b })
            }
            _ => None,
        })
        .unwrap_or(ScanVerdict::NoneOnGrid);
    Ok(ScanReport { n, grid: grid.to_vec(), classes, verdict, refinements, concavity_violations })
}

fn refine(n: u32, mut lo: f64, mut hi: f64, opts: &ShootOptions) -> Result<([f64; 2], Classification)> {
    loop {
        let mid = 0.5 * (lo + hi);
        let sol = shoot(n, mid, opts)?;
        if matches!(sol.classification, Classification::DecaysQuadratically { .. }) {
            return Ok(([lo, hi], sol.classification));
        }
        if hi - lo < BRACKET_WIDTH * hi || mid <= lo || mid >= hi {
            return Ok(([lo, hi], sol.classification));
        }
        match side(&sol) {
            1 => hi = mid,
            -1 => lo = mid,
            _ => return Ok(([lo, hi], sol.classification)),
        }
    }
}
