//! Exact characteristic-number budgets. Curvature integrals are kept in units
//! of `π²`: `w2plus = ∫|W⁺|² / π²` and `sigma2 = 4∫σ₂ / π²`.

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Q = Rational64;

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

/// `η(S³/ℤ_m) = (m − 1)(m − 2) / (3m)`.
pub fn eta(m: u32) -> Q {
    let m = i64::from(m);
    Q::new((m - 1) * (m - 2), 3 * m)
}

/// An orbifold point or end with group order `order`; `sign` is the sign of
/// its η term in the signature formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaTerm {
    pub order: u32,
    pub sign: i8,
    #[serde(with = "ratio_str")]
    pub eta: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharBudget {
    #[serde(with = "ratio_str")]
    pub chi: Q,
    #[serde(with = "ratio_str")]
    pub tau: Q,
    #[serde(with = "ratio_str")]
    pub w2plus: Q,
    #[serde(with = "ratio_str")]
    pub sigma2: Q,
    pub eta_terms: Vec<EtaTerm>,
}

impl CharBudget {
    pub fn zero() -> Self {
        Self { chi: Q::zero(), tau: Q::zero(), w2plus: Q::zero(), sigma2: Q::zero(), eta_terms: Vec::new() }
    }

    /// Builds a budget from `χ`, `τ` and the orbifold points, solving the
    /// signature formula for `w2plus` and Gauss-Bonnet for `sigma2`.
    fn solve(chi: i64, tau: i64, points: Vec<(u32, i8)>) -> Self {
        let eta_terms: Vec<EtaTerm> = points
            .into_iter()
            .filter(|(m, _)| *m > 1)
            .map(|(order, sign)| EtaTerm { order, sign, eta: eta(order) })
            .collect();
        let eta_sum: Q = eta_terms.iter().map(|t| q(i64::from(t.sign)) * t.eta).sum();
        let w2plus = q(12) * (q(tau) - eta_sum);
        let sigma2 = q(8) * q(chi) - w2plus - q(8) * orbifold_defect(&eta_terms);
        Self { chi: q(chi), tau: q(tau), w2plus, sigma2, eta_terms }
    }

    pub fn group_orders(&self) -> Vec<u32> {
        self.eta_terms.iter().map(|t| t.order).collect()
    }

    /// `τ = w2plus/12 + Σ sign·η`.
    pub fn signature_holds(&self) -> bool {
        let eta_sum: Q = self.eta_terms.iter().map(|t| q(i64::from(t.sign)) * t.eta).sum();
        self.tau == self.w2plus / q(12) + eta_sum
    }

    /// `χ = (w2plus + sigma2)/8 + Σ (1 − 1/|G|)`.
    pub fn gauss_bonnet_holds(&self) -> bool {
        self.chi == (self.w2plus + self.sigma2) / q(8) + orbifold_defect(&self.eta_terms)
    }
}

fn orbifold_defect(terms: &[EtaTerm]) -> Q {
    terms.iter().map(|t| Q::one() - Q::new(1, i64::from(t.order))).sum()
}

fn check_positive(ms: &[u32]) -> Result<()> {
    if ms.contains(&0) {
        return Err(Error::InvalidArgument("multiplicities must be positive".into()));
    }
    Ok(())
}

/// Self-dual `n#CP²`.
pub fn budget_ncp2(n: u32) -> CharBudget {
    let n = i64::from(n);
    CharBudget::solve(n + 2, n, Vec::new())
}

/// Compactified LeBrun orbifold with one point of multiplicity `n`
/// (the compactification of `O(−n)`).
pub fn budget_oln(n: u32) -> Result<CharBudget> {
    budget_compact_lebrun(&[n])
}

/// Compactified LeBrun orbifold with monopole multiplicities `ms`; each
/// multiplicity `m > 1` is a `ℤ_m` point entering with reversed orientation.
pub fn budget_compact_lebrun(ms: &[u32]) -> Result<CharBudget> {
    check_positive(ms)?;
    let k = ms.len() as i64;
    Ok(CharBudget::solve(k + 2, k, ms.iter().map(|&m| (m, -1)).collect()))
}

/// Compactified multi-Eguchi-Hanson with `n` unit points.
pub fn budget_gh(n: u32) -> Result<CharBudget> {
    if n == 0 {
        return Err(Error::InvalidArgument("Gibbons-Hawking space needs at least one point".into()));
    }
    budget_gh_multi(&vec![1; n as usize])
}

/// Compactified Gibbons-Hawking orbifold with point multiplicities `ms`: a
/// `ℤ_M` point at infinity (`M = Σ ms`) and a `ℤ_m` point for each `m > 1`.
pub fn budget_gh_multi(ms: &[u32]) -> Result<CharBudget> {
    if ms.is_empty() {
        return Err(Error::InvalidArgument("Gibbons-Hawking space needs at least one point".into()));
    }
    check_positive(ms)?;
    let l = ms.len() as i64;
    let total: u32 = ms.iter().sum();
    let mut points = vec![(total, 1)];
    points.extend(ms.iter().map(|&m| (m, -1)));
    Ok(CharBudget::solve(l + 1, l - 1, points))
}

/// `S⁴/ℤ_m` with its two antipodal orbifold points.
pub fn budget_football(m: u32) -> Result<CharBudget> {
    check_positive(&[m])?;
    Ok(CharBudget::solve(2, 0, vec![(m, 1), (m, -1)]))
}

/// Both sides of `((n+1)(n−1)/n)·8 + ((n²+2)/(3n))·12 = 12n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conservation {
    pub n: u32,
    #[serde(with = "ratio_str")]
    pub gh: Q,
    #[serde(with = "ratio_str")]
    pub oln: Q,
    #[serde(with = "ratio_str")]
    pub lhs: Q,
    #[serde(with = "ratio_str")]
    pub rhs: Q,
    pub holds: bool,
}

pub fn conservation_check(n: u32) -> Result<Conservation> {
    let gh = budget_gh(n)?.w2plus;
    let oln = budget_oln(n)?.w2plus;
    let lhs = gh + oln;
    let rhs = q(12 * i64::from(n));
    Ok(Conservation { n, gh, oln, lhs, rhs, holds: lhs == rhs })
}

/// Rationals as `"p/q"` strings.
pub(crate) mod ratio_str {
    use super::Q;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|_| D::Error::custom(format!("bad rational `{s}`")))
    }
}
