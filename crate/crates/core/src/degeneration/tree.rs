//! Bubble trees inferred from sampled families of monopole configurations.
//!
//! Only hyperbolic distances between the points enter, so the prediction is
//! unchanged by any isometry applied to every sample. Trends are read off the
//! last three samples.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io::Write;

use super::budget::{budget_compact_lebrun, budget_football, budget_gh_multi, CharBudget, Q};
use crate::error::{Error, Result};
use crate::hgeom::{dist_h, HPoint, Isometry, MonopoleConfig};

/// Per-sample change, in natural log, that counts as a scale separating.
pub const SEPARATION: f64 = std::f64::consts::LN_2;
/// Per-sample change below which a scale counts as settled (`ln 1.5`).
pub const SETTLED: f64 = 0.405_465_108_108_164_4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "multiplicities", rename_all = "kebab-case")]
pub enum BubbleKind {
    CompactLeBrunOrbifold(Vec<u32>),
    GibbonsHawkingOrbifold(Vec<u32>),
    LeBrunAF(Vec<u32>),
    EguchiHanson,
    NeckR4ModZm(u32),
    Football(u32),
}

impl BubbleKind {
    pub fn label(&self) -> String {
        let list = |ms: &[u32]| ms.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        match self {
            BubbleKind::CompactLeBrunOrbifold(ms) => format!("LeBrun({})", list(ms)),
            BubbleKind::GibbonsHawkingOrbifold(ms) => format!("GH({})", list(ms)),
            BubbleKind::LeBrunAF(ms) => format!("LeBrunAF({})", list(ms)),
            BubbleKind::EguchiHanson => "EguchiHanson".into(),
            BubbleKind::NeckR4ModZm(m) => format!("Neck(R4/Z{m})"),
            BubbleKind::Football(m) => format!("Football({m})"),
        }
    }

    pub fn budget(&self) -> Result<CharBudget> {
        match self {
            BubbleKind::CompactLeBrunOrbifold(ms) | BubbleKind::LeBrunAF(ms) => budget_compact_lebrun(ms),
            BubbleKind::GibbonsHawkingOrbifold(ms) => budget_gh_multi(ms),
            BubbleKind::EguchiHanson => budget_gh_multi(&[1, 1]),
            BubbleKind::NeckR4ModZm(_) => Ok(CharBudget::zero()),
            BubbleKind::Football(m) => budget_football(*m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BubbleNode {
    pub kind: BubbleKind,
    /// Indices of the monopole points this node's cluster contains.
    pub points: Vec<usize>,
    /// Total multiplicity of the cluster.
    pub multiplicity: u32,
    pub budget: CharBudget,
    pub children: Vec<BubbleNode>,
}

impl BubbleNode {
    fn new(kind: BubbleKind, points: Vec<usize>, multiplicity: u32, children: Vec<BubbleNode>) -> Result<Self> {
        let budget = kind.budget()?;
        Ok(Self { kind, points, multiplicity, budget, children })
    }

    /// Depth-first, parents first.
    pub fn nodes(&self) -> Vec<&BubbleNode> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.nodes());
        }
        out
    }

    /// The same tree with neck nodes spliced out.
    pub fn without_necks(&self) -> BubbleNode {
        let mut children = Vec::new();
        for c in &self.children {
            if matches!(c.kind, BubbleKind::NeckR4ModZm(_)) {
                children.extend(c.children.iter().map(BubbleNode::without_necks));
            } else {
                children.push(c.without_necks());
            }
        }
        BubbleNode { children, ..self.clone() }
    }

    /// Kinds only, as nested text: `LeBrun(3)[GH(1,2)[EguchiHanson]]`.
    pub fn shape(&self) -> String {
        let mut s = self.kind.label();
        if !self.children.is_empty() {
            let inner: Vec<String> = self.children.iter().map(BubbleNode::shape).collect();
            let _ = write!(s, "[{}]", inner.join(", "));
        }
        s
    }

    /// Indented text, one node per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(0, &mut out);
        out
    }

    fn write_text(&self, depth: usize, out: &mut String) {
        let pts = self.points.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        let _ = writeln!(
            out,
            "{}{}  points [{}]  w2+ = {} pi^2  4int(sigma2) = {} pi^2",
            "  ".repeat(depth),
            self.kind.label(),
            pts,
            self.budget.w2plus,
            self.budget.sigma2
        );
        for c in &self.children {
            c.write_text(depth + 1, out);
        }
    }

    /// Every node's child clusters add up to its own multiplicity.
    pub fn multiplicity_conserved(&self) -> bool {
        let child_sum = |filter: fn(&BubbleNode) -> bool| -> u32 {
            self.children.iter().filter(|c| filter(c)).map(|c| c.multiplicity).sum()
        };
        let here = match &self.kind {
            BubbleKind::CompactLeBrunOrbifold(ms) | BubbleKind::LeBrunAF(ms) => {
                // far points leave through Z1 necks into asymptotically flat bubbles
                ms.iter().sum::<u32>() + child_sum(|c| c.kind == BubbleKind::NeckR4ModZm(1)) == self.multiplicity
            }
            BubbleKind::GibbonsHawkingOrbifold(ms) => ms.iter().sum::<u32>() == self.multiplicity,
            BubbleKind::EguchiHanson => self.multiplicity == 2,
            BubbleKind::NeckR4ModZm(m) => {
                self.children.len() == 1
                    && self.children[0].multiplicity == self.multiplicity
                    && (*m == 1 || *m == self.multiplicity)
            }
            BubbleKind::Football(_) => true,
        };
        here && self.children.iter().all(BubbleNode::multiplicity_conserved)
    }
}

/// A family `j ↦ config(j)` sampled at increasing `j`. Point `i` of every
/// sample is the same monopole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerationScenario {
    pub parameters: Vec<f64>,
    pub samples: Vec<MonopoleConfig>,
}

pub const MIN_SAMPLES: usize = 4;

impl DegenerationScenario {
    pub fn new(parameters: Vec<f64>, samples: Vec<MonopoleConfig>) -> Result<Self> {
        if samples.len() != parameters.len() {
            return Err(Error::InvalidArgument("one parameter value per sample required".into()));
        }
        if samples.len() < MIN_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "scale detection needs at least {MIN_SAMPLES} samples, got {}",
                samples.len()
            )));
        }
        if parameters.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("parameter values must increase".into()));
        }
        let ms = samples[0].multiplicities();
        if ms.is_empty() {
            return Err(Error::EmptyConfig);
        }
        if let Some(k) = samples.iter().position(|c| c.multiplicities() != ms) {
            return Err(Error::InvalidArgument(format!(
                "sample {k} does not have the same points and multiplicities as sample 0"
            )));
        }
        Ok(Self { parameters, samples })
    }

    /// Samples `family(j)` at each `j`.
    pub fn from_family(js: &[f64], family: impl Fn(f64) -> Result<MonopoleConfig>) -> Result<Self> {
        let samples = js.iter().map(|&j| family(j)).collect::<Result<Vec<_>>>()?;
        Self::new(js.to_vec(), samples)
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.samples[0].total_multiplicity()
    }

    /// The same family with `iso` applied to every sample.
    pub fn map_points(&self, iso: &Isometry) -> Self {
        let samples = self.samples.iter().map(|c| c.map_points(iso)).collect();
        Self { parameters: self.parameters.clone(), samples }
    }
}

/// Default sample parameters `j = 4, 16, 64, 256, 1024`.
pub fn default_parameters() -> Vec<f64> {
    (1..=5).map(|k| 4f64.powi(k)).collect()
}

/// `p₁ = (0,0,1)` with `p₂, p₃` at distance `~j⁻²` from each other and `~j⁻¹`
/// from `p₁`.
pub fn nested_collision(js: &[f64]) -> Result<DegenerationScenario> {
    DegenerationScenario::from_family(js, |j| {
        MonopoleConfig::from_points(&[
            HPoint::new(0.0, 0.0, 1.0)?,
            HPoint::new(1.0 / j, 0.0, 1.0)?,
            HPoint::new(1.0 / j + 1.0 / (j * j), 0.0, 1.0)?,
        ])
    })
}

/// `p₁ = (0,0,1)` fixed while `p₂, p₃` run together into the boundary point
/// `(0,0,0)`.
pub fn boundary_pair(js: &[f64]) -> Result<DegenerationScenario> {
    DegenerationScenario::from_family(js, |j| {
        MonopoleConfig::from_points(&[
            HPoint::new(0.0, 0.0, 1.0)?,
            HPoint::new(0.0, 0.0, 1.0 / j)?,
            HPoint::new(1.0 / (j * j), 0.0, 1.0 / j)?,
        ])
    })
}

/// Three fixed distinct points.
pub fn no_degeneration(js: &[f64]) -> Result<DegenerationScenario> {
    DegenerationScenario::from_family(js, |_| {
        MonopoleConfig::from_points(&[
            HPoint::new(0.0, 0.0, 1.0)?,
            HPoint::new(1.0, 0.0, 1.0)?,
            HPoint::new(0.0, 1.0, 2.0)?,
        ])
    })
}

/// Trend of a log-scale over the last two transitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Trend {
    Separating,
    Settled,
}

fn trend(series: &[f64], sign: f64, what: &str) -> Result<Trend> {
    let k = series.len();
    let d1 = sign * (series[k - 2] - series[k - 3]);
    let d2 = sign * (series[k - 1] - series[k - 2]);
    if d1 >= SEPARATION && d2 >= SEPARATION {
        Ok(Trend::Separating)
    } else if d1 < SETTLED && d2 < SETTLED {
        Ok(Trend::Settled)
    } else {
        Err(Error::Indeterminate(format!(
            "{what}: per-sample log changes {:.3} and {:.3} are neither separating (>= ln 2) nor settled (< ln 1.5)",
            sign * d1,
            sign * d2
        )))
    }
}

struct Distances {
    /// `d[k][a][b]` over the last three samples.
    d: Vec<Vec<Vec<f64>>>,
    mult: Vec<u32>,
}

impl Distances {
    fn new(s: &DegenerationScenario) -> Self {
        let tail = &s.samples[s.samples.len() - 3..];
        let d = tail
            .iter()
            .map(|c| {
                let pts: Vec<HPoint> = c.points().collect();
                pts.iter().map(|p| pts.iter().map(|q| dist_h(p, q)).collect()).collect()
            })
            .collect();
        Self { d, mult: s.samples[0].multiplicities() }
    }

    fn last(&self, a: usize, b: usize) -> f64 {
        self.d[2][a][b]
    }

    fn series(&self, f: impl Fn(&Vec<Vec<f64>>) -> f64) -> Vec<f64> {
        self.d.iter().map(f).collect()
    }

    fn multiplicity(&self, pts: &[usize]) -> u32 {
        pts.iter().map(|&i| self.mult[i]).sum()
    }

    /// Whether `a` and `b` drift apart to the boundary, measured on
    /// `ln(e^d − 1)`, which tracks `ln d` for close pairs and `d` for far ones.
    fn diverging(&self, a: usize, b: usize) -> Result<bool> {
        let s = self.series(|d| d[a][b].exp_m1().ln());
        Ok(trend(&s, 1.0, &format!("distance between points {a} and {b}"))? == Trend::Separating)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Collisions measured against the fixed hyperbolic scale.
    Top,
    /// Sub-clusters measured against the cluster's own scale.
    Rescaled,
}

/// Groups of `pts` that collapse relative to the rest. Candidates come from
/// cutting the final-sample single-linkage tree top down; the first
/// candidate whose internal/external ratio keeps shrinking wins.
fn collision_partition(dist: &Distances, pts: &[usize], mode: Mode) -> Result<Vec<Vec<usize>>> {
    if pts.len() == 1 {
        return Ok(vec![pts.to_vec()]);
    }
    // Kruskal on the final sample
    let mut edges: Vec<(f64, usize, usize)> = Vec::new();
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            edges.push((dist.last(a, b), a, b));
        }
    }
    edges.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut comp: Vec<usize> = (0..dist.mult.len()).collect();
    let find = |comp: &mut Vec<usize>, mut x: usize| {
        while comp[x] != x {
            comp[x] = comp[comp[x]];
            x = comp[x];
        }
        x
    };
    let mut mst = Vec::new();
    for &(w, a, b) in &edges {
        let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
        if ra != rb {
            comp[ra] = rb;
            mst.push((w, a, b));
        }
    }
    // largest edges first
    mst.reverse();

    let first_cut = if mode == Mode::Top { 0 } else { 1 };
    for cut in first_cut..mst.len() {
        let groups = components(pts, &mst[cut..]);
        let internal = dist.series(|d| {
            groups
                .iter()
                .flat_map(|g| g.iter().flat_map(move |&a| g.iter().map(move |&b| d[a][b])))
                .fold(0.0, f64::max)
        });
        let external = dist.series(|d| {
            let mut m = f64::INFINITY;
            for (i, g) in groups.iter().enumerate() {
                for h in &groups[i + 1..] {
                    for &a in g {
                        for &b in h {
                            m = m.min(d[a][b]);
                        }
                    }
                }
            }
            m
        });
        let log_ratio: Vec<f64> = internal
            .iter()
            .zip(&external)
            .map(|(i, e)| match mode {
                Mode::Top => (i / e.min(1.0)).ln(),
                Mode::Rescaled => (i / e).ln(),
            })
            .collect();
        let what = format!("cluster candidate {groups:?}");
        if trend(&log_ratio, -1.0, &what)? == Trend::Separating {
            return Ok(groups);
        }
    }
    Ok(pts.iter().map(|&p| vec![p]).collect())
}

fn components(pts: &[usize], edges: &[(f64, usize, usize)]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = pts.iter().map(|&p| vec![p]).collect();
    for &(_, a, b) in edges {
        let ia = groups.iter().position(|g| g.contains(&a)).unwrap();
        let ib = groups.iter().position(|g| g.contains(&b)).unwrap();
        if ia != ib {
            let moved = groups.remove(ia.max(ib));
            groups[ia.min(ib)].extend(moved);
        }
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups.sort();
    groups
}

fn neck(m: u32, child: BubbleNode) -> Result<BubbleNode> {
    let (points, mult) = (child.points.clone(), child.multiplicity);
    BubbleNode::new(BubbleKind::NeckR4ModZm(m), points, mult, vec![child])
}

fn gh_subtree(dist: &Distances, pts: &[usize]) -> Result<BubbleNode> {
    let groups = collision_partition(dist, pts, Mode::Rescaled)?;
    let ms: Vec<u32> = groups.iter().map(|g| dist.multiplicity(g)).collect();
    let mut children = Vec::new();
    for (g, &m) in groups.iter().zip(&ms) {
        if g.len() > 1 {
            children.push(neck(m, gh_subtree(dist, g)?)?);
        }
    }
    let kind = if ms == [1, 1] {
        BubbleKind::EguchiHanson
    } else {
        BubbleKind::GibbonsHawkingOrbifold(ms)
    };
    BubbleNode::new(kind, pts.to_vec(), dist.multiplicity(pts), children)
}

fn lebrun(dist: &Distances, pts: &[usize], compact: bool) -> Result<BubbleNode> {
    let base = pts[0];
    let mut near = Vec::new();
    let mut far = Vec::new();
    for &p in pts {
        if p == base || !dist.diverging(base, p)? {
            near.push(p);
        } else {
            far.push(p);
        }
    }

    let groups = collision_partition(dist, &near, Mode::Top)?;
    let ms: Vec<u32> = groups.iter().map(|g| dist.multiplicity(g)).collect();
    let mut children = Vec::new();
    for (g, &m) in groups.iter().zip(&ms) {
        if g.len() > 1 {
            children.push(neck(m, gh_subtree(dist, g)?)?);
        }
    }

    // far points that stay together bubble off as one asymptotically flat space
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for &p in &far {
        let mut joined: Vec<usize> = Vec::new();
        for (i, c) in comps.iter().enumerate() {
            let mut linked = false;
            for &q in c {
                if !dist.diverging(p, q)? {
                    linked = true;
                    break;
                }
            }
            if linked {
                joined.push(i);
            }
        }
        let mut merged = vec![p];
        for &i in joined.iter().rev() {
            merged.extend(comps.remove(i));
        }
        merged.sort_unstable();
        comps.push(merged);
    }
    comps.sort();
    for c in &comps {
        children.push(neck(1, lebrun(dist, c, false)?)?);
    }

    let kind = if compact { BubbleKind::CompactLeBrunOrbifold(ms) } else { BubbleKind::LeBrunAF(ms) };
    BubbleNode::new(kind, pts.to_vec(), dist.multiplicity(pts), children)
}

/// The bubble tree of a degenerating family, rooted at the compact LeBrun
/// orbifold seen from the first point.
pub fn predict_tree(scenario: &DegenerationScenario) -> Result<BubbleNode> {
    let dist = Distances::new(scenario);
    let all: Vec<usize> = (0..dist.mult.len()).collect();
    lebrun(&dist, &all, true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerRow {
    /// Child indices from the root, `/`-separated.
    pub path: String,
    pub kind: String,
    pub budget: CharBudget,
    pub identities_hold: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyCheck {
    #[serde(with = "super::budget::ratio_str")]
    pub total: Q,
    #[serde(with = "super::budget::ratio_str")]
    pub expected: Q,
    pub holds: bool,
    pub ledger: Vec<LedgerRow>,
}

/// Sums `∫|W⁺|²` over every node (necks contribute nothing) and compares
/// with `12n π²`.
pub fn tree_energy_check(tree: &BubbleNode, n: u32) -> EnergyCheck {
    let mut ledger = Vec::new();
    collect(tree, String::from("0"), &mut ledger);
    let total: Q = ledger.iter().map(|r| r.budget.w2plus).sum();
    let expected = Q::from_integer(12 * i64::from(n));
    let holds = total == expected && ledger.iter().all(|r| r.identities_hold);
    EnergyCheck { total, expected, holds, ledger }
}

fn collect(node: &BubbleNode, path: String, out: &mut Vec<LedgerRow>) {
    let b = &node.budget;
    out.push(LedgerRow {
        path: path.clone(),
        kind: node.kind.label(),
        budget: b.clone(),
        identities_hold: b.signature_holds() && b.gauss_bonnet_holds(),
    });
    for (i, c) in node.children.iter().enumerate() {
        collect(c, format!("{path}/{i}"), out);
    }
}

/// Budget ledger as CSV: `path,kind,chi,tau,w2plus,sigma2,group_orders`.
pub fn write_ledger_csv<W: Write>(check: &EnergyCheck, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Config(format!("writing ledger: {e}"));
    out.write_record(["path", "kind", "chi", "tau", "w2plus", "sigma2", "group_orders"]).map_err(io)?;
    for r in &check.ledger {
        let b = &r.budget;
        let orders = b.group_orders().iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        out.write_record([
            r.path.clone(),
            r.kind.clone(),
            b.chi.to_string(),
            b.tau.to_string(),
            b.w2plus.to_string(),
            b.sigma2.to_string(),
            orders,
        ])
        .map_err(io)?;
    }
    out.write_record(["total", "", "", "", &check.total.to_string(), "", ""]).map_err(io)?;
    out.flush().map_err(|e| Error::Config(format!("writing ledger: {e}")))?;
    Ok(())
}
