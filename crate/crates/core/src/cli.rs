//! Run configuration, command dispatch and report/CSV emission.
//!
//! A run is described by a TOML document:
//!
//! ```toml
//! command = "energy"
//! gauge = "hyperbolic"
//! test_function = "neg-dist"
//!
//! [[monopole]]
//! x = 0.0
//! y = 0.0
//! z = 1.0
//! multiplicity = 1
//!
//! [quadrature]
//! tol = 1e-7
//! ```
//!
//! `distance = d` may replace the monopole list; it expands to the symmetric
//! pair `(0,0,e^{d/2}), (0,0,e^{−d/2})`.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::conformal::{Gauge, TestConformal};
use crate::degeneration::{
    self, budget_gh, budget_ncp2, budget_oln, conservation_check, predict_tree, tree_energy_check, CharBudget,
    DegenerationScenario,
};
use crate::error::{Error, Result};
use crate::hgeom::{HPoint, MonopoleConfig};
use crate::ode::{self, Classification, ScanVerdict, ShootOptions};
use crate::yamabe::{self, QuadratureSpec, Relation, Scheme, YamabeReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Energy,
    Bounds,
    Integrals,
    OdeScan,
    Budgets,
    Tree,
    Sweep,
}

impl std::str::FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "energy" => Command::Energy,
            "bounds" => Command::Bounds,
            "integrals" => Command::Integrals,
            "ode-scan" => Command::OdeScan,
            "budgets" => Command::Budgets,
            "tree" => Command::Tree,
            "sweep" => Command::Sweep,
            other => return Err(Error::Config(format!("unknown command `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFamily {
    /// `f = −ρ_{p₁}`.
    #[default]
    NegDist,
    AvgNegDist,
    LogU,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonopoleEntry {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    #[serde(default = "one")]
    pub multiplicity: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    pub rho_max: f64,
    pub tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self { scheme: q.scheme, rho_max: q.rho_max, tol: q.tol, max_panels: q.max_panels }
    }
}

impl QuadratureSection {
    pub fn spec(&self) -> QuadratureSpec {
        QuadratureSpec { scheme: self.scheme, rho_max: self.rho_max, tol: self.tol, max_panels: self.max_panels }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OdeSection {
    pub n: u32,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub count: usize,
    pub r_max: f64,
}

impl Default for OdeSection {
    fn default() -> Self {
        Self { n: 3, lambda_min: 0.1, lambda_max: 100.0, count: 60, r_max: 1e3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetSection {
    pub n: u32,
}

impl Default for BudgetSection {
    fn default() -> Self {
        Self { n: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// Swept parameter; only the pair distance `d` is supported.
    pub parameter: SweepParameter,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    #[default]
    Distance,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { parameter: SweepParameter::Distance, min: 0.05, max: 10.0, count: 20, spacing: Spacing::Linear }
    }
}

impl SweepSection {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count < 2 || !(self.min > 0.0 && self.max > self.min) {
            return Err(Error::Config("sweep: need 0 < min < max and count >= 2".into()));
        }
        Ok(match self.spacing {
            Spacing::Log => ode::log_grid(self.min, self.max, self.count)?,
            Spacing::Linear => (0..self.count)
                .map(|i| self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64)
                .collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeExample {
    #[default]
    NestedCollision,
    BoundaryPair,
    NoDegeneration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeSample {
    pub parameter: f64,
    /// `[x, y, z]` per monopole, in the same order in every sample.
    pub points: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TreeSection {
    pub example: TreeExample,
    pub parameters: Vec<f64>,
    /// Explicit family; overrides `example` when nonempty.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sample: Vec<TreeSample>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub multiplicities: Vec<u32>,
}

impl Default for TreeSection {
    fn default() -> Self {
        Self {
            example: TreeExample::NestedCollision,
            parameters: degeneration::default_parameters(),
            sample: Vec::new(),
            multiplicities: Vec::new(),
        }
    }
}

impl TreeSection {
    pub fn scenario(&self) -> Result<DegenerationScenario> {
        if self.sample.is_empty() {
            return match self.example {
                TreeExample::NestedCollision => degeneration::nested_collision(&self.parameters),
                TreeExample::BoundaryPair => degeneration::boundary_pair(&self.parameters),
                TreeExample::NoDegeneration => degeneration::no_degeneration(&self.parameters),
            };
        }
        let mut params = Vec::new();
        let mut samples = Vec::new();
        for (k, s) in self.sample.iter().enumerate() {
            let ms = if self.multiplicities.is_empty() { vec![1; s.points.len()] } else { self.multiplicities.clone() };
            if ms.len() != s.points.len() {
                return Err(Error::Config(format!("tree.sample[{k}]: multiplicities and points differ in length")));
            }
            let entries = s
                .points
                .iter()
                .zip(ms)
                .map(|(p, m)| Ok((HPoint::new(p[0], p[1], p[2])?, m)))
                .collect::<Result<Vec<_>>>()
                .and_then(MonopoleConfig::new)
                .map_err(|e| Error::Config(format!("tree.sample[{k}]: {e}")))?;
            params.push(s.parameter);
            samples.push(entries);
        }
        DegenerationScenario::new(params, samples)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default = "hyperbolic")]
    pub gauge: Gauge,
    #[serde(default)]
    pub test_function: TestFamily,
    /// Expanded into `monopole` by [`parse_config`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub monopole: Vec<MonopoleEntry>,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub ode: OdeSection,
    #[serde(default)]
    pub budgets: BudgetSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub tree: TreeSection,
}

fn hyperbolic() -> Gauge {
    Gauge::Hyperbolic
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            gauge: Gauge::Hyperbolic,
            test_function: TestFamily::NegDist,
            distance: None,
            output: None,
            monopole: Vec::new(),
            quadrature: QuadratureSection::default(),
            ode: OdeSection::default(),
            budgets: BudgetSection::default(),
            sweep: SweepSection::default(),
            tree: TreeSection::default(),
        }
    }

    pub fn monopoles(&self) -> Result<MonopoleConfig> {
        let mut entries = Vec::with_capacity(self.monopole.len());
        for (i, m) in self.monopole.iter().enumerate() {
            let p = HPoint::new(m.x, m.y, m.z).map_err(|e| Error::Config(format!("monopole[{i}]: {e}")))?;
            entries.push((p, m.multiplicity));
        }
        MonopoleConfig::new(entries).map_err(|e| Error::Config(format!("monopole list: {e}")))
    }

    pub fn test_conformal(&self, config: &MonopoleConfig) -> Result<TestConformal> {
        Ok(match self.test_function {
            TestFamily::NegDist => TestConformal::NegDist(config.points().next().unwrap_or(HPoint::origin())),
            TestFamily::AvgNegDist => TestConformal::avg_neg_dist(config)?,
            TestFamily::LogU => TestConformal::LogU,
        })
    }

    /// Expands `distance` and checks every section against the preconditions
    /// of the operation it feeds.
    pub fn validate(&mut self) -> Result<()> {
        if let Some(d) = self.distance.take() {
            if !self.monopole.is_empty() {
                return Err(Error::Config("give either `distance` or `monopole` entries, not both".into()));
            }
            let pair = MonopoleConfig::symmetric_pair(d).map_err(|e| Error::Config(format!("distance: {e}")))?;
            self.monopole = pair
                .entries()
                .iter()
                .map(|(p, m)| MonopoleEntry { x: p.x(), y: p.y(), z: p.z(), multiplicity: *m })
                .collect();
        }
        for (i, m) in self.monopole.iter().enumerate() {
            if m.multiplicity < 1 {
                return Err(Error::Config(format!("monopole[{i}]: multiplicity must be at least 1")));
            }
            if !(m.z > 0.0) || !m.x.is_finite() || !m.y.is_finite() || !m.z.is_finite() {
                return Err(Error::Config(format!("monopole[{i}]: z must be positive and coordinates finite")));
            }
        }
        let config = self.monopoles()?;
        self.quadrature.spec().validate().map_err(|e| Error::Config(format!("quadrature: {e}")))?;
        match self.command {
            Command::Energy if self.test_function == TestFamily::AvgNegDist && config.is_empty() => {
                return Err(Error::Config("test_function avg-neg-dist needs at least one monopole".into()));
            }
            Command::Bounds if config.is_empty() => {
                return Err(Error::Config("bounds: needs at least one monopole for the existence test".into()));
            }
            Command::OdeScan => {
                if self.ode.n < 1 {
                    return Err(Error::Config("ode.n must be at least 1".into()));
                }
                ode::log_grid(self.ode.lambda_min, self.ode.lambda_max, self.ode.count)
                    .map_err(|e| Error::Config(format!("ode: {e}")))?;
                if !(self.ode.r_max >= 100.0) {
                    return Err(Error::Config("ode.r_max must be at least 100".into()));
                }
            }
            Command::Budgets if self.budgets.n < 1 => {
                return Err(Error::Config("budgets.n must be at least 1".into()));
            }
            Command::Sweep => {
                self.sweep.values()?;
            }
            Command::Tree => {
                self.tree.scenario().map_err(|e| Error::Config(format!("tree: {e}")))?;
            }
            _ => {}
        }
        Ok(())
    }
}

/// Parses and validates a TOML run description.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn serialize_config(cfg: &RunConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::Config(format!("serializing: {e}")))
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: String,
    pub csv: Option<String>,
}

fn e17(x: f64) -> String {
    format!("{x:.16e}")
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Config(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(format!("csv: {e}")))
}

/// Executes a validated configuration.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let context = |e: Error| match e {
        Error::Config(_) => e,
        other => Error::Config(format!("{:?}: {other}", cfg.command)),
    };
    match cfg.command {
        Command::Energy => run_energy(cfg),
        Command::Bounds => run_bounds(cfg),
        Command::Integrals => run_integrals(cfg),
        Command::OdeScan => run_ode_scan(cfg),
        Command::Budgets => run_budgets(cfg),
        Command::Tree => run_tree(cfg),
        Command::Sweep => run_sweep(cfg),
    }
    .map_err(context)
}

fn write_comparisons(out: &mut String, r: &YamabeReport) {
    for c in &r.comparisons {
        let rel = match c.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Equals => "==",
        };
        let _ = writeln!(
            out,
            "  energy {rel} {} = {:.10}  (energy {:.10} +/- {:.1e})  {}",
            c.name,
            c.bound,
            r.energy,
            r.energy_error,
            pass(c.satisfied)
        );
    }
}

fn report_row(r: &YamabeReport) -> Vec<String> {
    vec![
        r.gauge.name().into(),
        r.scheme.name().into(),
        e17(r.energy),
        e17(r.energy_error),
        e17(r.numerator),
        e17(r.numerator_error),
        e17(r.volume),
        e17(r.volume_error),
        e17(r.tail_bound),
    ]
}

const REPORT_HEADER: [&str; 9] = [
    "gauge",
    "scheme",
    "energy",
    "energy_error",
    "numerator",
    "numerator_error",
    "volume",
    "volume_error",
    "tail_bound",
];

fn run_energy(cfg: &RunConfig) -> Result<RunOutput> {
    let config = cfg.monopoles()?;
    let spec = cfg.quadrature.spec();
    let r = match cfg.gauge {
        Gauge::Hyperbolic => yamabe::energy_hyp_gauge(&config, &cfg.test_conformal(&config)?, &spec)?,
        Gauge::ScalarFlat => yamabe::energy_flat_gauge(&config, &spec)?,
    };
    let mut out = String::new();
    let _ = writeln!(out, "test energy (an upper bound for the Yamabe invariant, not a minimized value)");
    let _ = writeln!(out, "  points: {}  total multiplicity: {}", config.len(), config.total_multiplicity());
    let _ = writeln!(out, "  gauge: {}  scheme: {}", r.gauge.name(), r.scheme.name());
    let _ = writeln!(out, "  energy    = {:.12} +/- {:.1e}", r.energy, r.energy_error);
    let _ = writeln!(out, "  int R dV  = {:.12} +/- {:.1e}", r.numerator, r.numerator_error);
    let _ = writeln!(out, "  volume    = {:.12} +/- {:.1e}", r.volume, r.volume_error);
    let _ = writeln!(out, "  tail bound (rho > {}) = {:.1e}", cfg.quadrature.rho_max, r.tail_bound);
    write_comparisons(&mut out, &r);

    let mut header: Vec<&str> = REPORT_HEADER.to_vec();
    let mut row = report_row(&r);
    let names: Vec<String> = r.comparisons.iter().flat_map(|c| [format!("bound:{}", c.name), format!("pass:{}", c.name)]).collect();
    header.extend(names.iter().map(String::as_str));
    for c in &r.comparisons {
        row.push(e17(c.bound));
        row.push(c.satisfied.to_string());
    }
    Ok(RunOutput { report: out, csv: Some(csv_string(&header, &[row])?) })
}

fn run_bounds(cfg: &RunConfig) -> Result<RunOutput> {
    let config = cfg.monopoles()?;
    let ms = config.multiplicities();
    let mut out = String::new();
    let mut rows = Vec::new();
    let _ = writeln!(out, "closed-form bounds");
    let push = |out: &mut String, rows: &mut Vec<Vec<String>>, name: &str, arg: u32, v: f64| {
        let _ = writeln!(out, "  {name}({arg}) = {v:.12}");
        rows.push(vec![name.to_string(), arg.to_string(), e17(v)]);
    };
    push(&mut out, &mut rows, "sphere", 4, yamabe::sphere_yamabe());
    push(&mut out, &mut rows, "cp2", 2, yamabe::cp2_yamabe());
    let max_m = ms.iter().copied().max().unwrap_or(1).max(3);
    for m in 1..=max_m {
        push(&mut out, &mut rows, "orbifold", m, yamabe::bound_orbifold(m)?);
    }
    for n in 0..=3 {
        push(&mut out, &mut rows, "selfdual_lower", n, yamabe::bound_selfdual_lower(n)?);
    }
    let total: u32 = ms.iter().sum();
    push(&mut out, &mut rows, "single_point_energy", total, yamabe::single_point_energy(total));
    let verdict = yamabe::orbifold_existence_test(&ms)?;
    let _ = writeln!(
        out,
        "existence test for multiplicities {ms:?} (N = {total}, threshold 4(N+2)/9 = {:.6}): {verdict:?}",
        4.0 * f64::from(total + 2) / 9.0
    );
    Ok(RunOutput { report: out, csv: Some(csv_string(&["bound", "argument", "value"], &rows)?) })
}

fn run_integrals(cfg: &RunConfig) -> Result<RunOutput> {
    let rows = yamabe::closed_form_integrals(&cfg.quadrature.spec())?;
    let mut out = String::from("radial integrals against closed forms (relative error target 1e-6)\n");
    let mut csv_rows = Vec::new();
    for r in &rows {
        let _ = writeln!(
            out,
            "  {:<24} N={}  quadrature {:.15} +/- {:.1e}  exact {:.15}  rel err {:.1e}  {}",
            r.label,
            r.multiplicity,
            r.quadrature,
            r.error_estimate,
            r.exact,
            r.relative_error,
            pass(r.relative_error < 1e-6)
        );
        csv_rows.push(vec![
            r.label.clone(),
            r.multiplicity.to_string(),
            e17(r.quadrature),
            e17(r.error_estimate),
            e17(r.exact),
            e17(r.relative_error),
        ]);
    }
    let header = ["integral", "n", "quadrature", "error_estimate", "exact", "relative_error"];
    Ok(RunOutput { report: out, csv: Some(csv_string(&header, &csv_rows)?) })
}

fn run_ode_scan(cfg: &RunConfig) -> Result<RunOutput> {
    let o = &cfg.ode;
    let grid = ode::log_grid(o.lambda_min, o.lambda_max, o.count)?;
    let opts = ShootOptions { r_max: o.r_max, ..Default::default() };
    let rep = ode::scan(o.n, &grid, &opts)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "radial shooting on O(-{}) over {} log-spaced lambda in [{}, {}] (numerical evidence, not a proof)",
        o.n, o.count, o.lambda_min, o.lambda_max
    );
    let _ = writeln!(out, "  grid: {}", grid.iter().map(|l| format!("{l:.4}")).collect::<Vec<_>>().join(" "));
    let mut rows = Vec::new();
    for (l, c) in grid.iter().zip(&rep.classes) {
        let detail = match c {
            Classification::DecaysQuadratically { limit } => e17(*limit),
            Classification::HitsZero { at } => e17(*at),
            _ => String::new(),
        };
        rows.push(vec![e17(*l), c.name().into(), detail]);
    }
    for (b, c) in &rep.refinements {
        let _ = writeln!(out, "  refined bracket [{:.12}, {:.12}] -> {}", b[0], b[1], c.name());
    }
    match rep.verdict {
        ScanVerdict::AdmissibleFound { lambda, bracket } => {
            let _ = writeln!(
                out,
                "  verdict: AdmissibleFound lambda* = {lambda:.12} (bracket width {:.1e}, ODE local tolerance {:.0e})",
                bracket[1] - bracket[0],
                opts.rtol
            );
        }
        ScanVerdict::NoneOnGrid => {
            let _ = writeln!(out, "  verdict: NoneOnGrid (ODE local tolerance {:.0e})", opts.rtol);
        }
    }
    if let Some(rs) = ode::sign_change_radius(o.n) {
        let _ = writeln!(
            out,
            "  concavity past r = {rs:.6}: {} violation(s)  {}",
            rep.concavity_violations.len(),
            pass(rep.concavity_violations.is_empty())
        );
    }
    Ok(RunOutput { report: out, csv: Some(csv_string(&["lambda", "classification", "detail"], &rows)?) })
}

fn budget_row(name: &str, n: u32, b: &CharBudget) -> Vec<String> {
    vec![
        name.into(),
        n.to_string(),
        b.chi.to_string(),
        b.tau.to_string(),
        b.w2plus.to_string(),
        b.sigma2.to_string(),
        (b.signature_holds() && b.gauss_bonnet_holds()).to_string(),
    ]
}

fn run_budgets(cfg: &RunConfig) -> Result<RunOutput> {
    let n = cfg.budgets.n;
    let mut out = format!("characteristic budgets for n = {n} (curvature integrals in units of pi^2)\n");
    let mut rows = Vec::new();
    let ncp2 = budget_ncp2(n);
    let oln = budget_oln(n)?;
    let gh = budget_gh(n)?;
    for (name, b) in [("ncp2", &ncp2), ("oln", &oln), ("gh", &gh)] {
        let ok = b.signature_holds() && b.gauss_bonnet_holds();
        let _ = writeln!(
            out,
            "  {name:<5} chi = {}  tau = {}  int|W+|^2 = {} pi^2  4 int sigma2 = {} pi^2  identities {}",
            b.chi,
            b.tau,
            b.w2plus,
            b.sigma2,
            pass(ok)
        );
        rows.push(budget_row(name, n, b));
    }
    let c = conservation_check(n)?;
    let _ = writeln!(out, "  conservation: {} + {} = {} vs 12n = {}  {}", c.gh, c.oln, c.lhs, c.rhs, pass(c.holds));
    rows.push(vec![
        "conservation".into(),
        n.to_string(),
        String::new(),
        String::new(),
        c.lhs.to_string(),
        String::new(),
        c.holds.to_string(),
    ]);
    let header = ["space", "n", "chi", "tau", "w2plus", "sigma2", "identities_hold"];
    Ok(RunOutput { report: out, csv: Some(csv_string(&header, &rows)?) })
}

fn run_tree(cfg: &RunConfig) -> Result<RunOutput> {
    let scenario = cfg.tree.scenario()?;
    let tree = predict_tree(&scenario)?;
    let n = scenario.total_multiplicity();
    let check = tree_energy_check(&tree, n);
    let mut out = String::from("predicted bubble tree\n");
    out.push_str(&tree.to_text());
    let _ = writeln!(
        out,
        "sum of int|W+|^2 over nodes = {} pi^2 vs 12n = {} pi^2  {}",
        check.total,
        check.expected,
        pass(check.holds)
    );
    let mut buf = Vec::new();
    degeneration::write_ledger_csv(&check, &mut buf)?;
    let csv = String::from_utf8(buf).map_err(|e| Error::Config(format!("csv: {e}")))?;
    Ok(RunOutput { report: out, csv: Some(csv) })
}

fn run_sweep(cfg: &RunConfig) -> Result<RunOutput> {
    let ds = cfg.sweep.values()?;
    let samples = yamabe::two_point_sweep(&ds, cfg.gauge, &cfg.quadrature.spec())?;
    let mut out = format!(
        "two-point sweep, gauge {}, {} samples of d in [{}, {}] (test energies, upper bounds only)\n",
        cfg.gauge.name(),
        ds.len(),
        cfg.sweep.min,
        cfg.sweep.max
    );
    let names: Vec<String> = samples
        .first()
        .map(|s| s.report.comparisons.iter().map(|c| c.name.clone()).collect())
        .unwrap_or_default();
    let mut header: Vec<String> = ["distance", "ceiling", "gap"].map(String::from).to_vec();
    header.extend(REPORT_HEADER.iter().map(|s| s.to_string()));
    for n in &names {
        header.push(format!("bound:{n}"));
        header.push(format!("pass:{n}"));
    }
    let mut rows = Vec::new();
    let mut all_below = true;
    for s in &samples {
        all_below &= s.gap > 0.0;
        let _ = writeln!(
            out,
            "  d = {:<8.4} energy {:.10} +/- {:.1e}  gap to {:.6} = {:.3e}  {}",
            s.distance,
            s.report.energy,
            s.report.energy_error,
            s.ceiling,
            s.gap,
            pass(s.gap > 0.0)
        );
        let mut row = vec![e17(s.distance), e17(s.ceiling), e17(s.gap)];
        row.extend(report_row(&s.report));
        for c in &s.report.comparisons {
            row.push(e17(c.bound));
            row.push(c.satisfied.to_string());
        }
        rows.push(row);
    }
    let _ = writeln!(out, "  all samples strictly below the ceiling: {}", pass(all_below));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    Ok(RunOutput { report: out, csv: Some(csv_string(&header, &rows)?) })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_POINT: &str = r#"
command = "energy"

[[monopole]]
x = 0.0
y = 0.0
z = 1.0
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(ONE_POINT).unwrap();
        assert_eq!(cfg.gauge, Gauge::Hyperbolic);
        assert_eq!(cfg.test_function, TestFamily::NegDist);
        assert_eq!(cfg.monopole[0].multiplicity, 1);
        let mc = cfg.monopoles().unwrap();
        assert_eq!(cfg.test_conformal(&mc).unwrap(), TestConformal::NegDist(HPoint::origin()));
        assert_eq!(cfg.quadrature.spec(), QuadratureSpec::default());
    }

    #[test]
    fn distance_expands_to_symmetric_pair() {
        let cfg = parse_config("command = \"energy\"\ndistance = 2.0\n").unwrap();
        assert_eq!(cfg.distance, None);
        assert_eq!(cfg.monopole.len(), 2);
        let zs: Vec<f64> = cfg.monopole.iter().map(|m| m.z).collect();
        // oracle: r₀ = e^{d/2}
        assert!((zs[0] - 1f64.exp()).abs() < 1e-15 && (zs[1] - (-1f64).exp()).abs() < 1e-15, "{zs:?}");
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad_mult = "command = \"energy\"\n[[monopole]]\nx = 0.0\ny = 0.0\nz = 1.0\n[[monopole]]\nx = 1.0\ny = 0.0\nz = 1.0\nmultiplicity = 0\n";
        let e = parse_config(bad_mult).unwrap_err().to_string();
        assert!(e.contains("monopole[1]"), "{e}");
        let bad_z = "command = \"energy\"\n[[monopole]]\nx = 0.0\ny = 0.0\nz = -1.0\n";
        assert!(parse_config(bad_z).unwrap_err().to_string().contains("monopole[0]"));
        let unknown = "command = \"energy\"\ncolour = 3\n";
        assert!(parse_config(unknown).unwrap_err().to_string().contains("colour"));
        let dup = "command = \"energy\"\n[[monopole]]\nx = 0.0\ny = 0.0\nz = 1.0\n[[monopole]]\nx = 0.0\ny = 0.0\nz = 1.0\n";
        assert!(parse_config(dup).unwrap_err().to_string().contains("coincide"));
        let bad_tol = "command = \"energy\"\n[quadrature]\ntol = 0.1\n";
        assert!(parse_config(bad_tol).unwrap_err().to_string().contains("quadrature"));
    }

    #[test]
    fn round_trip() {
        for text in [
            ONE_POINT,
            "command = \"sweep\"\ngauge = \"scalar-flat\"\n[sweep]\nmin = 0.1\nmax = 3.0\ncount = 4\nspacing = \"log\"\n",
            "command = \"ode-scan\"\noutput = \"scan.csv\"\n[ode]\nn = 4\n",
            "command = \"tree\"\n[tree]\nexample = \"boundary-pair\"\n",
            "command = \"energy\"\ndistance = 0.7\ntest_function = \"log-u\"\n[quadrature]\nscheme = \"tensor-3d\"\n",
        ] {
            let c = parse_config(text).unwrap();
            let s = serialize_config(&c).unwrap();
            assert_eq!(parse_config(&s).unwrap(), c, "{s}");
        }
    }

    #[test]
    fn explicit_tree_samples() {
        let mut text = String::from("command = \"tree\"\n[tree]\nmultiplicities = [1, 1]\n");
        for j in [4.0f64, 16.0, 64.0, 256.0] {
            text.push_str(&format!("[[tree.sample]]\nparameter = {j}\npoints = [[0.0, 0.0, 1.0], [{}, 0.0, 1.0]]\n", 1.0 / j));
        }
        let cfg = parse_config(&text).unwrap();
        let out = run(&cfg).unwrap();
        assert!(out.report.contains("LeBrun(2)"), "{}", out.report);
        assert!(out.report.contains("EguchiHanson"));
    }

    #[test]
    fn budgets_report() {
        let out = run(&parse_config("command = \"budgets\"\n[budgets]\nn = 2\n").unwrap()).unwrap();
        assert!(out.report.contains("ncp2  chi = 4  tau = 2  int|W+|^2 = 24 pi^2  4 int sigma2 = 8 pi^2"), "{}", out.report);
        assert!(!out.report.contains("FAIL"));
    }

    #[test]
    fn energy_report_passes_for_one_point() {
        let out = run(&parse_config(ONE_POINT).unwrap()).unwrap();
        assert!(out.report.contains("Y(CP2) = 12*pi*sqrt(2)"));
        assert!(!out.report.contains("FAIL"), "{}", out.report);
        let csv = out.csv.unwrap();
        assert!(csv.starts_with("gauge,scheme,energy,energy_error"));
    }

    #[test]
    fn bounds_report() {
        let cfg = parse_config("command = \"bounds\"\n[[monopole]]\nx = 0.0\ny = 0.0\nz = 1.0\nmultiplicity = 3\n").unwrap();
        let out = run(&cfg).unwrap();
        assert!(out.report.contains("Inconclusive"), "{}", out.report);
    }

    #[test]
    fn sweep_csv_is_thread_count_independent() {
        let cfg = parse_config("command = \"sweep\"\n[sweep]\nmin = 0.5\nmax = 2.0\ncount = 3\n[quadrature]\ntol = 1e-6\n").unwrap();
        let a = run(&cfg).unwrap().csv.unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = one.install(|| run(&cfg).unwrap().csv.unwrap());
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let c = three.install(|| run(&cfg).unwrap().csv.unwrap());
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.lines().count(), 4);
    }
}
