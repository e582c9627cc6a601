//! Scenario files and the commands run over them.
//!
//! A scenario is a TOML document. Only `crossed_module` is required:
//!
//! ```toml
//! name = "flat su2"
//! crossed_module = "IDENTITY(SU2)"
//! dim = 2
//!
//! [[charts]]
//! id = "U"
//! lo = [-1.0, -1.0]
//! hi = [1.0, 1.0]
//! A = { "1,1" = "x2 + 0.3", "3,2" = "0.7" }
//! B = "flat"
//!
//! [paths]
//! diag = { segment = [[0.0, 0.0], [1.0, 1.0]] }
//!
//! [bigons]
//! square = { fixture = "unit-square" }
//!
//! [holonomy]
//! chart = "U"
//! path = "diag"
//! bigon = "square"
//! ```
//!
//! See the `examples/` directory for every section.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cech::{self, CoverNerve, GluingCocycle};
use crate::crossed::{CrossedModule, Mode};
use crate::error::{Error, Result};
use crate::expr;
use crate::form::{flat_partner, Form, FormField, MAX_DIM};
use crate::geometry::{self, Bigon, Path, DEFAULT_SITTING};
use crate::group::{Element, Group, MatrixFamily};
use crate::lie::LieAlgebra;
use crate::linalg::{self, Mat};
use crate::report::{Check, ValidationReport, Verdict};
use crate::rng;
use crate::shipped;
use crate::transport::{self, Domain, GroupMap, LocalConnection, Transition, TripleData, TAU_FAKE};

pub const SCHEMA: u32 = 1;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 50;

/// A Lie-algebra-valued form: components keyed `"a,μ"`, optionally tagged with its algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FormSpec {
    Tagged {
        algebra: String,
        components: BTreeMap<String, String>,
    },
    Components(BTreeMap<String, String>),
}

impl FormSpec {
    fn parts(&self) -> (Option<&str>, &BTreeMap<String, String>) {
        match self {
            FormSpec::Tagged {
                algebra,
                components,
            } => (Some(algebra), components),
            FormSpec::Components(c) => (None, c),
        }
    }
}

/// `B` is either a form or `"flat"`, the partner making the chart fake-flat.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BSpec {
    Keyword(String),
    Form(FormSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<Vec<f64>>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<FormSpec>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<BSpec>,
}

/// `g_ij` written from chart `from` (j) into chart `to` (i).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSpec {
    pub from: String,
    pub to: String,
    /// Factors `[basis index (1-based), coefficient expression]` of `Π exp(c_k e_k)`.
    #[serde(default)]
    pub g: Vec<(usize, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<FormSpec>,
    /// Build the forms of `to` from those of `from` so that both laws hold.
    #[serde(default, skip_serializing_if = "is_false")]
    pub construct: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleSpec {
    pub charts: [String; 3],
    #[serde(default)]
    pub h: Vec<(usize, String)>,
    /// Replace `a_ik` by the solution of the triple a-law.
    #[serde(default, skip_serializing_if = "is_false")]
    pub solve: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum PathSpec {
    Fixture {
        fixture: String,
    },
    Components {
        components: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sitting: Option<f64>,
    },
    Segment {
        segment: [Vec<f64>; 2],
    },
    Compose {
        compose: Vec<String>,
    },
    Reverse {
        reverse: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum BigonSpec {
    Fixture {
        fixture: String,
    },
    Components {
        components: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sitting: Option<[f64; 2]>,
    },
    Sweep {
        sweep: [String; 2],
    },
    Vertical {
        vertical: [String; 2],
    },
    Horizontal {
        horizontal: [String; 2],
    },
    Reparametrize {
        bigon: String,
        phi: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        psi: Option<String>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolonomySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bigon: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NerveSpec {
    Named(String),
    Explicit(CoverNerve),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleSpec {
    #[serde(default)]
    pub g: BTreeMap<String, String>,
    #[serde(default)]
    pub h: BTreeMap<String, String>,
    #[serde(default)]
    pub k: BTreeMap<String, String>,
    /// Fill in `g_ii = k_i = h_iij = h_ijj = 1` where absent.
    #[serde(default, skip_serializing_if = "is_false")]
    pub normalize: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeSpec {
    /// `"path"` or `"surface"`.
    pub op: String,
    pub grids: Vec<usize>,
    /// Accepted range of the fitted order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "tol_target")]
    pub target: f64,
    #[serde(default = "tol_transition")]
    pub transition: f64,
    #[serde(default = "tol_kernel")]
    pub kernel: f64,
    #[serde(default = "tol_oracle")]
    pub oracle: f64,
}

fn tol_target() -> f64 {
    1e-4
}
fn tol_transition() -> f64 {
    1e-9
}
fn tol_kernel() -> f64 {
    1e-8
}
fn tol_oracle() -> f64 {
    1e-6
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            target: tol_target(),
            transition: tol_transition(),
            kernel: tol_kernel(),
            oracle: tol_oracle(),
        }
    }
}

/// A scenario document as written.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossed_module: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub charts: Vec<ChartSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transitions: Vec<TransitionSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub triples: Vec<TripleSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub paths: BTreeMap<String, PathSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bigons: BTreeMap<String, BigonSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<HolonomySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nerve: Option<NerveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<CocycleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classify: Option<ClassifySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converge: Option<ConvergeSpec>,
}

/// Parses a scenario document and resolves every name in it.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let scenario: Scenario = toml::from_str(text).map_err(|e| {
        let at = e
            .span()
            .map(|s| {
                let line = text[..s.start.min(text.len())].matches('\n').count() + 1;
                format!(" (line {line})")
            })
            .unwrap_or_default();
        Error::Config(format!("scenario: {}{at}", e.message().trim()))
    })?;
    scenario.resolve()?;
    Ok(scenario)
}

pub fn load_scenario(path: &std::path::Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text)
}

impl Scenario {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario values serialize")
    }

    /// Builds every declared object, collecting all resolution errors.
    pub fn resolve(&self) -> Result<Resolved> {
        let mut errors = Errors::default();
        let Some(id) = &self.crossed_module else {
            return Err(Error::Config("missing crossed_module".into()));
        };
        let cm = shipped::crossed_module(id)?;
        let dim = self.dim.unwrap_or(2);
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Config(format!(
                "dim must be in 1..={MAX_DIM}, got {dim}"
            )));
        }
        let mut charts = BTreeMap::new();
        let mut order = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        let constructed: Vec<&str> = self
            .transitions
            .iter()
            .filter(|t| t.construct)
            .map(|t| t.to.as_str())
            .collect();
        for spec in &self.charts {
            if !seen.insert(spec.id.as_str()) {
                errors.push(format!("chart `{}` is declared twice", spec.id));
                continue;
            }
            if constructed.contains(&spec.id.as_str()) && (spec.a.is_some() || spec.b.is_some()) {
                errors.push(format!(
                    "chart `{}`: its forms are constructed from a transition and must not be given",
                    spec.id
                ));
            }
            let chart = errors.collect(resolve_chart(
                &cm,
                dim,
                spec,
                constructed.contains(&spec.id.as_str()),
            ));
            if let Some(chart) = chart {
                order.push(spec.id.clone());
                charts.insert(spec.id.clone(), chart);
            }
        }
        let mut transitions = Vec::new();
        for (n, spec) in self.transitions.iter().enumerate() {
            let what = format!("transition {} -> {}", spec.from, spec.to);
            let unknown: Vec<&String> = [&spec.from, &spec.to]
                .into_iter()
                .filter(|c| !seen.contains(c.as_str()))
                .collect();
            if !unknown.is_empty() {
                for c in unknown {
                    errors.push(format!("{what}: unknown chart `{c}`"));
                }
                continue;
            }
            if !charts.contains_key(&spec.from) || !charts.contains_key(&spec.to) {
                continue;
            }
            let built = errors.collect(
                resolve_transition(&cm, dim, spec, &mut charts)
                    .map_err(|e| Error::Config(format!("{what}: {}", msg(&e)))),
            );
            if let Some(t) = built {
                transitions.push((n, t));
            }
        }
        let mut triples = Vec::new();
        for spec in &self.triples {
            let what = format!("triple {}", spec.charts.join(","));
            if let Some(t) = errors.collect(
                resolve_triple(&cm, dim, spec, &self.transitions, &transitions, &charts)
                    .map_err(|e| Error::Config(format!("{what}: {}", msg(&e)))),
            ) {
                if spec.solve {
                    let [i, _, k] = &spec.charts;
                    let slot = self
                        .transitions
                        .iter()
                        .position(|t| &t.to == i && &t.from == k);
                    if let Some(entry) = transitions.iter_mut().find(|(n, _)| Some(*n) == slot) {
                        entry.1 .2.a = t.1.ik.a.clone();
                    }
                }
                triples.push(t);
            }
        }
        let mut paths = BTreeMap::new();
        for name in self.paths.keys() {
            if let Some(p) = errors.collect(self.build_path(name, dim)) {
                paths.insert(name.clone(), p);
            }
        }
        let mut bigons = BTreeMap::new();
        for name in self.bigons.keys() {
            if let Some(b) = errors.collect(self.build_bigon(name, dim)) {
                bigons.insert(name.clone(), b);
            }
        }
        let hol = self.holonomy.clone().unwrap_or_default();
        if let Some(c) = &hol.chart {
            if !self.charts.iter().any(|s| &s.id == c) {
                errors.push(format!("holonomy: unknown chart `{c}`"));
            }
        }
        if let Some(p) = &hol.path {
            errors.collect(self.build_path(p, dim));
        }
        if let Some(b) = &hol.bigon {
            errors.collect(self.build_bigon(b, dim));
        }
        let nerve = match &self.nerve {
            None => None,
            Some(spec) => errors.collect(resolve_nerve(spec)),
        };
        let cocycle = match (&self.cocycle, &nerve) {
            (None, _) => None,
            (Some(_), None) => {
                errors.push("cocycle data given without a nerve".into());
                None
            }
            (Some(spec), Some(nerve)) => errors.collect(resolve_cocycle(&cm, nerve, spec)),
        };
        if let Some(c) = &self.converge {
            if c.op != "path" && c.op != "surface" {
                errors.push(format!(
                    "converge: op must be `path` or `surface`, got `{}`",
                    c.op
                ));
            }
            if c.grids.len() < 2 {
                errors.push("converge: at least two grids are needed".into());
            }
            if c.op == "surface" && c.grids.iter().any(|g| *g < 4 || g % 2 == 1) {
                errors.push("converge: surface grids must be even and at least 4".into());
            }
        }
        errors.finish()?;
        Ok(Resolved {
            cm,
            dim,
            charts,
            chart_order: order,
            transitions: transitions.into_iter().map(|(_, t)| t).collect(),
            triples,
            paths,
            bigons,
            nerve,
            cocycle,
        })
    }

    fn build_path(&self, name: &str, dim: usize) -> Result<Path> {
        self.path_at(name, dim, 0)
            .map_err(|e| Error::Config(format!("path `{name}`: {}", msg(&e))))
    }

    fn path_at(&self, name: &str, dim: usize, depth: usize) -> Result<Path> {
        if depth > 32 {
            return Err(Error::Config("the definition refers to itself".to_string()));
        }
        let Some(spec) = self.paths.get(name) else {
            return geometry::fixture_path(name, dim)
                .map_err(|_| Error::Config(format!("unknown path `{name}`")));
        };
        let path = match spec {
            PathSpec::Fixture { fixture } => geometry::fixture_path(fixture, dim),
            PathSpec::Components {
                components,
                sitting,
            } => {
                let refs: Vec<&str> = components.iter().map(String::as_str).collect();
                check_len(components.len(), dim)
                    .and_then(|_| Path::parse(&refs, sitting.unwrap_or(DEFAULT_SITTING)))
            }
            PathSpec::Segment { segment } => check_len(segment[0].len(), dim)
                .and_then(|_| check_len(segment[1].len(), dim))
                .and_then(|_| Path::segment(&segment[0], &segment[1], DEFAULT_SITTING)),
            PathSpec::Compose { compose } => {
                let mut parts = compose.iter().map(|p| self.path_at(p, dim, depth + 1));
                let first = parts.next().unwrap_or_else(|| {
                    Err(Error::Config("compose needs at least one path".into()))
                })?;
                parts.try_fold(first, |acc, p| acc.compose(&p?))
            }
            PathSpec::Reverse { reverse } => {
                self.path_at(reverse, dim, depth + 1).map(|p| p.reverse())
            }
        };
        path
    }

    fn build_bigon(&self, name: &str, dim: usize) -> Result<Bigon> {
        self.bigon_at(name, dim, 0)
            .map_err(|e| Error::Config(format!("bigon `{name}`: {}", msg(&e))))
    }

    fn bigon_at(&self, name: &str, dim: usize, depth: usize) -> Result<Bigon> {
        if depth > 32 {
            return Err(Error::Config("the definition refers to itself".to_string()));
        }
        let Some(spec) = self.bigons.get(name) else {
            return geometry::fixture_bigon(name, dim)
                .map_err(|_| Error::Config(format!("unknown bigon `{name}`")));
        };
        let bigon = match spec {
            BigonSpec::Fixture { fixture } => geometry::fixture_bigon(fixture, dim),
            BigonSpec::Components {
                components,
                sitting,
            } => {
                let refs: Vec<&str> = components.iter().map(String::as_str).collect();
                let s = sitting.unwrap_or([DEFAULT_SITTING; 2]);
                check_len(components.len(), dim).and_then(|_| Bigon::parse(&refs, (s[0], s[1])))
            }
            BigonSpec::Sweep { sweep } => self.path_at(&sweep[0], dim, depth + 1).and_then(|a| {
                let b = self.path_at(&sweep[1], dim, depth + 1)?;
                Bigon::sweep(&a, &b, DEFAULT_SITTING)
            }),
            BigonSpec::Vertical { vertical } => self
                .bigon_at(&vertical[0], dim, depth + 1)
                .and_then(|a| a.vertical(&self.bigon_at(&vertical[1], dim, depth + 1)?)),
            BigonSpec::Horizontal { horizontal } => self
                .bigon_at(&horizontal[0], dim, depth + 1)
                .and_then(|a| a.horizontal(&self.bigon_at(&horizontal[1], dim, depth + 1)?)),
            BigonSpec::Reparametrize { bigon, phi, psi } => {
                let phi = expr::parse(phi).map_err(Error::from);
                let psi = psi
                    .as_deref()
                    .map(expr::parse)
                    .transpose()
                    .map_err(Error::from);
                self.bigon_at(bigon, dim, depth + 1)
                    .and_then(|b| b.reparametrize(&phi?, psi?.as_ref()))
            }
        };
        bigon
    }
}

fn check_len(len: usize, dim: usize) -> Result<()> {
    if len == dim {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "expected {dim} coordinates, got {len}"
        )))
    }
}

fn msg(e: &Error) -> String {
    match e {
        Error::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

#[derive(Default)]
struct Errors(Vec<String>);

impl Errors {
    fn push(&mut self, m: String) {
        self.0.push(m);
    }

    fn collect<T>(&mut self, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.0.push(msg(&e));
                None
            }
        }
    }

    fn finish(self) -> Result<()> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(self.0.join("\n")))
        }
    }
}

/// One resolved chart. `conn` is `None` until a constructing transition fills it in.
#[derive(Clone, Debug)]
pub struct Chart {
    pub id: String,
    pub domain: Domain,
    pub conn: Option<LocalConnection>,
}

/// A scenario with every name resolved to a built object.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub cm: CrossedModule,
    pub dim: usize,
    pub charts: BTreeMap<String, Chart>,
    pub chart_order: Vec<String>,
    pub transitions: Vec<(String, String, Transition)>,
    pub triples: Vec<([String; 3], TripleData)>,
    pub paths: BTreeMap<String, Path>,
    pub bigons: BTreeMap<String, Bigon>,
    pub nerve: Option<CoverNerve>,
    pub cocycle: Option<GluingCocycle>,
}

fn algebras(cm: &CrossedModule) -> Result<(LieAlgebra, LieAlgebra)> {
    let d = cm.differential().ok_or_else(|| {
        Error::Config(format!(
            "{} has no Lie algebra data; forms need a Lie crossed module",
            cm.name()
        ))
    })?;
    Ok((d.g_algebra.clone(), d.h_algebra.clone()))
}

fn build_form(
    spec: &FormSpec,
    degree: usize,
    dim: usize,
    want: &LieAlgebra,
    other: &LieAlgebra,
    role: &str,
) -> Result<FormField> {
    let (tag, comps) = spec.parts();
    if let Some(tag) = tag {
        if tag != want.name() {
            let extra = if tag == other.name() && tag != want.name() {
                " (that is the other algebra of the crossed module)"
            } else {
                ""
            };
            return Err(Error::Config(format!(
                "{role} must take values in {} but is declared in {tag}{extra}",
                want.name()
            )));
        }
    }
    FormField::from_strings(degree, dim, want.clone(), comps.iter())
        .map_err(|e| Error::Config(format!("{role}: {}", msg(&e))))
}

fn resolve_chart(
    cm: &CrossedModule,
    dim: usize,
    spec: &ChartSpec,
    constructed: bool,
) -> Result<Chart> {
    let at = |m: String| Error::Config(format!("chart `{}`: {m}", spec.id));
    let lo = spec.lo.clone().unwrap_or_else(|| vec![-1.0; dim]);
    let hi = spec.hi.clone().unwrap_or_else(|| vec![1.0; dim]);
    if lo.len() != dim || hi.len() != dim {
        return Err(at(format!("box corners must have {dim} coordinates")));
    }
    let domain = Domain::new(lo, hi).map_err(|e| at(msg(&e)))?;
    if constructed || (spec.a.is_none() && spec.b.is_none() && cm.differential().is_none()) {
        return Ok(Chart {
            id: spec.id.clone(),
            domain,
            conn: None,
        });
    }
    let (ga, ha) = algebras(cm).map_err(|e| at(msg(&e)))?;
    let a = match &spec.a {
        Some(f) => build_form(f, 1, dim, &ga, &ha, "A").map_err(|e| at(msg(&e)))?,
        None => FormField::zero(1, dim, ga.clone())?,
    };
    let b = match &spec.b {
        None => FormField::zero(2, dim, ha.clone())?,
        Some(BSpec::Keyword(k)) if k == "flat" => flat_partner(cm, &a).map_err(|e| at(msg(&e)))?,
        Some(BSpec::Keyword(k)) => {
            return Err(at(format!("B must be a form or \"flat\", got \"{k}\"")))
        }
        Some(BSpec::Form(f)) => build_form(f, 2, dim, &ha, &ga, "B").map_err(|e| at(msg(&e)))?,
    };
    Ok(Chart {
        id: spec.id.clone(),
        domain,
        conn: Some(LocalConnection::new(
            spec.id.clone(),
            Form::Field(a),
            Form::Field(b),
        )),
    })
}

fn group_map(
    fam: MatrixFamily,
    dim: usize,
    factors: &[(usize, String)],
    role: &str,
) -> Result<GroupMap> {
    let mut out = Vec::with_capacity(factors.len());
    let mut errors = Vec::new();
    for (a, src) in factors {
        if *a == 0 {
            errors.push(format!("{role}: basis indices start at 1"));
            continue;
        }
        match expr::parse(src) {
            Ok(e) => out.push((a - 1, e)),
            Err(e) => errors.push(format!("{role}: `{src}`: {e}")),
        }
    }
    if !errors.is_empty() {
        return Err(Error::Config(errors.join("; ")));
    }
    GroupMap::exp_product(fam, dim, out).map_err(|e| Error::Config(format!("{role}: {}", msg(&e))))
}

fn matrix_family(group: &Group, what: &str) -> Result<MatrixFamily> {
    group.family().ok_or_else(|| {
        Error::Config(format!(
            "{what} needs a matrix group, {} is finite",
            group.name()
        ))
    })
}

fn resolve_transition(
    cm: &CrossedModule,
    dim: usize,
    spec: &TransitionSpec,
    charts: &mut BTreeMap<String, Chart>,
) -> Result<(String, String, Transition)> {
    let (ga, ha) = algebras(cm)?;
    let fam = matrix_family(cm.g(), "g_ij")?;
    for c in [&spec.from, &spec.to] {
        if !charts.contains_key(c) {
            return Err(Error::Config(format!("unknown chart `{c}`")));
        }
    }
    let g = group_map(fam, dim, &spec.g, "g")?;
    let a = spec
        .a
        .as_ref()
        .map(|f| build_form(f, 1, dim, &ha, &ga, "a").map(Form::Field))
        .transpose()?;
    let trans = Transition { g, a };
    charts[&spec.from]
        .domain
        .intersect(&charts[&spec.to].domain)?;
    if spec.construct {
        let from = charts[&spec.from]
            .conn
            .clone()
            .ok_or_else(|| Error::Config(format!("chart `{}` has no forms yet", spec.from)))?;
        let built = transport::gauge_transform(cm, &spec.to, &from, &trans)?;
        charts.get_mut(&spec.to).unwrap().conn = Some(built);
    }
    Ok((spec.to.clone(), spec.from.clone(), trans))
}

fn resolve_triple(
    cm: &CrossedModule,
    dim: usize,
    spec: &TripleSpec,
    specs: &[TransitionSpec],
    built: &[(usize, (String, String, Transition))],
    charts: &BTreeMap<String, Chart>,
) -> Result<([String; 3], TripleData)> {
    let [i, j, k] = &spec.charts;
    let find = |to: &str, from: &str| -> Result<Transition> {
        let n = specs
            .iter()
            .position(|t| t.to == to && t.from == from)
            .ok_or_else(|| Error::Config(format!("no transition from `{from}` to `{to}`")))?;
        built
            .iter()
            .find(|(m, _)| *m == n)
            .map(|(_, t)| t.2.clone())
            .ok_or_else(|| {
                Error::Config(format!(
                    "transition from `{from}` to `{to}` did not resolve"
                ))
            })
    };
    let fam = matrix_family(cm.h(), "h_ijk")?;
    let mut tri = TripleData {
        ij: find(i, j)?,
        jk: find(j, k)?,
        ik: find(i, k)?,
        h: group_map(fam, dim, &spec.h, "h")?,
    };
    let a_i = charts
        .get(i)
        .and_then(|c| c.conn.as_ref())
        .ok_or_else(|| Error::Config(format!("chart `{i}` has no forms")))?
        .a
        .clone();
    if spec.solve {
        tri.ik.a = Some(transport::solve_a_ik(cm, &tri, &a_i)?);
    }
    Ok((spec.charts.clone(), tri))
}

fn resolve_nerve(spec: &NerveSpec) -> Result<CoverNerve> {
    let nerve = match spec {
        NerveSpec::Explicit(n) => n.clone(),
        NerveSpec::Named(name) => match name.as_str() {
            "tetrahedron" => CoverNerve::tetrahedron(),
            "tetrahedron-boundary" => CoverNerve::tetrahedron_boundary(),
            other => match other.strip_prefix("complete-").and_then(|n| n.parse::<usize>().ok()) {
                Some(n) if (1..=8).contains(&n) => CoverNerve::complete(n),
                _ => {
                    return Err(Error::Config(format!(
                        "unknown nerve `{other}`; known: tetrahedron, tetrahedron-boundary, complete-N (N ≤ 8)"
                    )))
                }
            },
        },
    };
    nerve
        .validate()
        .map_err(|e| Error::Config(format!("nerve: {}", msg(&e))))?;
    Ok(nerve)
}

fn resolve_cocycle(
    cm: &CrossedModule,
    nerve: &CoverNerve,
    spec: &CocycleSpec,
) -> Result<GluingCocycle> {
    let mut data = GluingCocycle::from_labels(cm, &spec.g, &spec.h, &spec.k)
        .map_err(|e| Error::Config(format!("cocycle: {}", msg(&e))))?;
    if spec.normalize {
        data.normalize_units(cm, nerve);
    }
    let mut missing = Vec::new();
    for d in &nerve.doubles {
        if !data.g.contains_key(d) {
            missing.push(format!("g_{},{}", d[0], d[1]));
        }
    }
    for t in &nerve.triples {
        if !data.h.contains_key(t) {
            missing.push(format!("h_{},{},{}", t[0], t[1], t[2]));
        }
    }
    if missing.is_empty() {
        Ok(data)
    } else {
        Err(Error::Config(format!(
            "cocycle: missing {}",
            missing.join(", ")
        )))
    }
}

/// Subcommands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Interchange,
    HolonomyPath,
    HolonomySurface,
    FakeCurvature,
    Transitions,
    Cocycle,
    Classify,
    Converge,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Validate,
        Command::Interchange,
        Command::HolonomyPath,
        Command::HolonomySurface,
        Command::FakeCurvature,
        Command::Transitions,
        Command::Cocycle,
        Command::Classify,
        Command::Converge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Interchange => "interchange",
            Command::HolonomyPath => "holonomy-path",
            Command::HolonomySurface => "holonomy-surface",
            Command::FakeCurvature => "fake-curvature",
            Command::Transitions => "transitions",
            Command::Cocycle => "cocycle",
            Command::Classify => "classify",
            Command::Converge => "converge",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command `{s}`")))
    }
}

/// Command-line overrides of scenario parameters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Options {
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub samples: Option<usize>,
}

/// Output of one command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub scenario: String,
    pub crossed_module: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    pub verdict: Verdict,
    pub sections: Vec<ValidationReport>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<transport::ConvergenceTable>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub wall_time: std::time::Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} on {} ({}), seed {}",
            self.command, self.scenario, self.crossed_module, self.seed
        );
        if let Some(g) = self.grid {
            out.push_str(&format!(", grid {g}"));
        }
        if let Some(n) = self.samples {
            out.push_str(&format!(", {n} samples"));
        }
        out.push('\n');
        for section in &self.sections {
            for c in &section.checks {
                out.push_str(&format!("[{}] {}: {}", c.verdict, section.subject, c.name));
                if let Some(r) = c.max_residual {
                    out.push_str(&format!("  residual {r:.3e}"));
                }
                if let Some(t) = c.tolerance {
                    out.push_str(&format!("  tolerance {t:.1e}"));
                }
                if c.checked > 0 {
                    out.push_str(&format!("  ({} checked)", c.checked));
                }
                out.push('\n');
                if let Some(w) = &c.witness {
                    out.push_str(&format!("    witness: {w}\n"));
                }
                if let Some(n) = &c.note {
                    out.push_str(&format!("    note: {n}\n"));
                }
            }
        }
        for (k, v) in &self.values {
            out.push_str(&format!("{k} = {v}\n"));
        }
        if let Some(t) = &self.convergence {
            out.push_str(&format!(
                "fitted order {:.3} (reference grid {})\n",
                t.order, t.reference_grid
            ));
            out.push_str(&t.csv());
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out.push_str(&format!("verdict: {}\n", self.verdict));
        out
    }
}

fn matrix_json(m: &Mat) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect();
    serde_json::json!(rows)
}

fn element_json(group: &Group, e: &Element) -> serde_json::Value {
    match e {
        Element::Index(_) => serde_json::json!(group.describe(e)),
        Element::Matrix(m) => matrix_json(m),
    }
}

struct Run<'a> {
    scenario: &'a Scenario,
    resolved: Resolved,
    seed: u64,
    grid: usize,
    samples: usize,
    tol: Tolerances,
    report: Report,
}

/// Runs `command` over `scenario`. Configuration problems are errors; check failures
/// are reported with verdict `FAIL`.
pub fn run(command: Command, scenario: &Scenario, options: &Options) -> Result<Report> {
    let start = std::time::Instant::now();
    let resolved = scenario.resolve()?;
    let seed = options.seed.or(scenario.seed).unwrap_or(DEFAULT_SEED);
    let grid = options
        .grid
        .or(scenario.grid)
        .unwrap_or(transport::DEFAULT_GRID);
    let samples = options
        .samples
        .or(scenario.samples)
        .unwrap_or(DEFAULT_SAMPLES);
    let report = Report {
        schema: SCHEMA,
        command: command.name().into(),
        scenario: scenario.name.clone().unwrap_or_else(|| "unnamed".into()),
        crossed_module: resolved.cm.name().to_string(),
        seed,
        grid: None,
        samples: None,
        verdict: Verdict::Pass,
        sections: vec![],
        values: BTreeMap::new(),
        convergence: None,
        warnings: vec![],
        wall_time: Default::default(),
    };
    let mut r = Run {
        scenario,
        resolved,
        seed,
        grid,
        samples,
        tol: scenario.tolerances.clone().unwrap_or_default(),
        report,
    };
    match command {
        Command::Validate => r.validate()?,
        Command::Interchange => r.interchange()?,
        Command::HolonomyPath => r.holonomy_path()?,
        Command::HolonomySurface => r.holonomy_surface()?,
        Command::FakeCurvature => r.fake_curvature()?,
        Command::Transitions => r.transitions()?,
        Command::Cocycle => r.cocycle()?,
        Command::Classify => r.classify()?,
        Command::Converge => r.converge()?,
    }
    let mut report = r.report;
    let failed = report.sections.iter().any(|s| !s.passed());
    report.verdict = if failed { Verdict::Fail } else { Verdict::Pass };
    report.wall_time = start.elapsed();
    Ok(report)
}

impl Run<'_> {
    fn cm(&self) -> &CrossedModule {
        &self.resolved.cm
    }

    fn finite_mode(&self) -> Mode {
        if self.cm().is_finite() {
            Mode::Exhaustive
        } else {
            Mode::Sampled {
                samples: self.samples,
                seed: self.seed,
            }
        }
    }

    fn use_samples(&mut self) {
        self.report.samples = Some(self.samples);
    }

    fn use_grid(&mut self) {
        self.report.grid = Some(self.grid);
    }

    fn validate(&mut self) -> Result<()> {
        let mode = self.finite_mode();
        if !self.cm().is_finite() {
            self.use_samples();
        }
        let axioms = self.cm().validate(mode)?;
        self.report.sections.push(axioms);
        if self.cm().differential().is_some() && !self.cm().g().is_trivial() {
            let d = self
                .cm()
                .differential_consistency(self.samples.min(20), 1e-4, self.seed)?;
            self.report.sections.push(d);
        }
        let mut sitting = ValidationReport::new("sitting instants");
        for (name, p) in &self.resolved.paths {
            let mut c = p.certify();
            c.name = format!("path `{name}`: {}", c.name);
            sitting.push(c);
        }
        for (name, b) in &self.resolved.bigons {
            for mut c in b.certify().checks {
                c.name = format!("bigon `{name}`: {}", c.name);
                sitting.push(c);
            }
        }
        if !sitting.checks.is_empty() {
            self.report.sections.push(sitting);
        }
        Ok(())
    }

    fn interchange(&mut self) -> Result<()> {
        let mode = self.finite_mode();
        if !self.cm().is_finite() {
            self.use_samples();
        }
        let r = self.cm().check_interchange(mode)?;
        self.report.sections.push(r);
        if self.cm().g().is_trivial() {
            let probe = self.cm().eckmann_hilton_probe()?;
            self.report.sections.push(probe);
        }
        Ok(())
    }

    fn hol_chart(&self) -> Result<&Chart> {
        let hol = self.scenario.holonomy.clone().unwrap_or_default();
        let id = match hol.chart {
            Some(c) => c,
            None => self
                .resolved
                .chart_order
                .first()
                .cloned()
                .ok_or_else(|| Error::Config("holonomy needs at least one chart".into()))?,
        };
        Ok(&self.resolved.charts[&id])
    }

    fn conn(&self) -> Result<LocalConnection> {
        let chart = self.hol_chart()?;
        chart
            .conn
            .clone()
            .ok_or_else(|| Error::Config(format!("chart `{}` has no forms", chart.id)))
    }

    fn hol_path(&self) -> Result<Path> {
        let name = self
            .scenario
            .holonomy
            .as_ref()
            .and_then(|h| h.path.clone())
            .unwrap_or_else(|| "segment-x".into());
        self.scenario.build_path(&name, self.resolved.dim)
    }

    fn hol_bigon(&self) -> Result<Bigon> {
        let name = self
            .scenario
            .holonomy
            .as_ref()
            .and_then(|h| h.bigon.clone())
            .unwrap_or_else(|| "unit-square".into());
        self.scenario.build_bigon(&name, self.resolved.dim)
    }

    fn holonomy_path(&mut self) -> Result<()> {
        self.use_grid();
        let conn = self.conn()?;
        let path = self.hol_path()?;
        let cm = self.cm().clone();
        let g = transport::path_holonomy(&cm, &conn.a, &path, self.grid)?;
        let back = transport::path_holonomy(&cm, &conn.a, &path.reverse(), self.grid)?;
        let fam = matrix_family(cm.g(), "path holonomy")?;
        let m = transport::element_matrix(&g);
        let mut r = ValidationReport::new("path holonomy");
        r.push(Check::residual(
            "group membership",
            fam.membership_defect(m),
            crate::group::TAU_GRP,
        ));
        let loop_defect = cm.g().distance(&cm.g().mul(&back, &g)?, &cm.g().identity());
        r.push(Check::residual(
            "reversal gives the inverse",
            loop_defect,
            1e-8,
        ));
        self.report.sections.push(r);
        self.report
            .values
            .insert("g".into(), element_json(cm.g(), &g));
        Ok(())
    }

    fn holonomy_surface(&mut self) -> Result<()> {
        self.use_grid();
        let conn = self.conn()?;
        let bigon = self.hol_bigon()?;
        let cm = self.cm().clone();
        let hol = transport::surface_holonomy(&cm, &conn, &bigon, self.grid)?;
        let mut r = ValidationReport::new("surface holonomy");
        let law = Check::residual("target law", hol.target_defect, self.tol.target);
        r.push(match &hol.warning {
            None => law,
            Some(w) => Check {
                verdict: Verdict::Skipped("fake curvature does not vanish".into()),
                note: Some(w.clone()),
                ..law
            },
        });
        if cm.g().is_trivial() && cm.h().family() == Some(MatrixFamily::U1) {
            let flux = abelian_flux(&conn.b, &bigon)?;
            let want = Mat::from_element(1, 1, linalg::c(flux.cos(), -flux.sin()));
            let got = transport::element_matrix(&hol.cell.h);
            r.push(Check::residual(
                "abelian flux oracle",
                linalg::dist(got, &want),
                self.tol.oracle,
            ));
            self.report
                .values
                .insert("flux".into(), serde_json::json!(flux));
        }
        self.report.sections.push(r);
        let v = &mut self.report.values;
        v.insert("g".into(), element_json(cm.g(), &hol.cell.g));
        v.insert("h".into(), element_json(cm.h(), &hol.cell.h));
        v.insert("target_defect".into(), serde_json::json!(hol.target_defect));
        if let Some(f) = hol.fake_curvature {
            v.insert("fake_curvature".into(), serde_json::json!(f));
        }
        if let Some(w) = hol.warning {
            self.report.warnings.push(w);
        }
        Ok(())
    }

    fn fake_curvature(&mut self) -> Result<()> {
        self.use_samples();
        let cm = self.cm().clone();
        if self.resolved.chart_order.is_empty() {
            return Err(Error::Config("scenario declares no charts".into()));
        }
        for id in self.resolved.chart_order.clone() {
            let chart = self.resolved.charts[&id].clone();
            let mut r = ValidationReport::new(format!("chart {id}"));
            let symbolic = chart
                .conn
                .as_ref()
                .filter(|c| c.a.field().is_some() && c.b.field().is_some());
            let Some(conn) = symbolic else {
                r.push(Check::skipped(
                    "fake curvature vanishes",
                    "forms are not symbolic",
                ));
                self.report.sections.push(r);
                continue;
            };
            let comp = conn.composites(&cm)?;
            let mut rng = rng::named(self.seed, &format!("fake-curvature/{id}"));
            let mut flat = Check::new("fake curvature vanishes").with_tolerance(TAU_FAKE);
            for _ in 0..self.samples {
                let x = chart.domain.sample(&mut rng);
                let f = transport::fake_curvature_norm(&comp, &x)?;
                flat.record_residual(f, || format!("x={x:?}"));
            }
            r.push(flat);
            let mut rng = rng::named(self.seed, &format!("kernel/{id}"));
            let k = transport::kernel_check(
                &cm,
                conn,
                &chart.domain,
                self.samples,
                self.tol.kernel,
                &mut rng,
            )?;
            if let Some(c) = k.get("dt(H3) = 0") {
                r.push(c.clone());
            }
            self.report.sections.push(r);
        }
        Ok(())
    }

    fn transitions(&mut self) -> Result<()> {
        self.use_samples();
        let cm = self.cm().clone();
        if self.resolved.transitions.is_empty() {
            return Err(Error::Config("scenario declares no transitions".into()));
        }
        for (to, from, trans) in self.resolved.transitions.clone() {
            let ci = self.resolved.charts[&to].conn.clone();
            let cj = self.resolved.charts[&from].conn.clone();
            let (Some(ci), Some(cj)) = (ci, cj) else {
                return Err(Error::Config(format!(
                    "transition {from} -> {to}: both charts need forms"
                )));
            };
            let domain = self.resolved.charts[&to]
                .domain
                .intersect(&self.resolved.charts[&from].domain)?;
            let mut rng = rng::named(self.seed, &format!("transitions/{to}<-{from}"));
            let r = transport::check_transition_laws(
                &cm,
                &ci,
                &cj,
                &trans,
                &domain,
                self.samples,
                self.tol.transition,
                &mut rng,
            )?;
            self.report.sections.push(r);
        }
        for (names, tri) in self.resolved.triples.clone() {
            let [i, j, k] = &names;
            let charts = &self.resolved.charts;
            let domain = charts[i]
                .domain
                .intersect(&charts[j].domain)?
                .intersect(&charts[k].domain)?;
            let a_i = charts[i]
                .conn
                .as_ref()
                .map(|c| c.a.clone())
                .ok_or_else(|| Error::Config(format!("chart `{i}` has no forms")))?;
            let mut rng = rng::named(self.seed, &format!("triples/{i},{j},{k}"));
            let mut r = transport::check_triple_overlap_a_law(
                &cm,
                &tri,
                &a_i,
                &domain,
                self.samples,
                self.tol.transition,
                &mut rng,
            )?;
            r.subject = format!("triple overlap {i},{j},{k}");
            self.report.sections.push(r);
        }
        Ok(())
    }

    fn nerve_and_data(&self) -> Result<(CoverNerve, Option<GluingCocycle>)> {
        let nerve = self
            .resolved
            .nerve
            .clone()
            .ok_or_else(|| Error::Config("scenario declares no nerve".into()))?;
        Ok((nerve, self.resolved.cocycle.clone()))
    }

    fn cocycle(&mut self) -> Result<()> {
        let (nerve, data) = self.nerve_and_data()?;
        let data = data.ok_or_else(|| Error::Config("scenario declares no cocycle data".into()))?;
        let r = cech::check_all(self.cm(), &nerve, &data)?;
        self.report.sections.push(r);
        Ok(())
    }

    fn classify(&mut self) -> Result<()> {
        let (nerve, _) = self.nerve_and_data()?;
        let budget = self
            .scenario
            .classify
            .as_ref()
            .and_then(|c| c.budget)
            .map(u128::from)
            .unwrap_or(cech::DEFAULT_BUDGET);
        let census = match cech::classify_finite(self.cm(), &nerve, budget) {
            Err(e @ Error::Budget { .. }) => return Err(Error::Config(e.to_string())),
            other => other?,
        };
        let mut r = ValidationReport::new("classification");
        let mut c = Check::new("enumeration");
        c.checked = census.cocycles as u64;
        r.push(c);
        self.report.sections.push(r);
        self.report
            .values
            .insert("census".into(), serde_json::to_value(&census).unwrap());
        Ok(())
    }

    fn converge(&mut self) -> Result<()> {
        let spec = self
            .scenario
            .converge
            .clone()
            .ok_or_else(|| Error::Config("scenario declares no [converge] section".into()))?;
        let conn = self.conn()?;
        let cm = self.cm().clone();
        let table = if spec.op == "path" {
            let path = self.hol_path()?;
            transport::convergence_study(
                &spec.grids,
                |n| transport::path_holonomy(&cm, &conn.a, &path, n),
                |a, b| cm.g().distance(a, b),
            )?
        } else {
            let bigon = self.hol_bigon()?;
            transport::convergence_study(
                &spec.grids,
                |n| transport::surface_holonomy(&cm, &conn, &bigon, n).map(|s| s.cell),
                |a, b| cm.cell_distance(a, b),
            )?
        };
        let [lo, hi] = spec.order.unwrap_or(if spec.op == "path" {
            [3.5, 4.5]
        } else {
            [1.5, 4.5]
        });
        let mut r = ValidationReport::new(format!("{} convergence", spec.op));
        let mut order =
            Check::new("fitted order in range").with_note(format!("accepted range [{lo}, {hi}]"));
        order.record((lo..=hi).contains(&table.order), || {
            format!("fitted order {:.3}", table.order)
        });
        r.push(order);
        let (first, last) = (table.rows[0].1, table.rows[table.rows.len() - 1].1);
        let mut refine = Check::new("refinement reduces the error");
        refine.record(last < first, || {
            format!("error {last:e} at the finest grid, {first:e} at the coarsest")
        });
        r.push(refine);
        self.report.sections.push(r);
        self.report.convergence = Some(table);
        Ok(())
    }
}

/// `∬ B(∂_sΣ, ∂_tΣ) ds dt` by tensor Gauss–Legendre (5 nodes, 32 × 32 panels).
fn abelian_flux(b: &Form, bigon: &Bigon) -> Result<f64> {
    const NODES: [(f64, f64); 5] = [
        (0.0, 128.0 / 225.0),
        (-0.538_469_310_105_683, 0.478_628_670_499_366_5),
        (0.538_469_310_105_683, 0.478_628_670_499_366_5),
        (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
        (0.906_179_845_938_664, 0.236_926_885_056_189_1),
    ];
    let panels = 32;
    let w = 1.0 / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        for j in 0..panels {
            for (a, wa) in NODES {
                for (c, wc) in NODES {
                    let s = (i as f64 + 0.5 + 0.5 * a) * w;
                    let t = (j as f64 + 0.5 + 0.5 * c) * w;
                    let (p, ds, dt) = bigon.jet(s, t);
                    let v = b.eval(&p, &[&ds, &dt])?;
                    total += wa * wc * v[(0, 0)].im * w * w / 4.0;
                }
            }
        }
    }
    Ok(total)
}
