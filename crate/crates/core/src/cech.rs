//! Cover nerves, gluing cocycles and their diagram checkers.
//!
//! A label `h_ijk` is the 2-cell `(g_ik, h_ijk): g_ik ⇒ g_ij·g_jk`, so the triangle reads
//! `t(h_ijk)·g_ik = g_ij·g_jk`. A unit `k_i` is the 2-cell `(1, k_i): 1 ⇒ g_ii`. Every
//! diagram is evaluated by pasting cells with the 2-group operations; with these
//! conventions the tetrahedron is `h_ijk·h_ikl = α(g_ij)(h_jkl)·h_ijl` and the unit laws
//! are `h_iij = k_i`, `h_ijj = α(g_ij)(k_j)`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::crossed::CrossedModule;
use crate::error::{Error, Result};
use crate::group::{Element, FiniteGroup, Group};
use crate::report::{Check, ValidationReport};
use crate::two_group::TwoCell;

pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Declared overlaps of a cover, all listed with increasing chart labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverNerve {
    pub charts: Vec<usize>,
    #[serde(default)]
    pub doubles: Vec<[usize; 2]>,
    #[serde(default)]
    pub triples: Vec<[usize; 3]>,
    #[serde(default)]
    pub quadruples: Vec<[usize; 4]>,
}

fn increasing(s: &[usize]) -> bool {
    s.windows(2).all(|w| w[0] < w[1])
}

fn fmt_simplex(s: &[usize]) -> String {
    let parts: Vec<String> = s.iter().map(usize::to_string).collect();
    format!("({})", parts.join(","))
}

fn subsets<const K: usize>(n: usize) -> Vec<[usize; K]> {
    fn go<const K: usize>(start: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<[usize; K]>) {
        if cur.len() == K {
            out.push(std::array::from_fn(|i| cur[i]));
            return;
        }
        for v in start..=n {
            cur.push(v);
            go(v + 1, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, &mut Vec::new(), &mut out);
    out
}

impl CoverNerve {
    /// Checks labels, ordering, and that every face of a declared overlap is declared.
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        let mut sorted = self.charts.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.charts.len() {
            errors.push("chart labels repeat".to_string());
        }
        if self.charts.is_empty() {
            errors.push("nerve has no charts".into());
        }
        let known = |s: &[usize]| s.iter().all(|i| self.charts.contains(i));
        let mut check_list = |kind: &str, list: Vec<&[usize]>| {
            let mut seen = std::collections::BTreeSet::new();
            for s in list {
                if !increasing(s) {
                    errors.push(format!(
                        "{kind} {} is not listed in increasing order",
                        fmt_simplex(s)
                    ));
                } else if !known(s) {
                    errors.push(format!(
                        "{kind} {} uses an undeclared chart",
                        fmt_simplex(s)
                    ));
                }
                if !seen.insert(s.to_vec()) {
                    errors.push(format!("{kind} {} is listed twice", fmt_simplex(s)));
                }
            }
        };
        check_list("double", self.doubles.iter().map(|d| &d[..]).collect());
        check_list("triple", self.triples.iter().map(|d| &d[..]).collect());
        check_list(
            "quadruple",
            self.quadruples.iter().map(|d| &d[..]).collect(),
        );
        for t in &self.triples {
            for e in [[t[0], t[1]], [t[1], t[2]], [t[0], t[2]]] {
                if !self.doubles.contains(&e) {
                    errors.push(format!(
                        "triple {} needs double {}",
                        fmt_simplex(t),
                        fmt_simplex(&e)
                    ));
                }
            }
        }
        for q in &self.quadruples {
            for f in [
                [q[0], q[1], q[2]],
                [q[0], q[1], q[3]],
                [q[0], q[2], q[3]],
                [q[1], q[2], q[3]],
            ] {
                if !self.triples.contains(&f) {
                    errors.push(format!(
                        "quadruple {} needs triple {}",
                        fmt_simplex(q),
                        fmt_simplex(&f)
                    ));
                }
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errors.join("; ")))
        }
    }

    /// All overlaps among charts `1..=n` up to quadruples.
    pub fn complete(n: usize) -> Self {
        Self {
            charts: (1..=n).collect(),
            doubles: subsets::<2>(n),
            triples: subsets::<3>(n),
            quadruples: subsets::<4>(n),
        }
    }

    /// The full tetrahedron: four charts, every overlap nonempty.
    pub fn tetrahedron() -> Self {
        Self::complete(4)
    }

    /// Boundary of the tetrahedron (the minimal triangulation of the sphere): no quadruple.
    pub fn tetrahedron_boundary() -> Self {
        Self {
            quadruples: vec![],
            ..Self::complete(4)
        }
    }

    /// Renames charts by `map`, re-sorting each overlap.
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> Self {
        fn sorted<const K: usize>(s: &[usize; K], map: &impl Fn(usize) -> usize) -> [usize; K] {
            let mut out = s.map(map);
            out.sort_unstable();
            out
        }
        Self {
            charts: self.charts.iter().map(|&i| map(i)).collect(),
            doubles: self.doubles.iter().map(|s| sorted(s, &map)).collect(),
            triples: self.triples.iter().map(|s| sorted(s, &map)).collect(),
            quadruples: self.quadruples.iter().map(|s| sorted(s, &map)).collect(),
        }
    }
}

/// Reads a nerve written as TOML with keys `charts`, `doubles`, `triples`, `quadruples`.
pub fn parse_nerve(text: &str) -> Result<CoverNerve> {
    let nerve: CoverNerve =
        toml::from_str(text).map_err(|e| Error::Config(format!("nerve: {}", e.message())))?;
    nerve.validate()?;
    Ok(nerve)
}

/// Transition data `g_ij`, `h_ijk`, `k_i`; keys may be degenerate (`g_ii`, `h_iij`).
#[derive(Clone, Debug, PartialEq)]
pub struct GluingCocycle {
    pub g: BTreeMap<[usize; 2], Element>,
    pub h: BTreeMap<[usize; 3], Element>,
    pub k: BTreeMap<usize, Element>,
}

fn parse_indices<const K: usize>(key: &str) -> Option<[usize; K]> {
    let parts: Vec<usize> = key
        .split(',')
        .map(|p| p.trim().parse().ok())
        .collect::<Option<_>>()?;
    parts.try_into().ok()
}

fn resolve(group: &Group, label: &str) -> Option<Element> {
    group.finite()?.find_label(label.trim()).map(Element::Index)
}

impl GluingCocycle {
    pub fn empty() -> Self {
        Self {
            g: BTreeMap::new(),
            h: BTreeMap::new(),
            k: BTreeMap::new(),
        }
    }

    /// Resolves element labels keyed by `"i,j"`, `"i,j,k"` and `"i"`; reports every problem.
    pub fn from_labels(
        cm: &CrossedModule,
        g: &BTreeMap<String, String>,
        h: &BTreeMap<String, String>,
        k: &BTreeMap<String, String>,
    ) -> Result<Self> {
        if !cm.is_finite() {
            return Err(Error::Config(
                "gluing data by label needs a finite crossed module".into(),
            ));
        }
        let mut out = Self::empty();
        let mut errors = Vec::new();
        for (key, label) in g {
            match (parse_indices::<2>(key), resolve(cm.g(), label)) {
                (Some(ix), Some(e)) => {
                    out.g.insert(ix, e);
                }
                (None, _) => errors.push(format!("g key `{key}` is not of the form i,j")),
                (_, None) => errors.push(format!(
                    "g_{key}: `{label}` is not an element of {}",
                    cm.g().name()
                )),
            }
        }
        for (key, label) in h {
            match (parse_indices::<3>(key), resolve(cm.h(), label)) {
                (Some(ix), Some(e)) => {
                    out.h.insert(ix, e);
                }
                (None, _) => errors.push(format!("h key `{key}` is not of the form i,j,k")),
                (_, None) => errors.push(format!(
                    "h_{key}: `{label}` is not an element of {}",
                    cm.h().name()
                )),
            }
        }
        for (key, label) in k {
            match (key.trim().parse::<usize>().ok(), resolve(cm.h(), label)) {
                (Some(ix), Some(e)) => {
                    out.k.insert(ix, e);
                }
                (None, _) => errors.push(format!("k key `{key}` is not a chart label")),
                (_, None) => errors.push(format!(
                    "k_{key}: `{label}` is not an element of {}",
                    cm.h().name()
                )),
            }
        }
        if errors.is_empty() {
            Ok(out)
        } else {
            Err(Error::Config(errors.join("; ")))
        }
    }

    /// Labels back, in the same key format as [`from_labels`](Self::from_labels).
    #[allow(clippy::type_complexity)]
    pub fn to_labels(
        &self,
        cm: &CrossedModule,
    ) -> (
        BTreeMap<String, String>,
        BTreeMap<String, String>,
        BTreeMap<String, String>,
    ) {
        let key = |s: &[usize]| s.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        (
            self.g
                .iter()
                .map(|(k, v)| (key(k), cm.g().describe(v)))
                .collect(),
            self.h
                .iter()
                .map(|(k, v)| (key(k), cm.h().describe(v)))
                .collect(),
            self.k
                .iter()
                .map(|(k, v)| (k.to_string(), cm.h().describe(v)))
                .collect(),
        )
    }

    /// Fills `g_ii = 1`, `k_i = 1` and `h_iij = h_ijj = 1` where absent.
    pub fn normalize_units(&mut self, cm: &CrossedModule, nerve: &CoverNerve) {
        for &i in &nerve.charts {
            self.g.entry([i, i]).or_insert_with(|| cm.g().identity());
            self.k.entry(i).or_insert_with(|| cm.h().identity());
        }
        for &[i, j] in &nerve.doubles {
            self.h.entry([i, i, j]).or_insert_with(|| cm.h().identity());
            self.h.entry([i, j, j]).or_insert_with(|| cm.h().identity());
        }
    }

    fn g_at(&self, i: usize, j: usize) -> Result<&Element> {
        self.g
            .get(&[i, j])
            .ok_or_else(|| Error::Config(format!("missing g for double ({i},{j})")))
    }

    fn h_at(&self, s: [usize; 3]) -> Result<&Element> {
        self.h
            .get(&s)
            .ok_or_else(|| Error::Config(format!("missing h for triple {}", fmt_simplex(&s))))
    }

    fn k_at(&self, i: usize) -> Result<&Element> {
        self.k
            .get(&i)
            .ok_or_else(|| Error::Config(format!("missing k for chart {i}")))
    }

    /// The cell `h_ijk: g_ik ⇒ g_ij·g_jk`.
    pub fn triangle_cell(&self, s: [usize; 3]) -> Result<TwoCell> {
        let [i, _, k] = s;
        Ok(TwoCell::new(
            self.g_at(i, k)?.clone(),
            self.h_at(s)?.clone(),
        ))
    }
}

/// Vertical composite without the endpoint check, for pasting possibly ill-typed data.
fn stack(cm: &CrossedModule, f: &TwoCell, f2: &TwoCell) -> Result<TwoCell> {
    cm.vertical_within(f, f2, f64::INFINITY)
}

fn triangle_ok(cm: &CrossedModule, data: &GluingCocycle, s: [usize; 3]) -> Result<bool> {
    let [i, j, k] = s;
    let cell = data.triangle_cell(s)?;
    let want = cm.g().mul(data.g_at(i, j)?, data.g_at(j, k)?)?;
    Ok(cm.g().approx_eq(&cm.target(&cell)?, &want))
}

/// `t(h_ijk)·g_ik = g_ij·g_jk` on every declared triple.
pub fn check_triangle(
    cm: &CrossedModule,
    nerve: &CoverNerve,
    data: &GluingCocycle,
) -> Result<ValidationReport> {
    let mut check = Check::new("triangle");
    for &s in &nerve.triples {
        let ok = triangle_ok(cm, data, s)?;
        check.record(ok, || {
            let [i, j, k] = s;
            format!(
                "triple {}: t(h)·g_{i}{k} ≠ g_{i}{j}·g_{j}{k} with h = {}",
                fmt_simplex(&s),
                cm.h().describe(&data.h[&s])
            )
        });
    }
    let mut r = ValidationReport::new("triangle");
    r.push(check);
    Ok(r)
}

/// The two pastings `g_il ⇒ g_ij·g_jk·g_kl` around the tetrahedron `(i,j,k,l)`.
pub fn tetrahedron_sides(
    cm: &CrossedModule,
    data: &GluingCocycle,
    q: [usize; 4],
) -> Result<(TwoCell, TwoCell)> {
    let [i, j, k, l] = q;
    let ikl = data.triangle_cell([i, k, l])?;
    let ijk = data.triangle_cell([i, j, k])?;
    let ijl = data.triangle_cell([i, j, l])?;
    let jkl = data.triangle_cell([j, k, l])?;
    let left = stack(cm, &ikl, &cm.whisker_right(&ijk, data.g_at(k, l)?)?)?;
    let right = stack(cm, &ijl, &cm.whisker_left(data.g_at(i, j)?, &jkl)?)?;
    Ok((left, right))
}

/// The associative law on every declared quadruple.
pub fn check_tetrahedron(
    cm: &CrossedModule,
    nerve: &CoverNerve,
    data: &GluingCocycle,
) -> Result<ValidationReport> {
    let mut check = Check::new("tetrahedron");
    for &q in &nerve.quadruples {
        let (left, right) = tetrahedron_sides(cm, data, q)?;
        check.record(cm.cells_approx_eq(&left, &right), || {
            format!(
                "quadruple {}: h_ijk·h_ikl = {} but α(g_ij)(h_jkl)·h_ijl = {}",
                fmt_simplex(&q),
                cm.h().describe(&left.h),
                cm.h().describe(&right.h)
            )
        });
    }
    let mut r = ValidationReport::new("tetrahedron");
    r.push(check);
    Ok(r)
}

/// Left and right unit laws on every double, plus the triangles of the degenerate triples.
pub fn check_unit_laws(
    cm: &CrossedModule,
    nerve: &CoverNerve,
    data: &GluingCocycle,
) -> Result<ValidationReport> {
    let mut units = Check::new("k_i: 1 ⇒ g_ii");
    for &i in &nerve.charts {
        let cell = TwoCell::new(cm.g().identity(), data.k_at(i)?.clone());
        let ok = cm.g().approx_eq(&cm.target(&cell)?, data.g_at(i, i)?);
        units.record(ok, || format!("chart {i}: t(k_{i}) ≠ g_{i}{i}"));
    }
    let mut left = Check::new("left unit");
    let mut right = Check::new("right unit");
    let mut degenerate = Check::new("degenerate triangles");
    for &[i, j] in &nerve.doubles {
        let g_ij = data.g_at(i, j)?;
        for s in [[i, i, j], [i, j, j]] {
            let ok = triangle_ok(cm, data, s)?;
            degenerate.record(ok, || {
                format!("triple {} fails the triangle", fmt_simplex(&s))
            });
        }
        let k_i = TwoCell::new(cm.g().identity(), data.k_at(i)?.clone());
        let whiskered = cm.whisker_right(&k_i, g_ij)?;
        let lhs = data.triangle_cell([i, i, j])?;
        left.record(cm.cells_approx_eq(&lhs, &whiskered), || {
            format!("double ({i},{j}): h_{i}{i}{j} differs from k_{i}·g_{i}{j}")
        });
        let k_j = TwoCell::new(cm.g().identity(), data.k_at(j)?.clone());
        let whiskered = cm.whisker_left(g_ij, &k_j)?;
        let lhs = data.triangle_cell([i, j, j])?;
        right.record(cm.cells_approx_eq(&lhs, &whiskered), || {
            format!("double ({i},{j}): h_{i}{j}{j} differs from g_{i}{j}·k_{j}")
        });
    }
    let mut r = ValidationReport::new("unit laws");
    r.push(units);
    r.push(degenerate);
    r.push(left);
    r.push(right);
    Ok(r)
}

/// Triangle, tetrahedron and, when unit data is present, the unit laws.
pub fn check_all(
    cm: &CrossedModule,
    nerve: &CoverNerve,
    data: &GluingCocycle,
) -> Result<ValidationReport> {
    let mut r = ValidationReport::new("gluing cocycle");
    r.extend(check_triangle(cm, nerve, data)?);
    r.extend(check_tetrahedron(cm, nerve, data)?);
    if nerve.charts.iter().all(|i| data.k.contains_key(i)) {
        r.extend(check_unit_laws(cm, nerve, data)?);
    } else {
        r.push(Check::skipped("unit laws", "no k_i given"));
    }
    Ok(r)
}

/// A change of gluing data: `λ_i ∈ G` per chart and `b_ij ∈ H` per double; absent means 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Change {
    pub lambda: BTreeMap<usize, Element>,
    pub b: BTreeMap<[usize; 2], Element>,
}

impl Change {
    pub fn identity() -> Self {
        Self {
            lambda: BTreeMap::new(),
            b: BTreeMap::new(),
        }
    }

    fn lambda(&self, cm: &CrossedModule, i: usize) -> Element {
        self.lambda
            .get(&i)
            .cloned()
            .unwrap_or_else(|| cm.g().identity())
    }

    fn b(&self, cm: &CrossedModule, e: [usize; 2]) -> Element {
        self.b.get(&e).cloned().unwrap_or_else(|| cm.h().identity())
    }

    /// The change undoing this one: `λ_i⁻¹` and `α(λ_j)(b_ij⁻¹)`.
    pub fn inverse(&self, cm: &CrossedModule) -> Result<Self> {
        let lambda = self
            .lambda
            .iter()
            .map(|(i, l)| Ok((*i, cm.g().inv(l)?)))
            .collect::<Result<_>>()?;
        let b = self
            .b
            .iter()
            .map(|(e, b)| Ok((*e, cm.alpha(&self.lambda(cm, e[1]), &cm.h().inv(b)?))))
            .collect::<Result<_>>()?;
        Ok(Self { lambda, b })
    }
}

fn whisker_both(cm: &CrossedModule, l: &Element, f: &TwoCell, r: &Element) -> Result<TwoCell> {
    cm.whisker_right(&cm.whisker_left(l, f)?, r)
}

/// `β_ij: λ_i g_ij λ_j⁻¹ ⇒ λ_i g_ij t(b_ij) λ_j⁻¹ = g'_ij`.
fn beta(
    cm: &CrossedModule,
    change: &Change,
    data: &GluingCocycle,
    e: [usize; 2],
) -> Result<TwoCell> {
    let [i, j] = e;
    let g = data.g_at(i, j)?;
    let base = cm.whisker_left(g, &TwoCell::new(cm.g().identity(), change.b(cm, e)))?;
    whisker_both(
        cm,
        &change.lambda(cm, i),
        &base,
        &cm.g().inv(&change.lambda(cm, j))?,
    )
}

/// Transforms every entry of `data`; `g' = λ_i g t(b) λ_j⁻¹` and `h'` by pasting.
pub fn coboundary_act(
    cm: &CrossedModule,
    data: &GluingCocycle,
    change: &Change,
) -> Result<GluingCocycle> {
    let mut out = GluingCocycle::empty();
    let mut betas = BTreeMap::new();
    for &e in data.g.keys() {
        let b = beta(cm, change, data, e)?;
        out.g.insert(e, cm.target(&b)?);
        betas.insert(e, b);
    }
    let beta_at = |e: [usize; 2]| {
        betas
            .get(&e)
            .ok_or_else(|| Error::Config(format!("missing g for double {}", fmt_simplex(&e))))
    };
    for &s in data.h.keys() {
        let [i, j, k] = s;
        let moved = whisker_both(
            cm,
            &change.lambda(cm, i),
            &data.triangle_cell(s)?,
            &cm.g().inv(&change.lambda(cm, k))?,
        )?;
        let back = cm.vertical_inverse(beta_at([i, k])?)?;
        let front = cm.horizontal(beta_at([i, j])?, beta_at([j, k])?)?;
        let cell = stack(cm, &stack(cm, &back, &moved)?, &front)?;
        out.h.insert(s, cell.h);
    }
    for (&i, k) in &data.k {
        let l = change.lambda(cm, i);
        let moved = whisker_both(
            cm,
            &l,
            &TwoCell::new(cm.g().identity(), k.clone()),
            &cm.g().inv(&l)?,
        )?;
        let cell = match betas.get(&[i, i]) {
            Some(b) => stack(cm, &moved, b)?,
            None => moved,
        };
        out.k.insert(i, cell.h);
    }
    Ok(out)
}

/// Counts of normalized cocycles and their classes, with one representative per class.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Census {
    pub search_space: u128,
    pub cocycles: usize,
    pub orbits: usize,
    /// Smallest member of each class as `(g labels by double, h labels by triple)`.
    pub representatives: Vec<(Vec<String>, Vec<String>)>,
}

fn search_space(g: usize, h: usize, nerve: &CoverNerve) -> u128 {
    let pow = |b: usize, e: usize| (b as u128).checked_pow(e as u32).unwrap_or(u128::MAX);
    pow(g, nerve.doubles.len()).saturating_mul(pow(h, nerve.triples.len()))
}

fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

type Assignment = (Vec<usize>, Vec<usize>);

fn to_cocycle(nerve: &CoverNerve, a: &Assignment) -> GluingCocycle {
    let mut data = GluingCocycle::empty();
    for (e, &v) in nerve.doubles.iter().zip(&a.0) {
        data.g.insert(*e, Element::Index(v));
    }
    for (s, &v) in nerve.triples.iter().zip(&a.1) {
        data.h.insert(*s, Element::Index(v));
    }
    data
}

fn from_cocycle(nerve: &CoverNerve, data: &GluingCocycle) -> Assignment {
    (
        nerve
            .doubles
            .iter()
            .map(|e| data.g[e].index().unwrap())
            .collect(),
        nerve
            .triples
            .iter()
            .map(|s| data.h[s].index().unwrap())
            .collect(),
    )
}

fn cocycles_over(
    cm: &CrossedModule,
    nerve: &CoverNerve,
    h: &FiniteGroup,
    g: &[usize],
) -> Result<Vec<Vec<usize>>> {
    let mut data = to_cocycle(nerve, &(g.to_vec(), vec![]));
    let mut candidates = Vec::with_capacity(nerve.triples.len());
    for &s in &nerve.triples {
        let mut ok = Vec::new();
        for v in 0..h.order() {
            data.h.insert(s, Element::Index(v));
            if triangle_ok(cm, &data, s)? {
                ok.push(v);
            }
        }
        if ok.is_empty() {
            return Ok(vec![]);
        }
        candidates.push(ok);
    }
    let mut found = Vec::new();
    let mut pick = vec![0; candidates.len()];
    loop {
        for (n, &s) in nerve.triples.iter().enumerate() {
            data.h.insert(s, Element::Index(candidates[n][pick[n]]));
        }
        let mut ok = true;
        for &q in &nerve.quadruples {
            let (l, r) = tetrahedron_sides(cm, &data, q)?;
            if !cm.cells_approx_eq(&l, &r) {
                ok = false;
                break;
            }
        }
        if ok {
            found.push(
                nerve
                    .triples
                    .iter()
                    .map(|s| data.h[s].index().unwrap())
                    .collect(),
            );
        }
        let mut advanced = false;
        for n in (0..pick.len()).rev() {
            pick[n] += 1;
            if pick[n] < candidates[n].len() {
                advanced = true;
                break;
            }
            pick[n] = 0;
        }
        if !advanced {
            break;
        }
    }
    Ok(found)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Enumerates normalized cocycles (`k_i = 1`) on `nerve` and sorts them into classes
/// under [`coboundary_act`]; refuses when `|G|^#doubles · |H|^#triples > budget`.
pub fn classify_finite(cm: &CrossedModule, nerve: &CoverNerve, budget: u128) -> Result<Census> {
    nerve.validate()?;
    let (Some(g), Some(h)) = (cm.g().finite(), cm.h().finite()) else {
        return Err(Error::Precondition(
            "classification needs finite groups".into(),
        ));
    };
    let size = search_space(g.order(), h.order(), nerve);
    if size > budget {
        return Err(Error::Budget { size, budget });
    }
    let mut g_values = Vec::new();
    let mut digits = vec![0; nerve.doubles.len()];
    loop {
        g_values.push(digits.clone());
        if !odometer(&mut digits, g.order()) {
            break;
        }
    }
    let per_g: Vec<Vec<Vec<usize>>> = g_values
        .par_iter()
        .map(|gv| cocycles_over(cm, nerve, h, gv))
        .collect::<Result<_>>()?;
    let cocycles: Vec<Assignment> = g_values
        .into_iter()
        .zip(per_g)
        .flat_map(|(gv, hs)| hs.into_iter().map(move |hv| (gv.clone(), hv)))
        .collect();
    let index: HashMap<&Assignment, usize> =
        cocycles.iter().enumerate().map(|(n, a)| (a, n)).collect();

    let mut generators = Vec::new();
    for &i in &nerve.charts {
        for v in 1..g.order() {
            let mut c = Change::identity();
            c.lambda.insert(i, Element::Index(v));
            generators.push(c);
        }
    }
    for &e in &nerve.doubles {
        for v in 1..h.order() {
            let mut c = Change::identity();
            c.b.insert(e, Element::Index(v));
            generators.push(c);
        }
    }
    let edges: Vec<Vec<usize>> = cocycles
        .par_iter()
        .map(|a| {
            let data = to_cocycle(nerve, a);
            generators
                .iter()
                .map(|c| {
                    let moved = from_cocycle(nerve, &coboundary_act(cm, &data, c)?);
                    index.get(&moved).copied().ok_or_else(|| {
                        Error::Precondition("coboundary action left the cocycle set".into())
                    })
                })
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let mut parent: Vec<usize> = (0..cocycles.len()).collect();
    for (a, targets) in edges.iter().enumerate() {
        for &b in targets {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut reps: Vec<usize> = (0..cocycles.len())
        .filter(|&n| find(&mut parent, n) == n)
        .collect();
    reps.sort_by(|&x, &y| cocycles[x].cmp(&cocycles[y]));
    let representatives = reps
        .iter()
        .map(|&n| {
            let (gv, hv) = &cocycles[n];
            (
                gv.iter().map(|&v| g.label(v).to_string()).collect(),
                hv.iter().map(|&v| h.label(v).to_string()).collect(),
            )
        })
        .collect();
    Ok(Census {
        search_space: size,
        cocycles: cocycles.len(),
        orbits: reps.len(),
        representatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shipped::crossed_module;

    fn labels(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn nerve_validation() {
        assert!(CoverNerve::tetrahedron().validate().is_ok());
        assert!(CoverNerve::tetrahedron_boundary().validate().is_ok());
        let mut bad = CoverNerve::tetrahedron();
        bad.doubles.retain(|d| *d != [2, 3]);
        let err = bad.validate().unwrap_err().to_string();
        assert!(err.contains("needs double (2,3)"), "{err}");
        let unordered = CoverNerve {
            charts: vec![1, 2],
            doubles: vec![[2, 1]],
            triples: vec![],
            quadruples: vec![],
        };
        assert!(unordered.validate().is_err());
        let n = parse_nerve("charts = [1, 2]\ndoubles = [[1, 2]]\n").unwrap();
        assert_eq!(n.doubles, vec![[1, 2]]);
        assert!(parse_nerve("charts = [1]\ntriples = [[1, 2, 3]]").is_err());
    }

    #[test]
    fn strict_cocycle_passes_triangle() {
        let cm = crossed_module("IDENTITY(S3)").unwrap();
        let nerve = CoverNerve::complete(3);
        let g = labels(&[("1,2", "(12)"), ("2,3", "(123)"), ("1,3", "(12)")]);
        let mut data =
            GluingCocycle::from_labels(&cm, &g, &BTreeMap::new(), &BTreeMap::new()).unwrap();
        let g13 = cm.g().mul(&data.g[&[1, 2]], &data.g[&[2, 3]]).unwrap();
        data.g.insert([1, 3], g13);
        data.h.insert([1, 2, 3], cm.h().identity());
        assert!(check_triangle(&cm, &nerve, &data).unwrap().passed());
    }

    fn s3_tetrahedron() -> (CrossedModule, CoverNerve, GluingCocycle) {
        let cm = crossed_module("IDENTITY(S3)").unwrap();
        let nerve = CoverNerve::tetrahedron();
        let g = labels(&[
            ("1,2", "(12)"),
            ("1,3", "(123)"),
            ("1,4", "(23)"),
            ("2,3", "(13)"),
            ("2,4", "e"),
            ("3,4", "(132)"),
        ]);
        let mut data =
            GluingCocycle::from_labels(&cm, &g, &BTreeMap::new(), &BTreeMap::new()).unwrap();
        for &s in &nerve.triples {
            let [i, j, k] = s;
            let want = cm.g().mul(&data.g[&[i, j]], &data.g[&[j, k]]).unwrap();
            let h = cm
                .g()
                .mul(&want, &cm.g().inv(&data.g[&[i, k]]).unwrap())
                .unwrap();
            data.h.insert(s, h);
        }
        data.normalize_units(&cm, &nerve);
        (cm, nerve, data)
    }

    #[test]
    fn constructed_s3_fixture_passes_and_corruption_fails() {
        let (cm, nerve, data) = s3_tetrahedron();
        let r = check_all(&cm, &nerve, &data).unwrap();
        assert!(r.passed(), "{r:?}");
        let mut bad = data.clone();
        let h = bad.h[&[1, 2, 4]].clone();
        bad.h
            .insert([1, 2, 4], cm.h().mul(&h, &Element::Index(4)).unwrap());
        let r = check_triangle(&cm, &nerve, &bad).unwrap();
        assert!(r
            .get("triangle")
            .unwrap()
            .witness
            .as_ref()
            .unwrap()
            .contains("(1,2,4)"));
        let r = check_tetrahedron(&cm, &nerve, &bad).unwrap();
        assert!(!r.passed());
        assert!(r
            .get("tetrahedron")
            .unwrap()
            .witness
            .as_ref()
            .unwrap()
            .contains("(1,2,3,4)"));
    }

    #[test]
    fn abelian_units() {
        let cm = crossed_module("ABELIAN(Z5)").unwrap();
        let nerve = CoverNerve::complete(2);
        let mut data = GluingCocycle::from_labels(
            &cm,
            &labels(&[("1,1", "e"), ("2,2", "e"), ("1,2", "e")]),
            &labels(&[("1,1,2", "3"), ("1,2,2", "3")]),
            &labels(&[("1", "3"), ("2", "3")]),
        )
        .unwrap();
        assert!(check_unit_laws(&cm, &nerve, &data).unwrap().passed());
        data.k.insert(2, Element::Index(1));
        let r = check_unit_laws(&cm, &nerve, &data).unwrap();
        assert!(r.get("left unit").unwrap().passed());
        assert!(r.get("right unit").unwrap().failed());
    }

    #[test]
    fn missing_data_is_an_error() {
        let cm = crossed_module("IDENTITY(S3)").unwrap();
        let nerve = CoverNerve::complete(3);
        let err = check_triangle(&cm, &nerve, &GluingCocycle::empty()).unwrap_err();
        assert!(err.to_string().contains("missing"));
        let bad = GluingCocycle::from_labels(
            &cm,
            &labels(&[("1,2", "(45)"), ("x", "e")]),
            &BTreeMap::new(),
            &BTreeMap::new(),
        );
        let msg = bad.unwrap_err().to_string();
        assert!(msg.contains("(45)") && msg.contains("`x`"), "{msg}");
    }

    fn random_change(cm: &CrossedModule, nerve: &CoverNerve, seed: u64) -> Change {
        use rand::Rng;
        let mut rng = crate::rng::stream(seed, 9);
        let mut c = Change::identity();
        for &i in &nerve.charts {
            c.lambda.insert(i, cm.g().random_element(&mut rng, 1.0));
        }
        for &e in &nerve.doubles {
            if rng.random_bool(0.7) {
                c.b.insert(e, cm.h().random_element(&mut rng, 1.0));
            }
        }
        c
    }

    #[test]
    fn coboundary_round_trip_and_closure() {
        for id in ["IDENTITY(S3)", "AUT(S3)", "Z2_ON_Z3"] {
            let cm = crossed_module(id).unwrap();
            let nerve = CoverNerve::tetrahedron();
            let mut data = GluingCocycle::empty();
            for &e in &nerve.doubles {
                data.g.insert(e, cm.g().identity());
            }
            for &s in &nerve.triples {
                data.h.insert(s, cm.h().identity());
            }
            data.normalize_units(&cm, &nerve);
            assert_eq!(
                coboundary_act(&cm, &data, &Change::identity()).unwrap(),
                data
            );
            let mut cur = data.clone();
            for n in 0..100 {
                let c = random_change(&cm, &nerve, n);
                let next = coboundary_act(&cm, &cur, &c).unwrap();
                assert!(
                    check_all(&cm, &nerve, &next).unwrap().passed(),
                    "{id} step {n}"
                );
                let back = coboundary_act(&cm, &next, &c.inverse(&cm).unwrap()).unwrap();
                assert_eq!(back, cur, "{id} step {n}");
                cur = next;
            }
        }
    }

    #[test]
    fn single_chart_has_one_class() {
        let cm = crossed_module("AUT(S3)").unwrap();
        let nerve = CoverNerve::complete(1);
        let c = classify_finite(&cm, &nerve, DEFAULT_BUDGET).unwrap();
        assert_eq!((c.cocycles, c.orbits), (1, 1));
    }

    #[test]
    fn budget_is_enforced() {
        let cm = crossed_module("IDENTITY(S3)").unwrap();
        match classify_finite(&cm, &CoverNerve::tetrahedron(), DEFAULT_BUDGET) {
            Err(Error::Budget { size, budget }) => {
                assert_eq!(size, 6u128.pow(10));
                assert_eq!(budget, DEFAULT_BUDGET);
            }
            other => panic!("{other:?}"),
        }
    }
}
