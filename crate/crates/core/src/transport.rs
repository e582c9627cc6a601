//! Path and surface holonomy of local 2-connections, and the transition-law checkers.
//!
//! Path transport solves `W′(s) = −A(γ′(s))·W(s)`, `W(0) = 1` with classical RK4 and
//! per-step projection onto the group. With this order
//! `hol(γ₁∘γ₂) = hol(γ₂)·hol(γ₁)`; [`diamond`] is the monoid order in which
//! `hol(γ₁∘γ₂) = hol(γ₁) ⋄ hol(γ₂)`.
//!
//! Surface transport sweeps the sheets `γ_t = Σ(·, t)`. With `W_t` the partial
//! transport along `γ_t` and `g_t = W_t(1)`, the label solves
//!
//! ```text
//! h′(t) = X(t)·h(t),   X(t) = −∫₀¹ α(g_t·W_t(s)⁻¹)_*(B(∂_sΣ, ∂_tΣ)) ds,   h(0) = 1
//! ```
//!
//! (Simpson in `s`, RK4 in both directions). When `F_A + dt(B) = 0` this gives
//! `t(h)·g₀ = g₁`, so `(g₀, h)` is a 2-cell from the source holonomy to the target
//! holonomy. Vertical composites of bigons map to vertical composites of cells;
//! horizontal composites reverse order like paths do:
//! `hol(Σ₁ ∘ Σ₂) = hol(Σ₂) ∘ hol(Σ₁)`.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::crossed::CrossedModule;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::form::{Composites, Form};
use crate::geometry::{Bigon, Path};
use crate::group::{Element, Group, MatrixFamily};
use crate::linalg::{self, Mat};
use crate::report::{Check, ValidationReport};
use crate::two_group::TwoCell;

pub type GroupMapFn = Arc<dyn Fn(&[f64]) -> Result<Mat> + Send + Sync>;

pub const TAU_FAKE: f64 = 1e-6;
pub const DEFAULT_GRID: usize = 128;
pub const DIFFERENCE_STEP: f64 = 1e-5;

fn re(x: f64) -> num_complex::Complex64 {
    linalg::c(x, 0.0)
}

fn family(group: &Group) -> Result<MatrixFamily> {
    group
        .family()
        .ok_or_else(|| Error::Domain(format!("{} is not a matrix group", group.name())))
}

fn matrix(e: &Element) -> &Mat {
    e.matrix().expect("matrix group element")
}

fn inverse(fam: MatrixFamily, m: &Mat) -> Mat {
    match fam {
        MatrixFamily::GL(_) => m
            .clone()
            .try_inverse()
            .unwrap_or_else(|| m.map(|_| f64::NAN.into())),
        _ => m.adjoint(),
    }
}

/// `a ⋄ b = b·a`, the order in which path holonomy is a monoid homomorphism.
pub fn diamond(group: &Group, a: &Element, b: &Element) -> Result<Element> {
    group.mul(b, a)
}

/// The 𝔤-valued 1-form `A` and 𝔥-valued 2-form `B` on one chart.
#[derive(Clone, Debug)]
pub struct LocalConnection {
    pub chart: String,
    pub a: Form,
    pub b: Form,
}

impl LocalConnection {
    pub fn new(chart: impl Into<String>, a: Form, b: Form) -> Self {
        Self {
            chart: chart.into(),
            a,
            b,
        }
    }

    pub fn composites(&self, cm: &CrossedModule) -> Result<Composites> {
        Composites::new(cm, self.a.clone(), Some(self.b.clone()), None)
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }
}

/// RK4 transport along `path` on `n` steps; returns `W` at the `n + 1` grid nodes.
fn transport_nodes(
    fam: MatrixFamily,
    a: &Form,
    jet: impl Fn(f64) -> (Vec<f64>, Vec<f64>),
    n: usize,
) -> Result<Vec<Mat>> {
    let h = 1.0 / n as f64;
    let field = |s: f64| -> Result<Mat> {
        let (x, v) = jet(s);
        Ok(-a.eval(&x, &[&v])?)
    };
    let mut w = linalg::eye(fam.size());
    let mut out = Vec::with_capacity(n + 1);
    out.push(w.clone());
    let mut m0 = field(0.0)?;
    for k in 0..n {
        let s = k as f64 * h;
        let mh = field(s + 0.5 * h)?;
        let m1 = field(s + h)?;
        let k1 = &m0 * &w;
        let k2 = &mh * (&w + &k1 * re(0.5 * h));
        let k3 = &mh * (&w + &k2 * re(0.5 * h));
        let k4 = &m1 * (&w + &k3 * re(h));
        w = fam.renormalize(&w + (k1 + k2 * re(2.0) + k3 * re(2.0) + k4) * re(h / 6.0));
        out.push(w.clone());
        m0 = m1;
    }
    Ok(out)
}

fn check_path_inputs(
    cm: &CrossedModule,
    a: &Form,
    dim: usize,
    steps: usize,
) -> Result<MatrixFamily> {
    if steps < 2 {
        return Err(Error::Domain(format!(
            "holonomy needs at least 2 steps, got {steps}"
        )));
    }
    if a.degree() != 1 {
        return Err(Error::Domain("A must be a 1-form".into()));
    }
    if a.dim() != dim {
        return Err(Error::Domain(format!(
            "A lives on a {}-dimensional chart but the path is in ℝ^{dim}",
            a.dim()
        )));
    }
    let fam = family(cm.g())?;
    if a.algebra() != &fam.algebra() {
        return Err(Error::Domain(format!(
            "A takes values in {}, the structure group needs {}",
            a.algebra().name(),
            fam.algebra().name()
        )));
    }
    Ok(fam)
}

/// `W(1)` for `W′ = −A(γ′)W`, `W(0) = 1`.
pub fn path_holonomy(cm: &CrossedModule, a: &Form, path: &Path, steps: usize) -> Result<Element> {
    let fam = check_path_inputs(cm, a, path.dim(), steps)?;
    let nodes = transport_nodes(fam, a, |s| path.jet(s), steps)?;
    Ok(Element::Matrix(nodes.into_iter().next_back().unwrap()))
}

/// Alias of [`path_holonomy`], composed with [`diamond`].
pub fn hol_cat(cm: &CrossedModule, a: &Form, path: &Path, steps: usize) -> Result<Element> {
    path_holonomy(cm, a, path, steps)
}

/// Result of a surface transport.
#[derive(Clone, Debug)]
pub struct SurfaceHolonomy {
    pub cell: TwoCell,
    /// Holonomy of the target path computed on the same grid.
    pub target_holonomy: Element,
    /// `‖t(h)·g − hol(target)‖`.
    pub target_defect: f64,
    /// Largest `‖F_A + dt(B)‖` on coordinate planes at sampled image points.
    pub fake_curvature: Option<f64>,
    pub warning: Option<String>,
}

impl SurfaceHolonomy {
    pub fn is_flat(&self) -> bool {
        self.warning.is_none()
    }
}

/// `max_{i<j} ‖(F_A + dt B)(x)(e_i, e_j)‖`.
pub fn fake_curvature_norm(comp: &Composites, x: &[f64]) -> Result<f64> {
    let n = x.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let mut u = vec![0.0; n];
            let mut v = vec![0.0; n];
            u[i] = 1.0;
            v[j] = 1.0;
            worst = worst.max(linalg::norm(&comp.fake_curvature(x, &u, &v)?));
        }
    }
    Ok(worst)
}

struct Sheet {
    x: Mat,
    g: Mat,
}

fn sheet(
    cm: &CrossedModule,
    conn: &LocalConnection,
    fam: MatrixFamily,
    bigon: &Bigon,
    t: f64,
    n: usize,
) -> Result<Sheet> {
    let d = cm.require_differential()?;
    let edge = |s: f64| {
        let (p, ds, _) = bigon.jet(s, t);
        (p, ds)
    };
    let nodes = transport_nodes(fam, &conn.a, edge, n)?;
    let g = nodes[n].clone();
    let mut x = d.h_algebra.zero();
    for (k, w) in nodes.iter().enumerate() {
        let weight = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let s = k as f64 / n as f64;
        let (p, ds, dt) = bigon.jet(s, t);
        let b = conn.b.eval(&p, &[&ds, &dt])?;
        if linalg::norm(&b) == 0.0 {
            continue;
        }
        let conj = Element::Matrix(&g * inverse(fam, w));
        x += (d.act_on_algebra)(&conj, &b) * re(weight);
    }
    Ok(Sheet {
        x: x * re(-1.0 / (3.0 * n as f64)),
        g,
    })
}

/// Surface holonomy `(g, h)` of `bigon` on an `grid × grid` lattice (`grid` even, ≥ 4).
pub fn surface_holonomy(
    cm: &CrossedModule,
    conn: &LocalConnection,
    bigon: &Bigon,
    grid: usize,
) -> Result<SurfaceHolonomy> {
    if grid < 4 || grid % 2 == 1 {
        return Err(Error::Domain(format!(
            "surface grid must be even and at least 4, got {grid}"
        )));
    }
    let fam = check_path_inputs(cm, &conn.a, bigon.dim(), grid)?;
    let hfam = family(cm.h())?;
    let d = cm.require_differential()?;
    if conn.b.degree() != 2 || conn.b.algebra() != &d.h_algebra || conn.b.dim() != bigon.dim() {
        return Err(Error::Domain(format!(
            "B must be a 2-form on ℝ^{} with values in {}",
            bigon.dim(),
            d.h_algebra.name()
        )));
    }
    let sheets: Vec<Sheet> = (0..=2 * grid)
        .into_par_iter()
        .map(|j| sheet(cm, conn, fam, bigon, j as f64 / (2 * grid) as f64, grid))
        .collect::<Result<_>>()?;

    let step = 1.0 / grid as f64;
    let mut h = linalg::eye(hfam.size());
    for m in 0..grid {
        let (x0, xh, x1) = (&sheets[2 * m].x, &sheets[2 * m + 1].x, &sheets[2 * m + 2].x);
        let k1 = x0 * &h;
        let k2 = xh * (&h + &k1 * re(0.5 * step));
        let k3 = xh * (&h + &k2 * re(0.5 * step));
        let k4 = x1 * (&h + &k3 * re(step));
        h = hfam.renormalize(&h + (k1 + k2 * re(2.0) + k3 * re(2.0) + k4) * re(step / 6.0));
    }
    let g = Element::Matrix(sheets[0].g.clone());
    let h = Element::Matrix(h);
    let target = Element::Matrix(sheets[2 * grid].g.clone());
    let predicted = cm.g().mul(&cm.t(&h), &g)?;
    let target_defect = cm.g().distance(&predicted, &target);

    let fake_curvature = conn
        .composites(cm)
        .ok()
        .filter(|c| {
            c.curvature(
                &vec![0.0; bigon.dim()],
                &vec![0.0; bigon.dim()],
                &vec![0.0; bigon.dim()],
            )
            .is_ok()
        })
        .map(|c| sample_fake_curvature(&c, bigon))
        .transpose()?;
    let warning = match fake_curvature {
        Some(f) if f <= TAU_FAKE => None,
        Some(f) => Some(format!(
            "fake curvature {f:.3e} exceeds {TAU_FAKE:e}; the target law is not expected to hold"
        )),
        None => Some("fake curvature could not be evaluated (A is not symbolic)".into()),
    };
    Ok(SurfaceHolonomy {
        cell: TwoCell::new(g, h),
        target_holonomy: target,
        target_defect,
        fake_curvature,
        warning,
    })
}

fn sample_fake_curvature(comp: &Composites, bigon: &Bigon) -> Result<f64> {
    let k = 16;
    let mut worst: f64 = 0.0;
    for i in 0..=k {
        for j in 0..=k {
            let x = bigon.point(i as f64 / k as f64, j as f64 / k as f64);
            worst = worst.max(fake_curvature_norm(comp, &x)?);
        }
    }
    Ok(worst)
}

/// `F_A(v₁, v₂) + dt(B(v₁, v₂))` at `x`.
pub fn fake_curvature_at(
    cm: &CrossedModule,
    conn: &LocalConnection,
    x: &[f64],
    v1: &[f64],
    v2: &[f64],
) -> Result<Mat> {
    conn.composites(cm)?.fake_curvature(x, v1, v2)
}

/// `H₃(v₁, v₂, v₃) = (dB + dα(A)∧B)(v₁, v₂, v₃)` at `x`.
pub fn curvature_3form_at(
    cm: &CrossedModule,
    conn: &LocalConnection,
    x: &[f64],
    v: [&[f64]; 3],
) -> Result<Mat> {
    conn.composites(cm)?.h3(x, v[0], v[1], v[2])
}

/// A coordinate box `[lo, hi]` in ℝⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Domain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Config(
                "box corners must have the same positive dimension".into(),
            ));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::Config(format!("empty box {lo:?}..{hi:?}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self {
            lo: vec![lo; dim],
            hi: vec![hi; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn intersect(&self, other: &Domain) -> Result<Domain> {
        if self.dim() != other.dim() {
            return Err(Error::Config(
                "boxes of different dimension do not overlap".into(),
            ));
        }
        let lo: Vec<f64> = self
            .lo
            .iter()
            .zip(&other.lo)
            .map(|(a, b)| a.max(*b))
            .collect();
        let hi: Vec<f64> = self
            .hi
            .iter()
            .zip(&other.hi)
            .map(|(a, b)| a.min(*b))
            .collect();
        Domain::new(lo, hi).map_err(|_| Error::Config("charts do not overlap".into()))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| rng.random_range(*a..*b))
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (a, b))| *a <= *v && *v <= *b)
    }
}

fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Checks `‖dt(H₃)‖ < tol` at `samples` random points, where fake curvature also
/// stays below [`TAU_FAKE`]; points with nonzero fake curvature are counted in the note.
pub fn kernel_check<R: Rng + ?Sized>(
    cm: &CrossedModule,
    conn: &LocalConnection,
    domain: &Domain,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<ValidationReport> {
    let comp = conn.composites(cm)?;
    let n = domain.dim();
    if n < 3 {
        let mut r = ValidationReport::new("curvature 3-form");
        r.push(Check::skipped("dt(H3) = 0", "no 3-forms below dimension 3"));
        return Ok(r);
    }
    let mut check = Check::new("dt(H3) = 0").with_tolerance(tol);
    let mut flat = Check::new("fake curvature").with_tolerance(TAU_FAKE);
    for _ in 0..samples {
        let x = domain.sample(rng);
        let (u, v, w) = (
            random_vector(rng, n),
            random_vector(rng, n),
            random_vector(rng, n),
        );
        let fc = fake_curvature_norm(&comp, &x)?;
        flat.record_residual(fc, || format!("x={x:?}"));
        if fc > TAU_FAKE {
            continue;
        }
        let r = linalg::norm(&comp.dt_h3(&x, &u, &v, &w)?);
        check.record_residual(r, || format!("x={x:?}"));
    }
    if check.checked == 0 {
        check = Check::skipped("dt(H3) = 0", "fake curvature is nonzero at every sample");
    }
    let mut r = ValidationReport::new("curvature 3-form");
    r.push(flat);
    r.push(check);
    Ok(r)
}

/// A smooth map from a chart into a matrix group.
#[derive(Clone)]
pub enum GroupMap {
    /// `x ↦ Π_k exp(c_k(x) X_k)` with the factors applied left to right.
    Exp {
        family: MatrixFamily,
        factors: Vec<(Expr, Mat)>,
        gradients: Vec<Vec<Expr>>,
    },
    /// A map known only pointwise; derivatives by central differences.
    Pointwise {
        family: MatrixFamily,
        eval: GroupMapFn,
    },
}

impl std::fmt::Debug for GroupMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupMap::Exp {
                family, factors, ..
            } => {
                let parts: Vec<String> =
                    factors.iter().map(|(e, _)| format!("exp({e}·X)")).collect();
                write!(f, "GroupMap::Exp({family:?}: {})", parts.join(" "))
            }
            GroupMap::Pointwise { family, .. } => write!(f, "GroupMap::Pointwise({family:?})"),
        }
    }
}

impl GroupMap {
    /// `Π exp(c_k(x) e_{a_k})` for basis indices `a_k` (zero-based) of the family's algebra.
    pub fn exp_product(
        family: MatrixFamily,
        dim: usize,
        factors: Vec<(usize, Expr)>,
    ) -> Result<Self> {
        let alg = family.algebra();
        let mut out = Vec::with_capacity(factors.len());
        let mut gradients = Vec::with_capacity(factors.len());
        for (a, e) in factors {
            if a >= alg.dim() {
                return Err(Error::Config(format!(
                    "basis index {} out of range for {}",
                    a + 1,
                    alg.name()
                )));
            }
            if e.arity() > dim {
                return Err(Error::Config(format!(
                    "`{e}` uses x{} on a {dim}-dimensional chart",
                    e.arity()
                )));
            }
            gradients.push((0..dim).map(|j| e.differentiate(j)).collect());
            out.push((e, alg.basis()[a].clone()));
        }
        Ok(GroupMap::Exp {
            family,
            factors: out,
            gradients,
        })
    }

    pub fn constant_identity(family: MatrixFamily) -> Self {
        GroupMap::Exp {
            family,
            factors: vec![],
            gradients: vec![],
        }
    }

    pub fn family(&self) -> MatrixFamily {
        match self {
            GroupMap::Exp { family, .. } | GroupMap::Pointwise { family, .. } => *family,
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<Mat> {
        match self {
            GroupMap::Exp {
                family, factors, ..
            } => {
                let mut g = linalg::eye(family.size());
                for (c, gen) in factors {
                    g *= linalg::expm(&(gen * re(c.eval(x)?)));
                }
                Ok(family.renormalize(g))
            }
            GroupMap::Pointwise { eval, .. } => eval(x),
        }
    }

    /// `dg(x)(v)` as a tangent matrix at `g(x)`.
    pub fn differential(&self, x: &[f64], v: &[f64]) -> Result<Mat> {
        match self {
            GroupMap::Exp {
                family,
                factors,
                gradients,
            } => {
                let n = family.size();
                let exps: Vec<Mat> = factors
                    .iter()
                    .map(|(c, gen)| Ok(linalg::expm(&(gen * re(c.eval(x)?)))))
                    .collect::<Result<_>>()?;
                let mut total = linalg::zeros(n);
                let mut left = linalg::eye(n);
                for (k, (_, gen)) in factors.iter().enumerate() {
                    let mut rate = 0.0;
                    for (j, dj) in gradients[k].iter().enumerate() {
                        if v[j] != 0.0 {
                            rate += dj.eval(x)? * v[j];
                        }
                    }
                    if rate != 0.0 {
                        let mut right = exps[k].clone();
                        for e in &exps[k + 1..] {
                            right *= e;
                        }
                        total += &left * gen * right * re(rate);
                    }
                    left *= &exps[k];
                }
                Ok(total)
            }
            GroupMap::Pointwise { eval, .. } => {
                let e = DIFFERENCE_STEP;
                let plus: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + e * b).collect();
                let minus: Vec<f64> = x.iter().zip(v).map(|(a, b)| a - e * b).collect();
                Ok((eval(&plus)? - eval(&minus)?) * re(1.0 / (2.0 * e)))
            }
        }
    }
}

/// Transition data on a double overlap: `g_ij` and the 𝔥-valued 1-form `a_ij`.
#[derive(Clone, Debug)]
pub struct Transition {
    pub g: GroupMap,
    pub a: Option<Form>,
}

fn a_or_zero(cm: &CrossedModule, a: &Option<Form>, x: &[f64], v: &[f64]) -> Result<Mat> {
    match a {
        Some(a) => a.eval(x, &[v]),
        None => Ok(cm.require_differential()?.h_algebra.zero()),
    }
}

/// The right-hand sides `g A_j g⁻¹ + g d(g⁻¹) − dt(a)` and `α(g)(B_j) + k` at a point.
fn gauge_rhs(
    cm: &CrossedModule,
    conn_j: &LocalConnection,
    trans: &Transition,
    a_i: &Form,
    x: &[f64],
    u: &[f64],
    v: &[f64],
) -> Result<(Mat, Mat)> {
    let d = cm.require_differential()?;
    let fam = trans.g.family();
    let g = trans.g.value(x)?;
    let gi = inverse(fam, &g);
    let dg = trans.g.differential(x, u)?;
    let a_law =
        &g * conn_j.a.eval(x, &[u])? * &gi - &dg * &gi - (d.dt)(&a_or_zero(cm, &trans.a, x, u)?);
    let b_law = match &trans.a {
        Some(t) => {
            let comp = Composites::new(cm, a_i.clone(), None, Some(t.clone()))?;
            comp.k(x, u, v)?
        }
        None => d.h_algebra.zero(),
    } + (d.act_on_algebra)(&Element::Matrix(g), &conn_j.b.eval(x, &[u, v])?);
    Ok((a_law, b_law))
}

/// Samples the A-law and B-law on the overlap `domain`.
#[allow(clippy::too_many_arguments)]
pub fn check_transition_laws<R: Rng + ?Sized>(
    cm: &CrossedModule,
    conn_i: &LocalConnection,
    conn_j: &LocalConnection,
    trans: &Transition,
    domain: &Domain,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<ValidationReport> {
    let n = domain.dim();
    for (what, dim) in [("A_i", conn_i.dim()), ("A_j", conn_j.dim())] {
        if dim != n {
            return Err(Error::Config(format!(
                "{what} lives in dimension {dim}, overlap in {n}"
            )));
        }
    }
    if trans.g.family() != family(cm.g())? {
        return Err(Error::Config(
            "g_ij must take values in the structure group G".into(),
        ));
    }
    let a_name = if trans.a.is_some() {
        "A-law"
    } else {
        "A-law (a = 0)"
    };
    let mut a_check = Check::new(a_name).with_tolerance(tol);
    let mut b_check = Check::new("B-law").with_tolerance(tol);
    for _ in 0..samples {
        let x = domain.sample(rng);
        let (u, v) = (random_vector(rng, n), random_vector(rng, n));
        let (a_rhs, b_rhs) = gauge_rhs(cm, conn_j, trans, &conn_i.a, &x, &u, &v)?;
        let witness = || format!("x={x:?}");
        a_check.record_residual(linalg::dist(&conn_i.a.eval(&x, &[&u])?, &a_rhs), witness);
        b_check.record_residual(linalg::dist(&conn_i.b.eval(&x, &[&u, &v])?, &b_rhs), || {
            format!("x={x:?}")
        });
    }
    let mut r = ValidationReport::new(format!(
        "transition laws {} <- {}",
        conn_i.chart, conn_j.chart
    ));
    r.push(a_check);
    r.push(b_check);
    Ok(r)
}

/// `(A_i, B_i)` defined from `(A_j, B_j)` and the transition so that both laws hold.
pub fn gauge_transform(
    cm: &CrossedModule,
    chart: &str,
    conn_j: &LocalConnection,
    trans: &Transition,
) -> Result<LocalConnection> {
    let d = cm.require_differential()?;
    let (dim, cm1, cj, tr) = (conn_j.dim(), cm.clone(), conn_j.clone(), trans.clone());
    let a_eval: crate::form::PointwiseFn = Arc::new(move |x: &[f64], vs: &[&[f64]]| {
        let d = cm1.require_differential()?;
        let fam = tr.g.family();
        let g = tr.g.value(x)?;
        let gi = inverse(fam, &g);
        let dg = tr.g.differential(x, vs[0])?;
        Ok(&g * cj.a.eval(x, vs)? * &gi - &dg * &gi - (d.dt)(&a_or_zero(&cm1, &tr.a, x, vs[0])?))
    });
    let a_i = Form::Pointwise {
        degree: 1,
        dim,
        algebra: d.g_algebra.clone(),
        eval: a_eval,
    };
    let (cm2, cj2, tr2, a_i2) = (cm.clone(), conn_j.clone(), trans.clone(), a_i.clone());
    let b_eval: crate::form::PointwiseFn = Arc::new(move |x: &[f64], vs: &[&[f64]]| {
        Ok(gauge_rhs(&cm2, &cj2, &tr2, &a_i2, x, vs[0], vs[1])?.1)
    });
    let b_i = Form::Pointwise {
        degree: 2,
        dim,
        algebra: d.h_algebra.clone(),
        eval: b_eval,
    };
    Ok(LocalConnection::new(chart, a_i, b_i))
}

/// Data on a triple overlap for the a-law: the three transitions and `h_ijk`.
#[derive(Clone, Debug)]
pub struct TripleData {
    pub ij: Transition,
    pub jk: Transition,
    pub ik: Transition,
    pub h: GroupMap,
}

/// `h a_ik h⁻¹ + (dh) h⁻¹ + dα(A_i)(h) h⁻¹` and `a_ij + α(g_ij)_* a_jk` at a point.
fn a_law_sides(
    cm: &CrossedModule,
    tri: &TripleData,
    a_i: &Form,
    x: &[f64],
    v: &[f64],
) -> Result<(Mat, Mat)> {
    let d = cm.require_differential()?;
    let hfam = tri.h.family();
    let h = tri.h.value(x)?;
    let hi = inverse(hfam, &h);
    let he = Element::Matrix(h.clone());
    let lhs = a_or_zero(cm, &tri.ij.a, x, v)?
        + (d.act_on_algebra)(
            &Element::Matrix(tri.ij.g.value(x)?),
            &a_or_zero(cm, &tri.jk.a, x, v)?,
        );
    let rhs = &h * a_or_zero(cm, &tri.ik.a, x, v)? * &hi
        + tri.h.differential(x, v)? * &hi
        + (d.dalpha_at)(&a_i.eval(x, &[v])?, &he) * &hi;
    Ok((lhs, rhs))
}

/// Samples `a_ij + α(g_ij)a_jk = h a_ik h⁻¹ + (dh)h⁻¹ + dα(A_i)(h)h⁻¹`.
pub fn check_triple_overlap_a_law<R: Rng + ?Sized>(
    cm: &CrossedModule,
    tri: &TripleData,
    a_i: &Form,
    domain: &Domain,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<ValidationReport> {
    if tri.h.family() != family(cm.h())? {
        return Err(Error::Config("h_ijk must take values in H".into()));
    }
    if a_i.dim() != domain.dim() {
        return Err(Error::Config(
            "A_i and the triple overlap differ in dimension".into(),
        ));
    }
    let mut check = Check::new("triple a-law").with_tolerance(tol);
    for _ in 0..samples {
        let x = domain.sample(rng);
        let v = random_vector(rng, domain.dim());
        let (lhs, rhs) = a_law_sides(cm, tri, a_i, &x, &v)?;
        check.record_residual(linalg::dist(&lhs, &rhs), || format!("x={x:?}"));
    }
    let mut r = ValidationReport::new("triple overlap a-law");
    r.push(check);
    Ok(r)
}

/// The `a_ik` solving the triple a-law for the given `a_ij`, `a_jk`, `g_ij`, `h_ijk`, `A_i`.
pub fn solve_a_ik(cm: &CrossedModule, tri: &TripleData, a_i: &Form) -> Result<Form> {
    let d = cm.require_differential()?;
    let (cm1, tri1, a1) = (cm.clone(), tri.clone(), a_i.clone());
    let eval: crate::form::PointwiseFn = Arc::new(move |x: &[f64], vs: &[&[f64]]| {
        let mut t = tri1.clone();
        t.ik.a = None;
        let (lhs, rest) = a_law_sides(&cm1, &t, &a1, x, vs[0])?;
        let h = t.h.value(x)?;
        let hi = inverse(t.h.family(), &h);
        Ok(&hi * (lhs - rest) * &h)
    });
    Ok(Form::Pointwise {
        degree: 1,
        dim: a_i.dim(),
        algebra: d.h_algebra.clone(),
        eval,
    })
}

/// Errors against a reference run on `4 ×` the finest grid, with a least-squares order fit.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<(usize, f64)>,
    pub reference_grid: usize,
    pub order: f64,
}

impl ConvergenceTable {
    pub fn csv(&self) -> String {
        let mut out = String::from("grid,error\n");
        for (n, e) in &self.rows {
            out.push_str(&format!("{n},{e:e}\n"));
        }
        out
    }
}

pub fn convergence_study<T>(
    grids: &[usize],
    run: impl Fn(usize) -> Result<T>,
    distance: impl Fn(&T, &T) -> f64,
) -> Result<ConvergenceTable> {
    if grids.len() < 2 {
        return Err(Error::Domain(
            "a convergence study needs at least two grids".into(),
        ));
    }
    let finest = *grids.iter().max().unwrap();
    let reference = run(4 * finest)?;
    let mut rows = Vec::with_capacity(grids.len());
    for &n in grids {
        rows.push((n, distance(&run(n)?, &reference)));
    }
    Ok(ConvergenceTable {
        order: fitted_order(&rows),
        rows,
        reference_grid: 4 * finest,
    })
}

/// Slope of `−log(error)` against `log(N)`.
pub fn fitted_order(rows: &[(usize, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(n, e)| ((*n as f64).ln(), e.ln()))
        .collect();
    let m = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    -num / den
}

/// Matrix view of an element, for callers comparing holonomies.
pub fn element_matrix(e: &Element) -> &Mat {
    matrix(e)
}
