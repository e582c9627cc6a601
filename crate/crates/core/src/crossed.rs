//! Crossed modules `(G, H, t, α)` and their differential data.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{Element, FiniteGroup, Group, TAU_GRP};
use crate::lie::LieAlgebra;
use crate::linalg::{self, Mat};
use crate::report::{Check, ValidationReport};

pub type BoundaryFn = Arc<dyn Fn(&Element) -> Element + Send + Sync>;
pub type ActionFn = Arc<dyn Fn(&Element, &Element) -> Element + Send + Sync>;
pub type AlgebraMap = Arc<dyn Fn(&Mat) -> Mat + Send + Sync>;
pub type AlgebraPairing = Arc<dyn Fn(&Mat, &Mat) -> Mat + Send + Sync>;
pub type GroupOnAlgebra = Arc<dyn Fn(&Element, &Mat) -> Mat + Send + Sync>;
pub type AlgebraOnGroup = Arc<dyn Fn(&Mat, &Element) -> Mat + Send + Sync>;

/// The differential crossed module `(𝔤, 𝔥, dt, dα)` plus the two linearizations of α
/// used by the transition laws.
#[derive(Clone)]
pub struct Differential {
    pub g_algebra: LieAlgebra,
    pub h_algebra: LieAlgebra,
    /// `dt: 𝔥 → 𝔤`.
    pub dt: AlgebraMap,
    /// `dα: 𝔤 × 𝔥 → 𝔥`.
    pub dalpha: AlgebraPairing,
    /// `α(g)_*: 𝔥 → 𝔥`, the derivative of the automorphism `α(g)` at the identity.
    pub act_on_algebra: GroupOnAlgebra,
    /// `dα(X)(h) = d/dε α(exp εX)(h)`, a tangent vector at `h` written as a matrix.
    pub dalpha_at: AlgebraOnGroup,
}

/// A crossed module of concrete groups.
#[derive(Clone)]
pub struct CrossedModule {
    name: String,
    g: Group,
    h: Group,
    boundary: BoundaryFn,
    action: ActionFn,
    differential: Option<Differential>,
}

impl fmt::Debug for CrossedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CrossedModule")
            .field("name", &self.name)
            .field("g", &self.g.name())
            .field("h", &self.h.name())
            .field("differential", &self.differential.is_some())
            .finish()
    }
}

/// Enumeration strategy for axiom checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

impl CrossedModule {
    pub fn new(
        name: impl Into<String>,
        g: Group,
        h: Group,
        boundary: BoundaryFn,
        action: ActionFn,
        differential: Option<Differential>,
    ) -> Self {
        Self {
            name: name.into(),
            g,
            h,
            boundary,
            action,
            differential,
        }
    }

    /// A finite crossed module from explicit tables: `t[h]` and `alpha[g][h]`.
    pub fn from_tables(
        name: impl Into<String>,
        g: FiniteGroup,
        h: FiniteGroup,
        t: Vec<usize>,
        alpha: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if t.len() != h.order() || t.iter().any(|&x| x >= g.order()) {
            return Err(Error::InvalidTable(
                "boundary table must map every element of H into G".into(),
            ));
        }
        if alpha.len() != g.order()
            || alpha
                .iter()
                .any(|row| row.len() != h.order() || row.iter().any(|&x| x >= h.order()))
        {
            return Err(Error::InvalidTable(
                "action table must have |G| rows of |H| entries in H".into(),
            ));
        }
        let boundary: BoundaryFn =
            Arc::new(move |x: &Element| Element::Index(t[x.index().expect("finite element")]));
        let action: ActionFn = Arc::new(move |a: &Element, b: &Element| {
            Element::Index(
                alpha[a.index().expect("finite element")][b.index().expect("finite element")],
            )
        });
        Ok(Self::new(
            name,
            Group::Finite(g),
            Group::Finite(h),
            boundary,
            action,
            None,
        ))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn g(&self) -> &Group {
        &self.g
    }

    pub fn h(&self) -> &Group {
        &self.h
    }

    pub fn differential(&self) -> Option<&Differential> {
        self.differential.as_ref()
    }

    pub fn require_differential(&self) -> Result<&Differential> {
        self.differential.as_ref().ok_or_else(|| {
            Error::Config(format!(
                "crossed module {} has no differential data",
                self.name
            ))
        })
    }

    pub fn is_finite(&self) -> bool {
        self.g.is_finite() && self.h.is_finite()
    }

    /// The boundary map `t: H → G`.
    pub fn t(&self, h: &Element) -> Element {
        (self.boundary)(h)
    }

    /// The action `α(g)(h)`.
    pub fn alpha(&self, g: &Element, h: &Element) -> Element {
        (self.action)(g, h)
    }

    fn pick(&self, group: &Group, mode: Mode, rng: &mut ChaCha8Rng) -> Vec<Element> {
        match mode {
            Mode::Exhaustive => group.elements().expect("exhaustive mode on finite groups"),
            Mode::Sampled { .. } => vec![group.random_element(rng, 1.5)],
        }
    }

    /// Checks the homomorphism, action, equivariance and Peiffer axioms.
    pub fn validate(&self, mode: Mode) -> Result<ValidationReport> {
        let (g, h) = (&self.g, &self.h);
        if mode == Mode::Exhaustive {
            let (Some(ng), Some(nh)) = (g.order(), h.order()) else {
                return Err(Error::Precondition(
                    "exhaustive validation requires finite G and H".into(),
                ));
            };
            let (ng, nh) = (ng as u128, nh as u128);
            if ng * nh * nh > 1_000_000 || ng * ng * nh > 1_000_000 {
                return Err(Error::Precondition(format!(
                    "exhaustive validation over |G|={ng}, |H|={nh} exceeds 10^6 triples"
                )));
            }
        }
        let (seed, rounds) = match mode {
            Mode::Exhaustive => (0, 1),
            Mode::Sampled { samples, seed } => (seed, samples.max(1)),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tol = if self.is_finite() { 0.0 } else { TAU_GRP };
        let dg = |a: &Element| g.describe(a);
        let dh = |a: &Element| h.describe(a);

        let mut membership = Check::new("membership").with_tolerance(tol);
        let mut hom = Check::new("t homomorphism").with_tolerance(tol);
        let mut unit = Check::new("alpha unit").with_tolerance(tol);
        let mut auto = Check::new("alpha automorphism").with_tolerance(tol);
        let mut action = Check::new("alpha action").with_tolerance(tol);
        let mut equiv = Check::new("equivariance").with_tolerance(tol);
        let mut peiffer = Check::new("peiffer").with_tolerance(tol);

        for _ in 0..rounds {
            let hs = self.pick(h, mode, &mut rng);
            let hs2 = self.pick(h, mode, &mut rng);
            let gs = self.pick(g, mode, &mut rng);
            let gs2 = self.pick(g, mode, &mut rng);

            for x in &hs {
                let tx = self.t(x);
                let d = if g.contains(&tx) { 0.0 } else { f64::INFINITY };
                membership.record_residual(d, || format!("t({}) not in G", dh(x)));
                let r = h.distance(&self.alpha(&g.identity(), x), x);
                unit.record_residual(r, || format!("h={}", dh(x)));
                for y in &hs2 {
                    let lhs = self.t(&h.mul(x, y)?);
                    let rhs = g.mul(&self.t(x), &self.t(y))?;
                    hom.record_residual(g.distance(&lhs, &rhs), || {
                        format!("h={}, h'={}", dh(x), dh(y))
                    });
                    let lhs = self.alpha(&self.t(x), y);
                    let rhs = h.conj(x, y)?;
                    peiffer.record_residual(h.distance(&lhs, &rhs), || {
                        format!("h={}, h'={}", dh(x), dh(y))
                    });
                }
            }
            for a in &gs {
                for x in &hs {
                    let ax = self.alpha(a, x);
                    let d = if h.contains(&ax) { 0.0 } else { f64::INFINITY };
                    membership
                        .record_residual(d, || format!("alpha({})({}) not in H", dg(a), dh(x)));
                    let lhs = self.t(&ax);
                    let rhs = g.conj(a, &self.t(x))?;
                    equiv.record_residual(g.distance(&lhs, &rhs), || {
                        format!("g={}, h={}", dg(a), dh(x))
                    });
                    for y in &hs2 {
                        let lhs = self.alpha(a, &h.mul(x, y)?);
                        let rhs = h.mul(&ax, &self.alpha(a, y))?;
                        auto.record_residual(h.distance(&lhs, &rhs), || {
                            format!("g={}, h={}, h'={}", dg(a), dh(x), dh(y))
                        });
                    }
                    for b in &gs2 {
                        let lhs = self.alpha(&g.mul(a, b)?, x);
                        let rhs = self.alpha(a, &self.alpha(b, x));
                        action.record_residual(h.distance(&lhs, &rhs), || {
                            format!("g={}, g'={}, h={}", dg(a), dg(b), dh(x))
                        });
                    }
                }
            }
        }

        let mut report = ValidationReport::new(format!("crossed module {}", self.name));
        for c in [membership, hom, unit, auto, action, equiv, peiffer] {
            report.push(c);
        }
        Ok(report)
    }

    /// First-order agreement of `dt`, `dα` and the α-linearizations with finite
    /// differences of `t` and `α` along curves through the identity.
    ///
    /// Each check reports `max residual / ε²` and passes below 10.
    pub fn differential_consistency(
        &self,
        samples: usize,
        step: f64,
        seed: u64,
    ) -> Result<ValidationReport> {
        let diff = self.require_differential()?;
        let (Some(gfam), Some(hfam)) = (self.g.family(), self.h.family()) else {
            return Err(Error::Precondition(
                "differential consistency requires matrix groups".into(),
            ));
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eps = step;
        let bound = 10.0;
        let mut c_dt = Check::new("dt first order").with_tolerance(bound);
        let mut c_on_group = Check::new("dalpha on group first order").with_tolerance(bound);
        let mut c_dalpha = Check::new("dalpha first order").with_tolerance(bound);
        let mut c_act = Check::new("alpha linearization").with_tolerance(bound);
        let (ga, ha) = (&diff.g_algebra, &diff.h_algebra);
        let rand_in = |alg: &LieAlgebra, rng: &mut ChaCha8Rng| -> Mat {
            use rand::Rng;
            let coeffs: Vec<f64> = (0..alg.dim())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            alg.combine(&coeffs)
        };
        for _ in 0..samples.max(1) {
            let x = rand_in(ha, &mut rng);
            let y = rand_in(ga, &mut rng);
            let h0 = self.h.random_element(&mut rng, 0.5);
            let g0 = self.g.random_element(&mut rng, 0.5);

            let lhs = self.t(&Element::Matrix(hfam.exp(&linalg::scale(&x, eps))));
            let rhs = gfam.exp(&linalg::scale(&(diff.dt)(&x), eps));
            let r = linalg::dist(lhs.matrix().unwrap(), &rhs) / (eps * eps);
            c_dt.record_residual(r, || "random x in h".into());

            let moved = self.alpha(&Element::Matrix(gfam.exp(&linalg::scale(&y, eps))), &h0);
            let first = h0.matrix().unwrap() + linalg::scale(&(diff.dalpha_at)(&y, &h0), eps);
            let r = linalg::dist(moved.matrix().unwrap(), &first) / (eps * eps);
            c_on_group.record_residual(r, || "random y in g, h near identity".into());

            // α(exp εy)(exp εx) = exp(εx + ε² dα(y)(x) + O(ε³))
            let moved = self.alpha(
                &Element::Matrix(gfam.exp(&linalg::scale(&y, eps))),
                &Element::Matrix(hfam.exp(&linalg::scale(&x, eps))),
            );
            let log = self.h.log(&moved)?;
            let predicted =
                linalg::scale(&x, eps) + linalg::scale(&(diff.dalpha)(&y, &x), eps * eps);
            let r = linalg::dist(&log, &predicted) / (eps * eps);
            c_dalpha.record_residual(r, || "random y in g, x in h".into());

            // α(g)(exp εx) = exp(ε α(g)_* x + O(ε²))
            let moved = self.alpha(&g0, &Element::Matrix(hfam.exp(&linalg::scale(&x, eps))));
            let log = self.h.log(&moved)?;
            let predicted = linalg::scale(&(diff.act_on_algebra)(&g0, &x), eps);
            let r = linalg::dist(&log, &predicted) / (eps * eps);
            c_act.record_residual(r, || "random g, x in h".into());
        }
        let mut report = ValidationReport::new(format!("differential data of {}", self.name));
        for c in [c_dt, c_on_group, c_dalpha, c_act] {
            report.push(c.with_note(format!("residual / eps^2 at eps = {eps:e}")));
        }
        Ok(report)
    }
}
