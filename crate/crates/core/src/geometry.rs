//! Paths `[0,1] → ℝⁿ` and bigons `[0,1]² → ℝⁿ` with sitting instants.
//!
//! Every map is evaluated together with its derivatives. Traces given as expressions
//! are composed with the smooth sitting reparametrization [`sitting`], which is flat
//! on `[0, δ]` and `[1 − δ, 1]`, so paths and bigons built from them are constant
//! near their ends and composites stay smooth across seams.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::report::{Check, ValidationReport};

pub const TAU_GEO: f64 = 1e-9;
pub const DEFAULT_SITTING: f64 = 0.1;
const CERTIFICATE_BOUND: f64 = 1e-10;
const CERTIFICATE_SAMPLES: usize = 50;

/// The smooth step `ψ(x) = f(x) / (f(x) + f(1 − x))`, `f(x) = exp(−1/x)`, with derivative.
pub fn smooth_step(x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0);
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    let da = a / (x * x);
    let db = b / ((1.0 - x) * (1.0 - x));
    let sum = a + b;
    (a / sum, (da * b + a * db) / (sum * sum))
}

/// `ρ_δ(s) = ψ((s − δ)/(1 − 2δ))` and its derivative.
pub fn sitting(delta: f64, s: f64) -> (f64, f64) {
    let w = 1.0 - 2.0 * delta;
    let (v, d) = smooth_step((s - delta) / w);
    (v, d / w)
}

fn check_width(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Domain(format!(
            "sitting width {delta} is not in (0, 1/2)"
        )));
    }
    Ok(())
}

/// Point and velocity of a parametrized curve.
pub trait PathMap: Send + Sync {
    fn dim(&self) -> usize;
    fn jet(&self, s: f64) -> (Vec<f64>, Vec<f64>);
}

/// Point and the partials `∂_s`, `∂_t` of a parametrized surface.
pub trait SurfaceMap: Send + Sync {
    fn dim(&self) -> usize;
    fn jet(&self, s: f64, t: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>);
}

/// A one-variable expression (in `x1`, `s`, `x2` or `t`) with its derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve1 {
    expr: Expr,
    deriv: Expr,
}

impl Curve1 {
    pub fn new(expr: Expr) -> Result<Self> {
        if expr.arity() > 2 {
            return Err(Error::Domain(format!(
                "`{expr}` must depend on a single parameter (s or t)"
            )));
        }
        let deriv = crate::expr::add(expr.differentiate(0), expr.differentiate(1));
        Ok(Self { expr, deriv })
    }

    pub fn value(&self, u: f64) -> f64 {
        self.expr.eval(&[u, u]).unwrap_or(f64::NAN)
    }

    pub fn derivative(&self, u: f64) -> f64 {
        self.deriv.eval(&[u, u]).unwrap_or(f64::NAN)
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

/// `γ(s) = c(ρ_δ(s))` for a trace `c` given by one expression per coordinate.
struct SittingTrace {
    comps: Vec<Curve1>,
    delta: f64,
}

impl PathMap for SittingTrace {
    fn dim(&self) -> usize {
        self.comps.len()
    }

    fn jet(&self, s: f64) -> (Vec<f64>, Vec<f64>) {
        let (u, du) = sitting(self.delta, s);
        let p = self.comps.iter().map(|c| c.value(u)).collect();
        let v = self.comps.iter().map(|c| c.derivative(u) * du).collect();
        (p, v)
    }
}

struct Concat(Path, Path);

impl PathMap for Concat {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jet(&self, s: f64) -> (Vec<f64>, Vec<f64>) {
        let (p, v) = if s <= 0.5 {
            self.0.jet(2.0 * s)
        } else {
            self.1.jet(2.0 * s - 1.0)
        };
        (p, v.into_iter().map(|x| 2.0 * x).collect())
    }
}

struct Reverse(Path);

impl PathMap for Reverse {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jet(&self, s: f64) -> (Vec<f64>, Vec<f64>) {
        let (p, v) = self.0.jet(1.0 - s);
        (p, v.into_iter().map(|x| -x).collect())
    }
}

struct ReparamPath(Path, Curve1);

impl PathMap for ReparamPath {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jet(&self, s: f64) -> (Vec<f64>, Vec<f64>) {
        let u = self.1.value(s).clamp(0.0, 1.0);
        let du = self.1.derivative(s);
        let (p, v) = self.0.jet(u);
        (p, v.into_iter().map(|x| x * du).collect())
    }
}

struct Constant(Vec<f64>);

impl PathMap for Constant {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn jet(&self, _s: f64) -> (Vec<f64>, Vec<f64>) {
        (self.0.clone(), vec![0.0; self.0.len()])
    }
}

impl SurfaceMap for Constant {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn jet(&self, _s: f64, _t: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let z = vec![0.0; self.0.len()];
        (self.0.clone(), z.clone(), z)
    }
}

struct Edge(Bigon, f64);

impl PathMap for Edge {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jet(&self, s: f64) -> (Vec<f64>, Vec<f64>) {
        let (p, ds, _) = self.0.jet(s, self.1);
        (p, ds)
    }
}

/// A smooth path with sitting width `δ`.
#[derive(Clone)]
pub struct Path {
    map: Arc<dyn PathMap>,
    sitting: f64,
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Path({:?} -> {:?}, sitting {})",
            self.start(),
            self.end(),
            self.sitting
        )
    }
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn vnorm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn margins(delta: f64) -> impl Iterator<Item = f64> {
    (0..=CERTIFICATE_SAMPLES).flat_map(move |k| {
        let u = delta * k as f64 / CERTIFICATE_SAMPLES as f64;
        [u, 1.0 - u]
    })
}

impl Path {
    pub fn from_map(map: Arc<dyn PathMap>, sitting: f64) -> Result<Self> {
        check_width(sitting)?;
        Ok(Self { map, sitting })
    }

    /// The path `s ↦ c(ρ_δ(s))` for a trace `c` with one-parameter expressions.
    pub fn from_exprs(comps: Vec<Expr>, delta: f64) -> Result<Self> {
        check_width(delta)?;
        if comps.is_empty() {
            return Err(Error::Domain("a path needs at least one coordinate".into()));
        }
        let comps = comps
            .into_iter()
            .map(Curve1::new)
            .collect::<Result<Vec<_>>>()?;
        Self::from_map(Arc::new(SittingTrace { comps, delta }), delta)
    }

    /// Parses one expression per coordinate.
    pub fn parse(comps: &[&str], delta: f64) -> Result<Self> {
        let exprs = comps
            .iter()
            .map(|c| crate::expr::parse(c).map_err(Error::from))
            .collect::<Result<Vec<_>>>()?;
        Self::from_exprs(exprs, delta)
    }

    /// The straight segment from `p` to `q`.
    pub fn segment(p: &[f64], q: &[f64], delta: f64) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::Domain(
                "segment endpoints differ in dimension".into(),
            ));
        }
        let comps = p
            .iter()
            .zip(q)
            .map(|(&a, &b)| {
                crate::expr::add(
                    crate::expr::num(a),
                    crate::expr::mul(crate::expr::num(b - a), Expr::Var(0)),
                )
            })
            .collect();
        Self::from_exprs(comps, delta)
    }

    pub fn constant(p: &[f64]) -> Self {
        Self {
            map: Arc::new(Constant(p.to_vec())),
            sitting: DEFAULT_SITTING,
        }
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn sitting(&self) -> f64 {
        self.sitting
    }

    pub fn jet(&self, s: f64) -> (Vec<f64>, Vec<f64>) {
        self.map.jet(s)
    }

    pub fn point(&self, s: f64) -> Vec<f64> {
        self.map.jet(s).0
    }

    pub fn velocity(&self, s: f64) -> Vec<f64> {
        self.map.jet(s).1
    }

    pub fn start(&self) -> Vec<f64> {
        self.point(0.0)
    }

    pub fn end(&self) -> Vec<f64> {
        self.point(1.0)
    }

    /// `γ₁(2s)` on `[0, ½]` then `γ₂(2s − 1)`.
    pub fn compose(&self, next: &Path) -> Result<Path> {
        if self.dim() != next.dim() {
            return Err(Error::Domain("paths live in different dimensions".into()));
        }
        let dev = max_dev(&self.end(), &next.start());
        if dev > TAU_GEO {
            return Err(Error::Domain(format!(
                "path endpoints do not match: {:?} vs {:?} (deviation {dev:e})",
                self.end(),
                next.start()
            )));
        }
        Ok(Path {
            map: Arc::new(Concat(self.clone(), next.clone())),
            sitting: self.sitting.min(next.sitting) / 2.0,
        })
    }

    /// `γ̄(s) = γ(1 − s)`.
    pub fn reverse(&self) -> Path {
        Path {
            map: Arc::new(Reverse(self.clone())),
            sitting: self.sitting,
        }
    }

    /// `γ ∘ φ` for a monotone `φ` with `φ(0) = 0`, `φ(1) = 1`.
    pub fn reparametrize(&self, phi: &Expr) -> Result<Path> {
        let phi = Curve1::new(phi.clone())?;
        let sitting = reparam_width(&phi, self.sitting)?;
        Ok(Path {
            map: Arc::new(ReparamPath(self.clone(), phi)),
            sitting,
        })
    }

    /// Checks that the velocity vanishes on both sitting margins.
    pub fn certify(&self) -> Check {
        let mut c = Check::new("sitting instants").with_tolerance(CERTIFICATE_BOUND);
        for s in margins(self.sitting) {
            c.record_residual(vnorm(&self.velocity(s)), || format!("s={s}"));
        }
        c
    }
}

/// Validates `φ` and returns the sitting width it leaves on a path of width `delta`.
fn reparam_width(phi: &Curve1, delta: f64) -> Result<f64> {
    let (p0, p1) = (phi.value(0.0), phi.value(1.0));
    if p0.abs() > 1e-12 || (p1 - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "reparametrization must fix 0 and 1, got φ(0)={p0}, φ(1)={p1}"
        )));
    }
    let n = 2000;
    for k in 0..=n {
        let u = k as f64 / n as f64;
        let d = phi.derivative(u);
        if !(d >= -1e-12) {
            return Err(Error::Domain(format!(
                "reparametrization `{}` is not monotone: φ'({u}) = {d}",
                phi.expr()
            )));
        }
    }
    let bisect = |pred: &dyn Fn(f64) -> bool| {
        let (mut lo, mut hi) = (0.0, 0.5);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if pred(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let left = bisect(&|s| phi.value(s) <= delta);
    let right = bisect(&|s| phi.value(1.0 - s) >= 1.0 - delta);
    let width = left.min(right).min(0.49);
    check_width(width)?;
    Ok(width)
}

struct Sweep {
    source: Path,
    target: Path,
    delta_t: f64,
}

impl SurfaceMap for Sweep {
    fn dim(&self) -> usize {
        self.source.dim()
    }

    fn jet(&self, s: f64, t: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let (w, dw) = sitting(self.delta_t, t);
        let (p, dp) = self.source.jet(s);
        let (q, dq) = self.target.jet(s);
        let n = p.len();
        let point = (0..n).map(|i| (1.0 - w) * p[i] + w * q[i]).collect();
        let ds = (0..n).map(|i| (1.0 - w) * dp[i] + w * dq[i]).collect();
        let dt = (0..n).map(|i| dw * (q[i] - p[i])).collect();
        (point, ds, dt)
    }
}

struct Still(Path);

impl SurfaceMap for Still {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jet(&self, s: f64, _t: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let (p, v) = self.0.jet(s);
        let n = p.len();
        (p, v, vec![0.0; n])
    }
}

struct ExprSurface {
    comps: Vec<[Expr; 3]>,
    delta: (f64, f64),
}

impl SurfaceMap for ExprSurface {
    fn dim(&self) -> usize {
        self.comps.len()
    }

    fn jet(&self, s: f64, t: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let (u, du) = sitting(self.delta.0, s);
        let (v, dv) = sitting(self.delta.1, t);
        let x = [u, v];
        let ev = |e: &Expr| e.eval(&x).unwrap_or(f64::NAN);
        let p = self.comps.iter().map(|c| ev(&c[0])).collect();
        let ds = self.comps.iter().map(|c| ev(&c[1]) * du).collect();
        let dt = self.comps.iter().map(|c| ev(&c[2]) * dv).collect();
        (p, ds, dt)
    }
}

struct Vertical(Bigon, Bigon);

impl SurfaceMap for Vertical {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jet(&self, s: f64, t: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let (p, ds, dt) = if t <= 0.5 {
            self.0.jet(s, 2.0 * t)
        } else {
            self.1.jet(s, 2.0 * t - 1.0)
        };
        (p, ds, dt.into_iter().map(|x| 2.0 * x).collect())
    }
}

struct Horizontal(Bigon, Bigon);

impl SurfaceMap for Horizontal {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jet(&self, s: f64, t: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let (p, ds, dt) = if s <= 0.5 {
            self.0.jet(2.0 * s, t)
        } else {
            self.1.jet(2.0 * s - 1.0, t)
        };
        (p, ds.into_iter().map(|x| 2.0 * x).collect(), dt)
    }
}

struct ReparamSurface(Bigon, Curve1, Curve1);

impl SurfaceMap for ReparamSurface {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jet(&self, s: f64, t: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let u = self.1.value(s).clamp(0.0, 1.0);
        let v = self.2.value(t).clamp(0.0, 1.0);
        let (du, dv) = (self.1.derivative(s), self.2.derivative(t));
        let (p, ds, dt) = self.0.jet(u, v);
        (
            p,
            ds.into_iter().map(|x| x * du).collect(),
            dt.into_iter().map(|x| x * dv).collect(),
        )
    }
}

/// A smooth map `[0,1]² → ℝⁿ`, constant near `s ∈ {0, 1}` and independent of `t`
/// near `t ∈ {0, 1}`. Its source is `Σ(·, 0)` and its target `Σ(·, 1)`.
#[derive(Clone)]
pub struct Bigon {
    map: Arc<dyn SurfaceMap>,
    sitting: (f64, f64),
}

impl fmt::Debug for Bigon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Bigon({:?} => {:?}, sitting {:?})",
            self.point(0.0, 0.0),
            self.point(1.0, 0.0),
            self.sitting
        )
    }
}

impl Bigon {
    pub fn from_map(map: Arc<dyn SurfaceMap>, sitting: (f64, f64)) -> Result<Self> {
        check_width(sitting.0)?;
        check_width(sitting.1)?;
        Ok(Self { map, sitting })
    }

    /// `Σ(s,t) = c(ρ_{δs}(s), ρ_{δt}(t))` for expressions `c` in `s` and `t`.
    /// The edges `c(0,·)` and `c(1,·)` must each be a single point.
    pub fn from_exprs(comps: Vec<Expr>, delta: (f64, f64)) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::Domain(
                "a bigon needs at least one coordinate".into(),
            ));
        }
        let mut out = Vec::with_capacity(comps.len());
        for c in comps {
            if c.arity() > 2 {
                return Err(Error::Domain(format!("`{c}` may only depend on s and t")));
            }
            let (ds, dt) = (c.differentiate(0), c.differentiate(1));
            out.push([c, ds, dt]);
        }
        Self::from_map(Arc::new(ExprSurface { comps: out, delta }), delta)
    }

    pub fn parse(comps: &[&str], delta: (f64, f64)) -> Result<Self> {
        let exprs = comps
            .iter()
            .map(|c| crate::expr::parse(c).map_err(Error::from))
            .collect::<Result<Vec<_>>>()?;
        Self::from_exprs(exprs, delta)
    }

    /// `Σ(s,t) = (1 − ρ(t))·γ₀(s) + ρ(t)·γ₁(s)` between paths with common endpoints.
    pub fn sweep(source: &Path, target: &Path, delta_t: f64) -> Result<Self> {
        if source.dim() != target.dim() {
            return Err(Error::Domain("paths live in different dimensions".into()));
        }
        let dev =
            max_dev(&source.start(), &target.start()).max(max_dev(&source.end(), &target.end()));
        if dev > TAU_GEO {
            return Err(Error::Domain(format!(
                "source and target paths do not share endpoints (deviation {dev:e})"
            )));
        }
        Self::from_map(
            Arc::new(Sweep {
                source: source.clone(),
                target: target.clone(),
                delta_t,
            }),
            (source.sitting.min(target.sitting), delta_t),
        )
    }

    /// The identity bigon `Σ(s,t) = γ(s)`.
    pub fn identity(path: &Path) -> Self {
        Self {
            map: Arc::new(Still(path.clone())),
            sitting: (path.sitting, DEFAULT_SITTING),
        }
    }

    pub fn constant(p: &[f64]) -> Self {
        Self {
            map: Arc::new(Constant(p.to_vec())),
            sitting: (DEFAULT_SITTING, DEFAULT_SITTING),
        }
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn sitting(&self) -> (f64, f64) {
        self.sitting
    }

    pub fn jet(&self, s: f64, t: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        self.map.jet(s, t)
    }

    pub fn point(&self, s: f64, t: f64) -> Vec<f64> {
        self.map.jet(s, t).0
    }

    pub fn source(&self) -> Path {
        self.edge(0.0)
    }

    pub fn target(&self) -> Path {
        self.edge(1.0)
    }

    fn edge(&self, t: f64) -> Path {
        Path {
            map: Arc::new(Edge(self.clone(), t)),
            sitting: self.sitting.0,
        }
    }

    fn interface(
        &self,
        other: &Bigon,
        a: impl Fn(f64) -> Vec<f64>,
        b: impl Fn(f64) -> Vec<f64>,
    ) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Domain("bigons live in different dimensions".into()));
        }
        let dev = (0..=64)
            .map(|k| {
                let u = k as f64 / 64.0;
                max_dev(&a(u), &b(u))
            })
            .fold(0.0, f64::max);
        if dev > TAU_GEO {
            return Err(Error::Domain(format!(
                "bigon interfaces do not match (max deviation {dev:e})"
            )));
        }
        Ok(())
    }

    /// `Σ₁(s, 2t)` on `t ≤ ½` then `Σ₂(s, 2t − 1)`.
    pub fn vertical(&self, next: &Bigon) -> Result<Bigon> {
        self.interface(next, |s| self.point(s, 1.0), |s| next.point(s, 0.0))?;
        Ok(Bigon {
            map: Arc::new(Vertical(self.clone(), next.clone())),
            sitting: (
                self.sitting.0.min(next.sitting.0),
                self.sitting.1.min(next.sitting.1) / 2.0,
            ),
        })
    }

    /// `Σ₁(2s, t)` on `s ≤ ½` then `Σ₂(2s − 1, t)`.
    pub fn horizontal(&self, next: &Bigon) -> Result<Bigon> {
        self.interface(next, |t| self.point(1.0, t), |t| next.point(0.0, t))?;
        Ok(Bigon {
            map: Arc::new(Horizontal(self.clone(), next.clone())),
            sitting: (
                self.sitting.0.min(next.sitting.0) / 2.0,
                self.sitting.1.min(next.sitting.1),
            ),
        })
    }

    /// `Σ(φ(s), ψ(t))` for monotone reparametrizations fixing 0 and 1.
    pub fn reparametrize(&self, phi: &Expr, psi: Option<&Expr>) -> Result<Bigon> {
        let phi = Curve1::new(phi.clone())?;
        let psi = Curve1::new(psi.cloned().unwrap_or(Expr::Var(0)))?;
        let sitting = (
            reparam_width(&phi, self.sitting.0)?,
            reparam_width(&psi, self.sitting.1)?,
        );
        Ok(Bigon {
            map: Arc::new(ReparamSurface(self.clone(), phi, psi)),
            sitting,
        })
    }

    /// Samples the margins: all partials vanish near `s ∈ {0,1}`, `∂_t` near `t ∈ {0,1}`.
    pub fn certify(&self) -> ValidationReport {
        let mut report = ValidationReport::new("sitting instants");
        let mut cs = Check::new("constant near s = 0, 1").with_tolerance(CERTIFICATE_BOUND);
        let mut ct = Check::new("still near t = 0, 1").with_tolerance(CERTIFICATE_BOUND);
        for k in 0..=16 {
            let other = k as f64 / 16.0;
            for u in margins(self.sitting.0) {
                let (_, ds, dt) = self.jet(u, other);
                cs.record_residual(vnorm(&ds).max(vnorm(&dt)), || format!("s={u}, t={other}"));
            }
            for v in margins(self.sitting.1) {
                let (_, _, dt) = self.jet(other, v);
                ct.record_residual(vnorm(&dt), || format!("s={other}, t={v}"));
            }
        }
        report.push(cs);
        report.push(ct);
        report
    }
}

/// Shoelace area of the closed polygon through `points` (first two coordinates).
pub fn shoelace(points: &[Vec<f64>]) -> f64 {
    let n = points.len();
    0.5 * (0..n)
        .map(|i| {
            let (p, q) = (&points[i], &points[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
}

fn padded(p: &[f64], dim: usize) -> Vec<f64> {
    let mut v = p.to_vec();
    v.resize(dim, 0.0);
    v
}

pub const PATH_FIXTURES: [&str; 5] = [
    "segment-x",
    "segment-y",
    "circle-arc",
    "bottom-right",
    "left-top",
];
pub const BIGON_FIXTURES: [&str; 3] = ["unit-square", "thin-sliver", "constant"];

/// Named paths, embedded in `ℝ^dim` (`dim ≥ 2`) through the first two coordinates.
///
/// * `segment-x`: `0 → e₁`; `segment-y`: `0 → e₂`
/// * `circle-arc`: the upper unit half-circle from angle 0 to π
/// * `bottom-right`: `0 → e₁ → e₁ + e₂`; `left-top`: `0 → e₂ → e₁ + e₂`
pub fn fixture_path(name: &str, dim: usize) -> Result<Path> {
    if dim < 2 {
        return Err(Error::Domain(
            "fixtures live in dimension at least 2".into(),
        ));
    }
    let seg =
        |p: &[f64], q: &[f64]| Path::segment(&padded(p, dim), &padded(q, dim), DEFAULT_SITTING);
    match name {
        "segment-x" => seg(&[0.0, 0.0], &[1.0, 0.0]),
        "segment-y" => seg(&[0.0, 0.0], &[0.0, 1.0]),
        "circle-arc" => {
            let mut comps = vec!["cos(pi*s)".to_string(), "sin(pi*s)".to_string()];
            comps.resize(dim, "0".into());
            let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
            Path::parse(&refs, DEFAULT_SITTING)
        }
        "bottom-right" => seg(&[0.0, 0.0], &[1.0, 0.0])?.compose(&seg(&[1.0, 0.0], &[1.0, 1.0])?),
        "left-top" => seg(&[0.0, 0.0], &[0.0, 1.0])?.compose(&seg(&[0.0, 1.0], &[1.0, 1.0])?),
        _ => Err(Error::Config(format!(
            "unknown path fixture `{name}`; known: {}",
            PATH_FIXTURES.join(", ")
        ))),
    }
}

/// Named bigons in `ℝ^dim`.
///
/// * `unit-square`: sweeps `bottom-right` onto `left-top`, covering `[0,1]²` once with
///   positive orientation
/// * `thin-sliver`: sweeps the out-and-back path `0 → e₁ → 0` onto the constant path;
///   its image is a segment
/// * `constant`: the constant bigon at the origin
pub fn fixture_bigon(name: &str, dim: usize) -> Result<Bigon> {
    match name {
        "unit-square" => Bigon::sweep(
            &fixture_path("bottom-right", dim)?,
            &fixture_path("left-top", dim)?,
            DEFAULT_SITTING,
        ),
        "thin-sliver" => {
            let out = fixture_path("segment-x", dim)?;
            let back = out.compose(&out.reverse())?;
            Bigon::sweep(&back, &Path::constant(&vec![0.0; dim]), DEFAULT_SITTING)
        }
        "constant" => Ok(Bigon::constant(&vec![0.0; dim.max(1)])),
        _ => Err(Error::Config(format!(
            "unknown bigon fixture `{name}`; known: {}",
            BIGON_FIXTURES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        max_dev(a, b) <= tol
    }

    #[test]
    fn sitting_map_is_flat_on_margins() {
        for &s in &[0.0, 0.05, 0.1, 0.9, 0.95, 1.0] {
            let (v, d) = sitting(0.1, s);
            assert!(v == 0.0 || v == 1.0);
            assert_eq!(d, 0.0);
        }
        let (v, _) = sitting(0.1, 0.5);
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sitting_derivative_matches_difference_quotient() {
        for k in 1..50 {
            let s = k as f64 / 50.0;
            let h = 1e-6;
            let fd = (sitting(0.1, s + h).0 - sitting(0.1, s - h).0) / (2.0 * h);
            assert!((fd - sitting(0.1, s).1).abs() < 1e-6, "{s}");
        }
    }

    #[test]
    fn l_shaped_composite() {
        let a = Path::segment(&[0.0, 0.0], &[1.0, 0.0], 0.1).unwrap();
        let b = Path::segment(&[1.0, 0.0], &[1.0, 1.0], 0.1).unwrap();
        let ab = a.compose(&b).unwrap();
        assert_eq!(ab.point(0.5), vec![1.0, 0.0]);
        assert_eq!(ab.point(0.5), a.end());
        assert_eq!(ab.sitting(), 0.05);
        assert!(ab.certify().passed());
        assert!(matches!(b.compose(&a), Err(Error::Domain(_))));
    }

    #[test]
    fn reverse_examples() {
        let c = Path::constant(&[2.0, 3.0]);
        assert_eq!(c.reverse().point(0.3), vec![2.0, 3.0]);
        let seg = fixture_path("segment-x", 2).unwrap();
        assert_eq!(seg.reverse().point(0.25), seg.point(0.75));
        let rr = seg.reverse().reverse();
        for k in 0..=10 {
            let s = k as f64 / 10.0;
            assert!(close(&rr.point(s), &seg.point(s), 1e-15));
            assert!(close(&rr.velocity(s), &seg.velocity(s), 1e-12));
        }
    }

    #[test]
    fn reparametrization_keeps_trace_and_sitting() {
        let arc = fixture_path("circle-arc", 2).unwrap();
        let same = arc.reparametrize(&Expr::Var(0)).unwrap();
        assert_eq!(same.point(0.37), arc.point(0.37));
        let smooth = crate::expr::parse("s^2*(3 - 2*s)").unwrap();
        let r = arc.reparametrize(&smooth).unwrap();
        assert!(r.certify().passed());
        for k in 0..=20 {
            let p = r.point(k as f64 / 20.0);
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-12);
        }
        let wobbly = crate::expr::parse("s - 0.15*sin(2*pi*s)").unwrap();
        assert!(arc.reparametrize(&wobbly).unwrap().certify().passed());
        let worse = crate::expr::parse("s - 0.5*sin(2*pi*s)").unwrap();
        assert!(matches!(arc.reparametrize(&worse), Err(Error::Domain(_))));
    }

    #[test]
    fn circle_arc_endpoints() {
        let arc = fixture_path("circle-arc", 3).unwrap();
        assert!(close(&arc.start(), &[1.0, 0.0, 0.0], 1e-15));
        assert!(close(&arc.end(), &[-1.0, 0.0, 0.0], 1e-15));
    }

    #[test]
    fn unit_square_edges_and_certificates() {
        let sq = fixture_bigon("unit-square", 2).unwrap();
        let bottom = fixture_path("bottom-right", 2).unwrap();
        for k in 0..=20 {
            let s = k as f64 / 20.0;
            assert_eq!(sq.source().point(s), bottom.point(s));
        }
        assert!(sq.certify().passed());
        assert!(fixture_bigon("thin-sliver", 2).unwrap().certify().passed());
    }

    #[test]
    fn bigon_compositions_follow_the_formulas() {
        let sq = fixture_bigon("unit-square", 2).unwrap();
        let id = Bigon::identity(&sq.target());
        let v = sq.vertical(&id).unwrap();
        for k in 0..=8 {
            let s = k as f64 / 8.0;
            assert_eq!(v.point(s, 0.25), sq.point(s, 0.5));
            assert_eq!(v.point(s, 0.75), sq.point(s, 1.0));
        }
        assert!(v.certify().passed());
        assert!(matches!(id.vertical(&sq), Err(Error::Domain(_))));

        let p = Bigon::constant(&[0.0, 0.0]);
        let h = p.horizontal(&p).unwrap();
        assert_eq!(h.point(0.3, 0.7), vec![0.0, 0.0]);
        let q = Bigon::constant(&[1.0, 0.0]);
        assert!(matches!(p.horizontal(&q), Err(Error::Domain(_))));
    }

    #[test]
    fn expr_bigon_partials_match_differences() {
        let b = Bigon::parse(&["s", "4*t*s*(1 - s)"], (0.1, 0.1)).unwrap();
        assert!(b.certify().passed());
        let (s, t, h) = (0.4, 0.6, 1e-6);
        let (_, ds, dt) = b.jet(s, t);
        let fs: Vec<f64> = (0..2)
            .map(|i| (b.point(s + h, t)[i] - b.point(s - h, t)[i]) / (2.0 * h))
            .collect();
        let ft: Vec<f64> = (0..2)
            .map(|i| (b.point(s, t + h)[i] - b.point(s, t - h)[i]) / (2.0 * h))
            .collect();
        assert!(close(&ds, &fs, 1e-6) && close(&dt, &ft, 1e-6));
    }
}
