//! Lie-algebra-valued differential forms on coordinate boxes in ℝⁿ.
//!
//! A [`FormField`] of degree `p` stores one [`Expr`] per basis index `a` and strictly
//! increasing multi-index `μ₁ < … < μ_p`; it evaluates on tangent vectors as
//! `Σ F^a_μ(x) det(v_k^{μ_l}) e_a`. Text keys are `"a,μ1μ2…"` with one-based basis
//! index and one-based coordinate digits, e.g. `"2,13"` is `e₂ dx1∧dx3`.
//!
//! Wedge products carry no ½: `(ω∧η)(u,v) = ω(u)η(v) − ω(v)η(u)` and
//! `(ω∧η)(u,v,w) = ω(u)η(v,w) − ω(v)η(u,w) + ω(w)η(u,v)` for a 1-form `ω`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::crossed::CrossedModule;
use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::lie::LieAlgebra;
use crate::linalg::{self, Mat};

pub const MAX_DEGREE: usize = 3;
pub const MAX_DIM: usize = 9;

type Key = (usize, Vec<usize>);

/// A form given by expressions in the coordinates `x1..xn`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormField {
    degree: usize,
    dim: usize,
    algebra: LieAlgebra,
    components: BTreeMap<Key, Expr>,
}

/// Parses `"a,μ1μ2…"` into a zero-based basis index and coordinate indices.
pub fn parse_key(key: &str, degree: usize, dim: usize, algebra_dim: usize) -> Result<Key> {
    let bad = |why: &str| Error::Config(format!("form key `{key}`: {why}"));
    let (a, mu) = match key.split_once(',') {
        Some((a, mu)) => (a.trim(), mu.trim()),
        None => (key.trim(), ""),
    };
    let a: usize = a.parse().map_err(|_| bad("basis index is not a number"))?;
    if a == 0 || a > algebra_dim {
        return Err(bad(&format!("basis index must be in 1..={algebra_dim}")));
    }
    let mut idx = Vec::with_capacity(mu.len());
    for ch in mu.chars() {
        let d = ch
            .to_digit(10)
            .ok_or_else(|| bad("coordinate indices must be digits"))? as usize;
        if d == 0 || d > dim {
            return Err(bad(&format!("coordinate index must be in 1..={dim}")));
        }
        idx.push(d - 1);
    }
    if idx.len() != degree {
        return Err(bad(&format!("expected {degree} coordinate indices")));
    }
    if idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("coordinate indices must be strictly increasing"));
    }
    Ok((a - 1, idx))
}

pub fn format_key(a: usize, mu: &[usize]) -> String {
    let digits: String = mu.iter().map(|i| char::from(b'1' + *i as u8)).collect();
    format!("{},{}", a + 1, digits)
}

/// Determinant of the `p×p` minor `M[k][l] = v_k[μ_l]`.
fn minor(vectors: &[&[f64]], mu: &[usize]) -> f64 {
    let m = |k: usize, l: usize| vectors[k][mu[l]];
    match mu.len() {
        0 => 1.0,
        1 => m(0, 0),
        2 => m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0),
        3 => {
            m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
        }
        p => DMatrix::from_fn(p, p, m).determinant(),
    }
}

fn check_arity(degree: usize, dim: usize, x: &[f64], vectors: &[&[f64]]) -> Result<()> {
    if vectors.len() != degree {
        return Err(Error::Domain(format!(
            "a {degree}-form takes {degree} vectors, got {}",
            vectors.len()
        )));
    }
    if x.len() != dim || vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::Domain(format!(
            "point and vectors must have dimension {dim}"
        )));
    }
    Ok(())
}

impl FormField {
    pub fn zero(degree: usize, dim: usize, algebra: LieAlgebra) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::Domain(format!(
                "forms of degree {degree} > {MAX_DEGREE}"
            )));
        }
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Domain(format!(
                "base dimension must be in 1..={MAX_DIM}"
            )));
        }
        Ok(Self {
            degree,
            dim,
            algebra,
            components: BTreeMap::new(),
        })
    }

    /// Builds a form from `"a,μ"` keys and expression sources.
    pub fn from_strings<K: AsRef<str>, V: AsRef<str>>(
        degree: usize,
        dim: usize,
        algebra: LieAlgebra,
        components: impl IntoIterator<Item = (K, V)>,
    ) -> Result<Self> {
        let mut form = Self::zero(degree, dim, algebra)?;
        let mut errors = Vec::new();
        for (k, v) in components {
            let key = match parse_key(k.as_ref(), degree, dim, form.algebra.dim()) {
                Ok(key) => key,
                Err(Error::Config(m)) => {
                    errors.push(m);
                    continue;
                }
                Err(e) => {
                    errors.push(e.to_string());
                    continue;
                }
            };
            match expr::parse(v.as_ref()) {
                Ok(e) => {
                    if let Err(e) = form.set(key.0, &key.1, e) {
                        errors.push(format!("form key `{}`: {e}", k.as_ref()));
                    }
                }
                Err(e) => errors.push(format!("form key `{}`: {e}", k.as_ref())),
            }
        }
        if errors.is_empty() {
            Ok(form)
        } else {
            Err(Error::Config(errors.join("; ")))
        }
    }

    /// Sets the coefficient of `e_a dx^μ`; `μ` must be strictly increasing.
    pub fn set(&mut self, a: usize, mu: &[usize], e: Expr) -> Result<()> {
        if a >= self.algebra.dim() {
            return Err(Error::Domain(format!(
                "basis index {} out of range for {}",
                a + 1,
                self.algebra.name()
            )));
        }
        if mu.len() != self.degree
            || mu.windows(2).any(|w| w[0] >= w[1])
            || mu.iter().any(|&i| i >= self.dim)
        {
            return Err(Error::Domain(format!("invalid multi-index {mu:?}")));
        }
        if e.arity() > self.dim {
            return Err(Error::Domain(format!(
                "`{e}` uses x{} on a {}-dimensional chart",
                e.arity(),
                self.dim
            )));
        }
        if e.is_zero() {
            self.components.remove(&(a, mu.to_vec()));
        } else {
            self.components.insert((a, mu.to_vec()), e);
        }
        Ok(())
    }

    fn accumulate(&mut self, a: usize, mu: Vec<usize>, e: Expr) {
        let sum = match self.components.remove(&(a, mu.clone())) {
            Some(prev) => expr::add(prev, e),
            None => e,
        };
        if !sum.is_zero() {
            self.components.insert((a, mu), sum);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn component(&self, a: usize, mu: &[usize]) -> Option<&Expr> {
        self.components.get(&(a, mu.to_vec()))
    }

    pub fn components(&self) -> impl Iterator<Item = (usize, &[usize], &Expr)> {
        self.components
            .iter()
            .map(|((a, mu), e)| (*a, mu.as_slice(), e))
    }

    /// Components as `"a,μ"` key and printed expression.
    pub fn to_strings(&self) -> BTreeMap<String, String> {
        self.components
            .iter()
            .map(|((a, mu), e)| (format_key(*a, mu), e.to_string()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Basis coordinates of `F(x)(v₁, …, v_p)`.
    pub fn eval_coords(&self, x: &[f64], vectors: &[&[f64]]) -> Result<Vec<f64>> {
        check_arity(self.degree, self.dim, x, vectors)?;
        let mut coords = vec![0.0; self.algebra.dim()];
        for ((a, mu), e) in &self.components {
            let m = minor(vectors, mu);
            if m != 0.0 {
                coords[*a] += e.eval(x)? * m;
            }
        }
        Ok(coords)
    }

    pub fn eval(&self, x: &[f64], vectors: &[&[f64]]) -> Result<Mat> {
        Ok(self.algebra.combine(&self.eval_coords(x, vectors)?))
    }

    /// Exact exterior derivative `(dF)_ν = Σ_j (−1)^j ∂_{ν_j} F_{ν∖ν_j}`.
    pub fn exterior_derivative(&self) -> Result<FormField> {
        if self.degree >= MAX_DEGREE {
            return Err(Error::Domain(format!(
                "exterior derivative of a {}-form exceeds degree {MAX_DEGREE}",
                self.degree
            )));
        }
        let mut out = FormField::zero(self.degree + 1, self.dim, self.algebra.clone())?;
        for ((a, mu), e) in &self.components {
            for j in 0..self.dim {
                if mu.contains(&j) {
                    continue;
                }
                let d = e.differentiate(j);
                if d.is_zero() {
                    continue;
                }
                let before = mu.iter().filter(|&&m| m < j).count();
                let mut nu = mu.clone();
                nu.insert(before, j);
                let term = if before % 2 == 0 { d } else { expr::neg(d) };
                out.accumulate(*a, nu, term);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> FormField {
        let mut out = FormField {
            components: BTreeMap::new(),
            ..self.clone()
        };
        for ((a, mu), e) in &self.components {
            out.accumulate(*a, mu.clone(), expr::mul(expr::num(s), e.clone()));
        }
        out
    }

    pub fn add(&self, other: &FormField) -> Result<FormField> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for ((a, mu), e) in &other.components {
            out.accumulate(*a, mu.clone(), e.clone());
        }
        Ok(out)
    }

    fn same_shape(&self, other: &FormField) -> Result<()> {
        if self.degree != other.degree || self.dim != other.dim || self.algebra != other.algebra {
            return Err(Error::Domain(format!(
                "cannot combine a {}-form on ℝ^{} in {} with a {}-form on ℝ^{} in {}",
                self.degree,
                self.dim,
                self.algebra.name(),
                other.degree,
                other.dim,
                other.algebra.name()
            )));
        }
        Ok(())
    }

    /// Applies the linear map with matrix `m` (rows index `target` basis, columns this basis).
    pub fn map_linear(&self, m: &DMatrix<f64>, target: LieAlgebra) -> Result<FormField> {
        if m.ncols() != self.algebra.dim() || m.nrows() != target.dim() {
            return Err(Error::Domain("linear map has the wrong shape".into()));
        }
        let mut out = FormField::zero(self.degree, self.dim, target)?;
        for ((a, mu), e) in &self.components {
            for b in 0..m.nrows() {
                let c = m[(b, *a)];
                if c != 0.0 {
                    out.accumulate(b, mu.clone(), expr::mul(expr::num(c), e.clone()));
                }
            }
        }
        Ok(out)
    }

    /// `A∧A` for a 1-form: `(A∧A)_{ij} = Σ f_ab^c A^a_i A^b_j e_c`.
    pub fn self_wedge(&self) -> Result<FormField> {
        if self.degree != 1 {
            return Err(Error::Domain("self wedge needs a 1-form".into()));
        }
        let f = self.algebra.structure_constants();
        let mut out = FormField::zero(2, self.dim, self.algebra.clone())?;
        for ((a, i), ea) in &self.components {
            for ((b, j), eb) in &self.components {
                if i[0] >= j[0] {
                    continue;
                }
                for (cc, &fc) in f[*a][*b].iter().enumerate() {
                    if fc.abs() > 1e-14 {
                        let term = expr::mul(expr::num(fc), expr::mul(ea.clone(), eb.clone()));
                        out.accumulate(cc, vec![i[0], j[0]], term);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Symbolic curvature `F_A = dA + A∧A` of a 1-form.
    pub fn curvature(&self) -> Result<FormField> {
        self.exterior_derivative()?.add(&self.self_wedge()?)
    }
}

impl fmt::Display for FormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        for (n, ((a, mu), e)) in self.components.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let dx: Vec<String> = mu.iter().map(|i| format!("dx{}", i + 1)).collect();
            write!(f, "({e}) e{}", a + 1)?;
            if !dx.is_empty() {
                write!(f, " {}", dx.join("∧"))?;
            }
        }
        Ok(())
    }
}

pub type PointwiseFn = Arc<dyn Fn(&[f64], &[&[f64]]) -> Result<Mat> + Send + Sync>;

/// A form known either symbolically or only through pointwise evaluation.
#[derive(Clone)]
pub enum Form {
    Field(FormField),
    Pointwise {
        degree: usize,
        dim: usize,
        algebra: LieAlgebra,
        eval: PointwiseFn,
    },
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Form::Field(x) => write!(f, "Field({x})"),
            Form::Pointwise {
                degree,
                dim,
                algebra,
                ..
            } => write!(
                f,
                "Pointwise({degree}-form on ℝ^{dim} in {})",
                algebra.name()
            ),
        }
    }
}

impl From<FormField> for Form {
    fn from(f: FormField) -> Self {
        Form::Field(f)
    }
}

impl Form {
    pub fn degree(&self) -> usize {
        match self {
            Form::Field(f) => f.degree,
            Form::Pointwise { degree, .. } => *degree,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Form::Field(f) => f.dim,
            Form::Pointwise { dim, .. } => *dim,
        }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        match self {
            Form::Field(f) => &f.algebra,
            Form::Pointwise { algebra, .. } => algebra,
        }
    }

    pub fn field(&self) -> Option<&FormField> {
        match self {
            Form::Field(f) => Some(f),
            Form::Pointwise { .. } => None,
        }
    }

    pub fn eval(&self, x: &[f64], vectors: &[&[f64]]) -> Result<Mat> {
        match self {
            Form::Field(f) => f.eval(x, vectors),
            Form::Pointwise {
                degree, dim, eval, ..
            } => {
                check_arity(*degree, *dim, x, vectors)?;
                eval(x, vectors)
            }
        }
    }

    pub fn exterior_derivative(&self) -> Result<FormField> {
        match self {
            Form::Field(f) => f.exterior_derivative(),
            Form::Pointwise { .. } => Err(Error::Precondition(
                "a pointwise form has no exact exterior derivative".into(),
            )),
        }
    }
}

/// Pointwise evaluators for `F_A`, the fake curvature, `k = da + a∧a + dα(A)∧a`
/// and `H₃ = dB + dα(A)∧B`.
#[derive(Clone, Debug)]
pub struct Composites {
    cm: CrossedModule,
    a: Form,
    b: Option<Form>,
    t: Option<Form>,
    da: Option<Derivative>,
    db: Option<Derivative>,
    dt_form: Option<Derivative>,
}

/// `dω`, exact for symbolic forms and by a fourth-order central difference for pointwise ones.
#[derive(Clone, Debug)]
enum Derivative {
    Exact(FormField),
    Numeric(Form),
}

const STENCIL_STEP: f64 = 1e-3;

impl Derivative {
    fn of(form: &Form) -> Self {
        match form.exterior_derivative() {
            Ok(d) => Derivative::Exact(d),
            Err(_) => Derivative::Numeric(form.clone()),
        }
    }

    /// `dω(v₀,…,v_k) = Σᵢ (−1)ⁱ ∂_{vᵢ} ω(v₀,…,v̂ᵢ,…,v_k)` for constant vector fields.
    fn eval(&self, x: &[f64], vectors: &[&[f64]]) -> Result<Mat> {
        let form = match self {
            Derivative::Exact(d) => return d.eval(x, vectors),
            Derivative::Numeric(f) => f,
        };
        check_arity(form.degree() + 1, form.dim(), x, vectors)?;
        let h = STENCIL_STEP;
        let mut total: Option<Mat> = None;
        for i in 0..vectors.len() {
            let rest: Vec<&[f64]> = vectors
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| *v)
                .collect();
            let at = |t: f64| -> Result<Mat> {
                let y: Vec<f64> = x.iter().zip(vectors[i]).map(|(a, b)| a + t * b).collect();
                form.eval(&y, &rest)
            };
            let deriv = (at(-2.0 * h)? - at(2.0 * h)?
                + (at(h)? - at(-h)?) * crate::linalg::c(8.0, 0.0))
                / crate::linalg::c(12.0 * h, 0.0);
            let term = if i % 2 == 0 { deriv } else { -deriv };
            total = Some(match total {
                None => term,
                Some(t) => t + term,
            });
        }
        Ok(total.expect("at least one vector"))
    }
}

fn expect(form: &Form, degree: usize, algebra: &LieAlgebra, what: &str) -> Result<()> {
    if form.degree() != degree {
        return Err(Error::Domain(format!(
            "{what} must be a {degree}-form, got degree {}",
            form.degree()
        )));
    }
    if form.algebra() != algebra {
        return Err(Error::Domain(format!(
            "{what} must take values in {}, got {}",
            algebra.name(),
            form.algebra().name()
        )));
    }
    Ok(())
}

impl Composites {
    /// `a_form` is the 𝔤-valued 1-form `A`, `b` the 𝔥-valued 2-form `B`, `t` the
    /// 𝔥-valued 1-form `a_ij`.
    pub fn new(cm: &CrossedModule, a_form: Form, b: Option<Form>, t: Option<Form>) -> Result<Self> {
        let d = cm.require_differential()?;
        expect(&a_form, 1, &d.g_algebra, "A")?;
        if let Some(b) = &b {
            expect(b, 2, &d.h_algebra, "B")?;
        }
        if let Some(t) = &t {
            expect(t, 1, &d.h_algebra, "a")?;
        }
        let dims: Vec<usize> = [Some(&a_form), b.as_ref(), t.as_ref()]
            .into_iter()
            .flatten()
            .map(Form::dim)
            .collect();
        if dims.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::Domain(
                "forms live on charts of different dimension".into(),
            ));
        }
        Ok(Self {
            cm: cm.clone(),
            da: Some(Derivative::of(&a_form)),
            db: b.as_ref().map(Derivative::of),
            dt_form: t.as_ref().map(Derivative::of),
            a: a_form,
            b,
            t,
        })
    }

    fn missing(what: &str) -> Error {
        Error::Precondition(format!("{what} is not available"))
    }

    /// `F_A(u,v) = dA(u,v) + A(u)A(v) − A(v)A(u)`.
    pub fn curvature(&self, x: &[f64], u: &[f64], v: &[f64]) -> Result<Mat> {
        let da = self.da.as_ref().ok_or_else(|| Self::missing("dA"))?;
        let (au, av) = (self.a.eval(x, &[u])?, self.a.eval(x, &[v])?);
        Ok(da.eval(x, &[u, v])? + &au * &av - &av * &au)
    }

    /// `F_A(u,v) + dt(B(u,v))`.
    pub fn fake_curvature(&self, x: &[f64], u: &[f64], v: &[f64]) -> Result<Mat> {
        let d = self.cm.require_differential()?;
        let b = self.b.as_ref().ok_or_else(|| Self::missing("B"))?;
        Ok(self.curvature(x, u, v)? + (d.dt)(&b.eval(x, &[u, v])?))
    }

    /// `k(u,v) = da(u,v) + [a(u), a(v)] + dα(A(u))(a(v)) − dα(A(v))(a(u))`.
    pub fn k(&self, x: &[f64], u: &[f64], v: &[f64]) -> Result<Mat> {
        let d = self.cm.require_differential()?;
        let t = self.t.as_ref().ok_or_else(|| Self::missing("a"))?;
        let dt = self.dt_form.as_ref().ok_or_else(|| Self::missing("da"))?;
        let (tu, tv) = (t.eval(x, &[u])?, t.eval(x, &[v])?);
        let (au, av) = (self.a.eval(x, &[u])?, self.a.eval(x, &[v])?);
        Ok(
            dt.eval(x, &[u, v])? + linalg::commutator(&tu, &tv) + (d.dalpha)(&au, &tv)
                - (d.dalpha)(&av, &tu),
        )
    }

    /// `H₃(u,v,w) = dB(u,v,w) + dα(A(u))(B(v,w)) − dα(A(v))(B(u,w)) + dα(A(w))(B(u,v))`.
    pub fn h3(&self, x: &[f64], u: &[f64], v: &[f64], w: &[f64]) -> Result<Mat> {
        let d = self.cm.require_differential()?;
        let b = self.b.as_ref().ok_or_else(|| Self::missing("B"))?;
        let db = self.db.as_ref().ok_or_else(|| Self::missing("dB"))?;
        let da = |p: &[f64], q: &[f64], r: &[f64]| -> Result<Mat> {
            Ok((d.dalpha)(&self.a.eval(x, &[p])?, &b.eval(x, &[q, r])?))
        };
        Ok(db.eval(x, &[u, v, w])? + da(u, v, w)? - da(v, u, w)? + da(w, u, v)?)
    }

    /// `dt(H₃(u,v,w))`, which vanishes where the fake curvature does.
    pub fn dt_h3(&self, x: &[f64], u: &[f64], v: &[f64], w: &[f64]) -> Result<Mat> {
        let d = self.cm.require_differential()?;
        Ok((d.dt)(&self.h3(x, u, v, w)?))
    }
}

/// Matrix of `dt: 𝔥 → 𝔤` in the two bases.
pub fn dt_matrix(cm: &CrossedModule) -> Result<DMatrix<f64>> {
    let d = cm.require_differential()?;
    let (gd, hd) = (d.g_algebra.dim(), d.h_algebra.dim());
    let mut m = DMatrix::zeros(gd, hd);
    for (b, e) in d.h_algebra.basis().iter().enumerate() {
        let img = d.g_algebra.coords(&(d.dt)(e));
        for a in 0..gd {
            m[(a, b)] = img[a];
        }
    }
    Ok(m)
}

/// The 2-form `B` with `dt(B) = −F_A` for invertible `dt`, making `(A, B)` fake-flat.
pub fn flat_partner(cm: &CrossedModule, a_form: &FormField) -> Result<FormField> {
    let d = cm.require_differential()?;
    let m = dt_matrix(cm)?;
    let inv = m
        .clone()
        .try_inverse()
        .filter(|_| m.is_square())
        .ok_or_else(|| Error::Precondition(format!("dt is not invertible on {}", cm.name())))?;
    a_form
        .curvature()?
        .scale(-1.0)
        .map_linear(&inv, d.h_algebra.clone())
}
