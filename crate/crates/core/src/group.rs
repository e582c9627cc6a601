//! Concrete groups: finite multiplication tables and shipped matrix families.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::linalg::{self, c, Mat};

/// Tolerance for matrix membership and axiom checks.
pub const TAU_GRP: f64 = 1e-9;

/// A group element: an index into a finite table or a matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Index(usize),
    Matrix(Mat),
}

impl Element {
    pub fn index(&self) -> Option<usize> {
        match self {
            Element::Index(i) => Some(*i),
            Element::Matrix(_) => None,
        }
    }

    pub fn matrix(&self) -> Option<&Mat> {
        match self {
            Element::Matrix(m) => Some(m),
            Element::Index(_) => None,
        }
    }
}

/// A finite group given by its multiplication table; element `i` is row `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGroup {
    name: String,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
    labels: Vec<String>,
}

impl FiniteGroup {
    /// Builds a group from a table, checking closure, associativity, identity and inverses.
    pub fn from_table(
        name: impl Into<String>,
        table: Vec<Vec<usize>>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidTable(format!(
                    "row {i} has length {}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(Error::InvalidTable(format!(
                    "entry {bad} out of range in row {i}"
                )));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidTable("no two-sided identity".into()))?;
        let inverses = (0..n)
            .map(|x| {
                (0..n)
                    .find(|&y| table[x][y] == identity && table[y][x] == identity)
                    .ok_or_else(|| Error::InvalidTable(format!("element {x} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    if table[table[a][b]][cc] != table[a][table[b][cc]] {
                        return Err(Error::InvalidTable(format!(
                            "associativity fails at ({a}, {b}, {cc})"
                        )));
                    }
                }
            }
        }
        let labels = match labels {
            Some(l) if l.len() == n => l,
            Some(l) => {
                return Err(Error::InvalidTable(format!(
                    "{} labels for {n} elements",
                    l.len()
                )))
            }
            None => (0..n).map(|i| i.to_string()).collect(),
        };
        Ok(Self {
            name: name.into(),
            table,
            identity,
            inverses,
            labels,
        })
    }

    pub fn trivial() -> Self {
        Self::from_table("1", vec![vec![0]], Some(vec!["e".into()])).unwrap()
    }

    /// Z/n written additively: element `k` is the residue `k`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0);
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Self::from_table(format!("Z{n}"), table, None).unwrap()
    }

    /// S₃ with elements e, (12), (13), (23), (123), (132) and product `(στ)(x) = σ(τ(x))`.
    pub fn symmetric3() -> Self {
        let perms = s3_permutations();
        let labels = S3_LABELS.iter().map(|s| s.to_string()).collect();
        let table = (0..6)
            .map(|a| {
                (0..6)
                    .map(|b| {
                        let prod: [usize; 3] = std::array::from_fn(|x| perms[a][perms[b][x]]);
                        perms.iter().position(|p| *p == prod).unwrap()
                    })
                    .collect()
            })
            .collect();
        Self::from_table("S3", table, Some(labels)).unwrap()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn find_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }
}

pub(crate) const S3_LABELS: [&str; 6] = ["e", "(12)", "(13)", "(23)", "(123)", "(132)"];

/// Permutations of {0,1,2} in the order of [`S3_LABELS`]; `p[x]` is the image of `x`.
pub(crate) fn s3_permutations() -> [[usize; 3]; 6] {
    [
        [0, 1, 2],
        [1, 0, 2],
        [2, 1, 0],
        [0, 2, 1],
        [1, 2, 0],
        [2, 0, 1],
    ]
}

/// The shipped matrix groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFamily {
    /// The trivial group on 0×0 matrices; its algebra is zero.
    Trivial,
    U1,
    SU2,
    SO3,
    GL(usize),
}

impl MatrixFamily {
    pub fn size(&self) -> usize {
        match self {
            MatrixFamily::Trivial => 0,
            MatrixFamily::U1 => 1,
            MatrixFamily::SU2 => 2,
            MatrixFamily::SO3 => 3,
            MatrixFamily::GL(n) => *n,
        }
    }

    pub fn algebra(&self) -> LieAlgebra {
        match self {
            MatrixFamily::Trivial => LieAlgebra::zero_algebra(),
            MatrixFamily::U1 => LieAlgebra::u1(),
            MatrixFamily::SU2 => LieAlgebra::su2(),
            MatrixFamily::SO3 => LieAlgebra::so3(),
            MatrixFamily::GL(n) => LieAlgebra::gl(*n),
        }
    }

    fn name(&self) -> String {
        match self {
            MatrixFamily::Trivial => "1".into(),
            MatrixFamily::U1 => "U1".into(),
            MatrixFamily::SU2 => "SU2".into(),
            MatrixFamily::SO3 => "SO3".into(),
            MatrixFamily::GL(n) => format!("GL{n}"),
        }
    }

    /// Distance of `m` from the group manifold (0 on the manifold).
    pub fn membership_defect(&self, m: &Mat) -> f64 {
        let n = self.size();
        if m.shape() != (n, n) {
            return f64::INFINITY;
        }
        match self {
            MatrixFamily::Trivial => 0.0,
            MatrixFamily::GL(_) => {
                if linalg::det(m).norm() > TAU_GRP {
                    0.0
                } else {
                    1.0
                }
            }
            MatrixFamily::U1 => (m[(0, 0)].norm() - 1.0).abs(),
            MatrixFamily::SU2 => {
                let unitary = linalg::dist(&(m.adjoint() * m), &linalg::eye(2));
                unitary + (linalg::det(m) - c(1.0, 0.0)).norm()
            }
            MatrixFamily::SO3 => {
                let imag: f64 = m.iter().map(|z| z.im.abs()).sum();
                let orth = linalg::dist(&(m.transpose() * m), &linalg::eye(3));
                imag + orth + (linalg::det(m) - c(1.0, 0.0)).norm()
            }
        }
    }

    /// Nearest-point projection back onto the manifold (polar factor, then determinant fix).
    pub fn project(&self, m: &Mat) -> Mat {
        match self {
            MatrixFamily::Trivial | MatrixFamily::GL(_) => m.clone(),
            MatrixFamily::U1 => linalg::polar_unitary(m),
            MatrixFamily::SU2 => {
                let u = linalg::polar_unitary(m);
                let phase = linalg::det(&u).sqrt();
                u.map(|z| z / phase)
            }
            MatrixFamily::SO3 => {
                let real = m.map(|z| c(z.re, 0.0));
                let u = linalg::polar_unitary(&real);
                u.map(|z| c(z.re, 0.0))
            }
        }
    }

    /// Renormalizes only when drift exceeds a tenth of the group tolerance.
    pub fn renormalize(&self, m: Mat) -> Mat {
        if self.membership_defect(&m) > TAU_GRP / 10.0 {
            self.project(&m)
        } else {
            m
        }
    }

    pub fn exp(&self, x: &Mat) -> Mat {
        self.renormalize(linalg::expm(x))
    }

    /// Principal logarithm; closed forms for the compact families.
    pub fn log(&self, g: &Mat) -> Result<Mat> {
        let cut = |lambda: &str| Error::Range {
            message: format!("{} element on the cut locus of log", self.name()),
            eigenvalue: lambda.to_string(),
        };
        match self {
            MatrixFamily::Trivial => Ok(linalg::zeros(0)),
            MatrixFamily::GL(_) => linalg::logm(g),
            MatrixFamily::U1 => {
                let z = g[(0, 0)];
                if (z + c(1.0, 0.0)).norm() < 1e-8 {
                    return Err(cut("-1"));
                }
                Ok(Mat::from_element(1, 1, c(0.0, z.arg())))
            }
            MatrixFamily::SU2 => {
                // g = cos φ I - i sin φ (n·σ) = exp(2φ n·e) with e_a = -(i/2)σ_a.
                let cos_phi = 0.5 * (g[(0, 0)] + g[(1, 1)]).re;
                let v = [-g[(0, 1)].im, -g[(0, 1)].re, -g[(0, 0)].im];
                let sin_phi = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                let phi = sin_phi.atan2(cos_phi);
                if std::f64::consts::PI - phi < 1e-8 {
                    return Err(cut("-1 (double)"));
                }
                let factor = if sin_phi < 1e-300 {
                    2.0
                } else {
                    2.0 * phi / sin_phi
                };
                Ok(MatrixFamily::SU2.algebra().combine(&[
                    factor * v[0],
                    factor * v[1],
                    factor * v[2],
                ]))
            }
            MatrixFamily::SO3 => {
                let r = g.map(|z| z.re);
                let cos_theta = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
                let axis = [
                    r[(2, 1)] - r[(1, 2)],
                    r[(0, 2)] - r[(2, 0)],
                    r[(1, 0)] - r[(0, 1)],
                ];
                let two_sin = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
                let theta = two_sin.atan2(2.0 * cos_theta);
                if std::f64::consts::PI - theta < 1e-7 {
                    return Err(cut("-1"));
                }
                // (L_a)_bc = -ε_abc, so R - R^T = 2 sin θ Σ n_a L_a with axis_a = 2 sin θ n_a.
                let factor = if two_sin < 1e-300 {
                    0.5
                } else {
                    theta / two_sin
                };
                Ok(MatrixFamily::SO3.algebra().combine(&[
                    factor * axis[0],
                    factor * axis[1],
                    factor * axis[2],
                ]))
            }
        }
    }
}

/// A concrete group.
#[derive(Clone, Debug, PartialEq)]
pub enum Group {
    Finite(FiniteGroup),
    Matrix(MatrixFamily),
}

impl Group {
    pub fn name(&self) -> String {
        match self {
            Group::Finite(f) => f.name().to_string(),
            Group::Matrix(m) => m.name(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Group::Finite(_))
    }

    pub fn finite(&self) -> Option<&FiniteGroup> {
        match self {
            Group::Finite(f) => Some(f),
            Group::Matrix(_) => None,
        }
    }

    pub fn family(&self) -> Option<MatrixFamily> {
        match self {
            Group::Matrix(m) => Some(*m),
            Group::Finite(_) => None,
        }
    }

    pub fn order(&self) -> Option<usize> {
        self.finite().map(FiniteGroup::order)
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            Group::Finite(f) => f.order() == 1,
            Group::Matrix(m) => *m == MatrixFamily::Trivial,
        }
    }

    /// All elements of a finite group in index order.
    pub fn elements(&self) -> Option<Vec<Element>> {
        self.finite()
            .map(|f| (0..f.order()).map(Element::Index).collect())
    }

    pub fn identity(&self) -> Element {
        match self {
            Group::Finite(f) => Element::Index(f.identity()),
            Group::Matrix(m) => Element::Matrix(linalg::eye(m.size())),
        }
    }

    pub fn contains(&self, a: &Element) -> bool {
        match (self, a) {
            (Group::Finite(f), Element::Index(i)) => *i < f.order(),
            (Group::Matrix(m), Element::Matrix(x)) => m.membership_defect(x) <= TAU_GRP,
            _ => false,
        }
    }

    fn mismatch(&self, a: &Element) -> Error {
        Error::Domain(format!(
            "{} is not an element of {}",
            self.describe(a),
            self.name()
        ))
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element> {
        match (self, a, b) {
            (Group::Finite(f), Element::Index(x), Element::Index(y))
                if *x < f.order() && *y < f.order() =>
            {
                Ok(Element::Index(f.mul(*x, *y)))
            }
            (Group::Matrix(m), Element::Matrix(x), Element::Matrix(y))
                if x.shape() == (m.size(), m.size()) && y.shape() == x.shape() =>
            {
                Ok(Element::Matrix(m.renormalize(x * y)))
            }
            (Group::Finite(f), Element::Index(x), _) if *x < f.order() => Err(self.mismatch(b)),
            (Group::Matrix(m), Element::Matrix(x), _) if x.shape() == (m.size(), m.size()) => {
                Err(self.mismatch(b))
            }
            _ => Err(self.mismatch(a)),
        }
    }

    pub fn inv(&self, a: &Element) -> Result<Element> {
        match (self, a) {
            (Group::Finite(f), Element::Index(x)) if *x < f.order() => {
                Ok(Element::Index(f.inv(*x)))
            }
            (Group::Matrix(m), Element::Matrix(x)) if x.shape() == (m.size(), m.size()) => {
                let inv = match m {
                    MatrixFamily::Trivial => x.clone(),
                    MatrixFamily::GL(_) => x
                        .clone()
                        .try_inverse()
                        .ok_or_else(|| Error::Domain("singular matrix".into()))?,
                    _ => x.adjoint(),
                };
                Ok(Element::Matrix(inv))
            }
            _ => Err(self.mismatch(a)),
        }
    }

    /// `a b a⁻¹`.
    pub fn conj(&self, a: &Element, b: &Element) -> Result<Element> {
        self.mul(&self.mul(a, b)?, &self.inv(a)?)
    }

    /// Distance between elements: exact 0/1 for finite groups, Frobenius for matrices.
    pub fn distance(&self, a: &Element, b: &Element) -> f64 {
        match (a, b) {
            (Element::Index(x), Element::Index(y)) => {
                if x == y {
                    0.0
                } else {
                    1.0
                }
            }
            (Element::Matrix(x), Element::Matrix(y)) => linalg::dist(x, y),
            _ => f64::INFINITY,
        }
    }

    /// Equality: exact for finite groups, within [`TAU_GRP`] for matrix groups.
    pub fn approx_eq(&self, a: &Element, b: &Element) -> bool {
        match self {
            Group::Finite(_) => self.distance(a, b) == 0.0,
            Group::Matrix(_) => self.distance(a, b) <= TAU_GRP,
        }
    }

    pub fn algebra(&self) -> Option<LieAlgebra> {
        self.family().map(|m| m.algebra())
    }

    pub fn exp(&self, x: &Mat) -> Result<Element> {
        let fam = self
            .family()
            .ok_or_else(|| Error::Domain(format!("{} has no exponential map", self.name())))?;
        if x.shape() != (fam.size(), fam.size()) {
            return Err(Error::Domain(format!(
                "algebra element of shape {:?} for {}",
                x.shape(),
                self.name()
            )));
        }
        Ok(Element::Matrix(fam.exp(x)))
    }

    pub fn log(&self, g: &Element) -> Result<Mat> {
        match (self, g) {
            (Group::Matrix(fam), Element::Matrix(m)) if m.shape() == (fam.size(), fam.size()) => {
                fam.log(m)
            }
            _ => Err(self.mismatch(g)),
        }
    }

    /// Uniform index for finite groups; `exp` of a random algebra element with
    /// coefficients in `[-spread, spread]` for matrix groups.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, spread: f64) -> Element {
        match self {
            Group::Finite(f) => Element::Index(rng.random_range(0..f.order())),
            Group::Matrix(fam) => {
                let alg = fam.algebra();
                let coeffs: Vec<f64> = (0..alg.dim())
                    .map(|_| rng.random_range(-spread..=spread))
                    .collect();
                let mut x = alg.combine(&coeffs);
                if let MatrixFamily::GL(n) = fam {
                    // keep GL samples well inside the exponential image
                    x = linalg::scale(&x, 1.0 / (*n as f64));
                }
                Element::Matrix(fam.exp(&x))
            }
        }
    }

    /// Human-readable rendering used in witnesses.
    pub fn describe(&self, a: &Element) -> String {
        match (self, a) {
            (Group::Finite(f), Element::Index(i)) if *i < f.order() => f.label(*i).to_string(),
            (_, Element::Index(i)) => format!("#{i}"),
            (_, Element::Matrix(m)) => describe_matrix(m),
        }
    }
}

pub fn describe_matrix(m: &Mat) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| {
            let cols: Vec<String> = (0..m.ncols())
                .map(|j| format!("{:.6}{:+.6}i", m[(i, j)].re, m[(i, j)].im))
                .collect();
            cols.join(", ")
        })
        .collect();
    format!("[{}]", rows.join("; "))
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_is_neutral() {
        for g in [
            Group::Finite(FiniteGroup::symmetric3()),
            Group::Matrix(MatrixFamily::SU2),
        ] {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let x = g.random_element(&mut rng, 1.0);
            assert!(g.approx_eq(&g.mul(&g.identity(), &x).unwrap(), &x));
            assert!(g.approx_eq(&g.mul(&x, &g.identity()).unwrap(), &x));
        }
    }

    #[test]
    fn z3_addition() {
        let g = Group::Finite(FiniteGroup::cyclic(3));
        assert_eq!(
            g.mul(&Element::Index(1), &Element::Index(2)).unwrap(),
            Element::Index(0)
        );
    }

    #[test]
    fn su2_opposite_rotations_cancel() {
        // exp(iπσ₃/2) exp(-iπσ₃/2) against a dense product oracle
        let fam = MatrixFamily::SU2;
        let x = Mat::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]);
        let x = linalg::scale(&x, std::f64::consts::FRAC_PI_2);
        let a = fam.exp(&x);
        let b = fam.exp(&(-x));
        let g = Group::Matrix(fam);
        let prod = g
            .mul(&Element::Matrix(a.clone()), &Element::Matrix(b.clone()))
            .unwrap();
        let mut dense = linalg::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    dense[(i, j)] += a[(i, k)] * b[(k, j)];
                }
            }
        }
        assert!(linalg::dist(prod.matrix().unwrap(), &linalg::eye(2)) < 1e-12);
        assert!(linalg::dist(&dense, &linalg::eye(2)) < 1e-12);
    }

    #[test]
    fn mixed_operands_are_domain_errors() {
        let g = Group::Finite(FiniteGroup::cyclic(3));
        let m = Element::Matrix(linalg::eye(2));
        assert!(matches!(
            g.mul(&Element::Index(0), &m),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            g.mul(&Element::Index(7), &Element::Index(0)),
            Err(Error::Domain(_))
        ));
        let su2 = Group::Matrix(MatrixFamily::SU2);
        assert!(matches!(su2.inv(&Element::Index(0)), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_tables_are_rejected() {
        assert!(FiniteGroup::from_table("bad", vec![vec![0, 0], vec![0, 1]], None).is_err());
        assert!(FiniteGroup::from_table("bad", vec![vec![0, 1], vec![1]], None).is_err());
        // a quasigroup that is not associative
        let t = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 1, 0]];
        assert!(FiniteGroup::from_table("bad", t, None).is_err());
    }

    #[test]
    fn exp_of_zero_is_identity() {
        for fam in [
            MatrixFamily::Trivial,
            MatrixFamily::U1,
            MatrixFamily::SU2,
            MatrixFamily::SO3,
            MatrixFamily::GL(2),
        ] {
            let e = fam.exp(&fam.algebra().zero());
            assert!(linalg::dist(&e, &linalg::eye(fam.size())) < 1e-15);
        }
    }

    #[test]
    fn u1_exp_matches_series() {
        let mut re = 0.0;
        let mut im = 0.0;
        let mut term = (1.0f64, 0.0f64);
        for k in 0..40 {
            re += term.0;
            im += term.1;
            // multiply by i/(k+1)
            term = (-term.1 / (k + 1) as f64, term.0 / (k + 1) as f64);
        }
        let z = MatrixFamily::U1.exp(&Mat::from_element(1, 1, c(0.0, 1.0)))[(0, 0)];
        assert!((z.re - re).abs() < 1e-14 && (z.im - im).abs() < 1e-14);
    }

    #[test]
    fn log_inverts_exp_on_compact_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for fam in [
            MatrixFamily::U1,
            MatrixFamily::SU2,
            MatrixFamily::SO3,
            MatrixFamily::GL(3),
        ] {
            let alg = fam.algebra();
            for _ in 0..100 {
                let mut coeffs: Vec<f64> = (0..alg.dim())
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect();
                let x0 = alg.combine(&coeffs);
                let n = linalg::norm(&x0);
                if n >= 1.0 {
                    coeffs.iter_mut().for_each(|v| *v *= 0.99 / n);
                }
                let x = alg.combine(&coeffs);
                let back = fam.log(&fam.exp(&x)).unwrap();
                assert!(linalg::dist(&back, &x) < 1e-10, "{fam:?}");
            }
        }
    }

    #[test]
    fn log_reports_cut_locus() {
        let minus_one = linalg::scale(&linalg::eye(2), -1.0);
        assert!(matches!(
            MatrixFamily::SU2.log(&minus_one),
            Err(Error::Range { .. })
        ));
        let rot_pi = linalg::from_real(3, 3, &[1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            MatrixFamily::SO3.log(&rot_pi),
            Err(Error::Range { .. })
        ));
        let u = Mat::from_element(1, 1, c(-1.0, 0.0));
        match MatrixFamily::U1.log(&u) {
            Err(Error::Range { eigenvalue, .. }) => assert_eq!(eigenvalue, "-1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn renormalization_projects_drift() {
        let fam = MatrixFamily::SO3;
        let r = fam.exp(&fam.algebra().combine(&[0.3, 0.2, -0.1]));
        let drifted = &r + linalg::scale(&linalg::eye(3), 1e-7);
        assert!(fam.membership_defect(&drifted) > TAU_GRP);
        let fixed = fam.renormalize(drifted);
        assert!(fam.membership_defect(&fixed) < 1e-13);
    }
}
