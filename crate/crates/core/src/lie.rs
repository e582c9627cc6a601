//! Matrix Lie algebras with a fixed real basis.

use nalgebra::{DMatrix, DVector};

use crate::linalg::{self, c, Mat};

/// A real Lie algebra realized as a span of complex matrices.
///
/// Elements are plain matrices of the defining representation; the basis
/// fixes coordinates used by form components (`a` in `"a,μ"` keys).
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    name: String,
    size: usize,
    basis: Vec<Mat>,
    gram_inv: DMatrix<f64>,
}

impl PartialEq for LieAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.size == other.size && self.basis == other.basis
    }
}

impl LieAlgebra {
    pub fn new(name: impl Into<String>, size: usize, basis: Vec<Mat>) -> Self {
        let d = basis.len();
        let gram = DMatrix::from_fn(d, d, |a, b| linalg::inner(&basis[a], &basis[b]));
        let gram_inv = if d == 0 {
            DMatrix::zeros(0, 0)
        } else {
            gram.try_inverse()
                .expect("basis must be linearly independent")
        };
        Self {
            name: name.into(),
            size,
            basis,
            gram_inv,
        }
    }

    /// The zero algebra of the trivial group, realized on 0×0 matrices.
    pub fn zero_algebra() -> Self {
        Self::new("0", 0, vec![])
    }

    /// u(1) with basis `i`.
    pub fn u1() -> Self {
        Self::new("u1", 1, vec![Mat::from_element(1, 1, c(0.0, 1.0))])
    }

    /// su(2) with basis `e_a = -(i/2) σ_a`, so that `[e_a, e_b] = ε_abc e_c`.
    pub fn su2() -> Self {
        let h = 0.5;
        let e1 = Mat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -h), c(0.0, -h), c(0.0, 0.0)]);
        let e2 = Mat::from_row_slice(2, 2, &[c(0.0, 0.0), c(-h, 0.0), c(h, 0.0), c(0.0, 0.0)]);
        let e3 = Mat::from_row_slice(2, 2, &[c(0.0, -h), c(0.0, 0.0), c(0.0, 0.0), c(0.0, h)]);
        Self::new("su2", 2, vec![e1, e2, e3])
    }

    /// so(3) with basis `(L_a)_bc = -ε_abc`, so that `[L_a, L_b] = ε_abc L_c`.
    pub fn so3() -> Self {
        let basis = (0..3)
            .map(|a| {
                let mut m = linalg::zeros(3);
                for b in 0..3 {
                    for cc in 0..3 {
                        m[(b, cc)] = c(-levi_civita(a, b, cc), 0.0);
                    }
                }
                m
            })
            .collect();
        Self::new("so3", 3, basis)
    }

    /// gl(n, R) with the elementary matrices `E_ij` in row-major order.
    pub fn gl(n: usize) -> Self {
        let mut basis = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut m = linalg::zeros(n);
                m[(i, j)] = c(1.0, 0.0);
                basis.push(m);
            }
        }
        Self::new(format!("gl{n}"), n, basis)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Matrix size of the defining representation.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn basis(&self) -> &[Mat] {
        &self.basis
    }

    pub fn zero(&self) -> Mat {
        linalg::zeros(self.size)
    }

    pub fn combine(&self, coeffs: &[f64]) -> Mat {
        let mut m = self.zero();
        for (e, &x) in self.basis.iter().zip(coeffs) {
            m += linalg::scale(e, x);
        }
        m
    }

    /// Coordinates of the orthogonal projection of `m` onto the span.
    pub fn coords(&self, m: &Mat) -> Vec<f64> {
        let rhs =
            DVector::from_iterator(self.dim(), self.basis.iter().map(|e| linalg::inner(e, m)));
        (&self.gram_inv * rhs).iter().copied().collect()
    }

    /// Distance from `m` to the algebra.
    pub fn defect(&self, m: &Mat) -> f64 {
        if m.shape() != (self.size, self.size) {
            return f64::INFINITY;
        }
        linalg::dist(&self.combine(&self.coords(m)), m)
    }

    /// Structure constants `f[a][b][c]` with `[e_a, e_b] = Σ_c f_abc e_c`.
    pub fn structure_constants(&self) -> Vec<Vec<Vec<f64>>> {
        let d = self.dim();
        (0..d)
            .map(|a| {
                (0..d)
                    .map(|b| self.coords(&linalg::commutator(&self.basis[a], &self.basis[b])))
                    .collect()
            })
            .collect()
    }

    /// Spectral radius of `m`; the compact families have injective exponential below π.
    pub fn spectral_radius(m: &Mat) -> f64 {
        linalg::eigenvalues(m)
            .into_iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}
