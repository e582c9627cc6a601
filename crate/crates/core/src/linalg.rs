//! Dense complex matrix helpers: exponential, logarithm, polar projection.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn eye(n: usize) -> Mat {
    Mat::identity(n, n)
}

pub fn zeros(n: usize) -> Mat {
    Mat::zeros(n, n)
}

pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Mat {
    Mat::from_row_iterator(rows, cols, data.iter().map(|&x| c(x, 0.0)))
}

/// Frobenius norm.
pub fn norm(m: &Mat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc + z.norm_sqr()).sqrt()
}

pub fn dist(a: &Mat, b: &Mat) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    norm(&(a - b))
}

fn one_norm(m: &Mat) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Real inner product `Re tr(a^H b)`.
pub fn inner(a: &Mat, b: &Mat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub fn commutator(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

pub fn scale(m: &Mat, s: f64) -> Mat {
    m.map(|z| z * s)
}

/// Matrix exponential by scaling and squaring with a diagonal [8/8] Padé approximant.
pub fn expm(x: &Mat) -> Mat {
    let n = x.nrows();
    if n == 0 {
        return eye(0);
    }
    if n == 1 {
        return Mat::from_element(1, 1, x[(0, 0)].exp());
    }
    let nrm = one_norm(x);
    let squarings = if nrm > 0.5 {
        (nrm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let y = scale(x, 0.5f64.powi(squarings));
    const Q: usize = 8;
    let mut coeff = 1.0;
    let mut num = eye(n);
    let mut den = eye(n);
    let mut pow = eye(n);
    for k in 1..=Q {
        coeff *= (Q - k + 1) as f64 / (((2 * Q - k + 1) * k) as f64);
        pow = &pow * &y;
        let term = scale(&pow, coeff);
        num += &term;
        if k % 2 == 0 {
            den += &term;
        } else {
            den -= &term;
        }
    }
    let mut r = den
        .try_inverse()
        .expect("Padé denominator is invertible for scaled arguments")
        * num;
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// Nearest unitary matrix in Frobenius norm (unitary polar factor).
pub fn polar_unitary(m: &Mat) -> Mat {
    if m.nrows() == 0 {
        return m.clone();
    }
    if m.nrows() == 1 {
        let z = m[(0, 0)];
        return Mat::from_element(1, 1, z / z.norm());
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    u * v_t
}

pub fn det(m: &Mat) -> Complex64 {
    if m.nrows() == 0 {
        return c(1.0, 0.0);
    }
    m.clone().determinant()
}

/// Eigenvalues through the complex Schur form.
pub fn eigenvalues(m: &Mat) -> Vec<Complex64> {
    match m.nrows() {
        0 => vec![],
        1 => vec![m[(0, 0)]],
        2 => {
            let tr = m[(0, 0)] + m[(1, 1)];
            let d = det(m);
            let half = tr * 0.5;
            let disc = (half * half - d).sqrt();
            vec![half + disc, half - disc]
        }
        _ => {
            let (_, t) = m.clone().schur().unpack();
            (0..t.nrows()).map(|i| t[(i, i)]).collect()
        }
    }
}

/// Principal square root by the Denman–Beavers iteration.
fn sqrtm(a: &Mat) -> Result<Mat> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = eye(n);
    for _ in 0..100 {
        let y_inv = y
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Domain("singular iterate in matrix square root".into()))?;
        let z_inv = z
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Domain("singular iterate in matrix square root".into()))?;
        let y_next = scale(&(&y + z_inv), 0.5);
        let z_next = scale(&(&z + y_inv), 0.5);
        let delta = dist(&y_next, &y);
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * norm(&y).max(1.0) {
            break;
        }
    }
    Ok(y)
}

/// Principal logarithm by inverse scaling and squaring.
///
/// Fails with a range error when an eigenvalue sits on the closed negative
/// real axis, where the principal branch is undefined.
pub fn logm(a: &Mat) -> Result<Mat> {
    let n = a.nrows();
    if n == 0 {
        return Ok(zeros(0));
    }
    for lambda in eigenvalues(a) {
        if lambda.re <= 0.0 && lambda.im.abs() <= 1e-8 * lambda.norm().max(1.0) {
            return Err(Error::Range {
                message: "logarithm undefined on the negative real axis".into(),
                eigenvalue: format!("{:.6}{:+.6}i", lambda.re, lambda.im),
            });
        }
    }
    if n == 1 {
        return Ok(Mat::from_element(1, 1, a[(0, 0)].ln()));
    }
    let id = eye(n);
    let mut r = a.clone();
    let mut k = 0;
    while norm(&(&r - &id)) > 0.1 && k < 60 {
        r = sqrtm(&r)?;
        k += 1;
    }
    // log(I + E) = sum (-1)^{j+1} E^j / j, with ||E|| <= 0.1 thirty terms reach machine precision.
    let e = &r - &id;
    let mut term = e.clone();
    let mut acc = zeros(n);
    for j in 1..=40 {
        let s = if j % 2 == 1 { 1.0 } else { -1.0 } / j as f64;
        acc += scale(&term, s);
        term = &term * &e;
        if norm(&term) < 1e-18 {
            break;
        }
    }
    Ok(scale(&acc, 2f64.powi(k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series_exp(x: &Mat) -> Mat {
        let n = x.nrows();
        let mut acc = eye(n);
        let mut term = eye(n);
        for k in 1..60 {
            term = scale(&(&term * x), 1.0 / k as f64);
            acc += &term;
        }
        acc
    }

    #[test]
    fn expm_matches_taylor_series_on_small_matrices() {
        let x = Mat::from_row_slice(
            3,
            3,
            &[
                c(0.1, 0.2),
                c(-0.3, 0.0),
                c(0.0, 0.5),
                c(0.4, -0.1),
                c(0.2, 0.0),
                c(0.1, 0.1),
                c(0.0, 0.0),
                c(-0.2, 0.3),
                c(-0.1, 0.0),
            ],
        );
        assert!(dist(&expm(&x), &series_exp(&x)) < 1e-13);
        let big = scale(&x, 6.0);
        let rel = dist(&expm(&big), &series_exp(&big)) / norm(&series_exp(&big));
        assert!(rel < 1e-12, "relative error {rel}");
    }

    #[test]
    fn logm_inverts_expm_for_general_matrices() {
        let x = Mat::from_row_slice(
            2,
            2,
            &[c(0.3, 0.1), c(0.7, 0.0), c(-0.2, 0.4), c(0.1, -0.6)],
        );
        let back = logm(&expm(&x)).unwrap();
        assert!(dist(&back, &x) < 1e-11);
    }

    #[test]
    fn logm_rejects_negative_real_eigenvalue() {
        let m = from_real(2, 2, &[-1.0, 0.0, 0.0, 2.0]);
        match logm(&m) {
            Err(Error::Range { eigenvalue, .. }) => assert!(eigenvalue.starts_with("-1.0")),
            other => panic!("expected range error, got {other:?}"),
        }
    }

    #[test]
    fn polar_projection_restores_unitarity() {
        let u = expm(&Mat::from_row_slice(
            2,
            2,
            &[c(0.0, 0.3), c(0.2, 0.1), c(-0.2, 0.1), c(0.0, -0.3)],
        ));
        let drifted = &u + scale(&eye(2), 1e-6);
        let p = polar_unitary(&drifted);
        assert!(dist(&(p.adjoint() * &p), &eye(2)) < 1e-14);
        assert!(dist(&p, &u) < 2e-6);
    }
}
