//! The catalog of crossed modules addressable by identifier.
//!
//! | identifier          | G            | H      | t          | α              |
//! |---------------------|--------------|--------|------------|----------------|
//! | `ABELIAN(U1)`       | 1            | U(1)   | trivial    | trivial        |
//! | `ABELIAN(Zn)`       | 1            | Z/n    | trivial    | trivial        |
//! | `IDENTITY(G)`       | G            | G      | identity   | conjugation    |
//! | `AUT(SU2)`          | SO(3)        | SU(2)  | covering   | rotation       |
//! | `AUT(S3)`, `AUT(Zn)`| Aut(H)       | H      | inner      | evaluation     |
//! | `Z2_ON_Z3`          | Z/2          | Z/3    | trivial    | inversion      |
//! | `TRIVIAL_ACTION(S3)`| 1            | S₃     | trivial    | trivial        |
//!
//! `IDENTITY(G)` accepts `U1`, `SU2`, `SO3` and `S3`. `TRIVIAL_ACTION(S3)` violates
//! the Peiffer identity and is kept as a negative fixture.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::crossed::{BoundaryFn, CrossedModule, Differential};
use crate::error::{Error, Result};
use crate::group::{Element, FiniteGroup, Group, MatrixFamily};
use crate::lie::LieAlgebra;
use crate::linalg::{self, Mat};

pub const SHIPPED: &[&str] = &[
    "ABELIAN(U1)",
    "ABELIAN(Z5)",
    "IDENTITY(U1)",
    "IDENTITY(SU2)",
    "IDENTITY(SO3)",
    "IDENTITY(S3)",
    "AUT(SU2)",
    "AUT(S3)",
    "AUT(Z5)",
    "Z2_ON_Z3",
];

/// Resolves a crossed-module identifier.
pub fn crossed_module(id: &str) -> Result<CrossedModule> {
    let id = id.trim();
    let unknown = || Error::Config(format!("unknown crossed module `{id}`"));
    let (head, arg) = match id.find('(') {
        Some(p) if id.ends_with(')') => (&id[..p], &id[p + 1..id.len() - 1]),
        _ => (id, ""),
    };
    match (head, arg) {
        ("ABELIAN", "U1") => Ok(abelian_u1()),
        ("ABELIAN", z) => Ok(abelian_finite(FiniteGroup::cyclic(
            parse_cyclic(z).ok_or_else(unknown)?,
        ))),
        ("IDENTITY", "S3") => Ok(identity_finite(FiniteGroup::symmetric3())),
        ("IDENTITY", "U1") => Ok(identity_matrix(MatrixFamily::U1)),
        ("IDENTITY", "SU2") => Ok(identity_matrix(MatrixFamily::SU2)),
        ("IDENTITY", "SO3") => Ok(identity_matrix(MatrixFamily::SO3)),
        ("IDENTITY", z) => Ok(identity_finite(FiniteGroup::cyclic(
            parse_cyclic(z).ok_or_else(unknown)?,
        ))),
        ("AUT", "SU2") => Ok(aut_su2()),
        ("AUT", "S3") => Ok(automorphism_module(FiniteGroup::symmetric3())),
        ("AUT", z) => Ok(automorphism_module(FiniteGroup::cyclic(
            parse_cyclic(z).ok_or_else(unknown)?,
        ))),
        ("Z2_ON_Z3", "") => Ok(z2_on_z3()),
        ("TRIVIAL_ACTION", "S3") => Ok(trivial_action(FiniteGroup::symmetric3())),
        _ => Err(unknown()),
    }
}

fn parse_cyclic(s: &str) -> Option<usize> {
    s.strip_prefix('Z')?
        .parse()
        .ok()
        .filter(|&n| n > 0 && n <= 64)
}

fn identity_boundary() -> BoundaryFn {
    Arc::new(|h: &Element| h.clone())
}

/// `(1, U(1))` with trivial `t` and `α`: the abelian gerbe 2-group.
pub fn abelian_u1() -> CrossedModule {
    let trivial = MatrixFamily::Trivial;
    let differential = Differential {
        g_algebra: LieAlgebra::zero_algebra(),
        h_algebra: LieAlgebra::u1(),
        dt: Arc::new(|_x: &Mat| linalg::zeros(0)),
        dalpha: Arc::new(|_y: &Mat, x: &Mat| linalg::zeros(x.nrows())),
        act_on_algebra: Arc::new(|_g: &Element, x: &Mat| x.clone()),
        dalpha_at: Arc::new(|_y: &Mat, h: &Element| linalg::zeros(h.matrix().unwrap().nrows())),
    };
    CrossedModule::new(
        "ABELIAN(U1)",
        Group::Matrix(trivial),
        Group::Matrix(MatrixFamily::U1),
        Arc::new(|_h: &Element| Element::Matrix(linalg::eye(0))),
        Arc::new(|_g: &Element, h: &Element| h.clone()),
        Some(differential),
    )
}

/// `(1, H)` with trivial structure maps. A crossed module exactly when `H` is abelian.
fn trivial_structure(name: String, h: FiniteGroup) -> CrossedModule {
    let g = FiniteGroup::trivial();
    let t = vec![0; h.order()];
    let alpha = vec![(0..h.order()).collect()];
    CrossedModule::from_tables(name, g, h, t, alpha).expect("well-formed tables")
}

pub fn abelian_finite(h: FiniteGroup) -> CrossedModule {
    trivial_structure(format!("ABELIAN({})", h.name()), h)
}

pub fn trivial_action(h: FiniteGroup) -> CrossedModule {
    trivial_structure(format!("TRIVIAL_ACTION({})", h.name()), h)
}

/// `(G, G, id, conjugation)` on a finite group.
pub fn identity_finite(g: FiniteGroup) -> CrossedModule {
    let n = g.order();
    let t = (0..n).collect();
    let alpha = (0..n)
        .map(|a| (0..n).map(|b| g.mul(g.mul(a, b), g.inv(a))).collect())
        .collect();
    CrossedModule::from_tables(format!("IDENTITY({})", g.name()), g.clone(), g, t, alpha)
        .expect("well-formed tables")
}

/// `(G, G, id, conjugation)` on a matrix group; `dt = id`, `dα = [·,·]`.
pub fn identity_matrix(fam: MatrixFamily) -> CrossedModule {
    let alg = fam.algebra();
    let differential = Differential {
        g_algebra: alg.clone(),
        h_algebra: alg,
        dt: Arc::new(|x: &Mat| x.clone()),
        dalpha: Arc::new(|y: &Mat, x: &Mat| linalg::commutator(y, x)),
        act_on_algebra: Arc::new(|g: &Element, x: &Mat| {
            let g = g.matrix().unwrap();
            g * x * g.adjoint()
        }),
        dalpha_at: Arc::new(|y: &Mat, h: &Element| {
            let h = h.matrix().unwrap();
            y * h - h * y
        }),
    };
    let group = Group::Matrix(fam);
    let conj_group = group.clone();
    CrossedModule::new(
        format!("IDENTITY({})", group.name()),
        group.clone(),
        group,
        identity_boundary(),
        Arc::new(move |g: &Element, h: &Element| conj_group.conj(g, h).expect("matrix elements")),
        Some(differential),
    )
}

/// Rotation matrix of `U` under the double cover: `U e_b U⁻¹ = Σ_a R_ab e_a`.
pub fn su2_to_so3(u: &Mat) -> Mat {
    let alg = LieAlgebra::su2();
    let mut r = linalg::zeros(3);
    for b in 0..3 {
        let rotated = u * &alg.basis()[b] * u.adjoint();
        let col = alg.coords(&rotated);
        for a in 0..3 {
            r[(a, b)] = linalg::c(col[a], 0.0);
        }
    }
    r
}

/// Splits `h ∈ SU(2)` as `c·I + Σ v_a (2 e_a)`.
fn su2_split(h: &Mat) -> (f64, [f64; 3]) {
    let alg = LieAlgebra::su2();
    let cos = 0.5 * (h[(0, 0)] + h[(1, 1)]).re;
    let coords = alg.coords(h);
    (cos, [coords[0] / 2.0, coords[1] / 2.0, coords[2] / 2.0])
}

fn su2_join(cos: f64, v: [f64; 3]) -> Mat {
    linalg::scale(&linalg::eye(2), cos)
        + LieAlgebra::su2().combine(&[2.0 * v[0], 2.0 * v[1], 2.0 * v[2]])
}

fn rotate(r: &Mat, v: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|a| (0..3).map(|b| r[(a, b)].re * v[b]).sum())
}

/// `AUT(SU(2)) ≅ (SO(3), SU(2))`: `t` is the double cover and `α(R)` rotates the
/// vector part of a unit quaternion.
pub fn aut_su2() -> CrossedModule {
    let differential = Differential {
        g_algebra: LieAlgebra::so3(),
        h_algebra: LieAlgebra::su2(),
        dt: Arc::new(|x: &Mat| LieAlgebra::so3().combine(&LieAlgebra::su2().coords(x))),
        dalpha: Arc::new(|y: &Mat, x: &Mat| {
            let xv = LieAlgebra::su2().coords(x);
            let yx = rotate(y, [xv[0], xv[1], xv[2]]);
            LieAlgebra::su2().combine(&yx)
        }),
        act_on_algebra: Arc::new(|r: &Element, x: &Mat| {
            let xv = LieAlgebra::su2().coords(x);
            LieAlgebra::su2().combine(&rotate(r.matrix().unwrap(), [xv[0], xv[1], xv[2]]))
        }),
        dalpha_at: Arc::new(|y: &Mat, h: &Element| {
            let (_, v) = su2_split(h.matrix().unwrap());
            su2_join(0.0, rotate(y, v))
        }),
    };
    CrossedModule::new(
        "AUT(SU2)",
        Group::Matrix(MatrixFamily::SO3),
        Group::Matrix(MatrixFamily::SU2),
        Arc::new(|h: &Element| {
            Element::Matrix(MatrixFamily::SO3.renormalize(su2_to_so3(h.matrix().unwrap())))
        }),
        Arc::new(|r: &Element, h: &Element| {
            let (cos, v) = su2_split(h.matrix().unwrap());
            Element::Matrix(
                MatrixFamily::SU2.renormalize(su2_join(cos, rotate(r.matrix().unwrap(), v))),
            )
        }),
        Some(differential),
    )
}

/// `Z/2` acting on `Z/3` by inversion with trivial boundary.
pub fn z2_on_z3() -> CrossedModule {
    let t = vec![0, 0, 0];
    let alpha = vec![vec![0, 1, 2], vec![0, 2, 1]];
    CrossedModule::from_tables(
        "Z2_ON_Z3",
        FiniteGroup::cyclic(2),
        FiniteGroup::cyclic(3),
        t,
        alpha,
    )
    .expect("well-formed tables")
}

/// All automorphisms of a finite group as permutations of its elements, identity first.
pub fn automorphisms(h: &FiniteGroup) -> Vec<Vec<usize>> {
    let n = h.order();
    // greedy generating set
    let mut gens: Vec<usize> = Vec::new();
    let mut span = vec![false; n];
    span[h.identity()] = true;
    while let Some(x) = (0..n).find(|&x| !span[x]) {
        gens.push(x);
        span = closure(h, &gens);
    }
    let order_of = |x: usize| {
        let mut k = 1;
        let mut y = x;
        while y != h.identity() {
            y = h.mul(y, x);
            k += 1;
        }
        k
    };
    let mut result = Vec::new();
    let mut images = vec![0usize; gens.len()];
    let total = n.pow(gens.len() as u32);
    for code in 0..total {
        let mut rest = code;
        for slot in images.iter_mut() {
            *slot = rest % n;
            rest /= n;
        }
        if gens
            .iter()
            .zip(&images)
            .any(|(&g, &i)| order_of(g) != order_of(i))
        {
            continue;
        }
        if let Some(map) = extend(h, &gens, &images) {
            result.push(map);
        }
    }
    result.sort();
    let id: Vec<usize> = (0..n).collect();
    if let Some(p) = result.iter().position(|m| *m == id) {
        let idm = result.remove(p);
        result.insert(0, idm);
    }
    result
}

fn closure(h: &FiniteGroup, gens: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; h.order()];
    let mut queue = VecDeque::from([h.identity()]);
    seen[h.identity()] = true;
    while let Some(x) = queue.pop_front() {
        for &g in gens {
            let y = h.mul(x, g);
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

fn extend(h: &FiniteGroup, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    let n = h.order();
    let mut map = vec![usize::MAX; n];
    map[h.identity()] = h.identity();
    let mut queue = VecDeque::from([h.identity()]);
    while let Some(x) = queue.pop_front() {
        for (&g, &img) in gens.iter().zip(images) {
            let y = h.mul(x, g);
            let fy = h.mul(map[x], img);
            if map[y] == usize::MAX {
                map[y] = fy;
                queue.push_back(y);
            } else if map[y] != fy {
                return None;
            }
        }
    }
    let mut hit = vec![false; n];
    for &v in &map {
        if v == usize::MAX || hit[v] {
            return None;
        }
        hit[v] = true;
    }
    for a in 0..n {
        for b in 0..n {
            if map[h.mul(a, b)] != h.mul(map[a], map[b]) {
                return None;
            }
        }
    }
    Some(map)
}

/// `AUT(H) = (Aut(H), H, inner, evaluation)` for a finite group `H`.
pub fn automorphism_module(h: FiniteGroup) -> CrossedModule {
    let auts = automorphisms(&h);
    let m = auts.len();
    let n = h.order();
    let table: Vec<Vec<usize>> = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| {
                    let comp: Vec<usize> = (0..n).map(|x| auts[a][auts[b][x]]).collect();
                    auts.iter()
                        .position(|p| *p == comp)
                        .expect("closed under composition")
                })
                .collect()
        })
        .collect();
    let inner = |x: usize| -> Vec<usize> { (0..n).map(|y| h.mul(h.mul(x, y), h.inv(x))).collect() };
    let t: Vec<usize> = (0..n)
        .map(|x| auts.iter().position(|p| *p == inner(x)).unwrap())
        .collect();
    let labels: Vec<String> = (0..m)
        .map(|k| match t.iter().position(|&img| img == k) {
            Some(x) => format!("c{}", h.label(x)),
            None => format!("aut{k}"),
        })
        .collect();
    let g = FiniteGroup::from_table(format!("Aut({})", h.name()), table, Some(labels))
        .expect("automorphisms form a group");
    CrossedModule::from_tables(format!("AUT({})", h.name()), g, h, t, auts)
        .expect("well-formed tables")
}
