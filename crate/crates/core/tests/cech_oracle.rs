use std::collections::{BTreeSet, HashSet};

use bigon::cech::{
    self, check_tetrahedron, classify_finite, CoverNerve, GluingCocycle, DEFAULT_BUDGET,
};
use bigon::shipped::crossed_module;
use bigon::{CrossedModule, Element};

/// Plain table arithmetic for a finite crossed module.
struct Tables {
    gm: Vec<Vec<usize>>,
    hm: Vec<Vec<usize>>,
    ginv: Vec<usize>,
    hinv: Vec<usize>,
    t: Vec<usize>,
    alpha: Vec<Vec<usize>>,
}

impl Tables {
    fn new(cm: &CrossedModule) -> Self {
        let g = cm.g().finite().unwrap();
        let h = cm.h().finite().unwrap();
        let gm = g.table().to_vec();
        let hm = h.table().to_vec();
        let inv = |m: &Vec<Vec<usize>>, e: usize| -> Vec<usize> {
            (0..m.len())
                .map(|a| (0..m.len()).find(|&b| m[a][b] == e).unwrap())
                .collect()
        };
        Self {
            ginv: inv(&gm, g.identity()),
            hinv: inv(&hm, h.identity()),
            t: (0..h.order())
                .map(|x| cm.t(&Element::Index(x)).index().unwrap())
                .collect(),
            alpha: (0..g.order())
                .map(|a| {
                    (0..h.order())
                        .map(|x| {
                            cm.alpha(&Element::Index(a), &Element::Index(x))
                                .index()
                                .unwrap()
                        })
                        .collect()
                })
                .collect(),
            gm,
            hm,
        }
    }
    fn g(&self, a: usize, b: usize) -> usize {
        self.gm[a][b]
    }
    fn h(&self, a: usize, b: usize) -> usize {
        self.hm[a][b]
    }
}

fn assignments(base: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| (0..base).map(move |x| [v.clone(), vec![x]].concat()))
            .collect();
    }
    out
}

fn pos<T: PartialEq>(list: &[T], x: &T) -> usize {
    list.iter().position(|y| y == x).unwrap()
}

/// Every `(g, h)` with `t(h_ijk) g_ik = g_ij g_jk` and `h_ijk h_ikl = α(g_ij)(h_jkl) h_ijl`.
fn oracle_cocycles(tb: &Tables, nerve: &CoverNerve) -> Vec<(Vec<usize>, Vec<usize>)> {
    let (d, tr) = (&nerve.doubles, &nerve.triples);
    let g_of = |gv: &[usize], i: usize, j: usize| gv[pos(d, &[i, j])];
    let mut out = vec![];
    for gv in assignments(tb.gm.len(), d.len()) {
        for hv in assignments(tb.hm.len(), tr.len()) {
            let h_of = |i: usize, j: usize, k: usize| hv[pos(tr, &[i, j, k])];
            let tri = tr.iter().all(|&[i, j, k]| {
                tb.g(tb.t[h_of(i, j, k)], g_of(&gv, i, k)) == tb.g(g_of(&gv, i, j), g_of(&gv, j, k))
            });
            let tet = nerve.quadruples.iter().all(|&[i, j, k, l]| {
                tb.h(h_of(i, j, k), h_of(i, k, l))
                    == tb.h(tb.alpha[g_of(&gv, i, j)][h_of(j, k, l)], h_of(i, j, l))
            });
            if tri && tet {
                out.push((gv.clone(), hv.clone()));
            }
        }
    }
    out
}

/// `g' = λ_i g t(b) λ_j⁻¹`,
/// `h' = α(λ_i g_ij)(b_ij)·α(λ_i g_ij g_jk)(b_jk)·α(λ_i)(h_ijk)·α(λ_i g_ik)(b_ik)⁻¹`.
fn oracle_act(
    tb: &Tables,
    nerve: &CoverNerve,
    (gv, hv): &(Vec<usize>, Vec<usize>),
    lam: &[usize],
    b: &[usize],
) -> (Vec<usize>, Vec<usize>) {
    let (d, tr) = (&nerve.doubles, &nerve.triples);
    let l = |i: usize| lam[pos(&nerve.charts, &i)];
    let gi = |i: usize, j: usize| gv[pos(d, &[i, j])];
    let bi = |i: usize, j: usize| b[pos(d, &[i, j])];
    let g2 = d
        .iter()
        .map(|&[i, j]| tb.g(tb.g(tb.g(l(i), gi(i, j)), tb.t[bi(i, j)]), tb.ginv[l(j)]))
        .collect();
    let h2 = tr
        .iter()
        .zip(hv)
        .map(|(&[i, j, k], &h)| {
            let lg = tb.g(l(i), gi(i, j));
            let a = tb.alpha[lg][bi(i, j)];
            let c = tb.alpha[tb.g(lg, gi(j, k))][bi(j, k)];
            let m = tb.alpha[l(i)][h];
            let z = tb.hinv[tb.alpha[tb.g(l(i), gi(i, k))][bi(i, k)]];
            tb.h(tb.h(tb.h(a, c), m), z)
        })
        .collect();
    (g2, h2)
}

fn oracle_orbits(tb: &Tables, nerve: &CoverNerve) -> (usize, usize) {
    let cocycles = oracle_cocycles(tb, nerve);
    let set: BTreeSet<_> = cocycles.iter().cloned().collect();
    let lams = assignments(tb.gm.len(), nerve.charts.len());
    let bs = assignments(tb.hm.len(), nerve.doubles.len());
    let mut seen = HashSet::new();
    let mut orbits = 0;
    for c in &set {
        if seen.contains(c) {
            continue;
        }
        orbits += 1;
        for lam in &lams {
            for b in &bs {
                let moved = oracle_act(tb, nerve, c, lam, b);
                assert!(set.contains(&moved), "oracle action left the cocycle set");
                seen.insert(moved);
            }
        }
    }
    (cocycles.len(), orbits)
}

fn census(id: &str, nerve: &CoverNerve) -> (usize, usize) {
    let c = classify_finite(&crossed_module(id).unwrap(), nerve, DEFAULT_BUDGET).unwrap();
    (c.cocycles, c.orbits)
}

#[test]
fn abelian_tetrahedron_matches_additive_condition() {
    for n in [2usize, 3] {
        let cm = crossed_module(&format!("ABELIAN(Z{n})")).unwrap();
        let nerve = CoverNerve::tetrahedron();
        let mut agree = 0;
        for hv in assignments(n, 4) {
            let mut data = GluingCocycle::empty();
            for &e in &nerve.doubles {
                data.g.insert(e, Element::Index(0));
            }
            for (s, &v) in nerve.triples.iter().zip(&hv) {
                data.h.insert(*s, Element::Index(v));
            }
            let h = |s: [usize; 3]| hv[pos(&nerve.triples, &s)] as i64;
            let additive = (h([2, 3, 4]) - h([1, 3, 4]) + h([1, 2, 4]) - h([1, 2, 3]))
                .rem_euclid(n as i64)
                == 0;
            let passed = check_tetrahedron(&cm, &nerve, &data).unwrap().passed();
            assert_eq!(passed, additive, "Z{n} h = {hv:?}");
            agree += 1;
        }
        assert_eq!(agree, n.pow(4));
    }
}

#[test]
fn sphere_census_over_z2() {
    let nerve = CoverNerve::tetrahedron_boundary();
    let tb = Tables::new(&crossed_module("ABELIAN(Z2)").unwrap());
    let oracle = oracle_orbits(&tb, &nerve);
    assert_eq!(oracle, (16, 2));
    assert_eq!(census("ABELIAN(Z2)", &nerve), oracle);
}

#[test]
fn census_matches_oracle() {
    let cases: Vec<(&str, CoverNerve)> = vec![
        ("ABELIAN(Z3)", CoverNerve::tetrahedron()),
        ("ABELIAN(Z3)", CoverNerve::tetrahedron_boundary()),
        ("Z2_ON_Z3", CoverNerve::complete(3)),
        ("Z2_ON_Z3", CoverNerve::tetrahedron()),
        ("AUT(S3)", CoverNerve::complete(2)),
        ("AUT(S3)", CoverNerve::complete(3)),
        ("IDENTITY(S3)", CoverNerve::complete(3)),
        ("AUT(Z5)", CoverNerve::complete(3)),
    ];
    for (id, nerve) in cases {
        let tb = Tables::new(&crossed_module(id).unwrap());
        assert_eq!(
            census(id, &nerve),
            oracle_orbits(&tb, &nerve),
            "{id} on {nerve:?}"
        );
    }
}

#[test]
fn census_is_invariant_under_relabeling() {
    let nerve = CoverNerve::tetrahedron();
    let base = census("Z2_ON_Z3", &nerve);
    for perm in [[2, 1, 4, 3], [4, 3, 2, 1], [3, 1, 4, 2]] {
        let relabeled = nerve.relabel(|i| perm[i - 1]);
        let mut sorted = relabeled.clone();
        sorted.doubles.sort();
        sorted.triples.sort();
        assert_eq!(census("Z2_ON_Z3", &sorted), base);
    }
}

#[test]
fn census_is_deterministic() {
    let cm = crossed_module("Z2_ON_Z3").unwrap();
    let a = classify_finite(&cm, &CoverNerve::tetrahedron(), DEFAULT_BUDGET).unwrap();
    let b = classify_finite(&cm, &CoverNerve::tetrahedron(), cech::DEFAULT_BUDGET).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}
