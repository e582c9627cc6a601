//! 2-cells of the strict 2-group of a crossed module.
//!
//! A cell `(g, h)` has source `g` and target `t(h)·g`. Compositions:
//!
//! * vertical: `(g, h) · (t(h)g, h') = (g, h'h)`
//! * horizontal: `(g₁, h₁) ∘ (g₂, h₂) = (g₁g₂, h₁·α(g₁)(h₂))`
//!
//! With these conventions the interchange law is equivalent to the Peiffer identity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::crossed::{CrossedModule, Mode};
use crate::error::{Error, Result};
use crate::group::Element;
use crate::report::{Check, ValidationReport};

/// A morphism of the 2-group, an element of `G ⋉ H`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoCell {
    pub g: Element,
    pub h: Element,
}

impl TwoCell {
    pub fn new(g: Element, h: Element) -> Self {
        Self { g, h }
    }
}

impl CrossedModule {
    pub fn cell(&self, g: Element, h: Element) -> TwoCell {
        TwoCell::new(g, h)
    }

    /// The identity cell `(g, 1)`.
    pub fn identity_cell(&self, g: Element) -> TwoCell {
        TwoCell::new(g, self.h().identity())
    }

    pub fn source(&self, f: &TwoCell) -> Element {
        f.g.clone()
    }

    pub fn target(&self, f: &TwoCell) -> Result<Element> {
        self.g().mul(&self.t(&f.h), &f.g)
    }

    pub fn endpoints(&self, f: &TwoCell) -> Result<(Element, Element)> {
        Ok((self.source(f), self.target(f)?))
    }

    fn check_cell(&self, f: &TwoCell) -> Result<()> {
        if !self.g().contains(&f.g) {
            return Err(Error::Domain(format!(
                "cell source is not an element of {}",
                self.g().name()
            )));
        }
        if !self.h().contains(&f.h) {
            return Err(Error::Domain(format!(
                "cell label is not an element of {}",
                self.h().name()
            )));
        }
        Ok(())
    }

    /// `f` followed by `f2`; requires `source(f2) = target(f)`.
    pub fn vertical(&self, f: &TwoCell, f2: &TwoCell) -> Result<TwoCell> {
        self.vertical_within(f, f2, crate::group::TAU_GRP)
    }

    /// [`vertical`](Self::vertical) with the endpoint match held to `tol`; for
    /// cells produced by numerical transport.
    pub fn vertical_within(&self, f: &TwoCell, f2: &TwoCell, tol: f64) -> Result<TwoCell> {
        self.check_cell(f)?;
        self.check_cell(f2)?;
        let tgt = self.target(f)?;
        if self.g().distance(&tgt, &f2.g) > tol {
            return Err(Error::Composition {
                source_value: self.g().describe(&f2.g),
                target_value: self.g().describe(&tgt),
            });
        }
        Ok(TwoCell::new(f.g.clone(), self.h().mul(&f2.h, &f.h)?))
    }

    pub fn horizontal(&self, f1: &TwoCell, f2: &TwoCell) -> Result<TwoCell> {
        self.check_cell(f1)?;
        self.check_cell(f2)?;
        let g = self.g().mul(&f1.g, &f2.g)?;
        let h = self.h().mul(&f1.h, &self.alpha(&f1.g, &f2.h))?;
        Ok(TwoCell::new(g, h))
    }

    /// `g ∘ f`, horizontal composition with the identity cell on `g`.
    pub fn whisker_left(&self, g: &Element, f: &TwoCell) -> Result<TwoCell> {
        self.horizontal(&self.identity_cell(g.clone()), f)
    }

    /// `f ∘ g`.
    pub fn whisker_right(&self, f: &TwoCell, g: &Element) -> Result<TwoCell> {
        self.horizontal(f, &self.identity_cell(g.clone()))
    }

    /// `(t(h)g, h⁻¹)`, the inverse for vertical composition.
    pub fn vertical_inverse(&self, f: &TwoCell) -> Result<TwoCell> {
        Ok(TwoCell::new(self.target(f)?, self.h().inv(&f.h)?))
    }

    /// `(g⁻¹, α(g⁻¹)(h⁻¹))`, the inverse for horizontal composition.
    pub fn horizontal_inverse(&self, f: &TwoCell) -> Result<TwoCell> {
        let gi = self.g().inv(&f.g)?;
        let hi = self.h().inv(&f.h)?;
        let h = self.alpha(&gi, &hi);
        Ok(TwoCell::new(gi, h))
    }

    pub fn cells_approx_eq(&self, a: &TwoCell, b: &TwoCell) -> bool {
        self.g().approx_eq(&a.g, &b.g) && self.h().approx_eq(&a.h, &b.h)
    }

    pub fn cell_distance(&self, a: &TwoCell, b: &TwoCell) -> f64 {
        self.g().distance(&a.g, &b.g) + self.h().distance(&a.h, &b.h)
    }

    pub fn describe_cell(&self, f: &TwoCell) -> String {
        format!("({}, {})", self.g().describe(&f.g), self.h().describe(&f.h))
    }

    /// Verifies `(f₁·f₁′)∘(f₂·f₂′) = (f₁∘f₂)·(f₁′∘f₂′)` over composable quadruples.
    pub fn check_interchange(&self, mode: Mode) -> Result<ValidationReport> {
        let (g, h) = (self.g(), self.h());
        let quads: Vec<[TwoCell; 4]> = match mode {
            Mode::Exhaustive => {
                let (Some(ng), Some(nh)) = (g.order(), h.order()) else {
                    return Err(Error::Precondition(
                        "exhaustive interchange check requires finite G and H".into(),
                    ));
                };
                let size = (ng as u128).pow(2) * (nh as u128).pow(4);
                if size > 100_000_000 {
                    return Err(Error::Precondition(format!(
                        "{size} composable quadruples exceed 10^8"
                    )));
                }
                let gs = g.elements().unwrap();
                let hs = h.elements().unwrap();
                let mut out = Vec::new();
                for g1 in &gs {
                    for h1 in &hs {
                        let f1 = TwoCell::new(g1.clone(), h1.clone());
                        let g1t = self.target(&f1)?;
                        for h1p in &hs {
                            let f1p = TwoCell::new(g1t.clone(), h1p.clone());
                            for g2 in &gs {
                                for h2 in &hs {
                                    let f2 = TwoCell::new(g2.clone(), h2.clone());
                                    let g2t = self.target(&f2)?;
                                    for h2p in &hs {
                                        let f2p = TwoCell::new(g2t.clone(), h2p.clone());
                                        out.push([f1.clone(), f1p.clone(), f2.clone(), f2p]);
                                    }
                                }
                            }
                        }
                    }
                }
                out
            }
            Mode::Sampled { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut out = Vec::with_capacity(samples);
                for _ in 0..samples {
                    let f1 = TwoCell::new(
                        g.random_element(&mut rng, 1.5),
                        h.random_element(&mut rng, 1.5),
                    );
                    let f1p = TwoCell::new(self.target(&f1)?, h.random_element(&mut rng, 1.5));
                    let f2 = TwoCell::new(
                        g.random_element(&mut rng, 1.5),
                        h.random_element(&mut rng, 1.5),
                    );
                    let f2p = TwoCell::new(self.target(&f2)?, h.random_element(&mut rng, 1.5));
                    out.push([f1, f1p, f2, f2p]);
                }
                out
            }
        };
        let tol = if self.is_finite() {
            0.0
        } else {
            crate::TAU_GRP
        };
        let mut check = Check::new("interchange").with_tolerance(tol);
        for [f1, f1p, f2, f2p] in &quads {
            let lhs = self.horizontal(&self.vertical(f1, f1p)?, &self.vertical(f2, f2p)?)?;
            let rhs = self.vertical(&self.horizontal(f1, f2)?, &self.horizontal(f1p, f2p)?)?;
            check.record_residual(self.cell_distance(&lhs, &rhs), || {
                format!(
                    "f1={}, f1'={}, f2={}, f2'={}",
                    self.describe_cell(f1),
                    self.describe_cell(f1p),
                    self.describe_cell(f2),
                    self.describe_cell(f2p)
                )
            });
        }
        let mut report = ValidationReport::new(format!("interchange law on {}", self.name()));
        report.push(check);
        Ok(report)
    }

    /// With `G` trivial, compares the horizontal and vertical products on `H × H`
    /// and checks that `H` is abelian.
    pub fn eckmann_hilton_probe(&self) -> Result<ValidationReport> {
        if !self.g().is_trivial() {
            return Err(Error::Precondition(format!(
                "Eckmann-Hilton probe needs trivial G, got {}",
                self.g().name()
            )));
        }
        let h = self.h();
        let pairs: Vec<(Element, Element)> = match h.elements() {
            Some(hs) => hs
                .iter()
                .flat_map(|a| hs.iter().map(move |b| (a.clone(), b.clone())))
                .collect(),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                (0..1000)
                    .map(|_| {
                        (
                            h.random_element(&mut rng, 1.5),
                            h.random_element(&mut rng, 1.5),
                        )
                    })
                    .collect()
            }
        };
        let tol = if h.is_finite() { 0.0 } else { crate::TAU_GRP };
        let one = self.g().identity();
        let mut agree = Check::new("products agree").with_tolerance(tol);
        let mut abelian = Check::new("H abelian").with_tolerance(tol);
        for (a, b) in &pairs {
            let fa = TwoCell::new(one.clone(), a.clone());
            let fb = TwoCell::new(one.clone(), b.clone());
            let vert = self.vertical(&fa, &fb)?;
            let horiz = self.horizontal(&fa, &fb)?;
            agree.record_residual(self.cell_distance(&vert, &horiz), || {
                format!("h={}, h'={}", h.describe(a), h.describe(b))
            });
            let ab = h.mul(a, b)?;
            let ba = h.mul(b, a)?;
            abelian.record_residual(h.distance(&ab, &ba), || {
                format!("h={}, h'={}", h.describe(a), h.describe(b))
            });
        }
        let mut report = ValidationReport::new(format!("Eckmann-Hilton probe on {}", self.name()));
        report.push(agree);
        report.push(abelian);
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shipped::crossed_module;

    fn s3(label: &str) -> Element {
        Element::Index(
            crate::group::S3_LABELS
                .iter()
                .position(|l| *l == label)
                .unwrap(),
        )
    }

    #[test]
    fn identity_cell_endpoints() {
        let cm = crossed_module("IDENTITY(S3)").unwrap();
        let f = cm.identity_cell(s3("(123)"));
        assert_eq!(cm.endpoints(&f).unwrap(), (s3("(123)"), s3("(123)")));
    }

    #[test]
    fn abelian_cells_are_loops() {
        let cm = crossed_module("ABELIAN(Z5)").unwrap();
        let f = TwoCell::new(Element::Index(0), Element::Index(3));
        assert_eq!(
            cm.endpoints(&f).unwrap(),
            (Element::Index(0), Element::Index(0))
        );
    }

    #[test]
    fn vertical_unit_law_and_additive_case() {
        let cm = crossed_module("IDENTITY(S3)").unwrap();
        let f = TwoCell::new(s3("(12)"), s3("(13)"));
        let id = cm.identity_cell(cm.target(&f).unwrap());
        assert_eq!(cm.vertical(&f, &id).unwrap(), f);

        let ab = crossed_module("ABELIAN(Z5)").unwrap();
        let r = ab
            .vertical(
                &TwoCell::new(Element::Index(0), Element::Index(2)),
                &TwoCell::new(Element::Index(0), Element::Index(1)),
            )
            .unwrap();
        assert_eq!(r.h, Element::Index(3));
    }

    #[test]
    fn mismatched_vertical_composition_reports_both_endpoints() {
        let cm = crossed_module("IDENTITY(S3)").unwrap();
        let f = TwoCell::new(s3("(12)"), s3("(13)"));
        let bad = TwoCell::new(s3("e"), s3("e"));
        match cm.vertical(&f, &bad) {
            Err(Error::Composition {
                source_value,
                target_value,
            }) => {
                assert_eq!(source_value, "e");
                assert_ne!(target_value, "e");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn horizontal_units_and_semidirect_case() {
        let cm = crossed_module("Z2_ON_Z3").unwrap();
        let f = TwoCell::new(Element::Index(1), Element::Index(2));
        let unit = cm.identity_cell(Element::Index(0));
        assert_eq!(cm.horizontal(&unit, &f).unwrap(), f);
        let r = cm
            .horizontal(
                &TwoCell::new(Element::Index(1), Element::Index(1)),
                &TwoCell::new(Element::Index(0), Element::Index(2)),
            )
            .unwrap();
        // 1 + α(1)(2) = 1 + 1 = 2 in Z/3
        assert_eq!(r, TwoCell::new(Element::Index(1), Element::Index(2)));
    }

    #[test]
    fn inverses_compose_to_identities() {
        for id in ["IDENTITY(S3)", "AUT(S3)", "Z2_ON_Z3", "ABELIAN(Z5)"] {
            let cm = crossed_module(id).unwrap();
            for g in cm.g().elements().unwrap() {
                for h in cm.h().elements().unwrap() {
                    let f = TwoCell::new(g.clone(), h);
                    let vi = cm.vertical_inverse(&f).unwrap();
                    assert_eq!(cm.vertical(&f, &vi).unwrap(), cm.identity_cell(g.clone()));
                    let hi = cm.horizontal_inverse(&f).unwrap();
                    let unit = cm.identity_cell(cm.g().identity());
                    assert_eq!(cm.horizontal(&f, &hi).unwrap(), unit, "{id}");
                    assert_eq!(cm.horizontal(&hi, &f).unwrap(), unit, "{id}");
                }
            }
        }
    }

    #[test]
    fn eckmann_hilton_requires_trivial_g() {
        let cm = crossed_module("IDENTITY(S3)").unwrap();
        assert!(matches!(
            cm.eckmann_hilton_probe(),
            Err(Error::Precondition(_))
        ));
        let one = crossed_module("ABELIAN(Z1)").unwrap();
        assert!(one.eckmann_hilton_probe().unwrap().passed());
    }

    fn s3_mul(a: &str, b: &str) -> Element {
        let g = crate::group::FiniteGroup::symmetric3();
        let (a, b) = (g.find_label(a).unwrap(), g.find_label(b).unwrap());
        Element::Index(g.mul(a, b))
    }

    #[test]
    fn s3_endpoints_and_vertical_match_permutation_oracle() {
        let perms = crate::group::s3_permutations();
        let compose = |a: usize, b: usize| -> usize {
            let p: [usize; 3] = std::array::from_fn(|i| perms[a][perms[b][i]]);
            perms.iter().position(|q| *q == p).unwrap()
        };
        let cm = crossed_module("IDENTITY(S3)").unwrap();
        let f = TwoCell::new(s3("(12)"), s3("(13)"));
        let (a, b) = (s3("(13)").index().unwrap(), s3("(12)").index().unwrap());
        assert_eq!(cm.target(&f).unwrap(), Element::Index(compose(a, b)));
        let f2 = TwoCell::new(cm.target(&f).unwrap(), s3("(23)"));
        let r = cm.vertical(&f, &f2).unwrap();
        assert_eq!(r, TwoCell::new(s3("(12)"), s3_mul("(23)", "(13)")));
    }

    #[test]
    fn interchange_holds_on_shipped_finite_modules() {
        for id in crate::shipped::SHIPPED {
            let cm = crossed_module(id).unwrap();
            if !cm.is_finite() {
                continue;
            }
            let r = cm.check_interchange(Mode::Exhaustive).unwrap();
            assert!(r.passed(), "{id}: {r:?}");
        }
    }

    #[test]
    fn interchange_fails_without_peiffer() {
        let cm = crossed_module("TRIVIAL_ACTION(S3)").unwrap();
        let r = cm.check_interchange(Mode::Exhaustive).unwrap();
        assert!(!r.passed());
        assert!(r.checks[0].witness.is_some());
    }

    #[test]
    fn interchange_sampled_on_matrix_modules() {
        for id in ["IDENTITY(SU2)", "AUT(SU2)", "ABELIAN(U1)", "IDENTITY(SO3)"] {
            let cm = crossed_module(id).unwrap();
            let r = cm
                .check_interchange(Mode::Sampled {
                    samples: 200,
                    seed: 7,
                })
                .unwrap();
            assert!(r.passed(), "{id}: {r:?}");
        }
    }

    #[test]
    fn eckmann_hilton_on_abelian_and_s3() {
        let z6 = crossed_module("ABELIAN(Z6)").unwrap();
        assert!(z6.eckmann_hilton_probe().unwrap().passed());
        let s3 = crossed_module("TRIVIAL_ACTION(S3)").unwrap();
        let r = s3.eckmann_hilton_probe().unwrap();
        assert!(r.get("products agree").unwrap().failed());
        assert!(r.get("H abelian").unwrap().failed());
    }

    #[test]
    fn associativity_and_target_multiplicativity() {
        let cm = crossed_module("AUT(S3)").unwrap();
        let gs = cm.g().elements().unwrap();
        let hs = cm.h().elements().unwrap();
        let cells: Vec<TwoCell> = gs
            .iter()
            .flat_map(|g| hs.iter().map(move |h| TwoCell::new(g.clone(), h.clone())))
            .step_by(5)
            .collect();
        for a in &cells {
            for b in &cells {
                let ab = cm.horizontal(a, b).unwrap();
                let ta = cm.target(a).unwrap();
                let tb = cm.target(b).unwrap();
                assert_eq!(cm.target(&ab).unwrap(), cm.g().mul(&ta, &tb).unwrap());
                for c in &cells {
                    let l = cm.horizontal(&cm.horizontal(a, b).unwrap(), c).unwrap();
                    let r = cm.horizontal(a, &cm.horizontal(b, c).unwrap()).unwrap();
                    assert_eq!(l, r);
                }
                let b2 = TwoCell::new(ta.clone(), b.h.clone());
                let c2 = TwoCell::new(cm.target(&b2).unwrap(), a.h.clone());
                let l = cm.vertical(&cm.vertical(a, &b2).unwrap(), &c2).unwrap();
                let r = cm.vertical(a, &cm.vertical(&b2, &c2).unwrap()).unwrap();
                assert_eq!(l, r);
            }
        }
    }
}
