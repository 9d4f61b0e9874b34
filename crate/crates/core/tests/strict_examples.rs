mod common;

use common::*;
use promc::base::{ChainF2, ChainMap, Complex, FactorMode, FinSet, MapClass, ModelCategory, SetBij};
use promc::gf2::Matrix;
use promc::pro::{is_pro_iso, ProIsoVerdict, ProMap};
use promc::strict::*;
use promc::Error;

#[test]
fn matching_map_at_minimal_level_is_the_component() {
    let f = chain_special();
    let m = matching_map(&SetBij, &f, 0).unwrap();
    assert_eq!(&m.map, &f.level_components().unwrap()[0]);
}

#[test]
fn matching_map_on_chain_is_a_bijection_onto_the_pullback() {
    let f = chain_special();
    let m = matching_map(&SetBij, &f, 1).unwrap();
    assert_eq!(m.object.len(), 2);
    assert!(SetBij.is_iso(&m.map));
    let images: Vec<usize> = m.map.images().collect();
    assert_ne!(images[0], images[1]);
}

#[test]
fn matching_maps_of_identity_are_isomorphisms() {
    let f = chain_special();
    let id = ProMap::identity(&SetBij, f.source());
    for t in 0..2 {
        assert!(SetBij.is_iso(&matching_map(&SetBij, &id, t).unwrap().map));
    }
}

#[test]
fn identity_is_special_acyclic() {
    let f = chain_special();
    let id = ProMap::identity(&SetBij, f.target());
    assert!(detect_special(&SetBij, &id, MapClass::AcyclicFib).unwrap().is_special());
}

#[test]
fn chain_example_is_special_acyclic() {
    assert!(detect_special(&SetBij, &chain_special(), MapClass::AcyclicFib).unwrap().is_special());
}

fn zero_over_disk_map() -> ProMap<ChainF2> {
    let zero = Complex::zero();
    let x = promc::pro::ProObject::finite(
        &ChainF2,
        chain(2),
        vec![zero.clone(), d1()],
        vec![(1, 0, ChainMap::zero(d1(), zero.clone()))],
    )
    .unwrap();
    let y = promc::pro::ProObject::finite(
        &ChainF2,
        chain(2),
        vec![zero.clone(), s0()],
        vec![(1, 0, ChainMap::zero(s0(), zero.clone()))],
    )
    .unwrap();
    ProMap::level(&ChainF2, x, y, vec![ChainF2.identity(&zero), d1_to_s0()]).unwrap()
}

#[test]
fn disk_to_sphere_matching_map_is_special_fib_only() {
    let f = zero_over_disk_map();
    assert!(detect_special(&ChainF2, &f, MapClass::Fib).unwrap().is_special());
    let r = detect_special(&ChainF2, &f, MapClass::AcyclicFib).unwrap();
    assert_eq!(r.first_failure, Some(1));
}

#[test]
fn constant_factorization_is_the_base_factorization() {
    let g = fmap(&set(&["a", "b"]), &set(&["x"]), &[("a", "x"), ("b", "x")]);
    let f = constant_set_map(g.clone());
    for mode in [StrictMode::L1, StrictMode::L2] {
        let fac = factor_strict(&SetBij, &f, mode).unwrap();
        let base = SetBij.factor(&g, mode.base()).unwrap();
        assert_eq!(fac.left.level_components().unwrap(), &[base.left]);
        assert_eq!(fac.right.level_components().unwrap(), &[base.right]);
    }
}

#[test]
fn collapse_map_l1_has_bijective_matching_maps() {
    let (f, _) = collapse();
    let fac = factor_strict(&SetBij, &f, StrictMode::L1).unwrap();
    let r = detect_special(&SetBij, &fac.right, MapClass::AcyclicFib).unwrap();
    assert!(r.levels.iter().all(|(_, c)| c.we));
}

#[test]
fn zero_to_sphere_l1_middle_is_the_cylinder() {
    let g = ChainMap::zero(Complex::zero(), s0());
    let fac = factor_strict(&ChainF2, &constant_chain_map(g.clone()), StrictMode::L1).unwrap();
    let base = ChainF2.factor(&g, FactorMode::CofThenAcyclicFib).unwrap();
    assert_eq!(fac.middle.value(0), &base.middle);
    assert!(fac.special.levels.iter().all(|(_, c)| c.we && c.fib));
}

#[test]
fn lift_against_identity_is_top() {
    let f = chain_special();
    let x = f.source();
    let id = ProMap::identity(&SetBij, x);
    let sq = ProSquare { left: id.clone(), right: f.clone(), top: id.clone(), bottom: f.clone() };
    let l = lift_strict(&SetBij, &sq).unwrap();
    assert!(l.lift.equals(&SetBij, &id).unwrap());
    assert_eq!(l.reindex, vec![0, 1]);
}

#[test]
fn lift_of_inclusion_against_chain_special() {
    let p = chain_special();
    let (a, ab) = (set(&["a"]), set(&["a", "b"]));
    let i = constant_set_map(fmap(&a, &ab, &[("a", "a")]));
    let (x, y) = (p.source().clone(), p.target().clone());
    let top = ProMap::general(
        &SetBij,
        i.source().clone(),
        x.clone(),
        vec![(0, fmap(&a, x.value(0), &[("a", "x")])), (0, fmap(&a, x.value(1), &[("a", "a")]))],
    )
    .unwrap();
    let bottom = ProMap::general(
        &SetBij,
        i.target().clone(),
        y.clone(),
        vec![(0, fmap(&ab, y.value(0), &[("a", "y"), ("b", "y")])), (0, fmap(&ab, y.value(1), &[("a", "u"), ("b", "v")]))],
    )
    .unwrap();
    let sq = ProSquare { left: i.clone(), right: p.clone(), top: top.clone(), bottom: bottom.clone() };
    let h = lift_strict(&SetBij, &sq).unwrap().lift;
    assert!(ProMap::compose(&SetBij, &h, &i).unwrap().equals(&SetBij, &top).unwrap());
    assert!(ProMap::compose(&SetBij, &p, &h).unwrap().equals(&SetBij, &bottom).unwrap());
}

#[test]
fn disk_lift_is_the_identity() {
    let i = constant_chain_map(ChainMap::zero(Complex::zero(), d1()));
    let p = constant_chain_map(d1_to_s0());
    let top = ProMap::level(&ChainF2, i.source().clone(), p.source().clone(), vec![ChainMap::zero(Complex::zero(), d1())]).unwrap();
    let sq = ProSquare { left: i, right: p.clone(), top, bottom: p };
    let h = lift_strict(&ChainF2, &sq).unwrap().lift;
    assert_eq!(h.component(0).1, ChainF2.identity(&d1()));
}


#[test]
fn non_commuting_square_is_rejected() {
    let f = chain_special();
    let x = f.source();
    let id = ProMap::identity(&SetBij, x);
    let (ab, uv) = (set(&["a", "b"]), set(&["u", "v"]));
    let twisted = ProMap::level(
        &SetBij,
        x.clone(),
        f.target().clone(),
        vec![f.level_components().unwrap()[0].clone(), fmap(&ab, &uv, &[("a", "v"), ("b", "u")])],
    )
    .unwrap();
    let sq = ProSquare { left: id.clone(), right: f.clone(), top: id, bottom: twisted };
    match lift_strict(&SetBij, &sq) {
        Err(Error::NonCommuting(msg)) => assert!(msg.contains('1')),
        other => panic!("expected a non-commuting rejection, got {other:?}"),
    }
}

#[test]
fn pro_factor_iso_of_identity() {
    let f = chain_special();
    let id = ProMap::identity(&SetBij, f.source());
    let x = f.source();
    let mut w = Witnesses::new();
    w.insert((1, 0), x.map(&SetBij, 1, 0).unwrap());
    let fac = pro_factor_iso(&SetBij, &id, &w, FactorMode::CofThenAcyclicFib).unwrap();
    assert!(fac.left_iso.verify(&SetBij).unwrap());
    assert!(fac.right_iso.verify(&SetBij).unwrap());
}

#[test]
fn worked_collapse_is_rejected_as_not_invertible_at_the_top() {
    let (f, w) = collapse();
    assert!(matches!(is_pro_iso(&SetBij, &f).unwrap(), ProIsoVerdict::NotIso(_)));
    match pro_factor_iso(&SetBij, &f, &w, FactorMode::CofThenAcyclicFib) {
        Err(Error::Precondition(msg)) => assert!(msg.contains("maximum")),
        other => panic!("expected a precondition error, got {other:?}"),
    }
}

#[test]
fn missing_witness_is_named() {
    let (f, _) = chain_pro_iso();
    match pro_factor_iso(&SetBij, &f, &Witnesses::new(), FactorMode::CofThenAcyclicFib) {
        Err(Error::MissingWitness { t, s }) => assert_eq!((t.as_str(), s.as_str()), ("1", "0")),
        other => panic!("expected a missing witness, got {other:?}"),
    }
}

#[test]
fn chain_pro_iso_factors_into_certified_pro_isos() {
    let (f, w) = chain_pro_iso();
    let fac = pro_factor_iso(&SetBij, &f, &w, FactorMode::CofThenAcyclicFib).unwrap();
    assert!(fac.left_iso.verify(&SetBij).unwrap() && fac.right_iso.verify(&SetBij).unwrap());
    assert!(ProMap::compose(&SetBij, &fac.right, &fac.left).unwrap().equals(&SetBij, &f).unwrap());
}

#[test]
fn three_chain_with_composite_witnesses_is_posetal() {
    let (a, b, c) = (set(&["a"]), set(&["b", "c"]), set(&["d", "e"]));
    let (p, q, r) = (set(&["p"]), set(&["q", "r"]), set(&["s", "t"]));
    let bond_x1 = fmap(&b, &a, &[("b", "a"), ("c", "a")]);
    let bond_x2 = fmap(&c, &b, &[("d", "b"), ("e", "b")]);
    let bond_y1 = fmap(&q, &p, &[("q", "p"), ("r", "p")]);
    let bond_y2 = fmap(&r, &q, &[("s", "q"), ("t", "q")]);
    let x = set_tower(vec![a.clone(), b.clone(), c.clone()], vec![bond_x1, bond_x2]);
    let y = set_tower(vec![p.clone(), q.clone(), r.clone()], vec![bond_y1, bond_y2]);
    let f = ProMap::level(
        &SetBij,
        x.clone(),
        y,
        vec![fmap(&a, &p, &[("a", "p")]), fmap(&b, &q, &[("b", "q"), ("c", "r")]), fmap(&c, &r, &[("d", "s"), ("e", "t")])],
    )
    .unwrap();
    let mut w = Witnesses::new();
    let h21 = fmap(&r, &b, &[("s", "b"), ("t", "b")]);
    let h10 = fmap(&q, &a, &[("q", "a"), ("r", "a")]);
    w.insert((2, 1), h21.clone());
    w.insert((1, 0), h10);
    w.insert((2, 0), SetBij.compose(&x.map(&SetBij, 1, 0).unwrap(), &h21).unwrap());
    let fac = pro_factor_iso(&SetBij, &f, &w, FactorMode::CofThenAcyclicFib).unwrap();
    assert_eq!(fac.chain_maps, 1);
    for (t, s) in [(1, 0), (2, 1), (2, 0)] {
        fac.middle.map(&SetBij, t, s).unwrap();
    }
}

#[test]
fn zigzag_of_identities_is_identity() {
    let f = chain_special();
    let y = f.target();
    let id = ProMap::identity(&SetBij, y);
    let mut w = Witnesses::new();
    w.insert((1, 0), y.map(&SetBij, 1, 0).unwrap());
    let z = compose_zigzag_we(&SetBij, &id, &id, &id, &w).unwrap();
    let back = ProMap::compose_all(&SetBij, &[&z.source_iso.backward, &z.map, &z.target_iso.backward]).unwrap();
    assert!(back.equals(&SetBij, &id).unwrap());
}

#[test]
fn zigzag_around_pro_iso_composes_to_inverse() {
    let (h, w) = chain_pro_iso();
    let f = ProMap::identity(&SetBij, h.target());
    let g = ProMap::identity(&SetBij, h.source());
    let z = compose_zigzag_we(&SetBij, &f, &h, &g, &w).unwrap();
    let h_inv = match is_pro_iso(&SetBij, &h).unwrap() {
        ProIsoVerdict::Iso(c) => c.backward,
        ProIsoVerdict::NotIso(why) => panic!("{why}"),
    };
    let lhs = ProMap::compose_all(&SetBij, &[&z.source_iso.forward, &f, &h_inv, &g, &z.target_iso.forward]).unwrap();
    assert!(lhs.equals(&SetBij, &z.map).unwrap());
}

#[test]
fn zigzag_of_constant_quasi_isos() {
    let q = ChainMap::new(d1(), Complex::zero(), |n| Matrix::zeros(0, d1().dim(n))).unwrap();
    let f = constant_chain_map(q.clone());
    let h = ProMap::identity(&ChainF2, f.target());
    let z = compose_zigzag_we(&ChainF2, &f, &h, &h, &Witnesses::new()).unwrap();
    assert!(z.map.level_components().unwrap().iter().all(|c| ChainF2.classify(c).unwrap().we));
}

#[test]
fn two_of_three_left_on_pro_iso() {
    let (k, w) = chain_pro_iso();
    let (wo, z) = (k.source().clone(), k.target().clone());
    let sq = ProSquare {
        top: k.clone(),
        left: ProMap::identity(&SetBij, &wo),
        right: ProMap::identity(&SetBij, &z),
        bottom: k.clone(),
    };
    let c = two_of_three(&SetBij, &sq, &w, CancelSide::Left).unwrap();
    assert!(c.map.level_components().unwrap().iter().all(|m| SetBij.classify(m).unwrap().we));
    assert!(c.iso.verify(&SetBij).unwrap());
}

#[test]
fn two_of_three_right_on_pro_iso() {
    let (k, w) = chain_pro_iso();
    let (x, wo) = (k.source().clone(), k.target().clone());
    let sq = ProSquare {
        top: k.clone(),
        left: ProMap::identity(&SetBij, &x),
        right: ProMap::identity(&SetBij, &wo),
        bottom: k.clone(),
    };
    let c = two_of_three(&SetBij, &sq, &w, CancelSide::Right).unwrap();
    assert!(c.map.level_components().unwrap().iter().all(|m| SetBij.classify(m).unwrap().we));
}

#[test]
fn two_of_three_constant_chain_left() {
    let q = ChainMap::new(d1(), Complex::zero(), |n| Matrix::zeros(0, d1().dim(n))).unwrap();
    let a = constant_chain_map(q.clone());
    let zero = a.target().clone();
    let id0 = ProMap::identity(&ChainF2, &zero);
    let sq = ProSquare { top: a.clone(), left: a, right: id0.clone(), bottom: id0 };
    let c = two_of_three(&ChainF2, &sq, &Witnesses::new(), CancelSide::Left).unwrap();
    assert!(ChainF2.classify(&c.map.component(0).1).unwrap().we);
}

#[test]
fn retract_of_levelwise_acyclic_cof_and_bijection() {
    let g = fmap(&set(&["a", "b"]), &set(&["u", "v"]), &[("a", "v"), ("b", "u")]);
    let f = constant_set_map(g);
    for kind in [RetractKind::AcyclicCof, RetractKind::AcyclicFib] {
        let r = retract_exhibit(&SetBij, &f, &f, kind).unwrap();
        assert!(r.verify(&SetBij).unwrap());
    }
}

#[test]
fn retract_of_chain_acyclic_cof() {
    let g = ChainMap::zero(Complex::zero(), d1());
    let fac = ChainF2.factor(&g, FactorMode::AcyclicCofThenFib).unwrap();
    let f = constant_chain_map(fac.left);
    let r = retract_exhibit(&ChainF2, &f, &f, RetractKind::AcyclicCof).unwrap();
    assert!(r.verify(&ChainF2).unwrap());
}

#[test]
fn proper_pullback_along_identity() {
    let f = chain_special();
    let y = f.target();
    let p = ProMap::identity(&SetBij, y);
    let g = ProMap::identity(&SetBij, y);
    let mut w = Witnesses::new();
    w.insert((1, 0), y.map(&SetBij, 1, 0).unwrap());
    let r = proper_pullback(&SetBij, &p, &f, &g, &w).unwrap();
    assert!(r.glue.verify(&SetBij).unwrap());
    assert!(r.map.level_components().unwrap().iter().all(|m| SetBij.classify(m).unwrap().we));
}

#[test]
fn proper_pullback_along_pro_iso_glue() {
    let (g, w) = chain_pro_iso();
    let wo = g.source().clone();
    let f = ProMap::identity(&SetBij, &wo);
    let y = g.target().clone();
    let doubled: Vec<FinSet> = (0..2).map(|s| FinSet::range(2 * y.value(s).len())).collect();
    let proj = |s: usize| promc::base::FinMap::new(doubled[s].clone(), y.value(s).clone(), (0..doubled[s].len()).map(|k| k / 2).collect()).unwrap();
    let bond = promc::base::FinMap::new(
        doubled[1].clone(),
        doubled[0].clone(),
        (0..doubled[1].len()).map(|k| 2 * y.map(&SetBij, 1, 0).unwrap().image(k / 2) + k % 2).collect(),
    )
    .unwrap();
    let xo = set_tower(doubled.clone(), vec![bond]);
    let comps = vec![proj(0), proj(1)];
    let p = ProMap::level(&SetBij, xo, y.clone(), comps).unwrap();
    let r = proper_pullback(&SetBij, &p, &f, &g, &w).unwrap();
    assert!(r.glue.verify(&SetBij).unwrap());
    assert!(r.map.level_components().unwrap().iter().all(|m| SetBij.classify(m).unwrap().we));
}

#[test]
fn proper_pullback_chain_constant() {
    let p = constant_chain_map(d1_to_s0());
    let f = ProMap::identity(&ChainF2, p.target());
    let g = ProMap::identity(&ChainF2, p.target());
    let r = proper_pullback(&ChainF2, &p, &f, &g, &Witnesses::new()).unwrap();
    assert!(ChainF2.classify(&r.map.component(0).1).unwrap().we);
}
