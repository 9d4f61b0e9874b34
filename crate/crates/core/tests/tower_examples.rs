mod common;

use common::*;
use promc::base::{ChainF2, FinSet, MapClass, ModelCategory, SetBij};
use promc::pro::{ProMap, ProObject};
use promc::towers::*;

#[test]
fn one_level_tower_has_a_single_stage() {
    let g = fmap(&set(&["a", "b"]), &set(&["u", "v"]), &[("a", "v"), ("b", "u")]);
    let f = constant_set_map(g);
    let t = build_cocell_tower(&SetBij, &f, MapClass::AcyclicFib).unwrap();
    assert_eq!(t.stages.len(), 2);
    let l = tower_limit(&SetBij, &t).unwrap();
    assert!(l.iso.unwrap().verify(&SetBij).unwrap());
}

#[test]
fn chain_example_has_two_certified_stages() {
    let f = chain_special();
    let t = build_cocell_tower(&SetBij, &f, MapClass::AcyclicFib).unwrap();
    assert_eq!(t.attaching.len(), 2);
    assert!(t.attaching.iter().all(|a| SetBij.classify(&a.map).unwrap().we));
    let replay = grow(&SetBij, &t.base, &t.attaching).unwrap();
    for (a, b) in replay.stages.iter().zip(&t.stages) {
        assert_eq!(a.object, b.object);
    }
    let l = tower_limit(&SetBij, &t).unwrap();
    let iso = l.iso.unwrap();
    assert!(iso.verify(&SetBij).unwrap());
    assert!(ProMap::compose(&SetBij, &l.projection, &iso.forward).unwrap().equals(&SetBij, &f).unwrap());
}

#[test]
fn constant_chain_map_reproduces_the_base_map() {
    let f = constant_chain_map(d1_to_s0());
    let t = build_cocell_tower(&ChainF2, &f, MapClass::Fib).unwrap();
    assert_eq!(t.attaching.len(), 1);
    assert_eq!(t.attaching[0].map, d1_to_s0());
    assert!(tower_limit(&ChainF2, &t).unwrap().iso.unwrap().verify(&ChainF2).unwrap());
}

#[test]
fn non_special_map_has_no_tower() {
    let f = constant_chain_map(d1_to_s0());
    assert!(build_cocell_tower(&ChainF2, &f, MapClass::AcyclicFib).is_err());
}

#[test]
fn empty_tower_limit_is_the_base() {
    let y = chain_special().target().clone();
    let t = grow(&SetBij, &y, &[]).unwrap();
    let l = tower_limit(&SetBij, &t).unwrap();
    assert_eq!(l.object, y);
    assert!(l.projection.equals(&SetBij, &ProMap::identity(&SetBij, &y)).unwrap());
}

#[test]
fn falsified_attaching_class_is_rejected() {
    let f = chain_special();
    let mut t = build_cocell_tower(&SetBij, &f, MapClass::AcyclicFib).unwrap();
    let collapse = fmap(&set(&["a", "b"]), &set(&["u"]), &[("a", "u"), ("b", "u")]);
    t.attaching[0].map = collapse;
    assert!(grow(&SetBij, &t.base, &t.attaching).is_err());
}

#[test]
fn omega_tower_of_constants_is_the_identity_tower() {
    let two = FinSet::range(2);
    let id = SetBij.identity(&two);
    let lim = omega_constant_limit(&SetBij, vec![two.clone(), two.clone()], vec![id]).unwrap();
    for n in 0..16 {
        assert_eq!(lim.value(n), &two);
        assert_eq!(lim.map(&SetBij, n + 1, n).unwrap(), SetBij.identity(&two));
    }
}

#[test]
fn adjunction_for_empty_set() {
    let y = chain_special().target().clone();
    let r = adjunction_check(&SetBij, &FinSet::empty(), &y, 16, 1 << 12).unwrap();
    assert_eq!((r.pro_side, r.base_side), (1, 1));
    assert!(r.holds());
}

#[test]
fn adjunction_for_point_over_chain() {
    let (ab, x) = (set(&["a", "b"]), set(&["x"]));
    let y = set_tower(vec![x.clone(), ab.clone()], vec![fmap(&ab, &x, &[("a", "x"), ("b", "x")])]);
    let r = adjunction_check(&SetBij, &set(&["*"]), &y, 16, 1 << 12).unwrap();
    assert_eq!((r.pro_side, r.base_side), (2, 2));
    assert!(r.holds());
}

#[test]
fn adjunction_for_point_over_identity_tower() {
    let y = ProObject::omega(&SetBij, vec![set(&["0", "1"])], vec![]).unwrap();
    let r = adjunction_check(&SetBij, &set(&["*"]), &y, 16, 1 << 12).unwrap();
    assert_eq!((r.pro_side, r.base_side), (2, 2));
    assert_eq!(r.stable_depth, Some(1));
    assert!(r.holds());
}

#[test]
fn adjunction_for_chain_complexes() {
    let y = constant_complex(d1());
    let r = adjunction_check(&ChainF2, &s0(), &y, 16, 1 << 12).unwrap();
    assert!(r.holds());
}
