#![allow(dead_code)]

pub mod oracle;

use std::collections::BTreeMap;
use std::sync::Arc;

use promc::base::{ChainF2, ChainMap, Complex, FinMap, FinSet, ModelCategory, SetBij};
use promc::gf2::Matrix;
use promc::index::FinitePoset;
use promc::pro::{ProMap, ProObject};

pub fn set(names: &[&str]) -> FinSet {
    FinSet::new(names.iter().copied()).unwrap()
}

pub fn fmap(s: &FinSet, t: &FinSet, pairs: &[(&str, &str)]) -> FinMap {
    FinMap::from_pairs(s, t, pairs.iter().copied()).unwrap()
}

pub fn chain(n: usize) -> Arc<FinitePoset> {
    Arc::new(FinitePoset::chain(n))
}

/// A tower `X_0 <- X_1 <- ...` over a chain, bonds listed bottom-up.
pub fn set_tower(values: Vec<FinSet>, bonds: Vec<FinMap>) -> ProObject<SetBij> {
    let n = values.len();
    let structure = bonds.into_iter().enumerate().map(|(k, b)| (k + 1, k, b)).collect();
    ProObject::finite(&SetBij, chain(n), values, structure).unwrap()
}

pub fn constant_set(x: FinSet) -> ProObject<SetBij> {
    ProObject::constant(&SetBij, x).unwrap()
}

pub fn s0() -> Complex {
    Complex::concentrated(0, 1)
}

pub fn d1() -> Complex {
    Complex::disk(1)
}

pub fn d1_to_s0() -> ChainMap {
    ChainMap::new(d1(), s0(), |n| if n == 0 { Matrix::identity(1) } else { Matrix::zeros(0, 1) }).unwrap()
}

pub fn constant_complex(x: Complex) -> ProObject<ChainF2> {
    ProObject::constant(&ChainF2, x).unwrap()
}

pub fn constant_chain_map(f: ChainMap) -> ProMap<ChainF2> {
    let x = constant_complex(ChainF2.source(&f).clone());
    let y = constant_complex(ChainF2.target(&f).clone());
    ProMap::level(&ChainF2, x, y, vec![f]).unwrap()
}

pub fn constant_set_map(f: FinMap) -> ProMap<SetBij> {
    let x = constant_set(SetBij.source(&f).clone());
    let y = constant_set(SetBij.target(&f).clone());
    ProMap::level(&SetBij, x, y, vec![f]).unwrap()
}

/// `X_1 = {a,b} -> X_0 = {x}` over `Y_1 = {u,v} -> Y_0 = {y}`, with
/// `f_1 = (a -> u, b -> v)`.
pub fn chain_special() -> ProMap<SetBij> {
    let (ab, x, uv, y) = (set(&["a", "b"]), set(&["x"]), set(&["u", "v"]), set(&["y"]));
    let xo = set_tower(vec![x.clone(), ab.clone()], vec![fmap(&ab, &x, &[("a", "x"), ("b", "x")])]);
    let yo = set_tower(vec![y.clone(), uv.clone()], vec![fmap(&uv, &y, &[("u", "y"), ("v", "y")])]);
    ProMap::level(&SetBij, xo, yo, vec![fmap(&x, &y, &[("x", "y")]), fmap(&ab, &uv, &[("a", "u"), ("b", "v")])]).unwrap()
}

/// The collapse map `{a,b} -> {u}` over `{x} -> {y}` on the chain `0 < 1`,
/// with its witness `h(1,0): u -> x`.
pub fn collapse() -> (ProMap<SetBij>, BTreeMap<(usize, usize), FinMap>) {
    let (ab, x, u, y) = (set(&["a", "b"]), set(&["x"]), set(&["u"]), set(&["y"]));
    let xo = set_tower(vec![x.clone(), ab.clone()], vec![fmap(&ab, &x, &[("a", "x"), ("b", "x")])]);
    let yo = set_tower(vec![y.clone(), u.clone()], vec![fmap(&u, &y, &[("u", "y")])]);
    let f = ProMap::level(&SetBij, xo, yo, vec![fmap(&x, &y, &[("x", "y")]), fmap(&ab, &u, &[("a", "u"), ("b", "u")])]).unwrap();
    let mut w = BTreeMap::new();
    w.insert((1, 0), fmap(&u, &x, &[("u", "x")]));
    (f, w)
}

/// A pro-isomorphism on the chain `0 < 1` that is not levelwise:
/// `{a,b} -> {x}` over `{u,v} -> {y,z}`, bijective at the top, `f_0 = x -> y`,
/// witness `h(1,0)` sending `u, v` to `x`.
pub fn chain_pro_iso() -> (ProMap<SetBij>, BTreeMap<(usize, usize), FinMap>) {
    let (ab, x, uv, yz) = (set(&["a", "b"]), set(&["x"]), set(&["u", "v"]), set(&["y", "z"]));
    let xo = set_tower(vec![x.clone(), ab.clone()], vec![fmap(&ab, &x, &[("a", "x"), ("b", "x")])]);
    let yo = set_tower(vec![yz.clone(), uv.clone()], vec![fmap(&uv, &yz, &[("u", "y"), ("v", "y")])]);
    let f = ProMap::level(&SetBij, xo, yo, vec![fmap(&x, &yz, &[("x", "y")]), fmap(&ab, &uv, &[("a", "u"), ("b", "v")])]).unwrap();
    let mut w = BTreeMap::new();
    w.insert((1, 0), fmap(&uv, &x, &[("u", "x"), ("v", "x")]));
    (f, w)
}
