//! Seeded random generators for base objects, pro-objects, level maps and the
//! composite inputs of the strict constructions.
//!
//! Every generator draws from a [`ChaCha8Rng`]; a trial is reproduced by its
//! `(seed, trial)` pair alone.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::base::{ChainF2, ChainMap, Complex, Diagram, FinMap, FinSet, ModelCategory, SetBij};
use crate::error::{Error, Result};
use crate::gf2::{Matrix, Quotient};
use crate::index::FinitePoset;
use crate::pro::{pro_limit_levelwise, ProDiagram, ProMap, ProObject};
use crate::strict::{factor_strict, partial_matching, ProSquare, StrictMode, Witnesses};

pub type Gen = ChaCha8Rng;

/// The generator for one trial: stream `trial` of the ChaCha8 key `seed`.
pub fn rng(seed: u64, trial: u64) -> Gen {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(trial);
    r
}

/// Classes a generated map into a fixed target can be asked to lie in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntoClass {
    Any,
    Fib,
    AcyclicFib,
}

/// Random generation inside a base category.
pub trait Generate: ModelCategory {
    fn random_object(&self, rng: &mut Gen) -> Self::Obj;

    /// A random map `x -> y`, or `None` when the hom-set is empty.
    fn random_hom(&self, rng: &mut Gen, x: &Self::Obj, y: &Self::Obj) -> Option<Self::Map>;

    /// A random map with the given target, from a source chosen to fit the class.
    fn random_into(&self, rng: &mut Gen, target: &Self::Obj, class: IntoClass) -> Self::Map;

    /// A random isomorphism onto `target`.
    fn random_iso_into(&self, rng: &mut Gen, target: &Self::Obj) -> Self::Map;

    /// A weak equivalence `i: x -> x'` with a retraction `r`, `r ∘ i = id`.
    fn random_retract(&self, rng: &mut Gen, x: &Self::Obj) -> (Self::Map, Self::Map);
}

fn set_size(rng: &mut Gen) -> usize {
    if rng.gen_bool(0.1) {
        0
    } else {
        rng.gen_range(1..=4)
    }
}

fn permutation(rng: &mut Gen, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

impl Generate for SetBij {
    fn random_object(&self, rng: &mut Gen) -> FinSet {
        FinSet::range(set_size(rng))
    }

    fn random_hom(&self, rng: &mut Gen, x: &FinSet, y: &FinSet) -> Option<FinMap> {
        if y.is_empty() && !x.is_empty() {
            return None;
        }
        let images = (0..x.len()).map(|_| rng.gen_range(0..y.len())).collect();
        FinMap::new(x.clone(), y.clone(), images).ok()
    }

    fn random_into(&self, rng: &mut Gen, target: &FinSet, class: IntoClass) -> FinMap {
        match class {
            IntoClass::Any | IntoClass::Fib => {
                let x = if target.is_empty() { FinSet::empty() } else { self.random_object(rng) };
                self.random_hom(rng, &x, target).expect("nonempty target")
            }
            IntoClass::AcyclicFib => self.random_iso_into(rng, target),
        }
    }

    fn random_iso_into(&self, rng: &mut Gen, target: &FinSet) -> FinMap {
        let n = target.len();
        FinMap::new(FinSet::range(n), target.clone(), permutation(rng, n)).expect("a permutation")
    }

    fn random_retract(&self, rng: &mut Gen, x: &FinSet) -> (FinMap, FinMap) {
        let n = x.len();
        let i = FinMap::new(x.clone(), FinSet::range(n), permutation(rng, n)).expect("a permutation");
        let r = self.inverse(&i).expect("bijections invert");
        (i, r)
    }
}

fn random_matrix(rng: &mut Gen, rows: usize, cols: usize) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            if rng.gen_bool(0.5) {
                m.set(r, c, true);
            }
        }
    }
    m
}

fn random_invertible(rng: &mut Gen, n: usize) -> Matrix {
    loop {
        let m = random_matrix(rng, n, n);
        if m.is_invertible() {
            return m;
        }
    }
}

/// A sum of up to two disks inside degrees `[0, 2]`.
fn random_contractible(rng: &mut Gen) -> Complex {
    (0..rng.gen_range(0..=2)).fold(Complex::zero(), |k, _| k.direct_sum(&Complex::disk(rng.gen_range(1..=2))))
}

fn inclusion(first: usize, second: usize) -> Matrix {
    Matrix::identity(first).vcat(&Matrix::zeros(second, first))
}

fn projection(first: usize, second: usize) -> Matrix {
    Matrix::identity(first).hcat(&Matrix::zeros(first, second))
}

impl Generate for ChainF2 {
    /// A complex in degrees `[0, 2]` with every dimension at most 3.
    fn random_object(&self, rng: &mut Gen) -> Complex {
        let dims: Vec<usize> = (0..3).map(|_| rng.gen_range(0..=3)).collect();
        let d0 = random_matrix(rng, dims[1], dims[0]);
        let q = Quotient::new(&d0);
        let d1 = random_matrix(rng, dims[2], q.dim()).mul(&q.projection);
        Complex::new(0, dims, vec![d0, d1]).expect("d1 kills the image of d0")
    }

    fn random_hom(&self, rng: &mut Gen, x: &Complex, y: &Complex) -> Option<ChainMap> {
        let mut f = ChainMap::zero(x.clone(), y.clone());
        for b in self.hom_basis(x, y) {
            if rng.gen_bool(0.5) {
                f = self.add(&f, &b).expect("parallel chain maps");
            }
        }
        Some(f)
    }

    fn random_into(&self, rng: &mut Gen, target: &Complex, class: IntoClass) -> ChainMap {
        let extra = match class {
            IntoClass::Any => {
                let x = self.random_object(rng);
                return self.random_hom(rng, &x, target).expect("zero map exists");
            }
            IntoClass::Fib => self.random_object(rng),
            IntoClass::AcyclicFib => random_contractible(rng),
        };
        let phi = self.random_hom(rng, &extra, target).expect("zero map exists");
        let x = target.direct_sum(&extra);
        ChainMap::new(x, target.clone(), |n| Matrix::identity(target.dim(n)).hcat(&phi.at(n))).expect("[1, phi] is a chain map")
    }

    fn random_iso_into(&self, rng: &mut Gen, target: &Complex) -> ChainMap {
        let Some((lo, hi)) = target.range() else { return self.identity(target) };
        let p: BTreeMap<i32, Matrix> = (lo..=hi + 1).map(|n| (n, random_invertible(rng, target.dim(n)))).collect();
        let dims = (lo..=hi).map(|n| target.dim(n)).collect();
        let diffs = (lo..hi)
            .map(|n| p[&(n + 1)].inverse().expect("invertible").mul(&target.diff(n)).mul(&p[&n]))
            .collect();
        let x = Complex::new(lo, dims, diffs).expect("conjugate of a complex");
        ChainMap::new(x, target.clone(), |n| p.get(&n).cloned().unwrap_or_else(|| Matrix::identity(0))).expect("conjugation is a chain map")
    }

    fn random_retract(&self, rng: &mut Gen, x: &Complex) -> (ChainMap, ChainMap) {
        let k = random_contractible(rng);
        let y = x.direct_sum(&k);
        let i = ChainMap::new(x.clone(), y.clone(), |n| inclusion(x.dim(n), k.dim(n))).expect("inclusion of a summand");
        let r = ChainMap::new(y, x.clone(), |n| projection(x.dim(n), k.dim(n))).expect("projection onto a summand");
        (i, r)
    }
}

/// A directed poset on `0..n` (`n <= max_len`) whose maximum is `n - 1`.
pub fn random_poset(rng: &mut Gen, max_len: usize) -> Arc<FinitePoset> {
    let n = rng.gen_range(1..=max_len.max(1));
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut pairs = Vec::new();
    for j in 0..n.saturating_sub(1) {
        for i in 0..j {
            if rng.gen_bool(0.35) {
                pairs.push((names[i].clone(), names[j].clone()));
            }
        }
        pairs.push((names[j].clone(), names[n - 1].clone()));
    }
    Arc::new(FinitePoset::from_covers(&names, &pairs).expect("a top element makes it directed"))
}

/// A random pro-object over `poset`, built upward by maps into the limit of
/// the levels below.
pub fn random_pro_object<C: Generate>(cat: &C, rng: &mut Gen, poset: &Arc<FinitePoset>) -> Result<ProObject<C>> {
    let n = poset.len();
    let mut values: Vec<Option<C::Obj>> = vec![None; n];
    let mut maps: BTreeMap<(usize, usize), C::Map> = BTreeMap::new();
    for &s in poset.linear_extension().order() {
        let preds = poset.predecessors(s);
        if preds.is_empty() {
            values[s] = Some(cat.random_object(rng));
            continue;
        }
        let mut d = Diagram::new();
        for &t in &preds {
            d.add_object(values[t].clone().ok_or_else(|| Error::internal("level out of order"))?);
        }
        for (k, &t) in preds.iter().enumerate() {
            for (k2, &t2) in preds.iter().enumerate() {
                if poset.lt(t2, t) {
                    d.add_arrow(k, k2, maps[&(t, t2)].clone());
                }
            }
        }
        let lim = cat.limit(&d)?;
        let m = cat.random_into(rng, &lim.apex, IntoClass::Any);
        for (k, &t) in preds.iter().enumerate() {
            maps.insert((s, t), cat.compose(&lim.legs[k], &m)?);
        }
        values[s] = Some(cat.source(&m).clone());
    }
    let values = values.into_iter().map(|v| v.ok_or_else(|| Error::internal("level skipped"))).collect::<Result<_>>()?;
    ProObject::finite(cat, poset.clone(), values, maps.into_iter().map(|((t, s), m)| (t, s, m)).collect())
}

/// A random level map into `y` whose relative matching maps lie in `class`.
/// The source is built level by level from maps into the partial matching
/// objects, so `Fib` and `AcyclicFib` give special presentations.
pub fn random_level_map<C: Generate>(cat: &C, rng: &mut Gen, y: &ProObject<C>, class: IntoClass) -> Result<ProMap<C>> {
    let poset = y.poset()?.clone();
    let n = poset.len();
    let mut values: Vec<Option<C::Obj>> = vec![None; n];
    let mut comps: Vec<Option<C::Map>> = vec![None; n];
    let mut maps: BTreeMap<(usize, usize), C::Map> = BTreeMap::new();
    for &s in poset.linear_extension().order() {
        let pm = partial_matching(
            cat,
            y,
            s,
            &|t| values[t].clone().expect("earlier level"),
            &|a, b| maps.get(&(a, b)).cloned().ok_or_else(|| Error::internal("structure map out of order")),
            &|t| comps[t].clone().expect("earlier level"),
        )?;
        let m = cat.random_into(rng, &pm.object, class);
        for (k, &t) in pm.preds.iter().enumerate() {
            maps.insert((s, t), cat.compose(&pm.to_source[k], &m)?);
        }
        comps[s] = Some(cat.compose(&pm.to_target, &m)?);
        values[s] = Some(cat.source(&m).clone());
    }
    let values = values.into_iter().map(|v| v.ok_or_else(|| Error::internal("level skipped"))).collect::<Result<_>>()?;
    let comps = comps.into_iter().map(|c| c.ok_or_else(|| Error::internal("level skipped"))).collect::<Result<_>>()?;
    let x = ProObject::finite(cat, poset, values, maps.into_iter().map(|((t, s), m)| (t, s, m)).collect())?;
    ProMap::level(cat, x, y.clone(), comps)
}

/// A random level map between random pro-objects over a random poset.
pub fn random_map<C: Generate>(cat: &C, rng: &mut Gen, max_len: usize) -> Result<ProMap<C>> {
    let poset = random_poset(rng, max_len);
    let y = random_pro_object(cat, rng, &poset)?;
    random_level_map(cat, rng, &y, IntoClass::Any)
}

/// A random eventually constant ω-tower stable from level `max_stable` on
/// at the latest.
pub fn random_omega<C: Generate>(cat: &C, rng: &mut Gen, max_stable: usize) -> Result<ProObject<C>> {
    let k = rng.gen_range(0..=max_stable);
    let mut values = vec![cat.random_object(rng)];
    let mut bonds = Vec::with_capacity(k);
    for n in 0..k {
        let b = cat.random_into(rng, &values[n], IntoClass::Any);
        values.push(cat.source(&b).clone());
        bonds.push(b);
    }
    ProObject::omega(cat, values, bonds)
}

/// A level weak equivalence `i: X -> X'` with a natural retraction `r`.
pub fn random_retract_pro<C: Generate>(cat: &C, rng: &mut Gen, x: &ProObject<C>) -> Result<(ProMap<C>, ProMap<C>)> {
    let pairs: Vec<(C::Map, C::Map)> = x.levels().map(|s| cat.random_retract(rng, x.value(s))).collect();
    let values = pairs.iter().map(|(i, _)| cat.target(i).clone()).collect();
    let xp = ProObject::from_fn(cat, x.poset()?.clone(), values, |t, s| cat.compose_all(&[&pairs[t].1, &x.map(cat, t, s)?, &pairs[s].0]))?;
    let i = ProMap::level(cat, x.clone(), xp.clone(), pairs.iter().map(|(i, _)| i.clone()).collect())?;
    let r = ProMap::level(cat, xp, x.clone(), pairs.into_iter().map(|(_, r)| r).collect())?;
    Ok((i, r))
}

/// A level map that is a pro-isomorphism, with inverse witnesses.
pub struct ProIsoSample<C: ModelCategory> {
    pub map: ProMap<C>,
    pub witnesses: Witnesses<C::Map>,
}

/// A pro-isomorphism over the chain `0 < ... < n-1` (`n <= max_len`):
/// components `f_t`, diagonals `g_t: Y_t -> X_{t-1}`, structure maps
/// `g_t f_t` and `f_{t-1} g_t`, and an invertible top component.
pub fn random_pro_iso<C: Generate>(cat: &C, rng: &mut Gen, max_len: usize) -> Result<ProIsoSample<C>> {
    let n = rng.gen_range(1..=max_len.max(1));
    let component = |rng: &mut Gen, y: &C::Obj, t: usize| {
        if t + 1 == n {
            cat.random_iso_into(rng, y)
        } else {
            cat.random_into(rng, y, IntoClass::Any)
        }
    };
    let y0 = cat.random_object(rng);
    let f0 = component(rng, &y0, 0);
    let (mut xs, mut ys, mut fs, mut gs) = (vec![cat.source(&f0).clone()], vec![y0], vec![f0], vec![None]);
    for t in 1..n {
        let g = cat.random_into(rng, &xs[t - 1], IntoClass::Any);
        let y = cat.source(&g).clone();
        let f = component(rng, &y, t);
        xs.push(cat.source(&f).clone());
        ys.push(y);
        fs.push(f);
        gs.push(Some(g));
    }
    let poset = Arc::new(FinitePoset::chain(n));
    let (mut xb, mut yb) = (Vec::new(), Vec::new());
    for t in 1..n {
        let g = gs[t].as_ref().expect("diagonal below the bottom");
        xb.push((t, t - 1, cat.compose(g, &fs[t])?));
        yb.push((t, t - 1, cat.compose(&fs[t - 1], g)?));
    }
    let x = ProObject::finite(cat, poset.clone(), xs, xb)?;
    let y = ProObject::finite(cat, poset.clone(), ys, yb)?;
    let mut witnesses = Witnesses::new();
    for (t, s) in poset.strict_pairs() {
        let g = gs[t].as_ref().expect("diagonal below the bottom");
        let below = if t - 1 == s { g.clone() } else { cat.compose(&x.map(cat, t - 1, s)?, g)? };
        witnesses.insert((t, s), below);
    }
    Ok(ProIsoSample { map: ProMap::level(cat, x, y, fs)?, witnesses })
}

/// A commuting square with a levelwise cofibration (L1) or levelwise acyclic
/// cofibration (L2) on the left and the matching special map on the right,
/// built from two strict factorizations: `f = p ∘ i`, `p = q ∘ j`.
pub fn random_lifting_square<C: Generate>(cat: &C, rng: &mut Gen, max_len: usize, mode: StrictMode) -> Result<ProSquare<C>> {
    let f = random_map(cat, rng, max_len)?;
    let outer = factor_strict(cat, &f, mode)?;
    let inner = factor_strict(cat, &outer.right, mode)?;
    Ok(ProSquare {
        top: ProMap::compose(cat, &inner.left, &outer.left)?,
        left: outer.left,
        right: inner.right,
        bottom: outer.right,
    })
}

/// A weak equivalence into `y`: a special acyclic fibration or a retraction.
fn random_we_into<C: Generate>(cat: &C, rng: &mut Gen, y: &ProObject<C>) -> Result<ProMap<C>> {
    if rng.gen_bool(0.5) {
        random_level_map(cat, rng, y, IntoClass::AcyclicFib)
    } else {
        Ok(random_retract_pro(cat, rng, y)?.1)
    }
}

/// `X -f-> Y <-h- Z -g-> W` with `f`, `g` level weak equivalences and `h` a
/// pro-isomorphism.
pub struct ZigzagSample<C: ModelCategory> {
    pub f: ProMap<C>,
    pub h: ProMap<C>,
    pub g: ProMap<C>,
    pub witnesses: Witnesses<C::Map>,
}

pub fn random_zigzag<C: Generate>(cat: &C, rng: &mut Gen, max_len: usize) -> Result<ZigzagSample<C>> {
    let h = random_pro_iso(cat, rng, max_len)?;
    let f = random_we_into(cat, rng, h.map.target())?;
    let g = random_retract_pro(cat, rng, h.map.source())?.0;
    Ok(ZigzagSample { f, h: h.map, g, witnesses: h.witnesses })
}

/// A commuting square for two out of three, with witnesses for its
/// pro-isomorphism side. Left: the bottom `W -> Z` is the pro-isomorphism
/// and `X = W ×_Z Y` over a special acyclic fibration `Y -> Z`. Right: the
/// top `X -> W` is the pro-isomorphism, `f`, `b` are sections of
/// retractions, and `g = b ∘ k ∘ r`.
pub fn random_two_of_three<C: Generate>(
    cat: &C,
    rng: &mut Gen,
    max_len: usize,
    left_side: bool,
) -> Result<(ProSquare<C>, Witnesses<C::Map>)> {
    let k = random_pro_iso(cat, rng, max_len)?;
    if left_side {
        let z = k.map.target().clone();
        let g = random_level_map(cat, rng, &z, IntoClass::AcyclicFib)?;
        let d = ProDiagram { objects: vec![k.map.source().clone(), g.source().clone(), z], arrows: vec![(0, 2, k.map.clone()), (1, 2, g.clone())] };
        let pb = pro_limit_levelwise(cat, &d)?;
        let mut legs = pb.legs.into_iter();
        let (a, f) = (legs.next().expect("leg to W"), legs.next().expect("leg to Y"));
        Ok((ProSquare { top: f, left: a, right: g, bottom: k.map }, k.witnesses))
    } else {
        let (f, r) = random_retract_pro(cat, rng, k.map.source())?;
        let (b, _) = random_retract_pro(cat, rng, k.map.target())?;
        let g = ProMap::compose_all(cat, &[&r, &k.map, &b])?;
        Ok((ProSquare { top: k.map, left: f, right: b, bottom: g }, k.witnesses))
    }
}

/// `Z -f-> W -g-> Y <-p- X` with `f` a level weak equivalence, `g` a
/// pro-isomorphism and `p` a special fibration.
pub struct ProperSample<C: ModelCategory> {
    pub p: ProMap<C>,
    pub f: ProMap<C>,
    pub g: ProMap<C>,
    pub witnesses: Witnesses<C::Map>,
}

pub fn random_proper<C: Generate>(cat: &C, rng: &mut Gen, max_len: usize) -> Result<ProperSample<C>> {
    let g = random_pro_iso(cat, rng, max_len)?;
    let f = random_we_into(cat, rng, g.map.source())?;
    let p = random_level_map(cat, rng, g.map.target(), IntoClass::Fib)?;
    Ok(ProperSample { p, f, g: g.map, witnesses: g.witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_stream_same_draws() {
        let a = random_map(&SetBij, &mut rng(7, 3), 5).unwrap();
        let b = random_map(&SetBij, &mut rng(7, 3), 5).unwrap();
        assert_eq!(a.source(), b.source());
        assert!(a.equals(&SetBij, &b).unwrap());
    }

    #[test]
    fn posets_have_their_top_last() {
        let mut r = rng(1, 0);
        for _ in 0..50 {
            let p = random_poset(&mut r, 5);
            assert_eq!(p.max(), p.len() - 1);
        }
    }

    #[test]
    fn random_complexes_are_bounded() {
        let mut r = rng(2, 0);
        for _ in 0..50 {
            let c = ChainF2.random_object(&mut r);
            if let Some((lo, hi)) = c.range() {
                assert!(lo >= 0 && hi <= 2);
                assert!((lo..=hi).all(|n| c.dim(n) <= 3));
            }
        }
    }

    #[test]
    fn generated_classes_hold() {
        let mut r = rng(3, 0);
        for _ in 0..30 {
            let t = ChainF2.random_object(&mut r);
            let fib = ChainF2.random_into(&mut r, &t, IntoClass::Fib);
            assert!(ChainF2.classify(&fib).unwrap().fib);
            let afib = ChainF2.random_into(&mut r, &t, IntoClass::AcyclicFib);
            let c = ChainF2.classify(&afib).unwrap();
            assert!(c.fib && c.we);
            assert!(ChainF2.is_iso(&ChainF2.random_iso_into(&mut r, &t)));
            let (i, rt) = ChainF2.random_retract(&mut r, &t);
            assert!(ChainF2.classify(&i).unwrap().we);
            assert_eq!(ChainF2.compose(&rt, &i).unwrap(), ChainF2.identity(&t));
        }
    }

    #[test]
    fn pro_isos_carry_valid_witnesses() {
        let mut r = rng(4, 0);
        for _ in 0..30 {
            let s = random_pro_iso(&ChainF2, &mut r, 4).unwrap();
            crate::strict::check_witnesses(&ChainF2, &s.map, &s.witnesses).unwrap();
            let s = random_pro_iso(&SetBij, &mut r, 4).unwrap();
            crate::strict::check_witnesses(&SetBij, &s.map, &s.witnesses).unwrap();
        }
    }
}
