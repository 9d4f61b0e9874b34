//! Finite sets with bijections as weak equivalences. Every map is both a
//! cofibration and a fibration.

use std::collections::HashMap;
use std::sync::Arc;

use super::{Cone, Diagram, FactorMode, Factorization, MapClasses, ModelCategory, Square};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinSet {
    names: Arc<[String]>,
}

impl std::fmt::Debug for FinSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.names.iter()).finish()
    }
}

impl FinSet {
    /// Builds a set from element names; names must be pairwise distinct.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let set = FinSet { names: names.into() };
        set.check()?;
        Ok(set)
    }

    /// The set `{0, 1, ..., n-1}`.
    pub fn range(n: usize) -> Self {
        FinSet { names: (0..n).map(|i| i.to_string()).collect::<Vec<_>>().into() }
    }

    pub fn empty() -> Self {
        FinSet { names: Vec::new().into() }
    }

    fn check(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for n in self.names.iter() {
            if !seen.insert(n.as_str()) {
                return Err(Error::MalformedObject(format!("duplicate element name {n:?}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// A total function between finite sets, stored as image indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinMap {
    source: FinSet,
    target: FinSet,
    images: Vec<u32>,
}

impl std::fmt::Debug for FinMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut m = f.debug_map();
        for (i, &j) in self.images.iter().enumerate() {
            m.entry(&self.source.names[i], &self.target.names[j as usize]);
        }
        m.finish()
    }
}

impl FinMap {
    pub fn new(source: FinSet, target: FinSet, images: Vec<usize>) -> Result<Self> {
        let f = FinMap { source, target, images: images.into_iter().map(|i| i as u32).collect() };
        f.check()?;
        Ok(f)
    }

    /// Builds a map from `(source name, target name)` pairs.
    pub fn from_pairs<'a>(
        source: &FinSet,
        target: &FinSet,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self> {
        let mut images = vec![None; source.len()];
        for (a, b) in pairs {
            let i = source
                .position(a)
                .ok_or_else(|| Error::MalformedMap(format!("{a:?} is not in the source")))?;
            let j = target
                .position(b)
                .ok_or_else(|| Error::MalformedMap(format!("{b:?} is not in the target")))?;
            if images[i].replace(j).is_some() {
                return Err(Error::MalformedMap(format!("{a:?} has two images")));
            }
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, j)| j.ok_or_else(|| Error::MalformedMap(format!("{:?} has no image", source.names[i]))))
            .collect::<Result<Vec<_>>>()?;
        FinMap::new(source.clone(), target.clone(), images)
    }

    fn check(&self) -> Result<()> {
        if self.images.len() != self.source.len() {
            return Err(Error::MalformedMap(format!(
                "{} images for a source of size {}",
                self.images.len(),
                self.source.len()
            )));
        }
        if let Some(&j) = self.images.iter().find(|&&j| j as usize >= self.target.len()) {
            return Err(Error::MalformedMap(format!("image index {j} outside the target")));
        }
        Ok(())
    }

    pub fn source(&self) -> &FinSet {
        &self.source
    }

    pub fn target(&self) -> &FinSet {
        &self.target
    }

    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.images.iter().map(|&j| j as usize)
    }

    pub fn is_injective(&self) -> bool {
        let mut hit = vec![false; self.target.len()];
        self.images.iter().all(|&j| !std::mem::replace(&mut hit[j as usize], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.len()];
        for &j in &self.images {
            hit[j as usize] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_bijective(&self) -> bool {
        self.source.len() == self.target.len() && self.is_injective()
    }
}

/// The instance of finite sets and bijections.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SetBij;

fn tuple_name(parts: &[&str]) -> String {
    format!("({})", parts.join(","))
}

/// Replaces colliding names with positional ones so the result is a valid set.
fn distinct_names(names: Vec<String>, prefix: &str) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    if names.iter().all(|n| seen.insert(n.clone())) {
        names
    } else {
        (0..names.len()).map(|i| format!("{prefix}{i}")).collect()
    }
}

impl ModelCategory for SetBij {
    type Obj = FinSet;
    type Map = FinMap;

    fn tag(&self) -> &'static str {
        "set-bij"
    }

    fn source<'a>(&self, f: &'a FinMap) -> &'a FinSet {
        &f.source
    }

    fn target<'a>(&self, f: &'a FinMap) -> &'a FinSet {
        &f.target
    }

    fn identity(&self, x: &FinSet) -> FinMap {
        FinMap { source: x.clone(), target: x.clone(), images: (0..x.len() as u32).collect() }
    }

    fn compose(&self, g: &FinMap, f: &FinMap) -> Result<FinMap> {
        if f.target != g.source {
            return Err(Error::NotComposable(format!("{:?} then {:?}", f.target, g.source)));
        }
        Ok(FinMap {
            source: f.source.clone(),
            target: g.target.clone(),
            images: f.images.iter().map(|&j| g.images[j as usize]).collect(),
        })
    }

    fn validate_object(&self, x: &FinSet) -> Result<()> {
        x.check()
    }

    fn validate_map(&self, f: &FinMap) -> Result<()> {
        f.source.check()?;
        f.target.check()?;
        f.check()
    }

    fn classify(&self, f: &FinMap) -> Result<MapClasses> {
        self.validate_map(f)?;
        Ok(MapClasses { we: f.is_bijective(), cof: true, fib: true })
    }

    fn inverse(&self, f: &FinMap) -> Option<FinMap> {
        if !f.is_bijective() {
            return None;
        }
        let mut inv = vec![0u32; f.source.len()];
        for (i, &j) in f.images.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Some(FinMap { source: f.target.clone(), target: f.source.clone(), images: inv })
    }

    fn factor(&self, f: &FinMap, mode: FactorMode) -> Result<Factorization<Self>> {
        self.validate_map(f)?;
        Ok(match mode {
            FactorMode::CofThenAcyclicFib => Factorization {
                left: f.clone(),
                right: self.identity(&f.target),
                middle: f.target.clone(),
                mode,
            },
            FactorMode::AcyclicCofThenFib => Factorization {
                left: self.identity(&f.source),
                right: f.clone(),
                middle: f.source.clone(),
                mode,
            },
        })
    }

    fn solve_lift(&self, sq: &Square<Self>) -> Result<Option<FinMap>> {
        if !self.square_commutes(sq)? {
            return Err(Error::NonCommuting("lifting square".into()));
        }
        if let Some(p_inv) = self.inverse(&sq.right) {
            return self.compose(&p_inv, &sq.bottom).map(Some);
        }
        if let Some(i_inv) = self.inverse(&sq.left) {
            return self.compose(&sq.top, &i_inv).map(Some);
        }
        Ok(None)
    }

    fn limit(&self, d: &Diagram<Self>) -> Result<Cone<Self>> {
        d.validate(self)?;
        let n = d.objects.len();
        if n == 1 && d.arrows.is_empty() {
            let x = d.objects[0].clone();
            return Ok(Cone { legs: vec![self.identity(&x)], apex: x });
        }
        // Assign objects in an order where, whenever possible, the next object
        // is the target of an arrow from an assigned one (its value is forced).
        let mut order = Vec::with_capacity(n);
        let mut placed = vec![false; n];
        while order.len() < n {
            let forced = (0..n).find(|&i| !placed[i] && d.arrows.iter().any(|a| a.to == i && placed[a.from]));
            let next = forced
                .or_else(|| (0..n).find(|&i| !placed[i] && !d.arrows.iter().any(|a| a.to == i)))
                .or_else(|| (0..n).find(|&i| !placed[i]))
                .expect("an unplaced object remains");
            placed[next] = true;
            order.push(next);
        }
        let mut families: Vec<Vec<u32>> = Vec::new();
        let mut current = vec![u32::MAX; n];
        fn search(
            d: &Diagram<SetBij>,
            order: &[usize],
            depth: usize,
            current: &mut Vec<u32>,
            out: &mut Vec<Vec<u32>>,
        ) {
            if depth == order.len() {
                out.push(current.clone());
                return;
            }
            let obj = order[depth];
            let forced = d
                .arrows
                .iter()
                .find(|a| a.to == obj && current[a.from] != u32::MAX)
                .map(|a| a.map.images[current[a.from] as usize]);
            let candidates: Vec<u32> = match forced {
                Some(v) => vec![v],
                None => (0..d.objects[obj].len() as u32).collect(),
            };
            for v in candidates {
                current[obj] = v;
                let ok = d.arrows.iter().all(|a| {
                    let (x, y) = (current[a.from], current[a.to]);
                    x == u32::MAX || y == u32::MAX || a.map.images[x as usize] == y
                });
                if ok {
                    search(d, order, depth + 1, current, out);
                }
            }
            current[obj] = u32::MAX;
        }
        search(d, &order, 0, &mut current, &mut families);
        families.sort();

        let roots = if d.is_loop_free() { d.roots() } else { (0..n).collect() };
        let names: Vec<String> = families
            .iter()
            .map(|fam| {
                let parts: Vec<&str> =
                    roots.iter().map(|&r| d.objects[r].names[fam[r] as usize].as_str()).collect();
                tuple_name(&parts)
            })
            .collect();
        let apex = FinSet { names: distinct_names(names, "l").into() };
        let legs = (0..n)
            .map(|i| FinMap {
                source: apex.clone(),
                target: d.objects[i].clone(),
                images: families.iter().map(|fam| fam[i]).collect(),
            })
            .collect();
        Ok(Cone { apex, legs })
    }

    fn colimit(&self, d: &Diagram<Self>) -> Result<Cone<Self>> {
        d.validate(self)?;
        let n = d.objects.len();
        if n == 1 && d.arrows.is_empty() {
            let x = d.objects[0].clone();
            return Ok(Cone { legs: vec![self.identity(&x)], apex: x });
        }
        let offsets: Vec<usize> = d
            .objects
            .iter()
            .scan(0, |acc, x| {
                let o = *acc;
                *acc += x.len();
                Some(o)
            })
            .collect();
        let total: usize = d.objects.iter().map(FinSet::len).sum();
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for a in &d.arrows {
            for (i, &j) in a.map.images.iter().enumerate() {
                let u = find(&mut parent, offsets[a.from] + i);
                let v = find(&mut parent, offsets[a.to] + j as usize);
                if u != v {
                    let (lo, hi) = (u.min(v), u.max(v));
                    parent[hi] = lo;
                }
            }
        }
        let mut class_of = vec![usize::MAX; total];
        let mut reps = Vec::new();
        for g in 0..total {
            let r = find(&mut parent, g);
            if class_of[r] == usize::MAX {
                class_of[r] = reps.len();
                reps.push(g);
            }
            class_of[g] = class_of[r];
        }
        let locate = |g: usize| -> (usize, usize) {
            let mut obj = 0;
            for (k, &o) in offsets.iter().enumerate() {
                if o <= g && g < o + d.objects[k].len() {
                    obj = k;
                }
            }
            (obj, g - offsets[obj])
        };
        let plain: Vec<String> = reps
            .iter()
            .map(|&g| {
                let (k, i) = locate(g);
                d.objects[k].names[i].clone()
            })
            .collect();
        let names = {
            let mut seen = std::collections::HashSet::new();
            if plain.iter().all(|n| seen.insert(n.clone())) {
                plain
            } else {
                reps.iter()
                    .map(|&g| {
                        let (k, i) = locate(g);
                        format!("{k}.{}", d.objects[k].names[i])
                    })
                    .collect()
            }
        };
        let apex = FinSet { names: distinct_names(names, "c").into() };
        let legs = (0..n)
            .map(|k| FinMap {
                source: d.objects[k].clone(),
                target: apex.clone(),
                images: (0..d.objects[k].len()).map(|i| class_of[offsets[k] + i] as u32).collect(),
            })
            .collect();
        Ok(Cone { apex, legs })
    }

    fn limit_factor(&self, limit: &Cone<Self>, apex: &FinSet, legs: &[FinMap]) -> Result<FinMap> {
        if legs.len() != limit.legs.len() {
            return Err(Error::MalformedDiagram("cone has the wrong number of legs".into()));
        }
        let mut index: HashMap<Vec<u32>, u32> = HashMap::with_capacity(limit.apex.len());
        for e in 0..limit.apex.len() {
            index.insert(limit.legs.iter().map(|l| l.images[e]).collect(), e as u32);
        }
        let mut images = Vec::with_capacity(apex.len());
        for a in 0..apex.len() {
            let key: Vec<u32> = legs.iter().map(|l| l.images[a]).collect();
            let e = index.get(&key).ok_or_else(|| {
                Error::NonCommuting(format!("element {:?} does not land in the limit", apex.names[a]))
            })?;
            images.push(*e);
        }
        Ok(FinMap { source: apex.clone(), target: limit.apex.clone(), images })
    }

    fn colimit_factor(&self, colimit: &Cone<Self>, apex: &FinSet, legs: &[FinMap]) -> Result<FinMap> {
        if legs.len() != colimit.legs.len() {
            return Err(Error::MalformedDiagram("cocone has the wrong number of legs".into()));
        }
        let mut images = vec![u32::MAX; colimit.apex.len()];
        for (leg, cleg) in legs.iter().zip(&colimit.legs) {
            for (i, &c) in cleg.images.iter().enumerate() {
                let v = leg.images[i];
                let slot = &mut images[c as usize];
                if *slot == u32::MAX {
                    *slot = v;
                } else if *slot != v {
                    return Err(Error::NonCommuting("cocone is not constant on a colimit class".into()));
                }
            }
        }
        if images.contains(&u32::MAX) {
            return Err(Error::internal("colimit class without a representative"));
        }
        Ok(FinMap { source: colimit.apex.clone(), target: apex.clone(), images })
    }

    fn jointly_monic(&self, legs: &[FinMap]) -> bool {
        let Some(first) = legs.first() else { return true };
        let mut seen = std::collections::HashSet::new();
        (0..first.source.len()).all(|e| seen.insert(legs.iter().map(|l| l.images[e]).collect::<Vec<_>>()))
    }

    fn enumerate_hom(&self, x: &FinSet, y: &FinSet, cap: usize) -> Option<Vec<FinMap>> {
        let count = (y.len() as u128).checked_pow(x.len() as u32)?;
        if count > cap as u128 {
            return None;
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut images = vec![0u32; x.len()];
        for _ in 0..count {
            out.push(FinMap { source: x.clone(), target: y.clone(), images: images.clone() });
            for slot in images.iter_mut() {
                *slot += 1;
                if (*slot as usize) < y.len() {
                    break;
                }
                *slot = 0;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{check_limit, is_cocone};

    fn set(names: &[&str]) -> FinSet {
        FinSet::new(names.iter().copied()).unwrap()
    }

    #[test]
    fn collapse_is_not_a_bijection() {
        let f = FinMap::from_pairs(&set(&["a", "b"]), &set(&["x"]), [("a", "x"), ("b", "x")]).unwrap();
        let c = SetBij.classify(&f).unwrap();
        assert_eq!(c, MapClasses { we: false, cof: true, fib: true });
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(FinSet::new(["a", "a"]).is_err());
        assert!(FinMap::new(set(&["a"]), set(&["x"]), vec![1]).is_err());
    }

    #[test]
    fn factorizations() {
        let f = FinMap::from_pairs(&set(&["a", "b"]), &set(&["x"]), [("a", "x"), ("b", "x")]).unwrap();
        let l1 = SetBij.factor(&f, FactorMode::CofThenAcyclicFib).unwrap();
        assert_eq!(l1.left, f);
        assert!(SetBij.classify(&l1.right).unwrap().we);
        let l2 = SetBij.factor(&f, FactorMode::AcyclicCofThenFib).unwrap();
        assert_eq!(SetBij.compose(&l2.right, &l2.left).unwrap(), f);
    }

    #[test]
    fn lift_through_inclusion() {
        let a = set(&["a"]);
        let ab = set(&["a", "b"]);
        let uv = set(&["u", "v"]);
        let i = FinMap::from_pairs(&a, &ab, [("a", "a")]).unwrap();
        let p = SetBij.identity(&uv);
        let top = FinMap::from_pairs(&a, &uv, [("a", "u")]).unwrap();
        let bottom = FinMap::from_pairs(&ab, &uv, [("a", "u"), ("b", "v")]).unwrap();
        let h = SetBij.solve_lift(&Square { left: i, right: p, top, bottom: bottom.clone() }).unwrap().unwrap();
        assert_eq!(h, bottom);
    }

    #[test]
    fn lift_rejects_non_commuting() {
        let a = set(&["a"]);
        let uv = set(&["u", "v"]);
        let i = SetBij.identity(&a);
        let p = SetBij.identity(&uv);
        let top = FinMap::from_pairs(&a, &uv, [("a", "u")]).unwrap();
        let bottom = FinMap::from_pairs(&a, &uv, [("a", "v")]).unwrap();
        assert!(matches!(
            SetBij.solve_lift(&Square { left: i, right: p, top, bottom }),
            Err(Error::NonCommuting(_))
        ));
    }

    #[test]
    fn pullback_names_and_universality() {
        let x = set(&["x"]);
        let y = set(&["y"]);
        let uv = set(&["u", "v"]);
        let f = FinMap::from_pairs(&x, &y, [("x", "y")]).unwrap();
        let g = FinMap::from_pairs(&uv, &y, [("u", "y"), ("v", "y")]).unwrap();
        let d = Diagram::pullback(f, g, &SetBij);
        let lim = SetBij.limit(&d).unwrap();
        assert_eq!(lim.apex.names(), &["(x,u)".to_string(), "(x,v)".to_string()]);
        let test = Cone {
            apex: set(&["p"]),
            legs: vec![
                FinMap::from_pairs(&set(&["p"]), &x, [("p", "x")]).unwrap(),
                FinMap::from_pairs(&set(&["p"]), &uv, [("p", "v")]).unwrap(),
                FinMap::from_pairs(&set(&["p"]), &y, [("p", "y")]).unwrap(),
            ],
        };
        assert!(check_limit(&SetBij, &d, &lim, &[test]).unwrap());
    }

    #[test]
    fn empty_limit_and_colimit() {
        let d = Diagram::<SetBij>::new();
        assert_eq!(SetBij.limit(&d).unwrap().apex.len(), 1);
        assert_eq!(SetBij.colimit(&d).unwrap().apex.len(), 0);
    }

    #[test]
    fn pushout_glues() {
        let z = set(&["z"]);
        let a = set(&["a1", "a2"]);
        let w = set(&["w1", "w2"]);
        let f = FinMap::from_pairs(&z, &a, [("z", "a1")]).unwrap();
        let g = FinMap::from_pairs(&z, &w, [("z", "w1")]).unwrap();
        let d = Diagram::pushout(f, g, &SetBij);
        let c = SetBij.colimit(&d).unwrap();
        assert_eq!(c.apex.len(), 3);
        assert!(is_cocone(&SetBij, &d, &c).unwrap());
    }

    #[test]
    fn hom_enumeration_counts() {
        let homs = SetBij.enumerate_hom(&FinSet::range(2), &FinSet::range(3), 100).unwrap();
        assert_eq!(homs.len(), 9);
        assert!(SetBij.enumerate_hom(&FinSet::range(0), &FinSet::range(0), 10).unwrap().len() == 1);
        assert!(SetBij.enumerate_hom(&FinSet::range(5), &FinSet::range(5), 10).is_none());
    }
}
