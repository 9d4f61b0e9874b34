//! Pro-objects, pro-maps and the constructions that only need the index.
//!
//! Two index regimes are supported. A finite directed poset always has a
//! maximum `M`, so `Hom(X, Y) = lim_s colim_t Hom(X_t, Y_s)` collapses to
//! `Hom(X_M, Y_N)`; equality of pro-maps is decided there. An ω-tower is
//! stored up to a stable level `K` after which it is constant with identity
//! bonds, so the same collapse applies at `K`.

use std::fmt;
use std::sync::Arc;

use crate::base::{Cone, Diagram, ModelCategory};
use crate::error::{Error, Result};
use crate::index::{CofinalMap, FinitePoset, IndexPoset};

enum ObjInner<C: ModelCategory> {
    Finite { poset: Arc<FinitePoset>, values: Vec<C::Obj>, maps: Vec<Vec<Option<C::Map>>> },
    Omega { values: Vec<C::Obj>, bonds: Vec<C::Map> },
}

/// A functor from an index poset into the base category.
pub struct ProObject<C: ModelCategory> {
    inner: Arc<ObjInner<C>>,
}

impl<C: ModelCategory> Clone for ProObject<C> {
    fn clone(&self) -> Self {
        ProObject { inner: self.inner.clone() }
    }
}

impl<C: ModelCategory> PartialEq for ProObject<C> {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.inner, &other.inner) {
            return true;
        }
        match (&*self.inner, &*other.inner) {
            (
                ObjInner::Finite { poset: p, values: v, maps: m },
                ObjInner::Finite { poset: q, values: w, maps: n },
            ) => p == q && v == w && m == n,
            (ObjInner::Omega { values: v, bonds: b }, ObjInner::Omega { values: w, bonds: c }) => v == w && b == c,
            _ => false,
        }
    }
}

impl<C: ModelCategory> Eq for ProObject<C> {}

impl<C: ModelCategory> fmt::Debug for ProObject<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.inner {
            ObjInner::Finite { poset, values, .. } => {
                f.debug_struct("ProObject").field("index", poset).field("values", values).finish()
            }
            ObjInner::Omega { values, bonds } => {
                f.debug_struct("ProObject").field("omega", values).field("bonds", bonds).finish()
            }
        }
    }
}

impl<C: ModelCategory> ProObject<C> {
    /// Builds a finite pro-object from values and structure maps given as
    /// `(t, s, X_t -> X_s)`. Every cover must be present; other related pairs
    /// may be given and must agree with the composites.
    pub fn finite(cat: &C, poset: Arc<FinitePoset>, values: Vec<C::Obj>, structure: Vec<(usize, usize, C::Map)>) -> Result<Self> {
        let n = poset.len();
        if values.len() != n {
            return Err(Error::MalformedObject(format!("{} values for an index of size {n}", values.len())));
        }
        for v in &values {
            cat.validate_object(v)?;
        }
        let mut given: Vec<Vec<Option<C::Map>>> = vec![vec![None; n]; n];
        for (t, s, m) in structure {
            if t >= n || s >= n || !poset.lt(s, t) {
                return Err(Error::MalformedObject(format!(
                    "structure map {} -> {} does not follow the order",
                    name_of(&poset, t),
                    name_of(&poset, s)
                )));
            }
            cat.validate_map(&m)?;
            if cat.source(&m) != &values[t] || cat.target(&m) != &values[s] {
                return Err(Error::MalformedObject(format!(
                    "structure map {} -> {} has the wrong endpoints",
                    poset.name(t),
                    poset.name(s)
                )));
            }
            if given[t][s].replace(m).is_some() {
                return Err(Error::MalformedObject(format!("structure map {} -> {} given twice", poset.name(t), poset.name(s))));
            }
        }
        let covers = poset.covers();
        for &(s, t) in &covers {
            if given[t][s].is_none() {
                return Err(Error::MalformedObject(format!("missing structure map {} -> {}", poset.name(t), poset.name(s))));
            }
        }
        let mut maps: Vec<Vec<Option<C::Map>>> = vec![vec![None; n]; n];
        for &(s, t) in &covers {
            maps[t][s] = given[t][s].clone();
        }
        for &t in poset.linear_extension().order() {
            for s in poset.predecessors(t) {
                if covers.contains(&(s, t)) {
                    continue;
                }
                let c = (0..n)
                    .find(|&c| covers.contains(&(c, t)) && poset.le(s, c))
                    .ok_or_else(|| Error::internal("related pair without a cover in between"))?;
                let upper = maps[t][c].clone().ok_or_else(|| Error::internal("cover map missing"))?;
                let lower = maps[c][s].clone().ok_or_else(|| Error::internal("earlier composite missing"))?;
                let comp = cat.compose(&lower, &upper)?;
                if let Some(g) = &given[t][s] {
                    if g != &comp {
                        return Err(Error::NotFunctorial {
                            from: poset.name(t).to_string(),
                            to: poset.name(s).to_string(),
                            detail: format!("given map differs from the composite through {}", poset.name(c)),
                        });
                    }
                }
                maps[t][s] = Some(comp);
            }
        }
        let obj = ProObject { inner: Arc::new(ObjInner::Finite { poset, values, maps }) };
        obj.check_functorial(cat)?;
        Ok(obj)
    }

    /// Builds a finite pro-object from a map for every related pair.
    pub fn from_fn(
        cat: &C,
        poset: Arc<FinitePoset>,
        values: Vec<C::Obj>,
        mut map: impl FnMut(usize, usize) -> Result<C::Map>,
    ) -> Result<Self> {
        let structure = poset
            .strict_pairs()
            .into_iter()
            .map(|(t, s)| Ok((t, s, map(t, s)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::finite(cat, poset, values, structure)
    }

    /// An ω-tower `X_0 <- X_1 <- ... <- X_K`, constant with identity bonds
    /// beyond `K`. `bonds[n]` is `X_{n+1} -> X_n`.
    pub fn omega(cat: &C, values: Vec<C::Obj>, bonds: Vec<C::Map>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::MalformedObject("an ω-tower needs at least one level".into()));
        }
        if bonds.len() + 1 != values.len() {
            return Err(Error::MalformedObject(format!("{} levels need {} bonds", values.len(), values.len() - 1)));
        }
        for v in &values {
            cat.validate_object(v)?;
        }
        for (n, b) in bonds.iter().enumerate() {
            cat.validate_map(b)?;
            if cat.source(b) != &values[n + 1] || cat.target(b) != &values[n] {
                return Err(Error::MalformedObject(format!("bond {} -> {n} has the wrong endpoints", n + 1)));
            }
        }
        Ok(ProObject { inner: Arc::new(ObjInner::Omega { values, bonds }) })
    }

    /// The constant pro-object on the one-point index.
    pub fn constant(cat: &C, x: C::Obj) -> Result<Self> {
        Self::finite(cat, Arc::new(FinitePoset::point()), vec![x], Vec::new())
    }

    pub fn index(&self) -> IndexPoset {
        match &*self.inner {
            ObjInner::Finite { poset, .. } => IndexPoset::Finite(poset.clone()),
            ObjInner::Omega { .. } => IndexPoset::Omega,
        }
    }

    pub fn is_omega(&self) -> bool {
        matches!(&*self.inner, ObjInner::Omega { .. })
    }

    pub fn poset(&self) -> Result<&Arc<FinitePoset>> {
        match &*self.inner {
            ObjInner::Finite { poset, .. } => Ok(poset),
            ObjInner::Omega { .. } => Err(Error::Unsupported("this construction needs a finite index".into())),
        }
    }

    /// Number of stored levels.
    pub fn size(&self) -> usize {
        match &*self.inner {
            ObjInner::Finite { values, .. } | ObjInner::Omega { values, .. } => values.len(),
        }
    }

    /// The maximum of a finite index, or the stable level of a tower.
    pub fn top(&self) -> usize {
        match &*self.inner {
            ObjInner::Finite { poset, .. } => poset.max(),
            ObjInner::Omega { values, .. } => values.len() - 1,
        }
    }

    pub fn values(&self) -> &[C::Obj] {
        match &*self.inner {
            ObjInner::Finite { values, .. } | ObjInner::Omega { values, .. } => values,
        }
    }

    pub fn value(&self, s: usize) -> &C::Obj {
        let v = self.values();
        &v[s.min(v.len() - 1)]
    }

    pub fn le(&self, s: usize, t: usize) -> bool {
        match &*self.inner {
            ObjInner::Finite { poset, .. } => poset.le(s, t),
            ObjInner::Omega { .. } => s <= t,
        }
    }

    pub fn level_name(&self, s: usize) -> String {
        match &*self.inner {
            ObjInner::Finite { poset, .. } => name_of(poset, s),
            ObjInner::Omega { .. } => s.to_string(),
        }
    }

    /// The structure map `X_t -> X_s` for `t >= s`.
    pub fn map(&self, cat: &C, t: usize, s: usize) -> Result<C::Map> {
        match &*self.inner {
            ObjInner::Finite { poset, values, maps } => {
                if t == s {
                    return Ok(cat.identity(&values[t]));
                }
                if t >= poset.len() || s >= poset.len() || !poset.lt(s, t) {
                    return Err(Error::pre(format!("no structure map {} -> {}", name_of(poset, t), name_of(poset, s))));
                }
                maps[t][s].clone().ok_or_else(|| Error::internal("structure map not stored"))
            }
            ObjInner::Omega { values, bonds } => {
                if t < s {
                    return Err(Error::pre(format!("no structure map {t} -> {s}")));
                }
                let k = values.len() - 1;
                let (t, s) = (t.min(k), s.min(k));
                let mut acc = cat.identity(&values[t]);
                for n in (s..t).rev() {
                    acc = cat.compose(&bonds[n], &acc)?;
                }
                Ok(acc)
            }
        }
    }

    /// The ω bonds `X_{n+1} -> X_n`, empty for a finite index.
    pub fn bonds(&self) -> &[C::Map] {
        match &*self.inner {
            ObjInner::Omega { bonds, .. } => bonds,
            ObjInner::Finite { .. } => &[],
        }
    }

    /// Covers `(t, s, X_t -> X_s)` of a finite index, or the ω bonds.
    pub fn structure(&self) -> Vec<(usize, usize, C::Map)> {
        match &*self.inner {
            ObjInner::Finite { poset, maps, .. } => poset
                .covers()
                .into_iter()
                .filter_map(|(s, t)| maps[t][s].clone().map(|m| (t, s, m)))
                .collect(),
            ObjInner::Omega { bonds, .. } => bonds.iter().enumerate().map(|(n, b)| (n + 1, n, b.clone())).collect(),
        }
    }

    fn check_functorial(&self, cat: &C) -> Result<()> {
        if let ObjInner::Finite { poset, .. } = &*self.inner {
            for (u, t) in poset.strict_pairs() {
                for s in poset.predecessors(t) {
                    let via = cat.compose(&self.map(cat, t, s)?, &self.map(cat, u, t)?)?;
                    if via != self.map(cat, u, s)? {
                        return Err(Error::NotFunctorial {
                            from: poset.name(u).to_string(),
                            to: poset.name(s).to_string(),
                            detail: format!("composite through {} differs", poset.name(t)),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Restriction of a finite pro-object to a cofinal sub-poset.
    pub fn restrict(&self, cat: &C, elements: &[usize]) -> Result<Self> {
        let poset = self.poset()?;
        let sub = Arc::new(poset.restrict(elements)?);
        if !elements.contains(&poset.max()) {
            return Err(Error::pre("restriction must keep the maximum"));
        }
        let values = elements.iter().map(|&e| self.value(e).clone()).collect();
        Self::from_fn(cat, sub, values, |t, s| self.map(cat, elements[t], elements[s]))
    }

    /// Truncation of an ω-tower to the chain `0 < ... < depth - 1`.
    pub fn truncate(&self, cat: &C, depth: usize) -> Result<Self> {
        if !self.is_omega() {
            return Err(Error::pre("only ω-towers are truncated"));
        }
        let depth = depth.max(1);
        let poset = Arc::new(FinitePoset::chain(depth));
        let values = (0..depth).map(|n| self.value(n).clone()).collect();
        Self::from_fn(cat, poset, values, |t, s| self.map(cat, t, s))
    }

    /// Positions of the index, in the order levels are stored.
    pub fn levels(&self) -> std::ops::Range<usize> {
        0..self.size()
    }

    fn same_index(&self, other: &Self) -> bool {
        match (&*self.inner, &*other.inner) {
            (ObjInner::Finite { poset: p, .. }, ObjInner::Finite { poset: q, .. }) => p == q,
            (ObjInner::Omega { .. }, ObjInner::Omega { .. }) => true,
            _ => false,
        }
    }
}

fn name_of(p: &FinitePoset, i: usize) -> String {
    if i < p.len() {
        p.name(i).to_string()
    } else {
        format!("#{i}")
    }
}

/// Components of a pro-map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Repr<M> {
    /// One component `X_s -> Y_s` per level of a shared index.
    Level(Vec<M>),
    /// For each target level `s`, a source level `t` and `X_t -> Y_s`.
    General(Vec<(usize, M)>),
}

/// A morphism of pro-objects.
pub struct ProMap<C: ModelCategory> {
    source: ProObject<C>,
    target: ProObject<C>,
    repr: Repr<C::Map>,
}

impl<C: ModelCategory> Clone for ProMap<C> {
    fn clone(&self) -> Self {
        ProMap { source: self.source.clone(), target: self.target.clone(), repr: self.repr.clone() }
    }
}

impl<C: ModelCategory> fmt::Debug for ProMap<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProMap").field("repr", &self.repr).finish()
    }
}

impl<C: ModelCategory> ProMap<C> {
    /// A level map over a shared index, checked for naturality.
    pub fn level(cat: &C, source: ProObject<C>, target: ProObject<C>, comps: Vec<C::Map>) -> Result<Self> {
        if !source.same_index(&target) {
            return Err(Error::MalformedMap("level map between different indices".into()));
        }
        let need = source.size().max(target.size());
        if comps.len() < need || (!source.is_omega() && comps.len() != need) {
            return Err(Error::MalformedMap(format!("{} components for {need} levels", comps.len())));
        }
        for (s, c) in comps.iter().enumerate() {
            cat.validate_map(c)?;
            if cat.source(c) != source.value(s) || cat.target(c) != target.value(s) {
                return Err(Error::MalformedMap(format!("component at {} has the wrong endpoints", source.level_name(s))));
            }
        }
        let f = ProMap { source, target, repr: Repr::Level(comps) };
        f.check_natural(cat)?;
        Ok(f)
    }

    /// A general representative, checked for compatibility.
    pub fn general(cat: &C, source: ProObject<C>, target: ProObject<C>, comps: Vec<(usize, C::Map)>) -> Result<Self> {
        let need = if target.is_omega() { target.size().max(1) } else { target.size() };
        if comps.len() < need || (!target.is_omega() && comps.len() != need) {
            return Err(Error::MalformedMap(format!("{} components for {need} target levels", comps.len())));
        }
        if target.is_omega() && comps.len() - 1 < target.top() {
            return Err(Error::MalformedMap("components must reach the stable level".into()));
        }
        for (s, (t, c)) in comps.iter().enumerate() {
            if !source.is_omega() && *t >= source.size() {
                return Err(Error::MalformedMap(format!("component for {} uses an unknown level", target.level_name(s))));
            }
            cat.validate_map(c)?;
            if cat.source(c) != source.value(*t) || cat.target(c) != target.value(s) {
                return Err(Error::MalformedMap(format!(
                    "component for {} from {} has the wrong endpoints",
                    target.level_name(s),
                    source.level_name(*t)
                )));
            }
        }
        let f = ProMap { source, target, repr: Repr::General(comps) };
        f.check_natural(cat)?;
        Ok(f)
    }

    pub fn identity(cat: &C, x: &ProObject<C>) -> Self {
        let comps = x.values().iter().map(|v| cat.identity(v)).collect();
        ProMap { source: x.clone(), target: x.clone(), repr: Repr::Level(comps) }
    }

    pub fn source(&self) -> &ProObject<C> {
        &self.source
    }

    pub fn target(&self) -> &ProObject<C> {
        &self.target
    }

    pub fn repr(&self) -> &Repr<C::Map> {
        &self.repr
    }

    pub fn is_level(&self) -> bool {
        matches!(self.repr, Repr::Level(_))
    }

    /// Level components, when the map is a level map.
    pub fn level_components(&self) -> Option<&[C::Map]> {
        match &self.repr {
            Repr::Level(c) => Some(c),
            Repr::General(_) => None,
        }
    }

    /// The representative component for target level `s`.
    pub fn component(&self, s: usize) -> (usize, C::Map) {
        match &self.repr {
            Repr::Level(c) => (s, c[s.min(c.len() - 1)].clone()),
            Repr::General(c) => c[s.min(c.len() - 1)].clone(),
        }
    }

    fn stored(&self) -> usize {
        match &self.repr {
            Repr::Level(c) => c.len(),
            Repr::General(c) => c.len(),
        }
    }

    fn check_natural(&self, cat: &C) -> Result<()> {
        let (x, y) = (&self.source, &self.target);
        let n = self.stored().max(y.size());
        for s2 in 0..n {
            for s in 0..n {
                if s == s2 || !y.le(s, s2) {
                    continue;
                }
                let (t2, g2) = self.component(s2);
                let (t, g) = self.component(s);
                let lhs = cat.compose(&y.map(cat, s2, s)?, &g2)?;
                if !agree(cat, x, (t2, &lhs), (t, &g))? {
                    return Err(Error::NotNatural { from: y.level_name(s2), to: y.level_name(s) });
                }
            }
        }
        Ok(())
    }

    /// The component `X_M -> Y_N` between the maxima (or stable levels).
    pub fn at_max(&self, cat: &C) -> Result<C::Map> {
        let (t, g) = self.component(self.target.top());
        let m = self.source.top();
        cat.compose(&g, &self.source.map(cat, m.max(t), t)?)
    }

    /// `g ∘ f`
    pub fn compose(cat: &C, g: &ProMap<C>, f: &ProMap<C>) -> Result<ProMap<C>> {
        if f.target != g.source {
            return Err(Error::NotComposable("pro-maps do not share the middle object".into()));
        }
        if let (Repr::Level(a), Repr::Level(b)) = (&f.repr, &g.repr) {
            if f.source.same_index(&g.target) {
                let n = a.len().max(b.len());
                let comps = (0..n)
                    .map(|s| cat.compose(&b[s.min(b.len() - 1)], &a[s.min(a.len() - 1)]))
                    .collect::<Result<Vec<_>>>()?;
                return Ok(ProMap { source: f.source.clone(), target: g.target.clone(), repr: Repr::Level(comps) });
            }
        }
        let n = if g.target.is_omega() { g.stored().max(f.stored()).max(g.target.size()) } else { g.target.size() };
        let mut comps = Vec::with_capacity(n);
        for s in 0..n {
            let (u, gs) = g.component(s);
            let (t, fu) = f.component(u);
            comps.push((t, cat.compose(&gs, &fu)?));
        }
        Ok(ProMap { source: f.source.clone(), target: g.target.clone(), repr: Repr::General(comps) })
    }

    pub fn compose_all(cat: &C, maps: &[&ProMap<C>]) -> Result<ProMap<C>> {
        let (first, rest) = maps.split_first().ok_or_else(|| Error::pre("empty composite"))?;
        rest.iter().try_fold((*first).clone(), |acc, g| ProMap::compose(cat, g, &acc))
    }

    /// Equality of pro-maps, decided between the maxima.
    pub fn equals(&self, cat: &C, other: &ProMap<C>) -> Result<bool> {
        if self.source != other.source || self.target != other.target {
            return Ok(false);
        }
        Ok(self.at_max(cat)? == other.at_max(cat)?)
    }

    /// The pro-map with a given component between the maxima.
    pub fn from_max(cat: &C, source: ProObject<C>, target: ProObject<C>, g: C::Map) -> Result<Self> {
        let (m, n) = (source.top(), target.top());
        if cat.source(&g) != source.value(m) || cat.target(&g) != target.value(n) {
            return Err(Error::MalformedMap("component between maxima has the wrong endpoints".into()));
        }
        let comps = (0..target.size()).map(|s| Ok((m, cat.compose(&target.map(cat, n, s)?, &g)?))).collect::<Result<_>>()?;
        Ok(ProMap { source, target, repr: Repr::General(comps) })
    }
}

/// Whether two components out of levels `t1`, `t2` of `x` agree after
/// refinement to a common upper bound.
fn agree<C: ModelCategory>(cat: &C, x: &ProObject<C>, (t1, g1): (usize, &C::Map), (t2, g2): (usize, &C::Map)) -> Result<bool> {
    let u = if x.is_omega() { t1.max(t2).max(x.top()) } else { x.top() };
    Ok(cat.compose(g1, &x.map(cat, u, t1)?)? == cat.compose(g2, &x.map(cat, u, t2)?)?)
}

/// A pro-isomorphism witnessed by maps both ways.
pub struct IsoCertificate<C: ModelCategory> {
    pub forward: ProMap<C>,
    pub backward: ProMap<C>,
}

impl<C: ModelCategory> Clone for IsoCertificate<C> {
    fn clone(&self) -> Self {
        IsoCertificate { forward: self.forward.clone(), backward: self.backward.clone() }
    }
}

impl<C: ModelCategory> fmt::Debug for IsoCertificate<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IsoCertificate").field("forward", &self.forward).field("backward", &self.backward).finish()
    }
}

impl<C: ModelCategory> IsoCertificate<C> {
    pub fn identity(cat: &C, x: &ProObject<C>) -> Self {
        let id = ProMap::identity(cat, x);
        IsoCertificate { forward: id.clone(), backward: id }
    }

    /// Both composites are identities.
    pub fn verify(&self, cat: &C) -> Result<bool> {
        let (f, g) = (&self.forward, &self.backward);
        if f.target != g.source || g.target != f.source {
            return Ok(false);
        }
        let gf = ProMap::compose(cat, g, f)?;
        let fg = ProMap::compose(cat, f, g)?;
        Ok(gf.equals(cat, &ProMap::identity(cat, &f.source))? && fg.equals(cat, &ProMap::identity(cat, &f.target))?)
    }

    pub fn inverted(&self) -> Self {
        IsoCertificate { forward: self.backward.clone(), backward: self.forward.clone() }
    }
}

/// Outcome of a pro-isomorphism test.
#[derive(Debug)]
pub enum ProIsoVerdict<C: ModelCategory> {
    Iso(IsoCertificate<C>),
    /// The component between the maxima has no inverse.
    NotIso(String),
}

/// Decides whether `f` is a pro-isomorphism. Because both indices have a
/// maximum (or stable level), this holds exactly when the component
/// between the maxima is a base isomorphism.
pub fn is_pro_iso<C: ModelCategory>(cat: &C, f: &ProMap<C>) -> Result<ProIsoVerdict<C>> {
    let fm = f.at_max(cat)?;
    match cat.inverse(&fm) {
        Some(inv) => {
            let backward = ProMap::from_max(cat, f.target.clone(), f.source.clone(), inv)?;
            let cert = IsoCertificate { forward: f.clone(), backward };
            if !cert.verify(cat)? {
                return Err(Error::internal("inverse between maxima does not invert"));
            }
            Ok(ProIsoVerdict::Iso(cert))
        }
        None => Ok(ProIsoVerdict::NotIso(format!(
            "component {} -> {} is not invertible",
            f.source.level_name(f.source.top()),
            f.target.level_name(f.target.top())
        ))),
    }
}

/// The pro-hom set, one representative per class.
#[derive(Debug)]
pub struct HomSet<C: ModelCategory> {
    pub classes: Vec<ProMap<C>>,
    /// For ω targets: the number of classes over the first `d` levels, for
    /// `d = 1..=depth`.
    pub counts: Vec<usize>,
    /// For ω targets: the first depth from which the count never changes.
    pub stable_depth: Option<usize>,
    pub depth: usize,
}

/// Enumerates `Hom(X, Y)`. The base hom set between the maxima must have at
/// most `cap` elements.
pub fn hom_pro<C: ModelCategory>(cat: &C, x: &ProObject<C>, y: &ProObject<C>, depth: usize, cap: usize) -> Result<HomSet<C>> {
    let (m, n) = (x.top(), y.top());
    let base = cat
        .enumerate_hom(x.value(m), y.value(n), cap)
        .ok_or_else(|| Error::Unsupported(format!("base hom set exceeds {cap} elements")))?;
    let classes = base.into_iter().map(|g| ProMap::from_max(cat, x.clone(), y.clone(), g)).collect::<Result<Vec<_>>>()?;
    let mut counts = Vec::new();
    let mut stable_depth = None;
    if y.is_omega() {
        let levels = depth.max(n + 1);
        let mut sizes = Vec::with_capacity(levels);
        let mut bijective = Vec::with_capacity(levels);
        let mut prev: Option<Vec<C::Map>> = None;
        for k in 0..levels {
            let hk = cat
                .enumerate_hom(x.value(m), y.value(k), cap)
                .ok_or_else(|| Error::Unsupported(format!("base hom set exceeds {cap} elements")))?;
            if let Some(p) = &prev {
                let bond = y.map(cat, k, k - 1)?;
                let mut images = hk.iter().map(|h| cat.compose(&bond, h)).collect::<Result<Vec<_>>>()?;
                images.sort_by_key(|m| format!("{m:?}"));
                images.dedup();
                bijective.push(images.len() == hk.len() && hk.len() == p.len());
            }
            sizes.push(hk.len());
            prev = Some(hk);
        }
        counts = sizes.iter().take(depth).copied().collect();
        let last_change = bijective.iter().rposition(|&b| !b).map_or(0, |i| i + 1);
        stable_depth = Some(last_change + 1);
    }
    Ok(HomSet { classes, counts, stable_depth, depth })
}

/// A level representative of a pro-map with certificates relating it to the
/// original source and target.
#[derive(Debug)]
pub struct Levelization<C: ModelCategory> {
    pub map: ProMap<C>,
    pub source_iso: IsoCertificate<C>,
    pub target_iso: IsoCertificate<C>,
    pub reindex: Option<CofinalMap>,
}

/// Rewrites `f` as a level map. Finite general maps collapse onto the
/// one-point index; ω maps are reindexed along
/// `τ(n) = max(n, t(0), ..., t(n))`.
pub fn levelize<C: ModelCategory>(cat: &C, f: &ProMap<C>, depth: usize) -> Result<Levelization<C>> {
    let (x, y) = (f.source(), f.target());
    if f.is_level() {
        return Ok(Levelization {
            map: f.clone(),
            source_iso: IsoCertificate::identity(cat, x),
            target_iso: IsoCertificate::identity(cat, y),
            reindex: None,
        });
    }
    if !x.is_omega() && !y.is_omega() {
        let (m, n) = (x.top(), y.top());
        let cx = ProObject::constant(cat, x.value(m).clone())?;
        let cy = ProObject::constant(cat, y.value(n).clone())?;
        let map = ProMap::level(cat, cx.clone(), cy.clone(), vec![f.at_max(cat)?])?;
        let collapse = |cz: &ProObject<C>, z: &ProObject<C>| -> Result<IsoCertificate<C>> {
            let top = z.top();
            let forward = ProMap::general(cat, cz.clone(), z.clone(), z.levels().map(|s| Ok((0, z.map(cat, top, s)?))).collect::<Result<_>>()?)?;
            let backward = ProMap::general(cat, z.clone(), cz.clone(), vec![(top, cat.identity(z.value(top)))])?;
            Ok(IsoCertificate { forward, backward })
        };
        let source_iso = collapse(&cx, x)?;
        let target_iso = collapse(&cy, y)?;
        let reindex = Some(CofinalMap::Finite { from: Arc::new(FinitePoset::point()), to: y.poset()?.clone(), map: vec![n] });
        return Ok(Levelization { map, source_iso, target_iso, reindex });
    }
    if !(x.is_omega() && y.is_omega()) {
        return Err(Error::Unsupported("levelization between a finite and an ω index".into()));
    }
    let len = f.stored().max(x.size()).max(y.size());
    let mut tau = Vec::with_capacity(len);
    let mut run = 0;
    for s in 0..len {
        run = run.max(s).max(f.component(s).0);
        tau.push(run);
    }
    let need = tau.last().copied().unwrap_or(0) + 1;
    if need > depth.max(len) {
        return Err(Error::DepthExhausted { depth, detail: format!("reindexing reaches level {}", need - 1) });
    }
    let values: Vec<C::Obj> = tau.iter().map(|&t| x.value(t).clone()).collect();
    let bonds = (0..len - 1).map(|s| x.map(cat, tau[s + 1], tau[s])).collect::<Result<Vec<_>>>()?;
    let xr = ProObject::omega(cat, values, bonds)?;
    let comps = (0..len)
        .map(|s| {
            let (t, g) = f.component(s);
            cat.compose(&g, &x.map(cat, tau[s], t)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let map = ProMap::level(cat, xr.clone(), y.clone(), comps)?;
    let forward = ProMap::general(cat, xr.clone(), x.clone(), (0..len).map(|s| Ok((s, x.map(cat, tau[s], s)?))).collect::<Result<_>>()?)?;
    let backward = ProMap::general(cat, x.clone(), xr.clone(), (0..len).map(|s| (tau[s], cat.identity(x.value(tau[s])))).collect())?;
    Ok(Levelization {
        map,
        source_iso: IsoCertificate { forward, backward },
        target_iso: IsoCertificate::identity(cat, y),
        reindex: Some(CofinalMap::Omega { values: tau.iter().map(|&t| t as u64).collect() }),
    })
}

/// A finite diagram of pro-objects over one shared finite index, with level
/// maps as arrows.
pub struct ProDiagram<C: ModelCategory> {
    pub objects: Vec<ProObject<C>>,
    pub arrows: Vec<(usize, usize, ProMap<C>)>,
}

/// A limit or colimit computed levelwise, with its legs as level maps.
pub struct ProCone<C: ModelCategory> {
    pub apex: ProObject<C>,
    pub legs: Vec<ProMap<C>>,
    /// The base cone at each level.
    pub cones: Vec<Cone<C>>,
}

fn level_diagram<C: ModelCategory>(cat: &C, d: &ProDiagram<C>, s: usize) -> Result<Diagram<C>> {
    let mut out = Diagram::new();
    for x in &d.objects {
        out.add_object(x.value(s).clone());
    }
    for (a, b, f) in &d.arrows {
        let comps = f.level_components().ok_or_else(|| Error::pre("levelwise limits need level maps"))?;
        out.add_arrow(*a, *b, comps[s].clone());
    }
    out.validate(cat)?;
    Ok(out)
}

fn shared_poset<C: ModelCategory>(d: &ProDiagram<C>) -> Result<Arc<FinitePoset>> {
    let first = d.objects.first().ok_or_else(|| Error::pre("empty diagram"))?;
    let p = first.poset()?.clone();
    if d.objects.iter().any(|x| x.poset().map(|q| q != &p).unwrap_or(true)) {
        return Err(Error::pre("levelwise limits need one shared finite index"));
    }
    Ok(p)
}

fn levelwise<C: ModelCategory>(cat: &C, d: &ProDiagram<C>, is_limit: bool) -> Result<ProCone<C>> {
    let p = shared_poset(d)?;
    let cones: Vec<(Diagram<C>, Cone<C>)> = (0..p.len())
        .map(|s| {
            let ds = level_diagram(cat, d, s)?;
            let c = if is_limit { cat.limit(&ds)? } else { cat.colimit(&ds)? };
            Ok((ds, c))
        })
        .collect::<Result<_>>()?;
    let values = cones.iter().map(|(_, c)| c.apex.clone()).collect();
    let apex = ProObject::from_fn(cat, p.clone(), values, |t, s| {
        let (_, ct) = &cones[t];
        let (_, cs) = &cones[s];
        let legs = d
            .objects
            .iter()
            .enumerate()
            .map(|(k, x)| {
                if is_limit {
                    cat.compose(&x.map(cat, t, s)?, &ct.legs[k])
                } else {
                    cat.compose(&cs.legs[k], &x.map(cat, t, s)?)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if is_limit {
            cat.limit_factor(cs, &ct.apex, &legs)
        } else {
            cat.colimit_factor(ct, &cs.apex, &legs)
        }
    })?;
    let legs = d
        .objects
        .iter()
        .enumerate()
        .map(|(k, x)| {
            let comps = cones.iter().map(|(_, c)| c.legs[k].clone()).collect();
            if is_limit {
                ProMap::level(cat, apex.clone(), x.clone(), comps)
            } else {
                ProMap::level(cat, x.clone(), apex.clone(), comps)
            }
        })
        .collect::<Result<_>>()?;
    Ok(ProCone { apex, legs, cones: cones.into_iter().map(|(_, c)| c).collect() })
}

/// Levelwise limit of a diagram of level maps over one finite index.
pub fn pro_limit_levelwise<C: ModelCategory>(cat: &C, d: &ProDiagram<C>) -> Result<ProCone<C>> {
    levelwise(cat, d, true)
}

/// Levelwise colimit of a diagram of level maps over one finite index.
pub fn pro_colimit_levelwise<C: ModelCategory>(cat: &C, d: &ProDiagram<C>) -> Result<ProCone<C>> {
    levelwise(cat, d, false)
}

/// The embedding `c: C -> Pro(C)`.
pub fn constant_embed<C: ModelCategory>(cat: &C, x: &C::Obj) -> Result<ProObject<C>> {
    ProObject::constant(cat, x.clone())
}

/// The limit functor, right adjoint to [`constant_embed`]: the value at the
/// maximum, or at the stable level of a tower.
pub fn lim_functor<C: ModelCategory>(x: &ProObject<C>) -> C::Obj {
    x.value(x.top()).clone()
}

/// Pulls a pro-map `c(B) -> Y` back to the base map `B -> lim Y`.
pub fn adjunct<C: ModelCategory>(cat: &C, f: &ProMap<C>) -> Result<C::Map> {
    f.at_max(cat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{FinMap, FinSet, SetBij};

    fn set(names: &[&str]) -> FinSet {
        FinSet::new(names.iter().copied()).unwrap()
    }

    fn fmap(s: &FinSet, t: &FinSet, pairs: &[(&str, &str)]) -> FinMap {
        FinMap::from_pairs(s, t, pairs.iter().copied()).unwrap()
    }

    fn chain2() -> Arc<FinitePoset> {
        Arc::new(FinitePoset::chain(2))
    }

    #[test]
    fn collapse_is_not_a_pro_iso() {
        let cat = SetBij;
        let (ab, x, u, y) = (set(&["a", "b"]), set(&["x"]), set(&["u"]), set(&["y"]));
        let xo = ProObject::finite(&cat, chain2(), vec![x.clone(), ab.clone()], vec![(1, 0, fmap(&ab, &x, &[("a", "x"), ("b", "x")]))]).unwrap();
        let yo = ProObject::finite(&cat, chain2(), vec![y.clone(), u.clone()], vec![(1, 0, fmap(&u, &y, &[("u", "y")]))]).unwrap();
        let f = ProMap::level(&cat, xo, yo, vec![fmap(&x, &y, &[("x", "y")]), fmap(&ab, &u, &[("a", "u"), ("b", "u")])]).unwrap();
        assert!(matches!(is_pro_iso(&cat, &f).unwrap(), ProIsoVerdict::NotIso(_)));
    }

    #[test]
    fn broken_functoriality_is_named() {
        let cat = SetBij;
        let p = Arc::new(FinitePoset::chain(3));
        let (a, b) = (set(&["p", "q"]), set(&["p", "q"]));
        let swap = fmap(&a, &b, &[("p", "q"), ("q", "p")]);
        let id = fmap(&a, &b, &[("p", "p"), ("q", "q")]);
        let err = ProObject::finite(&cat, p, vec![a.clone(), a.clone(), a.clone()], vec![(1, 0, id.clone()), (2, 1, id), (2, 0, swap)])
            .unwrap_err();
        assert!(matches!(err, Error::NotFunctorial { ref from, ref to, .. } if from == "2" && to == "0"));
    }

    #[test]
    fn identity_tower_hom_stabilizes_at_one() {
        let cat = SetBij;
        let tower = ProObject::omega(&cat, vec![set(&["0", "1"])], vec![]).unwrap();
        let point = ProObject::constant(&cat, set(&["*"])).unwrap();
        let h = hom_pro(&cat, &point, &tower, 16, 1 << 12).unwrap();
        assert_eq!(h.classes.len(), 2);
        assert_eq!(h.stable_depth, Some(1));
    }

    #[test]
    fn levelize_general_map_collapses_to_point() {
        let cat = SetBij;
        let (ab, x) = (set(&["a", "b"]), set(&["x"]));
        let xo = ProObject::finite(&cat, chain2(), vec![x.clone(), ab.clone()], vec![(1, 0, fmap(&ab, &x, &[("a", "x"), ("b", "x")]))]).unwrap();
        let g = fmap(&ab, &ab, &[("a", "b"), ("b", "a")]);
        let f = ProMap::from_max(&cat, xo.clone(), xo.clone(), g).unwrap();
        let l = levelize(&cat, &f, 16).unwrap();
        assert!(l.map.is_level());
        assert!(l.source_iso.verify(&cat).unwrap());
        assert!(l.target_iso.verify(&cat).unwrap());
        assert_eq!(l.map.source().size(), 1);
    }

    #[test]
    fn omega_levelize_reindexes() {
        let cat = SetBij;
        let s = |n: usize| FinSet::range(n);
        let bond = |a: usize, b: usize| FinMap::new(s(a), s(b), vec![0; a]).unwrap();
        let x = ProObject::omega(&cat, vec![s(1), s(2), s(2)], vec![bond(2, 1), cat.identity(&s(2))]).unwrap();
        let comps = vec![(2, bond(2, 1)), (2, cat.identity(&s(2))), (2, cat.identity(&s(2)))];
        let f = ProMap::general(&cat, x.clone(), x.clone(), comps).unwrap();
        let l = levelize(&cat, &f, 16).unwrap();
        assert!(l.map.is_level());
        assert!(l.source_iso.verify(&cat).unwrap());
    }

    #[test]
    fn non_natural_level_map_is_rejected() {
        let cat = SetBij;
        let two = set(&["p", "q"]);
        let id = cat.identity(&two);
        let swap = fmap(&two, &two, &[("p", "q"), ("q", "p")]);
        let x = ProObject::finite(&cat, chain2(), vec![two.clone(), two.clone()], vec![(1, 0, id.clone())]).unwrap();
        let err = ProMap::level(&cat, x.clone(), x, vec![id, swap]).unwrap_err();
        assert!(matches!(err, Error::NotNatural { .. }));
    }
}
