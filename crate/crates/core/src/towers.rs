//! Finite towers of base changes of constant maps, the cocell presentation
//! of a special (acyclic) fibration, tower limits, and the `c ⊣ lim` check.
//!
//! A tower is stored as its base `Z_0` plus one attaching record per
//! successor stage: the level `s`, the base map `g: X_s -> Match_s` and the
//! declared class of `g`. Every stage is rebuilt from exactly that data, so
//! building and replaying share one code path ([`grow`]).

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::base::{Cone, Diagram, MapClass, ModelCategory};
use crate::error::{Error, Result};
use crate::index::FinitePoset;
use crate::pro::{hom_pro, lim_functor, IsoCertificate, ProMap, ProObject};
use crate::strict::{detect_special, matching_map};

/// One successor stage: `Z_{β+1} = Z_β ×_{c(Match_s)} c(X_s)` along `c(g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attaching<M> {
    pub level: usize,
    pub map: M,
    pub class: MapClass,
}

/// A stage `Z_β`, living on the cofinal up-set of levels dominating every
/// level attached so far.
pub struct Stage<C: ModelCategory> {
    /// Positions in the base index, increasing.
    pub support: Vec<usize>,
    pub object: ProObject<C>,
    /// Per support element `u`: `Z_{β,u} -> Y_u`.
    pub to_base: Vec<C::Map>,
    /// Per attached level `t`, per support element: `Z_{β,u} -> X_t`.
    pub to_attached: BTreeMap<usize, Vec<C::Map>>,
}

impl<C: ModelCategory> Clone for Stage<C> {
    fn clone(&self) -> Self {
        Stage {
            support: self.support.clone(),
            object: self.object.clone(),
            to_base: self.to_base.clone(),
            to_attached: self.to_attached.clone(),
        }
    }
}

/// A finite tower with its attaching data and every rebuilt stage.
pub struct Tower<C: ModelCategory> {
    pub base: ProObject<C>,
    pub attaching: Vec<Attaching<C::Map>>,
    pub stages: Vec<Stage<C>>,
    /// `Z_{β+1} -> Z_β` restricted to the support of `Z_{β+1}`.
    pub connecting: Vec<ProMap<C>>,
    /// Per successor stage, the comparison maps `Z_{β,u} -> Match_s`.
    pub comparisons: Vec<Vec<C::Map>>,
    /// The map presented, when built from one.
    pub presents: Option<ProMap<C>>,
}

/// The attached data recovered during a replay: the objects `X_t`, their
/// structure maps and the components `f_t`.
struct Recovered<C: ModelCategory> {
    values: BTreeMap<usize, C::Obj>,
    bonds: BTreeMap<(usize, usize), C::Map>,
    comps: BTreeMap<usize, C::Map>,
}

fn matching_limit<C: ModelCategory>(cat: &C, y: &ProObject<C>, rec: &Recovered<C>, s: usize, preds: &[usize]) -> Result<Option<(Diagram<C>, Cone<C>)>> {
    if preds.is_empty() {
        return Ok(None);
    }
    let mut d = Diagram::new();
    for &t in preds {
        d.add_object(rec.values[&t].clone());
        d.add_object(y.value(t).clone());
    }
    let last = d.add_object(y.value(s).clone());
    for (k, &t) in preds.iter().enumerate() {
        for (k2, &t2) in preds.iter().enumerate() {
            if t2 != t && y.le(t2, t) {
                d.add_arrow(2 * k, 2 * k2, rec.bonds[&(t, t2)].clone());
                d.add_arrow(2 * k + 1, 2 * k2 + 1, y.map(cat, t, t2)?);
            }
        }
        d.add_arrow(2 * k, 2 * k + 1, rec.comps[&t].clone());
        d.add_arrow(last, 2 * k + 1, y.map(cat, s, t)?);
    }
    let cone = cat.limit(&d)?;
    Ok(Some((d, cone)))
}

/// Rebuilds every stage from `Z_0` and the attaching records, checking the
/// class of each attaching map and that it lands in the matching object
/// recomputed from the earlier records.
pub fn grow<C: ModelCategory>(cat: &C, base: &ProObject<C>, attaching: &[Attaching<C::Map>]) -> Result<Tower<C>> {
    let poset = base.poset()?.clone();
    let n = poset.len();
    let support: Vec<usize> = (0..n).collect();
    let first = Stage {
        support: support.clone(),
        object: base.clone(),
        to_base: support.iter().map(|&u| cat.identity(base.value(u))).collect(),
        to_attached: BTreeMap::new(),
    };
    let mut stages = vec![first];
    let mut connecting = Vec::new();
    let mut comparisons = Vec::new();
    let mut rec = Recovered { values: BTreeMap::new(), bonds: BTreeMap::new(), comps: BTreeMap::new() };
    for (beta, att) in attaching.iter().enumerate() {
        let s = att.level;
        if s >= n || rec.values.contains_key(&s) {
            return Err(Error::MalformedDiagram(format!("stage {beta} attaches an unknown or repeated level")));
        }
        let preds = poset.predecessors(s);
        if let Some(&t) = preds.iter().find(|t| !rec.values.contains_key(t)) {
            return Err(Error::MalformedDiagram(format!(
                "stage {beta} attaches {} before its predecessor {}",
                poset.name(s),
                poset.name(t)
            )));
        }
        cat.validate_map(&att.map)?;
        if !cat.classify(&att.map)?.satisfies(att.class) {
            return Err(Error::pre(format!("attaching map at level {} is not in class {}", poset.name(s), att.class)));
        }
        let lim = matching_limit(cat, base, &rec, s, &preds)?;
        let g = &att.map;
        let lands = match &lim {
            Some((_, cone)) => cat.target(g) == &cone.apex,
            None => cat.target(g) == base.value(s),
        };
        if !lands {
            return Err(Error::pre(format!("attaching map at level {} does not land in the matching object", poset.name(s))));
        }
        let xs = cat.source(g).clone();
        match &lim {
            Some((_, cone)) => {
                for (k, &t) in preds.iter().enumerate() {
                    rec.bonds.insert((s, t), cat.compose(&cone.legs[2 * k], g)?);
                }
                rec.comps.insert(s, cat.compose(&cone.legs[2 * preds.len()], g)?);
            }
            None => {
                rec.comps.insert(s, g.clone());
            }
        }
        rec.values.insert(s, xs.clone());
        let prev = stages.last().expect("stage zero exists").clone();
        let keep: Vec<usize> = (0..prev.support.len()).filter(|&k| poset.le(s, prev.support[k])).collect();
        let mut objs = Vec::with_capacity(keep.len());
        let mut cones = Vec::with_capacity(keep.len());
        let mut comps_c = Vec::with_capacity(keep.len());
        for &k in &keep {
            let u = prev.support[k];
            let zu = prev.object.value(k).clone();
            let to_ys = cat.compose(&base.map(cat, u, s)?, &prev.to_base[k])?;
            let c = match &lim {
                Some((_, cone)) => {
                    let mut legs = Vec::new();
                    for &t in &preds {
                        let px = prev.to_attached[&t][k].clone();
                        legs.push(px.clone());
                        legs.push(cat.compose(&rec.comps[&t], &px)?);
                    }
                    legs.push(to_ys);
                    cat.limit_factor(cone, &zu, &legs)?
                }
                None => to_ys,
            };
            let sq = Diagram::pullback(c.clone(), g.clone(), cat);
            let pb = cat.limit(&sq)?;
            objs.push(pb.apex.clone());
            cones.push(pb);
            comps_c.push(c);
        }
        let new_support: Vec<usize> = keep.iter().map(|&k| prev.support[k]).collect();
        let sub = Arc::new(poset.restrict(&new_support)?);
        let object = ProObject::from_fn(cat, sub.clone(), objs, |a, b| {
            let (ka, kb) = (keep[a], keep[b]);
            let down = cat.compose(&prev.object.map(cat, ka, kb)?, &cones[a].legs[0])?;
            let xleg = cones[a].legs[1].clone();
            let base_leg = cat.compose(&comps_c[b], &down)?;
            cat.limit_factor(&cones[b], cat.source(&down), &[down.clone(), xleg, base_leg])
        })?;
        let restricted = prev.object.restrict(cat, &keep)?;
        let conn = ProMap::level(cat, object.clone(), restricted, cones.iter().map(|c| c.legs[0].clone()).collect())?;
        let to_base = keep.iter().zip(&cones).map(|(&k, c)| cat.compose(&prev.to_base[k], &c.legs[0])).collect::<Result<Vec<_>>>()?;
        let mut to_attached = BTreeMap::new();
        for (t, legs) in &prev.to_attached {
            let v = keep.iter().zip(&cones).map(|(&k, c)| cat.compose(&legs[k], &c.legs[0])).collect::<Result<Vec<_>>>()?;
            to_attached.insert(*t, v);
        }
        to_attached.insert(s, cones.iter().map(|c| c.legs[1].clone()).collect());
        stages.push(Stage { support: new_support, object, to_base, to_attached });
        connecting.push(conn);
        comparisons.push(comps_c);
    }
    Ok(Tower { base: base.clone(), attaching: attaching.to_vec(), stages, connecting, comparisons, presents: None })
}

/// Presents a level map whose matching maps all lie in `class` as a tower
/// of base changes of constant maps, attaching levels in linear-extension
/// order.
pub fn build_cocell_tower<C: ModelCategory>(cat: &C, f: &ProMap<C>, class: MapClass) -> Result<Tower<C>> {
    let report = detect_special(cat, f, class)?;
    if let Some(t) = report.first_failure {
        return Err(Error::pre(format!(
            "matching map at level {} is not in class {class}",
            f.source().level_name(t)
        )));
    }
    let poset = f.source().poset()?.clone();
    let attaching = poset
        .linear_extension()
        .order()
        .iter()
        .map(|&s| Ok(Attaching { level: s, map: matching_map(cat, f, s)?.map, class }))
        .collect::<Result<Vec<_>>>()?;
    let mut tower = grow(cat, f.target(), &attaching)?;
    tower.presents = Some(f.clone());
    Ok(tower)
}

/// The limit of a finite tower with its projection to `Z_0`, and when the
/// tower presents a map `f: X -> Y`, a certificate `lim ≅ X` with
/// `projection ∘ forward = f`.
pub struct TowerLimit<C: ModelCategory> {
    pub object: ProObject<C>,
    pub projection: ProMap<C>,
    pub iso: Option<IsoCertificate<C>>,
}

pub fn tower_limit<C: ModelCategory>(cat: &C, tower: &Tower<C>) -> Result<TowerLimit<C>> {
    let last = tower.stages.last().expect("stage zero exists");
    let base = &tower.base;
    let object = last.object.clone();
    let comps = base
        .levels()
        .map(|s| {
            let k = (0..last.support.len()).find(|&k| base.le(s, last.support[k])).ok_or_else(|| Error::internal("support is not cofinal"))?;
            Ok((k, cat.compose(&base.map(cat, last.support[k], s)?, &last.to_base[k])?))
        })
        .collect::<Result<Vec<_>>>()?;
    let projection = ProMap::general(cat, object.clone(), base.clone(), comps)?;
    let iso = match &tower.presents {
        None => None,
        Some(f) => Some(limit_iso(cat, tower, f, &projection)?),
    };
    Ok(TowerLimit { object, projection, iso })
}

fn limit_iso<C: ModelCategory>(cat: &C, tower: &Tower<C>, f: &ProMap<C>, projection: &ProMap<C>) -> Result<IsoCertificate<C>> {
    let x = f.source();
    let poset = x.poset()?;
    if tower.attaching.len() != poset.len() {
        return Err(Error::pre("the tower does not attach every level"));
    }
    let last = tower.stages.last().expect("stage zero exists");
    let m = poset.max();
    let km = last.support.iter().position(|&u| u == m).ok_or_else(|| Error::internal("maximum left the support"))?;
    let fm = f.level_components().ok_or_else(|| Error::pre("the presented map must be a level map"))?[m].clone();
    let mut into = fm;
    for (beta, att) in tower.attaching.iter().enumerate() {
        let stage = &tower.stages[beta + 1];
        let k = stage.support.iter().position(|&u| u == m).ok_or_else(|| Error::internal("maximum left the support"))?;
        let sq = Diagram::pullback(tower.comparisons[beta][k].clone(), att.map.clone(), cat);
        let cone = cat.limit(&sq)?;
        if &cone.apex != stage.object.value(k) {
            return Err(Error::internal("stage differs from its recomputed pullback"));
        }
        let xleg = x.map(cat, m, att.level)?;
        let base_leg = cat.compose(&tower.comparisons[beta][k], &into)?;
        into = cat.limit_factor(&cone, x.value(m), &[into, xleg, base_leg])?;
    }
    let forward = ProMap::general(cat, x.clone(), last.object.clone(), vec![(m, into)])?;
    let back = x.levels().map(|s| (km, last.to_attached[&s][km].clone())).collect();
    let backward = ProMap::general(cat, last.object.clone(), x.clone(), back)?;
    let cert = IsoCertificate { forward, backward };
    if !cert.verify(cat)? {
        return Err(Error::internal("tower limit is not isomorphic to the source"));
    }
    if !ProMap::compose(cat, projection, &cert.forward)?.equals(cat, f)? {
        return Err(Error::internal("projection does not recover the presented map"));
    }
    Ok(cert)
}

/// The limit of an ω-tower of constant pro-objects `c(V_n)` along base maps
/// `V_{n+1} -> V_n`: the pro-object `n ↦ V_n`.
pub fn omega_constant_limit<C: ModelCategory>(cat: &C, values: Vec<C::Obj>, bonds: Vec<C::Map>) -> Result<ProObject<C>> {
    ProObject::omega(cat, values, bonds)
}

/// Outcome of the `c ⊣ lim` check between `c(X)` and `Y`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct AdjunctionReport {
    pub pro_side: usize,
    pub base_side: usize,
    /// `to_base[k]` is the base map matched to pro-map class `k`.
    pub to_base: Vec<usize>,
    pub to_pro: Vec<usize>,
    pub inverse: bool,
    pub natural: bool,
    pub naturality_checks: usize,
    pub stable_depth: Option<usize>,
}

impl AdjunctionReport {
    pub fn holds(&self) -> bool {
        self.inverse && self.natural && self.pro_side == self.base_side
    }
}

/// Builds both assignments between `Hom(c X, Y)` and `Hom(X, lim Y)` and
/// spot-checks naturality against endomorphisms of `X` and `Y`.
pub fn adjunction_check<C: ModelCategory>(cat: &C, x: &C::Obj, y: &ProObject<C>, depth: usize, cap: usize) -> Result<AdjunctionReport> {
    let cx = ProObject::constant(cat, x.clone())?;
    let hom = hom_pro(cat, &cx, y, depth, cap)?;
    let ly = lim_functor(y);
    let base = cat.enumerate_hom(x, &ly, cap).ok_or_else(|| Error::Unsupported(format!("base hom set exceeds {cap} elements")))?;
    let to_base = hom
        .classes
        .iter()
        .map(|a| {
            let g = a.at_max(cat)?;
            base.iter().position(|b| b == &g).ok_or_else(|| Error::internal("adjunct missing from the base hom set"))
        })
        .collect::<Result<Vec<_>>>()?;
    let to_pro = base
        .iter()
        .map(|g| {
            let a = ProMap::from_max(cat, cx.clone(), y.clone(), g.clone())?;
            for (k, c) in hom.classes.iter().enumerate() {
                if c.equals(cat, &a)? {
                    return Ok(k);
                }
            }
            Err(Error::internal("transpose missing from the pro-hom set"))
        })
        .collect::<Result<Vec<_>>>()?;
    let inverse = to_base.len() == to_pro.len()
        && to_base.iter().enumerate().all(|(k, &b)| to_pro[b] == k)
        && to_pro.iter().enumerate().all(|(b, &k)| to_base[k] == b);
    let ends_x = cat.enumerate_hom(x, x, 8).unwrap_or_else(|| vec![cat.identity(x)]);
    let mut ends_y = vec![ProMap::identity(cat, y)];
    if let Ok(h) = hom_pro(cat, y, y, depth, 8) {
        ends_y.extend(h.classes);
    }
    let mut natural = true;
    let mut checks = 0;
    for u in ends_x.iter().take(4) {
        let cu = ProMap::level(cat, cx.clone(), cx.clone(), vec![u.clone()])?;
        for v in ends_y.iter().take(4) {
            let lv = v.at_max(cat)?;
            for (k, a) in hom.classes.iter().enumerate() {
                let moved = ProMap::compose_all(cat, &[&cu, a, v])?;
                let lhs = moved.at_max(cat)?;
                let rhs = cat.compose_all(&[u, &base[to_base[k]], &lv])?;
                natural &= lhs == rhs;
                checks += 1;
            }
        }
    }
    Ok(AdjunctionReport {
        pro_side: hom.classes.len(),
        base_side: base.len(),
        to_base,
        to_pro,
        inverse,
        natural,
        naturality_checks: checks,
        stable_depth: hom.stable_depth,
    })
}

/// The restriction of a poset's positions used by a stage, by name.
pub fn support_names(poset: &FinitePoset, support: &[usize]) -> Vec<String> {
    support.iter().map(|&u| poset.name(u).to_string()).collect()
}
