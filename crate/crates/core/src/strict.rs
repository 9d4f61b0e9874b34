//! The strict model structure: relative matching maps, special fibrations,
//! strict factorizations, the inductive lift, the factorization of
//! pro-isomorphisms through a chain quotient, and the constructions built on
//! it (zigzags, two out of three, retracts, properness).

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::base::{is_cone, Cone, Diagram, FactorMode, Factorization, MapClass, MapClasses, ModelCategory, Square};
use crate::error::{Error, Result};
use crate::index::FinitePoset;
use crate::pro::{is_pro_iso, pro_colimit_levelwise, pro_limit_levelwise, IsoCertificate, ProDiagram, ProIsoVerdict, ProMap, ProObject};

/// Inverse witnesses `h_ts: Y_t -> X_s`, keyed by `(t, s)` with `t > s`.
pub type Witnesses<M> = BTreeMap<(usize, usize), M>;

fn level_parts<C: ModelCategory>(f: &ProMap<C>) -> Result<(&[C::Map], Arc<FinitePoset>)> {
    let comps = f.level_components().ok_or_else(|| Error::pre("a level presentation is required"))?;
    let poset = f.source().poset()?.clone();
    Ok((comps, poset))
}

/// The limit of `U_t, Y_t (t < s)` and `Y_s`, with arrows the structure maps
/// of `U` and `Y`, the components `U_t -> Y_t`, and `Y_s -> Y_t`. For the
/// family `U = X` this is the matching object of `X -> Y` at `s`.
struct Relative<C: ModelCategory> {
    preds: Vec<usize>,
    diagram: Diagram<C>,
    cone: Option<Cone<C>>,
    top: C::Obj,
}

impl<C: ModelCategory> Relative<C> {
    fn build(
        cat: &C,
        s: usize,
        preds: Vec<usize>,
        u_obj: &dyn Fn(usize) -> C::Obj,
        u_map: &dyn Fn(usize, usize) -> Result<C::Map>,
        comp: &dyn Fn(usize) -> C::Map,
        y: &ProObject<C>,
    ) -> Result<Self> {
        let mut d = Diagram::new();
        for &t in &preds {
            d.add_object(u_obj(t));
            d.add_object(y.value(t).clone());
        }
        let last = d.add_object(y.value(s).clone());
        for (k, &t) in preds.iter().enumerate() {
            for (k2, &t2) in preds.iter().enumerate() {
                if y.le(t2, t) && t2 != t {
                    d.add_arrow(2 * k, 2 * k2, u_map(t, t2)?);
                    d.add_arrow(2 * k + 1, 2 * k2 + 1, y.map(cat, t, t2)?);
                }
            }
            d.add_arrow(2 * k, 2 * k + 1, comp(t));
            d.add_arrow(last, 2 * k + 1, y.map(cat, s, t)?);
        }
        let cone = if preds.is_empty() { None } else { Some(cat.limit(&d)?) };
        Ok(Relative { preds, diagram: d, cone, top: y.value(s).clone() })
    }

    fn apex(&self) -> &C::Obj {
        self.cone.as_ref().map_or(&self.top, |c| &c.apex)
    }

    fn leg_u(&self, k: usize) -> C::Map {
        self.cone.as_ref().expect("non-minimal level").legs[2 * k].clone()
    }

    fn leg_top(&self, cat: &C) -> C::Map {
        match &self.cone {
            Some(c) => c.legs[2 * self.preds.len()].clone(),
            None => cat.identity(&self.top),
        }
    }

    /// Factors a family of legs through the limit; `None` when the legs do
    /// not form a cone.
    fn factor(&self, cat: &C, apex: &C::Obj, u_legs: &[C::Map], top: C::Map) -> Result<Option<C::Map>> {
        let Some(cone) = &self.cone else { return Ok(Some(top)) };
        let mut legs = Vec::with_capacity(self.diagram.objects.len());
        for (k, u) in u_legs.iter().enumerate() {
            legs.push(u.clone());
            let comp = self
                .diagram
                .arrows
                .iter()
                .find(|a| a.from == 2 * k && a.to == 2 * k + 1)
                .ok_or_else(|| Error::internal("component arrow missing"))?;
            legs.push(cat.compose(&comp.map, u)?);
        }
        legs.push(top);
        let test = Cone { apex: apex.clone(), legs };
        if !is_cone(cat, &self.diagram, &test)? {
            return Ok(None);
        }
        cat.limit_factor(cone, apex, &test.legs).map(Some)
    }
}

/// The relative limit at level `s` for a source known only below `s`.
pub struct PartialMatching<C: ModelCategory> {
    pub preds: Vec<usize>,
    pub object: C::Obj,
    /// Legs to `X_t` for each predecessor, in `preds` order.
    pub to_source: Vec<C::Map>,
    /// Leg to `Y_s`.
    pub to_target: C::Map,
}

/// Builds `lim(X_t, Y_t (t < s); Y_s)` from the values, structure maps and
/// components of a partially defined level map into `y`. A map into it is
/// exactly the data extending the level map to `s`.
pub fn partial_matching<C: ModelCategory>(
    cat: &C,
    y: &ProObject<C>,
    s: usize,
    x_value: &dyn Fn(usize) -> C::Obj,
    x_map: &dyn Fn(usize, usize) -> Result<C::Map>,
    comp: &dyn Fn(usize) -> C::Map,
) -> Result<PartialMatching<C>> {
    let preds = y.poset()?.predecessors(s);
    let rel = Relative::build(cat, s, preds.clone(), x_value, x_map, comp, y)?;
    let to_source = (0..preds.len()).map(|k| rel.leg_u(k)).collect();
    Ok(PartialMatching { object: rel.apex().clone(), to_target: rel.leg_top(cat), to_source, preds })
}

/// The relative matching object of a level map at one level.
pub struct MatchingData<C: ModelCategory> {
    pub level: usize,
    pub object: C::Obj,
    pub map: C::Map,
}

/// `M_t f: X_t -> X_t^lim x_{Y^lim} Y_t` for a level map over a finite index.
pub fn matching_map<C: ModelCategory>(cat: &C, f: &ProMap<C>, t: usize) -> Result<MatchingData<C>> {
    let (comps, poset) = level_parts(f)?;
    let (x, y) = (f.source(), f.target());
    if t >= poset.len() {
        return Err(Error::pre(format!("unknown level {t}")));
    }
    let preds = poset.predecessors(t);
    let rel = Relative::build(cat, t, preds.clone(), &|s| x.value(s).clone(), &|a, b| x.map(cat, a, b), &|s| comps[s].clone(), y)?;
    let legs = preds.iter().map(|&s| x.map(cat, t, s)).collect::<Result<Vec<_>>>()?;
    let map = rel
        .factor(cat, x.value(t), &legs, comps[t].clone())?
        .ok_or_else(|| Error::internal("matching cone does not commute"))?;
    Ok(MatchingData { level: t, object: rel.apex().clone(), map })
}

/// Per-level classification of the matching maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialReport {
    pub class: MapClass,
    /// `(level, classes of M_t f)` in linear-extension order.
    pub levels: Vec<(usize, MapClasses)>,
    pub first_failure: Option<usize>,
}

impl SpecialReport {
    pub fn is_special(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Checks that every relative matching map lies in `class` (fib or
/// acyclic-fib). All levels are classified; the first failure is recorded.
pub fn detect_special<C: ModelCategory>(cat: &C, f: &ProMap<C>, class: MapClass) -> Result<SpecialReport> {
    if !matches!(class, MapClass::Fib | MapClass::AcyclicFib) {
        return Err(Error::pre("special maps are fibrations or acyclic fibrations"));
    }
    let (_, poset) = level_parts(f)?;
    let mut levels = Vec::with_capacity(poset.len());
    let mut first_failure = None;
    for &t in poset.linear_extension().order() {
        let classes = cat.classify(&matching_map(cat, f, t)?.map)?;
        if first_failure.is_none() && !classes.satisfies(class) {
            first_failure = Some(t);
        }
        levels.push((t, classes));
    }
    Ok(SpecialReport { class, levels, first_failure })
}

/// The first level (in linear-extension order) whose component is not in
/// `class`.
pub fn levelwise_failure<C: ModelCategory>(cat: &C, f: &ProMap<C>, class: MapClass) -> Result<Option<usize>> {
    let (comps, poset) = level_parts(f)?;
    for &t in poset.linear_extension().order() {
        if !cat.classify(&comps[t])?.satisfies(class) {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Strict factorization modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StrictMode {
    /// levelwise cofibration, then special acyclic fibration
    L1,
    /// levelwise acyclic cofibration, then special fibration
    L2,
}

impl StrictMode {
    pub fn base(self) -> FactorMode {
        match self {
            StrictMode::L1 => FactorMode::CofThenAcyclicFib,
            StrictMode::L2 => FactorMode::AcyclicCofThenFib,
        }
    }

    pub fn left_class(self) -> MapClass {
        self.base().left_class()
    }

    pub fn special_class(self) -> MapClass {
        self.base().right_class()
    }
}

#[derive(Debug)]
pub struct StrictFactorization<C: ModelCategory> {
    pub mode: StrictMode,
    pub middle: ProObject<C>,
    pub left: ProMap<C>,
    pub right: ProMap<C>,
    pub special: SpecialReport,
}

/// Factors a level map over a finite index as `p ∘ i`, processing levels in
/// linear-extension order.
pub fn factor_strict<C: ModelCategory>(cat: &C, f: &ProMap<C>, mode: StrictMode) -> Result<StrictFactorization<C>> {
    let (comps, poset) = level_parts(f)?;
    let (x, y) = (f.source(), f.target());
    let n = poset.len();
    let mut z_vals: Vec<Option<C::Obj>> = vec![None; n];
    let mut z_maps: BTreeMap<(usize, usize), C::Map> = BTreeMap::new();
    let mut i_comps: Vec<Option<C::Map>> = vec![None; n];
    let mut p_comps: Vec<Option<C::Map>> = vec![None; n];
    for &s in poset.linear_extension().order() {
        let preds = poset.predecessors(s);
        let rel = {
            let z_obj = |t: usize| z_vals[t].clone().expect("earlier level");
            let z_map = |a: usize, b: usize| z_maps.get(&(a, b)).cloned().ok_or_else(|| Error::internal("structure map missing"));
            let p = |t: usize| p_comps[t].clone().expect("earlier level");
            Relative::build(cat, s, preds.clone(), &z_obj, &z_map, &p, y)?
        };
        let legs = preds
            .iter()
            .map(|&t| cat.compose(i_comps[t].as_ref().expect("earlier level"), &x.map(cat, s, t)?))
            .collect::<Result<Vec<_>>>()?;
        let c = rel
            .factor(cat, x.value(s), &legs, comps[s].clone())?
            .ok_or_else(|| Error::internal("comparison cone does not commute"))?;
        let fac = cat.factor(&c, mode.base())?;
        for (k, &t) in preds.iter().enumerate() {
            z_maps.insert((s, t), cat.compose(&rel.leg_u(k), &fac.right)?);
        }
        p_comps[s] = Some(cat.compose(&rel.leg_top(cat), &fac.right)?);
        i_comps[s] = Some(fac.left);
        z_vals[s] = Some(fac.middle);
    }
    let z_vals: Vec<C::Obj> = z_vals.into_iter().map(|v| v.expect("all levels built")).collect();
    let z = ProObject::from_fn(cat, poset.clone(), z_vals, |t, s| {
        z_maps.get(&(t, s)).cloned().ok_or_else(|| Error::internal("structure map missing"))
    })?;
    let left = ProMap::level(cat, x.clone(), z.clone(), i_comps.into_iter().map(|m| m.expect("built")).collect())?;
    let right = ProMap::level(cat, z.clone(), y.clone(), p_comps.into_iter().map(|m| m.expect("built")).collect())?;
    if !ProMap::compose(cat, &right, &left)?.equals(cat, f)? {
        return Err(Error::internal("strict factorization does not compose to the input"));
    }
    if let Some(t) = levelwise_failure(cat, &left, mode.left_class())? {
        return Err(Error::internal(format!("left factor fails its class at level {}", poset.name(t))));
    }
    let special = detect_special(cat, &right, mode.special_class())?;
    if let Some(t) = special.first_failure {
        return Err(Error::internal(format!("right factor is not special at level {}", poset.name(t))));
    }
    Ok(StrictFactorization { mode, middle: z, left, right, special })
}

/// A square of pro-maps `bottom ∘ left = right ∘ top`.
#[derive(Clone, Debug)]
pub struct ProSquare<C: ModelCategory> {
    pub left: ProMap<C>,
    pub right: ProMap<C>,
    pub top: ProMap<C>,
    pub bottom: ProMap<C>,
}

/// Names the first target level at which the two composites of a square of
/// pro-maps disagree.
pub fn square_defect<C: ModelCategory>(cat: &C, sq: &ProSquare<C>) -> Result<Option<String>> {
    if sq.left.target() != sq.bottom.source() || sq.top.target() != sq.right.source() || sq.left.source() != sq.top.source()
    {
        return Err(Error::MalformedDiagram("square maps do not share their corners".into()));
    }
    if sq.right.target() != sq.bottom.target() {
        return Err(Error::MalformedDiagram("square maps do not share their corners".into()));
    }
    let a = ProMap::compose(cat, &sq.right, &sq.top)?;
    let b = ProMap::compose(cat, &sq.bottom, &sq.left)?;
    let src = sq.left.source();
    let y = sq.right.target();
    for s in y.levels() {
        let (t1, g1) = a.component(s);
        let (t2, g2) = b.component(s);
        let m = src.top();
        let lhs = cat.compose(&g1, &src.map(cat, m.max(t1), t1)?)?;
        let rhs = cat.compose(&g2, &src.map(cat, m.max(t2), t2)?)?;
        if lhs != rhs {
            return Ok(Some(y.level_name(s)));
        }
    }
    Ok(None)
}

#[derive(Debug)]
pub struct StrictLift<C: ModelCategory> {
    pub lift: ProMap<C>,
    /// `a(s)` for every level `s` of the target.
    pub reindex: Vec<usize>,
}

/// Solves a lifting problem against a special (acyclic) fibration by
/// induction over the target index.
pub fn lift_strict<C: ModelCategory>(cat: &C, sq: &ProSquare<C>) -> Result<StrictLift<C>> {
    if let Some(level) = square_defect(cat, sq)? {
        return Err(Error::NonCommuting(format!("composites differ at level {level}")));
    }
    let (i_comps, b_poset) = level_parts(&sq.left)?;
    let (p_comps, x_poset) = level_parts(&sq.right)?;
    let i_cof = levelwise_failure(cat, &sq.left, MapClass::Cof)?.is_none();
    let i_acyclic = i_cof && levelwise_failure(cat, &sq.left, MapClass::AcyclicCof)?.is_none();
    let p_fib = detect_special(cat, &sq.right, MapClass::Fib)?;
    let p_acyclic = detect_special(cat, &sq.right, MapClass::AcyclicFib)?;
    if !((i_cof && p_acyclic.is_special()) || (i_acyclic && p_fib.is_special())) {
        return Err(Error::pre(
            "lifting needs a levelwise cofibration against a special acyclic fibration, or a levelwise acyclic cofibration against a special fibration",
        ));
    }
    let (a, b) = (sq.left.source(), sq.left.target());
    let (x, y) = (sq.right.source(), sq.right.target());
    let same_index = b_poset == x_poset;
    let b_order = b_poset.linear_extension();
    let n = x_poset.len();
    let mut av: Vec<Option<usize>> = vec![None; n];
    let mut h: Vec<Option<C::Map>> = vec![None; n];
    for &s in x_poset.linear_extension().order() {
        let preds = x_poset.predecessors(s);
        let rel = Relative::build(cat, s, preds.clone(), &|t| x.value(t).clone(), &|u, v| x.map(cat, u, v), &|t| p_comps[t].clone(), y)?;
        let x_legs = preds.iter().map(|&t| x.map(cat, s, t)).collect::<Result<Vec<_>>>()?;
        let mp = rel.factor(cat, x.value(s), &x_legs, p_comps[s].clone())?.ok_or_else(|| Error::internal("matching cone"))?;
        let (tau, top_s) = sq.top.component(s);
        let (beta, bottom_s) = sq.bottom.component(s);
        let mut found = None;
        for &u in b_order.order() {
            let dominates = b_poset.le(tau, u)
                && b_poset.le(beta, u)
                && (!same_index || b_poset.le(s, u))
                && preds.iter().all(|&t| b_poset.le(av[t].expect("earlier level"), u));
            if !dominates {
                continue;
            }
            let top_u = cat.compose(&top_s, &a.map(cat, u, tau)?)?;
            let legs = preds
                .iter()
                .map(|&t| cat.compose(h[t].as_ref().expect("earlier level"), &b.map(cat, u, av[t].expect("earlier"))?))
                .collect::<Result<Vec<_>>>()?;
            let Some(bottom_u) = rel.factor(cat, b.value(u), &legs, cat.compose(&bottom_s, &b.map(cat, u, beta)?)?)? else {
                continue;
            };
            let level_sq = Square { left: i_comps[u].clone(), right: mp.clone(), top: top_u, bottom: bottom_u };
            if !cat.square_commutes(&level_sq)? {
                continue;
            }
            let lift = cat
                .solve_lift(&level_sq)?
                .ok_or_else(|| Error::internal(format!("no base lift at level {}", x_poset.name(s))))?;
            found = Some((u, lift));
            break;
        }
        let (u, lift) = found.ok_or_else(|| Error::internal(format!("no admissible a({})", x_poset.name(s))))?;
        av[s] = Some(u);
        h[s] = Some(lift);
    }
    let reindex: Vec<usize> = av.into_iter().map(|v| v.expect("built")).collect();
    let comps = reindex.iter().zip(h).map(|(&u, m)| (u, m.expect("built"))).collect();
    let lift = ProMap::general(cat, b.clone(), x.clone(), comps)?;
    if !ProMap::compose(cat, &lift, &sq.left)?.equals(cat, &sq.top)? || !ProMap::compose(cat, &sq.right, &lift)?.equals(cat, &sq.bottom)? {
        return Err(Error::internal("lift does not fill the square"));
    }
    Ok(StrictLift { lift, reindex })
}

/// Checks the inverse witnesses of a level map: every `t > s` has
/// `h_ts ∘ f_t = X(t→s)` and `f_s ∘ h_ts = Y(t→s)`, and the component at the
/// maximum is invertible. Returns that inverse.
pub fn check_witnesses<C: ModelCategory>(cat: &C, f: &ProMap<C>, w: &Witnesses<C::Map>) -> Result<C::Map> {
    let (comps, poset) = level_parts(f)?;
    let (x, y) = (f.source(), f.target());
    for (t, s) in poset.strict_pairs() {
        let h = w.get(&(t, s)).ok_or_else(|| Error::MissingWitness { t: poset.name(t).into(), s: poset.name(s).into() })?;
        if cat.source(h) != y.value(t) || cat.target(h) != x.value(s) {
            return Err(Error::MalformedMap(format!("witness h({}, {}) has the wrong endpoints", poset.name(t), poset.name(s))));
        }
        if cat.compose(h, &comps[t])? != x.map(cat, t, s)? {
            return Err(Error::NonCommuting(format!("h({0}, {1}) ∘ f_{0} differs from X({0} -> {1})", poset.name(t), poset.name(s))));
        }
        if cat.compose(&comps[s], h)? != y.map(cat, t, s)? {
            return Err(Error::NonCommuting(format!("f_{1} ∘ h({0}, {1}) differs from Y({0} -> {1})", poset.name(t), poset.name(s))));
        }
    }
    let m = poset.max();
    cat.inverse(&comps[m]).ok_or_else(|| {
        Error::pre(format!("witnesses do not represent an inverse: the component at the maximum {} is not invertible", poset.name(m)))
    })
}

#[derive(Debug)]
pub struct ProIsoFactorization<C: ModelCategory> {
    pub middle: ProObject<C>,
    pub left: ProMap<C>,
    pub right: ProMap<C>,
    pub left_iso: IsoCertificate<C>,
    pub right_iso: IsoCertificate<C>,
    /// Distinct realized composites per related pair; at most one in a
    /// posetal quotient.
    pub chain_maps: usize,
}

/// Factors a pro-isomorphism presented levelwise, with inverse witnesses,
/// into a levelwise `mode.left` map followed by a levelwise `mode.right`
/// map, both pro-isomorphisms. Structure maps of the middle object are the
/// realized chain composites `i_s ∘ X(u→s) ∘ h_tu ∘ p_t`.
pub fn pro_factor_iso<C: ModelCategory>(cat: &C, f: &ProMap<C>, w: &Witnesses<C::Map>, mode: FactorMode) -> Result<ProIsoFactorization<C>> {
    let inv_top = check_witnesses(cat, f, w)?;
    let (comps, poset) = level_parts(f)?;
    let (x, y) = (f.source(), f.target());
    let top = poset.max();
    // At the maximum the component is invertible; only the trivial
    // factorization keeps both factors pro-isomorphisms.
    let facs = comps
        .iter()
        .enumerate()
        .map(|(s, c)| {
            if s == top {
                Ok(Factorization { left: cat.identity(x.value(s)), right: c.clone(), middle: x.value(s).clone(), mode })
            } else {
                cat.factor(c, mode)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut structure: BTreeMap<(usize, usize), C::Map> = BTreeMap::new();
    let mut chain_maps = 0;
    for (t, s) in poset.strict_pairs() {
        let mut realized: Vec<C::Map> = Vec::new();
        for u in (0..poset.len()).filter(|&u| poset.le(s, u) && poset.lt(u, t)) {
            let m = cat.compose_all(&[&facs[t].right, &w[&(t, u)], &x.map(cat, u, s)?, &facs[s].left])?;
            if !realized.contains(&m) {
                realized.push(m);
            }
        }
        chain_maps = chain_maps.max(realized.len());
        if realized.len() > 1 {
            return Err(Error::NonPosetal(format!(
                "{} distinct composites realize {} -> {}",
                realized.len(),
                poset.name(t),
                poset.name(s)
            )));
        }
        structure.insert((t, s), realized.pop().ok_or_else(|| Error::internal("related pair without a chain"))?);
    }
    let middle = ProObject::from_fn(cat, poset.clone(), facs.iter().map(|fc| fc.middle.clone()).collect(), |t, s| Ok(structure[&(t, s)].clone()))
        .map_err(|e| match e {
            Error::NotFunctorial { from, to, detail } => Error::NonPosetal(format!("{from} -> {to}: {detail}")),
            other => other,
        })?;
    let left = ProMap::level(cat, x.clone(), middle.clone(), facs.iter().map(|fc| fc.left.clone()).collect())?;
    let right = ProMap::level(cat, middle.clone(), y.clone(), facs.iter().map(|fc| fc.right.clone()).collect())?;
    let m = poset.max();
    let left_back = (0..poset.len())
        .map(|s| {
            let g = if s == m { cat.compose(&inv_top, &facs[m].right)? } else { cat.compose(&w[&(m, s)], &facs[m].right)? };
            Ok((m, g))
        })
        .collect::<Result<Vec<_>>>()?;
    let right_back = (0..poset.len())
        .map(|s| {
            let g = if s == m { cat.compose(&facs[m].left, &inv_top)? } else { cat.compose(&facs[s].left, &w[&(m, s)])? };
            Ok((m, g))
        })
        .collect::<Result<Vec<_>>>()?;
    let left_iso = IsoCertificate { forward: left.clone(), backward: ProMap::general(cat, middle.clone(), x.clone(), left_back)? };
    let right_iso = IsoCertificate { forward: right.clone(), backward: ProMap::general(cat, y.clone(), middle.clone(), right_back)? };
    if !left_iso.verify(cat)? || !right_iso.verify(cat)? {
        return Err(Error::internal("diagonal maps do not invert the factors"));
    }
    if !ProMap::compose(cat, &right, &left)?.equals(cat, f)? {
        return Err(Error::internal("factors do not compose to the input"));
    }
    Ok(ProIsoFactorization { middle, left, right, left_iso, right_iso, chain_maps })
}

/// Levelwise pullback of `f` and `g` along their shared target; cone legs
/// are ordered `[source f, source g, target]`.
struct LevelSquare<C: ModelCategory> {
    apex: ProObject<C>,
    first: ProMap<C>,
    second: ProMap<C>,
    cones: Vec<Cone<C>>,
}

impl<C: ModelCategory> LevelSquare<C> {
    fn pullback(cat: &C, f: &ProMap<C>, g: &ProMap<C>) -> Result<Self> {
        let d = ProDiagram {
            objects: vec![f.source().clone(), g.source().clone(), f.target().clone()],
            arrows: vec![(0, 2, f.clone()), (1, 2, g.clone())],
        };
        let mut c = pro_limit_levelwise(cat, &d)?;
        let second = c.legs.swap_remove(1);
        let first = c.legs.swap_remove(0);
        Ok(LevelSquare { apex: c.apex, first, second, cones: c.cones })
    }

    /// Levelwise pushout; cocone legs are ordered `[target f, target g, source]`.
    fn pushout(cat: &C, f: &ProMap<C>, g: &ProMap<C>) -> Result<Self> {
        let d = ProDiagram {
            objects: vec![f.target().clone(), g.target().clone(), f.source().clone()],
            arrows: vec![(2, 0, f.clone()), (2, 1, g.clone())],
        };
        let mut c = pro_colimit_levelwise(cat, &d)?;
        let second = c.legs.swap_remove(1);
        let first = c.legs.swap_remove(0);
        Ok(LevelSquare { apex: c.apex, first, second, cones: c.cones })
    }

    /// The map into the pullback at level `s` with legs `l`, `r` and `base`
    /// into the shared target.
    fn factor_into_limit(&self, cat: &C, s: usize, l: C::Map, r: C::Map, base: C::Map) -> Result<C::Map> {
        let apex = cat.source(&l).clone();
        cat.limit_factor(&self.cones[s], &apex, &[l, r, base])
    }

    fn out_of_colimit(&self, cat: &C, s: usize, l: C::Map, r: C::Map, base: C::Map) -> Result<C::Map> {
        let apex = cat.target(&l).clone();
        cat.colimit_factor(&self.cones[s], &apex, &[l, r, base])
    }
}

fn require_levelwise<C: ModelCategory>(cat: &C, f: &ProMap<C>, class: MapClass, what: &str) -> Result<()> {
    if let Some(t) = levelwise_failure(cat, f, class)? {
        return Err(Error::pre(format!("{what} is not levelwise {class} at level {}", f.source().level_name(t))));
    }
    Ok(())
}

fn certify_iso<C: ModelCategory>(cat: &C, f: &ProMap<C>) -> Result<IsoCertificate<C>> {
    match is_pro_iso(cat, f)? {
        ProIsoVerdict::Iso(c) => Ok(c),
        ProIsoVerdict::NotIso(why) => Err(Error::internal(format!("expected a pro-isomorphism: {why}"))),
    }
}

#[derive(Debug)]
pub struct ZigzagWe<C: ModelCategory> {
    pub map: ProMap<C>,
    /// `B -> X`
    pub source_iso: IsoCertificate<C>,
    /// `W -> C`
    pub target_iso: IsoCertificate<C>,
}

/// Turns `X -f-> Y <-h- Z -g-> W` (f, g levelwise weak equivalences, h a
/// pro-isomorphism with witnesses) into one levelwise weak equivalence
/// `X ×_Y A -> A ⊔_Z W`.
pub fn compose_zigzag_we<C: ModelCategory>(cat: &C, f: &ProMap<C>, h: &ProMap<C>, g: &ProMap<C>, w: &Witnesses<C::Map>) -> Result<ZigzagWe<C>> {
    require_levelwise(cat, f, MapClass::We, "f")?;
    require_levelwise(cat, g, MapClass::We, "g")?;
    if f.target() != h.target() || h.source() != g.source() {
        return Err(Error::MalformedDiagram("zigzag maps do not share their ends".into()));
    }
    let fac = pro_factor_iso(cat, h, w, FactorMode::CofThenAcyclicFib)?;
    let b = LevelSquare::pullback(cat, f, &fac.right)?;
    let c = LevelSquare::pushout(cat, &fac.left, g)?;
    let map = ProMap::compose(cat, &c.first, &b.second)?;
    require_levelwise(cat, &map, MapClass::We, "the zigzag composite").map_err(|e| Error::internal(e.to_string()))?;
    Ok(ZigzagWe { map, source_iso: certify_iso(cat, &b.first)?, target_iso: certify_iso(cat, &c.second)? })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CancelSide {
    Left,
    Right,
}

#[derive(Debug)]
pub struct Cancellation<C: ModelCategory> {
    pub map: ProMap<C>,
    /// Left: `B -> Y`. Right: `Y -> B`.
    pub iso: IsoCertificate<C>,
}

/// Two out of three for strict weak equivalences.
///
/// Left: `sq.top = f: X -> Y`, `sq.left = a: X -> W` (we), `sq.right =
/// g: Y -> Z` (we), `sq.bottom = k: W -> Z` (pro-iso with witnesses);
/// returns `X -> A ×_Z Y`.
///
/// Right: `sq.top = k: X -> W` (pro-iso with witnesses), `sq.left =
/// f: X -> Y` (we), `sq.right = b: W -> Z` (we), `sq.bottom = g: Y -> Z`;
/// returns `A ⊔_X Y -> Z`.
pub fn two_of_three<C: ModelCategory>(cat: &C, sq: &ProSquare<C>, w: &Witnesses<C::Map>, side: CancelSide) -> Result<Cancellation<C>> {
    if let Some(level) = square_defect(cat, sq)? {
        return Err(Error::NonCommuting(format!("composites differ at level {level}")));
    }
    match side {
        CancelSide::Left => {
            require_levelwise(cat, &sq.left, MapClass::We, "a")?;
            require_levelwise(cat, &sq.right, MapClass::We, "g")?;
            let fac = pro_factor_iso(cat, &sq.bottom, w, FactorMode::AcyclicCofThenFib)?;
            let b = LevelSquare::pullback(cat, &fac.right, &sq.right)?;
            let ia = ProMap::compose(cat, &fac.left, &sq.left)?;
            let x = sq.top.source();
            let comps = x
                .levels()
                .map(|s| {
                    let l = ia.component(s).1;
                    let r = sq.top.component(s).1;
                    let base = cat.compose(&sq.right.component(s).1, &r)?;
                    b.factor_into_limit(cat, s, l, r, base)
                })
                .collect::<Result<Vec<_>>>()?;
            let map = ProMap::level(cat, x.clone(), b.apex.clone(), comps)?;
            require_levelwise(cat, &map, MapClass::We, "X -> B").map_err(|e| Error::internal(e.to_string()))?;
            Ok(Cancellation { map, iso: certify_iso(cat, &b.second)? })
        }
        CancelSide::Right => {
            require_levelwise(cat, &sq.left, MapClass::We, "f")?;
            require_levelwise(cat, &sq.right, MapClass::We, "b")?;
            let fac = pro_factor_iso(cat, &sq.top, w, FactorMode::CofThenAcyclicFib)?;
            let b = LevelSquare::pushout(cat, &fac.left, &sq.left)?;
            let bp = ProMap::compose(cat, &sq.right, &fac.right)?;
            let z = sq.bottom.target();
            let comps = b
                .apex
                .levels()
                .map(|s| {
                    let l = bp.component(s).1;
                    let r = sq.bottom.component(s).1;
                    let base = cat.compose(&r, &sq.left.component(s).1)?;
                    b.out_of_colimit(cat, s, l, r, base)
                })
                .collect::<Result<Vec<_>>>()?;
            let map = ProMap::level(cat, b.apex.clone(), z.clone(), comps)?;
            require_levelwise(cat, &map, MapClass::We, "B -> Z").map_err(|e| Error::internal(e.to_string()))?;
            Ok(Cancellation { map, iso: certify_iso(cat, &b.second)? })
        }
    }
}

/// A commuting 3×2 grid exhibiting `f` (outer columns) as a retract of `g`
/// (middle column): `top_back ∘ top_in = id`, `bottom_back ∘ bottom_in = id`.
#[derive(Debug)]
pub struct RetractDiagram<C: ModelCategory> {
    pub f: ProMap<C>,
    pub g: ProMap<C>,
    pub top_in: ProMap<C>,
    pub top_back: ProMap<C>,
    pub bottom_in: ProMap<C>,
    pub bottom_back: ProMap<C>,
}

impl<C: ModelCategory> RetractDiagram<C> {
    pub fn verify(&self, cat: &C) -> Result<bool> {
        let id_top = ProMap::identity(cat, self.f.source());
        let id_bottom = ProMap::identity(cat, self.f.target());
        Ok(ProMap::compose(cat, &self.top_back, &self.top_in)?.equals(cat, &id_top)?
            && ProMap::compose(cat, &self.bottom_back, &self.bottom_in)?.equals(cat, &id_bottom)?
            && ProMap::compose(cat, &self.g, &self.top_in)?.equals(cat, &ProMap::compose(cat, &self.bottom_in, &self.f)?)?
            && ProMap::compose(cat, &self.f, &self.top_back)?.equals(cat, &ProMap::compose(cat, &self.bottom_back, &self.g)?)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RetractKind {
    AcyclicCof,
    AcyclicFib,
}

/// Exhibits a map as a retract of a good factor.
///
/// Acyclic cofibrations: `we` and `good` present the same map, levelwise a
/// weak equivalence and levelwise a cofibration; the result shows `good` as
/// a retract of the levelwise acyclic cofibration from the strict
/// factorization of `we`. Acyclic fibrations: `good` is a special fibration
/// presentation; the result shows it as a retract of the special acyclic
/// fibration from the strict factorization of `we`.
pub fn retract_exhibit<C: ModelCategory>(cat: &C, we: &ProMap<C>, good: &ProMap<C>, kind: RetractKind) -> Result<RetractDiagram<C>> {
    if we.source() != good.source() || we.target() != good.target() || !we.equals(cat, good)? {
        return Err(Error::pre("the two presentations do not represent the same map"));
    }
    require_levelwise(cat, we, MapClass::We, "the weak-equivalence presentation")?;
    let fac = factor_strict(cat, we, StrictMode::L1)?;
    match kind {
        RetractKind::AcyclicCof => {
            require_levelwise(cat, good, MapClass::Cof, "the cofibration presentation")?;
            let sq = ProSquare {
                left: good.clone(),
                right: fac.right.clone(),
                top: fac.left.clone(),
                bottom: ProMap::identity(cat, good.target()),
            };
            let h = lift_strict(cat, &sq)?.lift;
            let id = ProMap::identity(cat, good.source());
            Ok(RetractDiagram {
                f: good.clone(),
                g: fac.left.clone(),
                top_in: id.clone(),
                top_back: id,
                bottom_in: h,
                bottom_back: fac.right,
            })
        }
        RetractKind::AcyclicFib => {
            if let Some(t) = detect_special(cat, good, MapClass::Fib)?.first_failure {
                return Err(Error::pre(format!("the fibration presentation is not special at level {}", good.source().level_name(t))));
            }
            let sq = ProSquare {
                left: fac.left.clone(),
                right: good.clone(),
                top: ProMap::identity(cat, good.source()),
                bottom: fac.right.clone(),
            };
            let r = lift_strict(cat, &sq)?.lift;
            let id = ProMap::identity(cat, good.target());
            Ok(RetractDiagram {
                f: good.clone(),
                g: fac.right.clone(),
                top_in: fac.left,
                top_back: r,
                bottom_in: id.clone(),
                bottom_back: id,
            })
        }
    }
}

#[derive(Debug)]
pub struct ProperPullback<C: ModelCategory> {
    /// `Z ×_Y X -> W ×_Y X`
    pub map: ProMap<C>,
    /// `W ×_Y X -> X`
    pub glue: IsoCertificate<C>,
}

/// For `Z -f-> W -g-> Y <-p- X` with `f` levelwise we, `p` levelwise fib and
/// `g` a pro-isomorphism with witnesses, the levelwise pullback of `f`.
pub fn proper_pullback<C: ModelCategory>(cat: &C, p: &ProMap<C>, f: &ProMap<C>, g: &ProMap<C>, w: &Witnesses<C::Map>) -> Result<ProperPullback<C>> {
    require_levelwise(cat, p, MapClass::Fib, "p")?;
    require_levelwise(cat, f, MapClass::We, "f")?;
    if f.target() != g.source() || g.target() != p.target() {
        return Err(Error::MalformedDiagram("Z -> W -> Y <- X does not chain".into()));
    }
    let inv_top = check_witnesses(cat, g, w)?;
    let gf = ProMap::compose(cat, g, f)?;
    let pz = LevelSquare::pullback(cat, &gf, p)?;
    let pw = LevelSquare::pullback(cat, g, p)?;
    let comps = pz
        .apex
        .levels()
        .map(|s| {
            let l = cat.compose(&f.component(s).1, &pz.first.component(s).1)?;
            let r = pz.second.component(s).1;
            let base = cat.compose(&p.component(s).1, &r)?;
            pw.factor_into_limit(cat, s, l, r, base)
        })
        .collect::<Result<Vec<_>>>()?;
    let map = ProMap::level(cat, pz.apex.clone(), pw.apex.clone(), comps)?;
    require_levelwise(cat, &map, MapClass::We, "the pulled-back map").map_err(|e| Error::internal(e.to_string()))?;
    let x = p.source();
    let poset = x.poset()?.clone();
    let m = poset.max();
    let back = x
        .levels()
        .map(|s| {
            let pm = p.component(m).1;
            let (to_w, to_x) = if s == m {
                (cat.compose(&inv_top, &pm)?, cat.identity(x.value(m)))
            } else {
                (cat.compose(&w[&(m, s)], &pm)?, x.map(cat, m, s)?)
            };
            let base = cat.compose(&p.component(s).1, &to_x)?;
            Ok((m, pw.factor_into_limit(cat, s, to_w, to_x, base)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let glue = IsoCertificate { forward: pw.second.clone(), backward: ProMap::general(cat, x.clone(), pw.apex.clone(), back)? };
    if !glue.verify(cat)? {
        return Err(Error::internal("witness diagonals do not invert the pulled-back glue map"));
    }
    Ok(ProperPullback { map, glue })
}
