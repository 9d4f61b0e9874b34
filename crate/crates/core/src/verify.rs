//! Certificate verification.
//!
//! This path never calls the constructions it checks. It decodes the
//! recorded input and result, then tests every claim with base-category
//! operations only: composites between maxima, per-level classification,
//! and relative matching maps rebuilt from scratch.

use serde::Serialize;
use serde_json::Value;

use crate::base::{ChainF2, Diagram, FactorMode, MapClass, ModelCategory, SetBij};
use crate::cert::{Certificate, Kind};
use crate::cli::{decode_tower, parse_factor_mode, parse_side, parse_special_class, parse_strict_mode, Instance};
use crate::document::{decode_iso, decode_pro_map, decode_pro_object, decode_square, decode_witnesses, field, level_position};
use crate::error::{Error, Result};
use crate::pro::{IsoCertificate, ProMap, ProObject};
use crate::strict::{CancelSide, StrictMode, Witnesses};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub check: String,
    pub ok: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub kind: &'static str,
    pub certificate: Kind,
    pub instance: String,
    pub ok: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.ok)
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn claim(&mut self, name: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) {
        let witness = (!ok).then(witness);
        self.0.push(Check { check: name.into(), ok, witness });
    }

    fn claim_result(&mut self, name: impl Into<String>, r: Result<bool>) {
        match r {
            Ok(ok) => self.claim(name, ok, || "claim is false".into()),
            Err(e) => self.claim(name, false, || e.to_string()),
        }
    }
}

/// `f` between the maxima, `X_M -> Y_N`.
fn top<C: ModelCategory>(cat: &C, f: &ProMap<C>) -> Result<C::Map> {
    let (x, y) = (f.source(), f.target());
    let (t, g) = f.component(y.top());
    cat.compose(&g, &x.map(cat, x.top().max(t), t)?)
}

/// `g ∘ f` between the maxima.
fn top_composite<C: ModelCategory>(cat: &C, g: &ProMap<C>, f: &ProMap<C>) -> Result<C::Map> {
    if g.source() != f.target() {
        return Err(Error::NotComposable("middle objects differ".into()));
    }
    let (u, gn) = g.component(g.target().top());
    let (t, fu) = f.component(u);
    let x = f.source();
    cat.compose_all(&[&x.map(cat, x.top().max(t), t)?, &fu, &gn])
}

fn iso_holds<C: ModelCategory>(cat: &C, c: &IsoCertificate<C>) -> Result<bool> {
    let (f, g) = (&c.forward, &c.backward);
    if f.source() != g.target() || f.target() != g.source() {
        return Ok(false);
    }
    let there = top_composite(cat, g, f)? == cat.identity(f.source().value(f.source().top()));
    let back = top_composite(cat, f, g)? == cat.identity(f.target().value(f.target().top()));
    Ok(there && back)
}

fn levelwise_failure<C: ModelCategory>(cat: &C, f: &ProMap<C>, class: MapClass) -> Result<Option<String>> {
    let comps = f.level_components().ok_or_else(|| Error::pre("not a level map"))?;
    for (s, c) in comps.iter().enumerate() {
        if !cat.classify(c)?.satisfies(class) {
            return Ok(Some(f.source().level_name(s)));
        }
    }
    Ok(None)
}

/// The relative matching object and map at `t`, rebuilt directly: objects
/// `X_s, Y_s` for each predecessor `s` (interleaved) and `Y_t` last.
fn matching<C: ModelCategory>(cat: &C, f: &ProMap<C>, t: usize) -> Result<(C::Obj, C::Map)> {
    let comps = f.level_components().ok_or_else(|| Error::pre("not a level map"))?;
    let (x, y) = (f.source(), f.target());
    let preds = x.poset()?.predecessors(t);
    if preds.is_empty() {
        return Ok((y.value(t).clone(), comps[t].clone()));
    }
    let mut d = Diagram::new();
    for &s in &preds {
        d.add_object(x.value(s).clone());
        d.add_object(y.value(s).clone());
    }
    let last = d.add_object(y.value(t).clone());
    for (k, &s) in preds.iter().enumerate() {
        for (k2, &s2) in preds.iter().enumerate() {
            if s2 != s && x.le(s2, s) {
                d.add_arrow(2 * k, 2 * k2, x.map(cat, s, s2)?);
                d.add_arrow(2 * k + 1, 2 * k2 + 1, y.map(cat, s, s2)?);
            }
        }
        d.add_arrow(2 * k, 2 * k + 1, comps[s].clone());
        d.add_arrow(last, 2 * k + 1, y.map(cat, t, s)?);
    }
    let lim = cat.limit(&d)?;
    let mut legs = Vec::new();
    for &s in &preds {
        let to_x = x.map(cat, t, s)?;
        legs.push(cat.compose(&comps[s], &to_x)?);
        legs.push(to_x);
        let n = legs.len();
        legs.swap(n - 2, n - 1);
    }
    legs.push(comps[t].clone());
    let m = cat.limit_factor(&lim, x.value(t), &legs)?;
    Ok((lim.apex, m))
}

fn special_failure<C: ModelCategory>(cat: &C, f: &ProMap<C>, class: MapClass) -> Result<Option<String>> {
    for t in f.source().levels() {
        if !cat.classify(&matching(cat, f, t)?.1)?.satisfies(class) {
            return Ok(Some(f.source().level_name(t)));
        }
    }
    Ok(None)
}

fn witnesses_hold<C: ModelCategory>(cat: &C, f: &ProMap<C>, w: &Witnesses<C::Map>) -> Result<Option<String>> {
    let comps = f.level_components().ok_or_else(|| Error::pre("not a level map"))?;
    let (x, y) = (f.source(), f.target());
    let poset = x.poset()?;
    for (t, s) in poset.strict_pairs() {
        let name = format!("h({}, {})", poset.name(t), poset.name(s));
        let Some(h) = w.get(&(t, s)) else { return Ok(Some(format!("{name} missing"))) };
        if cat.compose(h, &comps[t])? != x.map(cat, t, s)? || cat.compose(&comps[s], h)? != y.map(cat, t, s)? {
            return Ok(Some(format!("{name} triangles fail")));
        }
    }
    let m = poset.max();
    if cat.inverse(&comps[m]).is_none() {
        return Ok(Some(format!("component at the maximum {} is not invertible", poset.name(m))));
    }
    Ok(None)
}

fn none_or<T>(r: Result<Option<String>>, checks: &mut Checks, name: &str) -> Option<T> {
    match r {
        Ok(None) => checks.claim(name, true, String::new),
        Ok(Some(w)) => checks.claim(name, false, || w),
        Err(e) => checks.claim(name, false, || e.to_string()),
    }
    None
}

fn class_check<C: ModelCategory>(cat: &C, checks: &mut Checks, f: &ProMap<C>, class: MapClass, what: &str) {
    none_or::<()>(
        levelwise_failure(cat, f, class).map(|o| o.map(|l| format!("level {l}"))),
        checks,
        &format!("{what} is levelwise {class}"),
    );
}

fn iso_check<C: ModelCategory>(cat: &C, checks: &mut Checks, c: &IsoCertificate<C>, what: &str) {
    checks.claim_result(format!("{what} inverts"), iso_holds(cat, c));
}

fn agree_check<C: ModelCategory>(checks: &mut Checks, lhs: Result<C::Map>, rhs: Result<C::Map>, what: &str) {
    match (lhs, rhs) {
        (Ok(a), Ok(b)) => checks.claim(what, a == b, || "maps between the maxima differ".into()),
        (Err(e), _) | (_, Err(e)) => checks.claim(what, false, || e.to_string()),
    }
}

fn result_map<C: Instance>(cat: &C, cert: &Certificate, key: &str) -> Result<ProMap<C>> {
    decode_pro_map(cat, field(&cert.result, key)?)
}

fn input_map<C: Instance>(cat: &C, cert: &Certificate, key: &str) -> Result<ProMap<C>> {
    decode_pro_map(cat, field(&cert.input, key)?)
}

fn opt_str<'a>(v: &'a Value, key: &str) -> Option<&'a str> {
    v.get(key).and_then(Value::as_str)
}

fn verify_on<C: Instance>(cat: &C, cert: &Certificate) -> Result<Vec<Check>> {
    let mut checks = Checks::default();
    let c = &mut checks;
    match cert.kind {
        Kind::Hom => {
            let x = decode_pro_object(cat, field(&cert.input, "source")?)?;
            let y = decode_pro_object(cat, field(&cert.input, "target")?)?;
            let classes = field(&cert.result, "classes")?
                .as_array()
                .ok_or_else(|| Error::MalformedObject("classes must be a list".into()))?
                .iter()
                .map(|v| decode_pro_map(cat, v))
                .collect::<Result<Vec<_>>>()?;
            let count = field(&cert.result, "count")?.as_u64().unwrap_or(u64::MAX) as usize;
            c.claim("count matches the listed classes", count == classes.len(), || format!("{count} vs {}", classes.len()));
            c.claim("classes have the given ends", classes.iter().all(|f| f.source() == &x && f.target() == &y), || "a class has other ends".into());
            let tops = classes.iter().map(|f| top(cat, f)).collect::<Result<Vec<_>>>()?;
            let distinct = (0..tops.len()).all(|i| (0..i).all(|j| tops[i] != tops[j]));
            c.claim("classes are pairwise distinct", distinct, || "two classes agree between the maxima".into());
            let base = cat.enumerate_hom(x.value(x.top()), y.value(y.top()), count + 1);
            c.claim("count equals the base hom set between the maxima", base.as_ref().map(|b| b.len()) == Some(count), || {
                format!("base hom set has {:?} elements", base.as_ref().map(|b| b.len()))
            });
        }
        Kind::Levelize => {
            let f = input_map(cat, cert, "map")?;
            let g = result_map(cat, cert, "map")?;
            let si = decode_iso(cat, field(&cert.result, "source_iso")?)?;
            let ti = decode_iso(cat, field(&cert.result, "target_iso")?)?;
            c.claim("result is a level map", g.is_level(), || "general representation".into());
            iso_check(cat, c, &si, "source certificate");
            iso_check(cat, c, &ti, "target certificate");
            let ends = si.forward.target() == f.source() && ti.forward.target() == f.target() && si.forward.source() == g.source() && ti.forward.source() == g.target();
            c.claim("certificates connect the two maps", ends, || "endpoints differ".into());
            if ends {
                agree_check::<C>(c, top_composite(cat, &f, &si.forward), top_composite(cat, &ti.forward, &g), "square with the certificates commutes");
            }
        }
        Kind::Matching => {
            let f = input_map(cat, cert, "map")?;
            for entry in field(&cert.result, "levels")?.as_array().ok_or_else(|| Error::MalformedObject("levels must be a list".into()))? {
                let name = field(entry, "level")?.as_str().unwrap_or_default().to_string();
                let t = level_position(f.source(), &name)?;
                let object = cat.decode_object(field(entry, "object")?)?;
                let claimed = cat.decode_map(field(entry, "map")?, f.source().value(t), &object)?;
                let (o, m) = matching(cat, &f, t)?;
                c.claim(format!("matching object at level {name}"), o == object, || format!("matching object at level {name} differs"));
                c.claim(format!("matching map at level {name}"), m == claimed, || format!("matching map at level {name} differs"));
            }
        }
        Kind::DetectSpecial => {
            let f = input_map(cat, cert, "map")?;
            let class = parse_special_class(opt_str(&cert.input, "class").unwrap_or("fib"))?;
            let mut first = None;
            let levels = field(&cert.result, "levels")?.as_array().cloned().unwrap_or_default();
            c.claim("every level is reported", levels.len() == f.source().size(), || format!("{} of {} levels", levels.len(), f.source().size()));
            for entry in &levels {
                let name = field(entry, "level")?.as_str().unwrap_or_default().to_string();
                let t = level_position(f.source(), &name)?;
                let got = cat.classify(&matching(cat, &f, t)?.1)?;
                let claimed = (entry.get("we").and_then(Value::as_bool), entry.get("cof").and_then(Value::as_bool), entry.get("fib").and_then(Value::as_bool));
                c.claim(format!("classes at level {name}"), claimed == (Some(got.we), Some(got.cof), Some(got.fib)), || {
                    format!("level {name} is {got:?}")
                });
                if first.is_none() && !got.satisfies(class) {
                    first = Some(name);
                }
            }
            let special = cert.result.get("special").and_then(Value::as_bool);
            c.claim("special flag", special == Some(first.is_none()), || format!("first failing level is {first:?}"));
            let claimed_first = cert.result.get("first_failure").and_then(Value::as_str).map(str::to_string);
            c.claim("first failing level", claimed_first == first, || format!("expected {first:?}"));
        }
        Kind::Factor => {
            let f = input_map(cat, cert, "map")?;
            let mode = parse_strict_mode(opt_str(&cert.input, "mode").unwrap_or("L1"))?;
            let (l, r) = (result_map(cat, cert, "left")?, result_map(cat, cert, "right")?);
            let ends = l.source() == f.source() && r.target() == f.target() && l.target() == r.source();
            c.claim("factors connect the ends of the input", ends, || "endpoints differ".into());
            let (lc, rc, fc) = (l.level_components(), r.level_components(), f.level_components());
            match (lc, rc, fc) {
                (Some(lc), Some(rc), Some(fc)) if ends => {
                    for s in f.source().levels() {
                        let name = f.source().level_name(s);
                        let comp = cat.compose(&rc[s], &lc[s])?;
                        c.claim(format!("right ∘ left at level {name}"), comp == fc[s], || format!("composite differs at level {name}"));
                    }
                }
                _ => c.claim("factors are level maps", false, || "a factor is not a level map".into()),
            }
            let (left_class, special) = match mode {
                StrictMode::L1 => (MapClass::Cof, MapClass::AcyclicFib),
                StrictMode::L2 => (MapClass::AcyclicCof, MapClass::Fib),
            };
            class_check(cat, c, &l, left_class, "left factor");
            none_or::<()>(special_failure(cat, &r, special).map(|o| o.map(|l| format!("matching map at level {l}"))), c, &format!("right factor is special {special}"));
        }
        Kind::Lift => {
            let sq = decode_square(cat, field(&cert.input, "square")?)?;
            let h = result_map(cat, cert, "lift")?;
            agree_check::<C>(c, top_composite(cat, &sq.right, &sq.top), top_composite(cat, &sq.bottom, &sq.left), "square commutes");
            let ends = h.source() == sq.left.target() && h.target() == sq.right.source();
            c.claim("lift runs corner to corner", ends, || "endpoints differ".into());
            if ends {
                agree_check::<C>(c, top_composite(cat, &h, &sq.left), top(cat, &sq.top), "lift ∘ left = top");
                agree_check::<C>(c, top_composite(cat, &sq.right, &h), top(cat, &sq.bottom), "right ∘ lift = bottom");
            }
        }
        Kind::ProFactorIso => {
            let f = input_map(cat, cert, "map")?;
            let w = decode_witnesses(cat, &f, field(&cert.input, "witnesses")?)?;
            let mode = parse_factor_mode(opt_str(&cert.input, "mode").unwrap_or("cof-then-acyclic-fib"))?;
            none_or::<()>(witnesses_hold(cat, &f, &w), c, "witnesses present an inverse");
            let (l, r) = (result_map(cat, cert, "left")?, result_map(cat, cert, "right")?);
            let (lc, rc) = match mode {
                FactorMode::CofThenAcyclicFib => (MapClass::Cof, MapClass::AcyclicFib),
                FactorMode::AcyclicCofThenFib => (MapClass::AcyclicCof, MapClass::Fib),
            };
            class_check(cat, c, &l, lc, "left factor");
            class_check(cat, c, &r, rc, "right factor");
            agree_check::<C>(c, top_composite(cat, &r, &l), top(cat, &f), "right ∘ left = f");
            for (key, fwd) in [("left_iso", &l), ("right_iso", &r)] {
                let iso = decode_iso(cat, field(&cert.result, key)?)?;
                c.claim(format!("{key} starts from its factor"), iso.forward.source() == fwd.source() && iso.forward.target() == fwd.target(), || "endpoints differ".into());
                iso_check(cat, c, &iso, key);
            }
        }
        Kind::ZigzagWe => {
            let (f, g) = (input_map(cat, cert, "f")?, input_map(cat, cert, "g")?);
            let m = result_map(cat, cert, "map")?;
            let si = decode_iso(cat, field(&cert.result, "source_iso")?)?;
            let ti = decode_iso(cat, field(&cert.result, "target_iso")?)?;
            class_check(cat, c, &m, MapClass::We, "composite");
            c.claim("source certificate runs from the new source to X", si.forward.source() == m.source() && si.forward.target() == f.source(), || "endpoints differ".into());
            c.claim("target certificate runs from W to the new target", ti.forward.source() == g.target() && ti.forward.target() == m.target(), || "endpoints differ".into());
            iso_check(cat, c, &si, "source certificate");
            iso_check(cat, c, &ti, "target certificate");
        }
        Kind::TwoOfThree => {
            let sq = decode_square(cat, field(&cert.input, "square")?)?;
            let side = parse_side(opt_str(&cert.input, "side").unwrap_or_default())?;
            let m = result_map(cat, cert, "map")?;
            let iso = decode_iso(cat, field(&cert.result, "iso")?)?;
            agree_check::<C>(c, top_composite(cat, &sq.right, &sq.top), top_composite(cat, &sq.bottom, &sq.left), "square commutes");
            class_check(cat, c, &m, MapClass::We, "cancelled map");
            iso_check(cat, c, &iso, "certificate");
            match side {
                CancelSide::Left => {
                    let ends = m.source() == sq.top.source() && iso.forward.source() == m.target() && iso.forward.target() == sq.top.target();
                    c.claim("certificate continues the cancelled map to Y", ends, || "endpoints differ".into());
                    if ends {
                        agree_check::<C>(c, top_composite(cat, &iso.forward, &m), top(cat, &sq.top), "certificate ∘ map = top");
                    }
                }
                CancelSide::Right => {
                    let ends = m.target() == sq.bottom.target() && iso.forward.source() == sq.bottom.source() && iso.forward.target() == m.source();
                    c.claim("certificate feeds Y into the cancelled map", ends, || "endpoints differ".into());
                    if ends {
                        agree_check::<C>(c, top_composite(cat, &m, &iso.forward), top(cat, &sq.bottom), "map ∘ certificate = bottom");
                    }
                }
            }
        }
        Kind::ProperPullback => {
            let p = input_map(cat, cert, "p")?;
            let m = result_map(cat, cert, "map")?;
            let glue = decode_iso(cat, field(&cert.result, "glue")?)?;
            class_check(cat, c, &m, MapClass::We, "pulled-back map");
            c.claim("glue runs from the pullback to X", glue.forward.source() == m.target() && glue.forward.target() == p.source(), || "endpoints differ".into());
            iso_check(cat, c, &glue, "glue");
        }
        Kind::Cocell => {
            let f = input_map(cat, cert, "map")?;
            let class = parse_special_class(opt_str(&cert.input, "class").unwrap_or("fib"))?;
            let (base, attaching) = decode_tower(cat, field(&cert.result, "tower")?)?;
            c.claim("tower is based at the target", &base == f.target(), || "base differs from the target".into());
            tower_checks(cat, c, &f, class, &attaching)?;
            let lim = field(&cert.result, "limit")?;
            limit_checks(cat, c, &f, lim)?;
        }
        Kind::TowerLimit => {
            if let Some(omega) = cert.input.get("omega") {
                let object = decode_pro_object(cat, field(&cert.result, "object")?)?;
                let values = field(omega, "values")?.as_array().cloned().unwrap_or_default();
                let same = object.is_omega()
                    && object.values().len() == values.len()
                    && values.iter().zip(object.values()).all(|(v, o)| cat.decode_object(v).map(|d| &d == o).unwrap_or(false));
                c.claim("limit has the tower's values", same, || "values differ".into());
            } else {
                let (base, attaching) = decode_tower(cat, field(&cert.input, "tower")?)?;
                match cert.input.get("presents").filter(|p| !p.is_null()) {
                    Some(p) => {
                        let f = decode_pro_map(cat, p)?;
                        c.claim("tower is based at the target", &base == f.target(), || "base differs from the target".into());
                        let class = attaching.first().map(|a| a.class).unwrap_or(MapClass::Fib);
                        tower_checks(cat, c, &f, class, &attaching)?;
                        limit_checks(cat, c, &f, &cert.result)?;
                    }
                    None => {
                        for a in &attaching {
                            c.claim(format!("attaching map at level {} is {}", base.level_name(a.level), a.class), cat.classify(&a.map)?.satisfies(a.class), || {
                                "class fails".into()
                            });
                        }
                        let object: ProObject<C> = decode_pro_object(cat, field(&cert.result, "object")?)?;
                        let proj = result_map(cat, cert, "projection")?;
                        c.claim("projection runs from the limit to the base", proj.source() == &object && proj.target() == &base, || "endpoints differ".into());
                    }
                }
            }
        }
        Kind::Adjunction => {
            let x = cat.decode_object(field(&cert.input, "source")?)?;
            let y = decode_pro_object(cat, field(&cert.input, "target")?)?;
            let pro = cert.result.get("pro_side").and_then(Value::as_u64);
            let base = cert.result.get("base_side").and_then(Value::as_u64);
            let holds = cert.result.get("holds").and_then(Value::as_bool);
            let cap = pro.unwrap_or(0) as usize + 1;
            let n = cat.enumerate_hom(&x, y.value(y.top()), cap).map(|h| h.len() as u64);
            c.claim("base side counts Hom(X, lim Y)", n.is_some() && base == n, || format!("Hom(X, lim Y) has {n:?} elements"));
            c.claim("pro side counts Hom(cX, Y)", n.is_some() && pro == n, || format!("Hom(cX, Y) has {n:?} elements"));
            c.claim("adjunction holds", holds == Some(true), || "the certificate records a failure".into());
        }
        Kind::CheckAxioms => {
            let trials = field(&cert.input, "trials")?.as_u64().unwrap_or(0);
            let reports = field(&cert.result, "reports")?.as_array().cloned().unwrap_or_default();
            let mut all_ok = true;
            for r in &reports {
                let suite = r.get("suite").and_then(Value::as_str).unwrap_or("?");
                let inst = r.get("instance").and_then(Value::as_str).unwrap_or("?");
                let passed = r.get("passed").and_then(Value::as_u64).unwrap_or(0);
                let skipped = r.get("skipped").and_then(Value::as_u64).unwrap_or(0);
                let failed = r.get("failures").and_then(Value::as_array).map_or(0, |f| f.len() as u64);
                all_ok &= failed == 0;
                c.claim(format!("{suite} on {inst} accounts for every trial"), passed + skipped + failed == trials, || {
                    format!("{passed} + {skipped} + {failed} != {trials}")
                });
                c.claim(format!("{suite} on {inst} has no failures"), failed == 0, || format!("{failed} failing trials"));
            }
            c.claim("overall flag", cert.result.get("ok").and_then(Value::as_bool) == Some(all_ok), || "flag disagrees with the reports".into());
        }
    }
    Ok(checks.0)
}

fn tower_checks<C: ModelCategory>(cat: &C, c: &mut Checks, f: &ProMap<C>, class: MapClass, attaching: &[crate::towers::Attaching<C::Map>]) -> Result<()> {
    let x = f.source();
    let poset = x.poset()?;
    let mut seen = vec![false; poset.len()];
    for a in attaching {
        let name = x.level_name(a.level);
        let ordered = poset.predecessors(a.level).iter().all(|&t| seen[t]) && !seen[a.level];
        c.claim(format!("level {name} is attached once, after its predecessors"), ordered, || format!("level {name} out of order"));
        seen[a.level] = true;
        c.claim(format!("attaching map at level {name} is {class}"), a.class == class && cat.classify(&a.map)?.satisfies(class), || {
            format!("attaching map at level {name} is not {class}")
        });
        let (o, m) = matching(cat, f, a.level)?;
        c.claim(format!("attaching map at level {name} is the matching map"), cat.target(&a.map) == &o && a.map == m, || {
            format!("attaching map at level {name} differs from the matching map")
        });
    }
    c.claim("every level is attached", seen.iter().all(|&s| s), || "a level is never attached".into());
    Ok(())
}

fn limit_checks<C: Instance>(cat: &C, c: &mut Checks, f: &ProMap<C>, lim: &Value) -> Result<()> {
    let proj = decode_pro_map(cat, field(lim, "projection")?)?;
    let iso = lim.get("iso").filter(|v| !v.is_null()).map(|v| decode_iso(cat, v)).transpose()?;
    match iso {
        None => c.claim("limit carries an isomorphism to the source", false, || "no certificate".into()),
        Some(iso) => {
            let ends = iso.forward.source() == f.source() && iso.forward.target() == proj.source() && proj.target() == f.target();
            c.claim("limit certificate connects the source and the projection", ends, || "endpoints differ".into());
            iso_check(cat, c, &iso, "limit certificate");
            if ends {
                agree_check::<C>(c, top_composite(cat, &proj, &iso.forward), top(cat, f), "projection ∘ certificate = f");
            }
        }
    }
    Ok(())
}

/// Verifies a certificate. Decoding failures are errors; false claims are
/// reported in the returned checks.
pub fn verify_certificate(cert: &Certificate) -> Result<VerifyReport> {
    let checks = match cert.instance.as_str() {
        "set-bij" => verify_on(&SetBij, cert)?,
        "chain-f2" => verify_on(&ChainF2, cert)?,
        other if cert.kind == Kind::CheckAxioms => {
            let _ = other;
            verify_on(&SetBij, cert)?
        }
        other => return Err(Error::MalformedObject(format!("unknown instance {other}"))),
    };
    Ok(VerifyReport {
        schema: crate::cert::SCHEMA,
        kind: "verification",
        certificate: cert.kind,
        instance: cert.instance.clone(),
        ok: checks.iter().all(|c| c.ok),
        checks,
    })
}
