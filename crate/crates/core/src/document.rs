//! JSON encoding of base objects, base maps, pro-objects, pro-maps,
//! witnesses and squares.
//!
//! Base maps carry no endpoints; their shape comes from the surrounding
//! pro-object. Object keys are sorted on output, so encoding is
//! deterministic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::base::{ChainF2, ChainMap, Complex, FinMap, FinSet, ModelCategory, SetBij};
use crate::error::{Error, Result};
use crate::gf2::Matrix;
use crate::index::{IndexPoset, IndexSpec};
use crate::pro::{IsoCertificate, ProMap, ProObject, Repr};
use crate::strict::{ProSquare, Witnesses};

/// JSON encoding of one base category.
pub trait Codec: ModelCategory {
    fn encode_object(&self, x: &Self::Obj) -> Value;
    fn decode_object(&self, v: &Value) -> Result<Self::Obj>;
    fn encode_map(&self, f: &Self::Map) -> Value;
    fn decode_map(&self, v: &Value, source: &Self::Obj, target: &Self::Obj) -> Result<Self::Map>;
}

fn parse<T: for<'de> Deserialize<'de>>(v: &Value, what: &str) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::MalformedObject(format!("{what}: {e}")))
}

impl Codec for SetBij {
    fn encode_object(&self, x: &FinSet) -> Value {
        json!(x.names())
    }

    fn decode_object(&self, v: &Value) -> Result<FinSet> {
        FinSet::new(parse::<Vec<String>>(v, "a finite set is a list of names")?)
    }

    fn encode_map(&self, f: &FinMap) -> Value {
        let names = f.target().names();
        let pairs: BTreeMap<&str, &str> = f.source().names().iter().zip(f.images()).map(|(a, i)| (a.as_str(), names[i].as_str())).collect();
        json!(pairs)
    }

    fn decode_map(&self, v: &Value, source: &FinSet, target: &FinSet) -> Result<FinMap> {
        let pairs: BTreeMap<String, String> = parse_map(v)?;
        for k in pairs.keys() {
            if source.position(k).is_none() {
                return Err(Error::MalformedMap(format!("{k} is not in the source")));
            }
        }
        FinMap::from_pairs(source, target, pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())))
    }
}

fn parse_map<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::MalformedMap(e.to_string()))
}

fn rows(m: &Matrix) -> Value {
    json!(m.to_rows())
}

fn matrix(v: &Value, shape: (usize, usize), what: &str) -> Result<Matrix> {
    let entries: Vec<Vec<u8>> = parse_map(v)?;
    if shape.0 == 0 && entries.is_empty() {
        return Ok(Matrix::zeros(0, shape.1));
    }
    Matrix::from_rows(shape.0, shape.1, &entries).ok_or_else(|| Error::MalformedMap(format!("{what} is not a {}x{} 0/1 matrix", shape.0, shape.1)))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexDoc {
    lo: i32,
    dims: Vec<usize>,
    differentials: Vec<Value>,
}

impl Codec for ChainF2 {
    fn encode_object(&self, x: &Complex) -> Value {
        let doc = ComplexDoc { lo: x.lo(), dims: x.dims().to_vec(), differentials: x.differentials().iter().map(rows).collect() };
        serde_json::to_value(doc).expect("plain data")
    }

    fn decode_object(&self, v: &Value) -> Result<Complex> {
        let doc: ComplexDoc = parse(v, "a complex is {lo, dims, differentials}")?;
        let diffs = doc
            .differentials
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let shape = (doc.dims.get(k + 1).copied().unwrap_or(0), doc.dims.get(k).copied().unwrap_or(0));
                matrix(m, shape, &format!("differential out of degree {}", doc.lo + k as i32)).map_err(|e| Error::MalformedObject(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Complex::new(doc.lo, doc.dims, diffs)
    }

    fn encode_map(&self, f: &ChainMap) -> Value {
        let (s, t) = (f.source(), f.target());
        let range = match (s.range(), t.range()) {
            (Some(a), Some(b)) => Some((a.0.min(b.0), a.1.max(b.1))),
            (a, b) => a.or(b),
        };
        let mut out = BTreeMap::new();
        if let Some((lo, hi)) = range {
            for n in lo..=hi {
                if s.dim(n) > 0 && t.dim(n) > 0 {
                    out.insert(n, f.at(n).to_rows());
                }
            }
        }
        json!(out)
    }

    fn decode_map(&self, v: &Value, source: &Complex, target: &Complex) -> Result<ChainMap> {
        let given: BTreeMap<i32, Value> = parse_map(v)?;
        let mut comps = BTreeMap::new();
        for (n, m) in &given {
            comps.insert(*n, matrix(m, (target.dim(*n), source.dim(*n)), &format!("component in degree {n}"))?);
        }
        ChainMap::new(source.clone(), target.clone(), |n| comps.get(&n).cloned().unwrap_or_else(|| Matrix::zeros(target.dim(n), source.dim(n))))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrowDoc {
    from: String,
    to: String,
    map: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProObjectDoc {
    index: IndexSpec,
    values: Vec<Value>,
    #[serde(default)]
    structure: Vec<ArrowDoc>,
}

/// Position of a level by name.
pub fn level_position<C: ModelCategory>(x: &ProObject<C>, name: &str) -> Result<usize> {
    if x.is_omega() {
        return name.parse::<usize>().map_err(|_| Error::MalformedObject(format!("{name} is not an ω level")));
    }
    x.poset()?.position(name).ok_or_else(|| Error::MalformedObject(format!("unknown level {name}")))
}

pub fn encode_pro_object<C: Codec>(cat: &C, x: &ProObject<C>) -> Value {
    let doc = ProObjectDoc {
        index: IndexSpec::of(&x.index()),
        values: x.values().iter().map(|v| cat.encode_object(v)).collect(),
        structure: x
            .structure()
            .into_iter()
            .map(|(t, s, m)| ArrowDoc { from: x.level_name(t), to: x.level_name(s), map: cat.encode_map(&m) })
            .collect(),
    };
    serde_json::to_value(doc).expect("plain data")
}

pub fn decode_pro_object<C: Codec>(cat: &C, v: &Value) -> Result<ProObject<C>> {
    let doc: ProObjectDoc = parse(v, "a pro-object is {index, values, structure}")?;
    let values = doc.values.iter().map(|v| cat.decode_object(v)).collect::<Result<Vec<_>>>()?;
    match doc.index.build()? {
        IndexPoset::Omega => {
            let mut bonds: Vec<Option<C::Map>> = vec![None; values.len().saturating_sub(1)];
            for a in &doc.structure {
                let (t, s) = (omega_level(&a.from)?, omega_level(&a.to)?);
                if t != s + 1 || s >= bonds.len() {
                    return Err(Error::MalformedObject(format!("ω structure must list bonds n+1 -> n, got {t} -> {s}")));
                }
                bonds[s] = Some(cat.decode_map(&a.map, &values[t], &values[s])?);
            }
            let bonds = bonds
                .into_iter()
                .enumerate()
                .map(|(n, b)| b.ok_or_else(|| Error::MalformedObject(format!("missing bond {} -> {n}", n + 1))))
                .collect::<Result<Vec<_>>>()?;
            ProObject::omega(cat, values, bonds)
        }
        IndexPoset::Finite(poset) => {
            if values.len() != poset.len() {
                return Err(Error::MalformedObject(format!("{} values for {} levels", values.len(), poset.len())));
            }
            let pos = |n: &str| poset.position(n).ok_or_else(|| Error::MalformedObject(format!("unknown level {n}")));
            let structure = doc
                .structure
                .iter()
                .map(|a| {
                    let (t, s) = (pos(&a.from)?, pos(&a.to)?);
                    Ok((t, s, cat.decode_map(&a.map, &values[t], &values[s])?))
                })
                .collect::<Result<Vec<_>>>()?;
            ProObject::finite(cat, poset, values, structure)
        }
    }
}

fn omega_level(name: &str) -> Result<usize> {
    name.parse().map_err(|_| Error::MalformedObject(format!("{name} is not an ω level")))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentDoc {
    level: String,
    from: String,
    map: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProMapDoc {
    source: Value,
    target: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    level: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    components: Option<Vec<ComponentDoc>>,
}

pub fn encode_pro_map<C: Codec>(cat: &C, f: &ProMap<C>) -> Value {
    let (x, y) = (f.source(), f.target());
    let mut doc = ProMapDoc { source: encode_pro_object(cat, x), target: encode_pro_object(cat, y), level: None, components: None };
    match f.repr() {
        Repr::Level(c) => doc.level = Some(c.iter().map(|m| cat.encode_map(m)).collect()),
        Repr::General(c) => {
            doc.components = Some(
                c.iter()
                    .enumerate()
                    .map(|(s, (t, m))| ComponentDoc { level: y.level_name(s), from: x.level_name(*t), map: cat.encode_map(m) })
                    .collect(),
            )
        }
    }
    serde_json::to_value(doc).expect("plain data")
}

pub fn decode_pro_map<C: Codec>(cat: &C, v: &Value) -> Result<ProMap<C>> {
    let doc: ProMapDoc = parse(v, "a pro-map is {source, target, level | components}")?;
    let x = decode_pro_object(cat, &doc.source)?;
    let y = decode_pro_object(cat, &doc.target)?;
    decode_pro_map_between(cat, &doc, x, y)
}

fn decode_pro_map_between<C: Codec>(cat: &C, doc: &ProMapDoc, x: ProObject<C>, y: ProObject<C>) -> Result<ProMap<C>> {
    match (&doc.level, &doc.components) {
        (Some(level), None) => {
            let comps = level
                .iter()
                .enumerate()
                .map(|(s, m)| cat.decode_map(m, x.value(s), y.value(s)))
                .collect::<Result<Vec<_>>>()?;
            ProMap::level(cat, x, y, comps)
        }
        (None, Some(components)) => {
            let mut slots: Vec<Option<(usize, C::Map)>> = Vec::new();
            for c in components {
                let s = level_position(&y, &c.level)?;
                let t = level_position(&x, &c.from)?;
                if slots.len() <= s {
                    slots.resize(s + 1, None);
                }
                if slots[s].is_some() {
                    return Err(Error::MalformedMap(format!("component at level {} given twice", c.level)));
                }
                slots[s] = Some((t, cat.decode_map(&c.map, x.value(t), y.value(s))?));
            }
            let comps = slots
                .into_iter()
                .enumerate()
                .map(|(s, c)| c.ok_or_else(|| Error::MalformedMap(format!("missing component at level {}", y.level_name(s)))))
                .collect::<Result<Vec<_>>>()?;
            ProMap::general(cat, x, y, comps)
        }
        _ => Err(Error::MalformedMap("a pro-map gives exactly one of level or components".into())),
    }
}

/// Witnesses `h_ts: Y_t -> X_s` as `{from: t, to: s, map}` entries.
pub fn encode_witnesses<C: Codec>(cat: &C, f: &ProMap<C>, w: &Witnesses<C::Map>) -> Value {
    let docs: Vec<ArrowDoc> = w
        .iter()
        .map(|(&(t, s), m)| ArrowDoc { from: f.target().level_name(t), to: f.source().level_name(s), map: cat.encode_map(m) })
        .collect();
    serde_json::to_value(docs).expect("plain data")
}

pub fn decode_witnesses<C: Codec>(cat: &C, f: &ProMap<C>, v: &Value) -> Result<Witnesses<C::Map>> {
    let docs: Vec<ArrowDoc> = parse(v, "witnesses are a list of {from, to, map}")?;
    let mut w = Witnesses::new();
    for d in docs {
        let t = level_position(f.target(), &d.from)?;
        let s = level_position(f.source(), &d.to)?;
        let m = cat.decode_map(&d.map, f.target().value(t), f.source().value(s))?;
        if w.insert((t, s), m).is_some() {
            return Err(Error::MalformedMap(format!("witness h({}, {}) given twice", d.from, d.to)));
        }
    }
    Ok(w)
}

pub fn encode_square<C: Codec>(cat: &C, sq: &ProSquare<C>) -> Value {
    json!({
        "top": encode_pro_map(cat, &sq.top),
        "left": encode_pro_map(cat, &sq.left),
        "right": encode_pro_map(cat, &sq.right),
        "bottom": encode_pro_map(cat, &sq.bottom),
    })
}

pub fn decode_square<C: Codec>(cat: &C, v: &Value) -> Result<ProSquare<C>> {
    let side = |k: &str| v.get(k).ok_or_else(|| Error::MalformedDiagram(format!("square is missing its {k} side"))).and_then(|s| decode_pro_map(cat, s));
    let sq = ProSquare { top: side("top")?, left: side("left")?, right: side("right")?, bottom: side("bottom")? };
    if sq.top.source() != sq.left.source()
        || sq.top.target() != sq.right.source()
        || sq.left.target() != sq.bottom.source()
        || sq.right.target() != sq.bottom.target()
    {
        return Err(Error::MalformedDiagram("square sides do not share their corners".into()));
    }
    Ok(sq)
}

pub fn encode_iso<C: Codec>(cat: &C, c: &IsoCertificate<C>) -> Value {
    json!({ "forward": encode_pro_map(cat, &c.forward), "backward": encode_pro_map(cat, &c.backward) })
}

pub fn decode_iso<C: Codec>(cat: &C, v: &Value) -> Result<IsoCertificate<C>> {
    let part = |k: &str| v.get(k).ok_or_else(|| Error::MalformedMap(format!("iso certificate is missing {k}"))).and_then(|s| decode_pro_map(cat, s));
    Ok(IsoCertificate { forward: part("forward")?, backward: part("backward")? })
}

/// A required field of a document.
pub fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::MalformedObject(format!("missing field {key}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_map, random_pro_iso, rng};

    #[test]
    fn set_maps_round_trip() {
        let mut r = rng(5, 0);
        for _ in 0..40 {
            let f = random_map(&SetBij, &mut r, 5).unwrap();
            let back = decode_pro_map(&SetBij, &encode_pro_map(&SetBij, &f)).unwrap();
            assert_eq!(back.source(), f.source());
            assert_eq!(back.level_components(), f.level_components());
        }
    }

    #[test]
    fn chain_maps_round_trip() {
        let mut r = rng(6, 0);
        for _ in 0..40 {
            let f = random_map(&ChainF2, &mut r, 5).unwrap();
            let back = decode_pro_map(&ChainF2, &encode_pro_map(&ChainF2, &f)).unwrap();
            assert_eq!(back.target(), f.target());
            assert_eq!(back.level_components(), f.level_components());
        }
    }

    #[test]
    fn witnesses_round_trip() {
        let s = random_pro_iso(&ChainF2, &mut rng(8, 0), 3).unwrap();
        let v = encode_witnesses(&ChainF2, &s.map, &s.witnesses);
        assert_eq!(decode_witnesses(&ChainF2, &s.map, &v).unwrap(), s.witnesses);
    }

    #[test]
    fn general_maps_round_trip() {
        let x = ProObject::omega(&SetBij, vec![FinSet::range(1), FinSet::range(2)], vec![FinMap::new(FinSet::range(2), FinSet::range(1), vec![0, 0]).unwrap()]).unwrap();
        let f = ProMap::general(&SetBij, x.clone(), x.clone(), vec![(1, FinMap::new(FinSet::range(2), FinSet::range(1), vec![0, 0]).unwrap()), (1, SetBij.identity(&FinSet::range(2)))]).unwrap();
        let back = decode_pro_map(&SetBij, &encode_pro_map(&SetBij, &f)).unwrap();
        assert!(back.equals(&SetBij, &f).unwrap());
        assert_eq!(back.repr(), f.repr());
    }

    #[test]
    fn unknown_set_element_is_rejected() {
        let x = FinSet::range(2);
        let err = SetBij.decode_map(&json!({"0": "0", "7": "1"}), &x, &x).unwrap_err();
        assert!(matches!(err, Error::MalformedMap(_)));
    }
}
