//! The `promc` command line: JSON in, certificate out.
//!
//! Exit codes: 0 when the command succeeds, 1 when a property fails (a
//! square does not commute, a certificate does not verify, a suite finds a
//! counterexample), 2 when the input cannot be parsed or validated.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::axioms::{run_suite, Params, Suite};
use crate::base::{ChainF2, FactorMode, MapClass, ModelCategory, SetBij};
use crate::cert::{Certificate, Kind, SCHEMA};
use crate::document::{
    decode_pro_map, decode_pro_object, decode_square, decode_witnesses, encode_iso, encode_pro_map, encode_pro_object, encode_square,
    encode_witnesses, field, level_position, Codec,
};
use crate::error::{Error, Result};
use crate::gen::{self, Generate, IntoClass};
use crate::index::{CofinalMap, DEFAULT_DEPTH};
use crate::pro::{hom_pro, levelize, ProMap, ProObject};
use crate::strict::{
    compose_zigzag_we, detect_special, factor_strict, lift_strict, matching_map, pro_factor_iso, proper_pullback, two_of_three, CancelSide,
    StrictMode,
};
use crate::towers::{adjunction_check, build_cocell_tower, grow, omega_constant_limit, support_names, tower_limit, Attaching, Tower};
use crate::verify::verify_certificate;

const DEFAULT_CAP: usize = 4096;

#[derive(Parser, Debug)]
#[command(name = "promc", version, about = "Pro-category model structures over finite sets and GF(2) complexes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    #[value(name = "L1", alias = "l1")]
    L1,
    #[value(name = "L2", alias = "l2")]
    L2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpecialArg {
    Fib,
    AcyclicFib,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BaseModeArg {
    CofThenAcyclicFib,
    AcyclicCofThenFib,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InstanceArg {
    SetBij,
    ChainF2,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate Hom(X, Y) between two pro-objects.
    Hom {
        input: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Rewrite a pro-map as a level map.
    Levelize {
        input: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Relative matching maps of a level map.
    Matching {
        input: PathBuf,
        #[arg(long)]
        level: Option<String>,
    },
    /// Classify the matching maps of a level map.
    DetectSpecial {
        input: PathBuf,
        #[arg(long, value_enum)]
        class: Option<SpecialArg>,
    },
    /// Strict factorization of a level map.
    Factor {
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
    },
    /// Lift in a commuting square.
    Lift { input: PathBuf },
    /// Factor a pro-isomorphism through levelwise classes.
    ProFactorIso {
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<BaseModeArg>,
    },
    /// Compose a zigzag of weak equivalences into one level map.
    ZigzagWe { input: PathBuf },
    /// Cancel a pro-isomorphism from a commuting square of weak equivalences.
    TwoOfThree {
        input: PathBuf,
        #[arg(long, value_enum)]
        side: SideArg,
    },
    /// Pull a weak equivalence back along a fibration.
    ProperPullback { input: PathBuf },
    /// Present a special (acyclic) fibration as a tower of base changes.
    Cocell {
        input: PathBuf,
        #[arg(long, value_enum)]
        class: Option<SpecialArg>,
    },
    /// Limit of a finite tower, or of an ω tower of constant pro-objects.
    TowerLimit { input: PathBuf },
    /// Check the constant/limit adjunction on one pair of objects.
    Adjunction {
        input: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Run the randomized property suites.
    CheckAxioms {
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, env = "PROMC_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[arg(long, value_enum, default_value = "both")]
        instance: InstanceArg,
        #[arg(long = "suite", value_enum)]
        suites: Vec<Suite>,
    },
    /// Print a random input document for a command.
    Sample {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, value_enum, default_value = "set-bij")]
        instance: InstanceArg,
        #[arg(long, env = "PROMC_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        side: Option<SideArg>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Re-check a certificate.
    Verify { certificate: PathBuf },
}

/// Exit code for an error: 2 for parse and validation failures, 1 for
/// property violations.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::MalformedObject(_)
        | Error::MalformedMap(_)
        | Error::NotComposable(_)
        | Error::MalformedDiagram(_)
        | Error::Index(_)
        | Error::NotFunctorial { .. }
        | Error::NotNatural { .. }
        | Error::MissingWitness { .. }
        | Error::Unsupported(_)
        | Error::MixedInstances(_) => 2,
        Error::NonCommuting(_) | Error::Precondition(_) | Error::NonPosetal(_) | Error::DepthExhausted { .. } | Error::Internal(_) => 1,
    }
}

fn error_name(e: &Error) -> &'static str {
    match e {
        Error::MalformedObject(_) => "malformed-object",
        Error::MalformedMap(_) => "malformed-map",
        Error::NotComposable(_) => "not-composable",
        Error::MalformedDiagram(_) => "malformed-diagram",
        Error::Index(_) => "index",
        Error::NotFunctorial { .. } => "not-functorial",
        Error::NotNatural { .. } => "not-natural",
        Error::NonCommuting(_) => "non-commuting",
        Error::Precondition(_) => "precondition",
        Error::MissingWitness { .. } => "missing-witness",
        Error::NonPosetal(_) => "non-posetal",
        Error::Unsupported(_) => "unsupported",
        Error::DepthExhausted { .. } => "depth-exhausted",
        Error::MixedInstances(_) => "mixed-instances",
        Error::Internal(_) => "internal",
    }
}

fn witness(e: &Error) -> Value {
    match e {
        Error::NotFunctorial { from, to, .. } | Error::NotNatural { from, to } => json!({ "from": from, "to": to }),
        Error::MissingWitness { t, s } => json!({ "t": t, "s": s }),
        other => json!(other.to_string()),
    }
}

/// The document printed when a command fails.
pub fn error_document(e: &Error) -> Value {
    json!({
        "schema": SCHEMA,
        "status": if exit_code(e) == 1 { "violation" } else { "invalid" },
        "error": error_name(e),
        "message": e.to_string(),
        "witness": witness(e),
    })
}

fn read_json(path: &Path) -> Result<Value> {
    let mut text = String::new();
    let read = if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    read.map_err(|e| Error::MalformedObject(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedObject(format!("{} is not JSON: {e}", path.display())))
}

fn instance_of(doc: &Value) -> Result<String> {
    match doc.get("instance").and_then(Value::as_str) {
        Some(t @ ("set-bij" | "chain-f2")) => Ok(t.to_string()),
        Some(other) => Err(Error::MalformedObject(format!("unknown instance {other}"))),
        None => Err(Error::MalformedObject("missing field instance".into())),
    }
}

fn opt_usize(v: &Value, key: &str, default: usize) -> Result<usize> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(default),
        Some(x) => x.as_u64().map(|n| n as usize).ok_or_else(|| Error::MalformedObject(format!("{key} must be a non-negative integer"))),
    }
}

fn opt_str<'a>(v: &'a Value, key: &str) -> Result<Option<&'a str>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(x) => x.as_str().map(Some).ok_or_else(|| Error::MalformedObject(format!("{key} must be a string"))),
    }
}

pub fn parse_special_class(name: &str) -> Result<MapClass> {
    match name {
        "fib" => Ok(MapClass::Fib),
        "acyclic-fib" => Ok(MapClass::AcyclicFib),
        other => Err(Error::MalformedObject(format!("class must be fib or acyclic-fib, got {other}"))),
    }
}

pub fn parse_strict_mode(name: &str) -> Result<StrictMode> {
    match name {
        "L1" | "l1" => Ok(StrictMode::L1),
        "L2" | "l2" => Ok(StrictMode::L2),
        other => Err(Error::MalformedObject(format!("mode must be L1 or L2, got {other}"))),
    }
}

pub fn parse_factor_mode(name: &str) -> Result<FactorMode> {
    match name {
        "cof-then-acyclic-fib" => Ok(FactorMode::CofThenAcyclicFib),
        "acyclic-cof-then-fib" => Ok(FactorMode::AcyclicCofThenFib),
        other => Err(Error::MalformedObject(format!("unknown factorization mode {other}"))),
    }
}

pub fn parse_side(name: &str) -> Result<CancelSide> {
    match name {
        "left" => Ok(CancelSide::Left),
        "right" => Ok(CancelSide::Right),
        other => Err(Error::MalformedObject(format!("side must be left or right, got {other}"))),
    }
}

/// A base category the command line can run on.
pub trait Instance: Codec + Generate {}
impl<C: Codec + Generate> Instance for C {}

/// Attaching records with the endpoints of their maps.
pub fn encode_tower<C: Codec>(cat: &C, tower: &Tower<C>) -> Value {
    let base = &tower.base;
    let attaching: Vec<Value> = tower
        .attaching
        .iter()
        .map(|a| {
            json!({
                "level": base.level_name(a.level),
                "class": a.class,
                "source": cat.encode_object(cat.source(&a.map)),
                "target": cat.encode_object(cat.target(&a.map)),
                "map": cat.encode_map(&a.map),
            })
        })
        .collect();
    json!({ "base": encode_pro_object(cat, base), "attaching": attaching })
}

/// A tower read back from a document: its base and attaching records.
pub type TowerData<C> = (ProObject<C>, Vec<Attaching<<C as ModelCategory>::Map>>);

pub fn decode_tower<C: Codec>(cat: &C, v: &Value) -> Result<TowerData<C>> {
    let base = decode_pro_object(cat, field(v, "base")?)?;
    let list = field(v, "attaching")?.as_array().ok_or_else(|| Error::MalformedObject("attaching must be a list".into()))?;
    let attaching = list
        .iter()
        .map(|a| {
            let level = level_position(&base, field(a, "level")?.as_str().unwrap_or_default())?;
            let class: MapClass = serde_json::from_value(field(a, "class")?.clone()).map_err(|e| Error::MalformedObject(format!("class: {e}")))?;
            let s = cat.decode_object(field(a, "source")?)?;
            let t = cat.decode_object(field(a, "target")?)?;
            Ok(Attaching { level, class, map: cat.decode_map(field(a, "map")?, &s, &t)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((base, attaching))
}

fn encode_reindex(r: &Option<CofinalMap>) -> Value {
    match r {
        None => Value::Null,
        Some(CofinalMap::Omega { values }) => json!({ "omega": values }),
        Some(CofinalMap::Finite { from, to, map }) => {
            let pairs: Vec<(String, String)> = map.iter().enumerate().map(|(a, &b)| (from.name(a).to_string(), to.name(b).to_string())).collect();
            json!({ "finite": pairs })
        }
    }
}

fn encode_stages<C: Codec>(cat: &C, tower: &Tower<C>) -> Result<Value> {
    let poset = tower.base.poset()?;
    Ok(Value::Array(
        tower
            .stages
            .iter()
            .map(|s| json!({ "support": support_names(poset, &s.support), "object": encode_pro_object(cat, &s.object) }))
            .collect(),
    ))
}

/// Runs one construction command on the document `input`, which already
/// carries every command-line option. Returns the result and whether the
/// checked property holds.
pub fn construct<C: Instance>(cat: &C, kind: Kind, input: &Value) -> Result<(Value, bool)> {
    let map = |key: &str| decode_pro_map(cat, field(input, key)?);
    let pm = |f: &ProMap<C>| encode_pro_map(cat, f);
    Ok(match kind {
        Kind::Hom => {
            let x = decode_pro_object(cat, field(input, "source")?)?;
            let y = decode_pro_object(cat, field(input, "target")?)?;
            let h = hom_pro(cat, &x, &y, opt_usize(input, "depth", DEFAULT_DEPTH)?, opt_usize(input, "cap", DEFAULT_CAP)?)?;
            let classes: Vec<Value> = h.classes.iter().map(pm).collect();
            (json!({ "count": classes.len(), "classes": classes, "counts": h.counts, "stable_depth": h.stable_depth }), true)
        }
        Kind::Levelize => {
            let f = map("map")?;
            let l = levelize(cat, &f, opt_usize(input, "depth", DEFAULT_DEPTH)?)?;
            let v = json!({
                "map": pm(&l.map),
                "source_iso": encode_iso(cat, &l.source_iso),
                "target_iso": encode_iso(cat, &l.target_iso),
                "reindex": encode_reindex(&l.reindex),
            });
            (v, true)
        }
        Kind::Matching => {
            let f = map("map")?;
            let levels: Vec<usize> = match opt_str(input, "level")? {
                Some(name) => vec![level_position(f.source(), name)?],
                None => f.source().levels().collect(),
            };
            let out = levels
                .into_iter()
                .map(|t| {
                    let m = matching_map(cat, &f, t)?;
                    Ok(json!({ "level": f.source().level_name(t), "object": cat.encode_object(&m.object), "map": cat.encode_map(&m.map) }))
                })
                .collect::<Result<Vec<_>>>()?;
            (json!({ "levels": out }), true)
        }
        Kind::DetectSpecial => {
            let f = map("map")?;
            let class = parse_special_class(opt_str(input, "class")?.unwrap_or("fib"))?;
            let r = detect_special(cat, &f, class)?;
            let levels: Vec<Value> = r
                .levels
                .iter()
                .map(|(t, c)| json!({ "level": f.source().level_name(*t), "we": c.we, "cof": c.cof, "fib": c.fib }))
                .collect();
            let v = json!({
                "class": class,
                "special": r.is_special(),
                "first_failure": r.first_failure.map(|t| f.source().level_name(t)),
                "levels": levels,
            });
            (v, true)
        }
        Kind::Factor => {
            let f = map("map")?;
            let mode = parse_strict_mode(opt_str(input, "mode")?.unwrap_or("L1"))?;
            let fac = factor_strict(cat, &f, mode)?;
            (json!({ "middle": encode_pro_object(cat, &fac.middle), "left": pm(&fac.left), "right": pm(&fac.right) }), true)
        }
        Kind::Lift => {
            let sq = decode_square(cat, field(input, "square")?)?;
            (json!({ "lift": pm(&lift_strict(cat, &sq)?.lift) }), true)
        }
        Kind::ProFactorIso => {
            let f = map("map")?;
            let w = decode_witnesses(cat, &f, field(input, "witnesses")?)?;
            let mode = parse_factor_mode(opt_str(input, "mode")?.unwrap_or("cof-then-acyclic-fib"))?;
            let r = pro_factor_iso(cat, &f, &w, mode)?;
            let v = json!({
                "middle": encode_pro_object(cat, &r.middle),
                "left": pm(&r.left),
                "right": pm(&r.right),
                "left_iso": encode_iso(cat, &r.left_iso),
                "right_iso": encode_iso(cat, &r.right_iso),
                "chain_maps": r.chain_maps,
            });
            (v, true)
        }
        Kind::ZigzagWe => {
            let (f, h, g) = (map("f")?, map("h")?, map("g")?);
            let w = decode_witnesses(cat, &h, field(input, "witnesses")?)?;
            let z = compose_zigzag_we(cat, &f, &h, &g, &w)?;
            (json!({ "map": pm(&z.map), "source_iso": encode_iso(cat, &z.source_iso), "target_iso": encode_iso(cat, &z.target_iso) }), true)
        }
        Kind::TwoOfThree => {
            let sq = decode_square(cat, field(input, "square")?)?;
            let side = parse_side(opt_str(input, "side")?.ok_or_else(|| Error::MalformedObject("missing field side".into()))?)?;
            let iso_side = if side == CancelSide::Left { &sq.bottom } else { &sq.top };
            let w = decode_witnesses(cat, iso_side, field(input, "witnesses")?)?;
            let c = two_of_three(cat, &sq, &w, side)?;
            (json!({ "map": pm(&c.map), "iso": encode_iso(cat, &c.iso) }), true)
        }
        Kind::ProperPullback => {
            let (p, f, g) = (map("p")?, map("f")?, map("g")?);
            let w = decode_witnesses(cat, &g, field(input, "witnesses")?)?;
            let r = proper_pullback(cat, &p, &f, &g, &w)?;
            (json!({ "map": pm(&r.map), "glue": encode_iso(cat, &r.glue) }), true)
        }
        Kind::Cocell => {
            let f = map("map")?;
            let class = parse_special_class(opt_str(input, "class")?.unwrap_or("fib"))?;
            let tower = build_cocell_tower(cat, &f, class)?;
            let lim = tower_limit(cat, &tower)?;
            let v = json!({
                "tower": encode_tower(cat, &tower),
                "stages": encode_stages(cat, &tower)?,
                "limit": {
                    "object": encode_pro_object(cat, &lim.object),
                    "projection": pm(&lim.projection),
                    "iso": lim.iso.as_ref().map(|c| encode_iso(cat, c)),
                },
            });
            (v, true)
        }
        Kind::TowerLimit => {
            if let Some(omega) = input.get("omega") {
                let values = field(omega, "values")?
                    .as_array()
                    .ok_or_else(|| Error::MalformedObject("values must be a list".into()))?
                    .iter()
                    .map(|v| cat.decode_object(v))
                    .collect::<Result<Vec<_>>>()?;
                let bonds = field(omega, "bonds")?
                    .as_array()
                    .ok_or_else(|| Error::MalformedObject("bonds must be a list".into()))?
                    .iter()
                    .enumerate()
                    .map(|(n, b)| {
                        let (s, t) = (values.get(n + 1), values.get(n));
                        match (s, t) {
                            (Some(s), Some(t)) => cat.decode_map(b, s, t),
                            _ => Err(Error::MalformedObject(format!("bond {} -> {n} has no endpoints", n + 1))),
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                let lim = omega_constant_limit(cat, values, bonds)?;
                (json!({ "object": encode_pro_object(cat, &lim) }), true)
            } else {
                let (base, attaching) = decode_tower(cat, field(input, "tower")?)?;
                let mut tower = grow(cat, &base, &attaching)?;
                if let Some(p) = input.get("presents").filter(|p| !p.is_null()) {
                    let f = decode_pro_map(cat, p)?;
                    if f.target() != &base {
                        return Err(Error::MalformedDiagram("the presented map does not end at the tower base".into()));
                    }
                    tower.presents = Some(f);
                }
                let lim = tower_limit(cat, &tower)?;
                let v = json!({
                    "stages": encode_stages(cat, &tower)?,
                    "object": encode_pro_object(cat, &lim.object),
                    "projection": pm(&lim.projection),
                    "iso": lim.iso.as_ref().map(|c| encode_iso(cat, c)),
                });
                (v, true)
            }
        }
        Kind::Adjunction => {
            let x = cat.decode_object(field(input, "source")?)?;
            let y = decode_pro_object(cat, field(input, "target")?)?;
            let r = adjunction_check(cat, &x, &y, opt_usize(input, "depth", DEFAULT_DEPTH)?, opt_usize(input, "cap", DEFAULT_CAP)?)?;
            let holds = r.holds();
            let mut v = serde_json::to_value(&r).map_err(|e| Error::internal(e.to_string()))?;
            v["holds"] = json!(holds);
            (v, holds)
        }
        Kind::CheckAxioms => return Err(Error::Unsupported("check-axioms takes no input document".into())),
    })
}

/// A random input document for `kind`.
pub fn sample<C: Instance>(cat: &C, kind: Kind, seed: u64, side: CancelSide, mode: StrictMode) -> Result<Value> {
    let mut r = gen::rng(seed, 0);
    let rng = &mut r;
    let pm = |f: &ProMap<C>| encode_pro_map(cat, f);
    let special = |rng: &mut gen::Gen| -> Result<ProMap<C>> {
        let poset = gen::random_poset(rng, 4);
        let y = gen::random_pro_object(cat, rng, &poset)?;
        gen::random_level_map(cat, rng, &y, IntoClass::Fib)
    };
    let mut doc = match kind {
        Kind::Hom => {
            let p = gen::random_poset(rng, 3);
            let x = gen::random_pro_object(cat, rng, &p)?;
            let y = gen::random_omega(cat, rng, 3)?;
            json!({ "source": encode_pro_object(cat, &x), "target": encode_pro_object(cat, &y) })
        }
        Kind::Levelize => {
            let x = gen::random_omega(cat, rng, 3)?;
            let comps = (0..x.size()).map(|s| Ok((s + 1, x.map(cat, s + 1, s)?))).collect::<Result<Vec<_>>>()?;
            json!({ "map": pm(&ProMap::general(cat, x.clone(), x, comps)?) })
        }
        Kind::Matching | Kind::DetectSpecial => json!({ "map": pm(&special(rng)?), "class": "fib" }),
        Kind::Cocell => json!({ "map": pm(&special(rng)?), "class": "fib" }),
        Kind::TowerLimit => {
            let f = special(rng)?;
            let tower = build_cocell_tower(cat, &f, MapClass::Fib)?;
            json!({ "tower": encode_tower(cat, &tower), "presents": pm(&f) })
        }
        Kind::Factor => {
            json!({ "map": pm(&gen::random_map(cat, rng, 5)?), "mode": if mode == StrictMode::L1 { "L1" } else { "L2" } })
        }
        Kind::Lift => json!({ "square": encode_square(cat, &gen::random_lifting_square(cat, rng, 5, mode)?) }),
        Kind::ProFactorIso => {
            let s = gen::random_pro_iso(cat, rng, 3)?;
            json!({ "map": pm(&s.map), "witnesses": encode_witnesses(cat, &s.map, &s.witnesses) })
        }
        Kind::ZigzagWe => {
            let s = gen::random_zigzag(cat, rng, 3)?;
            json!({ "f": pm(&s.f), "h": pm(&s.h), "g": pm(&s.g), "witnesses": encode_witnesses(cat, &s.h, &s.witnesses) })
        }
        Kind::TwoOfThree => {
            let left = side == CancelSide::Left;
            let (sq, w) = gen::random_two_of_three(cat, rng, 3, left)?;
            let iso = if left { &sq.bottom } else { &sq.top };
            json!({ "square": encode_square(cat, &sq), "witnesses": encode_witnesses(cat, iso, &w), "side": if left { "left" } else { "right" } })
        }
        Kind::ProperPullback => {
            let s = gen::random_proper(cat, rng, 3)?;
            json!({ "p": pm(&s.p), "f": pm(&s.f), "g": pm(&s.g), "witnesses": encode_witnesses(cat, &s.g, &s.witnesses) })
        }
        Kind::Adjunction => {
            let x = cat.random_object(rng);
            let y = gen::random_omega(cat, rng, 3)?;
            json!({ "source": cat.encode_object(&x), "target": encode_pro_object(cat, &y) })
        }
        Kind::CheckAxioms => return Err(Error::Unsupported("check-axioms has no input document".into())),
    };
    doc["instance"] = json!(cat.tag());
    Ok(doc)
}

/// Outcome of a command: the printed document and the exit code.
pub struct Outcome {
    pub document: Value,
    pub code: i32,
    /// A one-line note for standard error.
    pub note: Option<String>,
}

impl Outcome {
    fn ok(document: Value) -> Self {
        Outcome { document, code: 0, note: None }
    }

    fn from_error(e: &Error) -> Self {
        Outcome { document: error_document(e), code: exit_code(e), note: Some(format!("error: {e}")) }
    }
}

fn kind_of(cmd: &Command) -> Option<(Kind, &Path)> {
    Some(match cmd {
        Command::Hom { input, .. } => (Kind::Hom, input),
        Command::Levelize { input, .. } => (Kind::Levelize, input),
        Command::Matching { input, .. } => (Kind::Matching, input),
        Command::DetectSpecial { input, .. } => (Kind::DetectSpecial, input),
        Command::Factor { input, .. } => (Kind::Factor, input),
        Command::Lift { input } => (Kind::Lift, input),
        Command::ProFactorIso { input, .. } => (Kind::ProFactorIso, input),
        Command::ZigzagWe { input } => (Kind::ZigzagWe, input),
        Command::TwoOfThree { input, .. } => (Kind::TwoOfThree, input),
        Command::ProperPullback { input } => (Kind::ProperPullback, input),
        Command::Cocell { input, .. } => (Kind::Cocell, input),
        Command::TowerLimit { input } => (Kind::TowerLimit, input),
        Command::Adjunction { input, .. } => (Kind::Adjunction, input),
        Command::CheckAxioms { .. } | Command::Sample { .. } | Command::Verify { .. } => return None,
    })
}

/// Copies command-line options into the input document.
fn merge_options(cmd: &Command, input: &mut Value) {
    let mut set = |k: &str, v: Value| {
        if let Some(o) = input.as_object_mut() {
            o.insert(k.to_string(), v);
        }
    };
    match cmd {
        Command::Hom { depth, cap, .. } | Command::Adjunction { depth, cap, .. } => {
            if let Some(d) = depth {
                set("depth", json!(d));
            }
            if let Some(c) = cap {
                set("cap", json!(c));
            }
        }
        Command::Levelize { depth: Some(d), .. } => set("depth", json!(d)),
        Command::Matching { level: Some(l), .. } => set("level", json!(l)),
        Command::DetectSpecial { class: Some(c), .. } | Command::Cocell { class: Some(c), .. } => {
            set("class", json!(if *c == SpecialArg::Fib { "fib" } else { "acyclic-fib" }))
        }
        Command::Factor { mode, .. } => set("mode", json!(if *mode == ModeArg::L1 { "L1" } else { "L2" })),
        Command::ProFactorIso { mode: Some(m), .. } => {
            set("mode", json!(if *m == BaseModeArg::CofThenAcyclicFib { "cof-then-acyclic-fib" } else { "acyclic-cof-then-fib" }))
        }
        Command::TwoOfThree { side, .. } => set("side", json!(if *side == SideArg::Left { "left" } else { "right" })),
        _ => {}
    }
}

fn run_construction(kind: Kind, path: &Path, cmd: &Command) -> Result<Outcome> {
    let mut input = read_json(path)?;
    if !input.is_object() {
        return Err(Error::MalformedObject("the input document must be a JSON object".into()));
    }
    let instance = instance_of(&input)?;
    merge_options(cmd, &mut input);
    input.as_object_mut().expect("checked above").remove("instance");
    let (result, holds) = match instance.as_str() {
        "set-bij" => construct(&SetBij, kind, &input)?,
        _ => construct(&ChainF2, kind, &input)?,
    };
    let cert = Certificate::new(kind, &instance, input, result);
    let document = serde_json::to_value(&cert).map_err(|e| Error::internal(e.to_string()))?;
    Ok(if holds {
        Outcome::ok(document)
    } else {
        Outcome { document, code: 1, note: Some(format!("{} property fails", instance)) }
    })
}

fn run_check_axioms(trials: u64, seed: u64, depth: usize, instance: InstanceArg, suites: &[Suite]) -> Outcome {
    let suites: Vec<Suite> = if suites.is_empty() { Suite::ALL.to_vec() } else { suites.to_vec() };
    let params = Params { depth, ..Params::default() };
    let mut reports = Vec::new();
    for &suite in &suites {
        if instance != InstanceArg::ChainF2 {
            reports.push(run_suite(&SetBij, suite, seed, trials, &params));
        }
        if instance != InstanceArg::SetBij {
            reports.push(run_suite(&ChainF2, suite, seed, trials, &params));
        }
    }
    let ok = reports.iter().all(|r| r.ok());
    let instances: Vec<&str> = match instance {
        InstanceArg::SetBij => vec!["set-bij"],
        InstanceArg::ChainF2 => vec!["chain-f2"],
        InstanceArg::Both => vec!["set-bij", "chain-f2"],
    };
    let input = json!({ "trials": trials, "seed": seed, "depth": depth, "instances": instances, "suites": suites });
    let cert = Certificate::new(Kind::CheckAxioms, &instances.join("+"), input, json!({ "ok": ok, "reports": reports }));
    let note = (!ok).then(|| {
        let r = reports.iter().find(|r| !r.ok()).expect("a failing suite");
        format!("{:?} on {} fails at trial {}: {}", r.suite, r.instance, r.failures[0].trial, r.failures[0].detail)
    });
    Outcome { document: serde_json::to_value(&cert).expect("plain data"), code: if ok { 0 } else { 1 }, note }
}

fn run_verify(path: &Path) -> Result<Outcome> {
    let doc = read_json(path)?;
    let cert = Certificate::parse(&doc)?;
    let report = verify_certificate(&cert)?;
    let note = report.first_failure().map(|c| format!("verification fails: {} ({})", c.check, c.witness.clone().unwrap_or_default()));
    let code = if report.ok { 0 } else { 1 };
    Ok(Outcome { document: serde_json::to_value(&report).map_err(|e| Error::internal(e.to_string()))?, code, note })
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Outcome {
    let cmd = &cli.command;
    let result = if let Some((kind, path)) = kind_of(cmd) {
        run_construction(kind, path, cmd)
    } else {
        match cmd {
            Command::CheckAxioms { trials, seed, depth, instance, suites } => Ok(run_check_axioms(*trials, *seed, *depth, *instance, suites)),
            Command::Sample { kind, instance, seed, side, mode } => {
                let side = if *side == Some(SideArg::Right) { CancelSide::Right } else { CancelSide::Left };
                let mode = if *mode == Some(ModeArg::L2) { StrictMode::L2 } else { StrictMode::L1 };
                match instance {
                    InstanceArg::ChainF2 => sample(&ChainF2, *kind, *seed, side, mode),
                    _ => sample(&SetBij, *kind, *seed, side, mode),
                }
                .map(Outcome::ok)
            }
            Command::Verify { certificate } => run_verify(certificate),
            _ => unreachable!("construction commands handled above"),
        }
    };
    result.unwrap_or_else(|e| Outcome::from_error(&e))
}

/// Prints an outcome and returns its exit code.
pub fn emit(outcome: &Outcome, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let text = serde_json::to_string_pretty(&outcome.document).expect("plain data");
    let _ = writeln!(out, "{text}");
    if let Some(n) = &outcome.note {
        let _ = writeln!(err, "{n}");
    }
    outcome.code
}
