//! Randomized property suites for the strict structure. Each trial draws its
//! input from `(seed, stream)` and reports a violation as text.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::base::{FactorMode, MapClass, ModelCategory};
use crate::error::Error;
use crate::gen::{self, Gen, Generate, IntoClass};
use crate::par;
use crate::pro::{ProMap, ProObject};
use crate::strict::{
    compose_zigzag_we, detect_special, factor_strict, levelwise_failure, lift_strict, pro_factor_iso, proper_pullback, two_of_three, CancelSide,
    StrictMode,
};
use crate::towers::{adjunction_check, build_cocell_tower, grow, tower_limit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    FactorL1,
    FactorL2,
    LiftL1,
    LiftL2,
    ProFactorIso,
    Zigzag,
    TwoOfThreeLeft,
    TwoOfThreeRight,
    SpecialLevelwise,
    ProperPullback,
    Cocell,
    Adjunction,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::FactorL1,
        Suite::FactorL2,
        Suite::LiftL1,
        Suite::LiftL2,
        Suite::ProFactorIso,
        Suite::Zigzag,
        Suite::TwoOfThreeLeft,
        Suite::TwoOfThreeRight,
        Suite::SpecialLevelwise,
        Suite::ProperPullback,
        Suite::Cocell,
        Suite::Adjunction,
    ];

    /// Stream block of the suite, so suites never share draws.
    pub fn stream_base(self) -> u64 {
        (Suite::ALL.iter().position(|&s| s == self).expect("listed") as u64) << 32
    }
}

/// Size bounds for generated inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    /// Largest generated index poset.
    pub max_len: usize,
    /// Largest pro-isomorphism chain.
    pub iso_len: usize,
    /// Depth for ω towers and hom stabilization.
    pub depth: usize,
    /// Largest enumerated hom set.
    pub cap: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params { max_len: 5, iso_len: 3, depth: crate::index::DEFAULT_DEPTH, cap: 256 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: u64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub instance: String,
    pub trials: u64,
    pub passed: u64,
    /// Trials whose input exceeded an enumeration cap.
    pub skipped: u64,
    pub failures: Vec<TrialFailure>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Outcome of one trial.
pub enum Outcome {
    Pass,
    Skip,
    Fail(String),
}

type Check = std::result::Result<(), String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn levelwise<C: ModelCategory>(cat: &C, f: &ProMap<C>, class: MapClass, name: &str) -> Check {
    match levelwise_failure(cat, f, class).map_err(err)? {
        None => Ok(()),
        Some(s) => Err(format!("{name} is not levelwise {class} at level {}", f.source().level_name(s))),
    }
}

fn same<C: ModelCategory>(cat: &C, a: &ProMap<C>, b: &ProMap<C>, what: &str) -> Check {
    ensure(a.equals(cat, b).map_err(err)?, || format!("{what} do not agree"))
}

fn special_class(c: IntoClass) -> MapClass {
    match c {
        IntoClass::Any => MapClass::Any,
        IntoClass::Fib => MapClass::Fib,
        IntoClass::AcyclicFib => MapClass::AcyclicFib,
    }
}

fn check_factor<C: Generate>(cat: &C, rng: &mut Gen, p: &Params, mode: StrictMode) -> Check {
    let f = gen::random_map(cat, rng, p.max_len).map_err(err)?;
    let fac = factor_strict(cat, &f, mode).map_err(err)?;
    ensure(fac.left.source() == f.source() && fac.right.target() == f.target(), || "factorization has the wrong ends".into())?;
    for s in f.source().levels() {
        let comp = cat.compose(&fac.right.component(s).1, &fac.left.component(s).1).map_err(err)?;
        ensure(comp == f.component(s).1, || format!("right ∘ left differs from f at level {}", f.source().level_name(s)))?;
    }
    levelwise(cat, &fac.left, mode.left_class(), "the left factor")?;
    let report = detect_special(cat, &fac.right, mode.special_class()).map_err(err)?;
    ensure(report.is_special(), || {
        format!("the right factor is not special at level {}", f.source().level_name(report.first_failure.unwrap_or_default()))
    })
}

fn check_lift<C: Generate>(cat: &C, rng: &mut Gen, p: &Params, mode: StrictMode) -> Check {
    let sq = gen::random_lifting_square(cat, rng, p.max_len, mode).map_err(err)?;
    let lift = lift_strict(cat, &sq).map_err(err)?.lift;
    same(cat, &ProMap::compose(cat, &lift, &sq.left).map_err(err)?, &sq.top, "lift ∘ left and top")?;
    same(cat, &ProMap::compose(cat, &sq.right, &lift).map_err(err)?, &sq.bottom, "right ∘ lift and bottom")
}

fn check_pro_factor_iso<C: Generate>(cat: &C, rng: &mut Gen, p: &Params) -> Check {
    let s = gen::random_pro_iso(cat, rng, p.iso_len).map_err(err)?;
    for mode in [FactorMode::CofThenAcyclicFib, FactorMode::AcyclicCofThenFib] {
        let fac = pro_factor_iso(cat, &s.map, &s.witnesses, mode).map_err(err)?;
        levelwise(cat, &fac.left, mode.left_class(), "the left factor")?;
        levelwise(cat, &fac.right, mode.right_class(), "the right factor")?;
        same(cat, &ProMap::compose(cat, &fac.right, &fac.left).map_err(err)?, &s.map, "right ∘ left and f")?;
        ensure(fac.left_iso.verify(cat).map_err(err)?, || "left factor certificate fails".into())?;
        ensure(fac.right_iso.verify(cat).map_err(err)?, || "right factor certificate fails".into())?;
        ensure(fac.chain_maps <= 1, || format!("{} distinct chain composites", fac.chain_maps))?;
    }
    Ok(())
}

fn check_zigzag<C: Generate>(cat: &C, rng: &mut Gen, p: &Params) -> Check {
    let s = gen::random_zigzag(cat, rng, p.iso_len).map_err(err)?;
    let z = compose_zigzag_we(cat, &s.f, &s.h, &s.g, &s.witnesses).map_err(err)?;
    levelwise(cat, &z.map, MapClass::We, "the zigzag composite")?;
    ensure(z.source_iso.forward.target() == s.f.source(), || "source certificate does not land in X".into())?;
    ensure(z.target_iso.forward.source() == s.g.target(), || "target certificate does not start at W".into())?;
    ensure(z.source_iso.verify(cat).map_err(err)? && z.target_iso.verify(cat).map_err(err)?, || "zigzag certificates fail".into())
}

fn check_two_of_three<C: Generate>(cat: &C, rng: &mut Gen, p: &Params, side: CancelSide) -> Check {
    let (sq, w) = gen::random_two_of_three(cat, rng, p.iso_len, side == CancelSide::Left).map_err(err)?;
    let c = two_of_three(cat, &sq, &w, side).map_err(err)?;
    levelwise(cat, &c.map, MapClass::We, "the cancelled map")?;
    ensure(c.iso.verify(cat).map_err(err)?, || "cancellation certificate fails".into())
}

fn check_special_levelwise<C: Generate>(cat: &C, rng: &mut Gen, p: &Params) -> Check {
    let poset = gen::random_poset(rng, p.max_len);
    let y = gen::random_pro_object(cat, rng, &poset).map_err(err)?;
    let class = [IntoClass::Fib, IntoClass::AcyclicFib, IntoClass::Any][rng.gen_range(0..3)];
    let f = gen::random_level_map(cat, rng, &y, class).map_err(err)?;
    for target in [MapClass::Fib, MapClass::AcyclicFib] {
        let report = detect_special(cat, &f, target).map_err(err)?;
        if special_class(class) == target {
            ensure(report.is_special(), || format!("generated special {target} map is not detected as special"))?;
        }
        if report.is_special() {
            levelwise(cat, &f, target, "a special map")?;
        }
    }
    Ok(())
}

fn check_proper<C: Generate>(cat: &C, rng: &mut Gen, p: &Params) -> Check {
    let s = gen::random_proper(cat, rng, p.iso_len).map_err(err)?;
    let pb = proper_pullback(cat, &s.p, &s.f, &s.g, &s.witnesses).map_err(err)?;
    levelwise(cat, &pb.map, MapClass::We, "the pulled-back map")?;
    ensure(pb.glue.verify(cat).map_err(err)?, || "glue certificate fails".into())
}

fn check_cocell<C: Generate>(cat: &C, rng: &mut Gen, p: &Params) -> Check {
    let poset = gen::random_poset(rng, p.max_len.min(4));
    let y = gen::random_pro_object(cat, rng, &poset).map_err(err)?;
    let class = if rng.gen_bool(0.5) { IntoClass::Fib } else { IntoClass::AcyclicFib };
    let f = gen::random_level_map(cat, rng, &y, class).map_err(err)?;
    let tower = build_cocell_tower(cat, &f, special_class(class)).map_err(err)?;
    let lim = tower_limit(cat, &tower).map_err(err)?;
    let iso = lim.iso.ok_or_else(|| "no limit certificate".to_string())?;
    ensure(iso.verify(cat).map_err(err)?, || "limit certificate fails".into())?;
    same(cat, &ProMap::compose(cat, &lim.projection, &iso.forward).map_err(err)?, &f, "projection ∘ iso and f")?;
    let replay = grow(cat, &tower.base, &tower.attaching).map_err(err)?;
    ensure(
        replay.stages.len() == tower.stages.len() && replay.stages.iter().zip(&tower.stages).all(|(a, b)| a.object == b.object),
        || "replay from the attaching data differs".into(),
    )
}

fn check_adjunction<C: Generate>(cat: &C, rng: &mut Gen, p: &Params) -> std::result::Result<bool, String> {
    let x = cat.random_object(rng);
    let y: ProObject<C> = if rng.gen_bool(0.5) {
        gen::random_omega(cat, rng, p.depth.min(4)).map_err(err)?
    } else {
        let poset = gen::random_poset(rng, 3);
        gen::random_pro_object(cat, rng, &poset).map_err(err)?
    };
    match adjunction_check(cat, &x, &y, p.depth, p.cap) {
        Ok(r) => {
            ensure(r.holds(), || format!("adjunction fails: {} pro-maps, {} base maps", r.pro_side, r.base_side))?;
            Ok(true)
        }
        Err(Error::Unsupported(_)) => Ok(false),
        Err(e) => Err(err(e)),
    }
}

/// Runs one trial of `suite` on the given generator.
pub fn run_trial<C: Generate>(cat: &C, suite: Suite, rng: &mut Gen, p: &Params) -> Outcome {
    let r = match suite {
        Suite::FactorL1 => check_factor(cat, rng, p, StrictMode::L1),
        Suite::FactorL2 => check_factor(cat, rng, p, StrictMode::L2),
        Suite::LiftL1 => check_lift(cat, rng, p, StrictMode::L1),
        Suite::LiftL2 => check_lift(cat, rng, p, StrictMode::L2),
        Suite::ProFactorIso => check_pro_factor_iso(cat, rng, p),
        Suite::Zigzag => check_zigzag(cat, rng, p),
        Suite::TwoOfThreeLeft => check_two_of_three(cat, rng, p, CancelSide::Left),
        Suite::TwoOfThreeRight => check_two_of_three(cat, rng, p, CancelSide::Right),
        Suite::SpecialLevelwise => check_special_levelwise(cat, rng, p),
        Suite::ProperPullback => check_proper(cat, rng, p),
        Suite::Cocell => check_cocell(cat, rng, p),
        Suite::Adjunction => match check_adjunction(cat, rng, p) {
            Ok(true) => Ok(()),
            Ok(false) => return Outcome::Skip,
            Err(e) => Err(e),
        },
    };
    match r {
        Ok(()) => Outcome::Pass,
        Err(e) => Outcome::Fail(e),
    }
}

/// Runs `trials` trials of one suite; trial `k` uses stream `k` of the
/// suite's block under `seed`.
pub fn run_suite<C: Generate>(cat: &C, suite: Suite, seed: u64, trials: u64, p: &Params) -> SuiteReport {
    let outcomes = par::map_trials(trials, |k| run_trial(cat, suite, &mut gen::rng(seed, suite.stream_base() + k), p));
    let mut report = SuiteReport { suite, instance: cat.tag().to_string(), trials, passed: 0, skipped: 0, failures: Vec::new() };
    for (trial, o) in outcomes.into_iter().enumerate() {
        match o {
            Outcome::Pass => report.passed += 1,
            Outcome::Skip => report.skipped += 1,
            Outcome::Fail(detail) => report.failures.push(TrialFailure { trial: trial as u64, detail }),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{ChainF2, SetBij};

    #[test]
    fn every_suite_passes_a_few_trials() {
        let p = Params { depth: 8, ..Params::default() };
        for suite in Suite::ALL {
            let r = run_suite(&SetBij, suite, 11, 12, &p);
            assert!(r.ok(), "{:?}", r);
            let r = run_suite(&ChainF2, suite, 11, 12, &p);
            assert!(r.ok(), "{:?}", r);
        }
    }
}
