//! The pluggable base model category and its two exact instances.
//!
//! Everything above this layer is generic over [`ModelCategory`]: pro-objects,
//! matching maps, strict factorizations and towers only ever talk to the base
//! category through the predicates, factorizations, finite limits and the
//! lift solver declared here.

pub mod chainf2;
pub mod setbij;

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chainf2::{ChainF2, ChainMap, Complex};
pub use setbij::{FinMap, FinSet, SetBij};

/// Membership flags of a base map in the three distinguished classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapClasses {
    pub we: bool,
    pub cof: bool,
    pub fib: bool,
}

impl MapClasses {
    pub fn satisfies(self, class: MapClass) -> bool {
        match class {
            MapClass::We => self.we,
            MapClass::Cof => self.cof,
            MapClass::Fib => self.fib,
            MapClass::AcyclicCof => self.we && self.cof,
            MapClass::AcyclicFib => self.we && self.fib,
            MapClass::Any => true,
        }
    }
}

/// A named class of base maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapClass {
    We,
    Cof,
    Fib,
    AcyclicCof,
    AcyclicFib,
    Any,
}

impl MapClass {
    pub fn name(self) -> &'static str {
        match self {
            MapClass::We => "we",
            MapClass::Cof => "cof",
            MapClass::Fib => "fib",
            MapClass::AcyclicCof => "acyclic-cof",
            MapClass::AcyclicFib => "acyclic-fib",
            MapClass::Any => "any",
        }
    }
}

impl std::fmt::Display for MapClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorMode {
    /// cofibration followed by an acyclic fibration
    CofThenAcyclicFib,
    /// acyclic cofibration followed by a fibration
    AcyclicCofThenFib,
}

impl FactorMode {
    pub fn left_class(self) -> MapClass {
        match self {
            FactorMode::CofThenAcyclicFib => MapClass::Cof,
            FactorMode::AcyclicCofThenFib => MapClass::AcyclicCof,
        }
    }

    pub fn right_class(self) -> MapClass {
        match self {
            FactorMode::CofThenAcyclicFib => MapClass::AcyclicFib,
            FactorMode::AcyclicCofThenFib => MapClass::Fib,
        }
    }
}

pub struct Factorization<C: ModelCategory + ?Sized> {
    pub left: C::Map,
    pub right: C::Map,
    pub middle: C::Obj,
    pub mode: FactorMode,
}

impl<C: ModelCategory + ?Sized> Clone for Factorization<C> {
    fn clone(&self) -> Self {
        Factorization {
            left: self.left.clone(),
            right: self.right.clone(),
            middle: self.middle.clone(),
            mode: self.mode,
        }
    }
}

impl<C: ModelCategory + ?Sized> Debug for Factorization<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Factorization")
            .field("left", &self.left)
            .field("right", &self.right)
            .field("mode", &self.mode)
            .finish()
    }
}

/// A commutative square `bottom ∘ left = right ∘ top`:
///
/// ```text
///   A --top--> X
///   |          |
///  left      right
///   v          v
///   B -bottom-> Y
/// ```
pub struct Square<C: ModelCategory + ?Sized> {
    pub left: C::Map,
    pub right: C::Map,
    pub top: C::Map,
    pub bottom: C::Map,
}

impl<C: ModelCategory + ?Sized> Clone for Square<C> {
    fn clone(&self) -> Self {
        Square {
            left: self.left.clone(),
            right: self.right.clone(),
            top: self.top.clone(),
            bottom: self.bottom.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Arrow<M> {
    pub from: usize,
    pub to: usize,
    pub map: M,
}

/// A finite diagram: objects plus arrows between them, referenced by position.
pub struct Diagram<C: ModelCategory + ?Sized> {
    pub objects: Vec<C::Obj>,
    pub arrows: Vec<Arrow<C::Map>>,
}

impl<C: ModelCategory + ?Sized> Clone for Diagram<C> {
    fn clone(&self) -> Self {
        Diagram { objects: self.objects.clone(), arrows: self.arrows.clone() }
    }
}

impl<C: ModelCategory + ?Sized> Default for Diagram<C> {
    fn default() -> Self {
        Diagram { objects: Vec::new(), arrows: Vec::new() }
    }
}

impl<C: ModelCategory + ?Sized> Diagram<C> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_object(&mut self, x: C::Obj) -> usize {
        self.objects.push(x);
        self.objects.len() - 1
    }

    pub fn add_arrow(&mut self, from: usize, to: usize, map: C::Map) {
        self.arrows.push(Arrow { from, to, map });
    }

    pub fn pullback(f: C::Map, g: C::Map, cat: &C) -> Self {
        let mut d = Self::new();
        let a = d.add_object(cat.source(&f).clone());
        let b = d.add_object(cat.source(&g).clone());
        let c = d.add_object(cat.target(&f).clone());
        d.add_arrow(a, c, f);
        d.add_arrow(b, c, g);
        d
    }

    pub fn pushout(f: C::Map, g: C::Map, cat: &C) -> Self {
        let mut d = Self::new();
        let a = d.add_object(cat.target(&f).clone());
        let b = d.add_object(cat.target(&g).clone());
        let c = d.add_object(cat.source(&f).clone());
        d.add_arrow(c, a, f);
        d.add_arrow(c, b, g);
        d
    }

    pub fn validate(&self, cat: &C) -> Result<()> {
        for x in &self.objects {
            cat.validate_object(x)?;
        }
        for (k, a) in self.arrows.iter().enumerate() {
            if a.from >= self.objects.len() || a.to >= self.objects.len() {
                return Err(Error::MalformedDiagram(format!("arrow {k} references a missing object")));
            }
            cat.validate_map(&a.map)?;
            if cat.source(&a.map) != &self.objects[a.from] || cat.target(&a.map) != &self.objects[a.to] {
                return Err(Error::MalformedDiagram(format!(
                    "arrow {k} ({} -> {}) has mismatched endpoints",
                    a.from, a.to
                )));
            }
        }
        Ok(())
    }

    /// Objects with no incoming arrows. In a loop-free diagram every object
    /// is reachable from one of these.
    pub fn roots(&self) -> Vec<usize> {
        (0..self.objects.len()).filter(|&i| !self.arrows.iter().any(|a| a.to == i)).collect()
    }

    pub fn is_loop_free(&self) -> bool {
        let n = self.objects.len();
        let mut indeg = vec![0usize; n];
        for a in &self.arrows {
            indeg[a.to] += 1;
        }
        let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for a in self.arrows.iter().filter(|a| a.from == v) {
                indeg[a.to] -= 1;
                if indeg[a.to] == 0 {
                    stack.push(a.to);
                }
            }
        }
        seen == n
    }
}

/// A limit cone (legs out of the apex) or colimit cocone (legs into the
/// apex); one leg per diagram object.
pub struct Cone<C: ModelCategory + ?Sized> {
    pub apex: C::Obj,
    pub legs: Vec<C::Map>,
}

impl<C: ModelCategory + ?Sized> Clone for Cone<C> {
    fn clone(&self) -> Self {
        Cone { apex: self.apex.clone(), legs: self.legs.clone() }
    }
}

impl<C: ModelCategory + ?Sized> Debug for Cone<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cone").field("apex", &self.apex).field("legs", &self.legs).finish()
    }
}

/// The contract a proper model category must meet to be lifted to its
/// pro-category.
pub trait ModelCategory: Send + Sync {
    type Obj: Clone + PartialEq + Eq + Debug + Send + Sync;
    type Map: Clone + PartialEq + Eq + Debug + Send + Sync;

    /// Instance tag used in documents and certificates.
    fn tag(&self) -> &'static str;

    fn source<'a>(&self, f: &'a Self::Map) -> &'a Self::Obj;
    fn target<'a>(&self, f: &'a Self::Map) -> &'a Self::Obj;
    fn identity(&self, x: &Self::Obj) -> Self::Map;

    /// `g ∘ f`
    fn compose(&self, g: &Self::Map, f: &Self::Map) -> Result<Self::Map>;

    fn validate_object(&self, x: &Self::Obj) -> Result<()>;
    fn validate_map(&self, f: &Self::Map) -> Result<()>;

    fn classify(&self, f: &Self::Map) -> Result<MapClasses>;

    /// Two-sided inverse, when `f` is an isomorphism.
    fn inverse(&self, f: &Self::Map) -> Option<Self::Map>;

    fn factor(&self, f: &Self::Map, mode: FactorMode) -> Result<Factorization<Self>>;

    /// Solves a lifting problem. `Ok(None)` when the square's maps do not
    /// meet either lifting pairing; an error when the square does not commute.
    fn solve_lift(&self, square: &Square<Self>) -> Result<Option<Self::Map>>;

    fn limit(&self, d: &Diagram<Self>) -> Result<Cone<Self>>;
    fn colimit(&self, d: &Diagram<Self>) -> Result<Cone<Self>>;

    /// The map into a limit apex induced by a cone with apex `apex`.
    fn limit_factor(&self, limit: &Cone<Self>, apex: &Self::Obj, legs: &[Self::Map]) -> Result<Self::Map>;

    /// The map out of a colimit apex induced by a cocone with apex `apex`.
    fn colimit_factor(&self, colimit: &Cone<Self>, apex: &Self::Obj, legs: &[Self::Map]) -> Result<Self::Map>;

    /// Whether maps out of a common object are jointly monic.
    fn jointly_monic(&self, legs: &[Self::Map]) -> bool;

    /// Every map `x -> y`, when there are at most `cap` of them.
    fn enumerate_hom(&self, x: &Self::Obj, y: &Self::Obj, cap: usize) -> Option<Vec<Self::Map>>;

    fn is_iso(&self, f: &Self::Map) -> bool {
        self.inverse(f).is_some()
    }

    fn compose_all(&self, maps: &[&Self::Map]) -> Result<Self::Map> {
        let (first, rest) = maps.split_first().ok_or_else(|| Error::pre("empty composite"))?;
        rest.iter().try_fold((*first).clone(), |acc, g| self.compose(g, &acc))
    }

    fn square_commutes(&self, sq: &Square<Self>) -> Result<bool> {
        Ok(self.compose(&sq.right, &sq.top)? == self.compose(&sq.bottom, &sq.left)?)
    }
}

/// Checks that `cone` is a cone over `d`: every arrow's triangle commutes.
pub fn is_cone<C: ModelCategory>(cat: &C, d: &Diagram<C>, cone: &Cone<C>) -> Result<bool> {
    if cone.legs.len() != d.objects.len() {
        return Ok(false);
    }
    for a in &d.arrows {
        if cat.compose(&a.map, &cone.legs[a.from])? != cone.legs[a.to] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that `cocone` is a cocone under `d`.
pub fn is_cocone<C: ModelCategory>(cat: &C, d: &Diagram<C>, cocone: &Cone<C>) -> Result<bool> {
    if cocone.legs.len() != d.objects.len() {
        return Ok(false);
    }
    for a in &d.arrows {
        if cat.compose(&cocone.legs[a.to], &a.map)? != cocone.legs[a.from] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Cone-comparison check of the limit universal property against a family of
/// test cones: the limit is a cone, its legs are jointly monic, and each test
/// cone factors through it compatibly.
pub fn check_limit<C: ModelCategory>(cat: &C, d: &Diagram<C>, limit: &Cone<C>, tests: &[Cone<C>]) -> Result<bool> {
    if !is_cone(cat, d, limit)? || !(limit.legs.is_empty() || cat.jointly_monic(&limit.legs)) {
        return Ok(false);
    }
    for t in tests {
        let u = cat.limit_factor(limit, &t.apex, &t.legs)?;
        for (leg, want) in limit.legs.iter().zip(&t.legs) {
            if &cat.compose(leg, &u)? != want {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
