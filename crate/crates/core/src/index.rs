//! Index posets: finite directed posets and the ω-tower.
//!
//! The order follows the pro-object convention: `t >= s` is the same thing
//! as a structure map `X_t -> X_s`, and directedness asks for upper bounds.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default truncation depth for ω-regime answers.
pub const DEFAULT_DEPTH: usize = 16;

/// The first axiom a raw relation fails, with a witness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexViolation {
    #[error("index is empty")]
    Empty,
    #[error("duplicate element {0:?}")]
    DuplicateElement(String),
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("not reflexive at {0:?}")]
    NotReflexive(String),
    #[error("not antisymmetric: {0:?} <= {1:?} <= {0:?}")]
    NotAntisymmetric(String, String),
    #[error("not transitive: {0:?} <= {1:?} <= {2:?} but not {0:?} <= {2:?}")]
    NotTransitive(String, String, String),
    #[error("not directed: {0:?} and {1:?} have no upper bound")]
    NotDirected(String, String),
    #[error("regime not supported here: {0}")]
    Unsupported(&'static str),
}

/// A finite directed poset. Elements are addressed by position; `le[a][b]`
/// holds when `a <= b`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinitePoset {
    names: Vec<String>,
    le: Vec<Vec<bool>>,
    max: usize,
}

impl std::fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FinitePoset{:?} covers {:?}", self.names, self.cover_names())
    }
}

impl FinitePoset {
    /// Validates a full `<=` relation given as `(lower, upper)` pairs.
    pub fn from_relation<S: AsRef<str>>(elements: &[S], pairs: &[(S, S)]) -> Result<Self, IndexViolation> {
        let (names, pos) = Self::names(elements)?;
        let n = names.len();
        let mut le = vec![vec![false; n]; n];
        for (a, b) in pairs {
            le[lookup(&pos, a.as_ref())?][lookup(&pos, b.as_ref())?] = true;
        }
        Self::check(names, le)
    }

    /// Builds from covering pairs `(lower, upper)` by reflexive-transitive
    /// closure, then validates.
    pub fn from_covers<S: AsRef<str>>(elements: &[S], covers: &[(S, S)]) -> Result<Self, IndexViolation> {
        let (names, pos) = Self::names(elements)?;
        let n = names.len();
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in covers {
            le[lookup(&pos, a.as_ref())?][lookup(&pos, b.as_ref())?] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if le[i][k] {
                    for j in 0..n {
                        if le[k][j] {
                            le[i][j] = true;
                        }
                    }
                }
            }
        }
        Self::check(names, le)
    }

    /// The chain `0 < 1 < ... < n-1` with decimal names.
    pub fn chain(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let covers: Vec<(String, String)> = (1..n).map(|i| ((i - 1).to_string(), i.to_string())).collect();
        Self::from_covers(&names, &covers).expect("chains are directed")
    }

    /// The one-point index.
    pub fn point() -> Self {
        Self::chain(1)
    }

    fn names<S: AsRef<str>>(elements: &[S]) -> Result<(Vec<String>, HashMap<String, usize>), IndexViolation> {
        if elements.is_empty() {
            return Err(IndexViolation::Empty);
        }
        let mut pos = HashMap::new();
        let mut names = Vec::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            let e = e.as_ref().to_string();
            if pos.insert(e.clone(), i).is_some() {
                return Err(IndexViolation::DuplicateElement(e));
            }
            names.push(e);
        }
        Ok((names, pos))
    }

    fn check(names: Vec<String>, le: Vec<Vec<bool>>) -> Result<Self, IndexViolation> {
        let n = names.len();
        let name = |i: usize| names[i].clone();
        for i in 0..n {
            if !le[i][i] {
                return Err(IndexViolation::NotReflexive(name(i)));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && le[i][j] && le[j][i] {
                    return Err(IndexViolation::NotAntisymmetric(name(i), name(j)));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !le[i][j] {
                    continue;
                }
                for k in 0..n {
                    if le[j][k] && !le[i][k] {
                        return Err(IndexViolation::NotTransitive(name(i), name(j), name(k)));
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if !(0..n).any(|u| le[i][u] && le[j][u]) {
                    return Err(IndexViolation::NotDirected(name(i), name(j)));
                }
            }
        }
        let max = (0..n).find(|&m| (0..n).all(|s| le[s][m])).expect("finite directed posets have a maximum");
        Ok(FinitePoset { names, le, max })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn element_names(&self) -> &[String] {
        &self.names
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// `s <= t`
    pub fn le(&self, s: usize, t: usize) -> bool {
        self.le[s][t]
    }

    /// `s < t`
    pub fn lt(&self, s: usize, t: usize) -> bool {
        s != t && self.le[s][t]
    }

    pub fn max(&self) -> usize {
        self.max
    }

    /// Strict predecessors of `t`, in increasing position.
    pub fn predecessors(&self, t: usize) -> Vec<usize> {
        (0..self.len()).filter(|&s| self.lt(s, t)).collect()
    }

    /// Elements `u` with `u >= s` for every `s` in `set`.
    pub fn upper_bounds(&self, set: &[usize]) -> Vec<usize> {
        (0..self.len()).filter(|&u| set.iter().all(|&s| self.le(s, u))).collect()
    }

    /// All related pairs `(t, s)` with `t > s`.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for t in 0..n {
            for s in 0..n {
                if self.lt(s, t) {
                    out.push((t, s));
                }
            }
        }
        out
    }

    /// Covering pairs `(lower, upper)` in position order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for s in 0..n {
            for t in 0..n {
                if self.lt(s, t) && !(0..n).any(|m| self.lt(s, m) && self.lt(m, t)) {
                    out.push((s, t));
                }
            }
        }
        out
    }

    pub fn cover_names(&self) -> Vec<(String, String)> {
        self.covers().into_iter().map(|(s, t)| (self.names[s].clone(), self.names[t].clone())).collect()
    }

    /// The induced sub-poset on `elements`, which must stay directed.
    pub fn restrict(&self, elements: &[usize]) -> Result<FinitePoset, IndexViolation> {
        let names = elements.iter().map(|&e| self.names[e].clone()).collect();
        let le = elements.iter().map(|&a| elements.iter().map(|&b| self.le(a, b)).collect()).collect();
        Self::check(names, le)
    }

    /// Order-respecting well-ordering; among the minimal remaining elements
    /// the lexicographically smallest name goes first.
    pub fn linear_extension(&self) -> WellOrdering {
        let n = self.len();
        let mut remaining: BTreeSet<(String, usize)> = (0..n).map(|i| (self.names[i].clone(), i)).collect();
        let mut order = Vec::with_capacity(n);
        while !remaining.is_empty() {
            let next = remaining
                .iter()
                .find(|(_, t)| !remaining.iter().any(|(_, s)| self.lt(*s, *t)))
                .cloned()
                .expect("a finite poset always has a minimal element");
            remaining.remove(&next);
            order.push(next.1);
        }
        WellOrdering::from_order(order)
    }
}

fn lookup(pos: &HashMap<String, usize>, name: &str) -> Result<usize, IndexViolation> {
    pos.get(name).copied().ok_or_else(|| IndexViolation::UnknownElement(name.to_string()))
}

/// A finite poset or the natural numbers with their usual order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IndexPoset {
    Finite(Arc<FinitePoset>),
    Omega,
}

impl IndexPoset {
    pub fn finite(p: FinitePoset) -> Self {
        IndexPoset::Finite(Arc::new(p))
    }

    pub fn as_finite(&self) -> Result<&FinitePoset, IndexViolation> {
        match self {
            IndexPoset::Finite(p) => Ok(p),
            IndexPoset::Omega => Err(IndexViolation::Unsupported("omega index where a finite one is required")),
        }
    }

    pub fn linear_extension(&self) -> Result<WellOrdering, IndexViolation> {
        Ok(self.as_finite()?.linear_extension())
    }
}

/// A bijection from a finite poset onto `0..n` that respects the order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WellOrdering {
    order: Vec<usize>,
    rank: Vec<usize>,
}

impl WellOrdering {
    fn from_order(order: Vec<usize>) -> Self {
        let mut rank = vec![0; order.len()];
        for (k, &e) in order.iter().enumerate() {
            rank[e] = k;
        }
        WellOrdering { order, rank }
    }

    /// `phi(e)`
    pub fn rank(&self, e: usize) -> usize {
        self.rank[e]
    }

    /// Elements in increasing `phi`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Checks the defining property against a poset.
    pub fn respects(&self, p: &FinitePoset) -> bool {
        self.order.len() == p.len()
            && (0..p.len()).all(|s| (0..p.len()).all(|t| !p.le(t, s) || self.rank[s] >= self.rank[t]))
    }
}

/// A monotone map between indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CofinalMap {
    Finite { from: Arc<FinitePoset>, to: Arc<FinitePoset>, map: Vec<usize> },
    /// Values `F(0), F(1), ...` on an initial segment of ω.
    Omega { values: Vec<u64> },
}

/// Outcome of a cofinality check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cofinality {
    Cofinal,
    /// Every `s < depth` is dominated by some sampled value.
    CofinalToDepth(usize),
    /// No source element maps above this target element.
    NotCofinal(String),
}

impl CofinalMap {
    pub fn is_monotone(&self) -> bool {
        match self {
            CofinalMap::Finite { from, to, map } => {
                map.len() == from.len()
                    && map.iter().all(|&v| v < to.len())
                    && (0..from.len()).all(|a| (0..from.len()).all(|b| !from.le(a, b) || to.le(map[a], map[b])))
            }
            CofinalMap::Omega { values } => values.windows(2).all(|w| w[0] <= w[1]),
        }
    }

    /// For a finite map, decides cofinality exactly. For an ω map, checks
    /// that every `s < depth` is reached, using only the sampled values.
    pub fn is_cofinal(&self, depth: usize) -> Result<Cofinality, IndexViolation> {
        if !self.is_monotone() {
            return Err(IndexViolation::Unsupported("map is not monotone"));
        }
        Ok(match self {
            CofinalMap::Finite { to, map, .. } => {
                match (0..to.len()).find(|&s| !map.iter().any(|&v| to.le(s, v))) {
                    Some(s) => Cofinality::NotCofinal(to.name(s).to_string()),
                    None => Cofinality::Cofinal,
                }
            }
            CofinalMap::Omega { values } => {
                let top = values.last().copied().unwrap_or(0);
                match (0..depth as u64).find(|&s| values.is_empty() || s > top) {
                    Some(s) => Cofinality::NotCofinal(s.to_string()),
                    None => Cofinality::CofinalToDepth(depth),
                }
            }
        })
    }
}

/// Serialized form of an index: the literal `"omega"` or elements plus covers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndexSpec {
    Omega(OmegaTag),
    Finite { elements: Vec<String>, covers: Vec<(String, String)> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaTag {
    Omega,
}

impl IndexSpec {
    pub fn build(&self) -> Result<IndexPoset, IndexViolation> {
        match self {
            IndexSpec::Omega(_) => Ok(IndexPoset::Omega),
            IndexSpec::Finite { elements, covers } => Ok(IndexPoset::finite(FinitePoset::from_covers(elements, covers)?)),
        }
    }

    pub fn of(index: &IndexPoset) -> Self {
        match index {
            IndexPoset::Omega => IndexSpec::Omega(OmegaTag::Omega),
            IndexPoset::Finite(p) => IndexSpec::Finite { elements: p.element_names().to_vec(), covers: p.cover_names() },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(v: &[(&'static str, &'static str)]) -> Vec<(&'static str, &'static str)> {
        v.to_vec()
    }

    #[test]
    fn incomparable_pair_is_not_directed() {
        let err = FinitePoset::from_covers(&["a", "b"], &[]).unwrap_err();
        assert_eq!(err, IndexViolation::NotDirected("a".into(), "b".into()));
    }

    #[test]
    fn v_shape_is_not_directed() {
        let err = FinitePoset::from_covers(&["a", "b", "c"], &pairs(&[("c", "a"), ("c", "b")])).unwrap_err();
        assert_eq!(err, IndexViolation::NotDirected("a".into(), "b".into()));
    }

    #[test]
    fn chain_is_valid() {
        let p = FinitePoset::chain(3);
        assert_eq!(p.max(), 2);
        assert_eq!(p.predecessors(2), vec![0, 1]);
    }

    #[test]
    fn empty_is_rejected() {
        let none: [&str; 0] = [];
        assert_eq!(FinitePoset::from_covers(&none, &[]).unwrap_err(), IndexViolation::Empty);
    }

    #[test]
    fn raw_relation_axioms() {
        let e = ["0", "1"];
        assert_eq!(
            FinitePoset::from_relation(&e, &pairs(&[("0", "1"), ("1", "1")])).unwrap_err(),
            IndexViolation::NotReflexive("0".into())
        );
        assert_eq!(
            FinitePoset::from_relation(&e, &pairs(&[("0", "0"), ("1", "1"), ("0", "1"), ("1", "0")])).unwrap_err(),
            IndexViolation::NotAntisymmetric("0".into(), "1".into())
        );
        let e3 = ["0", "1", "2"];
        let rel = pairs(&[("0", "0"), ("1", "1"), ("2", "2"), ("0", "1"), ("1", "2")]);
        assert_eq!(
            FinitePoset::from_relation(&e3, &rel).unwrap_err(),
            IndexViolation::NotTransitive("0".into(), "1".into(), "2".into())
        );
    }

    #[test]
    fn diamond_extension_breaks_ties_by_name() {
        let p = FinitePoset::from_covers(
            &["2", "b", "a", "0"],
            &pairs(&[("0", "a"), ("0", "b"), ("a", "2"), ("b", "2")]),
        )
        .unwrap();
        let w = p.linear_extension();
        let names: Vec<&str> = w.order().iter().map(|&e| p.name(e)).collect();
        assert_eq!(names, vec!["0", "a", "b", "2"]);
        assert!(w.respects(&p));
    }

    #[test]
    fn cofinality() {
        let chain = Arc::new(FinitePoset::chain(2));
        let point = Arc::new(FinitePoset::point());
        let bottom = CofinalMap::Finite { from: point.clone(), to: chain.clone(), map: vec![0] };
        assert_eq!(bottom.is_cofinal(DEFAULT_DEPTH).unwrap(), Cofinality::NotCofinal("1".into()));
        let top = CofinalMap::Finite { from: point, to: chain.clone(), map: vec![1] };
        assert_eq!(top.is_cofinal(DEFAULT_DEPTH).unwrap(), Cofinality::Cofinal);
        let id = CofinalMap::Finite { from: chain.clone(), to: chain, map: vec![0, 1] };
        assert_eq!(id.is_cofinal(DEFAULT_DEPTH).unwrap(), Cofinality::Cofinal);
        let diag = CofinalMap::Omega { values: (0..=16).collect() };
        assert_eq!(diag.is_cofinal(16).unwrap(), Cofinality::CofinalToDepth(16));
        let stuck = CofinalMap::Omega { values: vec![0; 17] };
        assert_eq!(stuck.is_cofinal(16).unwrap(), Cofinality::NotCofinal("1".into()));
    }

    #[test]
    fn omega_spec_round_trip() {
        let spec: IndexSpec = serde_json::from_str("\"omega\"").unwrap();
        assert_eq!(spec.build().unwrap(), IndexPoset::Omega);
        assert_eq!(serde_json::to_string(&IndexSpec::of(&IndexPoset::Omega)).unwrap(), "\"omega\"");
    }
}
