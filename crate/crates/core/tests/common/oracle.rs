//! Brute-force oracles, independent of the library constructions.
//!
//! Pro-objects of finite sets are flattened to plain data (order relation,
//! level sizes, structure maps as image vectors) and the pro-hom set
//! `lim_s colim_t Hom(X_t, Y_s)` is computed literally: a union-find over
//! all pairs `(t, g)` for the filtered colimit, then a search for compatible
//! families for the limit.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use promc::base::{FinMap, FinSet, SetBij};
use promc::index::FinitePoset;
use promc::pro::ProObject;

/// A diagram of finite sets as plain data. `maps[&(t, s)]` is `X_t -> X_s`
/// for `s <= t`.
#[derive(Clone, Debug)]
pub struct Plain {
    pub le: Vec<Vec<bool>>,
    pub sizes: Vec<usize>,
    pub maps: HashMap<(usize, usize), Vec<usize>>,
}

pub fn images(f: &FinMap) -> Vec<usize> {
    f.images().collect()
}

/// Flattens the first `levels` levels of `x` (all of them when finite).
pub fn plain(x: &ProObject<SetBij>, levels: usize) -> Plain {
    let n = levels;
    let le: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| x.le(a, b)).collect()).collect();
    let sizes = (0..n).map(|s| x.value(s).len()).collect();
    let mut maps = HashMap::new();
    for t in 0..n {
        for s in 0..n {
            if le[s][t] {
                maps.insert((t, s), images(&x.map(&SetBij, t, s).unwrap()));
            }
        }
    }
    Plain { le, sizes, maps }
}

/// Every function `[n] -> [m]` as an image vector.
pub fn all_functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|f| (0..m).map(move |v| [f.clone(), vec![v]].concat())).collect();
    }
    out
}

fn compose(g: &[usize], f: &[usize]) -> Vec<usize> {
    f.iter().map(|&i| g[i]).collect()
}

/// `colim_t Hom(X_t, Y_s)` for one `s`.
struct Colimit {
    class: HashMap<(usize, Vec<usize>), usize>,
    count: usize,
}

fn colimit(x: &Plain, ys: usize) -> Colimit {
    let mut elems = Vec::new();
    let mut at = HashMap::new();
    for (t, &n) in x.sizes.iter().enumerate() {
        for g in all_functions(n, ys) {
            at.insert((t, g.clone()), elems.len());
            elems.push((t, g));
        }
    }
    let mut uf = UnionFind::new(elems.len());
    for (k, (t, g)) in elems.iter().enumerate() {
        for t2 in 0..x.sizes.len() {
            if t2 != *t && x.le[*t][t2] {
                let moved = compose(g, &x.maps[&(t2, *t)]);
                uf.union(k, at[&(t2, moved)]);
            }
        }
    }
    let mut ids = HashMap::new();
    let mut class = HashMap::new();
    for (k, e) in elems.into_iter().enumerate() {
        let next = ids.len();
        let id = *ids.entry(uf.find(k)).or_insert(next);
        class.insert(e, id);
    }
    Colimit { count: ids.len(), class }
}

/// `lim_s colim_t Hom(X_t, Y_s)`, listed as compatible families of colimit
/// classes.
pub struct ProHom {
    colimits: Vec<Colimit>,
    pub families: BTreeSet<Vec<usize>>,
}

impl ProHom {
    pub fn class_of(&self, s: usize, t: usize, g: &[usize]) -> usize {
        self.colimits[s].class[&(t, g.to_vec())]
    }
}

pub fn pro_hom(x: &Plain, y: &Plain) -> ProHom {
    let ny = y.sizes.len();
    let colimits: Vec<Colimit> = y.sizes.iter().map(|&m| colimit(x, m)).collect();
    // Transition maps on classes along Y_s -> Y_s2; well-definedness is asserted.
    let mut step: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for s in 0..ny {
        for s2 in 0..ny {
            if s2 == s || !y.le[s2][s] {
                continue;
            }
            let mut table = vec![usize::MAX; colimits[s].count];
            for ((t, g), &c) in &colimits[s].class {
                let image = colimits[s2].class[&(*t, compose(&y.maps[&(s, s2)], g))];
                assert!(table[c] == usize::MAX || table[c] == image, "transition is not well defined");
                table[c] = image;
            }
            step.insert((s, s2), table);
        }
    }
    let mut order: Vec<usize> = (0..ny).collect();
    order.sort_by_key(|&s| std::cmp::Reverse((0..ny).filter(|&a| y.le[a][s]).count()));
    let mut families = BTreeSet::new();
    let mut current = vec![usize::MAX; ny];
    search(&colimits, &step, &order, 0, &mut current, &mut families);
    ProHom { colimits, families }
}

fn search(
    colimits: &[Colimit],
    step: &HashMap<(usize, usize), Vec<usize>>,
    order: &[usize],
    k: usize,
    current: &mut Vec<usize>,
    out: &mut BTreeSet<Vec<usize>>,
) {
    if k == order.len() {
        out.insert(current.clone());
        return;
    }
    let s = order[k];
    for c in 0..colimits[s].count {
        current[s] = c;
        let fits = order[..k].iter().all(|&a| {
            let from_a = step.get(&(a, s)).is_none_or(|t| t[current[a]] == c);
            let to_a = step.get(&(s, a)).is_none_or(|t| t[c] == current[a]);
            from_a && to_a
        });
        if fits {
            search(colimits, step, order, k + 1, current, out);
        }
    }
    current[s] = usize::MAX;
}

/// The directed posets with at most three elements, up to isomorphism.
pub fn small_posets() -> Vec<Arc<FinitePoset>> {
    vec![
        Arc::new(FinitePoset::point()),
        Arc::new(FinitePoset::chain(2)),
        Arc::new(FinitePoset::chain(3)),
        Arc::new(FinitePoset::from_covers(&["a", "b", "m"], &[("a", "m"), ("b", "m")]).unwrap()),
    ]
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    permutations(n - 1)
        .into_iter()
        .flat_map(|p| (0..n).map(move |i| [&p[..i], &[n - 1], &p[i..]].concat()))
        .collect()
}

fn cartesian(lists: &[Vec<Vec<usize>>]) -> Vec<Vec<Vec<usize>>> {
    lists.iter().fold(vec![Vec::new()], |acc, l| acc.into_iter().flat_map(|p| l.iter().map(move |x| [p.clone(), vec![x.clone()]].concat())).collect())
}

/// Every diagram of sets with at most `max_size` elements per level over
/// `poset`, one per isomorphism class of diagrams with that index.
pub fn diagrams(poset: &Arc<FinitePoset>, max_size: usize) -> Vec<ProObject<SetBij>> {
    let n = poset.len();
    let covers = poset.covers();
    let size_choices: Vec<Vec<usize>> = (0..=max_size).map(|k| vec![k]).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for sizes in cartesian(&vec![size_choices; n]) {
        let sizes: Vec<usize> = sizes.into_iter().map(|v| v[0]).collect();
        let per_cover: Vec<Vec<Vec<usize>>> = covers.iter().map(|&(s, t)| all_functions(sizes[t], sizes[s])).collect();
        let perms: Vec<Vec<Vec<usize>>> = sizes.iter().map(|&k| permutations(k)).collect();
        for maps in cartesian(&per_cover) {
            let key = cartesian(&perms)
                .into_iter()
                .map(|sigma| {
                    covers
                        .iter()
                        .zip(&maps)
                        .map(|(&(s, t), m)| {
                            let mut moved = vec![0; m.len()];
                            for (i, &v) in m.iter().enumerate() {
                                moved[sigma[t][i]] = sigma[s][v];
                            }
                            moved
                        })
                        .collect::<Vec<_>>()
                })
                .min()
                .unwrap();
            if !seen.insert((sizes.clone(), key)) {
                continue;
            }
            let values: Vec<FinSet> = sizes.iter().map(|&k| FinSet::range(k)).collect();
            let structure = covers
                .iter()
                .zip(&maps)
                .map(|(&(s, t), m)| (t, s, FinMap::new(values[t].clone(), values[s].clone(), m.clone()).unwrap()))
                .collect();
            out.push(ProObject::finite(&SetBij, poset.clone(), values, structure).unwrap());
        }
    }
    out
}

/// The whole family: every index poset with at most three elements and
/// every diagram over it with sets of at most three elements.
pub fn small_family() -> Vec<ProObject<SetBij>> {
    small_posets().iter().flat_map(|p| diagrams(p, 3)).collect()
}
