//! Classification of polymorphisms: dictating variables, conformance with
//! the recoloured-projection structure, and the reconfiguration graph.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::Result;
use crate::polymorph::{for_each_polymorphism, Filter};
use crate::recolour::{enumerate_pure_saturations, has_small_2set, lo3, static_sets, SMALL};
use crate::sets::{PolyTable, SubsetMask};

pub mod suite;

/// Every `t` with `f(S) = [t in S]` on all static boolean sets `S`.
pub fn dictating_variables(f: &PolyTable) -> Result<SubsetMask> {
    let flags = static_sets(f)?;
    let full = f.full_mask();
    let mut candidates = full;
    for (s, _) in flags.iter().enumerate().filter(|(_, &st)| st) {
        candidates &= if f[s] == 1 { s } else { full ^ s };
    }
    Ok(f.mask(candidates))
}

/// Some mask of size at most 3 has value 1 or 2.
pub fn kneser_check(f: &PolyTable) -> bool {
    f.values().iter().enumerate().any(|(m, &v)| v >= 1 && m.count_ones() <= SMALL)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Conformance {
    /// Unique dictating variable as predicted.
    Conforms,
    /// `f` has a small 2-set, so there is nothing to check.
    HypothesisUnmet,
    Violation,
    /// The pure-saturation search ran out of budget before deciding.
    Unknown,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StructureVerdict {
    pub arity: usize,
    pub has_small_2set: bool,
    /// Arity at most 6: the dictating variables of `f` itself.
    pub dictating: Option<SubsetMask>,
    /// Arity 7 and up: the dictating variable of every pure saturation
    /// found that has exactly one.
    pub pure_saturation_dictators: BTreeSet<usize>,
    pub pure_saturations: usize,
    pub conformance: Conformance,
}

impl StructureVerdict {
    pub fn conforms(&self) -> bool {
        matches!(self.conformance, Conformance::Conforms | Conformance::HypothesisUnmet)
    }

    /// The unique dictating variable when the verdict has one.
    pub fn dictator(&self) -> Option<usize> {
        if self.conformance != Conformance::Conforms {
            return None;
        }
        match self.dictating {
            Some(d) => d.elements().next(),
            None => self.pure_saturation_dictators.iter().next().copied(),
        }
    }
}

/// Checks `f` against the structure theorem. Arity 7 and up runs the
/// pure-saturation search with `budget` nodes.
pub fn verify_structure_theorem(f: &PolyTable, budget: u64) -> Result<StructureVerdict> {
    let n = f.arity();
    let mut verdict = StructureVerdict {
        arity: n,
        has_small_2set: has_small_2set(f),
        dictating: None,
        pure_saturation_dictators: BTreeSet::new(),
        pure_saturations: 0,
        conformance: Conformance::HypothesisUnmet,
    };
    if verdict.has_small_2set {
        return Ok(verdict);
    }
    if n <= 6 {
        let d = dictating_variables(f)?;
        verdict.dictating = Some(d);
        verdict.conformance = if d.len() == 1 { Conformance::Conforms } else { Conformance::Violation };
        return Ok(verdict);
    }
    let pure = enumerate_pure_saturations(f, budget)?;
    verdict.pure_saturations = pure.tables.len();
    let mut all_singletons = true;
    for g in &pure.tables {
        let d = dictating_variables(g)?;
        if d.len() == 1 {
            verdict.pure_saturation_dictators.extend(d.elements());
        } else {
            all_singletons = false;
        }
    }
    let agreed = all_singletons && verdict.pure_saturation_dictators.len() == 1;
    verdict.conformance = if !all_singletons || verdict.pure_saturation_dictators.len() > 1 {
        Conformance::Violation
    } else if !pure.complete {
        Conformance::Unknown
    } else if agreed {
        Conformance::Conforms
    } else {
        // complete search with no pure saturation at all
        Conformance::Violation
    };
    Ok(verdict)
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Component {
    pub size: usize,
    /// Dictating coordinates of the projections in this component.
    pub projections: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReconfigReport {
    pub arity: usize,
    pub vertices: usize,
    pub full_components: usize,
    /// Vertices left after dropping tables with a small 2-set.
    pub surviving: usize,
    /// Components of the surviving graph, largest first, ties by first projection.
    pub components: Vec<Component>,
    pub complete: bool,
}

fn components(tables: &[Vec<u8>], n: usize) -> Vec<Component> {
    let index: HashMap<&[u8], usize> = tables.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let mut uf = UnionFind::new(tables.len());
    let mut probe = vec![0u8; 1 << n];
    for (i, t) in tables.iter().enumerate() {
        probe.copy_from_slice(t);
        for m in 0..probe.len() {
            let old = probe[m];
            for v in (0..3u8).filter(|&v| v != old) {
                probe[m] = v;
                if let Some(&j) = index.get(probe.as_slice()) {
                    uf.union(i, j);
                }
            }
            probe[m] = old;
        }
    }
    let mut by_root: HashMap<usize, Component> = HashMap::new();
    for i in 0..tables.len() {
        let r = uf.find(i);
        by_root.entry(r).or_insert(Component { size: 0, projections: Vec::new() }).size += 1;
    }
    for t in 1..=n {
        let proj: Vec<u8> = (0..1usize << n).map(|m| (m >> (t - 1) & 1) as u8).collect();
        if let Some(&i) = index.get(proj.as_slice()) {
            let r = uf.find(i);
            by_root.get_mut(&r).expect("root exists").projections.push(t);
        }
    }
    let mut out: Vec<Component> = by_root.into_values().collect();
    out.sort_by(|a, b| b.size.cmp(&a.size).then_with(|| a.projections.cmp(&b.projections)));
    out
}

/// Builds `G_n` from the exhaustive enumeration, drops the tables with a
/// small 2-set and reports the connected components of what is left.
pub fn reconfig_graph(n: usize, budget: u64) -> Result<ReconfigReport> {
    let lo3 = lo3();
    let mut all = Vec::new();
    let stats = for_each_polymorphism(n, &lo3, Filter::All, budget, |v| all.push(v.to_vec()))?;
    let full_components = components(&all, n).len();
    let vertices = all.len();
    let kept: Vec<Vec<u8>> = all
        .into_iter()
        .filter(|v| !v.iter().enumerate().any(|(m, &x)| x == 2 && m.count_ones() <= SMALL))
        .collect();
    Ok(ReconfigReport {
        arity: n,
        vertices,
        full_components,
        surviving: kept.len(),
        components: components(&kept, n),
        complete: stats.complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{example_f, example_g};
    use crate::polymorph::{enumerate_polymorphisms, projection};
    use crate::recolour::DEFAULT_BUDGET;

    #[test]
    fn projections_dictate_their_coordinate() {
        for n in 1..=7 {
            for t in 1..=n {
                let p = projection(n, t).unwrap();
                assert!(dictating_variables(&p).unwrap().contains(t));
                assert!(kneser_check(&p));
            }
        }
    }

    #[test]
    fn example_structure() {
        assert_eq!(dictating_variables(&example_g()).unwrap(), SubsetMask::from_elements(9, &[1]).unwrap());
        assert!(kneser_check(&example_g()));
        let v = verify_structure_theorem(&example_f(), DEFAULT_BUDGET).unwrap();
        assert_eq!(v.conformance, Conformance::Conforms);
        assert_eq!(v.dictator(), Some(1));
        assert_eq!(v.pure_saturations, 1);
    }

    #[test]
    fn small_two_set_is_vacuous() {
        let f = projection(4, 1).unwrap().with_value(0b0111, 2).unwrap();
        let v = verify_structure_theorem(&f, 10).unwrap();
        assert!(v.has_small_2set);
        assert_eq!(v.conformance, Conformance::HypothesisUnmet);
        assert!(v.conforms());
    }

    #[test]
    fn kneser_matches_scan_on_arity_three() {
        let lo3 = lo3();
        for f in enumerate_polymorphisms(3, &lo3, Filter::All, u64::MAX).unwrap().tables {
            // every mask of [3] has at most 3 elements
            assert_eq!(kneser_check(&f), f.values().iter().any(|&v| v > 0));
            assert!(kneser_check(&f));
        }
    }

    #[test]
    fn unary_reconfiguration_graph() {
        let r = reconfig_graph(1, u64::MAX).unwrap();
        assert_eq!(r.vertices, 3);
        assert_eq!(r.surviving, 1);
        assert_eq!(r.components, [Component { size: 1, projections: vec![1] }]);
    }

    #[test]
    fn union_find_basics() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1));
        assert!(uf.union(3, 4));
        assert!(!uf.union(1, 0));
        assert_eq!(uf.find(0), uf.find(1));
        assert_ne!(uf.find(1), uf.find(3));
    }
}
