//! Polymorphisms of `(LO_2, B)` for a symmetric ternary `B`.
//!
//! An `n`-ary `f` is a polymorphism iff `(f(X), f(Y), f(Z))` lies in the
//! target for every partition `(X, Y, Z)` of `[n]`. The target is symmetric,
//! so only canonical (unordered) partitions are visited.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sets::{check_arity, partition_list, PartitionTriple, PolyTable, SubsetMask};
use crate::templates::Relation3;

/// Verdict of a membership check, with the first violated partition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyWitness {
    pub holds: bool,
    pub violation: Option<(PartitionTriple, [u8; 3])>,
}

/// Membership checker with the partition list of one arity cached.
#[derive(Clone, Debug)]
pub struct PolyChecker<'a> {
    arity: usize,
    target: &'a Relation3,
    partitions: Vec<[u32; 3]>,
}

impl<'a> PolyChecker<'a> {
    pub fn new(arity: usize, target: &'a Relation3) -> Result<Self> {
        check_arity(arity)?;
        if !target.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(PolyChecker { arity, target, partitions: partition_list(arity) })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn target(&self) -> &Relation3 {
        self.target
    }

    fn compatible(&self, f: &PolyTable) -> Result<()> {
        if f.arity() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: f.arity() });
        }
        if f.levels() != self.target.domain() {
            return Err(Error::DomainMismatch { table: f.levels(), target: self.target.domain() });
        }
        Ok(())
    }

    /// First violating canonical partition of the table seen through `value`.
    fn first_violation(&self, value: impl Fn(usize) -> u8) -> Option<([u32; 3], [u8; 3])> {
        self.partitions.iter().find_map(|&[x, y, z]| {
            let vals = [value(x as usize), value(y as usize), value(z as usize)];
            (!self.target.contains(vals[0], vals[1], vals[2])).then_some(([x, y, z], vals))
        })
    }

    pub fn check(&self, f: &PolyTable) -> Result<PolyWitness> {
        self.compatible(f)?;
        let violation = self.first_violation(|m| f[m]).map(|([x, y, z], vals)| {
            let n = self.arity;
            let p = PartitionTriple {
                x: SubsetMask::from_raw(x as usize, n),
                y: SubsetMask::from_raw(y as usize, n),
                z: SubsetMask::from_raw(z as usize, n),
            };
            (p, vals)
        });
        Ok(PolyWitness { holds: violation.is_none(), violation })
    }

    pub fn holds(&self, f: &PolyTable) -> Result<bool> {
        self.compatible(f)?;
        Ok(self.first_violation(|m| f[m]).is_none())
    }

    /// Whether `f` with the entry at `mask` replaced by `value` is a polymorphism.
    pub fn holds_with(&self, f: &PolyTable, mask: usize, value: u8) -> Result<bool> {
        self.compatible(f)?;
        Ok(self.first_violation(|m| if m == mask { value } else { f[m] }).is_none())
    }
}

/// Decides membership of `f` in `Pol(LO_2, target)`.
pub fn is_polymorphism(f: &PolyTable, target: &Relation3) -> Result<PolyWitness> {
    PolyChecker::new(f.arity(), target)?.check(f)
}

/// The projection `f(X) = [t in X]` over `{0,1,2}`.
pub fn projection(n: usize, t: usize) -> Result<PolyTable> {
    check_arity(n)?;
    if t == 0 || t > n {
        return Err(Error::VariableOutOfRange { var: t, arity: n });
    }
    PolyTable::from_fn(n, 3, |mask| (mask >> (t - 1) & 1) as u8)
}

/// The boolean threshold table of arity `3m + 1` that outputs 1 iff at
/// least `m + 1` variables are in the set.
pub fn threshold_lo2_h2(m: usize) -> Result<PolyTable> {
    let n = 3 * m + 1;
    check_arity(n)?;
    PolyTable::from_fn(n, 2, |mask| (mask.count_ones() as usize > m) as u8)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Filter {
    All,
    /// Sets of size at most 3 may only take values 0 and 1.
    NoSmall2Set,
}

impl Filter {
    pub fn max_arity(self) -> usize {
        match self {
            Filter::All => 4,
            Filter::NoSmall2Set => 6,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SearchStats {
    pub found: u64,
    pub nodes: u64,
    pub complete: bool,
}

/// Polymorphisms in ascending table order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Enumeration {
    pub tables: Vec<PolyTable>,
    pub nodes: u64,
    /// `false` when the node budget ran out; `tables` is then a partial list.
    pub complete: bool,
}

/// Masks ordered by popcount, then by bits.
fn assignment_order(n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..1usize << n).collect();
    order.sort_by_key(|&m| (m.count_ones(), m));
    order
}

struct Search<'a, V> {
    target: &'a Relation3,
    order: Vec<usize>,
    /// Partitions whose last mask in `order` is at each depth.
    closing: Vec<Vec<[u32; 3]>>,
    domains: Vec<u8>,
    values: Vec<u8>,
    nodes: u64,
    found: u64,
    budget: u64,
    aborted: bool,
    visit: V,
}

impl<V: FnMut(&[u8])> Search<'_, V> {
    fn run(&mut self, depth: usize) {
        if depth == self.order.len() {
            self.found += 1;
            (self.visit)(&self.values);
            return;
        }
        let mask = self.order[depth];
        for v in 0..self.domains[mask] {
            if self.nodes >= self.budget {
                self.aborted = true;
                return;
            }
            self.nodes += 1;
            self.values[mask] = v;
            let vals = &self.values;
            let ok = self.closing[depth]
                .iter()
                .all(|&[x, y, z]| self.target.contains(vals[x as usize], vals[y as usize], vals[z as usize]));
            if ok {
                self.run(depth + 1);
                if self.aborted {
                    return;
                }
            }
        }
    }
}

/// Depth-first enumeration that hands each polymorphism's value table to
/// `visit` as soon as it is complete (search order, not table order).
pub fn for_each_polymorphism(
    n: usize,
    target: &Relation3,
    filter: Filter,
    budget: u64,
    visit: impl FnMut(&[u8]),
) -> Result<SearchStats> {
    check_arity(n)?;
    if n > filter.max_arity() {
        return Err(Error::ArityOutOfRange(n));
    }
    if !target.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let order = assignment_order(n);
    let mut position = vec![0usize; order.len()];
    for (i, &m) in order.iter().enumerate() {
        position[m] = i;
    }
    let mut closing = vec![Vec::new(); order.len()];
    for p in partition_list(n) {
        let last = p.iter().map(|&m| position[m as usize]).max().unwrap_or(0);
        closing[last].push(p);
    }
    let levels = target.domain();
    let domains = (0..1usize << n)
        .map(|m| match filter {
            Filter::NoSmall2Set if m.count_ones() <= 3 => levels.min(2),
            _ => levels,
        })
        .collect();
    let mut search = Search {
        target,
        values: vec![0; order.len()],
        order,
        closing,
        domains,
        nodes: 0,
        found: 0,
        budget,
        aborted: false,
        visit,
    };
    search.run(0);
    Ok(SearchStats { found: search.found, nodes: search.nodes, complete: !search.aborted })
}

/// Every `n`-ary polymorphism passing `filter`, once each, sorted by table.
pub fn enumerate_polymorphisms(n: usize, target: &Relation3, filter: Filter, budget: u64) -> Result<Enumeration> {
    let levels = target.domain();
    let mut tables = Vec::new();
    let stats = for_each_polymorphism(n, target, filter, budget, |values| {
        tables.push(PolyTable::from_parts_unchecked(n, levels, values.to_vec()));
    })?;
    tables.sort_unstable();
    Ok(Enumeration { tables, nodes: stats.nodes, complete: stats.complete })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::templates::{lo_relation, nae_relation};

    fn lo3() -> Relation3 {
        lo_relation(3).unwrap()
    }

    /// Every table over `levels` values of arity `n`, by brute force.
    fn brute_force(n: usize, target: &Relation3) -> Vec<Vec<u8>> {
        let size = 1usize << n;
        let levels = target.domain() as usize;
        let total = levels.pow(size as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut c = code;
            let mut values = vec![0u8; size];
            // most significant digit is mask 0 so output is already sorted
            for m in (0..size).rev() {
                values[m] = (c % levels) as u8;
                c /= levels;
            }
            let t = PolyTable::new(n, levels, values.clone()).unwrap();
            if is_polymorphism(&t, target).unwrap().holds {
                out.push(values);
            }
        }
        out
    }

    #[test]
    fn projections_are_polymorphisms() {
        let lo3 = lo3();
        let lo2 = lo_relation(2).unwrap();
        for n in 1..=10 {
            for t in 1..=n {
                let p = projection(n, t).unwrap();
                assert!(is_polymorphism(&p, &lo3).unwrap().holds);
                assert!(is_polymorphism(&p.with_levels(2).unwrap(), &lo2).unwrap().holds);
            }
        }
    }

    #[test]
    fn projection_values() {
        let p = projection(3, 2).unwrap();
        assert_eq!(p.value(SubsetMask::from_elements(3, &[2]).unwrap()), 1);
        assert_eq!(p.value(SubsetMask::from_elements(3, &[1, 3]).unwrap()), 0);
        assert_eq!(p.value(SubsetMask::full(3).unwrap()), 1);
        assert!(projection(3, 4).is_err());
        assert!(projection(3, 0).is_err());
    }

    #[test]
    fn constant_two_fails_on_first_partition() {
        let f = PolyTable::constant(3, 3, 2).unwrap();
        let w = is_polymorphism(&f, &lo3()).unwrap();
        assert!(!w.holds);
        let (p, vals) = w.violation.unwrap();
        assert_eq!(vals, [2, 2, 2]);
        assert!(p.x.is_empty() && p.y.is_empty());
        assert_eq!(p.z, SubsetMask::full(3).unwrap());
    }

    #[test]
    fn domain_mismatch_is_an_error() {
        let f = projection(2, 1).unwrap();
        assert_eq!(
            is_polymorphism(&f, &lo_relation(2).unwrap()).err(),
            Some(Error::DomainMismatch { table: 3, target: 2 })
        );
        let asym = Relation3::from_triples(3, [[0, 0, 1]]).unwrap();
        assert_eq!(is_polymorphism(&f, &asym).err(), Some(Error::NotSymmetric));
    }

    #[test]
    fn threshold_table() {
        let f = threshold_lo2_h2(1).unwrap();
        assert_eq!(f.arity(), 4);
        assert_eq!(f.value(SubsetMask::from_elements(4, &[1, 2]).unwrap()), 1);
        assert_eq!(f.value(SubsetMask::from_elements(4, &[3]).unwrap()), 0);
        for m in 1..=7 {
            let f = threshold_lo2_h2(m).unwrap();
            if m <= 4 {
                assert!(is_polymorphism(&f, &nae_relation(2).unwrap()).unwrap().holds);
            }
        }
        assert!(threshold_lo2_h2(8).is_err());
        // as a {0,1,2} table the pair ({1,2},{3,4},{}) gives (1,1,0)
        let embedded = threshold_lo2_h2(1).unwrap().with_levels(3).unwrap();
        let w = is_polymorphism(&embedded, &lo3()).unwrap();
        assert!(!w.holds);
        assert_eq!(w.violation.unwrap().1, [0, 1, 1]);
    }

    #[test]
    fn unary_polymorphisms() {
        let e = enumerate_polymorphisms(1, &lo3(), Filter::All, u64::MAX).unwrap();
        let digits: Vec<_> = e.tables.iter().map(|t| t.digits()).collect();
        assert_eq!(digits, ["01", "02", "12"]);
        assert_eq!(brute_force(1, &lo3()).len(), 3);
        assert_eq!(e.tables.iter().filter(|t| **t == projection(1, 1).unwrap()).count(), 1);
    }

    #[test]
    fn enumeration_matches_brute_force_up_to_three() {
        let lo3 = lo3();
        for n in 1..=3 {
            let e = enumerate_polymorphisms(n, &lo3, Filter::All, u64::MAX).unwrap();
            assert!(e.complete);
            let ours: Vec<Vec<u8>> = e.tables.into_iter().map(PolyTable::into_values).collect();
            assert_eq!(ours, brute_force(n, &lo3), "n = {n}");
        }
    }

    #[test]
    fn lo2_polymorphisms_are_projections() {
        let lo2 = lo_relation(2).unwrap();
        for n in 1..=4 {
            let e = enumerate_polymorphisms(n, &lo2, Filter::All, u64::MAX).unwrap();
            let mut projections: Vec<_> = (1..=n).map(|t| projection(n, t).unwrap().with_levels(2).unwrap()).collect();
            projections.sort();
            assert_eq!(e.tables, projections);
        }
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let e = enumerate_polymorphisms(3, &lo3(), Filter::All, 50).unwrap();
        assert!(!e.complete);
        assert_eq!(e.nodes, 50);
    }

    #[test]
    fn filter_arity_limits() {
        assert!(enumerate_polymorphisms(5, &lo3(), Filter::All, 1).is_err());
        assert!(enumerate_polymorphisms(7, &lo3(), Filter::NoSmall2Set, 1).is_err());
    }
}
