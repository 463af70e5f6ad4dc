//! Recolouring calculus for polymorphisms of `(LO_2, LO_3)`: 2-sets, static
//! sets, upward closure, saturation and pure saturation.
//!
//! Every function here expects a table over `{0,1,2}`. Where a function
//! takes a polymorphism as input it does not re-check membership.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashSet;

use crate::error::{Error, Result};
use crate::polymorph::PolyChecker;
use crate::sets::{submasks, PolyTable, SubsetMask};
use crate::templates::{lo_relation, Relation3};

/// Largest size of a "small" 2-set.
pub const SMALL: u32 = 3;

pub(crate) fn lo3() -> Relation3 {
    lo_relation(3).expect("LO_3 is a valid relation")
}

fn ternary(f: &PolyTable) -> Result<()> {
    if f.levels() == 3 {
        Ok(())
    } else {
        Err(Error::NotTernary(f.levels()))
    }
}

/// Whether `f` stays a polymorphism after setting `f(X) = i`.
pub fn is_recolourable_to(f: &PolyTable, x: SubsetMask, i: u8) -> Result<bool> {
    ternary(f)?;
    let old = f.value(x);
    if i == old {
        return Err(Error::SameValue { mask: x.index(), value: i });
    }
    let lo3 = lo3();
    PolyChecker::new(f.arity(), &lo3)?.holds_with(f, x.index(), i)
}

fn boolean_set(f: &PolyTable, x: SubsetMask) -> Result<()> {
    ternary(f)?;
    if f.value(x) == 2 {
        Err(Error::TwoSet(x.index()))
    } else {
        Ok(())
    }
}

/// A boolean `X` is static iff it is one part of a partition whose three
/// values are all boolean.
pub fn is_static(f: &PolyTable, x: SubsetMask) -> Result<bool> {
    boolean_set(f, x)?;
    let rest = x.complement().index();
    Ok(submasks(rest).any(|y| f.is_boolean(y) && f.is_boolean(rest ^ y)))
}

/// The same property through its other face: `X` cannot be flipped to the
/// opposite boolean value.
pub fn is_static_by_recolouring(f: &PolyTable, x: SubsetMask) -> Result<bool> {
    boolean_set(f, x)?;
    Ok(!is_recolourable_to(f, x, 1 - f.value(x))?)
}

/// Flags every static boolean set in one sweep over the partitions.
pub fn static_sets(f: &PolyTable) -> Result<Vec<bool>> {
    ternary(f)?;
    let mut flags = vec![false; f.values().len()];
    for [x, y, z] in crate::sets::RawPartitions::new(f.arity()) {
        if f.is_boolean(x) && f.is_boolean(y) && f.is_boolean(z) {
            flags[x] = true;
            flags[y] = true;
            flags[z] = true;
        }
    }
    Ok(flags)
}

/// `X` meets every 2-set of `f`. The empty set never qualifies: recolouring
/// it puts two 2s on `(∅, ∅, [n])`.
pub fn two_recolourable(f: &PolyTable, x: SubsetMask) -> Result<bool> {
    boolean_set(f, x)?;
    let bits = x.index();
    Ok(bits != 0 && f.sets_with_value(2).all(|t| t & bits != 0))
}

pub fn has_small_2set(f: &PolyTable) -> bool {
    f.sets_with_value(2).any(|m| m.count_ones() <= SMALL)
}

/// For each mask, whether it contains some 2-set (itself included).
fn contains_two_set(f: &PolyTable) -> Vec<bool> {
    let mut below = vec![false; f.values().len()];
    for m in 0..below.len() {
        below[m] = f[m] == 2 || bit_iter(m).any(|b| below[m ^ b]);
    }
    below
}

fn bit_iter(m: usize) -> impl Iterator<Item = usize> {
    let mut rest = m;
    core::iter::from_fn(move || {
        (rest != 0).then(|| {
            let low = rest & rest.wrapping_neg();
            rest ^= low;
            low
        })
    })
}

/// Inclusion-minimal 2-sets (no proper subset is a 2-set), ascending.
pub fn minimal_2sets(f: &PolyTable) -> Vec<SubsetMask> {
    let below = contains_two_set(f);
    f.sets_with_value(2)
        .filter(|&m| bit_iter(m).all(|b| !below[m ^ b]))
        .map(|m| f.mask(m))
        .collect()
}

/// `T_f`, the union of the minimal 2-sets.
pub fn t_union(f: &PolyTable) -> SubsetMask {
    let bits = minimal_2sets(f).iter().fold(0, |acc, s| acc | s.index());
    f.mask(bits)
}

pub fn is_upward_closed(f: &PolyTable) -> bool {
    let below = contains_two_set(f);
    (0..below.len()).all(|m| !below[m] || f[m] == 2)
}

pub fn is_complement_complete(f: &PolyTable) -> bool {
    let full = f.full_mask();
    (0..=full).all(|m| f[m] == 2 || f[full ^ m] == 2)
}

pub fn is_saturated(f: &PolyTable) -> bool {
    is_upward_closed(f) && is_complement_complete(f)
}

/// How complementary boolean pairs are resolved by [`saturate`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Policy {
    /// Recolour the member with more elements; on a tie the one with larger bits.
    DeterministicLarge,
    /// One pick per contested pair, in the order pairs are met. Once the
    /// list runs out the remaining pairs fall back to `DeterministicLarge`.
    Choices(Vec<Pick>),
}

/// Which member of a complementary pair `(X, complement X)`, `X` having the
/// smaller bits, is recoloured to 2.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Pick {
    Lower,
    Upper,
}

/// One recolouring step: the mask and its value before it became 2.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Step {
    pub mask: SubsetMask,
    pub old: u8,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SaturationResult {
    pub result: PolyTable,
    pub path: Vec<Step>,
    /// No 2-set of size at most 3.
    pub pure: bool,
}

impl SaturationResult {
    /// Replays the path from `start`, checking that every step turns a
    /// boolean set into a 2-set, every intermediate table is a polymorphism
    /// and the end point is `result`.
    pub fn replay(&self, start: &PolyTable) -> Result<bool> {
        let lo3 = lo3();
        let checker = PolyChecker::new(start.arity(), &lo3)?;
        let mut cur = start.clone();
        if !checker.holds(&cur)? {
            return Ok(false);
        }
        for step in &self.path {
            let m = step.mask.index();
            if cur[m] != step.old || step.old == 2 || !checker.holds_with(&cur, m, 2)? {
                return Ok(false);
            }
            cur.set(m, 2);
        }
        Ok(cur == self.result)
    }
}

/// Working state shared by the saturation procedures.
struct Saturator {
    table: PolyTable,
    path: Vec<Step>,
    record: bool,
}

impl Saturator {
    fn recolour(&mut self, m: usize) {
        if self.record {
            self.path.push(Step { mask: self.table.mask(m), old: self.table[m] });
        }
        self.table.set(m, 2);
    }

    /// Recolour every boolean superset of a 2-set, ascending.
    fn close_upwards(&mut self) {
        let below = contains_two_set(&self.table);
        for m in 0..below.len() {
            if below[m] && self.table[m] != 2 {
                self.recolour(m);
            }
        }
    }

    /// Recolour `m` and then every boolean superset of it.
    fn recolour_with_supersets(&mut self, m: usize) {
        let full = self.table.full_mask();
        let outside = full ^ m;
        for extra in submasks(outside) {
            if self.table[m | extra] != 2 {
                self.recolour(m | extra);
            }
        }
    }

    /// First complementary pair, from `start` on, with both members boolean.
    fn next_open_pair(&self, start: usize) -> Option<usize> {
        let full = self.table.full_mask();
        (start..=full / 2).find(|&x| self.table.is_boolean(x) && self.table.is_boolean(full ^ x))
    }
}

fn larger_member(x: usize, full: usize) -> usize {
    let y = full ^ x;
    match x.count_ones().cmp(&y.count_ones()) {
        core::cmp::Ordering::Greater => x,
        _ => y,
    }
}

/// Saturates `f` by exhaustive upward closure and complementary-pair
/// recolouring, resolving contested pairs by `policy`.
pub fn saturate(f: &PolyTable, policy: &Policy) -> Result<SaturationResult> {
    ternary(f)?;
    let full = f.full_mask();
    let mut sat = Saturator { table: f.clone(), path: Vec::new(), record: true };
    sat.close_upwards();
    let mut picks = match policy {
        Policy::DeterministicLarge => [].iter(),
        Policy::Choices(c) => c.iter(),
    };
    let mut start = 0;
    while let Some(x) = sat.next_open_pair(start) {
        let chosen = if x == 0 {
            // the empty set is never a 2-set
            full
        } else {
            match picks.next() {
                Some(Pick::Lower) => x,
                Some(Pick::Upper) => full ^ x,
                None => larger_member(x, full),
            }
        };
        sat.recolour_with_supersets(chosen);
        start = x + 1;
    }
    let pure = !has_small_2set(&sat.table);
    Ok(SaturationResult { result: sat.table, path: sat.path, pure })
}

/// Outcome of the pure-saturation search.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PureSaturations {
    /// Distinct end points, ascending.
    pub tables: Vec<PolyTable>,
    pub nodes: u64,
    /// `false` when the node budget ran out before the search finished.
    pub complete: bool,
}

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// All pure saturations of `f`, by depth-first search over the choices made
/// at complementary pairs, never creating a 2-set of size at most 3.
///
/// Branching on the first open pair is complete: any saturated `g` above
/// the current table is still reachable after committing to `g`'s side of
/// that pair, since the 2-sets of `g` form an intersecting family.
pub fn enumerate_pure_saturations(f: &PolyTable, budget: u64) -> Result<PureSaturations> {
    ternary(f)?;
    if has_small_2set(f) {
        return Ok(PureSaturations { tables: Vec::new(), nodes: 0, complete: true });
    }
    let full = f.full_mask();
    let mut start = Saturator { table: f.clone(), path: Vec::new(), record: false };
    start.close_upwards();

    let mut visited: HashSet<Vec<u8>> = HashSet::new();
    let mut found: BTreeSet<Vec<u8>> = BTreeSet::new();
    let mut stack = vec![(start.table, 0usize)];
    let mut nodes = 0u64;
    let mut complete = true;
    while let Some((table, from)) = stack.pop() {
        if nodes >= budget {
            complete = false;
            break;
        }
        nodes += 1;
        let sat = Saturator { table, path: Vec::new(), record: false };
        let Some(x) = sat.next_open_pair(from) else {
            found.insert(sat.table.into_values());
            continue;
        };
        let options = [full ^ x, x];
        for side in options.into_iter().filter(|&s| s != 0 && s.count_ones() > SMALL) {
            let mut next = Saturator { table: sat.table.clone(), path: Vec::new(), record: false };
            next.recolour_with_supersets(side);
            if visited.insert(next.table.values().to_vec()) {
                stack.push((next.table, x + 1));
            }
        }
    }
    let n = f.arity();
    let tables = found.into_iter().map(|v| PolyTable::from_parts_unchecked(n, 3, v)).collect();
    Ok(PureSaturations { tables, nodes, complete })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{example_f, example_g};
    use crate::polymorph::{enumerate_polymorphisms, is_polymorphism, projection, Filter};

    fn m(n: usize, e: &[usize]) -> SubsetMask {
        SubsetMask::from_elements(n, e).unwrap()
    }

    #[test]
    fn projection_complement_of_singleton_goes_to_two() {
        let p = projection(3, 1).unwrap();
        assert!(is_recolourable_to(&p, m(3, &[2, 3]), 2).unwrap());
        let direct = is_polymorphism(&p.with_value(0b110, 2).unwrap(), &lo3()).unwrap().holds;
        assert!(direct);
    }

    #[test]
    fn empty_set_never_becomes_two() {
        let lo3 = lo3();
        for f in enumerate_polymorphisms(3, &lo3, Filter::All, u64::MAX).unwrap().tables {
            if f[0] != 2 {
                assert!(!is_recolourable_to(&f, m(3, &[]), 2).unwrap());
            }
        }
        let f = example_f();
        assert!(!is_recolourable_to(&f, m(9, &[]), 2).unwrap());
    }

    #[test]
    fn recolouring_to_same_value_is_an_error() {
        let p = projection(2, 1).unwrap();
        assert_eq!(is_recolourable_to(&p, m(2, &[1]), 1).err(), Some(Error::SameValue { mask: 1, value: 1 }));
        let two = p.with_value(0b11, 2).unwrap();
        assert_eq!(is_static(&two, m(2, &[1, 2])).err(), Some(Error::TwoSet(3)));
        assert_eq!(two_recolourable(&two, m(2, &[1, 2])).err(), Some(Error::TwoSet(3)));
    }

    #[test]
    fn example_block_is_two_recolourable() {
        let f = example_f();
        let block = m(9, &[3, 4, 5, 6, 7, 8, 9]);
        assert!(is_recolourable_to(&f, block, 2).unwrap());
        assert!(two_recolourable(&f, block).unwrap());
    }

    #[test]
    fn projection_static_sets_agree() {
        for n in 1..=5 {
            for t in 1..=n {
                let p = projection(n, t).unwrap();
                let flags = static_sets(&p).unwrap();
                for x in 0..1usize << n {
                    let s = p.mask(x);
                    let a = is_static(&p, s).unwrap();
                    assert_eq!(a, is_static_by_recolouring(&p, s).unwrap());
                    assert_eq!(a, flags[x]);
                }
            }
        }
    }

    #[test]
    fn minimal_two_sets_of_example_g() {
        let g = example_g();
        let mins = minimal_2sets(&g);
        let block = m(9, &[3, 4, 5, 6, 7, 8, 9]);
        assert_eq!(mins.len(), 35);
        assert!(mins.iter().all(|s| s.len() == 4 && s.is_subset(block)));
        assert_eq!(t_union(&g), block);
        for a in &mins {
            for b in &mins {
                assert!(!a.is_disjoint(*b));
            }
        }
        assert!(minimal_2sets(&projection(4, 2).unwrap()).is_empty());
        assert!(t_union(&projection(4, 2).unwrap()).is_empty());
    }

    #[test]
    fn example_saturates_to_g() {
        let f = example_f();
        let r = saturate(&f, &Policy::DeterministicLarge).unwrap();
        assert_eq!(r.result, example_g());
        assert!(r.pure);
        assert!(r.replay(&f).unwrap());
        let pure = enumerate_pure_saturations(&f, DEFAULT_BUDGET).unwrap();
        assert!(pure.complete);
        assert_eq!(pure.tables, [example_g()]);
    }

    #[test]
    fn saturated_input_is_a_fixpoint() {
        let g = example_g();
        let r = saturate(&g, &Policy::DeterministicLarge).unwrap();
        assert!(r.path.is_empty());
        assert_eq!(r.result, g);
    }

    #[test]
    fn all_small_polymorphisms_saturate() {
        let lo3 = lo3();
        for n in 1..=3 {
            for f in enumerate_polymorphisms(n, &lo3, Filter::All, u64::MAX).unwrap().tables {
                for policy in [Policy::DeterministicLarge, Policy::Choices(vec![Pick::Lower; 4])] {
                    let r = saturate(&f, &policy).unwrap();
                    assert!(is_saturated(&r.result));
                    assert!(r.replay(&f).unwrap());
                    assert_eq!(r.pure, !has_small_2set(&r.result));
                }
            }
        }
    }

    #[test]
    fn projection_seven_has_a_forced_pure_saturation() {
        let p = projection(7, 1).unwrap();
        let pure = enumerate_pure_saturations(&p, DEFAULT_BUDGET).unwrap();
        assert!(pure.complete);
        assert_eq!(pure.tables.len(), 1);
        let g = &pure.tables[0];
        assert!(is_saturated(g) && !has_small_2set(g));
        assert_eq!(*g, saturate(&p, &Policy::DeterministicLarge).unwrap().result);
    }

    #[test]
    fn pure_search_budget_is_flagged() {
        let p = projection(8, 1).unwrap();
        let pure = enumerate_pure_saturations(&p, 200).unwrap();
        assert!(!pure.complete);
        assert_eq!(pure.nodes, 200);
        for g in &pure.tables {
            assert!(is_saturated(g) && !has_small_2set(g));
        }
    }

    #[test]
    fn small_two_set_means_no_pure_saturation() {
        let p = projection(4, 1).unwrap().with_value(0b0110, 2).unwrap();
        assert!(is_polymorphism(&p, &lo3()).unwrap().holds);
        let pure = enumerate_pure_saturations(&p, 10).unwrap();
        assert!(pure.complete && pure.tables.is_empty());
    }
}
