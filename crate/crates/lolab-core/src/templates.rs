//! Symmetric ternary target relations and the `D(B)` digraph test.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const MAX_DOMAIN: usize = 16;

/// A ternary relation over `{0, .., d-1}`, stored as a membership cube.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Relation3 {
    domain: u8,
    member: Vec<bool>,
    symmetric: bool,
}

impl Relation3 {
    /// Relation from an explicit triple list. Symmetry is detected, not assumed.
    pub fn from_triples(domain: usize, triples: impl IntoIterator<Item = [u8; 3]>) -> Result<Self> {
        if !(1..=MAX_DOMAIN).contains(&domain) {
            return Err(Error::LevelsOutOfRange(domain));
        }
        let mut member = vec![false; domain * domain * domain];
        for [a, b, c] in triples {
            for v in [a, b, c] {
                if v as usize >= domain {
                    return Err(Error::ValueOutOfRange { mask: 0, value: v, levels: domain as u8 });
                }
            }
            member[(a as usize * domain + b as usize) * domain + c as usize] = true;
        }
        let mut rel = Relation3 { domain: domain as u8, member, symmetric: false };
        let symmetric = rel.triples().all(|[a, b, c]| {
            [[a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]].iter().all(|&[p, q, r]| rel.contains(p, q, r))
        });
        rel.symmetric = symmetric;
        Ok(rel)
    }

    fn symmetric_from_predicate(k: usize, pred: impl Fn(u8, u8, u8) -> bool) -> Result<Self> {
        let k8 = k as u8;
        let triples = (0..k8).flat_map(|a| (0..k8).flat_map(move |b| (0..k8).map(move |c| [a, b, c])));
        let rel = Self::from_triples(k, triples.filter(|&[a, b, c]| pred(a, b, c)))?;
        if !rel.symmetric {
            return Err(Error::NotSymmetric);
        }
        Ok(rel)
    }

    pub fn domain(&self) -> u8 {
        self.domain
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    #[inline]
    pub fn contains(&self, a: u8, b: u8, c: u8) -> bool {
        let d = self.domain as usize;
        self.member[(a as usize * d + b as usize) * d + c as usize]
    }

    /// Member triples in lexicographic order.
    pub fn triples(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        let d = self.domain as usize;
        self.member.iter().enumerate().filter(|(_, &m)| m).map(move |(i, _)| {
            [(i / (d * d)) as u8, (i / d % d) as u8, (i % d) as u8]
        })
    }

    pub fn len(&self) -> usize {
        self.member.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The same relation after renaming each value `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[u8]) -> Result<Self> {
        Self::from_triples(self.domain as usize, self.triples().map(|[a, b, c]| [perm[a as usize], perm[b as usize], perm[c as usize]]))
    }
}

fn check_colours(k: usize) -> Result<()> {
    if k < 2 {
        Err(Error::TooFewColours(k))
    } else if k > MAX_DOMAIN {
        Err(Error::LevelsOutOfRange(k))
    } else {
        Ok(())
    }
}

/// `LO_k`: triples whose maximum occurs exactly once.
pub fn lo_relation(k: usize) -> Result<Relation3> {
    check_colours(k)?;
    Relation3::symmetric_from_predicate(k, |a, b, c| {
        let m = a.max(b).max(c);
        [a, b, c].iter().filter(|&&v| v == m).count() == 1
    })
}

/// `NAE_k`: all non-constant triples.
pub fn nae_relation(k: usize) -> Result<Relation3> {
    check_colours(k)?;
    Relation3::symmetric_from_predicate(k, |a, b, c| !(a == b && b == c))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ZVerdict {
    /// `D(B)` is loopless and acyclic, so `Z` does not map to `B`.
    NoHomToZTarget,
    /// `D(B)` has a loop or a cycle; the condition says nothing more.
    Inconclusive,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ZCheckVerdict {
    /// Edges `(x, y)` of `D(B)`, one for every `(x, x, y)` in the relation.
    pub edges: Vec<(u8, u8)>,
    pub verdict: ZVerdict,
}

/// Builds `D(B)` and decides whether it is loopless and acyclic.
pub fn z_check(rel: &Relation3) -> ZCheckVerdict {
    let d = rel.domain() as usize;
    let mut edges = Vec::new();
    let mut adj = vec![Vec::new(); d];
    for x in 0..d as u8 {
        for y in 0..d as u8 {
            if rel.contains(x, x, y) {
                edges.push((x, y));
                adj[x as usize].push(y as usize);
            }
        }
    }
    let has_loop = edges.iter().any(|&(x, y)| x == y);
    let verdict = if has_loop || has_cycle(&adj) { ZVerdict::Inconclusive } else { ZVerdict::NoHomToZTarget };
    ZCheckVerdict { edges, verdict }
}

/// Iterative DFS with white/grey/black marking.
fn has_cycle(adj: &[Vec<usize>]) -> bool {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    let mut mark = vec![Mark::White; adj.len()];
    for root in 0..adj.len() {
        if mark[root] != Mark::White {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Grey;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if let Some(&w) = adj[v].get(*next) {
                *next += 1;
                match mark[w] {
                    Mark::Grey => return true,
                    Mark::White => {
                        mark[w] = Mark::Grey;
                        stack.push((w, 0));
                    }
                    Mark::Black => {}
                }
            } else {
                mark[v] = Mark::Black;
                stack.pop();
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lo2_is_one_in_three() {
        let lo2 = lo_relation(2).unwrap();
        assert_eq!(lo2.triples().collect::<Vec<_>>(), [[0, 0, 1], [0, 1, 0], [1, 0, 0]]);
    }

    #[test]
    fn lo3_members() {
        let lo3 = lo_relation(3).unwrap();
        for t in [[0, 1, 2], [1, 1, 2], [0, 0, 1], [0, 0, 2]] {
            let [a, b, c] = t;
            for [p, q, r] in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                assert!(lo3.contains(p, q, r));
            }
        }
        assert!(!lo3.contains(1, 2, 2));
        assert!(!lo3.contains(0, 1, 1));
    }

    #[test]
    fn constants_excluded_and_lo_inside_nae() {
        for k in 2..=6 {
            let lo = lo_relation(k).unwrap();
            let nae = nae_relation(k).unwrap();
            for a in 0..k as u8 {
                assert!(!lo.contains(a, a, a));
                assert!(!nae.contains(a, a, a));
            }
            assert!(lo.triples().all(|[a, b, c]| nae.contains(a, b, c)));
        }
        assert_eq!(nae_relation(2).unwrap().len(), 6);
        assert!(nae_relation(2).unwrap().contains(0, 1, 1));
    }

    #[test]
    fn sizes_and_symmetry() {
        assert_eq!(lo_relation(2).unwrap().len(), 3);
        let mut last = 0;
        for k in 2..=8 {
            let lo = lo_relation(k).unwrap();
            assert!(lo.is_symmetric() && nae_relation(k).unwrap().is_symmetric());
            assert!(lo.len() > last);
            last = lo.len();
        }
        assert_eq!(lo_relation(1).err(), Some(Error::TooFewColours(1)));
        assert_eq!(nae_relation(0).err(), Some(Error::TooFewColours(0)));
    }

    #[test]
    fn asymmetric_relation_is_detected() {
        let r = Relation3::from_triples(2, [[0, 0, 1]]).unwrap();
        assert!(!r.is_symmetric());
    }

    #[test]
    fn z_check_examples() {
        for k in 2..=6 {
            assert_eq!(z_check(&lo_relation(k).unwrap()).verdict, ZVerdict::NoHomToZTarget);
        }
        let nae2 = z_check(&nae_relation(2).unwrap());
        assert_eq!(nae2.edges, [(0, 1), (1, 0)]);
        assert_eq!(nae2.verdict, ZVerdict::Inconclusive);
        let looped = Relation3::from_triples(3, [[1, 1, 1], [0, 0, 2]]).unwrap();
        assert_eq!(z_check(&looped).verdict, ZVerdict::Inconclusive);
    }

    #[test]
    fn lo_digraph_is_transitive_tournament() {
        let v = z_check(&lo_relation(4).unwrap());
        let expected: Vec<(u8, u8)> = (0..4).flat_map(|x| (x + 1..4).map(move |y| (x, y))).collect();
        assert_eq!(v.edges, expected);
    }

    fn relation_and_perm() -> impl Strategy<Value = (Relation3, Vec<u8>)> {
        (2usize..=5).prop_flat_map(|d| {
            let cube = d * d * d;
            (
                proptest::collection::vec(any::<bool>(), cube),
                Just((0..d as u8).collect::<Vec<_>>()).prop_shuffle(),
            )
                .prop_map(move |(bits, perm)| {
                    let triples = bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| {
                        [(i / (d * d)) as u8, (i / d % d) as u8, (i % d) as u8]
                    });
                    (Relation3::from_triples(d, triples.collect::<Vec<_>>()).unwrap(), perm)
                })
        })
    }

    proptest! {
        #[test]
        fn z_check_invariant_under_relabelling((rel, perm) in relation_and_perm()) {
            let renamed = rel.relabel(&perm).unwrap();
            prop_assert_eq!(z_check(&rel).verdict, z_check(&renamed).verdict);
        }
    }
}
