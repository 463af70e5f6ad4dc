//! Minor maps, chains of minors, the choice sets `I(f)` and the chain
//! intersection condition.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::families::BlockFamily;
use crate::polymorph::projection;
use crate::recolour::{saturate, Pick, Policy, SMALL};
use crate::sets::{check_arity, PolyTable, SubsetMask};
use crate::structure::dictating_variables;

/// A total map `[n] -> [m]`, stored 1-based.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MinorMap {
    target: usize,
    image: Vec<usize>,
}

impl MinorMap {
    pub fn new(target: usize, image: Vec<usize>) -> Result<Self> {
        check_arity(target)?;
        check_arity(image.len())?;
        if let Some(&bad) = image.iter().find(|&&i| i == 0 || i > target) {
            return Err(Error::MapOutOfRange { image: bad, target });
        }
        Ok(MinorMap { target, image })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, (1..=n).collect())
    }

    pub fn source(&self) -> usize {
        self.image.len()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// `pi(i)` for 1-based `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.image[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.target == self.source() && self.image.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// `{i : pi(i) in S}` as raw mask bits.
    pub fn preimage_bits(&self, s: usize) -> usize {
        self.image.iter().enumerate().filter(|(_, &v)| s >> (v - 1) & 1 == 1).fold(0, |acc, (i, _)| acc | 1 << i)
    }

    pub fn preimage(&self, s: SubsetMask) -> SubsetMask {
        SubsetMask::from_raw(self.preimage_bits(s.index()), self.source())
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &MinorMap) -> Result<MinorMap> {
        if next.source() != self.target {
            return Err(Error::ArityMismatch { expected: self.target, found: next.source() });
        }
        Ok(MinorMap { target: next.target, image: self.image.iter().map(|&v| next.apply(v)).collect() })
    }
}

/// `g(S) = f(pi^{-1}(S))` for every `S` over `[m]`.
pub fn apply_minor(f: &PolyTable, pi: &MinorMap) -> Result<PolyTable> {
    if pi.source() != f.arity() {
        return Err(Error::ArityMismatch { expected: f.arity(), found: pi.source() });
    }
    let m = pi.target();
    let size = 1usize << m;
    // preimage of S = preimage of S without its low bit, plus the fibre of that bit
    let fibres: Vec<usize> = (1..=m).map(|v| pi.preimage_bits(1 << (v - 1))).collect();
    let mut pre = vec![0usize; size];
    let mut values = vec![0u8; size];
    values[0] = f[0];
    for s in 1..size {
        let low = s.trailing_zeros() as usize;
        pre[s] = pre[s & (s - 1)] | fibres[low];
        values[s] = f[pre[s]];
    }
    PolyTable::new(m, f.levels() as usize, values)
}

/// `f_1, pi_12, f_2, .., f_l` with every table the minor of the previous one.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MinorChain {
    tables: Vec<PolyTable>,
    maps: Vec<MinorMap>,
}

impl MinorChain {
    pub fn new(tables: Vec<PolyTable>, maps: Vec<MinorMap>) -> Result<Self> {
        if tables.is_empty() {
            return Err(Error::EmptyChain);
        }
        if maps.len() + 1 != tables.len() {
            return Err(Error::BrokenChain(maps.len().min(tables.len())));
        }
        for (i, pi) in maps.iter().enumerate() {
            if apply_minor(&tables[i], pi).ok().as_ref() != Some(&tables[i + 1]) {
                return Err(Error::BrokenChain(i + 1));
            }
        }
        Ok(MinorChain { tables, maps })
    }

    /// Chain grown from `first` by applying `maps` in turn.
    pub fn from_maps(first: PolyTable, maps: Vec<MinorMap>) -> Result<Self> {
        let mut tables = vec![first];
        for pi in &maps {
            let next = apply_minor(tables.last().expect("non-empty"), pi)?;
            tables.push(next);
        }
        Ok(MinorChain { tables, maps })
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn tables(&self) -> &[PolyTable] {
        &self.tables
    }

    pub fn maps(&self) -> &[MinorMap] {
        &self.maps
    }

    /// `pi_{i,j}` for 0-based `i < j`.
    pub fn composite(&self, i: usize, j: usize) -> Result<MinorMap> {
        let mut acc = self.maps[i].clone();
        for pi in &self.maps[i + 1..j] {
            acc = acc.then(pi)?;
        }
        Ok(acc)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Branch {
    Small2Set,
    LowArityDictator,
    Singleton1Set,
    Pair1Set,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SelectionSet {
    pub set: SubsetMask,
    pub branch: Branch,
}

/// The choice set `I(f)`, canonicalised: smallest then least small 2-set;
/// otherwise the dictating variable, paired with the least partner making a
/// 1-set when the singleton is a 0-set.
pub fn select_i(f: &PolyTable) -> Result<SelectionSet> {
    let n = f.arity();
    let small = f.sets_with_value(2).filter(|m| m.count_ones() <= SMALL).min_by_key(|&m| (m.count_ones(), m));
    if let Some(m) = small {
        return Ok(SelectionSet { set: f.mask(m), branch: Branch::Small2Set });
    }
    if n <= 6 {
        let d = dictating_variables(f)?;
        if d.len() != 1 {
            return Err(Error::DictatorNotUnique(d.len()));
        }
        return Ok(SelectionSet { set: d, branch: Branch::LowArityDictator });
    }
    let g = saturate(f, &Policy::DeterministicLarge)?.result;
    let d = dictating_variables(&g)?;
    if d.len() != 1 {
        return Err(Error::DictatorNotUnique(d.len()));
    }
    let t = d.elements().next().expect("singleton");
    let tb = 1usize << (t - 1);
    if f[tb] == 1 {
        return Ok(SelectionSet { set: d, branch: Branch::Singleton1Set });
    }
    let b = (1..=n).filter(|&b| b != t).find(|&b| f[tb | 1 << (b - 1)] == 1).ok_or(Error::MissingPartner(t))?;
    Ok(SelectionSet { set: f.mask(tb | 1 << (b - 1)), branch: Branch::Pair1Set })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainReport {
    pub selections: Vec<SelectionSet>,
    /// Least `(i, j)`, 1-based with `i < j`, whose pulled-back choice set
    /// meets `I(f_i)`. `None` is a violation.
    pub witness: Option<(usize, usize)>,
    /// Pairs with `pi_{i,j}^{-1}(I(f_j))` empty, 1-based. Always empty for
    /// chains of polymorphisms.
    pub empty_preimages: Vec<(usize, usize)>,
}

impl ChainReport {
    pub fn is_violation(&self) -> bool {
        self.witness.is_none()
    }
}

pub fn chain_condition(chain: &MinorChain) -> Result<ChainReport> {
    let selections = chain.tables().iter().map(select_i).collect::<Result<Vec<_>>>()?;
    let mut witness = None;
    let mut empty_preimages = Vec::new();
    for j in 1..chain.len() {
        for i in 0..j {
            let pi = chain.composite(i, j)?;
            let pulled = pi.preimage(selections[j].set);
            if pulled.is_empty() {
                empty_preimages.push((i + 1, j + 1));
            }
            if !pulled.is_disjoint(selections[i].set) {
                let cand = (i + 1, j + 1);
                if witness.is_none_or(|w| cand < w) {
                    witness = Some(cand);
                }
            }
        }
    }
    Ok(ChainReport { selections, witness, empty_preimages })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ChainBounds {
    pub length: usize,
    pub max_arity: usize,
}

impl Default for ChainBounds {
    fn default() -> Self {
        ChainBounds { length: 4, max_arity: 9 }
    }
}

fn seed_table(rng: &mut ChaCha8Rng, max_arity: usize) -> Result<PolyTable> {
    loop {
        let base = match rng.random_range(0..3u8) {
            0 => {
                let n = rng.random_range(1..=max_arity);
                projection(n, rng.random_range(1..=n))?
            }
            _ if max_arity >= 7 => {
                let outside = rng.random_range(0..=max_arity - 7);
                let fam = BlockFamily { outside, block: 7, dictator: rng.random_range(1..=outside + 7) };
                let t = if rng.random_bool(0.5) { fam.f() } else { fam.g() };
                match t {
                    Ok(t) => t,
                    Err(Error::NotAPolymorphism) => continue,
                    Err(e) => return Err(e),
                }
            }
            _ => continue,
        };
        if rng.random_bool(0.5) {
            return Ok(base);
        }
        let picks = (0..32).map(|_| if rng.random_bool(0.5) { Pick::Lower } else { Pick::Upper }).collect();
        return Ok(saturate(&base, &Policy::Choices(picks))?.result);
    }
}

fn random_map(rng: &mut ChaCha8Rng, n: usize, max_arity: usize) -> Result<MinorMap> {
    let m = if rng.random_bool(0.5) {
        rng.random_range(n.saturating_sub(2).max(1)..=max_arity.max(n))
    } else {
        rng.random_range(1..=max_arity)
    };
    MinorMap::new(m, (0..n).map(|_| rng.random_range(1..=m)).collect())
}

/// A seeded random chain of `bounds.length` polymorphisms of arity at most
/// `bounds.max_arity`, starting from a family member.
pub fn random_chain(seed: u64, bounds: ChainBounds) -> Result<MinorChain> {
    check_arity(bounds.max_arity)?;
    if bounds.length == 0 {
        return Err(Error::EmptyChain);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = seed_table(&mut rng, bounds.max_arity)?;
    let mut maps = Vec::with_capacity(bounds.length - 1);
    let mut n = first.arity();
    for _ in 1..bounds.length {
        let pi = random_map(&mut rng, n, bounds.max_arity)?;
        n = pi.target();
        maps.push(pi);
    }
    if !maps.is_empty() && maps.iter().all(MinorMap::is_identity) {
        let last = maps.len() - 1;
        let src = maps[last].source();
        maps[last] = if src > 1 {
            let mut image: Vec<usize> = (1..=src).collect();
            image.swap(0, 1);
            MinorMap::new(src, image)?
        } else {
            MinorMap::new(2, vec![2])?
        };
        // the arities downstream do not change, so the rest still composes
    }
    MinorChain::from_maps(first, maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{example_f, example_g};
    use crate::polymorph::is_polymorphism;
    use crate::recolour::lo3;

    fn example_map() -> MinorMap {
        MinorMap::new(2, vec![1, 1, 2, 2, 2, 2, 2, 2, 2]).unwrap()
    }

    #[test]
    fn identity_minor() {
        let f = example_f();
        assert_eq!(apply_minor(&f, &MinorMap::identity(9).unwrap()).unwrap(), f);
        let p = projection(4, 3).unwrap();
        assert_eq!(apply_minor(&p, &MinorMap::identity(4).unwrap()).unwrap(), p);
    }

    #[test]
    fn example_minor_is_second_projection() {
        assert_eq!(apply_minor(&example_f(), &example_map()).unwrap(), projection(2, 2).unwrap());
    }

    #[test]
    fn minors_compose() {
        let f = example_g();
        let pi = MinorMap::new(5, vec![1, 2, 3, 3, 4, 5, 5, 1, 2]).unwrap();
        let sigma = MinorMap::new(3, vec![3, 1, 2, 2, 1]).unwrap();
        let two_step = apply_minor(&apply_minor(&f, &pi).unwrap(), &sigma).unwrap();
        assert_eq!(two_step, apply_minor(&f, &pi.then(&sigma).unwrap()).unwrap());
        assert!(is_polymorphism(&two_step, &lo3()).unwrap().holds);
    }

    #[test]
    fn map_validation() {
        assert_eq!(MinorMap::new(2, vec![1, 3]).err(), Some(Error::MapOutOfRange { image: 3, target: 2 }));
        assert!(apply_minor(&example_f(), &MinorMap::identity(3).unwrap()).is_err());
        let f = projection(3, 1).unwrap();
        let bad = MinorChain::new(vec![f.clone(), f.clone()], vec![MinorMap::new(3, vec![2, 1, 3]).unwrap()]);
        assert_eq!(bad.err(), Some(Error::BrokenChain(1)));
    }

    #[test]
    fn selections() {
        for n in [3, 6, 8] {
            let s = select_i(&projection(n, 2).unwrap()).unwrap();
            assert_eq!(s.set, SubsetMask::singleton(n, 2).unwrap());
            let expected = if n <= 6 { Branch::LowArityDictator } else { Branch::Singleton1Set };
            assert_eq!(s.branch, expected);
        }
        let s = select_i(&example_f()).unwrap();
        assert_eq!(s.branch, Branch::Pair1Set);
        assert_eq!(s.set, SubsetMask::from_elements(9, &[1, 3]).unwrap());
        let with_small = projection(4, 1).unwrap().with_value(0b0111, 2).unwrap();
        let s = select_i(&with_small).unwrap();
        assert_eq!((s.set.bits(), s.branch), (0b0111, Branch::Small2Set));
    }

    #[test]
    fn example_chain_has_witness() {
        let f = example_f();
        let maps = vec![example_map(), MinorMap::identity(2).unwrap(), MinorMap::identity(2).unwrap()];
        let chain = MinorChain::from_maps(f, maps).unwrap();
        let r = chain_condition(&chain).unwrap();
        // pulled back I(f') = {2} is {3..9}, which meets {1,3}
        assert_eq!(r.witness, Some((1, 2)));
        assert!(r.empty_preimages.is_empty());
    }

    #[test]
    fn identical_projection_chain() {
        let p = projection(5, 4).unwrap();
        let id = MinorMap::identity(5).unwrap();
        let chain = MinorChain::from_maps(p, vec![id.clone(), id.clone(), id]).unwrap();
        assert_eq!(chain_condition(&chain).unwrap().witness, Some((1, 2)));
    }

    #[test]
    fn random_chains_are_deterministic_and_valid() {
        let lo3 = lo3();
        for seed in 0..40 {
            let a = random_chain(seed, ChainBounds::default()).unwrap();
            assert_eq!(a, random_chain(seed, ChainBounds::default()).unwrap());
            assert_eq!(a.len(), 4);
            assert!(a.maps().iter().any(|m| !m.is_identity()));
            assert!(MinorChain::new(a.tables().to_vec(), a.maps().to_vec()).is_ok());
            for t in a.tables() {
                assert!(t.arity() <= 9);
                assert!(is_polymorphism(t, &lo3).unwrap().holds);
            }
        }
    }
}
