//! Hand-built polymorphism families used where exhaustive enumeration is out
//! of reach (arity 7 and up).

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::polymorph::{projection, PolyChecker};
use crate::recolour::{lo3, saturate, Policy};
use crate::sets::{check_arity, PolyTable, SubsetMask};

/// The block construction: variables `outside+1 ..= outside+block` form the
/// block `B`, and
///
/// ```text
/// g(S) = 2  if |S ∩ B| > block/2
///        1  if 1 <= |S ∩ B| <= block/2 and dictator ∈ S
///        0  otherwise
/// ```
///
/// `f` agrees with `g` except that `B` and `[n]` are 1-sets. With
/// `outside = 2, block = 7, dictator = 1` this is the arity-9 pair in which
/// `g` is the only pure saturation of `f`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BlockFamily {
    pub outside: usize,
    pub block: usize,
    pub dictator: usize,
}

impl BlockFamily {
    pub const EXAMPLE: BlockFamily = BlockFamily { outside: 2, block: 7, dictator: 1 };

    pub fn arity(&self) -> usize {
        self.outside + self.block
    }

    pub fn block_mask(&self) -> usize {
        ((1usize << self.block) - 1) << self.outside
    }

    fn validate(&self) -> Result<()> {
        let n = self.arity();
        check_arity(n)?;
        if self.dictator == 0 || self.dictator > n {
            return Err(Error::VariableOutOfRange { var: self.dictator, arity: n });
        }
        Ok(())
    }

    fn checked(&self, table: PolyTable) -> Result<PolyTable> {
        let lo3 = lo3();
        if PolyChecker::new(table.arity(), &lo3)?.holds(&table)? {
            Ok(table)
        } else {
            Err(Error::NotAPolymorphism)
        }
    }

    fn g_value(&self, s: usize) -> u8 {
        let hits = (s & self.block_mask()).count_ones() as usize;
        if 2 * hits > self.block {
            2
        } else if hits >= 1 && s >> (self.dictator - 1) & 1 == 1 {
            1
        } else {
            0
        }
    }

    /// `g`; errors if the parameters do not give a polymorphism.
    pub fn g(&self) -> Result<PolyTable> {
        self.validate()?;
        self.checked(PolyTable::from_fn(self.arity(), 3, |s| self.g_value(s))?)
    }

    pub fn f(&self) -> Result<PolyTable> {
        self.validate()?;
        let block = self.block_mask();
        let full = (1usize << self.arity()) - 1;
        let table = PolyTable::from_fn(self.arity(), 3, |s| {
            if s == block || s == full {
                1
            } else {
                self.g_value(s)
            }
        })?;
        self.checked(table)
    }
}

pub fn example_f() -> PolyTable {
    BlockFamily::EXAMPLE.f().expect("arity-9 example is a polymorphism")
}

pub fn example_g() -> PolyTable {
    BlockFamily::EXAMPLE.g().expect("arity-9 example is a polymorphism")
}

/// Saturation of `projection(n, t)` under the deterministic policy.
pub fn saturated_projection(n: usize, t: usize) -> Result<PolyTable> {
    Ok(saturate(&projection(n, t)?, &Policy::DeterministicLarge)?.result)
}

/// A random walk in the reconfiguration graph: up to `steps` single-entry
/// changes, each keeping the table a polymorphism.
pub fn reconfig_walk<R: Rng>(f: &PolyTable, steps: usize, rng: &mut R) -> Result<PolyTable> {
    let lo3 = lo3();
    let checker = PolyChecker::new(f.arity(), &lo3)?;
    let mut cur = f.clone();
    let size = cur.values().len();
    for _ in 0..steps {
        // a few tries per step; many entries are frozen
        for _ in 0..16 {
            let m = rng.random_range(0..size);
            let v = (cur[m] + rng.random_range(1..3u8)) % 3;
            if checker.holds_with(&cur, m, v)? {
                cur = cur.with_value(m, v)?;
                break;
            }
        }
    }
    Ok(cur)
}

/// The sets of `f` with value `value` and exactly `size` elements.
pub fn sets_of_size(f: &PolyTable, value: u8, size: u32) -> Vec<SubsetMask> {
    f.sets_with_value(value).filter(|m| m.count_ones() == size).map(|m| f.mask(m)).collect()
}
