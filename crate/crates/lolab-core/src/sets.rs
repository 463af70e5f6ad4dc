//! Subsets of `[n]` as bitmasks, value tables indexed by them, and the
//! canonical iteration over 3-partitions of `[n]`.
//!
//! Variables are numbered `1..=n` everywhere in the public API. Variable `i`
//! lives in bit `i - 1` of a mask.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Index;

use crate::error::{Error, Result};

/// Largest supported arity. Tables hold `2^n` entries.
pub const MAX_ARITY: usize = 24;

pub fn check_arity(n: usize) -> Result<()> {
    if (1..=MAX_ARITY).contains(&n) {
        Ok(())
    } else {
        Err(Error::ArityOutOfRange(n))
    }
}

#[inline]
pub(crate) fn full_bits(n: usize) -> usize {
    (1usize << n) - 1
}

/// A subset of `[n]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask {
    bits: u64,
    width: u8,
}

impl SubsetMask {
    pub fn new(bits: u64, width: usize) -> Result<Self> {
        check_arity(width)?;
        if bits >> width != 0 {
            return Err(Error::MaskOutOfRange { bits, width });
        }
        Ok(SubsetMask { bits, width: width as u8 })
    }

    pub(crate) fn from_raw(bits: usize, width: usize) -> Self {
        debug_assert!(bits >> width == 0);
        SubsetMask { bits: bits as u64, width: width as u8 }
    }

    pub fn empty(width: usize) -> Result<Self> {
        Self::new(0, width)
    }

    pub fn full(width: usize) -> Result<Self> {
        check_arity(width)?;
        Ok(Self::from_raw(full_bits(width), width))
    }

    /// Builds `{elements}` from 1-based variable indices.
    pub fn from_elements(width: usize, elements: &[usize]) -> Result<Self> {
        check_arity(width)?;
        let mut bits = 0u64;
        for &var in elements {
            if var == 0 || var > width {
                return Err(Error::VariableOutOfRange { var, arity: width });
            }
            bits |= 1 << (var - 1);
        }
        Ok(SubsetMask { bits, width: width as u8 })
    }

    pub fn singleton(width: usize, var: usize) -> Result<Self> {
        Self::from_elements(width, &[var])
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    /// The mask as a table index.
    pub fn index(self) -> usize {
        self.bits as usize
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn contains(self, var: usize) -> bool {
        var >= 1 && var <= self.width() && self.bits >> (var - 1) & 1 == 1
    }

    pub fn complement(self) -> Self {
        SubsetMask { bits: self.bits ^ full_bits(self.width()) as u64, width: self.width }
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.bits & other.bits == 0
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn union(self, other: Self) -> Self {
        SubsetMask { bits: self.bits | other.bits, width: self.width }
    }

    pub fn intersection(self, other: Self) -> Self {
        SubsetMask { bits: self.bits & other.bits, width: self.width }
    }

    pub fn difference(self, other: Self) -> Self {
        SubsetMask { bits: self.bits & !other.bits, width: self.width }
    }

    /// Members in increasing order, 1-based.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (1..=self.width()).filter(move |&v| bits >> (v - 1) & 1 == 1)
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// A function `2^[n] -> {0, .., levels-1}` stored as a value table indexed
/// by mask bits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PolyTable {
    arity: u8,
    levels: u8,
    values: Vec<u8>,
}

impl PolyTable {
    pub fn new(arity: usize, levels: usize, values: Vec<u8>) -> Result<Self> {
        check_arity(arity)?;
        if !(2..=16).contains(&levels) {
            return Err(Error::LevelsOutOfRange(levels));
        }
        let expected = 1usize << arity;
        if values.len() != expected {
            return Err(Error::TableLength { expected, found: values.len() });
        }
        let levels = levels as u8;
        if let Some((mask, &value)) = values.iter().enumerate().find(|(_, &v)| v >= levels) {
            return Err(Error::ValueOutOfRange { mask, value, levels });
        }
        Ok(PolyTable { arity: arity as u8, levels, values })
    }

    pub fn from_fn(arity: usize, levels: usize, mut value: impl FnMut(usize) -> u8) -> Result<Self> {
        check_arity(arity)?;
        let values = (0..1usize << arity).map(&mut value).collect();
        Self::new(arity, levels, values)
    }

    pub fn constant(arity: usize, levels: usize, value: u8) -> Result<Self> {
        Self::from_fn(arity, levels, |_| value)
    }

    pub(crate) fn from_parts_unchecked(arity: usize, levels: u8, values: Vec<u8>) -> Self {
        debug_assert_eq!(values.len(), 1 << arity);
        PolyTable { arity: arity as u8, levels, values }
    }

    pub fn arity(&self) -> usize {
        self.arity as usize
    }

    pub fn levels(&self) -> u8 {
        self.levels
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u8> {
        self.values
    }

    pub fn full_mask(&self) -> usize {
        full_bits(self.arity())
    }

    pub fn get(&self, mask: usize) -> u8 {
        self.values[mask]
    }

    pub fn value(&self, set: SubsetMask) -> u8 {
        self.values[set.index()]
    }

    pub fn mask(&self, bits: usize) -> SubsetMask {
        SubsetMask::from_raw(bits, self.arity())
    }

    pub fn is_boolean(&self, mask: usize) -> bool {
        self.values[mask] < 2
    }

    /// Copy of the table with one entry replaced.
    pub fn with_value(&self, mask: usize, value: u8) -> Result<Self> {
        if value >= self.levels {
            return Err(Error::ValueOutOfRange { mask, value, levels: self.levels });
        }
        let mut out = self.clone();
        out.values[mask] = value;
        Ok(out)
    }

    pub(crate) fn set(&mut self, mask: usize, value: u8) {
        debug_assert!(value < self.levels);
        self.values[mask] = value;
    }

    /// The same function viewed with a different codomain size, e.g. a
    /// boolean table embedded into `{0,1,2}`.
    pub fn with_levels(&self, levels: usize) -> Result<Self> {
        Self::new(self.arity(), levels, self.values.clone())
    }

    /// Masks with value `i`, ascending.
    pub fn sets_with_value(&self, i: u8) -> impl Iterator<Item = usize> + '_ {
        self.values.iter().enumerate().filter(move |(_, &v)| v == i).map(|(m, _)| m)
    }

    /// One digit per entry in mask order.
    pub fn digits(&self) -> String {
        self.values.iter().map(|&v| char::from_digit(v as u32, 16).unwrap_or('?')).collect()
    }
}

impl Index<usize> for PolyTable {
    type Output = u8;

    fn index(&self, mask: usize) -> &u8 {
        &self.values[mask]
    }
}

/// A partition `(X, Y, Z)` of `[n]`. Parts may be empty.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PartitionTriple {
    pub x: SubsetMask,
    pub y: SubsetMask,
    pub z: SubsetMask,
}

impl PartitionTriple {
    pub fn new(x: SubsetMask, y: SubsetMask, z: SubsetMask) -> Result<Self> {
        let n = x.width();
        let full = full_bits(n) as u64;
        if y.width() != n || z.width() != n {
            return Err(Error::ArityMismatch { expected: n, found: y.width().max(z.width()) });
        }
        if x.bits & y.bits != 0 || x.bits & z.bits != 0 || y.bits & z.bits != 0 || (x.bits | y.bits | z.bits) != full {
            return Err(Error::MaskOutOfRange { bits: x.bits | y.bits | z.bits, width: n });
        }
        Ok(PartitionTriple { x, y, z })
    }

    pub fn parts(&self) -> [SubsetMask; 3] {
        [self.x, self.y, self.z]
    }

    /// Number of distinct ordered triples obtained by permuting the parts.
    pub fn orbit_size(&self) -> usize {
        if self.x == self.y || self.y == self.z {
            3
        } else {
            6
        }
    }
}

/// Canonical 3-partitions of `[n]` as raw masks `x <= y <= z`.
///
/// Order: `x` ascending, then `y` ascending over the submasks of the
/// complement of `x`. Each unordered partition appears once.
pub(crate) struct RawPartitions {
    full: usize,
    x: usize,
    rest: usize,
    y: usize,
    done: bool,
}

impl RawPartitions {
    pub(crate) fn new(n: usize) -> Self {
        let full = full_bits(n);
        RawPartitions { full, x: 0, rest: full, y: 0, done: false }
    }

    fn advance(&mut self) {
        if self.y == self.rest {
            if self.x == self.full {
                self.done = true;
                return;
            }
            self.x += 1;
            self.rest = self.full ^ self.x;
            self.y = 0;
        } else {
            self.y = self.y.wrapping_sub(self.rest) & self.rest;
        }
    }
}

impl Iterator for RawPartitions {
    type Item = [usize; 3];

    fn next(&mut self) -> Option<[usize; 3]> {
        while !self.done {
            let (x, y) = (self.x, self.y);
            let z = self.rest ^ y;
            self.advance();
            // z <= rest, so once rest < x no y can work for this x
            if x <= y && y <= z {
                return Some([x, y, z]);
            }
        }
        None
    }
}

/// Every canonical partition of `[n]` exactly once, in canonical order.
pub fn iterate_partitions(n: usize) -> Result<impl Iterator<Item = PartitionTriple>> {
    check_arity(n)?;
    Ok(RawPartitions::new(n).map(move |[x, y, z]| PartitionTriple {
        x: SubsetMask::from_raw(x, n),
        y: SubsetMask::from_raw(y, n),
        z: SubsetMask::from_raw(z, n),
    }))
}

/// All canonical partitions materialised, for inner loops that revisit them.
pub(crate) fn partition_list(n: usize) -> Vec<[u32; 3]> {
    RawPartitions::new(n).map(|[x, y, z]| [x as u32, y as u32, z as u32]).collect()
}

/// Submasks of `set` in ascending order, including `0` and `set`.
pub(crate) fn submasks(set: usize) -> impl Iterator<Item = usize> {
    let mut next = Some(0usize);
    core::iter::from_fn(move || {
        let cur = next?;
        next = if cur == set { None } else { Some(cur.wrapping_sub(set) & set) };
        Some(cur)
    })
}
