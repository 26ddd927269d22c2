use std::fmt;

use fixedbitset::FixedBitSet;

use super::group::Group;
use crate::{Error, Result};

/// A subset of a group, stored as a bitset over element indices.
#[derive(Clone, PartialEq, Eq)]
pub struct GSubset {
    group: Group,
    bits: FixedBitSet,
}

impl fmt::Debug for GSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl std::hash::Hash for GSubset {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.bits.hash(state)
    }
}

impl GSubset {
    pub fn empty(g: &Group) -> Self {
        GSubset {
            group: g.clone(),
            bits: FixedBitSet::with_capacity(g.order()),
        }
    }

    pub fn full(g: &Group) -> Self {
        let mut s = Self::empty(g);
        s.bits.insert_range(..);
        s
    }

    pub fn singleton(g: &Group, x: usize) -> Self {
        let mut s = Self::empty(g);
        s.bits.insert(x);
        s
    }

    pub fn identity_set(g: &Group) -> Self {
        Self::singleton(g, g.identity())
    }

    /// Builds a subset, rejecting out-of-range indices.
    pub fn from_elements(g: &Group, elems: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(g);
        for x in elems {
            if x >= g.order() {
                return Err(Error::Param(format!("element {x} outside group of order {}", g.order())));
            }
            s.bits.insert(x);
        }
        Ok(s)
    }

    /// Builds a subset from a predicate on elements.
    pub fn from_fn(g: &Group, mut pred: impl FnMut(usize) -> bool) -> Self {
        let mut s = Self::empty(g);
        for x in g.elements() {
            if pred(x) {
                s.bits.insert(x);
            }
        }
        s
    }

    pub(crate) fn from_bits(g: &Group, bits: FixedBitSet) -> Self {
        debug_assert_eq!(bits.len(), g.order());
        GSubset { group: g.clone(), bits }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.bits.contains(x)
    }

    pub fn insert(&mut self, x: usize) {
        self.bits.insert(x);
    }

    pub fn remove(&mut self, x: usize) {
        self.bits.set(x, false);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    /// `μ_G(A) = |A|/n`.
    pub fn measure(&self) -> f64 {
        self.len() as f64 / self.group.order() as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn members(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Smallest element index, if any.
    pub fn first(&self) -> Option<usize> {
        self.bits.minimum()
    }

    pub fn union(&self, other: &GSubset) -> GSubset {
        debug_assert!(self.group == other.group);
        let mut b = self.bits.clone();
        b.union_with(&other.bits);
        GSubset::from_bits(&self.group, b)
    }

    pub fn intersection(&self, other: &GSubset) -> GSubset {
        debug_assert!(self.group == other.group);
        let mut b = self.bits.clone();
        b.intersect_with(&other.bits);
        GSubset::from_bits(&self.group, b)
    }

    pub fn difference(&self, other: &GSubset) -> GSubset {
        debug_assert!(self.group == other.group);
        let mut b = self.bits.clone();
        b.difference_with(&other.bits);
        GSubset::from_bits(&self.group, b)
    }

    pub fn intersection_count(&self, other: &GSubset) -> usize {
        self.bits.intersection_count(&other.bits)
    }

    pub fn is_subset(&self, other: &GSubset) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn complement(&self) -> GSubset {
        let mut b = self.bits.clone();
        b.toggle_range(..);
        GSubset::from_bits(&self.group, b)
    }

    /// `A⁻¹`.
    pub fn inverse(&self) -> GSubset {
        GSubset::from_fn(&self.group, |x| self.contains(self.group.inv(x)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.iter().all(|x| self.contains(self.group.inv(x)))
    }

    pub fn contains_identity(&self) -> bool {
        self.contains(self.group.identity())
    }

    /// Symmetric and contains the identity.
    pub fn is_symmetric_neighbourhood(&self) -> bool {
        self.contains_identity() && self.is_symmetric()
    }

    /// `xA`.
    pub fn left_translate(&self, x: usize) -> GSubset {
        let g = &self.group;
        let mut b = FixedBitSet::with_capacity(g.order());
        for a in self.iter() {
            b.insert(g.mul(x, a));
        }
        GSubset::from_bits(g, b)
    }

    /// `Ax`.
    pub fn right_translate(&self, x: usize) -> GSubset {
        let g = &self.group;
        let mut b = FixedBitSet::with_capacity(g.order());
        for a in self.iter() {
            b.insert(g.mul(a, x));
        }
        GSubset::from_bits(g, b)
    }

    /// `yAy⁻¹`.
    pub fn conjugate(&self, y: usize) -> GSubset {
        let g = &self.group;
        let mut b = FixedBitSet::with_capacity(g.order());
        for a in self.iter() {
            b.insert(g.conj(y, a));
        }
        GSubset::from_bits(g, b)
    }

    /// Nonempty, contains the identity, closed under products (hence a
    /// subgroup, the group being finite).
    pub fn is_subgroup(&self) -> bool {
        if !self.contains_identity() {
            return false;
        }
        let g = &self.group;
        let m: Vec<usize> = self.members();
        m.iter().all(|&a| m.iter().all(|&b| self.contains(g.mul(a, b))))
    }

    /// Invariant under every conjugation. Not restricted to subgroups.
    pub fn is_normal(&self) -> bool {
        self.group.elements().all(|y| self.conjugate(y) == *self)
    }

    pub(crate) fn ensure_subgroup(&self) -> Result<()> {
        if self.is_subgroup() {
            Ok(())
        } else {
            Err(Error::NotSubgroup)
        }
    }
}
