use std::collections::HashSet;

use fixedbitset::FixedBitSet;

use super::group::Group;
use super::subset::GSubset;
use crate::{Error, Result};

/// Default cap on group order for subgroup enumeration.
pub const SUBGROUP_LIMIT: usize = 64;

/// `⟨S⟩`: breadth-first closure of the identity under right multiplication
/// by the elements of `S`.
pub fn generated_subgroup(s: &GSubset) -> GSubset {
    let g = s.group();
    closure(g, &s.members())
}

fn closure(g: &Group, gens: &[usize]) -> GSubset {
    let mut bits = FixedBitSet::with_capacity(g.order());
    let e = g.identity();
    bits.insert(e);
    let mut queue = vec![e];
    while let Some(x) = queue.pop() {
        for &s in gens {
            let y = g.mul(x, s);
            if !bits.contains(y) {
                bits.insert(y);
                queue.push(y);
            }
        }
    }
    GSubset::from_bits(g, bits)
}

/// All subgroups, sorted by size and then by member list.
///
/// Grows the family from `{e}` by joining each found subgroup with each
/// cyclic subgroup it misses; every subgroup is such an iterated join, so the
/// search is complete.
pub fn subgroups(g: &Group) -> Result<Vec<GSubset>> {
    subgroups_capped(g, SUBGROUP_LIMIT)
}

pub fn subgroups_capped(g: &Group, limit: usize) -> Result<Vec<GSubset>> {
    if g.order() > limit {
        return Err(Error::Limit {
            what: "subgroup enumeration order",
            got: g.order(),
            limit,
        });
    }
    let trivial = GSubset::identity_set(g);
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    seen.insert(trivial.bits().clone());
    let mut frontier: Vec<(GSubset, Vec<usize>)> = vec![(trivial, Vec::new())];
    let mut all: Vec<GSubset> = Vec::new();
    while let Some((h, gens)) = frontier.pop() {
        for x in g.elements() {
            if h.contains(x) {
                continue;
            }
            let mut ng = gens.clone();
            ng.push(x);
            let k = closure(g, &ng);
            if seen.insert(k.bits().clone()) {
                frontier.push((k, ng));
            }
        }
        all.push(h);
    }
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.members().cmp(&b.members())));
    Ok(all)
}

/// Left coset `xH`.
pub fn coset(h: &GSubset, x: usize) -> Result<GSubset> {
    h.ensure_subgroup()?;
    Ok(h.left_translate(x))
}

/// Right coset `Hx`.
pub fn right_coset(h: &GSubset, x: usize) -> Result<GSubset> {
    h.ensure_subgroup()?;
    Ok(h.right_translate(x))
}

/// `yAy⁻¹`.
pub fn conjugate(a: &GSubset, y: usize) -> GSubset {
    a.conjugate(y)
}

/// Distinct left cosets of `H`, each with its least element as representative,
/// ordered by representative.
pub fn left_cosets(h: &GSubset) -> Result<Vec<(usize, GSubset)>> {
    h.ensure_subgroup()?;
    let g = h.group();
    let mut covered = FixedBitSet::with_capacity(g.order());
    let mut out = Vec::new();
    for x in g.elements() {
        if covered.contains(x) {
            continue;
        }
        let c = h.left_translate(x);
        covered.union_with(c.bits());
        out.push((x, c));
    }
    Ok(out)
}

/// Distinct right cosets `Hx`, representative = least element.
pub fn right_cosets(h: &GSubset) -> Result<Vec<(usize, GSubset)>> {
    h.ensure_subgroup()?;
    let g = h.group();
    let mut covered = FixedBitSet::with_capacity(g.order());
    let mut out = Vec::new();
    for x in g.elements() {
        if covered.contains(x) {
            continue;
        }
        let c = h.right_translate(x);
        covered.union_with(c.bits());
        out.push((x, c));
    }
    Ok(out)
}

/// If `A` is a right coset `Hx`, returns `(H, x)` with `x` the least element
/// of `A`; `H = A a⁻¹` for any `a ∈ A`.
pub fn as_right_coset(a: &GSubset) -> Option<(GSubset, usize)> {
    let x = a.first()?;
    let h = a.right_translate(a.group().inv(x));
    if h.is_subgroup() {
        Some((h, x))
    } else {
        None
    }
}

/// If `A` is a left coset `xH`, returns `(H, x)` with `x` the least element.
pub fn as_left_coset(a: &GSubset) -> Option<(GSubset, usize)> {
    let x = a.first()?;
    let h = a.left_translate(a.group().inv(x));
    if h.is_subgroup() {
        Some((h, x))
    } else {
        None
    }
}
