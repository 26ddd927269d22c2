//! Product sets, doubling, multiplicative energy and symmetry sets.
//!
//! Everything here is computed from exact integer counts. The basic count is
//! `r_A(x) = |A ∩ xA|`, so that `1_A ∗ 1_{A⁻¹}(x) = r_A(x)/n`.

use fixedbitset::FixedBitSet;
use num_complex::Complex64;

use crate::group_core::{GFunc, GSubset};
use crate::spectral::convolve;
use crate::{Error, Result};

/// `AB`.
pub fn product_set(a: &GSubset, b: &GSubset) -> GSubset {
    let g = a.group();
    debug_assert!(g == b.group());
    let mut bits = FixedBitSet::with_capacity(g.order());
    let bm = b.members();
    for x in a.iter() {
        for &y in &bm {
            bits.insert(g.mul(x, y));
        }
    }
    GSubset::from_fn(g, |x| bits.contains(x))
}

/// `Aᵏ` for `k ≥ 1`; stops early once the powers stabilize.
pub fn power_set(a: &GSubset, k: usize) -> Result<GSubset> {
    if k == 0 {
        return Err(Error::Param("power_set needs k ≥ 1".into()));
    }
    let mut cur = a.clone();
    for _ in 1..k {
        let next = product_set(&cur, a);
        if next == cur {
            break;
        }
        cur = next;
    }
    Ok(cur)
}

/// `A^k` with `A⁰ = {e}`.
pub fn power_or_identity(a: &GSubset, k: usize) -> GSubset {
    if k == 0 {
        GSubset::identity_set(a.group())
    } else {
        power_set(a, k).expect("k ≥ 1")
    }
}

pub fn inverse_set(a: &GSubset) -> GSubset {
    a.inverse()
}

/// `r_A(x) = |A ∩ xA|` for every `x`.
pub fn overlap_counts(a: &GSubset) -> Vec<usize> {
    let g = a.group();
    let mut counts = vec![0usize; g.order()];
    let m = a.members();
    for &p in &m {
        for &q in &m {
            counts[g.mul(p, g.inv(q))] += 1;
        }
    }
    counts
}

fn nonempty(a: &GSubset) -> Result<()> {
    if a.is_empty() {
        Err(Error::Param("set must be nonempty".into()))
    } else {
        Ok(())
    }
}

/// `|A²|/|A|`.
pub fn doubling(a: &GSubset) -> Result<f64> {
    nonempty(a)?;
    Ok(product_set(a, a).len() as f64 / a.len() as f64)
}

/// `|A³|/|A|`.
pub fn tripling(a: &GSubset) -> Result<f64> {
    nonempty(a)?;
    Ok(power_set(a, 3)?.len() as f64 / a.len() as f64)
}

/// `‖1_A ∗ 1_{A⁻¹}‖²_{L²(μ_G)} = Σ_x r_A(x)² / n³`.
pub fn energy(a: &GSubset) -> Result<f64> {
    nonempty(a)?;
    let n = a.group().order() as f64;
    let s: u128 = overlap_counts(a).iter().map(|&c| (c as u128) * (c as u128)).sum();
    Ok(s as f64 / (n * n * n))
}

/// `energy(A) / μ(A)³`, the largest `c` for which the energy hypothesis holds.
pub fn energy_ratio(a: &GSubset) -> Result<f64> {
    nonempty(a)?;
    let s: u128 = overlap_counts(a).iter().map(|&c| (c as u128) * (c as u128)).sum();
    let k = a.len() as f64;
    Ok(s as f64 / (k * k * k))
}

/// Smallest integer count meeting the threshold `η|A|`; a `1e-9` slack keeps
/// exact ties such as `η = 11/12, |A| = 12` on the inclusive side.
fn count_threshold(eta: f64, size: usize) -> usize {
    (eta * size as f64 - 1e-9).ceil().max(0.0) as usize
}

/// `Sym_η(A) = {x : |A ∩ xA| ≥ η|A|}`, ties included.
pub fn symmetry_set(a: &GSubset, eta: f64) -> Result<GSubset> {
    nonempty(a)?;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Param(format!("symmetry threshold {eta} outside (0,1]")));
    }
    let t = count_threshold(eta, a.len());
    let counts = overlap_counts(a);
    Ok(GSubset::from_fn(a.group(), |x| counts[x] >= t))
}

/// `Sym_η(A)` for several thresholds sharing one count pass.
pub fn symmetry_sets(a: &GSubset, etas: &[f64]) -> Result<Vec<GSubset>> {
    nonempty(a)?;
    let counts = overlap_counts(a);
    etas.iter()
        .map(|&eta| {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::Param(format!("symmetry threshold {eta} outside (0,1]")));
            }
            let t = count_threshold(eta, a.len());
            Ok(GSubset::from_fn(a.group(), |x| counts[x] >= t))
        })
        .collect()
}

/// Output of [`sym_regular_threshold`].
#[derive(Clone, Debug, PartialEq)]
pub struct RegularThreshold {
    pub c_prime: f64,
    /// `|μ(Sym_{c′(1+η)}(A)) / μ(Sym_{c′}(A)) − 1|` at the chosen `c′`.
    pub ratio: f64,
}

/// Number of grid points scanned by [`sym_regular_threshold`].
pub const REGULARITY_GRID: usize = 64;

/// Scans `c′ = c / 2^{1+j/64}`, `j = 0..64` (all in `(c/4, c/2]`) and returns
/// the point minimizing `|μ(Sym_{c′(1+η)})/μ(Sym_{c′}) − 1|`, earliest `j` on ties.
pub fn sym_regular_threshold(a: &GSubset, c: f64, eta: f64) -> Result<RegularThreshold> {
    nonempty(a)?;
    if !(c > 0.0 && c <= 1.0) || !(eta >= 0.0 && eta <= 1.0) {
        return Err(Error::Param(format!("need c ∈ (0,1], η ∈ [0,1]; got c={c}, η={eta}")));
    }
    let ratio_c = energy_ratio(a)?;
    if ratio_c < c * (1.0 - 1e-12) {
        return Err(Error::audit(
            "sym_regular_threshold",
            format!("energy hypothesis fails: energy/μ(A)³ = {ratio_c} < c = {c}"),
        ));
    }
    let counts = overlap_counts(a);
    let size_at = |t: f64| {
        let th = count_threshold(t, a.len());
        counts.iter().filter(|&&k| k >= th).count() as f64
    };
    let mut best: Option<RegularThreshold> = None;
    for j in 0..REGULARITY_GRID {
        let cp = c / 2f64.powf(1.0 + j as f64 / REGULARITY_GRID as f64);
        let ratio = (size_at(cp * (1.0 + eta)) / size_at(cp) - 1.0).abs();
        if best.as_ref().map_or(true, |b| ratio < b.ratio) {
            best = Some(RegularThreshold { c_prime: cp, ratio });
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// `∫ |1 − μ ∗ 1_A| dμ_A` for a probability density `μ`.
pub fn approx_projection_integral(a: &GSubset, mu: &GFunc) -> Result<f64> {
    nonempty(a)?;
    let c = convolve(mu, &GFunc::indicator(a))?;
    let s: f64 = a.iter().map(|x| (Complex64::new(1.0, 0.0) - c.at(x)).norm()).sum();
    Ok(s / a.len() as f64)
}

/// If `K` is a symmetric neighbourhood of the identity with `|K²| < (3/2)|K|`,
/// returns `K²` after checking directly that it is a subgroup.
pub fn kneser_subgroup(k: &GSubset) -> Result<Option<GSubset>> {
    if !k.is_symmetric_neighbourhood() {
        return Err(Error::Param("K must be a symmetric neighbourhood of the identity".into()));
    }
    let k2 = product_set(k, k);
    if 2 * k2.len() >= 3 * k.len() {
        return Ok(None);
    }
    if !k2.is_subgroup() {
        return Err(Error::audit("kneser", "|K²| < 1.5|K| but K² is not a subgroup"));
    }
    Ok(Some(k2))
}

/// `μ(A^{σ_1} ⋯ A^{σ_m}) / μ(A)` for every sign pattern with `1 ≤ m ≤ max_len`,
/// signs encoded as bits (`1` = inverse).
pub fn cover_ratios(a: &GSubset, max_len: usize) -> Result<Vec<(Vec<i8>, f64)>> {
    nonempty(a)?;
    let ainv = a.inverse();
    let mut out = Vec::new();
    for m in 1..=max_len {
        for mask in 0u32..(1 << m) {
            let signs: Vec<i8> = (0..m).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            let mut cur = if signs[0] == 1 { a.clone() } else { ainv.clone() };
            for &s in &signs[1..] {
                cur = product_set(&cur, if s == 1 { a } else { &ainv });
            }
            out.push((signs, cur.len() as f64 / a.len() as f64));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build_group;
    use crate::group_core::subgroups;

    /// Direct `1_A ∗ 1_{A⁻¹}` via floating convolution, for cross-checking counts.
    fn energy_oracle(a: &GSubset) -> f64 {
        let f = GFunc::indicator(a);
        let c = convolve(&f, &GFunc::indicator(&a.inverse())).unwrap();
        c.l2_norm_sq()
    }

    #[test]
    fn cyclic_five_square() {
        let g = build_group("cyclic:5").unwrap();
        let a = GSubset::from_elements(&g, [0, 1]).unwrap();
        assert_eq!(product_set(&a, &a).members(), vec![0, 1, 2]);
        assert_eq!(doubling(&a).unwrap(), 1.5);
    }

    #[test]
    fn subgroup_statistics() {
        let g = build_group("dihedral:12").unwrap();
        for h in subgroups(&g).unwrap() {
            assert_eq!(product_set(&h, &h), h);
            assert_eq!(doubling(&h).unwrap(), 1.0);
            let mu = h.measure();
            assert!((energy(&h).unwrap() - mu.powi(3)).abs() < 1e-15);
            for eta in [0.1, 0.5, 1.0] {
                assert_eq!(symmetry_set(&h, eta).unwrap(), h);
            }
        }
    }

    #[test]
    fn energy_matches_convolution() {
        let g = build_group("symmetric:3").unwrap();
        for mask in 1u32..64 {
            let a = GSubset::from_fn(&g, |x| mask >> x & 1 == 1);
            assert!((energy(&a).unwrap() - energy_oracle(&a)).abs() < 1e-14);
        }
        let e = GSubset::identity_set(&g);
        assert!((energy(&e).unwrap() - 1.0 / 216.0).abs() < 1e-15);
    }

    #[test]
    fn product_with_inverse_contains_identity() {
        let g = build_group("quaternion:8").unwrap();
        for mask in 1u32..256 {
            let a = GSubset::from_fn(&g, |x| mask >> x & 1 == 1);
            assert!(product_set(&a, &a.inverse()).contains_identity());
        }
    }

    #[test]
    fn threshold_ties_are_included() {
        let g = build_group("cyclic:24").unwrap();
        let a = GSubset::from_elements(&g, 0..12).unwrap();
        // |A ∩ (1 + A)| = 11 = (11/12)|A| exactly.
        let s = symmetry_set(&a, 11.0 / 12.0).unwrap();
        assert_eq!(s.members(), vec![0, 1, 23]);
    }

    #[test]
    fn regular_threshold_on_subgroup_and_coset_union() {
        let g = build_group("cyclic:24").unwrap();
        let h = GSubset::from_fn(&g, |x| x % 4 == 0);
        let r = sym_regular_threshold(&h, 1.0, 0.1).unwrap();
        assert_eq!(r.ratio, 0.0);
        let u = h.union(&h.left_translate(1));
        let c = energy_ratio(&u).unwrap();
        let r = sym_regular_threshold(&u, c, 0.05).unwrap();
        assert_eq!(r.ratio, 0.0);
        assert!(r.c_prime > c / 4.0 && r.c_prime <= c / 2.0);
    }

    #[test]
    fn regular_threshold_rejects_false_hypothesis() {
        let g = build_group("cyclic:16").unwrap();
        let a = GSubset::from_elements(&g, [0, 3, 7]).unwrap();
        assert!(sym_regular_threshold(&a, 1.0, 0.1).is_err());
    }

    #[test]
    fn kneser_on_subgroup_and_interval() {
        let g = build_group("cyclic:12").unwrap();
        let h = GSubset::from_fn(&g, |x| x % 3 == 0);
        assert_eq!(kneser_subgroup(&h).unwrap(), Some(h.clone()));
        let iv = GSubset::from_elements(&g, [11, 0, 1]).unwrap();
        assert_eq!(kneser_subgroup(&iv).unwrap(), None);
    }
}
