//! Multiplicative pairs `(B, B′)` with sandwich sets `B⁻ ⊆ B ⊆ B⁺`, their
//! constructors, exact validation and the approximate Haar property.
//!
//! A pair is `r`-multiplicative when `B′ʳ B⁻ B′ʳ ⊆ B` and `B′ʳ B B′ʳ ⊆ B⁺`,
//! all four sets being symmetric neighbourhoods of the identity.

mod lemmas;
mod local;

pub use lemmas::*;
pub use local::*;

use num_complex::Complex64;
use serde::Serialize;

use crate::group_core::{GFunc, GSubset};
use crate::set_structures::{power_or_identity, product_set};
use crate::spectral::convolve;
use crate::{Error, Result};

/// Pairs of unbounded width are validated for every `r` up to this cap.
pub const DEFAULT_R_CAP: usize = 8;

/// The multiplicative width `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Width {
    Finite(usize),
    /// Valid for every `r`, as for subgroup pairs; checked up to a cap.
    Unbounded,
}

impl Width {
    /// The `r` used in bitset checks.
    pub fn effective(self, cap: usize) -> usize {
        match self {
            Width::Finite(r) => r,
            Width::Unbounded => cap,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicativePair {
    pub ground: GSubset,
    pub perturb: GSubset,
    pub upper: GSubset,
    pub lower: GSubset,
    pub width: Width,
}

/// Outcome of [`validate_pair`]. Failures are listed, never raised.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub valid: bool,
    /// Largest `k ≤ cap` for which both containments hold with `B′ᵏ`.
    pub valid_r: usize,
    /// `|B⁺ ∖ B⁻| / |B|` as numerator and denominator.
    pub epsilon_num: usize,
    pub epsilon_den: usize,
    pub epsilon: f64,
    /// `|B′| / |B|`.
    pub thickness_num: usize,
    pub thickness_den: usize,
    pub thickness: f64,
    pub failures: Vec<String>,
}

impl MultiplicativePair {
    pub fn new(ground: GSubset, perturb: GSubset, upper: GSubset, lower: GSubset, width: Width) -> Result<Self> {
        let g = ground.group();
        for s in [&perturb, &upper, &lower] {
            g.ensure_same(s.group())?;
        }
        if let Width::Finite(0) = width {
            return Err(Error::Param("width r must be positive".into()));
        }
        Ok(MultiplicativePair {
            ground,
            perturb,
            upper,
            lower,
            width,
        })
    }

    /// `μ(B⁺ ∖ B⁻)/μ(B)`.
    pub fn closure(&self) -> f64 {
        self.upper.difference(&self.lower).len() as f64 / self.ground.len() as f64
    }

    /// `μ(B′)/μ(B)`.
    pub fn thickness(&self) -> f64 {
        self.perturb.len() as f64 / self.ground.len() as f64
    }

    /// `B′ʳ`, with `r` capped at [`DEFAULT_R_CAP`] for unbounded pairs.
    pub fn perturb_power(&self) -> GSubset {
        power_or_identity(&self.perturb, self.width.effective(DEFAULT_R_CAP))
    }

    pub fn validate(&self) -> PairReport {
        validate_pair(self, DEFAULT_R_CAP)
    }
}

fn sandwich_holds(p: &MultiplicativePair, pk: &GSubset) -> (bool, bool) {
    let inner = product_set(&product_set(pk, &p.lower), pk);
    let outer = product_set(&product_set(pk, &p.ground), pk);
    (inner.is_subset(&p.ground), outer.is_subset(&p.upper))
}

/// Exact audit of the pair axioms. For [`Width::Unbounded`] the containments
/// are checked at `r = cap`, which implies every smaller `r` since `e ∈ B′`.
pub fn validate_pair(p: &MultiplicativePair, cap: usize) -> PairReport {
    let mut failures = Vec::new();
    for (name, s) in [("B", &p.ground), ("B′", &p.perturb), ("B⁺", &p.upper), ("B⁻", &p.lower)] {
        if !s.is_symmetric() {
            failures.push(format!("{name} is not symmetric"));
        }
        if !s.contains_identity() {
            failures.push(format!("{name} does not contain the identity"));
        }
    }
    let r = p.width.effective(cap);
    let scan_to = r.max(cap);
    let mut valid_r = 0;
    let mut pk = GSubset::identity_set(p.ground.group());
    let mut at_r = (false, false);
    for k in 1..=scan_to {
        pk = product_set(&pk, &p.perturb);
        let ok = sandwich_holds(p, &pk);
        if k == r {
            at_r = ok;
        }
        if ok.0 && ok.1 && valid_r == k - 1 {
            valid_r = k;
        }
    }
    if !at_r.0 {
        failures.push(format!("B′^{r}·B⁻·B′^{r} ⊄ B"));
    }
    if !at_r.1 {
        failures.push(format!("B′^{r}·B·B′^{r} ⊄ B⁺"));
    }
    let (en, ed) = (p.upper.difference(&p.lower).len(), p.ground.len());
    let (tn, td) = (p.perturb.len(), p.ground.len());
    PairReport {
        valid: failures.is_empty(),
        valid_r,
        epsilon_num: en,
        epsilon_den: ed,
        epsilon: en as f64 / ed.max(1) as f64,
        thickness_num: tn,
        thickness_den: td,
        thickness: tn as f64 / td.max(1) as f64,
        failures,
    }
}

fn ensure_neighbourhood(a: &GSubset, what: &str) -> Result<()> {
    if a.is_symmetric_neighbourhood() {
        Ok(())
    } else {
        Err(Error::Param(format!("{what} must be a symmetric neighbourhood of the identity")))
    }
}

/// `(H, H, H, H)`: 0-closed, 1-thick, every width.
pub fn pair_from_subgroup(h: &GSubset) -> Result<MultiplicativePair> {
    h.ensure_subgroup()?;
    MultiplicativePair::new(h.clone(), h.clone(), h.clone(), h.clone(), Width::Unbounded)
}

/// `(AH, H, AH, AH)` for a symmetric neighbourhood `A` normalizing `H`.
pub fn pair_from_coset_union(a: &GSubset, h: &GSubset) -> Result<MultiplicativePair> {
    h.ensure_subgroup()?;
    ensure_neighbourhood(a, "A")?;
    if a.iter().any(|x| h.conjugate(x) != *h) {
        return Err(Error::Param("A must lie in the normalizer of H".into()));
    }
    let ah = product_set(a, h);
    MultiplicativePair::new(ah.clone(), h.clone(), ah.clone(), ah, Width::Unbounded)
}

/// `(A^{2r}, A, A^{4r}, {e})`.
pub fn pair_from_product_set(a: &GSubset, r: usize) -> Result<MultiplicativePair> {
    ensure_neighbourhood(a, "A")?;
    if r == 0 {
        return Err(Error::Param("width r must be positive".into()));
    }
    MultiplicativePair::new(
        power_or_identity(a, 2 * r),
        a.clone(),
        power_or_identity(a, 4 * r),
        GSubset::identity_set(a.group()),
        Width::Finite(r),
    )
}

/// Smallest `n ≥ 2r` with `|A^{n+2r}| ≤ (1+ε)|A^{n−2r}|`, returned as
/// `(Aⁿ, A, A^{n+2r}, A^{n−2r})`. Terminates because the powers stabilize.
pub fn pair_from_growth(a: &GSubset, r: usize, eps: f64) -> Result<(MultiplicativePair, usize)> {
    ensure_neighbourhood(a, "A")?;
    if r == 0 || !(eps >= 0.0) {
        return Err(Error::Param("need r ≥ 1 and ε ≥ 0".into()));
    }
    // powers[k] = A^k, extended lazily.
    let mut powers = vec![GSubset::identity_set(a.group()), a.clone()];
    let power = |k: usize, powers: &mut Vec<GSubset>| -> GSubset {
        while powers.len() <= k {
            let next = product_set(powers.last().unwrap(), a);
            powers.push(next);
        }
        powers[k].clone()
    };
    let mut n = 2 * r;
    loop {
        let hi = power(n + 2 * r, &mut powers);
        let lo = power(n - 2 * r, &mut powers);
        if hi.len() as f64 <= (1.0 + eps) * lo.len() as f64 {
            let b = power(n, &mut powers);
            return Ok((MultiplicativePair::new(b, a.clone(), hi, lo, Width::Finite(r))?, n));
        }
        n += 1;
    }
}

/// `(yBy⁻¹, yB′y⁻¹, yB⁺y⁻¹, yB⁻y⁻¹)`.
pub fn pair_conjugate(p: &MultiplicativePair, y: usize) -> MultiplicativePair {
    MultiplicativePair {
        ground: p.ground.conjugate(y),
        perturb: p.perturb.conjugate(y),
        upper: p.upper.conjugate(y),
        lower: p.lower.conjugate(y),
        width: p.width,
    }
}

/// `(B, B″ᵏ)` with the same sandwich sets and width `⌊r/k⌋`, for a symmetric
/// neighbourhood `B″ ⊆ B′`.
pub fn pair_subpair(p: &MultiplicativePair, sub: &GSubset, k: usize) -> Result<MultiplicativePair> {
    ensure_neighbourhood(sub, "B″")?;
    if !sub.is_subset(&p.perturb) || k == 0 {
        return Err(Error::Param("need B″ ⊆ B′ and k ≥ 1".into()));
    }
    let width = match p.width {
        Width::Unbounded => Width::Unbounded,
        Width::Finite(r) if r / k >= 1 => Width::Finite(r / k),
        Width::Finite(_) => return Err(Error::Param("⌊r/k⌋ = 0".into())),
    };
    MultiplicativePair::new(p.ground.clone(), power_or_identity(sub, k), p.upper.clone(), p.lower.clone(), width)
}

/// The pair `(B, B′)` with the tightest sandwich sets at width `r`:
/// `B⁺ = B′ʳBB′ʳ` and `B⁻ = {x : B′ʳxB′ʳ ⊆ B}`.
pub fn pair_tight(b: &GSubset, bp: &GSubset, r: usize) -> Result<MultiplicativePair> {
    ensure_neighbourhood(b, "B")?;
    ensure_neighbourhood(bp, "B′")?;
    if r == 0 {
        return Err(Error::Param("width r must be positive".into()));
    }
    let g = b.group();
    let pr = power_or_identity(bp, r);
    let upper = product_set(&product_set(&pr, b), &pr);
    let prm = pr.members();
    let lower = GSubset::from_fn(g, |x| {
        prm.iter().all(|&s| prm.iter().all(|&t| b.contains(g.mul(g.mul(s, x), t))))
    });
    if !lower.contains_identity() {
        return Err(Error::Param(format!("B′^{} ⊄ B, so no sandwich set B⁻ exists", 2 * r)));
    }
    MultiplicativePair::new(b.clone(), bp.clone(), upper, lower, Width::Finite(r))
}

/// `‖μ_B ∗ μ − μ_B‖` in total variation for a probability density `μ`
/// supported on `B′ʳ`.
pub fn approx_haar_defect(p: &MultiplicativePair, mu: &GFunc) -> Result<f64> {
    let g = p.ground.group();
    g.ensure_same(mu.group())?;
    let pr = p.perturb_power();
    if let Some(x) = mu.support().iter().find(|&x| !pr.contains(x)) {
        return Err(Error::Support(format!("μ has mass at {x} outside B′^r")));
    }
    let mass = mu.mean();
    if (mass - Complex64::new(1.0, 0.0)).norm() > 1e-9 || mu.values().iter().any(|z| z.re < -1e-12 || z.im.abs() > 1e-12) {
        return Err(Error::Param("μ must be a probability density".into()));
    }
    let mb = GFunc::uniform_density(&p.ground)?;
    Ok(convolve(&mb, mu)?.sub(&mb)?.l1_norm())
}

/// Thresholds on the thickness `c`, used for the parameter functions `r(c)`
/// and `ε(c)` of the multi-scale construction. `eval(c)` returns the value
/// attached to the largest threshold `≤ c`, or the first value below all.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepTable<T> {
    steps: Vec<(f64, T)>,
}

impl<T: Clone> StepTable<T> {
    pub fn constant(v: T) -> Self {
        StepTable { steps: vec![(0.0, v)] }
    }

    pub fn new(mut steps: Vec<(f64, T)>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::Param("step table needs at least one entry".into()));
        }
        steps.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(StepTable { steps })
    }

    pub fn eval(&self, c: f64) -> T {
        let mut out = &self.steps[0].1;
        for (t, v) in &self.steps {
            if *t <= c {
                out = v;
            }
        }
        out.clone()
    }
}

/// `B₃ = ⋂_{x∈X} x B₂² x⁻¹` where `X ⊆ B₁` is a greedy maximal set with
/// disjoint translates `B₂x`, so that `B₁ ⊆ B₂²X` and `uB₃u⁻¹ ⊆ B₂⁶` for
/// every `u ∈ B₁`. The hypotheses (a 1-multiplicative `(B₀,B₁)` and a
/// 1-closed 1-multiplicative `(B₁,B₂)`) are audited with tight sandwiches.
pub fn normalize_pair(b0: &GSubset, b1: &GSubset, b2: &GSubset) -> Result<GSubset> {
    let p01 = pair_tight(b0, b1, 1).map_err(|e| Error::audit("normalize_pair", format!("(B₀,B₁): {e}")))?;
    if !p01.validate().valid {
        return Err(Error::audit("normalize_pair", "(B₀,B₁) is not 1-multiplicative"));
    }
    let p12 = pair_tight(b1, b2, 1).map_err(|e| Error::audit("normalize_pair", format!("(B₁,B₂): {e}")))?;
    let rep = p12.validate();
    if !rep.valid || rep.epsilon > 1.0 {
        return Err(Error::audit(
            "normalize_pair",
            format!("(B₁,B₂) must be 1-closed; best closure is {}", rep.epsilon),
        ));
    }
    let g = b0.group();
    let mut covered = GSubset::empty(g);
    let mut xs = Vec::new();
    for x in b1.iter() {
        let t = b2.right_translate(x);
        if t.intersection_count(&covered) == 0 {
            covered = covered.union(&t);
            xs.push(x);
        }
    }
    let b22 = product_set(b2, b2);
    let mut b3 = GSubset::full(g);
    for &x in &xs {
        b3 = b3.intersection(&b22.conjugate(x));
    }
    let xset = GSubset::from_elements(g, xs.iter().copied())?;
    if !b1.is_subset(&product_set(&b22, &xset)) {
        return Err(Error::audit("normalize_pair", "covering B₁ ⊆ B₂²X failed"));
    }
    let b26 = power_or_identity(b2, 6);
    if let Some(u) = b1.iter().find(|&u| !b3.conjugate(u).is_subset(&b26)) {
        return Err(Error::audit("normalize_pair", format!("u B₃ u⁻¹ ⊄ B₂⁶ at u = {u}")));
    }
    Ok(b3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build_group;
    use crate::group_core::subgroups;

    #[test]
    fn subgroup_pairs_are_exact() {
        let g = build_group("dihedral:12").unwrap();
        for h in subgroups(&g).unwrap() {
            let rep = pair_from_subgroup(&h).unwrap().validate();
            assert!(rep.valid, "{:?}", rep.failures);
            assert_eq!((rep.epsilon, rep.thickness, rep.valid_r), (0.0, 1.0, DEFAULT_R_CAP));
        }
    }

    #[test]
    fn interval_product_pair() {
        let g = build_group("cyclic:64").unwrap();
        let a = GSubset::from_elements(&g, [63, 0, 1]).unwrap();
        let p = pair_from_product_set(&a, 2).unwrap();
        let interval = |k: usize| GSubset::from_fn(&g, |x| x <= k || x >= 64 - k);
        assert_eq!(p.ground, interval(4));
        assert_eq!(p.upper, interval(8));
        let rep = p.validate();
        assert!(rep.valid);
        assert_eq!((rep.epsilon_num, rep.epsilon_den), (16, 9));
    }

    #[test]
    fn growth_pair_on_long_cycle() {
        let g = build_group("cyclic:100").unwrap();
        let a = GSubset::from_elements(&g, [99, 0, 1]).unwrap();
        let (p, n) = pair_from_growth(&a, 1, 0.25).unwrap();
        // Direct scan: |A^m| = 2m+1, so need 2(n+2)+1 ≤ 1.25·(2(n−2)+1).
        let oracle = (2..).find(|&m: &usize| (2 * (m + 2) + 1) as f64 <= 1.25 * (2 * (m - 2) + 1) as f64).unwrap();
        assert_eq!(n, oracle);
        let rep = p.validate();
        assert!(rep.valid);
        assert!(rep.epsilon <= 0.25 + 1e-12);
    }

    #[test]
    fn growth_pair_on_subgroup_is_immediate() {
        let g = build_group("symmetric:4").unwrap();
        let h = subgroups(&g).unwrap().into_iter().find(|h| h.len() == 4).unwrap();
        let (p, n) = pair_from_growth(&h, 2, 0.0).unwrap();
        // n = 2r gives A⁰ = {e} below; n = 2r + 1 already has H on both sides.
        assert_eq!(n, 5);
        assert_eq!(p.closure(), 0.0);
    }

    #[test]
    fn conjugation_preserves_report() {
        let g = build_group("symmetric:3").unwrap();
        let a = GSubset::from_elements(&g, [0, 3]).unwrap();
        let p = pair_from_product_set(&a, 1).unwrap();
        let base = p.validate();
        for y in g.elements() {
            let q = pair_conjugate(&p, y).validate();
            assert_eq!((q.valid, q.epsilon, q.thickness, q.valid_r), (base.valid, base.epsilon, base.thickness, base.valid_r));
        }
    }

    #[test]
    fn haar_defect_cases() {
        let g = build_group("cyclic:100").unwrap();
        let a = GSubset::from_elements(&g, [99, 0, 1]).unwrap();
        let (p, _) = pair_from_growth(&a, 1, 0.25).unwrap();
        let d = GFunc::dirac(&g, 0);
        assert!(approx_haar_defect(&p, &d).unwrap() < 1e-15);
        let u = GFunc::uniform_density(&a).unwrap();
        assert!(approx_haar_defect(&p, &u).unwrap() <= p.closure() + 1e-10);
        let far = GFunc::dirac(&g, 50);
        assert!(matches!(approx_haar_defect(&p, &far), Err(Error::Support(_))));
    }

    #[test]
    fn tight_pair_is_valid() {
        let g = build_group("cyclic:32").unwrap();
        let b = GSubset::from_fn(&g, |x| x <= 6 || x >= 26);
        let bp = GSubset::from_elements(&g, [31, 0, 1]).unwrap();
        let p = pair_tight(&b, &bp, 2).unwrap();
        assert!(p.validate().valid);
        assert_eq!(p.lower, GSubset::from_fn(&g, |x| x <= 2 || x >= 30));
    }

    #[test]
    fn normalizing_normal_and_nonnormal_chains() {
        let g = build_group("dihedral:8").unwrap();
        let subs = subgroups(&g).unwrap();
        let n4 = subs.iter().find(|h| h.len() == 4 && h.is_normal()).unwrap();
        let b3 = normalize_pair(n4, n4, n4).unwrap();
        assert!(n4.is_subset(&b3));
        let full = GSubset::full(&g);
        let refl = subs.iter().find(|h| h.len() == 2 && !h.is_normal()).unwrap();
        let b3 = normalize_pair(&full, &full, refl).unwrap();
        for u in g.elements() {
            assert!(b3.conjugate(u).is_subset(refl));
        }
    }

    #[test]
    fn step_table_lookup() {
        let t = StepTable::new(vec![(0.5, 3usize), (0.1, 5)]).unwrap();
        assert_eq!(t.eval(0.05), 5);
        assert_eq!(t.eval(0.2), 5);
        assert_eq!(t.eval(0.9), 3);
    }
}
