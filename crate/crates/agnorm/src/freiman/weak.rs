use serde::Serialize;

use super::{doubling_to_tripling, sym_witness_search, SearchConfig, Trace};
use crate::group_core::GSubset;
use crate::mult_pairs::{validate_pair, MultiplicativePair, PairReport, Width, DEFAULT_R_CAP};
use crate::set_structures::{
    approx_projection_integral, cover_ratios, doubling, energy_ratio, power_or_identity, product_set, sym_regular_threshold, symmetry_set,
    symmetry_sets,
};
use crate::{Error, GFunc, Result};

/// The absolute constants `C_R`, `c_R` of the regularity lemma, taken as 1.
pub const REGULARITY_CONSTANT: f64 = 1.0;

#[derive(Clone, Debug, Serialize)]
pub struct WeakFreiman {
    #[serde(skip)]
    pub pair: MultiplicativePair,
    pub report: PairReport,
    /// Measured doubling `μ(A²)/μ(A)`.
    pub k: f64,
    pub eta: f64,
    pub c_prime: f64,
    pub trace: Trace,
}

/// `B′ = Sym_{1−η/16rK⁴}(A′A)` and `B⁺ ⊇ B ⊇ B⁻` the symmetry sets of `A′A`
/// at `c′, c′(1+η/2), c′(1+η)` for a regular `c′ ∈ (1/4K⁴, 1/2K⁴]`, with
/// `η = ε/(1 + log 4K⁴)`.
pub fn weak_freiman(a: &GSubset, r: usize, eps: f64, cfg: &SearchConfig) -> Result<WeakFreiman> {
    const STAGE: &str = "weak_freiman";
    if a.is_empty() || !a.is_symmetric() {
        return Err(Error::Param("A must be nonempty and symmetric".into()));
    }
    if r == 0 || !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Param("need r ≥ 1 and ε ∈ (0, 1]".into()));
    }
    let mut trace = Trace::default();
    let k = doubling(a)?;
    let k4 = k.powi(4);
    trace.record(STAGE, "K = μ(A²)/μ(A)", k);
    let c = REGULARITY_CONSTANT.min(1.0);
    let eta = c * eps / (1.0 + (4.0 * k4).ln());
    let tau = eta / (16.0 * r as f64 * k4);
    let w = sym_witness_search(a, tau, cfg)?;
    let aa = product_set(&w.subset, a);
    let bp = w.sym;
    trace.record(STAGE, "μ(B′)/μ(A)", bp.len() as f64 / a.len() as f64);
    let bpr = power_or_identity(&bp, r);
    trace.require(STAGE, "B′ʳ ⊆ Sym_{1−η/16K⁴}(A′A)", bpr.is_subset(&symmetry_set(&aa, 1.0 - eta / (16.0 * k4))?))?;
    trace.require_le(STAGE, "1/K⁴ ≤ energy(A′A)/μ(A′A)³", 1.0 / k4, energy_ratio(&aa)?)?;
    let reg = sym_regular_threshold(&aa, 1.0 / k4, eta)?;
    let cp = reg.c_prime;
    trace.record(STAGE, "c′", cp);
    trace.record(STAGE, "|μ(Sym_{c′(1+η)})/μ(Sym_{c′}) − 1|", reg.ratio);
    let sets = symmetry_sets(&aa, &[cp, cp * (1.0 + eta / 2.0), cp * (1.0 + eta)])?;
    let [upper, ground, lower]: [GSubset; 3] = sets.try_into().expect("three thresholds");
    trace.require(STAGE, "B′ʳ ⊆ Sym_{1−c′η/4}(A′A)", bpr.is_subset(&symmetry_set(&aa, 1.0 - cp * eta / 4.0)?))?;
    trace.require_le(
        STAGE,
        "μ(B⁺) ≤ (1+ε)μ(B⁻)",
        upper.len() as f64,
        (1.0 + eps) * lower.len() as f64,
    )?;
    let a4 = power_or_identity(a, 4);
    trace.require(STAGE, "B ⊆ A⁴", ground.is_subset(&a4))?;
    let pair = MultiplicativePair::new(ground, bp, upper, lower, Width::Finite(r))?;
    let report = validate_pair(&pair, DEFAULT_R_CAP);
    trace.require(STAGE, format!("pair is {r}-multiplicative: {:?}", report.failures), report.valid)?;
    trace.require_le(STAGE, "closure ≤ ε", report.epsilon, eps)?;
    trace.record(STAGE, "thickness", report.thickness);
    trace.record(STAGE, "μ(B)/μ(A)", pair.ground.len() as f64 / a.len() as f64);
    Ok(WeakFreiman {
        pair,
        report,
        k,
        eta,
        c_prime: cp,
        trace,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Correlation {
    #[serde(skip)]
    pub pair: MultiplicativePair,
    pub report: PairReport,
    /// `‖1_A ∗ μ_B‖_∞ = max_x |A ∩ xB⁻¹|/|B|`.
    pub sup: f64,
    /// `‖μ_B ∗ 1_A‖_∞ = max_x |B ∩ xA⁻¹|/|B|`.
    pub sup_left: f64,
    pub trace: Trace,
}

/// `max_x |S ∩ xT⁻¹| / |T|`, i.e. `‖1_S ∗ μ_T‖_∞`.
pub fn sup_correlation(s: &GSubset, t: &GSubset) -> f64 {
    let g = s.group();
    let tinv = t.inverse();
    let best = g.elements().map(|x| s.intersection_count(&tinv.left_translate(x))).max().unwrap_or(0);
    best as f64 / t.len() as f64
}

/// `max_x |T ∩ xS⁻¹| / |T|`, i.e. `‖μ_T ∗ 1_S‖_∞`.
pub fn sup_left_correlation(t: &GSubset, s: &GSubset) -> f64 {
    let g = t.group();
    let sinv = s.inverse();
    let best = g.elements().map(|x| t.intersection_count(&sinv.left_translate(x))).max().unwrap_or(0);
    best as f64 / t.len() as f64
}

/// Doubling→tripling, a symmetry set `A‴` of `A″A′`, then [`weak_freiman`]
/// on `A‴`; the correlation of `A` with the resulting ground set is exact.
pub fn freiman_correlation(a: &GSubset, r: usize, eps: f64, cfg: &SearchConfig) -> Result<Correlation> {
    const STAGE: &str = "freiman_correlation";
    if a.is_empty() {
        return Err(Error::Param("A must be nonempty".into()));
    }
    let mut trace = Trace::default();
    trace.record(STAGE, "K = μ(A²)/μ(A)", doubling(a)?);
    let t = doubling_to_tripling(a, cfg)?;
    trace.extend(t.trace.clone());
    let ap = t.a_prime;
    for (signs, ratio) in cover_ratios(&ap, 3)? {
        trace.record(STAGE, format!("μ(A′^{signs:?})/μ(A′)"), ratio);
    }
    let w = sym_witness_search(&ap, 1.0 / 16.0, cfg)?;
    let app = w.subset;
    let x = product_set(&app, &ap);
    let a3 = w.sym;
    let a3sq = product_set(&a3, &a3);
    trace.require(STAGE, "A‴² ⊆ Sym_{7/8}(A″A′)", a3sq.is_subset(&symmetry_set(&x, 7.0 / 8.0)?))?;
    trace.require_le(STAGE, "μ(A‴²) ≤ 2μ(A″A′)", a3sq.len() as f64, 2.0 * x.len() as f64)?;
    let wf = weak_freiman(&a3, r, eps, cfg)?;
    trace.extend(wf.trace);
    let b = &wf.pair.ground;
    let a3_4 = power_or_identity(&a3, 4);
    trace.require(STAGE, "B ⊆ A‴⁴", b.is_subset(&a3_4))?;
    trace.require(STAGE, "A‴⁴ ⊆ Sym_{1/2}(A″A′)", a3_4.is_subset(&symmetry_set(&x, 0.5)?))?;
    let proj = approx_projection_integral(&x, &GFunc::uniform_density(b)?)?;
    trace.require_le(STAGE, "∫|1 − μ_B ∗ 1_{A″A′}| dμ_{A″A′} ≤ 1/2", proj, 0.5)?;
    trace.require_le(STAGE, "1/2 ≤ ‖μ_B ∗ 1_{A″A′}‖_∞", 0.5, sup_left_correlation(b, &x))?;
    let sup = sup_correlation(a, b);
    let sup_left = sup_left_correlation(b, a);
    trace.require_le(STAGE, "0 < ‖1_A ∗ μ_B‖_∞", f64::MIN_POSITIVE, sup)?;
    trace.record(STAGE, "‖1_A ∗ μ_B‖_∞", sup);
    trace.record(STAGE, "‖μ_B ∗ 1_A‖_∞", sup_left);
    Ok(Correlation {
        pair: wf.pair,
        report: wf.report,
        sup,
        sup_left,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build_group;
    use crate::group_core::subgroups;
    use crate::spectral::convolve;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn subgroup_gives_subgroup_pair() {
        let g = build_group("dihedral:12").unwrap();
        for h in subgroups(&g).unwrap() {
            let w = weak_freiman(&h, 2, 0.5, &SearchConfig::default()).unwrap();
            let p = &w.pair;
            assert_eq!((&p.ground, &p.perturb, &p.upper, &p.lower), (&h, &h, &h, &h));
            assert!(w.report.valid);
        }
    }

    #[test]
    fn interval_gives_valid_pair_inside_a4() {
        let g = build_group("cyclic:128").unwrap();
        let a = GSubset::from_fn(&g, |x| x <= 10 || x >= 118);
        let w = weak_freiman(&a, 1, 0.5, &SearchConfig::default()).unwrap();
        assert!(w.report.valid && w.report.epsilon <= 0.5);
        assert!(w.pair.ground.is_subset(&power_or_identity(&a, 4)));
        assert!(w.trace.entries.iter().all(|e| e.passed));
    }

    #[test]
    fn dense_random_set_passes_or_names_the_stage() {
        let g = build_group("cyclic:60").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = GSubset::from_fn(&g, |_| rng.random_bool(0.4));
        let a = a.union(&a.inverse()).union(&GSubset::identity_set(&g));
        match weak_freiman(&a, 1, 0.5, &SearchConfig::default()) {
            Ok(w) => assert!(w.report.valid),
            Err(Error::Audit { .. }) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
        let lopsided = GSubset::from_elements(&g, [0, 1]).unwrap();
        assert!(matches!(weak_freiman(&lopsided, 1, 0.5, &SearchConfig::default()), Err(Error::Param(_))));
    }

    #[test]
    fn correlation_on_subgroup_is_one() {
        let g = build_group("symmetric:4").unwrap();
        let h = subgroups(&g).unwrap().into_iter().find(|h| h.len() == 6).unwrap();
        let c = freiman_correlation(&h, 1, 0.5, &SearchConfig::default()).unwrap();
        assert_eq!(c.sup, 1.0);
    }

    #[test]
    fn correlation_matches_convolution_oracle() {
        let g = build_group("dihedral:16").unwrap();
        let subs = subgroups(&g).unwrap();
        let h = subs.iter().find(|h| h.len() == 4 && !h.is_normal()).unwrap();
        let a = h.union(&h.right_translate(1));
        let c = freiman_correlation(&a, 1, 0.5, &SearchConfig::default()).unwrap();
        let conv = convolve(&GFunc::indicator(&a), &GFunc::uniform_density(&c.pair.ground).unwrap()).unwrap();
        assert!((c.sup - conv.linf_norm()).abs() < 1e-12);
        assert!(c.sup >= 1.0 / 16.0);
    }

    #[test]
    fn correlation_on_intervals_is_monotone() {
        let g = build_group("cyclic:256").unwrap();
        let cfg = SearchConfig { budget: 4, seed: 1 };
        let small = GSubset::from_fn(&g, |x| x <= 12 || x >= 244);
        let c = freiman_correlation(&small, 1, 0.5, &cfg).unwrap();
        let big = GSubset::from_fn(&g, |x| x <= 20 || x >= 236);
        // With B fixed, enlarging A can only raise the sup.
        assert!(sup_correlation(&big, &c.pair.ground) >= c.sup);
        assert!(c.sup > 0.0);
    }
}
