//! Coset decompositions of integer-valued functions with bounded algebra norm.
//!
//! The engine replaces the analytic subgroup-finding pipeline by exhaustive
//! subgroup enumeration; every step is audited against the quantitative
//! inequalities it relies on.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::freiman::Trace;
use crate::group_core::{as_right_coset, generated_subgroup, left_cosets, subgroups, GFunc, GSubset};
use crate::mult_pairs::{validate_pair, MultiplicativePair, DEFAULT_R_CAP};
use crate::set_structures::{doubling, energy_ratio, power_or_identity};
use crate::spectral::{a_norm, adjoint, convolve, coset_projection, fourier_basis};
use crate::{Error, Result};

/// Required drop of `‖f_i‖_A` per iteration, before slack.
pub const NORM_DROP: f64 = 0.5;
/// Slack on the per-step norm-drop audit.
pub const DROP_TOL: f64 = 1e-6;
/// Threshold below which `‖1_A‖_A` forces `A` to be a coset.
pub const SMALL_NORM_THRESHOLD: f64 = 1.0 + 1.0 / 750.0;
/// Ceiling on the iteration's `ε_i`.
pub const EPS_CEILING: f64 = 0.1;
/// Largest term count the compaction search looks for.
pub const COMPACT_TERMS: usize = 3;
/// Compaction is skipped when (cosets × coefficients) exceeds this.
pub const COMPACT_LIMIT: usize = 2500;
/// Subsets up to this size are searched exhaustively for small doubling.
pub const EXHAUSTIVE_DOUBLING: usize = 16;
/// Default iteration cap for [`idempotent_decompose`].
pub const DEFAULT_MAX_STEPS: usize = 64;

const SUP_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct RoundingReport {
    pub epsilon: f64,
    pub rounded: GFunc,
    pub max_deviation: f64,
}

/// Pointwise nearest integer; fails at the first point farther than `ε`.
pub fn round_to_integer(f: &GFunc, eps: f64) -> Result<RoundingReport> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Param(format!("rounding needs 0 < ε < 1/2, got {eps}")));
    }
    for (x, v) in f.values().iter().enumerate() {
        let dev = (v.re - v.re.round()).abs().max(v.im.abs());
        if dev >= eps {
            return Err(Error::NotAlmostInteger {
                eps,
                point: x,
                value: v.re,
            });
        }
    }
    Ok(RoundingReport {
        epsilon: eps,
        rounded: GFunc::from_integers(f.group(), &f.rounded())?,
        max_deviation: f.integer_deviation(),
    })
}

/// `z·1_{xH}` with `x` the least element of the coset.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetTerm {
    pub z: i64,
    pub subgroup: GSubset,
    pub rep: usize,
}

impl CosetTerm {
    pub fn coset(&self) -> GSubset {
        self.subgroup.left_translate(self.rep)
    }
}

impl Serialize for CosetTerm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CosetTerm", 3)?;
        st.serialize_field("z", &self.z)?;
        st.serialize_field("subgroup", &self.subgroup.members())?;
        st.serialize_field("rep", &self.rep)?;
        st.end()
    }
}

/// `Σ z_j·1_{x_j H_j}`; exact when produced by [`idempotent_decompose`].
#[derive(Clone, Debug)]
pub struct CosetDecomposition {
    pub terms: Vec<CosetTerm>,
    pub source: GFunc,
}

impl CosetDecomposition {
    /// Integer values of the term sum.
    pub fn evaluate(&self) -> Vec<i64> {
        sum_terms(self.source.group().order(), &self.terms)
    }

    /// Exact equality with the source, which must be integer-valued.
    pub fn is_exact(&self) -> bool {
        self.source.is_integer_valued() && self.evaluate() == self.source.rounded()
    }
}

fn sum_terms(n: usize, terms: &[CosetTerm]) -> Vec<i64> {
    let mut out = vec![0i64; n];
    for t in terms {
        for x in t.coset().iter() {
            out[x] += t.z;
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct CosetRounding {
    pub terms: Vec<CosetTerm>,
    pub projection: GFunc,
    /// `f − f∗μ_H`, audited `3ε`-almost integer-valued.
    pub residual: GFunc,
    pub trace: Trace,
}

/// Splits `(f∗μ_H)_ℤ` into left-coset terms after auditing the hypotheses
/// `ε < 1/6`, `f` and `f_ℤ∗μ_H` `ε`-almost integer, `‖f_ℤ‖_A ≤ M` and
/// `μ(H) ≥ η‖f_ℤ‖_{L¹}`.
pub fn coset_rounding(f: &GFunc, h: &GSubset, eps: f64, m: f64, eta: f64) -> Result<CosetRounding> {
    const STAGE: &str = "coset_rounding";
    h.group().ensure_same(f.group())?;
    h.ensure_subgroup()?;
    let mut trace = Trace::default();
    trace.require(STAGE, format!("ε = {eps} < 1/6"), eps < 1.0 / 6.0)?;
    trace.require(STAGE, "f is ε-almost integer-valued", f.is_almost_integer(eps))?;
    let fz = GFunc::from_integers(f.group(), &f.rounded())?;
    let fz_proj = coset_projection(&fz, h)?;
    trace.require(STAGE, "f_ℤ∗μ_H is ε-almost integer-valued", fz_proj.is_almost_integer(eps))?;
    trace.require_le(STAGE, "‖f_ℤ‖_A ≤ M", a_norm(&fz)?, m)?;
    trace.require_le(STAGE, "η‖f_ℤ‖_{L¹} ≤ μ(H)", eta * fz.l1_norm(), h.measure())?;

    let projection = coset_projection(f, h)?;
    let mut terms = Vec::new();
    for (rep, _) in left_cosets(h)? {
        let z = projection.at(rep).re.round() as i64;
        if z != 0 {
            terms.push(CosetTerm {
                z,
                subgroup: h.clone(),
                rep,
            });
        }
    }
    let zmax = terms.iter().map(|t| t.z.unsigned_abs()).max().unwrap_or(0) as f64;
    trace.require_le(STAGE, "max |z_i| ≤ M + 1", zmax, m + 1.0)?;
    trace.record(STAGE, "term count", terms.len() as f64);
    let residual = f.sub(&projection)?;
    trace.require_le(STAGE, "residual integer deviation ≤ 3ε", residual.integer_deviation(), 3.0 * eps)?;
    Ok(CosetRounding {
        terms,
        projection,
        residual,
        trace,
    })
}

#[derive(Clone, Debug)]
pub struct LevelSubgroup {
    pub subgroup: GSubset,
    /// Position in the subgroup enumeration.
    pub index: usize,
    /// `‖f∗μ_H‖_{L∞}`.
    pub sup: f64,
    pub deviation: f64,
}

/// Every `H` with `f∗μ_H` `ε`-almost integer-valued and sup above `1/2`,
/// ordered by sup (descending), then `|H|` (descending), then index.
pub fn admissible_subgroups(f: &GFunc, eps: f64) -> Result<Vec<LevelSubgroup>> {
    if f.rounded().iter().all(|&v| v == 0) {
        return Err(Error::Param("f rounds to zero".into()));
    }
    let mut out = Vec::new();
    for (index, h) in subgroups(f.group())?.into_iter().enumerate() {
        let p = coset_projection(f, &h)?;
        let sup = p.linf_norm();
        if sup > 0.5 && p.is_almost_integer(eps) {
            out.push(LevelSubgroup {
                deviation: p.integer_deviation(),
                subgroup: h,
                index,
                sup,
            });
        }
    }
    out.sort_by(|a, b| {
        if (a.sup - b.sup).abs() > SUP_TOL {
            b.sup.total_cmp(&a.sup)
        } else {
            b.subgroup.len().cmp(&a.subgroup.len()).then(a.index.cmp(&b.index))
        }
    });
    Ok(out)
}

/// The preferred admissible subgroup; see [`admissible_subgroups`].
pub fn find_level_subgroup(f: &GFunc, eps: f64) -> Result<LevelSubgroup> {
    admissible_subgroups(f, eps)?
        .into_iter()
        .next()
        .ok_or(Error::NoAdmissibleSubgroup)
}

#[derive(Clone, Debug, Serialize)]
pub struct StepReport {
    pub step: usize,
    pub epsilon: f64,
    pub subgroup: Vec<usize>,
    pub subgroup_index: usize,
    pub sup: f64,
    pub norm_before: f64,
    pub norm_after: f64,
    pub terms: usize,
    /// Admissible subgroups passed over because their norm drop fell short.
    pub rejected: usize,
}

#[derive(Clone, Debug)]
pub struct DecomposeOutcome {
    pub decomposition: CosetDecomposition,
    pub steps: Vec<StepReport>,
    /// `‖f_i‖_A` for `i = 0, 1, …`.
    pub norms: Vec<f64>,
    pub residual: GFunc,
    pub complete: bool,
    /// Terms were replaced by a shorter exact representation.
    pub compacted: bool,
    pub failure: Option<String>,
}

/// `ε_i = min(3^i·ε₀, 1/10)` with `ε₀ = min(10⁻³, e^{−M})`.
pub fn epsilon_schedule(m: f64, i: usize) -> f64 {
    let e0 = 1e-3f64.min((-m).exp());
    (e0 * 3f64.powi(i as i32)).min(EPS_CEILING)
}

/// Iterates `f_{i+1} = f_i − f_i∗μ_{H_i}` until `(f_i)_ℤ = 0`.
///
/// Each step takes the first admissible subgroup whose measured drop
/// `‖f_i‖_A − ‖f_{i+1}‖_A` reaches `1/2 − 10⁻⁶`; `{e}` always qualifies.
/// A finished term list longer than the shortest exact representation with
/// at most three coset terms is replaced by it. Failures after the
/// precondition come back as a partial outcome.
pub fn idempotent_decompose(f: &GFunc, max_steps: usize) -> Result<DecomposeOutcome> {
    if !f.is_integer_valued() {
        return Err(Error::Param("f must be integer-valued".into()));
    }
    let g = f.group();
    let m = a_norm(f)?;
    let mut cur = f.clone();
    let mut terms: Vec<CosetTerm> = Vec::new();
    let mut steps = Vec::new();
    let mut norms = vec![m];
    let mut failure = None;
    let mut i = 0;
    while cur.rounded().iter().any(|&v| v != 0) {
        if i >= max_steps {
            failure = Some(format!("step cap {max_steps} reached"));
            break;
        }
        let eps = epsilon_schedule(m, i);
        let fz = GFunc::from_integers(g, &cur.rounded())?;
        let cands = match admissible_subgroups(&fz, eps) {
            Ok(c) if !c.is_empty() => c,
            Ok(_) => {
                failure = Some(Error::NoAdmissibleSubgroup.to_string());
                break;
            }
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        };
        let before = *norms.last().expect("seeded");
        let m_i = a_norm(&fz)? + 1e-9;
        let l1 = fz.l1_norm();
        let mut accepted = None;
        let mut rejected = 0;
        for c in &cands {
            let eta = c.subgroup.measure() / l1;
            let r = match coset_rounding(&cur, &c.subgroup, eps, m_i, eta) {
                Ok(r) => r,
                Err(_) => {
                    rejected += 1;
                    continue;
                }
            };
            let after = a_norm(&r.residual)?;
            if before - after >= NORM_DROP - DROP_TOL {
                accepted = Some((c, r, after));
                break;
            }
            rejected += 1;
        }
        let Some((c, r, after)) = accepted else {
            failure = Some(format!("no admissible subgroup achieves the norm drop at step {i}"));
            break;
        };
        steps.push(StepReport {
            step: i,
            epsilon: eps,
            subgroup: c.subgroup.members(),
            subgroup_index: c.index,
            sup: c.sup,
            norm_before: before,
            norm_after: after,
            terms: r.terms.len(),
            rejected,
        });
        norms.push(after);
        terms.extend(r.terms);
        cur = r.residual;
        i += 1;
    }
    let mut complete = failure.is_none();
    if complete && sum_terms(g.order(), &terms) != f.rounded() {
        failure = Some("accumulated terms do not reconstruct f".into());
        complete = false;
    }
    let mut compacted = false;
    if complete && terms.len() > 1 {
        if let Some(short) = compact_terms(f, terms.len().min(COMPACT_TERMS + 1) - 1)? {
            terms = short;
            compacted = true;
        }
    }
    Ok(DecomposeOutcome {
        decomposition: CosetDecomposition {
            terms,
            source: f.clone(),
        },
        steps,
        norms,
        residual: cur,
        complete,
        compacted,
        failure,
    })
}

/// Shortest exact representation of integer-valued `f` by at most
/// `max_terms ≤ 3` left-coset terms with `|z| ≤ 2‖f‖_∞`, or `None`.
/// Equal-length candidates are ranked by total coset size, coarsest first.
pub fn compact_terms(f: &GFunc, max_terms: usize) -> Result<Option<Vec<CosetTerm>>> {
    if max_terms == 0 || max_terms > COMPACT_TERMS || !f.is_integer_valued() {
        return Ok(None);
    }
    let target = f.rounded();
    let zmax = (2 * target.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)).max(1) as i64;
    let mut cosets: Vec<(GSubset, usize, GSubset)> = Vec::new();
    for h in subgroups(f.group())? {
        for (rep, c) in left_cosets(&h)? {
            cosets.push((h.clone(), rep, c));
        }
    }
    let coeffs: Vec<i64> = (1..=zmax).flat_map(|z| [z, -z]).collect();
    if cosets.len() * coeffs.len() > COMPACT_LIMIT {
        return Ok(None);
    }
    let by_support: HashMap<FixedBitSet, usize> = cosets
        .iter()
        .enumerate()
        .map(|(k, (_, _, c))| (c.bits().clone(), k))
        .collect();
    let term = |k: usize, z: i64| CosetTerm {
        z,
        subgroup: cosets[k].0.clone(),
        rep: cosets[k].1,
    };
    // A residual that is a single nonzero constant on a coset.
    let as_term = |r: &[i64]| -> Option<CosetTerm> {
        let mut bits = FixedBitSet::with_capacity(r.len());
        let mut z = 0;
        for (x, &v) in r.iter().enumerate() {
            if v != 0 {
                if z != 0 && v != z {
                    return None;
                }
                z = v;
                bits.insert(x);
            }
        }
        by_support.get(&bits).map(|&k| term(k, z))
    };
    if let Some(t) = as_term(&target) {
        return Ok(Some(vec![t]));
    }
    let sub = |r: &mut [i64], k: usize, z: i64| {
        for x in cosets[k].2.iter() {
            r[x] -= z;
        }
    };
    // Among representations of the least length, the coarsest (largest total
    // coset size) wins; ties go to the first in enumeration order.
    let weight = |ts: &[CosetTerm]| -> usize { ts.iter().map(|t| t.subgroup.len()).sum() };
    let mut best: Option<Vec<CosetTerm>> = None;
    let keep = |cand: Vec<CosetTerm>, best: &mut Option<Vec<CosetTerm>>| {
        if best.as_ref().is_none_or(|b| weight(&cand) > weight(b)) {
            *best = Some(cand);
        }
    };
    if max_terms >= 2 {
        for k in 0..cosets.len() {
            for &z in &coeffs {
                let mut r = target.clone();
                sub(&mut r, k, z);
                if let Some(t) = as_term(&r) {
                    keep(vec![term(k, z), t], &mut best);
                }
            }
        }
    }
    if best.is_none() && max_terms >= 3 {
        for k1 in 0..cosets.len() {
            for &z1 in &coeffs {
                let mut r1 = target.clone();
                sub(&mut r1, k1, z1);
                for k2 in k1 + 1..cosets.len() {
                    for &z2 in &coeffs {
                        let mut r2 = r1.clone();
                        sub(&mut r2, k2, z2);
                        if let Some(t) = as_term(&r2) {
                            keep(vec![term(k1, z1), term(k2, z2), t], &mut best);
                        }
                    }
                }
            }
        }
    }
    Ok(best)
}

/// `Some((H, x))` with `A = Hx` when `‖1_A‖_A < 1 + 1/750`; `x` is the
/// identity when `A ∋ e` and the least element otherwise.
pub fn small_norm_coset_test(a: &GSubset) -> Result<Option<(GSubset, usize)>> {
    if a.is_empty() {
        return Err(Error::Param("A must be nonempty".into()));
    }
    let norm = a_norm(&GFunc::indicator(a))?;
    if norm >= SMALL_NORM_THRESHOLD {
        return Ok(None);
    }
    let g = a.group();
    if a.contains_identity() {
        return if a.is_subgroup() {
            Ok(Some((a.clone(), g.identity())))
        } else {
            Err(Error::Numerical(format!("‖1_A‖_A = {norm} below threshold but A is not a coset")))
        };
    }
    as_right_coset(a)
        .map(Some)
        .ok_or_else(|| Error::Numerical(format!("‖1_A‖_A = {norm} below threshold but A is not a coset")))
}

/// `Σ_i s_i(f)·‖μ_B ∗ v_i‖²_{L²(μ_G)}` over the canonical Fourier basis.
pub fn dual_mass(f: &GFunc, b: &GSubset) -> Result<f64> {
    let basis = fourier_basis(f)?;
    let mu = GFunc::uniform_density(b)?;
    let mut total = 0.0;
    for (s, v) in basis.sing_values.iter().zip(&basis.vectors) {
        total += s * convolve(&mu, v)?.l2_norm_sq();
    }
    Ok(total)
}

/// `f ∗ μ̃_B ∗ μ_B`.
pub fn double_smooth(f: &GFunc, b: &GSubset) -> Result<GFunc> {
    let mu = GFunc::uniform_density(b)?;
    convolve(&convolve(f, &adjoint(&mu))?, &mu)
}

#[derive(Clone, Debug, Serialize)]
pub struct CollectionBound {
    pub nu: f64,
    pub m: f64,
    pub epsilon: f64,
    /// `dual_mass(f, B′) − dual_mass(f, B)`.
    pub gain: f64,
    /// `ν²/M − 4εM`.
    pub bound: f64,
}

impl CollectionBound {
    pub fn holds(&self, tol: f64) -> bool {
        self.gain >= self.bound - tol
    }
}

/// Measures both sides of the mass-gain inequality for a valid pair with
/// width at least 1.
pub fn spectral_collection(f: &GFunc, p: &MultiplicativePair) -> Result<CollectionBound> {
    let report = validate_pair(p, DEFAULT_R_CAP);
    if !report.valid || report.valid_r < 1 {
        return Err(Error::Param(format!("pair is not 1-multiplicative: {:?}", report.failures)));
    }
    let m = a_norm(f)?;
    if m == 0.0 {
        return Err(Error::Param("f must be nonzero".into()));
    }
    let nu = double_smooth(f, &p.ground)?
        .sub(&double_smooth(f, &p.perturb)?)?
        .linf_norm();
    let gain = dual_mass(f, &p.perturb)? - dual_mass(f, &p.ground)?;
    Ok(CollectionBound {
        nu,
        m,
        epsilon: report.epsilon,
        gain,
        bound: nu * nu / m - 4.0 * report.epsilon * m,
    })
}

/// `(sup_x ‖F − F(x)‖_{L∞(μ_{xS})}, sup_x ‖f − F‖_{L²(μ_{xS})})`.
pub fn local_sups(f: &GFunc, big_f: &GFunc, s: &GSubset) -> Result<(f64, f64)> {
    f.group().ensure_same(big_f.group())?;
    f.group().ensure_same(s.group())?;
    if s.is_empty() {
        return Err(Error::Param("S must be nonempty".into()));
    }
    let g = f.group();
    let members = s.members();
    let (mut linf, mut l2): (f64, f64) = (0.0, 0.0);
    for x in g.elements() {
        let fx = big_f.at(x);
        let mut sq = 0.0;
        for &b in &members {
            let y = g.mul(x, b);
            linf = linf.max((big_f.at(y) - fx).norm());
            sq += (f.at(y) - big_f.at(y)).norm_sqr();
        }
        l2 = l2.max((sq / members.len() as f64).sqrt());
    }
    Ok((linf, l2))
}

#[derive(Clone, Debug)]
pub struct ContinuityWitness {
    pub ground: GSubset,
    pub perturb: GSubset,
    pub linf_sup: f64,
    pub l2_sup: f64,
    pub from_subgroups: bool,
}

/// First `(B, B′)` with `B′ ⊆ B ⊆ A⁴`, `B′ ≠ {e}`, meeting both continuity
/// conditions at level `ν`.
///
/// Candidates are subgroup pairs and power pairs `(Aʲ, Aⁱ)`, `i ≤ j ≤ 4`,
/// tried by `|B′|` then `|B|` descending, subgroups first.
pub fn continuity_witness(f: &GFunc, a: &GSubset, nu: f64) -> Result<Option<ContinuityWitness>> {
    if a.is_empty() || !a.is_symmetric() {
        return Err(Error::Param("A must be nonempty and symmetric".into()));
    }
    let a4 = power_or_identity(a, 4);
    let mut cands: Vec<(GSubset, GSubset, bool)> = Vec::new();
    if let Ok(subs) = subgroups(f.group()) {
        let inside: Vec<GSubset> = subs.into_iter().filter(|h| h.is_subset(&a4)).collect();
        for b in &inside {
            for bp in &inside {
                if bp.len() > 1 && bp.is_subset(b) {
                    cands.push((b.clone(), bp.clone(), true));
                }
            }
        }
    }
    let powers: Vec<GSubset> = (0..=4).map(|k| power_or_identity(a, k)).collect();
    for j in 0..=4 {
        for i in 0..=j {
            let (b, bp) = (&powers[j], &powers[i]);
            if bp.len() > 1 && bp.is_subset(b) && !cands.iter().any(|(x, y, _)| x == b && y == bp) {
                cands.push((b.clone(), bp.clone(), false));
            }
        }
    }
    // Stable sort keeps subgroups ahead of power pairs on ties.
    cands.sort_by(|x, y| y.1.len().cmp(&x.1.len()).then(y.0.len().cmp(&x.0.len())));
    for (b, bp, from_subgroups) in cands {
        let big_f = double_smooth(f, &b)?;
        let (linf, l2) = local_sups(f, &big_f, &bp)?;
        if linf <= nu + SUP_TOL && l2 <= nu + SUP_TOL {
            return Ok(Some(ContinuityWitness {
                ground: b,
                perturb: bp,
                linf_sup: linf,
                l2_sup: l2,
                from_subgroups,
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct SmallDoubling {
    pub subset: GSubset,
    pub doubling: f64,
    pub exhaustive: bool,
}

/// `A′ ⊆ A` with `|A′| ≥ |A|/4` of least doubling found, preferring larger
/// sets on ties. Exhaustive up to [`EXHAUSTIVE_DOUBLING`] elements, greedy
/// deletion beyond.
pub fn dense_small_doubling_subset(a: &GSubset, energy_c: f64) -> Result<SmallDoubling> {
    const STAGE: &str = "dense_small_doubling_subset";
    if a.is_empty() {
        return Err(Error::Param("A must be nonempty".into()));
    }
    let e = energy_ratio(a)?;
    if e < energy_c {
        return Err(Error::audit(STAGE, format!("energy ratio {e} below {energy_c}")));
    }
    let members = a.members();
    let min_len = members.len().div_ceil(4);
    let better = |d: f64, len: usize, best: &Option<(f64, GSubset)>| match best {
        None => true,
        Some((bd, bs)) => d < bd - 1e-12 || ((d - bd).abs() <= 1e-12 && len > bs.len()),
    };
    let mut best: Option<(f64, GSubset)> = None;
    let exhaustive = members.len() <= EXHAUSTIVE_DOUBLING;
    if exhaustive {
        for mask in 1u32..(1u32 << members.len()) {
            if (mask.count_ones() as usize) < min_len {
                continue;
            }
            let s = GSubset::from_elements(
                a.group(),
                members.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &m)| m),
            )?;
            let d = doubling(&s)?;
            if better(d, s.len(), &best) {
                best = Some((d, s));
            }
        }
    } else {
        let mut cur = a.clone();
        best = Some((doubling(&cur)?, cur.clone()));
        while cur.len() > min_len {
            let mut step: Option<(f64, GSubset)> = None;
            for x in cur.members() {
                let mut s = cur.clone();
                s.remove(x);
                let d = doubling(&s)?;
                if step.as_ref().is_none_or(|(sd, _)| d < sd - 1e-12) {
                    step = Some((d, s));
                }
            }
            let (d, s) = step.expect("cur has removable elements");
            if better(d, s.len(), &best) {
                best = Some((d, s.clone()));
            }
            cur = s;
        }
    }
    let (doubling, subset) = best.expect("A itself is a candidate");
    Ok(SmallDoubling {
        subset,
        doubling,
        exhaustive,
    })
}

#[derive(Clone, Debug)]
pub struct SpreadReport {
    pub subgroup: GSubset,
    pub linf_sup: f64,
    pub l2_sup: f64,
    /// Integer deviation of `f∗μ_H`.
    pub deviation: f64,
    pub proj_sup: f64,
    pub g_sup: f64,
    /// `f∗μ_H` is `5ε`-almost integer-valued.
    pub almost_integer: bool,
    /// `‖f∗μ_H‖_∞ > ‖g‖_∞ − 3ε`.
    pub sup_bound: bool,
}

/// Checks the hypotheses of the spreading lemma for integer `f`, real `g`
/// and symmetric `B`, then measures both conclusions with `H = ⟨B⟩`.
pub fn spread_check(f: &GFunc, g: &GFunc, b: &GSubset, eps: f64) -> Result<SpreadReport> {
    const STAGE: &str = "spread";
    if !(0.0..0.1).contains(&eps) {
        return Err(Error::Param(format!("ε must lie in [0, 1/10), got {eps}")));
    }
    if !f.is_integer_valued() {
        return Err(Error::Param("f must be integer-valued".into()));
    }
    if b.is_empty() || !b.is_symmetric() {
        return Err(Error::Param("B must be nonempty and symmetric".into()));
    }
    let (linf, l2) = local_sups(f, g, b)?;
    let mut trace = Trace::default();
    trace.require_le(STAGE, "sup_x ‖g − g(x)‖_{L∞(μ_{xB})} ≤ ε", linf, eps)?;
    trace.require_le(STAGE, "sup_x ‖f − g‖_{L²(μ_{xB})} ≤ ε", l2, eps)?;
    let h = generated_subgroup(b);
    let proj = coset_projection(f, &h)?;
    let deviation = proj.integer_deviation();
    let proj_sup = proj.linf_norm();
    let g_sup = g.linf_norm();
    Ok(SpreadReport {
        subgroup: h,
        linf_sup: linf,
        l2_sup: l2,
        deviation,
        proj_sup,
        g_sup,
        almost_integer: deviation < 5.0 * eps || deviation <= 1e-9,
        sup_bound: proj_sup > g_sup - 3.0 * eps - 1e-12,
    })
}
