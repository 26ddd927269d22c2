use serde::Serialize;

use super::{sym_witness_search, SearchConfig, Trace};
use crate::group_core::GSubset;
use crate::mult_pairs::{validate_pair, MultiplicativePair, PairReport, StepTable, Width, DEFAULT_R_CAP};
use crate::set_structures::{power_or_identity, product_set};
use crate::{Error, Result};

/// Largest supported number of scales.
pub const MAX_SCALES: usize = 4;

#[derive(Clone, Debug, Serialize)]
pub struct SystemPair {
    pub i: usize,
    pub j: usize,
    #[serde(skip)]
    pub pair: MultiplicativePair,
    pub report: PairReport,
    /// The chosen exponent `l_j` in the sandwich around `B_{i,j−1}`.
    pub l: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairSystem {
    /// `B_0 ⊇ B_1 ⊇ … ⊇ B_J`.
    #[serde(skip)]
    pub sets: Vec<GSubset>,
    #[serde(skip)]
    pub d_sets: Vec<GSubset>,
    pub sizes: Vec<usize>,
    /// `c_i = μ(D_i⁴)/μ(D_0¹²)`.
    pub c: Vec<f64>,
    /// `K_i = μ(D_i¹²)/μ(D_i)`.
    pub big_k: Vec<f64>,
    /// `k_i` for `i ≥ 1`; `k[0]` is unused and zero.
    pub k: Vec<usize>,
    pub pairs: Vec<SystemPair>,
    pub trace: Trace,
}

/// Powers `S⁰, S¹, …` computed on demand; constant once they stabilize.
struct Powers {
    base: GSubset,
    list: Vec<GSubset>,
}

impl Powers {
    fn new(base: &GSubset) -> Self {
        Powers {
            base: base.clone(),
            list: vec![GSubset::identity_set(base.group())],
        }
    }

    fn get(&mut self, k: usize) -> GSubset {
        while self.list.len() <= k {
            let last = self.list.last().unwrap();
            let next = product_set(last, &self.base);
            if next == *last {
                return next;
            }
            self.list.push(next);
        }
        self.list[k].clone()
    }
}

fn sandwich(p: &mut Powers, l: usize, core: &GSubset) -> GSubset {
    let s = p.get(l);
    product_set(&product_set(&s, core), &s)
}

/// Nested `B_0 ⊇ … ⊇ B_J` with every `(B_i, B_j)`, `i < j`, an
/// `ε(c_{j−1})`-closed, `c_j`-thick, `r(c_{j−1})`-multiplicative pair.
///
/// The sets `D_i` come from witness searches at thresholds `12/13` and
/// `1 − 1/12(k_i+1)`; each exponent `l_i ∈ [r, k_i − r − 1]` is chosen to
/// minimize `μ(B⁺)/μ(B⁻)` (lowest `l` on ties) and the closure is then
/// audited rather than assumed.
pub fn pair_system(
    a: &GSubset,
    r_fn: &StepTable<usize>,
    eps_fn: &StepTable<f64>,
    levels: usize,
    cfg: &SearchConfig,
) -> Result<PairSystem> {
    const STAGE: &str = "pair_system";
    if levels == 0 {
        return Err(Error::Param("J must be at least 1".into()));
    }
    if levels > MAX_SCALES {
        return Err(Error::Limit {
            what: "scales J",
            got: levels,
            limit: MAX_SCALES,
        });
    }
    if a.is_empty() || !a.is_symmetric() {
        return Err(Error::Param("A must be nonempty and symmetric".into()));
    }
    let mut trace = Trace::default();
    let a4 = power_or_identity(a, 4);

    let w = sym_witness_search(a, 1.0 / 13.0, cfg)?;
    let mut d = vec![w.sym];
    trace.require(STAGE, "D_0 ⊆ A⁴", d[0].is_subset(&a4))?;
    let mut dp: Vec<Powers> = vec![Powers::new(&d[0])];
    let d0_12 = dp[0].get(12).len() as f64;
    let mut c = vec![dp[0].get(4).len() as f64 / d0_12];
    let mut big_k = vec![d0_12 / d[0].len() as f64];
    let mut k = vec![0usize];
    for i in 0..levels {
        let ri = r_fn.eval(c[i]);
        let ei = eps_fn.eval(c[i]);
        if ri == 0 || !(ei > 0.0) {
            return Err(Error::Param(format!("r(c) ≥ 1 and ε(c) > 0 required at c = {}", c[i])));
        }
        let ki = ((1.0 + big_k[i].ln()) / ei).ceil() as usize * (2 * ri + 1);
        k.push(ki);
        let thr = 1.0 / (12.0 * (ki + 1) as f64);
        let wi = sym_witness_search(&d[i], thr, cfg)?;
        let next = wi.sym;
        let mut pw = Powers::new(&next);
        let di4 = dp[i].get(4);
        trace.require(
            STAGE,
            format!("D_{}^{{12(k+1)}} ⊆ D_{i}⁴ (k = {ki})", i + 1),
            pw.get(12 * (ki + 1)).is_subset(&di4),
        )?;
        c.push(pw.get(4).len() as f64 / d0_12);
        big_k.push(pw.get(12).len() as f64 / next.len() as f64);
        d.push(next);
        dp.push(pw);
    }

    let mut b: Vec<Option<GSubset>> = vec![None; levels + 1];
    b[levels] = Some(dp[levels].get(4));
    let mut pairs = Vec::new();
    for jm1 in (0..levels).rev() {
        let mut core = dp[jm1].get(4);
        let mut pending = Vec::new();
        for i in jm1 + 1..=levels {
            let rr = r_fn.eval(c[i - 1]);
            let bi = b[i].clone().expect("built on an earlier pass");
            let mut pw = Powers::new(&bi);
            let lo = rr;
            let hi = k[i].checked_sub(rr + 1).filter(|&h| h >= lo).ok_or_else(|| {
                Error::audit(STAGE, format!("empty exponent range [{lo}, k_{i} − r − 1] with k_{i} = {}", k[i]))
            })?;
            let mut best: Option<(usize, f64, GSubset, GSubset)> = None;
            for l in lo..=hi {
                let plus = sandwich(&mut pw, l + rr + 1, &core);
                let minus = sandwich(&mut pw, l - rr, &core);
                let ratio = plus.len() as f64 / minus.len() as f64;
                if best.as_ref().map_or(true, |b| ratio < b.1) {
                    best = Some((l, ratio, plus, minus));
                }
            }
            let (l, ratio, upper, lower) = best.expect("range is nonempty");
            trace.record(STAGE, format!("μ(B⁺_{{{jm1},{i}}})/μ(B⁻_{{{jm1},{i}}}) at l = {l}"), ratio);
            core = sandwich(&mut pw, l, &core);
            pending.push((i, l, rr, upper, lower));
        }
        let bj = core;
        trace.require(STAGE, format!("D_{jm1}⁴ ⊆ B_{jm1}"), dp[jm1].get(4).is_subset(&bj))?;
        trace.require(STAGE, format!("B_{jm1} ⊆ D_{jm1}¹²"), bj.is_subset(&dp[jm1].get(12)))?;
        for (i, l, rr, upper, lower) in pending {
            let bi = b[i].clone().expect("built on an earlier pass");
            let pair = MultiplicativePair::new(bj.clone(), bi, upper, lower, Width::Finite(rr))?;
            let report = validate_pair(&pair, DEFAULT_R_CAP.max(rr));
            trace.require(STAGE, format!("(B_{jm1}, B_{i}) is {rr}-multiplicative: {:?}", report.failures), report.valid)?;
            trace.require_le(STAGE, format!("closure of (B_{jm1}, B_{i}) ≤ ε(c_{})", i - 1), report.epsilon, eps_fn.eval(c[i - 1]))?;
            trace.require_le(STAGE, format!("c_{i} ≤ thickness of (B_{jm1}, B_{i})"), c[i], report.thickness)?;
            pairs.push(SystemPair {
                i: jm1,
                j: i,
                pair,
                report,
                l,
            });
        }
        b[jm1] = Some(bj);
    }
    let sets: Vec<GSubset> = b.into_iter().map(|s| s.expect("all levels built")).collect();
    trace.require(STAGE, "B_0 ⊆ A⁴", sets[0].is_subset(&a4))?;
    for w in sets.windows(2) {
        trace.require(STAGE, "nested", w[1].is_subset(&w[0]))?;
    }
    for s in &sets {
        trace.require(STAGE, "symmetric neighbourhood", s.is_symmetric_neighbourhood())?;
    }
    pairs.sort_by_key(|p| (p.i, p.j));
    Ok(PairSystem {
        sizes: sets.iter().map(GSubset::len).collect(),
        sets,
        d_sets: d,
        c,
        big_k,
        k,
        pairs,
        trace,
    })
}
