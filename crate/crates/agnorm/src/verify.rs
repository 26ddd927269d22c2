//! Named verification suites, run by `agnorm verify`.
//!
//! Each suite draws its random instances from a seeded ChaCha stream, so a
//! `(suite, group, seed)` triple always produces the same report.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::decomposer::{idempotent_decompose, small_norm_coset_test, CosetTerm, DEFAULT_MAX_STEPS, DROP_TOL, NORM_DROP, SMALL_NORM_THRESHOLD};
use crate::freiman::{doubling_to_tripling, fournier_subgroup, freiman_correlation, weak_freiman, SearchConfig, Trace};
use crate::group_core::{as_right_coset, left_cosets, right_cosets, subgroups, GFunc, GSubset, Group};
use crate::linalg::{haar_unitary, op_norm, unitarity_defect, CMatrix};
use crate::mult_pairs::{
    approx_haar_defect, evalbd, genl8bd, hdy, locbes, nearest_unitary, pair_conjugate, pair_from_coset_union, pair_from_growth,
    pair_from_product_set, pair_from_subgroup, pair_tight, pbd, validate_pair, LocalOp, MultiplicativePair, DEFAULT_R_CAP,
};
use crate::set_structures::{approx_projection_integral, energy_ratio, kneser_subgroup, product_set, symmetry_set};
use crate::spectral::{a_norm, adjoint, convolve, coset_projection, hs_inner, pm_norm, recover_from_operator, singular_values, ConvOp};
use crate::{build_group, Complex64, Error, Result};

pub const SUITES: &[&str] = &[
    "decompmass",
    "cosetnorm",
    "spectral",
    "symsets",
    "small",
    "pairs",
    "local",
    "unitary",
    "inversion",
    "decompose",
    "freiman",
    "lowerbound",
    "abelian",
];

/// Subsets are enumerated exhaustively up to this group order.
pub const EXHAUSTIVE_ORDER: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub trials: usize,
    /// Largest `lhs − rhs` seen, for inequality checks.
    pub worst: Option<f64>,
    pub tolerance: Option<f64>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub group: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Running maximum of `lhs − rhs` over trials.
struct Tally {
    name: String,
    tol: f64,
    trials: usize,
    worst: f64,
}

impl Tally {
    fn new(name: &str, tol: f64) -> Self {
        Tally {
            name: name.into(),
            tol,
            trials: 0,
            worst: f64::NEG_INFINITY,
        }
    }

    fn le(&mut self, lhs: f64, rhs: f64) {
        self.trials += 1;
        let d = if lhs.is_nan() || rhs.is_nan() { f64::INFINITY } else { lhs - rhs };
        self.worst = self.worst.max(d);
    }

    fn eq(&mut self, a: f64, b: f64) {
        self.le((a - b).abs(), 0.0);
    }

    fn finish(self) -> Check {
        Check {
            passed: self.worst <= self.tol,
            worst: (self.trials > 0).then_some(self.worst),
            tolerance: Some(self.tol),
            trials: self.trials,
            name: self.name,
            note: None,
        }
    }
}

/// Counts exact (boolean) outcomes.
struct Count {
    name: String,
    trials: usize,
    failures: usize,
    first_failure: Option<String>,
}

impl Count {
    fn new(name: &str) -> Self {
        Count {
            name: name.into(),
            trials: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    fn finish(self) -> Check {
        Check {
            passed: self.failures == 0,
            worst: None,
            tolerance: None,
            trials: self.trials,
            name: self.name,
            note: self.first_failure.map(|w| format!("{} failures; first: {w}", self.failures)),
        }
    }
}

fn info(name: &str, value: f64, note: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        trials: 1,
        worst: Some(value),
        tolerance: None,
        passed: true,
        note: Some(note.into()),
    }
}

pub fn random_function(g: &Group, rng: &mut impl Rng) -> GFunc {
    GFunc::from_fn(g, |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_subset(g: &Group, p: f64, rng: &mut impl Rng) -> GSubset {
    loop {
        let s = GSubset::from_fn(g, |_| rng.random_bool(p));
        if !s.is_empty() {
            return s;
        }
    }
}

fn symmetrize(s: &GSubset) -> GSubset {
    s.union(&s.inverse()).union(&GSubset::identity_set(s.group()))
}

/// All nonempty subsets when `n ≤ EXHAUSTIVE_ORDER`, else `samples` random ones.
fn subset_family(g: &Group, samples: usize, rng: &mut impl Rng) -> Vec<GSubset> {
    let n = g.order();
    if n <= EXHAUSTIVE_ORDER {
        (1u32..(1 << n)).map(|m| GSubset::from_fn(g, |x| m >> x & 1 == 1)).collect()
    } else {
        (0..samples).map(|_| random_subset(g, rng.random_range(0.1..0.9), rng)).collect()
    }
}

/// Runs one named suite. Unknown names are a `Param` error.
pub fn run_suite(name: &str, g: &Group, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = match name {
        "decompmass" => decompmass(g, &mut rng)?,
        "cosetnorm" => cosetnorm(g)?,
        "spectral" => spectral(g, &mut rng)?,
        "symsets" => symsets(g, &mut rng)?,
        "small" => small(g, &mut rng)?,
        "pairs" => pairs(g, &mut rng)?,
        "local" => local(g, &mut rng)?,
        "unitary" => unitary(&mut rng)?,
        "inversion" => inversion(g, &mut rng)?,
        "decompose" => decompose(g, &mut rng)?,
        "freiman" => freiman(g)?,
        "lowerbound" => lowerbound()?,
        "abelian" => abelian(g, &mut rng)?,
        other => {
            return Err(Error::Param(format!("unknown suite `{other}`; valid suites: {}", SUITES.join(", "))));
        }
    };
    Ok(SuiteReport {
        suite: name.into(),
        group: g.name().to_string(),
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn decompmass(g: &Group, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let subs = subgroups(g)?;
    let mut add = Tally::new("additivity over normal subgroups", 1e-8);
    let mut sub = Tally::new("subadditivity over all subgroups", 1e-8);
    let mut contr = Tally::new("‖f∗μ_H‖_A ≤ ‖f‖_A", 1e-8);
    let mut gap: f64 = 0.0;
    for _ in 0..20 {
        let f = random_function(g, rng);
        let a = a_norm(&f)?;
        for h in &subs {
            let p = coset_projection(&f, h)?;
            let (ap, ar) = (a_norm(&p)?, a_norm(&f.sub(&p)?)?);
            if h.is_normal() {
                add.eq(a, ap + ar);
            } else {
                gap = gap.max(ap + ar - a);
            }
            sub.le(a, ap + ar);
            contr.le(ap, a);
        }
    }
    Ok(vec![
        add.finish(),
        sub.finish(),
        contr.finish(),
        info("largest additivity gap over non-normal subgroups", gap, "additivity is not asserted for non-normal H"),
    ])
}

fn cosetnorm(g: &Group) -> Result<Vec<Check>> {
    let mut t = Tally::new("‖1_{xH}‖_A = 1 for left and right cosets", 1e-9);
    for h in subgroups(g)? {
        for (_, c) in left_cosets(&h)?.into_iter().chain(right_cosets(&h)?) {
            t.eq(a_norm(&GFunc::indicator(&c))?, 1.0);
        }
    }
    Ok(vec![t.finish()])
}

/// The spectral-module inequalities on `trials` random instances.
pub fn spectral_checks(g: &Group, rng: &mut impl Rng, trials: usize) -> Result<Vec<Check>> {
    let mut parseval = Tally::new("Parseval ⟨L_f, L_g⟩_HS = ⟨f, g⟩", 1e-10);
    let mut hy = Tally::new("s_1(f) ≤ ‖f‖_L¹", 1e-10);
    let mut inv = Tally::new("‖f̃‖_A = ‖ρ_y f‖_A = ‖f‖_A", 1e-9);
    let mut dom = Tally::new("‖f‖_∞ ≤ ‖f‖_A", 1e-9);
    let mut alg = Tally::new("‖fg‖_A ≤ ‖f‖_A‖g‖_A", 1e-8);
    let mut prod = Tally::new("‖f∗g‖_A ≤ ‖f‖_A‖g‖_PM", 1e-8);
    let mut pmc = Tally::new("‖δ_e − μ̃_A∗μ_A‖_PM ≤ 1", 1e-9);
    let mut convag = Tally::new("‖1̃_A∗μ_A‖_A = 1", 1e-9);
    let n = g.order();
    for _ in 0..trials {
        let f = random_function(g, rng);
        let h = random_function(g, rng);
        let (af, ah) = (a_norm(&f)?, a_norm(&h)?);
        parseval.le((hs_inner(&ConvOp::new(&f), &ConvOp::new(&h)) - f.inner(&h)?).norm(), 0.0);
        hy.le(pm_norm(&f)?, f.l1_norm());
        let y = rng.random_range(0..n);
        inv.eq(a_norm(&adjoint(&f))?, af);
        inv.eq(a_norm(&f.right_translate(y))?, af);
        dom.le(f.linf_norm(), af);
        alg.le(a_norm(&f.mul(&h)?)?, af * ah);
        prod.le(a_norm(&convolve(&f, &h)?)?, af * pm_norm(&h)?);
        let a = random_subset(g, rng.random_range(0.05..0.9), rng);
        let mu = GFunc::uniform_density(&a)?;
        let sq = convolve(&adjoint(&mu), &mu)?;
        pmc.le(pm_norm(&GFunc::dirac(g, g.identity()).sub(&sq)?)?, 1.0);
        convag.eq(a_norm(&convolve(&adjoint(&GFunc::indicator(&a)), &mu)?)?, 1.0);
    }
    Ok(vec![
        parseval.finish(),
        hy.finish(),
        inv.finish(),
        dom.finish(),
        alg.finish(),
        prod.finish(),
        pmc.finish(),
        convag.finish(),
    ])
}

fn spectral(g: &Group, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    spectral_checks(g, rng, 50)
}

/// Symmetry-set laws on `sets` over the grid `k/12`.
pub fn symset_checks(sets: &[GSubset]) -> Result<Vec<Check>> {
    let grid: Vec<f64> = (1..=12).map(|k| k as f64 / 12.0).collect();
    let mut shape = Count::new("Sym_η(A) symmetric, ∋ e, ⊆ AA⁻¹");
    let mut nest = Count::new("nesting in η");
    let mut submult = Count::new("Sym_δ·Sym_{1−ε} ⊆ Sym_{δ−ε}");
    let mut upper = Tally::new("μ(Sym_δ) ≤ min(μ(AA⁻¹), μ(A)/δ)", 1e-12);
    let mut lower = Tally::new("(c − δ)μ(A) ≤ μ(Sym_δ)", 1e-12);
    let mut proj = Tally::new("∫|1 − μ∗1_A| dμ_A ≤ ε on Sym_{1−ε}", 1e-10);
    let mut kneser = Count::new("|K²| < 1.5|K| ⇒ K² subgroup");
    for a in sets {
        let aa = product_set(a, &a.inverse());
        let syms: Vec<GSubset> = grid.iter().map(|&e| symmetry_set(a, e)).collect::<Result<_>>()?;
        let c = energy_ratio(a)?;
        for (i, s) in syms.iter().enumerate() {
            shape.check(s.is_symmetric() && s.contains_identity() && s.is_subset(&aa), || format!("{:?} at {}", a.members(), grid[i]));
            if i > 0 {
                nest.check(s.is_subset(&syms[i - 1]), || format!("{:?} at {}", a.members(), grid[i]));
            }
            upper.le(s.measure(), aa.measure().min(a.measure() / grid[i]));
            lower.le((c - grid[i]) * a.measure(), s.measure());
        }
        for (di, &d) in grid.iter().enumerate() {
            for (ei, &e) in grid.iter().enumerate() {
                if e >= d || e >= 1.0 {
                    continue;
                }
                let lhs = product_set(&syms[di], &syms[11 - ei - 1]);
                let target = symmetry_set(a, d - e)?;
                submult.check(lhs.is_subset(&target), || format!("{:?} δ={d} ε={e}", a.members()));
            }
        }
        for (ei, &e) in grid[..11].iter().enumerate() {
            let s = &syms[11 - ei - 1];
            proj.le(approx_projection_integral(a, &GFunc::uniform_density(s)?)?, e);
        }
        let k = symmetrize(a);
        let k2 = product_set(&k, &k);
        if 2 * k2.len() < 3 * k.len() {
            kneser.check(k2.is_subgroup() && kneser_subgroup(&k)?.is_some(), || format!("{:?}", k.members()));
        }
    }
    Ok(vec![
        shape.finish(),
        nest.finish(),
        submult.finish(),
        upper.finish(),
        lower.finish(),
        proj.finish(),
        kneser.finish(),
    ])
}

fn symsets(g: &Group, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    symset_checks(&subset_family(g, 60, rng))
}

/// Small-norm dichotomy over `sets`; also reports the least non-coset norm.
pub fn small_norm_checks(sets: &[GSubset]) -> Result<Vec<Check>> {
    let mut dich = Count::new("‖1_A‖_A < 1 + 1/750 ⟺ A is a coset");
    let mut least = f64::INFINITY;
    for a in sets {
        let norm = a_norm(&GFunc::indicator(a))?;
        let coset = as_right_coset(a).is_some();
        dich.check((norm < SMALL_NORM_THRESHOLD) == coset, || format!("{:?}: norm {norm}", a.members()));
        if !coset {
            least = least.min(norm);
        }
        if let Some((h, x)) = small_norm_coset_test(a)? {
            dich.check(h.right_translate(x) == *a, || format!("{:?}: returned coset differs", a.members()));
        }
    }
    Ok(vec![dich.finish(), info("least non-coset norm", least, "threshold is 1 + 1/750")])
}

fn small(g: &Group, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut sets = subset_family(g, 100, rng);
    if g.order() > EXHAUSTIVE_ORDER {
        for h in subgroups(g)? {
            sets.extend(left_cosets(&h)?.into_iter().map(|(_, c)| c));
        }
    }
    small_norm_checks(&sets)
}

fn random_density_on(s: &GSubset, rng: &mut impl Rng) -> Result<GFunc> {
    let w = GFunc::from_fn(s.group(), |x| Complex64::new(if s.contains(x) { rng.random_range(0.0..1.0) } else { 0.0 }, 0.0));
    let mass = w.mean().re;
    if mass <= 0.0 {
        return GFunc::uniform_density(s);
    }
    Ok(w.scale(Complex64::new(1.0 / mass, 0.0)))
}

/// Sample pairs from every constructor.
pub fn sample_pairs(g: &Group, rng: &mut impl Rng) -> Result<Vec<MultiplicativePair>> {
    let mut out = Vec::new();
    let subs = subgroups(g)?;
    for h in &subs {
        out.push(pair_from_subgroup(h)?);
    }
    for h in subs.iter().filter(|h| h.is_normal()) {
        let a = symmetrize(&random_subset(g, 0.2, rng));
        if let Ok(p) = pair_from_coset_union(&a, h) {
            out.push(p);
        }
    }
    for r in 1..=2 {
        let a = symmetrize(&random_subset(g, 0.1, rng));
        out.push(pair_from_product_set(&a, r)?);
        out.push(pair_from_growth(&a, r, 0.5)?.0);
    }
    let y = rng.random_range(0..g.order());
    let last = out.last().expect("nonempty").clone();
    out.push(pair_conjugate(&last, y));
    let b = symmetrize(&random_subset(g, 0.6, rng));
    let mut bp = symmetrize(&GSubset::from_fn(g, |x| b.contains(x) && rng.random_bool(0.3)));
    // Shrink B′ symmetrically until B′² ⊆ B; {e} always qualifies.
    loop {
        match pair_tight(&b, &bp, 1) {
            Ok(p) => {
                out.push(p);
                break;
            }
            Err(Error::Param(_)) => {
                let drop: Vec<usize> = bp.iter().filter(|&x| x != g.identity()).collect();
                let x = drop[rng.random_range(0..drop.len())];
                bp.remove(x);
                bp.remove(g.inv(x));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn pairs(g: &Group, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut valid = Count::new("constructor output passes validate_pair");
    let mut haar = Tally::new("approx_haar_defect ≤ ε", 1e-10);
    for p in sample_pairs(g, rng)? {
        let r = validate_pair(&p, DEFAULT_R_CAP);
        valid.check(r.valid, || format!("{:?}", r.failures));
        if r.valid {
            for _ in 0..3 {
                let mu = random_density_on(&p.perturb_power(), rng)?;
                haar.le(approx_haar_defect(&p, &mu)?, r.epsilon);
            }
        }
    }
    Ok(vec![valid.finish(), haar.finish()])
}

fn random_on(s: &GSubset, rng: &mut impl Rng) -> GFunc {
    GFunc::from_fn(s.group(), |x| {
        if s.contains(x) {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Local Fourier checks on `trials` random neighbourhood pairs.
pub fn local_checks(g: &Group, rng: &mut impl Rng, trials: usize) -> Result<Vec<Check>> {
    let full = GSubset::full(g);
    let mut global = Tally::new("(G,G,G,G) reproduces global singular values", 1e-10);
    for _ in 0..3 {
        let f = random_function(g, rng);
        let op = LocalOp::new(&full, &full, &f)?;
        let loc = op.singular_values()?.to_vec();
        let glob = singular_values(&f)?;
        for (a, b) in loc.iter().zip(&glob) {
            global.eq(*a, *b);
        }
    }
    let mut hd = Tally::new("local Hausdorff–Young", 1e-8);
    let mut bes = Tally::new("local Bessel", 1e-8);
    let mut pb = Tally::new("Parseval dimension bound", 1e-8);
    let mut ev = Tally::new("eigenvector L∞ bound", 1e-8);
    let mut gl = Tally::new("spectrum L∞ bound", 1e-8);
    for _ in 0..trials {
        let b = symmetrize(&random_subset(g, rng.random_range(0.3..0.9), rng));
        let bp = symmetrize(&GSubset::from_fn(g, |x| b.contains(x) && rng.random_bool(0.5)));
        let f = random_on(&bp, rng);
        let op = LocalOp::new(&b, &bp, &f)?;
        let h = hdy(&op)?;
        hd.le(h.lhs, h.rhs);
        let l = locbes(&op);
        bes.le(l.lhs, l.rhs);
        for delta in [0.1, 0.3, 0.7, 1.0] {
            let p = pbd(&op, delta)?;
            pb.le(p.lhs, p.rhs);
            let q = genl8bd(&op, delta)?;
            gl.le(q.lhs, q.rhs);
        }
        for e in evalbd(&op)? {
            ev.le(e.lhs, e.rhs);
        }
    }
    Ok(vec![global.finish(), hd.finish(), bes.finish(), pb.finish(), ev.finish(), gl.finish()])
}

fn local(g: &Group, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    local_checks(g, rng, 20)
}

/// `U₁ diag(s) U₂` with Haar `U_i` and `s_i ∈ [lo, hi]`.
pub fn random_near_unitary(d: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> (CMatrix, f64) {
    let u1 = haar_unitary(d, rng);
    let u2 = haar_unitary(d, rng);
    let s: Vec<f64> = (0..d).map(|_| rng.random_range(lo..=hi)).collect();
    let dev = s.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
    let diag = DMatrix::from_fn(d, d, |i, j| if i == j { Complex64::new(s[i], 0.0) } else { Complex64::new(0.0, 0.0) });
    (u1 * diag * u2, dev)
}

fn unitary(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut unit = Tally::new("U is unitary", 1e-10);
    let mut dist = Tally::new("‖M − U‖ ≤ max|s_i − 1|", 1e-9);
    for _ in 0..100 {
        let d = rng.random_range(1..=6);
        let (m, dev) = random_near_unitary(d, 0.8, 1.2, rng);
        let nu = nearest_unitary(&m)?;
        unit.le(unitarity_defect(&nu.u), 0.0);
        dist.le(op_norm(&(&m - &nu.u))?, dev);
    }
    Ok(vec![unit.finish(), dist.finish()])
}

fn inversion(g: &Group, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut round = Tally::new("recover_from_operator(L_f) = f", 1e-10);
    let mut reject = Count::new("non-commuting operator rejected");
    for _ in 0..20 {
        let f = random_function(g, rng);
        let back = recover_from_operator(g, ConvOp::new(&f).matrix())?;
        round.le(back.max_abs_diff(&f), 0.0);
    }
    if g.order() > 1 {
        for _ in 0..5 {
            let n = g.order();
            let m = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            reject.check(matches!(recover_from_operator(g, &m), Err(Error::NotConvolution { .. })), || "accepted".into());
        }
    }
    Ok(vec![round.finish(), reject.finish()])
}

/// `Σ z_i 1_{x_i H_i}` with up to three random coset terms, `z_i ∈ [−2, 2]`.
pub fn random_coset_combination(g: &Group, subs: &[GSubset], rng: &mut impl Rng) -> Result<GFunc> {
    let k = rng.random_range(1..=3);
    let terms: Vec<CosetTerm> = (0..k)
        .map(|_| {
            let h = subs[rng.random_range(0..subs.len())].clone();
            let x = rng.random_range(0..g.order());
            let rep = h.left_translate(x).first().expect("nonempty");
            CosetTerm {
                z: rng.random_range(-2..=2),
                subgroup: h,
                rep,
            }
        })
        .collect();
    let mut v = vec![0i64; g.order()];
    for t in &terms {
        for x in t.coset().iter() {
            v[x] += t.z;
        }
    }
    GFunc::from_integers(g, &v)
}

fn decompose(g: &Group, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let subs = subgroups(g)?;
    let mut exact = Count::new("coset combination reconstructed exactly");
    let mut drop = Tally::new("per-step norm drop ≥ 1/2 − 10⁻⁶", 0.0);
    for _ in 0..20 {
        let f = random_coset_combination(g, &subs, rng)?;
        let out = idempotent_decompose(&f, DEFAULT_MAX_STEPS)?;
        exact.check(out.complete && out.decomposition.is_exact(), || format!("{:?}: {:?}", f.rounded(), out.failure));
        for s in &out.steps {
            drop.le(NORM_DROP - DROP_TOL, s.norm_before - s.norm_after);
        }
    }
    Ok(vec![exact.finish(), drop.finish()])
}

fn trace_ok(t: &Trace) -> bool {
    t.entries.iter().all(|e| e.passed)
}

fn freiman(g: &Group) -> Result<Vec<Check>> {
    let cfg = SearchConfig::default();
    let mut fourn = Count::new("fournier_subgroup on subgroups and cosets");
    let mut d2t = Count::new("doubling_to_tripling on subgroups and cosets");
    let mut weak = Count::new("weak_freiman on subgroups, B ⊆ A⁴");
    let mut corr = Count::new("freiman_correlation on subgroups, sup > 0");
    let subs = subgroups(g)?;
    for h in subs.iter().take(12) {
        let mut sets = vec![h.clone()];
        if let Some((_, c)) = left_cosets(h)?.into_iter().nth(1) {
            sets.push(c);
        }
        for a in &sets {
            let r = fournier_subgroup(a, 1.0 / 15.0);
            fourn.check(r.as_ref().is_ok_and(|r| trace_ok(&r.trace)), || format!("{:?}: {:?}", a.members(), r.err()));
            let t = doubling_to_tripling(a, &cfg);
            d2t.check(t.as_ref().is_ok_and(|t| trace_ok(&t.trace)), || format!("{:?}: {:?}", a.members(), t.err()));
        }
        let w = weak_freiman(h, 1, 0.5, &cfg);
        weak.check(
            w.as_ref()
                .is_ok_and(|w| trace_ok(&w.trace) && w.pair.ground.is_subset(&crate::set_structures::power_or_identity(h, 4))),
            || format!("{:?}: {:?}", h.members(), w.err()),
        );
        let c = freiman_correlation(h, 1, 0.5, &cfg);
        corr.check(c.as_ref().is_ok_and(|c| trace_ok(&c.trace) && c.sup > 0.0), || format!("{:?}: {:?}", h.members(), c.err()));
    }
    Ok(vec![fourn.finish(), d2t.finish(), weak.finish(), corr.finish()])
}

/// `(k, ‖1_{0..k}‖_A, Σ|1̂|)` in `cyclic:257` for `k ∈ {4, 8, 16, 32, 64}`.
pub fn progression_norms() -> Result<Vec<(usize, f64, f64)>> {
    let g = build_group("cyclic:257")?;
    let n = g.order();
    [4usize, 8, 16, 32, 64]
        .iter()
        .map(|&k| {
            let a = GSubset::from_fn(&g, |x| x < k);
            let norm = a_norm(&GFunc::indicator(&a))?;
            let oracle: f64 = (0..n)
                .map(|j| {
                    (0..k)
                        .map(|x| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * x % n) as f64 / n as f64))
                        .sum::<Complex64>()
                        .norm()
                        / n as f64
                })
                .sum();
            Ok((k, norm, oracle))
        })
        .collect()
}

fn lowerbound() -> Result<Vec<Check>> {
    let rows = progression_norms()?;
    let mut inc = Count::new("‖1_{0..k}‖_A strictly increasing in k (cyclic:257)");
    let mut oracle = Tally::new("matches the ℓ¹ DFT oracle", 1e-8);
    for w in rows.windows(2) {
        inc.check(w[1].1 > w[0].1, || format!("k = {} to {}", w[0].0, w[1].0));
    }
    let mut checks = Vec::new();
    for &(k, norm, o) in &rows {
        oracle.le((norm - o).abs() / o, 0.0);
        checks.push(info(&format!("norm at k = {k}"), norm, "recorded"));
    }
    checks.insert(0, oracle.finish());
    checks.insert(0, inc.finish());
    Ok(checks)
}

/// All characters of an abelian group, by extending roots of unity along a
/// greedy generating sequence.
pub fn characters(g: &Group) -> Result<Vec<Vec<Complex64>>> {
    if !g.is_abelian() {
        return Err(Error::Param(format!("{} is not abelian", g.name())));
    }
    let e = g.identity();
    let exp = g.elements().map(|x| g.element_order(x)).fold(1, lcm);
    let mut gens = Vec::new();
    let mut span = GSubset::identity_set(g);
    for x in g.elements() {
        if !span.contains(x) {
            gens.push(x);
            span = crate::group_core::generated_subgroup(&span.union(&GSubset::singleton(g, x)));
        }
    }
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    let total = exp.pow(gens.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut val: Vec<Option<Complex64>> = vec![None; g.order()];
        val[e] = Some(Complex64::new(1.0, 0.0));
        let mut ok = true;
        let mut frontier = vec![e];
        let roots: Vec<Complex64> = gens
            .iter()
            .map(|_| {
                let k = c % exp;
                c /= exp;
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / exp as f64)
            })
            .collect();
        while let Some(x) = frontier.pop() {
            let vx = val[x].expect("assigned");
            for (gi, &s) in gens.iter().enumerate() {
                let y = g.mul(x, s);
                let vy = vx * roots[gi];
                match val[y] {
                    None => {
                        val[y] = Some(vy);
                        frontier.push(y);
                    }
                    Some(old) if (old - vy).norm() > 1e-9 => ok = false,
                    _ => {}
                }
            }
        }
        if ok {
            out.push(val.into_iter().map(|v| v.expect("gens generate G")).collect());
        }
    }
    if out.len() != g.order() {
        return Err(Error::Numerical(format!("found {} characters for order {}", out.len(), g.order())));
    }
    Ok(out)
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

fn abelian(g: &Group, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let chars = characters(g)?;
    let mut an = Tally::new("‖f‖_A = Σ|f̂(χ)| (relative)", 1e-8);
    let mut pm = Tally::new("‖f‖_PM = max|f̂(χ)| (relative)", 1e-8);
    for _ in 0..50 {
        let f = random_function(g, rng);
        let hat: Vec<f64> = chars
            .iter()
            .map(|chi| (f.values().iter().zip(chi).map(|(v, c)| v * c.conj()).sum::<Complex64>() / g.order() as f64).norm())
            .collect();
        let sum: f64 = hat.iter().sum();
        let max = hat.iter().cloned().fold(0.0, f64::max);
        an.le((a_norm(&f)? - sum).abs() / sum.max(1e-300), 0.0);
        pm.le((pm_norm(&f)? - max).abs() / max.max(1e-300), 0.0);
    }
    Ok(vec![an.finish(), pm.finish()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_on_dihedral_8() {
        let g = build_group("dihedral:8").unwrap();
        for s in SUITES.iter().filter(|&&s| s != "abelian") {
            let r = run_suite(s, &g, 1).unwrap();
            assert!(r.passed, "{s}: {:#?}", r.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
        }
        assert!(matches!(run_suite("abelian", &g, 1), Err(Error::Param(_))));
        assert!(matches!(run_suite("nope", &g, 1), Err(Error::Param(_))));
    }

    #[test]
    fn abelian_suite_on_products() {
        for spec in ["cyclic:12", "cyclic:2*cyclic:2*cyclic:4"] {
            let g = build_group(spec).unwrap();
            assert_eq!(characters(&g).unwrap().len(), g.order());
            assert!(run_suite("abelian", &g, 3).unwrap().passed);
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let g = build_group("quaternion:8").unwrap();
        let a = crate::io::to_stable_string(&run_suite("spectral", &g, 7).unwrap()).unwrap();
        let b = crate::io::to_stable_string(&run_suite("spectral", &g, 7).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
