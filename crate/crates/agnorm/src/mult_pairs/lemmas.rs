//! Executable forms of the physical-space and spectral inequalities on
//! pairs. Each check returns the measured sides; callers decide tolerances.

use num_complex::Complex64;
use serde::Serialize;

use super::local::{local_lp, LocalOp};
use super::{pair_tight, MultiplicativePair};
use crate::group_core::{GFunc, GSubset};
use crate::linalg::{self, CMatrix, ZERO_FLOOR};
use crate::spectral::{convolve, ConvOp};
use crate::{Error, Result};

/// A measured inequality `lhs ≤ rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bound {
    pub lhs: f64,
    pub rhs: f64,
}

impl Bound {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

fn restricted(f: &GFunc, s: &GSubset) -> GFunc {
    f.restrict(s)
}

/// `f dμ_S` as a density: `f · (n/|S|) · 1_S`.
pub fn weighted_density(f: &GFunc, s: &GSubset) -> GFunc {
    let w = s.group().order() as f64 / s.len() as f64;
    restricted(f, s).scale(Complex64::new(w, 0.0))
}

/// Continuity of `f ∗ μ_B` along `B′ʳ`:
/// `sup_{x, y∈B′ʳ} |f∗μ_B(xy) − f∗μ_B(x)| ≤ ε‖f‖_∞`.
pub fn appcon(p: &MultiplicativePair, f: &GFunc) -> Result<Bound> {
    let g = p.ground.group();
    let c = convolve(f, &GFunc::uniform_density(&p.ground)?)?;
    let pr = p.perturb_power().members();
    let mut lhs: f64 = 0.0;
    for x in g.elements() {
        for &y in &pr {
            lhs = lhs.max((c.at(g.mul(x, y)) - c.at(x)).norm());
        }
    }
    Ok(Bound {
        lhs,
        rhs: p.closure() * f.linf_norm(),
    })
}

/// Approximate unitarity of `ρ_{ℬ,y}`: returns `‖v‖² − ‖ρ_{ℬ,y}v‖²` (in
/// `L²(μ_B)`) against `ε‖v‖²_{L∞(μ_B)}`; the lower bound `0 ≤ lhs` is part
/// of the statement.
pub fn apun(p: &MultiplicativePair, v: &GFunc, y: usize) -> Result<Bound> {
    let g = p.ground.group();
    let v = v.restrict(&p.ground);
    let before = local_lp(&v, &p.ground, 2.0).powi(2);
    let moved = GFunc::from_fn(g, |x| v.at(g.mul(x, y))).restrict(&p.ground);
    let after = local_lp(&moved, &p.ground, 2.0).powi(2);
    Ok(Bound {
        lhs: before - after,
        rhs: p.closure() * local_lp(&v, &p.ground, f64::INFINITY).powi(2),
    })
}

/// `|‖(f dμ_{B′}) ∗ (g|_B)‖² − ‖(f dμ_{B′}) ∗ g‖²|` in `L²(μ_B)` against
/// `2√ε ‖f‖²_{L¹(μ_{B′})} ‖g‖²_{L∞(μ_{BB′ʳ})}`, with `g` read on `BB′ʳ`.
pub fn bogcalc(p: &MultiplicativePair, f: &GFunc, gfun: &GFunc) -> Result<Bound> {
    let bbr = crate::set_structures::product_set(&p.ground, &p.perturb_power());
    let gg = gfun.restrict(&bbr);
    let fd = weighted_density(f, &p.perturb);
    let a = convolve(&fd, &gg.restrict(&p.ground))?;
    let b = convolve(&fd, &gg)?;
    let lhs = (local_lp(&a, &p.ground, 2.0).powi(2) - local_lp(&b, &p.ground, 2.0).powi(2)).abs();
    let rhs = 2.0 * p.closure().sqrt() * local_lp(f, &p.perturb, 1.0).powi(2) * local_lp(&gg, &bbr, f64::INFINITY).powi(2);
    Ok(Bound { lhs, rhs })
}

/// Commutator defect `‖ρ_{ℬ′,y}L_{ℬ,f}v − L_{ℬ,f}ρ_{ℬ′,y}v‖²_{L²(μ_B)}` for
/// `ℬ = (B,B′)` (the operator) and `ℬ′ = (B,B″)` (`q`).
///
/// `rhs` is the bound the argument actually yields,
/// `2‖v‖²_∞‖f‖²_∞(ε′ + c⁻²ε′²)`, which is `≤ 2c⁻²‖v‖²_∞‖f‖²_∞(ε′ + ε′²)`
/// whenever `c ≤ 1`.
pub fn approxtrans(op: &LocalOp, q: &MultiplicativePair, v: &GFunc, y: usize) -> Result<Bound> {
    if q.ground != *op.ground() {
        return Err(Error::Param("both pairs must share the ground set B".into()));
    }
    let a = op.to_coords(v);
    let r = op.restricted_translation(y);
    let m = op.matrix();
    let d = &r * (m * &a) - m * (&r * &a);
    let eps = q.closure();
    let c = op.thickness();
    let vinf = local_lp(v, op.ground(), f64::INFINITY);
    let rhs = 2.0 * vinf * vinf * op.f_linf().powi(2) * (eps + eps * eps / (c * c));
    Ok(Bound {
        lhs: d.norm_squared(),
        rhs,
    })
}

/// `s_1(ℬ,f) ≤ ‖f‖_{L¹(μ_{B′})}`.
pub fn hdy(op: &LocalOp) -> Result<Bound> {
    Ok(Bound {
        lhs: op.singular_values()?.first().copied().unwrap_or(0.0),
        rhs: op.f_l1(),
    })
}

/// `‖L_{ℬ,f}‖²_{HS} ≤ c⁻¹‖f‖²_{L²(μ_{B′})}`.
pub fn locbes(op: &LocalOp) -> Bound {
    Bound {
        lhs: op.hs_norm_sq(),
        rhs: op.f_l2().powi(2) / op.thickness(),
    }
}

/// `dim Spec_δ ≤ c⁻¹δ⁻²‖f‖₁⁻²‖f‖₂²`.
pub fn pbd(op: &LocalOp, delta: f64) -> Result<Bound> {
    let (l1, l2) = (op.f_l1(), op.f_l2());
    Ok(Bound {
        lhs: op.spectrum_dim(delta)? as f64,
        rhs: l2 * l2 / (op.thickness() * delta * delta * l1 * l1),
    })
}

/// For each eigenspace of `L*L` with nonzero eigenvalue `|λ|²`: the exact
/// supremum of `‖v‖_{L∞(μ_B)}` over its unit vectors against
/// `|λ|⁻²c^{−1/2}‖f‖₁‖f‖₂`.
pub fn evalbd(op: &LocalOp) -> Result<Vec<Bound>> {
    let s = op.svd()?;
    let top = s.sigma.first().copied().unwrap_or(0.0);
    let (l1, l2, c) = (op.f_l1(), op.f_l2(), op.thickness());
    let scale = (op.elements().len() as f64).sqrt();
    let mut out = Vec::new();
    let mut i = 0;
    while i < s.sigma.len() && s.sigma[i] > ZERO_FLOOR * top {
        let mut j = i + 1;
        while j < s.sigma.len() && (s.sigma[j] - s.sigma[i]).abs() <= 1e-9 * s.sigma[i] {
            j += 1;
        }
        let sup = (0..s.v.nrows())
            .map(|r| (i..j).map(|k| s.v[(r, k)].norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
            * scale;
        let lam = s.sigma[i];
        out.push(Bound {
            lhs: sup,
            rhs: l1 * l2 / (lam * lam * c.sqrt()),
        });
        i = j;
    }
    Ok(out)
}

/// `sup_{v ∈ Spec_δ, ‖v‖=1} ‖v‖_{L∞(μ_B)} ≤ δ⁻³c⁻¹‖f‖₁⁻²‖f‖₂²`.
pub fn genl8bd(op: &LocalOp, delta: f64) -> Result<Bound> {
    let slice = op.spectrum(delta)?;
    let (l1, l2) = (op.f_l1(), op.f_l2());
    Ok(Bound {
        lhs: slice.sup_linf(),
        rhs: l2 * l2 / (delta.powi(3) * op.thickness() * l1 * l1),
    })
}

/// Inputs and outcome of the chop-up inequality check.
#[derive(Clone, Debug, Serialize)]
pub struct ChopupReport {
    pub eps1: f64,
    pub eps2: f64,
    pub c1: f64,
    pub c2: f64,
    pub lambda: f64,
    pub eta: f64,
    pub hypotheses: bool,
    pub witness: Option<usize>,
    /// At the witness: `‖fdμ_{B₂} ∗ (ρ_{x′}g|_{B₀})‖²` against `η‖f‖²_∞‖ρ_{x′}g‖²/4`.
    pub first: Option<Bound>,
    /// At the witness: `‖ρ_{x′}g‖_{L∞(μ_{B₀})}` against `4η^{−1/2}|λ|⁻¹c₁⁻¹‖ρ_{x′}g‖_{L²(μ_{B₀})}`.
    pub second: Option<Bound>,
}

fn chop_conclusions(
    b0: &GSubset,
    fd: &GFunc,
    finf: f64,
    g: &GFunc,
    x: usize,
    eta: f64,
    lambda: f64,
    c1: f64,
) -> Result<(Bound, Bound)> {
    let grp = b0.group();
    let phi = GFunc::from_fn(grp, |z| g.at(grp.mul(z, x)));
    let cut = phi.restrict(b0);
    let lhs1 = local_lp(&convolve(fd, &cut)?, b0, 2.0).powi(2);
    let l2 = local_lp(&phi, b0, 2.0);
    let first = Bound {
        lhs: lhs1,
        rhs: eta * finf * finf * l2 * l2 / 4.0,
    };
    let second = Bound {
        lhs: local_lp(&phi, b0, f64::INFINITY),
        rhs: 4.0 / (eta.sqrt() * lambda.abs() * c1) * l2,
    };
    Ok((first, second))
}

/// Chop-up check for `B₀ ⊇ B₁ ⊇ B₂`, `f` on `B₂` and `h` on `x₁B₁`.
///
/// Closure and thickness come from tight 4-multiplicative sandwiches of the
/// pairs `(B_i, B_j)`, `i < j`. The eigenvector `g` of
/// `L*_{h dμ_{x₁B₁}} L_{h dμ_{x₁B₁}}` is chosen per eigenspace to maximize
/// `‖fdμ_{B₂} ∗ g‖/‖g‖`, and `η` sits just below the resulting ratio so the
/// strict hypothesis holds. The first eigenspace meeting
/// `ε₁ ≤ 1, ε₂ ≤ ηc₁²|λ|²/16` is used; then `x′` is scanned over `G` in
/// index order for both conclusions.
pub fn chopup(b0: &GSubset, b1: &GSubset, b2: &GSubset, f: &GFunc, h: &GFunc, x1: usize) -> Result<ChopupReport> {
    let grp = b0.group();
    let tight = |a: &GSubset, b: &GSubset| -> Option<f64> {
        let p = pair_tight(a, b, 4).ok()?;
        let r = p.validate();
        r.valid.then_some(r.epsilon)
    };
    let e01 = tight(b0, b1);
    let e02 = tight(b0, b2);
    let e12 = tight(b1, b2);
    let c1 = b1.len() as f64 / b0.len() as f64;
    let c2 = (b2.len() as f64 / b0.len() as f64).min(b2.len() as f64 / b1.len() as f64);
    let mut report = ChopupReport {
        eps1: e01.unwrap_or(f64::INFINITY),
        eps2: match (e02, e12) {
            (Some(a), Some(b)) => a.max(b),
            _ => f64::INFINITY,
        },
        c1,
        c2,
        lambda: 0.0,
        eta: 0.0,
        hypotheses: false,
        witness: None,
        first: None,
        second: None,
    };
    let finf = local_lp(f, b2, f64::INFINITY);
    let x1b1 = b1.left_translate(x1);
    let hinf = local_lp(h, &x1b1, f64::INFINITY);
    if report.eps1 > 1.0 || !report.eps2.is_finite() || finf == 0.0 || hinf == 0.0 {
        return Ok(report);
    }
    let fd = weighted_density(f, b2);
    let fm = ConvOp::new(&fd).matrix().clone();
    let hop = ConvOp::new(&weighted_density(h, &x1b1));
    let s = hop.svd()?;
    let top = s.sigma.first().copied().unwrap_or(0.0);
    let mut i = 0;
    while i < s.sigma.len() && s.sigma[i] > ZERO_FLOOR * top.max(1e-300) {
        let mut j = i + 1;
        while j < s.sigma.len() && (s.sigma[j] - s.sigma[i]).abs() <= 1e-9 * s.sigma[i] {
            j += 1;
        }
        let e = CMatrix::from_fn(s.v.nrows(), j - i, |r, c| s.v[(r, i + c)]);
        let inner = linalg::svd(&(&fm * &e))?;
        let coef = inner.v.column(0).into_owned();
        let gvec = &e * coef;
        let gfun = GFunc::new(grp, gvec.iter().copied().collect())?;
        let ratio = convolve(&fd, &gfun)?.l2_norm_sq() / (finf * finf * gfun.l2_norm_sq());
        let eta = ratio * (1.0 - 1e-9);
        let lambda = s.sigma[i] * s.sigma[i] / (hinf * hinf);
        if eta > 0.0 && report.eps2 <= eta * c1 * c1 * lambda * lambda / 16.0 {
            report.hypotheses = true;
            report.lambda = lambda;
            report.eta = eta;
            for x in grp.elements() {
                let (a, b) = chop_conclusions(b0, &fd, finf, &gfun, x, eta, lambda, c1)?;
                if a.lhs > a.rhs && b.holds(1e-10) {
                    report.witness = Some(x);
                    report.first = Some(a);
                    report.second = Some(b);
                    break;
                }
            }
            return Ok(report);
        }
        i = j;
    }
    Ok(report)
}
