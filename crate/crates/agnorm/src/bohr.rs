//! Unitary representations, non-abelian Bohr sets and the covering lemma.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::group_core::{GSubset, Group};
use crate::linalg::{self, CMatrix};
use crate::{Error, Result};

pub const HOM_TOL: f64 = 1e-9;
pub const UNITARY_TOL: f64 = 1e-10;
/// Slack on the operator-norm comparisons in Bohr sets and covers.
pub const BALL_TOL: f64 = 1e-9;

/// A homomorphism `γ : G → U(d)`, one matrix per element index.
#[derive(Clone, Debug)]
pub struct UnitaryRep {
    group: Group,
    dim: usize,
    matrices: Vec<CMatrix>,
}

impl UnitaryRep {
    /// Validates unitarity, `γ(e) = I` and `γ(x)γ(y) = γ(xy)`.
    pub fn new(g: &Group, matrices: Vec<CMatrix>) -> Result<Self> {
        if matrices.len() != g.order() {
            return Err(Error::Param(format!("expected {} matrices, got {}", g.order(), matrices.len())));
        }
        let dim = matrices.first().map_or(0, |m| m.nrows());
        if dim == 0 {
            return Err(Error::Param("representation dimension must be positive".into()));
        }
        for (x, m) in matrices.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::Param(format!("matrix for element {x} is not {dim}×{dim}")));
            }
            let d = linalg::unitarity_defect(m);
            if d > UNITARY_TOL {
                return Err(Error::Param(format!("matrix for element {x} is not unitary (defect {d:.2e})")));
            }
        }
        let id = CMatrix::identity(dim, dim);
        if linalg::max_abs(&(&matrices[g.identity()] - &id)) > HOM_TOL {
            return Err(Error::Param("γ(identity) ≠ I".into()));
        }
        for x in g.elements() {
            for y in g.elements() {
                let d = linalg::max_abs(&(&matrices[x] * &matrices[y] - &matrices[g.mul(x, y)]));
                if d > HOM_TOL {
                    return Err(Error::Param(format!("γ({x})γ({y}) ≠ γ({x}·{y}) (defect {d:.2e})")));
                }
            }
        }
        Ok(UnitaryRep {
            group: g.clone(),
            dim,
            matrices,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, x: usize) -> &CMatrix {
        &self.matrices[x]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    /// `‖γ(x) − I‖_op`.
    pub fn distance_from_identity(&self, x: usize) -> Result<f64> {
        linalg::op_norm(&(&self.matrices[x] - CMatrix::identity(self.dim, self.dim)))
    }
}

/// `x ↦ 1` on `ℂ`.
pub fn trivial_representation(g: &Group) -> UnitaryRep {
    let one = CMatrix::identity(1, 1);
    UnitaryRep {
        group: g.clone(),
        dim: 1,
        matrices: vec![one; g.order()],
    }
}

/// Left regular representation: `ρ(x)e_z = e_{xz}`.
pub fn regular_representation(g: &Group) -> UnitaryRep {
    let n = g.order();
    let matrices = g
        .elements()
        .map(|x| {
            let mut m = CMatrix::zeros(n, n);
            for z in g.elements() {
                m[(g.mul(x, z), z)] = Complex64::new(1.0, 0.0);
            }
            m
        })
        .collect();
    UnitaryRep {
        group: g.clone(),
        dim: n,
        matrices,
    }
}

/// The character `t^j ↦ e^{2πikj/n}` of a cyclic group, `t` being the
/// smallest-index generator. On `cyclic:n` this is `x ↦ e^{2πikx/n}`.
pub fn cyclic_character(g: &Group, k: i64) -> Result<UnitaryRep> {
    let n = g.order();
    let t = g
        .elements()
        .find(|&x| g.element_order(x) == n)
        .ok_or_else(|| Error::Param(format!("{} is not cyclic", g.name())))?;
    let mut matrices = vec![CMatrix::zeros(1, 1); n];
    let mut x = g.identity();
    for j in 0..n {
        let theta = 2.0 * PI * (k.rem_euclid(n as i64) as f64) * j as f64 / n as f64;
        matrices[x][(0, 0)] = Complex64::from_polar(1.0, theta);
        x = g.mul(x, t);
    }
    UnitaryRep::new(g, matrices)
}

/// Block-diagonal sum of representations of the same group.
pub fn direct_sum(reps: &[UnitaryRep]) -> Result<UnitaryRep> {
    let first = reps.first().ok_or_else(|| Error::Param("empty direct sum".into()))?;
    let g = first.group.clone();
    for r in reps {
        g.ensure_same(&r.group)?;
    }
    let dim: usize = reps.iter().map(|r| r.dim).sum();
    let matrices = g
        .elements()
        .map(|x| {
            let mut m = CMatrix::zeros(dim, dim);
            let mut off = 0;
            for r in reps {
                m.view_mut((off, off), (r.dim, r.dim)).copy_from(&r.matrices[x]);
                off += r.dim;
            }
            m
        })
        .collect();
    Ok(UnitaryRep { group: g, dim, matrices })
}

/// `{x : ‖γ(x) − I‖ ≤ δ}`.
pub fn bohr_set(rep: &UnitaryRep, delta: f64) -> Result<GSubset> {
    if !(0.0..=2.0).contains(&delta) {
        return Err(Error::Param(format!("δ = {delta} outside [0, 2]")));
    }
    let mut out = GSubset::empty(&rep.group);
    for x in rep.group.elements() {
        if rep.distance_from_identity(x)? <= delta + BALL_TOL {
            out.insert(x);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverResult {
    #[serde(skip)]
    pub subset: GSubset,
    pub size: usize,
    /// `|B′|/|B|`.
    pub ratio: f64,
    /// Which search produced the winner.
    pub source: CoverSource,
    pub max_pair_distance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CoverSource {
    HaarCenter,
    Greedy,
}

/// A large `B′ ⊆ B` with `‖φ(x)⁻¹φ(x′) − I‖ ≤ δ` for all `x, x′ ∈ B′`.
///
/// `phi` is aligned with `b.members()`. Candidates are the preimages of
/// `NB(U, δ/2)` for `samples` Haar-random centers `N`, and greedy clusters
/// grown from each seed by increasing distance. Every candidate is checked
/// pairwise; the largest wins, earlier candidates on ties.
pub fn unitary_cover_subset(b: &GSubset, phi: &[CMatrix], delta: f64, samples: usize, seed: u64) -> Result<CoverResult> {
    if !(delta > 0.0 && delta <= 2.0) {
        return Err(Error::Param(format!("δ = {delta} outside (0, 2]")));
    }
    let elems = b.members();
    if elems.is_empty() {
        return Err(Error::Param("B must be nonempty".into()));
    }
    if phi.len() != elems.len() {
        return Err(Error::Param(format!("φ has {} values for |B| = {}", phi.len(), elems.len())));
    }
    let d = phi[0].nrows();
    for (i, m) in phi.iter().enumerate() {
        if m.nrows() != d || m.ncols() != d || linalg::unitarity_defect(m) > UNITARY_TOL {
            return Err(Error::Param(format!("φ(b_{i}) is not a {d}×{d} unitary")));
        }
    }
    let m = elems.len();
    let id = CMatrix::identity(d, d);
    let mut dist = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let v = linalg::op_norm(&(phi[i].adjoint() * &phi[j] - &id))?;
            dist[i][j] = v;
            dist[j][i] = v;
        }
    }
    let ok = |set: &[usize]| set.iter().all(|&i| set.iter().all(|&j| dist[i][j] <= delta + BALL_TOL));

    let mut best: Vec<usize> = vec![0];
    let mut source = CoverSource::Greedy;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let n = linalg::haar_unitary(d, &mut rng);
        let mut cand = Vec::new();
        for (i, p) in phi.iter().enumerate() {
            if linalg::op_norm(&(n.adjoint() * p - &id))? <= delta / 2.0 + BALL_TOL {
                cand.push(i);
            }
        }
        if cand.len() > best.len() && ok(&cand) {
            best = cand;
            source = CoverSource::HaarCenter;
        }
    }
    for s in 0..m {
        let mut order: Vec<usize> = (0..m).filter(|&j| j != s).collect();
        order.sort_by(|&a, &c| dist[s][a].total_cmp(&dist[s][c]).then(a.cmp(&c)));
        let mut cl = vec![s];
        for j in order {
            if dist[s][j] > delta + BALL_TOL {
                break;
            }
            if cl.iter().all(|&k| dist[k][j] <= delta + BALL_TOL) {
                cl.push(j);
            }
        }
        if cl.len() > best.len() {
            best = cl;
            source = CoverSource::Greedy;
        }
    }
    let max_pair_distance = best
        .iter()
        .flat_map(|&i| best.iter().map(move |&j| (i, j)))
        .map(|(i, j)| dist[i][j])
        .fold(0.0, f64::max);
    debug_assert!(max_pair_distance <= delta + BALL_TOL);
    let subset = GSubset::from_elements(b.group(), best.iter().map(|&i| elems[i]))?;
    Ok(CoverResult {
        size: best.len(),
        ratio: best.len() as f64 / m as f64,
        subset,
        source,
        max_pair_distance,
    })
}

/// `φ = γ|_B`, aligned with `b.members()`.
pub fn restrict_rep(rep: &UnitaryRep, b: &GSubset) -> Vec<CMatrix> {
    b.iter().map(|x| rep.matrices[x].clone()).collect()
}
