//! Fourier analysis relative to a pair: the local operator `L_{ℬ,f}`, its
//! spectrum, regular thresholds, translation operators and nearest unitaries.
//!
//! Vectors in `L²(μ_B)` are handled in coordinates indexed by the members of
//! `B` in increasing order. Since every inner product carries the same `1/|B|`
//! weight, the plain SVD of the coordinate matrix yields `s_i(ℬ, f)`; a unit
//! coordinate column `q` corresponds to the function `√|B|·q` on `B`.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use super::MultiplicativePair;
use crate::group_core::{GFunc, GSubset, Group};
use crate::linalg::{self, CMatrix, Svd};
use crate::{Error, Result};

/// Relative slack when comparing singular values against `δ‖f‖_{L¹(μ_{B′})}`.
pub const SPECTRUM_SLACK: f64 = 1e-10;

/// `‖f‖_{L^p(μ_S)}` with `μ_S` uniform on `S`.
pub fn local_lp(f: &GFunc, s: &GSubset, p: f64) -> f64 {
    let k = s.len() as f64;
    if p.is_infinite() {
        return s.iter().map(|x| f.at(x).norm()).fold(0.0, f64::max);
    }
    (s.iter().map(|x| f.at(x).norm().powf(p)).sum::<f64>() / k).powf(1.0 / p)
}

/// The operator `v ↦ ((f dμ_{B′}) ∗ v)|_B` on `L²(μ_B)`.
#[derive(Debug)]
pub struct LocalOp {
    ground: GSubset,
    perturb: GSubset,
    f: GFunc,
    elems: Vec<usize>,
    matrix: CMatrix,
    svd: OnceLock<std::result::Result<Svd, Error>>,
}

impl LocalOp {
    /// `M[x][u] = f(xu⁻¹)·[xu⁻¹ ∈ B′] / |B′|` for `x, u ∈ B`.
    pub fn new(ground: &GSubset, perturb: &GSubset, f: &GFunc) -> Result<Self> {
        let g = ground.group();
        g.ensure_same(perturb.group())?;
        g.ensure_same(f.group())?;
        if ground.is_empty() || perturb.is_empty() {
            return Err(Error::Param("B and B′ must be nonempty".into()));
        }
        let elems = ground.members();
        let w = 1.0 / perturb.len() as f64;
        let matrix = CMatrix::from_fn(elems.len(), elems.len(), |i, j| {
            let z = g.mul(elems[i], g.inv(elems[j]));
            if perturb.contains(z) {
                f.at(z) * w
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(LocalOp {
            ground: ground.clone(),
            perturb: perturb.clone(),
            f: f.clone(),
            elems,
            matrix,
            svd: OnceLock::new(),
        })
    }

    pub fn for_pair(p: &MultiplicativePair, f: &GFunc) -> Result<Self> {
        LocalOp::new(&p.ground, &p.perturb, f)
    }

    pub fn group(&self) -> &Group {
        self.ground.group()
    }

    pub fn ground(&self) -> &GSubset {
        &self.ground
    }

    pub fn perturb(&self) -> &GSubset {
        &self.perturb
    }

    pub fn func(&self) -> &GFunc {
        &self.f
    }

    /// Members of `B`, the coordinate order.
    pub fn elements(&self) -> &[usize] {
        &self.elems
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn svd(&self) -> Result<&Svd> {
        self.svd.get_or_init(|| linalg::svd(&self.matrix)).as_ref().map_err(Clone::clone)
    }

    pub fn singular_values(&self) -> Result<&[f64]> {
        Ok(&self.svd()?.sigma)
    }

    /// Squared Hilbert–Schmidt norm `Σ s_i²`.
    pub fn hs_norm_sq(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn f_l1(&self) -> f64 {
        local_lp(&self.f, &self.perturb, 1.0)
    }

    pub fn f_l2(&self) -> f64 {
        local_lp(&self.f, &self.perturb, 2.0)
    }

    pub fn f_linf(&self) -> f64 {
        local_lp(&self.f, &self.perturb, f64::INFINITY)
    }

    /// `w(f) = ‖f‖_{L¹(μ_{B′})} / ‖f‖_{L∞(μ_{B′})}`.
    pub fn width(&self) -> f64 {
        self.f_l1() / self.f_linf()
    }

    /// `|B′| / |B|`.
    pub fn thickness(&self) -> f64 {
        self.perturb.len() as f64 / self.ground.len() as f64
    }

    /// Coordinate vector to a function on `G` supported on `B`, scaled so
    /// that unit columns become unit vectors of `L²(μ_B)`.
    pub fn to_function(&self, col: &nalgebra::DVector<Complex64>) -> GFunc {
        let scale = (self.elems.len() as f64).sqrt();
        let mut vals = vec![Complex64::new(0.0, 0.0); self.group().order()];
        for (i, &x) in self.elems.iter().enumerate() {
            vals[x] = col[i] * scale;
        }
        GFunc::new(self.group(), vals).expect("length matches")
    }

    /// Inverse of [`LocalOp::to_function`], ignoring values off `B`.
    pub fn to_coords(&self, v: &GFunc) -> nalgebra::DVector<Complex64> {
        let scale = 1.0 / (self.elems.len() as f64).sqrt();
        nalgebra::DVector::from_iterator(self.elems.len(), self.elems.iter().map(|&x| v.at(x) * scale))
    }

    /// Coordinate matrix of `ρ_{ℬ,y}: v ↦ (ρ_y v)|_B`, i.e. `v(xy)` for `x ∈ B`.
    pub fn restricted_translation(&self, y: usize) -> CMatrix {
        let g = self.group();
        let d = self.elems.len();
        let mut pos = vec![usize::MAX; g.order()];
        for (i, &x) in self.elems.iter().enumerate() {
            pos[x] = i;
        }
        let mut m = CMatrix::zeros(d, d);
        for (i, &x) in self.elems.iter().enumerate() {
            let j = pos[g.mul(x, y)];
            if j != usize::MAX {
                m[(i, j)] = Complex64::new(1.0, 0.0);
            }
        }
        m
    }

    /// Local Fourier basis: right singular vectors as functions on `G`.
    pub fn fourier_basis(&self) -> Result<(Vec<GFunc>, Vec<f64>)> {
        let s = self.svd()?;
        let vs = (0..s.sigma.len()).map(|i| self.to_function(&s.v.column(i).into_owned())).collect();
        Ok((vs, s.sigma.clone()))
    }

    /// Number of singular values `≥ δ‖f‖_{L¹(μ_{B′})}`.
    pub fn spectrum_dim(&self, delta: f64) -> Result<usize> {
        let thr = delta * self.f_l1();
        Ok(self.singular_values()?.iter().filter(|&&s| in_spectrum(s, thr)).count())
    }

    pub fn spectrum(&self, delta: f64) -> Result<SpectrumSlice> {
        if !(delta > 0.0) {
            return Err(Error::Param("δ must be positive".into()));
        }
        let l1 = self.f_l1();
        if l1 == 0.0 {
            return Err(Error::Param("f vanishes on B′".into()));
        }
        let thr = delta * l1;
        let s = self.svd()?;
        let idx: Vec<usize> = (0..s.sigma.len()).filter(|&i| in_spectrum(s.sigma[i], thr)).collect();
        let basis = CMatrix::from_fn(self.elems.len(), idx.len(), |r, c| s.v[(r, idx[c])]);
        Ok(SpectrumSlice {
            delta,
            threshold: thr,
            sing_values: idx.iter().map(|&i| s.sigma[i]).collect(),
            basis,
            width: self.width(),
        })
    }
}

fn in_spectrum(s: f64, thr: f64) -> bool {
    s > 0.0 && s >= thr - SPECTRUM_SLACK * thr.max(1e-300)
}

/// `Spec_δ(ℬ, f)`: an orthonormal coordinate basis of the span of singular
/// vectors with `s_i ≥ δ‖f‖_{L¹(μ_{B′})}`.
#[derive(Clone, Debug)]
pub struct SpectrumSlice {
    pub delta: f64,
    pub threshold: f64,
    pub sing_values: Vec<f64>,
    /// `|B| × dim` with orthonormal columns.
    pub basis: CMatrix,
    /// `w(f)`.
    pub width: f64,
}

impl SpectrumSlice {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// `sup ‖v‖_{L∞(μ_B)}` over unit `v` in the slice. For `v = √|B|·Qa` with
    /// `|a| = 1` the value at `x` is at most `√|B|·‖Q_x‖`, attained at
    /// `a ∝ Q_x*`, so the supremum is exact.
    pub fn sup_linf(&self) -> f64 {
        let d = self.basis.nrows() as f64;
        (0..self.basis.nrows())
            .map(|r| self.basis.row(r).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
            * d.sqrt()
    }

    /// Orthogonal projection onto the slice, in coordinates.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }
}

/// A regular threshold: `dim Spec_{δ′} = dim Spec_{δ′−η}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularDelta {
    pub delta_prime: f64,
    pub eta: f64,
    /// The Parseval-bound `k` fixing the grid step `δ/(2k+2)`.
    pub k: usize,
    pub dim: usize,
}

/// Scans `δ_j = δ − jδ/(2k+2)`, `j = 0..=k+1`, with
/// `k = ⌊4δ⁻²c⁻¹‖f‖₁⁻²‖f‖₂²⌋`, and returns the first `j` whose dimension
/// equals that at `j+1`. Dimensions are nondecreasing in `j` and bounded by
/// `k` at `δ/2`, so a plateau exists among the `k+2` values.
pub fn regular_delta(op: &LocalOp, delta: f64) -> Result<RegularDelta> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Param(format!("δ = {delta} outside (0,1]")));
    }
    let (l1, l2) = (op.f_l1(), op.f_l2());
    if l1 == 0.0 {
        return Err(Error::Param("f vanishes on B′".into()));
    }
    let c = op.thickness();
    let k = (4.0 / (delta * delta * c) * (l2 * l2) / (l1 * l1)).floor() as usize;
    let step = delta / (2 * k + 2) as f64;
    let dims: Vec<usize> = (0..=k + 1)
        .map(|j| op.spectrum_dim(delta - j as f64 * step))
        .collect::<Result<_>>()?;
    for j in 0..=k {
        if dims[j] == dims[j + 1] {
            return Ok(RegularDelta {
                delta_prime: delta - j as f64 * step,
                eta: step,
                k,
                dim: dims[j],
            });
        }
    }
    Err(Error::audit("regular_delta", format!("no plateau among dimensions {dims:?}")))
}

/// `T_{ℬ,f,δ,y} = π ∘ ρ_{ℬ,y}` on `Spec_δ`, as a `dim × dim` matrix in the
/// slice basis.
pub fn translation_operator(op: &LocalOp, slice: &SpectrumSlice, y: usize) -> CMatrix {
    slice.basis.adjoint() * op.restricted_translation(y) * &slice.basis
}

#[derive(Clone, Debug)]
pub struct NearestUnitary {
    pub u: CMatrix,
    /// `max_i |s_i(M) − 1|`; at least 1 when `M` is singular.
    pub bound: f64,
    /// `‖M − U‖` as measured.
    pub distance: f64,
}

/// `U v_i = M v_i / s_i(M)` on the right singular basis, i.e. `U = U_M V_M*`.
/// Null directions are sent to the completing left singular vectors.
pub fn nearest_unitary(m: &CMatrix) -> Result<NearestUnitary> {
    if m.nrows() != m.ncols() {
        return Err(Error::Param("nearest_unitary needs a square matrix".into()));
    }
    if m.nrows() == 0 {
        return Ok(NearestUnitary {
            u: m.clone(),
            bound: 0.0,
            distance: 0.0,
        });
    }
    let s = linalg::svd(m)?;
    let u = &s.u * s.v.adjoint();
    let bound = s.sigma.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
    let distance = linalg::op_norm(&(m - &u))?;
    Ok(NearestUnitary { u, bound, distance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build_group;
    use crate::mult_pairs::{pair_from_growth, pair_from_subgroup};
    use crate::spectral::{fourier_basis, singular_values};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_on(s: &GSubset, rng: &mut ChaCha8Rng) -> GFunc {
        GFunc::from_fn(s.group(), |x| {
            if s.contains(x) {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn whole_group_pair_is_global() {
        let g = build_group("dihedral:8").unwrap();
        let full = GSubset::full(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_on(&full, &mut rng);
        let op = LocalOp::new(&full, &full, &f).unwrap();
        let global = singular_values(&f).unwrap();
        for (a, b) in op.singular_values().unwrap().iter().zip(&global) {
            assert!((a - b).abs() < 1e-12);
        }
        let (vs, _) = op.fourier_basis().unwrap();
        let fb = fourier_basis(&f).unwrap();
        assert_eq!(vs.len(), fb.vectors.len());
        assert!((op.matrix() - crate::spectral::ConvOp::new(&f).matrix()).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn adjoint_is_local_op_of_adjoint() {
        let g = build_group("cyclic:20").unwrap();
        let a = GSubset::from_elements(&g, [19, 0, 1]).unwrap();
        let (p, _) = pair_from_growth(&a, 1, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let f = random_on(&p.perturb, &mut rng);
        let op = LocalOp::for_pair(&p, &f).unwrap();
        let opa = LocalOp::for_pair(&p, &f.adjoint()).unwrap();
        assert!((op.matrix().adjoint() - opa.matrix()).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn slice_edges() {
        let g = build_group("cyclic:12").unwrap();
        let full = GSubset::full(&g);
        let f = GFunc::indicator(&full);
        let op = LocalOp::new(&full, &full, &f).unwrap();
        assert_eq!(op.spectrum(1.0).unwrap().dim(), 1);
        assert_eq!(op.spectrum(1.0 + 1e-6).unwrap().dim(), 0);
        assert_eq!(op.spectrum(0.5).unwrap().dim(), 1);
    }

    #[test]
    fn regular_delta_matches_dimension_scan() {
        let g = build_group("symmetric:4").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let b = GSubset::full(&g);
            let bp = GSubset::from_fn(&g, |x| x < 12);
            let bp = bp.union(&bp.inverse());
            let f = random_on(&bp, &mut rng);
            let op = LocalOp::new(&b, &bp, &f).unwrap();
            let delta = rng.random_range(0.2..1.0);
            let r = regular_delta(&op, delta).unwrap();
            assert!(r.delta_prime > delta / 2.0 && r.delta_prime <= delta);
            // Oracle: direct count of singular values at both thresholds.
            let s = op.singular_values().unwrap();
            let l1 = op.f_l1();
            let cnt = |t: f64| s.iter().filter(|&&x| x >= t * l1 * (1.0 - 1e-10)).count();
            assert_eq!(cnt(r.delta_prime), cnt(r.delta_prime - r.eta));
        }
    }

    #[test]
    fn translation_at_identity_is_identity() {
        let g = build_group("quaternion:8").unwrap();
        let h = crate::group_core::subgroups(&g).unwrap()[2].clone();
        let p = pair_from_subgroup(&h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let f = random_on(&h, &mut rng);
        let op = LocalOp::for_pair(&p, &f).unwrap();
        let slice = op.spectrum(0.1).unwrap();
        let t = translation_operator(&op, &slice, g.identity());
        assert!(linalg::unitarity_defect(&t) < 1e-12);
        assert!((t - CMatrix::identity(slice.dim(), slice.dim())).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn nearest_unitary_examples() {
        let id = CMatrix::identity(3, 3);
        let r = nearest_unitary(&id.scale(1.25)).unwrap();
        assert!((r.u.clone() - &id).iter().all(|z| z.norm() < 1e-12));
        assert!((r.bound - 0.25).abs() < 1e-12 && (r.distance - 0.25).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let q = linalg::haar_unitary(4, &mut rng);
        let r = nearest_unitary(&q).unwrap();
        assert!((r.u - &q).iter().all(|z| z.norm() < 1e-10));
        assert!(r.bound < 1e-10);
        let sing = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]));
        let r = nearest_unitary(&sing).unwrap();
        assert!(linalg::unitarity_defect(&r.u) < 1e-12);
        assert!((r.bound - 1.0).abs() < 1e-12);
    }
}
