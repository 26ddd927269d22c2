//! Convolution, the operator `L_f`, its singular values and the `A(G)` and
//! `PM(G)` norms.
//!
//! `L_f` is stored as the matrix `M[x][z] = f(x z⁻¹)/n` acting on value
//! vectors. Since `v ↦ v/√n` is an isometry from `L²(μ_G)` onto `ℂⁿ` and
//! commutes with `M`, the plain SVD of `M` yields exactly the `s_i(f)`.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::group_core::{GFunc, GSubset, Group};
use crate::linalg::{self, CMatrix, Svd};
use crate::{Error, Result};

/// Tolerance for the right-translation commutation test in
/// [`recover_from_operator`].
pub const COMMUTATION_TOL: f64 = 1e-8;

/// `(f ∗ g)(x) = (1/n) Σ_y f(y) g(y⁻¹x)`.
pub fn convolve(f: &GFunc, g: &GFunc) -> Result<GFunc> {
    let grp = f.group();
    grp.ensure_same(g.group())?;
    let n = grp.order();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for y in 0..n {
        let fy = f.at(y);
        if fy == Complex64::new(0.0, 0.0) {
            continue;
        }
        // x = y z runs over G as z does.
        for z in 0..n {
            out[grp.mul(y, z)] += fy * g.at(z);
        }
    }
    let inv_n = 1.0 / n as f64;
    for v in &mut out {
        *v *= inv_n;
    }
    GFunc::new(grp, out)
}

/// `f̃(x) = conj f(x⁻¹)`.
pub fn adjoint(f: &GFunc) -> GFunc {
    f.adjoint()
}

/// `f ∗ μ_H (x) = (1/|H|) Σ_{h∈H} f(xh)`; constant on each left coset `xH`.
pub fn coset_projection(f: &GFunc, h: &GSubset) -> Result<GFunc> {
    f.group().ensure_same(h.group())?;
    h.ensure_subgroup()?;
    let g = f.group();
    let hs = h.members();
    let w = 1.0 / hs.len() as f64;
    Ok(GFunc::from_fn(g, |x| hs.iter().map(|&k| f.at(g.mul(x, k))).sum::<Complex64>() * w))
}

/// The operator `L_f` with a lazily computed, thread-safe SVD cache.
#[derive(Debug)]
pub struct ConvOp {
    group: Group,
    matrix: CMatrix,
    svd: OnceLock<std::result::Result<Svd, Error>>,
    sigma: OnceLock<std::result::Result<Vec<f64>, Error>>,
}

impl ConvOp {
    pub fn new(f: &GFunc) -> Self {
        let g = f.group();
        let n = g.order();
        let inv_n = 1.0 / n as f64;
        let matrix = CMatrix::from_fn(n, n, |x, z| f.at(g.mul(x, g.inv(z))) * inv_n);
        ConvOp {
            group: g.clone(),
            matrix,
            svd: OnceLock::new(),
            sigma: OnceLock::new(),
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn svd(&self) -> Result<&Svd> {
        self.svd.get_or_init(|| linalg::svd(&self.matrix)).as_ref().map_err(Clone::clone)
    }

    /// `s_1(f) ≥ s_2(f) ≥ …`.
    pub fn singular_values(&self) -> Result<&[f64]> {
        if let Some(Ok(s)) = self.svd.get() {
            return Ok(&s.sigma);
        }
        self.sigma
            .get_or_init(|| linalg::singular_values(&self.matrix))
            .as_ref()
            .map(Vec::as_slice)
            .map_err(Clone::clone)
    }

    pub fn a_norm(&self) -> Result<f64> {
        Ok(linalg::nuclear_norm_of(self.singular_values()?))
    }

    pub fn pm_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?.first().copied().unwrap_or(0.0))
    }

    /// `‖M − U Σ V*‖_max`, for auditing the cached decomposition.
    pub fn reconstruction_error(&self) -> Result<f64> {
        let s = self.svd()?;
        let sig = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            s.sigma.len(),
            s.sigma.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        Ok(linalg::max_abs(&(&self.matrix - &s.u * sig * s.v.adjoint())))
    }
}

/// `‖f‖_{A(G)} = Σ s_i(f)`.
pub fn a_norm(f: &GFunc) -> Result<f64> {
    ConvOp::new(f).a_norm()
}

/// `‖f‖_{PM(G)} = s_1(f)`.
pub fn pm_norm(f: &GFunc) -> Result<f64> {
    ConvOp::new(f).pm_norm()
}

pub fn singular_values(f: &GFunc) -> Result<Vec<f64>> {
    Ok(ConvOp::new(f).singular_values()?.to_vec())
}

/// Orthonormal eigenbasis of `L_f* L_f` in `L²(μ_G)`.
#[derive(Clone, Debug)]
pub struct FourierBasis {
    /// `v_i` as functions on `G`, orthonormal for the normalized inner product.
    pub vectors: Vec<GFunc>,
    /// `s_i(f)`, descending, matching `vectors`.
    pub sing_values: Vec<f64>,
}

impl FourierBasis {
    /// `max_{ij} |⟨v_i, v_j⟩ − δ_ij|`.
    pub fn gram_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let ip = a.inner(b).expect("same group");
                let t = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - Complex64::new(t, 0.0)).norm());
            }
        }
        worst
    }
}

/// Fourier basis for `f`: right singular vectors of `L_f`, scaled by `√n`.
///
/// Ordering is canonical: descending singular value, then (within a cluster
/// of equal values up to `1e-9`) lexicographic on entries rounded to `1e-9`.
pub fn fourier_basis(f: &GFunc) -> Result<FourierBasis> {
    let op = ConvOp::new(f);
    let s = op.svd()?;
    let g = f.group();
    let n = g.order();
    let scale = (n as f64).sqrt();
    let mut items: Vec<(f64, GFunc)> = (0..s.sigma.len())
        .map(|i| {
            let v = GFunc::from_fn(g, |x| s.v[(x, i)] * scale);
            (s.sigma[i], v)
        })
        .collect();
    let key = |v: &GFunc| -> Vec<(i64, i64)> {
        v.values()
            .iter()
            .map(|z| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64))
            .collect()
    };
    items.sort_by(|(sa, va), (sb, vb)| {
        if (sa - sb).abs() > 1e-9 {
            sb.total_cmp(sa)
        } else {
            key(va).cmp(&key(vb))
        }
    });
    Ok(FourierBasis {
        sing_values: items.iter().map(|(s, _)| *s).collect(),
        vectors: items.into_iter().map(|(_, v)| v).collect(),
    })
}

/// Inverts `f ↦ L_f`: checks that `M` commutes with every right translation
/// and returns `f = M δ_e`, i.e. `f(x) = n·M[x][e]`.
pub fn recover_from_operator(g: &Group, m: &CMatrix) -> Result<GFunc> {
    let n = g.order();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::Param(format!("operator is {}×{}, group order {n}", m.nrows(), m.ncols())));
    }
    let scale = linalg::max_abs(m).max(1.0);
    // M ρ_y = ρ_y M reads M[x][w y⁻¹] = M[xy][w].
    for y in 0..n {
        let yi = g.inv(y);
        let mut defect: f64 = 0.0;
        for x in 0..n {
            let xy = g.mul(x, y);
            for w in 0..n {
                defect = defect.max((m[(x, g.mul(w, yi))] - m[(xy, w)]).norm());
            }
        }
        if defect > COMMUTATION_TOL * scale {
            return Err(Error::NotConvolution { y, defect });
        }
    }
    let e = g.identity();
    Ok(GFunc::from_fn(g, |x| m[(x, e)] * n as f64))
}

/// Matrix of the right translation `ρ_y` on value vectors: `(ρ_y v)(x) = v(xy)`.
pub fn right_translation_matrix(g: &Group, y: usize) -> CMatrix {
    let n = g.order();
    let mut p = CMatrix::zeros(n, n);
    for x in 0..n {
        p[(x, g.mul(x, y))] = Complex64::new(1.0, 0.0);
    }
    p
}

/// Matrix of the left translation `(λ_y v)(x) = v(y⁻¹x)`.
pub fn left_translation_matrix(g: &Group, y: usize) -> CMatrix {
    let n = g.order();
    let yi = g.inv(y);
    let mut p = CMatrix::zeros(n, n);
    for x in 0..n {
        p[(x, g.mul(yi, x))] = Complex64::new(1.0, 0.0);
    }
    p
}

/// Hilbert–Schmidt inner product `tr(B* A)`. Entries of `L_f` are
/// `f(xy⁻¹)/n`, so this is `⟨f, g⟩_{L²(μ_G)}` when `A = L_f`, `B = L_g`.
pub fn hs_inner(a: &ConvOp, b: &ConvOp) -> Complex64 {
    a.matrix().iter().zip(b.matrix().iter()).map(|(x, y)| x * y.conj()).sum::<Complex64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build_group;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_func(g: &Group, rng: &mut ChaCha8Rng) -> GFunc {
        GFunc::from_fn(g, |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    /// `Σ_k |f̂(k)|` with `f̂(k) = (1/n) Σ_x f(x) e^{−2πikx/n}`, by direct summation.
    fn dft_l1(vals: &[Complex64]) -> (f64, f64) {
        let n = vals.len();
        let mut l1 = 0.0;
        let mut mx: f64 = 0.0;
        for k in 0..n {
            let c: Complex64 = (0..n)
                .map(|x| vals[x] * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (k * x) as f64 / n as f64))
                .sum::<Complex64>()
                / n as f64;
            l1 += c.norm();
            mx = mx.max(c.norm());
        }
        (l1, mx)
    }

    #[test]
    fn cyclic_four_two_point_set() {
        let g = build_group("cyclic:4").unwrap();
        let a = GSubset::from_elements(&g, [0, 1]).unwrap();
        let v = a_norm(&GFunc::indicator(&a)).unwrap();
        assert_relative_eq!(v, (1.0 + 2f64.sqrt()) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn hilbert_schmidt_pairing_is_l2_pairing() {
        let g = build_group("quaternion:8").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_func(&g, &mut rng);
        let h = random_func(&g, &mut rng);
        let lhs = hs_inner(&ConvOp::new(&f), &ConvOp::new(&h));
        assert!((lhs - f.inner(&h).unwrap()).norm() < 1e-12);
        let s: f64 = singular_values(&f).unwrap().iter().map(|s| s * s).sum();
        assert_relative_eq!(s, f.l2_norm_sq(), epsilon = 1e-12);
    }

    #[test]
    fn constant_one_has_norm_one() {
        let g = build_group("symmetric:3").unwrap();
        let f = GFunc::constant(&g, Complex64::new(1.0, 0.0));
        assert_relative_eq!(a_norm(&f).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(pm_norm(&f).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dirac_is_identity_for_convolution() {
        let g = build_group("dihedral:8").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_func(&g, &mut rng);
        let d = GFunc::dirac(&g, g.identity());
        assert!(convolve(&d, &f).unwrap().max_abs_diff(&f) < 1e-12);
        let basis = fourier_basis(&d).unwrap();
        assert!(basis.sing_values.iter().all(|&s| (s - 1.0).abs() < 1e-12));
    }

    #[test]
    fn convolution_matches_circular_oracle() {
        let g = build_group("cyclic:8").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_func(&g, &mut rng);
        let h = random_func(&g, &mut rng);
        let c = convolve(&f, &h).unwrap();
        for x in 0..8 {
            let want: Complex64 = (0..8).map(|y| f.at(y) * h.at((x + 8 - y) % 8)).sum::<Complex64>() / 8.0;
            assert!((c.at(x) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn support_of_convolution_is_product_set() {
        let g = build_group("symmetric:3").unwrap();
        for ma in 1u32..64 {
            for mb in 1u32..64 {
                let a = GSubset::from_fn(&g, |x| ma >> x & 1 == 1);
                let b = GSubset::from_fn(&g, |x| mb >> x & 1 == 1);
                let c = convolve(&GFunc::indicator(&a), &GFunc::indicator(&b)).unwrap();
                let supp = GSubset::from_fn(&g, |x| c.at(x).norm() > 1e-12);
                let prod = GSubset::from_fn(&g, |x| a.iter().any(|s| b.contains(g.mul(g.inv(s), x))));
                assert_eq!(supp, prod);
            }
        }
    }

    #[test]
    fn abelian_singular_values_are_fourier_moduli() {
        let g = build_group("cyclic:9").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_func(&g, &mut rng);
        let (l1, mx) = dft_l1(f.values());
        assert_relative_eq!(a_norm(&f).unwrap(), l1, max_relative = 1e-10);
        assert_relative_eq!(pm_norm(&f).unwrap(), mx, max_relative = 1e-10);
    }

    #[test]
    fn fourier_basis_invariants() {
        let g = build_group("symmetric:3").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_func(&g, &mut rng);
        let b = fourier_basis(&f).unwrap();
        assert!(b.gram_defect() < 1e-10);
        let ft = f.adjoint();
        for (v, s) in b.vectors.iter().zip(&b.sing_values) {
            let w = convolve(&ft, &convolve(&f, v).unwrap()).unwrap();
            let target = v.scale(Complex64::new(s * s, 0.0));
            assert!(w.max_abs_diff(&target) < 1e-8 * (1.0 + s * s));
        }
    }

    #[test]
    fn recover_roundtrip_and_rejection() {
        let g = build_group("symmetric:3").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_func(&g, &mut rng);
        let op = ConvOp::new(&f);
        let back = recover_from_operator(&g, op.matrix()).unwrap();
        assert!(back.max_abs_diff(&f) < 1e-10);
        let id = CMatrix::identity(6, 6);
        assert!(recover_from_operator(&g, &id).unwrap().max_abs_diff(&GFunc::dirac(&g, 0)) < 1e-12);
        // Left translations are convolutions (by a Dirac density) and recover.
        let lt = left_translation_matrix(&g, 1);
        let d = recover_from_operator(&g, &lt).unwrap();
        assert!(d.max_abs_diff(&GFunc::dirac(&g, 1)) < 1e-12);
        // Right translation by a non-central element does not commute with ρ_y.
        let rt = right_translation_matrix(&g, 1);
        assert!(matches!(recover_from_operator(&g, &rt), Err(Error::NotConvolution { .. })));
    }

    #[test]
    fn coset_projection_examples() {
        let g = build_group("dihedral:8").unwrap();
        let subs = crate::group_core::subgroups(&g).unwrap();
        let h = &subs[3];
        let f = GFunc::indicator(h);
        assert!(coset_projection(&f, h).unwrap().max_abs_diff(&f) < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let r = random_func(&g, &mut rng);
        let triv = GSubset::identity_set(&g);
        assert!(coset_projection(&r, &triv).unwrap().max_abs_diff(&r) < 1e-12);
        let p = coset_projection(&r, h).unwrap();
        for x in 0..8 {
            for k in h.iter() {
                assert!((p.at(x) - p.at(g.mul(x, k))).norm() < 1e-12);
            }
        }
        // subs[3] = {e, s} is not normal: only the triangle inequality survives.
        let lhs = a_norm(&r).unwrap();
        let rhs = a_norm(&r.sub(&p).unwrap()).unwrap() + a_norm(&p).unwrap();
        assert!(lhs < rhs - 1e-3);
    }

    #[test]
    fn mass_splits_over_normal_subgroups() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for spec in ["dihedral:8", "symmetric:3", "quaternion:8"] {
            let g = build_group(spec).unwrap();
            for h in crate::group_core::subgroups(&g).unwrap() {
                if !h.is_normal() {
                    continue;
                }
                let r = random_func(&g, &mut rng);
                let p = coset_projection(&r, &h).unwrap();
                let lhs = a_norm(&r).unwrap();
                let rhs = a_norm(&r.sub(&p).unwrap()).unwrap() + a_norm(&p).unwrap();
                assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn svd_reconstruction() {
        let g = build_group("quaternion:8").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_func(&g, &mut rng);
        let op = ConvOp::new(&f);
        assert!(op.reconstruction_error().unwrap() < 1e-12);
    }

    #[test]
    fn matrix_of_adjoint_is_adjoint_matrix() {
        let g = build_group("dihedral:12").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = random_func(&g, &mut rng);
        let a = ConvOp::new(&f.adjoint());
        let b = ConvOp::new(&f);
        assert!(linalg::max_abs(&(a.matrix() - b.matrix().adjoint())) < 1e-15);
    }
}
