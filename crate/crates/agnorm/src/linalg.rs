//! Dense complex linear algebra on top of nalgebra's SVD and QR.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Singular values below `ZERO_FLOOR · s_1` are treated as zero.
pub const ZERO_FLOOR: f64 = 1e-12;

/// Thin SVD `M = U Σ V*` with singular values sorted descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub sigma: Vec<f64>,
    pub u: CMatrix,
    pub v: CMatrix,
}

pub fn svd(m: &CMatrix) -> Result<Svd> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Svd {
            sigma: Vec::new(),
            u: CMatrix::zeros(m.nrows(), 0),
            v: CMatrix::zeros(m.ncols(), 0),
        });
    }
    let d = m
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let u = d.u.ok_or_else(|| Error::Numerical("SVD returned no U".into()))?;
    let v_t = d.v_t.ok_or_else(|| Error::Numerical("SVD returned no V".into()))?;
    let k = d.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| d.singular_values[b].total_cmp(&d.singular_values[a]));
    let sigma = order.iter().map(|&i| d.singular_values[i]).collect();
    let u = CMatrix::from_fn(u.nrows(), k, |r, c| u[(r, order[c])]);
    let v = CMatrix::from_fn(v_t.ncols(), k, |r, c| v_t[(order[c], r)].conj());
    Ok(Svd { sigma, u, v })
}

pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let d = m
        .clone()
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let mut s: Vec<f64> = d.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// `Σ s_i` over singular values above the noise floor.
pub fn nuclear_norm_of(sigma: &[f64]) -> f64 {
    let top = sigma.first().copied().unwrap_or(0.0);
    sigma.iter().filter(|&&s| s >= ZERO_FLOOR * top && s > 0.0).sum()
}

/// Spectral (operator) norm.
pub fn op_norm(m: &CMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// `max_{ij} |(M* M − I)_{ij}|`.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let p = m.adjoint() * m;
    let n = p.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Haar-distributed `d × d` unitary: QR of a complex Gaussian matrix with the
/// diagonal phases of `R` folded into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) / std::f64::consts::SQRT_2
    });
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Extends the orthonormal columns of `basis` (`n × k`) to an orthonormal
/// basis of `ℂⁿ`, returning only the new `n × (n − k)` columns. Candidates are
/// standard basis vectors, orthogonalized twice by modified Gram–Schmidt.
pub fn orthonormal_completion(basis: &CMatrix) -> CMatrix {
    let n = basis.nrows();
    let mut cols: Vec<nalgebra::DVector<Complex64>> = (0..basis.ncols()).map(|j| basis.column(j).into_owned()).collect();
    let start = cols.len();
    for e in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = nalgebra::DVector::<Complex64>::zeros(n);
        v[e] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dotc(&v);
                v -= c * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v / Complex64::new(norm, 0.0));
        }
    }
    CMatrix::from_columns(&cols[start..])
}
