use num_complex::Complex64;

use super::group::Group;
use super::subset::GSubset;
use crate::{Error, Result};

/// A complex-valued function on a group. Norms and inner products are taken
/// against the uniform probability measure.
#[derive(Clone, Debug, PartialEq)]
pub struct GFunc {
    group: Group,
    values: Vec<Complex64>,
}

impl GFunc {
    pub fn new(g: &Group, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != g.order() {
            return Err(Error::Param(format!(
                "{} values for a group of order {}",
                values.len(),
                g.order()
            )));
        }
        Ok(GFunc {
            group: g.clone(),
            values,
        })
    }

    pub fn from_fn(g: &Group, f: impl FnMut(usize) -> Complex64) -> Self {
        GFunc {
            group: g.clone(),
            values: g.elements().map(f).collect(),
        }
    }

    pub fn from_real(g: &Group, values: &[f64]) -> Result<Self> {
        Self::new(g, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zero(g: &Group) -> Self {
        Self::constant(g, Complex64::new(0.0, 0.0))
    }

    pub fn constant(g: &Group, c: Complex64) -> Self {
        Self::from_fn(g, |_| c)
    }

    /// `1_A`.
    pub fn indicator(a: &GSubset) -> Self {
        Self::from_fn(a.group(), |x| Complex64::new(if a.contains(x) { 1.0 } else { 0.0 }, 0.0))
    }

    /// Density of the uniform probability measure on `A`: `(n/|A|)·1_A`.
    pub fn uniform_density(a: &GSubset) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Param("uniform measure on the empty set".into()));
        }
        let w = a.group().order() as f64 / a.len() as f64;
        Ok(Self::from_fn(a.group(), |x| Complex64::new(if a.contains(x) { w } else { 0.0 }, 0.0)))
    }

    /// Density of the Dirac mass at `y`: `n·1_{y}`.
    pub fn dirac(g: &Group, y: usize) -> Self {
        let n = g.order() as f64;
        Self::from_fn(g, |x| Complex64::new(if x == y { n } else { 0.0 }, 0.0))
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, x: usize) -> Complex64 {
        self.values[x]
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// `‖f‖_{L^p(μ_G)}` for `1 ≤ p < ∞`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let n = self.values.len() as f64;
        (self.values.iter().map(|v| v.norm().powf(p)).sum::<f64>() / n).powf(1.0 / p)
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum::<f64>() / self.values.len() as f64
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `∫ f` against `μ_G`.
    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// `⟨f, g⟩ = (1/n) Σ f(x) conj g(x)`.
    pub fn inner(&self, other: &GFunc) -> Result<Complex64> {
        self.group.ensure_same(&other.group)?;
        let n = self.values.len() as f64;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum::<Complex64>() / n)
    }

    pub fn support(&self) -> GSubset {
        GSubset::from_fn(&self.group, |x| self.values[x] != Complex64::new(0.0, 0.0))
    }

    fn zip_with(&self, other: &GFunc, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<GFunc> {
        self.group.ensure_same(&other.group)?;
        Ok(GFunc {
            group: self.group.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &GFunc) -> Result<GFunc> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GFunc) -> Result<GFunc> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product `f·g`.
    pub fn mul(&self, other: &GFunc) -> Result<GFunc> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex64) -> GFunc {
        self.map(|v| v * c)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GFunc {
        GFunc {
            group: self.group.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `ρ_y f (x) = f(xy)`.
    pub fn right_translate(&self, y: usize) -> GFunc {
        let g = &self.group;
        Self::from_fn(g, |x| self.values[g.mul(x, y)])
    }

    /// `λ_y f (x) = f(y⁻¹x)`.
    pub fn left_translate(&self, y: usize) -> GFunc {
        let g = &self.group;
        let yi = g.inv(y);
        Self::from_fn(g, |x| self.values[g.mul(yi, x)])
    }

    /// `f̃(x) = conj f(x⁻¹)`.
    pub fn adjoint(&self) -> GFunc {
        let g = &self.group;
        Self::from_fn(g, |x| self.values[g.inv(x)].conj())
    }

    /// Restriction `f·1_A`.
    pub fn restrict(&self, a: &GSubset) -> GFunc {
        Self::from_fn(&self.group, |x| {
            if a.contains(x) {
                self.values[x]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Largest `|f(x) − round(f(x))|` over `x`, with imaginary parts counted
    /// as distance from the real integers.
    pub fn integer_deviation(&self) -> f64 {
        self.values
            .iter()
            .map(|v| (v.re - v.re.round()).abs().max(v.im.abs()))
            .fold(0.0, f64::max)
    }

    /// Every value lies in `ℤ + (−ε, ε)` (open interval, imaginary part below `ε`).
    pub fn is_almost_integer(&self, eps: f64) -> bool {
        self.values
            .iter()
            .all(|v| (v.re - v.re.round()).abs() < eps && v.im.abs() < eps)
    }

    pub fn is_integer_valued(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0 && v.re == v.re.round())
    }

    /// Pointwise nearest integer of the real part.
    pub fn rounded(&self) -> Vec<i64> {
        self.values.iter().map(|v| v.re.round() as i64).collect()
    }

    pub fn from_integers(g: &Group, values: &[i64]) -> Result<GFunc> {
        Self::new(g, values.iter().map(|&v| Complex64::new(v as f64, 0.0)).collect())
    }

    pub fn max_abs_diff(&self, other: &GFunc) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
