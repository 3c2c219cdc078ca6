//! Finitely supported Fourier data on Z^d and its realization on the torus T^d.
//!
//! A [`FourierCoeffs`] is a trigonometric polynomial `Σ f̂(n)·e^{i⟨n,t⟩}`. The
//! Hardy-space projections, the conjugate function, the flip `J` and
//! convolution act directly on coefficients; grid sampling is only needed
//! for sup-norm estimates.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordered_group::{GroupElement, OrderSpec, Sign};

/// Coefficients at or below this magnitude are dropped after arithmetic.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct FourierCoeffs {
    dim: usize,
    entries: BTreeMap<GroupElement, Complex64>,
}

impl FourierCoeffs {
    pub fn zero(dim: usize) -> Self {
        FourierCoeffs {
            dim,
            entries: BTreeMap::new(),
        }
    }

    /// Single coefficient `value` at `n`.
    pub fn delta(n: GroupElement, value: Complex64) -> Self {
        let mut f = Self::zero(n.dim());
        f.set(n, value);
        f
    }

    /// Builds from explicit pairs; a repeated key is an error.
    pub fn from_pairs(
        dim: usize,
        pairs: impl IntoIterator<Item = (GroupElement, Complex64)>,
    ) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, c) in pairs {
            n.check_dim(dim)?;
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite coefficient at {n}")));
            }
            match entries.entry(n) {
                Entry::Occupied(e) => {
                    return Err(Error::Parse(format!("duplicate coefficient at {}", e.key())))
                }
                Entry::Vacant(e) => {
                    e.insert(c);
                }
            }
        }
        let mut f = FourierCoeffs { dim, entries };
        f.prune();
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, n: &GroupElement) -> Complex64 {
        self.entries.get(n).copied().unwrap_or_default()
    }

    /// Sets one coefficient; values below the prune threshold remove it.
    pub fn set(&mut self, n: GroupElement, value: Complex64) {
        debug_assert_eq!(n.dim(), self.dim);
        if value.norm() <= PRUNE_THRESHOLD {
            self.entries.remove(&n);
        } else {
            self.entries.insert(n, value);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, &Complex64)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.entries.keys()
    }

    /// Largest |n_i| over the support (0 for the zero polynomial).
    pub fn max_degree(&self) -> i64 {
        self.entries.keys().map(|n| n.sup_norm()).max().unwrap_or(0)
    }

    /// Coefficient at 0, i.e. the mean value.
    pub fn mean(&self) -> Complex64 {
        self.get(&GroupElement::zero(self.dim))
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.values().map(|c| c.norm()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest coefficient magnitude difference against `other`.
    pub fn max_abs_diff(&self, other: &FourierCoeffs) -> f64 {
        self.support()
            .chain(other.support())
            .map(|n| (self.get(n) - other.get(n)).norm())
            .fold(0.0, f64::max)
    }

    fn prune(&mut self) {
        self.entries.retain(|_, c| c.norm() > PRUNE_THRESHOLD);
    }

    fn check_same_dim(&self, other: &FourierCoeffs) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn scale(&self, s: Complex64) -> FourierCoeffs {
        let mut out = self.clone();
        for c in out.entries.values_mut() {
            *c *= s;
        }
        out.prune();
        out
    }

    pub fn add(&self, other: &FourierCoeffs) -> Result<FourierCoeffs> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for (n, c) in &other.entries {
            *out.entries.entry(n.clone()).or_default() += c;
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &FourierCoeffs) -> Result<FourierCoeffs> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Coefficients of the pointwise complex conjugate: `n ↦ conj(f̂(−n))`.
    pub fn conj_symbol(&self) -> FourierCoeffs {
        let entries = self.entries.iter().map(|(n, c)| (-n, c.conj())).collect();
        FourierCoeffs {
            dim: self.dim,
            entries,
        }
    }

    /// Keeps the coefficients whose index satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(&GroupElement) -> bool) -> FourierCoeffs {
        let entries = self
            .entries
            .iter()
            .filter(|(n, _)| keep(n))
            .map(|(n, c)| (n.clone(), *c))
            .collect();
        FourierCoeffs {
            dim: self.dim,
            entries,
        }
    }

    /// Value at a point of the torus by direct summation.
    pub fn eval_at(&self, t: &[f64]) -> Complex64 {
        self.entries
            .iter()
            .map(|(n, c)| {
                let phase: f64 = n.coords().iter().zip(t).map(|(&k, &x)| k as f64 * x).sum();
                c * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoeffRepr {
    n: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolRepr {
    dim: usize,
    coeffs: Vec<CoeffRepr>,
}

impl TryFrom<SymbolRepr> for FourierCoeffs {
    type Error = Error;
    fn try_from(r: SymbolRepr) -> Result<Self> {
        FourierCoeffs::from_pairs(
            r.dim,
            r.coeffs
                .into_iter()
                .map(|c| (GroupElement::new(c.n), Complex64::new(c.re, c.im))),
        )
    }
}

impl Serialize for FourierCoeffs {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SymbolRepr {
            dim: self.dim,
            coeffs: self
                .entries
                .iter()
                .map(|(n, c)| CoeffRepr {
                    n: n.coords().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FourierCoeffs {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SymbolRepr::deserialize(d)?;
        FourierCoeffs::try_from(repr).map_err(serde::de::Error::custom)
    }
}

/// Uniform samples of a function on T^d at the points `2πk/N`.
///
/// Samples are stored row-major with axis 0 varying slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    dim: usize,
    size: usize,
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn at(&self, idx: &[usize]) -> Complex64 {
        let flat = idx.iter().fold(0, |acc, &k| acc * self.size + k);
        self.samples[flat]
    }

    /// Grid coordinates of the flat sample index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut rem = flat;
        let mut t = vec![0.0; self.dim];
        for axis in (0..self.dim).rev() {
            t[axis] = 2.0 * PI * (rem % self.size) as f64 / self.size as f64;
            rem /= self.size;
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn mean_abs_sq(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    /// Recovers the coefficients (inverse of [`eval_grid`] on alias-free grids).
    pub fn coefficients(&self) -> FourierCoeffs {
        let mut data = self.samples.clone();
        fft_nd(&mut data, self.dim, self.size, FftDirection::Forward);
        let scale = 1.0 / data.len() as f64;
        let n = self.size as i64;
        let half = (n - 1) / 2;
        let mut out = FourierCoeffs::zero(self.dim);
        for (flat, c) in data.iter().enumerate() {
            let mut rem = flat;
            let mut k = vec![0i64; self.dim];
            for axis in (0..self.dim).rev() {
                let j = (rem % self.size) as i64;
                k[axis] = if j <= half { j } else { j - n };
                rem /= self.size;
            }
            out.set(GroupElement::new(k), c * scale);
        }
        out
    }
}

/// In-place d-dimensional DFT along every axis (unnormalized).
fn fft_nd(data: &mut [Complex64], dim: usize, size: usize, direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(size, direction);
    let mut line = vec![Complex64::default(); size];
    for axis in 0..dim {
        let stride = size.pow((dim - 1 - axis) as u32);
        let block = stride * size;
        for start in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[base + j * stride];
                }
                fft.process(&mut line);
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
            }
        }
    }
}

/// Samples `f` on the uniform `N^d` grid.
pub fn eval_grid(f: &FourierCoeffs, n: usize) -> Result<GridFunction> {
    if !n.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "grid size {n} is not a power of two"
        )));
    }
    let degree = f.max_degree();
    if n as i64 <= 2 * degree {
        return Err(Error::Aliasing { size: n, degree });
    }
    let dim = f.dim();
    let mut data = vec![Complex64::default(); n.pow(dim as u32)];
    let wrap = |k: i64| k.rem_euclid(n as i64) as usize;
    for (idx, c) in f.iter() {
        let flat = idx.coords().iter().fold(0, |acc, &k| acc * n + wrap(k));
        data[flat] = *c;
    }
    fft_nd(&mut data, dim, n, FftDirection::Inverse);
    Ok(GridFunction {
        dim,
        size: n,
        samples: data,
    })
}

/// Grid size used for a sup-norm estimate of `f` at the given oversampling.
pub fn sup_grid_size(f: &FourierCoeffs, oversample: usize) -> usize {
    (oversample * (2 * f.max_degree() as usize + 1)).next_power_of_two()
}

/// Bracketing data for ‖f‖_∞.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupNormBracket {
    /// Max of |f| over the grid; a lower bound on ‖f‖_∞.
    pub grid_max: f64,
    /// Σ|f̂(n)|; an upper bound on ‖f‖_∞.
    pub l1_bound: f64,
    /// `grid_max` plus a Lipschitz correction for the grid spacing, capped by
    /// `l1_bound`; an upper bound on ‖f‖_∞.
    pub certified_upper: f64,
    pub grid_size: usize,
}

/// Brackets ‖f‖_∞ between a grid maximum and certified upper bounds.
pub fn sup_norm_estimate(f: &FourierCoeffs, oversample: usize) -> Result<SupNormBracket> {
    if oversample < 4 {
        return Err(Error::InvalidArgument("oversample must be at least 4".into()));
    }
    let size = sup_grid_size(f, oversample);
    let grid = eval_grid(f, size)?;
    let grid_max = grid.max_abs();
    let l1_bound = f.l1_norm();
    // Any point is within π/N of a grid node along each axis.
    let gradient_l1: f64 = f
        .iter()
        .map(|(n, c)| c.norm() * n.coords().iter().map(|k| k.abs() as f64).sum::<f64>())
        .sum();
    let certified_upper = (grid_max + PI / size as f64 * gradient_l1).min(l1_bound);
    Ok(SupNormBracket {
        grid_max,
        l1_bound,
        certified_upper,
        grid_size: size,
    })
}

/// `P₊` keeps X₊ (0 included), `P₋` keeps X₋.
pub fn project(f: &FourierCoeffs, spec: &OrderSpec, sign: Sign) -> Result<FourierCoeffs> {
    check_dim(f, spec)?;
    Ok(f.restrict(|n| sign.admits(spec, n)))
}

/// Harmonic conjugate: multiplier `−i·sgn(n)`, zero at 0.
pub fn conjugate_function(u: &FourierCoeffs, spec: &OrderSpec) -> Result<FourierCoeffs> {
    check_dim(u, spec)?;
    let minus_i = Complex64::new(0.0, -1.0);
    let mut out = FourierCoeffs::zero(u.dim());
    for (n, c) in u.iter() {
        let s = match spec.signum(n) {
            std::cmp::Ordering::Greater => 1.0,
            std::cmp::Ordering::Less => -1.0,
            std::cmp::Ordering::Equal => continue,
        };
        out.set(n.clone(), minus_i * s * c);
    }
    Ok(out)
}

/// `(Jf)(x) = f(x⁻¹)`: coefficient map `n ↦ f̂(−n)`.
pub fn flip(f: &FourierCoeffs) -> FourierCoeffs {
    let entries = f.entries.iter().map(|(n, c)| (-n, *c)).collect();
    FourierCoeffs { dim: f.dim, entries }
}

/// Sparse convolution on Z^d: `(ν∗f)(ξ) = Σ_χ ν(ξ−χ)·f(χ)`.
pub fn convolve(nu: &FourierCoeffs, f: &FourierCoeffs) -> Result<FourierCoeffs> {
    nu.check_same_dim(f)?;
    let mut out: BTreeMap<GroupElement, Complex64> = BTreeMap::new();
    for (m, a) in nu.iter() {
        for (n, b) in f.iter() {
            *out.entry(m + n).or_default() += a * b;
        }
    }
    let mut out = FourierCoeffs {
        dim: nu.dim,
        entries: out,
    };
    out.prune();
    Ok(out)
}

fn check_dim(f: &FourierCoeffs, spec: &OrderSpec) -> Result<()> {
    if f.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: f.dim(),
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algebra {
    /// Support in X₊.
    Hinf,
    /// Polynomials in χ̄₁: support in {−k·χ₁ : k ≥ 0}.
    Ce,
    /// `C_e·χ̄₁`: support in {−k·χ₁ : k ≥ 1}.
    K1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    /// First coefficient (in storage order) outside the required support.
    pub witness: Option<GroupElement>,
}

/// `k` with `n = −k·step`, if any.
fn negative_multiple(n: &GroupElement, step: &GroupElement) -> Option<i64> {
    let (axis, &s) = step.coords().iter().enumerate().find(|(_, &s)| s != 0)?;
    let x = n.coords()[axis];
    if x % s != 0 {
        return None;
    }
    let k = -x / s;
    (step.scale(-k) == *n).then_some(k)
}

/// Support test for H^∞, C_e and K₁; coefficients with |c| ≤ `tol` are ignored.
pub fn algebra_membership(
    f: &FourierCoeffs,
    spec: &OrderSpec,
    algebra: Algebra,
    tol: f64,
) -> Result<Membership> {
    check_dim(f, spec)?;
    let chi1 = match algebra {
        Algebra::Hinf => None,
        Algebra::Ce | Algebra::K1 => {
            Some(spec.smallest_positive_element().ok_or(Error::NoSmallestPositive)?)
        }
    };
    let allowed = |n: &GroupElement| match (algebra, &chi1) {
        (Algebra::Hinf, _) => !spec.is_negative(n),
        (Algebra::Ce, Some(c)) => negative_multiple(n, c).is_some_and(|k| k >= 0),
        (Algebra::K1, Some(c)) => negative_multiple(n, c).is_some_and(|k| k >= 1),
        _ => unreachable!(),
    };
    let witness = f
        .iter()
        .find(|(n, c)| c.norm() > tol && !allowed(n))
        .map(|(n, _)| n.clone());
    Ok(Membership {
        member: witness.is_none(),
        witness,
    })
}
