//! Bounded extensions of Hankel data and the resulting norm brackets.
//!
//! The norm of Γ with data `a` on X₊ equals the least sup-norm of a symbol ψ
//! with `ψ̂|X₊ = a`. We search a finite family of such symbols (free
//! coefficients on X₋ ∩ box(D)) and bracket the norm between σ₁ of a
//! truncation and the sup-norm of the best symbol found.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{
    conjugate_function, eval_grid, project, sup_norm_estimate, FourierCoeffs,
    PRUNE_THRESHOLD,
};
use crate::operators::hankel_matrix;
use crate::ordered_group::{cone_slab, GroupElement, OrderSpec, Sign};
use crate::spectral::{singular_values, SvdOptions};

/// Sweep-to-sweep improvement below which the descent counts as converged.
pub const DESCENT_TOL: f64 = 1e-8;
/// Allowed excess of the lower bound over the upper bound.
pub const BRACKET_SLACK: f64 = 1e-8;
/// Residual tolerance for the conjugate-function decompositions.
pub const IDENTITY_TOL: f64 = 1e-12;

const GOLDEN_STEPS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionOptions {
    /// Free coefficients live on X₋ ∩ [−D, D]^d.
    pub free_degree: i64,
    /// Maximum number of full coordinate sweeps.
    pub budget: usize,
    /// Grid oversampling used inside the descent.
    pub oversample: usize,
    /// Grid oversampling for the reported upper bound.
    pub final_oversample: usize,
    /// Box radius of the Hankel truncation giving the lower bound; defaults
    /// to the degree of the data.
    pub slab_radius: Option<i64>,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        ExtensionOptions {
            free_degree: 8,
            budget: 500,
            oversample: 8,
            final_oversample: 32,
            slab_radius: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeCoeff {
    pub n: GroupElement,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionResult {
    /// The extension: `a` on X₊ plus the free coefficients on X₋.
    pub psi: FourierCoeffs,
    /// Every free coefficient, including those left at zero.
    pub free: Vec<FreeCoeff>,
    /// Grid maximum of |ψ| on the final grid (lower bound on ‖ψ‖_∞).
    pub upper: f64,
    /// Grid maximum plus grid-spacing correction (certified bound on ‖ψ‖_∞).
    pub upper_certified: f64,
    /// Σ|ψ̂(n)| (certified bound on ‖ψ‖_∞).
    pub upper_l1: f64,
    /// σ₁ of the Hankel truncation (lower bound on ‖Γ‖).
    pub lower: f64,
    pub gap: f64,
    /// ‖a‖₁, the bound obtained with no free part at all.
    pub l1_ceiling: f64,
    pub slab_radius: i64,
    pub iterations: usize,
    pub converged: bool,
    /// `lower ≤ upper + BRACKET_SLACK`.
    pub bracket_valid: bool,
    /// Grid sup-norm after each sweep, starting with the initial value.
    pub objective_history: Vec<f64>,
}

/// Samples of the objective landscape shared by all coordinate updates.
struct Descent {
    values: Vec<Complex64>,
    basis: Vec<Vec<Complex64>>,
    coeffs: Vec<Complex64>,
}

impl Descent {
    fn objective(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Sup-norm if coefficient `j` moved by `delta`.
    fn objective_moved(&self, j: usize, delta: Complex64) -> f64 {
        self.values
            .iter()
            .zip(&self.basis[j])
            .map(|(v, e)| (v + delta * e).norm())
            .fold(0.0, f64::max)
    }

    fn commit(&mut self, j: usize, delta: Complex64) {
        for (v, e) in self.values.iter_mut().zip(&self.basis[j]) {
            *v += delta * e;
        }
        self.coeffs[j] += delta;
    }

    /// Golden-section search on one real direction of coefficient `j`.
    ///
    /// The objective is convex along the line and any improving coefficient
    /// has modulus at most the current sup-norm, so `[−f, f]` brackets the
    /// minimizer.
    fn line_search(&mut self, j: usize, direction: Complex64) -> bool {
        let current = self.objective();
        let start = if direction.re != 0.0 {
            self.coeffs[j].re
        } else {
            self.coeffs[j].im
        };
        let at = |x: f64| self.objective_moved(j, direction * (x - start));
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let (mut lo, mut hi) = (-current, current);
        let mut x1 = hi - ratio * (hi - lo);
        let mut x2 = lo + ratio * (hi - lo);
        let mut f1 = at(x1);
        let mut f2 = at(x2);
        for _ in 0..GOLDEN_STEPS {
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - ratio * (hi - lo);
                f1 = at(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + ratio * (hi - lo);
                f2 = at(x2);
            }
        }
        let best = 0.5 * (lo + hi);
        if at(best) < current {
            self.commit(j, direction * (best - start));
            true
        } else {
            false
        }
    }
}

fn require_cone_support(a: &FourierCoeffs, spec: &OrderSpec) -> Result<()> {
    if a.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: a.dim(),
        });
    }
    if let Some((n, c)) = a.iter().find(|(n, c)| spec.is_negative(n) && c.norm() > PRUNE_THRESHOLD) {
        return Err(Error::SupportOutsideCone {
            at: n.clone(),
            value: c.norm(),
        });
    }
    Ok(())
}

fn truncation_norm(a: &FourierCoeffs, spec: &OrderSpec, radius: i64) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    let m = hankel_matrix(a, &cone_slab(spec, Sign::Positive, radius)?)?;
    Ok(singular_values(&m, 1, false, &SvdOptions::default())?.top[0])
}

/// Minimizes the grid sup-norm of `a + Σ c_n e_n` over the free coefficients
/// by cyclic coordinate descent, real and imaginary parts in turn.
pub fn extension_upper_bound(
    a: &FourierCoeffs,
    spec: &OrderSpec,
    opts: &ExtensionOptions,
) -> Result<ExtensionResult> {
    require_cone_support(a, spec)?;
    if opts.free_degree < 0 {
        return Err(Error::InvalidArgument("free degree must be non-negative".into()));
    }
    if opts.oversample < 4 || opts.final_oversample < 4 {
        return Err(Error::InvalidArgument("oversample must be at least 4".into()));
    }

    // Nearest to 0 first.
    let mut free: Vec<GroupElement> = if opts.free_degree >= 1 {
        cone_slab(spec, Sign::Negative, opts.free_degree)?.elements().to_vec()
    } else {
        Vec::new()
    };
    free.reverse();

    let degree = a.max_degree().max(opts.free_degree);
    let size = (opts.oversample * (2 * degree as usize + 1)).next_power_of_two();
    let base = eval_grid(a, size)?;
    let basis = free
        .iter()
        .map(|n| {
            eval_grid(&FourierCoeffs::delta(n.clone(), Complex64::new(1.0, 0.0)), size)
                .map(|g| g.samples().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut descent = Descent {
        values: base.samples().to_vec(),
        basis,
        coeffs: vec![Complex64::default(); free.len()],
    };

    let mut history = vec![descent.objective()];
    let mut iterations = 0;
    let mut converged = free.is_empty();
    while !converged && iterations < opts.budget {
        for j in 0..free.len() {
            descent.line_search(j, Complex64::new(1.0, 0.0));
            descent.line_search(j, Complex64::new(0.0, 1.0));
        }
        iterations += 1;
        let obj = descent.objective();
        let prev = *history.last().unwrap();
        history.push(obj);
        if prev - obj < DESCENT_TOL {
            converged = true;
        }
    }

    let mut psi = a.clone();
    for (n, c) in free.iter().zip(&descent.coeffs) {
        psi.set(n.clone(), *c);
    }
    let bracket = sup_norm_estimate(&psi, opts.final_oversample)?;
    let slab_radius = opts.slab_radius.unwrap_or(a.max_degree()).max(1);
    let lower = truncation_norm(a, spec, slab_radius)?;
    let upper = bracket.grid_max;

    Ok(ExtensionResult {
        free: free
            .iter()
            .zip(&descent.coeffs)
            .map(|(n, c)| FreeCoeff {
                n: n.clone(),
                re: c.re,
                im: c.im,
            })
            .collect(),
        psi,
        upper,
        upper_certified: bracket.certified_upper,
        upper_l1: bracket.l1_bound,
        lower,
        gap: upper - lower,
        l1_ceiling: a.l1_norm(),
        slab_radius,
        iterations,
        converged,
        bracket_valid: lower <= upper + BRACKET_SLACK,
        objective_history: history,
    })
}

/// Lower bound from the Hankel truncation on `box(slab_radius)`, upper
/// bound from the descent with free degree `free_degree`.
pub fn nehari_gap(
    a: &FourierCoeffs,
    spec: &OrderSpec,
    slab_radius: i64,
    free_degree: i64,
    budget: usize,
) -> Result<ExtensionResult> {
    let opts = ExtensionOptions {
        free_degree,
        budget,
        slab_radius: Some(slab_radius),
        ..ExtensionOptions::default()
    };
    extension_upper_bound(a, spec, &opts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// P₊ψ = f + g̃ with f = (ψ + ψ̂(0))/2, g = iψ/2.
    Plus,
    /// P₋ψ = f + g̃ with f = (ψ − ψ̂(0))/2, g = −iψ/2.
    Minus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BmoDecomposition {
    pub target: Target,
    pub f: FourierCoeffs,
    pub g: FourierCoeffs,
    /// Largest coefficient of `P±ψ − f − g̃`.
    pub residual: f64,
    /// Sum of the grid sup-norm estimates of f and g.
    pub norm_bound_grid: f64,
    /// Sum of the ℓ¹ bounds of f and g (certified).
    pub norm_bound_l1: f64,
}

/// Writes `P₊ψ` or `P₋ψ` as `f + g̃` with f, g bounded multiples of ψ.
pub fn bmo_decomposition(psi: &FourierCoeffs, spec: &OrderSpec, target: Target) -> Result<BmoDecomposition> {
    let half = Complex64::new(0.5, 0.0);
    let mean = FourierCoeffs::delta(GroupElement::zero(psi.dim()), psi.mean());
    let (f, g, projected) = match target {
        Target::Plus => (
            psi.add(&mean)?.scale(half),
            psi.scale(Complex64::new(0.0, 0.5)),
            project(psi, spec, Sign::Positive)?,
        ),
        Target::Minus => (
            psi.sub(&mean)?.scale(half),
            psi.scale(Complex64::new(0.0, -0.5)),
            project(psi, spec, Sign::Negative)?,
        ),
    };
    let g_conj = conjugate_function(&g, spec)?;
    let residual = projected.max_abs_diff(&f.add(&g_conj)?);
    let fb = sup_norm_estimate(&f, 8)?;
    let gb = sup_norm_estimate(&g, 8)?;
    Ok(BmoDecomposition {
        target,
        f,
        g,
        residual,
        norm_bound_grid: fb.grid_max + gb.grid_max,
        norm_bound_l1: fb.l1_bound + gb.l1_bound,
    })
}
