//! Singular values of operator truncations and the studies built on them.
//!
//! Truncations on nested box slabs are nested compressions, so σ₁ is
//! non-decreasing in the radius and bounded by the ℓ¹ norm of the symbol.
//! Compactness and Fredholm properties are infinite-dimensional; the reports
//! keep the exact support predicate and the numerical trend in separate
//! fields.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{algebra_membership, project, Algebra, FourierCoeffs, PRUNE_THRESHOLD};
use crate::io::fmt_f64;
use crate::operators::{
    gamma_psi_matrix, hankel_matrix, hphi_matrix, reindex_lemma2, toeplitz_matrix, OperatorMatrix,
};
use crate::ordered_group::{cone_slab, GroupElement, OrderSpec, Sign};

/// Slack allowed in σ₁ monotonicity and ℓ¹-ceiling checks.
pub const NORM_SLACK: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvdOptions {
    /// Matrices whose smaller dimension exceeds this use subspace iteration.
    pub dense_cutoff: usize,
    pub rel_tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SvdOptions {
    fn default() -> Self {
        SvdOptions {
            dense_cutoff: 1024,
            rel_tol: 1e-10,
            max_iter: 10_000,
            seed: 42,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SvdMethod {
    Dense,
    SubspaceIteration,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularValues {
    /// Largest singular values, descending.
    pub top: Vec<f64>,
    /// Smallest of the min(rows, cols) singular values, if requested.
    pub min: Option<f64>,
    pub method: SvdMethod,
}

fn is_real(m: &DMatrix<Complex64>) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

fn dense_singular_values(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let mut sv: Vec<f64> = if is_real(m) {
        let re = m.map(|z| z.re);
        nalgebra::linalg::SVD::try_new(re, false, false, f64::EPSILON, 0)
            .ok_or_else(|| non_convergence("dense SVD", 0))?
            .singular_values
            .iter()
            .copied()
            .collect()
    } else {
        nalgebra::linalg::SVD::try_new(m.clone(), false, false, f64::EPSILON, 0)
            .ok_or_else(|| non_convergence("dense SVD", 0))?
            .singular_values
            .iter()
            .copied()
            .collect()
    };
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

fn non_convergence(what: &str, iterations: usize) -> Error {
    Error::NonConvergence {
        what: what.into(),
        iterations,
    }
}

/// Orthonormalizes the columns in place (modified Gram-Schmidt, two passes).
fn orthonormalize(x: &mut DMatrix<Complex64>) {
    for j in 0..x.ncols() {
        for _ in 0..2 {
            for i in 0..j {
                let proj = x.column(i).dotc(&x.column(j));
                let qi = x.column(i).clone_owned();
                let mut cj = x.column_mut(j);
                cj -= qi * proj;
            }
        }
        let norm = x.column(j).norm();
        if norm > 0.0 {
            x.column_mut(j).unscale_mut(norm);
        }
    }
}

fn random_block(n: usize, p: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(n, p, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Top-k singular values of `m` by block subspace iteration on `m* m`.
fn subspace_top(m: &DMatrix<Complex64>, k: usize, opts: &SvdOptions) -> Result<Vec<f64>> {
    let n = m.ncols();
    let p = (k + 5).min(n);
    let mut x = random_block(n, p, opts.seed);
    orthonormalize(&mut x);
    let mut prev: Option<Vec<f64>> = None;
    for it in 1..=opts.max_iter {
        let y = m * &x;
        // Rayleigh-Ritz on span(x): eigenvalues of (mx)*(mx).
        let small = y.adjoint() * &y;
        let eig = nalgebra::linalg::SymmetricEigen::try_new(small, f64::EPSILON, 0)
            .ok_or_else(|| non_convergence("Rayleigh-Ritz eigensolver", it))?;
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let sigma: Vec<f64> = order[..k]
            .iter()
            .map(|&i| eig.eigenvalues[i].max(0.0).sqrt())
            .collect();
        let rotated = &x * &eig.eigenvectors;
        x = DMatrix::from_fn(n, p, |r, c| rotated[(r, order[c])]);

        if let Some(prev) = &prev {
            let scale = sigma[0].max(f64::MIN_POSITIVE);
            if sigma
                .iter()
                .zip(prev)
                .all(|(s, q)| (s - q).abs() <= opts.rel_tol * scale)
            {
                return Ok(sigma);
            }
        }
        prev = Some(sigma);
        x = m.adjoint() * (m * &x);
        orthonormalize(&mut x);
    }
    Err(non_convergence("subspace iteration", opts.max_iter))
}

/// Smallest singular value by power iteration on `σ₁²·I − m* m`.
fn power_min(m: &DMatrix<Complex64>, sigma1: f64, opts: &SvdOptions) -> Result<f64> {
    let n = m.ncols();
    let shift = sigma1 * sigma1;
    let mut v: DVector<Complex64> = random_block(n, 1, opts.seed).column(0).clone_owned();
    v.unscale_mut(v.norm());
    let mut prev = f64::NAN;
    for _ in 0..opts.max_iter {
        let w = &v * Complex64::new(shift, 0.0) - m.adjoint() * (m * &v);
        let lambda = v.dotc(&w).re;
        let norm = w.norm();
        if norm == 0.0 {
            return Ok(sigma1);
        }
        v = w.unscale(norm);
        if (lambda - prev).abs() <= opts.rel_tol * shift {
            return Ok((shift - lambda).max(0.0).sqrt());
        }
        prev = lambda;
    }
    Err(non_convergence("smallest singular value", opts.max_iter))
}

/// Top-k singular values (descending) and optionally the smallest one.
pub fn singular_values(
    m: &OperatorMatrix,
    k: usize,
    include_min: bool,
    opts: &SvdOptions,
) -> Result<SingularValues> {
    let (rows, cols) = m.shape();
    let min_dim = rows.min(cols);
    if min_dim == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    if k > min_dim {
        return Err(Error::InvalidArgument(format!(
            "requested {k} singular values of a {rows}x{cols} matrix"
        )));
    }
    if min_dim <= opts.dense_cutoff {
        let sv = dense_singular_values(m.data())?;
        return Ok(SingularValues {
            top: sv[..k].to_vec(),
            min: include_min.then(|| sv[min_dim - 1]),
            method: SvdMethod::Dense,
        });
    }
    // Iterate on the Gram matrix of the shorter side.
    let data = if cols > rows {
        m.data().adjoint()
    } else {
        m.data().clone()
    };
    let top = subspace_top(&data, k.max(1), opts)?;
    let min = if include_min {
        Some(power_min(&data, top[0], opts)?)
    } else {
        None
    };
    Ok(SingularValues {
        top: top[..k].to_vec(),
        min,
        method: SvdMethod::SubspaceIteration,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    /// Γ with Hankel data `a` on X₊.
    Hankel,
    Hphi,
    Toeplitz,
    GammaPsi,
}

/// Truncation of the operator of `kind` on the box of the given radius.
pub fn build_truncation(
    symbol: &FourierCoeffs,
    kind: StudyKind,
    spec: &OrderSpec,
    radius: i64,
) -> Result<OperatorMatrix> {
    match kind {
        StudyKind::Hphi => hphi_matrix(symbol, spec, radius),
        StudyKind::Hankel => hankel_matrix(symbol, &cone_slab(spec, Sign::Positive, radius)?),
        StudyKind::Toeplitz => toeplitz_matrix(symbol, &cone_slab(spec, Sign::Positive, radius)?),
        StudyKind::GammaPsi => gamma_psi_matrix(symbol, &cone_slab(spec, Sign::Positive, radius)?),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub radius: i64,
    pub rows: usize,
    pub cols: usize,
    /// σ₁ ≥ σ₂ ≥ …, at most the requested count.
    pub sigma: Vec<f64>,
    pub sigma_min: Option<f64>,
    pub method: SvdMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompactnessEvidence {
    Decaying,
    NonDecaying,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FredholmEvidence {
    SigmaMinVanishing,
    Inconclusive,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    /// σ₁ non-decreasing across radii within [`NORM_SLACK`].
    pub sigma1_monotone: bool,
    /// Every σ₁ is at most the ℓ¹ norm of the symbol plus [`NORM_SLACK`].
    pub l1_ceiling_respected: bool,
    /// Numerical trend of σ_k across radii.
    pub compactness_evidence: Option<CompactnessEvidence>,
    /// Number of σ_k ≥ plateau ratio · σ₁, per radius.
    pub plateau_counts: Option<Vec<usize>>,
    /// Exact support criterion: P₋ν ∈ K₁.
    pub predicted_compact: Option<bool>,
    /// First coefficient breaking the K₁ support criterion.
    pub k1_witness: Option<GroupElement>,
    pub fredholm_evidence: Option<FredholmEvidence>,
    /// Tail norms at the end of the slab fall below 10% of the first one.
    pub tails_vanishing: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailNorm {
    pub chi: GroupElement,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub study: String,
    pub symbol: String,
    pub kind: StudyKind,
    pub order: OrderSpec,
    pub radii: Vec<i64>,
    pub l1_bound: f64,
    pub rows: Vec<StudyRow>,
    pub verdicts: Verdicts,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tail_norms: Vec<TailNorm>,
}

impl StudyReport {
    pub fn sigma1(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.sigma.first().copied().unwrap_or(0.0))
            .collect()
    }

    /// One row per radius: `radius, sigma_1..sigma_K, sigma_min`.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let k = self.rows.iter().map(|r| r.sigma.len()).max().unwrap_or(0);
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["radius".to_string()];
        header.extend((1..=k).map(|i| format!("sigma_{i}")));
        header.push("sigma_min".into());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![row.radius.to_string()];
            rec.extend((0..k).map(|i| row.sigma.get(i).map(|&s| fmt_f64(s)).unwrap_or_default()));
            rec.push(row.sigma_min.map(fmt_f64).unwrap_or_default());
            w.write_record(&rec)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut v = serde_json::to_vec_pretty(self)?;
        v.push(b'\n');
        Ok(v)
    }

    /// Gnuplot script plotting every σ column of `csv_name` against radius.
    pub fn gnuplot_script(&self, csv_name: &str) -> String {
        let k = self.rows.iter().map(|r| r.sigma.len()).max().unwrap_or(0);
        let mut s = String::new();
        s.push_str("set datafile separator ','\n");
        s.push_str("set key autotitle columnhead\n");
        s.push_str("set xlabel 'box radius'\nset ylabel 'singular value'\n");
        s.push_str("set logscale y\n");
        s.push_str(&format!("set title '{} {}'\n", self.study, self.symbol));
        let mut plots: Vec<String> = (2..=k + 1)
            .map(|c| format!("'{csv_name}' using 1:{c} with linespoints"))
            .collect();
        if self.rows.iter().any(|r| r.sigma_min.is_some()) {
            plots.push(format!("'{csv_name}' using 1:{} with linespoints", k + 2));
        }
        s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyOptions {
    /// Number of leading singular values per radius.
    pub k: usize,
    pub include_min: bool,
    pub svd: SvdOptions,
    /// σ_k ≥ ratio·σ₁ counts as part of a plateau.
    pub plateau_ratio: f64,
    /// σ_min < threshold·σ₁ at the largest radius counts as vanishing.
    pub fredholm_threshold: f64,
    /// Coefficients at or below this are ignored by support predicates.
    pub support_tol: f64,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions {
            k: 10,
            include_min: false,
            svd: SvdOptions::default(),
            plateau_ratio: 0.5,
            fredholm_threshold: 0.1,
            support_tol: PRUNE_THRESHOLD,
        }
    }
}

fn check_radii(radii: &[i64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidArgument("radii: empty list".into()));
    }
    if radii[0] < 1 {
        return Err(Error::InvalidArgument("radii: must be positive".into()));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("radii: must be strictly increasing".into()));
    }
    Ok(())
}

fn study_row(m: &OperatorMatrix, radius: i64, opts: &StudyOptions) -> Result<StudyRow> {
    let (rows, cols) = m.shape();
    let k = opts.k.min(rows.min(cols));
    let sv = singular_values(m, k, opts.include_min, &opts.svd)?;
    Ok(StudyRow {
        radius,
        rows,
        cols,
        sigma: sv.top,
        sigma_min: sv.min,
        method: sv.method,
    })
}

#[cfg(feature = "parallel")]
fn map_radii<T: Send>(radii: &[i64], f: impl Fn(i64) -> Result<T> + Sync) -> Result<Vec<T>> {
    use rayon::prelude::*;
    radii.par_iter().map(|&r| f(r)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_radii<T>(radii: &[i64], f: impl Fn(i64) -> Result<T>) -> Result<Vec<T>> {
    radii.iter().map(|&r| f(r)).collect()
}

fn base_verdicts(rows: &[StudyRow], l1_bound: f64) -> Verdicts {
    let sigma1: Vec<f64> = rows
        .iter()
        .map(|r| r.sigma.first().copied().unwrap_or(0.0))
        .collect();
    Verdicts {
        sigma1_monotone: sigma1.windows(2).all(|w| w[1] + NORM_SLACK >= w[0]),
        l1_ceiling_respected: sigma1.iter().all(|&s| s <= l1_bound + NORM_SLACK),
        ..Verdicts::default()
    }
}

/// Tabulates σ₁ (and the next k−1 values) over growing truncations and
/// checks monotonicity and the ℓ¹ ceiling.
///
/// A violated monotonicity or ceiling is reported as [`Error::Invariant`].
pub fn norm_convergence_study(
    symbol: &FourierCoeffs,
    symbol_name: &str,
    kind: StudyKind,
    spec: &OrderSpec,
    radii: &[i64],
    opts: &StudyOptions,
) -> Result<StudyReport> {
    check_radii(radii)?;
    let rows = map_radii(radii, |r| {
        study_row(&build_truncation(symbol, kind, spec, r)?, r, opts)
    })?;
    let l1_bound = symbol.l1_norm();
    let verdicts = base_verdicts(&rows, l1_bound);
    if !verdicts.sigma1_monotone {
        return Err(Error::Invariant("σ₁ decreased between nested truncations".into()));
    }
    if !verdicts.l1_ceiling_respected {
        return Err(Error::Invariant("σ₁ exceeds the ℓ¹ norm of the symbol".into()));
    }
    Ok(StudyReport {
        study: "norms".into(),
        symbol: symbol_name.into(),
        kind,
        order: spec.clone(),
        radii: radii.to_vec(),
        l1_bound,
        rows,
        verdicts,
        tail_norms: Vec::new(),
    })
}

/// Exact K₁ support prediction for H_ν next to the singular-value trend.
///
/// Without a smallest positive element only the zero operator is compact,
/// so the prediction is `P₋ν = 0`.
pub fn compactness_verdict(
    nu: &FourierCoeffs,
    symbol_name: &str,
    spec: &OrderSpec,
    radii: &[i64],
    opts: &StudyOptions,
) -> Result<StudyReport> {
    check_radii(radii)?;
    let minus = project(nu, spec, Sign::Negative)?;
    let (predicted, witness) = if spec.smallest_positive_element().is_some() {
        let m = algebra_membership(&minus, spec, Algebra::K1, opts.support_tol)?;
        (m.member, m.witness)
    } else {
        let w = minus
            .iter()
            .find(|(_, c)| c.norm() > opts.support_tol)
            .map(|(n, _)| n.clone());
        (w.is_none(), w)
    };

    let rows = map_radii(radii, |r| {
        study_row(&hphi_matrix(nu, spec, r)?, r, opts)
    })?;
    let l1_bound = nu.l1_norm();
    let mut verdicts = base_verdicts(&rows, l1_bound);

    let counts: Vec<usize> = rows
        .iter()
        .map(|row| {
            let s1 = row.sigma.first().copied().unwrap_or(0.0);
            if s1 <= PRUNE_THRESHOLD {
                0
            } else {
                row.sigma.iter().filter(|&&s| s >= opts.plateau_ratio * s1).count()
            }
        })
        .collect();
    let last = rows.last().expect("radii checked non-empty");
    let depth_reached = last.sigma.len() >= 2
        && last.sigma[0] > PRUNE_THRESHOLD
        && *last.sigma.last().unwrap() >= opts.plateau_ratio * last.sigma[0];
    let growing = counts.windows(2).any(|w| w[1] > w[0]) && counts.last() > counts.first();
    verdicts.compactness_evidence = Some(if growing || depth_reached {
        CompactnessEvidence::NonDecaying
    } else {
        CompactnessEvidence::Decaying
    });
    verdicts.plateau_counts = Some(counts);
    verdicts.predicted_compact = Some(predicted);
    verdicts.k1_witness = witness;

    Ok(StudyReport {
        study: "compactness".into(),
        symbol: symbol_name.into(),
        kind: StudyKind::Hphi,
        order: spec.clone(),
        radii: radii.to_vec(),
        l1_bound,
        rows,
        verdicts,
        tail_norms: Vec::new(),
    })
}

/// Where the square Hankel truncations of a Fredholm study come from.
#[derive(Clone, Debug, PartialEq)]
pub enum HankelSource {
    /// Hankel data `a` on X₊.
    Data(FourierCoeffs),
    /// A symbol φ; truncations are re-indexed H_φ sections.
    Symbol(FourierCoeffs),
}

impl HankelSource {
    fn square_truncation(&self, spec: &OrderSpec, radius: i64) -> Result<OperatorMatrix> {
        match self {
            HankelSource::Data(a) => hankel_matrix(a, &cone_slab(spec, Sign::Positive, radius)?),
            HankelSource::Symbol(phi) => reindex_lemma2(&hphi_matrix(phi, spec, radius)?, spec),
        }
    }

    fn coefficients(&self) -> &FourierCoeffs {
        match self {
            HankelSource::Data(a) | HankelSource::Symbol(a) => a,
        }
    }
}

/// σ_min of square Hankel truncations and the column tail norms
/// `t(χ) = ‖Γ e_χ‖` over the largest slab.
pub fn fredholm_evidence(
    source: &HankelSource,
    symbol_name: &str,
    spec: &OrderSpec,
    radii: &[i64],
    opts: &StudyOptions,
) -> Result<StudyReport> {
    check_radii(radii)?;
    if source.coefficients().is_empty() {
        return Err(Error::InvalidArgument("symbol is zero".into()));
    }
    let opts = StudyOptions {
        include_min: true,
        ..opts.clone()
    };
    let rows = map_radii(radii, |r| {
        study_row(&source.square_truncation(spec, r)?, r, &opts)
    })?;

    let largest = source.square_truncation(spec, *radii.last().unwrap())?;
    let tail_norms: Vec<TailNorm> = largest
        .cols()
        .elements()
        .iter()
        .enumerate()
        .map(|(j, chi)| TailNorm {
            chi: chi.clone(),
            norm: largest.data().column(j).norm(),
        })
        .collect();

    let l1_bound = source.coefficients().l1_norm();
    let mut verdicts = base_verdicts(&rows, l1_bound);
    let last = rows.last().unwrap();
    let s1 = last.sigma.first().copied().unwrap_or(0.0);
    let smin = last.sigma_min.unwrap_or(f64::INFINITY);
    verdicts.fredholm_evidence = Some(if smin < opts.fredholm_threshold * s1 {
        FredholmEvidence::SigmaMinVanishing
    } else {
        FredholmEvidence::Inconclusive
    });
    if let (Some(first), Some(end)) = (tail_norms.first(), tail_norms.last()) {
        verdicts.tails_vanishing = Some(end.norm < 0.1 * first.norm);
    }

    Ok(StudyReport {
        study: "fredholm".into(),
        symbol: symbol_name.into(),
        kind: StudyKind::Hankel,
        order: spec.clone(),
        radii: radii.to_vec(),
        l1_bound,
        rows,
        verdicts,
        tail_norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::OperatorKind;
    use crate::ordered_group::ConeSlab;
    use approx::assert_abs_diff_eq;

    fn g<const N: usize>(v: [i64; N]) -> GroupElement {
        GroupElement::from(v)
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn hilbert_data(n: i64) -> FourierCoeffs {
        FourierCoeffs::from_pairs(1, (0..=2 * n).map(|k| (g([k]), c(1.0 / (k + 1) as f64)))).unwrap()
    }

    #[test]
    fn identity_singular_values() {
        let spec = OrderSpec::lex(1).unwrap();
        let slab = cone_slab(&spec, Sign::Positive, 4).unwrap();
        let id = toeplitz_matrix(&FourierCoeffs::delta(g([0]), c(1.0)), &slab).unwrap();
        let sv = singular_values(&id, 5, true, &SvdOptions::default()).unwrap();
        assert_eq!(sv.top.len(), 5);
        for s in &sv.top {
            assert_abs_diff_eq!(*s, 1.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(sv.min.unwrap(), 1.0, epsilon = 1e-14);
        assert!(singular_values(&id, 6, false, &SvdOptions::default()).is_err());
    }

    #[test]
    fn rank_one_hphi() {
        let spec = OrderSpec::lex(1).unwrap();
        let m = hphi_matrix(&FourierCoeffs::delta(g([-1]), c(1.0)), &spec, 3).unwrap();
        let sv = singular_values(&m, 2, false, &SvdOptions::default()).unwrap();
        assert_abs_diff_eq!(sv.top[0], 1.0, epsilon = 1e-14);
        assert!(sv.top[1] < 1e-12);
    }

    /// σ₁ of the Hilbert matrix [1/(i+j+1)], independently computed by power
    /// iteration on H² (H is symmetric positive definite).
    fn hilbert_norm_oracle(n: usize) -> f64 {
        let h = DMatrix::from_fn(n, n, |i, j| 1.0 / (i + j + 1) as f64);
        let mut v = DVector::from_element(n, 1.0);
        let mut lambda = 0.0;
        for _ in 0..2000 {
            let w = &h * &v;
            lambda = w.norm();
            v = w / lambda;
        }
        lambda
    }

    #[test]
    fn hilbert_hankel_norm_at_256() {
        let spec = OrderSpec::lex(1).unwrap();
        let slab = cone_slab(&spec, Sign::Positive, 255).unwrap();
        let m = hankel_matrix(&hilbert_data(255), &slab).unwrap();
        let sv = singular_values(&m, 1, false, &SvdOptions::default()).unwrap();
        let oracle = hilbert_norm_oracle(256);
        assert_abs_diff_eq!(sv.top[0], oracle, epsilon = 1e-9);
        assert_abs_diff_eq!(sv.top[0], 2.3038089954245757, epsilon = 1e-9);
    }

    #[test]
    fn subspace_iteration_matches_dense() {
        let spec = OrderSpec::lex(1).unwrap();
        let rows = cone_slab(&spec, Sign::Positive, 39).unwrap();
        let cols = cone_slab(&spec, Sign::Positive, 44).unwrap();
        // Singular values 1 − 0.02·i mixed by seeded random isometries.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut u = DMatrix::from_fn(40, 40, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let mut v = DMatrix::from_fn(45, 40, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        orthonormalize(&mut u);
        orthonormalize(&mut v);
        let d = DMatrix::from_fn(40, 40, |i, j| if i == j { c(1.0 - 0.02 * i as f64) } else { c(0.0) });
        let data = &u * d * v.adjoint();
        let m = OperatorMatrix::new(OperatorKind::Other, "test", rows, cols, data).unwrap();
        let dense = singular_values(&m, 6, true, &SvdOptions::default()).unwrap();
        let opts = SvdOptions {
            dense_cutoff: 8,
            ..SvdOptions::default()
        };
        let iter = singular_values(&m, 6, true, &opts).unwrap();
        assert_eq!(iter.method, SvdMethod::SubspaceIteration);
        for (a, b) in dense.top.iter().zip(&iter.top) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
        assert_abs_diff_eq!(dense.min.unwrap(), iter.min.unwrap(), epsilon = 1e-6);

        let strict = SvdOptions {
            dense_cutoff: 8,
            max_iter: 2,
            ..SvdOptions::default()
        };
        assert!(matches!(
            singular_values(&m, 6, false, &strict),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn norm_study_examples() {
        let spec = OrderSpec::lex(1).unwrap();
        let opts = StudyOptions {
            k: 2,
            ..StudyOptions::default()
        };
        let delta = FourierCoeffs::delta(g([-1]), c(1.0));
        let r = norm_convergence_study(&delta, "delta", StudyKind::Hphi, &spec, &[1, 2, 5], &opts).unwrap();
        for s in r.sigma1() {
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-14);
        }

        let phi = FourierCoeffs::from_pairs(
            1,
            vec![(g([-1]), c(0.4)), (g([-3]), Complex64::new(0.0, -0.2)), (g([2]), c(0.1))],
        )
        .unwrap();
        assert_abs_diff_eq!(phi.l1_norm(), 0.7, epsilon = 1e-15);
        let r = norm_convergence_study(&phi, "phi", StudyKind::Hphi, &spec, &[2, 4, 8], &opts).unwrap();
        assert!(r.sigma1().iter().all(|&s| s <= 0.7));

        assert!(norm_convergence_study(&phi, "phi", StudyKind::Hphi, &spec, &[8, 4], &opts).is_err());
    }

    #[test]
    fn hilbert_norm_strictly_increasing() {
        let spec = OrderSpec::lex(1).unwrap();
        let opts = StudyOptions {
            k: 1,
            ..StudyOptions::default()
        };
        let a = hilbert_data(128);
        let r = norm_convergence_study(&a, "hilbert", StudyKind::Hankel, &spec, &[31, 63, 127], &opts).unwrap();
        let s = r.sigma1();
        assert!(s.windows(2).all(|w| w[1] > w[0]));
        assert!(s.iter().all(|&x| x < std::f64::consts::PI + 1e-9));
    }

    #[test]
    fn compactness_on_axis_rank_one() {
        let spec = OrderSpec::lex(2).unwrap();
        let nu = FourierCoeffs::delta(g([0, -1]), c(1.0));
        let opts = StudyOptions {
            k: 3,
            ..StudyOptions::default()
        };
        let r = compactness_verdict(&nu, "axis", &spec, &[2, 4, 6], &opts).unwrap();
        assert_eq!(r.verdicts.predicted_compact, Some(true));
        assert_eq!(r.verdicts.compactness_evidence, Some(CompactnessEvidence::Decaying));
        for row in &r.rows {
            assert!(row.sigma[1] < 1e-12);
        }
    }

    #[test]
    fn compactness_off_axis_plateau() {
        let spec = OrderSpec::lex(2).unwrap();
        let nu = FourierCoeffs::delta(g([-1, 5]), c(1.0));
        let opts = StudyOptions {
            k: 30,
            ..StudyOptions::default()
        };
        let r = compactness_verdict(&nu, "off", &spec, &[4, 8, 16], &opts).unwrap();
        assert_eq!(r.verdicts.predicted_compact, Some(false));
        assert_eq!(r.verdicts.k1_witness, Some(g([-1, 5])));
        assert_eq!(r.verdicts.compactness_evidence, Some(CompactnessEvidence::NonDecaying));
        // Index-pair enumeration: χ = (0,b), b ∈ [0, r−5] and χ = (1,b), b ∈ [−r, −6].
        let pairs = |r: i64| ((r - 4).max(0) + (r - 5).max(0)) as usize;
        let counts = r.verdicts.plateau_counts.clone().unwrap();
        assert_eq!(counts, vec![pairs(4), pairs(8), pairs(16)]);
        for row in &r.rows {
            let ones = row.sigma.iter().filter(|s| (*s - 1.0).abs() < 1e-10).count();
            assert_eq!(ones, pairs(row.radius).min(row.sigma.len()));
        }
    }

    #[test]
    fn compactness_without_smallest_positive() {
        let q = OrderSpec::quadratic(2).unwrap();
        let nu = FourierCoeffs::delta(g([-1, 0]), c(1.0));
        let r = compactness_verdict(&nu, "q", &q, &[2], &StudyOptions::default()).unwrap();
        assert_eq!(r.verdicts.predicted_compact, Some(false));
        let analytic = FourierCoeffs::delta(g([1, 0]), c(1.0));
        let r = compactness_verdict(&analytic, "q", &q, &[2], &StudyOptions::default()).unwrap();
        assert_eq!(r.verdicts.predicted_compact, Some(true));
    }

    #[test]
    fn fredholm_rank_one_and_hilbert() {
        let spec = OrderSpec::lex(1).unwrap();
        let r = fredholm_evidence(
            &HankelSource::Data(FourierCoeffs::delta(g([0]), c(1.0))),
            "delta",
            &spec,
            &[1, 3, 7],
            &StudyOptions::default(),
        )
        .unwrap();
        for row in &r.rows {
            assert_eq!(row.sigma_min, Some(0.0));
        }
        assert_eq!(r.verdicts.fredholm_evidence, Some(FredholmEvidence::SigmaMinVanishing));

        let r = fredholm_evidence(
            &HankelSource::Symbol(FourierCoeffs::delta(g([-1]), c(1.0))),
            "zbar",
            &spec,
            &[2, 4],
            &StudyOptions::default(),
        )
        .unwrap();
        assert!(r.rows.iter().all(|row| row.sigma_min == Some(0.0)));
    }

    #[test]
    fn geometric_tail_norms() {
        // a(k) = 2^{-k}: column χ of the N×N Hankel matrix has squared norm
        // Σ_{j<N} 4^{-(χ+j)} = 4^{-χ}(1 − 4^{-N})/(1 − 1/4).
        let spec = OrderSpec::lex(1).unwrap();
        let n = 12i64;
        let a = FourierCoeffs::from_pairs(1, (0..=2 * n).map(|k| (g([k]), c(0.5f64.powi(k as i32))))).unwrap();
        let r = fredholm_evidence(&HankelSource::Data(a), "geo", &spec, &[n - 1], &StudyOptions::default()).unwrap();
        for t in &r.tail_norms {
            let chi = t.chi.coords()[0] as i32;
            let oracle = (4f64.powi(-chi) * (1.0 - 4f64.powi(-(n as i32))) / 0.75).sqrt();
            assert_abs_diff_eq!(t.norm, oracle, epsilon = 1e-14);
        }
        assert!(r.tail_norms.windows(2).all(|w| w[1].norm < w[0].norm));
        assert_eq!(r.verdicts.tails_vanishing, Some(true));
    }

    #[test]
    fn fredholm_rejects_zero_symbol() {
        let spec = OrderSpec::lex(1).unwrap();
        let r = fredholm_evidence(&HankelSource::Data(FourierCoeffs::zero(1)), "0", &spec, &[2], &StudyOptions::default());
        assert!(r.is_err());
    }

    #[test]
    fn csv_layout() {
        let spec = OrderSpec::lex(1).unwrap();
        let opts = StudyOptions {
            k: 2,
            include_min: true,
            ..StudyOptions::default()
        };
        let a = FourierCoeffs::delta(g([1]), c(1.0));
        let r = norm_convergence_study(&a, "z", StudyKind::Hankel, &spec, &[1, 2], &opts).unwrap();
        let text = String::from_utf8(r.to_csv().unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "radius,sigma_1,sigma_2,sigma_min");
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first[0], "1");
        assert_abs_diff_eq!(first[1].parse::<f64>().unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(lines.len(), 3);
        assert!(r.gnuplot_script("z.csv").contains("using 1:4"));
    }

    #[test]
    fn slab_helper_is_positive() {
        let spec = OrderSpec::lex(2).unwrap();
        let s: ConeSlab = cone_slab(&spec, Sign::Positive, 1).unwrap();
        assert_eq!(s.elements()[0], g([0, 0]));
    }
}
