//! Randomized checks of the structural identities on a given order.
//!
//! Every check draws its inputs from a ChaCha stream seeded by the options,
//! so a report is a pure function of `(order, options)`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{conjugate_function, convolve, flip, project, FourierCoeffs};
use crate::io::fmt_f64;
use crate::nehari::{bmo_decomposition, Target};
use crate::operators::{
    coeffs_on_slab, gamma_psi_matrix, gnu_apply, hankel_matrix, hphi_matrix, reindex_lemma2,
    reindexed_symbol, shift_commutation_check, toeplitz_matrix,
};
use crate::ordered_group::{cone_slab, GroupElement, OrderSpec, Sign};
use crate::sampling::{self, Region, SampleRng};
use crate::spectral::{
    compactness_verdict, fredholm_evidence, singular_values, CompactnessEvidence,
    FredholmEvidence, HankelSource, StudyOptions, SvdOptions,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random instances per identity.
    pub cases: usize,
    pub tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 42,
            cases: 20,
            tolerance: 1e-10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Passed,
    Failed,
    /// The identity needs a smallest positive element the order lacks.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub cases: usize,
    /// Largest residual over the cases (0 for skipped checks).
    pub max_residual: f64,
    pub tolerance: f64,
    pub status: Status,
    pub note: String,
}

impl IdentityCheck {
    fn from_residuals(name: &str, residuals: &[f64], tolerance: f64, note: impl Into<String>) -> Self {
        let max_residual = residuals.iter().copied().fold(0.0, f64::max);
        let ok = residuals.iter().all(|r| r.is_finite()) && max_residual < tolerance;
        IdentityCheck {
            name: name.into(),
            cases: residuals.len(),
            max_residual,
            tolerance,
            status: if ok { Status::Passed } else { Status::Failed },
            note: note.into(),
        }
    }

    fn skipped(name: &str, tolerance: f64, note: &str) -> Self {
        IdentityCheck {
            name: name.into(),
            cases: 0,
            max_residual: 0.0,
            tolerance,
            status: Status::Skipped,
            note: note.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub order: OrderSpec,
    pub options: VerifyOptions,
    pub checks: Vec<IdentityCheck>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Failed)
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut out = serde_json::to_vec_pretty(self)?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "cases", "max_residual", "tolerance", "status"])?;
        for c in &self.checks {
            let status = match c.status {
                Status::Passed => "passed",
                Status::Failed => "failed",
                Status::Skipped => "skipped",
            };
            w.write_record([
                c.name.clone(),
                c.cases.to_string(),
                fmt_f64(c.max_residual),
                fmt_f64(c.tolerance),
                status.to_string(),
            ])?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Radii scaled down with the dimension to keep slabs small.
fn slab_radius(spec: &OrderSpec, d1: i64, d2: i64) -> i64 {
    if spec.dim() == 1 {
        d1
    } else if spec.dim() == 2 {
        d2
    } else {
        2
    }
}

/// Shifts used by the commutation check: unit vectors and χ₁, signed into X₊.
fn positive_shifts(spec: &OrderSpec) -> Vec<GroupElement> {
    let mut out: Vec<GroupElement> = (0..spec.dim())
        .map(|i| {
            let e = GroupElement::unit(spec.dim(), i);
            if spec.is_negative(&e) {
                -&e
            } else {
                e
            }
        })
        .collect();
    if let Some(chi1) = spec.smallest_positive_element() {
        if !out.contains(&chi1) {
            out.push(chi1);
        }
    }
    out
}

/// A random entry `(η+χ, ξ)` with η, ξ interior and ξ+χ in the slab.
pub fn perturbable_entry(
    slab: &crate::ordered_group::ConeSlab,
    shifts: &[GroupElement],
    margin: i64,
    rng: &mut SampleRng,
) -> (usize, usize) {
    let limit = slab.radius() - margin;
    let interior: Vec<&GroupElement> = slab
        .elements()
        .iter()
        .filter(|n| n.sup_norm() <= limit)
        .collect();
    loop {
        let eta = interior[rng.random_range(0..interior.len())];
        let xi = interior[rng.random_range(0..interior.len())];
        let chi = &shifts[rng.random_range(0..shifts.len())];
        if let (Some(i), Some(_)) = (slab.position(&(eta + chi)), slab.position(&(xi + chi))) {
            return (i, slab.position(xi).unwrap());
        }
    }
}

fn lemma1(spec: &OrderSpec, rng: &mut SampleRng, opts: &VerifyOptions) -> Result<Vec<IdentityCheck>> {
    let radius = slab_radius(spec, 8, 4);
    let slab = cone_slab(spec, Sign::Positive, radius)?;
    let shifts = positive_shifts(spec);
    let mut hankel = Vec::new();
    let mut detection = Vec::new();
    for _ in 0..opts.cases {
        let a = sampling::sparse_symbol(rng, spec, radius, 6, Region::Positive);
        let m = hankel_matrix(&a, &slab)?;
        hankel.push(shift_commutation_check(&m, &shifts, 2)?.max_residual);

        // Perturb one entry that the check compares against a partner.
        let (i, j) = perturbable_entry(&slab, &shifts, 2, rng);
        let mut data = m.data().clone();
        data[(i, j)] += Complex64::new(0.5, 0.0);
        let report = shift_commutation_check(&m.with_data(data)?, &shifts, 2)?;
        // Residual of a detection: 0 if flagged with a witness, 1 otherwise.
        detection.push(if !report.passed && report.witness.is_some() { 0.0 } else { 1.0 });
    }
    Ok(vec![
        IdentityCheck::from_residuals(
            "hankel_commutes_with_shifts",
            &hankel,
            opts.tolerance,
            "S_χ* Γ = Γ S_χ on the slab interior (margin 2)",
        ),
        IdentityCheck::from_residuals(
            "perturbation_breaks_commutation",
            &detection,
            0.5,
            "perturbed Hankel matrices fail the check with a witness",
        ),
    ])
}

fn theorem5(spec: &OrderSpec, rng: &mut SampleRng, opts: &VerifyOptions) -> Result<IdentityCheck> {
    let radius = slab_radius(spec, 8, 4);
    let cols = cone_slab(spec, Sign::Positive, radius)?;
    let mut res = Vec::new();
    for _ in 0..opts.cases {
        let phi = sampling::sparse_symbol(rng, spec, radius, 8, Region::Box);
        let f = sampling::sparse_symbol(rng, spec, radius, 8, Region::Positive);
        let m = hphi_matrix(&phi, spec, radius)?;
        let direct = m.apply(&coeffs_on_slab(&f, &cols))?;
        let conv = gnu_apply(&phi, &f, spec, radius)?;
        res.push(max_diff(&direct, &coeffs_on_slab(&conv, m.rows())));
    }
    Ok(IdentityCheck::from_residuals(
        "gnu_equals_hphi",
        &res,
        opts.tolerance.min(1e-12),
        "(ν∗f)|X₋ against the H_φ truncation applied to f",
    ))
}

fn lemma2(spec: &OrderSpec, rng: &mut SampleRng, opts: &VerifyOptions) -> Result<IdentityCheck> {
    let name = "reindexed_hphi_is_hankel";
    if spec.smallest_positive_element().is_none() {
        return Ok(IdentityCheck::skipped(name, 0.0, "order has no smallest positive element"));
    }
    let radius = slab_radius(spec, 8, 5);
    let mut res = Vec::new();
    for _ in 0..opts.cases {
        let phi = sampling::sparse_symbol(rng, spec, radius, 8, Region::Box);
        let r = reindex_lemma2(&hphi_matrix(&phi, spec, radius)?, spec)?;
        let h = hankel_matrix(&reindexed_symbol(&phi, spec)?, r.rows())?;
        res.push((r.data() - h.data()).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(IdentityCheck::from_residuals(
        name,
        &res,
        opts.tolerance,
        "rows η ↦ −η−χ₁ give Hankel data a(χ) = φ̂(−χ−χ₁)",
    ))
}

fn gamma_flip(spec: &OrderSpec, rng: &mut SampleRng, opts: &VerifyOptions) -> Result<IdentityCheck> {
    let radius = slab_radius(spec, 8, 4);
    let slab = cone_slab(spec, Sign::Positive, radius)?;
    let mut res = Vec::new();
    for _ in 0..opts.cases {
        let psi = sampling::sparse_symbol(rng, spec, radius, 8, Region::Box);
        let g = gamma_psi_matrix(&flip(&psi), &slab)?;
        let h = hankel_matrix(&project(&psi, spec, Sign::Positive)?, &slab)?;
        res.push((g.data() - h.data()).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(IdentityCheck::from_residuals(
        "gamma_of_flip_is_hankel",
        &res,
        opts.tolerance,
        "Γ_{Jψ} equals the Hankel matrix of ψ̂|X₊",
    ))
}

fn semicommutator(spec: &OrderSpec, rng: &mut SampleRng, opts: &VerifyOptions) -> Result<IdentityCheck> {
    // Support radius S, test vectors of radius R, slab radius R + 2S.
    let (s, r) = (2, 2);
    let radius = r + 2 * s;
    let slab = cone_slab(spec, Sign::Positive, radius)?;
    let mut res = Vec::new();
    for _ in 0..opts.cases {
        let phi = sampling::dense_symbol(rng, spec, s, Region::Box);
        let psi = sampling::dense_symbol(rng, spec, s, Region::Box);
        let v_coeffs = sampling::dense_symbol(rng, spec, r, Region::Positive);
        let v = coeffs_on_slab(&v_coeffs, &slab);

        let t_phi = toeplitz_matrix(&phi, &slab)?;
        let t_psi = toeplitz_matrix(&psi, &slab)?;
        let t_prod = toeplitz_matrix(&convolve(&phi, &psi)?, &slab)?;
        let h_psi = hphi_matrix(&psi, spec, radius)?;
        let h_phibar = hphi_matrix(&phi.conj_symbol(), spec, radius)?;

        let lhs = t_phi.apply(&t_psi.apply(&v)?)?;
        let prod = t_prod.apply(&v)?;
        let cross = h_phibar.adjoint().apply(&h_psi.apply(&v)?)?;
        let sum: Vec<Complex64> = lhs
            .iter()
            .zip(&prod)
            .zip(&cross)
            .map(|((a, b), c)| a - b + c)
            .collect();
        res.push(norm(&sum) / (1.0 + norm(&v)));
    }
    Ok(IdentityCheck::from_residuals(
        "toeplitz_semicommutator",
        &res,
        opts.tolerance,
        "T_φT_ψ − T_{φψ} = −H*_{φ̄}H_ψ, relative to 1+‖v‖",
    ))
}

fn conjugate_identities(
    spec: &OrderSpec,
    rng: &mut SampleRng,
    opts: &VerifyOptions,
) -> Result<Vec<IdentityCheck>> {
    let radius = slab_radius(spec, 8, 4);
    let mut analytic = Vec::new();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for _ in 0..opts.cases {
        let psi = sampling::sparse_symbol(rng, spec, radius, 10, Region::Box);
        let lhs = conjugate_function(&psi, spec)?.scale(Complex64::new(0.0, 1.0));
        let mean = FourierCoeffs::delta(GroupElement::zero(spec.dim()), psi.mean());
        let rhs = project(&psi, spec, Sign::Positive)?
            .scale(Complex64::new(2.0, 0.0))
            .sub(&psi)?
            .sub(&mean)?;
        analytic.push(lhs.max_abs_diff(&rhs));
        plus.push(bmo_decomposition(&psi, spec, Target::Plus)?.residual);
        minus.push(bmo_decomposition(&psi, spec, Target::Minus)?.residual);
    }
    let tol = opts.tolerance.min(1e-12);
    Ok(vec![
        IdentityCheck::from_residuals("conjugate_function", &analytic, tol, "iψ̃ = 2P₊ψ − ψ − ψ̂(0)"),
        IdentityCheck::from_residuals("bmo_plus", &plus, tol, "P₊ψ = (ψ+ψ̂(0))/2 + (iψ/2)~"),
        IdentityCheck::from_residuals("bmo_minus", &minus, tol, "P₋ψ = (ψ−ψ̂(0))/2 + (−iψ/2)~"),
    ])
}

/// Compares the exact K₁ prediction with the singular-value trend for one
/// decaying symbol on the χ₁ axis and one unit coefficient off it.
fn compactness(spec: &OrderSpec) -> Result<IdentityCheck> {
    let study = StudyOptions {
        k: 12,
        ..StudyOptions::default()
    };
    let radii = if spec.dim() == 1 { vec![8, 16, 32] } else { vec![4, 8, 12] };
    let mut symbols = Vec::new();
    if let Some(chi1) = spec.smallest_positive_element() {
        let mut on_axis = FourierCoeffs::zero(spec.dim());
        for n in 1..=6i64 {
            on_axis.set(chi1.scale(-n), Complex64::new(1.0 / (n * n) as f64, 0.0));
        }
        symbols.push(("on_axis", on_axis));
    }
    if spec.dim() >= 2 {
        let n = cone_slab(spec, Sign::Negative, 2)?
            .elements()
            .iter()
            .find(|n| {
                spec.smallest_positive_element()
                    .is_none_or(|c| (1..=2).all(|k| **n != c.scale(-k)))
            })
            .cloned()
            .expect("box of radius 2 has off-axis negatives");
        symbols.push(("off_axis", FourierCoeffs::delta(n, Complex64::new(1.0, 0.0))));
    }
    let mut res = Vec::new();
    let mut names = Vec::new();
    for (name, nu) in &symbols {
        let report = compactness_verdict(nu, name, spec, &radii, &study)?;
        let predicted = report.verdicts.predicted_compact == Some(true);
        let decaying = report.verdicts.compactness_evidence == Some(CompactnessEvidence::Decaying);
        res.push(if predicted == decaying { 0.0 } else { 1.0 });
        names.push(format!("{name}:{}", if predicted { "compact" } else { "non-compact" }));
    }
    Ok(IdentityCheck::from_residuals(
        "compactness_prediction_matches_trend",
        &res,
        0.5,
        names.join(","),
    ))
}

/// σ_min of square Hankel truncations: rank-one data give exact zeros and
/// generic finite data give vanishing σ_min relative to σ₁.
fn fredholm(spec: &OrderSpec, rng: &mut SampleRng, opts: &VerifyOptions) -> Result<Vec<IdentityCheck>> {
    let svd = SvdOptions::default();
    let mut rank_one = Vec::new();
    let mut vanishing = Vec::new();
    let radii = if spec.dim() == 1 { vec![4, 8, 16] } else { vec![2, 4, 6] };
    for _ in 0..opts.cases.min(5) {
        let c = sampling::complex(rng);
        let a = FourierCoeffs::delta(GroupElement::zero(spec.dim()), c);
        let m = hankel_matrix(&a, &cone_slab(spec, Sign::Positive, radii[0])?)?;
        rank_one.push(singular_values(&m, 1, true, &svd)?.min.unwrap_or(f64::INFINITY));

        let data = sampling::sparse_symbol(rng, spec, 2, 4, Region::Positive);
        if data.is_empty() {
            continue;
        }
        let report = fredholm_evidence(
            &HankelSource::Data(data),
            "random",
            spec,
            &radii,
            &StudyOptions::default(),
        )?;
        let ok = report.verdicts.fredholm_evidence == Some(FredholmEvidence::SigmaMinVanishing);
        vanishing.push(if ok { 0.0 } else { 1.0 });
    }
    Ok(vec![
        IdentityCheck::from_residuals(
            "rank_one_sigma_min_zero",
            &rank_one,
            opts.tolerance,
            "Γ with data c·δ₀ has σ_min = 0",
        ),
        IdentityCheck::from_residuals(
            "sigma_min_vanishes",
            &vanishing,
            0.5,
            "finitely supported data: σ_min < 0.1·σ₁ at the largest radius",
        ),
    ])
}

/// Runs every check; each identity gets its own seeded stream so adding
/// cases to one does not perturb the others.
pub fn verify_identities(spec: &OrderSpec, opts: &VerifyOptions) -> Result<VerifyReport> {
    if opts.cases == 0 {
        return Err(Error::InvalidArgument("cases: must be positive".into()));
    }
    if !(opts.tolerance > 0.0) {
        return Err(Error::InvalidArgument("tolerance: must be positive".into()));
    }
    let stream = |k: u64| sampling::rng(opts.seed.wrapping_mul(1_000_003).wrapping_add(k));
    let mut checks = lemma1(spec, &mut stream(1), opts)?;
    checks.push(theorem5(spec, &mut stream(2), opts)?);
    checks.push(lemma2(spec, &mut stream(3), opts)?);
    checks.push(gamma_flip(spec, &mut stream(4), opts)?);
    checks.push(semicommutator(spec, &mut stream(5), opts)?);
    checks.extend(conjugate_identities(spec, &mut stream(6), opts)?);
    checks.push(compactness(spec)?);
    checks.extend(fredholm(spec, &mut stream(7), opts)?);
    Ok(VerifyReport {
        order: spec.clone(),
        options: opts.clone(),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyOptions {
        VerifyOptions {
            cases: 4,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn all_pass_on_lex() {
        for d in 1..=2 {
            let r = verify_identities(&OrderSpec::lex(d).unwrap(), &small()).unwrap();
            for c in &r.checks {
                assert_eq!(c.status, Status::Passed, "d={d} {c:?}");
            }
        }
    }

    #[test]
    fn quadratic_skips_reindexing() {
        let r = verify_identities(&OrderSpec::quadratic(2).unwrap(), &small()).unwrap();
        assert!(r.passed(), "{r:?}");
        let skip = r.checks.iter().find(|c| c.name == "reindexed_hphi_is_hankel").unwrap();
        assert_eq!(skip.status, Status::Skipped);
    }

    #[test]
    fn reports_are_reproducible() {
        let spec = OrderSpec::lex(2).unwrap();
        let a = verify_identities(&spec, &small()).unwrap();
        let b = verify_identities(&spec, &small()).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
    }
}
