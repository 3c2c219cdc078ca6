//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Runs as a plain binary (`harness = false`).

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use conehankel::fourier::{conjugate_function, project, FourierCoeffs};
use conehankel::nehari::{bmo_decomposition, nehari_gap, Target};
use conehankel::operators::{
    coeffs_on_slab, gnu_apply, hankel_matrix, hphi_matrix, reindex_lemma2, reindexed_symbol,
    shift_commutation_check, toeplitz_matrix,
};
use conehankel::ordered_group::{
    cone_slab, validate_order, GroupElement, OrderSpec, PositiveCone, Sign,
};
use conehankel::sampling::{self, Region, SampleRng};
use conehankel::spectral::{compactness_verdict, singular_values, StudyOptions, SvdOptions};
use conehankel::verify::perturbable_entry;
use num_complex::Complex64;
use rand::Rng;

// Tolerances and budgets, as stated by each criterion.
const TOL_COMMUTATION: f64 = 1e-10;
const TOL_GNU: f64 = 1e-12;
const TOL_SEMICOMMUTATOR: f64 = 1e-10;
const TOL_CONJUGATE: f64 = 1e-12;
const TOL_STABILIZATION: f64 = 1e-6;
const DECAY_FACTOR: f64 = 10.0;
const TOL_PLATEAU: f64 = 1e-10;
const SIGMA_MIN_RATIO: f64 = 0.01;
const HILBERT_INTERVAL: (f64, f64) = (3.10, 3.1416);
const BRACKET_SLACK: f64 = 1e-8;
const GAP_RATIO: f64 = 0.15;
const GAP_QUOTA: usize = 16;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn g<const N: usize>(v: [i64; N]) -> GroupElement {
    GroupElement::from(v)
}

/// The closed upper half-plane: contains both n and −n on the horizontal axis.
struct HalfPlane;

impl PositiveCone for HalfPlane {
    fn dim(&self) -> usize {
        2
    }

    fn contains(&self, n: &GroupElement) -> bool {
        n.coords()[1] >= 0
    }
}

fn criterion_1() -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    for d in 1..=3 {
        let r = validate_order(&OrderSpec::lex(d).unwrap(), 4).unwrap();
        pass &= r.passed();
        parts.push(format!("lex{d}:{}", r.violations.len()));
    }
    for m in [2, 3, 5] {
        let r = validate_order(&OrderSpec::quadratic(m).unwrap(), 6).unwrap();
        pass &= r.passed();
        parts.push(format!("quad{m}:{}", r.violations.len()));
    }
    let broken = validate_order(&HalfPlane, 4).unwrap();
    let witness = broken.violations.first().map(|v| format!("{:?}", v.witness));
    pass &= !broken.passed() && witness.is_some();
    parts.push(format!("broken witness {}", witness.unwrap_or_default()));
    verdict(pass, format!("violations {}", parts.join(" ")))
}

fn lex2_shifts() -> Vec<GroupElement> {
    vec![g([0, 1]), g([1, 0]), g([1, -1])]
}

fn criterion_2(rng: &mut SampleRng) -> Verdict {
    let spec = OrderSpec::lex(2).unwrap();
    let slab = cone_slab(&spec, Sign::Positive, 4).unwrap();
    let shifts = lex2_shifts();
    let mut worst = 0.0f64;
    let mut detected = 0;
    for _ in 0..50 {
        let a = sampling::sparse_symbol(rng, &spec, 4, 6, Region::Positive);
        let m = hankel_matrix(&a, &slab).unwrap();
        worst = worst.max(shift_commutation_check(&m, &shifts, 2).unwrap().max_residual);
    }
    for _ in 0..50 {
        let a = sampling::sparse_symbol(rng, &spec, 4, 6, Region::Positive);
        let m = hankel_matrix(&a, &slab).unwrap();
        let (i, j) = perturbable_entry(&slab, &shifts, 2, rng);
        let mut data = m.data().clone();
        data[(i, j)] += Complex64::from_polar(rng.random_range(0.1..1.0), rng.random_range(0.0..6.28));
        let r = shift_commutation_check(&m.with_data(data).unwrap(), &shifts, 2).unwrap();
        if !r.passed && r.witness.is_some() {
            detected += 1;
        }
    }
    verdict(
        worst < TOL_COMMUTATION && detected == 50,
        format!("max Hankel residual {worst:.3e} (< {TOL_COMMUTATION:e}), perturbed detected {detected}/50"),
    )
}

fn criterion_3(rng: &mut SampleRng) -> Verdict {
    let mut worst = 0.0f64;
    for (d, radius) in [(1, 8), (2, 4)] {
        let spec = OrderSpec::lex(d).unwrap();
        let cols = cone_slab(&spec, Sign::Positive, radius).unwrap();
        for _ in 0..50 {
            let phi = sampling::sparse_symbol(rng, &spec, radius, 8, Region::Box);
            let f = sampling::sparse_symbol(rng, &spec, radius, 8, Region::Positive);
            let m = hphi_matrix(&phi, &spec, radius).unwrap();
            let direct = m.apply(&coeffs_on_slab(&f, &cols)).unwrap();
            let conv = coeffs_on_slab(&gnu_apply(&phi, &f, &spec, radius).unwrap(), m.rows());
            let r = direct.iter().zip(&conv).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            worst = worst.max(r);
        }
    }
    verdict(worst < TOL_GNU, format!("100 pairs, max residual {worst:.3e} (< {TOL_GNU:e})"))
}

fn criterion_4(rng: &mut SampleRng) -> Verdict {
    let mut worst = 0.0f64;
    for d in [1, 2] {
        let spec = OrderSpec::lex(d).unwrap();
        for _ in 0..25 {
            let phi = sampling::sparse_symbol(rng, &spec, 5, 10, Region::Box);
            let r = reindex_lemma2(&hphi_matrix(&phi, &spec, 5).unwrap(), &spec).unwrap();
            let h = hankel_matrix(&reindexed_symbol(&phi, &spec).unwrap(), r.rows()).unwrap();
            worst = worst.max((r.data() - h.data()).iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    verdict(worst == 0.0, format!("50 symbols, max entry difference {worst:e} (exact)"))
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn criterion_5(rng: &mut SampleRng) -> Verdict {
    let (s, r, radius) = (2, 2, 6);
    let mut worst = 0.0f64;
    for d in [1, 2] {
        let spec = OrderSpec::lex(d).unwrap();
        let slab = cone_slab(&spec, Sign::Positive, radius).unwrap();
        for _ in 0..15 {
            let phi = sampling::dense_symbol(rng, &spec, s, Region::Box);
            let psi = sampling::dense_symbol(rng, &spec, s, Region::Box);
            let v = coeffs_on_slab(&sampling::dense_symbol(rng, &spec, r, Region::Positive), &slab);
            let prod = conehankel::fourier::convolve(&phi, &psi).unwrap();
            let tt = toeplitz_matrix(&phi, &slab)
                .unwrap()
                .apply(&toeplitz_matrix(&psi, &slab).unwrap().apply(&v).unwrap())
                .unwrap();
            let tp = toeplitz_matrix(&prod, &slab).unwrap().apply(&v).unwrap();
            let hh = hphi_matrix(&phi.conj_symbol(), &spec, radius)
                .unwrap()
                .adjoint()
                .apply(&hphi_matrix(&psi, &spec, radius).unwrap().apply(&v).unwrap())
                .unwrap();
            let res: Vec<Complex64> = (0..v.len()).map(|i| tt[i] - tp[i] + hh[i]).collect();
            worst = worst.max(norm(&res) / (1.0 + norm(&v)));
        }
    }
    verdict(
        worst < TOL_SEMICOMMUTATOR,
        format!("30 pairs, max ‖residual‖/(1+‖v‖) {worst:.3e} (< {TOL_SEMICOMMUTATOR:e})"),
    )
}

fn criterion_6(rng: &mut SampleRng) -> Verdict {
    let mut worst = [0.0f64; 3];
    for (d, radius) in [(1, 8), (2, 4)] {
        let spec = OrderSpec::lex(d).unwrap();
        for _ in 0..50 {
            let psi = sampling::sparse_symbol(rng, &spec, radius, 10, Region::Box);
            let lhs = conjugate_function(&psi, &spec).unwrap().scale(Complex64::new(0.0, 1.0));
            let mean = FourierCoeffs::delta(GroupElement::zero(d), psi.mean());
            let rhs = project(&psi, &spec, Sign::Positive)
                .unwrap()
                .scale(c(2.0))
                .sub(&psi)
                .unwrap()
                .sub(&mean)
                .unwrap();
            worst[0] = worst[0].max(lhs.max_abs_diff(&rhs));
            worst[1] = worst[1].max(bmo_decomposition(&psi, &spec, Target::Plus).unwrap().residual);
            worst[2] = worst[2].max(bmo_decomposition(&psi, &spec, Target::Minus).unwrap().residual);
        }
    }
    verdict(
        worst.iter().all(|&w| w < TOL_CONJUGATE),
        format!(
            "100 polynomials, max residual conjugate {:.3e} plus {:.3e} minus {:.3e} (< {TOL_CONJUGATE:e})",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn dense_study(k: usize) -> StudyOptions {
    StudyOptions {
        k,
        svd: SvdOptions {
            dense_cutoff: 4096,
            ..SvdOptions::default()
        },
        ..StudyOptions::default()
    }
}

fn criterion_7() -> Verdict {
    let spec = OrderSpec::lex(2).unwrap();
    let mut on_axis = FourierCoeffs::zero(2);
    for n in 1..=20i64 {
        on_axis.set(g([0, -n]), c(1.0 / (n * n) as f64));
    }
    let rep = compactness_verdict(&on_axis, "on_axis", &spec, &[16, 24], &dense_study(10)).unwrap();
    let predicted = rep.verdicts.predicted_compact == Some(true);
    let s5: Vec<f64> = rep.rows.iter().map(|r| r.sigma[4]).collect();
    let drift = (s5[1] - s5[0]).abs();
    let decay: Vec<f64> = rep.rows.iter().map(|r| r.sigma[0] / r.sigma[9]).collect();
    let decays = decay.iter().all(|&q| q >= DECAY_FACTOR);

    let off = FourierCoeffs::delta(g([-1, 5]), c(1.0));
    let radii = [8, 16, 24];
    let rep_off = compactness_verdict(&off, "off_axis", &spec, &radii, &dense_study(45)).unwrap();
    let off_predicted = rep_off.verdicts.predicted_compact == Some(false);
    let plateau: Vec<usize> = rep_off
        .rows
        .iter()
        .map(|r| r.sigma.iter().filter(|&&s| (s - 1.0).abs() <= TOL_PLATEAU).count())
        .collect();
    // Depth below the plateau must be visible, so the count is not capped by k.
    let resolved = rep_off.rows.iter().zip(&plateau).all(|(r, &p)| p < r.sigma.len());
    let grows = plateau.windows(2).all(|w| w[1] > w[0]) && plateau[0] > 0;

    verdict(
        predicted && drift <= TOL_STABILIZATION && decays && off_predicted && grows && resolved,
        format!(
            "on-axis: predicted_compact={predicted}, |σ5(16)-σ5(24)|={drift:.3e} (≤ {TOL_STABILIZATION:e}), \
             σ1/σ10={:.3e},{:.3e} (≥ {DECAY_FACTOR}); off-axis: predicted_compact={}, \
             #σ within {TOL_PLATEAU:e} of 1 at radii {radii:?} = {plateau:?}",
            decay[0],
            decay[1],
            !off_predicted
        ),
    )
}

fn hilbert(n: usize) -> FourierCoeffs {
    FourierCoeffs::from_pairs(1, (0..2 * n - 1).map(|k| (g([k as i64]), c(1.0 / (k + 1) as f64)))).unwrap()
}

fn square_hankel(a: &FourierCoeffs, n: usize) -> conehankel::operators::OperatorMatrix {
    let spec = OrderSpec::lex(1).unwrap();
    hankel_matrix(a, &cone_slab(&spec, Sign::Positive, n as i64 - 1).unwrap()).unwrap()
}

fn criterion_8() -> Verdict {
    let opts = SvdOptions::default();
    let mut mins = Vec::new();
    let mut s1 = 0.0;
    for n in [16, 64, 256] {
        let sv = singular_values(&square_hankel(&hilbert(n), n), 1, true, &opts).unwrap();
        mins.push(sv.min.unwrap());
        s1 = sv.top[0];
    }
    // Nested truncations interlace, so σ_min is non-increasing in N.
    let decreasing = mins.windows(2).all(|w| w[1] <= w[0]);
    let small = *mins.last().unwrap() < SIGMA_MIN_RATIO * s1;
    let mut rank_one = Vec::new();
    for n in [2, 16, 64, 256] {
        let a = FourierCoeffs::delta(g([0]), Complex64::new(0.6, -0.8));
        rank_one.push(singular_values(&square_hankel(&a, n), 1, true, &opts).unwrap().min.unwrap());
    }
    let exact = rank_one.iter().all(|&s| s == 0.0);
    verdict(
        decreasing && small && exact,
        format!(
            "σ_min at N=16,64,256: {:.3e},{:.3e},{:.3e} (non-increasing: {decreasing}), σ_min/σ1 at 256 = {:.3e} \
             (< {SIGMA_MIN_RATIO}); rank-one σ_min {:?} (exact 0)",
            mins[0],
            mins[1],
            mins[2],
            mins[2] / s1,
            rank_one
        ),
    )
}

fn criterion_9() -> Verdict {
    let opts = SvdOptions::default();
    let ns = [64, 128, 256, 512];
    let s1: Vec<f64> = ns
        .iter()
        .map(|&n| singular_values(&square_hankel(&hilbert(n), n), 1, false, &opts).unwrap().top[0])
        .collect();
    let increasing = s1.windows(2).all(|w| w[1] > w[0]);
    let last = *s1.last().unwrap();
    let inside = (HILBERT_INTERVAL.0..=HILBERT_INTERVAL.1).contains(&last);
    // Any extension of the data bounds every truncation from above.
    let spec = OrderSpec::lex(1).unwrap();
    let ext = nehari_gap(&hilbert(512), &spec, 511, 4, 10).unwrap();
    let bounded = s1.iter().all(|&s| s <= ext.upper_certified + BRACKET_SLACK);
    verdict(
        increasing && inside && bounded,
        format!(
            "σ1 at N=64..512: {} (strictly increasing: {increasing}); σ1(512) in [{}, {}]: {inside}; \
             below extension bound {:.6}: {bounded}",
            s1.iter().map(|s| format!("{s:.6}")).collect::<Vec<_>>().join(","),
            HILBERT_INTERVAL.0,
            HILBERT_INTERVAL.1,
            ext.upper_certified
        ),
    )
}

fn criterion_10(rng: &mut SampleRng) -> Verdict {
    let spec = OrderSpec::lex(1).unwrap();
    let mut valid = 0;
    let mut tight = 0;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let a = sampling::unit_data_1d(rng, 3);
        let r = nehari_gap(&a, &spec, 64, 12, 500).unwrap();
        if r.lower <= r.upper + BRACKET_SLACK {
            valid += 1;
        }
        let ratio = r.gap / r.lower;
        worst = worst.max(ratio);
        if ratio <= GAP_RATIO {
            tight += 1;
        }
    }
    verdict(
        valid == 20 && tight >= GAP_QUOTA,
        format!(
            "brackets valid {valid}/20; gap/lower ≤ {GAP_RATIO} in {tight}/20 (need {GAP_QUOTA}); worst {worst:.4}"
        ),
    )
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn criterion_11() -> Verdict {
    let order = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/lex2.json");
    let tmp = tempfile::tempdir().unwrap();
    let run = |dir: &Path| {
        Command::new(env!("CARGO_BIN_EXE_cone-hankel"))
            .args(["verify", "identities", "--order"])
            .arg(&order)
            .args(["--seed", "42", "--out"])
            .arg(dir)
            .output()
            .unwrap()
            .status
            .code()
    };
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let mut codes = vec![run(&a)];
    let first = snapshot(&a);
    codes.push(run(&a));
    let second = snapshot(&a);
    codes.push(run(&b));
    let other = snapshot(&b);
    let identical = !first.is_empty() && first == second && first == other;
    verdict(
        codes.iter().all(|&c| c == Some(0)) && identical,
        format!(
            "exit codes {codes:?}; {} artifacts byte-identical across 3 runs: {identical}",
            first.len()
        ),
    )
}

fn main() {
    let rng = |k: u64| sampling::rng(20_240_000 + k);
    type Check<'a> = (u32, &'a str, f64, Box<dyn FnOnce() -> Verdict + 'a>);
    let (mut r2, mut r3, mut r4, mut r5, mut r6, mut r10) = (rng(2), rng(3), rng(4), rng(5), rng(6), rng(10));
    let checks: Vec<Check> = vec![
        (1, "order axioms", 5.0, Box::new(criterion_1)),
        (2, "Hankel structure iff shift commutation", 30.0, Box::new(|| criterion_2(&mut r2))),
        (3, "G_nu equals H_phi", 10.0, Box::new(|| criterion_3(&mut r3))),
        (4, "re-indexed H_phi is Hankel", 10.0, Box::new(|| criterion_4(&mut r4))),
        (5, "Toeplitz semicommutator", 60.0, Box::new(|| criterion_5(&mut r5))),
        (6, "conjugate-function identities", 5.0, Box::new(|| criterion_6(&mut r6))),
        (7, "compactness criterion", 120.0, Box::new(criterion_7)),
        (8, "non-Fredholm evidence", 60.0, Box::new(criterion_8)),
        (9, "Hilbert-type norm growth", 120.0, Box::new(criterion_9)),
        (10, "Nehari bracket", 300.0, Box::new(|| criterion_10(&mut r10))),
        (11, "determinism", 60.0, Box::new(criterion_11)),
    ];
    let mut failed = Vec::new();
    for (n, title, limit, check) in checks {
        let t = Instant::now();
        let v = check();
        let secs = t.elapsed().as_secs_f64();
        let pass = v.pass && secs < limit;
        if !pass {
            failed.push(n);
        }
        println!(
            "{} criterion {n:>2} {title}: {} [{secs:.2}s, limit {limit}s]",
            if pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!("acceptance: {} of 11 passed", 11 - failed.len());
    if !failed.is_empty() {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
