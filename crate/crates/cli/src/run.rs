//! Dispatch to the library and artifact emission.

use std::path::PathBuf;

use conehankel::io::{fmt_f64, write_atomic, Provenance};
use conehankel::nehari::nehari_gap;
use conehankel::ordered_group::{smallest_positive, validate_order};
use conehankel::spectral::{
    build_truncation, compactness_verdict, fredholm_evidence, norm_convergence_study, HankelSource,
    StudyOptions, StudyReport,
};
use conehankel::verify::{verify_identities, VerifyOptions};
use conehankel::Error;
use serde::Serialize;

use crate::config::{Formats, RunConfig, Source, Task};

pub const TOOL: &str = "cone-hankel";

/// Exit statuses.
pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_NONCONVERGENCE: u8 = 2;
pub const EXIT_INVARIANT: u8 = 3;

/// A run that ended with a non-zero status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub field: String,
    pub message: String,
}

impl Failure {
    fn new(code: u8, field: &str, message: impl Into<String>) -> Self {
        Failure {
            code,
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, field) = match &e {
            Error::NonConvergence { .. } => (EXIT_NONCONVERGENCE, "svd"),
            Error::Invariant(_) => (EXIT_INVARIANT, "invariant"),
            Error::Io(_) => (EXIT_VALIDATION, "output"),
            Error::SupportOutsideCone { .. } | Error::DimensionMismatch { .. } => (EXIT_VALIDATION, "symbol"),
            Error::NoSmallestPositive => (EXIT_VALIDATION, "order"),
            Error::InvalidArgument(m) => (
                EXIT_VALIDATION,
                m.split_once(':').map(|(f, _)| f).filter(|f| !f.contains(' ')).unwrap_or("input"),
            ),
            _ => (EXIT_VALIDATION, "input"),
        };
        let message = match &e {
            Error::InvalidArgument(m) => m.clone(),
            _ => e.to_string(),
        };
        Failure::new(code, field, message)
    }
}

/// Finished run: a one-line summary plus the status to exit with once
/// artifacts are on disk.
#[derive(Debug)]
pub struct Outcome {
    pub summary: String,
    pub late_failure: Option<Failure>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'a str,
    version: &'a str,
    config_hash: &'a str,
    config: &'a RunConfig,
    result: &'a T,
}

struct Artifacts<'a> {
    dir: PathBuf,
    formats: Formats,
    config: &'a RunConfig,
    provenance: Provenance,
    written: Vec<String>,
}

impl<'a> Artifacts<'a> {
    fn new(config: &'a RunConfig) -> Self {
        Artifacts {
            dir: config.out.clone(),
            formats: config.formats,
            config,
            provenance: Provenance {
                tool: TOOL.into(),
                version: env!("CARGO_PKG_VERSION").into(),
                config_hash: config.hash(),
            },
            written: Vec::new(),
        }
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<(), Failure> {
        write_atomic(&self.dir.join(name), bytes)?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, result: &T) -> Result<(), Failure> {
        if !self.formats.json {
            return Ok(());
        }
        let env = Envelope {
            tool: &self.provenance.tool,
            version: &self.provenance.version,
            config_hash: &self.provenance.config_hash,
            config: self.config,
            result,
        };
        let mut bytes = serde_json::to_vec_pretty(&env).map_err(Error::from)?;
        bytes.push(b'\n');
        self.put(name, &bytes)
    }

    fn csv(&mut self, name: &str, body: &[u8]) -> Result<(), Failure> {
        if !self.formats.csv {
            return Ok(());
        }
        let bytes = self.provenance.prefix_csv(body);
        self.put(name, &bytes)
    }

    fn study(&mut self, stem: &str, report: &StudyReport) -> Result<(), Failure> {
        self.json(&format!("{stem}.json"), report)?;
        self.csv(&format!("{stem}.csv"), &report.to_csv()?)?;
        if self.formats.plot {
            let script = self.provenance.comment_line() + &report.gnuplot_script(&format!("{stem}.csv"));
            self.put(&format!("{stem}.gp"), script.as_bytes())?;
        }
        Ok(())
    }

    fn listing(&self) -> String {
        format!("{} -> {}", self.written.join(","), self.dir.display())
    }
}

fn symbol(config: &RunConfig) -> &crate::config::NamedSymbol {
    config.symbol.as_ref().expect("command takes a symbol")
}

fn last_sigma1(report: &StudyReport) -> String {
    report
        .sigma1()
        .last()
        .map(|&s| fmt_f64(s))
        .unwrap_or_else(|| "n/a".into())
}

pub fn execute(config: &RunConfig) -> Result<Outcome, Failure> {
    let mut out = Artifacts::new(config);
    let spec = &config.order;
    let mut late = None;
    let summary = match &config.task {
        Task::OrderCheck {
            radius,
            search_radius,
        } => {
            let report = validate_order(spec, *radius)?;
            let sp = smallest_positive(spec, *search_radius)?;
            #[derive(Serialize)]
            struct OrderCheck<'a> {
                validation: &'a conehankel::ordered_group::ValidationReport,
                smallest_positive: &'a conehankel::ordered_group::SmallestPositive,
            }
            out.json(
                "order_check.json",
                &OrderCheck {
                    validation: &report,
                    smallest_positive: &sp,
                },
            )?;
            if !report.passed() {
                late = Some(Failure::new(
                    EXIT_INVARIANT,
                    "order",
                    format!("order: {} axiom violation(s)", report.violations.len()),
                ));
            }
            let chi1 = sp
                .element
                .map(|e| e.to_string())
                .unwrap_or_else(|| "none".into());
            format!(
                "order check: {} pairs, {} violations, smallest positive {chi1}",
                report.checked_pairs,
                report.violations.len()
            )
        }
        Task::OpBuild { kind, radius, stem } => {
            let sym = symbol(config);
            let m = build_truncation(&sym.coeffs, *kind, spec, *radius)?.with_label(sym.name.clone());
            // The matrix pair is the artifact; both halves always go out.
            m.export_with(&out.dir, stem, Some(&out.provenance))?;
            out.written.push(format!("{stem}.json"));
            out.written.push(format!("{stem}.csv"));
            let (r, c) = m.shape();
            format!("op build: {r}x{c} {} matrix", stem)
        }
        Task::OpNorms { kind, radii, k } => {
            let sym = symbol(config);
            let opts = StudyOptions {
                k: *k,
                ..StudyOptions::default()
            };
            let report = norm_convergence_study(&sym.coeffs, &sym.name, *kind, spec, radii, &opts)?;
            out.study("norms", &report)?;
            format!(
                "op norms: sigma_1 = {} at radius {}, l1 bound {}",
                last_sigma1(&report),
                radii.last().unwrap(),
                fmt_f64(report.l1_bound)
            )
        }
        Task::StudyCompactness {
            radii,
            k,
            plateau_ratio,
        } => {
            let sym = symbol(config);
            let opts = StudyOptions {
                k: *k,
                plateau_ratio: *plateau_ratio,
                ..StudyOptions::default()
            };
            let report = compactness_verdict(&sym.coeffs, &sym.name, spec, radii, &opts)?;
            out.study("compactness", &report)?;
            let v = &report.verdicts;
            format!(
                "study compactness: predicted_compact={} evidence={}",
                v.predicted_compact.unwrap_or(false),
                serde_json::to_value(v.compactness_evidence)
                    .ok()
                    .and_then(|x| x.as_str().map(String::from))
                    .unwrap_or_default()
            )
        }
        Task::StudyFredholm {
            radii,
            source,
            k,
            threshold,
        } => {
            let sym = symbol(config);
            let src = match source {
                Source::Data => HankelSource::Data(sym.coeffs.clone()),
                Source::Symbol => HankelSource::Symbol(sym.coeffs.clone()),
            };
            let opts = StudyOptions {
                k: *k,
                fredholm_threshold: *threshold,
                ..StudyOptions::default()
            };
            let report = fredholm_evidence(&src, &sym.name, spec, radii, &opts)?;
            out.study("fredholm", &report)?;
            let smin = report
                .rows
                .last()
                .and_then(|r| r.sigma_min)
                .map(fmt_f64)
                .unwrap_or_default();
            format!(
                "study fredholm: sigma_min = {smin}, sigma_1 = {} at radius {}",
                last_sigma1(&report),
                radii.last().unwrap()
            )
        }
        Task::NehariGap {
            radius,
            degree,
            budget,
        } => {
            let sym = symbol(config);
            let r = nehari_gap(&sym.coeffs, spec, *radius, *degree, *budget)?;
            out.json("nehari.json", &r)?;
            let mut hist = String::from("sweep,objective\n");
            for (i, v) in r.objective_history.iter().enumerate() {
                hist.push_str(&format!("{i},{}\n", fmt_f64(*v)));
            }
            out.csv("nehari_history.csv", hist.as_bytes())?;
            if !r.bracket_valid {
                late = Some(Failure::new(
                    EXIT_INVARIANT,
                    "invariant",
                    "nehari: lower bound exceeds upper bound",
                ));
            } else if !r.converged {
                late = Some(Failure::new(
                    EXIT_NONCONVERGENCE,
                    "budget",
                    format!("budget: descent did not converge in {} sweeps", r.iterations),
                ));
            }
            format!(
                "nehari gap: lower {} upper {} gap {} ({} sweeps)",
                fmt_f64(r.lower),
                fmt_f64(r.upper),
                fmt_f64(r.gap),
                r.iterations
            )
        }
        Task::VerifyIdentities {
            seed,
            cases,
            tolerance,
        } => {
            let opts = VerifyOptions {
                seed: *seed,
                cases: *cases,
                tolerance: *tolerance,
            };
            let report = verify_identities(spec, &opts)?;
            out.json("verify.json", &report)?;
            out.csv("verify.csv", &report.to_csv()?)?;
            let failed: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| c.status == conehankel::verify::Status::Failed)
                .map(|c| c.name.as_str())
                .collect();
            if !failed.is_empty() {
                late = Some(Failure::new(
                    EXIT_INVARIANT,
                    "invariant",
                    format!("verify: failed {}", failed.join(",")),
                ));
            }
            let worst = report
                .checks
                .iter()
                .filter(|c| c.tolerance <= *tolerance)
                .map(|c| c.max_residual)
                .fold(0.0, f64::max);
            format!(
                "verify identities: {} checks, {} failed, max residual {}",
                report.checks.len(),
                failed.len(),
                fmt_f64(worst)
            )
        }
    };
    Ok(Outcome {
        summary: format!("{summary}; {}", out.listing()),
        late_failure: late,
    })
}
