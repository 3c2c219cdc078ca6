//! Turning parsed arguments into a fully validated run configuration.

use std::fs;
use std::path::{Path, PathBuf};

use conehankel::fourier::FourierCoeffs;
use conehankel::ordered_group::OrderSpec;
use conehankel::spectral::StudyKind;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::{Cli, Command, KindArg, NehariCmd, OpCmd, OrderCmd, Output, SourceArg, StudyCmd, VerifyCmd};

/// A diagnostic naming the first invalid field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invalid {
    pub field: String,
    pub message: String,
}

impl Invalid {
    pub fn new(field: &str, detail: impl std::fmt::Display) -> Self {
        Invalid {
            field: field.into(),
            message: format!("{field}: {detail}"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Formats {
    pub json: bool,
    pub csv: bool,
    pub plot: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Task {
    OrderCheck {
        radius: i64,
        search_radius: i64,
    },
    OpBuild {
        kind: StudyKind,
        radius: i64,
        stem: String,
    },
    OpNorms {
        kind: StudyKind,
        radii: Vec<i64>,
        k: usize,
    },
    StudyCompactness {
        radii: Vec<i64>,
        k: usize,
        plateau_ratio: f64,
    },
    StudyFredholm {
        radii: Vec<i64>,
        source: Source,
        k: usize,
        threshold: f64,
    },
    NehariGap {
        radius: i64,
        degree: i64,
        budget: usize,
    },
    VerifyIdentities {
        seed: u64,
        cases: usize,
        tolerance: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Data,
    Symbol,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedSymbol {
    pub name: String,
    pub coeffs: FourierCoeffs,
}

/// Everything a run depends on. The serialized form (without the output
/// location) is what the config hash covers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub task: Task,
    pub order: OrderSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol: Option<NamedSymbol>,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub formats: Formats,
}

impl RunConfig {
    pub fn command_name(&self) -> &'static str {
        match self.task {
            Task::OrderCheck { .. } => "order check",
            Task::OpBuild { .. } => "op build",
            Task::OpNorms { .. } => "op norms",
            Task::StudyCompactness { .. } => "study compactness",
            Task::StudyFredholm { .. } => "study fredholm",
            Task::NehariGap { .. } => "nehari gap",
            Task::VerifyIdentities { .. } => "verify identities",
        }
    }

    /// Hex SHA-256 of the canonical JSON form together with the tool version.
    pub fn hash(&self) -> String {
        let body = serde_json::to_vec(self).expect("config serializes");
        let mut h = Sha256::new();
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        h.update([0]);
        h.update(&body);
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn read_file(field: &str, path: &Path) -> Result<Vec<u8>, Invalid> {
    if !path.is_file() {
        return Err(Invalid::new(field, "file not found"));
    }
    fs::read(path).map_err(|e| Invalid::new(field, e))
}

pub fn load_order(path: &Path) -> Result<OrderSpec, Invalid> {
    let bytes = read_file("order", path)?;
    serde_json::from_slice(&bytes).map_err(|e| Invalid::new("order", e))
}

fn load_symbol(path: &Path, order: &OrderSpec) -> Result<NamedSymbol, Invalid> {
    let bytes = read_file("symbol", path)?;
    let coeffs: FourierCoeffs = serde_json::from_slice(&bytes).map_err(|e| Invalid::new("symbol", e))?;
    if coeffs.dim() != order.dim() {
        return Err(Invalid::new(
            "symbol",
            format!("dimension {} does not match order dimension {}", coeffs.dim(), order.dim()),
        ));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "symbol".into());
    Ok(NamedSymbol { name, coeffs })
}

pub fn parse_radii(s: &str) -> Result<Vec<i64>, Invalid> {
    let radii = s
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Invalid::new("radii", "expected comma-separated integers"))?;
    if radii.is_empty() {
        return Err(Invalid::new("radii", "empty list"));
    }
    if radii.iter().any(|&r| r < 1) {
        return Err(Invalid::new("radii", "must be positive"));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Invalid::new("radii", "must be strictly increasing"));
    }
    Ok(radii)
}

fn parse_formats(s: &str) -> Result<Formats, Invalid> {
    let mut f = Formats::default();
    for t in s.split(',').map(str::trim) {
        match t {
            "json" => f.json = true,
            "csv" => f.csv = true,
            "plot" => f.plot = true,
            other => return Err(Invalid::new("formats", format!("unknown format '{other}'"))),
        }
    }
    Ok(f)
}

fn positive_radius(field: &str, r: i64) -> Result<i64, Invalid> {
    if r < 1 {
        return Err(Invalid::new(field, "must be positive"));
    }
    Ok(r)
}

fn positive_tol(field: &str, x: f64) -> Result<f64, Invalid> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Invalid::new(field, "must be positive"));
    }
    Ok(x)
}

fn positive_count(field: &str, n: usize) -> Result<usize, Invalid> {
    if n == 0 {
        return Err(Invalid::new(field, "must be positive"));
    }
    Ok(n)
}

fn kind(k: KindArg) -> StudyKind {
    match k {
        KindArg::Hankel => StudyKind::Hankel,
        KindArg::Hphi => StudyKind::Hphi,
        KindArg::Toeplitz => StudyKind::Toeplitz,
        KindArg::GammaPsi => StudyKind::GammaPsi,
    }
}

fn kind_name(k: KindArg) -> &'static str {
    match k {
        KindArg::Hankel => "hankel",
        KindArg::Hphi => "hphi",
        KindArg::Toeplitz => "toeplitz",
        KindArg::GammaPsi => "gamma_psi",
    }
}

struct Common<'a> {
    order: &'a Path,
    symbol: Option<&'a Path>,
    output: &'a Output,
}

/// Validates fields in command-line order and loads the input files.
pub fn build_config(cli: &Cli) -> Result<RunConfig, Invalid> {
    let (common, task) = match &cli.command {
        Command::Order(OrderCmd::Check(a)) => (
            Common { order: &a.order, symbol: None, output: &a.output },
            Task::OrderCheck {
                radius: positive_radius("radius", a.radius)?,
                search_radius: positive_radius("search_radius", a.search_radius)?,
            },
        ),
        Command::Op(OpCmd::Build(a)) => (
            Common { order: &a.order, symbol: Some(&a.symbol), output: &a.output },
            Task::OpBuild {
                kind: kind(a.kind),
                radius: positive_radius("radius", a.radius)?,
                stem: a.stem.clone().unwrap_or_else(|| kind_name(a.kind).into()),
            },
        ),
        Command::Op(OpCmd::Norms(a)) => (
            Common { order: &a.order, symbol: Some(&a.symbol), output: &a.output },
            Task::OpNorms {
                kind: kind(a.kind),
                radii: parse_radii(&a.radii)?,
                k: positive_count("k", a.k)?,
            },
        ),
        Command::Study(StudyCmd::Compactness(a)) => (
            Common { order: &a.order, symbol: Some(&a.symbol), output: &a.output },
            Task::StudyCompactness {
                radii: parse_radii(&a.radii)?,
                k: positive_count("k", a.k)?,
                plateau_ratio: positive_tol("plateau_ratio", a.plateau_ratio)?,
            },
        ),
        Command::Study(StudyCmd::Fredholm(a)) => (
            Common { order: &a.order, symbol: Some(&a.symbol), output: &a.output },
            Task::StudyFredholm {
                radii: parse_radii(&a.radii)?,
                source: match a.source {
                    SourceArg::Data => Source::Data,
                    SourceArg::Symbol => Source::Symbol,
                },
                k: positive_count("k", a.k)?,
                threshold: positive_tol("threshold", a.threshold)?,
            },
        ),
        Command::Nehari(NehariCmd::Gap(a)) => {
            if a.degree < 0 {
                return Err(Invalid::new("degree", "must be non-negative"));
            }
            (
                Common { order: &a.order, symbol: Some(&a.symbol), output: &a.output },
                Task::NehariGap {
                    radius: positive_radius("radius", a.radius)?,
                    degree: a.degree,
                    budget: positive_count("budget", a.budget)?,
                },
            )
        }
        Command::Verify(VerifyCmd::Identities(a)) => (
            Common { order: &a.order, symbol: None, output: &a.output },
            Task::VerifyIdentities {
                seed: a.seed,
                cases: positive_count("cases", a.cases)?,
                tolerance: positive_tol("tolerance", a.tolerance)?,
            },
        ),
    };
    let formats = parse_formats(&common.output.formats)?;
    let order = load_order(common.order)?;
    let symbol = common.symbol.map(|p| load_symbol(p, &order)).transpose()?;
    Ok(RunConfig {
        task,
        order,
        symbol,
        out: common.output.out.clone(),
        formats,
    })
}

/// Parallelism cap from `CONE_HANKEL_THREADS`, if set.
pub fn thread_cap(value: Option<&str>) -> Result<Option<usize>, Invalid> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Invalid::new("CONE_HANKEL_THREADS", "must be a positive integer")),
        },
    }
}
