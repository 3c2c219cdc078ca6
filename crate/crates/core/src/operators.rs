//! Truncated matrices of Hankel, Toeplitz and shift operators on cone slabs.
//!
//! Every builder evaluates the exact matrix entry of the infinite operator on
//! a finite set of basis characters, so only the domain is truncated. Rows
//! and columns carry their [`ConeSlab`] so that entries can be addressed by
//! group element.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{convolve, FourierCoeffs, PRUNE_THRESHOLD};
use crate::io::{fmt_f64, write_atomic, Provenance};
use crate::ordered_group::{cone_slab, ConeSlab, GroupElement, OrderSpec, Sign};

/// Residual below which two matrix entries count as equal in structural checks.
pub const STRUCTURE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// Γ on l₂(X₊), entries `a(χ+ξ)`.
    Hankel,
    /// `H_φ = P₋M_φ : H² → H²₋`.
    Hphi,
    /// `T_φ = P₊M_φ` on H².
    Toeplitz,
    /// `Γ_ψ f = P₊J(ψf)`.
    GammaPsi,
    /// Isometric shift by a positive element.
    Shift,
    /// H_φ with rows relabelled into X₊ through the smallest positive element.
    Reindexed,
    /// Anything else (products, adjoints, imported data).
    Other,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    kind: OperatorKind,
    label: String,
    rows: ConeSlab,
    cols: ConeSlab,
    data: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn new(
        kind: OperatorKind,
        label: impl Into<String>,
        rows: ConeSlab,
        cols: ConeSlab,
        data: DMatrix<Complex64>,
    ) -> Result<Self> {
        if data.nrows() != rows.len() || data.ncols() != cols.len() {
            return Err(Error::InvalidArgument(format!(
                "matrix is {}x{} but slabs have {} rows and {} columns",
                data.nrows(),
                data.ncols(),
                rows.len(),
                cols.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Invariant("matrix has non-finite entries".into()));
        }
        Ok(OperatorMatrix {
            kind,
            label: label.into(),
            rows,
            cols,
            data,
        })
    }

    fn assemble(
        kind: OperatorKind,
        rows: ConeSlab,
        cols: ConeSlab,
        entry: impl Fn(&GroupElement, &GroupElement) -> Complex64,
    ) -> Self {
        let data = DMatrix::from_fn(rows.len(), cols.len(), |i, j| {
            entry(&rows.elements()[i], &cols.elements()[j])
        });
        OperatorMatrix {
            kind,
            label: format!("{kind:?}").to_lowercase(),
            rows,
            cols,
            data,
        }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn rows(&self) -> &ConeSlab {
        &self.rows
    }

    pub fn cols(&self) -> &ConeSlab {
        &self.cols
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn shape(&self) -> (usize, usize) {
        self.data.shape()
    }

    /// Replaces the entries, keeping the index slabs.
    pub fn with_data(&self, data: DMatrix<Complex64>) -> Result<Self> {
        Self::new(
            OperatorKind::Other,
            self.label.clone(),
            self.rows.clone(),
            self.cols.clone(),
            data,
        )
    }

    /// Entry at (row element, column element), if both are indexed.
    pub fn entry(&self, row: &GroupElement, col: &GroupElement) -> Option<Complex64> {
        Some(self.data[(self.rows.position(row)?, self.cols.position(col)?)])
    }

    /// Conjugate transpose, with row and column slabs exchanged.
    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix {
            kind: OperatorKind::Other,
            label: format!("{}*", self.label),
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            data: self.data.adjoint(),
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols.len(),
                found: v.len(),
            });
        }
        let x = nalgebra::DVector::from_column_slice(v);
        Ok((&self.data * x).iter().copied().collect())
    }

    /// Matrix product `self · rhs`; the inner slabs must coincide.
    pub fn compose(&self, rhs: &OperatorMatrix) -> Result<OperatorMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::InvalidArgument(
                "inner index slabs of the product differ".into(),
            ));
        }
        Ok(OperatorMatrix {
            kind: OperatorKind::Other,
            label: format!("{}·{}", self.label, rhs.label),
            rows: self.rows.clone(),
            cols: rhs.cols.clone(),
            data: &self.data * &rhs.data,
        })
    }

    /// Writes `<stem>.json` (indices and metadata) and `<stem>.csv` (entries).
    pub fn export(&self, dir: &Path, stem: &str) -> Result<()> {
        self.export_with(dir, stem, None)
    }

    /// As [`OperatorMatrix::export`], stamping both files with `provenance`.
    pub fn export_with(&self, dir: &Path, stem: &str, provenance: Option<&Provenance>) -> Result<()> {
        let meta = MatrixMeta {
            provenance: provenance.cloned(),
            kind: self.kind,
            label: self.label.clone(),
            order: self.rows.spec().clone(),
            row_sign: self.rows.sign(),
            col_sign: self.cols.sign(),
            rows: self.rows.elements().to_vec(),
            cols: self.cols.elements().to_vec(),
        };
        let mut json = serde_json::to_vec_pretty(&meta)?;
        json.push(b'\n');
        write_atomic(&dir.join(format!("{stem}.json")), &json)?;

        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["row", "col", "re", "im"])?;
        for i in 0..self.data.nrows() {
            for j in 0..self.data.ncols() {
                let z = self.data[(i, j)];
                w.write_record([i.to_string(), j.to_string(), fmt_f64(z.re), fmt_f64(z.im)])?;
            }
        }
        let mut bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        if let Some(p) = provenance {
            bytes = p.prefix_csv(&bytes);
        }
        write_atomic(&dir.join(format!("{stem}.csv")), &bytes)?;
        Ok(())
    }

    /// Reads back a pair written by [`OperatorMatrix::export`].
    pub fn import(dir: &Path, stem: &str) -> Result<OperatorMatrix> {
        let meta: MatrixMeta =
            serde_json::from_slice(&std::fs::read(dir.join(format!("{stem}.json")))?)?;
        let rows = ConeSlab::from_elements(meta.order.clone(), meta.row_sign, meta.rows)?;
        let cols = ConeSlab::from_elements(meta.order, meta.col_sign, meta.cols)?;
        let mut data = DMatrix::from_element(rows.len(), cols.len(), Complex64::default());
        let mut seen = 0usize;
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_path(dir.join(format!("{stem}.csv")))?;
        for rec in reader.records() {
            let rec = rec?;
            let field = |k: usize| rec.get(k).ok_or_else(|| Error::Parse("short csv record".into()));
            let parse_idx = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(e.to_string()));
            let parse_f = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(e.to_string()));
            let (i, j) = (parse_idx(field(0)?)?, parse_idx(field(1)?)?);
            if i >= rows.len() || j >= cols.len() {
                return Err(Error::Parse(format!("entry ({i},{j}) out of range")));
            }
            data[(i, j)] = Complex64::new(parse_f(field(2)?)?, parse_f(field(3)?)?);
            seen += 1;
        }
        if seen != rows.len() * cols.len() {
            return Err(Error::Parse(format!(
                "expected {} entries, found {seen}",
                rows.len() * cols.len()
            )));
        }
        OperatorMatrix::new(meta.kind, meta.label, rows, cols, data)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
    kind: OperatorKind,
    label: String,
    order: OrderSpec,
    row_sign: Sign,
    col_sign: Sign,
    rows: Vec<GroupElement>,
    cols: Vec<GroupElement>,
}

fn require_positive(slab: &ConeSlab) -> Result<()> {
    if slab.sign() != Sign::Positive {
        return Err(Error::InvalidArgument("expected a positive cone slab".into()));
    }
    Ok(())
}

fn require_dim(f: &FourierCoeffs, spec: &OrderSpec) -> Result<()> {
    if f.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: f.dim(),
        });
    }
    Ok(())
}

/// Rejects coefficients that sit in X₋.
fn require_cone_support(a: &FourierCoeffs, spec: &OrderSpec) -> Result<()> {
    require_dim(a, spec)?;
    match a
        .iter()
        .find(|(n, c)| spec.is_negative(n) && c.norm() > PRUNE_THRESHOLD)
    {
        Some((n, c)) => Err(Error::SupportOutsideCone {
            at: n.clone(),
            value: c.norm(),
        }),
        None => Ok(()),
    }
}

/// Coefficients of a vector indexed by `slab`.
pub fn slab_vector_to_coeffs(slab: &ConeSlab, values: &[Complex64]) -> Result<FourierCoeffs> {
    if values.len() != slab.len() {
        return Err(Error::DimensionMismatch {
            expected: slab.len(),
            found: values.len(),
        });
    }
    FourierCoeffs::from_pairs(
        slab.spec().dim(),
        slab.elements().iter().cloned().zip(values.iter().copied()),
    )
}

/// Restriction of `f` to the elements of `slab`, in slab order.
pub fn coeffs_on_slab(f: &FourierCoeffs, slab: &ConeSlab) -> Vec<Complex64> {
    slab.elements().iter().map(|n| f.get(n)).collect()
}

/// Hankel matrix on l₂(X₊): entry (ξ, χ) = a(χ+ξ).
pub fn hankel_matrix(a: &FourierCoeffs, slab: &ConeSlab) -> Result<OperatorMatrix> {
    require_positive(slab)?;
    require_cone_support(a, slab.spec())?;
    Ok(OperatorMatrix::assemble(
        OperatorKind::Hankel,
        slab.clone(),
        slab.clone(),
        |xi, chi| a.get(&(chi + xi)),
    ))
}

/// The bilinear form `Σ k(χ+η)·x(χ)·y(η)` over the slab.
pub fn hankel_form(
    k: &FourierCoeffs,
    slab: &ConeSlab,
    x: &[Complex64],
    y: &[Complex64],
) -> Result<Complex64> {
    require_positive(slab)?;
    require_cone_support(k, slab.spec())?;
    if x.len() != slab.len() || y.len() != slab.len() {
        return Err(Error::DimensionMismatch {
            expected: slab.len(),
            found: if x.len() != slab.len() { x.len() } else { y.len() },
        });
    }
    let mut acc = Complex64::default();
    for (chi, xv) in slab.elements().iter().zip(x) {
        for (eta, yv) in slab.elements().iter().zip(y) {
            acc += k.get(&(chi + eta)) * xv * yv;
        }
    }
    Ok(acc)
}

/// `H_φ = P₋M_φ` from X₊ ∩ box to X₋ ∩ box: entry (η, χ) = φ̂(η − χ).
pub fn hphi_matrix(phi: &FourierCoeffs, spec: &OrderSpec, radius: i64) -> Result<OperatorMatrix> {
    require_dim(phi, spec)?;
    let rows = cone_slab(spec, Sign::Negative, radius)?;
    let cols = cone_slab(spec, Sign::Positive, radius)?;
    Ok(OperatorMatrix::assemble(
        OperatorKind::Hphi,
        rows,
        cols,
        |eta, chi| phi.get(&(eta - chi)),
    ))
}

/// `G_ν f = (ν∗f)|X₋`, evaluated by sparse convolution and cut to the box.
pub fn gnu_apply(
    nu: &FourierCoeffs,
    f: &FourierCoeffs,
    spec: &OrderSpec,
    out_radius: i64,
) -> Result<FourierCoeffs> {
    require_dim(nu, spec)?;
    require_cone_support(f, spec)?;
    let conv = convolve(nu, f)?;
    Ok(conv.restrict(|n| spec.is_negative(n) && n.sup_norm() <= out_radius))
}

/// `T_φ = P₊M_φ`: entry (ξ, χ) = φ̂(ξ − χ).
pub fn toeplitz_matrix(phi: &FourierCoeffs, slab: &ConeSlab) -> Result<OperatorMatrix> {
    require_positive(slab)?;
    require_dim(phi, slab.spec())?;
    Ok(OperatorMatrix::assemble(
        OperatorKind::Toeplitz,
        slab.clone(),
        slab.clone(),
        |xi, chi| phi.get(&(xi - chi)),
    ))
}

/// `Γ_ψ f = P₊J(ψf)`: entry (ξ, χ) = ψ̂(−(χ+ξ)).
pub fn gamma_psi_matrix(psi: &FourierCoeffs, slab: &ConeSlab) -> Result<OperatorMatrix> {
    require_positive(slab)?;
    require_dim(psi, slab.spec())?;
    Ok(OperatorMatrix::assemble(
        OperatorKind::GammaPsi,
        slab.clone(),
        slab.clone(),
        |xi, chi| psi.get(&-&(chi + xi)),
    ))
}

/// `S_χ e_η = e_{η+χ}` on the slab; the adjoint is the transpose.
pub fn shift_matrix(chi: &GroupElement, slab: &ConeSlab) -> Result<OperatorMatrix> {
    require_positive(slab)?;
    slab.spec().check_dim(chi)?;
    if slab.spec().is_negative(chi) {
        return Err(Error::InvalidArgument(format!("shift {chi} is not in X₊")));
    }
    Ok(OperatorMatrix::assemble(
        OperatorKind::Shift,
        slab.clone(),
        slab.clone(),
        |xi, eta| {
            if *xi == eta + chi {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::default()
            }
        },
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutationWitness {
    pub shift: GroupElement,
    pub xi: GroupElement,
    pub eta: GroupElement,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutationReport {
    pub passed: bool,
    pub max_residual: f64,
    pub checked: usize,
    /// Location of the largest residual.
    pub witness: Option<CommutationWitness>,
}

/// Checks `S_χ* T = T S_χ` entrywise on the interior of the slab.
///
/// For each shift χ and interior ξ, η with η+χ and ξ+χ in the slab it
/// compares `T[η+χ, ξ]` with `T[η, ξ+χ]`. The interior consists of the slab
/// elements with sup-norm at most `radius − margin`.
pub fn shift_commutation_check(
    t: &OperatorMatrix,
    shifts: &[GroupElement],
    margin: i64,
) -> Result<CommutationReport> {
    let slab = t.rows();
    if slab != t.cols() || slab.sign() != Sign::Positive {
        return Err(Error::InvalidArgument(
            "commutation check needs a square matrix on a positive slab".into(),
        ));
    }
    let spec = slab.spec();
    for chi in shifts {
        spec.check_dim(chi)?;
        if spec.is_negative(chi) {
            return Err(Error::InvalidArgument(format!("shift {chi} is not in X₊")));
        }
    }
    let limit = slab.radius() - margin;
    let interior: Vec<(usize, &GroupElement)> = slab
        .elements()
        .iter()
        .enumerate()
        .filter(|(_, n)| n.sup_norm() <= limit)
        .collect();
    if interior.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no interior left after margin {margin}"
        )));
    }

    let data = t.data();
    let mut max_residual = 0.0;
    let mut checked = 0;
    let mut witness = None;
    for chi in shifts {
        for &(xi_pos, xi) in &interior {
            let Some(xi_shift) = slab.position(&(xi + chi)) else {
                continue;
            };
            for &(eta_pos, eta) in &interior {
                let Some(eta_shift) = slab.position(&(eta + chi)) else {
                    continue;
                };
                let residual = (data[(eta_shift, xi_pos)] - data[(eta_pos, xi_shift)]).norm();
                checked += 1;
                if residual > max_residual || witness.is_none() {
                    max_residual = f64::max(max_residual, residual);
                    witness = Some(CommutationWitness {
                        shift: chi.clone(),
                        xi: xi.clone(),
                        eta: eta.clone(),
                        residual,
                    });
                }
            }
        }
    }
    Ok(CommutationReport {
        passed: max_residual < STRUCTURE_TOL,
        max_residual,
        checked,
        witness,
    })
}

/// Relabels the X₋ rows of an H_φ truncation into X₊ via `η ↦ −η − χ₁`.
///
/// The result is square on the positive elements χ whose partner row
/// `−χ − χ₁` is present, and is a Hankel matrix with `a(χ) = φ̂(−χ − χ₁)`.
pub fn reindex_lemma2(m: &OperatorMatrix, spec: &OrderSpec) -> Result<OperatorMatrix> {
    let chi1 = spec
        .smallest_positive_element()
        .ok_or(Error::NoSmallestPositive)?;
    if m.rows().sign() != Sign::Negative || m.cols().sign() != Sign::Positive {
        return Err(Error::InvalidArgument(
            "expected rows in X₋ and columns in X₊".into(),
        ));
    }
    if m.rows().spec() != spec {
        return Err(Error::InvalidArgument("matrix built for another order".into()));
    }
    let partner = |chi: &GroupElement| -&(chi + &chi1);
    let slab = m.cols().filter(|chi| m.rows().contains(&partner(chi)));
    if slab.is_empty() {
        return Err(Error::InvalidArgument(
            "row and column slabs share no re-indexed elements".into(),
        ));
    }
    let data = DMatrix::from_fn(slab.len(), slab.len(), |i, j| {
        let row = m.rows().position(&partner(&slab.elements()[i])).unwrap();
        let col = m.cols().position(&slab.elements()[j]).unwrap();
        m.data()[(row, col)]
    });
    OperatorMatrix::new(
        OperatorKind::Reindexed,
        format!("{}/reindexed", m.label()),
        slab.clone(),
        slab,
        data,
    )
}

/// Hankel data `a(χ) = φ̂(−χ − χ₁)` on X₊ attached to a symbol φ.
pub fn reindexed_symbol(phi: &FourierCoeffs, spec: &OrderSpec) -> Result<FourierCoeffs> {
    require_dim(phi, spec)?;
    let chi1 = spec
        .smallest_positive_element()
        .ok_or(Error::NoSmallestPositive)?;
    FourierCoeffs::from_pairs(
        spec.dim(),
        phi.iter()
            .filter(|(n, _)| spec.is_negative(n))
            .map(|(n, c)| (&(-n) - &chi1, *c)),
    )
}
