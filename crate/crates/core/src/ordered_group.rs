//! The lattice Z^d with a translation-invariant total order.
//!
//! An order is determined by its positive cone X₊ (which contains 0): `m ≤ n`
//! iff `n − m ∈ X₊`. Two families are supported, both decided in exact
//! integer arithmetic:
//!
//! * lexicographic order on Z^d, which has a smallest positive element
//!   `(0, …, 0, 1)`;
//! * the quadratic order on Z² given by the sign of `n₁ + n₂·√m` for a
//!   non-square `m`, which is dense and has no smallest positive element.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of Z^d, identified with the character `t ↦ t₁^{n₁}⋯t_d^{n_d}` of T^d.
///
/// The derived `Ord` is plain coordinatewise lexicographic order and is only
/// used for storage (map keys, deterministic iteration). Group order lives in
/// [`OrderSpec`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(Vec<i64>);

impl GroupElement {
    pub fn new(coords: Vec<i64>) -> Self {
        GroupElement(coords)
    }

    pub fn zero(dim: usize) -> Self {
        GroupElement(vec![0; dim])
    }

    /// Unit vector along `axis`.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = vec![0; dim];
        v[axis] = 1;
        GroupElement(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Largest absolute coordinate.
    pub fn sup_norm(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn scale(&self, k: i64) -> Self {
        GroupElement(self.0.iter().map(|c| c * k).collect())
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl From<Vec<i64>> for GroupElement {
    fn from(v: Vec<i64>) -> Self {
        GroupElement(v)
    }
}

impl<const N: usize> From<[i64; N]> for GroupElement {
    fn from(v: [i64; N]) -> Self {
        GroupElement(v.to_vec())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: &GroupElement) -> GroupElement {
        debug_assert_eq!(self.dim(), rhs.dim());
        GroupElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: &GroupElement) -> GroupElement {
        debug_assert_eq!(self.dim(), rhs.dim());
        GroupElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement(self.0.iter().map(|c| -c).collect())
    }
}

/// Anything that can answer "is n in X₊?" for points of Z^d.
///
/// Implemented by [`OrderSpec`]; tests implement it for deliberately broken
/// cones to exercise [`validate_order`].
pub trait PositiveCone {
    fn dim(&self) -> usize;
    /// Membership in X₊. Zero is a member.
    fn contains(&self, n: &GroupElement) -> bool;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Lex,
    /// `n ≥ 0` iff `n₁ + n₂·√m ≥ 0`, `m` a positive non-square.
    Quadratic { m: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "OrderSpecRepr", into = "OrderSpecRepr")]
pub struct OrderSpec {
    dim: usize,
    kind: OrderKind,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrderSpecRepr {
    dim: usize,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<u64>,
}

impl TryFrom<OrderSpecRepr> for OrderSpec {
    type Error = Error;

    fn try_from(r: OrderSpecRepr) -> Result<Self> {
        match (r.kind.as_str(), r.m) {
            ("lex", None) => OrderSpec::lex(r.dim),
            ("lex", Some(_)) => Err(Error::Parse("lex order takes no \"m\"".into())),
            ("quadratic", Some(m)) => {
                if r.dim != 2 {
                    return Err(Error::DimensionMismatch {
                        expected: 2,
                        found: r.dim,
                    });
                }
                OrderSpec::quadratic(m)
            }
            ("quadratic", None) => Err(Error::Parse("quadratic order requires \"m\"".into())),
            (other, _) => Err(Error::Parse(format!("unknown order kind {other:?}"))),
        }
    }
}

impl From<OrderSpec> for OrderSpecRepr {
    fn from(s: OrderSpec) -> Self {
        match s.kind {
            OrderKind::Lex => OrderSpecRepr {
                dim: s.dim,
                kind: "lex".into(),
                m: None,
            },
            OrderKind::Quadratic { m } => OrderSpecRepr {
                dim: 2,
                kind: "quadratic".into(),
                m: Some(m),
            },
        }
    }
}

fn is_square(m: u64) -> bool {
    let r = (m as f64).sqrt() as u64;
    (r.saturating_sub(1)..=r + 1).any(|k| k * k == m)
}

/// Exact sign of `a + b·√m` for non-square `m`.
fn surd_sign(a: i64, b: i64, m: u64) -> Ordering {
    match (a.cmp(&0), b.cmp(&0)) {
        (Ordering::Equal, Ordering::Equal) => Ordering::Equal,
        (Ordering::Less | Ordering::Equal, Ordering::Less | Ordering::Equal) => Ordering::Less,
        (Ordering::Greater | Ordering::Equal, Ordering::Greater | Ordering::Equal) => {
            Ordering::Greater
        }
        _ => {
            let a2 = (a as i128) * (a as i128);
            let mb2 = (m as i128) * (b as i128) * (b as i128);
            // a² ≠ m·b² because m is not a square.
            let a_dominates = a2 > mb2;
            match (a > 0, a_dominates) {
                (true, true) | (false, false) => Ordering::Greater,
                _ => Ordering::Less,
            }
        }
    }
}

impl OrderSpec {
    pub fn lex(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        Ok(OrderSpec {
            dim,
            kind: OrderKind::Lex,
        })
    }

    pub fn quadratic(m: u64) -> Result<Self> {
        if m == 0 || is_square(m) {
            return Err(Error::InvalidArgument(format!(
                "quadratic order needs a positive non-square m, got {m}"
            )));
        }
        Ok(OrderSpec {
            dim: 2,
            kind: OrderKind::Quadratic { m },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    /// Position of `n` relative to 0.
    pub fn signum(&self, n: &GroupElement) -> Ordering {
        debug_assert_eq!(n.dim(), self.dim);
        match self.kind {
            OrderKind::Lex => n
                .coords()
                .iter()
                .find(|&&c| c != 0)
                .map_or(Ordering::Equal, |c| c.cmp(&0)),
            OrderKind::Quadratic { m } => surd_sign(n.coords()[0], n.coords()[1], m),
        }
    }

    /// `n ∈ X₊ \ {0}`.
    pub fn is_strictly_positive(&self, n: &GroupElement) -> bool {
        self.signum(n) == Ordering::Greater
    }

    /// `n ∈ X₋ = −X₊ \ {0}`.
    pub fn is_negative(&self, n: &GroupElement) -> bool {
        self.signum(n) == Ordering::Less
    }

    /// Group order without dimension checks; used as a sort comparator.
    pub fn cmp_elements(&self, m: &GroupElement, n: &GroupElement) -> Ordering {
        self.signum(&(m - n))
    }

    /// The smallest element of X₊ \ {0}, when the order has one.
    pub fn smallest_positive_element(&self) -> Option<GroupElement> {
        match self.kind {
            OrderKind::Lex => Some(GroupElement::unit(self.dim, self.dim - 1)),
            OrderKind::Quadratic { .. } => None,
        }
    }

    pub fn check_dim(&self, n: &GroupElement) -> Result<()> {
        n.check_dim(self.dim)
    }
}

impl PositiveCone for OrderSpec {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, n: &GroupElement) -> bool {
        self.signum(n) != Ordering::Less
    }
}

impl fmt::Display for OrderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            OrderKind::Lex => write!(f, "lex(d={})", self.dim),
            OrderKind::Quadratic { m } => write!(f, "quadratic(m={m})"),
        }
    }
}

/// Order relation between `m` and `n`.
pub fn compare(spec: &OrderSpec, m: &GroupElement, n: &GroupElement) -> Result<Ordering> {
    spec.check_dim(m)?;
    spec.check_dim(n)?;
    Ok(spec.cmp_elements(m, n))
}

/// All points of `[−radius, radius]^dim`, ordered by sup-norm and then
/// coordinatewise.
pub fn box_elements(dim: usize, radius: i64) -> Vec<GroupElement> {
    let side = (2 * radius + 1) as usize;
    let total = side.pow(dim as u32);
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![-radius; dim];
    for _ in 0..total {
        out.push(GroupElement(cur.clone()));
        for axis in (0..dim).rev() {
            if cur[axis] < radius {
                cur[axis] += 1;
                break;
            }
            cur[axis] = -radius;
        }
    }
    out.sort_by(|a, b| a.sup_norm().cmp(&b.sup_norm()).then_with(|| a.cmp(b)));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// 0 ∈ X₊.
    ZeroInCone,
    /// X₊ ∩ (−X₊) = {0}.
    Antisymmetry,
    /// X₊ ∪ (−X₊) = Z^d.
    Totality,
    /// X₊ + X₊ ⊆ X₊.
    AdditiveClosure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    /// First offending element or pair found.
    pub witness: Vec<GroupElement>,
    /// Number of offending elements or pairs in the box.
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub dim: usize,
    pub radius: i64,
    pub checked_elements: usize,
    pub checked_pairs: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn record(violations: &mut Vec<Violation>, axiom: Axiom, witness: Vec<GroupElement>) {
    match violations.iter_mut().find(|v| v.axiom == axiom) {
        Some(v) => v.count += 1,
        None => violations.push(Violation {
            axiom,
            witness,
            count: 1,
        }),
    }
}

/// Exhaustively checks the cone axioms on the box `[−radius, radius]^d`.
///
/// Additive closure is checked for every pair of cone elements whose sum
/// stays inside the box.
pub fn validate_order<C: PositiveCone + ?Sized>(cone: &C, radius: i64) -> Result<ValidationReport> {
    if radius < 1 {
        return Err(Error::InvalidArgument("radius must be at least 1".into()));
    }
    let dim = cone.dim();
    if dim == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    let elements = box_elements(dim, radius);
    let mut violations = Vec::new();

    let zero = GroupElement::zero(dim);
    if !cone.contains(&zero) {
        record(&mut violations, Axiom::ZeroInCone, vec![zero.clone()]);
    }

    let mut positive = Vec::new();
    for n in &elements {
        if n.is_zero() {
            continue;
        }
        let neg = -n;
        match (cone.contains(n), cone.contains(&neg)) {
            (true, true) => record(&mut violations, Axiom::Antisymmetry, vec![n.clone(), neg]),
            (false, false) => record(&mut violations, Axiom::Totality, vec![n.clone()]),
            _ => {}
        }
        if cone.contains(n) {
            positive.push(n);
        }
    }
    if cone.contains(&zero) {
        positive.push(&zero);
    }

    let mut checked_pairs = 0;
    for (i, p) in positive.iter().enumerate() {
        for q in &positive[i..] {
            let s = *p + *q;
            if s.sup_norm() > radius {
                continue;
            }
            checked_pairs += 1;
            if !cone.contains(&s) {
                record(
                    &mut violations,
                    Axiom::AdditiveClosure,
                    vec![(*p).clone(), (*q).clone()],
                );
            }
        }
    }

    Ok(ValidationReport {
        dim,
        radius,
        checked_elements: elements.len(),
        checked_pairs,
        violations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallestPositive {
    pub element: Option<GroupElement>,
    /// For dense orders: strictly decreasing positive elements, each the
    /// minimum of X₊ \ {0} over a larger box.
    pub certificate: Vec<GroupElement>,
}

/// Finds the smallest positive element, or evidence that none exists.
pub fn smallest_positive(spec: &OrderSpec, search_radius: i64) -> Result<SmallestPositive> {
    if search_radius < 1 {
        return Err(Error::InvalidArgument("search radius must be at least 1".into()));
    }
    if let Some(e) = spec.smallest_positive_element() {
        return Ok(SmallestPositive {
            element: Some(e),
            certificate: Vec::new(),
        });
    }
    // Shell by shell: the running minimum over box(r) can only move down.
    let dim = spec.dim();
    let mut best: Option<GroupElement> = None;
    let mut certificate: Vec<GroupElement> = Vec::new();
    for r in 1..=search_radius {
        for n in box_elements(dim, r).into_iter().filter(|n| n.sup_norm() == r) {
            if !spec.is_strictly_positive(&n) {
                continue;
            }
            let better = match &best {
                None => true,
                Some(b) => spec.cmp_elements(&n, b) == Ordering::Less,
            };
            if better {
                best = Some(n);
            }
        }
        if let Some(b) = &best {
            if certificate.last() != Some(b) {
                certificate.push(b.clone());
            }
        }
    }
    Ok(SmallestPositive {
        element: None,
        certificate,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    /// X₊ (with 0) for `Positive`, X₋ (without 0) for `Negative`.
    pub fn admits(self, spec: &OrderSpec, n: &GroupElement) -> bool {
        match self {
            Sign::Positive => !spec.is_negative(n),
            Sign::Negative => spec.is_negative(n),
        }
    }
}

/// A finite, strictly ascending set of elements of one half of the group.
#[derive(Clone, Debug)]
pub struct ConeSlab {
    spec: OrderSpec,
    sign: Sign,
    elements: Vec<GroupElement>,
    index: HashMap<GroupElement, usize>,
}

impl PartialEq for ConeSlab {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.sign == other.sign && self.elements == other.elements
    }
}

impl ConeSlab {
    /// Builds a slab from explicit elements, which must lie on the `sign`
    /// side and be strictly ascending in the order.
    pub fn from_elements(spec: OrderSpec, sign: Sign, elements: Vec<GroupElement>) -> Result<Self> {
        for n in &elements {
            spec.check_dim(n)?;
            if !sign.admits(&spec, n) {
                return Err(Error::InvalidArgument(format!(
                    "{n} does not belong to the {sign:?} side of {spec}"
                )));
            }
        }
        for w in elements.windows(2) {
            if spec.cmp_elements(&w[0], &w[1]) != Ordering::Less {
                return Err(Error::InvalidArgument(format!(
                    "slab elements not strictly ascending at {} , {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self::new_unchecked(spec, sign, elements))
    }

    fn new_unchecked(spec: OrderSpec, sign: Sign, elements: Vec<GroupElement>) -> Self {
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        ConeSlab {
            spec,
            sign,
            elements,
            index,
        }
    }

    pub fn spec(&self) -> &OrderSpec {
        &self.spec
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, n: &GroupElement) -> Option<usize> {
        self.index.get(n).copied()
    }

    pub fn contains(&self, n: &GroupElement) -> bool {
        self.index.contains_key(n)
    }

    /// Largest sup-norm among the elements.
    pub fn radius(&self) -> i64 {
        self.elements.iter().map(|n| n.sup_norm()).max().unwrap_or(0)
    }

    /// Sub-slab of the elements satisfying `keep`, order preserved.
    pub fn filter(&self, keep: impl Fn(&GroupElement) -> bool) -> ConeSlab {
        let elements = self.elements.iter().filter(|n| keep(n)).cloned().collect();
        Self::new_unchecked(self.spec.clone(), self.sign, elements)
    }
}

/// X₊ ∩ box (with 0) or X₋ ∩ box (without 0), sorted ascending.
pub fn cone_slab(spec: &OrderSpec, sign: Sign, box_radius: i64) -> Result<ConeSlab> {
    if box_radius < 1 {
        return Err(Error::InvalidArgument("box radius must be at least 1".into()));
    }
    let mut elements: Vec<GroupElement> = box_elements(spec.dim(), box_radius)
        .into_iter()
        .filter(|n| sign.admits(spec, n))
        .collect();
    elements.sort_by(|a, b| spec.cmp_elements(a, b));
    Ok(ConeSlab::new_unchecked(spec.clone(), sign, elements))
}
