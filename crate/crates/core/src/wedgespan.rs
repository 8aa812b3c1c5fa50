//! Abelian-cycle images in ∧²B₂.
//!
//! A wedge element is a vector over F₂ indexed by unordered pairs `i < j` of
//! canonical B₂ basis positions, flattened row by row:
//! `slot(i, j) = i·d − i(i+1)/2 + (j − i − 1)` with `d = dim B₂`.
//! Persisted reports refer to these slot numbers, so the layout is frozen.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bcjmap::{index_matched_unchecked, sigma_bp, sigma_separating, BPMap, SeparatingTwist};
use crate::boolring::{b2_dim, b2_index, B2Basis, BoolPoly, Monomial};
use crate::gf2::{BitVec, SpanBasis};
use crate::surface::{intersect_masks, Genus, HClass, Spine};
use crate::{Error, Result};

/// `C(d, 2)` for `d = dim B₂`.
pub fn wedge_dim(g: Genus) -> usize {
    let d = b2_dim(g);
    d * (d - 1) / 2
}

/// Slot of the unordered pair `{i, j}` (`i ≠ j`) of B₂ basis positions.
pub fn slot(d: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(i != j && j < d);
    i * d - i * (i + 1) / 2 + (j - i - 1)
}

/// Inverse of [`slot`].
pub fn slot_pair(d: usize, s: usize) -> (usize, usize) {
    let mut i = 0;
    let mut start = 0;
    loop {
        let row = d - i - 1;
        if s < start + row {
            return (i, i + 1 + s - start);
        }
        start += row;
        i += 1;
    }
}

/// An element of ∧²B₂.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WedgeElem {
    genus: Genus,
    coords: BitVec,
}

impl WedgeElem {
    pub fn zero(g: Genus) -> Self {
        WedgeElem {
            genus: g,
            coords: BitVec::zeros(wedge_dim(g)),
        }
    }

    /// The basis element `m1 ∧ m2`.
    pub fn basis(g: Genus, m1: Monomial, m2: Monomial) -> Result<Self> {
        if m1 == m2 {
            return Err(Error::Argument("m ∧ m has no slot".to_string()));
        }
        let d = b2_dim(g);
        let mut w = Self::zero(g);
        w.coords
            .set(slot(d, b2_index(g, m1)?, b2_index(g, m2)?), true);
        Ok(w)
    }

    pub fn from_bits(g: Genus, coords: BitVec) -> Result<Self> {
        if coords.len() != wedge_dim(g) {
            return Err(Error::Dimension {
                expected: wedge_dim(g),
                found: coords.len(),
            });
        }
        Ok(WedgeElem { genus: g, coords })
    }

    pub fn genus(&self) -> Genus {
        self.genus
    }

    pub fn coords(&self) -> &BitVec {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }

    pub fn add(&self, other: &WedgeElem) -> Result<WedgeElem> {
        self.genus.ensure_same(other.genus)?;
        Ok(WedgeElem {
            genus: self.genus,
            coords: self.coords.xor(&other.coords)?,
        })
    }

    /// Nonzero slots as monomial pairs `(m1, m2)` with `m1` first in basis order.
    pub fn terms(&self) -> Vec<(Monomial, Monomial)> {
        let basis = B2Basis::new(self.genus);
        let d = basis.len();
        self.coords
            .ones()
            .map(|s| {
                let (i, j) = slot_pair(d, s);
                (basis.get(i), basis.get(j))
            })
            .collect()
    }

    pub fn render(&self) -> String {
        let terms = self.terms();
        if terms.is_empty() {
            return "0".to_string();
        }
        terms
            .iter()
            .map(|(a, b)| format!("{} ^ {}", a.render(self.genus), b.render(self.genus)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for WedgeElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for WedgeElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WedgeElem[g={}]({})", self.genus, self.render())
    }
}

/// Wedge of two B₂ coordinate vectors.
fn wedge_coords(d: usize, p: &BitVec, q: &BitVec, out: &mut BitVec) {
    for i in p.ones() {
        for j in q.ones() {
            if i != j {
                out.flip(slot(d, i, j));
            }
        }
    }
}

/// Bilinear, alternating product `p ∧ q` of two elements of B₂.
pub fn wedge(p: &BoolPoly, q: &BoolPoly) -> Result<WedgeElem> {
    p.genus().ensure_same(q.genus())?;
    let basis = B2Basis::new(p.genus());
    let (pc, qc) = (basis.coords(p)?, basis.coords(q)?);
    let mut w = WedgeElem::zero(p.genus());
    wedge_coords(basis.len(), &pc, &qc, &mut w.coords);
    Ok(w)
}

/// A generator of the Torelli group described by curve data.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CurveDescriptor {
    Separating(SeparatingTwist),
    Bp(BPMap),
}

impl CurveDescriptor {
    pub fn sigma(&self) -> Result<BoolPoly> {
        match self {
            CurveDescriptor::Separating(t) => sigma_separating(t),
            CurveDescriptor::Bp(m) => sigma_bp(m),
        }
    }

    pub fn genus(&self) -> Genus {
        match self {
            CurveDescriptor::Separating(t) => t.basis.genus,
            CurveDescriptor::Bp(m) => m.basis.genus,
        }
    }

    /// Handles touched by all curve data.
    pub fn support_mask(&self) -> u64 {
        match self {
            CurveDescriptor::Separating(t) => t.basis.support_mask(),
            CurveDescriptor::Bp(m) => m.support_mask(),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            CurveDescriptor::Separating(t) => &t.label,
            CurveDescriptor::Bp(m) => &m.label,
        }
    }
}

/// Why two descriptors are taken to commute.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Certificate {
    /// Handle supports are disjoint (machine-checked).
    SupportDisjoint,
    /// Two separating twists whose subsurface spans are orthogonal mod 2
    /// (machine-checked). Sp(2g, F₂) is transitive on orthogonal pairs of
    /// symplectic subspaces of fixed ranks and lifts to the mapping class
    /// group, so such spans bound disjoint subsurfaces; σ sees only the spans.
    SymplecticOrthogonal,
    /// Taken from an external source without a machine check.
    Asserted(String),
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::SupportDisjoint => f.write_str("support-disjoint"),
            Certificate::SymplecticOrthogonal => f.write_str("symplectic-orthogonal"),
            Certificate::Asserted(s) => write!(f, "asserted:{s}"),
        }
    }
}

/// Which machine-checked certificates the search may use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Disjointness {
    /// Handle-support disjointness only.
    Support,
    /// Support disjointness, or orthogonal spans for two separating twists.
    #[default]
    Orthogonal,
}

impl Disjointness {
    pub fn name(self) -> &'static str {
        match self {
            Disjointness::Support => "support",
            Disjointness::Orthogonal => "orthogonal",
        }
    }
}

fn spans_orthogonal(s1: &SeparatingTwist, s2: &SeparatingTwist) -> Result<bool> {
    for x in s1.basis.classes() {
        for y in s2.basis.classes() {
            if x.intersect(y)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The strongest certificate `mode` allows for the pair, if any.
pub fn certify(
    first: &CurveDescriptor,
    second: &CurveDescriptor,
    mode: Disjointness,
) -> Result<Option<Certificate>> {
    first.genus().ensure_same(second.genus())?;
    if first.support_mask() & second.support_mask() == 0 {
        return Ok(Some(Certificate::SupportDisjoint));
    }
    if mode == Disjointness::Orthogonal {
        if let (CurveDescriptor::Separating(a), CurveDescriptor::Separating(b)) = (first, second) {
            if spans_orthogonal(a, b)? {
                return Ok(Some(Certificate::SymplecticOrthogonal));
            }
        }
    }
    Ok(None)
}

/// A pair of commuting generators `{f, g}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianCycle {
    pub first: CurveDescriptor,
    pub second: CurveDescriptor,
    pub certificate: Certificate,
}

impl AbelianCycle {
    /// Pairs two descriptors whose handle supports are disjoint.
    pub fn support_disjoint(first: CurveDescriptor, second: CurveDescriptor) -> Result<Self> {
        let c = AbelianCycle {
            first,
            second,
            certificate: Certificate::SupportDisjoint,
        };
        c.check_certificate()?;
        Ok(c)
    }

    pub fn check_certificate(&self) -> Result<()> {
        self.first.genus().ensure_same(self.second.genus())?;
        match self.certificate {
            Certificate::SupportDisjoint => {
                let shared = self.first.support_mask() & self.second.support_mask();
                if shared != 0 {
                    return Err(Error::Disjointness(format!(
                        "{} and {} share handle mask {shared:#b}",
                        self.first.label(),
                        self.second.label()
                    )));
                }
            }
            Certificate::SymplecticOrthogonal => {
                let ok = match (&self.first, &self.second) {
                    (CurveDescriptor::Separating(a), CurveDescriptor::Separating(b)) => {
                        spans_orthogonal(a, b)?
                    }
                    _ => false,
                };
                if !ok {
                    return Err(Error::Disjointness(format!(
                        "{} and {} do not have orthogonal separating spans",
                        self.first.label(),
                        self.second.label()
                    )));
                }
            }
            Certificate::Asserted(_) => {}
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        format!("{{{}, {}}}", self.first.label(), self.second.label())
    }

    pub fn swapped(&self) -> AbelianCycle {
        AbelianCycle {
            first: self.second.clone(),
            second: self.first.clone(),
            certificate: self.certificate.clone(),
        }
    }
}

/// `σ_*({f, g}) = σ(f) ∧ σ(g)`.
pub fn cycle_image(c: &AbelianCycle) -> Result<WedgeElem> {
    c.check_certificate()?;
    let (p, q) = (c.first.sigma()?, c.second.sigma()?);
    wedge(&p, &q)
}

fn subsets_of_size(n: usize, k: usize) -> Vec<u64> {
    // lexicographic on sorted element lists
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.iter().fold(0u64, |m, &i| m | 1 << i));
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] < n - k + pos {
                break;
            }
            if pos == 0 && idx[0] >= n - k {
                return out;
            }
        }
        idx[pos] += 1;
        for t in pos + 1..k {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

fn coord_mask_of_handles(g: Genus, handles: u64) -> u64 {
    handles | handles << g.get()
}

fn spine_label(s: &Spine) -> String {
    format!("spine({}; {})", s.x, s.y)
}

/// All genus-1 spines `(x, y)` with `x·y = 1` whose handle support has size at
/// most `max_support`, in a fixed order: by support size, then support
/// (lexicographic), then `x`, then `y` as coordinate masks.
pub fn enumerate_spines(g: Genus, max_support: usize) -> Vec<Spine> {
    let n = g.get() as usize;
    let mut out = Vec::new();
    for size in 1..=max_support.min(n) {
        for handles in subsets_of_size(n, size) {
            let cm = coord_mask_of_handles(g, handles);
            let coords: Vec<usize> = (0..g.rank()).filter(|k| cm >> k & 1 == 1).collect();
            let count = 1u64 << coords.len();
            let expand = |bits: u64| {
                coords
                    .iter()
                    .enumerate()
                    .filter(|(t, _)| bits >> t & 1 == 1)
                    .fold(0u64, |m, (_, &k)| m | 1 << k)
            };
            let mut local = Vec::new();
            for xb in 1..count {
                let x = HClass::from_mask(g, expand(xb));
                for yb in 1..count {
                    let y = HClass::from_mask(g, expand(yb));
                    if x.support_mask() | y.support_mask() != handles {
                        continue;
                    }
                    if x.intersect(&y).unwrap_or(false) {
                        local.push(Spine { x: x.clone(), y });
                    }
                }
            }
            local.sort_by_key(|s| (s.x.mask(), s.y.mask()));
            out.extend(local);
        }
    }
    out
}

/// Bounding-pair descriptors built on each spine: `C` ranges over nonzero
/// classes supported in the spine's handles, orthogonal to it, and giving a
/// σ value of degree at most 2.
fn bp_descriptors(spines: &[Spine]) -> Vec<CurveDescriptor> {
    let mut out = Vec::new();
    for s in spines {
        let g = s.genus();
        let cm = coord_mask_of_handles(g, s.support_mask());
        let mut c = cm;
        // iterate nonzero submasks of cm in increasing order
        let mut subs = Vec::new();
        while c != 0 {
            subs.push(c);
            c = (c - 1) & cm;
        }
        subs.reverse();
        for cmask in subs {
            let cc = HClass::from_mask(g, cmask);
            let Ok(m) = BPMap::new(s.to_basis(), cc.clone(), format!("bp({}; {}; C={})", s.x, s.y, cc))
            else {
                continue;
            };
            if let Ok(sig) = sigma_bp(&m) {
                if sig.degree().is_some_and(|d| d <= 2) {
                    out.push(CurveDescriptor::Bp(m));
                }
            }
        }
    }
    out
}

fn descriptors(g: Genus, max_support: usize, include_bp: bool) -> Vec<CurveDescriptor> {
    let spines = enumerate_spines(g, max_support);
    let mut out: Vec<CurveDescriptor> = spines
        .iter()
        .map(|s| {
            CurveDescriptor::Separating(SeparatingTwist {
                basis: s.to_basis(),
                label: spine_label(s),
            })
        })
        .collect();
    if include_bp {
        out.extend(bp_descriptors(&spines));
    }
    out
}

/// Deterministic stream of certified abelian cycles built from genus-1
/// spines (and optionally bounding-pair maps). Each unordered pair is
/// emitted once, ordered by position in the descriptor list.
pub fn enumerate_spine_cycles(
    g: Genus,
    max_support: usize,
    include_bp: bool,
    mode: Disjointness,
) -> impl Iterator<Item = AbelianCycle> {
    let descs = descriptors(g, max_support.max(1), include_bp);
    let n = descs.len();
    (0..n).flat_map(move |i| {
        let descs = descs.clone();
        (i + 1..n).filter_map(move |j| {
            let cert = certify(&descs[i], &descs[j], mode).ok()??;
            Some(AbelianCycle {
                first: descs[i].clone(),
                second: descs[j].clone(),
                certificate: cert,
            })
        })
    })
}

/// Descriptors with pairwise distinct σ values, ready for fast wedging.
#[derive(Clone, Debug)]
pub struct SpineSearch {
    genus: Genus,
    d: usize,
    labels: Vec<String>,
    supports: Vec<u64>,
    // spine coordinate masks; None for bounding-pair maps
    spans: Vec<Option<(u64, u64)>>,
    sigmas: Vec<BitVec>,
    mode: Disjointness,
    raw: usize,
}

impl SpineSearch {
    pub fn new(
        g: Genus,
        max_support: usize,
        include_bp: bool,
        mode: Disjointness,
    ) -> Result<Self> {
        let basis = B2Basis::new(g);
        let mut seen = BTreeSet::new();
        let mut s = SpineSearch {
            genus: g,
            d: basis.len(),
            labels: Vec::new(),
            supports: Vec::new(),
            spans: Vec::new(),
            sigmas: Vec::new(),
            mode,
            raw: 0,
        };
        for desc in descriptors(g, max_support.max(1), include_bp) {
            s.raw += 1;
            let sig = desc.sigma()?;
            if sig.is_zero() {
                continue;
            }
            let coords = basis.coords(&sig)?;
            let support = desc.support_mask();
            if !seen.insert((coords.clone(), support)) {
                continue;
            }
            s.labels.push(desc.label().to_string());
            s.supports.push(support);
            s.spans.push(match &desc {
                CurveDescriptor::Separating(t) if t.basis.pairs.len() == 1 => {
                    let (x, y) = &t.basis.pairs[0];
                    Some((x.mask(), y.mask()))
                }
                _ => None,
            });
            s.sigmas.push(coords);
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }

    pub fn raw_descriptors(&self) -> usize {
        self.raw
    }

    fn commute(&self, i: usize, j: usize) -> bool {
        if self.supports[i] & self.supports[j] == 0 {
            return true;
        }
        if self.mode == Disjointness::Support {
            return false;
        }
        match (self.spans[i], self.spans[j]) {
            (Some((x, y)), Some((u, v))) => {
                let g = self.genus;
                !(intersect_masks(g, x, u)
                    || intersect_masks(g, x, v)
                    || intersect_masks(g, y, u)
                    || intersect_masks(g, y, v))
            }
            _ => false,
        }
    }

    /// Visits every disjoint pair whose leading descriptor lies in `leading`.
    fn for_each_cycle(
        &self,
        leading: core::ops::Range<usize>,
        mut f: impl FnMut(usize, usize, &BitVec) -> Result<()>,
    ) -> Result<()> {
        let mut w = BitVec::zeros(wedge_dim(self.genus));
        for i in leading {
            for j in i + 1..self.len() {
                if !self.commute(i, j) {
                    continue;
                }
                w = BitVec::zeros(w.len());
                wedge_coords(self.d, &self.sigmas[i], &self.sigmas[j], &mut w);
                f(i, j, &w)?;
            }
        }
        Ok(())
    }

    /// Span of the cycle images whose leading descriptor lies in `leading`.
    pub fn partial_span(&self, leading: core::ops::Range<usize>) -> Result<SpanBasis> {
        let mut span = SpanBasis::new(wedge_dim(self.genus));
        self.for_each_cycle(leading, |_, _, w| span.insert(w).map(|_| ()))?;
        Ok(span)
    }

    pub fn cycle_label(&self, i: usize, j: usize) -> String {
        format!("{{{}, {}}}", self.labels[i], self.labels[j])
    }
}

/// Dimension bookkeeping for ∧²B₂.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dims {
    pub genus: u32,
    /// dim B₂ = 2g² + g + 1
    pub d: usize,
    pub dim_wedge: usize,
    /// span of non-index-matched basis elements
    pub dim_w: usize,
    /// span of index-matched basis elements
    pub dim_im: usize,
    /// `g(2g−2)(2g−3)`, the both-quadratic distinct-index index-matched count
    pub cubic_type: i64,
}

/// Counts index-matched pairs by scanning all basis pairs.
pub fn dims(g: Genus) -> Dims {
    let basis = B2Basis::new(g);
    let m = basis.monomials();
    let mut dim_im = 0;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            if index_matched_unchecked(g, m[i].mask(), m[j].mask()) {
                dim_im += 1;
            }
        }
    }
    let n = i64::from(g.get());
    let dim_wedge = wedge_dim(g);
    Dims {
        genus: g.get(),
        d: basis.len(),
        dim_wedge,
        dim_w: dim_wedge - dim_im,
        dim_im,
        cubic_type: n * (2 * n - 2) * (2 * n - 3),
    }
}

/// Third finite difference of `dim_im` over `g..g+3`, divided by 6: the
/// leading coefficient if `dim_im` is cubic in `g` (expected 4).
pub fn dim_im_cubic_coefficient(g: u32) -> Result<i64> {
    let vals: Vec<i64> = (g..g + 4)
        .map(|k| Genus::new(k).map(|gg| dims(gg).dim_im as i64))
        .collect::<Result<_>>()?;
    let third = vals[3] - 3 * vals[2] + 3 * vals[1] - vals[0];
    Ok(third / 6)
}

/// The partial Sp-orbits I–XI of non-index-matched basis elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrbitLabel {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
    IX,
    X,
    XI,
}

impl OrbitLabel {
    pub const ALL: [OrbitLabel; 11] = [
        OrbitLabel::I,
        OrbitLabel::II,
        OrbitLabel::III,
        OrbitLabel::IV,
        OrbitLabel::V,
        OrbitLabel::VI,
        OrbitLabel::VII,
        OrbitLabel::VIII,
        OrbitLabel::IX,
        OrbitLabel::X,
        OrbitLabel::XI,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OrbitLabel::I => "I",
            OrbitLabel::II => "II",
            OrbitLabel::III => "III",
            OrbitLabel::IV => "IV",
            OrbitLabel::V => "V",
            OrbitLabel::VI => "VI",
            OrbitLabel::VII => "VII",
            OrbitLabel::VIII => "VIII",
            OrbitLabel::IX => "IX",
            OrbitLabel::X => "X",
            OrbitLabel::XI => "XI",
        }
    }

    /// Representative patterns, with `i, j, k, l` standing for distinct handles.
    pub fn patterns(self) -> &'static [&'static str] {
        match self {
            OrbitLabel::I => &["ai*bi ^ aj*bj"],
            OrbitLabel::II => &["ai*bi ^ aj*bk", "ai*bi ^ aj*ak", "ai*bi ^ bj*bk"],
            OrbitLabel::III => &[
                "ai*aj ^ ak*al",
                "ai*aj ^ ak*bl",
                "ai*aj ^ bk*bl",
                "ai*bj ^ ak*bl",
                "bi*bj ^ bk*bl",
            ],
            OrbitLabel::IV => &[
                "ai*aj ^ ai*ak",
                "ai*aj ^ ai*bk",
                "ai*bj ^ ai*bk",
                "ai*bj ^ ak*bj",
                "ai*bj ^ bj*bk",
                "bi*bj ^ bi*bk",
            ],
            OrbitLabel::V => &["ai ^ aj*bj", "bi ^ aj*bj"],
            OrbitLabel::VI => &["ai ^ ai*aj", "ai ^ ai*bj", "bi ^ aj*bi", "bi ^ bi*bj"],
            OrbitLabel::VII => &[
                "ai ^ aj*ak",
                "ai ^ aj*bk",
                "ai ^ bj*bk",
                "bi ^ aj*ak",
                "bi ^ aj*bk",
                "bi ^ bj*bk",
            ],
            OrbitLabel::VIII => &["1 ^ ai*bi"],
            OrbitLabel::IX => &["1 ^ ai*aj", "1 ^ ai*bj", "1 ^ bi*bj"],
            OrbitLabel::X => &["ai ^ aj", "ai ^ bj", "bi ^ bj"],
            OrbitLabel::XI => &["1 ^ ai", "1 ^ bi"],
        }
    }
}

impl fmt::Display for OrbitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Instantiates a pattern with `i, j, k, l ↦ 1, 2, 3, 4`. Returns `None`
/// when the pattern needs more handles than `g`.
fn instantiate(g: Genus, pattern: &str) -> Option<(Monomial, Monomial)> {
    let n = g.get() as usize;
    let mono = |s: &str| -> Option<Monomial> {
        let s = s.trim();
        if s == "1" {
            return Some(Monomial::ONE);
        }
        let mut mask = 0u64;
        for v in s.split('*') {
            let bytes = v.as_bytes();
            let handle = match bytes[1] {
                b'i' => 1,
                b'j' => 2,
                b'k' => 3,
                b'l' => 4,
                _ => unreachable!("pattern index"),
            };
            if handle > n {
                return None;
            }
            let k = if bytes[0] == b'a' { handle - 1 } else { n + handle - 1 };
            mask |= 1 << k;
        }
        Some(Monomial(mask))
    };
    let (l, r) = pattern.split_once('^')?;
    Some((mono(l)?, mono(r)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitClass {
    pub label: Option<OrbitLabel>,
    /// Wedge slots of the members, increasing.
    pub members: Vec<usize>,
    /// First instantiated pattern found in the class, or its first member.
    pub representative: (Monomial, Monomial),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitReport {
    pub genus: Genus,
    pub classes: Vec<OrbitClass>,
    /// Components that matched no pattern, or several.
    pub errors: Vec<String>,
}

impl OrbitReport {
    pub fn class_of(&self, m1: Monomial, m2: Monomial) -> Result<Option<&OrbitClass>> {
        let d = b2_dim(self.genus);
        let s = slot(d, b2_index(self.genus, m1)?, b2_index(self.genus, m2)?);
        Ok(self.classes.iter().find(|c| c.members.binary_search(&s).is_ok()))
    }

    pub fn labelled(&self, label: OrbitLabel) -> Option<&OrbitClass> {
        self.classes.iter().find(|c| c.label == Some(label))
    }
}

/// The variable permutations of the two simple maps: every handle swap
/// `ā_i ↔ b̄_i` and every handle transposition `i ↔ j`.
pub fn simple_map_permutations(g: Genus) -> Vec<Vec<usize>> {
    let n = g.get() as usize;
    let mut perms = Vec::new();
    for i in 0..n {
        let mut p: Vec<usize> = (0..2 * n).collect();
        p.swap(i, n + i);
        perms.push(p);
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut p: Vec<usize> = (0..2 * n).collect();
            p.swap(i, j);
            p.swap(n + i, n + j);
            perms.push(p);
        }
    }
    perms
}

fn permute_monomial(m: Monomial, perm: &[usize]) -> Monomial {
    Monomial(m.vars().fold(0, |acc, k| acc | 1 << perm[k]))
}

/// Image of a wedge slot under a variable permutation.
fn permute_slot(basis: &B2Basis, s: usize, perm: &[usize]) -> usize {
    let d = basis.len();
    let (i, j) = slot_pair(d, s);
    let g = basis.genus();
    let mi = permute_monomial(basis.get(i), perm);
    let mj = permute_monomial(basis.get(j), perm);
    slot(d, b2_index(g, mi).expect("deg ≤ 2"), b2_index(g, mj).expect("deg ≤ 2"))
}

/// Applies a variable permutation to a wedge element.
pub fn permute_wedge(w: &WedgeElem, perm: &[usize]) -> WedgeElem {
    let basis = B2Basis::new(w.genus);
    let mut out = WedgeElem::zero(w.genus);
    for s in w.coords.ones() {
        out.coords.flip(permute_slot(&basis, s, perm));
    }
    out
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components of the non-index-matched basis elements under the
/// two simple maps, labelled by the representative patterns of [`OrbitLabel`].
pub fn orbit_classes(g: Genus) -> Result<OrbitReport> {
    if g.get() < 2 {
        return Err(Error::Argument("orbit classes need g >= 2".to_string()));
    }
    let basis = B2Basis::new(g);
    let d = basis.len();
    let total = wedge_dim(g);
    let nonmatched: Vec<bool> = (0..total)
        .map(|s| {
            let (i, j) = slot_pair(d, s);
            !index_matched_unchecked(g, basis.get(i).mask(), basis.get(j).mask())
        })
        .collect();
    let mut parent: Vec<usize> = (0..total).collect();
    for perm in simple_map_permutations(g) {
        for s in 0..total {
            if !nonmatched[s] {
                continue;
            }
            let t = permute_slot(&basis, s, &perm);
            if !nonmatched[t] {
                return Err(Error::Argument(format!(
                    "simple map sends non-matched slot {s} to matched slot {t}"
                )));
            }
            let (rs, rt) = (find(&mut parent, s), find(&mut parent, t));
            if rs != rt {
                parent[rs.max(rt)] = rs.min(rt);
            }
        }
    }
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for s in (0..total).filter(|&s| nonmatched[s]) {
        let r = find(&mut parent, s);
        comps.entry(r).or_default().push(s);
    }
    // instantiated patterns: slot -> (label, monomials)
    let mut pattern_slots: BTreeMap<usize, (OrbitLabel, (Monomial, Monomial))> = BTreeMap::new();
    for label in OrbitLabel::ALL {
        for p in label.patterns() {
            if let Some((m1, m2)) = instantiate(g, p) {
                let s = slot(d, b2_index(g, m1)?, b2_index(g, m2)?);
                pattern_slots.entry(s).or_insert((label, (m1, m2)));
            }
        }
    }
    let mut classes = Vec::new();
    let mut errors = Vec::new();
    for (_, members) in comps {
        let hits: Vec<&(OrbitLabel, (Monomial, Monomial))> = members
            .iter()
            .filter_map(|s| pattern_slots.get(s))
            .collect();
        let labels: BTreeSet<OrbitLabel> = hits.iter().map(|h| h.0).collect();
        let (i, j) = slot_pair(d, members[0]);
        let first = (basis.get(i), basis.get(j));
        let (label, representative) = match labels.len() {
            1 => (Some(hits[0].0), hits[0].1),
            0 => {
                errors.push(format!(
                    "component of {} elements containing {} ^ {} matches no pattern",
                    members.len(),
                    first.0.render(g),
                    first.1.render(g)
                ));
                (None, first)
            }
            _ => {
                errors.push(format!(
                    "component containing {} ^ {} matches several patterns: {:?}",
                    first.0.render(g),
                    first.1.render(g),
                    labels
                ));
                (None, first)
            }
        };
        classes.push(OrbitClass {
            label,
            members,
            representative,
        });
    }
    classes.sort_by_key(|c| (c.label.is_none(), c.label, c.members[0]));
    Ok(OrbitReport {
        genus: g,
        classes,
        errors,
    })
}

/// Which asserted family an element belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// `ā_i b̄_i ∧ ā_i b̄_j + ā_j b̄_j ∧ ā_i b̄_j`
    TwoIndex,
    /// `ā_i b̄_j ∧ b̄_i ā_k + ā_l b̄_j ∧ b̄_l ā_k`
    FourIndex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyElement {
    pub kind: FamilyKind,
    /// 1-based handles `(i, j)` or `(i, j, k, l)`
    pub indices: Vec<usize>,
    pub elem: WedgeElem,
    pub provenance: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FamilyList {
    pub elements: Vec<FamilyElement>,
    pub warnings: Vec<String>,
}

pub const FAMILY_PROVENANCE: &str = "asserted: cokernel families";

/// The two families of index-matched sums asserted to lie in the image.
pub fn asserted_families(g: Genus) -> FamilyList {
    let n = g.get() as usize;
    let mut out = FamilyList::default();
    let a = |i: usize| 1u64 << (i - 1);
    let b = |i: usize| 1u64 << (n + i - 1);
    let term = |m1: u64, m2: u64| WedgeElem::basis(g, Monomial(m1), Monomial(m2)).expect("basis");
    if n < 2 {
        out.warnings
            .push(format!("genus {n} admits no two-index family elements"));
    }
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let e = term(a(i) | b(i), a(i) | b(j))
                .add(&term(a(j) | b(j), a(i) | b(j)))
                .expect("same genus");
            out.elements.push(FamilyElement {
                kind: FamilyKind::TwoIndex,
                indices: vec![i, j],
                elem: e,
                provenance: FAMILY_PROVENANCE.to_string(),
            });
        }
    }
    if n < 4 {
        out.warnings
            .push(format!("genus {n} < 4 admits no four-index family elements"));
        return out;
    }
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                for l in 1..=n {
                    let idx = [i, j, k, l];
                    if (0..4).any(|x| (x + 1..4).any(|y| idx[x] == idx[y])) {
                        continue;
                    }
                    let e = term(a(i) | b(j), b(i) | a(k))
                        .add(&term(a(l) | b(j), b(l) | a(k)))
                        .expect("same genus");
                    out.elements.push(FamilyElement {
                        kind: FamilyKind::FourIndex,
                        indices: idx.to_vec(),
                        elem: e,
                        provenance: FAMILY_PROVENANCE.to_string(),
                    });
                }
            }
        }
    }
    out
}

/// Parameters of a span search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SearchConfig {
    pub max_support: usize,
    pub include_families: bool,
    pub include_bp: bool,
    pub disjointness: Disjointness,
}

impl SearchConfig {
    pub fn new(max_support: usize) -> Self {
        SearchConfig {
            max_support,
            include_families: false,
            include_bp: false,
            disjointness: Disjointness::default(),
        }
    }

    pub fn families(mut self, on: bool) -> Self {
        self.include_families = on;
        self
    }

    pub fn bp(mut self, on: bool) -> Self {
        self.include_bp = on;
        self
    }

    pub fn disjointness(mut self, mode: Disjointness) -> Self {
        self.disjointness = mode;
        self
    }
}

/// Outcome of folding cycle images into a span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageReport {
    pub genus: u32,
    pub config: SearchConfig,
    pub rank: usize,
    pub dims: Dims,
    /// `dim_wedge − rank`
    pub codim: usize,
    /// Non-index-matched basis elements outside the achieved span.
    pub missing: Vec<(Monomial, Monomial)>,
    /// For each orbit class: the cycle after which its representative first
    /// lay in the span.
    pub orbit_hits: Vec<(OrbitLabel, Option<String>)>,
    pub descriptors_raw: usize,
    pub descriptors_distinct: usize,
    pub cycles_examined: usize,
    pub family_elements: usize,
}

impl ImageReport {
    pub fn covers_w(&self) -> bool {
        self.missing.is_empty()
    }
}

/// Span of all certified genus-1 spine cycles (plus, optionally, the
/// asserted families), with the dimension bookkeeping and coverage of W.
pub fn image_rank_report(g: Genus, config: SearchConfig) -> Result<ImageReport> {
    let basis = B2Basis::new(g);
    let d = basis.len();
    let search = SpineSearch::new(
        g,
        config.max_support,
        config.include_bp,
        config.disjointness,
    )?;
    let orbits = if g.get() >= 2 {
        Some(orbit_classes(g)?)
    } else {
        None
    };
    let reps: Vec<(OrbitLabel, BitVec)> = orbits
        .iter()
        .flat_map(|o| o.classes.iter())
        .filter_map(|c| {
            let l = c.label?;
            let (m1, m2) = c.representative;
            let s = slot(d, b2_index(g, m1).ok()?, b2_index(g, m2).ok()?);
            Some((l, BitVec::unit(wedge_dim(g), s)))
        })
        .collect();
    let mut hits: Vec<Option<String>> = vec![None; reps.len()];
    let mut span = SpanBasis::new(wedge_dim(g));
    let mut examined = 0usize;
    search.for_each_cycle(0..search.len(), |i, j, w| {
        examined += 1;
        if span.insert(w)? {
            for (h, (_, rep)) in hits.iter_mut().zip(&reps) {
                if h.is_none() && span.contains(rep)? {
                    *h = Some(search.cycle_label(i, j));
                }
            }
        }
        Ok(())
    })?;
    let mut family_elements = 0;
    if config.include_families {
        for f in asserted_families(g).elements {
            family_elements += 1;
            span.insert(f.elem.coords())?;
        }
    }
    let dm = dims(g);
    let mut missing = Vec::new();
    for s in 0..wedge_dim(g) {
        let (i, j) = slot_pair(d, s);
        let (m1, m2) = (basis.get(i), basis.get(j));
        if index_matched_unchecked(g, m1.mask(), m2.mask()) {
            continue;
        }
        if !span.contains(&BitVec::unit(wedge_dim(g), s))? {
            missing.push((m1, m2));
        }
    }
    Ok(ImageReport {
        genus: g.get(),
        config,
        rank: span.rank(),
        dims: dm,
        codim: dm.dim_wedge - span.rank(),
        missing,
        orbit_hits: reps.iter().map(|(l, _)| *l).zip(hits).collect(),
        descriptors_raw: search.raw_descriptors(),
        descriptors_distinct: search.len(),
        cycles_examined: examined,
        family_elements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::SubsurfaceBasis;

    fn g(n: u32) -> Genus {
        Genus::new(n).unwrap()
    }

    fn p(gg: Genus, s: &str) -> BoolPoly {
        BoolPoly::parse(gg, s).unwrap()
    }

    fn m(gg: Genus, s: &str) -> Monomial {
        let poly = p(gg, s);
        let first = poly.terms().next().unwrap();
        first
    }

    #[test]
    fn slot_layout_round_trips() {
        for d in [4usize, 11, 37] {
            let mut next = 0;
            for i in 0..d {
                for j in i + 1..d {
                    assert_eq!(slot(d, i, j), next);
                    assert_eq!(slot(d, j, i), next);
                    assert_eq!(slot_pair(d, next), (i, j));
                    next += 1;
                }
            }
            assert_eq!(next, d * (d - 1) / 2);
        }
    }

    #[test]
    fn wedge_examples() {
        let g4 = g(4);
        let x = p(g4, "a1*b2 + a3 + 1");
        assert!(wedge(&x, &x).unwrap().is_zero());
        let w = wedge(&p(g4, "a1*b1"), &p(g4, "a2*b2")).unwrap();
        assert_eq!(w, WedgeElem::basis(g4, m(g4, "a1*b1"), m(g4, "a2*b2")).unwrap());
        let w2 = wedge(&p(g4, "a1*b1"), &p(g4, "a2*b2 + a2*a3")).unwrap();
        assert_eq!(w2.render(), "a1*b1 ^ a2*a3 + a1*b1 ^ a2*b2");
        assert!(matches!(
            wedge(&p(g4, "a1*a2*a3"), &p(g4, "1")),
            Err(Error::Filtration { degree: 3, .. })
        ));
    }

    #[test]
    fn spine_cycle_count_genus_two() {
        let g2 = g(2);
        assert_eq!(enumerate_spines(g2, 1).len(), 12);
        let cycles: Vec<_> = enumerate_spine_cycles(g2, 1, false, Disjointness::Support).collect();
        assert_eq!(cycles.len(), 36);
        for c in &cycles {
            c.check_certificate().unwrap();
        }
        let again: Vec<_> = enumerate_spine_cycles(g2, 1, false, Disjointness::Support).collect();
        assert_eq!(cycles, again);
    }

    #[test]
    fn spine_counts_match_brute_force() {
        // pairs (x, y) in (F_2^{2s})^2 with x·y = 1 number (4^s - 1)·4^s / 2
        let g3 = g(3);
        let all = enumerate_spines(g3, 3);
        assert_eq!(all.len(), 63 * 64 / 2);
        let uniq: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(uniq.len(), all.len());
    }

    #[test]
    fn cycle_image_is_symmetric() {
        let g3 = g(3);
        for c in enumerate_spine_cycles(g3, 2, false, Disjointness::Orthogonal).step_by(97) {
            assert_eq!(cycle_image(&c).unwrap(), cycle_image(&c.swapped()).unwrap());
        }
    }

    #[test]
    fn overlapping_support_is_rejected() {
        let g2 = g(2);
        let t1 = SeparatingTwist::new(SubsurfaceBasis::standard(g2, &[1]), "t1").unwrap();
        let t2 = SeparatingTwist::new(SubsurfaceBasis::standard(g2, &[1, 2]), "t2").unwrap();
        let r = AbelianCycle::support_disjoint(
            CurveDescriptor::Separating(t1.clone()),
            CurveDescriptor::Separating(t2.clone()),
        );
        assert!(matches!(r, Err(Error::Disjointness(_))));
        let asserted = AbelianCycle {
            first: CurveDescriptor::Separating(t1),
            second: CurveDescriptor::Separating(t2),
            certificate: Certificate::Asserted("figure".into()),
        };
        assert!(cycle_image(&asserted).is_ok());
    }

    #[test]
    fn orthogonal_certificate() {
        let g3 = g(3);
        let tw = |x: HClass, y: HClass| {
            let s = Spine::new(x, y).unwrap();
            CurveDescriptor::Separating(SeparatingTwist::from_spine(&s, spine_label(&s)).unwrap())
        };
        let (a1, b1, a2, b2) = (HClass::a(g3, 1), HClass::b(g3, 1), HClass::a(g3, 2), HClass::b(g3, 2));
        // (a1, b1 + a2) and (a2, b2 + a1) share both handles yet are orthogonal
        let f = tw(a1.clone(), &b1 + &a2);
        let h = tw(a2.clone(), &b2 + &a1);
        assert_eq!(
            certify(&f, &h, Disjointness::Support).unwrap(),
            None
        );
        assert_eq!(
            certify(&f, &h, Disjointness::Orthogonal).unwrap(),
            Some(Certificate::SymplecticOrthogonal)
        );
        let c = AbelianCycle {
            first: f.clone(),
            second: h,
            certificate: Certificate::SymplecticOrthogonal,
        };
        assert_eq!(
            cycle_image(&c).unwrap().render(),
            // (a1 b1 + a1 a2) ^ (a2 b2 + a1 a2)
            "a1*a2 ^ a1*b1 + a1*a2 ^ a2*b2 + a1*b1 ^ a2*b2"
        );
        let bad = AbelianCycle {
            first: f,
            second: tw(a1, b1),
            certificate: Certificate::SymplecticOrthogonal,
        };
        assert!(matches!(cycle_image(&bad), Err(Error::Disjointness(_))));
    }

    #[test]
    fn certified_cycles_are_emitted_in_both_modes() {
        let g3 = g(3);
        let support: Vec<_> = enumerate_spine_cycles(g3, 2, false, Disjointness::Support).collect();
        let orth: Vec<_> = enumerate_spine_cycles(g3, 2, false, Disjointness::Orthogonal).collect();
        assert!(support.len() < orth.len());
        for c in &support {
            assert!(orth.contains(c));
        }
        for c in &orth {
            c.check_certificate().unwrap();
        }
        assert_eq!(
            enumerate_spine_cycles(g(2), 1, false, Disjointness::Orthogonal).count(),
            36
        );
    }

    #[test]
    fn dims_small() {
        let d1 = dims(g(1));
        assert_eq!((d1.d, d1.dim_wedge, d1.dim_im, d1.dim_w), (4, 6, 3, 3));
        assert_eq!(dims(g(3)).d, 22);
    }

    #[test]
    fn orbit_counts_small_genus() {
        assert_eq!(orbit_classes(g(2)).unwrap().classes.len(), 7);
        let o3 = orbit_classes(g(3)).unwrap();
        assert!(o3.errors.is_empty());
        assert_eq!(o3.classes.len(), 10);
        assert!(o3.labelled(OrbitLabel::III).is_none());
    }

    #[test]
    fn families_are_index_matched_pairs() {
        let g4 = g(4);
        let fams = asserted_families(g4);
        assert!(fams.warnings.is_empty());
        for f in &fams.elements {
            let t = f.elem.terms();
            assert_eq!(t.len(), 2);
            for (m1, m2) in t {
                assert!(index_matched_unchecked(g4, m1.mask(), m2.mask()));
            }
        }
        let small = asserted_families(g(3));
        assert!(small.elements.iter().all(|f| f.kind == FamilyKind::TwoIndex));
        assert_eq!(small.warnings.len(), 1);
    }

    #[test]
    fn partial_spans_merge_in_any_order() {
        let g3 = g(3);
        let s = SpineSearch::new(g3, 2, false, Disjointness::Orthogonal).unwrap();
        let n = s.len();
        let cuts = [0, n / 3, 2 * n / 3, n];
        let parts: Vec<SpanBasis> = cuts
            .windows(2)
            .map(|w| s.partial_span(w[0]..w[1]).unwrap())
            .collect();
        let whole = s.partial_span(0..n).unwrap();
        for order in [[0, 1, 2], [2, 1, 0], [1, 2, 0]] {
            let mut acc = SpanBasis::new(wedge_dim(g3));
            for k in order {
                acc.merge(&parts[k]).unwrap();
            }
            assert_eq!(acc.rank(), whole.rank());
            assert_eq!(acc, whole);
        }
    }
}
