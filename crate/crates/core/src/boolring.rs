//! The Boolean (square-free) polynomial algebra on `ā₁..ā_g, b̄₁..b̄_g` over F₂.
//!
//! A monomial is a subset of the 2g variables, stored as a bit mask with bit
//! `k` for coordinate `k` (so `ā_i` is bit `i-1` and `b̄_i` is bit `g+i-1`).
//! Monomials are ordered by degree, then lexicographically on their sorted
//! variable lists; the constant `1` comes first.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::gf2::BitVec;
use crate::surface::{coordinate_name, Genus, HClass, SpMatrix};
use crate::{Error, Result};

/// A square-free monomial; the empty mask is `1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial(pub u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn var(k: usize) -> Self {
        Monomial(1 << k)
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn divides(self, other: Monomial) -> bool {
        self.0 & !other.0 == 0
    }

    /// Product in B: union of variable sets.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Monomial) -> Monomial {
        Monomial(self.0 | other.0)
    }

    pub fn vars(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        core::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let t = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(t)
            }
        })
    }

    pub fn render(self, g: Genus) -> String {
        if self.0 == 0 {
            return "1".to_string();
        }
        self.vars()
            .map(|k| coordinate_name(g, k))
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 >> diff.trailing_zeros() & 1 == 1 {
                // shares the same smaller variables and has the next smaller one
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Monomial({:#b})", self.0)
    }
}

/// A monomial tagged with its genus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolMonomial {
    pub genus: Genus,
    pub mono: Monomial,
}

impl BoolMonomial {
    pub fn new(genus: Genus, mono: Monomial) -> Result<Self> {
        let full = full_mask(genus);
        if mono.0 & !full != 0 {
            return Err(Error::Argument(format!(
                "monomial mask {:#b} uses variables beyond genus {genus}",
                mono.0
            )));
        }
        Ok(BoolMonomial { genus, mono })
    }

    pub fn degree(self) -> u32 {
        self.mono.degree()
    }
}

impl fmt::Display for BoolMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.mono.render(self.genus))
    }
}

pub(crate) fn full_mask(g: Genus) -> u64 {
    if g.rank() >= 64 {
        u64::MAX
    } else {
        (1u64 << g.rank()) - 1
    }
}

/// An element of B: a set of monomials with coefficient 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolPoly {
    genus: Genus,
    terms: BTreeSet<Monomial>,
}

impl BoolPoly {
    pub fn zero(genus: Genus) -> Self {
        BoolPoly {
            genus,
            terms: BTreeSet::new(),
        }
    }

    pub fn one(genus: Genus) -> Self {
        Self::monomial(genus, Monomial::ONE)
    }

    pub fn monomial(genus: Genus, m: Monomial) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(m);
        BoolPoly { genus, terms }
    }

    /// The variable `ē_k` for coordinate `k`.
    pub fn var(genus: Genus, k: usize) -> Self {
        Self::monomial(genus, Monomial::var(k))
    }

    /// Sums the given monomials mod 2 (repeats cancel).
    pub fn from_monomials(genus: Genus, monos: impl IntoIterator<Item = Monomial>) -> Result<Self> {
        let full = full_mask(genus);
        let mut p = Self::zero(genus);
        for m in monos {
            if m.0 & !full != 0 {
                return Err(Error::Argument(format!(
                    "monomial mask {:#b} uses variables beyond genus {genus}",
                    m.0
                )));
            }
            p.toggle(m);
        }
        Ok(p)
    }

    pub fn genus(&self) -> Genus {
        self.genus
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = Monomial> + '_ {
        self.terms.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, m: Monomial) -> bool {
        self.terms.contains(&m)
    }

    /// Degree of the top monomial, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().next_back().map(|m| m.degree())
    }

    pub(crate) fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    /// Errors unless every monomial has degree at most `bound`.
    pub fn ensure_degree_at_most(&self, bound: u32) -> Result<()> {
        match self.degree() {
            Some(d) if d > bound => Err(Error::Filtration { degree: d, bound }),
            _ => Ok(()),
        }
    }

    pub fn add(&self, other: &BoolPoly) -> Result<BoolPoly> {
        self.genus.ensure_same(other.genus)?;
        Ok(BoolPoly {
            genus: self.genus,
            terms: self
                .terms
                .symmetric_difference(&other.terms)
                .copied()
                .collect(),
        })
    }

    pub fn mul(&self, other: &BoolPoly) -> Result<BoolPoly> {
        self.genus.ensure_same(other.genus)?;
        let mut out = BoolPoly::zero(self.genus);
        for &m in &self.terms {
            for &n in &other.terms {
                out.toggle(m.mul(n));
            }
        }
        Ok(out)
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        // highest degree first, lexicographic within a degree
        let mut monos: Vec<Monomial> = self.terms.iter().copied().collect();
        monos.sort_by(|a, b| b.degree().cmp(&a.degree()).then(a.cmp(b)));
        monos
            .iter()
            .map(|m| m.render(self.genus))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses the rendered form, e.g. `"a1*b1 + a2 + 1"`.
    pub fn parse(genus: Genus, s: &str) -> Result<BoolPoly> {
        let s = s.trim();
        if s == "0" {
            return Ok(BoolPoly::zero(genus));
        }
        let n = genus.get() as usize;
        let mut monos = Vec::new();
        for term in s.split('+') {
            let term = term.trim();
            if term == "1" {
                monos.push(Monomial::ONE);
                continue;
            }
            let mut mask = 0u64;
            for var in term.split('*') {
                let var = var.trim();
                let (kind, idx) = var.split_at(var.len().min(1));
                let i: usize = idx
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad variable {var:?}")))?;
                if i == 0 || i > n {
                    return Err(Error::Parse(format!("variable {var:?} out of range")));
                }
                let k = match kind {
                    "a" => i - 1,
                    "b" => n + i - 1,
                    _ => return Err(Error::Parse(format!("bad variable {var:?}"))),
                };
                if mask >> k & 1 == 1 {
                    return Err(Error::Parse(format!("repeated variable in {term:?}")));
                }
                mask |= 1 << k;
            }
            monos.push(Monomial(mask));
        }
        let p = BoolPoly::from_monomials(genus, monos.iter().copied())?;
        if p.len() != monos.len() {
            return Err(Error::Parse(format!("repeated monomial in {s:?}")));
        }
        Ok(p)
    }
}

impl fmt::Display for BoolPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for BoolPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolPoly[g={}]({})", self.genus, self.render())
    }
}

/// Number of handles `i` with both `a_i` and `b_i` in the mask, mod 2.
fn pair_parity(g: Genus, mask: u64) -> bool {
    let n = g.get();
    let low = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    ((mask & low) & ((mask >> n) & low)).count_ones() % 2 == 1
}

/// The bar map H → B₁: linear part plus the parity of intersecting basis
/// pairs in the support.
pub fn bar(c: &HClass) -> BoolPoly {
    let g = c.genus();
    let mut p = BoolPoly::zero(g);
    for k in c.coords().ones() {
        p.terms.insert(Monomial::var(k));
    }
    if pair_parity(g, c.mask()) {
        p.terms.insert(Monomial::ONE);
    }
    p
}

/// A mod-2 self-linking form, determined by its values on the basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SelfLinkingForm {
    genus: Genus,
    values: BitVec,
}

impl SelfLinkingForm {
    pub fn new(genus: Genus, values: BitVec) -> Result<Self> {
        if values.len() != genus.rank() {
            return Err(Error::Dimension {
                expected: genus.rank(),
                found: values.len(),
            });
        }
        Ok(SelfLinkingForm { genus, values })
    }

    /// The form whose basis values are the bits of `index`; ranges over all
    /// `2^{2g}` forms as `index` ranges over `0..2^{2g}`.
    pub fn from_index(genus: Genus, index: u64) -> Self {
        SelfLinkingForm {
            genus,
            values: BitVec::from_u64(genus.rank(), index),
        }
    }

    pub fn genus(&self) -> Genus {
        self.genus
    }

    pub fn values(&self) -> &BitVec {
        &self.values
    }

    /// `ω(u)` via `ω(u+v) = ω(u) + ω(v) + u·v`.
    pub fn value(&self, u: &HClass) -> Result<bool> {
        self.genus.ensure_same(u.genus())?;
        let linear = (self.values.low_word() & u.mask()).count_ones() % 2 == 1;
        Ok(linear ^ pair_parity(self.genus, u.mask()))
    }
}

/// Evaluates `p` at `ω` (substituting `ē_k ↦ ω(e_k)`).
pub fn evaluate(p: &BoolPoly, w: &SelfLinkingForm) -> Result<bool> {
    p.genus.ensure_same(w.genus)?;
    let on = w.values.low_word();
    Ok(p.terms.iter().filter(|m| m.0 & !on == 0).count() % 2 == 1)
}

/// Applies the algebra endomorphism `ē_k ↦ bar(M·e_k)`.
///
/// With this convention `substitute_sp(M₂, substitute_sp(M₁, p)) =
/// substitute_sp(M₂M₁, p)` and `substitute_sp(M, bar(c)) = bar(M·c)`.
pub fn substitute_sp(m: &SpMatrix, p: &BoolPoly) -> Result<BoolPoly> {
    p.genus.ensure_same(m.genus())?;
    m.check_symplectic()?;
    let images: Vec<BoolPoly> = m.columns().iter().map(bar).collect();
    let mut out = BoolPoly::zero(p.genus);
    for mono in p.terms() {
        let mut acc = BoolPoly::one(p.genus);
        for k in mono.vars() {
            acc = acc.mul(&images[k])?;
        }
        out = out.add(&acc)?;
    }
    Ok(out)
}

/// Dimension of B₂, `2g² + g + 1`.
pub fn b2_dim(g: Genus) -> usize {
    let n = g.get() as usize;
    2 * n * n + n + 1
}

/// Position of a degree ≤ 2 monomial in the canonical B₂ basis
/// `[1, ā₁..ā_g, b̄₁..b̄_g, degree-2 monomials in lexicographic order]`.
pub fn b2_index(g: Genus, m: Monomial) -> Result<usize> {
    if m.0 & !full_mask(g) != 0 {
        return Err(Error::Argument(format!(
            "monomial mask {:#b} uses variables beyond genus {g}",
            m.0
        )));
    }
    let r = g.rank();
    match m.degree() {
        0 => Ok(0),
        1 => Ok(1 + m.0.trailing_zeros() as usize),
        2 => {
            let p = m.0.trailing_zeros() as usize;
            let q = 63 - m.0.leading_zeros() as usize;
            Ok(1 + r + p * (2 * r - p - 1) / 2 + (q - p - 1))
        }
        d => Err(Error::Filtration { degree: d, bound: 2 }),
    }
}

/// The canonical ordered basis of B₂.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct B2Basis {
    genus: Genus,
    monomials: Vec<Monomial>,
}

impl B2Basis {
    pub fn new(g: Genus) -> Self {
        let r = g.rank();
        let mut monomials = Vec::with_capacity(b2_dim(g));
        monomials.push(Monomial::ONE);
        monomials.extend((0..r).map(Monomial::var));
        for p in 0..r {
            for q in p + 1..r {
                monomials.push(Monomial((1 << p) | (1 << q)));
            }
        }
        B2Basis { genus: g, monomials }
    }

    pub fn genus(&self) -> Genus {
        self.genus
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn get(&self, idx: usize) -> Monomial {
        self.monomials[idx]
    }

    pub fn index(&self, m: Monomial) -> Result<usize> {
        b2_index(self.genus, m)
    }

    /// Coordinates of a B₂ element in this basis.
    pub fn coords(&self, p: &BoolPoly) -> Result<BitVec> {
        self.genus.ensure_same(p.genus())?;
        p.ensure_degree_at_most(2)?;
        let mut v = BitVec::zeros(self.len());
        for m in p.terms() {
            v.set(self.index(m)?, true);
        }
        Ok(v)
    }
}

pub fn b2_basis(g: Genus) -> B2Basis {
    B2Basis::new(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: u32) -> Genus {
        Genus::new(n).unwrap()
    }

    #[test]
    fn addition() {
        let g2 = g(2);
        let p = BoolPoly::parse(g2, "a1*b1 + a2").unwrap();
        assert!(p.add(&p).unwrap().is_zero());
        let q = BoolPoly::parse(g2, "a2 + 1").unwrap();
        assert_eq!(p.add(&q).unwrap().render(), "a1*b1 + 1");
        let s = BoolPoly::var(g2, 0).add(&BoolPoly::var(g2, 2)).unwrap();
        assert_eq!(s.render(), "a1 + b1");
        assert!(p.add(&BoolPoly::zero(g(3))).is_err());
    }

    #[test]
    fn multiplication() {
        let g3 = g(3);
        let a1 = BoolPoly::var(g3, 0);
        assert_eq!(a1.mul(&a1).unwrap(), a1);
        // (a_i + b_i + 1) a_i = a_i b_i
        let l = BoolPoly::parse(g3, "a2 + b2 + 1").unwrap();
        let r = l.mul(&BoolPoly::var(g3, 1)).unwrap();
        assert_eq!(r.render(), "a2*b2");
        let p = BoolPoly::parse(g3, "a1*b3 + a2 + 1").unwrap();
        assert_eq!(p.mul(&BoolPoly::one(g3)).unwrap(), p);
    }

    #[test]
    fn bar_examples() {
        let g3 = g(3);
        assert_eq!(bar(&HClass::a(g3, 1)).render(), "a1");
        let ab = &HClass::a(g3, 2) + &HClass::b(g3, 2);
        assert_eq!(bar(&ab).render(), "a2 + b2 + 1");
        let c = &HClass::b(g3, 1) + &HClass::a(g3, 3);
        assert_eq!(bar(&c).render(), "a3 + b1");
        assert!(bar(&HClass::zero(g3)).is_zero());
    }

    #[test]
    fn bar_defect_is_intersection_form() {
        for n in 1..=3 {
            let gg = g(n);
            let all = 1u64 << gg.rank();
            for u in 0..all {
                for v in 0..all {
                    let (cu, cv) = (HClass::from_mask(gg, u), HClass::from_mask(gg, v));
                    let defect = bar(&(&cu + &cv))
                        .add(&bar(&cu))
                        .unwrap()
                        .add(&bar(&cv))
                        .unwrap();
                    let expect = if cu.intersect(&cv).unwrap() {
                        BoolPoly::one(gg)
                    } else {
                        BoolPoly::zero(gg)
                    };
                    assert_eq!(defect, expect);
                }
            }
        }
    }

    #[test]
    fn evaluation() {
        let g2 = g(2);
        for idx in 0..16 {
            let w = SelfLinkingForm::from_index(g2, idx);
            assert!(evaluate(&BoolPoly::one(g2), &w).unwrap());
            let a1b1 = BoolPoly::parse(g2, "a1*b1").unwrap();
            let want = w.value(&HClass::a(g2, 1)).unwrap() & w.value(&HClass::b(g2, 1)).unwrap();
            assert_eq!(evaluate(&a1b1, &w).unwrap(), want);
            for u in 0..16 {
                let c = HClass::from_mask(g2, u);
                assert_eq!(evaluate(&bar(&c), &w).unwrap(), w.value(&c).unwrap());
            }
        }
    }

    #[test]
    fn b2_basis_layout() {
        assert_eq!(b2_basis(g(1)).len(), 4);
        assert_eq!(b2_basis(g(3)).len(), 22);
        assert_eq!(b2_basis(g(4)).len(), 37);
        assert_eq!(b2_index(g(4), Monomial::ONE).unwrap(), 0);
        for n in 1..=6 {
            let b = b2_basis(g(n));
            for (i, &m) in b.monomials().iter().enumerate() {
                assert_eq!(b.index(m).unwrap(), i);
            }
            assert!(b.monomials().windows(2).all(|w| w[0] < w[1]));
        }
        assert!(matches!(
            b2_index(g(2), Monomial(0b111)),
            Err(Error::Filtration { degree: 3, .. })
        ));
    }

    #[test]
    fn substitution_special_maps() {
        let g3 = g(3);
        let swap = SpMatrix::handle_swap(g3, 2).unwrap();
        let ab = BoolPoly::parse(g3, "a2*b2").unwrap();
        assert_eq!(substitute_sp(&swap, &ab).unwrap(), ab);
        let tr = SpMatrix::handle_transposition(g3, 1, 3).unwrap();
        assert_eq!(
            substitute_sp(&tr, &BoolPoly::var(g3, 0)).unwrap().render(),
            "a3"
        );
        let p = BoolPoly::parse(g3, "a1*b2 + b3 + 1").unwrap();
        assert_eq!(substitute_sp(&SpMatrix::identity(g3), &p).unwrap(), p);
    }

    #[test]
    fn substitution_commutes_with_bar() {
        let g2 = g(2);
        let mut mats = alloc::vec![SpMatrix::identity(g2)];
        for v in 1..16 {
            mats.push(SpMatrix::transvection(&HClass::from_mask(g2, v)));
        }
        for m in &mats {
            for c in 0..16 {
                let c = HClass::from_mask(g2, c);
                assert_eq!(
                    substitute_sp(m, &bar(&c)).unwrap(),
                    bar(&m.apply(&c).unwrap())
                );
            }
        }
    }

    #[test]
    fn render_parse_round_trip() {
        let g3 = g(3);
        for s in ["0", "1", "a1*b1 + a2 + 1", "a1*a2*b2 + a2*b2", "a1*a3 + a1*b1 + b3"] {
            assert_eq!(BoolPoly::parse(g3, s).unwrap().render(), s);
        }
        assert!(BoolPoly::parse(g3, "a4").is_err());
        assert!(BoolPoly::parse(g3, "a1*a1").is_err());
        assert!(BoolPoly::parse(g3, "c1").is_err());
    }
}
