//! Johnson's formulas for the Birman–Craggs–Johnson map σ.
//!
//! σ is computed from curve data only: a separating twist is described by a
//! symplectic basis of the subsurface it bounds, and a bounding-pair map by
//! that basis together with the class `C` of one of its curves.

use alloc::format;
use alloc::string::String;

use crate::boolring::{bar, BoolPoly, Monomial};
use crate::surface::{Genus, HClass, Spine, SubsurfaceBasis};
use crate::{Error, Result};

/// A Dehn twist about a separating curve, given by a basis of the subsurface
/// away from the boundary.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeparatingTwist {
    pub basis: SubsurfaceBasis,
    pub label: String,
}

impl SeparatingTwist {
    pub fn new(basis: SubsurfaceBasis, label: impl Into<String>) -> Result<Self> {
        if let Some(v) = basis.check()? {
            return Err(Error::Basis(format!("{v}")));
        }
        Ok(SeparatingTwist {
            basis,
            label: label.into(),
        })
    }

    /// The genus-1 twist whose spine is `s`.
    pub fn from_spine(s: &Spine, label: impl Into<String>) -> Result<Self> {
        s.validate()?;
        Ok(SeparatingTwist {
            basis: s.to_basis(),
            label: label.into(),
        })
    }
}

/// A bounding-pair map `T_γ T_δ⁻¹`; `c` is the class of `γ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BPMap {
    pub basis: SubsurfaceBasis,
    pub c: HClass,
    pub label: String,
}

impl BPMap {
    pub fn new(basis: SubsurfaceBasis, c: HClass, label: impl Into<String>) -> Result<Self> {
        let m = BPMap {
            basis,
            c,
            label: label.into(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self.basis.check()? {
            return Err(Error::Basis(format!("{v}")));
        }
        self.basis.genus.ensure_same(self.c.genus())?;
        for (i, x) in self.basis.classes().enumerate() {
            if x.intersect(&self.c)? {
                let name = if i % 2 == 0 { "A" } else { "B" };
                return Err(Error::Geometry(format!(
                    "C = {} meets {}{} = {}",
                    self.c,
                    name,
                    i / 2 + 1,
                    x
                )));
            }
        }
        Ok(())
    }

    pub fn support_mask(&self) -> u64 {
        self.basis.support_mask() | self.c.support_mask()
    }
}

fn sum_of_products(basis: &SubsurfaceBasis) -> Result<BoolPoly> {
    let mut acc = BoolPoly::zero(basis.genus);
    for (a, b) in &basis.pairs {
        acc = acc.add(&bar(a).mul(&bar(b))?)?;
    }
    Ok(acc)
}

/// `σ(T_γ) = Σ Ā_i B̄_i`.
pub fn sigma_separating(t: &SeparatingTwist) -> Result<BoolPoly> {
    if let Some(v) = t.basis.check()? {
        return Err(Error::Basis(format!("{v}")));
    }
    sum_of_products(&t.basis)
}

/// `σ(T_γ T_δ⁻¹) = (Σ Ā_i B̄_i)(C̄ + 1)`.
pub fn sigma_bp(m: &BPMap) -> Result<BoolPoly> {
    m.validate()?;
    let g = m.basis.genus;
    let factor = bar(&m.c).add(&BoolPoly::one(g))?;
    sum_of_products(&m.basis)?.mul(&factor)
}

/// Whether `m1 ∧ m2` has the form `ā_i x̄ ∧ b̄_i ȳ` for some handle `i`.
pub fn is_index_matched(g: Genus, m1: Monomial, m2: Monomial) -> Result<bool> {
    if m1 == m2 {
        return Err(Error::Argument(String::from(
            "index matching needs two distinct monomials",
        )));
    }
    for m in [m1, m2] {
        if m.degree() > 2 {
            return Err(Error::Filtration {
                degree: m.degree(),
                bound: 2,
            });
        }
    }
    Ok(index_matched_unchecked(g, m1.mask(), m2.mask()))
}

#[inline]
pub(crate) fn index_matched_unchecked(g: Genus, m1: u64, m2: u64) -> bool {
    let n = g.get();
    let low = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    let (a1, b1) = (m1 & low, (m1 >> n) & low);
    let (a2, b2) = (m2 & low, (m2 >> n) & low);
    (a1 & b2) | (a2 & b1) != 0
}
