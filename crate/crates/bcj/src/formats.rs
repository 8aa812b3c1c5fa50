//! JSON file formats (schema version 1).
//!
//! Classes are arrays of 2g integers in the order a₁..a_g, b₁..b_g. Boolean
//! polynomials are lists of monomials, each a sorted list of 0-based
//! variable indices. Casson–Morita polynomials carry decimal-string
//! coefficients so that no precision is lost.

use std::collections::BTreeMap;

use bcj_core::bcjmap::{BPMap, SeparatingTwist};
use bcj_core::boolring::{BoolPoly, Monomial};
use bcj_core::cassonmorita::{CMPoly, CMSymbol, LinkingMatrix};
use bcj_core::surface::{Genus, HClass, SubsurfaceBasis, ZHClass, ZSubsurfaceBasis};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

fn genus(g: u32, what: &str) -> Result<Genus, CliError> {
    Genus::new(g).map_err(|e| CliError::Schema(format!("{what}: {e}")))
}

fn class_z(g: Genus, c: &[i64], what: &str) -> Result<ZHClass, CliError> {
    ZHClass::new(g, c.to_vec()).map_err(|e| CliError::Schema(format!("{what}: {e}")))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BoolPolyJson {
    pub genus: u32,
    pub terms: Vec<Vec<usize>>,
}

impl BoolPolyJson {
    pub fn from_poly(p: &BoolPoly) -> Self {
        BoolPolyJson {
            genus: p.genus().get(),
            terms: p.terms().map(|m| m.vars().collect()).collect(),
        }
    }

    pub fn to_poly(&self) -> Result<BoolPoly, CliError> {
        let g = genus(self.genus, "polynomial")?;
        let mut monos = Vec::new();
        for t in &self.terms {
            let mut mask = 0u64;
            for &k in t {
                if k >= g.rank() || mask >> k & 1 == 1 {
                    return Err(CliError::Schema(format!(
                        "polynomial: bad variable list {t:?} for genus {g}"
                    )));
                }
                mask |= 1 << k;
            }
            monos.push(Monomial(mask));
        }
        BoolPoly::from_monomials(g, monos).map_err(|e| CliError::Schema(e.to_string()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CMTermJson {
    /// Normal-form symbols `[p, q]` with `p ≤ q`, repeated for powers.
    pub symbols: Vec<[usize; 2]>,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CMPolyJson {
    pub genus: u32,
    pub terms: Vec<CMTermJson>,
}

impl CMPolyJson {
    pub fn from_poly(p: &CMPoly) -> Self {
        CMPolyJson {
            genus: p.genus().get(),
            terms: p
                .sorted_terms()
                .into_iter()
                .map(|(m, c)| CMTermJson {
                    symbols: m.iter().map(|s| [s.p as usize, s.q as usize]).collect(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_poly(&self) -> Result<CMPoly, CliError> {
        let g = genus(self.genus, "CM polynomial")?;
        let mut terms = Vec::new();
        for t in &self.terms {
            let syms = t
                .symbols
                .iter()
                .map(|&[p, q]| CMSymbol::new(g, p, q))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Schema(e.to_string()))?;
            let c: BigInt = t
                .coeff
                .parse()
                .map_err(|_| CliError::Schema(format!("bad coefficient {:?}", t.coeff)))?;
            terms.push((syms, c));
        }
        CMPoly::from_terms(g, terms).map_err(|e| CliError::Schema(e.to_string()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LinkingMatrixJson {
    pub genus: u32,
    #[serde(rename = "L")]
    pub l: Vec<Vec<i64>>,
}

impl LinkingMatrixJson {
    pub fn from_matrix(m: &LinkingMatrix) -> Self {
        LinkingMatrixJson {
            genus: m.genus().get(),
            l: m.entries().to_vec(),
        }
    }

    /// Validates `Lᵀ − L = J`; a violation is reported as a consistency error.
    pub fn to_matrix(&self) -> Result<LinkingMatrix, CliError> {
        let g = genus(self.genus, "linking matrix")?;
        LinkingMatrix::new(g, self.l.clone()).map_err(CliError::LinkingMatrix)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum CatalogEntry {
    Separating {
        label: String,
        /// Pairs `[A_i, B_i]`.
        basis: Vec<[Vec<i64>; 2]>,
    },
    Bp {
        label: String,
        basis: Vec<[Vec<i64>; 2]>,
        #[serde(rename = "C")]
        c: Vec<i64>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Catalog {
    pub genus: u32,
    #[serde(default)]
    pub entries: Vec<CatalogEntry>,
}

/// A catalog entry checked against its genus.
#[derive(Clone, Debug)]
pub enum ResolvedEntry {
    Separating {
        twist: SeparatingTwist,
        /// Present when the basis is symplectic over ℤ.
        integral: Option<ZSubsurfaceBasis>,
    },
    Bp(BPMap),
}

impl CatalogEntry {
    pub fn label(&self) -> &str {
        match self {
            CatalogEntry::Separating { label, .. } | CatalogEntry::Bp { label, .. } => label,
        }
    }

    fn zbasis(g: Genus, label: &str, basis: &[[Vec<i64>; 2]]) -> Result<ZSubsurfaceBasis, CliError> {
        let pairs = basis
            .iter()
            .map(|[a, b]| Ok((class_z(g, a, label)?, class_z(g, b, label)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(ZSubsurfaceBasis { genus: g, pairs })
    }

    fn mod2(basis: &ZSubsurfaceBasis) -> SubsurfaceBasis {
        basis.reduce_mod2()
    }

    pub fn resolve(&self, g: Genus) -> Result<ResolvedEntry, CliError> {
        let schema = |e: bcj_core::Error| CliError::Schema(format!("entry {:?}: {e}", self.label()));
        match self {
            CatalogEntry::Separating { label, basis } => {
                let z = Self::zbasis(g, label, basis)?;
                let integral = match z.check().map_err(schema)? {
                    None => Some(z.clone()),
                    Some(_) => None,
                };
                let twist = SeparatingTwist::new(Self::mod2(&z), label.clone()).map_err(schema)?;
                Ok(ResolvedEntry::Separating { twist, integral })
            }
            CatalogEntry::Bp { label, basis, c } => {
                let z = Self::zbasis(g, label, basis)?;
                let c = class_z(g, c, label)?.reduce_mod2();
                let m = BPMap::new(Self::mod2(&z), c, label.clone()).map_err(schema)?;
                Ok(ResolvedEntry::Bp(m))
            }
        }
    }
}

/// A mod-2 class as 0/1 integers.
pub fn class_json(c: &HClass) -> Vec<i64> {
    (0..c.genus().rank())
        .map(|k| i64::from(c.coords().get(k)))
        .collect()
}

/// Ordered string map, for stable JSON key order.
pub type Map<V> = BTreeMap<String, V>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bool_poly_round_trip() {
        let g = Genus::new(2).unwrap();
        let p = BoolPoly::parse(g, "a1*b2 + a2 + 1").unwrap();
        let j = BoolPolyJson::from_poly(&p);
        assert_eq!(j.to_poly().unwrap(), p);
        let bad = BoolPolyJson {
            genus: 2,
            terms: vec![vec![0, 0]],
        };
        assert!(bad.to_poly().is_err());
    }

    #[test]
    fn cm_poly_round_trip() {
        let g = Genus::new(1).unwrap();
        let r = bcj_core::cassonmorita::rho_separating(&ZSubsurfaceBasis::standard(g, &[1])).unwrap();
        let j = CMPolyJson::from_poly(&r);
        let text = serde_json::to_string(&j).unwrap();
        let back: CMPolyJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_poly().unwrap(), r);
    }

    #[test]
    fn catalog_parses_both_kinds() {
        let text = r#"{"genus": 2, "entries": [
            {"type": "separating", "label": "s", "basis": [[[1,0,0,0],[0,0,1,0]]]},
            {"type": "bp", "label": "b", "basis": [[[0,1,0,0],[0,0,0,1]]], "C": [1,0,0,0]}
        ]}"#;
        let cat: Catalog = serde_json::from_str(text).unwrap();
        let g = Genus::new(cat.genus).unwrap();
        assert_eq!(cat.entries.len(), 2);
        for e in &cat.entries {
            e.resolve(g).unwrap();
        }
        let unknown = r#"{"genus": 1, "entries": [{"type": "twist", "label": "x"}]}"#;
        assert!(serde_json::from_str::<Catalog>(unknown).is_err());
    }
}
