//! The standard model of Σ_{g,1}.
//!
//! Homology classes are coordinate vectors in the fixed symplectic basis,
//! ordered `a₁..a_g, b₁..b_g`. The mod-2 intersection form pairs `a_i` with
//! `b_i`; the integral form is antisymmetric with `a_i·b_i = +1`.
//!
//! Two modelling axioms are assumed and not checked: every mod-2 pair `(x, y)`
//! with `x·y = 1` is realized by a genus-1 spine, and spines with disjoint
//! handle supports admit disjoint representatives. Disjointness is therefore
//! decided by handle support alone, which is sufficient but not necessary.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Add;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gf2::{mat_rank, BitVec};
use crate::{Error, Result};

pub const MAX_GENUS: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Genus(u32);

impl Genus {
    pub fn new(g: u32) -> Result<Self> {
        if g == 0 || g > MAX_GENUS {
            return Err(Error::InvalidGenus(g));
        }
        Ok(Genus(g))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Number of homology coordinates, `2g`.
    pub fn rank(self) -> usize {
        2 * self.0 as usize
    }

    pub(crate) fn ensure_same(self, other: Genus) -> Result<()> {
        if self != other {
            return Err(Error::GenusMismatch {
                left: self.0,
                right: other.0,
            });
        }
        Ok(())
    }

    pub(crate) fn check_handle(self, i: usize) -> Result<()> {
        if i == 0 || i > self.0 as usize {
            return Err(Error::Handle {
                index: i,
                genus: self.0,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Genus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Name of coordinate `k`: `a1..ag` then `b1..bg`.
pub fn coordinate_name(g: Genus, k: usize) -> String {
    let n = g.get() as usize;
    if k < n {
        format!("a{}", k + 1)
    } else {
        format!("b{}", k - n + 1)
    }
}

/// Mod-2 intersection of two coordinate masks.
pub(crate) fn intersect_masks(g: Genus, u: u64, v: u64) -> bool {
    let n = g.get();
    let low = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    let (ua, ub) = (u & low, (u >> n) & low);
    let (va, vb) = (v & low, (v >> n) & low);
    ((ua & vb).count_ones() + (ub & va).count_ones()) % 2 == 1
}

/// Handles touched by a coordinate mask, as a mask with bit `i-1` for handle `i`.
pub(crate) fn handle_mask(g: Genus, u: u64) -> u64 {
    let n = g.get();
    let low = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    (u & low) | ((u >> n) & low)
}

/// A class in H₁(Σ_{g,1}; F₂).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HClass {
    genus: Genus,
    coords: BitVec,
}

impl HClass {
    pub fn zero(g: Genus) -> Self {
        HClass {
            genus: g,
            coords: BitVec::zeros(g.rank()),
        }
    }

    /// The basis class `a_i`. Panics if `i` is not in `1..=g`.
    pub fn a(g: Genus, i: usize) -> Self {
        g.check_handle(i).expect("handle index");
        HClass {
            genus: g,
            coords: BitVec::unit(g.rank(), i - 1),
        }
    }

    /// The basis class `b_i`. Panics if `i` is not in `1..=g`.
    pub fn b(g: Genus, i: usize) -> Self {
        g.check_handle(i).expect("handle index");
        HClass {
            genus: g,
            coords: BitVec::unit(g.rank(), g.get() as usize + i - 1),
        }
    }

    /// The `k`-th basis vector in coordinate order.
    pub fn basis(g: Genus, k: usize) -> Self {
        HClass {
            genus: g,
            coords: BitVec::unit(g.rank(), k),
        }
    }

    pub fn from_bits(g: Genus, coords: BitVec) -> Result<Self> {
        if coords.len() != g.rank() {
            return Err(Error::Dimension {
                expected: g.rank(),
                found: coords.len(),
            });
        }
        Ok(HClass { genus: g, coords })
    }

    pub fn from_mask(g: Genus, mask: u64) -> Self {
        HClass {
            genus: g,
            coords: BitVec::from_u64(g.rank(), mask),
        }
    }

    pub fn genus(&self) -> Genus {
        self.genus
    }

    pub fn coords(&self) -> &BitVec {
        &self.coords
    }

    /// Coordinates packed into an integer, bit `k` for coordinate `k`.
    pub fn mask(&self) -> u64 {
        self.coords.low_word()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }

    pub fn try_add(&self, other: &HClass) -> Result<HClass> {
        self.genus.ensure_same(other.genus)?;
        Ok(HClass {
            genus: self.genus,
            coords: self.coords.xor(&other.coords)?,
        })
    }

    /// The mod-2 intersection number `self · other`.
    pub fn intersect(&self, other: &HClass) -> Result<bool> {
        self.genus.ensure_same(other.genus)?;
        Ok(intersect_masks(self.genus, self.mask(), other.mask()))
    }

    /// Handles (1-based) on which the class has a nonzero coefficient.
    pub fn support(&self) -> BTreeSet<usize> {
        let m = self.support_mask();
        (0..self.genus.get() as usize)
            .filter(|i| m >> i & 1 == 1)
            .map(|i| i + 1)
            .collect()
    }

    pub fn support_mask(&self) -> u64 {
        handle_mask(self.genus, self.mask())
    }
}

impl Add for &HClass {
    type Output = HClass;

    /// Panics on genus mismatch; use [`HClass::try_add`] to handle it.
    fn add(self, rhs: &HClass) -> HClass {
        self.try_add(rhs).expect("genus mismatch in HClass addition")
    }
}

impl fmt::Display for HClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coords
            .ones()
            .map(|k| coordinate_name(self.genus, k))
            .collect();
        f.write_str(&parts.join("+"))
    }
}

impl fmt::Debug for HClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HClass({self})")
    }
}

/// A class in H₁(Σ_{g,1}; ℤ).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZHClass {
    genus: Genus,
    coords: Vec<i64>,
}

impl ZHClass {
    pub fn zero(g: Genus) -> Self {
        ZHClass {
            genus: g,
            coords: alloc::vec![0; g.rank()],
        }
    }

    pub fn basis(g: Genus, k: usize) -> Self {
        let mut z = Self::zero(g);
        z.coords[k] = 1;
        z
    }

    pub fn a(g: Genus, i: usize) -> Self {
        g.check_handle(i).expect("handle index");
        Self::basis(g, i - 1)
    }

    pub fn b(g: Genus, i: usize) -> Self {
        g.check_handle(i).expect("handle index");
        Self::basis(g, g.get() as usize + i - 1)
    }

    pub fn new(g: Genus, coords: Vec<i64>) -> Result<Self> {
        if coords.len() != g.rank() {
            return Err(Error::Dimension {
                expected: g.rank(),
                found: coords.len(),
            });
        }
        Ok(ZHClass { genus: g, coords })
    }

    pub fn genus(&self) -> Genus {
        self.genus
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn try_add(&self, other: &ZHClass) -> Result<ZHClass> {
        self.genus.ensure_same(other.genus)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.checked_add(*b).expect("ZHClass coordinate overflow"))
            .collect();
        Ok(ZHClass {
            genus: self.genus,
            coords,
        })
    }

    pub fn scale(&self, n: i64) -> ZHClass {
        ZHClass {
            genus: self.genus,
            coords: self
                .coords
                .iter()
                .map(|c| c.checked_mul(n).expect("ZHClass coordinate overflow"))
                .collect(),
        }
    }

    /// The antisymmetric integral intersection number.
    pub fn intersect(&self, other: &ZHClass) -> Result<i64> {
        self.genus.ensure_same(other.genus)?;
        let n = self.genus.get() as usize;
        let mut acc: i128 = 0;
        for i in 0..n {
            acc += self.coords[i] as i128 * other.coords[n + i] as i128;
            acc -= self.coords[n + i] as i128 * other.coords[i] as i128;
        }
        Ok(i64::try_from(acc).expect("intersection number overflow"))
    }

    pub fn reduce_mod2(&self) -> HClass {
        let mut bits = BitVec::zeros(self.genus.rank());
        for (k, c) in self.coords.iter().enumerate() {
            if c.rem_euclid(2) == 1 {
                bits.set(k, true);
            }
        }
        HClass {
            genus: self.genus,
            coords: bits,
        }
    }

    /// Symplectic transvection `x ↦ x + (x·v) v`.
    pub fn transvect(&self, v: &ZHClass) -> Result<ZHClass> {
        let t = self.intersect(v)?;
        self.try_add(&v.scale(t))
    }

    pub fn support_mask(&self) -> u64 {
        let n = self.genus.get() as usize;
        (0..n)
            .filter(|&i| self.coords[i] != 0 || self.coords[n + i] != 0)
            .fold(0, |m, i| m | 1 << i)
    }
}

/// A genus-1 spine: two classes meeting once.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spine {
    pub x: HClass,
    pub y: HClass,
}

impl Spine {
    pub fn new(x: HClass, y: HClass) -> Result<Self> {
        let s = Spine { x, y };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.x.intersect(&self.y)? {
            return Err(Error::Spine(0));
        }
        Ok(())
    }

    pub fn genus(&self) -> Genus {
        self.x.genus()
    }

    pub fn support_mask(&self) -> u64 {
        self.x.support_mask() | self.y.support_mask()
    }

    pub fn support(&self) -> BTreeSet<usize> {
        let mut s = self.x.support();
        s.extend(self.y.support());
        s
    }

    pub fn to_basis(&self) -> SubsurfaceBasis {
        SubsurfaceBasis {
            genus: self.genus(),
            pairs: alloc::vec![(self.x.clone(), self.y.clone())],
        }
    }
}

/// Conservative disjoint-realizability test: the two spines use disjoint handles.
pub fn spines_disjointly_realizable(s1: &Spine, s2: &Spine) -> Result<bool> {
    s1.validate()?;
    s2.validate()?;
    s1.genus().ensure_same(s2.genus())?;
    Ok(s1.support_mask() & s2.support_mask() == 0)
}

/// Two genus-1 spines declared disjoint, i.e. an abelian cycle of separating twists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinePair {
    pub spine1: Spine,
    pub spine2: Spine,
    pub label: String,
}

impl SpinePair {
    /// Builds a pair, rejecting spines whose supports overlap.
    pub fn disjoint(spine1: Spine, spine2: Spine, label: impl Into<String>) -> Result<Self> {
        if !spines_disjointly_realizable(&spine1, &spine2)? {
            return Err(Error::Disjointness(format!(
                "spines share handles {:?}",
                spine1
                    .support()
                    .intersection(&spine2.support())
                    .collect::<Vec<_>>()
            )));
        }
        Ok(SpinePair {
            spine1,
            spine2,
            label: label.into(),
        })
    }

    pub fn genus(&self) -> Genus {
        self.spine1.genus()
    }
}

/// First violated condition of a symplectic basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisViolation {
    /// e.g. `"A1·B2"`
    pub pair: String,
    pub expected: i64,
    pub found: i64,
}

impl fmt::Display for BasisViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = {} (expected {})",
            self.pair, self.found, self.expected
        )
    }
}

/// Checks `A_i·B_j = δ_ij`, `A_i·A_j = B_i·B_j = 0` for a generic pairing.
fn first_violation<T>(
    pairs: &[(T, T)],
    dot: impl Fn(&T, &T) -> Result<i64>,
) -> Result<Option<BasisViolation>> {
    let h = pairs.len();
    for i in 0..h {
        for j in 0..h {
            let want = i64::from(i == j);
            let found = dot(&pairs[i].0, &pairs[j].1)?;
            if found != want {
                return Ok(Some(BasisViolation {
                    pair: format!("A{}·B{}", i + 1, j + 1),
                    expected: want,
                    found,
                }));
            }
            if i < j {
                let aa = dot(&pairs[i].0, &pairs[j].0)?;
                if aa != 0 {
                    return Ok(Some(BasisViolation {
                        pair: format!("A{}·A{}", i + 1, j + 1),
                        expected: 0,
                        found: aa,
                    }));
                }
                let bb = dot(&pairs[i].1, &pairs[j].1)?;
                if bb != 0 {
                    return Ok(Some(BasisViolation {
                        pair: format!("B{}·B{}", i + 1, j + 1),
                        expected: 0,
                        found: bb,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// A mod-2 symplectic basis `(A_i, B_i)` of a subsurface.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsurfaceBasis {
    pub genus: Genus,
    pub pairs: Vec<(HClass, HClass)>,
}

impl SubsurfaceBasis {
    pub fn new(genus: Genus, pairs: Vec<(HClass, HClass)>) -> Result<Self> {
        let b = SubsurfaceBasis { genus, pairs };
        if let Some(v) = b.check()? {
            return Err(Error::Basis(format!("{v}")));
        }
        Ok(b)
    }

    pub fn empty(genus: Genus) -> Self {
        SubsurfaceBasis {
            genus,
            pairs: Vec::new(),
        }
    }

    /// Standard basis `(a_i, b_i)` on the given handles.
    pub fn standard(genus: Genus, handles: &[usize]) -> Self {
        SubsurfaceBasis {
            genus,
            pairs: handles
                .iter()
                .map(|&i| (HClass::a(genus, i), HClass::b(genus, i)))
                .collect(),
        }
    }

    /// Returns the first violated intersection condition, if any.
    ///
    /// Errors only on genus mismatch between entries.
    pub fn check(&self) -> Result<Option<BasisViolation>> {
        for (x, y) in &self.pairs {
            self.genus.ensure_same(x.genus())?;
            self.genus.ensure_same(y.genus())?;
        }
        first_violation(&self.pairs, |u, v| Ok(i64::from(u.intersect(v)?)))
    }

    pub fn subsurface_genus(&self) -> usize {
        self.pairs.len()
    }

    pub fn support_mask(&self) -> u64 {
        self.pairs
            .iter()
            .fold(0, |m, (x, y)| m | x.support_mask() | y.support_mask())
    }

    pub fn classes(&self) -> impl Iterator<Item = &HClass> {
        self.pairs.iter().flat_map(|(x, y)| [x, y])
    }

    pub fn span_rank(&self) -> usize {
        let rows: Vec<BitVec> = self.classes().map(|c| c.coords().clone()).collect();
        mat_rank(&rows).unwrap_or(0)
    }

    /// True when both bases span the same subspace of H.
    pub fn same_span(&self, other: &SubsurfaceBasis) -> Result<bool> {
        self.genus.ensure_same(other.genus)?;
        let mut rows: Vec<BitVec> = self.classes().map(|c| c.coords().clone()).collect();
        let r1 = mat_rank(&rows)?;
        let theirs: Vec<BitVec> = other.classes().map(|c| c.coords().clone()).collect();
        let r2 = mat_rank(&theirs)?;
        rows.extend(theirs);
        Ok(r1 == r2 && mat_rank(&rows)? == r1)
    }

    /// Applies `M` to every class.
    pub fn transform(&self, m: &SpMatrix) -> Result<SubsurfaceBasis> {
        self.genus.ensure_same(m.genus())?;
        Ok(SubsurfaceBasis {
            genus: self.genus,
            pairs: self
                .pairs
                .iter()
                .map(|(x, y)| Ok((m.apply(x)?, m.apply(y)?)))
                .collect::<Result<_>>()?,
        })
    }
}

/// An integral symplectic basis of a subsurface.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZSubsurfaceBasis {
    pub genus: Genus,
    pub pairs: Vec<(ZHClass, ZHClass)>,
}

impl ZSubsurfaceBasis {
    pub fn new(genus: Genus, pairs: Vec<(ZHClass, ZHClass)>) -> Result<Self> {
        let b = ZSubsurfaceBasis { genus, pairs };
        if let Some(v) = b.check()? {
            return Err(Error::Basis(format!("{v}")));
        }
        Ok(b)
    }

    pub fn standard(genus: Genus, handles: &[usize]) -> Self {
        ZSubsurfaceBasis {
            genus,
            pairs: handles
                .iter()
                .map(|&i| (ZHClass::a(genus, i), ZHClass::b(genus, i)))
                .collect(),
        }
    }

    pub fn check(&self) -> Result<Option<BasisViolation>> {
        for (x, y) in &self.pairs {
            self.genus.ensure_same(x.genus())?;
            self.genus.ensure_same(y.genus())?;
        }
        first_violation(&self.pairs, |u, v| u.intersect(v))
    }

    pub fn reduce_mod2(&self) -> SubsurfaceBasis {
        SubsurfaceBasis {
            genus: self.genus,
            pairs: self
                .pairs
                .iter()
                .map(|(x, y)| (x.reduce_mod2(), y.reduce_mod2()))
                .collect(),
        }
    }

    pub fn support_mask(&self) -> u64 {
        self.pairs
            .iter()
            .fold(0, |m, (x, y)| m | x.support_mask() | y.support_mask())
    }

    /// Applies the transvection along `v` to every class.
    pub fn transvect(&self, v: &ZHClass) -> Result<ZSubsurfaceBasis> {
        Ok(ZSubsurfaceBasis {
            genus: self.genus,
            pairs: self
                .pairs
                .iter()
                .map(|(x, y)| Ok((x.transvect(v)?, y.transvect(v)?)))
                .collect::<Result<_>>()?,
        })
    }
}

/// Elementary moves between mod-2 symplectic bases of the same subspace.
/// Pair indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RebaseMove {
    /// `A_i ↔ B_i`.
    Swap(usize),
    /// `A_i ← A_i + B_i`.
    Shear(usize),
    /// `A_i ← A_i + A_j`, `B_j ← B_j + B_i`.
    AddPair(usize, usize),
    /// `A_i ← A_i + B_j`, `A_j ← A_j + B_i`.
    CrossShear(usize, usize),
    /// Exchange pairs `i` and `j`.
    Permute(usize, usize),
}

impl SubsurfaceBasis {
    pub fn apply_move(&self, mv: RebaseMove) -> Result<SubsurfaceBasis> {
        let h = self.pairs.len();
        let check = |i: usize| {
            if i >= h {
                Err(Error::Argument(format!("pair index {i} out of range {h}")))
            } else {
                Ok(())
            }
        };
        let distinct = |i: usize, j: usize| {
            check(i)?;
            check(j)?;
            if i == j {
                Err(Error::Argument(format!("move needs distinct pairs, got {i}")))
            } else {
                Ok(())
            }
        };
        let mut p = self.pairs.clone();
        match mv {
            RebaseMove::Swap(i) => {
                check(i)?;
                let (a, b) = p[i].clone();
                p[i] = (b, a);
            }
            RebaseMove::Shear(i) => {
                check(i)?;
                p[i].0 = &p[i].0 + &p[i].1;
            }
            RebaseMove::AddPair(i, j) => {
                distinct(i, j)?;
                p[i].0 = &self.pairs[i].0 + &self.pairs[j].0;
                p[j].1 = &self.pairs[j].1 + &self.pairs[i].1;
            }
            RebaseMove::CrossShear(i, j) => {
                distinct(i, j)?;
                p[i].0 = &self.pairs[i].0 + &self.pairs[j].1;
                p[j].0 = &self.pairs[j].0 + &self.pairs[i].1;
            }
            RebaseMove::Permute(i, j) => {
                check(i)?;
                check(j)?;
                p.swap(i, j);
            }
        }
        Ok(SubsurfaceBasis {
            genus: self.genus,
            pairs: p,
        })
    }
}

/// Applies a seeded random sequence of [`RebaseMove`]s.
pub fn random_symplectic_rebase(s: &SubsurfaceBasis, seed: u64) -> Result<SubsurfaceBasis> {
    if let Some(v) = s.check()? {
        return Err(Error::Basis(format!("{v}")));
    }
    let h = s.pairs.len();
    if h == 0 {
        return Ok(s.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = rng.gen_range(1..=4 * h + 4);
    let mut cur = s.clone();
    for _ in 0..steps {
        let i = rng.gen_range(0..h);
        let mv = if h == 1 {
            match rng.gen_range(0..2) {
                0 => RebaseMove::Swap(i),
                _ => RebaseMove::Shear(i),
            }
        } else {
            let mut j = rng.gen_range(0..h - 1);
            if j >= i {
                j += 1;
            }
            match rng.gen_range(0..5) {
                0 => RebaseMove::Swap(i),
                1 => RebaseMove::Shear(i),
                2 => RebaseMove::AddPair(i, j),
                3 => RebaseMove::CrossShear(i, j),
                _ => RebaseMove::Permute(i, j),
            }
        };
        cur = cur.apply_move(mv)?;
    }
    Ok(cur)
}

/// A 2g×2g matrix over F₂, stored by columns (`columns[k] = M·e_k`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpMatrix {
    genus: Genus,
    columns: Vec<HClass>,
}

impl SpMatrix {
    pub fn identity(g: Genus) -> Self {
        SpMatrix {
            genus: g,
            columns: (0..g.rank()).map(|k| HClass::basis(g, k)).collect(),
        }
    }

    /// Builds a matrix from its columns, checking `MᵀJM = J`.
    pub fn from_columns(g: Genus, columns: Vec<HClass>) -> Result<Self> {
        if columns.len() != g.rank() {
            return Err(Error::Dimension {
                expected: g.rank(),
                found: columns.len(),
            });
        }
        for c in &columns {
            g.ensure_same(c.genus())?;
        }
        let m = SpMatrix { genus: g, columns };
        m.check_symplectic()?;
        Ok(m)
    }

    /// Exchanges `a_i` and `b_i`.
    pub fn handle_swap(g: Genus, i: usize) -> Result<Self> {
        g.check_handle(i)?;
        let mut m = Self::identity(g);
        let n = g.get() as usize;
        m.columns.swap(i - 1, n + i - 1);
        Ok(m)
    }

    /// Exchanges handles `i` and `j` (`a_i ↔ a_j`, `b_i ↔ b_j`).
    pub fn handle_transposition(g: Genus, i: usize, j: usize) -> Result<Self> {
        g.check_handle(i)?;
        g.check_handle(j)?;
        let mut m = Self::identity(g);
        let n = g.get() as usize;
        m.columns.swap(i - 1, j - 1);
        m.columns.swap(n + i - 1, n + j - 1);
        Ok(m)
    }

    /// Transvection `x ↦ x + (x·v) v`.
    pub fn transvection(v: &HClass) -> Self {
        let g = v.genus();
        let columns = (0..g.rank())
            .map(|k| {
                let e = HClass::basis(g, k);
                if intersect_masks(g, e.mask(), v.mask()) {
                    &e + v
                } else {
                    e
                }
            })
            .collect();
        SpMatrix { genus: g, columns }
    }

    pub fn genus(&self) -> Genus {
        self.genus
    }

    pub fn columns(&self) -> &[HClass] {
        &self.columns
    }

    pub fn check_symplectic(&self) -> Result<()> {
        let g = self.genus;
        for k in 0..g.rank() {
            for l in k + 1..g.rank() {
                let want = intersect_masks(g, 1 << k, 1 << l);
                let got = self.columns[k].intersect(&self.columns[l])?;
                if want != got {
                    return Err(Error::Matrix(format!(
                        "M·{} · M·{} = {} but {}·{} = {}",
                        coordinate_name(g, k),
                        coordinate_name(g, l),
                        u8::from(got),
                        coordinate_name(g, k),
                        coordinate_name(g, l),
                        u8::from(want)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, c: &HClass) -> Result<HClass> {
        self.genus.ensure_same(c.genus())?;
        let m = self
            .columns
            .iter()
            .enumerate()
            .filter(|(k, _)| c.mask() >> k & 1 == 1)
            .fold(0u64, |acc, (_, col)| acc ^ col.mask());
        Ok(HClass::from_mask(self.genus, m))
    }

    /// The product `self · other` (apply `other` first).
    pub fn compose(&self, other: &SpMatrix) -> Result<SpMatrix> {
        self.genus.ensure_same(other.genus)?;
        Ok(SpMatrix {
            genus: self.genus,
            columns: other
                .columns
                .iter()
                .map(|c| self.apply(c))
                .collect::<Result<_>>()?,
        })
    }

    /// A product of `len` transvections along random nonzero classes.
    pub fn random_word<R: Rng>(g: Genus, len: usize, rng: &mut R) -> SpMatrix {
        let full = if g.rank() >= 64 {
            u64::MAX
        } else {
            (1u64 << g.rank()) - 1
        };
        let mut m = Self::identity(g);
        for _ in 0..len {
            let mut v = 0;
            while v == 0 {
                v = rng.gen::<u64>() & full;
            }
            m = Self::transvection(&HClass::from_mask(g, v))
                .compose(&m)
                .expect("same genus");
        }
        m
    }
}

/// Integral symplectic basis on `handles`, scrambled by random transvections
/// supported on those handles. Entries stay small for modest `steps`.
pub fn random_integral_basis<R: Rng>(
    g: Genus,
    handles: &[usize],
    steps: usize,
    rng: &mut R,
) -> ZSubsurfaceBasis {
    let n = g.get() as usize;
    if handles.is_empty() {
        return ZSubsurfaceBasis::standard(g, &[]);
    }
    let h = rng.gen_range(1..=handles.len());
    let mut basis = ZSubsurfaceBasis::standard(g, &handles[..h]);
    for _ in 0..steps {
        let mut coords = alloc::vec![0i64; 2 * n];
        while coords.iter().all(|&c| c == 0) {
            for &i in handles {
                coords[i - 1] = rng.gen_range(-1..=1);
                coords[n + i - 1] = rng.gen_range(-1..=1);
            }
        }
        let v = ZHClass::new(g, coords).expect("length");
        basis = basis.transvect(&v).expect("same genus");
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: u32) -> Genus {
        Genus::new(n).unwrap()
    }

    #[test]
    fn genus_bounds() {
        assert!(Genus::new(0).is_err());
        assert!(Genus::new(33).is_err());
        assert_eq!(g(3).rank(), 6);
    }

    #[test]
    fn intersection_examples() {
        let g4 = g(4);
        assert!(HClass::a(g4, 1).intersect(&HClass::b(g4, 1)).unwrap());
        assert!(!HClass::a(g4, 1).intersect(&HClass::a(g4, 2)).unwrap());
        assert!(!HClass::b(g4, 2).intersect(&HClass::a(g4, 3)).unwrap());
        assert!(HClass::a(g4, 1).intersect(&HClass::a(g(3), 1)).is_err());
        let z = g4;
        assert_eq!(ZHClass::a(z, 1).intersect(&ZHClass::b(z, 1)).unwrap(), 1);
        assert_eq!(ZHClass::b(z, 1).intersect(&ZHClass::a(z, 1)).unwrap(), -1);
    }

    #[test]
    fn mod2_form_is_symmetric_and_alternating() {
        for n in 1..=3 {
            let gg = g(n);
            let all = 1u64 << gg.rank();
            for u in 0..all {
                let cu = HClass::from_mask(gg, u);
                assert!(!cu.intersect(&cu).unwrap());
                for v in 0..all {
                    let cv = HClass::from_mask(gg, v);
                    assert_eq!(cu.intersect(&cv).unwrap(), cv.intersect(&cu).unwrap());
                    for w in [0, 1, all - 1] {
                        let cw = HClass::from_mask(gg, w);
                        let lhs = (&cu + &cv).intersect(&cw).unwrap();
                        let rhs = cu.intersect(&cw).unwrap() ^ cv.intersect(&cw).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn supports() {
        let g3 = g(3);
        assert!(HClass::zero(g3).support().is_empty());
        let ab = &HClass::a(g3, 1) + &HClass::b(g3, 1);
        assert_eq!(ab.support().into_iter().collect::<Vec<_>>(), [1]);
        let bj_ak = &HClass::b(g3, 2) + &HClass::a(g3, 3);
        assert_eq!(bj_ak.support().into_iter().collect::<Vec<_>>(), [2, 3]);
    }

    #[test]
    fn disjoint_spines() {
        let g4 = g(4);
        let (a, b) = (|i| HClass::a(g4, i), |i| HClass::b(g4, i));
        let s1 = Spine::new(a(1), b(1)).unwrap();
        let s2 = Spine::new(a(2), b(2)).unwrap();
        assert!(spines_disjointly_realizable(&s1, &s2).unwrap());
        let v1 = Spine::new(&a(1) + &b(1), &a(1) + &a(2)).unwrap();
        let v2 = Spine::new(a(3), b(3)).unwrap();
        assert!(spines_disjointly_realizable(&v1, &v2).unwrap());
        assert!(spines_disjointly_realizable(&v2, &v1).unwrap());
        let o = Spine::new(&a(1) + &a(2), b(2)).unwrap();
        assert!(!spines_disjointly_realizable(&s1, &o).unwrap());
        assert!(SpinePair::disjoint(s1.clone(), o, "x").is_err());
        let bad = Spine { x: a(1), y: a(2) };
        assert!(matches!(
            spines_disjointly_realizable(&bad, &s1),
            Err(Error::Spine(_))
        ));
    }

    #[test]
    fn symplectic_basis_checks() {
        let g2 = g(2);
        assert!(SubsurfaceBasis::standard(g2, &[1]).check().unwrap().is_none());
        assert!(SubsurfaceBasis::standard(g2, &[1, 2])
            .check()
            .unwrap()
            .is_none());
        let bad = SubsurfaceBasis {
            genus: g2,
            pairs: alloc::vec![(HClass::a(g2, 1), HClass::a(g2, 2))],
        };
        let v = bad.check().unwrap().unwrap();
        assert_eq!(v.pair, "A1·B1");
        assert_eq!(v.found, 0);
        assert!(ZSubsurfaceBasis::standard(g2, &[1, 2])
            .check()
            .unwrap()
            .is_none());
        let zbad = ZSubsurfaceBasis {
            genus: g2,
            pairs: alloc::vec![(ZHClass::b(g2, 1), ZHClass::a(g2, 1))],
        };
        assert_eq!(zbad.check().unwrap().unwrap().found, -1);
    }

    #[test]
    fn rebase_moves() {
        let g1 = g(1);
        let s = SubsurfaceBasis::standard(g1, &[1]);
        let sw = s.apply_move(RebaseMove::Swap(0)).unwrap();
        assert_eq!(sw.pairs[0], (HClass::b(g1, 1), HClass::a(g1, 1)));
        let sh = s.apply_move(RebaseMove::Shear(0)).unwrap();
        assert_eq!(
            sh.pairs[0],
            (&HClass::a(g1, 1) + &HClass::b(g1, 1), HClass::b(g1, 1))
        );
        assert!(sw.check().unwrap().is_none());
        assert!(sh.check().unwrap().is_none());
        assert!(s.apply_move(RebaseMove::AddPair(0, 0)).is_err());
    }

    #[test]
    fn random_rebase_preserves_span() {
        let g4 = g(4);
        for h in 1..=3usize {
            let handles: Vec<usize> = (1..=h).collect();
            let s = SubsurfaceBasis::standard(g4, &handles);
            for seed in 0..50 {
                let r = random_symplectic_rebase(&s, seed).unwrap();
                assert!(r.check().unwrap().is_none());
                assert!(r.same_span(&s).unwrap());
                assert_eq!(r, random_symplectic_rebase(&s, seed).unwrap());
            }
        }
    }

    #[test]
    fn sp_matrices() {
        let g3 = g(3);
        let sw = SpMatrix::handle_swap(g3, 2).unwrap();
        assert_eq!(sw.apply(&HClass::a(g3, 2)).unwrap(), HClass::b(g3, 2));
        let tr = SpMatrix::handle_transposition(g3, 1, 3).unwrap();
        assert_eq!(tr.apply(&HClass::b(g3, 1)).unwrap(), HClass::b(g3, 3));
        let t = SpMatrix::transvection(&(&HClass::a(g3, 1) + &HClass::b(g3, 2)));
        t.check_symplectic().unwrap();
        let mut cols: Vec<HClass> = SpMatrix::identity(g3).columns().to_vec();
        cols[0] = HClass::a(g3, 2);
        assert!(matches!(
            SpMatrix::from_columns(g3, cols),
            Err(Error::Matrix(_))
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = SpMatrix::random_word(g3, 12, &mut rng);
        w.check_symplectic().unwrap();
    }

    #[test]
    fn integral_bases_are_symplectic() {
        let g4 = g(4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let b = random_integral_basis(g4, &[1, 2, 4], 6, &mut rng);
            assert!(b.check().unwrap().is_none());
            assert_eq!(b.support_mask() & !0b1011, 0);
        }
    }
}
