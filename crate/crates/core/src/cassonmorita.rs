//! The Casson–Morita algebra 𝒜 and its maps to B₂ and ℤ.
//!
//! 𝒜 is presented as a free commutative polynomial ring over ℤ on the
//! normal-form symbols `l(e_p, e_q)` with `p ≤ q` in the coordinate order
//! `a₁ < … < a_g < b₁ < … < b_g`. Bilinearity and the relation
//! `l(v, u) = l(u, v) + u·v` are applied once, when a symbol `l(u, v)` on
//! arbitrary classes is expanded; after that no relations remain.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bcjmap::{sigma_separating, SeparatingTwist};
use crate::boolring::{bar, evaluate, BoolPoly, SelfLinkingForm};
use crate::gf2::BitVec;
use crate::surface::{coordinate_name, random_integral_basis, Genus, HClass, ZHClass, ZSubsurfaceBasis};
use crate::wedgespan::wedge;
use crate::{Error, Result};

/// `l(e_p, e_q)` with `p ≤ q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CMSymbol {
    pub p: u16,
    pub q: u16,
}

impl CMSymbol {
    pub fn new(g: Genus, p: usize, q: usize) -> Result<Self> {
        let r = g.rank();
        if p > q || q >= r {
            return Err(Error::Argument(format!(
                "symbol l(e_{p}, e_{q}) is not in normal form for rank {r}"
            )));
        }
        Ok(CMSymbol {
            p: p as u16,
            q: q as u16,
        })
    }

    pub fn is_diagonal(self) -> bool {
        self.p == self.q
    }

    pub fn render(self, g: Genus) -> String {
        format!(
            "l({},{})",
            coordinate_name(g, self.p as usize),
            coordinate_name(g, self.q as usize)
        )
    }
}

/// Number of normal-form symbols, `2g² + g`.
pub fn symbol_count(g: Genus) -> usize {
    let r = g.rank();
    r * (r + 1) / 2
}

/// A sorted multiset of symbols; empty is `1`.
pub type CMMonomial = Vec<CMSymbol>;

/// An element of 𝒜 in normal form: no zero coefficients are stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CMPoly {
    genus: Genus,
    terms: BTreeMap<CMMonomial, BigInt>,
}

impl CMPoly {
    pub fn zero(genus: Genus) -> Self {
        CMPoly {
            genus,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(genus: Genus, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(genus);
        p.add_term(Vec::new(), c.into());
        p
    }

    pub fn one(genus: Genus) -> Self {
        Self::constant(genus, 1)
    }

    pub fn symbol(genus: Genus, s: CMSymbol) -> Self {
        let mut p = Self::zero(genus);
        p.add_term(vec![s], BigInt::one());
        p
    }

    /// Builds a polynomial from `(monomial, coefficient)` pairs, sorting each
    /// monomial and merging repeats.
    pub fn from_terms(
        genus: Genus,
        terms: impl IntoIterator<Item = (CMMonomial, BigInt)>,
    ) -> Result<Self> {
        let mut p = Self::zero(genus);
        for (mut m, c) in terms {
            for s in &m {
                CMSymbol::new(genus, s.p as usize, s.q as usize)?;
            }
            m.sort_unstable();
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn genus(&self) -> Genus {
        self.genus
    }

    pub fn terms(&self) -> &BTreeMap<CMMonomial, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &[CMSymbol]) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, m: CMMonomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &CMPoly) -> Result<CMPoly> {
        self.genus.ensure_same(other.genus)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &CMPoly) -> Result<CMPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CMPoly {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, k: &BigInt) -> CMPoly {
        let mut out = CMPoly::zero(self.genus);
        if k.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect();
        out
    }

    pub fn mul(&self, other: &CMPoly) -> Result<CMPoly> {
        self.genus.ensure_same(other.genus)?;
        let mut out = CMPoly::zero(self.genus);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m: CMMonomial = m1.iter().chain(m2).copied().collect();
                m.sort_unstable();
                out.add_term(m, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Terms by decreasing degree, then increasing monomial.
    pub fn sorted_terms(&self) -> Vec<(&CMMonomial, &BigInt)> {
        let mut t: Vec<_> = self.terms.iter().collect();
        t.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(b.0)));
        t
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let mag = c.abs();
            if k == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            let body = render_monomial(self.genus, m);
            match (mag.is_one(), m.is_empty()) {
                (true, true) => out.push('1'),
                (true, false) => out.push_str(&body),
                (false, true) => out.push_str(&mag.to_string()),
                (false, false) => out.push_str(&format!("{mag}*{body}")),
            }
        }
        out
    }
}

fn render_monomial(g: Genus, m: &[CMSymbol]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < m.len() {
        let mut j = i;
        while j < m.len() && m[j] == m[i] {
            j += 1;
        }
        let s = m[i].render(g);
        parts.push(if j - i == 1 { s } else { format!("{s}^{}", j - i) });
        i = j;
    }
    parts.join("*")
}

impl fmt::Display for CMPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for CMPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMPoly[g={}]({})", self.genus, self.render())
    }
}

/// `e_p · e_q` under the integral form with `a_i · b_i = +1`.
fn basis_intersection(g: Genus, p: usize, q: usize) -> i64 {
    let n = g.get() as usize;
    if p < n && q == p + n {
        1
    } else if q < n && p == q + n {
        -1
    } else {
        0
    }
}

/// `l(u, v)` expanded bilinearly and rewritten into normal-form symbols.
pub fn cm_generator(u: &ZHClass, v: &ZHClass) -> Result<CMPoly> {
    u.genus().ensure_same(v.genus())?;
    let g = u.genus();
    let mut out = CMPoly::zero(g);
    for (p, &up) in u.coords().iter().enumerate() {
        if up == 0 {
            continue;
        }
        for (q, &vq) in v.coords().iter().enumerate() {
            if vq == 0 {
                continue;
            }
            let k = BigInt::from(up) * BigInt::from(vq);
            if p <= q {
                out.add_term(vec![CMSymbol::new(g, p, q)?], k);
            } else {
                // l(e_p, e_q) = l(e_q, e_p) + e_q·e_p
                out.add_term(vec![CMSymbol::new(g, q, p)?], k.clone());
                out.add_term(Vec::new(), k * basis_intersection(g, q, p));
            }
        }
    }
    Ok(out)
}

/// Morita's ρ on the twist about the boundary of a subsurface with integral
/// symplectic basis `A_i, B_i`:
/// `−Σ_i [l(A_i,A_i) l(B_i,B_i) − l(A_i,B_i) l(B_i,A_i)]
///  − 2 Σ_{i<j} [l(A_i,A_j) l(B_i,B_j) − l(A_i,B_j) l(A_j,B_i)]`.
pub fn rho_separating(basis: &ZSubsurfaceBasis) -> Result<CMPoly> {
    if let Some(v) = basis.check()? {
        return Err(Error::Basis(format!("{v}")));
    }
    let (first, second) = rho_sums(basis)?;
    first.neg().sub(&second.scale(&BigInt::from(2)))
}

/// The two bracketed sums of ρ, before their coefficients `−1` and `−2`.
pub fn rho_sums(basis: &ZSubsurfaceBasis) -> Result<(CMPoly, CMPoly)> {
    let g = basis.genus;
    let l = cm_generator;
    let mut first = CMPoly::zero(g);
    for (a, b) in &basis.pairs {
        let t = l(a, a)?.mul(&l(b, b)?)?.sub(&l(a, b)?.mul(&l(b, a)?)?)?;
        first = first.add(&t)?;
    }
    let mut second = CMPoly::zero(g);
    let pairs = &basis.pairs;
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let (ai, bi) = &pairs[i];
            let (aj, bj) = &pairs[j];
            let t = l(ai, aj)?
                .mul(&l(bi, bj)?)?
                .sub(&l(ai, bj)?.mul(&l(aj, bi)?)?)?;
            second = second.add(&t)?;
        }
    }
    Ok((first, second))
}

/// The reduction μ: 𝒜 → B₂. Diagonal symbols go to their variable, all
/// other normal-form symbols to 0, coefficients mod 2.
pub fn mu(x: &CMPoly) -> Result<BoolPoly> {
    let g = x.genus;
    let two = BigInt::from(2);
    let mut out = BoolPoly::zero(g);
    for (m, c) in &x.terms {
        if (c % &two).is_zero() || m.iter().any(|s| !s.is_diagonal()) {
            continue;
        }
        let mut t = BoolPoly::one(g);
        for s in m {
            t = t.mul(&BoolPoly::var(g, s.p as usize))?;
        }
        out = out.add(&t)?;
    }
    Ok(out)
}

/// Linking numbers `L[p][q] = lk(e_p, e_q⁺)` of a Heegaard embedding.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinkingMatrix {
    genus: Genus,
    entries: Vec<Vec<i64>>,
}

impl LinkingMatrix {
    /// Validates `Lᵀ − L = J`.
    pub fn new(genus: Genus, entries: Vec<Vec<i64>>) -> Result<Self> {
        let r = genus.rank();
        if entries.len() != r {
            return Err(Error::Dimension {
                expected: r,
                found: entries.len(),
            });
        }
        for row in &entries {
            if row.len() != r {
                return Err(Error::Dimension {
                    expected: r,
                    found: row.len(),
                });
            }
        }
        let m = LinkingMatrix { genus, entries };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.genus.rank();
        for p in 0..r {
            for q in 0..r {
                let want = self.entries[q][p]
                    .checked_sub(basis_intersection(self.genus, p, q))
                    .ok_or_else(|| Error::Argument("linking entry overflow".to_string()))?;
                if self.entries[p][q] != want {
                    return Err(Error::Consistency {
                        row: p,
                        col: q,
                        expected: want,
                        found: self.entries[p][q],
                    });
                }
            }
        }
        Ok(())
    }

    /// Zero diagonal, `L[b_i][a_i] = 1`, everything else 0.
    pub fn standard_model(genus: Genus) -> Self {
        let r = genus.rank();
        let n = genus.get() as usize;
        let mut entries = vec![vec![0; r]; r];
        for i in 0..n {
            entries[n + i][i] = 1;
        }
        LinkingMatrix { genus, entries }
    }

    /// A valid matrix with free entries drawn from `-bound..=bound`.
    #[allow(clippy::needless_range_loop)]
    pub fn random<R: Rng>(genus: Genus, bound: i64, rng: &mut R) -> Self {
        let r = genus.rank();
        let mut entries = vec![vec![0; r]; r];
        for p in 0..r {
            for q in p..r {
                entries[p][q] = rng.gen_range(-bound..=bound);
                entries[q][p] = entries[p][q] + basis_intersection(genus, p, q);
            }
        }
        LinkingMatrix { genus, entries }
    }

    pub fn genus(&self) -> Genus {
        self.genus
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn get(&self, p: usize, q: usize) -> i64 {
        self.entries[p][q]
    }

    /// The self-linking form `ω_L(e_k) = L[k][k] mod 2`.
    pub fn self_linking(&self) -> SelfLinkingForm {
        let bits: Vec<bool> = (0..self.genus.rank())
            .map(|k| self.entries[k][k].rem_euclid(2) == 1)
            .collect();
        SelfLinkingForm::new(self.genus, BitVec::from_bools(&bits)).expect("rank length")
    }

    /// `uᵀ L u` over ℤ.
    pub fn quadratic(&self, u: &ZHClass) -> Result<BigInt> {
        self.genus.ensure_same(u.genus())?;
        let c = u.coords();
        let mut acc = BigInt::zero();
        for p in 0..c.len() {
            for q in 0..c.len() {
                acc += BigInt::from(c[p]) * BigInt::from(self.entries[p][q]) * BigInt::from(c[q]);
            }
        }
        Ok(acc)
    }
}

/// ε_L: substitutes `l(e_p, e_q) ↦ L[p][q]` and evaluates over ℤ.
pub fn epsilon(l: &LinkingMatrix, x: &CMPoly) -> Result<BigInt> {
    l.genus.ensure_same(x.genus)?;
    let mut acc = BigInt::zero();
    for (m, c) in &x.terms {
        let mut t = c.clone();
        for s in m {
            t *= l.get(s.p as usize, s.q as usize);
        }
        acc += t;
    }
    Ok(acc)
}

/// Evaluates `p` at the self-linking form of `L`.
pub fn selflink_eval(l: &LinkingMatrix, p: &BoolPoly) -> Result<bool> {
    evaluate(p, &l.self_linking())
}

fn is_odd(x: &BigInt) -> bool {
    !(x % BigInt::from(2)).is_zero()
}

/// Outcome of one named check over many trials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// At most [`MAX_WITNESSES`] descriptions of failing inputs.
    pub witnesses: Vec<String>,
}

pub const MAX_WITNESSES: usize = 5;

impl CheckOutcome {
    pub fn new(name: &str) -> Self {
        CheckOutcome {
            name: name.to_string(),
            trials: 0,
            failures: 0,
            witnesses: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
    }

    pub fn absorb(&mut self, other: &CheckOutcome) {
        self.trials += other.trials;
        self.failures += other.failures;
        for w in &other.witnesses {
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(w.clone());
            }
        }
    }
}

pub const CHECK_TRIANGLE: &str = "triangle: mu(rho(T_c)) == sigma(T_c)";
pub const CHECK_MU_DIAGONAL: &str = "mu(l(u,u)) == bar(u)";
pub const CHECK_RIGHT_SQUARE: &str = "right square: eps_L(rho(T_c)) mod 2 == selflink_eval(L, sigma(T_c))";
pub const CHECK_LIFT: &str = "lift: mu(rho f) ^ mu(rho g) == sigma f ^ sigma g";

/// Per-check outcomes, in the fixed order triangle, μ-diagonal, right
/// square, lift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramReport {
    pub genus: u32,
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl DiagramReport {
    pub fn empty(genus: u32, seed: u64) -> Self {
        DiagramReport {
            genus,
            seed,
            checks: [CHECK_TRIANGLE, CHECK_MU_DIAGONAL, CHECK_RIGHT_SQUARE, CHECK_LIFT]
                .iter()
                .map(|n| CheckOutcome::new(n))
                .collect(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    /// Folds another report in; the totals do not depend on fold order.
    pub fn absorb(&mut self, other: &DiagramReport) {
        for (a, b) in self.checks.iter_mut().zip(&other.checks) {
            a.absorb(b);
        }
    }
}

fn describe_basis(b: &ZSubsurfaceBasis) -> String {
    let cls = |c: &ZHClass| format!("{:?}", c.coords());
    let parts: Vec<String> = b
        .pairs
        .iter()
        .map(|(x, y)| format!("({}, {})", cls(x), cls(y)))
        .collect();
    format!("[{}]", parts.join(", "))
}

fn random_zclass<R: Rng>(g: Genus, bound: i64, rng: &mut R) -> ZHClass {
    let coords = (0..g.rank()).map(|_| rng.gen_range(-bound..=bound)).collect();
    ZHClass::new(g, coords).expect("rank length")
}

fn sigma_of(basis: &ZSubsurfaceBasis) -> Result<BoolPoly> {
    sigma_separating(&SeparatingTwist::new(basis.reduce_mod2(), "")?)
}

/// The RNG for trial `t`: stream `t` of the ChaCha generator keyed by `seed`,
/// so trials are independent of scheduling.
pub fn trial_rng(seed: u64, t: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t);
    rng
}

/// Runs all four checks once, on trial `t`.
pub fn verify_trial(g: Genus, seed: u64, t: u64) -> Result<DiagramReport> {
    let mut rng = trial_rng(seed, t);
    let mut rep = DiagramReport::empty(g.get(), seed);
    let n = g.get() as usize;
    let all: Vec<usize> = (1..=n).collect();

    let basis = random_integral_basis(g, &all, 4, &mut rng);
    let rho = rho_separating(&basis)?;
    let sigma = sigma_of(&basis)?;
    let lhs = mu(&rho)?;
    rep.checks[0].record(lhs == sigma, || {
        format!(
            "trial {t}: basis {}: mu(rho) = {lhs}, sigma = {sigma}",
            describe_basis(&basis)
        )
    });

    let u = random_zclass(g, 3, &mut rng);
    let mu_uu = mu(&cm_generator(&u, &u)?)?;
    let bar_u = bar(&u.reduce_mod2());
    rep.checks[1].record(mu_uu == bar_u, || {
        format!("trial {t}: u = {:?}: mu = {mu_uu}, bar = {bar_u}", u.coords())
    });

    let l = LinkingMatrix::random(g, 3, &mut rng);
    let eps = epsilon(&l, &rho)?;
    let sl = selflink_eval(&l, &sigma)?;
    rep.checks[2].record(is_odd(&eps) == sl, || {
        format!(
            "trial {t}: basis {}, L = {:?}: eps = {eps}, selflink = {sl}",
            describe_basis(&basis),
            l.entries
        )
    });

    // split the handles into two disjoint random sets
    let mut left = Vec::new();
    let mut right = Vec::new();
    for &h in &all {
        if rng.gen_bool(0.5) {
            left.push(h);
        } else {
            right.push(h);
        }
    }
    let f = random_integral_basis(g, &left, 3, &mut rng);
    let h = random_integral_basis(g, &right, 3, &mut rng);
    let lifted = wedge(&mu(&rho_separating(&f)?)?, &mu(&rho_separating(&h)?)?)?;
    let direct = wedge(&sigma_of(&f)?, &sigma_of(&h)?)?;
    rep.checks[3].record(lifted == direct, || {
        format!(
            "trial {t}: f = {}, g = {}: lifted = {lifted}, direct = {direct}",
            describe_basis(&f),
            describe_basis(&h)
        )
    });
    Ok(rep)
}

/// Runs `trials` independent trials of the four diagram checks.
pub fn verify_diagrams(g: Genus, trials: usize, seed: u64) -> Result<DiagramReport> {
    let mut rep = DiagramReport::empty(g.get(), seed);
    for t in 0..trials as u64 {
        rep.absorb(&verify_trial(g, seed, t)?);
    }
    Ok(rep)
}

/// `μ(l(u, u)) = ū` for every mod-2 class, lifted with 0/1 coordinates.
pub fn exhaustive_mu_check(g: Genus) -> Result<CheckOutcome> {
    if g.rank() > 20 {
        return Err(Error::Argument(format!(
            "exhaustive check over 2^{} classes is out of range",
            g.rank()
        )));
    }
    let mut out = CheckOutcome::new(CHECK_MU_DIAGONAL);
    for mask in 0..1u64 << g.rank() {
        let c = HClass::from_mask(g, mask);
        let coords = (0..g.rank()).map(|k| (mask >> k & 1) as i64).collect();
        let u = ZHClass::new(g, coords)?;
        let got = mu(&cm_generator(&u, &u)?)?;
        let want = bar(&c);
        out.record(got == want, || format!("u = {c}: mu = {got}, bar = {want}"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: u32) -> Genus {
        Genus::new(n).unwrap()
    }

    fn sym(gg: Genus, p: usize, q: usize) -> CMPoly {
        CMPoly::symbol(gg, CMSymbol::new(gg, p, q).unwrap())
    }

    #[test]
    fn symbol_count_matches() {
        for n in 1..=6 {
            let gg = g(n);
            let n = n as usize;
            assert_eq!(symbol_count(gg), 2 * n * n + n);
        }
        assert!(CMSymbol::new(g(1), 1, 0).is_err());
        assert!(CMSymbol::new(g(1), 0, 2).is_err());
    }

    #[test]
    fn generator_examples() {
        let g2 = g(2);
        let (a1, a2, b1) = (ZHClass::a(g2, 1), ZHClass::a(g2, 2), ZHClass::b(g2, 1));
        let a1b1 = sym(g2, 0, 2);
        assert_eq!(
            cm_generator(&b1, &a1).unwrap(),
            a1b1.add(&CMPoly::one(g2)).unwrap()
        );
        let sum = a1.try_add(&a2).unwrap();
        assert_eq!(
            cm_generator(&sum, &b1).unwrap(),
            a1b1.add(&sym(g2, 1, 2)).unwrap()
        );
        let u = a1.try_add(&b1).unwrap();
        let want = sym(g2, 0, 0)
            .add(&sym(g2, 2, 2))
            .unwrap()
            .add(&a1b1.scale(&BigInt::from(2)))
            .unwrap()
            .add(&CMPoly::one(g2))
            .unwrap();
        assert_eq!(cm_generator(&u, &u).unwrap(), want);
        assert!(cm_generator(&a1, &ZHClass::a(g(3), 1)).is_err());
    }

    #[test]
    fn ring_arithmetic() {
        let g1 = g(1);
        let x = sym(g1, 0, 0).add(&sym(g1, 0, 1)).unwrap();
        assert_eq!(x.mul(&CMPoly::one(g1)).unwrap(), x);
        assert!(x.add(&x.neg()).unwrap().is_zero());
        let sq = sym(g1, 0, 0).mul(&sym(g1, 0, 0)).unwrap();
        assert_eq!(sq.render(), "l(a1,a1)^2");
        assert_eq!(sq.terms().len(), 1);
    }

    #[test]
    fn rho_genus_one() {
        let g1 = g(1);
        let r = rho_separating(&ZSubsurfaceBasis::standard(g1, &[1])).unwrap();
        assert_eq!(r.render(), "-l(a1,a1)*l(b1,b1) + l(a1,b1)^2 + l(a1,b1)");
        assert!(rho_separating(&ZSubsurfaceBasis::standard(g1, &[]))
            .unwrap()
            .is_zero());
        assert_eq!(mu(&r).unwrap().render(), "a1*b1");
        let l = LinkingMatrix::standard_model(g1);
        assert_eq!(epsilon(&l, &r).unwrap(), BigInt::zero());
        assert!(!selflink_eval(&l, &mu(&r).unwrap()).unwrap());
    }

    #[test]
    fn rho_second_sum_is_even() {
        let g3 = g(3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let b = random_integral_basis(g3, &[1, 2, 3], 5, &mut rng);
            let (_, second) = rho_sums(&b).unwrap();
            let doubled = second.scale(&BigInt::from(2));
            assert!(doubled.terms().values().all(|c| !is_odd(c)));
            assert!(mu(&doubled).unwrap().is_zero());
        }
    }

    #[test]
    fn mu_examples() {
        let g2 = g(2);
        assert!(mu(&sym(g2, 0, 3)).unwrap().is_zero());
        let t = cm_generator(&ZHClass::b(g2, 1), &ZHClass::a(g2, 1)).unwrap();
        assert_eq!(mu(&t).unwrap(), BoolPoly::one(g2));
    }

    #[test]
    fn linking_matrix_validation() {
        let g2 = g(2);
        let std = LinkingMatrix::standard_model(g2);
        std.validate().unwrap();
        let mut bad = std.entries().to_vec();
        bad[0][3] = 5;
        match LinkingMatrix::new(g2, bad) {
            Err(Error::Consistency { row, col, .. }) => assert_eq!((row, col), (0, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(LinkingMatrix::new(g2, vec![vec![0; 3]; 3]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            LinkingMatrix::random(g2, 4, &mut rng).validate().unwrap();
        }
    }

    #[test]
    fn quadratic_form_matches_selflink_exhaustively() {
        let g2 = g(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let l = LinkingMatrix::random(g2, 3, &mut rng);
            for mask in 0..16u64 {
                let coords = (0..4).map(|k| (mask >> k & 1) as i64).collect();
                let u = ZHClass::new(g2, coords).unwrap();
                let want = is_odd(&l.quadratic(&u).unwrap());
                assert_eq!(selflink_eval(&l, &bar(&u.reduce_mod2())).unwrap(), want);
            }
        }
    }

    #[test]
    fn off_diagonal_generators_break_the_right_square() {
        // ε(l(a1,b2)) = L[a1][b2] may be odd while μ(l(a1,b2)) = 0.
        let g2 = g(2);
        let mut e = LinkingMatrix::standard_model(g2).entries().to_vec();
        e[0][3] = 1;
        e[3][0] = 1;
        let l = LinkingMatrix::new(g2, e).unwrap();
        let x = sym(g2, 0, 3);
        assert!(is_odd(&epsilon(&l, &x).unwrap()));
        assert!(!selflink_eval(&l, &mu(&x).unwrap()).unwrap());
    }

    #[test]
    fn diagrams_small() {
        let rep = verify_diagrams(g(2), 40, 7).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.checks.iter().all(|c| c.trials == 40));
        assert!(exhaustive_mu_check(g(2)).unwrap().passed());
    }

    #[test]
    fn trials_are_reproducible() {
        let a = verify_trial(g(3), 9, 4).unwrap();
        let b = verify_trial(g(3), 9, 4).unwrap();
        assert_eq!(a, b);
    }
}
