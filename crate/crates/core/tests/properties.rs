use bcj_core::boolring::{B2Basis, BoolPoly, Monomial};
use bcj_core::cassonmorita::{
    cm_generator, epsilon, mu, rho_sums, symbol_count, CMPoly, CMSymbol, LinkingMatrix,
};
use bcj_core::gf2::{BitVec, SpanBasis};
use bcj_core::surface::{random_integral_basis, Genus, ZHClass};
use bcj_core::wedgespan::{
    image_rank_report, orbit_classes, permute_wedge, simple_map_permutations, slot_pair, wedge,
    Disjointness, SearchConfig, WedgeElem,
};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn g(n: u32) -> Genus {
    Genus::new(n).unwrap()
}

fn bitvec(len: usize) -> impl Strategy<Value = BitVec> {
    proptest::collection::vec(any::<bool>(), len).prop_map(|b| BitVec::from_bools(&b))
}

fn b2_poly(n: u32) -> impl Strategy<Value = BoolPoly> {
    let basis = B2Basis::new(g(n));
    proptest::collection::vec(any::<bool>(), basis.len()).prop_map(move |pick| {
        let monos: Vec<Monomial> = basis
            .monomials()
            .iter()
            .zip(pick)
            .filter_map(|(m, on)| on.then_some(*m))
            .collect();
        BoolPoly::from_monomials(g(n), monos).unwrap()
    })
}

fn zclass(n: u32) -> impl Strategy<Value = ZHClass> {
    proptest::collection::vec(-6i64..=6, 2 * n as usize).prop_map(move |c| ZHClass::new(g(n), c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn span_is_independent_of_insertion_order(
        rows in proptest::collection::vec(bitvec(70), 0..10),
        rot in 0usize..10,
    ) {
        let mut a = SpanBasis::new(70);
        for r in &rows {
            a.insert(r).unwrap();
        }
        let mut b = SpanBasis::new(70);
        let k = if rows.is_empty() { 0 } else { rot % rows.len() };
        for r in rows[k..].iter().chain(&rows[..k]).rev() {
            b.insert(r).unwrap();
        }
        prop_assert_eq!(&a, &b);
        for r in &rows {
            prop_assert!(a.contains(r).unwrap());
        }
    }

    #[test]
    fn wedge_is_bilinear_and_alternating(
        p in b2_poly(3), q in b2_poly(3), r in b2_poly(3),
    ) {
        let lhs = wedge(&p.add(&q).unwrap(), &r).unwrap();
        let rhs = wedge(&p, &r).unwrap().add(&wedge(&q, &r).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(wedge(&p, &p).unwrap().is_zero());
        prop_assert_eq!(wedge(&p, &q).unwrap(), wedge(&q, &p).unwrap());
    }

    #[test]
    fn cm_normal_form_is_confluent(u in zclass(3), v in zclass(3)) {
        let uv = cm_generator(&u, &v).unwrap();
        let vu = cm_generator(&v, &u).unwrap();
        let dot = CMPoly::constant(g(3), u.intersect(&v).unwrap());
        prop_assert_eq!(vu, uv.add(&dot).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn epsilon_is_a_ring_homomorphism(u in zclass(2), v in zclass(2), w in zclass(2), seed in any::<u64>()) {
        let l = LinkingMatrix::random(g(2), 4, &mut ChaCha8Rng::seed_from_u64(seed));
        let x = cm_generator(&u, &v).unwrap();
        let y = cm_generator(&v, &w).unwrap().add(&cm_generator(&w, &w).unwrap()).unwrap();
        let xy = x.mul(&y).unwrap();
        prop_assert_eq!(epsilon(&l, &xy).unwrap(), epsilon(&l, &x).unwrap() * epsilon(&l, &y).unwrap());
        prop_assert_eq!(
            epsilon(&l, &x.add(&y).unwrap()).unwrap(),
            epsilon(&l, &x).unwrap() + epsilon(&l, &y).unwrap()
        );
    }

    #[test]
    fn mu_kills_the_vanishing_products(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_integral_basis(g(3), &[1, 2, 3], 6, &mut rng);
        for (a, bb) in &b.pairs {
            let prod = cm_generator(a, bb).unwrap().mul(&cm_generator(bb, a).unwrap()).unwrap();
            prop_assert!(mu(&prod).unwrap().is_zero());
        }
        let (_, second) = rho_sums(&b).unwrap();
        prop_assert!(mu(&second.scale(&BigInt::from(2))).unwrap().is_zero());
    }
}

#[test]
fn epsilon_respects_relation_one_on_basis_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in 1..=3 {
        let gg = g(n);
        for _ in 0..10 {
            let l = LinkingMatrix::random(gg, 5, &mut rng);
            for p in 0..gg.rank() {
                for q in 0..gg.rank() {
                    let (u, v) = (ZHClass::basis(gg, p), ZHClass::basis(gg, q));
                    let lhs = epsilon(&l, &cm_generator(&v, &u).unwrap()).unwrap();
                    let rhs = epsilon(&l, &cm_generator(&u, &v).unwrap()).unwrap()
                        + u.intersect(&v).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

#[test]
fn mu_hits_every_b2_basis_monomial() {
    for n in 1..=4 {
        let gg = g(n);
        assert_eq!(symbol_count(gg), 2 * (n * n) as usize + n as usize);
        let diag = |k: usize| CMPoly::symbol(gg, CMSymbol::new(gg, k, k).unwrap());
        let mut images = Vec::new();
        images.push(mu(&CMPoly::one(gg)).unwrap());
        for k in 0..gg.rank() {
            images.push(mu(&diag(k)).unwrap());
            for l in k + 1..gg.rank() {
                images.push(mu(&diag(k).mul(&diag(l)).unwrap()).unwrap());
            }
        }
        let basis = B2Basis::new(gg);
        let mut span = SpanBasis::new(basis.len());
        for p in &images {
            span.insert(&basis.coords(p).unwrap()).unwrap();
        }
        assert_eq!(span.rank(), basis.len());
    }
}

#[test]
fn orbit_classes_are_invariant_under_generators() {
    for n in 2..=5 {
        let gg = g(n);
        let rep = orbit_classes(gg).unwrap();
        let d = B2Basis::new(gg).len();
        let basis = B2Basis::new(gg);
        for class in &rep.classes {
            for &s in &class.members {
                let (i, j) = slot_pair(d, s);
                let w = WedgeElem::basis(gg, basis.get(i), basis.get(j)).unwrap();
                for perm in simple_map_permutations(gg) {
                    let img = permute_wedge(&w, &perm);
                    let t = img.coords().leading().unwrap();
                    assert!(class.members.binary_search(&t).is_ok());
                }
            }
        }
    }
}

#[test]
fn span_rank_is_monotone() {
    for n in 3..=4 {
        let gg = g(n);
        let mut last = 0;
        for ms in 1..=3 {
            for fam in [false, true] {
                let r = image_rank_report(gg, SearchConfig::new(ms).families(fam)).unwrap();
                assert!(r.rank >= last);
                last = r.rank;
            }
        }
        let support = image_rank_report(gg, SearchConfig::new(3).disjointness(Disjointness::Support)).unwrap();
        let orth = image_rank_report(gg, SearchConfig::new(3)).unwrap();
        assert!(support.rank <= orth.rank);
    }
}

#[test]
fn asserted_families_lie_in_the_certified_span() {
    let gg = g(4);
    let with = image_rank_report(gg, SearchConfig::new(3).families(true)).unwrap();
    let without = image_rank_report(gg, SearchConfig::new(3)).unwrap();
    assert_eq!(with.rank, without.rank);
}
