use flagtc::f2poly::complete_symmetric;
use flagtc::search::{exhaustive_search, SearchOptions};
use flagtc::surface::{embed_rp2, projective_plane};
use flagtc::{
    BitVector, FlagRing, GradedAlgebra, Monomial, RawPoly, Space, SurfaceRing, TensorElement, TensorRing, ZdSpec,
};
use proptest::prelude::*;
use proptest::sample::Index;

const NO_CEILING: u64 = u64::MAX;

fn bits(len: usize, pattern: &[bool]) -> BitVector {
    BitVector::from_indices(len, pattern.iter().take(len).enumerate().filter(|(_, &b)| b).map(|(i, _)| i))
}

fn small_ring() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![(1usize..=1, 1usize..=4), (2usize..=2, 1usize..=3), (3usize..=3, 1usize..=2)]
}

fn raw_poly(k: usize, max_exp: u32) -> impl Strategy<Value = RawPoly> {
    prop::collection::vec(prop::collection::vec(0..=max_exp, k), 0..6)
        .prop_map(move |ms| RawPoly::from_monomials(k, ms.into_iter().map(Monomial::new)).unwrap())
}

fn tensor_element(t: &TensorRing, picks: &[Vec<Index>]) -> TensorElement {
    let n = t.base().basis_len();
    let tuples: Vec<Vec<usize>> = picks.iter().map(|p| p.iter().map(|i| i.index(n)).collect()).collect();
    let mut acc = t.zero();
    for tuple in &tuples {
        acc = acc.add(&t.from_tuples([tuple.as_slice()]).unwrap()).unwrap();
    }
    acc
}

fn picks(s: usize) -> impl Strategy<Value = Vec<Vec<Index>>> {
    prop::collection::vec(prop::collection::vec(any::<Index>(), s), 0..5)
}

/// Spreads `degree` units over the zero-divisors `z[i,j]`, `2 <= i <= s`.
fn spread(s: usize, k: usize, slots: &[Index]) -> ZdSpec {
    let pairs: Vec<(usize, usize)> = (2..=s).flat_map(|i| (1..=k).map(move |j| (i, j))).collect();
    let mut exps = vec![0u32; pairs.len()];
    for slot in slots {
        exps[slot.index(pairs.len())] += 1;
    }
    let mut spec = ZdSpec::new();
    for (&(i, j), &n) in pairs.iter().zip(&exps) {
        if n > 0 {
            spec.push(i, j, n).unwrap();
        }
    }
    spec
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms((k, m) in small_ring(), a in prop::collection::vec(any::<bool>(), 120),
                   b in prop::collection::vec(any::<bool>(), 120), c in prop::collection::vec(any::<bool>(), 120)) {
        let ring = FlagRing::new(k, m).unwrap();
        let n = ring.basis_len();
        let (a, b, c) = (bits(n, &a), bits(n, &b), bits(n, &c));
        prop_assert_eq!(ring.mul(&a, &b), ring.mul(&b, &a));
        prop_assert_eq!(ring.mul(&ring.mul(&a, &b), &c), ring.mul(&a, &ring.mul(&b, &c)));
        let mut bc = b.clone();
        bc.xor_assign(&c);
        let mut sum = ring.mul(&a, &b);
        sum.xor_assign(&ring.mul(&a, &c));
        prop_assert_eq!(ring.mul(&a, &bc), sum);
        prop_assert_eq!(ring.mul(&a, &ring.one()), a.clone());
        let mut ab = a.clone();
        ab.xor_assign(&b);
        let mut squares = ring.mul(&a, &a);
        squares.xor_assign(&ring.mul(&b, &b));
        prop_assert_eq!(ring.mul(&ab, &ab), squares);
    }

    #[test]
    fn normal_form_ignores_relation_multiples((k, m) in small_ring(), p in raw_poly(3, 9),
                                               q in prop::collection::vec(0u32..4, 3), i in any::<Index>()) {
        let ring = FlagRing::new(k, m).unwrap();
        let p = RawPoly::from_monomials(k, p.terms().map(|t| Monomial::new(t.exponents()[..k].to_vec()))).unwrap();
        let i = i.index(k) + 1;
        let vars: Vec<usize> = (0..=k - i).collect();
        let relation = complete_symmetric((m + i) as u32, &vars, k);
        let shifted = relation.mul(&RawPoly::from_monomial(Monomial::new(q[..k].to_vec()))).unwrap();
        let lhs = ring.normal_form(&p.add(&shifted).unwrap()).unwrap();
        prop_assert_eq!(lhs, ring.normal_form(&p).unwrap());
    }

    #[test]
    fn normal_form_commutes_with_permutations((k, m) in small_ring(), p in raw_poly(3, 9), perm in Just(vec![0usize, 1, 2]).prop_shuffle()) {
        let ring = FlagRing::new(k, m).unwrap();
        let p = RawPoly::from_monomials(k, p.terms().map(|t| Monomial::new(t.exponents()[..k].to_vec()))).unwrap();
        let perm: Vec<usize> = perm.into_iter().filter(|&v| v < k).collect();
        let direct = ring.normal_form(&p.permute(&perm)).unwrap();
        let via_nf = ring.normal_form(&ring.normal_form(&p).unwrap().to_raw().permute(&perm)).unwrap();
        prop_assert_eq!(direct, via_nf);
    }

    #[test]
    fn top_projection_matches_normal_form((k, m) in small_ring(), p in raw_poly(3, 9)) {
        let ring = FlagRing::new(k, m).unwrap();
        let p = RawPoly::from_monomials(k, p.terms().map(|t| Monomial::new(t.exponents()[..k].to_vec()))).unwrap();
        let top = ring.top_monomial().clone();
        let dim = ring.dimension();
        let homogeneous = RawPoly::from_monomials(k, p.terms().filter(|t| t.degree() == dim).cloned()).unwrap();
        let via_top = ring.top_projection_rewrite(&p).unwrap().contains(&top);
        prop_assert_eq!(via_top, ring.normal_form(&homogeneous).unwrap().contains(&top));
    }

    #[test]
    fn tensor_product_is_bilinear_and_associative((k, m) in small_ring(), s in 2usize..=3,
                                                   a in picks(3), b in picks(3), c in picks(3)) {
        let t = TensorRing::new(FlagRing::new(k, m).unwrap(), s).unwrap();
        let trim = |p: &Vec<Vec<Index>>| p.iter().map(|v| v[..s].to_vec()).collect::<Vec<_>>();
        let (a, b, c) = (tensor_element(&t, &trim(&a)), tensor_element(&t, &trim(&b)), tensor_element(&t, &trim(&c)));
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        let left = a.mul(&b.add(&c).unwrap()).unwrap();
        prop_assert_eq!(left, a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&t.one()).unwrap(), a.clone());
    }

    #[test]
    fn lift_is_multiplicative((k, m) in small_ring(), factor in 1usize..=3,
                              a in prop::collection::vec(any::<bool>(), 120), b in prop::collection::vec(any::<bool>(), 120)) {
        let ring = FlagRing::new(k, m).unwrap();
        let t = TensorRing::new(ring.clone(), 3).unwrap();
        let n = ring.basis_len();
        let (a, b) = (bits(n, &a), bits(n, &b));
        let lhs = t.lift(factor, &a).unwrap().mul(&t.lift(factor, &b).unwrap()).unwrap();
        prop_assert_eq!(lhs, t.lift(factor, &ring.mul(&a, &b)).unwrap());
    }

    #[test]
    fn zero_divisor_products_die_on_the_diagonal((k, m) in small_ring(), s in 2usize..=3,
                                                  slots in prop::collection::vec(any::<Index>(), 1..8)) {
        let t = TensorRing::new(FlagRing::new(k, m).unwrap(), s).unwrap();
        let spec = spread(s, k, &slots);
        prop_assert!(t.evaluate(&spec, NO_CEILING).unwrap().diagonal().is_zero());
    }

    #[test]
    fn factor_by_factor_matches_repeated_multiplication((k, m) in small_ring(), s in 2usize..=3,
                                                        slots in prop::collection::vec(any::<Index>(), 0..10)) {
        let t = TensorRing::new(FlagRing::new(k, m).unwrap(), s).unwrap();
        let spec = spread(s, k, &slots);
        prop_assert_eq!(t.evaluate(&spec, NO_CEILING).unwrap(), t.evaluate_by_multiplication(&spec).unwrap());
    }

    #[test]
    fn top_coefficient_matches_full_expansion((k, m) in small_ring(), s in 2usize..=3, seed in prop::collection::vec(any::<Index>(), 40)) {
        let t = TensorRing::new(FlagRing::new(k, m).unwrap(), s).unwrap();
        let spec = spread(s, k, &seed[..t.top_degree() as usize]);
        let fast = t.top_coefficient(&spec).unwrap();
        let slow = t.evaluate(&spec, NO_CEILING).unwrap().coefficient_of(&t.top_tuple()).unwrap();
        prop_assert_eq!(fast, slow);
        prop_assert_eq!(t.is_nonzero(&spec).unwrap(), fast);
    }

    #[test]
    fn padding_twice_is_padding_by_two_factors((k, m) in prop_oneof![Just((1usize, 2usize)), Just((2, 1)), Just((1, 3))],
                                                slots in prop::collection::vec(any::<Index>(), 0..8)) {
        let t = TensorRing::new(FlagRing::new(k, m).unwrap(), 2).unwrap();
        let spec = spread(2, k, &slots);
        let a = t.evaluate(&spec, NO_CEILING).unwrap();
        prop_assume!(!a.is_zero());
        let once = t.pad_with_top_factor(&a).unwrap();
        prop_assert!(!once.is_zero());
        let twice = t.extended().pad_with_top_factor(&once).unwrap();
        let full = spec.product(&t.padding_spec()).product(&t.extended().padding_spec());
        prop_assert_eq!(twice, t.extended().extended().evaluate(&full, NO_CEILING).unwrap());
    }

    #[test]
    fn search_strategies_agree((k, m) in prop_oneof![Just((1usize, 2usize)), Just((1, 3)), Just((2, 1)), Just((2, 2))],
                               s in 2usize..=3, prefix_slots in prop::collection::vec(any::<Index>(), 0..4),
                               extra in any::<Index>(), at_top in any::<bool>()) {
        let t = TensorRing::new(FlagRing::new(k, m).unwrap(), s).unwrap();
        let prefix = if s == 2 { ZdSpec::new() } else { spread(s - 1, k, &prefix_slots) };
        let free: Vec<(usize, usize)> = (1..=k).map(|j| (s, j)).collect();
        let top = t.top_degree() as u64;
        prop_assume!(prefix.degree() <= top);
        let target = if at_top { top } else { prefix.degree() + extra.index((top - prefix.degree()) as usize + 1) as u64 };
        let run = |prune, split_top| {
            let o = SearchOptions { prune, split_top, ..SearchOptions::default() };
            exhaustive_search(&t, &prefix, &free, target, &o).unwrap().solutions
        };
        let reference = run(false, false);
        prop_assert_eq!(run(true, false), reference.clone());
        prop_assert_eq!(run(true, true), reference.clone());
        prop_assert_eq!(run(false, true), reference);
    }

    #[test]
    fn embedding_is_a_homomorphism(n in 1usize..=5, s in 2usize..=4, a in picks(4), b in picks(4)) {
        let target = SurfaceRing::new(n).unwrap();
        let t = TensorRing::new(projective_plane(), s).unwrap();
        let trim = |p: &Vec<Vec<Index>>| p.iter().map(|v| v[..s].to_vec()).collect::<Vec<_>>();
        let (a, b) = (tensor_element(&t, &trim(&a)), tensor_element(&t, &trim(&b)));
        let product = embed_rp2(&a.mul(&b).unwrap(), &target).unwrap();
        prop_assert_eq!(product, embed_rp2(&a, &target).unwrap().mul(&embed_rp2(&b, &target).unwrap()).unwrap());
        prop_assert_eq!(embed_rp2(&a, &target).unwrap().is_zero(), a.is_zero());
    }

    #[test]
    fn spec_text_round_trips(factors in prop::collection::vec((2usize..6, 1usize..5, 1u32..20), 0..8), surface in any::<bool>()) {
        let mut spec = ZdSpec::new();
        for (i, j, n) in factors {
            spec.push(i, j, n).unwrap();
        }
        let symbol = if surface { 'c' } else { 'z' };
        prop_assert_eq!(ZdSpec::parse(&spec.to_text(symbol)).unwrap(), spec.clone());
        prop_assert_eq!(ZdSpec::parse(&spec.to_string()).unwrap(), spec);
    }

    #[test]
    fn polynomial_text_round_trips(p in raw_poly(3, 6)) {
        prop_assert_eq!(RawPoly::parse(&p.to_string(), 3).unwrap(), p);
    }

    #[test]
    fn space_text_round_trips(k in 1usize..6, m in 1usize..9, n in 1usize..9) {
        for space in [Space::flag(k, m), Space::Surface { n }] {
            prop_assert_eq!(Space::parse(&space.to_string()).unwrap(), space);
        }
    }
}

#[test]
fn embedding_is_injective_on_the_basis() {
    for n in 1..=5 {
        let target = SurfaceRing::new(n).unwrap();
        for s in 2..=4usize {
            let t = TensorRing::new(projective_plane(), s).unwrap();
            let mut images = std::collections::BTreeSet::new();
            let mut count = 0;
            for code in 0..3usize.pow(s as u32) {
                let tuple: Vec<usize> = (0..s).map(|f| code / 3usize.pow(f as u32) % 3).collect();
                let image = embed_rp2(&t.from_tuples([tuple.as_slice()]).unwrap(), &target).unwrap();
                let tuples = image.tuples();
                assert_eq!(tuples.len(), 1, "N({n}) {tuple:?}");
                images.insert(tuples[0].clone());
                count += 1;
            }
            assert_eq!(images.len(), count, "N({n}), s = {s}");
        }
    }
}
