mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use templike::dgcat::{dg_fixtures, Comparison, SSimplex};
use templike::doldkan::{counit, gamma, normalize, ChainComplex};
use templike::exactcore::{Ring, Scalar};
use templike::fixtures::linear_categories;
use templike::intervals::{alternating_sum, monotone_maps, Mor, Partition};
use templike::templicial::{check_underlying_nerve, linear_nerve, random_chain};
use templike::tensorfrob::{check_graded_frobenius, epsilon_phi, tensor_graded, GradedQuiver};

fn ring() -> impl Strategy<Value = Ring> {
    prop_oneof![Just(Ring::Q), Just(Ring::Z), Just(Ring::Fp(7))]
}

fn monotone(m: usize, n: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..=n, m + 1).prop_map(|mut v| {
        v.sort_unstable();
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalars_form_a_commutative_ring(r in ring(), a in -50i64..50, b in -50i64..50, c in -50i64..50) {
        let (a, b, c) = (r.from_i64(a), r.from_i64(b), r.from_i64(c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        if let Some(i) = a.inv() {
            prop_assert!((&a * &i).is_one());
        }
    }

    #[test]
    fn scalars_round_trip_through_text(r in ring(), a in -1000i64..1000) {
        let s = r.from_i64(a);
        prop_assert_eq!(Scalar::parse(&s.to_string(), r).unwrap(), s);
    }

    #[test]
    fn monotone_maps_compose_associatively(f in monotone(2, 3), g in monotone(3, 4), h in monotone(4, 2)) {
        let (f, g, h) = (Mor::new(f, 3).unwrap(), Mor::new(g, 4).unwrap(), Mor::new(h, 2).unwrap());
        prop_assert_eq!(h.compose(&g).compose(&f), h.compose(&g.compose(&f)));
    }

    #[test]
    fn monotone_maps_factor_through_normal_form(v in monotone(3, 4)) {
        let f = Mor::new(v, 4).unwrap();
        let (deltas, sigmas) = f.normal_form();
        prop_assert_eq!(Mor::from_normal_form(f.m(), &deltas, &sigmas), f.clone());
        let (e, m) = f.epi_mono();
        prop_assert!(e.is_surjective() && m.is_injective());
        prop_assert_eq!(m.compose(&e), f);
    }

    #[test]
    fn alternating_sums_vanish_off_the_diagonal(n in 1usize..=7, a in any::<u64>(), b in any::<u64>()) {
        let interior = (1u64 << n) - 2;
        let (k_cuts, i_cuts) = ((a | b) & interior, a & b & interior);
        let part = |mask: u64| Partition::of(n, &(0..=n).filter(|&m| m == 0 || m == n || mask & (1 << m) != 0).collect::<Vec<_>>());
        let got = alternating_sum(&part(i_cuts), &part(k_cuts));
        prop_assert_eq!(got, common::brute_alternating_sum(n, i_cuts, k_cuts));
        prop_assert_eq!(got == 0, i_cuts != k_cuts);
    }

    #[test]
    fn dold_kan_round_trip(seed in any::<u64>(), r in prop_oneof![Just(Ring::Q), Just(Ring::Fp(5))]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = ChainComplex::random(r, 3, 2, &mut rng);
        prop_assert!(c.check().is_ok());
        let ranks: Vec<usize> = (0..=c.dim()).map(|n| c.rank(n)).collect();
        let g = gamma(&c).unwrap();
        for l in -1..=g.module.top {
            prop_assert_eq!(g.module.rank(l), common::gamma_rank(&ranks, l));
        }
        prop_assert!(g.module.check().is_ok());
        let n = normalize(&g.module).unwrap();
        prop_assert!(counit(&g, &n).is_iso(&n.complex, &c).unwrap());
    }

    #[test]
    fn underlying_nerve_matches_chains(seed in any::<u64>(), n in 0usize..=4, which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, c) = linear_categories(Ring::Q).swap_remove(which);
        let x = linear_nerve(&c, 4);
        let (vs, fs) = random_chain(&c, n, 4, &mut rng);
        prop_assert!(check_underlying_nerve(&c, &x, &vs, &fs).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn tensor_construction_is_frobenius(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = GradedQuiver::random(Ring::Q, 2, 3, 2, &mut rng);
        let t = tensor_graded(&v);
        let levels: Vec<Vec<(usize, usize)>> = v.levels.iter().map(|l| l.iter().map(|g| (g.src, g.tgt)).collect()).collect();
        let counts: Vec<usize> = (0..=3).map(|n| t.naf.host.count(n)).collect();
        prop_assert_eq!(counts, common::tensor_counts(v.base.len(), &levels, 3));
        prop_assert!(check_graded_frobenius(&t.naf).is_ok());
        prop_assert!(epsilon_phi(&t.naf, false).unwrap().check(&t.naf).is_ok());
    }

    #[test]
    fn dg_nerve_agrees_with_templicial_side(seed in any::<u64>(), n in 0usize..=3, which in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, c) = dg_fixtures(Ring::Q, 2).swap_remove(which);
        let cmp = Comparison::new(&c).unwrap();
        let s = SSimplex::random(&cmp.sharp.monoid, n, 3, &mut rng);
        prop_assert!(cmp.check_simplex(&s).unwrap().is_ok());
    }
}

#[test]
fn interval_maps_are_closed_under_composition() {
    for f in monotone_maps(2, 3) {
        for g in monotone_maps(3, 3) {
            if f.is_interval() && g.is_interval() {
                assert!(g.compose(&f).is_interval(), "{f} then {g}");
            }
        }
    }
}
