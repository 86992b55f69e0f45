mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use sgdim::arrangement::{parse_arrangement, parse_matrix, write_arrangement, write_matrix, Subspace};
use sgdim::dependency::{build_triple_family, is_dependent_triple, parse_system, write_system, DepSet, TripleSystem};
use sgdim::linalg::{Matrix, Tolerance};
use sgdim::rational::{format_rational, parse_rational};
use sgdim::Rational;

fn dep_set(n: usize) -> impl Strategy<Value = DepSet> {
    prop_oneof![
        proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 2).prop_shuffle().prop_map(|v| DepSet::Pair([v[0], v[1]])),
        proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 3)
            .prop_shuffle()
            .prop_map(|v| DepSet::Triple([v[0], v[1], v[2]])),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rational_text_round_trip(num in 0u64..1_000_000, den in 1u64..1_000_000) {
        let r = Rational::new(num, den);
        prop_assert_eq!(parse_rational(&format_rational(&r)), Some(r));
    }

    #[test]
    fn matrix_block_round_trip(rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
        let m = common::gaussian(&mut common::rng(seed), rows, cols).scale(1e-3f64.powi((seed % 7) as i32 - 3));
        let back: Matrix<f64> = parse_matrix(&write_matrix(&m)).unwrap();
        prop_assert_eq!(back.shape(), m.shape());
        // 17 significant digits reproduce every f64 exactly
        prop_assert_eq!(back.as_slice(), m.as_slice());
    }

    #[test]
    fn arrangement_round_trip(n in 1usize..8, kmax in 1usize..3, ell in 3usize..8, seed in any::<u64>()) {
        let tol = Tolerance::default();
        let arr = common::random_arrangement(&mut common::rng(seed), n, kmax.min(ell), ell);
        let back = parse_arrangement::<f64>(&write_arrangement(&arr)).unwrap().into_real(&tol).unwrap();
        prop_assert_eq!(back.ambient(), arr.ambient());
        prop_assert_eq!(back.spaces().len(), arr.spaces().len());
        for (a, b) in arr.spaces().iter().zip(back.spaces()) {
            prop_assert_eq!(a.basis().as_slice(), b.basis().as_slice());
        }
    }

    #[test]
    fn system_round_trip(
        (n, sets) in (3usize..12).prop_flat_map(|n| (Just(n), proptest::collection::vec(dep_set(n), 0..20))),
        alpha in 1u64..50,
        num in 0u64..100,
        den in 1u64..100,
    ) {
        let sys = TripleSystem::new(n, sets, alpha, Rational::new(num, den)).unwrap();
        prop_assert_eq!(parse_system(&write_system(&sys)).unwrap(), sys);
    }

    #[test]
    fn triple_family_counts(r in 3usize..40) {
        let fam = build_triple_family(r).unwrap();
        prop_assert_eq!(fam.len(), r * (r - 1));
        let mut deg = vec![0usize; r];
        let mut pairs: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in &fam {
            prop_assert_eq!(t.iter().collect::<BTreeSet<_>>().len(), 3);
            for (p, &a) in t.iter().enumerate() {
                deg[a] += 1;
                for &b in &t[p + 1..] {
                    *pairs.entry((a.min(b), a.max(b))).or_default() += 1;
                }
            }
        }
        prop_assert!(deg.iter().all(|&d| d == 3 * (r - 1)));
        prop_assert!(pairs.values().all(|&c| c <= 6));
    }

    #[test]
    fn dependence_ignores_order(k in 1usize..3, planted in any::<bool>(), seed in any::<u64>()) {
        let tol = Tolerance::default();
        let mut rng = common::rng(seed);
        let ell = 3 * k + 2;
        let v1 = Subspace::span(&common::gaussian(&mut rng, k, ell), &tol);
        let v2 = Subspace::span(&common::gaussian(&mut rng, k, ell), &tol);
        let v3 = if planted {
            // a k-dim subspace of v1 + v2 meeting neither
            let mix = common::gaussian(&mut rng, k, k);
            Subspace::span(&v1.basis().add(&mix.matmul(v2.basis())), &tol)
        } else {
            Subspace::span(&common::gaussian(&mut rng, k, ell), &tol)
        };
        let spaces = [&v1, &v2, &v3];
        let base = is_dependent_triple(&v1, &v2, &v3, &tol);
        prop_assert_eq!(base, planted);
        for [a, b, c] in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            prop_assert_eq!(is_dependent_triple(spaces[a], spaces[b], spaces[c], &tol), base);
        }
    }
}
