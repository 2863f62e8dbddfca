//! Randomized invariants over the algebra and the samplers.

use num::{BigRational, One, Zero};
use proptest::prelude::*;

use heckewalk::coxeter::{enumerate_group, GroupElement};
use heckewalk::hecke::HeckeElement;
use heckewalk::mallows::{inversions, mallows_pmf_exact, sample_mallows, MallowsSpec};
use heckewalk::rngstream::trial_rng;
use heckewalk::CoxeterFamily;

fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Length is invariant under inversion and bounded by the longest
    /// element; reduced words reproduce the element.
    #[test]
    fn length_and_reduced_word_invariants(seed in 0u64..5_000, type_b in any::<bool>()) {
        let fam = if type_b {
            CoxeterFamily::type_b(3)
        } else {
            CoxeterFamily::type_a(4)
        };
        let elems = enumerate_group(fam).unwrap();
        let w = &elems[(seed as usize) % elems.len()];
        prop_assert_eq!(w.length(), w.inverse().length());
        let word = w.reduced_word();
        prop_assert_eq!(word.len(), w.length());
        let mut rebuilt = GroupElement::identity(fam);
        for &s in word.iter().rev() {
            rebuilt = rebuilt.apply_generator_left(s).unwrap();
        }
        prop_assert_eq!(&rebuilt, w);
    }

    /// Products of stochastic elements stay stochastic (closure of the
    /// probability subset of the algebra).
    #[test]
    fn stochastic_closure(a_seed in 0u64..1_000, b_seed in 0u64..1_000, den in 2i64..6) {
        let fam = CoxeterFamily::type_a(3);
        let q = rational(1, den);
        let elems = enumerate_group(fam).unwrap();
        let mix = |seed: u64| {
            // convex combination of two basis elements
            let u = elems[(seed as usize) % elems.len()].clone();
            let v = elems[(seed as usize / 7) % elems.len()].clone();
            HeckeElement::basis(u, q.clone())
                .scale(&rational(1, 3))
                .add(&HeckeElement::basis(v, q.clone()).scale(&rational(2, 3)))
                .unwrap()
        };
        let (a, b) = (mix(a_seed), mix(b_seed));
        prop_assert!(a.is_stochastic());
        let product = a.mul(&b).unwrap();
        prop_assert!(product.is_stochastic());
        // and the involution preserves coefficient sums
        prop_assert!(product.involution().is_stochastic());
    }

    /// Sampled Mallows arrangements are permutations with pmf-positive
    /// inversion counts, and the exact pmf is a probability vector.
    #[test]
    fn mallows_sampler_invariants(n in 2usize..6, qnum in 0i64..5, seed in 0u64..10_000) {
        let q = qnum as f64 / 5.0;
        let spec = MallowsSpec::new(q, n).unwrap();
        let mut rng = trial_rng(seed, 0);
        let word = sample_mallows(&spec, &mut rng);
        let mut sorted = word.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        prop_assert!(inversions(&word) <= n * (n - 1) / 2);
        if qnum > 0 {
            let p = mallows_pmf_exact(&word, &rational(qnum, 5)).unwrap();
            prop_assert!(p > BigRational::zero());
            prop_assert!(p <= BigRational::one());
        }
    }
}
