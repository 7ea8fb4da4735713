use gencomb::bounds::{
    dependency_degree, field_size_necessary, field_size_sufficient, lifted_mrd_lower_bound, local_lemma_lower_bound,
    middle_nodes_upper_exact, middle_nodes_upper_relaxed, pairwise_upper_bound, BoundConfig, BoundReport, Shape,
};
use gencomb::ffield::FieldSpec;
use gencomb::grassmann::max_covering_code_bruteforce;
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn cfg() -> BoundConfig {
    BoundConfig::default()
}

fn value(r: &BoundReport) -> f64 {
    r.value.to_f64().unwrap_or_else(|| panic!("{} has no value: {:?}", r.name, r.value))
}

/// Every nontrivial, solvable shape with small parameters.
fn shapes() -> Vec<Shape> {
    let mut out = Vec::new();
    for alpha in 2..=4 {
        for ell in 1..=3 {
            for eps in 0..=3 {
                for h in ell + eps + 1..=alpha * ell + eps {
                    out.push(Shape::new(h, ell, eps, alpha));
                }
            }
        }
    }
    out
}

#[test]
fn pairwise_bound_is_below_its_relaxation() {
    let mut checked = 0;
    for s in shapes().into_iter().filter(|s| s.alpha == 2) {
        for q in [2, 3, 4, 5] {
            for t in 1..=3 {
                let r = pairwise_upper_bound(&s, q, t, &cfg());
                if !r.valid {
                    continue;
                }
                let relaxed = r.extra_value("relaxed").and_then(|v| v.to_f64()).unwrap();
                assert!(value(&r) <= relaxed * (1.0 + 1e-9), "{s:?} q={q} t={t}: {} > {relaxed}", value(&r));
                checked += 1;
            }
        }
    }
    assert!(checked > 50);
}

#[test]
fn relaxed_upper_bound_dominates_exact_without_direct_links_or_over_larger_fields() {
    let mut checked = 0;
    for s in shapes() {
        for q in [2, 3, 4, 5, 7] {
            if s.epsilon > 0 && q == 2 {
                continue;
            }
            for t in 1..=2 {
                let exact = middle_nodes_upper_exact(&s, q, t);
                let relaxed = middle_nodes_upper_relaxed(&s, q, t, &cfg());
                if !exact.valid || !relaxed.valid {
                    continue;
                }
                let e = exact.value.as_integer().unwrap().to_f64().unwrap();
                assert!(e <= value(&relaxed) * (1.0 + 1e-12), "{s:?} q={q} t={t}: {e} > {}", value(&relaxed));
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn relaxed_upper_bound_can_undercut_exact_over_gf2() {
    let s = Shape::new(6, 2, 2, 3);
    let exact = middle_nodes_upper_exact(&s, 2, 1);
    let relaxed = middle_nodes_upper_relaxed(&s, 2, 1, &cfg());
    assert!(exact.valid && relaxed.valid);
    assert_eq!(exact.value.as_integer().unwrap().to_i64(), Some(456));
    assert!((value(&relaxed) - 446.44).abs() < 0.01, "{}", value(&relaxed));
}

#[test]
fn necessary_field_size_never_exceeds_sufficient() {
    let mut checked = 0;
    for s in shapes() {
        for log_r in [10, 16, 24, 32] {
            let r = 1u64 << log_r;
            for t in 1..=6 {
                let nec = field_size_necessary(&s, r, t, &cfg());
                let suf = field_size_sufficient(&s, r, t, &cfg());
                let (Some(n), Some(f)) = (nec.value.to_f64(), suf.value.to_f64()) else {
                    continue;
                };
                if !nec.valid || !suf.valid {
                    continue;
                }
                assert!(n <= f * (1.0 + 1e-9), "{s:?} r=2^{log_r} t={t}: {n} > {f}");
                checked += 1;
            }
        }
    }
    assert!(checked > 500);
}

#[test]
fn sufficient_field_size_per_symbol_approaches_one() {
    for s in shapes().into_iter().filter(|s| s.epsilon >= 1) {
        let per_symbol = |t: u64| value(&field_size_sufficient(&s, 1 << 20, t, &cfg())).powf(1.0 / t as f64);
        let mut prev = per_symbol(8);
        for t in [16, 32, 64, 128] {
            let cur = per_symbol(t);
            assert!(cur <= prev * (1.0 + 1e-12), "{s:?} t={t}: {cur} > {prev}");
            prev = cur;
        }
        assert!(prev < 1.5, "{s:?}: {prev}");
    }
}

#[test]
fn local_lemma_bound_grows_with_field_size() {
    for s in shapes() {
        for t in 1..=3 {
            if s.local_lemma_exponent(t) <= 0 {
                continue;
            }
            let bounds: Vec<f64> = [2, 3, 4, 5, 7, 8, 9]
                .iter()
                .map(|&q| value(&local_lemma_lower_bound(&s, q, t, &cfg())))
                .collect();
            assert!(bounds.windows(2).all(|w| w[0] < w[1]), "{s:?} t={t}: {bounds:?}");
        }
    }
}

#[test]
fn exhaustive_maximum_lies_between_the_bounds() {
    // (h, ℓ, ε, α, q) at t = 1
    let cases = [(3, 1, 1, 2, 2), (3, 1, 1, 2, 3), (3, 1, 1, 3, 2), (3, 1, 0, 3, 2), (2, 1, 0, 2, 3), (4, 1, 2, 2, 2)];
    let mut sandwiched = 0;
    for (h, ell, eps, alpha, q) in cases {
        let s = Shape::new(h, ell, eps, alpha);
        let field = FieldSpec::from_order(q).unwrap();
        let n = h as usize;
        let k = ell as usize;
        let delta = (h - ell - eps) as usize;
        let best = max_covering_code_bruteforce(n, k, delta, alpha as usize, &field, 5_000_000).unwrap();
        assert!(best.exact, "{s:?} q={q}");
        let size = best.size as f64;
        let lower = lifted_mrd_lower_bound(&s, q, 1);
        if lower.valid {
            assert!(value(&lower).floor() <= size, "{s:?} q={q}: lifted {} > {size}", value(&lower));
        }
        let ll = local_lemma_lower_bound(&s, q, 1, &cfg());
        if ll.valid {
            assert!(value(&ll).floor() <= size, "{s:?} q={q}: local lemma {} > {size}", value(&ll));
        }
        let upper = middle_nodes_upper_exact(&s, q, 1);
        if upper.valid {
            assert!(size <= value(&upper), "{s:?} q={q}: {size} > {}", value(&upper));
            sandwiched += 1;
        }
    }
    assert!(sandwiched >= 3);
}

proptest! {
    #[test]
    fn dependency_exact_is_within_bound(r in 2u64..200, alpha in 2u64..6) {
        prop_assume!(alpha <= r);
        let d = dependency_degree(r, alpha);
        prop_assert!(d.exact <= d.bound);
    }

    #[test]
    fn lifted_mrd_bound_over_gf2_is_a_power_of_two(h in 2u64..7, ell in 1u64..4, eps in 0u64..3, t in 1u64..3) {
        let s = Shape::new(h, ell, eps, 2);
        let r = lifted_mrd_lower_bound(&s, 2, t);
        prop_assume!(r.valid && h > ell + eps);
        // (α-1) q^g with α = 2 is a power of two
        let v = r.value.as_integer().unwrap().clone();
        prop_assert!(v > 0.into());
        prop_assert_eq!(v.clone() & (v - 1), 0.into());
    }
}
