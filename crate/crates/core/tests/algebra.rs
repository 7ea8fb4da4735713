use gencomb::ffield::FieldSpec;
use gencomb::linalg::{count_rank_matrices, gaussian_binomial, Matrix, Subspace};
use num_bigint::BigUint;
use proptest::prelude::*;

const ORDERS: [u64; 7] = [2, 3, 4, 5, 7, 8, 9];

fn field() -> impl Strategy<Value = FieldSpec> {
    prop::sample::select(ORDERS.to_vec()).prop_map(|q| FieldSpec::from_order(q).unwrap())
}

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Matrix> {
    (field(), 1..=max_rows, 1..=max_cols).prop_flat_map(|(f, r, c)| {
        prop::collection::vec(0..f.q(), r * c).prop_map(move |data| Matrix::from_flat(&f, r, c, data).unwrap())
    })
}

/// Two random subspaces of the same ambient space.
fn subspace_pair() -> impl Strategy<Value = (Subspace, Subspace)> {
    (field(), 1usize..7).prop_flat_map(|(f, n)| {
        let gens = move |rows: usize| {
            let f = f.clone();
            prop::collection::vec(0..f.q(), rows * n)
                .prop_map(move |d| Subspace::from_generators(&Matrix::from_flat(&f, rows, n, d).unwrap()))
        };
        (gens(n.min(4)), gens(2))
    })
}

proptest! {
    #[test]
    fn field_operations_are_consistent(f in field(), a in 0u32..9, b in 0u32..9, c in 0u32..9) {
        let (a, b, c) = (a % f.q(), b % f.q(), c % f.q());
        prop_assert_eq!(f.mul_raw(a, f.add_raw(b, c)), f.add_raw(f.mul_raw(a, b), f.mul_raw(a, c)));
        prop_assert_eq!(f.mul_raw(f.mul_raw(a, b), c), f.mul_raw(a, f.mul_raw(b, c)));
        prop_assert_eq!(f.add_raw(a, f.neg_raw(a)), 0);
        prop_assert_eq!(f.sub_raw(f.add_raw(a, b), b), a);
        match f.inv_raw(a) {
            Some(inv) => prop_assert_eq!(f.mul_raw(a, inv), 1),
            None => prop_assert_eq!(a, 0),
        }
        if a != 0 {
            prop_assert_eq!(f.pow_raw(a, u64::from(f.q()) - 1), 1);
        }
    }

    #[test]
    fn transpose_preserves_rank(m in matrix(5, 6)) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert!(m.rank() <= m.rows().min(m.cols()));
    }

    #[test]
    fn rref_is_idempotent_and_keeps_the_row_space(m in matrix(5, 6)) {
        let (red, pivots) = m.rref();
        prop_assert_eq!(pivots.len(), m.rank());
        prop_assert_eq!(red.rref().0, red.clone());
        prop_assert_eq!(red.row_space(), m.row_space());
    }

    #[test]
    fn product_rank_is_bounded(a in matrix(4, 4), seed in any::<u64>()) {
        let f = a.field().clone();
        let cols = 1 + (seed % 5) as usize;
        let data = (0..a.cols() * cols).map(|i| ((seed >> (i % 60)) as u32 + i as u32) % f.q()).collect();
        let b = Matrix::from_flat(&f, a.cols(), cols, data).unwrap();
        let ab = a.mul(&b).unwrap();
        prop_assert!(ab.rank() <= a.rank().min(b.rank()));
    }

    #[test]
    fn unique_solutions_round_trip(m in matrix(6, 4), x_seed in any::<u64>()) {
        let f = m.field().clone();
        let x: Vec<u32> = (0..m.cols()).map(|i| ((x_seed >> (8 * (i % 8))) as u32) % f.q()).collect();
        let y = m.mul_vec(&x).unwrap();
        match m.solve_unique(&y) {
            Ok(sol) => prop_assert_eq!(sol, x),
            Err(_) => prop_assert!(m.rank() < m.cols()),
        }
    }

    #[test]
    fn dual_is_an_involution((u, _) in subspace_pair()) {
        let d = u.dual();
        prop_assert_eq!(d.dim() + u.dim(), u.ambient());
        prop_assert_eq!(d.dual(), u.clone());
        let prod = u.basis().mul(&d.basis().transpose()).unwrap();
        prop_assert!(prod.is_zero());
    }

    #[test]
    fn intersection_matches_dual_of_sum_of_duals((u, v) in subspace_pair()) {
        // U ∩ V is the dual of U^⊥ + V^⊥
        let via_duals = u.ambient() - u.dual().sum(&v.dual()).unwrap().dim();
        prop_assert_eq!(u.intersection_dim(&v).unwrap(), via_duals);
        let s = u.sum(&v).unwrap();
        prop_assert!(s.contains(&u).unwrap() && s.contains(&v).unwrap());
    }

    #[test]
    fn gaussian_binomial_is_symmetric(n in 0u64..9, k in 0u64..9, q in prop::sample::select(ORDERS.to_vec())) {
        prop_assume!(k <= n);
        prop_assert_eq!(gaussian_binomial(n, k, q), gaussian_binomial(n, n - k, q));
        if k >= 1 {
            // Pascal-type recurrence
            let lhs = gaussian_binomial(n + 1, k, q);
            let rhs = gaussian_binomial(n, k - 1, q) + BigUint::from(q).pow(k as u32) * gaussian_binomial(n, k, q);
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn rank_counts_sum_to_all_matrices(m in 1u64..5, n in 1u64..5, q in prop::sample::select(ORDERS.to_vec())) {
        let total: BigUint = (0..=m.min(n)).map(|s| count_rank_matrices(m, n, s, q)).sum();
        prop_assert_eq!(total, BigUint::from(q).pow((m * n) as u32));
        prop_assert_eq!(count_rank_matrices(m, n, m.min(n) + 1, q), BigUint::from(0u32));
    }
}
