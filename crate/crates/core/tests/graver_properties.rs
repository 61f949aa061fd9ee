use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use proptest::prelude::*;

use nfold_core::nfold::union_of_embeddings;
use nfold_core::{
    brute_force_graver, conformal_decompose, conformal_leq, embed, graver_basis,
    graver_complexity, kernel_lattice_basis, negative_part, nfold_graver_basis, nfold_matrix,
    positive_part, truncated_graver_basis, type_of, BlockVector, BoxBound, Error, GraverBasis,
    IntMatrix, IntVec,
};

fn matrix(rows: usize, cols: usize, lo: i64, hi: i64) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(lo..=hi, rows * cols).prop_map(move |e| {
        let rows: Vec<Vec<i64>> = e.chunks(cols).map(<[i64]>::to_vec).collect();
        IntMatrix::from_rows_i64(cols, &rows).unwrap()
    })
}

/// Matrices with at most four columns and entries in `[-3, 3]`.
fn small_matrix() -> impl Strategy<Value = IntMatrix> {
    (2usize..=4)
        .prop_flat_map(|cols| (1usize..cols, Just(cols)))
        .prop_flat_map(|(rows, cols)| matrix(rows, cols, -3, 3))
}

fn vec_of(len: usize) -> impl Strategy<Value = IntVec> {
    prop::collection::vec(-4i64..=4, len).prop_map(|v| IntVec::from_i64s(&v))
}

fn leq(u: &IntVec, v: &IntVec) -> bool {
    conformal_leq(u, v).unwrap()
}

fn check_basis_invariants(m: &IntMatrix, g: &GraverBasis) -> Result<(), TestCaseError> {
    let elems: BTreeSet<&IntVec> = g.iter().collect();
    for u in g.iter() {
        prop_assert!(!u.is_zero());
        prop_assert!(m.annihilates(u).unwrap());
        prop_assert!(elems.contains(&-u));
        for v in g.iter() {
            prop_assert!(u == v || !leq(u, v), "{} is below {}", u, v);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn positive_and_negative_parts(v in (1usize..6).prop_flat_map(vec_of)) {
        let (p, n) = (positive_part(&v), negative_part(&v));
        prop_assert_eq!(&(&p - &n), &v);
        prop_assert_eq!(p.dot(&n).unwrap(), BigInt::from(0));
    }

    #[test]
    fn conformal_order_is_a_partial_order(
        (u, v, w) in (1usize..5).prop_flat_map(|n| (vec_of(n), vec_of(n), vec_of(n)))
    ) {
        prop_assert!(leq(&u, &u));
        if leq(&u, &v) && leq(&v, &u) {
            prop_assert_eq!(&u, &v);
        }
        if leq(&u, &v) && leq(&v, &w) {
            prop_assert!(leq(&u, &w));
        }
        if leq(&u, &v) {
            prop_assert!(u.l1_norm() <= v.l1_norm());
        }
    }

    #[test]
    fn nfold_matrix_layout(
        (a, b, n) in (1usize..4).prop_flat_map(|q| (
            (0usize..3).prop_flat_map(move |r| matrix(r, q, -3, 3)),
            (0usize..3).prop_flat_map(move |s| matrix(s, q, -3, 3)),
            1usize..4,
        ))
    ) {
        let m = nfold_matrix(&a, &b, n).unwrap();
        let (q, r, s) = (a.cols(), a.rows(), b.rows());
        prop_assert_eq!(m.cols(), n * q);
        prop_assert_eq!(m.rows(), s + n * r);
        for k in 0..n {
            for i in 0..r {
                for col in 0..n * q {
                    let want = if col / q == k { a.get(i, col % q).clone() } else { BigInt::from(0) };
                    prop_assert_eq!(m.get(s + k * r + i, col), &want);
                }
            }
        }
        for i in 0..s {
            for col in 0..n * q {
                prop_assert_eq!(m.get(i, col), b.get(i, col % q));
            }
        }
    }

    #[test]
    fn completion_matches_box_enumeration(m in small_matrix()) {
        let g = graver_basis(&m);
        check_basis_invariants(&m, &g)?;
        let bound = g.max_abs_entry().to_u32().unwrap();
        prop_assume!(bound <= 10);
        let oracle = brute_force_graver(&m, BoxBound::new(bound.max(1))).unwrap();
        prop_assert_eq!(g.elements(), &oracle[..]);
    }

    #[test]
    fn truncation_keeps_the_bounded_elements(
        (m, bounds) in (2usize..=5)
            .prop_flat_map(|cols| (1usize..cols, Just(cols)))
            .prop_flat_map(|(rows, cols)| (
                matrix(rows, cols, -2, 2),
                prop::collection::vec(prop::option::of(0i64..=3), cols),
            ))
    ) {
        let bounds: Vec<Option<BigInt>> = bounds.into_iter().map(|b| b.map(BigInt::from)).collect();
        let full = graver_basis(&m);
        let expected: Vec<IntVec> = full
            .iter()
            .filter(|g| g.iter().zip(&bounds).all(|(e, u)| u.as_ref().is_none_or(|u| &e.abs() <= u)))
            .cloned()
            .collect();
        let truncated = truncated_graver_basis(&m, &bounds).unwrap();
        prop_assert_eq!(truncated.elements(), &expected[..]);
    }

    #[test]
    fn decompositions_are_conformal(
        (m, coeffs) in small_matrix().prop_flat_map(|m| {
            let dim = kernel_lattice_basis(&m).len();
            (Just(m), prop::collection::vec(-3i64..=3, dim))
        })
    ) {
        let basis = kernel_lattice_basis(&m);
        let mut v = IntVec::zeros(m.cols());
        for (b, k) in basis.iter().zip(&coeffs) {
            v = v.checked_add(&b.scaled(&BigInt::from(*k))).unwrap();
        }
        let g = graver_basis(&m);
        let parts = conformal_decompose(&v, &g).unwrap();
        let mut sum = IntVec::zeros(v.len());
        for p in &parts {
            prop_assert!(g.contains(p));
            prop_assert!(leq(p, &v));
            sum = sum.checked_add(p).unwrap();
        }
        prop_assert_eq!(sum, v);
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (1..=k).fold(1, |acc, i| acc * (n - k + i) / i)
}

/// Pairs with two columns: `A` one row, `B` one row, entries in `[-2, 2]`.
fn small_pair() -> impl Strategy<Value = (IntMatrix, IntMatrix)> {
    (matrix(1, 2, -2, 2), matrix(1, 2, -2, 2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stabilization_and_type_bounds((a, b) in small_pair()) {
        let g = match graver_complexity(&a, &b) {
            Ok(g) => g.value,
            Err(Error::Budget(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assume!(g <= 3);
        let q = a.cols();
        let base = graver_basis(&nfold_matrix(&a, &b, g).unwrap());
        for n in g + 1..=g + 3 {
            let m = nfold_matrix(&a, &b, n).unwrap();
            let direct = graver_basis(&m);
            let union = union_of_embeddings(&base, q, g, n).unwrap();
            prop_assert_eq!(&direct, &union, "n = {}", n);
            prop_assert_eq!(&nfold_graver_basis(&a, &b, n).unwrap(), &direct);
            prop_assert!(direct.len() <= binomial(n, g) * base.len());
            for v in direct.iter() {
                prop_assert!(type_of(&BlockVector::new(v.clone(), q).unwrap()) <= g);
            }
        }
    }

    #[test]
    fn embedding_keeps_graver_elements(
        ((a, b), seed) in (small_pair(), any::<u64>())
    ) {
        let g = match graver_complexity(&a, &b) {
            Ok(g) => g.value,
            Err(_) => return Ok(()),
        };
        prop_assume!(g <= 3);
        let q = a.cols();
        let n = g + 2;
        let small = nfold_matrix(&a, &b, g).unwrap();
        let big = nfold_matrix(&a, &b, n).unwrap();
        let target = graver_basis(&big);
        // a pseudo-random g-subset of 1..=n
        let mut indices: Vec<usize> = (1..=n).collect();
        let skip = [(seed % n as u64) as usize, ((seed / 7) % n as u64) as usize];
        indices.retain(|k| !skip.contains(&(k - 1)));
        indices.truncate(g);
        prop_assume!(indices.len() == g);
        for x in graver_basis(&small).iter() {
            let e = embed(&BlockVector::new(x.clone(), q).unwrap(), &indices, n).unwrap();
            prop_assert!(big.annihilates(&e).unwrap());
            prop_assert!(target.contains(&e));
        }
        // any kernel vector of the small matrix stays in the kernel
        for v in kernel_lattice_basis(&small) {
            let e = embed(&BlockVector::new(v, q).unwrap(), &indices, n).unwrap();
            prop_assert!(big.annihilates(&e).unwrap());
        }
    }
}

#[test]
fn oracle_agrees_on_a_basis_with_large_entries() {
    let m = IntMatrix::from_rows_i64(3, &[vec![1, 2, 3]]).unwrap();
    let g = graver_basis(&m);
    assert_eq!(g.max_abs_entry(), BigInt::from(3));
    assert_eq!(g.elements(), &brute_force_graver(&m, BoxBound::new(3)).unwrap()[..]);
    // a box one short of the largest entry loses exactly those elements
    let clipped = brute_force_graver(&m, BoxBound::new(2)).unwrap();
    let expected: Vec<IntVec> = g.iter().filter(|v| v.max_abs() <= BigInt::from(2)).cloned().collect();
    assert_eq!(clipped, expected);
}
