use icnoma::{BitMatrix, BitVector};
use proptest::prelude::*;

/// Rank by elimination on plain integers.
fn naive_rank(rows: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

fn matrix(n: usize, rows: &[u64]) -> BitMatrix {
    BitMatrix::from_rows(n, rows.iter().map(|&r| BitVector::from_u64(n, r)).collect()).unwrap()
}

fn rows_strategy() -> impl Strategy<Value = (usize, Vec<u64>)> {
    (1usize..=8).prop_flat_map(|n| (Just(n), prop::collection::vec(0u64..(1 << n), 0..=8)))
}

proptest! {
    #[test]
    fn rank_matches_naive((n, rows) in rows_strategy()) {
        prop_assert_eq!(matrix(n, &rows).rank(), naive_rank(&rows));
    }

    #[test]
    fn rref_keeps_rank_and_drops_zero_rows((n, rows) in rows_strategy()) {
        let m = matrix(n, &rows);
        let r = m.rref();
        prop_assert_eq!(r.rank(), m.rank());
        prop_assert_eq!(r.nrows(), m.rank());
        prop_assert!(r.rows().iter().all(|row| !row.is_zero()));
        prop_assert_eq!(r.rref(), r);
    }

    #[test]
    fn containment_is_rank_test((n, rows) in rows_strategy(), v in any::<u64>()) {
        let m = matrix(n, &rows);
        let v = v & ((1 << n) - 1);
        let mut extended = rows.clone();
        extended.push(v);
        let expected = naive_rank(&extended) == naive_rank(&rows);
        prop_assert_eq!(m.row_space_contains(&BitVector::from_u64(n, v)).unwrap(), expected);
    }

    #[test]
    fn stacked_rank_is_subadditive((n, a) in rows_strategy(), b in prop::collection::vec(any::<u64>(), 0..=8)) {
        let b: Vec<u64> = b.into_iter().map(|x| x & ((1 << n) - 1)).collect();
        let (ma, mb) = (matrix(n, &a), matrix(n, &b));
        prop_assert!(ma.stack(&mb).unwrap().rank() <= ma.rank() + mb.rank());
    }

    #[test]
    fn every_row_is_in_the_row_space((n, rows) in rows_strategy()) {
        let m = matrix(n, &rows);
        for r in m.rows() {
            prop_assert!(m.row_space_contains(r).unwrap());
        }
    }

    #[test]
    fn vector_roundtrips_through_words(n in 1usize..=64, w in any::<u64>()) {
        let w = if n == 64 { w } else { w & ((1 << n) - 1) };
        let v = BitVector::from_u64(n, w);
        prop_assert_eq!(v.to_u64(), w);
        prop_assert_eq!(v.weight(), w.count_ones() as usize);
        prop_assert_eq!(v.ones().collect::<Vec<_>>(), (0..n).filter(|&i| w >> i & 1 == 1).collect::<Vec<_>>());
    }
}
