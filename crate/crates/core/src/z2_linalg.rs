//! Sparse linear algebra over GF(2) and the left-to-right column reduction that
//! realizes persistence pairing.
//!
//! Indices are positions in a total order chosen by the caller; this module never
//! sees actions. A column at position `j` may only contain rows `< j`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Z2Error {
    #[error("column {column} contains row {row}, which is not strictly earlier in the filtration")]
    FiltrationViolation { column: usize, row: usize },
    #[error("column entries must be strictly increasing: {0:?}")]
    NotStrictlyIncreasing(Vec<usize>),
}

/// Support of a vector over GF(2), kept as a strictly increasing list of row indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Z2Column {
    entries: Vec<usize>,
}

impl Z2Column {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a column from an already strictly increasing support.
    pub fn from_sorted(entries: Vec<usize>) -> Result<Self, Z2Error> {
        if entries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Z2Error::NotStrictlyIncreasing(entries));
        }
        Ok(Z2Column { entries })
    }

    /// Builds a column as a GF(2) sum of unit vectors: repeated indices cancel in pairs.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        let mut entries = Vec::with_capacity(v.len());
        for i in v {
            if entries.last() == Some(&i) {
                entries.pop();
            } else {
                entries.push(i);
            }
        }
        Z2Column { entries }
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest row index in the support (the "low" of the column).
    pub fn low(&self) -> Option<usize> {
        self.entries.last().copied()
    }

    pub fn contains(&self, row: usize) -> bool {
        self.entries.binary_search(&row).is_ok()
    }

    /// In-place symmetric difference with `other`.
    pub fn add_assign(&mut self, other: &Z2Column) {
        if other.entries.is_empty() {
            return;
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        self.entries = out;
    }
}

impl FromIterator<usize> for Z2Column {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Z2Column::from_indices(iter)
    }
}

/// Sum of two columns over GF(2).
pub fn add_columns(a: &Z2Column, b: &Z2Column) -> Z2Column {
    let mut out = a.clone();
    out.add_assign(b);
    out
}

/// Output of [`reduce`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedMatrix {
    columns: Vec<Z2Column>,
    pairings: BTreeMap<usize, usize>,
    essentials: BTreeSet<usize>,
}

impl ReducedMatrix {
    pub fn columns(&self) -> &[Z2Column] {
        &self.columns
    }

    /// Column index -> pivot (low) row index.
    pub fn pairings(&self) -> &BTreeMap<usize, usize> {
        &self.pairings
    }

    /// Positions whose reduced column is zero and which are never a pivot row.
    pub fn essentials(&self) -> &BTreeSet<usize> {
        &self.essentials
    }
}

/// Standard persistence reduction: sweep columns left to right and, while the low of
/// the current column collides with the low of an earlier nonzero column, add that
/// earlier column.
pub fn reduce(columns: Vec<Z2Column>) -> Result<ReducedMatrix, Z2Error> {
    for (j, col) in columns.iter().enumerate() {
        if let Some(row) = col.low() {
            if row >= j {
                return Err(Z2Error::FiltrationViolation { column: j, row });
            }
        }
    }

    let n = columns.len();
    let mut columns = columns;
    // pivot_of[row] = column whose reduced low is `row`
    let mut pivot_of: Vec<Option<usize>> = vec![None; n];
    let mut pairings = BTreeMap::new();

    for j in 0..n {
        while let Some(low) = columns[j].low() {
            match pivot_of[low] {
                Some(k) => {
                    let (head, tail) = columns.split_at_mut(j);
                    tail[0].add_assign(&head[k]);
                }
                None => {
                    pivot_of[low] = Some(j);
                    pairings.insert(j, low);
                    break;
                }
            }
        }
    }

    let essentials = (0..n)
        .filter(|&i| columns[i].is_zero() && pivot_of[i].is_none())
        .collect();

    Ok(ReducedMatrix {
        columns,
        pairings,
        essentials,
    })
}

/// Rank over GF(2) by Gaussian elimination on packed rows. Independent of [`reduce`].
pub fn rank(columns: &[Z2Column]) -> usize {
    let words = columns
        .iter()
        .filter_map(|c| c.low())
        .max()
        .map_or(0, |m| m / 64 + 1);
    let mut vecs: Vec<Vec<u64>> = columns
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| {
            let mut v = vec![0u64; words];
            for &i in c.entries() {
                v[i / 64] ^= 1 << (i % 64);
            }
            v
        })
        .collect();

    let mut rank = 0;
    for bit in 0..words * 64 {
        let (w, b) = (bit / 64, 1u64 << (bit % 64));
        let Some(p) = (rank..vecs.len()).find(|&r| vecs[r][w] & b != 0) else {
            continue;
        };
        vecs.swap(rank, p);
        let pivot = vecs[rank].clone();
        for (r, v) in vecs.iter_mut().enumerate() {
            if r != rank && v[w] & b != 0 {
                v.iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn col(v: &[usize]) -> Z2Column {
        Z2Column::from_sorted(v.to_vec()).unwrap()
    }

    #[test]
    fn addition_examples() {
        assert_eq!(add_columns(&col(&[1, 3]), &col(&[3, 5])), col(&[1, 5]));
        assert_eq!(add_columns(&col(&[]), &col(&[2])), col(&[2]));
        assert_eq!(add_columns(&col(&[4]), &col(&[4])), col(&[]));
    }

    #[test]
    fn from_sorted_rejects_duplicates() {
        assert!(Z2Column::from_sorted(vec![1, 1]).is_err());
        assert!(Z2Column::from_sorted(vec![3, 2]).is_err());
        assert_eq!(Z2Column::from_indices([3, 1, 3, 2]), col(&[1, 2]));
    }

    #[test]
    fn reduce_empty() {
        let r = reduce(vec![]).unwrap();
        assert!(r.pairings().is_empty());
        assert!(r.essentials().is_empty());
    }

    #[test]
    fn reduce_single_pair() {
        let r = reduce(vec![col(&[]), col(&[0])]).unwrap();
        assert_eq!(r.pairings(), &BTreeMap::from([(1, 0)]));
        assert!(r.essentials().is_empty());
    }

    #[test]
    fn reduce_four_by_four() {
        let r = reduce(vec![col(&[]), col(&[]), col(&[0, 1]), col(&[0, 1])]).unwrap();
        assert_eq!(r.pairings(), &BTreeMap::from([(2, 1)]));
        assert!(r.columns()[3].is_zero());
        assert_eq!(r.essentials(), &BTreeSet::from([0, 3]));
    }

    #[test]
    fn reduce_rejects_non_filtered_columns() {
        let err = reduce(vec![col(&[0])]).unwrap_err();
        assert_eq!(err, Z2Error::FiltrationViolation { column: 0, row: 0 });
        assert!(reduce(vec![col(&[]), col(&[3])]).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&[col(&[]), col(&[])]), 0);
        assert_eq!(rank(&[col(&[0]), col(&[1]), col(&[2])]), 3);
        assert_eq!(rank(&[col(&[0, 1]), col(&[0, 1])]), 1);
        assert_eq!(rank(&[col(&[0, 70]), col(&[70]), col(&[0])]), 2);
    }

    fn filtered_matrix(max_n: usize) -> impl Strategy<Value = Vec<Z2Column>> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), n).prop_map(
                move |bits| {
                    bits.into_iter()
                        .enumerate()
                        .map(|(j, row)| Z2Column::from_indices((0..j).filter(|&i| row[i])))
                        .collect()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn addition_is_an_involution(a in proptest::collection::btree_set(0usize..40, 0..10),
                                     b in proptest::collection::btree_set(0usize..40, 0..10)) {
            let a = Z2Column::from_indices(a);
            let b = Z2Column::from_indices(b);
            prop_assert_eq!(add_columns(&add_columns(&a, &b), &b), a.clone());
            prop_assert!(add_columns(&a, &a).is_zero());
        }

        #[test]
        fn reduced_lows_are_distinct(m in filtered_matrix(64)) {
            let r = reduce(m).unwrap();
            let lows: Vec<usize> = r.columns().iter().filter_map(Z2Column::low).collect();
            let distinct: BTreeSet<usize> = lows.iter().copied().collect();
            prop_assert_eq!(lows.len(), distinct.len());
            for (j, c) in r.columns().iter().enumerate() {
                prop_assert!(c.is_zero() || r.pairings().get(&j) == c.low().as_ref());
            }
        }

        #[test]
        fn pairings_count_equals_rank(m in filtered_matrix(64)) {
            let expected = rank(&m);
            let r = reduce(m).unwrap();
            prop_assert_eq!(r.pairings().len(), expected);
        }

        #[test]
        fn reduce_is_idempotent(m in filtered_matrix(40)) {
            let once = reduce(m).unwrap();
            let twice = reduce(once.columns().to_vec()).unwrap();
            prop_assert_eq!(once, twice);
        }
    }
}
