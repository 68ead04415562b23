//! Dense GF(2) elimination oracles. They share no code with the column-reduction kernel
//! and are used to cross-check it.

use crate::persistence::{Bar, Barcode, Death};
use crate::rational::Action;
use crate::z2_linalg::Z2Column;

type Bits = Vec<u64>;

fn to_bits(c: &Z2Column, words: usize) -> Bits {
    let mut v = vec![0u64; words];
    for &i in c.entries() {
        v[i / 64] |= 1 << (i % 64);
    }
    v
}

fn top_bit(v: &Bits) -> Option<usize> {
    v.iter()
        .enumerate()
        .rev()
        .find(|(_, w)| **w != 0)
        .map(|(k, w)| k * 64 + 63 - w.leading_zeros() as usize)
}

fn xor(a: &mut Bits, b: &Bits) {
    a.iter_mut().zip(b).for_each(|(x, y)| *x ^= y);
}

/// Incremental echelon basis keyed by top bit.
struct Echelon {
    pivots: Vec<Option<Bits>>,
    rank: usize,
}

impl Echelon {
    fn new(bits: usize) -> Self {
        Echelon {
            pivots: vec![None; bits],
            rank: 0,
        }
    }

    /// Inserts `v`; returns false if it was already in the span.
    fn insert(&mut self, mut v: Bits) -> bool {
        while let Some(b) = top_bit(&v) {
            match &self.pivots[b] {
                Some(p) => xor(&mut v, p),
                None => {
                    self.pivots[b] = Some(v);
                    self.rank += 1;
                    return true;
                }
            }
        }
        false
    }
}

/// Basis of the cycles among the chains supported on `cols` (indices into `boundaries`).
fn cycles(boundaries: &[Z2Column], cols: &[usize], words: usize) -> Vec<Bits> {
    let n = boundaries.len();
    let cw = n.div_ceil(64).max(1);
    // pivots on the boundary part, each carrying the chain that produced it
    let mut pivots: Vec<Option<(Bits, Bits)>> = vec![None; words * 64];
    let mut out = Vec::new();
    for &j in cols {
        let mut v = to_bits(&boundaries[j], words);
        let mut chain = vec![0u64; cw];
        chain[j / 64] |= 1 << (j % 64);
        loop {
            match top_bit(&v) {
                None => {
                    out.push(chain);
                    break;
                }
                Some(b) => match &pivots[b] {
                    Some((pv, pc)) => {
                        xor(&mut v, pv);
                        xor(&mut chain, pc);
                    }
                    None => {
                        pivots[b] = Some((v, chain));
                        break;
                    }
                },
            }
        }
    }
    out
}

/// Rank of the map on homology induced by the inclusion `{i : in_s(i)} -> {i : in_t(i)}`
/// of subcomplexes (the first must be contained in the second).
pub fn inclusion_rank_by(boundaries: &[Z2Column], in_s: impl Fn(usize) -> bool, in_t: impl Fn(usize) -> bool) -> usize {
    let n = boundaries.len();
    let words = n.div_ceil(64).max(1);
    let s_cols: Vec<usize> = (0..n).filter(|&i| in_s(i)).collect();
    let t_cols: Vec<usize> = (0..n).filter(|&i| in_t(i)).collect();
    let mut image = Echelon::new(words * 64);
    for &j in &t_cols {
        image.insert(to_bits(&boundaries[j], words));
    }
    let base = image.rank;
    for z in cycles(boundaries, &s_cols, words) {
        image.insert(z);
    }
    image.rank - base
}

/// Rank of `H(A_s) -> H(A_t)` where `A_r` is spanned by the basis elements of action `< r`.
pub fn inclusion_rank(actions: &[Action], boundaries: &[Z2Column], s: &Action, t: &Action) -> usize {
    inclusion_rank_by(boundaries, |i| &actions[i] < s, |i| &actions[i] < t)
}

/// Barcode read off from ranks of inclusions between consecutive sublevel complexes.
pub fn dense_barcode(actions: &[Action], boundaries: &[Z2Column], r_max: &Action) -> Barcode {
    let mut spectrum: Vec<&Action> = actions.iter().collect();
    spectrum.sort();
    spectrum.dedup();
    let m = spectrum.len();
    // rho(k, l): rank of H(K_k) -> H(K_l), K_k = span{action <= v_k}, K_0 = 0
    let rho = |k: usize, l: usize| -> i64 {
        if k == 0 || l > m {
            return 0;
        }
        inclusion_rank_by(
            boundaries,
            |i| &actions[i] <= spectrum[k - 1],
            |i| &actions[i] <= spectrum[l - 1],
        ) as i64
    };
    let mut bars = Vec::new();
    for i in 1..=m {
        for j in i + 1..=m + 1 {
            let mult = rho(i, j - 1) - rho(i - 1, j - 1) - rho(i, j) + rho(i - 1, j);
            assert!(mult >= 0, "negative multiplicity from inclusion ranks");
            if mult > 0 {
                let death = if j > m {
                    Death::Censored(r_max.clone())
                } else {
                    Death::Finite(spectrum[j - 1].clone())
                };
                bars.push(Bar::new(spectrum[i - 1].clone(), death, mult as u64));
            }
        }
    }
    Barcode::new(bars, Some(r_max.clone()))
}
