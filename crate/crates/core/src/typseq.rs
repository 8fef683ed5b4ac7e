//! Typical sequences of integer sequences and the operations on them used by
//! the decomposition dynamic program.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

/// An integer sequence in canonical (fully reduced) form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypicalSeq(Vec<u32>);

impl TypicalSeq {
    /// Reduces `values`; equivalent to [`tau`].
    pub fn new(values: &[u32]) -> Self {
        tau(values)
    }

    pub fn single(value: u32) -> Self {
        TypicalSeq(vec![value])
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_value(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn min_value(&self) -> u32 {
        self.0.iter().copied().min().unwrap_or(0)
    }

    pub fn first(&self) -> u32 {
        self.0[0]
    }

    pub fn last(&self) -> u32 {
        self.0[self.0.len() - 1]
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.0.clone();
        v.reverse();
        TypicalSeq(v)
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }
}

impl fmt::Display for TypicalSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Incremental reducer: pushing values one by one keeps the stack equal to
/// the typical sequence of everything pushed so far.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Reducer {
    stack: Vec<u32>,
    origin: Vec<usize>,
    pushed: usize,
}

impl Reducer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: u32) {
        let idx = self.pushed;
        self.pushed += 1;
        let len = self.stack.len();
        if len > 0 && self.stack[len - 1] == x {
            return;
        }
        // Smallest i whose interval to x contains everything after it.
        let mut cut = None;
        let (mut lo, mut hi) = (u32::MAX, 0);
        for i in (0..len.saturating_sub(1)).rev() {
            let s = self.stack[i + 1];
            lo = lo.min(s);
            hi = hi.max(s);
            let a = self.stack[i];
            if a.min(x) <= lo && hi <= a.max(x) {
                cut = Some(i);
            }
        }
        if let Some(i) = cut {
            self.stack.truncate(i + 1);
            self.origin.truncate(i + 1);
            if self.stack[i] == x {
                return;
            }
        }
        self.stack.push(x);
        self.origin.push(idx);
    }

    pub fn current(&self) -> &[u32] {
        &self.stack
    }

    /// Positions (in push order) of the kept values.
    pub fn kept_indices(&self) -> &[usize] {
        &self.origin
    }

    pub fn finish(self) -> TypicalSeq {
        TypicalSeq(self.stack)
    }
}

/// The typical sequence of `a`.
pub fn tau(a: &[u32]) -> TypicalSeq {
    let mut r = Reducer::new();
    for &x in a {
        r.push(x);
    }
    r.finish()
}

/// The typical sequence of `a` with the indices of `a` it keeps.
pub fn tau_indices(a: &[u32]) -> (TypicalSeq, Vec<usize>) {
    let mut r = Reducer::new();
    for &x in a {
        r.push(x);
    }
    let idx = r.kept_indices().to_vec();
    (r.finish(), idx)
}

/// A lattice path through `a × b` (steps right, down or diagonal) visiting
/// only cells with `a[i] <= b[j]`; its cells spell equal-length extensions
/// `A' <= B'`.
pub fn dominance_path(a: &[u32], b: &[u32]) -> Option<Vec<(usize, usize)>> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let (k, l) = (a.len(), b.len());
    // prev[i][j]: predecessor on some valid path, or usize::MAX if unreachable.
    let mut prev = vec![vec![(usize::MAX, usize::MAX); l]; k];
    let ok = |i: usize, j: usize| a[i] <= b[j];
    if !ok(0, 0) {
        return None;
    }
    prev[0][0] = (0, 0);
    for i in 0..k {
        for j in 0..l {
            if (i, j) == (0, 0) || !ok(i, j) {
                continue;
            }
            let candidates = [(i.wrapping_sub(1), j.wrapping_sub(1)), (i.wrapping_sub(1), j), (i, j.wrapping_sub(1))];
            for (pi, pj) in candidates {
                if pi < k && pj < l && prev[pi][pj].0 != usize::MAX {
                    prev[i][j] = (pi, pj);
                    break;
                }
            }
        }
    }
    if prev[k - 1][l - 1].0 == usize::MAX {
        return None;
    }
    let mut path = vec![(k - 1, l - 1)];
    let mut cur = (k - 1, l - 1);
    while cur != (0, 0) {
        cur = prev[cur.0][cur.1];
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

/// Whether some equal-length extensions satisfy `A' <= B'` pointwise.
pub fn superior(a: &[u32], b: &[u32]) -> bool {
    dominance_path(a, b).is_some()
}

/// Adds `c` to every value. Panics if a value would drop below zero.
pub fn shift(a: &TypicalSeq, c: i64) -> TypicalSeq {
    TypicalSeq(
        a.0.iter()
            .map(|&v| u32::try_from(v as i64 + c).expect("shift moves a value below zero"))
            .collect(),
    )
}

/// Typical sequence of the concatenation.
pub fn concat(a: &TypicalSeq, b: &TypicalSeq) -> TypicalSeq {
    let mut r = Reducer::new();
    for &x in a.0.iter().chain(&b.0) {
        r.push(x);
    }
    r.finish()
}

/// One merged sequence together with a grid path producing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeResult {
    pub seq: TypicalSeq,
    pub path: Vec<(usize, usize)>,
}

/// All distinct `τ(s - c)` for weight sequences `s` of paths from the first
/// to the last cell of the grid over `a × b` with cell weight `a[i] + b[j]`.
/// Results are sorted by sequence; each carries one representative path.
pub fn merge_sum(a: &[u32], b: &[u32], c: u32) -> Vec<MergeResult> {
    let (k, l) = (a.len(), b.len());
    assert!(k > 0 && l > 0, "merge of empty sequences");
    let weight = |i: usize, j: usize| {
        (a[i] + b[j])
            .checked_sub(c)
            .expect("merge offset exceeds a cell weight")
    };
    let mut results: BTreeMap<TypicalSeq, Vec<(usize, usize)>> = BTreeMap::new();
    let mut seen: HashSet<(usize, usize, Vec<u32>)> = HashSet::new();
    let mut start = Reducer::new();
    start.push(weight(0, 0));
    let mut path = vec![(0, 0)];
    // Explicit DFS stack: (cell, reducer, next move to try).
    let mut stack: Vec<(usize, usize, Reducer, u8)> = vec![(0, 0, start, 0)];
    while let Some(top) = stack.last_mut() {
        let (i, j) = (top.0, top.1);
        if top.3 == 0 && (i, j) == (k - 1, l - 1) {
            let seq = TypicalSeq(top.2.current().to_vec());
            results.entry(seq).or_insert_with(|| path.clone());
            top.3 = 3;
        }
        if top.3 >= 3 {
            stack.pop();
            path.pop();
            continue;
        }
        let step = top.3;
        top.3 += 1;
        let (ni, nj) = match step {
            0 => (i + 1, j + 1),
            1 => (i + 1, j),
            _ => (i, j + 1),
        };
        if ni >= k || nj >= l {
            continue;
        }
        let mut next = top.2.clone();
        next.push(weight(ni, nj));
        if !seen.insert((ni, nj, next.current().to_vec())) {
            continue;
        }
        path.push((ni, nj));
        stack.push((ni, nj, next, 0));
    }
    results.into_iter().map(|(seq, path)| MergeResult { seq, path }).collect()
}

/// Which side of the split point receives the `+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitMode {
    Prefix,
    Suffix,
}

/// Splits at `pos` (0-based), duplicating the pivot into both halves and
/// incrementing one side: returns `(incremented part, other part)`.
pub fn split_for_introduce(t: &TypicalSeq, pos: usize, mode: SplitMode) -> (TypicalSeq, TypicalSeq) {
    assert!(pos < t.len(), "split position out of range");
    let inc = |s: &[u32]| tau(&s.iter().map(|v| v + 1).collect::<Vec<_>>());
    match mode {
        SplitMode::Prefix => (inc(&t.0[..=pos]), tau(&t.0[pos..])),
        SplitMode::Suffix => (inc(&t.0[pos..]), tau(&t.0[..=pos])),
    }
}

/// All typical sequences with values in `1..=max_value`.
pub fn enumerate_typical(max_value: u32) -> Vec<TypicalSeq> {
    fn grow(prefix: &mut Vec<u32>, max_value: u32, out: &mut Vec<TypicalSeq>) {
        for v in 1..=max_value {
            prefix.push(v);
            if tau(prefix).0 == *prefix {
                out.push(TypicalSeq(prefix.clone()));
                grow(prefix, max_value, out);
            }
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), max_value, &mut out);
    out.sort();
    out
}

/// Parses `2,5,3` into values.
pub fn parse_values(text: &str) -> Result<Vec<u32>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|_| format!("not a non-negative integer: {s:?}")))
        .collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Applies the two reduction rules at randomly chosen applicable spots.
    pub(crate) fn tau_random_order(a: &[u32], rng: &mut impl Rng) -> Vec<u32> {
        let mut s = a.to_vec();
        loop {
            let mut moves: Vec<(usize, usize)> = Vec::new();
            for i in 0..s.len().saturating_sub(1) {
                if s[i] == s[i + 1] {
                    moves.push((i, i + 1));
                }
            }
            for i in 0..s.len() {
                for j in i + 2..s.len() {
                    let (lo, hi) = (s[i].min(s[j]), s[i].max(s[j]));
                    if s[i + 1..j].iter().all(|&x| lo <= x && x <= hi) {
                        moves.push((i, j));
                    }
                }
            }
            let Some(&(i, j)) = moves.choose(rng) else { return s };
            if j == i + 1 {
                s.remove(j);
            } else {
                s.drain(i + 1..j);
            }
        }
    }

    /// All extensions of `a` of exactly length `len`.
    pub(crate) fn extensions(a: &[u32], len: usize) -> Vec<Vec<u32>> {
        fn rec(a: &[u32], i: usize, remaining: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if i == a.len() {
                if remaining == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            let left = a.len() - i - 1;
            for rep in 1..=remaining.saturating_sub(left) {
                cur.extend(std::iter::repeat_n(a[i], rep));
                rec(a, i + 1, remaining - rep, cur, out);
                cur.truncate(cur.len() - rep);
            }
        }
        let mut out = Vec::new();
        if len >= a.len() {
            rec(a, 0, len, &mut Vec::new(), &mut out);
        }
        out
    }

    pub(crate) fn superior_brute(a: &[u32], b: &[u32]) -> bool {
        let max_len = a.len() + b.len();
        (a.len().max(b.len())..=max_len).any(|len| {
            let eb = extensions(b, len);
            extensions(a, len)
                .iter()
                .any(|x| eb.iter().any(|y| x.iter().zip(y).all(|(p, q)| p <= q)))
        })
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(&[2, 5, 3, 6, 4, 3]).values(), &[2, 6, 3]);
        assert_eq!(tau(&[7]).values(), &[7]);
        assert_eq!(tau(&[4, 4, 4]).values(), &[4]);
        assert_eq!(tau(&[1, 4, 2, 3, 5]).values(), &[1, 5]);
    }

    #[test]
    fn tau_indices_point_into_input() {
        let a = [2, 5, 3, 6, 4, 3];
        let (t, idx) = tau_indices(&a);
        let picked: Vec<u32> = idx.iter().map(|&i| a[i]).collect();
        assert_eq!(picked, t.values());
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn superiority_examples() {
        let a = [2, 5, 3, 6, 4, 3];
        let t = tau(&a);
        assert!(superior(t.values(), &a));
        assert!(superior(&a, t.values()));
        assert!(!superior(&[1, 5], &[1, 2]));
        assert!(!superior_brute(&[1, 5], &[1, 2]));
    }

    #[test]
    fn superiority_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..400 {
            let la = rng.gen_range(1..=4);
            let lb = rng.gen_range(1..=4);
            let a: Vec<u32> = (0..la).map(|_| rng.gen_range(1..=4)).collect();
            let b: Vec<u32> = (0..lb).map(|_| rng.gen_range(1..=4)).collect();
            assert_eq!(superior(&a, &b), superior_brute(&a, &b), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn shift_examples() {
        let t = tau(&[2, 6, 3]);
        assert_eq!(shift(&t, -1).values(), &[1, 5, 2]);
        assert_eq!(shift(&t, 0), t);
        assert_eq!(shift(&TypicalSeq::single(3), -2).values(), &[1]);
    }

    #[test]
    fn concat_examples() {
        let two = TypicalSeq::single(2);
        assert_eq!(concat(&two, &two), two);
        assert_eq!(concat(&tau(&[2, 6, 3]), &tau(&[5, 1])), tau(&[2, 6, 3, 5, 1]));
        assert_eq!(concat(&tau(&[2, 6, 3]), &tau(&[5, 1])).values(), &[2, 6, 1]);
    }

    #[test]
    fn merge_examples() {
        let m = merge_sum(&[1], &[1], 0);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].seq.values(), &[2]);

        let a = [1, 3, 2, 4];
        let b = [4, 2, 5];
        let m = merge_sum(&a, &b, 0);
        let red = tau(&[5, 7, 4, 7, 9]);
        assert!(m.iter().any(|r| r.seq == red));
        for r in &m {
            let sums: Vec<u32> = r.path.iter().map(|&(i, j)| a[i] + b[j]).collect();
            assert_eq!(tau(&sums), r.seq);
        }
    }

    #[test]
    fn split_examples() {
        let t = tau(&[2, 6, 3]);
        let (p, s) = split_for_introduce(&t, 1, SplitMode::Prefix);
        assert_eq!((p.values(), s.values()), (&[3, 7][..], &[6, 3][..]));
        let (p, s) = split_for_introduce(&TypicalSeq::single(5), 0, SplitMode::Prefix);
        assert_eq!((p.values(), s.values()), (&[6][..], &[5][..]));
        let (p, s) = split_for_introduce(&tau(&[2, 6]), 0, SplitMode::Prefix);
        assert_eq!((p.values(), s.values()), (&[3][..], &[2, 6][..]));
        let (p, s) = split_for_introduce(&t, 1, SplitMode::Suffix);
        assert_eq!((p.values(), s.values()), (&[7, 4][..], &[2, 6][..]));
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_typical(1), vec![TypicalSeq::single(1)]);
        let two: Vec<Vec<u32>> = enumerate_typical(2).into_iter().map(TypicalSeq::into_vec).collect();
        assert_eq!(two, vec![vec![1], vec![1, 2], vec![1, 2, 1], vec![2], vec![2, 1], vec![2, 1, 2]]);
        assert!(enumerate_typical(3).len() <= 128);
    }

    #[test]
    fn random_orders_agree_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..300 {
            let len = rng.gen_range(1..=8);
            let a: Vec<u32> = (0..len).map(|_| rng.gen_range(1..=5)).collect();
            for _ in 0..5 {
                assert_eq!(tau_random_order(&a, &mut rng), tau(&a).into_vec(), "{a:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn tau_is_idempotent_subsequence(a in prop::collection::vec(1u32..6, 1..12)) {
            let t = tau(&a);
            prop_assert_eq!(tau(t.values()), t.clone());
            let mut it = a.iter();
            prop_assert!(t.values().iter().all(|x| it.any(|y| y == x)));
        }

        #[test]
        fn tau_commutes_with_reversal_and_shift(a in prop::collection::vec(1u32..6, 1..12), c in 0i64..4) {
            let mut r = a.clone();
            r.reverse();
            prop_assert_eq!(tau(&r), tau(&a).reversed());
            let up: Vec<u32> = a.iter().map(|&v| v + c as u32).collect();
            prop_assert_eq!(tau(&up), shift(&tau(&a), c));
        }

        #[test]
        fn concat_is_homomorphic(a in prop::collection::vec(1u32..6, 1..8), b in prop::collection::vec(1u32..6, 1..8)) {
            let mut ab = a.clone();
            ab.extend(&b);
            prop_assert_eq!(tau(&ab), concat(&tau(&a), &tau(&b)));
        }

        #[test]
        fn tau_length_bound(a in prop::collection::vec(1u32..8, 1..16)) {
            let distinct: HashSet<u32> = a.iter().copied().collect();
            prop_assert!(tau(&a).len() <= 2 * distinct.len());
        }
    }
}
