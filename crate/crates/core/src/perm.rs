//! Permutations of `{1, …, n}` in one-line notation.
//!
//! Composition is right-to-left: `u.compose(&v)` maps `i ↦ u(v(i))`. With this
//! convention, left multiplication by the longest element complements values
//! (`w₀w = [n+1−w(1), …, n+1−w(n)]`) and right multiplication by a
//! transposition `t_{i,j}` swaps positions `i` and `j`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Largest supported size. Permutations up to this size pack into a `u64`
/// memo key (four bits per entry).
pub const MAX_SIZE: usize = 16;

/// A permutation of `{1, …, n}` stored in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    entries: Vec<u8>,
}

impl Permutation {
    /// Validates a one-line sequence and wraps it.
    pub fn from_oneline(values: &[i64]) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::EmptyPermutation);
        }
        if n > MAX_SIZE {
            return Err(Error::TooLarge(n));
        }
        let mut seen = [false; MAX_SIZE + 1];
        for &v in values {
            if v < 1 || v > n as i64 {
                return Err(Error::NotAPermutation {
                    n,
                    reason: format!("value {v} out of range"),
                });
            }
            if seen[v as usize] {
                return Err(Error::NotAPermutation {
                    n,
                    reason: format!("value {v} repeated"),
                });
            }
            seen[v as usize] = true;
        }
        Ok(Self {
            entries: values.iter().map(|&v| v as u8).collect(),
        })
    }

    pub(crate) fn from_entries_unchecked(entries: Vec<u8>) -> Self {
        debug_assert!(Self::is_bijection(&entries));
        Self { entries }
    }

    fn is_bijection(entries: &[u8]) -> bool {
        let mut seen = [false; MAX_SIZE + 1];
        entries.iter().all(|&v| {
            let v = v as usize;
            (1..=entries.len()).contains(&v) && !std::mem::replace(&mut seen[v], true)
        })
    }

    fn check_size(n: usize) -> Result<()> {
        match n {
            0 => Err(Error::EmptyPermutation),
            n if n > MAX_SIZE => Err(Error::TooLarge(n)),
            _ => Ok(()),
        }
    }

    /// `[1, 2, …, n]`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::check_size(n)?;
        Ok(Self {
            entries: (1..=n as u8).collect(),
        })
    }

    /// The element of maximal length, `w₀ = [n, n−1, …, 1]`.
    pub fn longest_element(n: usize) -> Result<Self> {
        Self::check_size(n)?;
        Ok(Self {
            entries: (1..=n as u8).rev().collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// One-line notation.
    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    /// `w(i)` for a 1-based position `i`.
    ///
    /// Panics if `i` is out of range.
    pub fn at(&self, i: usize) -> usize {
        self.entries[i - 1] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.entries
            .iter()
            .enumerate()
            .all(|(i, &v)| v as usize == i + 1)
    }

    fn same_size(&self, other: &Self) -> Result<()> {
        if self.size() != other.size() {
            return Err(Error::SizeMismatch {
                left: self.size(),
                right: other.size(),
            });
        }
        Ok(())
    }

    /// The product `self · other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_size(other)?;
        Ok(Self {
            entries: other
                .entries
                .iter()
                .map(|&v| self.entries[v as usize - 1])
                .collect(),
        })
    }

    /// `w₀ · self`: complements every value.
    pub fn complement_values(&self) -> Self {
        let n1 = self.size() as u8 + 1;
        Self {
            entries: self.entries.iter().map(|&v| n1 - v).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut entries = vec![0u8; self.size()];
        for (i, &v) in self.entries.iter().enumerate() {
            entries[v as usize - 1] = i as u8 + 1;
        }
        Self { entries }
    }

    /// `w · t_{i,j}`: swaps positions `i < j` (1-based).
    pub fn right_multiply_transposition(&self, i: usize, j: usize) -> Result<Self> {
        let n = self.size();
        if i == 0 || i >= j || j > n {
            return Err(Error::BadTransposition { i, j, n });
        }
        let mut entries = self.entries.clone();
        entries.swap(i - 1, j - 1);
        Ok(Self { entries })
    }

    /// `w · s_i`: swaps positions `i` and `i+1`.
    pub fn right_multiply_simple(&self, i: usize) -> Result<Self> {
        self.right_multiply_transposition(i, i + 1)
    }

    /// `s_i · w`: swaps the values `i` and `i+1`.
    pub fn left_multiply_simple(&self, i: usize) -> Result<Self> {
        let n = self.size();
        if i == 0 || i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        let (a, b) = (i as u8, i as u8 + 1);
        Ok(Self {
            entries: self
                .entries
                .iter()
                .map(|&v| match v {
                    v if v == a => b,
                    v if v == b => a,
                    v => v,
                })
                .collect(),
        })
    }

    /// Number of inversions.
    pub fn length(&self) -> usize {
        inversions(&self.entries)
    }

    /// 1 if `x(i) > x(i+1)` (so `x s_i < x`), else 0.
    pub fn descent_indicator(&self, i: usize) -> Result<u8> {
        let n = self.size();
        if i == 0 || i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        Ok(u8::from(self.entries[i - 1] > self.entries[i]))
    }

    /// Indices `i` with `w s_i < w`, ascending.
    pub fn right_descents(&self) -> Vec<usize> {
        (1..self.size())
            .filter(|&i| self.entries[i - 1] > self.entries[i])
            .collect()
    }

    /// Indices `i` with `s_i w < w`, ascending. These are the values `i` that
    /// appear to the right of `i+1`.
    pub fn left_descents(&self) -> Vec<usize> {
        self.inverse().right_descents()
    }

    /// Whether no subsequence of `self` is order-isomorphic to `pattern`.
    pub fn avoids_pattern(&self, pattern: &Self) -> Result<bool> {
        Ok(self.find_pattern_instance(pattern)?.is_none())
    }

    /// The lexicographically smallest increasing list of 1-based positions
    /// whose values flatten to `pattern`, if any.
    pub fn find_pattern_instance(&self, pattern: &Self) -> Result<Option<Vec<usize>>> {
        let k = pattern.size();
        let n = self.size();
        if k > n {
            return Err(Error::PatternTooLarge {
                pattern: k,
                host: n,
            });
        }
        let mut chosen = Vec::with_capacity(k);
        if self.extend_instance(&pattern.entries, 0, &mut chosen) {
            Ok(Some(chosen.into_iter().map(|i| i + 1).collect()))
        } else {
            Ok(None)
        }
    }

    // Depth-first over positions in increasing order, so the first complete
    // match found is the lexicographically smallest one.
    fn extend_instance(&self, pattern: &[u8], start: usize, chosen: &mut Vec<usize>) -> bool {
        let depth = chosen.len();
        if depth == pattern.len() {
            return true;
        }
        let remaining = pattern.len() - depth;
        for pos in start..=self.size() - remaining {
            let v = self.entries[pos];
            let consistent = chosen
                .iter()
                .zip(pattern)
                .all(|(&c, &pv)| (self.entries[c] < v) == (pv < pattern[depth]));
            if consistent {
                chosen.push(pos);
                if self.extend_instance(pattern, pos + 1, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    /// A uniformly random element of `S_n`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let mut p = Self::identity(n)?;
        p.entries.shuffle(rng);
        Ok(p)
    }

    /// Lexicographically next permutation of the same size, if any.
    pub fn next_lexicographic(&self) -> Option<Self> {
        let mut e = self.entries.clone();
        let i = (0..e.len().saturating_sub(1))
            .rev()
            .find(|&i| e[i] < e[i + 1])?;
        let j = (i + 1..e.len()).rev().find(|&j| e[j] > e[i])?;
        e.swap(i, j);
        e[i + 1..].reverse();
        Some(Self { entries: e })
    }

    /// Every element of `S_n` in lexicographic order.
    pub fn all(n: usize) -> Result<impl Iterator<Item = Permutation>> {
        let first = Self::identity(n)?;
        Ok(std::iter::successors(Some(first), |p| {
            p.next_lexicographic()
        }))
    }

    pub(crate) fn key(&self) -> PermKey {
        PermKey::pack(&self.entries)
    }
}

pub(crate) fn inversions(entries: &[u8]) -> usize {
    let mut count = 0;
    for (i, &a) in entries.iter().enumerate() {
        count += entries[i + 1..].iter().filter(|&&b| a > b).count();
    }
    count
}

/// The unique permutation order-isomorphic to a sequence of distinct integers.
pub fn flatten(values: &[i64]) -> Result<Permutation> {
    if values.is_empty() {
        return Err(Error::EmptyPermutation);
    }
    if values.len() > MAX_SIZE {
        return Err(Error::TooLarge(values.len()));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by_key(|&i| values[i]);
    if let Some(w) = order.windows(2).find(|w| values[w[0]] == values[w[1]]) {
        return Err(Error::Duplicate(values[w[0]]));
    }
    let mut entries = vec![0u8; values.len()];
    for (rank, &i) in order.iter().enumerate() {
        entries[i] = rank as u8 + 1;
    }
    Ok(Permutation { entries })
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// Accepts `"4,2,3,1"`, `"[4, 2, 3, 1]"` and, for `n ≤ 9`, the compact `"4231"`.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = || Error::Parse {
            what: "permutation",
            input: s.to_string(),
        };
        let body = s.trim();
        let body = body
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .unwrap_or(body)
            .trim();
        if body.is_empty() {
            return Err(parse_err());
        }
        let values: Vec<i64> = if body.contains(',') {
            body.split(',')
                .map(|t| t.trim().parse::<i64>().map_err(|_| parse_err()))
                .collect::<Result<_>>()?
        } else if body.chars().all(|c| c.is_ascii_digit()) && body.len() <= 9 {
            body.chars().map(|c| i64::from(c as u8 - b'0')).collect()
        } else {
            return Err(parse_err());
        };
        Self::from_oneline(&values)
    }
}

/// Packed one-line notation, four bits per entry holding `w(i) − 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub(crate) struct PermKey(pub(crate) u64);

impl PermKey {
    pub(crate) fn pack(entries: &[u8]) -> Self {
        let mut k = 0u64;
        for (i, &v) in entries.iter().enumerate() {
            k |= u64::from(v - 1) << (4 * i);
        }
        Self(k)
    }

    /// Value at 0-based position `i`, in `1..=n`.
    #[inline]
    pub(crate) fn get(self, i: usize) -> u8 {
        ((self.0 >> (4 * i)) & 0xf) as u8 + 1
    }

    /// Swaps 0-based positions `i` and `j`.
    #[inline]
    pub(crate) fn swap(self, i: usize, j: usize) -> Self {
        let a = (self.0 >> (4 * i)) & 0xf;
        let b = (self.0 >> (4 * j)) & 0xf;
        let diff = a ^ b;
        Self(self.0 ^ (diff << (4 * i)) ^ (diff << (4 * j)))
    }

    pub(crate) fn unpack(self, n: usize) -> Permutation {
        Permutation::from_entries_unchecked((0..n).map(|i| self.get(i)).collect())
    }
}
