//! Bruhat order on `S_n` through rank-difference tables.
//!
//! `r_w(p, q)` counts positions `i ≤ p` with `w(i) ≥ q`, and
//! `d_{x,w}(p, q) = r_w(p, q) − r_x(p, q)`. Then `x ≤ w` exactly when
//! `d_{x,w}` is everywhere non-negative.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::perm::Permutation;

fn same_size(x: &Permutation, w: &Permutation) -> Result<usize> {
    if x.size() != w.size() {
        return Err(Error::SizeMismatch {
            left: x.size(),
            right: w.size(),
        });
    }
    Ok(x.size())
}

/// `|{i ≤ p : w(i) ≥ q}|` for 1-based `p, q`.
pub fn rank_count(w: &Permutation, p: usize, q: usize) -> Result<usize> {
    let n = w.size();
    for index in [p, q] {
        if index == 0 || index > n {
            return Err(Error::IndexOutOfRange { index, n });
        }
    }
    Ok(w.entries()[..p]
        .iter()
        .filter(|&&v| v as usize >= q)
        .count())
}

/// The full table `d_{x,w}(p, q)` for `1 ≤ p, q ≤ n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankDifferenceTable {
    bottom: Permutation,
    top: Permutation,
    values: Vec<i32>,
}

impl RankDifferenceTable {
    pub fn size(&self) -> usize {
        self.bottom.size()
    }

    pub fn bottom(&self) -> &Permutation {
        &self.bottom
    }

    pub fn top(&self) -> &Permutation {
        &self.top
    }

    /// `d(p, q)` for 1-based indices. Panics when out of range.
    pub fn get(&self, p: usize, q: usize) -> i32 {
        let n = self.size();
        assert!(
            (1..=n).contains(&p) && (1..=n).contains(&q),
            "index out of range"
        );
        self.values[(p - 1) * n + (q - 1)]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Cells `(p, q)` with `d(p, q) ≥ 1`.
    pub fn positive_cells(&self) -> Vec<(usize, usize)> {
        let n = self.size();
        (1..=n)
            .flat_map(|p| (1..=n).map(move |q| (p, q)))
            .filter(|&(p, q)| self.get(p, q) >= 1)
            .collect()
    }
}

/// Rows of `r_w(p, ·)` built incrementally over `p`.
fn rank_rows(w: &Permutation) -> Vec<i32> {
    let n = w.size();
    let mut table = vec![0i32; n * n];
    let mut row = vec![0i32; n];
    for (p, &v) in w.entries().iter().enumerate() {
        for cell in row.iter_mut().take(v as usize) {
            *cell += 1;
        }
        table[p * n..(p + 1) * n].copy_from_slice(&row);
    }
    table
}

pub fn rank_difference(x: &Permutation, w: &Permutation) -> Result<RankDifferenceTable> {
    same_size(x, w)?;
    let rw = rank_rows(w);
    let rx = rank_rows(x);
    Ok(RankDifferenceTable {
        bottom: x.clone(),
        top: w.clone(),
        values: rw.iter().zip(&rx).map(|(a, b)| a - b).collect(),
    })
}

/// `x ≤ w` in Bruhat order.
pub fn bruhat_leq(x: &Permutation, w: &Permutation) -> Result<bool> {
    let n = same_size(x, w)?;
    Ok(leq_unchecked(x.entries(), w.entries(), n))
}

pub(crate) fn leq_unchecked(x: &[u8], w: &[u8], n: usize) -> bool {
    // diff[q-1] = d_{x,w}(p, q) for the current p
    let mut diff = [0i32; crate::perm::MAX_SIZE];
    for p in 0..n {
        let (a, b) = (w[p] as usize, x[p] as usize);
        if a > b {
            for d in &mut diff[b..a] {
                *d += 1;
            }
        } else {
            for d in &mut diff[a..b] {
                *d -= 1;
                if *d < 0 {
                    return false;
                }
            }
        }
    }
    true
}

/// Elements covered by `w`: `w·t_{i,j}` with `w(i) > w(j)` and no position
/// strictly between carrying a value strictly between.
pub fn lower_covers(w: &Permutation) -> Vec<Permutation> {
    let e = w.entries();
    let n = e.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if e[i] > e[j] && !e[i + 1..j].iter().any(|&v| v > e[j] && v < e[i]) {
                let mut c = e.to_vec();
                c.swap(i, j);
                out.push(Permutation::from_entries_unchecked(c));
            }
        }
    }
    out
}

/// Elements covering `w`.
pub fn upper_covers(w: &Permutation) -> Vec<Permutation> {
    let e = w.entries();
    let n = e.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if e[i] < e[j] && !e[i + 1..j].iter().any(|&v| v > e[i] && v < e[j]) {
                let mut c = e.to_vec();
                c.swap(i, j);
                out.push(Permutation::from_entries_unchecked(c));
            }
        }
    }
    out
}

/// The Bruhat interval `[bottom, top]`, sorted by `(length, one-line)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruhatInterval {
    bottom: Permutation,
    top: Permutation,
    elements: Vec<Permutation>,
}

impl BruhatInterval {
    pub fn bottom(&self) -> &Permutation {
        &self.bottom
    }

    pub fn top(&self) -> &Permutation {
        &self.top
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, z: &Permutation) -> bool {
        self.elements
            .binary_search_by(|e| (e.length(), e).cmp(&(z.length(), z)))
            .is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Permutation> {
        self.elements.iter()
    }

    /// Elements strictly between the bounds.
    pub fn interior(&self) -> impl Iterator<Item = &Permutation> {
        self.elements
            .iter()
            .filter(move |z| **z != self.bottom && **z != self.top)
    }
}

impl<'a> IntoIterator for &'a BruhatInterval {
    type Item = &'a Permutation;
    type IntoIter = std::slice::Iter<'a, Permutation>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

fn not_below(x: &Permutation, w: &Permutation) -> Error {
    Error::NotBelow {
        x: x.to_string(),
        w: w.to_string(),
    }
}

/// `{z : x ≤ z ≤ w}`, found by walking down from `w` along covers that stay
/// above `x`.
pub fn interval(x: &Permutation, w: &Permutation) -> Result<BruhatInterval> {
    let n = same_size(x, w)?;
    if !leq_unchecked(x.entries(), w.entries(), n) {
        return Err(not_below(x, w));
    }
    let floor = x.length();
    let mut seen: HashSet<Permutation> = HashSet::new();
    seen.insert(w.clone());
    let mut frontier = vec![w.clone()];
    let mut level = w.length();
    while level > floor && !frontier.is_empty() {
        let mut next = Vec::new();
        for z in &frontier {
            for c in lower_covers(z) {
                if !seen.contains(&c) && leq_unchecked(x.entries(), c.entries(), n) {
                    seen.insert(c.clone());
                    next.push(c);
                }
            }
        }
        frontier = next;
        level -= 1;
    }
    let mut elements: Vec<Permutation> = seen.into_iter().collect();
    elements.sort_by_cached_key(|e| (e.length(), e.clone()));
    Ok(BruhatInterval {
        bottom: x.clone(),
        top: w.clone(),
        elements,
    })
}

/// Number of coatoms of `[u, v]`: elements `z` covered by `v` with `u ≤ z`.
pub fn coatom_count(u: &Permutation, v: &Permutation) -> Result<usize> {
    let n = same_size(u, v)?;
    if u == v {
        return Err(Error::EmptyOpenInterval(u.to_string()));
    }
    if !leq_unchecked(u.entries(), v.entries(), n) {
        return Err(not_below(u, v));
    }
    Ok(lower_covers(v)
        .iter()
        .filter(|z| leq_unchecked(u.entries(), z.entries(), n))
        .count())
}

/// Checks `d_{x,w} ≥ d_{y,w}` cell by cell for a chain `x ≤ y ≤ w`.
pub fn verify_monotone_difference(
    x: &Permutation,
    y: &Permutation,
    w: &Permutation,
) -> Result<bool> {
    let n = same_size(x, y)?;
    same_size(y, w)?;
    if !leq_unchecked(x.entries(), y.entries(), n) {
        return Err(not_below(x, y));
    }
    if !leq_unchecked(y.entries(), w.entries(), n) {
        return Err(not_below(y, w));
    }
    let dx = rank_difference(x, w)?;
    let dy = rank_difference(y, w)?;
    Ok(dx.values.iter().zip(&dy.values).all(|(a, b)| a >= b))
}

pub const GLYPH_BOTTOM: char = '●';
pub const GLYPH_TOP: char = '○';
pub const GLYPH_BOTH: char = '◉';
pub const GLYPH_SHADED: char = '▒';
pub const GLYPH_EMPTY: char = '·';

/// Text rendering of the Bruhat picture of `(x, w)`.
///
/// Rows are positions `1..n` top to bottom, columns are values `1..n` left to
/// right. Permutation-matrix markers take precedence over shading, so a cell
/// with `d_{x,w} ≥ 1` that also carries a marker shows the marker.
pub fn render_bruhat_picture(x: &Permutation, w: &Permutation) -> Result<String> {
    let n = same_size(x, w)?;
    let d = rank_difference(x, w)?;
    let mut out = String::new();
    for p in 1..=n {
        for q in 1..=n {
            let glyph = match (x.at(p) == q, w.at(p) == q) {
                (true, true) => GLYPH_BOTH,
                (true, false) => GLYPH_BOTTOM,
                (false, true) => GLYPH_TOP,
                (false, false) if d.get(p, q) >= 1 => GLYPH_SHADED,
                _ => GLYPH_EMPTY,
            };
            out.push(glyph);
        }
        out.push('\n');
    }
    Ok(out)
}
