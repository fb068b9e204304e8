//! Kazhdan–Lusztig polynomials of `S_n` by the standard recursion.
//!
//! For a right descent `s` of `w` (so `ws < w`),
//!
//! ```text
//! P_{x,w} = q^{c} P_{x,ws} + q^{1-c} P_{xs,ws}
//!           − Σ_{z ≤ ws, zs < z} μ(z, ws) q^{(l(w)−l(z))/2} P_{x,z}
//! ```
//!
//! with `c = 1` if `xs < x` and `0` otherwise. [`KLCache`] memoizes whole
//! columns: for a fixed `w` it stores `P_{x,w}` for every `x ≤ w`. The lower
//! set of `w` is `[e, ws] ∪ [e, ws]·s`, so a column is built from the column of
//! `ws` without any Bruhat comparisons. The μ-sum only needs the sparse list of
//! `z` with `μ(z, ws) ≠ 0`, which is cached per `ws`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::bruhat::{interval, leq_unchecked};
use crate::error::{Error, Result};
use crate::perm::{flatten, PermKey, Permutation};
use crate::poly::IntPolynomial;

/// Which right descent of `w` the recursion peels off.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DescentStrategy {
    #[default]
    Largest,
    Smallest,
}

#[derive(Clone, Copy, Debug)]
struct ColumnEntry {
    x: PermKey,
    len: u8,
    poly: u32,
}

#[derive(Debug)]
struct Column {
    entries: Vec<ColumnEntry>,
}

impl Column {
    fn get(&self, x: PermKey) -> Option<&ColumnEntry> {
        self.entries
            .binary_search_by_key(&x, |e| e.x)
            .ok()
            .map(|i| &self.entries[i])
    }
}

#[derive(Clone, Copy, Debug)]
struct MuEntry {
    z: PermKey,
    len: u8,
    mu: i64,
}

type ColumnKey = (u8, PermKey);

/// Counters describing cache usage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    /// Number of `(x, w)` pairs currently stored.
    pub entries: usize,
    pub columns: usize,
    pub evictions: u64,
}

/// Memo table for `P_{x,w}`, organised by the upper element `w`.
///
/// A cache is not shared between threads; give each worker its own.
#[derive(Debug, Default)]
pub struct KLCache {
    strategy: DescentStrategy,
    max_entries: Option<usize>,
    columns: HashMap<ColumnKey, Arc<Column>>,
    mu_lists: HashMap<ColumnKey, Arc<Vec<MuEntry>>>,
    polys: Vec<IntPolynomial>,
    poly_ids: HashMap<IntPolynomial, u32>,
    stats: CacheStats,
}

impl KLCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_strategy(strategy: DescentStrategy) -> Self {
        Self {
            strategy,
            ..Self::default()
        }
    }

    /// Bounds the number of stored pairs. When an insertion would exceed the
    /// bound, all stored columns are dropped and later lookups recompute.
    pub fn with_max_entries(mut self, max_entries: usize) -> Self {
        self.max_entries = Some(max_entries);
        self
    }

    /// A fresh, empty cache with the same configuration.
    pub fn fresh(&self) -> Self {
        Self {
            strategy: self.strategy,
            max_entries: self.max_entries,
            ..Self::default()
        }
    }

    pub fn strategy(&self) -> DescentStrategy {
        self.strategy
    }

    pub fn max_entries(&self) -> Option<usize> {
        self.max_entries
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            columns: self.columns.len(),
            ..self.stats
        }
    }

    pub fn clear(&mut self) {
        self.columns.clear();
        self.mu_lists.clear();
        self.stats.entries = 0;
    }

    fn intern(&mut self, p: IntPolynomial) -> u32 {
        if let Some(&id) = self.poly_ids.get(&p) {
            return id;
        }
        let id = self.polys.len() as u32;
        self.polys.push(p.clone());
        self.poly_ids.insert(p, id);
        id
    }

    fn choose_descent(&self, w: PermKey, n: usize) -> Option<usize> {
        let mut descents = (0..n.saturating_sub(1)).filter(|&i| w.get(i) > w.get(i + 1));
        match self.strategy {
            DescentStrategy::Smallest => descents.next(),
            DescentStrategy::Largest => descents.next_back(),
        }
    }

    fn insert_column(&mut self, key: ColumnKey, column: Arc<Column>) {
        if let Some(cap) = self.max_entries {
            if self.stats.entries + column.entries.len() > cap && !self.columns.is_empty() {
                self.columns.clear();
                self.mu_lists.clear();
                self.stats.entries = 0;
                self.stats.evictions += 1;
            }
        }
        self.stats.entries += column.entries.len();
        self.columns.insert(key, column);
    }

    fn column(&mut self, n: usize, w: PermKey, wlen: usize) -> Result<Arc<Column>> {
        let key = (n as u8, w);
        if let Some(c) = self.columns.get(&key) {
            return Ok(Arc::clone(c));
        }
        let column = Arc::new(self.build_column(n, w, wlen)?);
        self.insert_column(key, Arc::clone(&column));
        Ok(column)
    }

    fn mu_list(&mut self, n: usize, v: PermKey, vlen: usize, col_v: &Column) -> Arc<Vec<MuEntry>> {
        let key = (n as u8, v);
        if let Some(m) = self.mu_lists.get(&key) {
            return Arc::clone(m);
        }
        let list: Vec<MuEntry> = col_v
            .entries
            .iter()
            .filter(|e| e.x != v && (vlen - e.len as usize) % 2 == 1)
            .filter_map(|e| {
                let top = (vlen - e.len as usize - 1) / 2;
                let mu = self.polys[e.poly as usize].coeff(top);
                (mu != 0).then_some(MuEntry {
                    z: e.x,
                    len: e.len,
                    mu,
                })
            })
            .collect();
        let list = Arc::new(list);
        self.mu_lists.insert(key, Arc::clone(&list));
        list
    }

    fn build_column(&mut self, n: usize, w: PermKey, wlen: usize) -> Result<Column> {
        let Some(i) = self.choose_descent(w, n) else {
            let one = self.intern(IntPolynomial::one());
            return Ok(Column {
                entries: vec![ColumnEntry {
                    x: w,
                    len: 0,
                    poly: one,
                }],
            });
        };
        let v = w.swap(i, i + 1);
        let vlen = wlen - 1;
        let col_v = self.column(n, v, vlen)?;
        let mu_v = self.mu_list(n, v, vlen, &col_v);

        // z with zs < z and μ(z, ws) ≠ 0, together with their columns
        let mut corrections: Vec<(MuEntry, Arc<Column>)> = Vec::new();
        for m in mu_v.iter().filter(|m| m.z.get(i) > m.z.get(i + 1)) {
            let col_z = self.column(n, m.z, m.len as usize)?;
            corrections.push((*m, col_z));
        }

        let mut lower: Vec<(PermKey, u8)> = Vec::with_capacity(2 * col_v.entries.len());
        for e in &col_v.entries {
            lower.push((e.x, e.len));
            let xs = e.x.swap(i, i + 1);
            let xs_len = if e.x.get(i) > e.x.get(i + 1) {
                e.len - 1
            } else {
                e.len + 1
            };
            lower.push((xs, xs_len));
        }
        lower.sort_unstable_by_key(|&(x, _)| x);
        lower.dedup_by_key(|&mut (x, _)| x);

        let mut entries = Vec::with_capacity(lower.len());
        for (x, xlen) in lower {
            let xs = x.swap(i, i + 1);
            let x_has_descent = x.get(i) > x.get(i + 1);
            let mut acc = IntPolynomial::zero();
            let (shift_x, shift_xs) = if x_has_descent { (1, 0) } else { (0, 1) };
            if let Some(e) = col_v.get(x) {
                acc.add_scaled_shifted(&self.polys[e.poly as usize], 1, shift_x)?;
            }
            if let Some(e) = col_v.get(xs) {
                acc.add_scaled_shifted(&self.polys[e.poly as usize], 1, shift_xs)?;
            }
            for (m, col_z) in &corrections {
                if let Some(e) = col_z.get(x) {
                    let shift = (wlen - m.len as usize) / 2;
                    acc.add_scaled_shifted(&self.polys[e.poly as usize], -m.mu, shift)?;
                }
            }
            debug_assert_eq!(acc.coeff(0), 1, "constant term of a KL polynomial");
            let poly = self.intern(acc);
            entries.push(ColumnEntry { x, len: xlen, poly });
        }
        Ok(Column { entries })
    }

    fn lookup(&mut self, x: &Permutation, w: &Permutation) -> Result<IntPolynomial> {
        check_sizes(x, w)?;
        let n = w.size();
        let key = (n as u8, w.key());
        if self.columns.contains_key(&key) {
            self.stats.hits += 1;
        } else {
            self.stats.misses += 1;
        }
        let column = self.column(n, w.key(), w.length())?;
        Ok(column
            .get(x.key())
            .map(|e| self.polys[e.poly as usize].clone())
            .unwrap_or_default())
    }

    /// Every `(x, P_{x,w})` with `x ≤ w`, sorted by `(length, one-line)`.
    pub fn lower_polynomials(
        &mut self,
        w: &Permutation,
    ) -> Result<Vec<(Permutation, IntPolynomial)>> {
        let n = w.size();
        let column = self.column(n, w.key(), w.length())?;
        let mut out: Vec<(Permutation, IntPolynomial)> = column
            .entries
            .iter()
            .map(|e| (e.x.unpack(n), self.polys[e.poly as usize].clone()))
            .collect();
        out.sort_by_cached_key(|(x, _)| (x.length(), x.clone()));
        Ok(out)
    }
}

fn check_sizes(x: &Permutation, w: &Permutation) -> Result<()> {
    if x.size() != w.size() {
        return Err(Error::SizeMismatch {
            left: x.size(),
            right: w.size(),
        });
    }
    Ok(())
}

fn require_leq(x: &Permutation, w: &Permutation) -> Result<()> {
    check_sizes(x, w)?;
    if !leq_unchecked(x.entries(), w.entries(), x.size()) {
        return Err(Error::NotBelow {
            x: x.to_string(),
            w: w.to_string(),
        });
    }
    Ok(())
}

/// `P_{x,w}`; zero when `x ≰ w`.
pub fn kl_polynomial(
    x: &Permutation,
    w: &Permutation,
    cache: &mut KLCache,
) -> Result<IntPolynomial> {
    cache.lookup(x, w)
}

/// `μ(x, w)`, the coefficient of `q^{(l(w)−l(x)−1)/2}` in `P_{x,w}`, or 0 when
/// that exponent is not a non-negative integer.
pub fn mu(x: &Permutation, w: &Permutation, cache: &mut KLCache) -> Result<i64> {
    check_sizes(x, w)?;
    let (lx, lw) = (x.length(), w.length());
    if lw <= lx || (lw - lx) % 2 == 0 {
        return Ok(0);
    }
    Ok(kl_polynomial(x, w, cache)?.coeff((lw - lx - 1) / 2))
}

/// The inverse KL polynomial `P_{w₀w, w₀x}`.
pub fn inverse_kl(x: &Permutation, w: &Permutation, cache: &mut KLCache) -> Result<IntPolynomial> {
    check_sizes(x, w)?;
    kl_polynomial(&w.complement_values(), &x.complement_values(), cache)
}

/// `Σ_{x≤z≤w} (−1)^{l(z)+l(w)} P_{z,w} P_{w₀z,w₀x}`.
pub fn inversion_sum(
    x: &Permutation,
    w: &Permutation,
    cache: &mut KLCache,
) -> Result<IntPolynomial> {
    require_leq(x, w)?;
    let lw = w.length();
    let mut sum = IntPolynomial::zero();
    for z in interval(x, w)?.iter() {
        let term = kl_polynomial(z, w, cache)?
            .checked_mul(&inverse_kl(x, z, cache)?)
            .ok_or(Error::Overflow)?;
        let sign = if (z.length() + lw).is_multiple_of(2) {
            1
        } else {
            -1
        };
        sum.add_scaled_shifted(&term, sign, 0)?;
    }
    Ok(sum)
}

/// Whether the alternating inversion sum equals `δ_{x,w}`.
pub fn verify_inversion_identity(
    x: &Permutation,
    w: &Permutation,
    cache: &mut KLCache,
) -> Result<bool> {
    let expected = if x == w {
        IntPolynomial::one()
    } else {
        IntPolynomial::zero()
    };
    Ok(inversion_sum(x, w, cache)? == expected)
}

/// Positions `i` (1-based, ascending) where `x(i) ≠ w(i)` or `d_{x,w}(i, x(i)) ≠ 0`.
pub fn delta_set(x: &Permutation, w: &Permutation) -> Result<Vec<usize>> {
    check_sizes(x, w)?;
    let n = x.size();
    let (xe, we) = (x.entries(), w.entries());
    Ok((1..=n)
        .filter(|&i| {
            if xe[i - 1] != we[i - 1] {
                return true;
            }
            let q = xe[i - 1];
            let rw = we[..i].iter().filter(|&&v| v >= q).count();
            let rx = xe[..i].iter().filter(|&&v| v >= q).count();
            rw != rx
        })
        .collect())
}

/// Restricts `(x, w)` to the positions in [`delta_set`] and flattens both.
///
/// An empty position set yields `(identity(1), identity(1))`.
pub fn tilde_reduce(x: &Permutation, w: &Permutation) -> Result<(Permutation, Permutation)> {
    let positions = delta_set(x, w)?;
    if positions.is_empty() {
        let e = Permutation::identity(1)?;
        return Ok((e.clone(), e));
    }
    let pick =
        |p: &Permutation| -> Vec<i64> { positions.iter().map(|&i| p.at(i) as i64).collect() };
    Ok((flatten(&pick(x))?, flatten(&pick(w))?))
}

/// `w` avoids both 3412 and 4231.
pub fn is_smooth_top(w: &Permutation) -> bool {
    if w.size() < 4 {
        return true;
    }
    let p3412 = Permutation::from_entries_unchecked(vec![3, 4, 1, 2]);
    let p4231 = Permutation::from_entries_unchecked(vec![4, 2, 3, 1]);
    w.find_pattern_instance(&p3412).ok().flatten().is_none()
        && w.find_pattern_instance(&p4231).ok().flatten().is_none()
}

/// Whether `P_{x,w} = 1` for every `x ≤ w`, by direct computation.
pub fn all_lower_polynomials_trivial(w: &Permutation, cache: &mut KLCache) -> Result<bool> {
    Ok(cache.lower_polynomials(w)?.iter().all(|(_, p)| p.is_one()))
}

/// Checks `P_{x,w} = P_{xs,w}` for every right descent `s` of `w` and
/// `P_{x,w} = P_{sx,w}` for every left descent.
pub fn descent_reduction_check(
    x: &Permutation,
    w: &Permutation,
    cache: &mut KLCache,
) -> Result<bool> {
    require_leq(x, w)?;
    let base = kl_polynomial(x, w, cache)?;
    for i in w.right_descents() {
        if kl_polynomial(&x.right_multiply_simple(i)?, w, cache)? != base {
            return Ok(false);
        }
    }
    for i in w.left_descents() {
        if kl_polynomial(&x.left_multiply_simple(i)?, w, cache)? != base {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> Permutation {
        Permutation::from_oneline(v).unwrap()
    }

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_coeffs(c.to_vec())
    }

    #[test]
    fn kl_examples() {
        let mut cache = KLCache::new();
        let w = p(&[3, 1, 4, 2]);
        assert_eq!(
            kl_polynomial(&w, &w, &mut cache).unwrap(),
            IntPolynomial::one()
        );
        let e4 = Permutation::identity(4).unwrap();
        assert!(kl_polynomial(&p(&[3, 4, 1, 2]), &e4, &mut cache)
            .unwrap()
            .is_zero());
        assert_eq!(
            kl_polynomial(&e4, &p(&[3, 4, 1, 2]), &mut cache).unwrap(),
            poly(&[1, 1])
        );
        assert_eq!(
            kl_polynomial(&p(&[2, 1, 4, 3]), &p(&[4, 2, 3, 1]), &mut cache).unwrap(),
            poly(&[1, 1])
        );
        assert!(kl_polynomial(&p(&[1, 2]), &e4, &mut cache).is_err());
    }

    #[test]
    fn mu_examples() {
        let mut cache = KLCache::new();
        assert_eq!(mu(&p(&[1, 2]), &p(&[2, 1]), &mut cache).unwrap(), 1);
        let w = p(&[2, 1]);
        assert_eq!(mu(&w, &w, &mut cache).unwrap(), 0);
        let e4 = Permutation::identity(4).unwrap();
        assert_eq!(mu(&e4, &p(&[3, 4, 1, 2]), &mut cache).unwrap(), 0);
        // x ≰ w with odd length difference
        assert_eq!(
            mu(&p(&[3, 4, 1, 2]), &p(&[4, 2, 3, 1]), &mut cache).unwrap(),
            0
        );
    }

    #[test]
    fn inverse_kl_examples() {
        let mut cache = KLCache::new();
        assert_eq!(
            inverse_kl(&p(&[2, 1, 4, 3]), &p(&[4, 2, 3, 1]), &mut cache).unwrap(),
            poly(&[1, 1])
        );
        assert_eq!(
            inverse_kl(&p(&[2, 1, 5, 4, 3]), &p(&[5, 2, 4, 3, 1]), &mut cache).unwrap(),
            poly(&[1, 2])
        );
        let w = p(&[2, 3, 1]);
        assert!(inverse_kl(&w, &w, &mut cache).unwrap().is_one());
    }

    #[test]
    fn inversion_identity_examples() {
        let mut cache = KLCache::new();
        let w = p(&[2, 4, 1, 3]);
        assert!(verify_inversion_identity(&w, &w, &mut cache).unwrap());
        let e4 = Permutation::identity(4).unwrap();
        let top = p(&[3, 4, 1, 2]);
        assert!(inversion_sum(&e4, &top, &mut cache).unwrap().is_zero());
        assert!(verify_inversion_identity(&e4, &top, &mut cache).unwrap());
        assert!(matches!(
            verify_inversion_identity(&top, &e4, &mut cache),
            Err(Error::NotBelow { .. })
        ));
    }

    #[test]
    fn delta_and_tilde_examples() {
        let e3 = Permutation::identity(3).unwrap();
        assert!(delta_set(&e3, &e3).unwrap().is_empty());
        assert_eq!(delta_set(&p(&[1, 2]), &p(&[2, 1])).unwrap(), vec![1, 2]);
        let x = p(&[1, 3, 2, 4, 5]);
        let w = p(&[3, 4, 1, 2, 5]);
        assert_eq!(delta_set(&x, &w).unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(
            tilde_reduce(&x, &w).unwrap(),
            (p(&[1, 3, 2, 4]), p(&[3, 4, 1, 2]))
        );
        let e1 = Permutation::identity(1).unwrap();
        assert_eq!(tilde_reduce(&e3, &e3).unwrap(), (e1.clone(), e1));
        assert!(delta_set(&e3, &p(&[1, 2])).is_err());
    }

    #[test]
    fn smooth_examples() {
        assert!(is_smooth_top(&Permutation::identity(6).unwrap()));
        assert!(!is_smooth_top(&p(&[3, 4, 1, 2])));
        assert!(!is_smooth_top(&p(&[4, 2, 3, 1])));
        assert!(is_smooth_top(&p(&[2, 1])));
    }

    #[test]
    fn descent_reduction_examples() {
        let mut cache = KLCache::new();
        assert!(descent_reduction_check(&p(&[1, 2]), &p(&[2, 1]), &mut cache).unwrap());
        let e4 = Permutation::identity(4).unwrap();
        let w = p(&[3, 4, 1, 2]);
        assert_eq!(w.descent_indicator(2).unwrap(), 1);
        assert_eq!(
            kl_polynomial(&e4.right_multiply_simple(2).unwrap(), &w, &mut cache).unwrap(),
            poly(&[1, 1])
        );
        assert!(descent_reduction_check(&e4, &w, &mut cache).unwrap());
    }

    #[test]
    fn strategies_agree_on_s5() {
        let mut large = KLCache::with_strategy(DescentStrategy::Largest);
        let mut small = KLCache::with_strategy(DescentStrategy::Smallest);
        let w0 = Permutation::longest_element(5).unwrap();
        for x in Permutation::all(5).unwrap() {
            for w in [&w0, &p(&[4, 5, 2, 3, 1]), &p(&[3, 4, 5, 1, 2])] {
                assert_eq!(
                    kl_polynomial(&x, w, &mut large).unwrap(),
                    kl_polynomial(&x, w, &mut small).unwrap()
                );
            }
        }
    }

    #[test]
    fn bounded_cache_still_correct() {
        let mut bounded = KLCache::new().with_max_entries(8);
        let mut free = KLCache::new();
        let w = p(&[4, 5, 2, 3, 1]);
        for x in Permutation::all(5).unwrap() {
            assert_eq!(
                kl_polynomial(&x, &w, &mut bounded).unwrap(),
                kl_polynomial(&x, &w, &mut free).unwrap()
            );
        }
        assert!(bounded.stats().evictions > 0);
        assert!(bounded.stats().entries <= 8 || bounded.stats().columns == 1);
    }

    #[test]
    fn cache_counts_hits() {
        let mut cache = KLCache::new();
        let x = Permutation::identity(4).unwrap();
        let w = p(&[3, 4, 1, 2]);
        kl_polynomial(&x, &w, &mut cache).unwrap();
        kl_polynomial(&x, &w, &mut cache).unwrap();
        let s = cache.stats();
        assert_eq!((s.hits, s.misses), (1, 1));
        assert!(s.entries >= 14);
        cache.clear();
        assert_eq!(cache.stats().entries, 0);
    }

    #[test]
    fn lower_polynomials_of_longest_are_all_one() {
        let mut cache = KLCache::new();
        let w0 = Permutation::longest_element(5).unwrap();
        let col = cache.lower_polynomials(&w0).unwrap();
        assert_eq!(col.len(), 120);
        assert!(col.iter().all(|(_, p)| p.is_one()));
    }
}
