//! The four permutation families `x_{k,m}`, `w_{k,m}`, `y_{k,m}`, `v_{k,m}`,
//! the closed forms of their KL and inverse KL polynomials, and exact
//! evaluators for the two binomial identities behind the inverse formulas.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bruhat::{bruhat_leq, interval};
use crate::error::{Error, Result};
use crate::klcore::{inverse_kl, kl_polynomial, KLCache};
use crate::perm::{Permutation, MAX_SIZE};
use crate::poly::IntPolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    X,
    W,
    Y,
    V,
}

impl FamilyKind {
    fn letter(self) -> char {
        match self {
            Self::X => 'x',
            Self::W => 'w',
            Self::Y => 'y',
            Self::V => 'v',
        }
    }

    /// The pair this kind belongs to.
    pub fn pair(self) -> PairKind {
        match self {
            Self::X | Self::W => PairKind::Xw,
            Self::Y | Self::V => PairKind::Yv,
        }
    }
}

/// `(x_{k,m}, w_{k,m})` or `(y_{k,m}, v_{k,m})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairKind {
    Xw,
    Yv,
}

impl PairKind {
    pub fn bottom_kind(self) -> FamilyKind {
        match self {
            Self::Xw => FamilyKind::X,
            Self::Yv => FamilyKind::Y,
        }
    }

    pub fn top_kind(self) -> FamilyKind {
        match self {
            Self::Xw => FamilyKind::W,
            Self::Yv => FamilyKind::V,
        }
    }

    /// Size of the permutations for parameters `(k, m)`.
    pub fn size(self, k: usize, m: usize) -> usize {
        match self {
            Self::Xw => k + m,
            Self::Yv => k + m + 2,
        }
    }

    /// The bottom and top permutations for `(k, m)`.
    pub fn members(self, k: usize, m: usize) -> Result<(Permutation, Permutation)> {
        Ok((
            make_family(FamilySpec::new(self.bottom_kind(), k, m)?)?,
            make_family(FamilySpec::new(self.top_kind(), k, m)?)?,
        ))
    }

    /// All `(k, m)` with `k, m ≥ 1` whose permutations have size at most `max_n`,
    /// ordered by `(k, m)`.
    pub fn parameters_up_to(self, max_n: usize) -> Vec<(usize, usize)> {
        (1..=max_n)
            .flat_map(|k| (1..=max_n).map(move |m| (k, m)))
            .filter(|&(k, m)| self.size(k, m) <= max_n)
            .collect()
    }
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Xw => "x/w",
            Self::Yv => "y/v",
        })
    }
}

/// Family kind with parameters `k, m ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilySpec {
    kind: FamilyKind,
    k: usize,
    m: usize,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, k: usize, m: usize) -> Result<Self> {
        if k == 0 || m == 0 {
            return Err(Error::InvalidFamily(format!(
                "k and m must be at least 1, got k={k}, m={m}"
            )));
        }
        let spec = Self { kind, k, m };
        if spec.size() > MAX_SIZE {
            return Err(Error::TooLarge(spec.size()));
        }
        Ok(spec)
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn size(&self) -> usize {
        self.kind.pair().size(self.k, self.m)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{},{}", self.kind.letter(), self.k, self.m)
    }
}

/// Parses `"x:2,3"`, `"w:2,3"`, `"y:1,4"`, `"v:1,4"`.
impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Parse {
            what: "family spec",
            input: s.to_string(),
        };
        let (kind, params) = s.trim().split_once(':').ok_or_else(err)?;
        let kind = match kind.trim().to_ascii_lowercase().as_str() {
            "x" => FamilyKind::X,
            "w" => FamilyKind::W,
            "y" => FamilyKind::Y,
            "v" => FamilyKind::V,
            _ => return Err(err()),
        };
        let (k, m) = params.split_once(',').ok_or_else(err)?;
        let k = k.trim().parse().map_err(|_| err())?;
        let m = m.trim().parse().map_err(|_| err())?;
        Self::new(kind, k, m)
    }
}

fn desc(hi: usize, lo: usize) -> impl Iterator<Item = usize> {
    (lo..=hi).rev()
}

fn family_entries(kind: FamilyKind, k: usize, m: usize) -> Vec<usize> {
    match kind {
        // [k,…,1, k+m,…,k+1]
        FamilyKind::X => desc(k, 1).chain(desc(k + m, k + 1)).collect(),
        // [k+m, k,…,2, k+m−1,…,k+1, 1]
        FamilyKind::W => std::iter::once(k + m)
            .chain(desc(k, 2))
            .chain(desc(k + m - 1, k + 1))
            .chain(std::iter::once(1))
            .collect(),
        // [k,…,1, k+2, k+1, k+m+2,…,k+3]
        FamilyKind::Y => desc(k, 1)
            .chain([k + 2, k + 1])
            .chain(desc(k + m + 2, k + 3))
            .collect(),
        // [k+2, k,…,2, k+m+2, 1, k+m+1,…,k+3, k+1]
        FamilyKind::V => std::iter::once(k + 2)
            .chain(desc(k, 2))
            .chain([k + m + 2, 1])
            .chain(desc(k + m + 1, k + 3))
            .chain(std::iter::once(k + 1))
            .collect(),
    }
}

pub fn make_family(spec: FamilySpec) -> Result<Permutation> {
    let entries: Vec<i64> = family_entries(spec.kind, spec.k, spec.m)
        .into_iter()
        .map(|v| v as i64)
        .collect();
    Permutation::from_oneline(&entries)
}

/// `binom(n, d)` with `binom(n, d) = 0` for `d > n`.
pub fn binomial(n: usize, d: usize) -> i64 {
    if d > n {
        return 0;
    }
    // Pascal's rule, one row at a time
    let mut row = vec![0i64; d + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=d.min(i)).rev() {
            row[j] = row[j].checked_add(row[j - 1]).expect("binomial overflow");
        }
    }
    row[d]
}

fn check_params(k: usize, m: usize) -> Result<()> {
    if k == 0 || m == 0 {
        return Err(Error::InvalidFamily(format!(
            "k and m must be at least 1, got k={k}, m={m}"
        )));
    }
    Ok(())
}

fn sign(e: usize) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `P_{x_{k,m},w_{k,m}} = 1 + q + ⋯ + q^{min(k−1,m−1)}` and `P_{y_{k,m},v_{k,m}} = 1 + q`.
pub fn closed_form_regular(pair: PairKind, k: usize, m: usize) -> Result<IntPolynomial> {
    check_params(k, m)?;
    Ok(match pair {
        PairKind::Xw => IntPolynomial::from_coeffs(vec![1; k.min(m)]),
        PairKind::Yv => IntPolynomial::from_coeffs(vec![1, 1]),
    })
}

/// `P_{w₀w_{k,m},w₀x_{k,m}} = Σ_r binom(k−1,r) binom(m−1,r) q^r` and
/// `P_{w₀v_{k,m},w₀y_{k,m}} = 1 + (k+m−1)q`.
pub fn closed_form_inverse(pair: PairKind, k: usize, m: usize) -> Result<IntPolynomial> {
    check_params(k, m)?;
    Ok(match pair {
        PairKind::Xw => IntPolynomial::from_coeffs(
            (0..k.min(m))
                .map(|r| binomial(k - 1, r) * binomial(m - 1, r))
                .collect(),
        ),
        PairKind::Yv => IntPolynomial::from_coeffs(vec![1, (k + m - 1) as i64]),
    })
}

/// `binom(k,a) binom(m,b) [(−1)^{a+b+1}(1 + (k+m−a−b−1)q) + 2(−1)^{a+b}]`.
pub fn f_km(k: usize, m: usize, a: usize, b: usize) -> Result<IntPolynomial> {
    if a > k || b > m {
        return Err(Error::OutOfRange(format!(
            "need 0 <= a <= k and 0 <= b <= m, got k={k}, m={m}, a={a}, b={b}"
        )));
    }
    let c = binomial(k, a) * binomial(m, b);
    let s = sign(a + b);
    let linear = (k + m) as i64 - (a + b) as i64 - 1;
    // −s(1 + linear·q) + 2s
    Ok(IntPolynomial::from_coeffs(vec![c * s, -c * s * linear]))
}

/// Both sides of a finite identity and whether they agree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub lhs: IntPolynomial,
    pub rhs: IntPolynomial,
    pub equal: bool,
}

impl IdentityCheck {
    fn new(lhs: IntPolynomial, rhs: IntPolynomial) -> Self {
        let equal = lhs == rhs;
        Self { lhs, rhs, equal }
    }
}

/// The first binomial identity:
///
/// `Σ_{a<k, b<m} (−1)^{a+b+1} binom(k,a) binom(m,b) Σ_r binom(k−a−1,r) binom(m−b−1,r) q^r
///   = (−1)^{k+m+1} Σ_{r ≤ min(k−1,m−1)} q^r`.
pub fn lemma_tech1_check(k: usize, m: usize) -> Result<IdentityCheck> {
    check_params(k, m)?;
    let mut lhs = IntPolynomial::zero();
    for a in 0..k {
        for b in 0..m {
            let outer = sign(a + b + 1) * binomial(k, a) * binomial(m, b);
            let inner = closed_form_inverse(PairKind::Xw, k - a, m - b)?;
            lhs.add_scaled_shifted(&inner, outer, 0)?;
        }
    }
    let rhs = IntPolynomial::from_coeffs(vec![sign(k + m + 1); k.min(m)]);
    Ok(IdentityCheck::new(lhs, rhs))
}

/// The second binomial identity, `Σ_{a<k} Σ_{b<m} f_{k,m}(a,b) = (−1)^{k+m}(1+q)`.
///
/// Direct evaluation shows the two sides differ whenever `k = 1` or `m = 1`;
/// the result reports that rather than asserting equality.
pub fn lemma_tech2_check(k: usize, m: usize) -> Result<IdentityCheck> {
    check_params(k, m)?;
    let mut lhs = IntPolynomial::zero();
    for a in 0..k {
        for b in 0..m {
            lhs.add_scaled_shifted(&f_km(k, m, a, b)?, 1, 0)?;
        }
    }
    let s = sign(k + m);
    Ok(IdentityCheck::new(
        lhs,
        IntPolynomial::from_coeffs(vec![s, s]),
    ))
}

/// Rebuilds `P_{w₀w,w₀x}` from
/// `(−1)^{l(x)+l(w)+1} P_{x,w} + Σ_{x<z<w} (−1)^{l(z)+l(w)+1} P_{w₀z,w₀x}`,
/// valid when `P_{z,w} = 1` for every `x < z ≤ w`. The precondition is checked.
pub fn reconstruct_inverse(
    x: &Permutation,
    w: &Permutation,
    cache: &mut KLCache,
) -> Result<IntPolynomial> {
    if !bruhat_leq(x, w)? {
        return Err(Error::NotBelow {
            x: x.to_string(),
            w: w.to_string(),
        });
    }
    if x == w {
        return Ok(IntPolynomial::one());
    }
    let iv = interval(x, w)?;
    for z in iv.iter().filter(|z| *z != x) {
        let pzw = kl_polynomial(z, w, cache)?;
        if !pzw.is_one() {
            return Err(Error::Precondition(format!(
                "P_{{z,w}} = {pzw} is not 1 for z = {z} strictly above x = {x}"
            )));
        }
    }
    let lw = w.length();
    let mut acc = IntPolynomial::zero();
    acc.add_scaled_shifted(&kl_polynomial(x, w, cache)?, sign(x.length() + lw + 1), 0)?;
    for z in iv.interior() {
        acc.add_scaled_shifted(&inverse_kl(x, z, cache)?, sign(z.length() + lw + 1), 0)?;
    }
    Ok(acc)
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

    fn fam(kind: FamilyKind, k: usize, m: usize) -> Permutation {
        make_family(FamilySpec::new(kind, k, m).unwrap()).unwrap()
    }

    #[test]
    fn constructor_examples() {
        assert_eq!(fam(FamilyKind::X, 2, 2), p(&[2, 1, 4, 3]));
        assert_eq!(fam(FamilyKind::W, 2, 2), p(&[4, 2, 3, 1]));
        assert_eq!(fam(FamilyKind::Y, 1, 1), p(&[1, 3, 2, 4]));
        assert_eq!(fam(FamilyKind::V, 1, 1), p(&[3, 4, 1, 2]));
        assert_eq!(fam(FamilyKind::X, 1, 1), p(&[1, 2]));
        assert_eq!(fam(FamilyKind::W, 1, 1), p(&[2, 1]));
        assert_eq!(fam(FamilyKind::X, 2, 3), p(&[2, 1, 5, 4, 3]));
        assert_eq!(fam(FamilyKind::W, 2, 3), p(&[5, 2, 4, 3, 1]));
        assert!(FamilySpec::new(FamilyKind::X, 0, 2).is_err());
        assert!(FamilySpec::new(FamilyKind::V, 8, 8).is_err());
    }

    #[test]
    fn sizes_and_lengths() {
        for k in 1..=8 {
            for m in 1..=8 {
                let (x, w) = (fam(FamilyKind::X, k, m), fam(FamilyKind::W, k, m));
                assert_eq!(x.size(), k + m);
                assert_eq!(w.length() - x.length(), k + m - 1);
                if k + m + 2 <= MAX_SIZE {
                    let (y, v) = (fam(FamilyKind::Y, k, m), fam(FamilyKind::V, k, m));
                    assert_eq!(y.size(), k + m + 2);
                    assert_eq!(v.length() - y.length(), k + m + 1);
                }
            }
        }
    }

    #[test]
    fn spec_parsing() {
        let s: FamilySpec = "x:2,3".parse().unwrap();
        assert_eq!((s.kind(), s.k(), s.m()), (FamilyKind::X, 2, 3));
        assert_eq!(s.to_string(), "x:2,3");
        assert_eq!("V:1,4".parse::<FamilySpec>().unwrap().kind(), FamilyKind::V);
        assert!("z:1,1".parse::<FamilySpec>().is_err());
        assert!("x:1".parse::<FamilySpec>().is_err());
        assert!("x:0,1".parse::<FamilySpec>().is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(binomial(20, 10), 184_756);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(
            closed_form_regular(PairKind::Xw, 3, 2).unwrap(),
            poly(&[1, 1])
        );
        assert_eq!(
            closed_form_regular(PairKind::Yv, 4, 7).unwrap(),
            poly(&[1, 1])
        );
        assert_eq!(closed_form_regular(PairKind::Xw, 1, 5).unwrap(), poly(&[1]));
        assert_eq!(
            closed_form_inverse(PairKind::Xw, 2, 3).unwrap(),
            poly(&[1, 2])
        );
        assert_eq!(
            closed_form_inverse(PairKind::Xw, 3, 3).unwrap(),
            poly(&[1, 4, 1])
        );
        assert_eq!(
            closed_form_inverse(PairKind::Yv, 2, 1).unwrap(),
            poly(&[1, 2])
        );
        assert!(closed_form_inverse(PairKind::Xw, 0, 3).is_err());
    }

    #[test]
    fn f_km_examples() {
        assert_eq!(f_km(1, 1, 1, 1).unwrap(), poly(&[1, 1]));
        assert_eq!(f_km(1, 1, 0, 0).unwrap(), poly(&[1, -1]));
        assert_eq!(f_km(2, 2, 1, 1).unwrap(), poly(&[4, -4]));
        assert!(f_km(1, 1, 2, 0).is_err());
    }

    #[test]
    fn lemma_examples() {
        let c = lemma_tech1_check(1, 1).unwrap();
        assert_eq!((c.lhs.clone(), c.equal), (poly(&[-1]), true));
        let c = lemma_tech1_check(2, 1).unwrap();
        assert_eq!((c.lhs.clone(), c.equal), (poly(&[1]), true));
        assert!(lemma_tech1_check(4, 4).unwrap().equal);

        let c = lemma_tech2_check(2, 2).unwrap();
        assert_eq!(c.lhs, poly(&[1, 1]));
        assert!(c.equal);
        let c = lemma_tech2_check(1, 1).unwrap();
        assert_eq!(
            (c.lhs.clone(), c.rhs.clone()),
            (poly(&[1, -1]), poly(&[1, 1]))
        );
        assert!(!c.equal);
        assert!(lemma_tech2_check(3, 2).unwrap().equal);
        assert!(lemma_tech2_check(0, 2).is_err());
    }

    #[test]
    fn reconstruct_inverse_examples() {
        let mut cache = KLCache::new();
        let (x, w) = PairKind::Xw.members(2, 2).unwrap();
        let r = reconstruct_inverse(&x, &w, &mut cache).unwrap();
        assert_eq!(r, poly(&[1, 1]));
        assert_eq!(r, inverse_kl(&x, &w, &mut cache).unwrap());
        let (y, v) = PairKind::Yv.members(1, 1).unwrap();
        assert_eq!(
            reconstruct_inverse(&y, &v, &mut cache).unwrap(),
            poly(&[1, 1])
        );
        assert!(reconstruct_inverse(&w, &w, &mut cache).unwrap().is_one());
        // P_{z,w} fails to be 1 at z = 1324 < 3412 for x = e
        let e = Permutation::identity(4).unwrap();
        assert!(matches!(
            reconstruct_inverse(&e, &v, &mut cache),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            reconstruct_inverse(&w, &x, &mut cache),
            Err(Error::NotBelow { .. })
        ));
    }

    #[test]
    fn family_pairs_are_comparable() {
        for k in 1..=6 {
            for m in 1..=6 {
                let (x, w) = PairKind::Xw.members(k, m).unwrap();
                assert!(bruhat_leq(&x, &w).unwrap());
                let (y, v) = PairKind::Yv.members(k, m).unwrap();
                assert!(bruhat_leq(&y, &v).unwrap());
            }
        }
    }

    #[test]
    fn w_is_smooth_on_the_boundary() {
        use crate::klcore::is_smooth_top;
        for k in 1..=8 {
            for m in 1..=8 {
                if k + m > 9 {
                    continue;
                }
                let w = fam(FamilyKind::W, k, m);
                assert_eq!(is_smooth_top(&w), k == 1 || m == 1, "w_{{{k},{m}}} = {w}");
            }
        }
    }

    #[test]
    fn degenerate_parameters_reduce_to_first_family() {
        let as_perm = |v: Vec<usize>| {
            Permutation::from_oneline(&v.into_iter().map(|a| a as i64).collect::<Vec<_>>())
        };
        for m in 1..=6 {
            // the y display with k = 0 reads [2, 1, m+2, …, 3]
            assert_eq!(
                as_perm(family_entries(FamilyKind::Y, 0, m)).unwrap(),
                fam(FamilyKind::X, 2, m)
            );
            assert_eq!(
                as_perm(family_entries(FamilyKind::Y, m, 0)).unwrap(),
                fam(FamilyKind::X, m, 2)
            );
            // the v display does not survive the substitution, so v_{0,m} is
            // w_{2,m} by definition; both closed forms then agree
            assert!(as_perm(family_entries(FamilyKind::V, 0, m)).is_err());
            assert_eq!(
                IntPolynomial::from_coeffs(vec![1, m as i64 - 1]),
                closed_form_inverse(PairKind::Xw, 2, m).unwrap()
            );
            assert_eq!(
                IntPolynomial::from_coeffs(vec![1, m as i64 - 1]),
                closed_form_inverse(PairKind::Xw, m, 2).unwrap()
            );
        }
    }

    #[test]
    fn closed_forms_have_unit_constant_term() {
        for k in 1..=8 {
            for m in 1..=8 {
                for pair in [PairKind::Xw, PairKind::Yv] {
                    assert_eq!(closed_form_regular(pair, k, m).unwrap().coeff(0), 1);
                    assert_eq!(closed_form_inverse(pair, k, m).unwrap().coeff(0), 1);
                }
            }
        }
    }

    #[test]
    fn parameter_enumeration() {
        assert_eq!(PairKind::Xw.parameters_up_to(2), vec![(1, 1)]);
        assert_eq!(PairKind::Xw.parameters_up_to(7).len(), 21);
        assert_eq!(PairKind::Yv.parameters_up_to(7).len(), 10);
        assert!(PairKind::Yv.parameters_up_to(3).is_empty());
    }
}
