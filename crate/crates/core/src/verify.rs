//! Batch checks of the closed forms and identities against the KL recursion.
//!
//! Every check returns a [`VerificationReport`]; mathematical disagreements are
//! recorded as failures instead of being returned as errors.

use std::fmt;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bruhat::{bruhat_leq, coatom_count};
use crate::error::Result;
use crate::families::{
    closed_form_inverse, closed_form_regular, lemma_tech1_check, lemma_tech2_check, PairKind,
};
use crate::klcore::{
    all_lower_polynomials_trivial, inverse_kl, is_smooth_top, kl_polynomial, tilde_reduce,
    verify_inversion_identity, DescentStrategy, KLCache,
};
use crate::perm::Permutation;

/// Environment variable capping worker threads (unset or 0: sequential).
pub const THREADS_ENV: &str = "KL_ENGINE_THREADS";

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// One disagreement, with both sides kept verbatim.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Failure {
    pub input: String,
    pub expected: String,
    pub actual: String,
}

impl Failure {
    fn new(
        input: impl Into<String>,
        expected: impl fmt::Display,
        actual: impl fmt::Display,
    ) -> Self {
        Self {
            input: input.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub range: String,
    pub cases: usize,
    pub failures: Vec<Failure>,
    pub seed: Option<u64>,
    pub millis: u128,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let seed = self.seed.map_or_else(|| "-".to_string(), |s| s.to_string());
        writeln!(f, "{:<10} {}", "check", self.check)?;
        writeln!(f, "{:<10} {}", "range", self.range)?;
        writeln!(f, "{:<10} {}", "cases", self.cases)?;
        writeln!(f, "{:<10} {}", "failures", self.failures.len())?;
        writeln!(f, "{:<10} {}", "seed", seed)?;
        writeln!(f, "{:<10} {}", "millis", self.millis)?;
        for note in &self.notes {
            writeln!(f, "{:<10} {}", "note", note)?;
        }
        for fail in &self.failures {
            writeln!(
                f,
                "  FAIL {}: expected {}, got {}",
                fail.input, fail.expected, fail.actual
            )?;
        }
        write!(
            f,
            "{:<10} {}",
            "status",
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Shared knobs for the sampled and parallel checks.
#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Upper bound on cases for checks that would otherwise run more.
    pub case_cap: Option<usize>,
    /// Worker threads; 0 or 1 runs on the caller's cache.
    pub threads: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            case_cap: None,
            threads: 0,
        }
    }
}

impl VerifyOptions {
    /// Defaults, with `threads` read from [`THREADS_ENV`].
    pub fn from_env() -> Self {
        Self {
            threads: threads_from_env(),
            ..Self::default()
        }
    }
}

pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

struct ReportBuilder {
    check: String,
    range: String,
    seed: Option<u64>,
    start: Instant,
    cases: usize,
    failures: Vec<Failure>,
    notes: Vec<String>,
}

impl ReportBuilder {
    fn new(check: &str, range: String) -> Self {
        Self {
            check: check.to_string(),
            range,
            seed: None,
            start: Instant::now(),
            cases: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn record(&mut self, outcome: Result<Option<Failure>>, input: impl FnOnce() -> String) {
        self.cases += 1;
        match outcome {
            Ok(None) => {}
            Ok(Some(f)) => self.failures.push(f),
            Err(e) => self
                .failures
                .push(Failure::new(input(), "a value", format!("error: {e}"))),
        }
    }

    fn finish(mut self) -> VerificationReport {
        self.failures.sort();
        VerificationReport {
            check: self.check,
            range: self.range,
            cases: self.cases,
            failures: self.failures,
            seed: self.seed,
            millis: self.start.elapsed().as_millis(),
            notes: self.notes,
        }
    }
}

/// Runs `check` over `cases`, on `cache` when sequential and on fresh per-thread
/// caches otherwise.
fn run_cases<T, F>(
    cases: &[T],
    cache: &mut KLCache,
    threads: usize,
    label: impl Fn(&T) -> String + Sync,
    check: F,
    report: &mut ReportBuilder,
) where
    T: Sync,
    F: Fn(&T, &mut KLCache) -> Result<Option<Failure>> + Sync,
{
    if threads <= 1 || cases.len() < 2 {
        for c in cases {
            report.record(check(c, cache), || label(c));
        }
        return;
    }
    let chunk = cases.len().div_ceil(threads);
    let template = cache.fresh();
    let outcomes: Vec<(usize, Vec<Option<Failure>>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = cases
            .chunks(chunk)
            .map(|part| {
                let mut local = template.fresh();
                let check = &check;
                let label = &label;
                scope.spawn(move || {
                    let fails = part
                        .iter()
                        .map(|c| match check(c, &mut local) {
                            Ok(f) => f,
                            Err(e) => {
                                Some(Failure::new(label(c), "a value", format!("error: {e}")))
                            }
                        })
                        .collect::<Vec<_>>();
                    (part.len(), fails)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verification worker panicked"))
            .collect()
    });
    for (count, fails) in outcomes {
        report.cases += count;
        report.failures.extend(fails.into_iter().flatten());
    }
}

fn compare<T: PartialEq + fmt::Display>(input: String, expected: T, actual: T) -> Option<Failure> {
    (expected != actual).then(|| Failure::new(input, expected, actual))
}

/// `P_{x,w}` for both family pairs against the closed forms, plus `P_{z,top} = 1`
/// for every `z` strictly above the bottom element.
pub fn verify_theorem_regular(max_n: usize, cache: &mut KLCache) -> VerificationReport {
    let mut report = ReportBuilder::new("regular", format!("family size <= {max_n}"));
    for pair in [PairKind::Xw, PairKind::Yv] {
        for (k, m) in pair.parameters_up_to(max_n) {
            let input = || format!("{pair} k={k} m={m}");
            let outcome = (|| -> Result<Option<Failure>> {
                let (bottom, top) = pair.members(k, m)?;
                let expected = closed_form_regular(pair, k, m)?;
                let actual = kl_polynomial(&bottom, &top, cache)?;
                if let Some(f) = compare(input(), expected, actual) {
                    return Ok(Some(f));
                }
                for (z, pz) in cache.lower_polynomials(&top)? {
                    if z != bottom && bruhat_leq(&bottom, &z)? && !pz.is_one() {
                        return Ok(Some(Failure::new(
                            format!("{} interior z={z}", input()),
                            "1",
                            pz,
                        )));
                    }
                }
                Ok(None)
            })();
            report.record(outcome, input);
        }
    }
    report.finish()
}

/// Inverse KL polynomials of both family pairs against the closed forms.
pub fn verify_theorem_inverse(max_n: usize, cache: &mut KLCache) -> VerificationReport {
    let mut report = ReportBuilder::new("inverse", format!("family size <= {max_n}"));
    for pair in [PairKind::Xw, PairKind::Yv] {
        for (k, m) in pair.parameters_up_to(max_n) {
            let input = || format!("{pair} k={k} m={m}");
            let outcome = (|| -> Result<Option<Failure>> {
                let (bottom, top) = pair.members(k, m)?;
                let expected = closed_form_inverse(pair, k, m)?;
                let actual = inverse_kl(&bottom, &top, cache)?;
                Ok(compare(input(), expected, actual))
            })();
            report.record(outcome, input);
        }
    }
    report.finish()
}

fn comparable_pairs(n: usize) -> Result<Vec<(Permutation, Permutation)>> {
    let all: Vec<Permutation> = Permutation::all(n)?.collect();
    let mut pairs = Vec::new();
    for x in &all {
        for w in &all {
            if bruhat_leq(x, w)? {
                pairs.push((x.clone(), w.clone()));
            }
        }
    }
    Ok(pairs)
}

/// `count` pairs `x ≤ w` drawn uniformly from `S_n × S_n` with rejection.
pub fn sample_comparable_pairs(
    n: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<(Permutation, Permutation)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = Permutation::random(n, &mut rng)?;
        let w = Permutation::random(n, &mut rng)?;
        if bruhat_leq(&x, &w)? {
            out.push((x, w));
        }
    }
    Ok(out)
}

fn pair_label((x, w): &(Permutation, Permutation)) -> String {
    format!("x={x} w={w}")
}

fn inversion_case(
    (x, w): &(Permutation, Permutation),
    cache: &mut KLCache,
) -> Result<Option<Failure>> {
    Ok((!verify_inversion_identity(x, w, cache)?).then(|| {
        Failure::new(
            pair_label(&(x.clone(), w.clone())),
            if x == w { "1" } else { "0" },
            "nonzero alternating sum",
        )
    }))
}

/// The inversion identity over every comparable pair of `S_n` (`n ≤ 5`), or over
/// seeded samples for larger `n` (`case_cap`, default 500).
pub fn verify_inversion_exhaustive(
    n: usize,
    cache: &mut KLCache,
    opts: &VerifyOptions,
) -> VerificationReport {
    if n > 5 {
        return verify_inversion_sampled(n, opts.case_cap.unwrap_or(500), cache, opts);
    }
    let mut report = ReportBuilder::new("inversion", format!("all x <= w in S_{n}"));
    match comparable_pairs(n) {
        Ok(mut pairs) => {
            if let Some(cap) = opts.case_cap {
                pairs.truncate(cap);
            }
            run_cases(
                &pairs,
                cache,
                opts.threads,
                pair_label,
                inversion_case,
                &mut report,
            );
        }
        Err(e) => report.record(Err(e), || format!("S_{n}")),
    }
    report.finish()
}

/// The inversion identity on `samples` seeded comparable pairs of `S_n`.
pub fn verify_inversion_sampled(
    n: usize,
    samples: usize,
    cache: &mut KLCache,
    opts: &VerifyOptions,
) -> VerificationReport {
    let mut report = ReportBuilder::new("inversion", format!("{samples} sampled x <= w in S_{n}"))
        .seed(opts.seed);
    match sample_comparable_pairs(n, samples, opts.seed) {
        Ok(pairs) => run_cases(
            &pairs,
            cache,
            opts.threads,
            pair_label,
            inversion_case,
            &mut report,
        ),
        Err(e) => report.record(Err(e), || format!("S_{n}")),
    }
    report.finish()
}

/// For every `w ∈ S_n`: pattern avoidance of 3412 and 4231 agrees with
/// `P_{x,w} = 1` for all `x ≤ w`.
pub fn verify_smoothness_equivalence(
    n: usize,
    cache: &mut KLCache,
    opts: &VerifyOptions,
) -> VerificationReport {
    let mut report = ReportBuilder::new("smoothness", format!("all w in S_{n}"));
    let tops: Vec<Permutation> = match Permutation::all(n) {
        Ok(it) => it.collect(),
        Err(e) => {
            report.record(Err(e), || format!("S_{n}"));
            return report.finish();
        }
    };
    let singular = tops.iter().filter(|w| !is_smooth_top(w)).count();
    run_cases(
        &tops,
        cache,
        opts.threads,
        |w| format!("w={w}"),
        |w, cache| {
            let by_pattern = is_smooth_top(w);
            let by_kl = all_lower_polynomials_trivial(w, cache)?;
            Ok(compare(format!("w={w}"), by_pattern, by_kl))
        },
        &mut report,
    );
    report
        .notes
        .push(format!("non-smooth tops by pattern: {singular}"));
    report.finish()
}

/// `[q]` of the inverse closed form for `(x_{k,k}, w_{k,k})` equals `(k−1)²` and
/// is at most `c − 1`, where `c` counts coatoms of `[w₀w_{k,k}, w₀x_{k,k}]`.
pub fn verify_brenti_bound(k_max: usize, cache: &mut KLCache) -> VerificationReport {
    let mut report = ReportBuilder::new("brenti", format!("2 <= k <= {k_max}"));
    for k in 2..=k_max {
        let input = || format!("k={k}");
        let mut note = None;
        let outcome = (|| -> Result<Option<Failure>> {
            let (x, w) = PairKind::Xw.members(k, k)?;
            let coefficient = closed_form_inverse(PairKind::Xw, k, k)?.coeff(1);
            let square = ((k - 1) * (k - 1)) as i64;
            if coefficient != square {
                return Ok(Some(Failure::new(input(), square, coefficient)));
            }
            // the recursion is cheap enough to cross-check up to S_7
            if 2 * k <= 7 {
                let computed = inverse_kl(&x, &w, cache)?.coeff(1);
                if computed != coefficient {
                    return Ok(Some(Failure::new(
                        format!("{} recursion", input()),
                        coefficient,
                        computed,
                    )));
                }
            }
            let coatoms = coatom_count(&w.complement_values(), &x.complement_values())?;
            note = Some(format!(
                "k={k}: [q]={coefficient}, coatoms={coatoms}, ratio={:.4}",
                coefficient as f64 / coatoms as f64
            ));
            Ok((coefficient > coatoms as i64 - 1).then(|| {
                Failure::new(
                    input(),
                    format!("[q] <= {}", coatoms as i64 - 1),
                    coefficient,
                )
            }))
        })();
        report.record(outcome, input);
        report.notes.extend(note);
    }
    report.finish()
}

/// `P_{x̃,w̃} = P_{x,w}` on seeded comparable pairs of `S_n`.
pub fn verify_flattening(
    n: usize,
    samples: usize,
    cache: &mut KLCache,
    opts: &VerifyOptions,
) -> VerificationReport {
    let mut report = ReportBuilder::new("flattening", format!("{samples} sampled x <= w in S_{n}"))
        .seed(opts.seed);
    match sample_comparable_pairs(n, samples, opts.seed) {
        Ok(pairs) => run_cases(
            &pairs,
            cache,
            opts.threads,
            pair_label,
            |pair, cache| {
                let (x, w) = pair;
                let (xt, wt) = tilde_reduce(x, w)?;
                let full = kl_polynomial(x, w, cache)?;
                let reduced = kl_polynomial(&xt, &wt, cache)?;
                Ok(compare(
                    format!("{} reduced to x~={xt} w~={wt}", pair_label(pair)),
                    full,
                    reduced,
                ))
            },
            &mut report,
        ),
        Err(e) => report.record(Err(e), || format!("S_{n}")),
    }
    report.finish()
}

/// Largest-descent and smallest-descent recursions agree on seeded pairs.
/// Each strategy gets its own cache so neither reads the other's results.
pub fn verify_descent_choice(n: usize, samples: usize, opts: &VerifyOptions) -> VerificationReport {
    let mut report = ReportBuilder::new(
        "descent-choice",
        format!("{samples} sampled x <= w in S_{n}"),
    )
    .seed(opts.seed);
    let mut largest = KLCache::with_strategy(DescentStrategy::Largest);
    let mut smallest = KLCache::with_strategy(DescentStrategy::Smallest);
    match sample_comparable_pairs(n, samples, opts.seed) {
        Ok(pairs) => {
            for pair in &pairs {
                let outcome = (|| -> Result<Option<Failure>> {
                    let a = kl_polynomial(&pair.0, &pair.1, &mut largest)?;
                    let b = kl_polynomial(&pair.0, &pair.1, &mut smallest)?;
                    Ok(compare(pair_label(pair), a, b))
                })();
                report.record(outcome, || pair_label(pair));
            }
        }
        Err(e) => report.record(Err(e), || format!("S_{n}")),
    }
    report.finish()
}

/// First binomial identity for all `1 ≤ k, m ≤ k_max`.
pub fn verify_lemma_tech1(k_max: usize) -> VerificationReport {
    let mut report = ReportBuilder::new("lemma1", format!("1 <= k,m <= {k_max}"));
    for k in 1..=k_max {
        for m in 1..=k_max {
            let input = || format!("k={k} m={m}");
            let outcome = lemma_tech1_check(k, m).map(|c| compare(input(), c.rhs, c.lhs));
            report.record(outcome, input);
        }
    }
    report.finish()
}

/// Second binomial identity for `k_min ≤ k, m ≤ k_max`. Parameters with `k = 1`
/// or `m = 1` are evaluated separately and listed as notes when the sides differ.
pub fn verify_lemma_tech2(k_min: usize, k_max: usize) -> VerificationReport {
    let lo = k_min.max(1);
    let mut report = ReportBuilder::new("lemma2", format!("{lo} <= k,m <= {k_max}"));
    for k in lo..=k_max {
        for m in lo..=k_max {
            let input = || format!("k={k} m={m}");
            let outcome = lemma_tech2_check(k, m).map(|c| compare(input(), c.rhs, c.lhs));
            report.record(outcome, input);
        }
    }
    if lo > 1 {
        for k in 1..=k_max {
            for m in 1..=k_max {
                if k != 1 && m != 1 {
                    continue;
                }
                if let Ok(c) = lemma_tech2_check(k, m) {
                    if !c.equal {
                        report
                            .notes
                            .push(format!("k={k} m={m}: lhs {} != rhs {}", c.lhs, c.rhs));
                    }
                }
            }
        }
    }
    report.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_small_ranges() {
        let mut cache = KLCache::new();
        let r = verify_theorem_regular(2, &mut cache);
        assert!(r.passed());
        assert_eq!(r.cases, 1);
        let r = verify_theorem_regular(4, &mut cache);
        assert!(r.passed(), "{r}");
        assert_eq!(r.cases, 6 + 1);
    }

    #[test]
    fn inverse_small_range() {
        let mut cache = KLCache::new();
        let r = verify_theorem_inverse(5, &mut cache);
        assert!(r.passed(), "{r}");
        assert_eq!(r.cases, 10 + 3);
    }

    #[test]
    fn inversion_counts_comparable_pairs() {
        let mut cache = KLCache::new();
        let opts = VerifyOptions::default();
        assert_eq!(verify_inversion_exhaustive(2, &mut cache, &opts).cases, 3);
        let r = verify_inversion_exhaustive(3, &mut cache, &opts);
        assert!(r.passed());
        assert_eq!(r.cases, 19);
    }

    #[test]
    fn parallel_matches_sequential() {
        let mut cache = KLCache::new();
        let seq = verify_inversion_exhaustive(4, &mut cache, &VerifyOptions::default());
        let par = verify_inversion_exhaustive(
            4,
            &mut cache,
            &VerifyOptions {
                threads: 3,
                ..VerifyOptions::default()
            },
        );
        assert_eq!((seq.cases, seq.passed()), (par.cases, par.passed()));
        assert_eq!(seq.cases, 213);
    }

    #[test]
    fn smoothness_small() {
        let mut cache = KLCache::new();
        let opts = VerifyOptions::default();
        let r3 = verify_smoothness_equivalence(3, &mut cache, &opts);
        assert!(r3.passed());
        assert_eq!(r3.notes, vec!["non-smooth tops by pattern: 0".to_string()]);
        let r4 = verify_smoothness_equivalence(4, &mut cache, &opts);
        assert!(r4.passed());
        assert_eq!(r4.notes, vec!["non-smooth tops by pattern: 2".to_string()]);
    }

    #[test]
    fn brenti_small() {
        let mut cache = KLCache::new();
        let r = verify_brenti_bound(3, &mut cache);
        assert!(r.passed(), "{r}");
        assert_eq!(r.cases, 2);
        assert!(r.notes[0].starts_with("k=2: [q]=1, coatoms=4"));
        assert!(r.notes[1].starts_with("k=3: [q]=4, coatoms=9"));
    }

    #[test]
    fn failures_are_auditable() {
        let mut b = ReportBuilder::new("demo", "none".into());
        b.record(Ok(Some(Failure::new("b", "1 + q", "1"))), String::new);
        b.record(Ok(Some(Failure::new("a", "1", "0"))), String::new);
        b.record(Ok(None), String::new);
        let r = b.finish();
        assert!(!r.passed());
        assert_eq!(r.cases, 3);
        assert_eq!(r.failures[0].input, "a");
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["failures"][1]["expected"], "1 + q");
        for key in ["check", "range", "cases", "failures", "seed", "millis"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert!(r.to_string().ends_with("status     FAIL"));
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_comparable_pairs(5, 20, 7).unwrap();
        let b = sample_comparable_pairs(5, 20, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|(x, w)| bruhat_leq(x, w).unwrap()));
    }

    #[test]
    fn lemma2_report_keeps_edge_notes() {
        let r = verify_lemma_tech2(2, 3);
        assert!(r.passed());
        assert_eq!(r.cases, 4);
        assert!(r
            .notes
            .iter()
            .any(|n| n.starts_with("k=1 m=1: lhs 1 - q != rhs 1 + q")));
        assert!(!verify_lemma_tech2(1, 2).passed());
    }
}
