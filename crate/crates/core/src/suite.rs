//! Batch verification of the known identities, certificates and searches.
//! Failures are data: every check reports a verdict and a short detail line.

use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::f2poly::{verify_eh_identity, Monomial};
use crate::flag_ring::{FlagRing, RuleFault};
use crate::search::{exhaustive_search, SearchOptions};
use crate::space::Space;
use crate::tensor::TensorRing;
use crate::zcl::{
    corollary_lower_bound, gap_sequence, higher_certificate, sharpness_check, tc_report, theorem_certificate,
    verify_surface_tcs, HigherFamily, ReportOptions,
};
use crate::zd::ZdSpec;

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    pub include_long: bool,
    /// Corrupts the rewrite rules of every flag ring the suite builds itself
    /// that has the named generator.
    pub fault: Option<RuleFault>,
    pub workers: Option<usize>,
    pub term_ceiling: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub long: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub passed: bool,
    pub include_long: bool,
    pub fault_injected: bool,
    pub checks: Vec<CheckOutcome>,
    /// Long checks left out of this run.
    pub skipped: Vec<String>,
}

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

struct Ctx {
    fault: Option<RuleFault>,
    search: SearchOptions,
    report: ReportOptions,
}

impl Ctx {
    fn ring(&self, k: usize, m: usize) -> Result<Arc<FlagRing>, String> {
        match self.fault {
            Some(f) if f.generator < k => FlagRing::with_fault(k, m, f).map_err(e),
            _ => FlagRing::new(k, m).map_err(e),
        }
    }

    fn tensor(&self, k: usize, m: usize, s: usize) -> Result<(Arc<FlagRing>, TensorRing), String> {
        let ring = self.ring(k, m)?;
        let t = TensorRing::new(ring.clone(), s).map_err(e)?;
        Ok((ring, t))
    }
}

fn rank(ring: &FlagRing, exps: &[u32]) -> Result<usize, String> {
    ring.rank_of(&Monomial::new(exps.to_vec())).ok_or_else(|| format!("{exps:?} is not a basis monomial"))
}

fn eh_identity(_: &Ctx) -> Check {
    for k in 1..=5 {
        for j in 1..=6 {
            ensure!(verify_eh_identity(j, k), "sum e_i h_(j-i) fails for j = {j}, k = {k}");
        }
    }
    Ok("j <= 6, k <= 5".into())
}

fn ring_reports(ctx: &Ctx, pick: impl Fn(&Arc<FlagRing>) -> Vec<crate::flag_ring::RelationReport>) -> Check {
    let mut count = 0;
    for k in 1..=4 {
        for m in 1..=5 {
            let ring = ctx.ring(k, m)?;
            for report in pick(&ring) {
                if let Some(f) = report.failures().next() {
                    return Err(format!("F(1^{k},{m}) {}: {}", report.name, f.label));
                }
                count += report.instances.len();
            }
        }
    }
    Ok(format!("{count} instances for k <= 4, m <= 5"))
}

fn dimension_ledger(ctx: &Ctx) -> Check {
    ring_reports(ctx, |r| vec![r.verify_dimension_ledger()])
}

fn relations(ctx: &Ctx) -> Check {
    ring_reports(ctx, |r| {
        let max = (r.m() + r.k()) as u32 + 1;
        vec![r.verify_extended_relations(), r.verify_annihilator(), r.verify_tau_relations(max)]
    })
}

fn heights(ctx: &Ctx) -> Check {
    ring_reports(ctx, |r| vec![r.verify_heights()])
}

fn power_of_two_certificates(ctx: &Ctx) -> Check {
    for (k, ex) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1)] {
        let (_, t) = ctx.tensor(k, 1 << ex, 2)?;
        let spec = theorem_certificate(k, ex, 0).map_err(e)?;
        ensure!(t.is_nonzero(&spec).map_err(e)?, "{spec} vanishes in F(1^{k},{})", 1 << ex);
    }
    Ok("(z1...zk)^(2^(e+1)-1) nonzero in F(1^k,2^e) for (k,e) in (1,1),(1,2),(2,1),(2,2),(3,1)".into())
}

fn two_term_closed_form(ctx: &Ctx) -> Check {
    for ex in [2u32, 3] {
        let p = 1u32 << ex;
        let (ring, t) = ctx.tensor(2, p as usize - 1, 2)?;
        let spec = theorem_certificate(2, ex, 1).map_err(e)?;
        let got = t.evaluate(&spec, ctx.report.term_ceiling).map_err(e)?;
        let first = [rank(&ring, &[p, p - 2])?, rank(&ring, &[p, p - 1])?];
        let second = [rank(&ring, &[p, p - 1])?, rank(&ring, &[p, p - 2])?];
        let expected = t.from_tuples([&first[..], &second[..]]).map_err(e)?;
        ensure!(got == expected, "e = {ex}: {spec} = {}", got.term_strings().join(" + "));
    }
    Ok("z1^(2^(e+1)-1) z2^(2^(e+1)-2) is the two-term sum for e = 2, 3".into())
}

fn three_flag_delta_two(ctx: &Ctx) -> Check {
    let (_, t) = ctx.tensor(3, 2, 2)?;
    let spec = theorem_certificate(3, 2, 2).map_err(e)?;
    ensure!(t.is_nonzero(&spec).map_err(e)?, "{spec} vanishes in F(1^3,2)");
    Ok(format!("{spec} nonzero in F(1^3,2)"))
}

fn coefficient_witnesses(ctx: &Ctx) -> Check {
    let (ring, t) = ctx.tensor(2, 4, 2)?;
    let product = t.evaluate(&theorem_certificate(2, 2, 0).map_err(e)?, ctx.report.term_ceiling).map_err(e)?;
    let tuple = [rank(&ring, &[2, 3])?, rank(&ring, &[5, 4])?];
    ensure!(product.coefficient_of(&tuple).map_err(e)?, "λ1^2λ2^3ρ1^5ρ2^4 missing from (z1z2)^7");
    let (ring, t) = ctx.tensor(2, 3, 2)?;
    let product = t.evaluate(&theorem_certificate(2, 2, 1).map_err(e)?, ctx.report.term_ceiling).map_err(e)?;
    for (name, l, r) in [("β1", [4, 2], [4, 3]), ("β2", [4, 3], [4, 2])] {
        let tuple = [rank(&ring, &l)?, rank(&ring, &r)?];
        ensure!(product.coefficient_of(&tuple).map_err(e)?, "{name} missing from z1^7 z2^6");
    }
    Ok("λ1^2λ2^3ρ1^5ρ2^4 in (z1z2)^7 over F(1,1,4); β1, β2 in z1^7z2^6 over F(1,1,3)".into())
}

fn corollary_values(_: &Ctx) -> Check {
    let strong = corollary_lower_bound(3, 6, 2, 3).map_err(e)?;
    let weak = corollary_lower_bound(3, 6, 0, 2).map_err(e)?;
    ensure!((strong, weak) == (36, 21), "F(1^3,6): got {strong} and {weak}");
    Ok("F(1^3,6): 36 with (δ,e) = (2,3), 21 with (0,2)".into())
}

fn sharpness(ctx: &Ctx, ks: &[usize]) -> Check {
    let mut parts = Vec::new();
    for &k in ks {
        let r = sharpness_check(k, 2, ctx.report.term_ceiling).map_err(e)?;
        ensure!(r.vanishes, "(z1...z{k})^7 nonzero in {}", r.space);
        parts.push(format!("k = {k}: vanishes, {} terms", r.near_product_terms));
        let expected = match k {
            3 => Some(16),
            4 => Some(1128),
            _ => None,
        };
        if let Some(x) = expected {
            ensure!(r.near_product_terms == x, "k = {k}: {} terms, expected {x}", r.near_product_terms);
        }
    }
    Ok(parts.join("; "))
}

fn near_product_terms_four(ctx: &Ctx) -> Check {
    let (_, t) = ctx.tensor(4, 3, 2)?;
    let spec = ZdSpec::parse("z1^7*z2^7*z3^7*z4^6").map_err(e)?;
    let n = t.evaluate(&spec, ctx.report.term_ceiling).map_err(e)?.term_count();
    ensure!(n == 1128, "{n} terms");
    Ok("z1^7z2^7z3^7z4^6 over F(1^4,3) has 1128 terms".into())
}

fn bound(space: Space, s: usize, ctx: &Ctx) -> Result<(u64, u64), String> {
    let r = tc_report(space, s, &ctx.report, None).map_err(e)?;
    Ok((r.lower, r.upper))
}

fn two_fold_reports(ctx: &Ctx) -> Check {
    let (_, t) = ctx.tensor(4, 1, 2)?;
    let spec = ZdSpec::parse("z1^7*z2^6*z3^3*z4^2").map_err(e)?;
    ensure!(t.is_nonzero(&spec).map_err(e)?, "{spec} vanishes in F5");
    for (space, want) in [(Space::flag(4, 1), (18, 20)), (Space::flag(2, 1), (5, 6)), (Space::flag(2, 3), (13, 14))] {
        let got = bound(space, 2, ctx)?;
        ensure!(got == want, "{space}: {got:?}, expected {want:?}");
    }
    let (lo, hi) = bound(Space::flag(3, 2), 2, ctx)?;
    ensure!(lo >= 16 && hi == 18, "F(1^3,2): [{lo}, {hi}]");
    let (lo, hi) = bound(Space::flag(3, 6), 2, ctx)?;
    ensure!(lo >= 36 && hi == 42, "F(1^3,6): [{lo}, {hi}]");
    Ok(format!("F5 [18,20], F(1,1,1) [5,6], F(1,1,3) [13,14], F(1^3,2) [16,18], F(1^3,6) [{lo},42]"))
}

fn higher_sharp(ctx: &Ctx) -> Check {
    for (k, ex) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 2)] {
        let Space::Flag { m, .. } = HigherFamily::Sharp { k, e: ex }.space() else { unreachable!() };
        let (_, t) = ctx.tensor(k, m, 3)?;
        let spec = higher_certificate(k, ex, 3).map_err(e)?;
        ensure!(t.top_coefficient(&spec).map_err(e)?, "{spec} misses the top class of F(1^{k},{m})");
    }
    for (space, dim) in [(Space::flag(1, 4), 4u64), (Space::flag(2, 3), 7), (Space::flag(3, 2), 9)] {
        for s in 3..=4 {
            let got = bound(space, s, ctx)?;
            ensure!(got == (s as u64 * dim, s as u64 * dim), "{space}, s = {s}: {got:?}");
        }
    }
    Ok("top coefficient 1 at s = 3; TC_s = s·dim for F(1,4), F(1,1,3), F(1^3,2), s = 3, 4".into())
}

fn higher_two_flags(ctx: &Ctx) -> Check {
    let four = HigherFamily::TwoOnePowerOfTwo { e: 2 };
    let (ring, t) = ctx.tensor(2, 4, 3)?;
    let product = t.evaluate(&four.certificate(3).map_err(e)?, ctx.report.term_ceiling).map_err(e)?;
    let tuple = [rank(&ring, &[4, 4])?, rank(&ring, &[5, 4])?, rank(&ring, &[5, 4])?];
    ensure!(product.coefficient_of(&tuple).map_err(e)?, "x1^4x2^4 ⊗ x1^5x2^4 ⊗ x1^5x2^4 missing in F(1,1,4)");
    let (_, t) = ctx.tensor(2, 2, 3)?;
    let spec = HigherFamily::TwoOneTwo.certificate(3).map_err(e)?;
    ensure!(t.is_nonzero(&spec).map_err(e)?, "{spec} vanishes in F(1,1,2)");
    for s in 3..=5u64 {
        let (lo, hi) = bound(Space::flag(2, 2), s as usize, ctx)?;
        ensure!(lo >= 5 * s - 3 && hi == 5 * s, "F(1,1,2), s = {s}: [{lo}, {hi}]");
        let (lo, hi) = bound(Space::flag(2, 4), s as usize, ctx)?;
        ensure!(hi - lo <= 1, "F(1,1,4), s = {s}: [{lo}, {hi}]");
    }
    Ok("F(1,1,4) gap <= 1 and F(1,1,2) gap <= 3 for s = 3..5".into())
}

fn gap_monotonicity(ctx: &Ctx) -> Check {
    for (k, m) in [(1, 2), (1, 4), (2, 1), (2, 2), (2, 3), (2, 4), (3, 2)] {
        let gaps = gap_sequence(k, m, 5, &ctx.report).map_err(e)?;
        if k == 1 && m.is_power_of_two() {
            let values: Vec<u64> = gaps.iter().map(|g| g.value).collect();
            ensure!(values == [1, 0, 0, 0], "F(1,{m}): gaps {values:?}");
        }
    }
    Ok("nonincreasing for s = 2..5 on seven spaces".into())
}

fn f5_three_fold_search(ctx: &Ctx) -> Check {
    let (_, t) = ctx.tensor(4, 1, 3)?;
    let prefix = ZdSpec::from_group(2, &[7, 6, 3, 2]).map_err(e)?;
    let out = exhaustive_search(&t, &prefix, &[(3, 1), (3, 2), (3, 3), (3, 4)], 30, &ctx.search).map_err(e)?;
    ensure!(out.solutions.len() == 6, "{} solutions: {:?}", out.solutions.len(), out.solutions);
    ensure!(out.solutions.contains(&vec![1, 3, 5, 3]), "(1,3,5,3) missing");
    Ok(format!("6 solutions among {} candidates, including (1,3,5,3)", out.candidates))
}

fn surfaces(_: &Ctx) -> Check {
    for n in 1..=5 {
        for s in 3..=5 {
            let b = verify_surface_tcs(n, s).map_err(e)?;
            ensure!(b.lower == 2 * s as u64 && b.upper == 2 * s as u64, "N({n}), s = {s}: [{}, {}]", b.lower, b.upper);
        }
    }
    Ok("TC_s(N_n) = 2s for n <= 5, s = 3..5".into())
}

fn negative_three_fold_search(ctx: &Ctx) -> Check {
    let (_, t) = ctx.tensor(4, 5, 3)?;
    let prefix = ZdSpec::from_group(2, &[15, 14, 7, 6]).map_err(e)?;
    let out = exhaustive_search(&t, &prefix, &[(3, 1), (3, 2), (3, 3), (3, 4)], 78, &ctx.search).map_err(e)?;
    ensure!(out.solutions.is_empty(), "{} nonzero products", out.solutions.len());
    Ok(format!("no nonzero product among {} candidates", out.candidates))
}

fn four_fold_search(ctx: &Ctx) -> Check {
    let (_, t) = ctx.tensor(4, 5, 4)?;
    let mut prefix = ZdSpec::from_group(2, &[15, 14, 7, 6]).map_err(e)?;
    prefix.push_group(3, &[7, 7, 7, 14]).map_err(e)?;
    let out = exhaustive_search(&t, &prefix, &[(4, 1), (4, 2), (4, 3), (4, 4)], 104, &ctx.search).map_err(e)?;
    ensure!(out.solutions.contains(&vec![5, 7, 7, 8]), "(5,7,7,8) not found");
    ensure!(out.solutions.len() == 96, "(5,7,7,8) found, but {} solutions instead of 96", out.solutions.len());
    Ok(format!("96 solutions among {} candidates, including (5,7,7,8)", out.candidates))
}

type CheckFn = fn(&Ctx) -> Check;

const SHORT: &[(&str, CheckFn)] = &[
    ("symmetric_polynomials.eh_identity", eh_identity),
    ("flag_ring.dimension_ledger", dimension_ledger),
    ("flag_ring.relations", relations),
    ("flag_ring.heights", heights),
    ("two_fold.power_of_two_certificates", power_of_two_certificates),
    ("two_fold.two_term_closed_form", two_term_closed_form),
    ("two_fold.three_flag_delta_two", three_flag_delta_two),
    ("two_fold.coefficient_witnesses", coefficient_witnesses),
    ("two_fold.corollary_values", corollary_values),
    ("two_fold.sharpness", |c| sharpness(c, &[2, 3])),
    ("two_fold.near_product_terms", near_product_terms_four),
    ("two_fold.reports", two_fold_reports),
    ("higher.sharp_families", higher_sharp),
    ("higher.two_flag_families", higher_two_flags),
    ("higher.gap_monotonicity", gap_monotonicity),
    ("search.complete_flag_three_fold", f5_three_fold_search),
    ("surface.tc_values", surfaces),
];

const LONG: &[(&str, CheckFn)] = &[
    ("two_fold.sharpness_four_flags", |c| sharpness(c, &[4])),
    ("search.three_fold_negative", negative_three_fold_search),
    ("search.four_fold_witness", four_fold_search),
];

fn run_checks(options: &SuiteOptions) -> SuiteReport {
    let mut search = SearchOptions::default();
    if options.include_long {
        search.max_candidates = u64::MAX;
    }
    let mut report = ReportOptions::default();
    if let Some(c) = options.term_ceiling {
        report.term_ceiling = c;
    }
    let ctx = Ctx { fault: options.fault, search, report };
    let mut checks = Vec::new();
    let long = if options.include_long { LONG } else { &[] };
    for (list, is_long) in [(SHORT, false), (long, true)] {
        for (name, f) in list {
            let start = Instant::now();
            let result = f(&ctx);
            let (passed, detail) = match result {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            checks.push(CheckOutcome {
                name: name.to_string(),
                passed,
                long: is_long,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            });
        }
    }
    let skipped = if options.include_long { Vec::new() } else { LONG.iter().map(|(n, _)| n.to_string()).collect() };
    SuiteReport {
        passed: checks.iter().all(|c| c.passed),
        include_long: options.include_long,
        fault_injected: options.fault.is_some(),
        checks,
        skipped,
    }
}

/// Runs every check, inside a dedicated thread pool when `workers` is set.
pub fn verify_paper(options: &SuiteOptions) -> SuiteReport {
    match options.workers.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(|| run_checks(options)),
        None => run_checks(options),
    }
}

/// Names of all checks, short ones first.
pub fn check_names() -> Vec<&'static str> {
    SHORT.iter().chain(LONG).map(|(n, _)| *n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_checks_pass() {
        let ctx = Ctx { fault: None, search: SearchOptions::default(), report: ReportOptions::default() };
        for f in [eh_identity, corollary_values, three_flag_delta_two, surfaces] {
            f(&ctx).unwrap();
        }
    }

    #[test]
    fn fault_is_noticed() {
        let ctx = Ctx { fault: Some(RuleFault { generator: 0 }), search: SearchOptions::default(), report: ReportOptions::default() };
        assert!(relations(&ctx).is_err() || heights(&ctx).is_err() || dimension_ledger(&ctx).is_err());
    }
}
