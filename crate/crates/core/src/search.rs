//! Exhaustive search for nonzero zero-divisor products of a prescribed shape.
//!
//! A fixed prefix is multiplied by `prod z[i,j]^{n_ij}` over a list of free
//! factors, with the free exponents running over all tuples of a given sum.
//! Powers `z^n` that vanish for degree reasons are skipped: with `H` the
//! first exponent killing a generator, both `z^{2H-1}` and `z^{2^t}` for
//! `2^t >= H` are zero.

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::tensor::TensorRing;
use crate::zd::ZdSpec;

/// Default bound on the number of exponent tuples examined.
pub const DEFAULT_CANDIDATE_CEILING: u64 = 50_000_000;

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Skip exponents at which the zero-divisor power already vanishes.
    pub prune: bool,
    /// Optional per-free-factor upper bounds on the exponent.
    pub caps: Option<Vec<u32>>,
    pub max_candidates: u64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// At the top degree, precompute each tensor factor's contribution once
    /// and test candidates with a dot product instead of evaluating them one
    /// by one.
    pub split_top: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            prune: true,
            caps: None,
            max_candidates: DEFAULT_CANDIDATE_CEILING,
            workers: None,
            split_top: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub target_degree: u64,
    pub candidates: u64,
    /// Exponents of the free factors, lexicographically ascending.
    pub solutions: Vec<Vec<u32>>,
    #[serde(skip)]
    pub specs: Vec<ZdSpec>,
}

/// Smallest `n` with `z_{i,j}^n = 0` guaranteed when `x_j` has the given height.
pub fn vanishing_exponent(height: u32) -> u32 {
    let h = height + 1;
    (2 * h - 1).min(h.next_power_of_two())
}

/// Number of tuples with entries in `0..=caps[i]` summing to `total`.
fn count_tuples(caps: &[u32], total: u32) -> u128 {
    let mut ways = vec![0u128; total as usize + 1];
    ways[0] = 1;
    for &c in caps {
        let mut next = vec![0u128; ways.len()];
        for (t, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for e in 0..=c.min(total - t as u32) {
                next[t + e as usize] += w;
            }
        }
        ways = next;
    }
    ways[total as usize]
}

/// All tuples with entries in `0..=caps[i]` summing to `total`, in
/// colexicographic order.
fn tuples(caps: &[u32], total: u32) -> Vec<Vec<u32>> {
    fn rec(caps: &[u32], total: u32, pos: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == 0 {
            if total == 0 {
                let mut t = current.clone();
                t.reverse();
                out.push(t);
            }
            return;
        }
        let c = caps[pos - 1];
        let room: u32 = caps[..pos - 1].iter().sum();
        let lo = total.saturating_sub(room);
        for e in lo..=c.min(total) {
            current.push(e);
            rec(caps, total - e, pos - 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(caps, total, caps.len(), &mut Vec::new(), &mut out);
    out
}

/// Every assignment of exponents to `free` (pairs `(i, j)`) that brings the
/// product with `prefix` to `target_degree` and is nonzero.
pub fn exhaustive_search(
    ring: &TensorRing,
    prefix: &ZdSpec,
    free: &[(usize, usize)],
    target_degree: u64,
    options: &SearchOptions,
) -> Result<SearchOutcome> {
    ring.validate(prefix)?;
    for &(i, j) in free {
        ring.validate(&ZdSpec::new().with(i, j, 1)?)?;
    }
    if target_degree > ring.top_degree() as u64 {
        return Err(Error::InvalidParameters(format!(
            "target degree {target_degree} exceeds the top degree {}",
            ring.top_degree()
        )));
    }
    let prefix_degree = prefix.degree();
    if prefix_degree > target_degree {
        return Err(Error::DegreeMismatch { expected: target_degree, found: prefix_degree });
    }
    let remaining = (target_degree - prefix_degree) as u32;
    let base = ring.base();
    let caps: Vec<u32> = free
        .iter()
        .enumerate()
        .map(|(pos, &(i, j))| {
            let mut cap = remaining;
            if let Some(user) = options.caps.as_ref().and_then(|c| c.get(pos)) {
                cap = cap.min(*user);
            }
            if options.prune {
                let bound = vanishing_exponent(base.generator_height(j - 1));
                cap = cap.min((bound - 1).saturating_sub(prefix.exponent(i, j)));
            }
            cap
        })
        .collect();
    let count = count_tuples(&caps, remaining);
    if count > options.max_candidates as u128 {
        return Err(Error::ResourceExceeded(format!(
            "{count} candidate exponent tuples exceed the ceiling of {}",
            options.max_candidates
        )));
    }
    let run = || -> Result<Vec<Vec<u32>>> {
        if options.split_top && target_degree == ring.top_degree() as u64 {
            Ok(split_top_search(ring, prefix, free, &caps, remaining))
        } else {
            per_candidate_search(ring, prefix, free, &caps, remaining, target_degree)
        }
    };
    let mut solutions = match options.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidParameters(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    solutions.sort();
    let specs = solutions.iter().map(|t| with_free(prefix, free, t)).collect();
    Ok(SearchOutcome { target_degree, candidates: count as u64, solutions, specs })
}

fn with_free(prefix: &ZdSpec, free: &[(usize, usize)], exps: &[u32]) -> ZdSpec {
    let mut spec = prefix.clone();
    for (&(i, j), &n) in free.iter().zip(exps) {
        spec.push(i, j, n).expect("validated indices");
    }
    spec
}

fn per_candidate_search(
    ring: &TensorRing,
    prefix: &ZdSpec,
    free: &[(usize, usize)],
    caps: &[u32],
    remaining: u32,
    target_degree: u64,
) -> Result<Vec<Vec<u32>>> {
    let candidates = tuples(caps, remaining);
    let evaluator = Evaluator::new(ring, prefix, free, target_degree);
    let found: Vec<Result<Option<Vec<u32>>>> =
        candidates.into_par_iter().map(|t| Ok(evaluator.nonzero(&t)?.then_some(t))).collect();
    let mut out = Vec::new();
    for r in found {
        if let Some(t) = r? {
            out.push(t);
        }
    }
    Ok(out)
}

/// One choice of exponents for the free positions inside a single tensor factor.
struct Partial {
    sum: u32,
    exps: Vec<u32>,
    /// First-factor coefficient of the top class (or its dual, for the last factor).
    vector: BitVector,
}

/// Top-degree search. The coefficient of the top class is
/// `[top](F * A_{i_1} * ... * A_{i_r})` where `F` collects the untouched
/// factors and `A_i` depends only on factor `i`'s exponents; the last `A` is
/// replaced by its Poincaré dual so the final step is a dot product.
fn split_top_search(
    ring: &TensorRing,
    prefix: &ZdSpec,
    free: &[(usize, usize)],
    caps: &[u32],
    remaining: u32,
) -> Vec<Vec<u32>> {
    let base = ring.base();
    let k = base.generator_count();
    let mut touched: Vec<usize> = free.iter().map(|&(i, _)| i).collect();
    touched.sort_unstable();
    touched.dedup();
    let mut fixed = base.one();
    for i in (2..=ring.s()).filter(|i| !touched.contains(i)) {
        fixed = base.mul(&fixed, &ring.top_group(&prefix.group(i, k)));
    }
    if fixed.is_zero() {
        return Vec::new();
    }
    let positions: Vec<Vec<usize>> =
        touched.iter().map(|&i| (0..free.len()).filter(|&p| free[p].0 == i).collect()).collect();
    let last = touched.len() - 1;
    let partials: Vec<Vec<Partial>> = touched
        .iter()
        .zip(&positions)
        .enumerate()
        .map(|(t, (&i, pos))| {
            let local_caps: Vec<u32> = pos.iter().map(|&p| caps[p]).collect();
            let choices: Vec<Vec<u32>> = (0..=remaining).flat_map(|total| tuples(&local_caps, total)).collect();
            choices
                .into_par_iter()
                .filter_map(|exps| {
                    let mut group = prefix.group(i, k);
                    for (&p, &n) in pos.iter().zip(&exps) {
                        group[free[p].1 - 1] += n;
                    }
                    let a = ring.top_group(&group);
                    if a.is_zero() {
                        return None;
                    }
                    let vector = if t == last { dual(&**base, &a) } else { a };
                    Some(Partial { sum: exps.iter().sum(), exps, vector })
                })
                .collect()
        })
        .collect();
    let mut last_by_sum: Vec<Vec<&Partial>> = vec![Vec::new(); remaining as usize + 1];
    for p in &partials[last] {
        last_by_sum[p.sum as usize].push(p);
    }
    let assemble = |chosen: &[&Partial]| -> Vec<u32> {
        let mut out = vec![0u32; free.len()];
        for (c, pos) in chosen.iter().zip(&positions) {
            for (&p, &n) in pos.iter().zip(&c.exps) {
                out[p] = n;
            }
        }
        out
    };
    let walk = |first: Option<&Partial>| -> Vec<Vec<u32>> {
        let mut found = Vec::new();
        let mut chosen: Vec<&Partial> = Vec::with_capacity(touched.len());
        let start = match first {
            Some(p) => {
                chosen.push(p);
                base.mul(&fixed, &p.vector)
            }
            None => fixed.clone(),
        };
        let used = first.map_or(0, |p| p.sum);
        descend(&**base, &partials, &last_by_sum, chosen.len(), last, start, used, remaining, &mut chosen, &mut |c| {
            found.push(assemble(c))
        });
        found
    };
    if last == 0 {
        walk(None)
    } else {
        partials[0].par_iter().filter(|p| p.sum <= remaining).flat_map_iter(|p| walk(Some(p))).collect()
    }
}

#[allow(clippy::too_many_arguments)]
fn descend<'a>(
    base: &dyn crate::algebra::GradedAlgebra,
    partials: &'a [Vec<Partial>],
    last_by_sum: &[Vec<&'a Partial>],
    depth: usize,
    last: usize,
    acc: BitVector,
    used: u32,
    remaining: u32,
    chosen: &mut Vec<&'a Partial>,
    emit: &mut dyn FnMut(&[&'a Partial]),
) {
    if acc.is_zero() {
        return;
    }
    if depth == last {
        for p in &last_by_sum[(remaining - used) as usize] {
            if acc.dot(&p.vector) {
                chosen.push(p);
                emit(chosen);
                chosen.pop();
            }
        }
        return;
    }
    for p in partials[depth].iter().filter(|p| used + p.sum <= remaining) {
        let next = base.mul(&acc, &p.vector);
        chosen.push(p);
        descend(base, partials, last_by_sum, depth + 1, last, next, used + p.sum, remaining, chosen, emit);
        chosen.pop();
    }
}

/// `D[c] = [top](c * a)` for every basis element `c`.
fn dual(base: &dyn crate::algebra::GradedAlgebra, a: &BitVector) -> BitVector {
    let mut out = base.zero();
    let Some(first) = a.ones().next() else {
        return out;
    };
    let Some(want) = base.dim().checked_sub(base.basis_degree(first)) else {
        return out;
    };
    for c in (0..base.basis_len()).filter(|&c| base.basis_degree(c) == want) {
        if base.top_pairing(&BitVector::unit(base.basis_len(), c), a) {
            out.set(c);
        }
    }
    out
}

/// Per-candidate evaluation, with the parts that do not depend on the free
/// exponents computed once.
struct Evaluator<'a> {
    ring: &'a TensorRing,
    prefix: &'a ZdSpec,
    free: &'a [(usize, usize)],
    top: Option<TopPath>,
}

struct TopPath {
    /// Tensor factors touched by the free exponents.
    touched: Vec<usize>,
    /// Product of the first-factor top coefficients of the untouched factors.
    fixed: BitVector,
}

impl<'a> Evaluator<'a> {
    fn new(ring: &'a TensorRing, prefix: &'a ZdSpec, free: &'a [(usize, usize)], target: u64) -> Self {
        let top = (target == ring.top_degree() as u64).then(|| {
            let k = ring.base().generator_count();
            let mut touched: Vec<usize> = free.iter().map(|&(i, _)| i).collect();
            touched.sort_unstable();
            touched.dedup();
            let mut fixed = ring.base().one();
            for i in (2..=ring.s()).filter(|i| !touched.contains(i)) {
                let a = ring.top_group(&prefix.group(i, k));
                fixed = ring.base().mul(&fixed, &a);
            }
            TopPath { touched, fixed }
        });
        Evaluator { ring, prefix, free, top }
    }

    fn spec(&self, exps: &[u32]) -> ZdSpec {
        with_free(self.prefix, self.free, exps)
    }

    fn nonzero(&self, exps: &[u32]) -> Result<bool> {
        let spec = self.spec(exps);
        match &self.top {
            Some(top) => {
                if top.fixed.is_zero() {
                    return Ok(false);
                }
                let k = self.ring.base().generator_count();
                let groups: Vec<BitVector> =
                    top.touched.iter().map(|&i| self.ring.top_group(&spec.group(i, k))).collect();
                if groups.iter().any(BitVector::is_zero) {
                    return Ok(false);
                }
                Ok(self.ring.pair_top_groups(&top.fixed, &groups))
            }
            None => self.ring.is_nonzero(&spec),
        }
    }
}
