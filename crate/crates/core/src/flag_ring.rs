//! The mod-2 cohomology ring of the flag manifold `F(1^k,m)`.
//!
//! Generators `x1..xk` of degree one, relations
//! `h_{m+i}(x_1, ..., x_{k+1-i}) = 0` for `1 <= i <= k`, additive basis the
//! monomials `x1^n1 ... xk^nk` with `n_i <= m+k-i`.
//!
//! Reduction to that basis picks the largest index `i` whose exponent
//! exceeds its bound and substitutes the cached normal form of the pure power
//! `x_i^e`. The cache starts from
//! `x_i^{b+1} = x_i^b h_1 + x_i^{b-1} h_2 + ... + h_{b+1}` (with `b = m+k-i` and
//! the `h`'s in `x_1..x_{i-1}`), and later powers are obtained by multiplying
//! by `x_i` and reducing again. Every substitution only raises variables of
//! smaller index, so the process terminates and the result is unique.

use std::borrow::Cow;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::GradedAlgebra;
use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::f2poly::{self, complete_symmetric, elementary_symmetric, monomials_of_degree, Monomial, RawPoly};

const MAX_BASIS: usize = 1 << 20;
const MAX_TABLE: usize = 1 << 23;

/// Deliberate corruption of one rewrite rule, used to check that the
/// verification suite notices a broken engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleFault {
    /// Zero-based generator whose first overflow rule gets an extra term.
    pub generator: usize,
}

/// The ring `H^*(F(1^k,m); F_2)`.
pub struct FlagRing {
    k: usize,
    m: usize,
    rewriter: Rewriter,
    basis: Vec<Monomial>,
    degrees: Vec<u32>,
    top: usize,
    radix: usize,
    table_offsets: Vec<u32>,
    table_terms: Vec<u32>,
    top_bits: BitVector,
    fault: Option<RuleFault>,
}

/// Rewrite rules and the reduction procedure.
struct Rewriter {
    k: usize,
    bounds: Vec<u32>,
    strides: Vec<usize>,
    basis: Vec<Vec<u32>>,
    /// `rules[i][r]` is the normal form of `x_i^{bounds[i] + 1 + r}`.
    rules: Vec<Vec<BitVector>>,
    /// Set once every `x_i^{m+k}` has been confirmed to reduce to zero.
    vanishing_exponent: Option<u32>,
}

type Memo = HashMap<Vec<u32>, Vec<u32>>;

impl Rewriter {
    fn nbasis(&self) -> usize {
        self.basis.len()
    }

    fn rank(&self, exps: &[u32]) -> usize {
        exps.iter().zip(&self.strides).map(|(&e, &s)| e as usize * s).sum()
    }

    fn rule(&self, i: usize, e: u32, memo: &mut Memo) -> Cow<'_, BitVector> {
        let first = self.bounds[i] + 1;
        let idx = (e - first) as usize;
        let cached = &self.rules[i];
        if idx < cached.len() {
            return Cow::Borrowed(&cached[idx]);
        }
        // x_i^e = x_i^{e - last} * NF(x_i^last)
        let last = first + cached.len() as u32 - 1;
        let mut acc = BitVector::zeros(self.nbasis());
        for t in cached[cached.len() - 1].ones() {
            let mut exps = self.basis[t].clone();
            exps[i] += e - last;
            self.reduce_into(&exps, &mut acc, memo);
        }
        Cow::Owned(acc)
    }

    /// XORs the normal form of the monomial `exps` into `out`.
    fn reduce_into(&self, exps: &[u32], out: &mut BitVector, memo: &mut Memo) {
        if let Some(h) = self.vanishing_exponent {
            if exps.iter().any(|&e| e >= h) {
                return;
            }
        }
        let Some(i) = (0..self.k).rev().find(|&i| exps[i] > self.bounds[i]) else {
            out.toggle(self.rank(exps));
            return;
        };
        if let Some(terms) = memo.get(exps) {
            for &t in terms {
                out.toggle(t as usize);
            }
            return;
        }
        let rule = self.rule(i, exps[i], memo).into_owned();
        let mut rest = exps.to_vec();
        rest[i] = 0;
        let mut acc = BitVector::zeros(self.nbasis());
        let mut mono = rest.clone();
        for t in rule.ones() {
            for (slot, (r, b)) in mono.iter_mut().zip(rest.iter().zip(&self.basis[t])) {
                *slot = r + b;
            }
            self.reduce_into(&mono, &mut acc, memo);
        }
        let terms: Vec<u32> = acc.ones().map(|t| t as u32).collect();
        for &t in &terms {
            out.toggle(t as usize);
        }
        memo.insert(exps.to_vec(), terms);
    }

    fn build(k: usize, m: usize, fault: Option<RuleFault>) -> Rewriter {
        let bounds: Vec<u32> = (0..k).map(|i| (m + k - 1 - i) as u32).collect();
        let mut strides = Vec::with_capacity(k);
        let mut stride = 1usize;
        for &b in &bounds {
            strides.push(stride);
            stride *= b as usize + 1;
        }
        let nbasis = stride;
        let basis: Vec<Vec<u32>> = (0..nbasis)
            .map(|r| bounds.iter().zip(&strides).map(|(&b, &s)| ((r / s) % (b as usize + 1)) as u32).collect())
            .collect();
        let mut rw = Rewriter { k, bounds, strides, basis, rules: Vec::with_capacity(k), vanishing_exponent: None };
        let max_exponent = 2 * (m + k - 1) as u32;
        let mut memo = Memo::new();
        for i in 0..k {
            let b = rw.bounds[i];
            let mut first = BitVector::zeros(nbasis);
            for s in 1..=b + 1 {
                for lower in monomials_of_degree(i, s) {
                    let mut exps = lower;
                    exps.push(b + 1 - s);
                    exps.resize(k, 0);
                    rw.reduce_into(&exps, &mut first, &mut memo);
                }
            }
            if fault.is_some_and(|f| f.generator == i) {
                let mut exps = vec![0; k];
                exps[i] = b;
                if i > 0 {
                    exps[0] = 1;
                }
                first.toggle(rw.rank(&exps));
            }
            rw.rules.push(vec![first]);
            for _ in b + 2..=max_exponent.max(b + 1) {
                let prev = rw.rules[i].last().expect("seeded above").clone();
                let mut next = BitVector::zeros(nbasis);
                for t in prev.ones() {
                    let mut exps = rw.basis[t].clone();
                    exps[i] += 1;
                    rw.reduce_into(&exps, &mut next, &mut memo);
                }
                rw.rules[i].push(next);
            }
        }
        let h = (m + k) as u32;
        let vanishes = (0..k).all(|i| {
            let mut scratch = Memo::new();
            rw.rule(i, h, &mut scratch).is_zero()
        });
        if vanishes {
            rw.vanishing_exponent = Some(h);
        }
        rw
    }
}

impl FlagRing {
    /// Builds `H^*(F(1^k,m))` with its rewrite rules and reduction tables.
    pub fn new(k: usize, m: usize) -> Result<Arc<FlagRing>> {
        Self::build(k, m, None)
    }

    /// Builds the ring with one deliberately wrong rewrite rule.
    pub fn with_fault(k: usize, m: usize, fault: RuleFault) -> Result<Arc<FlagRing>> {
        if fault.generator >= k {
            return Err(Error::InvalidParameters(format!("fault generator {} >= k = {k}", fault.generator)));
        }
        Self::build(k, m, Some(fault))
    }

    fn build(k: usize, m: usize, fault: Option<RuleFault>) -> Result<Arc<FlagRing>> {
        if k < 1 || m < 1 {
            return Err(Error::InvalidParameters(format!("F(1^{k},{m}) needs k >= 1 and m >= 1")));
        }
        let radix = m + k;
        let nbasis = (1..=k).try_fold(1usize, |acc, i| acc.checked_mul(m + i));
        let table_len = (0..k).try_fold(1usize, |acc, _| acc.checked_mul(radix));
        match (nbasis, table_len) {
            (Some(n), Some(t)) if n <= MAX_BASIS && t <= MAX_TABLE => {}
            _ => return Err(Error::InvalidParameters(format!("F(1^{k},{m}) is too large for this engine"))),
        }
        let table_len = table_len.unwrap();
        let rewriter = Rewriter::build(k, m, fault);
        let basis: Vec<Monomial> = rewriter.basis.iter().cloned().map(Monomial::new).collect();
        let degrees: Vec<u32> = basis.iter().map(Monomial::degree).collect();
        let top = rewriter.rank(&rewriter.bounds);

        let mut table_offsets = Vec::with_capacity(table_len + 1);
        let mut table_terms = Vec::new();
        let mut memo = Memo::new();
        let mut scratch = BitVector::zeros(basis.len());
        let mut exps = vec![0u32; k];
        table_offsets.push(0);
        for r in 0..table_len {
            decode_box(r, radix, &mut exps);
            scratch.clear();
            rewriter.reduce_into(&exps, &mut scratch, &mut memo);
            table_terms.extend(scratch.ones().map(|t| t as u32));
            table_offsets.push(table_terms.len() as u32);
        }
        drop(memo);

        let mut ring = FlagRing {
            k,
            m,
            rewriter,
            basis,
            degrees,
            top,
            radix,
            table_offsets,
            table_terms,
            top_bits: BitVector::zeros(table_len),
            fault,
        };
        let dim = ring.dim();
        for r in 0..table_len {
            decode_box(r, radix, &mut exps);
            if exps.iter().sum::<u32>() == dim && ring.project_to_top(&exps) {
                ring.top_bits.set(r);
            }
        }
        Ok(Arc::new(ring))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn fault(&self) -> Option<RuleFault> {
        self.fault
    }

    /// `km + k(k-1)/2`.
    pub fn dimension(&self) -> u32 {
        (self.k * self.m + self.k * (self.k - 1) / 2) as u32
    }

    /// Exponent bounds `m+k-1, m+k-2, ..., m` of the additive basis.
    pub fn bounds(&self) -> &[u32] {
        &self.rewriter.bounds
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn top_monomial(&self) -> &Monomial {
        &self.basis[self.top]
    }

    /// Mixed-radix rank of a basis monomial, `None` when out of bounds.
    pub fn rank_of(&self, m: &Monomial) -> Option<usize> {
        let exps = m.exponents();
        if exps.len() != self.k || exps.iter().zip(self.bounds()).any(|(e, b)| e > b) {
            return None;
        }
        Some(self.rewriter.rank(exps))
    }

    fn check_vars(&self, p: &RawPoly) -> Result<()> {
        if p.nvars() != self.k {
            return Err(Error::VariableCountMismatch { expected: self.k, found: p.nvars() });
        }
        Ok(())
    }

    fn box_rank(&self, exps: &[u32]) -> Option<usize> {
        let mut r = 0usize;
        for &e in exps.iter().rev() {
            if e as usize >= self.radix {
                return None;
            }
            r = r * self.radix + e as usize;
        }
        Some(r)
    }

    /// XORs the normal form of `x^exps` into `out`.
    pub(crate) fn xor_monomial_into(&self, exps: &[u32], out: &mut BitVector) {
        match self.box_rank(exps) {
            Some(r) => {
                let (a, b) = (self.table_offsets[r] as usize, self.table_offsets[r + 1] as usize);
                for &t in &self.table_terms[a..b] {
                    out.toggle(t as usize);
                }
            }
            None if self.rewriter.vanishing_exponent.is_some() => {}
            None => self.rewriter.reduce_into(exps, out, &mut Memo::new()),
        }
    }

    /// Normal form of a raw polynomial: its unique expansion in the basis.
    pub fn normal_form(self: &Arc<Self>, p: &RawPoly) -> Result<RingElement> {
        self.check_vars(p)?;
        let mut bits = BitVector::zeros(self.basis.len());
        for m in p.terms() {
            self.xor_monomial_into(m.exponents(), &mut bits);
        }
        Ok(RingElement { ring: Arc::clone(self), bits })
    }

    /// Element spanned by the given basis monomials (repeats cancel).
    pub fn element(self: &Arc<Self>, monomials: impl IntoIterator<Item = Monomial>) -> Result<RingElement> {
        let mut bits = BitVector::zeros(self.basis.len());
        for m in monomials {
            if m.nvars() != self.k {
                return Err(Error::VariableCountMismatch { expected: self.k, found: m.nvars() });
            }
            let r = self.rank_of(&m).ok_or_else(|| Error::NotInBasis(m.to_string()))?;
            bits.toggle(r);
        }
        Ok(RingElement { ring: Arc::clone(self), bits })
    }

    pub fn element_from_bits(self: &Arc<Self>, bits: BitVector) -> RingElement {
        assert_eq!(bits.len(), self.basis.len());
        RingElement { ring: Arc::clone(self), bits }
    }

    /// Cached normal form of `x_{i+1}^e` (zero-based `i`), as used by the rewriter.
    pub fn power_rule(self: &Arc<Self>, i: usize, e: u32) -> Result<RingElement> {
        if i >= self.k {
            return Err(Error::IndexOutOfRange(format!("generator {} of {}", i + 1, self.k)));
        }
        let mut exps = vec![0; self.k];
        exps[i] = e;
        let mut bits = BitVector::zeros(self.basis.len());
        self.rewriter.reduce_into(&exps, &mut bits, &mut Memo::new());
        Ok(RingElement { ring: Arc::clone(self), bits })
    }

    /// Coefficients of `prod_{i=1}^k (1 - x^{m+i}) / (1 - x)`, indexed by degree.
    pub fn poincare_polynomial(&self) -> Vec<u64> {
        let mut coeffs = vec![1u64];
        for i in 1..=self.k {
            let len = self.m + i;
            let mut next = vec![0u64; coeffs.len() + len - 1];
            for (d, &c) in coeffs.iter().enumerate() {
                for slot in &mut next[d..d + len] {
                    *slot += c;
                }
            }
            coeffs = next;
        }
        coeffs
    }

    /// Basis monomial counts by degree.
    pub fn basis_degree_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.dimension() as usize + 1];
        for &d in &self.degrees {
            counts[d as usize] += 1;
        }
        counts
    }

    /// `x_i^{m+k-j}  ≡  x_i^{m+k-i} e_{i-j}(x_1, ..., x_{i-1})` for `0 <= j <= i`
    /// (one-based `i`): the replacement for a power of `x_i` that is exact
    /// modulo basis elements with `n_i < m+k-i` and no larger variables.
    pub fn top_equivalent_power(&self, i: usize, exponent: u32) -> Result<RawPoly> {
        if i < 1 || i > self.k {
            return Err(Error::IndexOutOfRange(format!("generator {i} of {}", self.k)));
        }
        let b = self.bounds()[i - 1];
        if exponent < b {
            return Err(Error::InvalidParameters(format!("exponent {exponent} below m+k-i = {b}")));
        }
        let lower: Vec<usize> = (0..i - 1).collect();
        let e = elementary_symmetric(exponent - b, &lower, self.k);
        let mut power = vec![0; self.k];
        power[i - 1] = b;
        Ok(e.mul(&RawPoly::from_monomial(Monomial::new(power))).expect("same variable count"))
    }

    /// Top-class coefficient of a monomial computed with the
    /// [`top_equivalent_power`](Self::top_equivalent_power) replacements alone,
    /// working down from the last variable and discarding any term whose
    /// exponent at the current variable falls short of its bound.
    fn project_to_top(&self, exps: &[u32]) -> bool {
        let bounds = self.bounds();
        let mut current: HashSet<Vec<u32>> = HashSet::from([exps.to_vec()]);
        for i in (0..self.k).rev() {
            let b = bounds[i];
            let mut next: HashSet<Vec<u32>> = HashSet::new();
            for mono in current {
                let n = mono[i];
                if n < b {
                    continue;
                }
                let d = (n - b) as usize;
                if d > i {
                    continue;
                }
                for subset in combinations(i, d) {
                    let mut t = mono.clone();
                    t[i] = b;
                    for &v in &subset {
                        t[v] += 1;
                    }
                    if !next.remove(&t) {
                        next.insert(t);
                    }
                }
            }
            current = next;
        }
        current.len() % 2 == 1
    }

    /// Projection onto the top class of the degree-`dim` part of `p`, using the
    /// top-only replacement rules rather than the full normal form.
    pub fn top_projection_rewrite(self: &Arc<Self>, p: &RawPoly) -> Result<RingElement> {
        self.check_vars(p)?;
        let dim = self.dimension();
        let parity = p.terms().filter(|m| m.degree() == dim).filter(|m| self.project_to_top(m.exponents())).count() % 2;
        let mut bits = BitVector::zeros(self.basis.len());
        if parity == 1 {
            bits.set(self.top);
        }
        Ok(RingElement { ring: Arc::clone(self), bits })
    }

    fn is_zero_raw(self: &Arc<Self>, p: &RawPoly) -> bool {
        self.normal_form(p).expect("variable count matches").is_zero()
    }

    /// Checks `h_{m+i}(x_{l_1}, ..., x_{l_{k-j}}) = 0` for every subset of size `k-j`
    /// and every `0 <= j < i <= k`.
    pub fn verify_extended_relations(self: &Arc<Self>) -> RelationReport {
        let mut instances = Vec::new();
        for i in 1..=self.k {
            for j in 0..i {
                for subset in combinations(self.k, self.k - j) {
                    let h = complete_symmetric((self.m + i) as u32, &subset, self.k);
                    let names: Vec<String> = subset.iter().map(|v| format!("x{}", v + 1)).collect();
                    instances.push(RelationInstance {
                        label: format!("h_{}({})", self.m + i, names.join(",")),
                        holds: self.is_zero_raw(&h),
                    });
                }
            }
        }
        RelationReport { name: "extended_relations".into(), instances }
    }

    /// Checks `x1^{m+k-1} ... xj^{m+k-j} * xj = 0` for each `j`, that the top class
    /// is nonzero, and that it is killed by every generator.
    pub fn verify_annihilator(self: &Arc<Self>) -> RelationReport {
        let bounds = self.bounds().to_vec();
        let mut instances = Vec::new();
        for j in 0..self.k {
            let mut exps = vec![0; self.k];
            exps[..=j].copy_from_slice(&bounds[..=j]);
            exps[j] += 1;
            let mono = Monomial::new(exps);
            instances.push(RelationInstance {
                label: format!("{mono} = 0"),
                holds: self.is_zero_raw(&RawPoly::from_monomial(mono)),
            });
        }
        let top = self.top_monomial().clone();
        instances.push(RelationInstance {
            label: format!("{top} != 0"),
            holds: !self.is_zero_raw(&RawPoly::from_monomial(top.clone())),
        });
        for j in 0..self.k {
            let p = RawPoly::from_monomial(top.mul(&Monomial::var(self.k, j)));
            instances.push(RelationInstance { label: format!("({top})*x{} = 0", j + 1), holds: self.is_zero_raw(&p) });
        }
        RelationReport { name: "annihilator".into(), instances }
    }

    /// Checks `(x1 ... xi)^l h_j(x1, ..., xi) = 0` whenever `i + j + l > m + k`,
    /// for `j, l <= max_exponent`.
    pub fn verify_tau_relations(self: &Arc<Self>, max_exponent: u32) -> RelationReport {
        let mk = (self.m + self.k) as u32;
        let mut instances = Vec::new();
        for i in 1..=self.k {
            let vars: Vec<usize> = (0..i).collect();
            for l in 0..=max_exponent {
                let mut exps = vec![0; self.k];
                exps[..i].iter_mut().for_each(|e| *e = l);
                let tau = RawPoly::from_monomial(Monomial::new(exps));
                for j in 0..=max_exponent {
                    if i as u32 + j + l <= mk {
                        continue;
                    }
                    let p = tau.mul(&complete_symmetric(j, &vars, self.k)).expect("same variable count");
                    instances.push(RelationInstance {
                        label: format!("(x1..x{i})^{l} h_{j}(x1..x{i}) = 0"),
                        holds: self.is_zero_raw(&p),
                    });
                }
            }
        }
        RelationReport { name: "tau_relations".into(), instances }
    }

    /// Checks `x_i^{m+k-1} != 0 = x_i^{m+k}` for every generator.
    pub fn verify_heights(self: &Arc<Self>) -> RelationReport {
        let h = (self.m + self.k) as u32;
        let mut instances = Vec::new();
        for i in 0..self.k {
            let power = |e: u32| {
                let mut exps = vec![0; self.k];
                exps[i] = e;
                RawPoly::from_monomial(Monomial::new(exps))
            };
            instances.push(RelationInstance {
                label: format!("x{}^{} != 0", i + 1, h - 1),
                holds: !self.is_zero_raw(&power(h - 1)),
            });
            instances.push(RelationInstance { label: format!("x{}^{h} = 0", i + 1), holds: self.is_zero_raw(&power(h)) });
        }
        RelationReport { name: "heights".into(), instances }
    }

    /// Basis counts per degree agree with the Poincaré series and sum to
    /// `prod (m+i)`.
    pub fn verify_dimension_ledger(&self) -> RelationReport {
        let poincare = self.poincare_polynomial();
        let counts = self.basis_degree_counts();
        let product: u64 = (1..=self.k).map(|i| (self.m + i) as u64).product();
        let mut instances = vec![RelationInstance {
            label: format!("basis size {} = {product}", self.basis.len()),
            holds: self.basis.len() as u64 == product && poincare.iter().sum::<u64>() == product,
        }];
        instances.push(RelationInstance {
            label: format!("top degree {} = dim", poincare.len() - 1),
            holds: poincare.len() - 1 == self.dimension() as usize,
        });
        instances.push(RelationInstance { label: "degree counts match Poincaré coefficients".into(), holds: poincare == counts });
        RelationReport { name: "dimension_ledger".into(), instances }
    }
}

impl fmt::Debug for FlagRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FlagRing").field("k", &self.k).field("m", &self.m).field("fault", &self.fault).finish()
    }
}

impl GradedAlgebra for FlagRing {
    fn label(&self) -> String {
        format!("F(1^{},{})", self.k, self.m)
    }

    fn basis_len(&self) -> usize {
        self.basis.len()
    }

    fn basis_degree(&self, index: usize) -> u32 {
        self.degrees[index]
    }

    fn basis_label(&self, index: usize) -> String {
        self.basis[index].to_string()
    }

    fn basis_exponents(&self, index: usize) -> Vec<u32> {
        self.basis[index].exponents().to_vec()
    }

    fn basis_index(&self, exps: &[u32]) -> Option<usize> {
        self.rank_of(&Monomial::new(exps.to_vec()))
    }

    fn unit_index(&self) -> usize {
        0
    }

    fn top_index(&self) -> usize {
        self.top
    }

    fn dim(&self) -> u32 {
        self.dimension()
    }

    fn generator_count(&self) -> usize {
        self.k
    }

    fn generator_symbol(&self) -> &'static str {
        "x"
    }

    fn generator_height(&self, _j: usize) -> u32 {
        match self.rewriter.vanishing_exponent {
            Some(h) => h - 1,
            // only reachable for a faulted ring; fall back to a safe bound
            None => 4 * (self.m + self.k) as u32,
        }
    }

    fn top_exponents(&self) -> Vec<u32> {
        self.bounds().to_vec()
    }

    fn generator_monomial(&self, exps: &[u32]) -> BitVector {
        let mut out = BitVector::zeros(self.basis.len());
        self.xor_monomial_into(exps, &mut out);
        out
    }

    fn xor_generator_monomial_into(&self, exps: &[u32], out: &mut BitVector) {
        self.xor_monomial_into(exps, out);
    }

    fn mul_basis_into(&self, a: usize, b: usize, out: &mut BitVector) {
        let ea = self.basis[a].exponents();
        let eb = self.basis[b].exponents();
        let mut r = 0usize;
        for i in (0..self.k).rev() {
            let e = (ea[i] + eb[i]) as usize;
            if e >= self.radix {
                if self.rewriter.vanishing_exponent.is_some() {
                    return;
                }
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                self.rewriter.reduce_into(&exps, out, &mut Memo::new());
                return;
            }
            r = r * self.radix + e;
        }
        let (s, t) = (self.table_offsets[r] as usize, self.table_offsets[r + 1] as usize);
        for &u in &self.table_terms[s..t] {
            out.toggle(u as usize);
        }
    }

    fn top_coefficient_of_monomial(&self, exps: &[u32]) -> bool {
        if exps.iter().sum::<u32>() != self.dimension() {
            return false;
        }
        match self.box_rank(exps) {
            Some(r) => self.top_bits.get(r),
            None => self.project_to_top(exps),
        }
    }

    fn top_pairing(&self, a: &BitVector, b: &BitVector) -> bool {
        let dim = self.dimension();
        let mut parity = false;
        let mut exps = vec![0u32; self.k];
        for i in a.ones() {
            let di = self.degrees[i];
            if di > dim {
                continue;
            }
            let ei = self.basis[i].exponents();
            for j in b.ones() {
                if self.degrees[j] + di != dim {
                    continue;
                }
                for ((slot, x), y) in exps.iter_mut().zip(ei).zip(self.basis[j].exponents()) {
                    *slot = x + y;
                }
                parity ^= self.top_coefficient_of_monomial(&exps);
            }
        }
        parity
    }
}

fn decode_box(mut r: usize, radix: usize, exps: &mut [u32]) {
    for e in exps.iter_mut() {
        *e = (r % radix) as u32;
        r /= radix;
    }
}

/// All `size`-element subsets of `0..n`, each ascending, in lexicographic order.
pub(crate) fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if size > n {
        return out;
    }
    let mut current: Vec<usize> = (0..size).collect();
    loop {
        out.push(current.clone());
        let Some(pos) = (0..size).rev().find(|&p| current[p] != p + n - size) else {
            return out;
        };
        current[pos] += 1;
        for q in pos + 1..size {
            current[q] = current[q - 1] + 1;
        }
    }
}

/// An element of a [`FlagRing`], in normal form.
#[derive(Clone)]
pub struct RingElement {
    ring: Arc<FlagRing>,
    bits: BitVector,
}

impl RingElement {
    pub fn ring(&self) -> &Arc<FlagRing> {
        &self.ring
    }

    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_zero()
    }

    /// Basis monomials present, ascending in graded-lex order.
    pub fn terms(&self) -> Vec<Monomial> {
        let mut terms: Vec<Monomial> = self.bits.ones().map(|r| self.ring.basis[r].clone()).collect();
        terms.sort();
        terms
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.ring.rank_of(m).is_some_and(|r| self.bits.get(r))
    }

    pub fn degree(&self) -> Option<u32> {
        self.bits.ones().map(|r| self.ring.degrees[r]).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut ds = self.bits.ones().map(|r| self.ring.degrees[r]);
        match ds.next() {
            Some(d) => ds.all(|e| e == d),
            None => true,
        }
    }

    pub fn to_raw(&self) -> RawPoly {
        RawPoly::from_monomials(self.ring.k, self.terms()).expect("same variable count")
    }

    fn check_ring(&self, other: &RingElement) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring)
            || (self.ring.k == other.ring.k && self.ring.m == other.ring.m && self.ring.fault == other.ring.fault)
        {
            Ok(())
        } else {
            Err(Error::RingMismatch { left: self.ring.label(), right: other.ring.label() })
        }
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement> {
        self.check_ring(other)?;
        let mut bits = self.bits.clone();
        bits.xor_assign(&other.bits);
        Ok(RingElement { ring: Arc::clone(&self.ring), bits })
    }

    pub fn mul(&self, other: &RingElement) -> Result<RingElement> {
        self.check_ring(other)?;
        Ok(RingElement { ring: Arc::clone(&self.ring), bits: self.ring.mul(&self.bits, &other.bits) })
    }

    /// Set equality of normal forms; errors when the rings differ.
    pub fn equals(&self, other: &RingElement) -> Result<bool> {
        self.check_ring(other)?;
        Ok(self.bits == other.bits)
    }
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other).unwrap_or(false)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_raw())
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self.to_raw(), self.ring.label())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationInstance {
    pub label: String,
    pub holds: bool,
}

/// Pass/fail outcome per instance of a family of ring identities.
#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub name: String,
    pub instances: Vec<RelationInstance>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.instances.iter().all(|i| i.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationInstance> {
        self.instances.iter().filter(|i| !i.holds)
    }
}

/// Monomial text with the generator letter used by this ring.
pub fn monomial_label(exps: &[u32]) -> String {
    let mut s = String::new();
    f2poly::write_power_product(&mut s, "x", exps).expect("writing to a String");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(s: &str, k: usize) -> RawPoly {
        RawPoly::parse(s, k).unwrap()
    }

    fn mono(exps: &[u32]) -> Monomial {
        Monomial::new(exps.to_vec())
    }

    #[test]
    fn projective_plane() {
        let r = FlagRing::new(1, 2).unwrap();
        let labels: Vec<String> = r.basis().iter().map(|m| m.to_string()).collect();
        assert_eq!(labels, ["1", "x1", "x1^2"]);
        assert!(r.normal_form(&raw("x1^3", 1)).unwrap().is_zero());
        assert_eq!(r.poincare_polynomial(), vec![1, 1, 1]);
    }

    #[test]
    fn small_ring_sizes() {
        let r = FlagRing::new(2, 1).unwrap();
        assert_eq!(r.basis().len(), 6);
        assert_eq!(r.poincare_polynomial(), vec![1, 2, 2, 1]);
        let r = FlagRing::new(4, 1).unwrap();
        assert_eq!(r.dimension(), 10);
        assert!(FlagRing::new(0, 2).is_err());
        assert!(FlagRing::new(2, 0).is_err());
    }

    #[test]
    fn reduction_in_f111() {
        let r = FlagRing::new(2, 1).unwrap();
        let nf = r.normal_form(&raw("x2^2", 2)).unwrap();
        let expected = r.element([mono(&[2, 0]), mono(&[1, 1])]).unwrap();
        assert_eq!(nf, expected);
        assert!(nf.equals(&nf).unwrap());
        assert_eq!(nf.to_string(), "x1^2 + x1*x2");
    }

    #[test]
    fn normal_form_is_idempotent() {
        let r = FlagRing::new(3, 2).unwrap();
        let p = raw("(x1 + x2 x3 + x3^2)^5 + x2^7 x1", 3);
        let once = r.normal_form(&p).unwrap();
        let twice = r.normal_form(&once.to_raw()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn heights_of_generators() {
        for (k, m) in [(1, 1), (2, 3), (3, 2), (4, 1)] {
            let r = FlagRing::new(k, m).unwrap();
            assert!(r.verify_heights().passed(), "F(1^{k},{m})");
        }
    }

    #[test]
    fn extended_relation_examples() {
        let r = FlagRing::new(2, 1).unwrap();
        assert!(r.normal_form(&raw("x2^3", 2)).unwrap().is_zero());
        let r = FlagRing::new(2, 3).unwrap();
        assert!(r.normal_form(&complete_symmetric(4, &[0, 1], 2)).unwrap().is_zero());
        let r = FlagRing::new(3, 2).unwrap();
        assert!(r.normal_form(&complete_symmetric(4, &[0, 2], 3)).unwrap().is_zero());
        assert!(r.verify_extended_relations().passed());
    }

    #[test]
    fn annihilator_examples() {
        let r = FlagRing::new(2, 1).unwrap();
        assert!(r.normal_form(&raw("x1^2*x1", 2)).unwrap().is_zero());
        assert!(r.normal_form(&raw("x1^2*x2*x2", 2)).unwrap().is_zero());
        let r = FlagRing::new(2, 3).unwrap();
        assert!(!r.normal_form(&raw("x1^4 x2^3", 2)).unwrap().is_zero());
        assert!(r.verify_annihilator().passed());
    }

    #[test]
    fn tau_examples() {
        let r = FlagRing::new(2, 1).unwrap();
        assert!(r.normal_form(&raw("(x1 x2)^2", 2)).unwrap().is_zero());
        let r = FlagRing::new(2, 3).unwrap();
        assert!(r.normal_form(&raw("(x1 x2)^4", 2)).unwrap().is_zero());
        assert!(r.normal_form(&raw("(x1 x2)^3 (x1 + x2)", 2)).unwrap().is_zero());
        assert!(r.verify_tau_relations(8).passed());
    }

    #[test]
    fn top_monomial_is_its_own_normal_form() {
        let r = FlagRing::new(3, 2).unwrap();
        let top = r.top_monomial().clone();
        assert_eq!(top.exponents(), &[4, 3, 2]);
        let nf = r.normal_form(&RawPoly::from_monomial(top.clone())).unwrap();
        assert_eq!(nf.terms(), vec![top]);
    }

    #[test]
    fn top_equivalent_power_identity_case() {
        let r = FlagRing::new(3, 2).unwrap();
        for i in 1..=3 {
            let b = r.bounds()[i - 1];
            let mut exps = vec![0; 3];
            exps[i - 1] = b;
            assert_eq!(r.top_equivalent_power(i, b).unwrap(), RawPoly::from_monomial(Monomial::new(exps)));
        }
    }

    #[test]
    fn top_equivalent_power_differs_from_exact_by_neglected_terms() {
        // x_i^{m+k-j} + x_i^{m+k-i} e_{i-j} only involves basis elements
        // with n_i < m+k-i and nothing above x_i.
        for (k, m) in [(2, 1), (3, 2), (3, 3), (4, 1)] {
            let r = FlagRing::new(k, m).unwrap();
            for i in 1..=k {
                let b = r.bounds()[i - 1];
                for exponent in b..=(m + k) as u32 {
                    let mut exps = vec![0; k];
                    exps[i - 1] = exponent;
                    let diff = RawPoly::from_monomial(Monomial::new(exps))
                        .add(&r.top_equivalent_power(i, exponent).unwrap())
                        .unwrap();
                    for t in r.normal_form(&diff).unwrap().terms() {
                        let e = t.exponents();
                        assert!(e[i - 1] < b && e[i..].iter().all(|&x| x == 0), "F(1^{k},{m}) i={i} {t}");
                    }
                }
            }
        }
    }

    #[test]
    fn power_of_third_generator_matches_hand_step() {
        // in F(1^3, 2^e - 2): x3^{2^e} ≡ x1 x2 x3^{2^e - 2}
        for e in 2..=3u32 {
            let m = (1usize << e) - 2;
            let r = FlagRing::new(3, m).unwrap();
            let expected = RawPoly::from_monomial(Monomial::new(vec![1, 1, (1 << e) - 2]));
            assert_eq!(r.top_equivalent_power(3, 1 << e).unwrap(), expected);
        }
    }

    #[test]
    fn top_projection_agrees_with_normal_form_on_degree_dim_monomials() {
        for (k, m) in [(1, 3), (2, 1), (2, 2), (3, 1), (3, 2), (4, 1)] {
            let r = FlagRing::new(k, m).unwrap();
            let dim = r.dimension();
            for exps in monomials_of_degree(k, dim) {
                let p = RawPoly::from_monomial(Monomial::new(exps.clone()));
                let exact = r.normal_form(&p).unwrap().contains(r.top_monomial());
                let fast = r.top_projection_rewrite(&p).unwrap().contains(r.top_monomial());
                assert_eq!(exact, fast, "F(1^{k},{m}) {exps:?}");
            }
        }
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let a = FlagRing::new(2, 1).unwrap();
        let b = FlagRing::new(2, 2).unwrap();
        let x = a.normal_form(&raw("x1", 2)).unwrap();
        let y = b.normal_form(&raw("x1", 2)).unwrap();
        assert!(matches!(x.add(&y), Err(Error::RingMismatch { .. })));
        assert!(matches!(x.equals(&y), Err(Error::RingMismatch { .. })));
        assert!(matches!(a.normal_form(&raw("x1", 3)), Err(Error::VariableCountMismatch { .. })));
    }

    #[test]
    fn out_of_bounds_basis_monomial_rejected() {
        let r = FlagRing::new(2, 1).unwrap();
        assert!(matches!(r.element([mono(&[0, 2])]), Err(Error::NotInBasis(_))));
    }

    #[test]
    fn fault_breaks_relations() {
        let r = FlagRing::with_fault(2, 1, RuleFault { generator: 1 }).unwrap();
        let ok = r.verify_extended_relations().passed()
            && r.verify_annihilator().passed()
            && r.verify_heights().passed()
            && r.verify_tau_relations(6).passed();
        assert!(!ok);
    }

    #[test]
    fn combinations_enumerates_subsets() {
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(combinations(2, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(1, 2).is_empty());
    }
}
