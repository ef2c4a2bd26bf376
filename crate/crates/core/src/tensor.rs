//! Tensor powers `H^{⊗s}` of a graded algebra and products of zero-divisors.
//!
//! A zero-divisor power expands as
//! `z_{i,j}^n = (x_{1,j} + x_{i,j})^n = sum_{a ⊆ n} x_{1,j}^a x_{i,j}^{n-a}`,
//! where `a ⊆ n` runs over the bitwise submasks of `n` (Lucas). Collecting the
//! factor-`i` part of a product by basis element `b` of that factor gives
//! `P_i = sum_b A_{i,b} ⊗ b` with `A_{i,b}` living in the first factor, and
//! the whole product is `sum (A_{2,b_2} ... A_{s,b_s}) ⊗ b_2 ⊗ ... ⊗ b_s`.
//! Elements are stored in that shape: a map from the factors `2..s` to the
//! first-factor coefficient.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::algebra::GradedAlgebra;
use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::f2poly::write_power_product;
use crate::zd::ZdSpec;

/// Default bound on the number of basis tuples materialized by
/// [`TensorRing::evaluate`].
pub const DEFAULT_TERM_CEILING: u64 = 100_000_000;

/// `H^{⊗s}` for a finite graded algebra `H`.
#[derive(Clone)]
pub struct TensorRing {
    base: Arc<dyn GradedAlgebra>,
    s: usize,
}

/// A first-factor coefficient for each basis element of factors `2..s`.
type Grouped = BTreeMap<Vec<u32>, BitVector>;

impl TensorRing {
    pub fn new(base: Arc<dyn GradedAlgebra>, s: usize) -> Result<TensorRing> {
        if s < 2 {
            return Err(Error::InvalidParameters(format!("tensor power s = {s} must be at least 2")));
        }
        Ok(TensorRing { base, s })
    }

    pub fn base(&self) -> &Arc<dyn GradedAlgebra> {
        &self.base
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// `s` times the dimension of the base.
    pub fn top_degree(&self) -> u32 {
        self.s as u32 * self.base.dim()
    }

    /// The same base with one more tensor factor.
    pub fn extended(&self) -> TensorRing {
        TensorRing { base: Arc::clone(&self.base), s: self.s + 1 }
    }

    fn same_as(&self, other: &TensorRing) -> bool {
        self.s == other.s && (Arc::ptr_eq(&self.base, &other.base) || self.base.label() == other.base.label())
    }

    fn check(&self, other: &TensorRing) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::RingMismatch { left: self.label(), right: other.label() })
        }
    }

    pub fn label(&self) -> String {
        format!("{}^⊗{}", self.base.label(), self.s)
    }

    pub fn zero(&self) -> TensorElement {
        TensorElement { ring: self.clone(), groups: Grouped::new() }
    }

    pub fn one(&self) -> TensorElement {
        let rest = vec![self.base.unit_index() as u32; self.s - 1];
        TensorElement { ring: self.clone(), groups: Grouped::from([(rest, self.base.one())]) }
    }

    fn element(&self, groups: Grouped) -> TensorElement {
        TensorElement { ring: self.clone(), groups }
    }

    /// `a` placed in tensor factor `factor` (one-based), unit elsewhere.
    pub fn lift(&self, factor: usize, a: &BitVector) -> Result<TensorElement> {
        if factor < 1 || factor > self.s {
            return Err(Error::IndexOutOfRange(format!("tensor factor {factor} of {}", self.s)));
        }
        if a.len() != self.base.basis_len() {
            return Err(Error::InvalidParameters("element does not belong to the base ring".into()));
        }
        let unit = self.base.unit_index() as u32;
        let mut groups = Grouped::new();
        if factor == 1 {
            if !a.is_zero() {
                groups.insert(vec![unit; self.s - 1], a.clone());
            }
        } else {
            for b in a.ones() {
                let mut rest = vec![unit; self.s - 1];
                rest[factor - 2] = b as u32;
                groups.insert(rest, self.base.one());
            }
        }
        Ok(self.element(groups))
    }

    /// `x_{factor,j}`: generator `j` (one-based) in the given tensor factor.
    pub fn generator(&self, factor: usize, j: usize) -> Result<TensorElement> {
        self.check_generator(j)?;
        let mut exps = vec![0; self.base.generator_count()];
        exps[j - 1] = 1;
        self.lift(factor, &self.base.generator_monomial(&exps))
    }

    fn check_generator(&self, j: usize) -> Result<()> {
        if j < 1 || j > self.base.generator_count() {
            return Err(Error::IndexOutOfRange(format!("generator {j} of {}", self.base.generator_count())));
        }
        Ok(())
    }

    /// `z_{i,j} = x_{1,j} + x_{i,j}`.
    pub fn zero_divisor(&self, i: usize, j: usize) -> Result<TensorElement> {
        if i < 2 || i > self.s {
            return Err(Error::IndexOutOfRange(format!("zero-divisor factor {i} outside 2..={}", self.s)));
        }
        self.generator(1, j)?.add(&self.generator(i, j)?)
    }

    /// Element with the given basis tuples (repeats cancel).
    pub fn from_tuples<'a>(&self, tuples: impl IntoIterator<Item = &'a [usize]>) -> Result<TensorElement> {
        let mut groups = Grouped::new();
        for t in tuples {
            self.check_tuple(t)?;
            let rest: Vec<u32> = t[1..].iter().map(|&b| b as u32).collect();
            groups.entry(rest).or_insert_with(|| self.base.zero()).toggle(t[0]);
        }
        groups.retain(|_, v| !v.is_zero());
        Ok(self.element(groups))
    }

    fn check_tuple(&self, tuple: &[usize]) -> Result<()> {
        if tuple.len() != self.s {
            return Err(Error::IndexOutOfRange(format!("tuple of length {} in a {}-fold tensor power", tuple.len(), self.s)));
        }
        if let Some(&b) = tuple.iter().find(|&&b| b >= self.base.basis_len()) {
            return Err(Error::IndexOutOfRange(format!("basis index {b} of {}", self.base.basis_len())));
        }
        Ok(())
    }

    /// Basis tuple of the top class `top ⊗ ... ⊗ top`.
    pub fn top_tuple(&self) -> Vec<usize> {
        vec![self.base.top_index(); self.s]
    }

    pub fn validate(&self, spec: &ZdSpec) -> Result<()> {
        if spec.max_factor() > self.s {
            return Err(Error::IndexOutOfRange(format!("factor {} in a {}-fold tensor power", spec.max_factor(), self.s)));
        }
        if spec.max_generator() > self.base.generator_count() {
            return Err(Error::IndexOutOfRange(format!(
                "generator {} of {}",
                spec.max_generator(),
                self.base.generator_count()
            )));
        }
        Ok(())
    }

    fn group_exponents(&self, spec: &ZdSpec) -> Vec<Vec<u32>> {
        (2..=self.s).map(|i| spec.group(i, self.base.generator_count())).collect()
    }

    /// Submasks `a ⊆ n` per coordinate with both `x^a` and `x^{n-a}` possibly
    /// nonzero; `None` if some coordinate admits none.
    fn submask_choices(&self, exps: &[u32]) -> Option<Vec<Vec<u32>>> {
        let mut choices = Vec::with_capacity(exps.len());
        for (j, &n) in exps.iter().enumerate() {
            let h = self.base.generator_height(j);
            let mut list = Vec::new();
            let mut a = n;
            loop {
                if a <= h && n - a <= h {
                    list.push(a);
                }
                if a == 0 {
                    break;
                }
                a = (a - 1) & n;
            }
            if list.is_empty() {
                return None;
            }
            list.reverse();
            choices.push(list);
        }
        Some(choices)
    }

    /// `sum_b A_b ⊗ b` for one tensor factor with zero-divisor exponents `exps`,
    /// as the nonzero pairs `(b, A_b)` in ascending `b`.
    pub(crate) fn factor_group(&self, exps: &[u32]) -> Vec<(usize, BitVector)> {
        let base = &*self.base;
        let Some(choices) = self.submask_choices(exps) else {
            return Vec::new();
        };
        let mut by_basis: BTreeMap<usize, BitVector> = BTreeMap::new();
        let mut right = base.zero();
        let mut left = base.zero();
        for_each_choice(&choices, &mut |a| {
            let rest: Vec<u32> = exps.iter().zip(a).map(|(n, a)| n - a).collect();
            right.clear();
            base.xor_generator_monomial_into(&rest, &mut right);
            if right.is_zero() {
                return;
            }
            left.clear();
            base.xor_generator_monomial_into(a, &mut left);
            if left.is_zero() {
                return;
            }
            for b in right.ones() {
                by_basis.entry(b).or_insert_with(|| base.zero()).xor_assign(&left);
            }
        });
        by_basis.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    /// First-factor coefficient `A_top` of the top basis element in one
    /// tensor factor's expansion.
    pub(crate) fn top_group(&self, exps: &[u32]) -> BitVector {
        let base = &*self.base;
        let dim = base.dim() as u64;
        let mut acc = base.zero();
        let Some(choices) = self.submask_choices(exps) else {
            return acc;
        };
        let total: u64 = exps.iter().map(|&n| n as u64).sum();
        if total < dim {
            return acc;
        }
        let mut rest = vec![0u32; exps.len()];
        for_each_choice(&choices, &mut |a| {
            let left_degree: u64 = a.iter().map(|&x| x as u64).sum();
            if total - left_degree != dim {
                return;
            }
            for ((r, n), x) in rest.iter_mut().zip(exps).zip(a) {
                *r = n - x;
            }
            if base.top_coefficient_of_monomial(&rest) {
                base.xor_generator_monomial_into(a, &mut acc);
            }
        });
        acc
    }

    /// The product, fully expanded in the tensor basis. Fails with
    /// [`Error::ResourceExceeded`] once more than `ceiling` basis tuples would be
    /// produced.
    pub fn evaluate(&self, spec: &ZdSpec, ceiling: u64) -> Result<TensorElement> {
        self.validate(spec)?;
        if spec.degree() > self.top_degree() as u64 {
            return Ok(self.zero());
        }
        let groups: Vec<Vec<(usize, BitVector)>> = self.group_exponents(spec).iter().map(|e| self.factor_group(e)).collect();
        let mut out = Grouped::new();
        let mut terms = 0u64;
        let mut key = Vec::with_capacity(self.s - 1);
        self.expand(&groups, &mut key, &self.base.one(), &mut out, &mut terms, ceiling)?;
        Ok(self.element(out))
    }

    fn expand(
        &self,
        groups: &[Vec<(usize, BitVector)>],
        key: &mut Vec<u32>,
        acc: &BitVector,
        out: &mut Grouped,
        terms: &mut u64,
        ceiling: u64,
    ) -> Result<()> {
        let depth = key.len();
        if depth == groups.len() {
            *terms += acc.count_ones() as u64;
            if *terms > ceiling {
                return Err(Error::ResourceExceeded(format!("more than {ceiling} tensor basis terms")));
            }
            out.insert(key.clone(), acc.clone());
            return Ok(());
        }
        for (b, a) in &groups[depth] {
            let next = self.base.mul(acc, a);
            if next.is_zero() {
                continue;
            }
            key.push(*b as u32);
            self.expand(groups, key, &next, out, terms, ceiling)?;
            key.pop();
        }
        Ok(())
    }

    /// The product computed by literally multiplying zero-divisors one at a
    /// time with [`TensorElement::mul`].
    pub fn evaluate_by_multiplication(&self, spec: &ZdSpec) -> Result<TensorElement> {
        self.validate(spec)?;
        let mut acc = self.one();
        for (i, j, n) in spec.factors() {
            let z = self.zero_divisor(i, j)?;
            for _ in 0..n {
                acc = acc.mul(&z)?;
                if acc.is_zero() {
                    return Ok(acc);
                }
            }
        }
        Ok(acc)
    }

    /// Whether the product is nonzero, stopping at the first surviving term.
    pub fn is_nonzero(&self, spec: &ZdSpec) -> Result<bool> {
        self.validate(spec)?;
        let degree = spec.degree();
        let top = self.top_degree() as u64;
        if degree > top {
            return Ok(false);
        }
        if degree == top {
            return self.top_coefficient(spec);
        }
        let mut groups: Vec<Vec<(usize, BitVector)>> = self.group_exponents(spec).iter().map(|e| self.factor_group(e)).collect();
        if groups.iter().any(Vec::is_empty) {
            return Ok(false);
        }
        groups.sort_by_key(Vec::len);
        Ok(self.any_survivor(&groups, &self.base.one()))
    }

    fn any_survivor(&self, groups: &[Vec<(usize, BitVector)>], acc: &BitVector) -> bool {
        let Some((first, rest)) = groups.split_first() else {
            return !acc.is_zero();
        };
        first.iter().any(|(_, a)| {
            let next = self.base.mul(acc, a);
            !next.is_zero() && self.any_survivor(rest, &next)
        })
    }

    /// Coefficient of `top ⊗ ... ⊗ top` in a product of degree `s·dim`.
    pub fn top_coefficient(&self, spec: &ZdSpec) -> Result<bool> {
        self.validate(spec)?;
        let top = self.top_degree() as u64;
        if spec.degree() != top {
            return Err(Error::DegreeMismatch { expected: top, found: spec.degree() });
        }
        let tops: Vec<BitVector> = self.group_exponents(spec).iter().map(|e| self.top_group(e)).collect();
        Ok(self.pair_top_groups(&self.base.one(), &tops))
    }

    /// `[top](prefix * A_1 * ... * A_r)`, with the last product done as a pairing.
    pub(crate) fn pair_top_groups(&self, prefix: &BitVector, tops: &[BitVector]) -> bool {
        let Some((last, init)) = tops.split_last() else {
            return prefix.get(self.base.top_index());
        };
        let mut acc = prefix.clone();
        for a in init {
            if acc.is_zero() {
                return false;
            }
            acc = self.base.mul(&acc, a);
        }
        !acc.is_zero() && self.base.top_pairing(&acc, last)
    }

    /// `prod_j z_{s+1,j}^{t_j}` where `prod_j x_j^{t_j}` is the top class.
    pub fn padding_spec(&self) -> ZdSpec {
        ZdSpec::from_group(self.s + 1, &self.base.top_exponents()).expect("factor index is at least 3")
    }

    /// `a` times the padding product, in the `(s+1)`-fold power.
    pub fn pad_with_top_factor(&self, a: &TensorElement) -> Result<TensorElement> {
        self.check(&a.ring)?;
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        let bigger = self.extended();
        let unit = self.base.unit_index() as u32;
        let groups: Grouped = a
            .groups
            .iter()
            .map(|(rest, v)| {
                let mut key = rest.clone();
                key.push(unit);
                (key, v.clone())
            })
            .collect();
        let padding = bigger.evaluate(&self.padding_spec(), DEFAULT_TERM_CEILING)?;
        bigger.element(groups).mul(&padding)
    }

    /// Text for one basis tuple; `λ`/`ρ` letters in the two-fold power of a
    /// flag ring, `⊗`-separated factors otherwise.
    pub fn format_tuple(&self, tuple: &[usize]) -> String {
        let base = &*self.base;
        if self.s == 2 && base.generator_symbol() == "x" {
            let mut text = String::new();
            for (prefix, &b) in ["λ", "ρ"].iter().zip(tuple) {
                let exps = base.basis_exponents(b);
                if exps.iter().any(|&e| e > 0) {
                    if !text.is_empty() {
                        text.push('*');
                    }
                    write_power_product(&mut text, prefix, &exps).expect("writing to a String");
                }
            }
            if text.is_empty() {
                text.push('1');
            }
            return text;
        }
        tuple.iter().map(|&b| base.basis_label(b)).collect::<Vec<_>>().join(" ⊗ ")
    }
}

impl fmt::Debug for TensorRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Calls `f` with every combination of one entry per list.
fn for_each_choice(choices: &[Vec<u32>], f: &mut impl FnMut(&[u32])) {
    let mut idx = vec![0usize; choices.len()];
    let mut current: Vec<u32> = choices.iter().map(|c| c[0]).collect();
    loop {
        f(&current);
        let mut pos = 0;
        loop {
            if pos == choices.len() {
                return;
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                current[pos] = choices[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            current[pos] = choices[pos][0];
            pos += 1;
        }
    }
}

/// An element of a [`TensorRing`].
#[derive(Clone)]
pub struct TensorElement {
    ring: TensorRing,
    groups: Grouped,
}

impl TensorElement {
    pub fn ring(&self) -> &TensorRing {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.groups.is_empty()
    }

    /// Number of basis tuples with coefficient one.
    pub fn term_count(&self) -> u64 {
        self.groups.values().map(|v| v.count_ones() as u64).sum()
    }

    /// Basis tuples present, in ascending order.
    pub fn tuples(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::with_capacity(self.term_count() as usize);
        for (rest, first) in &self.groups {
            for b in first.ones() {
                let mut t = Vec::with_capacity(self.ring.s);
                t.push(b);
                t.extend(rest.iter().map(|&r| r as usize));
                out.push(t);
            }
        }
        out.sort();
        out
    }

    /// Basis tuples rendered with [`TensorRing::format_tuple`].
    pub fn term_strings(&self) -> Vec<String> {
        self.tuples().iter().map(|t| self.ring.format_tuple(t)).collect()
    }

    pub fn coefficient_of(&self, tuple: &[usize]) -> Result<bool> {
        self.ring.check_tuple(tuple)?;
        let rest: Vec<u32> = tuple[1..].iter().map(|&b| b as u32).collect();
        Ok(self.groups.get(&rest).is_some_and(|v| v.get(tuple[0])))
    }

    /// Largest total degree among the terms.
    pub fn degree(&self) -> Option<u32> {
        let base = &*self.ring.base;
        self.groups
            .iter()
            .flat_map(|(rest, first)| {
                let d: u32 = rest.iter().map(|&b| base.basis_degree(b as usize)).sum();
                first.ones().map(move |b| d + base.basis_degree(b))
            })
            .max()
    }

    pub fn add(&self, other: &TensorElement) -> Result<TensorElement> {
        self.ring.check(&other.ring)?;
        let mut groups = self.groups.clone();
        for (rest, v) in &other.groups {
            let slot = groups.entry(rest.clone()).or_insert_with(|| self.ring.base.zero());
            slot.xor_assign(v);
            if slot.is_zero() {
                groups.remove(rest);
            }
        }
        Ok(self.ring.element(groups))
    }

    /// Componentwise product, reduced in every factor.
    pub fn mul(&self, other: &TensorElement) -> Result<TensorElement> {
        self.ring.check(&other.ring)?;
        let base = &*self.ring.base;
        let mut out = Grouped::new();
        let mut scratch = Vec::new();
        for (ra, va) in &self.groups {
            for (rb, vb) in &other.groups {
                scratch.clear();
                for (&x, &y) in ra.iter().zip(rb) {
                    let mut p = base.zero();
                    base.mul_basis_into(x as usize, y as usize, &mut p);
                    scratch.push(p.ones().map(|t| t as u32).collect::<Vec<u32>>());
                }
                if scratch.iter().any(Vec::is_empty) {
                    continue;
                }
                let first = base.mul(va, vb);
                if first.is_zero() {
                    continue;
                }
                let mut idx = vec![0usize; scratch.len()];
                loop {
                    let key: Vec<u32> = idx.iter().zip(&scratch).map(|(&i, s)| s[i]).collect();
                    out.entry(key).or_insert_with(|| base.zero()).xor_assign(&first);
                    let mut pos = 0;
                    while pos < idx.len() {
                        idx[pos] += 1;
                        if idx[pos] < scratch[pos].len() {
                            break;
                        }
                        idx[pos] = 0;
                        pos += 1;
                    }
                    if pos == idx.len() {
                        break;
                    }
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        Ok(self.ring.element(out))
    }

    /// Image under the iterated cup product `H^{⊗s} -> H`.
    pub fn diagonal(&self) -> BitVector {
        let base = &*self.ring.base;
        let mut out = base.zero();
        for (rest, first) in &self.groups {
            let mut acc = first.clone();
            for &b in rest {
                acc = base.mul(&acc, &BitVector::unit(base.basis_len(), b as usize));
            }
            out.xor_assign(&acc);
        }
        out
    }
}

impl PartialEq for TensorElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same_as(&other.ring) && self.groups == other.groups
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.term_strings();
        if terms.is_empty() {
            write!(f, "0 in {}", self.ring.label())
        } else {
            write!(f, "{} in {}", terms.join(" + "), self.ring.label())
        }
    }
}
