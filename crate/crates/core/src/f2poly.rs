//! Multivariate polynomials over GF(2), before any quotient relations.
//!
//! Variables are indexed from zero internally; `x1` in text is index 0.
//! Polynomials are sets of monomials (coefficient one when present), so
//! addition is symmetric difference.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};

/// An exponent vector `(n_1, ..., n_k)` standing for `x1^n_1 * ... * xk^n_k`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Self { exps }
    }

    pub fn one(nvars: usize) -> Self {
        Self { exps: vec![0; nvars] }
    }

    /// The single variable `x_{var+1}`.
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[var] = 1;
        Self { exps }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        Monomial { exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect() }
    }
}

/// Graded lexicographic order: total degree first, then `x1` exponent, `x2`, ...
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_power_product(f, "x", &self.exps)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Writes `p1^a*p2^b...` with `prefix` before each 1-based index, or `1`.
pub(crate) fn write_power_product(f: &mut impl fmt::Write, prefix: &str, exps: &[u32]) -> fmt::Result {
    let mut first = true;
    for (i, &e) in exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_char('*')?;
        }
        first = false;
        write!(f, "{prefix}{}", i + 1)?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    if first {
        f.write_char('1')?;
    }
    Ok(())
}

/// A polynomial in `nvars` variables over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RawPoly {
    nvars: usize,
    terms: BTreeSet<Monomial>,
}

impl RawPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeSet::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_monomial(Monomial::one(nvars))
    }

    pub fn var(nvars: usize, var: usize) -> Self {
        Self::from_monomial(Monomial::var(nvars, var))
    }

    pub fn from_monomial(m: Monomial) -> Self {
        let nvars = m.nvars();
        Self { nvars, terms: BTreeSet::from([m]) }
    }

    /// Builds a polynomial from monomials, cancelling repeated terms in pairs.
    pub fn from_monomials(nvars: usize, monomials: impl IntoIterator<Item = Monomial>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for m in monomials {
            if m.nvars() != nvars {
                return Err(Error::VariableCountMismatch { expected: nvars, found: m.nvars() });
            }
            p.toggle(m);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = &Monomial> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.contains(m)
    }

    pub fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    /// Highest total degree of a term, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.iter().map(Monomial::degree);
        match degrees.next() {
            Some(d) => degrees.all(|e| e == d),
            None => true,
        }
    }

    fn check_vars(&self, other: &RawPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VariableCountMismatch { expected: self.nvars, found: other.nvars });
        }
        Ok(())
    }

    pub fn add(&self, other: &RawPoly) -> Result<RawPoly> {
        self.check_vars(other)?;
        let terms = self.terms.symmetric_difference(&other.terms).cloned().collect();
        Ok(RawPoly { nvars: self.nvars, terms })
    }

    pub fn mul(&self, other: &RawPoly) -> Result<RawPoly> {
        self.check_vars(other)?;
        let mut acc: HashSet<Monomial> = HashSet::new();
        for a in &self.terms {
            for b in &other.terms {
                let m = a.mul(b);
                if !acc.remove(&m) {
                    acc.insert(m);
                }
            }
        }
        Ok(RawPoly { nvars: self.nvars, terms: acc.into_iter().collect() })
    }

    pub fn pow(&self, n: u32) -> RawPoly {
        let mut result = RawPoly::one(self.nvars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base).expect("same variable count");
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base).expect("same variable count");
            }
        }
        result
    }

    /// Applies a permutation of the variables: `x_i` is sent to `x_{perm[i]}`.
    pub fn permute(&self, perm: &[usize]) -> RawPoly {
        let terms = self
            .terms
            .iter()
            .map(|m| {
                let mut exps = vec![0; self.nvars];
                for (i, &e) in m.exponents().iter().enumerate() {
                    exps[perm[i]] = e;
                }
                Monomial::new(exps)
            })
            .collect();
        RawPoly { nvars: self.nvars, terms }
    }

    /// Parses the text grammar `x1^3*x2 + x3`: terms joined by `+`, factors by
    /// `*` or juxtaposition, parenthesised sub-expressions with powers allowed.
    pub fn parse(input: &str, nvars: usize) -> Result<RawPoly> {
        let mut parser = PolyParser { input, pos: 0, nvars };
        parser.skip_ws();
        let p = parser.sum()?;
        parser.skip_ws();
        if parser.pos < input.len() {
            return Err(Error::parse(input, parser.pos, "unexpected trailing input"));
        }
        Ok(p)
    }
}

impl fmt::Display for RawPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, m) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for RawPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

struct PolyParser<'a> {
    input: &'a str,
    pos: usize,
    nvars: usize,
}

impl PolyParser<'_> {
    fn peek(&self) -> Option<char> {
        self.input[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn number(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(self.input, start, "expected a number"));
        }
        self.input[start..self.pos]
            .parse()
            .map_err(|_| Error::parse(self.input, start, "number out of range"))
    }

    fn sum(&mut self) -> Result<RawPoly> {
        let mut acc = self.product()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('+') {
                self.pos += 1;
                let rhs = self.product()?;
                acc = acc.add(&rhs)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<RawPoly> {
        let mut acc = self.power()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                }
                Some(c) if c == 'x' || c == '(' || c.is_ascii_digit() => {}
                _ => return Ok(acc),
            }
            let rhs = self.power()?;
            acc = acc.mul(&rhs)?;
        }
    }

    fn power(&mut self) -> Result<RawPoly> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() == Some('^') {
            self.pos += 1;
            let n = self.number()?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RawPoly> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('x') => {
                self.pos += 1;
                let idx = self.number()? as usize;
                if idx == 0 || idx > self.nvars {
                    return Err(Error::parse(
                        self.input,
                        start,
                        format!("variable x{idx} outside x1..x{}", self.nvars),
                    ));
                }
                Ok(RawPoly::var(self.nvars, idx - 1))
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.sum()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(Error::parse(self.input, self.pos, "expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.number()?;
                Ok(if n % 2 == 1 { RawPoly::one(self.nvars) } else { RawPoly::zero(self.nvars) })
            }
            _ => Err(Error::parse(self.input, start, "expected a variable, constant or '('")),
        }
    }
}

/// Elementary symmetric polynomial `e_t` in the variables `vars` (zero-based).
///
/// Built with `e_t(S + x) = e_t(S) + x e_{t-1}(S)`.
pub fn elementary_symmetric(t: u32, vars: &[usize], nvars: usize) -> RawPoly {
    let t = t as usize;
    if t > vars.len() {
        return RawPoly::zero(nvars);
    }
    // row[j] = e_j over the variables processed so far
    let mut row: Vec<RawPoly> = (0..=t).map(|j| if j == 0 { RawPoly::one(nvars) } else { RawPoly::zero(nvars) }).collect();
    for &v in vars {
        let x = RawPoly::var(nvars, v);
        for j in (1..=t).rev() {
            let shifted = x.mul(&row[j - 1]).expect("same variable count");
            row[j] = row[j].add(&shifted).expect("same variable count");
        }
    }
    row.swap_remove(t)
}

/// Complete symmetric polynomial `h_t` in the variables `vars` (zero-based).
///
/// Built with `h_t(S + x) = h_t(S) + x h_{t-1}(S + x)`.
pub fn complete_symmetric(t: u32, vars: &[usize], nvars: usize) -> RawPoly {
    let t = t as usize;
    if t == 0 {
        return RawPoly::one(nvars);
    }
    let mut row: Vec<RawPoly> = (0..=t).map(|j| if j == 0 { RawPoly::one(nvars) } else { RawPoly::zero(nvars) }).collect();
    for &v in vars {
        let x = RawPoly::var(nvars, v);
        for j in 1..=t {
            let shifted = x.mul(&row[j - 1]).expect("same variable count");
            row[j] = row[j].add(&shifted).expect("same variable count");
        }
    }
    row.swap_remove(t)
}

/// Checks `sum_{t=0}^{j} e_t h_{j-t} = 0` in `x1..xk` over GF(2).
pub fn verify_eh_identity(j: u32, k: usize) -> bool {
    let vars: Vec<usize> = (0..k).collect();
    let mut acc = RawPoly::zero(k);
    for t in 0..=j {
        let term = elementary_symmetric(t, &vars, k)
            .mul(&complete_symmetric(j - t, &vars, k))
            .expect("same variable count");
        acc = acc.add(&term).expect("same variable count");
    }
    acc.is_zero()
}

/// All exponent vectors over `nvars` variables with total degree `degree`,
/// in ascending lexicographic order of the exponent vector.
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; nvars];
    fn rec(i: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let n = current.len();
        if n == 0 {
            if remaining == 0 {
                out.push(Vec::new());
            }
            return;
        }
        if i == n - 1 {
            current[i] = remaining;
            out.push(current.clone());
            return;
        }
        for e in 0..=remaining {
            current[i] = e;
            rec(i + 1, remaining - e, current, out);
        }
        current[i] = 0;
    }
    rec(0, degree, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> RawPoly {
        RawPoly::parse(s, n).unwrap()
    }

    #[test]
    fn addition_cancels_mod_two() {
        let a = p("x1 + x2", 2);
        let b = p("x2 + x1^2", 2);
        assert_eq!(a.add(&b).unwrap(), p("x1 + x1^2", 2));
        assert!(a.add(&a).unwrap().is_zero());
        assert_eq!(a.add(&RawPoly::zero(2)).unwrap(), a);
    }

    #[test]
    fn multiplication_examples() {
        let s = p("x1 + x2", 2);
        assert_eq!(s.mul(&s).unwrap(), p("x1^2 + x2^2", 2));
        assert_eq!(p("x1", 2).mul(&p("x2", 2)).unwrap(), p("x1 x2", 2));
        let t = p("1 + x1", 1);
        assert_eq!(t.mul(&t).unwrap(), p("1 + x1^2", 1));
    }

    #[test]
    fn variable_count_mismatch_is_an_error() {
        let a = RawPoly::var(2, 0);
        let b = RawPoly::var(3, 0);
        assert!(matches!(a.add(&b), Err(Error::VariableCountMismatch { .. })));
        assert!(matches!(a.mul(&b), Err(Error::VariableCountMismatch { .. })));
    }

    #[test]
    fn symmetric_polynomial_examples() {
        assert_eq!(elementary_symmetric(2, &[0, 1, 2], 3), p("x1x2 + x1x3 + x2x3", 3));
        assert_eq!(elementary_symmetric(0, &[0, 1], 2), RawPoly::one(2));
        assert_eq!(elementary_symmetric(0, &[], 2), RawPoly::one(2));
        assert!(elementary_symmetric(3, &[0, 1], 2).is_zero());
        assert_eq!(complete_symmetric(2, &[0, 1], 2), p("x1^2 + x1x2 + x2^2", 2));
        assert_eq!(complete_symmetric(0, &[0, 1, 2], 3), RawPoly::one(3));
        assert_eq!(complete_symmetric(1, &[0, 1, 2], 3), p("x1 + x2 + x3", 3));
        assert!(complete_symmetric(2, &[], 2).is_zero());
    }

    #[test]
    fn complete_symmetric_has_every_monomial_once() {
        let h = complete_symmetric(4, &[0, 1, 2], 3);
        let expected = RawPoly::from_monomials(3, monomials_of_degree(3, 4).into_iter().map(Monomial::new)).unwrap();
        assert_eq!(h, expected);
        assert_eq!(h.len(), 15);
    }

    #[test]
    fn eh_identity_examples() {
        assert!(verify_eh_identity(1, 1));
        assert!(verify_eh_identity(3, 2));
        assert!(verify_eh_identity(5, 4));
    }

    #[test]
    fn eh_identity_small_range() {
        for j in 1..=8 {
            for k in 1..=8 {
                assert!(verify_eh_identity(j, k), "j={j} k={k}");
            }
        }
    }

    #[test]
    fn decomposition_of_complete_symmetric() {
        // h_j(x1..xk) = h_j(x1..x_{k-1}) + x_k h_{j-1}(x1..xk)
        for k in 1..=4usize {
            let all: Vec<usize> = (0..k).collect();
            for j in 1..=6 {
                let lhs = complete_symmetric(j, &all, k);
                let rhs = complete_symmetric(j, &all[..k - 1], k)
                    .add(&RawPoly::var(k, k - 1).mul(&complete_symmetric(j - 1, &all, k)).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn parse_and_display() {
        let q = p(" x1^3 *x2+ x3 ", 3);
        assert_eq!(q.to_string(), "x1^3*x2 + x3");
        assert_eq!(p("(x1+x2)^2", 2).to_string(), "x1^2 + x2^2");
        assert_eq!(p("0", 2).to_string(), "0");
        assert_eq!(p("1 + x2", 2).to_string(), "x2 + 1");
        let err = RawPoly::parse("x1 + x4", 3).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 6, .. }), "{err}");
        assert!(RawPoly::parse("x1 +", 3).is_err());
        assert!(RawPoly::parse("x1 )", 3).is_err());
    }

    #[test]
    fn monomials_of_degree_counts() {
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
        assert_eq!(monomials_of_degree(1, 5), vec![vec![5]]);
        assert_eq!(monomials_of_degree(0, 0), vec![Vec::<u32>::new()]);
        assert!(monomials_of_degree(0, 1).is_empty());
    }
}
