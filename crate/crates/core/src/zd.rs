//! Products of zero-divisors `z[i,j] = x_{1,j} + x_{i,j}` and their text form.
//!
//! Grammar: factors `z[i,j]` (or `c[i,j]` on surfaces) with optional `^n`,
//! joined by `*` or juxtaposition; parentheses group factors under a common
//! power, so `(z[2,1]*z[2,2])^7` is `z[2,1]^7*z[2,2]^7`. In the two-fold
//! notation `zj` abbreviates `z[2,j]`. The empty product is written `1`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A product `prod z_{i,j}^{n_{i,j}}`, stored with one exponent per `(i, j)`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ZdSpec {
    factors: BTreeMap<(usize, usize), u32>,
}

impl ZdSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Multiplies in `z[i,j]^n`; `i` and `j` are one-based and `i >= 2`.
    pub fn push(&mut self, i: usize, j: usize, n: u32) -> Result<()> {
        if i < 2 {
            return Err(Error::IndexOutOfRange(format!("zero-divisor factor index {i} must be at least 2")));
        }
        if j < 1 {
            return Err(Error::IndexOutOfRange("generator index must be at least 1".into()));
        }
        if n > 0 {
            *self.factors.entry((i, j)).or_insert(0) += n;
        }
        Ok(())
    }

    pub fn with(mut self, i: usize, j: usize, n: u32) -> Result<Self> {
        self.push(i, j, n)?;
        Ok(self)
    }

    /// `prod_j z[i,j]^{exps[j-1]}` for a single tensor factor `i`.
    pub fn from_group(i: usize, exps: &[u32]) -> Result<Self> {
        let mut spec = Self::new();
        spec.push_group(i, exps)?;
        Ok(spec)
    }

    pub fn push_group(&mut self, i: usize, exps: &[u32]) -> Result<()> {
        for (j, &n) in exps.iter().enumerate() {
            self.push(i, j + 1, n)?;
        }
        Ok(())
    }

    pub fn product(&self, other: &ZdSpec) -> ZdSpec {
        let mut out = self.clone();
        for (&(i, j), &n) in &other.factors {
            *out.factors.entry((i, j)).or_insert(0) += n;
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Total degree, i.e. the number of zero-divisors multiplied.
    pub fn degree(&self) -> u64 {
        self.factors.values().map(|&n| n as u64).sum()
    }

    /// `(i, j, n)` triples in ascending `(i, j)` order.
    pub fn factors(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.factors.iter().map(|(&(i, j), &n)| (i, j, n))
    }

    pub fn exponent(&self, i: usize, j: usize) -> u32 {
        self.factors.get(&(i, j)).copied().unwrap_or(0)
    }

    /// Exponents of `z[i,1..=k]`.
    pub fn group(&self, i: usize, k: usize) -> Vec<u32> {
        (1..=k).map(|j| self.exponent(i, j)).collect()
    }

    pub fn max_factor(&self) -> usize {
        self.factors.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn max_generator(&self) -> usize {
        self.factors.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    pub fn parse(input: &str) -> Result<ZdSpec> {
        let mut p = SpecParser { input, pos: 0 };
        let spec = p.product()?;
        p.skip_ws();
        if p.pos < input.len() {
            return Err(Error::parse(input, p.pos, format!("unexpected '{}'", p.peek().unwrap_or(' '))));
        }
        Ok(spec)
    }

    /// Canonical text using the given generator letter (`z` or `c`).
    pub fn to_text(&self, symbol: char) -> String {
        if self.factors.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> = self
            .factors()
            .map(|(i, j, n)| match n {
                1 => format!("{symbol}[{i},{j}]"),
                _ => format!("{symbol}[{i},{j}]^{n}"),
            })
            .collect();
        parts.join("*")
    }
}

impl fmt::Display for ZdSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text('z'))
    }
}

impl fmt::Debug for ZdSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZdSpec({self})")
    }
}

impl Serialize for ZdSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ZdSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        ZdSpec::parse(&text).map_err(serde::de::Error::custom)
    }
}

struct SpecParser<'a> {
    input: &'a str,
    pos: usize,
}

impl SpecParser<'_> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.input[self.pos..].chars().next()
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::parse(self.input, self.pos, message)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn number(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        self.input[start..self.pos].parse().map_err(|_| Error::parse(self.input, start, "number too large"))
    }

    fn product(&mut self) -> Result<ZdSpec> {
        let mut spec = self.item()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    spec = spec.product(&self.item()?);
                }
                Some(c) if c == '(' || c == 'z' || c == 'c' || c.is_ascii_digit() => {
                    spec = spec.product(&self.item()?);
                }
                _ => return Ok(spec),
            }
        }
    }

    fn item(&mut self) -> Result<ZdSpec> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let n = self.number()?;
        let mut out = ZdSpec::new();
        for (i, j, e) in base.factors() {
            let total = e.checked_mul(n).ok_or_else(|| self.error("exponent too large"))?;
            out.push(i, j, total)?;
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<ZdSpec> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.product()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some('z') | Some('c') => {
                self.pos += 1;
                self.skip_ws();
                let (i, j) = if self.peek() == Some('[') {
                    self.pos += 1;
                    let i = self.number()? as usize;
                    self.expect(',')?;
                    let j = self.number()? as usize;
                    self.expect(']')?;
                    (i, j)
                } else {
                    (2, self.number()? as usize)
                };
                ZdSpec::new().with(i, j, 1).map_err(|e| Error::parse(self.input, start, e.to_string()))
            }
            Some(c) if c.is_ascii_digit() => {
                if self.number()? != 1 {
                    return Err(Error::parse(self.input, start, "only the constant 1 is allowed"));
                }
                Ok(ZdSpec::new())
            }
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bracket_form() {
        let s = ZdSpec::parse("z[2,1]^15 * z[2,2]^14 * z[3,1]^7").unwrap();
        assert_eq!(s.exponent(2, 1), 15);
        assert_eq!(s.exponent(3, 1), 7);
        assert_eq!(s.degree(), 36);
        assert_eq!(s.to_string(), "z[2,1]^15*z[2,2]^14*z[3,1]^7");
    }

    #[test]
    fn grouped_powers_expand() {
        let s = ZdSpec::parse("(z1*z2*z3)^7").unwrap();
        assert_eq!(s, ZdSpec::from_group(2, &[7, 7, 7]).unwrap());
        let t = ZdSpec::parse("(z[2,1]^2 z[3,1])^3 z[2,1]").unwrap();
        assert_eq!(t.exponent(2, 1), 7);
        assert_eq!(t.exponent(3, 1), 3);
    }

    #[test]
    fn surface_letter_and_unit() {
        let s = ZdSpec::parse("c[2,1]^3*c[3,1]^3").unwrap();
        assert_eq!(s.to_text('c'), "c[2,1]^3*c[3,1]^3");
        assert!(ZdSpec::parse("1").unwrap().is_empty());
        assert_eq!(ZdSpec::new().to_string(), "1");
    }

    #[test]
    fn errors_carry_columns() {
        match ZdSpec::parse("z[2,1]^3 * y") {
            Err(Error::Parse { line: 1, column: 12, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(ZdSpec::parse("z[1,1]"), Err(Error::Parse { column: 1, .. })));
        assert!(ZdSpec::parse("z[2,1]^").is_err());
        assert!(ZdSpec::parse("(z1").is_err());
    }

    #[test]
    fn round_trip() {
        for text in ["1", "z[2,1]", "z[2,1]^7*z[2,2]^6*z[2,3]^3*z[2,4]^2", "z[2,1]^3*z[3,1]^3*z[4,1]^2"] {
            let s = ZdSpec::parse(text).unwrap();
            assert_eq!(s.to_string(), text);
            assert_eq!(ZdSpec::parse(&s.to_string()).unwrap(), s);
        }
    }
}
