//! Names of the spaces the engine knows about.
//!
//! Accepted forms: `F(1^k,m)`, explicit lists `F(1,...,1,m)`, the complete
//! flag manifolds `F(1^k)` (= `F(1^{k-1},1)`) and `F5`/`F_5`, projective spaces
//! `RP^m` / `RP2`, and surfaces `N(n)` / `N_n`. Whitespace is ignored.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::GradedAlgebra;
use crate::error::{Error, Result};
use crate::flag_ring::FlagRing;
use crate::surface::SurfaceRing;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    Flag { k: usize, m: usize },
    Surface { n: usize },
}

impl Space {
    pub fn flag(k: usize, m: usize) -> Space {
        Space::Flag { k, m }
    }

    pub fn parse(input: &str) -> Result<Space> {
        let text: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |msg: &str| Error::parse(input, 0, format!("{msg} in space '{input}'"));
        let number = |s: &str| s.parse::<usize>().map_err(|_| bad("expected a number"));

        if let Some(rest) = text.strip_prefix("RP") {
            let m = number(rest.strip_prefix('^').unwrap_or(rest))?;
            return Self::checked(Space::Flag { k: 1, m });
        }
        if let Some(rest) = text.strip_prefix("N_") {
            return Self::checked(Space::Surface { n: number(rest)? });
        }
        if let Some(inner) = text.strip_prefix("N(").and_then(|r| r.strip_suffix(')')) {
            return Self::checked(Space::Surface { n: number(inner)? });
        }
        if let Some(rest) = text.strip_prefix("F_").or_else(|| text.strip_prefix('F').filter(|r| !r.starts_with('('))) {
            let n = number(rest)?;
            if n < 2 {
                return Err(bad("complete flag index must be at least 2"));
            }
            return Self::checked(Space::Flag { k: n - 1, m: 1 });
        }
        let inner = text
            .strip_prefix("F(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| bad("unknown space"))?;
        let parts: Vec<&str> = inner.split(',').collect();
        match parts.as_slice() {
            [single] => {
                let k = number(single.strip_prefix("1^").ok_or_else(|| bad("expected 1^k"))?)?;
                if k < 2 {
                    return Err(bad("F(1^k) needs k >= 2"));
                }
                Self::checked(Space::Flag { k: k - 1, m: 1 })
            }
            [ones, m] if ones.starts_with("1^") => Self::checked(Space::Flag { k: number(&ones[2..])?, m: number(m)? }),
            [init @ .., last] => {
                if init.iter().any(|p| *p != "1") {
                    return Err(bad("only one block may exceed 1"));
                }
                Self::checked(Space::Flag { k: init.len(), m: number(last)? })
            }
            [] => Err(bad("empty")),
        }
    }

    fn checked(space: Space) -> Result<Space> {
        match space {
            Space::Flag { k, m } if k < 1 || m < 1 => {
                Err(Error::InvalidParameters(format!("F(1^{k},{m}) needs k >= 1 and m >= 1")))
            }
            Space::Surface { n } if n < 1 => Err(Error::InvalidParameters("surface genus must be at least 1".into())),
            s => Ok(s),
        }
    }

    pub fn dim(&self) -> u32 {
        match *self {
            Space::Flag { k, m } => (k * m + k * (k - 1) / 2) as u32,
            Space::Surface { .. } => 2,
        }
    }

    /// Letter used for zero-divisors over this space.
    pub fn zd_symbol(&self) -> char {
        match self {
            Space::Flag { .. } => 'z',
            Space::Surface { .. } => 'c',
        }
    }

    pub fn algebra(&self) -> Result<Arc<dyn GradedAlgebra>> {
        Ok(match *self {
            Space::Flag { k, m } => FlagRing::new(k, m)?,
            Space::Surface { n } => SurfaceRing::new(n)?,
        })
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Flag { k, m } => write!(f, "F(1^{k},{m})"),
            Space::Surface { n } => write!(f, "N({n})"),
        }
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Space> {
        Space::parse(s)
    }
}

impl Serialize for Space {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Space {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Space::parse(&text).map_err(serde::de::Error::custom)
    }
}
