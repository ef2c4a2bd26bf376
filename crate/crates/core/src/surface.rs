//! Mod-2 cohomology of the non-orientable surface `N_n = #^n RP^2`.
//!
//! Basis `1, a_1, ..., a_n, T` with `a_i a_j = 0` for `i != j` and
//! `a_i^2 = T`. Everything in degree three or more vanishes.

use std::sync::Arc;

use crate::algebra::GradedAlgebra;
use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::flag_ring::FlagRing;
use crate::tensor::{TensorElement, TensorRing};
use crate::zd::ZdSpec;

#[derive(Debug)]
pub struct SurfaceRing {
    n: usize,
}

impl SurfaceRing {
    pub fn new(n: usize) -> Result<Arc<SurfaceRing>> {
        if n < 1 {
            return Err(Error::InvalidParameters("surface genus must be at least 1".into()));
        }
        Ok(Arc::new(SurfaceRing { n }))
    }

    pub fn genus(&self) -> usize {
        self.n
    }

    /// Basis index of `a_i` (one-based `i`).
    pub fn generator_index(&self, i: usize) -> usize {
        assert!(i >= 1 && i <= self.n);
        i
    }

    fn top(&self) -> usize {
        self.n + 1
    }
}

impl GradedAlgebra for SurfaceRing {
    fn label(&self) -> String {
        format!("N({})", self.n)
    }

    fn basis_len(&self) -> usize {
        self.n + 2
    }

    fn basis_degree(&self, index: usize) -> u32 {
        match index {
            0 => 0,
            i if i <= self.n => 1,
            _ => 2,
        }
    }

    fn basis_label(&self, index: usize) -> String {
        match index {
            0 => "1".into(),
            i if i <= self.n => format!("a{i}"),
            _ => "T".into(),
        }
    }

    fn basis_exponents(&self, index: usize) -> Vec<u32> {
        let mut exps = vec![0; self.n];
        match index {
            0 => {}
            i if i <= self.n => exps[i - 1] = 1,
            _ => exps[0] = 2,
        }
        exps
    }

    fn basis_index(&self, exps: &[u32]) -> Option<usize> {
        if exps.len() != self.n {
            return None;
        }
        let nonzero: Vec<(usize, u32)> = exps.iter().copied().enumerate().filter(|&(_, e)| e > 0).collect();
        match nonzero.as_slice() {
            [] => Some(0),
            [(i, 1)] => Some(i + 1),
            [(0, 2)] => Some(self.top()),
            _ => None,
        }
    }

    fn unit_index(&self) -> usize {
        0
    }

    fn top_index(&self) -> usize {
        self.top()
    }

    fn dim(&self) -> u32 {
        2
    }

    fn generator_count(&self) -> usize {
        self.n
    }

    fn generator_symbol(&self) -> &'static str {
        "a"
    }

    fn generator_height(&self, _j: usize) -> u32 {
        2
    }

    fn top_exponents(&self) -> Vec<u32> {
        self.basis_exponents(self.top())
    }

    fn generator_monomial(&self, exps: &[u32]) -> BitVector {
        let mut out = self.zero();
        let nonzero: Vec<(usize, u32)> = exps.iter().copied().enumerate().filter(|&(_, e)| e > 0).collect();
        match nonzero.as_slice() {
            [] => out.set(0),
            [(i, 1)] => out.set(i + 1),
            [(_, 2)] => out.set(self.top()),
            _ => {}
        }
        out
    }

    fn mul_basis_into(&self, a: usize, b: usize, out: &mut BitVector) {
        let top = self.top();
        match (a, b) {
            (0, x) | (x, 0) => out.toggle(x),
            (x, y) if x == y && x != top => out.toggle(top),
            _ => {}
        }
    }

    fn top_coefficient_of_monomial(&self, exps: &[u32]) -> bool {
        let nonzero: Vec<u32> = exps.iter().copied().filter(|&e| e > 0).collect();
        nonzero == [2]
    }
}

/// The ring map `H^*(N_1) = H^*(F(1,2)) -> H^*(N_n)`, `x1 -> a1`, on basis indices.
pub fn embed_basis(index: usize, target: &SurfaceRing) -> usize {
    match index {
        0 => 0,
        1 => target.generator_index(1),
        2 => target.top(),
        _ => panic!("F(1,2) has three basis elements"),
    }
}

/// Applies the embedding in every tensor factor.
pub fn embed_rp2(p: &TensorElement, target: &Arc<SurfaceRing>) -> Result<TensorElement> {
    let source = p.ring().base();
    if source.label() != "F(1^1,2)" {
        return Err(Error::RingMismatch { left: source.label(), right: "F(1^1,2)".into() });
    }
    let ring = TensorRing::new(target.clone(), p.ring().s())?;
    let tuples: Vec<Vec<usize>> =
        p.tuples().into_iter().map(|t| t.into_iter().map(|b| embed_basis(b, target)).collect()).collect();
    ring.from_tuples(tuples.iter().map(Vec::as_slice))
}

/// `c_{2,1}^3 c_{3,1}^3 prod_{i>=4} c_{i,1}^2`, of degree `2s`.
pub fn surface_certificate(s: usize) -> Result<ZdSpec> {
    if s < 3 {
        return Err(Error::Hypothesis(format!("the surface certificate needs s >= 3, got {s}")));
    }
    let mut spec = ZdSpec::new().with(2, 1, 3)?.with(3, 1, 3)?;
    for i in 4..=s {
        spec.push(i, 1, 2)?;
    }
    Ok(spec)
}

/// `H^*(RP^2)` as a flag ring, the source of the embedding.
pub fn projective_plane() -> Arc<FlagRing> {
    FlagRing::new(1, 2).expect("F(1,2) is valid")
}
