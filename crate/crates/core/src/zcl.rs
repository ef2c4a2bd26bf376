//! Lower bounds for `TC_s` from nonzero zero-divisor products, together with
//! the dimensional upper bound `s·dim`.
//!
//! Every lower bound reported here comes from a product that was actually
//! evaluated and found nonzero in the relevant tensor power.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::search::{exhaustive_search, SearchOptions};
use crate::space::Space;
use crate::store::{ResultStore, StoreRecord};
use crate::surface::surface_certificate;
use crate::tensor::{TensorRing, DEFAULT_TERM_CEILING};
use crate::zd::ZdSpec;

fn pow2(e: u32) -> u64 {
    1u64 << e
}

/// `(k-δ+ε)(2^{e+1}-1) + max(0, (δ-1)(2^e-1)) - ε` with `ε = min(δ, 1)`, valid
/// for `0 <= δ <= k-1` and `2δ <= 2^e <= m+δ`.
pub fn corollary_lower_bound(k: usize, m: usize, delta: usize, e: u32) -> Result<u64> {
    if k < 1 || m < 1 {
        return Err(Error::InvalidParameters(format!("F(1^{k},{m})")));
    }
    if delta >= k {
        return Err(Error::Hypothesis(format!("δ = {delta} must be below k = {k}")));
    }
    if e >= 62 || 2 * delta as u64 > pow2(e) || pow2(e) > (m + delta) as u64 {
        return Err(Error::Hypothesis(format!("need 2δ <= 2^e <= m+δ, got δ = {delta}, e = {e}, m = {m}")));
    }
    let (k, d) = (k as i64, delta as i64);
    let eps = d.min(1);
    let big = pow2(e + 1) as i64 - 1;
    let small = pow2(e) as i64 - 1;
    Ok(((k - d + eps) * big + ((d - 1) * small).max(0) - eps) as u64)
}

/// All `(δ, e)` admissible for `F(1^k,m)`.
pub fn admissible_pairs(k: usize, m: usize) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    for delta in 0..k {
        let mut e = 0u32;
        while pow2(e) <= (m + delta) as u64 {
            if 2 * delta as u64 <= pow2(e) {
                out.push((delta, e));
            }
            e += 1;
        }
    }
    out
}

/// `(z1...z_{k-δ})^{2^{e+1}-1} z_{k-δ+1}^{2^{e+1}-2} (z_{k-δ+2}...z_k)^{2^e-1}`
/// (just `(z1...zk)^{2^{e+1}-1}` when `δ = 0`), a nonzero product in
/// `H^*(F(1^k,2^e-δ))^{⊗2}`.
pub fn theorem_certificate(k: usize, e: u32, delta: usize) -> Result<ZdSpec> {
    if delta >= k {
        return Err(Error::Hypothesis(format!("δ = {delta} must be below k = {k}")));
    }
    if e < 1 && delta > 0 || e >= 31 || (delta as u64) > pow2(e) / 2 || pow2(e) <= delta as u64 {
        return Err(Error::Hypothesis(format!("need 2^(e-1) >= δ and 2^e - δ >= 1, got e = {e}, δ = {delta}")));
    }
    let big = (pow2(e + 1) - 1) as u32;
    let mut spec = ZdSpec::new();
    for j in 1..=k - delta {
        spec.push(2, j, big)?;
    }
    if delta > 0 {
        spec.push(2, k - delta + 1, big - 1)?;
        for j in k - delta + 2..=k {
            spec.push(2, j, (pow2(e) - 1) as u32)?;
        }
    }
    Ok(spec)
}

/// Certificates for `s >= 3` in which the product lands in the top degree
/// `s·dim` (or one below it for the `F(1,1,2^e)` family).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum HigherFamily {
    /// `F(1^k, 2^e-k+1)` for `k <= 3` (`e >= 2` when `k = 3`).
    Sharp { k: usize, e: u32 },
    /// `F(1,1,2^e)`, `e >= 2`, one below the top degree.
    TwoOnePowerOfTwo { e: u32 },
    /// `F(1,1,2)`, three below the top degree.
    TwoOneTwo,
}

impl HigherFamily {
    pub fn space(&self) -> Space {
        match *self {
            HigherFamily::Sharp { k, e } => Space::flag(k, (pow2(e) as usize + 1) - k),
            HigherFamily::TwoOnePowerOfTwo { e } => Space::flag(2, pow2(e) as usize),
            HigherFamily::TwoOneTwo => Space::flag(2, 2),
        }
    }

    /// Families whose space is `F(1^k,m)`.
    pub fn for_space(k: usize, m: usize) -> Vec<HigherFamily> {
        let mut out = Vec::new();
        let n = m + k - 1;
        if k <= 3 && n.is_power_of_two() && n >= 2 {
            let e = n.trailing_zeros();
            if k < 3 || e >= 2 {
                out.push(HigherFamily::Sharp { k, e });
            }
        }
        if k == 2 && m.is_power_of_two() {
            match m.trailing_zeros() {
                0 => {}
                1 => out.push(HigherFamily::TwoOneTwo),
                e => out.push(HigherFamily::TwoOnePowerOfTwo { e }),
            }
        }
        out
    }

    pub fn certificate(&self, s: usize) -> Result<ZdSpec> {
        if s < 3 {
            return Err(Error::Hypothesis(format!("these certificates need s >= 3, got {s}")));
        }
        let p = |x: u32| pow2(x) as u32;
        let (second, third, rest): (Vec<u32>, Vec<u32>, Vec<u32>) = match *self {
            HigherFamily::Sharp { k: 1, e } if e >= 1 => (vec![p(e + 1) - 1], vec![p(e) + 1], vec![p(e)]),
            HigherFamily::Sharp { k: 2, e } if e >= 1 => {
                (vec![p(e + 1) - 1, p(e + 1) - 2], vec![p(e) - 1, p(e) + 1], vec![p(e), p(e) - 1])
            }
            HigherFamily::Sharp { k: 3, e } if e >= 2 => (
                vec![p(e + 1) - 1, p(e + 1) - 2, p(e) - 1],
                vec![p(e) - 1, p(e) - 1, p(e + 1) - 3],
                vec![p(e), p(e) - 1, p(e) - 2],
            ),
            HigherFamily::TwoOnePowerOfTwo { e } if e >= 2 => {
                (vec![p(e + 1) - 1, p(e + 1) - 1], vec![p(e) + 1, p(e) + 3], vec![p(e) + 1, p(e)])
            }
            HigherFamily::TwoOneTwo => (vec![3, 3], vec![3, 3], vec![3, 2]),
            other => return Err(Error::Hypothesis(format!("no certificate for {other:?}"))),
        };
        let mut spec = ZdSpec::from_group(2, &second)?;
        spec.push_group(3, &third)?;
        for i in 4..=s {
            spec.push_group(i, &rest)?;
        }
        Ok(spec)
    }
}

/// The certificate of [`HigherFamily::Sharp`] for `F(1^k, 2^e-k+1)`.
pub fn higher_certificate(k: usize, e: u32, s: usize) -> Result<ZdSpec> {
    if !(1..=3).contains(&k) || e < 1 || (k == 3 && e < 2) {
        return Err(Error::Hypothesis(format!("need k <= 3 and e >= 1 (e >= 2 for k = 3), got k = {k}, e = {e}")));
    }
    HigherFamily::Sharp { k, e }.certificate(s)
}

/// Products found by computer search, recorded with the tensor power they
/// live in.
pub fn catalog() -> Vec<(Space, usize, ZdSpec)> {
    let entries: [(Space, usize, &str); 3] = [
        (Space::flag(4, 1), 2, "z[2,1]^7*z[2,2]^6*z[2,3]^3*z[2,4]^2"),
        (Space::flag(4, 1), 3, "z[2,1]^7*z[2,2]^6*z[2,3]^3*z[2,4]^2*z[3,1]*z[3,2]^3*z[3,3]^5*z[3,4]^3"),
        (
            Space::flag(4, 5),
            4,
            "z[2,1]^15*z[2,2]^14*z[2,3]^7*z[2,4]^6*z[3,1]^7*z[3,2]^7*z[3,3]^7*z[3,4]^14*z[4,1]^5*z[4,2]^7*z[4,3]^7*z[4,4]^8",
        ),
    ];
    entries.into_iter().map(|(sp, s, t)| (sp, s, ZdSpec::parse(t).expect("catalog entries parse"))).collect()
}

/// Where a candidate lower bound came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// The `(δ, e)` family of two-fold certificates.
    TwoFold { delta: usize, e: u32 },
    Higher { family: HigherFamily },
    Surface,
    Catalog,
    Store,
    User,
    /// A product from a smaller tensor power, padded by top-class factors.
    Padded { from_s: usize, source: Box<Provenance> },
    /// The empty product.
    Trivial,
}

#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub spec: String,
    pub degree: u64,
    pub provenance: Provenance,
    /// `None` when the evaluation hit a resource ceiling.
    pub nonzero: Option<bool>,
}

/// Certified interval for `TC_s` of one space.
#[derive(Clone, Debug, Serialize)]
pub struct TcBound {
    pub space: String,
    pub s: usize,
    pub dim: u32,
    pub lower: u64,
    pub upper: u64,
    pub witness: String,
    pub provenance: Provenance,
    pub candidates: Vec<Candidate>,
}

impl TcBound {
    pub fn gap(&self) -> u64 {
        self.upper - self.lower
    }
}

#[derive(Clone, Debug)]
pub struct ReportOptions {
    /// Extra products to try, in the requested tensor power.
    pub extra: Vec<ZdSpec>,
    pub term_ceiling: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { extra: Vec::new(), term_ceiling: DEFAULT_TERM_CEILING }
    }
}

fn closed_form_candidates(space: Space, s: usize) -> Vec<(ZdSpec, Provenance)> {
    let mut out = Vec::new();
    match space {
        Space::Flag { k, m } => {
            if s == 2 {
                for (delta, e) in admissible_pairs(k, m) {
                    if let Ok(spec) = theorem_certificate(k, e, delta) {
                        out.push((spec, Provenance::TwoFold { delta, e }));
                    }
                }
            } else {
                for family in HigherFamily::for_space(k, m) {
                    if let Ok(spec) = family.certificate(s) {
                        out.push((spec, Provenance::Higher { family }));
                    }
                }
            }
        }
        Space::Surface { .. } => {
            if s == 2 {
                out.push((ZdSpec::new().with(2, 1, 3).expect("valid"), Provenance::Surface));
            } else if let Ok(spec) = surface_certificate(s) {
                out.push((spec, Provenance::Surface));
            }
        }
    }
    for (sp, cs, spec) in catalog() {
        if sp == space && cs == s {
            out.push((spec, Provenance::Catalog));
        }
    }
    out
}

/// Best bounds for `s = 2..=s_max`, each power also trying the previous
/// power's witness padded by a top-class factor.
pub fn bounds_up_to(space: Space, s_max: usize, options: &ReportOptions, store: Option<&ResultStore>) -> Result<Vec<TcBound>> {
    if s_max < 2 {
        return Err(Error::InvalidParameters(format!("s = {s_max} must be at least 2")));
    }
    let algebra = space.algebra()?;
    let label = space.to_string();
    let symbol = space.zd_symbol();
    let stored: Vec<StoreRecord> = match store {
        Some(st) => st.witnesses(&label, s_max)?,
        None => Vec::new(),
    };
    let mut out: Vec<TcBound> = Vec::new();
    for s in 2..=s_max {
        let ring = TensorRing::new(algebra.clone(), s)?;
        let mut pending = closed_form_candidates(space, s);
        for r in stored.iter().filter(|r| r.s == s) {
            if let Ok(spec) = ZdSpec::parse(&r.spec) {
                pending.push((spec, Provenance::Store));
            }
        }
        if s == s_max {
            pending.extend(options.extra.iter().cloned().map(|spec| (spec, Provenance::User)));
        }
        if let Some(prev) = out.last() {
            if let Ok(spec) = ZdSpec::parse(&prev.witness) {
                if !spec.is_empty() {
                    let padded = spec.product(&TensorRing::new(algebra.clone(), s - 1)?.padding_spec());
                    let source = Box::new(prev.provenance.clone());
                    pending.push((padded, Provenance::Padded { from_s: s - 1, source }));
                }
            }
        }
        let upper = ring.top_degree() as u64;
        let mut candidates = Vec::new();
        let mut best: (u64, String, Provenance) = (0, "1".into(), Provenance::Trivial);
        for (spec, provenance) in pending {
            let degree = spec.degree();
            let nonzero = match ring.validate(&spec) {
                Err(_) => Some(false),
                Ok(()) => match ring.is_nonzero(&spec) {
                    Ok(v) => Some(v),
                    Err(Error::ResourceExceeded(_)) => None,
                    Err(e) => return Err(e),
                },
            };
            if nonzero == Some(true) && degree > best.0 {
                best = (degree, spec.to_text(symbol), provenance.clone());
            }
            if let (Some(st), Some(v)) = (store, nonzero) {
                if provenance != Provenance::Store {
                    st.append(&StoreRecord::now(label.clone(), s, spec.to_text(symbol), v, degree))?;
                }
            }
            candidates.push(Candidate { spec: spec.to_text(symbol), degree, provenance, nonzero });
        }
        out.push(TcBound {
            space: label.clone(),
            s,
            dim: algebra.dim(),
            lower: best.0,
            upper,
            witness: best.1,
            provenance: best.2,
            candidates,
        });
    }
    Ok(out)
}

/// Certified interval `[zcl lower bound, s·dim]` for `TC_s(space)`.
pub fn tc_report(space: Space, s: usize, options: &ReportOptions, store: Option<&ResultStore>) -> Result<TcBound> {
    Ok(bounds_up_to(space, s, options, store)?.pop().expect("at least s = 2"))
}

/// Evaluates `c[2,1]^3 c[3,1]^3 prod c[i,1]^2` in `H^*(N_n)^{⊗s}`. The lower
/// bound is `2s` only if the product is actually nonzero.
pub fn verify_surface_tcs(n: usize, s: usize) -> Result<TcBound> {
    let space = Space::Surface { n };
    let spec = surface_certificate(s)?;
    let ring = TensorRing::new(space.algebra()?, s)?;
    let nonzero = ring.is_nonzero(&spec)?;
    let degree = spec.degree();
    let text = spec.to_text(space.zd_symbol());
    let (lower, witness, provenance) =
        if nonzero { (degree, text.clone(), Provenance::Surface) } else { (0, "1".into(), Provenance::Trivial) };
    Ok(TcBound {
        space: space.to_string(),
        s,
        dim: space.dim(),
        lower,
        upper: ring.top_degree() as u64,
        witness,
        provenance,
        candidates: vec![Candidate { spec: text, degree, provenance: Provenance::Surface, nonzero: Some(nonzero) }],
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GapValue {
    pub k: usize,
    pub m: usize,
    pub s: usize,
    pub lower: u64,
    pub upper: u64,
    pub value: u64,
}

/// `G(k,m,s) = s·dim - (best lower bound)` for `s = 2..=s_max`.
pub fn gap_sequence(k: usize, m: usize, s_max: usize, options: &ReportOptions) -> Result<Vec<GapValue>> {
    let bounds = bounds_up_to(Space::flag(k, m), s_max, options, None)?;
    let gaps: Vec<GapValue> = bounds
        .iter()
        .map(|b| GapValue { k, m, s: b.s, lower: b.lower, upper: b.upper, value: b.gap() })
        .collect();
    if let Some(w) = gaps.windows(2).find(|w| w[1].value > w[0].value) {
        return Err(Error::Hypothesis(format!("gap increased from s = {} to s = {}", w[0].s, w[1].s)));
    }
    Ok(gaps)
}

#[derive(Clone, Debug, Serialize)]
pub struct SharpnessReport {
    pub k: usize,
    pub e: u32,
    pub space: String,
    /// Whether `(z1...zk)^{2^{e+1}-1}` vanishes.
    pub vanishes: bool,
    /// Number of tensor basis elements in `(z1...z_{k-1})^{2^{e+1}-1} z_k^{2^{e+1}-2}`.
    pub near_product_terms: u64,
}

/// Evaluates `(z1...zk)^{2^{e+1}-1}` in `H^*(F(1^k,2^e-1))^{⊗2}`.
pub fn sharpness_check(k: usize, e: u32, term_ceiling: u64) -> Result<SharpnessReport> {
    if !(1..=20).contains(&e) || k < 2 || k as u64 > pow2(e) + 1 {
        return Err(Error::Hypothesis(format!("need 2 <= k <= 2^e + 1, got k = {k}, e = {e}")));
    }
    let m = pow2(e) as usize - 1;
    if m < 1 {
        return Err(Error::Hypothesis("2^e - 1 must be positive".into()));
    }
    let space = Space::flag(k, m);
    let ring = TensorRing::new(space.algebra()?, 2)?;
    let big = (pow2(e + 1) - 1) as u32;
    let full = ZdSpec::from_group(2, &vec![big; k])?;
    let mut near = ZdSpec::from_group(2, &vec![big; k - 1])?;
    near.push(2, k, big - 1)?;
    let vanishes = !ring.is_nonzero(&full)?;
    let near_product_terms = ring.evaluate(&near, term_ceiling)?.term_count();
    Ok(SharpnessReport { k, e, space: space.to_string(), vanishes, near_product_terms })
}

/// The shape `(a,b,c,d)` searches over the last tensor factor of a product
/// whose earlier factors are fixed.
pub fn last_factor_search(
    space: Space,
    s: usize,
    prefix: &ZdSpec,
    target_degree: u64,
    options: &SearchOptions,
) -> Result<crate::search::SearchOutcome> {
    let ring = TensorRing::new(space.algebra()?, s)?;
    let free: Vec<(usize, usize)> = (1..=ring.base().generator_count()).map(|j| (s, j)).collect();
    exhaustive_search(&ring, prefix, &free, target_degree, options)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corollary_values() {
        assert_eq!(corollary_lower_bound(3, 6, 2, 3).unwrap(), 36);
        assert_eq!(corollary_lower_bound(3, 6, 0, 2).unwrap(), 21);
        for e in 1..5 {
            for k in 1..5 {
                assert_eq!(corollary_lower_bound(k, 1 << e, 0, e).unwrap(), k as u64 * ((2 << e) - 1));
            }
        }
        assert!(corollary_lower_bound(3, 6, 3, 3).is_err());
        assert!(corollary_lower_bound(3, 2, 0, 2).is_err());
        assert!(corollary_lower_bound(3, 6, 2, 1).is_err());
    }

    #[test]
    fn admissible_pairs_are_admissible() {
        for (k, m) in [(1, 1), (2, 3), (3, 6), (4, 5)] {
            for (d, e) in admissible_pairs(k, m) {
                assert!(corollary_lower_bound(k, m, d, e).is_ok());
            }
        }
        assert!(admissible_pairs(3, 6).contains(&(2, 3)));
    }

    #[test]
    fn certificate_degree_matches_formula() {
        for k in 1..=4usize {
            for e in 1..=3u32 {
                for delta in 0..k {
                    let Ok(spec) = theorem_certificate(k, e, delta) else { continue };
                    let m = (1usize << e) - delta;
                    assert_eq!(spec.degree(), corollary_lower_bound(k, m, delta, e).unwrap(), "k={k} e={e} δ={delta}");
                }
            }
        }
        assert_eq!(theorem_certificate(3, 2, 2).unwrap().to_string(), "z[2,1]^7*z[2,2]^6*z[2,3]^3");
        assert_eq!(theorem_certificate(2, 2, 0).unwrap().to_string(), "z[2,1]^7*z[2,2]^7");
        assert!(theorem_certificate(2, 2, 2).is_err());
        assert!(theorem_certificate(3, 1, 2).is_err());
    }

    #[test]
    fn higher_certificate_degrees() {
        for s in 3..=6usize {
            for (k, e) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 2), (3, 3)] {
                let spec = higher_certificate(k, e, s).unwrap();
                let space = HigherFamily::Sharp { k, e }.space();
                assert_eq!(spec.degree(), s as u64 * space.dim() as u64, "k={k} e={e} s={s}");
            }
            for e in 2..=3 {
                let fam = HigherFamily::TwoOnePowerOfTwo { e };
                let expected = s as u64 * ((2u64 << e) + 1) - 1;
                assert_eq!(fam.certificate(s).unwrap().degree(), expected);
            }
            assert_eq!(HigherFamily::TwoOneTwo.certificate(s).unwrap().degree(), 5 * s as u64 - 3);
        }
        assert!(higher_certificate(3, 1, 3).is_err());
        assert!(higher_certificate(4, 2, 3).is_err());
        assert!(higher_certificate(1, 1, 2).is_err());
    }

    #[test]
    fn families_for_space() {
        assert_eq!(HigherFamily::for_space(1, 4), vec![HigherFamily::Sharp { k: 1, e: 2 }]);
        assert_eq!(HigherFamily::for_space(2, 3), vec![HigherFamily::Sharp { k: 2, e: 2 }]);
        assert_eq!(HigherFamily::for_space(3, 2), vec![HigherFamily::Sharp { k: 3, e: 2 }]);
        assert_eq!(HigherFamily::for_space(2, 2), vec![HigherFamily::TwoOneTwo]);
        assert_eq!(HigherFamily::for_space(2, 4), vec![HigherFamily::TwoOnePowerOfTwo { e: 2 }]);
        assert!(HigherFamily::for_space(3, 1).is_empty());
        for fam in [HigherFamily::Sharp { k: 2, e: 3 }, HigherFamily::TwoOnePowerOfTwo { e: 3 }] {
            let Space::Flag { k, m } = fam.space() else { unreachable!() };
            assert!(HigherFamily::for_space(k, m).contains(&fam));
        }
    }

    #[test]
    fn small_reports() {
        let opts = ReportOptions::default();
        let r = tc_report(Space::flag(2, 1), 2, &opts, None).unwrap();
        assert_eq!((r.lower, r.upper), (5, 6));
        let r = tc_report(Space::flag(1, 2), 3, &opts, None).unwrap();
        assert_eq!((r.lower, r.upper), (6, 6));
        let r = tc_report(Space::Surface { n: 2 }, 3, &opts, None).unwrap();
        assert_eq!((r.lower, r.upper), (6, 6));
    }

    #[test]
    fn surface_bounds_are_sharp() {
        let b = verify_surface_tcs(5, 4).unwrap();
        assert_eq!((b.lower, b.upper), (8, 8));
        assert_eq!(b.witness, "c[2,1]^3*c[3,1]^3*c[4,1]^2");
        assert!(verify_surface_tcs(2, 2).is_err());
    }
}
