//! Normal forms by plain linear algebra over GF(2), independent of the
//! rewrite engine: in each degree the ideal is spanned by monomial multiples
//! of the generating relations `h_{m+i}(x_1, ..., x_{k+1-i})`.

#![allow(dead_code)]

use std::collections::HashMap;

pub type Exps = Vec<u32>;

/// Monomials in `nvars` variables of total degree `d`.
pub fn monomials(nvars: usize, d: u32) -> Vec<Exps> {
    if nvars == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in monomials(nvars - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `h_t` in the first `r` of `nvars` variables.
fn complete(t: u32, r: usize, nvars: usize) -> Vec<Exps> {
    monomials(r, t)
        .into_iter()
        .map(|mut e| {
            e.resize(nvars, 0);
            e
        })
        .collect()
}

fn is_basis(e: &[u32], k: usize, m: usize) -> bool {
    e.iter().enumerate().all(|(i, &n)| n as usize <= m + k - 1 - i)
}

/// Row-reduced ideal in one degree, pivots on non-basis monomials.
pub struct DegreeSlice {
    index: HashMap<Exps, usize>,
    columns: Vec<Exps>,
    /// pivot column -> fully reduced row
    rows: HashMap<usize, Vec<bool>>,
    pub basis_count: usize,
    pub ideal_rank: usize,
}

impl DegreeSlice {
    pub fn new(k: usize, m: usize, d: u32) -> DegreeSlice {
        // non-basis monomials first so that they become pivots
        let mut columns = monomials(k, d);
        columns.sort_by_key(|e| is_basis(e, k, m));
        let index: HashMap<Exps, usize> = columns.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let basis_count = columns.iter().filter(|e| is_basis(e, k, m)).count();

        let mut generators: Vec<Vec<bool>> = Vec::new();
        for i in 1..=k {
            let t = (m + i) as u32;
            if t > d {
                continue;
            }
            let h = complete(t, k + 1 - i, k);
            for mult in monomials(k, d - t) {
                let mut row = vec![false; columns.len()];
                for term in &h {
                    let prod: Exps = term.iter().zip(&mult).map(|(a, b)| a + b).collect();
                    row[index[&prod]] ^= true;
                }
                generators.push(row);
            }
        }

        let mut rows: HashMap<usize, Vec<bool>> = HashMap::new();
        let mut order: Vec<usize> = Vec::new();
        for mut row in generators {
            for &p in &order {
                if row[p] {
                    xor(&mut row, &rows[&p]);
                }
            }
            let Some(p) = row.iter().position(|&b| b) else { continue };
            for &q in &order {
                let r = rows.get_mut(&q).unwrap();
                if r[p] {
                    xor(r, &row);
                }
            }
            rows.insert(p, row);
            order.push(p);
        }
        let ideal_rank = rows.len();
        DegreeSlice { index, columns, rows, basis_count, ideal_rank }
    }

    /// True when the candidate basis is a complement of the ideal: every
    /// non-basis monomial is a pivot and no pivot is a basis monomial.
    pub fn basis_is_complement(&self) -> bool {
        let nonbasis = self.columns.len() - self.basis_count;
        self.ideal_rank == nonbasis && self.rows.keys().all(|&p| p < nonbasis)
    }

    /// Basis monomials in the normal form of `e`.
    pub fn normal_form(&self, e: &[u32]) -> Vec<Exps> {
        let mut v = vec![false; self.columns.len()];
        v[self.index[e]] = true;
        for (&p, row) in &self.rows {
            if v[p] {
                xor(&mut v, row);
            }
        }
        let mut out: Vec<Exps> = v.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| self.columns[i].clone()).collect();
        out.sort();
        out
    }
}

fn xor(a: &mut [bool], b: &[bool]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= *y;
    }
}

/// Coefficients of `prod_{i=1}^k (1 - x^{m+i}) / (1 - x)`.
pub fn poincare(k: usize, m: usize) -> Vec<u64> {
    let mut coeffs = vec![1u64];
    for i in 1..=k {
        let n = m + i;
        let mut next = vec![0u64; coeffs.len() + n - 1];
        for (d, &c) in coeffs.iter().enumerate() {
            for j in 0..n {
                next[d + j] += c;
            }
        }
        coeffs = next;
    }
    coeffs
}
