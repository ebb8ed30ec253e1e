//! Multivariate polynomials over the rationals, with the small feature set
//! the invariant-theory and module machinery needs: arithmetic, linear
//! substitution, monomial enumeration, and coefficient extraction.

use crate::qlin::{QMat, Q};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector (one entry per variable).
pub type Expt = Vec<u16>;

/// A polynomial in `nvars` variables over Q, stored as a sorted term map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Expt, Q>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = MPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        MPoly::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut e = vec![0u16; nvars];
        e[i] = 1;
        let mut p = MPoly::zero(nvars);
        p.terms.insert(e, Q::one());
        p
    }

    /// Linear form Σ c_i x_i.
    pub fn linear(coeffs: &[Q]) -> Self {
        let mut p = MPoly::zero(coeffs.len());
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut e = vec![0u16; coeffs.len()];
                e[i] = 1;
                p.terms.insert(e, c.clone());
            }
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn insert_term(&mut self, e: Expt, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Q::zero);
        *entry += c;
        // Cheap cleanup: remove if it became zero.
        self.terms.retain(|_, v| !v.is_zero());
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            let entry = out.terms.entry(e.clone()).or_insert_with(Q::zero);
            *entry += c;
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = MPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Expt = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let entry = out.terms.entry(e).or_insert_with(Q::zero);
                *entry += c1 * c2;
            }
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }

    pub fn pow(&self, k: usize) -> MPoly {
        let mut acc = MPoly::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self
            .terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum::<usize>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn coeff(&self, e: &Expt) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&vec![0; self.nvars])
    }

    /// Apply a linear change of variables: x_i ↦ Σ_j M[i][j] x_j
    /// (i.e. precompose the polynomial function with the matrix `M`... more
    /// precisely, substitute each variable by the linear form in row i).
    pub fn subst_linear(&self, m: &QMat) -> MPoly {
        assert_eq!(m.rows, self.nvars);
        let forms: Vec<MPoly> = (0..self.nvars)
            .map(|i| {
                let row: Vec<Q> = (0..m.cols).map(|j| m.at(i, j).clone()).collect();
                MPoly::linear(&row)
            })
            .collect();
        self.subst(&forms, m.cols)
    }

    /// Substitute variable i by `subs[i]` (all in `out_nvars` variables).
    pub fn subst(&self, subs: &[MPoly], out_nvars: usize) -> MPoly {
        assert_eq!(subs.len(), self.nvars);
        let mut out = MPoly::zero(out_nvars);
        // Cache powers of substituted variables per term as needed.
        for (e, c) in &self.terms {
            let mut term = MPoly::constant(out_nvars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&subs[i].pow(k as usize));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Evaluate all variables at zero... the constant term; provided for
    /// readability at call sites.
    pub fn eval_zero(&self) -> Q {
        self.constant_term()
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (e, c) in &self.terms {
            let mut s = String::new();
            if !c.is_one() || e.iter().all(|&x| x == 0) {
                s.push_str(&c.to_string());
            }
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !s.is_empty() && !s.ends_with('*') {
                    s.push('*');
                }
                s.push_str(&format!("x{}", i));
                if k > 1 {
                    s.push_str(&format!("^{}", k));
                }
            }
            parts.push(s);
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// All exponent vectors of total degree exactly `d` in `n` variables, in
/// lexicographic order (deterministic).
pub fn monomials_of_degree(n: usize, d: usize) -> Vec<Expt> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; n];
    fn rec(i: usize, rem: usize, cur: &mut Expt, out: &mut Vec<Expt>) {
        if i + 1 == cur.len() {
            cur[i] = rem as u16;
            out.push(cur.clone());
            return;
        }
        for k in (0..=rem).rev() {
            cur[i] = k as u16;
            rec(i + 1, rem - k, cur, out);
        }
        cur[i] = 0;
    }
    if n == 0 {
        if d == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(0, d, &mut cur, &mut out);
    out
}

/// All exponent vectors with prescribed per-variable weights summing to
/// total weighted degree exactly `d`.
pub fn weighted_monomials_of_degree(weights: &[usize], d: usize) -> Vec<Expt> {
    let n = weights.len();
    let mut out = Vec::new();
    let mut cur = vec![0u16; n];
    fn rec(i: usize, rem: usize, weights: &[usize], cur: &mut Expt, out: &mut Vec<Expt>) {
        if i == weights.len() {
            if rem == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let w = weights[i];
        let max = if w == 0 { 0 } else { rem / w };
        for k in 0..=max {
            cur[i] = k as u16;
            rec(i + 1, rem - k * w, weights, cur, out);
        }
        cur[i] = 0;
    }
    if n == 0 {
        if d == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(0, d, weights, &mut cur, &mut out);
    out
}
