//! Shared test oracle: the classical Kazhdan–Lusztig recursion with
//! mu-corrections, with Bruhat order from the subword property, computed
//! independently of the library's table construction.

#![allow(dead_code)]

use blockcalc::qlin::UPoly;
use blockcalc::rootdata::WeylGroup;
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::HashMap;

pub struct KlOracle<'a> {
    w: &'a WeylGroup,
    memo: HashMap<(usize, usize), UPoly>,
}

impl<'a> KlOracle<'a> {
    pub fn new(w: &'a WeylGroup) -> Self {
        KlOracle {
            w,
            memo: HashMap::new(),
        }
    }

    /// Bruhat order by the subword property on a fixed reduced word.
    pub fn leq(&self, x: usize, w: usize) -> bool {
        fn go(wg: &WeylGroup, word: &[usize], x: usize) -> bool {
            if x == wg.identity() {
                return true;
            }
            if word.is_empty() {
                return false;
            }
            let s = word[0];
            let sx = wg.mul(wg.word_to_element(&[s]), x);
            // Either use the letter (when it shortens x) or skip it.
            if wg.length(sx) < wg.length(x) && go(wg, &word[1..], sx) {
                return true;
            }
            go(wg, &word[1..], x)
        }
        let word = self.w.words[w].clone();
        go(self.w, &word, x)
    }

    pub fn mu(&mut self, z: usize, v: usize) -> BigInt {
        let lz = self.w.length(z);
        let lv = self.w.length(v);
        if lv <= lz || (lv - lz) % 2 == 0 {
            return BigInt::zero();
        }
        let p = self.p(z, v);
        p.coeff((lv - lz - 1) / 2)
    }

    pub fn p(&mut self, x: usize, w: usize) -> UPoly {
        if let Some(v) = self.memo.get(&(x, w)) {
            return v.clone();
        }
        let val = self.compute(x, w);
        self.memo.insert((x, w), val.clone());
        val
    }

    fn compute(&mut self, x: usize, w: usize) -> UPoly {
        if x == w {
            return UPoly::one();
        }
        if !self.leq(x, w) || self.w.length(x) >= self.w.length(w) {
            return UPoly::zero();
        }
        // Pick a left descent s of w.
        let s = (0..self.w.gens.len())
            .find(|&s| {
                let sw = self.w.mul(self.w.word_to_element(&[s]), w);
                self.w.length(sw) < self.w.length(w)
            })
            .expect("nontrivial element has a descent");
        let se = self.w.word_to_element(&[s]);
        let v = self.w.mul(se, w); // sw < w
        let sx = self.w.mul(se, x);
        if self.w.length(sx) > self.w.length(x) {
            // P(x,w) = P(sx,w) when sx > x and sw < w.
            return self.p(sx, w);
        }
        // c = 1 case: P(x,w) = P(sx,v) + q·P(x,v) − Σ μ(z,v) q^{(ℓw−ℓz)/2} P(x,z)
        let mut out = self.p(sx, v).add(&UPoly::u().mul(&self.p(x, v)));
        for z in 0..self.w.order() {
            let sz = self.w.mul(se, z);
            if self.w.length(sz) >= self.w.length(z) {
                continue;
            }
            if !self.leq(x, z) || !self.leq(z, v) {
                continue;
            }
            let m = self.mu(z, v);
            if m.is_zero() {
                continue;
            }
            let lw = self.w.length(w);
            let lz = self.w.length(z);
            assert_eq!((lw - lz) % 2, 0);
            let mut mono = vec![BigInt::zero(); (lw - lz) / 2 + 1];
            mono[(lw - lz) / 2] = m;
            out = out.sub(&UPoly(mono).mul(&self.p(x, z)));
        }
        out
    }
}

/// Map a complex-block parameter id (a digit string of a reduced word, or
/// "e") to its Weyl group element.
pub fn complex_param_element(w: &WeylGroup, id: &str) -> usize {
    if id == "e" {
        w.identity()
    } else {
        let word: Vec<usize> = id
            .chars()
            .map(|c| c.to_digit(10).unwrap() as usize - 1)
            .collect();
        w.word_to_element(&word)
    }
}
