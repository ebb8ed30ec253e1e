//! Exact rational linear algebra, integer polynomials in one variable, and
//! truncated Hilbert series.
//!
//! Everything here is exact: rationals are arbitrary-precision
//! ([`num_rational::BigRational`]), polynomial coefficients are
//! arbitrary-precision integers. No floating point anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Exact rational scalar.
pub type Q = BigRational;

/// Convenience: integer-valued rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// A dense matrix over the rationals (row major).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Q>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c));
        QMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Integer-entry constructor, handy in tests and for Cartan data.
    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        QMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| qi(x)).collect())
                .collect(),
        )
    }

    pub fn at(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = QMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if !b.is_zero() {
                        let v = out.at(i, j).clone() + a * b;
                        *out.at_mut(i, j) = v;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn scale(&self, c: &Q) -> QMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = Q::zero();
                for j in 0..self.cols {
                    if !self.at(i, j).is_zero() && !v[j].is_zero() {
                        s += self.at(i, j) * &v[j];
                    }
                }
                s
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.at(i, j).is_one()
                    } else {
                        self.at(i, j).is_zero()
                    }
                })
            })
    }

    /// Rank via Gaussian elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut col = 0;
        while rank < m.rows && col < m.cols {
            // Find pivot.
            let pivot = (rank..m.rows).find(|&i| !m.at(i, col).is_zero());
            let Some(p) = pivot else {
                col += 1;
                continue;
            };
            if p != rank {
                for j in 0..m.cols {
                    let a = m.at(rank, j).clone();
                    let b = m.at(p, j).clone();
                    *m.at_mut(rank, j) = b;
                    *m.at_mut(p, j) = a;
                }
            }
            let inv = m.at(rank, col).clone().recip();
            for j in col..m.cols {
                let v = m.at(rank, j).clone() * &inv;
                *m.at_mut(rank, j) = v;
            }
            for i in 0..m.rows {
                if i != rank && !m.at(i, col).is_zero() {
                    let f = m.at(i, col).clone();
                    for j in col..m.cols {
                        let v = m.at(i, j).clone() - &f * m.at(rank, j);
                        *m.at_mut(i, j) = v;
                    }
                }
            }
            rank += 1;
            col += 1;
        }
        rank
    }

    /// Inverse; `None` if singular.
    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = QMat::identity(n);
        for col in 0..n {
            let p = (col..n).find(|&i| !m.at(i, col).is_zero())?;
            if p != col {
                for j in 0..n {
                    let (a, b) = (m.at(col, j).clone(), m.at(p, j).clone());
                    *m.at_mut(col, j) = b;
                    *m.at_mut(p, j) = a;
                    let (a, b) = (inv.at(col, j).clone(), inv.at(p, j).clone());
                    *inv.at_mut(col, j) = b;
                    *inv.at_mut(p, j) = a;
                }
            }
            let d = m.at(col, col).clone().recip();
            for j in 0..n {
                let v = m.at(col, j).clone() * &d;
                *m.at_mut(col, j) = v;
                let v = inv.at(col, j).clone() * &d;
                *inv.at_mut(col, j) = v;
            }
            for i in 0..n {
                if i != col && !m.at(i, col).is_zero() {
                    let f = m.at(i, col).clone();
                    for j in 0..n {
                        let v = m.at(i, j).clone() - &f * m.at(col, j);
                        *m.at_mut(i, j) = v;
                        let v = inv.at(i, j).clone() - &f * inv.at(col, j);
                        *inv.at_mut(i, j) = v;
                    }
                }
            }
        }
        Some(inv)
    }

    /// Basis of the (right) nullspace `{v : Mv = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let mut solver = LinSolver::new(self.cols);
        for i in 0..self.rows {
            let row: Vec<(usize, Q)> = (0..self.cols)
                .filter(|&j| !self.at(i, j).is_zero())
                .map(|j| (j, self.at(i, j).clone()))
                .collect();
            solver.add_row(row);
        }
        solver.nullspace_basis()
    }
}

/// Incremental exact solver for homogeneous systems `A x = 0`.
///
/// Rows are fed one at a time and reduced against the current pivot rows;
/// only independent rows are retained, so memory is bounded by the number of
/// unknowns regardless of how many equations are streamed in. Pivoting order
/// is fixed (lowest column index), so results are deterministic.
pub struct LinSolver {
    n: usize,
    /// pivot column -> reduced row (dense).
    pivots: BTreeMap<usize, Vec<Q>>,
}

impl LinSolver {
    pub fn new(n: usize) -> Self {
        LinSolver {
            n,
            pivots: BTreeMap::new(),
        }
    }

    pub fn num_unknowns(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Feed one sparse row (column, coefficient) into the solver.
    pub fn add_row(&mut self, sparse: Vec<(usize, Q)>) {
        let mut row = vec![Q::zero(); self.n];
        for (j, c) in sparse {
            debug_assert!(j < self.n);
            row[j] += c;
        }
        self.reduce_and_insert(row);
    }

    fn reduce_and_insert(&mut self, mut row: Vec<Q>) {
        // Invariant: every stored pivot row is 1 at its own pivot column and
        // 0 at every other pivot column. First clear the incoming row at all
        // existing pivot columns.
        for (&pc, p) in &self.pivots {
            if !row[pc].is_zero() {
                let f = row[pc].clone();
                for (a, b) in row.iter_mut().zip(p.iter()) {
                    if !b.is_zero() {
                        *a -= &f * b;
                    }
                }
            }
        }
        let lead = match row.iter().position(|c| !c.is_zero()) {
            Some(j) => j,
            None => return,
        };
        // Normalize and clear the new pivot column in the stored rows; the
        // reduced row is zero at the old pivot columns, so the invariant is
        // preserved.
        let inv = row[lead].clone().recip();
        for a in row.iter_mut() {
            if !a.is_zero() {
                *a *= &inv;
            }
        }
        for p in self.pivots.values_mut() {
            if !p[lead].is_zero() {
                let f = p[lead].clone();
                for (a, b) in p.iter_mut().zip(row.iter()) {
                    if !b.is_zero() {
                        *a -= &f * b;
                    }
                }
            }
        }
        self.pivots.insert(lead, row);
    }

    /// Whether the vector lies in the row span: reduce against the stored
    /// pivot rows without inserting.
    pub fn contains(&self, sparse: Vec<(usize, Q)>) -> bool {
        let mut row = vec![Q::zero(); self.n];
        for (j, c) in sparse {
            debug_assert!(j < self.n);
            row[j] += c;
        }
        for (&pc, p) in &self.pivots {
            if !row[pc].is_zero() {
                let f = row[pc].clone();
                for (a, b) in row.iter_mut().zip(p.iter()) {
                    if !b.is_zero() {
                        *a -= &f * b;
                    }
                }
            }
        }
        row.iter().all(|c| c.is_zero())
    }

    /// The reduced pivot rows, in pivot-column order (a deterministic basis
    /// of the row span of everything fed in).
    pub fn pivot_rows(&self) -> Vec<Vec<Q>> {
        self.pivots.values().cloned().collect()
    }

    /// Basis of the solution space, one vector per free column, in column
    /// order (deterministic).
    pub fn nullspace_basis(&self) -> Vec<Vec<Q>> {
        let mut basis = Vec::new();
        for free in 0..self.n {
            if self.pivots.contains_key(&free) {
                continue;
            }
            let mut v = vec![Q::zero(); self.n];
            v[free] = Q::one();
            for (&pc, row) in &self.pivots {
                if !row[free].is_zero() {
                    v[pc] = -row[free].clone();
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Integer polynomial in one variable `u`, coefficients lowest-degree first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UPoly(pub Vec<BigInt>);

impl serde::Serialize for UPoly {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl UPoly {
    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn one() -> Self {
        UPoly(vec![BigInt::one()])
    }

    pub fn u() -> Self {
        UPoly(vec![BigInt::zero(), BigInt::one()])
    }

    pub fn constant(c: i64) -> Self {
        let mut p = UPoly(vec![BigInt::from(c)]);
        p.normalize();
        p
    }

    /// Monomial c·u^k.
    pub fn monomial(c: i64, k: usize) -> Self {
        if c == 0 {
            return UPoly::zero();
        }
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = BigInt::from(c);
        UPoly(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.0.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    fn normalize(&mut self) {
        while self.0.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.0.pop();
        }
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.0.len().max(other.0.len());
        let mut v = vec![BigInt::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            v[i] += c;
        }
        for (i, c) in other.0.iter().enumerate() {
            v[i] += c;
        }
        let mut p = UPoly(v);
        p.normalize();
        p
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> UPoly {
        UPoly(self.0.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut v = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] += a * b;
                }
            }
        }
        let mut p = UPoly(v);
        p.normalize();
        p
    }

    /// Evaluate at an integer point.
    pub fn eval_int(&self, x: i64) -> BigInt {
        let x = BigInt::from(x);
        let mut acc = BigInt::zero();
        for c in self.0.iter().rev() {
            acc = acc * &x + c;
        }
        acc
    }

    /// Substitute `u ↦ t^2`, returning coefficients of the result in `t`.
    pub fn u_to_t2(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.0.len().saturating_sub(1) * 2 + 1];
        if self.is_zero() {
            return vec![];
        }
        for (i, c) in self.0.iter().enumerate() {
            v[2 * i] = c.clone();
        }
        v
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, "{}", sign)?;
            }
            match i {
                0 => write!(f, "{}", mag)?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{}", mag)?;
                    }
                    if i == 1 {
                        write!(f, "u")?;
                    } else {
                        write!(f, "u^{}", i)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// A truncated Hilbert series: exact integer coefficients up to a bound,
/// with an optional closed form `numerator / Π (1 - t^d)` attached when a
/// freeness certificate exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSeries {
    /// Coefficient of t^k for k = 0..=truncation.
    pub coeffs: Vec<BigInt>,
    /// Closed form: numerator coefficients (in t) and denominator exponents
    /// (each d contributes a factor 1 - t^d).
    pub closed_form: Option<(Vec<BigInt>, Vec<usize>)>,
}

impl HilbertSeries {
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Series from explicit coefficients.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        HilbertSeries {
            coeffs,
            closed_form: None,
        }
    }

    /// Expand `numerator / Π_d (1 - t^d)` to the given truncation and attach
    /// the closed form.
    pub fn from_closed_form(num: Vec<BigInt>, denom: Vec<usize>, trunc: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); trunc + 1];
        for (i, c) in num.iter().enumerate() {
            if i <= trunc {
                coeffs[i] = c.clone();
            }
        }
        for &d in &denom {
            assert!(d > 0, "denominator exponent must be positive");
            // Multiply by 1/(1 - t^d): prefix-sum with stride d.
            for k in d..=trunc {
                let prev = coeffs[k - d].clone();
                coeffs[k] += prev;
            }
        }
        HilbertSeries {
            coeffs,
            closed_form: Some((num, denom)),
        }
    }

    /// Pointwise product truncated to the shorter of the two windows.
    pub fn mul(&self, other: &HilbertSeries) -> HilbertSeries {
        let trunc = self.truncation().min(other.truncation());
        let mut coeffs = vec![BigInt::zero(); trunc + 1];
        for i in 0..=trunc {
            for j in 0..=(trunc - i) {
                if !self.coeffs[i].is_zero() && !other.coeffs[j].is_zero() {
                    let v = &self.coeffs[i] * &other.coeffs[j];
                    coeffs[i + j] += v;
                }
            }
        }
        HilbertSeries::from_coeffs(coeffs)
    }

    /// Multiply by the polynomial `1 + t^k`.
    pub fn mul_one_plus_tk(&self, k: usize) -> HilbertSeries {
        let trunc = self.truncation();
        let mut coeffs = self.coeffs.clone();
        for i in (k..=trunc).rev() {
            let v = self.coeffs[i - k].clone();
            coeffs[i] += v;
        }
        HilbertSeries::from_coeffs(coeffs)
    }

    pub fn add(&self, other: &HilbertSeries) -> HilbertSeries {
        let trunc = self.truncation().min(other.truncation());
        HilbertSeries::from_coeffs(
            (0..=trunc)
                .map(|i| &self.coeffs[i] + &other.coeffs[i])
                .collect(),
        )
    }

    /// Compare coefficients on the common window.
    pub fn agrees_with(&self, other: &HilbertSeries) -> bool {
        let trunc = self.truncation().min(other.truncation());
        (0..=trunc).all(|i| self.coeffs[i] == other.coeffs[i])
    }
}

impl fmt::Display for HilbertSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", v.join(", "))
    }
}
