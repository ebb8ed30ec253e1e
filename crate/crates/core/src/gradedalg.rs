//! Graded module calculus over invariant rings.
//!
//! Everything here is exact linear algebra over Q. A [`GModule`] is a free
//! graded module over a weighted polynomial base ring (the invariants of a
//! reflection group acting on a vector space), equipped with one commuting
//! action matrix per ambient coordinate. Cohomological degrees are used
//! throughout the module layer: linear coordinates sit in degree 2.

use crate::blockdata::Block;
use crate::mpoly::{monomials_of_degree, weighted_monomials_of_degree, Expt, MPoly};
use crate::qlin::{qi, HilbertSeries, LinSolver, QMat, Q};
use crate::rootdata::{invariant_basis_by_degree, invariant_degrees, InvariantDegrees};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

// ---------------------------------------------------------------------------
// Invariant rings
// ---------------------------------------------------------------------------

/// Summary of the invariant ring of a finite matrix group.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantRingReport {
    pub group_order: usize,
    pub free: bool,
    /// Degrees of free homogeneous generators when `free`.
    pub degrees: Vec<usize>,
    /// Hilbert series in algebraic degree, truncated.
    pub hilbert: Vec<String>,
}

/// Describe the invariant ring of a matrix group: freeness, generator
/// degrees, and the Hilbert series (in algebraic degree) up to `trunc`.
pub fn invariant_ring(mats: &[QMat], trunc: usize) -> Result<InvariantRingReport> {
    let molien = crate::rootdata::molien_series(mats, trunc)?;
    let coeffs: Vec<String> = molien.iter().map(|c| c.to_string()).collect();
    match invariant_degrees(mats)? {
        InvariantDegrees::Free(degrees) => Ok(InvariantRingReport {
            group_order: mats.len(),
            free: true,
            degrees,
            hilbert: coeffs,
        }),
        InvariantDegrees::NonFree(_) => Ok(InvariantRingReport {
            group_order: mats.len(),
            free: false,
            degrees: vec![],
            hilbert: coeffs,
        }),
    }
}

/// Fundamental invariants of a finite reflection group: `degrees[i]` is the
/// algebraic degree of `gens[i]`, chosen deterministically degree by degree
/// (new invariants independent of products of earlier generators).
pub fn fundamental_invariants(mats: &[QMat]) -> Result<(Vec<usize>, Vec<MPoly>)> {
    let degrees = match invariant_degrees(mats)? {
        InvariantDegrees::Free(d) => d,
        InvariantDegrees::NonFree(_) => {
            return Err(Error::BasisExtraction(
                "invariant ring is not free".into(),
            ))
        }
    };
    let nv = mats[0].rows;
    let maxdeg = degrees.iter().copied().max().unwrap_or(0);
    let inv_basis = invariant_basis_by_degree(mats, maxdeg)?;
    let mut gens: Vec<MPoly> = Vec::new();
    let mut gdegs: Vec<usize> = Vec::new();
    let mut sorted = degrees.clone();
    sorted.sort_unstable();
    for d in 1..=maxdeg {
        let want = sorted.iter().filter(|&&x| x == d).count();
        if want == 0 {
            continue;
        }
        // Span of products of earlier generators in degree d.
        let monos = monomials_of_degree(nv, d);
        let index: HashMap<Expt, usize> = monos
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        let to_row = |p: &MPoly| -> Vec<(usize, Q)> {
            p.terms
                .iter()
                .map(|(e, c)| (index[e], c.clone()))
                .collect()
        };
        let mut solver = LinSolver::new(monos.len());
        for expt in weighted_monomials_of_degree(&gdegs, d) {
            let mut prod = MPoly::one(nv);
            for (i, &k) in expt.iter().enumerate() {
                if k > 0 {
                    prod = prod.mul(&gens[i].pow(k as usize));
                }
            }
            solver.add_row(to_row(&prod));
        }
        let mut taken = 0;
        for cand in &inv_basis[d] {
            if taken == want {
                break;
            }
            let before = solver.rank();
            solver.add_row(to_row(cand));
            if solver.rank() > before {
                gens.push(cand.clone());
                gdegs.push(d);
                taken += 1;
            }
        }
        if taken != want {
            return Err(Error::BasisExtraction(format!(
                "expected {want} new invariants in degree {d}, found {taken}"
            )));
        }
    }
    Ok((gdegs, gens))
}

// ---------------------------------------------------------------------------
// Exact linear solving helpers
// ---------------------------------------------------------------------------

/// Solve A·x = rhs by Gaussian elimination (rows of A given densely).
/// Returns one solution, or None when inconsistent.
pub fn solve_affine(mut rows: Vec<Vec<Q>>, mut rhs: Vec<Q>) -> Option<Vec<Q>> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let nrows = rows.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut used = vec![false; nrows];
    for col in 0..ncols {
        let Some(r) = (0..nrows).find(|&r| !used[r] && !rows[r][col].is_zero()) else {
            continue;
        };
        used[r] = true;
        pivot_of_col[col] = Some(r);
        let inv = Q::one() / rows[r][col].clone();
        for c in col..ncols {
            let v = rows[r][c].clone() * &inv;
            rows[r][c] = v;
        }
        rhs[r] = rhs[r].clone() * &inv;
        for r2 in 0..nrows {
            if r2 != r && !rows[r2][col].is_zero() {
                let f = rows[r2][col].clone();
                for c in col..ncols {
                    let v = rows[r2][c].clone() - &f * &rows[r][c];
                    rows[r2][c] = v;
                }
                let v = rhs[r2].clone() - &f * &rhs[r];
                rhs[r2] = v;
            }
        }
    }
    // Inconsistent if a zero row has nonzero rhs.
    for r in 0..nrows {
        if !used[r] && !rhs[r].is_zero() {
            return None;
        }
    }
    let mut x = vec![Q::zero(); ncols];
    for col in 0..ncols {
        if let Some(r) = pivot_of_col[col] {
            x[col] = rhs[r].clone();
        }
    }
    Some(x)
}

fn vectorize(p: &MPoly, index: &HashMap<Expt, usize>, len: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); len];
    for (e, c) in &p.terms {
        v[index[e]] = c.clone();
    }
    v
}

// ---------------------------------------------------------------------------
// Staircase presentation: C[V] as a free module over a polynomial subalgebra
// ---------------------------------------------------------------------------

/// A polynomial ring C[V] presented as a free module over the subalgebra
/// generated by `inv` (fundamental invariants of a reflection group): a
/// staircase monomial basis plus an exact expansion routine.
#[derive(Debug, Clone)]
pub struct Staircase {
    /// Dimension of V.
    pub nvars: usize,
    /// Subalgebra generators and their algebraic degrees.
    pub inv: Vec<MPoly>,
    pub weights: Vec<usize>,
    /// Module basis monomials over the subalgebra (staircase), by degree.
    pub basis: Vec<Expt>,
}

impl Staircase {
    /// Choose staircase monomials: in each degree, monomials independent of
    /// the ideal generated by the invariants plus earlier choices.
    pub fn new(nvars: usize, weights: Vec<usize>, inv: Vec<MPoly>) -> Result<Staircase> {
        let expected: usize = weights.iter().product();
        let maxdeg: usize = weights.iter().map(|d| d - 1).sum();
        let mut basis: Vec<Expt> = Vec::new();
        for d in 0..=maxdeg {
            let monos = monomials_of_degree(nvars, d);
            let index: HashMap<Expt, usize> = monos
                .iter()
                .cloned()
                .enumerate()
                .map(|(i, m)| (m, i))
                .collect();
            let mut solver = LinSolver::new(monos.len());
            // Ideal component: e_i times all monomials of complementary degree.
            for (i, e) in inv.iter().enumerate() {
                if weights[i] > d {
                    continue;
                }
                for m in monomials_of_degree(nvars, d - weights[i]) {
                    let mut mono = MPoly::one(nvars);
                    for (v, &k) in m.iter().enumerate() {
                        if k > 0 {
                            mono = mono.mul(&MPoly::var(nvars, v).pow(k as usize));
                        }
                    }
                    let p = e.mul(&mono);
                    solver.add_row(
                        p.terms.iter().map(|(e, c)| (index[e], c.clone())).collect(),
                    );
                }
            }
            for m in monos {
                let before = solver.rank();
                solver.add_row(vec![(index[&m], Q::one())]);
                if solver.rank() > before {
                    basis.push(m);
                }
            }
        }
        if basis.len() != expected {
            return Err(Error::BasisExtraction(format!(
                "staircase has {} monomials, expected {}",
                basis.len(),
                expected
            )));
        }
        Ok(Staircase {
            nvars,
            inv,
            weights,
            basis,
        })
    }

    fn basis_poly(&self, k: usize) -> MPoly {
        let mut p = MPoly::one(self.nvars);
        for (v, &e) in self.basis[k].iter().enumerate() {
            if e > 0 {
                p = p.mul(&MPoly::var(self.nvars, v).pow(e as usize));
            }
        }
        p
    }

    fn basis_degree(&self, k: usize) -> usize {
        self.basis[k].iter().map(|&e| e as usize).sum()
    }

    /// Expand a homogeneous polynomial as Σ c_k(z)·basis_k with c_k a
    /// polynomial (in the invariant variables z, `inv.len()` of them).
    pub fn expand(&self, f: &MPoly) -> Result<Vec<MPoly>> {
        let nz = self.inv.len();
        if f.is_zero() {
            return Ok(vec![MPoly::zero(nz); self.basis.len()]);
        }
        let d = f.total_degree().unwrap();
        if !f.is_homogeneous() {
            return Err(Error::BadDegree("expansion needs homogeneous input".into()));
        }
        let monos = monomials_of_degree(self.nvars, d);
        let index: HashMap<Expt, usize> = monos
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        // Columns: (basis element k, invariant monomial a) with matching degree.
        let mut cols: Vec<Vec<Q>> = Vec::new();
        let mut tags: Vec<(usize, Expt)> = Vec::new();
        for k in 0..self.basis.len() {
            let bd = self.basis_degree(k);
            if bd > d {
                continue;
            }
            for a in weighted_monomials_of_degree(&self.weights, d - bd) {
                let mut p = self.basis_poly(k);
                for (i, &e) in a.iter().enumerate() {
                    if e > 0 {
                        p = p.mul(&self.inv[i].pow(e as usize));
                    }
                }
                cols.push(vectorize(&p, &index, monos.len()));
                tags.push((k, a));
            }
        }
        // Solve the transposed system: rows indexed by monomials.
        let rows: Vec<Vec<Q>> = (0..monos.len())
            .map(|r| cols.iter().map(|c| c[r].clone()).collect())
            .collect();
        let rhs = vectorize(f, &index, monos.len());
        let x = solve_affine(rows, rhs).ok_or_else(|| {
            Error::BasisExtraction("polynomial not in the free module span".into())
        })?;
        let mut out = vec![MPoly::zero(nz); self.basis.len()];
        for (i, (k, a)) in tags.iter().enumerate() {
            if !x[i].is_zero() {
                out[*k].insert_term(a.clone(), x[i].clone());
            }
        }
        Ok(out)
    }
}

/// Express a polynomial in the subalgebra generated by `gens` (with the
/// given algebraic degrees) as a polynomial in new variables z_i ↦ gens[i].
pub fn express_in_subalgebra(
    gens: &[MPoly],
    weights: &[usize],
    f: &MPoly,
) -> Result<MPoly> {
    let nz = gens.len();
    if f.is_zero() {
        return Ok(MPoly::zero(nz));
    }
    if !f.is_homogeneous() {
        return Err(Error::BadDegree("expected homogeneous polynomial".into()));
    }
    let nvars = f.nvars;
    let d = f.total_degree().unwrap();
    let monos = monomials_of_degree(nvars, d);
    let index: HashMap<Expt, usize> = monos
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let zmonos = weighted_monomials_of_degree(weights, d);
    let mut cols = Vec::new();
    for a in &zmonos {
        let mut p = MPoly::one(nvars);
        for (i, &e) in a.iter().enumerate() {
            if e > 0 {
                p = p.mul(&gens[i].pow(e as usize));
            }
        }
        cols.push(vectorize(&p, &index, monos.len()));
    }
    let rows: Vec<Vec<Q>> = (0..monos.len())
        .map(|r| cols.iter().map(|c| c[r].clone()).collect())
        .collect();
    let rhs = vectorize(f, &index, monos.len());
    let x = solve_affine(rows, rhs)
        .ok_or_else(|| Error::BasisExtraction("polynomial not in subalgebra".into()))?;
    let mut out = MPoly::zero(nz);
    for (i, a) in zmonos.iter().enumerate() {
        if !x[i].is_zero() {
            out.insert_term(a.clone(), x[i].clone());
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Graded modules
// ---------------------------------------------------------------------------

/// Matrix over the base polynomial ring (column convention).
pub type PMat = Vec<Vec<MPoly>>;

/// A free graded module over the weighted polynomial base ring, with one
/// commuting action matrix per ambient coordinate.
///
/// `zweights` are the *algebraic* degrees of the base variables; generator
/// degrees `gens` and all degree bookkeeping on the module side are
/// *cohomological* (doubled: a linear coordinate has degree 2).
#[derive(Debug, Clone)]
pub struct GModule {
    pub zweights: Vec<usize>,
    pub gens: Vec<usize>,
    /// y[j][i][k]: coefficient of generator i in Y_j · generator k.
    pub y: Vec<PMat>,
}

impl GModule {
    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn num_actions(&self) -> usize {
        self.y.len()
    }

    /// Shift all generator degrees up by `s` (cohomological).
    pub fn shifted(&self, s: i64) -> GModule {
        let gens = self
            .gens
            .iter()
            .map(|&d| (d as i64 + s) as usize)
            .collect();
        GModule {
            zweights: self.zweights.clone(),
            gens,
            y: self.y.clone(),
        }
    }

    pub fn direct_sum(&self, other: &GModule) -> GModule {
        assert_eq!(self.zweights, other.zweights);
        assert_eq!(self.num_actions(), other.num_actions());
        let (a, b) = (self.rank(), other.rank());
        let nz = self.zweights.len();
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().copied());
        let mut y = Vec::new();
        for j in 0..self.num_actions() {
            let mut m = vec![vec![MPoly::zero(nz); a + b]; a + b];
            for i in 0..a {
                for k in 0..a {
                    m[i][k] = self.y[j][i][k].clone();
                }
            }
            for i in 0..b {
                for k in 0..b {
                    m[a + i][a + k] = other.y[j][i][k].clone();
                }
            }
            y.push(m);
        }
        GModule {
            zweights: self.zweights.clone(),
            gens,
            y,
        }
    }

    /// Hilbert series in cohomological degree.
    pub fn hilbert(&self, trunc: usize) -> HilbertSeries {
        let mut num = vec![BigInt::zero(); self.gens.iter().copied().max().unwrap_or(0) + 1];
        for &d in &self.gens {
            num[d] += 1;
        }
        let denom: Vec<usize> = self.zweights.iter().map(|&w| 2 * w).collect();
        HilbertSeries::from_closed_form(num, denom, trunc)
    }

    /// Verify entries are weighted-homogeneous of the right degree and the
    /// action matrices commute pairwise.
    pub fn check(&self) -> Result<()> {
        for (j, m) in self.y.iter().enumerate() {
            if m.len() != self.rank() || m.iter().any(|r| r.len() != self.rank()) {
                return Err(Error::DimensionMismatch(format!(
                    "action matrix {j} has wrong shape"
                )));
            }
            for i in 0..self.rank() {
                for k in 0..self.rank() {
                    let p = &m[i][k];
                    if p.is_zero() {
                        continue;
                    }
                    let want = 2 + self.gens[k] as i64 - self.gens[i] as i64;
                    let ok = want >= 0
                        && want % 2 == 0
                        && p.terms.keys().all(|e| {
                            2 * e
                                .iter()
                                .zip(&self.zweights)
                                .map(|(&a, &w)| a as usize * w)
                                .sum::<usize>()
                                == want as usize
                        });
                    if !ok {
                        return Err(Error::BadDegree(format!(
                            "entry ({i},{k}) of Y_{j} not homogeneous of degree {want}"
                        )));
                    }
                }
            }
        }
        for a in 0..self.y.len() {
            for b in (a + 1)..self.y.len() {
                let ab = pmat_mul(&self.y[a], &self.y[b]);
                let ba = pmat_mul(&self.y[b], &self.y[a]);
                if ab != ba {
                    return Err(Error::BadAction(format!(
                        "action matrices {a} and {b} do not commute"
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn pmat_mul(a: &PMat, b: &PMat) -> PMat {
    let n = a.len();
    let m = b[0].len();
    let inner = b.len();
    let nz = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|p| p.nvars)
        .next()
        .unwrap_or(0);
    let mut out = vec![vec![MPoly::zero(nz); m]; n];
    for i in 0..n {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[k][j].is_zero() {
                    out[i][j] = out[i][j].add(&a[i][k].mul(&b[k][j]));
                }
            }
        }
    }
    out
}

pub fn pmat_add(a: &PMat, b: &PMat) -> PMat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect())
        .collect()
}

pub fn pmat_sub(a: &PMat, b: &PMat) -> PMat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.sub(y)).collect())
        .collect()
}

pub fn pmat_scale(a: &PMat, c: &Q) -> PMat {
    a.iter()
        .map(|r| r.iter().map(|x| x.scale(c)).collect())
        .collect()
}

pub fn pmat_identity(n: usize, nz: usize) -> PMat {
    let mut m = vec![vec![MPoly::zero(nz); n]; n];
    for i in 0..n {
        m[i][i] = MPoly::one(nz);
    }
    m
}

pub fn pmat_is_zero(a: &PMat) -> bool {
    a.iter().all(|r| r.iter().all(|p| p.is_zero()))
}

// ---------------------------------------------------------------------------
// Hom spaces
// ---------------------------------------------------------------------------

/// Basis of the space of degree-k graded module homomorphisms M → N
/// (base-linear maps commuting with every action matrix). Entry (i, j) of a
/// hom matrix is homogeneous of cohomological degree k + deg(gen_j^M) −
/// deg(gen_i^N).
pub fn hom_basis(m: &GModule, n: &GModule, k: i64) -> Result<Vec<PMat>> {
    if m.zweights != n.zweights || m.num_actions() != n.num_actions() {
        return Err(Error::DimensionMismatch(
            "hom between modules over different rings".into(),
        ));
    }
    let nz = m.zweights.len();
    // Unknowns: (i, j, monomial).
    let mut unknowns: Vec<(usize, usize, Expt)> = Vec::new();
    let mut slot: HashMap<(usize, usize), (usize, Vec<Expt>)> = HashMap::new();
    for i in 0..n.rank() {
        for j in 0..m.rank() {
            let d = k + m.gens[j] as i64 - n.gens[i] as i64;
            if d < 0 || d % 2 != 0 {
                continue;
            }
            let monos = weighted_monomials_of_degree(&m.zweights, (d / 2) as usize);
            if monos.is_empty() {
                continue;
            }
            slot.insert((i, j), (unknowns.len(), monos.clone()));
            for e in monos {
                unknowns.push((i, j, e));
            }
        }
    }
    if unknowns.is_empty() {
        return Ok(vec![]);
    }
    let nu = unknowns.len();
    let mut solver = LinSolver::new(nu);
    // For each action matrix and each (target row i, source col j):
    //   Σ_l φ[i][l]·Ym[l][j]  −  Σ_l Yn[i][l]·φ[l][j]  =  0.
    for a in 0..m.num_actions() {
        for i in 0..n.rank() {
            for j in 0..m.rank() {
                // Collect the linear combination as a map monomial → row
                // (ordered, so row insertion order is deterministic).
                let mut acc: BTreeMap<Expt, Vec<(usize, Q)>> = BTreeMap::new();
                let mut push = |poly: &MPoly, base: usize, mono_of_unknown: &Expt| {
                    // term (coef poly) times unknown var with exponent e0.
                    for (e, c) in &poly.terms {
                        let mut prod = e.clone();
                        for (x, y) in prod.iter_mut().zip(mono_of_unknown) {
                            *x += *y;
                        }
                        acc.entry(prod).or_default().push((base, c.clone()));
                    }
                };
                for l in 0..m.rank() {
                    // φ[i][l] · Ym[l][j]
                    if let Some((base, monos)) = slot.get(&(i, l)) {
                        let y = &m.y[a][l][j];
                        if !y.is_zero() {
                            for (u, e0) in monos.iter().enumerate() {
                                push(y, base + u, e0);
                            }
                        }
                    }
                }
                for l in 0..n.rank() {
                    // − Yn[i][l] · φ[l][j]
                    if let Some((base, monos)) = slot.get(&(l, j)) {
                        let y = &n.y[a][i][l];
                        if !y.is_zero() {
                            let neg = y.neg();
                            for (u, e0) in monos.iter().enumerate() {
                                push(&neg, base + u, e0);
                            }
                        }
                    }
                }
                for (_, entries) in acc {
                    // Combine duplicate unknown indices.
                    let mut row: HashMap<usize, Q> = HashMap::new();
                    for (u, c) in entries {
                        *row.entry(u).or_insert_with(Q::zero) += c;
                    }
                    let sparse: Vec<(usize, Q)> = row
                        .into_iter()
                        .filter(|(_, c)| !c.is_zero())
                        .collect();
                    if !sparse.is_empty() {
                        solver.add_row(sparse);
                    }
                }
            }
        }
    }
    let null = solver.nullspace_basis();
    let mut out = Vec::new();
    for vec in null {
        let mut phi = vec![vec![MPoly::zero(nz); m.rank()]; n.rank()];
        for (u, (i, j, e)) in unknowns.iter().enumerate() {
            if !vec[u].is_zero() {
                phi[*i][*j].insert_term(e.clone(), vec[u].clone());
            }
        }
        out.push(phi);
    }
    Ok(out)
}

/// Graded dimensions of Hom(M, N) for degrees in [-window, window].
pub fn hom_dims(m: &GModule, n: &GModule, window: usize) -> Result<Vec<(i64, usize)>> {
    let mut out = Vec::new();
    for k in -(window as i64)..=(window as i64) {
        out.push((k, hom_basis(m, n, k)?.len()));
    }
    Ok(out)
}

/// Constant part of a degree-0 endomorphism-style matrix: the entries
/// between generators of equal degree (everything else vanishes at z = 0).
pub fn fiber_matrix(n_gens: &[usize], m_gens: &[usize], phi: &PMat) -> QMat {
    let mut f = QMat::zero(n_gens.len(), m_gens.len());
    for i in 0..n_gens.len() {
        for j in 0..m_gens.len() {
            if n_gens[i] == m_gens[j] {
                *f.at_mut(i, j) = phi[i][j].constant_term();
            }
        }
    }
    f
}

// ---------------------------------------------------------------------------
// Idempotents and Krull–Schmidt decomposition
// ---------------------------------------------------------------------------

fn qmat_vectorize(m: &QMat) -> Vec<Q> {
    m.data.clone()
}

/// Minimal polynomial of a rational matrix (monic, low-degree-first coeffs).
fn min_poly(m: &QMat) -> Vec<Q> {
    let n = m.rows;
    let mut solver = LinSolver::new(n * n);
    let mut powers: Vec<QMat> = vec![QMat::identity(n)];
    loop {
        let last = powers.last().unwrap();
        let v = qmat_vectorize(last);
        let before = solver.rank();
        solver.add_row(
            v.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.clone()))
                .collect(),
        );
        if solver.rank() == before {
            break;
        }
        powers.push(m.mul(last));
    }
    let k = powers.len() - 1; // degree of minimal polynomial
    // Solve Σ c_i M^i = −M^k.
    let rows: Vec<Vec<Q>> = (0..n * n)
        .map(|r| (0..k).map(|i| powers[i].data[r].clone()).collect())
        .collect();
    let rhs: Vec<Q> = (0..n * n).map(|r| -powers[k].data[r].clone()).collect();
    let x = solve_affine(rows, rhs).expect("minimal polynomial solve");
    let mut coeffs = x;
    coeffs.push(Q::one());
    coeffs
}

/// Rational roots of a rational-coefficient polynomial.
fn rational_roots(coeffs: &[Q]) -> Vec<Q> {
    // Clear denominators to integer coefficients.
    let mut lcm = BigInt::one();
    for c in coeffs {
        let d = c.denom().clone();
        let g = gcd(&lcm, &d);
        lcm = &lcm / g * d;
    }
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let lead = ints.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
    let trail = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let mut roots = Vec::new();
    if trail > 0 {
        roots.push(Q::zero());
    }
    let a0 = ints[trail].abs();
    let an = ints[lead].abs();
    for p in divisors(&a0) {
        for q in divisors(&an) {
            for sign in [1i64, -1] {
                let cand = Q::new(p.clone() * BigInt::from(sign), q.clone());
                if roots.contains(&cand) {
                    continue;
                }
                if eval_poly(coeffs, &cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    roots
}

fn eval_poly(coeffs: &[Q], x: &Q) -> Q {
    let mut acc = Q::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    if a.is_zero() {
        BigInt::one()
    } else {
        a
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    // Exhaustive up to n; fiber matrices are tiny so n stays small.
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            out.push(&n / &d);
        }
        d += 1;
    }
    out.sort();
    out.dedup();
    out
}

/// Try to produce a nontrivial idempotent in the matrix algebra spanned by
/// `basis` (with identity `id`), using rational spectral projectors refined
/// by the Newton iteration e ← 3e² − 2e³. Returns None when the algebra is
/// certified local (indecomposable case).
pub fn find_fiber_idempotent(basis: &[QMat], id: &QMat) -> Result<Option<QMat>> {
    let n = id.rows;
    // Close to an algebra basis.
    let mut alg: Vec<QMat> = Vec::new();
    let mut solver = LinSolver::new(n * n);
    let push = |m: QMat, alg: &mut Vec<QMat>, solver: &mut LinSolver| -> bool {
        let before = solver.rank();
        solver.add_row(
            m.data
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.clone()))
                .collect(),
        );
        if solver.rank() > before {
            alg.push(m);
            true
        } else {
            false
        }
    };
    push(id.clone(), &mut alg, &mut solver);
    for b in basis {
        push(b.clone(), &mut alg, &mut solver);
    }
    let mut i = 0;
    while i < alg.len() {
        let mut j = 0;
        while j < alg.len() {
            let p = alg[i].mul(&alg[j]);
            push(p, &mut alg, &mut solver);
            j += 1;
        }
        i += 1;
    }
    // Radical via the trace form (char 0, faithful representation).
    let dim = alg.len();
    let mut gram = QMat::zero(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let p = alg[i].mul(&alg[j]);
            *gram.at_mut(i, j) = (0..n).map(|r| p.at(r, r).clone()).sum();
        }
    }
    let rad_dim = dim - gram.rank();
    if dim - rad_dim <= 1 {
        return Ok(None); // local algebra: indecomposable
    }
    // Search candidate elements for rational spectral splittings.
    let mut candidates: Vec<QMat> = alg.clone();
    for i in 0..dim.min(6) {
        for j in (i + 1)..dim.min(6) {
            candidates.push(alg[i].add(&alg[j]));
            candidates.push(alg[i].add(&alg[j].scale(&qi(2))));
        }
    }
    for g in &candidates {
        let mp = min_poly(g);
        let roots = rational_roots(&mp);
        if roots.len() < 2 {
            continue;
        }
        for pick in &roots {
            // Initial projector: 1 at `pick`, 0 at the other rational roots.
            let mut e = QMat::identity(n);
            for r in &roots {
                if r == pick {
                    continue;
                }
                let mut f = g.clone();
                for d in 0..n {
                    let v = f.at(d, d).clone() - r;
                    *f.at_mut(d, d) = v;
                }
                e = e.mul(&f.scale(&(Q::one() / (pick.clone() - r))));
            }
            // Newton refinement to kill nilpotent error terms.
            for _ in 0..64 {
                let e2 = e.mul(&e);
                if e2 == e {
                    break;
                }
                // e ← 3e² − 2e³
                let e3 = e2.mul(&e);
                e = e2.scale(&qi(3)).add(&e3.scale(&qi(-2)));
            }
            if e.mul(&e) != e {
                continue;
            }
            let r = e.rank();
            if r == 0 || r == n || e == *id {
                continue;
            }
            return Ok(Some(e));
        }
    }
    Err(Error::IrrationalSplitting(
        "no rational idempotent found in a non-local fiber algebra".into(),
    ))
}

/// Lift a fiber idempotent to an exact idempotent endomorphism.
pub fn lift_idempotent(m: &GModule, homs: &[PMat], e: &QMat) -> Result<PMat> {
    // Solve for a combination of hom-basis elements with fiber = e.
    let nu = homs.len();
    let g = m.rank();
    let rows: Vec<Vec<Q>> = (0..g * g)
        .map(|rc| {
            (0..nu)
                .map(|u| {
                    let f = fiber_matrix(&m.gens, &m.gens, &homs[u]);
                    f.data[rc].clone()
                })
                .collect()
        })
        .collect();
    let rhs: Vec<Q> = e.data.clone();
    let x = solve_affine(rows, rhs).ok_or_else(|| {
        Error::BasisExtraction("fiber idempotent not in the image of End".into())
    })?;
    let nz = m.zweights.len();
    let mut phi = vec![vec![MPoly::zero(nz); g]; g];
    for (u, c) in x.iter().enumerate() {
        if !c.is_zero() {
            phi = pmat_add(&phi, &pmat_scale(&homs[u], c));
        }
    }
    // Newton iteration in End(M); positive-degree parts are nilpotent.
    for _ in 0..64 {
        let p2 = pmat_mul(&phi, &phi);
        if p2 == phi {
            return Ok(phi);
        }
        let p3 = pmat_mul(&p2, &phi);
        phi = pmat_sub(&pmat_scale(&p2, &qi(3)), &pmat_scale(&p3, &qi(2)));
    }
    Err(Error::UnstableIdempotent(
        "Newton iteration did not stabilize".into(),
    ))
}

/// Columns of `eps` forming a pivot set (deterministic, leftmost).
fn pivot_columns(eps: &QMat) -> Vec<usize> {
    let mut solver = LinSolver::new(eps.rows);
    let mut cols = Vec::new();
    for j in 0..eps.cols {
        let before = solver.rank();
        solver.add_row(
            (0..eps.rows)
                .filter(|&i| !eps.at(i, j).is_zero())
                .map(|i| (i, eps.at(i, j).clone()))
                .collect(),
        );
        if solver.rank() > before {
            cols.push(j);
        }
    }
    cols
}

/// Extract the image of an exact idempotent as a free graded module.
///
/// The chosen generators are the columns of the idempotent at pivot columns
/// of its fiber; the action matrices are re-expressed by exact polynomial
/// linear solves.
pub fn image_module(m: &GModule, phi: &PMat) -> Result<(GModule, PMat)> {
    let eps = fiber_matrix(&m.gens, &m.gens, phi);
    let cols = pivot_columns(&eps);
    let g = m.rank();
    let r = cols.len();
    if r == 0 {
        let zero = GModule {
            zweights: m.zweights.clone(),
            gens: vec![],
            y: vec![vec![]; m.num_actions()],
        };
        return Ok((zero, vec![vec![]; g]));
    }
    // Generator matrix G: columns of phi at the pivot set.
    let gmat: PMat = (0..g)
        .map(|i| cols.iter().map(|&j| phi[i][j].clone()).collect())
        .collect();
    let gens: Vec<usize> = cols.iter().map(|&j| m.gens[j]).collect();
    // For each action: solve G·X = Y·G entrywise in polynomial coefficients.
    let mut y = Vec::new();
    for a in 0..m.num_actions() {
        let target = pmat_mul(&m.y[a], &gmat);
        let x = solve_pmat_equation(m, &gmat, &gens, &target, 2)?;
        y.push(x);
    }
    let out = GModule {
        zweights: m.zweights.clone(),
        gens,
        y,
    };
    out.check()?;
    Ok((out, gmat))
}

/// Solve G·X = T where X has entry degrees `shift + gens[k] − gens[i]`
/// (cohomological); returns X. `gens` are the degrees of the columns of G.
pub fn solve_pmat_equation(
    m: &GModule,
    gmat: &PMat,
    gens: &[usize],
    target: &PMat,
    shift: i64,
) -> Result<PMat> {
    let nz = m.zweights.len();
    let r = gens.len();
    let g = m.rank();
    let mut x = vec![vec![MPoly::zero(nz); r]; r];
    for col in 0..r {
        // Unknown column: entries x[i][col] of degree shift + gens[col] − gens[i].
        let mut unknowns: Vec<(usize, Expt)> = Vec::new();
        for i in 0..r {
            let d = shift + gens[col] as i64 - gens[i] as i64;
            if d < 0 || d % 2 != 0 {
                continue;
            }
            for e in weighted_monomials_of_degree(&m.zweights, (d / 2) as usize) {
                unknowns.push((i, e));
            }
        }
        // Equations: for each row rr of G: Σ_i G[rr][i]·x_i = target[rr][col],
        // split over monomials of degree shift + gens[col] − m.gens[rr].
        let mut rows: Vec<Vec<Q>> = Vec::new();
        let mut rhs: Vec<Q> = Vec::new();
        for rr in 0..g {
            let d = shift + gens[col] as i64 - m.gens[rr] as i64;
            if d < 0 || d % 2 != 0 {
                if !target[rr][col].is_zero() {
                    return Err(Error::BasisExtraction(
                        "target has entries outside the solvable degrees".into(),
                    ));
                }
                continue;
            }
            for mono in weighted_monomials_of_degree(&m.zweights, (d / 2) as usize) {
                let mut row = vec![Q::zero(); unknowns.len()];
                for (u, (i, e)) in unknowns.iter().enumerate() {
                    // Coefficient of `mono` in G[rr][i]·z^e.
                    if e.iter().zip(&mono).all(|(a, b)| a <= b) {
                        let diff: Expt =
                            mono.iter().zip(e).map(|(b, a)| b - a).collect();
                        row[u] = gmat[rr][*i].coeff(&diff);
                    }
                }
                rows.push(row);
                rhs.push(target[rr][col].coeff(&mono));
            }
        }
        let sol = solve_affine(rows, rhs).ok_or_else(|| {
            Error::BasisExtraction("image not closed under the action".into())
        })?;
        for (u, (i, e)) in unknowns.iter().enumerate() {
            if !sol[u].is_zero() {
                x[*i][col].insert_term(e.clone(), sol[u].clone());
            }
        }
    }
    Ok(x)
}

/// Decompose a module into indecomposable summands (Krull–Schmidt).
pub fn decompose(m: &GModule) -> Result<Vec<GModule>> {
    if m.rank() == 0 {
        return Ok(vec![]);
    }
    let homs = hom_basis(m, m, 0)?;
    let fibers: Vec<QMat> = homs
        .iter()
        .map(|h| fiber_matrix(&m.gens, &m.gens, h))
        .collect();
    let id = QMat::identity(m.rank());
    match find_fiber_idempotent(&fibers, &id)? {
        None => Ok(vec![m.clone()]),
        Some(e) => {
            let phi = lift_idempotent(m, &homs, &e)?;
            let (part1, _) = image_module(m, &phi)?;
            let comp = pmat_sub(&pmat_identity(m.rank(), m.zweights.len()), &phi);
            let (part2, _) = image_module(m, &comp)?;
            if part1.rank() == 0 || part2.rank() == 0 {
                return Err(Error::UnstableIdempotent(
                    "idempotent produced a trivial splitting".into(),
                ));
            }
            let mut out = decompose(&part1)?;
            out.extend(decompose(&part2)?);
            Ok(out)
        }
    }
}

/// Invert an endomorphism whose fiber is invertible: A = A₀(1 + N) with N
/// of strictly positive degree (nilpotent), inverted by a finite Neumann
/// series.
pub fn invert_endo(gens: &[usize], a: &PMat) -> Result<PMat> {
    let nz = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|p| p.nvars)
        .next()
        .unwrap_or(0);
    let f = fiber_matrix(gens, gens, a);
    let f_inv = f
        .inverse()
        .ok_or_else(|| Error::BasisExtraction("endomorphism fiber not invertible".into()))?;
    // A₀⁻¹ as constant matrix, promoted to polynomials.
    let n = gens.len();
    let a0inv: PMat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| MPoly::constant(nz, f_inv.at(i, j).clone()))
                .collect()
        })
        .collect();
    let id = pmat_identity(n, nz);
    let nmat = pmat_sub(&id, &pmat_mul(&a0inv, a));
    let mut sum = id.clone();
    let mut pow = nmat.clone();
    let mut guard = 0;
    while !pmat_is_zero(&pow) {
        sum = pmat_add(&sum, &pow);
        pow = pmat_mul(&pow, &nmat);
        guard += 1;
        if guard > 200 {
            return Err(Error::UnstableIdempotent(
                "Neumann series did not terminate".into(),
            ));
        }
    }
    Ok(pmat_mul(&sum, &a0inv))
}

/// Split off one copy of `k` from `m`, if a split embedding exists: returns
/// the complement. Searches hom bases for a pair (f: K→M, g: M→K) with g∘f
/// invertible.
pub fn peel_known(m: &GModule, k: &GModule) -> Result<Option<GModule>> {
    if k.rank() == 0 || m.rank() < k.rank() {
        return Ok(None);
    }
    let fs = hom_basis(k, m, 0)?;
    let gs = hom_basis(m, k, 0)?;
    for f in &fs {
        for g in &gs {
            let a = pmat_mul(g, f);
            let fib = fiber_matrix(&k.gens, &k.gens, &a);
            if fib.inverse().is_none() {
                continue;
            }
            let a_inv = invert_endo(&k.gens, &a)?;
            // h = f∘(g∘f)⁻¹∘g is an idempotent projecting onto a copy of K.
            let h = pmat_mul(&pmat_mul(f, &a_inv), g);
            let comp = pmat_sub(&pmat_identity(m.rank(), m.zweights.len()), &h);
            let (rest, _) = image_module(m, &comp)?;
            if rest.rank() + k.rank() != m.rank() {
                return Err(Error::BasisExtraction(
                    "peeled complement has wrong rank".into(),
                ));
            }
            return Ok(Some(rest));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// The structure algebra of the block variety, as a graded module
// ---------------------------------------------------------------------------

/// Presentation of the structure algebra O(B) of the block variety and the
/// data needed to build component sheaves and restriction maps.
#[derive(Debug, Clone)]
pub struct VarietyPresentation {
    /// O(B) as a free graded module over the small invariant ring.
    pub module: GModule,
    /// Dimension of the ambient Cartan space.
    pub ambient: usize,
    /// Inclusion of the (−θ)-eigenspace a into the ambient space.
    pub iota: QMat,
    /// Small Weyl group W' restricted to a (matrices on a).
    pub w_prime: Vec<QMat>,
    /// Fundamental invariants of W' on a, with degrees (the base variables).
    pub aprime_gens: Vec<MPoly>,
    pub aprime_degrees: Vec<usize>,
    /// Fundamental invariants of the full Weyl group on the ambient space.
    pub w_invariants: Vec<MPoly>,
    pub w_degrees: Vec<usize>,
    /// Staircase basis of C[ambient] over the full invariants.
    pub staircase: Staircase,
    /// The images of the full invariants in the base variables:
    /// e_i ∘ ι expressed in the a-invariants.
    pub restricted_invariants: Vec<MPoly>,
}

/// Restrict a Weyl-group element to the subspace spanned by the columns of
/// `iota`: solve ι·X = g·ι exactly.
pub fn restrict_to_subspace(g: &QMat, iota: &QMat) -> Result<QMat> {
    let n = iota.rows;
    let m = iota.cols;
    let mut x = QMat::zero(m, m);
    for col in 0..m {
        let rows: Vec<Vec<Q>> = (0..n)
            .map(|r| (0..m).map(|c| iota.at(r, c).clone()).collect())
            .collect();
        let rhs: Vec<Q> = (0..n)
            .map(|r| (0..n).map(|c| g.at(r, c) * iota.at(c, col)).sum())
            .collect();
        let sol = solve_affine(rows, rhs).ok_or_else(|| {
            Error::BadAction("group element does not preserve the subspace".into())
        })?;
        for r in 0..m {
            *x.at_mut(r, col) = sol[r].clone();
        }
    }
    Ok(x)
}

/// Build the structure algebra O(B) of the block variety of `b`: the fiber
/// product of a/W' with the ambient Cartan over its Weyl quotient, as a
/// free graded module over the W'-invariants with the ambient coordinate
/// actions. The default W' is W(K⁰); [`block_variety_algebra_over`] accepts
/// any other subgroup (e.g. the full W(K) in the connected case).
pub fn block_variety_algebra(b: &Block) -> Result<VarietyPresentation> {
    block_variety_algebra_over(b, &b.w_k0)
}

/// As [`block_variety_algebra`], with an explicit subgroup acting on the
/// (−θ)-eigenspace (element indices into the Weyl group of `b`).
pub fn block_variety_algebra_over(b: &Block, subgroup: &[usize]) -> Result<VarietyPresentation> {
    let n = b.rank();
    let iota_cols = b.theta.minus_eigenspace();
    let m = iota_cols.len();
    if m == 0 {
        return Err(Error::BadAction(
            "theta has no −1 eigenspace; the variety model is empty".into(),
        ));
    }
    let mut iota = QMat::zero(n, m);
    for (c, v) in iota_cols.iter().enumerate() {
        for r in 0..n {
            *iota.at_mut(r, c) = v[r].clone();
        }
    }
    // W' on a.
    let mut w_prime = Vec::new();
    for &e in subgroup {
        w_prime.push(restrict_to_subspace(&b.w.elements[e], &iota)?);
    }
    let (aprime_degrees, aprime_gens) = fundamental_invariants(&w_prime)?;
    // Full invariants on the ambient space.
    let (w_degrees, w_invariants) = fundamental_invariants(&b.w.elements)?;
    let staircase = Staircase::new(n, w_degrees.clone(), w_invariants.clone())?;
    // e_i ∘ ι in the base variables. Functions pull back contravariantly:
    // substitute h_r ↦ Σ_c ι[r][c]·a_c, i.e. the matrix handed to
    // subst_linear must have row i = the expansion of variable i.
    let restricted_invariants: Vec<MPoly> = w_invariants
        .iter()
        .map(|e| {
            let pullback = e.subst_linear(&iota);
            express_in_subalgebra(&aprime_gens, &aprime_degrees, &pullback)
        })
        .collect::<Result<_>>()?;
    // Assemble the module: generators are the staircase monomials,
    // Y_j = multiplication by the ambient coordinate h_j.
    let rank = staircase.basis.len();
    let nz = aprime_gens.len();
    let gens: Vec<usize> = (0..rank).map(|k| 2 * staircase.basis_degree(k)).collect();
    let mut y = Vec::new();
    for j in 0..n {
        let mut mat = vec![vec![MPoly::zero(nz); rank]; rank];
        for k in 0..rank {
            let prod = MPoly::var(n, j).mul(&staircase.basis_poly(k));
            let coeffs = staircase.expand(&prod)?;
            for (i, c) in coeffs.into_iter().enumerate() {
                if !c.is_zero() {
                    // c is a polynomial in the e-variables; substitute the
                    // restricted invariants.
                    mat[i][k] = c.subst(&restricted_invariants, nz);
                }
            }
        }
        y.push(mat);
    }
    let module = GModule {
        zweights: aprime_degrees.clone(),
        gens,
        y,
    };
    module.check()?;
    Ok(VarietyPresentation {
        module,
        ambient: n,
        iota,
        w_prime,
        aprime_gens,
        aprime_degrees,
        w_invariants,
        w_degrees,
        staircase,
    restricted_invariants,
    })
}

impl VarietyPresentation {
    /// The line component for a coset representative v (a Weyl element
    /// matrix): C[a] as a module over the W'-invariants, with Y_j given by
    /// multiplication by the pullback of h_j along v∘ι.
    pub fn component_module(&self, v: &QMat) -> Result<GModule> {
        let m = self.iota.cols;
        let viota = v.mul(&self.iota);
        let sc = Staircase::new(
            m,
            self.aprime_degrees.clone(),
            self.aprime_gens.clone(),
        )?;
        let rank = sc.basis.len();
        let nz = self.aprime_gens.len();
        let gens: Vec<usize> = (0..rank).map(|k| 2 * sc.basis_degree(k)).collect();
        let mut y = Vec::new();
        for j in 0..self.ambient {
            // Pullback of h_j: Σ_c (v·ι)[j][c]·a_c.
            let lin =
                MPoly::linear(&(0..m).map(|c| viota.at(j, c).clone()).collect::<Vec<_>>());
            let mut mat = vec![vec![MPoly::zero(nz); rank]; rank];
            for k in 0..rank {
                let prod = lin.mul(&sc.basis_poly(k));
                let coeffs = sc.expand(&prod)?;
                for (i, c) in coeffs.into_iter().enumerate() {
                    if !c.is_zero() {
                        mat[i][k] = c;
                    }
                }
            }
            y.push(mat);
        }
        let module = GModule {
            zweights: self.aprime_degrees.clone(),
            gens,
            y,
        };
        module.check()?;
        Ok(module)
    }

    /// The restriction map O(B) → O(component of v): images of the
    /// staircase generators under pullback along v∘ι, expanded in the
    /// component's basis.
    pub fn restriction_map(&self, v: &QMat) -> Result<PMat> {
        let m = self.iota.cols;
        let viota = v.mul(&self.iota);
        let sc = Staircase::new(
            m,
            self.aprime_degrees.clone(),
            self.aprime_gens.clone(),
        )?;
        let nz = self.aprime_gens.len();
        let mut phi = vec![vec![MPoly::zero(nz); self.staircase.basis.len()]; sc.basis.len()];
        for k in 0..self.staircase.basis.len() {
            let pullback = self.staircase.basis_poly(k).subst_linear(&viota);
            let coeffs = sc.expand(&pullback)?;
            for (i, c) in coeffs.into_iter().enumerate() {
                phi[i][k] = c;
            }
        }
        Ok(phi)
    }
}

/// Report on the restriction maps to the components of the block variety.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentMapsReport {
    /// Irreducible components: cosets of W(K⁰) in W.
    pub num_components: usize,
    /// Distinct maps up to the S-twist: cosets of W(K) in W.
    pub num_maps: usize,
    pub all_surjective: bool,
    /// Degrees up to which joint injectivity was verified.
    pub injectivity_window: usize,
    pub jointly_injective: bool,
}

/// Compute the component restriction maps of the block variety: one
/// irreducible component per coset of W(K⁰) in W, one map per coset of
/// W(K) (maps within a W(K)-coset agree up to the twist). Each map must be
/// surjective, and jointly the maps into all components must be injective
/// up to the window.
pub fn component_maps(b: &Block, window: usize) -> Result<ComponentMapsReport> {
    let pres = block_variety_algebra(b)?;
    let cosets = b.w.left_cosets(&b.w_k0);
    let num_maps = b.w.left_cosets(&b.w_k).len();
    let mut all_surjective = true;
    let mut maps = Vec::new();
    let mut components = Vec::new();
    for coset in &cosets {
        let rep = coset.iter().copied().min().unwrap();
        let v = &b.w.elements[rep];
        let comp = pres.component_module(v)?;
        let phi = pres.restriction_map(v)?;
        // Surjectivity by graded Nakayama: the fiber matrix must have full
        // row rank.
        let fib = fiber_matrix(&comp.gens, &pres.module.gens, &phi);
        if fib.rank() != comp.rank() {
            all_surjective = false;
        }
        maps.push(phi);
        components.push(comp);
    }
    // Joint injectivity degreewise up to the window: expand each map into a
    // linear map between graded components.
    let mut jointly_injective = true;
    for d in 0..=window {
        let src = graded_component_basis(&pres.module, d);
        if src.is_empty() {
            continue;
        }
        let mut rows: Vec<Vec<Q>> = vec![Vec::new(); src.len()];
        for (ci, comp) in components.iter().enumerate() {
            let tgt = graded_component_basis(comp, d);
            for s in 0..src.len() {
                let (gen, ref mono) = src[s];
                // Image of z^mono · gen under map ci, in degree d.
                let mut img = vec![Q::zero(); tgt.len()];
                for (t, &(tg, ref tmono)) in tgt.iter().enumerate() {
                    // coefficient of z^tmono·tg in phi[tg][gen]·z^mono
                    let p = &maps[ci][tg][gen];
                    if tmono.iter().zip(mono).all(|(a, b)| a >= b) {
                        let diff: Expt =
                            tmono.iter().zip(mono).map(|(a, b)| a - b).collect();
                        img[t] = p.coeff(&diff);
                    }
                }
                rows[s].extend(img);
            }
        }
        let mut solver = LinSolver::new(rows[0].len().max(1));
        let mut rank = 0;
        for r in &rows {
            let before = solver.rank();
            solver.add_row(
                r.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| (i, c.clone()))
                    .collect(),
            );
            if solver.rank() > before {
                rank += 1;
            }
        }
        if rank != rows.len() {
            jointly_injective = false;
        }
    }
    Ok(ComponentMapsReport {
        num_components: cosets.len(),
        num_maps,
        all_surjective,
        injectivity_window: window,
        jointly_injective,
    })
}

/// Basis of the degree-d graded component of a module: pairs (generator,
/// base monomial).
pub fn graded_component_basis(m: &GModule, d: usize) -> Vec<(usize, Expt)> {
    let mut out = Vec::new();
    for (g, &gd) in m.gens.iter().enumerate() {
        if gd > d || (d - gd) % 2 != 0 {
            continue;
        }
        for e in weighted_monomials_of_degree(&m.zweights, (d - gd) / 2) {
            out.push((g, e));
        }
    }
    out
}

/// The coordinate-ring Hilbert series of the block variety against its
/// closed form: Hilb(O(B)) must equal
/// Hilb(C[a]^{W'}) · Π_i (1 − t^{2d_i}) / (1 − t²)^rank,
/// with d_i the invariant degrees of the full Weyl group on the ambient
/// space. Returns the computed and the expected series on the window.
pub fn hilbert_identity(pres: &VarietyPresentation, trunc: usize) -> (HilbertSeries, HilbertSeries) {
    let computed = pres.module.hilbert(trunc);
    // Numerator Π_i (1 − t^{2 d_i}).
    let mut num: Vec<BigInt> = vec![BigInt::one()];
    for &d in &pres.w_degrees {
        let mut next = vec![BigInt::zero(); num.len() + 2 * d];
        for (k, c) in num.iter().enumerate() {
            next[k] += c;
            next[k + 2 * d] -= c;
        }
        num = next;
    }
    let mut denom: Vec<usize> = pres.aprime_degrees.iter().map(|&w| 2 * w).collect();
    denom.extend(std::iter::repeat(2).take(pres.ambient));
    let expected = HilbertSeries::from_closed_form(num, denom, trunc);
    (computed, expected)
}
