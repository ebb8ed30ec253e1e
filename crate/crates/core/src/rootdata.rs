//! Root systems, Weyl groups, involutions, fixed subgroups, and invariant
//! degrees, all over exact rationals.
//!
//! Conventions: the reflection representation acts on the span of the simple
//! roots; roots are stored in simple-root coordinates. With Cartan matrix
//! `A[i][j] = ⟨α_j, α_i^∨⟩`, the simple reflection acts by
//! `s_i(α_j) = α_j − A[i][j]·α_i`.

use crate::mpoly::{monomials_of_degree, MPoly};
use crate::qlin::{qi, LinSolver, QMat, Q};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::HashMap;

/// Cap on Weyl group enumeration; the desk examples are rank ≤ 4.
const WEYL_CAP: usize = 100_000;

/// A finite root system in simple-root coordinates.
#[derive(Debug, Clone)]
pub struct RootDatum {
    pub cartan: Vec<Vec<i64>>,
    pub rank: usize,
    /// All roots, each an integer vector in simple-root coordinates.
    pub roots: Vec<Vec<i64>>,
    /// Indices into `roots` of the simple roots α_1..α_rank.
    pub simple_roots: Vec<usize>,
}

/// Parse the type strings accepted from the CLI and block files:
/// products of "A1", "A2", "B2" joined by 'x' (e.g. "A1xA1").
pub fn cartan_of_type(name: &str) -> Result<Vec<Vec<i64>>> {
    let mut blocks: Vec<Vec<Vec<i64>>> = Vec::new();
    for part in name.split('x') {
        let m = match part {
            "A1" => vec![vec![2]],
            "A2" => vec![vec![2, -1], vec![-1, 2]],
            "B2" => vec![vec![2, -1], vec![-2, 2]],
            "G2" => vec![vec![2, -1], vec![-3, 2]],
            other => {
                return Err(Error::NotCartan(format!(
                    "unknown type component '{other}' in '{name}'"
                )))
            }
        };
        blocks.push(m);
    }
    let rank: usize = blocks.iter().map(|b| b.len()).sum();
    let mut cartan = vec![vec![0i64; rank]; rank];
    let mut off = 0;
    for b in blocks {
        let size = b.len();
        for (i, row) in b.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                cartan[off + i][off + j] = v;
            }
        }
        off += size;
    }
    Ok(cartan)
}

/// Check Cartan axioms and finite type (positive-definite symmetrization).
fn check_cartan(a: &[Vec<i64>]) -> Result<()> {
    let n = a.len();
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(Error::NotCartan("matrix not square".into()));
        }
        if row[i] != 2 {
            return Err(Error::NotCartan(format!("diagonal entry {} ≠ 2", i)));
        }
        for (j, &v) in row.iter().enumerate() {
            if i != j {
                if v > 0 {
                    return Err(Error::NotCartan(format!(
                        "positive off-diagonal entry at ({i},{j})"
                    )));
                }
                if (v == 0) != (a[j][i] == 0) {
                    return Err(Error::NotCartan(format!(
                        "zero pattern not symmetric at ({i},{j})"
                    )));
                }
            }
        }
    }
    // Finite type ⟺ all leading principal minors of the Cartan matrix are
    // positive (the symmetrization has the same sign pattern).
    for k in 1..=n {
        let sub: Vec<Vec<i64>> = a[..k].iter().map(|r| r[..k].to_vec()).collect();
        if det_i64(&sub) <= 0 {
            return Err(Error::NotCartan(format!(
                "leading principal minor of size {k} not positive (not finite type)"
            )));
        }
    }
    Ok(())
}

fn det_i64(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut acc = 0i64;
    let mut sign = 1i64;
    for j in 0..n {
        if m[0][j] != 0 {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &v)| v)
                        .collect()
                })
                .collect();
            acc += sign * m[0][j] * det_i64(&minor);
        }
        sign = -sign;
    }
    acc
}

/// Generate the full root list by closing the simple roots under simple
/// reflections.
pub fn build_root_system(cartan: Vec<Vec<i64>>) -> Result<RootDatum> {
    check_cartan(&cartan)?;
    let rank = cartan.len();
    let mut roots: Vec<Vec<i64>> = Vec::new();
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut queue: Vec<Vec<i64>> = Vec::new();
    for i in 0..rank {
        let mut e = vec![0i64; rank];
        e[i] = 1;
        queue.push(e);
    }
    while let Some(r) = queue.pop() {
        if seen.contains_key(&r) {
            continue;
        }
        seen.insert(r.clone(), roots.len());
        roots.push(r.clone());
        for i in 0..rank {
            // s_i(r) = r − ⟨r, α_i^∨⟩ α_i with ⟨α_j, α_i^∨⟩ = cartan[i][j].
            let pairing: i64 = (0..rank).map(|j| cartan[i][j] * r[j]).sum();
            let mut img = r.clone();
            img[i] -= pairing;
            if !seen.contains_key(&img) {
                queue.push(img);
            }
        }
        if roots.len() > 4 * WEYL_CAP {
            return Err(Error::NotCartan("root closure did not terminate".into()));
        }
    }
    roots.sort();
    let simple_roots = (0..rank)
        .map(|i| {
            let mut e = vec![0i64; rank];
            e[i] = 1;
            roots.iter().position(|r| *r == e).unwrap()
        })
        .collect();
    Ok(RootDatum {
        cartan,
        rank,
        roots,
        simple_roots,
    })
}

impl RootDatum {
    /// Matrix of the simple reflection s_i on simple-root coordinates.
    pub fn simple_reflection(&self, i: usize) -> QMat {
        let mut m = QMat::identity(self.rank);
        for j in 0..self.rank {
            let v = m.at(i, j).clone() - qi(self.cartan[i][j]);
            *m.at_mut(i, j) = v;
        }
        m
    }

    pub fn num_positive_roots(&self) -> usize {
        self.roots.len() / 2
    }
}

/// A finite Weyl group with reflection representation.
///
/// Elements carry a reduced word (found by breadth-first search, hence of
/// minimal length) and the exact matrix of the reflection representation;
/// equality and lookup go through the matrix form.
#[derive(Debug, Clone)]
pub struct WeylGroup {
    pub rank: usize,
    pub gens: Vec<QMat>,
    pub elements: Vec<QMat>,
    pub words: Vec<Vec<usize>>,
    index: HashMap<Vec<Q>, usize>,
    pub longest: usize,
}

impl WeylGroup {
    /// Enumerate the group generated by `gens` (must be finite).
    pub fn generate(rank: usize, gens: Vec<QMat>) -> Result<WeylGroup> {
        let mut elements = vec![QMat::identity(rank)];
        let mut words: Vec<Vec<usize>> = vec![vec![]];
        let mut index = HashMap::new();
        index.insert(elements[0].data.clone(), 0usize);
        let mut frontier = vec![0usize];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &ei in &frontier {
                for (gi, g) in gens.iter().enumerate() {
                    let m = g.mul(&elements[ei]);
                    if !index.contains_key(&m.data) {
                        let mut w = words[ei].clone();
                        w.insert(0, gi);
                        index.insert(m.data.clone(), elements.len());
                        next.push(elements.len());
                        elements.push(m);
                        words.push(w);
                        if elements.len() > WEYL_CAP {
                            return Err(Error::WeylGroupTooLarge(WEYL_CAP));
                        }
                    }
                }
            }
            frontier = next;
        }
        let longest = (0..elements.len())
            .max_by_key(|&i| words[i].len())
            .unwrap_or(0);
        Ok(WeylGroup {
            rank,
            gens,
            elements,
            words,
            index,
            longest,
        })
    }

    pub fn from_root_datum(rd: &RootDatum) -> Result<WeylGroup> {
        let gens = (0..rd.rank).map(|i| rd.simple_reflection(i)).collect();
        WeylGroup::generate(rd.rank, gens)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn length(&self, i: usize) -> usize {
        self.words[i].len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn lookup(&self, m: &QMat) -> Option<usize> {
        self.index.get(&m.data).copied()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        let m = self.elements[a].mul(&self.elements[b]);
        self.lookup(&m).expect("group closed under product")
    }

    pub fn inv(&self, a: usize) -> usize {
        let m = self
            .elements[a]
            .inverse()
            .expect("group element invertible");
        self.lookup(&m).expect("group closed under inverse")
    }

    /// Apply a generator word (applied right-to-left as a product of
    /// generators, i.e. `word_to_element([a,b]) = s_a·s_b`).
    pub fn word_to_element(&self, word: &[usize]) -> usize {
        let mut acc = QMat::identity(self.rank);
        for &s in word {
            acc = acc.mul(&self.gens[s]);
        }
        self.lookup(&acc).expect("word lands in group")
    }

    /// True if `word` is a reduced expression.
    pub fn is_reduced(&self, word: &[usize]) -> bool {
        let e = self.word_to_element(word);
        self.length(e) == word.len()
    }

    /// Subgroup generated by the given element indices; returns element
    /// indices into `self`, sorted.
    pub fn subgroup_generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen: Vec<usize> = vec![self.identity()];
        let mut frontier = vec![self.identity()];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(g, x);
                if !seen.contains(&y) {
                    seen.push(y);
                    frontier.push(y);
                }
            }
        }
        seen.sort_unstable();
        seen
    }

    /// Left cosets of the subgroup (given by sorted element indices).
    /// Each coset is a sorted list; cosets ordered by their minimal element.
    pub fn left_cosets(&self, subgroup: &[usize]) -> Vec<Vec<usize>> {
        let mut assigned = vec![false; self.order()];
        let mut cosets = Vec::new();
        for w in 0..self.order() {
            if assigned[w] {
                continue;
            }
            let mut coset: Vec<usize> = subgroup.iter().map(|&h| self.mul(w, h)).collect();
            coset.sort_unstable();
            coset.dedup();
            for &x in &coset {
                assigned[x] = true;
            }
            cosets.push(coset);
        }
        cosets
    }
}

/// An involution of the reflection representation, as an exact matrix.
#[derive(Debug, Clone)]
pub struct Involution {
    pub matrix: QMat,
}

impl Involution {
    pub fn new(matrix: QMat) -> Result<Involution> {
        if !matrix.mul(&matrix).is_identity() {
            return Err(Error::NotInvolution);
        }
        Ok(Involution { matrix })
    }

    /// The negated involution −θ, realizing the passage to the dual side.
    pub fn negated(&self) -> Involution {
        Involution {
            matrix: self.matrix.scale(&-Q::one()),
        }
    }

    /// Basis of the (−1)-eigenspace (the split part 𝔞 when θ is a Cartan
    /// involution matrix on 𝔥*).
    pub fn minus_eigenspace(&self) -> Vec<Vec<Q>> {
        // Kernel of (θ + I).
        let n = self.matrix.rows;
        let mut m = self.matrix.clone();
        for i in 0..n {
            let v = m.at(i, i).clone() + Q::one();
            *m.at_mut(i, i) = v;
        }
        m.nullspace()
    }

    pub fn plus_eigenspace(&self) -> Vec<Vec<Q>> {
        let n = self.matrix.rows;
        let mut m = self.matrix.clone();
        for i in 0..n {
            let v = m.at(i, i).clone() - Q::one();
            *m.at_mut(i, i) = v;
        }
        m.nullspace()
    }
}

/// The fixed subgroup `{w ∈ W : θ w θ⁻¹ = w}`, as element indices into `w`.
pub fn fixed_subgroup(w: &WeylGroup, theta: &Involution) -> Result<Vec<usize>> {
    if !theta.matrix.mul(&theta.matrix).is_identity() {
        return Err(Error::NotInvolution);
    }
    let t = &theta.matrix;
    let tinv = t.inverse().ok_or(Error::NotInvolution)?;
    Ok((0..w.order())
        .filter(|&i| t.mul(&w.elements[i]).mul(&tinv) == w.elements[i])
        .collect())
}

/// Result of [`invariant_degrees`]: either the degrees of a free generating
/// set (reflection group case) or a truncated Molien series with a non-free
/// flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvariantDegrees {
    /// Degrees d_1 ≤ … ≤ d_r of homogeneous free generators.
    Free(Vec<usize>),
    /// Not certified free: the truncated Molien series coefficients.
    NonFree(Vec<BigInt>),
}

/// Truncated Molien series of the action: coefficient of t^d is the
/// dimension of the degree-d invariants of Sym(V*).
pub fn molien_series(mats: &[QMat], trunc: usize) -> Result<Vec<Q>> {
    check_group_closed(mats)?;
    let n = mats[0].rows;
    let order = qi(mats.len() as i64);
    let mut total = vec![Q::zero(); trunc + 1];
    for m in mats {
        // 1/det(1 - t·M) as a power series: compute det(1 - tM) as a
        // polynomial in t with rational coefficients, then invert the series.
        let p = char_like_poly(m, n);
        let inv = invert_series(&p, trunc);
        for (i, c) in inv.iter().enumerate() {
            total[i] += c;
        }
    }
    for c in total.iter_mut() {
        *c /= &order;
    }
    Ok(total)
}

fn check_group_closed(mats: &[QMat]) -> Result<()> {
    if mats.is_empty() {
        return Err(Error::GroupNotClosed);
    }
    let set: Vec<&Vec<Q>> = mats.iter().map(|m| &m.data).collect();
    for a in mats {
        for b in mats {
            let p = a.mul(b);
            if !set.contains(&&p.data) {
                return Err(Error::GroupNotClosed);
            }
        }
    }
    Ok(())
}

/// det(I − t·M) as a polynomial in t (coefficients low-degree first),
/// computed by exact expansion over subsets is exponential; instead use the
/// characteristic polynomial via Faddeev–LeVerrier.
fn char_like_poly(m: &QMat, n: usize) -> Vec<Q> {
    // Faddeev–LeVerrier for char(λ) = det(λI − M) = λ^n + c_{n-1}λ^{n-1} + …
    // + c_0; then det(I − tM) = 1 + c_{n-1}t + … + c_0·t^n.
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    let mut mat = m.clone();
    for k in 1..=n {
        let t: Q = (0..n).map(|i| mat.at(i, i).clone()).sum();
        let c = -t / qi(k as i64);
        coeffs[n - k] = c.clone();
        if k < n {
            for i in 0..n {
                let v = mat.at(i, i).clone() + &c;
                *mat.at_mut(i, i) = v;
            }
            mat = m.mul(&mat);
        }
    }
    (0..=n).map(|j| coeffs[n - j].clone()).collect()
}

/// Invert a power series with constant term 1, to the given truncation.
fn invert_series(p: &[Q], trunc: usize) -> Vec<Q> {
    assert!(p[0].is_one(), "series must have constant term 1");
    let mut inv = vec![Q::zero(); trunc + 1];
    inv[0] = Q::one();
    for k in 1..=trunc {
        let mut s = Q::zero();
        for j in 1..=k.min(p.len() - 1) {
            if !p[j].is_zero() {
                s += &p[j] * &inv[k - j];
            }
        }
        inv[k] = -s;
    }
    inv
}

/// Invariant degrees of a finite matrix group.
///
/// If the Molien series factors exactly as `Π 1/(1 − t^{d_i})` with
/// `Π d_i = |G|` (the Shephard–Todd/Chevalley situation) the degrees are
/// returned; otherwise the truncated Molien coefficients with a non-free
/// flag.
pub fn invariant_degrees(mats: &[QMat]) -> Result<InvariantDegrees> {
    let n = mats[0].rows;
    let order = mats.len();
    // A reflection group of rank ≤ n on |G| elements has degrees with
    // product |G| and sum n + #reflections; degrees are ≤ |G|. Search
    // multisets of size n with product |G| matching the Molien series.
    let trunc = 2 * order.max(8);
    let molien = molien_series(mats, trunc)?;
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    fn search(
        n: usize,
        rem: usize,
        min: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == n {
            if rem == 1 {
                out.push(cur.clone());
            }
            return;
        }
        for d in min..=rem {
            if rem % d == 0 {
                cur.push(d);
                search(n, rem / d, d, cur, out);
                cur.pop();
            }
        }
    }
    search(n, order, 1, &mut Vec::new(), &mut candidates);
    for degs in candidates {
        let series = expand_degree_series(&degs, trunc);
        if series
            .iter()
            .zip(&molien)
            .all(|(a, b)| Q::from_integer(a.clone()) == *b)
        {
            return Ok(InvariantDegrees::Free(degs));
        }
    }
    // Not free: return integer Molien coefficients (they are integers:
    // dimensions), truncated.
    let coeffs = molien
        .iter()
        .map(|c| {
            debug_assert!(c.is_integer());
            c.to_integer()
        })
        .collect();
    Ok(InvariantDegrees::NonFree(coeffs))
}

fn expand_degree_series(degs: &[usize], trunc: usize) -> Vec<BigInt> {
    let mut coeffs = vec![BigInt::zero(); trunc + 1];
    coeffs[0] = BigInt::one();
    for &d in degs {
        for k in d..=trunc {
            let prev = coeffs[k - d].clone();
            coeffs[k] += prev;
        }
    }
    coeffs
}

/// Degreewise basis of invariant polynomials of the action, via the
/// Reynolds (averaging) projection. Returns, for each degree 0..=N, a list
/// of invariant polynomials (reduced row echelon, deterministic).
pub fn invariant_basis_by_degree(mats: &[QMat], n_deg: usize) -> Result<Vec<Vec<MPoly>>> {
    check_group_closed(mats)?;
    let nv = mats[0].rows;
    let order = qi(mats.len() as i64);
    let mut out = Vec::with_capacity(n_deg + 1);
    for d in 0..=n_deg {
        let monos = monomials_of_degree(nv, d);
        let mono_index: HashMap<Vec<u16>, usize> =
            monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        // Reynolds image of each monomial, as coefficient rows; row reduce.
        let mut solver_rows: Vec<Vec<Q>> = Vec::new();
        for mono in &monos {
            let mut p = MPoly::zero(nv);
            let mut mexp = MPoly::one(nv);
            for (i, &k) in mono.iter().enumerate() {
                if k > 0 {
                    mexp = mexp.mul(&MPoly::var(nv, i).pow(k as usize));
                }
            }
            for g in mats {
                // Precompose with g: substitute x_i ↦ Σ_j g[i][j] x_j, so the
                // result is constant on orbits of the point action x ↦ g·x,
                // matching the pullback convention used everywhere else.
                p = p.add(&mexp.subst_linear(g));
            }
            p = p.scale(&(Q::one() / &order));
            let mut row = vec![Q::zero(); monos.len()];
            for (e, c) in &p.terms {
                row[mono_index[e]] = c.clone();
            }
            solver_rows.push(row);
        }
        // Row reduce to get a deterministic basis of the span.
        let basis_rows = rref_rows(solver_rows);
        let polys = basis_rows
            .into_iter()
            .map(|row| {
                let mut p = MPoly::zero(nv);
                for (j, c) in row.into_iter().enumerate() {
                    if !c.is_zero() {
                        p.insert_term(monos[j].clone(), c);
                    }
                }
                p
            })
            .collect();
        out.push(polys);
    }
    Ok(out)
}

/// Transpose of an exact matrix.
pub fn transpose(m: &QMat) -> QMat {
    let mut t = QMat::zero(m.cols, m.rows);
    for i in 0..m.rows {
        for j in 0..m.cols {
            *t.at_mut(j, i) = m.at(i, j).clone();
        }
    }
    t
}

/// Reduced row echelon form of a set of rows; zero rows dropped.
pub fn rref_rows(rows: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    if rows.is_empty() {
        return rows;
    }
    let n = rows[0].len();
    let mut solver = LinSolver::new(n);
    for r in rows {
        let sparse = r
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        solver.add_row(sparse);
    }
    solver.pivot_rows()
}
