//! Hecke-module structure on the free Z[u]-module spanned by the parameters
//! of a block: generator action, the Kazhdan–Lusztig–Vogan basis, the
//! duality pairing, and intertwining-operator combinatorics.

use crate::blockdata::{Block, Status};
use crate::qlin::UPoly;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

/// A vector in the Hecke module: coefficient of each parameter, in Z[u].
pub type HVec = Vec<UPoly>;

/// Column-convention matrix: `m[i][j]` is the coefficient of parameter `i`
/// in the image of parameter `j`.
pub type HMat = Vec<Vec<UPoly>>;

fn zero_vec(n: usize) -> HVec {
    vec![UPoly::zero(); n]
}

/// Action of the generator T_s on the basis element of parameter `p`.
///
/// The eight cases (u−1 written out; `×` is cross, `c` ranges over Cayley
/// targets):
///
/// * `C+`:  T_s a = a_{s×γ}
/// * `C-`:  T_s a = (u−1)a_γ + u·a_{s×γ}
/// * `ic`:  T_s a = u·a_γ
/// * `rn`:  T_s a = −a_γ
/// * `i1`, `i2`: T_s a = a_{s×γ} + Σ_c a_c
/// * `r1`, `r2`: T_s a = (u−1)·Σ_c a_c + (u−1)a_γ − a_{s×γ}
///
/// For cross-fixed statuses `s×γ = γ` and the terms combine.
pub fn t_on_basis(b: &Block, s: usize, p: usize) -> HVec {
    let n = b.num_params();
    let mut v = zero_vec(n);
    let cross = b.cross[s][p];
    let u = UPoly::u();
    let um1 = UPoly::u().sub(&UPoly::one());
    match b.status[s][p] {
        Status::ComplexAscent => {
            v[cross] = v[cross].add(&UPoly::one());
        }
        Status::ComplexDescent => {
            v[p] = v[p].add(&um1);
            v[cross] = v[cross].add(&u);
        }
        Status::ImaginaryCompact => {
            v[p] = v[p].add(&u);
        }
        Status::RealNonparity => {
            v[p] = v[p].sub(&UPoly::one());
        }
        Status::ImaginaryNoncompactI | Status::ImaginaryNoncompactII => {
            v[cross] = v[cross].add(&UPoly::one());
            for &c in &b.cayley[s][p] {
                v[c] = v[c].add(&UPoly::one());
            }
        }
        Status::RealI | Status::RealII => {
            for &c in &b.cayley[s][p] {
                v[c] = v[c].add(&um1);
            }
            v[p] = v[p].add(&um1);
            v[cross] = v[cross].sub(&UPoly::one());
        }
    }
    v
}

/// Matrix of T_s in the parameter basis (column convention).
pub fn t_matrix(b: &Block, s: usize) -> HMat {
    let n = b.num_params();
    let mut m = vec![zero_vec(n); n];
    for p in 0..n {
        let col = t_on_basis(b, s, p);
        for (i, c) in col.into_iter().enumerate() {
            m[i][p] = c;
        }
    }
    m
}

pub fn mat_apply(m: &HMat, v: &HVec) -> HVec {
    let n = m.len();
    let mut out = zero_vec(n);
    for j in 0..n {
        if v[j].is_zero() {
            continue;
        }
        for i in 0..n {
            if !m[i][j].is_zero() {
                out[i] = out[i].add(&m[i][j].mul(&v[j]));
            }
        }
    }
    out
}

pub fn mat_mul(a: &HMat, b: &HMat) -> HMat {
    let n = a.len();
    let mut out = vec![zero_vec(n); n];
    for j in 0..n {
        let col: HVec = (0..n).map(|i| b[i][j].clone()).collect();
        let img = mat_apply(a, &col);
        for i in 0..n {
            out[i][j] = img[i].clone();
        }
    }
    out
}

/// Check the quadratic relation T_s² = (u−1)T_s + u on every basis vector.
pub fn check_quadratic(b: &Block) -> Result<()> {
    let n = b.num_params();
    let um1 = UPoly::u().sub(&UPoly::one());
    for s in 0..b.rank() {
        let t = t_matrix(b, s);
        let t2 = mat_mul(&t, &t);
        for j in 0..n {
            for i in 0..n {
                let mut want = t[i][j].mul(&um1);
                if i == j {
                    want = want.add(&UPoly::u());
                }
                if t2[i][j] != want {
                    return Err(Error::BadAction(format!(
                        "quadratic relation fails for T_{s} at ({i},{j}) in {}",
                        b.name
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Check the braid relations between all generator pairs.
pub fn check_braid(b: &Block) -> Result<()> {
    for s in 0..b.rank() {
        for t in (s + 1)..b.rank() {
            let m = crate::blockdata::braid_order(&b.rd.cartan, s, t);
            let ts = t_matrix(b, s);
            let tt = t_matrix(b, t);
            let mut left = identity_mat(b.num_params());
            let mut right = left.clone();
            for k in 0..m {
                left = mat_mul(&left, if k % 2 == 0 { &ts } else { &tt });
                right = mat_mul(&right, if k % 2 == 0 { &tt } else { &ts });
            }
            if left != right {
                return Err(Error::BadAction(format!(
                    "braid relation fails for (T_{s}, T_{t}) in {}",
                    b.name
                )));
            }
        }
    }
    Ok(())
}

fn identity_mat(n: usize) -> HMat {
    let mut m = vec![zero_vec(n); n];
    for i in 0..n {
        m[i][i] = UPoly::one();
    }
    m
}

/// The KLV polynomial table: `p[gamma][xi]` is the coefficient of the
/// standard basis element of `xi` in the distinguished self-dual element
/// C_gamma.
#[derive(Debug, Clone, Serialize)]
pub struct KlvTable {
    pub p: Vec<Vec<UPoly>>,
}

impl KlvTable {
    /// The C-basis element of `gamma` as an H-module vector.
    pub fn c_vec(&self, gamma: usize) -> HVec {
        self.p[gamma].clone()
    }

    /// Expand a module element in the C-basis by unitriangular
    /// back-substitution (parameters visited by decreasing length).
    pub fn expand_in_c_basis(&self, b: &Block, h: &HVec) -> Vec<UPoly> {
        let n = b.num_params();
        let mut rest = h.clone();
        let mut coeffs = vec![UPoly::zero(); n];
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&p| std::cmp::Reverse(b.params[p].length));
        for &gamma in &order {
            let c = rest[gamma].clone();
            if c.is_zero() {
                continue;
            }
            coeffs[gamma] = c.clone();
            for xi in 0..n {
                if !self.p[gamma][xi].is_zero() {
                    rest[xi] = rest[xi].sub(&c.mul(&self.p[gamma][xi]));
                }
            }
        }
        debug_assert!(rest.iter().all(|p| p.is_zero()));
        coeffs
    }
}

/// Descent generators of a parameter, with their status.
pub fn descents(b: &Block, p: usize) -> Vec<(usize, Status)> {
    (0..b.rank())
        .filter_map(|s| {
            let st = b.status[s][p];
            if st.is_descent() {
                Some((s, st))
            } else {
                None
            }
        })
        .collect()
}

/// Compute the KLV basis by the descent recursion.
///
/// Parameters are processed by increasing length. For each parameter γ with
/// a descent s we form the self-dual element X = (T_s + 1)·C applied to the
/// length-(ℓ−1) ancestor (the cross image for a complex descent, a Cayley
/// ancestor for a real one), subtract the self-dual corrections forced by
/// the degree bound deg P ≤ (ℓγ − ℓξ − 1)/2, and, for type-II real descents
/// (where X = C_γ + C_{s×γ}), split the pair using every available descent;
/// if a coefficient cannot be resolved the computation aborts with a typed
/// error rather than guessing.
pub fn klv(b: &Block) -> Result<KlvTable> {
    let n = b.num_params();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&p| b.params[p].length);
    let mut table: Vec<Option<HVec>> = vec![None; n];
    let minlen = b.min_length();
    for &gamma in &order {
        let lg = b.params[gamma].length;
        if lg == minlen {
            let mut v = zero_vec(n);
            v[gamma] = UPoly::one();
            table[gamma] = Some(v);
            continue;
        }
        let ds = descents(b, gamma);
        if ds.is_empty() {
            return Err(Error::UnhandledCell {
                delta: b.params[gamma].id.clone(),
                gamma: b.params[gamma].id.clone(),
                why: "positive-length parameter without descents".into(),
            });
        }
        // Prefer a descent that yields C_γ directly.
        let direct = ds
            .iter()
            .find(|(_, st)| matches!(st, Status::ComplexDescent | Status::RealI));
        if let Some(&(s, st)) = direct {
            let ancestor = match st {
                Status::ComplexDescent => b.cross[s][gamma],
                _ => b.cayley[s][gamma][0],
            };
            let anc = table[ancestor].as_ref().ok_or_else(|| Error::UnhandledCell {
                delta: b.params[ancestor].id.clone(),
                gamma: b.params[gamma].id.clone(),
                why: "ancestor not yet computed".into(),
            })?;
            let mut x = mat_apply(&t_matrix(b, s), anc);
            for (i, c) in anc.iter().enumerate() {
                x[i] = x[i].add(c);
            }
            apply_corrections(b, gamma, &mut x, &table)?;
            if !x[gamma].is_one() {
                return Err(Error::UnhandledCell {
                    delta: b.params[gamma].id.clone(),
                    gamma: b.params[gamma].id.clone(),
                    why: format!("leading coefficient {} ≠ 1", x[gamma]),
                });
            }
            table[gamma] = Some(x);
            continue;
        }
        // Only type-II real descents remain: X_s = C_γ + C_{s×γ}.
        let mut resolved: Vec<Option<UPoly>> = vec![None; n];
        resolved[gamma] = Some(UPoly::one());
        for &other in &order {
            if other != gamma && b.params[other].length >= lg {
                resolved[other] = Some(UPoly::zero());
            }
        }
        for &(s, _) in &ds {
            let ancestor = b.cayley[s][gamma][0];
            let anc = table[ancestor].as_ref().ok_or_else(|| Error::UnhandledCell {
                delta: b.params[ancestor].id.clone(),
                gamma: b.params[gamma].id.clone(),
                why: "Cayley ancestor not yet computed".into(),
            })?;
            let mut x = mat_apply(&t_matrix(b, s), anc);
            for (i, c) in anc.iter().enumerate() {
                x[i] = x[i].add(c);
            }
            apply_corrections(b, gamma, &mut x, &table)?;
            // x = C_γ + C_{s×γ}; the s-cross symmetry of the block gives
            // P_{ξ,s×γ} = P_{s×ξ,γ}, so s-fixed ξ carry twice P_{ξ,γ}.
            for xi in 0..n {
                if resolved[xi].is_some() {
                    continue;
                }
                if x[xi].is_zero() {
                    resolved[xi] = Some(UPoly::zero());
                } else if b.cross[s][xi] == xi {
                    resolved[xi] = Some(halve(&x[xi]).ok_or_else(|| {
                        Error::UnresolvedTypeII(format!(
                            "odd coefficient at {} for {}",
                            b.params[xi].id, b.params[gamma].id
                        ))
                    })?);
                }
            }
        }
        if let Some(xi) = (0..n).find(|&xi| resolved[xi].is_none()) {
            return Err(Error::UnresolvedTypeII(format!(
                "coefficient of {} in C_{} not determined by any descent",
                b.params[xi].id, b.params[gamma].id
            )));
        }
        table[gamma] = Some(resolved.into_iter().map(|o| o.unwrap()).collect());
    }
    let p: Vec<HVec> = table.into_iter().map(|o| o.unwrap()).collect();
    let t = KlvTable { p };
    verify_klv(b, &t)?;
    Ok(t)
}

/// Subtract the self-dual corrections from X so every coefficient satisfies
/// the degree bound; processes candidates by decreasing length.
fn apply_corrections(
    b: &Block,
    gamma: usize,
    x: &mut HVec,
    table: &[Option<HVec>],
) -> Result<()> {
    let n = b.num_params();
    let lg = b.params[gamma].length;
    let mut order: Vec<usize> = (0..n)
        .filter(|&xi| b.params[xi].length < lg)
        .collect();
    order.sort_by_key(|&xi| std::cmp::Reverse(b.params[xi].length));
    for xi in order {
        let diff = lg - b.params[xi].length;
        // Terms of degree > (diff − 1)/2 (i.e. ≥ ceil(diff/2)) must belong
        // to a self-dual correction m·C_ξ with m symmetric about diff/2.
        let mid2 = diff; // 2 * mid
        let mut m = UPoly::zero();
        if let Some(d) = x[xi].degree() {
            for k in (0..=d).rev() {
                if 2 * k < mid2 {
                    break;
                }
                let c = x[xi].coeff(k);
                if c.is_zero() {
                    continue;
                }
                if 2 * k == mid2 {
                    m = m.add(&scaled_monomial(&c, k));
                } else {
                    m = m.add(&scaled_monomial(&c, k));
                    m = m.add(&scaled_monomial(&c, diff - k));
                }
            }
        }
        if m.is_zero() {
            continue;
        }
        let cxi = table[xi].as_ref().ok_or_else(|| Error::UnhandledCell {
            delta: b.params[xi].id.clone(),
            gamma: b.params[gamma].id.clone(),
            why: "correction term not yet computed".into(),
        })?;
        for i in 0..n {
            if !cxi[i].is_zero() {
                x[i] = x[i].sub(&m.mul(&cxi[i]));
            }
        }
    }
    Ok(())
}

fn scaled_monomial(c: &BigInt, k: usize) -> UPoly {
    let mut v = vec![BigInt::zero(); k + 1];
    v[k] = c.clone();
    UPoly(v)
}

fn halve(p: &UPoly) -> Option<UPoly> {
    let two = BigInt::from(2);
    let mut out = Vec::with_capacity(p.0.len());
    for c in &p.0 {
        if (c % &two) != BigInt::zero() {
            return None;
        }
        out.push(c / &two);
    }
    Some(UPoly(out))
}

/// Independent post-checks of a computed KLV table: unitriangularity,
/// degree bounds, and the eigenvector property T_s C_γ = u·C_γ at every
/// descent of γ.
pub fn verify_klv(b: &Block, t: &KlvTable) -> Result<()> {
    let n = b.num_params();
    for gamma in 0..n {
        let lg = b.params[gamma].length;
        for xi in 0..n {
            let p = &t.p[gamma][xi];
            if xi == gamma {
                if !p.is_one() {
                    return Err(Error::UnhandledCell {
                        delta: b.params[xi].id.clone(),
                        gamma: b.params[gamma].id.clone(),
                        why: "diagonal entry not 1".into(),
                    });
                }
                continue;
            }
            let lx = b.params[xi].length;
            if lx >= lg && !p.is_zero() {
                return Err(Error::UnhandledCell {
                    delta: b.params[xi].id.clone(),
                    gamma: b.params[gamma].id.clone(),
                    why: "unitriangularity violated".into(),
                });
            }
            if let Some(d) = p.degree() {
                if 2 * d + 1 > lg - lx {
                    return Err(Error::UnhandledCell {
                        delta: b.params[xi].id.clone(),
                        gamma: b.params[gamma].id.clone(),
                        why: format!("degree {} exceeds bound", d),
                    });
                }
            }
        }
        // Eigenvector property at descents.
        let c = t.c_vec(gamma);
        for (s, _) in descents(b, gamma) {
            let img = mat_apply(&t_matrix(b, s), &c);
            for i in 0..n {
                if img[i] != UPoly::u().mul(&c[i]) {
                    return Err(Error::UnhandledCell {
                        delta: b.params[i].id.clone(),
                        gamma: b.params[gamma].id.clone(),
                        why: format!("T_{s} C ≠ u·C"),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Verify the duality pairing between the KLV tables of a block and its
/// dual under the given parameter bijection:
///
///   Σ_γ (−1)^{ℓ(γ)−ℓ(δ)} P_{δ,γ}(u) · P̌_{bij(ξ),bij(γ)}(u)  =  δ_{δ,ξ}.
pub fn verify_duality(
    b: &Block,
    b_dual: &Block,
    bij: &BTreeMap<String, String>,
) -> Result<()> {
    let n = b.num_params();
    if b_dual.num_params() != n {
        return Err(Error::CountMismatch {
            what: "dual block size".into(),
            left: b_dual.num_params(),
            right: n,
        });
    }
    let t = klv(b)?;
    let td = klv(b_dual)?;
    let map: Vec<usize> = b
        .params
        .iter()
        .map(|p| {
            let target = bij.get(&p.id).ok_or_else(|| {
                Error::BlockFile(format!("bijection missing '{}'", p.id))
            })?;
            b_dual.param_index(target).ok_or_else(|| {
                Error::BlockFile(format!("bijection target '{target}' unknown"))
            })
        })
        .collect::<Result<_>>()?;
    for delta in 0..n {
        for xi in 0..n {
            let mut sum = UPoly::zero();
            for gamma in 0..n {
                let a = &t.p[gamma][delta];
                let bb = &td.p[map[gamma]][map[xi]];
                if a.is_zero() || bb.is_zero() {
                    continue;
                }
                let term = a.mul(bb);
                let sign = (b.params[gamma].length as i64
                    - b.params[delta].length as i64)
                    .rem_euclid(2);
                sum = if sign == 0 {
                    sum.add(&term)
                } else {
                    sum.sub(&term)
                };
            }
            let want = if delta == xi {
                UPoly::one()
            } else {
                UPoly::zero()
            };
            if sum != want {
                return Err(Error::UnhandledCell {
                    delta: b.params[delta].id.clone(),
                    gamma: b.params[xi].id.clone(),
                    why: format!("duality pairing gives {}", sum),
                });
            }
        }
    }
    Ok(())
}

/// Integer matrix: column `j` is the image of parameter `j`.
pub type ZMat = Vec<Vec<BigInt>>;

fn t_matrix_at_one(b: &Block, s: usize) -> ZMat {
    let n = b.num_params();
    let t = t_matrix(b, s);
    (0..n)
        .map(|i| (0..n).map(|j| t[i][j].eval_int(1)).collect())
        .collect()
}

fn zmat_mul(a: &ZMat, b: &ZMat) -> ZMat {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    let add = &a[i][k] * &b[k][j];
                    out[i][j] += add;
                }
            }
        }
    }
    out
}

fn zmat_identity(n: usize) -> ZMat {
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        m[i][i] = BigInt::one();
    }
    m
}

/// The specialized intertwining operator [I_w] for a reduced word: the
/// product of the factors (−T_s) evaluated at u = 1, applied left factor
/// first in composition order (so `word[0]` names the leftmost factor).
pub fn intertwining_operator(b: &Block, word: &[usize]) -> Result<ZMat> {
    if !b.w.is_reduced(word) {
        return Err(Error::NotReduced(word.to_vec()));
    }
    let n = b.num_params();
    let mut m = zmat_identity(n);
    for &s in word {
        if s >= b.rank() {
            return Err(Error::BadDegree(format!("no simple root {s}")));
        }
        let mut f = t_matrix_at_one(b, s);
        for row in f.iter_mut() {
            for e in row.iter_mut() {
                *e = -(e.clone());
            }
        }
        m = zmat_mul(&m, &f);
    }
    Ok(m)
}

/// Report for the translation-to-the-wall identity.
#[derive(Debug, Clone, Serialize)]
pub struct WallIdentityReport {
    /// D = Σ_w (−1)^{ℓ(w)} [I_w] satisfies D² = |W|·D.
    pub projector_identity: bool,
    pub weyl_order: usize,
    /// For each open parameter: the multiplicities |Σ_w [I_w]| produces on
    /// split-attached parameters, and the expected stabilizer order.
    pub multiplicities: Vec<(String, Vec<(String, String)>)>,
    pub stabilizer_order: usize,
    pub multiplicity_ok: bool,
}

/// Check D = Σ_w (−1)^{ℓ(w)}[I_w] squares to |W|·D, and that the unsigned
/// sum Σ_w [I_w] hits each split-attached parameter from an open parameter
/// with multiplicity ± the stabilizer order of the open orbit.
pub fn translation_wall_identity(b: &Block) -> Result<WallIdentityReport> {
    let n = b.num_params();
    let mut d = vec![vec![BigInt::zero(); n]; n];
    let mut u_sum = vec![vec![BigInt::zero(); n]; n];
    for e in 0..b.w.order() {
        let word = b.w.words[e].clone();
        let iw = intertwining_operator(b, &word)?;
        let sign = if word.len() % 2 == 0 { 1 } else { -1 };
        for i in 0..n {
            for j in 0..n {
                if sign > 0 {
                    d[i][j] += &iw[i][j];
                } else {
                    d[i][j] -= &iw[i][j];
                }
                u_sum[i][j] += &iw[i][j];
            }
        }
    }
    let d2 = zmat_mul(&d, &d);
    let order = BigInt::from(b.w.order() as i64);
    let projector_identity =
        (0..n).all(|i| (0..n).all(|j| d2[i][j] == &d[i][j] * &order));
    // Stabilizer of an open parameter in the real Weyl group.
    let open = crate::blockdata::open_orbit_parameters(b)?;
    let stab = b
        .real_weyl
        .iter()
        .filter(|&&e| b.cross_by_element(e, open[0]) == open[0])
        .count();
    let mut multiplicities = Vec::new();
    let mut multiplicity_ok = true;
    for &delta in &open {
        let mut row = Vec::new();
        for p in 0..n {
            if !b.split_attached(p) {
                continue;
            }
            let c = u_sum[p][delta].abs();
            if c != BigInt::from(stab as i64) {
                multiplicity_ok = false;
            }
            row.push((b.params[p].id.clone(), c.to_string()));
        }
        multiplicities.push((b.params[delta].id.clone(), row));
    }
    Ok(WallIdentityReport {
        projector_identity,
        weyl_order: b.w.order(),
        multiplicities,
        stabilizer_order: stab,
        multiplicity_ok,
    })
}

/// Report comparing [I_w] with the cross action on split-attached
/// parameters.
#[derive(Debug, Clone, Serialize)]
pub struct CrossIntertwiningReport {
    pub word: Vec<usize>,
    /// (source id, target id, leading coefficient, ids of extra terms).
    pub rows: Vec<(String, String, String, Vec<String>)>,
    /// True when every extra term lives on a different orbit than the
    /// target.
    pub ok: bool,
}

/// For each split-attached parameter γ, [I_w]·a_γ must equal ±a_{w×γ} plus
/// classes supported on other orbits.
pub fn cross_vs_intertwining(b: &Block, word: &[usize]) -> Result<CrossIntertwiningReport> {
    let iw = intertwining_operator(b, word)?;
    let n = b.num_params();
    let mut rows = Vec::new();
    let mut ok = true;
    for gamma in 0..n {
        if !b.split_attached(gamma) {
            continue;
        }
        let mut target = gamma;
        for &s in word.iter().rev() {
            target = b.cross[s][target];
        }
        let lead = iw[target][gamma].clone();
        if lead.abs() != BigInt::one() {
            ok = false;
        }
        let mut extras = Vec::new();
        for p in 0..n {
            if p != target && !iw[p][gamma].is_zero() {
                if b.params[p].orbit_tag == b.params[target].orbit_tag {
                    ok = false;
                }
                extras.push(b.params[p].id.clone());
            }
        }
        rows.push((
            b.params[gamma].id.clone(),
            b.params[target].id.clone(),
            lead.to_string(),
            extras,
        ));
    }
    Ok(CrossIntertwiningReport {
        word: word.to_vec(),
        rows,
        ok,
    })
}

/// Render a KLV table as CSV (`gamma,xi,polynomial`, zero entries omitted).
pub fn klv_csv(b: &Block, t: &KlvTable) -> String {
    let mut out = String::from("gamma,xi,P\n");
    for gamma in 0..b.num_params() {
        for xi in 0..b.num_params() {
            if !t.p[gamma][xi].is_zero() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    b.params[gamma].id, b.params[xi].id, t.p[gamma][xi]
                ));
            }
        }
    }
    out
}

/// Render a KLV table as an aligned text block.
pub fn klv_pretty(b: &Block, t: &KlvTable) -> String {
    let mut out = String::new();
    for gamma in 0..b.num_params() {
        let terms: Vec<String> = (0..b.num_params())
            .filter(|&xi| !t.p[gamma][xi].is_zero())
            .map(|xi| {
                let p = &t.p[gamma][xi];
                if p.is_one() {
                    b.params[xi].id.clone()
                } else {
                    format!("({})·{}", p, b.params[xi].id)
                }
            })
            .collect();
        out.push_str(&format!("C[{}] = {}\n", b.params[gamma].id, terms.join(" + ")));
    }
    out
}
