//! Coherent-sheaf calculus on the block variety.
//!
//! Structure sheaves of irreducible components, wall functors, Bott–Samelson
//! objects, the finite-group-equivariant wrapper, the schedule-driven
//! construction of canonical indecomposable objects, characters, and the
//! Ext-algebra assembly.

use crate::blockdata::{Block, ScheduleEntry};
use crate::gradedalg::{
    block_variety_algebra, express_in_subalgebra, fiber_matrix, hom_basis, image_module,
    invert_endo, pmat_identity, pmat_is_zero, pmat_mul, pmat_scale, pmat_sub,
    restrict_to_subspace, GModule, PMat, VarietyPresentation,
};
use crate::hecke::{mat_apply, t_matrix, KlvTable};
use crate::mpoly::{Expt, MPoly};
use crate::qlin::{qi, LinSolver, Q};
use crate::{Error, Result};
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

// ---------------------------------------------------------------------------
// The variety with its component and symmetry bookkeeping
// ---------------------------------------------------------------------------

/// The block variety of a block together with its irreducible-component
/// indexing and the finite symmetry group S = W(K)/W(K⁰).
pub struct BlockVariety {
    pub block: Block,
    pub pres: VarietyPresentation,
    /// Representatives (minimal elements) of the W(K⁰)-cosets indexing the
    /// irreducible components.
    pub components: Vec<usize>,
    /// Representatives of the W(K)-cosets indexing component maps up to
    /// twist.
    pub map_reps: Vec<usize>,
    /// All elements of S as coset representatives (identity first).
    pub selems: Vec<usize>,
    /// A generating subset of `selems` (excluding the identity).
    pub sgens: Vec<usize>,
    /// Base-variable substitution realizing the pullback along each element
    /// of S (keyed by Weyl element index).
    zsubs: HashMap<usize, Vec<MPoly>>,
}

impl BlockVariety {
    pub fn new(block: &Block) -> Result<BlockVariety> {
        let pres = block_variety_algebra(block)?;
        let components: Vec<usize> = block
            .w
            .left_cosets(&block.w_k0)
            .iter()
            .map(|c| *c.iter().min().unwrap())
            .collect();
        let map_reps: Vec<usize> = block
            .w
            .left_cosets(&block.w_k)
            .iter()
            .map(|c| *c.iter().min().unwrap())
            .collect();
        // S = W(K)/W(K⁰): group the elements of W(K) into W(K⁰)-cosets.
        let mut selems: Vec<usize> = Vec::new();
        let mut assigned: Vec<usize> = Vec::new();
        for &x in &block.w_k {
            if assigned.contains(&x) {
                continue;
            }
            let coset: Vec<usize> = block
                .w_k0
                .iter()
                .map(|&h| block.w.mul(x, h))
                .collect();
            let rep = *coset.iter().min().unwrap();
            assigned.extend(coset);
            selems.push(rep);
        }
        selems.sort_unstable();
        // Greedy generating set of the elementary abelian 2-group.
        let coset_rep = |w: &Block, x: usize| -> usize {
            w.w_k0
                .iter()
                .map(|&h| w.w.mul(x, h))
                .min()
                .unwrap()
        };
        let mut generated = vec![selems[0]];
        let mut sgens = Vec::new();
        for &g in &selems[1..] {
            if generated.contains(&g) {
                continue;
            }
            sgens.push(g);
            let mut next = generated.clone();
            for &x in &generated {
                next.push(coset_rep(block, block.w.mul(g, x)));
            }
            next.sort_unstable();
            next.dedup();
            generated = next;
        }
        if generated.len() != selems.len() {
            return Err(Error::GroupNotClosed);
        }
        // Pullback substitutions on the base variables for each S element.
        let mut zsubs = HashMap::new();
        for &g in &selems {
            if g == selems[0] {
                continue;
            }
            let ga = restrict_to_subspace(&block.w.elements[g], &pres.iota)?;
            let sub: Vec<MPoly> = pres
                .aprime_gens
                .iter()
                .map(|e| {
                    express_in_subalgebra(
                        &pres.aprime_gens,
                        &pres.aprime_degrees,
                        &e.subst_linear(&ga),
                    )
                })
                .collect::<Result<_>>()?;
            zsubs.insert(g, sub);
        }
        Ok(BlockVariety {
            block: block.clone(),
            pres,
            components,
            map_reps,
            selems,
            sgens,
            zsubs,
        })
    }

    pub fn s_order(&self) -> usize {
        self.selems.len()
    }

    fn nz(&self) -> usize {
        self.pres.aprime_gens.len()
    }

    /// Apply the pullback along an S element to a polynomial in the base
    /// variables.
    fn ztwist(&self, g: usize, p: &MPoly) -> MPoly {
        match self.zsubs.get(&g) {
            Some(sub) => p.subst(sub, self.nz()),
            None => p.clone(),
        }
    }

    fn ptwist(&self, g: usize, m: &PMat) -> PMat {
        m.iter()
            .map(|row| row.iter().map(|p| self.ztwist(g, p)).collect())
            .collect()
    }

    /// The g-twist of a module: same generators, action entries pulled back
    /// along g.
    pub fn twist_module(&self, g: usize, m: &GModule) -> GModule {
        GModule {
            zweights: m.zweights.clone(),
            gens: m.gens.clone(),
            y: m.y.iter().map(|y| self.ptwist(g, y)).collect(),
        }
    }

    /// Structure sheaf of the component of the coset of Weyl element `v`.
    pub fn component_sheaf(&self, v: usize) -> Result<GModule> {
        self.pres.component_module(&self.block.w.elements[v])
    }

    /// Multiplication by one wall functor: the base change along the
    /// α-partial quotient. The result has generators (1⊗m_i, f⊗m_i) with f
    /// the degree-2 anti-invariant of s_α.
    pub fn wall_apply(&self, alpha: usize, m: &GModule) -> Result<GModule> {
        let n = self.pres.ambient;
        if alpha >= n {
            return Err(Error::DimensionMismatch(format!(
                "no simple root {alpha} in rank {n}"
            )));
        }
        let nz = self.nz();
        let smat = &self.block.w.elements[self.block.w.word_to_element(&[alpha])];
        // Anti-invariant linear form: s^T v = −v.
        let v = anti_invariant_form(smat)?;
        let piv = v.iter().position(|c| !c.is_zero()).unwrap();
        // Decompose each coordinate: h_j = p_j + q_j·f with q_j·f given by
        // (h_j − s*(h_j))/2; the pullback acts on coordinates by s^T.
        let mut q = vec![Q::zero(); n];
        for j in 0..n {
            let mut d = vec![Q::zero(); n];
            for (r, dr) in d.iter_mut().enumerate() {
                let delta = if r == j { qi(1) } else { Q::zero() };
                *dr = (delta - smat.at(j, r).clone()) / qi(2);
            }
            // d = q_j·v; read q_j off the pivot coordinate of v.
            q[j] = d[piv].clone() / v[piv].clone();
            for r in 0..n {
                if d[r] != q[j].clone() * v[r].clone() {
                    return Err(Error::BadAction(
                        "coordinate does not split along the wall".into(),
                    ));
                }
            }
        }
        // F = Σ v_r Y_r, the action of f; P_j = Y_j − q_j F.
        let g = m.rank();
        let mut f = vec![vec![MPoly::zero(nz); g]; g];
        for r in 0..n {
            if !v[r].is_zero() {
                f = crate::gradedalg::pmat_add(&f, &pmat_scale(&m.y[r], &v[r]));
            }
        }
        let f2 = pmat_mul(&f, &f);
        let mut gens = m.gens.clone();
        gens.extend(m.gens.iter().map(|&d| d + 2));
        let mut y = Vec::new();
        for j in 0..n {
            let pj = pmat_sub(&m.y[j], &pmat_scale(&f, &q[j]));
            let mut mat = vec![vec![MPoly::zero(nz); 2 * g]; 2 * g];
            for i in 0..g {
                for k in 0..g {
                    mat[i][k] = pj[i][k].clone();
                    mat[g + i][g + k] = pj[i][k].clone();
                    mat[i][g + k] = f2[i][k].scale(&q[j]);
                }
                mat[g + i][i] = MPoly::constant(nz, q[j].clone());
            }
            y.push(mat);
        }
        let out = GModule {
            zweights: m.zweights.clone(),
            gens,
            y,
        };
        out.check()?;
        Ok(out)
    }

    /// Iterated wall functors applied to a component sheaf; the first letter
    /// of the word is applied first.
    pub fn bott_samelson(&self, start: usize, word: &[usize]) -> Result<GModule> {
        let mut m = self.component_sheaf(start)?;
        for &alpha in word {
            m = self.wall_apply(alpha, &m)?;
        }
        Ok(m)
    }

    /// Character: graded dimensions of Hom(M, O_w) for each component w, in
    /// cohomological degrees 0..=window.
    pub fn character(&self, m: &GModule, window: usize) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        for &v in &self.components {
            let ow = self.component_sheaf(v)?;
            let mut dims = Vec::new();
            for k in 0..=window {
                dims.push(hom_basis(m, &ow, k as i64)?.len());
            }
            out.push(dims);
        }
        Ok(out)
    }
}

/// Coefficient vector of the linear form spanning the −1 eigenspace of a
/// reflection acting on linear forms (transpose action), normalized so the
/// first nonzero entry is 1.
fn anti_invariant_form(smat: &crate::qlin::QMat) -> Result<Vec<Q>> {
    let n = smat.rows;
    // Solve (s^T + 1) v = 0.
    let mut solver = LinSolver::new(n);
    for r in 0..n {
        let mut row: Vec<(usize, Q)> = Vec::new();
        for c in 0..n {
            let mut val = smat.at(c, r).clone();
            if r == c {
                val += qi(1);
            }
            if !val.is_zero() {
                row.push((c, val));
            }
        }
        if !row.is_empty() {
            solver.add_row(row);
        }
    }
    let null = solver.nullspace_basis();
    if null.len() != 1 {
        return Err(Error::BadAction(
            "wall reflection does not have a one-dimensional anti-invariant line".into(),
        ));
    }
    let mut v = null.into_iter().next().unwrap();
    let piv = v.iter().position(|c| !c.is_zero()).unwrap();
    let inv = Q::one() / v[piv].clone();
    for c in v.iter_mut() {
        *c = c.clone() * &inv;
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Equivariant modules
// ---------------------------------------------------------------------------

/// A module with a compatible action of the symmetry group S: one structure
/// map per generator in `BlockVariety::sgens`, satisfying S·g*(Y) = Y·S and
/// S·g*(S) = 1.
#[derive(Clone)]
pub struct EqModule {
    pub m: GModule,
    pub s: Vec<PMat>,
}

impl EqModule {
    pub fn plain(m: GModule, num_gens: usize) -> EqModule {
        assert_eq!(num_gens, 0);
        EqModule { m, s: vec![] }
    }

    pub fn shifted(&self, k: i64) -> EqModule {
        EqModule {
            m: self.m.shifted(k),
            s: self.s.clone(),
        }
    }
}

impl BlockVariety {
    /// Validate the group-action axioms of an equivariant module.
    pub fn check_equivariant(&self, eq: &EqModule) -> Result<()> {
        eq.m.check()?;
        if eq.s.len() != self.sgens.len() {
            return Err(Error::BadAction(
                "wrong number of symmetry structure maps".into(),
            ));
        }
        let id = pmat_identity(eq.m.rank(), self.nz());
        for (i, &g) in self.sgens.iter().enumerate() {
            let s = &eq.s[i];
            for (j, y) in eq.m.y.iter().enumerate() {
                let lhs = pmat_mul(s, &self.ptwist(g, y));
                let rhs = pmat_mul(y, s);
                if lhs != rhs {
                    return Err(Error::BadAction(format!(
                        "structure map {i} does not intertwine action {j}"
                    )));
                }
            }
            if pmat_mul(s, &self.ptwist(g, s)) != id {
                return Err(Error::BadAction(format!(
                    "structure map {i} is not involutive"
                )));
            }
        }
        // Distinct structure maps must assemble into a group action:
        // S_i·gᵢ*(S_j) = S_j·gⱼ*(S_i).
        for i in 0..self.sgens.len() {
            for j in (i + 1)..self.sgens.len() {
                let lhs = pmat_mul(&eq.s[i], &self.ptwist(self.sgens[i], &eq.s[j]));
                let rhs = pmat_mul(&eq.s[j], &self.ptwist(self.sgens[j], &eq.s[i]));
                if lhs != rhs {
                    return Err(Error::BadAction(format!(
                        "structure maps {i} and {j} do not commute as an action"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Average of a plain module over S: one twisted copy per group
    /// element, with the permutation structure maps.
    pub fn average(&self, m: &GModule) -> Result<EqModule> {
        let slots = &self.selems;
        let k = slots.len();
        let g = m.rank();
        let nz = self.nz();
        let twisted: Vec<GModule> = slots.iter().map(|&h| self.twist_module(h, m)).collect();
        let mut gens = Vec::new();
        for t in &twisted {
            gens.extend(t.gens.iter().copied());
        }
        let mut y = Vec::new();
        for j in 0..self.pres.ambient {
            let mut mat = vec![vec![MPoly::zero(nz); k * g]; k * g];
            for (slot, t) in twisted.iter().enumerate() {
                for i in 0..g {
                    for c in 0..g {
                        mat[slot * g + i][slot * g + c] = t.y[j][i][c].clone();
                    }
                }
            }
            y.push(mat);
        }
        let underlying = GModule {
            zweights: m.zweights.clone(),
            gens,
            y,
        };
        // Coset representative of a product within S.
        let rep = |x: usize| -> usize {
            self.block
                .w_k0
                .iter()
                .map(|&h| self.block.w.mul(x, h))
                .min()
                .unwrap()
        };
        let mut s = Vec::new();
        for &gen in &self.sgens {
            let mut mat = vec![vec![MPoly::zero(nz); k * g]; k * g];
            for (slot, &h) in slots.iter().enumerate() {
                let target = rep(self.block.w.mul(gen, h));
                let tslot = slots.iter().position(|&x| x == target).unwrap();
                for i in 0..g {
                    mat[tslot * g + i][slot * g + i] = MPoly::one(nz);
                }
            }
            s.push(mat);
        }
        let eq = EqModule { m: underlying, s };
        self.check_equivariant(&eq)?;
        Ok(eq)
    }

    /// Wrap a plain module as equivariant when S is trivial.
    pub fn trivially_equivariant(&self, m: GModule) -> Result<EqModule> {
        if !self.sgens.is_empty() {
            return Err(Error::BadAction(
                "symmetry group is nontrivial; use average or explicit structure maps".into(),
            ));
        }
        Ok(EqModule { m, s: vec![] })
    }

    /// Basis of the space of degree-k equivariant homomorphisms: plain
    /// module homs projected onto the fixed space of the S-conjugation
    /// operators.
    pub fn eq_hom_basis(&self, a: &EqModule, b: &EqModule, k: i64) -> Result<Vec<PMat>> {
        let mut basis = hom_basis(&a.m, &b.m, k)?;
        for (i, &g) in self.sgens.iter().enumerate() {
            // R(φ) = T · g*(φ) · g*(S); project onto its +1 eigenspace.
            let mut projected: Vec<PMat> = Vec::new();
            for phi in &basis {
                let r = pmat_mul(
                    &pmat_mul(&b.s[i], &self.ptwist(g, phi)),
                    &self.ptwist(g, &a.s[i]),
                );
                let p = pmat_scale(&crate::gradedalg::pmat_add(phi, &r), &(qi(1) / qi(2)));
                projected.push(p);
            }
            basis = independent_pmats(projected);
        }
        Ok(basis)
    }

    /// Graded equivariant Hom dimensions over 0..=window.
    pub fn eq_hom_dims(&self, a: &EqModule, b: &EqModule, window: usize) -> Result<Vec<usize>> {
        (0..=window)
            .map(|k| Ok(self.eq_hom_basis(a, b, k as i64)?.len()))
            .collect()
    }

    /// Extract the image of an equivariant idempotent, carrying the
    /// structure maps along.
    fn eq_image(&self, eq: &EqModule, phi: &PMat) -> Result<EqModule> {
        let (part, gmat) = image_module(&eq.m, phi)?;
        if part.rank() == 0 {
            return Ok(EqModule {
                m: part,
                s: vec![vec![]; self.sgens.len()],
            });
        }
        let mut s = Vec::new();
        for (i, &g) in self.sgens.iter().enumerate() {
            // New structure map X: G·X = S·g*(G).
            let target = pmat_mul(&eq.s[i], &self.ptwist(g, &gmat));
            let x = crate::gradedalg::solve_pmat_equation(&eq.m, &gmat, &part.gens, &target, 0)?;
            s.push(x);
        }
        let out = EqModule { m: part, s };
        self.check_equivariant(&out)?;
        Ok(out)
    }

    /// Split an equivariant module into indecomposable equivariant
    /// summands.
    pub fn eq_decompose(&self, eq: &EqModule) -> Result<Vec<EqModule>> {
        if eq.m.rank() == 0 {
            return Ok(vec![]);
        }
        let homs = self.eq_hom_basis(eq, eq, 0)?;
        let fibers: Vec<crate::qlin::QMat> = homs
            .iter()
            .map(|h| fiber_matrix(&eq.m.gens, &eq.m.gens, h))
            .collect();
        let id = crate::qlin::QMat::identity(eq.m.rank());
        match crate::gradedalg::find_fiber_idempotent(&fibers, &id)? {
            None => Ok(vec![eq.clone()]),
            Some(e) => {
                let phi = crate::gradedalg::lift_idempotent(&eq.m, &homs, &e)?;
                let part1 = self.eq_image(eq, &phi)?;
                let comp = pmat_sub(&pmat_identity(eq.m.rank(), self.nz()), &phi);
                let part2 = self.eq_image(eq, &comp)?;
                if part1.m.rank() == 0 || part2.m.rank() == 0 {
                    return Err(Error::UnstableIdempotent(
                        "equivariant idempotent produced a trivial splitting".into(),
                    ));
                }
                let mut out = self.eq_decompose(&part1)?;
                out.extend(self.eq_decompose(&part2)?);
                Ok(out)
            }
        }
    }

    /// Split off one equivariant copy of `k` from `m`, returning the
    /// complement, or None when no split copy exists.
    pub fn eq_peel(&self, m: &EqModule, k: &EqModule) -> Result<Option<EqModule>> {
        if k.m.rank() == 0 || m.m.rank() < k.m.rank() {
            return Ok(None);
        }
        let fs = self.eq_hom_basis(k, m, 0)?;
        let gs = self.eq_hom_basis(m, k, 0)?;
        for f in pair_candidates(&fs) {
            for g in pair_candidates(&gs) {
                let a = pmat_mul(&g, &f);
                if fiber_matrix(&k.m.gens, &k.m.gens, &a).inverse().is_none() {
                    continue;
                }
                let a_inv = invert_endo(&k.m.gens, &a)?;
                let h = pmat_mul(&pmat_mul(&f, &a_inv), &g);
                let comp = pmat_sub(&pmat_identity(m.m.rank(), self.nz()), &h);
                let rest = self.eq_image(m, &comp)?;
                if rest.m.rank() + k.m.rank() != m.m.rank() {
                    return Err(Error::BasisExtraction(
                        "peeled equivariant complement has wrong rank".into(),
                    ));
                }
                return Ok(Some(rest));
            }
        }
        Ok(None)
    }

    /// Test equivariant isomorphism: a degree-0 equivariant map with
    /// invertible fiber in either combination of the hom basis.
    pub fn eq_iso(&self, a: &EqModule, b: &EqModule) -> Result<bool> {
        if a.m.rank() != b.m.rank() {
            return Ok(false);
        }
        let mut ga = a.m.gens.clone();
        let mut gb = b.m.gens.clone();
        ga.sort_unstable();
        gb.sort_unstable();
        if ga != gb {
            return Ok(false);
        }
        let homs = self.eq_hom_basis(a, b, 0)?;
        for phi in pair_candidates(&homs) {
            if fiber_matrix(&b.m.gens, &a.m.gens, &phi).inverse().is_some() {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Candidate invertible combinations from a hom basis: the basis elements,
/// pairwise sums and differences, and one generic weighted combination.
fn pair_candidates(basis: &[PMat]) -> Vec<PMat> {
    let mut out: Vec<PMat> = basis.to_vec();
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            out.push(crate::gradedalg::pmat_add(&basis[i], &basis[j]));
            out.push(pmat_sub(&basis[i], &basis[j]));
        }
    }
    if basis.len() > 2 {
        let mut acc = basis[0].clone();
        for (i, b) in basis.iter().enumerate().skip(1) {
            acc = crate::gradedalg::pmat_add(&acc, &pmat_scale(b, &qi(i as i64 + 1)));
        }
        out.push(acc);
    }
    out
}

/// Reduce a list of polynomial matrices to a linearly independent subset
/// (deterministic order).
fn independent_pmats(mats: Vec<PMat>) -> Vec<PMat> {
    let mut index: HashMap<(usize, usize, Expt), usize> = HashMap::new();
    let mut rows: Vec<Vec<(usize, Q)>> = Vec::new();
    for m in &mats {
        let mut row = Vec::new();
        for (i, r) in m.iter().enumerate() {
            for (j, p) in r.iter().enumerate() {
                for (e, c) in &p.terms {
                    let next = index.len();
                    let k = *index.entry((i, j, e.clone())).or_insert(next);
                    row.push((k, c.clone()));
                }
            }
        }
        rows.push(row);
    }
    let mut solver = LinSolver::new(index.len().max(1));
    let mut out = Vec::new();
    for (m, row) in mats.into_iter().zip(rows) {
        if row.is_empty() {
            continue;
        }
        let before = solver.rank();
        solver.add_row(row);
        if solver.rank() > before {
            out.push(m);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Canonical objects
// ---------------------------------------------------------------------------

/// One canonical indecomposable equivariant object, labeled by a block
/// parameter.
pub struct CanonicalObject {
    pub param: usize,
    pub id: String,
    pub dual_length: usize,
    pub module: EqModule,
    pub schedule: ScheduleEntry,
}

/// Decomposition record of one scheduled Bott–Samelson object: for each
/// parameter, the multiplicity polynomial coefficients (index k =
/// coefficient of the 2k-degree shift).
#[derive(Debug, Clone, Serialize)]
pub struct BsRecord {
    pub start: Vec<usize>,
    pub word: Vec<usize>,
    pub params: Vec<String>,
    pub mults: BTreeMap<String, Vec<usize>>,
}

pub struct CanonicalSet {
    pub objects: Vec<CanonicalObject>,
    pub records: Vec<BsRecord>,
}

impl CanonicalSet {
    pub fn by_id(&self, id: &str) -> Option<&CanonicalObject> {
        self.objects.iter().find(|o| o.id == id)
    }
}

impl BlockVariety {
    /// Build the canonical objects from the bundled schedule: for each
    /// parameter, the indecomposable equivariant summand of the scheduled
    /// Bott–Samelson average, extracted by peeling previously built objects
    /// and splitting the remainder. Twist labels resolve parameters sharing
    /// one underlying module.
    pub fn canonical_objects(&self) -> Result<CanonicalSet> {
        let schedule = self.block.dual_schedule.clone().ok_or_else(|| {
            Error::MissingFlag {
                block: self.block.name.clone(),
                what: "dual_schedule".into(),
            }
        })?;
        let maxlen = self.block.max_length();
        let window = 2 * maxlen + 4;
        // Group parameters by (start, word).
        let mut groups: BTreeMap<(Vec<usize>, Vec<usize>), Vec<usize>> = BTreeMap::new();
        for (pi, p) in self.block.params.iter().enumerate() {
            let entry = schedule.get(&p.id).ok_or_else(|| Error::MissingFlag {
                block: self.block.name.clone(),
                what: format!("schedule entry for {}", p.id),
            })?;
            groups
                .entry((entry.start.clone(), entry.word.clone()))
                .or_default()
                .push(pi);
        }
        let mut ordered: Vec<(&(Vec<usize>, Vec<usize>), &Vec<usize>)> =
            groups.iter().collect();
        ordered.sort_by_key(|(key, ps)| {
            (maxlen - self.block.params[ps[0]].length, (*key).clone())
        });
        let mut objects: Vec<CanonicalObject> = Vec::new();
        let mut records: Vec<BsRecord> = Vec::new();
        for ((start, word), ps) in ordered {
            // All parameters in a group must share the dual length.
            let dl = maxlen - self.block.params[ps[0]].length;
            if ps
                .iter()
                .any(|&p| maxlen - self.block.params[p].length != dl)
            {
                return Err(Error::BlockFile(
                    "schedule groups parameters of different dual lengths".into(),
                ));
            }
            let start_elem = self.block.w.word_to_element(start);
            let bs = self.bott_samelson(start_elem, word)?;
            let mut cur = self.average(&bs)?;
            let mut mults: BTreeMap<String, Vec<usize>> = BTreeMap::new();
            let bump = |mults: &mut BTreeMap<String, Vec<usize>>, id: &str, k: usize| {
                let v = mults.entry(id.to_string()).or_default();
                if v.len() <= k {
                    v.resize(k + 1, 0);
                }
                v[k] += 1;
            };
            // Peel previously built objects, smallest dual length first,
            // over all shifts in the window.
            for obj in &objects {
                for k in 0..=(window / 2) {
                    loop {
                        match self.eq_peel(&cur, &obj.module.shifted(2 * k as i64))? {
                            Some(rest) => {
                                cur = rest;
                                bump(&mut mults, &obj.id, k);
                            }
                            None => break,
                        }
                    }
                }
            }
            // The remainder splits into the new objects (plus any copies the
            // pairwise peel search missed).
            let mut fresh: Vec<EqModule> = Vec::new();
            for part in self.eq_decompose(&cur)? {
                let mut matched = false;
                for obj in &objects {
                    for k in 0..=(window / 2) {
                        if self.eq_iso(&part, &obj.module.shifted(2 * k as i64))? {
                            bump(&mut mults, &obj.id, k);
                            matched = true;
                            break;
                        }
                    }
                    if matched {
                        break;
                    }
                }
                if !matched {
                    fresh.push(part);
                }
            }
            // Merge fresh summands into iso classes.
            let mut classes: Vec<(EqModule, usize)> = Vec::new();
            'parts: for part in fresh {
                for (rep, count) in classes.iter_mut() {
                    if self.eq_iso(&part, rep)? {
                        *count += 1;
                        continue 'parts;
                    }
                }
                classes.push((part, 1));
            }
            if classes.iter().map(|(_, c)| c).sum::<usize>() != ps.len()
                || classes.len() > ps.len()
            {
                return Err(Error::NoMatchingSummand {
                    param: self.block.params[ps[0]].id.clone(),
                    why: format!(
                        "schedule ({start:?}, {word:?}) produced {} new summands for {} parameters",
                        classes.iter().map(|(_, c)| c).sum::<usize>(),
                        ps.len()
                    ),
                });
            }
            // Assign summands to parameters.
            let assigned: Vec<(usize, EqModule)> = if ps.len() == 1 {
                let (m, _) = classes.into_iter().next().unwrap();
                vec![(ps[0], m)]
            } else {
                self.assign_by_twist(ps, classes, &schedule)?
            };
            for (p, module) in assigned {
                let id = self.block.params[p].id.clone();
                bump(&mut mults, &id, 0);
                objects.push(CanonicalObject {
                    param: p,
                    id,
                    dual_length: dl,
                    module,
                    schedule: schedule[&self.block.params[p].id].clone(),
                });
            }
            records.push(BsRecord {
                start: start.clone(),
                word: word.clone(),
                params: ps
                    .iter()
                    .map(|&p| self.block.params[p].id.clone())
                    .collect(),
                mults,
            });
        }
        // Certificate: full coverage and pairwise non-isomorphic objects.
        if objects.len() != self.block.num_params() {
            return Err(Error::CountMismatch {
                what: "canonical objects".into(),
                left: objects.len(),
                right: self.block.num_params(),
            });
        }
        for i in 0..objects.len() {
            for j in (i + 1)..objects.len() {
                if self.eq_iso(&objects[i].module, &objects[j].module)? {
                    return Err(Error::NoMatchingSummand {
                        param: objects[j].id.clone(),
                        why: format!("isomorphic to the object of {}", objects[i].id),
                    });
                }
            }
        }
        Ok(CanonicalSet { objects, records })
    }

    /// Resolve a group of parameters sharing one underlying module by the
    /// eigenvalue of each structure map on the lowest-degree generator line.
    fn assign_by_twist(
        &self,
        ps: &[usize],
        classes: Vec<(EqModule, usize)>,
        schedule: &BTreeMap<String, ScheduleEntry>,
    ) -> Result<Vec<(usize, EqModule)>> {
        let mut out = Vec::new();
        let mut sigs: Vec<(Vec<Option<i8>>, EqModule)> = Vec::new();
        for (m, count) in classes {
            if count != 1 {
                return Err(Error::NoMatchingSummand {
                    param: self.block.params[ps[0]].id.clone(),
                    why: "twist-labeled summand appears with multiplicity".into(),
                });
            }
            let sig = self.twist_signature(&m)?;
            sigs.push((sig, m));
        }
        // A summand matches a parameter when every determinate signature
        // coordinate agrees with the scheduled twist; the assignment must be
        // unambiguous.
        for &p in ps {
            let want = &schedule[&self.block.params[p].id].twist;
            let matching: Vec<usize> = sigs
                .iter()
                .enumerate()
                .filter(|(_, (sig, _))| {
                    sig.iter()
                        .zip(want)
                        .all(|(s, w)| s.map_or(true, |v| v == *w))
                })
                .map(|(i, _)| i)
                .collect();
            if matching.len() != 1 {
                return Err(Error::NoMatchingSummand {
                    param: self.block.params[p].id.clone(),
                    why: format!(
                        "{} summands match twist {want:?}",
                        matching.len()
                    ),
                });
            }
            let (_, m) = sigs.remove(matching[0]);
            out.push((p, m));
        }
        Ok(out)
    }

    /// Eigenvalue of each structure map on the lowest-degree generator
    /// block: ±1 when the block is a scalar, None when the map mixes the
    /// lowest generators (an induced, slot-permuting action).
    fn twist_signature(&self, m: &EqModule) -> Result<Vec<Option<i8>>> {
        let min = *m.m.gens.iter().min().unwrap();
        let idx: Vec<usize> = (0..m.m.rank()).filter(|&i| m.m.gens[i] == min).collect();
        let mut sig = Vec::new();
        for s in &m.s {
            let f = fiber_matrix(&m.m.gens, &m.m.gens, s);
            let mut val: Option<i8> = None;
            let mut scalar = true;
            'scan: for &i in &idx {
                for &j in &idx {
                    let c = f.at(i, j);
                    if i == j {
                        let v = if *c == qi(1) {
                            1i8
                        } else if *c == qi(-1) {
                            -1
                        } else {
                            scalar = false;
                            break 'scan;
                        };
                        if *val.get_or_insert(v) != v {
                            scalar = false;
                            break 'scan;
                        }
                    } else if !c.is_zero() {
                        scalar = false;
                        break 'scan;
                    }
                }
            }
            sig.push(if scalar { val } else { None });
        }
        Ok(sig)
    }
}

// ---------------------------------------------------------------------------
// Hecke-side multiplicities for the cross-oracle
// ---------------------------------------------------------------------------

/// Expand the Hecke counterpart of a scheduled Bott–Samelson object — the
/// C-basis element of the starting closed-orbit parameter multiplied by
/// (T_α + 1) for each letter — in the KLV basis of the dual block. Returns
/// multiplicity coefficient vectors per parameter of `b` (index k =
/// coefficient of u^k), matching the shift-k counts on the variety side.
pub fn hecke_bs_multiplicities(
    b: &Block,
    dual: &Block,
    dual_table: &KlvTable,
    bij: &BTreeMap<String, String>,
    record: &BsRecord,
) -> Result<BTreeMap<String, Vec<usize>>> {
    let schedule = b.dual_schedule.as_ref().ok_or_else(|| Error::MissingFlag {
        block: b.name.clone(),
        what: "dual_schedule".into(),
    })?;
    let maxlen = b.max_length();
    // The starting parameter: the minimal-dual-length parameter scheduled
    // with an empty word whose start coset agrees with the record's modulo
    // W(K).
    let start_elem = b.w.word_to_element(&record.start);
    let mut start_param: Option<usize> = None;
    for (pi, p) in b.params.iter().enumerate() {
        if maxlen - p.length != 0 {
            continue;
        }
        let e = &schedule[&p.id];
        if !e.word.is_empty() {
            continue;
        }
        let v = b.w.word_to_element(&e.start);
        let d = b.w.mul(b.w.inv(v), start_elem);
        if b.w_k.contains(&d) {
            start_param = Some(pi);
            break;
        }
    }
    let start_param = start_param.ok_or_else(|| {
        Error::BlockFile(format!(
            "no closed-orbit parameter matches schedule start {:?}",
            record.start
        ))
    })?;
    let dual_id = bij
        .get(&b.params[start_param].id)
        .ok_or_else(|| Error::BlockFile("duality bijection incomplete".into()))?;
    let dual_idx = dual
        .param_index(dual_id)
        .ok_or_else(|| Error::BlockFile(format!("unknown dual parameter {dual_id}")))?;
    let mut h = dual_table.c_vec(dual_idx);
    for &alpha in &record.word {
        let t = t_matrix(dual, alpha);
        let th = mat_apply(&t, &h);
        h = th
            .into_iter()
            .zip(h)
            .map(|(a, b)| a.add(&b))
            .collect();
    }
    let coeffs = dual_table.expand_in_c_basis(dual, &h);
    // Translate back through the bijection.
    let mut inv: BTreeMap<&String, &String> = BTreeMap::new();
    for (k, v) in bij {
        inv.insert(v, k);
    }
    let mut out = BTreeMap::new();
    for (di, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let own = inv.get(&dual.params[di].id).ok_or_else(|| {
            Error::BlockFile("duality bijection not surjective".into())
        })?;
        let deg = c.degree().unwrap();
        let mut v = vec![0usize; deg + 1];
        for (k, item) in v.iter_mut().enumerate() {
            let coeff = c.coeff(k);
            use num_traits::ToPrimitive;
            let as_u = coeff.to_usize().ok_or_else(|| {
                Error::BlockFile(format!(
                    "negative multiplicity in Hecke expansion at {}",
                    dual.params[di].id
                ))
            })?;
            *item = as_u;
        }
        out.insert(own.to_string(), v);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Ext algebra
// ---------------------------------------------------------------------------

/// Graded Hom dimensions and composition data of the canonical objects.
#[derive(Debug, Clone, Serialize)]
pub struct ExtAlgebra {
    pub labels: Vec<String>,
    pub window: usize,
    /// dims[i][j][k] = dim Hom(M_i, M_j) in cohomological degree k.
    pub dims: Vec<Vec<Vec<usize>>>,
    pub degree_zero_semisimple: bool,
    pub associative: bool,
    /// pairing[i][j] = dim e_i·(A₀/rad A₀)·e_j.
    pub pairing: Vec<Vec<usize>>,
}

impl BlockVariety {
    pub fn ext_algebra(&self, canon: &CanonicalSet, window: usize) -> Result<ExtAlgebra> {
        let n = canon.objects.len();
        let labels: Vec<String> = canon.objects.iter().map(|o| o.id.clone()).collect();
        let mut dims = vec![vec![Vec::new(); n]; n];
        let mut bases: Vec<Vec<Vec<Vec<PMat>>>> = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut per_degree = Vec::new();
                let mut d = Vec::new();
                for k in 0..=window {
                    let basis = self.eq_hom_basis(
                        &canon.objects[i].module,
                        &canon.objects[j].module,
                        k as i64,
                    )?;
                    d.push(basis.len());
                    per_degree.push(basis);
                }
                dims[i][j] = d;
                bases[i][j] = per_degree;
            }
        }
        // Degree-0 semisimplicity: the fiber image of the whole degree-0
        // algebra A₀ = ⊕ Hom⁰(M_i, M_j), acting on the direct sum of the
        // objects, must have an n-dimensional semisimple quotient — one
        // matrix-algebra factor per object.
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + canon.objects[i].module.m.rank();
        }
        let total = offsets[n];
        let mut a0_fibers: Vec<crate::qlin::QMat> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for h in &bases[i][j][0] {
                    let f = fiber_matrix(
                        &canon.objects[j].module.m.gens,
                        &canon.objects[i].module.m.gens,
                        h,
                    );
                    let mut big = crate::qlin::QMat::zero(total, total);
                    for r in 0..canon.objects[j].module.m.rank() {
                        for c in 0..canon.objects[i].module.m.rank() {
                            *big.at_mut(offsets[j] + r, offsets[i] + c) = f.at(r, c).clone();
                        }
                    }
                    a0_fibers.push(big);
                }
            }
        }
        let degree_zero_semisimple = semisimple_quotient_dim(&a0_fibers) == n;
        // Composition closure and associativity on the window: products of
        // basis maps must lie in the computed Hom spaces. The target spans
        // are reduced once per cell and queried repeatedly.
        let spans: Vec<Vec<Vec<PmatSpan>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| (0..=window).map(|d| PmatSpan::new(&bases[i][k][d])).collect())
                    .collect()
            })
            .collect();
        let mut associative = true;
        'outer: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for d1 in 0..=window {
                        for d2 in 0..=(window - d1) {
                            for f in &bases[i][j][d1] {
                                for g in &bases[j][k][d2] {
                                    let comp = pmat_mul(g, f);
                                    if !spans[i][k][d1 + d2].contains(&comp) {
                                        associative = false;
                                        break 'outer;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        // Pairing: dimension of e_i·(A₀/rad A₀)·e_j. Diagonal entries are
        // the semisimple quotients of the local endomorphism rings;
        // off-diagonal entries survive the radical exactly when the two
        // objects are isomorphic.
        let mut pairing = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    let fibers: Vec<crate::qlin::QMat> = bases[i][i][0]
                        .iter()
                        .map(|h| {
                            fiber_matrix(
                                &canon.objects[i].module.m.gens,
                                &canon.objects[i].module.m.gens,
                                h,
                            )
                        })
                        .collect();
                    pairing[i][j] = semisimple_quotient_dim(&fibers);
                } else if dims[i][j][0] != 0
                    && self.eq_iso(&canon.objects[i].module, &canon.objects[j].module)?
                {
                    pairing[i][j] = 1;
                }
            }
        }
        Ok(ExtAlgebra {
            labels,
            window,
            dims,
            degree_zero_semisimple,
            associative,
            pairing,
        })
    }
}

/// Dimension of the semisimple quotient of the matrix algebra spanned by
/// the given fiber matrices (with identity adjoined): algebra dimension
/// minus the radical of the trace form.
fn semisimple_quotient_dim(fibers: &[crate::qlin::QMat]) -> usize {
    if fibers.is_empty() {
        return 0;
    }
    let n = fibers[0].rows;
    let mut alg: Vec<crate::qlin::QMat> = Vec::new();
    let mut solver = LinSolver::new(n * n);
    let push = |m: crate::qlin::QMat,
                alg: &mut Vec<crate::qlin::QMat>,
                solver: &mut LinSolver| {
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
        }
    };
    push(crate::qlin::QMat::identity(n), &mut alg, &mut solver);
    for f in fibers {
        push(f.clone(), &mut alg, &mut solver);
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
    let dim = alg.len();
    let mut gram = crate::qlin::QMat::zero(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            let p = alg[a].mul(&alg[b]);
            *gram.at_mut(a, b) = (0..n).map(|r| p.at(r, r).clone()).sum();
        }
    }
    gram.rank()
}

/// Row span of a list of polynomial matrices, vectorized once so repeated
/// membership queries avoid re-reducing the basis.
struct PmatSpan {
    index: HashMap<(usize, usize, Expt), usize>,
    solver: LinSolver,
}

impl PmatSpan {
    fn new(basis: &[PMat]) -> PmatSpan {
        let mut index: HashMap<(usize, usize, Expt), usize> = HashMap::new();
        for m in basis {
            for (i, r) in m.iter().enumerate() {
                for (j, p) in r.iter().enumerate() {
                    for e in p.terms.keys() {
                        let next = index.len();
                        index.entry((i, j, e.clone())).or_insert(next);
                    }
                }
            }
        }
        let mut solver = LinSolver::new(index.len().max(1));
        for m in basis {
            let mut row = Vec::new();
            for (i, r) in m.iter().enumerate() {
                for (j, p) in r.iter().enumerate() {
                    for (e, c) in &p.terms {
                        row.push((index[&(i, j, e.clone())], c.clone()));
                    }
                }
            }
            solver.add_row(row);
        }
        PmatSpan { index, solver }
    }

    fn contains(&self, target: &PMat) -> bool {
        if pmat_is_zero(target) {
            return true;
        }
        let mut row = Vec::new();
        for (i, r) in target.iter().enumerate() {
            for (j, p) in r.iter().enumerate() {
                for (e, c) in &p.terms {
                    match self.index.get(&(i, j, e.clone())) {
                        // A monomial the basis never produces cannot cancel.
                        None => return false,
                        Some(&k) => row.push((k, c.clone())),
                    }
                }
            }
        }
        self.solver.contains(row)
    }
}

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

/// DOT rendering of the KLV multiplicity data as a labeled poset graph:
/// nodes are parameters ranked by length, edges carry the polynomial
/// multiplicities.
pub fn multiplicity_dot(b: &Block, t: &KlvTable) -> String {
    let mut out = String::from("digraph klv {\n  rankdir=BT;\n");
    for (i, p) in b.params.iter().enumerate() {
        out.push_str(&format!(
            "  n{} [label=\"{} (len {})\"];\n",
            i, p.id, p.length
        ));
    }
    for gamma in 0..b.num_params() {
        for xi in 0..b.num_params() {
            if xi != gamma && !t.p[gamma][xi].is_zero() {
                out.push_str(&format!(
                    "  n{} -> n{} [label=\"{}\"];\n",
                    xi, gamma, t.p[gamma][xi]
                ));
            }
        }
    }
    out.push_str("}\n");
    out
}
