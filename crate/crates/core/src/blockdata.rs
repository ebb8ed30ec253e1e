//! Abstract block data: parameters, per-simple-root statuses, cross action,
//! Cayley transforms; validation; dual blocks; stabilizer groups.
//!
//! A block is *data*, not geometry: a finite parameter set with combinatorial
//! structure subject to axioms (see [`validate`]). Complex-group blocks are
//! generated; the split rank-1 principal blocks ship as JSON files; rank-2
//! product blocks are assembled from the rank-1 files.

use crate::qlin::QMat;
use crate::rootdata::{
    build_root_system, cartan_of_type, fixed_subgroup, Involution, RootDatum, WeylGroup,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Status of a simple root at a block parameter.
///
/// The eight cases and their Cayley/cross conventions follow the standard
/// references on Hecke-module structure for real groups; the table below is
/// the single point of convention for this crate:
///
/// | status | cross          | cayley               | length step |
/// |--------|----------------|----------------------|-------------|
/// | `C+`   | moves, ℓ+1     | none                 | +1          |
/// | `C-`   | moves, ℓ−1     | none                 | −1          |
/// | `i1`   | moves, ℓ same  | 1 target (r1), ℓ+1   |             |
/// | `i2`   | fixes          | 2 targets (r2), ℓ+1  |             |
/// | `ic`   | fixes          | none                 |             |
/// | `r1`   | fixes          | 2 targets (i1), ℓ−1  |             |
/// | `r2`   | moves, ℓ same  | 1 target (i2), ℓ−1   |             |
/// | `rn`   | fixes          | none                 |             |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "C+")]
    ComplexAscent,
    #[serde(rename = "C-")]
    ComplexDescent,
    #[serde(rename = "i1")]
    ImaginaryNoncompactI,
    #[serde(rename = "i2")]
    ImaginaryNoncompactII,
    #[serde(rename = "ic")]
    ImaginaryCompact,
    #[serde(rename = "r1")]
    RealI,
    #[serde(rename = "r2")]
    RealII,
    #[serde(rename = "rn")]
    RealNonparity,
}

impl Status {
    /// Status of the Vogan-dual parameter at the same simple root:
    /// ascents and descents exchange, imaginary and real types exchange with
    /// type I ↔ type II.
    pub fn dual(self) -> Status {
        use Status::*;
        match self {
            ComplexAscent => ComplexDescent,
            ComplexDescent => ComplexAscent,
            ImaginaryNoncompactI => RealII,
            ImaginaryNoncompactII => RealI,
            ImaginaryCompact => RealNonparity,
            RealNonparity => ImaginaryCompact,
            RealI => ImaginaryNoncompactII,
            RealII => ImaginaryNoncompactI,
        }
    }

    /// Number of Cayley targets this status must carry.
    pub fn cayley_arity(self) -> usize {
        use Status::*;
        match self {
            ImaginaryNoncompactI => 1,
            ImaginaryNoncompactII => 2,
            RealI => 2,
            RealII => 1,
            _ => 0,
        }
    }

    /// Whether cross moves the parameter.
    pub fn cross_moves(self) -> bool {
        use Status::*;
        matches!(
            self,
            ComplexAscent | ComplexDescent | ImaginaryNoncompactI | RealII
        )
    }

    /// Length change under cross (complex roots only).
    pub fn cross_length_step(self) -> i64 {
        use Status::*;
        match self {
            ComplexAscent => 1,
            ComplexDescent => -1,
            _ => 0,
        }
    }

    /// Whether this status makes s a descent for the KLV recursion.
    pub fn is_descent(self) -> bool {
        use Status::*;
        matches!(self, ComplexDescent | RealI | RealII)
    }

    pub fn as_str(self) -> &'static str {
        use Status::*;
        match self {
            ComplexAscent => "C+",
            ComplexDescent => "C-",
            ImaginaryNoncompactI => "i1",
            ImaginaryNoncompactII => "i2",
            ImaginaryCompact => "ic",
            RealI => "r1",
            RealII => "r2",
            RealNonparity => "rn",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

/// One block parameter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Param {
    pub id: String,
    pub length: usize,
    /// Opaque orbit identifier; parameters on the same K-orbit share a tag.
    pub orbit_tag: String,
    /// Attached to the maximally split Cartan (open-orbit side).
    #[serde(default)]
    pub open: bool,
}

/// Metadata flags carried by a block.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BlockFlags {
    #[serde(default)]
    pub quasisplit: bool,
    #[serde(default)]
    pub adjoint: bool,
    /// Marks data whose variety side carries a nontrivial component group.
    #[serde(default)]
    pub equivariant: bool,
    /// Opaque strong-real-form tag carried through from the source data.
    #[serde(default)]
    pub strong_real_form: Option<String>,
}

/// Bott–Samelson schedule entry for one parameter of the dual block: start
/// component coset (a reduced word for the coset representative), the wall
/// word to apply (first entry applied first), and, for equivariant blocks,
/// the character of the component group on the target summand (one ±1 per
/// group generator).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleEntry {
    #[serde(default)]
    pub start: Vec<usize>,
    #[serde(default)]
    pub word: Vec<usize>,
    #[serde(default)]
    pub twist: Vec<i8>,
}

/// On-disk block format (JSON). Words are lists of simple-root indices and
/// denote products of simple reflections (leftmost applied last).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockFile {
    pub name: String,
    pub weyl_type: String,
    pub theta: Vec<Vec<i64>>,
    #[serde(default)]
    pub flags: BlockFlags,
    pub params: Vec<Param>,
    /// status[s][i] = status of simple root s at params[i].
    pub status: Vec<Vec<Status>>,
    /// cross[s][i] = id of cross(s, params[i]).
    pub cross: Vec<Vec<String>>,
    /// cayley[s][i] = ids of the Cayley targets (may be empty).
    pub cayley: Vec<Vec<Vec<String>>>,
    /// Generating words for the θ-fixed Weyl subgroup acting on parameters.
    #[serde(default)]
    pub real_weyl: Vec<Vec<usize>>,
    /// Generating words for W(Ǩ) and W(Ǩ⁰) on the variety side.
    #[serde(default)]
    pub w_k: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub w_k0: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub companion_adjoint: Option<String>,
    /// Real Weyl group of the dual block (generating words).
    #[serde(default)]
    pub dual_real_weyl: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub duality_partner: Option<String>,
    /// Bijection param id → partner param id for the recorded dual pair.
    #[serde(default)]
    pub duality_bijection: Option<BTreeMap<String, String>>,
    /// Bott–Samelson schedule keyed by dual-parameter id.
    #[serde(default)]
    pub dual_schedule: Option<BTreeMap<String, ScheduleEntry>>,
}

/// A resolved, validated block.
#[derive(Debug, Clone)]
pub struct Block {
    pub name: String,
    pub weyl_type: String,
    pub rd: RootDatum,
    pub w: WeylGroup,
    pub theta: Involution,
    pub flags: BlockFlags,
    pub params: Vec<Param>,
    pub status: Vec<Vec<Status>>,
    /// cross[s][i] -> parameter index.
    pub cross: Vec<Vec<usize>>,
    pub cayley: Vec<Vec<Vec<usize>>>,
    /// Elements (Weyl indices) of the θ-fixed subgroup acting on parameters.
    pub real_weyl: Vec<usize>,
    /// Elements of W(Ǩ) / W(Ǩ⁰) used on the variety side.
    pub w_k: Vec<usize>,
    pub w_k0: Vec<usize>,
    pub companion_adjoint: Option<String>,
    pub dual_real_weyl: Option<Vec<usize>>,
    pub duality_partner: Option<String>,
    pub duality_bijection: Option<BTreeMap<String, String>>,
    pub dual_schedule: Option<BTreeMap<String, ScheduleEntry>>,
}

impl Block {
    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn rank(&self) -> usize {
        self.rd.rank
    }

    pub fn param_index(&self, id: &str) -> Option<usize> {
        self.params.iter().position(|p| p.id == id)
    }

    pub fn max_length(&self) -> usize {
        self.params.iter().map(|p| p.length).max().unwrap_or(0)
    }

    pub fn min_length(&self) -> usize {
        self.params.iter().map(|p| p.length).min().unwrap_or(0)
    }

    /// A parameter is split-attached if no simple root is imaginary at it.
    pub fn split_attached(&self, i: usize) -> bool {
        use Status::*;
        (0..self.rank()).all(|s| {
            !matches!(
                self.status[s][i],
                ImaginaryNoncompactI | ImaginaryNoncompactII | ImaginaryCompact
            )
        })
    }

    /// Cross action of a Weyl element (by index) on a parameter, via any
    /// reduced word.
    pub fn cross_by_element(&self, w: usize, p: usize) -> usize {
        let word = self.w.words[w].clone();
        // words store s-indices with leftmost applied last; cross actions
        // compose the same way.
        let mut cur = p;
        for &s in word.iter().rev() {
            cur = self.cross[s][cur];
        }
        cur
    }
}

fn resolve_words(w: &WeylGroup, words: &[Vec<usize>]) -> Vec<usize> {
    let gens: Vec<usize> = words.iter().map(|wd| w.word_to_element(wd)).collect();
    w.subgroup_generated(&gens)
}

/// Resolve a [`BlockFile`] into a [`Block`] (no validation yet).
pub fn resolve(file: BlockFile) -> Result<Block> {
    let cartan = cartan_of_type(&file.weyl_type)?;
    let rd = build_root_system(cartan)?;
    let w = WeylGroup::from_root_datum(&rd)?;
    if file.theta.len() != rd.rank {
        return Err(Error::BlockFile(format!(
            "theta has {} rows, expected {}",
            file.theta.len(),
            rd.rank
        )));
    }
    let theta = Involution::new(QMat::from_i64(&file.theta)).map_err(|_| {
        Error::BlockFile("theta is not an involution".into())
    })?;
    let lookup = |id: &str| -> Result<usize> {
        file.params
            .iter()
            .position(|p| p.id == id)
            .ok_or_else(|| Error::BlockFile(format!("unknown parameter id '{id}'")))
    };
    let n = file.params.len();
    let expect_shape = |name: &str, rows: usize, ok: bool| -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::BlockFile(format!(
                "{name} table has wrong shape (expected {} x {})",
                rd.rank, rows
            )))
        }
    };
    expect_shape(
        "status",
        n,
        file.status.len() == rd.rank && file.status.iter().all(|r| r.len() == n),
    )?;
    expect_shape(
        "cross",
        n,
        file.cross.len() == rd.rank && file.cross.iter().all(|r| r.len() == n),
    )?;
    expect_shape(
        "cayley",
        n,
        file.cayley.len() == rd.rank && file.cayley.iter().all(|r| r.len() == n),
    )?;
    let mut cross = Vec::new();
    for row in &file.cross {
        let mut out = Vec::new();
        for id in row {
            out.push(lookup(id)?);
        }
        cross.push(out);
    }
    let mut cayley = Vec::new();
    for row in &file.cayley {
        let mut out = Vec::new();
        for ids in row {
            let mut cell = Vec::new();
            for id in ids {
                cell.push(lookup(id)?);
            }
            cell.sort_unstable();
            out.push(cell);
        }
        cayley.push(out);
    }
    let real_weyl = resolve_words(&w, &file.real_weyl);
    let w_k = file
        .w_k
        .as_ref()
        .map(|words| resolve_words(&w, words))
        .unwrap_or_else(|| vec![w.identity()]);
    let w_k0 = file
        .w_k0
        .as_ref()
        .map(|words| resolve_words(&w, words))
        .unwrap_or_else(|| vec![w.identity()]);
    let dual_real_weyl = file
        .dual_real_weyl
        .as_ref()
        .map(|words| resolve_words(&w, words));
    Ok(Block {
        name: file.name,
        weyl_type: file.weyl_type,
        rd,
        w,
        theta,
        flags: file.flags,
        params: file.params,
        status: file.status,
        cross,
        cayley,
        real_weyl,
        w_k,
        w_k0,
        companion_adjoint: file.companion_adjoint,
        dual_real_weyl,
        duality_partner: file.duality_partner,
        duality_bijection: file.duality_bijection,
        dual_schedule: file.dual_schedule,
    })
}

/// Validation report: a list of violated axioms with witnesses.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            write!(f, "valid")
        } else {
            write!(f, "{}", self.failures.join("\n"))
        }
    }
}

/// Check the block axioms; violations are data, not errors.
pub fn validate(b: &Block) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let mut fail = |msg: String| rep.failures.push(msg);
    let n = b.num_params();
    let rank = b.rank();
    // Unique ids.
    for i in 0..n {
        for j in (i + 1)..n {
            if b.params[i].id == b.params[j].id {
                fail(format!("duplicate parameter id '{}'", b.params[i].id));
            }
        }
    }
    use Status::*;
    for s in 0..rank {
        for p in 0..n {
            let st = b.status[s][p];
            let q = b.cross[s][p];
            // Cross is involutive.
            if b.cross[s][q] != p {
                fail(format!(
                    "cross({s},{}) not involutive",
                    b.params[p].id
                ));
            }
            // Cross moves or fixes according to status.
            if st.cross_moves() == (q == p) && !matches!(st, ComplexAscent | ComplexDescent) {
                fail(format!(
                    "cross({s},{}) {} but status {}",
                    b.params[p].id,
                    if q == p { "fixes" } else { "moves" },
                    st
                ));
            }
            // Length behaviour under cross.
            let expected = b.params[p].length as i64 + st.cross_length_step();
            if matches!(st, ComplexAscent | ComplexDescent) {
                if q == p {
                    fail(format!("complex cross({s},{}) fixes", b.params[p].id));
                }
                if b.params[q].length as i64 != expected {
                    fail(format!(
                        "cross({s},{}) length {} ≠ expected {}",
                        b.params[p].id, b.params[q].length, expected
                    ));
                }
                // Complex ascent/descent statuses pair up.
                let want = match st {
                    ComplexAscent => ComplexDescent,
                    _ => ComplexAscent,
                };
                if b.status[s][q] != want {
                    fail(format!(
                        "status({s},{}) = {} but cross image has {}",
                        b.params[p].id, st, b.status[s][q]
                    ));
                }
            } else if b.params[q].length != b.params[p].length {
                fail(format!(
                    "non-complex cross({s},{}) changes length",
                    b.params[p].id
                ));
            }
            // Cayley arity, direction, and adjointness.
            let cay = &b.cayley[s][p];
            if cay.len() != st.cayley_arity() {
                fail(format!(
                    "cayley({s},{}) has {} targets, status {} requires {}",
                    b.params[p].id,
                    cay.len(),
                    st,
                    st.cayley_arity()
                ));
            }
            for &c in cay {
                let (want_status, want_len): (Vec<Status>, i64) = match st {
                    ImaginaryNoncompactI => (vec![RealI], 1),
                    ImaginaryNoncompactII => (vec![RealII], 1),
                    RealI => (vec![ImaginaryNoncompactI], -1),
                    RealII => (vec![ImaginaryNoncompactII], -1),
                    _ => (vec![], 0),
                };
                if !want_status.is_empty() {
                    if !want_status.contains(&b.status[s][c]) {
                        fail(format!(
                            "cayley({s},{}) target {} has status {}",
                            b.params[p].id, b.params[c].id, b.status[s][c]
                        ));
                    }
                    if b.params[c].length as i64 != b.params[p].length as i64 + want_len {
                        fail(format!(
                            "cayley({s},{}) target {} has wrong length",
                            b.params[p].id, b.params[c].id
                        ));
                    }
                    if !b.cayley[s][c].contains(&p) {
                        fail(format!(
                            "cayley({s},{}) not adjoint at target {}",
                            b.params[p].id, b.params[c].id
                        ));
                    }
                }
            }
            // Type I/II Cayley interplay with cross.
            match st {
                ImaginaryNoncompactI => {
                    // cross image shares the single Cayley target.
                    if b.cayley[s][q] != *cay {
                        fail(format!(
                            "i1 cross pair at ({s},{}) disagrees on Cayley target",
                            b.params[p].id
                        ));
                    }
                }
                ImaginaryNoncompactII => {
                    if cay.len() == 2 && cay[0] == cay[1] {
                        fail(format!(
                            "i2 cayley({s},{}) targets coincide",
                            b.params[p].id
                        ));
                    }
                    if cay.len() == 2 && b.cross[s][cay[0]] != cay[1] {
                        fail(format!(
                            "i2 cayley({s},{}) targets not swapped by cross",
                            b.params[p].id
                        ));
                    }
                }
                _ => {}
            }
        }
    }
    // Cross extends to a W-action: braid relations on parameters.
    for s in 0..rank {
        for t in (s + 1)..rank {
            let m = braid_order(&b.rd.cartan, s, t);
            for p in 0..n {
                let mut a = p;
                let mut c = p;
                for k in 0..m {
                    a = b.cross[if k % 2 == 0 { s } else { t }][a];
                    c = b.cross[if k % 2 == 0 { t } else { s }][c];
                }
                if a != c {
                    fail(format!(
                        "cross braid relation fails for roots ({s},{t}) at {}",
                        b.params[p].id
                    ));
                }
            }
        }
    }
    // θ normalizes the simple reflections.
    let t = &b.theta.matrix;
    if let Some(tinv) = t.inverse() {
        for g in &b.w.gens {
            let conj = t.mul(g).mul(&tinv);
            if b.w.lookup(&conj).is_none() {
                fail("theta does not normalize the Weyl group".into());
            }
        }
    } else {
        fail("theta not invertible".into());
    }
    // real_weyl elements are θ-fixed.
    if let Some(tinv) = t.inverse() {
        for &e in &b.real_weyl {
            let m = &b.w.elements[e];
            if t.mul(m).mul(&tinv) != *m {
                fail(format!("real_weyl element {} not theta-fixed", e));
            }
        }
    }
    // Open parameters have maximal length and exist when quasisplit.
    let maxlen = b.max_length();
    for p in &b.params {
        if p.open && p.length != maxlen {
            fail(format!("open parameter '{}' not of maximal length", p.id));
        }
    }
    if b.flags.quasisplit && !b.params.iter().any(|p| p.open) {
        fail("quasisplit block without open parameters".into());
    }
    rep
}

/// Order of s_i s_j from the Cartan matrix (finite type, rank entries).
pub fn braid_order(cartan: &[Vec<i64>], i: usize, j: usize) -> usize {
    match cartan[i][j] * cartan[j][i] {
        0 => 2,
        1 => 3,
        2 => 4,
        3 => 6,
        _ => panic!("not finite type"),
    }
}

/// Construct the block of a complex group of the given type: parameters are
/// Weyl group elements, all statuses complex, cross(s, w) = s·w.
pub fn complex_block(weyl_type: &str) -> Result<Block> {
    let cartan = cartan_of_type(weyl_type)?;
    let rd = build_root_system(cartan)?;
    let w = WeylGroup::from_root_datum(&rd)?;
    let n = w.order();
    let rank = rd.rank;
    let id_of = |e: usize| -> String {
        if w.words[e].is_empty() {
            "e".to_string()
        } else {
            w.words[e]
                .iter()
                .map(|s| (s + 1).to_string())
                .collect::<Vec<_>>()
                .join("")
        }
    };
    let maxlen = w.length(w.longest);
    let params: Vec<Param> = (0..n)
        .map(|e| Param {
            id: id_of(e),
            length: w.length(e),
            orbit_tag: id_of(e),
            open: w.length(e) == maxlen,
        })
        .collect();
    let mut status = vec![vec![Status::ComplexAscent; n]; rank];
    let mut cross = vec![vec![0usize; n]; rank];
    let cayley = vec![vec![Vec::new(); n]; rank];
    for s in 0..rank {
        for e in 0..n {
            let se = w.mul(w.word_to_element(&[s]), e);
            cross[s][e] = se;
            status[s][e] = if w.length(se) > w.length(e) {
                Status::ComplexAscent
            } else {
                Status::ComplexDescent
            };
        }
    }
    // Schedule: the canonical object for dual parameter w is reached from the
    // start component by the wall word of w·w₀ (reversed reduced word, so the
    // first letter is applied first).
    let w0 = w.longest;
    let mut schedule = BTreeMap::new();
    for e in 0..n {
        let v = w.mul(e, w0);
        let mut word = w.words[v].clone();
        word.reverse();
        schedule.insert(
            id_of(e),
            ScheduleEntry {
                start: vec![],
                word,
                twist: vec![],
            },
        );
    }
    let theta_rows: Vec<Vec<i64>> = (0..rank)
        .map(|i| (0..rank).map(|j| if i == j { -1 } else { 0 }).collect())
        .collect();
    let name = format!("complex_{}", weyl_type);
    let mut bijection = BTreeMap::new();
    for e in 0..n {
        bijection.insert(id_of(e), id_of(e));
    }
    resolve(BlockFile {
        name: name.clone(),
        weyl_type: weyl_type.to_string(),
        theta: theta_rows,
        flags: BlockFlags {
            quasisplit: true,
            adjoint: true,
            equivariant: false,
            strong_real_form: Some("complex".into()),
        },
        params,
        status,
        cross: cross
            .iter()
            .map(|row| row.iter().map(|&q| id_of(q)).collect())
            .collect(),
        cayley: cayley
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell: &Vec<usize>| cell.iter().map(|&q| id_of(q)).collect())
                    .collect()
            })
            .collect(),
        real_weyl: vec![],
        w_k: None,
        w_k0: None,
        companion_adjoint: Some(name.clone()),
        dual_real_weyl: Some(vec![]),
        duality_partner: Some(name),
        duality_bijection: Some(bijection),
        dual_schedule: Some(schedule),
    })
}

/// Product of two blocks: parameters are pairs, simple roots are the
/// disjoint union, every table acts factorwise.
pub fn block_product(a: &Block, b: &Block) -> Result<Block> {
    let weyl_type = format!("{}x{}", a.weyl_type, b.weyl_type);
    let ra = a.rank();
    let na = a.num_params();
    let nb = b.num_params();
    let pid = |i: usize, j: usize| format!("{}.{}", a.params[i].id, b.params[j].id);
    let mut params = Vec::new();
    for i in 0..na {
        for j in 0..nb {
            params.push(Param {
                id: pid(i, j),
                length: a.params[i].length + b.params[j].length,
                orbit_tag: format!("{}.{}", a.params[i].orbit_tag, b.params[j].orbit_tag),
                open: a.params[i].open && b.params[j].open,
            });
        }
    }
    let rank = ra + b.rank();
    let mut status = vec![Vec::new(); rank];
    let mut cross = vec![Vec::new(); rank];
    let mut cayley = vec![Vec::new(); rank];
    for i in 0..na {
        for j in 0..nb {
            for s in 0..rank {
                if s < ra {
                    status[s].push(a.status[s][i]);
                    cross[s].push(pid(a.cross[s][i], j));
                    cayley[s].push(
                        a.cayley[s][i].iter().map(|&c| pid(c, j)).collect::<Vec<_>>(),
                    );
                } else {
                    let t = s - ra;
                    status[s].push(b.status[t][j]);
                    cross[s].push(pid(i, b.cross[t][j]));
                    cayley[s].push(
                        b.cayley[t][j].iter().map(|&c| pid(i, c)).collect::<Vec<_>>(),
                    );
                }
            }
        }
    }
    let theta = block_diag(&a.theta.matrix, &b.theta.matrix);
    let offset_words = |words: &[Vec<usize>], off: usize| -> Vec<Vec<usize>> {
        words
            .iter()
            .map(|wd| wd.iter().map(|&s| s + off).collect())
            .collect()
    };
    let words_of = |blk: &Block, elems: &[usize]| -> Vec<Vec<usize>> {
        elems.iter().map(|&e| blk.w.words[e].clone()).collect()
    };
    let combine_words = |xa: Vec<Vec<usize>>, xb: Vec<Vec<usize>>| -> Vec<Vec<usize>> {
        let mut out = xa;
        out.extend(offset_words(&xb, ra));
        out
    };
    let schedule = match (&a.dual_schedule, &b.dual_schedule) {
        (Some(sa), Some(sb)) => {
            let mut out = BTreeMap::new();
            for (ia, ea) in sa {
                for (ib, eb) in sb {
                    let mut word = ea.word.clone();
                    word.extend(eb.word.iter().map(|&s| s + ra));
                    let mut start = ea.start.clone();
                    start.extend(eb.start.iter().map(|&s| s + ra));
                    let mut twist = ea.twist.clone();
                    twist.extend(eb.twist.iter().cloned());
                    out.insert(format!("{}.{}", ia, ib), ScheduleEntry { start, word, twist });
                }
            }
            Some(out)
        }
        _ => None,
    };
    let bijection = match (&a.duality_bijection, &b.duality_bijection) {
        (Some(ba), Some(bb)) => {
            let mut out = BTreeMap::new();
            for (ka, va) in ba {
                for (kb, vb) in bb {
                    out.insert(format!("{}.{}", ka, kb), format!("{}.{}", va, vb));
                }
            }
            Some(out)
        }
        _ => None,
    };
    let theta_rows: Vec<Vec<i64>> = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| {
                    let q = theta.at(i, j);
                    debug_assert!(q.is_integer());
                    q.to_integer().try_into().unwrap_or(0)
                })
                .collect()
        })
        .collect();
    resolve(BlockFile {
        name: format!("{}_x_{}", a.name, b.name),
        weyl_type,
        theta: theta_rows,
        flags: BlockFlags {
            quasisplit: a.flags.quasisplit && b.flags.quasisplit,
            adjoint: a.flags.adjoint && b.flags.adjoint,
            equivariant: a.flags.equivariant || b.flags.equivariant,
            strong_real_form: None,
        },
        params,
        status,
        cross,
        cayley,
        real_weyl: combine_words(
            words_of(a, &a.real_weyl),
            words_of(b, &b.real_weyl),
        ),
        w_k: Some(combine_words(words_of(a, &a.w_k), words_of(b, &b.w_k))),
        w_k0: Some(combine_words(words_of(a, &a.w_k0), words_of(b, &b.w_k0))),
        companion_adjoint: match (&a.companion_adjoint, &b.companion_adjoint) {
            (Some(ca), Some(cb)) => Some(format!("{}_x_{}", ca, cb)),
            _ => None,
        },
        dual_real_weyl: match (&a.dual_real_weyl, &b.dual_real_weyl) {
            (Some(da), Some(db)) => Some(combine_words(
                da.iter().map(|&e| a.w.words[e].clone()).collect(),
                db.iter().map(|&e| b.w.words[e].clone()).collect(),
            )),
            _ => None,
        },
        duality_partner: match (&a.duality_partner, &b.duality_partner) {
            (Some(pa), Some(pb)) => Some(format!("{}_x_{}", pa, pb)),
            _ => None,
        },
        duality_bijection: bijection,
        dual_schedule: schedule,
    })
}

fn block_diag(a: &QMat, b: &QMat) -> QMat {
    let n = a.rows + b.rows;
    let mut m = QMat::zero(n, n);
    for i in 0..a.rows {
        for j in 0..a.cols {
            *m.at_mut(i, j) = a.at(i, j).clone();
        }
    }
    for i in 0..b.rows {
        for j in 0..b.cols {
            *m.at_mut(a.rows + i, a.cols + j) = b.at(i, j).clone();
        }
    }
    m
}

/// Vogan dual block: same parameter set, lengths reversed against the
/// maximal length, statuses exchanged by [`Status::dual`], cross unchanged,
/// Cayley tables unchanged (the forward/inverse roles swap with the types).
pub fn dual_block(b: &Block) -> Result<Block> {
    let d = b.max_length();
    let rank = b.rank();
    let dual_lengths: Vec<usize> = b.params.iter().map(|p| d - p.length).collect();
    let dual_max = dual_lengths.iter().copied().max().unwrap_or(0);
    let params: Vec<Param> = b
        .params
        .iter()
        .zip(&dual_lengths)
        .map(|(p, &l)| Param {
            id: p.id.clone(),
            length: l,
            orbit_tag: p.orbit_tag.clone(),
            open: l == dual_max,
        })
        .collect();
    let status: Vec<Vec<Status>> = b
        .status
        .iter()
        .map(|row| row.iter().map(|st| st.dual()).collect())
        .collect();
    let theta_rows: Vec<Vec<i64>> = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| {
                    let q = -b.theta.matrix.at(i, j).clone();
                    debug_assert!(q.is_integer());
                    q.to_integer().try_into().unwrap_or(0)
                })
                .collect()
        })
        .collect();
    let id = |i: usize| b.params[i].id.clone();
    resolve(BlockFile {
        name: format!("{}_dual", b.name),
        weyl_type: b.weyl_type.clone(),
        theta: theta_rows,
        flags: BlockFlags {
            quasisplit: b.flags.quasisplit,
            adjoint: false,
            equivariant: false,
            strong_real_form: b.flags.strong_real_form.clone(),
        },
        params,
        status,
        cross: b
            .cross
            .iter()
            .map(|row| row.iter().map(|&q| id(q)).collect())
            .collect(),
        cayley: b
            .cayley
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| cell.iter().map(|&q| id(q)).collect())
                    .collect()
            })
            .collect(),
        real_weyl: b
            .dual_real_weyl
            .as_ref()
            .map(|els| els.iter().map(|&e| b.w.words[e].clone()).collect())
            .unwrap_or_default(),
        w_k: None,
        w_k0: None,
        companion_adjoint: None,
        dual_real_weyl: Some(b.real_weyl.iter().map(|&e| b.w.words[e].clone()).collect()),
        duality_partner: Some(b.name.clone()),
        duality_bijection: None,
        dual_schedule: None,
    })
}

/// The open-orbit parameters of a quasisplit block.
pub fn open_orbit_parameters(b: &Block) -> Result<Vec<usize>> {
    if !b.flags.quasisplit {
        return Err(Error::MissingFlag {
            block: b.name.clone(),
            what: "quasisplit flag".into(),
        });
    }
    let open: Vec<usize> = (0..b.num_params()).filter(|&i| b.params[i].open).collect();
    if open.is_empty() {
        return Err(Error::MissingFlag {
            block: b.name.clone(),
            what: "open-orbit parameters".into(),
        });
    }
    Ok(open)
}

/// The stabilizer groups attached to a block and its adjoint companion.
#[derive(Debug, Clone)]
pub struct BlockGroups {
    /// W_M: stabilizer in the real Weyl group of an open-orbit parameter.
    pub w_m: Vec<usize>,
    /// W'_M: the corresponding stabilizer computed in the adjoint companion.
    pub w_m_prime: Vec<usize>,
    /// Coset representatives of S = W_M / W'_M (first entry the identity).
    pub s_reps: Vec<usize>,
}

impl BlockGroups {
    pub fn s_order(&self) -> usize {
        self.s_reps.len()
    }
}

/// Compute W_M, W'_M and S = W_M/W'_M from a block and its adjoint-cover
/// companion (same Weyl group and θ).
pub fn block_groups(b: &Block, b_ad: &Block) -> Result<BlockGroups> {
    if b.weyl_type != b_ad.weyl_type {
        return Err(Error::DimensionMismatch(format!(
            "companion type {} ≠ {}",
            b_ad.weyl_type, b.weyl_type
        )));
    }
    let open_b = open_orbit_parameters(b)?;
    let open_ad = open_orbit_parameters(b_ad)?;
    // The real Weyl groups must agree as subgroups of W.
    let mut rw = b.real_weyl.clone();
    let mut rw_ad = b_ad.real_weyl.clone();
    rw.sort_unstable();
    rw_ad.sort_unstable();
    if rw != rw_ad {
        return Err(Error::DimensionMismatch(
            "companion real Weyl group differs".into(),
        ));
    }
    // Transitivity of the real Weyl group on open parameters, both levels.
    let check_transitive = |blk: &Block, open: &[usize]| -> Result<()> {
        let base = open[0];
        let orbit: Vec<usize> = blk
            .real_weyl
            .iter()
            .map(|&e| blk.cross_by_element(e, base))
            .collect();
        if open.iter().any(|p| !orbit.contains(p)) {
            return Err(Error::NotTransitive(blk.name.clone()));
        }
        Ok(())
    };
    check_transitive(b, &open_b)?;
    check_transitive(b_ad, &open_ad)?;
    // Stabilizer of the lowest-id open parameter; conjugacy-independence is
    // checked by comparing stabilizer orders across all choices.
    let stab = |blk: &Block, p: usize| -> Vec<usize> {
        blk.real_weyl
            .iter()
            .copied()
            .filter(|&e| blk.cross_by_element(e, p) == p)
            .collect()
    };
    let base_b = *open_b
        .iter()
        .min_by_key(|&&i| b.params[i].id.clone())
        .unwrap();
    let base_ad = *open_ad
        .iter()
        .min_by_key(|&&i| b_ad.params[i].id.clone())
        .unwrap();
    let w_m = stab(b, base_b);
    let w_m_prime = stab(b_ad, base_ad);
    for &p in &open_b {
        if stab(b, p).len() != w_m.len() {
            return Err(Error::CountMismatch {
                what: format!("stabilizer order across open parameters of {}", b.name),
                left: stab(b, p).len(),
                right: w_m.len(),
            });
        }
    }
    // W'_M ⊆ W_M and the quotient is elementary abelian 2.
    for &e in &w_m_prime {
        if !w_m.contains(&e) {
            return Err(Error::DimensionMismatch(
                "W'_M not contained in W_M".into(),
            ));
        }
    }
    for &g in &w_m {
        let g2 = b.w.mul(g, g);
        if !w_m_prime.contains(&g2) {
            return Err(Error::DimensionMismatch(
                "W_M/W'_M not an elementary abelian 2-group".into(),
            ));
        }
    }
    // Coset representatives, identity first, then by element index.
    let mut s_reps = vec![b.w.identity()];
    for &g in &w_m {
        let covered = s_reps
            .iter()
            .any(|&r| w_m_prime.contains(&b.w.mul(b.w.inv(r), g)));
        if !covered {
            s_reps.push(g);
        }
    }
    s_reps.sort_unstable();
    Ok(BlockGroups {
        w_m,
        w_m_prime,
        s_reps,
    })
}

/// Number of closed orbits on the variety side: the number of minimal-length
/// parameters of the (equivariant-side) block. When the dual real Weyl group
/// is recorded, the orbit–stabilizer count |W^θ̌|/|W_M(dual)| is cross-checked.
/// Resolve the recorded duality partner of a block, together with the
/// parameter bijection: a bundled block of the recorded partner name when
/// one exists, otherwise the constructed dual (with the recorded or the
/// identity bijection).
pub fn partner_block(b: &Block) -> Result<(Block, BTreeMap<String, String>)> {
    let bij = match &b.duality_bijection {
        Some(m) => m.clone(),
        None => b
            .params
            .iter()
            .map(|p| (p.id.clone(), p.id.clone()))
            .collect(),
    };
    if let Some(pname) = &b.duality_partner {
        if pname == &b.name {
            return Ok((dual_block(b)?, bij));
        }
        for name in builtin_names() {
            let cand = builtin_block(name)?;
            if &cand.name == pname {
                return Ok((cand, bij));
            }
        }
    }
    Ok((dual_block(b)?, bij))
}

pub fn closed_orbit_count(b_dual: &Block) -> Result<usize> {
    let minlen = b_dual.min_length();
    let count = b_dual
        .params
        .iter()
        .filter(|p| p.length == minlen)
        .count();
    if b_dual.dual_real_weyl.is_some() && !b_dual.real_weyl.is_empty() {
        // Dualize back and compute the stabilizer count on the original side.
        let orig = dual_block(b_dual)?;
        if orig.flags.quasisplit && !orig.real_weyl.is_empty() {
            let open = open_orbit_parameters(&orig)?;
            let base = open[0];
            let stab = orig
                .real_weyl
                .iter()
                .filter(|&&e| orig.cross_by_element(e, base) == base)
                .count();
            let formula = orig.real_weyl.len() / stab;
            if formula != count {
                return Err(Error::CountMismatch {
                    what: format!("closed orbit count of {}", b_dual.name),
                    left: formula,
                    right: count,
                });
            }
        }
    }
    Ok(count)
}

/// Search for an isomorphism of block data (bijection of parameters
/// preserving lengths, statuses, cross, and Cayley tables).
pub fn match_blocks(a: &Block, b: &Block) -> Option<Vec<usize>> {
    if a.weyl_type != b.weyl_type || a.num_params() != b.num_params() {
        return None;
    }
    let n = a.num_params();
    let rank = a.rank();
    let mut assign: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    // Order choices by length for fast pruning.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| a.params[i].length);

    fn compatible(
        a: &Block,
        b: &Block,
        rank: usize,
        assign: &[Option<usize>],
        i: usize,
        j: usize,
    ) -> bool {
        if a.params[i].length != b.params[j].length {
            return false;
        }
        for s in 0..rank {
            if a.status[s][i] != b.status[s][j] {
                return false;
            }
            if let Some(jq) = assign[a.cross[s][i]] {
                if b.cross[s][j] != jq {
                    return false;
                }
            }
            // Cayley images must map into each other where already assigned.
            let ca: Vec<Option<usize>> =
                a.cayley[s][i].iter().map(|&c| assign[c]).collect();
            for x in ca.into_iter().flatten() {
                if !b.cayley[s][j].contains(&x) {
                    return false;
                }
            }
        }
        true
    }

    fn rec(
        a: &Block,
        b: &Block,
        rank: usize,
        order: &[usize],
        k: usize,
        assign: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let i = order[k];
        for j in 0..b.num_params() {
            if used[j] || !compatible(a, b, rank, assign, i, j) {
                continue;
            }
            assign[i] = Some(j);
            used[j] = true;
            if rec(a, b, rank, order, k + 1, assign, used) {
                return true;
            }
            assign[i] = None;
            used[j] = false;
        }
        false
    }

    if rec(a, b, rank, &order, 0, &mut assign, &mut used) {
        Some(assign.into_iter().map(|x| x.unwrap()).collect())
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Bundled data
// ---------------------------------------------------------------------------

const SL2R_PRINCIPAL: &str = include_str!("../data/sl2R_principal.json");
const PGL2R_PRINCIPAL: &str = include_str!("../data/pgl2R_principal.json");

/// Names of all bundled blocks, stable-sorted.
pub fn builtin_names() -> Vec<&'static str> {
    vec![
        "complex_A1",
        "complex_A2",
        "complex_B2",
        "pgl2R_principal",
        "pgl2R_x_pgl2R_principal",
        "sl2R_principal",
        "sl2R_x_sl2R_principal",
    ]
}

/// Load a bundled block by name.
pub fn builtin_block(name: &str) -> Result<Block> {
    let block = match name {
        "complex_A1" => complex_block("A1")?,
        "complex_A2" => complex_block("A2")?,
        "complex_B2" => complex_block("B2")?,
        "sl2R_principal" => from_json(SL2R_PRINCIPAL)?,
        "pgl2R_principal" => from_json(PGL2R_PRINCIPAL)?,
        "sl2R_x_sl2R_principal" => {
            let f = from_json(SL2R_PRINCIPAL)?;
            block_product(&f, &f)?
        }
        "pgl2R_x_pgl2R_principal" => {
            let f = from_json(PGL2R_PRINCIPAL)?;
            block_product(&f, &f)?
        }
        _ => {
            return Err(Error::UnknownBlock {
                name: name.to_string(),
                available: builtin_names().join(", "),
            })
        }
    };
    let rep = validate(&block);
    if !rep.ok() {
        return Err(Error::InvalidBlock {
            name: block.name.clone(),
            report: rep.to_string(),
        });
    }
    Ok(block)
}

/// Parse a block from JSON text and resolve it.
pub fn from_json(text: &str) -> Result<Block> {
    let file: BlockFile = serde_json::from_str(text)?;
    resolve(file)
}

/// Load a block from a JSON file on disk.
pub fn from_path(path: &std::path::Path) -> Result<Block> {
    let text = std::fs::read_to_string(path)?;
    from_json(&text)
}

// ---------------------------------------------------------------------------
// Best-effort importer for atlas-style `block` command output
// ---------------------------------------------------------------------------

/// Parse the textual output of an atlas-style `block` command into a block
/// file skeleton. Expected per line (after an optional header):
///
/// ```text
/// <index>: <length> [st,...] <cross...> (<c>,<c|*>)...
/// ```
///
/// i.e. a parameter index with optional `(x,λ)` decoration, a colon, the
/// length, a bracketed comma-separated status list (one per simple root,
/// tokens from {C+,C-,i1,i2,ic,r1,r2,rn}), then one cross image per simple
/// root, then one parenthesized Cayley pair per simple root (`*` for
/// undefined slots). Trailing columns are ignored. Lines that do not match
/// produce a typed error naming the line.
///
/// The importer fills `real_weyl` with the identity only and leaves the
/// duality fields empty; they must be supplied by hand for full use.
pub fn import_atlas_block(
    text: &str,
    name: &str,
    weyl_type: &str,
    theta: Vec<Vec<i64>>,
) -> Result<BlockFile> {
    let cartan = cartan_of_type(weyl_type)?;
    let rank = cartan.len();
    let mut params = Vec::new();
    let mut status: Vec<Vec<Status>> = vec![Vec::new(); rank];
    let mut cross: Vec<Vec<String>> = vec![Vec::new(); rank];
    let mut cayley: Vec<Vec<Vec<String>>> = vec![Vec::new(); rank];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || !line.chars().next().unwrap().is_ascii_digit() {
            continue; // headers, separators
        }
        let err = |why: &str| Error::Import {
            line: lineno + 1,
            why: why.to_string(),
        };
        let (head, rest) = line.split_once(':').ok_or_else(|| err("missing ':'"))?;
        let index_tok = head.split('(').next().unwrap().trim();
        let index: usize = index_tok
            .parse()
            .map_err(|_| err("unparsable parameter index"))?;
        if index != params.len() {
            return Err(err("parameter indices must be consecutive from 0"));
        }
        // Split the bracketed status list out first.
        let open_b = rest.find('[').ok_or_else(|| err("missing status '['"))?;
        let close_b = rest.find(']').ok_or_else(|| err("missing status ']'"))?;
        let before = rest[..open_b].trim();
        let stats = rest[open_b + 1..close_b].trim();
        let after = rest[close_b + 1..].trim();
        let length: usize = before
            .split_whitespace()
            .next()
            .ok_or_else(|| err("missing length"))?
            .parse()
            .map_err(|_| err("unparsable length"))?;
        let st_tokens: Vec<&str> = stats.split(',').map(|t| t.trim()).collect();
        if st_tokens.len() != rank {
            return Err(err("status list length does not match rank"));
        }
        for (s, tok) in st_tokens.iter().enumerate() {
            let st: Status = serde_json::from_value(serde_json::Value::String(
                (*tok).to_string(),
            ))
            .map_err(|_| err(&format!("unknown status token '{tok}'")))?;
            status[s].push(st);
        }
        // Cross images: next `rank` whitespace tokens not starting with '('.
        let mut tokens = after.split_whitespace().peekable();
        for s in 0..rank {
            let tok = tokens.next().ok_or_else(|| err("missing cross image"))?;
            let q: usize = tok.parse().map_err(|_| err("unparsable cross image"))?;
            cross[s].push(q.to_string());
        }
        // Cayley pairs: `rank` parenthesized groups.
        let rest_joined: String = tokens.collect::<Vec<_>>().join(" ");
        let mut pair_iter = rest_joined.split(')').filter(|s| s.contains('('));
        for s in 0..rank {
            let grp = pair_iter.next().ok_or_else(|| err("missing Cayley pair"))?;
            let inner = grp.split('(').nth(1).ok_or_else(|| err("bad Cayley pair"))?;
            let mut cell = Vec::new();
            for part in inner.split(',') {
                let part = part.trim();
                if part != "*" && !part.is_empty() {
                    let q: usize =
                        part.parse().map_err(|_| err("unparsable Cayley target"))?;
                    cell.push(q.to_string());
                }
            }
            cayley[s].push(cell);
        }
        params.push(Param {
            id: index.to_string(),
            length,
            orbit_tag: index.to_string(),
            open: false,
        });
    }
    if params.is_empty() {
        return Err(Error::Import {
            line: 0,
            why: "no parameter lines found".into(),
        });
    }
    // Mark maximal-length parameters open.
    let maxlen = params.iter().map(|p| p.length).max().unwrap();
    for p in params.iter_mut() {
        p.open = p.length == maxlen;
    }
    Ok(BlockFile {
        name: name.to_string(),
        weyl_type: weyl_type.to_string(),
        theta,
        flags: BlockFlags::default(),
        params,
        status,
        cross,
        cayley,
        real_weyl: vec![],
        w_k: None,
        w_k0: None,
        companion_adjoint: None,
        dual_real_weyl: None,
        duality_partner: None,
        duality_bijection: None,
        dual_schedule: None,
    })
}

/// The θ-fixed subgroup of the block's Weyl group, from the recorded
/// involution (useful for validating `real_weyl` data).
pub fn theta_fixed_subgroup(b: &Block) -> Result<Vec<usize>> {
    fixed_subgroup(&b.w, &b.theta)
}
