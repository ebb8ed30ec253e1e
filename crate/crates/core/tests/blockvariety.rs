//! Sheaf-calculus tests: wall functors, equivariant splitting, canonical
//! objects, and the Hecke-side multiplicity comparison.

use blockcalc::blockdata::{builtin_block, builtin_names, partner_block};
use blockcalc::blockvariety::{hecke_bs_multiplicities, multiplicity_dot, BlockVariety};
use blockcalc::gradedalg::{decompose, peel_known};
use blockcalc::hecke::klv;

#[test]
fn wall_functor_doubles_hilbert_series() {
    for name in builtin_names() {
        let b = builtin_block(name).unwrap();
        let bv = BlockVariety::new(&b).unwrap();
        let window = 2 * b.max_length() + 4;
        for &v in bv.components.clone().iter() {
            let m = bv.component_sheaf(v).unwrap();
            for alpha in 0..b.rank() {
                let cm = bv.wall_apply(alpha, &m).unwrap();
                let expected = m.hilbert(window).mul_one_plus_tk(2);
                assert!(
                    cm.hilbert(window).agrees_with(&expected),
                    "{name}: wall {alpha} on component {v}"
                );
            }
        }
    }
}

#[test]
fn wall_module_of_complex_a1_is_the_structure_algebra() {
    let b = builtin_block("complex_A1").unwrap();
    let bv = BlockVariety::new(&b).unwrap();
    let m = bv.bott_samelson(0, &[0]).unwrap();
    assert_eq!(m.rank(), 2);
    assert_eq!(decompose(&m).unwrap().len(), 1);
    // Peeling one copy of O(B) leaves nothing: the two agree up to iso.
    let rest = peel_known(&m, &bv.pres.module).unwrap().unwrap();
    assert_eq!(rest.rank(), 0);
}

#[test]
fn averaging_produces_a_valid_indecomposable_for_sl2r() {
    let b = builtin_block("sl2R_principal").unwrap();
    let bv = BlockVariety::new(&b).unwrap();
    assert_eq!(bv.s_order(), 2);
    assert_eq!(bv.sgens.len(), 1);
    let oe = bv.component_sheaf(0).unwrap();
    let avg = bv.average(&oe).unwrap();
    assert_eq!(avg.m.rank(), 2);
    // The average of a component sheaf over the symmetry group is
    // indecomposable equivariantly.
    assert_eq!(bv.eq_decompose(&avg).unwrap().len(), 1);
}

#[test]
fn equivariant_wall_module_splits_by_twist_for_sl2r() {
    let b = builtin_block("sl2R_principal").unwrap();
    let bv = BlockVariety::new(&b).unwrap();
    let bs = bv.bott_samelson(0, &[0]).unwrap();
    let avg = bv.average(&bs).unwrap();
    let parts = bv.eq_decompose(&avg).unwrap();
    assert_eq!(parts.len(), 2);
    for p in &parts {
        assert_eq!(p.m.rank(), 2);
        // Underlying modules are plainly indecomposable and isomorphic to
        // each other.
        assert_eq!(decompose(&p.m).unwrap().len(), 1);
    }
    let rest = peel_known(&parts[0].m, &parts[1].m).unwrap().unwrap();
    assert_eq!(rest.rank(), 0);
    // Equivariantly the two halves are distinguished by the sign of the
    // symmetry on the generator line.
    assert!(!bv.eq_iso(&parts[0], &parts[1]).unwrap());
}

fn cross_check(name: &str) {
    let b = builtin_block(name).unwrap();
    let bv = BlockVariety::new(&b).unwrap();
    let canon = bv.canonical_objects().unwrap();
    assert_eq!(canon.objects.len(), b.num_params(), "{name}: coverage");
    let (dual, bij) = partner_block(&b).unwrap();
    let table = klv(&dual).unwrap();
    for rec in &canon.records {
        let hecke = hecke_bs_multiplicities(&b, &dual, &table, &bij, rec).unwrap();
        assert_eq!(
            rec.mults, hecke,
            "{name}: multiplicities for start {:?} word {:?}\nvariety: {:?}\nhecke:   {:?}",
            rec.start, rec.word, rec.mults, hecke
        );
    }
}

#[test]
fn canonical_objects_match_hecke_products_sl2r() {
    cross_check("sl2R_principal");
}

#[test]
fn canonical_objects_match_hecke_products_pgl2r() {
    cross_check("pgl2R_principal");
}

#[test]
fn canonical_objects_match_hecke_products_complex_a1() {
    cross_check("complex_A1");
}

#[test]
fn canonical_objects_match_hecke_products_complex_a2() {
    cross_check("complex_A2");
}

#[test]
fn ext_algebra_of_complex_a1_matches_direct_solve() {
    let b = builtin_block("complex_A1").unwrap();
    let bv = BlockVariety::new(&b).unwrap();
    let canon = bv.canonical_objects().unwrap();
    let window = 6;
    let ext = bv.ext_algebra(&canon, window).unwrap();
    assert!(ext.degree_zero_semisimple);
    assert!(ext.associative);
    for i in 0..ext.labels.len() {
        for j in 0..ext.labels.len() {
            assert_eq!(ext.pairing[i][j], usize::from(i == j));
        }
    }
    // Direct solve over O(B) = C[x,y]/(x^2 - y^2): the object of the
    // open parameter "e" is O(B) itself, the object of the closed
    // parameter "1" is the line O_e = C[z] with x acting by z.
    let ie = ext.labels.iter().position(|l| l == "e").unwrap();
    let ic = ext.labels.iter().position(|l| l == "1").unwrap();
    let dim = |i: usize, j: usize, k: usize| ext.dims[i][j][k];
    for k in 0..=window {
        // End(O(B))_k = O(B)_k: 1 in degree 0, then 2 in every positive
        // even degree.
        let rk = if k == 0 {
            1
        } else if k % 2 == 0 {
            2
        } else {
            0
        };
        assert_eq!(dim(ie, ie, k), rk, "End(O(B)) degree {k}");
        // Hom(O(B), O_e)_k = C[z]_{k/2}.
        let line = usize::from(k % 2 == 0);
        assert_eq!(dim(ie, ic, k), line, "Hom(O(B), O_e) degree {k}");
        // Hom(O_e, O(B))_k: one map for each positive even degree, none in
        // degree 0.
        let up = usize::from(k % 2 == 0 && k >= 2);
        assert_eq!(dim(ic, ie, k), up, "Hom(O_e, O(B)) degree {k}");
        assert_eq!(dim(ic, ic, k), line, "End(O_e) degree {k}");
    }
}

#[test]
fn dot_export_lists_all_parameters() {
    let b = builtin_block("sl2R_principal").unwrap();
    let t = klv(&b).unwrap();
    let dot = multiplicity_dot(&b, &t);
    assert!(dot.starts_with("digraph"));
    for p in &b.params {
        assert!(dot.contains(&format!("\"{} (len {})\"", p.id, p.length)));
    }
    // Open-orbit element dominates both closed ones.
    assert_eq!(dot.matches("->").count(), 2);
}
