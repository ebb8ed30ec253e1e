mod common;

use blockcalc::blockdata::*;
use blockcalc::hecke::*;
use common::{complex_param_element, KlOracle};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

#[test]
fn quadratic_and_braid_relations() {
    for name in builtin_names() {
        let b = builtin_block(name).unwrap();
        check_quadratic(&b).unwrap_or_else(|e| panic!("{name}: {e}"));
        check_braid(&b).unwrap_or_else(|e| panic!("{name}: {e}"));
        // Dual blocks satisfy the relations too.
        let d = dual_block(&b).unwrap();
        check_quadratic(&d).unwrap_or_else(|e| panic!("{name} dual: {e}"));
        check_braid(&d).unwrap_or_else(|e| panic!("{name} dual: {e}"));
    }
}

#[test]
fn klv_rank_one_tables() {
    let sl2 = builtin_block("sl2R_principal").unwrap();
    let t = klv(&sl2).unwrap();
    let y = sl2.param_index("y").unwrap();
    let x0 = sl2.param_index("x0").unwrap();
    let x1 = sl2.param_index("x1").unwrap();
    assert!(t.p[y][y].is_one());
    assert!(t.p[y][x0].is_one());
    assert!(t.p[y][x1].is_one());
    assert!(t.p[x0][x1].is_zero());

    let pgl2 = builtin_block("pgl2R_principal").unwrap();
    let t = klv(&pgl2).unwrap();
    let x = pgl2.param_index("x").unwrap();
    let y1 = pgl2.param_index("y1").unwrap();
    let y2 = pgl2.param_index("y2").unwrap();
    assert!(t.p[y1][x].is_one());
    assert!(t.p[y2][x].is_one());
    assert!(t.p[y1][y2].is_zero());
}

#[test]
fn klv_products_factorize() {
    // The table of a product block is the tensor of the factor tables.
    let f = builtin_block("pgl2R_principal").unwrap();
    let b = builtin_block("pgl2R_x_pgl2R_principal").unwrap();
    let tf = klv(&f).unwrap();
    let tb = klv(&b).unwrap();
    let idx = |i: usize, j: usize| {
        b.param_index(&format!("{}.{}", f.params[i].id, f.params[j].id))
            .unwrap()
    };
    let nf = f.num_params();
    for g1 in 0..nf {
        for g2 in 0..nf {
            for x1 in 0..nf {
                for x2 in 0..nf {
                    let want = tf.p[g1][x1].mul(&tf.p[g2][x2]);
                    assert_eq!(tb.p[idx(g1, g2)][idx(x1, x2)], want);
                }
            }
        }
    }
}

#[test]
fn complex_blocks_match_classical_recursion() {
    // The table of a complex-group block must agree with the classical
    // recursion (an independent oracle in tests/common).
    for name in ["complex_A1", "complex_A2", "complex_B2"] {
        let b = builtin_block(name).unwrap();
        let t = klv(&b).unwrap();
        let mut oracle = KlOracle::new(&b.w);
        // Parameter ids of a complex block are digit strings of reduced
        // words; map them back to Weyl elements.
        let elem_of = |id: &str| complex_param_element(&b.w, id);
        for g in 0..b.num_params() {
            for x in 0..b.num_params() {
                let pw = oracle.p(elem_of(&b.params[x].id), elem_of(&b.params[g].id));
                assert_eq!(
                    t.p[g][x], pw,
                    "{name}: P({}, {})",
                    b.params[x].id, b.params[g].id
                );
            }
        }
    }
}

#[test]
fn duality_pairing_on_recorded_pairs() {
    // sl2R against its recorded partner pgl2R.
    let sl2 = builtin_block("sl2R_principal").unwrap();
    let pgl2 = builtin_block("pgl2R_principal").unwrap();
    verify_duality(&sl2, &pgl2, sl2.duality_bijection.as_ref().unwrap()).unwrap();
    verify_duality(&pgl2, &sl2, pgl2.duality_bijection.as_ref().unwrap()).unwrap();
    // Complex blocks against their constructed duals (identity bijection).
    for name in ["complex_A1", "complex_A2", "complex_B2"] {
        let b = builtin_block(name).unwrap();
        let d = dual_block(&b).unwrap();
        let bij = b.duality_bijection.clone().unwrap();
        verify_duality(&b, &d, &bij).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    // Product blocks against their constructed duals.
    for name in ["sl2R_x_sl2R_principal", "pgl2R_x_pgl2R_principal"] {
        let b = builtin_block(name).unwrap();
        let d = dual_block(&b).unwrap();
        let bij: BTreeMap<String, String> = b
            .params
            .iter()
            .map(|p| (p.id.clone(), p.id.clone()))
            .collect();
        verify_duality(&b, &d, &bij).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn duality_pairing_detects_corruption() {
    // Swapping two entries of the bijection must break the pairing.
    let sl2 = builtin_block("sl2R_principal").unwrap();
    let pgl2 = builtin_block("pgl2R_principal").unwrap();
    let mut bij = sl2.duality_bijection.clone().unwrap();
    let a = bij["x0"].clone();
    let b_ = bij["y"].clone();
    bij.insert("x0".into(), b_);
    bij.insert("y".into(), a);
    assert!(verify_duality(&sl2, &pgl2, &bij).is_err());
}

#[test]
fn intertwining_requires_reduced_words() {
    let b = builtin_block("complex_A2").unwrap();
    assert!(intertwining_operator(&b, &[0, 0]).is_err());
    assert!(intertwining_operator(&b, &[0, 1, 0]).is_ok());
}

#[test]
fn translation_wall_identity_all_blocks() {
    for name in builtin_names() {
        let b = builtin_block(name).unwrap();
        let rep = translation_wall_identity(&b).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(rep.projector_identity, "{name}: D^2 != |W| D");
        assert!(rep.multiplicity_ok, "{name}: {:?}", rep.multiplicities);
    }
}

#[test]
fn wall_identity_stabilizer_orders() {
    let sl2 = builtin_block("sl2R_principal").unwrap();
    assert_eq!(translation_wall_identity(&sl2).unwrap().stabilizer_order, 2);
    let pgl2 = builtin_block("pgl2R_principal").unwrap();
    assert_eq!(translation_wall_identity(&pgl2).unwrap().stabilizer_order, 1);
    let c = builtin_block("complex_B2").unwrap();
    assert_eq!(translation_wall_identity(&c).unwrap().stabilizer_order, 1);
}

#[test]
fn cross_vs_intertwining_all_blocks() {
    for name in builtin_names() {
        let b = builtin_block(name).unwrap();
        for e in 0..b.w.order() {
            let word = b.w.words[e].clone();
            let rep = cross_vs_intertwining(&b, &word)
                .unwrap_or_else(|err| panic!("{name}: {err}"));
            assert!(rep.ok, "{name}, word {:?}: {:?}", word, rep.rows);
        }
    }
}

#[test]
fn csv_export_shape() {
    let b = builtin_block("sl2R_principal").unwrap();
    let t = klv(&b).unwrap();
    let csv = klv_csv(&b, &t);
    assert!(csv.starts_with("gamma,xi,P\n"));
    assert!(csv.contains("y,x0,1"));
    let pretty = klv_pretty(&b, &t);
    assert!(pretty.contains("C[y]"));
}
