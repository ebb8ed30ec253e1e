use blockcalc::blockdata::*;

#[test]
fn builtins_validate() {
    for name in builtin_names() {
        let b = builtin_block(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        let rep = validate(&b);
        assert!(rep.ok(), "{name}: {rep}");
    }
}

#[test]
fn complex_block_shape() {
    let b = builtin_block("complex_A2").unwrap();
    assert_eq!(b.num_params(), 6);
    assert_eq!(b.max_length(), 3);
    // All parameters of a complex block are split-attached.
    for i in 0..b.num_params() {
        assert!(b.split_attached(i));
    }
    // Exactly one open parameter (the longest element).
    assert_eq!(b.params.iter().filter(|p| p.open).count(), 1);
}

#[test]
fn sl2r_split_attached() {
    let b = builtin_block("sl2R_principal").unwrap();
    let y = b.param_index("y").unwrap();
    let x0 = b.param_index("x0").unwrap();
    assert!(b.split_attached(y));
    assert!(!b.split_attached(x0));
}

#[test]
fn dual_of_sl2r_matches_pgl2r() {
    let sl2 = builtin_block("sl2R_principal").unwrap();
    let pgl2 = builtin_block("pgl2R_principal").unwrap();
    let dual = dual_block(&sl2).unwrap();
    assert!(validate(&dual).ok());
    let iso = match_blocks(&dual, &pgl2).expect("dual of sl2R should match pgl2R");
    // The recorded bijection is one valid matching: check it too.
    let bij = sl2.duality_bijection.as_ref().unwrap();
    for (i, p) in dual.params.iter().enumerate() {
        let target = &bij[&p.id];
        // match_blocks may pick the other valid matching (x0,x1 swap), but
        // lengths and statuses must agree either way.
        assert_eq!(
            pgl2.params[iso[i]].length,
            pgl2.params[pgl2.param_index(target).unwrap()].length
        );
    }
}

#[test]
fn dual_involutive_up_to_iso() {
    for name in ["sl2R_principal", "pgl2R_principal", "complex_A1", "complex_B2"] {
        let b = builtin_block(name).unwrap();
        let dd = dual_block(&dual_block(&b).unwrap()).unwrap();
        assert!(match_blocks(&b, &dd).is_some(), "{name}: dual not involutive");
    }
}

#[test]
fn open_orbit_and_groups() {
    let sl2 = builtin_block("sl2R_principal").unwrap();
    let pgl2 = builtin_block("pgl2R_principal").unwrap();
    assert_eq!(open_orbit_parameters(&sl2).unwrap().len(), 1);
    assert_eq!(open_orbit_parameters(&pgl2).unwrap().len(), 2);

    let g = block_groups(&sl2, &pgl2).unwrap();
    assert_eq!(g.w_m.len(), 2);
    assert_eq!(g.w_m_prime.len(), 1);
    assert_eq!(g.s_order(), 2);

    let g_ad = block_groups(&pgl2, &pgl2).unwrap();
    assert_eq!(g_ad.w_m.len(), 1);
    assert_eq!(g_ad.s_order(), 1);

    let c = builtin_block("complex_A2").unwrap();
    let gc = block_groups(&c, &c).unwrap();
    assert_eq!(gc.w_m.len(), 1);
    assert_eq!(gc.s_order(), 1);
}

#[test]
fn closed_orbit_counts() {
    // Minimal-length parameters of the dual blocks.
    let sl2 = builtin_block("sl2R_principal").unwrap();
    let pgl2 = builtin_block("pgl2R_principal").unwrap();
    assert_eq!(closed_orbit_count(&dual_block(&sl2).unwrap()).unwrap(), 1);
    assert_eq!(closed_orbit_count(&dual_block(&pgl2).unwrap()).unwrap(), 2);
    let c = builtin_block("complex_A1").unwrap();
    assert_eq!(closed_orbit_count(&dual_block(&c).unwrap()).unwrap(), 1);
}

#[test]
fn products_validate_and_count() {
    let b = builtin_block("sl2R_x_sl2R_principal").unwrap();
    assert_eq!(b.num_params(), 9);
    assert_eq!(b.rank(), 2);
    assert_eq!(b.max_length(), 2);
    let g = {
        let ad = builtin_block("pgl2R_x_pgl2R_principal").unwrap();
        block_groups(&b, &ad).unwrap()
    };
    assert_eq!(g.s_order(), 4);
}

#[test]
fn import_atlas_style_text() {
    // A transcription of the sl2R principal block in atlas-like layout.
    let text = "\
block for the split form:
0(0,1): 0 [i1]  1  ( 2, *)  e
1(1,1): 0 [i1]  0  ( 2, *)  e
2(2,0): 1 [r1]  2  ( 0, 1)  1
";
    let file = import_atlas_block(text, "imported_sl2R", "A1", vec![vec![-1]]).unwrap();
    let block = crate_resolve(file);
    let rep = validate(&block);
    assert!(rep.ok(), "{rep}");
    let sl2 = builtin_block("sl2R_principal").unwrap();
    assert!(match_blocks(&block, &sl2).is_some());
}

fn crate_resolve(file: BlockFile) -> Block {
    blockcalc::blockdata::resolve(file).unwrap()
}

#[test]
fn import_reports_bad_lines() {
    let text = "0(0,1): zero [i1] 1 (2,*) e";
    let err = import_atlas_block(text, "bad", "A1", vec![vec![-1]]).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("line 1"), "{msg}");
}
