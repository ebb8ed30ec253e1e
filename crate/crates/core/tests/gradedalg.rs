use blockcalc::blockdata::builtin_block;
use blockcalc::gradedalg::{
    block_variety_algebra, block_variety_algebra_over, component_maps, decompose, fundamental_invariants, hom_basis,
    hom_dims, invariant_ring, peel_known, GModule,
};
use blockcalc::mpoly::MPoly;
use blockcalc::qlin::{qi, HilbertSeries, QMat};
use num_bigint::BigInt;

fn a1_gens() -> Vec<QMat> {
    vec![QMat::from_i64(&[vec![1]]), QMat::from_i64(&[vec![-1]])]
}

#[test]
fn invariant_ring_reports() {
    let rep = invariant_ring(&a1_gens(), 6).unwrap();
    assert!(rep.free);
    assert_eq!(rep.degrees, vec![2]);
    // Molien series of {±1} on a line: 1, 0, 1, 0, 1, ...
    assert_eq!(rep.hilbert[0], "1");
    assert_eq!(rep.hilbert[1], "0");
    assert_eq!(rep.hilbert[2], "1");
}

#[test]
fn fundamental_invariants_of_a1_squared() {
    // Factor-wise sign group on two coordinates: invariants x², y².
    let g = vec![
        QMat::from_i64(&[vec![1, 0], vec![0, 1]]),
        QMat::from_i64(&[vec![-1, 0], vec![0, 1]]),
        QMat::from_i64(&[vec![1, 0], vec![0, -1]]),
        QMat::from_i64(&[vec![-1, 0], vec![0, -1]]),
    ];
    let (degs, gens) = fundamental_invariants(&g).unwrap();
    assert_eq!(degs, vec![2, 2]);
    for p in &gens {
        assert_eq!(p.total_degree(), Some(2));
    }
}

/// Multiplication by t on C[t] ⊕ C[t]·g with deg g = 2, over base z = t²:
/// the regular representation module of the sign group, i.e. the structure
/// algebra for a rank-one split block.
fn rank_one_regular() -> GModule {
    let z = MPoly::var(1, 0);
    let one = MPoly::one(1);
    let zero = MPoly::zero(1);
    GModule {
        zweights: vec![2],
        gens: vec![0, 2],
        y: vec![vec![
            vec![zero.clone(), z.clone()],
            vec![one.clone(), zero.clone()],
        ]],
    }
}

#[test]
fn module_checks_and_hilbert() {
    let m = rank_one_regular();
    m.check().unwrap();
    let h = m.hilbert(6);
    // (1 + t²)/(1 − t⁴) = 1 + t² + t⁴ + t⁶ + ...
    let mut full = vec![BigInt::from(0); 7];
    for k in (0..=6).step_by(2) {
        full[k] = BigInt::from(1);
    }
    assert!(h.agrees_with(&HilbertSeries::from_coeffs(full)));
}

/// Brute-force oracle: graded homs between cyclic modules over
/// R = C[a, b]/(a² − b²) with the two coordinate actions, computed as
/// literal matrices on monomial bases degree by degree.
///
/// The module R itself, as a free module over C[b] with basis {1, a}:
/// Y_a = [[0, b²],[1, 0]], Y_b = b·Id. Maps R(−s) → R of degree k are
/// spanned by multiplication by homogeneous elements of R of degree k − s;
/// dim R_d = 2 for d ≥ 1, 1 for d = 0, 0 for d < 0.
fn hypersurface_module() -> GModule {
    let b2 = MPoly::var(1, 0).pow(2);
    let one = MPoly::one(1);
    let zero = MPoly::zero(1);
    let b = MPoly::var(1, 0);
    GModule {
        zweights: vec![1],
        gens: vec![0, 2],
        y: vec![
            vec![vec![zero.clone(), b2], vec![one, zero.clone()]],
            vec![vec![b.clone(), zero.clone()], vec![zero, b]],
        ],
    }
}

#[test]
fn hom_dimensions_match_hypersurface_oracle() {
    let r = hypersurface_module();
    r.check().unwrap();
    for s in 0..4i64 {
        let shifted = r.shifted(2 * s);
        for k in -2..=8i64 {
            let dims = hom_basis(&shifted, &r, k).unwrap().len();
            // A degree-k hom out of the shifted module is determined by the
            // image of its generator, an element of R in degree k + 2s
            // (module degrees are doubled).
            let d = k + 2 * s;
            let expect = if d < 0 || d % 2 != 0 {
                0
            } else if d == 0 {
                1
            } else {
                2
            };
            assert_eq!(dims, expect, "s={s} k={k}");
        }
    }
}

#[test]
fn hom_dims_window() {
    let r = hypersurface_module();
    let dims = hom_dims(&r, &r, 4).unwrap();
    let map: std::collections::BTreeMap<i64, usize> = dims.into_iter().collect();
    assert_eq!(map[&0], 1);
    assert_eq!(map[&2], 2);
    assert_eq!(map[&4], 2);
    assert_eq!(map[&-2], 0);
}

#[test]
fn decompose_direct_sum_of_shifts() {
    let m = rank_one_regular();
    let sum = m.direct_sum(&m.shifted(2));
    let parts = decompose(&sum).unwrap();
    assert_eq!(parts.len(), 2);
    let mut ranks: Vec<usize> = parts.iter().map(|p| p.rank()).collect();
    ranks.sort_unstable();
    assert_eq!(ranks, vec![2, 2]);
    for p in &parts {
        p.check().unwrap();
    }
    // Each summand is still indecomposable.
    for p in &parts {
        assert_eq!(decompose(p).unwrap().len(), 1);
    }
}

#[test]
fn indecomposable_stays_whole() {
    let m = rank_one_regular();
    let parts = decompose(&m).unwrap();
    assert_eq!(parts.len(), 1);
}

#[test]
fn peel_known_summand() {
    let m = rank_one_regular();
    let sum = m.direct_sum(&m.shifted(4)).direct_sum(&m);
    // Two copies of m sit inside; peel them one at a time.
    let rest = peel_known(&sum, &m).unwrap().expect("first copy");
    let rest2 = peel_known(&rest, &m).unwrap().expect("second copy");
    assert_eq!(rest2.rank(), 2);
    // The remainder is the shifted copy: no unshifted copy left.
    assert!(peel_known(&rest2, &m).unwrap().is_none());
    assert!(peel_known(&rest2, &m.shifted(4)).unwrap().is_some());
}

#[test]
fn block_variety_algebra_shapes() {
    // sl2R: W(K⁰) is trivial, so O(B) is free of rank |W| = 2 over C[a]
    // with generator degrees 0 and 2: (1 + t²)/(1 − t²) = 1 + 2t² + 2t⁴...
    let b = builtin_block("sl2R_principal").unwrap();
    let pres = block_variety_algebra(&b).unwrap();
    assert_eq!(pres.module.rank(), 2);
    assert_eq!(pres.module.zweights, vec![1]);
    assert_eq!(pres.module.gens, vec![0, 2]);
    let h = pres.module.hilbert(6);
    let mut full = vec![BigInt::from(0); 7];
    full[0] = BigInt::from(1);
    for k in (2..=6).step_by(2) {
        full[k] = BigInt::from(2);
    }
    assert!(h.agrees_with(&HilbertSeries::from_coeffs(full)));

    // Same block over the full W(K) = W: rank 2 over C[a²], Hilbert
    // (1 + t²)/(1 − t⁴) = 1 + t² + t⁴ + ...
    let pk = block_variety_algebra_over(&b, &b.w_k).unwrap();
    assert_eq!(pk.module.zweights, vec![2]);
    let hk = pk.module.hilbert(6);
    let mut ones = vec![BigInt::from(0); 7];
    for k in (0..=6).step_by(2) {
        ones[k] = BigInt::from(1);
    }
    assert!(hk.agrees_with(&HilbertSeries::from_coeffs(ones)));

    // Product block: rank |W(A1×A1)| = 4.
    let b2 = builtin_block("sl2R_x_sl2R_principal").unwrap();
    let pres2 = block_variety_algebra(&b2).unwrap();
    assert_eq!(pres2.module.rank(), 4);
    pres2.module.check().unwrap();
}

#[test]
fn structure_algebra_is_indecomposable_for_sl2r() {
    let b = builtin_block("sl2R_principal").unwrap();
    let pres = block_variety_algebra(&b).unwrap();
    assert_eq!(decompose(&pres.module).unwrap().len(), 1);
}

#[test]
fn component_maps_counts_and_exactness() {
    // Components are W(K⁰)-cosets; distinct maps are W(K)-cosets.
    // sl2R: two components identified by the twist into one map;
    // pgl2R and complex_A1: W(K) trivial, so two of each.
    for (name, comps, maps) in [
        ("sl2R_principal", 2usize, 1usize),
        ("pgl2R_principal", 2, 2),
        ("complex_A1", 2, 2),
    ] {
        let b = builtin_block(name).unwrap();
        let window = 2 * b.max_length() + 4;
        let rep = component_maps(&b, window).unwrap();
        assert_eq!(rep.num_components, comps, "{name}");
        assert_eq!(rep.num_maps, maps, "{name}");
        assert!(rep.all_surjective, "{name}");
        assert!(rep.jointly_injective, "{name}");
    }
}

#[test]
fn component_module_restriction_is_algebra_like() {
    // The restriction map sends the unit generator to the unit generator.
    let b = builtin_block("pgl2R_principal").unwrap();
    let pres = block_variety_algebra(&b).unwrap();
    let v = QMat::identity(1);
    let phi = pres.restriction_map(&v).unwrap();
    assert_eq!(phi[0][0], MPoly::one(pres.aprime_gens.len()));
    let comp = pres.component_module(&v).unwrap();
    comp.check().unwrap();
    assert_eq!(comp.rank(), 1);
    let _ = qi(0);
}
