use blockcalc::qlin::{qi, QMat};
use blockcalc::rootdata::*;

#[test]
fn root_counts() {
    for (ty, count, order) in [("A1", 2, 2), ("A2", 6, 6), ("B2", 8, 8), ("G2", 12, 12)] {
        let rd = build_root_system(cartan_of_type(ty).unwrap()).unwrap();
        assert_eq!(rd.roots.len(), count, "{ty} roots");
        let w = WeylGroup::from_root_datum(&rd).unwrap();
        assert_eq!(w.order(), order, "{ty} order");
    }
    let rd = build_root_system(cartan_of_type("A1xA1").unwrap()).unwrap();
    assert_eq!(rd.roots.len(), 4);
}

#[test]
fn longest_element_and_words() {
    let rd = build_root_system(cartan_of_type("B2").unwrap()).unwrap();
    let w = WeylGroup::from_root_datum(&rd).unwrap();
    assert_eq!(w.length(w.longest), 4);
    // Words are reduced by construction.
    for e in 0..w.order() {
        assert!(w.is_reduced(&w.words[e]));
        assert_eq!(w.word_to_element(&w.words[e]), e);
    }
    // s0 s1 s0 s1 = s1 s0 s1 s0 = longest.
    assert_eq!(w.word_to_element(&[0, 1, 0, 1]), w.longest);
    assert_eq!(w.word_to_element(&[1, 0, 1, 0]), w.longest);
}

#[test]
fn rejects_non_cartan() {
    assert!(cartan_of_type("Z9").is_err());
    // Affine A1 matrix is not of finite type.
    let bad = vec![vec![2, -2], vec![-2, 2]];
    assert!(build_root_system(bad).is_err());
}

#[test]
fn theta_fixed_subgroups() {
    let rd = build_root_system(cartan_of_type("A1xA1").unwrap()).unwrap();
    let w = WeylGroup::from_root_datum(&rd).unwrap();
    // θ = -identity is central: fixes everything.
    let theta = Involution::new(QMat::identity(2).scale(&qi(-1))).unwrap();
    assert_eq!(fixed_subgroup(&w, &theta).unwrap().len(), 4);
    // θ = swap of the two factors: fixed subgroup is the diagonal {e, s0s1}.
    let swap = Involution::new(QMat::from_i64(&[vec![0, 1], vec![1, 0]])).unwrap();
    assert_eq!(fixed_subgroup(&w, &swap).unwrap().len(), 2);
}

#[test]
fn invariant_degrees_free_cases() {
    for (ty, degs) in [
        ("A1", vec![2]),
        ("A2", vec![2, 3]),
        ("B2", vec![2, 4]),
        ("G2", vec![2, 6]),
        ("A1xA1", vec![2, 2]),
    ] {
        let rd = build_root_system(cartan_of_type(ty).unwrap()).unwrap();
        let w = WeylGroup::from_root_datum(&rd).unwrap();
        match invariant_degrees(&w.elements).unwrap() {
            InvariantDegrees::Free(mut d) => {
                d.sort_unstable();
                assert_eq!(d, degs, "{ty}");
            }
            InvariantDegrees::NonFree(_) => panic!("{ty}: reflection group must be free"),
        }
    }
}

#[test]
fn molien_series_of_trivial_group() {
    let g = vec![QMat::identity(2)];
    let m = molien_series(&g, 5).unwrap();
    // 1/(1-t)^2 = 1 + 2t + 3t^2 + ...
    let want: Vec<_> = [1, 2, 3, 4, 5, 6].iter().map(|&n| qi(n)).collect();
    assert_eq!(m, want);
}

#[test]
fn invariant_basis_reynolds() {
    // W(A1) acting on its reflection line: invariants in degree 2, not 1.
    let rd = build_root_system(cartan_of_type("A1").unwrap()).unwrap();
    let w = WeylGroup::from_root_datum(&rd).unwrap();
    let basis = invariant_basis_by_degree(&w.elements, 2).unwrap();
    assert_eq!(basis[0].len(), 1);
    assert_eq!(basis[1].len(), 0);
    assert_eq!(basis[2].len(), 1);
}
