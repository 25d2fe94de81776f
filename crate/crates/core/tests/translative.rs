mod common;

use common::{random_polytope, rng, unit_square};
use translative::functionals::{mixed_functional, translative_lhs_mc, translative_rhs, Family};
use translative::geom::{AaBox, Polytope, Region, Vec3};

fn covering(p: &Polytope, q: &Polytope) -> (Region, Region) {
    (Region::covering(&[p]), Region::covering(&[q]))
}

#[test]
fn vertex_count_formula_for_squares() {
    let f = Family::skeleton(2).unwrap();
    let s = unit_square();
    let (a, b) = covering(&s, &s);
    let rhs = translative_rhs(&f, 0, &[&s, &s], &[&a, &b]).unwrap();
    assert_eq!(rhs, 16.0);
    let lhs = translative_lhs_mc(&f, 0, &s, &s, &a, &b, 20_000, 1).unwrap();
    assert!(lhs.z_score(rhs).abs() < 3.0, "{lhs:?}");
}

#[test]
fn volume_degree_is_product_of_volumes() {
    let f = Family::skeleton(2).unwrap();
    let s = unit_square();
    let (a, b) = covering(&s, &s);
    let lhs = translative_lhs_mc(&f, 2, &s, &s, &a, &b, 20_000, 2).unwrap();
    assert!(lhs.z_score(1.0).abs() < 3.0, "{lhs:?}");
}

#[test]
fn random_pairs_in_the_plane() {
    let mut r = rng(11);
    for (i, f) in [
        Family::skeleton(2).unwrap(),
        Family::intrinsic_volumes(2).unwrap(),
    ]
    .iter()
    .enumerate()
    {
        for j in 0..=2 {
            let p = random_polytope(2, 7, Vec3::zeros(), &mut r);
            let q = random_polytope(2, 6, Vec3::new(0.3, 0.1, 0.0), &mut r);
            let a = AaBox::new(&[-0.5, -1.5], &[0.7, 1.5]).to_region();
            let b = Region::covering(&[&q]);
            let rhs = translative_rhs(f, j, &[&p, &q], &[&a, &b]).unwrap();
            let lhs = translative_lhs_mc(f, j, &p, &q, &a, &b, 40_000, 100 + i as u64).unwrap();
            assert!(lhs.z_score(rhs).abs() < 4.0, "j={j} rhs={rhs} {lhs:?}");
        }
    }
}

#[test]
fn random_pairs_in_space() {
    let mut r = rng(12);
    for f in [
        Family::skeleton(3).unwrap(),
        Family::intrinsic_volumes(3).unwrap(),
    ] {
        for j in 0..=3 {
            let p = random_polytope(3, 8, Vec3::zeros(), &mut r);
            let q = random_polytope(3, 7, Vec3::new(0.2, -0.1, 0.1), &mut r);
            let a = Region::halfspace(3, Vec3::new(1.0, 0.5, -0.2), 0.3);
            let b = Region::covering(&[&q]);
            let rhs = translative_rhs(&f, j, &[&p, &q], &[&a, &b]).unwrap();
            let lhs = translative_lhs_mc(&f, j, &p, &q, &a, &b, 20_000, 7 + j as u64).unwrap();
            assert!(lhs.z_score(rhs).abs() < 4.0, "j={j} rhs={rhs} {lhs:?}");
        }
    }
}

#[test]
fn mixed_functional_is_symmetric_and_homogeneous() {
    let mut r = rng(5);
    let f = Family::intrinsic_volumes(3).unwrap();
    let p = random_polytope(3, 8, Vec3::zeros(), &mut r);
    let q = random_polytope(3, 8, Vec3::zeros(), &mut r);
    for m in [[1usize, 2], [2, 1], [0, 3]] {
        let a = mixed_functional(&f, 0, &[&p, &q], &m).unwrap().value;
        let b = mixed_functional(&f, 0, &[&q, &p], &[m[1], m[0]]).unwrap().value;
        assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
        let scaled = p.scale(2.0).unwrap();
        let c = mixed_functional(&f, 0, &[&scaled, &q], &m).unwrap().value;
        assert!((c - 2f64.powi(m[0] as i32) * a).abs() < 1e-9 * c.abs().max(1.0));
    }
}
