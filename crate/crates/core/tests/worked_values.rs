use approx::assert_relative_eq;
use num_complex::Complex64;

use conformal_core::atlas::{gauge_shift, lambda_of_sq, point_of_lambda, translate_on_shell};
use conformal_core::cone::rotation_matrix;
use conformal_core::fifth::{l_from_source, solve_constraint, BranchSpec, FifthGrid};
use conformal_core::models::{HiggsParams, Phi4Params, SigmaParams};
use conformal_core::{
    apply, apply_word, attach, classify, conjugate_by_inversion, invert_point, lift, project, Branch, ConformalElement,
    ConformalWord, FourMomentum, Region, ScaleM,
};

fn m(v: f64) -> ScaleM {
    ScaleM::new(v).unwrap()
}

fn q(c: [f64; 4]) -> FourMomentum {
    FourMomentum(c)
}

// Inversion, translation and inversion again, written out by hand.
fn inv(p: FourMomentum, mm: f64) -> FourMomentum {
    p * (-mm * mm / p.minkowski_sq())
}

#[test]
fn inversion_and_translation_by_hand() {
    let r = apply(&ConformalElement::Inversion, &q([2.0, 0.0, 0.0, 0.0]), m(1.0)).unwrap();
    assert_eq!(r[0], -0.5);
    assert_eq!(r.minkowski_sq(), 0.25);
    let t = ConformalElement::Translation { h: q([0.0, 1.0, 0.0, 0.0]) };
    assert_eq!(apply(&t, &q([1.0, 0.0, 0.0, 0.0]), m(1.0)).unwrap(), q([1.0, 1.0, 0.0, 0.0]));
}

#[test]
fn special_conformal_matches_hand_composition() {
    let mm = 1.7;
    let b = q([0.1, -0.2, 0.05, 0.3]);
    for p in [q([1.0, 0.2, 0.1, 0.0]), q([0.3, 1.1, -0.4, 0.2]), q([2.0, 0.0, 0.5, -0.5])] {
        let expected = inv(inv(p, mm) + b, mm);
        let got = apply(&ConformalElement::SpecialConformal { b }, &p, m(mm)).unwrap();
        for i in 0..4 {
            assert_relative_eq!(got[i], expected[i], max_relative = 1e-12, epsilon = 1e-14);
        }
    }
}

#[test]
fn inversion_words() {
    let p = q([3.0, 1.0, 0.0, 0.0]);
    let w = ConformalWord::new(vec![ConformalElement::Inversion, ConformalElement::Inversion]);
    let r = apply_word(&w, &p, m(2.0)).unwrap();
    for i in 0..4 {
        assert_relative_eq!(r[i], p[i], epsilon = 1e-12);
    }
    let h = q([0.1, 0.0, 0.2, 0.0]);
    assert_eq!(
        conjugate_by_inversion(&ConformalElement::Translation { h }),
        ConformalElement::SpecialConformal { b: h }
    );
    assert_eq!(
        conjugate_by_inversion(&ConformalElement::Dilatation { lambda: 0.7 }),
        ConformalElement::Dilatation { lambda: -0.7 }
    );
}

#[test]
fn cone_examples() {
    let k = lift(&q([0.0; 4]), 1.0, m(1.0)).unwrap();
    assert_eq!(&k.0[..4], &[0.0; 4]);
    assert_relative_eq!(k.0[4], 0.5);
    assert_relative_eq!(k.0[5], 0.5);
    let p = q([0.4, 0.1, -0.3, 0.2]);
    let back = project(&lift(&p, 2.5, m(1.3)).unwrap(), m(1.3)).unwrap();
    for i in 0..4 {
        assert_relative_eq!(back[i], p[i], max_relative = 1e-14);
    }
    let g = rotation_matrix(&ConformalElement::Inversion, m(1.0));
    let mut diag = nalgebra::Matrix6::identity();
    diag[(5, 5)] = -1.0;
    assert_eq!(*g.matrix(), diag);
}

#[test]
fn region_table() {
    let one = m(1.0);
    let probes = [
        (0.5, Region::I),
        (2.0, Region::II),
        (-2.0, Region::III),
        (-0.5, Region::IV),
        (0.0, Region::I),
        (1.0, Region::I),
        (-1.0, Region::IV),
    ];
    for (s, r) in probes {
        assert_eq!(classify(s, one), r, "q^2 = {s}");
    }
}

#[test]
fn q5_assignment_and_inversion() {
    let a = attach(&q([0.5, 0.0, 0.0, 0.0]), m(1.0));
    assert_relative_eq!(a.q5() * a.q5(), 0.75, epsilon = 1e-15);
    let b = attach(&q([3f64.sqrt(), 0.0, 0.0, 0.0]), m(1.0));
    assert_relative_eq!(b.q5() * b.q5(), 4.0, epsilon = 1e-14);
    assert_eq!(attach(&q([0.0; 4]), m(1.0)).q5(), 1.0);
    let i = invert_point(&a).unwrap();
    assert_relative_eq!(i.q_sq(), 4.0, epsilon = 1e-14);
    assert_eq!(i.region(), Region::II);
}

#[test]
fn lambda_rows() {
    let row = point_of_lambda(std::f64::consts::LN_2, Region::I, m(1.0)).unwrap();
    assert_eq!((row.q_sq, row.q5_sq), (0.25, 0.75));
    assert_relative_eq!(lambda_of_sq(2.0, m(1.0)).unwrap(), -0.5 * std::f64::consts::LN_2, epsilon = 1e-16);
    assert_eq!(point_of_lambda(0.0, Region::IV, m(1.0)).unwrap().q_sq, -1.0);
}

#[test]
fn shell_moves() {
    let p = attach(&q([0.5, 0.0, 0.0, 0.0]), m(1.0));
    let mv = translate_on_shell(&p, &q([0.25, 0.0, 0.0, 0.0]));
    assert_relative_eq!(mv.point.q_sq(), 9.0 / 16.0, epsilon = 1e-15);
    assert_relative_eq!(mv.q5_sq_on_source_branch, 7.0 / 16.0, epsilon = 1e-15);
    let a = q([0.25, 0.0, 0.0, 0.0]);
    let g = gauge_shift(&p, &a, 2.0);
    assert_eq!(g.point.q_sq(), 0.0);
    assert_eq!(g.point.region(), Region::I);
    assert_eq!(g.point.q5(), 1.0);
}

#[test]
fn eta_values() {
    let one = m(1.0);
    let spec = |b, mass| BranchSpec::new(b, mass, one).unwrap();
    assert_eq!(spec(Branch::Internal, 0.0).eta(), 1.0);
    assert_eq!(spec(Branch::External, 0.0).eta(), 1.0);
    assert_eq!(spec(Branch::Internal, 1.0).eta(), 0.0);
    assert_relative_eq!(spec(Branch::External, 1.0).eta(), 2f64.sqrt());
    assert_relative_eq!(spec(Branch::Internal, 3f64.sqrt()).eta(), 2f64.sqrt(), epsilon = 1e-15);
}

#[test]
fn free_constraint_solution() {
    let spec = BranchSpec::new(Branch::Internal, 0.0, m(1.0)).unwrap();
    let grid = FifthGrid::symmetric(0.0, 10.0, 4000).unwrap();
    let prof = solve_constraint(&spec, Complex64::new(1.0, 0.0), |_, _| Complex64::new(0.0, 0.0), &grid).unwrap();
    for (k, v) in prof.values.iter().enumerate() {
        let x5 = grid.x(k);
        assert!((v - Complex64::new(0.0, -x5).exp()).norm() < 1e-8);
    }
    assert!(l_from_source(Complex64::new(1.0, 0.0), -1.0, &spec).is_err());
}

#[test]
fn model_closed_forms() {
    let p = Phi4Params::with_eta(1.0, 1.0, m(1.0), Branch::Internal);
    let pts = p.stationary_points().unwrap();
    assert!(pts.points.iter().any(|s| (s.location + 1.5).abs() < 1e-10));

    let s = SigmaParams::new(93.0, m(1.0), Branch::External).unwrap();
    assert_relative_eq!(s.pion_mass_sq().unwrap(), 2.0, max_relative = 1e-6);

    let h = HiggsParams::new(1.0, m(2.0), Branch::Internal).unwrap();
    assert_relative_eq!(h.mass_sq().unwrap().mass_sq, 9.0 * 4.0 / 8.0, max_relative = 1e-6);
}
