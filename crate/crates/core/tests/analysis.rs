use qrlab::analysis::{
    equidistribution_report, fast_growth_check, growth_function, monomial_representation, reverse_holder_estimate,
    signed_check, torus_signed_representation, BallFamily, Sign,
};
use qrlab::sampling::SampleSpec;
use qrlab::{Covector, CurveMap, FormField, QuadratureSpec, TargetManifold, TorusLinearCurve};
use std::f64::consts::PI;

const RADII: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];

#[test]
fn growth_is_monotone_for_nonnegative_densities() {
    let e2 = TargetManifold::Euclidean(2);
    let spec = QuadratureSpec::default();
    let omega = FormField::parse(e2, 2, "2 dx1^dx2 + sin@1 dx1^dx2 + 0.5 cos@2:3 dx1^dx2", false, None).unwrap();
    let rep = growth_function(&CurveMap::identity(2).unwrap(), &omega, &RADII, 1.0, &spec).unwrap();
    assert!(rep.monotone);
    let f = TorusLinearCurve::from_floats(&[0.25, 2f64.sqrt()]).unwrap();
    let rep = growth_function(f.curve_ref(), &f.standard_form(), &RADII, 1.0, &spec).unwrap();
    assert!(rep.monotone);
}

/// An empirical constant over concentric balls feeds the growth chain.
#[test]
fn reverse_holder_constant_implies_fast_growth() {
    let spec = QuadratureSpec::default();
    let e2 = TargetManifold::Euclidean(2);
    let vol = FormField::constant(e2, &Covector::volume(2)).unwrap();
    let f = TorusLinearCurve::from_floats(&[1.0, 1.0]).unwrap();
    let cases = [(CurveMap::identity(2).unwrap(), vol), (f.curve(), f.standard_form())];
    let family = BallFamily::Concentric { dim: 2, radii: RADII.to_vec() };
    for (curve, omega) in &cases {
        for p in [1.5, 2.0, 3.0] {
            let rh = reverse_holder_estimate(curve, omega, &family, p, &spec).unwrap();
            let c_hat = rh.c_hat.unwrap();
            let (eps, _) = qrlab::analysis::epsilon_and_constant(2, p, c_hat).unwrap();
            let growth = growth_function(curve, omega, &RADII, eps, &spec).unwrap();
            let v = fast_growth_check(curve, omega, &growth, c_hat, p, 1.0, &spec).unwrap();
            assert!(v.pass, "p={p}: {v:?}");
        }
    }
}

#[test]
fn accepted_representations_reconstruct_their_forms() {
    for m in 2..=5 {
        let t = TargetManifold::FlatTorus(m);
        let vol = FormField::constant(t, &Covector::volume(m)).unwrap();
        for l in 1..m {
            let rep = torus_signed_representation(l, t, None).unwrap();
            assert!(rep.reconstruction_error(&vol, 1000, 4).unwrap() <= 1e-8);
        }
    }
    let e4 = TargetManifold::Euclidean(4);
    let omega = FormField::constant(e4, &Covector::parse("dx1^dx2 - 3 dx2^dx4 + 0.5 dx3^dx4", 4).unwrap()).unwrap();
    let rep = monomial_representation(&omega).unwrap();
    assert!(rep.reconstruction_error(&omega, 1000, 4).unwrap() <= 1e-8);
}

#[test]
fn torus_curves_are_never_mixed() {
    let slopes = [[0.5, 1.0 / 3.0], [1.0, 1.0], [2f64.sqrt(), 3f64.sqrt()], [-0.7, 5f64.sqrt()], [0.0, 0.0]];
    for y in slopes {
        let f = TorusLinearCurve::from_floats(&y).unwrap();
        let rep = monomial_representation(&f.standard_form()).unwrap();
        let v = signed_check(&rep, f.curve_ref(), &SampleSpec::uniform_box(2, -20.0, 20.0, 500, 8)).unwrap();
        assert!(v.signed && v.terms.iter().all(|t| t.sign == Sign::Nonnegative), "{y:?}");
    }
}

#[test]
fn equidistribution_envelope_shrinks() {
    let f = TorusLinearCurve::from_floats(&[2f64.sqrt(), 3f64.sqrt()]).unwrap();
    let spec = QuadratureSpec::tensor(128, 512);
    let catalog = [
        format!("{} sin@3 dx1", 1.0 / (2.0 * PI)),
        "0.2 cos@3 dx2 + 0.1 sin@1 dx1".to_string(),
        "0.05 sin@3:2 dx1 - 0.05 cos@2 dx3".to_string(),
    ];
    for lit in &catalog {
        let tau = FormField::parse(f.target(), 1, lit, false, None).unwrap();
        let rep = equidistribution_report(f.curve_ref(), &f.standard_form(), &tau, &[2.0, 4.0, 8.0, 16.0], None, &spec).unwrap();
        assert!(rep.stokes_ok, "{lit}");
        let env: Vec<f64> = rep.envelope.iter().map(|e| e.unwrap()).collect();
        assert!(env.windows(2).all(|w| w[1] <= w[0]), "{lit}");
        assert!(env.last().unwrap() < &0.05, "{lit}: {env:?}");
    }
}
