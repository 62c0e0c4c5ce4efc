use std::f64::consts::{PI, TAU};

use dec_ym::boundary::{
    gauge_fix_coclosed, holonomy, homology_generators, large_gauge_orbit, trace_solution, BoundaryDatum,
    BoundaryTrace, PeriodBasis,
};
use dec_ym::dec::{Cochain, Dec};
use dec_ym::dynamics::theta;
use dec_ym::hodge::{coclosed_defect, harmonic_neumann_basis};
use dec_ym::linalg::RankPolicy;
use dec_ym::mesh::{builtin, HypersurfaceMesh};
use dec_ym::symplectic::{bracket, face_factorization_check, omega};
use dec_ym::ym2d::{constant_datum, regular_loop};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

fn random_datum(rng: &mut ChaCha8Rng, sigma: &HypersurfaceMesh) -> BoundaryDatum {
    let n = sigma.complex().len(1);
    BoundaryDatum::from_values(sigma, random(rng, n), random(rng, n)).unwrap()
}

#[test]
fn interior_gauge_has_zero_datum() {
    let m = builtin::disk(12).unwrap();
    let cx = m.complex();
    let f = DVector::from_fn(cx.len(0), |v, _| if cx.is_boundary(0, v) { 0.0 } else { 1.7 });
    let eta = Cochain::new(cx, 1, cx.coboundary(0, &f)).unwrap();
    let (_, d) = trace_solution(&m, &eta, None, 1e-9).unwrap();
    assert!(d.phi.values().iter().all(|&x| x == 0.0));
    assert!(d.phi_dot.values().amax() <= 1e-15);
}

#[test]
fn harmonic_field_has_no_normal_derivative() {
    let m = builtin::ann8().unwrap();
    let dec = Dec::region(&m);
    let h = harmonic_neumann_basis(&m, 1).unwrap().column(&dec, 0).unwrap();
    let (sigma, d) = trace_solution(&m, &h, None, 1e-9).unwrap();
    assert!(d.phi_dot.values().amax() <= 1e-12 * h.values().amax());
    for (i, &e) in sigma.simplex_map(1).iter().enumerate() {
        assert_eq!(d.phi.values()[i], h.values()[e]);
    }
    let (inner, di) = trace_solution(&m, &h, Some("inner"), 1e-9).unwrap();
    assert_eq!(di.phi.values().len(), inner.complex().len(1));
}

#[test]
fn non_solutions_are_refused() {
    let m = builtin::disk(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let eta = Cochain::new(m.complex(), 1, random(&mut rng, m.complex().len(1))).unwrap();
    assert!(trace_solution(&m, &eta, None, 1e-9).is_err());
}

#[test]
fn coclosed_gauge_fixing() {
    let m = builtin::square(3).unwrap();
    let sigma = m.boundary_complex().unwrap();
    let dec = Dec::hypersurface(&sigma);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let raw = random_datum(&mut rng, &sigma);
    let once = gauge_fix_coclosed(&sigma, &raw).unwrap();
    let twice = gauge_fix_coclosed(&sigma, &once).unwrap();
    let scale = once.stacked().amax();
    assert!((twice.stacked() - once.stacked()).amax() <= 1e-10 * scale);
    assert!(coclosed_defect(&once.phi, &dec).unwrap() <= 1e-10);

    let g = random(&mut rng, sigma.complex().len(0));
    let exact = BoundaryDatum::from_values(&sigma, dec.d_values(0, &g), DVector::zeros(sigma.complex().len(1))).unwrap();
    let fixed = gauge_fix_coclosed(&sigma, &exact).unwrap();
    assert!(fixed.phi.values().amax() <= 1e-12 * exact.phi.values().amax());
    let again = gauge_fix_coclosed(&sigma, &once).unwrap();
    assert!((again.stacked() - once.stacked()).amax() <= 1e-12 * scale);
}

#[test]
fn holonomy_on_a_loop() {
    let sigma = regular_loop(10, TAU).unwrap();
    let gens = homology_generators(sigma.complex());
    assert_eq!(gens.len(), 1);
    let phi = constant_datum(&sigma, 0.5, 0.0).unwrap().phi;
    let h = holonomy(sigma.complex(), &phi, &gens[0]).unwrap();
    assert!((h.integral.abs() - PI).abs() <= 1e-12);

    let f = DVector::from_fn(sigma.complex().len(0), |i, _| (1.0 + i as f64).ln());
    let exact = Cochain::new(sigma.complex(), 1, sigma.complex().coboundary(0, &f)).unwrap();
    let h = holonomy(sigma.complex(), &exact, &gens[0]).unwrap();
    assert!(h.integral.abs() <= 1e-15 * f.amax());
}

#[test]
fn large_gauge_windings_on_ann8() {
    let m = builtin::ann8().unwrap();
    let sigma = m.boundary_complex().unwrap();
    let dec = Dec::hypersurface(&sigma);
    let periods = PeriodBasis::new(&dec, RankPolicy::default()).unwrap();
    assert_eq!(periods.rank(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let datum = random_datum(&mut rng, &sigma);

    let same = large_gauge_orbit(&sigma, &datum, &periods, &[0, 0]).unwrap();
    assert_eq!(same, datum);

    let moved = large_gauge_orbit(&sigma, &datum, &periods, &[1, 0]).unwrap();
    let g = &periods.generators[0];
    let h0 = holonomy(sigma.complex(), &datum.phi, g).unwrap();
    let h1 = holonomy(sigma.complex(), &moved.phi, g).unwrap();
    assert!((h1.integral - h0.integral - TAU).abs() <= 1e-12);
    assert!(dec_ym::boundary::circle_distance(h0.circle, h1.circle) <= 1e-12);
    assert_eq!(moved.phi_dot, datum.phi_dot);

    let a = large_gauge_orbit(&sigma, &datum, &periods, &[2, -1]).unwrap();
    let ab = large_gauge_orbit(&sigma, &a, &periods, &[-3, 4]).unwrap();
    let direct = large_gauge_orbit(&sigma, &datum, &periods, &[-1, 3]).unwrap();
    assert!((ab.stacked() - direct.stacked()).amax() <= 1e-12);
    assert!(large_gauge_orbit(&sigma, &datum, &periods, &[1]).is_err());
}

#[test]
fn omega_and_bracket_on_constant_loop_data() {
    let sigma = regular_loop(8, TAU).unwrap();
    let a = constant_datum(&sigma, 1.0, 0.0).unwrap();
    let b = constant_datum(&sigma, 0.0, 1.0).unwrap();
    assert!((omega(&sigma, &a, &b).unwrap() - PI).abs() <= 1e-12);
    assert!((bracket(&sigma, &a, &b).unwrap() - TAU).abs() <= 1e-12);
    assert_eq!(omega(&sigma, &a, &a).unwrap(), 0.0);
    let rev = sigma.reversed();
    assert_eq!(omega(&rev, &a, &b).unwrap(), -omega(&sigma, &a, &b).unwrap());

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = sigma.complex().len(1);
    let p = BoundaryDatum::from_values(&sigma, random(&mut rng, n), DVector::zeros(n)).unwrap();
    let q = BoundaryDatum::from_values(&sigma, random(&mut rng, n), DVector::zeros(n)).unwrap();
    assert_eq!(bracket(&sigma, &p, &q).unwrap(), 0.0);
}

#[test]
fn omega_is_antisymmetric_and_bilinear() {
    let m = builtin::cube(1).unwrap();
    let sigma = m.boundary_complex().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let (a, b, c) = (random_datum(&mut rng, &sigma), random_datum(&mut rng, &sigma), random_datum(&mut rng, &sigma));
        let w = |x: &BoundaryDatum, y: &BoundaryDatum| omega(&sigma, x, y).unwrap();
        assert_eq!(w(&a, &a), 0.0);
        assert!((w(&a, &b) + w(&b, &a)).abs() <= 1e-14);
        let s = 0.37;
        let comb = BoundaryDatum::from_stacked(&sigma, &(a.stacked() * s + b.stacked())).unwrap();
        assert!((w(&comb, &c) - s * w(&a, &c) - w(&b, &c)).abs() <= 1e-13);
    }
}

#[test]
fn bracket_splits_over_labelled_faces() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (spec, faces) in [("ann8", 2), ("square:N=3", 4), ("disk", 1)] {
        let m = builtin::parse_builtin(spec).unwrap();
        let sigma = m.boundary_complex().unwrap();
        let a = random_datum(&mut rng, &sigma);
        let b = random_datum(&mut rng, &sigma);
        let r = face_factorization_check(&sigma, m.complex(), &a, &b).unwrap();
        assert_eq!(r.faces.len(), faces);
        assert!(r.relative <= 1e-12, "{spec}");
        if faces == 1 {
            assert_eq!(r.residual, 0.0);
        }
    }
}

#[test]
fn potential_vanishes_on_interior_variations_and_is_linear() {
    let m = builtin::disk(10).unwrap();
    let cx = m.complex();
    let trace = BoundaryTrace::new(&m).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let eta = random(&mut rng, cx.len(1));
    let interior = DVector::from_fn(cx.len(1), |e, _| if cx.is_boundary(1, e) { 0.0 } else { rng.gen_range(-1.0..1.0) });
    assert_eq!(theta(&trace, &eta, &interior), 0.0);
    let x = random(&mut rng, cx.len(1));
    let y = random(&mut rng, cx.len(1));
    let lhs = theta(&trace, &eta, &(&x * 2.0 - &y * 0.5));
    let rhs = 2.0 * theta(&trace, &eta, &x) - 0.5 * theta(&trace, &eta, &y);
    assert!((lhs - rhs).abs() <= 1e-13 * (lhs.abs() + rhs.abs() + 1.0));
}
