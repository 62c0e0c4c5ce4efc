use std::f64::consts::TAU;

use dec_ym::axioms::{corrupted_star, potential_identities, verify_axioms, AxiomOptions, AxiomStatus};
use dec_ym::boundary::{circle_distance, BoundaryDatum, BoundaryTrace};
use dec_ym::dec::Cochain;
use dec_ym::dynamics::{action, action_values, extend, gluing_check, solution_space, verify_lagrangian};
use dec_ym::hodge::harmonic_neumann_basis;
use dec_ym::linalg::RankPolicy;
use dec_ym::mesh::{builtin, RegionMesh};
use dec_ym::ym2d::{
    constant_datum, curvature_constant, holonomy_quotient, lagrangian_line_check, loop_integral, reduced_form_check,
    regular_loop, wind, Reduced2dDatum,
};
use dec_ym::{Error, Tolerances};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Edge integrals of `x dy - y dx`, whose exterior derivative is twice the
/// area form.
fn rotation_field(m: &RegionMesh) -> Cochain {
    let cx = m.complex();
    let p = cx.points();
    let v = DVector::from_fn(cx.len(1), |e, _| {
        let s = cx.simplex(1, e);
        let (a, b) = (p[s[0]], p[s[1]]);
        a[0] * b[1] - a[1] * b[0]
    });
    Cochain::new(cx, 1, v).unwrap()
}

#[test]
fn tri1_solution_dimensions() {
    let m = builtin::tri1().unwrap();
    let s = solution_space(&m, RankPolicy::default()).unwrap();
    assert_eq!(s.dim(), 3);
    assert_eq!(s.exact_dim, 2);
    assert_eq!(s.gauge_fixed_basis.dim(), 1);
}

#[test]
fn disk_data_determine_gauge_fixed_solutions() {
    let r = verify_lagrangian(&builtin::disk(16).unwrap(), &Tolerances::default()).unwrap();
    assert_eq!(r.dims.restriction_kernel, 0);
    assert_eq!(r.dims.image, r.dims.gauge_fixed_solutions);
    assert!(r.passed && r.lagrangian.lagrangian);
}

#[test]
fn lagrangian_on_annulus_and_tetrahedron() {
    let tol = Tolerances::default();
    let ann = verify_lagrangian(&builtin::ann8().unwrap(), &tol).unwrap();
    assert!(ann.passed);
    assert_eq!(ann.dims.harmonic_neumann, 1);
    assert_eq!(2 * ann.dims.image, ann.dims.boundary_phase_space);
    let tet = verify_lagrangian(&builtin::tetrahedron().unwrap(), &tol).unwrap();
    assert!(tet.passed);
}

#[test]
fn empty_boundary_has_zero_image() {
    let r = verify_lagrangian(&builtin::torus_surface(4, 4).unwrap(), &Tolerances::default()).unwrap();
    assert_eq!(r.dims.boundary_phase_space, 0);
    assert_eq!(r.dims.image, 0);
    assert_eq!(r.dims.gauge_fixed_solutions, 2);
    assert!(r.passed);
}

#[test]
fn action_values_from_curvature() {
    let m = builtin::disk(12).unwrap();
    let cx = m.complex();
    let f = DVector::from_fn(cx.len(0), |i, _| (i as f64 * 0.3).cos());
    let exact = Cochain::new(cx, 1, cx.coboundary(0, &f)).unwrap();
    assert!(action(&m, &exact).unwrap() <= 1e-28);

    let eta = rotation_field(&m);
    let c = curvature_constant(&m, &eta, 1e-12).unwrap();
    assert!((c.c_dot.abs() - 2.0).abs() <= 1e-12);
    assert!(c.max_deviation <= 1e-12);
    let s = action(&m, &eta).unwrap();
    assert!((s - 4.0 * m.volume()).abs() <= 1e-12 * s);

    // Stokes: the boundary integral equals c_dot times the area
    let sigma = m.boundary_complex().unwrap();
    let phi = DVector::from_iterator(sigma.simplex_map(1).len(), sigma.simplex_map(1).iter().map(|&e| eta.values()[e]));
    assert!((loop_integral(&sigma, &phi) - c.c_dot * m.volume()).abs() <= 1e-12);

    let twice = m.disjoint_union(&m).unwrap();
    let doubled = DVector::from_iterator(2 * cx.len(1), eta.values().iter().chain(eta.values().iter()).copied());
    assert!((action_values(&twice, &doubled) - 2.0 * s).abs() <= 1e-12 * s);
}

#[test]
fn extension_round_trip() {
    let tol = Tolerances::default();
    let m = builtin::square(3).unwrap();
    let trace = BoundaryTrace::new(&m).unwrap();
    let s = solution_space(&m, RankPolicy::default()).unwrap();
    let eta = s.basis.columns() * DVector::from_fn(s.dim(), |i, _| 1.0 / (1.0 + i as f64));
    let datum = trace.trace_values(&eta).unwrap();
    let ext = extend(&m, &datum, &tol).unwrap();
    assert!(ext.round_trip <= 1e-8);
    let back = trace.trace_values(ext.eta.values()).unwrap();
    assert!((back.stacked() - datum.stacked()).amax() <= 1e-8 * datum.stacked().amax());

    let zero = BoundaryDatum::zeros(trace.sigma()).unwrap();
    let ext = extend(&m, &zero, &tol).unwrap();
    assert!(ext.eta.values().amax() <= 1e-14);
}

#[test]
fn hexagon_line_of_extendable_data() {
    let tol = Tolerances::default();
    let m = builtin::disk(6).unwrap();
    let sigma = m.boundary_complex().unwrap();
    let slope = 6.0 / (1.5 * 3f64.sqrt());
    let on_line = constant_datum(&sigma, 1.0, slope).unwrap();
    extend(&m, &on_line, &tol).unwrap();
    let off_line = constant_datum(&sigma, 1.0, 1.0).unwrap();
    assert!(matches!(extend(&m, &off_line, &tol), Err(Error::NotExtendable { .. })));

    let r = lagrangian_line_check(&m, &tol).unwrap();
    assert!((r.slope - slope).abs() <= 1e-12 * slope);
    assert!(r.passed);
    for s in &r.samples {
        if s.datum.c == 0.0 {
            assert_eq!(s.datum.c_dot, 0.0);
        }
    }
    let origin = constant_datum(&sigma, 0.0, 0.0).unwrap();
    extend(&m, &origin, &tol).unwrap();
}

#[test]
fn fine_disk_slope_approaches_two() {
    let r = lagrangian_line_check(&builtin::disk(64).unwrap(), &Tolerances::default()).unwrap();
    assert!((r.slope - 2.0).abs() < 1e-2, "slope {}", r.slope);
}

#[test]
fn reduced_form_scaling_and_degeneracy() {
    let l = regular_loop(12, TAU).unwrap();
    let r = reduced_form_check(&l, (1.0, 0.0), (0.0, 1.0)).unwrap();
    assert!((r.omega - TAU / 2.0).abs() <= 1e-12);
    assert!(r.kappa_discrepancy);
    let d = reduced_form_check(&l, (0.4, 1.1), (0.4, 1.1)).unwrap();
    assert_eq!(d.omega, 0.0);
    assert!(d.kappa.is_none());
    let long = regular_loop(12, 3.0 * TAU).unwrap();
    let r3 = reduced_form_check(&long, (1.0, 0.0), (0.0, 1.0)).unwrap();
    assert!((r3.omega - 3.0 * r.omega).abs() <= 1e-12);
}

#[test]
fn cylinder_coordinates() {
    let zero = Reduced2dDatum { c: 0.0, c_dot: 1.5, length: TAU };
    assert_eq!(holonomy_quotient(&zero).angle, 0.0);
    let one = Reduced2dDatum { c: 1.0, c_dot: 0.2, length: TAU };
    let p1 = holonomy_quotient(&one);
    // on a loop of length 2 pi the angle is c L mod 2 pi, so integer c coincide
    let two = Reduced2dDatum { c: 2.0, ..one };
    assert!(circle_distance(p1.angle, holonomy_quotient(&two).angle) <= 1e-12);
    let half = Reduced2dDatum { c: 1.5, ..one };
    assert!(circle_distance(p1.angle, holonomy_quotient(&half).angle) > 3.0);
    let w = wind(&one, 1);
    assert!((w.c - 2.0).abs() <= 1e-15);
    let pw = holonomy_quotient(&w);
    assert!(circle_distance(p1.angle, pw.angle) <= 1e-12);
    assert_eq!(pw.fiber, p1.fiber);
}

#[test]
fn gluing_reports() {
    let tol = Tolerances::default();
    let m = builtin::two_squares(1).unwrap();
    let (r, glued) = gluing_check(&m, "seam_a", "seam_b", &builtin::two_squares_matching(1), &tol).unwrap();
    assert_eq!(r.equalizer_dim, r.glued_solutions);
    assert_eq!(glued.complex().len(2), 4);
    assert!(r.passed);

    let strip = builtin::strip(6).unwrap();
    let (r, glued) = gluing_check(&strip, "start", "end", &builtin::strip_matching(6), &tol).unwrap();
    assert_eq!((r.betti_1_before, r.betti_1_after), (0, 1));
    assert_eq!(harmonic_neumann_basis(&glued, 1).unwrap().dim(), 1);
    assert_eq!(r.harmonic_before, 0);
    assert!(r.passed);

    assert!(gluing_check(&strip, "end", "end", &builtin::strip_matching(6), &tol).is_err());
}

#[test]
fn axioms_on_a_closed_surface() {
    let m = builtin::sphere().unwrap();
    let r = verify_axioms(&m, &Tolerances::default(), &AxiomOptions::default()).unwrap();
    let a9 = r.axioms.iter().find(|a| a.id == "A9").unwrap();
    assert_eq!(a9.status, AxiomStatus::Pass);
    assert!(a9.detail.as_deref().unwrap_or_default().contains("empty boundary"));
    assert!(r.passed);
}

#[test]
fn axiom_report_is_deterministic() {
    let m = builtin::ann8().unwrap();
    let opts = AxiomOptions { seed: 99, ..AxiomOptions::default() };
    let a = serde_json::to_string(&verify_axioms(&m, &Tolerances::default(), &opts).unwrap()).unwrap();
    let b = serde_json::to_string(&verify_axioms(&m, &Tolerances::default(), &opts).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(a.contains("\"seed\":99"));
    let c = verify_axioms(&m, &Tolerances::default(), &AxiomOptions { seed: 100, ..opts }).unwrap();
    assert!(c.passed);
}

#[test]
fn corrupted_star_fails_the_potential_identity() {
    let tol = Tolerances::default();
    for spec in ["disk", "square:N=3", "cube"] {
        let m = builtin::parse_builtin(spec).unwrap();
        let bad = corrupted_star(&m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let checks = potential_identities(&bad, &m, &tol, &mut rng, 4).unwrap();
        assert!(!checks["action_potential_identity"].passed, "{spec}");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let good = potential_identities(&m, &m, &tol, &mut rng, 4).unwrap();
        assert!(good.values().all(|c| c.passed), "{spec}");
    }
    // every 2-cell of a single tetrahedron has only boundary edges
    assert!(corrupted_star(&builtin::tetrahedron().unwrap()).is_none());
}
