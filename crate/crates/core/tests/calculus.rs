use std::f64::consts::TAU;

use dec_ym::boundary::{holonomy, homology_generators};
use dec_ym::dec::{Cochain, Dec};
use dec_ym::hodge::{
    betti_oracle, coclosed_decompose, harmonic_dirichlet_basis, harmonic_neumann_basis, relative_betti_oracle,
    HmfSolver,
};
use dec_ym::linalg::RankPolicy;
use dec_ym::mesh::{builtin, HypersurfaceMesh};
use dec_ym::ym2d::{constant_datum, regular_loop};
use dec_ym::Error;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn loop_constant(sigma: &HypersurfaceMesh, c: f64) -> Cochain {
    constant_datum(sigma, c, 0.0).unwrap().phi
}

#[test]
fn zero_and_constant_inputs() {
    let m = builtin::tri1().unwrap();
    let dec = Dec::region(&m);
    let cx = m.complex();
    let one = Cochain::from_slice(cx, 0, &[1.0, 1.0, 1.0]).unwrap();
    assert!(dec.d(&one).unwrap().values().iter().all(|&x| x == 0.0));
    let zero = Cochain::zeros(cx, 1).unwrap();
    assert!(dec.star(&zero).unwrap().values().iter().all(|&x| x == 0.0));
    assert!(dec.codifferential(&zero).unwrap().values().iter().all(|&x| x == 0.0));
    let z0 = Cochain::zeros(cx, 0).unwrap();
    assert_eq!(dec.adjointness_defect(&z0, &zero).unwrap().relative(), 0.0);
}

#[test]
fn unit_face_stars_to_inverse_area() {
    let m = builtin::tri1().unwrap();
    let dec = Dec::region(&m);
    let face = Cochain::from_slice(m.complex(), 2, &[1.0]).unwrap();
    let s = dec.star(&face).unwrap();
    assert!((s.values()[0] - 2.0).abs() < 1e-14);
    let back = dec.unstar(&s).unwrap();
    assert_eq!(back.values(), face.values());
}

#[test]
fn d_squared_is_zero_on_every_builtin() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in builtin::BUILTIN_NAMES {
        let m = builtin::parse_builtin(name).unwrap();
        let dec = Dec::region(&m);
        let cx = m.complex();
        for k in 0..m.dim().saturating_sub(1) {
            let f = DVector::from_fn(cx.len(k), |_, _| rng.gen_range(-1.0..1.0));
            let dd = dec.d_values(k + 1, &dec.d_values(k, &f));
            assert!(dd.amax() <= 1e-15, "{name} degree {k}");
        }
    }
}

#[test]
fn loop_of_length_two_pi_norm_and_codifferential() {
    let sigma = regular_loop(16, TAU).unwrap();
    let dec = Dec::hypersurface(&sigma);
    let c = 0.7;
    let phi = loop_constant(&sigma, c);
    let norm2 = dec.inner_product(&phi, &phi).unwrap();
    assert!((norm2 - TAU * c * c).abs() < 1e-12);
    let cod = dec.codifferential(&phi).unwrap();
    assert!(cod.values().amax() < 1e-13);
}

#[test]
fn closed_complex_has_no_boundary_term() {
    let m = builtin::sphere().unwrap();
    let dec = Dec::region(&m);
    let cx = m.complex();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let f = Cochain::new(cx, 0, DVector::from_fn(cx.len(0), |_, _| rng.gen_range(-1.0..1.0))).unwrap();
        let a = Cochain::new(cx, 1, DVector::from_fn(cx.len(1), |_, _| rng.gen_range(-1.0..1.0))).unwrap();
        let d = dec.adjointness_defect(&f, &a).unwrap();
        assert!(d.relative() <= 1e-13);
        assert!(dec.neumann_trace(&a).unwrap().values().iter().all(|&x| x == 0.0));
    }
}

#[test]
fn betti_oracles() {
    assert_eq!(betti_oracle(builtin::disk(16).unwrap().complex(), 1), 0);
    assert_eq!(betti_oracle(builtin::ann8().unwrap().complex(), 1), 1);
    let two = builtin::two_annuli(8).unwrap();
    assert_eq!(betti_oracle(two.complex(), 0), 2);
    assert_eq!(betti_oracle(two.complex(), 1), 2);
    assert_eq!(betti_oracle(builtin::solid_torus(6).unwrap().complex(), 1), 1);
    assert_eq!(betti_oracle(builtin::sphere().unwrap().complex(), 1), 0);
    assert_eq!(betti_oracle(builtin::sphere().unwrap().complex(), 2), 1);
}

#[test]
fn dirichlet_fields_follow_relative_homology() {
    for spec in ["disk", "ann8", "square", "two-annuli", "tetrahedron"] {
        let m = builtin::parse_builtin(spec).unwrap();
        let dec = Dec::region(&m);
        for k in 0..=m.dim() {
            let h = harmonic_dirichlet_basis(&m, k).unwrap();
            assert_eq!(h.dim(), relative_betti_oracle(m.complex(), k), "{spec} degree {k}");
            assert!(h.max_residual(&dec).unwrap() <= 1e-9);
        }
    }
    // the 2-disk: relative H_1 vanishes, relative H_2 is one-dimensional
    let disk = builtin::disk(8).unwrap();
    assert_eq!(relative_betti_oracle(disk.complex(), 1), 0);
    assert_eq!(relative_betti_oracle(disk.complex(), 2), 1);
}

/// Ambient signed edge list of a cycle given on a hypersurface.
fn to_ambient(sigma: &HypersurfaceMesh, cycle: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let vm = sigma.vertex_map();
    let em = sigma.simplex_map(1);
    cycle
        .iter()
        .map(|&(e, c)| {
            let s = sigma.complex().simplex(1, e);
            let sign = if vm[s[0]] < vm[s[1]] { 1 } else { -1 };
            (em[e], c * sign)
        })
        .collect()
}

#[test]
fn ann8_harmonic_field_circulates_around_the_hole() {
    let m = builtin::ann8().unwrap();
    let dec = Dec::region(&m);
    let h = harmonic_neumann_basis(&m, 1).unwrap();
    assert_eq!(h.dim(), 1);
    assert!(h.max_residual(&dec).unwrap() <= 1e-9);
    let alpha = h.column(&dec, 0).unwrap();
    let gens = homology_generators(m.complex());
    assert_eq!(gens.len(), 1);
    let around = holonomy(m.complex(), &alpha, &gens[0]).unwrap().integral;
    assert!(around.abs() > 1e-3);

    let sigma = m.boundary_complex().unwrap();
    let loops: Vec<f64> = homology_generators(sigma.complex())
        .iter()
        .map(|c| holonomy(m.complex(), &alpha, &to_ambient(&sigma, c)).unwrap().integral)
        .collect();
    assert_eq!(loops.len(), 2);
    assert!((loops[0].abs() - loops[1].abs()).abs() <= 1e-12);
    assert!((loops[0].abs() - around.abs()).abs() <= 1e-12);
}

#[test]
fn decomposition_fixes_its_own_summands() {
    let m = builtin::ann8().unwrap();
    let dec = Dec::region(&m);
    let solver = HmfSolver::for_region(&m, 1).unwrap();
    let h = harmonic_neumann_basis(&m, 1).unwrap().column(&dec, 0).unwrap();
    let parts = solver.decompose(&h).unwrap();
    let scale = h.values().amax();
    assert!((parts.harmonic_neumann.values() - h.values()).amax() <= 1e-10 * scale);
    for c in [&parts.exact_dirichlet, &parts.coexact_neumann, &parts.harmonic_exact] {
        assert!(c.values().amax() <= 1e-10 * scale);
    }
    let dims = solver.dimensions();
    assert_eq!(
        dims.exact_dirichlet + dims.coexact_neumann + dims.harmonic_neumann + dims.harmonic_exact,
        dims.cochain_dim
    );
}

#[test]
fn coclosed_split_on_loops_and_tori() {
    let policy = RankPolicy::default();
    let sigma = regular_loop(12, TAU).unwrap();
    let dec = Dec::hypersurface(&sigma);
    let phi = loop_constant(&sigma, 1.3);
    let (h, rest) = coclosed_decompose(&phi, &dec, 1e-10, policy).unwrap();
    assert!((h.values() - phi.values()).amax() <= 1e-12);
    assert!(rest.values().amax() <= 1e-12);

    let torus = builtin::solid_torus(6).unwrap().boundary_complex().unwrap();
    let tdec = Dec::hypersurface(&torus);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let beta = Cochain::new(
        torus.complex(),
        2,
        DVector::from_fn(torus.complex().len(2), |_, _| rng.gen_range(-1.0..1.0)),
    )
    .unwrap();
    let phi = tdec.adjoint_codifferential(&beta).unwrap();
    let (h, rest) = coclosed_decompose(&phi, &tdec, 1e-10, policy).unwrap();
    assert!(h.values().amax() <= 1e-10 * phi.values().amax());
    assert!((rest.values() - phi.values()).amax() <= 1e-10 * phi.values().amax());

    let f = DVector::from_fn(torus.complex().len(0), |i, _| (i as f64).sin());
    let exact = Cochain::new(torus.complex(), 1, tdec.d_values(0, &f)).unwrap();
    assert!(matches!(
        coclosed_decompose(&exact, &tdec, 1e-10, policy),
        Err(Error::NotCoclosed { .. })
    ));
}
