//! Per-axiom verification suite.
//!
//! Each axiom of the classical gauge theory is mapped to numerical checks on
//! a region: A4 to the potential identities, A5 to orientation reversal, A6 to
//! disjoint unions, A7 to face additivity of the bracket, A8 and A10 to the
//! gauge action, A9 to the Lagrangian embedding and A11/A12 to gluing. A1-A3
//! hold by construction of the linear model.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boundary::{
    circle_distance, holonomy, large_gauge_orbit, BoundaryDatum, BoundaryTrace, GaugeFixer, PeriodBasis,
};
use crate::dec::Dec;
use crate::dynamics::{action_values, gluing_check, solution_space, verify_lagrangian};
use crate::error::Result;
use crate::linalg::RankPolicy;
use crate::mesh::{builtin, HypersurfaceMesh, RegionMesh};
use crate::symplectic::{bracket, bracket_scale, face_factorization_check, omega, theta_on};
use crate::tolerances::Tolerances;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 20140101;
pub const DEFAULT_TRIALS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxiomStatus {
    Pass,
    Fail,
    ByConstruction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    Upper,
    Lower,
}

/// A measured quantity against its gate.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Check {
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl Check {
    pub fn at_most(value: f64, tolerance: f64) -> Self {
        Self {
            value,
            tolerance,
            bound: Bound::Upper,
            passed: value <= tolerance,
        }
    }

    pub fn at_least(value: f64, tolerance: f64) -> Self {
        Self {
            value,
            tolerance,
            bound: Bound::Lower,
            passed: value >= tolerance,
        }
    }

    /// Integer equality, recorded as `|a - b|` with tolerance 0.
    pub fn equal(a: usize, b: usize) -> Self {
        Self::at_most(a.abs_diff(b) as f64, 0.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomResult {
    pub id: String,
    pub title: String,
    pub status: AxiomStatus,
    pub checks: BTreeMap<String, Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl AxiomResult {
    fn checked(id: &str, title: &str, checks: BTreeMap<String, Check>, detail: Option<String>) -> Self {
        let ok = checks.values().all(|c| c.passed);
        Self {
            id: id.into(),
            title: title.into(),
            status: if ok { AxiomStatus::Pass } else { AxiomStatus::Fail },
            checks,
            detail,
        }
    }

    fn by_construction(id: &str, title: &str, detail: &str) -> Self {
        Self {
            id: id.into(),
            title: title.into(),
            status: AxiomStatus::ByConstruction,
            checks: BTreeMap::new(),
            detail: Some(detail.into()),
        }
    }

    pub fn passed(&self) -> bool {
        self.status != AxiomStatus::Fail
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub schema_version: u32,
    pub mesh: String,
    pub seed: u64,
    pub trials: usize,
    pub axioms: Vec<AxiomResult>,
    pub passed: bool,
    pub tolerances: Tolerances,
}

/// A gluing to exercise for A11/A12: region, the two faces and the vertex
/// matching.
#[derive(Clone, Debug)]
pub struct GlueCase {
    pub mesh: RegionMesh,
    pub face0: String,
    pub face1: String,
    pub matching: BTreeMap<usize, usize>,
}

impl GlueCase {
    /// The two built-in glueable pairs: two squares into a rectangle and the
    /// slit annulus into an annulus.
    pub fn builtin_pairs() -> Result<Vec<Self>> {
        Ok(vec![
            Self {
                mesh: builtin::two_squares(1)?,
                face0: "seam_a".into(),
                face1: "seam_b".into(),
                matching: builtin::two_squares_matching(1),
            },
            Self {
                mesh: builtin::strip(8)?,
                face0: "start".into(),
                face1: "end".into(),
                matching: builtin::strip_matching(8),
            },
        ])
    }
}

#[derive(Clone, Debug)]
pub struct AxiomOptions {
    pub seed: u64,
    pub trials: usize,
    /// Gluings checked in addition to the built-in pairs.
    pub extra_gluings: Vec<GlueCase>,
}

impl Default for AxiomOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            trials: DEFAULT_TRIALS,
            extra_gluings: Vec::new(),
        }
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

fn random_combination(rng: &mut ChaCha8Rng, basis: &DMatrix<f64>) -> DVector<f64> {
    basis * random_vector(rng, basis.ncols())
}

fn relative(residual: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        residual / scale
    } else {
        residual
    }
}

/// Raw data of `eta` on the boundary of `mesh`.
fn data(trace: &BoundaryTrace, eta: &DVector<f64>) -> Result<BoundaryDatum> {
    trace.trace_values(eta)
}

fn random_datum(rng: &mut ChaCha8Rng, sigma: &HypersurfaceMesh) -> Result<BoundaryDatum> {
    let n = sigma.complex().len(1);
    BoundaryDatum::from_values(sigma, random_vector(rng, n), random_vector(rng, n))
}

/// The potential identities evaluated with the metric of `eval` on random
/// combinations of solutions computed on `solutions` (same complex).
///
/// With `eval == solutions` every residual is at roundoff; a corrupted metric
/// in `eval` makes them fail.
pub fn potential_identities(
    eval: &RegionMesh,
    solutions: &RegionMesh,
    tol: &Tolerances,
    rng: &mut ChaCha8Rng,
    trials: usize,
) -> Result<BTreeMap<String, Check>> {
    let space = solution_space(solutions, RankPolicy::from(tol))?;
    let basis = space.basis.columns();
    let trace = BoundaryTrace::new(eval)?;
    let sigma = trace.sigma();
    // absolute floor for action scales: |L| |eta|^2 with the reference metric
    let norm_l = BoundaryTrace::new(solutions)?.operator_norm()?;
    let star1 = solutions.metric().star(1);
    let energy = |v: &DVector<f64>| norm_l * v.iter().zip(star1).map(|(x, s)| x * x * s).sum::<f64>();
    let map = sigma.simplex_map(1);
    let cx = eval.complex();
    let interior_vertices: Vec<usize> = (0..cx.len(0)).filter(|&v| !cx.is_boundary(0, v)).collect();

    let (mut antisym, mut potential, mut equal_data, mut equal_action) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..trials {
        let eta = random_combination(rng, basis);
        let eta2 = random_combination(rng, basis);
        let a = data(&trace, &eta)?;
        let b = data(&trace, &eta2)?;

        let w = omega(sigma, &a, &b)?;
        let half = 0.5 * (bracket(sigma, &a, &b)? - bracket(sigma, &b, &a)?);
        antisym = antisym.max(relative((w - half).abs(), bracket_scale(sigma, &a, &b)));

        let x = &eta - &eta2;
        let x_sigma = DVector::from_iterator(map.len(), map.iter().map(|&e| x[e]));
        let s1 = action_values(eval, &eta);
        let s2 = action_values(eval, &eta2);
        let t1 = theta_on(sigma, &x_sigma, &a)?;
        let t2 = theta_on(sigma, &x_sigma, &b)?;
        let r = s1 - (s2 - 0.5 * t1 - 0.5 * t2);
        let scale = s1.abs() + s2.abs() + 0.5 * (t1.abs() + t2.abs()) + energy(&eta) + energy(&eta2);
        potential = potential.max(relative(r.abs(), scale));

        // same boundary data: add d of a function vanishing on the boundary
        let mut f = DVector::zeros(cx.len(0));
        for &v in &interior_vertices {
            f[v] = rng.gen_range(-1.0..1.0);
        }
        let shifted = &eta + cx.coboundary(0, &f);
        let c = data(&trace, &shifted)?;
        let diff = (&c.stacked() - a.stacked()).amax();
        equal_data = equal_data.max(relative(diff, a.stacked().amax()));
        let s3 = action_values(eval, &shifted);
        equal_action = equal_action.max(relative((s3 - s1).abs(), s1.abs() + s3.abs() + energy(&eta) + energy(&shifted)));
    }
    Ok(BTreeMap::from([
        ("omega_bracket_antisymmetrization".into(), Check::at_most(antisym, tol.bracket_identity)),
        ("action_potential_identity".into(), Check::at_most(potential, tol.action_identity)),
        ("equal_data_equal_boundary_datum".into(), Check::at_most(equal_data, tol.action_identity)),
        ("equal_data_equal_action".into(), Check::at_most(equal_action, tol.action_identity)),
    ]))
}

pub fn involution_checks(mesh: &RegionMesh, tol: &Tolerances, rng: &mut ChaCha8Rng, trials: usize) -> Result<BTreeMap<String, Check>> {
    let sigma = mesh.boundary_complex()?;
    let rev = sigma.reversed();
    let (mut br, mut th, mut om) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..trials {
        let a = random_datum(rng, &sigma)?;
        let b = random_datum(rng, &sigma)?;
        let scale = bracket_scale(&sigma, &a, &b);
        br = br.max(relative((bracket(&rev, &a, &b)? + bracket(&sigma, &a, &b)?).abs(), scale));
        om = om.max(relative((omega(&rev, &a, &b)? + omega(&sigma, &a, &b)?).abs(), scale));
        let x = b.phi.values();
        th = th.max(relative((theta_on(&rev, x, &a)? + theta_on(&sigma, x, &a)?).abs(), scale));
    }
    Ok(BTreeMap::from([
        ("bracket_sign_flip".into(), Check::at_most(br, tol.involution)),
        ("potential_sign_flip".into(), Check::at_most(th, tol.involution)),
        ("omega_sign_flip".into(), Check::at_most(om, tol.involution)),
        (
            "double_reversal_sign".into(),
            Check::equal(rev.reversed().orientation_sign() as usize, sigma.orientation_sign() as usize),
        ),
    ]))
}

pub fn disjoint_union_checks(mesh: &RegionMesh, tol: &Tolerances, rng: &mut ChaCha8Rng, trials: usize) -> Result<BTreeMap<String, Check>> {
    let policy = RankPolicy::from(tol);
    let union = mesh.disjoint_union(mesh)?;
    let cx = mesh.complex();
    let ucx = union.complex();
    let shift = cx.len(0);
    // union edge -> (copy, edge)
    let origin: Vec<(usize, usize)> = (0..ucx.len(1))
        .map(|u| {
            let s = ucx.simplex(1, u);
            let (copy, local): (usize, Vec<usize>) = if s[0] >= shift {
                (1, s.iter().map(|v| v - shift).collect())
            } else {
                (0, s.to_vec())
            };
            (copy, cx.index_of(1, &local).expect("edge of the copy"))
        })
        .collect();
    let basis = solution_space(mesh, policy)?.basis.columns().clone();
    let trace = BoundaryTrace::new(mesh)?;
    let utrace = BoundaryTrace::new(&union)?;
    let (mut act, mut om, mut br, mut sol) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let glue_pair = |a: &DVector<f64>, b: &DVector<f64>| -> DVector<f64> {
        DVector::from_iterator(origin.len(), origin.iter().map(|&(c, e)| if c == 0 { a[e] } else { b[e] }))
    };
    for _ in 0..trials {
        let (e1, e2, x1, x2) = (
            random_combination(rng, &basis),
            random_combination(rng, &basis),
            random_combination(rng, &basis),
            random_combination(rng, &basis),
        );
        let eu = glue_pair(&e1, &e2);
        let xu = glue_pair(&x1, &x2);
        sol = sol.max(utrace.residual(&eu)?);
        let (s1, s2, su) = (action_values(mesh, &e1), action_values(mesh, &e2), action_values(&union, &eu));
        act = act.max(relative((su - s1 - s2).abs(), su.abs() + s1.abs() + s2.abs()));

        let sigma = trace.sigma();
        let usigma = utrace.sigma();
        let (a1, a2, b1, b2) = (data(&trace, &e1)?, data(&trace, &e2)?, data(&trace, &x1)?, data(&trace, &x2)?);
        let (au, bu) = (data(&utrace, &eu)?, data(&utrace, &xu)?);
        let scale = bracket_scale(usigma, &au, &bu);
        let wsum = omega(sigma, &a1, &b1)? + omega(sigma, &a2, &b2)?;
        om = om.max(relative((omega(usigma, &au, &bu)? - wsum).abs(), scale));
        let bsum = bracket(sigma, &a1, &b1)? + bracket(sigma, &a2, &b2)?;
        br = br.max(relative((bracket(usigma, &au, &bu)? - bsum).abs(), scale));
    }
    Ok(BTreeMap::from([
        ("action_additivity".into(), Check::at_most(act, tol.additivity)),
        ("omega_additivity".into(), Check::at_most(om, tol.additivity)),
        ("bracket_additivity".into(), Check::at_most(br, tol.additivity)),
        ("union_of_solutions_solves".into(), Check::at_most(sol, tol.solution_residual)),
        (
            "solution_dimension_additivity".into(),
            Check::equal(solution_space(&union, policy)?.dim(), 2 * basis.ncols()),
        ),
    ]))
}

pub fn factorization_checks(mesh: &RegionMesh, tol: &Tolerances, rng: &mut ChaCha8Rng, trials: usize) -> Result<BTreeMap<String, Check>> {
    let trace = BoundaryTrace::new(mesh)?;
    let sigma = trace.sigma();
    let basis = solution_space(mesh, RankPolicy::from(tol))?.basis.columns().clone();
    let (mut random, mut solutions) = (0.0f64, 0.0f64);
    for _ in 0..trials {
        let a = random_datum(rng, sigma)?;
        let b = random_datum(rng, sigma)?;
        random = random.max(face_factorization_check(sigma, mesh.complex(), &a, &b)?.relative);
        let a = data(&trace, &random_combination(rng, &basis))?;
        let b = data(&trace, &random_combination(rng, &basis))?;
        solutions = solutions.max(face_factorization_check(sigma, mesh.complex(), &a, &b)?.relative);
    }
    Ok(BTreeMap::from([
        ("bracket_additivity_random_data".into(), Check::at_most(random, tol.factorization)),
        ("bracket_additivity_solution_data".into(), Check::at_most(solutions, tol.factorization)),
    ]))
}

pub fn gauge_checks(mesh: &RegionMesh, tol: &Tolerances, rng: &mut ChaCha8Rng, trials: usize) -> Result<(BTreeMap<String, Check>, Option<String>)> {
    let policy = RankPolicy::from(tol);
    let cx = mesh.complex();
    let trace = BoundaryTrace::new(mesh)?;
    let sigma = trace.sigma();
    let sdec = Dec::hypersurface(sigma);
    let fixer = GaugeFixer::new(sigma, policy)?;
    let basis = solution_space(mesh, policy)?.basis.columns().clone();
    let (mut act, mut om, mut idem, mut orbit) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let norm = |v: &DVector<f64>| v.amax();
    for _ in 0..trials {
        let eta = random_vector(rng, cx.len(1));
        let f = random_vector(rng, cx.len(0));
        let s0 = action_values(mesh, &eta);
        let s1 = action_values(mesh, &(&eta + cx.coboundary(0, &f)));
        act = act.max(relative((s1 - s0).abs(), s0.abs()));

        if sigma.complex().len(1) == 0 {
            continue;
        }
        let fs = random_vector(rng, sigma.complex().len(0));
        let dfs = sdec.d_values(0, &fs);
        let gauge = BoundaryDatum::from_values(sigma, dfs.clone(), DVector::zeros(dfs.len()))?;
        let b = data(&trace, &random_combination(rng, &basis))?;
        om = om.max(relative(omega(sigma, &gauge, &b)?.abs(), bracket_scale(sigma, &gauge, &b)));

        let x = random_datum(rng, sigma)?;
        let once = fixer.fix(&x)?.datum;
        let twice = fixer.fix(&once)?.datum;
        idem = idem.max(relative(norm(&(twice.stacked() - once.stacked())), norm(&once.stacked())));
        let moved = BoundaryDatum::from_values(sigma, x.phi.values() + &dfs, x.phi_dot.values() + sdec.d_values(0, &random_vector(rng, fs.len())))?;
        let other = fixer.fix(&moved)?.datum;
        orbit = orbit.max(relative(norm(&(other.stacked() - once.stacked())), norm(&once.stacked())));
    }
    let mut checks = BTreeMap::from([
        ("action_gauge_invariance".into(), Check::at_most(act, tol.gauge_action)),
        ("omega_vanishes_on_gauge_directions".into(), Check::at_most(om, tol.bracket_identity)),
        ("gauge_fix_idempotent".into(), Check::at_most(idem, tol.gauge_idempotence)),
        ("gauge_fix_constant_on_orbits".into(), Check::at_most(orbit, tol.gauge_idempotence)),
    ]);
    let periods = PeriodBasis::new(&sdec, policy)?;
    let detail = if periods.rank() == 0 || sigma.complex().len(1) == 0 {
        Some("boundary has no 1-cycles; large gauge transformations are trivial".to_string())
    } else {
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let datum = fixer.fix(&data(&trace, &random_combination(rng, &basis))?)?.datum;
            let winding: Vec<i64> = (0..periods.rank()).map(|_| rng.gen_range(-3..=3)).collect();
            let moved = large_gauge_orbit(sigma, &datum, &periods, &winding)?;
            for g in &periods.generators {
                let h0 = holonomy(sigma.complex(), &datum.phi, g)?;
                let h1 = holonomy(sigma.complex(), &moved.phi, g)?;
                worst = worst.max(circle_distance(h0.circle, h1.circle));
            }
        }
        checks.insert("large_gauge_holonomy_invariance".into(), Check::at_most(worst, tol.large_gauge));
        None
    };
    Ok((checks, detail))
}

pub fn gauge_factorization_checks(mesh: &RegionMesh, tol: &Tolerances, rng: &mut ChaCha8Rng, trials: usize) -> Result<BTreeMap<String, Check>> {
    let sigma = mesh.boundary_complex()?;
    let faces = sigma.faces(mesh.complex())?;
    let sdec = Dec::hypersurface(&sigma);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let x = random_datum(rng, &sigma)?;
        let f = random_vector(rng, sigma.complex().len(0));
        let moved = BoundaryDatum::from_values(&sigma, x.phi.values() + sdec.d_values(0, &f), x.phi_dot.values().clone())?;
        for face in faces.values() {
            let vmap = face.index_in(&sigma, 0)?;
            let ff = DVector::from_iterator(vmap.len(), vmap.iter().map(|&v| f[v]));
            let fdec = Dec::hypersurface(face);
            let restricted = x.restrict(&sigma, face)?;
            let direct = BoundaryDatum::from_values(
                face,
                restricted.phi.values() + fdec.d_values(0, &ff),
                restricted.phi_dot.values().clone(),
            )?;
            let via = moved.restrict(&sigma, face)?;
            let diff = (direct.stacked() - via.stacked()).amax();
            worst = worst.max(relative(diff, via.stacked().amax()));
        }
    }
    Ok(BTreeMap::from([
        ("gauge_action_commutes_with_face_restriction".into(), Check::at_most(worst, tol.factorization)),
        ("faces".into(), Check::equal(faces.len(), mesh.labels().len())),
    ]))
}

/// Runs every axiom check on `mesh`.
pub fn verify_axioms(mesh: &RegionMesh, tol: &Tolerances, options: &AxiomOptions) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let trials = options.trials;
    let mut axioms = vec![
        AxiomResult::by_construction(
            "A1",
            "Affine structure",
            "solutions form the kernel of a linear operator; boundary data are a linear map of them",
        ),
        AxiomResult::by_construction(
            "A2",
            "Presymplectic structure",
            "omega is a weighted antisymmetric bilinear form on boundary data",
        ),
        AxiomResult::by_construction(
            "A3",
            "Symplectic structure",
            "the coclosed gauge is a complement of the kernel of omega; nondegeneracy is reported under A9",
        ),
    ];
    axioms.push(AxiomResult::checked(
        "A4",
        "Symplectic potential",
        potential_identities(mesh, mesh, tol, &mut rng, trials)?,
        None,
    ));
    axioms.push(AxiomResult::checked("A5", "Involution", involution_checks(mesh, tol, &mut rng, trials)?, None));
    axioms.push(AxiomResult::checked("A6", "Disjoint regions", disjoint_union_checks(mesh, tol, &mut rng, trials)?, None));
    axioms.push(AxiomResult::checked(
        "A7",
        "Factorization of fields on hypersurfaces",
        factorization_checks(mesh, tol, &mut rng, trials)?,
        None,
    ));
    let (a8, a8_detail) = gauge_checks(mesh, tol, &mut rng, trials)?;
    axioms.push(AxiomResult::checked("A8", "Gauge action", a8, a8_detail));

    let lag = verify_lagrangian(mesh, tol)?;
    let mut a9 = BTreeMap::from([
        ("isotropy".into(), Check::at_most(lag.isotropy.relative, tol.isotropy)),
        ("image_isotropy".into(), Check::at_most(lag.lagrangian.isotropy_residual, tol.isotropy)),
        ("complement_in_image_angle".into(), Check::at_most(lag.lagrangian.max_angle, tol.principal_angle)),
        ("half_dimension".into(), Check::equal(2 * lag.dims.image, lag.dims.boundary_phase_space)),
        (
            "gauge_fixed_dimension".into(),
            Check::equal(lag.dims.gauge_fixed_solutions + lag.dims.exact_gauge, lag.dims.solutions),
        ),
    ]);
    if lag.dims.boundary_phase_space > 0 {
        a9.insert(
            "omega_nondegenerate_on_gauge".into(),
            Check::at_least(lag.omega_conditioning, tol.rank_rel),
        );
    }
    let a9_detail = (lag.dims.boundary_phase_space == 0)
        .then(|| "empty boundary: zero-dimensional boundary space, trivially Lagrangian".to_string());
    axioms.push(AxiomResult::checked("A9", "Lagrangian relation modulo gauge", a9, a9_detail));

    axioms.push(AxiomResult::checked(
        "A10",
        "Factorization of gauge actions on hypersurfaces",
        gauge_factorization_checks(mesh, tol, &mut rng, trials)?,
        None,
    ));

    let mut cases = GlueCase::builtin_pairs()?;
    cases.extend(options.extra_gluings.iter().cloned());
    let mut a11 = BTreeMap::new();
    let mut a12 = BTreeMap::new();
    for case in &cases {
        let (g, _) = gluing_check(&case.mesh, &case.face0, &case.face1, &case.matching, tol)?;
        let key = |s: &str| format!("{}:{s}", case.mesh.name());
        a11.insert(key("equalizer_dimension"), Check::equal(g.equalizer_dim, g.glued_solutions));
        a11.insert(key("glued_in_equalizer_angle"), Check::at_most(g.angle_glued_in_equalizer, tol.principal_angle));
        a11.insert(key("equalizer_in_glued_angle"), Check::at_most(g.angle_equalizer_in_glued, tol.principal_angle));
        a12.insert(key("action_composition"), Check::at_most(g.action_residual, tol.gluing_action));
        a12.insert(
            key("boundary_facets"),
            Check::equal(g.boundary_facets_consistent as usize, 1),
        );
        a12.insert(key("harmonic_matches_betti"), Check::equal(g.harmonic_after, g.betti_1_after));
    }
    axioms.push(AxiomResult::checked("A11", "Locality of gauge fields", a11, None));
    axioms.push(AxiomResult::checked("A12", "Gluing of gauge fields", a12, None));

    let passed = axioms.iter().all(AxiomResult::passed);
    Ok(AxiomReport {
        schema_version: SCHEMA_VERSION,
        mesh: mesh.name().to_string(),
        seed: options.seed,
        trials,
        axioms,
        passed,
        tolerances: tol.clone(),
    })
}

/// Fault-injection fixture: the region with the curvature weight (degree-2
/// star) of its first 2-cell having an interior edge made negative.
///
/// `None` when no such cell exists; a corrupted weight on a cell with only
/// boundary edges is invisible to the potential identity.
pub fn corrupted_star(mesh: &RegionMesh) -> Option<RegionMesh> {
    let cx = mesh.complex();
    let cell = (0..cx.len(2)).find(|&t| cx.faces(2, t).iter().any(|&(e, _)| !cx.is_boundary(1, e)))?;
    let v = mesh.metric().star(2)[cell];
    Some(mesh.with_star_override(2, cell, -v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_passes_every_axiom() {
        let m = builtin::disk(8).unwrap();
        let r = verify_axioms(&m, &Tolerances::default(), &AxiomOptions::default()).unwrap();
        for a in &r.axioms {
            assert!(a.passed(), "{} failed: {:?}", a.id, a.checks);
        }
        assert!(r.passed);
    }

    #[test]
    fn negative_star_breaks_the_potential_identity() {
        let m = builtin::disk(8).unwrap();
        let bad = corrupted_star(&m).unwrap();
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let checks = potential_identities(&bad, &m, &tol, &mut rng, 4).unwrap();
        assert!(!checks["action_potential_identity"].passed);
    }
}
