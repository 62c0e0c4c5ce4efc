//! Abelian Yang-Mills on a region: the action, the space of solutions, its
//! image among boundary data, extension of data to solutions, and gluing.
//!
//! The action of a connection 1-cochain `eta` is `S(eta) = <d eta, d eta>`.
//! Solutions satisfy `(D^T S_2 D eta)_e = 0` on every interior edge.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::boundary::{BoundaryDatum, BoundaryTrace, GaugeFixer};
use crate::dec::{Cochain, Dec};
use crate::error::{Error, Result};
use crate::hodge::{betti_oracle, harmonic_neumann_basis_dec};
use crate::linalg::{integer_rank, lstsq_min_norm, null_space, range_basis, spectral_norm, RankPolicy, Subspace};
use crate::mesh::{glue, sort_with_parity, RegionMesh};
use crate::symplectic::{LagrangianDiagnostics, SymplecticSpace};
use crate::tolerances::Tolerances;

/// `<d eta, d eta>`.
pub fn action(mesh: &RegionMesh, eta: &Cochain) -> Result<f64> {
    let dec = Dec::region(mesh);
    let d = dec.d(eta)?;
    dec.inner_product(&d, &d)
}

/// Action on raw values.
pub fn action_values(mesh: &RegionMesh, eta: &DVector<f64>) -> f64 {
    let dec = Dec::region(mesh);
    let d = dec.d_values(1, eta);
    dec.inner_values(2, &d, &d)
}

/// Symplectic potential `theta(eta, X) = -2 <X|_Sigma, phi_dot(eta)>_Sigma`.
///
/// At a solution this equals `-2 <d X, d eta>`.
pub fn theta(trace: &BoundaryTrace, eta: &DVector<f64>, x: &DVector<f64>) -> f64 {
    let f = trace.flux(eta);
    -2.0 * trace
        .sigma()
        .simplex_map(1)
        .iter()
        .map(|&e| x[e] * f[e])
        .sum::<f64>()
}

/// Solutions of the field equations on a region.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    /// All solutions `L_M` (weights: the 1-star).
    pub basis: Subspace,
    /// Solutions orthogonal to every exact 1-cochain.
    pub gauge_fixed_basis: Subspace,
    /// `rank d_0`: the gauge directions removed from `basis`.
    pub exact_dim: usize,
    /// Rank of `d_0` on 0-cochains vanishing on the boundary.
    pub interior_exact_dim: usize,
    pub singular_values: Vec<f64>,
}

impl SolutionSpace {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

pub fn solution_space(mesh: &RegionMesh, policy: RankPolicy) -> Result<SolutionSpace> {
    let cx = mesh.complex();
    let dec = Dec::region(mesh);
    let n1 = cx.len(1);
    let star1 = dec.star_diag(1);
    let d1 = if mesh.dim() >= 2 {
        dec.whitened_d(1)
    } else {
        DMatrix::zeros(0, n1)
    };
    let interior: Vec<usize> = (0..n1).filter(|&e| !cx.is_boundary(1, e)).collect();
    // d eta must be orthogonal to d of every interior-supported 1-cochain
    let d_int = DMatrix::from_fn(d1.nrows(), interior.len(), |r, c| d1[(r, interior[c])]);
    let (q_int, _) = range_basis(&d_int, policy, 0.0)?;
    let constraint = q_int.transpose() * &d1;
    let (y, sv) = null_space(&constraint, policy, spectral_norm(&d1)?)?;
    let basis = Subspace::from_whitened(y.clone(), star1.clone(), policy.rel, sv.clone());

    let d0 = dec.whitened_d(0);
    let (exact, _) = range_basis(&d0, policy, 0.0)?;
    let off_exact = &y - &exact * (exact.transpose() * &y);
    let (fixed, fixed_sv) = range_basis(&off_exact, policy, 1.0)?;
    let gauge_fixed_basis = Subspace::from_whitened(fixed, star1, policy.rel, fixed_sv);

    let interior_columns: Vec<Vec<(usize, i64)>> = (0..cx.len(0))
        .filter(|&v| !cx.is_boundary(0, v))
        .map(|v| cx.cofaces(0, v).iter().map(|&(e, s)| (e, s as i64)).collect())
        .collect();
    Ok(SolutionSpace {
        basis,
        gauge_fixed_basis,
        exact_dim: exact.ncols(),
        interior_exact_dim: integer_rank(&interior_columns),
        singular_values: sv,
    })
}

/// Raw boundary data of each column of `m`, stacked as columns.
fn traces(trace: &BoundaryTrace, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = 2 * trace.sigma().complex().len(1);
    let mut out = DMatrix::zeros(n, m.ncols());
    for c in 0..m.ncols() {
        let d = trace.trace_values(&m.column(c).into_owned())?;
        out.column_mut(c).copy_from(&d.stacked());
    }
    Ok(out)
}

/// Gauge-fixed boundary data `P r eta` of the gauge-fixed solutions, and the
/// subspace they span inside the coclosed gauge.
pub fn restrict(
    space: &SolutionSpace,
    trace: &BoundaryTrace,
    symplectic: &SymplecticSpace,
    policy: RankPolicy,
) -> Result<(DMatrix<f64>, Subspace)> {
    let fixer = GaugeFixer::new(trace.sigma(), policy)?;
    let cols = space.gauge_fixed_basis.columns();
    let n = symplectic.ambient_dim();
    let mut data = DMatrix::zeros(n, cols.ncols());
    for c in 0..cols.ncols() {
        let d = trace.trace_values(&cols.column(c).into_owned())?;
        data.column_mut(c).copy_from(&fixer.fix(&d)?.datum.stacked());
    }
    let image = symplectic.span(&data)?;
    Ok((data, image))
}

/// Isotropy of raw traces of a solution basis: `max |omega|` over pairs and
/// the matching summand scale.
#[derive(Clone, Debug, Serialize)]
pub struct IsotropyCheck {
    pub max_abs: f64,
    pub scale: f64,
    pub relative: f64,
    pub passed: bool,
}

fn raw_isotropy(trace: &BoundaryTrace, basis: &DMatrix<f64>, tol: f64) -> Result<IsotropyCheck> {
    let data = traces(trace, basis)?;
    let sigma = trace.sigma();
    let n = sigma.complex().len(1);
    let w = DVector::from_column_slice(sigma.metric().star(1));
    let phi = data.rows(0, n);
    let dot = data.rows(n, n);
    let wdot = DMatrix::from_fn(n, dot.ncols(), |r, c| w[r] * dot[(r, c)]);
    let b = phi.transpose() * &wdot;
    let om = (&b - b.transpose()) * (0.5 * sigma.orientation_sign() as f64);
    let abs_b = phi.abs().transpose() * wdot.abs();
    let scale = (&abs_b + abs_b.transpose()).amax() * 0.5;
    let max_abs = om.amax();
    let relative = if scale > 0.0 { max_abs / scale } else { max_abs };
    Ok(IsotropyCheck {
        max_abs,
        scale,
        relative,
        passed: relative <= tol,
    })
}

/// Dimensions entering the Lagrangian check.
#[derive(Clone, Debug, Serialize)]
pub struct LagrangianDims {
    pub vertices: usize,
    pub edges: usize,
    pub interior_edges: usize,
    pub boundary_edges: usize,
    pub boundary_components: usize,
    pub solutions: usize,
    pub gauge_fixed_solutions: usize,
    pub exact_gauge: usize,
    pub interior_exact_gauge: usize,
    pub harmonic_neumann: usize,
    pub betti_1: usize,
    /// Dimension of the coclosed gauge `Phi_{A_Sigma}`.
    pub boundary_phase_space: usize,
    pub image: usize,
    /// Gauge-fixed solutions with vanishing gauge-fixed boundary data.
    pub restriction_kernel: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LagrangianReport {
    pub mesh: String,
    pub dims: LagrangianDims,
    pub half_dimension: bool,
    pub isotropy: IsotropyCheck,
    pub lagrangian: LagrangianDiagnostics,
    /// Smallest singular value of omega restricted to the coclosed gauge,
    /// relative to the largest (nondegeneracy).
    pub omega_conditioning: f64,
    pub passed: bool,
    pub tolerances: Tolerances,
}

/// Checks that gauge-fixed boundary data of solutions form a Lagrangian
/// subspace of the coclosed gauge.
pub fn verify_lagrangian(mesh: &RegionMesh, tol: &Tolerances) -> Result<LagrangianReport> {
    let policy = RankPolicy::from(tol);
    let cx = mesh.complex();
    let trace = BoundaryTrace::new(mesh)?;
    let sigma = trace.sigma();
    let space = solution_space(mesh, policy)?;
    let symplectic = SymplecticSpace::gauge_fixed(sigma, policy)?;
    let (_, image) = restrict(&space, &trace, &symplectic, policy)?;
    let isotropy = raw_isotropy(&trace, space.basis.columns(), tol.isotropy)?;
    let lagrangian = symplectic.is_lagrangian(&image, tol.isotropy, tol.principal_angle)?;
    let rsv = symplectic.restricted_singular_values()?;
    let omega_conditioning = match (rsv.first(), rsv.last()) {
        (Some(&a), Some(&b)) if a > 0.0 => b / a,
        _ => 1.0,
    };
    let dec = Dec::region(mesh);
    let harmonic = harmonic_neumann_basis_dec(&dec, 1, policy)?;
    let boundary_edges = sigma.complex().len(1);
    let dims = LagrangianDims {
        vertices: cx.len(0),
        edges: cx.len(1),
        interior_edges: trace.interior_edges().len(),
        boundary_edges,
        boundary_components: if boundary_edges == 0 { 0 } else { sigma.components() },
        solutions: space.dim(),
        gauge_fixed_solutions: space.gauge_fixed_basis.dim(),
        exact_gauge: space.exact_dim,
        interior_exact_gauge: space.interior_exact_dim,
        harmonic_neumann: harmonic.dim(),
        betti_1: betti_oracle(cx, 1),
        boundary_phase_space: symplectic.domain().dim(),
        image: image.dim(),
        restriction_kernel: space.gauge_fixed_basis.dim() - image.dim(),
    };
    let half_dimension = 2 * dims.image == dims.boundary_phase_space;
    let passed = half_dimension
        && isotropy.passed
        && lagrangian.lagrangian
        && dims.gauge_fixed_solutions + dims.exact_gauge == dims.solutions;
    Ok(LagrangianReport {
        mesh: mesh.name().to_string(),
        dims,
        half_dimension,
        isotropy,
        lagrangian,
        omega_conditioning,
        passed,
        tolerances: tol.clone(),
    })
}

/// A solution reproducing a boundary datum.
#[derive(Clone, Debug)]
pub struct Extension {
    pub eta: Cochain,
    /// Distance of the datum from the data of solutions, relative to its norm.
    pub projection_residual: f64,
    /// `|r(eta) - datum| / |datum|`.
    pub round_trip: f64,
}

/// Finds a solution whose boundary data (on the whole boundary) equal `datum`.
pub fn extend(mesh: &RegionMesh, datum: &BoundaryDatum, tol: &Tolerances) -> Result<Extension> {
    let policy = RankPolicy::from(tol);
    let trace = BoundaryTrace::new(mesh)?;
    let sigma = trace.sigma();
    if datum.host() != sigma.complex().host_id() {
        return Err(Error::HostMismatch);
    }
    let space = solution_space(mesh, policy)?;
    let symplectic = SymplecticSpace::full(sigma, policy);
    let b = space.basis.columns();
    let data = traces(&trace, b)?;
    let x = datum.stacked();
    let gram = symplectic.gram();
    let norm = |v: &DVector<f64>| v.iter().zip(gram.iter()).map(|(a, g)| a * a * g).sum::<f64>().sqrt();
    let xnorm = norm(&x);
    let image = symplectic.span(&data)?;
    let residual_abs = norm(&(&x - image.project(&x)));
    let projection_residual = if xnorm > 0.0 { residual_abs / xnorm } else { 0.0 };
    if projection_residual > tol.extendable {
        return Err(Error::NotExtendable {
            residual: projection_residual,
            tolerance: tol.extendable,
        });
    }
    // least squares in whitened boundary coordinates
    let sg = gram.map(f64::sqrt);
    let a = DMatrix::from_fn(data.nrows(), data.ncols(), |r, c| data[(r, c)] * sg[r]);
    let coef = lstsq_min_norm(&a, &x.component_mul(&sg), policy)?;
    let eta = b * coef;
    let back = trace.trace_values(&eta)?.stacked();
    let round_trip = if xnorm > 0.0 { norm(&(back - &x)) / xnorm } else { 0.0 };
    Ok(Extension {
        eta: Cochain::new(mesh.complex(), 1, eta)?,
        projection_residual,
        round_trip,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GluingReport {
    pub mesh: String,
    pub glued: String,
    pub face0: String,
    pub face1: String,
    pub identified_edges: usize,
    pub flux_constraints: usize,
    pub source_solutions: usize,
    pub equalizer_dim: usize,
    pub glued_solutions: usize,
    /// Largest principal angle of the pulled-back glued solutions against the
    /// equalizer, and the reverse.
    pub angle_glued_in_equalizer: f64,
    pub angle_equalizer_in_glued: f64,
    pub action_residual: f64,
    pub betti_1_before: usize,
    pub betti_1_after: usize,
    pub harmonic_before: usize,
    pub harmonic_after: usize,
    pub boundary_facets_consistent: bool,
    pub passed: bool,
}

/// Glues `face1` to `face0` and compares the solutions of the glued region
/// with the equalizer of the matching conditions on the solutions of the
/// original region.
pub fn gluing_check(
    mesh: &RegionMesh,
    face0: &str,
    face1: &str,
    matching: &BTreeMap<usize, usize>,
    tol: &Tolerances,
) -> Result<(GluingReport, RegionMesh)> {
    let policy = RankPolicy::from(tol);
    let gluing = glue(mesh, face0, face1, matching)?;
    let glued = &gluing.glued;
    let cx = mesh.complex();
    let gcx = glued.complex();
    let n = mesh.dim();
    let n1 = cx.len(1);

    // edges of face0 and their partners
    let mut face_edges = BTreeSet::new();
    for f in mesh.face_facets(face0) {
        if n == 2 {
            face_edges.insert(f);
        } else {
            for &(e, _) in cx.faces(n - 1, f) {
                if n == 3 {
                    face_edges.insert(e);
                } else {
                    return Err(Error::DegreeOutOfRange { degree: n, dim: 3 });
                }
            }
        }
    }
    let mut pairs = Vec::new();
    for &e in &face_edges {
        let s = cx.simplex(1, e);
        let image = [matching[&s[0]], matching[&s[1]]];
        let (sorted, parity) = sort_with_parity(&image);
        let m = cx
            .index_of(1, &sorted)
            .ok_or_else(|| Error::Glue("matched edge missing".into()))?;
        pairs.push((e, m, parity as f64));
    }

    let space = solution_space(mesh, policy)?;
    let b = space.basis.columns();
    let dec = Dec::region(mesh);
    let flux = |v: DVector<f64>| dec.weighted_transpose(2, &dec.d_values(1, &v));
    let fluxes: Vec<DVector<f64>> = (0..b.ncols()).map(|c| flux(b.column(c).into_owned())).collect();
    let interior_pairs: Vec<&(usize, usize, f64)> = pairs
        .iter()
        .filter(|(e, _, _)| !gcx.is_boundary(1, gluing.simplex_map[1][*e]))
        .collect();
    // whitened rows: continuity in units of |eta|, flux relative to |L|
    let star1 = dec.star_diag(1);
    let op = spectral_norm(&dec.whitened_d(1))?.powi(2).max(f64::MIN_POSITIVE);
    let rows = pairs.len() + interior_pairs.len();
    let mut stacked = DMatrix::zeros(rows, b.ncols());
    for c in 0..b.ncols() {
        for (r, &(e, m, s)) in pairs.iter().enumerate() {
            stacked[(r, c)] = (b[(e, c)] - s * b[(m, c)]) * star1[e].sqrt();
        }
        for (r, &&(e, m, s)) in interior_pairs.iter().enumerate() {
            stacked[(pairs.len() + r, c)] = (fluxes[c][e] + s * fluxes[c][m]) / (star1[e].sqrt() * op);
        }
    }
    let (coef, _) = null_space(&stacked, policy, 1.0)?;
    let equalizer = Subspace::from_spanning(&(b * coef), &star1, policy)?;

    // pull back glued solutions
    let glued_space = solution_space(glued, policy)?;
    let gb = glued_space.basis.columns();
    let sign: Vec<f64> = (0..n1)
        .map(|e| {
            let s = cx.simplex(1, e);
            let image = [gluing.vertex_map[s[0]], gluing.vertex_map[s[1]]];
            sort_with_parity(&image).1 as f64
        })
        .collect();
    let pullback_cols = DMatrix::from_fn(n1, gb.ncols(), |e, c| sign[e] * gb[(gluing.simplex_map[1][e], c)]);
    let pullback = Subspace::from_spanning(&pullback_cols, &star1, policy)?;
    let angle_glued_in_equalizer = equalizer.max_angle_to(&pullback)?;
    let angle_equalizer_in_glued = pullback.max_angle_to(&equalizer)?;

    let mut action_residual: f64 = 0.0;
    for c in 0..gb.ncols() {
        let s1 = action_values(glued, &gb.column(c).into_owned());
        let s0 = action_values(mesh, &pullback_cols.column(c).into_owned());
        let scale = s1.abs() + s0.abs();
        if scale > 0.0 {
            action_residual = action_residual.max((s1 - s0).abs() / scale);
        }
    }

    // boundary facets of the glued region are the images of the unglued ones
    let k = n - 1;
    let expected: BTreeSet<usize> = mesh
        .face_labels()
        .iter()
        .filter(|(_, l)| l.as_str() != face0 && l.as_str() != face1)
        .map(|(&f, _)| gluing.simplex_map[k][f])
        .collect();
    let actual: BTreeSet<usize> = glued.face_labels().keys().copied().collect();
    let boundary_facets_consistent = expected == actual;

    let gdec = Dec::region(glued);
    let harmonic_before = harmonic_neumann_basis_dec(&dec, 1, policy)?.dim();
    let harmonic_after = harmonic_neumann_basis_dec(&gdec, 1, policy)?.dim();
    let passed = equalizer.dim() == glued_space.dim()
        && pullback.dim() == glued_space.dim()
        && angle_glued_in_equalizer <= tol.principal_angle
        && angle_equalizer_in_glued <= tol.principal_angle
        && action_residual <= tol.gluing_action
        && boundary_facets_consistent;
    let report = GluingReport {
        mesh: mesh.name().to_string(),
        glued: glued.name().to_string(),
        face0: face0.to_string(),
        face1: face1.to_string(),
        identified_edges: pairs.len(),
        flux_constraints: interior_pairs.len(),
        source_solutions: space.dim(),
        equalizer_dim: equalizer.dim(),
        glued_solutions: glued_space.dim(),
        angle_glued_in_equalizer,
        angle_equalizer_in_glued,
        action_residual,
        betti_1_before: betti_oracle(cx, 1),
        betti_1_after: betti_oracle(gcx, 1),
        harmonic_before,
        harmonic_after,
        boundary_facets_consistent,
        passed,
    };
    Ok((report, gluing.glued))
}
