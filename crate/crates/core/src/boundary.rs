//! Boundary data `(phi, phi_dot)` of bulk solutions, coclosed gauge fixing,
//! holonomy and large gauge transformations.
//!
//! For a 1-cochain `eta` on a region, the flux through a boundary edge `e` is
//! `F_e = (D^T S_2 D eta)_e`, the Neumann trace of `d eta`. The datum on the
//! boundary `Sigma` is `phi_e = eta_e` and `phi_dot_e = F_e / w_e`, with `w`
//! the degree-1 star of `Sigma`. With this normalization the boundary pairing
//! `<phi, phi_dot>_Sigma` is exactly the Stokes boundary term of
//! `<d eta, d xi>`.

use std::cell::OnceCell;
use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dec::{Cochain, Dec};
use crate::error::{Error, Result};
use crate::hodge::{betti_oracle, harmonic_neumann_basis_dec};
use crate::linalg::{lstsq_min_norm, range_basis, spectral_norm, ModpEliminator, RankPolicy};
use crate::mesh::{HypersurfaceMesh, RegionMesh, SimplicialComplex};

/// Tangential and normal-derivative traces on a hypersurface.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryDatum {
    pub phi: Cochain,
    pub phi_dot: Cochain,
}

/// Serialized datum: ambient vertex pairs of the hypersurface edges.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatumJson {
    pub edges: Vec<[usize; 2]>,
    pub phi: Vec<f64>,
    pub phi_dot: Vec<f64>,
}

impl BoundaryDatum {
    pub fn new(phi: Cochain, phi_dot: Cochain) -> Result<Self> {
        if phi.host() != phi_dot.host() || phi.degree() != 1 || phi_dot.degree() != 1 {
            return Err(Error::HostMismatch);
        }
        Ok(Self { phi, phi_dot })
    }

    pub fn from_values(sigma: &HypersurfaceMesh, phi: DVector<f64>, phi_dot: DVector<f64>) -> Result<Self> {
        Self::new(
            Cochain::new(sigma.complex(), 1, phi)?,
            Cochain::new(sigma.complex(), 1, phi_dot)?,
        )
    }

    pub fn zeros(sigma: &HypersurfaceMesh) -> Result<Self> {
        let n = sigma.complex().len(1);
        Self::from_values(sigma, DVector::zeros(n), DVector::zeros(n))
    }

    pub fn host(&self) -> u64 {
        self.phi.host()
    }

    pub fn edge_count(&self) -> usize {
        self.phi.values().len()
    }

    /// `(phi, phi_dot)` concatenated.
    pub fn stacked(&self) -> DVector<f64> {
        let n = self.edge_count();
        let mut v = DVector::zeros(2 * n);
        v.rows_mut(0, n).copy_from(self.phi.values());
        v.rows_mut(n, n).copy_from(self.phi_dot.values());
        v
    }

    pub fn from_stacked(sigma: &HypersurfaceMesh, v: &DVector<f64>) -> Result<Self> {
        let n = sigma.complex().len(1);
        if v.len() != 2 * n {
            return Err(Error::HostMismatch);
        }
        Self::from_values(sigma, v.rows(0, n).into_owned(), v.rows(n, n).into_owned())
    }

    pub fn to_json(&self, sigma: &HypersurfaceMesh) -> DatumJson {
        let vm = sigma.vertex_map();
        DatumJson {
            edges: sigma
                .complex()
                .simplices(1)
                .iter()
                .map(|e| [vm[e[0]], vm[e[1]]])
                .collect(),
            phi: self.phi.values().iter().copied().collect(),
            phi_dot: self.phi_dot.values().iter().copied().collect(),
        }
    }

    pub fn from_json(sigma: &HypersurfaceMesh, json: &DatumJson) -> Result<Self> {
        let expected = self_edges(sigma);
        if json.edges != expected || json.phi.len() != expected.len() || json.phi_dot.len() != expected.len() {
            return Err(Error::HostMismatch);
        }
        Self::from_values(
            sigma,
            DVector::from_column_slice(&json.phi),
            DVector::from_column_slice(&json.phi_dot),
        )
    }

    /// Restriction to a sub-hypersurface (a face) of `from`.
    pub fn restrict(&self, from: &HypersurfaceMesh, to: &HypersurfaceMesh) -> Result<Self> {
        if self.host() != from.complex().host_id() {
            return Err(Error::HostMismatch);
        }
        let idx = to.index_in(from, 1)?;
        let pick = |v: &DVector<f64>| DVector::from_iterator(idx.len(), idx.iter().map(|&i| v[i]));
        Self::from_values(to, pick(self.phi.values()), pick(self.phi_dot.values()))
    }
}

fn self_edges(sigma: &HypersurfaceMesh) -> Vec<[usize; 2]> {
    let vm = sigma.vertex_map();
    sigma
        .complex()
        .simplices(1)
        .iter()
        .map(|e| [vm[e[0]], vm[e[1]]])
        .collect()
}

/// Trace machinery for one region: its boundary, the edge correspondence and
/// the scale of the Euler-Lagrange operator.
pub struct BoundaryTrace<'a> {
    mesh: &'a RegionMesh,
    sigma: HypersurfaceMesh,
    interior_edges: Vec<usize>,
    operator_norm: OnceCell<f64>,
}

impl<'a> BoundaryTrace<'a> {
    pub fn new(mesh: &'a RegionMesh) -> Result<Self> {
        let sigma = mesh.boundary_complex()?;
        let cx = mesh.complex();
        let interior_edges = (0..cx.len(1)).filter(|&e| !cx.is_boundary(1, e)).collect();
        Ok(Self {
            mesh,
            sigma,
            interior_edges,
            operator_norm: OnceCell::new(),
        })
    }

    pub fn mesh(&self) -> &RegionMesh {
        self.mesh
    }

    /// The whole boundary with its induced orientation.
    pub fn sigma(&self) -> &HypersurfaceMesh {
        &self.sigma
    }

    pub fn interior_edges(&self) -> &[usize] {
        &self.interior_edges
    }

    /// `D^T S_2 D eta` on every edge.
    pub fn flux(&self, eta: &DVector<f64>) -> DVector<f64> {
        let dec = Dec::region(self.mesh);
        dec.weighted_transpose(2, &dec.d_values(1, eta))
    }

    /// `|d_1|^2` in whitened coordinates.
    pub fn operator_norm(&self) -> Result<f64> {
        if let Some(&v) = self.operator_norm.get() {
            return Ok(v);
        }
        let d1 = Dec::region(self.mesh).whitened_d(1);
        let v = spectral_norm(&d1)?.powi(2);
        Ok(*self.operator_norm.get_or_init(|| v))
    }

    /// Euler-Lagrange residual on interior edges, in whitened coordinates and
    /// relative to `|L| |eta|`.
    pub fn residual(&self, eta: &DVector<f64>) -> Result<f64> {
        let star = self.mesh.metric().star(1);
        let f = self.flux(eta);
        let num = self
            .interior_edges
            .iter()
            .map(|&e| f[e] * f[e] / star[e])
            .sum::<f64>()
            .sqrt();
        let y = eta
            .iter()
            .zip(star)
            .map(|(x, s)| x * x * s)
            .sum::<f64>()
            .sqrt();
        let scale = self.operator_norm()? * y;
        Ok(if scale > 0.0 { num / scale } else { num })
    }

    /// Datum on the whole boundary, without checking the field equations.
    pub fn trace_values(&self, eta: &DVector<f64>) -> Result<BoundaryDatum> {
        let map = self.sigma.simplex_map(1);
        let w = self.sigma.metric().star(1);
        let f = self.flux(eta);
        let phi = DVector::from_iterator(map.len(), map.iter().map(|&e| eta[e]));
        let phi_dot = DVector::from_iterator(map.len(), map.iter().zip(w).map(|(&e, w)| f[e] / w));
        BoundaryDatum::from_values(&self.sigma, phi, phi_dot)
    }

    /// Datum of a solution on the whole boundary or on one of its faces.
    pub fn trace_solution(&self, eta: &Cochain, face: Option<&HypersurfaceMesh>, tol: f64) -> Result<BoundaryDatum> {
        if eta.degree() != 1 || eta.host() != self.mesh.complex().host_id() {
            return Err(Error::HostMismatch);
        }
        let residual = self.residual(eta.values())?;
        if residual > tol {
            return Err(Error::NotASolution { residual });
        }
        let full = self.trace_values(eta.values())?;
        match face {
            None => Ok(full),
            Some(f) => full.restrict(&self.sigma, f),
        }
    }
}

/// Datum of a solution on the full boundary (`face = None`) or a labelled face.
pub fn trace_solution(
    mesh: &RegionMesh,
    eta: &Cochain,
    face: Option<&str>,
    tol: f64,
) -> Result<(HypersurfaceMesh, BoundaryDatum)> {
    let trace = BoundaryTrace::new(mesh)?;
    match face {
        None => {
            let d = trace.trace_solution(eta, None, tol)?;
            Ok((trace.sigma.clone(), d))
        }
        Some(label) => {
            let f = trace.sigma.extract_face(label, mesh.complex())?;
            let d = trace.trace_solution(eta, Some(&f), tol)?;
            Ok((f, d))
        }
    }
}

/// Projection onto the coclosed gauge `Phi_{A_Sigma}`: both components are
/// made orthogonal to `d` of 0-cochains on the hypersurface.
pub struct GaugeFixer<'a> {
    sigma: &'a HypersurfaceMesh,
    exact_basis: DMatrix<f64>,
    whitened_d0: DMatrix<f64>,
    sqrt_star: DVector<f64>,
    policy: RankPolicy,
}

/// Output of [`GaugeFixer::fix`]: the representative and the 0-cochains
/// `f`, `f_dot` with `fixed = (phi + d f, phi_dot + d f_dot)`.
#[derive(Clone, Debug)]
pub struct GaugeFixed {
    pub datum: BoundaryDatum,
    pub f: Cochain,
    pub f_dot: Cochain,
}

impl<'a> GaugeFixer<'a> {
    pub fn new(sigma: &'a HypersurfaceMesh, policy: RankPolicy) -> Result<Self> {
        let dec = Dec::hypersurface(sigma);
        let whitened_d0 = if sigma.dim() >= 1 && sigma.complex().len(1) > 0 {
            dec.whitened_d(0)
        } else {
            DMatrix::zeros(sigma.complex().len(1), sigma.complex().len(0))
        };
        let (exact_basis, _) = range_basis(&whitened_d0, policy, 0.0)?;
        Ok(Self {
            sigma,
            exact_basis,
            whitened_d0,
            sqrt_star: DVector::from_column_slice(sigma.metric().star(1)).map(f64::sqrt),
            policy,
        })
    }

    pub fn sigma(&self) -> &HypersurfaceMesh {
        self.sigma
    }

    /// Orthonormal basis (whitened) of exact 1-cochains on the hypersurface.
    pub fn exact_basis(&self) -> &DMatrix<f64> {
        &self.exact_basis
    }

    /// Removes the exact part of a 1-cochain; returns the coclosed part and
    /// the mean-zero potential `f` with `coclosed = x + d f`.
    pub fn project(&self, x: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
        let y = x.component_mul(&self.sqrt_star);
        let exact = &self.exact_basis * (self.exact_basis.transpose() * &y);
        let coclosed = (&y - &exact).component_div(&self.sqrt_star);
        // minimum-norm potential: orthogonal to the locally constant functions
        let g = lstsq_min_norm(&self.whitened_d0, &(-exact), self.policy)?;
        let s0 = DVector::from_column_slice(self.sigma.metric().star(0)).map(f64::sqrt);
        Ok((coclosed, g.component_div(&s0)))
    }

    pub fn fix(&self, datum: &BoundaryDatum) -> Result<GaugeFixed> {
        if datum.host() != self.sigma.complex().host_id() {
            return Err(Error::HostMismatch);
        }
        let cx = self.sigma.complex();
        let (phi, f) = self.project(datum.phi.values())?;
        let (phi_dot, f_dot) = self.project(datum.phi_dot.values())?;
        Ok(GaugeFixed {
            datum: BoundaryDatum::from_values(self.sigma, phi, phi_dot)?,
            f: Cochain::new(cx, 0, f)?,
            f_dot: Cochain::new(cx, 0, f_dot)?,
        })
    }

    /// Relative coclosedness defect of both components.
    pub fn defect(&self, datum: &BoundaryDatum) -> Result<f64> {
        let dec = Dec::hypersurface(self.sigma);
        let a = crate::hodge::coclosed_defect(&datum.phi, &dec)?;
        let b = crate::hodge::coclosed_defect(&datum.phi_dot, &dec)?;
        Ok(a.max(b))
    }
}

/// Representative of the gauge orbit of `datum` in the coclosed gauge.
pub fn gauge_fix_coclosed(sigma: &HypersurfaceMesh, datum: &BoundaryDatum) -> Result<BoundaryDatum> {
    Ok(GaugeFixer::new(sigma, RankPolicy::default())?.fix(datum)?.datum)
}

/// A gauge transformation on a hypersurface.
#[derive(Clone, Debug)]
pub struct GaugeTransformation {
    pub f: Cochain,
    pub component: GaugeComponent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GaugeComponent {
    Identity,
    Large(Vec<i64>),
}

impl GaugeTransformation {
    /// `phi -> phi + d f (+ 2 pi sum w_i h_i)`; `phi_dot` is untouched.
    pub fn apply(&self, sigma: &HypersurfaceMesh, datum: &BoundaryDatum, periods: Option<&PeriodBasis>) -> Result<BoundaryDatum> {
        let dec = Dec::hypersurface(sigma);
        let mut phi = datum.phi.values() + dec.d(&self.f)?.values();
        if let GaugeComponent::Large(w) = &self.component {
            let basis = periods.ok_or(Error::WindingLength {
                got: w.len(),
                expected: 0,
            })?;
            phi += basis.combination(w)?;
        }
        BoundaryDatum::from_values(sigma, phi, datum.phi_dot.values().clone())
    }
}

/// Line integral of a 1-cochain over a chain and its value on the circle.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Holonomy {
    pub integral: f64,
    /// `integral mod 2 pi` in `[0, 2 pi)`.
    pub circle: f64,
}

/// Whether a signed edge list is a cycle (integer boundary check).
pub fn check_cycle(complex: &SimplicialComplex, cycle: &[(usize, i64)]) -> Result<()> {
    let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
    for &(e, c) in cycle {
        if e >= complex.len(1) {
            return Err(Error::HostMismatch);
        }
        for &(v, s) in complex.faces(1, e) {
            *acc.entry(v).or_insert(0) += c * s as i64;
        }
    }
    let nonzero = acc.values().filter(|&&v| v != 0).count();
    if nonzero > 0 {
        return Err(Error::NotACycle { nonzero });
    }
    Ok(())
}

pub fn holonomy(complex: &SimplicialComplex, phi: &Cochain, cycle: &[(usize, i64)]) -> Result<Holonomy> {
    if phi.degree() != 1 || phi.host() != complex.host_id() {
        return Err(Error::HostMismatch);
    }
    check_cycle(complex, cycle)?;
    let integral: f64 = cycle.iter().map(|&(e, c)| c as f64 * phi.values()[e]).sum();
    Ok(Holonomy {
        integral,
        circle: integral.rem_euclid(TAU),
    })
}

/// Distance between two angles on the circle.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Cycles representing a basis of `H_1`: fundamental cycles of a BFS forest,
/// shortest first (ties broken lexicographically), kept when independent
/// modulo boundaries.
pub fn homology_generators(complex: &SimplicialComplex) -> Vec<Vec<(usize, i64)>> {
    let b1 = betti_oracle(complex, 1);
    if b1 == 0 {
        return Vec::new();
    }
    let nv = complex.len(0);
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for (e, s) in complex.simplices(1).iter().enumerate() {
        adjacency[s[0]].push((s[1], e));
        adjacency[s[1]].push((s[0], e));
    }
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; nv];
    let mut depth = vec![usize::MAX; nv];
    let mut tree = vec![false; complex.len(1)];
    for root in 0..nv {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &adjacency[v] {
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent[w] = Some((v, e));
                    tree[e] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    // signed path from v up to its root
    let path_to_root = |mut v: usize| -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        while let Some((p, e)) = parent[v] {
            out.push((v, p, e));
            v = p;
        }
        out
    };
    let edge_sign = |from: usize, to: usize, e: usize| -> i64 {
        let s = complex.simplex(1, e);
        if s[0] == from && s[1] == to {
            1
        } else {
            -1
        }
    };
    let mut candidates: Vec<Vec<(usize, i64)>> = Vec::new();
    for (e, s) in complex.simplices(1).iter().enumerate() {
        if tree[e] {
            continue;
        }
        let (a, b) = (s[0], s[1]);
        let mut chain: BTreeMap<usize, i64> = BTreeMap::new();
        *chain.entry(e).or_insert(0) += 1;
        // b -> root, root -> a
        for (v, p, pe) in path_to_root(b) {
            *chain.entry(pe).or_insert(0) += edge_sign(v, p, pe);
        }
        for (v, p, pe) in path_to_root(a) {
            *chain.entry(pe).or_insert(0) -= edge_sign(v, p, pe);
        }
        let cycle: Vec<(usize, i64)> = chain.into_iter().filter(|&(_, c)| c != 0).collect();
        candidates.push(cycle);
    }
    candidates.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    let mut elim = ModpEliminator::new();
    for col in complex.boundary_columns(2) {
        elim.insert(&col);
    }
    let mut out = Vec::new();
    for c in candidates {
        if out.len() == b1 {
            break;
        }
        if elim.insert(&c) {
            out.push(c);
        }
    }
    out
}

/// Harmonic 1-cochains with periods `2 pi` times the identity on a fixed set
/// of homology generators.
#[derive(Clone, Debug)]
pub struct PeriodBasis {
    pub generators: Vec<Vec<(usize, i64)>>,
    /// Columns `h_i` with `hol_{gamma_j}(h_i) = 2 pi delta_ij`.
    pub columns: DMatrix<f64>,
}

impl PeriodBasis {
    pub fn new(sigma_dec: &Dec, policy: RankPolicy) -> Result<Self> {
        let cx = sigma_dec.complex();
        let generators = homology_generators(cx);
        let h = harmonic_neumann_basis_dec(sigma_dec, 1, policy)?;
        let b = generators.len();
        if h.dim() != b {
            return Err(Error::SolverFailure);
        }
        let hcols = h.basis.columns();
        let periods = DMatrix::from_fn(b, b, |i, j| {
            generators[i]
                .iter()
                .map(|&(e, c)| c as f64 * hcols[(e, j)])
                .sum()
        });
        let inv = periods.try_inverse().ok_or(Error::SolverFailure)?;
        let columns = hcols * inv * TAU;
        Ok(Self { generators, columns })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// `sum_i w_i h_i`.
    pub fn combination(&self, winding: &[i64]) -> Result<DVector<f64>> {
        if winding.len() != self.rank() {
            return Err(Error::WindingLength {
                got: winding.len(),
                expected: self.rank(),
            });
        }
        let w = DVector::from_iterator(winding.len(), winding.iter().map(|&x| x as f64));
        Ok(&self.columns * w)
    }
}

/// Shifts `phi` by the integer-period harmonic combination with the given
/// winding numbers; `phi_dot` is unchanged.
pub fn large_gauge_orbit(
    sigma: &HypersurfaceMesh,
    datum: &BoundaryDatum,
    periods: &PeriodBasis,
    winding: &[i64],
) -> Result<BoundaryDatum> {
    if datum.host() != sigma.complex().host_id() {
        return Err(Error::HostMismatch);
    }
    let shift = periods.combination(winding)?;
    BoundaryDatum::from_values(sigma, datum.phi.values() + shift, datum.phi_dot.values().clone())
}
