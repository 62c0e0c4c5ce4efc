//! Four-way orthogonal decomposition of cochains on a region with boundary,
//! harmonic bases with Neumann and Dirichlet conditions, and combinatorial
//! Betti numbers.
//!
//! All subspaces are computed in whitened coordinates `y = S^{1/2} x`, where
//! the star inner product becomes Euclidean and `d` becomes
//! `S_{k+1}^{1/2} D S_k^{-1/2}`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dec::{Cochain, Dec};
use crate::error::{Error, Result};
use crate::linalg::{integer_rank, null_space, range_basis, RankPolicy, Subspace};
use crate::mesh::{RegionMesh, SimplicialComplex};
use crate::tolerances::Tolerances;

/// Betti number `dim H_k` from integer ranks of the boundary matrices.
pub fn betti_oracle(complex: &SimplicialComplex, k: usize) -> usize {
    if k > complex.dim() {
        return 0;
    }
    let rank_k = integer_rank(&complex.boundary_columns(k));
    let rank_k1 = integer_rank(&complex.boundary_columns(k + 1));
    complex.len(k) - rank_k - rank_k1
}

/// Relative Betti number `dim H_k(M, ∂M)`: boundary simplices are deleted
/// from the chain complex before taking integer ranks.
pub fn relative_betti_oracle(complex: &SimplicialComplex, k: usize) -> usize {
    if k > complex.dim() {
        return 0;
    }
    let interior = |j: usize| -> Vec<Option<usize>> {
        let mut next = 0;
        complex
            .boundary_flags(j)
            .iter()
            .map(|&b| {
                if b {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    };
    let relative_columns = |j: usize| -> Vec<Vec<(usize, i64)>> {
        if j == 0 || j > complex.dim() {
            return Vec::new();
        }
        let rows = interior(j - 1);
        let cols = interior(j);
        complex
            .boundary_columns(j)
            .into_iter()
            .zip(cols)
            .filter(|(_, c)| c.is_some())
            .map(|(col, _)| {
                col.into_iter()
                    .filter_map(|(r, s)| rows[r].map(|r| (r, s)))
                    .collect()
            })
            .collect()
    };
    let n_k = interior(k).iter().filter(|c| c.is_some()).count();
    n_k - integer_rank(&relative_columns(k)) - integer_rank(&relative_columns(k + 1))
}

/// Trace condition imposed on a harmonic basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// Zero normal trace.
    Neumann,
    /// Zero tangential trace.
    Dirichlet,
    /// No trace condition (closed complexes).
    None,
}

/// Orthonormal basis of harmonic fields of one degree.
#[derive(Clone, Debug)]
pub struct HarmonicBasis {
    pub degree: usize,
    pub boundary_condition: BoundaryCondition,
    pub basis: Subspace,
}

impl HarmonicBasis {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn column(&self, dec: &Dec, i: usize) -> Result<Cochain> {
        Cochain::new(dec.complex(), self.degree, self.basis.columns().column(i).into_owned())
    }

    /// `max_i (|d a_i| + |codiff a_i|) / |a_i|` over the basis. The
    /// codifferential is the interior one for Dirichlet fields and the full
    /// adjoint otherwise.
    pub fn max_residual(&self, dec: &Dec) -> Result<f64> {
        let n = dec.dim();
        let k = self.degree;
        let mut worst: f64 = 0.0;
        for i in 0..self.dim() {
            let a = self.column(dec, i)?;
            let norm = dec.norm(&a)?;
            let mut r = 0.0;
            if k < n {
                r += dec.norm(&dec.d(&a)?)?;
            }
            if k > 0 {
                let c = match self.boundary_condition {
                    BoundaryCondition::Dirichlet => dec.codifferential(&a)?,
                    _ => dec.adjoint_codifferential(&a)?,
                };
                r += dec.norm(&c)?;
            }
            worst = worst.max(r / norm);
        }
        Ok(worst)
    }
}

fn stack(top: &DMatrix<f64>, bottom: &DMatrix<f64>, cols: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(top.nrows() + bottom.nrows(), cols);
    if top.nrows() > 0 {
        m.view_mut((0, 0), (top.nrows(), cols)).copy_from(top);
    }
    if bottom.nrows() > 0 {
        m.view_mut((top.nrows(), 0), (bottom.nrows(), cols)).copy_from(bottom);
    }
    m
}

fn whitened_d_or_empty(dec: &Dec, k: usize) -> DMatrix<f64> {
    let n = dec.dim();
    if k < n {
        dec.whitened_d(k)
    } else {
        DMatrix::zeros(0, dec.complex().len(k))
    }
}

/// Harmonic Neumann fields: `d a = 0` and `D^T S a = 0` on every
/// (k−1)-simplex, which combines interior coclosedness with zero normal trace.
pub fn harmonic_neumann_basis_dec(dec: &Dec, k: usize, policy: RankPolicy) -> Result<HarmonicBasis> {
    let nk = dec.complex().len(k);
    let dk = whitened_d_or_empty(dec, k);
    let dkm1_t = if k > 0 {
        dec.whitened_d(k - 1).transpose()
    } else {
        DMatrix::zeros(0, nk)
    };
    let (q, sv) = null_space(&stack(&dk, &dkm1_t, nk), policy, 0.0)?;
    let condition = if dec.complex().is_closed() {
        BoundaryCondition::None
    } else {
        BoundaryCondition::Neumann
    };
    Ok(HarmonicBasis {
        degree: k,
        boundary_condition: condition,
        basis: Subspace::from_whitened(q, dec.star_diag(k), policy.rel, sv),
    })
}

/// Harmonic Dirichlet fields: supported on interior simplices, closed, and
/// orthogonal to `d` of interior-supported (k−1)-cochains.
pub fn harmonic_dirichlet_basis_dec(dec: &Dec, k: usize, policy: RankPolicy) -> Result<HarmonicBasis> {
    let cx = dec.complex();
    let nk = cx.len(k);
    let inner_k: Vec<usize> = (0..nk).filter(|&i| !cx.is_boundary(k, i)).collect();
    let dk = whitened_d_or_empty(dec, k);
    let dk_inner = DMatrix::from_fn(dk.nrows(), inner_k.len(), |r, c| dk[(r, inner_k[c])]);
    let gauge_t = if k > 0 {
        let dm = dec.whitened_d(k - 1);
        let inner_km1: Vec<usize> = (0..cx.len(k - 1)).filter(|&i| !cx.is_boundary(k - 1, i)).collect();
        DMatrix::from_fn(inner_km1.len(), inner_k.len(), |r, c| dm[(inner_k[c], inner_km1[r])])
    } else {
        DMatrix::zeros(0, inner_k.len())
    };
    let (q_inner, sv) = null_space(&stack(&dk_inner, &gauge_t, inner_k.len()), policy, 0.0)?;
    let mut q = DMatrix::zeros(nk, q_inner.ncols());
    for (r, &i) in inner_k.iter().enumerate() {
        q.row_mut(i).copy_from(&q_inner.row(r));
    }
    Ok(HarmonicBasis {
        degree: k,
        boundary_condition: BoundaryCondition::Dirichlet,
        basis: Subspace::from_whitened(q, dec.star_diag(k), policy.rel, sv),
    })
}

pub fn harmonic_neumann_basis(mesh: &RegionMesh, k: usize) -> Result<HarmonicBasis> {
    harmonic_neumann_basis_dec(&Dec::region(mesh), k, RankPolicy::default())
}

pub fn harmonic_dirichlet_basis(mesh: &RegionMesh, k: usize) -> Result<HarmonicBasis> {
    harmonic_dirichlet_basis_dec(&Dec::region(mesh), k, RankPolicy::default())
}

/// The four components of a k-cochain.
#[derive(Clone, Debug)]
pub struct HmfDecomposition {
    /// `d` of a (k−1)-cochain vanishing on the boundary.
    pub exact_dirichlet: Cochain,
    /// Codifferential of a (k+1)-cochain, orthogonal to all closed cochains.
    pub coexact_neumann: Cochain,
    /// Closed, coclosed, zero normal trace.
    pub harmonic_neumann: Cochain,
    /// Closed, coclosed in the interior, and exact.
    pub harmonic_exact: Cochain,
    /// `|sum of components − input| / |input|`.
    pub residual_norm: f64,
}

impl HmfDecomposition {
    pub fn components(&self) -> [&Cochain; 4] {
        [
            &self.exact_dirichlet,
            &self.coexact_neumann,
            &self.harmonic_neumann,
            &self.harmonic_exact,
        ]
    }
}

/// Dimensions and conditioning of the decomposition subspaces.
#[derive(Clone, Debug, Serialize)]
pub struct HmfDimensions {
    pub degree: usize,
    pub cochain_dim: usize,
    pub exact_dirichlet: usize,
    pub coexact_neumann: usize,
    pub harmonic_neumann: usize,
    pub harmonic_exact: usize,
    /// Ratio of largest to smallest retained singular value over the three
    /// factorizations.
    pub condition_estimate: f64,
}

/// Precomputed orthonormal bases for repeated decompositions on one mesh.
pub struct HmfSolver<'a> {
    dec: Dec<'a>,
    degree: usize,
    exact_dirichlet: DMatrix<f64>,
    coexact_neumann: DMatrix<f64>,
    harmonic_neumann: DMatrix<f64>,
    sqrt_star: DVector<f64>,
    dims: HmfDimensions,
}

fn condition(sv: &[f64], rank: usize) -> f64 {
    if rank == 0 {
        1.0
    } else {
        sv[0] / sv[rank - 1]
    }
}

impl<'a> HmfSolver<'a> {
    pub fn new(dec: Dec<'a>, degree: usize, policy: RankPolicy) -> Result<Self> {
        let cx = dec.complex();
        let n = dec.dim();
        if degree > n {
            return Err(Error::DegreeOutOfRange { degree, dim: n });
        }
        let nk = cx.len(degree);
        let (exact_dirichlet, sv_e, exact_all) = if degree > 0 {
            let dm = dec.whitened_d(degree - 1);
            let inner: Vec<usize> = (0..cx.len(degree - 1))
                .filter(|&i| !cx.is_boundary(degree - 1, i))
                .collect();
            let dm_inner = DMatrix::from_fn(nk, inner.len(), |r, c| dm[(r, inner[c])]);
            let (q, sv) = range_basis(&dm_inner, policy, 0.0)?;
            let (q_all, _) = range_basis(&dm, policy, 0.0)?;
            (q, sv, q_all.ncols())
        } else {
            (DMatrix::zeros(nk, 0), Vec::new(), 0)
        };
        let (coexact_neumann, sv_c) = if degree < n {
            range_basis(&dec.whitened_d(degree).transpose(), policy, 0.0)?
        } else {
            (DMatrix::zeros(nk, 0), Vec::new())
        };
        let harmonic = harmonic_neumann_basis_dec(&dec, degree, policy)?;
        let harmonic_neumann = harmonic.basis.whitened();
        let sv_h = harmonic.basis.singular_values().to_vec();
        let rank_h = nk - harmonic_neumann.ncols();
        let condition_estimate = condition(&sv_e, exact_dirichlet.ncols())
            .max(condition(&sv_c, coexact_neumann.ncols()))
            .max(condition(&sv_h, rank_h.min(sv_h.len())));
        let dims = HmfDimensions {
            degree,
            cochain_dim: nk,
            exact_dirichlet: exact_dirichlet.ncols(),
            coexact_neumann: coexact_neumann.ncols(),
            harmonic_neumann: harmonic_neumann.ncols(),
            harmonic_exact: exact_all - exact_dirichlet.ncols(),
            condition_estimate,
        };
        Ok(Self {
            sqrt_star: dec.star_diag(degree).map(f64::sqrt),
            dec,
            degree,
            exact_dirichlet,
            coexact_neumann,
            harmonic_neumann,
            dims,
        })
    }

    pub fn for_region(mesh: &'a RegionMesh, degree: usize) -> Result<Self> {
        Self::new(Dec::region(mesh), degree, RankPolicy::default())
    }

    pub fn dimensions(&self) -> &HmfDimensions {
        &self.dims
    }

    pub fn decompose(&self, a: &Cochain) -> Result<HmfDecomposition> {
        let cx = self.dec.complex();
        if a.degree() != self.degree || a.host() != cx.host_id() || a.is_dual() {
            return Err(Error::HostMismatch);
        }
        let y = a.values().component_mul(&self.sqrt_star);
        let project = |q: &DMatrix<f64>| -> DVector<f64> {
            let p = q * (q.transpose() * &y);
            p.component_div(&self.sqrt_star)
        };
        let e = project(&self.exact_dirichlet);
        let c = project(&self.coexact_neumann);
        let h = project(&self.harmonic_neumann);
        let rest = a.values() - &e - &c - &h;
        let make = |v: DVector<f64>| Cochain::new(cx, self.degree, v);
        let out = HmfDecomposition {
            exact_dirichlet: make(e)?,
            coexact_neumann: make(c)?,
            harmonic_neumann: make(h)?,
            harmonic_exact: make(rest)?,
            residual_norm: 0.0,
        };
        let sum = out
            .components()
            .iter()
            .fold(DVector::zeros(a.values().len()), |acc, c| acc + c.values());
        let norm = self.dec.norm(a)?;
        let diff = Cochain::new(cx, self.degree, sum - a.values())?;
        let residual = self.dec.norm(&diff)?;
        Ok(HmfDecomposition {
            residual_norm: if norm > 0.0 { residual / norm } else { residual },
            ..out
        })
    }

    /// Largest `|<c_i, c_j>| / |a|^2` over distinct component pairs.
    pub fn orthogonality_defect(&self, a: &Cochain, dec: &HmfDecomposition) -> Result<f64> {
        let norm2 = self.dec.inner_product(a, a)?;
        let comps = dec.components();
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                worst = worst.max(self.dec.inner_product(comps[i], comps[j])?.abs());
            }
        }
        Ok(if norm2 > 0.0 { worst / norm2 } else { worst })
    }

    /// Largest `|decompose(c)_i − c| / |a|` over components `c`: each
    /// component decomposes into itself.
    pub fn idempotence_defect(&self, a: &Cochain, dec: &HmfDecomposition) -> Result<f64> {
        let norm = self.dec.norm(a)?;
        let mut worst: f64 = 0.0;
        for (i, c) in dec.components().iter().enumerate() {
            let again = self.decompose(c)?;
            let same = again.components()[i];
            let diff = Cochain::new(self.dec.complex(), self.degree, same.values() - c.values())?;
            worst = worst.max(self.dec.norm(&diff)?);
        }
        Ok(if norm > 0.0 { worst / norm } else { worst })
    }
}

/// Decomposes a single cochain on a region.
pub fn hmf_decompose(a: &Cochain, mesh: &RegionMesh) -> Result<HmfDecomposition> {
    HmfSolver::for_region(mesh, a.degree())?.decompose(a)
}

/// JSON summary of a decomposition run.
#[derive(Clone, Debug, Serialize)]
pub struct HmfReport {
    pub mesh: String,
    pub dimensions: HmfDimensions,
    pub trials: usize,
    pub max_orthogonality: f64,
    pub max_reconstruction: f64,
    pub max_idempotence: f64,
    pub mean_component_norms: [f64; 4],
    pub passed: bool,
}

/// Decomposes `trials` random k-cochains (entries uniform in `[-1, 1)`) and
/// gates orthogonality, reconstruction and idempotence.
pub fn hmf_report(mesh: &RegionMesh, degree: usize, tol: &Tolerances, trials: usize, seed: u64) -> Result<HmfReport> {
    let solver = HmfSolver::new(Dec::region(mesh), degree, RankPolicy::from(tol))?;
    let dec = Dec::region(mesh);
    let cx = mesh.complex();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut orth, mut recon, mut idem) = (0.0f64, 0.0f64, 0.0f64);
    let mut norms = [0.0; 4];
    for _ in 0..trials {
        let v = DVector::from_fn(cx.len(degree), |_, _| rng.gen_range(-1.0..1.0));
        let a = Cochain::new(cx, degree, v)?;
        let parts = solver.decompose(&a)?;
        orth = orth.max(solver.orthogonality_defect(&a, &parts)?);
        recon = recon.max(parts.residual_norm);
        idem = idem.max(solver.idempotence_defect(&a, &parts)?);
        for (n, c) in norms.iter_mut().zip(parts.components()) {
            *n += dec.norm(c)? / trials.max(1) as f64;
        }
    }
    Ok(HmfReport {
        mesh: mesh.name().to_string(),
        dimensions: solver.dimensions().clone(),
        trials,
        max_orthogonality: orth,
        max_reconstruction: recon,
        max_idempotence: idem,
        mean_component_norms: norms,
        passed: orth <= tol.hmf && recon <= tol.hmf && idem <= tol.hmf_idempotence,
    })
}

/// Splits a coclosed 1-cochain on a hypersurface into its harmonic part and a
/// coexact remainder.
pub fn coclosed_decompose(phi: &Cochain, dec: &Dec, coclosed_tol: f64, policy: RankPolicy) -> Result<(Cochain, Cochain)> {
    let defect = coclosed_defect(phi, dec)?;
    if defect > coclosed_tol {
        return Err(Error::NotCoclosed {
            defect,
            tolerance: coclosed_tol,
        });
    }
    let h = harmonic_neumann_basis_dec(dec, phi.degree(), policy)?;
    let harmonic = h.basis.project(phi.values());
    let coexact = phi.values() - &harmonic;
    Ok((
        Cochain::new(dec.complex(), phi.degree(), harmonic)?,
        Cochain::new(dec.complex(), phi.degree(), coexact)?,
    ))
}

/// `|codiff_adj phi|` relative to `|phi|` times the largest singular value of
/// the whitened derivative, so the ratio is scale free.
pub fn coclosed_defect(phi: &Cochain, dec: &Dec) -> Result<f64> {
    let k = phi.degree();
    if k == 0 {
        return Ok(0.0);
    }
    let dm = dec.whitened_d(k - 1);
    let y = phi.values().component_mul(&dec.star_diag(k).map(f64::sqrt));
    let num = (dm.transpose() * &y).norm();
    let scale = crate::linalg::spectral_norm(&dm)? * y.norm();
    Ok(if scale > 0.0 { num / scale } else { num })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::builtin;

    #[test]
    fn betti_numbers() {
        assert_eq!(betti_oracle(builtin::disk(8).unwrap().complex(), 1), 0);
        assert_eq!(betti_oracle(builtin::ann8().unwrap().complex(), 1), 1);
        let two = builtin::two_annuli(4).unwrap();
        assert_eq!(betti_oracle(two.complex(), 0), 2);
        assert_eq!(betti_oracle(two.complex(), 1), 2);
        let t = builtin::torus_surface(4, 4).unwrap();
        assert_eq!(betti_oracle(t.complex(), 1), 2);
        assert_eq!(betti_oracle(t.complex(), 2), 1);
    }

    #[test]
    fn relative_betti_numbers() {
        let d = builtin::disk(8).unwrap();
        assert_eq!(relative_betti_oracle(d.complex(), 1), 0);
        assert_eq!(relative_betti_oracle(d.complex(), 2), 1);
        let a = builtin::ann8().unwrap();
        assert_eq!(relative_betti_oracle(a.complex(), 1), 1);
        assert_eq!(relative_betti_oracle(a.complex(), 0), 0);
    }

    #[test]
    fn harmonic_dimensions_match_oracles() {
        for m in [builtin::disk(8).unwrap(), builtin::ann8().unwrap(), builtin::square(2).unwrap()] {
            let dec = Dec::region(&m);
            let hn = harmonic_neumann_basis(&m, 1).unwrap();
            assert_eq!(hn.dim(), betti_oracle(m.complex(), 1), "{}", m.name());
            assert!(hn.max_residual(&dec).unwrap() < 1e-9);
            let hd = harmonic_dirichlet_basis(&m, 1).unwrap();
            assert_eq!(hd.dim(), relative_betti_oracle(m.complex(), 1), "{}", m.name());
            assert!(hd.max_residual(&dec).unwrap() < 1e-9);
        }
    }

    #[test]
    fn exact_dirichlet_input_stays_put() {
        let m = builtin::disk(6).unwrap();
        let cx = m.complex();
        let f: Vec<f64> = (0..cx.len(0)).map(|v| if cx.is_boundary(0, v) { 0.0 } else { 2.0 }).collect();
        let f = Cochain::from_slice(cx, 0, &f).unwrap();
        let df = Dec::region(&m).d(&f).unwrap();
        let h = hmf_decompose(&df, &m).unwrap();
        assert!((h.exact_dirichlet.values() - df.values()).amax() < 1e-12);
        assert!(h.harmonic_exact.values().amax() < 1e-12);
        assert!(h.coexact_neumann.values().amax() < 1e-12);
    }
}
