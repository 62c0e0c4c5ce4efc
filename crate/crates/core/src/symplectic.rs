//! The boundary symplectic form, the bracket, and isotropy / coisotropy /
//! Lagrangian tests for subspaces of boundary data.
//!
//! Data are stacked as `x = (phi, phi_dot)`. With `W` the degree-1 star of the
//! hypersurface and `s` its orientation sign,
//!
//! ```text
//! omega(a, b) = a^T Omega b,   Omega = s/2 [[0, W], [-W, 0]]
//! bracket(a, b) = s <a.phi, b.phi_dot>
//! ```
//!
//! and subspaces are orthonormal for the Gram matrix `diag(W, W)`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::boundary::BoundaryDatum;
use crate::error::{Error, Result};
use crate::linalg::{null_space, svd_sorted, RankPolicy, Subspace};
use crate::mesh::{HypersurfaceMesh, SimplicialComplex};

fn same_host(sigma: &HypersurfaceMesh, a: &BoundaryDatum, b: &BoundaryDatum) -> Result<()> {
    let h = sigma.complex().host_id();
    if a.host() != h || b.host() != h {
        return Err(Error::HostMismatch);
    }
    Ok(())
}

/// Weighted pairing `sum w x y` over the hypersurface edges.
fn pairing(sigma: &HypersurfaceMesh, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    sigma
        .metric()
        .star(1)
        .iter()
        .zip(x.iter().zip(y.iter()))
        .map(|(w, (a, b))| w * a * b)
        .sum()
}

/// `s <a.phi, b.phi_dot>`.
pub fn bracket(sigma: &HypersurfaceMesh, a: &BoundaryDatum, b: &BoundaryDatum) -> Result<f64> {
    same_host(sigma, a, b)?;
    let s = sigma.orientation_sign() as f64;
    Ok(s * pairing(sigma, a.phi.values(), b.phi_dot.values()))
}

/// Sum of absolute summands of both bracket orders, the natural scale for
/// cancellation residuals.
pub fn bracket_scale(sigma: &HypersurfaceMesh, a: &BoundaryDatum, b: &BoundaryDatum) -> f64 {
    let w = sigma.metric().star(1);
    let terms = |x: &DVector<f64>, y: &DVector<f64>| -> f64 {
        w.iter().zip(x.iter().zip(y.iter())).map(|(w, (p, q))| (w * p * q).abs()).sum()
    };
    terms(a.phi.values(), b.phi_dot.values()) + terms(b.phi.values(), a.phi_dot.values())
}

/// Potential on a hypersurface: `theta(eta, X) = -2 s <X, phi_dot(eta)>`,
/// where `x` is a tangential datum and `datum` the data of `eta`.
pub fn theta_on(sigma: &HypersurfaceMesh, x: &DVector<f64>, datum: &BoundaryDatum) -> Result<f64> {
    if datum.host() != sigma.complex().host_id() || x.len() != datum.edge_count() {
        return Err(Error::HostMismatch);
    }
    let s = sigma.orientation_sign() as f64;
    Ok(-2.0 * s * pairing(sigma, x, datum.phi_dot.values()))
}

/// `Omega` for the hypersurface.
pub fn omega_matrix(sigma: &HypersurfaceMesh) -> DMatrix<f64> {
    let w = sigma.metric().star(1);
    let n = w.len();
    let half = 0.5 * sigma.orientation_sign() as f64;
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for (i, &wi) in w.iter().enumerate() {
        m[(i, n + i)] = half * wi;
        m[(n + i, i)] = -half * wi;
    }
    m
}

/// `a^T Omega b`.
pub fn omega(sigma: &HypersurfaceMesh, a: &BoundaryDatum, b: &BoundaryDatum) -> Result<f64> {
    same_host(sigma, a, b)?;
    let w = sigma.metric().star(1);
    let n = w.len();
    let (x, y) = (a.stacked(), b.stacked());
    let half = 0.5 * sigma.orientation_sign() as f64;
    // sparse evaluation of x^T Omega y
    let mut acc = 0.0;
    for i in 0..n {
        acc += half * w[i] * (x[i] * y[n + i] - x[n + i] * y[i]);
    }
    Ok(acc)
}

/// Per-face bracket values and the additivity residual.
#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    pub total: f64,
    pub faces: BTreeMap<String, f64>,
    pub residual: f64,
    pub scale: f64,
    pub relative: f64,
}

/// Checks that the bracket on `sigma` is the sum of the brackets on its
/// labelled faces.
pub fn face_factorization_check(
    sigma: &HypersurfaceMesh,
    ambient: &SimplicialComplex,
    a: &BoundaryDatum,
    b: &BoundaryDatum,
) -> Result<FactorizationReport> {
    same_host(sigma, a, b)?;
    let faces = sigma.faces(ambient)?;
    let k = sigma.dim();
    let covered: usize = faces.values().map(|f| f.complex().len(k)).sum();
    if covered != sigma.complex().len(k) {
        return Err(Error::NotAPartition(format!(
            "{covered} facets in faces, {} in the hypersurface",
            sigma.complex().len(k)
        )));
    }
    let total = bracket(sigma, a, b)?;
    let mut per_face = BTreeMap::new();
    let mut sum = 0.0;
    for (label, face) in &faces {
        let fa = a.restrict(sigma, face)?;
        let fb = b.restrict(sigma, face)?;
        let v = bracket(face, &fa, &fb)?;
        sum += v;
        per_face.insert(label.clone(), v);
    }
    let scale = bracket_scale(sigma, a, b);
    let residual = (total - sum).abs();
    Ok(FactorizationReport {
        total,
        faces: per_face,
        residual,
        scale,
        relative: if scale > 0.0 { residual / scale } else { residual },
    })
}

/// A space of boundary data with its symplectic form and a domain subspace
/// (the whole space, or the coclosed gauge).
#[derive(Clone, Debug)]
pub struct SymplecticSpace {
    omega_matrix: DMatrix<f64>,
    gram: DVector<f64>,
    domain: Subspace,
    policy: RankPolicy,
}

impl SymplecticSpace {
    /// All data `(phi, phi_dot)` on `sigma`.
    pub fn full(sigma: &HypersurfaceMesh, policy: RankPolicy) -> Self {
        let gram = Self::gram_of(sigma);
        Self {
            omega_matrix: omega_matrix(sigma),
            domain: Subspace::whole(gram.clone()),
            gram,
            policy,
        }
    }

    /// The coclosed gauge: both components orthogonal to exact 1-cochains.
    pub fn gauge_fixed(sigma: &HypersurfaceMesh, policy: RankPolicy) -> Result<Self> {
        let gram = Self::gram_of(sigma);
        let n = sigma.complex().len(1);
        let dec = crate::dec::Dec::hypersurface(sigma);
        let coclosed = if n > 0 {
            let (q, _) = null_space(&dec.whitened_d(0).transpose(), policy, 0.0)?;
            q
        } else {
            DMatrix::zeros(0, 0)
        };
        let m = coclosed.ncols();
        let mut whitened = DMatrix::zeros(2 * n, 2 * m);
        if m > 0 {
            whitened.view_mut((0, 0), (n, m)).copy_from(&coclosed);
            whitened.view_mut((n, m), (n, m)).copy_from(&coclosed);
        }
        Ok(Self {
            omega_matrix: omega_matrix(sigma),
            domain: Subspace::from_whitened(whitened, gram.clone(), policy.rel, Vec::new()),
            gram,
            policy,
        })
    }

    fn gram_of(sigma: &HypersurfaceMesh) -> DVector<f64> {
        let w = sigma.metric().star(1);
        DVector::from_iterator(2 * w.len(), w.iter().chain(w.iter()).copied())
    }

    pub fn ambient_dim(&self) -> usize {
        self.gram.len()
    }

    pub fn omega_matrix(&self) -> &DMatrix<f64> {
        &self.omega_matrix
    }

    pub fn gram(&self) -> &DVector<f64> {
        &self.gram
    }

    pub fn domain(&self) -> &Subspace {
        &self.domain
    }

    pub fn policy(&self) -> RankPolicy {
        self.policy
    }

    /// `Omega` in whitened coordinates `G^{-1/2} Omega G^{-1/2}`.
    pub fn whitened_omega(&self) -> DMatrix<f64> {
        let s = self.gram.map(|g| 1.0 / g.sqrt());
        DMatrix::from_fn(self.gram.len(), self.gram.len(), |r, c| {
            self.omega_matrix[(r, c)] * s[r] * s[c]
        })
    }

    /// Scale used as the absolute rank reference: the spectral norm of the
    /// whitened form (it is diagonal up to a block swap).
    pub fn omega_scale(&self) -> f64 {
        let n = self.gram.len() / 2;
        (0..n)
            .map(|i| self.omega_matrix[(i, n + i)].abs() / self.gram[i])
            .fold(0.0, f64::max)
    }

    /// Subspace spanned by data vectors (columns of `x`).
    pub fn span(&self, x: &DMatrix<f64>) -> Result<Subspace> {
        Subspace::from_spanning(x, &self.gram, self.policy)
    }

    /// Singular values of `Omega` restricted to the domain, decreasing.
    pub fn restricted_singular_values(&self) -> Result<Vec<f64>> {
        let b = self.domain.whitened();
        let m = b.transpose() * self.whitened_omega() * &b;
        Ok(svd_sorted(&m)?.singular_values)
    }

    /// Omega-complement of `v` inside the domain.
    pub fn symplectic_complement(&self, v: &Subspace) -> Result<Subspace> {
        if v.ambient_dim() != self.ambient_dim() {
            return Err(Error::HostMismatch);
        }
        let b = self.domain.whitened();
        if v.dim() == 0 {
            return Ok(self.domain.clone());
        }
        let m = v.whitened().transpose() * self.whitened_omega() * &b;
        let (coeffs, sv) = null_space(&m, self.policy, self.omega_scale())?;
        let whitened = &b * coeffs;
        Ok(Subspace::from_whitened(whitened, self.gram.clone(), self.policy.rel, sv))
    }

    /// `max |omega(v_i, v_j)|` over an orthonormal basis, relative to the
    /// scale of the form.
    pub fn isotropy_residual(&self, v: &Subspace) -> f64 {
        if v.dim() == 0 {
            return 0.0;
        }
        let w = v.whitened();
        let m = w.transpose() * self.whitened_omega() * &w;
        let scale = self.omega_scale();
        if scale > 0.0 {
            m.amax() / scale
        } else {
            m.amax()
        }
    }

    pub fn is_isotropic(&self, v: &Subspace, tol: f64) -> (bool, f64) {
        let r = self.isotropy_residual(v);
        (r <= tol, r)
    }

    /// Whether the complement lies inside `v`, with the largest principal angle.
    pub fn is_coisotropic(&self, v: &Subspace, angle_tol: f64) -> Result<(bool, f64, Subspace)> {
        let c = self.symplectic_complement(v)?;
        let angle = v.max_angle_to(&c)?;
        Ok((angle <= angle_tol, angle, c))
    }

    pub fn is_lagrangian(&self, v: &Subspace, iso_tol: f64, angle_tol: f64) -> Result<LagrangianDiagnostics> {
        let (isotropic, isotropy_residual) = self.is_isotropic(v, iso_tol);
        let (coisotropic, max_angle, c) = self.is_coisotropic(v, angle_tol)?;
        Ok(LagrangianDiagnostics {
            dim: v.dim(),
            complement_dim: c.dim(),
            domain_dim: self.domain.dim(),
            isotropy_residual,
            max_angle,
            isotropic,
            coisotropic,
            lagrangian: isotropic && coisotropic,
            complement_singular_values: c.singular_values().to_vec(),
        })
    }
}

/// Outcome of a Lagrangian test.
#[derive(Clone, Debug, Serialize)]
pub struct LagrangianDiagnostics {
    pub dim: usize,
    pub complement_dim: usize,
    pub domain_dim: usize,
    pub isotropy_residual: f64,
    /// Largest principal angle of the complement against the subspace.
    pub max_angle: f64,
    pub isotropic: bool,
    pub coisotropic: bool,
    pub lagrangian: bool,
    pub complement_singular_values: Vec<f64>,
}
