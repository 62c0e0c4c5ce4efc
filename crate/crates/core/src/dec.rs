//! Cochains and the diagonal-star cochain calculus.
//!
//! The codifferential is fixed by adjointness with the exterior derivative:
//! writing `D` for the coboundary and `S_k` for the diagonal star,
//!
//! ```text
//! <d b, a>_k = <b, codiff a>_{k-1} + sum over boundary (k-1)-simplices s of b_s (D^T S_k a)_s
//! ```
//!
//! where `codiff a = S_{k-1}^{-1} D^T S_k a` on interior simplices and zero on
//! boundary ones. The boundary values `(D^T S_k a)_s` form the discrete
//! Neumann trace: they are the coefficients of `a` on dual cells cut open by
//! the boundary.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{HypersurfaceMesh, Metric, RegionMesh, SimplicialComplex};

/// A real value per k-simplex (primal) or per dual (n−k)-cell, indexed by
/// the k-simplex it is dual to.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    degree: usize,
    dual: bool,
    host: u64,
    values: DVector<f64>,
}

impl Cochain {
    pub fn new(complex: &SimplicialComplex, degree: usize, values: DVector<f64>) -> Result<Self> {
        if degree > complex.dim() {
            return Err(Error::DegreeOutOfRange {
                degree,
                dim: complex.dim(),
            });
        }
        if values.len() != complex.len(degree) {
            return Err(Error::HostMismatch);
        }
        Ok(Self {
            degree,
            dual: false,
            host: complex.host_id(),
            values,
        })
    }

    pub fn from_slice(complex: &SimplicialComplex, degree: usize, values: &[f64]) -> Result<Self> {
        Self::new(complex, degree, DVector::from_column_slice(values))
    }

    pub fn zeros(complex: &SimplicialComplex, degree: usize) -> Result<Self> {
        Self::new(complex, degree, DVector::zeros(complex.len(degree)))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_dual(&self) -> bool {
        self.dual
    }

    pub fn host(&self) -> u64 {
        self.host
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn into_values(self) -> DVector<f64> {
        self.values
    }

    /// Value on a simplex given as an oriented vertex tuple: the stored value
    /// times the parity of the tuple relative to its sorted form.
    pub fn value_on(&self, complex: &SimplicialComplex, tuple: &[usize]) -> Option<f64> {
        let (sorted, parity) = crate::mesh::sort_with_parity(tuple);
        let i = complex.index_of(self.degree, &sorted)?;
        Some(parity as f64 * self.values[i])
    }

    fn with_values(&self, values: DVector<f64>) -> Self {
        Self {
            values,
            ..self.clone()
        }
    }

    /// Writes `simplex,vertices,value` rows.
    pub fn write_csv<W: Write>(&self, complex: &SimplicialComplex, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["simplex", "vertices", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            let verts = complex
                .simplex(self.degree, i)
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            w.write_record([i.to_string(), verts, format!("{v:e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Result of the discrete Stokes check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AdjointnessDefect {
    /// `<d b, a> − <b, codiff a> − boundary pairing`.
    pub defect: f64,
    /// Sum of absolute summands of `<d b, a>` and of the boundary pairing.
    pub scale: f64,
}

impl AdjointnessDefect {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.defect.abs() / self.scale
        } else {
            self.defect.abs()
        }
    }
}

/// Cochain calculus on a complex with a diagonal metric.
#[derive(Clone, Copy)]
pub struct Dec<'a> {
    complex: &'a SimplicialComplex,
    metric: &'a Metric,
}

impl<'a> Dec<'a> {
    pub fn new(complex: &'a SimplicialComplex, metric: &'a Metric) -> Self {
        Self { complex, metric }
    }

    pub fn region(mesh: &'a RegionMesh) -> Self {
        Self::new(mesh.complex(), mesh.metric())
    }

    pub fn hypersurface(mesh: &'a HypersurfaceMesh) -> Self {
        Self::new(mesh.complex(), mesh.metric())
    }

    pub fn complex(&self) -> &'a SimplicialComplex {
        self.complex
    }

    pub fn metric(&self) -> &'a Metric {
        self.metric
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    fn check(&self, a: &Cochain) -> Result<()> {
        if a.host != self.complex.host_id() || a.values.len() != self.complex.len(a.degree) {
            return Err(Error::HostMismatch);
        }
        Ok(())
    }

    fn check_primal(&self, a: &Cochain) -> Result<()> {
        self.check(a)?;
        if a.dual {
            return Err(Error::HostMismatch);
        }
        Ok(())
    }

    /// Diagonal of the degree-k star as a vector.
    pub fn star_diag(&self, k: usize) -> DVector<f64> {
        DVector::from_column_slice(self.metric.star(k))
    }

    /// `d_k` on raw values.
    pub fn d_values(&self, k: usize, x: &DVector<f64>) -> DVector<f64> {
        self.complex.coboundary(k, x)
    }

    /// `D^T S_k a` on raw values: the adjoint pairing before dividing by the
    /// (k−1)-star.
    pub fn weighted_transpose(&self, k: usize, a: &DVector<f64>) -> DVector<f64> {
        let sa = a.component_mul(&self.star_diag(k));
        self.complex.coboundary_transpose(k - 1, &sa)
    }

    /// Exterior derivative.
    pub fn d(&self, a: &Cochain) -> Result<Cochain> {
        self.check_primal(a)?;
        let n = self.dim();
        if a.degree >= n {
            return Err(Error::DegreeOutOfRange {
                degree: a.degree,
                dim: n,
            });
        }
        Ok(Cochain {
            degree: a.degree + 1,
            dual: false,
            host: a.host,
            values: self.d_values(a.degree, &a.values),
        })
    }

    /// Hodge star: a primal k-cochain becomes a dual (n−k)-cochain.
    pub fn star(&self, a: &Cochain) -> Result<Cochain> {
        self.check_primal(a)?;
        Ok(Cochain {
            degree: a.degree,
            dual: true,
            host: a.host,
            values: a.values.component_mul(&self.star_diag(a.degree)),
        })
    }

    /// Inverse of [`Dec::star`].
    pub fn unstar(&self, a: &Cochain) -> Result<Cochain> {
        self.check(a)?;
        if !a.dual {
            return Err(Error::HostMismatch);
        }
        Ok(Cochain {
            degree: a.degree,
            dual: false,
            host: a.host,
            values: a.values.component_div(&self.star_diag(a.degree)),
        })
    }

    fn degree_at_least_one(&self, a: &Cochain) -> Result<()> {
        if a.degree == 0 {
            return Err(Error::DegreeOutOfRange {
                degree: 0,
                dim: self.dim(),
            });
        }
        Ok(())
    }

    /// Codifferential on interior (k−1)-simplices; zero on boundary simplices,
    /// whose dual cells are cut open.
    pub fn codifferential(&self, a: &Cochain) -> Result<Cochain> {
        self.check_primal(a)?;
        self.degree_at_least_one(a)?;
        let k = a.degree;
        let mut v = self
            .weighted_transpose(k, &a.values)
            .component_div(&self.star_diag(k - 1));
        for (i, &b) in self.complex.boundary_flags(k - 1).iter().enumerate() {
            if b {
                v[i] = 0.0;
            }
        }
        Ok(a.with_values(v).with_degree(k - 1))
    }

    /// `S_{k−1}^{-1} D^T S_k`, the exact adjoint of `d` including boundary
    /// simplices.
    pub fn adjoint_codifferential(&self, a: &Cochain) -> Result<Cochain> {
        self.check_primal(a)?;
        self.degree_at_least_one(a)?;
        let k = a.degree;
        let v = self
            .weighted_transpose(k, &a.values)
            .component_div(&self.star_diag(k - 1));
        Ok(a.with_values(v).with_degree(k - 1))
    }

    /// Discrete Neumann trace `(D^T S_k a)` on boundary (k−1)-simplices, zero
    /// elsewhere.
    pub fn neumann_trace(&self, a: &Cochain) -> Result<Cochain> {
        self.check_primal(a)?;
        self.degree_at_least_one(a)?;
        let k = a.degree;
        let mut v = self.weighted_transpose(k, &a.values);
        for (i, &b) in self.complex.boundary_flags(k - 1).iter().enumerate() {
            if !b {
                v[i] = 0.0;
            }
        }
        Ok(a.with_values(v).with_degree(k - 1))
    }

    /// `sum S_k a b`.
    pub fn inner_product(&self, a: &Cochain, b: &Cochain) -> Result<f64> {
        self.check_primal(a)?;
        self.check_primal(b)?;
        if a.degree != b.degree || a.host != b.host {
            return Err(Error::HostMismatch);
        }
        Ok(self.inner_values(a.degree, &a.values, &b.values))
    }

    pub fn inner_values(&self, k: usize, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        self.metric
            .star(k)
            .iter()
            .zip(a.iter().zip(b.iter()))
            .map(|(s, (x, y))| s * x * y)
            .sum()
    }

    pub fn norm(&self, a: &Cochain) -> Result<f64> {
        Ok(self.inner_product(a, a)?.max(0.0).sqrt())
    }

    /// `<d b, a> − <b, codiff a> − sum_boundary b (D^T S a)`.
    pub fn adjointness_defect(&self, b: &Cochain, a: &Cochain) -> Result<AdjointnessDefect> {
        self.check_primal(a)?;
        self.check_primal(b)?;
        if a.degree != b.degree + 1 {
            return Err(Error::DegreeOutOfRange {
                degree: a.degree,
                dim: self.dim(),
            });
        }
        let db = self.d(b)?;
        let lhs_terms: Vec<f64> = (0..a.values.len())
            .map(|i| self.metric.star(a.degree)[i] * db.values[i] * a.values[i])
            .collect();
        let lhs: f64 = lhs_terms.iter().sum();
        let rhs = self.inner_product(b, &self.codifferential(a)?)?;
        let trace = self.neumann_trace(a)?;
        let boundary_terms: Vec<f64> = b
            .values
            .iter()
            .zip(trace.values.iter())
            .map(|(x, y)| x * y)
            .collect();
        let boundary: f64 = boundary_terms.iter().sum();
        let scale = lhs_terms.iter().chain(&boundary_terms).map(|t| t.abs()).sum();
        Ok(AdjointnessDefect {
            defect: lhs - rhs - boundary,
            scale,
        })
    }

    /// `codiff_adj d + d codiff_adj`, the Hodge Laplacian built from the exact
    /// adjoint.
    pub fn laplacian(&self, a: &Cochain) -> Result<Cochain> {
        self.check_primal(a)?;
        let k = a.degree;
        let n = self.dim();
        let mut v = DVector::zeros(a.values.len());
        if k < n {
            v += self.adjoint_codifferential(&self.d(a)?)?.values;
        }
        if k > 0 {
            v += self.d(&self.adjoint_codifferential(a)?)?.values;
        }
        Ok(a.with_values(v))
    }

    /// Dense `d_k` in whitened coordinates: `S_{k+1}^{1/2} D_k S_k^{-1/2}`.
    pub fn whitened_d(&self, k: usize) -> DMatrix<f64> {
        let m = self.complex.coboundary_matrix(k);
        let sr = self.star_diag(k + 1).map(f64::sqrt);
        let sc = self.star_diag(k).map(f64::sqrt);
        DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)] * sr[r] / sc[c])
    }
}

impl Cochain {
    fn with_degree(mut self, degree: usize) -> Self {
        self.degree = degree;
        self
    }
}
