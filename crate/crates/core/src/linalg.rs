//! Numerical and exact linear algebra shared by every module: integer ranks
//! over a large prime field, SVD-based numerical rank with an ambiguity
//! check, null spaces, ranges and weighted orthonormal subspaces.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tolerances::{Tolerances, RANK_GAP, RANK_REL};

/// Mersenne prime 2^61 - 1; integer ranks are computed in this field.
pub const PRIME: u64 = (1u64 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    acc
}

fn invmod(a: u64) -> u64 {
    powmod(a, PRIME - 2)
}

fn to_field(v: i64) -> u64 {
    let r = v.rem_euclid(PRIME as i64);
    r as u64
}

/// Incremental column reduction over GF(2^61 - 1).
///
/// Columns are sparse integer vectors; `insert` reports whether a column is
/// independent of those inserted so far.
#[derive(Default, Debug, Clone)]
pub struct ModpEliminator {
    pivots: HashMap<usize, BTreeMap<usize, u64>>,
}

impl ModpEliminator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn reduce(&self, mut col: BTreeMap<usize, u64>) -> BTreeMap<usize, u64> {
        while let Some((&lead, &coef)) = col.iter().next_back() {
            let Some(pivot) = self.pivots.get(&lead) else {
                break;
            };
            // pivot has a 1 at `lead`
            for (&row, &val) in pivot {
                let sub = mulmod(coef, val);
                let entry = col.entry(row).or_insert(0);
                *entry = (*entry + PRIME - sub) % PRIME;
                if *entry == 0 {
                    col.remove(&row);
                }
            }
        }
        col
    }

    /// Returns `true` when the column is independent of the current span.
    pub fn is_independent(&self, column: &[(usize, i64)]) -> bool {
        !self.reduce(Self::field_column(column)).is_empty()
    }

    /// Inserts a column; returns `true` when it increased the rank.
    pub fn insert(&mut self, column: &[(usize, i64)]) -> bool {
        let col = self.reduce(Self::field_column(column));
        let Some((&lead, &coef)) = col.iter().next_back() else {
            return false;
        };
        let inv = invmod(coef);
        let normalized = col.into_iter().map(|(r, v)| (r, mulmod(v, inv))).collect();
        self.pivots.insert(lead, normalized);
        true
    }

    fn field_column(column: &[(usize, i64)]) -> BTreeMap<usize, u64> {
        let mut col = BTreeMap::new();
        for &(row, v) in column {
            let entry = col.entry(row).or_insert(0u64);
            *entry = (*entry + to_field(v)) % PRIME;
        }
        col.retain(|_, v| *v != 0);
        col
    }
}

/// Rank over the rationals of a sparse integer matrix given by columns,
/// computed modulo a 61-bit prime.
pub fn integer_rank(columns: &[Vec<(usize, i64)>]) -> usize {
    let mut elim = ModpEliminator::new();
    for col in columns {
        elim.insert(col);
    }
    elim.rank()
}

/// Numerical rank thresholds.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RankPolicy {
    pub rel: f64,
    pub gap: f64,
}

impl Default for RankPolicy {
    fn default() -> Self {
        Self {
            rel: RANK_REL,
            gap: RANK_GAP,
        }
    }
}

impl From<&Tolerances> for RankPolicy {
    fn from(t: &Tolerances) -> Self {
        Self {
            rel: t.rank_rel,
            gap: t.rank_gap,
        }
    }
}

const SVD_RECON: f64 = 1e-12;

/// Thin SVD with singular values sorted in decreasing order.
pub struct SortedSvd {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub v_t: DMatrix<f64>,
}

/// Unsorted thin SVD, rejected when it does not reconstruct `m` to roundoff.
fn factor(m: &DMatrix<f64>) -> Option<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    let a = faer::Mat::<f64>::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)]);
    let svd = a.thin_svd().ok()?;
    let (fu, fs, fv) = (svd.U(), svd.S().column_vector(), svd.V());
    let k = fs.nrows();
    let u = DMatrix::from_fn(m.nrows(), k, |r, c| fu[(r, c)]);
    let sv = DVector::from_fn(k, |i, _| fs[i]);
    let v_t = DMatrix::from_fn(k, m.ncols(), |r, c| fv[(c, r)]);
    let recon = &u * DMatrix::from_diagonal(&sv) * &v_t;
    let scale = m.amax().max(f64::MIN_POSITIVE);
    if (recon - m).amax() > SVD_RECON * scale * (m.nrows().max(m.ncols()) as f64) {
        return None;
    }
    Some((u, sv, v_t))
}

pub fn svd_sorted(m: &DMatrix<f64>) -> Result<SortedSvd> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(SortedSvd {
            u: DMatrix::zeros(rows, 0),
            singular_values: Vec::new(),
            v_t: DMatrix::zeros(0, cols),
        });
    }
    let (u, sv, v_t) = match factor(m) {
        Some(f) => f,
        None => {
            // retry on the transpose before giving up
            let (u, sv, v_t) = factor(&m.transpose()).ok_or(Error::SolverFailure)?;
            (v_t.transpose(), sv, u.transpose())
        }
    };
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let u = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let v_t = DMatrix::from_fn(order.len(), v_t.ncols(), |r, c| v_t[(order[r], c)]);
    let singular_values = order.iter().map(|&i| sv[i]).collect();
    Ok(SortedSvd {
        u,
        singular_values,
        v_t,
    })
}

/// Numerical rank of a decreasing singular value list.
///
/// The threshold is `policy.rel * max(sigma_max, reference)`; `reference`
/// supplies an absolute magnitude for matrices that may be numerically zero.
pub fn numerical_rank(sv: &[f64], policy: RankPolicy, reference: f64) -> Result<usize> {
    let top = sv.first().copied().unwrap_or(0.0).max(reference);
    if top <= 0.0 {
        return Ok(0);
    }
    let threshold = policy.rel * top;
    let rank = sv.iter().take_while(|&&s| s > threshold).count();
    if rank > 0 && rank < sv.len() {
        let retained = sv[rank - 1];
        let discarded = sv[rank];
        if discarded > 0.0 && retained < policy.gap * discarded {
            return Err(Error::RankAmbiguity {
                threshold,
                retained,
                discarded,
            });
        }
    }
    Ok(rank)
}

/// Orthonormal basis (Euclidean) of the null space of `m`, together with the
/// singular values used to decide the rank.
pub fn null_space(
    m: &DMatrix<f64>,
    policy: RankPolicy,
    reference: f64,
) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok((DMatrix::zeros(0, 0), Vec::new()));
    }
    if rows == 0 {
        return Ok((DMatrix::identity(cols, cols), Vec::new()));
    }
    // the thin SVD only yields a full V when rows >= cols
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = svd_sorted(&padded)?;
    let rank = numerical_rank(&svd.singular_values, policy, reference)?;
    let k = cols - rank;
    let basis = DMatrix::from_fn(cols, k, |r, c| svd.v_t[(rank + c, r)]);
    let mut sv = svd.singular_values;
    sv.truncate(rows.min(cols));
    Ok((basis, sv))
}

/// Orthonormal basis (Euclidean) of the column range of `m`.
pub fn range_basis(
    m: &DMatrix<f64>,
    policy: RankPolicy,
    reference: f64,
) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok((DMatrix::zeros(rows, 0), Vec::new()));
    }
    let svd = svd_sorted(m)?;
    let rank = numerical_rank(&svd.singular_values, policy, reference)?;
    let basis = svd.u.columns(0, rank).into_owned();
    Ok((basis, svd.singular_values))
}

/// Minimum-norm least-squares solution of `m x = b` by SVD.
pub fn lstsq_min_norm(
    m: &DMatrix<f64>,
    b: &DVector<f64>,
    policy: RankPolicy,
) -> Result<DVector<f64>> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(DVector::zeros(cols));
    }
    let svd = svd_sorted(m)?;
    let rank = numerical_rank(&svd.singular_values, policy, 0.0)?;
    let mut x = DVector::zeros(cols);
    for i in 0..rank {
        let coef = svd.u.column(i).dot(b) / svd.singular_values[i];
        x += svd.v_t.row(i).transpose() * coef;
    }
    Ok(x)
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> Result<f64> {
    Ok(svd_sorted(m)?.singular_values.first().copied().unwrap_or(0.0))
}

/// A linear subspace of a weighted coordinate space, stored as a basis that
/// is orthonormal for the diagonal Gram matrix `diag(weights)`.
#[derive(Clone, Debug)]
pub struct Subspace {
    columns: DMatrix<f64>,
    weights: DVector<f64>,
    rank_tolerance: f64,
    singular_values: Vec<f64>,
}

impl Subspace {
    /// Orthonormalizes a spanning set; its rank is read with `policy`.
    pub fn from_spanning(
        vectors: &DMatrix<f64>,
        weights: &DVector<f64>,
        policy: RankPolicy,
    ) -> Result<Self> {
        assert_eq!(vectors.nrows(), weights.len());
        let sqrt_w = weights.map(f64::sqrt);
        let whitened = DMatrix::from_fn(vectors.nrows(), vectors.ncols(), |r, c| {
            vectors[(r, c)] * sqrt_w[r]
        });
        let (q, sv) = range_basis(&whitened, policy, 0.0)?;
        Ok(Self::from_whitened(q, weights.clone(), policy.rel, sv))
    }

    /// Wraps a basis that is already orthonormal in whitened coordinates.
    pub fn from_whitened(
        whitened: DMatrix<f64>,
        weights: DVector<f64>,
        rank_tolerance: f64,
        singular_values: Vec<f64>,
    ) -> Self {
        let columns = DMatrix::from_fn(whitened.nrows(), whitened.ncols(), |r, c| {
            whitened[(r, c)] / weights[r].sqrt()
        });
        Self {
            columns,
            weights,
            rank_tolerance,
            singular_values,
        }
    }

    pub fn zero(weights: DVector<f64>) -> Self {
        let n = weights.len();
        Self::from_whitened(DMatrix::zeros(n, 0), weights, RANK_REL, Vec::new())
    }

    pub fn whole(weights: DVector<f64>) -> Self {
        let n = weights.len();
        Self::from_whitened(DMatrix::identity(n, n), weights, RANK_REL, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.columns.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn columns(&self) -> &DMatrix<f64> {
        &self.columns
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn rank_tolerance(&self) -> f64 {
        self.rank_tolerance
    }

    /// Singular values of the spanning set this subspace was built from.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Columns in whitened (Euclidean-orthonormal) coordinates.
    pub fn whitened(&self) -> DMatrix<f64> {
        let sqrt_w = self.weights.map(f64::sqrt);
        DMatrix::from_fn(self.columns.nrows(), self.columns.ncols(), |r, c| {
            self.columns[(r, c)] * sqrt_w[r]
        })
    }

    /// Weighted inner product.
    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.iter()
            .zip(b.iter())
            .zip(self.weights.iter())
            .map(|((x, y), w)| x * y * w)
            .sum()
    }

    /// Coefficients of the orthogonal projection of `x` in this basis.
    pub fn coefficients(&self, x: &DVector<f64>) -> DVector<f64> {
        let wx = x.component_mul(&self.weights);
        self.columns.transpose() * wx
    }

    /// Orthogonal projection of `x` onto the subspace.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.columns * self.coefficients(x)
    }

    /// `max |C^T G C - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let w = self.whitened();
        let g = w.transpose() * &w;
        let k = g.nrows();
        (g - DMatrix::identity(k, k)).amax()
    }

    /// Sines of the principal angles of `other` measured against `self`, in
    /// decreasing order. All zero exactly when `other` lies inside `self`.
    pub fn containment_sines(&self, other: &Subspace) -> Result<Vec<f64>> {
        assert_eq!(self.ambient_dim(), other.ambient_dim());
        if other.dim() == 0 {
            return Ok(Vec::new());
        }
        let a = self.whitened();
        let b = other.whitened();
        let residual = &b - &a * (a.transpose() * &b);
        let svd = svd_sorted(&residual)?;
        let mut s: Vec<f64> = svd.singular_values.iter().map(|v| v.min(1.0)).collect();
        // thin SVD returns min(n, k) values; pad for the remaining directions
        s.resize(other.dim(), 0.0);
        Ok(s)
    }

    /// Largest principal angle (radians) of `other` relative to `self`.
    pub fn max_angle_to(&self, other: &Subspace) -> Result<f64> {
        Ok(self
            .containment_sines(other)?
            .first()
            .map(|s| s.asin())
            .unwrap_or(0.0))
    }

    /// Whether `other` lies inside `self` with every principal angle at most
    /// `angle_tol` radians.
    pub fn contains(&self, other: &Subspace, angle_tol: f64) -> Result<bool> {
        Ok(self.max_angle_to(other)? <= angle_tol)
    }

    /// Principal angles (radians, increasing) between the two subspaces.
    pub fn principal_angles(&self, other: &Subspace) -> Result<Vec<f64>> {
        let a = self.whitened();
        let b = other.whitened();
        let k = self.dim().min(other.dim());
        if k == 0 {
            return Ok(Vec::new());
        }
        let svd = svd_sorted(&(a.transpose() * b))?;
        Ok(svd
            .singular_values
            .iter()
            .take(k)
            .map(|c| c.clamp(-1.0, 1.0).acos())
            .collect())
    }

    /// Embeds coefficients into ambient coordinates.
    pub fn combine(&self, coefficients: &DVector<f64>) -> DVector<f64> {
        &self.columns * coefficients
    }
}
