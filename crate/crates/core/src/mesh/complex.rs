use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Vertex coordinates; planar meshes use `z = 0`.
pub type Point = [f64; 3];

/// Sign of the permutation that sorts `tuple`, together with the sorted tuple.
pub fn sort_with_parity(tuple: &[usize]) -> (Vec<usize>, i8) {
    let mut v = tuple.to_vec();
    let mut sign = 1i8;
    // insertion sort, counting transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    (v, sign)
}

/// An oriented simplicial complex of pure dimension `dim`.
///
/// Simplices of every dimension are stored as sorted vertex tuples, indexed
/// lexicographically; the orientation of each top simplex is a separate sign
/// relative to its sorted tuple. Incidence numbers are `(-1)^i` for the face
/// obtained by dropping the i-th sorted vertex, so `boundary ∘ boundary = 0`
/// holds in integer arithmetic.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    dim: usize,
    points: Vec<Point>,
    simplices: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    orientation: Vec<i8>,
    faces: Vec<Vec<Vec<(usize, i8)>>>,
    cofaces: Vec<Vec<Vec<(usize, i8)>>>,
    on_boundary: Vec<Vec<bool>>,
    host_id: u64,
}

impl SimplicialComplex {
    /// Builds the closure of the given oriented top simplices.
    ///
    /// Each entry of `tops` lists `dim + 1` vertex indices; their order fixes
    /// the orientation. Every point must be used by some top simplex.
    pub fn from_top_simplices(dim: usize, points: Vec<Point>, tops: &[Vec<usize>]) -> Result<Self> {
        let mut top_sorted: Vec<(Vec<usize>, i8)> = Vec::with_capacity(tops.len());
        let mut used = vec![false; points.len()];
        for t in tops {
            if t.len() != dim + 1 {
                return Err(Error::InvalidComplex(format!(
                    "simplex {t:?} has {} vertices, expected {}",
                    t.len(),
                    dim + 1
                )));
            }
            for &v in t {
                if v >= points.len() {
                    return Err(Error::InvalidComplex(format!(
                        "simplex {t:?} references missing vertex {v}"
                    )));
                }
                used[v] = true;
            }
            let (s, sign) = sort_with_parity(t);
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidComplex(format!(
                    "simplex {t:?} repeats a vertex"
                )));
            }
            top_sorted.push((s, sign));
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::InvalidComplex(format!(
                "vertex {v} is not used by any simplex"
            )));
        }
        top_sorted.sort();
        for w in top_sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidComplex(format!(
                    "repeated simplex {:?}",
                    w[0].0
                )));
            }
        }

        // all faces, level by level
        let mut simplices: Vec<Vec<Vec<usize>>> = vec![Vec::new(); dim + 1];
        simplices[dim] = top_sorted.iter().map(|(s, _)| s.clone()).collect();
        for k in (0..dim).rev() {
            let mut level: Vec<Vec<usize>> = simplices[k + 1]
                .iter()
                .flat_map(|s| (0..s.len()).map(move |i| drop_vertex(s, i)))
                .collect();
            level.sort();
            level.dedup();
            simplices[k] = level;
        }
        if dim == 0 {
            simplices[0] = (0..points.len()).map(|v| vec![v]).collect();
        }
        let index: Vec<HashMap<Vec<usize>, usize>> = simplices
            .iter()
            .map(|level| level.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        let orientation: Vec<i8> = top_sorted.iter().map(|(_, o)| *o).collect();

        let mut faces: Vec<Vec<Vec<(usize, i8)>>> = vec![Vec::new(); dim + 1];
        let mut cofaces: Vec<Vec<Vec<(usize, i8)>>> =
            simplices.iter().map(|l| vec![Vec::new(); l.len()]).collect();
        for k in 1..=dim {
            faces[k] = simplices[k]
                .iter()
                .enumerate()
                .map(|(si, s)| {
                    (0..s.len())
                        .map(|i| {
                            let f = index[k - 1][&drop_vertex(s, i)];
                            let sign = if i % 2 == 0 { 1 } else { -1 };
                            cofaces[k - 1][f].push((si, sign));
                            (f, sign)
                        })
                        .collect()
                })
                .collect();
        }

        let mut hasher = DefaultHasher::new();
        dim.hash(&mut hasher);
        points.len().hash(&mut hasher);
        simplices[dim].hash(&mut hasher);
        let host_id = hasher.finish();

        let mut complex = Self {
            dim,
            points,
            simplices,
            index,
            orientation,
            faces,
            cofaces,
            on_boundary: Vec::new(),
            host_id,
        };
        complex.check_boundary_squared()?;
        complex.check_manifold_orientation()?;
        complex.on_boundary = complex.compute_boundary_flags();
        Ok(complex)
    }

    /// Complex with no simplices, used for the boundary of a closed region.
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            points: Vec::new(),
            simplices: vec![Vec::new(); dim + 1],
            index: vec![HashMap::new(); dim + 1],
            orientation: Vec::new(),
            faces: vec![Vec::new(); dim + 1],
            cofaces: vec![Vec::new(); dim + 1],
            on_boundary: vec![Vec::new(); dim + 1],
            host_id: 0,
        }
    }

    fn check_boundary_squared(&self) -> Result<()> {
        if !self.boundary_squared_is_zero() {
            return Err(Error::InvalidComplex("boundary of boundary is nonzero".into()));
        }
        Ok(())
    }

    /// `∂_{k-1} ∘ ∂_k = 0` for every k, checked in integer arithmetic.
    pub fn boundary_squared_is_zero(&self) -> bool {
        for k in 2..=self.dim {
            for s in &self.faces[k] {
                let mut acc: HashMap<usize, i64> = HashMap::new();
                for &(f, sf) in s {
                    for &(g, sg) in &self.faces[k - 1][f] {
                        *acc.entry(g).or_insert(0) += (sf as i64) * (sg as i64);
                    }
                }
                if acc.values().any(|&v| v != 0) {
                    return false;
                }
            }
        }
        true
    }

    fn check_manifold_orientation(&self) -> Result<()> {
        if self.dim == 0 {
            return Ok(());
        }
        let k = self.dim - 1;
        for (f, cof) in self.cofaces[k].iter().enumerate() {
            if cof.len() > 2 {
                return Err(Error::NonManifold {
                    facet: self.simplices[k][f].clone(),
                    count: cof.len(),
                });
            }
            if cof.len() == 2 {
                let (t1, s1) = cof[0];
                let (t2, s2) = cof[1];
                let induced1 = self.orientation[t1] * s1;
                let induced2 = self.orientation[t2] * s2;
                if induced1 + induced2 != 0 {
                    return Err(Error::InconsistentOrientation {
                        facet: self.simplices[k][f].clone(),
                    });
                }
            }
        }
        Ok(())
    }

    fn compute_boundary_flags(&self) -> Vec<Vec<bool>> {
        let mut flags: Vec<Vec<bool>> = self.simplices.iter().map(|l| vec![false; l.len()]).collect();
        if self.dim == 0 {
            return flags;
        }
        let k = self.dim - 1;
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for (f, cof) in self.cofaces[k].iter().enumerate() {
            if cof.len() == 1 {
                stack.push((k, f));
            }
        }
        while let Some((level, i)) = stack.pop() {
            if flags[level][i] {
                continue;
            }
            flags[level][i] = true;
            if level > 0 {
                for &(g, _) in &self.faces[level][i] {
                    stack.push((level - 1, g));
                }
            }
        }
        flags
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Fingerprint of the combinatorics; cochains carry it to detect mixing
    /// data from different complexes.
    pub fn host_id(&self) -> u64 {
        self.host_id
    }

    pub fn len(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.iter().all(Vec::is_empty)
    }

    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        &self.simplices[k]
    }

    pub fn simplex(&self, k: usize, i: usize) -> &[usize] {
        &self.simplices[k][i]
    }

    pub fn index_of(&self, k: usize, sorted: &[usize]) -> Option<usize> {
        self.index.get(k)?.get(sorted).copied()
    }

    /// Orientation sign of top simplex `i` relative to its sorted tuple.
    pub fn orientation(&self, i: usize) -> i8 {
        self.orientation[i]
    }

    pub fn orientations(&self) -> &[i8] {
        &self.orientation
    }

    /// Vertex tuple of top simplex `i` in its oriented order.
    pub fn oriented_top(&self, i: usize) -> Vec<usize> {
        let mut t = self.simplices[self.dim][i].clone();
        if self.orientation[i] < 0 && t.len() >= 2 {
            t.swap(0, 1);
        }
        t
    }

    /// Faces of k-simplex `i` with incidence signs (k >= 1).
    pub fn faces(&self, k: usize, i: usize) -> &[(usize, i8)] {
        &self.faces[k][i]
    }

    /// (k+1)-simplices containing k-simplex `i`, with incidence signs.
    pub fn cofaces(&self, k: usize, i: usize) -> &[(usize, i8)] {
        &self.cofaces[k][i]
    }

    /// Whether k-simplex `i` lies in the topological boundary.
    pub fn is_boundary(&self, k: usize, i: usize) -> bool {
        self.on_boundary[k][i]
    }

    pub fn boundary_flags(&self, k: usize) -> &[bool] {
        &self.on_boundary[k]
    }

    /// Indices of (dim-1)-simplices incident to exactly one top simplex.
    pub fn boundary_facets(&self) -> Vec<usize> {
        if self.dim == 0 {
            return Vec::new();
        }
        let k = self.dim - 1;
        (0..self.len(k))
            .filter(|&f| self.cofaces[k][f].len() == 1)
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_facets().is_empty()
    }

    /// Integer columns of `∂_k : C_k → C_{k-1}`.
    pub fn boundary_columns(&self, k: usize) -> Vec<Vec<(usize, i64)>> {
        if k == 0 || k > self.dim {
            return Vec::new();
        }
        self.faces[k]
            .iter()
            .map(|fs| fs.iter().map(|&(f, s)| (f, s as i64)).collect())
            .collect()
    }

    /// Coboundary `d_k : C^k → C^{k+1}` applied to a value vector.
    pub fn coboundary(&self, k: usize, values: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.len(k + 1));
        if k < self.dim {
            for (s, fs) in self.faces[k + 1].iter().enumerate() {
                out[s] = fs.iter().map(|&(f, sign)| sign as f64 * values[f]).sum();
            }
        }
        out
    }

    /// Transpose of the coboundary, `d_k^T : C^{k+1} → C^k`.
    pub fn coboundary_transpose(&self, k: usize, values: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.len(k));
        if k < self.dim {
            for (s, fs) in self.faces[k + 1].iter().enumerate() {
                for &(f, sign) in fs {
                    out[f] += sign as f64 * values[s];
                }
            }
        }
        out
    }

    /// Dense coboundary matrix `d_k` of shape `N_{k+1} × N_k`.
    pub fn coboundary_matrix(&self, k: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.len(k + 1), self.len(k));
        if k < self.dim {
            for (s, fs) in self.faces[k + 1].iter().enumerate() {
                for &(f, sign) in fs {
                    m[(s, f)] = sign as f64;
                }
            }
        }
        m
    }

    /// Connected components of the vertex graph, as a label per vertex.
    pub fn vertex_components(&self) -> (usize, Vec<usize>) {
        let n = self.len(0);
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        if self.dim >= 1 {
            for e in &self.simplices[1] {
                let a = find(&mut parent, e[0]);
                let b = find(&mut parent, e[1]);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut root_label: HashMap<usize, usize> = HashMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            let l = *root_label.entry(r).or_insert_with(|| {
                count += 1;
                count - 1
            });
            label[v] = l;
        }
        (count, label)
    }

    /// Orientation-reversed copy: every top simplex flips sign.
    pub fn reversed(&self) -> Self {
        let mut c = self.clone();
        for o in &mut c.orientation {
            *o = -*o;
        }
        c
    }
}

pub(crate) fn drop_vertex(s: &[usize], i: usize) -> Vec<usize> {
    s.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &v)| v)
        .collect()
}
