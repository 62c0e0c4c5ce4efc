use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::complex::{sort_with_parity, Point, SimplicialComplex};
use super::metric::Metric;
use crate::error::{Error, Result};

/// An oriented (n−1)-dimensional piece of the boundary of a region: the whole
/// boundary, one labelled face, or a union of faces.
///
/// Vertices are renumbered monotonically from the ambient region, so sorted
/// tuples (and hence canonical simplex orientations) agree with the ambient
/// ones. `simplex_map[k][i]` is the ambient index of k-simplex `i`.
#[derive(Clone, Debug)]
pub struct HypersurfaceMesh {
    complex: SimplicialComplex,
    cell_points: Vec<Vec<Point>>,
    metric: Metric,
    orientation_sign: i8,
    vertex_map: Vec<usize>,
    simplex_map: Vec<Vec<usize>>,
    labels: Vec<String>,
    ambient_host: u64,
}

/// One oriented facet handed to [`HypersurfaceMesh::from_facets`].
#[derive(Clone, Debug)]
pub struct OrientedFacet {
    /// Ambient vertex ids in oriented order.
    pub vertices: Vec<usize>,
    /// Coordinates of the vertices in sorted-id order.
    pub points: Vec<Point>,
    pub label: String,
}

impl HypersurfaceMesh {
    /// Builds the hypersurface spanned by `facets` of an ambient complex.
    pub fn from_facets(
        ambient: &SimplicialComplex,
        facets: &[OrientedFacet],
        orientation_sign: i8,
    ) -> Result<Self> {
        let dim = ambient.dim() - 1;
        if facets.is_empty() {
            return Ok(Self {
                complex: SimplicialComplex::empty(dim),
                cell_points: Vec::new(),
                metric: Metric::from_cells(&SimplicialComplex::empty(dim), &[])?,
                orientation_sign,
                vertex_map: Vec::new(),
                simplex_map: vec![Vec::new(); dim + 1],
                labels: Vec::new(),
                ambient_host: ambient.host_id(),
            });
        }
        let used: BTreeSet<usize> = facets.iter().flat_map(|f| f.vertices.iter().copied()).collect();
        let vertex_map: Vec<usize> = used.into_iter().collect();
        let local: HashMap<usize, usize> =
            vertex_map.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let points: Vec<Point> = vertex_map.iter().map(|&v| ambient.points()[v]).collect();
        let tops: Vec<Vec<usize>> = facets
            .iter()
            .map(|f| f.vertices.iter().map(|v| local[v]).collect())
            .collect();
        let complex = SimplicialComplex::from_top_simplices(dim, points, &tops)?;

        // reorder per-facet data to the complex's top ordering
        let mut cell_points = vec![Vec::new(); facets.len()];
        let mut labels = vec![String::new(); facets.len()];
        for (f, t) in facets.iter().zip(&tops) {
            let (sorted, _) = sort_with_parity(t);
            let idx = complex.index_of(dim, &sorted).expect("top simplex present");
            cell_points[idx] = f.points.clone();
            labels[idx] = f.label.clone();
        }
        let metric = Metric::from_cells(&complex, &cell_points)?;
        let simplex_map = (0..=dim)
            .map(|k| {
                complex
                    .simplices(k)
                    .iter()
                    .map(|s| {
                        let amb: Vec<usize> = s.iter().map(|&v| vertex_map[v]).collect();
                        ambient.index_of(k, &amb).expect("hypersurface simplex in ambient")
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            complex,
            cell_points,
            metric,
            orientation_sign,
            vertex_map,
            simplex_map,
            labels,
            ambient_host: ambient.host_id(),
        })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    /// +1 for the boundary with its induced orientation, −1 once reversed.
    pub fn orientation_sign(&self) -> i8 {
        self.orientation_sign
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    /// Ambient index of each k-simplex.
    pub fn simplex_map(&self, k: usize) -> &[usize] {
        &self.simplex_map[k]
    }

    /// Host id of the region this hypersurface was cut from.
    pub fn ambient_host(&self) -> u64 {
        self.ambient_host
    }

    /// Face label of each top simplex.
    pub fn facet_labels(&self) -> &[String] {
        &self.labels
    }

    /// Distinct labels, sorted.
    pub fn labels(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.labels.iter().collect();
        set.into_iter().cloned().collect()
    }

    pub fn is_closed(&self) -> bool {
        self.complex.is_closed()
    }

    /// Number of connected components.
    pub fn components(&self) -> usize {
        self.complex.vertex_components().0
    }

    /// Total (n−1)-volume.
    pub fn volume(&self) -> f64 {
        let k = self.dim();
        self.metric.volumes(k).iter().sum()
    }

    /// The same hypersurface with reversed orientation.
    pub fn reversed(&self) -> Self {
        let mut r = self.clone();
        r.complex = self.complex.reversed();
        r.orientation_sign = -self.orientation_sign;
        r
    }

    fn oriented_facets(&self, tops: impl Iterator<Item = usize>) -> Vec<OrientedFacet> {
        let k = self.dim();
        tops.map(|t| OrientedFacet {
            vertices: self
                .complex
                .oriented_top(t)
                .into_iter()
                .map(|v| self.vertex_map[v])
                .collect(),
            points: self.cell_points[t].clone(),
            label: self.labels[t].clone(),
        })
        .filter(|f| f.vertices.len() == k + 1)
        .collect()
    }

    /// Sub-hypersurface made of the facets carrying `label`; its boundary is
    /// the adjacent corner stratum.
    pub fn extract_face(&self, label: &str, ambient: &SimplicialComplex) -> Result<Self> {
        let tops: Vec<usize> = (0..self.labels.len())
            .filter(|&t| self.labels[t] == label)
            .collect();
        if tops.is_empty() {
            return Err(Error::UnknownLabel(label.to_string()));
        }
        let facets = self.oriented_facets(tops.into_iter());
        let mut face = Self::from_facets(ambient, &facets, 1)?;
        if self.orientation_sign < 0 {
            face = face.reversed();
        }
        Ok(face)
    }

    /// Splits into one hypersurface per label. Faces are ordered by label.
    pub fn faces(&self, ambient: &SimplicialComplex) -> Result<BTreeMap<String, Self>> {
        self.labels()
            .into_iter()
            .map(|l| {
                let f = self.extract_face(&l, ambient)?;
                Ok((l, f))
            })
            .collect()
    }

    /// Maps this hypersurface's k-simplices into `parent`'s indexing.
    pub fn index_in(&self, parent: &HypersurfaceMesh, k: usize) -> Result<Vec<usize>> {
        if parent.ambient_host != self.ambient_host {
            return Err(Error::HostMismatch);
        }
        let lookup: HashMap<usize, usize> = parent.simplex_map[k]
            .iter()
            .enumerate()
            .map(|(i, &a)| (a, i))
            .collect();
        self.simplex_map[k]
            .iter()
            .map(|a| lookup.get(a).copied().ok_or(Error::HostMismatch))
            .collect()
    }
}
