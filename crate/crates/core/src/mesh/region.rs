use std::collections::{BTreeMap, BTreeSet};

use super::complex::{sort_with_parity, Point, SimplicialComplex};
use super::hypersurface::{HypersurfaceMesh, OrientedFacet};
use super::metric::Metric;
use crate::error::{Error, Result};

/// Label given to every boundary facet when no sidecar is supplied.
pub const DEFAULT_LABEL: &str = "boundary";

/// An oriented simplicial region with a piecewise-flat metric and labelled
/// boundary faces.
///
/// `cell_points[t]` stores the coordinates of top simplex `t` in sorted-vertex
/// order. For meshes read from files it agrees with the global vertex table;
/// glued meshes keep the coordinates of the pieces they came from.
#[derive(Clone, Debug)]
pub struct RegionMesh {
    name: String,
    complex: SimplicialComplex,
    cell_points: Vec<Vec<Point>>,
    metric: Metric,
    face_labels: BTreeMap<usize, String>,
}

impl RegionMesh {
    /// Builds a region; `labels` maps sorted facet tuples to face names.
    ///
    /// Every boundary facet must be labelled and only boundary facets may be.
    /// An empty map labels the whole boundary [`DEFAULT_LABEL`].
    pub fn new(
        name: impl Into<String>,
        complex: SimplicialComplex,
        cell_points: Vec<Vec<Point>>,
        labels: &BTreeMap<Vec<usize>, String>,
    ) -> Result<Self> {
        if complex.dim() < 1 {
            return Err(Error::InvalidComplex("regions need dimension at least 1".into()));
        }
        if cell_points.len() != complex.len(complex.dim()) {
            return Err(Error::InvalidComplex("one coordinate block per top simplex required".into()));
        }
        let metric = Metric::from_cells(&complex, &cell_points)?;
        let k = complex.dim() - 1;
        let boundary: BTreeSet<usize> = complex.boundary_facets().into_iter().collect();
        let mut face_labels = BTreeMap::new();
        for (facet, label) in labels {
            let mut sorted = facet.clone();
            sorted.sort_unstable();
            let idx = complex
                .index_of(k, &sorted)
                .filter(|i| boundary.contains(i))
                .ok_or_else(|| Error::NotABoundaryFacet { facet: sorted.clone() })?;
            face_labels.insert(idx, label.clone());
        }
        if labels.is_empty() {
            for &f in &boundary {
                face_labels.insert(f, DEFAULT_LABEL.to_string());
            }
        }
        if let Some(&f) = boundary.iter().find(|f| !face_labels.contains_key(f)) {
            return Err(Error::UnlabeledFacet {
                facet: complex.simplex(k, f).to_vec(),
            });
        }
        Ok(Self {
            name: name.into(),
            complex,
            cell_points,
            metric,
            face_labels,
        })
    }

    /// Region whose metric comes from the global vertex coordinates.
    pub fn from_points(
        name: impl Into<String>,
        dim: usize,
        points: Vec<Point>,
        tops: &[Vec<usize>],
        labels: &BTreeMap<Vec<usize>, String>,
    ) -> Result<Self> {
        let complex = SimplicialComplex::from_top_simplices(dim, points, tops)?;
        let cell_points = complex
            .simplices(dim)
            .iter()
            .map(|t| t.iter().map(|&v| complex.points()[v]).collect())
            .collect();
        Self::new(name, complex, cell_points, labels)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn cell_points(&self) -> &[Vec<Point>] {
        &self.cell_points
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    /// Boundary facet index to face label.
    pub fn face_labels(&self) -> &BTreeMap<usize, String> {
        &self.face_labels
    }

    /// Face labels keyed by sorted facet tuple, the form accepted by [`RegionMesh::new`].
    pub fn labels_by_facet(&self) -> BTreeMap<Vec<usize>, String> {
        let k = self.dim() - 1;
        self.face_labels
            .iter()
            .map(|(&f, l)| (self.complex.simplex(k, f).to_vec(), l.clone()))
            .collect()
    }

    /// Distinct face labels, sorted.
    pub fn labels(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.face_labels.values().collect();
        set.into_iter().cloned().collect()
    }

    /// Facets carrying `label`.
    pub fn face_facets(&self, label: &str) -> Vec<usize> {
        self.face_labels
            .iter()
            .filter(|(_, l)| l.as_str() == label)
            .map(|(&f, _)| f)
            .collect()
    }

    /// Corner strata: (n−2)-simplices shared by two differently labelled faces.
    pub fn strata(&self) -> BTreeMap<(String, String), Vec<usize>> {
        let n = self.dim();
        let mut out: BTreeMap<(String, String), Vec<usize>> = BTreeMap::new();
        if n < 2 {
            return out;
        }
        let mut owners: BTreeMap<usize, BTreeSet<&String>> = BTreeMap::new();
        for (&f, label) in &self.face_labels {
            for &(g, _) in self.complex.faces(n - 1, f) {
                owners.entry(g).or_default().insert(label);
            }
        }
        for (g, labels) in owners {
            let labels: Vec<&String> = labels.into_iter().collect();
            for i in 0..labels.len() {
                for j in i + 1..labels.len() {
                    out.entry((labels[i].clone(), labels[j].clone()))
                        .or_default()
                        .push(g);
                }
            }
        }
        out
    }

    fn local_points(&self, top: usize, vertices: &[usize]) -> Vec<Point> {
        let tuple = self.complex.simplex(self.dim(), top);
        vertices
            .iter()
            .map(|v| {
                let i = tuple.iter().position(|w| w == v).expect("vertex of top simplex");
                self.cell_points[top][i]
            })
            .collect()
    }

    /// The boundary with its induced orientation.
    pub fn boundary_complex(&self) -> Result<HypersurfaceMesh> {
        let n = self.dim();
        let facets: Vec<OrientedFacet> = self
            .face_labels
            .iter()
            .map(|(&f, label)| {
                let (t, s) = self.complex.cofaces(n - 1, f)[0];
                let sorted = self.complex.simplex(n - 1, f).to_vec();
                let mut oriented = sorted.clone();
                if self.complex.orientation(t) * s < 0 && oriented.len() >= 2 {
                    oriented.swap(0, 1);
                }
                OrientedFacet {
                    vertices: oriented,
                    points: self.local_points(t, &sorted),
                    label: label.clone(),
                }
            })
            .collect();
        HypersurfaceMesh::from_facets(&self.complex, &facets, 1)
    }

    /// The labelled face `label` as an oriented hypersurface.
    pub fn extract_face(&self, label: &str) -> Result<HypersurfaceMesh> {
        self.boundary_complex()?.extract_face(label, &self.complex)
    }

    /// n-volume of the region.
    pub fn volume(&self) -> f64 {
        self.metric.volumes(self.dim()).iter().sum()
    }

    /// (n−1)-volume of the boundary.
    pub fn boundary_volume(&self) -> f64 {
        let k = self.dim() - 1;
        self.face_labels.keys().map(|&f| self.metric.volumes(k)[f]).sum()
    }

    pub fn is_closed(&self) -> bool {
        self.face_labels.is_empty()
    }

    /// Disjoint union; vertices of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &RegionMesh) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::InvalidComplex("disjoint union of different dimensions".into()));
        }
        let n = self.dim();
        let shift = self.complex.len(0);
        let mut points = self.complex.points().to_vec();
        points.extend_from_slice(other.complex.points());
        let mut tops: Vec<Vec<usize>> = (0..self.complex.len(n))
            .map(|t| self.complex.oriented_top(t))
            .collect();
        tops.extend(
            (0..other.complex.len(n))
                .map(|t| other.complex.oriented_top(t).iter().map(|v| v + shift).collect()),
        );
        let complex = SimplicialComplex::from_top_simplices(n, points, &tops)?;
        let mut cell_points = vec![Vec::new(); complex.len(n)];
        for (src, offset) in [(self, 0usize), (other, shift)] {
            for t in 0..src.complex.len(n) {
                let tuple: Vec<usize> = src.complex.simplex(n, t).iter().map(|v| v + offset).collect();
                let idx = complex.index_of(n, &tuple).expect("top simplex");
                cell_points[idx] = src.cell_points[t].clone();
            }
        }
        let mut labels = self.labels_by_facet();
        for (facet, label) in other.labels_by_facet() {
            labels.insert(facet.iter().map(|v| v + shift).collect(), label);
        }
        Self::new(format!("{}+{}", self.name, other.name), complex, cell_points, &labels)
    }

    /// Copy with one Hodge-star entry replaced; for fault-injection fixtures.
    pub fn with_star_override(&self, k: usize, i: usize, value: f64) -> Self {
        let mut m = self.clone();
        m.metric.override_star(k, i, value);
        m
    }

    /// Rebuilds a region from oriented top simplices and per-cell coordinates
    /// given in the order of `tops`.
    pub(crate) fn from_oriented_cells(
        name: impl Into<String>,
        dim: usize,
        points: Vec<Point>,
        tops: &[Vec<usize>],
        oriented_cell_points: &[Vec<Point>],
        labels: &BTreeMap<Vec<usize>, String>,
    ) -> Result<Self> {
        let complex = SimplicialComplex::from_top_simplices(dim, points, tops)?;
        let mut cell_points = vec![Vec::new(); complex.len(dim)];
        for (t, pts) in tops.iter().zip(oriented_cell_points) {
            let (sorted, _) = sort_with_parity(t);
            let idx = complex.index_of(dim, &sorted).expect("top simplex");
            let mut order: Vec<usize> = (0..t.len()).collect();
            order.sort_by_key(|&i| t[i]);
            cell_points[idx] = order.iter().map(|&i| pts[i]).collect();
        }
        Self::new(name, complex, cell_points, labels)
    }

    /// Oriented top simplices with their coordinates in the same vertex order.
    pub(crate) fn oriented_cells(&self) -> Vec<(Vec<usize>, Vec<Point>)> {
        let n = self.dim();
        (0..self.complex.len(n))
            .map(|t| {
                let oriented = self.complex.oriented_top(t);
                let pts = self.local_points(t, &oriented);
                (oriented, pts)
            })
            .collect()
    }
}
