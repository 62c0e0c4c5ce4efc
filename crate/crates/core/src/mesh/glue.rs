use std::collections::{BTreeMap, BTreeSet};

use super::complex::{sort_with_parity, Point};
use super::metric::simplex_volume;
use super::region::RegionMesh;
use crate::error::{Error, Result};

/// Result of gluing a region to itself along two faces.
#[derive(Clone, Debug)]
pub struct Gluing {
    pub glued: RegionMesh,
    /// Glued vertex id of every vertex of the original region.
    pub vertex_map: Vec<usize>,
    /// `simplex_map[k][i]`: glued index of original k-simplex `i`.
    pub simplex_map: Vec<Vec<usize>>,
}

const ISOMETRY_REL: f64 = 1e-9;

/// Identifies face `face1` with face `face0` through `matching`, a bijection
/// from the vertices of `face0` to those of `face1`.
pub fn glue(
    mesh: &RegionMesh,
    face0: &str,
    face1: &str,
    matching: &BTreeMap<usize, usize>,
) -> Result<Gluing> {
    if face0 == face1 {
        return Err(Error::Glue(format!("face `{face0}` cannot be glued to itself")));
    }
    let n = mesh.dim();
    let cx = mesh.complex();
    let f0 = mesh.face_facets(face0);
    let f1 = mesh.face_facets(face1);
    if f0.is_empty() {
        return Err(Error::UnknownLabel(face0.to_string()));
    }
    if f1.is_empty() {
        return Err(Error::UnknownLabel(face1.to_string()));
    }
    let verts = |facets: &[usize]| -> BTreeSet<usize> {
        facets
            .iter()
            .flat_map(|&f| cx.simplex(n - 1, f).iter().copied())
            .collect()
    };
    let v0 = verts(&f0);
    let v1 = verts(&f1);
    if !v0.is_disjoint(&v1) {
        return Err(Error::Glue("faces share vertices".into()));
    }
    let domain: BTreeSet<usize> = matching.keys().copied().collect();
    let image: BTreeSet<usize> = matching.values().copied().collect();
    if domain != v0 || image != v1 || image.len() != domain.len() {
        return Err(Error::Glue("matching is not a bijection between the face vertices".into()));
    }

    // combinatorial isomorphism with reversed orientation, and isometry
    let boundary = mesh.boundary_complex()?;
    let induced: BTreeMap<usize, Vec<usize>> = {
        let bk = boundary.complex();
        (0..bk.len(n - 1))
            .map(|t| {
                let amb = boundary.simplex_map(n - 1)[t];
                let oriented: Vec<usize> = bk
                    .oriented_top(t)
                    .iter()
                    .map(|&v| boundary.vertex_map()[v])
                    .collect();
                (amb, oriented)
            })
            .collect()
    };
    let f1_set: BTreeSet<usize> = f1.iter().copied().collect();
    let mut hit = BTreeSet::new();
    for &f in &f0 {
        let mapped: Vec<usize> = induced[&f].iter().map(|v| matching[v]).collect();
        let (sorted, parity_mapped) = sort_with_parity(&mapped);
        let g = cx
            .index_of(n - 1, &sorted)
            .filter(|g| f1_set.contains(g))
            .ok_or_else(|| Error::Glue(format!("facet {:?} has no partner in `{face1}`", cx.simplex(n - 1, f))))?;
        hit.insert(g);
        let (_, parity_target) = sort_with_parity(&induced[&g]);
        if parity_mapped == parity_target {
            return Err(Error::Glue(format!(
                "matching preserves the induced orientation on facet {:?}",
                cx.simplex(n - 1, f)
            )));
        }
        let a = facet_points(mesh, f, &cx.simplex(n - 1, f).to_vec());
        let b_order: Vec<usize> = cx.simplex(n - 1, f).iter().map(|v| matching[v]).collect();
        let b = facet_points(mesh, g, &b_order);
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                let la = simplex_volume(&[a[i], a[j]]);
                let lb = simplex_volume(&[b[i], b[j]]);
                if (la - lb).abs() > ISOMETRY_REL * la.max(lb) {
                    return Err(Error::Glue(format!(
                        "matching is not an isometry on facet {:?}",
                        cx.simplex(n - 1, f)
                    )));
                }
            }
        }
    }
    if hit.len() != f1.len() {
        return Err(Error::Glue("faces are not isomorphic under the matching".into()));
    }

    // quotient vertex numbering
    let inverse: BTreeMap<usize, usize> = matching.iter().map(|(&a, &b)| (b, a)).collect();
    let nv = cx.len(0);
    let representative: Vec<usize> = (0..nv).map(|v| *inverse.get(&v).unwrap_or(&v)).collect();
    let kept: Vec<usize> = (0..nv).filter(|v| !inverse.contains_key(v)).collect();
    let mut renumber = vec![usize::MAX; nv];
    for (i, &v) in kept.iter().enumerate() {
        renumber[v] = i;
    }
    let vertex_map: Vec<usize> = (0..nv).map(|v| renumber[representative[v]]).collect();

    // non-face simplices must stay distinct
    let face1_complex = mesh.extract_face(face1)?;
    for k in 1..=n {
        let images: BTreeSet<Vec<usize>> = cx
            .simplices(k)
            .iter()
            .map(|s| {
                let mut t: Vec<usize> = s.iter().map(|&v| vertex_map[v]).collect();
                t.sort_unstable();
                t
            })
            .collect();
        if images.iter().any(|t| t.windows(2).any(|w| w[0] == w[1])) {
            return Err(Error::Glue(format!("gluing collapses a {k}-simplex")));
        }
        let collapsing = if k < n { face1_complex.complex().len(k) } else { 0 };
        if images.len() != cx.len(k) - collapsing {
            return Err(Error::Glue(format!("gluing identifies {k}-simplices outside the faces")));
        }
    }

    let points = kept.iter().map(|&v| cx.points()[v]).collect();
    let (tops, cells): (Vec<Vec<usize>>, Vec<_>) = mesh
        .oriented_cells()
        .into_iter()
        .map(|(t, pts)| (t.iter().map(|&v| vertex_map[v]).collect::<Vec<_>>(), pts))
        .unzip();
    let labels: BTreeMap<Vec<usize>, String> = mesh
        .labels_by_facet()
        .into_iter()
        .filter(|(_, l)| l != face0 && l != face1)
        .map(|(f, l)| {
            let mut t: Vec<usize> = f.iter().map(|&v| vertex_map[v]).collect();
            t.sort_unstable();
            (t, l)
        })
        .collect();
    let name = format!("{}/{}~{}", mesh.name(), face0, face1);
    let glued = RegionMesh::from_oriented_cells(name, n, points, &tops, &cells, &labels)?;
    let gx = glued.complex();
    let simplex_map = (0..=n)
        .map(|k| {
            cx.simplices(k)
                .iter()
                .map(|s| {
                    let mut t: Vec<usize> = s.iter().map(|&v| vertex_map[v]).collect();
                    t.sort_unstable();
                    gx.index_of(k, &t).expect("image simplex")
                })
                .collect()
        })
        .collect();
    Ok(Gluing {
        glued,
        vertex_map,
        simplex_map,
    })
}

fn facet_points(mesh: &RegionMesh, facet: usize, order: &[usize]) -> Vec<Point> {
    let n = mesh.dim();
    let (t, _) = mesh.complex().cofaces(n - 1, facet)[0];
    let tuple = mesh.complex().simplex(n, t);
    order
        .iter()
        .map(|v| {
            let i = tuple.iter().position(|w| w == v).expect("facet vertex");
            mesh.cell_points()[t][i]
        })
        .collect()
}
