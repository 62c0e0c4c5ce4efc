use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::complex::Point;
use super::region::RegionMesh;
use crate::error::{Error, Result};

/// Face-label sidecar: facet vertex tuples written as `"i,j[,k]"`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct LabelSidecar {
    pub facets: BTreeMap<String, String>,
}

impl LabelSidecar {
    pub fn from_region(mesh: &RegionMesh) -> Self {
        let facets = mesh
            .labels_by_facet()
            .into_iter()
            .map(|(f, l)| {
                let key = f.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
                (key, l)
            })
            .collect();
        Self { facets }
    }

    pub fn to_facet_map(&self) -> Result<BTreeMap<Vec<usize>, String>> {
        self.facets
            .iter()
            .map(|(k, l)| {
                let mut facet = k
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad facet key `{k}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                facet.sort_unstable();
                Ok((facet, l.clone()))
            })
            .collect()
    }
}

fn parse_off(text: &str) -> Result<(Vec<Point>, Vec<Vec<usize>>)> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let first = lines.next().ok_or_else(|| Error::Parse("empty OFF file".into()))?;
    let mut head: Vec<&str> = first.split_whitespace().collect();
    if head.first() != Some(&"OFF") {
        return Err(Error::Parse(format!("expected OFF header, found `{first}`")));
    }
    head.remove(0);
    if head.is_empty() {
        head = lines
            .next()
            .ok_or_else(|| Error::Parse("missing counts line".into()))?
            .split_whitespace()
            .collect();
    }
    let counts = head
        .iter()
        .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad count `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    if counts.len() < 2 {
        return Err(Error::Parse("counts line needs vertex and face counts".into()));
    }
    let (nv, nf) = (counts[0], counts[1]);
    let mut points = Vec::with_capacity(nv);
    for _ in 0..nv {
        let line = lines.next().ok_or_else(|| Error::Parse("truncated vertex list".into()))?;
        let coords = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad coordinate `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        if coords.len() < 2 || coords.len() > 3 {
            return Err(Error::Parse(format!("vertex line `{line}` needs 2 or 3 coordinates")));
        }
        let mut p = [0.0; 3];
        p[..coords.len()].copy_from_slice(&coords);
        points.push(p);
    }
    let mut cells = Vec::with_capacity(nf);
    for _ in 0..nf {
        let line = lines.next().ok_or_else(|| Error::Parse("truncated face list".into()))?;
        let mut toks = line.split_whitespace();
        let mut next_id = || -> Result<usize> {
            let t = toks
                .next()
                .ok_or_else(|| Error::Parse(format!("face line `{line}` is truncated")))?;
            t.parse::<usize>().map_err(|_| Error::Parse(format!("bad face entry `{t}`")))
        };
        // trailing colour values are allowed by the format and ignored
        let k = next_id()?;
        let ids = std::iter::once(Ok(k))
            .chain((0..k).map(|_| next_id()))
            .collect::<Result<Vec<_>>>()?;
        let cell = ids[1..=k].to_vec();
        if let Some(v) = cell.iter().find(|&&v| v >= nv) {
            return Err(Error::Parse(format!("face index {v} out of range")));
        }
        cells.push(cell);
    }
    Ok((points, cells))
}

/// Reads an OFF file of triangles (2D region) or 4-vertex cells (tetrahedra)
/// with an optional JSON label sidecar.
pub fn load_off(path: &Path, labels: Option<&Path>) -> Result<RegionMesh> {
    let text = fs::read_to_string(path)?;
    let (points, cells) = parse_off(&text)?;
    let size = cells.first().map(Vec::len).unwrap_or(0);
    if size < 3 || size > 4 || cells.iter().any(|c| c.len() != size) {
        return Err(Error::Parse("cells must all be triangles or all tetrahedra".into()));
    }
    let facet_labels = match labels {
        Some(p) => {
            let sidecar: LabelSidecar = serde_json::from_str(&fs::read_to_string(p)?)?;
            let map = sidecar.to_facet_map()?;
            if map.is_empty() {
                return Err(Error::Parse("label sidecar lists no facets".into()));
            }
            map
        }
        None => BTreeMap::new(),
    };
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "mesh".into());
    RegionMesh::from_points(name, size - 1, points, &cells, &facet_labels)
}

/// Writes the region as OFF plus a label sidecar next to it.
///
/// Coordinates come from the global vertex table; for glued regions this is
/// the first copy of each identified vertex.
pub fn write_off(mesh: &RegionMesh, path: &Path, labels: Option<&Path>) -> Result<()> {
    let cx = mesh.complex();
    let n = mesh.dim();
    let mut out = fs::File::create(path)?;
    writeln!(out, "OFF")?;
    writeln!(out, "{} {} 0", cx.len(0), cx.len(n))?;
    for p in cx.points() {
        writeln!(out, "{} {} {}", p[0], p[1], p[2])?;
    }
    for t in 0..cx.len(n) {
        let tuple = cx.oriented_top(t);
        let body = tuple.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(out, "{} {}", tuple.len(), body)?;
    }
    if let Some(lp) = labels {
        fs::write(lp, serde_json::to_string_pretty(&LabelSidecar::from_region(mesh))?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_planar_and_spatial_vertices() {
        let (p, c) = parse_off("OFF\n3 1 0\n0 0\n1 0\n0 1\n3 0 1 2\n").unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(c, vec![vec![0, 1, 2]]);
        let (p, _) = parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n").unwrap();
        assert_eq!(p[1], [1.0, 0.0, 0.0]);
        assert!(parse_off("OFF\n3 1 0\n0 0\n1 0\n0 1\n3 0 1 7\n").is_err());
        assert!(parse_off("PLY\n").is_err());
    }
}
