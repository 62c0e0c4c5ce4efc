//! Built-in meshes, addressed by specs such as `disk:N=64` or `annulus:N=32`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};

use super::complex::{Point, SimplicialComplex};
use super::region::RegionMesh;
use crate::error::{Error, Result};

/// Names accepted by [`parse_builtin`].
pub const BUILTIN_NAMES: &[&str] = &[
    "tri1",
    "ann8",
    "disk",
    "hexagon",
    "annulus",
    "two-annuli",
    "square",
    "strip",
    "two-squares",
    "tetrahedron",
    "cube",
    "solid-torus",
    "sphere",
    "torus-surface",
];

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Counter-clockwise triangle in the plane.
fn ccw(points: &[Point], mut t: Vec<usize>) -> Vec<usize> {
    let n = cross(sub(points[t[1]], points[t[0]]), sub(points[t[2]], points[t[0]]));
    if n[2] < 0.0 {
        t.swap(0, 1);
    }
    t
}

/// Triangle with normal pointing away from the origin.
fn outward(points: &[Point], mut t: Vec<usize>) -> Vec<usize> {
    let n = cross(sub(points[t[1]], points[t[0]]), sub(points[t[2]], points[t[0]]));
    let c = [0, 1, 2].map(|i| (points[t[0]][i] + points[t[1]][i] + points[t[2]][i]) / 3.0);
    if dot(n, c) < 0.0 {
        t.swap(0, 1);
    }
    t
}

/// Tetrahedron with positive signed volume.
fn positive(points: &[Point], mut t: Vec<usize>) -> Vec<usize> {
    let [a, b, c, d] = [t[0], t[1], t[2], t[3]].map(|v| points[v]);
    if dot(cross(sub(b, a), sub(c, a)), sub(d, a)) < 0.0 {
        t.swap(0, 1);
    }
    t
}

/// Region with boundary facets labelled by `label(vertex ids, coordinates)`.
fn labelled(
    name: String,
    dim: usize,
    points: Vec<Point>,
    tops: Vec<Vec<usize>>,
    label: impl Fn(&[usize], &[Point]) -> String,
) -> Result<RegionMesh> {
    let probe = SimplicialComplex::from_top_simplices(dim, points.clone(), &tops)?;
    let labels: BTreeMap<Vec<usize>, String> = probe
        .boundary_facets()
        .into_iter()
        .map(|f| {
            let ids = probe.simplex(dim - 1, f).to_vec();
            let pts: Vec<Point> = ids.iter().map(|&v| points[v]).collect();
            let l = label(&ids, &pts);
            (ids, l)
        })
        .collect();
    RegionMesh::from_points(name, dim, points, &tops, &labels)
}

fn check_n(name: &str, n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidSpec(format!("{name}:N={n} (need N >= {min})")));
    }
    Ok(())
}

/// The unit right triangle.
pub fn tri1() -> Result<RegionMesh> {
    let points = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
    labelled("tri1".into(), 2, points, vec![vec![0, 1, 2]], |_, _| "boundary".into())
}

/// Fan of `n` triangles around the origin; rim vertices on the unit circle.
pub fn disk(n: usize) -> Result<RegionMesh> {
    disk_with_radius(n, 1.0)
}

/// Fan of `n` triangles with rim vertices on the circle of radius `r`.
pub fn disk_with_radius(n: usize, r: f64) -> Result<RegionMesh> {
    check_n("disk", n, 3)?;
    let mut points = vec![[0.0; 3]];
    for j in 0..n {
        let a = 2.0 * PI * j as f64 / n as f64;
        points.push([r * a.cos(), r * a.sin(), 0.0]);
    }
    let tops = (0..n)
        .map(|j| ccw(&points, vec![0, 1 + j, 1 + (j + 1) % n]))
        .collect();
    let name = if r == 1.0 { format!("disk:N={n}") } else { format!("disk:N={n},R={r}") };
    labelled(name, 2, points, tops, |_, _| "boundary".into())
}

fn annulus_with(name: String, n: usize, r_in: f64, r_out: f64, phase: f64) -> Result<RegionMesh> {
    check_n("annulus", n, 3)?;
    let mut points = Vec::with_capacity(2 * n);
    for r in [r_in, r_out] {
        for j in 0..n {
            let a = phase + 2.0 * PI * j as f64 / n as f64;
            points.push([r * a.cos(), r * a.sin(), 0.0]);
        }
    }
    let mut tops = Vec::new();
    for j in 0..n {
        let (a, b) = (j, (j + 1) % n);
        let (oa, ob) = (n + a, n + b);
        tops.push(ccw(&points, vec![a, b, ob]));
        tops.push(ccw(&points, vec![a, ob, oa]));
    }
    let mid = 0.5 * (r_in + r_out);
    labelled(name, 2, points, tops, move |_, p| {
        if p.iter().all(|q| q[0].hypot(q[1]) < mid) {
            "inner".into()
        } else {
            "outer".into()
        }
    })
}

/// Annulus between circles of radius 0.5 and 1 with `n` segments.
pub fn annulus(n: usize) -> Result<RegionMesh> {
    annulus_with(format!("annulus:N={n}"), n, 0.5, 1.0, 0.0)
}

/// The 8-triangle square annulus: outer square with corners (±1, ±1), inner
/// square with corners (±0.5, ±0.5).
pub fn ann8() -> Result<RegionMesh> {
    annulus_with("ann8".into(), 4, 0.5 * 2f64.sqrt(), 2f64.sqrt(), FRAC_PI_4)
}

/// Two annuli side by side.
pub fn two_annuli(n: usize) -> Result<RegionMesh> {
    let a = annulus(n)?;
    let b = annulus_with(format!("annulus:N={n}"), n, 0.5, 1.0, 0.0)?;
    let shifted = shift(&b, [3.0, 0.0, 0.0])?;
    Ok(a.disjoint_union(&shifted)?.with_name(format!("two-annuli:N={n}")))
}

fn shift(mesh: &RegionMesh, by: Point) -> Result<RegionMesh> {
    let points: Vec<Point> = mesh
        .complex()
        .points()
        .iter()
        .map(|p| [p[0] + by[0], p[1] + by[1], p[2] + by[2]])
        .collect();
    let n = mesh.dim();
    let tops: Vec<Vec<usize>> = (0..mesh.complex().len(n))
        .map(|t| mesh.complex().oriented_top(t))
        .collect();
    RegionMesh::from_points(mesh.name(), n, points, &tops, &mesh.labels_by_facet())
}

fn grid_square(n: usize, x0: f64) -> (Vec<Point>, Vec<Vec<usize>>) {
    let id = |i: usize, j: usize| i + (n + 1) * j;
    let mut points = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            points.push([x0 + i as f64 / n as f64, j as f64 / n as f64, 0.0]);
        }
    }
    let mut tops = Vec::new();
    for j in 0..n {
        for i in 0..n {
            tops.push(ccw(&points, vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]));
            tops.push(ccw(&points, vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]));
        }
    }
    (points, tops)
}

/// Unit square, `n × n` cells split along the diagonal, with sides labelled
/// south, east, north and west.
pub fn square(n: usize) -> Result<RegionMesh> {
    check_n("square", n, 1)?;
    let (points, tops) = grid_square(n, 0.0);
    labelled(format!("square:N={n}"), 2, points, tops, |_, p| {
        let eq = |c: usize, v: f64| p.iter().all(|q| (q[c] - v).abs() < 1e-12);
        if eq(1, 0.0) {
            "south".into()
        } else if eq(0, 1.0) {
            "east".into()
        } else if eq(1, 1.0) {
            "north".into()
        } else {
            "west".into()
        }
    })
}

/// Annulus cut open along the positive x-axis: `n` segments, faces inner,
/// outer, start (angle 0) and end (angle 2π). Start and end vertices carry
/// identical coordinates.
pub fn strip(n: usize) -> Result<RegionMesh> {
    check_n("strip", n, 3)?;
    let m = n + 1;
    let mut points = Vec::with_capacity(2 * m);
    for r in [0.5, 1.0] {
        for j in 0..m {
            let a = 2.0 * PI * (j % n) as f64 / n as f64;
            points.push([r * a.cos(), r * a.sin(), 0.0]);
        }
    }
    let mut tops = Vec::new();
    for j in 0..n {
        let (a, b) = (j, j + 1);
        let (oa, ob) = (m + a, m + b);
        tops.push(ccw(&points, vec![a, b, ob]));
        tops.push(ccw(&points, vec![a, ob, oa]));
    }
    labelled(format!("strip:N={n}"), 2, points, tops, move |ids, _| {
        let ring = |v: usize| (v / m, v % m);
        let (ra, ja) = ring(ids[0]);
        let (rb, _) = ring(ids[1]);
        match (ra == rb, ra, ja) {
            (true, 0, _) => "inner".into(),
            (true, _, _) => "outer".into(),
            (false, _, 0) => "start".into(),
            _ => "end".into(),
        }
    })
}

/// Vertex matching that glues `start` onto `end` of [`strip`].
pub fn strip_matching(n: usize) -> BTreeMap<usize, usize> {
    let m = n + 1;
    BTreeMap::from([(0, n), (m, m + n)])
}

/// Two unit squares side by side, faces `a` / `seam_a` and `seam_b` / `b`.
pub fn two_squares(n: usize) -> Result<RegionMesh> {
    check_n("two-squares", n, 1)?;
    let (pa, ta) = grid_square(n, 0.0);
    let (pb, tb) = grid_square(n, 1.0);
    let shift = pa.len();
    let mut points = pa;
    points.extend(pb);
    let mut tops = ta;
    tops.extend(tb.into_iter().map(|t| t.into_iter().map(|v| v + shift).collect()));
    labelled(format!("two-squares:N={n}"), 2, points, tops, move |ids, p| {
        let in_b = ids[0] >= shift;
        let on_seam = p.iter().all(|q| (q[0] - 1.0).abs() < 1e-12);
        match (in_b, on_seam) {
            (false, true) => "seam_a".into(),
            (false, false) => "a".into(),
            (true, true) => "seam_b".into(),
            (true, false) => "b".into(),
        }
    })
}

/// Matching of `seam_a` onto `seam_b` for [`two_squares`].
pub fn two_squares_matching(n: usize) -> BTreeMap<usize, usize> {
    let shift = (n + 1) * (n + 1);
    (0..=n)
        .map(|j| (n + (n + 1) * j, shift + (n + 1) * j))
        .collect()
}

/// Standard tetrahedron; face `fi` is opposite vertex i.
pub fn tetrahedron() -> Result<RegionMesh> {
    let points = vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let tops = vec![positive(&points, vec![0, 1, 2, 3])];
    labelled("tetrahedron".into(), 3, points, tops, |ids, _| {
        let missing = (0..4).find(|v| !ids.contains(v)).unwrap_or(0);
        format!("f{missing}")
    })
}

/// Unit cube, `n³` cells each split into six tetrahedra along the main
/// diagonal; sides labelled x0, x1, y0, y1, z0, z1.
pub fn cube(n: usize) -> Result<RegionMesh> {
    check_n("cube", n, 1)?;
    let id = |i: usize, j: usize, k: usize| i + (n + 1) * (j + (n + 1) * k);
    let mut points = Vec::new();
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                points.push([i as f64 / n as f64, j as f64 / n as f64, k as f64 / n as f64]);
            }
        }
    }
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut tops = Vec::new();
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for p in perms {
                    let mut c = [i, j, k];
                    let mut t = vec![id(c[0], c[1], c[2])];
                    for axis in p {
                        c[axis] += 1;
                        t.push(id(c[0], c[1], c[2]));
                    }
                    tops.push(positive(&points, t));
                }
            }
        }
    }
    labelled(format!("cube:N={n}"), 3, points, tops, |_, p| {
        for (c, name) in ["x", "y", "z"].iter().enumerate() {
            for v in [0.0, 1.0] {
                if p.iter().all(|q| (q[c] - v).abs() < 1e-12) {
                    return format!("{name}{}", v as u8);
                }
            }
        }
        "interior".into()
    })
}

/// Ring of `n` triangular prisms around the z-axis, each split into three
/// tetrahedra by the lowest-vertex rule.
pub fn solid_torus(n: usize) -> Result<RegionMesh> {
    check_n("solid-torus", n, 3)?;
    let (big, small) = (2.0, 0.5);
    let mut points = Vec::with_capacity(3 * n);
    for j in 0..n {
        let phi = 2.0 * PI * j as f64 / n as f64;
        for i in 0..3 {
            let t = PI / 2.0 + 2.0 * PI * i as f64 / 3.0;
            let r = big + small * t.cos();
            points.push([r * phi.cos(), r * phi.sin(), small * t.sin()]);
        }
    }
    let mut tops = Vec::new();
    for j in 0..n {
        let a: Vec<usize> = (0..3).map(|i| 3 * j + i).collect();
        let b: Vec<usize> = (0..3).map(|i| 3 * ((j + 1) % n) + i).collect();
        for t in split_prism(&a, &b) {
            tops.push(positive(&points, t));
        }
    }
    labelled(format!("solid-torus:N={n}"), 3, points, tops, |_, _| "boundary".into())
}

/// Splits the prism with bottom `a` and top `b` (a[i] above b[i]) so that
/// each quadrilateral side is cut along the diagonal through its lowest id.
fn split_prism(a: &[usize], b: &[usize]) -> Vec<Vec<usize>> {
    let lowest = *a.iter().chain(b).min().expect("six vertices");
    let (a, b) = if a.contains(&lowest) { (a, b) } else { (b, a) };
    let r = a.iter().position(|&v| v == lowest).expect("lowest vertex");
    let a: Vec<usize> = (0..3).map(|i| a[(r + i) % 3]).collect();
    let b: Vec<usize> = (0..3).map(|i| b[(r + i) % 3]).collect();
    let mut out = vec![vec![a[0], b[0], b[1], b[2]]];
    let quad_min = *[a[1], a[2], b[1], b[2]].iter().min().expect("four vertices");
    if quad_min == a[1] || quad_min == b[2] {
        out.push(vec![a[0], a[1], a[2], b[2]]);
        out.push(vec![a[0], a[1], b[2], b[1]]);
    } else {
        out.push(vec![a[0], a[1], a[2], b[1]]);
        out.push(vec![a[0], a[2], b[2], b[1]]);
    }
    out
}

/// Octahedral sphere, a closed surface.
pub fn sphere() -> Result<RegionMesh> {
    let points = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let mut tops = Vec::new();
    for x in [0, 1] {
        for y in [2, 3] {
            for z in [4, 5] {
                tops.push(outward(&points, vec![x, y, z]));
            }
        }
    }
    RegionMesh::from_points("sphere", 2, points, &tops, &BTreeMap::new())
}

/// Torus of revolution, `n × m` quads split into triangles; closed.
pub fn torus_surface(n: usize, m: usize) -> Result<RegionMesh> {
    check_n("torus-surface", n.min(m), 3)?;
    let (big, small) = (2.0, 0.7);
    let id = |i: usize, j: usize| (i % n) + n * (j % m);
    let mut points = Vec::with_capacity(n * m);
    for j in 0..m {
        let v = 2.0 * PI * j as f64 / m as f64;
        for i in 0..n {
            let u = 2.0 * PI * i as f64 / n as f64;
            let r = big + small * v.cos();
            points.push([r * u.cos(), r * u.sin(), small * v.sin()]);
        }
    }
    let mut tops = Vec::new();
    for j in 0..m {
        for i in 0..n {
            tops.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tops.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    RegionMesh::from_points(format!("torus-surface:N={n},M={m}"), 2, points, &tops, &BTreeMap::new())
}

/// Parsed `name[:K=V,...]` builtin spec.
#[derive(Clone, Debug, PartialEq)]
pub struct BuiltinSpec {
    pub name: String,
    pub params: BTreeMap<String, usize>,
}

impl BuiltinSpec {
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(spec.to_string());
        let (name, rest) = match spec.split_once(':') {
            Some((n, r)) => (n, Some(r)),
            None => (spec, None),
        };
        let name = name.trim().to_ascii_lowercase();
        if !BUILTIN_NAMES.contains(&name.as_str()) {
            return Err(bad());
        }
        let mut params = BTreeMap::new();
        if let Some(rest) = rest {
            for kv in rest.split(',') {
                let (k, v) = kv.split_once('=').ok_or_else(bad)?;
                let k = k.trim().to_ascii_uppercase();
                if k != "N" && k != "M" {
                    return Err(bad());
                }
                let v: usize = v.trim().parse().map_err(|_| bad())?;
                params.insert(k, v);
            }
        }
        Ok(Self { name, params })
    }

    fn get(&self, key: &str, default: usize) -> usize {
        self.params.get(key).copied().unwrap_or(default)
    }

    pub fn build(&self) -> Result<RegionMesh> {
        match self.name.as_str() {
            "tri1" => tri1(),
            "ann8" => ann8(),
            "disk" => disk(self.get("N", 16)),
            "hexagon" => disk(6),
            "annulus" => annulus(self.get("N", 16)),
            "two-annuli" => two_annuli(self.get("N", 8)),
            "square" => square(self.get("N", 2)),
            "strip" => strip(self.get("N", 8)),
            "two-squares" => two_squares(self.get("N", 1)),
            "tetrahedron" => tetrahedron(),
            "cube" => cube(self.get("N", 1)),
            "solid-torus" => solid_torus(self.get("N", 6)),
            "sphere" => sphere(),
            "torus-surface" => torus_surface(self.get("N", 6), self.get("M", 6)),
            _ => Err(Error::InvalidSpec(self.name.clone())),
        }
    }

    /// Faces and matching for the builtins that come with a natural gluing.
    pub fn glue_data(&self) -> Option<(String, String, BTreeMap<usize, usize>)> {
        match self.name.as_str() {
            "strip" => Some(("start".into(), "end".into(), strip_matching(self.get("N", 8)))),
            "two-squares" => Some((
                "seam_a".into(),
                "seam_b".into(),
                two_squares_matching(self.get("N", 1)),
            )),
            _ => None,
        }
    }
}

/// Builds the mesh named by a builtin spec such as `disk:N=64`.
pub fn parse_builtin(spec: &str) -> Result<RegionMesh> {
    BuiltinSpec::parse(spec)?.build()
}
