use nalgebra::DMatrix;

use super::complex::{Point, SimplicialComplex};
use crate::error::{Error, Result};

/// Piecewise-flat metric data with barycentric dual cells.
///
/// For a k-simplex σ the dual volume is the sum, over top simplices T ⊇ σ and
/// flags σ = τ_k ⊂ τ_{k+1} ⊂ … ⊂ τ_n = T, of the (n−k)-volumes of the
/// simplices spanned by the barycenters of the flag. The diagonal Hodge star
/// is `dual / primal`. Dual volumes are accumulated per top simplex so that a
/// region glued from pieces keeps the metric of its pieces.
#[derive(Clone, Debug)]
pub struct Metric {
    volumes: Vec<Vec<f64>>,
    dual_volumes: Vec<Vec<f64>>,
    stars: Vec<Vec<f64>>,
}

/// Volume of the simplex spanned by `pts` (0-simplices have volume 1).
pub fn simplex_volume(pts: &[Point]) -> f64 {
    let m = pts.len() - 1;
    if m == 0 {
        return 1.0;
    }
    let e = DMatrix::from_fn(m, 3, |r, c| pts[r + 1][c] - pts[0][c]);
    let g = &e * e.transpose();
    let det = g.determinant().max(0.0);
    let fact: f64 = (1..=m).map(|i| i as f64).product();
    det.sqrt() / fact
}

fn barycenter(pts: &[Point], local: &[usize]) -> Point {
    let mut b = [0.0; 3];
    for &i in local {
        for c in 0..3 {
            b[c] += pts[i][c];
        }
    }
    let n = local.len() as f64;
    b.map(|x| x / n)
}

/// Sum of flag-simplex volumes for face `sigma` (local indices) inside a top
/// simplex with local coordinates `pts`.
fn dual_contribution(pts: &[Point], sigma: &[usize]) -> f64 {
    fn recurse(pts: &[Point], current: &mut Vec<usize>, chain: &mut Vec<Point>, acc: &mut f64) {
        if current.len() == pts.len() {
            *acc += simplex_volume(chain);
            return;
        }
        for v in 0..pts.len() {
            if current.contains(&v) {
                continue;
            }
            current.push(v);
            chain.push(barycenter(pts, current));
            recurse(pts, current, chain, acc);
            chain.pop();
            current.pop();
        }
    }
    let mut current = sigma.to_vec();
    let mut chain = vec![barycenter(pts, sigma)];
    let mut acc = 0.0;
    recurse(pts, &mut current, &mut chain, &mut acc);
    acc
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    go(0, n, size, &mut cur, &mut out);
    out
}

impl Metric {
    /// Computes volumes and barycentric dual volumes.
    ///
    /// `cell_points[t]` holds the coordinates of the vertices of top simplex
    /// `t` in sorted-vertex order.
    pub fn from_cells(complex: &SimplicialComplex, cell_points: &[Vec<Point>]) -> Result<Self> {
        let n = complex.dim();
        let mut volumes: Vec<Vec<f64>> = (0..=n).map(|k| vec![f64::NAN; complex.len(k)]).collect();
        let mut dual_volumes: Vec<Vec<f64>> = (0..=n).map(|k| vec![0.0; complex.len(k)]).collect();
        let local_faces: Vec<Vec<Vec<usize>>> = (0..=n).map(|k| subsets(n + 1, k + 1)).collect();
        for (t, top) in complex.simplices(n).iter().enumerate() {
            let pts = &cell_points[t];
            for (k, faces) in local_faces.iter().enumerate() {
                for local in faces {
                    let global: Vec<usize> = local.iter().map(|&i| top[i]).collect();
                    let idx = complex.index_of(k, &global).expect("face of a top simplex");
                    if volumes[k][idx].is_nan() {
                        let sub: Vec<Point> = local.iter().map(|&i| pts[i]).collect();
                        volumes[k][idx] = simplex_volume(&sub);
                    }
                    dual_volumes[k][idx] += dual_contribution(pts, local);
                }
            }
        }
        // scale for the degeneracy test
        let diam = cell_points
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, p| m.max(p.iter().map(|x| x.abs()).fold(0.0, f64::max)))
            .max(1e-300);
        for k in 1..=n {
            for (i, &v) in volumes[k].iter().enumerate() {
                if !(v > 1e-12 * diam.powi(k as i32)) {
                    return Err(Error::DegenerateSimplex {
                        simplex: complex.simplex(k, i).to_vec(),
                        volume: v,
                    });
                }
            }
        }
        let stars = volumes
            .iter()
            .zip(&dual_volumes)
            .map(|(p, d)| p.iter().zip(d).map(|(p, d)| d / p).collect())
            .collect();
        Ok(Self {
            volumes,
            dual_volumes,
            stars,
        })
    }

    pub fn volumes(&self, k: usize) -> &[f64] {
        &self.volumes[k]
    }

    pub fn dual_volumes(&self, k: usize) -> &[f64] {
        &self.dual_volumes[k]
    }

    /// Diagonal of the degree-k Hodge star.
    pub fn star(&self, k: usize) -> &[f64] {
        &self.stars[k]
    }

    /// Replaces one Hodge-star entry without validation. Only meant for
    /// fault-injection fixtures that check the verification suites react.
    pub fn override_star(&mut self, k: usize, i: usize, value: f64) {
        self.stars[k][i] = value;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_duals_are_barycentric() {
        let pts = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let c = SimplicialComplex::from_top_simplices(2, pts.clone(), &[vec![0, 1, 2]]).unwrap();
        let m = Metric::from_cells(&c, &[pts]).unwrap();
        assert!((m.volumes(2)[0] - 0.5).abs() < 1e-15);
        assert!((m.star(2)[0] - 2.0).abs() < 1e-14);
        for &d in m.dual_volumes(0) {
            assert!((d - 0.5 / 3.0).abs() < 1e-15);
        }
        // edge e01: midpoint (0.5,0) to barycenter (1/3,1/3)
        let expect = ((0.5f64 - 1.0 / 3.0).powi(2) + (1.0f64 / 3.0).powi(2)).sqrt();
        assert!((m.dual_volumes(1)[0] - expect).abs() < 1e-15);
    }

    #[test]
    fn tetrahedron_vertex_duals_sum_to_volume() {
        let pts = vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let c = SimplicialComplex::from_top_simplices(3, pts.clone(), &[vec![0, 1, 2, 3]]).unwrap();
        let m = Metric::from_cells(&c, &[pts]).unwrap();
        let total: f64 = m.dual_volumes(0).iter().sum();
        assert!((total - 1.0 / 6.0).abs() < 1e-15);
        assert!((m.star(3)[0] - 6.0).abs() < 1e-12);
        assert!(m.star(1).iter().chain(m.star(2)).all(|&s| s > 0.0));
    }
}
