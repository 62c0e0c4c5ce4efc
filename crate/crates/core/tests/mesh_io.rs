use std::collections::BTreeMap;
use std::fs;

use dec_ym::hodge::betti_oracle;
use dec_ym::mesh::{builtin, glue, load_off, write_off, LabelSidecar};
use dec_ym::Error;
use tempfile::tempdir;

const TRI1: &str = "OFF\n3 1 0\n0 0\n1 0\n0 1\n3 0 1 2\n";

fn integer_product(a: &[Vec<(usize, i64)>], b: &[Vec<(usize, i64)>], rows: usize) -> Vec<Vec<i64>> {
    // columns of a are faces of (k-1)-simplices; b columns are faces of k-simplices
    b.iter()
        .map(|col| {
            let mut out = vec![0i64; rows];
            for &(j, s) in col {
                for &(i, t) in &a[j] {
                    out[i] += s * t;
                }
            }
            out
        })
        .collect()
}

#[test]
fn single_triangle_off() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("Tri1.off");
    fs::write(&path, TRI1).unwrap();
    let m = load_off(&path, None).unwrap();
    assert_eq!(m.name(), "Tri1");
    assert_eq!(m.complex().boundary_facets().len(), 3);
    let sigma = m.boundary_complex().unwrap();
    assert_eq!(sigma.complex().len(1), 3);
    assert!(sigma.is_closed());
    assert!((m.volume() - 0.5).abs() < 1e-15);
}

#[test]
fn repeated_face_is_rejected() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("rep.off");
    fs::write(&path, "OFF\n3 2 0\n0 0\n1 0\n0 1\n3 0 1 2\n3 0 1 2\n").unwrap();
    assert!(load_off(&path, None).is_err());
}

#[test]
fn malformed_off_is_a_parse_error() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("bad.off");
    fs::write(&path, "OFF\n3 1 0\n0 0\n1 x\n0 1\n3 0 1 2\n").unwrap();
    assert!(matches!(load_off(&path, None), Err(Error::Parse(_))));
    assert!(matches!(load_off(&dir.path().join("missing.off"), None), Err(Error::Io(_))));
}

#[test]
fn sidecar_must_label_every_boundary_facet() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("t.off");
    fs::write(&path, TRI1).unwrap();
    let labels = dir.path().join("t.labels.json");
    fs::write(&labels, r#"{"facets": {"0,1": "south", "1,2": "hyp"}}"#).unwrap();
    assert!(matches!(load_off(&path, Some(&labels)), Err(Error::UnlabeledFacet { .. })));
    fs::write(&labels, r#"{"facets": {"0,1": "south", "1,2": "hyp", "0,2": "west"}}"#).unwrap();
    let m = load_off(&path, Some(&labels)).unwrap();
    assert_eq!(m.labels(), vec!["hyp", "south", "west"]);
    assert_eq!(m.strata().len(), 3);
}

#[test]
fn off_round_trip_keeps_labels_and_metric() {
    let dir = tempdir().unwrap();
    let m = builtin::ann8().unwrap();
    let path = dir.path().join("ann8.off");
    let labels = dir.path().join("ann8.labels.json");
    write_off(&m, &path, Some(&labels)).unwrap();
    let back = load_off(&path, Some(&labels)).unwrap();
    assert_eq!(back.labels(), m.labels());
    assert_eq!(back.labels_by_facet(), m.labels_by_facet());
    for k in 0..=2 {
        for (a, b) in back.metric().star(k).iter().zip(m.metric().star(k)) {
            assert!((a - b).abs() <= 1e-14 * b.abs());
        }
    }
    let sidecar: LabelSidecar = serde_json::from_str(&fs::read_to_string(&labels).unwrap()).unwrap();
    assert_eq!(sidecar.facets.len(), 8);
}

#[test]
fn ann8_boundary_matrices_compose_to_zero() {
    let m = builtin::ann8().unwrap();
    let cx = m.complex();
    assert_eq!(cx.len(2), 8);
    let d1 = cx.boundary_columns(1);
    let d2 = cx.boundary_columns(2);
    let prod = integer_product(&d1, &d2, cx.len(0));
    assert!(prod.iter().all(|c| c.iter().all(|&x| x == 0)));
    assert_eq!(m.labels(), vec!["inner", "outer"]);
    let sigma = m.boundary_complex().unwrap();
    assert_eq!(sigma.components(), 2);
    let outer = m.extract_face("outer").unwrap();
    assert_eq!(outer.components(), 1);
    assert!(outer.is_closed());
}

#[test]
fn tetrahedron_boundary_is_a_sphere() {
    let m = builtin::tetrahedron().unwrap();
    let sigma = m.boundary_complex().unwrap();
    assert_eq!(sigma.complex().len(2), 4);
    assert!(sigma.is_closed());
    assert_eq!(betti_oracle(sigma.complex(), 2), 1);
}

#[test]
fn square_side_is_an_open_segment_between_corners() {
    let m = builtin::square(2).unwrap();
    assert_eq!(m.labels().len(), 4);
    let south = m.extract_face("south").unwrap();
    assert!(!south.is_closed());
    let cx = south.complex();
    let ends: Vec<usize> = (0..cx.len(0)).filter(|&v| cx.is_boundary(0, v)).collect();
    assert_eq!(ends.len(), 2);
    assert_eq!(m.strata().len(), 4);
    assert!(matches!(m.extract_face("nowhere"), Err(Error::UnknownLabel(_))));
}

#[test]
fn two_squares_glue_to_a_rectangle() {
    let m = builtin::two_squares(1).unwrap();
    let g = glue(&m, "seam_a", "seam_b", &builtin::two_squares_matching(1)).unwrap();
    assert_eq!(g.glued.complex().len(2), 4);
    assert_eq!(g.glued.complex().len(0), m.complex().len(0) - 2);
    assert_eq!(betti_oracle(g.glued.complex(), 1), 0);
}

#[test]
fn strip_glues_to_an_annulus() {
    let m = builtin::strip(8).unwrap();
    assert_eq!(betti_oracle(m.complex(), 1), 0);
    let g = glue(&m, "start", "end", &builtin::strip_matching(8)).unwrap();
    assert_eq!(betti_oracle(g.glued.complex(), 1), 1);
}

#[test]
fn self_gluing_and_bad_matchings_are_rejected() {
    let m = builtin::strip(4).unwrap();
    let matching = builtin::strip_matching(4);
    assert!(matches!(glue(&m, "start", "start", &matching), Err(Error::Glue(_))));
    let mut broken: BTreeMap<usize, usize> = matching.clone();
    let first = *broken.keys().next().unwrap();
    broken.remove(&first);
    assert!(matches!(glue(&m, "start", "end", &broken), Err(Error::Glue(_))));
}

#[test]
fn builtin_specs_parse_and_reject_garbage() {
    for spec in ["disk:N=64", "annulus:N=32", "square:N=3", "torus-surface:N=4,M=5"] {
        builtin::parse_builtin(spec).unwrap();
    }
    for spec in ["disk:N=x", "blob", "disk:K=3", "disk:N"] {
        assert!(matches!(builtin::parse_builtin(spec), Err(Error::InvalidSpec(_))), "{spec}");
    }
}
