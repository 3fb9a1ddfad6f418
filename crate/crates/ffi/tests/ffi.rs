use std::ffi::{c_char, CStr, CString};
use std::ptr;

use hopflab_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { hl_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn mesh(rings: usize, sectors: usize) -> *mut HlMesh {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { hl_mesh_new(rings, sectors, &mut m) }, HlStatus::Ok);
    m
}

#[test]
fn mesh_round_trip() {
    let m = mesh(4, 6);
    unsafe {
        assert_eq!(hl_mesh_vertex_count(m), 61);
        assert_eq!(hl_mesh_triangle_count(m), 96);
        let mut xy = vec![0.0; 122];
        assert_eq!(hl_mesh_vertices(m, xy.as_mut_ptr(), xy.len()), HlStatus::Ok);
        assert_eq!(&xy[..2], &[0.0, 0.0]);
        assert_eq!(hl_mesh_vertices(m, xy.as_mut_ptr(), 10), HlStatus::InvalidArgument);
        let mut idx = vec![0usize; 3 * 96];
        assert_eq!(hl_mesh_triangles(m, idx.as_mut_ptr(), idx.len()), HlStatus::Ok);
        assert!(idx.iter().all(|&i| i < 61));
        hl_mesh_free(m);
        assert_eq!(hl_mesh_vertex_count(ptr::null()), 0);
    }
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { hl_mesh_new(0, 6, &mut m) }, HlStatus::InvalidArgument);
    assert!(m.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn identity_map_quantities() {
    let m = mesh(16, 8);
    unsafe {
        let n = hl_mesh_vertex_count(m);
        let mut xy = vec![0.0; 2 * n];
        hl_mesh_vertices(m, xy.as_mut_ptr(), xy.len());
        let mut map = ptr::null_mut();
        assert_eq!(hl_map_from_values(m, xy.as_ptr(), n, &mut map), HlStatus::Ok);

        let mut e = HlEnergy::default();
        assert_eq!(hl_energy(m, map, &mut e), HlStatus::Ok);
        assert!((e.min_jacobian - 1.0).abs() < 1e-12);
        assert_eq!(e.negative_jacobian_mass, 0.0);

        let mut deg = 0i64;
        assert_eq!(hl_degree(m, map, 0.1, 0.0, 0.0, &mut deg), HlStatus::Ok);
        assert_eq!(deg, 1);
        assert_eq!(hl_degree(m, map, 0.99, 0.0, 0.05, &mut deg), HlStatus::BoundaryAdjacent);

        let mut comps = 0usize;
        assert_eq!(hl_monotonicity(m, map, 5, 0.0, &mut comps), HlStatus::Ok);
        assert_eq!(comps, 1);

        let mut back = vec![0.0; 2 * n];
        assert_eq!(hl_map_values(map, back.as_mut_ptr(), back.len()), HlStatus::Ok);
        assert_eq!(back, xy);
        hl_map_free(map);
        hl_mesh_free(m);
    }
}

#[test]
fn gallery_minimize_and_hopf() {
    let m = mesh(8, 6);
    unsafe {
        let mut g = ptr::null_mut();
        let name = CString::new("fig1").unwrap();
        assert_eq!(hl_map_gallery(m, name.as_ptr(), &mut g), HlStatus::Ok);
        let nb = 6 * 8;
        let mut b = vec![0.0; 2 * nb];
        assert_eq!(hl_map_boundary_values(m, g, b.as_mut_ptr(), b.len()), HlStatus::Ok);

        let mut harmonic = ptr::null_mut();
        assert_eq!(hl_map_harmonic(m, b.as_ptr(), nb, &mut harmonic), HlStatus::Ok);
        let mut residual = -1.0;
        assert_eq!(hl_hopf_residual(m, harmonic, &mut residual), HlStatus::Ok);
        assert!(residual.is_finite() && residual >= 0.0);

        let mut min = ptr::null_mut();
        assert_eq!(hl_minimize(m, b.as_ptr(), nb, ptr::null(), &mut min), HlStatus::Ok);
        let mut e = HlEnergy::default();
        hl_energy(m, min, &mut e);
        assert!(e.dirichlet > 0.0);

        let cfg = CString::new(r#"{"preconditioner": "diagonal", "max_iters": 3}"#).unwrap();
        let mut short = ptr::null_mut();
        assert_eq!(hl_minimize(m, b.as_ptr(), nb, cfg.as_ptr(), &mut short), HlStatus::Infeasible);
        assert!(!short.is_null());

        let bad = CString::new("{").unwrap();
        let mut none = ptr::null_mut();
        assert_eq!(hl_minimize(m, b.as_ptr(), nb, bad.as_ptr(), &mut none), HlStatus::Parse);

        let unknown = CString::new("nope").unwrap();
        assert_eq!(hl_map_gallery(m, unknown.as_ptr(), &mut none), HlStatus::InvalidArgument);
        assert!(last_error().contains("nope"));

        for p in [g, harmonic, min, short] {
            hl_map_free(p);
        }
        hl_mesh_free(m);
    }
}

#[test]
fn mismatched_and_null_arguments() {
    let (a, b) = (mesh(4, 6), mesh(5, 6));
    unsafe {
        let name = CString::new("identity").unwrap();
        let mut map = ptr::null_mut();
        hl_map_gallery(a, name.as_ptr(), &mut map);
        let mut e = HlEnergy::default();
        assert_eq!(hl_energy(b, map, &mut e), HlStatus::MeshMismatch);
        assert_eq!(hl_energy(ptr::null(), map, &mut e), HlStatus::NullPointer);
        assert_eq!(hl_energy(a, map, ptr::null_mut()), HlStatus::NullPointer);
        assert!(last_error().contains("null"));
        let mut cap = 0.0;
        assert_eq!(hl_capacity_disk(a, 1.0, &mut cap), HlStatus::BoundaryAdjacent);
        hl_map_free(map);
        hl_mesh_free(a);
        hl_mesh_free(b);
    }
}

#[test]
fn capacity_and_scene() {
    let m = mesh(24, 8);
    unsafe {
        let mut cap = 0.0;
        assert_eq!(hl_capacity_disk(m, 0.5, &mut cap), HlStatus::Ok);
        let exact = 2.0 * std::f64::consts::PI / 2f64.ln();
        assert!((cap - exact).abs() / exact < 0.1);
        hl_mesh_free(m);
    }
    let dir = tempfile::tempdir().unwrap();
    let scene = CString::new(r#"{"mesh": {"rings": 16, "sectors": 6}, "boundary": "identity", "analyses": ["energy", "degree"]}"#).unwrap();
    let base = CString::new(dir.path().to_str().unwrap()).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hl_run_scene(scene.as_ptr(), base.as_ptr(), &mut out) }, HlStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(out) }.to_str().unwrap()).unwrap();
    unsafe { hl_string_free(out) };
    assert_eq!(report["analyses"]["degree"]["points"][0]["total_degree"], 1);
    assert!(dir.path().join("hopflab-out/report.json").exists());
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(hl_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("check.c");
    std::fs::write(
        &src,
        "#include \"hopflab.h\"\nint main(void) { HlMesh *m = 0; HlStatus s = hl_mesh_new(4, 6, &m); hl_mesh_free(m); return s; }\n",
    )
    .unwrap();
    let Ok(out) = std::process::Command::new("cc").args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", include]).arg(&src).output()
    else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
